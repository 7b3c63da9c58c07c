//! The regular-expression decomposition of recognizable tree languages:
//! every grammar denotes an expression over finite tree sets, union,
//! concatenation at a symbol and concatenation closure at a symbol, and
//! every such expression evaluates back to a grammar.

use std::collections::{BTreeMap, BTreeSet};

use crate::alphabet::RankedAlphabet;
use crate::error::Result;
use crate::grammar::{fta_to_rtg, Rtg};
use crate::term::{Tok, Tokens};
use crate::tree::{canonical_sort, Node, Tree};

use super::{concat_rtg, star_rtg, union_rtg};

/// Regular tree expression: literals are explicit finite tree sets; the
/// concatenation operators carry their rank-0 symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegExpr {
    Literal(Vec<Tree>),
    Union(Box<RegExpr>, Box<RegExpr>),
    ConcatAt(Box<RegExpr>, String, Box<RegExpr>),
    StarAt(Box<RegExpr>, String),
}

impl std::fmt::Display for RegExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RegExpr::Literal(ts) => {
                write!(f, "LIT{{")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, "}}")
            }
            RegExpr::Union(a, b) => write!(f, "({a} U {b})"),
            RegExpr::ConcatAt(a, s, b) => write!(f, "({a} .{s} {b})"),
            RegExpr::StarAt(a, s) => write!(f, "({a} *{s})"),
        }
    }
}

fn literal(mut ts: Vec<Tree>) -> RegExpr {
    ts = canonical_sort(ts);
    RegExpr::Literal(ts)
}

fn union(a: RegExpr, b: RegExpr) -> RegExpr {
    match (a, b) {
        (RegExpr::Literal(x), b) if x.is_empty() => b,
        (a, RegExpr::Literal(y)) if y.is_empty() => a,
        (RegExpr::Literal(mut x), RegExpr::Literal(y)) => {
            x.extend(y);
            literal(x)
        }
        (a, b) if a == b => a,
        (a, b) => RegExpr::Union(Box::new(a), Box::new(b)),
    }
}

fn occurs(t: &Tree, sym: &str) -> bool {
    match &t.node {
        Node::Sym(s) if s == sym && t.children.is_empty() => true,
        _ => t.children.iter().any(|c| occurs(c, sym)),
    }
}

/// Finite-set concatenation `ts ·_sym ss`, per-occurrence.
fn concat_literals(ts: &[Tree], sym: &str, ss: &[Tree]) -> Vec<Tree> {
    let set: BTreeSet<Tree> = ss.iter().cloned().collect();
    let mut out = BTreeSet::new();
    for t in ts {
        subst_all(t, sym, &set, &mut out);
    }
    out.into_iter().collect()
}

fn subst_all(t: &Tree, sym: &str, set: &BTreeSet<Tree>, out: &mut BTreeSet<Tree>) {
    if t.children.is_empty() {
        if t.symbol() == Some(sym) {
            out.extend(set.iter().cloned());
        } else {
            out.insert(t.clone());
        }
        return;
    }
    let child_sets: Vec<BTreeSet<Tree>> = t
        .children
        .iter()
        .map(|c| {
            let mut s = BTreeSet::new();
            subst_all(c, sym, set, &mut s);
            s
        })
        .collect();
    let mut partial: Vec<Vec<Tree>> = vec![Vec::new()];
    for cs in &child_sets {
        let mut next = Vec::new();
        for p in &partial {
            for s in cs {
                let mut row = p.clone();
                row.push(s.clone());
                next.push(row);
            }
        }
        partial = next;
    }
    for children in partial {
        out.insert(Tree {
            node: t.node.clone(),
            children,
        });
    }
}

fn star(e: RegExpr, sym: &str) -> RegExpr {
    match e {
        RegExpr::Literal(ts) => {
            // the unit {sym} inside a star is absorbed
            let ts: Vec<Tree> = ts
                .into_iter()
                .filter(|t| *t != Tree::leaf(sym))
                .collect();
            if ts.iter().all(|t| !occurs(t, sym)) {
                // nothing can iterate: the closure is the set plus the unit
                let mut out = ts;
                out.push(Tree::leaf(sym));
                literal(out)
            } else {
                RegExpr::StarAt(Box::new(literal(ts)), sym.to_string())
            }
        }
        e => RegExpr::StarAt(Box::new(e), sym.to_string()),
    }
}

fn concat(a: RegExpr, sym: &str, b: RegExpr) -> RegExpr {
    match (a, b) {
        (RegExpr::Literal(x), _) if x.is_empty() => RegExpr::Literal(Vec::new()),
        // unit literals vanish on either side
        (RegExpr::Literal(x), b) if x.len() == 1 && x[0] == Tree::leaf(sym) => b,
        (a, RegExpr::Literal(y)) if y.len() == 1 && y[0] == Tree::leaf(sym) => a,
        (RegExpr::Literal(x), RegExpr::Literal(y)) => literal(concat_literals(&x, sym, &y)),
        // (X ∪ Y)^{*s} ·_s Z = X^{*s} ·_s (Y ∪ Z) when Y is s-free:
        // an s-free element ends a branch exactly like the continuation does
        (RegExpr::StarAt(inner, s2), b) if s2 == sym => {
            if let RegExpr::Literal(ts) = *inner {
                let (with, without): (Vec<Tree>, Vec<Tree>) =
                    ts.into_iter().partition(|t| occurs(t, sym));
                let tail = if without.is_empty() {
                    b
                } else {
                    union(literal(without), b)
                };
                match star(literal(with), sym) {
                    left @ RegExpr::StarAt(..) => {
                        RegExpr::ConcatAt(Box::new(left), sym.to_string(), Box::new(tail))
                    }
                    left => concat(left, sym, tail),
                }
            } else {
                RegExpr::ConcatAt(
                    Box::new(RegExpr::StarAt(inner, s2)),
                    sym.to_string(),
                    Box::new(b),
                )
            }
        }
        (a, b) => RegExpr::ConcatAt(Box::new(a), sym.to_string(), Box::new(b)),
    }
}

/// Decomposes a grammar into a regular tree expression whose evaluation
/// generates the same language. Nonterminals double as the rank-0
/// concatenation points of the expression. The recursion runs on the
/// rules as given; normal form is not required and not established, so
/// small grammars keep small expressions.
pub fn kleene(g: &Rtg) -> Result<RegExpr> {
    let g = g.clone();
    let order: Vec<String> = g.nonterminals.iter().cloned().collect();
    let mut memo: BTreeMap<(String, Vec<String>, Vec<String>), RegExpr> = BTreeMap::new();
    let expr = lang_expr(
        &g,
        &g.start.clone(),
        &order,
        order.len(),
        &BTreeSet::new(),
        &mut memo,
    );
    Ok(expr)
}

/// `L^Q_{A,P}` where `Q` is the first `q_len` nonterminals of `order`
/// minus `P`-overlaps handled by the caller: derivations from `A` whose
/// intermediate rewrites only touch `Q`, ending in a tree over the
/// terminals and `P`.
fn lang_expr(
    g: &Rtg,
    a: &str,
    order: &[String],
    q_len: usize,
    p: &BTreeSet<String>,
    memo: &mut BTreeMap<(String, Vec<String>, Vec<String>), RegExpr>,
) -> RegExpr {
    let q: Vec<String> = order[..q_len]
        .iter()
        .filter(|n| !p.contains(*n))
        .cloned()
        .collect();
    let key = (
        a.to_string(),
        q.clone(),
        p.iter().cloned().collect::<Vec<_>>(),
    );
    if let Some(e) = memo.get(&key) {
        return e.clone();
    }
    let result = if q.is_empty() {
        // base: right sides of A already over terminals and P
        let ts: Vec<Tree> = g
            .rules_of(a)
            .filter(|r| rhs_points(g, &r.rhs).iter().all(|n| p.contains(n)))
            .map(|r| r.rhs.clone())
            .collect();
        literal(ts)
    } else {
        let b = q.last().expect("nonempty Q").clone();
        let q_len_next = peel(order, q_len, &b);
        let mut p_with_b = p.clone();
        p_with_b.insert(b.clone());
        let through = star(
            lang_expr(g, &b, order, q_len_next, &p_with_b, memo),
            &b,
        );
        let tail = concat(through, &b, lang_expr(g, &b, order, q_len_next, p, memo));
        if a == b {
            tail
        } else {
            concat(
                lang_expr(g, a, order, q_len_next, &p_with_b, memo),
                &b,
                tail,
            )
        }
    };
    memo.insert(key, result.clone());
    result
}

/// Shrinks the Q prefix so that `b` is no longer included. Elements of
/// the prefix past `b` are all in P, so cutting at `b` keeps exactly
/// `Q − {b}`.
fn peel(order: &[String], q_len: usize, b: &str) -> usize {
    order[..q_len]
        .iter()
        .position(|n| n == b)
        .expect("b comes from the prefix")
}

fn rhs_points(g: &Rtg, t: &Tree) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    fn walk(g: &Rtg, t: &Tree, out: &mut BTreeSet<String>) {
        if let Some(n) = g.is_nonterminal_leaf(t) {
            out.insert(n.to_string());
            return;
        }
        for c in &t.children {
            walk(g, c, out);
        }
    }
    walk(g, t, &mut out);
    out
}

/// Evaluates an expression to a grammar over `alphabet` (the terminals
/// plus every concatenation point at rank 0).
pub fn eval_regexpr(e: &RegExpr, alphabet: &RankedAlphabet) -> Result<Rtg> {
    match e {
        RegExpr::Literal(ts) => {
            let a = crate::fta::finite_language_fta(alphabet, ts)?;
            Ok(fta_to_rtg(&a))
        }
        RegExpr::Union(a, b) => union_rtg(
            &eval_regexpr(a, alphabet)?,
            &eval_regexpr(b, alphabet)?,
        ),
        RegExpr::ConcatAt(a, s, b) => {
            let ga = eval_regexpr(a, alphabet)?;
            let gb = eval_regexpr(b, alphabet)?;
            concat_rtg(&ga, &[(s.clone(), &gb)])
        }
        RegExpr::StarAt(a, s) => star_rtg(&eval_regexpr(a, alphabet)?, s),
    }
}

/// Parses the expression syntax `LIT{t1, t2}`, `(E U E)`, `(E .A E)`,
/// `(E *A)`.
pub fn parse_regexpr(input: &str) -> Result<RegExpr> {
    let mut toks = Tokens::lex(input)?;
    let e = parse_expr(&mut toks)?;
    if !toks.is_done() {
        return Err(toks.error("trailing input after expression"));
    }
    Ok(e)
}

fn parse_expr(toks: &mut Tokens) -> Result<RegExpr> {
    match toks.peek() {
        Some(Tok::Sym(s)) if s == "LIT" => {
            toks.next();
            toks.expect(&Tok::LBrace)?;
            let mut ts = Vec::new();
            if toks.peek() != Some(&Tok::RBrace) {
                loop {
                    ts.push(toks.parse_term()?);
                    match toks.peek() {
                        Some(Tok::Comma) => {
                            toks.next();
                        }
                        Some(Tok::RBrace) => break,
                        _ => return Err(toks.error("expected ',' or '}' in literal")),
                    }
                }
            }
            toks.expect(&Tok::RBrace)?;
            Ok(literal(ts))
        }
        Some(Tok::LParen) => {
            toks.next();
            let left = parse_expr(toks)?;
            let op = toks.expect_sym()?;
            let e = if op == "U" {
                let right = parse_expr(toks)?;
                RegExpr::Union(Box::new(left), Box::new(right))
            } else if let Some(sym) = op.strip_prefix('.') {
                let right = parse_expr(toks)?;
                RegExpr::ConcatAt(Box::new(left), sym.to_string(), Box::new(right))
            } else if let Some(sym) = op.strip_prefix('*') {
                RegExpr::StarAt(Box::new(left), sym.to_string())
            } else {
                return Err(toks.error(format!("unknown operator '{op}'")));
            };
            toks.expect(&Tok::RParen)?;
            Ok(e)
        }
        _ => Err(toks.error("expected 'LIT' or '('")),
    }
}
