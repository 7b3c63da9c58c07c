//! Grammar-level closure operations: union, top concatenation, tree
//! concatenation (the nondeterministic, per-occurrence kind) and tree
//! concatenation closure.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::grammar::{normalize_rtg, Rtg, RtgRule};
use crate::tree::{Node, Tree};

/// Renames nonterminals through a map, in rule sides and the start symbol.
fn rename_nonterminals(g: &Rtg, map: &BTreeMap<String, String>) -> Rtg {
    fn walk(g: &Rtg, t: &Tree, map: &BTreeMap<String, String>) -> Tree {
        if let Some(n) = g.is_nonterminal_leaf(t) {
            return Tree::leaf(map[n].clone());
        }
        Tree {
            node: t.node.clone(),
            children: t.children.iter().map(|c| walk(g, c, map)).collect(),
        }
    }
    Rtg {
        nonterminals: g.nonterminals.iter().map(|n| map[n].clone()).collect(),
        terminals: g.terminals.clone(),
        rules: g
            .rules
            .iter()
            .map(|r| RtgRule::new(map[&r.lhs].clone(), walk(g, &r.rhs, map)))
            .collect(),
        start: map[&g.start].clone(),
    }
}

/// Renames the grammars apart from each other and from every terminal of
/// the joint alphabet. Returns the renamed grammars and a name pool that
/// still knows everything taken.
fn disjoint(gs: &[&Rtg]) -> (Vec<Rtg>, crate::grammar::FreshNames) {
    let mut joint = gs[0].terminals.clone();
    for g in &gs[1..] {
        joint = joint.union(&g.terminals);
    }
    let mut names = crate::grammar::FreshNames::new(joint.symbols().map(String::from));
    let mut out = Vec::new();
    for g in gs {
        let map: BTreeMap<String, String> = g
            .nonterminals
            .iter()
            .map(|n| (n.clone(), names.prefer(n)))
            .collect();
        let mut renamed = rename_nonterminals(g, &map);
        renamed.terminals = joint.clone();
        out.push(renamed);
    }
    (out, names)
}

/// `L(G1) ∪ L(G2)` with a fresh start chaining to both.
pub fn union_rtg(g1: &Rtg, g2: &Rtg) -> Result<Rtg> {
    let (gs, mut names) = disjoint(&[g1, g2]);
    let start = names.prefer("U0");
    let mut nonterminals: BTreeSet<String> = gs[0]
        .nonterminals
        .union(&gs[1].nonterminals)
        .cloned()
        .collect();
    nonterminals.insert(start.clone());
    let mut rules = vec![
        RtgRule::new(start.clone(), Tree::leaf(gs[0].start.clone())),
        RtgRule::new(start.clone(), Tree::leaf(gs[1].start.clone())),
    ];
    rules.extend(gs[0].rules.iter().cloned());
    rules.extend(gs[1].rules.iter().cloned());
    Rtg::new(nonterminals, gs[0].terminals.clone(), rules, start)
}

/// `tc_a^k(L(G1), …, L(Gk))`: a fresh start rewriting to `a[S1…Sk]`.
pub fn top_concat_rtg(symbol: &str, parts: &[&Rtg]) -> Result<Rtg> {
    let k = parts.len();
    if k == 0 {
        return Err(Error::ill_formed("top_concat", "needs at least one operand"));
    }
    let (gs, mut names) = disjoint(parts);
    if !gs[0].terminals.has_rank(symbol, k) {
        return Err(Error::RankMismatch {
            symbol: symbol.to_string(),
            used: k,
            declared: gs[0]
                .terminals
                .ranks_of(symbol)
                .map(|rs| rs.iter().copied().collect())
                .unwrap_or_default(),
        });
    }
    let start = names.prefer("T0");
    let mut nonterminals: BTreeSet<String> = BTreeSet::from([start.clone()]);
    let mut rules = vec![RtgRule::new(
        start.clone(),
        Tree::node(
            symbol,
            gs.iter().map(|g| Tree::leaf(g.start.clone())).collect(),
        ),
    )];
    for g in &gs {
        nonterminals.extend(g.nonterminals.iter().cloned());
        rules.extend(g.rules.iter().cloned());
    }
    Rtg::new(nonterminals, gs[0].terminals.clone(), rules, start)
}

/// Tree concatenation `L(G0)⟨a1 ← L(G1), …⟩` in the nondeterministic,
/// per-occurrence sense: all grammars are normalized, then every leaf rule
/// `A → ai` of the head grammar is redirected to the i-th start symbol.
pub fn concat_rtg(g0: &Rtg, bindings: &[(String, &Rtg)]) -> Result<Rtg> {
    let keys: BTreeSet<&String> = bindings.iter().map(|(a, _)| a).collect();
    if keys.len() != bindings.len() {
        return Err(Error::ill_formed("concat", "binding keys must be distinct"));
    }
    for (a, _) in bindings {
        if !g0.terminals.has_rank(a, 0) {
            return Err(Error::ill_formed(
                "concat",
                format!("'{a}' is not a rank-0 terminal"),
            ));
        }
    }
    let normalized: Vec<Rtg> = std::iter::once(g0)
        .chain(bindings.iter().map(|(_, g)| *g))
        .map(normalize_rtg)
        .collect();
    let refs: Vec<&Rtg> = normalized.iter().collect();
    let (gs, _) = disjoint(&refs);
    let head = &gs[0];
    let mut rules: Vec<RtgRule> = Vec::new();
    for r in &head.rules {
        let redirect = bindings
            .iter()
            .position(|(a, _)| r.rhs == Tree::leaf(a.clone()));
        match redirect {
            Some(i) => rules.push(RtgRule::new(
                r.lhs.clone(),
                Tree::leaf(gs[1 + i].start.clone()),
            )),
            None => rules.push(r.clone()),
        }
    }
    let mut nonterminals = head.nonterminals.clone();
    for g in &gs[1..] {
        nonterminals.extend(g.nonterminals.iter().cloned());
        rules.extend(g.rules.iter().cloned());
    }
    Rtg::new(nonterminals, head.terminals.clone(), rules, head.start.clone())
}

/// Tree concatenation closure `L(G)^{*a}`.
pub fn star_rtg(g: &Rtg, symbol: &str) -> Result<Rtg> {
    if !g.terminals.has_rank(symbol, 0) {
        return Err(Error::ill_formed(
            "star",
            format!("'{symbol}' is not a rank-0 terminal"),
        ));
    }
    let g = normalize_rtg(g);
    let mut names = crate::grammar::FreshNames::new(
        g.nonterminals
            .iter()
            .cloned()
            .chain(g.terminals.symbols().map(String::from)),
    );
    let start = names.prefer("K0");
    let mut nonterminals = g.nonterminals.clone();
    nonterminals.insert(start.clone());
    let mut rules = g.rules.clone();
    for r in &g.rules {
        if r.rhs == Tree::leaf(symbol) {
            rules.push(RtgRule::new(r.lhs.clone(), Tree::leaf(g.start.clone())));
        }
    }
    rules.push(RtgRule::new(start.clone(), Tree::leaf(g.start.clone())));
    rules.push(RtgRule::new(start.clone(), Tree::leaf(symbol)));
    Rtg::new(nonterminals, g.terminals.clone(), rules, start)
}

/// Brute-force evaluation of nondeterministic tree concatenation on
/// explicit finite sets: every occurrence of a bound key chooses its
/// replacement independently. Test oracle for the grammar constructions.
pub fn concat_finite_sets(
    trees: &BTreeSet<Tree>,
    bindings: &[(String, BTreeSet<Tree>)],
) -> BTreeSet<Tree> {
    let mut out = BTreeSet::new();
    for t in trees {
        expand_occurrences(t, bindings, &mut out);
    }
    out
}

fn expand_occurrences(
    t: &Tree,
    bindings: &[(String, BTreeSet<Tree>)],
    out: &mut BTreeSet<Tree>,
) {
    if t.children.is_empty() {
        if let Node::Sym(s) = &t.node {
            if let Some((_, set)) = bindings.iter().find(|(a, _)| a == s) {
                out.extend(set.iter().cloned());
                return;
            }
        }
        out.insert(t.clone());
        return;
    }
    let child_sets: Vec<BTreeSet<Tree>> = t
        .children
        .iter()
        .map(|c| {
            let mut s = BTreeSet::new();
            expand_occurrences(c, bindings, &mut s);
            s
        })
        .collect();
    let mut partial: Vec<Vec<Tree>> = vec![Vec::new()];
    for set in &child_sets {
        let mut next = Vec::new();
        for p in &partial {
            for s in set {
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

/// Deterministic tree concatenation on finite sets: all occurrences of the
/// same key receive the same replacement. Only a test-side utility.
pub fn concat_finite_sets_deterministic(
    trees: &BTreeSet<Tree>,
    bindings: &[(String, BTreeSet<Tree>)],
) -> BTreeSet<Tree> {
    let mut out = BTreeSet::new();
    let mut assignment: Vec<(Node, Tree)> = Vec::new();
    fn rec(
        trees: &BTreeSet<Tree>,
        bindings: &[(String, BTreeSet<Tree>)],
        assignment: &mut Vec<(Node, Tree)>,
        out: &mut BTreeSet<Tree>,
    ) {
        if assignment.len() == bindings.len() {
            let map: BTreeMap<Node, Tree> = assignment.iter().cloned().collect();
            for t in trees {
                out.insert(t.subst_leaves(&map));
            }
            return;
        }
        let (key, set) = &bindings[assignment.len()];
        for s in set {
            assignment.push((Node::Sym(key.clone()), s.clone()));
            rec(trees, bindings, assignment, out);
            assignment.pop();
        }
    }
    rec(trees, bindings, &mut assignment, &mut out);
    out
}
