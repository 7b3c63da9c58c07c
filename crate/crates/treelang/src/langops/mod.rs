//! Relabelings and tree homomorphisms with their pointwise application,
//! grammar-level images, inverse homomorphisms, grammar reduction, the
//! closure operations (union, concatenations, concatenation closure) and
//! the regular-expression decomposition of recognizable tree languages.

mod kleene;
mod ops;

pub use kleene::{eval_regexpr, kleene, parse_regexpr, RegExpr};
pub use ops::{
    concat_finite_sets, concat_finite_sets_deterministic, concat_rtg, star_rtg, top_concat_rtg,
    union_rtg,
};

use std::collections::{BTreeMap, BTreeSet};

use crate::alphabet::RankedAlphabet;
use crate::error::{Error, Result};
use crate::fta::DbuFta;
use crate::grammar::{normalize_rtg, Rtg, RtgRule};
use crate::tree::{Node, Tree};

/// A rank-preserving node relabeling: per (symbol, rank) a nonempty set of
/// target symbols of the same rank. All source pairs must be covered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relabeling {
    pub source: RankedAlphabet,
    pub target: RankedAlphabet,
    pub map: BTreeMap<(String, usize), BTreeSet<String>>,
}

impl Relabeling {
    pub fn new(
        source: RankedAlphabet,
        target: RankedAlphabet,
        map: BTreeMap<(String, usize), BTreeSet<String>>,
    ) -> Result<Relabeling> {
        for (s, k) in source.pairs() {
            let Some(images) = map.get(&(s.to_string(), k)) else {
                return Err(Error::ill_formed(
                    "relabeling",
                    format!("no entry for {s}/{k}"),
                ));
            };
            if images.is_empty() {
                return Err(Error::ill_formed(
                    "relabeling",
                    format!("empty image set for {s}/{k}"),
                ));
            }
            for b in images {
                if !target.has_rank(b, k) {
                    return Err(Error::ill_formed(
                        "relabeling",
                        format!("image '{b}' of {s}/{k} lacks rank {k}"),
                    ));
                }
            }
        }
        for (s, k) in map.keys() {
            if !source.has_rank(s, *k) {
                return Err(Error::ill_formed(
                    "relabeling",
                    format!("entry {s}/{k} outside the source alphabet"),
                ));
            }
        }
        Ok(Relabeling {
            source,
            target,
            map,
        })
    }

    /// Identity relabeling on an alphabet.
    pub fn identity(alphabet: &RankedAlphabet) -> Relabeling {
        let map = alphabet
            .pairs()
            .into_iter()
            .map(|(s, k)| ((s.to_string(), k), BTreeSet::from([s.to_string()])))
            .collect();
        Relabeling {
            source: alphabet.clone(),
            target: alphabet.clone(),
            map,
        }
    }

    /// All image sets are singletons.
    pub fn is_projection(&self) -> bool {
        self.map.values().all(|s| s.len() == 1)
    }
}

/// The set of relabelings of a tree.
pub fn apply_relabeling(r: &Relabeling, t: &Tree) -> Result<BTreeSet<Tree>> {
    let Node::Sym(sym) = &t.node else {
        return Err(Error::ill_formed("relabel", "tree contains a variable"));
    };
    let k = t.children.len();
    let Some(images) = r.map.get(&(sym.clone(), k)) else {
        return Err(Error::UnknownName {
            kind: "relabeling entry".into(),
            name: format!("{sym}/{k}"),
        });
    };
    let child_sets: Vec<BTreeSet<Tree>> = t
        .children
        .iter()
        .map(|c| apply_relabeling(r, c))
        .collect::<Result<_>>()?;
    let mut out = BTreeSet::new();
    for b in images {
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
            out.insert(Tree::node(b.clone(), children));
        }
    }
    Ok(out)
}

/// A tree homomorphism: per (symbol, rank) an image tree over the target
/// alphabet with variables `x1..xk`. Every source pair must have an entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeHom {
    pub source: RankedAlphabet,
    pub target: RankedAlphabet,
    pub map: BTreeMap<(String, usize), Tree>,
}

impl TreeHom {
    pub fn new(
        source: RankedAlphabet,
        target: RankedAlphabet,
        map: BTreeMap<(String, usize), Tree>,
    ) -> Result<TreeHom> {
        for (s, k) in source.pairs() {
            let Some(image) = map.get(&(s.to_string(), k)) else {
                return Err(Error::ill_formed("hom", format!("no entry for {s}/{k}")));
            };
            if let Some(v) = image.check_ranked(&target, k) {
                return Err(Error::ill_formed("hom", format!("image of {s}/{k}: {v}")));
            }
        }
        for (s, k) in map.keys() {
            if !source.has_rank(s, *k) {
                return Err(Error::ill_formed(
                    "hom",
                    format!("entry {s}/{k} outside the source alphabet"),
                ));
            }
        }
        Ok(TreeHom {
            source,
            target,
            map,
        })
    }

    pub fn identity(alphabet: &RankedAlphabet) -> TreeHom {
        let map = alphabet
            .pairs()
            .into_iter()
            .map(|(s, k)| {
                (
                    (s.to_string(), k),
                    Tree::node_or_leaf(s, (1..=k).map(Tree::var).collect()),
                )
            })
            .collect();
        TreeHom {
            source: alphabet.clone(),
            target: alphabet.clone(),
            map,
        }
    }

    /// No image copies a variable.
    pub fn is_linear(&self) -> bool {
        self.map
            .iter()
            .all(|((_, k), image)| image.is_linear(*k))
    }

    /// Every image uses all of its variables.
    pub fn is_nondeleting(&self) -> bool {
        self.map
            .iter()
            .all(|((_, k), image)| image.is_nondeleting(*k))
    }

    pub fn image_of(&self, sym: &str, rank: usize) -> Result<&Tree> {
        self.map
            .get(&(sym.to_string(), rank))
            .ok_or_else(|| Error::UnknownName {
                kind: "hom entry".into(),
                name: format!("{sym}/{rank}"),
            })
    }
}

/// The homomorphic image `h(t)`. Variables pass through unchanged, which
/// extends `h` to indexed trees the usual way.
pub fn apply_hom(h: &TreeHom, t: &Tree) -> Result<Tree> {
    let Node::Sym(sym) = &t.node else {
        return Ok(t.clone());
    };
    let images: Vec<Tree> = t
        .children
        .iter()
        .map(|c| apply_hom(h, c))
        .collect::<Result<_>>()?;
    Ok(h.image_of(sym, t.children.len())?.subst_vars(&images))
}

/// Extends a relabeling over nonterminal leaves (kept fixed) and computes
/// the image set of a rule right side.
fn relabel_rhs(r: &Relabeling, g: &Rtg, t: &Tree) -> Result<BTreeSet<Tree>> {
    if g.is_nonterminal_leaf(t).is_some() {
        return Ok(BTreeSet::from([t.clone()]));
    }
    let Node::Sym(sym) = &t.node else {
        return Err(Error::ill_formed("relabel", "rule contains a variable"));
    };
    let k = t.children.len();
    let Some(images) = r.map.get(&(sym.clone(), k)) else {
        return Err(Error::UnknownName {
            kind: "relabeling entry".into(),
            name: format!("{sym}/{k}"),
        });
    };
    let child_sets: Vec<BTreeSet<Tree>> = t
        .children
        .iter()
        .map(|c| relabel_rhs(r, g, c))
        .collect::<Result<_>>()?;
    let mut out = BTreeSet::new();
    for b in images {
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
            out.insert(Tree::node(b.clone(), children));
        }
    }
    Ok(out)
}

/// Image of a grammar under a relabeling: every rule is replaced by all of
/// its relabeled variants.
pub fn relabel_image(r: &Relabeling, g: &Rtg) -> Result<Rtg> {
    let mut rules = Vec::new();
    for rule in &g.rules {
        for s in relabel_rhs(r, g, &rule.rhs)? {
            rules.push(RtgRule::new(rule.lhs.clone(), s));
        }
    }
    Rtg::new(
        g.nonterminals.clone(),
        r.target.clone(),
        rules,
        g.start.clone(),
    )
}

/// Image of a grammar under a linear homomorphism: right sides are mapped
/// through the homomorphism after normalization and reduction.
pub fn linear_hom_image(h: &TreeHom, g: &Rtg) -> Result<Rtg> {
    if !h.is_linear() {
        return Err(Error::FlagViolation(
            "homomorphic images of grammars need a linear homomorphism".into(),
        ));
    }
    let g = reduce_rtg(&normalize_rtg(g));
    let mut rules = Vec::new();
    for rule in &g.rules {
        let rhs = if rule.rhs.children.is_empty() {
            h.image_of(rule.rhs.symbol().expect("normal form"), 0)?.clone()
        } else {
            let image = h.image_of(
                rule.rhs.symbol().expect("normal form"),
                rule.rhs.children.len(),
            )?;
            image.subst_vars(&rule.rhs.children)
        };
        rules.push(RtgRule::new(rule.lhs.clone(), rhs));
    }
    Rtg::new(
        g.nonterminals.clone(),
        h.target.clone(),
        rules,
        g.start.clone(),
    )
}

/// Inverse homomorphic image: a deterministic automaton for
/// `{t | h(t) ∈ L(A)}`, same state set, transitions obtained by running
/// `A` over the image trees with variables seeded by the argument states.
pub fn inverse_hom(h: &TreeHom, a: &DbuFta) -> Result<DbuFta> {
    a.alphabet.require_same_ranks(&h.target)?;
    let a = a.completed();
    let eval = |image: &Tree, seeds: &[String]| -> Result<String> {
        fn rec(a: &DbuFta, t: &Tree, seeds: &[String]) -> Result<String> {
            match &t.node {
                Node::Var(i) => Ok(seeds[*i - 1].clone()),
                Node::Sym(sym) => {
                    if t.children.is_empty() {
                        a.leaf
                            .get(sym)
                            .cloned()
                            .ok_or_else(|| Error::MissingTransition {
                                symbol: sym.clone(),
                                states: vec![],
                            })
                    } else {
                        let qs: Vec<String> = t
                            .children
                            .iter()
                            .map(|c| rec(a, c, seeds))
                            .collect::<Result<_>>()?;
                        a.trans.get(&(sym.clone(), qs.clone())).cloned().ok_or_else(
                            || Error::MissingTransition {
                                symbol: sym.clone(),
                                states: qs,
                            },
                        )
                    }
                }
            }
        }
        rec(&a, image, seeds)
    };
    let states: Vec<String> = a.states.iter().cloned().collect();
    let mut leaf = BTreeMap::new();
    let mut trans = BTreeMap::new();
    for (s, k) in h.source.pairs() {
        let image = h.image_of(s, k)?;
        if k == 0 {
            leaf.insert(s.to_string(), eval(image, &[])?);
        } else {
            for tuple in crate::enumerate::tuples(&states, k) {
                let q = eval(image, &tuple)?;
                trans.insert((s.to_string(), tuple), q);
            }
        }
    }
    DbuFta::new(
        h.source.clone(),
        a.states.clone(),
        leaf,
        trans,
        a.finals.clone(),
    )
}

/// Removes unproductive and unreachable nonterminals. An empty language
/// collapses to the canonical empty grammar (start kept, no rules).
pub fn reduce_rtg(g: &Rtg) -> Rtg {
    let mut productive: BTreeSet<String> = BTreeSet::new();
    loop {
        let mut grew = false;
        for r in &g.rules {
            if productive.contains(&r.lhs) {
                continue;
            }
            let ok = nonterminal_leaves(g, &r.rhs)
                .iter()
                .all(|n| productive.contains(n));
            if ok {
                productive.insert(r.lhs.clone());
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    if !productive.contains(&g.start) {
        return Rtg {
            nonterminals: BTreeSet::from([g.start.clone()]),
            terminals: g.terminals.clone(),
            rules: Vec::new(),
            start: g.start.clone(),
        };
    }
    let mut reachable: BTreeSet<String> = BTreeSet::from([g.start.clone()]);
    loop {
        let mut grew = false;
        for r in &g.rules {
            if !reachable.contains(&r.lhs) || !productive.contains(&r.lhs) {
                continue;
            }
            for n in nonterminal_leaves(g, &r.rhs) {
                if productive.contains(&n) && reachable.insert(n) {
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    let keep: BTreeSet<String> = productive.intersection(&reachable).cloned().collect();
    let rules = g
        .rules
        .iter()
        .filter(|r| {
            keep.contains(&r.lhs)
                && nonterminal_leaves(g, &r.rhs).iter().all(|n| keep.contains(n))
        })
        .cloned()
        .collect();
    Rtg {
        nonterminals: keep,
        terminals: g.terminals.clone(),
        rules,
        start: g.start.clone(),
    }
}

fn nonterminal_leaves(g: &Rtg, t: &Tree) -> BTreeSet<String> {
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
