//! Embeddings of the simple transformations — relabelings, automaton
//! restrictions and homomorphisms — into transducers, and the inverse
//! extraction of a homomorphism from a one-state total-deterministic
//! transducer.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::fta::{associate_bu_td, NbuFta, State};
use crate::grammar::FreshNames;
use crate::langops::{Relabeling, TreeHom};
use crate::tree::Tree;

use super::{classify, classify_td, BuFtt, BuRule, OutTree, TdFtt, TdRule};

fn fresh_state(alphabets: &[&crate::alphabet::RankedAlphabet], base: &str) -> State {
    let mut names = FreshNames::new(
        alphabets
            .iter()
            .flat_map(|a| a.symbols().map(String::from)),
    );
    names.prefer(base)
}

/// Renames states away from the symbol namespaces, deterministically.
fn safe_states(
    states: &BTreeSet<State>,
    alphabets: &[&crate::alphabet::RankedAlphabet],
) -> BTreeMap<State, State> {
    let mut names = FreshNames::new(
        alphabets
            .iter()
            .flat_map(|a| a.symbols().map(String::from)),
    );
    states
        .iter()
        .map(|q| (q.clone(), names.prefer(q)))
        .collect()
}

/// A one-state bottom-up transducer realizing a relabeling.
pub fn embed_relabeling_bu(r: &Relabeling) -> BuFtt {
    let q = fresh_state(&[&r.source, &r.target], "q");
    let mut rules = Vec::new();
    for ((a, k), images) in &r.map {
        for b in images {
            let rhs = Tree::node_or_leaf(b.clone(), (1..=*k).map(Tree::var).collect());
            rules.push(BuRule {
                sym: a.clone(),
                child_states: vec![q.clone(); *k],
                state: q.clone(),
                rhs,
            });
        }
    }
    BuFtt::new(
        r.source.clone(),
        r.target.clone(),
        BTreeSet::from([q.clone()]),
        rules,
        BTreeSet::from([q]),
    )
    .expect("relabeling embeds into a well-formed transducer")
}

/// A one-state top-down transducer realizing a relabeling.
pub fn embed_relabeling_td(r: &Relabeling) -> TdFtt {
    let q = fresh_state(&[&r.source, &r.target], "q");
    let mut rules = Vec::new();
    for ((a, k), images) in &r.map {
        for b in images {
            let rhs = if *k == 0 {
                OutTree::leaf(b.clone())
            } else {
                OutTree::Out(
                    b.clone(),
                    (1..=*k).map(|i| OutTree::Call(q.clone(), i)).collect(),
                )
            };
            rules.push(TdRule {
                state: q.clone(),
                sym: a.clone(),
                rank: *k,
                rhs,
                look: BTreeMap::new(),
            });
        }
    }
    TdFtt::new(
        r.source.clone(),
        r.target.clone(),
        BTreeSet::from([q.clone()]),
        rules,
        BTreeSet::from([q]),
    )
    .expect("relabeling embeds into a well-formed transducer")
}

/// The identity-restriction transducer of an automaton:
/// `T(M) = {(t, t) | t ∈ L}`.
pub fn embed_fta_bu(a: &NbuFta) -> BuFtt {
    let rename = safe_states(&a.states, &[&a.alphabet]);
    let mut rules = Vec::new();
    for (sym, qs) in &a.leaf {
        for q in qs {
            rules.push(BuRule {
                sym: sym.clone(),
                child_states: vec![],
                state: rename[q].clone(),
                rhs: Tree::leaf(sym.clone()),
            });
        }
    }
    for ((sym, qs), rs) in &a.trans {
        for r in rs {
            rules.push(BuRule {
                sym: sym.clone(),
                child_states: qs.iter().map(|q| rename[q].clone()).collect(),
                state: rename[r].clone(),
                rhs: Tree::node_or_leaf(
                    sym.clone(),
                    (1..=qs.len()).map(Tree::var).collect(),
                ),
            });
        }
    }
    BuFtt::new(
        a.alphabet.clone(),
        a.alphabet.clone(),
        rename.values().cloned().collect(),
        rules,
        a.finals.iter().map(|q| rename[q].clone()).collect(),
    )
    .expect("automaton embeds into a well-formed transducer")
}

/// Top-down identity restriction, through the associated top-down
/// automaton.
pub fn embed_fta_td(a: &NbuFta) -> TdFtt {
    let td = associate_bu_td(a);
    let rename = safe_states(&td.states, &[&a.alphabet]);
    let mut rules = Vec::new();
    for ((sym, k, q), succs) in &td.trans {
        for qs in succs {
            rules.push(TdRule {
                state: rename[q].clone(),
                sym: sym.clone(),
                rank: *k,
                rhs: OutTree::Out(
                    sym.clone(),
                    qs.iter()
                        .enumerate()
                        .map(|(i, qi)| OutTree::Call(rename[qi].clone(), i + 1))
                        .collect(),
                ),
                look: BTreeMap::new(),
            });
        }
    }
    for (sym, qs) in &td.leaf_final {
        for q in qs {
            rules.push(TdRule {
                state: rename[q].clone(),
                sym: sym.clone(),
                rank: 0,
                rhs: OutTree::leaf(sym.clone()),
                look: BTreeMap::new(),
            });
        }
    }
    TdFtt::new(
        a.alphabet.clone(),
        a.alphabet.clone(),
        rename.values().cloned().collect(),
        rules,
        td.init.iter().map(|q| rename[q].clone()).collect(),
    )
    .expect("automaton embeds into a well-formed transducer")
}

/// A one-state total-deterministic bottom-up transducer realizing a
/// homomorphism.
pub fn embed_hom_bu(h: &TreeHom) -> BuFtt {
    let q = fresh_state(&[&h.source, &h.target], "q");
    let rules = h
        .map
        .iter()
        .map(|((a, k), image)| BuRule {
            sym: a.clone(),
            child_states: vec![q.clone(); *k],
            state: q.clone(),
            rhs: image.clone(),
        })
        .collect();
    BuFtt::new(
        h.source.clone(),
        h.target.clone(),
        BTreeSet::from([q.clone()]),
        rules,
        BTreeSet::from([q]),
    )
    .expect("homomorphism embeds into a well-formed transducer")
}

/// A one-state total-deterministic top-down transducer realizing a
/// homomorphism.
pub fn embed_hom_td(h: &TreeHom) -> TdFtt {
    let q = fresh_state(&[&h.source, &h.target], "q");
    let rules = h
        .map
        .iter()
        .map(|((a, k), image)| TdRule {
            state: q.clone(),
            sym: a.clone(),
            rank: *k,
            rhs: OutTree::from_var_tree(image, &vec![q.clone(); *k]),
            look: BTreeMap::new(),
        })
        .collect();
    TdFtt::new(
        h.source.clone(),
        h.target.clone(),
        BTreeSet::from([q.clone()]),
        rules,
        BTreeSet::from([q]),
    )
    .expect("homomorphism embeds into a well-formed transducer")
}

/// Inverse of [`embed_hom_bu`]: reads the homomorphism off a one-state
/// total-deterministic bottom-up transducer.
pub fn extract_hom_bu(m: &BuFtt) -> Result<TreeHom> {
    let flags = classify(m);
    if !(flags.pure && flags.total_deterministic) {
        return Err(Error::FlagViolation(
            "homomorphism extraction needs a one-state total-deterministic transducer".into(),
        ));
    }
    let map = m
        .rules
        .iter()
        .map(|r| ((r.sym.clone(), r.child_states.len()), r.rhs.clone()))
        .collect();
    TreeHom::new(m.input.clone(), m.output.clone(), map)
}

/// Inverse of [`embed_hom_td`].
pub fn extract_hom_td(m: &TdFtt) -> Result<TreeHom> {
    let flags = classify_td(&m.to_lookahead())?;
    if !(flags.pure && flags.total_deterministic) {
        return Err(Error::FlagViolation(
            "homomorphism extraction needs a one-state total-deterministic transducer".into(),
        ));
    }
    let map = m
        .rules
        .iter()
        .map(|r| {
            let image = out_to_var_tree(&r.rhs);
            ((r.sym.clone(), r.rank), image)
        })
        .collect();
    TreeHom::new(m.input.clone(), m.output.clone(), map)
}

/// Replaces every call by its variable; sound for one-state transducers.
pub(super) fn out_to_var_tree(pat: &OutTree) -> Tree {
    match pat {
        OutTree::Call(_, i) => Tree::var(*i),
        OutTree::Out(s, cs) => {
            Tree::node_or_leaf(s.clone(), cs.iter().map(out_to_var_tree).collect())
        }
    }
}
