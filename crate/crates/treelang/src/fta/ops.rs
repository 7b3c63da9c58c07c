//! Constructions on tree automata: the subset construction, the
//! bottom-up/top-down association, Boolean operations, the yield-regularity
//! automaton and automata for finite languages.

use std::collections::{BTreeMap, BTreeSet};

use crate::alphabet::RankedAlphabet;
use crate::enumerate::tuples;
use crate::error::{Error, Result};
use crate::tree::Tree;

use super::{DbuFta, Dfa, NbuFta, NtdFta, State};

fn subset_name(qs: &BTreeSet<State>) -> State {
    let mut s = String::from("{");
    for (i, q) in qs.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(q);
    }
    s.push('}');
    s
}

/// Subset construction. The result is total over its (reachable) states;
/// the empty subset acts as the sink. Evaluated semi-naively: each round
/// only fills transitions whose key mentions a subset found in the
/// previous round.
pub fn determinize(a: &NbuFta) -> DbuFta {
    let mut old: Vec<BTreeSet<State>> = Vec::new();
    let mut fresh: Vec<BTreeSet<State>> = Vec::new();
    let mut known: BTreeSet<BTreeSet<State>> = BTreeSet::new();
    let mut leaf: BTreeMap<String, BTreeSet<State>> = BTreeMap::new();
    for (s, k) in a.alphabet.pairs() {
        if k == 0 {
            let set = a.leaf.get(s).cloned().unwrap_or_default();
            if known.insert(set.clone()) {
                fresh.push(set.clone());
            }
            leaf.insert(s.to_string(), set);
        }
    }
    let mut trans: BTreeMap<(String, Vec<BTreeSet<State>>), BTreeSet<State>> = BTreeMap::new();
    while !fresh.is_empty() {
        let mut next_fresh: Vec<BTreeSet<State>> = Vec::new();
        for (s, k) in a.alphabet.pairs() {
            if k == 0 {
                continue;
            }
            // at least one component of the key must come from `fresh`
            for pivot in 0..k {
                let mut key: Vec<BTreeSet<State>> = Vec::with_capacity(k);
                fill_keys(k, pivot, &old, &fresh, &mut key, &mut |key| {
                    let mut image = BTreeSet::new();
                    let mut combo: Vec<&State> = Vec::new();
                    collect_image(a, s, key, &mut combo, &mut image);
                    if known.insert(image.clone()) {
                        next_fresh.push(image.clone());
                    }
                    trans.insert((s.to_string(), key.to_vec()), image);
                });
            }
        }
        old.append(&mut fresh);
        fresh = next_fresh;
    }
    let states: BTreeSet<State> = known.iter().map(subset_name).collect();
    DbuFta {
        alphabet: a.alphabet.clone(),
        states,
        leaf: leaf
            .into_iter()
            .map(|(s, set)| (s, subset_name(&set)))
            .collect(),
        trans: trans
            .into_iter()
            .map(|((s, tuple), image)| {
                (
                    (s, tuple.iter().map(subset_name).collect()),
                    subset_name(&image),
                )
            })
            .collect(),
        finals: known
            .iter()
            .filter(|set| !set.is_disjoint(&a.finals))
            .map(subset_name)
            .collect(),
    }
}

/// Enumerates subset keys with the pivot position drawn from the fresh
/// pool, earlier positions from the old pool, later ones from either.
fn fill_keys(
    k: usize,
    pivot: usize,
    old: &[BTreeSet<State>],
    fresh: &[BTreeSet<State>],
    key: &mut Vec<BTreeSet<State>>,
    emit: &mut dyn FnMut(&[BTreeSet<State>]),
) {
    if key.len() == k {
        emit(key);
        return;
    }
    let idx = key.len();
    let pools: &[&[BTreeSet<State>]] = match idx.cmp(&pivot) {
        std::cmp::Ordering::Less => &[old],
        std::cmp::Ordering::Equal => &[fresh],
        std::cmp::Ordering::Greater => &[old, fresh],
    };
    for pool in pools {
        for set in *pool {
            key.push(set.clone());
            fill_keys(k, pivot, old, fresh, key, emit);
            key.pop();
        }
    }
}

fn collect_image<'a>(
    a: &NbuFta,
    sym: &str,
    tuple: &'a [BTreeSet<State>],
    combo: &mut Vec<&'a State>,
    image: &mut BTreeSet<State>,
) {
    if combo.len() == tuple.len() {
        let key = (
            sym.to_string(),
            combo.iter().map(|q| (*q).clone()).collect::<Vec<_>>(),
        );
        if let Some(rs) = a.trans.get(&key) {
            image.extend(rs.iter().cloned());
        }
        return;
    }
    for q in &tuple[combo.len()] {
        combo.push(q);
        collect_image(a, sym, tuple, combo, image);
        combo.pop();
    }
}

/// The top-down automaton associated with a bottom-up one:
/// `q ∈ δ_a(q1…qk)` iff `(q1…qk) ∈ μ_a(q)`, initial and final data swapped.
pub fn associate_bu_td(a: &NbuFta) -> NtdFta {
    let mut trans: BTreeMap<(String, usize, State), BTreeSet<Vec<State>>> = BTreeMap::new();
    for ((s, qs), rs) in &a.trans {
        for q in rs {
            trans
                .entry((s.clone(), qs.len(), q.clone()))
                .or_default()
                .insert(qs.clone());
        }
    }
    NtdFta {
        alphabet: a.alphabet.clone(),
        states: a.states.clone(),
        init: a.finals.clone(),
        trans,
        leaf_final: a.leaf.clone(),
    }
}

/// Inverse of [`associate_bu_td`].
pub fn associate_td_bu(a: &NtdFta) -> NbuFta {
    let mut trans: BTreeMap<(String, Vec<State>), BTreeSet<State>> = BTreeMap::new();
    for ((s, _, q), succs) in &a.trans {
        for qs in succs {
            trans
                .entry((s.clone(), qs.clone()))
                .or_default()
                .insert(q.clone());
        }
    }
    NbuFta {
        alphabet: a.alphabet.clone(),
        states: a.states.clone(),
        leaf: a.leaf_final.clone(),
        trans,
        finals: a.init.clone(),
    }
}

/// `T_Σ − L(A)`: determinize, complete, flip the final states.
pub fn complement(a: &NbuFta) -> NbuFta {
    let det = determinize(a).completed();
    let flipped = DbuFta {
        finals: det.states.difference(&det.finals).cloned().collect(),
        ..det
    };
    flipped.to_nondet()
}

/// Product construction for `L(A) ∩ L(B)`.
pub fn intersection(a: &NbuFta, b: &NbuFta) -> Result<NbuFta> {
    a.alphabet.require_same_ranks(&b.alphabet)?;
    let pair = |p: &State, q: &State| format!("{{{p},{q}}}");
    let mut states = BTreeSet::new();
    for p in &a.states {
        for q in &b.states {
            states.insert(pair(p, q));
        }
    }
    let mut leaf: BTreeMap<String, BTreeSet<State>> = BTreeMap::new();
    for (s, k) in a.alphabet.pairs() {
        if k != 0 {
            continue;
        }
        let pa = a.leaf.get(s).cloned().unwrap_or_default();
        let pb = b.leaf.get(s).cloned().unwrap_or_default();
        let mut set = BTreeSet::new();
        for p in &pa {
            for q in &pb {
                set.insert(pair(p, q));
            }
        }
        leaf.insert(s.to_string(), set);
    }
    let mut trans: BTreeMap<(String, Vec<State>), BTreeSet<State>> = BTreeMap::new();
    for ((s, ps), rs_a) in &a.trans {
        for ((s2, qs), rs_b) in &b.trans {
            if s != s2 || ps.len() != qs.len() {
                continue;
            }
            let key_states: Vec<State> =
                ps.iter().zip(qs).map(|(p, q)| pair(p, q)).collect();
            let entry = trans.entry((s.clone(), key_states)).or_default();
            for p in rs_a {
                for q in rs_b {
                    entry.insert(pair(p, q));
                }
            }
        }
    }
    let mut finals = BTreeSet::new();
    for p in &a.finals {
        for q in &b.finals {
            finals.insert(pair(p, q));
        }
    }
    Ok(NbuFta {
        alphabet: a.alphabet.clone(),
        states,
        leaf,
        trans,
        finals,
    })
}

/// Disjoint-union construction for `L(A) ∪ L(B)`.
pub fn union(a: &NbuFta, b: &NbuFta) -> Result<NbuFta> {
    a.alphabet.require_same_ranks(&b.alphabet)?;
    let a = a.rename_states("l.");
    let b = b.rename_states("r.");
    let mut leaf = a.leaf.clone();
    for (s, qs) in &b.leaf {
        leaf.entry(s.clone()).or_default().extend(qs.iter().cloned());
    }
    let mut trans = a.trans.clone();
    for (key, rs) in &b.trans {
        trans.entry(key.clone()).or_default().extend(rs.iter().cloned());
    }
    NbuFta::new(
        a.alphabet.clone(),
        a.states.union(&b.states).cloned().collect(),
        leaf,
        trans,
        a.finals.union(&b.finals).cloned().collect(),
    )
}

/// The automaton for `{t ∈ T_Σ | yield(t) ∈ L(M)}`. States are pairs of
/// DFA states glued so that consecutive segments share their boundary; the
/// special leaf `e` contributes the identity pair since it yields `λ`.
pub fn yield_in_regular(alphabet: &RankedAlphabet, m: &Dfa) -> Result<NbuFta> {
    for s in alphabet.symbols_with_rank(0) {
        if s != "e" && !m.alphabet.contains(s) {
            return Err(Error::AlphabetMismatch(format!(
                "DFA alphabet is missing rank-0 symbol '{s}'"
            )));
        }
    }
    let pair = |p: &State, q: &State| format!("{{{p},{q}}}");
    let mut states = BTreeSet::new();
    let dfa_states: Vec<State> = m.states.iter().cloned().collect();
    for p in &dfa_states {
        for q in &dfa_states {
            states.insert(pair(p, q));
        }
    }
    let mut leaf: BTreeMap<String, BTreeSet<State>> = BTreeMap::new();
    for s in alphabet.symbols_with_rank(0) {
        let mut set = BTreeSet::new();
        for p in &dfa_states {
            if s == "e" {
                set.insert(pair(p, p));
            } else {
                set.insert(pair(p, &m.step(p, s)?));
            }
        }
        leaf.insert(s.to_string(), set);
    }
    let mut trans: BTreeMap<(String, Vec<State>), BTreeSet<State>> = BTreeMap::new();
    for (s, k) in alphabet.pairs() {
        if k == 0 {
            continue;
        }
        for tuple in tuples(&dfa_states, 2 * k) {
            // tuple = q1 q2 … q2k; glue q_{2i} = q_{2i+1}
            let glued = (1..k).all(|i| tuple[2 * i - 1] == tuple[2 * i]);
            if !glued {
                continue;
            }
            let key: Vec<State> = (0..k)
                .map(|i| pair(&tuple[2 * i], &tuple[2 * i + 1]))
                .collect();
            trans
                .entry((s.to_string(), key))
                .or_default()
                .insert(pair(&tuple[0], &tuple[2 * k - 1]));
        }
    }
    let mut finals = BTreeSet::new();
    for f in &m.finals {
        finals.insert(pair(&m.start, f));
    }
    Ok(NbuFta {
        alphabet: alphabet.clone(),
        states,
        leaf,
        trans,
        finals,
    })
}

/// An automaton recognizing exactly the given finite set of trees: one
/// state per distinct subtree.
pub fn finite_language_fta(alphabet: &RankedAlphabet, trees: &[Tree]) -> Result<NbuFta> {
    let mut names: BTreeMap<Tree, State> = BTreeMap::new();
    let mut all_subtrees: BTreeSet<Tree> = BTreeSet::new();
    for t in trees {
        if let Some(v) = t.check_ranked(alphabet, 0) {
            return Err(Error::ill_formed("finite_language_fta", v.to_string()));
        }
        all_subtrees.extend(t.subtrees());
    }
    for (i, st) in all_subtrees.iter().enumerate() {
        names.insert(st.clone(), format!("t{i}"));
    }
    let mut leaf: BTreeMap<String, BTreeSet<State>> = BTreeMap::new();
    let mut trans: BTreeMap<(String, Vec<State>), BTreeSet<State>> = BTreeMap::new();
    for st in &all_subtrees {
        let sym = st.symbol().expect("ground tree").to_string();
        let q = names[st].clone();
        if st.children.is_empty() {
            leaf.entry(sym).or_default().insert(q);
        } else {
            let key: Vec<State> = st.children.iter().map(|c| names[c].clone()).collect();
            trans.entry((sym, key)).or_default().insert(q);
        }
    }
    let states: BTreeSet<State> = if all_subtrees.is_empty() {
        BTreeSet::from(["dead".to_string()])
    } else {
        names.values().cloned().collect()
    };
    let finals: BTreeSet<State> = trees.iter().map(|t| names[t].clone()).collect();
    NbuFta::new(alphabet.clone(), states, leaf, trans, finals)
}
