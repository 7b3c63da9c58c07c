//! The four finite tree automaton models and the string DFA used by the
//! yield constructions: deterministic / nondeterministic, bottom-up /
//! top-down, with their run maps and acceptance tests.
//!
//! Partial nondeterministic transitions default to the empty set, so `run`
//! never fails on a nondeterministic automaton; a missing transition in a
//! deterministic automaton is an error (the automaton is ill-formed for the
//! input, use [`DbuFta::completed`] to add a sink).

mod decide;
mod ops;
#[cfg(test)]
mod tests;

pub use decide::{
    decide_empty, decide_finite, decide_inclusion, equivalent, pump, reachable_witnesses,
    PumpDecomposition,
};
pub use ops::{
    associate_bu_td, associate_td_bu, complement, determinize, finite_language_fta, intersection,
    union, yield_in_regular,
};

use std::collections::{BTreeMap, BTreeSet};

use crate::alphabet::RankedAlphabet;
use crate::error::{Error, Result};
use crate::tree::{Node, Tree};

pub type State = String;

/// Nondeterministic bottom-up finite tree automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NbuFta {
    pub alphabet: RankedAlphabet,
    pub states: BTreeSet<State>,
    /// `S_a` for each rank-0 symbol; missing entries mean the empty set.
    pub leaf: BTreeMap<String, BTreeSet<State>>,
    /// `δ_a^k(q1…qk)` keyed by (symbol, state sequence); k ≥ 1.
    pub trans: BTreeMap<(String, Vec<State>), BTreeSet<State>>,
    pub finals: BTreeSet<State>,
}

impl NbuFta {
    pub fn new(
        alphabet: RankedAlphabet,
        states: BTreeSet<State>,
        leaf: BTreeMap<String, BTreeSet<State>>,
        trans: BTreeMap<(String, Vec<State>), BTreeSet<State>>,
        finals: BTreeSet<State>,
    ) -> Result<NbuFta> {
        let a = NbuFta {
            alphabet,
            states,
            leaf,
            trans,
            finals,
        };
        a.validate()?;
        Ok(a)
    }

    fn validate(&self) -> Result<()> {
        for (a, qs) in &self.leaf {
            if !self.alphabet.has_rank(a, 0) {
                return Err(Error::ill_formed("fta", format!("leaf symbol '{a}' lacks rank 0")));
            }
            if let Some(q) = qs.iter().find(|q| !self.states.contains(*q)) {
                return Err(Error::ill_formed("fta", format!("undeclared state '{q}'")));
            }
        }
        for ((a, qs), rs) in &self.trans {
            let k = qs.len();
            if k == 0 || !self.alphabet.has_rank(a, k) {
                return Err(Error::ill_formed(
                    "fta",
                    format!("transition symbol '{a}' lacks rank {k}"),
                ));
            }
            if let Some(q) = qs.iter().chain(rs.iter()).find(|q| !self.states.contains(*q)) {
                return Err(Error::ill_formed("fta", format!("undeclared state '{q}'")));
            }
        }
        if let Some(q) = self.finals.iter().find(|q| !self.states.contains(*q)) {
            return Err(Error::ill_formed("fta", format!("undeclared final state '{q}'")));
        }
        Ok(())
    }

    /// The automaton recognizing all of `T_Σ`.
    pub fn universal(alphabet: &RankedAlphabet) -> NbuFta {
        let q: State = "u".to_string();
        let mut leaf = BTreeMap::new();
        let mut trans = BTreeMap::new();
        for (s, k) in alphabet.pairs() {
            if k == 0 {
                leaf.insert(s.to_string(), BTreeSet::from([q.clone()]));
            } else {
                trans.insert(
                    (s.to_string(), vec![q.clone(); k]),
                    BTreeSet::from([q.clone()]),
                );
            }
        }
        NbuFta {
            alphabet: alphabet.clone(),
            states: BTreeSet::from([q.clone()]),
            leaf,
            trans,
            finals: BTreeSet::from([q]),
        }
    }

    /// The automaton with the empty language over `Σ`.
    pub fn empty_language(alphabet: &RankedAlphabet) -> NbuFta {
        let mut a = NbuFta::universal(alphabet);
        a.finals.clear();
        a
    }

    /// `δ̂(t)`: the set of states reachable at the root.
    pub fn run(&self, t: &Tree) -> BTreeSet<State> {
        let Node::Sym(sym) = &t.node else {
            return BTreeSet::new();
        };
        if t.children.is_empty() {
            return self.leaf.get(sym).cloned().unwrap_or_default();
        }
        let child_sets: Vec<BTreeSet<State>> = t.children.iter().map(|c| self.run(c)).collect();
        let mut out = BTreeSet::new();
        let mut combo: Vec<&State> = Vec::with_capacity(child_sets.len());
        self.run_combine(sym, &child_sets, &mut combo, &mut out);
        out
    }

    fn run_combine<'a>(
        &self,
        sym: &str,
        child_sets: &'a [BTreeSet<State>],
        combo: &mut Vec<&'a State>,
        out: &mut BTreeSet<State>,
    ) {
        if combo.len() == child_sets.len() {
            let key = (sym.to_string(), combo.iter().map(|q| (*q).clone()).collect());
            if let Some(rs) = self.trans.get(&key) {
                out.extend(rs.iter().cloned());
            }
            return;
        }
        for q in &child_sets[combo.len()] {
            combo.push(q);
            self.run_combine(sym, child_sets, combo, out);
            combo.pop();
        }
    }

    pub fn accepts(&self, t: &Tree) -> bool {
        !self.run(t).is_disjoint(&self.finals)
    }

    /// Re-homes the automaton over a larger alphabet (no new transitions).
    pub fn embed_alphabet(&self, alphabet: &RankedAlphabet) -> Result<NbuFta> {
        if !self.alphabet.is_sub_alphabet_of(alphabet) {
            return Err(Error::AlphabetMismatch(format!(
                "'{}' is not contained in '{}'",
                self.alphabet.name(),
                alphabet.name()
            )));
        }
        let mut out = self.clone();
        out.alphabet = alphabet.clone();
        Ok(out)
    }

    /// Restriction to useful states (reachable and co-reachable). Keeps the
    /// language, shrinks the product blowup of chained constructions.
    pub fn trim(&self) -> NbuFta {
        let reachable = decide::reachable_states(self);
        let co = decide::coreachable_states(self, &reachable);
        let keep: BTreeSet<State> = reachable.intersection(&co).cloned().collect();
        let leaf = self
            .leaf
            .iter()
            .map(|(a, qs)| {
                (
                    a.clone(),
                    qs.iter().filter(|q| keep.contains(*q)).cloned().collect(),
                )
            })
            .filter(|(_, qs): &(String, BTreeSet<State>)| !qs.is_empty())
            .collect();
        let trans = self
            .trans
            .iter()
            .filter(|((_, qs), _)| qs.iter().all(|q| keep.contains(q)))
            .map(|((a, qs), rs)| {
                (
                    (a.clone(), qs.clone()),
                    rs.iter().filter(|q| keep.contains(*q)).cloned().collect(),
                )
            })
            .filter(|(_, rs): &((String, Vec<State>), BTreeSet<State>)| !rs.is_empty())
            .collect();
        NbuFta {
            alphabet: self.alphabet.clone(),
            states: if keep.is_empty() {
                BTreeSet::from(["dead".to_string()])
            } else {
                keep.clone()
            },
            leaf,
            trans,
            finals: self.finals.intersection(&keep).cloned().collect(),
        }
    }

    /// Renames every state with a prefix; used to make unions disjoint.
    pub fn rename_states(&self, prefix: &str) -> NbuFta {
        let ren = |q: &State| format!("{prefix}{q}");
        NbuFta {
            alphabet: self.alphabet.clone(),
            states: self.states.iter().map(&ren).collect(),
            leaf: self
                .leaf
                .iter()
                .map(|(a, qs)| (a.clone(), qs.iter().map(&ren).collect()))
                .collect(),
            trans: self
                .trans
                .iter()
                .map(|((a, qs), rs)| {
                    (
                        (a.clone(), qs.iter().map(&ren).collect()),
                        rs.iter().map(&ren).collect(),
                    )
                })
                .collect(),
            finals: self.finals.iter().map(&ren).collect(),
        }
    }
}

/// Deterministic bottom-up finite tree automaton. `trans` must be total
/// over `Q^k` for every (a, k) the alphabet declares; [`DbuFta::completed`]
/// enforces that by adding a sink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DbuFta {
    pub alphabet: RankedAlphabet,
    pub states: BTreeSet<State>,
    pub leaf: BTreeMap<String, State>,
    pub trans: BTreeMap<(String, Vec<State>), State>,
    pub finals: BTreeSet<State>,
}

/// A run of a deterministic bottom-up automaton, state per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateTree {
    pub state: State,
    pub children: Vec<StateTree>,
}

impl DbuFta {
    pub fn new(
        alphabet: RankedAlphabet,
        states: BTreeSet<State>,
        leaf: BTreeMap<String, State>,
        trans: BTreeMap<(String, Vec<State>), State>,
        finals: BTreeSet<State>,
    ) -> Result<DbuFta> {
        let a = DbuFta {
            alphabet,
            states,
            leaf,
            trans,
            finals,
        };
        a.to_nondet().validate()?;
        Ok(a)
    }

    /// `δ̂(t)`; errors when a needed transition is missing.
    pub fn run(&self, t: &Tree) -> Result<State> {
        Ok(self.run_annotated(t)?.state)
    }

    /// The full run, one state per node of `t`.
    pub fn run_annotated(&self, t: &Tree) -> Result<StateTree> {
        let Node::Sym(sym) = &t.node else {
            return Err(Error::ill_formed("run", "input tree contains a variable"));
        };
        if t.children.is_empty() {
            let q = self.leaf.get(sym).ok_or_else(|| Error::MissingTransition {
                symbol: sym.clone(),
                states: vec![],
            })?;
            return Ok(StateTree {
                state: q.clone(),
                children: vec![],
            });
        }
        let children: Vec<StateTree> = t
            .children
            .iter()
            .map(|c| self.run_annotated(c))
            .collect::<Result<_>>()?;
        let key: Vec<State> = children.iter().map(|c| c.state.clone()).collect();
        let q = self
            .trans
            .get(&(sym.clone(), key.clone()))
            .ok_or_else(|| Error::MissingTransition {
                symbol: sym.clone(),
                states: key,
            })?;
        Ok(StateTree {
            state: q.clone(),
            children,
        })
    }

    pub fn accepts(&self, t: &Tree) -> Result<bool> {
        Ok(self.finals.contains(&self.run(t)?))
    }

    /// Fills every missing transition with a fresh sink state.
    pub fn completed(&self) -> DbuFta {
        let mut out = self.clone();
        let sink: State = {
            let mut s = "sink".to_string();
            while out.states.contains(&s) {
                s.push('_');
            }
            s
        };
        let mut used_sink = false;
        for (a, k) in self.alphabet.pairs() {
            if k == 0 && !out.leaf.contains_key(a) {
                out.leaf.insert(a.to_string(), sink.clone());
                used_sink = true;
            }
        }
        // iterate until closed: adding the sink introduces new tuples
        loop {
            let states: Vec<State> = out
                .states
                .iter()
                .cloned()
                .chain(used_sink.then(|| sink.clone()))
                .collect();
            let mut added = false;
            for (a, k) in self.alphabet.pairs() {
                if k == 0 {
                    continue;
                }
                for tuple in crate::enumerate::tuples(&states, k) {
                    let key = (a.to_string(), tuple);
                    if let std::collections::btree_map::Entry::Vacant(slot) =
                        out.trans.entry(key)
                    {
                        slot.insert(sink.clone());
                        used_sink = true;
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        if used_sink {
            out.states.insert(sink);
        }
        out
    }

    /// Views the automaton as a nondeterministic one.
    pub fn to_nondet(&self) -> NbuFta {
        NbuFta {
            alphabet: self.alphabet.clone(),
            states: self.states.clone(),
            leaf: self
                .leaf
                .iter()
                .map(|(a, q)| (a.clone(), BTreeSet::from([q.clone()])))
                .collect(),
            trans: self
                .trans
                .iter()
                .map(|((a, qs), r)| ((a.clone(), qs.clone()), BTreeSet::from([r.clone()])))
                .collect(),
            finals: self.finals.clone(),
        }
    }
}

/// Deterministic top-down finite tree automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DtdFta {
    pub alphabet: RankedAlphabet,
    pub states: BTreeSet<State>,
    pub init: State,
    /// `δ_a^k(q)` keyed by (symbol, rank, state); k ≥ 1.
    pub trans: BTreeMap<(String, usize, State), Vec<State>>,
    /// `F_a` per rank-0 symbol.
    pub leaf_final: BTreeMap<String, BTreeSet<State>>,
}

impl DtdFta {
    /// `δ̃(t)`: the states from which the automaton accepts `t`.
    pub fn run(&self, t: &Tree) -> Result<BTreeSet<State>> {
        let Node::Sym(sym) = &t.node else {
            return Err(Error::ill_formed("run", "input tree contains a variable"));
        };
        let k = t.children.len();
        if k == 0 {
            return Ok(self.leaf_final.get(sym).cloned().unwrap_or_default());
        }
        let child_sets: Vec<BTreeSet<State>> = t
            .children
            .iter()
            .map(|c| self.run(c))
            .collect::<Result<_>>()?;
        let mut out = BTreeSet::new();
        for q in &self.states {
            let Some(succ) = self.trans.get(&(sym.clone(), k, q.clone())) else {
                return Err(Error::MissingTransition {
                    symbol: sym.clone(),
                    states: vec![q.clone()],
                });
            };
            if succ
                .iter()
                .zip(&child_sets)
                .all(|(qi, set)| set.contains(qi))
            {
                out.insert(q.clone());
            }
        }
        Ok(out)
    }

    pub fn accepts(&self, t: &Tree) -> Result<bool> {
        Ok(self.run(t)?.contains(&self.init))
    }
}

/// Nondeterministic top-down finite tree automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NtdFta {
    pub alphabet: RankedAlphabet,
    pub states: BTreeSet<State>,
    pub init: BTreeSet<State>,
    pub trans: BTreeMap<(String, usize, State), BTreeSet<Vec<State>>>,
    pub leaf_final: BTreeMap<String, BTreeSet<State>>,
}

impl NtdFta {
    /// `δ̃(t)`.
    pub fn run(&self, t: &Tree) -> BTreeSet<State> {
        let Node::Sym(sym) = &t.node else {
            return BTreeSet::new();
        };
        let k = t.children.len();
        if k == 0 {
            return self.leaf_final.get(sym).cloned().unwrap_or_default();
        }
        let child_sets: Vec<BTreeSet<State>> =
            t.children.iter().map(|c| self.run(c)).collect();
        let mut out = BTreeSet::new();
        for q in &self.states {
            if let Some(succs) = self.trans.get(&(sym.clone(), k, q.clone())) {
                if succs.iter().any(|succ| {
                    succ.iter()
                        .zip(&child_sets)
                        .all(|(qi, set)| set.contains(qi))
                }) {
                    out.insert(q.clone());
                }
            }
        }
        out
    }

    pub fn accepts(&self, t: &Tree) -> bool {
        !self.run(t).is_disjoint(&self.init)
    }
}

/// Deterministic finite automaton on strings, total over its alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    pub alphabet: BTreeSet<String>,
    pub states: BTreeSet<State>,
    pub start: State,
    pub finals: BTreeSet<State>,
    pub trans: BTreeMap<(State, String), State>,
}

impl Dfa {
    pub fn new(
        alphabet: BTreeSet<String>,
        states: BTreeSet<State>,
        start: State,
        finals: BTreeSet<State>,
        trans: BTreeMap<(State, String), State>,
    ) -> Result<Dfa> {
        for q in &states {
            for a in &alphabet {
                if !trans.contains_key(&(q.clone(), a.clone())) {
                    return Err(Error::MissingTransition {
                        symbol: a.clone(),
                        states: vec![q.clone()],
                    });
                }
            }
        }
        if !states.contains(&start) {
            return Err(Error::ill_formed("dfa", "undeclared start state"));
        }
        Ok(Dfa {
            alphabet,
            states,
            start,
            finals,
            trans,
        })
    }

    pub fn step(&self, q: &State, a: &str) -> Result<State> {
        self.trans
            .get(&(q.clone(), a.to_string()))
            .cloned()
            .ok_or_else(|| Error::MissingTransition {
                symbol: a.to_string(),
                states: vec![q.clone()],
            })
    }

    pub fn accepts(&self, word: &[String]) -> Result<bool> {
        let mut q = self.start.clone();
        for a in word {
            q = self.step(&q, a)?;
        }
        Ok(self.finals.contains(&q))
    }

    /// DFA for a single fixed word.
    pub fn single_word(alphabet: &BTreeSet<String>, word: &[String]) -> Dfa {
        let n = word.len();
        let states: BTreeSet<State> = (0..=n + 1).map(|i| format!("p{i}")).collect();
        let dead: State = format!("p{}", n + 1);
        let mut trans = BTreeMap::new();
        for (i, expected) in word.iter().map(Some).chain([None, None]).enumerate() {
            for a in alphabet {
                let next = if expected == Some(a) {
                    format!("p{}", i + 1)
                } else {
                    dead.clone()
                };
                trans.insert((format!("p{i}"), a.clone()), next);
            }
        }
        Dfa {
            alphabet: alphabet.clone(),
            states,
            start: "p0".to_string(),
            finals: BTreeSet::from([format!("p{n}")]),
            trans,
        }
    }

    /// DFA for the empty-word language `{λ}`.
    pub fn lambda_only(alphabet: &BTreeSet<String>) -> Dfa {
        Dfa::single_word(alphabet, &[])
    }

    /// DFA accepting every string over the alphabet.
    pub fn all_words(alphabet: &BTreeSet<String>) -> Dfa {
        let q: State = "p0".to_string();
        let trans = alphabet
            .iter()
            .map(|a| ((q.clone(), a.clone()), q.clone()))
            .collect();
        Dfa {
            alphabet: alphabet.clone(),
            states: BTreeSet::from([q.clone()]),
            start: q.clone(),
            finals: BTreeSet::from([q]),
            trans,
        }
    }
}
