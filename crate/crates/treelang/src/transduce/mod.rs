//! Finite-state tree transducers: bottom-up, top-down, and top-down with
//! regular look-ahead, with their application semantics, subclass
//! classification, embeddings of the simple transformations, linearity
//! conversions, decomposition schemes and composition constructions.
//!
//! Application uses the recursive characterizations (memoized per state
//! and subtree) rather than searching the rewriting relation; the
//! exhaustive rewriting search survives as a test oracle that the suites
//! compare against.

mod chain;
mod classify;
mod compose;
mod convert;
mod decompose;
mod embed;
#[cfg(test)]
mod tests;

pub use chain::{
    chain_domain, domain_of_bu, domain_of_td, domain_of_tdr, inverse_image, normalize_chain,
    ChainTarget, Stage,
};
pub use classify::{classify, classify_td, SubclassFlags};
pub use compose::{compose_bu, compose_bu_with_fta, compose_bu_with_hom, compose_tdr};
pub use convert::{lb_to_ltr, lt_to_lb, ltr_to_lb, nlb_to_nlt, nlt_to_nlb};
pub use decompose::{
    decompose_bu_qrel_hom, decompose_ldt_qrel_lhom, decompose_qrel_rel_fta_proj,
    decompose_td_copy_hom_lt, decompose_tdr_remove_lookahead,
};
pub use embed::{
    embed_fta_bu, embed_fta_td, embed_hom_bu, embed_hom_td, embed_relabeling_bu,
    embed_relabeling_td, extract_hom_bu, extract_hom_td,
};

use std::collections::{BTreeMap, BTreeSet};

use crate::alphabet::RankedAlphabet;
use crate::error::{Error, Result};
use crate::fta::{decide_empty, NbuFta, State};
use crate::tree::{Node, Tree};

/// Default bound on the size of computed output sets; copying rules can
/// explode exponentially.
pub const DEFAULT_OUTPUT_CAP: usize = 10_000;

/// One bottom-up rule `a(q1…qk) → q[rhs]`; leaf rules have `k = 0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BuRule {
    pub sym: String,
    pub child_states: Vec<State>,
    pub state: State,
    /// Output pattern over the output alphabet with variables `x1..xk`.
    pub rhs: Tree,
}

/// Bottom-up finite tree transducer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuFtt {
    pub input: RankedAlphabet,
    pub output: RankedAlphabet,
    pub states: BTreeSet<State>,
    pub rules: Vec<BuRule>,
    pub finals: BTreeSet<State>,
}

/// Right side of a top-down rule: output symbols above state calls
/// `q(xi)` on input subtrees.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum OutTree {
    Out(String, Vec<OutTree>),
    Call(State, usize),
}

impl OutTree {
    pub fn leaf(sym: impl Into<String>) -> OutTree {
        OutTree::Out(sym.into(), Vec::new())
    }

    /// Variable indices called anywhere in the pattern.
    pub fn called_vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.walk_calls(&mut |_, i| {
            out.insert(i);
        });
        out
    }

    /// Calls in document order (preorder, left to right).
    pub fn calls(&self) -> Vec<(State, usize)> {
        let mut out = Vec::new();
        self.walk_calls(&mut |q, i| out.push((q.to_string(), i)));
        out
    }

    fn walk_calls(&self, f: &mut dyn FnMut(&str, usize)) {
        match self {
            OutTree::Call(q, i) => f(q, *i),
            OutTree::Out(_, cs) => {
                for c in cs {
                    c.walk_calls(f);
                }
            }
        }
    }

    pub fn count_var(&self, i: usize) -> usize {
        match self {
            OutTree::Call(_, j) => usize::from(*j == i),
            OutTree::Out(_, cs) => cs.iter().map(|c| c.count_var(i)).sum(),
        }
    }

    /// A call-free pattern is a ground output tree.
    pub fn as_ground(&self) -> Option<Tree> {
        match self {
            OutTree::Call(..) => None,
            OutTree::Out(s, cs) => {
                let children = cs
                    .iter()
                    .map(OutTree::as_ground)
                    .collect::<Option<Vec<_>>>()?;
                Some(Tree::node_or_leaf(s.clone(), children))
            }
        }
    }

    /// Lifts a ground tree into a pattern.
    pub fn from_ground(t: &Tree) -> OutTree {
        match &t.node {
            Node::Var(_) => unreachable!("ground tree"),
            Node::Sym(s) => OutTree::Out(
                s.clone(),
                t.children.iter().map(OutTree::from_ground).collect(),
            ),
        }
    }

    /// Builds a pattern from a variable tree by rewriting each variable
    /// `xi` into the call `states[i-1](xi)`.
    pub fn from_var_tree(t: &Tree, states: &[State]) -> OutTree {
        match &t.node {
            Node::Var(i) => OutTree::Call(states[*i - 1].clone(), *i),
            Node::Sym(s) => OutTree::Out(
                s.clone(),
                t.children
                    .iter()
                    .map(|c| OutTree::from_var_tree(c, states))
                    .collect(),
            ),
        }
    }

    fn check(&self, output: &RankedAlphabet, states: &BTreeSet<State>, arity: usize) -> Result<()> {
        match self {
            OutTree::Call(q, i) => {
                if !states.contains(q) {
                    return Err(Error::ill_formed("tdftt", format!("undeclared state '{q}'")));
                }
                if *i == 0 || *i > arity {
                    return Err(Error::ill_formed(
                        "tdftt",
                        format!("call on x{i} exceeds arity {arity}"),
                    ));
                }
                Ok(())
            }
            OutTree::Out(s, cs) => {
                if !output.has_rank(s, cs.len()) {
                    return Err(Error::ill_formed(
                        "tdftt",
                        format!("output symbol '{s}' lacks rank {}", cs.len()),
                    ));
                }
                cs.iter().try_for_each(|c| c.check(output, states, arity))
            }
        }
    }
}

impl std::fmt::Display for OutTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OutTree::Call(q, i) => write!(f, "{q}(x{i})"),
            OutTree::Out(s, cs) => {
                write!(f, "{s}")?;
                if !cs.is_empty() {
                    write!(f, "[")?;
                    for (i, c) in cs.iter().enumerate() {
                        if i > 0 {
                            write!(f, " ")?;
                        }
                        write!(f, "{c}")?;
                    }
                    write!(f, "]")?;
                }
                Ok(())
            }
        }
    }
}

/// One top-down rule `q[a(x1…xk)] → rhs`, optionally guarded by per-child
/// look-ahead languages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TdRule {
    pub state: State,
    pub sym: String,
    pub rank: usize,
    pub rhs: OutTree,
    /// Look-ahead: child `xi` must belong to the automaton's language.
    /// Missing entries mean no constraint.
    pub look: BTreeMap<usize, NbuFta>,
}

/// Top-down finite tree transducer (no look-ahead).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TdFtt {
    pub input: RankedAlphabet,
    pub output: RankedAlphabet,
    pub states: BTreeSet<State>,
    pub rules: Vec<TdRule>,
    pub initials: BTreeSet<State>,
}

/// Top-down finite tree transducer with regular look-ahead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TdrFtt {
    pub input: RankedAlphabet,
    pub output: RankedAlphabet,
    pub states: BTreeSet<State>,
    pub rules: Vec<TdRule>,
    pub initials: BTreeSet<State>,
}

/// The result of applying a transducer to one input tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Applied {
    /// Per state, the outputs derivable at that state.
    pub by_state: BTreeMap<State, BTreeSet<Tree>>,
    /// Outputs at final (bottom-up) or initial (top-down) states.
    pub image: BTreeSet<Tree>,
}

fn states_disjoint_from(
    states: &BTreeSet<State>,
    alphabets: &[&RankedAlphabet],
    kind: &str,
) -> Result<()> {
    for q in states {
        if alphabets.iter().any(|a| a.contains(q)) {
            return Err(Error::ill_formed(
                kind,
                format!("state '{q}' collides with an alphabet symbol"),
            ));
        }
    }
    Ok(())
}

impl BuFtt {
    pub fn new(
        input: RankedAlphabet,
        output: RankedAlphabet,
        states: BTreeSet<State>,
        rules: Vec<BuRule>,
        finals: BTreeSet<State>,
    ) -> Result<BuFtt> {
        let mut m = BuFtt {
            input,
            output,
            states,
            rules,
            finals,
        };
        let mut seen = BTreeSet::new();
        m.rules.retain(|r| seen.insert(r.clone()));
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        states_disjoint_from(&self.states, &[&self.input, &self.output], "buftt")?;
        for r in &self.rules {
            let k = r.child_states.len();
            if !self.input.has_rank(&r.sym, k) {
                return Err(Error::ill_formed(
                    "buftt",
                    format!("input symbol '{}' lacks rank {k}", r.sym),
                ));
            }
            for q in r.child_states.iter().chain([&r.state]) {
                if !self.states.contains(q) {
                    return Err(Error::ill_formed("buftt", format!("undeclared state '{q}'")));
                }
            }
            if let Some(v) = r.rhs.check_ranked(&self.output, k) {
                return Err(Error::ill_formed("buftt", format!("rule output: {v}")));
            }
        }
        for q in &self.finals {
            if !self.states.contains(q) {
                return Err(Error::ill_formed("buftt", format!("undeclared final '{q}'")));
            }
        }
        Ok(())
    }

    pub fn rules_for(&self, sym: &str, child_states: &[State]) -> Vec<&BuRule> {
        self.rules
            .iter()
            .filter(|r| r.sym == sym && r.child_states == child_states)
            .collect()
    }

    /// The same transducer with a single final state.
    pub fn with_final(&self, q: &State) -> BuFtt {
        BuFtt {
            finals: BTreeSet::from([q.clone()]),
            ..self.clone()
        }
    }

    pub fn apply(&self, t: &Tree) -> Result<Applied> {
        self.apply_with_cap(t, DEFAULT_OUTPUT_CAP)
    }

    /// All pairs `(q, u)` with `t ⇒* q[u]`, by structural recursion: the
    /// children's result sets are combined through each applicable rule,
    /// with the same output substituted at all copies of a variable.
    pub fn apply_with_cap(&self, t: &Tree, cap: usize) -> Result<Applied> {
        let by_state = self.apply_rec(t, cap)?;
        let mut image = BTreeSet::new();
        for q in &self.finals {
            if let Some(us) = by_state.get(q) {
                image.extend(us.iter().cloned());
            }
        }
        Ok(Applied { by_state, image })
    }

    fn apply_rec(&self, t: &Tree, cap: usize) -> Result<BTreeMap<State, BTreeSet<Tree>>> {
        let Node::Sym(sym) = &t.node else {
            return Err(Error::ill_formed("apply", "input tree contains a variable"));
        };
        let children: Vec<BTreeMap<State, BTreeSet<Tree>>> = t
            .children
            .iter()
            .map(|c| self.apply_rec(c, cap))
            .collect::<Result<_>>()?;
        let mut out: BTreeMap<State, BTreeSet<Tree>> = BTreeMap::new();
        let mut total = 0usize;
        for rule in &self.rules {
            if rule.sym != *sym || rule.child_states.len() != t.children.len() {
                continue;
            }
            let pools: Option<Vec<&BTreeSet<Tree>>> = rule
                .child_states
                .iter()
                .zip(&children)
                .map(|(q, m)| m.get(q))
                .collect();
            let Some(pools) = pools else { continue };
            if pools.iter().any(|p| p.is_empty()) {
                continue;
            }
            let mut choice: Vec<&Tree> = Vec::with_capacity(pools.len());
            combine(&pools, &mut choice, &mut |us| {
                let images: Vec<Tree> = us.iter().map(|u| (*u).clone()).collect();
                let produced = rule.rhs.subst_vars(&images);
                if out.entry(rule.state.clone()).or_default().insert(produced) {
                    total += 1;
                }
            });
            if total > cap {
                return Err(Error::CapExceeded { cap });
            }
        }
        Ok(out)
    }
}

fn combine<'a>(
    pools: &[&'a BTreeSet<Tree>],
    choice: &mut Vec<&'a Tree>,
    emit: &mut dyn FnMut(&[&'a Tree]),
) {
    if choice.len() == pools.len() {
        emit(choice);
        return;
    }
    for t in pools[choice.len()] {
        choice.push(t);
        combine(pools, choice, emit);
        choice.pop();
    }
}

impl TdFtt {
    pub fn new(
        input: RankedAlphabet,
        output: RankedAlphabet,
        states: BTreeSet<State>,
        rules: Vec<TdRule>,
        initials: BTreeSet<State>,
    ) -> Result<TdFtt> {
        for r in &rules {
            if !r.look.is_empty() {
                return Err(Error::ill_formed(
                    "tdftt",
                    "look-ahead clauses need a look-ahead transducer",
                ));
            }
        }
        let m = TdrFtt::new(input, output, states, rules, initials)?;
        Ok(TdFtt {
            input: m.input,
            output: m.output,
            states: m.states,
            rules: m.rules,
            initials: m.initials,
        })
    }

    /// Views the transducer as one with (vacuous) look-ahead.
    pub fn to_lookahead(&self) -> TdrFtt {
        TdrFtt {
            input: self.input.clone(),
            output: self.output.clone(),
            states: self.states.clone(),
            rules: self.rules.clone(),
            initials: self.initials.clone(),
        }
    }

    pub fn apply(&self, t: &Tree) -> Result<Applied> {
        self.to_lookahead().apply(t)
    }

    pub fn apply_with_cap(&self, t: &Tree, cap: usize) -> Result<Applied> {
        self.to_lookahead().apply_with_cap(t, cap)
    }
}

impl TdrFtt {
    pub fn new(
        input: RankedAlphabet,
        output: RankedAlphabet,
        states: BTreeSet<State>,
        rules: Vec<TdRule>,
        initials: BTreeSet<State>,
    ) -> Result<TdrFtt> {
        let m = TdrFtt {
            input,
            output,
            states,
            rules,
            initials,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        states_disjoint_from(&self.states, &[&self.input, &self.output], "tdftt")?;
        for r in &self.rules {
            if !self.input.has_rank(&r.sym, r.rank) {
                return Err(Error::ill_formed(
                    "tdftt",
                    format!("input symbol '{}' lacks rank {}", r.sym, r.rank),
                ));
            }
            if !self.states.contains(&r.state) {
                return Err(Error::ill_formed(
                    "tdftt",
                    format!("undeclared state '{}'", r.state),
                ));
            }
            r.rhs.check(&self.output, &self.states, r.rank)?;
            for (i, a) in &r.look {
                if *i == 0 || *i > r.rank {
                    return Err(Error::ill_formed(
                        "tdftt",
                        format!("look-ahead on x{i} exceeds arity {}", r.rank),
                    ));
                }
                if !a.alphabet.same_ranks(&self.input) {
                    return Err(Error::AlphabetMismatch(
                        "look-ahead automaton must read the input alphabet".into(),
                    ));
                }
            }
        }
        for q in &self.initials {
            if !self.states.contains(q) {
                return Err(Error::ill_formed("tdftt", format!("undeclared initial '{q}'")));
            }
        }
        Ok(())
    }

    /// Drops vacuous look-ahead; `None` when a rule genuinely needs it.
    pub fn without_lookahead(&self) -> Option<TdFtt> {
        if self.rules.iter().any(|r| !r.look.is_empty()) {
            return None;
        }
        Some(TdFtt {
            input: self.input.clone(),
            output: self.output.clone(),
            states: self.states.clone(),
            rules: self.rules.clone(),
            initials: self.initials.clone(),
        })
    }

    pub fn rules_for(&self, state: &State, sym: &str, rank: usize) -> Vec<&TdRule> {
        self.rules
            .iter()
            .filter(|r| r.state == *state && r.sym == sym && r.rank == rank)
            .collect()
    }

    /// The same transducer started in a single state.
    pub fn with_initial(&self, q: &State) -> TdrFtt {
        TdrFtt {
            initials: BTreeSet::from([q.clone()]),
            ..self.clone()
        }
    }

    pub fn apply(&self, t: &Tree) -> Result<Applied> {
        self.apply_with_cap(t, DEFAULT_OUTPUT_CAP)
    }

    /// Per-state output sets, memoized per (state, subtree); distinct call
    /// occurrences of the same subtree expand independently. Look-ahead
    /// guards are checked against the actual children before a rule fires.
    pub fn apply_with_cap(&self, t: &Tree, cap: usize) -> Result<Applied> {
        let mut memo: BTreeMap<(State, Vec<usize>), BTreeSet<Tree>> = BTreeMap::new();
        let mut by_state = BTreeMap::new();
        for q in self.states.iter() {
            let set = self.expand_state(q, t, &mut Vec::new(), &mut memo, cap)?;
            by_state.insert(q.clone(), set);
        }
        let mut image = BTreeSet::new();
        for q in &self.initials {
            image.extend(by_state[q].iter().cloned());
        }
        Ok(Applied { by_state, image })
    }

    fn expand_state(
        &self,
        q: &State,
        t: &Tree,
        path: &mut Vec<usize>,
        memo: &mut BTreeMap<(State, Vec<usize>), BTreeSet<Tree>>,
        cap: usize,
    ) -> Result<BTreeSet<Tree>> {
        let key = (q.clone(), path.clone());
        if let Some(s) = memo.get(&key) {
            return Ok(s.clone());
        }
        let Node::Sym(sym) = &t.node else {
            return Err(Error::ill_formed("apply", "input tree contains a variable"));
        };
        let mut out = BTreeSet::new();
        for rule in self.rules_for(q, sym, t.children.len()) {
            let guard_ok = rule
                .look
                .iter()
                .all(|(i, a)| a.accepts(&t.children[*i - 1]));
            if !guard_ok {
                continue;
            }
            let expanded = self.expand_pattern(&rule.rhs, t, path, memo, cap)?;
            out.extend(expanded);
            if out.len() > cap {
                return Err(Error::CapExceeded { cap });
            }
        }
        memo.insert(key, out.clone());
        Ok(out)
    }

    fn expand_pattern(
        &self,
        pat: &OutTree,
        t: &Tree,
        path: &mut Vec<usize>,
        memo: &mut BTreeMap<(State, Vec<usize>), BTreeSet<Tree>>,
        cap: usize,
    ) -> Result<BTreeSet<Tree>> {
        match pat {
            OutTree::Call(q, i) => {
                path.push(*i - 1);
                let r = self.expand_state(q, &t.children[*i - 1], path, memo, cap);
                path.pop();
                r
            }
            OutTree::Out(sym, cs) => {
                let child_sets: Vec<BTreeSet<Tree>> = cs
                    .iter()
                    .map(|c| self.expand_pattern(c, t, path, memo, cap))
                    .collect::<Result<_>>()?;
                let mut out = BTreeSet::new();
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
                    if next.len() > cap {
                        return Err(Error::CapExceeded { cap });
                    }
                    partial = next;
                }
                for children in partial {
                    out.insert(Tree::node_or_leaf(sym.clone(), children));
                }
                Ok(out)
            }
        }
    }

    /// The look-ahead languages referenced anywhere, deduplicated by
    /// automaton value, in first-use order.
    pub fn lookahead_languages(&self) -> Vec<NbuFta> {
        let mut out: Vec<NbuFta> = Vec::new();
        for r in &self.rules {
            for a in r.look.values() {
                if !out.contains(a) {
                    out.push(a.clone());
                }
            }
        }
        out
    }
}

/// Pairwise-disjointness check of two look-ahead guards on the same
/// variable, used by the determinism test for look-ahead transducers.
pub(crate) fn guards_disjoint(
    input: &RankedAlphabet,
    r1: &TdRule,
    r2: &TdRule,
) -> Result<bool> {
    for i in 1..=r1.rank {
        let a1 = r1.look.get(&i);
        let a2 = r2.look.get(&i);
        let (Some(a1), Some(a2)) = (a1, a2) else {
            continue; // a missing guard means all trees: never disjoint
        };
        let both = crate::fta::intersection(&a1.embed_alphabet(input)?, &a2.embed_alphabet(input)?)?;
        if decide_empty(&both).0 {
            return Ok(true);
        }
    }
    Ok(false)
}
