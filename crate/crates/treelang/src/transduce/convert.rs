//! Linearity conversions between bottom-up and top-down transducers: the
//! nondeleting association (both directions), the identity-state
//! construction that moves linear top-down machines to bottom-up, and the
//! look-ahead installation that moves linear bottom-up machines back.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::grammar::FreshNames;
use crate::tree::Tree;

use super::{
    chain::domain_of_bu, classify, classify_td, BuFtt, BuRule, OutTree, TdFtt, TdRule,
    TdrFtt,
};

/// Association of a nondeleting linear bottom-up transducer with the
/// top-down one realizing the same transformation: the rule
/// `a(q1…qk) → q[t]` corresponds to `q[a(x…)] → t⟨xi ← qi(xi)⟩`.
pub fn nlb_to_nlt(m: &BuFtt) -> Result<TdFtt> {
    let flags = classify(m);
    if !(flags.linear && flags.nondeleting) {
        return Err(Error::FlagViolation(
            "the association needs a nondeleting linear transducer".into(),
        ));
    }
    let rules = m
        .rules
        .iter()
        .map(|r| TdRule {
            state: r.state.clone(),
            sym: r.sym.clone(),
            rank: r.child_states.len(),
            rhs: OutTree::from_var_tree(&r.rhs, &r.child_states),
            look: BTreeMap::new(),
        })
        .collect();
    TdFtt::new(
        m.input.clone(),
        m.output.clone(),
        m.states.clone(),
        rules,
        m.finals.clone(),
    )
}

/// Inverse direction of the association.
pub fn nlt_to_nlb(m: &TdFtt) -> Result<BuFtt> {
    let flags = classify_td(&m.to_lookahead())?;
    if !(flags.linear && flags.nondeleting) {
        return Err(Error::FlagViolation(
            "the association needs a nondeleting linear transducer".into(),
        ));
    }
    let rules = m
        .rules
        .iter()
        .map(|r| {
            let child_states = call_states(&r.rhs, r.rank)
                .expect("nondeleting linear patterns call every variable once");
            BuRule {
                sym: r.sym.clone(),
                child_states,
                state: r.state.clone(),
                rhs: super::embed::out_to_var_tree(&r.rhs),
            }
        })
        .collect();
    BuFtt::new(
        m.input.clone(),
        m.output.clone(),
        m.states.clone(),
        rules,
        m.initials.clone(),
    )
}

/// For a linear pattern: the state calling each variable, provided every
/// variable is called exactly once.
fn call_states(pat: &OutTree, rank: usize) -> Option<Vec<String>> {
    let calls = pat.calls();
    let mut per_var: Vec<Option<String>> = vec![None; rank];
    for (q, i) in calls {
        if per_var[i - 1].is_some() {
            return None;
        }
        per_var[i - 1] = Some(q);
    }
    per_var.into_iter().collect()
}

/// Moves a linear top-down transducer to a bottom-up one. Deleted
/// subtrees must still be processed bottom-up, so an identity state `d`
/// consumes them; the output alphabet grows by the input symbols.
pub fn lt_to_lb(m: &TdFtt) -> Result<BuFtt> {
    let flags = classify_td(&m.to_lookahead())?;
    if !flags.linear {
        return Err(Error::FlagViolation(
            "the identity-state construction needs a linear transducer".into(),
        ));
    }
    let output = m.output.union(&m.input);
    let mut names = FreshNames::new(
        m.states
            .iter()
            .cloned()
            .chain(m.input.symbols().map(String::from))
            .chain(output.symbols().map(String::from)),
    );
    let d = names.prefer("d");
    let mut states = m.states.clone();
    states.insert(d.clone());
    let mut rules = Vec::new();
    // the identity state reproduces any input subtree
    for (sym, k) in m.input.pairs() {
        rules.push(BuRule {
            sym: sym.to_string(),
            child_states: vec![d.clone(); k],
            state: d.clone(),
            rhs: Tree::node_or_leaf(sym, (1..=k).map(Tree::var).collect()),
        });
    }
    for r in &m.rules {
        let mut child_states: Vec<String> = vec![d.clone(); r.rank];
        for (q, i) in r.rhs.calls() {
            child_states[i - 1] = q;
        }
        rules.push(BuRule {
            sym: r.sym.clone(),
            child_states,
            state: r.state.clone(),
            rhs: super::embed::out_to_var_tree(&r.rhs),
        });
    }
    BuFtt::new(
        m.input.clone(),
        output,
        states,
        rules,
        m.initials.clone(),
    )
}

/// Moves a linear bottom-up transducer to a top-down one with regular
/// look-ahead: deleted variables get the domain of the transducer started
/// in their child state as the guard.
pub fn lb_to_ltr(m: &BuFtt) -> Result<TdrFtt> {
    let flags = classify(m);
    if !flags.linear {
        return Err(Error::FlagViolation(
            "the look-ahead construction needs a linear transducer".into(),
        ));
    }
    let mut dom_cache: BTreeMap<String, crate::fta::NbuFta> = BTreeMap::new();
    let mut rules = Vec::new();
    for r in &m.rules {
        let k = r.child_states.len();
        let mut look = BTreeMap::new();
        for (i, q) in r.child_states.iter().enumerate() {
            if r.rhs.var_count(i + 1) == 0 {
                let dom = dom_cache
                    .entry(q.clone())
                    .or_insert_with(|| domain_of_bu(&m.with_final(q)).trim())
                    .clone();
                look.insert(i + 1, dom);
            }
        }
        rules.push(TdRule {
            state: r.state.clone(),
            sym: r.sym.clone(),
            rank: k,
            rhs: OutTree::from_var_tree(&r.rhs, &r.child_states),
            look,
        });
    }
    TdrFtt::new(
        m.input.clone(),
        m.output.clone(),
        m.states.clone(),
        rules,
        m.finals.clone(),
    )
}

/// Removes the look-ahead of a linear transducer by rebuilding it as a
/// bottom-up machine: take the look-ahead out as a relabeling, move the
/// remaining top-down machine over, and fold the relabeling in.
pub fn ltr_to_lb(m: &TdrFtt) -> Result<BuFtt> {
    let flags = classify_td(m)?;
    if !flags.linear {
        return Err(Error::FlagViolation(
            "only linear look-ahead transducers move to bottom-up machines".into(),
        ));
    }
    if let Some(plain) = m.without_lookahead() {
        return lt_to_lb(&plain);
    }
    let (relabeler, td) = super::decompose_tdr_remove_lookahead(m)?;
    let lb = lt_to_lb(&td)?;
    super::compose_bu(&relabeler, &lb)
}
