//! Subclass classification of transducers by rule-shape inspection;
//! look-ahead determinism additionally needs emptiness tests on guard
//! intersections.

use crate::enumerate::tuples;
use crate::error::Result;
use crate::tree::{Node, Tree};

use super::{guards_disjoint, BuFtt, OutTree, TdrFtt};

/// Shape flags of a transducer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SubclassFlags {
    pub linear: bool,
    pub nondeleting: bool,
    pub pure: bool,
    pub deterministic: bool,
    pub total_deterministic: bool,
    /// Finite state relabeling shape: every rule relabels one node and
    /// keeps the child order.
    pub qrel: bool,
}

/// Flags of a bottom-up transducer.
pub fn classify(m: &BuFtt) -> SubclassFlags {
    let linear = m
        .rules
        .iter()
        .all(|r| r.rhs.is_linear(r.child_states.len()));
    let nondeleting = m
        .rules
        .iter()
        .all(|r| r.rhs.is_nondeleting(r.child_states.len()));
    let pure = m.states.len() == 1;
    let mut deterministic = true;
    for (i, r) in m.rules.iter().enumerate() {
        for r2 in &m.rules[i + 1..] {
            if r.sym == r2.sym && r.child_states == r2.child_states {
                deterministic = false;
            }
        }
    }
    let total_deterministic = deterministic && m.finals == m.states && {
        let states: Vec<String> = m.states.iter().cloned().collect();
        m.input.pairs().iter().all(|(sym, k)| {
            tuples(&states, *k)
                .into_iter()
                .all(|qs| !m.rules_for(sym, &qs).is_empty())
        })
    };
    let qrel = m.rules.iter().all(bu_qrel_shape);
    SubclassFlags {
        linear,
        nondeleting,
        pure,
        deterministic,
        total_deterministic,
        qrel,
    }
}

fn bu_qrel_shape(r: &super::BuRule) -> bool {
    let k = r.child_states.len();
    if r.rhs.children.len() != k || r.rhs.symbol().is_none() {
        return false;
    }
    r.rhs
        .children
        .iter()
        .enumerate()
        .all(|(i, c)| c.node == Node::Var(i + 1) && c.children.is_empty())
        && (k > 0 || matches!(&r.rhs, Tree { node: Node::Sym(_), children } if children.is_empty()))
}

/// Flags of a top-down transducer, with or without look-ahead.
pub fn classify_td(m: &TdrFtt) -> Result<SubclassFlags> {
    let linear = m.rules.iter().all(|r| {
        (1..=r.rank).all(|i| r.rhs.count_var(i) <= 1)
    });
    let nondeleting = m.rules.iter().all(|r| {
        (1..=r.rank).all(|i| r.rhs.count_var(i) >= 1)
    });
    let pure = m.states.len() == 1;
    let mut deterministic = m.initials.len() == 1;
    'rules: for (i, r) in m.rules.iter().enumerate() {
        for r2 in &m.rules[i + 1..] {
            if r.state == r2.state && r.sym == r2.sym && r.rank == r2.rank {
                // distinct rules on the same left side need disjoint
                // guards on some variable
                if !guards_disjoint(&m.input, r, r2)? {
                    deterministic = false;
                    break 'rules;
                }
            }
        }
    }
    let total_deterministic = deterministic
        && m.states.iter().all(|q| {
            m.input
                .pairs()
                .iter()
                .all(|(sym, k)| !m.rules_for(q, sym, *k).is_empty())
        });
    let qrel = m.rules.iter().all(td_qrel_shape);
    Ok(SubclassFlags {
        linear,
        nondeleting,
        pure,
        deterministic,
        total_deterministic,
        qrel,
    })
}

fn td_qrel_shape(r: &super::TdRule) -> bool {
    match &r.rhs {
        OutTree::Out(_, cs) => {
            cs.len() == r.rank
                && cs
                    .iter()
                    .enumerate()
                    .all(|(i, c)| matches!(c, OutTree::Call(_, j) if *j == i + 1))
        }
        OutTree::Call(..) => false,
    }
}
