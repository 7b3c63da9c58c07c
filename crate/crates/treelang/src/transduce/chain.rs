//! Transformation stages and chains: any mix of relabelings, automaton
//! restrictions, homomorphisms and transducers can be normalized to an
//! all-bottom-up or all-look-ahead chain realizing the same composite
//! relation, and chain domains fold backwards through inverse images.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::fta::NbuFta;
use crate::langops::{apply_hom, apply_relabeling, Relabeling, TreeHom};
use crate::tree::Tree;

use super::{
    compose::compose_bu_with_fta, convert, decompose, embed, BuFtt, TdFtt, TdrFtt,
};

/// One stage of a transformation chain.
#[derive(Debug, Clone, PartialEq)]
pub enum Stage {
    Rel(Relabeling),
    Fta(NbuFta),
    Hom(TreeHom),
    Bu(BuFtt),
    Td(TdFtt),
    Tdr(TdrFtt),
}

/// Normalization target of [`normalize_chain`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainTarget {
    Bu,
    Tdr,
}

impl Stage {
    /// Pointwise image of one input tree.
    pub fn apply(&self, t: &Tree) -> Result<BTreeSet<Tree>> {
        match self {
            Stage::Rel(r) => apply_relabeling(r, t),
            Stage::Fta(a) => Ok(if a.accepts(t) {
                BTreeSet::from([t.clone()])
            } else {
                BTreeSet::new()
            }),
            Stage::Hom(h) => Ok(BTreeSet::from([apply_hom(h, t)?])),
            Stage::Bu(m) => Ok(m.apply(t)?.image),
            Stage::Td(m) => Ok(m.apply(t)?.image),
            Stage::Tdr(m) => Ok(m.apply(t)?.image),
        }
    }

    /// Pointwise image of a set of trees.
    pub fn apply_set(&self, ts: &BTreeSet<Tree>) -> Result<BTreeSet<Tree>> {
        let mut out = BTreeSet::new();
        for t in ts {
            out.extend(self.apply(t)?);
        }
        Ok(out)
    }

    pub fn input_alphabet(&self) -> &crate::alphabet::RankedAlphabet {
        match self {
            Stage::Rel(r) => &r.source,
            Stage::Fta(a) => &a.alphabet,
            Stage::Hom(h) => &h.source,
            Stage::Bu(m) => &m.input,
            Stage::Td(m) => &m.input,
            Stage::Tdr(m) => &m.input,
        }
    }

    pub fn output_alphabet(&self) -> &crate::alphabet::RankedAlphabet {
        match self {
            Stage::Rel(r) => &r.target,
            Stage::Fta(a) => &a.alphabet,
            Stage::Hom(h) => &h.target,
            Stage::Bu(m) => &m.output,
            Stage::Td(m) => &m.output,
            Stage::Tdr(m) => &m.output,
        }
    }
}

/// Rewrites every stage into the target kind; the composite relation is
/// unchanged, the stage count may grow.
pub fn normalize_chain(stages: &[Stage], target: ChainTarget) -> Result<Vec<Stage>> {
    let mut out = Vec::new();
    for stage in stages {
        match target {
            ChainTarget::Bu => out.extend(stage_to_bu(stage)?),
            ChainTarget::Tdr => out.extend(stage_to_tdr(stage)?),
        }
    }
    Ok(out)
}

fn stage_to_bu(stage: &Stage) -> Result<Vec<Stage>> {
    Ok(match stage {
        Stage::Rel(r) => vec![Stage::Bu(embed::embed_relabeling_bu(r))],
        Stage::Fta(a) => vec![Stage::Bu(embed::embed_fta_bu(a))],
        Stage::Hom(h) => vec![Stage::Bu(embed::embed_hom_bu(h))],
        Stage::Bu(m) => vec![Stage::Bu(m.clone())],
        Stage::Td(m) => {
            // copying homomorphism first, then the linear rest bottom-up
            let (hom, lt) = decompose::decompose_td_copy_hom_lt(m)?;
            vec![
                Stage::Bu(embed::embed_hom_bu(&hom)),
                Stage::Bu(convert::lt_to_lb(&lt)?),
            ]
        }
        Stage::Tdr(m) => {
            if let Some(plain) = m.without_lookahead() {
                stage_to_bu(&Stage::Td(plain))?
            } else {
                let (relabeler, td) = decompose::decompose_tdr_remove_lookahead(m)?;
                let mut v = vec![Stage::Bu(relabeler)];
                v.extend(stage_to_bu(&Stage::Td(td))?);
                v
            }
        }
    })
}

fn stage_to_tdr(stage: &Stage) -> Result<Vec<Stage>> {
    Ok(match stage {
        Stage::Rel(r) => vec![Stage::Tdr(embed::embed_relabeling_td(r).to_lookahead())],
        Stage::Fta(a) => vec![Stage::Tdr(embed::embed_fta_td(a).to_lookahead())],
        Stage::Hom(h) => vec![Stage::Tdr(embed::embed_hom_td(h).to_lookahead())],
        Stage::Td(m) => vec![Stage::Tdr(m.to_lookahead())],
        Stage::Tdr(m) => vec![Stage::Tdr(m.clone())],
        Stage::Bu(m) => {
            // hom-free relabeling part moves over with look-ahead, the
            // homomorphism part embeds directly
            let (qrel, hom) = decompose::decompose_bu_qrel_hom(m)?;
            vec![
                Stage::Tdr(convert::lb_to_ltr(&qrel)?),
                Stage::Tdr(embed::embed_hom_td(&hom).to_lookahead()),
            ]
        }
    })
}

/// Domain automaton of a bottom-up transducer: outputs dropped from the
/// rules, finals kept.
pub fn domain_of_bu(m: &BuFtt) -> NbuFta {
    let mut leaf: std::collections::BTreeMap<String, BTreeSet<String>> =
        std::collections::BTreeMap::new();
    let mut trans: std::collections::BTreeMap<(String, Vec<String>), BTreeSet<String>> =
        std::collections::BTreeMap::new();
    for r in &m.rules {
        if r.child_states.is_empty() {
            leaf.entry(r.sym.clone()).or_default().insert(r.state.clone());
        } else {
            trans
                .entry((r.sym.clone(), r.child_states.clone()))
                .or_default()
                .insert(r.state.clone());
        }
    }
    NbuFta::new(
        m.input.clone(),
        m.states.clone(),
        leaf,
        trans,
        m.finals.clone(),
    )
    .expect("transducer rules form a well-formed automaton")
}

/// `{t | image(t) ∩ L(A) ≠ ∅}`: the domain of the transducer composed
/// with the automaton restriction.
pub fn inverse_image(m: &BuFtt, a: &NbuFta) -> Result<NbuFta> {
    Ok(domain_of_bu(&compose_bu_with_fta(m, a)?).trim())
}

/// Domain of a chain of bottom-up transducers, folded right to left
/// through inverse images.
pub fn chain_domain(stages: &[BuFtt]) -> Result<NbuFta> {
    let Some((last, rest)) = stages.split_last() else {
        return Err(Error::ill_formed("chain_domain", "empty chain"));
    };
    let mut dom = domain_of_bu(last).trim();
    for stage in rest.iter().rev() {
        dom = inverse_image(stage, &dom)?;
    }
    Ok(dom)
}

/// Domain automaton of a top-down transducer, with or without look-ahead,
/// through bottom-up normalization.
pub fn domain_of_tdr(m: &TdrFtt) -> Result<NbuFta> {
    let stages = normalize_chain(&[Stage::Tdr(m.clone())], ChainTarget::Bu)?;
    let bu: Vec<BuFtt> = stages
        .into_iter()
        .map(|s| match s {
            Stage::Bu(b) => b,
            _ => unreachable!("normalized to bottom-up"),
        })
        .collect();
    chain_domain(&bu)
}

/// Domain automaton of a plain top-down transducer.
pub fn domain_of_td(m: &TdFtt) -> Result<NbuFta> {
    domain_of_tdr(&m.to_lookahead())
}
