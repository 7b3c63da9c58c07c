//! Surface and target languages: images of recognizable tree languages
//! under chains of tree transformations, the path transducer, and the
//! emptiness / membership / finiteness decision pipelines for both the
//! tree-level (surface) and string-level (target) languages.

use std::collections::{BTreeMap, BTreeSet};

use crate::alphabet::RankedAlphabet;
use crate::error::{Error, Result};
use crate::fta::{decide_empty, decide_finite, finite_language_fta, intersection, Dfa, NbuFta};
use crate::grammar::{fta_to_rtg, rtg_to_fta, FreshNames};
use crate::langops::{linear_hom_image, relabel_image};
use crate::transduce::{
    chain_domain, classify, decompose_bu_qrel_hom, decompose_qrel_rel_fta_proj, ltr_to_lb,
    normalize_chain, BuFtt, BuRule, ChainTarget, OutTree, Stage, TdFtt, TdRule,
};
use crate::tree::Tree;

/// A recognizable base language fed through a sequence of transformation
/// stages. Adjacent alphabets must match.
#[derive(Debug, Clone, PartialEq)]
pub struct TransducerChain {
    pub base: NbuFta,
    pub stages: Vec<Stage>,
}

impl TransducerChain {
    pub fn new(base: NbuFta, stages: Vec<Stage>) -> Result<TransducerChain> {
        let mut current = &base.alphabet;
        for (i, s) in stages.iter().enumerate() {
            if !current.same_ranks(s.input_alphabet()) {
                return Err(Error::AlphabetMismatch(format!(
                    "stage {} expects a different input alphabet",
                    i + 1
                )));
            }
            current = s.output_alphabet();
        }
        Ok(TransducerChain { base, stages })
    }

    /// The alphabet of the surface language.
    pub fn output_alphabet(&self) -> &RankedAlphabet {
        self.stages
            .last()
            .map(Stage::output_alphabet)
            .unwrap_or(&self.base.alphabet)
    }

    /// Appends one stage, checking the alphabet seam.
    pub fn with_stage(&self, stage: Stage) -> Result<TransducerChain> {
        let mut stages = self.stages.clone();
        stages.push(stage);
        TransducerChain::new(self.base.clone(), stages)
    }

    /// Brute-force surface enumeration for tests: all images of base
    /// trees up to the given height.
    pub fn surface_by_enumeration(&self, max_height: usize, cap: usize) -> Result<BTreeSet<Tree>> {
        let mut current: BTreeSet<Tree> =
            crate::enumerate::enumerate_trees(&self.base.alphabet, max_height, cap)?
                .into_iter()
                .filter(|t| self.base.accepts(t))
                .collect();
        for s in &self.stages {
            current = s.apply_set(&current)?;
            if current.len() > cap {
                return Err(Error::CapExceeded { cap });
            }
        }
        Ok(current)
    }
}

/// Image of a recognizable language under a linear bottom-up transducer,
/// through the relabel / check / substitute pipeline.
pub fn lb_image(m: &BuFtt, a: &NbuFta) -> Result<NbuFta> {
    if !classify(m).linear {
        return Err(Error::FlagViolation(
            "language images need a linear transducer".into(),
        ));
    }
    a.alphabet.require_same_ranks(&m.input)?;
    let (qrel, hom) = decompose_bu_qrel_hom(m)?;
    let (rel, checker, proj) = decompose_qrel_rel_fta_proj(&qrel)?;
    let base = fta_to_rtg(&a.trim());
    let relabeled = relabel_image(&rel, &base)?;
    let checked = intersection(&rtg_to_fta(&relabeled), &checker)?.trim();
    let projected = relabel_image(&proj, &fta_to_rtg(&checked))?;
    let substituted = linear_hom_image(&hom, &projected)?;
    Ok(rtg_to_fta(&substituted).trim())
}

/// The one-state transducer mapping a tree to the monadic encodings of
/// its root-to-leaf paths.
pub fn path_transducer(alphabet: &RankedAlphabet) -> TdFtt {
    let mut output = RankedAlphabet::empty("paths");
    output.add("e", 0).expect("e is a valid symbol");
    for s in alphabet.symbols() {
        output.add(s, 1).expect("validated symbol");
    }
    let mut names = FreshNames::new(
        alphabet
            .symbols()
            .map(String::from)
            .chain(["e".to_string()]),
    );
    let p = names.prefer("p");
    let mut rules = Vec::new();
    for (sym, k) in alphabet.pairs() {
        if k == 0 {
            rules.push(TdRule {
                state: p.clone(),
                sym: sym.to_string(),
                rank: 0,
                rhs: OutTree::Out("e".into(), vec![]).wrap(sym),
                look: BTreeMap::new(),
            });
        } else {
            for i in 1..=k {
                rules.push(TdRule {
                    state: p.clone(),
                    sym: sym.to_string(),
                    rank: k,
                    rhs: OutTree::Call(p.clone(), i).wrap(sym),
                    look: BTreeMap::new(),
                });
            }
        }
    }
    TdFtt::new(
        alphabet.clone(),
        output,
        BTreeSet::from([p.clone()]),
        rules,
        BTreeSet::from([p]),
    )
    .expect("path transducer is well-formed")
}

impl OutTree {
    /// `sym[self]` — a unary wrap.
    fn wrap(self, sym: &str) -> OutTree {
        OutTree::Out(sym.to_string(), vec![self])
    }
}

/// Result of a surface or target decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub verdict: bool,
    pub witness: Option<Tree>,
}

/// The chain's stages as bottom-up transducers.
fn bu_stages(chain: &TransducerChain) -> Result<Vec<BuFtt>> {
    Ok(normalize_chain(&chain.stages, ChainTarget::Bu)?
        .into_iter()
        .map(|s| match s {
            Stage::Bu(b) => b,
            _ => unreachable!("normalized to bottom-up"),
        })
        .collect())
}

/// Emptiness of the surface language, with a witness produced by
/// replaying the base witness forward through the chain.
pub fn surface_empty(chain: &TransducerChain) -> Result<Decision> {
    let stages = bu_stages(chain)?;
    let feasible = if stages.is_empty() {
        chain.base.trim()
    } else {
        intersection(&chain.base, &chain_domain(&stages)?)?.trim()
    };
    let (empty, base_witness) = decide_empty(&feasible);
    if empty {
        return Ok(Decision {
            verdict: true,
            witness: None,
        });
    }
    // forward replay: after stage i the tree must be in the domain of the
    // remaining stages
    let mut witness = base_witness.expect("nonempty language has a witness");
    for (i, stage) in stages.iter().enumerate() {
        let outputs = stage.apply(&witness)?.image;
        let survivors: Vec<Tree> = if i + 1 < stages.len() {
            let rest = chain_domain(&stages[i + 1..])?;
            outputs.into_iter().filter(|u| rest.accepts(u)).collect()
        } else {
            outputs.into_iter().collect()
        };
        witness = survivors
            .into_iter()
            .min_by_key(Tree::canonical_key)
            .expect("witness survives by construction of the feasible set");
    }
    Ok(Decision {
        verdict: false,
        witness: Some(witness),
    })
}

/// Membership of one tree in the surface language: intersect with the
/// singleton language and decide emptiness.
pub fn surface_member(chain: &TransducerChain, t: &Tree) -> Result<bool> {
    let out_alpha = chain.output_alphabet();
    if !t.is_well_ranked(out_alpha, 0) {
        return Ok(false);
    }
    let restriction = finite_language_fta(out_alpha, std::slice::from_ref(t))?;
    let extended = chain.with_stage(Stage::Fta(restriction))?;
    Ok(!surface_empty(&extended)?.verdict)
}

/// Finiteness of the surface language: append the path transducer, move
/// everything to look-ahead machines, then repeatedly prune non-monadic
/// right sides off the last stage (sound because top-down output is
/// permanent) and fold the now-linear stage away until a recognizable
/// monadic language remains.
pub fn surface_finite(chain: &TransducerChain) -> Result<bool> {
    let paths = path_transducer(chain.output_alphabet());
    let extended = chain.with_stage(Stage::Td(paths))?;
    let mut stages: Vec<crate::transduce::TdrFtt> =
        normalize_chain(&extended.stages, ChainTarget::Tdr)?
            .into_iter()
            .map(|s| match s {
                Stage::Tdr(m) => m,
                _ => unreachable!("normalized to look-ahead machines"),
            })
            .collect();
    let mut base = chain.base.trim();
    while let Some(last) = stages.pop() {
        let pruned = prune_nonmonadic(&last);
        if let Some(prev) = stages.pop() {
            let folded = crate::transduce::compose_tdr(&prev, &pruned)?;
            stages.push(folded);
        } else {
            base = lb_image(&ltr_to_lb(&pruned)?, &base)?.trim();
        }
    }
    Ok(decide_finite(&base))
}

/// Removes rules whose right side mentions an output node of two or more
/// children; what remains only produces unary chains, hence is linear.
fn prune_nonmonadic(m: &crate::transduce::TdrFtt) -> crate::transduce::TdrFtt {
    fn monadic(pat: &OutTree) -> bool {
        match pat {
            OutTree::Call(..) => true,
            OutTree::Out(_, cs) => cs.len() <= 1 && cs.iter().all(monadic),
        }
    }
    let rules = m.rules.iter().filter(|r| monadic(&r.rhs)).cloned().collect();
    crate::transduce::TdrFtt::new(
        m.input.clone(),
        m.output.clone(),
        m.states.clone(),
        rules,
        m.initials.clone(),
    )
    .expect("pruning keeps the transducer well-formed")
}

/// The chain rebuilt so that its surface yields are unchanged except for
/// the empty word, over an alphabet without unary symbols and without
/// `e`; the flag reports whether the original surface contained a tree
/// with empty yield.
pub fn yield_normalize(chain: &TransducerChain) -> Result<(TransducerChain, bool)> {
    let sigma = chain.output_alphabet().clone();
    let letters: BTreeSet<String> = sigma
        .symbols_with_rank(0)
        .into_iter()
        .filter(|s| *s != "e")
        .map(String::from)
        .collect();
    // the empty-yield flag comes from an emptiness test against the
    // all-leaves-e language
    let lambda_dfa = Dfa::lambda_only(&letters);
    let lambda_fta = crate::fta::yield_in_regular(&sigma, &lambda_dfa)?;
    let lambda_chain = chain.with_stage(Stage::Fta(lambda_fta))?;
    let lambda_flag = !surface_empty(&lambda_chain)?.verdict;

    let already_clean = sigma.symbols_with_rank(1).is_empty() && !sigma.has_rank("e", 0);
    if already_clean {
        return Ok((chain.clone(), lambda_flag));
    }
    let flattener = yield_flattener(&sigma)?;
    let chain2 = chain.with_stage(Stage::Bu(flattener))?;
    Ok((chain2, lambda_flag))
}

/// A linear bottom-up transducer that deletes `e` leaves and unary
/// symbols and re-associates the remaining siblings under a fresh binary
/// symbol, preserving yields minus the empty word.
fn yield_flattener(sigma: &RankedAlphabet) -> Result<BuFtt> {
    let rank0: Vec<String> = sigma
        .symbols_with_rank(0)
        .into_iter()
        .filter(|s| *s != "e")
        .map(String::from)
        .collect();
    let mut output = RankedAlphabet::empty("flat");
    for s in &rank0 {
        output.add(s, 0)?;
    }
    let mut names = FreshNames::new(sigma.symbols().map(String::from));
    let pair_sym = if rank0.is_empty() {
        // every yield is empty; the flattener simply has no rules
        "c".to_string()
    } else {
        let c = names.prefer("c");
        output.add(&c, 2)?;
        c
    };
    let q_eps = "qeps".to_string();
    let q_plus = "qplus".to_string();
    let placeholder = rank0.first().cloned();
    let mut rules = Vec::new();
    if let Some(ph) = &placeholder {
        if sigma.has_rank("e", 0) {
            rules.push(BuRule {
                sym: "e".into(),
                child_states: vec![],
                state: q_eps.clone(),
                rhs: Tree::leaf(ph.clone()),
            });
        }
        for s in &rank0 {
            if sigma.has_rank(s, 0) {
                rules.push(BuRule {
                    sym: s.clone(),
                    child_states: vec![],
                    state: q_plus.clone(),
                    rhs: Tree::leaf(s.clone()),
                });
            }
        }
        for (sym, k) in sigma.pairs() {
            if k == 0 {
                continue;
            }
            for pattern in crate::enumerate::tuples(&[q_eps.clone(), q_plus.clone()], k) {
                let plus_positions: Vec<usize> = pattern
                    .iter()
                    .enumerate()
                    .filter(|(_, q)| **q == q_plus)
                    .map(|(i, _)| i + 1)
                    .collect();
                let (state, rhs) = match plus_positions.len() {
                    0 => (q_eps.clone(), Tree::leaf(ph.clone())),
                    1 => (q_plus.clone(), Tree::var(plus_positions[0])),
                    _ => {
                        // fold right to left under the fresh binary symbol
                        let mut it = plus_positions.iter().rev();
                        let mut acc = Tree::var(*it.next().expect("nonempty"));
                        for &i in it {
                            acc = Tree::node(pair_sym.clone(), vec![Tree::var(i), acc]);
                        }
                        (q_plus.clone(), acc)
                    }
                };
                rules.push(BuRule {
                    sym: sym.to_string(),
                    child_states: pattern,
                    state,
                    rhs,
                });
            }
        }
    }
    BuFtt::new(
        sigma.clone(),
        output,
        BTreeSet::from([q_eps, q_plus.clone()]),
        rules,
        BTreeSet::from([q_plus]),
    )
}

/// Emptiness of the target language.
pub fn target_empty(chain: &TransducerChain) -> Result<bool> {
    let (normalized, lambda) = yield_normalize(chain)?;
    if lambda {
        return Ok(false);
    }
    Ok(surface_empty(&normalized)?.verdict)
}

/// Membership of a word in the target language.
pub fn target_member(chain: &TransducerChain, word: &[String]) -> Result<bool> {
    let (normalized, lambda) = yield_normalize(chain)?;
    if word.is_empty() {
        return Ok(lambda);
    }
    let sigma = normalized.output_alphabet().clone();
    let letters: BTreeSet<String> = sigma
        .symbols_with_rank(0)
        .into_iter()
        .filter(|s| *s != "e")
        .map(String::from)
        .collect();
    if word.iter().any(|s| !letters.contains(s)) {
        return Ok(false);
    }
    let dfa = Dfa::single_word(&letters, word);
    let restriction = crate::fta::yield_in_regular(&sigma, &dfa)?;
    let extended = normalized.with_stage(Stage::Fta(restriction))?;
    Ok(!surface_empty(&extended)?.verdict)
}

/// Finiteness of the target language.
pub fn target_finite(chain: &TransducerChain) -> Result<bool> {
    let (normalized, _) = yield_normalize(chain)?;
    surface_finite(&normalized)
}
