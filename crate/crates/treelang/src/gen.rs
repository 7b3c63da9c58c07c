//! Deterministic pseudo-random generators for randomized test suites and
//! benches. The generator is a plain SplitMix64 so runs are reproducible
//! across platforms without external dependencies.

use crate::alphabet::RankedAlphabet;
use crate::tree::Tree;

/// SplitMix64 pseudo-random number generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..bound` (bound must be positive).
    pub fn below(&mut self, bound: usize) -> usize {
        (self.next_u64() % bound as u64) as usize
    }

    pub fn chance(&mut self, num: u32, den: u32) -> bool {
        (self.next_u64() % den as u64) < num as u64
    }

    /// Picks one element of a slice.
    pub fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.below(xs.len())]
    }
}

/// Random tree over `leaves` (rank 0) and `binary` (rank 2), at most
/// `max_height` tall. Biased toward leaves near the depth limit.
pub fn random_tree_shape(
    rng: &mut SplitMix64,
    leaves: &[&str],
    binary: &[&str],
    max_height: usize,
) -> Tree {
    if max_height == 0 || binary.is_empty() || rng.chance(2, 5) {
        return Tree::leaf(*rng.pick(leaves));
    }
    let sym = *rng.pick(binary);
    let l = random_tree_shape(rng, leaves, binary, max_height - 1);
    let r = random_tree_shape(rng, leaves, binary, max_height - 1);
    Tree::node(sym, vec![l, r])
}

/// Random nondeterministic bottom-up automaton with at most `max_states`
/// states. Transition density is tuned so empty, finite and infinite
/// languages all show up.
pub fn random_nbu_fta(
    rng: &mut SplitMix64,
    alphabet: &RankedAlphabet,
    max_states: usize,
) -> crate::fta::NbuFta {
    use std::collections::{BTreeMap, BTreeSet};
    let n = 1 + rng.below(max_states);
    let states: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let mut leaf: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut trans: BTreeMap<(String, Vec<String>), BTreeSet<String>> = BTreeMap::new();
    for (sym, k) in alphabet.pairs() {
        if k == 0 {
            let mut set = BTreeSet::new();
            for q in &states {
                if rng.chance(1, 2) {
                    set.insert(q.clone());
                }
            }
            if !set.is_empty() {
                leaf.insert(sym.to_string(), set);
            }
        } else {
            for tuple in crate::enumerate::tuples(&states, k) {
                let mut set = BTreeSet::new();
                for q in &states {
                    if rng.chance(1, 3) {
                        set.insert(q.clone());
                    }
                }
                if !set.is_empty() {
                    trans.insert((sym.to_string(), tuple), set);
                }
            }
        }
    }
    let mut finals: BTreeSet<String> = BTreeSet::new();
    for q in &states {
        if rng.chance(1, 2) {
            finals.insert(q.clone());
        }
    }
    crate::fta::NbuFta::new(
        alphabet.clone(),
        states.into_iter().collect(),
        leaf,
        trans,
        finals,
    )
    .expect("generated automaton is well-formed")
}

/// Random output pattern in `T_Δ(X_k)`, biased small. With `linear` set,
/// each variable is used at most once; with `nondeleting`, at least once.
pub fn random_var_tree(
    rng: &mut SplitMix64,
    output: &RankedAlphabet,
    arity: usize,
    linear: bool,
    nondeleting: bool,
) -> Tree {
    loop {
        let mut t = random_tree(rng, output, 2);
        let mut slots = leaf_paths(&t);
        if nondeleting && slots.len() < arity {
            continue; // not enough leaves to place every variable
        }
        // Fisher-Yates over the candidate leaf positions
        for i in (1..slots.len()).rev() {
            slots.swap(i, rng.below(i + 1));
        }
        let mut placements: Vec<(Vec<usize>, usize)> = Vec::new();
        let mut next_slot = 0;
        for v in 1..=arity {
            let place = nondeleting || rng.chance(2, 3);
            if place && next_slot < slots.len() {
                placements.push((slots[next_slot].clone(), v));
                next_slot += 1;
                if !linear && rng.chance(1, 3) && next_slot < slots.len() {
                    placements.push((slots[next_slot].clone(), v));
                    next_slot += 1;
                }
            }
        }
        for (path, v) in placements {
            replace_leaf(&mut t, &path, v);
        }
        return t;
    }
}

fn leaf_paths(t: &Tree) -> Vec<Vec<usize>> {
    fn walk(t: &Tree, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if t.children.is_empty() {
            out.push(path.clone());
            return;
        }
        for (i, c) in t.children.iter().enumerate() {
            path.push(i);
            walk(c, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    walk(t, &mut Vec::new(), &mut out);
    out
}

fn replace_leaf(t: &mut Tree, path: &[usize], v: usize) {
    if path.is_empty() {
        *t = Tree::var(v);
    } else {
        replace_leaf(&mut t.children[path[0]], &path[1..], v);
    }
}

/// Random bottom-up transducer with the requested shape flags.
pub fn random_buftt(
    rng: &mut SplitMix64,
    input: &RankedAlphabet,
    output: &RankedAlphabet,
    max_states: usize,
    linear: bool,
    deterministic: bool,
) -> crate::transduce::BuFtt {
    use crate::transduce::{BuFtt, BuRule};
    use std::collections::BTreeSet;
    let n = 1 + rng.below(max_states);
    let states: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let mut rules = Vec::new();
    for (sym, k) in input.pairs() {
        for child_states in crate::enumerate::tuples(&states, k) {
            let copies = if deterministic { 1 } else { 1 + rng.below(2) };
            for _ in 0..copies {
                if !deterministic && rng.chance(1, 4) {
                    continue; // partial transducers are fine
                }
                let rhs = random_var_tree(rng, output, k, linear, false);
                rules.push(BuRule {
                    sym: sym.to_string(),
                    child_states: child_states.clone(),
                    state: states[rng.below(n)].clone(),
                    rhs,
                });
                if deterministic {
                    break;
                }
            }
        }
    }
    let mut finals: BTreeSet<String> = states
        .iter()
        .filter(|_| rng.chance(1, 2))
        .cloned()
        .collect();
    if finals.is_empty() {
        finals.insert(states[0].clone());
    }
    BuFtt::new(
        input.clone(),
        output.clone(),
        states.into_iter().collect(),
        dedup_bu(rules, deterministic),
        finals,
    )
    .expect("generated transducer is well-formed")
}

fn dedup_bu(
    rules: Vec<crate::transduce::BuRule>,
    deterministic: bool,
) -> Vec<crate::transduce::BuRule> {
    use std::collections::BTreeSet;
    let mut seen_keys: BTreeSet<(String, Vec<String>)> = BTreeSet::new();
    let mut out = Vec::new();
    for r in rules {
        let key = (r.sym.clone(), r.child_states.clone());
        if deterministic && !seen_keys.insert(key) {
            continue;
        }
        out.push(r);
    }
    out
}

/// Random top-down transducer; patterns call random states on the
/// variables they keep.
pub fn random_tdftt(
    rng: &mut SplitMix64,
    input: &RankedAlphabet,
    output: &RankedAlphabet,
    max_states: usize,
    linear: bool,
    deterministic: bool,
) -> crate::transduce::TdFtt {
    use crate::transduce::{OutTree, TdFtt, TdRule};
    use std::collections::{BTreeMap, BTreeSet};
    let n = 1 + rng.below(max_states);
    let states: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let mut rules = Vec::new();
    for q in &states {
        for (sym, k) in input.pairs() {
            let copies = if deterministic { 1 } else { 1 + rng.below(2) };
            for _ in 0..copies {
                if !deterministic && rng.chance(1, 4) {
                    continue;
                }
                let shape = random_var_tree(rng, output, k, linear, false);
                let call_states: Vec<String> = (0..k)
                    .map(|_| states[rng.below(n)].clone())
                    .collect();
                let rhs = OutTree::from_var_tree(&shape, &call_states);
                rules.push(TdRule {
                    state: q.clone(),
                    sym: sym.to_string(),
                    rank: k,
                    rhs,
                    look: BTreeMap::new(),
                });
                if deterministic {
                    break;
                }
            }
        }
    }
    let initials: BTreeSet<String> = if deterministic {
        BTreeSet::from([states[0].clone()])
    } else {
        let mut s: BTreeSet<String> = states
            .iter()
            .filter(|_| rng.chance(1, 2))
            .cloned()
            .collect();
        if s.is_empty() {
            s.insert(states[0].clone());
        }
        s
    };
    TdFtt::new(
        input.clone(),
        output.clone(),
        states.into_iter().collect(),
        rules,
        initials,
    )
    .expect("generated transducer is well-formed")
}

/// Random tree homomorphism between two alphabets.
pub fn random_hom(
    rng: &mut SplitMix64,
    source: &RankedAlphabet,
    target: &RankedAlphabet,
    linear: bool,
) -> crate::langops::TreeHom {
    let map = source
        .pairs()
        .into_iter()
        .map(|(sym, k)| {
            (
                (sym.to_string(), k),
                random_var_tree(rng, target, k, linear, false),
            )
        })
        .collect();
    crate::langops::TreeHom::new(source.clone(), target.clone(), map)
        .expect("generated homomorphism is well-formed")
}

/// Random bottom-up finite state relabeling, optionally deterministic.
pub fn random_bu_qrel(
    rng: &mut SplitMix64,
    input: &RankedAlphabet,
    output: &RankedAlphabet,
    max_states: usize,
    deterministic: bool,
) -> crate::transduce::BuFtt {
    use crate::transduce::{BuFtt, BuRule};
    use std::collections::BTreeSet;
    let n = 1 + rng.below(max_states);
    let states: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
    let mut rules = Vec::new();
    for (sym, k) in input.pairs() {
        let candidates: Vec<&str> = output.symbols_with_rank(k);
        if candidates.is_empty() {
            continue;
        }
        for child_states in crate::enumerate::tuples(&states, k) {
            let copies = if deterministic { 1 } else { 1 + rng.below(2) };
            for _ in 0..copies {
                if !deterministic && rng.chance(1, 4) {
                    continue;
                }
                let out_sym = *rng.pick(&candidates);
                rules.push(BuRule {
                    sym: sym.to_string(),
                    child_states: child_states.clone(),
                    state: states[rng.below(n)].clone(),
                    rhs: Tree::node_or_leaf(out_sym, (1..=k).map(Tree::var).collect()),
                });
                if deterministic {
                    break;
                }
            }
        }
    }
    let mut finals: BTreeSet<String> = states
        .iter()
        .filter(|_| rng.chance(2, 3))
        .cloned()
        .collect();
    if finals.is_empty() {
        finals.insert(states[0].clone());
    }
    BuFtt::new(
        input.clone(),
        output.clone(),
        states.into_iter().collect(),
        dedup_bu(rules, deterministic),
        finals,
    )
    .expect("generated relabeling is well-formed")
}

/// Random word grammar over the given terminals: a couple of
/// nonterminals, short right sides with at most one nonterminal each (so
/// bounded-height derivation enumerations stay small), occasionally a
/// λ-rule.
pub fn random_cfg(rng: &mut SplitMix64, terminals: &[&str]) -> crate::grammar::Cfg {
    use crate::grammar::{Cfg, CfgRule};
    use std::collections::BTreeSet;
    let nt_count = 1 + rng.below(2);
    let nts: Vec<String> = (0..nt_count).map(|i| format!("N{i}")).collect();
    let mut rules = Vec::new();
    for nt in &nts {
        let rule_count = 1 + rng.below(2);
        for _ in 0..rule_count {
            let len = rng.below(4);
            let nt_pos = if len > 0 && rng.chance(1, 2) {
                Some(rng.below(len))
            } else {
                None
            };
            let rhs: Vec<String> = (0..len)
                .map(|i| {
                    if nt_pos == Some(i) {
                        nts[rng.below(nts.len())].clone()
                    } else {
                        rng.pick(terminals).to_string()
                    }
                })
                .collect();
            rules.push(CfgRule {
                lhs: nt.clone(),
                rhs,
            });
        }
        // every nonterminal gets at least one terminating rule
        rules.push(CfgRule {
            lhs: nt.clone(),
            rhs: vec![rng.pick(terminals).to_string()],
        });
    }
    Cfg::new(
        nts.iter().cloned().collect::<BTreeSet<_>>(),
        terminals.iter().map(|s| s.to_string()).collect(),
        rules,
        nts[0].clone(),
    )
    .expect("generated grammar is well-formed")
}

/// Random look-ahead transducer: a random top-down machine whose rules
/// get random small look-ahead automata on some children.
pub fn random_tdrftt(
    rng: &mut SplitMix64,
    input: &RankedAlphabet,
    output: &RankedAlphabet,
    max_states: usize,
    linear: bool,
) -> crate::transduce::TdrFtt {
    use crate::transduce::TdrFtt;
    let base = random_tdftt(rng, input, output, max_states, linear, false);
    let mut rules = base.rules.clone();
    for r in &mut rules {
        for i in 1..=r.rank {
            if rng.chance(1, 3) {
                r.look.insert(i, random_nbu_fta(rng, input, 2));
            }
        }
    }
    TdrFtt::new(
        base.input.clone(),
        base.output.clone(),
        base.states.clone(),
        rules,
        base.initials.clone(),
    )
    .expect("generated transducer is well-formed")
}

/// Random well-ranked tree over an arbitrary alphabet.
pub fn random_tree(rng: &mut SplitMix64, alphabet: &RankedAlphabet, max_height: usize) -> Tree {
    let leaves: Vec<(String, usize)> = alphabet
        .pairs()
        .iter()
        .filter(|(_, k)| *k == 0)
        .map(|(s, k)| (s.to_string(), *k))
        .collect();
    let inner: Vec<(String, usize)> = alphabet
        .pairs()
        .iter()
        .filter(|(_, k)| *k >= 1)
        .map(|(s, k)| (s.to_string(), *k))
        .collect();
    assert!(!leaves.is_empty(), "alphabet needs a rank-0 symbol");
    if max_height == 0 || inner.is_empty() || rng.chance(2, 5) {
        let (s, _) = rng.pick(&leaves).clone();
        return Tree::leaf(s);
    }
    let (s, k) = rng.pick(&inner).clone();
    let children = (0..k)
        .map(|_| random_tree(rng, alphabet, max_height - 1))
        .collect();
    Tree::node(s, children)
}
