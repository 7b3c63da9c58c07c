//! Decomposition schemes: every transducer splits into simpler phases —
//! a relabeling that guesses rule applications, an automaton that checks
//! the guesses, homomorphisms that build the actual output pieces, and a
//! copying phase that isolates duplication.

use std::collections::{BTreeMap, BTreeSet};

use crate::alphabet::RankedAlphabet;
use crate::error::{Error, Result};
use crate::fta::{determinize, NbuFta, State};
use crate::grammar::FreshNames;
use crate::langops::{Relabeling, TreeHom};
use crate::tree::{Node, Tree};

use super::{
    classify, classify_td, BuFtt, BuRule, OutTree, TdFtt, TdRule, TdrFtt,
};

/// Deterministic names for the output-piece symbols of the relabeling
/// phases: a bare leaf keeps its own name, anything else takes its root
/// symbol with a per-root index in canonical print order.
struct PieceNames {
    names: FreshNames,
}

impl PieceNames {
    fn new(reserved: impl IntoIterator<Item = String>) -> PieceNames {
        PieceNames {
            names: FreshNames::new(reserved),
        }
    }

    /// Leaf pieces at rank 0 keep their own symbol; everything else gets
    /// the root symbol with a running per-root index.
    fn name_for(&mut self, rank: usize, piece: &Tree) -> String {
        if rank == 0 && piece.children.is_empty() {
            if let Node::Sym(s) = &piece.node {
                return self.names.prefer(s);
            }
        }
        let base = match &piece.node {
            Node::Sym(s) => s.clone(),
            Node::Var(_) => "id".to_string(),
        };
        self.names.indexed(&base)
    }

    fn indexed(&mut self, base: &str) -> String {
        self.names.indexed(base)
    }
}

/// Splits a bottom-up transducer into a finite state relabeling followed
/// by a homomorphism: the relabeling writes the chosen output piece onto
/// every node, the homomorphism expands the pieces.
pub fn decompose_bu_qrel_hom(m: &BuFtt) -> Result<(BuFtt, TreeHom)> {
    let mut omega = RankedAlphabet::empty("pieces");
    let mut names = PieceNames::new(std::iter::empty());
    let mut piece_symbol: BTreeMap<(usize, Tree), String> = BTreeMap::new();
    let mut hom_map: BTreeMap<(String, usize), Tree> = BTreeMap::new();
    // canonical order over distinct (rank, piece) pairs fixes the indices
    let mut pieces: Vec<(usize, Tree)> = m
        .rules
        .iter()
        .map(|r| (r.child_states.len(), r.rhs.clone()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    pieces.sort_by_key(|(k, t)| (t.symbol().map(String::from), *k, t.to_string()));
    for (k, piece) in pieces {
        let name = names.name_for(k, &piece);
        omega.add(&name, k)?;
        hom_map.insert((name.clone(), k), piece.clone());
        piece_symbol.insert((k, piece), name);
    }
    let relabel_rules = m
        .rules
        .iter()
        .map(|r| {
            let k = r.child_states.len();
            let name = piece_symbol[&(k, r.rhs.clone())].clone();
            BuRule {
                sym: r.sym.clone(),
                child_states: r.child_states.clone(),
                state: r.state.clone(),
                rhs: Tree::node_or_leaf(name, (1..=k).map(Tree::var).collect()),
            }
        })
        .collect();
    let relabeler = BuFtt::new(
        m.input.clone(),
        omega.clone(),
        m.states.clone(),
        relabel_rules,
        m.finals.clone(),
    )?;
    let hom = TreeHom::new(omega, m.output.clone(), hom_map)?;
    Ok((relabeler, hom))
}

/// Splits a finite state relabeling into a relabeling that guesses the
/// applied rule, an automaton that checks the guess, and a projection
/// that writes the output label. Input pairs no rule covers relabel to a
/// dead symbol the automaton rejects.
pub fn decompose_qrel_rel_fta_proj(
    m: &BuFtt,
) -> Result<(Relabeling, NbuFta, Relabeling)> {
    if !classify(m).qrel {
        return Err(Error::FlagViolation(
            "this decomposition needs a finite state relabeling".into(),
        ));
    }
    let mut omega = RankedAlphabet::empty("guesses");
    let mut names = PieceNames::new(std::iter::empty());
    let mut guess: BTreeMap<(String, usize), BTreeSet<String>> = BTreeMap::new();
    let mut proj: BTreeMap<(String, usize), BTreeSet<String>> = BTreeMap::new();
    let mut target = m.output.clone();
    let mut leaf: BTreeMap<String, BTreeSet<State>> = BTreeMap::new();
    let mut trans: BTreeMap<(String, Vec<State>), BTreeSet<State>> = BTreeMap::new();
    for r in &m.rules {
        let k = r.child_states.len();
        let out_sym = r.rhs.symbol().expect("qrel shape").to_string();
        let d = names.indexed(&out_sym);
        omega.add(&d, k)?;
        guess
            .entry((r.sym.clone(), k))
            .or_default()
            .insert(d.clone());
        proj.insert((d.clone(), k), BTreeSet::from([out_sym]));
        if k == 0 {
            leaf.entry(d.clone()).or_default().insert(r.state.clone());
        } else {
            trans
                .entry((d.clone(), r.child_states.clone()))
                .or_default()
                .insert(r.state.clone());
        }
    }
    // uncovered input pairs go to a dead symbol outside the automaton
    for (sym, k) in m.input.pairs() {
        if let std::collections::btree_map::Entry::Vacant(slot) =
            guess.entry((sym.to_string(), k))
        {
            let d = names.indexed("dead");
            omega.add(&d, k)?;
            slot.insert(BTreeSet::from([d.clone()]));
            let image = m
                .output
                .symbols_with_rank(k)
                .first()
                .map(|s| s.to_string())
                .unwrap_or_else(|| sym.to_string());
            if !target.has_rank(&image, k) {
                target.add(&image, k)?;
            }
            proj.insert((d, k), BTreeSet::from([image]));
        }
    }
    let relabeling = Relabeling::new(m.input.clone(), omega.clone(), guess)?;
    let checker = NbuFta::new(
        omega.clone(),
        m.states.clone(),
        leaf,
        trans,
        m.finals.clone(),
    )?;
    let projection = Relabeling::new(omega, target, proj)?;
    Ok((relabeling, checker, projection))
}

/// Splits a top-down transducer into a copying homomorphism followed by a
/// linear top-down transducer: the homomorphism makes as many copies of
/// every subtree as any rule could need, the linear machine picks which
/// copy each call consumes.
pub fn decompose_td_copy_hom_lt(m: &TdFtt) -> Result<(TreeHom, TdFtt)> {
    let n = m
        .rules
        .iter()
        .flat_map(|r| (1..=r.rank).map(|i| r.rhs.count_var(i)))
        .max()
        .unwrap_or(1)
        .max(1);
    let mut omega = RankedAlphabet::empty("copies");
    for (sym, k) in m.input.pairs() {
        omega.add(sym, k * n)?;
    }
    let mut hom_map: BTreeMap<(String, usize), Tree> = BTreeMap::new();
    for (sym, k) in m.input.pairs() {
        let image = if k == 0 {
            Tree::leaf(sym)
        } else {
            let mut children = Vec::with_capacity(k * n);
            for i in 1..=k {
                for _ in 0..n {
                    children.push(Tree::var(i));
                }
            }
            Tree::node(sym, children)
        };
        hom_map.insert((sym.to_string(), k), image);
    }
    let hom = TreeHom::new(m.input.clone(), omega.clone(), hom_map)?;
    let rules = m
        .rules
        .iter()
        .map(|r| {
            let mut used: BTreeMap<usize, usize> = BTreeMap::new();
            let rhs = relinearize(&r.rhs, n, &mut used);
            TdRule {
                state: r.state.clone(),
                sym: r.sym.clone(),
                rank: r.rank * n,
                rhs,
                look: BTreeMap::new(),
            }
        })
        .collect();
    let linear = TdFtt::new(
        omega,
        m.output.clone(),
        m.states.clone(),
        rules,
        m.initials.clone(),
    )?;
    Ok((hom, linear))
}

/// Re-addresses the j-th occurrence of a call on `xi` to the j-th copy,
/// i.e. flattened variable `(i-1)·n + j`.
fn relinearize(pat: &OutTree, n: usize, used: &mut BTreeMap<usize, usize>) -> OutTree {
    match pat {
        OutTree::Call(q, i) => {
            let j = used.entry(*i).or_insert(0);
            *j += 1;
            OutTree::Call(q.clone(), (*i - 1) * n + *j)
        }
        OutTree::Out(s, cs) => OutTree::Out(
            s.clone(),
            cs.iter().map(|c| relinearize(c, n, used)).collect(),
        ),
    }
}

/// Splits a linear deterministic top-down transducer into a deterministic
/// top-down finite state relabeling followed by a linear homomorphism.
/// Deleted children are consumed by an identity relabeling state whose
/// output the homomorphism erases.
pub fn decompose_ldt_qrel_lhom(m: &TdFtt) -> Result<(TdFtt, TreeHom)> {
    let flags = classify_td(&m.to_lookahead())?;
    if !(flags.linear && flags.deterministic) {
        return Err(Error::FlagViolation(
            "this decomposition needs a linear deterministic transducer".into(),
        ));
    }
    let filler = m
        .output
        .symbols_with_rank(0)
        .first()
        .map(|s| s.to_string())
        .ok_or_else(|| {
            Error::ill_formed("decompose", "output alphabet has no rank-0 symbol")
        })?;
    let mut names = FreshNames::new(
        m.states
            .iter()
            .cloned()
            .chain(m.input.symbols().map(String::from)),
    );
    let id = names.prefer("id");
    let mut states = m.states.clone();
    states.insert(id.clone());

    let mut omega = RankedAlphabet::empty("pieces");
    let mut piece_names = PieceNames::new(std::iter::empty());
    let mut hom_map: BTreeMap<(String, usize), Tree> = BTreeMap::new();
    let mut rules: Vec<TdRule> = Vec::new();
    let mut piece_symbol: BTreeMap<(usize, Tree), String> = BTreeMap::new();
    for r in &m.rules {
        let piece = super::embed::out_to_var_tree(&r.rhs);
        let key = (r.rank, piece.clone());
        let d = piece_symbol
            .entry(key)
            .or_insert_with(|| piece_names.name_for(r.rank, &piece))
            .clone();
        if !omega.has_rank(&d, r.rank) {
            omega.add(&d, r.rank)?;
            hom_map.insert((d.clone(), r.rank), piece);
        }
        let mut child_states: Vec<State> = vec![id.clone(); r.rank];
        for (q, i) in r.rhs.calls() {
            child_states[i - 1] = q;
        }
        let rhs = if r.rank == 0 {
            OutTree::leaf(d)
        } else {
            OutTree::Out(
                d,
                child_states
                    .iter()
                    .enumerate()
                    .map(|(i, q)| OutTree::Call(q.clone(), i + 1))
                    .collect(),
            )
        };
        rules.push(TdRule {
            state: r.state.clone(),
            sym: r.sym.clone(),
            rank: r.rank,
            rhs,
            look: BTreeMap::new(),
        });
    }
    // identity state: relabel every input symbol to a throwaway piece
    for (sym, k) in m.input.pairs() {
        let d = piece_names.indexed("pad");
        omega.add(&d, k)?;
        let erased = if k == 0 {
            Tree::leaf(filler.clone())
        } else {
            Tree::var(1)
        };
        hom_map.insert((d.clone(), k), erased);
        let rhs = if k == 0 {
            OutTree::leaf(d)
        } else {
            OutTree::Out(d, (1..=k).map(|i| OutTree::Call(id.clone(), i)).collect())
        };
        rules.push(TdRule {
            state: id.clone(),
            sym: sym.to_string(),
            rank: k,
            rhs,
            look: BTreeMap::new(),
        });
    }
    let qrel = TdFtt::new(
        m.input.clone(),
        omega.clone(),
        states,
        rules,
        m.initials.clone(),
    )?;
    let mut target = m.output.clone();
    if !target.has_rank(&filler, 0) {
        target.add(&filler, 0)?;
    }
    let hom = TreeHom::new(omega, target, hom_map)?;
    Ok((qrel, hom))
}

/// Takes the regular look-ahead out: a total deterministic bottom-up
/// relabeling annotates every node with the membership bits of its
/// children in the look-ahead languages, and an ordinary top-down
/// transducer reads the bits instead of guarding.
pub fn decompose_tdr_remove_lookahead(m: &TdrFtt) -> Result<(BuFtt, TdFtt)> {
    let languages = m.lookahead_languages();
    let mut dets: Vec<crate::fta::DbuFta> = Vec::with_capacity(languages.len());
    for a in &languages {
        dets.push(determinize(&a.embed_alphabet(&m.input)?).completed());
    }
    // product automaton over the determinized look-ahead languages
    let tuple_name = |qs: &[State]| -> String {
        if qs.is_empty() {
            "u".to_string()
        } else {
            qs.join(".")
        }
    };
    let bits_of = |qs: &[State]| -> Vec<bool> {
        dets.iter()
            .enumerate()
            .map(|(j, d)| d.finals.contains(&qs[j]))
            .collect()
    };
    let bit_str = |bits: &[bool]| -> String {
        bits.iter().map(|b| if *b { '1' } else { '0' }).collect()
    };
    let annotated = |sym: &str, child_bits: &[Vec<bool>]| -> String {
        if child_bits.is_empty() {
            sym.to_string()
        } else {
            let mut s = sym.to_string();
            for b in child_bits {
                s.push('.');
                s.push_str(&bit_str(b));
            }
            s
        }
    };

    // run the product forward to find the reachable annotation alphabet
    let mut omega = RankedAlphabet::empty("annotated");
    for sym in m.input.symbols_with_rank(0) {
        omega.add(sym, 0)?;
    }
    let mut relabel_rules: Vec<BuRule> = Vec::new();
    let mut reachable: BTreeSet<Vec<State>> = BTreeSet::new();
    let mut state_names: BTreeSet<State> = BTreeSet::new();
    let mut leaf_state: BTreeMap<String, Vec<State>> = BTreeMap::new();
    for sym in m.input.symbols_with_rank(0) {
        let qs: Vec<State> = dets
            .iter()
            .map(|d| d.leaf.get(sym).cloned().expect("completed automaton"))
            .collect();
        leaf_state.insert(sym.to_string(), qs.clone());
        reachable.insert(qs);
    }
    loop {
        let worklist: Vec<Vec<State>> = reachable.iter().cloned().collect();
        let mut grew = false;
        for (sym, k) in m.input.pairs() {
            if k == 0 {
                continue;
            }
            for tuple in crate::enumerate::tuples(&worklist, k) {
                let next: Vec<State> = dets
                    .iter()
                    .enumerate()
                    .map(|(j, d)| {
                        let key: Vec<State> =
                            tuple.iter().map(|qs| qs[j].clone()).collect();
                        d.trans
                            .get(&(sym.to_string(), key))
                            .cloned()
                            .expect("completed automaton")
                    })
                    .collect();
                grew |= reachable.insert(next);
            }
        }
        if !grew {
            break;
        }
    }
    for qs in &reachable {
        state_names.insert(tuple_name(qs));
    }
    // relabeling rules over the reachable part
    for sym in m.input.symbols_with_rank(0) {
        let qs = &leaf_state[sym];
        relabel_rules.push(BuRule {
            sym: sym.to_string(),
            child_states: vec![],
            state: tuple_name(qs),
            rhs: Tree::leaf(sym),
        });
    }
    let reachable_list: Vec<Vec<State>> = reachable.iter().cloned().collect();
    for (sym, k) in m.input.pairs() {
        if k == 0 {
            continue;
        }
        for tuple in crate::enumerate::tuples(&reachable_list, k) {
            let next: Vec<State> = dets
                .iter()
                .enumerate()
                .map(|(j, d)| {
                    let key: Vec<State> = tuple.iter().map(|qs| qs[j].clone()).collect();
                    d.trans
                        .get(&(sym.to_string(), key))
                        .cloned()
                        .expect("completed automaton")
                })
                .collect();
            let child_bits: Vec<Vec<bool>> =
                tuple.iter().map(|qs| bits_of(qs)).collect();
            let out_sym = annotated(sym, &child_bits);
            if !omega.has_rank(&out_sym, k) {
                omega.add(&out_sym, k)?;
            }
            relabel_rules.push(BuRule {
                sym: sym.to_string(),
                child_states: tuple.iter().map(|qs| tuple_name(qs)).collect(),
                state: tuple_name(&next),
                rhs: Tree::node(out_sym, (1..=k).map(Tree::var).collect()),
            });
        }
    }
    let relabeler = BuFtt::new(
        m.input.clone(),
        omega.clone(),
        state_names.clone(),
        relabel_rules,
        state_names,
    )?;

    // the top-down machine fires on annotations consistent with the guards
    let achievable: BTreeSet<Vec<bool>> = reachable.iter().map(|qs| bits_of(qs)).collect();
    let lang_index = |a: &NbuFta| languages.iter().position(|l| l == a).expect("collected");
    let mut td_rules: Vec<TdRule> = Vec::new();
    for r in &m.rules {
        if r.rank == 0 {
            td_rules.push(TdRule {
                state: r.state.clone(),
                sym: r.sym.clone(),
                rank: 0,
                rhs: r.rhs.clone(),
                look: BTreeMap::new(),
            });
            continue;
        }
        let constraints: BTreeMap<usize, usize> = r
            .look
            .iter()
            .map(|(i, a)| (*i, lang_index(a)))
            .collect();
        let mut tuples_of_bits: Vec<Vec<Vec<bool>>> = vec![Vec::new()];
        for _ in 0..r.rank {
            let mut next = Vec::new();
            for prefix in &tuples_of_bits {
                for bits in &achievable {
                    let mut row = prefix.clone();
                    row.push(bits.clone());
                    next.push(row);
                }
            }
            tuples_of_bits = next;
        }
        for bits_tuple in tuples_of_bits {
            let ok = constraints
                .iter()
                .all(|(i, j)| bits_tuple[*i - 1][*j]);
            if !ok {
                continue;
            }
            let out_sym = annotated(&r.sym, &bits_tuple);
            if !omega.has_rank(&out_sym, r.rank) {
                continue; // annotation never produced by the relabeler
            }
            td_rules.push(TdRule {
                state: r.state.clone(),
                sym: out_sym,
                rank: r.rank,
                rhs: r.rhs.clone(),
                look: BTreeMap::new(),
            });
        }
    }
    let td = TdFtt::new(
        omega,
        m.output.clone(),
        m.states.clone(),
        td_rules,
        m.initials.clone(),
    )?;
    Ok((relabeler, td))
}
