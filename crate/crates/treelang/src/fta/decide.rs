//! Decision procedures: emptiness (with a least witness), finiteness,
//! inclusion and equivalence, and the pumping decomposition for accepted
//! trees of sufficient height.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::tree::{Node, Tree};

use super::{DbuFta, NbuFta, State, StateTree};

/// States reachable by some tree, via the least fixpoint.
pub(super) fn reachable_states(a: &NbuFta) -> BTreeSet<State> {
    reachable_witnesses(a).into_keys().collect()
}

/// For every reachable state, the least witness tree by (height, canonical
/// print); the map doubles as the reachable-state set. Computed level by level so the first witness found per state is
/// already height-minimal; ties resolve by print order within the level.
pub fn reachable_witnesses(a: &NbuFta) -> BTreeMap<State, Tree> {
    let mut witness: BTreeMap<State, Tree> = BTreeMap::new();
    // level 0: leaves
    let mut level: BTreeMap<State, Vec<Tree>> = BTreeMap::new();
    for (sym, qs) in &a.leaf {
        for q in qs {
            level.entry(q.clone()).or_default().push(Tree::leaf(sym));
        }
    }
    settle(&mut witness, level);
    loop {
        let mut level: BTreeMap<State, Vec<Tree>> = BTreeMap::new();
        for ((sym, qs), rs) in &a.trans {
            let Some(children) = qs
                .iter()
                .map(|q| witness.get(q).cloned())
                .collect::<Option<Vec<_>>>()
            else {
                continue;
            };
            let t = Tree::node(sym.clone(), children);
            for r in rs {
                if !witness.contains_key(r) {
                    level.entry(r.clone()).or_default().push(t.clone());
                }
            }
        }
        if level.is_empty() {
            break;
        }
        settle(&mut witness, level);
    }
    witness
}

fn settle(witness: &mut BTreeMap<State, Tree>, level: BTreeMap<State, Vec<Tree>>) {
    for (q, cands) in level {
        let best = cands
            .into_iter()
            .min_by_key(Tree::canonical_key)
            .expect("nonempty candidate list");
        witness.entry(q).or_insert(best);
    }
}

/// States from which some context leads into a final state.
pub(super) fn coreachable_states(a: &NbuFta, reachable: &BTreeSet<State>) -> BTreeSet<State> {
    let mut co: BTreeSet<State> = a.finals.clone();
    loop {
        let mut grew = false;
        for ((_, qs), rs) in &a.trans {
            if !rs.iter().any(|r| co.contains(r)) {
                continue;
            }
            for (i, q) in qs.iter().enumerate() {
                if co.contains(q) {
                    continue;
                }
                let others_ok = qs
                    .iter()
                    .enumerate()
                    .all(|(j, qj)| j == i || reachable.contains(qj));
                if others_ok {
                    co.insert(q.clone());
                    grew = true;
                }
            }
        }
        if !grew {
            return co;
        }
    }
}

/// Emptiness with witness extraction. The witness, when present, is the
/// least accepted tree by (height, canonical print); its height is below
/// the number of states.
pub fn decide_empty(a: &NbuFta) -> (bool, Option<Tree>) {
    let witnesses = reachable_witnesses(a);
    let best = a
        .finals
        .iter()
        .filter_map(|q| witnesses.get(q))
        .min_by_key(|t| t.canonical_key())
        .cloned();
    (best.is_none(), best)
}

/// Finiteness via trimming plus cycle detection: the language is infinite
/// exactly when a useful state can feed itself through a nontrivial
/// context.
pub fn decide_finite(a: &NbuFta) -> bool {
    let reachable = reachable_states(a);
    let co = coreachable_states(a, &reachable);
    let useful: BTreeSet<State> = reachable.intersection(&co).cloned().collect();
    // edge q -> r: a context of height 1 moves a useful q into a useful r
    let mut edges: BTreeMap<State, BTreeSet<State>> = BTreeMap::new();
    for ((_, qs), rs) in &a.trans {
        for r in rs {
            if !useful.contains(r) {
                continue;
            }
            for (i, q) in qs.iter().enumerate() {
                if !useful.contains(q) {
                    continue;
                }
                let others_ok = qs
                    .iter()
                    .enumerate()
                    .all(|(j, qj)| j == i || reachable.contains(qj));
                if others_ok {
                    edges.entry(q.clone()).or_default().insert(r.clone());
                }
            }
        }
    }
    !has_cycle(&useful, &edges)
}

fn has_cycle(nodes: &BTreeSet<State>, edges: &BTreeMap<State, BTreeSet<State>>) -> bool {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Grey,
        Black,
    }
    let mut mark: BTreeMap<&State, Mark> = nodes.iter().map(|q| (q, Mark::White)).collect();
    fn visit<'a>(
        q: &'a State,
        edges: &'a BTreeMap<State, BTreeSet<State>>,
        mark: &mut BTreeMap<&'a State, Mark>,
    ) -> bool {
        mark.insert(q, Mark::Grey);
        if let Some(succs) = edges.get(q) {
            for r in succs {
                let seen = mark.get(r).copied();
                match seen {
                    Some(Mark::Grey) => return true,
                    Some(Mark::White) if visit(r, edges, mark) => return true,
                    _ => {}
                }
            }
        }
        mark.insert(q, Mark::Black);
        false
    }
    let keys: Vec<&State> = nodes.iter().collect();
    for q in keys {
        if mark.get(q) == Some(&Mark::White) && visit(q, edges, &mut mark) {
            return true;
        }
    }
    false
}

/// `L(A) ⊆ L(B)`, decided as emptiness of `A ∩ complement(B)`.
pub fn decide_inclusion(a: &NbuFta, b: &NbuFta) -> Result<bool> {
    a.alphabet.require_same_ranks(&b.alphabet)?;
    let diff = super::intersection(a, &super::complement(b))?;
    Ok(decide_empty(&diff).0)
}

/// Language equivalence: inclusion both ways.
pub fn equivalent(a: &NbuFta, b: &NbuFta) -> Result<bool> {
    Ok(decide_inclusion(a, b)? && decide_inclusion(b, a)?)
}

/// A pumping decomposition `t = outer ·x cycle ·x base` where `outer` and
/// `cycle` each contain the hole `x1` exactly once, `base` is ground,
/// `height(cycle ·x base) ≤ p`, `height(cycle) ≥ 1`, and pumping the cycle
/// any number of times stays in the language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PumpDecomposition {
    pub outer: Tree,
    pub cycle: Tree,
    pub base: Tree,
}

impl PumpDecomposition {
    /// `outer ·x cycle^n ·x base`.
    pub fn compose(&self, n: usize) -> Tree {
        let mut inner = self.base.clone();
        for _ in 0..n {
            inner = self.cycle.subst_vars(&[inner]);
        }
        self.outer.subst_vars(&[inner])
    }
}

/// Pumping decomposition along a maximal path, by the first state
/// repetition. Requires `t` accepted and `height(t) ≥ p` where `p` is the
/// state count.
pub fn pump(a: &DbuFta, t: &Tree) -> Result<PumpDecomposition> {
    let p = a.states.len();
    if t.height() < p {
        return Err(Error::ill_formed(
            "pump",
            format!("tree height {} is below the bound {p}", t.height()),
        ));
    }
    let run = a.run_annotated(t)?;
    if !a.finals.contains(&run.state) {
        return Err(Error::ill_formed("pump", "tree is not accepted"));
    }
    // maximal path: child indices from the root, choosing the tallest
    // (leftmost on ties) child at every step
    let mut path: Vec<usize> = Vec::new();
    {
        let mut cur = t;
        while !cur.children.is_empty() {
            let (idx, _) = cur
                .children
                .iter()
                .enumerate()
                .max_by(|(i, x), (j, y)| x.height().cmp(&y.height()).then(j.cmp(i)))
                .expect("nonempty children");
            path.push(idx);
            cur = &cur.children[idx];
        }
    }
    let n = path.len() + 1; // nodes on the path
    // state at path node v_d, depth d
    let mut states_on_path: Vec<State> = Vec::with_capacity(n);
    {
        let mut cur: &StateTree = &run;
        states_on_path.push(cur.state.clone());
        for &idx in &path {
            cur = &cur.children[idx];
            states_on_path.push(cur.state.clone());
        }
    }
    // q_i of the proof is the state at depth n - i; find the first repeat
    // among q_1 … q_{p+1}
    let q = |i: usize| &states_on_path[n - i];
    let mut found: Option<(usize, usize)> = None;
    'outer: for i in 1..=p {
        for j in (i + 1)..=(p + 1).min(n) {
            if q(i) == q(j) {
                found = Some((i, j));
                break 'outer;
            }
        }
    }
    let (i, j) = found.expect("pigeonhole: p+1 states among p must repeat");
    let cut_outer = n - j; // depth of the node whose subtree becomes cycle·base
    let cut_inner = n - i; // depth of the node whose subtree becomes base
    let outer = replace_at_depth(t, &path, 0, cut_outer);
    let sub_outer = subtree_at(t, &path[..cut_outer]);
    let cycle = replace_at_depth(sub_outer, &path[cut_outer..], cut_outer, cut_inner);
    let base = subtree_at(t, &path[..cut_inner]).clone();
    Ok(PumpDecomposition {
        outer,
        cycle,
        base,
    })
}

fn subtree_at<'a>(t: &'a Tree, path: &[usize]) -> &'a Tree {
    let mut cur = t;
    for &i in path {
        cur = &cur.children[i];
    }
    cur
}

/// Copy of `t` with the subtree at depth `stop` along `path` replaced by
/// the hole `x1`. `depth` is the depth of `t`'s root.
fn replace_at_depth(t: &Tree, path: &[usize], depth: usize, stop: usize) -> Tree {
    if depth == stop {
        return Tree::var(1);
    }
    let step = path[0];
    let children = t
        .children
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if i == step {
                replace_at_depth(c, &path[1..], depth + 1, stop)
            } else {
                c.clone()
            }
        })
        .collect();
    Tree {
        node: Node::Sym(t.symbol().expect("ground tree").to_string()),
        children,
    }
}
