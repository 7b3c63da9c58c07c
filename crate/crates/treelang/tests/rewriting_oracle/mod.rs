//! Exhaustive rewriting-relation search: the slow, literal semantics of
//! transducers as tree rewriting systems. Configurations grow from the
//! input by single rule applications anywhere in the tree; the image is
//! read off the final configurations. Kept deliberately independent of
//! the library's recursive application code — this module only reads the
//! rule lists.
//!
//! The search assumes disjoint input and output alphabets (the suites
//! only feed it such machines); with overlapping alphabets the literal
//! relation admits unboundedly many dead configurations.

use std::collections::{BTreeSet, VecDeque};

use treelang::transduce::{BuFtt, OutTree, TdrFtt};
use treelang::tree::{Node, Tree};

const CONFIG_CAP: usize = 2_000_000;

fn is_output(m: &BuFtt, t: &Tree) -> bool {
    t.is_ground() && t.check_ranked(&m.output, 0).is_none()
}

/// All outputs `u` with `t ⇒* q[u]` for a final `q`, by breadth-first
/// search over the rewriting relation.
pub fn bu_search(m: &BuFtt, input: &Tree) -> BTreeSet<Tree> {
    let mut seen: BTreeSet<Tree> = BTreeSet::new();
    let mut queue: VecDeque<Tree> = VecDeque::from([input.clone()]);
    let mut images = BTreeSet::new();
    while let Some(config) = queue.pop_front() {
        if !seen.insert(config.clone()) {
            continue;
        }
        assert!(seen.len() <= CONFIG_CAP, "configuration blow-up");
        if let Node::Sym(sym) = &config.node {
            if m.finals.contains(sym)
                && config.children.len() == 1
                && is_output(m, &config.children[0])
            {
                images.insert(config.children[0].clone());
            }
        }
        for succ in bu_steps(m, &config) {
            queue.push_back(succ);
        }
    }
    images
}

/// Single rewriting steps anywhere in a bottom-up configuration.
fn bu_steps(m: &BuFtt, config: &Tree) -> Vec<Tree> {
    let mut out = Vec::new();
    // redex at the root?
    if let Node::Sym(sym) = &config.node {
        for rule in &m.rules {
            if rule.sym != *sym || rule.child_states.len() != config.children.len() {
                continue;
            }
            // children must be q_i[u_i] with output-ground u_i
            let mut bound: Vec<&Tree> = Vec::with_capacity(config.children.len());
            let mut ok = true;
            for (child, q) in config.children.iter().zip(&rule.child_states) {
                let state_matches = child.symbol() == Some(q.as_str())
                    && child.children.len() == 1
                    && is_output(m, &child.children[0]);
                if state_matches {
                    bound.push(&child.children[0]);
                } else {
                    ok = false;
                    break;
                }
            }
            if ok {
                let images: Vec<Tree> = bound.into_iter().cloned().collect();
                out.push(Tree::node(
                    rule.state.clone(),
                    vec![rule.rhs.subst_vars(&images)],
                ));
            }
        }
    }
    // or anywhere below
    for (i, child) in config.children.iter().enumerate() {
        for rewritten in bu_steps(m, child) {
            let mut children = config.children.clone();
            children[i] = rewritten;
            out.push(Tree {
                node: config.node.clone(),
                children,
            });
        }
    }
    out
}

/// All outputs of a top-down machine by exhaustive search: start at
/// `q[t]` for every initial state, rewrite state nodes anywhere, collect
/// the state-free configurations.
pub fn td_search(m: &TdrFtt, input: &Tree) -> BTreeSet<Tree> {
    let mut seen: BTreeSet<Tree> = BTreeSet::new();
    let mut queue: VecDeque<Tree> = m
        .initials
        .iter()
        .map(|q| Tree::node(q.clone(), vec![input.clone()]))
        .collect();
    let mut images = BTreeSet::new();
    while let Some(config) = queue.pop_front() {
        if !seen.insert(config.clone()) {
            continue;
        }
        assert!(seen.len() <= CONFIG_CAP, "configuration blow-up");
        if config_is_final(m, &config) {
            images.insert(config.clone());
            continue;
        }
        for succ in td_steps(m, &config) {
            queue.push_back(succ);
        }
    }
    images
}

fn config_is_final(m: &TdrFtt, t: &Tree) -> bool {
    match &t.node {
        Node::Var(_) => false,
        Node::Sym(s) => {
            !m.states.contains(s) && t.children.iter().all(|c| config_is_final(m, c))
        }
    }
}

fn td_steps(m: &TdrFtt, config: &Tree) -> Vec<Tree> {
    let mut out = Vec::new();
    if let Node::Sym(sym) = &config.node {
        if m.states.contains(sym) && config.children.len() == 1 {
            let subject = &config.children[0];
            if let Node::Sym(input_sym) = &subject.node {
                for rule in m.rules_for(sym, input_sym, subject.children.len()) {
                    let guards_ok = rule
                        .look
                        .iter()
                        .all(|(i, a)| a.accepts(&subject.children[*i - 1]));
                    if guards_ok {
                        out.push(instantiate(&rule.rhs, &subject.children));
                    }
                }
            }
            return out;
        }
    }
    for (i, child) in config.children.iter().enumerate() {
        for rewritten in td_steps(m, child) {
            let mut children = config.children.clone();
            children[i] = rewritten;
            out.push(Tree {
                node: config.node.clone(),
                children,
            });
        }
    }
    out
}

/// Builds the configuration tree of a rule's right side: output nodes
/// stay, calls become state nodes over the matched subtrees.
fn instantiate(pat: &OutTree, subtrees: &[Tree]) -> Tree {
    match pat {
        OutTree::Call(q, i) => Tree::node(q.clone(), vec![subtrees[*i - 1].clone()]),
        OutTree::Out(sym, cs) => Tree::node_or_leaf(
            sym.clone(),
            cs.iter().map(|c| instantiate(c, subtrees)).collect(),
        ),
    }
}
