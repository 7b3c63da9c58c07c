//! Ready-made example machines and grammars, shared by the test suites and
//! benches and handy for exploring the library from the REPL of your
//! choice. Each constructor documents the language or transformation it
//! implements.

use std::collections::{BTreeMap, BTreeSet};

use crate::alphabet::RankedAlphabet;
use crate::fta::{Dfa, DbuFta, DtdFta, NbuFta, State};
use crate::tree::Tree;
use crate::grammar::{Cfg, CfgRule, Rtg, RtgRule};
use crate::langops::TreeHom;
use crate::parse_term;
use crate::transduce::{BuFtt, BuRule, OutTree, TdFtt, TdRule, TdrFtt};

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// Alphabet of arithmetic expressions: digits at rank 0, `+` and `*` at
/// rank 2.
pub fn digit_expr_alphabet() -> RankedAlphabet {
    let mut entries: Vec<(String, usize)> = (0..=9).map(|d| (d.to_string(), 0)).collect();
    entries.push(("+".to_string(), 2));
    entries.push(("*".to_string(), 2));
    let pairs: Vec<(&str, usize)> = entries.iter().map(|(s, k)| (s.as_str(), *k)).collect();
    RankedAlphabet::new("digits", &pairs).unwrap()
}

/// Deterministic bottom-up automaton computing the value of a digit
/// expression modulo 4; accepts expressions whose value is ≡ 1 (mod 4).
pub fn mod4_expr_automaton() -> DbuFta {
    let alphabet = digit_expr_alphabet();
    let states: BTreeSet<State> = (0..4).map(|i| i.to_string()).collect();
    let mut leaf = BTreeMap::new();
    for d in 0..=9u32 {
        leaf.insert(d.to_string(), (d % 4).to_string());
    }
    let mut trans = BTreeMap::new();
    for p in 0..4u32 {
        for q in 0..4u32 {
            trans.insert(
                ("+".to_string(), vec![p.to_string(), q.to_string()]),
                ((p + q) % 4).to_string(),
            );
            trans.insert(
                ("*".to_string(), vec![p.to_string(), q.to_string()]),
                ((p * q) % 4).to_string(),
            );
        }
    }
    DbuFta::new(alphabet, states, leaf, trans, set(&["1"])).unwrap()
}

/// Alphabet with one leaf `a` and one binary symbol `b`.
pub fn ab_alphabet() -> RankedAlphabet {
    RankedAlphabet::new("ab", &[("a", 0), ("b", 2)]).unwrap()
}

/// Deterministic bottom-up automaton for right combs `b[a b[a … b[a a]]]`.
pub fn right_comb_automaton() -> DbuFta {
    let alphabet = ab_alphabet();
    let states = set(&["A", "C", "W"]);
    let leaf = BTreeMap::from([("a".to_string(), "A".to_string())]);
    let mut trans = BTreeMap::new();
    for p in ["A", "C", "W"] {
        for q in ["A", "C", "W"] {
            let to = if p == "A" && (q == "A" || q == "C") {
                "C"
            } else {
                "W"
            };
            trans.insert(
                ("b".to_string(), vec![p.to_string(), q.to_string()]),
                to.to_string(),
            );
        }
    }
    DbuFta::new(alphabet, states, leaf, trans, set(&["C"])).unwrap()
}

/// Nondeterministic automaton for trees containing a same-label
/// grandparent pattern: a node labeled `a` (or `b`) both of whose children
/// carry the same label.
pub fn stacked_pair_automaton() -> NbuFta {
    let alphabet = RankedAlphabet::new("pab", &[("p", 0), ("a", 2), ("b", 2)]).unwrap();
    let states = set(&["qs", "qa", "qb", "r"]);
    let leaf = BTreeMap::from([("p".to_string(), set(&["qs"]))]);
    let mut trans: BTreeMap<(String, Vec<State>), BTreeSet<State>> = BTreeMap::new();
    trans.insert(
        ("a".to_string(), vec!["qs".into(), "qs".into()]),
        set(&["qs", "qa"]),
    );
    trans.insert(
        ("b".to_string(), vec!["qs".into(), "qs".into()]),
        set(&["qs", "qb"]),
    );
    trans.insert(("a".to_string(), vec!["qa".into(), "qa".into()]), set(&["r"]));
    trans.insert(("b".to_string(), vec!["qb".into(), "qb".into()]), set(&["r"]));
    for q in ["qs", "qa", "qb", "r"] {
        for sym in ["a", "b"] {
            trans
                .entry((sym.to_string(), vec![q.to_string(), "r".to_string()]))
                .or_default()
                .insert("r".to_string());
            trans
                .entry((sym.to_string(), vec!["r".to_string(), q.to_string()]))
                .or_default()
                .insert("r".to_string());
        }
    }
    NbuFta::new(alphabet, states, leaf, trans, set(&["r"])).unwrap()
}

/// Alphabet with leaves `a`, `b`, unary `p` and binary `p`, `q`.
pub fn pq_alphabet() -> RankedAlphabet {
    RankedAlphabet::new(
        "pq",
        &[("a", 0), ("b", 0), ("p", 1), ("p", 2), ("q", 2)],
    )
    .unwrap()
}

/// Deterministic top-down automaton for: every node labeled `q` has all
/// its descendants labeled `q` or `a`.
pub fn q_below_q_automaton() -> DtdFta {
    let alphabet = pq_alphabet();
    let states = set(&["A", "R", "W"]);
    let mut trans: BTreeMap<(String, usize, State), Vec<State>> = BTreeMap::new();
    trans.insert(("p".to_string(), 1, "A".to_string()), vec!["A".into()]);
    trans.insert(("p".to_string(), 1, "R".to_string()), vec!["W".into()]);
    trans.insert(("p".to_string(), 1, "W".to_string()), vec!["W".into()]);
    trans.insert(
        ("p".to_string(), 2, "A".to_string()),
        vec!["A".into(), "A".into()],
    );
    trans.insert(
        ("p".to_string(), 2, "R".to_string()),
        vec!["W".into(), "W".into()],
    );
    trans.insert(
        ("p".to_string(), 2, "W".to_string()),
        vec!["W".into(), "W".into()],
    );
    trans.insert(
        ("q".to_string(), 2, "A".to_string()),
        vec!["R".into(), "R".into()],
    );
    trans.insert(
        ("q".to_string(), 2, "R".to_string()),
        vec!["R".into(), "R".into()],
    );
    trans.insert(
        ("q".to_string(), 2, "W".to_string()),
        vec!["W".into(), "W".into()],
    );
    let leaf_final = BTreeMap::from([
        ("a".to_string(), set(&["A", "R"])),
        ("b".to_string(), set(&["A"])),
    ]);
    DtdFta {
        alphabet,
        states,
        init: "A".to_string(),
        trans,
        leaf_final,
    }
}

/// Parity automaton: accepts trees over [`pq_alphabet`] with an odd number
/// of `p` nodes.
pub fn odd_p_automaton() -> DbuFta {
    let alphabet = pq_alphabet();
    let states = set(&["even", "odd"]);
    let leaf = BTreeMap::from([
        ("a".to_string(), "even".to_string()),
        ("b".to_string(), "even".to_string()),
    ]);
    let par = |q: &str| usize::from(q == "odd");
    let name = |n: usize| if n.is_multiple_of(2) { "even" } else { "odd" }.to_string();
    let mut trans = BTreeMap::new();
    for q1 in ["even", "odd"] {
        trans.insert(
            ("p".to_string(), vec![q1.to_string()]),
            name(par(q1) + 1),
        );
        for q2 in ["even", "odd"] {
            trans.insert(
                ("p".to_string(), vec![q1.to_string(), q2.to_string()]),
                name(par(q1) + par(q2) + 1),
            );
            trans.insert(
                ("q".to_string(), vec![q1.to_string(), q2.to_string()]),
                name(par(q1) + par(q2)),
            );
        }
    }
    DbuFta::new(alphabet, states, leaf, trans, set(&["odd"])).unwrap()
}

/// Grammar of nested p/q spines: `S → p[a T a]`, `T → q[c p[d T] b] | e`.
pub fn nested_pq_grammar() -> Rtg {
    let terminals = RankedAlphabet::new(
        "nest",
        &[
            ("a", 0),
            ("b", 0),
            ("c", 0),
            ("d", 0),
            ("e", 0),
            ("p", 2),
            ("p", 3),
            ("q", 3),
        ],
    )
    .unwrap();
    Rtg::new(
        set(&["S", "T"]),
        terminals,
        vec![
            RtgRule::new("S", parse_term("p[a T a]").unwrap()),
            RtgRule::new("T", parse_term("q[c p[d T] b]").unwrap()),
            RtgRule::new("T", parse_term("e").unwrap()),
        ],
        "S".to_string(),
    )
    .unwrap()
}

/// Grammar of right combs: `S → b[a S] | a`.
pub fn right_comb_grammar() -> Rtg {
    Rtg::new(
        set(&["S"]),
        ab_alphabet(),
        vec![
            RtgRule::new("S", parse_term("b[a S]").unwrap()),
            RtgRule::new("S", parse_term("a").unwrap()),
        ],
        "S".to_string(),
    )
    .unwrap()
}

/// The balanced-pair word grammar `S → AD`, `A → aAb | bAa | AA | λ`,
/// `D → Ddd | d`; it derives `baabddd` among others.
pub fn balanced_word_cfg() -> Cfg {
    Cfg::new(
        set(&["S", "A", "D"]),
        set(&["a", "b", "d"]),
        vec![
            CfgRule::new("S", &["A", "D"]),
            CfgRule::new("A", &["a", "A", "b"]),
            CfgRule::new("A", &["b", "A", "a"]),
            CfgRule::new("A", &["A", "A"]),
            CfgRule::new("A", &[]),
            CfgRule::new("D", &["D", "d", "d"]),
            CfgRule::new("D", &["d"]),
        ],
        "S".to_string(),
    )
    .unwrap()
}

/// `{aⁿbⁿ | n ≥ 1}` as a word grammar.
pub fn anbn_cfg() -> Cfg {
    Cfg::new(
        set(&["S"]),
        set(&["a", "b"]),
        vec![
            CfgRule::new("S", &["a", "S", "b"]),
            CfgRule::new("S", &["a", "b"]),
        ],
        "S".to_string(),
    )
    .unwrap()
}

/// Homomorphism swapping the children of every `p`; yields get mirrored.
pub fn mirror_hom() -> TreeHom {
    let alpha = RankedAlphabet::new("m", &[("a", 0), ("b", 0), ("p", 2)]).unwrap();
    TreeHom::new(
        alpha.clone(),
        alpha,
        BTreeMap::from([
            (("a".to_string(), 0), Tree::leaf("a")),
            (("b".to_string(), 0), Tree::leaf("b")),
            (
                ("p".to_string(), 2),
                Tree::node("p", vec![Tree::var(2), Tree::var(1)]),
            ),
        ]),
    )
    .unwrap()
}

/// The subtree-doubling homomorphism from unary spines to binary trees:
/// `b/1 ↦ b[x1 x1]`; images of `m(bⁿa)` yield `a^(2ⁿ)`.
pub fn doubling_hom() -> TreeHom {
    let source = RankedAlphabet::new("spine", &[("a", 0), ("b", 1)]).unwrap();
    TreeHom::new(
        source,
        ab_alphabet(),
        BTreeMap::from([
            (("a".to_string(), 0), Tree::leaf("a")),
            (
                ("b".to_string(), 1),
                Tree::node("b", vec![Tree::var(1), Tree::var(1)]),
            ),
        ]),
    )
    .unwrap()
}

/// One-state bottom-up transducer realizing the subtree-doubling
/// homomorphism: spines go in, full binary trees come out.
pub fn doubling_buftt() -> BuFtt {
    let h = doubling_hom();
    crate::transduce::embed_hom_bu(&h)
}

/// Bottom-up transducer that picks a path of even length, relabels `f` to
/// `m` and `g` to `n` along it, and doubles the chosen subtree at every
/// step.
pub fn path_doubler_buftt() -> BuFtt {
    let input = RankedAlphabet::new("fg", &[("a", 0), ("b", 0), ("f", 2), ("g", 2)]).unwrap();
    let output = RankedAlphabet::new("mn", &[("a", 0), ("b", 0), ("m", 2), ("n", 2)]).unwrap();
    let mut rules = vec![
        BuRule {
            sym: "a".into(),
            child_states: vec![],
            state: "q0".into(),
            rhs: Tree::leaf("a"),
        },
        BuRule {
            sym: "b".into(),
            child_states: vec![],
            state: "q0".into(),
            rhs: Tree::leaf("b"),
        },
    ];
    let flip = |q: &str| if q == "q0" { "q1" } else { "q0" };
    for (inp, out) in [("f", "m"), ("g", "n")] {
        for qi in ["q0", "q1"] {
            for qj in ["q0", "q1"] {
                rules.push(BuRule {
                    sym: inp.into(),
                    child_states: vec![qi.into(), qj.into()],
                    state: flip(qi).into(),
                    rhs: Tree::node(out, vec![Tree::var(1), Tree::var(1)]),
                });
                rules.push(BuRule {
                    sym: inp.into(),
                    child_states: vec![qi.into(), qj.into()],
                    state: flip(qj).into(),
                    rhs: Tree::node(out, vec![Tree::var(2), Tree::var(2)]),
                });
            }
        }
    }
    BuFtt::new(
        input,
        output,
        set(&["q0", "q1"]),
        rules,
        set(&["q0"]),
    )
    .unwrap()
}

/// Alphabet of unary spines over `a` and `f` ending in `e`.
pub fn spine_af_alphabet() -> RankedAlphabet {
    RankedAlphabet::new("af", &[("e", 0), ("a", 1), ("f", 1)]).unwrap()
}

/// Output alphabet with unary `a`, `b` and binary `f` over the leaf `e`.
pub fn spine_abf_alphabet() -> RankedAlphabet {
    RankedAlphabet::new("abf", &[("e", 0), ("a", 1), ("b", 1), ("f", 2)]).unwrap()
}

/// Bottom-up transducer that nondeterministically relabels each `a` to
/// `a` or `b` and then copies the whole spine under `f` — nondeterminism
/// before copying, so both copies agree.
pub fn relabel_then_copy_buftt() -> BuFtt {
    let rules = vec![
        BuRule {
            sym: "e".into(),
            child_states: vec![],
            state: "q".into(),
            rhs: Tree::leaf("e"),
        },
        BuRule {
            sym: "a".into(),
            child_states: vec!["q".into()],
            state: "q".into(),
            rhs: Tree::node("a", vec![Tree::var(1)]),
        },
        BuRule {
            sym: "a".into(),
            child_states: vec!["q".into()],
            state: "q".into(),
            rhs: Tree::node("b", vec![Tree::var(1)]),
        },
        BuRule {
            sym: "f".into(),
            child_states: vec!["q".into()],
            state: "q".into(),
            rhs: Tree::node("f", vec![Tree::var(1), Tree::var(1)]),
        },
    ];
    BuFtt::new(
        spine_af_alphabet(),
        spine_abf_alphabet(),
        set(&["q"]),
        rules,
        set(&["q"]),
    )
    .unwrap()
}

/// Top-down transducer that copies the spine under `f` first and then
/// relabels each copy independently — copying before nondeterminism.
pub fn copy_then_relabel_tdftt() -> TdFtt {
    let q = || "q".to_string();
    let rules = vec![
        TdRule {
            state: q(),
            sym: "f".into(),
            rank: 1,
            rhs: OutTree::Out(
                "f".into(),
                vec![OutTree::Call(q(), 1), OutTree::Call(q(), 1)],
            ),
            look: BTreeMap::new(),
        },
        TdRule {
            state: q(),
            sym: "a".into(),
            rank: 1,
            rhs: OutTree::Out("a".into(), vec![OutTree::Call(q(), 1)]),
            look: BTreeMap::new(),
        },
        TdRule {
            state: q(),
            sym: "a".into(),
            rank: 1,
            rhs: OutTree::Out("b".into(), vec![OutTree::Call(q(), 1)]),
            look: BTreeMap::new(),
        },
        TdRule {
            state: q(),
            sym: "e".into(),
            rank: 0,
            rhs: OutTree::leaf("e"),
            look: BTreeMap::new(),
        },
    ];
    TdFtt::new(
        spine_af_alphabet(),
        spine_abf_alphabet(),
        set(&["q"]),
        rules,
        set(&["q"]),
    )
    .unwrap()
}

/// Alphabet of arithmetic expressions in `a`, `b` with unary minus, sine
/// and cosine and binary sum and product.
pub fn calculus_input_alphabet() -> RankedAlphabet {
    RankedAlphabet::new(
        "expr",
        &[
            ("a", 0),
            ("b", 0),
            ("-", 1),
            ("sin", 1),
            ("cos", 1),
            ("+", 2),
            ("*", 2),
        ],
    )
    .unwrap()
}

/// Top-down transducer computing the formal derivative with respect to
/// `a`; the second state copies subexpressions unchanged.
pub fn derivative_tdftt() -> TdFtt {
    let input = calculus_input_alphabet();
    let output = RankedAlphabet::new(
        "dexpr",
        &[
            ("a", 0),
            ("b", 0),
            ("0", 0),
            ("1", 0),
            ("-", 1),
            ("sin", 1),
            ("cos", 1),
            ("+", 2),
            ("*", 2),
        ],
    )
    .unwrap();
    let d = |i: usize| OutTree::Call("q".into(), i);
    let id = |i: usize| OutTree::Call("i".into(), i);
    let out = |s: &str, cs: Vec<OutTree>| OutTree::Out(s.to_string(), cs);
    let rule = |state: &str, sym: &str, rank: usize, rhs: OutTree| TdRule {
        state: state.into(),
        sym: sym.into(),
        rank,
        rhs,
        look: BTreeMap::new(),
    };
    let rules = vec![
        rule("q", "+", 2, out("+", vec![d(1), d(2)])),
        rule(
            "q",
            "*",
            2,
            out(
                "+",
                vec![out("*", vec![d(1), id(2)]), out("*", vec![id(1), d(2)])],
            ),
        ),
        rule("q", "-", 1, out("-", vec![d(1)])),
        rule("q", "sin", 1, out("*", vec![out("cos", vec![id(1)]), d(1)])),
        rule(
            "q",
            "cos",
            1,
            out("*", vec![out("-", vec![out("sin", vec![id(1)])]), d(1)]),
        ),
        rule("q", "a", 0, OutTree::leaf("1")),
        rule("q", "b", 0, OutTree::leaf("0")),
        rule("i", "+", 2, out("+", vec![id(1), id(2)])),
        rule("i", "*", 2, out("*", vec![id(1), id(2)])),
        rule("i", "-", 1, out("-", vec![id(1)])),
        rule("i", "sin", 1, out("sin", vec![id(1)])),
        rule("i", "cos", 1, out("cos", vec![id(1)])),
        rule("i", "a", 0, OutTree::leaf("a")),
        rule("i", "b", 0, OutTree::leaf("b")),
    ];
    TdFtt::new(input, output, set(&["q", "i"]), rules, set(&["q"])).unwrap()
}

/// Spine alphabet with binary `a`, unary `b` and leaf `c`.
pub fn tail_alphabet() -> RankedAlphabet {
    RankedAlphabet::new("tail", &[("c", 0), ("b", 1), ("a", 2)]).unwrap()
}

/// Output side of the tail checker: `a` and `b` unary over the leaf `c`.
pub fn tail_output_alphabet() -> RankedAlphabet {
    RankedAlphabet::new("tailout", &[("c", 0), ("a", 1), ("b", 1)]).unwrap()
}

/// Linear deterministic bottom-up transducer realizing
/// `{(a[t c], a[t]) | t a b-spine ending in c}`: it checks that the
/// second child is exactly `c` and deletes it. Checking before deletion
/// is exactly what plain top-down machines cannot do.
pub fn tail_checker_buftt() -> BuFtt {
    let rules = vec![
        BuRule {
            sym: "c".into(),
            child_states: vec![],
            state: "qc".into(),
            rhs: Tree::leaf("c"),
        },
        BuRule {
            sym: "b".into(),
            child_states: vec!["qc".into()],
            state: "qm".into(),
            rhs: Tree::node("b", vec![Tree::var(1)]),
        },
        BuRule {
            sym: "b".into(),
            child_states: vec!["qm".into()],
            state: "qm".into(),
            rhs: Tree::node("b", vec![Tree::var(1)]),
        },
        BuRule {
            sym: "a".into(),
            child_states: vec!["qc".into(), "qc".into()],
            state: "qf".into(),
            rhs: Tree::node("a", vec![Tree::var(1)]),
        },
        BuRule {
            sym: "a".into(),
            child_states: vec!["qm".into(), "qc".into()],
            state: "qf".into(),
            rhs: Tree::node("a", vec![Tree::var(1)]),
        },
    ];
    BuFtt::new(
        tail_alphabet(),
        tail_output_alphabet(),
        set(&["qc", "qm", "qf"]),
        rules,
        set(&["qf"]),
    )
    .unwrap()
}

/// Automaton for the b-spines `{m(bⁿc) | n ≥ 0}` inside [`tail_alphabet`].
pub fn b_spine_automaton() -> NbuFta {
    let mut trans = BTreeMap::new();
    trans.insert(
        ("b".to_string(), vec!["s".to_string()]),
        set(&["s"]),
    );
    NbuFta::new(
        tail_alphabet(),
        set(&["s"]),
        BTreeMap::from([("c".to_string(), set(&["s"]))]),
        trans,
        set(&["s"]),
    )
    .unwrap()
}

/// Automaton for the single tree `{c}` inside [`tail_alphabet`].
pub fn c_only_automaton() -> NbuFta {
    crate::fta::finite_language_fta(&tail_alphabet(), &[Tree::leaf("c")]).unwrap()
}

/// The tail checker as a top-down transducer with regular look-ahead: the
/// deleted second child is guarded by the language `{c}`.
pub fn tail_checker_tdrftt() -> TdrFtt {
    let rules = vec![
        TdRule {
            state: "q0".into(),
            sym: "a".into(),
            rank: 2,
            rhs: OutTree::Out("a".into(), vec![OutTree::Call("q".into(), 1)]),
            look: BTreeMap::from([(1, b_spine_automaton()), (2, c_only_automaton())]),
        },
        TdRule {
            state: "q".into(),
            sym: "b".into(),
            rank: 1,
            rhs: OutTree::Out("b".into(), vec![OutTree::Call("q".into(), 1)]),
            look: BTreeMap::new(),
        },
        TdRule {
            state: "q".into(),
            sym: "c".into(),
            rank: 0,
            rhs: OutTree::leaf("c"),
            look: BTreeMap::new(),
        },
    ];
    TdrFtt::new(
        tail_alphabet(),
        tail_output_alphabet(),
        set(&["q0", "q"]),
        rules,
        set(&["q0"]),
    )
    .unwrap()
}

/// DFA over {a, b} for the regular language `a+b+`.
pub fn a_plus_b_plus_dfa() -> Dfa {
    let alphabet = set(&["a", "b"]);
    let states = set(&["p0", "p1", "p2", "pd"]);
    let mut trans = BTreeMap::new();
    let step = |from: &str, with: &str, to: &str| ((from.to_string(), with.to_string()), to.to_string());
    for (f, w, t) in [
        ("p0", "a", "p1"),
        ("p0", "b", "pd"),
        ("p1", "a", "p1"),
        ("p1", "b", "p2"),
        ("p2", "a", "pd"),
        ("p2", "b", "p2"),
        ("pd", "a", "pd"),
        ("pd", "b", "pd"),
    ] {
        let (k, v) = step(f, w, t);
        trans.insert(k, v);
    }
    Dfa::new(alphabet, states, "p0".to_string(), set(&["p2"]), trans).unwrap()
}
