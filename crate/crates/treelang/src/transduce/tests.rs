use std::collections::BTreeSet;

use super::*;
use crate::enumerate::enumerate_trees;
use crate::gen::SplitMix64;
use crate::langops::apply_hom;
use crate::parse_term;
use crate::samples::*;
use crate::tree::Tree;

fn image(m: &BuFtt, t: &Tree) -> BTreeSet<Tree> {
    m.apply(t).unwrap().image
}

fn image_td(m: &TdFtt, t: &Tree) -> BTreeSet<Tree> {
    m.apply(t).unwrap().image
}

fn trees(alpha: &crate::RankedAlphabet, h: usize) -> Vec<Tree> {
    enumerate_trees(alpha, h, 100_000).unwrap()
}

fn set_of(ts: &[&str]) -> BTreeSet<Tree> {
    ts.iter().map(|s| parse_term(s).unwrap()).collect()
}

#[test]
fn doubling_transducer_golden_image() {
    let m = doubling_buftt();
    let got = image(&m, &parse_term("b[b[a]]").unwrap());
    assert_eq!(got, set_of(&["b[b[a a] b[a a]]"]));
}

#[test]
fn derivative_golden_image() {
    let m = derivative_tdftt();
    let t = parse_term("*[+[a b] -[a]]").unwrap();
    let applied = m.apply(&t).unwrap();
    let want = parse_term("+[*[+[1 0] -[a]] *[+[a b] -[1]]]").unwrap();
    assert_eq!(applied.by_state["q"], BTreeSet::from([want.clone()]));
    assert_eq!(applied.image, BTreeSet::from([want]));
    // the identity state reproduces the input
    assert_eq!(applied.by_state["i"], BTreeSet::from([t]));
}

#[test]
fn relabel_then_copy_produces_all_agreeing_pairs() {
    let m = relabel_then_copy_buftt();
    // f over a spine of two a's: all words w in {a,b}^2, both copies equal
    let t = parse_term("f[a[a[e]]]").unwrap();
    let got = image(&m, &t);
    assert_eq!(
        got,
        set_of(&[
            "f[a[a[e]] a[a[e]]]",
            "f[a[b[e]] a[b[e]]]",
            "f[b[a[e]] b[a[e]]]",
            "f[b[b[e]] b[b[e]]]",
        ])
    );
}

#[test]
fn copy_then_relabel_produces_all_pairs() {
    let m = copy_then_relabel_tdftt();
    let t = parse_term("f[a[e]]").unwrap();
    let got = image_td(&m, &t);
    // copies relabel independently: all four pairs
    assert_eq!(
        got,
        set_of(&["f[a[e] a[e]]", "f[a[e] b[e]]", "f[b[e] a[e]]", "f[b[e] b[e]]"])
    );
}

#[test]
fn lookahead_guards_restrict_rules() {
    let m = tail_checker_tdrftt();
    let ok = parse_term("a[b[b[c]] c]").unwrap();
    assert_eq!(m.apply(&ok).unwrap().image, set_of(&["a[b[b[c]]]"]));
    // second child not exactly c: no output
    let bad = parse_term("a[b[c] b[c]]").unwrap();
    assert!(m.apply(&bad).unwrap().image.is_empty());
}

#[test]
fn classification_of_the_fixtures() {
    let f = classify(&relabel_then_copy_buftt());
    assert!(f.pure && f.nondeleting && !f.linear && !f.deterministic);

    let f = classify_td(&copy_then_relabel_tdftt().to_lookahead()).unwrap();
    assert!(f.pure && f.nondeleting && !f.linear && !f.deterministic);

    let f = classify_td(&derivative_tdftt().to_lookahead()).unwrap();
    assert!(f.deterministic && f.total_deterministic && !f.linear);

    let f = classify(&tail_checker_buftt());
    assert!(f.linear && f.deterministic && !f.total_deterministic && !f.nondeleting);

    let f = classify_td(&tail_checker_tdrftt()).unwrap();
    assert!(f.linear && f.deterministic);

    let f = classify(&doubling_buftt());
    assert!(f.pure && f.total_deterministic && !f.linear);
}

#[test]
fn lookahead_determinism_needs_disjoint_guards() {
    // two rules on the same left side, distinguished only by look-ahead
    let base = tail_checker_tdrftt();
    let mut rules = base.rules.clone();
    rules.push(TdRule {
        state: "q0".into(),
        sym: "a".into(),
        rank: 2,
        rhs: OutTree::Out("b".into(), vec![OutTree::Call("q".into(), 1)]),
        look: std::collections::BTreeMap::from([(2, b_spine_automaton())]),
    });
    let overlapping = TdrFtt::new(
        base.input.clone(),
        base.output.clone(),
        base.states.clone(),
        rules.clone(),
        base.initials.clone(),
    )
    .unwrap();
    // {c} and the spine language intersect at c, so not deterministic
    assert!(!classify_td(&overlapping).unwrap().deterministic);

    // restrict the new rule to spines with at least one b: disjoint now
    let one_b = {
        let mut a = b_spine_automaton();
        a.states.insert("s1".to_string());
        a.trans.insert(
            ("b".to_string(), vec!["s".to_string()]),
            BTreeSet::from(["s".to_string(), "s1".to_string()]),
        );
        a.finals = BTreeSet::from(["s1".to_string()]);
        a
    };
    rules.last_mut().unwrap().look.insert(2, one_b);
    let disjoint = TdrFtt::new(
        base.input.clone(),
        base.output.clone(),
        base.states.clone(),
        rules,
        base.initials.clone(),
    )
    .unwrap();
    assert!(classify_td(&disjoint).unwrap().deterministic);
}

#[test]
fn hom_embedding_realizes_the_hom() {
    let h = doubling_hom();
    let bu = embed_hom_bu(&h);
    let td = embed_hom_td(&h);
    for t in trees(&h.source, 3) {
        let want = BTreeSet::from([apply_hom(&h, &t).unwrap()]);
        assert_eq!(image(&bu, &t), want);
        assert_eq!(image_td(&td, &t), want);
    }
    assert_eq!(extract_hom_bu(&bu).unwrap(), h);
    assert_eq!(extract_hom_td(&td).unwrap(), h);
}

#[test]
fn fta_embedding_is_the_identity_restriction() {
    let a = right_comb_automaton().to_nondet();
    let bu = embed_fta_bu(&a);
    let td = embed_fta_td(&a);
    for t in trees(&a.alphabet, 3) {
        let want = if a.accepts(&t) {
            BTreeSet::from([t.clone()])
        } else {
            BTreeSet::new()
        };
        assert_eq!(image(&bu, &t), want, "bu on {t}");
        assert_eq!(image_td(&td, &t), want, "td on {t}");
    }
}

#[test]
fn relabeling_embedding_matches_pointwise_application() {
    let (p, _) = crate::grammar::bare_projection(
        &crate::RankedAlphabet::new("d", &[("a", 0), ("b", 0), ("S", 2)]).unwrap(),
    )
    .unwrap();
    let bu = embed_relabeling_bu(&p);
    let td = embed_relabeling_td(&p);
    for t in trees(&p.source, 2) {
        let want: BTreeSet<Tree> = crate::langops::apply_relabeling(&p, &t).unwrap();
        assert_eq!(image(&bu, &t), want);
        assert_eq!(image_td(&td, &t), want);
    }
}

#[test]
fn extract_hom_rejects_stateful_machines() {
    assert!(extract_hom_bu(&tail_checker_buftt()).is_err());
    assert!(extract_hom_td(&derivative_tdftt()).is_err());
}

#[test]
fn association_preserves_the_transformation() {
    // nondeleting linear fixture: the identity restriction of a comb
    let m = embed_fta_bu(&right_comb_automaton().to_nondet());
    let td = nlb_to_nlt(&m).unwrap();
    for t in trees(&m.input, 3) {
        assert_eq!(image(&m, &t), image_td(&td, &t), "tree {t}");
    }
    let back = nlt_to_nlb(&td).unwrap();
    for t in trees(&m.input, 3) {
        assert_eq!(image(&m, &t), image(&back, &t));
    }
}

#[test]
fn identity_converts_to_identity() {
    let alpha = ab_alphabet();
    let id_hom = crate::langops::TreeHom::identity(&alpha);
    let td = embed_hom_td(&id_hom);
    let lb = lt_to_lb(&td).unwrap();
    let ltr = lb_to_ltr(&lb).unwrap();
    for t in trees(&alpha, 2) {
        assert_eq!(image(&lb, &t), BTreeSet::from([t.clone()]));
        assert_eq!(ltr.apply(&t).unwrap().image, BTreeSet::from([t.clone()]));
    }
}

#[test]
fn linear_topdown_moves_to_bottom_up() {
    let alpha = ab_alphabet();
    // copying machine: lt_to_lb must refuse
    let copier = TdFtt::new(
        alpha.clone(),
        alpha.clone(),
        BTreeSet::from(["p".to_string()]),
        vec![
            TdRule {
                state: "p".into(),
                sym: "b".into(),
                rank: 2,
                rhs: OutTree::Out(
                    "b".into(),
                    vec![OutTree::Call("p".into(), 1), OutTree::Call("p".into(), 1)],
                ),
                look: Default::default(),
            },
            TdRule {
                state: "p".into(),
                sym: "a".into(),
                rank: 0,
                rhs: OutTree::leaf("a"),
                look: Default::default(),
            },
        ],
        BTreeSet::from(["p".to_string()]),
    )
    .unwrap();
    assert!(lt_to_lb(&copier).is_err());

    let keep_left = TdFtt::new(
        alpha.clone(),
        alpha.clone(),
        BTreeSet::from(["p".to_string()]),
        vec![
            TdRule {
                state: "p".into(),
                sym: "b".into(),
                rank: 2,
                rhs: OutTree::Call("p".into(), 1),
                look: Default::default(),
            },
            TdRule {
                state: "p".into(),
                sym: "a".into(),
                rank: 0,
                rhs: OutTree::leaf("a"),
                look: Default::default(),
            },
        ],
        BTreeSet::from(["p".to_string()]),
    )
    .unwrap();
    let lb = lt_to_lb(&keep_left).unwrap();
    for t in trees(&alpha, 3) {
        assert_eq!(image(&lb, &t), image_td(&keep_left, &t), "tree {t}");
    }
}

#[test]
fn lookahead_installation_matches_the_fixture() {
    // moving the tail checker up gives the look-ahead machine, up to
    // state naming: compare pointwise
    let ltr = lb_to_ltr(&tail_checker_buftt()).unwrap();
    let fixture = tail_checker_tdrftt();
    for t in trees(&tail_alphabet(), 4) {
        let got = ltr.apply(&t).unwrap().image;
        assert_eq!(got, fixture.apply(&t).unwrap().image, "tree {t}");
        assert_eq!(got, image(&tail_checker_buftt(), &t), "tree {t}");
    }
}

#[test]
fn qrel_hom_decomposition_reproduces_the_worked_alphabet() {
    let m = path_doubler_buftt();
    let (qrel, hom) = decompose_bu_qrel_hom(&m).unwrap();
    assert!(classify(&qrel).qrel);
    // the piece alphabet: leaves keep their names, inner pieces take
    // root-indexed names
    let mut pairs = qrel.output.pairs();
    pairs.sort();
    assert_eq!(
        pairs,
        vec![("a", 0), ("b", 0), ("m1", 2), ("m2", 2), ("n1", 2), ("n2", 2)]
    );
    assert_eq!(
        hom.image_of("m1", 2).unwrap(),
        &Tree::node("m", vec![Tree::var(1), Tree::var(1)])
    );
    assert_eq!(
        hom.image_of("m2", 2).unwrap(),
        &Tree::node("m", vec![Tree::var(2), Tree::var(2)])
    );
    // pointwise equality of the composition
    for t in trees(&m.input, 2) {
        let mut composed = BTreeSet::new();
        for u in image(&qrel, &t) {
            composed.insert(apply_hom(&hom, &u).unwrap());
        }
        assert_eq!(composed, image(&m, &t), "tree {t}");
    }
    let t = parse_term("f[f[a b] g[a b]]").unwrap();
    assert!(image(&m, &t).contains(&parse_term("m[n[b b] n[b b]]").unwrap()));
}

#[test]
fn qrel_splits_into_rel_fta_proj() {
    let m = path_doubler_buftt();
    let (qrel, _) = decompose_bu_qrel_hom(&m).unwrap();
    let (rel, fta, proj) = decompose_qrel_rel_fta_proj(&qrel).unwrap();
    assert!(proj.is_projection());
    for t in trees(&m.input, 2) {
        let mut composed = BTreeSet::new();
        for u in crate::langops::apply_relabeling(&rel, &t).unwrap() {
            if fta.accepts(&u) {
                composed.extend(crate::langops::apply_relabeling(&proj, &u).unwrap());
            }
        }
        assert_eq!(composed, image(&qrel, &t), "tree {t}");
    }
}

#[test]
fn copy_decomposition_reproduces_the_worked_hom() {
    let m = derivative_tdftt();
    let (hom, lt) = decompose_td_copy_hom_lt(&m).unwrap();
    assert_eq!(
        hom.image_of("+", 2).unwrap(),
        &Tree::node(
            "+",
            vec![Tree::var(1), Tree::var(1), Tree::var(2), Tree::var(2)]
        )
    );
    let flags = classify_td(&lt.to_lookahead()).unwrap();
    assert!(flags.linear && flags.deterministic);
    for t in trees(&m.input, 2).into_iter().take(60) {
        let copied = apply_hom(&hom, &t).unwrap();
        assert_eq!(image_td(&lt, &copied), image_td(&m, &t), "tree {t}");
    }
}

#[test]
fn ldt_decomposition_is_pointwise_correct() {
    // linear deterministic: keep the left subtree under a fresh unary w
    let input = ab_alphabet();
    let output = crate::RankedAlphabet::new("out", &[("a", 0), ("w", 1)]).unwrap();
    let m = TdFtt::new(
        input.clone(),
        output,
        BTreeSet::from(["p".to_string()]),
        vec![
            TdRule {
                state: "p".into(),
                sym: "b".into(),
                rank: 2,
                rhs: OutTree::Out("w".into(), vec![OutTree::Call("p".into(), 1)]),
                look: Default::default(),
            },
            TdRule {
                state: "p".into(),
                sym: "a".into(),
                rank: 0,
                rhs: OutTree::leaf("a"),
                look: Default::default(),
            },
        ],
        BTreeSet::from(["p".to_string()]),
    )
    .unwrap();
    let (qrel, lhom) = decompose_ldt_qrel_lhom(&m).unwrap();
    assert!(lhom.is_linear());
    let fq = classify_td(&qrel.to_lookahead()).unwrap();
    assert!(fq.qrel && fq.deterministic);
    for t in trees(&input, 3) {
        let mut composed = BTreeSet::new();
        for u in image_td(&qrel, &t) {
            composed.insert(apply_hom(&lhom, &u).unwrap());
        }
        assert_eq!(composed, image_td(&m, &t), "tree {t}");
    }
}

#[test]
fn lookahead_removal_is_pointwise_correct() {
    let m = tail_checker_tdrftt();
    let (relabeler, td) = decompose_tdr_remove_lookahead(&m).unwrap();
    let fr = classify(&relabeler);
    assert!(fr.qrel && fr.deterministic && fr.total_deterministic);
    for t in trees(&m.input, 4) {
        let mut composed = BTreeSet::new();
        for u in image(&relabeler, &t) {
            composed.extend(image_td(&td, &u));
        }
        assert_eq!(composed, m.apply(&t).unwrap().image, "tree {t}");
    }
}

#[test]
fn bit_annotations_match_direct_membership() {
    let m = tail_checker_tdrftt();
    let (relabeler, _) = decompose_tdr_remove_lookahead(&m).unwrap();
    let spine = b_spine_automaton();
    let only_c = c_only_automaton();
    for t in trees(&m.input, 3) {
        for u in image(&relabeler, &t) {
            check_bits(&t, &u, &spine, &only_c);
        }
    }
    // the annotation of each node carries the membership of its children
    // in the look-ahead languages, in collection order
    fn check_bits(
        t: &Tree,
        u: &Tree,
        spine: &crate::fta::NbuFta,
        only_c: &crate::fta::NbuFta,
    ) {
        if !t.children.is_empty() {
            let label = u.symbol().unwrap();
            let parts: Vec<&str> = label.split('.').collect();
            assert_eq!(parts.len(), 1 + t.children.len());
            for (i, c) in t.children.iter().enumerate() {
                let bits = parts[1 + i];
                assert_eq!(bits.len(), 2);
                let want = format!(
                    "{}{}",
                    u8::from(spine.accepts(c)),
                    u8::from(only_c.accepts(c)),
                );
                assert_eq!(bits, want, "child {i} of {t}");
            }
        }
        for (tc, uc) in t.children.iter().zip(&u.children) {
            check_bits(tc, uc, spine, only_c);
        }
    }
}

#[test]
fn bu_composition_with_identity_restriction() {
    let m = path_doubler_buftt();
    let all = crate::fta::NbuFta::universal(&m.output);
    let composed = compose_bu_with_fta(&m, &all).unwrap();
    for t in trees(&m.input, 2) {
        assert_eq!(image(&composed, &t), image(&m, &t));
    }
}

#[test]
fn bu_composition_with_hom_is_pointwise() {
    let m = relabel_then_copy_buftt();
    // hom over the output alphabet: merge b back into a
    let mut map = std::collections::BTreeMap::new();
    map.insert(("e".to_string(), 0), Tree::leaf("e"));
    map.insert(("a".to_string(), 1), Tree::node("a", vec![Tree::var(1)]));
    map.insert(("b".to_string(), 1), Tree::node("a", vec![Tree::var(1)]));
    map.insert(
        ("f".to_string(), 2),
        Tree::node("f", vec![Tree::var(1), Tree::var(2)]),
    );
    let h = crate::langops::TreeHom::new(spine_abf_alphabet(), spine_abf_alphabet(), map).unwrap();
    let composed = compose_bu_with_hom(&m, &h).unwrap();
    for t in trees(&m.input, 3) {
        let want: BTreeSet<Tree> = image(&m, &t)
            .iter()
            .map(|u| apply_hom(&h, u).unwrap())
            .collect();
        assert_eq!(image(&composed, &t), want, "tree {t}");
    }
}

#[test]
fn linear_bu_composes_with_arbitrary_bu() {
    let mut rng = SplitMix64::new(0x600d);
    let alpha = spine_af_alphabet();
    let mid = spine_abf_alphabet();
    for round in 0..10 {
        let m = crate::gen::random_buftt(&mut rng, &alpha, &mid, 2, true, false);
        let n = crate::gen::random_buftt(&mut rng, &mid, &alpha, 2, false, false);
        let composed = compose_bu(&m, &n).unwrap();
        for t in trees(&alpha, 2) {
            let mut want = BTreeSet::new();
            for u in image(&m, &t) {
                want.extend(image(&n, &u));
            }
            assert_eq!(image(&composed, &t), want, "round {round} tree {t}");
        }
    }
}

#[test]
fn bu_composes_with_deterministic_bu() {
    let mut rng = SplitMix64::new(0xdead);
    let alpha = spine_af_alphabet();
    let mid = spine_abf_alphabet();
    for round in 0..10 {
        let m = crate::gen::random_buftt(&mut rng, &alpha, &mid, 2, false, false);
        let n = crate::gen::random_buftt(&mut rng, &mid, &alpha, 2, false, true);
        let composed = compose_bu(&m, &n).unwrap();
        for t in trees(&alpha, 2) {
            let mut want = BTreeSet::new();
            for u in image(&m, &t) {
                want.extend(image(&n, &u));
            }
            assert_eq!(image(&composed, &t), want, "round {round} tree {t}");
        }
    }
}

#[test]
fn tdr_composition_with_identity() {
    let m = tail_checker_tdrftt();
    let id = embed_hom_td(&crate::langops::TreeHom::identity(&m.output)).to_lookahead();
    let composed = compose_tdr(&m, &id).unwrap();
    for t in trees(&m.input, 3) {
        assert_eq!(
            composed.apply(&t).unwrap().image,
            m.apply(&t).unwrap().image
        );
    }
}

#[test]
fn deterministic_tdr_composition_stays_deterministic() {
    let m = derivative_tdftt().to_lookahead();
    let id = crate::langops::TreeHom::identity(&derivative_tdftt().output);
    let n = embed_hom_td(&id).to_lookahead();
    let composed = compose_tdr(&m, &n).unwrap();
    assert!(classify_td(&composed).unwrap().deterministic);
    for t in trees(&m.input, 2).into_iter().take(40) {
        let mut want = BTreeSet::new();
        for u in m.apply(&t).unwrap().image {
            want.extend(n.apply(&u).unwrap().image);
        }
        assert_eq!(composed.apply(&t).unwrap().image, want, "tree {t}");
    }
}

#[test]
fn checking_then_deleting_composes_with_lookahead() {
    // the pair that defeats plain top-down machines: an identity check of
    // the input shape followed by a deleting linear hom
    let alpha = tail_alphabet();
    let checker = {
        // accepts exactly a[t c] with t a b-spine: sc = bare c, sp = spine
        let mut trans = std::collections::BTreeMap::new();
        trans.insert(
            ("b".to_string(), vec!["sc".to_string()]),
            BTreeSet::from(["sp".to_string()]),
        );
        trans.insert(
            ("b".to_string(), vec!["sp".to_string()]),
            BTreeSet::from(["sp".to_string()]),
        );
        trans.insert(
            ("a".to_string(), vec!["sc".to_string(), "sc".to_string()]),
            BTreeSet::from(["top".to_string()]),
        );
        trans.insert(
            ("a".to_string(), vec!["sp".to_string(), "sc".to_string()]),
            BTreeSet::from(["top".to_string()]),
        );
        let a = crate::fta::NbuFta::new(
            alpha.clone(),
            BTreeSet::from(["sc".to_string(), "sp".to_string(), "top".to_string()]),
            std::collections::BTreeMap::from([(
                "c".to_string(),
                BTreeSet::from(["sc".to_string()]),
            )]),
            trans,
            BTreeSet::from(["top".to_string()]),
        )
        .unwrap();
        embed_fta_td(&a).to_lookahead()
    };
    let dropper = {
        let mut map = std::collections::BTreeMap::new();
        map.insert(("c".to_string(), 0), Tree::leaf("c"));
        map.insert(("b".to_string(), 1), Tree::node("b", vec![Tree::var(1)]));
        map.insert(("a".to_string(), 2), Tree::node("a", vec![Tree::var(1)]));
        let h = crate::langops::TreeHom::new(alpha.clone(), tail_output_alphabet(), map).unwrap();
        embed_hom_td(&h).to_lookahead()
    };
    let composed = compose_tdr(&checker, &dropper).unwrap();
    let fixture = tail_checker_tdrftt();
    for t in trees(&alpha, 4) {
        assert_eq!(
            composed.apply(&t).unwrap().image,
            fixture.apply(&t).unwrap().image,
            "tree {t}"
        );
    }
}

#[test]
fn domain_of_path_doubler_excludes_odd_paths() {
    let m = path_doubler_buftt();
    let dom = domain_of_bu(&m);
    // g[a b] reaches q1 only, which is not final
    assert!(!dom.accepts(&parse_term("g[a b]").unwrap()));
    for t in trees(&m.input, 2) {
        assert_eq!(dom.accepts(&t), !image(&m, &t).is_empty(), "tree {t}");
    }
}

#[test]
fn domain_of_total_deterministic_is_everything() {
    let m = doubling_buftt();
    let dom = domain_of_bu(&m);
    for t in trees(&m.input, 3) {
        assert!(dom.accepts(&t));
    }
}

#[test]
fn domain_of_lookahead_machine() {
    let m = tail_checker_tdrftt();
    let dom = domain_of_tdr(&m).unwrap();
    for t in trees(&m.input, 4) {
        assert_eq!(
            dom.accepts(&t),
            !m.apply(&t).unwrap().image.is_empty(),
            "tree {t}"
        );
    }
}

#[test]
fn inverse_images_through_the_transducer() {
    let m = doubling_buftt();
    let all = crate::fta::NbuFta::universal(&m.output);
    let inv = inverse_image(&m, &all).unwrap();
    for t in trees(&m.input, 3) {
        assert!(inv.accepts(&t));
    }
    // trees of height ≤ 2 as outputs: only short spines double into them
    let low: Vec<Tree> = trees(&m.output, 2);
    let low_fta = crate::fta::finite_language_fta(&m.output, &low).unwrap();
    let inv = inverse_image(&m, &low_fta).unwrap();
    for t in trees(&m.input, 3) {
        let images = image(&m, &t);
        let want = !images.is_empty() && images.iter().all(|u| u.height() <= 2);
        assert_eq!(inv.accepts(&t), want, "tree {t}");
    }
}

#[test]
fn chains_normalize_to_both_targets() {
    let td_stage = Stage::Td(derivative_tdftt());
    let bu_chain = normalize_chain(std::slice::from_ref(&td_stage), ChainTarget::Bu).unwrap();
    assert_eq!(bu_chain.len(), 2);
    assert!(bu_chain.iter().all(|s| matches!(s, Stage::Bu(_))));
    let bu_stage = Stage::Bu(tail_checker_buftt());
    let tdr_chain = normalize_chain(std::slice::from_ref(&bu_stage), ChainTarget::Tdr).unwrap();
    assert!(tdr_chain.iter().all(|s| matches!(s, Stage::Tdr(_))));
    // pointwise equality through the chains
    for t in trees(&derivative_tdftt().input, 2).into_iter().take(25) {
        let direct = derivative_tdftt().apply(&t).unwrap().image;
        let mut through = BTreeSet::from([t.clone()]);
        for s in &bu_chain {
            through = s.apply_set(&through).unwrap();
        }
        assert_eq!(through, direct, "tree {t}");
    }
    for t in trees(&tail_alphabet(), 3) {
        let direct = image(&tail_checker_buftt(), &t);
        let mut through = BTreeSet::from([t.clone()]);
        for s in &tdr_chain {
            through = s.apply_set(&through).unwrap();
        }
        assert_eq!(through, direct, "tree {t}");
    }
    assert!(normalize_chain(&[], ChainTarget::Bu).unwrap().is_empty());
}

#[test]
fn deterministic_images_are_singletons() {
    let m = derivative_tdftt();
    for t in trees(&m.input, 2).into_iter().take(40) {
        assert_eq!(m.apply(&t).unwrap().image.len(), 1);
    }
    let d = doubling_buftt();
    for t in trees(&d.input, 3) {
        assert_eq!(image(&d, &t).len(), 1);
    }
}

#[test]
fn output_cap_is_enforced() {
    let m = copy_then_relabel_tdftt();
    // a tall spine has exponentially many images
    let mut word: Vec<String> = vec!["f".into()];
    word.extend(std::iter::repeat_n("a".to_string(), 7));
    let t = crate::tree::monadic_encode_td(&word);
    assert!(matches!(
        m.apply_with_cap(&t, 10),
        Err(crate::Error::CapExceeded { .. })
    ));
}
