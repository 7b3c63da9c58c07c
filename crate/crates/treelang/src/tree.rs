//! Ordered ranked labeled trees, optionally with numbered variable leaves,
//! and the basic tree calculus: yield, height, paths, top and tree
//! concatenation, variable substitution and the monadic string codecs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::alphabet::RankedAlphabet;
use crate::error::{Error, Result};

/// A node label: an alphabet symbol or a variable `x1`, `x2`, ...
/// Variables only ever occur at leaves.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Sym(String),
    Var(usize),
}

impl Node {
    pub fn sym(s: impl Into<String>) -> Node {
        Node::Sym(s.into())
    }
}

/// A finite ordered tree. Ground trees contain no variables; trees over
/// `T_Σ(X_k)` may carry variable leaves with index in `1..=k`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tree {
    pub node: Node,
    pub children: Vec<Tree>,
}

/// First well-rankedness violation found in a tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RankViolation {
    /// Symbol used with a child count outside its declared rank set.
    BadRank {
        symbol: String,
        used: usize,
        declared: Vec<usize>,
    },
    /// Symbol absent from the alphabet.
    UnknownSymbol(String),
    /// Variable index out of the declared arity range.
    VarOutOfRange { index: usize, arity: usize },
    /// Variable with children.
    VarWithChildren(usize),
}

impl fmt::Display for RankViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankViolation::BadRank {
                symbol,
                used,
                declared,
            } => write!(
                f,
                "symbol '{symbol}' used with {used} children, declared ranks {declared:?}"
            ),
            RankViolation::UnknownSymbol(s) => write!(f, "unknown symbol '{s}'"),
            RankViolation::VarOutOfRange { index, arity } => {
                write!(f, "variable x{index} exceeds arity {arity}")
            }
            RankViolation::VarWithChildren(i) => write!(f, "variable x{i} has children"),
        }
    }
}

impl Tree {
    pub fn leaf(symbol: impl Into<String>) -> Tree {
        Tree {
            node: Node::Sym(symbol.into()),
            children: Vec::new(),
        }
    }

    pub fn node(symbol: impl Into<String>, children: Vec<Tree>) -> Tree {
        Tree {
            node: Node::Sym(symbol.into()),
            children,
        }
    }

    /// `node` when children are given, a plain leaf otherwise.
    pub fn node_or_leaf(symbol: impl Into<String>, children: Vec<Tree>) -> Tree {
        Tree {
            node: Node::Sym(symbol.into()),
            children,
        }
    }

    pub fn var(index: usize) -> Tree {
        assert!(index >= 1, "variable indices start at 1");
        Tree {
            node: Node::Var(index),
            children: Vec::new(),
        }
    }

    pub fn symbol(&self) -> Option<&str> {
        match &self.node {
            Node::Sym(s) => Some(s),
            Node::Var(_) => None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn is_ground(&self) -> bool {
        match &self.node {
            Node::Var(_) => false,
            Node::Sym(_) => self.children.iter().all(Tree::is_ground),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }

    /// Height: 0 on leaves, 1 + max over children otherwise.
    pub fn height(&self) -> usize {
        self.children
            .iter()
            .map(|c| c.height() + 1)
            .max()
            .unwrap_or(0)
    }

    /// Left-to-right string of leaf symbols, the special leaf `e`
    /// contributing nothing. Variable leaves are rendered as their `x{i}`
    /// name so the map extends to indexed trees.
    pub fn yield_string(&self) -> YieldString {
        let mut out = Vec::new();
        self.collect_yield(&mut out);
        YieldString(out)
    }

    fn collect_yield(&self, out: &mut Vec<String>) {
        if self.children.is_empty() {
            match &self.node {
                Node::Sym(s) if s == "e" => {}
                Node::Sym(s) => out.push(s.clone()),
                Node::Var(i) => out.push(format!("x{i}")),
            }
        } else {
            for c in &self.children {
                c.collect_yield(out);
            }
        }
    }

    /// The set of root-to-leaf label strings.
    pub fn paths(&self) -> BTreeSet<Vec<String>> {
        let label = match &self.node {
            Node::Sym(s) => s.clone(),
            Node::Var(i) => format!("x{i}"),
        };
        if self.children.is_empty() {
            return BTreeSet::from([vec![label]]);
        }
        let mut out = BTreeSet::new();
        for c in &self.children {
            for mut p in c.paths() {
                p.insert(0, label.clone());
                out.insert(p);
            }
        }
        out
    }

    /// Well-rankedness check: every node's child count must be a declared
    /// rank of its symbol, and every variable index must be within `arity`.
    /// Returns the first violation in preorder, or `None`.
    pub fn check_ranked(&self, alphabet: &RankedAlphabet, arity: usize) -> Option<RankViolation> {
        match &self.node {
            Node::Var(i) => {
                if !self.children.is_empty() {
                    return Some(RankViolation::VarWithChildren(*i));
                }
                if *i == 0 || *i > arity {
                    return Some(RankViolation::VarOutOfRange {
                        index: *i,
                        arity,
                    });
                }
                None
            }
            Node::Sym(s) => {
                let Some(declared) = alphabet.ranks_of(s) else {
                    return Some(RankViolation::UnknownSymbol(s.clone()));
                };
                if !declared.contains(&self.children.len()) {
                    return Some(RankViolation::BadRank {
                        symbol: s.clone(),
                        used: self.children.len(),
                        declared: declared.iter().copied().collect(),
                    });
                }
                self.children
                    .iter()
                    .find_map(|c| c.check_ranked(alphabet, arity))
            }
        }
    }

    pub fn is_well_ranked(&self, alphabet: &RankedAlphabet, arity: usize) -> bool {
        self.check_ranked(alphabet, arity).is_none()
    }

    /// Indices of variables occurring in the tree.
    pub fn variables(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match &self.node {
            Node::Var(i) => {
                out.insert(*i);
            }
            Node::Sym(_) => {
                for c in &self.children {
                    c.collect_vars(out);
                }
            }
        }
    }

    /// Occurrence count of variable `i`.
    pub fn var_count(&self, i: usize) -> usize {
        match &self.node {
            Node::Var(j) => usize::from(*j == i),
            Node::Sym(_) => self.children.iter().map(|c| c.var_count(i)).sum(),
        }
    }

    /// Linear w.r.t. `X_k`: each of `x1..xk` occurs at most once.
    pub fn is_linear(&self, arity: usize) -> bool {
        (1..=arity).all(|i| self.var_count(i) <= 1)
    }

    /// Nondeleting w.r.t. `X_k`: each of `x1..xk` occurs at least once.
    pub fn is_nondeleting(&self, arity: usize) -> bool {
        (1..=arity).all(|i| self.var_count(i) >= 1)
    }

    /// Substitutes `images[i-1]` for every occurrence of variable `xi`.
    /// All occurrences of the same variable receive the same tree.
    pub fn subst_vars(&self, images: &[Tree]) -> Tree {
        match &self.node {
            Node::Var(i) if *i >= 1 && *i <= images.len() => images[*i - 1].clone(),
            Node::Var(_) => self.clone(),
            Node::Sym(s) => Tree {
                node: Node::Sym(s.clone()),
                children: self.children.iter().map(|c| c.subst_vars(images)).collect(),
            },
        }
    }

    /// Replaces leaf occurrences of bound keys by their images. Keys are
    /// node labels (rank-0 symbols or variables); only leaves are touched.
    pub fn subst_leaves(&self, bindings: &BTreeMap<Node, Tree>) -> Tree {
        if self.children.is_empty() {
            if let Some(img) = bindings.get(&self.node) {
                return img.clone();
            }
            return self.clone();
        }
        Tree {
            node: self.node.clone(),
            children: self
                .children
                .iter()
                .map(|c| c.subst_leaves(bindings))
                .collect(),
        }
    }

    /// All subtrees (including the tree itself), deduplicated.
    pub fn subtrees(&self) -> BTreeSet<Tree> {
        let mut out = BTreeSet::new();
        self.collect_subtrees(&mut out);
        out
    }

    fn collect_subtrees(&self, out: &mut BTreeSet<Tree>) {
        for c in &self.children {
            c.collect_subtrees(out);
        }
        out.insert(self.clone());
    }

    /// Key for the canonical ordering used in printed output: height first,
    /// then the printed form.
    pub fn canonical_key(&self) -> (usize, String) {
        (self.height(), self.to_string())
    }
}

/// Sorts trees by (height, printed form) and removes duplicates.
pub fn canonical_sort(mut trees: Vec<Tree>) -> Vec<Tree> {
    trees.sort_by_cached_key(Tree::canonical_key);
    trees.dedup();
    trees
}

/// Top concatenation `tc_a^k`: wraps `k ≥ 1` trees under a root `a` of rank `k`.
pub fn top_concat(alphabet: &RankedAlphabet, symbol: &str, trees: Vec<Tree>) -> Result<Tree> {
    let k = trees.len();
    if k == 0 {
        return Err(Error::ill_formed("top_concat", "needs at least one tree"));
    }
    if !alphabet.has_rank(symbol, k) {
        return Err(Error::RankMismatch {
            symbol: symbol.to_string(),
            used: k,
            declared: alphabet
                .ranks_of(symbol)
                .map(|rs| rs.iter().copied().collect())
                .unwrap_or_default(),
        });
    }
    Ok(Tree::node(symbol, trees))
}

/// Tree concatenation `t⟨a1←s1, …, an←sn⟩`: every leaf occurrence of a bound
/// key is replaced by its image. Binding a symbol that also carries a
/// positive rank in the alphabet is rejected, because only rank-0
/// occurrences are substituted and a silent partial substitution would be
/// surprising.
pub fn tree_concat(
    alphabet: &RankedAlphabet,
    t: &Tree,
    bindings: &BTreeMap<Node, Tree>,
) -> Result<Tree> {
    for key in bindings.keys() {
        if let Node::Sym(s) = key {
            if let Some(rs) = alphabet.ranks_of(s) {
                if rs.iter().any(|&k| k > 0) {
                    return Err(Error::ill_formed(
                        "tree_concat",
                        format!("'{s}' also occurs with positive rank; refusing to bind it"),
                    ));
                }
            }
        }
    }
    Ok(t.subst_leaves(bindings))
}

/// Convenience constructor for a single-key binding map.
pub fn binding(key: Node, image: Tree) -> BTreeMap<Node, Tree> {
    BTreeMap::from([(key, image)])
}

/// The yield of a tree: its leaf symbols left to right, `e` elided.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YieldString(pub Vec<String>);

impl YieldString {
    pub fn from_symbols(syms: &[&str]) -> YieldString {
        YieldString(syms.iter().map(|s| s.to_string()).collect())
    }

    /// Splits a compact string into one-character symbols.
    pub fn from_compact(s: &str) -> YieldString {
        YieldString(s.chars().map(|c| c.to_string()).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn symbols(&self) -> &[String] {
        &self.0
    }
}

impl fmt::Display for YieldString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// `m(w)`: encodes a nonempty symbol string as a unary spine whose last
/// symbol is the leaf, e.g. `m(aab) = a[a[b]]`.
pub fn monadic_encode(word: &[String]) -> Result<Tree> {
    match word.split_first() {
        None => Err(Error::ill_formed("monadic_encode", "empty word")),
        Some((head, [])) => Ok(Tree::leaf(head.clone())),
        Some((head, rest)) => Ok(Tree::node(head.clone(), vec![monadic_encode(rest)?])),
    }
}

fn monadic_spine(t: &Tree) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut cur = t;
    loop {
        match (&cur.node, cur.children.len()) {
            (Node::Sym(s), 0) if s == "e" => return Ok(out),
            (Node::Sym(s), 1) => {
                out.push(s.clone());
                cur = &cur.children[0];
            }
            _ => {
                return Err(Error::ill_formed(
                    "monadic_decode",
                    format!("not a monadic tree: {t}"),
                ))
            }
        }
    }
}

/// `f_td`: reads a monadic tree top-down into a string; `f_td(e) = λ`.
pub fn monadic_decode_td(t: &Tree) -> Result<Vec<String>> {
    monadic_spine(t)
}

/// `f_bu`: reads a monadic tree bottom-up into a string.
pub fn monadic_decode_bu(t: &Tree) -> Result<Vec<String>> {
    let mut w = monadic_spine(t)?;
    w.reverse();
    Ok(w)
}

/// Inverse of `f_td`: builds the monadic tree `a1[a2[…[e]]]`.
pub fn monadic_encode_td(word: &[String]) -> Tree {
    let mut t = Tree::leaf("e");
    for s in word.iter().rev() {
        t = Tree::node(s.clone(), vec![t]);
    }
    t
}

/// Inverse of `f_bu`.
pub fn monadic_encode_bu(word: &[String]) -> Tree {
    let rev: Vec<String> = word.iter().rev().cloned().collect();
    monadic_encode_td(&rev)
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.node {
            Node::Var(i) => write!(f, "x{i}")?,
            Node::Sym(s) => write!(f, "{s}")?,
        }
        if !self.children.is_empty() {
            write!(f, "[")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::SplitMix64;
    use crate::parse_term;
    use crate::RankedAlphabet;

    fn alpha(entries: &[(&str, usize)]) -> RankedAlphabet {
        RankedAlphabet::new("t", entries).unwrap()
    }

    #[test]
    fn yields_skip_the_empty_leaf() {
        let t = parse_term("S[A[A[b A[e] a] A[a A[e] b]] D[D[d] d d]]").unwrap();
        assert_eq!(t.yield_string().to_string(), "baabddd");
        assert_eq!(Tree::leaf("e").yield_string(), YieldString::default());
        assert_eq!(
            parse_term("a[b e c]").unwrap().yield_string().to_string(),
            "bc"
        );
    }

    #[test]
    fn heights() {
        assert_eq!(Tree::leaf("a").height(), 0);
        assert_eq!(parse_term("+[-[a -[b]] a]").unwrap().height(), 3);
        let m = monadic_encode(&["a".into(), "a".into(), "b".into()]).unwrap();
        assert_eq!(m.to_string(), "a[a[b]]");
        assert_eq!(m.height(), 2);
        // with the trailing leaf spelled out the spine is one taller
        assert_eq!(monadic_encode_td(&["a".into(), "a".into(), "b".into()]).height(), 3);
    }

    #[test]
    fn paths_of_small_trees() {
        let t = parse_term("a[b b[c c]]").unwrap();
        let want: BTreeSet<Vec<String>> = [vec!["a", "b"], vec!["a", "b", "c"]]
            .iter()
            .map(|p| p.iter().map(|s| s.to_string()).collect())
            .collect();
        assert_eq!(t.paths(), want);
        assert_eq!(Tree::leaf("a").paths().len(), 1);
        let mut rng = SplitMix64::new(11);
        let a = alpha(&[("a", 0), ("b", 0), ("f", 2)]);
        for _ in 0..100 {
            let t = crate::gen::random_tree(&mut rng, &a, 4);
            let paths = t.paths();
            assert!(!paths.is_empty());
            assert!(paths.iter().all(|p| p.len() <= t.height() + 1));
        }
    }

    #[test]
    fn rank_checks_catch_the_first_violation() {
        let a = alpha(&[("a", 0), ("b", 0), ("-", 1), ("-", 2), ("+", 2)]);
        assert!(parse_term("+[a b]").unwrap().is_well_ranked(&a, 0));
        assert!(parse_term("-[a b]").unwrap().is_well_ranked(&a, 0));
        let bad = parse_term("-[a b a]").unwrap();
        assert!(matches!(
            bad.check_ranked(&a, 0),
            Some(RankViolation::BadRank { used: 3, .. })
        ));
        assert!(matches!(
            Tree::var(3).check_ranked(&a, 2),
            Some(RankViolation::VarOutOfRange { index: 3, arity: 2 })
        ));
        assert!(Tree::var(2).is_well_ranked(&a, 2));
    }

    #[test]
    fn top_concatenation_checks_the_rank() {
        let a = alpha(&[("a", 0), ("e", 0), ("b", 2)]);
        let t = top_concat(&a, "b", vec![Tree::leaf("a"), Tree::leaf("a")]).unwrap();
        assert_eq!(t.to_string(), "b[a a]");
        assert!(top_concat(&a, "b", vec![Tree::leaf("a")]).is_err());
        let mut rng = SplitMix64::new(5);
        for _ in 0..50 {
            let l = crate::gen::random_tree(&mut rng, &a, 3);
            let r = crate::gen::random_tree(&mut rng, &a, 3);
            let (hl, hr) = (l.height(), r.height());
            let t = top_concat(&a, "b", vec![l, r]).unwrap();
            assert_eq!(t.height(), 1 + hl.max(hr));
        }
    }

    #[test]
    fn tree_concatenation_replaces_leaves() {
        // x and y here are ordinary rank-0 symbols, not variables
        let a = alpha(&[("x", 0), ("y", 0), ("c", 0), ("b", 2), ("a", 3)]);
        let t = parse_term("a[b[x y] x c]").unwrap();
        let image = tree_concat(
            &a,
            &t,
            &BTreeMap::from([
                (Node::sym("x"), parse_term("b[c x]").unwrap()),
                (Node::sym("y"), Tree::leaf("c")),
            ]),
        )
        .unwrap();
        assert_eq!(image, parse_term("a[b[b[c x] c] b[c x] c]").unwrap());
        // identity binding
        let same = tree_concat(&a, &t, &binding(Node::sym("x"), Tree::leaf("x"))).unwrap();
        assert_eq!(same, t);
    }

    #[test]
    fn tree_concatenation_rejects_positive_rank_keys() {
        let a = alpha(&[("a", 0), ("b", 0), ("b", 2)]);
        let t = parse_term("b[a b]").unwrap();
        assert!(tree_concat(&a, &t, &binding(Node::sym("b"), Tree::leaf("a"))).is_err());
    }

    #[test]
    fn tree_concatenation_is_associative() {
        // (t ·x s) ·x r = t ·x (s ·x r) when the key survives only in s
        let a = alpha(&[("x", 0), ("c", 0), ("b", 2)]);
        let mut rng = SplitMix64::new(23);
        let mut checked = 0;
        for _ in 0..200 {
            let t = crate::gen::random_tree(&mut rng, &a, 3);
            let s = crate::gen::random_tree(&mut rng, &a, 2);
            let r = crate::gen::random_tree(&mut rng, &a, 2);
            let key = binding(Node::sym("x"), s.clone());
            let left = tree_concat(
                &a,
                &tree_concat(&a, &t, &key).unwrap(),
                &binding(Node::sym("x"), r.clone()),
            )
            .unwrap();
            let inner = tree_concat(&a, &s, &binding(Node::sym("x"), r.clone())).unwrap();
            let right = tree_concat(&a, &t, &binding(Node::sym("x"), inner)).unwrap();
            assert_eq!(left, right);
            checked += 1;
            if checked >= 50 {
                break;
            }
        }
    }

    #[test]
    fn yield_of_concatenation_is_string_substitution() {
        let a = alpha(&[("x", 0), ("c", 0), ("d", 0), ("b", 2)]);
        let mut rng = SplitMix64::new(77);
        for _ in 0..50 {
            let t = crate::gen::random_tree(&mut rng, &a, 3);
            let s = crate::gen::random_tree(&mut rng, &a, 2);
            let image = tree_concat(&a, &t, &binding(Node::sym("x"), s.clone())).unwrap();
            let direct = image.yield_string().0;
            let substituted: Vec<String> = t
                .yield_string()
                .0
                .into_iter()
                .flat_map(|sym| {
                    if sym == "x" {
                        s.yield_string().0
                    } else {
                        vec![sym]
                    }
                })
                .collect();
            assert_eq!(direct, substituted);
        }
    }

    #[test]
    fn monadic_codecs_are_mutually_inverse() {
        let t = parse_term("a[b[c[b[e]]]]").unwrap();
        assert_eq!(monadic_decode_td(&t).unwrap().join(""), "abcb");
        assert_eq!(monadic_decode_bu(&t).unwrap().join(""), "bcba");
        assert_eq!(monadic_decode_td(&Tree::leaf("e")).unwrap(), Vec::<String>::new());
        assert!(monadic_decode_td(&parse_term("b[a a]").unwrap()).is_err());
        // bijective on all strings up to length 4
        let letters = ["a", "b", "c"];
        let mut words: Vec<Vec<String>> = vec![Vec::new()];
        for _ in 0..4 {
            let mut next = Vec::new();
            for w in &words {
                for l in letters {
                    let mut v = w.clone();
                    v.push(l.to_string());
                    next.push(v);
                }
            }
            words.extend(next.clone());
            words = {
                let mut all = words.clone();
                all.dedup();
                all
            };
        }
        for w in words.iter().take(200) {
            assert_eq!(&monadic_decode_td(&monadic_encode_td(w)).unwrap(), w);
            assert_eq!(&monadic_decode_bu(&monadic_encode_bu(w)).unwrap(), w);
        }
    }

    #[test]
    fn branching_trees_have_long_yields() {
        // over alphabets without e and without unary symbols, the height
        // stays below the yield length
        let a = alpha(&[("a", 0), ("b", 0), ("f", 2), ("g", 3)]);
        for t in crate::enumerate::enumerate_trees(&a, 2, 500_000).unwrap() {
            assert!(t.height() < t.yield_string().len(), "tree {t}");
        }
    }
}
