//! Regular tree grammars and context-free string grammars: normal form,
//! the automaton correspondence, the yield bridge between tree and string
//! languages, derivation / rule / bare trees, and structural equivalence.

use std::collections::{BTreeMap, BTreeSet};

use crate::alphabet::{validate_symbol, RankedAlphabet};
use crate::error::{Error, Result};
use crate::fta::{self, NbuFta};
use crate::tree::{canonical_sort, Tree};

/// A regular tree grammar: nonterminals of rank 0 rewriting to trees over
/// terminals and nonterminals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rtg {
    pub nonterminals: BTreeSet<String>,
    pub terminals: RankedAlphabet,
    pub rules: Vec<RtgRule>,
    pub start: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RtgRule {
    pub lhs: String,
    pub rhs: Tree,
}

impl RtgRule {
    pub fn new(lhs: impl Into<String>, rhs: Tree) -> RtgRule {
        RtgRule {
            lhs: lhs.into(),
            rhs,
        }
    }
}

impl Rtg {
    pub fn new(
        nonterminals: BTreeSet<String>,
        terminals: RankedAlphabet,
        rules: Vec<RtgRule>,
        start: String,
    ) -> Result<Rtg> {
        let mut g = Rtg {
            nonterminals,
            terminals,
            rules,
            start,
        };
        g.dedup_rules();
        g.validate()?;
        Ok(g)
    }

    fn dedup_rules(&mut self) {
        let mut seen = BTreeSet::new();
        self.rules.retain(|r| seen.insert(r.clone()));
    }

    fn validate(&self) -> Result<()> {
        for n in &self.nonterminals {
            validate_symbol(n)?;
            if self.terminals.contains(n) {
                return Err(Error::ill_formed(
                    "rtg",
                    format!("'{n}' is both a terminal and a nonterminal"),
                ));
            }
        }
        if !self.nonterminals.contains(&self.start) {
            return Err(Error::ill_formed("rtg", "undeclared start nonterminal"));
        }
        let ext = self.extended_alphabet();
        for r in &self.rules {
            if !self.nonterminals.contains(&r.lhs) {
                return Err(Error::ill_formed(
                    "rtg",
                    format!("rule for undeclared nonterminal '{}'", r.lhs),
                ));
            }
            if let Some(v) = r.rhs.check_ranked(&ext, 0) {
                return Err(Error::ill_formed("rtg", format!("rule {}: {v}", r.lhs)));
            }
        }
        Ok(())
    }

    /// Terminals plus the nonterminals at rank 0.
    pub fn extended_alphabet(&self) -> RankedAlphabet {
        let mut ext = self.terminals.clone();
        for n in &self.nonterminals {
            ext.add(n, 0).expect("validated nonterminal name");
        }
        ext
    }

    pub fn is_nonterminal_leaf<'a>(&self, t: &'a Tree) -> Option<&'a str> {
        if t.children.is_empty() {
            if let Some(s) = t.symbol() {
                if self.nonterminals.contains(s) {
                    return Some(s);
                }
            }
        }
        None
    }

    /// Rule right sides in normal form are `a[B1…Bk]` or a rank-0 terminal.
    pub fn is_normal_form(&self) -> bool {
        self.rules.iter().all(|r| {
            if self.is_nonterminal_leaf(&r.rhs).is_some() {
                return false;
            }
            if r.rhs.children.is_empty() {
                return true;
            }
            r.rhs
                .children
                .iter()
                .all(|c| self.is_nonterminal_leaf(c).is_some())
        })
    }

    pub fn rules_of<'a>(&'a self, n: &'a str) -> impl Iterator<Item = &'a RtgRule> {
        self.rules.iter().filter(move |r| r.lhs == n)
    }
}

/// Deterministic fresh-name helper: `base_i` with a running counter,
/// skipping anything already taken.
pub(crate) struct FreshNames {
    taken: BTreeSet<String>,
    counter: usize,
    per_base: BTreeMap<String, usize>,
}

impl FreshNames {
    pub fn new<I: IntoIterator<Item = String>>(taken: I) -> FreshNames {
        FreshNames {
            taken: taken.into_iter().collect(),
            counter: 1,
            per_base: BTreeMap::new(),
        }
    }

    /// `base1`, `base2`, … with a per-base counter; used where compact
    /// numbered families are the convention (rule names, output pieces).
    pub fn indexed(&mut self, base: &str) -> String {
        let base = Self::sanitize(base);
        let counter = self.per_base.entry(base.clone()).or_insert(0);
        loop {
            *counter += 1;
            let cand = format!("{base}{counter}");
            if !self.taken.contains(&cand) && validate_symbol(&cand).is_ok() {
                self.taken.insert(cand.clone());
                return cand;
            }
        }
    }

    /// Maps characters outside the symbol charset to underscores so that
    /// machine-made names (subset or pair states) stay usable.
    fn sanitize(base: &str) -> String {
        let cleaned: String = base
            .chars()
            .map(|c| if crate::alphabet::is_symbol_char(c) { c } else { '_' })
            .collect();
        if cleaned.is_empty() || validate_symbol(&cleaned).is_err() {
            format!("n{cleaned}")
        } else {
            cleaned
        }
    }

    pub fn fresh(&mut self, base: &str) -> String {
        let base = Self::sanitize(base);
        loop {
            let cand = format!("{base}_{}", self.counter);
            self.counter += 1;
            if !self.taken.contains(&cand) && validate_symbol(&cand).is_ok() {
                self.taken.insert(cand.clone());
                return cand;
            }
        }
    }

    /// The base itself when free and well-formed, otherwise `base_i`.
    pub fn prefer(&mut self, base: &str) -> String {
        if !self.taken.contains(base) && validate_symbol(base).is_ok() {
            self.taken.insert(base.to_string());
            return base.to_string();
        }
        let cleaned = Self::sanitize(base);
        if !self.taken.contains(&cleaned) && validate_symbol(&cleaned).is_ok() {
            self.taken.insert(cleaned.clone());
            return cleaned;
        }
        self.fresh(&cleaned)
    }
}

/// Exactly `{t ∈ L(G) | height(t) ≤ max_height}` by a monotone fixpoint of
/// per-nonterminal generated sets. The fixpoint is evaluated semi-naively:
/// each round only builds substitution combinations that use at least one
/// tree found in the previous round.
pub fn enumerate_rtg(g: &Rtg, max_height: usize, cap: usize) -> Result<Vec<Tree>> {
    if cap == 0 {
        return Err(Error::ill_formed("enumerate_rtg", "cap must be positive"));
    }
    let empty_map = || -> BTreeMap<String, BTreeSet<Tree>> {
        g.nonterminals
            .iter()
            .map(|n| (n.clone(), BTreeSet::new()))
            .collect()
    };
    type OccTable = Vec<(usize, Vec<(Vec<usize>, String)>)>;
    let mut old = empty_map();
    let mut fresh = empty_map();
    let rule_occs: OccTable = g
        .rules
        .iter()
        .enumerate()
        .map(|(i, r)| (i, nonterminal_positions(g, &r.rhs)))
        .collect();
    // round 0: ground right sides
    let mut found: Vec<(String, Tree)> = Vec::new();
    for (i, occs) in &rule_occs {
        if occs.is_empty() {
            let rhs = &g.rules[*i].rhs;
            if rhs.height() <= max_height {
                found.push((g.rules[*i].lhs.clone(), rhs.clone()));
            }
        }
    }
    let mut total = 0usize;
    loop {
        let mut next_fresh = empty_map();
        let mut grew = false;
        for (lhs, t) in found.drain(..) {
            if old[&lhs].contains(&t) || fresh[&lhs].contains(&t) {
                continue;
            }
            if next_fresh.get_mut(&lhs).expect("declared").insert(t) {
                grew = true;
                total += 1;
                if total > cap {
                    return Err(Error::CapExceeded { cap });
                }
            }
        }
        // merge the previous round into `old`
        for (n, set) in std::mem::replace(&mut fresh, next_fresh) {
            old.get_mut(&n).expect("declared").extend(set);
        }
        if !grew {
            break;
        }
        for (i, occs) in &rule_occs {
            if occs.is_empty() {
                continue;
            }
            // at least one occurrence must draw from the fresh pool:
            // occurrence j fresh, earlier ones old, later ones either
            for j in 0..occs.len() {
                let mut choice: Vec<&Tree> = Vec::with_capacity(occs.len());
                expand_seminaive(
                    &old,
                    &fresh,
                    &g.rules[*i].rhs,
                    occs,
                    j,
                    &mut choice,
                    max_height,
                    &mut |t| found.push((g.rules[*i].lhs.clone(), t)),
                );
            }
        }
    }
    Ok(canonical_sort(old[&g.start].iter().cloned().collect()))
}

#[allow(clippy::too_many_arguments)]
fn expand_seminaive<'a>(
    old: &'a BTreeMap<String, BTreeSet<Tree>>,
    fresh: &'a BTreeMap<String, BTreeSet<Tree>>,
    rhs: &Tree,
    occs: &[(Vec<usize>, String)],
    pivot: usize,
    choice: &mut Vec<&'a Tree>,
    max_height: usize,
    emit: &mut dyn FnMut(Tree),
) {
    if choice.len() == occs.len() {
        let t = substitute_positions(rhs, occs, choice);
        if t.height() <= max_height {
            emit(t);
        }
        return;
    }
    let idx = choice.len();
    let (_, n) = &occs[idx];
    let pools: &[&BTreeSet<Tree>] = match idx.cmp(&pivot) {
        std::cmp::Ordering::Less => &[&old[n]],
        std::cmp::Ordering::Equal => &[&fresh[n]],
        std::cmp::Ordering::Greater => &[&old[n], &fresh[n]],
    };
    for pool in pools {
        for t in *pool {
            if t.height() > max_height {
                continue;
            }
            choice.push(t);
            expand_seminaive(old, fresh, rhs, occs, pivot, choice, max_height, emit);
            choice.pop();
        }
    }
}

/// Paths of nonterminal leaf occurrences, in preorder.
fn nonterminal_positions(g: &Rtg, rhs: &Tree) -> Vec<(Vec<usize>, String)> {
    fn walk(g: &Rtg, t: &Tree, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, String)>) {
        if let Some(n) = g.is_nonterminal_leaf(t) {
            out.push((path.clone(), n.to_string()));
            return;
        }
        for (i, c) in t.children.iter().enumerate() {
            path.push(i);
            walk(g, c, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    walk(g, rhs, &mut Vec::new(), &mut out);
    out
}

fn substitute_positions(rhs: &Tree, occs: &[(Vec<usize>, String)], trees: &[&Tree]) -> Tree {
    let mut t = rhs.clone();
    for ((path, _), sub) in occs.iter().zip(trees) {
        replace_at(&mut t, path, (*sub).clone());
    }
    t
}

fn replace_at(t: &mut Tree, path: &[usize], sub: Tree) {
    if path.is_empty() {
        *t = sub;
    } else {
        replace_at(&mut t.children[path[0]], &path[1..], sub);
    }
}

/// Normal form: chain rules are eliminated first, then deep right sides
/// are split with fresh nonterminals named `Lhs_i`.
pub fn normalize_rtg(g: &Rtg) -> Rtg {
    // chain closure A ⇒* B through rules A -> B
    let mut reach: BTreeMap<String, BTreeSet<String>> = g
        .nonterminals
        .iter()
        .map(|n| (n.clone(), BTreeSet::from([n.clone()])))
        .collect();
    loop {
        let mut grew = false;
        for r in &g.rules {
            if let Some(b) = g.is_nonterminal_leaf(&r.rhs) {
                let bs: BTreeSet<String> = reach[b].clone();
                let entry = reach.get_mut(&r.lhs).expect("declared");
                for x in bs {
                    grew |= entry.insert(x);
                }
            }
        }
        if !grew {
            break;
        }
    }
    let mut pending: Vec<RtgRule> = Vec::new();
    for n in g.rules.iter().map(|r| &r.lhs).collect::<BTreeSet<_>>() {
        for b in &reach[n.as_str()] {
            for r in g.rules_of(b) {
                if g.is_nonterminal_leaf(&r.rhs).is_none() {
                    pending.push(RtgRule::new(n.clone(), r.rhs.clone()));
                }
            }
        }
    }
    // keep deterministic order: by original rule order per lhs group
    let mut names = FreshNames::new(
        g.nonterminals
            .iter()
            .cloned()
            .chain(g.terminals.symbols().map(String::from)),
    );
    let mut nonterminals = g.nonterminals.clone();
    let mut out: Vec<RtgRule> = Vec::new();
    let mut queue: std::collections::VecDeque<RtgRule> = pending.into();
    while let Some(rule) = queue.pop_front() {
        let rhs = &rule.rhs;
        if rhs.children.is_empty() {
            out.push(rule);
            continue;
        }
        let mut children = Vec::with_capacity(rhs.children.len());
        for c in &rhs.children {
            if g.is_nonterminal_leaf(c).is_some() {
                children.push(c.clone());
            } else {
                let fresh = names.fresh(&rule.lhs);
                nonterminals.insert(fresh.clone());
                queue.push_back(RtgRule::new(fresh.clone(), c.clone()));
                children.push(Tree::leaf(fresh));
            }
        }
        out.push(RtgRule::new(
            rule.lhs,
            Tree::node(rhs.symbol().expect("not a nonterminal leaf").to_string(), children),
        ));
    }
    let mut seen = BTreeSet::new();
    out.retain(|r| seen.insert(r.clone()));
    Rtg {
        nonterminals,
        terminals: g.terminals.clone(),
        rules: out,
        start: g.start.clone(),
    }
}

/// Grammar-to-automaton direction: nonterminals become states, a rule
/// `A → a[B1…Bk]` becomes the transition `a(B1…Bk) → A`, finals = {start}.
pub fn rtg_to_fta(g: &Rtg) -> NbuFta {
    let g = normalize_rtg(g);
    let mut leaf: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut trans: BTreeMap<(String, Vec<String>), BTreeSet<String>> = BTreeMap::new();
    for r in &g.rules {
        let sym = r.rhs.symbol().expect("normal form").to_string();
        if r.rhs.children.is_empty() {
            leaf.entry(sym).or_default().insert(r.lhs.clone());
        } else {
            let key: Vec<String> = r
                .rhs
                .children
                .iter()
                .map(|c| c.symbol().expect("normal form").to_string())
                .collect();
            trans.entry((sym, key)).or_default().insert(r.lhs.clone());
        }
    }
    NbuFta::new(
        g.terminals.clone(),
        g.nonterminals.clone(),
        leaf,
        trans,
        BTreeSet::from([g.start.clone()]),
    )
    .expect("normal form grammar maps to a well-formed automaton")
}

/// Automaton-to-grammar direction; states may be renamed to avoid the
/// terminal namespace.
pub fn fta_to_rtg(a: &NbuFta) -> Rtg {
    let mut names = FreshNames::new(a.alphabet.symbols().map(String::from));
    let rename: BTreeMap<String, String> = a
        .states
        .iter()
        .map(|q| (q.clone(), names.prefer(q)))
        .collect();
    let start = names.prefer("S0");
    let mut nonterminals: BTreeSet<String> = rename.values().cloned().collect();
    nonterminals.insert(start.clone());
    let mut rules: Vec<RtgRule> = Vec::new();
    for q in &a.finals {
        rules.push(RtgRule::new(start.clone(), Tree::leaf(rename[q].clone())));
    }
    for (sym, qs) in &a.leaf {
        for q in qs {
            rules.push(RtgRule::new(rename[q].clone(), Tree::leaf(sym.clone())));
        }
    }
    for ((sym, qs), rs) in &a.trans {
        for r in rs {
            rules.push(RtgRule::new(
                rename[r].clone(),
                Tree::node(
                    sym.clone(),
                    qs.iter().map(|q| Tree::leaf(rename[q].clone())).collect(),
                ),
            ));
        }
    }
    Rtg::new(nonterminals, a.alphabet.clone(), rules, start)
        .expect("automaton maps to a well-formed grammar")
}

/// A context-free string grammar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cfg {
    pub nonterminals: BTreeSet<String>,
    pub terminals: BTreeSet<String>,
    pub rules: Vec<CfgRule>,
    pub start: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CfgRule {
    pub lhs: String,
    /// Empty means the λ-rule.
    pub rhs: Vec<String>,
}

impl CfgRule {
    pub fn new(lhs: impl Into<String>, rhs: &[&str]) -> CfgRule {
        CfgRule {
            lhs: lhs.into(),
            rhs: rhs.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl Cfg {
    pub fn new(
        nonterminals: BTreeSet<String>,
        terminals: BTreeSet<String>,
        rules: Vec<CfgRule>,
        start: String,
    ) -> Result<Cfg> {
        let mut g = Cfg {
            nonterminals,
            terminals,
            rules,
            start,
        };
        let mut seen = BTreeSet::new();
        g.rules.retain(|r| seen.insert(r.clone()));
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        for s in self.nonterminals.iter().chain(&self.terminals) {
            validate_symbol(s)?;
        }
        if let Some(s) = self.nonterminals.intersection(&self.terminals).next() {
            return Err(Error::ill_formed(
                "cfg",
                format!("'{s}' is both a terminal and a nonterminal"),
            ));
        }
        if !self.nonterminals.contains(&self.start) {
            return Err(Error::ill_formed("cfg", "undeclared start nonterminal"));
        }
        for r in &self.rules {
            if !self.nonterminals.contains(&r.lhs) {
                return Err(Error::ill_formed(
                    "cfg",
                    format!("rule for undeclared nonterminal '{}'", r.lhs),
                ));
            }
            for s in &r.rhs {
                if !self.nonterminals.contains(s) && !self.terminals.contains(s) {
                    return Err(Error::ill_formed("cfg", format!("undeclared symbol '{s}'")));
                }
            }
        }
        Ok(())
    }

    pub fn rules_of<'a>(&'a self, n: &'a str) -> impl Iterator<Item = &'a CfgRule> {
        self.rules.iter().filter(move |r| r.lhs == n)
    }
}

/// All derivable strings of length at most `max_len`, by a CYK-style
/// fixpoint (independent of any tree-level construction). Evaluated
/// semi-naively: each round only combines with at least one string found
/// in the previous round.
pub fn enumerate_cfg(g: &Cfg, max_len: usize, cap: usize) -> Result<Vec<Vec<String>>> {
    type StrSet = BTreeSet<Vec<String>>;
    let empty_map = || -> BTreeMap<String, StrSet> {
        g.nonterminals
            .iter()
            .map(|n| (n.clone(), StrSet::new()))
            .collect()
    };
    let mut old = empty_map();
    let mut fresh = empty_map();
    let mut found: Vec<(String, Vec<String>)> = Vec::new();
    let expand_rule = |rule: &CfgRule,
                       old: &BTreeMap<String, StrSet>,
                       fresh: &BTreeMap<String, StrSet>,
                       pivot: Option<usize>,
                       found: &mut Vec<(String, Vec<String>)>| {
        let nt_positions: Vec<usize> = rule
            .rhs
            .iter()
            .enumerate()
            .filter(|(_, s)| g.nonterminals.contains(*s))
            .map(|(i, _)| i)
            .collect();
        let mut partial: StrSet = BTreeSet::from([Vec::new()]);
        let mut nt_seen = 0usize;
        for sym in &rule.rhs {
            let mut next: StrSet = BTreeSet::new();
            if g.terminals.contains(sym) {
                for p in &partial {
                    let mut w = p.clone();
                    w.push(sym.clone());
                    if w.len() <= max_len {
                        next.insert(w);
                    }
                }
            } else {
                let idx = nt_positions[nt_seen];
                let _ = idx;
                let pools: Vec<&StrSet> = match pivot {
                    None => vec![&old[sym], &fresh[sym]],
                    Some(pv) => match nt_seen.cmp(&pv) {
                        std::cmp::Ordering::Less => vec![&old[sym]],
                        std::cmp::Ordering::Equal => vec![&fresh[sym]],
                        std::cmp::Ordering::Greater => vec![&old[sym], &fresh[sym]],
                    },
                };
                nt_seen += 1;
                for p in &partial {
                    for pool in &pools {
                        for u in *pool {
                            if p.len() + u.len() <= max_len {
                                let mut w = p.clone();
                                w.extend(u.iter().cloned());
                                next.insert(w);
                            }
                        }
                    }
                }
            }
            partial = next;
            if partial.is_empty() {
                break;
            }
        }
        for w in partial {
            found.push((rule.lhs.clone(), w));
        }
    };
    // round 0: rules without nonterminals
    for rule in &g.rules {
        if rule.rhs.iter().all(|s| g.terminals.contains(s)) {
            expand_rule(rule, &old, &fresh, None, &mut found);
        }
    }
    let mut total = 0usize;
    loop {
        let mut next_fresh = empty_map();
        let mut grew = false;
        for (lhs, w) in found.drain(..) {
            if old[&lhs].contains(&w) || fresh[&lhs].contains(&w) {
                continue;
            }
            if next_fresh.get_mut(&lhs).expect("declared").insert(w) {
                grew = true;
                total += 1;
                if total > cap {
                    return Err(Error::CapExceeded { cap });
                }
            }
        }
        for (n, set) in std::mem::replace(&mut fresh, next_fresh) {
            old.get_mut(&n).expect("declared").extend(set);
        }
        if !grew {
            break;
        }
        for rule in &g.rules {
            let nts = rule
                .rhs
                .iter()
                .filter(|s| g.nonterminals.contains(*s))
                .count();
            for pivot in 0..nts {
                expand_rule(rule, &old, &fresh, Some(pivot), &mut found);
            }
        }
    }
    let mut out: Vec<Vec<String>> = old[&g.start].iter().cloned().collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// Removes unproductive and unreachable nonterminals of a word grammar.
pub fn reduce_cfg(g: &Cfg) -> Cfg {
    let mut productive: BTreeSet<String> = BTreeSet::new();
    loop {
        let mut grew = false;
        for r in &g.rules {
            if !productive.contains(&r.lhs)
                && r.rhs
                    .iter()
                    .all(|s| g.terminals.contains(s) || productive.contains(s))
            {
                productive.insert(r.lhs.clone());
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    if !productive.contains(&g.start) {
        return Cfg {
            nonterminals: BTreeSet::from([g.start.clone()]),
            terminals: g.terminals.clone(),
            rules: Vec::new(),
            start: g.start.clone(),
        };
    }
    let mut reachable: BTreeSet<String> = BTreeSet::from([g.start.clone()]);
    loop {
        let mut grew = false;
        for r in &g.rules {
            if reachable.contains(&r.lhs) {
                for s in &r.rhs {
                    if g.nonterminals.contains(s)
                        && productive.contains(s)
                        && reachable.insert(s.clone())
                    {
                        grew = true;
                    }
                }
            }
        }
        if !grew {
            break;
        }
    }
    let keep: BTreeSet<String> = productive.intersection(&reachable).cloned().collect();
    Cfg {
        nonterminals: keep.clone(),
        terminals: g.terminals.clone(),
        rules: g
            .rules
            .iter()
            .filter(|r| {
                keep.contains(&r.lhs)
                    && r.rhs
                        .iter()
                        .all(|s| g.terminals.contains(s) || keep.contains(s))
            })
            .cloned()
            .collect(),
        start: g.start.clone(),
    }
}

/// The yield grammar: each tree rule becomes the string rule of its yield
/// (nonterminal leaves kept, `e` elided).
pub fn yield_cfg(g: &Rtg) -> Result<Cfg> {
    let terminals: BTreeSet<String> = g
        .terminals
        .symbols_with_rank(0)
        .into_iter()
        .filter(|s| *s != "e")
        .map(String::from)
        .collect();
    let rules = g
        .rules
        .iter()
        .map(|r| CfgRule {
            lhs: r.lhs.clone(),
            rhs: r.rhs.yield_string().0,
        })
        .collect();
    Cfg::new(g.nonterminals.clone(), terminals, rules, g.start.clone())
}

/// The tree grammar whose yields are `L(G)`: rules `A → *[w]` for `A → w`,
/// `A → e` for λ-rules. Returns the grammar and the internal symbol, which
/// is `*` unless that collides with a terminal (then `STAR`, freshened).
pub fn cfg_to_rtg(g: &Cfg) -> Result<(Rtg, String)> {
    if g.terminals.contains("e") || g.nonterminals.contains("e") {
        return Err(Error::ill_formed(
            "cfg_to_rtg",
            "the symbol 'e' is reserved for the empty-string leaf",
        ));
    }
    let star = if !g.terminals.contains("*") && !g.nonterminals.contains("*") {
        "*".to_string()
    } else {
        let mut names = FreshNames::new(
            g.terminals
                .iter()
                .chain(&g.nonterminals)
                .cloned(),
        );
        names.prefer("STAR")
    };
    let mut delta = RankedAlphabet::empty(format!("{}-trees", "cfg"));
    for t in &g.terminals {
        delta.add(t, 0)?;
    }
    delta.add("e", 0)?;
    let mut rules = Vec::new();
    for r in &g.rules {
        if r.rhs.is_empty() {
            rules.push(RtgRule::new(r.lhs.clone(), Tree::leaf("e")));
        } else {
            delta.add(&star, r.rhs.len())?;
            rules.push(RtgRule::new(
                r.lhs.clone(),
                Tree::node(
                    star.clone(),
                    r.rhs.iter().map(|s| Tree::leaf(s.clone())).collect(),
                ),
            ));
        }
    }
    let rtg = Rtg::new(g.nonterminals.clone(), delta, rules, g.start.clone())?;
    Ok((rtg, star))
}

/// Flattens a grammar to the binary tree form whose yields are unchanged:
/// rank-0 symbols and `e` stay, unary symbols are erased, higher ranks
/// become right-nested `*` spines.
pub fn binary_yield_form(g: &Rtg) -> Result<Rtg> {
    let omega = &g.terminals;
    let rank0: BTreeSet<String> = omega
        .symbols_with_rank(0)
        .into_iter()
        .map(String::from)
        .chain(["e".to_string()])
        .collect();
    let star = if rank0.contains("*") {
        let mut names = FreshNames::new(rank0.iter().cloned());
        names.prefer("STAR")
    } else {
        "*".to_string()
    };
    let mut target = RankedAlphabet::empty("binary");
    for s in &rank0 {
        target.add(s, 0)?;
    }
    target.add(&star, 2)?;
    let mut map: BTreeMap<(String, usize), Tree> = BTreeMap::new();
    for (s, k) in omega.pairs() {
        let image = match k {
            0 => Tree::leaf(s),
            1 => Tree::var(1),
            _ => {
                let mut t = Tree::node(
                    star.clone(),
                    vec![Tree::var(k - 1), Tree::var(k)],
                );
                for i in (1..k - 1).rev() {
                    t = Tree::node(star.clone(), vec![Tree::var(i), t]);
                }
                t
            }
        };
        map.insert((s.to_string(), k), image);
    }
    let hom = crate::langops::TreeHom::new(omega.clone(), target, map)?;
    crate::langops::linear_hom_image(&hom, g)
}

/// Derivation-tree alphabet of a CFG: terminals and `e` at rank 0, each
/// nonterminal at the lengths of its rule right sides (λ-rules give rank 1
/// through `A[e]`).
pub fn derivation_alphabet(g: &Cfg) -> Result<RankedAlphabet> {
    if g.terminals.contains("e") || g.nonterminals.contains("e") {
        return Err(Error::ill_formed(
            "derivation_alphabet",
            "the symbol 'e' is reserved for the empty-string leaf",
        ));
    }
    let mut delta = RankedAlphabet::empty("derivations");
    for t in &g.terminals {
        delta.add(t, 0)?;
    }
    delta.add("e", 0)?;
    for r in &g.rules {
        delta.add(&r.lhs, r.rhs.len().max(1))?;
    }
    Ok(delta)
}

/// The grammar of derivation trees with top label in `V`.
pub fn derivation_grammar(g: &Cfg, tops: &BTreeSet<String>) -> Result<Rtg> {
    if tops.is_empty() {
        return Err(Error::ill_formed("derivation_grammar", "empty top set"));
    }
    for v in tops {
        if !g.nonterminals.contains(v) && !g.terminals.contains(v) {
            return Err(Error::UnknownName {
                kind: "grammar symbol".into(),
                name: v.clone(),
            });
        }
    }
    let delta = derivation_alphabet(g)?;
    let mut names = FreshNames::new(delta.symbols().map(String::from));
    let dname: BTreeMap<String, String> = g
        .nonterminals
        .iter()
        .chain(&g.terminals)
        .map(|a| (a.clone(), names.prefer(&format!("D{a}"))))
        .collect();
    let mut nonterminals: BTreeSet<String> = dname.values().cloned().collect();
    let mut rules = Vec::new();
    for a in &g.terminals {
        rules.push(RtgRule::new(dname[a].clone(), Tree::leaf(a.clone())));
    }
    for r in &g.rules {
        let rhs = if r.rhs.is_empty() {
            Tree::node(r.lhs.clone(), vec![Tree::leaf("e")])
        } else {
            Tree::node(
                r.lhs.clone(),
                r.rhs
                    .iter()
                    .map(|s| Tree::leaf(dname[s].clone()))
                    .collect(),
            )
        };
        rules.push(RtgRule::new(dname[&r.lhs].clone(), rhs));
    }
    let start = if tops.len() == 1 {
        dname[tops.iter().next().expect("nonempty")].clone()
    } else {
        let s0 = names.prefer("D0");
        nonterminals.insert(s0.clone());
        for v in tops {
            rules.push(RtgRule::new(s0.clone(), Tree::leaf(dname[v].clone())));
        }
        s0
    };
    Rtg::new(nonterminals, delta, rules, start)
}

/// The rule-tree grammar: nodes are named by the rules applied, ranked by
/// the number of nonterminals in the right side. Returns the grammar and
/// the (name, rule) table in rule order.
pub fn rule_tree_grammar(g: &Cfg) -> Result<(Rtg, Vec<(String, CfgRule)>)> {
    let mut names = FreshNames::new(
        g.nonterminals
            .iter()
            .chain(&g.terminals)
            .cloned(),
    );
    let mut delta = RankedAlphabet::empty("rules");
    let mut table = Vec::new();
    let mut rules = Vec::new();
    for (i, r) in g.rules.iter().enumerate() {
        let name = names.prefer(&format!("r{}", i + 1));
        let nts: Vec<&String> = r
            .rhs
            .iter()
            .filter(|s| g.nonterminals.contains(*s))
            .collect();
        delta.add(&name, nts.len())?;
        let rhs = if nts.is_empty() {
            Tree::leaf(name.clone())
        } else {
            Tree::node(
                name.clone(),
                nts.iter().map(|n| Tree::leaf((*n).clone())).collect(),
            )
        };
        rules.push(RtgRule::new(r.lhs.clone(), rhs));
        table.push((name, r.clone()));
    }
    let rtg = Rtg::new(
        g.nonterminals.clone(),
        delta,
        rules,
        g.start.clone(),
    )?;
    Ok((rtg, table))
}

/// For a normal-form RTG: the rule-tree grammar plus the projection that
/// recovers the original language, `p(r̄) = a` for a rule `A → a[B1…Bk]`.
pub fn rule_tree_projection(g: &Rtg) -> Result<(Rtg, crate::langops::Relabeling)> {
    let g = normalize_rtg(g);
    let mut names = FreshNames::new(
        g.nonterminals
            .iter()
            .cloned()
            .chain(g.terminals.symbols().map(String::from)),
    );
    let mut delta = RankedAlphabet::empty("rules");
    let mut map: BTreeMap<(String, usize), BTreeSet<String>> = BTreeMap::new();
    let mut rules = Vec::new();
    for (i, r) in g.rules.iter().enumerate() {
        let name = names.prefer(&format!("r{}", i + 1));
        let k = r.rhs.children.len();
        delta.add(&name, k)?;
        let target = r.rhs.symbol().expect("normal form").to_string();
        map.insert((name.clone(), k), BTreeSet::from([target]));
        let rhs = if k == 0 {
            Tree::leaf(name.clone())
        } else {
            Tree::node(name.clone(), r.rhs.children.clone())
        };
        rules.push(RtgRule::new(r.lhs.clone(), rhs));
    }
    let barred = Rtg::new(g.nonterminals.clone(), delta.clone(), rules, g.start.clone())?;
    let projection = crate::langops::Relabeling::new(delta, g.terminals.clone(), map)?;
    Ok((barred, projection))
}

/// The bare-tree grammar `BT(G)`: derivation trees with every inner label
/// projected to a single symbol.
pub fn bare_tree_grammar(g: &Cfg) -> Result<Rtg> {
    let deriv = derivation_grammar(g, &BTreeSet::from([g.start.clone()]))?;
    let (projection, _) = bare_projection(&deriv.terminals)?;
    crate::langops::relabel_image(&projection, &deriv)
}

/// The rank-preserving projection that keeps rank-0 symbols and sends
/// every positive-rank symbol to `*` (freshened on collision).
pub fn bare_projection(delta: &RankedAlphabet) -> Result<(crate::langops::Relabeling, String)> {
    let rank0: BTreeSet<String> = delta
        .symbols_with_rank(0)
        .into_iter()
        .map(String::from)
        .collect();
    let star = if rank0.contains("*") {
        let mut names = FreshNames::new(rank0.iter().cloned());
        names.prefer("STAR")
    } else {
        "*".to_string()
    };
    let mut target = RankedAlphabet::empty("bare");
    let mut map: BTreeMap<(String, usize), BTreeSet<String>> = BTreeMap::new();
    for (s, k) in delta.pairs() {
        if k == 0 {
            target.add(s, 0)?;
            map.insert((s.to_string(), 0), BTreeSet::from([s.to_string()]));
        } else {
            target.add(&star, k)?;
            map.insert((s.to_string(), k), BTreeSet::from([star.clone()]));
        }
    }
    Ok((
        crate::langops::Relabeling::new(delta.clone(), target, map)?,
        star,
    ))
}

/// Structural equivalence: equality of bare tree languages, decided
/// through the automaton correspondence.
pub fn structurally_equivalent(g1: &Cfg, g2: &Cfg) -> Result<bool> {
    if g1.terminals != g2.terminals {
        return Err(Error::AlphabetMismatch(
            "structural equivalence needs a common terminal alphabet".into(),
        ));
    }
    let b1 = bare_tree_grammar(g1)?;
    let b2 = bare_tree_grammar(g2)?;
    let joint = b1.terminals.union(&b2.terminals);
    let a1 = rtg_to_fta(&b1).embed_alphabet(&joint)?;
    let a2 = rtg_to_fta(&b2).embed_alphabet(&joint)?;
    fta::equivalent(&a1, &a2)
}

/// `L(G) ∩ L(M)` through the tree route: lift the grammar to trees,
/// intersect with the yield automaton, read the yields back off.
pub fn cfg_intersect_regular(g: &Cfg, m: &fta::Dfa) -> Result<Cfg> {
    for t in &g.terminals {
        if !m.alphabet.contains(t) {
            return Err(Error::AlphabetMismatch(format!(
                "DFA alphabet is missing terminal '{t}'"
            )));
        }
    }
    let (rtg, _) = cfg_to_rtg(g)?;
    let trees = rtg_to_fta(&rtg);
    let in_regular = fta::yield_in_regular(&rtg.terminals, m)?;
    let product = fta::intersection(&trees, &in_regular)?.trim();
    Ok(reduce_cfg(&yield_cfg(&fta_to_rtg(&product))?))
}
