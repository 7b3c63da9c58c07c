//! The definition-file format: named blocks for alphabets, automata,
//! grammars, homomorphisms, relabelings, transducers and chains, all in
//! one UTF-8 syntax with `#` comments. Parsing several files merges them
//! into one workspace; every constructed object can be re-emitted in the
//! same block syntax.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::alphabet::RankedAlphabet;
use crate::error::{Error, Result};
use crate::fta::{DbuFta, Dfa, DtdFta, NbuFta, NtdFta, State};
use crate::grammar::{Cfg, CfgRule, Rtg, RtgRule};
use crate::langops::{Relabeling, TreeHom};
use crate::surface::TransducerChain;
use crate::term::{symbol_to_node, Tok, Tokens};
use crate::transduce::{BuFtt, BuRule, OutTree, Stage, TdFtt, TdRule, TdrFtt};
use crate::tree::Node;

/// Parsed definitions, by kind and name.
#[derive(Debug, Clone, Default)]
pub struct Workspace {
    pub alphabets: BTreeMap<String, RankedAlphabet>,
    pub ftas: BTreeMap<String, NbuFta>,
    pub dftas: BTreeMap<String, DbuFta>,
    pub tdftas: BTreeMap<String, DtdFta>,
    pub ntdftas: BTreeMap<String, NtdFta>,
    pub dfas: BTreeMap<String, Dfa>,
    pub rtgs: BTreeMap<String, Rtg>,
    pub cfgs: BTreeMap<String, Cfg>,
    pub homs: BTreeMap<String, TreeHom>,
    pub rels: BTreeMap<String, Relabeling>,
    pub bufts: BTreeMap<String, BuFtt>,
    pub tdfts: BTreeMap<String, TdFtt>,
    pub tdrfts: BTreeMap<String, TdrFtt>,
    pub chains: BTreeMap<String, TransducerChain>,
}

impl Workspace {
    pub fn parse(input: &str) -> Result<Workspace> {
        let mut ws = Workspace::default();
        ws.extend_from(input)?;
        Ok(ws)
    }

    /// Parses more definitions into this workspace.
    pub fn extend_from(&mut self, input: &str) -> Result<()> {
        let mut toks = Tokens::lex(input)?;
        while !toks.is_done() {
            let kind = toks.expect_sym()?;
            let name = toks.expect_sym()?;
            match kind.as_str() {
                "alphabet" => {
                    let a = parse_alphabet_block(&mut toks, &name)?;
                    insert_unique(&mut self.alphabets, &kind, name, a)?;
                }
                "fta" => {
                    let a = parse_fta_block(&mut toks, self)?;
                    insert_unique(&mut self.ftas, &kind, name, a)?;
                }
                "dfta" => {
                    let a = parse_dfta_block(&mut toks, self)?;
                    insert_unique(&mut self.dftas, &kind, name, a)?;
                }
                "tdfta" => {
                    let a = parse_tdfta_block(&mut toks, self)?;
                    insert_unique(&mut self.tdftas, &kind, name, a)?;
                }
                "ntdfta" => {
                    let a = parse_ntdfta_block(&mut toks, self)?;
                    insert_unique(&mut self.ntdftas, &kind, name, a)?;
                }
                "dfa" => {
                    let a = parse_dfa_block(&mut toks)?;
                    insert_unique(&mut self.dfas, &kind, name, a)?;
                }
                "rtg" => {
                    let g = parse_rtg_block(&mut toks, self)?;
                    insert_unique(&mut self.rtgs, &kind, name, g)?;
                }
                "cfg" => {
                    let g = parse_cfg_block(&mut toks)?;
                    insert_unique(&mut self.cfgs, &kind, name, g)?;
                }
                "hom" => {
                    let h = parse_hom_block(&mut toks, self)?;
                    insert_unique(&mut self.homs, &kind, name, h)?;
                }
                "rel" => {
                    let r = parse_rel_block(&mut toks, self)?;
                    insert_unique(&mut self.rels, &kind, name, r)?;
                }
                "buftt" => {
                    let m = parse_buftt_block(&mut toks, self)?;
                    insert_unique(&mut self.bufts, &kind, name, m)?;
                }
                "tdftt" => {
                    let m = parse_tdftt_block(&mut toks, self, false)?;
                    let m = m.without_lookahead().expect("no look-ahead parsed");
                    insert_unique(&mut self.tdfts, &kind, name, m)?;
                }
                "tdrftt" => {
                    let m = parse_tdftt_block(&mut toks, self, true)?;
                    insert_unique(&mut self.tdrfts, &kind, name, m)?;
                }
                "chain" => {
                    let c = parse_chain_block(&mut toks, self)?;
                    insert_unique(&mut self.chains, &kind, name, c)?;
                }
                other => {
                    return Err(toks.error(format!("unknown block kind '{other}'")));
                }
            }
        }
        Ok(())
    }

    pub fn alphabet(&self, name: &str) -> Result<&RankedAlphabet> {
        self.alphabets.get(name).ok_or_else(|| Error::UnknownName {
            kind: "alphabet".into(),
            name: name.into(),
        })
    }

    /// An automaton by name, deterministic ones viewed nondeterministically.
    pub fn any_fta(&self, name: &str) -> Result<NbuFta> {
        if let Some(a) = self.ftas.get(name) {
            return Ok(a.clone());
        }
        if let Some(a) = self.dftas.get(name) {
            return Ok(a.to_nondet());
        }
        Err(Error::UnresolvedReference(name.into()))
    }

    /// A transducer stage by name, trying each stage kind.
    pub fn any_transducer(&self, name: &str) -> Result<Stage> {
        if let Some(m) = self.bufts.get(name) {
            return Ok(Stage::Bu(m.clone()));
        }
        if let Some(m) = self.tdfts.get(name) {
            return Ok(Stage::Td(m.clone()));
        }
        if let Some(m) = self.tdrfts.get(name) {
            return Ok(Stage::Tdr(m.clone()));
        }
        if let Some(h) = self.homs.get(name) {
            return Ok(Stage::Hom(h.clone()));
        }
        if let Some(r) = self.rels.get(name) {
            return Ok(Stage::Rel(r.clone()));
        }
        if let Some(a) = self.ftas.get(name) {
            return Ok(Stage::Fta(a.clone()));
        }
        if let Some(a) = self.dftas.get(name) {
            return Ok(Stage::Fta(a.to_nondet()));
        }
        Err(Error::UnresolvedReference(name.into()))
    }
}

fn insert_unique<T>(
    map: &mut BTreeMap<String, T>,
    kind: &str,
    name: String,
    value: T,
) -> Result<()> {
    if map.contains_key(&name) {
        return Err(Error::ill_formed(
            kind,
            format!("duplicate definition of '{name}'"),
        ));
    }
    map.insert(name, value);
    Ok(())
}

/// Splits `sym/rank` at the last slash.
fn split_ranked(tok: &str) -> Result<(String, usize)> {
    let Some(pos) = tok.rfind('/') else {
        return Err(Error::BadSymbol(tok.into(), "expected sym/rank".into()));
    };
    let (sym, rank) = tok.split_at(pos);
    let rank: usize = rank[1..]
        .parse()
        .map_err(|_| Error::BadSymbol(tok.into(), "rank must be a number".into()))?;
    Ok((sym.to_string(), rank))
}

fn parse_alphabet_block(toks: &mut Tokens, name: &str) -> Result<RankedAlphabet> {
    toks.expect(&Tok::LBrace)?;
    let mut a = RankedAlphabet::empty(name);
    while toks.peek() != Some(&Tok::RBrace) {
        let entry = toks.expect_sym()?;
        let (sym, rank) = split_ranked(&entry)?;
        a.add(&sym, rank)?;
    }
    toks.expect(&Tok::RBrace)?;
    Ok(a)
}

fn parse_state_set(toks: &mut Tokens) -> Result<BTreeSet<State>> {
    toks.expect(&Tok::LBrace)?;
    let mut set = BTreeSet::new();
    while toks.peek() != Some(&Tok::RBrace) {
        set.insert(toks.expect_sym()?);
    }
    toks.expect(&Tok::RBrace)?;
    Ok(set)
}

/// `a(q,…,q)` or a bare rank-0 symbol.
fn parse_sym_states(toks: &mut Tokens) -> Result<(String, Vec<State>)> {
    let sym = toks.expect_sym()?;
    let mut states = Vec::new();
    if toks.peek() == Some(&Tok::LParen) {
        toks.next();
        loop {
            states.push(toks.expect_sym()?);
            match toks.peek() {
                Some(Tok::Comma) => {
                    toks.next();
                }
                Some(Tok::RParen) => break,
                _ => return Err(toks.error("expected ',' or ')'")),
            }
        }
        toks.expect(&Tok::RParen)?;
    }
    Ok((sym, states))
}

/// `-a->` arrows of the top-down and string automata.
fn split_arrow(tok: &str, toks: &Tokens) -> Result<String> {
    tok.strip_prefix('-')
        .and_then(|rest| rest.strip_suffix("->"))
        .map(String::from)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| toks.error(format!("expected '-sym->', found '{tok}'")))
}

fn parse_fta_block(toks: &mut Tokens, ws: &Workspace) -> Result<NbuFta> {
    toks.expect(&Tok::LBrace)?;
    toks.expect_kw("input")?;
    let alphabet = ws.alphabet(&toks.expect_sym()?)?.clone();
    let mut states = BTreeSet::new();
    let mut finals = BTreeSet::new();
    let mut leaf: BTreeMap<String, BTreeSet<State>> = BTreeMap::new();
    let mut trans: BTreeMap<(String, Vec<State>), BTreeSet<State>> = BTreeMap::new();
    loop {
        match toks.peek() {
            Some(Tok::RBrace) => {
                toks.next();
                break;
            }
            Some(Tok::Sym(kw)) => match kw.as_str() {
                "states" | "final" => {
                    let into_finals = kw == "final";
                    toks.next();
                    while let Some(Tok::Sym(s)) = toks.peek() {
                        if matches!(s.as_str(), "final" | "leaf" | "trans" | "states") {
                            break;
                        }
                        let q = toks.expect_sym()?;
                        if into_finals {
                            finals.insert(q);
                        } else {
                            states.insert(q);
                        }
                    }
                }
                "leaf" => {
                    toks.next();
                    let sym = toks.expect_sym()?;
                    toks.expect_kw("->")?;
                    leaf.entry(sym).or_default().extend(parse_state_set(toks)?);
                }
                "trans" => {
                    toks.next();
                    let (sym, key) = parse_sym_states(toks)?;
                    toks.expect_kw("->")?;
                    trans
                        .entry((sym, key))
                        .or_default()
                        .extend(parse_state_set(toks)?);
                }
                other => return Err(toks.error(format!("unexpected '{other}' in fta block"))),
            },
            _ => return Err(toks.error("unterminated fta block")),
        }
    }
    NbuFta::new(alphabet, states, leaf, trans, finals)
}

fn parse_dfta_block(toks: &mut Tokens, ws: &Workspace) -> Result<DbuFta> {
    toks.expect(&Tok::LBrace)?;
    toks.expect_kw("input")?;
    let alphabet = ws.alphabet(&toks.expect_sym()?)?.clone();
    let mut states = BTreeSet::new();
    let mut finals = BTreeSet::new();
    let mut leaf: BTreeMap<String, State> = BTreeMap::new();
    let mut trans: BTreeMap<(String, Vec<State>), State> = BTreeMap::new();
    loop {
        match toks.peek() {
            Some(Tok::RBrace) => {
                toks.next();
                break;
            }
            Some(Tok::Sym(kw)) => match kw.as_str() {
                "states" | "final" => {
                    let into_finals = kw == "final";
                    toks.next();
                    while let Some(Tok::Sym(s)) = toks.peek() {
                        if matches!(s.as_str(), "final" | "leaf" | "trans" | "states") {
                            break;
                        }
                        let q = toks.expect_sym()?;
                        if into_finals {
                            finals.insert(q);
                        } else {
                            states.insert(q);
                        }
                    }
                }
                "leaf" => {
                    toks.next();
                    let sym = toks.expect_sym()?;
                    toks.expect_kw("->")?;
                    leaf.insert(sym, toks.expect_sym()?);
                }
                "trans" => {
                    toks.next();
                    let (sym, key) = parse_sym_states(toks)?;
                    toks.expect_kw("->")?;
                    trans.insert((sym, key), toks.expect_sym()?);
                }
                other => return Err(toks.error(format!("unexpected '{other}' in dfta block"))),
            },
            _ => return Err(toks.error("unterminated dfta block")),
        }
    }
    // missing transitions are completed with a sink at load time
    let d = DbuFta::new(alphabet, states, leaf, trans, finals)?;
    Ok(d.completed())
}

fn parse_tdfta_block(toks: &mut Tokens, ws: &Workspace) -> Result<DtdFta> {
    let n = parse_ntdfta_block(toks, ws)?;
    if n.init.len() != 1 {
        return Err(Error::ill_formed("tdfta", "needs exactly one initial state"));
    }
    let mut trans: BTreeMap<(String, usize, State), Vec<State>> = BTreeMap::new();
    for ((sym, k, q), succs) in &n.trans {
        if succs.len() != 1 {
            return Err(Error::ill_formed(
                "tdfta",
                format!("nondeterministic transition on ({sym}, {q})"),
            ));
        }
        trans.insert(
            (sym.clone(), *k, q.clone()),
            succs.iter().next().expect("singleton").clone(),
        );
    }
    Ok(DtdFta {
        alphabet: n.alphabet,
        states: n.states,
        init: n.init.into_iter().next().expect("singleton"),
        trans,
        leaf_final: n.leaf_final,
    })
}

fn parse_ntdfta_block(toks: &mut Tokens, ws: &Workspace) -> Result<NtdFta> {
    toks.expect(&Tok::LBrace)?;
    toks.expect_kw("input")?;
    let alphabet = ws.alphabet(&toks.expect_sym()?)?.clone();
    let mut states = BTreeSet::new();
    let mut init = BTreeSet::new();
    let mut trans: BTreeMap<(String, usize, State), BTreeSet<Vec<State>>> = BTreeMap::new();
    let mut leaf_final: BTreeMap<String, BTreeSet<State>> = BTreeMap::new();
    loop {
        match toks.peek() {
            Some(Tok::RBrace) => {
                toks.next();
                break;
            }
            Some(Tok::Sym(kw)) => match kw.as_str() {
                "states" | "initial" => {
                    let into_init = kw == "initial";
                    toks.next();
                    while let Some(Tok::Sym(s)) = toks.peek() {
                        if matches!(s.as_str(), "initial" | "leaffinal" | "trans" | "states") {
                            break;
                        }
                        let q = toks.expect_sym()?;
                        if into_init {
                            init.insert(q);
                        } else {
                            states.insert(q);
                        }
                    }
                }
                "trans" => {
                    toks.next();
                    let q = toks.expect_sym()?;
                    let arrow = toks.expect_sym()?;
                    let sym = split_arrow(&arrow, toks)?;
                    toks.expect(&Tok::LParen)?;
                    let mut succ = Vec::new();
                    loop {
                        succ.push(toks.expect_sym()?);
                        match toks.peek() {
                            Some(Tok::Comma) => {
                                toks.next();
                            }
                            Some(Tok::RParen) => break,
                            _ => return Err(toks.error("expected ',' or ')'")),
                        }
                    }
                    toks.expect(&Tok::RParen)?;
                    let k = succ.len();
                    trans.entry((sym, k, q)).or_default().insert(succ);
                }
                "leaffinal" => {
                    toks.next();
                    let sym = toks.expect_sym()?;
                    toks.expect_kw("->")?;
                    leaf_final
                        .entry(sym)
                        .or_default()
                        .extend(parse_state_set(toks)?);
                }
                other => return Err(toks.error(format!("unexpected '{other}' in tdfta block"))),
            },
            _ => return Err(toks.error("unterminated tdfta block")),
        }
    }
    Ok(NtdFta {
        alphabet,
        states,
        init,
        trans,
        leaf_final,
    })
}

fn parse_dfa_block(toks: &mut Tokens) -> Result<Dfa> {
    toks.expect(&Tok::LBrace)?;
    let mut alphabet = BTreeSet::new();
    let mut states = BTreeSet::new();
    let mut start = None;
    let mut finals = BTreeSet::new();
    let mut trans = BTreeMap::new();
    loop {
        match toks.peek() {
            Some(Tok::RBrace) => {
                toks.next();
                break;
            }
            Some(Tok::Sym(kw)) => match kw.as_str() {
                "alphabet" | "states" | "final" => {
                    let kw = kw.clone();
                    toks.next();
                    while let Some(Tok::Sym(s)) = toks.peek() {
                        if matches!(
                            s.as_str(),
                            "alphabet" | "states" | "start" | "final" | "trans"
                        ) {
                            break;
                        }
                        let s = toks.expect_sym()?;
                        match kw.as_str() {
                            "alphabet" => {
                                alphabet.insert(s);
                            }
                            "states" => {
                                states.insert(s);
                            }
                            _ => {
                                finals.insert(s);
                            }
                        }
                    }
                }
                "start" => {
                    toks.next();
                    start = Some(toks.expect_sym()?);
                }
                "trans" => {
                    toks.next();
                    let from = toks.expect_sym()?;
                    let arrow = toks.expect_sym()?;
                    let sym = split_arrow(&arrow, toks)?;
                    let to = toks.expect_sym()?;
                    trans.insert((from, sym), to);
                }
                other => return Err(toks.error(format!("unexpected '{other}' in dfa block"))),
            },
            _ => return Err(toks.error("unterminated dfa block")),
        }
    }
    let start = start.ok_or_else(|| toks.error("dfa block needs a start state"))?;
    Dfa::new(alphabet, states, start, finals, trans)
}

fn parse_rtg_block(toks: &mut Tokens, ws: &Workspace) -> Result<Rtg> {
    toks.expect(&Tok::LBrace)?;
    toks.expect_kw("terminals")?;
    let terminals = ws.alphabet(&toks.expect_sym()?)?.clone();
    let mut nonterminals = BTreeSet::new();
    let mut start = None;
    let mut rules = Vec::new();
    loop {
        match toks.peek() {
            Some(Tok::RBrace) => {
                toks.next();
                break;
            }
            Some(Tok::Sym(kw)) => match kw.as_str() {
                "nonterminals" => {
                    toks.next();
                    while let Some(Tok::Sym(s)) = toks.peek() {
                        if matches!(s.as_str(), "start" | "rule" | "nonterminals") {
                            break;
                        }
                        nonterminals.insert(toks.expect_sym()?);
                    }
                }
                "start" => {
                    toks.next();
                    start = Some(toks.expect_sym()?);
                }
                "rule" => {
                    toks.next();
                    let lhs = toks.expect_sym()?;
                    toks.expect_kw("->")?;
                    let rhs = toks.parse_term()?;
                    rules.push(RtgRule::new(lhs, rhs));
                }
                other => return Err(toks.error(format!("unexpected '{other}' in rtg block"))),
            },
            _ => return Err(toks.error("unterminated rtg block")),
        }
    }
    let start = start.ok_or_else(|| toks.error("rtg block needs a start symbol"))?;
    Rtg::new(nonterminals, terminals, rules, start)
}

fn parse_cfg_block(toks: &mut Tokens) -> Result<Cfg> {
    toks.expect(&Tok::LBrace)?;
    let mut terminals = BTreeSet::new();
    let mut nonterminals = BTreeSet::new();
    let mut start = None;
    let mut rules = Vec::new();
    loop {
        match toks.peek() {
            Some(Tok::RBrace) => {
                toks.next();
                break;
            }
            Some(Tok::Sym(kw)) => match kw.as_str() {
                "terminals" | "nonterminals" => {
                    let into_terms = kw == "terminals";
                    toks.next();
                    while let Some(Tok::Sym(s)) = toks.peek() {
                        if matches!(s.as_str(), "terminals" | "nonterminals" | "start" | "rule") {
                            break;
                        }
                        let s = toks.expect_sym()?;
                        if into_terms {
                            terminals.insert(s);
                        } else {
                            nonterminals.insert(s);
                        }
                    }
                }
                "start" => {
                    toks.next();
                    start = Some(toks.expect_sym()?);
                }
                "rule" => {
                    toks.next();
                    let lhs = toks.expect_sym()?;
                    toks.expect_kw("->")?;
                    let mut rhs = Vec::new();
                    while let Some(Tok::Sym(s)) = toks.peek() {
                        if s == "rule" {
                            break;
                        }
                        rhs.push(toks.expect_sym()?);
                    }
                    if rhs == ["eps"] {
                        rhs.clear();
                    }
                    rules.push(CfgRule { lhs, rhs });
                }
                other => return Err(toks.error(format!("unexpected '{other}' in cfg block"))),
            },
            _ => return Err(toks.error("unterminated cfg block")),
        }
    }
    let start = start.ok_or_else(|| toks.error("cfg block needs a start symbol"))?;
    Cfg::new(nonterminals, terminals, rules, start)
}

fn parse_hom_block(toks: &mut Tokens, ws: &Workspace) -> Result<TreeHom> {
    toks.expect(&Tok::LBrace)?;
    toks.expect_kw("from")?;
    let source = ws.alphabet(&toks.expect_sym()?)?.clone();
    toks.expect_kw("to")?;
    let target = ws.alphabet(&toks.expect_sym()?)?.clone();
    let mut map = BTreeMap::new();
    while toks.eat_sym("map") {
        let entry = toks.expect_sym()?;
        let (sym, rank) = split_ranked(&entry)?;
        toks.expect_kw("->")?;
        let image = toks.parse_term()?;
        map.insert((sym, rank), image);
    }
    toks.expect(&Tok::RBrace)?;
    TreeHom::new(source, target, map)
}

fn parse_rel_block(toks: &mut Tokens, ws: &Workspace) -> Result<Relabeling> {
    toks.expect(&Tok::LBrace)?;
    toks.expect_kw("from")?;
    let source = ws.alphabet(&toks.expect_sym()?)?.clone();
    toks.expect_kw("to")?;
    let target = ws.alphabet(&toks.expect_sym()?)?.clone();
    let mut map: BTreeMap<(String, usize), BTreeSet<String>> = BTreeMap::new();
    while toks.eat_sym("map") {
        let entry = toks.expect_sym()?;
        let (sym, rank) = split_ranked(&entry)?;
        toks.expect_kw("->")?;
        toks.expect(&Tok::LBrace)?;
        let mut images = BTreeSet::new();
        while toks.peek() != Some(&Tok::RBrace) {
            images.insert(toks.expect_sym()?);
        }
        toks.expect(&Tok::RBrace)?;
        map.entry((sym, rank)).or_default().extend(images);
    }
    toks.expect(&Tok::RBrace)?;
    Relabeling::new(source, target, map)
}

fn parse_buftt_block(toks: &mut Tokens, ws: &Workspace) -> Result<BuFtt> {
    toks.expect(&Tok::LBrace)?;
    toks.expect_kw("input")?;
    let input = ws.alphabet(&toks.expect_sym()?)?.clone();
    toks.expect_kw("output")?;
    let output = ws.alphabet(&toks.expect_sym()?)?.clone();
    let mut states = BTreeSet::new();
    let mut finals = BTreeSet::new();
    let mut rules = Vec::new();
    loop {
        match toks.peek() {
            Some(Tok::RBrace) => {
                toks.next();
                break;
            }
            Some(Tok::Sym(kw)) => match kw.as_str() {
                "states" | "final" => {
                    let into_finals = kw == "final";
                    toks.next();
                    while let Some(Tok::Sym(s)) = toks.peek() {
                        if matches!(s.as_str(), "states" | "final" | "rule") {
                            break;
                        }
                        let q = toks.expect_sym()?;
                        if into_finals {
                            finals.insert(q);
                        } else {
                            states.insert(q);
                        }
                    }
                }
                "rule" => {
                    toks.next();
                    let (sym, child_states) = parse_sym_states(toks)?;
                    toks.expect_kw("->")?;
                    let state = toks.expect_sym()?;
                    toks.expect(&Tok::LBracket)?;
                    let rhs = toks.parse_term()?;
                    toks.expect(&Tok::RBracket)?;
                    rules.push(BuRule {
                        sym,
                        child_states,
                        state,
                        rhs,
                    });
                }
                other => return Err(toks.error(format!("unexpected '{other}' in buftt block"))),
            },
            _ => return Err(toks.error("unterminated buftt block")),
        }
    }
    BuFtt::new(input, output, states, rules, finals)
}

/// Output pattern with `q(xi)` state calls.
fn parse_out_tree(toks: &mut Tokens) -> Result<OutTree> {
    let sym = toks.expect_sym()?;
    match toks.peek() {
        Some(Tok::LParen) => {
            toks.next();
            let var = toks.expect_sym()?;
            let Node::Var(i) = symbol_to_node(&var) else {
                return Err(toks.error(format!("state call needs a variable, found '{var}'")));
            };
            toks.expect(&Tok::RParen)?;
            Ok(OutTree::Call(sym, i))
        }
        Some(Tok::LBracket) => {
            toks.next();
            let mut children = Vec::new();
            loop {
                children.push(parse_out_tree(toks)?);
                match toks.peek() {
                    Some(Tok::RBracket) => {
                        toks.next();
                        break;
                    }
                    Some(Tok::Sym(_)) => continue,
                    _ => return Err(toks.error("unbalanced brackets in rule output")),
                }
            }
            Ok(OutTree::Out(sym, children))
        }
        _ => Ok(OutTree::leaf(sym)),
    }
}

fn parse_tdftt_block(toks: &mut Tokens, ws: &Workspace, lookahead: bool) -> Result<TdrFtt> {
    toks.expect(&Tok::LBrace)?;
    toks.expect_kw("input")?;
    let input = ws.alphabet(&toks.expect_sym()?)?.clone();
    toks.expect_kw("output")?;
    let output = ws.alphabet(&toks.expect_sym()?)?.clone();
    let mut states = BTreeSet::new();
    let mut initials = BTreeSet::new();
    let mut rules = Vec::new();
    loop {
        match toks.peek() {
            Some(Tok::RBrace) => {
                toks.next();
                break;
            }
            Some(Tok::Sym(kw)) => match kw.as_str() {
                "states" | "initial" => {
                    let into_init = kw == "initial";
                    toks.next();
                    while let Some(Tok::Sym(s)) = toks.peek() {
                        if matches!(s.as_str(), "states" | "initial" | "rule") {
                            break;
                        }
                        let q = toks.expect_sym()?;
                        if into_init {
                            initials.insert(q);
                        } else {
                            states.insert(q);
                        }
                    }
                }
                "rule" => {
                    toks.next();
                    let state = toks.expect_sym()?;
                    toks.expect(&Tok::LBracket)?;
                    let sym = toks.expect_sym()?;
                    let mut rank = 0;
                    if toks.peek() == Some(&Tok::LParen) {
                        toks.next();
                        loop {
                            let v = toks.expect_sym()?;
                            if !matches!(symbol_to_node(&v), Node::Var(_)) {
                                return Err(toks.error(format!("expected a variable, found '{v}'")));
                            }
                            rank += 1;
                            match toks.peek() {
                                Some(Tok::Comma) => {
                                    toks.next();
                                }
                                Some(Tok::RParen) => break,
                                _ => return Err(toks.error("expected ',' or ')'")),
                            }
                        }
                        toks.expect(&Tok::RParen)?;
                    }
                    toks.expect(&Tok::RBracket)?;
                    toks.expect_kw("->")?;
                    let rhs = parse_out_tree(toks)?;
                    let mut look = BTreeMap::new();
                    if lookahead && toks.eat_sym("where") {
                        loop {
                            let var = toks.expect_sym()?;
                            let Node::Var(i) = symbol_to_node(&var) else {
                                return Err(toks.error("look-ahead clause needs a variable"));
                            };
                            toks.expect(&Tok::Colon)?;
                            toks.expect(&Tok::At)?;
                            let name = toks.expect_sym()?;
                            look.insert(i, ws.any_fta(&name)?);
                            if toks.peek() == Some(&Tok::Comma) {
                                toks.next();
                            } else {
                                break;
                            }
                        }
                    }
                    rules.push(TdRule {
                        state,
                        sym,
                        rank,
                        rhs,
                        look,
                    });
                }
                other => return Err(toks.error(format!("unexpected '{other}' in tdftt block"))),
            },
            _ => return Err(toks.error("unterminated tdftt block")),
        }
    }
    TdrFtt::new(input, output, states, rules, initials)
}

fn parse_chain_block(toks: &mut Tokens, ws: &Workspace) -> Result<TransducerChain> {
    toks.expect(&Tok::LBrace)?;
    toks.expect_kw("base")?;
    toks.expect(&Tok::At)?;
    let base = ws.any_fta(&toks.expect_sym()?)?;
    let mut stages = Vec::new();
    while toks.eat_sym("stage") {
        toks.expect(&Tok::At)?;
        stages.push(ws.any_transducer(&toks.expect_sym()?)?);
    }
    toks.expect(&Tok::RBrace)?;
    TransducerChain::new(base, stages)
}

// ---------------------------------------------------------------------
// block printers: deterministic re-emission of constructed objects
// ---------------------------------------------------------------------

pub fn print_alphabet(a: &RankedAlphabet) -> String {
    let mut s = format!("alphabet {} {{", a.name());
    for (sym, k) in a.pairs() {
        let _ = write!(s, " {sym}/{k}");
    }
    s.push_str(" }\n");
    s
}

fn join<I: IntoIterator<Item = impl AsRef<str>>>(items: I) -> String {
    let mut out = String::new();
    for (i, x) in items.into_iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(x.as_ref());
    }
    out
}

pub fn print_fta(name: &str, a: &NbuFta) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "fta {name} {{");
    let _ = writeln!(s, "  input {}", a.alphabet.name());
    let _ = writeln!(s, "  states {}", join(&a.states));
    let _ = writeln!(s, "  final {}", join(&a.finals));
    for (sym, qs) in &a.leaf {
        let _ = writeln!(s, "  leaf {sym} -> {{ {} }}", join(qs));
    }
    for ((sym, key), rs) in &a.trans {
        let _ = writeln!(s, "  trans {sym}({}) -> {{ {} }}", key.join(","), join(rs));
    }
    s.push_str("}\n");
    s
}

pub fn print_dfta(name: &str, a: &DbuFta) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "dfta {name} {{");
    let _ = writeln!(s, "  input {}", a.alphabet.name());
    let _ = writeln!(s, "  states {}", join(&a.states));
    let _ = writeln!(s, "  final {}", join(&a.finals));
    for (sym, q) in &a.leaf {
        let _ = writeln!(s, "  leaf {sym} -> {q}");
    }
    for ((sym, key), r) in &a.trans {
        let _ = writeln!(s, "  trans {sym}({}) -> {r}", key.join(","));
    }
    s.push_str("}\n");
    s
}

pub fn print_tdfta(name: &str, a: &DtdFta) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "tdfta {name} {{");
    let _ = writeln!(s, "  input {}", a.alphabet.name());
    let _ = writeln!(s, "  states {}", join(&a.states));
    let _ = writeln!(s, "  initial {}", a.init);
    for ((sym, _, q), succ) in &a.trans {
        let _ = writeln!(s, "  trans {q} -{sym}-> ({})", succ.join(","));
    }
    for (sym, qs) in &a.leaf_final {
        let _ = writeln!(s, "  leaffinal {sym} -> {{ {} }}", join(qs));
    }
    s.push_str("}\n");
    s
}

pub fn print_ntdfta(name: &str, a: &NtdFta) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "ntdfta {name} {{");
    let _ = writeln!(s, "  input {}", a.alphabet.name());
    let _ = writeln!(s, "  states {}", join(&a.states));
    let _ = writeln!(s, "  initial {}", join(&a.init));
    for ((sym, _, q), succs) in &a.trans {
        for succ in succs {
            let _ = writeln!(s, "  trans {q} -{sym}-> ({})", succ.join(","));
        }
    }
    for (sym, qs) in &a.leaf_final {
        let _ = writeln!(s, "  leaffinal {sym} -> {{ {} }}", join(qs));
    }
    s.push_str("}\n");
    s
}

pub fn print_dfa(name: &str, a: &Dfa) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "dfa {name} {{");
    let _ = writeln!(s, "  alphabet {}", join(&a.alphabet));
    let _ = writeln!(s, "  states {}", join(&a.states));
    let _ = writeln!(s, "  start {}", a.start);
    let _ = writeln!(s, "  final {}", join(&a.finals));
    for ((q, sym), r) in &a.trans {
        let _ = writeln!(s, "  trans {q} -{sym}-> {r}");
    }
    s.push_str("}\n");
    s
}

pub fn print_rtg(name: &str, g: &Rtg) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "rtg {name} {{");
    let _ = writeln!(s, "  terminals {}", g.terminals.name());
    let _ = writeln!(s, "  nonterminals {}", join(&g.nonterminals));
    let _ = writeln!(s, "  start {}", g.start);
    for r in &g.rules {
        let _ = writeln!(s, "  rule {} -> {}", r.lhs, r.rhs);
    }
    s.push_str("}\n");
    s
}

pub fn print_cfg(name: &str, g: &Cfg) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "cfg {name} {{");
    let _ = writeln!(s, "  terminals {}", join(&g.terminals));
    let _ = writeln!(s, "  nonterminals {}", join(&g.nonterminals));
    let _ = writeln!(s, "  start {}", g.start);
    for r in &g.rules {
        if r.rhs.is_empty() {
            let _ = writeln!(s, "  rule {} -> eps", r.lhs);
        } else {
            let _ = writeln!(s, "  rule {} -> {}", r.lhs, r.rhs.join(" "));
        }
    }
    s.push_str("}\n");
    s
}

pub fn print_hom(name: &str, h: &TreeHom) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "hom {name} {{");
    let _ = writeln!(s, "  from {} to {}", h.source.name(), h.target.name());
    for ((sym, k), image) in &h.map {
        let _ = writeln!(s, "  map {sym}/{k} -> {image}");
    }
    s.push_str("}\n");
    s
}

pub fn print_rel(name: &str, r: &Relabeling) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "rel {name} {{");
    let _ = writeln!(s, "  from {} to {}", r.source.name(), r.target.name());
    for ((sym, k), images) in &r.map {
        let _ = writeln!(s, "  map {sym}/{k} -> {{ {} }}", join(images));
    }
    s.push_str("}\n");
    s
}

pub fn print_buftt(name: &str, m: &BuFtt) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "buftt {name} {{");
    let _ = writeln!(s, "  input {} output {}", m.input.name(), m.output.name());
    let _ = writeln!(s, "  states {}", join(&m.states));
    let _ = writeln!(s, "  final {}", join(&m.finals));
    for r in &m.rules {
        if r.child_states.is_empty() {
            let _ = writeln!(s, "  rule {} -> {}[{}]", r.sym, r.state, r.rhs);
        } else {
            let _ = writeln!(
                s,
                "  rule {}({}) -> {}[{}]",
                r.sym,
                r.child_states.join(","),
                r.state,
                r.rhs
            );
        }
    }
    s.push_str("}\n");
    s
}

fn print_td_rule(s: &mut String, r: &TdRule, look_names: &BTreeMap<usize, String>) {
    let lhs_vars = (1..=r.rank).map(|i| format!("x{i}")).collect::<Vec<_>>();
    if r.rank == 0 {
        let _ = write!(s, "  rule {}[{}] -> {}", r.state, r.sym, r.rhs);
    } else {
        let _ = write!(
            s,
            "  rule {}[{}({})] -> {}",
            r.state,
            r.sym,
            lhs_vars.join(","),
            r.rhs
        );
    }
    if !look_names.is_empty() {
        let clauses: Vec<String> = look_names
            .iter()
            .map(|(i, name)| format!("x{i}:@{name}"))
            .collect();
        let _ = write!(s, " where {}", clauses.join(", "));
    }
    s.push('\n');
}

pub fn print_tdftt(name: &str, m: &TdFtt) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "tdftt {name} {{");
    let _ = writeln!(s, "  input {} output {}", m.input.name(), m.output.name());
    let _ = writeln!(s, "  states {}", join(&m.states));
    let _ = writeln!(s, "  initial {}", join(&m.initials));
    for r in &m.rules {
        print_td_rule(&mut s, r, &BTreeMap::new());
    }
    s.push_str("}\n");
    s
}

/// Look-ahead machines print their guard automata as auxiliary fta blocks
/// named `{name}.la{i}`, then reference them.
pub fn print_tdrftt(name: &str, m: &TdrFtt) -> String {
    let mut s = String::new();
    let languages = m.lookahead_languages();
    for (i, a) in languages.iter().enumerate() {
        s.push_str(&print_fta(&format!("{name}.la{}", i + 1), a));
    }
    let _ = writeln!(s, "tdrftt {name} {{");
    let _ = writeln!(s, "  input {} output {}", m.input.name(), m.output.name());
    let _ = writeln!(s, "  states {}", join(&m.states));
    let _ = writeln!(s, "  initial {}", join(&m.initials));
    for r in &m.rules {
        let look_names: BTreeMap<usize, String> = r
            .look
            .iter()
            .map(|(i, a)| {
                let idx = languages.iter().position(|l| l == a).expect("collected");
                (*i, format!("{name}.la{}", idx + 1))
            })
            .collect();
        print_td_rule(&mut s, r, &look_names);
    }
    s.push_str("}\n");
    s
}

pub fn print_stage(name: &str, stage: &Stage) -> String {
    match stage {
        Stage::Rel(r) => print_rel(name, r),
        Stage::Fta(a) => print_fta(name, a),
        Stage::Hom(h) => print_hom(name, h),
        Stage::Bu(m) => print_buftt(name, m),
        Stage::Td(m) => print_tdftt(name, m),
        Stage::Tdr(m) => print_tdrftt(name, m),
    }
}
