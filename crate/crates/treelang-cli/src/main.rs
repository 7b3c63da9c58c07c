//! Command-line front end: loads definition files, dispatches one library
//! operation per invocation, prints canonical results. Verdicts print as
//! `yes`/`no`; trees print as canonical terms, one per line in canonical
//! order; constructed objects re-emit in their block syntax.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use treelang::error::Error;
use treelang::fta;
use treelang::grammar;
use treelang::langops;
use treelang::surface;
use treelang::text::{self, Workspace};
use treelang::transduce::{self, Stage};
use treelang::tree::{canonical_sort, Tree};
use treelang::{parse_term, Result};

#[derive(Parser)]
#[command(
    name = "treelang",
    about = "Recognizable tree languages and tree transducers",
    version
)]
struct Cli {
    /// Definition files; repeated flags merge into one workspace.
    #[arg(long = "file", global = true)]
    files: Vec<PathBuf>,

    /// Height bound for enumeration-backed commands.
    #[arg(long, global = true, default_value_t = 3)]
    max_height: usize,

    /// Size bound for enumerations and output sets.
    #[arg(long, global = true, default_value_t = 100_000)]
    cap: usize,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct TreeArg {
    /// A term, e.g. 'b[a b[a a]]'.
    #[arg(long)]
    tree: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a term and print its canonical form.
    Parse(TreeArg),
    /// Print the yield of a tree.
    Yield(TreeArg),
    /// Print the height of a tree.
    Height(TreeArg),
    /// Print the root-to-leaf label strings of a tree.
    Paths(TreeArg),
    /// Enumerate trees of an alphabet or the language of a grammar.
    Enumerate {
        #[arg(long, conflicts_with = "rtg")]
        alphabet: Option<String>,
        #[arg(long)]
        rtg: Option<String>,
    },
    /// Run an automaton on a tree.
    Run {
        /// Automaton name; all automaton kinds are searched.
        #[arg(long)]
        fta: String,
        #[arg(long)]
        tree: String,
    },
    /// Subset construction of a nondeterministic automaton.
    Determinize {
        #[arg(long)]
        fta: String,
    },
    /// Complement of a tree language.
    Complement {
        #[arg(long)]
        fta: String,
    },
    /// Intersection of two tree languages.
    Intersect {
        #[arg(long = "fta", num_args = 1, action = clap::ArgAction::Append)]
        ftas: Vec<String>,
    },
    /// Union of two tree languages.
    Union {
        #[arg(long = "fta", num_args = 1, action = clap::ArgAction::Append)]
        ftas: Vec<String>,
    },
    /// Emptiness of a tree language, with a witness when nonempty.
    Empty {
        #[arg(long)]
        fta: String,
    },
    /// Finiteness of a tree language.
    Finite {
        #[arg(long)]
        fta: String,
    },
    /// Language inclusion of two automata.
    Subset {
        #[arg(long = "fta", num_args = 1, action = clap::ArgAction::Append)]
        ftas: Vec<String>,
    },
    /// Language equivalence of two automata.
    Equiv {
        #[arg(long = "fta", num_args = 1, action = clap::ArgAction::Append)]
        ftas: Vec<String>,
    },
    /// Pumping decomposition of an accepted tree.
    Pump {
        #[arg(long)]
        dfta: String,
        #[arg(long)]
        tree: String,
    },
    /// Automaton for the trees whose yield lies in a regular language.
    YieldRegular {
        #[arg(long)]
        alphabet: String,
        #[arg(long)]
        dfa: String,
    },
    /// Normal form of a regular tree grammar.
    Normalize {
        #[arg(long)]
        rtg: String,
    },
    /// Automaton of a regular tree grammar.
    ToFta {
        #[arg(long)]
        rtg: String,
    },
    /// Grammar of an automaton.
    ToRtg {
        #[arg(long)]
        fta: String,
    },
    /// Word grammar of the yields of a tree grammar.
    YieldCfg {
        #[arg(long)]
        rtg: String,
    },
    /// Tree grammar whose yields are a word grammar's language.
    FromCfg {
        #[arg(long)]
        cfg: String,
    },
    /// Grammar of derivation trees with the given top symbols.
    DerivTrees {
        #[arg(long)]
        cfg: String,
        #[arg(long = "top", num_args = 1, action = clap::ArgAction::Append)]
        tops: Vec<String>,
    },
    /// Grammar of rule trees; for a tree grammar, also the projection
    /// recovering the original language.
    RuleTrees {
        #[arg(long, conflicts_with = "rtg")]
        cfg: Option<String>,
        #[arg(long)]
        rtg: Option<String>,
    },
    /// Grammar of bare derivation trees.
    Bare {
        #[arg(long)]
        cfg: String,
    },
    /// Structural equivalence of two word grammars.
    StructEquiv {
        #[arg(long = "cfg", num_args = 1, action = clap::ArgAction::Append)]
        cfgs: Vec<String>,
    },
    /// Intersection of a word grammar with a regular language.
    CfgIntersect {
        #[arg(long)]
        cfg: String,
        #[arg(long)]
        dfa: String,
    },
    /// Homomorphic image of one tree.
    ApplyHom {
        #[arg(long)]
        hom: String,
        #[arg(long)]
        tree: String,
    },
    /// Automaton of the inverse homomorphic image of a language.
    InvHom {
        #[arg(long)]
        hom: String,
        #[arg(long)]
        dfta: String,
    },
    /// Relabelings of one tree, or the relabeled grammar.
    Relabel {
        #[arg(long)]
        rel: String,
        #[arg(long, conflicts_with = "rtg")]
        tree: Option<String>,
        #[arg(long)]
        rtg: Option<String>,
    },
    /// Image of a grammar under a linear homomorphism.
    HomImage {
        #[arg(long)]
        hom: String,
        #[arg(long)]
        rtg: String,
    },
    /// Regular tree expression of a grammar.
    Kleene {
        #[arg(long)]
        rtg: String,
    },
    /// Grammar of a regular tree expression.
    KleeneEval {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        alphabet: String,
    },
    /// Apply a transducer to a tree and print the image set.
    Transduce {
        #[arg(long)]
        ftt: String,
        #[arg(long)]
        tree: String,
    },
    /// Shape flags of a transducer.
    Classify {
        #[arg(long)]
        ftt: String,
    },
    /// Embed a homomorphism, relabeling or automaton as a transducer.
    Embed {
        #[arg(long, conflicts_with_all = ["rel", "fta"])]
        hom: Option<String>,
        #[arg(long, conflicts_with = "fta")]
        rel: Option<String>,
        #[arg(long)]
        fta: Option<String>,
        #[arg(long, value_parser = ["bu", "td"])]
        direction: String,
    },
    /// Convert a transducer between the bottom-up and top-down kinds.
    Convert {
        #[arg(long)]
        ftt: String,
        #[arg(long, value_parser = ["nlb_to_nlt", "nlt_to_nlb", "lt_to_lb", "lb_to_ltr"])]
        scheme: String,
    },
    /// Decompose a transducer into simpler phases.
    Decompose {
        #[arg(long)]
        ftt: String,
        #[arg(long, value_parser = ["bu_qrel_hom", "qrel_rel_fta_proj", "td_copy_hom_lt", "ldt_qrel_lhom", "tdr_remove_lookahead"])]
        scheme: String,
    },
    /// Compose two transducers of the same family.
    Compose {
        #[arg(long = "ftt", num_args = 1, action = clap::ArgAction::Append)]
        ftts: Vec<String>,
    },
    /// Domain automaton of a transducer.
    Domain {
        #[arg(long)]
        ftt: String,
    },
    /// Automaton of the inverse image of a language under a transducer.
    InvImage {
        #[arg(long)]
        ftt: String,
        #[arg(long)]
        fta: String,
    },
    /// Emptiness of a chain's surface language.
    ChainEmpty {
        #[arg(long)]
        chain: String,
    },
    /// Membership of a tree in a chain's surface language.
    ChainMember {
        #[arg(long)]
        chain: String,
        #[arg(long)]
        tree: String,
    },
    /// Finiteness of a chain's surface language.
    ChainFinite {
        #[arg(long)]
        chain: String,
    },
    /// Emptiness of a chain's target language.
    TargetEmpty {
        #[arg(long)]
        chain: String,
    },
    /// Membership of a word in a chain's target language.
    TargetMember {
        #[arg(long)]
        chain: String,
        /// Whitespace-separated symbols, or one character per symbol.
        #[arg(long)]
        word: String,
    },
    /// Finiteness of a chain's target language.
    TargetFinite {
        #[arg(long)]
        chain: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Syntax { .. } | Error::BadSymbol(..) => 3,
        Error::UnknownName { .. } => 4,
        Error::UnresolvedReference(_) | Error::AlphabetMismatch(_) => 5,
        Error::FlagViolation(_) | Error::Unsupported(_) => 6,
        Error::CapExceeded { .. } => 7,
        _ => 1,
    }
}

fn load(files: &[PathBuf]) -> Result<Workspace> {
    let mut ws = Workspace::default();
    for f in files {
        let content = std::fs::read_to_string(f).map_err(|e| Error::IllFormed {
            kind: "file".into(),
            msg: format!("{}: {e}", f.display()),
        })?;
        ws.extend_from(&content)?;
    }
    Ok(ws)
}

fn yes_no(v: bool) -> &'static str {
    if v {
        "yes\n"
    } else {
        "no\n"
    }
}

fn print_trees(ts: impl IntoIterator<Item = Tree>) -> String {
    let mut out = String::new();
    for t in canonical_sort(ts.into_iter().collect()) {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    out
}

fn two<'a>(items: &'a [String], what: &str) -> Result<(&'a str, &'a str)> {
    if items.len() != 2 {
        return Err(Error::IllFormed {
            kind: "usage".into(),
            msg: format!("exactly two --{what} flags are required"),
        });
    }
    Ok((&items[0], &items[1]))
}

fn parse_word(word: &str) -> Vec<String> {
    if word.contains(char::is_whitespace) {
        word.split_whitespace().map(String::from).collect()
    } else {
        word.chars().map(|c| c.to_string()).collect()
    }
}

fn run(cli: Cli) -> Result<String> {
    let ws = load(&cli.files)?;
    let max_height = cli.max_height;
    let cap = cli.cap;
    let named_rtg = |name: &str| -> Result<grammar::Rtg> {
        ws.rtgs.get(name).cloned().ok_or_else(|| Error::UnknownName {
            kind: "rtg".into(),
            name: name.into(),
        })
    };
    let named_cfg = |name: &str| -> Result<grammar::Cfg> {
        ws.cfgs.get(name).cloned().ok_or_else(|| Error::UnknownName {
            kind: "cfg".into(),
            name: name.into(),
        })
    };
    let named_hom = |name: &str| -> Result<langops::TreeHom> {
        ws.homs.get(name).cloned().ok_or_else(|| Error::UnknownName {
            kind: "hom".into(),
            name: name.into(),
        })
    };
    let named_dfa = |name: &str| -> Result<fta::Dfa> {
        ws.dfas.get(name).cloned().ok_or_else(|| Error::UnknownName {
            kind: "dfa".into(),
            name: name.into(),
        })
    };
    let named_chain = |name: &str| -> Result<surface::TransducerChain> {
        ws.chains
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownName {
                kind: "chain".into(),
                name: name.into(),
            })
    };

    Ok(match cli.cmd {
        Cmd::Parse(a) => format!("{}\n", parse_term(&a.tree)?),
        Cmd::Yield(a) => format!("{}\n", parse_term(&a.tree)?.yield_string()),
        Cmd::Height(a) => format!("{}\n", parse_term(&a.tree)?.height()),
        Cmd::Paths(a) => {
            let mut out = String::new();
            for p in parse_term(&a.tree)?.paths() {
                out.push_str(&p.join(""));
                out.push('\n');
            }
            out
        }
        Cmd::Enumerate { alphabet, rtg } => {
            let ts = if let Some(name) = alphabet {
                treelang::enumerate::enumerate_trees(ws.alphabet(&name)?, max_height, cap)?
            } else if let Some(name) = rtg {
                grammar::enumerate_rtg(&named_rtg(&name)?, max_height, cap)?
            } else {
                return Err(Error::IllFormed {
                    kind: "usage".into(),
                    msg: "enumerate needs --alphabet or --rtg".into(),
                });
            };
            print_trees(ts)
        }
        Cmd::Run { fta: name, tree } => {
            let t = parse_term(&tree)?;
            if let Some(a) = ws.dftas.get(&name) {
                let q = a.run(&t)?;
                format!("state: {q}\naccepted: {}", yes_no(a.finals.contains(&q)))
            } else if let Some(a) = ws.ftas.get(&name) {
                let qs = a.run(&t);
                format!(
                    "states: {}\naccepted: {}",
                    qs.iter().cloned().collect::<Vec<_>>().join(" "),
                    yes_no(a.accepts(&t))
                )
            } else if let Some(a) = ws.tdftas.get(&name) {
                let qs = a.run(&t)?;
                format!(
                    "states: {}\naccepted: {}",
                    qs.iter().cloned().collect::<Vec<_>>().join(" "),
                    yes_no(a.accepts(&t)?)
                )
            } else if let Some(a) = ws.ntdftas.get(&name) {
                let qs = a.run(&t);
                format!(
                    "states: {}\naccepted: {}",
                    qs.iter().cloned().collect::<Vec<_>>().join(" "),
                    yes_no(a.accepts(&t))
                )
            } else {
                return Err(Error::UnknownName {
                    kind: "automaton".into(),
                    name,
                });
            }
        }
        Cmd::Determinize { fta: name } => {
            text::print_dfta("result", &fta::determinize(&ws.any_fta(&name)?))
        }
        Cmd::Complement { fta: name } => {
            text::print_fta("result", &fta::complement(&ws.any_fta(&name)?))
        }
        Cmd::Intersect { ftas } => {
            let (a, b) = two(&ftas, "fta")?;
            text::print_fta(
                "result",
                &fta::intersection(&ws.any_fta(a)?, &ws.any_fta(b)?)?,
            )
        }
        Cmd::Union { ftas } => {
            let (a, b) = two(&ftas, "fta")?;
            text::print_fta("result", &fta::union(&ws.any_fta(a)?, &ws.any_fta(b)?)?)
        }
        Cmd::Empty { fta: name } => {
            let (empty, witness) = fta::decide_empty(&ws.any_fta(&name)?);
            let mut out = yes_no(empty).to_string();
            if let Some(w) = witness {
                out.push_str(&format!("witness: {w}\n"));
            }
            out
        }
        Cmd::Finite { fta: name } => yes_no(fta::decide_finite(&ws.any_fta(&name)?)).to_string(),
        Cmd::Subset { ftas } => {
            let (a, b) = two(&ftas, "fta")?;
            yes_no(fta::decide_inclusion(&ws.any_fta(a)?, &ws.any_fta(b)?)?).to_string()
        }
        Cmd::Equiv { ftas } => {
            let (a, b) = two(&ftas, "fta")?;
            yes_no(fta::equivalent(&ws.any_fta(a)?, &ws.any_fta(b)?)?).to_string()
        }
        Cmd::Pump { dfta: name, tree } => {
            let a = ws.dftas.get(&name).ok_or_else(|| Error::UnknownName {
                kind: "dfta".into(),
                name: name.clone(),
            })?;
            let d = fta::pump(a, &parse_term(&tree)?)?;
            format!("outer: {}\ncycle: {}\nbase: {}\n", d.outer, d.cycle, d.base)
        }
        Cmd::YieldRegular { alphabet, dfa } => text::print_fta(
            "result",
            &fta::yield_in_regular(ws.alphabet(&alphabet)?, &named_dfa(&dfa)?)?,
        ),
        Cmd::Normalize { rtg } => {
            text::print_rtg("result", &grammar::normalize_rtg(&named_rtg(&rtg)?))
        }
        Cmd::ToFta { rtg } => text::print_fta("result", &grammar::rtg_to_fta(&named_rtg(&rtg)?)),
        Cmd::ToRtg { fta: name } => {
            text::print_rtg("result", &grammar::fta_to_rtg(&ws.any_fta(&name)?))
        }
        Cmd::YieldCfg { rtg } => text::print_cfg("result", &grammar::yield_cfg(&named_rtg(&rtg)?)?),
        Cmd::FromCfg { cfg } => {
            let (rtg, star) = grammar::cfg_to_rtg(&named_cfg(&cfg)?)?;
            let mut out = text::print_alphabet(&rtg.terminals);
            out.push_str(&text::print_rtg("result", &rtg));
            if star != "*" {
                out.push_str(&format!("# internal symbol renamed to {star}\n"));
            }
            out
        }
        Cmd::DerivTrees { cfg, tops } => {
            let g = named_cfg(&cfg)?;
            let tops: BTreeSet<String> = if tops.is_empty() {
                BTreeSet::from([g.start.clone()])
            } else {
                tops.into_iter().collect()
            };
            let d = grammar::derivation_grammar(&g, &tops)?;
            let mut out = text::print_alphabet(&d.terminals);
            out.push_str(&text::print_rtg("result", &d));
            out
        }
        Cmd::RuleTrees { cfg, rtg } => {
            if let Some(cfg) = cfg {
                let (rt, table) = grammar::rule_tree_grammar(&named_cfg(&cfg)?)?;
                let mut out = text::print_alphabet(&rt.terminals);
                out.push_str(&text::print_rtg("result", &rt));
                for (name, rule) in table {
                    if rule.rhs.is_empty() {
                        out.push_str(&format!("# {name}: {} -> eps\n", rule.lhs));
                    } else {
                        out.push_str(&format!(
                            "# {name}: {} -> {}\n",
                            rule.lhs,
                            rule.rhs.join(" ")
                        ));
                    }
                }
                out
            } else if let Some(rtg) = rtg {
                let (barred, projection) = grammar::rule_tree_projection(&named_rtg(&rtg)?)?;
                let mut out = text::print_alphabet(&barred.terminals);
                out.push_str(&text::print_rtg("result", &barred));
                out.push_str(&text::print_rel("projection", &projection));
                out
            } else {
                return Err(Error::IllFormed {
                    kind: "usage".into(),
                    msg: "rule-trees needs --cfg or --rtg".into(),
                });
            }
        }
        Cmd::Bare { cfg } => {
            let bt = grammar::bare_tree_grammar(&named_cfg(&cfg)?)?;
            let mut out = text::print_alphabet(&bt.terminals);
            out.push_str(&text::print_rtg("result", &bt));
            out
        }
        Cmd::StructEquiv { cfgs } => {
            let (a, b) = two(&cfgs, "cfg")?;
            yes_no(grammar::structurally_equivalent(
                &named_cfg(a)?,
                &named_cfg(b)?,
            )?)
            .to_string()
        }
        Cmd::CfgIntersect { cfg, dfa } => text::print_cfg(
            "result",
            &grammar::cfg_intersect_regular(&named_cfg(&cfg)?, &named_dfa(&dfa)?)?,
        ),
        Cmd::ApplyHom { hom, tree } => {
            format!(
                "{}\n",
                langops::apply_hom(&named_hom(&hom)?, &parse_term(&tree)?)?
            )
        }
        Cmd::InvHom { hom, dfta } => {
            let a = ws.dftas.get(&dfta).ok_or_else(|| Error::UnknownName {
                kind: "dfta".into(),
                name: dfta.clone(),
            })?;
            text::print_dfta("result", &langops::inverse_hom(&named_hom(&hom)?, a)?)
        }
        Cmd::Relabel { rel, tree, rtg } => {
            let r = ws.rels.get(&rel).ok_or_else(|| Error::UnknownName {
                kind: "rel".into(),
                name: rel.clone(),
            })?;
            if let Some(tree) = tree {
                print_trees(langops::apply_relabeling(r, &parse_term(&tree)?)?)
            } else if let Some(rtg) = rtg {
                text::print_rtg("result", &langops::relabel_image(r, &named_rtg(&rtg)?)?)
            } else {
                return Err(Error::IllFormed {
                    kind: "usage".into(),
                    msg: "relabel needs --tree or --rtg".into(),
                });
            }
        }
        Cmd::HomImage { hom, rtg } => text::print_rtg(
            "result",
            &langops::linear_hom_image(&named_hom(&hom)?, &named_rtg(&rtg)?)?,
        ),
        Cmd::Kleene { rtg } => format!("{}\n", langops::kleene(&named_rtg(&rtg)?)?),
        Cmd::KleeneEval { expr, alphabet } => {
            let e = langops::parse_regexpr(&expr)?;
            text::print_rtg(
                "result",
                &langops::eval_regexpr(&e, ws.alphabet(&alphabet)?)?,
            )
        }
        Cmd::Transduce { ftt, tree } => {
            let t = parse_term(&tree)?;
            let stage = ws.any_transducer(&ftt)?;
            print_trees(stage.apply(&t)?)
        }
        Cmd::Classify { ftt } => {
            let flags = match ws.any_transducer(&ftt)? {
                Stage::Bu(m) => transduce::classify(&m),
                Stage::Td(m) => transduce::classify_td(&m.to_lookahead())?,
                Stage::Tdr(m) => transduce::classify_td(&m)?,
                _ => {
                    return Err(Error::UnknownName {
                        kind: "transducer".into(),
                        name: ftt,
                    })
                }
            };
            format!(
                "linear: {}nondeleting: {}pure: {}deterministic: {}total_deterministic: {}qrel: {}",
                yes_no(flags.linear),
                yes_no(flags.nondeleting),
                yes_no(flags.pure),
                yes_no(flags.deterministic),
                yes_no(flags.total_deterministic),
                yes_no(flags.qrel),
            )
        }
        Cmd::Embed {
            hom,
            rel,
            fta: fta_name,
            direction,
        } => {
            let bu = direction == "bu";
            if let Some(hom) = hom {
                let h = named_hom(&hom)?;
                if bu {
                    text::print_buftt("result", &transduce::embed_hom_bu(&h))
                } else {
                    text::print_tdftt("result", &transduce::embed_hom_td(&h))
                }
            } else if let Some(rel) = rel {
                let r = ws.rels.get(&rel).ok_or_else(|| Error::UnknownName {
                    kind: "rel".into(),
                    name: rel.clone(),
                })?;
                if bu {
                    text::print_buftt("result", &transduce::embed_relabeling_bu(r))
                } else {
                    text::print_tdftt("result", &transduce::embed_relabeling_td(r))
                }
            } else if let Some(name) = fta_name {
                let a = ws.any_fta(&name)?;
                if bu {
                    text::print_buftt("result", &transduce::embed_fta_bu(&a))
                } else {
                    text::print_tdftt("result", &transduce::embed_fta_td(&a))
                }
            } else {
                return Err(Error::IllFormed {
                    kind: "usage".into(),
                    msg: "embed needs --hom, --rel or --fta".into(),
                });
            }
        }
        Cmd::Convert { ftt, scheme } => {
            let stage = ws.any_transducer(&ftt)?;
            match (scheme.as_str(), stage) {
                ("nlb_to_nlt", Stage::Bu(m)) => {
                    text::print_tdftt("result", &transduce::nlb_to_nlt(&m)?)
                }
                ("nlt_to_nlb", Stage::Td(m)) => {
                    text::print_buftt("result", &transduce::nlt_to_nlb(&m)?)
                }
                ("lt_to_lb", Stage::Td(m)) => {
                    let out = transduce::lt_to_lb(&m)?;
                    let mut s = text::print_alphabet(&out.output);
                    s.push_str(&text::print_buftt("result", &out));
                    s
                }
                ("lb_to_ltr", Stage::Bu(m)) => {
                    text::print_tdrftt("result", &transduce::lb_to_ltr(&m)?)
                }
                (scheme, _) => {
                    return Err(Error::FlagViolation(format!(
                        "scheme {scheme} does not apply to this transducer kind"
                    )))
                }
            }
        }
        Cmd::Decompose { ftt, scheme } => {
            let stage = ws.any_transducer(&ftt)?;
            match (scheme.as_str(), stage) {
                ("bu_qrel_hom", Stage::Bu(m)) => {
                    let (qrel, hom) = transduce::decompose_bu_qrel_hom(&m)?;
                    let mut s = text::print_alphabet(&qrel.output);
                    s.push_str(&text::print_buftt("relabeler", &qrel));
                    s.push_str(&text::print_hom("expander", &hom));
                    s
                }
                ("qrel_rel_fta_proj", Stage::Bu(m)) => {
                    let (rel, checker, proj) = transduce::decompose_qrel_rel_fta_proj(&m)?;
                    let mut s = text::print_alphabet(&rel.target);
                    s.push_str(&text::print_rel("guesser", &rel));
                    s.push_str(&text::print_fta("checker", &checker));
                    s.push_str(&text::print_rel("projector", &proj));
                    s
                }
                ("td_copy_hom_lt", Stage::Td(m)) => {
                    let (hom, lt) = transduce::decompose_td_copy_hom_lt(&m)?;
                    let mut s = text::print_alphabet(&hom.target);
                    s.push_str(&text::print_hom("copier", &hom));
                    s.push_str(&text::print_tdftt("linearized", &lt));
                    s
                }
                ("ldt_qrel_lhom", Stage::Td(m)) => {
                    let (qrel, hom) = transduce::decompose_ldt_qrel_lhom(&m)?;
                    let mut s = text::print_alphabet(&qrel.output);
                    s.push_str(&text::print_tdftt("relabeler", &qrel));
                    s.push_str(&text::print_hom("expander", &hom));
                    s
                }
                ("tdr_remove_lookahead", Stage::Tdr(m)) => {
                    let (relabeler, td) = transduce::decompose_tdr_remove_lookahead(&m)?;
                    let mut s = text::print_alphabet(&relabeler.output);
                    s.push_str(&text::print_buftt("annotator", &relabeler));
                    s.push_str(&text::print_tdftt("reader", &td));
                    s
                }
                (scheme, _) => {
                    return Err(Error::FlagViolation(format!(
                        "scheme {scheme} does not apply to this transducer kind"
                    )))
                }
            }
        }
        Cmd::Compose { ftts } => {
            let (a, b) = two(&ftts, "ftt")?;
            let sa = ws.any_transducer(a)?;
            let sb = ws.any_transducer(b)?;
            match (sa, sb) {
                (Stage::Bu(m), Stage::Bu(n)) => {
                    text::print_buftt("result", &transduce::compose_bu(&m, &n)?)
                }
                (Stage::Td(m), Stage::Td(n)) => text::print_tdrftt(
                    "result",
                    &transduce::compose_tdr(&m.to_lookahead(), &n.to_lookahead())?,
                ),
                (Stage::Tdr(m), Stage::Tdr(n)) => {
                    text::print_tdrftt("result", &transduce::compose_tdr(&m, &n)?)
                }
                (Stage::Td(m), Stage::Tdr(n)) => {
                    text::print_tdrftt("result", &transduce::compose_tdr(&m.to_lookahead(), &n)?)
                }
                (Stage::Tdr(m), Stage::Td(n)) => {
                    text::print_tdrftt("result", &transduce::compose_tdr(&m, &n.to_lookahead())?)
                }
                _ => {
                    return Err(Error::Unsupported(
                        "compose needs two bottom-up or two top-down transducers".into(),
                    ))
                }
            }
        }
        Cmd::Domain { ftt } => {
            let dom = match ws.any_transducer(&ftt)? {
                Stage::Bu(m) => transduce::domain_of_bu(&m),
                Stage::Td(m) => transduce::domain_of_td(&m)?,
                Stage::Tdr(m) => transduce::domain_of_tdr(&m)?,
                _ => {
                    return Err(Error::UnknownName {
                        kind: "transducer".into(),
                        name: ftt,
                    })
                }
            };
            text::print_fta("result", &dom)
        }
        Cmd::InvImage { ftt, fta: name } => {
            let Stage::Bu(m) = ws.any_transducer(&ftt)? else {
                return Err(Error::FlagViolation(
                    "inverse images run on bottom-up transducers".into(),
                ));
            };
            text::print_fta(
                "result",
                &transduce::inverse_image(&m, &ws.any_fta(&name)?)?,
            )
        }
        Cmd::ChainEmpty { chain } => {
            let d = surface::surface_empty(&named_chain(&chain)?)?;
            let mut out = yes_no(d.verdict).to_string();
            if let Some(w) = d.witness {
                out.push_str(&format!("witness: {w}\n"));
            }
            out
        }
        Cmd::ChainMember { chain, tree } => yes_no(surface::surface_member(
            &named_chain(&chain)?,
            &parse_term(&tree)?,
        )?)
        .to_string(),
        Cmd::ChainFinite { chain } => {
            yes_no(surface::surface_finite(&named_chain(&chain)?)?).to_string()
        }
        Cmd::TargetEmpty { chain } => {
            yes_no(surface::target_empty(&named_chain(&chain)?)?).to_string()
        }
        Cmd::TargetMember { chain, word } => yes_no(surface::target_member(
            &named_chain(&chain)?,
            &parse_word(&word),
        )?)
        .to_string(),
        Cmd::TargetFinite { chain } => {
            yes_no(surface::target_finite(&named_chain(&chain)?)?).to_string()
        }
    })
}
