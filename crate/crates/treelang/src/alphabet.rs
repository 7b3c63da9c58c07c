//! Ranked alphabets: finite symbol sets where every symbol carries one or
//! more arities. A symbol may have several ranks, so all keyed structures
//! downstream (transitions, grammar rules, homomorphism entries) key on the
//! pair (symbol, rank).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// Characters that may appear in a symbol.
pub fn is_symbol_char(c: char) -> bool {
    c.is_alphanumeric()
        || matches!(
            c,
            '+' | '-' | '*' | '/' | '.' | '<' | '>' | '=' | '_' | '!' | '~' | '∧' | '∨'
        )
}

/// Reserved single-character tokens that can never be part of a symbol.
pub const RESERVED: &[char] = &['[', ']', '(', ')', '{', '}', ',', ';', ':', '@', '#'];

/// True for `x1`, `x2`, ... — the reserved variable names.
pub fn is_variable_name(s: &str) -> bool {
    match s.strip_prefix('x') {
        Some(rest) => {
            !rest.is_empty()
                && rest.chars().all(|c| c.is_ascii_digit())
                && !rest.starts_with('0')
        }
        None => false,
    }
}

/// Checks that `s` is usable as a symbol: nonempty, made of symbol
/// characters, not a reserved token and not a variable name.
pub fn validate_symbol(s: &str) -> Result<()> {
    if s.is_empty() {
        return Err(Error::BadSymbol(s.to_string(), "empty".into()));
    }
    if let Some(c) = s.chars().find(|c| !is_symbol_char(*c)) {
        return Err(Error::BadSymbol(
            s.to_string(),
            format!("contains '{c}'"),
        ));
    }
    if is_variable_name(s) {
        return Err(Error::BadSymbol(
            s.to_string(),
            "collides with a variable name".into(),
        ));
    }
    Ok(())
}

/// A finite ranked alphabet. `ranks` maps each symbol to its nonempty set
/// of ranks.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RankedAlphabet {
    name: String,
    ranks: BTreeMap<String, BTreeSet<usize>>,
}

impl RankedAlphabet {
    pub fn new(name: impl Into<String>, entries: &[(&str, usize)]) -> Result<Self> {
        let mut a = RankedAlphabet {
            name: name.into(),
            ranks: BTreeMap::new(),
        };
        for (sym, k) in entries {
            a.add(sym, *k)?;
        }
        Ok(a)
    }

    pub fn empty(name: impl Into<String>) -> Self {
        RankedAlphabet {
            name: name.into(),
            ranks: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, symbol: &str, rank: usize) -> Result<()> {
        validate_symbol(symbol)?;
        self.ranks
            .entry(symbol.to_string())
            .or_default()
            .insert(rank);
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.ranks.contains_key(symbol)
    }

    pub fn has_rank(&self, symbol: &str, rank: usize) -> bool {
        self.ranks.get(symbol).is_some_and(|rs| rs.contains(&rank))
    }

    pub fn ranks_of(&self, symbol: &str) -> Option<&BTreeSet<usize>> {
        self.ranks.get(symbol)
    }

    /// All symbols carrying the given rank, in sorted order.
    pub fn symbols_with_rank(&self, rank: usize) -> Vec<&str> {
        self.ranks
            .iter()
            .filter(|(_, rs)| rs.contains(&rank))
            .map(|(s, _)| s.as_str())
            .collect()
    }

    /// All (symbol, rank) pairs, sorted.
    pub fn pairs(&self) -> Vec<(&str, usize)> {
        let mut out = Vec::new();
        for (s, rs) in &self.ranks {
            for &k in rs {
                out.push((s.as_str(), k));
            }
        }
        out
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.ranks.keys().map(|s| s.as_str())
    }

    pub fn max_rank(&self) -> usize {
        self.ranks
            .values()
            .flat_map(|rs| rs.iter().copied())
            .max()
            .unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Rank-wise union of two alphabets.
    pub fn union(&self, other: &RankedAlphabet) -> RankedAlphabet {
        let mut ranks = self.ranks.clone();
        for (s, rs) in &other.ranks {
            ranks.entry(s.clone()).or_default().extend(rs.iter().copied());
        }
        RankedAlphabet {
            name: format!("{}+{}", self.name, other.name),
            ranks,
        }
    }

    /// True when every (symbol, rank) of `self` also belongs to `other`.
    pub fn is_sub_alphabet_of(&self, other: &RankedAlphabet) -> bool {
        self.ranks.iter().all(|(s, rs)| {
            other
                .ranks
                .get(s)
                .is_some_and(|os| rs.is_subset(os))
        })
    }

    /// Rank-wise equality (names are ignored).
    pub fn same_ranks(&self, other: &RankedAlphabet) -> bool {
        self.ranks == other.ranks
    }

    pub fn require_same_ranks(&self, other: &RankedAlphabet) -> Result<()> {
        if self.same_ranks(other) {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch(format!(
                "'{}' and '{}' differ",
                self.name, other.name
            )))
        }
    }

    /// A monadic alphabet: rank-0 symbol `e`, every letter of `letters` at rank 1.
    pub fn monadic(name: impl Into<String>, letters: &[&str]) -> Result<Self> {
        let mut a = RankedAlphabet::empty(name);
        a.add("e", 0)?;
        for l in letters {
            a.add(l, 1)?;
        }
        Ok(a)
    }

    /// True iff the alphabet is monadic: rank 0 is exactly {e}, everything else rank 1.
    pub fn is_monadic(&self) -> bool {
        self.ranks.iter().all(|(s, rs)| {
            if s == "e" {
                rs.iter().all(|&k| k == 0)
            } else {
                rs.iter().all(|&k| k == 1)
            }
        }) && self.has_rank("e", 0)
    }

    /// Picks a symbol name not yet in the alphabet, starting from `base` and
    /// appending underscores until free.
    pub fn fresh_symbol(&self, base: &str) -> String {
        let mut cand = base.to_string();
        while self.contains(&cand) || validate_symbol(&cand).is_err() {
            cand.push('_');
        }
        cand
    }
}

impl fmt::Display for RankedAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "alphabet {} {{", self.name)?;
        let mut first = true;
        for (s, k) in self.pairs() {
            if first {
                write!(f, " ")?;
                first = false;
            } else {
                write!(f, " ")?;
            }
            write!(f, "{s}/{k}")?;
        }
        write!(f, " }}")
    }
}
