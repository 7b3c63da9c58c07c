//! Batch evaluation over tree sets. Enumeration-backed oracles sweep an
//! automaton or transducer over thousands of trees; these helpers run such
//! sweeps, data-parallel via rayon when the `parallel` feature is on. The
//! `*_seq` variants always run sequentially and exist so benches can
//! compare the two directly.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::fta::NbuFta;
use crate::transduce::BuFtt;
use crate::tree::Tree;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Acceptance verdict for every tree of a slice.
pub fn run_all(a: &NbuFta, trees: &[Tree]) -> Vec<bool> {
    #[cfg(feature = "parallel")]
    {
        trees.par_iter().map(|t| a.accepts(t)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_all_seq(a, trees)
    }
}

/// Sequential twin of [`run_all`].
pub fn run_all_seq(a: &NbuFta, trees: &[Tree]) -> Vec<bool> {
    trees.iter().map(|t| a.accepts(t)).collect()
}

/// The accepted subset of a slice, preserving order.
pub fn accepted(a: &NbuFta, trees: &[Tree]) -> Vec<Tree> {
    run_all(a, trees)
        .into_iter()
        .zip(trees)
        .filter(|(ok, _)| *ok)
        .map(|(_, t)| t.clone())
        .collect()
}

/// Output image of a bottom-up transducer on every tree of a slice.
pub fn image_all(m: &BuFtt, trees: &[Tree]) -> Result<Vec<BTreeSet<Tree>>> {
    #[cfg(feature = "parallel")]
    {
        trees
            .par_iter()
            .map(|t| m.apply(t).map(|r| r.image))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        image_all_seq(m, trees)
    }
}

/// Sequential twin of [`image_all`].
pub fn image_all_seq(m: &BuFtt, trees: &[Tree]) -> Result<Vec<BTreeSet<Tree>>> {
    trees.iter().map(|t| m.apply(t).map(|r| r.image)).collect()
}
