//! Bounded brute-force enumeration of `T_Σ`, the oracle basis for every
//! test suite in the crate. Results come back in the canonical order
//! (height, then printed form) so oracle comparisons are reproducible.

use std::collections::BTreeSet;

use crate::alphabet::RankedAlphabet;
use crate::error::{Error, Result};
use crate::tree::{canonical_sort, Tree};

pub const DEFAULT_CAP: usize = 100_000;

/// Exactly the set `{t ∈ T_Σ | height(t) ≤ max_height}`, in canonical
/// order. Errors out as soon as the intermediate set would pass `cap`.
pub fn enumerate_trees(
    alphabet: &RankedAlphabet,
    max_height: usize,
    cap: usize,
) -> Result<Vec<Tree>> {
    if cap == 0 {
        return Err(Error::ill_formed("enumerate_trees", "cap must be positive"));
    }
    let mut current: BTreeSet<Tree> = BTreeSet::new();
    for (s, k) in alphabet.pairs() {
        if k == 0 {
            current.insert(Tree::leaf(s));
        }
    }
    if current.len() > cap {
        return Err(Error::CapExceeded { cap });
    }
    for _ in 0..max_height {
        let mut next = current.clone();
        for (s, k) in alphabet.pairs() {
            if k == 0 {
                continue;
            }
            let mut stack: Vec<Vec<&Tree>> = vec![Vec::new()];
            // cartesian product current^k, depth-first to keep memory flat
            build_product(&current, k, &mut stack, &mut |children| {
                let t = Tree::node(s, children.iter().map(|c| (*c).clone()).collect());
                next.insert(t);
                if next.len() > cap {
                    return Err(Error::CapExceeded { cap });
                }
                Ok(())
            })?;
        }
        if next == current {
            break; // no taller trees exist
        }
        current = next;
    }
    Ok(canonical_sort(current.into_iter().collect()))
}

fn build_product<'a>(
    pool: &'a BTreeSet<Tree>,
    k: usize,
    partial: &mut Vec<Vec<&'a Tree>>,
    emit: &mut dyn FnMut(&[&'a Tree]) -> Result<()>,
) -> Result<()> {
    let cur = partial.last().cloned().unwrap_or_default();
    if cur.len() == k {
        return emit(&cur);
    }
    for t in pool {
        let mut nxt = cur.clone();
        nxt.push(t);
        partial.push(nxt);
        build_product(pool, k, partial, emit)?;
        partial.pop();
    }
    Ok(())
}

/// All k-tuples over a slice, in index order. Shared by the subset
/// construction and the product constructions downstream.
pub fn tuples<T: Clone>(pool: &[T], k: usize) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::with_capacity(out.len() * pool.len().max(1));
        for prefix in &out {
            for item in pool {
                let mut row = prefix.clone();
                row.push(item.clone());
                next.push(row);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha(entries: &[(&str, usize)]) -> RankedAlphabet {
        RankedAlphabet::new("t", entries).unwrap()
    }

    #[test]
    fn height_zero_is_just_leaves() {
        let a = alpha(&[("a", 0), ("b", 2)]);
        let ts = enumerate_trees(&a, 0, 100).unwrap();
        assert_eq!(ts, vec![Tree::leaf("a")]);
    }

    #[test]
    fn counts_follow_the_recurrence() {
        // c(0) = 1, c(h+1) = 1 + c(h)^2 over one leaf and one binary symbol
        let a = alpha(&[("a", 0), ("b", 2)]);
        let mut expected = 1usize;
        for h in 0..4 {
            let ts = enumerate_trees(&a, h, 100_000).unwrap();
            assert_eq!(ts.len(), expected, "height {h}");
            assert!(ts.iter().all(|t| t.height() <= h));
            expected = 1 + expected * expected;
        }
        // the five trees of height at most 2
        let ts = enumerate_trees(&a, 2, 100).unwrap();
        let printed: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
        assert_eq!(
            printed,
            vec!["a", "b[a a]", "b[a b[a a]]", "b[b[a a] a]", "b[b[a a] b[a a]]"]
        );
    }

    #[test]
    fn monadic_chains() {
        let a = RankedAlphabet::monadic("m", &["a"]).unwrap();
        let ts = enumerate_trees(&a, 3, 100).unwrap();
        assert_eq!(ts.len(), 4);
        assert_eq!(ts[0].to_string(), "e");
        assert_eq!(ts[3].to_string(), "a[a[a[e]]]");
    }

    #[test]
    fn cap_is_enforced() {
        let a = alpha(&[("a", 0), ("b", 2)]);
        assert_eq!(
            enumerate_trees(&a, 4, 20).unwrap_err(),
            Error::CapExceeded { cap: 20 }
        );
    }

    #[test]
    fn canonical_order_is_height_then_print() {
        let a = alpha(&[("a", 0), ("c", 0), ("b", 2)]);
        let ts = enumerate_trees(&a, 1, 100).unwrap();
        let printed: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
        assert_eq!(
            printed,
            vec!["a", "c", "b[a a]", "b[a c]", "b[c a]", "b[c c]"]
        );
    }
}
