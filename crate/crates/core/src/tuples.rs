//! Lexicographic enumeration of index tuples in a product of finite lists.

use crate::error::{Error, Result};

/// Size of the product, or `TooLarge` past `cap`.
pub(crate) fn count(sizes: &[usize], cap: usize) -> Result<usize> {
    let mut total: usize = 1;
    for &s in sizes {
        total = match total.checked_mul(s) {
            Some(t) if t <= cap => t,
            _ => {
                return Err(Error::TooLarge {
                    what: "tuples",
                    size: sizes.iter().fold(1usize, |a, &b| a.saturating_mul(b)),
                    cap,
                })
            }
        };
    }
    Ok(total)
}

/// Writes the positions of tuple number `k` (last coordinate fastest).
pub(crate) fn decode(mut k: usize, sizes: &[usize], out: &mut [usize]) {
    for (slot, &s) in out.iter_mut().zip(sizes).rev() {
        *slot = k % s;
        k /= s;
    }
}

/// The tuple number `k` mapped through per-coordinate lists.
pub(crate) fn nth(k: usize, lists: &[Vec<usize>]) -> Vec<usize> {
    let sizes: Vec<usize> = lists.iter().map(Vec::len).collect();
    let mut pos = vec![0; lists.len()];
    decode(k, &sizes, &mut pos);
    pos.iter().zip(lists).map(|(&p, l)| l[p]).collect()
}
