//! Longest common and weakly increasing subsequences of two words.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Word;

pub const LCIS_BRUTEFORCE_CAP: usize = 14;

/// Centering constant `e_max` of the common-and-increasing statistic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LciConfig {
    e_max: f64,
}

impl LciConfig {
    pub fn new(e_max: f64) -> Result<Self> {
        if !(e_max > 0.0 && e_max <= 1.0) {
            return Err(Error::OutOfDomain {
                what: "e_max",
                value: e_max,
                domain: "(0, 1]",
            });
        }
        Ok(Self { e_max })
    }

    pub fn e_max(&self) -> f64 {
        self.e_max
    }
}

/// `O(n_x · n_y)` dynamic programme.
///
/// `ending[j]` is the longest common weakly increasing subsequence that ends
/// by matching `y_j`. While scanning `y` for a fixed `x_i`, `carry` holds the
/// best value that may precede `x_i`; values matched against `x_i` itself are
/// folded into `carry` only as they stood before this row, so `x_i` is used
/// at most once.
pub fn lcis_dp(x: &Word, y: &Word) -> usize {
    let ys = y.letters();
    let mut ending = vec![0usize; ys.len()];
    for &a in x.letters() {
        let mut carry = 0usize;
        for (j, &b) in ys.iter().enumerate() {
            if b == a {
                let before = ending[j];
                ending[j] = ending[j].max(carry + 1);
                carry = carry.max(before);
            } else if b < a {
                carry = carry.max(ending[j]);
            }
        }
    }
    ending.into_iter().max().unwrap_or(0)
}

fn is_subsequence(needle: &[u32], hay: &[u32]) -> bool {
    let mut it = hay.iter();
    needle.iter().all(|c| it.any(|h| h == c))
}

/// Exhaustive search over the weakly increasing subsequences of `x`.
pub fn lcis_bruteforce(x: &Word, y: &Word) -> Result<usize> {
    let n = x.len();
    if n > LCIS_BRUTEFORCE_CAP {
        return Err(Error::TooLarge {
            what: "lcis_bruteforce word length",
            size: n,
            cap: LCIS_BRUTEFORCE_CAP,
        });
    }
    let xs = x.letters();
    let mut best = 0;
    let mut picked = Vec::with_capacity(n);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize <= best {
            continue;
        }
        picked.clear();
        picked.extend((0..n).filter(|&i| mask & (1 << i) != 0).map(|i| xs[i]));
        if picked.windows(2).all(|w| w[0] <= w[1]) && is_subsequence(&picked, y.letters()) {
            best = picked.len();
        }
    }
    Ok(best)
}

/// `(LCI_n − n e_max)/√n` for two words of the same length `n ≥ 1`.
pub fn centered_lci(x: &Word, y: &Word, cfg: &LciConfig) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.is_empty() {
        return Err(Error::OutOfDomain {
            what: "n",
            value: 0.0,
            domain: "n ≥ 1",
        });
    }
    let n = x.len() as f64;
    Ok((lcis_dp(x, y) as f64 - n * cfg.e_max) / n.sqrt())
}

/// `ê_max = mean(LCI_n)/n` over a batch of pairs of equal length `n`.
pub fn estimate_e_max(lengths: &[usize], n: usize) -> Result<f64> {
    if lengths.is_empty() || n == 0 {
        return Err(Error::EmptySample);
    }
    Ok(lengths.iter().sum::<usize>() as f64 / lengths.len() as f64 / n as f64)
}
