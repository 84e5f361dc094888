//! RSK shapes of words and longest weakly increasing subsequences.
//!
//! Throughout, "increasing" means weakly increasing: repeated letters may be
//! taken. Row insertion bumps the leftmost entry strictly greater than the
//! inserted letter, which makes the first row length equal to `LI_n`.

use crate::error::{Error, Result};
use crate::model::{Distribution, Word};

pub const LI_BRUTEFORCE_CAP: usize = 22;
pub const GREENE_CAP: usize = 10;

/// Row lengths of a Young diagram, weakly decreasing, no zero rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YoungShape {
    rows: Vec<usize>,
}

impl YoungShape {
    pub fn new(rows: Vec<usize>) -> Result<Self> {
        if rows.iter().any(|&r| r == 0) {
            return Err(Error::InconsistentShape("zero-length row".into()));
        }
        if rows.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InconsistentShape(format!(
                "rows {rows:?} are not weakly decreasing"
            )));
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn size(&self) -> usize {
        self.rows.iter().sum()
    }

    /// First row length, 0 for the empty diagram.
    pub fn first_row(&self) -> usize {
        self.rows.first().copied().unwrap_or(0)
    }

    /// `V_k = R_1 + … + R_k`, missing rows counting as 0.
    pub fn cumulative(&self, k: usize) -> usize {
        self.rows.iter().take(k).sum()
    }
}

/// Shape of the insertion tableau of `word`.
///
/// Each row is stored as a multiset of letters (one counter per letter), so
/// inserting a letter costs `O(m)` per visited row.
pub fn rsk_shape(word: &Word) -> YoungShape {
    let m = word.max_letter() as usize;
    let mut rows: Vec<Vec<u32>> = Vec::new();
    let mut lengths: Vec<usize> = Vec::new();

    for &letter in word.letters() {
        let mut x = letter as usize;
        let mut r = 0;
        loop {
            if r == rows.len() {
                rows.push(vec![0; m + 1]);
                lengths.push(0);
            }
            let row = &mut rows[r];
            match (x + 1..=m).find(|&y| row[y] > 0) {
                Some(y) => {
                    row[y] -= 1;
                    row[x] += 1;
                    x = y;
                    r += 1;
                }
                None => {
                    row[x] += 1;
                    lengths[r] += 1;
                    break;
                }
            }
        }
    }
    YoungShape { rows: lengths }
}

/// Length of the longest weakly increasing subsequence in `O(nm)`.
///
/// `best[i]` is the longest weakly increasing subsequence of the prefix read so
/// far that only uses letters `≤ i`; reading letter `x` extends `best[x]` and
/// propagates the new value to every larger class.
pub fn li_dp(word: &Word, m: usize) -> Result<usize> {
    word.check_alphabet(m)?;
    let mut best = vec![0usize; m + 1];
    for &letter in word.letters() {
        let x = letter as usize;
        best[x] += 1;
        let v = best[x];
        for b in &mut best[x + 1..] {
            if *b < v {
                *b = v;
            }
        }
    }
    Ok(best[m])
}

/// Exhaustive maximum over all `2ⁿ` subsequences.
pub fn li_bruteforce(word: &Word) -> Result<usize> {
    let n = word.len();
    if n > LI_BRUTEFORCE_CAP {
        return Err(Error::TooLarge {
            what: "li_bruteforce word length",
            size: n,
            cap: LI_BRUTEFORCE_CAP,
        });
    }
    let letters = word.letters();
    let mut best = 0;
    for mask in 0u32..(1u32 << n) {
        let len = mask.count_ones() as usize;
        if len <= best {
            continue;
        }
        let mut last = 0u32;
        let increasing = (0..n)
            .filter(|&i| mask & (1 << i) != 0)
            .all(|i| {
                let ok = letters[i] >= last;
                last = letters[i];
                ok
            });
        if increasing {
            best = len;
        }
    }
    Ok(best)
}

/// Largest total size of `k` pairwise disjoint weakly increasing subsequences,
/// by exhaustive assignment of every position to one of the `k` subsequences
/// or to none.
pub fn greene_oracle(word: &Word, k: usize) -> Result<usize> {
    let n = word.len();
    if n > GREENE_CAP {
        return Err(Error::TooLarge {
            what: "greene_oracle word length",
            size: n,
            cap: GREENE_CAP,
        });
    }
    if k == 0 {
        return Err(Error::OutOfDomain {
            what: "k",
            value: 0.0,
            domain: "k ≥ 1",
        });
    }
    if k >= n {
        return Ok(n);
    }

    struct Search<'a> {
        letters: &'a [u32],
        tails: Vec<u32>,
        used: usize,
        best: usize,
    }

    impl Search<'_> {
        fn go(&mut self, pos: usize, taken: usize) {
            let remaining = self.letters.len() - pos;
            if taken + remaining <= self.best {
                return;
            }
            if pos == self.letters.len() {
                self.best = taken;
                return;
            }
            let x = self.letters[pos];
            // existing subsequences whose tail admits x
            for s in 0..self.used {
                if self.tails[s] <= x {
                    let saved = self.tails[s];
                    self.tails[s] = x;
                    self.go(pos + 1, taken + 1);
                    self.tails[s] = saved;
                }
            }
            // open a new subsequence; empty ones are interchangeable
            if self.used < self.tails.len() {
                self.tails[self.used] = x;
                self.used += 1;
                self.go(pos + 1, taken + 1);
                self.used -= 1;
            }
            self.go(pos + 1, taken);
        }
    }

    let mut search = Search {
        letters: word.letters(),
        tails: vec![0; k],
        used: 0,
        best: 0,
    };
    search.go(0, 0);
    Ok(search.best)
}

/// Cumulative row sums and their uniform-case normalisation.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeStats {
    pub n: usize,
    pub m: usize,
    /// `V_k`, `k = 1..=m`.
    pub v: Vec<usize>,
    /// `T_k = (V_k − kn/m)/√(n/m)`, `k = 1..=m`.
    pub t: Vec<f64>,
}

pub fn cumulative_shape_stats(shape: &YoungShape, n: usize, m: usize) -> Result<ShapeStats> {
    if shape.size() != n {
        return Err(Error::InconsistentShape(format!(
            "rows sum to {}, expected {n}",
            shape.size()
        )));
    }
    if shape.rows().len() > m {
        return Err(Error::InconsistentShape(format!(
            "{} rows exceed the alphabet size {m}",
            shape.rows().len()
        )));
    }
    if n == 0 || m == 0 {
        return Err(Error::InconsistentShape("empty word or alphabet".into()));
    }
    let v: Vec<usize> = (1..=m).map(|k| shape.cumulative(k)).collect();
    // (V_k − kn/m)/√(n/m) = (m V_k − k n)/(m √(n/m)); the numerator is an exact integer
    let scale = m as f64 * (n as f64 / m as f64).sqrt();
    let t = v
        .iter()
        .enumerate()
        .map(|(idx, &vk)| {
            let k = idx + 1;
            let num = (m * vk) as i128 - (k * n) as i128;
            num as f64 / scale
        })
        .collect();
    Ok(ShapeStats { n, m, v, t })
}

/// `(LI_n − n p_max)/√(n p_max)`.
pub fn centered_li(word: &Word, dist: &Distribution) -> Result<f64> {
    let n = word.len();
    if n == 0 {
        return Err(Error::OutOfDomain {
            what: "n",
            value: 0.0,
            domain: "n ≥ 1",
        });
    }
    let li = li_dp(word, dist.m())? as f64;
    let np = n as f64 * dist.p_max();
    Ok((li - np) / np.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(v: &[u32]) -> Word {
        Word::new(v.to_vec())
    }

    #[test]
    fn shape_examples() {
        assert_eq!(rsk_shape(&w(&[1, 1, 1])).rows(), &[3]);
        assert_eq!(rsk_shape(&w(&[3, 2, 1])).rows(), &[1, 1, 1]);
        assert_eq!(rsk_shape(&w(&[2, 1, 1, 2])).rows(), &[3, 1]);
        assert_eq!(rsk_shape(&w(&[])).rows(), &[] as &[usize]);
    }

    #[test]
    fn li_dp_examples() {
        assert_eq!(li_dp(&w(&[1; 5]), 1).unwrap(), 5);
        assert_eq!(li_dp(&w(&[1, 3, 2, 1, 2]), 3).unwrap(), 3);
        assert_eq!(li_dp(&w(&[3, 2, 1]), 3).unwrap(), 1);
        assert_eq!(li_dp(&w(&[]), 2).unwrap(), 0);
        assert!(li_dp(&w(&[1, 4]), 3).is_err());
    }

    #[test]
    fn li_bruteforce_examples() {
        assert_eq!(li_bruteforce(&w(&[1, 2, 1, 2])).unwrap(), 3);
        assert_eq!(li_bruteforce(&w(&[])).unwrap(), 0);
        assert_eq!(li_bruteforce(&w(&[2, 2, 2])).unwrap(), 3);
        assert_eq!(li_bruteforce(&w(&[1, 3, 2, 1, 2])).unwrap(), 3);
        assert!(matches!(
            li_bruteforce(&w(&[1; 23])),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn greene_examples() {
        assert_eq!(greene_oracle(&w(&[2, 1, 1, 2]), 2).unwrap(), 4);
        assert_eq!(greene_oracle(&w(&[2, 1, 1, 2]), 1).unwrap(), 3);
        assert_eq!(greene_oracle(&w(&[3, 1, 2]), 5).unwrap(), 3);
        assert_eq!(greene_oracle(&w(&[1, 1, 1]), 1).unwrap(), 3);
        assert_eq!(greene_oracle(&w(&[3, 2, 1]), 2).unwrap(), 2);
        assert!(greene_oracle(&w(&[1; 11]), 2).is_err());
        assert!(greene_oracle(&w(&[1]), 0).is_err());
    }

    #[test]
    fn shape_stats_examples() {
        let s = cumulative_shape_stats(&YoungShape::new(vec![3, 1]).unwrap(), 4, 2).unwrap();
        assert_eq!(s.v, vec![3, 4]);
        assert!((s.t[0] - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.t[1], 0.0);

        let s = cumulative_shape_stats(&YoungShape::new(vec![2, 2]).unwrap(), 4, 2).unwrap();
        assert_eq!(s.t, vec![0.0, 0.0]);

        let s = cumulative_shape_stats(&YoungShape::new(vec![7]).unwrap(), 7, 3).unwrap();
        assert_eq!(s.t[2], 0.0);

        assert!(cumulative_shape_stats(&YoungShape::new(vec![3, 1]).unwrap(), 5, 2).is_err());
        assert!(cumulative_shape_stats(&YoungShape::new(vec![1, 1, 1]).unwrap(), 3, 2).is_err());
        assert!(YoungShape::new(vec![1, 2]).is_err());
    }

    #[test]
    fn centered_li_examples() {
        let half = Distribution::uniform(2).unwrap();
        assert!((centered_li(&w(&[1, 1]), &half).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(centered_li(&w(&[2, 1]), &half).unwrap(), 0.0);

        let d = Distribution::new(vec![0.3, 0.7]).unwrap();
        let n = 9usize;
        let expected = (n as f64).sqrt() * (1.0 - 0.7) / 0.7f64.sqrt();
        assert!((centered_li(&w(&[2; 9]), &d).unwrap() - expected).abs() < 1e-12);
        assert!(centered_li(&w(&[]), &d).is_err());
    }

    #[test]
    fn exhaustive_binary_words_up_to_ten() {
        for n in 0..=10usize {
            for bits in 0u32..(1 << n) {
                let word: Vec<u32> = (0..n).map(|i| 1 + ((bits >> i) & 1)).collect();
                let word = Word::new(word);
                let li = li_dp(&word, 2).unwrap();
                assert_eq!(li, li_bruteforce(&word).unwrap());
                assert_eq!(li, rsk_shape(&word).first_row());
            }
        }
    }

    fn word_strategy(max_m: u32, max_n: usize) -> impl Strategy<Value = (u32, Vec<u32>)> {
        (1..=max_m).prop_flat_map(move |m| (Just(m), prop::collection::vec(1..=m, 0..=max_n)))
    }

    proptest! {
        #[test]
        fn li_routes_agree((m, letters) in word_strategy(5, 12)) {
            let word = Word::new(letters);
            let li = li_dp(&word, m as usize).unwrap();
            prop_assert_eq!(li, li_bruteforce(&word).unwrap());
            prop_assert_eq!(li, rsk_shape(&word).first_row());
        }

        #[test]
        fn shape_is_a_partition((m, letters) in word_strategy(6, 40)) {
            let n = letters.len();
            let shape = rsk_shape(&Word::new(letters));
            prop_assert_eq!(shape.size(), n);
            prop_assert!(shape.rows().windows(2).all(|w| w[0] >= w[1]));
            prop_assert!(shape.rows().len() <= m as usize);
        }

        #[test]
        fn cumulative_rows_match_greene((m, letters) in word_strategy(3, 8)) {
            let word = Word::new(letters);
            let shape = rsk_shape(&word);
            for k in 1..=m as usize {
                prop_assert_eq!(shape.cumulative(k), greene_oracle(&word, k).unwrap());
            }
        }
    }
}
