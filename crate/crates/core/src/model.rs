//! Letter distributions, random words and their prefix-count processes.
//!
//! Letters are 1-based integers in `[1..m]`. A [`CountProcess`] holds the
//! matrix `N[i][j]` of occurrences of letter `i` among the first `j` letters,
//! from which the centered walks `B̃`, the window increments `Ṽ` and the
//! drifted functional `Z_n` over split-point compositions are evaluated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::UniformStream;

const SUM_TOLERANCE: f64 = 1e-12;

/// A probability mass function on `[1..m]` with every mass strictly positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Distribution {
    p: Vec<f64>,
    sigma: Vec<f64>,
    cumulative: Vec<f64>,
    p_max: f64,
    p_2nd: f64,
    argmax: Vec<usize>,
}

impl Distribution {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        let m = p.len();
        if m < 2 {
            return Err(Error::InvalidDistribution(format!(
                "alphabet size {m} < 2"
            )));
        }
        if let Some((i, &pi)) = p
            .iter()
            .enumerate()
            .find(|(_, &pi)| !(pi.is_finite() && pi > 0.0))
        {
            return Err(Error::InvalidDistribution(format!(
                "p_{} = {pi} is not a positive probability",
                i + 1
            )));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        if p.iter().any(|&pi| pi >= 1.0) {
            return Err(Error::InvalidDistribution(
                "a single letter carries all the mass".into(),
            ));
        }

        let sigma = p.iter().map(|&pi| (pi * (1.0 - pi)).sqrt()).collect();
        let mut cumulative = Vec::with_capacity(m);
        let mut acc = 0.0;
        for &pi in &p {
            acc += pi;
            cumulative.push(acc);
        }
        let p_max = p.iter().copied().fold(f64::MIN, f64::max);
        let argmax: Vec<usize> = (0..m).filter(|&i| p[i] == p_max).map(|i| i + 1).collect();
        let p_2nd = p
            .iter()
            .copied()
            .filter(|&pi| pi < p_max)
            .fold(f64::NAN, f64::max);
        let p_2nd = if p_2nd.is_nan() { p_max } else { p_2nd };

        Ok(Self {
            p,
            sigma,
            cumulative,
            p_max,
            p_2nd,
            argmax,
        })
    }

    pub fn uniform(m: usize) -> Result<Self> {
        Self::new(vec![1.0 / m as f64; m])
    }

    pub fn m(&self) -> usize {
        self.p.len()
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// Mass of letter `letter` (1-based).
    pub fn prob(&self, letter: usize) -> f64 {
        self.p[letter - 1]
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn p_2nd(&self) -> f64 {
        self.p_2nd
    }

    /// Multiplicity of the largest mass.
    pub fn k_mult(&self) -> usize {
        self.argmax.len()
    }

    /// `p_max − p_2nd`, zero when every letter has the same mass.
    pub fn delta(&self) -> f64 {
        self.p_max - self.p_2nd
    }

    /// Letters carrying the largest mass, in increasing order.
    pub fn argmax_set(&self) -> &[usize] {
        &self.argmax
    }

    pub fn is_uniform(&self) -> bool {
        self.k_mult() == self.m()
    }

    /// Letter selected by a uniform draw `u ∈ [0, 1)`: the smallest `l` with
    /// `u < p_1 + … + p_l`.
    #[inline]
    pub fn letter_for(&self, u: f64) -> u32 {
        let m = self.cumulative.len();
        for (i, &c) in self.cumulative[..m - 1].iter().enumerate() {
            if u < c {
                return (i + 1) as u32;
            }
        }
        m as u32
    }
}

impl TryFrom<Vec<f64>> for Distribution {
    type Error = Error;

    fn try_from(p: Vec<f64>) -> Result<Self> {
        Self::new(p)
    }
}

impl From<Distribution> for Vec<f64> {
    fn from(d: Distribution) -> Self {
        d.p
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<u32>,
}

impl Word {
    /// Wraps letters without checking them against an alphabet.
    pub fn new(letters: Vec<u32>) -> Self {
        Self { letters }
    }

    pub fn checked(letters: Vec<u32>, m: usize) -> Result<Self> {
        let w = Self::new(letters);
        w.check_alphabet(m)?;
        Ok(w)
    }

    pub fn check_alphabet(&self, m: usize) -> Result<()> {
        match self
            .letters
            .iter()
            .position(|&l| l == 0 || l as usize > m)
        {
            Some(position) => Err(Error::LetterOutOfRange {
                letter: self.letters[position],
                position,
                m,
            }),
            None => Ok(()),
        }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    /// Largest letter present, 0 for the empty word.
    pub fn max_letter(&self) -> u32 {
        self.letters.iter().copied().max().unwrap_or(0)
    }
}

impl From<Vec<u32>> for Word {
    fn from(letters: Vec<u32>) -> Self {
        Self::new(letters)
    }
}

/// `n` i.i.d. letters from `dist`, each obtained by inverting the cumulative
/// masses at one uniform draw of the stream seeded by `seed`.
pub fn sample_word(dist: &Distribution, n: usize, seed: u64) -> Word {
    let mut stream = UniformStream::new(seed);
    let letters = (0..n).map(|_| dist.letter_for(stream.uniform())).collect();
    Word { letters }
}

/// Two words driven by the same uniforms, letter `i` of each word being the
/// inverse-CDF image of `U_i` under its own distribution.
pub fn sample_word_coupled(
    dist_a: &Distribution,
    dist_b: &Distribution,
    n: usize,
    seed: u64,
) -> Result<(Word, Word)> {
    if dist_a.m() != dist_b.m() {
        return Err(Error::AlphabetMismatch(dist_a.m(), dist_b.m()));
    }
    let mut stream = UniformStream::new(seed);
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for _ in 0..n {
        let u = stream.uniform();
        a.push(dist_a.letter_for(u));
        b.push(dist_b.letter_for(u));
    }
    Ok((Word { letters: a }, Word { letters: b }))
}

/// Prefix counts `N[i][j]`, `i ∈ [1..m]`, `j ∈ [0..n]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountProcess {
    n: usize,
    m: usize,
    // row-major: letter i (0-based) occupies counts[i*(n+1) .. (i+1)*(n+1)]
    counts: Vec<u32>,
}

impl CountProcess {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `N^letter_j` for a 1-based letter.
    #[inline]
    pub fn get(&self, letter: usize, j: usize) -> u32 {
        self.counts[(letter - 1) * (self.n + 1) + j]
    }

    /// The whole path `j ↦ N^letter_j`.
    pub fn row(&self, letter: usize) -> &[u32] {
        let start = (letter - 1) * (self.n + 1);
        &self.counts[start..start + self.n + 1]
    }

    /// Occurrences of `letter` among positions `from+1 ..= to`.
    #[inline]
    pub fn window(&self, letter: usize, from: usize, to: usize) -> u32 {
        self.get(letter, to) - self.get(letter, from)
    }
}

pub fn prefix_counts(word: &Word, m: usize) -> Result<CountProcess> {
    word.check_alphabet(m)?;
    let n = word.len();
    let mut counts = vec![0u32; m * (n + 1)];
    for i in 0..m {
        let row = &mut counts[i * (n + 1)..(i + 1) * (n + 1)];
        let target = (i + 1) as u32;
        let mut acc = 0u32;
        for (j, &l) in word.letters().iter().enumerate() {
            acc += (l == target) as u32;
            row[j + 1] = acc;
        }
    }
    Ok(CountProcess { n, m, counts })
}

/// Split points `0 = k_0 ≤ k_1 ≤ … ≤ k_m = n`; letter `i` owns the window
/// `(k_{i−1}, k_i]`, i.e. `λ_i = (k_i − k_{i−1})/n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Composition {
    split: Vec<usize>,
}

impl Composition {
    pub fn new(split: Vec<usize>) -> Result<Self> {
        if split.len() < 2 {
            return Err(Error::InvalidComposition(
                "need at least k_0 and k_m".into(),
            ));
        }
        if split[0] != 0 {
            return Err(Error::InvalidComposition(format!(
                "k_0 = {} must be 0",
                split[0]
            )));
        }
        if split.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidComposition(format!(
                "split points {split:?} are not monotone"
            )));
        }
        Ok(Self { split })
    }

    /// Builds a composition from window lengths `j_1, …, j_m`.
    pub fn from_lengths(lengths: &[usize]) -> Result<Self> {
        let mut split = Vec::with_capacity(lengths.len() + 1);
        split.push(0);
        let mut acc = 0;
        for &j in lengths {
            acc += j;
            split.push(acc);
        }
        Self::new(split)
    }

    pub fn m(&self) -> usize {
        self.split.len() - 1
    }

    pub fn n(&self) -> usize {
        *self.split.last().unwrap()
    }

    pub fn split(&self) -> &[usize] {
        &self.split
    }

    /// Window length `k_i − k_{i−1}` of the 1-based letter `i`.
    pub fn length(&self, i: usize) -> usize {
        self.split[i] - self.split[i - 1]
    }

    pub fn lambda(&self) -> Vec<f64> {
        let n = self.n() as f64;
        (1..=self.m()).map(|i| self.length(i) as f64 / n).collect()
    }

    /// All `C(n+m−1, m−1)` compositions of `n` into `m` windows, in
    /// lexicographic order of split points.
    pub fn enumerate(n: usize, m: usize) -> CompositionIter {
        CompositionIter {
            n,
            next: (m >= 1).then(|| {
                let mut s = vec![0; m + 1];
                s[m] = n;
                s
            }),
        }
    }

    fn check_against(&self, counts: &CountProcess) -> Result<()> {
        if self.m() != counts.m() {
            return Err(Error::AlphabetMismatch(self.m(), counts.m()));
        }
        if self.n() != counts.n() {
            return Err(Error::LengthMismatch(self.n(), counts.n()));
        }
        Ok(())
    }
}

pub struct CompositionIter {
    n: usize,
    next: Option<Vec<usize>>,
}

impl Iterator for CompositionIter {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        let current = self.next.take()?;
        let m = current.len() - 1;
        // advance the interior split points k_1..k_{m-1} like an odometer
        let mut succ = current.clone();
        let mut i = m - 1;
        while i >= 1 {
            if succ[i] < self.n {
                succ[i] += 1;
                let v = succ[i];
                for s in succ.iter_mut().take(m).skip(i + 1) {
                    *s = v;
                }
                self.next = Some(succ);
                break;
            }
            i -= 1;
        }
        Some(Composition { split: current })
    }
}

/// `B̃ⁿ_i(t)` at a real time `t ∈ [0,1]`, with `⌊tn⌋` taken after one rounding
/// of `t·n`. Internal callers use [`b_tilde_at`] with an integer index.
pub fn b_tilde(counts: &CountProcess, dist: &Distribution, i: usize, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfDomain {
            what: "t",
            value: t,
            domain: "[0, 1]",
        });
    }
    check_letter(i, counts.m())?;
    let j = ((t * counts.n() as f64).floor() as usize).min(counts.n());
    Ok(b_tilde_at(counts, dist, i, j))
}

/// `B̃ⁿ_i(j/n) = (N^i_j − p_i j)/(σ_i √n)`.
pub fn b_tilde_at(counts: &CountProcess, dist: &Distribution, i: usize, j: usize) -> f64 {
    if j == 0 {
        return 0.0;
    }
    let n = counts.n() as f64;
    let centered = counts.get(i, j) as f64 - dist.prob(i) * j as f64;
    centered / (dist.sigma()[i - 1] * n.sqrt())
}

/// Window increments `Ṽⁿ_i(λ) = (N^i_{k_i} − N^i_{k_{i−1}} − p_i(k_i − k_{i−1}))/√n`.
pub fn v_tilde(counts: &CountProcess, dist: &Distribution, comp: &Composition) -> Result<Vec<f64>> {
    comp.check_against(counts)?;
    if dist.m() != counts.m() {
        return Err(Error::AlphabetMismatch(dist.m(), counts.m()));
    }
    let sqrt_n = (counts.n() as f64).sqrt();
    let s = comp.split();
    Ok((1..=counts.m())
        .map(|i| {
            let len = s[i] - s[i - 1];
            if len == 0 {
                0.0
            } else {
                (counts.window(i, s[i - 1], s[i]) as f64 - dist.prob(i) * len as f64) / sqrt_n
            }
        })
        .collect())
}

/// `Z_n(λ) = Σ_i [√n (p_i − p_max) λ_i + Ṽⁿ_i(λ)]`.
pub fn z_n(counts: &CountProcess, dist: &Distribution, comp: &Composition) -> Result<f64> {
    let v = v_tilde(counts, dist, comp)?;
    let n = counts.n() as f64;
    let sqrt_n = n.sqrt();
    Ok((1..=counts.m())
        .map(|i| {
            let lambda = comp.length(i) as f64 / n;
            sqrt_n * (dist.prob(i) - dist.p_max()) * lambda + v[i - 1]
        })
        .sum())
}

fn check_letter(i: usize, m: usize) -> Result<()> {
    if i == 0 || i > m {
        return Err(Error::OutOfDomain {
            what: "letter",
            value: i as f64,
            domain: "[1, m]",
        });
    }
    Ok(())
}
