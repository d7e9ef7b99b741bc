//! Random selector variables, the derived random sets, and their moment and
//! tail bounds.
//!
//! A selector sample is the random set `S = {i : xi_i = 1}` of independent
//! Bernoulli(delta) indicators; the tripartite sample is the disjoint random
//! partition R1/R2/R3 of means 1/3 each used by probabilistic decoupling.

use crate::error::{Error, Result};
use crate::rng;

/// One realization of n independent Bernoulli(delta) selectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectorSample {
    n: usize,
    delta: f64,
    bits: Vec<bool>,
    seed: u64,
    size: usize,
}

impl SelectorSample {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of selected indices.
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Selected indices, ascending.
    pub fn selected(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.bits[i]).collect()
    }

    /// Zero out the coefficients at unselected indices.
    pub fn mask(&self, coeffs: &[f64]) -> Vec<f64> {
        assert_eq!(coeffs.len(), self.n);
        coeffs.iter().enumerate().map(|(i, &c)| if self.bits[i] { c } else { 0.0 }).collect()
    }

    /// The degenerate all-on sample (delta = 1 diagnostic mode).
    pub fn full(n: usize) -> SelectorSample {
        SelectorSample { n, delta: 1.0, bits: vec![true; n], seed: 0, size: n }
    }
}

/// Draw a selector sample; deterministic in `seed`.
pub fn sample_selectors(n: usize, delta: f64, seed: u64) -> Result<SelectorSample> {
    if n == 0 {
        return Err(Error::invalid("n", "need at least one selector"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("delta", format!("mean must lie in (0,1), got {delta}")));
    }
    let bits: Vec<bool> = (0..n).map(|i| rng::bernoulli(seed, i as u64, delta)).collect();
    let size = bits.iter().filter(|&&b| b).count();
    Ok(SelectorSample { n, delta, bits, seed, size })
}

/// One realization of the disjoint random sets R1 (mean 1/3), R2, R3.
///
/// `label[i] = 1` iff eta_i = 1; `2` iff eta_i = 0 and zeta_i = 1; `3`
/// otherwise, with eta ~ Bernoulli(1/3) and zeta ~ Bernoulli(1/2) independent.
#[derive(Debug, Clone, PartialEq)]
pub struct TripartiteSample {
    n: usize,
    labels: Vec<u8>,
    seed: u64,
}

impl TripartiteSample {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self, i: usize) -> u8 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Indices of R1, R2, R3.
    pub fn parts(&self) -> [Vec<usize>; 3] {
        let mut parts = [Vec::new(), Vec::new(), Vec::new()];
        for (i, &l) in self.labels.iter().enumerate() {
            parts[(l - 1) as usize].push(i);
        }
        parts
    }

    /// Sum of `v` over the part with the given label.
    pub fn part_sum(&self, label: u8, v: &[f64]) -> f64 {
        assert_eq!(v.len(), self.n);
        v.iter().enumerate().filter(|&(i, _)| self.labels[i] == label).map(|(_, &x)| x).sum()
    }
}

/// Draw a tripartite sample; deterministic in `seed`.
pub fn sample_tripartite(n: usize, seed: u64) -> Result<TripartiteSample> {
    if n == 0 {
        return Err(Error::invalid("n", "need at least one index"));
    }
    let labels = (0..n)
        .map(|i| {
            let eta = rng::bernoulli(seed, 2 * i as u64, 1.0 / 3.0);
            let zeta = rng::bernoulli(seed, 2 * i as u64 + 1, 0.5);
            if eta {
                1
            } else if zeta {
                2
            } else {
                3
            }
        })
        .collect();
    Ok(TripartiteSample { n, labels, seed })
}

/// Outcome of the selector moment-bound check.
#[derive(Debug, Clone)]
pub struct MomentCheck {
    /// (mean over trials of S^q)^(1/q) with S the number of successes among l.
    pub empirical: f64,
    /// delta*l + q / ln(2 + q/(delta*l)).
    pub bound: f64,
    pub ratio: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Empirical L^q norm of a selector count against its analytic bound.
pub fn selector_moment_check(
    l: usize,
    delta: f64,
    q: f64,
    trials: usize,
    seed: u64,
) -> Result<MomentCheck> {
    if l == 0 {
        return Err(Error::invalid("l", "need at least one selector"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("delta", "mean must lie in (0,1)"));
    }
    if q < 1.0 {
        return Err(Error::invalid("q", "moment order must be >= 1"));
    }
    if trials < 1_000 {
        return Err(Error::invalid("trials", "need at least 1000 trials"));
    }
    let mut acc = 0.0f64;
    for t in 0..trials {
        let s = sample_selectors(l, delta, rng::derive_seed(seed, rng::Stream::Omega, t as u64))?;
        acc += (s.size() as f64).powf(q);
    }
    let empirical = (acc / trials as f64).powf(1.0 / q);
    let dl = delta * l as f64;
    let bound = dl + q / (2.0 + q / dl).ln();
    let ratio = empirical / bound;
    let threshold = crate::tol::MOMENT_RATIO_CEILING;
    Ok(MomentCheck { empirical, bound, ratio, threshold, pass: ratio <= threshold })
}

/// Outcome of the large-deviation tail check.
#[derive(Debug, Clone)]
pub struct LargeDeviationCheck {
    pub upper_freq: f64,
    pub lower_freq: f64,
    /// exp(-5 n delta), bound for P(S > 10 n delta).
    pub upper_bound: f64,
    /// exp(-n delta / 2), bound for P(S < n delta / 10).
    pub lower_bound: f64,
    pub upper_sigma: f64,
    pub lower_sigma: f64,
    pub pass: bool,
}

/// Empirical frequencies of the two large-deviation events against their
/// exponential bounds (with 3-sigma slack of the frequency estimator).
pub fn large_deviation_check(
    n: usize,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<LargeDeviationCheck> {
    if n == 0 {
        return Err(Error::invalid("n", "need at least one selector"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("delta", "mean must lie in (0,1)"));
    }
    if trials < 10_000 {
        return Err(Error::invalid("trials", "need at least 10000 trials"));
    }
    let nd = n as f64 * delta;
    let (mut hi, mut lo) = (0usize, 0usize);
    for t in 0..trials {
        let s = sample_selectors(n, delta, rng::derive_seed(seed, rng::Stream::Omega, t as u64))?;
        let size = s.size() as f64;
        if size > 10.0 * nd {
            hi += 1;
        }
        if size < nd / 10.0 {
            lo += 1;
        }
    }
    let upper_freq = hi as f64 / trials as f64;
    let lower_freq = lo as f64 / trials as f64;
    let upper_bound = (-5.0 * nd).exp();
    let lower_bound = (-nd / 2.0).exp();
    let sig = |b: f64| (b * (1.0 - b) / trials as f64).sqrt();
    let upper_sigma = sig(upper_bound);
    let lower_sigma = sig(lower_bound);
    let pass = upper_freq <= upper_bound + 3.0 * upper_sigma
        && lower_freq <= lower_bound + 3.0 * lower_sigma;
    Ok(LargeDeviationCheck {
        upper_freq,
        lower_freq,
        upper_bound,
        lower_bound,
        upper_sigma,
        lower_sigma,
        pass,
    })
}

/// Outcome of the supremum/L^q-norm exchange check.
#[derive(Debug, Clone)]
pub struct SupExchangeCheck {
    /// Empirical E[sup_j X_j].
    pub lhs: f64,
    /// e * max_j (E X_j^q)^(1/q) with q = max(ln n, 1).
    pub rhs: f64,
    pub sigma: f64,
    pub pass: bool,
}

/// Check `E sup_j X_j <= e * max_j ||X_j||_{log n}` on a random family of
/// bounded nonnegative variables X_j = c_j * U_j^{k_j}.
pub fn sup_exchange_check(n: usize, trials: usize, seed: u64) -> Result<SupExchangeCheck> {
    if n == 0 {
        return Err(Error::invalid("n", "need at least one variable"));
    }
    if trials < 1_000 {
        return Err(Error::invalid("trials", "need at least 1000 trials"));
    }
    let fam_seed = rng::derive_seed(seed, rng::Stream::Misc, 0);
    let scales: Vec<f64> = (0..n).map(|j| rng::uniform(fam_seed, j as u64)).collect();
    let powers: Vec<f64> =
        (0..n).map(|j| 1.0 + (rng::bits(fam_seed, (n + j) as u64) % 4) as f64).collect();
    let q = (n as f64).ln().max(1.0);

    let mut sup_sum = 0.0;
    let mut sup_sq = 0.0;
    let mut moments = vec![0.0f64; n];
    for t in 0..trials {
        let ts = rng::derive_seed(seed, rng::Stream::Omega, t as u64);
        let mut sup = 0.0f64;
        for j in 0..n {
            let x = scales[j] * rng::uniform(ts, j as u64).powf(powers[j]);
            sup = sup.max(x);
            moments[j] += x.powf(q);
        }
        sup_sum += sup;
        sup_sq += sup * sup;
    }
    let lhs = sup_sum / trials as f64;
    let var = (sup_sq / trials as f64 - lhs * lhs).max(0.0);
    let sigma = (var / trials as f64).sqrt();
    let rhs = std::f64::consts::E
        * moments
            .iter()
            .map(|&m| (m / trials as f64).powf(1.0 / q))
            .fold(0.0f64, f64::max);
    Ok(SupExchangeCheck { lhs, rhs, sigma, pass: lhs <= rhs + 3.0 * sigma })
}
