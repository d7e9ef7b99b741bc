//! Lambda(p)-constant estimation.
//!
//! `K_S = sup_{|a| <= 1} || sum_{i in S} a_i phi_i ||_p` is a smooth nonconvex
//! sphere maximization; it is estimated by the classical fixed-point (power)
//! iteration for 2->p operator norms, multi-start. The triple-supremum
//! functional over sparse coefficient vectors is estimated with an exact
//! sorted inner supremum and iterative hard thresholding for the outer pair.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::orthosys::{FunctionSamples, OrthogonalSystem};
use crate::rng;
use crate::scalar::{r, ru, Real};
use crate::selectors::SelectorSample;

/// A coefficient vector with tracked support (0-based indices).
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffVector<R> {
    entries: Vec<R>,
    support: Vec<usize>,
}

impl<R: Real> CoeffVector<R> {
    pub fn zeros(n: usize) -> Self {
        CoeffVector { entries: vec![R::zero(); n], support: Vec::new() }
    }

    /// Build from a dense slice; the support is the set of nonzero positions.
    pub fn from_dense(entries: &[R]) -> Self {
        let support = entries
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != R::zero())
            .map(|(i, _)| i)
            .collect();
        CoeffVector { entries: entries.to_vec(), support }
    }

    pub fn from_sparse(n: usize, terms: &[(usize, R)]) -> Result<Self> {
        let mut entries = vec![R::zero(); n];
        for &(i, v) in terms {
            if i >= n {
                return Err(Error::invalid("terms", format!("index {i} out of 0..{n}")));
            }
            entries[i] = v;
        }
        Ok(Self::from_dense(&entries))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[R] {
        &self.entries
    }

    /// Sorted support (positions of nonzero entries).
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn support_size(&self) -> usize {
        self.support.len()
    }

    pub fn get(&self, i: usize) -> R {
        self.entries[i]
    }

    /// Euclidean norm.
    pub fn norm2(&self) -> R {
        self.support.iter().map(|&i| self.entries[i] * self.entries[i]).sum::<R>().sqrt()
    }

    /// Membership in the sparse unit ball: |a| <= 1 (+tol) and |supp a| <= m.
    pub fn in_pi_m(&self, m: usize, tol: R) -> bool {
        self.support.len() <= m && self.norm2() <= R::one() + tol
    }

    /// Keep the m largest magnitudes (ties broken toward the lowest index).
    pub fn hard_threshold(&self, m: usize) -> CoeffVector<R> {
        if self.support.len() <= m {
            return self.clone();
        }
        let mut order: Vec<usize> = self.support.clone();
        order.sort_by(|&i, &j| {
            self.entries[j]
                .abs()
                .partial_cmp(&self.entries[i].abs())
                .unwrap()
                .then(i.cmp(&j))
        });
        let mut entries = vec![R::zero(); self.entries.len()];
        for &i in order.iter().take(m) {
            entries[i] = self.entries[i];
        }
        Self::from_dense(&entries)
    }

    /// Scale to unit Euclidean norm; `None` for the zero vector.
    pub fn normalized(&self) -> Option<CoeffVector<R>> {
        let n2 = self.norm2();
        if n2 == R::zero() {
            return None;
        }
        let entries: Vec<R> = self.entries.iter().map(|&v| v / n2).collect();
        Some(Self::from_dense(&entries))
    }

    pub fn max_abs(&self) -> R {
        self.support.iter().map(|&i| self.entries[i].abs()).fold(R::zero(), |a, b| a.max(b))
    }
}

/// A witnessed estimate of K_S.
#[derive(Debug, Clone)]
pub struct LambdaEstimate {
    /// Best objective found: a certified lower bound on K_S.
    pub value: f64,
    /// Unit vector achieving `value`.
    pub argmax: CoeffVector<f64>,
    pub restarts_used: usize,
    /// True iff every restart converged within the iteration budget.
    pub converged: bool,
    pub p: f64,
}

/// Options for the power iteration.
#[derive(Debug, Clone)]
pub struct KsOptions {
    pub restarts: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Additional starting vectors (coefficients over the support set S).
    pub warm_starts: Vec<Vec<f64>>,
}

impl Default for KsOptions {
    fn default() -> Self {
        KsOptions { restarts: 16, tol: 1e-8, max_iter: 500, seed: 0, warm_starts: Vec::new() }
    }
}

fn validate_index_set(s: &[usize], n: usize) -> Result<()> {
    if s.is_empty() {
        return Err(Error::invalid("s", "index set must be nonempty"));
    }
    let mut seen = vec![false; n];
    for &i in s {
        if i >= n {
            return Err(Error::invalid("s", format!("index {i} out of 0..{n}")));
        }
        if seen[i] {
            return Err(Error::invalid("s", format!("duplicate index {i}")));
        }
        seen[i] = true;
    }
    Ok(())
}

/// One multi-start Boyd power iteration for `sup_{|a|=1} ||sum_{i in S} a_i phi_i||_p`.
///
/// Each step ascends: a <- normalize(adjoint of |f|^{p-2} f), which cannot
/// decrease the objective for p >= 2; convergence is declared on relative
/// objective change below `tol`.
pub fn estimate_ks(
    system: &OrthogonalSystem<f64>,
    s: &[usize],
    p: f64,
    opts: &KsOptions,
) -> Result<LambdaEstimate> {
    validate_index_set(s, system.len())?;
    if p < 2.0 {
        return Err(Error::invalid("p", "estimation needs p >= 2 (p = 2 is diagnostic)"));
    }
    if opts.restarts == 0 && opts.warm_starts.is_empty() {
        return Err(Error::invalid("restarts", "need at least one start"));
    }
    let k = s.len();

    let mut best_val = f64::NEG_INFINITY;
    let mut best_a = vec![0.0; k];
    let mut all_converged = true;
    let mut restarts_used = 0usize;

    let mut starts: Vec<Vec<f64>> = Vec::new();
    starts.push(vec![1.0 / (k as f64).sqrt(); k]);
    for ridx in 1..opts.restarts {
        let mut a = vec![0.0; k];
        rng::unit_sphere(rng::derive_seed(opts.seed, rng::Stream::Restart, ridx as u64), k, &mut a);
        starts.push(a);
    }
    for w in &opts.warm_starts {
        if w.len() != k {
            return Err(Error::invalid("warm_starts", "length must equal |S|"));
        }
        let n2: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n2 > 0.0 {
            starts.push(w.iter().map(|x| x / n2).collect());
        }
    }

    // restarts run concurrently; aggregation is an indexed collect followed
    // by a sequential reduce, so the result is independent of thread count
    let outcomes: Result<Vec<(f64, Vec<f64>, bool)>> = starts
        .into_par_iter()
        .map(|a| run_power_iteration(system, s, p, opts, a))
        .collect();
    for (obj, a, converged) in outcomes? {
        restarts_used += 1;
        if !converged {
            all_converged = false;
        }
        if obj > best_val {
            best_val = obj;
            best_a = a;
        }
    }

    let argmax =
        CoeffVector::from_sparse(system.len(), &s.iter().copied().zip(best_a).collect::<Vec<_>>())?;
    Ok(LambdaEstimate { value: best_val, argmax, restarts_used, converged: all_converged, p })
}

fn run_power_iteration(
    system: &OrthogonalSystem<f64>,
    s: &[usize],
    p: f64,
    opts: &KsOptions,
    start: Vec<f64>,
) -> Result<(f64, Vec<f64>, bool)> {
    let objective = |a: &[f64]| -> Result<(f64, FunctionSamples<f64>)> {
        let terms: Vec<(usize, f64)> = s.iter().copied().zip(a.iter().copied()).collect();
        let f = system.synthesize_sparse(&terms)?;
        let v = system.lp_norm(&f, p)?;
        Ok((v, f))
    };
    {
        let mut a = start;
        let (mut obj, mut f) = objective(&a)?;
        let mut converged = false;
        for _ in 0..opts.max_iter {
            // gradient direction: b_i = <phi_i, |f|^{p-2} f>
            let g = f.map(|v| v.abs().powf(p - 2.0) * v);
            let scores = system.analyze(&g)?;
            let mut b: Vec<f64> = s.iter().map(|&i| scores[i]).collect();
            let bn: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
            if bn == 0.0 {
                converged = true;
                break;
            }
            for x in &mut b {
                *x /= bn;
            }
            let (new_obj, new_f) = objective(&b)?;
            assert!(
                new_obj >= obj - crate::tol::POWER_STEP * obj.max(1.0),
                "power step decreased the objective: {obj} -> {new_obj}"
            );
            let rel = (new_obj - obj).abs() / new_obj.max(1e-300);
            a = b;
            obj = new_obj;
            f = new_f;
            if rel < opts.tol {
                converged = true;
                break;
            }
        }
        Ok((obj, a, converged))
    }
}

/// Flat-coefficient lower bound `sqrt(s) / ||D_n||_{p'}` valid for K_S of any
/// S of size s in the complex exponential system, 1/p + 1/p' = 1.
pub fn ks_flat_lower_bound(n: usize, s: usize, p: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n", "kernel degree must be positive"));
    }
    if p <= 2.0 {
        return Err(Error::invalid("p", "needs p > 2"));
    }
    if s > 2 * n + 1 {
        return Err(Error::invalid("s", format!("set size {s} exceeds 2n+1 = {}", 2 * n + 1)));
    }
    if s == 0 {
        return Ok(0.0);
    }
    let p_dual = p / (p - 1.0);
    Ok((s as f64).sqrt() / crate::orthosys::dirichlet_norm::<f64>(n, p_dual)?)
}

/// Normalized L^r mass of the block exponential sum near the origin:
/// `(int_{|theta| <= 2^-k/10} |sum_{j in S_k} e(j theta)|^r dtheta)^{1/r} / sqrt(|S_k|)`
/// with S_k the block of length floor(4^{k/p}) starting at 2^k.
pub fn interference_lower_bound(k: u32, p: f64, rr: f64, nodes: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("k", "block index must be positive"));
    }
    if p <= 2.0 {
        return Err(Error::invalid("p", "needs p > 2"));
    }
    if rr < p {
        return Err(Error::invalid("r", "needs r >= p"));
    }
    if nodes < 256 {
        return Err(Error::invalid("nodes", "grid too coarse: need at least 256 nodes"));
    }
    let block_len = (4.0f64.powf(k as f64 / p) + 1e-9).floor() as usize;
    let width = 2.0f64.powi(-(k as i32)) / 10.0;
    let h = 2.0 * width / nodes as f64;
    let s = block_len as f64;
    let mut acc = 0.0;
    for j in 0..nodes {
        let theta = -width + (j as f64 + 0.5) * h;
        // |sum over the block| = |sin(pi s theta) / sin(pi theta)| (s at theta = 0)
        let denom = (std::f64::consts::PI * theta).sin();
        let v = if denom.abs() < 1e-300 {
            s
        } else {
            ((std::f64::consts::PI * s * theta).sin() / denom).abs()
        };
        acc += v.powf(rr) * h;
    }
    Ok(acc.powf(1.0 / rr) / s.sqrt())
}

/// Variant selector for the triple-norm target bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KestVariant<R> {
    Standard,
    /// Support restricted to a fixed Lambda(p1) set; `delta_prime = n^{2/p - 2/p1}`.
    Restricted { p1: R, delta_prime: R },
}

/// Right-hand side of the triple-norm target bound:
/// `(delta m3^{p/2-1} + (m2+m3)/m1)^{1/2} (1 + K2 + K3)^{p-sigma}`,
/// with the first term `delta' m3^{p/p1-1}` in the restricted variant.
#[allow(clippy::too_many_arguments)]
pub fn kest_rhs<R: Real>(
    m1: usize,
    m2: usize,
    m3: usize,
    delta: R,
    p: R,
    k2: R,
    k3: R,
    sigma: R,
    variant: KestVariant<R>,
) -> Result<R> {
    if m1 == 0 || m2 == 0 || m3 == 0 {
        return Err(Error::invalid("m", "support sizes must be positive"));
    }
    if sigma >= p {
        return Err(Error::invalid("sigma", "needs sigma < p"));
    }
    if k2 < R::one() || k3 < R::one() {
        return Err(Error::invalid("K", "constants are at least 1 on the restricted event"));
    }
    let m3r = ru::<R>(m3);
    let first = match variant {
        KestVariant::Standard => {
            if delta <= R::zero() || delta > R::one() {
                return Err(Error::invalid("delta", "selector mean must lie in (0, 1]"));
            }
            delta * m3r.powf(p / r::<R>(2.0) - R::one())
        }
        KestVariant::Restricted { p1, delta_prime } => {
            if p1 <= R::zero() {
                return Err(Error::invalid("p1", "must be positive"));
            }
            delta_prime * m3r.powf(p / p1 - R::one())
        }
    };
    let second = ru::<R>(m2 + m3) / ru::<R>(m1);
    Ok((first + second).sqrt() * (R::one() + k2 + k3).powf(p - sigma))
}

/// A witnessed estimate of the triple-supremum functional.
#[derive(Debug, Clone)]
pub struct TripleNormEstimate {
    pub m1: usize,
    pub m2: usize,
    pub m3: usize,
    /// (MC mean over omega_1 draws of [inner sup]^q0)^(1/q0) / sqrt(m1).
    pub value: f64,
    pub witness_a: Vec<usize>,
    pub witness_b: CoeffVector<f64>,
    pub witness_c: CoeffVector<f64>,
    pub q0: f64,
    pub samples: usize,
}

/// Knobs of the triple-norm estimator.
#[derive(Debug, Clone)]
pub struct TripleOptions {
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
}

impl Default for TripleOptions {
    fn default() -> Self {
        TripleOptions { restarts: 8, iters: 40, seed: 0 }
    }
}

/// scores, f_b samples, f_c samples, weight samples
type ScoreData = (Vec<f64>, FunctionSamples<f64>, FunctionSamples<f64>, FunctionSamples<f64>);
/// inner sup value, index set A, witnesses b and c
type BcOptimum = (f64, Vec<usize>, CoeffVector<f64>, CoeffVector<f64>);

/// The score vector x_i = |<phi_i, f_b (1 + |f_c|)^{p-2}>| for all i, where
/// f_b and f_c carry the omega_2 / omega_3 selector masks.
fn score_vector(
    system: &OrthogonalSystem<f64>,
    omega2: &SelectorSample,
    omega3: &SelectorSample,
    b: &CoeffVector<f64>,
    c: &CoeffVector<f64>,
    p: f64,
) -> Result<ScoreData> {
    let fb = system.synthesize(&omega2.mask(b.entries()))?;
    let fc = system.synthesize(&omega3.mask(c.entries()))?;
    let w = fc.map(|v| (1.0 + v.abs()).powf(p - 2.0));
    let raw = system.analyze(&fb.mul(&w))?;
    Ok((raw, fb, fc, w))
}

/// Exact inner supremum for fixed (b, c): sort xi_i(omega_1) x_i descending
/// (ties toward the lowest index) and take the top m1. Returns the UNSCALED
/// sum and the chosen index set A.
#[allow(clippy::too_many_arguments)]
pub fn inner_sup_exact(
    system: &OrthogonalSystem<f64>,
    omega1: &SelectorSample,
    omega2: &SelectorSample,
    omega3: &SelectorSample,
    b: &CoeffVector<f64>,
    c: &CoeffVector<f64>,
    p: f64,
    m1: usize,
    base_set: Option<&[usize]>,
) -> Result<(f64, Vec<usize>)> {
    let (raw, ..) = score_vector(system, omega2, omega3, b, c, p)?;
    Ok(top_m_sum(&raw, omega1, base_set, m1))
}

fn top_m_sum(
    raw_scores: &[f64],
    omega1: &SelectorSample,
    base_set: Option<&[usize]>,
    m1: usize,
) -> (f64, Vec<usize>) {
    let allowed = |i: usize| -> bool {
        omega1.bit(i) && base_set.is_none_or(|b| b.contains(&i))
    };
    let mut cand: Vec<(f64, usize)> = raw_scores
        .iter()
        .enumerate()
        .filter(|&(i, _)| allowed(i))
        .map(|(i, &x)| (x.abs(), i))
        .collect();
    cand.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    cand.truncate(m1);
    let sum = cand.iter().map(|&(x, _)| x).sum();
    let mut idx: Vec<usize> = cand.iter().map(|&(_, i)| i).collect();
    idx.sort_unstable();
    (sum, idx)
}

/// Estimate the triple-supremum functional
/// `sup_{|A| <= m1} sup_{b in Pi_m2} sup_{c in Pi_m3} m1^{-1/2} sum_{i in A}
/// xi_i(omega_1) |<phi_i, f_{b,omega_2} (1 + |f_{c,omega_3}|)^{p-2}>|`
/// in L^{q0} over the given omega_1 draws.
///
/// The inner supremum over A is exact (sorting); the supremum over (b, c) is
/// approximated by alternating sparse maximization: an exact linear update
/// for b, a gradient step with hard thresholding to m-sparsity and sphere
/// projection for c, multi-start.
#[allow(clippy::too_many_arguments)]
pub fn estimate_k_triple(
    system: &OrthogonalSystem<f64>,
    omega1_draws: &[SelectorSample],
    omega2: &SelectorSample,
    omega3: &SelectorSample,
    p: f64,
    (m1, m2, m3): (usize, usize, usize),
    q0: f64,
    base_set: Option<&[usize]>,
    opts: &TripleOptions,
) -> Result<TripleNormEstimate> {
    let n = system.len();
    if m1 == 0 || m2 == 0 || m3 == 0 || m1 > n || m2 > n || m3 > n {
        return Err(Error::invalid("m", format!("support sizes must lie in 1..={n}")));
    }
    if omega1_draws.is_empty() {
        return Err(Error::invalid("omega1_draws", "need at least one draw"));
    }
    if p <= 2.0 {
        return Err(Error::invalid("p", "needs p > 2"));
    }
    if q0 < 1.0 {
        return Err(Error::invalid("q0", "needs q0 >= 1"));
    }
    if let Some(b) = base_set {
        validate_index_set(b, n)?;
    }

    // per-draw optimizations run concurrently; the indexed collect keeps the
    // reduction order fixed, so the estimate is thread-count independent
    let per_draw: Result<Vec<_>> = omega1_draws
        .par_iter()
        .enumerate()
        .map(|(draw_idx, omega1)| {
            optimize_bc(
                system,
                omega1,
                omega2,
                omega3,
                p,
                (m1, m2, m3),
                base_set,
                opts,
                draw_idx as u64,
            )
        })
        .collect();
    let mut acc = 0.0f64;
    let mut best = (f64::NEG_INFINITY, Vec::new(), CoeffVector::zeros(n), CoeffVector::zeros(n));
    for (sup, a_set, b, c) in per_draw? {
        acc += sup.powf(q0);
        if sup > best.0 {
            best = (sup, a_set, b, c);
        }
    }
    let value = (acc / omega1_draws.len() as f64).powf(1.0 / q0) / (m1 as f64).sqrt();
    Ok(TripleNormEstimate {
        m1,
        m2,
        m3,
        value,
        witness_a: best.1,
        witness_b: best.2,
        witness_c: best.3,
        q0,
        samples: omega1_draws.len(),
    })
}

/// Random m-sparse unit vector over the allowed indices (zero when none are
/// allowed: the masked synthesis vanishes for every such vector anyway).
fn sparse_start(n: usize, m: usize, allowed: &[usize], seed: u64, flat: bool) -> CoeffVector<f64> {
    if allowed.is_empty() {
        return CoeffVector::zeros(n);
    }
    let pool = allowed.to_vec();
    let m = m.min(pool.len());
    // deterministic partial shuffle
    let mut idx = pool;
    for i in 0..m {
        let j = i + (rng::bits(seed, i as u64) as usize) % (idx.len() - i);
        idx.swap(i, j);
    }
    let chosen = &idx[..m];
    let terms: Vec<(usize, f64)> = if flat {
        chosen.iter().map(|&i| (i, 1.0 / (m as f64).sqrt())).collect()
    } else {
        let mut g = vec![0.0; m];
        rng::unit_sphere(rng::bits(seed, 1 << 20), m, &mut g);
        chosen.iter().copied().zip(g).collect()
    };
    CoeffVector::from_sparse(n, &terms).expect("indices validated")
}

#[allow(clippy::too_many_arguments)]
fn optimize_bc(
    system: &OrthogonalSystem<f64>,
    omega1: &SelectorSample,
    omega2: &SelectorSample,
    omega3: &SelectorSample,
    p: f64,
    (m1, m2, m3): (usize, usize, usize),
    base_set: Option<&[usize]>,
    opts: &TripleOptions,
    draw_idx: u64,
) -> Result<BcOptimum> {
    let n = system.len();
    let in_base = |i: usize| base_set.is_none_or(|b| b.contains(&i));
    let allowed_b: Vec<usize> = (0..n).filter(|&i| omega2.bit(i) && in_base(i)).collect();
    let allowed_c: Vec<usize> = (0..n).filter(|&i| omega3.bit(i) && in_base(i)).collect();

    let mut best = (0.0f64, Vec::new(), CoeffVector::zeros(n), CoeffVector::zeros(n));

    for ridx in 0..opts.restarts {
        let rs = rng::derive_seed(opts.seed, rng::Stream::Restart, draw_idx * 1_000 + ridx as u64);
        let mut b = sparse_start(n, m2, &allowed_b, rng::bits(rs, 0), ridx % 2 == 0);
        let mut c = sparse_start(n, m3, &allowed_c, rng::bits(rs, 1), ridx % 2 == 1);
        let mut eta = 0.5f64;

        // every best-update pairs the score with the exact (A, b, c) that
        // achieved it, so the returned witness reproduces the reported value
        for _ in 0..opts.iters {
            let (raw, _fb, _fc, w) = score_vector(system, omega2, omega3, &b, &c, p)?;
            let (val, aset) = top_m_sum(&raw, omega1, base_set, m1);
            if val > best.0 {
                best = (val, aset.clone(), b.clone(), c.clone());
            }
            if aset.is_empty() {
                break;
            }
            // exact b-step for fixed (A, signs, c): the objective is linear in b
            let psi_terms: Vec<(usize, f64)> =
                aset.iter().map(|&i| (i, raw[i].signum())).collect();
            let psi = system.synthesize_sparse(&psi_terms)?;
            let g_b = system.analyze(&psi.mul(&w))?;
            let masked: Vec<f64> = (0..n)
                .map(|j| if omega2.bit(j) && in_base(j) { g_b[j] } else { 0.0 })
                .collect();
            if let Some(nb) = CoeffVector::from_dense(&masked).hard_threshold(m2).normalized() {
                b = nb;
            }

            let (raw2, _fb2, fc2, _w2) = score_vector(system, omega2, omega3, &b, &c, p)?;
            let (val2, aset2) = top_m_sum(&raw2, omega1, base_set, m1);
            let mut cur = val2;
            if cur > best.0 {
                best = (cur, aset2.clone(), b.clone(), c.clone());
            }
            let psi_terms2: Vec<(usize, f64)> =
                aset2.iter().map(|&i| (i, raw2[i].signum())).collect();
            if psi_terms2.is_empty() {
                break;
            }

            // gradient ascent + hard threshold + sphere projection for c
            let psi2 = system.synthesize_sparse(&psi_terms2)?;
            let fb2 = system.synthesize(&omega2.mask(b.entries()))?;
            let kernel = psi2
                .mul(&fb2)
                .mul(&fc2.map(|v| v.signum() * (1.0 + v.abs()).powf(p - 3.0)));
            let g_c = system.analyze(&kernel)?;
            let stepped: Vec<f64> = (0..n)
                .map(|j| {
                    let g = if omega3.bit(j) && in_base(j) { (p - 2.0) * g_c[j] } else { 0.0 };
                    c.get(j) + eta * g
                })
                .collect();
            if let Some(nc) = CoeffVector::from_dense(&stepped).hard_threshold(m3).normalized() {
                let (raw3, ..) = score_vector(system, omega2, omega3, &b, &nc, p)?;
                let (val3, aset3) = top_m_sum(&raw3, omega1, base_set, m1);
                if val3 >= cur {
                    c = nc;
                    cur = val3;
                    eta *= 1.5;
                    if cur > best.0 {
                        best = (cur, aset3.clone(), b.clone(), c.clone());
                    }
                } else {
                    eta *= 0.5;
                }
            }
            if eta < 1e-6 {
                break;
            }
        }
    }
    Ok(best)
}
