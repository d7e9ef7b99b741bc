//! Metric entropy: packing/covering numbers and their comparison chain,
//! volume bounds, Levy means, the entropy integral, the randomized
//! support-reduction approximation, and the chaining bound check.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lambda::CoeffVector;
use crate::orthosys::OrthogonalSystem;
use crate::rng;
use crate::scalar::Real;
use crate::special::ln_gamma;

/// Norm backing a point cloud: Euclidean on R^n, or the L^q norm of the
/// synthesized function of a coefficient vector.
#[derive(Debug, Clone)]
pub enum CloudNorm<R> {
    Euclidean,
    Lq { system: Arc<OrthogonalSystem<R>>, q: R },
}

impl<R: Real> CloudNorm<R> {
    pub fn norm_of(&self, v: &[R]) -> R {
        match self {
            CloudNorm::Euclidean => v.iter().map(|&x| x * x).sum::<R>().sqrt(),
            CloudNorm::Lq { system, q } => {
                let f = system.synthesize(v).expect("dimension checked at construction");
                system.lp_norm(&f, *q).expect("q validated at construction")
            }
        }
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if let CloudNorm::Lq { system, q } = self {
            if system.len() != dim {
                return Err(Error::invalid("norm", "system size must match the point dimension"));
            }
            if *q < R::one() {
                return Err(Error::invalid("q", "L^q norms need q >= 1"));
            }
        }
        Ok(())
    }
}

/// A finite point cloud with a norm.
#[derive(Debug, Clone)]
pub struct NormedCloud<R> {
    points: Vec<Vec<R>>,
    norm: CloudNorm<R>,
    dim: usize,
}

impl<R: Real> NormedCloud<R> {
    pub fn new(points: Vec<Vec<R>>, norm: CloudNorm<R>) -> Result<Self> {
        let dim = points.first().map_or(0, |p| p.len());
        for p in &points {
            if p.len() != dim {
                return Err(Error::invalid("points", "points must share one dimension"));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("points", "points must be finite"));
            }
        }
        if !points.is_empty() {
            norm.check_dim(dim)?;
        }
        Ok(NormedCloud { points, norm, dim })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<R>] {
        &self.points
    }

    pub fn norm(&self) -> &CloudNorm<R> {
        &self.norm
    }

    pub fn distance_between(&self, x: &[R], y: &[R]) -> R {
        let diff: Vec<R> = x.iter().zip(y).map(|(&a, &b)| a - b).collect();
        self.norm.norm_of(&diff)
    }

    pub fn distance(&self, i: usize, j: usize) -> R {
        self.distance_between(&self.points[i], &self.points[j])
    }

    /// Count triangle-inequality violations over random triples (norm-axiom
    /// spot check; should be zero).
    pub fn triangle_violations(&self, triples: usize, seed: u64, tol: R) -> usize {
        if self.len() < 3 {
            return 0;
        }
        let mut bad = 0;
        for t in 0..triples {
            let pick = |c: u64| (rng::bits(seed, t as u64 * 3 + c) as usize) % self.len();
            let (i, j, k) = (pick(0), pick(1), pick(2));
            if self.distance(i, k) > self.distance(i, j) + self.distance(j, k) + tol {
                bad += 1;
            }
        }
        bad
    }
}

/// Outputs of packing / covering computations at one radius.
#[derive(Debug, Clone)]
pub struct PackingResult<R> {
    pub t: R,
    /// Size of the greedy maximal t-separated subset (scan in input order).
    pub d_greedy: usize,
    /// Exact packing number D(t) (strict separation > t).
    pub d_exact: Option<usize>,
    /// Exact covering number with centers anywhere in the midpoint lattice
    /// (an upper bound for the free-center covering number E).
    pub e_exact: Option<usize>,
    /// Exact covering number with centers in the cloud.
    pub etilde_exact: Option<usize>,
    /// Exact packing number at radius 2t.
    pub d_exact_2t: Option<usize>,
    /// Exact internal covering number at radius 2t.
    pub etilde_exact_2t: Option<usize>,
    /// Greedy centers (indices into the cloud).
    pub centers: Vec<usize>,
}

impl<R: Real> PackingResult<R> {
    /// The comparison chain D(t) >= Etilde(t) >= E(t) >= D(2t) plus
    /// E(t) >= Etilde(2t), on whatever exact fields are present.
    pub fn chain_holds(&self) -> bool {
        let (Some(d), Some(e), Some(et), Some(d2), Some(et2)) = (
            self.d_exact,
            self.e_exact,
            self.etilde_exact,
            self.d_exact_2t,
            self.etilde_exact_2t,
        ) else {
            return true;
        };
        d >= et && et >= e && e >= d2 && e >= et2
    }
}

/// Greedy maximal t-separated subset, scanning points in input order.
///
/// The returned centers are pairwise more than t apart (a valid packing, so
/// the count is a lower bound for D(t)), and by maximality they t-cover the
/// cloud (so the count is also an upper bound for the internal covering).
pub fn greedy_packing<R: Real>(cloud: &NormedCloud<R>, t: R) -> Result<PackingResult<R>> {
    if cloud.is_empty() {
        return Err(Error::invalid("cloud", "empty cloud"));
    }
    if t <= R::zero() {
        return Err(Error::invalid("t", "radius must be positive"));
    }
    let mut centers: Vec<usize> = Vec::new();
    for i in 0..cloud.len() {
        if centers.iter().all(|&c| cloud.distance(i, c) > t) {
            centers.push(i);
        }
    }
    // the centers are separated by construction; assert exactly
    for (a, &i) in centers.iter().enumerate() {
        for &j in centers.iter().skip(a + 1) {
            debug_assert!(cloud.distance(i, j) > t);
        }
    }
    Ok(PackingResult {
        t,
        d_greedy: centers.len(),
        d_exact: None,
        e_exact: None,
        etilde_exact: None,
        d_exact_2t: None,
        etilde_exact_2t: None,
        centers,
    })
}

/// Exact minimum set cover: `sets[i]` are bitmasks over `n_elems` elements.
fn exact_cover(sets: &[u32], n_elems: usize) -> usize {
    let full: u32 = if n_elems == 32 { u32::MAX } else { (1u32 << n_elems) - 1 };
    let mut best = vec![u32::MAX; (full as usize) + 1];
    best[0] = 0;
    for mask in 0..=full {
        if best[mask as usize] == u32::MAX {
            continue;
        }
        if mask == full {
            break;
        }
        let missing = (!mask & full).trailing_zeros();
        for s in sets {
            if s & (1 << missing) != 0 {
                let next = (mask | s) & full;
                let cand = best[mask as usize] + 1;
                if cand < best[next as usize] {
                    best[next as usize] = cand;
                }
            }
        }
    }
    best[full as usize] as usize
}

/// Exact maximum subset with pairwise distance strictly above t.
fn exact_packing_count<R: Real>(cloud: &NormedCloud<R>, t: R) -> usize {
    let n = cloud.len();
    let mut conflict = vec![0u32; n];
    for (i, ci) in conflict.iter_mut().enumerate() {
        for j in 0..n {
            if i != j && cloud.distance(i, j) <= t {
                *ci |= 1 << j;
            }
        }
    }
    let total = 1usize << n;
    let mut valid = vec![false; total];
    valid[0] = true;
    let mut best = 0usize;
    for mask in 1..total {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        if valid[rest] && (rest as u32) & conflict[low] == 0 {
            valid[mask] = true;
            best = best.max(mask.count_ones() as usize);
        }
    }
    best
}

fn cover_masks_from_centers<R: Real>(
    cloud: &NormedCloud<R>,
    centers: &[Vec<R>],
    t: R,
) -> Vec<u32> {
    centers
        .iter()
        .map(|c| {
            let mut m = 0u32;
            for (i, p) in cloud.points().iter().enumerate() {
                if cloud.distance_between(p, c) <= t {
                    m |= 1 << i;
                }
            }
            m
        })
        .filter(|&m| m != 0)
        .collect()
}

/// All exact entropy quantities at radius t (and the chain partners at 2t)
/// for clouds of at most 15 points.
///
/// E uses centers from the candidate midpoint lattice (all points plus all
/// pairwise midpoints); Etilde restricts centers to the cloud; D is maximal
/// strict separation.
pub fn exact_entropy<R: Real>(cloud: &NormedCloud<R>, t: R) -> Result<PackingResult<R>> {
    if cloud.is_empty() {
        return Err(Error::invalid("cloud", "empty cloud"));
    }
    if t <= R::zero() {
        return Err(Error::invalid("t", "radius must be positive"));
    }
    let n = cloud.len();
    if n > 15 {
        return Err(Error::SizeLimit { what: "exact entropy search", limit: 15, got: n });
    }
    let two = R::one() + R::one();

    let d_exact = exact_packing_count(cloud, t);
    let d_exact_2t = exact_packing_count(cloud, two * t);

    let internal: Vec<Vec<R>> = cloud.points().to_vec();
    let mut candidates = internal.clone();
    for i in 0..n {
        for j in i + 1..n {
            let mid: Vec<R> = cloud.points()[i]
                .iter()
                .zip(&cloud.points()[j])
                .map(|(&a, &b)| (a + b) / two)
                .collect();
            candidates.push(mid);
        }
    }
    let etilde_exact = exact_cover(&cover_masks_from_centers(cloud, &internal, t), n);
    let etilde_exact_2t = exact_cover(&cover_masks_from_centers(cloud, &internal, two * t), n);
    let e_exact = exact_cover(&cover_masks_from_centers(cloud, &candidates, t), n);

    let greedy = greedy_packing(cloud, t)?;
    debug_assert!(greedy.d_greedy <= d_exact);
    Ok(PackingResult {
        t,
        d_greedy: greedy.d_greedy,
        d_exact: Some(d_exact),
        e_exact: Some(e_exact),
        etilde_exact: Some(etilde_exact),
        d_exact_2t: Some(d_exact_2t),
        etilde_exact_2t: Some(etilde_exact_2t),
        centers: greedy.centers,
    })
}

/// Outcome of the volume-counting packing bound.
#[derive(Debug, Clone, Copy)]
pub struct VolumeBound {
    pub greedy_count: usize,
    /// (4/t)^dim.
    pub bound: f64,
    pub pass: bool,
}

/// Greedy-pack a dense sample of the unit ball of the norm at radius t and
/// compare to the volume bound (4/t)^dim. Any valid packing obeys the bound.
pub fn volume_bound_check(
    norm: &CloudNorm<f64>,
    dim: usize,
    t: f64,
    samples: usize,
    seed: u64,
) -> Result<VolumeBound> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::invalid("t", "needs t in (0,1)"));
    }
    if dim == 0 || dim > 4 {
        return Err(Error::invalid("dim", "dense sampling supports dimensions 1..=4"));
    }
    norm.check_dim(dim)?;
    // bounding box of the unit ball: ||x||_X >= min_i l2norm_i * |x|
    let half_width = match norm {
        CloudNorm::Euclidean => 1.0,
        CloudNorm::Lq { system, .. } => {
            let min_l2 = system.l2_norms().iter().cloned().fold(f64::MAX, f64::min);
            1.0 / min_l2
        }
    };
    let mut pts: Vec<Vec<f64>> = Vec::new();
    for s in 0..samples {
        let p: Vec<f64> = (0..dim)
            .map(|k| (2.0 * rng::uniform(seed, (s * dim + k) as u64) - 1.0) * half_width)
            .collect();
        if norm.norm_of(&p) <= 1.0 {
            pts.push(p);
        }
    }
    if pts.is_empty() {
        pts.push(vec![0.0; dim]);
    }
    let cloud = NormedCloud::new(pts, norm.clone())?;
    let greedy = greedy_packing(&cloud, t)?;
    let bound = (4.0 / t).powi(dim as i32);
    Ok(VolumeBound { greedy_count: greedy.d_greedy, bound, pass: (greedy.d_greedy as f64) <= bound })
}

/// `alpha_n = Gamma(n/2) / (sqrt(2) Gamma((n+1)/2))`, the sphere-to-Gaussian
/// normalization of the Levy mean, computed through log-gamma.
pub fn alpha_n(n: usize) -> f64 {
    assert!(n >= 1);
    (ln_gamma(n as f64 / 2.0) - ln_gamma((n as f64 + 1.0) / 2.0)).exp() / 2.0f64.sqrt()
}

/// Space whose Levy mean is estimated.
#[derive(Debug, Clone)]
pub enum LevySpace {
    Euclidean { n: usize },
    Lq { system: Arc<OrthogonalSystem<f64>>, q: f64 },
}

/// Monte Carlo estimate of the Levy mean via the Gaussian representation
/// `M_X = alpha_n E || sum_i g_i e_i ||`.
#[derive(Debug, Clone)]
pub struct LevyMeanEstimate {
    pub n: usize,
    pub q: Option<f64>,
    pub m_x: f64,
    pub stderr: f64,
    pub alpha_n: f64,
}

pub fn levy_mean(space: &LevySpace, trials: usize, seed: u64) -> Result<LevyMeanEstimate> {
    if trials < 1_000 {
        return Err(Error::invalid("trials", "need at least 1000 trials"));
    }
    let (n, q) = match space {
        LevySpace::Euclidean { n } => (*n, None),
        LevySpace::Lq { system, q } => (system.len(), Some(*q)),
    };
    if n == 0 {
        return Err(Error::invalid("n", "dimension must be positive"));
    }
    if let Some(q) = q {
        if q < 1.0 {
            return Err(Error::invalid("q", "L^q norms need q >= 1"));
        }
    }
    let a = alpha_n(n);
    let mut sum = 0.0f64;
    let mut sumsq = 0.0f64;
    let mut g = vec![0.0f64; n];
    for t in 0..trials {
        let ts = rng::derive_seed(seed, rng::Stream::Gauss, t as u64);
        for (i, gi) in g.iter_mut().enumerate() {
            *gi = rng::gaussian(ts, i as u64);
        }
        let nr = match space {
            LevySpace::Euclidean { .. } => g.iter().map(|x| x * x).sum::<f64>().sqrt(),
            LevySpace::Lq { system, q } => {
                let f = system.synthesize(&g)?;
                system.lp_norm(&f, *q)?
            }
        };
        sum += nr;
        sumsq += nr * nr;
    }
    let mean = sum / trials as f64;
    let var = (sumsq / trials as f64 - mean * mean).max(0.0);
    Ok(LevyMeanEstimate {
        n,
        q,
        m_x: a * mean,
        stderr: a * (var / trials as f64).sqrt(),
        alpha_n: a,
    })
}

/// Right-endpoint Riemann sum of `[ln N(t)]^{1/2}` over [0, B] for a step
/// function N given by `counts[i] = N(radii[i])` on strictly decreasing
/// radii, with N extended by `counts[0]` on `(radii[0], B]`.
pub fn entropy_integral<R: Real>(radii: &[R], counts: &[R], b: R) -> Result<R> {
    if b <= R::zero() {
        return Err(Error::invalid("B", "upper limit must be positive"));
    }
    if radii.is_empty() || radii.len() != counts.len() {
        return Err(Error::invalid("radii", "need matching nonempty radii and counts"));
    }
    for i in 0..radii.len() {
        if radii[i] <= R::zero() || radii[i] > b {
            return Err(Error::invalid("radii", "radii must lie in (0, B]"));
        }
        if counts[i] < R::one() {
            return Err(Error::invalid("counts", "covering counts are at least 1"));
        }
        if i > 0 {
            if radii[i] >= radii[i - 1] {
                return Err(Error::invalid("radii", "radii must be strictly decreasing"));
            }
            if counts[i] < counts[i - 1] {
                return Err(Error::invalid("counts", "counts must be nonincreasing in t"));
            }
        }
    }
    let g = |c: R| c.ln().max(R::zero()).sqrt();
    let k = radii.len();
    let mut total = (b - radii[0]) * g(counts[0]);
    for i in 1..k {
        total += (radii[i - 1] - radii[i]) * g(counts[i - 1]);
    }
    total += radii[k - 1] * g(counts[k - 1]);
    Ok(total)
}

/// Acceptance thresholds of one support-reduction attempt.
#[derive(Debug, Clone, Copy)]
pub struct ReductionThresholds {
    /// 10 * sqrt(q) * sum_{l<=k} 2^{l/2}, the Khintchine majorant for ||Phi||_q.
    pub phi: f64,
    /// 10 * 2^{-k} m, ten times the exact expectation of |A_eps|.
    pub cardinality: f64,
    /// 10 * 2^{k/2}, the majorant for ||E||_2.
    pub residual_l2: f64,
}

/// Outcome of the randomized support reduction.
#[derive(Debug, Clone)]
pub struct ReductionResult {
    pub k: u32,
    /// Sign array of the accepted (or last) attempt: one row of k signs per
    /// support index of f, in support order.
    pub signs: Vec<Vec<i8>>,
    /// ||Phi||_q of the accepted (or last) attempt, Phi = f - E.
    pub phi_norm: f64,
    /// A_eps: support indices whose k signs are all -1.
    pub residual_support: Vec<usize>,
    /// Coefficients of E: 2^k a_i on A_eps.
    pub residual: CoeffVector<f64>,
    pub e2_norm: f64,
    pub accepted: bool,
    pub tries: usize,
    pub thresholds: ReductionThresholds,
}

/// Randomized support reduction: split f (unit norm, support size m) into
/// `Phi + E` with E supported on `A_eps = {i : all k signs at i equal -1}`
/// and coefficients `2^k a_i`, accepting when all three analytic thresholds
/// hold. The split satisfies `||f - E||_q = ||Phi||_q` by construction and
/// `E|A_eps| = 2^{-k} m` exactly.
pub fn support_reduce(
    system: &OrthogonalSystem<f64>,
    f: &CoeffVector<f64>,
    t: f64,
    q: f64,
    max_tries: usize,
    seed: u64,
) -> Result<ReductionResult> {
    if t <= 2.0 {
        return Err(Error::invalid("t", "needs t > 2 so that k >= 2"));
    }
    if q < 2.0 {
        return Err(Error::invalid("q", "needs q >= 2"));
    }
    if max_tries == 0 {
        return Err(Error::invalid("max_tries", "need at least one attempt"));
    }
    if f.len() != system.len() {
        return Err(Error::invalid("f", "coefficient length must match the system"));
    }
    let m = f.support_size();
    if m == 0 {
        return Err(Error::invalid("f", "support must be nonempty"));
    }
    if (f.norm2() - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("f", "needs |f| = 1"));
    }
    // largest k with 2^{k/2} <= t
    let mut k = 1u32;
    while 2.0f64.powf((k + 1) as f64 / 2.0) <= t {
        k += 1;
    }
    debug_assert!(k >= 2);

    let scale = 2.0f64.powi(k as i32);
    let m_hat1: f64 = q.sqrt() * (1..=k).map(|l| 2.0f64.powf(l as f64 / 2.0)).sum::<f64>();
    let thresholds = ReductionThresholds {
        phi: 10.0 * m_hat1,
        cardinality: 10.0 * m as f64 / scale,
        residual_l2: 10.0 * 2.0f64.powf(k as f64 / 2.0),
    };

    let f_samples = system.synthesize(f.entries())?;
    let support = f.support().to_vec();
    let mut last: Option<ReductionResult> = None;

    for attempt in 0..max_tries {
        let ts = rng::derive_seed(seed, rng::Stream::Signs, attempt as u64);
        let signs: Vec<Vec<i8>> = (0..m)
            .map(|j| (0..k).map(|l| rng::rademacher(ts, (j as u64) * k as u64 + l as u64)).collect())
            .collect();
        let residual_support: Vec<usize> = support
            .iter()
            .enumerate()
            .filter(|(j, _)| signs[*j].iter().all(|&s| s == -1))
            .map(|(_, &i)| i)
            .collect();
        let residual_terms: Vec<(usize, f64)> =
            residual_support.iter().map(|&i| (i, f.get(i) * scale)).collect();
        let residual = CoeffVector::from_sparse(f.len(), &residual_terms)?;
        let e_samples = system.synthesize(residual.entries())?;
        // Phi is the complementary telescoping part: pointwise f - E
        let phi = FunctionDiff::diff(&f_samples, &e_samples);
        let phi_norm = system.lp_norm(&phi, q)?;
        let e2_norm = system.lp_norm(&e_samples, 2.0)?;
        let accepted = phi_norm < thresholds.phi
            && (residual_support.len() as f64) < thresholds.cardinality
            && e2_norm < thresholds.residual_l2;
        let result = ReductionResult {
            k,
            signs,
            phi_norm,
            residual_support,
            residual,
            e2_norm,
            accepted,
            tries: attempt + 1,
            thresholds,
        };
        if accepted {
            return Ok(result);
        }
        last = Some(result);
    }
    Ok(last.expect("max_tries >= 1"))
}

// pointwise difference of two sample vectors on the same grid
struct FunctionDiff;
impl FunctionDiff {
    fn diff(
        f: &crate::orthosys::FunctionSamples<f64>,
        e: &crate::orthosys::FunctionSamples<f64>,
    ) -> crate::orthosys::FunctionSamples<f64> {
        let mut out = f.clone();
        for (o, &v) in out.values.iter_mut().zip(&e.values) {
            *o -= v;
        }
        out
    }
}

/// Outcome of the chaining bound check.
#[derive(Debug, Clone)]
pub struct ChainingCheck {
    /// MC estimate of || sup_{x, |A| <= m} sum_{i in A} xi_i x_i ||_{q0}.
    pub lhs: f64,
    /// [delta m + q0/ln(1/delta)]^{1/2} B + (ln 1/delta)^{-1/2} * entropy integral.
    pub rhs: f64,
    pub ratio: f64,
    pub b: f64,
    pub integral: f64,
    pub ceiling: f64,
    pub pass: bool,
}

/// Monte Carlo check of the chaining bound for the selector process over a
/// nonnegative cloud (at most 40 points). The supremum over points and
/// |A| <= m is computed exactly per draw; covering counts come from the
/// exact search when the cloud has at most 15 points and from greedy
/// packings (upper bounds) otherwise.
pub fn chaining_bound_check(
    points: &[Vec<f64>],
    m: usize,
    delta: f64,
    q0: f64,
    trials: usize,
    seed: u64,
) -> Result<ChainingCheck> {
    if points.is_empty() || points.len() > 40 {
        return Err(Error::invalid("points", "need 1..=40 points"));
    }
    let dim = points[0].len();
    if dim == 0 || points.iter().any(|p| p.len() != dim) {
        return Err(Error::invalid("points", "points must share a positive dimension"));
    }
    if points.iter().any(|p| p.iter().any(|&v| v < 0.0)) {
        return Err(Error::invalid("points", "cloud must lie in the nonnegative orthant"));
    }
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::invalid("delta", "needs delta in (0, 1/2]"));
    }
    if m == 0 || m > dim {
        return Err(Error::invalid("m", "needs 1 <= m <= dimension"));
    }
    if q0 < 1.0 {
        return Err(Error::invalid("q0", "needs q0 >= 1"));
    }
    if trials < 100 {
        return Err(Error::invalid("trials", "need at least 100 trials"));
    }

    // lhs: exact sup per draw (top-m sum of selected coordinates, per point)
    let mut acc = 0.0f64;
    for t in 0..trials {
        let ts = rng::derive_seed(seed, rng::Stream::Omega, t as u64);
        let bits: Vec<bool> = (0..dim).map(|i| rng::bernoulli(ts, i as u64, delta)).collect();
        let mut sup = 0.0f64;
        for p in points {
            let mut sel: Vec<f64> =
                p.iter().enumerate().filter(|&(i, _)| bits[i]).map(|(_, &v)| v).collect();
            sel.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let s: f64 = sel.iter().take(m).sum();
            sup = sup.max(s);
        }
        acc += sup.powf(q0);
    }
    let lhs = (acc / trials as f64).powf(1.0 / q0);

    let b = points
        .iter()
        .map(|p| p.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0f64, f64::max);
    let integral = if b == 0.0 {
        0.0
    } else {
        let cloud = NormedCloud::new(points.to_vec(), CloudNorm::Euclidean)?;
        let levels = 20usize;
        let mut radii = Vec::with_capacity(levels);
        let mut counts = Vec::with_capacity(levels);
        let mut prev = 1.0f64;
        for j in 0..levels {
            let t_j = b / 2.0f64.powi(j as i32);
            let count = if points.len() <= 15 {
                exact_entropy(&cloud, t_j)?.e_exact.unwrap_or(points.len())
            } else {
                greedy_packing(&cloud, t_j)?.d_greedy
            } as f64;
            let count = count.max(prev).min(points.len() as f64);
            prev = count;
            radii.push(t_j);
            counts.push(count);
        }
        entropy_integral(&radii, &counts, b)?
    };
    let log_inv = (1.0 / delta).ln();
    let rhs = (delta * m as f64 + q0 / log_inv).sqrt() * b + integral / log_inv.sqrt();
    let ceiling = crate::tol::CHAINING_CEILING;
    let ratio = if rhs == 0.0 { 0.0 } else { lhs / rhs };
    Ok(ChainingCheck { lhs, rhs, ratio, b, integral, ceiling, pass: ratio <= ceiling })
}

/// One row of the sparse-ball entropy scan.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub n: usize,
    pub m: usize,
    pub t: f64,
    pub q: f64,
    pub count_kind: &'static str,
    /// Greedy packing count at radius 2t: a certified lower bound for the
    /// covering number of the sparse ball at radius t.
    pub count: usize,
    /// Reference entropy value m t^{-2} ln(1 + n/m).
    pub bound: f64,
    /// ln(count) / bound.
    pub ratio: f64,
}

fn combinations(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(m);
    fn rec(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, m, cur, out);
            cur.pop();
        }
    }
    rec(0, n, m, &mut cur, &mut out);
    out
}

/// Candidate pool for the sparse ball: per support, every flat sign pattern
/// (the known packing extremizers) plus sphere-uniform random vectors up to
/// the pool cap.
fn sparse_ball_pool(
    n: usize,
    m: usize,
    cap: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    let supports = combinations(n, m);
    let mut pool: Vec<Vec<f64>> = Vec::new();
    let flat = 1.0 / (m as f64).sqrt();
    for (si, sup) in supports.iter().enumerate() {
        for signs in 0..(1usize << m) {
            if pool.len() >= cap {
                return pool;
            }
            let mut v = vec![0.0; n];
            for (b, &i) in sup.iter().enumerate() {
                v[i] = if (signs >> b) & 1 == 0 { flat } else { -flat };
            }
            pool.push(v);
            let _ = si;
        }
    }
    let mut extra = 0u64;
    while pool.len() < cap {
        let sup = &supports[(rng::bits(seed, extra) as usize) % supports.len()];
        let mut g = vec![0.0; m];
        rng::unit_sphere(rng::derive_seed(seed, rng::Stream::Cloud, extra), m, &mut g);
        let mut v = vec![0.0; n];
        for (b, &i) in sup.iter().enumerate() {
            v[i] = g[b];
        }
        pool.push(v);
        extra += 1;
    }
    pool
}

/// Greedy-packing lower bounds for the entropy of sparse coefficient balls,
/// scanned over support sizes and radii.
pub fn entropy_scaling_scan(
    system: &Arc<OrthogonalSystem<f64>>,
    m_list: &[usize],
    t_list: &[f64],
    q: f64,
    seed: u64,
) -> Result<Vec<ScanRow>> {
    let n = system.len();
    if n > 12 {
        return Err(Error::SizeLimit { what: "entropy scan dimension", limit: 12, got: n });
    }
    if q < 1.0 {
        return Err(Error::invalid("q", "L^q norms need q >= 1"));
    }
    let mut rows = Vec::new();
    for &m in m_list {
        if m == 0 || m > n {
            return Err(Error::invalid("m", format!("support size must lie in 1..={n}")));
        }
        if m > 3 && m < n {
            return Err(Error::SizeLimit { what: "entropy scan support size", limit: 3, got: m });
        }
        let pool = sparse_ball_pool(n, m, 2_000, rng::derive_seed(seed, rng::Stream::Cloud, m as u64));
        let cloud = NormedCloud::new(pool, CloudNorm::Lq { system: Arc::clone(system), q })?;
        for &t in t_list {
            if t <= 0.0 {
                return Err(Error::invalid("t", "radii must be positive"));
            }
            let count = greedy_packing(&cloud, 2.0 * t)?.d_greedy;
            let bound = m as f64 * t.powi(-2) * (1.0 + n as f64 / m as f64).ln();
            let ratio = (count as f64).ln() / bound;
            rows.push(ScanRow {
                n,
                m,
                t,
                q,
                count_kind: "greedy_packing_2t",
                count,
                bound,
                ratio,
            });
        }
    }
    Ok(rows)
}

/// Outcome of the product/sum-set covering comparison.
#[derive(Debug, Clone, Copy)]
pub struct ProductEntropyCheck {
    pub sum_cover: usize,
    pub left_half_cover: usize,
    pub right_half_cover: usize,
    pub pass: bool,
}

/// Exact internal covering of the Minkowski sum set against the product of
/// the component coverings at half radius: `N(X + Y, t) <= N(X, t/2) N(Y, t/2)`.
pub fn product_entropy_check(
    x: &[Vec<f64>],
    y: &[Vec<f64>],
    t: f64,
) -> Result<ProductEntropyCheck> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::invalid("x", "clouds must be nonempty"));
    }
    if x.len() * y.len() > 15 {
        return Err(Error::SizeLimit { what: "sum-set exact cover", limit: 15, got: x.len() * y.len() });
    }
    if t <= 0.0 {
        return Err(Error::invalid("t", "radius must be positive"));
    }
    let dim = x[0].len();
    let sum_pts: Vec<Vec<f64>> = x
        .iter()
        .flat_map(|a| y.iter().map(move |b| a.iter().zip(b).map(|(&p, &q)| p + q).collect()))
        .collect();
    let cover = |pts: &[Vec<f64>], radius: f64| -> Result<usize> {
        let cloud = NormedCloud::new(pts.to_vec(), CloudNorm::Euclidean)?;
        let masks = cover_masks_from_centers(&cloud, pts, radius);
        Ok(exact_cover(&masks, pts.len()))
    };
    let sum_cover = cover(&sum_pts, t)?;
    let left = cover(x, t / 2.0)?;
    let right = cover(y, t / 2.0)?;
    let _ = dim;
    Ok(ProductEntropyCheck {
        sum_cover,
        left_half_cover: left,
        right_half_cover: right,
        pass: sum_cover <= left * right,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthosys::SystemKind;

    fn euclid_cloud(pts: &[&[f64]]) -> NormedCloud<f64> {
        NormedCloud::new(pts.iter().map(|p| p.to_vec()).collect(), CloudNorm::Euclidean).unwrap()
    }

    #[test]
    fn greedy_packing_basics() {
        let cloud = euclid_cloud(&[&[0.0], &[3.0]]);
        let r = greedy_packing(&cloud, 1.0).unwrap();
        assert_eq!(r.d_greedy, 2);
        // radius beyond the diameter
        let r = greedy_packing(&cloud, 5.0).unwrap();
        assert_eq!(r.d_greedy, 1);
        assert!(greedy_packing(&cloud, 0.0).is_err());
        let empty = NormedCloud::new(Vec::new(), CloudNorm::<f64>::Euclidean).unwrap();
        assert!(greedy_packing(&empty, 1.0).is_err());
    }

    #[test]
    fn greedy_vs_exhaustive_on_random_planar_points() {
        let seed = rng::derive_seed(7, rng::Stream::Cloud, 0);
        let pts: Vec<Vec<f64>> =
            (0..12).map(|i| vec![rng::uniform(seed, 2 * i), rng::uniform(seed, 2 * i + 1)]).collect();
        let cloud = NormedCloud::new(pts, CloudNorm::Euclidean).unwrap();
        for t in [0.1, 0.25, 0.5] {
            let g = greedy_packing(&cloud, t).unwrap();
            let exact = exact_packing_count(&cloud, t);
            assert!(g.d_greedy <= exact, "greedy exceeds the exact packing number");
            // maximality: greedy centers t-cover the cloud
            for i in 0..cloud.len() {
                assert!(g.centers.iter().any(|&c| cloud.distance(i, c) <= t));
            }
        }
    }

    #[test]
    fn exact_entropy_collinear_hand_case() {
        let cloud = euclid_cloud(&[&[0.0], &[1.0], &[2.0]]);
        let r = exact_entropy(&cloud, 1.1).unwrap();
        assert_eq!(r.etilde_exact, Some(1), "center 1 covers everything");
        assert_eq!(r.d_exact, Some(2), "0 and 2 are 2.0 > 1.1 apart");
        assert_eq!(r.d_exact_2t, Some(1));
        assert!(r.chain_holds());
    }

    #[test]
    fn exact_entropy_single_point_and_size_limit() {
        let cloud = euclid_cloud(&[&[0.5, 0.5]]);
        for t in [0.1, 1.0, 10.0] {
            let r = exact_entropy(&cloud, t).unwrap();
            assert_eq!((r.d_exact, r.e_exact, r.etilde_exact), (Some(1), Some(1), Some(1)));
        }
        let big: Vec<Vec<f64>> = (0..16).map(|i| vec![i as f64]).collect();
        let cloud = NormedCloud::new(big, CloudNorm::Euclidean).unwrap();
        assert!(matches!(exact_entropy(&cloud, 1.0), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn entropy_chain_on_random_clouds() {
        for trial in 0..20u64 {
            let seed = rng::derive_seed(321, rng::Stream::Cloud, trial);
            let n = 4 + (rng::bits(seed, 1000) % 7) as usize; // 4..=10
            let dim = 1 + (rng::bits(seed, 1001) % 3) as usize;
            let pts: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..dim).map(|d| rng::uniform(seed, (i * dim + d) as u64)).collect())
                .collect();
            let cloud = NormedCloud::new(pts, CloudNorm::Euclidean).unwrap();
            for tt in 1..=20 {
                let t = tt as f64 * 0.05;
                let r = exact_entropy(&cloud, t).unwrap();
                assert!(r.chain_holds(), "chain broken at trial {trial}, t = {t}: {r:?}");
            }
        }
    }

    #[test]
    fn volume_bound_euclidean() {
        let chk = volume_bound_check(&CloudNorm::Euclidean, 2, 0.5, 20_000, 3).unwrap();
        assert!(chk.pass);
        assert!((chk.bound - 64.0).abs() < 1e-12);
        // 1-D: ball [-1,1], bound (4/0.5) = 8, actual about 4
        let chk = volume_bound_check(&CloudNorm::Euclidean, 1, 0.5, 20_000, 5).unwrap();
        assert!(chk.pass);
        assert!(chk.greedy_count >= 3 && chk.greedy_count <= 8, "count {}", chk.greedy_count);
        // t near 1: at least one point survives
        let chk = volume_bound_check(&CloudNorm::Euclidean, 3, 0.99, 5_000, 7).unwrap();
        assert!(chk.greedy_count >= 1 && chk.pass);
        assert!(volume_bound_check(&CloudNorm::Euclidean, 2, 1.0, 100, 1).is_err());
    }

    #[test]
    fn alpha_n_is_in_range() {
        for n in 1..=512usize {
            let a = alpha_n(n);
            let scaled = a * (n as f64).sqrt();
            assert!(a > 0.0 && a <= 2.0 / (n as f64).sqrt());
            assert!((0.7..=1.3).contains(&scaled), "alpha_{n} sqrt(n) = {scaled}");
        }
        // closed forms: alpha_1 = sqrt(pi/2), alpha_2 = sqrt(2/pi)
        let pi = std::f64::consts::PI;
        assert!((alpha_n(1) - (pi / 2.0).sqrt()).abs() < 1e-12);
        assert!((alpha_n(2) - (2.0 / pi).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn levy_mean_euclidean_is_one() {
        for n in [1usize, 2, 8, 32] {
            let est = levy_mean(&LevySpace::Euclidean { n }, 4_000, 17).unwrap();
            assert!(
                (est.m_x - 1.0).abs() <= 3.0 * est.stderr,
                "n = {n}: M_X = {} +- {}",
                est.m_x,
                est.stderr
            );
        }
    }

    #[test]
    fn levy_mean_trig_grows_at_most_sqrt_q() {
        let system = Arc::new(OrthogonalSystem::<f64>::build(SystemKind::Trig, 32, 16).unwrap());
        let mut cs = Vec::new();
        for q in [2.0, 4.0, 8.0] {
            let est = levy_mean(&LevySpace::Lq { system: Arc::clone(&system), q }, 2_000, 23).unwrap();
            cs.push(est.m_x / q.sqrt());
        }
        // a single constant works across q: the fitted C varies mildly
        let cmax = cs.iter().cloned().fold(0.0f64, f64::max);
        let cmin = cs.iter().cloned().fold(f64::MAX, f64::min);
        assert!(cmax <= 2.0 * cmin, "fitted constants spread too far: {cs:?}");
        assert!(cmax <= 2.0, "M_X / sqrt(q) unexpectedly large: {cs:?}");
    }

    #[test]
    fn entropy_integral_step_functions() {
        let b = 1.7f64;
        assert_eq!(entropy_integral(&[b], &[1.0], b).unwrap(), 0.0);
        let one = entropy_integral(&[b], &[std::f64::consts::E], b).unwrap();
        assert!((one - b).abs() < 1e-12);
        let two = entropy_integral(
            &[b, b / 2.0],
            &[1.0, std::f64::consts::E.powi(4)],
            b,
        )
        .unwrap();
        assert!((two - b).abs() < 1e-12, "two-step integral {two}");
        assert!(entropy_integral(&[b], &[1.0], 0.0).is_err());
        assert!(entropy_integral(&[b, b], &[1.0, 1.0], b).is_err());
        assert!(entropy_integral(&[b, b / 2.0], &[4.0, 2.0], b).is_err());
    }

    #[test]
    fn support_reduce_identities_and_membership() {
        let sys = OrthogonalSystem::<f64>::build(SystemKind::Walsh, 32, 0).unwrap();
        let m = 32usize;
        let f = CoeffVector::from_dense(&vec![1.0 / (m as f64).sqrt(); m]);
        let r = support_reduce(&sys, &f, 4.0, 4.0, 50, 99).unwrap();
        assert_eq!(r.k, 4);
        // membership: i in A_eps iff all its signs are -1 (exact)
        for (j, &i) in f.support().iter().enumerate() {
            let all_minus = r.signs[j].iter().all(|&s| s == -1);
            assert_eq!(all_minus, r.residual_support.contains(&i));
        }
        // residual coefficients are exactly 2^k a_i
        for &i in &r.residual_support {
            assert_eq!(r.residual.get(i), f.get(i) * 16.0);
        }
        // reconstruction: Phi + E = f at every node (Phi is f - E pointwise)
        let f_s = sys.synthesize(f.entries()).unwrap();
        let e_s = sys.synthesize(r.residual.entries()).unwrap();
        let phi = FunctionDiff::diff(&f_s, &e_s);
        for k in 0..sys.grid_len() {
            let err = (phi.values[k] + e_s.values[k] - f_s.values[k]).abs();
            assert!(err <= 1e-12, "node {k}: reconstruction error {err}");
        }
        // approximation identity
        let phi_norm = sys.lp_norm(&phi, 4.0).unwrap();
        assert_eq!(phi_norm, r.phi_norm);
        assert!(support_reduce(&sys, &f, 2.0, 4.0, 5, 1).is_err());
    }

    #[test]
    fn support_reduce_expected_cardinality() {
        let sys = OrthogonalSystem::<f64>::build(SystemKind::Walsh, 32, 0).unwrap();
        let m = 32usize;
        let f = CoeffVector::from_dense(&vec![1.0 / (m as f64).sqrt(); m]);
        let draws = 10_000usize;
        let mut total = 0usize;
        for d in 0..draws {
            let r = support_reduce(&sys, &f, 4.0, 4.0, 1, 10_000 + d as u64).unwrap();
            total += r.residual_support.len();
        }
        let mean = total as f64 / draws as f64;
        let expect = m as f64 / 16.0; // 2^{-k} m with k = 4
        let sigma = (m as f64 * (1.0 / 16.0) * (15.0 / 16.0) / draws as f64).sqrt();
        assert!((mean - expect).abs() <= 3.0 * sigma, "mean {mean} vs {expect} (sigma {sigma})");
    }

    #[test]
    fn support_reduce_singleton_distribution() {
        let sys = OrthogonalSystem::<f64>::build(SystemKind::Walsh, 8, 0).unwrap();
        let f = CoeffVector::from_sparse(8, &[(5, 1.0)]).unwrap();
        let draws = 20_000usize;
        let mut hits = 0usize;
        for d in 0..draws {
            let r = support_reduce(&sys, &f, 3.0, 2.0, 1, d as u64).unwrap();
            assert_eq!(r.k, 3);
            match r.residual_support.as_slice() {
                [] => {}
                [5] => hits += 1,
                other => panic!("impossible residual support {other:?}"),
            }
        }
        let freq = hits as f64 / draws as f64;
        let p = 0.125f64; // 2^{-k}
        let sigma = (p * (1.0 - p) / draws as f64).sqrt();
        assert!((freq - p).abs() <= 3.0 * sigma, "freq {freq}");
    }

    #[test]
    fn support_reduce_acceptance_frequency() {
        let sys = OrthogonalSystem::<f64>::build(SystemKind::Walsh, 64, 0).unwrap();
        let m = 64usize;
        let f = CoeffVector::from_dense(&vec![1.0 / (m as f64).sqrt(); m]);
        let runs = 1_000usize;
        let mut accepted = 0usize;
        for run in 0..runs {
            let r = support_reduce(&sys, &f, 4.0, 4.0, 1, 31_000 + run as u64).unwrap();
            if r.accepted {
                accepted += 1;
            }
        }
        let freq = accepted as f64 / runs as f64;
        assert!(
            freq >= crate::tol::REDUCTION_ACCEPT_FREQ,
            "acceptance frequency {freq} below the pigeonhole floor"
        );
    }

    #[test]
    fn chaining_single_point_and_axis_vectors() {
        // single point: entropy term degenerates, ratio finite
        let x = vec![vec![0.5, 0.25, 0.1, 0.7]];
        let chk = chaining_bound_check(&x, 4, 0.3, 2.0, 2_000, 3).unwrap();
        assert!(chk.ratio.is_finite());
        assert!(chk.pass);
        assert!(chk.rhs >= (0.3f64 * 4.0).sqrt() * chk.b - 1e-12);

        // axis unit vectors with m = 1: the sup never exceeds 1
        let n = 6usize;
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let chk = chaining_bound_check(&pts, 1, 0.25, 3.0, 2_000, 5).unwrap();
        assert!(chk.lhs <= 1.0 + 1e-12);
        assert!(chk.pass);
        assert!(chaining_bound_check(&pts, 1, 0.75, 3.0, 2_000, 5).is_err());
    }

    #[test]
    fn chaining_random_cloud_ratio_below_ceiling() {
        let seed = rng::derive_seed(88, rng::Stream::Cloud, 4);
        let pts: Vec<Vec<f64>> = (0..20)
            .map(|i| (0..4).map(|d| rng::uniform(seed, (i * 4 + d) as u64)).collect())
            .collect();
        let chk = chaining_bound_check(&pts, 2, 0.1, 3.0, 4_000, 11).unwrap();
        assert!(chk.pass, "ratio {}", chk.ratio);
    }

    #[test]
    fn scan_counts_collapse_beyond_the_diameter() {
        let system = Arc::new(OrthogonalSystem::<f64>::build(SystemKind::Walsh, 8, 0).unwrap());
        let rows = entropy_scaling_scan(&system, &[2], &[0.5, 1.0, 2.0 * 2.0f64.sqrt()], 4.0, 5).unwrap();
        // at t >= 2 sqrt(m) the ball has diameter <= 2 sqrt(m) <= 2t: one center
        let last = rows.last().unwrap();
        assert_eq!(last.count, 1, "{last:?}");
        // counts shrink as the radius grows
        assert!(rows[0].count >= rows[1].count);
    }

    #[test]
    fn scan_growth_in_n_is_logarithmic() {
        let q = 4.0;
        let t = 0.35;
        let count_at = |n: usize| {
            let system = Arc::new(OrthogonalSystem::<f64>::build(SystemKind::Walsh, n, 0).unwrap());
            entropy_scaling_scan(&system, &[2], &[t], q, 9).unwrap()[0].count
        };
        let (c6, c12) = (count_at(6), count_at(12));
        assert!(c6 >= 2, "scan should resolve structure at t = {t}");
        let lhs = (c12 as f64).ln();
        let rhs = 2.0 * (1.0 + 12.0f64 / 2.0).ln() / (1.0 + 6.0f64 / 2.0).ln() * (c6 as f64).ln();
        assert!(lhs <= rhs, "count grew faster than the log factor: {c6} -> {c12}");
    }

    #[test]
    fn scan_full_ball_reference() {
        // m = n: the reference value degenerates to n t^{-2} ln 2 and the
        // lower bounds stay consistent with it (ratio reported, bounded)
        let system = Arc::new(OrthogonalSystem::<f64>::build(SystemKind::Walsh, 3, 0).unwrap());
        let rows = entropy_scaling_scan(&system, &[3], &[0.3, 0.5], 4.0, 3).unwrap();
        for r in &rows {
            let want = 3.0 * r.t.powi(-2) * 2.0f64.ln();
            assert!((r.bound - want).abs() < 1e-12);
            assert!(r.ratio.is_finite() && r.ratio >= 0.0);
            assert!(r.ratio <= 1.0, "lower bound must stay below the reference scale, got {}", r.ratio);
        }
    }

    #[test]
    fn scan_size_limits() {
        let sys13 = Arc::new(OrthogonalSystem::<f64>::build(SystemKind::Walsh, 13, 0).unwrap());
        assert!(matches!(
            entropy_scaling_scan(&sys13, &[1], &[1.0], 4.0, 1),
            Err(Error::SizeLimit { .. })
        ));
        let sys8 = Arc::new(OrthogonalSystem::<f64>::build(SystemKind::Walsh, 8, 0).unwrap());
        assert!(matches!(
            entropy_scaling_scan(&sys8, &[4], &[1.0], 4.0, 1),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn product_entropy_on_random_instances() {
        for trial in 0..10u64 {
            let seed = rng::derive_seed(555, rng::Stream::Cloud, trial);
            let dim = 2usize;
            let nx = 3usize;
            let ny = 5usize;
            let mk = |count: usize, off: u64| -> Vec<Vec<f64>> {
                (0..count)
                    .map(|i| (0..dim).map(|d| rng::uniform(seed, off + (i * dim + d) as u64)).collect())
                    .collect()
            };
            let x = mk(nx, 0);
            let y = mk(ny, 1_000);
            let t = 0.2 + 0.6 * rng::uniform(seed, 9_999);
            let chk = product_entropy_check(&x, &y, t).unwrap();
            assert!(chk.pass, "trial {trial}: {chk:?}");
        }
    }

    #[test]
    fn triangle_spot_check_zero_violations() {
        let seed = rng::derive_seed(3, rng::Stream::Cloud, 9);
        let pts: Vec<Vec<f64>> =
            (0..10).map(|i| (0..3).map(|d| rng::uniform(seed, (i * 3 + d) as u64)).collect()).collect();
        let cloud = NormedCloud::new(pts.clone(), CloudNorm::Euclidean).unwrap();
        assert_eq!(cloud.triangle_violations(100, 5, 1e-10), 0);
        let system = Arc::new(OrthogonalSystem::<f64>::build(SystemKind::Walsh, 3, 0).unwrap());
        let cloud = NormedCloud::new(pts, CloudNorm::Lq { system, q: 3.0 }).unwrap();
        assert_eq!(cloud.triangle_violations(100, 5, 1e-10), 0);
    }
}
