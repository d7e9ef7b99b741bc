//! 1-bounded orthogonal systems with quadrature-based L^p norms.
//!
//! Two concrete systems are provided. The Walsh system is the workhorse: its
//! functions are ±1-valued and constant on dyadic cells, so quadrature sums
//! are exact and the Gram matrix is exactly the identity. The trigonometric
//! system (`sin(2 pi j u)`, sup-norm 1, L^2 norm 1/sqrt(2)) is kept as the
//! motivating example; its norms are uniform-grid quadrature approximations.

use crate::error::{Error, Result};
use crate::scalar::{r, ru, Real};

/// Which concrete family backs the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Walsh,
    Trig,
}

impl SystemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SystemKind::Walsh => "walsh",
            SystemKind::Trig => "trig",
        }
    }
}

impl std::str::FromStr for SystemKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "walsh" => Ok(SystemKind::Walsh),
            "trig" => Ok(SystemKind::Trig),
            other => Err(Error::invalid("system", format!("unknown system kind `{other}`"))),
        }
    }
}

/// A finite 1-bounded mutually orthogonal family with a quadrature rule.
///
/// Immutable after construction; all operations are pure.
#[derive(Debug, Clone)]
pub struct OrthogonalSystem<R> {
    kind: SystemKind,
    n: usize,
    grid: Vec<R>,
    weights: Vec<R>,
    /// Row i holds the samples of the i-th function (0-based throughout the API).
    values: Vec<Vec<R>>,
    /// Per-function L^2 norms; exactly 1 for Walsh, 1/sqrt(2) for sines.
    l2_norms: Vec<R>,
}

/// Samples of a synthesized function on a system's quadrature grid.
#[derive(Debug, Clone)]
pub struct FunctionSamples<R> {
    pub values: Vec<R>,
    kind: SystemKind,
    n: usize,
}

fn walsh_sign(index: usize, cell: usize, k_bits: u32) -> bool {
    // Paley pairing: bit b of the index against dyadic digit b of u (MSB first).
    let mut parity = 0usize;
    for b in 0..k_bits {
        let jb = (index >> b) & 1;
        let ub = (cell >> (k_bits - 1 - b)) & 1;
        parity ^= jb & ub;
    }
    parity == 1
}

impl<R: Real> OrthogonalSystem<R> {
    /// Build a system of `n` functions.
    ///
    /// For Walsh the grid is the 2^K dyadic cells with K = ceil(log2 n) + 1
    /// (`oversample` is ignored); for trig the grid has `oversample * n`
    /// uniform left endpoints and `oversample >= 16` keeps the Gram residual
    /// below 1e-10.
    pub fn build(kind: SystemKind, n: usize, oversample: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "system must contain at least one function"));
        }
        match kind {
            SystemKind::Walsh => {
                let k_bits = usize::BITS - (n - 1).leading_zeros() + 1; // ceil(log2 n) + 1, n >= 1
                let cells = 1usize << k_bits;
                let w = r::<R>(1.0 / cells as f64);
                let grid: Vec<R> = (0..cells).map(|c| ru::<R>(c) / ru::<R>(cells)).collect();
                let values = (1..=n)
                    .map(|i| {
                        (0..cells)
                            .map(|c| if walsh_sign(i, c, k_bits) { -R::one() } else { R::one() })
                            .collect()
                    })
                    .collect();
                Ok(Self {
                    kind,
                    n,
                    grid,
                    weights: vec![w; cells],
                    values,
                    l2_norms: vec![R::one(); n],
                })
            }
            SystemKind::Trig => {
                if oversample < 2 {
                    return Err(Error::invalid("oversample", "must be at least 2"));
                }
                let m = oversample * n;
                let w = R::one() / ru::<R>(m);
                let grid: Vec<R> = (0..m).map(|k| ru::<R>(k) / ru::<R>(m)).collect();
                let two_pi = R::PI() + R::PI();
                let values: Vec<Vec<R>> = (1..=n)
                    .map(|j| grid.iter().map(|&u| (two_pi * ru::<R>(j) * u).sin()).collect())
                    .collect();
                let l2 = r::<R>(std::f64::consts::FRAC_1_SQRT_2);
                Ok(Self { kind, n, grid, weights: vec![w; m], values, l2_norms: vec![l2; n] })
            }
        }
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn grid_len(&self) -> usize {
        self.grid.len()
    }

    pub fn grid(&self) -> &[R] {
        &self.grid
    }

    pub fn weights(&self) -> &[R] {
        &self.weights
    }

    /// Samples of the i-th function, i in 0..n.
    pub fn function(&self, i: usize) -> &[R] {
        assert!(i < self.n, "function index {i} out of 0..{}", self.n);
        &self.values[i]
    }

    /// Per-function L^2 norms (the system is 1-bounded but not necessarily
    /// normalized; sines have norm 1/sqrt(2)).
    pub fn l2_norms(&self) -> &[R] {
        &self.l2_norms
    }

    fn compatible(&self, f: &FunctionSamples<R>) -> Result<()> {
        if f.kind != self.kind || f.n != self.n || f.values.len() != self.grid.len() {
            return Err(Error::invalid("samples", "samples belong to a different system"));
        }
        Ok(())
    }

    /// Synthesize `sum_i d_i phi_i` on the grid.
    // TODO: a fast Walsh-Hadamard transform would cut this from O(n * grid)
    // to O(grid log grid) if the laboratory ever moves past n ~ 10^3
    pub fn synthesize(&self, coeffs: &[R]) -> Result<FunctionSamples<R>> {
        if coeffs.len() != self.n {
            return Err(Error::invalid(
                "coeffs",
                format!("expected {} coefficients, got {}", self.n, coeffs.len()),
            ));
        }
        let mut out = vec![R::zero(); self.grid.len()];
        for (row, &d) in self.values.iter().zip(coeffs) {
            if d != R::zero() {
                for (o, &v) in out.iter_mut().zip(row) {
                    *o += d * v;
                }
            }
        }
        Ok(FunctionSamples { values: out, kind: self.kind, n: self.n })
    }

    /// Synthesize from sparse (index, coefficient) pairs.
    pub fn synthesize_sparse(&self, terms: &[(usize, R)]) -> Result<FunctionSamples<R>> {
        let mut out = vec![R::zero(); self.grid.len()];
        for &(i, d) in terms {
            if i >= self.n {
                return Err(Error::invalid("terms", format!("index {i} out of 0..{}", self.n)));
            }
            let row = &self.values[i];
            for (o, &v) in out.iter_mut().zip(row) {
                *o += d * v;
            }
        }
        Ok(FunctionSamples { values: out, kind: self.kind, n: self.n })
    }

    /// Quadrature L^p norm; `p = infinity` is the max over nodes.
    pub fn lp_norm(&self, f: &FunctionSamples<R>, p: R) -> Result<R> {
        self.compatible(f)?;
        if p.is_infinite() && p > R::zero() {
            return Ok(f.values.iter().fold(R::zero(), |m, &v| m.max(v.abs())));
        }
        if p < R::one() {
            return Err(Error::invalid("p", "L^p norms need p >= 1"));
        }
        let two = r::<R>(2.0);
        let sum = if p == two {
            f.values.iter().zip(&self.weights).map(|(&v, &w)| w * v * v).sum::<R>()
        } else {
            f.values.iter().zip(&self.weights).map(|(&v, &w)| w * v.abs().powf(p)).sum::<R>()
        };
        Ok(sum.powf(R::one() / p))
    }

    /// Quadrature inner product `sum_k w_k f(u_k) g(u_k)`.
    pub fn inner_product(&self, f: &FunctionSamples<R>, g: &FunctionSamples<R>) -> Result<R> {
        self.compatible(f)?;
        self.compatible(g)?;
        Ok(f.values
            .iter()
            .zip(&g.values)
            .zip(&self.weights)
            .map(|((&a, &b), &w)| w * a * b)
            .sum())
    }

    /// Inner products `<phi_i, g>` for all i, in one pass.
    pub fn analyze(&self, g: &FunctionSamples<R>) -> Result<Vec<R>> {
        self.compatible(g)?;
        Ok(self
            .values
            .iter()
            .map(|row| {
                row.iter().zip(&g.values).zip(&self.weights).map(|((&a, &b), &w)| w * a * b).sum()
            })
            .collect())
    }

    /// Gram matrix by quadrature.
    pub fn gram(&self) -> Vec<Vec<R>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        self.values[i]
                            .iter()
                            .zip(&self.values[j])
                            .zip(&self.weights)
                            .map(|((&a, &b), &w)| w * a * b)
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }

    /// Largest off-diagonal |Gram| entry.
    pub fn gram_offdiag_residual(&self) -> R {
        let g = self.gram();
        let mut worst = R::zero();
        for (i, row) in g.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if i != j {
                    worst = worst.max(v.abs());
                }
            }
        }
        worst
    }
}

impl<R: Real> FunctionSamples<R> {
    /// Pointwise map, staying on the same grid.
    pub fn map(&self, f: impl Fn(R) -> R) -> FunctionSamples<R> {
        FunctionSamples { values: self.values.iter().map(|&v| f(v)).collect(), kind: self.kind, n: self.n }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &FunctionSamples<R>) -> FunctionSamples<R> {
        assert_eq!(self.values.len(), other.values.len());
        FunctionSamples {
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| a * b).collect(),
            kind: self.kind,
            n: self.n,
        }
    }
}

/// Dirichlet kernel value `D_n(theta) = sum_{|k| <= n} e^{2 pi i k theta}`,
/// evaluated through the sine quotient with the removable singularity handled.
pub fn dirichlet_kernel<R: Real>(n: usize, theta: R) -> R {
    let pi = R::PI();
    let s = (pi * theta).sin();
    // near an integer theta the quotient degenerates; the limit is 2n+1
    if s.abs() < r::<R>(1e-12) {
        return ru::<R>(2 * n + 1);
    }
    ((ru::<R>(2 * n + 1)) * pi * theta).sin() / s
}

/// `||D_n||_r` on the circle by uniform quadrature.
///
/// The grid is `max(64 n, 65536)` left endpoints: the minimum guarantees the
/// top frequency is resolved, the floor keeps the kink error of |.|^r below
/// 1e-8 even for n = 1.
pub fn dirichlet_norm<R: Real>(n: usize, rr: R) -> Result<R> {
    if n == 0 {
        return Err(Error::invalid("n", "kernel degree must be positive"));
    }
    if rr < R::one() {
        return Err(Error::invalid("r", "L^r norms need r >= 1"));
    }
    let m = (64 * n).max(65_536);
    let w = R::one() / ru::<R>(m);
    let mut acc = R::zero();
    for k in 0..m {
        let theta = ru::<R>(k) / ru::<R>(m);
        let v = dirichlet_kernel(n, theta).abs();
        acc += w * v.powf(rr);
    }
    Ok(acc.powf(R::one() / rr))
}
