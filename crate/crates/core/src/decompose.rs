//! Dyadic level-set decompositions of coefficient sequences and the
//! head/tail bootstrap split.
//!
//! The nonnegative decomposition follows the Cauchy condensation pattern:
//! level l carries weight `gamma_l = 2^l c_{2^l}` on the block of (1-based)
//! positions [2^l, 2^{l+1}); the unit-vector variant applies it to |a_i|^2
//! after magnitude sorting and takes `lambda_l = gamma_l^{1/2}`.

use crate::error::{Error, Result};
use crate::lambda::CoeffVector;
use crate::scalar::{r, ru, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecompositionKind {
    /// Nonnegative, nonincreasing input with mass at most 1.
    Nonneg,
    /// Arbitrary input with Euclidean norm at most 1.
    Unit,
}

/// One dyadic level: weight and block (disjoint supports across levels).
#[derive(Debug, Clone)]
pub struct Level<R> {
    pub level: u32,
    pub weight: R,
    pub block: CoeffVector<R>,
}

#[derive(Debug, Clone)]
pub struct Decomposition<R> {
    pub kind: DecompositionKind,
    pub levels: Vec<Level<R>>,
    n: usize,
}

impl<R: Real> Decomposition<R> {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// `sum_l weight_l * block_l`, the reconstructed sequence.
    pub fn reconstruct(&self) -> Vec<R> {
        let mut out = vec![R::zero(); self.n];
        for lvl in &self.levels {
            for &i in lvl.block.support() {
                out[i] += lvl.weight * lvl.block.get(i);
            }
        }
        out
    }

    /// Sum of the weights (`gamma` sum for nonneg, `lambda^2` sum for unit).
    ///
    /// With the stated weights `2^l c_{2^l}` this can exceed the input mass:
    /// the sharp condensation bound is `sum gamma_l <= c_1 + 2 sum c_i <= 3`
    /// (a flat sequence reaches 2 - 1/n).
    pub fn condensation_mass(&self) -> R {
        match self.kind {
            DecompositionKind::Nonneg => self.levels.iter().map(|l| l.weight).sum(),
            DecompositionKind::Unit => self.levels.iter().map(|l| l.weight * l.weight).sum(),
        }
    }
}

/// Decompose a nonincreasing nonnegative sequence with `sum c <= 1` into
/// dyadic blocks: weight `2^l c_{2^l}`, entries at most `2^-l`, block support
/// of size at most `2^l`. Zero-weight levels are omitted.
pub fn dyadic_decompose_nonneg<R: Real>(c: &[R]) -> Result<Decomposition<R>> {
    let tol = r::<R>(1e-12);
    let mut total = R::zero();
    for (i, &v) in c.iter().enumerate() {
        if v < R::zero() {
            return Err(Error::invalid("c", format!("entry {i} is negative")));
        }
        if i > 0 && v > c[i - 1] {
            return Err(Error::invalid("c", format!("sequence increases at position {i}")));
        }
        total += v;
    }
    if total > R::one() + tol {
        return Err(Error::invalid("c", format!("total mass {total} exceeds 1")));
    }

    let n = c.len();
    let mut levels = Vec::new();
    let mut l = 0u32;
    while (1usize << l) <= n {
        let head = (1usize << l) - 1; // 0-based position of the 1-based index 2^l
        let gamma = ru::<R>(1 << l) * c[head];
        if gamma > R::zero() {
            let end = ((1usize << (l + 1)) - 1).min(n);
            let terms: Vec<(usize, R)> =
                (head..end).filter(|&i| c[i] > R::zero()).map(|i| (i, c[i] / gamma)).collect();
            levels.push(Level { level: l, weight: gamma, block: CoeffVector::from_sparse(n, &terms)? });
        }
        l += 1;
    }
    Ok(Decomposition { kind: DecompositionKind::Nonneg, levels, n })
}

/// Decompose `|a| <= 1` into dyadic levels of the magnitude-sorted squares:
/// `lambda_l = gamma_l^{1/2}`, block entries `a_i / (2^{l/2} |a_{(2^l)}|)`
/// bounded by `2^{-l/2}`, supports disjoint (see [`Decomposition::condensation_mass`]
/// for the weight-mass bound).
///
/// Ties in the magnitude sort are broken by original index (stable), so the
/// decomposition is deterministic.
pub fn dyadic_decompose_unit<R: Real>(a: &[R]) -> Result<Decomposition<R>> {
    let tol = r::<R>(1e-12);
    let norm = a.iter().map(|&v| v * v).sum::<R>().sqrt();
    if norm > R::one() + tol {
        return Err(Error::invalid("a", format!("Euclidean norm {norm} exceeds 1")));
    }
    let n = a.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j].abs().partial_cmp(&a[i].abs()).unwrap().then(i.cmp(&j)));

    let mut levels = Vec::new();
    let mut l = 0u32;
    while (1usize << l) <= n {
        let head_pos = (1usize << l) - 1;
        let head_mag = a[order[head_pos]].abs();
        let lambda = ru::<R>(1 << l).sqrt() * head_mag;
        if lambda > R::zero() {
            let end = ((1usize << (l + 1)) - 1).min(n);
            let scale = ru::<R>(1 << l).sqrt() * head_mag;
            let terms: Vec<(usize, R)> = (head_pos..end)
                .map(|pos| order[pos])
                .filter(|&i| a[i] != R::zero())
                .map(|i| (i, a[i] / scale))
                .collect();
            levels.push(Level {
                level: l,
                weight: lambda,
                block: CoeffVector::from_sparse(n, &terms)?,
            });
        }
        l += 1;
    }
    Ok(Decomposition { kind: DecompositionKind::Unit, levels, n })
}

/// The head/tail split of a unit vector sorted by decreasing magnitude.
///
/// `m0` is the largest head length whose energy stays below `gamma^2` (zero
/// when the top entry is already at least `gamma^2`); the head is positions
/// 0..m0, the tail starts at m0+1 and the position m0 in between is dropped
/// (recorded in `dropped`).
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapSplit {
    pub m0: usize,
    /// Head positions I (0-based, into the sorted vector).
    pub head: Vec<usize>,
    /// Tail positions J.
    pub tail: Vec<usize>,
    /// The single position excluded from both sides, when it exists.
    pub dropped: Option<usize>,
    pub gamma: f64,
}

pub fn bootstrap_split(a: &CoeffVector<f64>, gamma: f64) -> Result<BootstrapSplit> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::invalid("gamma", "must lie in (0,1)"));
    }
    let e = a.entries();
    let n = e.len();
    if n == 0 {
        return Err(Error::invalid("a", "empty vector"));
    }
    for i in 1..n {
        if e[i].abs() > e[i - 1].abs() {
            return Err(Error::invalid("a", format!("magnitudes increase at position {i}")));
        }
    }
    let norm = a.norm2();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("a", format!("needs |a| = 1, got {norm}")));
    }

    let m0 = if e[0].abs() >= gamma * gamma {
        0
    } else {
        let mut acc = 0.0;
        let mut m = 0usize;
        for (i, &v) in e.iter().enumerate() {
            acc += v * v;
            if acc < gamma * gamma {
                m = i + 1;
            } else {
                break;
            }
        }
        m
    };
    let head: Vec<usize> = (0..m0).collect();
    let tail: Vec<usize> = (m0 + 1..n).collect();
    let dropped = if m0 < n { Some(m0) } else { None };
    Ok(BootstrapSplit { m0, head, tail, dropped, gamma })
}
