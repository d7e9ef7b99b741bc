//! Counter-based random number generation.
//!
//! Every draw is a pure function of `(seed, counter)`, where the seed itself is
//! derived from `(master seed, logical stream, trial index)`. There is no
//! mutable generator state, so draws are order-independent, trivially
//! parallel, and bit-reproducible regardless of thread count. Distinct logical
//! streams never share state, which is exactly the independence contract the
//! omega-decoupling identities require.

/// Weyl increment of SplitMix64.
const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Logical randomness streams of the laboratory.
///
/// The selector streams `Omega*` mirror the independent probability spaces of
/// the randomized construction; `Tripartite` drives the disjoint random sets
/// R1/R2/R3; `Signs` drives support-reduction sign arrays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Omega,
    Omega1,
    Omega2,
    Omega3,
    Tripartite,
    Signs,
    Gauss,
    Restart,
    Cloud,
    Misc,
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::Omega => 1,
            Stream::Omega1 => 2,
            Stream::Omega2 => 3,
            Stream::Omega3 => 4,
            Stream::Tripartite => 5,
            Stream::Signs => 6,
            Stream::Gauss => 7,
            Stream::Restart => 8,
            Stream::Cloud => 9,
            Stream::Misc => 10,
        }
    }
}

/// Derive the per-sample seed for `(master, stream, trial)`.
pub fn derive_seed(master: u64, stream: Stream, trial: u64) -> u64 {
    let h = mix64(master ^ GAMMA.wrapping_mul(stream.id()));
    mix64(h ^ trial.wrapping_mul(GAMMA))
}

/// Raw 64-bit draw at `counter`.
#[inline]
pub fn bits(seed: u64, counter: u64) -> u64 {
    mix64(seed.wrapping_add(counter.wrapping_add(1).wrapping_mul(GAMMA)))
}

/// Uniform draw in the open interval (0, 1).
#[inline]
pub fn uniform(seed: u64, counter: u64) -> f64 {
    ((bits(seed, counter) >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
}

/// Bernoulli(p) draw.
#[inline]
pub fn bernoulli(seed: u64, counter: u64, p: f64) -> bool {
    uniform(seed, counter) < p
}

/// Rademacher draw in {-1, +1}.
#[inline]
pub fn rademacher(seed: u64, counter: u64) -> i8 {
    if bits(seed, counter) >> 63 == 0 {
        1
    } else {
        -1
    }
}

/// Standard normal draw (Box-Muller; consumes counters 2c and 2c+1).
#[inline]
pub fn gaussian(seed: u64, counter: u64) -> f64 {
    let u1 = uniform(seed, 2 * counter);
    let u2 = uniform(seed, 2 * counter + 1);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Uniform point on the unit sphere of dimension `dim`, written into `out`.
pub fn unit_sphere(seed: u64, dim: usize, out: &mut [f64]) {
    assert_eq!(out.len(), dim);
    let mut norm2 = 0.0;
    for (i, o) in out.iter_mut().enumerate() {
        *o = gaussian(seed, i as u64);
        norm2 += *o * *o;
    }
    if norm2 <= 1e-300 {
        // astronomically unlikely; reseed deterministically
        return unit_sphere(mix64(seed ^ GAMMA), dim, out);
    }
    let inv = norm2.sqrt().recip();
    for o in out.iter_mut() {
        *o *= inv;
    }
}
