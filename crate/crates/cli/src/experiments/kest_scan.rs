//! Ratio scan of the triple-supremum functional against its target bound
//! over a grid of support sizes and sampled omega pairs.

use lpslab::lambda::{estimate_k_triple, estimate_ks, kest_rhs, KestVariant, KsOptions, TripleOptions};
use lpslab::rng::{self, Stream};
use lpslab::selectors::{sample_selectors, SelectorSample};
use lpslab::{Error, System};

use super::{emit, DynResult};
use crate::config::{ExperimentConfig, RunRecord};
use crate::table::{Cell, Table};

pub fn run(cfg: &ExperimentConfig) -> DynResult<RunRecord> {
    let mut record = RunRecord::new(cfg.clone());
    let kind = cfg.system.parse()?;
    let p = cfg.p;
    let n = cfg.n_list[0];
    if n > 64 {
        return Err(Box::new(Error::SizeLimit { what: "kest scan dimension", limit: 64, got: n }));
    }
    let restricted = cfg.variant == "restricted";
    let n0 = (n as f64).powf(2.0 / p);
    // selector mean: n^{2/p-1} in the standard variant, n^{2/p - 2/p1} when
    // subsampling a fixed Lambda(p1) base set
    let delta = if restricted {
        (n as f64).powf(2.0 / p - 2.0 / cfg.p1)
    } else {
        (n as f64).powf(2.0 / p - 1.0)
    };
    let sigma = cfg.sigma.unwrap_or(if restricted { 1.0 } else { p / 2.0 });
    let q0 = (n as f64).ln();
    let system = System::build(kind, n, cfg.oversample)?;

    // the fixed base set of the restricted variant: a random set of the
    // Lambda(p1) density n^{2/p1 - 1}
    let base_set: Option<Vec<usize>> = if restricted {
        let d1 = (n as f64).powf(2.0 / cfg.p1 - 1.0);
        let s1 = sample_selectors(n, d1, rng::derive_seed(cfg.seed, Stream::Misc, 1))?;
        Some(s1.selected())
    } else {
        None
    };

    let m_cap = (10.0 * n0).floor() as usize;
    let m_grid: Vec<usize> =
        cfg.m_list.iter().copied().filter(|&m| m >= 1 && m <= n.min(m_cap.max(1))).collect();
    if m_grid.is_empty() {
        return Err(Box::new(Error::invalid("m-list", "no grid values inside 1..=min(n, 10 n0)")));
    }

    let mut table = Table::new(vec![
        "pair", "m1", "m2", "m3", "lhs", "rhs", "ratio", "k2", "k3", "inequality",
    ]);
    let mut max_ratio: f64 = 0.0;
    let mut cells = 0usize;

    for pair in 0..cfg.omega_pairs {
        let pair_seed = rng::derive_seed(cfg.seed, Stream::Misc, 100 + pair as u64);
        let omega2 = sample_selectors(n, delta, rng::derive_seed(pair_seed, Stream::Omega2, 0))?;
        let omega3 = sample_selectors(n, delta, rng::derive_seed(pair_seed, Stream::Omega3, 0))?;
        let restrict = |s: &SelectorSample| -> Vec<usize> {
            s.selected()
                .into_iter()
                .filter(|i| base_set.as_ref().is_none_or(|b| b.contains(i)))
                .collect()
        };
        let (sel2, sel3) = (restrict(&omega2), restrict(&omega3));
        if sel2.is_empty() || sel3.is_empty() {
            record.check(
                &format!("kest_pair{pair}_nonempty"),
                false,
                "an omega draw selected no indices; rerun with another seed",
            );
            continue;
        }
        let ks_opts = |t: u64| KsOptions {
            seed: rng::derive_seed(pair_seed, Stream::Restart, t),
            ..KsOptions::default()
        };
        // the constants are at least 1 on the restricted event; the estimates
        // are lower bounds, so clamp up before forming the target bound
        let k2 = estimate_ks(&system, &sel2, p, &ks_opts(2))?.value.max(1.0);
        let k3 = estimate_ks(&system, &sel3, p, &ks_opts(3))?.value.max(1.0);

        let draws: Vec<SelectorSample> = (0..cfg.draws)
            .map(|d| {
                sample_selectors(n, delta, rng::derive_seed(pair_seed, Stream::Omega1, d as u64))
            })
            .collect::<Result<_, _>>()?;

        for &m1 in &m_grid {
            for &m2 in &m_grid {
                for &m3 in &m_grid {
                    let opts = TripleOptions {
                        restarts: 6,
                        iters: 30,
                        seed: rng::derive_seed(pair_seed, Stream::Restart, (m1 * 4096 + m2 * 64 + m3) as u64),
                    };
                    let est = estimate_k_triple(
                        &system,
                        &draws,
                        &omega2,
                        &omega3,
                        p,
                        (m1, m2, m3),
                        q0,
                        base_set.as_deref(),
                        &opts,
                    )?;
                    let variant = if restricted {
                        KestVariant::Restricted { p1: cfg.p1, delta_prime: delta }
                    } else {
                        KestVariant::Standard
                    };
                    let rhs = kest_rhs(m1, m2, m3, delta, p, k2, k3, sigma, variant)?;
                    let ratio = est.value / rhs;
                    max_ratio = max_ratio.max(ratio);
                    cells += 1;
                    table.push(vec![
                        Cell::Uint(pair as u64),
                        Cell::Uint(m1 as u64),
                        Cell::Uint(m2 as u64),
                        Cell::Uint(m3 as u64),
                        Cell::Float(est.value),
                        Cell::Float(rhs),
                        Cell::Float(ratio),
                        Cell::Float(k2),
                        Cell::Float(k3),
                        Cell::Str("kest_ratio".into()),
                    ]);
                }
            }
        }
    }

    emit(&mut record, &cfg.out_dir, "kest_scan.csv", &table)?;
    record.put("max_ratio", max_ratio);
    record.put("cells", cells);
    record.put("sigma", sigma);
    record.put("delta", delta);
    record.put("q0", q0);
    record.put("log_inv_delta", (1.0 / delta).ln());
    record.check(
        "kest_ratio_finite",
        max_ratio.is_finite() && cells > 0,
        format!("max ratio {max_ratio:.6} over {cells} cells"),
    );
    record.check(
        "kest_ratio_ceiling",
        max_ratio <= lpslab::tol::KEST_RATIO_CEILING,
        format!("max ratio {max_ratio:.6} vs ceiling {}", lpslab::tol::KEST_RATIO_CEILING),
    );
    Ok(record)
}
