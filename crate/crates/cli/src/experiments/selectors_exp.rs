//! Selector diagnostics: moment bounds at the calibration point, the
//! large-deviation tails, the tripartite partition balance and the
//! supremum/norm exchange.

use lpslab::rng::{self, Stream};
use lpslab::selectors::{
    large_deviation_check, sample_selectors, sample_tripartite, selector_moment_check,
    sup_exchange_check,
};

use super::{emit, DynResult};
use crate::config::{ExperimentConfig, RunRecord};
use crate::table::{Cell, Table};

pub fn run(cfg: &ExperimentConfig) -> DynResult<RunRecord> {
    let mut record = RunRecord::new(cfg.clone());
    let n = cfg.n_list[0];
    let delta = cfg.delta.unwrap_or_else(|| (n as f64).powf(2.0 / cfg.p - 1.0));
    let mut table =
        Table::new(vec!["check", "l_or_n", "delta", "q", "empirical", "bound", "ratio", "pass", "inequality"]);

    // determinism of the sampler
    let a = sample_selectors(n, delta, rng::derive_seed(cfg.seed, Stream::Omega, 0))?;
    let b = sample_selectors(n, delta, rng::derive_seed(cfg.seed, Stream::Omega, 0))?;
    record.check("selector_determinism", a == b, "same seed reproduces the same bits");

    // moment bounds at the calibration point (l = 16, delta = 1/4)
    for (i, q) in [2.0, 3.0, 32.0].into_iter().enumerate() {
        let chk = selector_moment_check(16, 0.25, q, cfg.trials.max(1_000), rng::derive_seed(cfg.seed, Stream::Misc, i as u64))?;
        table.push(vec![
            Cell::Str("moment".into()),
            Cell::Uint(16),
            Cell::Float(0.25),
            Cell::Float(q),
            Cell::Float(chk.empirical),
            Cell::Float(chk.bound),
            Cell::Float(chk.ratio),
            Cell::Bool(chk.pass),
            Cell::Str("selector_moment_bound".into()),
        ]);
        record.check(&format!("selector_moment_q{q}"), chk.pass, format!("ratio {:.4}", chk.ratio));
    }

    // large-deviation tails at the configured (n, delta)
    let ld = large_deviation_check(n, delta, cfg.trials.max(10_000), rng::derive_seed(cfg.seed, Stream::Misc, 10))?;
    for (name, freq, bound) in [
        ("largedev_upper", ld.upper_freq, ld.upper_bound),
        ("largedev_lower", ld.lower_freq, ld.lower_bound),
    ] {
        table.push(vec![
            Cell::Str(name.into()),
            Cell::Uint(n as u64),
            Cell::Float(delta),
            Cell::Float(f64::NAN),
            Cell::Float(freq),
            Cell::Float(bound),
            Cell::Float(if bound > 0.0 { freq / bound } else { f64::NAN }),
            Cell::Bool(ld.pass),
            Cell::Str(name.into()),
        ]);
    }
    record.check(
        "selector_large_deviation",
        ld.pass,
        format!("upper {:.2e} <= {:.2e}, lower {:.2e} <= {:.2e}", ld.upper_freq, ld.upper_bound, ld.lower_freq, ld.lower_bound),
    );

    // tripartite balance at n = 30000
    let tri = sample_tripartite(30_000, rng::derive_seed(cfg.seed, Stream::Tripartite, 0))?;
    let parts = tri.parts();
    let sigma = (30_000.0f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
    let balanced = parts.iter().all(|p| (p.len() as f64 - 10_000.0).abs() <= 4.0 * sigma);
    record.check(
        "tripartite_balance",
        balanced,
        format!("sizes {:?} vs n/3 = 10000 (4 sigma = {:.1})", parts.map(|p| p.len()), 4.0 * sigma),
    );

    // supremum / L^{log n} exchange over random families
    let mut all = true;
    for fam in 0..20u64 {
        let nn = 2 + (rng::bits(cfg.seed, fam) % 99) as usize;
        let chk = sup_exchange_check(nn, cfg.trials.max(1_000), rng::derive_seed(cfg.seed, Stream::Misc, 20 + fam))?;
        all &= chk.pass;
        table.push(vec![
            Cell::Str("sup_exchange".into()),
            Cell::Uint(nn as u64),
            Cell::Float(f64::NAN),
            Cell::Float((nn as f64).ln().max(1.0)),
            Cell::Float(chk.lhs),
            Cell::Float(chk.rhs),
            Cell::Float(if chk.rhs > 0.0 { chk.lhs / chk.rhs } else { f64::NAN }),
            Cell::Bool(chk.pass),
            Cell::Str("sup_norm_exchange".into()),
        ]);
    }
    record.check("sup_exchange_families", all, "E sup <= e max ||X||_q + 3 sigma on 20 families");

    emit(&mut record, &cfg.out_dir, "selectors.csv", &table)?;
    record.put("delta", delta);
    record.put("sample_size", a.size());
    Ok(record)
}
