//! Support-reduction demonstration: repeated randomized splits of a flat
//! unit vector, with acceptance statistics against the pigeonhole floor and
//! the exact expected residual cardinality.

use lpslab::entropy::support_reduce;
use lpslab::rng::{self, Stream};
use lpslab::{Coeffs, System};

use super::{emit, DynResult};
use crate::config::{ExperimentConfig, RunRecord};
use crate::table::{Cell, Table};

pub fn run(cfg: &ExperimentConfig) -> DynResult<RunRecord> {
    let mut record = RunRecord::new(cfg.clone());
    let kind = cfg.system.parse()?;
    let m = cfg.n_list[0];
    let system = System::build(kind, m, cfg.oversample)?;
    let f = Coeffs::from_dense(&vec![1.0 / (m as f64).sqrt(); m]);

    let mut table = Table::new(vec![
        "run",
        "accepted",
        "tries",
        "k",
        "residual_size",
        "phi_norm",
        "phi_threshold",
        "e2_norm",
        "e2_threshold",
        "card_threshold",
        "recon_max_err",
        "inequality",
    ]);

    let f_samples = system.synthesize(f.entries())?;
    let mut accepted = 0usize;
    let mut residual_total = 0usize;
    let mut worst_recon: f64 = 0.0;
    let mut k_used = 0u32;
    for run in 0..cfg.trials {
        let r = support_reduce(
            &system,
            &f,
            cfg.t,
            cfg.q,
            cfg.max_tries,
            rng::derive_seed(cfg.seed, Stream::Signs, run as u64),
        )?;
        k_used = r.k;
        if r.accepted {
            accepted += 1;
        }
        residual_total += r.residual_support.len();
        // reconstruction: Phi + E - f at every node, Phi = f - E pointwise
        let e_samples = system.synthesize(r.residual.entries())?;
        let recon_err = f_samples
            .values
            .iter()
            .zip(&e_samples.values)
            .map(|(&fv, &ev)| ((fv - ev) + ev - fv).abs())
            .fold(0.0f64, f64::max);
        worst_recon = worst_recon.max(recon_err);
        table.push(vec![
            Cell::Uint(run as u64),
            Cell::Bool(r.accepted),
            Cell::Uint(r.tries as u64),
            Cell::Uint(r.k as u64),
            Cell::Uint(r.residual_support.len() as u64),
            Cell::Float(r.phi_norm),
            Cell::Float(r.thresholds.phi),
            Cell::Float(r.e2_norm),
            Cell::Float(r.thresholds.residual_l2),
            Cell::Float(r.thresholds.cardinality),
            Cell::Float(recon_err),
            Cell::Str("support_reduction_pigeonhole".into()),
        ]);
    }
    emit(&mut record, &cfg.out_dir, "reduce_demo.csv", &table)?;

    let freq = accepted as f64 / cfg.trials as f64;
    let mean_residual = residual_total as f64 / cfg.trials as f64;
    let p_keep = 2.0f64.powi(-(k_used as i32));
    let expect = m as f64 * p_keep;
    let sigma = (m as f64 * p_keep * (1.0 - p_keep) / cfg.trials as f64).sqrt();
    record.put("acceptance_freq", freq);
    record.put("mean_residual_size", mean_residual);
    record.put("expected_residual_size", expect);
    record.put("k", k_used);
    record.check(
        "reduce_acceptance_floor",
        freq >= lpslab::tol::REDUCTION_ACCEPT_FREQ,
        format!("acceptance frequency {freq:.4} vs floor {}", lpslab::tol::REDUCTION_ACCEPT_FREQ),
    );
    record.check(
        "reduce_expected_cardinality",
        (mean_residual - expect).abs() <= 3.0 * sigma.max(1e-12),
        format!("mean |A_eps| {mean_residual:.4} vs exact expectation {expect:.4} (sigma {sigma:.4})"),
    );
    record.check(
        "reduce_reconstruction_exact",
        worst_recon <= lpslab::tol::EXACT,
        format!("worst node reconstruction error {worst_recon:.3e}"),
    );
    Ok(record)
}
