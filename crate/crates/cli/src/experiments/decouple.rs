//! Decoupling-defect measurements over random unit vectors.

use lpslab::inequalities::decoupling_check;
use lpslab::rng::{self, Stream};

use super::{emit, DynResult};
use crate::config::{ExperimentConfig, RunRecord};
use crate::table::{Cell, Table};

pub fn run(cfg: &ExperimentConfig) -> DynResult<RunRecord> {
    let mut record = RunRecord::new(cfg.clone());
    let n = cfg.n_list[0];
    let mut table = Table::new(vec![
        "family", "lhs", "rhs", "ratio", "r1_mean", "r2_mean", "r3_mean", "inequality",
    ]);
    let mut max_ratio: f64 = 0.0;
    let mut worst_part_dev: f64 = 0.0;
    for fam in 0..cfg.families {
        let seed = rng::derive_seed(cfg.seed, Stream::Misc, fam as u64);
        let mut u = vec![0.0; n];
        let mut v = vec![0.0; n];
        let mut w = vec![0.0; n];
        rng::unit_sphere(rng::bits(seed, 1), n, &mut u);
        rng::unit_sphere(rng::bits(seed, 2), n, &mut v);
        rng::unit_sphere(rng::bits(seed, 3), n, &mut w);
        let chk = decoupling_check(&u, &v, &w, cfg.p, cfg.trials, rng::bits(seed, 4))?;
        max_ratio = max_ratio.max(chk.ratio);
        for m in chk.part_means {
            worst_part_dev = worst_part_dev.max((m - n as f64 / 3.0).abs());
        }
        table.push(vec![
            Cell::Uint(fam as u64),
            Cell::Float(chk.lhs),
            Cell::Float(chk.rhs),
            Cell::Float(chk.ratio),
            Cell::Float(chk.part_means[0]),
            Cell::Float(chk.part_means[1]),
            Cell::Float(chk.part_means[2]),
            Cell::Str("decoupling_defect".into()),
        ]);
    }
    emit(&mut record, &cfg.out_dir, "decouple.csv", &table)?;
    record.put("max_ratio", max_ratio);
    record.put("worst_part_mean_deviation", worst_part_dev);
    record.check(
        "decoupling_ratio_ceiling",
        max_ratio <= lpslab::tol::DECOUPLING_CEILING,
        format!("max ratio {max_ratio:.6} vs ceiling {}", lpslab::tol::DECOUPLING_CEILING),
    );
    let part_sigma = (n as f64 * (1.0 / 3.0) * (2.0 / 3.0) / cfg.trials as f64).sqrt();
    record.check(
        "decoupling_part_means",
        worst_part_dev <= 5.0 * part_sigma + 0.25,
        format!("worst |E|R^j| - n/3| = {worst_part_dev:.4}"),
    );
    Ok(record)
}
