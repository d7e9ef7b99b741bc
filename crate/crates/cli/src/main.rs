//! lpslab: seeded, reproducible experiments for the random Lambda(p)-set
//! laboratory.
//!
//! One subcommand per experiment; `--seed` is mandatory (no silent
//! nondeterminism). Exit codes: 0 all checks pass, 1 at least one assertion
//! failed, 2 usage error.

mod config;
mod experiments;
mod table;

use std::process::ExitCode;

use config::{Experiment, ExperimentConfig};

const USAGE: &str = "\
lpslab - numerical laboratory for random Lambda(p)-set experiments

USAGE:
  lpslab <SUBCOMMAND> --seed U64 [FLAGS]

SUBCOMMANDS:
  k-omega       draw random selector sets, estimate their Lambda(p) constants,
                emit the distribution and the flat lower-bound trend across n
  kest-scan     ratio scan of the triple-supremum functional against its
                target bound over a grid of support sizes
  entropy-scan  greedy-packing lower bounds for sparse-ball entropy
  reduce-demo   randomized support-reduction statistics
  decouple      decoupling-defect measurements over random unit vectors
  selectors     selector moment / tail / partition diagnostics
  verify-all    every module's invariant suite as named checks

COMMON FLAGS:
  --seed U64        master seed (required)
  --n LIST          comma-separated sizes (e.g. 64 or 64,128,256)
  --p FLOAT         Lebesgue exponent (default 3; k-omega default 4)
  --trials N        Monte Carlo trials / runs (default per experiment)
  --system NAME     walsh | trig (default walsh)
  --out DIR         output directory (default lpslab-out)
  --oversample N    trig quadrature oversampling (default 16)
  --timings         record wall-clock timestamps (off by default so reruns
                    are byte-identical)

EXPERIMENT FLAGS:
  --m-list LIST     support sizes (kest-scan grid, entropy-scan)
  --t-list LIST     radii (entropy-scan)
  --q FLOAT         L^q exponent (entropy-scan, reduce-demo; default 4)
  --t FLOAT         reduction scale t > 2 (reduce-demo; default 4)
  --max-tries N     attempts per reduction (default 50)
  --families N      random vector families (decouple; default 50)
  --omega-pairs N   sampled (omega2, omega3) pairs (kest-scan; default 3)
  --draws N         omega1 draws per cell (kest-scan; default 12)
  --delta FLOAT     selector mean override (selectors)
  --sigma FLOAT     exponent sigma override (kest-scan)
  --variant NAME    standard | restricted (kest-scan)
  --p1 FLOAT        base exponent of the restricted variant (default 3)

EXIT CODES: 0 pass, 1 assertion failure, 2 usage error.
";

fn parse_list_usize(v: &str) -> Result<Vec<usize>, String> {
    v.split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|e| format!("bad integer `{s}`: {e}")))
        .collect()
}

fn parse_list_f64(v: &str) -> Result<Vec<f64>, String> {
    v.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("bad number `{s}`: {e}")))
        .collect()
}

fn parse_args(args: &[String]) -> Result<ExperimentConfig, String> {
    if args.is_empty() {
        return Err("missing subcommand".into());
    }
    let experiment = match args[0].as_str() {
        "k-omega" => Experiment::KOmega,
        "kest-scan" => Experiment::KestScan,
        "entropy-scan" => Experiment::EntropyScan,
        "reduce-demo" => Experiment::ReduceDemo,
        "decouple" => Experiment::Decouple,
        "selectors" => Experiment::Selectors,
        "verify-all" => Experiment::VerifyAll,
        "--help" | "-h" | "help" => return Err(String::new()),
        other => return Err(format!("unknown subcommand `{other}`")),
    };
    let mut cfg = ExperimentConfig::new(experiment, 0);
    let mut seed_given = false;

    // per-experiment defaults
    match experiment {
        Experiment::KOmega => {
            cfg.p = 4.0;
            cfg.trials = 50;
            cfg.n_list = vec![64, 128, 256];
        }
        Experiment::KestScan => {
            cfg.p = 3.0;
            cfg.n_list = vec![32];
            cfg.m_list = vec![1, 2, 4, 8];
        }
        Experiment::EntropyScan => {
            cfg.n_list = vec![8];
            cfg.m_list = vec![1, 2, 3];
            cfg.t_list = vec![0.25, 0.35, 0.5, 0.75, 1.0];
        }
        Experiment::ReduceDemo => {
            cfg.n_list = vec![64];
            cfg.trials = 1_000;
        }
        Experiment::Decouple => {
            cfg.n_list = vec![16];
            cfg.p = 2.5;
            cfg.trials = 10_000;
        }
        Experiment::Selectors => {
            cfg.n_list = vec![1_000];
            cfg.delta = Some(0.05);
            cfg.trials = 100_000;
        }
        Experiment::VerifyAll => {
            cfg.n_list = vec![64];
        }
    }

    let mut it = args[1..].iter();
    while let Some(arg) = it.next() {
        let mut value = |name: &str| -> Result<&String, String> {
            it.next().ok_or_else(|| format!("missing value for {name}"))
        };
        match arg.as_str() {
            "--help" | "-h" => return Err(String::new()),
            "--timings" => cfg.timings = true,
            "--seed" => {
                cfg.seed = value("--seed")?.parse().map_err(|e| format!("bad --seed: {e}"))?;
                seed_given = true;
            }
            "--n" => {
                cfg.n_list = parse_list_usize(value("--n")?)?;
                if cfg.n_list.is_empty() || cfg.n_list.contains(&0) {
                    return Err("--n needs positive sizes".into());
                }
            }
            "--p" => cfg.p = value("--p")?.parse().map_err(|e| format!("bad --p: {e}"))?,
            "--trials" => {
                cfg.trials = value("--trials")?.parse().map_err(|e| format!("bad --trials: {e}"))?
            }
            "--system" => cfg.system = value("--system")?.clone(),
            "--out" => cfg.out_dir = value("--out")?.into(),
            "--oversample" => {
                cfg.oversample =
                    value("--oversample")?.parse().map_err(|e| format!("bad --oversample: {e}"))?
            }
            "--m-list" => cfg.m_list = parse_list_usize(value("--m-list")?)?,
            "--t-list" => cfg.t_list = parse_list_f64(value("--t-list")?)?,
            "--q" => cfg.q = value("--q")?.parse().map_err(|e| format!("bad --q: {e}"))?,
            "--t" => cfg.t = value("--t")?.parse().map_err(|e| format!("bad --t: {e}"))?,
            "--max-tries" => {
                cfg.max_tries =
                    value("--max-tries")?.parse().map_err(|e| format!("bad --max-tries: {e}"))?
            }
            "--families" => {
                cfg.families =
                    value("--families")?.parse().map_err(|e| format!("bad --families: {e}"))?
            }
            "--omega-pairs" => {
                cfg.omega_pairs =
                    value("--omega-pairs")?.parse().map_err(|e| format!("bad --omega-pairs: {e}"))?
            }
            "--draws" => {
                cfg.draws = value("--draws")?.parse().map_err(|e| format!("bad --draws: {e}"))?
            }
            "--delta" => {
                cfg.delta =
                    Some(value("--delta")?.parse().map_err(|e| format!("bad --delta: {e}"))?)
            }
            "--sigma" => {
                cfg.sigma =
                    Some(value("--sigma")?.parse().map_err(|e| format!("bad --sigma: {e}"))?)
            }
            "--variant" => cfg.variant = value("--variant")?.clone(),
            "--p1" => cfg.p1 = value("--p1")?.parse().map_err(|e| format!("bad --p1: {e}"))?,
            other => return Err(format!("unknown flag `{other}`")),
        }
    }

    if !seed_given {
        return Err("--seed is required (no silent nondeterminism)".into());
    }
    if cfg.system != "walsh" && cfg.system != "trig" {
        return Err(format!("unknown system `{}`; expected walsh or trig", cfg.system));
    }
    if cfg.variant != "standard" && cfg.variant != "restricted" {
        return Err(format!("unknown variant `{}`; expected standard or restricted", cfg.variant));
    }
    if cfg.variant == "restricted" && !(cfg.p1 > cfg.p / 2.0 && cfg.p1 < cfg.p) {
        return Err(format!("--p1 must lie in (p/2, p) = ({}, {})", cfg.p / 2.0, cfg.p));
    }
    if cfg.trials == 0 {
        return Err("--trials must be positive".into());
    }
    if cfg.n_list.is_empty() {
        return Err("--n needs at least one size".into());
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cfg = match parse_args(&args) {
        Ok(cfg) => cfg,
        Err(msg) => {
            if msg.is_empty() {
                println!("{USAGE}");
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {msg}\n\n{USAGE}");
            return ExitCode::from(2);
        }
    };

    let result = match cfg.experiment {
        Experiment::KOmega => experiments::k_omega::run(&cfg),
        Experiment::KestScan => experiments::kest_scan::run(&cfg),
        Experiment::EntropyScan => experiments::entropy_scan::run(&cfg),
        Experiment::ReduceDemo => experiments::reduce_demo::run(&cfg),
        Experiment::Decouple => experiments::decouple::run(&cfg),
        Experiment::Selectors => experiments::selectors_exp::run(&cfg),
        Experiment::VerifyAll => experiments::verify_all::run(&cfg),
    };

    match result {
        Ok(mut record) => {
            if let Err(e) = record.write(&cfg.out_dir.clone()) {
                eprintln!("error: could not write the run record: {e}");
                return ExitCode::from(2);
            }
            let failed: Vec<&str> =
                record.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
            println!(
                "{}: {} checks, {} failed -> {}",
                cfg.experiment.name(),
                record.checks.len(),
                failed.len(),
                cfg.out_dir.display()
            );
            for c in &record.checks {
                println!("  [{}] {} - {}", if c.pass { "pass" } else { "FAIL" }, c.name, c.detail);
            }
            if record.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
