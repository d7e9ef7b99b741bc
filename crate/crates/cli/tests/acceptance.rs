//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Criteria: (1) exactness identities, (2) oracle equivalences, (3) exact
//! expectations, (4) zero-violation inequality grids, (5) probabilistic tail
//! bounds, (6) closed-form anchors, (7) the end-to-end random-set experiment
//! and ratio scan through the CLI binary, (8) byte-identical determinism.

use std::process::Command;
use std::time::Instant;

use lpslab::decompose::{dyadic_decompose_nonneg, dyadic_decompose_unit};
use lpslab::entropy::{
    exact_entropy, levy_mean, support_reduce, volume_bound_check, CloudNorm, LevySpace,
    NormedCloud,
};
use lpslab::inequalities::{bernstein_tail, check_numerical, solve_gamma, sumprod_check};
use lpslab::lambda::{
    estimate_k_triple, estimate_ks, CoeffVector, KsOptions, TripleOptions,
};
use lpslab::orthosys::{dirichlet_norm, OrthogonalSystem, SystemKind};
use lpslab::rng::{self, Stream};
use lpslab::selectors::{
    large_deviation_check, sample_selectors, sample_tripartite, selector_moment_check,
    SelectorSample,
};
use lpslab::special::binomial_moment;

fn report(criterion: &str, pass: bool, detail: &str) {
    println!("[acceptance] {criterion}: {} - {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{criterion}: {detail}");
}

#[test]
fn criterion_1_exactness_suite() {
    let start = Instant::now();

    // Walsh Gram is exactly the identity at n = 64
    let walsh = OrthogonalSystem::<f64>::build(SystemKind::Walsh, 64, 0).unwrap();
    let gram = walsh.gram();
    let gram_ok =
        (0..64).all(|i| (0..64).all(|j| gram[i][j] == if i == j { 1.0 } else { 0.0 }));

    // Parseval residual on 100 random vectors
    let mut parseval_worst: f64 = 0.0;
    for t in 0..100u64 {
        let mut d = vec![0.0; 64];
        rng::unit_sphere(rng::derive_seed(1, Stream::Misc, t), 64, &mut d);
        let f = walsh.synthesize(&d).unwrap();
        let norm: f64 = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        parseval_worst = parseval_worst.max((walsh.lp_norm(&f, 2.0).unwrap() - norm).abs());
    }

    // support-reduction reconstruction on 1000 draws
    let sys32 = OrthogonalSystem::<f64>::build(SystemKind::Walsh, 32, 0).unwrap();
    let f32v = CoeffVector::from_dense(&vec![1.0 / 32.0f64.sqrt(); 32]);
    let f_s = sys32.synthesize(f32v.entries()).unwrap();
    let mut recon_worst: f64 = 0.0;
    for d in 0..1_000u64 {
        let r = support_reduce(&sys32, &f32v, 4.0, 4.0, 1, rng::derive_seed(2, Stream::Signs, d))
            .unwrap();
        // residual coefficients are exactly 2^k a_i (power-of-two scaling)
        for &i in &r.residual_support {
            assert_eq!(r.residual.get(i), f32v.get(i) * 16.0);
        }
        let e_s = sys32.synthesize(r.residual.entries()).unwrap();
        for k in 0..sys32.grid_len() {
            let phi = f_s.values[k] - e_s.values[k];
            recon_worst = recon_worst.max((phi + e_s.values[k] - f_s.values[k]).abs());
        }
    }

    // dyadic decomposition reconstruction on 1000 random inputs
    let mut dyadic_worst: f64 = 0.0;
    for t in 0..1_000u64 {
        let s = rng::derive_seed(3, Stream::Misc, t);
        let n = 1 + (rng::bits(s, 0) % 64) as usize;
        let mut c: Vec<f64> = (0..n).map(|i| rng::uniform(s, 1 + i as u64)).collect();
        c.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let total: f64 = c.iter().sum();
        let c: Vec<f64> = c.iter().map(|v| v / total.max(1.0)).collect();
        let rec = dyadic_decompose_nonneg(&c).unwrap().reconstruct();
        for i in 0..n {
            dyadic_worst = dyadic_worst.max((rec[i] - c[i]).abs());
        }
        let nn = n.max(2);
        let mut a = vec![0.0; nn];
        rng::unit_sphere(rng::bits(s, 1 << 16), nn, &mut a);
        let rec = dyadic_decompose_unit(&a).unwrap().reconstruct();
        for i in 0..nn {
            dyadic_worst = dyadic_worst.max((rec[i] - a[i]).abs());
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    report(
        "criterion 1 (exactness suite)",
        gram_ok
            && parseval_worst <= 1e-12
            && recon_worst <= 1e-12
            && dyadic_worst <= 1e-12
            && elapsed < 10.0,
        &format!(
            "gram exact: {gram_ok}, parseval {parseval_worst:.2e}, reconstruction {recon_worst:.2e}, dyadic {dyadic_worst:.2e}, {elapsed:.1}s"
        ),
    );
}

#[test]
fn criterion_2_oracle_equivalences() {
    let start = Instant::now();

    // (a) power iteration vs dense sphere grid at n = 3, p = 4
    let sys3 = OrthogonalSystem::<f64>::build(SystemKind::Walsh, 3, 0).unwrap();
    let est = estimate_ks(&sys3, &[0, 1, 2], 4.0, &KsOptions::default()).unwrap();
    let n_pts = 200_000usize;
    let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    let mut sphere_max: f64 = 0.0;
    for j in 0..n_pts {
        let z = 1.0 - 2.0 * (j as f64 + 0.5) / n_pts as f64;
        let rho = (1.0 - z * z).sqrt();
        let th = golden * j as f64;
        let a = [rho * th.cos(), rho * th.sin(), z];
        let f = sys3.synthesize(&a).unwrap();
        sphere_max = sphere_max.max(sys3.lp_norm(&f, 4.0).unwrap());
    }
    let ks_ok = (est.value - sphere_max).abs() <= 1e-2;

    // (b) trig L^4 vs the frequency-quadruple oracle
    let nt = 3usize;
    let trig = OrthogonalSystem::<f64>::build(SystemKind::Trig, nt, 32).unwrap();
    let d = [0.7, -0.4, 0.5];
    let quad = trig.lp_norm(&trig.synthesize(&d).unwrap(), 4.0).unwrap().powi(4);
    let freqs: Vec<i64> = (1..=nt as i64).chain((1..=nt as i64).map(|j| -j)).collect();
    let coef = |k: i64| -> (f64, f64) {
        let dj = d[(k.unsigned_abs() as usize) - 1];
        if k > 0 {
            (0.0, -dj / 2.0)
        } else {
            (0.0, dj / 2.0)
        }
    };
    let mul = |a: (f64, f64), b: (f64, f64)| (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0);
    let mut exact4 = 0.0f64;
    for &k1 in &freqs {
        for &k2 in &freqs {
            for &k3 in &freqs {
                for &k4 in &freqs {
                    if k1 + k2 == k3 + k4 {
                        let prod = mul(coef(k1), coef(k2));
                        let conj = {
                            let c = mul(coef(k3), coef(k4));
                            (c.0, -c.1)
                        };
                        exact4 += mul(prod, conj).0;
                    }
                }
            }
        }
    }
    let l4_ok = (quad - exact4).abs() <= 1e-8;

    // (c) triple-norm estimate vs exhaustive search at n = 8, m = 2
    let sys8 = OrthogonalSystem::<f64>::build(SystemKind::Walsh, 8, 0).unwrap();
    let p = 3.0;
    let omega1 = sample_selectors(8, 0.7, 101).unwrap();
    let omega2 = sample_selectors(8, 0.7, 102).unwrap();
    let omega3 = sample_selectors(8, 0.7, 103).unwrap();
    let est_t = estimate_k_triple(
        &sys8,
        std::slice::from_ref(&omega1),
        &omega2,
        &omega3,
        p,
        (2, 2, 2),
        8.0f64.ln(),
        None,
        &TripleOptions { restarts: 12, iters: 60, seed: 1 },
    )
    .unwrap();
    let brute = exhaustive_triple_sup(&sys8, &omega1, &omega2, &omega3, p, 2, 2) / 2.0f64.sqrt();
    let triple_ok = (est_t.value - brute).abs() <= 5e-2;

    // (d) selector moments vs the exact binomial sum at q in {2, 3, 32}
    let mut moments_ok = true;
    for (i, q) in [2.0, 3.0, 32.0].into_iter().enumerate() {
        let trials = 20_000usize;
        let chk = selector_moment_check(16, 0.25, q, trials, 500 + i as u64).unwrap();
        let mq = binomial_moment(16, 0.25, q);
        let m2q = binomial_moment(16, 0.25, 2.0 * q);
        let sd_mean = ((m2q - mq * mq).max(0.0) / trials as f64).sqrt();
        let sd_root = sd_mean / (q * mq.powf(1.0 - 1.0 / q)).max(1e-300);
        moments_ok &= (chk.empirical - mq.powf(1.0 / q)).abs() <= 3.0 * sd_root + 1e-9;
    }

    let elapsed = start.elapsed().as_secs_f64();
    report(
        "criterion 2 (oracle equivalences)",
        ks_ok && l4_ok && triple_ok && moments_ok && elapsed < 300.0,
        &format!(
            "K_S {:.4} vs sphere {sphere_max:.4}; L4^4 {quad:.10} vs {exact4:.10}; triple {:.4} vs {brute:.4}; moments 3-sigma: {moments_ok}; {elapsed:.1}s",
            est.value, est_t.value
        ),
    );
}

/// Exhaustive supremum over (A, signs, b in Pi_m2) with c scanned on a dense
/// angle grid per 2-element support: the b-supremum is exact (top-m2 l2 norm
/// of the signed row combination), only c is discretized.
fn exhaustive_triple_sup(
    sys: &OrthogonalSystem<f64>,
    omega1: &SelectorSample,
    omega2: &SelectorSample,
    omega3: &SelectorSample,
    p: f64,
    m1: usize,
    m2: usize,
) -> f64 {
    let n = sys.len();
    let basis: Vec<_> = (0..n)
        .map(|i| {
            let mut d = vec![0.0; n];
            d[i] = 1.0;
            sys.synthesize(&d).unwrap()
        })
        .collect();
    let sel1 = omega1.selected();
    let mut brute = 0.0f64;
    let angle_steps = 1440usize;
    for s1 in 0..n {
        for s2 in (s1 + 1)..n {
            for ai in 0..angle_steps {
                let th = ai as f64 * std::f64::consts::TAU / angle_steps as f64;
                let c = CoeffVector::from_sparse(n, &[(s1, th.cos()), (s2, th.sin())]).unwrap();
                let fc = sys.synthesize(&omega3.mask(c.entries())).unwrap();
                let w = fc.map(|v| (1.0 + v.abs()).powf(p - 2.0));
                let rows: Vec<Vec<f64>> = (0..n)
                    .map(|i| {
                        let phi_w = basis[i].mul(&w);
                        (0..n)
                            .map(|j| {
                                if omega2.bit(j) {
                                    sys.inner_product(&basis[j], &phi_w).unwrap()
                                } else {
                                    0.0
                                }
                            })
                            .collect()
                    })
                    .collect();
                for a1 in 0..sel1.len() {
                    for a2 in a1..sel1.len() {
                        let aset: Vec<usize> = if a1 == a2 {
                            vec![sel1[a1]]
                        } else {
                            vec![sel1[a1], sel1[a2]]
                        };
                        if aset.len() > m1 {
                            continue;
                        }
                        for sm in 0..(1usize << aset.len()) {
                            let mut v = vec![0.0f64; n];
                            for (t, &i) in aset.iter().enumerate() {
                                let sgn = if (sm >> t) & 1 == 0 { 1.0 } else { -1.0 };
                                for j in 0..n {
                                    v[j] += sgn * rows[i][j];
                                }
                            }
                            let mut mags: Vec<f64> = v.iter().map(|x| x * x).collect();
                            mags.sort_by(|x, y| y.partial_cmp(x).unwrap());
                            brute = brute.max(mags.iter().take(m2).sum::<f64>().sqrt());
                        }
                    }
                }
            }
        }
    }
    brute
}

#[test]
fn criterion_3_exact_expectations() {
    // E|A_eps| = 2^{-k} m over 10^4 draws at (m, t) in {(32, 4), (64, 8)}
    let mut card_ok = true;
    let mut detail = String::new();
    for (m, t) in [(32usize, 4.0f64), (64, 8.0)] {
        let sys = OrthogonalSystem::<f64>::build(SystemKind::Walsh, m, 0).unwrap();
        let f = CoeffVector::from_dense(&vec![1.0 / (m as f64).sqrt(); m]);
        let draws = 10_000usize;
        let mut total = 0usize;
        let mut k_used = 0u32;
        for d in 0..draws {
            let r = support_reduce(&sys, &f, t, 4.0, 1, rng::derive_seed(12, Stream::Signs, (m * 100_000 + d) as u64)).unwrap();
            total += r.residual_support.len();
            k_used = r.k;
        }
        let pk = 2.0f64.powi(-(k_used as i32));
        let expect = m as f64 * pk;
        let mean = total as f64 / draws as f64;
        let sigma = (m as f64 * pk * (1.0 - pk) / draws as f64).sqrt();
        card_ok &= (mean - expect).abs() <= 3.0 * sigma;
        detail = format!("(m={m}, t={t}): mean {mean:.4} vs {expect:.4} (3 sigma {:.4})", 3.0 * sigma);
    }

    // E|R^j| = n/3 within 4 sigma at n = 30000
    let tri = sample_tripartite(30_000, rng::derive_seed(12, Stream::Tripartite, 0)).unwrap();
    let sigma = (30_000.0f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
    let parts = tri.parts();
    let tri_ok = parts.iter().all(|p| (p.len() as f64 - 10_000.0).abs() <= 4.0 * sigma);

    report(
        "criterion 3 (exact expectations)",
        card_ok && tri_ok,
        &format!("{detail}; tripartite sizes {:?}", parts.map(|p| p.len())),
    );
}

#[test]
fn criterion_4_zero_violation_inequalities() {
    // the two-variable pointwise inequality at step 0.01 on [-10, 10]^2
    let mut numerical_ok = true;
    for p in [2.25, 2.5, 3.0] {
        let rep = check_numerical(p, 10.0, 0.01).unwrap();
        numerical_ok &= rep.violations == 0;
    }

    // packing/covering chain on 20 exact instances of at most 12 points
    let mut chain_ok = true;
    for trial in 0..20u64 {
        let s = rng::derive_seed(13, Stream::Cloud, trial);
        let n = 4 + (rng::bits(s, 0) % 9) as usize;
        let dim = 1 + (rng::bits(s, 1) % 3) as usize;
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..dim).map(|d| rng::uniform(s, 10 + (i * dim + d) as u64)).collect())
            .collect();
        let cloud = NormedCloud::new(pts, CloudNorm::Euclidean).unwrap();
        for tt in 1..=10 {
            chain_ok &= exact_entropy(&cloud, tt as f64 * 0.1).unwrap().chain_holds();
        }
    }

    // A + B <= 2AB on the 10^4 grid
    let sumprod_ok = sumprod_check(100.0, 100).unwrap().violations == 0;

    // volume bound for dimensions up to 3
    let mut volume_ok = true;
    for dim in 1..=3usize {
        for t in [0.25, 0.5, 0.75] {
            volume_ok &= volume_bound_check(
                &CloudNorm::Euclidean,
                dim,
                t,
                20_000,
                rng::derive_seed(14, Stream::Cloud, dim as u64),
            )
            .unwrap()
            .pass;
        }
    }

    report(
        "criterion 4 (zero-violation inequality suites)",
        numerical_ok && chain_ok && sumprod_ok && volume_ok,
        &format!("pointwise {numerical_ok}, chain {chain_ok}, sum-product {sumprod_ok}, volume {volume_ok}"),
    );
}

#[test]
fn criterion_5_probabilistic_bounds() {
    let ld40 = large_deviation_check(40, 0.1, 100_000, 15).unwrap();
    let ld1000 = large_deviation_check(1_000, 0.05, 100_000, 16).unwrap();

    // support-reduction acceptance over 1000 independent runs
    let sys = OrthogonalSystem::<f64>::build(SystemKind::Walsh, 64, 0).unwrap();
    let f = CoeffVector::from_dense(&vec![1.0 / 8.0; 64]);
    let mut accepted = 0usize;
    for run in 0..1_000u64 {
        if support_reduce(&sys, &f, 4.0, 4.0, 1, rng::derive_seed(17, Stream::Signs, run))
            .unwrap()
            .accepted
        {
            accepted += 1;
        }
    }
    let freq = accepted as f64 / 1_000.0;

    let mut bernstein_ok = true;
    for (i, (l, d, u)) in
        [(100usize, 0.1, 20.0), (10, 0.5, 3.0), (50, 0.2, 8.0), (200, 0.05, 15.0), (30, 0.3, 6.0)]
            .into_iter()
            .enumerate()
    {
        bernstein_ok &= bernstein_tail(l, d, u, 20_000, 18 + i as u64).unwrap().pass;
    }

    report(
        "criterion 5 (probabilistic bounds)",
        ld40.pass && ld1000.pass && freq >= 0.25 && bernstein_ok,
        &format!(
            "tails ({:.2e} <= {:.2e}, {:.2e} <= {:.2e}); reduction acceptance {freq:.3} >= 0.25; bernstein {bernstein_ok}",
            ld40.lower_freq, ld40.lower_bound, ld1000.lower_freq, ld1000.lower_bound
        ),
    );
}

#[test]
fn criterion_6_closed_form_anchors() {
    let mut levy_ok = true;
    let mut levy_detail = String::new();
    for n in [2usize, 8, 32] {
        let est = levy_mean(&LevySpace::Euclidean { n }, 4_000, 19 + n as u64).unwrap();
        levy_ok &= (est.m_x - 1.0).abs() <= 3.0 * est.stderr;
        levy_detail = format!("M_X(n={n}) = {:.5} +- {:.5}", est.m_x, est.stderr);
    }

    let mut dirichlet_ok = true;
    for n in [1usize, 8, 64, 256] {
        let got = dirichlet_norm::<f64>(n, 2.0).unwrap();
        dirichlet_ok &= (got - ((2 * n + 1) as f64).sqrt()).abs() <= 1e-8;
    }

    let sol = solve_gamma(3.0, None).unwrap();

    report(
        "criterion 6 (closed-form anchors)",
        levy_ok && dirichlet_ok && sol.margin >= 0.009,
        &format!("{levy_detail}; dirichlet parseval {dirichlet_ok}; gamma margin {:.5}", sol.margin),
    );
}

fn run_cli(args: &[&str]) -> (bool, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_lpslab"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.success(), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn read_summary(dir: &std::path::Path, key: &str) -> f64 {
    let record: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("record.json")).unwrap()).unwrap();
    record["summary"][key].as_f64().unwrap_or(f64::NAN)
}

#[test]
fn criterion_7_end_to_end_lambda_p() {
    let start = Instant::now();
    let base = std::env::temp_dir().join(format!("lpslab-acceptance-{}", std::process::id()));

    // the p = 4 trend experiment across n = 64 -> 256
    let ko_dir = base.join("k-omega");
    let (ok, _) = run_cli(&[
        "k-omega",
        "--seed",
        "7",
        "--p",
        "4",
        "--n",
        "64,256",
        "--trials",
        "50",
        "--out",
        ko_dir.to_str().unwrap(),
    ]);
    let med64 = read_summary(&ko_dir, "median_k_n64");
    let med256 = read_summary(&ko_dir, "median_k_n256");
    let lb64 = read_summary(&ko_dir, "flat_lower_bound_n64");
    let lb256 = read_summary(&ko_dir, "flat_lower_bound_n256");
    let trend_ok = ok && med256 <= 3.0 * med64 && lb256 >= 1.3 * lb64;

    // the ratio scan at n = 32, two seeds, ceiling stable within +-25%
    let mut ratios = Vec::new();
    let mut scan_ok = true;
    for seed in ["7", "8"] {
        let dir = base.join(format!("kest-{seed}"));
        let (ok, _) =
            run_cli(&["kest-scan", "--seed", seed, "--n", "32", "--p", "3", "--out", dir.to_str().unwrap()]);
        scan_ok &= ok;
        ratios.push(read_summary(&dir, "max_ratio"));
    }
    let (r1, r2) = (ratios[0], ratios[1]);
    let stable = (r1 - r2).abs() <= 0.25 * r1.max(r2);
    let finite = r1.is_finite() && r2.is_finite() && r1 <= lpslab::tol::KEST_RATIO_CEILING && r2 <= lpslab::tol::KEST_RATIO_CEILING;

    let elapsed = start.elapsed().as_secs_f64();
    report(
        "criterion 7 (end-to-end Lambda(p) phenomenon)",
        trend_ok && scan_ok && stable && finite && elapsed < 1_800.0,
        &format!(
            "median {med64:.4} -> {med256:.4} (<= 3x), lower bound {lb64:.4} -> {lb256:.4} (>= 1.3x), scan ratios {r1:.4}/{r2:.4} (+-25%), {elapsed:.0}s"
        ),
    );
}

#[test]
fn criterion_8_byte_identical_determinism() {
    let dir = std::env::temp_dir().join(format!("lpslab-determinism-{}", std::process::id()));
    let dir_s = dir.to_str().unwrap();
    let (ok1, _) = run_cli(&["verify-all", "--seed", "7", "--out", dir_s]);
    let files = ["record.json", "verify_all.csv"];
    let snapshot: Vec<Vec<u8>> =
        files.iter().map(|f| std::fs::read(dir.join(f)).unwrap()).collect();
    let (ok2, _) = run_cli(&["verify-all", "--seed", "7", "--out", dir_s]);
    let identical = files
        .iter()
        .zip(&snapshot)
        .all(|(f, snap)| &std::fs::read(dir.join(f)).unwrap() == snap);
    report(
        "criterion 8 (determinism)",
        ok1 && ok2 && identical,
        &format!("verify-all --seed 7 twice: all checks pass ({ok1}/{ok2}), outputs byte-identical: {identical}"),
    );
}
