//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines always reach the output.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use toric_mellin::bargmann::{spectral_measure, spectral_measure_by_states, state_density, WeightData};
use toric_mellin::distribution::{
    gamma_constant, layer_cake_check, logn_epsilon_doubled, refined_prediction, scaling_study, superlevel_volume_exact,
    EpsilonSchedule, LevelSetProblem, PredictorMode, VolumeOptions,
};
use toric_mellin::gk::{g_from_generating_function, g_polynomial};
use toric_mellin::mellin::{closed_form, multi_indices, transform_quadrature, transform_series, TestFunction};
use toric_mellin::polytope::{riemann_sum, EmExpansion, HPolytope};
use toric_mellin::quadrature::gauss_laguerre_general;
use toric_mellin::report::loglog_slope;
use toric_mellin::special::unit_ball_volume;
use toric_mellin::{Error, RationalPolynomial};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ac1() -> Outcome {
    let start = Instant::now();
    for k in 0..=30u32 {
        let deg = g_polynomial(k).degree();
        check(deg == (k / 2) as i64, || format!("deg g_{k} = {deg}"))?;
    }
    let oracle = g_from_generating_function(20);
    for (k, g) in oracle.iter().enumerate() {
        check(&g_polynomial(k as u32) == g, || format!("g_{k} differs from the generating function"))?;
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("degrees k ≤ 30, coefficients k ≤ 20, {elapsed:.2?}"))
}

fn ac2() -> Outcome {
    let grid = [0.25, 1.0, 2.5];
    let mut worst = 0.0f64;
    let mut cases = 0;
    for d in 1..=2usize {
        let points: Vec<Vec<f64>> = if d == 1 {
            grid.iter().map(|&x| vec![x]).collect()
        } else {
            grid.iter().flat_map(|&a| grid.iter().map(move |&b| vec![a, b])).collect()
        };
        for total in 0..=6u32 {
            for m in multi_indices(d, total) {
                let f = TestFunction::monomial(&m);
                for x in &points {
                    for n in [4.0, 50.0, 500.0] {
                        let exact = closed_form(&f, x, n).ok_or("no closed form for a monomial")?;
                        let quad = transform_quadrature(&f, x, n).map_err(|e| e.to_string())?.value;
                        let series = transform_series(&f, x, n, total as usize).map_err(|e| e.to_string())?.value;
                        for v in [quad, series] {
                            let rel = (v - exact).abs() / exact.abs();
                            worst = worst.max(rel);
                            check(rel <= 1e-10, || format!("m = {m:?}, x = {x:?}, N = {n}: {v} vs {exact}"))?;
                        }
                        cases += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{cases} cases, worst relative gap {worst:.1e}"))
}

fn ac3() -> Outcome {
    let f = TestFunction::gaussian(vec![1.0], 0.5).map_err(|e| e.to_string())?;
    let ns = [50.0, 100.0, 200.0, 400.0, 800.0];
    let mut slopes = Vec::new();
    for m in 0..=2usize {
        let study = toric_mellin::mellin::empirical_order(&f, &[1.0], &ns, m).map_err(|e| e.to_string())?;
        let slope = study.slope.ok_or("series reported exact for a Gaussian")?;
        let bound = -(m as f64 + 1.0) / 2.0 + 0.3;
        check(slope <= bound, || format!("M = {m}: slope {slope:.3} > {bound}"))?;
        slopes.push(format!("M={m}: {slope:.2}"));
    }
    Ok(format!("slopes {}", slopes.join(", ")))
}

fn ac4() -> Outcome {
    let interval = HPolytope::cube(1);
    let x = TestFunction::coordinate(1, 0);
    let em = EmExpansion::new(&x, &interval, 2).map_err(|e| e.to_string())?;
    for n in [1u64, 2, 7, 40, 1000] {
        let v = em.evaluate(n as f64);
        let exact = 0.5 + 0.5 / n as f64;
        check((v - exact).abs() < 1e-12, || format!("f = x, N = {n}: {v}"))?;
    }
    let triangle = HPolytope::standard_simplex(2);
    let em = EmExpansion::new(&TestFunction::constant(2, 1), &triangle, 2).map_err(|e| e.to_string())?;
    for n in 1..=40u64 {
        let nf = n as f64;
        let exact = (nf + 1.0) * (nf + 2.0) / (2.0 * nf * nf);
        check((em.evaluate(nf) - exact).abs() < 1e-8, || format!("triangle, N = {n}"))?;
    }
    let f = TestFunction::gaussian(vec![0.2, 0.4], 0.7).map_err(|e| e.to_string())?;
    let ns = [16u64, 32, 64, 128];
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let mut slopes = Vec::new();
    for order in 0..=4usize {
        let em = EmExpansion::new(&f, &triangle, order).map_err(|e| e.to_string())?;
        let errors = ns
            .iter()
            .map(|&n| Ok((riemann_sum(&f, &triangle, n)? - em.evaluate(n as f64)).abs()))
            .collect::<Result<Vec<f64>, Error>>()
            .map_err(|e| e.to_string())?;
        let slope = loglog_slope(&xs, &errors).ok_or("no slope")?;
        check(slope <= -(order as f64 + 1.0) + 0.3, || format!("order {order}: slope {slope:.3}"))?;
        slopes.push(format!("{slope:.2}"));
    }
    Ok(format!("smooth slopes for M = 0..4 on the triangle: {}", slopes.join(", ")))
}

fn binomial(n: u64, k: u64) -> u64 {
    (1..=k).fold(1u64, |acc, i| acc * (n + 1 - i) / i)
}

fn ac5() -> Outcome {
    let start = Instant::now();
    let functions = [
        TestFunction::constant(2, 1),
        TestFunction::coordinate(2, 0),
        TestFunction::polynomial(&RationalPolynomial::variable(2, 0) * &RationalPolynomial::variable(2, 1)),
        TestFunction::gaussian(vec![0.4, 0.9], 0.5).map_err(|e| e.to_string())?,
    ];
    let mut worst = 0.0f64;
    for alpha in [1u64, 2] {
        let w = WeightData::unit(2, alpha).map_err(|e| e.to_string())?;
        for n in [1u64, 2, 5, 11, 20, 30] {
            let count = spectral_measure(&functions[0], &w, n).map_err(|e| e.to_string())?;
            let expected = binomial(n * alpha + 1, 1) as f64;
            check(count == expected, || format!("ν_N(1) = {count}, expected {expected}"))?;
            for f in &functions {
                let a = spectral_measure(f, &w, n).map_err(|e| e.to_string())?;
                let b = spectral_measure_by_states(f, &w, n).map_err(|e| e.to_string())?;
                let rel = (a - b).abs() / a.abs();
                worst = worst.max(rel);
                check(rel <= 1e-9, || format!("α = {alpha}, N = {n}: {a} vs {b}"))?;
            }
        }
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("worst relative gap {worst:.1e}, {elapsed:.1?}"))
}

/// Endpoints of `{r : k ln r - N r ≥ c}` by bisection on both sides of `k/N`.
fn interval_oracle(n: u64, k: u64, c: f64) -> (f64, f64) {
    let (nf, kf) = (n as f64, k as f64);
    let g = |r: f64| kf * r.ln() - nf * r - c;
    let solve = |mut inside: f64, mut outside: f64| {
        for _ in 0..200 {
            let mid = 0.5 * (inside + outside);
            if g(mid) >= 0.0 {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        0.5 * (inside + outside)
    };
    let peak = kf / nf;
    let mut far = 2.0 * peak;
    while g(far) >= 0.0 {
        far *= 2.0;
    }
    (solve(peak, f64::MIN_POSITIVE), solve(peak, far))
}

fn ac6() -> Outcome {
    let ns = [200u64, 1_000, 10_000, 100_000];
    let study =
        scaling_study(&[1.0], &ns, 1.0, EpsilonSchedule::Plain, PredictorMode::Refined, &VolumeOptions::default())
            .map_err(|e| e.to_string())?;
    let ratios: Vec<f64> = study.rows.iter().map(|r| r.report.ratio).collect();
    let gaps: Vec<f64> = ratios.iter().map(|r| (r - 1.0).abs()).collect();
    check(gaps.windows(2).all(|w| w[1] < w[0]), || format!("ratios not monotone: {ratios:?}"))?;
    check(gaps[3] <= 0.10, || format!("final ratio {}", ratios[3]))?;
    let gamma = gamma_constant(&[1.0]).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for row in &study.rows {
        let p = LevelSetProblem::new(row.n, &row.k, 0.0).map_err(|e| e.to_string())?;
        let (lo, hi) = interval_oracle(row.n, row.k[0], p.threshold_log);
        let vol_gap = (PI * (hi - lo) - row.report.exact).abs() / row.report.exact;
        check(vol_gap < 1e-9, || format!("N = {}: volume differs from the bisection oracle by {vol_gap:e}", row.n))?;
        let eps = EpsilonSchedule::Plain.epsilon(row.n as f64, 1.0, gamma, 1).map_err(|e| e.to_string())?;
        let half = (2.0 * eps).sqrt();
        for (end, predicted) in [(lo, 1.0 - half), (hi, 1.0 + half)] {
            let gap = (end - predicted).abs() / half;
            worst = worst.max(gap / eps.powf(0.25));
            check(gap <= eps.powf(0.25), || format!("N = {}: endpoint gap {gap:.3e}, ε = {eps:.3e}", row.n))?;
        }
    }
    Ok(format!(
        "ratios {}, endpoint gap ≤ {worst:.2} ε^(1/4)",
        ratios.iter().map(|r| format!("{r:.6}")).collect::<Vec<_>>().join(", ")
    ))
}

fn ac7() -> Outcome {
    let study = scaling_study(
        &[1.0, 0.0],
        &[1_000, 3_000, 10_000, 30_000, 100_000],
        1.0,
        EpsilonSchedule::Plain,
        PredictorMode::Degenerate,
        &VolumeOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let slope = study.slope.ok_or("no slope")?;
    check((slope - 1.5).abs() <= 0.15, || format!("slope {slope:.3}"))?;
    // the grid result cross-checked by Monte Carlo at the smallest N
    let p = LevelSetProblem::new(1_000, &[1_000, 0], 0.0).map_err(|e| e.to_string())?;
    let grid = superlevel_volume_exact(&p).map_err(|e| e.to_string())?.volume;
    let mc = toric_mellin::distribution::superlevel_volume_mc(&p, 1 << 20, 7).map_err(|e| e.to_string())?;
    let se = mc.stderr.unwrap_or(0.0);
    check((mc.volume - grid).abs() <= 3.0 * se, || format!("grid {grid} vs MC {} ± {se}", mc.volume))?;
    Ok(format!("exponent {slope:.3} (target 1.5)"))
}

fn ac8() -> Outcome {
    let n = 100_000u64;
    let nf = n as f64;
    let gamma = gamma_constant(&[1.0]).map_err(|e| e.to_string())?;
    let t = (-gamma - 1.0).exp();
    let study =
        scaling_study(&[1.0], &[n], t, EpsilonSchedule::Power, PredictorMode::Refined, &VolumeOptions::default())
            .map_err(|e| e.to_string())?;
    let row = &study.rows[0];
    let eps = row.epsilon.ok_or("no ε")?;
    check((eps - 1.0 / nf).abs() < 1e-15, || format!("ε = {eps}"))?;
    let expected = PI * unit_ball_volume(1) * (2.0 * eps).sqrt();
    check((row.report.predicted - expected).abs() < 1e-12 * expected, || "predictor formula".into())?;
    let power_ratio = row.report.ratio;
    check((power_ratio - 1.0).abs() <= 0.15, || format!("power ratio {power_ratio}"))?;
    let invalid = scaling_study(
        &[1.0],
        &[n],
        (-gamma).exp(),
        EpsilonSchedule::Power,
        PredictorMode::Refined,
        &VolumeOptions::default(),
    );
    check(matches!(invalid, Err(Error::OutsideValidity(_))), || "no validity error at ln t = -γ".into())?;

    let study =
        scaling_study(&[1.0], &[n], 1.0, EpsilonSchedule::LogN, PredictorMode::Refined, &VolumeOptions::default())
            .map_err(|e| e.to_string())?;
    let row = &study.rows[0];
    let derived = row.report.ratio;
    let p = LevelSetProblem::new(n, &row.k, 0.0).map_err(|e| e.to_string())?;
    let printed =
        row.report.exact / refined_prediction(&p, logn_epsilon_doubled(nf, 1.0, 1)).map_err(|e| e.to_string())?;
    check((derived - 1.0).abs() <= 0.15, || format!("derived log N schedule ratio {derived}"))?;
    check((printed - 1.0).abs() > 0.15, || format!("doubled schedule also fits: {printed}"))?;
    Ok(format!("power ratio {power_ratio:.4}; log N schedule: derived ratio {derived:.4}, doubled ratio {printed:.4}"))
}

fn ac9() -> Outcome {
    let mut worst_lc = 0.0f64;
    for n in [1u64, 5, 20] {
        for k in 0..=10u64 {
            let lc = layer_cake_check(n, &[k], 200).map_err(|e| e.to_string())?;
            let gap = (lc.report.exact - 1.0).abs();
            worst_lc = worst_lc.max(gap);
            check(gap <= 1e-3, || format!("layer cake N = {n}, k = {k}: {}", lc.report.exact))?;
        }
    }
    // density in r = |z|² against a Laguerre rule in u = N r, in log space
    let mut worst_density = 0.0f64;
    for (n, k) in [(1u64, 0u64), (10, 10), (7, 3), (200, 150)] {
        let rule = gauss_laguerre_general(120, 0.0).map_err(|e| e.to_string())?;
        let nf = n as f64;
        let mut total = 0.0;
        for (&u, &w) in rule.nodes().iter().zip(&rule.weights()) {
            let z = [Complex64::new((u / nf).sqrt(), 0.0)];
            let dens = state_density(n, &[k], &z).map_err(|e| e.to_string())?;
            if dens > 0.0 && w > 0.0 {
                total += (w.ln() + u + dens.ln()).exp() * PI / nf;
            }
        }
        worst_density = worst_density.max((total - 1.0).abs());
        check((total - 1.0).abs() <= 1e-9, || format!("density N = {n}, k = {k}: {total}"))?;
    }
    let one = TestFunction::constant(2, 1);
    for x in [[0.0, 0.0], [0.5, 2.0], [3.0, 0.1]] {
        for n in [1.0, 10.0, 1000.0] {
            let v = transform_quadrature(&one, &x, n).map_err(|e| e.to_string())?.value;
            check((v - 1.0).abs() <= 1e-11, || format!("A_N 1 = {v} at x = {x:?}, N = {n}"))?;
        }
    }
    for n in [1u64, 10, 1000] {
        let t = 0.1;
        let p = LevelSetProblem::with_t(n, &[0], t).map_err(|e| e.to_string())?;
        let v = superlevel_volume_exact(&p).map_err(|e| e.to_string())?.volume;
        let nf = n as f64;
        let closed = PI * (nf / (PI * t)).ln() / nf;
        check((v - closed).abs() <= 1e-12, || format!("Gaussian branch N = {n}: {v} vs {closed}"))?;
    }
    Ok(format!("layer cake within {worst_lc:.1e}, density mass within {worst_density:.1e}"))
}

fn run_cli(dir: &Path, args: &[&str], threads: &str) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_toric-mellin"))
        .current_dir(dir)
        .env("TORIC_MELLIN_THREADS", threads)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn ac10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    std::fs::write(dir.path().join("a4.json"), "[0.25, 0.25, 0.25, 0.25]").map_err(|e| e.to_string())?;
    std::fs::write(dir.path().join("a1.json"), "[1.0]").map_err(|e| e.to_string())?;
    std::fs::write(dir.path().join("bump.json"), r#"{"kind": "gaussian", "center": [0.5, 0.5], "width": 0.3}"#)
        .map_err(|e| e.to_string())?;
    std::fs::write(dir.path().join("unit2.json"), r#"{"d": 2, "q": [1, 1], "alpha": 1}"#).map_err(|e| e.to_string())?;
    let invocations: [&[&str]; 4] = [
        &[
            "distlaw",
            "--weights-direction",
            "a4.json",
            "--N-list",
            "40,80",
            "--t",
            "0.5,1",
            "--samples",
            "200000",
            "--seed",
            "11",
        ],
        &["distlaw", "--weights-direction", "a1.json", "--N-list", "200,1000", "--t", "1", "--format", "json"],
        &["spectral", "--weights", "unit2.json", "--function", "bump.json", "--N-list", "3,9", "--em-order", "1"],
        &["gk", "--max-k", "8"],
    ];
    for args in invocations {
        let first = run_cli(dir.path(), args, "1")?;
        let second = run_cli(dir.path(), args, "4")?;
        let third = run_cli(dir.path(), args, "4")?;
        check(first == second && second == third, || format!("{args:?} output differs between runs"))?;
        check(!first.is_empty(), || format!("{args:?} produced no output"))?;
    }
    Ok(format!("{} invocations byte-identical across runs and thread counts", invocations.len()))
}

fn main() {
    let criteria: [(&str, &str, fn() -> Outcome); 10] = [
        ("AC1", "g_k degree bound and generating function", ac1),
        ("AC2", "transform exactness on monomials", ac2),
        ("AC3", "series expansion order", ac3),
        ("AC4", "Euler-Maclaurin corrected sums", ac4),
        ("AC5", "spectral measure consistency", ac5),
        ("AC6", "distribution law in one dimension", ac6),
        ("AC7", "degenerate distribution law", ac7),
        ("AC8", "rescaled distribution laws", ac8),
        ("AC9", "normalization suite", ac9),
        ("AC10", "CLI determinism", ac10),
    ];
    let mut failed = 0;
    for (id, name, f) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("{id} PASS {name}: {detail} [{elapsed:.1?}]"),
            Err(detail) => {
                failed += 1;
                println!("{id} FAIL {name}: {detail} [{elapsed:.1?}]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
