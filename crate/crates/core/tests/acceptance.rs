//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Run with `cargo test -p fracwos-core --test acceptance -- --nocapture`
//! (output goes to stdout either way since this target has no harness).

use std::time::Instant;

use fracwos_core::engine::Walker;
use fracwos_core::geometry::random_interior_points;
use fracwos_core::kernels::{exit_radius_cdf, interior_radial_weight};
use fracwos_core::sampling::{sample_exit_radius, sample_interior_radius};
use fracwos_core::specfun::{
    self, gauss_legendre, hyp1f1, hyp2f1, inv_reg_inc_beta, reg_inc_beta, BetaParams,
};
use fracwos_core::*;

const ALPHAS: [f64; 4] = [0.4, 0.8, 1.2, 1.6];

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn order(a: f64) -> FracOrder {
    FracOrder::new(a).unwrap()
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Runs `case` at `points` and counts points with |mean - exact| <= 3·stderr.
fn reproduce(case: &ExactCase, points: &[Vec<f64>], num_paths: usize, seed: u64) -> (usize, f64) {
    let k = make_constants(case.n, case.alpha, 64).unwrap();
    let cfg = WalkConfig::new(1e-6, num_paths, seed);
    let problem = case.problem();
    let exact = case.u_exact.as_ref().expect("case has an exact solution");
    let mut hits = 0;
    let mut worst_z: f64 = 0.0;
    for x in points {
        let e = estimate_point(&problem, &cfg, &k, x).unwrap();
        let d = (e.mean - exact.eval(x)).abs();
        let z = d / e.stderr;
        worst_z = worst_z.max(z);
        if d <= 3.0 * e.stderr {
            hits += 1;
        }
    }
    (hits, worst_z)
}

fn exact_reproduction(id: CaseId, domain: &dyn Domain, point_seed: u64, limit_s: f64) -> Outcome {
    let t = Instant::now();
    let points = random_interior_points(domain, 10, point_seed, 1e-4).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for a in ALPHAS {
        let case = id.build(order(a), None).unwrap();
        let (hits, z) = reproduce(&case, &points, 100_000, 11);
        pass &= hits >= 9;
        parts.push(format!("α={a}: {hits}/10 (max z {z:.2})"));
    }
    let secs = t.elapsed().as_secs_f64();
    if limit_s > 0.0 {
        pass &= secs <= limit_s;
    }
    Outcome { pass, detail: format!("{}; {secs:.1}s", parts.join(", ")) }
}

fn criterion_1() -> Outcome {
    exact_reproduction(CaseId::Disk, &BallDomain::unit(2), 101, 120.0)
}

fn criterion_2() -> Outcome {
    exact_reproduction(CaseId::DiskDecay, &BallDomain::unit(2), 102, 120.0)
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for a in [0.8, 1.6] {
        let case = CaseId::BallConstant.build(order(a), Some(10)).unwrap();
        let k = make_constants(10, case.alpha, 64).unwrap();
        let cfg = WalkConfig::new(1e-6, 100_000, 13);
        let problem = case.problem();
        // From the center the first ball is the whole domain, so every path
        // scores ζ_unit·f exactly and stderr is zero up to rounding.
        let x0 = vec![0.0; 10];
        let e = estimate_point(&problem, &cfg, &k, &x0).unwrap();
        let tol = (3.0 * e.stderr).max(1e-12);
        let ok0 = (e.mean - 1.0).abs() <= tol;
        let mut x1 = vec![0.0; 10];
        x1[0] = 0.5;
        let e1 = estimate_point(&problem, &cfg, &k, &x1).unwrap();
        let u1 = case.u_exact.as_ref().unwrap().eval(&x1);
        let ok1 = (e1.mean - u1).abs() <= 3.0 * e1.stderr;
        pass &= ok0 && ok1;
        parts.push(format!(
            "α={a}: x=0 mean {:.12} (|err| {:.1e}), x=0.5e₁ z {:.2}",
            e.mean,
            (e.mean - 1.0).abs(),
            (e1.mean - u1).abs() / e1.stderr
        ));
    }
    let mut worst: f64 = 0.0;
    for n in 2..=10 {
        for i in 1..39 {
            let a = 0.05 * i as f64;
            if a >= n as f64 {
                continue;
            }
            let k = make_constants(n, order(a), 64).unwrap();
            let f = CaseId::BallConstant.build(order(a), Some(n)).unwrap().f.as_constant().unwrap();
            worst = worst.max((k.zeta_unit * f - 1.0).abs());
        }
    }
    pass &= worst <= 1e-9;
    let secs = t.elapsed().as_secs_f64();
    pass &= secs <= 300.0;
    Outcome {
        pass,
        detail: format!("{}; max |ζ_unit·f - 1| = {worst:.1e} over n=2..10; {secs:.1}s", parts.join(", ")),
    }
}

fn criterion_4() -> Outcome {
    exact_reproduction(CaseId::LShape, &PolygonDomain::l_shape(), 104, 0.0)
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let points = random_interior_points(&BallDomain::unit(2), 10, 105, 1e-4).unwrap();
    let ladder = [100usize, 1_000, 10_000, 100_000];
    let mut pass = true;
    let mut parts = Vec::new();
    for a in ALPHAS {
        let case = CaseId::Disk.build(order(a), None).unwrap();
        let k = make_constants(2, case.alpha, 64).unwrap();
        let problem = case.problem();
        let exact: Vec<f64> = points.iter().map(|x| case.u_exact.as_ref().unwrap().eval(x)).collect();
        let mut log_n = Vec::new();
        let mut log_err = Vec::new();
        for (level, &n_paths) in ladder.iter().enumerate() {
            let cfg = WalkConfig::new(1e-6, n_paths, 500 + level as u64);
            let est: Vec<f64> =
                points.iter().map(|x| estimate_point(&problem, &cfg, &k, x).unwrap().mean).collect();
            let (scaled_err, _) = error_metric(&est, &exact).unwrap();
            log_n.push((n_paths as f64).ln());
            log_err.push(scaled_err.ln());
        }
        let s = slope(&log_n, &log_err);
        pass &= (-0.65..=-0.35).contains(&s);
        parts.push(format!("α={a}: slope {s:.3}"));
    }
    let secs = t.elapsed().as_secs_f64();
    pass &= secs <= 300.0;
    Outcome { pass, detail: format!("{}; {secs:.1}s", parts.join(", ")) }
}

fn ks_from_cdf(sorted_cdf: &[f64]) -> f64 {
    let n = sorted_cdf.len() as f64;
    sorted_cdf
        .iter()
        .enumerate()
        .map(|(i, &f)| ((i + 1) as f64 / n - f).max(f - i as f64 / n))
        .fold(0.0, f64::max)
}

/// CDF of the interior radius at each of the sorted samples, by integrating
/// the density `s^{α-1} w(s) / Z` between consecutive samples in `v = s^α`.
fn interior_cdf_at(sorted: &[f64], n: usize, alpha: FracOrder) -> Vec<f64> {
    let a = alpha.value();
    let nf = n as f64;
    let z = specfun::beta(nf / 2.0, a / 2.0).unwrap() / a;
    let w0 = specfun::beta((nf - a) / 2.0, a / 2.0).unwrap();
    let rule = gauss_legendre(6);
    let w = |v: f64| interior_radial_weight(v.powf(1.0 / a), n, alpha).unwrap();
    let mut acc = w0 * sorted[0].powf(a) / a;
    let mut out = Vec::with_capacity(sorted.len());
    out.push(acc / z);
    for pair in sorted.windows(2) {
        let (lo, hi) = (pair[0].powf(a), pair[1].powf(a));
        if hi > lo {
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            acc += half * rule.integrate(|u| w(mid + half * u)) / a;
        }
        out.push(acc / z);
    }
    out
}

fn criterion_6() -> Outcome {
    let draws = 100_000;
    let crit = 1.63 / (draws as f64).sqrt();
    let mut pass = true;
    let mut worst_exit: f64 = 0.0;
    let mut worst_int: f64 = 0.0;
    for (ni, n) in [2usize, 3, 10].into_iter().enumerate() {
        let r = [1.0, 0.37, 2.5][ni];
        for (ai, a) in [0.4, 1.0, 1.6].into_iter().enumerate() {
            let alpha = order(a);
            let mut rng = RngStream::new(600 + ni as u64, ai as u64);
            let mut exits: Vec<f64> =
                (0..draws).map(|_| sample_exit_radius(r, alpha, &mut rng).unwrap()).collect();
            exits.sort_by(f64::total_cmp);
            let cdf: Vec<f64> = exits.iter().map(|&g| exit_radius_cdf(g, r, alpha).unwrap()).collect();
            let d_exit = ks_from_cdf(&cdf);

            let mut inner: Vec<f64> =
                (0..draws).map(|_| sample_interior_radius(n, alpha, &mut rng).unwrap()).collect();
            inner.sort_by(f64::total_cmp);
            let d_int = ks_from_cdf(&interior_cdf_at(&inner, n, alpha));

            worst_exit = worst_exit.max(d_exit);
            worst_int = worst_int.max(d_int);
            pass &= d_exit < crit && d_int < crit;
        }
    }
    let mut rng = RngStream::new(606, 0);
    let mut med: Vec<f64> =
        (0..1_000_000).map(|_| sample_exit_radius(1.0, order(1.0), &mut rng).unwrap()).collect();
    let mid = med.len() / 2;
    let median = *med.select_nth_unstable_by(mid, f64::total_cmp).1;
    let rel = (median / 2f64.sqrt() - 1.0).abs();
    pass &= rel <= 5e-3;
    Outcome {
        pass,
        detail: format!(
            "max KS D exit {worst_exit:.2e}, interior {worst_int:.2e} (1% critical {crit:.2e}); α=1 median/√2 - 1 = {rel:.1e}"
        ),
    }
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let ball = BallGeom::unit(2);
    let points = random_interior_points(&BallDomain::unit(2), 20, 107, 0.1).unwrap();
    let mut pass = true;
    let mut worst_exact: f64 = 0.0;
    let mut parts = Vec::new();
    for id in [CaseId::Disk, CaseId::DiskDecay] {
        for a in [0.4, 1.0, 1.6] {
            let case = id.build(order(a), None).unwrap();
            let k = make_constants(2, case.alpha, 64).unwrap();
            let cfg = WalkConfig::new(1e-6, 20_000, 17);
            let problem = case.problem();
            let mut hits = 0;
            for x in &points {
                let q = ball_solution_quadrature(&ball, case.alpha, &case.f, &case.g, x, 16, 16).unwrap();
                worst_exact = worst_exact.max((q - case.u_exact.as_ref().unwrap().eval(x)).abs());
                let e = estimate_point(&problem, &cfg, &k, x).unwrap();
                if (e.mean - q).abs() <= 3.0 * e.stderr {
                    hits += 1;
                }
            }
            pass &= hits >= 19;
            parts.push(format!("{id} α={a}: {hits}/20"));
        }
    }
    pass &= worst_exact <= 1e-6;

    // Constant source on the disk: the registered (1-|x|²)^{α/2} form against
    // the (1-|x|)^{α/2} variant.
    let mut worst_sq: f64 = 0.0;
    let mut min_gap = f64::INFINITY;
    for a in [0.4, 1.0, 1.6] {
        let case = CaseId::BallConstant.build(order(a), Some(2)).unwrap();
        for x in &points {
            let q = ball_solution_quadrature(&ball, case.alpha, &case.f, &case.g, x, 16, 16).unwrap();
            let r2 = x[0] * x[0] + x[1] * x[1];
            worst_sq = worst_sq.max((q - (1.0 - r2).powf(a / 2.0)).abs());
            if r2 > 0.01 {
                min_gap = min_gap.min((q - (1.0 - r2.sqrt()).powf(a / 2.0)).abs());
            }
        }
    }
    pass &= worst_sq <= 1e-6 && min_gap > 1e-3;
    Outcome {
        pass,
        detail: format!(
            "max |oracle - exact| {worst_exact:.1e}; MC agreement {}; constant source: |oracle - (1-|x|²)^(α/2)| ≤ {worst_sq:.1e}, |oracle - (1-|x|)^(α/2)| ≥ {min_gap:.2e}; {:.1}s",
            parts.join(", "),
            t.elapsed().as_secs_f64()
        ),
    }
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let radii = [0.0, 0.25, 0.5, 0.75, 0.9];
    let epsilons = [1e-2, 1e-4, 1e-6];
    let mut pass = true;
    let mut bound_ok = true;
    let mut radius_viol = Vec::new();
    let mut alpha_viol = Vec::new();
    let mut max_ratio: f64 = 0.0;
    for n in [2usize, 3, 10] {
        // steps[ε][α][radius]
        let mut steps = vec![vec![vec![0.0; radii.len()]; ALPHAS.len()]; epsilons.len()];
        for (ai, &a) in ALPHAS.iter().enumerate() {
            let alpha = order(a);
            let case = CaseId::BallConstant.build(alpha, Some(n)).unwrap();
            let problem = case.problem();
            let k = make_constants(n, alpha, 64).unwrap();
            for (ei, &eps) in epsilons.iter().enumerate() {
                let bound = step_bound(n, alpha, 1.0, eps).unwrap().bound;
                let cfg = WalkConfig::new(eps, 20_000, 18);
                for (ri, &r) in radii.iter().enumerate() {
                    let mut x0 = vec![0.0; n];
                    x0[0] = r;
                    let m = estimate_point(&problem, &cfg, &k, &x0).unwrap().mean_steps;
                    steps[ei][ai][ri] = m;
                    max_ratio = max_ratio.max(m / bound);
                    bound_ok &= m <= bound;
                }
            }
        }
        for (ei, &eps) in epsilons.iter().enumerate() {
            for ai in 0..ALPHAS.len() {
                for ri in 1..radii.len() {
                    // Starts within a few shell widths of the boundary stop
                    // early, which breaks the radial trend by construction.
                    if 1.0 - radii[ri] < 10.0 * eps {
                        continue;
                    }
                    if steps[ei][ai][ri] < steps[ei][ai][ri - 1] {
                        radius_viol.push(format!("n={n} ε={eps:e} α={} |x0|={}", ALPHAS[ai], radii[ri]));
                    }
                }
            }
            for ri in 0..radii.len() {
                for ai in 1..ALPHAS.len() {
                    if steps[ei][ai][ri] < steps[ei][ai - 1][ri] {
                        alpha_viol.push(format!("n={n} ε={eps:e} α={} |x0|={}", ALPHAS[ai], radii[ri]));
                    }
                }
            }
        }
    }
    pass &= bound_ok && radius_viol.is_empty() && alpha_viol.is_empty();
    Outcome {
        pass,
        detail: format!(
            "bound holds: {bound_ok} (max mean/bound {max_ratio:.1e}); radial violations {:?}; α violations {:?}; {:.1}s",
            radius_viol,
            alpha_viol,
            t.elapsed().as_secs_f64()
        ),
    }
}

/// Bias of the ε-shell estimate relative to a very thin shell, estimated from
/// paired walks that share their random streams.
fn paired_bias(a: f64, x0: &[f64], epsilons: &[f64], eps_ref: f64, paths: u64) -> Vec<(f64, f64)> {
    use rayon::prelude::*;
    let case = CaseId::Disk.build(order(a), None).unwrap();
    let problem = case.problem();
    let k = make_constants(2, case.alpha, 64).unwrap();
    let cfgs: Vec<WalkConfig> = epsilons
        .iter()
        .chain(std::iter::once(&eps_ref))
        .map(|&e| WalkConfig::new(e, 1, 19))
        .collect();
    let walkers: Vec<Walker> = cfgs.iter().map(|c| Walker::new(&problem, c, &k).unwrap()).collect();
    let m = epsilons.len();
    let blocks: Vec<Vec<stats::Welford>> = (0..paths.div_ceil(1024))
        .into_par_iter()
        .map(|b| {
            let mut acc = vec![stats::Welford::default(); m];
            for idx in b * 1024..((b + 1) * 1024).min(paths) {
                let reference = walkers[m].walk(x0, &mut RngStream::new(19, idx)).unwrap().score;
                for (j, w) in walkers[..m].iter().enumerate() {
                    let s = w.walk(x0, &mut RngStream::new(19, idx)).unwrap().score;
                    acc[j].push(s - reference);
                }
            }
            acc
        })
        .collect();
    let mut total = vec![stats::Welford::default(); m];
    for b in &blocks {
        for (t, w) in total.iter_mut().zip(b) {
            t.merge(w);
        }
    }
    total.iter().map(|w| (w.mean, w.stderr())).collect()
}

fn criterion_9() -> Outcome {
    let t = Instant::now();
    let epsilons = [1e-1, 1e-2, 1e-3];
    let log_eps: Vec<f64> = epsilons.iter().map(|e: &f64| e.ln()).collect();
    let mut pass = true;
    let mut parts = Vec::new();

    // At the center the first ball is the whole disk and every walk leaves
    // it in one jump, so the bias vanishes identically for every ε.
    let center = paired_bias(0.8, &[0.0, 0.0], &epsilons, 1e-9, 10_000);
    let center_max = center.iter().map(|b| b.0.abs()).fold(0.0, f64::max);
    parts.push(format!("x0=0: max |bias| {center_max:.1e}"));

    // Off-center start, so the walk actually reaches the shell.
    let x0 = [0.5, 0.0];
    for a in ALPHAS {
        let bias = paired_bias(a, &x0, &epsilons, 1e-9, 1_000_000);
        let mags: Vec<f64> = bias.iter().map(|b| b.0.abs()).collect();
        let monotone = mags.windows(2).all(|w| w[1] < w[0]);
        let s = slope(&log_eps, &mags.iter().map(|m| m.ln()).collect::<Vec<_>>());
        let in_band = (s - a).abs() <= 0.3;
        pass &= monotone && in_band;
        parts.push(format!(
            "α={a}: bias {} slope {s:.3} (band {:.1}..{:.1}){}{}",
            bias.iter().map(|b| format!("{:.2e}±{:.0e}", b.0, b.1)).collect::<Vec<_>>().join("/"),
            a - 0.3,
            a + 0.3,
            if monotone { "" } else { " NOT MONOTONE" },
            if in_band { "" } else { " OUT OF BAND" }
        ));
    }
    Outcome { pass, detail: format!("{}; {:.1}s", parts.join("; "), t.elapsed().as_secs_f64()) }
}

fn fixture_rows(text: &str) -> impl Iterator<Item = Vec<f64>> + '_ {
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(|v| v.trim().parse::<f64>().unwrap()).collect())
}

fn criterion_10() -> Outcome {
    let shapes = [0.05, 0.2, 0.5, 1.0, 2.5, 7.0, 30.0];
    let mut worst_u: f64 = 0.0;
    let mut worst_x: f64 = 0.0;
    let mut count = 0;
    for &a in &shapes {
        for &b in &shapes {
            let p = BetaParams::new(a, b).unwrap();
            for i in 1..100 {
                let u = i as f64 / 100.0;
                let x = inv_reg_inc_beta(u, p).unwrap();
                // Near x = 1 with small b, I moves by more than 1e-10 between
                // adjacent doubles; only the excess over that step counts.
                let ix = reg_inc_beta(x, p).unwrap();
                let step = [x.next_down(), x.next_up()]
                    .iter()
                    .filter(|&&y| y > 0.0 && y < 1.0)
                    .map(|&y| (reg_inc_beta(y, p).unwrap() - ix).abs())
                    .fold(0.0, f64::max);
                worst_u = worst_u.max((ix - u).abs() - step);
                let x = i as f64 / 100.0;
                let v = reg_inc_beta(x, p).unwrap();
                // The inverse can only recover x to about ulp(v)/density;
                // levels where that exceeds 1e-11 are ill-posed, not wrong.
                if v > 0.0 && v < 1.0 {
                    let ln_dens = x.ln() * (a - 1.0) + (1.0 - x).ln() * (b - 1.0)
                        - specfun::ln_beta(a, b).unwrap();
                    if f64::EPSILON * v <= 1e-11 * ln_dens.exp() {
                        worst_x = worst_x.max((inv_reg_inc_beta(v, p).unwrap() - x).abs());
                    }
                }
                count += 1;
            }
        }
    }
    let mut worst_2f1: f64 = 0.0;
    for r in fixture_rows(include_str!("fixtures/hyp2f1_reference.csv")) {
        worst_2f1 = worst_2f1.max((hyp2f1(r[0], r[1], r[2], r[3]).unwrap() - r[4]).abs() / r[4].abs());
    }
    let mut worst_1f1: f64 = 0.0;
    for r in fixture_rows(include_str!("fixtures/hyp1f1_reference.csv")) {
        worst_1f1 = worst_1f1.max((hyp1f1(r[0], r[1], r[2]).unwrap() - r[3]).abs() / r[3].abs());
    }
    let pass = worst_u <= 1e-10 && worst_x <= 1e-10 && worst_2f1 <= 1e-10 && worst_1f1 <= 1e-10;
    Outcome {
        pass,
        detail: format!(
            "{count} Beta round trips: max |I(I⁻¹(u)) - u| beyond one ulp of x {worst_u:.1e}, max |I⁻¹(I(x)) - x| {worst_x:.1e}; ₂F₁ max rel {worst_2f1:.1e}; ₁F₁ max rel {worst_1f1:.1e}"
        ),
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("disk, homogeneous exterior data", criterion_1),
        ("disk, heavy-tailed exterior data", criterion_2),
        ("ten-dimensional ball, constant source", criterion_3),
        ("L-shaped domain", criterion_4),
        ("Monte Carlo convergence rate", criterion_5),
        ("sampler laws", criterion_6),
        ("quadrature oracle", criterion_7),
        ("step counts", criterion_8),
        ("shell-width bias", criterion_9),
        ("special functions", criterion_10),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let out = run();
        if !out.pass {
            failed += 1;
        }
        println!("{} criterion {:>2} ({name}): {}", if out.pass { "PASS" } else { "FAIL" }, i + 1, out.detail);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
