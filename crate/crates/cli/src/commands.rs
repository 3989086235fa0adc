//! The five subcommands. Each returns the paths it wrote.

use std::path::PathBuf;
use std::time::Instant;

use fracwos_core::engine::Field;
use fracwos_core::{
    error_metric, estimate_field, kernels, make_constants, step_bound, Domain, Estimate, FracOrder,
    KernelConstants,
};
use serde_json::json;

use crate::config::{Resolved, RunConfig};
use crate::output::{coord_header, coords, num, prefixed, write_file, write_json, Csv};
use crate::CliError;

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn constants_for(r: &Resolved, cfg: &RunConfig) -> Result<KernelConstants, CliError> {
    make_constants(r.problem.n, r.problem.alpha, cfg.walk.to_config().zeta_quad_points).map_err(runtime)
}

/// Start points must lie in `Ω` outside the absorbing shell.
fn check_starts(domain: &dyn Domain, points: &[Vec<f64>], epsilon: f64) -> Result<(), CliError> {
    for p in points {
        if !domain.contains(p) || domain.boundary_distance(p) < epsilon {
            return Err(CliError::Config(format!(
                "point {p:?} is not in the domain at distance >= epsilon from its boundary"
            )));
        }
    }
    Ok(())
}

fn estimates(
    r: &Resolved,
    cfg: &RunConfig,
    k: &KernelConstants,
    points: &[Vec<f64>],
    num_paths: usize,
    seed: u64,
) -> Result<Vec<Estimate>, CliError> {
    let mut walk = cfg.walk.to_config();
    walk.num_paths = num_paths;
    walk.seed = seed;
    estimate_field(&r.problem, &walk, k, points).into_iter().collect::<Result<_, _>>().map_err(runtime)
}

fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let n = xs.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn error_summary(exact: &Field, points: &[Vec<f64>], est: &[Estimate]) -> Result<serde_json::Value, CliError> {
    let truth: Vec<f64> = points.iter().map(|p| exact.eval(p)).collect();
    let means: Vec<f64> = est.iter().map(|e| e.mean).collect();
    let (scaled_l2_error, rmse) = error_metric(&means, &truth).map_err(runtime)?;
    let max_abs = means.iter().zip(&truth).map(|(m, t)| (m - t).abs()).fold(0.0, f64::max);
    let within = est.iter().zip(&truth).filter(|(e, t)| (e.mean - *t).abs() <= 3.0 * e.stderr).count();
    Ok(json!({
        "scaled_l2_error": scaled_l2_error,
        "rmse": rmse,
        "max_abs_error": max_abs,
        "within_3_stderr": within,
        "points": points.len(),
    }))
}

pub fn solve(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let start = Instant::now();
    cfg.validate()?;
    let alpha = cfg.single_order()?;
    let r = cfg.resolve(alpha)?;
    let points = cfg.points(r.problem.domain.as_ref())?;
    check_starts(r.problem.domain.as_ref(), &points, cfg.walk.epsilon)?;
    let k = constants_for(&r, cfg)?;
    let est = estimates(&r, cfg, &k, &points, cfg.walk.num_paths, cfg.walk.seed)?;

    let mut header = coord_header(r.problem.n);
    header.extend(["mean", "stderr", "steps_mean", "n_paths"].map(String::from));
    let mut csv = Csv::new(&header);
    for (p, e) in points.iter().zip(&est) {
        let mut row = coords(p);
        row.extend([num(e.mean), num(e.stderr), num(e.mean_steps), e.n_paths.to_string()]);
        csv.row(&row);
    }
    let csv_path = prefixed(&cfg.output, "estimates.csv");
    write_file(&csv_path, csv.as_str())?;

    let errors = match &r.exact {
        Some(u) => error_summary(u, &points, &est)?,
        None => serde_json::Value::Null,
    };
    let summary = json!({
        "command": "solve",
        "case": r.name,
        "alpha": alpha.value(),
        "config": cfg,
        "threads": rayon::current_num_threads(),
        "failed_paths": est.iter().map(|e| e.failed_paths).sum::<usize>(),
        "errors": errors,
        "wall_time_s": start.elapsed().as_secs_f64(),
    });
    let json_path = prefixed(&cfg.output, "summary.json");
    write_json(&json_path, &summary)?;
    Ok(vec![csv_path, json_path])
}

pub fn convergence(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let start = Instant::now();
    cfg.validate()?;
    let ladder = cfg.ladder.clone().ok_or_else(|| CliError::Config("convergence needs a ladder".into()))?;
    if ladder.len() < 2 {
        log::warn!("a single-level ladder has no slope; reporting NaN");
    }
    let mut csv = Csv::new(&["alpha", "N", "scaled_l2_error", "rmse"].map(String::from));
    let mut per_alpha = Vec::new();
    for alpha in cfg.orders()? {
        let r = cfg.resolve(alpha)?;
        let exact = r
            .exact
            .clone()
            .ok_or_else(|| CliError::Config(format!("case {} has no exact solution", r.name)))?;
        let points = cfg.points(r.problem.domain.as_ref())?;
        check_starts(r.problem.domain.as_ref(), &points, cfg.walk.epsilon)?;
        let truth: Vec<f64> = points.iter().map(|p| exact.eval(p)).collect();
        let k = constants_for(&r, cfg)?;
        let (mut ns, mut paper, mut rmses) = (Vec::new(), Vec::new(), Vec::new());
        for (level, &n_paths) in ladder.iter().enumerate() {
            let seed = cfg.walk.seed.wrapping_add(level as u64);
            let means: Vec<f64> =
                estimates(&r, cfg, &k, &points, n_paths, seed)?.iter().map(|e| e.mean).collect();
            let (pe, rmse) = error_metric(&means, &truth).map_err(runtime)?;
            csv.row(&[num(alpha.value()), n_paths.to_string(), num(pe), num(rmse)]);
            ns.push(n_paths as f64);
            paper.push(pe);
            rmses.push(rmse);
        }
        per_alpha.push(json!({
            "alpha": alpha.value(),
            "slope_scaled_l2_error": log_slope(&ns, &paper),
            "slope_rmse": log_slope(&ns, &rmses),
        }));
    }
    let csv_path = prefixed(&cfg.output, "error_vs_N.csv");
    write_file(&csv_path, csv.as_str())?;
    let json_path = prefixed(&cfg.output, "convergence.json");
    write_json(
        &json_path,
        &json!({
            "command": "convergence",
            "config": cfg,
            "slopes": per_alpha,
            "wall_time_s": start.elapsed().as_secs_f64(),
        }),
    )?;
    Ok(vec![csv_path, json_path])
}

pub fn steps(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let start = Instant::now();
    cfg.validate()?;
    let orders = cfg.orders()?;
    let first = cfg.resolve(orders[0])?;
    let n = first.problem.n;
    let points = cfg.points(first.problem.domain.as_ref())?;
    check_starts(first.problem.domain.as_ref(), &points, cfg.walk.epsilon)?;
    let depth: Vec<f64> = points.iter().map(|p| first.problem.domain.boundary_distance(p)).collect();

    let mut header = vec!["alpha".to_string()];
    header.extend(coord_header(n));
    header.extend(["boundary_distance", "steps_mean", "n_paths", "bound"].map(String::from));
    let mut csv = Csv::new(&header);
    let mut table: Vec<Vec<f64>> = Vec::new();
    let mut per_alpha = Vec::new();
    for &alpha in &orders {
        let r = cfg.resolve(alpha)?;
        let k = constants_for(&r, cfg)?;
        let est = estimates(&r, cfg, &k, &points, cfg.walk.num_paths, cfg.walk.seed)?;
        let mut col = Vec::new();
        for ((p, e), &d) in points.iter().zip(&est).zip(&depth) {
            // The bound is stated for the largest inscribed ball around the start.
            let bound = step_bound(n, alpha, d, cfg.walk.epsilon.min(0.5 * d)).map(|b| b.bound).unwrap_or(f64::NAN);
            let mut row = vec![num(alpha.value())];
            row.extend(coords(p));
            row.extend([num(d), num(e.mean_steps), e.n_paths.to_string(), num(bound)]);
            csv.row(&row);
            col.push(e.mean_steps);
        }
        // Toward the boundary means decreasing boundary distance.
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&i, &j| depth[j].total_cmp(&depth[i]));
        let monotone = order.windows(2).all(|w| col[w[1]] >= col[w[0]]);
        if !monotone {
            log::warn!("alpha = {}: mean steps not monotone toward the boundary", alpha.value());
        }
        per_alpha.push(json!({"alpha": alpha.value(), "monotone_toward_boundary": monotone}));
        table.push(col);
    }
    let mut sorted_alpha: Vec<usize> = (0..orders.len()).collect();
    sorted_alpha.sort_by(|&i, &j| orders[i].value().total_cmp(&orders[j].value()));
    let monotone_alpha =
        (0..points.len()).all(|p| sorted_alpha.windows(2).all(|w| table[w[1]][p] >= table[w[0]][p]));
    if !monotone_alpha {
        log::warn!("mean steps not monotone in alpha at every point");
    }
    let csv_path = prefixed(&cfg.output, "steps.csv");
    write_file(&csv_path, csv.as_str())?;
    let json_path = prefixed(&cfg.output, "steps.json");
    write_json(
        &json_path,
        &json!({
            "command": "steps",
            "config": cfg,
            "per_alpha": per_alpha,
            "monotone_in_alpha": monotone_alpha,
            "wall_time_s": start.elapsed().as_secs_f64(),
        }),
    )?;
    Ok(vec![csv_path, json_path])
}

pub fn field(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    cfg.validate()?;
    let alpha = cfg.single_order()?;
    let r = cfg.resolve(alpha)?;
    let dom = r.problem.domain.clone();
    let points = cfg.points(dom.as_ref())?;
    let eps = cfg.walk.epsilon;
    let interior: Vec<Vec<f64>> =
        points.iter().filter(|p| dom.contains(p) && dom.boundary_distance(p) >= eps).cloned().collect();
    let k = constants_for(&r, cfg)?;
    let est = estimates(&r, cfg, &k, &interior, cfg.walk.num_paths, cfg.walk.seed)?;

    let mut header = coord_header(r.problem.n);
    header.extend(["value", "stderr", "region"].map(String::from));
    let mut csv = Csv::new(&header);
    let mut next = est.iter();
    for p in &points {
        let (value, stderr, region) = if !dom.contains(p) {
            (r.problem.exterior.eval_checked(p).map_err(runtime)?, 0.0, "exterior")
        } else if dom.boundary_distance(p) < eps {
            (r.problem.exterior.eval_checked(&dom.project_boundary(p)).map_err(runtime)?, 0.0, "shell")
        } else {
            let e = next.next().expect("one estimate per interior point");
            (e.mean, e.stderr, "interior")
        };
        let mut row = coords(p);
        row.extend([num(value), num(stderr), region.to_string()]);
        csv.row(&row);
    }
    let csv_path = prefixed(&cfg.output, "field.csv");
    write_file(&csv_path, csv.as_str())?;
    Ok(vec![csv_path])
}

/// Kernel constants and the step bound as a JSON object.
pub fn constants(n: usize, alpha: f64, epsilon: f64, radius: f64) -> Result<serde_json::Value, CliError> {
    let a = FracOrder::new(alpha).map_err(|e| CliError::Config(e.to_string()))?;
    let k = make_constants(n, a, 64).map_err(|e| CliError::Config(e.to_string()))?;
    let b = step_bound(n, a, radius, epsilon).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(json!({
        "n": n,
        "alpha": alpha,
        "epsilon": epsilon,
        "radius": radius,
        "c_tilde": k.c_tilde,
        "c_hat": k.c_hat,
        "zeta_unit": k.zeta_unit,
        "zeta_unit_closed_form": kernels::zeta_unit_closed_form(n, alpha),
        "p_star": b.p_star,
        "q_star": b.q_star,
        "step_bound": b.bound,
    }))
}
