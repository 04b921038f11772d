//! One function per subcommand. Each validates its config, computes, and writes its files.

use std::path::Path;

use dirac_gap::bs::{lambda_d, sweep_branches, BsOperator};
use dirac_gap::dirac::clifford_rep;
use dirac_gap::exact_1d::{alpha_star, lambda_d_1d, ALPHA_STAR_P1};
use dirac_gap::grid::{GridSpec, PotentialField};
use dirac_gap::lanczos::{extremal_eigs, LanczosOpts};
use dirac_gap::lt::{default_e_samples, lt_rhs, riesz_mean, verify_counting_chain, LtParams};
use dirac_gap::optimizer::{el_residual, lp_centroid, radiality_metric_about, run_scf, w_field, ScfConfig};
use dirac_gap::quad::{integrate_to_inf, QuadOpts};
use dirac_gap::radial::{alpha_star_rad_argmax, radial_keller_curve, shoot_ground_state, RadialSystemSpec, ShootOpts, WpExact};
use rayon::prelude::*;
use serde_json::json;

use crate::config::*;
use crate::output::{f, header, RunOutput};
use crate::{CliError, Overrides};

fn check(ok: bool, msg: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Validation(msg.to_string()))
    }
}

fn lanczos(tol: f64, seed: Option<u64>) -> LanczosOpts {
    let mut o = LanczosOpts { tol, ..LanczosOpts::default() };
    if let Some(s) = seed {
        o.seed = s;
    }
    o
}

fn shoot_opts(tol: f64) -> ShootOpts {
    let mut o = ShootOpts::default();
    o.ode.abs_tol = tol;
    o.ode.rel_tol = tol;
    o
}

fn strictly_increasing(x: &[f64]) -> bool {
    x.windows(2).all(|w| w[1] > w[0])
}

/// Reads `x1..xd, V` rows and places them on `grid`; every node must appear exactly once.
pub fn potential_from_csv(path: &Path, grid: GridSpec) -> Result<PotentialField, CliError> {
    let mut rd = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let h = grid.spacing();
    let mut vals = vec![f64::NAN; grid.len()];
    for rec in rd.records() {
        let rec = rec.map_err(|e| CliError::Validation(e.to_string()))?;
        check(rec.len() == grid.d + 1, "potential CSV needs columns x1..xd, V")?;
        let nums: Vec<f64> = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| CliError::Validation(format!("bad number {s:?}: {e}"))))
            .collect::<Result<_, _>>()?;
        let mut ix = [0usize; 3];
        for ax in 0..grid.d {
            let j = ((nums[ax] + grid.a) / h).round();
            check(j >= 0.0 && (j as usize) < grid.l && (nums[ax] - grid.coord_1d(j as usize)).abs() < 1e-6 * h, "potential CSV point is not a grid node")?;
            ix[ax] = j as usize;
        }
        vals[grid.ravel(&ix)] = nums[grid.d];
    }
    check(vals.iter().all(|v| !v.is_nan()), "potential CSV does not cover every grid node")?;
    Ok(PotentialField::new(grid, vals)?)
}

fn potential(spec: &PotentialSpec, grid: GridSpec) -> Result<PotentialField, CliError> {
    match (spec, spec.family()) {
        (PotentialSpec::Csv { path }, _) => potential_from_csv(path, grid),
        (_, Some(fam)) => Ok(fam.field(grid)?),
        _ => unreachable!(),
    }
}

pub fn keller_1d(cfg: &Keller1dConfig, out: &Path, _o: &Overrides) -> Result<RunOutput, CliError> {
    check(cfg.m > 0.0, "m must be positive")?;
    check(!cfg.p_grid.is_empty(), "p_grid is empty")?;
    check(cfg.p_grid.iter().chain(&cfg.curve_p).all(|&p| p >= 1.0 && p.is_finite()), "exponents must be >= 1")?;
    check(cfg.alpha_points >= 2, "alpha_points must be at least 2")?;
    let mut run = RunOutput::new(out, "keller-1d", cfg)?;

    let star = |p: f64| if p == 1.0 { Ok(ALPHA_STAR_P1) } else { alpha_star(p, cfg.m) };
    let stars: Vec<f64> = cfg.p_grid.iter().map(|&p| star(p)).collect::<Result<_, _>>()?;
    run.csv(
        "alpha_star.csv",
        &header(&["p", "alpha_star", "provenance"]),
        cfg.p_grid.iter().zip(&stars).map(|(&p, &a)| vec![f(p), f(a), "closed-form".into()]),
    )?;

    let mut rows = Vec::new();
    for &p in &cfg.curve_p {
        let a_star = star(p)?;
        rows.push(vec![f(p), f(0.0), f(cfg.m), "closed-form".into()]);
        for i in 1..cfg.alpha_points {
            let alpha = a_star * i as f64 / cfg.alpha_points as f64;
            rows.push(vec![f(p), f(alpha), f(lambda_d_1d(alpha, p, cfg.m)?), "closed-form".into()]);
        }
        rows.push(vec![f(p), f(a_star), f(-cfg.m), "closed-form".into()]);
    }
    run.csv("lambda_curves.csv", &header(&["p", "alpha", "Lambda_D", "provenance"]), rows)?;

    let (imax, amax) = stars.iter().enumerate().fold((0, f64::NEG_INFINITY), |b, (i, &a)| if a > b.1 { (i, a) } else { b });
    // argmax on a 1e-3 grid of [1.05, 3]
    let (pmax, _) = (0..=1950).map(|i| 1.05 + 1e-3 * i as f64).try_fold((0.0, f64::NEG_INFINITY), |b, p| {
        let a = alpha_star(p, cfg.m)?;
        Ok::<_, dirac_gap::Error>(if a > b.1 { (p, a) } else { b })
    })?;
    run.summary(json!({
        "argmax_p": pmax,
        "argmax_p_on_grid": cfg.p_grid[imax],
        "max_alpha_star": amax,
        "alpha_star_first": stars[0],
        "alpha_star_last": stars[stars.len() - 1],
    }))?;
    Ok(run)
}

pub fn bs_spectrum(cfg: &BsSpectrumConfig, out: &Path, o: &Overrides) -> Result<RunOutput, CliError> {
    let grid = GridSpec::new(cfg.d, cfg.a, cfg.l)?;
    let rep = clifford_rep(cfg.d)?;
    check(cfg.m > 0.0, "m must be positive")?;
    check(cfg.branches >= 1, "branches must be positive")?;
    check(!cfg.lambda_grid.is_empty() && strictly_increasing(&cfg.lambda_grid), "lambda_grid must be nonempty and strictly increasing")?;
    check(cfg.lambda_grid.iter().all(|l| l.abs() < cfg.m), "lambda_grid must lie in (-m, m)")?;
    check(cfg.schrodinger_lambda_grid.iter().all(|&l| l < 0.0), "schrodinger_lambda_grid must be negative")?;
    check(cfg.crossing_tol > 0.0, "crossing_tol must be positive")?;
    let v = potential(&cfg.potential, grid)?;
    let opts = lanczos(o.tol.unwrap_or(cfg.tol), o.seed);
    let mut run = RunOutput::new(out, "bs-spectrum", cfg)?;
    let k = cfg.branches;

    let curve = sweep_branches(&rep, &v, cfg.m, &cfg.lambda_grid, k, cfg.crossing_tol, &opts)?;
    let mut cols = vec!["lambda".to_string()];
    cols.extend((1..=k).map(|j| format!("mu_{j}")));
    cols.extend((1..=k).map(|j| format!("nu_{j}")));
    run.csv(
        "dirac_branches.csv",
        &cols,
        (0..curve.lambdas.len()).map(|i| {
            let mut r = vec![f(curve.lambdas[i])];
            r.extend(curve.top[i].iter().chain(&curve.bottom[i]).map(|&x| f(x)));
            r
        }),
    )?;

    let schro: Vec<Vec<f64>> = cfg
        .schrodinger_lambda_grid
        .par_iter()
        .map(|&lam| {
            let op = BsOperator::schrodinger(&v, lam)?;
            Ok(extremal_eigs(&op, k, 0, &opts, &[])?.top)
        })
        .collect::<Result<Vec<_>, dirac_gap::Error>>()?;
    let mut scols = vec!["lambda".to_string()];
    scols.extend((1..=k).map(|j| format!("mu_{j}")));
    run.csv(
        "schrodinger_branches.csv",
        &scols,
        cfg.schrodinger_lambda_grid.iter().zip(&schro).map(|(&l, r)| {
            let mut row = vec![f(l)];
            row.extend(r.iter().map(|&x| f(x)));
            row
        }),
    )?;
    let schro_min = schro.iter().flatten().copied().fold(f64::INFINITY, f64::min);

    let ld = lambda_d(&rep, &v, cfg.m, cfg.crossing_tol, &opts);
    let (ld_val, supercritical) = match &ld {
        Ok(x) => (json!(x), false),
        Err(dirac_gap::Error::Supercritical(_)) => (serde_json::Value::Null, true),
        Err(_) => (serde_json::Value::Null, false),
    };
    run.summary(json!({
        "crossings": curve.crossings.iter().map(|c| json!({"branch": c.branch, "lambda": c.lambda})).collect::<Vec<_>>(),
        "lambda_D": ld_val,
        "supercritical": supercritical,
        "worst_branch_decrease": curve.worst_decrease(),
        "near_degenerate": curve.near_degenerate,
        "schrodinger_min_branch_value": schro_min,
    }))?;
    ld?;
    Ok(run)
}

pub fn radial(cfg: &RadialConfig, out: &Path, o: &Overrides) -> Result<RunOutput, CliError> {
    let d = cfg.d;
    check((1..=3).contains(&d), "d must be 1, 2 or 3")?;
    check(cfg.m > 0.0, "m must be positive")?;
    check(cfg.argmax_tol > 0.0, "argmax_tol must be positive")?;
    let df = d as f64;
    let sector = cfg.sector.unwrap_or(if d == 3 { 1 } else { 0 });
    let p_grid = cfg.p_grid.clone().unwrap_or_else(|| (1..=40).map(|i| df + 3.0 * i as f64 / 40.0).collect());
    check(!p_grid.is_empty() && p_grid.iter().all(|&p| p > df), "p_grid must be nonempty with p > d")?;
    let curve_p = if cfg.curve_p.is_empty() { vec![df + 0.5, df + 1.0, df + 2.0] } else { cfg.curve_p.clone() };
    check(curve_p.iter().all(|&p| p > 1.0), "curve_p must be > 1")?;
    let lambdas = cfg.lambda_grid.clone().unwrap_or_else(|| {
        let (lo, hi) = (-cfg.m + 1e-3 * cfg.m, cfg.m - 1e-3 * cfg.m);
        (0..60).map(|i| lo + (hi - lo) * i as f64 / 59.0).collect()
    });
    check(lambdas.iter().all(|l| l.abs() < cfg.m), "lambda_grid must lie in (-m, m)")?;
    let opts = shoot_opts(o.tol.unwrap_or(cfg.tol));
    let mut run = RunOutput::new(out, "radial", cfg)?;

    let spec_at = |p: f64| RadialSystemSpec::new(d, sector, -cfg.m, p, cfg.m);
    let shots: Vec<f64> = p_grid
        .par_iter()
        .map(|&p| Ok(shoot_ground_state(&spec_at(p)?, &opts)?.alpha))
        .collect::<Result<_, dirac_gap::Error>>()?;
    let mut rows: Vec<Vec<String>> = p_grid.iter().zip(&shots).map(|(&p, &a)| vec![f(p), f(a), "ode".into()]).collect();
    if d == 1 {
        for &p in &p_grid {
            rows.push(vec![f(p), f(alpha_star(p, cfg.m)?), "closed-form".into()]);
        }
    }
    run.csv("alpha_star_rad.csv", &header(&["p", "alpha_star", "provenance"]), rows)?;

    let mut curves = Vec::new();
    for &p in &curve_p {
        let c = radial_keller_curve(d, sector, p, cfg.m, &lambdas, &opts)?;
        run.csv(
            &format!("keller_curve_p{p}.csv"),
            &header(&["alpha", "lambda", "provenance"]),
            c.points.iter().map(|pt| vec![f(pt.alpha), f(pt.lambda), c.provenance.to_string()]),
        )?;
        curves.push(json!({"p": p, "skipped": c.skipped, "monotonicity_violations": c.monotonicity_violations}));
    }

    let default_sector = d == 1 || sector == if d == 3 { 1 } else { 0 };
    let argmax = if default_sector {
        let (p, a) = alpha_star_rad_argmax(d, cfg.m, df + 0.01, df + 3.0, cfg.argmax_tol, &opts)?;
        json!({"p": p, "alpha_star": a})
    } else {
        serde_json::Value::Null
    };
    run.summary(json!({"sector": sector, "argmax": argmax, "curves": curves}))?;
    Ok(run)
}

pub fn scf(cfg: &ScfRunConfig, out: &Path, o: &Overrides) -> Result<RunOutput, CliError> {
    let grid = GridSpec::new(2, cfg.a, cfg.l)?;
    let rep = clifford_rep(2)?;
    check(cfg.max_iter >= 1, "max_iter must be positive")?;
    check(cfg.conv_tol > 0.0, "conv_tol must be positive")?;
    let mut c = cfg.clone();
    if let Some(s) = o.seed {
        c.seed = s;
    }
    let sc = ScfConfig {
        p: c.p,
        lambda: c.lambda,
        m: c.m,
        seed: c.seed,
        max_iter: c.max_iter,
        conv_tol: c.conv_tol,
        lanczos: lanczos(o.tol.unwrap_or(c.tol), None),
        ..ScfConfig::default()
    };
    let mut run = RunOutput::new(out, "scf", &c)?;
    let st = run_scf(&rep, grid, &sc)?;
    run.csv(
        "history.csv",
        &header(&["iter", "mu1", "step_norm", "radiality"]),
        st.history.iter().map(|h| vec![h.iter.to_string(), f(h.mu1), f(h.step_norm), f(h.radiality)]),
    )?;
    run.csv(
        "w_final.csv",
        &header(&["x1", "x2", "W"]),
        (0..grid.len()).map(|i| {
            let x = grid.point(i);
            vec![f(x[0]), f(x[1]), f(st.w.values[i])]
        }),
    )?;
    let centroid = lp_centroid(&st.w, c.p);
    let el = el_residual(&rep, &w_field(&st.w, &st.phi), c.m, c.lambda, c.p, st.mu1)?;
    run.summary(json!({
        "converged": st.converged,
        "iterations": st.iteration,
        "mu1": st.mu1,
        "radiality": st.history.last().map(|h| h.radiality),
        "centroid": centroid,
        "radiality_about_centroid": radiality_metric_about(&st.w, c.p, centroid)?,
        "el_residual": el,
        "monotonicity_break": st.monotonicity_break,
        "degenerate_iterations": st.history.iter().filter(|h| h.degenerate).map(|h| h.iter).collect::<Vec<_>>(),
    }))?;
    if let Some(k) = st.monotonicity_break {
        return Err(CliError::Convergence(format!("mu_1 decreased at iteration {k}")));
    }
    if !st.converged {
        return Err(CliError::Convergence(format!("no convergence within {} iterations", c.max_iter)));
    }
    Ok(run)
}

pub fn lt(cfg: &LtConfig, out: &Path, o: &Overrides) -> Result<RunOutput, CliError> {
    let grid = GridSpec::new(cfg.d, cfg.a, cfg.l)?;
    let rep = clifford_rep(cfg.d)?;
    let params = LtParams::new(cfg.gamma, cfg.p, cfg.m, cfg.d)?;
    let e_samples = cfg.e_samples.clone().unwrap_or_else(|| default_e_samples(cfg.m));
    check(e_samples.iter().all(|&e| e > 0.0 && e < 2.0 * cfg.m), "e_samples must lie in (0, 2m)")?;
    let v = potential(&cfg.potential, grid)?;
    let opts = lanczos(o.tol.unwrap_or(cfg.tol), o.seed);
    let mut run = RunOutput::new(out, "lt", cfg)?;

    let rm = riesz_mean(&rep, &v, cfg.m, cfg.gamma, 1e-9, &opts)?;
    let (rhs, constant) = lt_rhs(&v, &params)?;
    let chain = verify_counting_chain(&rep, &v, cfg.m, &e_samples, &rm.eigenvalues, &opts)?;
    run.csv(
        "eigenvalues.csv",
        &header(&["k", "lambda"]),
        rm.eigenvalues.iter().enumerate().map(|(k, &l)| vec![(k + 1).to_string(), f(l)]),
    )?;
    run.csv(
        "chain.csv",
        &header(&["e", "N_e", "B_e", "N_times_Bpr"]),
        chain.iter().map(|c| vec![f(c.e), c.n_e.to_string(), c.b_e.to_string(), c.n_times_bpr.to_string()]),
    )?;
    run.summary(json!({
        "lhs": rm.direct,
        "lhs_layer_cake": rm.layer_cake,
        "rhs": rhs,
        "constant": constant.value,
        "constant_assembly": constant.assembly,
        "margin": rhs - rm.direct,
        "chain_holds": chain.iter().all(|c| c.holds()),
    }))?;
    Ok(run)
}

pub fn wp_exact(cfg: &WpExactConfig, out: &Path, o: &Overrides) -> Result<RunOutput, CliError> {
    check((2..=3).contains(&cfg.d), "d must be 2 or 3")?;
    check(cfg.r_max > 0.0 && cfg.points >= 2, "need r_max > 0 and points >= 2")?;
    let w = WpExact::new(cfg.p, cfg.d, cfg.delta)?;
    let mut run = RunOutput::new(out, "wp-exact", cfg)?;
    let r: Vec<f64> = (0..cfg.points).map(|i| cfg.r_max * i as f64 / (cfg.points - 1) as f64).collect();
    let prof = w.profile(&r);
    run.csv(
        "wp_profile.csv",
        &header(&["r", "phi", "chi", "V"]),
        (0..r.len()).map(|i| vec![f(prof.r[i]), f(prof.phi[i]), f(prof.chi[i]), f(prof.v[i])]),
    )?;
    let df = cfg.d as f64;
    let area = if cfg.d == 2 { 2.0 * std::f64::consts::PI } else { 4.0 * std::f64::consts::PI };
    let quad = area * integrate_to_inf(|r: f64| w.w(r).powf(cfg.p) * r.powf(df - 1.0), 0.0, QuadOpts::rel(1e-12))?.value;
    let mut body = json!({"norm_pow_p": w.norm_pow_p()?, "norm": w.norm()?, "norm_pow_p_quadrature": quad});
    if cfg.shoot {
        let spec = RadialSystemSpec::with_delta(cfg.d, cfg.delta, -1.0, cfg.p, 1.0)?;
        let sol = shoot_ground_state(&spec, &shoot_opts(o.tol.unwrap_or(cfg.tol)))?;
        let err = sol
            .r
            .iter()
            .zip(&sol.v)
            .filter(|(&r, _)| r <= cfg.r_max)
            .map(|(&r, &v)| (v - w.w(r)).abs() / w.w(r))
            .fold(0.0, f64::max);
        body["shooting_alpha"] = json!(sol.alpha);
        body["shooting_max_rel_error"] = json!(err);
    }
    run.summary(body)?;
    Ok(run)
}
