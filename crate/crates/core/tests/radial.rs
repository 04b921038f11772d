mod common;

use std::f64::consts::PI;

use common::{gamma_oracle, rel, simpson};
use dirac_gap::exact_1d::{alpha_d, Keller1DParams};
use dirac_gap::radial::*;
use dirac_gap::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Linear interpolation of `(xs, ys)` at `x`, `xs` increasing.
fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let i = xs.partition_point(|&t| t < x).clamp(1, xs.len() - 1);
    let w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    ys[i - 1] * (1.0 - w) + ys[i] * w
}

#[test]
fn rhs_vanishes_at_zero_state() {
    for d in 1..=3 {
        let s = RadialSystemSpec::new(d, 1, 0.2, 3.0, 1.0).unwrap();
        assert_eq!(radial_rhs(&s, 0.7, 0.0, 0.0), (0.0, 0.0));
    }
}

#[test]
fn rhs_residual_of_closed_forms() {
    // d = 1 optimizer, derivatives by a fourth-order stencil
    let k = Keller1DParams::new(1.0, 2.0, 0.0).unwrap();
    let spec = RadialSystemSpec::new(1, 0, 0.0, 2.0, 1.0).unwrap();
    let h = 1e-3;
    let d4 = |f: &dyn Fn(f64) -> f64, x: f64| (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
    for i in 1..60 {
        let x = i as f64 * 0.15;
        let (phi, chi) = k.spinor(x);
        let (dp, dc) = radial_rhs(&spec, x, phi, chi);
        assert!((d4(&|t| k.spinor(t).0, x) - dp).abs() < 1e-9);
        assert!((d4(&|t| k.spinor(t).1, x) - dc).abs() < 1e-9);
    }
    // d = 2, n = 0, lambda = -1: the explicit solution, with analytic derivatives
    for &(d, sector, delta, p) in &[(2usize, 0, 1.0, 3.0), (3, 1, 2.0, 4.0)] {
        let w = WpExact::new(p, d, delta).unwrap();
        let spec = RadialSystemSpec::new(d, sector, -1.0, p, 1.0).unwrap();
        let (mu, c) = (w.mu, (p * w.mu).powf((p - 1.0) / 2.0));
        for i in 1..80 {
            let r = i as f64 * 0.125;
            let q = mu * mu + r * r;
            let dphi = -c * mu * p * r / q.powf(p / 2.0 + 1.0);
            let dchi = c * (1.0 / q.powf(p / 2.0) - p * r * r / q.powf(p / 2.0 + 1.0));
            let (ep, ec) = radial_rhs(&spec, r, w.phi(r), w.chi(r));
            assert!((dphi - ep).abs() < 1e-9, "d={d} r={r}");
            assert!((dchi - ec).abs() < 1e-9, "d={d} r={r}");
            let s = w.phi(r).powi(2) + w.chi(r).powi(2);
            assert!(rel(w.w(r).powf(p - 1.0), s) < 1e-12);
        }
    }
}

#[test]
fn one_dimensional_shooting_matches_closed_form() {
    let opts = ShootOpts::default();
    let spec = RadialSystemSpec::new(1, 0, 0.0, 2.0, 1.0).unwrap();
    let sol = shoot_ground_state(&spec, &opts).unwrap();
    assert!(rel(sol.alpha, alpha_d(0.0, 2.0, 1.0).unwrap()) < 1e-4);
    let k = Keller1DParams::new(1.0, 2.0, 0.0).unwrap();
    let scale = k.spinor(0.0).0;
    for (i, &r) in sol.r.iter().enumerate().filter(|(_, r)| **r < 8.0) {
        let (phi, chi) = k.spinor(r);
        assert!((sol.phi[i] - phi).abs() < 1e-4 * scale);
        assert!((sol.chi[i] - chi).abs() < 1e-4 * scale);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let l = rng.gen_range(-0.8..0.8);
        let p = rng.gen_range(1.5..5.0);
        let spec = RadialSystemSpec::new(1, 0, l, p, 1.0).unwrap();
        let sol = shoot_ground_state(&spec, &opts).unwrap();
        assert!(rel(sol.alpha, alpha_d(l, p, 1.0).unwrap()) < 1e-4, "lambda {l} p {p}: {}", sol.alpha);
        assert_eq!(sol.bracket_changes, 1);
        // conserved H vanishes along the orbit
        for (ph, ch) in sol.phi.iter().zip(&sol.chi) {
            let s = ph * ph + ch * ch;
            let h = (ch * ch - ph * ph) + l * s + (p - 1.0) / p * s.powf(p / (p - 1.0));
            assert!(h.abs() <= 1e-6, "H = {h}");
        }
    }
}

#[test]
fn critical_shooting_reproduces_explicit_solution() {
    let opts = ShootOpts::default();
    for &(d, sector, delta, p) in &[(2usize, 0, 1.0, 3.0), (3, 1, 2.0, 4.0)] {
        let spec = RadialSystemSpec::new(d, sector, -1.0, p, 1.0).unwrap();
        let sol = shoot_ground_state(&spec, &opts).unwrap();
        let w = WpExact::new(p, d, delta).unwrap();
        assert_eq!(sol.bracket_changes, 1);
        assert!(sol.r_end >= 10.0, "trusted only to {}", sol.r_end);
        for i in 0..=100 {
            let r = i as f64 * 0.1;
            let v = interp(&sol.r, &sol.v, r.max(sol.r[0]));
            assert!(rel(v, w.w(r)) < 1e-3, "d={d} r={r}: {v} vs {}", w.w(r));
        }
        for (i, (ph, ch)) in sol.phi.iter().zip(&sol.chi).enumerate() {
            assert!(sol.v[i] >= 0.0);
            assert!(rel(sol.v[i].powf(p - 1.0), ph * ph + ch * ch) < 1e-12);
        }
        assert!(rel(sol.alpha, w.norm().unwrap()) < 1e-3);
    }
}

#[test]
fn explicit_norm_matches_quadrature() {
    for &(d, delta, p) in &[(2usize, 1.0, 3.0), (2, 1.0, 5.0), (3, 2.0, 4.0)] {
        let w = WpExact::new(p, d, delta).unwrap();
        let area = if d == 2 { 2.0 * PI } else { 4.0 * PI };
        // r = mu tan(t) maps [0, inf) to [0, pi/2)
        let f = |t: f64| {
            let r = w.mu * t.tan();
            w.w(r).powf(p) * r.powi(d as i32 - 1) * w.mu / t.cos().powi(2)
        };
        let q = area * simpson(f, 0.0, PI / 2.0 - 1e-9, 200_000);
        assert!(rel(q, w.norm_pow_p().unwrap()) < 1e-8, "{d} {delta} {p}: {q}");
    }
    assert!(rel(WpExact::new(3.0, 2, 1.0).unwrap().norm_pow_p().unwrap(), 27.0 * PI) < 1e-12);
    assert!(matches!(WpExact::new(3.0, 2, 2.0), Err(Error::Domain(_))));
}

#[test]
fn norm_limit_at_p_equal_d() {
    assert!(rel(wp_norm_limit(2).unwrap(), 2.0 * PI.sqrt()) < 1e-13);
    assert!(rel(wp_norm_limit(3).unwrap(), 3.0 * (PI / 2.0).powf(2.0 / 3.0)) < 1e-13);
    for d in 1..=3 {
        let df = d as f64;
        let oracle = df * PI.sqrt() * (gamma_oracle(df / 2.0) / gamma_oracle(df)).powf(1.0 / df);
        assert!(rel(wp_norm_limit(d).unwrap(), oracle) < 1e-9);
        // delta = d - 1 as in the d = 2, 3 systems, p just above d
        let w = WpExact::new(df + 1e-6, d, df - 1.0).unwrap();
        assert!(rel(w.norm().unwrap(), oracle) < 1e-4, "d = {d}");
    }
}

#[test]
fn keller_curve_one_dimensional() {
    let lambdas: Vec<f64> = (1..20).map(|i| -0.95 + 0.1 * i as f64).collect();
    let c = radial_keller_curve(1, 0, 2.5, 1.0, &lambdas, &ShootOpts::default()).unwrap();
    assert!(c.skipped.is_empty());
    assert!(c.monotonicity_violations.is_empty());
    for pt in &c.points {
        assert!((pt.alpha - alpha_d(pt.lambda, 2.5, 1.0).unwrap()).abs() < 1e-3);
    }
    // small alpha end sits near m
    let c = radial_keller_curve(2, 0, 3.0, 1.0, &[0.99, 0.999], &ShootOpts::default()).unwrap();
    assert!(c.points[1].alpha < c.points[0].alpha);
    assert!(c.points[1].alpha < 0.3);
}

#[test]
fn landmark_values_near_critical() {
    let opts = ShootOpts::default();
    let s2 = RadialSystemSpec::new(2, 0, -1.0 + 1e-3, 2.0, 1.0).unwrap();
    let a2 = shoot_ground_state(&s2, &opts).unwrap().alpha;
    let b2 = 2.0 * PI.sqrt();
    assert!(a2 <= b2 * 1.01 && (a2 - b2).abs() <= 0.01 * b2, "{a2}");
    let a3 = alpha_star_rad(3, 3.0, 1.0, &opts).unwrap();
    let b3 = 3.0 * (PI / 2.0).powf(2.0 / 3.0);
    assert!(a3 <= b3 * 1.01 && (a3 - b3).abs() <= 0.01 * b3, "{a3}");
}

#[test]
fn spec_validation() {
    assert!(RadialSystemSpec::new(4, 0, 0.0, 3.0, 1.0).is_err());
    assert!(RadialSystemSpec::new(2, 0, 0.0, 1.0, 1.0).is_err());
    assert!(RadialSystemSpec::new(2, 0, 1.0, 3.0, 1.0).is_err());
    assert!(RadialSystemSpec::new(2, -1, 0.0, 3.0, 1.0).is_err());
    assert!(alpha_star_rad_argmax(2, 1.0, 1.5, 3.0, 1e-2, &ShootOpts::default()).is_err());
}
