//! Small independent quadrature rules used as test oracles.
#![allow(dead_code)]

/// Double-exponential (tanh-sinh) rule on `[a, b]`; tolerates integrable endpoint singularities.
/// `f` receives `(x, x - a, b - x)` so singular factors can use the exact endpoint distances.
pub fn tanh_sinh(f: impl Fn(f64, f64, f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let h = 1.0 / 128.0;
    let mut sum = 0.0;
    let n = (4.5 / h) as i64;
    for i in -n..=n {
        let t = i as f64 * h;
        let u = std::f64::consts::FRAC_PI_2 * t.sinh();
        let w = std::f64::consts::FRAC_PI_2 * t.cosh() / u.cosh().powi(2);
        // distances to the endpoints without cancellation
        let da = 2.0 * half / (1.0 + (-2.0 * u).exp());
        let db = 2.0 * half / (1.0 + (2.0 * u).exp());
        if da <= 0.0 || db <= 0.0 || !w.is_finite() {
            continue;
        }
        sum += w * f(a + da, da, db);
    }
    sum * half * h
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// `Gamma(x)` by Simpson on `int exp(x s - e^s) ds`, for moderate `x`.
pub fn gamma_oracle(x: f64) -> f64 {
    simpson(|s| (x * s - s.exp()).exp(), -750.0 / x, x.ln().max(0.0) + 6.0, 400_000)
}

/// `K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt`, truncated where the integrand is below 1e-300.
pub fn bessel_k_oracle(nu: f64, x: f64) -> f64 {
    let t_max = (700.0 / x).acosh() + 1.0;
    simpson(|t| (-x * t.cosh() + nu * t).exp() * 0.5 + (-x * t.cosh() - nu * t).exp() * 0.5, 0.0, t_max, 200_000)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
