//! Radial nonlinear Dirac systems solved by shooting, and the explicit critical solution.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::ode::{dopri5, Direction, Event, OdeOpts, Termination};
use crate::specfun::ln_gamma;

/// One radial sector. With offsets `(a, b)` the system is
/// `phi' - (a/r) phi = -(lambda + m + V) chi`, `chi' + (b/r) chi = (lambda - m + V) phi`,
/// `V = (phi^2 + chi^2)^{1/(p-1)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSystemSpec {
    pub d: usize,
    pub a_off: f64,
    pub b_off: f64,
    pub lambda: f64,
    pub p: f64,
    pub m: f64,
}

impl RadialSystemSpec {
    /// `sector` is `n` for d = 2 (offsets `n, n+1`) and `kappa` for d = 3 (offsets `kappa-1, kappa+1`); ignored for d = 1.
    pub fn new(d: usize, sector: i32, lambda: f64, p: f64, m: f64) -> Result<Self> {
        let (a, b) = match d {
            1 => (0.0, 0.0),
            2 => (sector as f64, sector as f64 + 1.0),
            3 => (sector as f64 - 1.0, sector as f64 + 1.0),
            _ => return domain(format!("unsupported dimension {d}")),
        };
        Self::with_offsets(d, a, b, lambda, p, m)
    }

    /// The form `phi' = -(lambda+m+V) chi`, `chi' + (delta/r) chi = (lambda-m+V) phi`.
    pub fn with_delta(d: usize, delta: f64, lambda: f64, p: f64, m: f64) -> Result<Self> {
        Self::with_offsets(d, 0.0, delta, lambda, p, m)
    }

    pub fn with_offsets(d: usize, a: f64, b: f64, lambda: f64, p: f64, m: f64) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return domain(format!("unsupported dimension {d}"));
        }
        if a < 0.0 || b < 0.0 {
            return domain("sectors with negative centrifugal offsets are not supported");
        }
        if d == 1 && (a != 0.0 || b != 0.0) {
            return domain("d = 1 has no centrifugal terms");
        }
        if !(p > 1.0) {
            return domain(format!("p must exceed 1, got {p}"));
        }
        if !(m > 0.0) || !(lambda >= -m && lambda < m) {
            return domain(format!("need m > 0 and -m <= lambda < m, got m = {m}, lambda = {lambda}"));
        }
        Ok(Self { d, a_off: a, b_off: b, lambda, p, m })
    }

    pub fn surface(&self) -> f64 {
        match self.d {
            1 => 2.0,
            2 => 2.0 * PI,
            _ => 4.0 * PI,
        }
    }

    fn kappa(&self) -> f64 {
        ((self.m - self.lambda) * (self.m + self.lambda)).max(0.0).sqrt()
    }

    /// `r_max = 12 / B` with `B = 2 kappa/(p-1)`, capped.
    pub fn default_r_max(&self, cap: f64) -> f64 {
        let b = 2.0 * self.kappa() / (self.p - 1.0);
        if b > 0.0 { (12.0 / b).min(cap) } else { cap }
    }
}

/// `(phi', chi')` at radius `r` (any real `r` in d = 1).
pub fn radial_rhs(spec: &RadialSystemSpec, r: f64, phi: f64, chi: f64) -> (f64, f64) {
    let v = (phi * phi + chi * chi).powf(1.0 / (spec.p - 1.0));
    let (ca, cb) = if spec.d == 1 { (0.0, 0.0) } else { (spec.a_off / r, spec.b_off / r) };
    (ca * phi - (spec.lambda + spec.m + v) * chi, (spec.lambda - spec.m + v) * phi - cb * chi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialSolution {
    pub r: Vec<f64>,
    pub phi: Vec<f64>,
    pub chi: Vec<f64>,
    pub v: Vec<f64>,
    /// `||V||_p` over `R^d`.
    pub alpha: f64,
    /// Shooting parameter: the leading coefficient of `phi` at the origin.
    pub s: f64,
    /// Radius up to which the two bracketing trajectories agree.
    pub r_end: f64,
    pub spec: RadialSystemSpec,
    /// Sign changes of the overshoot/undershoot classification seen while scanning (1 for a clean dichotomy).
    pub bracket_changes: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct ShootOpts {
    pub r_max: Option<f64>,
    pub r_cap: f64,
    pub r0: f64,
    pub s_range: (f64, f64),
    pub rel_s_tol: f64,
    pub ode: OdeOpts,
}

impl Default for ShootOpts {
    fn default() -> Self {
        Self {
            r_max: None,
            r_cap: 400.0,
            r0: 1e-6,
            s_range: (1e-6, 1e6),
            rel_s_tol: 1e-14,
            ode: OdeOpts { abs_tol: 1e-10, rel_tol: 1e-10, h0: 1e-7, ..OdeOpts::default() },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    /// phi crossed zero: too much initial amplitude.
    Over,
    /// chi turned negative: too little.
    Under,
    Undecided,
}

struct Shot {
    outcome: Outcome,
    r: Vec<f64>,
    y: Vec<Vec<f64>>,
}

fn shoot(spec: &RadialSystemSpec, s: f64, r_max: f64, opts: &ShootOpts, record: bool) -> Result<Shot> {
    let (r0, phi0, chi0) = if spec.d == 1 {
        (0.0, s, 0.0)
    } else {
        let r0 = opts.r0;
        let phi0 = s * r0.powf(spec.a_off);
        let v0 = (phi0 * phi0).powf(1.0 / (spec.p - 1.0));
        let chi0 = (spec.lambda - spec.m + v0) * phi0 * r0 / (spec.a_off + spec.b_off + 1.0);
        (r0, phi0, chi0)
    };
    let v0 = (phi0 * phi0).powf(1.0 / (spec.p - 1.0));
    if spec.lambda - spec.m + v0 <= 0.0 && spec.a_off == 0.0 {
        return Ok(Shot { outcome: Outcome::Under, r: vec![r0], y: vec![vec![phi0, chi0, 0.0]] });
    }
    let dm1 = spec.d as i32 - 1;
    let p = spec.p;
    let rhs = |r: f64, y: &[f64], dy: &mut [f64]| {
        let (dp, dc) = radial_rhs(spec, r, y[0], y[1]);
        dy[0] = dp;
        dy[1] = dc;
        let v = (y[0] * y[0] + y[1] * y[1]).powf(1.0 / (p - 1.0));
        dy[2] = v.powf(p) * r.powi(dm1);
    };
    let events = [
        Event::new(Direction::Falling, |_r, y: &[f64]| y[0]),
        Event::new(Direction::Falling, |_r, y: &[f64]| y[1]),
    ];
    let sol = match dopri5(rhs, r0, &[phi0, chi0, 0.0], r_max, &opts.ode, &events, record) {
        Ok(sol) => sol,
        // The rotation rate grows like V^{p-1}; when even the smallest step cannot follow it
        // the amplitude is far above the bound-state value.
        Err(Error::Integration(_)) => return Ok(Shot { outcome: Outcome::Over, r: vec![r0], y: vec![vec![phi0, chi0, 0.0]] }),
        Err(e) => return Err(e),
    };
    let outcome = match sol.end {
        Termination::Event(0) => Outcome::Over,
        Termination::Event(_) => Outcome::Under,
        Termination::Blowup => {
            let y = sol.last().1;
            if y[0] <= 0.0 { Outcome::Over } else if y[1] <= 0.0 { Outcome::Under } else { Outcome::Undecided }
        }
        Termination::Reached => Outcome::Undecided,
    };
    Ok(Shot { outcome, r: sol.t, y: sol.y })
}

/// Finds the ground-state trajectory by bisection on `s = phi(0)` between undershoot and overshoot.
pub fn shoot_ground_state(spec: &RadialSystemSpec, opts: &ShootOpts) -> Result<RadialSolution> {
    let mut r_max = opts.r_max.unwrap_or_else(|| spec.default_r_max(opts.r_cap));
    loop {
        let (sol, decided) = shoot_once(spec, r_max, opts)?;
        // An undecided trajectory at r_max means the box was too short to separate the bracket.
        if decided || r_max >= opts.r_cap {
            return Ok(sol);
        }
        r_max = (2.0 * r_max).min(opts.r_cap);
    }
}

fn shoot_once(spec: &RadialSystemSpec, r_max: f64, opts: &ShootOpts) -> Result<(RadialSolution, bool)> {
    let (s_lo, s_hi) = opts.s_range;
    // Log scan of the classification; a clean dichotomy changes exactly once.
    let n_scan = 24;
    let grid: Vec<f64> = (0..=n_scan).map(|i| s_lo * (s_hi / s_lo).powf(i as f64 / n_scan as f64)).collect();
    let over = grid
        .iter()
        .map(|&s| Ok(shoot(spec, s, r_max, opts, false)?.outcome == Outcome::Over))
        .collect::<Result<Vec<bool>>>()?;
    let changes = over.windows(2).filter(|w| w[0] != w[1]).count();
    let first = over.windows(2).position(|w| !w[0] && w[1]);
    let Some(i0) = first else {
        return Err(Error::NoSolution(format!("no undershoot/overshoot bracket for s in [{s_lo:e}, {s_hi:e}]")));
    };
    let (mut lo, mut hi) = (grid[i0], grid[i0 + 1]);
    for _ in 0..400 {
        if hi / lo - 1.0 < opts.rel_s_tol {
            break;
        }
        let mid = (lo * hi).sqrt();
        if shoot(spec, mid, r_max, opts, false)?.outcome == Outcome::Over {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let shot_lo = shoot(spec, lo, r_max, opts, true)?;
    let shot_hi = shoot(spec, hi, r_max, opts, false)?;
    let r_end = shot_lo.r.last().copied().unwrap().min(shot_hi.r.last().copied().unwrap());
    let p = spec.p;
    let mut r = Vec::new();
    let mut phi = Vec::new();
    let mut chi = Vec::new();
    let mut v = Vec::new();
    let mut integral = 0.0;
    for (ri, yi) in shot_lo.r.iter().zip(&shot_lo.y) {
        if *ri > r_end {
            break;
        }
        r.push(*ri);
        phi.push(yi[0]);
        chi.push(yi[1]);
        v.push((yi[0] * yi[0] + yi[1] * yi[1]).powf(1.0 / (p - 1.0)));
        integral = yi[2];
    }
    // Tail beyond the last trusted radius.
    let (rl, vl) = (*r.last().unwrap(), *v.last().unwrap());
    let df = spec.d as f64;
    let kappa = spec.kappa();
    let tail = if kappa > 0.0 {
        vl.powf(p) * rl.powf(df - 1.0) * (p - 1.0) / (2.0 * p * kappa)
    } else if 2.0 * p > df {
        (vl * rl * rl).powf(p) * rl.powf(df - 2.0 * p) / (2.0 * p - df)
    } else {
        f64::INFINITY
    };
    let alpha = (spec.surface() * (integral + tail)).powf(1.0 / p);
    let decided = shot_lo.outcome != Outcome::Undecided;
    Ok((RadialSolution { r, phi, chi, v, alpha, s: lo, r_end, spec: *spec, bracket_changes: changes }, decided))
}

#[derive(Debug, Clone, PartialEq)]
pub struct KellerPoint {
    pub alpha: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KellerCurve {
    pub points: Vec<KellerPoint>,
    pub provenance: &'static str,
    /// Energies whose shooting failed, with the reason.
    pub skipped: Vec<(f64, String)>,
    /// Energies where alpha failed to decrease as lambda increased.
    pub monotonicity_violations: Vec<f64>,
}

/// `lambda -> alpha` by shooting in the ground sector, one shot per energy.
pub fn radial_keller_curve(d: usize, sector: i32, p: f64, m: f64, lambdas: &[f64], opts: &ShootOpts) -> Result<KellerCurve> {
    let results: Vec<(f64, Result<f64>)> = lambdas
        .par_iter()
        .map(|&l| (l, RadialSystemSpec::new(d, sector, l, p, m).and_then(|s| shoot_ground_state(&s, opts)).map(|s| s.alpha)))
        .collect();
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for (l, r) in results {
        match r {
            Ok(a) => points.push(KellerPoint { alpha: a, lambda: l }),
            Err(e) => skipped.push((l, e.to_string())),
        }
    }
    points.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).unwrap());
    let monotonicity_violations = points.windows(2).filter(|w| w[1].alpha >= w[0].alpha).map(|w| w[1].lambda).collect();
    Ok(KellerCurve { points, provenance: "ode", skipped, monotonicity_violations })
}

/// The explicit solution at `m = 1`, `lambda = -1`: `W_p = p mu/(mu^2 + r^2)`, `mu = (p-1-delta)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WpExact {
    pub p: f64,
    pub d: usize,
    pub delta: f64,
    pub mu: f64,
}

impl WpExact {
    pub fn new(p: f64, d: usize, delta: f64) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return domain(format!("unsupported dimension {d}"));
        }
        if !(delta < p - 1.0) {
            return domain(format!("need delta < p - 1, got delta = {delta}, p = {p}"));
        }
        Ok(Self { p, d, delta, mu: (p - 1.0 - delta) / 2.0 })
    }

    pub fn phi(&self, r: f64) -> f64 {
        let (p, mu) = (self.p, self.mu);
        (p * mu).powf((p - 1.0) / 2.0) * mu / (mu * mu + r * r).powf(p / 2.0)
    }

    pub fn chi(&self, r: f64) -> f64 {
        let (p, mu) = (self.p, self.mu);
        (p * mu).powf((p - 1.0) / 2.0) * r / (mu * mu + r * r).powf(p / 2.0)
    }

    pub fn w(&self, r: f64) -> f64 {
        self.p * self.mu / (self.mu * self.mu + r * r)
    }

    /// `||W_p||_p^p = p^p pi^{d/2} (2/(p-1-delta))^{p-d} Gamma(p - d/2)/Gamma(p)`; needs `p > d/2`.
    pub fn norm_pow_p(&self) -> Result<f64> {
        let (p, df) = (self.p, self.d as f64);
        if !(p > df / 2.0) {
            return domain("W_p is not in L^p for p <= d/2");
        }
        let ln = p * p.ln() + df / 2.0 * PI.ln() + (p - df) * (2.0 / (p - 1.0 - self.delta)).ln() + ln_gamma(p - df / 2.0)? - ln_gamma(p)?;
        Ok(ln.exp())
    }

    pub fn norm(&self) -> Result<f64> {
        Ok(self.norm_pow_p()?.powf(1.0 / self.p))
    }

    pub fn profile(&self, r: &[f64]) -> RadialSolution {
        let spec = RadialSystemSpec { d: self.d, a_off: 0.0, b_off: self.delta, lambda: -1.0, p: self.p, m: 1.0 };
        RadialSolution {
            r: r.to_vec(),
            phi: r.iter().map(|&x| self.phi(x)).collect(),
            chi: r.iter().map(|&x| self.chi(x)).collect(),
            v: r.iter().map(|&x| self.w(x)).collect(),
            alpha: self.norm().unwrap_or(f64::NAN),
            s: self.phi(0.0),
            r_end: r.last().copied().unwrap_or(0.0),
            spec,
            bracket_changes: 1,
        }
    }
}

/// `lim_{p -> d+} ||W_p||_p = d sqrt(pi) (Gamma(d/2)/Gamma(d))^{1/d}`.
pub fn wp_norm_limit(d: usize) -> Result<f64> {
    let df = d as f64;
    Ok(df * PI.sqrt() * ((ln_gamma(df / 2.0)? - ln_gamma(df)?) / df).exp())
}

/// `alpha_star^rad(p)`: norm of the shooting solution at `lambda = -m` in the first-class sector.
pub fn alpha_star_rad(d: usize, p: f64, m: f64, opts: &ShootOpts) -> Result<f64> {
    let sector = if d == 3 { 1 } else { 0 };
    let spec = RadialSystemSpec::new(d, sector, -m, p, m)?;
    Ok(shoot_ground_state(&spec, opts)?.alpha)
}

/// Golden-section maximizer of `alpha_star_rad` on `[lo, hi]`, located to `tol` in `p`.
pub fn alpha_star_rad_argmax(d: usize, m: f64, lo: f64, hi: f64, tol: f64, opts: &ShootOpts) -> Result<(f64, f64)> {
    if !(lo < hi && lo > d as f64) {
        return domain("need d < lo < hi");
    }
    let f = |p: f64| alpha_star_rad(d, p, m, opts);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - r * (b - a);
    let mut e = a + r * (b - a);
    let (mut fc, mut fe) = (f(c)?, f(e)?);
    while b - a > tol {
        if fc > fe {
            b = e;
            e = c;
            fe = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + r * (b - a);
            fe = f(e)?;
        }
    }
    let p = 0.5 * (a + b);
    Ok((p, f(p)?))
}
