//! Dormand-Prince 5(4) with step-size control and terminal events.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOpts {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub h0: f64,
    pub h_max: f64,
    pub max_steps: usize,
    /// Integration stops (without error) once any component exceeds this.
    pub blowup: f64,
}

impl Default for OdeOpts {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-10, h0: 1e-4, h_max: f64::INFINITY, max_steps: 2_000_000, blowup: 1e150 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Rising,
    Falling,
    Either,
}

/// A terminal event: integration stops when `g` crosses zero in `direction`.
pub struct Event<'a> {
    pub g: Box<dyn Fn(f64, &[f64]) -> f64 + 'a>,
    pub direction: Direction,
}

impl<'a> Event<'a> {
    pub fn new(direction: Direction, g: impl Fn(f64, &[f64]) -> f64 + 'a) -> Self {
        Self { g: Box::new(g), direction }
    }

    fn crossed(&self, g0: f64, g1: f64) -> bool {
        match self.direction {
            Direction::Rising => g0 < 0.0 && g1 >= 0.0,
            Direction::Falling => g0 > 0.0 && g1 <= 0.0,
            Direction::Either => (g0 < 0.0 && g1 >= 0.0) || (g0 > 0.0 && g1 <= 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Reached,
    Event(usize),
    Blowup,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub t: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub end: Termination,
}

impl Solution {
    pub fn last(&self) -> (f64, &[f64]) {
        (*self.t.last().unwrap(), self.y.last().unwrap())
    }
}

const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 6] = [
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Stepper<F> {
    f: F,
    k: Vec<Vec<f64>>,
    tmp: Vec<f64>,
}

impl<F: Fn(f64, &[f64], &mut [f64])> Stepper<F> {
    fn new(f: F, n: usize) -> Self {
        Self { f, k: vec![vec![0.0; n]; 7], tmp: vec![0.0; n] }
    }

    /// One step of size h from (t, y) with `k[0] = f(t, y)` already filled.
    /// Writes the fifth-order solution into `out` and returns the weighted error.
    fn step(&mut self, t: f64, y: &[f64], h: f64, out: &mut [f64], opts: &OdeOpts) -> f64 {
        let n = y.len();
        for s in 0..6 {
            for i in 0..n {
                let mut acc = 0.0;
                for j in 0..=s {
                    acc += A[s][j] * self.k[j][i];
                }
                self.tmp[i] = y[i] + h * acc;
            }
            let (head, tail) = self.k.split_at_mut(s + 1);
            let _ = head;
            (self.f)(t + C[s] * h, &self.tmp, &mut tail[0]);
        }
        // The last stage was evaluated at the fifth-order solution.
        out.copy_from_slice(&self.tmp);
        let mut acc = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for j in 0..7 {
                e += E[j] * self.k[j][i];
            }
            let sc = opts.abs_tol + opts.rel_tol * y[i].abs().max(out[i].abs());
            let r = h * e / sc;
            acc += r * r;
        }
        (acc / n as f64).sqrt()
    }
}

/// Integrates `y' = f(t, y)` forward from `t0` to `t1`.
pub fn dopri5<F>(f: F, t0: f64, y0: &[f64], t1: f64, opts: &OdeOpts, events: &[Event], record: bool) -> Result<Solution>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let mut st = Stepper::new(f, n);
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut y_new = vec![0.0; n];
    let mut sol = Solution { t: vec![t0], y: vec![y0.to_vec()], end: Termination::Reached };
    let mut h = opts.h0.min(opts.h_max).min(t1 - t0);
    (st.f)(t, &y, &mut st.k[0]);
    let mut g_prev: Vec<f64> = events.iter().map(|e| (e.g)(t, &y)).collect();
    let mut steps = 0usize;
    while t < t1 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Integration(format!("step budget exhausted at t = {t}")));
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        let err = st.step(t, &y, h, &mut y_new, opts);
        if !err.is_finite() || err > 1.0 {
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).max(0.2) } else { 0.2 };
            h *= fac;
            if t + h == t || h < 1e-300 {
                return Err(Error::Integration(format!("step size underflow at t = {t}")));
            }
            continue;
        }
        let t_new = if last { t1 } else { t + h };
        // Event detection on the accepted step.
        let mut fired: Option<(usize, f64)> = None;
        for (i, ev) in events.iter().enumerate() {
            let g1 = (ev.g)(t_new, &y_new);
            if ev.crossed(g_prev[i], g1) {
                let mut lo = 0.0;
                let mut hi = h;
                let mut y_try = vec![0.0; n];
                let k0 = st.k[0].clone();
                for _ in 0..80 {
                    if hi - lo <= 1e-15 * t.abs().max(1.0) {
                        break;
                    }
                    let mid = 0.5 * (lo + hi);
                    st.k[0].copy_from_slice(&k0);
                    st.step(t, &y, mid, &mut y_try, opts);
                    if ev.crossed(g_prev[i], (ev.g)(t + mid, &y_try)) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                st.k[0].copy_from_slice(&k0);
                if fired.map_or(true, |(_, s)| hi < s) {
                    fired = Some((i, hi));
                }
            }
        }
        if let Some((i, hs)) = fired {
            st.step(t, &y, hs, &mut y_new, opts);
            sol.t.push(t + hs);
            sol.y.push(y_new.clone());
            sol.end = Termination::Event(i);
            return Ok(sol);
        }
        for (i, ev) in events.iter().enumerate() {
            g_prev[i] = (ev.g)(t_new, &y_new);
        }
        t = t_new;
        std::mem::swap(&mut y, &mut y_new);
        // FSAL: the seventh stage is f at the new point.
        let last_k = st.k[6].clone();
        st.k[0].copy_from_slice(&last_k);
        if record || t >= t1 {
            sol.t.push(t);
            sol.y.push(y.clone());
        }
        if y.iter().any(|v| !(v.abs() < opts.blowup)) {
            if !record {
                sol.t.push(t);
                sol.y.push(y.clone());
            }
            sol.end = Termination::Blowup;
            return Ok(sol);
        }
        let fac = if err > 0.0 { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) } else { 5.0 };
        h = (h * fac).min(opts.h_max);
    }
    if !record && sol.t.len() == 1 {
        sol.t.push(t);
        sol.y.push(y);
    }
    Ok(sol)
}
