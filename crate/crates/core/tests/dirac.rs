mod common;

use std::f64::consts::PI;

use dirac_gap::dirac::*;
use dirac_gap::Error;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn max_entry(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn hermitian_eigs(m: &CMat) -> Vec<f64> {
    let n = m.nrows();
    let a = faer::Mat::<C64>::from_fn(n, n, |i, j| m[(i, j)]);
    a.self_adjoint_eigenvalues(faer::Side::Lower).unwrap()
}

#[test]
fn representations() {
    let r1 = clifford_rep(1).unwrap();
    assert_eq!(r1.n_components, 2);
    assert_eq!(r1.alphas, vec![pauli(2)]);
    assert_eq!(r1.beta, pauli(3));
    let r2 = clifford_rep(2).unwrap();
    assert_eq!(r2.alphas, vec![pauli(1), pauli(2)]);
    assert_eq!(r2.beta, pauli(3));
    assert_eq!(clifford_rep(3).unwrap().n_components, 4);
    assert!(matches!(clifford_rep(4), Err(Error::Domain(_))));
    for d in 1..=3 {
        let r = clifford_rep(d).unwrap();
        assert!(r.relation_defect() < 1e-14);
        let n = r.n_components;
        let id = CMat::identity(n, n);
        let mut all = r.alphas.clone();
        all.push(r.beta.clone());
        for (j, a) in all.iter().enumerate() {
            assert!(max_entry(&(a - a.adjoint())) < 1e-14);
            for (k, b) in all.iter().enumerate() {
                let target = if j == k { &id * C64::from(2.0) } else { CMat::zeros(n, n) };
                assert!(max_entry(&(a * b + b * a - target)) < 1e-14);
            }
        }
    }
}

#[test]
fn symbol_examples() {
    let r = clifford_rep(2).unwrap();
    let s0 = r.dirac_symbol(1.5, &[0.0, 0.0]);
    assert!(max_entry(&(&s0 - &r.beta * C64::from(1.5))) < 1e-15);
    let e = hermitian_eigs(&r.dirac_symbol(0.0, &[3.0, 4.0]));
    assert!((e[0] + 5.0).abs() < 1e-12 && (e[1] - 5.0).abs() < 1e-12);
    let g = resolvent_symbol(&r, &ResolventParams::new(1.0, 0.0).unwrap(), &[0.0, 0.0]).unwrap();
    assert!(max_entry(&(g - &r.beta)) < 1e-15);
    assert!(ResolventParams::new(1.0, 1.0).is_err());
    assert!(ResolventParams::new(1.0, -1.2).is_err());
}

#[test]
fn resolvent_symbol_inverts_and_is_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for d in 1..=3 {
        let r = clifford_rep(d).unwrap();
        let n = r.n_components;
        for _ in 0..100 {
            let m = rng.gen_range(0.2..3.0);
            let lam = m * rng.gen_range(-0.99..0.99);
            let k: Vec<f64> = (0..d).map(|_| rng.gen_range(-20.0..20.0)).collect();
            let prm = ResolventParams::new(m, lam).unwrap();
            let g = resolvent_symbol(&r, &prm, &k).unwrap();
            let shifted = r.dirac_symbol(m, &k) - CMat::identity(n, n) * C64::from(lam);
            assert!(max_entry(&(&g * &shifted - CMat::identity(n, n))) < 1e-12);
            assert!(max_entry(&(&g - g.adjoint())) < 1e-14);
            let e = (k.iter().map(|x| x * x).sum::<f64>() + m * m).sqrt();
            let norm = hermitian_eigs(&g).iter().map(|x| x.abs()).fold(0.0, f64::max);
            assert!(norm <= (1.0 / (e - lam.abs())) * (1.0 + 1e-12));
        }
    }
}

/// `(1/2a) sum_k g(k) w(k) e^{ikx}` on the periodic box, with a smooth spectral window.
fn windowed_inverse(rep: &CliffordRep, prm: &ResolventParams, a: f64, l: usize, x: f64) -> CMat {
    let k_nyq = PI * l as f64 / (2.0 * a);
    let mut acc = CMat::zeros(2, 2);
    for j in 0..l as i64 {
        let f = if j < l as i64 / 2 { j } else { j - l as i64 };
        let k = PI * f as f64 / a;
        let w = (-(k.abs() / (k_nyq / 2.0)).powi(8)).exp();
        let g = resolvent_symbol(rep, prm, &[k]).unwrap();
        acc += g * (C64::new(0.0, k * x).exp() * w);
    }
    acc / C64::from(2.0 * a)
}

#[test]
fn kernel_matches_fourier_oracle_in_1d() {
    let r = clifford_rep(1).unwrap();
    let prm = ResolventParams::new(1.0, 0.0).unwrap();
    let (a, l) = (40.0, 1 << 14);
    for &x in &[0.5, 0.8, 1.25, 2.0, 3.0, -0.7, -2.5] {
        let closed = resolvent_kernel(&r, &prm, &[x]).unwrap();
        let oracle = windowed_inverse(&r, &prm, a, l, x);
        let err = max_entry(&(&closed - &oracle)) / max_entry(&oracle);
        assert!(err < 1e-4, "x = {x}: {err:e}");
    }
}

#[test]
fn kernel_singularity_and_decay() {
    for d in 1..=3 {
        let r = clifford_rep(d).unwrap();
        let prm = ResolventParams::new(1.0, 0.3).unwrap();
        let kappa = prm.kappa();
        let at = |s: f64| {
            let mut x = vec![0.0; d];
            x[0] = s;
            max_entry(&resolvent_kernel(&r, &prm, &x).unwrap())
        };
        assert!(matches!(resolvent_kernel(&r, &prm, &vec![0.0; d]), Err(Error::Singular(_))));
        // near the origin |R| |x|^{d-1} stays bounded (fit C at 0.1)
        let c_small = at(0.1) * 0.1f64.powi(d as i32 - 1);
        for &s in &[1e-2, 1e-3, 1e-4] {
            assert!(at(s) <= 1.5 * c_small * s.powi(1 - d as i32) + 1.5 * c_small, "d = {d}, |x| = {s}");
        }
        // exponential decay: fit C at |x| = 5
        let c_big = at(5.0) * (kappa * 5.0).exp();
        for &s in &[6.0, 8.0, 12.0, 20.0] {
            assert!(at(s) <= c_big * (-kappa * s).exp() * 1.01, "d = {d}, |x| = {s}");
        }
    }
}

proptest! {
    #[test]
    fn symbol_squares_to_energy(d in 1usize..=3, m in 0.0f64..5.0, k in prop::collection::vec(-30.0f64..30.0, 3)) {
        let r = clifford_rep(d).unwrap();
        let n = r.n_components;
        let s = r.dirac_symbol(m, &k[..d]);
        let e2 = k[..d].iter().map(|x| x * x).sum::<f64>() + m * m;
        prop_assert!(max_entry(&(&s * &s - CMat::identity(n, n) * C64::from(e2))) < 1e-11 * e2.max(1.0));
        prop_assert!(max_entry(&(&s - s.adjoint())) < 1e-14);
    }

    #[test]
    fn kernel_reflection_symmetry(d in 1usize..=3, lam in -0.95f64..0.95, x in prop::collection::vec(-4.0f64..4.0, 3)) {
        prop_assume!(x[..d].iter().map(|v| v * v).sum::<f64>() > 1e-4);
        let r = clifford_rep(d).unwrap();
        let prm = ResolventParams::new(1.0, lam).unwrap();
        let xp = resolvent_kernel(&r, &prm, &x[..d]).unwrap();
        let neg: Vec<f64> = x[..d].iter().map(|v| -v).collect();
        let xm = resolvent_kernel(&r, &prm, &neg).unwrap();
        prop_assert!(max_entry(&(&xp - xm.adjoint())) < 1e-12 * max_entry(&xp).max(1.0));
    }
}
