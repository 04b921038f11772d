use dirac_gap::bs::*;
use dirac_gap::dirac::clifford_rep;
use dirac_gap::exact_1d::Keller1DParams;
use dirac_gap::grid::{dot, GridSpec, PotentialField, SpinorField};
use dirac_gap::lanczos::{assemble, dense_eigenvalues, extremal_eigs, HermitianOp, LanczosOpts};
use dirac_gap::potentials::PotentialFamily;
use dirac_gap::Error;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_potential(grid: GridSpec, seed: u64) -> PotentialField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bumps: Vec<([f64; 3], f64, f64)> = (0..3)
        .map(|_| ([rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)], rng.gen_range(0.2..2.0), rng.gen_range(0.5..2.0)))
        .collect();
    PotentialField::from_fn(grid, |x| {
        bumps.iter().map(|(c, h, w)| h * (-(0..grid.d).map(|i| (x[i] - c[i]).powi(2)).sum::<f64>() / (w * w)).exp()).sum()
    })
    .unwrap()
}

fn random_spinor(grid: GridSpec, n: usize, seed: u64) -> SpinorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vals = (0..grid.len() * n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    SpinorField::new(grid, n, vals).unwrap()
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn gaussian_well(grid: GridSpec) -> PotentialField {
    PotentialFamily::Gaussian { amplitude: 2.0, length: 2.0 }.field(grid).unwrap()
}

#[test]
fn dense_oracle_equivalence() {
    let opts = LanczosOpts { tol: 1e-12, ..LanczosOpts::default() };
    for (d, a, l) in [(1usize, 8.0, 32usize), (2, 5.0, 16)] {
        let grid = GridSpec::new(d, a, l).unwrap();
        let rep = clifford_rep(d).unwrap();
        let v = random_potential(grid, 7 + d as u64);
        for &lam in &[-0.6, 0.0, 0.7] {
            let op = BsOperator::dirac(&rep, &v, 1.0, lam).unwrap();
            let all = dense_eigenvalues(&assemble(&op));
            let k = 5;
            let r = extremal_eigs(&op, k, k, &opts, &[]).unwrap();
            for j in 0..k {
                assert!((r.top[j] - all[all.len() - 1 - j]).abs() < 1e-9, "d={d} lam={lam} top {j}");
                assert!((r.bottom[j] - all[j]).abs() < 1e-9, "d={d} lam={lam} bottom {j}");
            }
        }
    }
}

#[test]
fn assembled_matrix_is_hermitian() {
    let grid = GridSpec::new(2, 4.0, 16).unwrap();
    let rep = clifford_rep(2).unwrap();
    let m = assemble(&BsOperator::dirac(&rep, &random_potential(grid, 1), 1.0, 0.2).unwrap());
    let defect = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(defect < 1e-13);
}

#[test]
fn zero_potential() {
    let grid = GridSpec::new(2, 4.0, 16).unwrap();
    let rep = clifford_rep(2).unwrap();
    let v = PotentialField::zeros(grid);
    let phi = random_spinor(grid, 2, 3);
    assert!(apply_kv(&rep, &v, 1.0, 0.1, &phi).unwrap().values.iter().all(|z| z.norm() == 0.0));
    let r = extremal_eigs(&BsOperator::dirac(&rep, &v, 1.0, 0.1).unwrap(), 3, 3, &LanczosOpts::default(), &[]).unwrap();
    assert!(r.top.iter().chain(&r.bottom).all(|x| x.abs() < 1e-14));
    assert_eq!(lambda_d(&rep, &v, 1.0, 1e-6, &LanczosOpts::default()).unwrap(), None);
}

#[test]
fn scaling_symmetry_and_linearity() {
    for d in 1..=3 {
        let l = if d == 3 { 16 } else { 32 };
        let grid = GridSpec::new(d, 5.0, l).unwrap();
        let rep = clifford_rep(d).unwrap();
        let n = rep.n_components;
        let v = random_potential(grid, 11);
        let (phi, psi) = (random_spinor(grid, n, 1), random_spinor(grid, n, 2));
        let lam = 0.35;
        let kphi = apply_kv(&rep, &v, 1.0, lam, &phi).unwrap();
        let kpsi = apply_kv(&rep, &v, 1.0, lam, &psi).unwrap();
        // K_{tV} = t K_V
        let kt = apply_kv(&rep, &v.scaled(2.5).unwrap(), 1.0, lam, &phi).unwrap();
        let scaled: Vec<C64> = kphi.values.iter().map(|z| z * 2.5).collect();
        assert!(max_diff(&kt.values, &scaled) < 1e-12 * 2.5 * kphi.values.iter().map(|z| z.norm()).fold(0.0, f64::max));
        // <phi, K psi> = <K phi, psi>
        let (x, y) = (dot(&phi.values, &kpsi.values), dot(&kphi.values, &psi.values));
        assert!((x - y).norm() < 1e-12 * x.norm());
        // linearity
        let (a, b) = (C64::new(0.3, -1.2), C64::new(-0.7, 0.4));
        let comb = SpinorField::new(grid, n, phi.values.iter().zip(&psi.values).map(|(p, q)| a * p + b * q).collect()).unwrap();
        let kc = apply_kv(&rep, &v, 1.0, lam, &comb).unwrap();
        let expect: Vec<C64> = kphi.values.iter().zip(&kpsi.values).map(|(p, q)| a * p + b * q).collect();
        assert!(max_diff(&kc.values, &expect) < 1e-12 * expect.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
}

#[test]
fn out_of_gap_energy_is_rejected() {
    let grid = GridSpec::new(1, 5.0, 32).unwrap();
    let rep = clifford_rep(1).unwrap();
    let v = random_potential(grid, 1);
    assert!(matches!(BsOperator::dirac(&rep, &v, 1.0, 1.0), Err(Error::Domain(_))));
    assert!(matches!(apply_kv(&rep, &v, 1.0, -1.5, &random_spinor(grid, 2, 0)), Err(Error::Domain(_))));
    let big = kv_extremal(&rep, &v, 1.0, 0.0, 10, 10, &LanczosOpts::default());
    assert!(matches!(big, Err(Error::Domain(_))));
}

#[test]
fn imaginary_energy_decay() {
    let grid = GridSpec::new(2, 5.0, 32).unwrap();
    let rep = clifford_rep(2).unwrap();
    let v = gaussian_well(grid);
    let norms: Vec<f64> = [1.0, 10.0, 100.0]
        .iter()
        .map(|&s| BsOperator::dirac_complex(&rep, &v, 1.0, C64::new(0.0, s)).unwrap().op_norm(60, 5))
        .collect();
    assert!(norms[0] > norms[1] && norms[1] > norms[2], "{norms:?}");
}

#[test]
fn gaussian_branches_increase_and_top_exceeds_one_near_m() {
    let grid = GridSpec::new(2, 6.0, 48).unwrap();
    let rep = clifford_rep(2).unwrap();
    let v = gaussian_well(grid);
    let lambdas: Vec<f64> = (1..=8).map(|i| -1.0 + 2.0 * i as f64 / 9.0).collect();
    let curve = sweep_branches(&rep, &v, 1.0, &lambdas, 4, 1e-6, &LanczosOpts::default()).unwrap();
    assert!(curve.worst_decrease() <= 1e-8, "{}", curve.worst_decrease());
    assert!(curve.top.last().unwrap()[0] > 1.0);
    for c in &curve.crossings {
        let mu = mu_j(&rep, &v, 1.0, c.lambda, c.branch, &LanczosOpts::default()).unwrap();
        assert!((mu - 1.0).abs() < 1e-4, "{c:?} mu = {mu}");
    }
    let ld = lambda_d(&rep, &v, 1.0, 1e-7, &LanczosOpts::default()).unwrap().unwrap();
    let first = curve.crossings.iter().filter(|c| c.branch == 1).map(|c| c.lambda).next().unwrap();
    assert!((ld - first).abs() < 1e-6);
}

#[test]
fn charge_conjugation_reflects_spectrum() {
    // mu_j(lambda) = -nu_j(-lambda): the spectrum of K_V(-lambda) is the negated spectrum of K_V(lambda).
    // On the grid the unpaired Nyquist wavenumber breaks k -> -k, so agreement is only to ~1e-7.
    let grid = GridSpec::new(2, 5.0, 32).unwrap();
    let rep = clifford_rep(2).unwrap();
    let v = random_potential(grid, 21);
    let opts = LanczosOpts { tol: 1e-11, ..Default::default() };
    let a = extremal_eigs(&BsOperator::dirac(&rep, &v, 1.0, 0.4).unwrap(), 4, 4, &opts, &[]).unwrap();
    let b = extremal_eigs(&BsOperator::dirac(&rep, &v, 1.0, -0.4).unwrap(), 4, 4, &opts, &[]).unwrap();
    for j in 0..4 {
        assert!((a.top[j] + b.bottom[j]).abs() < 1e-6);
        assert!((a.bottom[j] + b.top[j]).abs() < 1e-6);
    }
}

#[test]
fn weak_potential_has_no_bound_state_and_zero_counts() {
    let opts = LanczosOpts::default();
    // d = 3: no weak-coupling bound state. On the periodic box the constant mode still binds within
    // ~vol^-1 of m, so the search window stops at m - 10 tol = 0.99.
    let g3 = GridSpec::new(3, 5.0, 16).unwrap();
    let v3 = PotentialFamily::Gaussian { amplitude: 1e-3, length: 2.0 }.field(g3).unwrap();
    assert_eq!(lambda_d(&clifford_rep(3).unwrap(), &v3, 1.0, 1e-3, &opts).unwrap(), None);
    // d = 2 binds at any strength, but only just below m
    let grid = GridSpec::new(2, 5.0, 32).unwrap();
    let rep = clifford_rep(2).unwrap();
    let v = gaussian_well(grid).scaled(1e-4).unwrap();
    let gap = gap_eigenvalues(&rep, &v, 1.0, 0.05, 1e-8, &opts).unwrap();
    assert!(gap.is_empty());
    for &e in &[0.1, 0.5, 1.0, 1.9] {
        assert_eq!(count_gap_eigenvalues(&rep, &v, 1.0, e, &gap, &opts).unwrap(), (0, 0));
    }
}

#[test]
fn positive_comparison_operators() {
    let grid = GridSpec::new(2, 5.0, 16).unwrap();
    let v = gaussian_well(grid);
    for op in [BsOperator::schrodinger(&v, -0.5).unwrap(), BsOperator::pseudo_relativistic(&v, 1.0, 0.3).unwrap()] {
        let all = dense_eigenvalues(&assemble(&op));
        assert!(all[0] > -1e-12 * all[all.len() - 1], "{}", all[0]);
    }
    assert!(BsOperator::schrodinger(&v, 0.1).is_err());
    assert!(BsOperator::pseudo_relativistic(&v, 1.0, 0.0).is_err());
}

#[test]
fn explicit_1d_optimizer_grid_convergence() {
    let rep = clifford_rep(1).unwrap();
    let k = Keller1DParams::new(1.0, 2.0, 0.0).unwrap();
    let opts = LanczosOpts::default();
    let solve = |a: f64, l: usize| {
        let grid = GridSpec::new(1, a, l).unwrap();
        let v = PotentialField::from_fn(grid, |x| k.potential(x[0])).unwrap();
        lambda_d(&rep, &v, 1.0, 1e-8, &opts).unwrap().unwrap()
    };
    let (coarse, fine) = (solve(15.0, 512), solve(30.0, 2048));
    // coarse-grid error estimate: distance of the coarse solve from the exact ground state at 0
    assert!((coarse - fine).abs() <= 5.0 * coarse.abs().max(1e-8), "{coarse} vs {fine}");
    assert!(fine.abs() < 1e-2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn top_branch_is_nondecreasing(seed in 0u64..1000, l1 in -0.95f64..0.95, dl in 0.001f64..0.5) {
        let grid = GridSpec::new(1, 6.0, 64).unwrap();
        let rep = clifford_rep(1).unwrap();
        let v = random_potential(grid, seed);
        let l2 = (l1 + dl).min(0.99);
        let opts = LanczosOpts { tol: 1e-11, ..Default::default() };
        let a = extremal_eigs(&BsOperator::dirac(&rep, &v, 1.0, l1).unwrap(), 3, 3, &opts, &[]).unwrap();
        let b = extremal_eigs(&BsOperator::dirac(&rep, &v, 1.0, l2).unwrap(), 3, 3, &opts, &[]).unwrap();
        for j in 0..3 {
            prop_assert!(b.top[j] >= a.top[j] - 1e-8);
            prop_assert!(b.bottom[j] >= a.bottom[j] - 1e-8);
        }
    }

    #[test]
    fn counts_grow_with_potential(seed in 0u64..1000, e in 0.05f64..1.9) {
        let grid = GridSpec::new(1, 8.0, 64).unwrap();
        let rep = clifford_rep(1).unwrap();
        let v = random_potential(grid, seed).scaled(0.5).unwrap();
        let opts = LanczosOpts::default();
        let op1 = BsOperator::dirac(&rep, &v, 1.0, 1.0 - e).unwrap();
        let op2 = BsOperator::dirac(&rep, &v.scaled(2.0).unwrap(), 1.0, 1.0 - e).unwrap();
        prop_assert!(count_at_least(&op2, 1.0, &opts).unwrap() >= count_at_least(&op1, 1.0, &opts).unwrap());
        prop_assert_eq!(op1.dim(), 128);
    }
}
