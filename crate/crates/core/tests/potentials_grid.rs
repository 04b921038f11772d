mod common;

use std::f64::consts::PI;

use common::{rel, simpson};
use dirac_gap::grid::*;
use dirac_gap::potentials::PotentialFamily;
use dirac_gap::Error;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn grid_geometry() {
    let g = GridSpec::new(2, 3.0, 16).unwrap();
    assert_eq!(g.len(), 256);
    assert!((g.spacing() - 0.375).abs() < 1e-15);
    assert_eq!(g.point(g.origin())[..2], [0.0, 0.0]);
    assert_eq!(g.coord_1d(0), -3.0);
    assert_eq!(g.wavenumber_1d(8), -PI * 8.0 / 3.0);
    for i in [0, 17, 255] {
        assert_eq!(g.ravel(&g.unravel(i)), i);
    }
    assert!(matches!(GridSpec::new(4, 1.0, 16), Err(Error::Domain(_))));
    assert!(matches!(GridSpec::new(1, 1.0, 15), Err(Error::Domain(_))));
    assert!(matches!(GridSpec::new(1, -1.0, 16), Err(Error::Domain(_))));
}

#[test]
fn potential_field_rejects_bad_values() {
    let g = GridSpec::new(1, 1.0, 16).unwrap();
    let mut v = vec![1.0; 16];
    v[3] = -1e-3;
    assert!(matches!(PotentialField::new(g, v.clone()), Err(Error::Domain(_))));
    v[3] = f64::NAN;
    assert!(PotentialField::new(g, v).is_err());
    assert!(PotentialField::new(g, vec![0.0; 15]).is_err());
    assert!(PotentialField::zeros(g).scaled(-1.0).is_ok());
    assert!(PotentialField::new(g, vec![1.0; 16]).unwrap().scaled(-1.0).is_err());
}

#[test]
fn lp_norm_of_gaussian() {
    // || exp(-|x|^2) ||_p^p = (pi/p)^{d/2}
    for d in 1..=3 {
        let g = GridSpec::new(d, 6.0, 48).unwrap();
        let v = PotentialFamily::Gaussian { amplitude: 1.0, length: 1.0 }.field(g).unwrap();
        for &p in &[1.0, 2.0, 3.5] {
            assert!(rel(v.lp_norm(p).powf(p), (PI / p).powf(d as f64 / 2.0)) < 1e-10);
        }
        assert_eq!(v.lp_norm(f64::INFINITY), 1.0);
    }
}

#[test]
fn fft_plane_wave_lands_in_its_bin() {
    let g = GridSpec::new(2, 2.0, 16).unwrap();
    let fft = FftNd::new(&g);
    let target = g.ravel(&[3, 13]);
    let k = g.wavevector(target);
    let mut data: Vec<C64> = (0..g.len())
        .map(|i| {
            let x = g.point(i);
            C64::from_polar(1.0, k[0] * (x[0] + g.a) + k[1] * (x[1] + g.a))
        })
        .collect();
    fft.forward(&mut data);
    for (i, z) in data.iter().enumerate() {
        let want = if i == target { g.len() as f64 } else { 0.0 };
        assert!((z.norm() - want).abs() < 1e-9, "bin {i}");
    }
}

#[test]
fn spinor_inner_products() {
    let g = GridSpec::new(1, 1.0, 16).unwrap();
    let s = SpinorField::new(g, 2, vec![C64::new(1.0, 1.0); 32]).unwrap();
    assert!(rel(s.l2_norm(), (2.0 * 32.0 * g.cell()).sqrt()) < 1e-14);
    assert!(s.density().iter().all(|&r| (r - 4.0).abs() < 1e-14));
    assert!(SpinorField::new(g, 2, vec![C64::from(0.0); 31]).is_err());
}

#[test]
fn bump_has_prescribed_mass_and_support() {
    for &w in &[1.0, 0.3] {
        let fam = PotentialFamily::Bump { mass: 2.5, width: w };
        let f1 = fam.evaluator(1).unwrap();
        assert!(rel(simpson(|x| f1(&[x]), -w, w, 20_000), 2.5) < 1e-10);
        let f2 = fam.evaluator(2).unwrap();
        assert!(rel(2.0 * PI * simpson(|r| r * f2(&[r, 0.0]), 0.0, w, 20_000), 2.5) < 1e-10);
        let f3 = fam.evaluator(3).unwrap();
        assert!(rel(4.0 * PI * simpson(|r| r * r * f3(&[0.0, r, 0.0]), 0.0, w, 20_000), 2.5) < 1e-10);
        assert_eq!(f1(&[w * 1.0001]), 0.0);
        assert_eq!(fam.support_1d(), Some((-w, w)));
    }
    assert!(PotentialFamily::Bump { mass: 1.0, width: 0.0 }.validate(1).is_err());
    assert!(PotentialFamily::Keller1dCritical { p: 2.0, m: 1.0 }.validate(2).is_err());
    assert!(PotentialFamily::Gaussian { amplitude: -1.0, length: 1.0 }.validate(1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fft_round_trip(seed in 0u64..1000, d in 1usize..=3) {
        let g = GridSpec::new(d, 1.5, 16).unwrap();
        let fft = FftNd::new(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let orig: Vec<C64> = (0..g.len()).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let mut data = orig.clone();
        fft.forward(&mut data);
        fft.inverse(&mut data);
        let err = data.iter().zip(&orig).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12);
    }

    #[test]
    fn lp_norm_is_homogeneous(t in 0.0f64..10.0, p in 1.0f64..6.0) {
        let g = GridSpec::new(1, 4.0, 32).unwrap();
        let v = PotentialFamily::Gaussian { amplitude: 1.3, length: 0.7 }.field(g).unwrap();
        prop_assert!((v.scaled(t).unwrap().lp_norm(p) - t * v.lp_norm(p)).abs() <= 1e-12 * (1.0 + t));
    }
}
