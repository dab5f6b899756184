//! Property tests over the public surface.

use proptest::prelude::*;
use subrayleigh::scene::objects;
use subrayleigh::specfun::{bessel_j1, encircled_energy, somb, RadialProfile};
use subrayleigh::{fit_scaling, ApertureGrid};

proptest! {
    #[test]
    fn j1_odd_and_somb_bounded(x in -1.0e4f64..1.0e4) {
        let plus = bessel_j1(x).unwrap();
        let minus = bessel_j1(-x).unwrap();
        prop_assert_eq!(plus, -minus);
        let s = somb(x).unwrap();
        prop_assert!(s.abs() <= 1.0);
        if x.abs() > 0.5 {
            prop_assert!(s * s < 1.0);
        }
    }

    #[test]
    fn encircled_energy_monotone_in_radius(
        n in 1u32..6,
        a in 0.0f64..1.0,
        b in 0.0f64..1.0,
    ) {
        let profile = RadialProfile::for_photon_number(n).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let r_lo = lo * profile.cutoff_radius();
        let r_hi = hi * profile.cutoff_radius();
        let e_lo = encircled_energy(&profile, r_lo).unwrap();
        let e_hi = encircled_energy(&profile, r_hi).unwrap();
        prop_assert!(e_lo <= e_hi + 1e-15);
        prop_assert!((0.0..=1.0).contains(&e_lo));
    }

    #[test]
    fn fit_slope_invariant_under_positive_scaling(
        exponent in -2.0f64..2.0,
        scale in 1e-6f64..1e6,
    ) {
        let pts: Vec<(f64, f64)> = (1..=6)
            .map(|n| (n as f64, 3.0 * (n as f64).powf(exponent)))
            .collect();
        let scaled: Vec<(f64, f64)> = pts.iter().map(|(n, v)| (*n, scale * v)).collect();
        let a = fit_scaling(&pts).unwrap();
        let b = fit_scaling(&scaled).unwrap();
        prop_assert!((a.slope - b.slope).abs() <= 1e-9);
        prop_assert!((a.slope - exponent).abs() <= 1e-9);
    }

    #[test]
    fn efficiency_xi_below_one_in_regime(
        eta in 0.01f64..1.0,
        dw_dt in 1e-6f64..1.0,
        s_over_a in 1e-9f64..1.0,
        focusing in 10.0f64..1e9,
    ) {
        // Any source satisfying the focusing (pi dk_t^2 A >= 10) and
        // monochromaticity (dw dt < 1) assumptions has xi < 1.
        let delta_k_t = (focusing / std::f64::consts::PI).sqrt();
        let src = subrayleigh::SourceConfig {
            eta,
            dw_dt,
            s_over_a,
            delta_k_t,
            ..subrayleigh::SourceConfig::default()
        };
        prop_assert!(src.warnings().is_empty());
        prop_assert!(subrayleigh::efficiency_xi(&src) < 1.0);
    }

    #[test]
    fn pgm_roundtrip_within_quantization(seed in 0u64..1000) {
        // Random smooth-ish grids survive a save/load cycle within one
        // 16-bit quantization step after peak normalization.
        let g = 24usize;
        let grid = ApertureGrid::from_fn(1.0, g, |x, y| {
            0.5 + 0.5 * (seed as f64 * 0.01 + 7.0 * x + 11.0 * y * y).sin()
        })
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.pgm");
        subrayleigh::save_pgm(&grid, &path, 1.0).unwrap();
        let back = subrayleigh::load_pgm(&path).unwrap();
        let peak = grid.values().iter().fold(0.0f64, |m, v| m.max(*v));
        for (a, b) in grid.values().iter().zip(back.values()) {
            prop_assert!((a / peak - b).abs() <= 1.0 / 65535.0 + 1e-12);
        }
    }
}

#[test]
fn two_point_objects_always_symmetric() {
    // Realized separations snap to odd pixel multiples, symmetric about 0.
    for g in [64usize, 100, 256] {
        for sep in [0.05, 0.1, 0.3] {
            let (grid, actual) = objects::two_point(g, 1.0, sep, subrayleigh::Axis::X).unwrap();
            let cols: Vec<usize> = grid
                .values()
                .iter()
                .enumerate()
                .filter(|(_, v)| **v > 0.0)
                .map(|(i, _)| i % g)
                .collect();
            assert_eq!(cols.len(), 2);
            let x_sum = grid.x_at(cols[0]) + grid.x_at(cols[1]);
            assert!(x_sum.abs() < 1e-12);
            assert!((actual - sep).abs() <= grid.pitch() + 1e-12);
        }
    }
}
