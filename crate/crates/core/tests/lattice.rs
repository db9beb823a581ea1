use std::f64::consts::PI;

use proptest::prelude::*;

use ple_core::interaction::find_zeros;
use ple_core::lattice::{hermitian2_eigs, Block, HoppingModel, SigmaXParams};
use ple_core::C64;

fn gapped_sigma_z() -> impl Strategy<Value = HoppingModel> {
    (1..=3i32, 0..=3i32)
        .prop_flat_map(|(p, q)| {
            let n = (p + q + 1) as usize;
            (Just(p), prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n))
        })
        .prop_filter_map("gapless or degenerate", |(p, amps)| {
            let terms: Vec<(i32, C64)> = amps.iter().enumerate().map(|(i, &(re, im))| (i as i32 - p, C64::new(re, im))).collect();
            let m = HoppingModel::sigma_z(terms).ok()?;
            (m.min_abs_h().0 > 0.02 * m.max_abs_amplitude()).then_some(m)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn winding_matches_argument_principle(m in gapped_sigma_z()) {
        prop_assert_eq!(m.winding_number().unwrap(), m.winding_by_argument(100_000).unwrap());
    }

    #[test]
    fn gapped_iff_no_unit_circle_zero(m in gapped_sigma_z()) {
        prop_assert!(m.band_gap() > 0.0);
        let zs = find_zeros(&m.char_poly().unwrap()).unwrap();
        prop_assert!(zs.clusters.iter().all(|c| (c.z.norm() - 1.0).abs() >= 1e-9));
    }

    #[test]
    fn chiral_spectrum_is_symmetric(m in gapped_sigma_z(), k in -PI..PI) {
        let [lo, hi] = hermitian2_eigs(&m.bloch_matrix(k));
        let h = m.bloch_h(k).norm();
        prop_assert!((hi - h).abs() < 1e-12 && (lo + h).abs() < 1e-12);
    }

    #[test]
    fn rotation_reproduces_sigma_x_matrix(tp0 in -1.5..1.5f64, tp1 in -1.5..1.5f64, m0 in -1.5..1.5f64) {
        let Ok(m) = HoppingModel::sigma_x(SigmaXParams { tp0, tp1, m0 }) else { return Ok(()) };
        let z = m.rotate_to_sigma_z();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // R_y(-π/2)
        let r: Block = [[C64::new(s, 0.0), C64::new(s, 0.0)], [C64::new(-s, 0.0), C64::new(s, 0.0)]];
        for i in 0..100 {
            let k = -PI + 2.0 * PI * (i as f64 + 0.5) / 100.0;
            let hz = z.bloch_matrix(k);
            let hx = m.bloch_matrix(k);
            for a in 0..2 {
                for b in 0..2 {
                    // (R† H_z R)_{ab}
                    let mut v = C64::new(0.0, 0.0);
                    for c in 0..2 {
                        for d in 0..2 {
                            v += r[c][a].conj() * hz[c][d] * r[d][b];
                        }
                    }
                    prop_assert!((v - hx[a][b]).norm() < 1e-12, "k={} ({},{}): {} vs {}", k, a, b, v, hx[a][b]);
                }
            }
        }
    }
}

#[test]
fn gapless_model_has_unit_circle_zero() {
    let m = HoppingModel::squared_family(1.0);
    assert!(!m.is_gapped());
    assert!(find_zeros(&m.char_poly().unwrap()).is_err());
}
