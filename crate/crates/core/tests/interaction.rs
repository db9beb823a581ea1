use proptest::prelude::*;

use ple_core::interaction::{analytic_profile, exponent_bounds, find_zeros, InteractionProfile, Side};
use ple_core::lattice::{HoppingModel, SigmaXParams};
use ple_core::C64;

fn gapped_sigma_z() -> impl Strategy<Value = HoppingModel> {
    (1..=4i32, 0..=4i32)
        .prop_flat_map(|(p, q)| {
            let n = (p + q + 1) as usize;
            (Just(p), prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n))
        })
        .prop_filter_map("gapless", |(p, amps)| {
            let terms: Vec<(i32, C64)> = amps.iter().enumerate().map(|(i, &(re, im))| (i as i32 - p, C64::new(re, im))).collect();
            let m = HoppingModel::sigma_z(terms).ok()?;
            (m.min_abs_h().0 > 0.02 * m.max_abs_amplitude()).then_some(m)
        })
}

fn profile(m: &HoppingModel, w: (i32, i32)) -> InteractionProfile {
    let zs = find_zeros(&m.char_poly().unwrap()).unwrap();
    analytic_profile(&zs, w).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exponents_respect_multiplicity_bound(m in gapped_sigma_z()) {
        let (right, left) = exponent_bounds(&m).unwrap();
        let p = profile(&m, (-20, 20));
        for t in &p.terms {
            let bound = match t.side { Side::Right => right, Side::Left => left };
            prop_assert!(t.exponent < bound, "{:?} exponent {} bound {}", t.side, t.exponent, bound);
        }
    }

    #[test]
    fn sigma_z_profiles_vanish_on_a(m in gapped_sigma_z()) {
        let p = profile(&m, (-25, 25));
        prop_assert!(p.a.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn sigma_x_profiles_are_mirror_symmetric(tp0 in 0.2..1.5f64, tp1 in 0.2..1.5f64, m0 in -1.0..1.0f64) {
        let m = HoppingModel::sigma_x(SigmaXParams { tp0, tp1, m0 }).unwrap();
        prop_assume!(m.min_abs_h().0 > 0.05);
        let p = profile(&m, (-15, 15));
        for x in 0..=15 {
            prop_assert!((p.eval_a(x).norm() - p.eval_a(-x).norm()).abs() < 1e-10);
            prop_assert!((p.eval_b(x).norm() - p.eval_b(-x).norm()).abs() < 1e-10);
        }
    }
}

/// Minimal model with `f(z) = t_{-1} + z + z^2`, both zeros inside.
fn minimal(t_minus1: f64) -> HoppingModel {
    HoppingModel::sigma_z_real(&[(0, 1.0), (-1, t_minus1), (1, 1.0)]).unwrap()
}

#[test]
fn two_exponentials_collapse_to_ple() {
    let w = (-5, 60);
    let ple = profile(&minimal(0.25), w);
    assert_eq!(ple.max_exponent(Side::Right), Some(1));
    let mut last = f64::INFINITY;
    // zeros split by sqrt(1 - 4 t_{-1})
    for sep in [1e-2, 1e-3, 1e-4, 1e-5, 1e-9] {
        let t1 = (1.0 - sep * sep) / 4.0;
        let p = profile(&minimal(t1), w);
        let dev = p.xs().map(|x| (p.eval_b(x) - ple.eval_b(x)).norm()).fold(0.0, f64::max);
        assert!(dev < last, "sep {sep}: {dev} !< {last}");
        last = dev;
    }
    assert!(last < 1e-6, "{last}");
}
