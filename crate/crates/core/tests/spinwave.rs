use std::f64::consts::PI;

use proptest::prelude::*;

use ple_core::spinwave::{dispersion, fm_boundary, min_dispersion, DispersionSpec, SwKernel};

/// `(Σ_{r<=R} J(r)(cos kr - Jz), tail bound)` with the couplings written out.
fn truncated(kernel: SwKernel, jz: f64, k: f64) -> (f64, f64) {
    let (j, r_max, tail): (Box<dyn Fn(f64) -> f64>, usize, f64) = match kernel {
        SwKernel::Ple { xi } => {
            let l = (-1.0 / xi).exp();
            let r = 2000;
            // Σ_{r>R} r l^r <= (R+1) l^{R+1} / (1-l)^2
            (Box::new(move |r| r * l.powf(r)), r, (r as f64 + 1.0) * l.powi(r as i32 + 1) / (1.0 - l).powi(2))
        }
        SwKernel::Exp { xi } => {
            let l = (-1.0 / xi).exp();
            let r = 2000;
            (Box::new(move |r| l.powf(r)), r, l.powi(r as i32 + 1) / (1.0 - l))
        }
        SwKernel::Pow { xi } => {
            let r = 200_000;
            // Σ_{r>R} r^{-ξ} <= R^{1-ξ} / (ξ-1)
            (Box::new(move |r| r.powf(-xi)), r, (r as f64).powf(1.0 - xi) / (xi - 1.0))
        }
    };
    let s: f64 = (1..=r_max).map(|r| j(r as f64) * ((k * r as f64).cos() - jz)).sum();
    (s, tail * (1.0 + jz.abs()))
}

fn sw_kernel() -> impl Strategy<Value = SwKernel> {
    prop_oneof![
        (0.2..5.0f64).prop_map(|xi| SwKernel::Ple { xi }),
        (0.2..5.0f64).prop_map(|xi| SwKernel::Exp { xi }),
        (2.0..4.0f64).prop_map(|xi| SwKernel::Pow { xi }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn closed_forms_match_real_space_sums(kernel in sw_kernel(), jz in -1.5..1.5f64, k in -PI..PI) {
        let spec = DispersionSpec::new(kernel, jz).unwrap();
        let w = dispersion(&spec, k).unwrap();
        let (s, tail) = truncated(kernel, jz, k);
        prop_assert!((w - s).abs() <= 1e-10 + tail, "{:?} jz={} k={}: {} vs {} (tail {})", kernel, jz, k, w, s, tail);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn boundary_is_a_zero_of_the_minimum(kernel in sw_kernel()) {
        let b = fm_boundary(kernel).unwrap();
        let at = |jz: f64| min_dispersion(&DispersionSpec::new(kernel, jz).unwrap(), 20_000).unwrap().1;
        prop_assert!(at(b.jz).abs() <= 1e-9);
        // raising Jz lowers every ω_k
        prop_assert!(at(b.jz - 1e-3) > 0.0);
        prop_assert!(at(b.jz + 1e-3) < 0.0);
    }
}

#[test]
fn ple_boundary_below_threshold() {
    let b = fm_boundary(SwKernel::Ple { xi: 0.5 }).unwrap();
    let l = (-2.0f64).exp();
    let want = -((1.0 - l) / (1.0 + l)).powi(2);
    assert!((b.jz - want).abs() < 1e-14);
    assert!((b.jz + 1f64.tanh().powi(2)).abs() < 1e-14);
    assert_eq!(b.k0, PI);
}

#[test]
fn super_extensive_power_law() {
    let b = fm_boundary(SwKernel::Pow { xi: 0.8 }).unwrap();
    assert!(b.super_extensive);
    assert_eq!(b.jz, 0.0);
}
