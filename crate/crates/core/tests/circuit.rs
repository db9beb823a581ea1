use proptest::prelude::*;

use ple_core::circuit::{hoppings_from_circuit, CircuitParams};
use ple_core::interaction::check_ple_minimal;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// `C -> aC`, `L -> L/a` (mutuals included) leaves every frequency unchanged.
    #[test]
    fn scaling_leaves_frequencies_unchanged(a in 0.01..100.0f64, c0 in 0.0..60.0f64, cm in 0.0..60.0f64, m0 in -5.0..5.0f64) {
        let p = CircuitParams { c_0: c0 * 1e-15, c_minus: vec![cm * 1e-15], m_0: m0 * 1e-12, ..CircuitParams::reference() };
        let q = CircuitParams {
            c_f: p.c_f * a,
            c_0: p.c_0 * a,
            c_minus: p.c_minus.iter().map(|c| c * a).collect(),
            c_plus: p.c_plus.iter().map(|c| c * a).collect(),
            m_0: p.m_0 / a,
            m_minus1: p.m_minus1 / a,
            l_f: p.l_f / a,
        };
        let (hp, hq) = (hoppings_from_circuit(&p).unwrap(), hoppings_from_circuit(&q).unwrap());
        prop_assert!((hp.omega0_hz / hq.omega0_hz - 1.0).abs() < 1e-12);
        for m in [-1, 0, 1] {
            prop_assert!((hp.t_mhz(m) - hq.t_mhz(m)).abs() <= 1e-12 * hp.t_mhz(m).abs().max(1.0));
        }
    }
}

#[test]
fn reference_design_is_near_ple() {
    let h = hoppings_from_circuit(&CircuitParams::reference()).unwrap();
    let (t0, tm, tp) = (h.t_mhz(0), h.t_mhz(-1), h.t_mhz(1));
    assert!((4.0 * tp * tm / (t0 * t0) - 1.0).abs() < 0.05);
    assert!(check_ple_minimal(t0, tm, tp).gapped);
    let model = h.model.expect("model in t0 units");
    assert!((model.amplitude(0).re - 1.0).abs() < 1e-12);
}

#[test]
fn config_round_trip() {
    let text = serde_json::to_string(&CircuitParams::reference()).unwrap();
    assert!(text.contains("c_f_farad") && text.contains("l_f_henry"));
    let back: CircuitParams = serde_json::from_str(&text).unwrap();
    assert_eq!(back, CircuitParams::reference());
    assert!(serde_json::from_str::<CircuitParams>(r#"{"c_f_farad":1e-13,"l_f_henry":1e-9,"bogus":1}"#).is_err());
}
