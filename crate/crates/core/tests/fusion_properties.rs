use proptest::prelude::*;
use sensefuse_core::detector::{pd_single, pf_single};
use sensefuse_core::fusion::{band_gradient, metrics, pd_fused, pf_fused};
use sensefuse_core::{FusionDesign, PolicyConstraints, SensingScenario};

fn table1() -> SensingScenario {
    SensingScenario::table1()
}

fn weights_and_threshold() -> impl Strategy<Value = (Vec<f64>, f64, usize)> {
    (
        proptest::collection::vec(0.0f64..3.0, 2),
        -1.0f64..1.0,
        0usize..8,
    )
        .prop_filter("non-degenerate weights", |(w, _, _)| {
            w.iter().sum::<f64>() > 1e-3
        })
        .prop_map(|(w, z, k)| {
            // Threshold near the fused H0 mean so both tails are exercised.
            let mean = 100.0 * w.iter().sum::<f64>();
            let spread = 20.0 * w.iter().map(|x| x * x).sum::<f64>().sqrt();
            (w, mean + 3.0 * z * spread, k)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn scale_invariance((w, t, k) in weights_and_threshold(), c_exp in -3i32..=3) {
        let s = table1();
        let c = 10f64.powi(c_exp);
        let cw: Vec<f64> = w.iter().map(|x| c * x).collect();
        let pf = pf_fused(&s, &w, t, k).unwrap();
        let pd = pd_fused(&s, &w, t, k).unwrap();
        prop_assert!((pf_fused(&s, &cw, c * t, k).unwrap() - pf).abs() <= 1e-12);
        prop_assert!((pd_fused(&s, &cw, c * t, k).unwrap() - pd).abs() <= 1e-12);
    }

    #[test]
    fn fused_gradients_match_central_differences((w, t, k) in weights_and_threshold()) {
        let s = table1();
        let g = band_gradient(&s, &w, t, k).unwrap();
        let h = 1e-6 * (1.0 + t.abs());
        let fd_t = |f: &dyn Fn(&[f64], f64) -> f64| (f(&w, t + h) - f(&w, t - h)) / (2.0 * h);
        let pf = |w: &[f64], t: f64| pf_fused(&s, w, t, k).unwrap();
        let pd = |w: &[f64], t: f64| pd_fused(&s, w, t, k).unwrap();
        let mut analytic = vec![g.dpf_dthreshold, g.dpd_dthreshold];
        let mut numeric = vec![fd_t(&pf), fd_t(&pd)];
        for n in 0..w.len() {
            let hw = 1e-6 * (1.0 + w[n]);
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp[n] += hw;
            wm[n] = (wm[n] - hw).max(0.0);
            let step = wp[n] - wm[n];
            analytic.push(g.dpf_dw[n]);
            numeric.push((pf(&wp, t) - pf(&wm, t)) / step);
            analytic.push(g.dpd_dw[n]);
            numeric.push((pd(&wp, t) - pd(&wm, t)) / step);
        }
        let scale = analytic.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-12);
        for (a, n) in analytic.iter().zip(&numeric) {
            prop_assert!((a - n).abs() <= 1e-5 * scale, "analytic {a} numeric {n}");
        }
    }

    #[test]
    fn zero_gain_makes_detection_equal_false_alarm(w0 in 0.01f64..2.0, w1 in 0.0f64..2.0, z in -3.0f64..3.0) {
        let mut s = table1();
        s.channel_gains[4] = vec![0.0, 0.0];
        let w = [w0, w1];
        let t = 100.0 * (w0 + w1) + z * 14.0 * (w0 * w0 + w1 * w1).sqrt();
        let pf = pf_fused(&s, &w, t, 4).unwrap();
        let pd = pd_fused(&s, &w, t, 4).unwrap();
        prop_assert!((pf - pd).abs() <= 1e-14);
    }
}

#[test]
fn indicator_weights_reproduce_single_detector() {
    let s = table1();
    for k in 0..8 {
        for radio in 0..2 {
            let mut w = vec![0.0; 2];
            w[radio] = 1.0;
            for t in [60.0, 95.0, 100.0, 104.5, 117.0, 131.0, 160.0] {
                let g = s.channel_gains[k][radio];
                assert!((pf_fused(&s, &w, t, k).unwrap() - pf_single(t, 100, 1.0)).abs() <= 1e-14);
                assert!(
                    (pd_fused(&s, &w, t, k).unwrap() - pd_single(t, 100, 1.0, g)).abs() <= 1e-14
                );
            }
        }
    }
}

#[test]
fn metric_invariants_hold_on_random_designs() {
    let s = table1();
    let p = PolicyConstraints::table1(2.0);
    for i in 0..50 {
        let f = i as f64 / 50.0;
        let d = FusionDesign {
            weights: vec![vec![f, 1.0 - f + 1e-3]; 8],
            thresholds: vec![80.0 + 40.0 * f; 8],
        };
        let m = metrics(&s, &p, &d).unwrap();
        for k in 0..8 {
            assert_eq!(m.pm[k] + m.pd[k], 1.0);
            assert!((0.0..=1.0).contains(&m.pf[k]));
            // Non-negative gains never lower the detection probability.
            assert!(m.pd[k] >= m.pf[k]);
        }
        assert!(m.throughput <= p.total_rate());
    }
}
