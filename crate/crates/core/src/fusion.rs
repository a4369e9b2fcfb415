//! Soft linear fusion of per-radio energies at the fusion center.
//!
//! On band `k` the fused statistic is `z_k = w_k^T Y_k`. With the per-radio
//! Gaussian approximation it is again normal:
//!
//! ```text
//! H0: mean M s2 w^T 1,          var 2 M s2^2 w^T w
//! H1: mean M w^T (s2 1 + G_k),  var 2 M s2 w^T (s2 I + 2 diag G_k) w
//! ```

use crate::detector::{normal_pdf, q_tail};
use crate::error::{Result, SenseError};
use crate::model::{
    validate_design, DetectionMetrics, FusionDesign, PolicyConstraints, SensingScenario,
};

/// Weight vectors with Euclidean norm below this are rejected.
pub const MIN_WEIGHT_NORM: f64 = 1e-12;

pub(crate) fn check_weights(band: usize, w: &[f64]) -> Result<()> {
    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < MIN_WEIGHT_NORM || !norm.is_finite() {
        return Err(SenseError::DegenerateWeights { band, norm });
    }
    Ok(())
}

/// Fused test-statistic moments for one band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusedMoments {
    pub mean_h0: f64,
    pub mean_h1: f64,
    pub var_h0: f64,
    pub var_h1: f64,
}

pub fn fused_moments(s: &SensingScenario, w: &[f64], band: usize) -> Result<FusedMoments> {
    check_weights(band, w)?;
    let m = s.samples_per_band as f64;
    let s2 = s.noise_variance;
    let g = s.gains(band);
    let sum_w: f64 = w.iter().sum();
    let sum_wg: f64 = w.iter().zip(g).map(|(a, b)| a * b).sum();
    let ww: f64 = w.iter().map(|a| a * a).sum();
    let wgw: f64 = w.iter().zip(g).map(|(a, b)| a * a * b).sum();
    Ok(FusedMoments {
        mean_h0: m * s2 * sum_w,
        mean_h1: m * (s2 * sum_w + sum_wg),
        var_h0: 2.0 * m * s2 * s2 * ww,
        var_h1: 2.0 * m * s2 * (s2 * ww + 2.0 * wgw),
    })
}

/// Q-arguments `(a_f, a_d)` with `Pf = Q(a_f)` and `Pd = Q(a_d)`.
pub fn fused_args(
    s: &SensingScenario,
    w: &[f64],
    threshold: f64,
    band: usize,
) -> Result<(f64, f64)> {
    let mo = fused_moments(s, w, band)?;
    Ok((
        (threshold - mo.mean_h0) / mo.var_h0.sqrt(),
        (threshold - mo.mean_h1) / mo.var_h1.sqrt(),
    ))
}

pub fn pf_fused(s: &SensingScenario, w: &[f64], threshold: f64, band: usize) -> Result<f64> {
    fused_args(s, w, threshold, band).map(|(a, _)| q_tail(a))
}

pub fn pd_fused(s: &SensingScenario, w: &[f64], threshold: f64, band: usize) -> Result<f64> {
    fused_args(s, w, threshold, band).map(|(_, b)| q_tail(b))
}

/// Exact (Gaussian-approximate) metrics of a design.
pub fn metrics(
    s: &SensingScenario,
    p: &PolicyConstraints,
    d: &FusionDesign,
) -> Result<DetectionMetrics> {
    validate_design(s, d)?;
    let k = s.num_bands;
    if p.throughput_rates.len() != k || p.interference_costs.len() != k {
        return Err(SenseError::Dimension {
            what: "policy vectors",
            expected: k,
            got: p.throughput_rates.len().min(p.interference_costs.len()),
        });
    }
    let mut pf = Vec::with_capacity(k);
    let mut pd = Vec::with_capacity(k);
    for band in 0..k {
        let (a, b) = fused_args(s, &d.weights[band], d.thresholds[band], band)?;
        pf.push(q_tail(a));
        pd.push(q_tail(b));
    }
    let pm: Vec<f64> = pd.iter().map(|x| 1.0 - x).collect();
    let throughput = p
        .throughput_rates
        .iter()
        .zip(&pf)
        .map(|(r, f)| r * (1.0 - f))
        .sum();
    let interference = p
        .interference_costs
        .iter()
        .zip(&pm)
        .map(|(c, m)| c * m)
        .sum();
    Ok(DetectionMetrics {
        pf,
        pd,
        pm,
        throughput,
        interference,
    })
}

/// Gradients of one band's `Pf` and `Pd` with respect to its weights and
/// threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct BandGradient {
    pub dpf_dw: Vec<f64>,
    pub dpf_dthreshold: f64,
    pub dpd_dw: Vec<f64>,
    pub dpd_dthreshold: f64,
}

pub fn band_gradient(
    s: &SensingScenario,
    w: &[f64],
    threshold: f64,
    band: usize,
) -> Result<BandGradient> {
    check_weights(band, w)?;
    let m = s.samples_per_band as f64;
    let s2 = s.noise_variance;
    let g = s.gains(band);

    // Pf = Q(A), A = (t - M s2 1'w) / (s2 sqrt(2M) |w|)
    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    let sum_w: f64 = w.iter().sum();
    let cf = s2 * (2.0 * m).sqrt();
    let num_f = threshold - m * s2 * sum_w;
    let a = num_f / (cf * norm);
    let da_dt = 1.0 / (cf * norm);
    let phi_a = normal_pdf(a);
    let dpf_dw = w
        .iter()
        .map(|&wn| {
            let da = -m * s2 / (cf * norm) - num_f * wn / (cf * norm.powi(3));
            -phi_a * da
        })
        .collect();

    // Pd = Q(B), B = (t - M a'w) / mu, mu = sqrt(2 M s2 w'Dw)
    let quad: f64 = w.iter().zip(g).map(|(x, gn)| x * x * (s2 + 2.0 * gn)).sum();
    let mu = (2.0 * m * s2 * quad).sqrt();
    let shift: f64 = w.iter().zip(g).map(|(x, gn)| x * (s2 + gn)).sum();
    let num_d = threshold - m * shift;
    let b = num_d / mu;
    let phi_b = normal_pdf(b);
    let dpd_dw = w
        .iter()
        .zip(g)
        .map(|(&wn, &gn)| {
            let dmu = 2.0 * m * s2 * (s2 + 2.0 * gn) * wn / mu;
            let db = -m * (s2 + gn) / mu - num_d * dmu / (mu * mu);
            -phi_b * db
        })
        .collect();

    Ok(BandGradient {
        dpf_dw,
        dpf_dthreshold: -phi_a * da_dt,
        dpd_dw,
        dpd_dthreshold: -phi_b / mu,
    })
}

/// Per-band gradients for every band of a design.
pub fn metric_gradients(s: &SensingScenario, d: &FusionDesign) -> Result<Vec<BandGradient>> {
    validate_design(s, d)?;
    (0..s.num_bands)
        .map(|k| band_gradient(s, &d.weights[k], d.thresholds[k], k))
        .collect()
}

/// `w^T diag(G_k) w / w^T w`.
pub fn rayleigh_quotient(s: &SensingScenario, w: &[f64], band: usize) -> f64 {
    let num: f64 = w.iter().zip(s.gains(band)).map(|(x, g)| x * x * g).sum();
    let den: f64 = w.iter().map(|x| x * x).sum();
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::{pd_single, pf_single, GaussianApprox};
    use proptest::prelude::*;

    fn t1() -> SensingScenario {
        SensingScenario::table1()
    }

    #[test]
    fn indicator_weights_reduce_to_single_radio() {
        let s = t1();
        for band in 0..s.num_bands {
            for n in 0..2 {
                let mut w = vec![0.0; 2];
                w[n] = 1.0;
                let mo = fused_moments(&s, &w, band).unwrap();
                let single = GaussianApprox::new(100, 1.0, s.channel_gains[band][n]);
                assert_eq!(mo.mean_h0, single.mean_h0);
                assert!((mo.mean_h1 - single.mean_h1).abs() <= 1e-14 * single.mean_h1);
                assert_eq!(mo.var_h0, single.var_h0);
                assert!((mo.var_h1 - single.var_h1).abs() <= 1e-14 * single.var_h1);
            }
        }
    }

    #[test]
    fn table1_band0_equal_weights() {
        let s = t1();
        let mo = fused_moments(&s, &[1.0, 1.0], 0).unwrap();
        assert!((mo.mean_h1 - 238.0).abs() < 1e-12);
        assert_eq!(mo.mean_h0, 200.0);
        assert_eq!(pf_fused(&s, &[1.0, 1.0], 200.0, 0).unwrap(), 0.5);
    }

    #[test]
    fn zero_weights_rejected() {
        let s = t1();
        assert!(matches!(
            fused_moments(&s, &[0.0, 0.0], 0),
            Err(SenseError::DegenerateWeights { band: 0, .. })
        ));
        assert!(pf_fused(&s, &[1e-13, 0.0], 1.0, 3).is_err());
        assert!(pd_fused(&s, &[0.0, 0.0], 1.0, 3).is_err());
    }

    #[test]
    fn threshold_limits_give_extreme_metrics() {
        let s = t1();
        let p = PolicyConstraints::table1(1.0);
        let high = FusionDesign {
            weights: vec![vec![1.0, 1.0]; 8],
            thresholds: vec![1e9; 8],
        };
        let m = metrics(&s, &p, &high).unwrap();
        assert!((m.throughput - 4019.0).abs() < 1e-9);
        assert!((m.interference - 20.68).abs() < 1e-9);
        assert!(m.pm.iter().all(|&x| x == 1.0));

        let low = FusionDesign {
            weights: vec![vec![1.0, 1.0]; 8],
            thresholds: vec![0.0; 8],
        };
        let m = metrics(&s, &p, &low).unwrap();
        assert!(m.throughput < 1e-6);
        assert!(m.interference < 1e-9);
    }

    #[test]
    fn feasibility_flags_follow_residuals() {
        let s = t1();
        let p = PolicyConstraints::table1(3.0);
        // Thresholds at the fused H0 mean: pf = 0.5 on every band.
        let d = FusionDesign {
            weights: vec![vec![1.0, 1.0]; 8],
            thresholds: vec![200.0; 8],
        };
        let m = metrics(&s, &p, &d).unwrap();
        let r = m.residuals(&p);
        for k in 0..8 {
            assert_eq!(r.false_alarm[k], m.pf[k] - 0.5);
            assert_eq!(r.miss[k], m.pm[k] - 0.1);
        }
        let manual = m.pm.iter().all(|&x| x <= 0.1)
            && m.pf.iter().all(|&x| x <= 0.5)
            && m.interference <= 3.0;
        assert_eq!(r.is_feasible(0.0), manual);
        assert!(r.is_feasible(0.0));
        assert!(!metrics(&s, &p.with_budget(0.1), &d)
            .unwrap()
            .residuals(&p.with_budget(0.1))
            .is_feasible(0.0));
    }

    #[test]
    fn decreasing_in_threshold_gradient_sign() {
        let s = t1();
        for t in [150.0, 200.0, 240.0, 300.0] {
            let g = band_gradient(&s, &[0.3, 0.8], t, 2).unwrap();
            assert!(g.dpf_dthreshold < 0.0);
            assert!(g.dpd_dthreshold < 0.0);
        }
    }

    #[test]
    fn indicator_gradient_matches_single_detector_derivative() {
        let s = t1();
        let g = band_gradient(&s, &[1.0, 0.0], 110.0, 0).unwrap();
        let h = 1e-5;
        let fd_f = (pf_single(110.0 + h, 100, 1.0) - pf_single(110.0 - h, 100, 1.0)) / (2.0 * h);
        let fd_d = (pd_single(110.0 + h, 100, 1.0, 0.17) - pd_single(110.0 - h, 100, 1.0, 0.17))
            / (2.0 * h);
        assert!((g.dpf_dthreshold - fd_f).abs() <= 1e-7 * fd_f.abs());
        assert!((g.dpd_dthreshold - fd_d).abs() <= 1e-7 * fd_d.abs());
    }

    proptest! {
        #[test]
        fn pm_plus_pd_is_exactly_one(ts in proptest::collection::vec(0.0f64..400.0, 8)) {
            let s = t1();
            let p = PolicyConstraints::table1(1.0);
            let d = FusionDesign { weights: vec![vec![0.4, 1.0]; 8], thresholds: ts };
            let m = metrics(&s, &p, &d).unwrap();
            for k in 0..8 {
                prop_assert_eq!(m.pm[k] + m.pd[k], 1.0);
                prop_assert!(m.pf[k] >= 0.0 && m.pf[k] <= 1.0);
            }
            prop_assert!(m.throughput <= p.total_rate());
        }

        #[test]
        fn rayleigh_quotient_sandwich(w0 in 0.0f64..5.0, w1 in 0.0f64..5.0, band in 0usize..8) {
            prop_assume!(w0 + w1 > 1e-6);
            let s = t1();
            let q = rayleigh_quotient(&s, &[w0, w1], band);
            prop_assert!(q >= s.min_gain(band) - 1e-15);
            prop_assert!(q <= s.max_gain(band) + 1e-15);
        }

        #[test]
        fn zero_gain_makes_detection_equal_false_alarm(
            w0 in 0.01f64..3.0, w1 in 0.01f64..3.0, t in 0.0f64..600.0,
        ) {
            let mut s = t1();
            s.channel_gains[4] = vec![0.0, 0.0];
            let pf = pf_fused(&s, &[w0, w1], t, 4).unwrap();
            let pd = pd_fused(&s, &[w0, w1], t, 4).unwrap();
            prop_assert!((pf - pd).abs() <= 1e-14);
        }
    }
}
