//! Single-radio energy detector under the large-M Gaussian approximation.
//!
//! The energy `Y = sum_m |R(m)|^2` over `M` samples is treated as normal with
//! moments
//!
//! ```text
//! H0: mean M s2,         var 2 M s2^2
//! H1: mean M (s2 + g),   var 2 M (s2 + 2 g) s2
//! ```
//!
//! where `s2` is the noise variance and `g` the squared channel gain.

use libm::erfc;
use statrs::function::erf::erfc_inv;

use crate::error::{Result, SenseError};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Tail probability of the standard normal, `Pr(Z > x)`.
pub fn q_tail(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Inverse of [`q_tail`].
pub fn q_tail_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(SenseError::Domain {
            value: p,
            domain: "(0, 1)",
        });
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    let mut x = std::f64::consts::SQRT_2 * erfc_inv(2.0 * p);
    // Newton polish; the tail side keeps the residual well conditioned.
    for _ in 0..2 {
        let resid = if x >= 0.0 {
            q_tail(x) - p
        } else {
            (1.0 - p) - q_tail(-x)
        };
        let dens = normal_pdf(x);
        if dens <= 0.0 {
            break;
        }
        x += resid / dens;
    }
    Ok(x)
}

/// Moments of the energy statistic for one radio on one band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianApprox {
    pub mean_h0: f64,
    pub mean_h1: f64,
    pub var_h0: f64,
    pub var_h1: f64,
}

impl GaussianApprox {
    pub fn new(samples: usize, noise_var: f64, gain: f64) -> Self {
        let m = samples as f64;
        GaussianApprox {
            mean_h0: m * noise_var,
            mean_h1: m * (noise_var + gain),
            var_h0: 2.0 * m * noise_var * noise_var,
            var_h1: 2.0 * m * (noise_var + 2.0 * gain) * noise_var,
        }
    }
}

/// Q-argument of the false-alarm probability.
pub fn pf_single_arg(threshold: f64, samples: usize, noise_var: f64) -> f64 {
    let m = samples as f64;
    (threshold - m * noise_var) / (noise_var * (2.0 * m).sqrt())
}

/// Q-argument of the detection probability.
pub fn pd_single_arg(threshold: f64, samples: usize, noise_var: f64, gain: f64) -> f64 {
    let m = samples as f64;
    (threshold - m * (noise_var + gain))
        / (noise_var.sqrt() * (2.0 * m * (noise_var + 2.0 * gain)).sqrt())
}

pub fn pf_single(threshold: f64, samples: usize, noise_var: f64) -> f64 {
    q_tail(pf_single_arg(threshold, samples, noise_var))
}

pub fn pd_single(threshold: f64, samples: usize, noise_var: f64, gain: f64) -> f64 {
    q_tail(pd_single_arg(threshold, samples, noise_var, gain))
}

/// Threshold whose false-alarm probability equals `target_pf`.
pub fn threshold_for_pf(target_pf: f64, samples: usize, noise_var: f64) -> Result<f64> {
    let m = samples as f64;
    Ok(m * noise_var + noise_var * (2.0 * m).sqrt() * q_tail_inv(target_pf)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Composite Simpson integration of the normal density over `[x, x + 40]`.
    fn q_oracle(x: f64) -> f64 {
        if x < 0.0 {
            return 1.0 - q_oracle(-x);
        }
        let n = 40_000;
        let h = 40.0 / n as f64;
        let mut acc = normal_pdf(x) + normal_pdf(x + 40.0);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * normal_pdf(x + i as f64 * h);
        }
        acc * h / 3.0
    }

    fn q_inv_oracle(p: f64) -> f64 {
        let (mut lo, mut hi) = (-40.0, 40.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if q_oracle(mid) > p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn q_tail_reference_values() {
        assert_eq!(q_tail(0.0), 0.5);
        assert!((q_oracle(1.0) - 0.158655).abs() < 1e-6);
        assert!((q_tail(1.0) - q_oracle(1.0)).abs() < 1e-12);
        assert!((q_tail(-2.0) - q_oracle(-2.0)).abs() < 1e-12);
        // 30-digit reference values; argument rounding in x / sqrt(2) limits
        // relative accuracy to about x^2 ulp.
        let table = [
            (-6.0, 0.999_999_999_013_412_354_96),
            (-3.3, 0.999_516_575_857_616_222_8),
            (-0.7, 0.758_036_347_776_926_985_25),
            (0.25, 0.401_293_674_317_076_275_76),
            (1.0, 0.158_655_253_931_457_051_41),
            (2.5, 0.006_209_665_325_776_135_167),
            (5.0, 2.866_515_718_791_939_116_7e-7),
            (8.0, 6.220_960_574_271_784_123_5e-16),
        ];
        for (x, q) in table {
            assert!((q_tail(x) - q).abs() <= 1e-14 * q, "x = {x}: {}", q_tail(x));
        }
    }

    #[test]
    fn q_tail_inv_reference_values() {
        assert_eq!(q_tail_inv(0.5).unwrap(), 0.0);
        let a = q_tail_inv(0.158655).unwrap();
        assert!((a - 1.0).abs() < 1e-5);
        assert!((a - q_inv_oracle(0.158655)).abs() < 1e-9);
        let b = q_tail_inv(0.9).unwrap();
        assert!((b + 1.281552).abs() < 1e-5);
        assert!((b - q_inv_oracle(0.9)).abs() < 1e-9);
    }

    #[test]
    fn q_tail_inv_rejects_out_of_domain() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(
                matches!(q_tail_inv(p), Err(SenseError::Domain { .. })),
                "p = {p}"
            );
        }
    }

    #[test]
    fn q_tail_inv_sign_follows_half() {
        assert!(q_tail_inv(0.4999).unwrap() > 0.0);
        assert!(q_tail_inv(0.5001).unwrap() < 0.0);
        assert!(q_tail_inv(1e-300).unwrap() > 37.0);
    }

    #[test]
    fn pf_single_examples() {
        assert_eq!(pf_single(100.0, 100, 1.0), 0.5);
        let g = 100.0 + 200f64.sqrt();
        assert!((pf_single(g, 100, 1.0) - q_oracle(1.0)).abs() < 1e-12);
        assert_eq!(pf_single(f64::INFINITY, 100, 1.0), 0.0);
    }

    #[test]
    fn pd_single_examples() {
        assert_eq!(pd_single(117.0, 100, 1.0, 0.17), 0.5);
        let g = 117.0 + 268f64.sqrt();
        assert!((pd_single(g, 100, 1.0, 0.17) - q_oracle(1.0)).abs() < 1e-12);
        for gamma in [80.0, 100.0, 113.0, 140.0] {
            assert_eq!(pd_single(gamma, 100, 1.0, 0.0), pf_single(gamma, 100, 1.0));
        }
    }

    #[test]
    fn threshold_for_pf_examples() {
        assert_eq!(threshold_for_pf(0.5, 100, 1.0).unwrap(), 100.0);
        let t = threshold_for_pf(0.158655, 100, 1.0).unwrap();
        assert!((t - (100.0 + 200f64.sqrt())).abs() < 1e-3);
        let t = threshold_for_pf(0.01, 100, 1.0).unwrap();
        let expect = 100.0 + 200f64.sqrt() * q_inv_oracle(0.01);
        assert!((t - expect).abs() < 1e-8);
        assert!(threshold_for_pf(1.0, 100, 1.0).is_err());
    }

    #[test]
    fn gaussian_moments_ordering() {
        let a = GaussianApprox::new(100, 1.0, 0.17);
        assert_eq!(a.mean_h0, 100.0);
        assert!((a.mean_h1 - 117.0).abs() < 1e-12);
        assert_eq!(a.var_h0, 200.0);
        assert!((a.var_h1 - 268.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn q_tail_symmetry(x in -30.0f64..30.0) {
            prop_assert!((q_tail(x) + q_tail(-x) - 1.0).abs() <= 1e-14);
        }

        #[test]
        fn q_inverse_round_trip(p in 1e-12f64..(1.0 - 1e-12)) {
            let x = q_tail_inv(p).unwrap();
            prop_assert!(((q_tail(x) - p) / p).abs() <= 1e-12);
            prop_assert_eq!(x >= 0.0, p <= 0.5);
        }

        #[test]
        fn threshold_round_trip(p in 1e-9f64..(1.0 - 1e-9), m in 1usize..1000, s2 in 0.01f64..10.0) {
            let t = threshold_for_pf(p, m, s2).unwrap();
            prop_assert!((pf_single(t, m, s2) - p).abs() <= 1e-9);
        }

        #[test]
        fn detector_probabilities_decrease_in_threshold(
            a in 0.0f64..400.0, d in 0.01f64..50.0, g in 0.0f64..2.0,
        ) {
            prop_assert!(pf_single(a + d, 100, 1.0) <= pf_single(a, 100, 1.0));
            prop_assert!(pd_single(a + d, 100, 1.0, g) <= pd_single(a, 100, 1.0, g));
            // Strict where the tails are not saturated.
            if pf_single(a, 100, 1.0) > 1e-12 && pf_single(a, 100, 1.0) < 1.0 - 1e-12 {
                prop_assert!(pf_single(a + d, 100, 1.0) < pf_single(a, 100, 1.0));
            }
        }

        #[test]
        fn detection_increases_with_gain_above_h0_mean(
            gamma in 100.0f64..250.0, g in 0.0f64..1.5,
        ) {
            let h = 1e-5;
            let fd = (pd_single(gamma, 100, 1.0, g + h) - pd_single(gamma, 100, 1.0, (g - h).max(0.0)))
                / (g + h - (g - h).max(0.0));
            prop_assert!(fd >= -1e-12);
        }
    }
}
