//! Numerical midpoint checks of the two curvature facts the convex program
//! relies on:
//!
//! * `Q(t' - M (s2 1 + G_k)'w')` is concave where `t' <= M (s2 1 + G_k)'w'`;
//! * the surrogate bound `g_k(t', w')` is convex where `t' >= s2 M 1'w'`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::detector::q_tail;
use crate::model::SensingScenario;

const TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaViolation {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub lambda: f64,
    /// Amount by which the inequality fails.
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LemmaCheck {
    pub checked: usize,
    /// Pairs discarded because an endpoint lies outside the region.
    pub excluded: usize,
    pub violations: Vec<LemmaViolation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport {
    pub band: usize,
    /// Concavity of the miss-probability term.
    pub miss_concavity: LemmaCheck,
    /// Convexity of the surrogate false-alarm bound.
    pub surrogate_convexity: LemmaCheck,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.miss_concavity.violations.is_empty() && self.surrogate_convexity.violations.is_empty()
    }
}

struct BandTerms {
    m: f64,
    s2: f64,
    gains: Vec<f64>,
    factor: f64,
}

impl BandTerms {
    /// Point layout: `[w'_0 .. w'_{N-1}, t']`.
    fn miss_arg(&self, z: &[f64]) -> f64 {
        let n = self.gains.len();
        z[n] - self.m
            * z[..n]
                .iter()
                .zip(&self.gains)
                .map(|(w, g)| w * (self.s2 + g))
                .sum::<f64>()
    }

    fn fa_arg(&self, z: &[f64]) -> f64 {
        let n = self.gains.len();
        z[n] / self.s2 - self.m * z[..n].iter().sum::<f64>()
    }

    fn miss_term(&self, z: &[f64]) -> f64 {
        q_tail(self.miss_arg(z))
    }

    fn surrogate(&self, z: &[f64]) -> f64 {
        q_tail(self.factor * self.fa_arg(z))
    }
}

fn sample_point(rng: &mut ChaCha8Rng, t: &BandTerms, w_max: f64) -> Vec<f64> {
    let n = t.gains.len();
    let mut z: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * w_max).collect();
    let lo = t.s2 * t.m * z.iter().sum::<f64>();
    let hi = t.m
        * z.iter()
            .zip(&t.gains)
            .map(|(w, g)| w * (t.s2 + g))
            .sum::<f64>();
    let span = (hi - lo).max(1e-3);
    // Wider than the convexity interval so that region filtering is exercised.
    z.push(lo - 0.5 * span + rng.random::<f64>() * 2.0 * span);
    z
}

fn check<R, F>(
    rng: &mut ChaCha8Rng,
    terms: &BandTerms,
    trials: usize,
    w_max: f64,
    in_region: R,
    f: F,
    concave: bool,
) -> LemmaCheck
where
    R: Fn(&[f64]) -> bool,
    F: Fn(&[f64]) -> f64,
{
    let mut out = LemmaCheck::default();
    while out.checked < trials {
        let x = sample_point(rng, terms, w_max);
        let y = sample_point(rng, terms, w_max);
        let lambda: f64 = rng.random_range(1e-6..1.0 - 1e-6);
        if !(in_region(&x) && in_region(&y)) {
            out.excluded += 1;
            continue;
        }
        let mid: Vec<f64> = x
            .iter()
            .zip(&y)
            .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
            .collect();
        let chord = lambda * f(&x) + (1.0 - lambda) * f(&y);
        let at_mid = f(&mid);
        let excess = if concave {
            chord - at_mid
        } else {
            at_mid - chord
        };
        out.checked += 1;
        if excess > TOL {
            out.violations.push(LemmaViolation {
                x,
                y,
                lambda,
                excess,
            });
        }
    }
    out
}

/// Checks both curvature claims on `trials` random pairs each, drawn inside
/// the respective region.
pub fn verify_lemma_convexity(
    s: &SensingScenario,
    band: usize,
    trials: usize,
    seed: u64,
) -> LemmaReport {
    let m = s.samples_per_band as f64;
    let s2 = s.noise_variance;
    let terms = BandTerms {
        m,
        s2,
        gains: s.gains(band).to_vec(),
        factor: s.noise_std() * (s2 + 2.0 * s.min_gain(band)).sqrt(),
    };
    // Largest primed weight allowed by the scale bound for the weakest radio.
    let w_max = 1.0 / (2.0 * m * s2 * s2).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let miss_concavity = check(
        &mut rng,
        &terms,
        trials,
        w_max,
        |z| terms.miss_arg(z) <= 0.0,
        |z| terms.miss_term(z),
        true,
    );
    let surrogate_convexity = check(
        &mut rng,
        &terms,
        trials,
        w_max,
        |z| terms.fa_arg(z) >= 0.0,
        |z| terms.surrogate(z),
        false,
    );
    LemmaReport {
        band,
        miss_concavity,
        surrogate_convexity,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table1_band0_has_no_violations() {
        let r = verify_lemma_convexity(&SensingScenario::table1(), 0, 2000, 7);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.miss_concavity.checked, 2000);
        assert!(r.miss_concavity.excluded > 0);
        assert!(r.surrogate_convexity.excluded > 0);
    }

    #[test]
    fn checker_detects_wrong_curvature() {
        // Outside its region the miss term is convex, so asking for concavity
        // over the complementary half-space must produce witnesses.
        let s = SensingScenario::table1();
        let terms = BandTerms {
            m: 100.0,
            s2: 1.0,
            gains: s.gains(0).to_vec(),
            factor: 1.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w_max = 1.0 / 200f64.sqrt();
        let bad = check(
            &mut rng,
            &terms,
            500,
            w_max,
            |z| terms.miss_arg(z) >= 0.0,
            |z| terms.miss_term(z),
            true,
        );
        assert!(!bad.violations.is_empty());
    }
}
