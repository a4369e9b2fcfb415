//! Exhaustive grid search over the convexity region, scored with the exact
//! metrics. Only meant for very small instances (test oracle).

use crate::detector::q_tail;
use crate::error::{Result, SenseError};
use crate::fusion::fused_args;
use crate::model::{ensure_valid, FusionDesign, PolicyConstraints, SensingScenario};

/// Largest `K (N + 1)` the oracle accepts.
pub const ORACLE_MAX_VARIABLES: usize = 4;
const MAX_EVALUATIONS: f64 = 2e8;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Best feasible design, if any grid point is feasible.
    pub design: Option<FusionDesign>,
    /// Its exact throughput (`-inf` if nothing is feasible).
    pub throughput: f64,
    /// Interference of the best design.
    pub interference: f64,
    pub evaluated: usize,
    pub resolution: usize,
}

struct Candidate {
    weights: Vec<f64>,
    threshold: f64,
    gain: f64,
    cost: f64,
}

fn grid(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if n == 1 {
        hi
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

/// Grid of `resolution` points per variable: each primed weight over
/// `[0, w_max]` (the scale bound with the other weights at zero) and the
/// primed threshold over the convexity interval of the chosen weights.
pub fn oracle_grid_search(
    s: &SensingScenario,
    p: &PolicyConstraints,
    resolution: usize,
) -> Result<OracleResult> {
    ensure_valid(s, p)?;
    let vars = s.num_bands * (s.num_radios + 1);
    if vars > ORACLE_MAX_VARIABLES {
        return Err(SenseError::OracleTooLarge {
            vars,
            cap: ORACLE_MAX_VARIABLES,
        });
    }
    if resolution < 2 || (resolution as f64).powi(vars as i32) > MAX_EVALUATIONS {
        return Err(SenseError::Domain {
            value: resolution as f64,
            domain: "grid resolution with at most 2e8 total points",
        });
    }
    let m = s.samples_per_band as f64;
    let s2 = s.noise_variance;
    let nr = s.num_radios;
    let mut evaluated = 0usize;

    // Per band: every grid point that meets that band's own caps.
    let mut per_band: Vec<Vec<Candidate>> = Vec::with_capacity(s.num_bands);
    for k in 0..s.num_bands {
        let g = s.gains(k);
        let w_max: Vec<f64> = g
            .iter()
            .map(|gn| 1.0 / (2.0 * m * s2 * (s2 + 2.0 * gn)).sqrt())
            .collect();
        let mut list = Vec::new();
        let weight_points = resolution.pow(nr as u32);
        for idx in 0..weight_points {
            let mut rest = idx;
            let w: Vec<f64> = (0..nr)
                .map(|n| {
                    let i = rest % resolution;
                    rest /= resolution;
                    grid(0.0, w_max[n], resolution, i)
                })
                .collect();
            if w.iter().all(|&x| x == 0.0) {
                continue;
            }
            let lo = s2 * m * w.iter().sum::<f64>();
            let hi = m * w.iter().zip(g).map(|(x, gn)| x * (s2 + gn)).sum::<f64>();
            for j in 0..resolution {
                let t = grid(lo, hi, resolution, j);
                evaluated += 1;
                let (a, b) = fused_args(s, &w, t, k)?;
                let pf = q_tail(a);
                let pm = 1.0 - q_tail(b);
                if pf <= p.false_alarm_caps[k] && pm <= p.miss_caps[k] {
                    list.push(Candidate {
                        weights: w.clone(),
                        threshold: t,
                        gain: p.throughput_rates[k] * (1.0 - pf),
                        cost: p.interference_costs[k] * pm,
                    });
                }
            }
        }
        per_band.push(list);
    }

    let mut best: Option<(f64, f64, Vec<usize>)> = None;
    let mut choice = vec![0usize; s.num_bands];
    search(
        &per_band,
        0,
        0.0,
        0.0,
        p.interference_budget,
        &mut choice,
        &mut best,
    );

    Ok(match best {
        Some((throughput, interference, pick)) => OracleResult {
            design: Some(
                FusionDesign {
                    weights: pick
                        .iter()
                        .enumerate()
                        .map(|(k, &i)| per_band[k][i].weights.clone())
                        .collect(),
                    thresholds: pick
                        .iter()
                        .enumerate()
                        .map(|(k, &i)| per_band[k][i].threshold)
                        .collect(),
                }
                .normalized(),
            ),
            throughput,
            interference,
            evaluated,
            resolution,
        },
        None => OracleResult {
            design: None,
            throughput: f64::NEG_INFINITY,
            interference: f64::NAN,
            evaluated,
            resolution,
        },
    })
}

fn search(
    per_band: &[Vec<Candidate>],
    k: usize,
    gain: f64,
    cost: f64,
    budget: f64,
    choice: &mut Vec<usize>,
    best: &mut Option<(f64, f64, Vec<usize>)>,
) {
    if k == per_band.len() {
        if best.as_ref().is_none_or(|(b, _, _)| gain > *b) {
            *best = Some((gain, cost, choice.clone()));
        }
        return;
    }
    for (i, c) in per_band[k].iter().enumerate() {
        let total = cost + c.cost;
        if total > budget {
            continue;
        }
        choice[k] = i;
        search(per_band, k + 1, gain + c.gain, total, budget, choice, best);
    }
}
