//! Monte Carlo check of a solved design against its analytic rates.

use sensefuse_core::montecarlo::empirical_rates;
use sensefuse_core::optimizer::{solve_p2, SolveOptions, SolverReport};
use sensefuse_core::{PolicyConstraints, SensingScenario};

use crate::output::fmt_g9;
use crate::CliError;

/// Largest allowed `|empirical - analytic|` per band and metric.
pub const TOLERANCE: f64 = 0.02;
/// Width, in binomial standard errors, of the interval used to decide
/// whether a discrepancy is conclusive.
pub const CONFIDENCE_Z: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// Outside the tolerance but within sampling error of it.
    Inconclusive,
    Fail,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandCheck {
    pub band: usize,
    pub pf_analytic: f64,
    pub pf_empirical: f64,
    pub pf_stderr: f64,
    pub pd_analytic: f64,
    pub pd_empirical: f64,
    pub pd_stderr: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub epsilon: f64,
    pub trials: usize,
    pub seed: u64,
    pub solver: SolverReport,
    pub bands: Vec<BandCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.bands.iter().all(|b| b.verdict == Verdict::Pass)
    }

    pub fn failed(&self) -> bool {
        self.bands.iter().any(|b| b.verdict == Verdict::Fail)
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "validation at epsilon {} with {} trials (seed {}), tolerance {}\n",
            fmt_g9(self.epsilon),
            self.trials,
            self.seed,
            fmt_g9(TOLERANCE)
        );
        out.push_str(
            "band,pf_analytic,pf_empirical,pf_stderr,pd_analytic,pd_empirical,pd_stderr,verdict\n",
        );
        for b in &self.bands {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                b.band,
                fmt_g9(b.pf_analytic),
                fmt_g9(b.pf_empirical),
                fmt_g9(b.pf_stderr),
                fmt_g9(b.pd_analytic),
                fmt_g9(b.pd_empirical),
                fmt_g9(b.pd_stderr),
                b.verdict
            ));
        }
        let summary = if self.passed() {
            "all bands pass"
        } else if self.failed() {
            "some bands FAIL"
        } else {
            "inconclusive: too few trials for the tolerance"
        };
        out.push_str(summary);
        out.push('\n');
        out
    }
}

fn stderr(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

fn verdict(diff: f64, se: f64) -> Verdict {
    if diff <= TOLERANCE {
        Verdict::Pass
    } else if diff <= TOLERANCE + CONFIDENCE_Z * se {
        Verdict::Inconclusive
    } else {
        Verdict::Fail
    }
}

fn worst(a: Verdict, b: Verdict) -> Verdict {
    match (a, b) {
        (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
        (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
        _ => Verdict::Pass,
    }
}

/// Solves the joint design at the policy's budget and compares its analytic
/// rates with a simulation of `trials` frames per hypothesis.
pub fn run_validation(
    s: &SensingScenario,
    p: &PolicyConstraints,
    opts: &SolveOptions,
    trials: usize,
    seed: u64,
) -> Result<ValidationReport, CliError> {
    let solver = solve_p2(s, p, opts).map_err(|e| CliError::Config(vec![e.to_string()]))?;
    let emp = empirical_rates(s, p, &solver.design, trials, seed)
        .map_err(|e| CliError::Config(vec![e.to_string()]))?;
    let n = emp.trials;
    let bands = (0..s.num_bands)
        .map(|k| {
            let pf_a = solver.metrics.pf[k];
            let pd_a = solver.metrics.pd[k];
            // Standard errors from the analytic rates stay positive when an
            // empirical rate is exactly 0 or 1.
            let pf_se = stderr(pf_a, n).max(emp.pf_stderr[k]);
            let pd_se = stderr(pd_a, n).max(emp.pd_stderr[k]);
            let v = worst(
                verdict((emp.metrics.pf[k] - pf_a).abs(), pf_se),
                verdict((emp.metrics.pd[k] - pd_a).abs(), pd_se),
            );
            BandCheck {
                band: k,
                pf_analytic: pf_a,
                pf_empirical: emp.metrics.pf[k],
                pf_stderr: pf_se,
                pd_analytic: pd_a,
                pd_empirical: emp.metrics.pd[k],
                pd_stderr: pd_se,
                verdict: v,
            }
        })
        .collect();
    Ok(ValidationReport {
        epsilon: p.interference_budget,
        trials: n,
        seed,
        solver,
        bands,
    })
}
