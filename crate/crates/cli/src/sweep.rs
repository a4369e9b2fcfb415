//! Budget sweeps over the joint design and the single-radio baselines.

use std::time::Instant;

use rayon::prelude::*;

use sensefuse_core::optimizer::{solve, SolveOptions, SolverReport, Variant};
use sensefuse_core::{PolicyConstraints, SensingScenario};

/// One solver run at one budget.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub epsilon: f64,
    pub variant: Variant,
    /// The report, or the error message if the solver refused the instance.
    pub outcome: Result<SolverReport, String>,
    pub solve_ms: f64,
}

impl SweepRow {
    pub fn converged(&self) -> bool {
        self.outcome.as_ref().is_ok_and(|r| r.converged)
    }

    /// Exact throughput if the design meets every constraint, else zero.
    pub fn admissible_throughput(&self) -> f64 {
        match &self.outcome {
            Ok(r) if r.feasible && r.infeasible_bands.is_empty() => r.true_objective,
            _ => 0.0,
        }
    }
}

/// The joint design followed by one baseline per radio.
pub fn variants(s: &SensingScenario) -> Vec<Variant> {
    std::iter::once(Variant::Joint)
        .chain((0..s.num_radios).map(Variant::SingleRadio))
        .collect()
}

/// Solves every `(epsilon, variant)` pair. Points run concurrently; rows come
/// back ordered by budget, then by variant as listed in [`variants`].
pub fn run_sweep(
    s: &SensingScenario,
    p: &PolicyConstraints,
    epsilons: &[f64],
    variants: &[Variant],
    opts: &SolveOptions,
) -> Vec<SweepRow> {
    let jobs: Vec<(f64, Variant)> = epsilons
        .iter()
        .flat_map(|&e| variants.iter().map(move |&v| (e, v)))
        .collect();
    jobs.par_iter()
        .map(|&(epsilon, variant)| {
            let start = Instant::now();
            let outcome =
                solve(s, &p.with_budget(epsilon), variant, opts).map_err(|e| e.to_string());
            SweepRow {
                epsilon,
                variant,
                outcome,
                solve_ms: start.elapsed().as_secs_f64() * 1e3,
            }
        })
        .collect()
}
