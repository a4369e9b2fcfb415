//! Joint optimization of fusion weights and thresholds.
//!
//! The exact problem (maximize `r^T (1 - Pf)` subject to per-band miss and
//! false-alarm caps and an aggregate interference budget) is nonconvex in
//! `(w_k, t_k)`. Dividing each band's variables by the H1 standard deviation
//! of its fused statistic turns the caps into convex constraints and allows the
//! false-alarm probability to be bounded above by a convex function of the
//! primed variables. The solver maximizes the resulting concave lower bound
//! with a log-barrier method and then evaluates the recovered design with the
//! exact metrics.

pub mod barrier;
mod lemma;
mod oracle;
mod program;

use nalgebra::DVector;

pub use barrier::{BarrierOptions, BarrierOutcome, IterationRecord};
pub use lemma::{verify_lemma_convexity, LemmaReport, LemmaViolation};
pub use oracle::{oracle_grid_search, OracleResult, ORACLE_MAX_VARIABLES};
pub use program::{ConstraintCounts, ConstraintForm, ConstraintId, ConvexProgram};

use crate::detector::q_tail;
use crate::error::{Result, SenseError};
use crate::fusion::{check_weights, metrics};
use crate::model::{
    ensure_valid, DetectionMetrics, FeasibilityResiduals, FusionDesign, PolicyConstraints,
    SensingScenario,
};
use barrier::{phase_one, solve_barrier, PhaseOneResult};
use program::{BuildSpec, WeightVars};

/// Tolerance used when re-checking a design against the exact caps.
pub const FEASIBILITY_TOL: f64 = 1e-8;

/// Design expressed in primed (normalized) variables.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedDesign {
    pub weights_primed: Vec<Vec<f64>>,
    pub thresholds_primed: Vec<f64>,
}

/// H1 standard deviation of the fused statistic, `s * sqrt(2M w'(s2 I + 2 diag G_k) w)`.
pub fn h1_scale(s: &SensingScenario, w: &[f64], band: usize) -> f64 {
    let s2 = s.noise_variance;
    let quad: f64 = w
        .iter()
        .zip(s.gains(band))
        .map(|(x, g)| x * x * (s2 + 2.0 * g))
        .sum();
    (2.0 * s.samples_per_band as f64 * s2 * quad).sqrt()
}

impl TransformedDesign {
    pub fn from_design(s: &SensingScenario, d: &FusionDesign) -> Result<Self> {
        let mut weights_primed = Vec::with_capacity(s.num_bands);
        let mut thresholds_primed = Vec::with_capacity(s.num_bands);
        for (k, (w, &t)) in d.weights.iter().zip(&d.thresholds).enumerate() {
            check_weights(k, w)?;
            let mu = h1_scale(s, w, k);
            weights_primed.push(w.iter().map(|x| x / mu).collect());
            thresholds_primed.push(t / mu);
        }
        Ok(TransformedDesign {
            weights_primed,
            thresholds_primed,
        })
    }

    /// Any positive rescaling is a valid physical design; the identity is used.
    pub fn to_design(&self) -> FusionDesign {
        FusionDesign {
            weights: self.weights_primed.clone(),
            thresholds: self.thresholds_primed.clone(),
        }
    }
}

/// Convex upper bound on the false-alarm probability of a normalized primed
/// design:
/// `Q((t'/s2 - M 1'w') * s * sqrt(s2 + 2 min_n G_k(n)))`.
pub fn surrogate_pf_bound(
    s: &SensingScenario,
    w_primed: &[f64],
    t_primed: f64,
    band: usize,
    form: ConstraintForm,
) -> Result<f64> {
    check_weights(band, w_primed)?;
    let m = s.samples_per_band as f64;
    let s2 = s.noise_variance;
    let u = t_primed / s2 - m * w_primed.iter().sum::<f64>();
    let root = (s2 + 2.0 * s.min_gain(band)).sqrt();
    let factor = match form {
        ConstraintForm::Derived => s.noise_std() * root,
        ConstraintForm::PaperLiteral => root,
    };
    Ok(q_tail(u * factor))
}

/// Builds the joint convex program over all bands.
pub fn build_p2(
    s: &SensingScenario,
    p: &PolicyConstraints,
    form: ConstraintForm,
) -> Result<ConvexProgram> {
    let bands: Vec<usize> = (0..s.num_bands).collect();
    ConvexProgram::assemble(
        s,
        p,
        &BuildSpec {
            bands: &bands,
            fixed_radio: None,
            with_coupling: true,
            form,
        },
    )
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolveOptions {
    pub barrier: BarrierOptions,
    pub form: ConstraintForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    /// No strictly feasible point exists (for some bands or for the budget).
    Infeasible,
    /// The Newton-step cap was reached before the tolerances were met.
    IterationLimit,
}

/// Which design family is optimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Joint,
    SingleRadio(usize),
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Variant::Joint => write!(f, "joint"),
            Variant::SingleRadio(n) => write!(f, "radio{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub variant: Variant,
    /// Recovered design, normalized so each band's largest weight is one.
    pub design: FusionDesign,
    pub metrics: DetectionMetrics,
    /// `sum_k r_k (1 - g_k)` at the solution (vacated bands contribute 0).
    pub surrogate_objective: f64,
    /// `r^T (1 - Pf)` under the exact metrics.
    pub true_objective: f64,
    pub residuals: FeasibilityResiduals,
    /// Exact-metric feasibility at [`FEASIBILITY_TOL`].
    pub feasible: bool,
    pub kkt_residual: f64,
    pub duality_gap: f64,
    pub iterations: usize,
    pub converged: bool,
    pub status: SolveStatus,
    /// Bands that cannot meet their own miss and false-alarm caps. They are
    /// vacated (threshold 0, always declared occupied).
    pub infeasible_bands: Vec<usize>,
    /// Constraints that could not be strictly satisfied.
    pub violated: Vec<ConstraintId>,
    /// Constraints with a non-negligible multiplier at the solution.
    pub binding: Vec<ConstraintId>,
    pub trace: Vec<IterationRecord>,
}

struct Solved {
    x: DVector<f64>,
    outcome: Option<BarrierOutcome>,
    violated: Vec<ConstraintId>,
}

/// A strictly feasible start, or the least-violating point and the
/// constraints that remain violated there.
fn start_point(
    prog: &ConvexProgram,
    opts: &BarrierOptions,
) -> std::result::Result<DVector<f64>, (DVector<f64>, Vec<ConstraintId>)> {
    if let Some(x) = prog.find_heuristic_start() {
        return Ok(x);
    }
    let x0 = prog.heuristic_start(0.99, 0.02);
    match phase_one(prog, &x0, opts) {
        PhaseOneResult::Feasible(x) => Ok(x),
        PhaseOneResult::Infeasible { x, values } => {
            let violated = prog
                .constraint_ids()
                .iter()
                .zip(&values)
                .filter(|(_, &v)| v >= 0.0)
                .map(|(id, _)| *id)
                .collect();
            Err((x, violated))
        }
    }
}

fn solve_program(prog: &ConvexProgram, opts: &BarrierOptions) -> Solved {
    match start_point(prog, opts) {
        Ok(x0) => {
            let out = solve_barrier(prog, x0, opts, None);
            Solved {
                x: out.x.clone(),
                outcome: Some(out),
                violated: Vec::new(),
            }
        }
        Err((x, violated)) => Solved {
            x,
            outcome: None,
            violated,
        },
    }
}

/// Bands whose own caps (ignoring the shared budget) admit no strictly
/// feasible point.
fn infeasible_bands(
    s: &SensingScenario,
    p: &PolicyConstraints,
    fixed_radio: Option<usize>,
    opts: &SolveOptions,
) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for k in 0..s.num_bands {
        let prog = ConvexProgram::assemble(
            s,
            p,
            &BuildSpec {
                bands: &[k],
                fixed_radio,
                with_coupling: false,
                form: opts.form,
            },
        )?;
        if start_point(&prog, &opts.barrier).is_err() {
            out.push(k);
        }
    }
    Ok(out)
}

fn solve_variant(
    s: &SensingScenario,
    p: &PolicyConstraints,
    variant: Variant,
    opts: &SolveOptions,
) -> Result<SolverReport> {
    ensure_valid(s, p)?;
    let fixed_radio = match variant {
        Variant::Joint => None,
        Variant::SingleRadio(n) => {
            if n >= s.num_radios {
                return Err(SenseError::Dimension {
                    what: "baseline radio index",
                    expected: s.num_radios,
                    got: n,
                });
            }
            Some(n)
        }
    };

    let bad_bands = infeasible_bands(s, p, fixed_radio, opts)?;
    let active: Vec<usize> = (0..s.num_bands)
        .filter(|k| !bad_bands.contains(k))
        .collect();

    let vacated_weights = |_k: usize| match fixed_radio {
        None => vec![1.0; s.num_radios],
        Some(n) => {
            let mut w = vec![0.0; s.num_radios];
            w[n] = 1.0;
            w
        }
    };
    let mut design = FusionDesign {
        weights: (0..s.num_bands).map(vacated_weights).collect(),
        thresholds: vec![0.0; s.num_bands],
    };

    let mut surrogate_objective = 0.0;
    let mut violated: Vec<ConstraintId> = bad_bands
        .iter()
        .flat_map(|&band| {
            [
                ConstraintId::Miss { band },
                ConstraintId::FalseAlarm { band },
            ]
        })
        .collect();
    let mut outcome = None;
    let mut binding = Vec::new();

    if !active.is_empty() {
        let prog = ConvexProgram::assemble(
            s,
            p,
            &BuildSpec {
                bands: &active,
                fixed_radio,
                with_coupling: true,
                form: opts.form,
            },
        )?;
        let solved = solve_program(&prog, &opts.barrier);
        for b in &prog.blocks {
            let w = prog.block_weights(b, &solved.x);
            let t = prog.threshold_primed(b, &solved.x);
            let (w, t) = match &b.weights {
                WeightVars::Free { .. } => {
                    // A phase-I point may leave the sign rows slightly violated.
                    let mut w: Vec<f64> = w.iter().map(|v| v.max(0.0)).collect();
                    if w.iter().all(|&v| v == 0.0) {
                        w = vec![1.0; s.num_radios];
                    }
                    (w, t.max(0.0))
                }
                WeightVars::Fixed(_) => {
                    let n = fixed_radio.expect("fixed weights imply a baseline radio");
                    let scale = w[n];
                    let mut e = vec![0.0; s.num_radios];
                    e[n] = 1.0;
                    (e, (t / scale).max(0.0))
                }
            };
            design.weights[b.band] = w;
            design.thresholds[b.band] = t;
        }
        surrogate_objective = prog.surrogate_throughput(&solved.x);
        violated.extend(solved.violated);
        if let Some(out) = &solved.outcome {
            binding = prog
                .constraint_ids()
                .iter()
                .zip(&out.multipliers)
                .filter(|(_, &l)| l > 1e-6)
                .map(|(id, _)| *id)
                .collect();
        }
        outcome = solved.outcome;
    }
    finish(
        s,
        p,
        variant,
        design,
        surrogate_objective,
        bad_bands,
        violated,
        outcome,
        binding,
    )
}

#[allow(clippy::too_many_arguments)]
fn finish(
    s: &SensingScenario,
    p: &PolicyConstraints,
    variant: Variant,
    design: FusionDesign,
    surrogate_objective: f64,
    infeasible_bands: Vec<usize>,
    violated: Vec<ConstraintId>,
    outcome: Option<BarrierOutcome>,
    binding: Vec<ConstraintId>,
) -> Result<SolverReport> {
    let design = design.normalized();
    let m = metrics(s, p, &design)?;
    let residuals = m.residuals(p);
    let feasible = residuals.is_feasible(FEASIBILITY_TOL);
    let status = if !violated.is_empty() || !infeasible_bands.is_empty() || outcome.is_none() {
        SolveStatus::Infeasible
    } else if outcome.as_ref().is_some_and(|o| o.converged) {
        SolveStatus::Optimal
    } else {
        SolveStatus::IterationLimit
    };
    let (kkt_residual, duality_gap, iterations, trace) = match &outcome {
        Some(o) => (
            o.kkt_residual,
            o.duality_gap,
            o.newton_steps,
            o.trace.clone(),
        ),
        None => (f64::NAN, f64::NAN, 0, Vec::new()),
    };
    Ok(SolverReport {
        variant,
        true_objective: m.throughput,
        metrics: m,
        design,
        surrogate_objective,
        residuals,
        feasible,
        kkt_residual,
        duality_gap,
        iterations,
        converged: status == SolveStatus::Optimal && feasible,
        status,
        infeasible_bands,
        violated,
        binding,
        trace,
    })
}

/// Solves the joint weight/threshold program.
pub fn solve_p2(
    s: &SensingScenario,
    p: &PolicyConstraints,
    opts: &SolveOptions,
) -> Result<SolverReport> {
    solve_variant(s, p, Variant::Joint, opts)
}

/// Non-cooperative baseline: radio `radio` senses alone on every band and
/// only the thresholds are optimized.
pub fn solve_baseline_single_radio(
    s: &SensingScenario,
    p: &PolicyConstraints,
    radio: usize,
    opts: &SolveOptions,
) -> Result<SolverReport> {
    solve_variant(s, p, Variant::SingleRadio(radio), opts)
}

pub fn solve(
    s: &SensingScenario,
    p: &PolicyConstraints,
    variant: Variant,
    opts: &SolveOptions,
) -> Result<SolverReport> {
    solve_variant(s, p, variant, opts)
}
