//! Command-line front end: configuration loading, budget sweeps, result
//! files and Monte Carlo validation.

pub mod config;
pub mod output;
pub mod sweep;
pub mod validation;

use std::io::Write;
use std::path::PathBuf;

use sensefuse_core::optimizer::{
    oracle_grid_search, solve_p2, ConstraintForm, SolveOptions, SolverReport, Variant,
};

use config::{Config, EpsilonRange};
use output::fmt_g9;

/// Failure categories with stable exit codes.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("solver did not converge: {0}")]
    NotConverged(String),
    #[error("configuration error:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::NotConverged(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

/// Flags shared by every subcommand, already merged with the config file.
#[derive(Debug, Clone)]
pub struct Settings {
    pub config: Config,
    pub out: Option<PathBuf>,
    pub plot: bool,
}

impl Settings {
    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            form: if self.config.run.paper_compat {
                ConstraintForm::PaperLiteral
            } else {
                ConstraintForm::Derived
            },
            ..SolveOptions::default()
        }
    }

    fn policy(&self) -> sensefuse_core::PolicyConstraints {
        self.config.policy.with_budget(self.config.run.epsilon)
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn emit(
    settings: &Settings,
    rows: &[sweep::SweepRow],
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let k = settings.config.scenario.num_bands;
    match &settings.out {
        Some(path) => {
            for f in output::emit_results(rows, k, path, settings.plot)? {
                writeln!(stdout, "wrote {}", f.display()).map_err(io_err)?;
            }
            Ok(())
        }
        None if settings.plot => Err(CliError::Config(
            vec!["--format plot requires --out".into()],
        )),
        None => output::write_csv(stdout, rows, k).map_err(io_err),
    }
}

/// Human-readable summary of one report.
pub fn render_report(r: &SolverReport) -> String {
    let mut s = format!(
        "variant {}: status {:?}, converged {}, feasible {}\n\
         throughput {}  surrogate {}  interference {}\n\
         kkt residual {}  duality gap {}  newton steps {}\n",
        r.variant,
        r.status,
        r.converged,
        r.feasible,
        fmt_g9(r.true_objective),
        fmt_g9(r.surrogate_objective),
        fmt_g9(r.metrics.interference),
        fmt_g9(r.kkt_residual),
        fmt_g9(r.duality_gap),
        r.iterations
    );
    if !r.infeasible_bands.is_empty() {
        s.push_str(&format!(
            "bands vacated (caps unattainable): {:?}\n",
            r.infeasible_bands
        ));
    }
    if !r.violated.is_empty() {
        let v: Vec<String> = r.violated.iter().map(ToString::to_string).collect();
        s.push_str(&format!("violated: {}\n", v.join("; ")));
    }
    if !r.binding.is_empty() {
        let v: Vec<String> = r.binding.iter().map(ToString::to_string).collect();
        s.push_str(&format!("binding: {}\n", v.join("; ")));
    }
    s.push_str("band,weights,threshold,pf,pd\n");
    for k in 0..r.design.thresholds.len() {
        let w: Vec<String> = r.design.weights[k].iter().map(|&x| fmt_g9(x)).collect();
        s.push_str(&format!(
            "{k},{},{},{},{}\n",
            w.join(" "),
            fmt_g9(r.design.thresholds[k]),
            fmt_g9(r.metrics.pf[k]),
            fmt_g9(r.metrics.pd[k])
        ));
    }
    s
}

/// `solve`: the joint design and every baseline at one budget. Fails with
/// [`CliError::NotConverged`] if the joint design is not optimal and feasible.
pub fn cmd_solve(settings: &Settings, stdout: &mut dyn Write) -> Result<(), CliError> {
    let c = &settings.config;
    let rows = sweep::run_sweep(
        &c.scenario,
        &c.policy,
        &[c.run.epsilon],
        &sweep::variants(&c.scenario),
        &settings.solve_options(),
    );
    for row in &rows {
        match &row.outcome {
            Ok(r) => writeln!(stdout, "{}", render_report(r)).map_err(io_err)?,
            Err(e) => writeln!(stdout, "variant {}: error: {e}\n", row.variant).map_err(io_err)?,
        }
    }
    emit(settings, &rows, stdout)?;
    let joint = rows
        .iter()
        .find(|r| r.variant == Variant::Joint)
        .expect("joint row");
    match &joint.outcome {
        Ok(r) if r.converged => Ok(()),
        Ok(r) => Err(CliError::NotConverged(format!(
            "joint design at epsilon {}: status {:?}",
            fmt_g9(joint.epsilon),
            r.status
        ))),
        Err(e) => Err(CliError::Config(vec![e.clone()])),
    }
}

/// `sweep`: every variant over the budget range. Per-point failures are
/// recorded in their rows and do not change the exit status.
pub fn cmd_sweep(
    settings: &Settings,
    range: Option<EpsilonRange>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let c = &settings.config;
    let range = range.or(c.run.epsilon_range).ok_or_else(|| {
        CliError::Config(vec![
            "sweep needs --epsilon-range or run.epsilon_range".into()
        ])
    })?;
    let rows = sweep::run_sweep(
        &c.scenario,
        &c.policy,
        &range.values(),
        &sweep::variants(&c.scenario),
        &settings.solve_options(),
    );
    emit(settings, &rows, stdout)
}

/// `validate`: Monte Carlo check of the joint design. Exits with status 1
/// if the solver does not converge or a band fails conclusively.
pub fn cmd_validate(settings: &Settings, stdout: &mut dyn Write) -> Result<(), CliError> {
    let c = &settings.config;
    let report = validation::run_validation(
        &c.scenario,
        &settings.policy(),
        &settings.solve_options(),
        c.run.trials,
        c.run.seed,
    )?;
    write!(stdout, "{}", report.render()).map_err(io_err)?;
    if let Some(path) = &settings.out {
        std::fs::write(path, report.render())
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    if !report.solver.converged {
        return Err(CliError::NotConverged(format!(
            "joint design status {:?}",
            report.solver.status
        )));
    }
    if report.failed() {
        return Err(CliError::NotConverged(
            "empirical rates disagree with the analytic model".into(),
        ));
    }
    Ok(())
}

/// `oracle`: grid search against the solver on a small instance.
pub fn cmd_oracle(
    settings: &Settings,
    resolution: usize,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let c = &settings.config;
    let policy = settings.policy();
    let cfg_err = |e: sensefuse_core::SenseError| CliError::Config(vec![e.to_string()]);
    let oracle = oracle_grid_search(&c.scenario, &policy, resolution).map_err(cfg_err)?;
    let solver = solve_p2(&c.scenario, &policy, &settings.solve_options()).map_err(cfg_err)?;
    writeln!(
        stdout,
        "oracle: throughput {} over {} grid points (resolution {})\nsolver: throughput {} ({:?})\ndifference {}",
        fmt_g9(oracle.throughput),
        oracle.evaluated,
        oracle.resolution,
        fmt_g9(solver.true_objective),
        solver.status,
        fmt_g9(solver.true_objective - oracle.throughput)
    )
    .map_err(io_err)?;
    if let Some(d) = &oracle.design {
        for k in 0..d.thresholds.len() {
            let w: Vec<String> = d.weights[k].iter().map(|&x| fmt_g9(x)).collect();
            writeln!(
                stdout,
                "oracle band {k}: weights {} threshold {}",
                w.join(" "),
                fmt_g9(d.thresholds[k])
            )
            .map_err(io_err)?;
        }
    }
    Ok(())
}
