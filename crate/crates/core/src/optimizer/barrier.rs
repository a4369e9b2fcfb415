//! Log-barrier interior-point method for smooth convex inequality programs.

use nalgebra::{DMatrix, DVector};

/// Value, gradient and (optionally) Hessian of one smooth function.
/// A `None` Hessian means the function is affine.
#[derive(Debug, Clone)]
pub struct Eval {
    pub value: f64,
    pub grad: DVector<f64>,
    pub hess: Option<DMatrix<f64>>,
}

/// `minimize f0(x) s.t. f_i(x) <= 0` with convex, twice differentiable `f_i`.
pub trait BarrierProblem {
    fn dim(&self) -> usize;
    fn num_constraints(&self) -> usize;
    fn objective(&self, x: &DVector<f64>, hess: bool) -> Eval;
    fn constraint(&self, i: usize, x: &DVector<f64>, hess: bool) -> Eval;
}

/// Schedule and tolerances of the barrier method.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierOptions {
    /// Weight of the barrier term in the first centering step.
    pub initial_barrier: f64,
    /// Factor applied to the barrier weight after each centering step.
    pub barrier_decrease: f64,
    /// Stationarity tolerance of a centering step.
    pub inner_tol: f64,
    /// Stop once `m * barrier_weight` is at most this.
    pub gap_tol: f64,
    pub kkt_tol: f64,
    /// A centering step ends once the squared Newton decrement is at most
    /// this, or once it stops shrinking at the rounding level.
    pub decrement_tol: f64,
    pub armijo_slope: f64,
    pub backtrack: f64,
    /// Cap on Newton steps summed over all centering steps.
    pub max_newton: usize,
}

impl Default for BarrierOptions {
    fn default() -> Self {
        BarrierOptions {
            initial_barrier: 1.0,
            barrier_decrease: 0.1,
            inner_tol: 1e-8,
            gap_tol: 1e-8,
            kkt_tol: 1e-6,
            decrement_tol: 1e-14,
            armijo_slope: 1e-4,
            backtrack: 0.5,
            max_newton: 500,
        }
    }
}

/// One centering step of the outer loop.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub barrier_weight: f64,
    pub newton_steps: usize,
    pub objective: f64,
    pub kkt_residual: f64,
}

#[derive(Debug, Clone)]
pub struct BarrierOutcome {
    pub x: DVector<f64>,
    pub objective: f64,
    pub kkt_residual: f64,
    /// `m * barrier_weight` at termination.
    pub duality_gap: f64,
    pub newton_steps: usize,
    pub converged: bool,
    pub trace: Vec<IterationRecord>,
    /// Dual estimates `lambda_i = w / (-f_i(x))`.
    pub multipliers: Vec<f64>,
}

struct Local {
    value: f64,
    grad: DVector<f64>,
    hess: DMatrix<f64>,
}

fn barrier_local<P: BarrierProblem + ?Sized>(p: &P, x: &DVector<f64>, t: f64) -> Option<Local> {
    let n = p.dim();
    let obj = p.objective(x, true);
    let mut value = t * obj.value;
    let mut grad = &obj.grad * t;
    let mut hess = match obj.hess {
        Some(h) => h * t,
        None => DMatrix::zeros(n, n),
    };
    for i in 0..p.num_constraints() {
        let c = p.constraint(i, x, true);
        if c.value >= 0.0 || c.value.is_nan() {
            return None;
        }
        let inv = -1.0 / c.value;
        value -= (-c.value).ln();
        grad.axpy(inv, &c.grad, 1.0);
        hess.ger(inv * inv, &c.grad, &c.grad, 1.0);
        if let Some(h) = c.hess {
            hess += h * inv;
        }
    }
    Some(Local { value, grad, hess })
}

fn barrier_value<P: BarrierProblem + ?Sized>(p: &P, x: &DVector<f64>, t: f64) -> Option<f64> {
    let mut value = t * p.objective(x, false).value;
    for i in 0..p.num_constraints() {
        let c = p.constraint(i, x, false).value;
        if c >= 0.0 || !c.is_finite() {
            return None;
        }
        value -= (-c).ln();
    }
    value.is_finite().then_some(value)
}

/// Stationarity of the Lagrangian at the central-path multipliers.
fn kkt_residual<P: BarrierProblem + ?Sized>(p: &P, x: &DVector<f64>, t: f64) -> (f64, Vec<f64>) {
    let mut r = p.objective(x, false).grad;
    let mut lambdas = Vec::with_capacity(p.num_constraints());
    for i in 0..p.num_constraints() {
        let c = p.constraint(i, x, false);
        let lam = 1.0 / (t * -c.value);
        r.axpy(lam, &c.grad, 1.0);
        lambdas.push(lam);
    }
    (r.amax(), lambdas)
}

fn newton_direction(hess: &DMatrix<f64>, grad: &DVector<f64>) -> Option<DVector<f64>> {
    let scale = hess.diagonal().amax().max(1.0);
    let mut shift = 0.0;
    for _ in 0..12 {
        let mut h = hess.clone();
        if shift > 0.0 {
            for i in 0..h.nrows() {
                h[(i, i)] += shift;
            }
        }
        if let Some(ch) = h.cholesky() {
            let d = ch.solve(&(-grad));
            if d.iter().all(|v| v.is_finite()) {
                return Some(d);
            }
        }
        shift = if shift == 0.0 {
            1e-12 * scale
        } else {
            shift * 100.0
        };
    }
    None
}

/// Squared Newton decrement below which undamped steps are taken once the
/// line search can no longer resolve the decrease.
const QUADRATIC_ZONE: f64 = 1e-2;

/// The weight schedule is a repeated product, so allow a few ulps of slack.
fn gap_reached(gap: f64, tol: f64) -> bool {
    gap <= tol * (1.0 + 1e-12)
}

/// Called after each centering step; returning `true` stops the solver.
pub type StopHook<'a> = dyn Fn(&DVector<f64>) -> bool + 'a;

/// Runs the barrier method from a strictly feasible `x0`.
pub fn solve_barrier<P: BarrierProblem + ?Sized>(
    p: &P,
    x0: DVector<f64>,
    opts: &BarrierOptions,
    stop: Option<&StopHook<'_>>,
) -> BarrierOutcome {
    let m = p.num_constraints() as f64;
    let mut x = x0;
    let mut weight = opts.initial_barrier;
    let mut steps = 0usize;
    let mut trace = Vec::new();
    let mut exhausted = false;

    loop {
        let t = 1.0 / weight;
        let mut inner = 0usize;
        let mut last_full_step = f64::INFINITY;
        while let Some(loc) = barrier_local(p, &x, t) {
            if loc.grad.amax() / t <= opts.inner_tol {
                break;
            }
            if steps >= opts.max_newton {
                exhausted = true;
                break;
            }
            let Some(dx) = newton_direction(&loc.hess, &loc.grad) else {
                break;
            };
            let slope = loc.grad.dot(&dx);
            if slope >= 0.0 || slope.is_nan() {
                break;
            }
            let decrement = -slope;
            if decrement <= opts.decrement_tol {
                break;
            }
            // Near the centre the predicted decrease is lost in the rounding
            // of the barrier value, so Armijo cannot be tested. Newton is in
            // its quadratic zone there: take full steps while the decrement
            // keeps shrinking.
            if decrement <= QUADRATIC_ZONE
                && decrement <= 1e6 * f64::EPSILON * (1.0 + loc.value.abs())
            {
                let trial = &x + &dx;
                if barrier_value(p, &trial, t).is_none() || decrement >= 0.5 * last_full_step {
                    break;
                }
                x = trial;
                last_full_step = decrement;
                steps += 1;
                inner += 1;
                continue;
            }

            let mut step = 1.0;
            let mut accepted = None;
            while step > 1e-20 {
                let trial = &x + &dx * step;
                if let Some(v) = barrier_value(p, &trial, t) {
                    if v <= loc.value + opts.armijo_slope * step * slope {
                        accepted = Some(trial);
                        break;
                    }
                }
                step *= opts.backtrack;
            }
            steps += 1;
            inner += 1;
            match accepted {
                Some(xn) => x = xn,
                None => break,
            }
        }

        let (kkt, _) = kkt_residual(p, &x, t);
        trace.push(IterationRecord {
            barrier_weight: weight,
            newton_steps: inner,
            objective: p.objective(&x, false).value,
            kkt_residual: kkt,
        });

        if let Some(hook) = stop {
            if hook(&x) {
                break;
            }
        }
        if exhausted || gap_reached(m * weight, opts.gap_tol) {
            break;
        }
        weight *= opts.barrier_decrease;
    }

    let t = 1.0 / weight;
    let (kkt, multipliers) = kkt_residual(p, &x, t);
    let gap = m * weight;
    BarrierOutcome {
        objective: p.objective(&x, false).value,
        converged: !exhausted && gap_reached(gap, opts.gap_tol) && kkt <= opts.kkt_tol,
        x,
        kkt_residual: kkt,
        duality_gap: gap,
        newton_steps: steps,
        trace,
        multipliers,
    }
}

/// Phase-I problem: `minimize s  s.t.  f_i(x) <= s`, over `(x, s)`.
pub struct PhaseOne<'a, P: BarrierProblem + ?Sized> {
    inner: &'a P,
}

impl<'a, P: BarrierProblem + ?Sized> PhaseOne<'a, P> {
    pub fn new(inner: &'a P) -> Self {
        PhaseOne { inner }
    }
}

impl<P: BarrierProblem + ?Sized> BarrierProblem for PhaseOne<'_, P> {
    fn dim(&self) -> usize {
        self.inner.dim() + 1
    }

    fn num_constraints(&self) -> usize {
        self.inner.num_constraints()
    }

    fn objective(&self, x: &DVector<f64>, hess: bool) -> Eval {
        let n = self.dim();
        let mut grad = DVector::zeros(n);
        grad[n - 1] = 1.0;
        Eval {
            value: x[n - 1],
            grad,
            hess: hess.then(|| DMatrix::zeros(n, n)),
        }
    }

    fn constraint(&self, i: usize, x: &DVector<f64>, hess: bool) -> Eval {
        let n = self.inner.dim();
        let xs = x.rows(0, n).into_owned();
        let e = self.inner.constraint(i, &xs, hess);
        let mut grad = DVector::zeros(n + 1);
        grad.rows_mut(0, n).copy_from(&e.grad);
        grad[n] = -1.0;
        let hess = e.hess.map(|h| {
            let mut big = DMatrix::zeros(n + 1, n + 1);
            big.view_mut((0, 0), (n, n)).copy_from(&h);
            big
        });
        Eval {
            value: e.value - x[n],
            grad,
            hess,
        }
    }
}

/// Result of a phase-I search.
#[derive(Debug, Clone)]
pub enum PhaseOneResult {
    Feasible(DVector<f64>),
    /// Best point found and the constraint values there.
    Infeasible {
        x: DVector<f64>,
        values: Vec<f64>,
    },
}

fn max_violation<P: BarrierProblem + ?Sized>(p: &P, x: &DVector<f64>) -> f64 {
    (0..p.num_constraints())
        .map(|i| p.constraint(i, x, false).value)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Minimizes the largest constraint value starting from any `x0` in the
/// functions' domain.
pub fn phase_one<P: BarrierProblem + ?Sized>(
    p: &P,
    x0: &DVector<f64>,
    opts: &BarrierOptions,
) -> PhaseOneResult {
    let n = p.dim();
    let start_violation = max_violation(p, x0);
    if start_violation < 0.0 {
        return PhaseOneResult::Feasible(x0.clone());
    }
    let mut z = DVector::zeros(n + 1);
    z.rows_mut(0, n).copy_from(x0);
    z[n] = start_violation + 1.0;
    let aux = PhaseOne::new(p);
    let hook = |z: &DVector<f64>| max_violation(p, &z.rows(0, n).into_owned()) < 0.0;
    let out = solve_barrier(&aux, z, opts, Some(&hook));
    let x = out.x.rows(0, n).into_owned();
    if max_violation(p, &x) < 0.0 {
        PhaseOneResult::Feasible(x)
    } else {
        let values = (0..p.num_constraints())
            .map(|i| p.constraint(i, &x, false).value)
            .collect();
        PhaseOneResult::Infeasible { x, values }
    }
}
