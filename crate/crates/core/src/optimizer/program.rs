//! The convex surrogate program over primed variables `(w'_k, t'_k)`.
//!
//! With `u_k = t'_k / s2 - M 1'w'_k` and `x_k = t'_k - M (s2 1 + G_k)'w'_k`
//! the program is
//!
//! ```text
//! minimize    sum_k r_k Q(h_k u_k)                       (h_k = s * sqrt(s2 + 2 min_n G_k(n)))
//! subject to  sum_k c_k (1 - Q(x_k)) <= eps              coupling
//!             Q^-1(beta_k) sqrt(2M) |w'_k| - u_k <= 0    false alarm
//!             x_k - Q^-1(1 - alpha_k) <= 0               miss
//!             -s2 u_k <= 0,  x_k <= 0                    lemma regions
//!             2 M s2 w'_k' (s2 I + 2 diag G_k) w'_k <= 1 scale
//!             -w'_k(n) <= 0                              sign
//! ```
//!
//! Each band is parametrized by `(w'_k, v_k)` with the offset
//! `v_k = x_k`, so `t'_k = v_k + M (s2 1 + G_k)'w'_k`. This is a linear change
//! of variables; it avoids cancellation in `x_k`, whose value near an active
//! miss row is many orders smaller than `t'_k`.
//!
//! The scale constraint bounds the otherwise homogeneous feasible set. At
//! equality the coupling and miss rows are the exact interference and miss
//! probabilities; strictly inside they are conservative.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::detector::{normal_pdf, q_tail, q_tail_inv};
use crate::error::Result;
use crate::model::{ensure_valid, PolicyConstraints, SensingScenario};

use super::barrier::{BarrierProblem, Eval};

/// How the constants of the convexified constraints are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConstraintForm {
    /// Constants obtained by substituting the normalization directly.
    #[default]
    Derived,
    /// Literal printed form: miss bound carries an extra noise-std factor and
    /// the surrogate bound omits it. Identical to `Derived` at unit noise.
    PaperLiteral,
}

/// Identifies one inequality of the program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintId {
    Coupling,
    FalseAlarm { band: usize },
    Miss { band: usize },
    RegionLower { band: usize },
    RegionUpper { band: usize },
    Scale { band: usize },
    Sign { band: usize, radio: usize },
}

impl std::fmt::Display for ConstraintId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConstraintId::Coupling => write!(f, "interference budget"),
            ConstraintId::FalseAlarm { band } => write!(f, "false-alarm cap, band {band}"),
            ConstraintId::Miss { band } => write!(f, "miss cap, band {band}"),
            ConstraintId::RegionLower { band } => {
                write!(f, "convexity region (lower), band {band}")
            }
            ConstraintId::RegionUpper { band } => {
                write!(f, "convexity region (upper), band {band}")
            }
            ConstraintId::Scale { band } => write!(f, "scale normalization, band {band}"),
            ConstraintId::Sign { band, radio } => {
                write!(f, "weight sign, band {band} radio {radio}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum WeightVars {
    /// Weights occupy `start..start + N`.
    Free { start: usize },
    /// Weights are constants (already normalized).
    Fixed(Vec<f64>),
}

#[derive(Debug, Clone)]
pub(crate) struct BandBlock {
    /// Band index in the originating scenario.
    pub band: usize,
    /// Index of the offset variable `v_k = t'_k - M (s2 1 + G_k)'w'_k`.
    pub offset: usize,
    pub weights: WeightVars,
    pub gains: Vec<f64>,
    /// Multiplier on `u_k` inside the surrogate Q.
    pub surrogate_factor: f64,
    pub pf_coef: f64,
    pub miss_rhs: f64,
    pub rate: f64,
    pub cost: f64,
}

/// Number of constraints in each family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConstraintCounts {
    pub coupling: usize,
    pub false_alarm: usize,
    pub miss: usize,
    pub region: usize,
    pub scale: usize,
    pub sign: usize,
}

impl ConstraintCounts {
    pub fn total(&self) -> usize {
        self.coupling + self.false_alarm + self.miss + self.region + self.scale + self.sign
    }
}

/// A built instance of the convex surrogate program.
#[derive(Debug, Clone)]
pub struct ConvexProgram {
    pub(crate) blocks: Vec<BandBlock>,
    pub(crate) constraints: Vec<ConstraintId>,
    dim: usize,
    samples: f64,
    noise_var: f64,
    budget: f64,
    objective_scale: f64,
    pub(crate) form: ConstraintForm,
}

/// Options for assembling a program.
#[derive(Debug, Clone)]
pub(crate) struct BuildSpec<'a> {
    pub bands: &'a [usize],
    /// `Some(radio)` fixes every band's weights to that radio's indicator.
    pub fixed_radio: Option<usize>,
    pub with_coupling: bool,
    pub form: ConstraintForm,
}

impl ConvexProgram {
    pub(crate) fn assemble(
        s: &SensingScenario,
        p: &PolicyConstraints,
        spec: &BuildSpec<'_>,
    ) -> Result<Self> {
        ensure_valid(s, p)?;
        let m = s.samples_per_band as f64;
        let s2 = s.noise_variance;
        let sigma = s.noise_std();
        let mut blocks = Vec::with_capacity(spec.bands.len());
        let mut dim = 0;
        for &k in spec.bands {
            let (weights, gains, min_gain) = match spec.fixed_radio {
                None => {
                    let start = dim;
                    dim += s.num_radios;
                    (
                        WeightVars::Free { start },
                        s.gains(k).to_vec(),
                        s.min_gain(k),
                    )
                }
                Some(n) => {
                    let g = s.channel_gains[k][n];
                    let mut w = vec![0.0; s.num_radios];
                    w[n] = 1.0 / (2.0 * m * s2 * (s2 + 2.0 * g)).sqrt();
                    (WeightVars::Fixed(w), s.gains(k).to_vec(), g)
                }
            };
            let offset = dim;
            dim += 1;
            let miss_q = q_tail_inv(1.0 - p.miss_caps[k])?;
            let (surrogate_factor, miss_rhs) = match spec.form {
                ConstraintForm::Derived => (sigma * (s2 + 2.0 * min_gain).sqrt(), miss_q),
                ConstraintForm::PaperLiteral => ((s2 + 2.0 * min_gain).sqrt(), sigma * miss_q),
            };
            blocks.push(BandBlock {
                band: k,
                offset,
                weights,
                gains,
                surrogate_factor,
                pf_coef: q_tail_inv(p.false_alarm_caps[k])?,
                miss_rhs,
                rate: p.throughput_rates[k],
                cost: p.interference_costs[k],
            });
        }

        let mut constraints = Vec::new();
        if spec.with_coupling {
            constraints.push(ConstraintId::Coupling);
        }
        for b in &blocks {
            constraints.push(ConstraintId::FalseAlarm { band: b.band });
        }
        for b in &blocks {
            constraints.push(ConstraintId::Miss { band: b.band });
        }
        for b in &blocks {
            constraints.push(ConstraintId::RegionLower { band: b.band });
            constraints.push(ConstraintId::RegionUpper { band: b.band });
        }
        for b in &blocks {
            if let WeightVars::Free { .. } = b.weights {
                constraints.push(ConstraintId::Scale { band: b.band });
            }
        }
        for b in &blocks {
            if let WeightVars::Free { .. } = b.weights {
                for n in 0..s.num_radios {
                    constraints.push(ConstraintId::Sign {
                        band: b.band,
                        radio: n,
                    });
                }
            }
        }

        let total_rate: f64 = blocks.iter().map(|b| b.rate).sum();
        Ok(ConvexProgram {
            blocks,
            constraints,
            dim,
            samples: m,
            noise_var: s2,
            budget: p.interference_budget,
            objective_scale: if total_rate > 0.0 { total_rate } else { 1.0 },
            form: spec.form,
        })
    }

    pub fn num_variables(&self) -> usize {
        self.dim
    }

    pub fn constraint_ids(&self) -> &[ConstraintId] {
        &self.constraints
    }

    pub fn constraint_counts(&self) -> ConstraintCounts {
        let mut c = ConstraintCounts::default();
        for id in &self.constraints {
            match id {
                ConstraintId::Coupling => c.coupling += 1,
                ConstraintId::FalseAlarm { .. } => c.false_alarm += 1,
                ConstraintId::Miss { .. } => c.miss += 1,
                ConstraintId::RegionLower { .. } | ConstraintId::RegionUpper { .. } => {
                    c.region += 1
                }
                ConstraintId::Scale { .. } => c.scale += 1,
                ConstraintId::Sign { .. } => c.sign += 1,
            }
        }
        c
    }

    pub fn form(&self) -> ConstraintForm {
        self.form
    }

    /// Original band indices covered by this program, in variable order.
    pub fn bands(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.band).collect()
    }

    /// Multiplier of the objective: the program minimizes
    /// `sum_k r_k g_k / objective_scale`.
    pub fn objective_scale(&self) -> f64 {
        self.objective_scale
    }

    fn block_index(&self, band: usize) -> usize {
        self.blocks
            .iter()
            .position(|b| b.band == band)
            .expect("constraint refers to a band outside the program")
    }

    /// Primed weights of a block at `x`.
    pub(crate) fn block_weights(&self, b: &BandBlock, x: &DVector<f64>) -> Vec<f64> {
        match &b.weights {
            WeightVars::Free { start } => (0..b.gains.len()).map(|n| x[start + n]).collect(),
            WeightVars::Fixed(w) => w.clone(),
        }
    }

    /// `M G_k'w'_k` and its gradient.
    fn signal_mean(&self, b: &BandBlock, x: &DVector<f64>) -> (f64, DVector<f64>) {
        let mut grad = DVector::zeros(self.dim);
        let w = self.block_weights(b, x);
        if let WeightVars::Free { start } = b.weights {
            for (n, g) in b.gains.iter().enumerate() {
                grad[start + n] = self.samples * g;
            }
        }
        let val = self.samples * w.iter().zip(&b.gains).map(|(wn, g)| wn * g).sum::<f64>();
        (val, grad)
    }

    /// Primed threshold `t'_k` of a block at `x`.
    pub(crate) fn threshold_primed(&self, b: &BandBlock, x: &DVector<f64>) -> f64 {
        let w = self.block_weights(b, x);
        let shift: f64 = w
            .iter()
            .zip(&b.gains)
            .map(|(wn, g)| wn * (self.noise_var + g))
            .sum();
        x[b.offset] + self.samples * shift
    }

    /// `u_k = (v_k + M G_k'w'_k) / s2` and its gradient.
    fn u_affine(&self, b: &BandBlock, x: &DVector<f64>) -> (f64, DVector<f64>) {
        let (mean, mut grad) = self.signal_mean(b, x);
        grad[b.offset] = 1.0;
        grad /= self.noise_var;
        ((x[b.offset] + mean) / self.noise_var, grad)
    }

    /// `x_k = v_k` (the Q-argument of the miss probability) and its gradient.
    fn miss_affine(&self, b: &BandBlock, x: &DVector<f64>) -> (f64, DVector<f64>) {
        let mut grad = DVector::zeros(self.dim);
        grad[b.offset] = 1.0;
        (x[b.offset], grad)
    }

    /// Surrogate false-alarm bound `g_k` of one block.
    pub(crate) fn surrogate_value(&self, b: &BandBlock, x: &DVector<f64>) -> f64 {
        let (u, _) = self.u_affine(b, x);
        q_tail(b.surrogate_factor * u)
    }

    /// Physical surrogate objective `sum_k r_k (1 - g_k)`.
    pub fn surrogate_throughput(&self, x: &DVector<f64>) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.rate * (1.0 - self.surrogate_value(b, x)))
            .sum()
    }

    /// Per-band surrogate bounds `g_k` at `x`, in the order of [`Self::bands`].
    pub fn surrogate_bounds(&self, x: &DVector<f64>) -> Vec<f64> {
        self.blocks
            .iter()
            .map(|b| self.surrogate_value(b, x))
            .collect()
    }

    /// Primed weights and thresholds at `x`, in the order of [`Self::bands`].
    pub fn primed_design(&self, x: &DVector<f64>) -> (Vec<Vec<f64>>, Vec<f64>) {
        self.blocks
            .iter()
            .map(|b| (self.block_weights(b, x), self.threshold_primed(b, x)))
            .unzip()
    }

    pub fn is_strictly_feasible(&self, x: &DVector<f64>) -> bool {
        (0..self.constraints.len()).all(|i| {
            let v = self.constraint_value(i, x);
            v.is_finite() && v < 0.0
        })
    }

    pub fn constraint_value(&self, i: usize, x: &DVector<f64>) -> f64 {
        self.eval_constraint(i, x, false).value
    }

    fn eval_constraint(&self, i: usize, x: &DVector<f64>, hess: bool) -> Eval {
        let m = self.samples;
        let s2 = self.noise_var;
        match self.constraints[i] {
            ConstraintId::Coupling => {
                let mut value = -self.budget;
                let mut grad = DVector::zeros(self.dim);
                let mut h = hess.then(|| DMatrix::zeros(self.dim, self.dim));
                for b in &self.blocks {
                    let (xk, gx) = self.miss_affine(b, x);
                    value += b.cost * q_tail(-xk);
                    let dens = normal_pdf(xk);
                    grad.axpy(b.cost * dens, &gx, 1.0);
                    if let Some(h) = h.as_mut() {
                        h.ger(-b.cost * xk * dens, &gx, &gx, 1.0);
                    }
                }
                Eval {
                    value,
                    grad,
                    hess: h,
                }
            }
            ConstraintId::FalseAlarm { band } => {
                let b = &self.blocks[self.block_index(band)];
                let (u, gu) = self.u_affine(b, x);
                let w = self.block_weights(b, x);
                let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
                let coef = b.pf_coef * (2.0 * m).sqrt();
                let mut grad = -gu;
                let mut h = None;
                if let WeightVars::Free { start } = b.weights {
                    if coef != 0.0 && norm > 0.0 {
                        for (n, wn) in w.iter().enumerate() {
                            grad[start + n] += coef * wn / norm;
                        }
                        if hess {
                            let mut hm = DMatrix::zeros(self.dim, self.dim);
                            for a in 0..w.len() {
                                for c in 0..w.len() {
                                    let eye = if a == c { 1.0 } else { 0.0 };
                                    hm[(start + a, start + c)] =
                                        coef * (eye - w[a] * w[c] / (norm * norm)) / norm;
                                }
                            }
                            h = Some(hm);
                        }
                    }
                }
                Eval {
                    value: coef * norm - u,
                    grad,
                    hess: h,
                }
            }
            ConstraintId::Miss { band } => {
                let b = &self.blocks[self.block_index(band)];
                let (xk, gx) = self.miss_affine(b, x);
                Eval {
                    value: xk - b.miss_rhs,
                    grad: gx,
                    hess: None,
                }
            }
            ConstraintId::RegionLower { band } => {
                let b = &self.blocks[self.block_index(band)];
                let (u, gu) = self.u_affine(b, x);
                Eval {
                    value: -s2 * u,
                    grad: gu * (-s2),
                    hess: None,
                }
            }
            ConstraintId::RegionUpper { band } => {
                let b = &self.blocks[self.block_index(band)];
                let (xk, gx) = self.miss_affine(b, x);
                Eval {
                    value: xk,
                    grad: gx,
                    hess: None,
                }
            }
            ConstraintId::Scale { band } => {
                let b = &self.blocks[self.block_index(band)];
                let WeightVars::Free { start } = b.weights else {
                    unreachable!("scale rows exist only for free weights")
                };
                let mut value = -1.0;
                let mut grad = DVector::zeros(self.dim);
                let mut h = hess.then(|| DMatrix::zeros(self.dim, self.dim));
                for (n, g) in b.gains.iter().enumerate() {
                    let d = 2.0 * m * s2 * (s2 + 2.0 * g);
                    let wn = x[start + n];
                    value += d * wn * wn;
                    grad[start + n] = 2.0 * d * wn;
                    if let Some(h) = h.as_mut() {
                        h[(start + n, start + n)] = 2.0 * d;
                    }
                }
                Eval {
                    value,
                    grad,
                    hess: h,
                }
            }
            ConstraintId::Sign { band, radio } => {
                let b = &self.blocks[self.block_index(band)];
                let WeightVars::Free { start } = b.weights else {
                    unreachable!("sign rows exist only for free weights")
                };
                let mut grad = DVector::zeros(self.dim);
                grad[start + radio] = -1.0;
                Eval {
                    value: -x[start + radio],
                    grad,
                    hess: None,
                }
            }
        }
    }

    fn eval_objective(&self, x: &DVector<f64>, hess: bool) -> Eval {
        let mut value = 0.0;
        let mut grad = DVector::zeros(self.dim);
        let mut h = hess.then(|| DMatrix::zeros(self.dim, self.dim));
        for b in &self.blocks {
            let (u, gu) = self.u_affine(b, x);
            let a = b.surrogate_factor * u;
            let wgt = b.rate / self.objective_scale;
            value += wgt * q_tail(a);
            let dens = normal_pdf(a);
            grad.axpy(-wgt * b.surrogate_factor * dens, &gu, 1.0);
            if let Some(h) = h.as_mut() {
                h.ger(wgt * b.surrogate_factor.powi(2) * a * dens, &gu, &gu, 1.0);
            }
        }
        Eval {
            value,
            grad,
            hess: h,
        }
    }

    /// Deterministic starting point. Free weights point along
    /// `(s2 I + 2 diag G_k)^-1 G_k`, the direction of largest deflection, at
    /// `scale` times the scale bound. Each threshold sits at `position` of the
    /// interval left open by the false-alarm, miss and region rows.
    pub fn heuristic_start(&self, scale: f64, position: f64) -> DVector<f64> {
        let m = self.samples;
        let s2 = self.noise_var;
        let mut x = DVector::zeros(self.dim);
        for b in &self.blocks {
            if let WeightVars::Free { start } = b.weights {
                let diag: Vec<f64> = b.gains.iter().map(|g| s2 + 2.0 * g).collect();
                // Fall back to uniform weights when every gain is zero.
                let dir: Vec<f64> = if b.gains.iter().all(|&g| g <= 0.0) {
                    diag.iter().map(|_| 1.0).collect()
                } else {
                    b.gains
                        .iter()
                        .zip(&diag)
                        .map(|(g, d)| g.max(0.0) / d)
                        .collect()
                };
                let quad: f64 = dir
                    .iter()
                    .zip(&diag)
                    .map(|(v, d)| 2.0 * m * s2 * d * v * v)
                    .sum();
                let level = scale / quad.sqrt();
                for (n, v) in dir.iter().enumerate() {
                    x[start + n] = level * v;
                }
            }
            let w = self.block_weights(b, &x);
            let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            let u_lo = (b.pf_coef * (2.0 * m).sqrt() * norm).max(0.0);
            let lo = s2 * (u_lo + m * w.iter().sum::<f64>());
            let hi = m * w
                .iter()
                .zip(&b.gains)
                .map(|(wn, g)| wn * (s2 + g))
                .sum::<f64>()
                + b.miss_rhs.min(0.0);
            let t = lo + position * (hi - lo);
            let shift: f64 = w.iter().zip(&b.gains).map(|(wn, g)| wn * (s2 + g)).sum();
            x[b.offset] = t - m * shift;
        }
        x
    }

    /// Searches the heuristic family for a strictly feasible start.
    pub fn find_heuristic_start(&self) -> Option<DVector<f64>> {
        const SCALES: [f64; 6] = [0.999, 0.99, 0.95, 0.9, 0.75, 0.5];
        const POSITIONS: [f64; 6] = [0.02, 0.1, 0.25, 0.5, 0.005, 0.75];
        SCALES
            .iter()
            .flat_map(|&sc| POSITIONS.iter().map(move |&pos| (sc, pos)))
            .map(|(sc, pos)| self.heuristic_start(sc, pos))
            .find(|x| self.is_strictly_feasible(x))
    }

    /// `count` strictly feasible points: heuristic starts at random scale and
    /// threshold position with a random relative perturbation of every
    /// coordinate, kept only if still strictly feasible.
    pub fn random_interior_points(&self, count: usize, seed: u64) -> Vec<DVector<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while out.len() < count && attempts < 1000 * count.max(1) {
            attempts += 1;
            let base =
                self.heuristic_start(rng.random_range(0.6..0.999), rng.random_range(0.01..0.9));
            if !self.is_strictly_feasible(&base) {
                continue;
            }
            let spread = rng.random_range(0.0..0.1);
            let x = base.map(|v| v * (1.0 + spread * (2.0 * rng.random::<f64>() - 1.0)));
            if self.is_strictly_feasible(&x) {
                out.push(x);
            }
        }
        out
    }

    /// Barrier function `t f0(x) - sum_i log(-f_i(x))` and its gradient, or
    /// `None` outside the strict interior.
    pub fn barrier_value_and_gradient(
        &self,
        x: &DVector<f64>,
        t: f64,
    ) -> Option<(f64, DVector<f64>)> {
        let obj = self.eval_objective(x, false);
        let mut value = t * obj.value;
        let mut grad = obj.grad * t;
        for i in 0..self.constraints.len() {
            let c = self.eval_constraint(i, x, false);
            if c.value >= 0.0 || c.value.is_nan() {
                return None;
            }
            value -= (-c.value).ln();
            grad.axpy(-1.0 / c.value, &c.grad, 1.0);
        }
        Some((value, grad))
    }
}

impl BarrierProblem for ConvexProgram {
    fn dim(&self) -> usize {
        self.dim
    }

    fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    fn objective(&self, x: &DVector<f64>, hess: bool) -> Eval {
        self.eval_objective(x, hess)
    }

    fn constraint(&self, i: usize, x: &DVector<f64>, hess: bool) -> Eval {
        self.eval_constraint(i, x, hess)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table1_program(eps: f64) -> ConvexProgram {
        let s = SensingScenario::table1();
        let p = PolicyConstraints::table1(eps);
        let bands: Vec<usize> = (0..8).collect();
        ConvexProgram::assemble(
            &s,
            &p,
            &BuildSpec {
                bands: &bands,
                fixed_radio: None,
                with_coupling: true,
                form: ConstraintForm::Derived,
            },
        )
        .unwrap()
    }

    fn fd_check(f: impl Fn(&DVector<f64>) -> f64, grad: &DVector<f64>, x: &DVector<f64>) {
        let h = 1e-6;
        for i in 0..x.len() {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            let fd = (f(&xp) - f(&xm)) / (2.0 * h);
            assert!(
                (fd - grad[i]).abs() <= 1e-5 * grad.amax().max(1e-8),
                "component {i}: fd {fd} vs analytic {}",
                grad[i]
            );
        }
    }

    #[test]
    fn heuristic_start_is_interior_for_table1() {
        let prog = table1_program(2.0);
        let x = prog.find_heuristic_start().expect("start");
        assert!(prog.is_strictly_feasible(&x));
    }

    #[test]
    fn every_row_gradient_and_hessian_match_differences() {
        let prog = table1_program(2.0);
        let x = prog.find_heuristic_start().unwrap();
        for i in 0..prog.num_constraints() {
            let e = prog.constraint(i, &x, true);
            fd_check(|y| prog.constraint(i, y, false).value, &e.grad, &x);
            if let Some(h) = e.hess {
                for j in 0..x.len() {
                    let col = h.column(j).into_owned();
                    fd_check(|y| prog.constraint(i, y, false).grad[j], &col, &x);
                }
            }
        }
        let e = prog.objective(&x, true);
        fd_check(|y| prog.objective(y, false).value, &e.grad, &x);
        let h = e.hess.unwrap();
        for j in 0..x.len() {
            let col = h.column(j).into_owned();
            fd_check(|y| prog.objective(y, false).grad[j], &col, &x);
        }
    }
}
