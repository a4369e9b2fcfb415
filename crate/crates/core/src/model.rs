//! Problem-instance types shared across the crate.
//!
//! Matrices are stored band-major: `channel_gains[k][n]` is the squared channel
//! magnitude from the primary transmitter to radio `n` on band `k`, and
//! `FusionDesign::weights[k]` is the combining vector for band `k`.

use crate::error::{Result, SenseError};

/// Physical sensing instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingScenario {
    pub num_bands: usize,
    pub num_radios: usize,
    pub samples_per_band: usize,
    pub noise_variance: f64,
    /// `K x N`, band-major.
    pub channel_gains: Vec<Vec<f64>>,
}

impl SensingScenario {
    pub fn gains(&self, band: usize) -> &[f64] {
        &self.channel_gains[band]
    }

    pub fn min_gain(&self, band: usize) -> f64 {
        self.channel_gains[band]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_gain(&self, band: usize) -> f64 {
        self.channel_gains[band]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_variance.sqrt()
    }

    /// Same scenario restricted to a single radio.
    pub fn single_radio(&self, radio: usize) -> SensingScenario {
        SensingScenario {
            num_bands: self.num_bands,
            num_radios: 1,
            samples_per_band: self.samples_per_band,
            noise_variance: self.noise_variance,
            channel_gains: self
                .channel_gains
                .iter()
                .map(|row| vec![row[radio]])
                .collect(),
        }
    }

    /// Eight-band, two-radio instance used throughout the experiments
    /// (M = 100, unit noise variance).
    pub fn table1() -> SensingScenario {
        let radio0 = [0.17, 0.21, 0.27, 0.14, 0.37, 0.38, 0.49, 0.33];
        let radio1 = [0.21, 0.17, 0.21, 0.21, 0.17, 0.43, 0.15, 0.35];
        SensingScenario {
            num_bands: 8,
            num_radios: 2,
            samples_per_band: 100,
            noise_variance: 1.0,
            channel_gains: radio0
                .iter()
                .zip(radio1.iter())
                .map(|(&a, &b)| vec![a, b])
                .collect(),
        }
    }
}

/// Regulatory envelope for one optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyConstraints {
    /// Per-band caps on the miss probability.
    pub miss_caps: Vec<f64>,
    /// Per-band caps on the false-alarm probability.
    pub false_alarm_caps: Vec<f64>,
    pub interference_costs: Vec<f64>,
    pub throughput_rates: Vec<f64>,
    pub interference_budget: f64,
}

impl PolicyConstraints {
    pub fn table1(interference_budget: f64) -> PolicyConstraints {
        PolicyConstraints {
            miss_caps: vec![0.1; 8],
            false_alarm_caps: vec![0.5; 8],
            interference_costs: vec![0.71, 5.95, 3.91, 4.21, 0.44, 2.03, 0.58, 2.85],
            throughput_rates: vec![356.0, 327.0, 972.0, 806.0, 755.0, 68.0, 720.0, 15.0],
            interference_budget,
        }
    }

    pub fn with_budget(&self, interference_budget: f64) -> PolicyConstraints {
        PolicyConstraints {
            interference_budget,
            ..self.clone()
        }
    }

    /// Restriction to the listed bands, in the given order.
    pub fn select_bands(&self, bands: &[usize]) -> PolicyConstraints {
        let pick = |v: &[f64]| bands.iter().map(|&k| v[k]).collect::<Vec<_>>();
        PolicyConstraints {
            miss_caps: pick(&self.miss_caps),
            false_alarm_caps: pick(&self.false_alarm_caps),
            interference_costs: pick(&self.interference_costs),
            throughput_rates: pick(&self.throughput_rates),
            interference_budget: self.interference_budget,
        }
    }

    pub fn total_rate(&self) -> f64 {
        self.throughput_rates.iter().sum()
    }

    pub fn total_cost(&self) -> f64 {
        self.interference_costs.iter().sum()
    }
}

/// Decision variables of the joint detection problem.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionDesign {
    /// `K x N`, band-major.
    pub weights: Vec<Vec<f64>>,
    pub thresholds: Vec<f64>,
}

impl FusionDesign {
    /// Every band uses weight 1 on `radio` and 0 elsewhere.
    pub fn indicator(
        num_bands: usize,
        num_radios: usize,
        radio: usize,
        thresholds: Vec<f64>,
    ) -> Self {
        let mut w = vec![0.0; num_radios];
        w[radio] = 1.0;
        FusionDesign {
            weights: vec![w; num_bands],
            thresholds,
        }
    }

    /// Rescale each band so that its largest weight is one. Detection
    /// probabilities are unchanged.
    pub fn normalized(&self) -> FusionDesign {
        let mut out = self.clone();
        for (w, t) in out.weights.iter_mut().zip(out.thresholds.iter_mut()) {
            let m = w.iter().copied().fold(0.0, f64::max);
            if m > 0.0 {
                w.iter_mut().for_each(|x| *x /= m);
                *t /= m;
            }
        }
        out
    }
}

/// Per-band detection probabilities and their aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionMetrics {
    pub pf: Vec<f64>,
    pub pd: Vec<f64>,
    pub pm: Vec<f64>,
    pub throughput: f64,
    pub interference: f64,
}

/// Slack of each constraint family; positive entries are violations.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityResiduals {
    /// `pm_k - alpha_k`
    pub miss: Vec<f64>,
    /// `pf_k - beta_k`
    pub false_alarm: Vec<f64>,
    /// `c^T pm - epsilon`
    pub interference: f64,
}

impl FeasibilityResiduals {
    pub fn max_violation(&self) -> f64 {
        self.miss
            .iter()
            .chain(self.false_alarm.iter())
            .copied()
            .fold(self.interference, f64::max)
    }

    pub fn is_feasible(&self, tol: f64) -> bool {
        self.max_violation() <= tol
    }
}

impl DetectionMetrics {
    pub fn residuals(&self, policy: &PolicyConstraints) -> FeasibilityResiduals {
        FeasibilityResiduals {
            miss: self
                .pm
                .iter()
                .zip(&policy.miss_caps)
                .map(|(pm, a)| pm - a)
                .collect(),
            false_alarm: self
                .pf
                .iter()
                .zip(&policy.false_alarm_caps)
                .map(|(pf, b)| pf - b)
                .collect(),
            interference: self.interference - policy.interference_budget,
        }
    }
}

/// One invariant violation found by [`validate_scenario`].
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn in_half_open_half(x: f64) -> bool {
    x > 0.0 && x <= 0.5
}

/// Check every invariant of the scenario and the policy, returning all
/// violations rather than stopping at the first.
pub fn validate_scenario(
    s: &SensingScenario,
    p: &PolicyConstraints,
) -> std::result::Result<(), Vec<Violation>> {
    let mut v = Vec::new();
    let mut push = |field: &'static str, message: String| v.push(Violation { field, message });

    if s.num_bands == 0 {
        push("num_bands", "must be at least 1".into());
    }
    if s.num_radios == 0 {
        push("num_radios", "must be at least 1".into());
    }
    if s.samples_per_band == 0 {
        push("samples_per_band", "must be at least 1".into());
    }
    if !(s.noise_variance.is_finite() && s.noise_variance > 0.0) {
        push(
            "noise_variance",
            format!("must be positive, got {}", s.noise_variance),
        );
    }
    if s.channel_gains.len() != s.num_bands {
        push(
            "channel_gains",
            format!(
                "expected {} bands, got {}",
                s.num_bands,
                s.channel_gains.len()
            ),
        );
    }
    for (k, row) in s.channel_gains.iter().enumerate() {
        if row.len() != s.num_radios {
            push(
                "channel_gains",
                format!(
                    "band {k}: expected {} radios, got {}",
                    s.num_radios,
                    row.len()
                ),
            );
        }
        for (n, &g) in row.iter().enumerate() {
            if !(g.is_finite() && g >= 0.0) {
                push(
                    "channel_gains",
                    format!("band {k}, radio {n}: gain {g} must be >= 0"),
                );
            }
        }
    }

    let k = s.num_bands;
    let vectors: [(&'static str, &Vec<f64>); 4] = [
        ("miss_caps", &p.miss_caps),
        ("false_alarm_caps", &p.false_alarm_caps),
        ("interference_costs", &p.interference_costs),
        ("throughput_rates", &p.throughput_rates),
    ];
    for (name, vec) in vectors {
        if vec.len() != k {
            push(name, format!("expected {k} entries, got {}", vec.len()));
        }
    }
    for (i, &a) in p.miss_caps.iter().enumerate() {
        if !in_half_open_half(a) {
            push("miss_caps", format!("entry {i} = {a} outside (0, 0.5]"));
        }
    }
    for (i, &b) in p.false_alarm_caps.iter().enumerate() {
        if !in_half_open_half(b) {
            push(
                "false_alarm_caps",
                format!("entry {i} = {b} outside (0, 0.5]"),
            );
        }
    }
    for (i, &c) in p.interference_costs.iter().enumerate() {
        if !(c.is_finite() && c >= 0.0) {
            push(
                "interference_costs",
                format!("entry {i} = {c} must be >= 0"),
            );
        }
    }
    for (i, &r) in p.throughput_rates.iter().enumerate() {
        if !(r.is_finite() && r >= 0.0) {
            push("throughput_rates", format!("entry {i} = {r} must be >= 0"));
        }
    }
    if !(p.interference_budget.is_finite() && p.interference_budget > 0.0) {
        push(
            "interference_budget",
            format!("must be positive, got {}", p.interference_budget),
        );
    }

    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

/// [`validate_scenario`] folded into the crate error type.
pub fn ensure_valid(s: &SensingScenario, p: &PolicyConstraints) -> Result<()> {
    validate_scenario(s, p)
        .map_err(|v| SenseError::Invalid(v.iter().map(ToString::to_string).collect()))
}

/// Checks a design against a scenario: shapes, non-negative weights, a
/// nonzero weight vector per band and finite, non-negative thresholds.
///
/// A zero threshold is allowed; it means the band is always declared occupied.
pub fn validate_design(s: &SensingScenario, d: &FusionDesign) -> Result<()> {
    if d.weights.len() != s.num_bands {
        return Err(SenseError::Dimension {
            what: "design weights",
            expected: s.num_bands,
            got: d.weights.len(),
        });
    }
    if d.thresholds.len() != s.num_bands {
        return Err(SenseError::Dimension {
            what: "design thresholds",
            expected: s.num_bands,
            got: d.thresholds.len(),
        });
    }
    let mut bad = Vec::new();
    for (k, (w, &t)) in d.weights.iter().zip(&d.thresholds).enumerate() {
        if w.len() != s.num_radios {
            return Err(SenseError::Dimension {
                what: "band weight vector",
                expected: s.num_radios,
                got: w.len(),
            });
        }
        if w.iter().any(|&x| !(x.is_finite() && x >= 0.0)) {
            bad.push(format!("band {k}: weights must be finite and >= 0"));
        }
        if !(t.is_finite() && t >= 0.0) {
            bad.push(format!("band {k}: threshold {t} must be finite and >= 0"));
        }
    }
    if !bad.is_empty() {
        return Err(SenseError::Invalid(bad));
    }
    for (k, w) in d.weights.iter().enumerate() {
        crate::fusion::check_weights(k, w)?;
    }
    Ok(())
}
