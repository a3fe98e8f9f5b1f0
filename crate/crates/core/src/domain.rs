//! Value types, parameter records and their validation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{lit, Scalar};

/// True health state of a tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeState {
    Healthy,
    Infested,
    Dying,
}

impl TreeState {
    pub const ALL: [TreeState; 3] = [TreeState::Healthy, TreeState::Infested, TreeState::Dying];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Health state assigned by an (imperfect) inspection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AssessedState {
    #[serde(rename = "healthy")]
    AssessedHealthy,
    #[serde(rename = "infested")]
    AssessedInfested,
    #[serde(rename = "dying")]
    AssessedDying,
}

impl AssessedState {
    pub const ALL: [AssessedState; 3] = [
        AssessedState::AssessedHealthy,
        AssessedState::AssessedInfested,
        AssessedState::AssessedDying,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            AssessedState::AssessedHealthy => "healthy",
            AssessedState::AssessedInfested => "infested",
            AssessedState::AssessedDying => "dying",
        }
    }
}

impl fmt::Display for AssessedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown assessed state `{0}` (expected healthy, infested or dying)")]
pub struct ParseAssessedError(pub String);

impl FromStr for AssessedState {
    type Err = ParseAssessedError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "healthy" | "h" => Ok(AssessedState::AssessedHealthy),
            "infested" | "i" => Ok(AssessedState::AssessedInfested),
            "dying" | "dead" | "d" => Ok(AssessedState::AssessedDying),
            other => Err(ParseAssessedError(other.to_string())),
        }
    }
}

/// One violated invariant.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub field: String,
    pub observed: f64,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}: {}", self.field, self.observed, self.rule)
    }
}

/// Every invariant a record failed, not just the first.
#[derive(Clone, Debug, Default, PartialEq, Error)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} invalid value(s)", self.violations.len())?;
        for v in &self.violations {
            write!(f, "\n  - {v}")?;
        }
        Ok(())
    }
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, field: &str, observed: f64, rule: impl Into<String>) {
        self.violations.push(Violation {
            field: field.to_string(),
            observed,
            rule: rule.into(),
        });
    }

    fn check(&mut self, ok: bool, field: &str, observed: f64, rule: &str) {
        if !ok {
            self.push(field, observed, rule);
        }
    }

    fn finite(&mut self, field: &str, v: f64) -> bool {
        if v.is_finite() {
            true
        } else {
            self.push(field, v, "must be finite");
            false
        }
    }

    fn probability(&mut self, field: &str, v: f64) {
        if self.finite(field, v) {
            self.check((0.0..=1.0).contains(&v), field, v, "must lie in [0, 1]");
        }
    }

    /// Prefixes every field name, for nesting reports of sub-records.
    pub fn scoped(mut self, prefix: &str) -> Self {
        for v in &mut self.violations {
            v.field = format!("{prefix}.{}", v.field);
        }
        self
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    pub fn into_result<V>(self, value: V) -> Result<V, ValidationReport> {
        if self.is_empty() {
            Ok(value)
        } else {
            Err(self)
        }
    }
}

/// Checks a record's invariants, returning it unchanged when they hold.
pub trait Validate: Sized {
    fn validate(self) -> Result<Self, ValidationReport>;
}

/// Community-level probabilities of the three true states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Prevalence<T> {
    p_h: T,
    p_i: T,
    p_d: T,
}

impl<T: Scalar> Prevalence<T> {
    /// Builds a point on the simplex. Inputs off the simplex by less than the
    /// rescale tolerance are normalized; anything further is rejected.
    pub fn new(p_h: T, p_i: T, p_d: T) -> Result<Self, ValidationReport> {
        let mut report = ValidationReport::default();
        let vals = [("p_h", p_h), ("p_i", p_i), ("p_d", p_d)];
        for (name, v) in vals {
            report.probability(name, v.to_f64_lossy());
        }
        if !report.is_empty() {
            return Err(report);
        }
        let sum = p_h + p_i + p_d;
        let drift = (sum - T::one()).abs();
        if drift <= lit(T::PROB_TOL) {
            return Ok(Prevalence { p_h, p_i, p_d });
        }
        if drift <= lit(T::RENORM_TOL) {
            return Ok(Prevalence::normalized([p_h, p_i, p_d]));
        }
        report.push(
            "sum",
            sum.to_f64_lossy(),
            format!("components must sum to 1 (tolerance {:e})", T::PROB_TOL),
        );
        Err(report)
    }

    /// Rescales nonnegative weights onto the simplex. Negative entries are
    /// treated as zero. The weights must not all vanish.
    pub(crate) fn normalized(w: [T; 3]) -> Self {
        let w = w.map(|x| x.max(T::zero()));
        let total = w[0] + w[1] + w[2];
        Prevalence {
            p_h: w[0] / total,
            p_i: w[1] / total,
            p_d: w[2] / total,
        }
    }

    pub fn p_h(&self) -> T {
        self.p_h
    }

    pub fn p_i(&self) -> T {
        self.p_i
    }

    pub fn p_d(&self) -> T {
        self.p_d
    }

    pub fn get(&self, s: TreeState) -> T {
        self.as_array()[s.index()]
    }

    pub fn as_array(&self) -> [T; 3] {
        [self.p_h, self.p_i, self.p_d]
    }
}

impl<T: Scalar> Validate for Prevalence<T> {
    fn validate(self) -> Result<Self, ValidationReport> {
        Prevalence::new(self.p_h, self.p_i, self.p_d)
    }
}

/// Row-stochastic matrix of `P(assessed | true)`; rows are true states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct AssessmentMatrix<T> {
    rows: [[T; 3]; 3],
}

impl<T: Scalar> AssessmentMatrix<T> {
    pub fn new(rows: [[T; 3]; 3]) -> Result<Self, ValidationReport> {
        let mut report = ValidationReport::default();
        for (r, state) in TreeState::ALL.iter().enumerate() {
            let row_name = format!("{state:?}").to_lowercase();
            let mut finite = true;
            for (c, assessed) in AssessedState::ALL.iter().enumerate() {
                let field = format!("{row_name}.{}", assessed.label());
                let v = rows[r][c].to_f64_lossy();
                finite &= v.is_finite();
                report.probability(&field, v);
            }
            if finite {
                let sum = rows[r][0] + rows[r][1] + rows[r][2];
                if (sum - T::one()).abs() > lit(T::PROB_TOL) {
                    report.push(
                        &format!("{row_name}.sum"),
                        sum.to_f64_lossy(),
                        format!("row must sum to 1 (tolerance {:e})", T::PROB_TOL),
                    );
                }
            }
        }
        report.into_result(AssessmentMatrix { rows })
    }

    pub fn identity() -> Self {
        let (o, z) = (T::one(), T::zero());
        AssessmentMatrix {
            rows: [[o, z, z], [z, o, z], [z, z, o]],
        }
    }

    pub fn uniform() -> Self {
        let t = T::one() / lit(3.0);
        AssessmentMatrix { rows: [[t; 3]; 3] }
    }

    /// `P(assessed | truth)`.
    pub fn entry(&self, truth: TreeState, assessed: AssessedState) -> T {
        self.rows[truth.index()][assessed.index()]
    }

    pub fn row(&self, truth: TreeState) -> [T; 3] {
        self.rows[truth.index()]
    }

    pub fn rows(&self) -> [[T; 3]; 3] {
        self.rows
    }
}

impl<T: Scalar> Validate for AssessmentMatrix<T> {
    fn validate(self) -> Result<Self, ValidationReport> {
        AssessmentMatrix::new(self.rows)
    }
}

/// Spread, mortality, recovery and treatment parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpidemicParams<T> {
    /// Pest spread rate (1/year).
    pub beta: T,
    /// Pest-induced mortality rate (1/year).
    pub gamma: T,
    /// Recovery rate under effective treatment (1/year).
    pub alpha: T,
    pub eps_h: T,
    pub eps_i: T,
    /// Planning horizon (years).
    pub tau_star: T,
}

impl<T: Scalar> Validate for EpidemicParams<T> {
    fn validate(self) -> Result<Self, ValidationReport> {
        let mut r = ValidationReport::default();
        for (name, v, strict) in [
            ("beta", self.beta, true),
            ("gamma", self.gamma, true),
            ("alpha", self.alpha, false),
            ("tau_star", self.tau_star, true),
        ] {
            let v = v.to_f64_lossy();
            if r.finite(name, v) {
                if strict {
                    r.check(v > 0.0, name, v, "must be > 0");
                } else {
                    r.check(v >= 0.0, name, v, "must be >= 0");
                }
            }
        }
        r.probability("eps_h", self.eps_h.to_f64_lossy());
        r.probability("eps_i", self.eps_i.to_f64_lossy());
        r.into_result(self)
    }
}

/// Decomposition of the municipal values of avoiding mortality into a
/// survival benefit and removal costs; needed only for welfare accounting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SocialValues<T> {
    pub v_m: T,
    pub w_m: T,
    pub w_m_prime: T,
}

/// Economic parameters of the treatment market.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EconParams<T> {
    pub cost_c: T,
    /// Lower bound of the owner's value of avoiding mortality.
    pub a: T,
    /// Upper bound of the owner's value of avoiding mortality.
    pub b: T,
    pub delta_m: T,
    pub delta_m_prime: T,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<SocialValues<T>>,
}

impl<T: Scalar> EconParams<T> {
    pub fn with_delta_m(mut self, delta_m: T) -> Self {
        self.delta_m = delta_m;
        self.decomposition = None;
        self
    }
}

impl<T: Scalar> Validate for EconParams<T> {
    fn validate(self) -> Result<Self, ValidationReport> {
        let mut r = ValidationReport::default();
        let c = self.cost_c.to_f64_lossy();
        if r.finite("cost_c", c) {
            r.check(c > 0.0, "cost_c", c, "must be > 0");
        }
        let (a, b) = (self.a.to_f64_lossy(), self.b.to_f64_lossy());
        let fa = r.finite("a", a);
        let fb = r.finite("b", b);
        if fa {
            r.check(a >= 0.0, "a", a, "must be >= 0");
        }
        if fa && fb {
            r.check(a <= b, "b", b, "must be >= a");
        }
        for (name, v) in [("delta_m", self.delta_m), ("delta_m_prime", self.delta_m_prime)] {
            let v = v.to_f64_lossy();
            if r.finite(name, v) {
                r.check(v >= 0.0, name, v, "must be >= 0");
            }
        }
        if let Some(d) = self.decomposition {
            let mut all_finite = true;
            for (name, v) in [("v_m", d.v_m), ("w_m", d.w_m), ("w_m_prime", d.w_m_prime)] {
                all_finite &= r.finite(name, v.to_f64_lossy());
            }
            if all_finite {
                let tol = lit::<T>(T::STATE_TOL);
                let scale = |x: T| tol * T::one().max(x.abs());
                let s1 = d.v_m + d.w_m;
                if (s1 - self.delta_m).abs() > scale(self.delta_m) {
                    r.push(
                        "v_m + w_m",
                        s1.to_f64_lossy(),
                        format!("must equal delta_m = {}", self.delta_m),
                    );
                }
                let s2 = d.v_m + d.w_m_prime;
                if (s2 - self.delta_m_prime).abs() > scale(self.delta_m_prime) {
                    r.push(
                        "v_m + w_m_prime",
                        s2.to_f64_lossy(),
                        format!("must equal delta_m_prime = {}", self.delta_m_prime),
                    );
                }
            }
        }
        r.into_result(self)
    }
}

/// Economic parameters as written in a configuration document, where the
/// municipal values may be given directly, derived from their
/// decomposition, or both.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconInput<T> {
    pub cost_c: T,
    pub a: T,
    pub b: T,
    pub delta_m: Option<T>,
    pub delta_m_prime: Option<T>,
    pub v_m: Option<T>,
    pub w_m: Option<T>,
    pub w_m_prime: Option<T>,
}

impl<T: Scalar> EconInput<T> {
    pub fn resolve(self) -> Result<EconParams<T>, ValidationReport> {
        let mut r = ValidationReport::default();
        let decomposition = match (self.v_m, self.w_m, self.w_m_prime) {
            (Some(v_m), Some(w_m), Some(w_m_prime)) => Some(SocialValues { v_m, w_m, w_m_prime }),
            (None, None, None) => None,
            _ => {
                r.push(
                    "v_m/w_m/w_m_prime",
                    f64::NAN,
                    "decomposition must give all three of v_m, w_m, w_m_prime or none",
                );
                None
            }
        };
        let delta_m = self.delta_m.or_else(|| decomposition.map(|d| d.v_m + d.w_m));
        let delta_m_prime = self
            .delta_m_prime
            .or_else(|| decomposition.map(|d| d.v_m + d.w_m_prime));
        if delta_m.is_none() {
            r.push("delta_m", f64::NAN, "missing: give delta_m or v_m and w_m");
        }
        if delta_m_prime.is_none() {
            r.push(
                "delta_m_prime",
                f64::NAN,
                "missing: give delta_m_prime or v_m and w_m_prime",
            );
        }
        let (Some(delta_m), Some(delta_m_prime)) = (delta_m, delta_m_prime) else {
            return Err(r);
        };
        let params = EconParams {
            cost_c: self.cost_c,
            a: self.a,
            b: self.b,
            delta_m,
            delta_m_prime,
            decomposition,
        };
        match params.validate() {
            Ok(p) => r.into_result(p),
            Err(e) => {
                r.merge(e);
                Err(r)
            }
        }
    }
}

impl<T: Scalar> From<EconParams<T>> for EconInput<T> {
    fn from(p: EconParams<T>) -> Self {
        EconInput {
            cost_c: p.cost_c,
            a: p.a,
            b: p.b,
            delta_m: Some(p.delta_m),
            delta_m_prime: Some(p.delta_m_prime),
            v_m: p.decomposition.map(|d| d.v_m),
            w_m: p.decomposition.map(|d| d.w_m),
            w_m_prime: p.decomposition.map(|d| d.w_m_prime),
        }
    }
}

/// Prevalence as written in a configuration document.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrevalenceInput<T> {
    pub p_h: T,
    pub p_i: T,
    pub p_d: T,
}

impl<T: Scalar> PrevalenceInput<T> {
    pub fn resolve(self) -> Result<Prevalence<T>, ValidationReport> {
        Prevalence::new(self.p_h, self.p_i, self.p_d)
    }
}
