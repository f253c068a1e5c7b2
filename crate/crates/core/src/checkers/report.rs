use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::schatten::SchattenIndex;

/// One evaluated inequality: `rhs_lower − tol ≤ lhs ≤ rhs_upper + tol`.
/// At least one side is present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub name: String,
    pub lhs: f64,
    pub rhs_lower: Option<f64>,
    pub rhs_upper: Option<f64>,
    pub tolerance: f64,
    /// Ungated inequalities are recorded but do not affect the verdict.
    #[serde(default = "default_true")]
    pub gated: bool,
}

fn default_true() -> bool {
    true
}

impl Inequality {
    pub fn upper(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs_lower: None,
            rhs_upper: Some(rhs),
            tolerance,
            gated: true,
        }
    }

    pub fn lower(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs_lower: Some(rhs),
            rhs_upper: None,
            tolerance,
            gated: true,
        }
    }

    pub fn two_sided(name: impl Into<String>, lower: f64, lhs: f64, upper: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs_lower: Some(lower),
            rhs_upper: Some(upper),
            tolerance,
            gated: true,
        }
    }

    /// `|lhs − rhs| ≤ tol`.
    pub fn equality(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Self::two_sided(name, rhs, lhs, rhs, tolerance)
    }

    pub fn ungated(mut self) -> Self {
        self.gated = false;
        self
    }

    /// `min(rhs_upper − lhs, lhs − rhs_lower)` over the sides present.
    pub fn slack(&self) -> f64 {
        let up = self.rhs_upper.map(|r| r - self.lhs);
        let lo = self.rhs_lower.map(|r| self.lhs - r);
        match (up, lo) {
            (Some(u), Some(l)) => u.min(l),
            (Some(u), None) => u,
            (None, Some(l)) => l,
            (None, None) => f64::NAN,
        }
    }

    pub fn holds(&self) -> bool {
        let s = self.slack();
        s.is_finite() && s >= -self.tolerance
    }
}

/// Verdict for one bound on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound_id: String,
    pub m: usize,
    pub n: usize,
    pub k: Option<usize>,
    pub c: Option<usize>,
    pub p: Option<SchattenIndex>,
    pub seed: Option<u64>,
    pub lhs: f64,
    pub rhs_lower: Option<f64>,
    pub rhs_upper: Option<f64>,
    pub slack: f64,
    pub tolerance: f64,
    pub holds: bool,
    pub context: ReportContext,
}

/// Scalar ingredients, free-form labels and secondary inequalities.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportContext {
    #[serde(default)]
    pub scalars: BTreeMap<String, f64>,
    #[serde(default)]
    pub labels: BTreeMap<String, String>,
    #[serde(default)]
    pub sub_checks: Vec<Inequality>,
}

impl BoundReport {
    pub fn new(bound_id: impl Into<String>, shape: (usize, usize), main: Inequality) -> Self {
        let mut r = Self {
            bound_id: bound_id.into(),
            m: shape.0,
            n: shape.1,
            k: None,
            c: None,
            p: None,
            seed: None,
            lhs: main.lhs,
            rhs_lower: main.rhs_lower,
            rhs_upper: main.rhs_upper,
            slack: main.slack(),
            tolerance: main.tolerance,
            holds: false,
            context: ReportContext::default(),
        };
        r.refresh();
        r
    }

    fn main(&self) -> Inequality {
        Inequality {
            name: self.bound_id.clone(),
            lhs: self.lhs,
            rhs_lower: self.rhs_lower,
            rhs_upper: self.rhs_upper,
            tolerance: self.tolerance,
            gated: true,
        }
    }

    /// Recomputes `slack` and `holds` from the stored sides.
    fn refresh(&mut self) {
        let main = self.main();
        self.slack = main.slack();
        self.holds = self.derived_holds();
    }

    /// The verdict implied by the numeric columns and gated sub-checks.
    pub fn derived_holds(&self) -> bool {
        self.main().holds() && self.context.sub_checks.iter().filter(|c| c.gated).all(Inequality::holds)
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_c(mut self, c: usize) -> Self {
        self.c = Some(c);
        self
    }

    pub fn with_p(mut self, p: SchattenIndex) -> Self {
        self.p = Some(p);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn scalar(mut self, key: &str, value: f64) -> Self {
        self.context.scalars.insert(key.to_string(), value);
        self
    }

    pub fn label(mut self, key: &str, value: impl Into<String>) -> Self {
        self.context.labels.insert(key.to_string(), value.into());
        self
    }

    pub fn sub_check(mut self, check: Inequality) -> Self {
        self.context.sub_checks.push(check);
        self.refresh();
        self
    }

    /// Smallest slack over the main and all gated inequalities, relative to
    /// its tolerance: negative means some gated side is violated.
    pub fn worst_margin(&self) -> f64 {
        std::iter::once(self.main())
            .chain(self.context.sub_checks.iter().filter(|c| c.gated).cloned())
            .map(|c| c.slack() + c.tolerance)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn sub(&self, name: &str) -> Option<&Inequality> {
        self.context.sub_checks.iter().find(|c| c.name == name)
    }
}
