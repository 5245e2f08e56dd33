//! Numerical checks of the a priori estimates along curves and flows.

pub mod besov;
pub mod checks;
pub mod monotonicity;
pub mod oracle;

pub use besov::{besov_norm, besov_seminorm, BesovEstimate};
pub use checks::{
    fenchel_and_length_bounds, fenchel_integral, higher_regularity_check, higher_regularity_from,
    interpolation_check, interpolation_from, uniform_bounds, HigherRegularity, InterpolationRatio,
    UniformBounds,
};
pub use monotonicity::{monotonicity_property_test, MonotonicityOutcome};
pub use oracle::{fd_gradient_oracle, richardson_step};

use crate::curve::format_float;

/// Slack for the inequality rows that hold exactly in the continuum.
pub const BOUND_TOL: f64 = 1e-6;

/// One inequality `lhs <= rhs`, passing when `lhs <= rhs + tolerance`.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckRow {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    /// `rhs - lhs`; negative values are violations before slack.
    pub margin: f64,
    pub pass: bool,
}

impl CheckRow {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = rhs - lhs;
        Self {
            name: name.into(),
            lhs,
            rhs,
            tolerance,
            margin,
            pass: margin >= -tolerance,
        }
    }

    /// A row that always fails, for anomalies such as a vanishing denominator.
    pub fn anomaly(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            pass: false,
            ..Self::new(name, lhs, rhs, 0.0)
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiagnosticsReport {
    pub checks: Vec<CheckRow>,
    pub context: Vec<(String, String)>,
}

impl DiagnosticsReport {
    pub const CSV_HEADER: &'static str = "check_name,lhs,rhs,margin,pass";

    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_context(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.context.push((key.into(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: CheckRow) {
        self.checks.push(row);
    }

    pub fn extend(&mut self, rows: impl IntoIterator<Item = CheckRow>) {
        self.checks.extend(rows);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Context as `# key=value` lines, then the header and one row per check.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.context {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                c.name,
                format_float(c.lhs),
                format_float(c.rhs),
                format_float(c.margin),
                c.pass
            ));
        }
        out
    }
}
