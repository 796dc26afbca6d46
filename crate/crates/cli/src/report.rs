use serde::Serialize;

/// How a gate compares `measured` with `target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// |measured - target| <= tolerance.
    Within,
    /// measured >= target - tolerance.
    AtLeast,
    /// measured <= target + tolerance.
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gate {
    pub name: String,
    pub target: f64,
    pub measured: f64,
    pub tolerance: f64,
    pub rule: Rule,
    pub pass: bool,
}

impl Gate {
    pub fn new(name: impl Into<String>, rule: Rule, target: f64, tolerance: f64, measured: f64) -> Self {
        let pass = measured.is_finite()
            && match rule {
                Rule::Within => (measured - target).abs() <= tolerance,
                Rule::AtLeast => measured >= target - tolerance,
                Rule::AtMost => measured <= target + tolerance,
            };
        Self { name: name.into(), target, measured, tolerance, rule, pass }
    }

    /// lo <= measured <= hi, stored as a Within gate around the midpoint.
    pub fn in_range(name: impl Into<String>, lo: f64, hi: f64, measured: f64) -> Self {
        Self::new(name, Rule::Within, 0.5 * (lo + hi), 0.5 * (hi - lo), measured)
    }
}

/// Fitted exponent with its inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionReport {
    pub name: String,
    pub fitted_exponent: f64,
    pub stderr: f64,
    /// (ln h, ln quantity).
    pub points: Vec<(f64, f64)>,
    pub target_exponent: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub config_echo: serde_json::Value,
    pub gates: Vec<Gate>,
    pub runtime_seconds: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub regressions: Vec<RegressionReport>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.gates.iter().all(|g| g.pass)
    }
}
