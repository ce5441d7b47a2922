//! Structured results for the verification commands.

use std::fmt;

/// One named scalar result from a check, with an optional tolerance bound it
/// was compared against.
#[derive(Debug, Clone)]
pub struct Estimate {
    pub name: String,
    pub value: f64,
    pub bound: Option<f64>,
}

/// Outcome of a verification command: a list of estimates plus a pass flag.
#[derive(Debug, Clone, Default)]
pub struct EstimateReport {
    pub title: String,
    pub estimates: Vec<Estimate>,
    pub failures: Vec<String>,
}

impl EstimateReport {
    pub fn new(title: &str) -> Self {
        EstimateReport {
            title: title.to_string(),
            ..Default::default()
        }
    }

    pub fn record(&mut self, name: &str, value: f64) {
        self.estimates.push(Estimate {
            name: name.to_string(),
            value,
            bound: None,
        });
    }

    /// Record `value` and require `value <= bound`.
    pub fn check_le(&mut self, name: &str, value: f64, bound: f64) {
        self.estimates.push(Estimate {
            name: name.to_string(),
            value,
            bound: Some(bound),
        });
        if !(value <= bound) {
            self.failures
                .push(format!("{name}: {value} exceeds {bound}"));
        }
    }

    pub fn require(&mut self, name: &str, ok: bool) {
        if !ok {
            self.failures.push(format!("{name}: failed"));
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn merge(&mut self, other: EstimateReport) {
        self.estimates.extend(other.estimates);
        self.failures.extend(other.failures);
    }

    /// Machine-readable summary: one `name,value,bound,pass` row per
    /// estimate and a trailing `overall` row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,value,bound,pass\n");
        for e in &self.estimates {
            let pass = match e.bound {
                Some(b) => if e.value <= b { "true" } else { "false" },
                None => "",
            };
            let bound = e.bound.map(|b| b.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{},{}\n", e.name, e.value, bound, pass));
        }
        out.push_str(&format!("overall,,,{}\n", self.passed()));
        out
    }
}

impl fmt::Display for EstimateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}]", self.title)?;
        for e in &self.estimates {
            match e.bound {
                Some(b) => writeln!(f, "{} = {:.9e} (bound {:.9e})", e.name, e.value, b)?,
                None => writeln!(f, "{} = {:.9e}", e.name, e.value)?,
            }
        }
        for msg in &self.failures {
            writeln!(f, "FAIL {msg}")?;
        }
        write!(
            f,
            "result = {}",
            if self.passed() { "pass" } else { "fail" }
        )
    }
}
