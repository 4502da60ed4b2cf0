//! The experiment interface, its registry and the CSV writer.

use std::io::Write;

use pathological::registry::Registry;
use pathological::Error;

use crate::config::{ConfigError, RunConfig};

/// Why a run stopped before producing a verdict.
#[derive(Clone, Debug, PartialEq)]
pub enum Failure {
    /// Bad configuration or a violated hypothesis.
    Invalid(String),
    /// The numerics broke down.
    Numerical(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Invalid(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Integration { .. } => Failure::Numerical(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

/// A named verified inequality.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), ok, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    /// `(name, unit)` for every column.
    pub columns: Vec<(String, String)>,
    pub rows: Vec<Vec<String>>,
    pub checks: Vec<Check>,
    /// Measured quantities reported on stderr.
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn with_columns(cols: &[(&str, &str)]) -> Self {
        Outcome { columns: cols.iter().map(|(n, u)| (n.to_string(), u.to_string())).collect(), ..Default::default() }
    }

    pub fn check(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, ok, detail));
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.ok)
    }
}

pub trait Experiment: Send + Sync {
    fn name(&self) -> &'static str;
    /// Config section holding this experiment's keys.
    fn section(&self) -> &'static str {
        self.name()
    }
    fn default_csv(&self) -> &'static str;
    fn run(&self, cfg: &RunConfig) -> Result<Outcome, Failure>;
}

pub fn experiment_registry() -> Registry<dyn Experiment> {
    use crate::commands::*;
    Registry::<dyn Experiment>::new("command")
        .with("bump", "multi-bump lemma checks and the candidate builder", || Box::new(bump::BumpCmd))
        .with("wave", "basic ingredient, energy sandwich and derivative-loss modes", || Box::new(wave::WaveCmd))
        .with("transport", "schedule checks, scaling laws and the blow-up budget", || Box::new(transport::TransportCmd))
        .with("exercise", "the sawtooth perturbation table", || Box::new(exercise::ExerciseCmd))
}

/// Shortest round-trip representation, in exponent form for reals.
pub fn num(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{x:.1}")
    } else {
        format!("{x:e}")
    }
}

/// Writes the `#` header block followed by the CSV table.
pub fn write_table(
    mut out: impl Write,
    header: &[String],
    columns: &[(String, String)],
    rows: &[Vec<String>],
) -> std::io::Result<()> {
    for line in header {
        writeln!(out, "# {line}")?;
    }
    for (name, unit) in columns {
        writeln!(out, "# column {name}: {unit}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns.iter().map(|(n, _)| n.as_str()))?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()
}
