//! Scenario-driven front end for the `reflexcr-core` modules.
//!
//! A scenario is a JSON object whose `kind` selects the experiment. [`run`]
//! evaluates it and [`output::write_outputs`] emits `grid.csv`,
//! `summary.json`, `stages.csv`, `convergence.csv` (node sweeps only) and
//! `timings.json`. Exit codes: 0 on pass, 1 on fail, 2 on configuration error.

pub mod expr;
pub mod output;
pub mod run;
pub mod scenario;

use std::path::Path;

pub use run::{run, Check, RunReport};
pub use scenario::{parse_scenario, ConfigError, Scenario};

/// Command-line overrides applied after parsing.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub nodes: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, s: &mut Scenario) -> Result<(), ConfigError> {
        if let Some(n) = self.nodes {
            let kind = s.kind();
            *s.nodes_mut()
                .ok_or_else(|| ConfigError::new("--nodes", format!("kind `{kind}` has no quadrature nodes")))? = n;
        }
        if let Some(seed) = self.seed {
            *s.seed_mut() = seed;
        }
        if let Some(t) = self.tol {
            let kind = s.kind();
            *s.tol_mut()
                .ok_or_else(|| ConfigError::new("--tol", format!("kind `{kind}` has fixed tolerances")))? = t;
        }
        s.validate()
    }
}

/// Parses, overrides, runs and writes outputs. `expected_kind` rejects
/// scenarios of another kind.
pub fn run_file(path: &Path, out: &Path, expected_kind: Option<&str>, ov: Overrides) -> Result<RunReport, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new("--scenario", format!("{}: {e}", path.display())))?;
    let mut s = parse_scenario(&text)?;
    if let Some(k) = expected_kind {
        if s.kind() != k {
            return Err(ConfigError::new("kind", format!("scenario is `{}` but subcommand is `{k}`", s.kind())));
        }
    }
    ov.apply(&mut s)?;
    let mut report = run(&s)?;
    output::write_outputs(&mut report, out).map_err(|e| ConfigError::new("--out", format!("{}: {e}", out.display())))?;
    Ok(report)
}
