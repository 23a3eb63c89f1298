//! File formats, scenario configuration and the `em-manifold` command line
//! on top of `em-manifold-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod moment_file;
pub mod validate;

use std::fs;
use std::path::Path;

use em_manifold_core::ManifoldVariant;

pub use crate::config::{load_scenario, Scenario};
pub use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Variant {
    Near,
    Ff,
    Isolated,
    Isotropic,
}

impl From<Variant> for ManifoldVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Near => ManifoldVariant::Near,
            Variant::Ff => ManifoldVariant::Far,
            Variant::Isolated => ManifoldVariant::Isolated,
            Variant::Isotropic => ManifoldVariant::IsotropicLifted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Field,
    Beamform,
    Pattern,
    Pd,
    Validate,
}

/// Runs one command and writes its output to `out` (stdout when `None`).
/// A failed validation still writes the report before returning
/// [`CliError::Validation`].
pub fn run(command: Command, config: &Path, variant: Variant, out: Option<&Path>) -> Result<(), CliError> {
    let s = load_scenario(config)?;
    let v = variant.into();
    let (text, failure) = match command {
        Command::Field => (commands::cmd_field(&s, v)?, None),
        Command::Beamform => (commands::cmd_beamform(&s, v)?, None),
        Command::Pattern => (commands::cmd_pattern(&s, v)?, None),
        Command::Pd => (commands::cmd_pd(&s, v)?, None),
        Command::Validate => {
            let report = validate::run_validation(&s)?;
            let failed: Vec<&str> = report
                .suites
                .iter()
                .filter(|r| r.status == validate::Status::Fail)
                .map(|r| r.name)
                .collect();
            (report.to_json(), (!failed.is_empty()).then(|| failed.join(", ")))
        }
    };
    match out {
        Some(path) => fs::write(path, &text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))?;
        }
    }
    match failure {
        Some(names) => Err(CliError::Validation(names)),
        None => Ok(()),
    }
}
