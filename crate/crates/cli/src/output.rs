use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use crate::args::Format;
use rumin_core::SCHEMA_VERSION;

/// Echo of the resolved parameters of a run; output paths are left out so
/// that artifacts do not depend on where they are written.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub n: Vec<usize>,
    pub degree: Option<usize>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_nodes: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub form: Option<String>,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    config: &'a RunConfig,
    result: &'a T,
}

/// One emitted result in every format it supports.
#[derive(Debug)]
pub struct Artifact {
    pub stem: String,
    pub json: String,
    pub csv: Option<String>,
    pub latex: Option<String>,
    /// Names and details of failed checks; nonempty means exit code 1.
    pub failures: Vec<String>,
    /// Lines for stderr.
    pub warnings: Vec<String>,
}

impl Artifact {
    pub fn new<T: Serialize>(stem: String, config: &RunConfig, result: &T) -> Result<Self> {
        let env = Envelope {
            schema_version: SCHEMA_VERSION,
            command: &config.command,
            config,
            result,
        };
        let mut json = serde_json::to_string_pretty(&env)?;
        json.push('\n');
        Ok(Self {
            stem,
            json,
            csv: None,
            latex: None,
            failures: Vec::new(),
            warnings: Vec::new(),
        })
    }

    pub fn text(&self, format: Format) -> Result<&str> {
        let text = match format {
            Format::Json => Some(&self.json),
            Format::Csv => self.csv.as_ref(),
            Format::Latex => self.latex.as_ref(),
        };
        match text {
            Some(t) => Ok(t),
            None => bail!("format {format:?} is not available for this command; use json"),
        }
    }

    /// Writes `<out_dir>/<stem>.<ext>` when a directory is given and returns the text.
    pub fn emit(&self, format: Format, out_dir: Option<&Path>) -> Result<&str> {
        let text = self.text(format)?;
        if let Some(dir) = out_dir {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join(format!("{}.{}", self.stem, format.extension()));
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(text)
    }
}
