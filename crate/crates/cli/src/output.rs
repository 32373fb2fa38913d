//! Artifact directory and run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use dpsqueeze::domain::{BOUNDARY_RESIDUAL, POSITIVITY_SAMPLES};
use dpsqueeze::domconv::CLOSURE_TOL;
use dpsqueeze::scalemethod::{PSH_SAMPLES, PSH_TOL, TAU_NORMAL_BAND};
use dpsqueeze::seqclass::Thresholds;
use dpsqueeze::squeeze::{SqueezeOptions, BASEPOINT_TOL};
use dpsqueeze::table::Table;
use dpsqueeze::wpoly::POSITIVITY_FLOOR;
use serde::Serialize;

use crate::config::Settings;

pub struct Artifacts {
    dir: PathBuf,
    written: Vec<String>,
    seeds: BTreeMap<String, u64>,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    settings: &'a Settings,
    seeds: &'a BTreeMap<String, u64>,
    tolerances: BTreeMap<&'static str, f64>,
    artifacts: &'a [String],
    warnings: &'a [String],
}

impl Artifacts {
    pub fn create(dir: PathBuf) -> Result<Self> {
        fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
        Ok(Self { dir, written: Vec::new(), seeds: BTreeMap::new(), warnings: Vec::new() })
    }

    /// Records a seed under `name` and returns it.
    pub fn seed(&mut self, name: &str, value: u64) -> u64 {
        self.seeds.insert(name.to_string(), value);
        value
    }

    pub fn warn(&mut self, message: String) {
        self.warnings.push(message);
    }

    pub fn table(&mut self, name: &str, table: &Table) -> Result<()> {
        let text = table.to_csv_string()?;
        self.text(name, &text)
    }

    pub fn text(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn finish(mut self, command: &str, settings: &Settings) -> Result<PathBuf> {
        self.written.sort();
        let manifest = Manifest {
            command,
            version: env!("CARGO_PKG_VERSION"),
            settings,
            seeds: &self.seeds,
            tolerances: tolerances(),
            artifacts: &self.written,
            warnings: &self.warnings,
        };
        let path = self.dir.join("manifest.json");
        fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
            .with_context(|| format!("cannot write {}", path.display()))?;
        Ok(path)
    }
}

fn tolerances() -> BTreeMap<&'static str, f64> {
    let th = Thresholds::default();
    let opts = SqueezeOptions::default();
    BTreeMap::from([
        ("basepoint", BASEPOINT_TOL),
        ("boundary_residual", BOUNDARY_RESIDUAL),
        ("classify_margin", th.margin),
        ("classify_tail_fraction", th.tail_fraction),
        ("classify_tangential", th.tangential),
        ("closure", CLOSURE_TOL),
        ("positivity_floor", POSITIVITY_FLOOR),
        ("positivity_samples", POSITIVITY_SAMPLES as f64),
        ("psh", PSH_TOL),
        ("psh_samples", PSH_SAMPLES as f64),
        ("squeeze_calibration", opts.calibration as f64),
        ("squeeze_screening", opts.screening as f64),
        ("tau_normal_band", TAU_NORMAL_BAND),
    ])
}
