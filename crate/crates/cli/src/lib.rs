//! Experiment configuration, grid parsing and output plumbing for the `localizer` binary.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use specloc::model::ModelDocument;
use specloc::{FlattenMethod, Projection, Shape, SphereMapChoice, TightBindingModel};

pub mod run;

/// Parses `start:stop:count` (inclusive, evenly spaced), a comma list, or a single value.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    if s.is_empty() {
        bail!("empty grid");
    }
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            bail!("grid '{s}' is not start:stop:count");
        }
        let (a, b): (f64, f64) = (parts[0].parse()?, parts[1].parse()?);
        let n: usize = parts[2].parse().with_context(|| format!("count in '{s}'"))?;
        return Ok(match n {
            0 => bail!("grid '{s}' has no points"),
            1 => vec![a],
            _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
        });
    }
    s.split(',').map(|t| t.trim().parse::<f64>().with_context(|| format!("grid entry '{t}'"))).collect()
}

/// Parses `400x200`.
pub fn parse_resolution(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s.split_once('x').with_context(|| format!("resolution '{s}' is not NxM"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

/// Overrides read from `--config`; every field is optional and command-line flags win.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub model: Option<String>,
    pub m: Option<f64>,
    pub eps: Option<f64>,
    /// Inline hopping document, used when `model = "inline"`.
    pub hoppings: Option<ModelDocument>,
    pub kappa: Option<String>,
    pub rho: Option<String>,
    pub shape: Option<String>,
    pub flatten: Option<String>,
    pub nk: Option<usize>,
    pub seed: Option<u64>,
    pub allow_invalid: Option<bool>,
    pub crosscheck: Option<bool>,
    pub box_radius: Option<f64>,
    pub projection: Option<String>,
    pub sphere_map: Option<String>,
    pub grid: Option<String>,
    pub steps: Option<usize>,
    pub out: Option<String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelSpec {
    /// qwz, qwz-scaled, inline, or a path to a TOML/JSON hopping document.
    pub source: String,
    pub m: f64,
    pub eps: f64,
    /// The hoppings actually used, so the config hash covers file contents.
    pub resolved: ModelDocument,
}

impl ModelSpec {
    pub fn resolve(source: &str, m: f64, eps: f64, inline: Option<&ModelDocument>) -> Result<Self> {
        let model = match source {
            "qwz" => TightBindingModel::qwz(m),
            "qwz-scaled" => TightBindingModel::qwz_scaled(m, eps),
            "inline" => TightBindingModel::from_document(inline.context("model = \"inline\" needs a [hoppings] table")?)?,
            path => {
                let text = fs::read_to_string(path).with_context(|| format!("reading model file {path}"))?;
                if path.ends_with(".json") {
                    TightBindingModel::from_json(&text)?
                } else {
                    TightBindingModel::from_toml(&text)?
                }
            }
        };
        Ok(ModelSpec { source: source.to_string(), m, eps, resolved: model.to_document() })
    }

    pub fn model(&self) -> Result<TightBindingModel> {
        Ok(TightBindingModel::from_document(&self.resolved)?)
    }
}

/// The fully resolved configuration of one run; echoed and hashed into every output.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub command: String,
    pub model: ModelSpec,
    pub kappa: Vec<f64>,
    pub rho: Vec<f64>,
    pub shape: Shape,
    pub flatten: Option<FlattenMethod>,
    pub nk: usize,
    pub seed: u64,
    pub allow_invalid: bool,
    pub crosscheck: bool,
    pub box_radius: Option<f64>,
    pub projection: Projection,
    pub sphere_map: SphereMapChoice,
    pub grid: (usize, usize),
    pub steps: usize,
    /// Destinations are not part of the experiment and stay out of the hash.
    #[serde(skip)]
    pub out: Option<String>,
    #[serde(skip)]
    pub dump_matrix: Option<String>,
    pub force: bool,
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kappa.is_empty() || self.rho.is_empty() {
            bail!("κ and ρ grids must be nonempty");
        }
        if self.kappa.iter().chain(&self.rho).any(|v| !v.is_finite()) {
            bail!("grid values must be finite");
        }
        if self.steps < 2 {
            bail!("need at least 2 homotopy steps");
        }
        if let Some(dir) = self.out.as_deref().map(Path::new).and_then(Path::parent) {
            if !dir.as_os_str().is_empty() && !dir.is_dir() {
                bail!("output directory {} does not exist", dir.display());
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn parse_flatten(s: &str) -> Result<Option<FlattenMethod>> {
    match s {
        "none" => Ok(None),
        "bloch" => Ok(Some(FlattenMethod::Bloch)),
        "dense" => Ok(Some(FlattenMethod::Dense)),
        _ => bail!("unknown flattening '{s}' (none|bloch|dense)"),
    }
}

pub fn parse_projection(s: &str) -> Result<Projection> {
    match s {
        "fermi" => Ok(Projection::Fermi),
        "positive" => Ok(Projection::Positive),
        _ => bail!("unknown projection '{s}' (fermi|positive)"),
    }
}

pub fn parse_shape(s: &str) -> Result<Shape> {
    Ok(Shape::from_str(s)?)
}

pub fn parse_sphere_map(s: &str) -> Result<SphereMapChoice> {
    Ok(SphereMapChoice::from_str(s)?)
}

/// Destination for a run's output: a file from `--out`, or stdout.
pub struct Sink {
    out: Box<dyn Write>,
}

impl Sink {
    pub fn open(cfg: &ExperimentConfig) -> Result<Self> {
        let out: Box<dyn Write> = match &cfg.out {
            Some(p) => Box::new(std::io::BufWriter::new(fs::File::create(p).with_context(|| format!("creating {p}"))?)),
            None => Box::new(std::io::stdout().lock()),
        };
        Ok(Sink { out })
    }

    /// CSV with a commented header carrying the config and its hash.
    pub fn csv<R>(mut self, cfg: &ExperimentConfig, columns: &[&str], rows: &[R], row: impl Fn(&R) -> Vec<String>) -> Result<()> {
        writeln!(self.out, "# config_hash: {}", cfg.hash())?;
        writeln!(self.out, "# config: {}", serde_json::to_string(cfg)?)?;
        writeln!(self.out, "{}", columns.join(","))?;
        for r in rows {
            writeln!(self.out, "{}", row(r).join(","))?;
        }
        self.out.flush()?;
        Ok(())
    }

    pub fn json<R: Serialize>(mut self, cfg: &ExperimentConfig, result: &R) -> Result<()> {
        let doc = serde_json::json!({ "config_hash": cfg.hash(), "config": cfg, "result": result });
        serde_json::to_writer_pretty(&mut self.out, &doc)?;
        writeln!(self.out)?;
        self.out.flush()?;
        Ok(())
    }
}

/// Formats an optional integer as an empty CSV cell when absent.
pub fn opt_cell<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}
