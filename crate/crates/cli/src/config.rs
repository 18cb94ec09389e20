//! Run configuration: a TOML file merged with command-line overrides.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use distwarm::ingest::{FileFormat, PanelSpec};
use distwarm::regression::Deterministic;
use distwarm::sim::DEFAULT_TOLERANCE;
use distwarm::warming::{AccelerationDesign, Period, PipelineConfig, QuantileFamily};
use serde::Deserialize;

pub const DEFAULT_OUT: &str = "distwarm-out";
pub const DEFAULT_SEED: u64 = 20_190_101;
pub const DEFAULT_REPS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    #[default]
    Primary,
    Reference,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetEntry {
    name: String,
    path: PathBuf,
    #[serde(default)]
    role: Role,
    #[serde(default)]
    format: FileFormat,
    panel: Option<PanelSpec>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    datasets: Vec<DatasetEntry>,
    panel: Option<PanelSpec>,
    #[serde(default)]
    periods: Vec<String>,
    split_year: Option<i32>,
    taus: Option<Vec<f64>>,
    level: Option<f64>,
    bandwidth: Option<usize>,
    family: Option<QuantileFamily>,
    acceleration_design: Option<AccelerationDesign>,
    adf_deterministic: Option<Deterministic>,
    adf_max_lags: Option<usize>,
    seed: Option<u64>,
    reps: Option<usize>,
    /// Allowed distance of a fitted rate exponent from its target.
    tolerance: Option<f64>,
    out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub path: PathBuf,
    pub role: Role,
    pub format: FileFormat,
    pub panel: Option<PanelSpec>,
}

/// Flags that override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub periods: Vec<Period>,
    pub split_year: Option<i32>,
    pub level: Option<f64>,
    pub bandwidth: Option<usize>,
    pub seed: Option<u64>,
    pub reps: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub datasets: Vec<Dataset>,
    pub pipeline: PipelineConfig,
    pub seed: u64,
    pub reps: usize,
    pub tolerance: f64,
    pub out: PathBuf,
}

impl RunConfig {
    /// Reads `path` (if any) and applies `overrides`. Dataset paths and `out`
    /// in the file are relative to the file's directory.
    pub fn load(path: Option<&Path>, overrides: Overrides) -> anyhow::Result<Self> {
        let (file, base) = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("cannot read config {}", p.display()))?;
                let file: FileConfig = toml::from_str(&text)
                    .with_context(|| format!("invalid config {}", p.display()))?;
                let base = p.parent().map(Path::to_path_buf).unwrap_or_default();
                (file, base)
            }
            None => (FileConfig::default(), PathBuf::new()),
        };
        Self::resolve(file, &base, overrides)
    }

    fn resolve(file: FileConfig, base: &Path, ov: Overrides) -> anyhow::Result<Self> {
        let mut names = BTreeSet::new();
        let mut datasets = Vec::new();
        for d in file.datasets {
            if d.name.is_empty() || d.name.contains(['/', '\\']) || d.name.starts_with('.') {
                bail!(
                    "dataset name `{}` is not usable as a directory name",
                    d.name
                );
            }
            if !names.insert(d.name.clone()) {
                bail!("dataset `{}` is declared twice", d.name);
            }
            let path = base.join(&d.path);
            if !path.is_file() {
                bail!(
                    "dataset `{}`: file {} does not exist",
                    d.name,
                    path.display()
                );
            }
            let panel = d.panel.or_else(|| file.panel.clone());
            if let Some(p) = &panel {
                p.validate()
                    .with_context(|| format!("dataset `{}`", d.name))?;
            }
            datasets.push(Dataset {
                name: d.name,
                path,
                role: d.role,
                format: d.format,
                panel,
            });
        }
        if datasets
            .iter()
            .filter(|d| d.role == Role::Reference)
            .count()
            > 1
        {
            bail!("at most one dataset can have role = \"reference\"");
        }

        let periods = if ov.periods.is_empty() {
            file.periods
                .iter()
                .map(|s| s.parse::<Period>().map_err(|e| anyhow!(e)))
                .collect::<anyhow::Result<Vec<_>>>()?
        } else {
            ov.periods
        };
        for d in &datasets {
            if let Some(panel) = &d.panel {
                for p in &periods {
                    if p.start < panel.start_year || p.end > panel.end_year {
                        bail!(
                            "period {p} outside the panel years {}-{} of dataset `{}`",
                            panel.start_year,
                            panel.end_year,
                            d.name
                        );
                    }
                }
            }
        }

        let defaults = PipelineConfig::default();
        let pipeline = PipelineConfig {
            periods,
            split_year: ov.split_year.or(file.split_year),
            taus: file.taus.unwrap_or(defaults.taus),
            level: ov.level.or(file.level).unwrap_or(defaults.level),
            bandwidth: ov.bandwidth.or(file.bandwidth),
            adf_max_lags: file.adf_max_lags,
            adf_deterministic: file.adf_deterministic.unwrap_or(defaults.adf_deterministic),
            acceleration_design: file
                .acceleration_design
                .unwrap_or(defaults.acceleration_design),
            family: file.family.unwrap_or(defaults.family),
        };
        if !(pipeline.level > 0.0 && pipeline.level < 1.0) {
            bail!("level {} outside (0, 1)", pipeline.level);
        }
        if pipeline.taus.len() < 2
            || pipeline.taus.iter().any(|t| !(*t > 0.0 && *t < 1.0))
            || pipeline.taus.windows(2).any(|w| w[0] >= w[1])
        {
            bail!("taus must be at least two increasing levels inside (0, 1)");
        }

        let tolerance = file.tolerance.unwrap_or(DEFAULT_TOLERANCE);
        if tolerance.is_nan() || tolerance <= 0.0 {
            bail!("tolerance must be positive, got {tolerance}");
        }

        let out = match (ov.out, file.out) {
            (Some(o), _) => o,
            (None, Some(o)) => base.join(o),
            (None, None) => PathBuf::from(DEFAULT_OUT),
        };
        Ok(Self {
            datasets,
            pipeline,
            seed: ov.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            reps: ov.reps.or(file.reps).unwrap_or(DEFAULT_REPS),
            tolerance,
            out,
        })
    }

    pub fn dataset(&self, name: &str) -> anyhow::Result<&Dataset> {
        self.datasets
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| anyhow!("no dataset named `{name}` in the config"))
    }

    pub fn primaries(&self) -> impl Iterator<Item = &Dataset> {
        self.datasets.iter().filter(|d| d.role == Role::Primary)
    }

    pub fn reference(&self) -> Option<&Dataset> {
        self.datasets.iter().find(|d| d.role == Role::Reference)
    }
}
