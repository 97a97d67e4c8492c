//! Seeded synthetic lognormal citation series.
//!
//! A synthetic series stands in for the output of one research unit in one
//! field: every value is the citation count of one simulated paper, drawn
//! from `exp(mu + sigma * z)` with `z` standard normal. Ensembles are grids
//! of series over a linear range of `mu` and a fixed list of sizes.
//!
//! Every series draws from its own ChaCha stream keyed by `(seed, stream_id)`,
//! so a series is reproducible on its own and sampling order does not matter.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Log-scale spread used for every series of the reference grid.
pub const DEFAULT_SIGMA: f64 = 1.1;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("sigma must be positive and finite, got {0}")]
    InvalidSigma(f64),
    #[error("mu must be finite, got {0}")]
    InvalidMu(f64),
    #[error("series size must be at least 1")]
    EmptySeries,
    #[error("series label must not be empty")]
    EmptyLabel,
    #[error("mu_count must be at least 1")]
    NoMuValues,
    #[error("sizes list must not be empty")]
    NoSizes,
    #[error("a single mu value needs mu_start == mu_end (got {start} and {end})")]
    UndefinedSpacing { start: f64, end: f64 },
    #[error("cannot combine an empty list of series")]
    NothingToCombine,
    #[error("cannot combine synthetic and real series")]
    MixedOrigin,
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("missing config key `{0}`")]
    MissingKey(&'static str),
    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for SynthError {
    fn from(e: std::io::Error) -> Self {
        SynthError::Io(e.to_string())
    }
}

/// Parameters of one simulated unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LognormalSpec {
    pub label: String,
    pub mu: f64,
    pub sigma: f64,
    pub n: usize,
}

impl LognormalSpec {
    pub fn new(label: impl Into<String>, mu: f64, sigma: f64, n: usize) -> Result<Self, SynthError> {
        let spec = LognormalSpec {
            label: label.into(),
            mu,
            sigma,
            n,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if self.label.is_empty() {
            return Err(SynthError::EmptyLabel);
        }
        if !self.mu.is_finite() {
            return Err(SynthError::InvalidMu(self.mu));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(SynthError::InvalidSigma(self.sigma));
        }
        if self.n == 0 {
            return Err(SynthError::EmptySeries);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Synthetic,
    Real,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Synthetic => f.write_str("synthetic"),
            Origin::Real => f.write_str("real"),
        }
    }
}

/// A labeled list of citation values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CitationSeries {
    pub label: String,
    pub values: Vec<f64>,
    pub origin: Origin,
}

impl CitationSeries {
    pub fn synthetic(label: impl Into<String>, values: Vec<f64>) -> Self {
        CitationSeries {
            label: label.into(),
            values,
            origin: Origin::Synthetic,
        }
    }

    /// Real series carry integer citation counts.
    pub fn real(label: impl Into<String>, counts: impl IntoIterator<Item = u64>) -> Self {
        CitationSeries {
            label: label.into(),
            values: counts.into_iter().map(|c| c as f64).collect(),
            origin: Origin::Real,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A linear grid of `mu` values crossed with a list of series sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub mu_start: f64,
    pub mu_end: f64,
    pub mu_count: usize,
    pub sizes: Vec<usize>,
    pub sigma: f64,
    pub seed: u64,
}

impl EnsembleConfig {
    /// 200 values of mu from 4.0 down to 2.0, sizes 800/400/200, sigma 1.1:
    /// 600 series and 280,000 papers.
    pub fn paper_grid(seed: u64) -> Self {
        EnsembleConfig {
            mu_start: 4.0,
            mu_end: 2.0,
            mu_count: 200,
            sizes: vec![800, 400, 200],
            sigma: DEFAULT_SIGMA,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if self.mu_count == 0 {
            return Err(SynthError::NoMuValues);
        }
        if self.sizes.is_empty() {
            return Err(SynthError::NoSizes);
        }
        if self.sizes.contains(&0) {
            return Err(SynthError::EmptySeries);
        }
        for mu in [self.mu_start, self.mu_end] {
            if !mu.is_finite() {
                return Err(SynthError::InvalidMu(mu));
            }
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(SynthError::InvalidSigma(self.sigma));
        }
        if self.mu_count == 1 && self.mu_start != self.mu_end {
            return Err(SynthError::UndefinedSpacing {
                start: self.mu_start,
                end: self.mu_end,
            });
        }
        Ok(())
    }

    pub fn series_count(&self) -> usize {
        self.mu_count * self.sizes.len()
    }

    pub fn total_papers(&self) -> usize {
        self.mu_count * self.sizes.iter().sum::<usize>()
    }

    /// The `i`-th mu value, `i` in `0..mu_count`, endpoints included.
    pub fn mu_at(&self, i: usize) -> f64 {
        if self.mu_count == 1 {
            return self.mu_start;
        }
        let t = i as f64 / (self.mu_count - 1) as f64;
        self.mu_start + t * (self.mu_end - self.mu_start)
    }

    /// Parses the plain `key = value` format. Blank lines and `#` comments
    /// are skipped; `sizes` is a comma-separated list (brackets optional);
    /// `sigma` defaults to 1.1 and `seed` to 0.
    pub fn parse(text: &str) -> Result<Self, SynthError> {
        let mut mu_start = None;
        let mut mu_end = None;
        let mut mu_count = None;
        let mut sizes = None;
        let mut sigma = DEFAULT_SIGMA;
        let mut seed = 0u64;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .or_else(|| line.split_once(':'))
                .ok_or_else(|| SynthError::Config {
                    line: line_no,
                    message: format!("expected `key = value`, got `{line}`"),
                })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| SynthError::Config {
                line: line_no,
                message: format!("invalid {what} `{value}`"),
            };
            match key {
                "mu_start" => mu_start = Some(parse_num::<f64>(value).ok_or_else(|| bad("mu_start"))?),
                "mu_end" => mu_end = Some(parse_num::<f64>(value).ok_or_else(|| bad("mu_end"))?),
                "mu_count" => mu_count = Some(parse_num::<usize>(value).ok_or_else(|| bad("mu_count"))?),
                "sigma" => sigma = parse_num::<f64>(value).ok_or_else(|| bad("sigma"))?,
                "seed" => seed = parse_num::<u64>(value).ok_or_else(|| bad("seed"))?,
                "sizes" => {
                    let inner = value.trim_start_matches('[').trim_end_matches(']');
                    let parsed: Option<Vec<usize>> = inner
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(parse_num::<usize>)
                        .collect();
                    sizes = Some(parsed.ok_or_else(|| bad("sizes"))?);
                }
                other => {
                    return Err(SynthError::Config {
                        line: line_no,
                        message: format!("unknown key `{other}`"),
                    })
                }
            }
        }

        let config = EnsembleConfig {
            mu_start: mu_start.ok_or(SynthError::MissingKey("mu_start"))?,
            mu_end: mu_end.ok_or(SynthError::MissingKey("mu_end"))?,
            mu_count: mu_count.ok_or(SynthError::MissingKey("mu_count"))?,
            sizes: sizes.ok_or(SynthError::MissingKey("sizes"))?,
            sigma,
            seed,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, SynthError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Canonical text form; `parse(to_config_string())` returns `self`.
    pub fn to_config_string(&self) -> String {
        let sizes: Vec<String> = self.sizes.iter().map(|s| s.to_string()).collect();
        format!(
            "mu_start = {}\nmu_end = {}\nmu_count = {}\nsizes = {}\nsigma = {}\nseed = {}\n",
            self.mu_start,
            self.mu_end,
            self.mu_count,
            sizes.join(","),
            self.sigma,
            self.seed
        )
    }
}

fn parse_num<T: FromStr>(s: &str) -> Option<T> {
    s.trim().replace('_', "").parse().ok()
}

/// Two-letter base-26 label for grid position `index`: aa, ab, ..., az, ba, ...
/// Indices past `zz` (675) widen to three letters so labels stay unique.
pub fn grid_label(index: usize) -> String {
    let mut width = 2;
    let mut capacity = 26usize * 26;
    while index >= capacity {
        width += 1;
        capacity *= 26;
    }
    let mut chars = vec![b'a'; width];
    let mut rest = index;
    for slot in chars.iter_mut().rev() {
        *slot = b'a' + (rest % 26) as u8;
        rest /= 26;
    }
    String::from_utf8(chars).expect("ascii")
}

/// Position of one spec within the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCell {
    pub mu_index: usize,
    pub size_index: usize,
}

/// Expands a config into one spec per (mu, size) pair, mu-major order.
pub fn build_grid(config: &EnsembleConfig) -> Result<Vec<LognormalSpec>, SynthError> {
    Ok(build_grid_cells(config)?.into_iter().map(|(spec, _)| spec).collect())
}

pub(crate) fn build_grid_cells(config: &EnsembleConfig) -> Result<Vec<(LognormalSpec, GridCell)>, SynthError> {
    config.validate()?;
    let mut out = Vec::with_capacity(config.series_count());
    for mu_index in 0..config.mu_count {
        let mu = config.mu_at(mu_index);
        for (size_index, &n) in config.sizes.iter().enumerate() {
            let label = grid_label(out.len());
            out.push((
                LognormalSpec::new(label, mu, config.sigma, n)?,
                GridCell { mu_index, size_index },
            ));
        }
    }
    Ok(out)
}

fn stream_rng(seed: u64, stream_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// Draws `spec.n` lognormal values from the stream `(seed, stream_id)`.
pub fn sample_series(spec: &LognormalSpec, seed: u64, stream_id: u64) -> CitationSeries {
    let mut rng = stream_rng(seed, stream_id);
    let values = (0..spec.n)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            (spec.mu + spec.sigma * z).exp()
        })
        .collect();
    CitationSeries::synthetic(spec.label.clone(), values)
}

/// Concatenates several series under a new label.
pub fn combine_series(parts: &[CitationSeries], new_label: impl Into<String>) -> Result<CitationSeries, SynthError> {
    let first = parts.first().ok_or(SynthError::NothingToCombine)?;
    if parts.iter().any(|p| p.origin != first.origin) {
        return Err(SynthError::MixedOrigin);
    }
    let values = parts.iter().flat_map(|p| p.values.iter().copied()).collect();
    Ok(CitationSeries {
        label: new_label.into(),
        values,
        origin: first.origin,
    })
}

/// A sampled grid: specs, their grid positions and their series, index-aligned.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub config: EnsembleConfig,
    pub specs: Vec<LognormalSpec>,
    pub cells: Vec<GridCell>,
    pub series: Vec<CitationSeries>,
}

impl Ensemble {
    /// Samples every grid cell; stream id is the cell's grid index.
    pub fn generate(config: &EnsembleConfig) -> Result<Self, SynthError> {
        let (specs, cells): (Vec<_>, Vec<_>) = build_grid_cells(config)?.into_iter().unzip();
        let series = specs
            .par_iter()
            .enumerate()
            .map(|(i, spec)| sample_series(spec, config.seed, i as u64))
            .collect();
        Ok(Ensemble {
            config: config.clone(),
            specs,
            cells,
            series,
        })
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.specs.iter().position(|s| s.label == label)
    }

    pub fn spec(&self, label: &str) -> Option<&LognormalSpec> {
        self.index_of(label).map(|i| &self.specs[i])
    }

    pub fn cell_index(&self, cell: GridCell) -> Option<usize> {
        self.cells.iter().position(|c| *c == cell)
    }

    pub fn total_papers(&self) -> usize {
        self.series.iter().map(CitationSeries::len).sum()
    }

    /// Writes `label,mu,sigma,n` rows.
    pub fn write_specs_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["label", "mu", "sigma", "n"])?;
        for s in &self.specs {
            w.write_record([s.label.clone(), s.mu.to_string(), s.sigma.to_string(), s.n.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `label,value` rows, series in grid order.
    pub fn write_values_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["label", "value"])?;
        for s in &self.series {
            for v in &s.values {
                w.write_record([s.label.as_str(), &v.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Checks that labels are non-empty and pairwise distinct.
pub fn check_unique_labels<'a>(labels: impl IntoIterator<Item = &'a str>) -> Result<(), String> {
    let mut seen = HashSet::new();
    for label in labels {
        if label.is_empty() {
            return Err("empty label".into());
        }
        if !seen.insert(label) {
            return Err(label.to_string());
        }
    }
    Ok(())
}
