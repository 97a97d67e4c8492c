//! Rk-index, top-percentile indicators and uncited counts.
//!
//! The Rk-index of a unit is `scale * geomean_i 1 / (offset + rank1_i)` over
//! its `k` most cited papers, with defaults `k = 10`, `offset = 20`,
//! `scale = 1000`. Its maximum, reached when the unit holds world ranks
//! 1..10, is about 39.47.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rankcore::{geometric_mean, RankError, TiePolicy, TopKRanks, WorldIndex};
use crate::stats::normal_sf;
use crate::synthdist::{CitationSeries, LognormalSpec, Origin};

pub const DEFAULT_K: usize = 10;
pub const DEFAULT_OFFSET: f64 = 20.0;
pub const DEFAULT_SCALE: f64 = 1000.0;
/// Percentiles reported when none are requested.
pub const DEFAULT_PERCENTILES: [f64; 5] = [10.0, 1.0, 0.5, 0.1, 0.01];

#[derive(Debug, Error, PartialEq)]
pub enum IndicatorError {
    #[error(transparent)]
    Rank(#[from] RankError),
    #[error("percentile must be in (0, 100], got {0}")]
    InvalidPercentile(f64),
    #[error("top {x}% of a world of {world} papers is empty (cutoff rank 0)")]
    EmptyCutoff { x: f64, world: usize },
    #[error("citation value must be positive, got {0}")]
    NonPositiveCitation(f64),
    #[error("sigma must be positive, got {0}")]
    InvalidSigma(f64),
    #[error("uncited papers are undefined for synthetic series")]
    SyntheticUncited,
    #[error("local share must be in (0, 1], got {0}")]
    InvalidShare(f64),
    #[error("offset must be non-negative and scale positive (offset {offset}, scale {scale})")]
    InvalidParams { offset: f64, scale: f64 },
    #[error("no parts given for a mixture")]
    EmptyMixture,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RkParams {
    pub k: usize,
    pub offset: f64,
    pub scale: f64,
}

impl Default for RkParams {
    fn default() -> Self {
        RkParams {
            k: DEFAULT_K,
            offset: DEFAULT_OFFSET,
            scale: DEFAULT_SCALE,
        }
    }
}

impl RkParams {
    pub fn validate(&self) -> Result<(), IndicatorError> {
        if self.k == 0 {
            return Err(RankError::ZeroK.into());
        }
        if !(self.offset >= 0.0 && self.offset.is_finite() && self.scale > 0.0 && self.scale.is_finite()) {
            return Err(IndicatorError::InvalidParams {
                offset: self.offset,
                scale: self.scale,
            });
        }
        Ok(())
    }

    /// Largest attainable Rk: the unit owns world ranks `1..=k`.
    pub fn upper_bound(&self) -> f64 {
        let denom: Vec<f64> = (1..=self.k).map(|i| self.offset + i as f64).collect();
        self.scale / geometric_mean(&denom).expect("positive")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RkResult {
    pub label: String,
    pub rk: f64,
    pub k: usize,
    pub offset: f64,
    pub scale: f64,
    pub rank1s: Vec<usize>,
}

/// Rk-index from the global ranks of a unit's top-k papers.
pub fn rk_index(top: &TopKRanks, params: RkParams) -> Result<RkResult, IndicatorError> {
    params.validate()?;
    if top.pairs.len() < params.k {
        return Err(RankError::InsufficientPapers {
            needed: params.k,
            available: top.pairs.len(),
        }
        .into());
    }
    let rank1s: Vec<usize> = top.pairs.iter().take(params.k).map(|p| p.rank1).collect();
    Ok(RkResult {
        label: top.label.clone(),
        rk: rk_from_ranks(&rank1s, params.offset, params.scale),
        k: params.k,
        offset: params.offset,
        scale: params.scale,
        rank1s,
    })
}

/// `scale * geomean(1 / (offset + r))` for raw rank1 values.
pub fn rk_from_ranks(rank1s: &[usize], offset: f64, scale: f64) -> f64 {
    let log_mean = rank1s.iter().map(|&r| (offset + r as f64).ln()).sum::<f64>() / rank1s.len() as f64;
    scale * (-log_mean).exp()
}

/// Fractional credit for collaborative units: `rk * local_share`.
///
/// Experimental: there is no settled rule for what `local_share` should be
/// (local over total addresses, authors, ...); callers choose.
pub fn fractional_rk(rk: &RkResult, local_share: f64) -> Result<f64, IndicatorError> {
    if !(local_share > 0.0 && local_share <= 1.0) {
        return Err(IndicatorError::InvalidShare(local_share));
    }
    Ok(rk.rk * local_share)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PercentileMode {
    Empirical,
    Analytic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercentileResult {
    pub label: String,
    /// Percentile in percent, e.g. 0.1 for the top 0.1%.
    pub x: f64,
    pub mode: PercentileMode,
    pub value: f64,
    /// World citation value at the cutoff rank; `None` when the cutoff is 0.
    pub threshold: Option<f64>,
    pub cutoff_rank: usize,
}

/// `floor(x / 100 * W)`. A tiny epsilon absorbs binary rounding so that,
/// e.g., 0.1% of 280,000 is exactly 280.
pub fn percentile_cutoff(world_size: usize, x: f64) -> Result<usize, IndicatorError> {
    if !(x > 0.0 && x <= 100.0) {
        return Err(IndicatorError::InvalidPercentile(x));
    }
    let raw = x * world_size as f64 / 100.0;
    Ok((raw + 1e-9 * raw.max(1.0)).floor() as usize)
}

/// Number of the label's papers whose rank1 is within the world top x%.
pub fn empirical_ptop(world: &WorldIndex, label: &str, x: f64) -> Result<PercentileResult, IndicatorError> {
    let positions = world.positions_of(label)?;
    empirical_ptop_positions(world, label, positions, x)
}

/// Same as [`empirical_ptop`] for an arbitrary unit of world positions.
pub fn empirical_ptop_positions(
    world: &WorldIndex,
    label: &str,
    positions: &[usize],
    x: f64,
) -> Result<PercentileResult, IndicatorError> {
    let cutoff = percentile_cutoff(world.size(), x)?;
    let count = positions.iter().filter(|&&p| world.rank1_at(p) <= cutoff).count();
    Ok(PercentileResult {
        label: label.to_string(),
        x,
        mode: PercentileMode::Empirical,
        value: count as f64,
        threshold: world.value_at_rank(cutoff),
        cutoff_rank: cutoff,
    })
}

/// `P(C > c)` for a lognormal citation count, `1 - Phi((ln c - mu) / sigma)`.
pub fn lognormal_survival(mu: f64, sigma: f64, c: f64) -> Result<f64, IndicatorError> {
    if c.is_nan() || c <= 0.0 {
        return Err(IndicatorError::NonPositiveCitation(c));
    }
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(IndicatorError::InvalidSigma(sigma));
    }
    Ok(normal_sf((c.ln() - mu) / sigma))
}

fn analytic_threshold(world: &WorldIndex, x: f64) -> Result<(usize, f64), IndicatorError> {
    let cutoff = percentile_cutoff(world.size(), x)?;
    let threshold = world
        .value_at_rank(cutoff)
        .ok_or(IndicatorError::EmptyCutoff { x, world: world.size() })?;
    Ok((cutoff, threshold))
}

/// Expected number of papers of a lognormal unit above the world top-x%
/// threshold: `N * P(C > threshold)`. Non-integer and possibly below 1.
pub fn analytic_ptop(spec: &LognormalSpec, world: &WorldIndex, x: f64) -> Result<PercentileResult, IndicatorError> {
    analytic_ptop_mixture(&spec.label, std::slice::from_ref(spec), world, x)
}

/// Analytic P_top x% of a unit made of several lognormal parts: the sum of
/// the parts' expectations.
pub fn analytic_ptop_mixture(
    label: &str,
    parts: &[LognormalSpec],
    world: &WorldIndex,
    x: f64,
) -> Result<PercentileResult, IndicatorError> {
    if parts.is_empty() {
        return Err(IndicatorError::EmptyMixture);
    }
    let (cutoff, threshold) = analytic_threshold(world, x)?;
    let mut value = 0.0;
    for spec in parts {
        // A zero threshold means every paper of a positive lognormal exceeds it.
        let sf = if threshold > 0.0 {
            lognormal_survival(spec.mu, spec.sigma, threshold)?
        } else {
            1.0
        };
        value += spec.n as f64 * sf;
    }
    Ok(PercentileResult {
        label: label.to_string(),
        x,
        mode: PercentileMode::Analytic,
        value,
        threshold: Some(threshold),
        cutoff_rank: cutoff,
    })
}

/// Number of uncited papers (`P0`) of a real series.
pub fn count_uncited(series: &CitationSeries) -> Result<usize, IndicatorError> {
    if series.origin == Origin::Synthetic {
        return Err(IndicatorError::SyntheticUncited);
    }
    Ok(series.values.iter().filter(|&&v| v == 0.0).count())
}

/// Metadata written alongside every indicator export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorMeta {
    pub k: usize,
    pub offset: f64,
    pub scale: f64,
    pub tie_policy: TiePolicy,
    pub seed: Option<u64>,
    pub percentile_mode: PercentileMode,
    pub source: String,
    pub config_hash: Option<String>,
    pub tool_version: String,
    /// Present when an experimental fractional correction was applied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local_share: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorRow {
    pub label: String,
    pub p: usize,
    pub p0: Option<usize>,
    /// One value per requested percentile, aligned with the table's `xs`.
    pub ptop: Vec<f64>,
    /// `None` when the unit has fewer than `k` papers.
    pub rk: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorTable {
    pub metadata: IndicatorMeta,
    pub xs: Vec<f64>,
    pub rows: Vec<IndicatorRow>,
}

/// Column name for a percentile: `ptop_10`, `ptop_0.1`, ...
pub fn ptop_column(x: f64) -> String {
    format!("ptop_{x}")
}

pub(crate) fn fmt_opt<T: ToString>(v: Option<T>, missing: &str) -> String {
    v.map_or_else(|| missing.to_string(), |v| v.to_string())
}

impl IndicatorTable {
    /// CSV with the metadata block as leading `# key: value` lines.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let meta = serde_json::to_value(&self.metadata).map_err(std::io::Error::other)?;
        if let serde_json::Value::Object(map) = meta {
            for (k, v) in map {
                let text = match v {
                    serde_json::Value::String(s) => s,
                    serde_json::Value::Null => "none".into(),
                    other => other.to_string(),
                };
                writeln!(out, "# {k}: {text}")?;
            }
        }
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["label".to_string(), "P".into(), "P0".into()];
        header.extend(self.xs.iter().map(|&x| ptop_column(x)));
        header.push("rk".into());
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec = vec![row.label.clone(), row.p.to_string(), fmt_opt(row.p0, "")];
            rec.extend(row.ptop.iter().map(f64::to_string));
            rec.push(fmt_opt(row.rk, "insufficient"));
            w.write_record(&rec)?;
        }
        w.flush()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                obj.insert("label".into(), row.label.clone().into());
                obj.insert("P".into(), row.p.into());
                obj.insert("P0".into(), row.p0.map_or(serde_json::Value::Null, Into::into));
                for (x, v) in self.xs.iter().zip(&row.ptop) {
                    obj.insert(ptop_column(*x), (*v).into());
                }
                obj.insert("rk".into(), row.rk.map_or(serde_json::Value::Null, Into::into));
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::json!({ "metadata": self.metadata, "rows": rows })
    }
}
