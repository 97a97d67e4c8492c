//! Global world list and dual ranks.
//!
//! Every paper has two ranks: `rank1`, its position in the citation-descending
//! list of all papers in the field (the world), and `rank2`, its position in
//! the list of its own unit. Both are 1-based.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::synthdist::CitationSeries;

#[derive(Debug, Error, PartialEq)]
pub enum RankError {
    #[error("duplicate series label `{0}`")]
    DuplicateLabel(String),
    #[error("world would be empty: no series has any paper")]
    EmptyWorld,
    #[error("citation value {value} in `{label}` is not a finite non-negative number")]
    InvalidValue { label: String, value: f64 },
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("insufficient papers: need {needed}, unit has {available}")]
    InsufficientPapers { needed: usize, available: usize },
    #[error("k must be at least 1")]
    ZeroK,
    #[error("geometric mean of an empty list")]
    EmptyMean,
    #[error("geometric mean needs positive values, got {0}")]
    NonPositive(f64),
}

/// How papers with equal citation counts are ranked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TiePolicy {
    /// Distinct ranks; ties broken by label, then by member key.
    #[default]
    Ordinal,
    /// Tied papers share the best rank of their group (1, 2, 2, 4).
    Competition,
}

impl fmt::Display for TiePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TiePolicy::Ordinal => f.write_str("ordinal"),
            TiePolicy::Competition => f.write_str("competition"),
        }
    }
}

impl FromStr for TiePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ordinal" => Ok(TiePolicy::Ordinal),
            "competition" | "min" => Ok(TiePolicy::Competition),
            other => Err(format!("unknown tie policy `{other}` (expected ordinal|competition)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldEntry {
    pub value: f64,
    /// Index into [`WorldIndex::labels`].
    pub owner: usize,
    /// Stable per-paper identifier within its owner.
    pub member_key: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankPair {
    pub rank1: usize,
    pub rank2: usize,
    pub value: f64,
}

/// The immutable, citation-descending list of every paper in a field.
#[derive(Debug, Clone)]
pub struct WorldIndex {
    labels: Vec<String>,
    entries: Vec<WorldEntry>,
    rank1: Vec<usize>,
    owned: Vec<Vec<usize>>,
    tie_policy: TiePolicy,
}

/// Builds the world from labeled series. Member keys are positions within
/// each series.
pub fn build_world(series: &[CitationSeries], tie_policy: TiePolicy) -> Result<WorldIndex, RankError> {
    let mut seen = HashMap::with_capacity(series.len());
    for (i, s) in series.iter().enumerate() {
        if seen.insert(s.label.as_str(), i).is_some() {
            return Err(RankError::DuplicateLabel(s.label.clone()));
        }
    }
    let keyed = series.iter().map(|s| {
        (
            s.label.clone(),
            s.values
                .iter()
                .enumerate()
                .map(|(i, &v)| (v, i as u64))
                .collect::<Vec<_>>(),
        )
    });
    WorldIndex::from_keyed(keyed, tie_policy)
}

impl WorldIndex {
    /// Builds from `(label, [(value, member_key)])` groups. Member keys must be
    /// unique within a label; they decide the order of exact ties.
    pub fn from_keyed<I>(groups: I, tie_policy: TiePolicy) -> Result<Self, RankError>
    where
        I: IntoIterator<Item = (String, Vec<(f64, u64)>)>,
    {
        let mut labels = Vec::new();
        let mut entries = Vec::new();
        let mut seen = HashMap::new();
        for (label, members) in groups {
            if seen.insert(label.clone(), labels.len()).is_some() {
                return Err(RankError::DuplicateLabel(label));
            }
            let owner = labels.len();
            for (value, member_key) in members {
                if !(value.is_finite() && value >= 0.0) {
                    return Err(RankError::InvalidValue { label, value });
                }
                entries.push(WorldEntry {
                    value,
                    owner,
                    member_key,
                });
            }
            labels.push(label);
        }
        if entries.is_empty() {
            return Err(RankError::EmptyWorld);
        }

        entries.sort_unstable_by(|a, b| {
            b.value
                .total_cmp(&a.value)
                .then_with(|| labels[a.owner].cmp(&labels[b.owner]))
                .then_with(|| a.member_key.cmp(&b.member_key))
        });

        let rank1 = assign_ranks(entries.iter().map(|e| e.value), tie_policy);
        let mut owned = vec![Vec::new(); labels.len()];
        for (pos, e) in entries.iter().enumerate() {
            owned[e.owner].push(pos);
        }
        Ok(WorldIndex {
            labels,
            entries,
            rank1,
            owned,
            tie_policy,
        })
    }

    /// World size `W`.
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn tie_policy(&self) -> TiePolicy {
        self.tie_policy
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn entries(&self) -> &[WorldEntry] {
        &self.entries
    }

    pub fn entry(&self, position: usize) -> &WorldEntry {
        &self.entries[position]
    }

    pub fn owner_label(&self, position: usize) -> &str {
        &self.labels[self.entries[position].owner]
    }

    /// Global rank of the entry at 0-based `position`.
    pub fn rank1_at(&self, position: usize) -> usize {
        self.rank1[position]
    }

    /// Citation value at 1-based `rank` in list order.
    pub fn value_at_rank(&self, rank: usize) -> Option<f64> {
        rank.checked_sub(1).and_then(|i| self.entries.get(i)).map(|e| e.value)
    }

    pub fn owner_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// World positions of a label's papers, ascending.
    pub fn positions_of(&self, label: &str) -> Result<&[usize], RankError> {
        self.owner_index(label)
            .map(|i| self.owned[i].as_slice())
            .ok_or_else(|| RankError::UnknownLabel(label.to_string()))
    }

    /// Rank pairs for an arbitrary unit given as world positions. The unit
    /// need not coincide with one owner: it can span several owners or be a
    /// subset of one.
    pub fn unit_pairs(&self, positions: &[usize]) -> Vec<RankPair> {
        let mut sorted = positions.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let local = assign_ranks(sorted.iter().map(|&p| self.entries[p].value), self.tie_policy);
        sorted
            .iter()
            .zip(local)
            .map(|(&p, rank2)| RankPair {
                rank1: self.rank1[p],
                rank2,
                value: self.entries[p].value,
            })
            .collect()
    }

    /// Positions of the `k` best-ranked papers of a unit, by world order.
    pub fn unit_top_positions(&self, positions: &[usize], k: usize) -> Vec<usize> {
        let mut sorted = positions.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        sorted.truncate(k);
        sorted
    }

    /// Entries per owner; sums to [`WorldIndex::size`].
    pub fn owned_counts(&self) -> Vec<(&str, usize)> {
        self.labels
            .iter()
            .zip(&self.owned)
            .map(|(l, o)| (l.as_str(), o.len()))
            .collect()
    }
}

/// 1-based ranks for a non-increasing value sequence.
fn assign_ranks(values: impl Iterator<Item = f64>, policy: TiePolicy) -> Vec<usize> {
    let mut ranks = Vec::new();
    let mut prev: Option<f64> = None;
    let mut group_rank = 0;
    for (i, v) in values.enumerate() {
        let rank = match policy {
            TiePolicy::Ordinal => i + 1,
            TiePolicy::Competition => {
                if prev.is_none_or(|p| p.total_cmp(&v) != Ordering::Equal) {
                    group_rank = i + 1;
                }
                group_rank
            }
        };
        prev = Some(v);
        ranks.push(rank);
    }
    ranks
}

/// One RankPair per paper owned by `label`, in world order.
pub fn dual_ranks(world: &WorldIndex, label: &str) -> Result<Vec<RankPair>, RankError> {
    let positions = world.positions_of(label)?;
    Ok(world.unit_pairs(positions))
}

/// The `k` most cited papers of a unit with their dual ranks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopKRanks {
    pub label: String,
    pub k: usize,
    pub pairs: Vec<RankPair>,
}

impl TopKRanks {
    pub fn rank1s(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.rank1).collect()
    }
}

/// Keeps the `k` pairs with the smallest rank2. Fewer than `k` papers is an
/// error, never a silent truncation.
pub fn top_k(label: impl Into<String>, pairs: &[RankPair], k: usize) -> Result<TopKRanks, RankError> {
    if k == 0 {
        return Err(RankError::ZeroK);
    }
    if pairs.len() < k {
        return Err(RankError::InsufficientPapers {
            needed: k,
            available: pairs.len(),
        });
    }
    let mut sorted = pairs.to_vec();
    sorted.sort_by(|a, b| a.rank2.cmp(&b.rank2).then(a.rank1.cmp(&b.rank1)));
    sorted.truncate(k);
    Ok(TopKRanks {
        label: label.into(),
        k,
        pairs: sorted,
    })
}

/// `exp(mean(ln x))`, computed in log space.
pub fn geometric_mean(xs: &[f64]) -> Result<f64, RankError> {
    if xs.is_empty() {
        return Err(RankError::EmptyMean);
    }
    let mut log_sum = 0.0;
    for &x in xs {
        if x.is_nan() || x <= 0.0 || !x.is_finite() {
            return Err(RankError::NonPositive(x));
        }
        log_sum += x.ln();
    }
    Ok((log_sum / xs.len() as f64).exp())
}

/// Geometric mean of the rank2/rank1 ratios.
pub fn ratio_index(top: &TopKRanks) -> f64 {
    let ratios: Vec<f64> = top.pairs.iter().map(|p| p.rank2 as f64 / p.rank1 as f64).collect();
    geometric_mean(&ratios).expect("ranks are positive")
}

/// Geometric mean of `1 / (offset + rank1)` over a top-k set.
pub fn inverse_rank_mean(top: &TopKRanks, offset: f64) -> f64 {
    let inv: Vec<f64> = top.pairs.iter().map(|p| 1.0 / (offset + p.rank1 as f64)).collect();
    geometric_mean(&inv).expect("ranks are positive")
}

/// Writes `label,rank2,rank1,value` rows.
pub fn write_rank_table<W: std::io::Write>(rows: &[(String, RankPair)], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["label", "rank2", "rank1", "value"])?;
    for (label, p) in rows {
        w.write_record([label.clone(), p.rank2.to_string(), p.rank1.to_string(), p.value.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
