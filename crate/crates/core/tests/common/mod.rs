//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use proptest::prelude::*;
use rkindex::indicators::{empirical_ptop, percentile_cutoff, rk_from_ranks, rk_index};
use rkindex::rankcore::{dual_ranks, top_k};
use rkindex::synthdist::CitationSeries;
use rkindex::{build_world, RkParams, TiePolicy};

pub const FIXTURE_COUNTRIES: [&str; 3] = ["CHN", "ESP", "USA"];

/// Country list of fixture paper `i`.
pub fn fixture_countries(i: usize) -> &'static str {
    match i % 10 {
        0..=3 => "USA",
        4 | 5 => "CHN",
        6 => "ESP",
        7 => "USA;CHN",
        8 => "CHN;ESP;CHN",
        _ => "ESP;USA;CHN",
    }
}

/// Citation count of fixture paper `i`: a modular pattern with many ties
/// and zeros, plus a handful of planted highly cited papers.
pub fn fixture_citations(i: usize) -> u64 {
    const PLANTED: [(usize, u64); 8] = [
        (3, 1200),
        (17, 1200),
        (42, 950),
        (99, 800),
        (250, 1500),
        (512, 700),
        (596, 640),
        (6, 1500),
    ];
    if let Some(&(_, c)) = PLANTED.iter().find(|(j, _)| *j == i) {
        return c;
    }
    let c = (i as u64 * 7919) % 211;
    if c.is_multiple_of(13) {
        0
    } else {
        c
    }
}

/// 600 papers over three countries, as corpus CSV text.
pub fn fixture_csv() -> String {
    let mut s = String::from("id,year,citations,countries\n");
    for i in 0..600 {
        s.push_str(&format!(
            "p{i:03},{},{},{}\n",
            2014 + (i % 4),
            fixture_citations(i),
            fixture_countries(i)
        ));
    }
    s
}

pub const FIXTURE_META: &str =
    r#"{"field":"Fixture","pub_window":[2014,2017],"cit_window":[2019,2022],"source":"hand-planted fixture"}"#;

#[derive(Debug, PartialEq)]
pub struct OracleRow {
    pub p: usize,
    pub p0: usize,
    pub ptop10: usize,
    pub rank1s: Option<Vec<usize>>,
}

/// Direct recomputation over the fixture without the library's world
/// index: every rank is a count of papers that beat the paper.
pub fn brute_force(country: &str, domestic: bool, k: usize) -> OracleRow {
    let n = 600;
    let ids: Vec<String> = (0..n).map(|i| format!("p{i:03}")).collect();
    let cites: Vec<u64> = (0..n).map(fixture_citations).collect();
    let rank = |i: usize| {
        1 + (0..n)
            .filter(|&j| cites[j] > cites[i] || (cites[j] == cites[i] && ids[j] < ids[i]))
            .count()
    };
    let members: Vec<usize> = (0..n)
        .filter(|&i| {
            let mut cs: Vec<&str> = fixture_countries(i).split(';').collect();
            cs.sort();
            cs.dedup();
            cs.contains(&country) && ((cs.len() == 1) == domestic)
        })
        .collect();
    let cutoff = n / 10;
    let mut ranks: Vec<usize> = members.iter().map(|&i| rank(i)).collect();
    ranks.sort();
    OracleRow {
        p: members.len(),
        p0: members.iter().filter(|&&i| cites[i] == 0).count(),
        ptop10: ranks.iter().filter(|&&r| r <= cutoff).count(),
        rank1s: (ranks.len() >= k).then(|| ranks[..k].to_vec()),
    }
}

/// Random small worlds: integer counts (with ties) or positive reals.
pub fn arb_world() -> impl Strategy<Value = Vec<CitationSeries>> {
    let integer = prop::collection::vec(prop::collection::vec(0u64..40, 1..40), 1..6).prop_map(|groups| {
        groups
            .into_iter()
            .enumerate()
            .map(|(i, v)| CitationSeries::real(format!("u{i}"), v))
            .collect::<Vec<_>>()
    });
    let real = prop::collection::vec(prop::collection::vec(0.01f64..1e4, 1..40), 1..6).prop_map(|groups| {
        groups
            .into_iter()
            .enumerate()
            .map(|(i, v)| CitationSeries::synthetic(format!("s{i}"), v))
            .collect::<Vec<_>>()
    });
    prop_oneof![integer, real]
}

fn scaled(series: &[CitationSeries], factor: f64) -> Vec<CitationSeries> {
    series
        .iter()
        .map(|s| CitationSeries {
            values: s.values.iter().map(|v| v * factor).collect(),
            ..s.clone()
        })
        .collect()
}

/// Rank domination, scale invariance and percentile additivity on one
/// world, under both tie policies.
pub fn check_world(series: &[CitationSeries], scale_exp: i32, x: f64) -> Result<(), String> {
    let params = RkParams {
        k: 3,
        ..RkParams::default()
    };
    let factor = 2f64.powi(scale_exp);
    for policy in [TiePolicy::Ordinal, TiePolicy::Competition] {
        let world = build_world(series, policy).map_err(|e| e.to_string())?;
        let rescaled = build_world(&scaled(series, factor), policy).map_err(|e| e.to_string())?;
        for s in series {
            let pairs = dual_ranks(&world, &s.label).map_err(|e| e.to_string())?;
            if let Some(p) = pairs.iter().find(|p| p.rank1 < p.rank2) {
                return Err(format!("rank1 {} < rank2 {} in {}", p.rank1, p.rank2, s.label));
            }
            let again = dual_ranks(&rescaled, &s.label).map_err(|e| e.to_string())?;
            let ranks = |ps: &[rkindex::rankcore::RankPair]| ps.iter().map(|p| (p.rank1, p.rank2)).collect::<Vec<_>>();
            if ranks(&pairs) != ranks(&again) {
                return Err(format!("ranks of {} changed under scaling by {factor}", s.label));
            }
            if pairs.len() >= params.k {
                let a = rk_index(&top_k(&s.label, &pairs, params.k).unwrap(), params).unwrap();
                let b = rk_index(&top_k(&s.label, &again, params.k).unwrap(), params).unwrap();
                if a.rk != b.rk {
                    return Err(format!("rk of {} changed under scaling: {} vs {}", s.label, a.rk, b.rk));
                }
            }
        }
        if policy == TiePolicy::Ordinal {
            let total: f64 = series
                .iter()
                .map(|s| empirical_ptop(&world, &s.label, x).unwrap().value)
                .sum();
            let cutoff = percentile_cutoff(world.size(), x).unwrap();
            if total != cutoff as f64 {
                return Err(format!("ptop {x}% sums to {total}, cutoff is {cutoff}"));
            }
        }
    }
    Ok(())
}

/// Strictly increasing rank1 lists of length `k`.
pub fn arb_ranks(k: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..5000, k).prop_map(|gaps| {
        let mut acc = 0;
        gaps.into_iter()
            .map(|g| {
                acc += g;
                acc
            })
            .collect()
    })
}

/// Moving any single rank1 down raises rk, moving it up lowers it.
pub fn check_monotone(ranks: &[usize], i: usize, delta: usize) -> Result<(), String> {
    let base = rk_from_ranks(ranks, 20.0, 1000.0);
    let mut up = ranks.to_vec();
    up[i] += delta;
    if rk_from_ranks(&up, 20.0, 1000.0) >= base {
        return Err(format!("raising rank {i} of {ranks:?} by {delta} did not lower rk"));
    }
    if ranks[i] > delta {
        let mut down = ranks.to_vec();
        down[i] -= delta;
        if rk_from_ranks(&down, 20.0, 1000.0) <= base {
            return Err(format!("lowering rank {i} of {ranks:?} by {delta} did not raise rk"));
        }
    }
    Ok(())
}
