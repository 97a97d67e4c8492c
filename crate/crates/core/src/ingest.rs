//! Real citation records: loading, country splits and assessment tables.
//!
//! A corpus is one field's papers with precomputed citation counts. The
//! world list is the whole corpus; a country's domestic and collaborative
//! papers are units inside it.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::indicators::{empirical_ptop_positions, fmt_opt, rk_index, IndicatorError, RkParams, RkResult};
use crate::rankcore::{top_k, RankError, TiePolicy, WorldIndex};

/// Owner label of the single corpus-wide series in the world index.
const WORLD_LABEL: &str = "corpus";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt header: {0}")]
    Header(String),
    #[error("invalid corpus metadata: {0}")]
    Meta(String),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("country {0} does not appear in the corpus")]
    UnknownCountry(String),
    #[error(transparent)]
    Rank(#[from] RankError),
    #[error(transparent)]
    Indicator(#[from] IndicatorError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperRecord {
    pub id: String,
    pub year: i32,
    pub citations: u64,
    /// Deduplicated, in order of first appearance.
    pub countries: Vec<String>,
    pub field: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusMeta {
    pub field: String,
    pub pub_window: [i32; 2],
    pub cit_window: [i32; 2],
    pub source: String,
}

impl CorpusMeta {
    pub fn parse(text: &str) -> Result<Self, IngestError> {
        let meta: CorpusMeta = serde_json::from_str(text).map_err(|e| IngestError::Meta(e.to_string()))?;
        meta.validate()?;
        Ok(meta)
    }

    pub fn load(path: &Path) -> Result<Self, IngestError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), IngestError> {
        for (name, w) in [("pub_window", self.pub_window), ("cit_window", self.cit_window)] {
            if w[0] > w[1] {
                return Err(IngestError::Meta(format!("{name} starts after it ends: {w:?}")));
            }
        }
        Ok(())
    }

    /// Non-fatal remarks, e.g. a citation window not displaced five years.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.cit_window[0] != self.pub_window[0] + 5 {
            out.push(format!(
                "citation window {:?} does not start five years after publication window {:?}",
                self.cit_window, self.pub_window
            ));
        }
        out
    }

    pub fn contains_year(&self, year: i32) -> bool {
        (self.pub_window[0]..=self.pub_window[1]).contains(&year)
    }

    /// Placeholder metadata accepting every year.
    pub fn open(field: impl Into<String>, source: impl Into<String>) -> Self {
        CorpusMeta {
            field: field.into(),
            pub_window: [i32::MIN, i32::MAX],
            cit_window: [i32::MIN, i32::MAX],
            source: source.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowError {
    /// 1-based line number in the file, header being line 1.
    pub line: u64,
    pub id: Option<String>,
    pub message: String,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.id {
            Some(id) => write!(f, "line {} (id {}): {}", self.line, id, self.message),
            None => write!(f, "line {}: {}", self.line, self.message),
        }
    }
}

/// A validated corpus. Records are kept sorted by id, which is also the
/// tie order of equal citation counts in the world list.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub meta: CorpusMeta,
    pub records: Vec<PaperRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadReport {
    pub corpus: Corpus,
    pub errors: Vec<RowError>,
    pub warnings: Vec<String>,
}

fn valid_country(code: &str) -> bool {
    code.len() == 3 && code.bytes().all(|b| b.is_ascii_uppercase())
}

const REQUIRED: [&str; 4] = ["id", "year", "citations", "countries"];

/// Parses a corpus CSV. Bad rows are collected into the report rather than
/// aborting; only an unreadable header is fatal.
pub fn parse_corpus<R: Read>(input: R, meta: CorpusMeta) -> Result<LoadReport, IngestError> {
    meta.validate()?;
    let mut reader = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(input);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| IngestError::Header(e.to_string()))?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect();
    let has_field = match header.len() {
        4 => false,
        5 if header[4] == "field" => true,
        _ => {
            return Err(IngestError::Header(format!(
                "expected id,year,citations,countries[,field], got {}",
                header.join(",")
            )))
        }
    };
    if header[..4] != REQUIRED {
        return Err(IngestError::Header(format!(
            "expected id,year,citations,countries[,field], got {}",
            header.join(",")
        )));
    }

    let mut records = Vec::new();
    let mut errors = Vec::new();
    let mut ids = HashSet::new();
    for result in reader.records() {
        let row = match result {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                errors.push(RowError {
                    line,
                    id: None,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let line = row.position().map_or(0, |p| p.line());
        let id = row.get(0).unwrap_or("").to_string();
        let fail = |message: String| RowError {
            line,
            id: (!id.is_empty()).then(|| id.clone()),
            message,
        };
        if row.len() != header.len() {
            errors.push(fail(format!("expected {} columns, found {}", header.len(), row.len())));
            continue;
        }
        if id.is_empty() {
            errors.push(fail("empty id".into()));
            continue;
        }
        let year: i32 = match row[1].parse() {
            Ok(y) => y,
            Err(_) => {
                errors.push(fail(format!("invalid year '{}'", &row[1])));
                continue;
            }
        };
        if !meta.contains_year(year) {
            errors.push(fail(format!(
                "year {year} outside publication window {}-{}",
                meta.pub_window[0], meta.pub_window[1]
            )));
            continue;
        }
        let citations: u64 = match row[2].parse::<i64>() {
            Ok(c) if c >= 0 => c as u64,
            Ok(c) => {
                errors.push(fail(format!("negative citations {c}")));
                continue;
            }
            Err(_) => {
                errors.push(fail(format!("invalid citation count '{}'", &row[2])));
                continue;
            }
        };
        let mut countries = Vec::new();
        let mut bad = None;
        for code in row[3].split(';').map(str::trim).filter(|c| !c.is_empty()) {
            if !valid_country(code) {
                bad = Some(code.to_string());
                break;
            }
            if !countries.iter().any(|c| c == code) {
                countries.push(code.to_string());
            }
        }
        if let Some(code) = bad {
            errors.push(fail(format!("invalid country code '{code}'")));
            continue;
        }
        if countries.is_empty() {
            errors.push(fail("empty country list".into()));
            continue;
        }
        if !ids.insert(id.clone()) {
            errors.push(fail("duplicate id".into()));
            continue;
        }
        let field = if has_field {
            Some(row[4].to_string()).filter(|f| !f.is_empty())
        } else {
            None
        };
        records.push(PaperRecord {
            id,
            year,
            citations,
            countries,
            field,
        });
    }
    records.sort_by(|a, b| a.id.cmp(&b.id));
    let warnings = meta.warnings();
    Ok(LoadReport {
        corpus: Corpus { meta, records },
        errors,
        warnings,
    })
}

pub fn load_corpus(path: &Path, meta: CorpusMeta) -> Result<LoadReport, IngestError> {
    parse_corpus(std::fs::File::open(path)?, meta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitKind {
    Domestic,
    Collaborative,
}

impl fmt::Display for SplitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitKind::Domestic => "domestic",
            SplitKind::Collaborative => "collaborative",
        })
    }
}

impl FromStr for SplitKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "domestic" => Ok(SplitKind::Domestic),
            "collaborative" | "international" => Ok(SplitKind::Collaborative),
            other => Err(format!("unknown split '{other}' (expected domestic or collaborative)")),
        }
    }
}

/// Record indices of a country's papers, by split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountrySplit {
    pub country: String,
    pub domestic: Vec<usize>,
    pub collaborative: Vec<usize>,
}

impl CountrySplit {
    pub fn get(&self, kind: SplitKind) -> &[usize] {
        match kind {
            SplitKind::Domestic => &self.domestic,
            SplitKind::Collaborative => &self.collaborative,
        }
    }
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Every country code present, sorted.
    pub fn countries(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self.records.iter().flat_map(|r| r.countries.iter().map(String::as_str)).collect();
        set.into_iter().map(str::to_string).collect()
    }

    /// Domestic papers list only `country`; collaborative ones list it and
    /// at least one other.
    pub fn split_country(&self, country: &str) -> Result<CountrySplit, IngestError> {
        let mut split = CountrySplit {
            country: country.to_string(),
            domestic: Vec::new(),
            collaborative: Vec::new(),
        };
        for (i, r) in self.records.iter().enumerate() {
            if r.countries.iter().any(|c| c == country) {
                if r.countries.len() == 1 {
                    split.domestic.push(i);
                } else {
                    split.collaborative.push(i);
                }
            }
        }
        if split.domestic.is_empty() && split.collaborative.is_empty() {
            return Err(IngestError::UnknownCountry(country.to_string()));
        }
        Ok(split)
    }

    /// The world list over all papers. Position `i` of the returned map is
    /// the world position of record `i`.
    pub fn world(&self, tie_policy: TiePolicy) -> Result<(WorldIndex, Vec<usize>), IngestError> {
        if self.records.is_empty() {
            return Err(IngestError::EmptyCorpus);
        }
        let members: Vec<(f64, u64)> = self
            .records
            .iter()
            .enumerate()
            .map(|(i, r)| (r.citations as f64, i as u64))
            .collect();
        let world = WorldIndex::from_keyed([(WORLD_LABEL.to_string(), members)], tie_policy)?;
        let mut position = vec![0; self.records.len()];
        for (pos, e) in world.entries().iter().enumerate() {
            position[e.member_key as usize] = pos;
        }
        Ok((world, position))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessmentRow {
    pub country: String,
    pub split: SplitKind,
    pub p: usize,
    pub p0: usize,
    pub ptop10: usize,
    /// `None` when `p` is 0.
    pub ptop10_over_p: Option<f64>,
    /// `None` when the split has fewer than `k` papers.
    pub rk: Option<RkResult>,
}

/// Per country and split: P, P0, P_top 10%, their ratio and the Rk-index,
/// all against the whole-corpus world list.
pub struct Assessor<'a> {
    corpus: &'a Corpus,
    world: WorldIndex,
    position: Vec<usize>,
    params: RkParams,
}

impl<'a> Assessor<'a> {
    pub fn new(corpus: &'a Corpus, params: RkParams, tie_policy: TiePolicy) -> Result<Self, IngestError> {
        params.validate()?;
        let (world, position) = corpus.world(tie_policy)?;
        Ok(Assessor {
            corpus,
            world,
            position,
            params,
        })
    }

    pub fn world(&self) -> &WorldIndex {
        &self.world
    }

    pub fn row(&self, split: &CountrySplit, kind: SplitKind) -> Result<AssessmentRow, IngestError> {
        let records = split.get(kind);
        let positions: Vec<usize> = records.iter().map(|&i| self.position[i]).collect();
        let label = format!("{}_{}", split.country, kind);
        let p = records.len();
        let p0 = records.iter().filter(|&&i| self.corpus.records[i].citations == 0).count();
        let ptop10 = if p == 0 {
            0
        } else {
            empirical_ptop_positions(&self.world, &label, &positions, 10.0)?.value as usize
        };
        let rk = if p >= self.params.k {
            let head = self.world.unit_top_positions(&positions, self.params.k);
            let top = top_k(label, &self.world.unit_pairs(&head), self.params.k)?;
            Some(rk_index(&top, self.params)?)
        } else {
            None
        };
        Ok(AssessmentRow {
            country: split.country.clone(),
            split: kind,
            p,
            p0,
            ptop10,
            ptop10_over_p: (p > 0).then(|| ptop10 as f64 / p as f64),
            rk,
        })
    }

    /// Domestic then collaborative rows for each country, in input order.
    /// An empty country list means every country in the corpus.
    pub fn assess(&self, countries: &[String]) -> Result<Vec<AssessmentRow>, IngestError> {
        let all;
        let list = if countries.is_empty() {
            all = self.corpus.countries();
            &all
        } else {
            countries
        };
        let mut rows = Vec::with_capacity(list.len() * 2);
        for c in list {
            let split = self.corpus.split_country(c)?;
            rows.push(self.row(&split, SplitKind::Domestic)?);
            rows.push(self.row(&split, SplitKind::Collaborative)?);
        }
        Ok(rows)
    }
}

pub fn assess(
    corpus: &Corpus,
    countries: &[String],
    params: RkParams,
    tie_policy: TiePolicy,
) -> Result<Vec<AssessmentRow>, IngestError> {
    Assessor::new(corpus, params, tie_policy)?.assess(countries)
}

/// Leading `# key: value` lines describing how a table was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessmentMeta {
    pub field: String,
    pub pub_window: [i32; 2],
    pub cit_window: [i32; 2],
    pub source: String,
    pub input_sha256: String,
    pub k: usize,
    pub offset: f64,
    pub scale: f64,
    pub tie_policy: TiePolicy,
    pub tool_version: String,
}

impl AssessmentMeta {
    fn write_header<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "# field: {}", self.field)?;
        writeln!(out, "# pub_window: {}-{}", self.pub_window[0], self.pub_window[1])?;
        writeln!(out, "# cit_window: {}-{}", self.cit_window[0], self.cit_window[1])?;
        writeln!(out, "# source: {}", self.source)?;
        writeln!(out, "# input_sha256: {}", self.input_sha256)?;
        writeln!(out, "# k: {}", self.k)?;
        writeln!(out, "# offset: {}", self.offset)?;
        writeln!(out, "# scale: {}", self.scale)?;
        writeln!(out, "# tie_policy: {}", self.tie_policy)?;
        writeln!(out, "# tool_version: {}", self.tool_version)
    }
}

const SPLIT_COLUMNS: [&str; 5] = ["P", "P0", "ptop10", "ptop10_over_P", "rk"];

fn split_cells(row: Option<&AssessmentRow>) -> Vec<String> {
    match row {
        None => vec![String::new(); SPLIT_COLUMNS.len()],
        Some(r) => vec![
            r.p.to_string(),
            r.p0.to_string(),
            r.ptop10.to_string(),
            fmt_opt(r.ptop10_over_p, ""),
            fmt_opt(r.rk.as_ref().map(|rk| rk.rk), "insufficient"),
        ],
    }
}

/// One line per country with domestic and collaborative blocks side by side.
pub fn write_assessment_table<W: Write>(
    rows: &[AssessmentRow],
    meta: Option<&AssessmentMeta>,
    mut out: W,
) -> Result<(), IngestError> {
    if let Some(m) = meta {
        m.write_header(&mut out)?;
    }
    let mut by_country: Vec<(&str, [Option<&AssessmentRow>; 2])> = Vec::new();
    for r in rows {
        let slot = match by_country.iter().position(|(c, _)| *c == r.country) {
            Some(i) => i,
            None => {
                by_country.push((&r.country, [None, None]));
                by_country.len() - 1
            }
        };
        by_country[slot].1[r.split as usize] = Some(r);
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["country".to_string()];
    for kind in [SplitKind::Domestic, SplitKind::Collaborative] {
        header.extend(SPLIT_COLUMNS.iter().map(|c| format!("{kind}_{c}")));
    }
    w.write_record(&header)?;
    for (country, pair) in by_country {
        let mut rec = vec![country.to_string()];
        rec.extend(split_cells(pair[0]));
        rec.extend(split_cells(pair[1]));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// One line per row: country, split and the indicator columns.
pub fn write_assessment_rows<W: Write>(rows: &[AssessmentRow], out: W) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["country", "split"];
    header.extend(SPLIT_COLUMNS);
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.country.clone(), r.split.to_string()];
        rec.extend(split_cells(Some(r)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Domestic P and Rk per country across several publication windows.
/// `windows` pairs a column label (e.g. "2014-2017") with that window's rows.
pub fn write_temporal_table<W: Write>(windows: &[(String, Vec<AssessmentRow>)], out: W) -> Result<(), IngestError> {
    let mut countries: Vec<&str> = Vec::new();
    let mut cells: BTreeMap<(&str, usize), &AssessmentRow> = BTreeMap::new();
    for (wi, (_, rows)) in windows.iter().enumerate() {
        for r in rows.iter().filter(|r| r.split == SplitKind::Domestic) {
            if !countries.contains(&r.country.as_str()) {
                countries.push(&r.country);
            }
            cells.insert((&r.country, wi), r);
        }
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["country".to_string()];
    for (label, _) in windows {
        header.push(format!("{label}_P"));
        header.push(format!("{label}_rk"));
    }
    w.write_record(&header)?;
    for c in countries {
        let mut rec = vec![c.to_string()];
        for wi in 0..windows.len() {
            match cells.get(&(c, wi)) {
                Some(r) => {
                    rec.push(r.p.to_string());
                    rec.push(fmt_opt(r.rk.as_ref().map(|rk| rk.rk), "insufficient"));
                }
                None => rec.extend([String::new(), String::new()]),
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> CorpusMeta {
        CorpusMeta {
            field: "Test".into(),
            pub_window: [2014, 2017],
            cit_window: [2019, 2022],
            source: "unit test".into(),
        }
    }

    fn load(text: &str) -> LoadReport {
        parse_corpus(text.as_bytes(), meta()).unwrap()
    }

    #[test]
    fn well_formed_rows_load() {
        let r = load("id,year,citations,countries\np1,2014,3,USA\np2,2015,0,USA;CHN\np3,2017,12,CHN\n");
        assert!(r.errors.is_empty());
        assert!(r.warnings.is_empty());
        assert_eq!(r.corpus.len(), 3);
        assert_eq!(r.corpus.records[1].countries, vec!["USA", "CHN"]);
    }

    #[test]
    fn bad_rows_are_collected() {
        let text = "id,year,citations,countries,field\n\
                    a,2014,-1,USA,x\n\
                    b,2014,5,USA;USA,x\n\
                    c,2014,5,,x\n\
                    d,2013,5,USA,x\n\
                    b,2015,1,USA,x\n\
                    e,2014,2.5,USA,x\n\
                    f,2014,2,usa,x\n\
                    g,2014,2\n\
                    h,2016,9,GBR,\n";
        let r = load(text);
        assert_eq!(r.corpus.len(), 2);
        assert_eq!(r.corpus.records[0].countries, vec!["USA"]);
        assert_eq!(r.corpus.records[1].field, None);
        let lines: Vec<u64> = r.errors.iter().map(|e| e.line).collect();
        assert_eq!(lines, vec![2, 4, 5, 6, 7, 8, 9]);
        assert!(r.errors[0].message.contains("negative"));
        assert!(r.errors[3].message.contains("duplicate"));
    }

    #[test]
    fn corrupt_header_is_fatal() {
        assert!(matches!(
            parse_corpus("id,yr,citations,countries\n".as_bytes(), meta()),
            Err(IngestError::Header(_))
        ));
        assert!(matches!(
            parse_corpus("id,year,citations\n".as_bytes(), meta()),
            Err(IngestError::Header(_))
        ));
    }

    #[test]
    fn window_convention_warns_only() {
        let m = CorpusMeta {
            cit_window: [2018, 2021],
            ..meta()
        };
        let r = parse_corpus("id,year,citations,countries\na,2014,1,USA\n".as_bytes(), m).unwrap();
        assert_eq!(r.warnings.len(), 1);
        assert_eq!(r.corpus.len(), 1);
        let bad = r#"{"field":"f","pub_window":[2017,2014],"cit_window":[2019,2022],"source":"s"}"#;
        assert!(CorpusMeta::parse(bad).is_err());
    }

    #[test]
    fn splits() {
        let r = load("id,year,citations,countries\na,2014,1,USA\nb,2014,1,USA;CHN\nc,2014,1,CHN\n");
        let usa = r.corpus.split_country("USA").unwrap();
        assert_eq!(usa.domestic, vec![0]);
        assert_eq!(usa.collaborative, vec![1]);
        let chn = r.corpus.split_country("CHN").unwrap();
        assert_eq!(chn.domestic, vec![2]);
        assert_eq!(chn.collaborative, vec![1]);
        assert!(matches!(r.corpus.split_country("DEU"), Err(IngestError::UnknownCountry(_))));
    }

    #[test]
    fn single_country_reaches_maximum() {
        let mut text = String::from("id,year,citations,countries\n");
        for i in 0..25 {
            text.push_str(&format!("p{i:02},2015,{},ESP\n", i % 7));
        }
        let r = load(&text);
        let rows = assess(&r.corpus, &["ESP".into()], RkParams::default(), TiePolicy::Ordinal).unwrap();
        assert_eq!(rows[0].p, 25);
        assert_eq!(rows[0].p0, 4);
        assert!((rows[0].rk.as_ref().unwrap().rk - RkParams::default().upper_bound()).abs() < 1e-12);
        assert_eq!(rows[1].p, 0);
        assert!(rows[1].rk.is_none());
        assert_eq!(rows[1].ptop10_over_p, None);
    }

    #[test]
    fn ties_break_by_id() {
        let r = load("id,year,citations,countries\nb,2014,5,USA\na,2014,5,CHN\n");
        let (world, position) = r.corpus.world(TiePolicy::Ordinal).unwrap();
        // records sorted by id: a first, so a takes rank 1
        assert_eq!(r.corpus.records[0].id, "a");
        assert_eq!(world.rank1_at(position[0]), 1);
        assert_eq!(world.rank1_at(position[1]), 2);
        let (world, position) = r.corpus.world(TiePolicy::Competition).unwrap();
        assert_eq!(world.rank1_at(position[1]), 1);
    }

    #[test]
    fn tables_layout() {
        let mut text = String::from("id,year,citations,countries\n");
        for i in 0..30 {
            let c = if i % 3 == 0 { "USA;CHN" } else { "USA" };
            text.push_str(&format!("p{i:02},2015,{i},{c}\n"));
        }
        let r = load(&text);
        let rows = assess(&r.corpus, &[], RkParams::default(), TiePolicy::Ordinal).unwrap();
        assert_eq!(rows.len(), 4);
        let mut buf = Vec::new();
        write_assessment_table(&rows, None, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(
            lines[0],
            "country,domestic_P,domestic_P0,domestic_ptop10,domestic_ptop10_over_P,domestic_rk,\
             collaborative_P,collaborative_P0,collaborative_ptop10,collaborative_ptop10_over_P,collaborative_rk"
        );
        assert!(lines[1].starts_with("CHN,0,0,0,,insufficient,10,"));
        assert!(lines[2].starts_with("USA,20,"));

        let mut buf = Vec::new();
        write_temporal_table(&[("2014-2017".into(), rows.clone()), ("2018-2021".into(), rows)], &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("country,2014-2017_P,2014-2017_rk,2018-2021_P,2018-2021_rk\n"));
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let r = load("id,year,citations,countries\n");
        assert!(matches!(
            assess(&r.corpus, &[], RkParams::default(), TiePolicy::Ordinal),
            Err(IngestError::EmptyCorpus)
        ));
    }
}
