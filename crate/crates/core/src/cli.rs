//! Command-line front end.
//!
//! Synthetic commands read an ensemble config (`--config`, default: the
//! 600-series paper grid) and corpus commands read citation records
//! (`--input`). Exit status is 0 on success, 1 on data or I/O errors and 2
//! on usage errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::experiments::{
    config_hash, run_fig1, run_fig2, run_fig3, run_fig4_on, run_table_s1, ExperimentError, ExperimentReport,
    Fig3Targets, Fig4Config, ReportRow, Study,
};
use crate::export::{write_atomic, write_json_atomic, write_report, Format};
use crate::indicators::{
    analytic_ptop, empirical_ptop, empirical_ptop_positions, fractional_rk, rk_index, IndicatorMeta, IndicatorRow,
    IndicatorTable, PercentileMode, RkParams, DEFAULT_OFFSET, DEFAULT_SCALE,
};
use crate::ingest::{
    load_corpus, write_assessment_rows, write_assessment_table, write_temporal_table, AssessmentMeta, AssessmentRow,
    Assessor, Corpus, CorpusMeta, SplitKind,
};
use crate::rankcore::{write_rank_table, RankPair, TiePolicy};
use crate::synthdist::EnsembleConfig;
use crate::TOOL_VERSION;

#[derive(Debug, Parser)]
#[command(name = "rkindex", version, about = "Rank-based research assessment: Rk-index, top-percentile counts and synthetic validation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample an ensemble and write its specs and values.
    Gen(Common),
    /// Dual ranks (rank2, rank1) of units' top papers.
    Rank(Common),
    /// Rk-index per unit.
    Rk(Common),
    /// Top-percentile counts per unit.
    Ptop(Common),
    /// Rank means against P_top 10% and 0.1% for the 99-series selection.
    Fig1(Common),
    /// Rk tiers against P_top x%.
    Fig2(Common),
    /// Rank1 against rank2 for two efficiencies and two sizes.
    Fig3(Common),
    /// Rk over P_top ratios on the extended 115-unit set.
    Fig4(Common),
    /// Rank tables for series spread over the grid.
    Tables1 {
        #[command(flatten)]
        common: Common,
        /// Number of series to tabulate.
        #[arg(long, default_value_t = 15)]
        sample: usize,
    },
    /// Country assessment tables from citation records.
    Assess(Common),
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Ensemble configuration file (key = value lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Corpus CSV (id,year,citations,countries[,field]); repeatable for assess.
    #[arg(long)]
    input: Vec<PathBuf>,
    /// Corpus metadata JSON; defaults to <input stem>.meta.json when present.
    #[arg(long)]
    meta: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: Format,
    #[arg(long, default_value_t = crate::indicators::DEFAULT_K)]
    k: usize,
    #[arg(long, default_value_t = DEFAULT_OFFSET)]
    offset: f64,
    #[arg(long, default_value_t = DEFAULT_SCALE)]
    scale: f64,
    /// Percentiles, in percent.
    #[arg(long, value_delimiter = ',', default_values_t = crate::indicators::DEFAULT_PERCENTILES)]
    x: Vec<f64>,
    #[arg(long, default_value = "ordinal")]
    tie_policy: TiePolicy,
    /// Series labels (synthetic mode); default all.
    #[arg(long, value_delimiter = ',')]
    label: Vec<String>,
    /// Country codes (corpus mode); default all.
    #[arg(long, value_delimiter = ',')]
    country: Vec<String>,
    /// Restrict corpus output to one split.
    #[arg(long)]
    split: Option<SplitKind>,
    /// Percentile mode; analytic needs a synthetic ensemble.
    #[arg(long, default_value = "empirical", value_parser = parse_mode)]
    mode: PercentileMode,
    /// Experimental fractional credit applied to Rk, in (0, 1].
    #[arg(long)]
    local_share: Option<f64>,
    /// Load corpora despite rejected rows instead of failing.
    #[arg(long)]
    skip_bad_rows: bool,
}

fn parse_mode(s: &str) -> Result<PercentileMode, String> {
    match s.to_ascii_lowercase().as_str() {
        "empirical" => Ok(PercentileMode::Empirical),
        "analytic" => Ok(PercentileMode::Analytic),
        other => Err(format!("unknown mode '{other}' (expected empirical or analytic)")),
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
}

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Data(e.to_string())
    }
}

type CliResult = Result<(), CliError>;

/// Runs the tool with process stdout/stderr.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the tool writing console output to the given sinks.
pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(CliError::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
        Err(CliError::Data(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let common = match &command {
        Command::Gen(c)
        | Command::Rank(c)
        | Command::Rk(c)
        | Command::Ptop(c)
        | Command::Fig1(c)
        | Command::Fig2(c)
        | Command::Fig3(c)
        | Command::Fig4(c)
        | Command::Assess(c) => c,
        Command::Tables1 { common, .. } => common,
    };
    if let Some(jobs) = common.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
        // Console output is buffered so the job can move onto the pool.
        let (result, o, e) = pool.install(|| {
            let (mut o, mut e) = (Vec::new(), Vec::new());
            let r = execute(command, &mut o, &mut e);
            (r, o, e)
        });
        out.write_all(&o)?;
        err.write_all(&e)?;
        return result;
    }
    execute(command, out, err)
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    match command {
        Command::Gen(c) => gen(&c, out),
        Command::Rank(c) => rank(&c, out, err),
        Command::Rk(c) => rk(&c, out, err),
        Command::Ptop(c) => ptop(&c, out, err),
        Command::Fig1(c) => {
            let study = study(&c)?;
            emit(&c, &run_fig1(&study), out)
        }
        Command::Fig2(c) => {
            let study = study(&c)?;
            emit(&c, &run_fig2(&study), out)
        }
        Command::Fig3(c) => {
            let study = study(&c)?;
            emit(&c, &run_fig3(&study, &Fig3Targets::default()), out)
        }
        Command::Fig4(c) => {
            let study = study(&c)?;
            let config = Fig4Config {
                base: study.ensemble.config.clone(),
                ..Fig4Config::paper_default(study.seed())
            };
            emit(&c, &run_fig4_on(&study, &config), out)
        }
        Command::Tables1 { common, sample } => {
            let study = study(&common)?;
            emit(&common, &run_table_s1(&study, sample), out)
        }
        Command::Assess(c) => assess(&c, out, err),
    }
}

fn params(c: &Common) -> Result<RkParams, CliError> {
    let p = RkParams {
        k: c.k,
        offset: c.offset,
        scale: c.scale,
    };
    p.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(p)
}

fn synthetic_config(c: &Common) -> Result<EnsembleConfig, CliError> {
    if !c.input.is_empty() {
        return Err(CliError::Usage("this command takes --config, not --input".into()));
    }
    let mut config = match &c.config {
        Some(path) => EnsembleConfig::load(path)?,
        None => EnsembleConfig::paper_grid(0),
    };
    if let Some(seed) = c.seed {
        config.seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn study(c: &Common) -> Result<Study, CliError> {
    let config = synthetic_config(c)?;
    Ok(Study::new(&config, c.tie_policy, params(c)?)?)
}

fn out_dir(c: &Common) -> PathBuf {
    c.out.clone().unwrap_or_else(|| PathBuf::from("."))
}

fn emit<R: ReportRow>(
    c: &Common,
    report: &Result<ExperimentReport<R>, ExperimentError>,
    out: &mut dyn Write,
) -> CliResult {
    let report = report.as_ref().map_err(|e| CliError::Data(e.to_string()))?;
    for path in write_report(&out_dir(c), report, c.format)? {
        writeln!(out, "{}", path.display())?;
    }
    Ok(())
}

fn gen(c: &Common, out: &mut dyn Write) -> CliResult {
    let config = synthetic_config(c)?;
    let ensemble = crate::synthdist::Ensemble::generate(&config)?;
    let hash = config_hash(&json!({ "experiment": "gen", "ensemble": config }));
    let dir = out_dir(c);
    let provenance = json!({
        "config": config,
        "config_hash": hash,
        "seed": config.seed,
        "tool_version": TOOL_VERSION,
        "series": ensemble.len(),
        "papers": ensemble.total_papers(),
    });
    let mut written = Vec::new();
    match c.format {
        Format::Csv => {
            let specs = dir.join(format!("gen_{hash}_specs.csv"));
            let values = dir.join(format!("gen_{hash}_values.csv"));
            let side = dir.join(format!("gen_{hash}.json"));
            write_atomic(&specs, |w| ensemble.write_specs_csv(w).map_err(std::io::Error::other))?;
            write_atomic(&values, |w| ensemble.write_values_csv(w).map_err(std::io::Error::other))?;
            write_json_atomic(&side, &provenance)?;
            written.extend([specs, values, side]);
        }
        Format::Json => {
            let path = dir.join(format!("gen_{hash}.json"));
            let series: Vec<_> = ensemble
                .specs
                .iter()
                .zip(&ensemble.series)
                .map(|(s, v)| json!({ "label": s.label, "mu": s.mu, "sigma": s.sigma, "n": s.n, "values": v.values }))
                .collect();
            let mut doc = provenance;
            doc["ensemble"] = json!(series);
            write_json_atomic(&path, &doc)?;
            written.push(path);
        }
    }
    for p in written {
        writeln!(out, "{}", p.display())?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Corpus helpers

fn meta_path_for(input: &Path) -> Option<PathBuf> {
    let candidates = [input.with_extension("meta.json"), {
        let mut s = input.as_os_str().to_owned();
        s.push(".meta.json");
        PathBuf::from(s)
    }];
    candidates.into_iter().find(|p| p.is_file())
}

struct LoadedCorpus {
    corpus: Corpus,
    sha256: String,
}

fn load_one(c: &Common, input: &Path, err: &mut dyn Write) -> Result<LoadedCorpus, CliError> {
    let meta = match c.meta.clone().or_else(|| meta_path_for(input)) {
        Some(p) => CorpusMeta::load(&p)?,
        None => CorpusMeta::open("unspecified", input.display().to_string()),
    };
    let bytes = std::fs::read(input).map_err(|e| CliError::Data(format!("{}: {e}", input.display())))?;
    let report = load_corpus(input, meta)?;
    for w in &report.warnings {
        writeln!(err, "warning: {}: {w}", input.display())?;
    }
    for e in &report.errors {
        writeln!(err, "{}: {e}", input.display())?;
    }
    if !report.errors.is_empty() && !c.skip_bad_rows {
        return Err(CliError::Data(format!(
            "{}: {} row(s) rejected (use --skip-bad-rows to continue without them)",
            input.display(),
            report.errors.len()
        )));
    }
    Ok(LoadedCorpus {
        corpus: report.corpus,
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

fn single_corpus(c: &Common, err: &mut dyn Write) -> Result<LoadedCorpus, CliError> {
    if c.config.is_some() {
        return Err(CliError::Usage("give either --config or --input, not both".into()));
    }
    match c.input.as_slice() {
        [one] => load_one(c, one, err),
        _ => Err(CliError::Usage("this command takes exactly one --input".into())),
    }
}

fn corpus_rows(c: &Common, loaded: &LoadedCorpus) -> Result<Vec<AssessmentRow>, CliError> {
    let assessor = Assessor::new(&loaded.corpus, params(c)?, c.tie_policy)?;
    let mut rows = assessor.assess(&c.country)?;
    if let Some(kind) = c.split {
        rows.retain(|r| r.split == kind);
    }
    Ok(rows)
}

fn assessment_meta(c: &Common, loaded: &LoadedCorpus) -> Result<AssessmentMeta, CliError> {
    let p = params(c)?;
    let m = &loaded.corpus.meta;
    Ok(AssessmentMeta {
        field: m.field.clone(),
        pub_window: m.pub_window,
        cit_window: m.cit_window,
        source: m.source.clone(),
        input_sha256: loaded.sha256.clone(),
        k: p.k,
        offset: p.offset,
        scale: p.scale,
        tie_policy: c.tie_policy,
        tool_version: TOOL_VERSION.to_string(),
    })
}

/// Stdout, or a named file inside `--out` when given.
fn console_or_file(
    c: &Common,
    name: &str,
    out: &mut dyn Write,
    fill: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> CliResult {
    match &c.out {
        Some(dir) => {
            let path = dir.join(name);
            write_atomic(&path, fill)?;
            writeln!(out, "{}", path.display())?;
        }
        None => fill(out)?,
    }
    Ok(())
}

fn io<E: std::fmt::Display>(e: E) -> std::io::Error {
    std::io::Error::other(e.to_string())
}

// ---------------------------------------------------------------------------
// rank / rk / ptop

fn synthetic_labels(c: &Common, study: &Study) -> Result<Vec<usize>, CliError> {
    if c.label.is_empty() {
        return Ok((0..study.ensemble.len()).collect());
    }
    c.label
        .iter()
        .map(|l| {
            study
                .ensemble
                .index_of(l)
                .ok_or_else(|| CliError::Data(format!("unknown series label {l}")))
        })
        .collect()
}

fn rank(c: &Common, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let mut table: Vec<(String, RankPair)> = Vec::new();
    if c.input.is_empty() {
        let study = study(c)?;
        for idx in synthetic_labels(c, &study)? {
            let top = study.top(idx)?;
            table.extend(top.pairs.into_iter().map(|p| (top.label.clone(), p)));
        }
    } else {
        let loaded = single_corpus(c, err)?;
        let p = params(c)?;
        let assessor = Assessor::new(&loaded.corpus, p, c.tie_policy)?;
        let (_, position) = loaded.corpus.world(c.tie_policy)?;
        let countries = if c.country.is_empty() { loaded.corpus.countries() } else { c.country.clone() };
        for country in countries {
            let split = loaded.corpus.split_country(&country)?;
            for kind in [SplitKind::Domestic, SplitKind::Collaborative] {
                if c.split.is_some_and(|s| s != kind) {
                    continue;
                }
                let label = format!("{country}_{kind}");
                let positions: Vec<usize> = split.get(kind).iter().map(|&i| position[i]).collect();
                let head = assessor.world().unit_top_positions(&positions, p.k);
                let pairs = assessor.world().unit_pairs(&head);
                table.extend(pairs.into_iter().map(|p| (label.clone(), p)));
            }
        }
    }
    console_or_file(c, "rank.csv", out, |w| write_rank_table(&table, w).map_err(io))
}

fn rk(c: &Common, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    if c.input.is_empty() {
        let table = synthetic_table(c, &[])?;
        return write_indicator_table(c, &table, "rk", out);
    }
    let loaded = single_corpus(c, err)?;
    let rows = corpus_rows(c, &loaded)?;
    let share = c.local_share;
    if let Some(s) = share {
        fractional_rk(&dummy_rk(), s).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    console_or_file(c, "rk.csv", out, |w| match share {
        None => write_assessment_rows(&rows, w).map_err(io),
        Some(s) => {
            let mut csv = csv::Writer::from_writer(w);
            csv.write_record(["country", "split", "P", "rk", "local_share", "rk_fractional"])?;
            for r in &rows {
                let (rk, frac) = match &r.rk {
                    Some(rk) => (rk.rk.to_string(), fractional_rk(rk, s).map_err(io)?.to_string()),
                    None => ("insufficient".to_string(), "insufficient".to_string()),
                };
                csv.write_record([r.country.clone(), r.split.to_string(), r.p.to_string(), rk, s.to_string(), frac])?;
            }
            csv.flush()
        }
    })
}

fn dummy_rk() -> crate::indicators::RkResult {
    crate::indicators::RkResult {
        label: String::new(),
        rk: 1.0,
        k: 1,
        offset: 0.0,
        scale: 1.0,
        rank1s: vec![],
    }
}

fn ptop(c: &Common, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    if c.input.is_empty() {
        let table = synthetic_table(c, &c.x)?;
        return write_indicator_table(c, &table, "ptop", out);
    }
    if c.mode == PercentileMode::Analytic {
        return Err(CliError::Usage("analytic percentiles need a synthetic ensemble (--config)".into()));
    }
    let loaded = single_corpus(c, err)?;
    let p = params(c)?;
    let assessor = Assessor::new(&loaded.corpus, p, c.tie_policy)?;
    let (_, position) = loaded.corpus.world(c.tie_policy)?;
    let mut rows = Vec::new();
    for r in corpus_rows(c, &loaded)? {
        let split = loaded.corpus.split_country(&r.country)?;
        let label = format!("{}_{}", r.country, r.split);
        let positions: Vec<usize> = split.get(r.split).iter().map(|&i| position[i]).collect();
        let ptop = c
            .x
            .iter()
            .map(|&x| Ok(empirical_ptop_positions(assessor.world(), &label, &positions, x)?.value))
            .collect::<Result<Vec<f64>, CliError>>()?;
        rows.push(IndicatorRow {
            label,
            p: r.p,
            p0: Some(r.p0),
            ptop,
            rk: r.rk.map(|rk| rk.rk),
        });
    }
    let table = IndicatorTable {
        metadata: IndicatorMeta {
            k: p.k,
            offset: p.offset,
            scale: p.scale,
            tie_policy: c.tie_policy,
            seed: None,
            percentile_mode: PercentileMode::Empirical,
            source: format!("corpus sha256 {}", loaded.sha256),
            config_hash: None,
            tool_version: TOOL_VERSION.to_string(),
            local_share: None,
        },
        xs: c.x.clone(),
        rows,
    };
    write_indicator_table(c, &table, "ptop", out)
}

fn synthetic_table(c: &Common, xs: &[f64]) -> Result<IndicatorTable, CliError> {
    let study = study(c)?;
    let config = &study.ensemble.config;
    if let Some(s) = c.local_share {
        fractional_rk(&dummy_rk(), s).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let mut rows = Vec::new();
    for idx in synthetic_labels(c, &study)? {
        let spec = &study.ensemble.specs[idx];
        let ptop = xs
            .iter()
            .map(|&x| {
                let r = match c.mode {
                    PercentileMode::Empirical => empirical_ptop(&study.world, &spec.label, x)?,
                    PercentileMode::Analytic => analytic_ptop(spec, &study.world, x)?,
                };
                Ok(r.value)
            })
            .collect::<Result<Vec<f64>, CliError>>()?;
        let rk = match study.top(idx) {
            Ok(top) => {
                let r = rk_index(&top, study.params)?;
                Some(match c.local_share {
                    Some(s) => fractional_rk(&r, s)?,
                    None => r.rk,
                })
            }
            Err(ExperimentError::Rank(crate::rankcore::RankError::InsufficientPapers { .. })) => None,
            Err(e) => return Err(e.into()),
        };
        rows.push(IndicatorRow {
            label: spec.label.clone(),
            p: spec.n,
            p0: None,
            ptop,
            rk,
        });
    }
    Ok(IndicatorTable {
        metadata: IndicatorMeta {
            k: study.params.k,
            offset: study.params.offset,
            scale: study.params.scale,
            tie_policy: c.tie_policy,
            seed: Some(config.seed),
            percentile_mode: c.mode,
            source: "synthetic".into(),
            config_hash: Some(config_hash(&json!({ "ensemble": config }))),
            tool_version: TOOL_VERSION.to_string(),
            local_share: c.local_share,
        },
        xs: xs.to_vec(),
        rows,
    })
}

fn write_indicator_table(c: &Common, table: &IndicatorTable, name: &str, out: &mut dyn Write) -> CliResult {
    match c.format {
        Format::Csv => console_or_file(c, &format!("{name}.csv"), out, |w| table.write_csv(w)),
        Format::Json => console_or_file(c, &format!("{name}.json"), out, |w| {
            serde_json::to_writer_pretty(&mut *w, &table.to_json())?;
            w.write_all(b"\n")
        }),
    }
}

// ---------------------------------------------------------------------------
// assess

fn assess(c: &Common, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    if c.config.is_some() {
        return Err(CliError::Usage("assess takes --input, not --config".into()));
    }
    if c.input.is_empty() {
        return Err(CliError::Usage("assess needs at least one --input".into()));
    }
    let p = params(c)?;
    let mut runs = Vec::new();
    for input in &c.input {
        let loaded = load_one(c, input, err)?;
        let rows = corpus_rows(c, &loaded)?;
        let meta = assessment_meta(c, &loaded)?;
        runs.push((loaded, rows, meta));
    }
    let hash = config_hash(&json!({
        "experiment": "assess",
        "inputs": runs.iter().map(|r| &r.0.sha256).collect::<Vec<_>>(),
        "metas": runs.iter().map(|r| &r.0.corpus.meta).collect::<Vec<_>>(),
        "rk": p,
        "tie_policy": c.tie_policy,
        "countries": c.country,
        "split": c.split,
    }));
    let dir = out_dir(c);
    let mut written = Vec::new();
    for (i, (_, rows, meta)) in runs.iter().enumerate() {
        let stem = if runs.len() == 1 {
            format!("assess_{hash}")
        } else {
            format!("assess_{hash}_{}", i + 1)
        };
        match c.format {
            Format::Csv => {
                let path = dir.join(format!("{stem}.csv"));
                write_atomic(&path, |w| write_assessment_table(rows, Some(meta), w).map_err(io))?;
                written.push(path);
            }
            Format::Json => {
                let path = dir.join(format!("{stem}.json"));
                write_json_atomic(&path, &json!({ "metadata": meta, "rows": rows }))?;
                written.push(path);
            }
        }
    }
    if runs.len() > 1 {
        let windows: Vec<(String, Vec<AssessmentRow>)> = runs
            .iter()
            .map(|(l, rows, _)| {
                let w = l.corpus.meta.pub_window;
                let label = if w[0] == i32::MIN { l.corpus.meta.source.clone() } else { format!("{}-{}", w[0], w[1]) };
                (label, rows.clone())
            })
            .collect();
        let path = dir.join(format!("assess_{hash}_temporal.csv"));
        write_atomic(&path, |w| write_temporal_table(&windows, w).map_err(io))?;
        written.push(path);
    }
    for p in written {
        writeln!(out, "{}", p.display())?;
    }
    Ok(())
}
