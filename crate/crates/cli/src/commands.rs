//! Subcommand implementations. Each reads its inputs, writes its artifacts
//! into the output location and leaves a manifest beside them.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;
use valueprobe::baseline::instrument_baseline;
use valueprobe::generator::{parse_corpus, run_probes, CorpusSummary, GenerationConfig, GenerationError};
use valueprobe::lexicon::{parse_lexicon, Lexicon};
use valueprobe::matrix::{aggregate_matrix, build_count_matrix, CountMatrix};
use valueprobe::metrics::{
    category_frequency_stats, compute_metrics, frequency_regression, parse_unigram_csv, CategoryFrequency,
    MetricTable, RegressionResult,
};
use valueprobe::mock::{MockOptions, MockServer};
use valueprobe::probes::{build_probes, ProbeKind, ValueSpec, DEFAULT_CIRCLE_ORDER};
use valueprobe::report;
use valueprobe::structure::{structure_report, MdsOptions, StructureOptions, StructureReport};

use crate::args::{
    BaselineInstrumentArgs, BaselineWordfreqArgs, GenerateArgs, MetricsArgs, ReportArgs, ScoreArgs, ServeMockArgs,
    StructureArgs,
};
use crate::error::{Classify, CliError, CliResult, Failure};
use crate::manifest::{manifest_for_file, Run};

/// Metrics output as stored in `metrics.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsDocument {
    pub label: String,
    pub manifest: String,
    pub circle_order: Vec<String>,
    pub aggregated_input: bool,
    pub metrics: MetricTable,
    pub regression: Option<RegressionResult>,
}

/// Structure output as stored in `structure.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureDocument {
    pub label: String,
    pub manifest: String,
    pub circle_order: Vec<String>,
    pub structure: StructureReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct WordfreqDocument {
    pub manifest: String,
    pub categories: Vec<CategoryFrequency>,
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable output") + "\n"
}

fn manifest_name(subcommand: &str) -> String {
    format!("{subcommand}.manifest.json")
}

fn file_stem(p: &Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "matrix".into())
}

fn safe_name(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect()
}

fn load_spec(run: &mut Run, path: &Path) -> CliResult<ValueSpec> {
    let text = run.read(path)?;
    ValueSpec::from_json(&text).classify(Failure::Validation, format!("invalid value spec {}", path.display()))
}

fn load_lexicon(run: &mut Run, path: &Path) -> CliResult<Lexicon> {
    let text = run.read(path)?;
    parse_lexicon(&text).classify(Failure::Validation, format!("invalid dictionary {}", path.display()))
}

fn circle_of(spec: Option<&ValueSpec>) -> Vec<String> {
    match spec {
        Some(s) => s.circle_order.clone(),
        None => DEFAULT_CIRCLE_ORDER.iter().map(|s| s.to_string()).collect(),
    }
}

/// Reads a count matrix and puts its columns into circle order.
fn load_matrix(run: &mut Run, path: &Path, spec: Option<&ValueSpec>) -> CliResult<CountMatrix> {
    let text = run.read(path)?;
    let m = match spec {
        Some(s) => CountMatrix::from_csv_with_spec(&text, s),
        None => CountMatrix::from_csv(&text),
    }
    .classify(Failure::Validation, format!("invalid count matrix {}", path.display()))?;
    m.with_column_order(&circle_of(spec))
        .classify(Failure::Validation, format!("columns of {} do not match the circle order", path.display()))
}

fn runtime() -> CliResult<tokio::runtime::Runtime> {
    tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .classify(Failure::Io, "starting async runtime")
}

pub fn generation_config(args: &GenerateArgs, run: &mut Run) -> CliResult<GenerationConfig> {
    let mut config = match &args.config {
        Some(p) => {
            let text = run.read(p)?;
            serde_json::from_str(&text).classify(Failure::Config, format!("invalid generation config {}", p.display()))?
        }
        None => GenerationConfig::default(),
    };
    if let Some(v) = args.runs {
        config.runs_per_prompt = v;
    }
    if let Some(v) = &args.model {
        config.model = v.clone();
    }
    if let Some(v) = args.max_tokens {
        config.max_tokens = v;
    }
    if let Some(v) = args.temperature {
        config.temperature = v;
    }
    if let Some(v) = args.top_p {
        config.top_p = v;
    }
    if let Some(v) = &args.base_url {
        config.base_url = v.clone();
    }
    if let Some(v) = args.max_in_flight {
        config.max_in_flight = v;
    }
    config.validate().map_err(|e| CliError::new(Failure::Config, e))?;
    Ok(config)
}

/// Writes the corpus only once generation has finished, so an aborted run
/// leaves no file behind.
pub fn cmd_generate(args: &GenerateArgs, api_key: Option<&str>) -> CliResult<CorpusSummary> {
    let kind: ProbeKind = args.kind.into();
    let key = api_key
        .filter(|k| !k.trim().is_empty())
        .ok_or_else(|| CliError::msg(Failure::Config, format!("{} is not set", valueprobe::generator::API_KEY_ENV)))?;
    let mut run = Run::start("generate", json!({}));
    let spec = load_spec(&mut run, &args.spec)?;
    let config = generation_config(args, &mut run)?;
    let probes = build_probes(&spec, kind).classify(Failure::Config, "building probes")?;

    let mut buf = Vec::new();
    let summary = runtime()?
        .block_on(run_probes(&probes, &config, key, &mut buf))
        .map_err(|e| match e {
            GenerationError::Config(_) | GenerationError::Auth { .. } => CliError::new(Failure::Config, e),
            GenerationError::Client(_) => CliError::new(Failure::Network, e),
            GenerationError::Io(_) => CliError::new(Failure::Io, e),
        })?;
    run.set_config(json!({ "kind": kind, "spec": args.spec, "generation": config }));
    run.write(&args.out, &buf)?;
    run.finish(&manifest_for_file(&args.out))?;
    if summary.failed > 0 {
        return Err(CliError::msg(
            Failure::Network,
            format!("{} of {} requests failed; see the failed records in {}", summary.failed, summary.requested, args.out.display()),
        ));
    }
    Ok(summary)
}

pub fn cmd_score(args: &ScoreArgs) -> CliResult<CountMatrix> {
    let mut run = Run::start(
        "score",
        json!({ "corpus": args.corpus, "dict": args.dict, "spec": args.spec }),
    );
    let corpus_text = run.read(&args.corpus)?;
    let records = parse_corpus(&corpus_text).classify(Failure::Validation, format!("invalid corpus {}", args.corpus.display()))?;
    let lexicon = load_lexicon(&mut run, &args.dict)?;
    let spec = load_spec(&mut run, &args.spec)?;
    if let Some(first) = records.first() {
        if let Some(other) = records.iter().find(|r| r.probe_kind != first.probe_kind) {
            return Err(CliError::msg(
                Failure::Validation,
                format!("corpus mixes probe kinds '{}' and '{}'", first.probe_kind, other.probe_kind),
            ));
        }
    }
    let failed = records.iter().filter(|r| !r.is_ok()).count();
    if failed > 0 {
        log::warn!("skipping {failed} failed records");
    }
    let docs = records
        .iter()
        .filter(|r| r.is_ok())
        .map(|r| (r.fine_type_id.as_str(), r.cleaned_text.as_str()));
    let m = build_count_matrix(docs, &lexicon, &spec).classify(Failure::Validation, "scoring corpus")?;
    run.write(&args.out.join("counts.csv"), m.to_csv_string())?;
    run.write(&args.out.join("counts_aggregated.csv"), aggregate_matrix(&m).to_csv_string())?;
    run.finish(&args.out.join(manifest_name("score")))?;
    Ok(m)
}

/// Reads a `value,<predictor>...` table and aligns it with `values`.
fn load_predictors(run: &mut Run, path: &Path, values: &[String]) -> CliResult<Vec<(String, Vec<f64>)>> {
    let text = run.read(path)?;
    let bad = |m: String| CliError::msg(Failure::Validation, format!("{}: {m}", path.display()));
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    if headers.len() < 2 {
        return Err(bad("expected a value column and at least one predictor column".into()));
    }
    let names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let mut by_value = std::collections::HashMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let row: Vec<f64> = rec
            .iter()
            .skip(1)
            .map(|v| v.parse::<f64>().map_err(|_| bad(format!("line {line}: '{v}' is not a number"))))
            .collect::<Result<_, _>>()?;
        if row.len() != names.len() {
            return Err(bad(format!("line {line}: expected {} predictor values", names.len())));
        }
        by_value.insert(rec[0].to_string(), row);
    }
    let missing: Vec<&String> = values.iter().filter(|v| !by_value.contains_key(*v)).collect();
    if !missing.is_empty() {
        return Err(bad(format!("no predictor values for {missing:?}")));
    }
    Ok(names
        .iter()
        .enumerate()
        .map(|(j, n)| (n.clone(), values.iter().map(|v| by_value[v][j]).collect()))
        .collect())
}

pub fn cmd_metrics(args: &MetricsArgs) -> CliResult<MetricsDocument> {
    let mut run = Run::start(
        "metrics",
        json!({ "counts": args.counts, "spec": args.spec, "predictors": args.predictors, "label": args.label }),
    );
    let spec = args.spec.as_ref().map(|p| load_spec(&mut run, p)).transpose()?;
    let m = load_matrix(&mut run, &args.counts, spec.as_ref())?;
    let circle = circle_of(spec.as_ref());
    let table = compute_metrics(&m, &circle);
    let regression = match &args.predictors {
        Some(p) => {
            let predictors = load_predictors(&mut run, p, m.col_labels())?;
            let outcome: Vec<f64> = m.column_totals().iter().map(|&t| t as f64).collect();
            Some(frequency_regression(&outcome, &predictors).classify(Failure::Validation, "frequency regression")?)
        }
        None => None,
    };
    let out = &args.out;
    run.write(&out.join("concept.csv"), report::concept_csv(&table, None))?;
    run.write(&out.join("concept_rounded.csv"), report::concept_csv(&table, Some(2)))?;
    run.write(&out.join("discriminant.csv"), report::discriminant_csv(&table, None))?;
    run.write(&out.join("discriminant_rounded.csv"), report::discriminant_csv(&table, Some(2)))?;
    if let Some(r) = &regression {
        run.write(&out.join("regression.csv"), report::regression_csv(r, None))?;
        run.write(&out.join("regression_rounded.csv"), report::regression_csv(r, Some(2)))?;
    }
    let doc = MetricsDocument {
        label: args.label.clone().unwrap_or_else(|| file_stem(&args.counts)),
        manifest: manifest_name("metrics"),
        circle_order: circle,
        aggregated_input: m.is_aggregated(),
        metrics: table,
        regression,
    };
    run.write(&out.join("metrics.json"), pretty(&doc))?;
    run.finish(&out.join(manifest_name("metrics")))?;
    Ok(doc)
}

pub fn cmd_structure(args: &StructureArgs) -> CliResult<StructureDocument> {
    let opts = StructureOptions {
        correlation: args.correlation.into(),
        dissimilarity: args.dissimilarity.into(),
        mds: MdsOptions { random_starts: args.random_starts, seed: args.seed, ..MdsOptions::default() },
    };
    let mut run = Run::start("structure", json!({ "counts": args.counts, "spec": args.spec, "options": opts }));
    let spec = args.spec.as_ref().map(|p| load_spec(&mut run, p)).transpose()?;
    let m = load_matrix(&mut run, &args.counts, spec.as_ref())?;
    let agg = if m.is_aggregated() { m } else { aggregate_matrix(&m) };
    let circle = circle_of(spec.as_ref());
    let rep = structure_report(&agg, &circle, &opts).classify(Failure::Validation, "structural analysis")?;

    let mut coords = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::new(Failure::Io, e);
    coords.write_record(["value", "mds_x", "mds_y", "fitted_x", "fitted_y", "target_x", "target_y"]).map_err(io)?;
    for (i, label) in rep.configuration.labels.iter().enumerate() {
        let c = &rep.configuration.coords[i];
        let f = &rep.fit.fitted[i];
        let t = rep.target[i];
        let cells = [c[0], c[1], f[0], f[1], t[0], t[1]].map(|v| v.to_string());
        coords.write_record(std::iter::once(label.clone()).chain(cells)).map_err(io)?;
    }
    let coords = coords.into_inner().map_err(|e| CliError::msg(Failure::Io, e))?;

    let doc = StructureDocument {
        label: file_stem(&args.counts),
        manifest: manifest_name("structure"),
        circle_order: circle,
        structure: rep,
    };
    run.write(&args.out.join("structure.json"), pretty(&doc))?;
    run.write(&args.out.join("structure_coordinates.csv"), coords)?;
    run.write(&args.out.join("structure.svg"), report::structure_svg(&doc.structure))?;
    run.finish(&args.out.join(manifest_name("structure")))?;
    Ok(doc)
}

pub fn cmd_baseline_instrument(args: &BaselineInstrumentArgs) -> CliResult<()> {
    let mut run = Run::start("baseline-instrument", json!({ "spec": args.spec, "dict": args.dict }));
    let spec = load_spec(&mut run, &args.spec)?;
    let lexicon = load_lexicon(&mut run, &args.dict)?;
    let b = instrument_baseline(&spec, &lexicon).classify(Failure::Validation, "scoring instrument items")?;

    let cats: Vec<String> = lexicon.categories().iter().map(|c| c.name.clone()).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::new(Failure::Io, e);
    let mut header = vec!["fine_type".to_string(), "item".into(), "parent".into()];
    header.extend(cats.iter().cloned());
    header.extend(["matches".to_string(), "mismatches".into()]);
    w.write_record(&header).map_err(io)?;
    let join = |ms: &[valueprobe::baseline::TokenMatch]| {
        ms.iter().map(|m| format!("{}:{}", m.token, m.categories.join("|"))).collect::<Vec<_>>().join(" ")
    };
    for item in &b.items {
        let mut row = vec![item.fine_type_id.clone(), (item.item_index + 1).to_string(), item.parent.clone()];
        row.extend(cats.iter().map(|c| item.counts.get(c).copied().unwrap_or(0).to_string()));
        row.push(join(&item.matches));
        row.push(join(&item.mismatches));
        w.write_record(&row).map_err(io)?;
    }
    let items_csv = w.into_inner().map_err(|e| CliError::msg(Failure::Io, e))?;

    run.write(&args.out.join("instrument_items.csv"), items_csv)?;
    run.write(&args.out.join("instrument_counts.csv"), b.matrix.to_csv_string())?;
    run.write(&args.out.join("instrument_counts_aggregated.csv"), b.aggregated.to_csv_string())?;
    let doc = json!({ "manifest": manifest_name("baseline-instrument"), "baseline": b });
    run.write(&args.out.join("instrument.json"), pretty(&doc))?;
    run.finish(&args.out.join(manifest_name("baseline-instrument")))?;
    Ok(())
}

pub fn cmd_baseline_wordfreq(args: &BaselineWordfreqArgs) -> CliResult<Vec<CategoryFrequency>> {
    let mut run = Run::start("baseline-wordfreq", json!({ "dict": args.dict, "unigrams": args.unigrams }));
    let lexicon = load_lexicon(&mut run, &args.dict)?;
    let text = run.read(&args.unigrams)?;
    let table = parse_unigram_csv(&text).classify(Failure::Validation, format!("invalid unigram table {}", args.unigrams.display()))?;
    let stats = category_frequency_stats(&lexicon, &table);
    for c in stats.iter().filter(|c| c.matched == 0) {
        log::warn!("category {} has no term in the unigram table", c.category);
    }
    run.write(&args.out.join("wordfreq.csv"), report::wordfreq_csv(&stats, None))?;
    run.write(&args.out.join("wordfreq_rounded.csv"), report::wordfreq_csv(&stats, Some(2)))?;
    let doc = WordfreqDocument { manifest: manifest_name("baseline-wordfreq"), categories: stats };
    run.write(&args.out.join("wordfreq.json"), pretty(&doc))?;
    run.finish(&args.out.join(manifest_name("baseline-wordfreq")))?;
    Ok(doc.categories)
}

fn parse_json_file<T: for<'de> Deserialize<'de>>(run: &mut Run, path: &Path) -> CliResult<T> {
    let text = run.read(path)?;
    serde_json::from_str(&text).classify(Failure::Validation, format!("invalid JSON in {}", path.display()))
}

pub fn cmd_report(args: &ReportArgs) -> CliResult<Vec<PathBuf>> {
    if args.metrics.is_empty() && args.structure.is_none() {
        return Err(CliError::msg(Failure::Config, "report needs --metrics and/or --structure"));
    }
    let mut run = Run::start("report", json!({ "metrics": args.metrics, "structure": args.structure }));
    let docs: Vec<MetricsDocument> = args
        .metrics
        .iter()
        .map(|p| parse_json_file(&mut run, p))
        .collect::<Result<_, _>>()?;
    let structure: Option<StructureDocument> = args.structure.as_ref().map(|p| parse_json_file(&mut run, p)).transpose()?;

    for d in &docs {
        let bars: Vec<(String, f64)> = d.metrics.columns.iter().map(|c| (c.column.clone(), c.total as f64)).collect();
        let svg = report::bar_chart_svg(&format!("Dictionary counts per value: {}", d.label), &bars);
        run.write(&args.out.join(format!("{}_counts.svg", safe_name(&d.label))), svg)?;
    }
    if let Some(s) = &structure {
        run.write(&args.out.join("structure.svg"), report::structure_svg(&s.structure))?;
    }
    let tables: Vec<(String, &MetricTable)> = docs.iter().map(|d| (d.label.clone(), &d.metrics)).collect();
    run.write(&args.out.join("summary.txt"), report::summary_text(&tables, structure.as_ref().map(|s| &s.structure)))?;
    let written = run.outputs().iter().map(|f| PathBuf::from(&f.path)).collect();
    run.finish(&args.out.join(manifest_name("report")))?;
    Ok(written)
}

pub fn cmd_serve_mock(args: &ServeMockArgs) -> CliResult<()> {
    let rt = runtime()?;
    rt.block_on(async {
        let opts = MockOptions { api_key: args.api_key.clone(), ..Default::default() };
        let addr = std::net::SocketAddr::from(([127, 0, 0, 1], args.port));
        let server = MockServer::bind(addr, opts).await.classify(Failure::Io, format!("binding {addr}"))?;
        println!("mock chat-completions endpoint at {}", server.base_url());
        server.wait().await;
        Ok(())
    })
}
