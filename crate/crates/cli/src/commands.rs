use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use log::{info, warn};
use serde::Serialize;

use menzerath_core::analysis::{self, read_clause_rows, records_to_tsv, Lexicons};
use menzerath_core::ingest::{read_raw_bytes, read_tagged_bytes, write_vertical};
use menzerath_core::{
    aggregate::Accumulator, evaluate_counts, fit_mal, fit_negbin_with, predicted_counts, split_sentences,
    split_tagged, AggregateTable, EvaluationReport, InputMode, Lexicon, MalFit, MeanMode, NegBinFit,
    NegBinMethod, Sentence, SentenceRecord, Target, Weighting,
};

use crate::config::{ensure_writable, read_input, read_text, write_file, Format, Mode, RunConfig};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Emits `contents` to `out/name`, or to standard output without `--out`.
fn emit(out: Option<&Path>, name: &str, contents: &str) -> Result<()> {
    match out {
        Some(dir) => write_file(&dir.join(name), contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "input".to_string())
}

fn check_out(config: &RunConfig) -> Result<()> {
    if let Some(dir) = &config.out {
        ensure_writable(dir)?;
    }
    Ok(())
}

/// Raw text in, vertical format with blank-line sentence boundaries out.
pub fn cmd_segment(config: &RunConfig) -> Result<()> {
    check_out(config)?;
    for path in &config.inputs {
        let bytes = read_input(path)?;
        let tokens = read_raw_bytes(&bytes).with_context(|| path.display().to_string())?;
        let sentences = split_sentences(&tokens);
        let vertical = write_vertical(sentences.iter().map(|s| s.tokens.as_slice()));
        emit(config.out.as_deref(), &format!("{}.vert", stem(path)), &vertical)?;
        info!("{}: {} sentences", path.display(), sentences.len());
    }
    Ok(())
}

fn load_lexicon(path: Option<&Path>) -> Result<Lexicon> {
    match path {
        Some(p) => Ok(Lexicon::parse(&read_text(p).context("lexicon")?)),
        None => Ok(Lexicon::default_predicatives()),
    }
}

/// Reads and segments every input as one corpus; indices run across files.
pub fn load_sentences(inputs: &[PathBuf], mode: Mode) -> Result<Vec<Sentence>> {
    let mut all = Vec::new();
    for path in inputs {
        let bytes = read_input(path)?;
        let sentences = match mode {
            Mode::Raw => split_sentences(&read_raw_bytes(&bytes).with_context(|| path.display().to_string())?),
            Mode::Tagged => {
                let stream = read_tagged_bytes(&bytes).with_context(|| path.display().to_string())?;
                for w in &stream.warnings {
                    warn!("{}: {w}", path.display());
                }
                split_tagged(&stream)
            }
        };
        all.extend(sentences);
    }
    for (i, s) in all.iter_mut().enumerate() {
        s.index = i;
    }
    Ok(all)
}

#[derive(Debug, Clone)]
pub struct AnalyzeOutput {
    pub records: Vec<SentenceRecord>,
    pub table: AggregateTable,
}

pub fn analyze_inputs(config: &RunConfig, mean: MeanMode) -> Result<AnalyzeOutput> {
    let lexicons = Lexicons {
        predicatives: load_lexicon(config.lexicon.as_deref())?,
        conjunctions: Lexicon::default_conjunctions(),
    };
    if config.mode == Mode::Raw {
        warn!("raw mode: verb, participle and predicative counts need tagged input; clause counts are a lower bound from comma+conjunction pairs only");
    }
    let sentences = load_sentences(&config.inputs, config.mode)?;
    let records = analysis::analyze(&sentences, InputMode::from(config.mode), &lexicons);
    let mut acc = Accumulator::new();
    for r in &records {
        acc.push(r.lengths());
    }
    let numbers: u32 = records.iter().map(|r| r.numbers).sum();
    if numbers > 0 {
        info!("{numbers} digit-only tokens counted as words with 0 syllables");
    }
    Ok(AnalyzeOutput {
        records,
        table: acc.finish(mean),
    })
}

/// Writes `sentences.tsv` and `table.tsv` (or `table.json`) into the output
/// directory, current directory by default.
pub fn cmd_analyze(config: &RunConfig, mean: MeanMode) -> Result<AnalyzeOutput> {
    let out = config.out.clone().unwrap_or_else(|| PathBuf::from("."));
    ensure_writable(&out)?;
    let result = analyze_inputs(config, mean)?;
    write_file(&out.join("sentences.tsv"), &records_to_tsv(&result.records))?;
    let table = match config.format {
        Format::Tsv => result.table.to_tsv(),
        Format::Json => result.table.to_json() + "\n",
    };
    write_file(&out.join(format!("table.{}", config.format.extension())), &table)?;
    info!(
        "{} sentences, {} clause-count rows",
        result.table.total_sentences,
        result.table.rows.len()
    );
    Ok(result)
}

pub fn load_table(path: &Path) -> Result<AggregateTable> {
    let text = read_text(path)?;
    AggregateTable::parse(&text).with_context(|| format!("cannot parse table {}", path.display()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub schema_version: u32,
    pub total_sentences: u64,
    pub chi2_definition: ChiSquareDefinition,
    pub words: MalFit,
    pub syllables: MalFit,
    pub sentences: NegBinFit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquareDefinition {
    pub clause_length: &'static str,
    pub sentences: &'static str,
}

impl ChiSquareDefinition {
    fn new(weighting: Weighting) -> Self {
        ChiSquareDefinition {
            clause_length: match weighting {
                Weighting::Count => "sum over rows with sentences of (n_x/total)*(observed-estimated)^2, divided by the number of such rows",
                Weighting::Uniform => "sum over rows with sentences of (observed-estimated)^2, divided by the number of such rows",
            },
            sentences: "sum over rows with sentences of (n_x/total - pmf(x))^2, divided by the number of such rows",
        }
    }
}

pub fn fit_table(table: &AggregateTable, weighting: Weighting, method: NegBinMethod) -> Result<FitReport> {
    Ok(FitReport {
        schema_version: REPORT_SCHEMA_VERSION,
        total_sentences: table.total_sentences,
        chi2_definition: ChiSquareDefinition::new(weighting),
        words: fit_mal(table, Target::Words, weighting).context("fitting clause length in words")?,
        syllables: fit_mal(table, Target::Syllables, weighting).context("fitting clause length in syllables")?,
        sentences: fit_negbin_with(table, method).context("fitting sentence counts")?,
    })
}

fn plot_tsv(rows: impl Iterator<Item = (u32, f64, f64)>) -> String {
    let mut out = String::from("x\tobserved\testimated\n");
    for (x, obs, est) in rows {
        let _ = writeln!(out, "{x}\t{obs}\t{est}");
    }
    out
}

fn curve_plot(table: &AggregateTable, fit: &MalFit) -> String {
    plot_tsv(table.rows.iter().map(|r| {
        let obs = match fit.target {
            Target::Words => r.mean_words,
            Target::Syllables => r.mean_syllables,
        };
        (r.x, obs, fit.params.value_at(f64::from(r.x)))
    }))
}

fn sentence_plot(table: &AggregateTable, fit: &NegBinFit) -> Result<String> {
    let x_max = table.rows.len() as u32;
    let est = predicted_counts(&fit.params, table.total_sentences as f64, x_max)?;
    Ok(plot_tsv(
        table.rows.iter().zip(est).map(|(r, e)| (r.x, r.sentences as f64, e)),
    ))
}

/// Fits both curves and the sentence distribution; writes `fit.json` and the
/// three plot-data files.
pub fn cmd_fit(table_path: &Path, config: &RunConfig, method: NegBinMethod) -> Result<FitReport> {
    let out = config.out.clone().unwrap_or_else(|| PathBuf::from("."));
    ensure_writable(&out)?;
    let table = load_table(table_path)?;
    let report = fit_table(&table, config.weighting.into(), method)?;
    let json = serde_json::to_string_pretty(&report)? + "\n";
    write_file(&out.join("fit.json"), &json)?;
    write_file(&out.join("plot_words.tsv"), &curve_plot(&table, &report.words))?;
    write_file(&out.join("plot_syllables.tsv"), &curve_plot(&table, &report.syllables))?;
    write_file(&out.join("plot_sentences.tsv"), &sentence_plot(&table, &report.sentences)?)?;
    info!(
        "words A={:.3} b={:.3} c={:.3}; syllables A={:.3} b={:.3} c={:.3}; p={:.4} r={:.4}",
        report.words.params.a,
        report.words.params.b,
        report.words.params.c,
        report.syllables.params.a,
        report.syllables.params.b,
        report.syllables.params.c,
        report.sentences.params.p,
        report.sentences.params.r,
    );
    Ok(report)
}

/// Aligns gold clause counts with the automatic per-sentence file.
pub fn evaluate_files(gold_path: &Path, auto_path: &Path) -> Result<EvaluationReport> {
    let gold = read_clause_rows(&read_text(gold_path)?).with_context(|| gold_path.display().to_string())?;
    let auto = read_clause_rows(&read_text(auto_path)?).with_context(|| auto_path.display().to_string())?;
    if gold.len() != auto.len() {
        bail!(
            "cannot align {} gold sentences with {} automatic sentences",
            gold.len(),
            auto.len()
        );
    }
    let mut words = Vec::with_capacity(auto.len());
    for (g, a) in gold.iter().zip(&auto) {
        if g.index != a.index {
            bail!("sentence index mismatch: gold {} vs automatic {}", g.index, a.index);
        }
        let w = a
            .words
            .or(g.words)
            .ok_or_else(|| anyhow!("sentence {}: no word count in either file", a.index))?;
        words.push(w);
    }
    let gold_counts: Vec<u32> = gold.iter().map(|r| r.clauses).collect();
    let auto_counts: Vec<u32> = auto.iter().map(|r| r.clauses).collect();
    Ok(evaluate_counts(&gold_counts, &auto_counts, &words)?)
}

#[derive(Serialize)]
struct EvaluationJson<'a> {
    schema_version: u32,
    #[serde(flatten)]
    report: &'a EvaluationReport,
}

pub fn evaluation_to_tsv(report: &EvaluationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# sentences\t{}", report.sentences);
    let _ = writeln!(out, "# mismatches\t{}", report.mismatches);
    let _ = writeln!(out, "# mismatch_fraction\t{}", report.mismatch_fraction);
    out.push_str("x\tgold_mean_words\tauto_mean_words\tgold_sentences\tauto_sentences\n");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{}\t{:.2}\t{:.2}\t{}\t{}",
            r.x, r.gold_mean_words, r.auto_mean_words, r.gold_sentences, r.auto_sentences
        );
    }
    out
}

/// Manual-vs-automatic comparison in the layout of a clauses-per-sentence
/// table, plus the mismatch fraction.
pub fn cmd_evaluate(config: &RunConfig, gold_path: &Path) -> Result<EvaluationReport> {
    check_out(config)?;
    let [auto_path] = config.inputs.as_slice() else {
        bail!("evaluate takes exactly one automatic per-sentence file");
    };
    let report = evaluate_files(gold_path, auto_path)?;
    let contents = match config.format {
        Format::Tsv => evaluation_to_tsv(&report),
        Format::Json => {
            serde_json::to_string_pretty(&EvaluationJson {
                schema_version: REPORT_SCHEMA_VERSION,
                report: &report,
            })? + "\n"
        }
    };
    emit(
        config.out.as_deref(),
        &format!("evaluation.{}", config.format.extension()),
        &contents,
    )?;
    info!(
        "{} of {} sentences differ ({:.1}%)",
        report.mismatches,
        report.sentences,
        100.0 * report.mismatch_fraction
    );
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub x: u32,
    pub words_observed: f64,
    pub words_estimated: Option<f64>,
    pub syllables_observed: f64,
    pub syllables_estimated: Option<f64>,
    pub sentences_observed: u64,
    pub sentences_estimated: Option<f64>,
}

pub fn report_rows(table: &AggregateTable, fit: Option<&FitReport>) -> Result<Vec<ReportRow>> {
    let predicted = match fit {
        Some(f) => Some(predicted_counts(
            &f.sentences.params,
            table.total_sentences as f64,
            table.rows.len() as u32,
        )?),
        None => None,
    };
    Ok(table
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let x = f64::from(r.x);
            ReportRow {
                x: r.x,
                words_observed: r.mean_words,
                words_estimated: fit.map(|f| f.words.params.value_at(x)),
                syllables_observed: r.mean_syllables,
                syllables_estimated: fit.map(|f| f.syllables.params.value_at(x)),
                sentences_observed: r.sentences,
                sentences_estimated: predicted.as_ref().map(|p| p[i]),
            }
        })
        .collect())
}

pub fn report_to_tsv(rows: &[ReportRow], with_estimates: bool) -> String {
    let mut out = String::new();
    if with_estimates {
        out.push_str("x\twords_observed\twords_estimated\tsyllables_observed\tsyllables_estimated\tsentences_observed\tsentences_estimated\n");
    } else {
        out.push_str("x\twords_observed\tsyllables_observed\tsentences_observed\n");
    }
    for r in rows {
        match (r.words_estimated, r.syllables_estimated, r.sentences_estimated) {
            (Some(we), Some(se), Some(ne)) if with_estimates => {
                let _ = writeln!(
                    out,
                    "{}\t{:.2}\t{:.2}\t{:.2}\t{:.2}\t{}\t{:.2}",
                    r.x, r.words_observed, we, r.syllables_observed, se, r.sentences_observed, ne
                );
            }
            _ => {
                let _ = writeln!(
                    out,
                    "{}\t{:.2}\t{:.2}\t{}",
                    r.x, r.words_observed, r.syllables_observed, r.sentences_observed
                );
            }
        }
    }
    out
}

/// Prints the table in observed/estimated column order; estimates are added
/// when `estimate` is set.
pub fn cmd_report(
    table_path: &Path,
    config: &RunConfig,
    estimate: bool,
    method: NegBinMethod,
) -> Result<Vec<ReportRow>> {
    check_out(config)?;
    let table = load_table(table_path)?;
    let fit = if estimate {
        Some(fit_table(&table, config.weighting.into(), method)?)
    } else {
        None
    };
    let rows = report_rows(&table, fit.as_ref())?;
    let contents = match config.format {
        Format::Tsv => report_to_tsv(&rows, estimate),
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                schema_version: u32,
                total_sentences: u64,
                rows: &'a [ReportRow],
            }
            serde_json::to_string_pretty(&Doc {
                schema_version: REPORT_SCHEMA_VERSION,
                total_sentences: table.total_sentences,
                rows: &rows,
            })? + "\n"
        }
    };
    emit(
        config.out.as_deref(),
        &format!("report.{}", config.format.extension()),
        &contents,
    )?;
    Ok(rows)
}
