//! The `adaptscore` command line.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 bad input data
//! or file format, 3 a numeric precondition failed (degenerate class, zero
//! vector, too few samples, ...).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::embed::LabeledEmbeddingSet;
use crate::error::{Error, ErrorCategory, Result};
use crate::eval::{correlate, subsample_study, CorrelationResult, SubsampleStudyResult};
use crate::io::{load_embeddings, load_labels, save_embeddings, save_labels};
use crate::manifest::{build_report, load_source, load_target, Manifest, Report, ScoringOptions};
use crate::method::Method;
use crate::synth::{generate_pair, SynthConfig};

pub const THREADS_ENV: &str = "ADAPTSCORE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "adaptscore", version, about = "Score source models for unsupervised domain adaptation")]
struct Cli {
    /// Print results and errors as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score one source/target pair with one method.
    Score {
        #[arg(long, default_value = "pas")]
        method: Method,
        #[arg(long)]
        source_emb: PathBuf,
        #[arg(long)]
        source_labels: PathBuf,
        #[arg(long)]
        target_emb: PathBuf,
        /// Only read by the oracle method.
        #[arg(long)]
        target_labels: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Per-domain sample cap for MMD.
        #[arg(long)]
        max_samples: Option<usize>,
    },
    /// Score and rank every candidate in a manifest.
    Rank {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write per-sample breakdowns to this file.
        #[arg(long)]
        breakdowns: Option<PathBuf>,
    },
    /// Correlate report scores with measured accuracies.
    Corr {
        #[arg(long)]
        report: PathBuf,
        /// CSV of `candidate_id,accuracy`; a header line is allowed.
        #[arg(long)]
        accuracy: PathBuf,
    },
    /// Generate a synthetic source/target pair.
    Synth {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Write CSV/text instead of binary files.
        #[arg(long)]
        csv: bool,
    },
    /// Check whether the PAS ranking survives subsampling.
    Substudy {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.25, 0.5, 1.0])]
        fractions: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        repeats: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

pub fn exit_code(e: &Error) -> i32 {
    match e.category() {
        ErrorCategory::Usage => 1,
        ErrorCategory::Data => 2,
        ErrorCategory::Precondition => 3,
    }
}

/// Caps the global rayon pool from `ADAPTSCORE_THREADS`, if set.
pub fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            // Fails only if the pool was already built, which is harmless.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

#[derive(Serialize)]
struct ErrorJson<'a> {
    error: &'a str,
    message: String,
    exit_code: i32,
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return 0;
            }
            if args.iter().any(|a| a == "--json") {
                let j = ErrorJson { error: "Usage", message: e.to_string(), exit_code: 1 };
                let _ = writeln!(err, "{}", serde_json::to_string(&j).unwrap_or_default());
            } else {
                let _ = write!(err, "{}", e.render());
            }
            return 1;
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let code = exit_code(&e);
            if cli.json {
                let j = ErrorJson { error: e.kind(), message: e.to_string(), exit_code: code };
                let _ = writeln!(err, "{}", serde_json::to_string(&j).unwrap_or_default());
            } else {
                let _ = writeln!(err, "error: {e}");
            }
            code
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))
}

fn pretty<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Score {
            method,
            source_emb,
            source_labels,
            target_emb,
            target_labels,
            seed,
            max_samples,
        } => {
            let source = LabeledEmbeddingSet::with_inferred_classes(
                load_embeddings(source_emb)?,
                load_labels(source_labels)?,
            )?;
            let spec =
                crate::manifest::TargetSpec::File { emb: target_emb.clone(), labels: target_labels.clone() };
            let target = load_target(&spec, Path::new(""))?;
            let opts = ScoringOptions::new(*seed, *max_samples);
            let (value, detail) = crate::manifest::score_method(*method, &source, &target, &opts)?;
            if cli.json {
                match detail {
                    Some(r) => emit(out, &pretty(&r)?),
                    None => emit(out, &pretty(&ScalarScore { method: *method, value })?),
                }
            } else {
                emit(out, &format!("{value}\n"))
            }
        }
        Command::Rank { manifest, out: out_path, breakdowns } => {
            let (m, base) = Manifest::load(manifest)?;
            let (mut report, details) = build_report(&m, &base)?;
            if let Some(bp) = breakdowns {
                report.breakdown_path = Some(bp.clone());
                write_text(bp, &pretty(&details)?)?;
            }
            write_text(out_path, &report.to_json()?)?;
            if cli.json {
                emit(out, &report.to_json()?)
            } else {
                let mut text = String::new();
                for (method, id) in &report.selection {
                    text.push_str(&format!("{method}\t{id}\n"));
                }
                emit(out, &text)
            }
        }
        Command::Corr { report, accuracy } => {
            let report = Report::load(report)?;
            let acc = load_accuracy_csv(accuracy)?;
            let results = correlate_report(&report, &acc)?;
            if cli.json {
                emit(out, &pretty(&results)?)
            } else {
                let mut text = String::from("method\tpearson\tspearman\tn\n");
                for (m, r) in &results {
                    text.push_str(&format!("{m}\t{:.2}\t{:.2}\t{}\n", r.pearson, r.spearman, r.n));
                }
                emit(out, &text)
            }
        }
        Command::Synth { config, out_dir, csv } => {
            let text = fs::read_to_string(config).map_err(|e| Error::io(config, e))?;
            let cfg: SynthConfig = serde_json::from_str(&text)?;
            let pair = generate_pair(&cfg)?;
            fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
            let (emb_ext, lbl_ext) = if *csv { ("csv", "txt") } else { ("pemb", "plbl") };
            for (name, set) in [("source", &pair.source), ("target", &pair.target)] {
                save_embeddings(out_dir.join(format!("{name}.{emb_ext}")), set.embeddings())?;
                save_labels(out_dir.join(format!("{name}.{lbl_ext}")), set.labels())?;
            }
            let meta = SynthMeta { config: cfg, warnings: pair.warnings.clone() };
            write_text(&out_dir.join("synth_meta.json"), &pretty(&meta)?)?;
            if cli.json {
                emit(out, &pretty(&meta)?)
            } else {
                let mut text = String::new();
                for w in &pair.warnings {
                    text.push_str(&format!("warning: {w}\n"));
                }
                emit(out, &text)
            }
        }
        Command::Substudy { manifest, fractions, repeats, out: out_path } => {
            let (m, base) = Manifest::load(manifest)?;
            let spec = m.target.as_ref().ok_or_else(|| {
                Error::ConfigInvalid("manifest needs a target for a subsample study".into())
            })?;
            let target = load_target(spec, &base)?;
            let sources = m.candidates.iter().map(|c| load_source(c, &base)).collect::<Result<Vec<_>>>()?;
            let result = subsample_study(&sources, &target.embeddings, fractions, *repeats, m.seed)?;
            let doc = SubstudyReport {
                schema: "adaptscore-substudy-v1",
                candidate_ids: m.candidates.iter().map(|c| c.id.clone()).collect(),
                result,
            };
            let text = pretty(&doc)?;
            write_text(out_path, &text)?;
            if cli.json {
                emit(out, &text)
            } else {
                let mut s = String::from("fraction\tstable_rate\n");
                for (f, r) in doc.result.fractions.iter().zip(&doc.result.stable_rate) {
                    s.push_str(&format!("{f}\t{r:.3}\n"));
                }
                emit(out, &s)
            }
        }
    }
}

#[derive(Serialize)]
struct ScalarScore {
    method: Method,
    value: f64,
}

#[derive(Serialize)]
struct SynthMeta {
    config: SynthConfig,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct SubstudyReport {
    schema: &'static str,
    candidate_ids: Vec<String>,
    #[serde(flatten)]
    result: SubsampleStudyResult,
}

/// Reads `candidate_id,accuracy` lines. A first line whose accuracy field
/// does not parse is treated as a header.
pub fn load_accuracy_csv(path: &Path) -> Result<BTreeMap<String, f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(',').map(str::trim);
        let (id, acc) = match (parts.next(), parts.next(), parts.next()) {
            (Some(id), Some(acc), None) => (id, acc),
            _ => {
                return Err(Error::RaggedCsv {
                    path: path.to_path_buf(),
                    line: i + 1,
                    expected: 2,
                    found: line.split(',').count(),
                })
            }
        };
        match acc.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                if map.insert(id.to_string(), v).is_some() {
                    return Err(Error::DuplicateCandidate(id.to_string()));
                }
            }
            Err(_) if map.is_empty() && i == 0 => continue,
            _ => return Err(Error::Parse { path: path.to_path_buf(), line: i + 1, token: acc.to_string() }),
        }
    }
    Ok(map)
}

/// Correlates each report method's higher-is-better value with accuracy.
///
/// Accuracies from `acc` override those stored in the report; candidates
/// with no accuracy anywhere are left out.
pub fn correlate_report(
    report: &Report,
    acc: &BTreeMap<String, f64>,
) -> Result<BTreeMap<Method, CorrelationResult>> {
    let mut results = BTreeMap::new();
    for &method in report.ranking.keys() {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for row in &report.rows {
            let a = acc.get(&row.candidate_id).copied().or(row.accuracy);
            if let (Some(a), Some(&v)) = (a, row.scores.get(&method)) {
                xs.push(method.oriented(v));
                ys.push(a);
            }
        }
        results.insert(method, correlate(&xs, &ys)?);
    }
    Ok(results)
}
