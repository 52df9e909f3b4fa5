//! `geco` command line: `complete`, `robust` and `selftest`.
//!
//! Settings come from command-line flags, then an optional TOML file given
//! with `--config`, then built-in defaults, in that order of precedence.
//! Relative paths inside a config file are resolved against the file's
//! directory.
//!
//! ```toml
//! dataset = "ml-100k/u.data"
//! format = "ml100k"
//! rank = 10
//! seed = 0
//! split_ratio = 0.8
//! linf_heuristic = true
//! clip = "1,5"
//! out = "runs/ml100k"
//! ```

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::data::{
    parse_dense_matrix, parse_file_pair, parse_movielens_100k, parse_movielens_dat, split_indices,
    RatingsFormat, SplitSpec,
};
use crate::error::{GecoError, Result};
use crate::geco::{GecoConfig, GecoRun, IterationRecord};
use crate::linalg::DenseMatrix;
use crate::objective::{
    rmse, CompletionObjective, FactoredMatrix, HuberObjective, HuberTarget, ObservationSet,
    SmoothObjective,
};
use crate::report::{csv_row, per_rank, svg_plot, Series, CSV_HEADER};
use crate::verify::{format_table, run_suite, Fixtures};

#[derive(Parser, Debug)]
#[command(name = "geco", version, about = "Greedy rank-one matrix learning")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Matrix completion on a ratings file with a train/test split.
    Complete(RunArgs),
    /// Huber-loss low-rank approximation of a dense matrix.
    Robust(RunArgs),
    /// Run the invariant suite and print a pass/fail table.
    Selftest,
}

#[derive(Args, Debug, Default, Clone)]
pub struct RunArgs {
    /// TOML file of `key = value` settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<DataFormat>,
    /// Rank budget.
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Replacement attempts per iteration.
    #[arg(long)]
    pub replacements: Option<usize>,
    #[arg(long)]
    pub power_iters: Option<usize>,
    #[arg(long)]
    pub linf_heuristic: bool,
    #[arg(long)]
    pub diagonal_b: bool,
    /// Coefficient of the `|A|_F^2` penalty.
    #[arg(long)]
    pub frobenius: Option<f64>,
    /// Clip range for reported predictions, `lo,hi` or `off`.
    #[arg(long)]
    pub clip: Option<ClipSpec>,
    /// Ground-truth dense matrix for `robust` recovery error.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Predefined test file; disables the random split.
    #[arg(long)]
    pub test_dataset: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataFormat {
    /// Tab-separated MovieLens 100k `u.data`.
    Ml100k,
    /// `::`-separated MovieLens 1M/10M `ratings.dat`.
    Mldat,
    /// Header `m n` then `m` rows of `n` reals.
    Dense,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    /// Mean squared error on observed entries.
    Completion,
    Huber,
}

/// `Some((lo, hi))` or `None` for `off`.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(try_from = "String")]
pub struct ClipSpec(pub Option<(f64, f64)>);

impl FromStr for ClipSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("off") {
            return Ok(Self(None));
        }
        let (lo, hi) = s
            .split_once(',')
            .ok_or_else(|| format!("clip must be `lo,hi` or `off`, got {s:?}"))?;
        let lo: f64 = lo
            .trim()
            .parse()
            .map_err(|_| format!("bad clip bound {lo:?}"))?;
        let hi: f64 = hi
            .trim()
            .parse()
            .map_err(|_| format!("bad clip bound {hi:?}"))?;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(format!(
                "clip bounds must be finite with lo < hi, got {lo},{hi}"
            ));
        }
        Ok(Self(Some((lo, hi))))
    }
}

impl TryFrom<String> for ClipSpec {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse()
    }
}

/// Config file contents. Unknown keys are rejected.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: Option<PathBuf>,
    pub test_dataset: Option<PathBuf>,
    pub format: Option<DataFormat>,
    pub truth: Option<PathBuf>,
    pub objective: Option<ObjectiveKind>,
    pub split_ratio: Option<f64>,
    pub split_seed: Option<u64>,
    pub rank: Option<usize>,
    pub power_iterations: Option<usize>,
    pub replacements: Option<usize>,
    pub linf_heuristic: Option<bool>,
    pub linf_max_rounds: Option<usize>,
    pub diagonal_b: Option<bool>,
    pub frobenius: Option<f64>,
    pub seed: Option<u64>,
    pub stop_epsilon: Option<f64>,
    pub solver_tolerance: Option<f64>,
    pub solver_max_iterations: Option<usize>,
    pub huber_knot: Option<f64>,
    /// Subtract the training mean before fitting.
    pub center: Option<bool>,
    pub clip: Option<ClipSpec>,
    pub out: Option<PathBuf>,
    /// Write wall-clock `elapsed_ms`; `false` writes zeros.
    pub timing: Option<bool>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| GecoError::InvalidConfig(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| {
            GecoError::InvalidConfig(format!("cannot read {}: {e}", path.display()))
        })?;
        let mut cfg = Self::parse(&text)
            .map_err(|e| GecoError::InvalidConfig(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.dataset,
            &mut cfg.test_dataset,
            &mut cfg.truth,
            &mut cfg.out,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

/// Fully resolved settings for one run.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub dataset: PathBuf,
    pub test_dataset: Option<PathBuf>,
    pub format: DataFormat,
    pub truth: Option<PathBuf>,
    pub objective: ObjectiveKind,
    pub split: SplitSpec,
    pub geco: GecoConfig,
    pub huber_knot: f64,
    pub center: bool,
    pub clip: Option<(f64, f64)>,
    pub out: PathBuf,
    pub timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Complete,
    Robust,
}

fn infer_format(path: &Path) -> DataFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("dat") => DataFormat::Mldat,
        _ => DataFormat::Ml100k,
    }
}

impl Settings {
    /// Merges flags over the config file over defaults.
    pub fn resolve(args: &RunArgs, mode: Mode) -> Result<Self> {
        let file = match &args.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let dataset = args.dataset.clone().or(file.dataset).ok_or_else(|| {
            GecoError::InvalidConfig("no dataset given (use --dataset or `dataset = ...`)".into())
        })?;
        let format = args.format.or(file.format).unwrap_or(match mode {
            Mode::Complete => infer_format(&dataset),
            Mode::Robust => DataFormat::Dense,
        });
        let objective = file.objective.unwrap_or(match mode {
            Mode::Complete => ObjectiveKind::Completion,
            Mode::Robust => ObjectiveKind::Huber,
        });
        if mode == Mode::Complete && objective != ObjectiveKind::Completion {
            return Err(GecoError::InvalidConfig(
                "`complete` only runs the completion objective".into(),
            ));
        }
        if mode == Mode::Robust && format != DataFormat::Dense {
            return Err(GecoError::InvalidConfig(
                "`robust` needs a dense matrix file".into(),
            ));
        }
        let default_clip = match format {
            DataFormat::Ml100k => Some((1.0, 5.0)),
            DataFormat::Mldat => Some((0.5, 5.0)),
            DataFormat::Dense => None,
        };

        let defaults = GecoConfig::default();
        let mut solver = defaults.solver.clone();
        if let Some(t) = file.solver_tolerance {
            solver.tolerance = t;
        }
        if let Some(it) = file.solver_max_iterations {
            solver.max_iterations = it;
        }
        let seed = args.seed.or(file.seed).unwrap_or(defaults.seed);
        let geco = GecoConfig {
            rank_budget: args.rank.or(file.rank).unwrap_or(defaults.rank_budget),
            power_iterations: args
                .power_iters
                .or(file.power_iterations)
                .unwrap_or(defaults.power_iterations),
            replacement_attempts: args
                .replacements
                .or(file.replacements)
                .unwrap_or(defaults.replacement_attempts),
            use_linf_heuristic: args.linf_heuristic
                || file.linf_heuristic.unwrap_or(defaults.use_linf_heuristic),
            linf_max_rounds: file.linf_max_rounds.unwrap_or(defaults.linf_max_rounds),
            diagonal_b: args.diagonal_b || file.diagonal_b.unwrap_or(defaults.diagonal_b),
            frobenius_coeff: args
                .frobenius
                .or(file.frobenius)
                .unwrap_or(defaults.frobenius_coeff),
            solver,
            seed,
            stop_epsilon: file.stop_epsilon.unwrap_or(defaults.stop_epsilon),
        };
        geco.validate()?;
        let settings = Self {
            dataset,
            test_dataset: args.test_dataset.clone().or(file.test_dataset),
            format,
            truth: args.truth.clone().or(file.truth),
            objective,
            split: SplitSpec {
                ratio: file.split_ratio.unwrap_or(0.8),
                seed: file.split_seed.unwrap_or(seed),
            },
            geco,
            huber_knot: file.huber_knot.unwrap_or(1.0),
            center: file.center.unwrap_or(false),
            clip: args.clip.or(file.clip).map_or(default_clip, |c| c.0),
            out: args
                .out
                .clone()
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from("geco-out")),
            timing: file.timing.unwrap_or(true),
        };
        if !(settings.split.ratio > 0.0 && settings.split.ratio <= 1.0) {
            return Err(GecoError::InvalidConfig(format!(
                "split_ratio must lie in (0, 1], got {}",
                settings.split.ratio
            )));
        }
        Ok(settings)
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| GecoError::Parse(format!("cannot open {}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        GecoError::Parse(msg) if !msg.starts_with("cannot open") => {
            GecoError::Parse(format!("{}: {msg}", path.display()))
        }
        other => other,
    })
}

/// Reads a dense matrix file.
pub fn load_dense(path: &Path) -> Result<DenseMatrix> {
    with_path(path, parse_dense_matrix(open(path)?))
}

/// Train and test observations for `complete`. `split_ratio = 1` trains on
/// everything and leaves the test set empty.
pub fn load_split(settings: &Settings) -> Result<(ObservationSet, Option<ObservationSet>)> {
    let path = &settings.dataset;
    if let Some(test_path) = &settings.test_dataset {
        let format = match settings.format {
            DataFormat::Ml100k => RatingsFormat::Ml100k,
            DataFormat::Mldat => RatingsFormat::MlDat,
            DataFormat::Dense => {
                return Err(GecoError::InvalidConfig(
                    "test_dataset needs a ratings format".into(),
                ));
            }
        };
        let (_, train, test) =
            with_path(path, parse_file_pair(open(path)?, open(test_path)?, format))?;
        return Ok((train, Some(test)));
    }
    let (m, n, triples): (usize, usize, Vec<(usize, usize, f64)>) = match settings.format {
        DataFormat::Dense => {
            let y = load_dense(path)?;
            let triples = (0..y.nrows())
                .flat_map(|i| (0..y.ncols()).map(move |j| (i, j)))
                .map(|(i, j)| (i, j, y[(i, j)]))
                .collect();
            (y.nrows(), y.ncols(), triples)
        }
        DataFormat::Ml100k | DataFormat::Mldat => {
            let ds = if settings.format == DataFormat::Ml100k {
                with_path(path, parse_movielens_100k(open(path)?))?
            } else {
                with_path(path, parse_movielens_dat(open(path)?))?
            };
            let triples = ds
                .ratings
                .iter()
                .map(|r| (r.user, r.item, r.rating))
                .collect();
            (ds.users(), ds.items(), triples)
        }
    };
    if settings.split.ratio == 1.0 {
        return Ok((ObservationSet::new(m, n, triples)?, None));
    }
    let (train_idx, test_idx) = split_indices(triples.len(), &settings.split);
    if train_idx.is_empty() || test_idx.is_empty() {
        return Err(GecoError::InvalidConfig(format!(
            "split of {} entries at ratio {} leaves an empty side",
            triples.len(),
            settings.split.ratio
        )));
    }
    let pick = |idx: &[usize]| ObservationSet::new(m, n, idx.iter().map(|&k| triples[k]));
    Ok((pick(&train_idx)?, Some(pick(&test_idx)?)))
}

/// Streams CSV rows as records are committed, keeping the first I/O error.
struct CsvSink {
    out: BufWriter<File>,
    timing: bool,
    error: Option<std::io::Error>,
}

impl CsvSink {
    fn create(path: &Path, header: &str, timing: bool) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{header}")?;
        Ok(Self {
            out,
            timing,
            error: None,
        })
    }

    fn write(&mut self, r: &IterationRecord, extra: &[Option<f64>]) {
        if self.error.is_none() {
            if let Err(e) = writeln!(self.out, "{}", csv_row(r, self.timing, extra))
                .and_then(|_| self.out.flush())
            {
                self.error = Some(e);
            }
        }
    }

    fn finish(mut self) -> Result<()> {
        if let Some(e) = self.error {
            return Err(e.into());
        }
        self.out.flush()?;
        Ok(())
    }
}

/// Files written by a run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutputs {
    pub csv: PathBuf,
    pub svg: PathBuf,
    pub records: Vec<IterationRecord>,
    pub factors: FactoredMatrix,
}

/// Completion run: fits on the training split and streams per-iteration
/// train/test RMSE (clipped predictions) to `trace.csv`, then plots RMSE
/// against rank in `rmse.svg`.
pub fn cmd_complete(settings: &Settings) -> Result<RunOutputs> {
    let (train, test) = load_split(settings)?;
    let offset = if settings.center {
        train.mean_value()
    } else {
        0.0
    };
    let objective = CompletionObjective::new(train.shifted(offset));
    fs::create_dir_all(&settings.out)?;
    let csv = settings.out.join("trace.csv");
    let mut sink = CsvSink::create(&csv, CSV_HEADER, settings.timing)?;
    let clip = settings.clip;
    let mut run = GecoRun::new(&objective, settings.geco.clone())?;
    let mut rmse_error = None;
    run.run_to_end(&mut |r: &mut IterationRecord, f: &FactoredMatrix| {
        let test_rmse = test.as_ref().map(|t| rmse(f, t, offset, clip)).transpose();
        match (rmse(f, &train, offset, clip), test_rmse) {
            (Ok(a), Ok(b)) => {
                r.train_rmse = Some(a);
                r.test_rmse = b;
            }
            (Err(e), _) | (_, Err(e)) => {
                rmse_error.get_or_insert(e);
            }
        }
        sink.write(r, &[]);
    })?;
    if let Some(e) = rmse_error {
        return Err(e);
    }
    sink.finish()?;
    let (factors, trace) = run.into_parts();

    let svg = settings.out.join("rmse.svg");
    let series = vec![
        Series {
            name: "test RMSE".into(),
            points: per_rank(&trace.records, |r| r.test_rmse),
        },
        Series {
            name: "train RMSE".into(),
            points: per_rank(&trace.records, |r| r.train_rmse),
        },
    ];
    fs::write(&svg, svg_plot("RMSE vs rank", "rank", "RMSE", &series))?;
    Ok(RunOutputs {
        csv,
        svg,
        records: trace.records,
        factors,
    })
}

/// Robust approximation of a dense matrix. `train_rmse` is the RMSE
/// against the input over all entries; with a ground truth a
/// `recovery_error` column is appended.
pub fn cmd_robust(settings: &Settings) -> Result<RunOutputs> {
    let y = load_dense(&settings.dataset)?;
    let truth = match &settings.truth {
        Some(p) => {
            let t = load_dense(p)?;
            if t.shape() != y.shape() {
                return Err(GecoError::DimensionMismatch(format!(
                    "truth is {}x{}, input is {}x{}",
                    t.nrows(),
                    t.ncols(),
                    y.nrows(),
                    y.ncols()
                )));
            }
            Some(t)
        }
        None => None,
    };
    let full = ObservationSet::full(&y)?;
    let huber;
    let squared;
    let objective: &dyn SmoothObjective = match settings.objective {
        ObjectiveKind::Huber => {
            huber = HuberObjective::with_knot(HuberTarget::new(y.clone())?, settings.huber_knot)?;
            &huber
        }
        ObjectiveKind::Completion => {
            squared = CompletionObjective::new(full.clone());
            &squared
        }
    };
    fs::create_dir_all(&settings.out)?;
    let csv = settings.out.join("trace.csv");
    let header = if truth.is_some() {
        format!("{CSV_HEADER},recovery_error")
    } else {
        CSV_HEADER.to_string()
    };
    let mut sink = CsvSink::create(&csv, &header, settings.timing)?;
    let mut recovery: Vec<(f64, f64)> = Vec::new();
    let mut run = GecoRun::new(objective, settings.geco.clone())?;
    run.run_to_end(&mut |r: &mut IterationRecord, f: &FactoredMatrix| {
        r.train_rmse = rmse(f, &full, 0.0, settings.clip).ok();
        let err = truth.as_ref().map(|t| {
            let e = (f.to_dense() - t).norm() / t.norm();
            recovery.push((r.iteration as f64, e));
            e
        });
        if truth.is_some() {
            sink.write(r, &[err]);
        } else {
            sink.write(r, &[]);
        }
    })?;
    sink.finish()?;
    let (factors, trace) = run.into_parts();

    let svg = settings.out.join("objective.svg");
    let mut series = vec![Series {
        name: "objective".into(),
        points: trace
            .records
            .iter()
            .map(|r| (r.iteration as f64, r.objective))
            .collect(),
    }];
    if truth.is_some() {
        series.push(Series {
            name: "recovery error".into(),
            points: recovery,
        });
    }
    fs::write(
        &svg,
        svg_plot("Robust approximation", "iteration", "value", &series),
    )?;
    Ok(RunOutputs {
        csv,
        svg,
        records: trace.records,
        factors,
    })
}

/// Runs the invariant suite, printing the table; returns the exit code.
pub fn cmd_selftest(fixtures: &Fixtures, out: &mut dyn Write) -> Result<i32> {
    let outcomes = run_suite(fixtures);
    write!(out, "{}", format_table(&outcomes))?;
    let failed: Vec<&str> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.name)
        .collect();
    if failed.is_empty() {
        writeln!(out, "all {} invariants hold", outcomes.len())?;
        Ok(0)
    } else {
        writeln!(out, "failed: {}", failed.join(", "))?;
        Ok(1)
    }
}

fn summarize(out: &mut dyn Write, outputs: &RunOutputs, truth: Option<&Path>) -> Result<()> {
    if let Some(last) = outputs.records.last() {
        write!(
            out,
            "rank {} after {} steps, objective {:.6e}",
            last.rank, last.iteration, last.objective
        )?;
        if let Some(t) = last.train_rmse {
            write!(out, ", train RMSE {t:.4}")?;
        }
        if let Some(t) = last.test_rmse {
            write!(out, ", test RMSE {t:.4}")?;
        }
        writeln!(out)?;
    } else {
        writeln!(out, "zero gradient at the start; nothing to fit")?;
    }
    if let Some(p) = truth {
        let t = load_dense(p)?;
        let a = if outputs.factors.k() == 0 {
            DenseMatrix::zeros(t.nrows(), t.ncols())
        } else {
            outputs.factors.to_dense()
        };
        let e = (a - &t).norm() / t.norm();
        writeln!(out, "recovery error {e:.4e}")?;
    }
    writeln!(
        out,
        "wrote {} and {}",
        outputs.csv.display(),
        outputs.svg.display()
    )?;
    Ok(())
}

/// Dispatches a parsed command line; returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Complete(args) => {
            let settings = Settings::resolve(args, Mode::Complete)?;
            let outputs = cmd_complete(&settings)?;
            summarize(out, &outputs, None)?;
            Ok(0)
        }
        Command::Robust(args) => {
            let settings = Settings::resolve(args, Mode::Robust)?;
            let outputs = cmd_robust(&settings)?;
            summarize(out, &outputs, settings.truth.as_deref())?;
            Ok(0)
        }
        Command::Selftest => cmd_selftest(&Fixtures::standard(0)?, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clip_parsing() {
        assert_eq!("off".parse::<ClipSpec>().unwrap(), ClipSpec(None));
        assert_eq!(
            "1, 5".parse::<ClipSpec>().unwrap(),
            ClipSpec(Some((1.0, 5.0)))
        );
        assert!("5,1".parse::<ClipSpec>().is_err());
        assert!("1".parse::<ClipSpec>().is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = RunConfig::parse("rank = 3\nrnak = 4\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("rnak"), "{err}");
    }

    #[test]
    fn defaults_match_protocol() {
        let args = RunArgs {
            dataset: Some("u.data".into()),
            ..RunArgs::default()
        };
        let s = Settings::resolve(&args, Mode::Complete).unwrap();
        assert_eq!(s.geco.power_iterations, 30);
        assert_eq!(s.geco.replacement_attempts, 20);
        assert_eq!(s.format, DataFormat::Ml100k);
        assert_eq!(s.clip, Some((1.0, 5.0)));
        assert_eq!(s.split.ratio, 0.8);
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.toml");
        fs::write(
            &cfg,
            "dataset = \"m.txt\"\nformat = \"dense\"\nrank = 7\nseed = 3\nclip = \"0,2\"\n",
        )
        .unwrap();
        let args = RunArgs {
            config: Some(cfg),
            rank: Some(2),
            ..RunArgs::default()
        };
        let s = Settings::resolve(&args, Mode::Complete).unwrap();
        assert_eq!(s.geco.rank_budget, 2);
        assert_eq!(s.geco.seed, 3);
        assert_eq!(s.clip, Some((0.0, 2.0)));
        assert_eq!(s.dataset, dir.path().join("m.txt"));
    }

    #[test]
    fn mode_constraints() {
        let args = RunArgs {
            dataset: Some("u.data".into()),
            format: Some(DataFormat::Ml100k),
            ..RunArgs::default()
        };
        assert!(Settings::resolve(&args, Mode::Robust).is_err());
        assert!(Settings::resolve(&RunArgs::default(), Mode::Complete).is_err());
    }
}
