//! The `hpc` command line: generation, detection, reduction and experiments.
//!
//! [`run`] returns the process exit code: 0 on success, 1 on a usage error,
//! 2 on a runtime error.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use hpc_core::detectors::{
    calibrate_slice_null, exhaustive_k_star, max_clique_with_budget, metropolis_search, SliceNullTable,
    SpectralSettings, DEFAULT_EPSILON, DEFAULT_LAMBDA,
};
use hpc_core::harness::{
    calibrate_threshold, clique_law_experiment, default_slices, estimate_risk, fmt_g6, gamma_of,
    parse_experiment_file, phase_grid, risk_heatmap_svg, write_grid_csv, CellOutcome, DetectorConfig, GridRow,
    DEFAULT_NODE_BUDGET,
};
use hpc_core::io::{decode, encode, encode_text, encode_truth, Format};
use hpc_core::tensor::{slice, DEFAULT_MAX_ITER, DEFAULT_TOL};
use hpc_core::{derive_stream, generate, AdjacencyTensorView, DUniformHypergraph, ModelParams, SeedSpec, Unfolding};

/// Calibration sample size when a threshold is not given.
pub const DEFAULT_CALIB_TRIALS: usize = 200;

#[derive(Debug, Parser)]
#[command(name = "hpc", version, about = "Hypergraphic planted clique experiments")]
pub struct Cli {
    /// Worker threads for parallel trials; defaults to available parallelism.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Write every runtime field as 0 so outputs can be compared byte for byte.
    #[arg(long, global = true)]
    pub no_timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample an instance and write it with a `.truth` sidecar.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Planted clique size; omit for a null instance.
        #[arg(long)]
        kappa: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `.hgb` selects the binary format, anything else text.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one detector on a hypergraph file.
    Detect {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        detector: DetectorArgs,
        /// Decision threshold; calibrated in-process when omitted.
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long, default_value_t = 0.05)]
        level: f64,
        #[arg(long, default_value_t = DEFAULT_CALIB_TRIALS)]
        calib_trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Null-quantile threshold for a detector.
    Calibrate {
        #[command(flatten)]
        detector: DetectorArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0.05)]
        level: f64,
        #[arg(long, default_value_t = DEFAULT_CALIB_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Type-I and type-II error estimates for one (N, d, kappa) cell.
    Risk {
        #[command(flatten)]
        detector: DetectorArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        kappa: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0.05)]
        level: f64,
        /// Skip calibration and use this threshold.
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_CALIB_TRIALS)]
        calib_trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Risk over a grid of (detector, N, kappa) cells read from an experiment file.
    Phase {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Exact maximum clique.
    Maxclique {
        #[arg(long = "in")]
        input: PathBuf,
        /// Stop once a clique of this size is found.
        #[arg(long)]
        cap: Option<usize>,
        /// Search-node limit.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Metropolis clique search.
    Metropolis {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_LAMBDA)]
        lambda: f64,
        /// Chain length; defaults to ceil(10 N ln N).
        #[arg(long)]
        steps: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fix d-2 vertices and write the 2-uniform slice.
    Reduce {
        #[arg(long = "in")]
        input: PathBuf,
        /// 1-based vertex ids.
        #[arg(long, value_delimiter = ',', required = true)]
        fix: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean maximum clique size of null instances against the almost-sure law.
    Cliquelaw {
        #[arg(long)]
        d: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        nlist: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DetectorName {
    Edgecount,
    Spectral,
    Exhaustive,
    Metropolis,
    Slicevote,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Layout {
    Mode1,
    Balanced,
}

#[derive(Debug, Clone, Args)]
pub struct DetectorArgs {
    #[arg(long, value_enum)]
    pub detector: DetectorName,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    pub maxiter: usize,
    #[arg(long, value_enum, default_value_t = Layout::Mode1)]
    pub unfolding: Layout,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    pub lambda: f64,
    #[arg(long)]
    pub steps: Option<u64>,
    #[arg(long)]
    pub slices: Option<usize>,
}

impl DetectorArgs {
    pub fn config(&self) -> DetectorConfig {
        let spectral = SpectralSettings {
            tol: self.tol,
            max_iter: self.maxiter,
            unfolding: match self.unfolding {
                Layout::Mode1 => Unfolding::ModeOne,
                Layout::Balanced => Unfolding::Balanced,
            },
        };
        match self.detector {
            DetectorName::Edgecount => DetectorConfig::EdgeCount,
            DetectorName::Spectral => DetectorConfig::Spectral(spectral),
            DetectorName::Exhaustive => DetectorConfig::Exhaustive { epsilon: self.epsilon },
            DetectorName::Metropolis => DetectorConfig::Metropolis {
                lambda: self.lambda,
                steps: self.steps,
            },
            DetectorName::Slicevote => DetectorConfig::SliceVote {
                slices: self.slices,
                spectral,
            },
        }
    }
}

/// Bad input that the user should fix; reported with exit code 1.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    eprintln!("hpc: config {cli:?}");
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                1
            } else {
                2
            }
        }
    }
}

fn execute(cli: &Cli) -> anyhow::Result<()> {
    let workers = match cli.workers {
        Some(0) => return Err(UsageError("--workers must be at least 1".into()).into()),
        Some(w) => w,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .context("building worker pool")?;
    pool.install(|| dispatch(cli))
}

fn dispatch(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Gen { n, d, kappa, seed, out } => {
            let params = match kappa {
                Some(k) => ModelParams::planted(*n, *d, *k),
                None => ModelParams::null(*n, *d),
            }
            .map_err(usage)?;
            let inst = generate(&params, *seed, "", 0)?;
            write_file(out, &encode(&inst.graph, Format::from_path(out)))?;
            write_file(&out.with_extension("truth"), encode_truth(&inst).as_bytes())?;
            Ok(())
        }
        Command::Detect {
            input,
            detector,
            threshold,
            level,
            calib_trials,
            seed,
        } => {
            let g = read_graph(input)?;
            let det = detector.config();
            let line = detect_line(&g, &det, *threshold, *level, *calib_trials, *seed)?;
            println!("{line}");
            Ok(())
        }
        Command::Calibrate {
            detector,
            n,
            d,
            level,
            trials,
            seed,
            out,
        } => {
            let table = calibrate_threshold(&detector.config(), *n, *d, *level, *trials, *seed)?;
            emit(out.as_deref(), &table.csv())
        }
        Command::Risk {
            detector,
            n,
            d,
            kappa,
            trials,
            level,
            threshold,
            calib_trials,
            seed,
            out,
        } => {
            let det = detector.config();
            let t0 = Instant::now();
            let threshold = match threshold {
                Some(t) => *t,
                None => calibrate_threshold(&det, *n, *d, *level, *calib_trials, *seed)?.threshold,
            };
            let risk = estimate_risk(&det, threshold, *n, *d, *kappa, *trials, *seed)?;
            let row = GridRow {
                detector: det.name().to_string(),
                n: *n,
                d: *d,
                kappa: *kappa,
                gamma: gamma_of(*n, *kappa),
                outcome: CellOutcome::Ok { threshold, risk },
                runtime_s: t0.elapsed().as_secs_f64(),
            };
            emit(out.as_deref(), &write_grid_csv(&[row], !cli.no_timing))
        }
        Command::Phase { config, out, svg } => {
            let text = fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
            let spec = parse_experiment_file(&text).map_err(usage)?;
            eprintln!("hpc: experiment {spec:?}");
            let rows = phase_grid(&spec)?;
            if let Some(path) = svg {
                write_file(path, risk_heatmap_svg(&rows).as_bytes())?;
            }
            emit(out.as_deref(), &write_grid_csv(&rows, !cli.no_timing))
        }
        Command::Maxclique { input, cap, budget } => {
            let g = read_graph(input)?;
            let r = max_clique_with_budget(&g, *cap, *budget)?;
            println!("size={} clique={} nodes={}", r.size, one_based(&r.best_clique), r.steps_or_nodes);
            Ok(())
        }
        Command::Metropolis {
            input,
            lambda,
            steps,
            seed,
        } => {
            let g = read_graph(input)?;
            let steps = steps.unwrap_or_else(|| hpc_core::detectors::default_steps(g.n()));
            let mut rng = derive_stream(&SeedSpec::new(*seed, "detector", 0));
            let r = metropolis_search(&g, *lambda, steps, &mut rng)?;
            println!("size={} clique={} steps={}", r.size, one_based(&r.best_clique), r.steps_or_nodes);
            Ok(())
        }
        Command::Reduce { input, fix, out } => {
            let g = read_graph(input)?;
            let mut fixed = Vec::with_capacity(fix.len());
            for &v in fix {
                if v == 0 || v > g.n() {
                    return Err(UsageError(format!("--fix vertex {v} outside 1..={}", g.n())).into());
                }
                fixed.push(v - 1);
            }
            let s = slice(&AdjacencyTensorView::centered(&g), &fixed).map_err(usage)?;
            let map: Vec<String> = s
                .vertex_map
                .iter()
                .enumerate()
                .map(|(new, old)| format!("{}->{}", new + 1, old + 1))
                .collect();
            eprintln!("hpc: vertex map {}", map.join(" "));
            match out {
                Some(path) => write_file(path, &encode(&s.graph, Format::from_path(path))),
                None => emit(None, &encode_text(&s.graph)),
            }
        }
        Command::Cliquelaw {
            d,
            nlist,
            trials,
            seed,
            budget,
        } => {
            let rows = clique_law_experiment(*d, nlist, *trials, *seed, *budget)?;
            let mut out = String::from("N,d,trials,mean_max_clique,law_value,ratio\n");
            for r in rows {
                let opt = |x: Option<f64>| x.map(fmt_g6).unwrap_or_else(|| "budget-exceeded".into());
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.n,
                    r.d,
                    r.trials,
                    opt(r.mean_max_clique),
                    fmt_g6(r.law_value),
                    opt(r.ratio)
                ));
            }
            emit(None, &out)
        }
    }
}

/// The one-line `detect` report. Without a threshold the detector is
/// calibrated on fresh null instances of the same shape; exhaustive search
/// uses `k* - 1` and slice vote a Bonferroni per-slice quantile.
pub fn detect_line(
    g: &DUniformHypergraph,
    det: &DetectorConfig,
    threshold: Option<f64>,
    level: f64,
    calib_trials: usize,
    seed: u64,
) -> anyhow::Result<String> {
    let thr = match (threshold, det) {
        (Some(t), _) => t,
        (None, DetectorConfig::Exhaustive { epsilon }) => exhaustive_k_star(g.n(), g.d(), *epsilon)? as f64 - 1.0,
        (None, DetectorConfig::SliceVote { slices, spectral }) => {
            let s = slices.unwrap_or_else(|| default_slices(g.n(), g.d()));
            let trials = SliceNullTable::recommended_trials(level, s);
            calibrate_slice_null(g.n(), g.d(), trials, spectral, seed)?.bonferroni_threshold(level, s)?
        }
        (None, _) => calibrate_threshold(det, g.n(), g.d(), level, calib_trials, seed)?.threshold,
    };
    let mut rng = derive_stream(&SeedSpec::new(seed, "detector", 0));
    let stat = det.statistic(g, &mut rng)?;
    let decision = hpc_core::detectors::decide(stat, thr);
    Ok(format!("{} stat={} thr={} decision={}", det.name(), fmt_g6(stat), fmt_g6(thr), u8::from(decision)))
}

fn usage(e: hpc_core::HpcError) -> anyhow::Error {
    UsageError(e.to_string()).into()
}

fn one_based(vs: &[usize]) -> String {
    vs.iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(",")
}

fn read_graph(path: &Path) -> anyhow::Result<DUniformHypergraph> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    decode(&bytes, Format::from_path(path)).with_context(|| format!("decoding {}", path.display()))
}

fn write_file(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => write_file(p, text.as_bytes()),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}
