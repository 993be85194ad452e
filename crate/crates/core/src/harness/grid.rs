use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;

use crate::detectors::{SpectralSettings, DEFAULT_EPSILON, DEFAULT_LAMBDA};
use crate::error::{HpcError, Result};
use crate::model::{MAX_ARITY, MIN_ARITY};
use crate::tensor::Unfolding;

use super::calibrate::MIN_EXCEEDANCES;
use super::{calibrate_threshold, estimate_risk, fmt_g6, DetectorConfig, RiskEstimate};

pub const GRID_CSV_HEADER: &str =
    "detector,N,d,kappa,gamma,type_I,type_II,risk,ci_I,ci_II,threshold,runtime_s,status";

/// Cells with risk at or below this are reported as solved.
pub const SOLVED_RISK: f64 = 0.10;

#[derive(Debug, Clone, PartialEq)]
pub enum KappaRule {
    /// Clique sizes per N.
    Explicit(BTreeMap<usize, Vec<usize>>),
    /// `kappa = floor(N^(gamma/2))` for each gamma.
    Exponent(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGridSpec {
    pub d: usize,
    pub n_list: Vec<usize>,
    pub kappa_rule: KappaRule,
    pub detectors: Vec<DetectorConfig>,
    pub level: f64,
    pub trials: usize,
    pub calib_trials: usize,
    pub master_seed: u64,
}

impl PhaseGridSpec {
    /// `(N, kappa)` cells in listing order.
    pub fn cells(&self) -> Result<Vec<(usize, usize)>> {
        let mut out = Vec::new();
        for &n in &self.n_list {
            let kappas: Vec<usize> = match &self.kappa_rule {
                KappaRule::Explicit(map) => map
                    .get(&n)
                    .cloned()
                    .ok_or_else(|| HpcError::param(format!("no kappa list for N = {n}")))?,
                KappaRule::Exponent(gammas) => gammas
                    .iter()
                    .map(|&g| {
                        if !(g > 0.0) {
                            return Err(HpcError::param(format!("gamma = {g} must be positive")));
                        }
                        Ok(((n as f64).powf(g / 2.0) + 1e-9).floor() as usize)
                    })
                    .collect::<Result<_>>()?,
            };
            for k in kappas {
                if k > n {
                    return Err(HpcError::param(format!("kappa = {k} exceeds N = {n}")));
                }
                out.push((n, k));
            }
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if !(MIN_ARITY..=MAX_ARITY).contains(&self.d) {
            return Err(HpcError::param(format!("d = {} unsupported", self.d)));
        }
        if self.n_list.is_empty() || self.detectors.is_empty() {
            return Err(HpcError::param("grid needs at least one N and one detector"));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(HpcError::param(format!("level {} outside (0, 1)", self.level)));
        }
        if self.trials == 0 {
            return Err(HpcError::param("trials must be at least 1"));
        }
        if (self.calib_trials as f64) < MIN_EXCEEDANCES / self.level - 1e-9 {
            return Err(HpcError::param("calib_trials must be at least 10 / level"));
        }
        self.cells().map(|_| ())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellOutcome {
    Ok { threshold: f64, risk: RiskEstimate },
    /// Error code for the status column plus the full message.
    Error { code: String, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub detector: String,
    pub n: usize,
    pub d: usize,
    pub kappa: usize,
    /// `log kappa / log sqrt(N)`.
    pub gamma: f64,
    pub outcome: CellOutcome,
    pub runtime_s: f64,
}

pub fn gamma_of(n: usize, kappa: usize) -> f64 {
    (kappa as f64).ln() / (n as f64).sqrt().ln()
}

/// Calibrates and estimates risk for every (detector, N, kappa) cell. Cell
/// failures become error rows; only an invalid spec is an error.
///
/// Calibration streams do not depend on kappa, so each (detector, N) pair is
/// calibrated once and shared by its cells.
pub fn phase_grid(spec: &PhaseGridSpec) -> Result<Vec<GridRow>> {
    spec.validate()?;
    let cells = spec.cells()?;
    let mut ns: Vec<usize> = spec.n_list.clone();
    ns.sort_unstable();
    ns.dedup();
    let calib_jobs: Vec<(usize, usize)> = (0..spec.detectors.len())
        .flat_map(|i| ns.iter().map(move |&n| (i, n)))
        .collect();
    let calibrations: BTreeMap<(usize, usize), (Result<f64>, f64)> = calib_jobs
        .par_iter()
        .map(|&(i, n)| {
            let t0 = Instant::now();
            let thr = calibrate_threshold(&spec.detectors[i], n, spec.d, spec.level, spec.calib_trials, spec.master_seed)
                .map(|c| c.threshold);
            ((i, n), (thr, t0.elapsed().as_secs_f64()))
        })
        .collect();
    let jobs: Vec<(usize, usize, usize)> = (0..spec.detectors.len())
        .flat_map(|i| cells.iter().map(move |&(n, k)| (i, n, k)))
        .collect();
    let mut rows: Vec<(usize, GridRow)> = jobs
        .par_iter()
        .map(|&(i, n, kappa)| {
            let det = &spec.detectors[i];
            let t0 = Instant::now();
            let (calibrated, calib_time) = &calibrations[&(i, n)];
            let outcome = calibrated
                .clone()
                .and_then(|threshold| {
                    estimate_risk(det, threshold, n, spec.d, kappa, spec.trials, spec.master_seed)
                        .map(|risk| CellOutcome::Ok { threshold, risk })
                })
                .unwrap_or_else(|e| CellOutcome::Error {
                    code: e.code().to_string(),
                    message: e.to_string(),
                });
            let row = GridRow {
                detector: det.name().to_string(),
                n,
                d: spec.d,
                kappa,
                gamma: gamma_of(n, kappa),
                outcome,
                runtime_s: calib_time + t0.elapsed().as_secs_f64(),
            };
            (i, row)
        })
        .collect();
    rows.sort_by(|(ia, a), (ib, b)| {
        a.detector
            .cmp(&b.detector)
            .then(ia.cmp(ib))
            .then(a.n.cmp(&b.n))
            .then(a.kappa.cmp(&b.kappa))
    });
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

/// CSV with [`GRID_CSV_HEADER`]. With `timing = false` every runtime is written as 0.
pub fn write_grid_csv(rows: &[GridRow], timing: bool) -> String {
    let mut out = String::new();
    out.push_str(GRID_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let runtime = if timing { r.runtime_s } else { 0.0 };
        let _ = write!(out, "{},{},{},{},{},", r.detector, r.n, r.d, r.kappa, fmt_g6(r.gamma));
        match &r.outcome {
            CellOutcome::Ok { threshold, risk } => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},ok",
                    fmt_g6(risk.type_i),
                    fmt_g6(risk.type_ii),
                    fmt_g6(risk.risk()),
                    fmt_g6(risk.ci_i),
                    fmt_g6(risk.ci_ii),
                    fmt_g6(*threshold),
                    fmt_g6(runtime)
                );
            }
            CellOutcome::Error { code, .. } => {
                let _ = writeln!(out, ",,,,,,{},error:{code}", fmt_g6(runtime));
            }
        }
    }
    out
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| HpcError::param(format!("{key}: cannot parse {s:?}")))
        })
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| HpcError::param(format!("{key}: cannot parse {v:?}")))
}

/// Parses the flat `key=value` experiment file.
///
/// Keys: `d`, `n_list`, `kappa` (shared list), `kappa.<N>` (per-N list),
/// `gamma`, `detectors`, `level`, `trials`, `calib_trials`, `master_seed`, and
/// detector settings `tol`, `max_iter`, `unfolding`, `epsilon`, `lambda`,
/// `steps`, `slices`. Blank lines and lines starting with `#` are skipped.
pub fn parse_experiment_file(text: &str) -> Result<PhaseGridSpec> {
    let mut kv: BTreeMap<String, String> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| HpcError::parse(format!("line {}", i + 1), "expected key=value"))?;
        let k = k.trim().to_string();
        let known = matches!(
            k.as_str(),
            "d" | "n_list"
                | "kappa"
                | "gamma"
                | "detectors"
                | "level"
                | "trials"
                | "calib_trials"
                | "master_seed"
                | "tol"
                | "max_iter"
                | "unfolding"
                | "epsilon"
                | "lambda"
                | "steps"
                | "slices"
        ) || k.strip_prefix("kappa.").is_some_and(|n| n.parse::<usize>().is_ok());
        if !known {
            return Err(HpcError::parse(format!("line {}", i + 1), format!("unknown key {k:?}")));
        }
        if kv.insert(k.clone(), v.trim().to_string()).is_some() {
            return Err(HpcError::parse(format!("line {}", i + 1), format!("duplicate key {k:?}")));
        }
    }
    let get = |k: &str| kv.get(k).map(String::as_str);
    let require = |k: &str| get(k).ok_or_else(|| HpcError::param(format!("missing key {k:?}")));

    let d: usize = parse_one("d", require("d")?)?;
    let n_list: Vec<usize> = parse_list("n_list", require("n_list")?)?;

    let per_n: Vec<(usize, Vec<usize>)> = kv
        .iter()
        .filter_map(|(k, v)| k.strip_prefix("kappa.").map(|n| (n, v)))
        .map(|(n, v)| Ok((parse_one("kappa.N", n)?, parse_list("kappa.N", v)?)))
        .collect::<Result<_>>()?;
    let kappa_rule = match (get("gamma"), get("kappa"), per_n.is_empty()) {
        (Some(g), None, true) => KappaRule::Exponent(parse_list("gamma", g)?),
        (None, shared, _) if shared.is_some() || !per_n.is_empty() => {
            let mut map = BTreeMap::new();
            if let Some(s) = shared {
                let list: Vec<usize> = parse_list("kappa", s)?;
                for &n in &n_list {
                    map.insert(n, list.clone());
                }
            }
            map.extend(per_n);
            KappaRule::Explicit(map)
        }
        _ => return Err(HpcError::param("give either gamma or kappa / kappa.<N> lists")),
    };

    let mut spectral = SpectralSettings::default();
    if let Some(v) = get("tol") {
        spectral.tol = parse_one("tol", v)?;
    }
    if let Some(v) = get("max_iter") {
        spectral.max_iter = parse_one("max_iter", v)?;
    }
    if let Some(v) = get("unfolding") {
        spectral.unfolding = match v {
            "mode1" => Unfolding::ModeOne,
            "balanced" => Unfolding::Balanced,
            other => return Err(HpcError::param(format!("unfolding: unknown layout {other:?}"))),
        };
    }
    let epsilon = get("epsilon").map(|v| parse_one("epsilon", v)).transpose()?.unwrap_or(DEFAULT_EPSILON);
    let lambda = get("lambda").map(|v| parse_one("lambda", v)).transpose()?.unwrap_or(DEFAULT_LAMBDA);
    let steps = get("steps").map(|v| parse_one("steps", v)).transpose()?;
    let slices = get("slices").map(|v| parse_one("slices", v)).transpose()?;

    let detectors = require("detectors")?
        .split(',')
        .map(|name| {
            Ok(match name.trim() {
                "spectral" => DetectorConfig::Spectral(spectral),
                "exhaustive" => DetectorConfig::Exhaustive { epsilon },
                "metropolis" => DetectorConfig::Metropolis { lambda, steps },
                "slicevote" => DetectorConfig::SliceVote { slices, spectral },
                "edgecount" => DetectorConfig::EdgeCount,
                other => return Err(HpcError::param(format!("unknown detector {other:?}"))),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let spec = PhaseGridSpec {
        d,
        n_list,
        kappa_rule,
        detectors,
        level: get("level").map(|v| parse_one("level", v)).transpose()?.unwrap_or(0.05),
        trials: get("trials").map(|v| parse_one("trials", v)).transpose()?.unwrap_or(100),
        calib_trials: get("calib_trials").map(|v| parse_one("calib_trials", v)).transpose()?.unwrap_or(200),
        master_seed: get("master_seed").map(|v| parse_one("master_seed", v)).transpose()?.unwrap_or(0),
    };
    spec.validate()?;
    Ok(spec)
}

/// One panel per detector: rows are N, columns the cells in kappa order,
/// shaded from white (risk 0) to red (risk >= 1).
pub fn risk_heatmap_svg(rows: &[GridRow]) -> String {
    const CELL: usize = 56;
    const LABEL: usize = 60;
    const TITLE: usize = 24;
    let mut panels: Vec<(&str, BTreeMap<usize, Vec<&GridRow>>)> = Vec::new();
    for r in rows {
        if panels.last().is_none_or(|(name, _)| *name != r.detector) {
            panels.push((&r.detector, BTreeMap::new()));
        }
        let (_, by_n) = panels.last_mut().expect("pushed");
        by_n.entry(r.n).or_default().push(r);
    }
    let width = LABEL
        + CELL
            * panels
                .iter()
                .flat_map(|(_, m)| m.values().map(Vec::len))
                .max()
                .unwrap_or(1);
    let height: usize = panels.iter().map(|(_, m)| TITLE + CELL * m.len()).sum::<usize>().max(1);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" font-family=\"monospace\" font-size=\"10\">\n"
    );
    let mut y = 0;
    for (name, by_n) in &panels {
        let _ = writeln!(s, "<text x=\"2\" y=\"{}\" font-size=\"14\">{name}</text>", y + 17);
        y += TITLE;
        for (n, cells) in by_n {
            let _ = writeln!(s, "<text x=\"2\" y=\"{}\">N={n}</text>", y + CELL / 2 + 4);
            for (j, r) in cells.iter().enumerate() {
                let x = LABEL + j * CELL;
                let (fill, label) = match &r.outcome {
                    CellOutcome::Ok { risk, .. } => {
                        let t = risk.risk().clamp(0.0, 1.0);
                        let gb = (255.0 * (1.0 - t)).round() as u8;
                        (format!("rgb(255,{gb},{gb})"), fmt_sig(risk.risk(), 3))
                    }
                    CellOutcome::Error { .. } => ("rgb(160,160,160)".to_string(), "err".to_string()),
                };
                let _ = writeln!(
                    s,
                    "<rect x=\"{x}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"{fill}\" stroke=\"black\"/>\n\
                     <text x=\"{}\" y=\"{}\">g={}</text>\n<text x=\"{}\" y=\"{}\">r={label}</text>",
                    x + 3,
                    y + 20,
                    fmt_sig(r.gamma, 3),
                    x + 3,
                    y + 36
                );
            }
            y += CELL;
        }
    }
    s.push_str("</svg>\n");
    s
}

use super::fmt_sig;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_axis() {
        assert_eq!(gamma_of(49, 7), 1.0);
        assert!((gamma_of(100, 10) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn experiment_file_parses() {
        let spec = parse_experiment_file(
            "# grid\nd=3\nn_list=20,30\nkappa=5,10\nkappa.30=5,10,15\ndetectors=edgecount,spectral\ntrials=10\ncalib_trials=400\nmaster_seed=9\ntol=1e-5\n",
        )
        .unwrap();
        assert_eq!(spec.cells().unwrap(), vec![(20, 5), (20, 10), (30, 5), (30, 10), (30, 15)]);
        assert_eq!(spec.master_seed, 9);
        assert_eq!(spec.detectors.len(), 2);
        assert!(matches!(spec.detectors[1], DetectorConfig::Spectral(s) if s.tol == 1e-5));
    }

    #[test]
    fn experiment_file_rejects_unknown_keys() {
        let err = parse_experiment_file("d=3\nn_list=20\nkappa=5\ndetectors=edgecount\nfoo=1\n").unwrap_err();
        assert!(matches!(err, HpcError::Parse { .. }));
    }

    #[test]
    fn gamma_rule() {
        let spec = parse_experiment_file("d=3\nn_list=49,100\ngamma=0.5,1,1.5\ndetectors=edgecount\n").unwrap();
        assert_eq!(
            spec.cells().unwrap(),
            vec![(49, 2), (49, 7), (49, 18), (100, 3), (100, 10), (100, 31)]
        );
        assert!(parse_experiment_file("d=3\nn_list=49\ngamma=-1\ndetectors=edgecount\n").is_err());
        assert!(parse_experiment_file("d=3\nn_list=49\ngamma=2.5\ndetectors=edgecount\n").is_err());
    }

    #[test]
    fn csv_and_svg_shapes() {
        let rows = vec![
            GridRow {
                detector: "edgecount".into(),
                n: 20,
                d: 3,
                kappa: 5,
                gamma: gamma_of(20, 5),
                outcome: CellOutcome::Ok {
                    threshold: 1.5,
                    risk: RiskEstimate::from_counts(5, 50, 100),
                },
                runtime_s: 0.25,
            },
            GridRow {
                detector: "edgecount".into(),
                n: 20,
                d: 3,
                kappa: 10,
                gamma: gamma_of(20, 10),
                outcome: CellOutcome::Error {
                    code: "param".into(),
                    message: "x".into(),
                },
                runtime_s: 0.5,
            },
        ];
        let csv = write_grid_csv(&rows, false);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], GRID_CSV_HEADER);
        assert_eq!(lines[1], "edgecount,20,3,5,1.07449,0.05,0.5,0.55,0.0617505,0.0961685,1.5,0,ok");
        assert_eq!(lines[2], "edgecount,20,3,10,1.53724,,,,,,,0,error:param");
        let svg = risk_heatmap_svg(&rows);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<rect").count(), 2);
    }
}
