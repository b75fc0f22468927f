//! Welfare-ratio experiments: synthetic sweeps and Pabulib benchmarks.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genio::{gen_synthetic, pabulib_to_instance, parse_pabulib, Family, SyntheticConfig};
use crate::model::{validate_instance, Instance, SolveReport};
use crate::oracle::{brute_uwo_wp, ORACLE_MAX_PROJECTS};
use crate::rational::Rational;
use crate::solvers::greedy_uwowp;

/// Elections above this many projects are skipped by the Pabulib benchmark.
pub const PABULIB_MAX_PROJECTS: usize = 20;

/// Algorithms whose welfare is compared against the participatory optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentAlgorithm {
    #[default]
    Greedy,
    OracleUwowp,
}

impl ExperimentAlgorithm {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentAlgorithm::Greedy => "greedy",
            ExperimentAlgorithm::OracleUwowp => "oracle-uwowp",
        }
    }

    fn run(self, instance: &Instance) -> Result<SolveReport> {
        match self {
            ExperimentAlgorithm::Greedy => greedy_uwowp(instance),
            ExperimentAlgorithm::OracleUwowp => {
                let best = brute_uwo_wp(instance)?.best;
                crate::solvers::wp_report(instance, best, "oracle-uwowp", None)
            }
        }
    }
}

impl fmt::Display for ExperimentAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentAlgorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "greedy" => Ok(ExperimentAlgorithm::Greedy),
            "oracle-uwowp" => Ok(ExperimentAlgorithm::OracleUwowp),
            _ => Err(format!("unknown experiment algorithm {s:?}; expected greedy or oracle-uwowp")),
        }
    }
}

fn default_true() -> bool {
    true
}

/// A sweep over families and agent counts at a fixed project count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub families: Vec<Family>,
    pub n_list: Vec<usize>,
    pub m: usize,
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub algorithm: ExperimentAlgorithm,
    #[serde(default = "default_true")]
    pub oracle: bool,
    /// Fill the timing columns; off by default so output is reproducible.
    #[serde(default)]
    pub record_timings: bool,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidExperiment(msg.into()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.families.is_empty() || self.n_list.is_empty() {
            return bad("families and n_list must be nonempty");
        }
        if self.m == 0 || self.n_list.contains(&0) {
            return bad("agent and project counts must be at least 1");
        }
        if self.oracle && self.m > ORACLE_MAX_PROJECTS {
            return Err(Error::OracleCapExceeded { projects: self.m, cap: ORACLE_MAX_PROJECTS });
        }
        Ok(())
    }
}

/// SplitMix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `trial` in cell `cell`.
pub fn trial_seed(base_seed: u64, cell: usize, trial: usize) -> u64 {
    base_seed ^ mix64(((cell as u64) << 32) | trial as u64)
}

/// `alg / opt`, with `0 / 0` read as 1 and `x / 0` as 0.
pub fn welfare_ratio(alg: &Rational, opt: &Rational) -> Rational {
    if opt.is_zero() {
        if alg.is_zero() {
            Rational::one()
        } else {
            Rational::zero()
        }
    } else {
        alg / opt
    }
}

/// Nearest-rank percentile of sorted samples: the value at rank
/// `ceil(p * k)`, at least 1.
pub fn nearest_rank(sorted: &[Rational], p: &Rational) -> Option<Rational> {
    if sorted.is_empty() {
        return None;
    }
    let k = Rational::from_integer(sorted.len() as i64);
    let rank = (p * &k).ceil();
    let rank = num_traits::ToPrimitive::to_usize(&rank).unwrap_or(1).clamp(1, sorted.len());
    Some(sorted[rank - 1].clone())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub label: String,
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub median: f64,
    pub p10: f64,
    pub mean: f64,
    pub min: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct RatioSummary {
    pub cells: Vec<CellSummary>,
}

impl RatioSummary {
    fn cell(label: String, n: usize, m: usize, ratios: &[Rational]) -> Option<CellSummary> {
        let mut sorted = ratios.to_vec();
        sorted.sort();
        let total: Rational = sorted.iter().sum();
        Some(CellSummary {
            label,
            n,
            m,
            trials: sorted.len(),
            median: nearest_rank(&sorted, &Rational::new(1, 2))?.to_f64(),
            p10: nearest_rank(&sorted, &Rational::new(1, 10))?.to_f64(),
            mean: (total / Rational::from_integer(sorted.len() as i64)).to_f64(),
            min: sorted[0].to_f64(),
        })
    }

    /// Plot-ready rows: `label,n,m,trials,median,p10,mean,min`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["label", "n", "m", "trials", "median", "p10", "mean", "min"]).map_err(csv_error)?;
        for c in &self.cells {
            w.write_record([
                c.label.clone(),
                c.n.to_string(),
                c.m.to_string(),
                c.trials.to_string(),
                fmt_f(c.median),
                fmt_f(c.p10),
                fmt_f(c.mean),
                fmt_f(c.min),
            ])
            .map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn fmt_f(x: f64) -> String {
    format!("{x:.9}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub family: Family,
    pub n: usize,
    pub m: usize,
    pub trial: usize,
    pub seed: u64,
    pub alg_sw: Rational,
    pub opt_sw: Option<Rational>,
    pub ratio: Option<Rational>,
    pub alg_ms: Option<f64>,
    pub opt_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub summary: RatioSummary,
    pub rows: Vec<TrialRow>,
}

fn opt_field<T>(x: &Option<T>, f: impl Fn(&T) -> String) -> String {
    x.as_ref().map(f).unwrap_or_default()
}

impl ExperimentOutput {
    /// One row per trial: `family,n,m,trial,seed,alg_sw,opt_sw,ratio,alg_ms,opt_ms`.
    pub fn write_trials_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["family", "n", "m", "trial", "seed", "alg_sw", "opt_sw", "ratio", "alg_ms", "opt_ms"])
            .map_err(csv_error)?;
        for r in &self.rows {
            w.write_record([
                r.family.to_string(),
                r.n.to_string(),
                r.m.to_string(),
                r.trial.to_string(),
                r.seed.to_string(),
                fmt_f(r.alg_sw.to_f64()),
                opt_field(&r.opt_sw, |x| fmt_f(x.to_f64())),
                opt_field(&r.ratio, |x| fmt_f(x.to_f64())),
                opt_field(&r.alg_ms, |x| format!("{x:.3}")),
                opt_field(&r.opt_ms, |x| format!("{x:.3}")),
            ])
            .map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn timed<T>(on: bool, f: impl FnOnce() -> T) -> (T, Option<f64>) {
    let start = Instant::now();
    let out = f();
    (out, on.then(|| start.elapsed().as_secs_f64() * 1e3))
}

/// Runs every trial of every `(family, n)` cell. Trials run in parallel;
/// rows come back ordered by cell, then trial.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    let cells: Vec<(Family, usize)> =
        spec.families.iter().flat_map(|&f| spec.n_list.iter().map(move |&n| (f, n))).collect();
    let jobs: Vec<(usize, usize)> = (0..cells.len()).flat_map(|c| (0..spec.trials).map(move |t| (c, t))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(c, trial)| {
            let (family, n) = cells[c];
            let seed = trial_seed(spec.base_seed, c, trial);
            let instance = gen_synthetic(&SyntheticConfig { family, n, m: spec.m, seed });
            let (report, alg_ms) = timed(spec.record_timings, || spec.algorithm.run(&instance));
            let report = report?;
            if report.excess.is_negative() {
                return Err(Error::NotWpFundable { excess: report.excess });
            }
            let (opt_sw, opt_ms) = if spec.oracle {
                let (opt, ms) = timed(spec.record_timings, || brute_uwo_wp(&instance));
                (Some(opt?.objective), ms)
            } else {
                (None, None)
            };
            let ratio = opt_sw.as_ref().map(|o| welfare_ratio(&report.welfare, o));
            Ok(TrialRow { family, n, m: spec.m, trial, seed, alg_sw: report.welfare, opt_sw, ratio, alg_ms, opt_ms })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = RatioSummary {
        cells: cells
            .iter()
            .enumerate()
            .filter_map(|(c, &(family, n))| {
                let ratios: Vec<Rational> =
                    rows[c * spec.trials..(c + 1) * spec.trials].iter().filter_map(|r| r.ratio.clone()).collect();
                RatioSummary::cell(family.to_string(), n, spec.m, &ratios)
            })
            .collect(),
    };
    Ok(ExperimentOutput { summary, rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElectionRow {
    pub file: String,
    pub projects: usize,
    pub voters: usize,
    pub alg_sw: Rational,
    pub opt_sw: Rational,
    pub ratio: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PabulibBench {
    pub rows: Vec<ElectionRow>,
    /// Files that were not benchmarked, with the reason.
    pub skipped: Vec<(String, String)>,
    pub summary: RatioSummary,
}

impl PabulibBench {
    /// Share of benchmarked elections whose ratio exceeds `threshold`.
    pub fn fraction_above(&self, threshold: &Rational) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        self.rows.iter().filter(|r| &r.ratio > threshold).count() as f64 / self.rows.len() as f64
    }

    /// `file,projects,voters,alg_sw,opt_sw,ratio`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["file", "projects", "voters", "alg_sw", "opt_sw", "ratio"]).map_err(csv_error)?;
        for r in &self.rows {
            w.write_record([
                r.file.clone(),
                r.projects.to_string(),
                r.voters.to_string(),
                fmt_f(r.alg_sw.to_f64()),
                fmt_f(r.opt_sw.to_f64()),
                fmt_f(r.ratio.to_f64()),
            ])
            .map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn bench_file(path: &Path, algorithm: ExperimentAlgorithm) -> std::result::Result<ElectionRow, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let election = parse_pabulib(&text).map_err(|e| e.to_string())?;
    if election.projects.len() > PABULIB_MAX_PROJECTS {
        return Err(format!("{} projects exceed the cap of {PABULIB_MAX_PROJECTS}", election.projects.len()));
    }
    let raw = pabulib_to_instance(&election).map_err(|e| e.to_string())?;
    let instance = validate_instance(&raw, true).map_err(|e| e.to_string())?.instance;
    let alg = algorithm.run(&instance).map_err(|e| e.to_string())?;
    if alg.excess.is_negative() {
        return Err("algorithm returned an outcome that is not fundable".into());
    }
    let opt = brute_uwo_wp(&instance).map_err(|e| e.to_string())?.objective;
    Ok(ElectionRow {
        file: path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
        projects: instance.num_projects(),
        voters: instance.num_agents(),
        ratio: welfare_ratio(&alg.welfare, &opt),
        alg_sw: alg.welfare,
        opt_sw: opt,
    })
}

/// Benchmarks every `.pb` file in `dir` (sorted by name). Unreadable,
/// unsupported, or oversized elections are logged and skipped.
pub fn summarize_pabulib(dir: &Path, algorithm: ExperimentAlgorithm) -> Result<PabulibBench> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "pb"))
        .collect();
    files.sort();
    let results: Vec<_> = files.par_iter().map(|p| (p, bench_file(p, algorithm))).collect();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (path, res) in results {
        match res {
            Ok(row) => rows.push(row),
            Err(reason) => {
                log::warn!("skipping {}: {reason}", path.display());
                skipped.push((path.display().to_string(), reason));
            }
        }
    }
    let ratios: Vec<Rational> = rows.iter().map(|r| r.ratio.clone()).collect();
    let summary = RatioSummary {
        cells: RatioSummary::cell("pabulib".into(), 0, PABULIB_MAX_PROJECTS, &ratios).into_iter().collect(),
    };
    Ok(PabulibBench { rows, skipped, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn nearest_rank_convention() {
        let mut xs = vec![q(1, 1), q(1, 1), q(1, 2)];
        xs.sort();
        assert_eq!(nearest_rank(&xs, &q(1, 2)), Some(q(1, 1)));
        assert_eq!(nearest_rank(&xs, &q(1, 10)), Some(q(1, 2)));
        assert_eq!(nearest_rank(&[], &q(1, 2)), None);
        let ten: Vec<Rational> = (1..=10).map(|i| q(i, 10)).collect();
        assert_eq!(nearest_rank(&ten, &q(1, 10)), Some(q(1, 10)));
    }

    #[test]
    fn ratio_convention() {
        assert_eq!(welfare_ratio(&q(0, 1), &q(0, 1)), q(1, 1));
        assert_eq!(welfare_ratio(&q(1, 1), &q(0, 1)), q(0, 1));
        assert_eq!(welfare_ratio(&q(1, 1), &q(4, 1)), q(1, 4));
    }

    #[test]
    fn seeds_differ_across_cells_and_trials() {
        let mut seen = std::collections::HashSet::new();
        for c in 0..5 {
            for t in 0..100 {
                assert!(seen.insert(trial_seed(7, c, t)));
            }
        }
    }

    fn spec() -> ExperimentSpec {
        ExperimentSpec {
            families: Family::ALL.to_vec(),
            n_list: vec![3, 6],
            m: 4,
            trials: 5,
            base_seed: 11,
            algorithm: ExperimentAlgorithm::Greedy,
            oracle: true,
            record_timings: false,
        }
    }

    #[test]
    fn small_sweep() {
        let out = run_experiment(&spec()).unwrap();
        assert_eq!(out.rows.len(), 30);
        assert_eq!(out.summary.cells.len(), 6);
        for r in &out.rows {
            let ratio = r.ratio.clone().unwrap();
            assert!(!ratio.is_negative() && ratio <= Rational::one());
        }
        for c in &out.summary.cells {
            assert!(c.min <= c.p10 && c.p10 <= c.median && c.median <= 1.0);
        }
        let again = run_experiment(&spec()).unwrap();
        let (mut a, mut b) = (Vec::new(), Vec::new());
        out.write_trials_csv(&mut a).unwrap();
        again.write_trials_csv(&mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn oracle_against_itself_is_exact() {
        let s = ExperimentSpec { algorithm: ExperimentAlgorithm::OracleUwowp, ..spec() };
        let out = run_experiment(&s).unwrap();
        assert!(out.rows.iter().all(|r| r.ratio == Some(Rational::one())));
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(run_experiment(&ExperimentSpec { trials: 0, ..spec() }), Err(Error::InvalidExperiment(_))));
        assert!(matches!(
            run_experiment(&ExperimentSpec { m: 30, ..spec() }),
            Err(Error::OracleCapExceeded { projects: 30, .. })
        ));
        let out = run_experiment(&ExperimentSpec { m: 30, oracle: false, trials: 1, ..spec() }).unwrap();
        assert!(out.summary.cells.is_empty());
        let parsed: ExperimentSpec =
            serde_json::from_str(r#"{"families": ["uniform"], "n_list": [10], "m": 5, "trials": 2}"#).unwrap();
        assert_eq!(parsed.algorithm, ExperimentAlgorithm::Greedy);
        assert!(parsed.oracle);
    }
}
