use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use quench_core::reduction::{entropy_record, CHAIN_TOL};
use quench_core::szego::{bk_bound, szego_bound};
use quench_core::{EvolutionSetup, TrigPolynomial};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Output, ScenarioConfig};
use crate::error::{CliError, Result};

pub const CSV_HEADER: &str = "t,exact_entropy,neg_log_purity,det_bound,szego_sum,bk_bound";

/// One time point. Columns that were not requested are `None`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct BoundRow {
    pub t: f64,
    pub exact_entropy: Option<f64>,
    pub neg_log_purity: Option<f64>,
    pub det_bound: Option<f64>,
    pub szego_sum: Option<f64>,
    pub bk_bound: Option<f64>,
}

impl BoundRow {
    fn cells(&self) -> [Option<f64>; 6] {
        [
            Some(self.t),
            self.exact_entropy,
            self.neg_log_purity,
            self.det_bound,
            self.szego_sum,
            self.bk_bound,
        ]
    }

    /// Szegő-side ordering; the dense chain is checked on the record itself.
    fn check_szego_side(&self) -> Result<()> {
        if let (Some(s), Some(b)) = (self.szego_sum, self.bk_bound) {
            if b.is_nan() || s.is_nan() || b > s + CHAIN_TOL {
                return Err(quench_core::Error::Inconsistent {
                    check: "szego sum >= bk bound",
                    deviation: b - s,
                    tolerance: CHAIN_TOL,
                }
                .into());
            }
        }
        Ok(())
    }
}

/// Writes a float with 17 significant digits, or nothing for a skipped cell.
pub fn push_cell(line: &mut String, v: Option<f64>) {
    if let Some(v) = v {
        // −0 prints with a sign; fold it into +0
        write!(line, "{:.16e}", v + 0.0).unwrap();
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Metadata {
    pub config: ScenarioConfig,
    pub version: &'static str,
    pub runtime_seconds: f64,
    pub skipped: Vec<Output>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundSeries {
    pub rows: Vec<BoundRow>,
    pub metadata: Metadata,
}

pub fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(j);
    }
    builder.build().map_err(|e| CliError::Usage(e.to_string()))
}

/// Evaluates every requested column at one time.
pub fn compute_row(
    setup: &EvolutionSetup,
    cfg: &ScenarioConfig,
    dense: bool,
    t: f64,
) -> Result<BoundRow> {
    let mut row = BoundRow { t, ..Default::default() };
    if dense {
        let rec = entropy_record(setup, cfg.n, t)?;
        rec.validate()?;
        row.exact_entropy = cfg.wants(Output::Exact).then_some(rec.exact_entropy);
        row.neg_log_purity = cfg.wants(Output::Purity).then_some(rec.neg_log_purity);
        row.det_bound = cfg.wants(Output::Detbound).then_some(rec.det_bound);
    }
    let (lambda, beta): (&TrigPolynomial, &TrigPolynomial) = (setup.lambda(), setup.beta());
    let k_max = cfg.kmax.fixed();
    if cfg.wants(Output::Szego) {
        row.szego_sum = Some(szego_bound(lambda, beta, t, k_max)?.0.value);
    }
    if cfg.wants(Output::Bkbound) {
        row.bk_bound = Some(bk_bound(lambda, beta, t, k_max)?.value);
    }
    row.check_szego_side()?;
    Ok(row)
}

impl BoundSeries {
    /// Runs the whole time grid. Rows come back in grid order whatever the
    /// scheduling; the first failing row aborts the series.
    pub fn compute(cfg: &ScenarioConfig, pool: &rayon::ThreadPool) -> Result<Self> {
        cfg.validate()?;
        let start = Instant::now();
        let setup = cfg.setup()?;
        let dense = cfg.dense_enabled();
        let skipped: Vec<Output> = if cfg.size > crate::config::DENSE_LIMIT {
            cfg.outputs.iter().copied().filter(|o| o.is_dense()).collect()
        } else {
            Vec::new()
        };
        if !skipped.is_empty() {
            eprintln!(
                "warning: N = {} exceeds {}; skipping dense columns {:?}",
                cfg.size,
                crate::config::DENSE_LIMIT,
                skipped
            );
        }
        let times = cfg.times();
        let rows = pool.install(|| {
            times
                .par_iter()
                .map(|&t| compute_row(&setup, cfg, dense, t))
                .collect::<Result<Vec<_>>>()
        })?;
        Ok(Self {
            rows,
            metadata: Metadata {
                config: cfg.clone(),
                version: env!("CARGO_PKG_VERSION"),
                runtime_seconds: start.elapsed().as_secs_f64(),
                skipped,
            },
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            write_row(&mut out, None, row);
        }
        out
    }

    /// Writes the CSV and its `<out>.meta.json` sidecar.
    pub fn write(&self, out: &Path) -> Result<()> {
        std::fs::write(out, self.to_csv())?;
        std::fs::write(meta_path(out), serde_json::to_string_pretty(&self.metadata)? + "\n")?;
        Ok(())
    }
}

/// Appends one CSV line, optionally prefixed by a sweep value.
pub fn write_row(out: &mut String, prefix: Option<&str>, row: &BoundRow) {
    if let Some(p) = prefix {
        out.push_str(p);
        out.push(',');
    }
    for (i, cell) in row.cells().into_iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        push_cell(out, cell);
    }
    out.push('\n');
}

pub fn meta_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    out.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ScenarioConfig {
        ScenarioConfig {
            size: 16,
            n: 8,
            t1: 2.0,
            steps: 5,
            ..Default::default()
        }
    }

    #[test]
    fn csv_layout() {
        let pool = thread_pool(Some(2)).unwrap();
        let s = BoundSeries::compute(&small(), &pool).unwrap();
        let csv = s.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 6);
        assert_eq!(first[0], "0.0000000000000000e0");
        assert_eq!(csv.lines().count(), 6);
    }

    #[test]
    fn skipped_columns_are_blank() {
        let cfg = ScenarioConfig {
            outputs: vec![Output::Szego],
            ..small()
        };
        let s = BoundSeries::compute(&cfg, &thread_pool(Some(1)).unwrap()).unwrap();
        let line = s.to_csv().lines().nth(2).unwrap().to_string();
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 6);
        assert!(cells[1..4].iter().chain(&cells[5..]).all(|c| c.is_empty()));
        assert!(!cells[4].is_empty());
    }

    #[test]
    fn job_count_does_not_change_output() {
        let a = BoundSeries::compute(&small(), &thread_pool(Some(1)).unwrap()).unwrap();
        let b = BoundSeries::compute(&small(), &thread_pool(Some(4)).unwrap()).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(meta_path(Path::new("/tmp/run.csv")), PathBuf::from("/tmp/run.csv.meta.json"));
    }

    #[test]
    fn zero_jobs_is_usage_error() {
        assert!(matches!(thread_pool(Some(0)), Err(CliError::Usage(_))));
    }
}
