use std::path::Path;

use quench_core::evolve;
use quench_core::szego::{bk_bound, fit_linear, fit_quadratic_short_time, szego_bound, GrowthFit};
use quench_core::TrigPolynomial;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::error::{CliError, Result};
use crate::series::{push_cell, write_row, BoundSeries, CSV_HEADER};

/// Computes the series and writes it to `out`, or to stdout when absent.
/// With `dump_state`, the evolved state at t1 is written there as JSON.
pub fn cmd_evolve(
    cfg: &ScenarioConfig,
    pool: &rayon::ThreadPool,
    out: Option<&Path>,
    dump_state: Option<&Path>,
) -> Result<BoundSeries> {
    let series = BoundSeries::compute(cfg, pool)?;
    match out {
        Some(p) => series.write(p)?,
        None => print!("{}", series.to_csv()),
    }
    if let Some(p) = dump_state {
        let state = evolve(&cfg.setup()?, cfg.t1);
        std::fs::write(p, serde_json::to_string(&state.to_dump())? + "\n")?;
    }
    Ok(series)
}

pub const FIGURE1_CS: [f64; 3] = [0.5, 1.0, 1.5];
pub const FIGURE1_T_END: f64 = 50.0;
pub const FIGURE1_FIT_WINDOW: (f64, f64) = (5.0, 50.0);
pub const FIGURE1_INSET_END: f64 = 0.1;

/// t = 0, 0.25, …, 50 merged with the inset grid 0, 0.005, …, 0.1.
pub fn figure1_times() -> Vec<f64> {
    let mut times: Vec<f64> = (0..=200).map(|i| i as f64 * 0.25).collect();
    times.extend((1..=20).map(|i| i as f64 * 0.005));
    times.sort_by(f64::total_cmp);
    times.dedup();
    times
}

pub fn figure1_csv_name(c: f64) -> String {
    format!("figure1_c{c:.1}.csv")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Figure1Fit {
    pub c: f64,
    #[serde(flatten)]
    pub fit: GrowthFit,
    /// Upper end of the window used for κ₁, κ₂.
    pub kappa_window_end: f64,
    /// Log-log slope of szego_sum(t) − szego_sum(0) on t ≤ 0.1.
    pub short_time_exponent: Option<f64>,
    pub value_at_end: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Figure1Curve {
    pub c: f64,
    /// (t, szego_sum, bk_bound)
    pub points: Vec<(f64, f64, f64)>,
}

impl Figure1Curve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,szego_sum,bk_bound\n");
        for &(t, s, b) in &self.points {
            push_cell(&mut out, Some(t));
            out.push(',');
            push_cell(&mut out, Some(s));
            out.push(',');
            push_cell(&mut out, Some(b));
            out.push('\n');
        }
        out
    }

    pub fn szego_series(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|&(t, s, _)| (t, s)).collect()
    }

    pub fn fit(&self) -> Result<Figure1Fit> {
        let lambda = TrigPolynomial::from_gap_family(self.c).0;
        let max_lambda = lambda.extrema(quench_core::spectral::POSITIVITY_GRID).max;
        let kappa_end = FIGURE1_INSET_END.min(0.2 / max_lambda.sqrt());
        let series = self.szego_series();
        let mut fit = fit_linear(&series, FIGURE1_FIT_WINDOW)?;
        let kappas = fit_quadratic_short_time(&series, kappa_end)?;
        fit.kappa1 = Some(kappas.kappa1);
        fit.kappa2 = Some(kappas.kappa2);
        let exponent = fit_quadratic_short_time(&series, FIGURE1_INSET_END)?.exponent;
        Ok(Figure1Fit {
            c: self.c,
            fit,
            kappa_window_end: kappa_end,
            short_time_exponent: exponent,
            value_at_end: self.value_at(FIGURE1_T_END).unwrap_or(f64::NAN),
        })
    }

    pub fn value_at(&self, t: f64) -> Option<f64> {
        self.points.iter().find(|p| p.0 == t).map(|p| p.1)
    }
}

pub fn figure1_curve(c: f64, times: &[f64]) -> Result<Figure1Curve> {
    let lambda = TrigPolynomial::from_gap_family(c).0;
    let beta = TrigPolynomial::constant(1.0);
    let points = times
        .par_iter()
        .map(|&t| {
            let s = szego_bound(&lambda, &beta, t, None)?.0.value;
            let b = bk_bound(&lambda, &beta, t, None)?.value;
            Ok((t, s, b))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Figure1Curve { c, points })
}

/// Writes `figure1_c{0.5,1.0,1.5}.csv` and `figure1_fits.json` into
/// `out_dir`, then checks the curve ordering at t = 50.
pub fn cmd_figure1(out_dir: &Path, pool: &rayon::ThreadPool) -> Result<Vec<Figure1Fit>> {
    std::fs::create_dir_all(out_dir)?;
    let times = figure1_times();
    let curves = pool.install(|| {
        FIGURE1_CS
            .iter()
            .map(|&c| figure1_curve(c, &times))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut fits = Vec::with_capacity(curves.len());
    for curve in &curves {
        std::fs::write(out_dir.join(figure1_csv_name(curve.c)), curve.to_csv())?;
        fits.push(curve.fit()?);
    }
    std::fs::write(out_dir.join("figure1_fits.json"), serde_json::to_string_pretty(&fits)? + "\n")?;

    let ends: Vec<f64> = fits.iter().map(|f| f.value_at_end).collect();
    if !(ends[0] > ends[1] && ends[1] > ends[2]) {
        return Err(CliError::Verification(format!(
            "curve ordering at t = {FIGURE1_T_END} violated: c=0.5 {}, c=1 {}, c=1.5 {}",
            ends[0], ends[1], ends[2]
        )));
    }
    Ok(fits)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    C,
    Size,
    Cut,
    T1,
}

impl std::str::FromStr for SweepParam {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "c" => Ok(SweepParam::C),
            "N" => Ok(SweepParam::Size),
            "n" => Ok(SweepParam::Cut),
            "t1" => Ok(SweepParam::T1),
            _ => Err(CliError::Usage(format!("sweep parameter must be one of c, N, n, t1, got `{s}`"))),
        }
    }
}

impl SweepParam {
    /// Applies one sweep value to the base config. Sweeping N also moves the
    /// cut to N/2.
    pub fn apply(self, base: &ScenarioConfig, value: &str) -> Result<ScenarioConfig> {
        let bad = || CliError::Usage(format!("bad sweep value `{value}`"));
        let mut cfg = base.clone();
        match self {
            SweepParam::C => {
                let c: f64 = value.parse().map_err(|_| bad())?;
                cfg.lambda = format!("gap:c={c}");
            }
            SweepParam::Size => {
                cfg.size = value.parse().map_err(|_| bad())?;
                cfg.n = cfg.size / 2;
            }
            SweepParam::Cut => cfg.n = value.parse().map_err(|_| bad())?,
            SweepParam::T1 => cfg.t1 = value.parse().map_err(|_| bad())?,
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn parse_values(s: &str) -> Result<Vec<String>> {
    let values: Vec<String> = s
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(String::from)
        .collect();
    if values.is_empty() {
        return Err(CliError::Usage("empty sweep value list".into()));
    }
    Ok(values)
}

/// One series per value, concatenated under a leading `param_value` column.
pub fn cmd_sweep(
    param: SweepParam,
    values: &[String],
    base: &ScenarioConfig,
    pool: &rayon::ThreadPool,
    out: Option<&Path>,
) -> Result<String> {
    if values.is_empty() {
        return Err(CliError::Usage("empty sweep value list".into()));
    }
    let configs = values
        .iter()
        .map(|v| param.apply(base, v))
        .collect::<Result<Vec<_>>>()?;
    let series = pool.install(|| {
        configs
            .par_iter()
            .map(|cfg| BoundSeries::compute(cfg, pool))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut csv = format!("param_value,{CSV_HEADER}\n");
    for (value, s) in values.iter().zip(&series) {
        for row in &s.rows {
            write_row(&mut csv, Some(value), row);
        }
    }
    match out {
        Some(p) => {
            std::fs::write(p, &csv)?;
            let meta: Vec<_> = series.iter().map(|s| &s.metadata).collect();
            std::fs::write(crate::series::meta_path(p), serde_json::to_string_pretty(&meta)? + "\n")?;
        }
        None => print!("{csv}"),
    }
    Ok(csv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure1_grid() {
        let t = figure1_times();
        assert_eq!(t.len(), 201 + 20);
        assert_eq!(t[0], 0.0);
        assert_eq!(*t.last().unwrap(), 50.0);
        assert!(t.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn csv_names() {
        let names: Vec<String> = FIGURE1_CS.iter().map(|&c| figure1_csv_name(c)).collect();
        assert_eq!(names, ["figure1_c0.5.csv", "figure1_c1.0.csv", "figure1_c1.5.csv"]);
    }

    #[test]
    fn sweep_values_apply() {
        let base = ScenarioConfig::default();
        let cfg = SweepParam::Size.apply(&base, "32").unwrap();
        assert_eq!((cfg.size, cfg.n), (32, 16));
        assert_eq!(SweepParam::C.apply(&base, "1").unwrap().lambda, "gap:c=1");
        assert!(SweepParam::Cut.apply(&base, "64").is_err());
        assert!(SweepParam::T1.apply(&base, "x").is_err());
        assert!(parse_values(" , ").is_err());
        assert!("q".parse::<SweepParam>().is_err());
    }
}
