//! Thermodynamic-limit bounds built from the Fourier coefficients of Λ(θ, t).
//!
//! * c_k of ln Λ⁻¹ feed the strong Szegő bound S ≥ Σ_{k≥1} k c_k².
//! * b_k of Λ⁻¹ (momentum correlations) feed the weaker bound
//!   (1/M²) Σ_{k≥1} k b_k², and split as b_k = ς_k + μ_k(t) into a static
//!   part and an oscillating part whose support spreads inside a light cone.
//!
//! All coefficients are computed by trapezoidal quadrature on a uniform grid,
//! doubling the grid until the coefficients stop moving.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::lambda_of_t;
use crate::spectral::{Positivity, TrigPolynomial};

pub const DEFAULT_QUAD_POINTS: usize = 8192;
pub const MAX_QUAD_POINTS: usize = 1 << 22;
pub const QUAD_TOL: f64 = 1e-9;
pub const TAIL_RATIO: f64 = 1e-12;
pub const MAX_K: usize = 1 << 20;
/// Relative level below which μ_k counts as outside the light cone.
pub const CONE_THRESHOLD: f64 = 1e-6;

const TAIL_WINDOW: usize = 8;

/// Real Fourier coefficients f_k = (1/2π)∫ f(θ) e^{−ikθ} dθ, k = 0..=k_max.
#[derive(Clone, Debug, PartialEq)]
pub struct Coefficients {
    pub values: Vec<f64>,
    pub quad_points: usize,
    /// Largest imaginary part seen; nonzero only through rounding.
    pub max_imag: f64,
    /// Largest change between the last two grid refinements.
    pub change: f64,
}

impl Coefficients {
    pub fn k_max(&self) -> usize {
        self.values.len() - 1
    }
}

fn grid_coeffs(f: &dyn Fn(f64) -> f64, points: usize, k_max: usize) -> (Vec<f64>, f64) {
    let h = TAU / points as f64;
    let mut buf: Vec<Complex64> = (0..points).map(|j| Complex64::new(f(h * j as f64), 0.0)).collect();
    FftPlanner::new().plan_fft_forward(points).process(&mut buf);
    let scale = 1.0 / points as f64;
    let max_imag = buf[..=k_max].iter().fold(0.0_f64, |acc, z| acc.max((z.im * scale).abs()));
    (buf[..=k_max].iter().map(|z| z.re * scale).collect(), max_imag)
}

/// Quadrature with automatic grid doubling until every coefficient changes
/// by at most `QUAD_TOL`.
pub fn fourier_coeffs(f: &dyn Fn(f64) -> f64, k_max: usize, quad_points: usize) -> Result<Coefficients> {
    let mut points = quad_points.max(8 * k_max).max(16).next_power_of_two();
    let (mut coarse, _) = grid_coeffs(f, points, k_max);
    loop {
        if points >= MAX_QUAD_POINTS {
            return Err(Error::QuadratureNotConverged { points, change: f64::NAN });
        }
        points *= 2;
        let (fine, max_imag) = grid_coeffs(f, points, k_max);
        let change = coarse.iter().zip(&fine).fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()));
        if change <= QUAD_TOL {
            return Ok(Coefficients {
                values: fine,
                quad_points: points,
                max_imag,
                change,
            });
        }
        if points >= MAX_QUAD_POINTS {
            return Err(Error::QuadratureNotConverged { points, change });
        }
        coarse = fine;
    }
}

/// c_k = (1/2π)∫ ln Λ⁻¹(θ, t) e^{−ikθ} dθ.
pub fn log_symbol_coeffs(
    lambda: &TrigPolynomial,
    beta: &TrigPolynomial,
    t: f64,
    k_max: usize,
    quad_points: usize,
) -> Result<Coefficients> {
    fourier_coeffs(&|theta| -lambda_of_t(lambda, beta, theta, t).ln(), k_max, quad_points)
}

/// b_k = (1/2π)∫ Λ⁻¹(θ, t) e^{−ikθ} dθ.
pub fn bk_coeffs(
    lambda: &TrigPolynomial,
    beta: &TrigPolynomial,
    t: f64,
    k_max: usize,
    quad_points: usize,
) -> Result<Coefficients> {
    fourier_coeffs(&|theta| 1.0 / lambda_of_t(lambda, beta, theta, t), k_max, quad_points)
}

/// Static and oscillating parts of b_k:
///
/// ς_k = (1/4π)∫ (λ + β²)/(βλ) cos kθ dθ,
/// μ_k(t) = (1/4π)∫ (λ − β²)/(λβ) cos(2t√λ) cos kθ dθ,
///
/// both over the full circle. Requires a gapped λ.
pub fn mu_sigma(
    lambda: &TrigPolynomial,
    beta: &TrigPolynomial,
    t: f64,
    k_max: usize,
    quad_points: usize,
) -> Result<(Coefficients, Coefficients)> {
    require_gapped(lambda)?;
    let sigma = fourier_coeffs(
        &|theta| {
            let (l, b) = (lambda.eval(theta), beta.eval(theta));
            0.5 * (l + b * b) / (b * l)
        },
        k_max,
        quad_points,
    )?;
    let mu = fourier_coeffs(
        &|theta| {
            let (l, b) = (lambda.eval(theta), beta.eval(theta));
            0.5 * (l - b * b) / (l * b) * (2.0 * t * l.sqrt()).cos()
        },
        k_max,
        quad_points,
    )?;
    Ok((sigma, mu))
}

fn require_gapped(lambda: &TrigPolynomial) -> Result<()> {
    match lambda.positivity() {
        Positivity::Positive => Ok(()),
        _ => Err(Error::CriticalSymbol {
            min: lambda.extrema(crate::spectral::POSITIVITY_GRID).min,
        }),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SzegoSum {
    pub value: f64,
    /// max k c_k² over the last few retained coefficients.
    pub tail: f64,
    pub k_max: usize,
}

/// Σ_{k=1}^{k_max} k c_k², with the truncation tail checked against the sum.
pub fn szego_sum(c: &[f64]) -> Result<SzegoSum> {
    let s = weighted_square_sum(c);
    check_tail(c, s)
}

fn weighted_square_sum(c: &[f64]) -> f64 {
    c.iter().enumerate().skip(1).map(|(k, x)| k as f64 * x * x).sum()
}

fn check_tail(c: &[f64], value: f64) -> Result<SzegoSum> {
    let k_max = c.len().saturating_sub(1);
    let start = c.len().saturating_sub(TAIL_WINDOW).max(1);
    let tail = (start..c.len()).map(|k| k as f64 * c[k] * c[k]).fold(0.0, f64::max);
    if tail <= TAIL_RATIO * value {
        Ok(SzegoSum { value, tail, k_max })
    } else {
        Err(Error::TailNotConverged {
            k_max,
            tail,
            suggested: (2 * k_max).max(64),
        })
    }
}

/// ceil(4 v_g t) + 64 for gapped λ. For critical λ, where v_g is undefined,
/// the Bernstein rate K max λ is used instead; callers grow it on demand.
pub fn default_k_max(lambda: &TrigPolynomial, t: f64) -> usize {
    let speed = lambda.group_velocity_bound().unwrap_or_else(|_| {
        lambda.degree() as f64 * lambda.extrema(crate::spectral::POSITIVITY_GRID).max
    });
    (4.0 * speed * t.abs()).ceil() as usize + 64
}

/// Szegő sum at time t, growing k_max until the tail criterion holds.
pub fn szego_bound(
    lambda: &TrigPolynomial,
    beta: &TrigPolynomial,
    t: f64,
    k_max: Option<usize>,
) -> Result<(SzegoSum, Coefficients)> {
    let mut k = k_max.unwrap_or_else(|| default_k_max(lambda, t));
    loop {
        let c = log_symbol_coeffs(lambda, beta, t, k, DEFAULT_QUAD_POINTS)?;
        match szego_sum(&c.values) {
            Ok(s) => return Ok((s, c)),
            Err(Error::TailNotConverged { suggested, .. }) if k_max.is_none() && suggested <= MAX_K => {
                k = suggested;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Parseval form of the Szegő sum as a double integral over the torus,
///
/// (1/32π²) ∫∫_{[−π,π]²} ln²[Λ(η₁−η₂,t)/Λ(η₁+η₂,t)] / sin²η₂ dη₁dη₂,
///
/// evaluated with a uniform grid in η₁ and a midpoint grid in η₂ so that the
/// removable singularities at η₂ ∈ {0, ±π} are never sampled.
pub fn parseval_check(lambda: &TrigPolynomial, beta: &TrigPolynomial, t: f64, grid: usize) -> f64 {
    let g = grid.max(2) + grid % 2;
    let h = TAU / g as f64;
    // η₁ = −π + ih and η₂ = −π + (j+½)h put η₁ ± η₂ on the half-offset nodes (l+½)h
    let log_lambda: Vec<f64> = (0..g)
        .map(|l| lambda_of_t(lambda, beta, (l as f64 + 0.5) * h, t).ln())
        .collect();
    let mut total = 0.0;
    for j in 0..g {
        let eta2 = -PI + (j as f64 + 0.5) * h;
        let weight = 1.0 / eta2.sin().powi(2);
        let mut row = 0.0;
        for i in 0..g {
            let sum = log_lambda[(i + j) % g];
            let diff = log_lambda[(i + 2 * g - j - 1) % g];
            row += (diff - sum).powi(2);
        }
        total += weight * row;
    }
    total * h * h / (32.0 * PI * PI)
}

/// Extreme values of Λ(·, t) located on a grid and polished by golden-section search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolRange {
    pub min: f64,
    pub max: f64,
}

impl SymbolRange {
    /// M in (1/M²)Σ k b_k²: an upper bound on both Λ and Λ⁻¹, so that the
    /// mean-value estimate |ln x − ln y| ≥ |x − y|/M holds for the values of
    /// Λ⁻¹ whose Fourier coefficients are the b_k.
    pub fn bound_scale(&self) -> f64 {
        self.max.max(1.0 / self.min)
    }
}

pub fn symbol_range(lambda: &TrigPolynomial, beta: &TrigPolynomial, t: f64, grid: usize) -> SymbolRange {
    let f = |theta: f64| lambda_of_t(lambda, beta, theta, t);
    let h = TAU / grid as f64;
    let (mut imin, mut imax) = (0, 0);
    let (mut vmin, mut vmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 0..grid {
        let v = f(h * j as f64);
        if v < vmin {
            vmin = v;
            imin = j;
        }
        if v > vmax {
            vmax = v;
            imax = j;
        }
    }
    let max = golden_max(&f, h * imax as f64, h).max(vmax);
    let min = -golden_max(&|x| -f(x), h * imin as f64, h);
    SymbolRange { min: min.min(vmin), max }
}

fn golden_max(f: &dyn Fn(f64) -> f64, center: f64, h: f64) -> f64 {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (center - h, center + h);
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > 1e-12 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        }
    }
    f1.max(f2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BkBound {
    pub value: f64,
    /// M used in the prefactor 1/M².
    pub scale: f64,
    pub range: SymbolRange,
}

/// (1/M²) Σ_{k≥1} k b_k² with M from [`SymbolRange::bound_scale`].
pub fn bk_bound(lambda: &TrigPolynomial, beta: &TrigPolynomial, t: f64, k_max: Option<usize>) -> Result<BkBound> {
    let mut k = k_max.unwrap_or_else(|| default_k_max(lambda, t));
    let b = loop {
        let b = bk_coeffs(lambda, beta, t, k, DEFAULT_QUAD_POINTS)?;
        let sum = weighted_square_sum(&b.values);
        match check_tail(&b.values, sum) {
            Ok(_) => break b,
            Err(Error::TailNotConverged { suggested, .. }) if k_max.is_none() && suggested <= MAX_K => {
                k = suggested;
            }
            Err(e) => return Err(e),
        }
    };
    let range = symbol_range(lambda, beta, t, DEFAULT_QUAD_POINTS);
    let scale = range.bound_scale();
    Ok(BkBound {
        value: weighted_square_sum(&b.values) / (scale * scale),
        scale,
        range,
    })
}

/// Everything the bound chain needs at one time point.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierSeries {
    pub t: f64,
    pub k_max: usize,
    /// Fourier coefficients of ln Λ⁻¹.
    pub c: Vec<f64>,
    /// Fourier coefficients of Λ⁻¹.
    pub b: Vec<f64>,
    /// Static/oscillating split of `b`; absent for critical λ.
    pub sigma: Option<Vec<f64>>,
    pub mu: Option<Vec<f64>>,
    pub range: SymbolRange,
    /// Largest imaginary part among all coefficient sets.
    pub max_imag: f64,
}

impl FourierSeries {
    pub fn compute(lambda: &TrigPolynomial, beta: &TrigPolynomial, t: f64, k_max: usize) -> Result<Self> {
        let c = log_symbol_coeffs(lambda, beta, t, k_max, DEFAULT_QUAD_POINTS)?;
        let b = bk_coeffs(lambda, beta, t, k_max, DEFAULT_QUAD_POINTS)?;
        let (sigma, mu) = match mu_sigma(lambda, beta, t, k_max, DEFAULT_QUAD_POINTS) {
            Ok((s, m)) => (Some(s), Some(m)),
            Err(Error::CriticalSymbol { .. }) => (None, None),
            Err(e) => return Err(e),
        };
        let max_imag = [&c, &b]
            .into_iter()
            .chain(sigma.as_ref())
            .chain(mu.as_ref())
            .fold(0.0_f64, |acc, x| acc.max(x.max_imag));
        Ok(Self {
            t,
            k_max,
            c: c.values,
            b: b.values,
            sigma: sigma.map(|s| s.values),
            mu: mu.map(|m| m.values),
            range: symbol_range(lambda, beta, t, DEFAULT_QUAD_POINTS),
            max_imag,
        })
    }

    /// max_k |b_k − (ς_k + μ_k)|.
    pub fn recombination_residual(&self) -> Option<f64> {
        let (sigma, mu) = (self.sigma.as_ref()?, self.mu.as_ref()?);
        Some(
            self.b
                .iter()
                .zip(sigma.iter().zip(mu))
                .fold(0.0, |acc, (b, (s, m))| acc.max((b - s - m).abs())),
        )
    }

    pub fn szego_sum(&self) -> f64 {
        weighted_square_sum(&self.c)
    }

    pub fn bk_bound(&self) -> f64 {
        let m = self.range.bound_scale();
        weighted_square_sum(&self.b) / (m * m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeSlice {
    pub t: f64,
    pub mu_abs: Vec<f64>,
    /// Smallest k beyond which every |μ_k| stays below `CONE_THRESHOLD` of the slice max.
    pub edge: usize,
}

/// |μ_k(t)| for each requested time, with the measured light-cone edge.
pub fn light_cone_profile(
    lambda: &TrigPolynomial,
    beta: &TrigPolynomial,
    times: &[f64],
    k_max: usize,
) -> Result<Vec<ConeSlice>> {
    times
        .iter()
        .map(|&t| {
            let (_, mu) = mu_sigma(lambda, beta, t, k_max, DEFAULT_QUAD_POINTS)?;
            let mu_abs: Vec<f64> = mu.values.iter().map(|x| x.abs()).collect();
            let peak = mu_abs.iter().copied().fold(0.0, f64::max);
            let edge = mu_abs
                .iter()
                .rposition(|&x| x >= CONE_THRESHOLD * peak && peak > 0.0)
                .map_or(0, |k| k + 1);
            Ok(ConeSlice { t, mu_abs, edge })
        })
        .collect()
}

/// Least-squares line through a time series, and optionally the short-time
/// quadratic coefficients of the same series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub kappa1: Option<f64>,
    pub kappa2: Option<f64>,
}

pub const MIN_FIT_POINTS: usize = 10;

pub fn fit_linear(series: &[(f64, f64)], window: (f64, f64)) -> Result<GrowthFit> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .copied()
        .filter(|&(t, _)| t >= window.0 && t <= window.1)
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::DegenerateFit(format!(
            "{} points in window [{}, {}], need {MIN_FIT_POINTS}",
            pts.len(),
            window.0,
            window.1
        )));
    }
    let (slope, intercept, r_squared) = least_squares(&pts)?;
    Ok(GrowthFit {
        slope,
        intercept,
        r_squared,
        window,
        kappa1: None,
        kappa2: None,
    })
}

/// (slope, intercept, R²) of y against x.
fn least_squares(pts: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::DegenerateFit("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    Ok((slope, intercept, r_squared))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortTimeFit {
    pub kappa1: f64,
    pub kappa2: f64,
    /// Log-log slope of (value − baseline) against t; `None` when the series
    /// never rises above its baseline.
    pub exponent: Option<f64>,
}

/// Fits value ≈ κ₁ + κ₂t² on points with t ≤ t_max and measures the actual
/// power law. The baseline for the exponent is the t = 0 sample when present,
/// κ₁ otherwise.
pub fn fit_quadratic_short_time(series: &[(f64, f64)], t_max: f64) -> Result<ShortTimeFit> {
    let pts: Vec<(f64, f64)> = series.iter().copied().filter(|&(t, _)| t.abs() <= t_max).collect();
    if pts.len() < 3 {
        return Err(Error::DegenerateFit(format!("{} points with t <= {t_max}", pts.len())));
    }
    let squared: Vec<(f64, f64)> = pts.iter().map(|&(t, v)| (t * t, v)).collect();
    let (kappa2, kappa1, _) = least_squares(&squared)?;
    let baseline = pts.iter().find(|p| p.0 == 0.0).map_or(kappa1, |p| p.1);
    let logs: Vec<(f64, f64)> = pts
        .iter()
        .filter(|&&(t, v)| t > 0.0 && v - baseline > 0.0)
        .map(|&(t, v)| (t.ln(), (v - baseline).ln()))
        .collect();
    let rises = pts.iter().any(|&(t, v)| t > 0.0 && (v - baseline).abs() > 1e-14 * baseline.abs().max(1.0));
    let exponent = if logs.len() >= 2 && rises {
        Some(least_squares(&logs)?.0)
    } else {
        None
    };
    Ok(ShortTimeFit {
        kappa1,
        kappa2,
        exponent,
    })
}
