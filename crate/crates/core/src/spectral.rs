//! Even real trigonometric polynomials used as spectral functions (symbols)
//! of circulant coupling matrices, and the circulant matrices they generate.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid used when certifying positivity of a symbol.
pub const POSITIVITY_GRID: usize = 4096;

const REFINE_TOL: f64 = 1e-10;

/// f(θ) = a₀ + Σ_{m=1..K} a_m cos(mθ).
///
/// Only cosine terms are representable, so every value is real and even in θ.
/// Trailing zero coefficients are dropped so that `degree()` is the true
/// degree K.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TrigPolynomial {
    coeffs: Vec<f64>,
}

/// Sign classification of a symbol over the circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Positivity {
    /// min f > 0.
    Positive,
    /// min f = 0 within tolerance (gapless).
    Critical,
    /// f takes negative values.
    Indefinite,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extrema {
    pub min: f64,
    pub max: f64,
    pub argmin: f64,
    pub argmax: f64,
}

impl TrigPolynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Parse(String::new(), "no coefficients".into()));
        }
        if let Some(bad) = coeffs.iter().find(|a| !a.is_finite()) {
            return Err(Error::Parse(format!("{coeffs:?}"), format!("non-finite coefficient {bad}")));
        }
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == 0.0 {
            coeffs.pop();
        }
        Ok(Self { coeffs })
    }

    pub fn constant(value: f64) -> Self {
        Self { coeffs: vec![value] }
    }

    /// The family λ(θ) = (c − cos θ)², expanded as (c² + ½) − 2c cos θ + ½ cos 2θ.
    ///
    /// The second component reports whether the symbol is gapped
    /// (`Positive`, c > 1 in absolute value) or gapless (`Critical`).
    pub fn from_gap_family(c: f64) -> (Self, Positivity) {
        let poly = Self {
            coeffs: vec![c * c + 0.5, -2.0 * c, 0.5],
        };
        let positivity = if c.abs() > 1.0 {
            Positivity::Positive
        } else {
            Positivity::Critical
        };
        (poly, positivity)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(m, a)| a * (m as f64 * theta).cos())
            .sum()
    }

    pub fn derivative(&self, theta: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(m, a)| -(m as f64) * a * (m as f64 * theta).sin())
            .sum()
    }

    /// Samples f(2πj/n) for j = 0..n.
    pub fn sample(&self, n: usize) -> Vec<f64> {
        (0..n).map(|j| self.eval(TAU * j as f64 / n as f64)).collect()
    }

    /// Minimum and maximum over the circle: uniform grid scan followed by
    /// bisection on f' inside the bracketing grid cells.
    pub fn extrema(&self, grid_size: usize) -> Extrema {
        if self.is_constant() {
            let a = self.coeffs[0];
            return Extrema {
                min: a,
                max: a,
                argmin: 0.0,
                argmax: 0.0,
            };
        }
        let grid = grid_size.max(4 * self.degree()).max(8);
        let h = TAU / grid as f64;
        let (mut imin, mut imax) = (0, 0);
        let (mut vmin, mut vmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for j in 0..grid {
            let v = self.eval(h * j as f64);
            if v < vmin {
                vmin = v;
                imin = j;
            }
            if v > vmax {
                vmax = v;
                imax = j;
            }
        }
        let (argmin, min) = self.refine(h * imin as f64, h, vmin, false);
        let (argmax, max) = self.refine(h * imax as f64, h, vmax, true);
        Extrema {
            min,
            max,
            argmin,
            argmax,
        }
    }

    fn refine(&self, center: f64, h: f64, grid_value: f64, maximize: bool) -> (f64, f64) {
        // for a minimum f' goes from negative to positive; flip for a maximum
        let sign = if maximize { -1.0 } else { 1.0 };
        let d = |x: f64| sign * self.derivative(x);
        let (mut lo, mut hi) = (center - h, center + h);
        if d(lo) > 0.0 || d(hi) < 0.0 {
            return (center.rem_euclid(TAU), grid_value);
        }
        while hi - lo > REFINE_TOL {
            let mid = 0.5 * (lo + hi);
            if d(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x = 0.5 * (lo + hi);
        let v = self.eval(x);
        let better = if maximize { v >= grid_value } else { v <= grid_value };
        if better {
            (x.rem_euclid(TAU), v)
        } else {
            (center.rem_euclid(TAU), grid_value)
        }
    }

    /// Classifies the sign of f using the certification grid.
    pub fn positivity(&self) -> Positivity {
        let ext = self.extrema(POSITIVITY_GRID);
        let tol = 1e-12 * ext.max.abs().max(1.0);
        if ext.min > tol {
            Positivity::Positive
        } else if ext.min >= -tol {
            Positivity::Critical
        } else {
            Positivity::Indefinite
        }
    }

    /// Light-cone velocity v_g = K · max λ / √(min λ), from Bernstein's
    /// inequality max |λ'| ≤ K max λ.
    pub fn group_velocity_bound(&self) -> Result<f64> {
        if self.is_constant() {
            return if self.coeffs[0] > 0.0 {
                Ok(0.0)
            } else {
                Err(Error::CriticalSymbol { min: self.coeffs[0] })
            };
        }
        let ext = self.extrema(POSITIVITY_GRID);
        match self.positivity() {
            Positivity::Positive => Ok(self.degree() as f64 * ext.max / ext.min.sqrt()),
            _ => Err(Error::CriticalSymbol { min: ext.min }),
        }
    }

    /// The symmetric circulant matrix whose offset-d entry is
    /// (1/2π)∫ f(θ) e^{−idθ} dθ.
    pub fn build_circulant(&self, size: usize) -> Result<CirculantMatrix> {
        let degree = self.degree();
        if size <= 2 * degree {
            return Err(Error::SizeTooSmall { size, degree });
        }
        let mut first_row = vec![0.0; size];
        first_row[0] = self.coeffs[0];
        for (m, &a) in self.coeffs.iter().enumerate().skip(1) {
            first_row[m] += 0.5 * a;
            first_row[size - m] += 0.5 * a;
        }
        Ok(CirculantMatrix { first_row })
    }
}

impl TryFrom<Vec<f64>> for TrigPolynomial {
    type Error = Error;

    fn try_from(coeffs: Vec<f64>) -> Result<Self> {
        Self::new(coeffs)
    }
}

impl From<TrigPolynomial> for Vec<f64> {
    fn from(p: TrigPolynomial) -> Self {
        p.coeffs
    }
}

/// Parses `poly:a0,a1,...,aK` or `gap:c=<value>`.
impl FromStr for TrigPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = |msg: &str| Error::Parse(s.to_string(), msg.to_string());
        let (kind, body) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| err("expected `poly:...` or `gap:c=...`"))?;
        match kind.trim() {
            "poly" => {
                let coeffs = body
                    .split(',')
                    .map(|x| x.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| err(&e.to_string()))?;
                Self::new(coeffs).map_err(|e| match e {
                    Error::Parse(_, msg) => err(&msg),
                    other => other,
                })
            }
            "gap" => {
                let value = body
                    .trim()
                    .strip_prefix("c=")
                    .ok_or_else(|| err("expected `c=<value>`"))?;
                let c: f64 = value.trim().parse().map_err(|e: std::num::ParseFloatError| err(&e.to_string()))?;
                if !c.is_finite() {
                    return Err(err("c must be finite"));
                }
                Ok(Self::from_gap_family(c).0)
            }
            other => Err(err(&format!("unknown kind `{other}`"))),
        }
    }
}

impl fmt::Display for TrigPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.coeffs.iter().map(|a| format!("{a}")).collect();
        write!(f, "poly:{}", body.join(","))
    }
}

/// Real circulant matrix stored by its first row; row k is the first row
/// cyclically shifted right by k.
#[derive(Clone, Debug, PartialEq)]
pub struct CirculantMatrix {
    first_row: Vec<f64>,
}

impl CirculantMatrix {
    pub fn size(&self) -> usize {
        self.first_row.len()
    }

    pub fn first_row(&self) -> &[f64] {
        &self.first_row
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        let n = self.size();
        self.first_row[(col + n - row % n) % n]
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.size();
        DMatrix::from_fn(n, n, |i, j| self.entry(i, j))
    }

    /// Eigenvalues in Fourier order: the j-th value belongs to the mode
    /// θ_j = 2πj/N.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.size();
        let mut buf: Vec<Complex64> = self.first_row.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }
}

/// θ_j = 2πj/N in [0, 2π).
pub fn mode_angle(j: usize, size: usize) -> f64 {
    TAU * j as f64 / size as f64
}

/// Folds an angle into (−π, π].
pub fn wrap_angle(theta: f64) -> f64 {
    let x = theta.rem_euclid(TAU);
    if x > PI {
        x - TAU
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gap15() -> TrigPolynomial {
        TrigPolynomial::from_gap_family(1.5).0
    }

    #[test]
    fn eval_gap_family() {
        let f = gap15();
        assert_eq!(f.coeffs(), &[2.75, -3.0, 0.5]);
        assert!((f.eval(0.0) - 0.25).abs() < 1e-14);
        assert!((f.eval(PI) - 6.25).abs() < 1e-14);
        assert_eq!(TrigPolynomial::constant(1.0).eval(0.37), 1.0);
    }

    #[test]
    fn gap_family_coefficients() {
        let (p, pos) = TrigPolynomial::from_gap_family(1.0);
        assert_eq!(p.coeffs(), &[1.5, -2.0, 0.5]);
        assert_eq!(pos, Positivity::Critical);
        assert!(p.extrema(4096).min.abs() < 1e-15);
        assert_eq!(p.positivity(), Positivity::Critical);

        let (p, pos) = TrigPolynomial::from_gap_family(0.5);
        assert_eq!(p.coeffs(), &[0.75, -1.0, 0.5]);
        assert_eq!(pos, Positivity::Critical);
        assert_eq!(TrigPolynomial::from_gap_family(1.5).1, Positivity::Positive);
    }

    #[test]
    fn circulant_first_row() {
        let c = gap15().build_circulant(8).unwrap();
        assert_eq!(c.first_row(), &[2.75, -1.5, 0.25, 0.0, 0.0, 0.0, 0.25, -1.5]);
        let one = TrigPolynomial::constant(1.0).build_circulant(4).unwrap();
        assert_eq!(one.first_row(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn circulant_rejects_small_size() {
        assert_eq!(
            gap15().build_circulant(4),
            Err(Error::SizeTooSmall { size: 4, degree: 2 })
        );
        assert!(gap15().build_circulant(5).is_ok());
    }

    #[test]
    fn circulant_eigenvalues_are_symbol_samples() {
        let f = TrigPolynomial::new(vec![3.0, 0.7, -0.4, 0.25]).unwrap();
        for n in [7, 8, 33] {
            let c = f.build_circulant(n).unwrap();
            for (j, ev) in c.eigenvalues().iter().enumerate() {
                assert!((ev - f.eval(mode_angle(j, n))).abs() < 1e-12);
            }
            let dense = c.to_dense();
            assert_eq!(dense, dense.transpose());
            for i in 1..n {
                for j in 0..n {
                    assert_eq!(dense[(i, j)], dense[(i - 1, (j + n - 1) % n)]);
                }
            }
        }
    }

    #[test]
    fn extrema_closed_forms() {
        let e = gap15().extrema(4096);
        assert!((e.min - 0.25).abs() < 1e-12);
        assert!(wrap_angle(e.argmin).abs() < 1e-9);
        assert!((e.max - 6.25).abs() < 1e-12);
        assert!((e.argmax - PI).abs() < 1e-9);

        let e = TrigPolynomial::constant(1.0).extrema(16);
        assert_eq!((e.min, e.max), (1.0, 1.0));

        let e = TrigPolynomial::from_gap_family(0.5).0.extrema(4096);
        assert!(e.min.abs() < 1e-15);
        let root = wrap_angle(e.argmin).abs();
        assert!((root - PI / 3.0).abs() < 1e-9, "argmin {root}");
    }

    #[test]
    fn group_velocity() {
        assert!((gap15().group_velocity_bound().unwrap() - 25.0).abs() < 1e-9);
        assert_eq!(TrigPolynomial::constant(1.0).group_velocity_bound().unwrap(), 0.0);
        let f = TrigPolynomial::new(vec![2.0, -1.0]).unwrap();
        assert!((f.group_velocity_bound().unwrap() - 3.0).abs() < 1e-9);
        assert!(matches!(
            TrigPolynomial::from_gap_family(1.0).0.group_velocity_bound(),
            Err(Error::CriticalSymbol { .. })
        ));
    }

    #[test]
    fn parse_formats() {
        let p: TrigPolynomial = "gap:c=1.5".parse().unwrap();
        assert_eq!(p, gap15());
        let q: TrigPolynomial = "poly: 2.75, -3, 0.5".parse().unwrap();
        assert_eq!(q, gap15());
        let r: TrigPolynomial = q.to_string().parse().unwrap();
        assert_eq!(r, q);
        let one: TrigPolynomial = "poly:1,0,0".parse().unwrap();
        assert_eq!(one.degree(), 0);
        for bad in ["", "poly:", "poly:1,x", "gap:1.5", "sin:1", "gap:c=nan"] {
            assert!(bad.parse::<TrigPolynomial>().is_err(), "{bad}");
        }
    }
}
