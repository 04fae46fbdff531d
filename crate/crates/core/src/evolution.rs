//! Exact Gaussian time evolution after a quench, one Fourier mode at a time.
//!
//! For H = ½p² + ½xᵀVx and an initial Gaussian exp(−½xᵀBx) with circulant V
//! and B, the evolved wavefunction is exp(−½xᵀA(t)x) with A(t) circulant. In
//! the Fourier basis each mode obeys the scalar Riccati equation
//! i ȧ = a² − λ, a(0) = β, solved in closed form by [`mode_symbol`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{mode_angle, Positivity, TrigPolynomial};

const DIVERGENCE_LIMIT: f64 = 1e8;

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// cos(t√λ) and sin(t√λ)/√λ, the latter continuous through λ = 0.
fn trig_pair(lambda: f64, t: f64) -> (f64, f64) {
    let s = lambda.max(0.0).sqrt();
    ((t * s).cos(), t * sinc(t * s))
}

/// Closed-form mode amplitude a(t) for symbol values λ ≥ 0 and β > 0:
///
/// a = √λ (cos(t√λ) β + i√λ sin(t√λ)) / (cos(t√λ) √λ + i sin(t√λ) β).
///
/// Numerator and denominator are divided through by √λ, which turns the
/// λ = 0 mode into β / (1 + itβ) without a special case.
pub fn mode_symbol(lambda: f64, beta: f64, t: f64) -> Complex64 {
    let (c, s_over_root) = trig_pair(lambda, t);
    let lambda = lambda.max(0.0);
    let num = Complex64::new(c * beta, lambda * s_over_root);
    let den = Complex64::new(c, beta * s_over_root);
    num / den
}

/// Λ = βλ / (λ cos²(t√λ) + β² sin²(t√λ)), the real part of [`mode_symbol`].
pub fn spectral_value(lambda: f64, beta: f64, t: f64) -> f64 {
    let (c, s_over_root) = trig_pair(lambda, t);
    beta / (c * c + beta * beta * s_over_root * s_over_root)
}

/// Λ(θ, t): spectral function of Re A(t).
pub fn lambda_of_t(lambda: &TrigPolynomial, beta: &TrigPolynomial, theta: f64, t: f64) -> f64 {
    spectral_value(lambda.eval(theta), beta.eval(theta), t)
}

/// Quadratic short-time approximant β[1 − (β² − λ)t²].
pub fn short_time_lambda(lambda: &TrigPolynomial, beta: &TrigPolynomial, theta: f64, t: f64) -> f64 {
    let (l, b) = (lambda.eval(theta), beta.eval(theta));
    b * (1.0 - (b * b - l) * t * t)
}

/// Hamiltonian symbol λ, initial-state symbol β and chain length.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionSetup {
    lambda: TrigPolynomial,
    beta: TrigPolynomial,
    size: usize,
}

impl EvolutionSetup {
    /// β must be strictly positive; λ may touch zero (critical Hamiltonian).
    pub fn new(lambda: TrigPolynomial, beta: TrigPolynomial, size: usize) -> Result<Self> {
        let degree = lambda.degree().max(beta.degree());
        if size <= 2 * degree {
            return Err(Error::SizeTooSmall { size, degree });
        }
        if beta.positivity() != Positivity::Positive {
            return Err(Error::NonPositiveSymbol {
                name: "beta",
                min: beta.extrema(crate::spectral::POSITIVITY_GRID).min,
            });
        }
        if lambda.positivity() == Positivity::Indefinite {
            return Err(Error::NonPositiveSymbol {
                name: "lambda",
                min: lambda.extrema(crate::spectral::POSITIVITY_GRID).min,
            });
        }
        Ok(Self { lambda, beta, size })
    }

    pub fn lambda(&self) -> &TrigPolynomial {
        &self.lambda
    }

    pub fn beta(&self) -> &TrigPolynomial {
        &self.beta
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// (λ(θ_j), β(θ_j)) for every lattice momentum, λ clamped at zero.
    pub fn mode_samples(&self) -> Vec<(f64, f64)> {
        (0..self.size)
            .map(|j| {
                let theta = mode_angle(j, self.size);
                (self.lambda.eval(theta).max(0.0), self.beta.eval(theta))
            })
            .collect()
    }
}

/// The evolved state exp(−½xᵀA(t)x), stored as the eigenvalues of the
/// circulant A(t) at θ_j = 2πj/N.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianPureState {
    mode_symbols: Vec<Complex64>,
    time: f64,
}

impl GaussianPureState {
    pub fn new(mode_symbols: Vec<Complex64>, time: f64) -> Self {
        Self { mode_symbols, time }
    }

    pub fn size(&self) -> usize {
        self.mode_symbols.len()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn mode_symbols(&self) -> &[Complex64] {
        &self.mode_symbols
    }

    pub fn to_dump(&self) -> StateDump {
        StateDump {
            size: self.size(),
            t: self.time,
            re: self.mode_symbols.iter().map(|z| z.re).collect(),
            im: self.mode_symbols.iter().map(|z| z.im).collect(),
        }
    }
}

/// JSON layout `{N, t, re[], im[]}` of a state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDump {
    #[serde(rename = "N")]
    pub size: usize,
    pub t: f64,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<StateDump> for GaussianPureState {
    fn from(d: StateDump) -> Self {
        let symbols = d.re.iter().zip(&d.im).map(|(&re, &im)| Complex64::new(re, im)).collect();
        Self::new(symbols, d.t)
    }
}

/// Evolves every mode with the closed-form solution.
pub fn evolve(setup: &EvolutionSetup, t: f64) -> GaussianPureState {
    let symbols = setup
        .mode_samples()
        .into_iter()
        .map(|(l, b)| mode_symbol(l, b, t))
        .collect();
    GaussianPureState::new(symbols, t)
}

/// Default RK4 step: 0.01 / √(max λ).
pub fn default_step(setup: &EvolutionSetup) -> f64 {
    let max_lambda = setup.mode_samples().iter().map(|&(l, _)| l).fold(0.0, f64::max);
    if max_lambda > 0.0 {
        0.01 / max_lambda.sqrt()
    } else {
        0.01
    }
}

/// Integrates i ȧ = a² − λ(θ_j) for every mode with classical RK4, starting
/// from a(0) = β(θ_j). Independent of the closed form; used as its oracle.
pub fn riccati_oracle(setup: &EvolutionSetup, t_end: f64, dt: Option<f64>) -> Result<GaussianPureState> {
    let dt = dt.unwrap_or_else(|| default_step(setup)).abs();
    let steps = if t_end == 0.0 { 0 } else { (t_end.abs() / dt).ceil() as usize };
    let h = if steps == 0 { 0.0 } else { t_end / steps as f64 };
    let minus_i = Complex64::new(0.0, -1.0);

    let mut symbols = Vec::with_capacity(setup.size());
    for (l, b) in setup.mode_samples() {
        let rhs = |a: Complex64| minus_i * (a * a - l);
        let mut a = Complex64::new(b, 0.0);
        for step in 0..steps {
            let k1 = rhs(a);
            let k2 = rhs(a + k1 * (0.5 * h));
            let k3 = rhs(a + k2 * (0.5 * h));
            let k4 = rhs(a + k3 * h);
            a += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            let magnitude = a.norm();
            if !magnitude.is_finite() || magnitude > DIVERGENCE_LIMIT {
                return Err(Error::Divergence {
                    t: h * (step + 1) as f64,
                    dt,
                    magnitude,
                });
            }
        }
        symbols.push(a);
    }
    Ok(GaussianPureState::new(symbols, t_end))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gap(c: f64) -> TrigPolynomial {
        TrigPolynomial::from_gap_family(c).0
    }

    #[test]
    fn mode_symbol_examples() {
        assert_eq!(mode_symbol(2.25, 1.0, 0.0), Complex64::new(1.0, 0.0));
        for t in [0.0, 0.3, 7.0] {
            let a = mode_symbol(2.25, 1.5, t);
            assert!((a.re - 1.5).abs() < 1e-14 && a.im.abs() < 1e-14);
        }
        // Λ = 2.25 / (2.25 cos²1.5 + sin²1.5)
        let a = mode_symbol(2.25, 1.0, 1.0);
        assert!((a.re - 2.236_01).abs() < 1e-5, "{}", a.re);
    }

    #[test]
    fn critical_mode_limit() {
        for t in [0.0, 0.5, 3.0] {
            let expected = Complex64::new(2.0, 0.0) / Complex64::new(1.0, 2.0 * t);
            assert!((mode_symbol(0.0, 2.0, t) - expected).norm() < 1e-15);
            // tiny positive λ connects continuously to the limit
            assert!((mode_symbol(1e-14, 2.0, t) - expected).norm() < 1e-10);
        }
    }

    #[test]
    fn lambda_of_t_examples() {
        let (l, one) = (gap(1.5), TrigPolynomial::constant(1.0));
        let v = lambda_of_t(&l, &one, PI / 2.0, 1.0);
        let direct = 2.25 / (2.25 * 1.5f64.cos().powi(2) + 1.5f64.sin().powi(2));
        assert!((v - direct).abs() < 1e-14);
        assert!((v - 2.236_01).abs() < 1e-5);
        assert_eq!(lambda_of_t(&l, &one, 0.4, 0.0), 1.0);

        let beta = TrigPolynomial::new(vec![1.5, -1.0]).unwrap();
        for &theta in &[0.0, 1.0, 2.5] {
            for &t in &[0.0, 1.0, 13.0] {
                assert!((lambda_of_t(&l, &beta, theta, t) - beta.eval(theta)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn short_time_examples() {
        let (l, one) = (gap(1.5), TrigPolynomial::constant(1.0));
        assert!((short_time_lambda(&l, &one, PI / 2.0, 0.05) - 1.003_125).abs() < 1e-14);
        assert_eq!(short_time_lambda(&l, &one, 0.3, 0.0), 1.0);
        let beta = TrigPolynomial::new(vec![1.5, -1.0]).unwrap();
        assert!((short_time_lambda(&l, &beta, 0.7, 0.3) - beta.eval(0.7)).abs() < 1e-12);
    }

    #[test]
    fn oracle_initial_condition_and_agreement() {
        let setup = EvolutionSetup::new(gap(1.5), TrigPolynomial::constant(1.0), 32).unwrap();
        let s0 = riccati_oracle(&setup, 0.0, None).unwrap();
        assert!(s0.mode_symbols().iter().all(|a| *a == Complex64::new(1.0, 0.0)));

        let exact = evolve(&setup, 1.0);
        let ode = riccati_oracle(&setup, 1.0, None).unwrap();
        let dev = exact
            .mode_symbols()
            .iter()
            .zip(ode.mode_symbols())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-6, "deviation {dev}");
    }

    #[test]
    fn oracle_stationary_ground_state() {
        let beta = TrigPolynomial::new(vec![1.5, -1.0]).unwrap();
        let setup = EvolutionSetup::new(gap(1.5), beta, 16).unwrap();
        let s0 = evolve(&setup, 0.0);
        let s = riccati_oracle(&setup, 5.0, None).unwrap();
        for (a, b) in s.mode_symbols().iter().zip(s0.mode_symbols()) {
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn oracle_reports_divergence() {
        let setup = EvolutionSetup::new(gap(1.5), TrigPolynomial::constant(1.0), 8).unwrap();
        assert!(matches!(
            riccati_oracle(&setup, 10.0, Some(2.0)),
            Err(Error::Divergence { .. })
        ));
    }

    #[test]
    fn evolve_uncoupled_is_constant() {
        let setup = EvolutionSetup::new(TrigPolynomial::constant(4.0), TrigPolynomial::constant(2.0), 6).unwrap();
        for t in [0.0, 1.0, 10.0] {
            for a in evolve(&setup, t).mode_symbols() {
                assert!((a - Complex64::new(2.0, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn setup_validation() {
        let neg = TrigPolynomial::new(vec![0.0, 1.0]).unwrap();
        assert!(EvolutionSetup::new(neg.clone(), TrigPolynomial::constant(1.0), 8).is_err());
        assert!(EvolutionSetup::new(gap(1.0), neg, 8).is_err());
        assert!(EvolutionSetup::new(gap(1.0), TrigPolynomial::constant(1.0), 8).is_ok());
        assert!(EvolutionSetup::new(gap(1.0), TrigPolynomial::constant(1.0), 4).is_err());
    }

    #[test]
    fn dump_roundtrip() {
        let setup = EvolutionSetup::new(gap(1.5), TrigPolynomial::constant(1.0), 5).unwrap();
        let state = evolve(&setup, 0.7);
        let json = serde_json::to_string(&state.to_dump()).unwrap();
        assert!(json.starts_with("{\"N\":5,\"t\":0.7,\"re\":["), "{json}");
        let back: StateDump = serde_json::from_str(&json).unwrap();
        assert_eq!(GaussianPureState::from(back), state);
    }
}
