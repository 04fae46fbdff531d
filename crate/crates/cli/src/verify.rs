//! Randomized invariant suite behind `quench-entropy verify`.

use std::f64::consts::TAU;
use std::str::FromStr;

use quench_core::evolution::{mode_symbol, spectral_value};
use quench_core::reduction::{
    densify, exact_entropy, exact_entropy_sites, partition, purity_from_reduced, purity_z_form, reduce, CHAIN_TOL,
    IDENTITY_TOL, PURITY_TOL,
};
use quench_core::szego::{bk_bound, parseval_check, szego_bound};
use quench_core::{entropy_record, evolve, riccati_oracle, EvolutionSetup, TrigPolynomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{CliError, Result};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

impl FromStr for Level {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            _ => Err(CliError::Usage(format!("level must be quick or full, got `{s}`"))),
        }
    }
}

impl Level {
    fn instances(self) -> usize {
        match self {
            Level::Quick => 8,
            Level::Full => 100,
        }
    }

    fn sizes(self) -> &'static [usize] {
        match self {
            Level::Quick => &[16, 32],
            Level::Full => &[32, 64],
        }
    }
}

/// Enough to replay a failing case with `quench-entropy evolve`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Instance {
    pub lambda: String,
    pub beta: String,
    #[serde(rename = "N")]
    pub size: usize,
    pub n: usize,
    pub t: f64,
}

impl Instance {
    pub fn setup(&self) -> Result<EvolutionSetup> {
        let parse = |s: &str| s.parse::<TrigPolynomial>().map_err(|e| CliError::Usage(e.to_string()));
        Ok(EvolutionSetup::new(parse(&self.lambda)?, parse(&self.beta)?, self.size)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyReport {
    pub family: &'static str,
    pub passed: bool,
    pub instances: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub instance: Instance,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub level: Level,
    pub seed: u64,
    pub passed: bool,
    pub families: Vec<FamilyReport>,
}

/// Cosine polynomial of degree ≤ `max_degree` with minimum at least `margin`.
pub fn random_positive_poly(rng: &mut impl Rng, max_degree: usize, margin: f64) -> TrigPolynomial {
    let degree = rng.random_range(0..=max_degree);
    let tail: Vec<f64> = (0..degree).map(|_| rng.random_range(-1.0..1.0)).collect();
    let a0 = tail.iter().map(|a| a.abs()).sum::<f64>() + margin + rng.random_range(0.0..1.0);
    let mut coeffs = vec![a0];
    coeffs.extend(tail);
    TrigPolynomial::new(coeffs).expect("finite coefficients")
}

/// Gapped instance with degree ≤ 3 symbols, n = N/2, t ∈ [0, 10].
pub fn random_instance(rng: &mut impl Rng, sizes: &[usize]) -> Instance {
    let lambda = random_positive_poly(rng, 3, 0.2);
    let beta = random_positive_poly(rng, 3, 0.3);
    let size = sizes[rng.random_range(0..sizes.len())];
    Instance {
        lambda: lambda.to_string(),
        beta: beta.to_string(),
        size,
        n: size / 2,
        t: rng.random_range(0.0..10.0),
    }
}

/// Product of two cosine polynomials.
pub fn poly_product(p: &TrigPolynomial, q: &TrigPolynomial) -> TrigPolynomial {
    // cos aθ cos bθ = ½cos(a+b)θ + ½cos(a−b)θ, with a₀ terms carried at full weight
    let (a, b) = (p.coeffs(), q.coeffs());
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let v = x * y;
            if i == 0 || j == 0 {
                out[i + j] += v;
            } else {
                out[i + j] += 0.5 * v;
                out[i.abs_diff(j)] += 0.5 * v;
            }
        }
    }
    TrigPolynomial::new(out).expect("finite coefficients")
}

/// Accumulates one family's worst deviation and first failure.
struct Tracker {
    report: FamilyReport,
}

impl Tracker {
    fn new(family: &'static str, tolerance: f64) -> Self {
        Self {
            report: FamilyReport {
                family,
                passed: true,
                instances: 0,
                max_deviation: 0.0,
                tolerance,
                failure: None,
            },
        }
    }

    /// Records a deviation; anything above tolerance (or NaN) fails the family.
    fn record(&mut self, instance: &Instance, deviation: f64, detail: impl FnOnce() -> String) {
        self.report.instances += 1;
        self.report.max_deviation = self.report.max_deviation.max(deviation);
        if deviation.is_nan() || deviation > self.report.tolerance {
            self.fail(instance, detail());
            if deviation.is_nan() {
                self.report.max_deviation = f64::NAN;
            }
        }
    }

    fn outcome(&mut self, instance: &Instance, r: Result<f64>, detail: impl FnOnce() -> String) {
        match r {
            Ok(dev) => self.record(instance, dev, detail),
            Err(e) => {
                self.report.instances += 1;
                self.fail(instance, e.to_string());
            }
        }
    }

    fn fail(&mut self, instance: &Instance, detail: String) {
        self.report.passed = false;
        if self.report.failure.is_none() {
            self.report.failure = Some(Failure {
                instance: instance.clone(),
                detail,
            });
        }
    }
}

fn ode_family(rng: &mut ChaCha8Rng, level: Level) -> FamilyReport {
    let mut tr = Tracker::new("closed_form_vs_ode", 1e-6);
    for _ in 0..level.instances().min(20) {
        let inst = random_instance(rng, &[16]);
        let dev = (|| {
            let setup = inst.setup()?;
            let exact = evolve(&setup, inst.t);
            let ode = riccati_oracle(&setup, inst.t, None)?;
            Ok(exact
                .mode_symbols()
                .iter()
                .zip(ode.mode_symbols())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max))
        })();
        tr.outcome(&inst, dev, || "closed form and RK4 disagree".into());
    }
    tr.report
}

fn normalizability_family(rng: &mut ChaCha8Rng, level: Level) -> FamilyReport {
    let mut tr = Tracker::new("mode_symbol_normalizable", 1e-12);
    let probe = Instance {
        lambda: String::new(),
        beta: String::new(),
        size: 0,
        n: 0,
        t: 0.0,
    };
    for _ in 0..level.instances() * 10 {
        let (l, b, t) = (rng.random_range(0.0..9.0), rng.random_range(0.05..4.0), rng.random_range(-20.0..20.0));
        let a = mode_symbol(l, b, t);
        let inst = Instance {
            lambda: format!("poly:{l}"),
            beta: format!("poly:{b}"),
            t,
            ..probe.clone()
        };
        let dev = if a.re > 0.0 {
            (a.re - spectral_value(l, b, t)).abs() / a.re.max(1.0)
        } else {
            f64::INFINITY
        };
        tr.record(&inst, dev, || format!("Re a = {}", a.re));
    }
    tr.report
}

fn chain_families(rng: &mut ChaCha8Rng, level: Level) -> Vec<FamilyReport> {
    let mut chain = Tracker::new("inequality_chain", CHAIN_TOL);
    let mut dual = Tracker::new("purity_dual_formula", PURITY_TOL);
    let mut schur = Tracker::new("schur_identity", IDENTITY_TOL);
    let mut shift = Tracker::new("translation_invariance", 1e-10);
    for _ in 0..level.instances() {
        let inst = random_instance(rng, level.sizes());
        let rec = inst.setup().and_then(|s| Ok(entropy_record(&s, inst.n, inst.t)?));
        match rec {
            Ok(r) => {
                let slack = (r.neg_log_purity - r.exact_entropy).max(r.det_bound - r.neg_log_purity);
                chain.record(&inst, slack, || {
                    format!("exact {} , -ln purity {}, det bound {}", r.exact_entropy, r.neg_log_purity, r.det_bound)
                });
                dual.record(&inst, r.purity_deviation, || "purity formulas disagree".into());
                schur.record(&inst, r.identity_residual, || "Schur identity residual".into());
            }
            Err(e) => {
                let msg = e.to_string();
                for tr in [&mut chain, &mut dual, &mut schur] {
                    tr.outcome(&inst, Err(CliError::Verification(msg.clone())), String::new);
                }
            }
        }
        let dev = (|| {
            let a = densify(&evolve(&inst.setup()?, inst.t));
            let kept = inst.size - inst.n;
            let offset = 1 + inst.size / 3;
            let sites: Vec<usize> = (0..kept).map(|i| (i + offset) % inst.size).collect();
            Ok((exact_entropy_sites(&a, &sites)? - exact_entropy(&a, inst.n)?).abs())
        })();
        shift.outcome(&inst, dev, || "entropy depends on cut offset".into());
    }
    vec![chain.report, dual.report, schur.report, shift.report]
}

fn szego_families(rng: &mut ChaCha8Rng, level: Level) -> Vec<FamilyReport> {
    let mut parseval = Tracker::new("szego_parseval", 1e-4);
    let mut order = Tracker::new("bk_below_szego", 1e-9);
    for _ in 0..level.instances() {
        let mut inst = random_instance(rng, &[0]);
        inst.t = rng.random_range(0.0..8.0);
        let (lambda, beta) = match (inst.lambda.parse::<TrigPolynomial>(), inst.beta.parse::<TrigPolynomial>()) {
            (Ok(l), Ok(b)) => (l, b),
            _ => unreachable!("generated symbols always parse"),
        };
        let sums: quench_core::Result<(f64, f64)> = (|| {
            let s = szego_bound(&lambda, &beta, inst.t, None)?.0.value;
            let b = bk_bound(&lambda, &beta, inst.t, None)?.value;
            Ok((s, b))
        })();
        match sums {
            Ok((s, b)) => {
                order.record(&inst, b - s, || format!("bk {b} > szego {s}"));
                if s > 1e-6 {
                    let p = parseval_check(&lambda, &beta, inst.t, 1024);
                    parseval.record(&inst, ((p - s) / s).abs(), || format!("parseval {p} vs szego {s}"));
                }
            }
            Err(e) => {
                let msg = e.to_string();
                order.outcome(&inst, Err(CliError::Verification(msg.clone())), String::new);
                parseval.outcome(&inst, Err(CliError::Verification(msg)), String::new);
            }
        }
    }
    vec![parseval.report, order.report]
}

/// Ground state (λ = β²) must be stationary in every column.
fn stationarity_family(rng: &mut ChaCha8Rng, level: Level) -> FamilyReport {
    let mut tr = Tracker::new("stationarity", 1e-8);
    for _ in 0..level.instances().min(20) {
        let beta = random_positive_poly(rng, 1, 0.3);
        let lambda = poly_product(&beta, &beta);
        let size = level.sizes()[0];
        let inst = Instance {
            lambda: lambda.to_string(),
            beta: beta.to_string(),
            size,
            n: size / 2,
            t: rng.random_range(0.5..10.0),
        };
        let dev = (|| {
            let setup = inst.setup()?;
            let cols = |t: f64| -> Result<[f64; 5]> {
                let r = entropy_record(&setup, inst.n, t)?;
                Ok([
                    r.exact_entropy,
                    r.neg_log_purity,
                    r.det_bound,
                    szego_bound(&lambda, &beta, t, Some(128))?.0.value,
                    bk_bound(&lambda, &beta, t, Some(128))?.value,
                ])
            };
            let (a, b) = (cols(0.0)?, cols(inst.t)?);
            Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
        })();
        tr.outcome(&inst, dev, || "ground state moved".into());
    }
    tr.report
}

fn circulant_family(rng: &mut ChaCha8Rng, level: Level) -> FamilyReport {
    let mut tr = Tracker::new("circulant_spectrum", 1e-12);
    for _ in 0..level.instances() {
        let f = random_positive_poly(rng, 4, 0.0);
        let size = 2 * f.degree() + rng.random_range(1..40);
        let inst = Instance {
            lambda: f.to_string(),
            beta: "poly:1".into(),
            size,
            n: size / 2,
            t: 0.0,
        };
        let dev = f.build_circulant(size).map(|m| {
            m.eigenvalues()
                .iter()
                .enumerate()
                .map(|(j, ev)| (ev - f.eval(TAU * j as f64 / size as f64)).abs())
                .fold(0.0, f64::max)
        });
        tr.outcome(&inst, dev.map_err(CliError::from), || "FFT spectrum differs from samples".into());
    }
    tr.report
}

/// Flips the sign of the T̃⁻¹ term in Γ and expects the purity cross-check
/// to notice. The family passes when every mutant is caught.
fn mutation_family(rng: &mut ChaCha8Rng, level: Level) -> FamilyReport {
    let mut tr = Tracker::new("gamma_sign_mutation", 0.0);
    for _ in 0..level.instances().min(20) {
        // a constant β with small t leaves C ≈ 0, where the mutation is a no-op
        let inst = loop {
            let i = random_instance(rng, level.sizes());
            if !i.beta.parse::<TrigPolynomial>().is_ok_and(|b| b.is_constant()) {
                break i;
            }
        };
        let survived = (|| {
            let a = densify(&evolve(&inst.setup()?, inst.t));
            let blocks = partition(&a, inst.n)?;
            let mut red = reduce(&blocks)?;
            red.gamma = &blocks.r - &red.gamma;
            let caught = match purity_from_reduced(&blocks, &red) {
                Ok(p) => (p - purity_z_form(&blocks)?).abs() > 1e-6 || !p.is_finite(),
                Err(_) => true,
            };
            Ok(if caught { 0.0 } else { 1.0 })
        })();
        tr.outcome(&inst, survived, || "mutant passed the purity dual check".into());
    }
    tr.report
}

/// Runs every family with a fixed seed. The report is returned even on
/// failure; [`VerifyReport::passed`] carries the verdict.
pub fn cmd_verify(level: Level, seed: u64) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut families = vec![
        circulant_family(&mut rng, level),
        normalizability_family(&mut rng, level),
        ode_family(&mut rng, level),
    ];
    families.extend(chain_families(&mut rng, level));
    families.extend(szego_families(&mut rng, level));
    families.push(stationarity_family(&mut rng, level));
    families.push(mutation_family(&mut rng, level));
    VerifyReport {
        level,
        seed,
        passed: families.iter().all(|f| f.passed),
        families,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_matches_pointwise() {
        let p = TrigPolynomial::new(vec![1.2, -0.4, 0.1]).unwrap();
        let q = TrigPolynomial::new(vec![0.7, 0.3]).unwrap();
        let pq = poly_product(&p, &q);
        for j in 0..50 {
            let th = j as f64 * 0.13;
            assert!((pq.eval(th) - p.eval(th) * q.eval(th)).abs() < 1e-14);
        }
    }

    #[test]
    fn instances_are_gapped_and_replayable() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let inst = random_instance(&mut rng, &[32, 64]);
            inst.setup().unwrap();
            assert!(inst.lambda.parse::<TrigPolynomial>().unwrap().extrema(4096).min >= 0.2 - 1e-12);
        }
    }

    #[test]
    fn quick_suite_passes_and_is_seeded() {
        let a = cmd_verify(Level::Quick, 7);
        assert!(a.passed, "{}", serde_json::to_string_pretty(&a).unwrap());
        assert_eq!(a, cmd_verify(Level::Quick, 7));
    }
}
