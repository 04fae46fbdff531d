//! Reduced state of the last N − n oscillators: block partition of A(t),
//! purity, the determinant lower bound and the exact von Neumann entropy.
//!
//! Notation follows the block layout
//!
//! ```text
//!     A = | T   C |        (Re A)⁻¹ = | ·  · |
//!         | Cᵀ  R |                   | ·  P̃ |
//! ```
//!
//! where a tilde denotes the real part. P̃ is the kept-sites block of the
//! inverse of Re A; with that reading P̃⁻¹ = R̃ − C̃ᵀT̃⁻¹C̃ is an exact Schur
//! complement identity, which [`reduce`] checks numerically.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{evolve, EvolutionSetup, GaussianPureState};
use crate::linalg::{self, CMatrix, RMatrix};

pub const MAX_CONDITION: f64 = 1e12;
pub const IDENTITY_TOL: f64 = 1e-9;
pub const PURITY_TOL: f64 = 1e-9;
pub const SYMPLECTIC_TOL: f64 = 1e-8;

/// Inverse discrete Fourier transform of the mode symbols: the circulant
/// matrix with entries A_kl = (1/N) Σ_j a_j e^{iθ_j (k−l)}.
pub fn densify(state: &GaussianPureState) -> CMatrix {
    let n = state.size();
    let mut offsets = state.mode_symbols().to_vec();
    FftPlanner::new().plan_fft_inverse(n).process(&mut offsets);
    // symmetric symbols give even offsets; average the pair so A = Aᵀ exactly
    let scale = 0.5 / n as f64;
    let even: Vec<Complex64> = (0..n).map(|d| (offsets[d] + offsets[(n - d) % n]) * scale).collect();
    DMatrix::from_fn(n, n, |k, l| even[(k + n - l) % n])
}

/// Eigenvalues of a dense circulant in Fourier order, read from its first column.
pub fn circulant_symbols(a: &CMatrix) -> Vec<Complex64> {
    let n = a.nrows();
    let mut col: Vec<Complex64> = a.column(0).iter().copied().collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut col);
    col
}

#[derive(Clone, Debug)]
pub struct BlockPartition {
    pub n: usize,
    pub t: CMatrix,
    pub c: CMatrix,
    pub r: CMatrix,
    /// Blocks of A⁻¹.
    pub q: CMatrix,
    pub d: CMatrix,
    pub p: CMatrix,
    /// Kept-sites block of (Re A)⁻¹.
    pub p_tilde: RMatrix,
    pub condition: f64,
}

impl BlockPartition {
    pub fn kept(&self) -> usize {
        self.r.nrows()
    }

    pub fn t_tilde(&self) -> RMatrix {
        linalg::re(&self.t)
    }

    pub fn r_tilde(&self) -> RMatrix {
        linalg::re(&self.r)
    }

    pub fn c_tilde(&self) -> RMatrix {
        linalg::re(&self.c)
    }

    /// Z = (C − C*)/2i.
    pub fn z(&self) -> RMatrix {
        linalg::im(&self.c)
    }

    pub fn reassemble(&self) -> CMatrix {
        let (n, m) = (self.n, self.kept());
        let mut a = CMatrix::zeros(n + m, n + m);
        a.view_mut((0, 0), (n, n)).copy_from(&self.t);
        a.view_mut((0, n), (n, m)).copy_from(&self.c);
        a.view_mut((n, 0), (m, n)).copy_from(&self.c.transpose());
        a.view_mut((n, n), (m, m)).copy_from(&self.r);
        a
    }

    pub fn reassemble_inverse(&self) -> CMatrix {
        let (n, m) = (self.n, self.kept());
        let mut a = CMatrix::zeros(n + m, n + m);
        a.view_mut((0, 0), (n, n)).copy_from(&self.q);
        a.view_mut((0, n), (n, m)).copy_from(&self.d);
        a.view_mut((n, 0), (m, n)).copy_from(&self.d.transpose());
        a.view_mut((n, n), (m, m)).copy_from(&self.p);
        a
    }
}

/// Splits A into the traced-out block (first n sites) and the kept block.
pub fn partition(a: &CMatrix, n: usize) -> Result<BlockPartition> {
    let size = a.nrows();
    if n == 0 || n >= size || a.ncols() != size {
        return Err(Error::InvalidCut { n, size });
    }
    let m = size - n;
    let inv = a.clone().lu().try_inverse().ok_or(Error::IllConditioned(f64::INFINITY))?;
    let condition = linalg::condition_estimate(a, &inv);
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::IllConditioned(condition));
    }
    let real_inv = linalg::spd_inverse(&linalg::re(a), "Re A")?;
    Ok(BlockPartition {
        n,
        t: a.view((0, 0), (n, n)).into_owned(),
        c: a.view((0, n), (n, m)).into_owned(),
        r: a.view((n, n), (m, m)).into_owned(),
        q: inv.view((0, 0), (n, n)).into_owned(),
        d: inv.view((0, n), (n, m)).into_owned(),
        p: inv.view((n, n), (m, m)).into_owned(),
        p_tilde: real_inv.view((n, n), (m, m)).into_owned(),
        condition,
    })
}

/// Parameters of ρ_R(x, x') = 𝒩 exp[−xᵀΓx − x'ᵀΓ*x' + xᵀΔx' + x'ᵀΔ*x].
#[derive(Clone, Debug)]
pub struct ReducedGaussianState {
    pub gamma: CMatrix,
    pub delta: CMatrix,
    /// ln 𝒩 = ½ ln det P̃⁻¹ − ((N−n)/2) ln π.
    pub log_norm: f64,
    /// max |P̃⁻¹ − (R̃ − C̃ᵀT̃⁻¹C̃)|.
    pub identity_residual: f64,
}

/// Γ = R/2 − CᵀT̃⁻¹C/4, Δ = CᵀT̃⁻¹C*/4.
pub fn reduce(blocks: &BlockPartition) -> Result<ReducedGaussianState> {
    let t_chol = linalg::cholesky(&blocks.t_tilde(), "Re T")?;
    let tinv_c = linalg::solve_complex(&t_chol, &blocks.c);
    let ct = blocks.c.transpose();
    let gamma = &blocks.r * Complex64::new(0.5, 0.0) - &ct * &tinv_c * Complex64::new(0.25, 0.0);
    let delta = &ct * tinv_c.map(|z| z.conj()) * Complex64::new(0.25, 0.0);

    let c_re = blocks.c_tilde();
    let schur = blocks.r_tilde() - c_re.transpose() * t_chol.solve(&c_re);
    let p_chol = linalg::cholesky(&blocks.p_tilde, "P~")?;
    let identity_residual = linalg::max_abs(&(p_chol.inverse() - &schur));
    let m = blocks.kept() as f64;
    let log_norm = -0.5 * linalg::logdet_factor(&p_chol) - 0.5 * m * PI.ln();

    Ok(ReducedGaussianState {
        gamma,
        delta,
        log_norm,
        identity_residual,
    })
}

/// tr ρ² from Γ and Δ by the Gaussian double integral:
/// det P̃⁻¹ / (2^{N−n} (det[Γ̃ − Δ̃] det[Γ̃ + Δ̃])^{1/2}).
pub fn purity_from_reduced(blocks: &BlockPartition, reduced: &ReducedGaussianState) -> Result<f64> {
    let gamma = linalg::re(&reduced.gamma);
    let delta = linalg::re(&reduced.delta);
    let minus = linalg::logdet_spd(&(&gamma - &delta), "Re(Gamma - Delta)")?;
    let plus = linalg::logdet_spd(&(&gamma + &delta), "Re(Gamma + Delta)")?;
    let m = blocks.kept() as f64;
    let ln_p_inv = -linalg::logdet_spd(&blocks.p_tilde, "P~")?;
    Ok((ln_p_inv - m * std::f64::consts::LN_2 - 0.5 * (minus + plus)).exp())
}

/// tr ρ² = [det(P̃(R̃ + ZᵀT̃⁻¹Z))]^{−1/2}.
pub fn purity_z_form(blocks: &BlockPartition) -> Result<f64> {
    let z = blocks.z();
    let t_chol = linalg::cholesky(&blocks.t_tilde(), "Re T")?;
    let k = blocks.r_tilde() + z.transpose() * t_chol.solve(&z);
    let ln = linalg::logdet_spd(&blocks.p_tilde, "P~")? + linalg::logdet_spd(&k, "R~ + Z^T T~^-1 Z")?;
    Ok((-0.5 * ln).exp())
}

/// Both purity formulas, checked against each other.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PurityCheck {
    pub from_reduced: f64,
    pub z_form: f64,
}

impl PurityCheck {
    pub fn deviation(&self) -> f64 {
        (self.from_reduced - self.z_form).abs()
    }
}

pub fn purity_pair(blocks: &BlockPartition, reduced: &ReducedGaussianState) -> Result<PurityCheck> {
    Ok(PurityCheck {
        from_reduced: purity_from_reduced(blocks, reduced)?,
        z_form: purity_z_form(blocks)?,
    })
}

/// Purity of ρ_R; errors when the two closed forms disagree beyond 1e−9.
pub fn purity(blocks: &BlockPartition) -> Result<f64> {
    let reduced = reduce(blocks)?;
    let pair = purity_pair(blocks, &reduced)?;
    if pair.deviation() > PURITY_TOL {
        return Err(Error::Inconsistent {
            check: "purity dual formula",
            deviation: pair.deviation(),
            tolerance: PURITY_TOL,
        });
    }
    Ok(pair.z_form)
}

/// ½ ln det(P̃R̃), via Cholesky log-determinants.
pub fn det_bound(blocks: &BlockPartition) -> Result<f64> {
    let lp = linalg::logdet_spd(&blocks.p_tilde, "P~")?;
    let lr = linalg::logdet_spd(&blocks.r_tilde(), "R~")?;
    Ok(0.5 * (lp + lr))
}

/// Second moments of the pure state exp(−½xᵀAx) in (x, p) ordering.
///
/// With A = Ã + iÂ: ⟨xx⟩ = ½Ã⁻¹, ⟨pp⟩ = ½(Ã + ÂÃ⁻¹Â), sym⟨xp⟩ = −½Ã⁻¹Â.
pub fn covariance(a: &CMatrix) -> Result<RMatrix> {
    let n = a.nrows();
    let (a_re, a_im) = (linalg::re(a), linalg::im(a));
    let chol = linalg::cholesky(&a_re, "Re A")?;
    let re_inv = chol.inverse();
    let re_inv_im = chol.solve(&a_im);
    let mut sigma = RMatrix::zeros(2 * n, 2 * n);
    let xx = &re_inv * 0.5;
    let xp = &re_inv_im * -0.5;
    let pp = (&a_re + &a_im * &re_inv_im) * 0.5;
    sigma.view_mut((0, 0), (n, n)).copy_from(&xx);
    sigma.view_mut((0, n), (n, n)).copy_from(&xp);
    sigma.view_mut((n, 0), (n, n)).copy_from(&xp.transpose());
    sigma.view_mut((n, n), (n, n)).copy_from(&pp);
    Ok((&sigma + sigma.transpose()) * 0.5)
}

fn symplectic_form(modes: usize) -> RMatrix {
    let mut omega = RMatrix::zeros(2 * modes, 2 * modes);
    for i in 0..modes {
        omega[(i, modes + i)] = 1.0;
        omega[(modes + i, i)] = -1.0;
    }
    omega
}

/// Symplectic eigenvalues of a covariance matrix in (x, p) ordering, ascending.
///
/// With σ = LLᵀ, K = LᵀΩL is antisymmetric with eigenvalues ±iν, so the
/// eigenvalues of KᵀK are the ν² in degenerate pairs.
pub fn symplectic_eigenvalues(sigma: &RMatrix) -> Result<Vec<f64>> {
    let modes = sigma.nrows() / 2;
    let l = linalg::cholesky(sigma, "covariance")?.unpack();
    let k = l.transpose() * symplectic_form(modes) * &l;
    let mut ev: Vec<f64> = (k.transpose() * &k).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev
        .chunks(2)
        .map(|pair| (0.5 * (pair[0] + pair[1])).max(0.0).sqrt())
        .collect())
}

fn entropy_term(nu: f64) -> f64 {
    let xlogx = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
    xlogx(nu + 0.5) - xlogx(nu - 0.5)
}

/// Restriction of a covariance matrix to a subset of modes.
pub fn restrict(sigma: &RMatrix, sites: &[usize]) -> RMatrix {
    let n = sigma.nrows() / 2;
    let m = sites.len();
    let index = |i: usize| if i < m { sites[i] } else { n + sites[i - m] };
    RMatrix::from_fn(2 * m, 2 * m, |i, j| sigma[(index(i), index(j))])
}

/// Von Neumann entropy (nats) of the modes listed in `sites`.
pub fn exact_entropy_sites(a: &CMatrix, sites: &[usize]) -> Result<f64> {
    let n = a.nrows();
    let sigma = covariance(a)?;
    // pure ⇔ all symplectic eigenvalues ½ ⇔ (2σΩ)² = −1
    let j = &sigma * symplectic_form(n) * 2.0;
    let purity_defect = linalg::max_abs(&(&j * &j + RMatrix::identity(2 * n, 2 * n)));
    if purity_defect > SYMPLECTIC_TOL {
        return Err(Error::NotPure(purity_defect));
    }
    let mut total = 0.0;
    for nu in symplectic_eigenvalues(&restrict(&sigma, sites))? {
        if nu < 0.5 - SYMPLECTIC_TOL {
            return Err(Error::Unphysical(nu));
        }
        total += entropy_term(nu);
    }
    Ok(total)
}

/// Entropy of the kept sites n..N.
pub fn exact_entropy(a: &CMatrix, n: usize) -> Result<f64> {
    let size = a.nrows();
    if n == 0 || n >= size {
        return Err(Error::InvalidCut { n, size });
    }
    exact_entropy_sites(a, &(n..size).collect::<Vec<_>>())
}

/// Entropy and its two lower bounds for one time point and cut.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyRecord {
    pub t: f64,
    pub exact_entropy: f64,
    pub neg_log_purity: f64,
    pub det_bound: f64,
    pub n: usize,
    #[serde(rename = "N")]
    pub size: usize,
    /// Schur-complement identity residual.
    pub identity_residual: f64,
    /// |difference| of the two purity formulas.
    pub purity_deviation: f64,
}

/// Slack allowed in exact ≥ −ln tr ρ² ≥ ½ ln det(P̃R̃).
pub const CHAIN_TOL: f64 = 1e-8;

impl EntropyRecord {
    /// Checks the bound ordering and both internal identities.
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("Schur identity", self.identity_residual, IDENTITY_TOL),
            ("purity dual formula", self.purity_deviation, PURITY_TOL),
            ("exact >= -ln purity", self.neg_log_purity - self.exact_entropy, CHAIN_TOL),
            ("-ln purity >= det bound", self.det_bound - self.neg_log_purity, CHAIN_TOL),
        ];
        for (check, deviation, tolerance) in checks {
            if deviation.is_nan() || deviation > tolerance {
                return Err(Error::Inconsistent {
                    check,
                    deviation,
                    tolerance,
                });
            }
        }
        Ok(())
    }
}

/// Evolves to time t, cuts after the first n sites and evaluates the chain.
/// The record is returned unvalidated; see [`EntropyRecord::validate`].
///
/// When every mode carries the same symbol, A is a multiple of the identity
/// and the sites are uncorrelated, so all three quantities are exactly 0.
pub fn entropy_record(setup: &EvolutionSetup, n: usize, t: f64) -> Result<EntropyRecord> {
    let state = evolve(setup, t);
    if state.mode_symbols().windows(2).all(|w| w[0] == w[1]) {
        if n == 0 || n >= setup.size() {
            return Err(Error::InvalidCut { n, size: setup.size() });
        }
        return Ok(EntropyRecord {
            t,
            exact_entropy: 0.0,
            neg_log_purity: 0.0,
            det_bound: 0.0,
            n,
            size: setup.size(),
            identity_residual: 0.0,
            purity_deviation: 0.0,
        });
    }
    let a = densify(&state);
    let blocks = partition(&a, n)?;
    let reduced = reduce(&blocks)?;
    let pair = purity_pair(&blocks, &reduced)?;
    Ok(EntropyRecord {
        t,
        exact_entropy: exact_entropy(&a, n)?,
        neg_log_purity: -pair.z_form.ln(),
        det_bound: det_bound(&blocks)?,
        n,
        size: setup.size(),
        identity_residual: reduced.identity_residual,
        purity_deviation: pair.deviation(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TrigPolynomial;

    fn gap(c: f64) -> TrigPolynomial {
        TrigPolynomial::from_gap_family(c).0
    }

    fn evolved(lambda: TrigPolynomial, beta: TrigPolynomial, size: usize, t: f64) -> CMatrix {
        densify(&evolve(&EvolutionSetup::new(lambda, beta, size).unwrap(), t))
    }

    fn cmax(m: &CMatrix) -> f64 {
        m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    #[test]
    fn densify_constant_is_identity() {
        let state = GaussianPureState::new(vec![Complex64::new(1.0, 0.0); 6], 0.0);
        assert!(cmax(&(densify(&state) - CMatrix::identity(6, 6))) < 1e-15);
    }

    #[test]
    fn densify_initial_state_matches_circulant() {
        let beta = TrigPolynomial::new(vec![2.0, 0.5, -0.25]).unwrap();
        let a = evolved(gap(1.5), beta.clone(), 12, 0.0);
        let b = beta.build_circulant(12).unwrap().to_dense();
        assert!(linalg::max_abs(&(linalg::re(&a) - b)) < 1e-14);
        assert!(linalg::max_abs(&linalg::im(&a)) < 1e-14);
    }

    #[test]
    fn densify_roundtrip() {
        let setup = EvolutionSetup::new(gap(1.5), TrigPolynomial::constant(1.0), 16).unwrap();
        let state = evolve(&setup, 1.3);
        let a = densify(&state);
        assert!(cmax(&(&a - a.transpose())) < 1e-15);
        for (x, y) in circulant_symbols(&a).iter().zip(state.mode_symbols()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn partition_two_by_two() {
        let (a, c, r) = (Complex64::new(2.0, 0.5), Complex64::new(0.3, -0.2), Complex64::new(1.5, 0.1));
        let m = CMatrix::from_row_slice(2, 2, &[a, c, c, r]);
        let b = partition(&m, 1).unwrap();
        assert_eq!((b.t[(0, 0)], b.c[(0, 0)], b.r[(0, 0)]), (a, c, r));
        assert!((b.p[(0, 0)] - a / (a * r - c * c)).norm() < 1e-14);
    }

    #[test]
    fn partition_reassembles() {
        let a = evolved(gap(1.5), TrigPolynomial::constant(1.0), 10, 2.0);
        for n in [1, 4, 9] {
            let b = partition(&a, n).unwrap();
            assert_eq!(b.reassemble(), a);
            let prod = b.reassemble() * b.reassemble_inverse();
            assert!(cmax(&(prod - CMatrix::identity(10, 10))) < 1e-10);
        }
        assert_eq!(partition(&a, 9).unwrap().r.shape(), (1, 1));
        assert!(matches!(partition(&a, 0), Err(Error::InvalidCut { .. })));
        assert!(matches!(partition(&a, 10), Err(Error::InvalidCut { .. })));
    }

    #[test]
    fn partition_rejects_singular() {
        let mut m = CMatrix::identity(4, 4);
        m[(3, 3)] = Complex64::new(1e-14, 0.0);
        assert!(matches!(partition(&m, 2), Err(Error::IllConditioned(_))));
    }

    #[test]
    fn reduce_uncoupled_blocks() {
        let a = evolved(TrigPolynomial::constant(2.0), TrigPolynomial::constant(1.0), 8, 1.7);
        let b = partition(&a, 3).unwrap();
        let red = reduce(&b).unwrap();
        assert!(cmax(&red.delta) < 1e-15);
        assert!(cmax(&(&red.gamma - &b.r * Complex64::new(0.5, 0.0))) < 1e-15);
        assert!((purity(&b).unwrap() - 1.0).abs() < 1e-12);
        assert!(det_bound(&b).unwrap().abs() < 1e-12);
    }

    #[test]
    fn reduce_ground_state_is_real() {
        let beta = TrigPolynomial::new(vec![1.5, -1.0]).unwrap();
        let a = evolved(gap(1.5), beta, 12, 0.0);
        let red = reduce(&partition(&a, 6).unwrap()).unwrap();
        assert!(linalg::max_abs(&linalg::im(&red.gamma)) < 1e-14);
        assert!(linalg::max_abs(&linalg::im(&red.delta)) < 1e-14);
    }

    #[test]
    fn schur_identity_holds() {
        let a = evolved(gap(1.5), TrigPolynomial::constant(1.0), 8, 1.0);
        let red = reduce(&partition(&a, 4).unwrap()).unwrap();
        assert!(red.identity_residual < 1e-9, "{}", red.identity_residual);
    }

    #[test]
    fn purity_dual_formula() {
        let a = evolved(gap(1.5), TrigPolynomial::constant(1.0), 16, 2.0);
        let b = partition(&a, 8).unwrap();
        let pair = purity_pair(&b, &reduce(&b).unwrap()).unwrap();
        assert!(pair.z_form > 0.0 && pair.z_form < 1.0);
        assert!(pair.deviation() < 1e-9, "{pair:?}");
        assert!(pair.z_form <= (-det_bound(&b).unwrap()).exp() + 1e-12);
    }

    #[test]
    fn uncoupled_record_is_exactly_zero() {
        let setup = EvolutionSetup::new(TrigPolynomial::constant(2.0), TrigPolynomial::constant(0.7), 16).unwrap();
        for t in [0.0, 1.3, 7.0] {
            let r = entropy_record(&setup, 8, t).unwrap();
            assert_eq!([r.exact_entropy, r.neg_log_purity, r.det_bound], [0.0; 3]);
        }
        assert!(entropy_record(&setup, 16, 1.0).is_err());
    }

    #[test]
    fn product_state_has_unit_purity() {
        let a = evolved(gap(1.5), TrigPolynomial::constant(1.0), 16, 0.0);
        let b = partition(&a, 8).unwrap();
        assert!((purity(&b).unwrap() - 1.0).abs() < 1e-12);
        assert!(det_bound(&b).unwrap().abs() < 1e-12);
        assert!(exact_entropy(&a, 8).unwrap().abs() < 1e-10);
    }

    #[test]
    fn real_coupling_saturates_bound() {
        // at t = 0 with coupled β, C is real so Z = 0
        let beta = TrigPolynomial::new(vec![2.0, 0.6, 0.3]).unwrap();
        let a = evolved(gap(1.5), beta, 16, 0.0);
        let b = partition(&a, 8).unwrap();
        let neg_log = -purity(&b).unwrap().ln();
        assert!((det_bound(&b).unwrap() - neg_log).abs() < 1e-9);
    }

    #[test]
    fn gamma_sign_mutation_is_detected() {
        let a = evolved(gap(1.5), TrigPolynomial::constant(1.0), 16, 2.0);
        let b = partition(&a, 8).unwrap();
        let mut red = reduce(&b).unwrap();
        // flip the sign of the CᵀT̃⁻¹C/4 term: Γ' = R/2 + CᵀT̃⁻¹C/4
        red.gamma = &b.r - &red.gamma;
        let pair = purity_pair(&b, &red);
        assert!(pair.map_or(true, |p| p.deviation() > 1e-6));
    }

    #[test]
    fn symplectic_eigenvalues_of_thermal_mode() {
        // single mode with ⟨xx⟩ = ⟨pp⟩ = ν
        let sigma = RMatrix::from_row_slice(2, 2, &[1.3, 0.0, 0.0, 1.3]);
        let nu = symplectic_eigenvalues(&sigma).unwrap();
        assert!((nu[0] - 1.3).abs() < 1e-14);
        // squeezed: ⟨xx⟩ = 2, ⟨pp⟩ = 1/8 → ν = ½
        let sigma = RMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.125]);
        assert!((symplectic_eigenvalues(&sigma).unwrap()[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn entropy_chain_and_symmetries() {
        let a = evolved(gap(1.5), TrigPolynomial::constant(1.0), 12, 1.5);
        let b = partition(&a, 6).unwrap();
        let s = exact_entropy(&a, 6).unwrap();
        let p = -purity(&b).unwrap().ln();
        let d = det_bound(&b).unwrap();
        assert!(s >= p - 1e-8 && p >= d - 1e-8, "{s} {p} {d}");
        assert!(d > 0.0);
        // n ↔ N − n
        assert!((exact_entropy(&a, 4).unwrap() - exact_entropy(&a, 8).unwrap()).abs() < 1e-8);
        // shifting the kept interval
        let shifted: Vec<usize> = (3..9).collect();
        assert!((exact_entropy_sites(&a, &shifted).unwrap() - s).abs() < 1e-10);
    }

    #[test]
    fn ground_state_entropy_is_stationary() {
        let beta = TrigPolynomial::new(vec![1.5, -1.0]).unwrap();
        let s0 = exact_entropy(&evolved(gap(1.5), beta.clone(), 16, 0.0), 8).unwrap();
        assert!(s0 > 0.0);
        for t in [0.5, 3.0, 11.0] {
            let s = exact_entropy(&evolved(gap(1.5), beta.clone(), 16, t), 8).unwrap();
            assert!((s - s0).abs() < 1e-8);
        }
    }
}
