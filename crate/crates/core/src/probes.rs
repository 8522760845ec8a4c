//! Norm-ratio experiments over witness families.
//!
//! Each probe evaluates a ratio sequence either exactly, by propagating
//! Gaussian chirps and using closed-form norms, or on a grid through the
//! generator pipeline. Verdicts depend only on the ratio sequence.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, INVERTIBILITY_RTOL};
use crate::numeric::{
    apply_metaplectic, gaussian_apply, lp_norm, lpq_norm, mp_norm, wigner_metaplectic, GaussianChirp, Generators, Grid,
    GridFunction,
};
use crate::symplectic::{
    classify_lp, conjugate_exponent, dj_factorize, free_factorize, shift_invertible, shift_perturb, stft_matrix,
    BoundednessCase, IndexSet, SymplecticMatrix,
};

/// Smallest admissible length of a ratio sequence.
pub const MIN_ROWS: usize = 4;

/// Growth factor across the parameter range that counts as divergence.
pub const DIVERGENCE_FACTOR: f64 = 10.0;

/// Largest max/min spread that counts as a bounded band.
pub const BOUNDED_BAND: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Converges,
    Bounded,
    Diverges,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Converges => "converges",
            Verdict::Bounded => "bounded",
            Verdict::Diverges => "diverges",
            Verdict::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

/// How ratios are computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evaluator {
    /// Exact Gaussian propagation with closed-form norms.
    Exact,
    /// Sampling on the grid and running the generator pipeline.
    Grid(Grid),
}

impl fmt::Display for Evaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evaluator::Exact => f.write_str("exact"),
            Evaluator::Grid(g) => write!(f, "grid(d={}, n={}, T={})", g.dim(), g.n(), g.extent()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub label: String,
    pub parameter: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub name: String,
    pub parameter_name: String,
    pub rows: Vec<ProbeRow>,
    pub reference: Option<f64>,
    pub verdict: Verdict,
    pub evaluator: String,
    /// Some grid stage lost decay at the boundary.
    pub aliasing: bool,
}

impl ProbeReport {
    fn new(
        name: &str,
        parameter_name: &str,
        rows: Vec<ProbeRow>,
        reference: Option<f64>,
        verdict: Verdict,
        evaluator: Evaluator,
        aliasing: bool,
    ) -> Result<Self> {
        if rows.len() < MIN_ROWS {
            return Err(Error::Precondition(format!(
                "a probe needs at least {MIN_ROWS} parameters, got {}",
                rows.len()
            )));
        }
        Ok(ProbeReport {
            name: name.into(),
            parameter_name: parameter_name.into(),
            rows,
            reference,
            verdict,
            evaluator: evaluator.to_string(),
            aliasing,
        })
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.ratio).collect()
    }

    pub fn parameters(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.parameter).collect()
    }

    pub fn max_ratio(&self) -> f64 {
        self.rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_ratio(&self) -> f64 {
        self.rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min)
    }

    /// `max / min` of the ratios.
    pub fn spread(&self) -> f64 {
        self.max_ratio() / self.min_ratio()
    }

    /// Last ratio over the first.
    pub fn growth(&self) -> f64 {
        self.rows[self.rows.len() - 1].ratio / self.rows[0].ratio
    }
}

fn rows_from(parameters: &[f64], ratios: Vec<f64>) -> Vec<ProbeRow> {
    parameters.iter().zip(ratios).map(|(&p, r)| ProbeRow { label: short_label(p), parameter: p, ratio: r }).collect()
}

fn short_label(p: f64) -> String {
    let s = format!("{p:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

fn spread_of(ratios: &[f64]) -> f64 {
    let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

/// `≥ 10×` growth from first to last ratio diverges; a spread `≤ 2` is bounded.
pub fn growth_verdict(ratios: &[f64]) -> Verdict {
    if ratios.is_empty() {
        return Verdict::Inconclusive;
    }
    if ratios[ratios.len() - 1] >= DIVERGENCE_FACTOR * ratios[0] {
        Verdict::Diverges
    } else if spread_of(ratios) <= BOUNDED_BAND {
        Verdict::Bounded
    } else {
        Verdict::Inconclusive
    }
}

/// A spread `≥ 10×` diverges, `≤ 2` is bounded.
pub fn band_verdict(ratios: &[f64]) -> Verdict {
    let s = spread_of(ratios);
    if s >= DIVERGENCE_FACTOR {
        Verdict::Diverges
    } else if s <= BOUNDED_BAND {
        Verdict::Bounded
    } else {
        Verdict::Inconclusive
    }
}

/// Every ratio at most `reference·(1 + 1e-3)` is bounded; reaching the reference
/// within `1e-4` converges; any exceedance is inconclusive.
pub fn sup_verdict(ratios: &[f64], reference: f64) -> Verdict {
    if ratios.iter().any(|&r| r > reference * (1.0 + 1e-3)) {
        return Verdict::Inconclusive;
    }
    let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max >= reference * (1.0 - 1e-4) {
        Verdict::Converges
    } else {
        Verdict::Bounded
    }
}

/// Every ratio within `1e-3` relative of the reference is bounded.
pub fn constant_verdict(ratios: &[f64], reference: f64) -> Verdict {
    if ratios.iter().all(|&r| ((r - reference) / reference).abs() <= 1e-3) {
        Verdict::Bounded
    } else {
        Verdict::Inconclusive
    }
}

fn check_exponent(p: f64, what: &str) -> Result<()> {
    if p > 0.0 {
        Ok(())
    } else {
        Err(Error::Validation(format!("{what} must be in (0, ∞], got {p}")))
    }
}

fn check_grid(ev: &Evaluator, d: usize) -> Result<()> {
    if let Evaluator::Grid(g) = ev {
        if g.dim() != d {
            return Err(Error::Dimension(format!("grid has {} axes, operator acts on {d} variables", g.dim())));
        }
    }
    Ok(())
}

fn recip(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

/// `‖Ŝf‖_q / ‖f‖_p`, and whether the grid output lost decay.
fn operator_ratio(s: &SymplecticMatrix, f: &GaussianChirp, p: f64, q: f64, ev: &Evaluator) -> Result<(f64, bool)> {
    match ev {
        Evaluator::Exact => {
            let out = gaussian_apply(s, f)?;
            Ok((out.lp_norm(q)? / f.lp_norm(p)?, false))
        }
        Evaluator::Grid(grid) => {
            let x = f.sample(grid)?;
            let y = apply_metaplectic(&dj_factorize(s, INVERTIBILITY_RTOL)?, &x)?;
            Ok((lp_norm(&y, q)? / lp_norm(&x, p)?, y.aliasing_warning()))
        }
    }
}

/// Chirp-compensated dilated Gaussians `e^{-iπB⁻¹Ax·x} e^{-πs²|x|²}` through a free `Ŝ`,
/// ratios `‖Ŝf‖_{p'} / ‖f‖_p` against the closed-form norm.
pub fn beckner_probe(s: &SymplecticMatrix, p: f64, scales: &[f64], ev: Evaluator) -> Result<ProbeReport> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::Validation(format!("p must lie in [1, 2], got {p}")));
    }
    let ff = free_factorize(s)?;
    let d = s.dim();
    check_grid(&ev, d)?;
    let reference = classify_lp(s).norm(p).ok_or_else(|| Error::Precondition("no closed-form norm".into()))?;
    let pp = conjugate_exponent(p);
    let mut aliasing = false;
    let mut ratios = Vec::with_capacity(scales.len());
    for &sc in scales {
        let f = GaussianChirp::isotropic(d, sc).chirp(&-&ff.p)?;
        let (r, a) = operator_ratio(s, &f, p, pp, &ev)?;
        aliasing |= a;
        ratios.push(r);
    }
    let verdict = sup_verdict(&ratios, reference);
    ProbeReport::new("beckner", "s", rows_from(scales, ratios), Some(reference), verdict, ev, aliasing)
}

/// Dilated Gaussians through `Ŝ` with `B = 0`; the ratio `‖Ŝf‖_p / ‖f‖_p` is constant.
pub fn quasi_isometry_probe(s: &SymplecticMatrix, p: f64, scales: &[f64], ev: Evaluator) -> Result<ProbeReport> {
    check_exponent(p, "p")?;
    let v = classify_lp(s);
    if v.case != BoundednessCase::LowerTriangular {
        return Err(Error::Precondition("quasi-isometry probe needs B = 0".into()));
    }
    let d = s.dim();
    check_grid(&ev, d)?;
    let reference = v.norm(p).ok_or_else(|| Error::Precondition("no closed-form norm".into()))?;
    let mut aliasing = false;
    let mut ratios = Vec::with_capacity(scales.len());
    for &sc in scales {
        let f = GaussianChirp::isotropic(d, sc);
        let (r, a) = operator_ratio(s, &f, p, p, &ev)?;
        aliasing |= a;
        ratios.push(r);
    }
    let verdict = constant_verdict(&ratios, reference);
    ProbeReport::new("quasi-isometry", "s", rows_from(scales, ratios), Some(reference), verdict, ev, aliasing)
}

fn signum(e: f64) -> f64 {
    if e.abs() < 1e-12 {
        0.0
    } else {
        e.signum()
    }
}

/// Witness family for `Ŝ` with `B ≠ 0` singular.
///
/// With `S = V_Q D_L V_Pᵀ Π_J`, `𝔪_P 𝓕_J H⁻¹ = 𝓕_J 𝔪_{P_{JᶜJᶜ}}` for
/// `H = 𝔗_{I + I_{Jᶜ}PI_J} 𝔭_{-I_J P I_J}`, so `f = H⁻¹(g ⊗ h)` splits the
/// action. `g` lives on the `J` variables, `h` on `Jᶜ` in the eigenbasis of
/// `P_{JᶜJᶜ}`; each factor is dilated by `λ^{±1}` in the direction that makes
/// its `L^p → L^q` ratio grow.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    dim: usize,
    j: IndexSet,
    eigvecs: Mat,
    kernel: Vec<bool>,
    sigma_j: f64,
    sigma_kernel: f64,
    sigma_range: f64,
    dilation_inv: Mat,
    chirp: Mat,
}

impl Witness {
    pub fn new(s: &SymplecticMatrix, p: f64, q: f64) -> Result<Self> {
        check_exponent(p, "p")?;
        check_exponent(q, "q")?;
        if classify_lp(s).case != BoundednessCase::SingularNonzeroB {
            return Err(Error::Precondition("witness needs B singular and nonzero".into()));
        }
        if (p == 2.0) != (q == 2.0) {
            return Err(Error::Precondition(format!("pair ({p}, {q}) mixes 2 with another exponent and is skipped")));
        }
        let f = dj_factorize(s, INVERTIBILITY_RTOL)?;
        let d = s.dim();
        let jc: Vec<usize> = f.j.complement().members().to_vec();
        let pcc = linalg::sub_matrix(&f.p, &jc, &jc);
        let eig = linalg::symmetrize(&pcc).symmetric_eigen();
        let scale = f.p.amax().max(1.0);
        let kernel: Vec<bool> = eig.eigenvalues.iter().map(|l| l.abs() <= 1e-9 * scale).collect();

        let e_free = recip(p) + recip(q) - 1.0;
        let sigma_j = if f.j.is_empty() { 0.0 } else { signum(e_free) };
        let sigma_kernel = signum(recip(p) - recip(q));
        let sigma_range = if sigma_j == 0.0 && sigma_kernel == 0.0 { signum(e_free) } else { 0.0 };

        let (ij, ijc) = (f.j.projector(), f.j.complement().projector());
        let dil = Mat::identity(d, d) + &ijc * &f.p * &ij;
        let dilation_inv =
            linalg::inverse(&dil).ok_or_else(|| Error::Factorization("redox dilation singular".into()))?;
        let chirp = linalg::symmetrize(&(&ij * &f.p * &ij));
        Ok(Witness {
            dim: d,
            j: f.j,
            eigvecs: eig.eigenvectors,
            kernel,
            sigma_j,
            sigma_kernel,
            sigma_range,
            dilation_inv,
            chirp,
        })
    }

    /// `f_λ = 𝔭_{I_J P I_J} 𝔗_{(I + I_{Jᶜ}PI_J)⁻¹}(g_λ ⊗ h_λ)`.
    pub fn member(&self, lambda: f64) -> Result<GaussianChirp> {
        let d = self.dim;
        let mut w = Mat::zeros(d, d);
        let wj = lambda.powf(2.0 * self.sigma_j);
        for &k in self.j.members() {
            w[(k, k)] = wj;
        }
        let jc: Vec<usize> = self.j.complement().members().to_vec();
        let widths: Vec<f64> = self
            .kernel
            .iter()
            .map(|&ker| lambda.powf(2.0 * if ker { self.sigma_kernel } else { self.sigma_range }))
            .collect();
        let wcc = &self.eigvecs * Mat::from_diagonal(&nalgebra::DVector::from_vec(widths)) * self.eigvecs.transpose();
        for (a, &ka) in jc.iter().enumerate() {
            for (b, &kb) in jc.iter().enumerate() {
                w[(ka, kb)] = wcc[(a, b)];
            }
        }
        let base = GaussianChirp::with_covariance(&linalg::symmetrize(&w))?;
        base.rescale(&self.dilation_inv)?.chirp(&self.chirp)
    }
}

/// Ratios `‖Ŝf_λ‖_q / ‖f_λ‖_p` over the witness family.
pub fn unbounded_probe(s: &SymplecticMatrix, p: f64, q: f64, lambdas: &[f64], ev: Evaluator) -> Result<ProbeReport> {
    let witness = Witness::new(s, p, q)?;
    check_grid(&ev, s.dim())?;
    let mut aliasing = false;
    let mut ratios = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let f = witness.member(lambda)?;
        let (r, a) = operator_ratio(s, &f, p, q, &ev)?;
        aliasing |= a;
        ratios.push(r);
    }
    let reference = (p == 2.0 && q == 2.0).then_some(1.0);
    let verdict = growth_verdict(&ratios);
    ProbeReport::new("unbounded", "lambda", rows_from(lambdas, ratios), reference, verdict, ev, aliasing)
}

fn half_dim(a: &SymplecticMatrix) -> Result<usize> {
    if !a.dim().is_multiple_of(2) {
        return Err(Error::Dimension(format!("expected a 4d x 4d matrix, got {}x{}", 2 * a.dim(), 2 * a.dim())));
    }
    Ok(a.dim() / 2)
}

/// `‖W_𝒜(f_λ, g)‖_p / ‖V_g f_λ‖_p` for `f_λ = e^{-πλ²|x|²}` and the standard Gaussian window.
pub fn norm_equiv_probe(a: &SymplecticMatrix, p: f64, lambdas: &[f64], ev: Evaluator) -> Result<ProbeReport> {
    check_exponent(p, "p")?;
    let d = half_dim(a)?;
    check_grid(&ev, d)?;
    let window = GaussianChirp::standard(d);
    let stft_m = stft_matrix(d);
    let mut aliasing = false;
    let mut ratios = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let f = GaussianChirp::isotropic(d, lambda);
        let r = match &ev {
            Evaluator::Exact => {
                let t = f.tensor(&window.conj());
                gaussian_apply(a, &t)?.lp_norm(p)? / gaussian_apply(&stft_m, &t)?.lp_norm(p)?
            }
            Evaluator::Grid(grid) => {
                let (fs, gs) = (f.sample(grid)?, window.sample(grid)?);
                let w = wigner_metaplectic(a, &fs, &gs)?;
                aliasing |= w.aliasing_warning();
                lp_norm(&w, p)? / mp_norm(&fs, &gs, p)?
            }
        };
        ratios.push(r);
    }
    let verdict = band_verdict(&ratios);
    ProbeReport::new("norm-equivalence", "lambda", rows_from(lambdas, ratios), None, verdict, ev, aliasing)
}

/// `M = [[I + P₁₂Q₁₂ᵀ, -P₁₂], [-Q₁₂ᵀ, I]]`.
pub fn mixed_matrix(p12: &Mat, q12: &Mat) -> Result<Mat> {
    let d = p12.nrows();
    if p12.ncols() != d || q12.nrows() != d || q12.ncols() != d {
        return Err(Error::Dimension("P12 and Q12 must be square of equal size".into()));
    }
    let i = Mat::identity(d, d);
    Ok(linalg::from_blocks(&(&i + p12 * q12.transpose()), &(-p12), &(-q12.transpose()), &i))
}

/// Ratios `‖𝔗_M(f ⊗ g)‖_{L^{p,q}} / (‖f‖_p ‖g‖_q)` over exponent pairs, against 1.
pub fn mixed_norm_check(
    p12: &Mat,
    q12: &Mat,
    f: &GaussianChirp,
    g: &GaussianChirp,
    pairs: &[(f64, f64)],
    ev: Evaluator,
) -> Result<ProbeReport> {
    let m = mixed_matrix(p12, q12)?;
    let d = p12.nrows();
    if f.dim() != d || g.dim() != d {
        return Err(Error::Dimension(format!("f and g must have {d} variables")));
    }
    check_grid(&ev, d)?;
    let mut aliasing = false;
    let mut rows = Vec::with_capacity(pairs.len());
    let sampled: Option<(GridFunction, GridFunction, GridFunction)> = match &ev {
        Evaluator::Exact => None,
        Evaluator::Grid(grid) => {
            let (fs, gs) = (f.sample(grid)?, g.sample(grid)?);
            let t = fs.tensor(&gs)?.rescale(&m)?;
            aliasing = t.aliasing_warning();
            Some((fs, gs, t))
        }
    };
    let exact = f.tensor(g).rescale(&m)?;
    for (k, &(p, q)) in pairs.iter().enumerate() {
        check_exponent(p, "p")?;
        check_exponent(q, "q")?;
        let r = match &sampled {
            None => exact.lpq_norm(d, p, q)? / (f.lp_norm(p)? * g.lp_norm(q)?),
            Some((fs, gs, t)) => lpq_norm(t, p, q)? / (lp_norm(fs, p)? * lp_norm(gs, q)?),
        };
        rows.push(ProbeRow { label: format!("({p},{q})"), parameter: k as f64, ratio: r });
    }
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let verdict =
        if ratios.iter().all(|r| (r - 1.0).abs() <= 1e-4) { Verdict::Converges } else { Verdict::Inconclusive };
    ProbeReport::new("mixed-norm", "pair", rows, Some(1.0), verdict, ev, aliasing)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityRow {
    pub tau: f64,
    /// `‖Ξ_τ - I‖_F`
    pub xi_distance: f64,
    pub xi_free: bool,
    pub a_tau_shift_invertible: bool,
    /// Larger of the residuals of `𝒜 = Ξ_τ⁻¹𝒜_τ` and `𝒜_τ = 𝒜Θ_τ`.
    pub residual: f64,
}

/// Shift-invertible approximations `𝒜_τ` of `𝒜` over decreasing `τ`.
pub fn density_table(a: &SymplecticMatrix, taus: &[f64]) -> Result<Vec<DensityRow>> {
    taus.iter()
        .map(|&tau| {
            let sp = shift_perturb(a, tau)?;
            Ok(DensityRow {
                tau,
                xi_distance: sp.xi_distance_to_identity(),
                xi_free: sp.xi_is_free(),
                a_tau_shift_invertible: shift_invertible(&sp.a_tau, INVERTIBILITY_RTOL)?.invertible,
                residual: sp.residual_left.max(sp.residual_right),
            })
        })
        .collect()
}

/// Converges when `‖Ξ_τ - I‖` strictly decreases, every `Ξ_τ` is free, every
/// `𝒜_τ` is shift-invertible and residuals stay below `1e-10`.
pub fn density_report(rows: &[DensityRow]) -> Result<ProbeReport> {
    let ok = rows.windows(2).all(|w| w[1].xi_distance < w[0].xi_distance)
        && rows.iter().all(|r| r.xi_free && r.a_tau_shift_invertible && r.residual <= 1e-10);
    let taus: Vec<f64> = rows.iter().map(|r| r.tau).collect();
    let dists: Vec<f64> = rows.iter().map(|r| r.xi_distance).collect();
    let verdict = if ok { Verdict::Converges } else { Verdict::Inconclusive };
    ProbeReport::new("density", "tau", rows_from(&taus, dists), Some(0.0), verdict, Evaluator::Exact, false)
}
