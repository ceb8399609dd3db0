//! Multimode Gaussian states and the symplectic action of optical elements.
//!
//! A state is a mean vector and covariance matrix over the quadratures
//! `(x₁, p₁, …, xₙ, pₙ)` of its named modes. Every operation returns a new
//! state; states are plain immutable values and safe to share across threads.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::dsl::{self, Circuit, CircuitElement, Severity};

/// Tolerance for covariance symmetry checks.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Symplectic eigenvalues must stay above `1 - PHYSICALITY_TOL`.
pub const PHYSICALITY_TOL: f64 = 1e-9;
/// Entrywise tolerance on the symplectic condition `S Ω Sᵀ = Ω`.
pub const SYMPLECTIC_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GaussianError {
    #[error("unknown mode `{0}`")]
    UnknownMode(String),
    #[error("duplicate mode `{0}`")]
    DuplicateMode(String),
    #[error("mode label must be non-empty")]
    EmptyModeLabel,
    #[error("signal and idler must differ")]
    ModesCoincide,
    #[error("{param}={value} outside [{min}, {max}]")]
    OutOfRange {
        param: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("empty quadrature combination")]
    EmptyCombination,
    #[error("covariance not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("non-finite entry in state")]
    NonFinite,
    #[error("uncertainty principle violated (min symplectic eigenvalue {0})")]
    Unphysical(f64),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("circuit modes do not match state modes")]
    ModeMismatch,
}

pub type Result<T> = std::result::Result<T, GaussianError>;

/// Label of one optical mode; unique within a circuit or state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeId(String);

impl ModeId {
    pub fn new(label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if label.is_empty() {
            return Err(GaussianError::EmptyModeLabel);
        }
        Ok(ModeId(label))
    }

    pub fn label(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<&str> for ModeId {
    type Error = GaussianError;

    fn try_from(s: &str) -> Result<Self> {
        ModeId::new(s)
    }
}

/// Mean and variance of a homodyne-measured quadrature, in shot-noise units.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadratureStats {
    pub mean: f64,
    pub variance: f64,
}

impl QuadratureStats {
    /// Variance in dB relative to the shot-noise level.
    pub fn variance_db(&self) -> f64 {
        10.0 * self.variance.log10()
    }
}

/// Two-mode squeezer parameters: nonlinear coupling `g` and pump phase.
///
/// The amplitude gains are `μ = cosh g`, `ν = sinh g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqueezerParams {
    pub gain_g: f64,
    pub pump_phase: f64,
}

impl SqueezerParams {
    pub fn new(gain_g: f64, pump_phase: f64) -> Result<Self> {
        if !(gain_g >= 0.0) || !gain_g.is_finite() {
            return Err(GaussianError::OutOfRange {
                param: "g",
                value: gain_g,
                min: 0.0,
                max: f64::INFINITY,
            });
        }
        Ok(SqueezerParams { gain_g, pump_phase })
    }

    pub fn mu(&self) -> f64 {
        self.gain_g.cosh()
    }

    pub fn nu(&self) -> f64 {
        self.gain_g.sinh()
    }
}

/// One term of a weighted quadrature combination `Σ wₖ · X_modeₖ(θₖ)`.
#[derive(Clone, Debug)]
pub struct ComboTerm {
    pub mode: ModeId,
    pub theta: f64,
    pub weight: f64,
}

/// The affine Gaussian channel of one circuit element:
/// `mean ← S·mean + d`, `cov ← S·cov·Sᵀ + D`.
///
/// Lossless elements have `D = 0` and symplectic `S`; loss and thermal resets
/// carry a diffusion block.
#[derive(Clone, Debug)]
pub struct ElementAction {
    pub matrix: DMatrix<f64>,
    pub diffusion: DMatrix<f64>,
    pub displacement: DVector<f64>,
}

impl ElementAction {
    pub fn identity(n_modes: usize) -> Self {
        let d = 2 * n_modes;
        ElementAction {
            matrix: DMatrix::identity(d, d),
            diffusion: DMatrix::zeros(d, d),
            displacement: DVector::zeros(d),
        }
    }

    pub fn displace(n_modes: usize, idx: usize, alpha: Complex64) -> Self {
        let mut a = Self::identity(n_modes);
        a.displacement[2 * idx] = 2.0 * alpha.re;
        a.displacement[2 * idx + 1] = 2.0 * alpha.im;
        a
    }

    /// Reset one mode to a thermal state of mean photon number `nbar`.
    pub fn thermal(n_modes: usize, idx: usize, nbar: f64) -> Self {
        let mut a = Self::identity(n_modes);
        a.matrix[(2 * idx, 2 * idx)] = 0.0;
        a.matrix[(2 * idx + 1, 2 * idx + 1)] = 0.0;
        let v = 2.0 * nbar + 1.0;
        a.diffusion[(2 * idx, 2 * idx)] = v;
        a.diffusion[(2 * idx + 1, 2 * idx + 1)] = v;
        a
    }

    /// Two-mode squeezer `b = μ a + e^{2iθ_p} ν a†` acting on modes `is`, `ii`.
    pub fn two_mode_squeezer(
        n_modes: usize,
        is: usize,
        ii: usize,
        params: SqueezerParams,
    ) -> Self {
        let (mu, nu) = (params.mu(), params.nu());
        let (c, s) = (2.0 * params.pump_phase).cos_sin();
        let mut a = Self::identity(n_modes);
        let (xs, ps, xi, pi) = (2 * is, 2 * is + 1, 2 * ii, 2 * ii + 1);
        for &(row, col_own, col_x, col_p) in &[(xs, xs, xi, pi), (xi, xi, xs, ps)] {
            // x' = μ x + ν (cos2θ_p x_other + sin2θ_p p_other)
            a.matrix[(row, col_own)] = mu;
            a.matrix[(row, col_x)] = nu * c;
            a.matrix[(row, col_p)] = nu * s;
        }
        for &(row, col_own, col_x, col_p) in &[(ps, ps, xi, pi), (pi, pi, xs, ps)] {
            // p' = μ p + ν (sin2θ_p x_other − cos2θ_p p_other)
            a.matrix[(row, col_own)] = mu;
            a.matrix[(row, col_x)] = nu * s;
            a.matrix[(row, col_p)] = -nu * c;
        }
        a
    }

    /// Beam splitter with amplitude transmittance `t`; the reflected second
    /// output carries the minus sign: `x_a' = t x_a + r x_b`,
    /// `x_b' = −r x_a + t x_b`.
    pub fn beam_splitter(n_modes: usize, ia: usize, ib: usize, t: f64) -> Self {
        let r = (1.0 - t * t).max(0.0).sqrt();
        let mut a = Self::identity(n_modes);
        for off in 0..2 {
            let (qa, qb) = (2 * ia + off, 2 * ib + off);
            a.matrix[(qa, qa)] = t;
            a.matrix[(qa, qb)] = r;
            a.matrix[(qb, qa)] = -r;
            a.matrix[(qb, qb)] = t;
        }
        a
    }

    /// Counter-clockwise rotation by `theta` in the `(x, p)` plane.
    pub fn phase_shift(n_modes: usize, idx: usize, theta: f64) -> Self {
        let (c, s) = theta.cos_sin();
        let mut a = Self::identity(n_modes);
        let (x, p) = (2 * idx, 2 * idx + 1);
        a.matrix[(x, x)] = c;
        a.matrix[(x, p)] = -s;
        a.matrix[(p, x)] = s;
        a.matrix[(p, p)] = c;
        a
    }

    /// Pure-loss channel of transmissivity `eta` with vacuum diffusion.
    pub fn loss(n_modes: usize, idx: usize, eta: f64) -> Self {
        let mut a = Self::identity(n_modes);
        let se = eta.sqrt();
        for off in 0..2 {
            let q = 2 * idx + off;
            a.matrix[(q, q)] = se;
            a.diffusion[(q, q)] = 1.0 - eta;
        }
        a
    }

    /// Sequential composition: `self` first, then `next`.
    pub fn then(&self, next: &ElementAction) -> ElementAction {
        ElementAction {
            matrix: &next.matrix * &self.matrix,
            diffusion: &next.matrix * &self.diffusion * next.matrix.transpose() + &next.diffusion,
            displacement: &next.matrix * &self.displacement + &next.displacement,
        }
    }
}

trait CosSin {
    fn cos_sin(self) -> (f64, f64);
}

impl CosSin for f64 {
    fn cos_sin(self) -> (f64, f64) {
        (self.cos(), self.sin())
    }
}

/// Gaussian state over named modes: quadrature mean vector and covariance
/// matrix, interleaved `(x₁, p₁, …, xₙ, pₙ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState {
    modes: Vec<ModeId>,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Vacuum over the given modes: zero mean, identity covariance.
    pub fn vacuum(modes: &[ModeId]) -> Result<Self> {
        for (k, m) in modes.iter().enumerate() {
            if modes[..k].contains(m) {
                return Err(GaussianError::DuplicateMode(m.label().to_string()));
            }
        }
        let d = 2 * modes.len();
        Ok(GaussianState {
            modes: modes.to_vec(),
            mean: DVector::zeros(d),
            cov: DMatrix::identity(d, d),
        })
    }

    pub fn modes(&self) -> &[ModeId] {
        &self.modes
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn index_of(&self, mode: &ModeId) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| m == mode)
            .ok_or_else(|| GaussianError::UnknownMode(mode.label().to_string()))
    }

    fn apply(&self, action: &ElementAction) -> GaussianState {
        GaussianState {
            modes: self.modes.clone(),
            mean: &action.matrix * &self.mean + &action.displacement,
            cov: &action.matrix * &self.cov * action.matrix.transpose() + &action.diffusion,
        }
    }

    /// Displace one mode by the complex amplitude `alpha`; the quadrature
    /// mean shifts so that `⟨X(θ)⟩ = α e^{−iθ} + α* e^{iθ}`.
    pub fn displace(&self, mode: &ModeId, alpha: Complex64) -> Result<Self> {
        let idx = self.index_of(mode)?;
        Ok(self.apply(&ElementAction::displace(self.n_modes(), idx, alpha)))
    }

    /// Reset one mode to a thermal state of mean photon number `nbar`,
    /// decorrelated from the rest.
    pub fn set_thermal(&self, mode: &ModeId, nbar: f64) -> Result<Self> {
        if !(nbar >= 0.0) || !nbar.is_finite() {
            return Err(GaussianError::OutOfRange {
                param: "nbar",
                value: nbar,
                min: 0.0,
                max: f64::INFINITY,
            });
        }
        let idx = self.index_of(mode)?;
        Ok(self.apply(&ElementAction::thermal(self.n_modes(), idx, nbar)))
    }

    pub fn two_mode_squeezer(
        &self,
        signal: &ModeId,
        idler: &ModeId,
        params: SqueezerParams,
    ) -> Result<Self> {
        if signal == idler {
            return Err(GaussianError::ModesCoincide);
        }
        let is = self.index_of(signal)?;
        let ii = self.index_of(idler)?;
        Ok(self.apply(&ElementAction::two_mode_squeezer(self.n_modes(), is, ii, params)))
    }

    pub fn beam_splitter(&self, a: &ModeId, b: &ModeId, t: f64) -> Result<Self> {
        if a == b {
            return Err(GaussianError::ModesCoincide);
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(GaussianError::OutOfRange {
                param: "t",
                value: t,
                min: 0.0,
                max: 1.0,
            });
        }
        let ia = self.index_of(a)?;
        let ib = self.index_of(b)?;
        Ok(self.apply(&ElementAction::beam_splitter(self.n_modes(), ia, ib, t)))
    }

    pub fn phase_shift(&self, mode: &ModeId, theta: f64) -> Result<Self> {
        let idx = self.index_of(mode)?;
        Ok(self.apply(&ElementAction::phase_shift(self.n_modes(), idx, theta)))
    }

    pub fn loss(&self, mode: &ModeId, eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(GaussianError::OutOfRange {
                param: "eta",
                value: eta,
                min: 0.0,
                max: 1.0,
            });
        }
        let idx = self.index_of(mode)?;
        Ok(self.apply(&ElementAction::loss(self.n_modes(), idx, eta)))
    }

    /// Reset one mode to vacuum, decorrelated from all others. Models a
    /// physically blocked beam.
    pub fn reset_vacuum(&self, mode: &ModeId) -> Result<Self> {
        let idx = self.index_of(mode)?;
        Ok(self.apply(&ElementAction::loss(self.n_modes(), idx, 0.0)))
    }

    /// Homodyne statistics of `X(θ)` on one mode.
    pub fn homodyne_stats(&self, mode: &ModeId, theta: f64) -> Result<QuadratureStats> {
        self.combo_stats(&[ComboTerm {
            mode: mode.clone(),
            theta,
            weight: 1.0,
        }])
    }

    /// Statistics of the weighted combination `Σ wₖ · X_modeₖ(θₖ)`.
    pub fn combo_stats(&self, terms: &[ComboTerm]) -> Result<QuadratureStats> {
        if terms.is_empty() {
            return Err(GaussianError::EmptyCombination);
        }
        let mut u = DVector::zeros(2 * self.n_modes());
        for term in terms {
            let idx = self.index_of(&term.mode)?;
            u[2 * idx] += term.weight * term.theta.cos();
            u[2 * idx + 1] += term.weight * term.theta.sin();
        }
        let mean = u.dot(&self.mean);
        let variance = (&self.cov * &u).dot(&u);
        Ok(QuadratureStats { mean, variance })
    }

    /// Covariance of `X_a(θ_a)` and `X_b(θ_b)`.
    pub fn quadrature_cov(
        &self,
        a: &ModeId,
        theta_a: f64,
        b: &ModeId,
        theta_b: f64,
    ) -> Result<f64> {
        let ia = self.index_of(a)?;
        let ib = self.index_of(b)?;
        let mut ua = DVector::zeros(2 * self.n_modes());
        ua[2 * ia] = theta_a.cos();
        ua[2 * ia + 1] = theta_a.sin();
        let mut ub = DVector::zeros(2 * self.n_modes());
        ub[2 * ib] = theta_b.cos();
        ub[2 * ib + 1] = theta_b.sin();
        Ok((&self.cov * &ub).dot(&ua))
    }

    /// Symplectic eigenvalues of the covariance matrix (each returned once
    /// per quadrature pair, so `2n` values with multiplicity two).
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        let n = self.n_modes();
        if n == 0 {
            return Vec::new();
        }
        let mut omega = DMatrix::zeros(2 * n, 2 * n);
        for k in 0..n {
            omega[(2 * k, 2 * k + 1)] = 1.0;
            omega[(2 * k + 1, 2 * k)] = -1.0;
        }
        let m = omega * &self.cov;
        m.complex_eigenvalues().iter().map(|z| z.norm()).collect()
    }

    pub fn min_symplectic_eigenvalue(&self) -> f64 {
        self.symplectic_eigenvalues()
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    /// Check symmetry, finiteness, and the uncertainty principle
    /// (all symplectic eigenvalues ≥ 1 − 1e−9).
    pub fn check_physical(&self) -> Result<()> {
        if self.mean.iter().any(|v| !v.is_finite()) || self.cov.iter().any(|v| !v.is_finite()) {
            return Err(GaussianError::NonFinite);
        }
        let asym = (&self.cov - self.cov.transpose()).abs().max();
        if asym > SYMMETRY_TOL {
            return Err(GaussianError::NotSymmetric(asym));
        }
        if self.n_modes() > 0 {
            let min = self.min_symplectic_eigenvalue();
            if min < 1.0 - PHYSICALITY_TOL {
                return Err(GaussianError::Unphysical(min));
            }
        }
        Ok(())
    }
}

/// The affine-channel representation of one circuit element against a mode
/// ordering. Loss and thermal elements carry a nonzero diffusion block;
/// everything else is purely symplectic (measure elements map to identity).
pub fn element_symplectic(element: &CircuitElement, modes: &[ModeId]) -> Result<ElementAction> {
    let n = modes.len();
    let idx = |m: &ModeId| -> Result<usize> {
        modes
            .iter()
            .position(|x| x == m)
            .ok_or_else(|| GaussianError::UnknownMode(m.label().to_string()))
    };
    match element {
        CircuitElement::Displace { mode, re, im } => Ok(ElementAction::displace(
            n,
            idx(mode)?,
            Complex64::new(*re, *im),
        )),
        CircuitElement::Thermal { mode, nbar } => {
            if !(*nbar >= 0.0) {
                return Err(GaussianError::OutOfRange {
                    param: "nbar",
                    value: *nbar,
                    min: 0.0,
                    max: f64::INFINITY,
                });
            }
            Ok(ElementAction::thermal(n, idx(mode)?, *nbar))
        }
        CircuitElement::Tms {
            signal,
            idler,
            g,
            theta_p,
        } => {
            if signal == idler {
                return Err(GaussianError::ModesCoincide);
            }
            Ok(ElementAction::two_mode_squeezer(
                n,
                idx(signal)?,
                idx(idler)?,
                SqueezerParams::new(*g, *theta_p)?,
            ))
        }
        CircuitElement::Bs { a, b, t } => {
            if a == b {
                return Err(GaussianError::ModesCoincide);
            }
            if !(0.0..=1.0).contains(t) {
                return Err(GaussianError::OutOfRange {
                    param: "t",
                    value: *t,
                    min: 0.0,
                    max: 1.0,
                });
            }
            Ok(ElementAction::beam_splitter(n, idx(a)?, idx(b)?, *t))
        }
        CircuitElement::Phase { mode, theta } => {
            Ok(ElementAction::phase_shift(n, idx(mode)?, *theta))
        }
        CircuitElement::Loss { mode, eta } => {
            if !(0.0..=1.0).contains(eta) {
                return Err(GaussianError::OutOfRange {
                    param: "eta",
                    value: *eta,
                    min: 0.0,
                    max: 1.0,
                });
            }
            Ok(ElementAction::loss(n, idx(mode)?, *eta))
        }
        CircuitElement::Block { mode } => Ok(ElementAction::loss(n, idx(mode)?, 0.0)),
        CircuitElement::Measure { .. } => Ok(ElementAction::identity(n)),
    }
}

/// One recorded homodyne measurement of a simulated circuit.
#[derive(Clone, Debug, serde::Serialize)]
pub struct MeasurementRecord {
    pub label: String,
    pub mode: String,
    pub theta: f64,
    pub stats: QuadratureStats,
}

fn check_validated(circuit: &Circuit) -> Result<()> {
    let diags = dsl::validate(circuit);
    let errors: Vec<String> = diags
        .iter()
        .filter(|d| d.severity == Severity::Error)
        .map(|d| d.message.clone())
        .collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(GaussianError::InvalidCircuit(errors.join("; ")))
    }
}

/// Apply every element of `circuit` in order to `state`. Measure elements do
/// not mutate the state.
pub fn propagate(state: &GaussianState, circuit: &Circuit) -> Result<GaussianState> {
    check_validated(circuit)?;
    if circuit.modes != state.modes {
        return Err(GaussianError::ModeMismatch);
    }
    let mut current = state.clone();
    for element in &circuit.elements {
        if matches!(element, CircuitElement::Measure { .. }) {
            continue;
        }
        let action = element_symplectic(element, &current.modes)?;
        current = current.apply(&action);
    }
    Ok(current)
}

/// Run a circuit from vacuum on its declared modes, capturing homodyne
/// statistics at each `measure` element in file order.
pub fn simulate(circuit: &Circuit) -> Result<Vec<MeasurementRecord>> {
    check_validated(circuit)?;
    let mut state = GaussianState::vacuum(&circuit.modes)?;
    let mut records = Vec::new();
    for element in &circuit.elements {
        if let CircuitElement::Measure { mode, theta, label } = element {
            let stats = state.homodyne_stats(mode, *theta)?;
            records.push(MeasurementRecord {
                label: label.clone(),
                mode: mode.label().to_string(),
                theta: *theta,
                stats,
            });
        } else {
            let action = element_symplectic(element, &state.modes)?;
            state = state.apply(&action);
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests;
