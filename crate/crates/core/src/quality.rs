//! Exact and noisy moment operators, and the smallest `ε` for which
//! `(1 − ε)·A ⪯ B ⪯ (1 + ε)·A` holds.
//!
//! `A` is the Haar moment `E(ρ^⊗t)` reproduced by an exact design and `B`
//! the moment produced when a noise channel acts before or after each
//! design unitary. Writing `D = B − A`, the two-sided Loewner condition is
//! `−ε·A ⪯ D ⪯ ε·A`, whose smallest solution on the support of `A` is the
//! spectral radius of `A^{−1/2}·D·A^{−1/2}`. Any part of `D` that reaches
//! the kernel of `A` cannot be bounded by a finite `ε`; that part is
//! reported as the kernel residual.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::bloch::BlochPoint;
use crate::channels::{validate_density, ChannelError, KrausChannel};
use crate::designs::{verify_design_order, DesignError, UnitaryEnsemble};
use crate::linalg::{hermitian_eig, tensor_power, ComplexMatrix, LinalgError, Spectrum, C64};

/// Allowed `|tr A − tr B|`.
pub const TRACE_TOL: f64 = 1e-10;

/// Per-state values below this are reported as exactly zero at `t = 1`.
const FIRST_ORDER_ZERO: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QualityError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("moment traces differ: {a} vs {b}")]
    TraceMismatch { a: f64, b: f64 },
    #[error("moment dimensions differ: {a} vs {b}")]
    DimensionMismatch { a: usize, b: usize },
    #[error("ensemble '{label}' is certified to order {order}, below t = {t}")]
    InsufficientOrder { label: String, order: usize, t: usize },
    #[error("t = {0} is outside 1..=5")]
    UnsupportedT(usize),
    #[error("state sample is empty")]
    EmptySample,
    #[error("invalid epsilon mode: {0}")]
    InvalidMode(String),
}

/// Where the channel acts relative to the design unitary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseModel {
    /// `Σ_i p_i (U_i ε(ρ) U_i†)^⊗t`
    Before,
    /// `Σ_i p_i ε(U_i ρ U_i†)^⊗t`
    After,
}

impl NoiseModel {
    pub fn as_str(self) -> &'static str {
        match self {
            NoiseModel::Before => "before",
            NoiseModel::After => "after",
        }
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NoiseModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "before" => Ok(NoiseModel::Before),
            "after" => Ok(NoiseModel::After),
            other => Err(format!("unknown noise model '{other}' (expected before|after)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeVariant {
    /// Any kernel residual above tolerance makes the state infeasible.
    Strict,
    /// Always report the `ε` restricted to the support of `A`.
    SupportProjected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonMode {
    pub variant: ModeVariant,
    /// Eigenvalues of `A` at or below `rank_cutoff · λ_max` count as kernel.
    pub rank_cutoff: f64,
    pub kernel_residual_tol: f64,
}

impl EpsilonMode {
    pub const DEFAULT_RANK_CUTOFF: f64 = 1e-10;
    pub const DEFAULT_KERNEL_TOL: f64 = 1e-8;

    pub fn strict() -> Self {
        EpsilonMode {
            variant: ModeVariant::Strict,
            rank_cutoff: Self::DEFAULT_RANK_CUTOFF,
            kernel_residual_tol: Self::DEFAULT_KERNEL_TOL,
        }
    }

    pub fn projected() -> Self {
        EpsilonMode { variant: ModeVariant::SupportProjected, ..Self::strict() }
    }

    pub fn validate(&self) -> Result<(), QualityError> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !open_unit(self.rank_cutoff) || !open_unit(self.kernel_residual_tol) {
            return Err(QualityError::InvalidMode(format!(
                "cutoffs must lie in (0, 1): rank_cutoff = {}, kernel_residual_tol = {}",
                self.rank_cutoff, self.kernel_residual_tol
            )));
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self.variant {
            ModeVariant::Strict => "strict",
            ModeVariant::SupportProjected => "projected",
        }
    }
}

impl Default for EpsilonMode {
    fn default() -> Self {
        Self::strict()
    }
}

impl FromStr for EpsilonMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(Self::strict()),
            "projected" => Ok(Self::projected()),
            other => Err(format!("unknown epsilon mode '{other}' (expected strict|projected)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonResult {
    /// Infinite when infeasible.
    pub epsilon: f64,
    pub feasible: bool,
    pub kernel_residual: f64,
    pub argmax_state: Option<BlochPoint>,
}

impl EpsilonResult {
    fn infeasible(kernel_residual: f64) -> Self {
        EpsilonResult { epsilon: f64::INFINITY, feasible: false, kernel_residual, argmax_state: None }
    }
}

/// An ensemble together with the design order it has been certified to.
#[derive(Debug, Clone)]
pub struct CertifiedDesign {
    ensemble: UnitaryEnsemble,
    order: usize,
}

impl CertifiedDesign {
    /// Runs [`verify_design_order`] up to `t_max`.
    pub fn certify(ensemble: UnitaryEnsemble, t_max: usize) -> Result<Self, QualityError> {
        let order = verify_design_order(&ensemble, t_max)?;
        Ok(CertifiedDesign { ensemble, order })
    }

    /// Trusts a previously established order.
    pub fn assume_order(ensemble: UnitaryEnsemble, order: usize) -> Self {
        CertifiedDesign { ensemble, order }
    }

    /// The binary icosahedral 5-design.
    pub fn icosahedral() -> Self {
        Self::assume_order(crate::designs::icosahedral_design(), 5)
    }

    pub fn clifford() -> Self {
        Self::assume_order(crate::designs::clifford_design(), 3)
    }

    pub fn pauli() -> Self {
        Self::assume_order(crate::designs::pauli_design(), 1)
    }

    pub fn ensemble(&self) -> &UnitaryEnsemble {
        &self.ensemble
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn require(&self, t: usize) -> Result<(), QualityError> {
        if !(1..=5).contains(&t) {
            return Err(QualityError::UnsupportedT(t));
        }
        if t > self.order {
            return Err(QualityError::InsufficientOrder {
                label: self.ensemble.label().to_string(),
                order: self.order,
                t,
            });
        }
        Ok(())
    }
}

fn conjugate(u: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    &(u * rho) * &u.adjoint()
}

/// `Σ_i p_i (U_i ρ U_i†)^⊗t`, which equals the design moment of `ρ^⊗t`.
fn averaged_power(ens: &UnitaryEnsemble, t: usize, state_of: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(1 << t);
    for (w, u) in ens.elements() {
        let power = tensor_power(&state_of(u), t).expect("t is within the resource guard");
        acc.add_scaled(&power, *w);
    }
    acc
}

/// The design moment of `ρ^⊗t`, equal to the Haar moment `E(ρ^⊗t)`.
pub fn exact_moment(rho: &ComplexMatrix, t: usize, design: &CertifiedDesign) -> Result<ComplexMatrix, QualityError> {
    design.require(t)?;
    validate_density(rho)?;
    Ok(averaged_power(&design.ensemble, t, |u| conjugate(u, rho)))
}

/// The noisy moment under `model`.
pub fn noisy_moment(
    rho: &ComplexMatrix,
    t: usize,
    design: &CertifiedDesign,
    ch: &KrausChannel,
    model: NoiseModel,
) -> Result<ComplexMatrix, QualityError> {
    design.require(t)?;
    validate_density(rho)?;
    Ok(match model {
        NoiseModel::Before => {
            let noisy = ch.apply_unchecked(rho);
            averaged_power(&design.ensemble, t, |u| conjugate(u, &noisy))
        }
        NoiseModel::After => averaged_power(&design.ensemble, t, |u| ch.apply_unchecked(&conjugate(u, rho))),
    })
}

/// Spectral data of the reference moment `A`, reusable against many `B`.
#[derive(Debug, Clone)]
pub struct PreparedReference {
    dim: usize,
    trace: f64,
    reference: ComplexMatrix,
    /// Orthonormal basis of the support, one column per kept eigenvalue.
    support: Vec<Vec<C64>>,
    inv_sqrt: Vec<f64>,
    mode: EpsilonMode,
}

impl PreparedReference {
    pub fn new(a: &ComplexMatrix, mode: EpsilonMode) -> Result<Self, QualityError> {
        mode.validate()?;
        let spectrum: Spectrum = hermitian_eig(a)?;
        let kept = crate::linalg::support_indices(&spectrum, mode.rank_cutoff);
        let support = kept.iter().map(|&k| spectrum.eigenvector(k)).collect();
        let inv_sqrt = kept.iter().map(|&k| spectrum.eigenvalues[k].sqrt().recip()).collect();
        Ok(PreparedReference { dim: a.dim(), trace: a.trace().re, reference: a.clone(), support, inv_sqrt, mode })
    }

    pub fn rank(&self) -> usize {
        self.support.len()
    }

    /// `Σ_k v_k v_k†` over the kept eigenvectors.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim, |i, j| self.support.iter().map(|v| v[i] * v[j].conj()).sum())
    }

    pub fn epsilon(&self, b: &ComplexMatrix) -> Result<EpsilonResult, QualityError> {
        if b.dim() != self.dim {
            return Err(QualityError::DimensionMismatch { a: self.dim, b: b.dim() });
        }
        let deviation = b.hermiticity_error();
        if deviation > crate::linalg::HERMITIAN_TOL {
            return Err(LinalgError::NotHermitian { deviation }.into());
        }
        let tb = b.trace().re;
        if (self.trace - tb).abs() > TRACE_TOL {
            return Err(QualityError::TraceMismatch { a: self.trace, b: tb });
        }
        let a_proj = self.projector();
        let d = b - &self.reference;
        let complement = &ComplexMatrix::identity(self.dim) - &a_proj;
        let qd = &complement * &d;
        let kernel_residual = (&qd * &complement).frobenius_norm() + (&qd * &a_proj).frobenius_norm();

        if self.mode.variant == ModeVariant::Strict && kernel_residual > self.mode.kernel_residual_tol {
            return Ok(EpsilonResult::infeasible(kernel_residual));
        }
        let epsilon = self.weighted_spectral_radius(&d)?;
        Ok(EpsilonResult { epsilon, feasible: true, kernel_residual, argmax_state: None })
    }

    /// Spectral radius of `S^{−1/2}·V†DV·S^{−1/2}` on the support.
    fn weighted_spectral_radius(&self, d: &ComplexMatrix) -> Result<f64, QualityError> {
        let r = self.rank();
        if r == 0 {
            return Ok(0.0);
        }
        let dv: Vec<Vec<C64>> = self
            .support
            .iter()
            .map(|v| (0..self.dim).map(|i| (0..self.dim).map(|j| d[(i, j)] * v[j]).sum()).collect())
            .collect();
        let m = ComplexMatrix::from_fn(r, |a, b| {
            let inner: C64 = self.support[a].iter().zip(&dv[b]).map(|(x, y)| x.conj() * y).sum();
            inner * (self.inv_sqrt[a] * self.inv_sqrt[b])
        });
        let spectrum = hermitian_eig(&m.hermitian_part())?;
        Ok(spectrum.max_eigenvalue().abs().max(spectrum.min_eigenvalue().abs()))
    }
}

/// Smallest `ε` with `(1 − ε)A ⪯ B ⪯ (1 + ε)A`.
pub fn min_epsilon(a: &ComplexMatrix, b: &ComplexMatrix, mode: EpsilonMode) -> Result<EpsilonResult, QualityError> {
    if a.dim() != b.dim() {
        return Err(QualityError::DimensionMismatch { a: a.dim(), b: b.dim() });
    }
    PreparedReference::new(a, mode)?.epsilon(b)
}

fn clean_first_order(t: usize, mut res: EpsilonResult) -> EpsilonResult {
    if t == 1 && res.feasible && res.epsilon < FIRST_ORDER_ZERO {
        res.epsilon = 0.0;
    }
    res
}

/// `ε` for a single state.
pub fn epsilon_for_state(
    rho: &ComplexMatrix,
    t: usize,
    design: &CertifiedDesign,
    ch: &KrausChannel,
    model: NoiseModel,
    mode: EpsilonMode,
) -> Result<EpsilonResult, QualityError> {
    let a = exact_moment(rho, t, design)?;
    let b = noisy_moment(rho, t, design, ch, model)?;
    let mut res = clean_first_order(t, min_epsilon(&a, &b, mode)?);
    res.argmax_state = Some(BlochPoint::from_density(rho));
    Ok(res)
}

/// Max-reduction over per-state results in sample order. An infeasible
/// state wins over any finite one; ties keep the earliest state.
fn reduce_sample(results: Vec<EpsilonResult>) -> EpsilonResult {
    let kernel_residual = results.iter().map(|r| r.kernel_residual).fold(0.0, f64::max);
    let mut best: Option<EpsilonResult> = None;
    for r in results {
        let replace = match &best {
            None => true,
            Some(b) => (b.feasible && !r.feasible) || (b.feasible == r.feasible && r.epsilon > b.epsilon),
        };
        if replace {
            best = Some(r);
        }
    }
    let mut best = best.expect("reduction over a non-empty sample");
    best.kernel_residual = kernel_residual;
    best
}

/// Sample `ε`: the largest per-state value, with the state attaining it.
pub fn epsilon_over_sample(
    states: &[ComplexMatrix],
    t: usize,
    design: &CertifiedDesign,
    ch: &KrausChannel,
    model: NoiseModel,
    mode: EpsilonMode,
) -> Result<EpsilonResult, QualityError> {
    if states.is_empty() {
        return Err(QualityError::EmptySample);
    }
    let per_state = states
        .par_iter()
        .map(|rho| epsilon_for_state(rho, t, design, ch, model, mode))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(reduce_sample(per_state))
}

/// A fixed state sample with its exact moments already decomposed, for
/// evaluating many channels or parameters at one `t`.
pub struct PreparedSample {
    states: Vec<ComplexMatrix>,
    points: Vec<BlochPoint>,
    references: Vec<PreparedReference>,
    t: usize,
    design: CertifiedDesign,
}

impl PreparedSample {
    pub fn new(
        states: Vec<ComplexMatrix>,
        t: usize,
        design: &CertifiedDesign,
        mode: EpsilonMode,
    ) -> Result<Self, QualityError> {
        if states.is_empty() {
            return Err(QualityError::EmptySample);
        }
        let references = states
            .par_iter()
            .map(|rho| PreparedReference::new(&exact_moment(rho, t, design)?, mode))
            .collect::<Result<Vec<_>, _>>()?;
        let points = states.iter().map(BlochPoint::from_density).collect();
        Ok(PreparedSample { states, points, references, t, design: design.clone() })
    }

    /// From Bloch points, converted with [`crate::bloch::density_from_point`].
    pub fn from_points(
        points: &[BlochPoint],
        t: usize,
        design: &CertifiedDesign,
        mode: EpsilonMode,
    ) -> Result<Self, crate::Error> {
        let states = points
            .iter()
            .map(|&p| crate::bloch::density_from_point(p))
            .collect::<Result<Vec<_>, _>>()?;
        let mut sample = Self::new(states, t, design, mode)?;
        sample.points = points.to_vec();
        Ok(sample)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn points(&self) -> &[BlochPoint] {
        &self.points
    }

    /// Per-state results in sample order.
    pub fn per_state(&self, ch: &KrausChannel, model: NoiseModel) -> Result<Vec<EpsilonResult>, QualityError> {
        (0..self.states.len())
            .into_par_iter()
            .map(|i| {
                let b = noisy_moment(&self.states[i], self.t, &self.design, ch, model)?;
                let mut res = clean_first_order(self.t, self.references[i].epsilon(&b)?);
                res.argmax_state = Some(self.points[i]);
                Ok(res)
            })
            .collect()
    }

    pub fn epsilon(&self, ch: &KrausChannel, model: NoiseModel) -> Result<EpsilonResult, QualityError> {
        Ok(reduce_sample(self.per_state(ch, model)?))
    }
}
