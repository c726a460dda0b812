//! The six single-qubit noise channels in Kraus form.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::linalg::{hermitian_eig, paulis, ComplexMatrix, C64};

const COMPLETENESS_TOL: f64 = 1e-12;
const DENSITY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("parameter {0} is outside [0, 1]")]
    ParamOutOfRange(f64),
    #[error("time constant must be positive, got {0}")]
    NonPositiveTimeConstant(f64),
    #[error("elapsed time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("unknown channel kind '{0}'")]
    UnknownKind(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    BitFlip,
    PhaseFlip,
    BitPhaseFlip,
    PhaseDamping,
    AmplitudeDamping,
    Depolarising,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 6] = [
        ChannelKind::BitFlip,
        ChannelKind::PhaseFlip,
        ChannelKind::BitPhaseFlip,
        ChannelKind::PhaseDamping,
        ChannelKind::AmplitudeDamping,
        ChannelKind::Depolarising,
    ];

    /// Command-line name.
    pub fn as_str(self) -> &'static str {
        match self {
            ChannelKind::BitFlip => "bitflip",
            ChannelKind::PhaseFlip => "phaseflip",
            ChannelKind::BitPhaseFlip => "bitphaseflip",
            ChannelKind::PhaseDamping => "phasedamp",
            ChannelKind::AmplitudeDamping => "ampdamp",
            ChannelKind::Depolarising => "depolarising",
        }
    }

    /// Unital channels fix the maximally mixed state.
    pub fn is_unital(self) -> bool {
        !matches!(self, ChannelKind::AmplitudeDamping)
    }

    pub fn is_flip(self) -> bool {
        matches!(self, ChannelKind::BitFlip | ChannelKind::PhaseFlip | ChannelKind::BitPhaseFlip)
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChannelKind {
    type Err = ChannelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ChannelKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| ChannelError::UnknownKind(s.to_string()))
    }
}

/// A completely positive trace-preserving map `ρ ↦ Σ_k E_k ρ E_k†`.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    kind: ChannelKind,
    param: f64,
    kraus: Vec<ComplexMatrix>,
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Builds the Kraus set of `kind` at probability `p` (flips, depolarising)
/// or damping strength `λ` (phase and amplitude damping). Operators with a
/// zero prefactor are dropped, so zero noise yields the single Kraus `I`.
pub fn make_channel(kind: ChannelKind, param: f64) -> Result<KrausChannel, ChannelError> {
    if !(0.0..=1.0).contains(&param) {
        return Err(ChannelError::ParamOutOfRange(param));
    }
    let keep = (1.0 - param).sqrt();
    let flip = param.sqrt();
    let weighted = |ops: Vec<(f64, ComplexMatrix)>| -> Vec<ComplexMatrix> {
        ops.into_iter().filter(|(c, _)| *c != 0.0).map(|(c, m)| m.scale(c)).collect()
    };
    let kraus = match kind {
        ChannelKind::BitFlip => weighted(vec![(keep, paulis::i2()), (flip, paulis::x())]),
        ChannelKind::PhaseFlip => weighted(vec![(keep, paulis::i2()), (flip, paulis::z())]),
        ChannelKind::BitPhaseFlip => weighted(vec![(keep, paulis::i2()), (flip, paulis::y())]),
        // ρ ↦ (p/2)·I + (1 − p)·ρ. Since XρX + YρY + ZρZ = 2I − ρ for unit
        // trace, this needs weight p/4 on each Pauli, not p/3.
        ChannelKind::Depolarising => {
            let quarter = (param / 4.0).sqrt();
            weighted(vec![
                ((1.0 - 0.75 * param).sqrt(), paulis::i2()),
                (quarter, paulis::x()),
                (quarter, paulis::y()),
                (quarter, paulis::z()),
            ])
        }
        ChannelKind::PhaseDamping => {
            let e0 = ComplexMatrix::from_real_diagonal(&[1.0, keep]);
            let e1 = ComplexMatrix::from_real_diagonal(&[0.0, flip]);
            if param == 0.0 { vec![e0] } else { vec![e0, e1] }
        }
        ChannelKind::AmplitudeDamping => {
            let e0 = ComplexMatrix::from_real_diagonal(&[1.0, keep]);
            let e1 = ComplexMatrix::mat2(real(0.0), real(flip), real(0.0), real(0.0));
            if param == 0.0 { vec![e0] } else { vec![e0, e1] }
        }
    };
    let channel = KrausChannel { kind, param, kraus };
    debug_assert!(channel.completeness_defect() <= COMPLETENESS_TOL);
    Ok(channel)
}

impl KrausChannel {
    /// The identity channel, expressed as a zero-strength bit flip.
    pub fn identity() -> Self {
        make_channel(ChannelKind::BitFlip, 0.0).expect("zero is a valid parameter")
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn param(&self) -> f64 {
        self.param
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `‖Σ_k E_k†E_k − I‖_F`.
    pub fn completeness_defect(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(2);
        for e in &self.kraus {
            sum = &sum + &(&e.adjoint() * e);
        }
        sum.distance(&ComplexMatrix::identity(2))
    }

    /// Applies the channel without validating the input state.
    pub fn apply_unchecked(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(2);
        for e in &self.kraus {
            out = &out + &(&(e * rho) * &e.adjoint());
        }
        out
    }
}

/// Checks that `rho` is a 2×2 density matrix within `DENSITY_TOL`.
pub fn validate_density(rho: &ComplexMatrix) -> Result<(), ChannelError> {
    if rho.dim() != 2 {
        return Err(ChannelError::InvalidState(format!("dimension {} is not 2", rho.dim())));
    }
    let herm = rho.hermiticity_error();
    if herm > DENSITY_TOL {
        return Err(ChannelError::InvalidState(format!("not Hermitian ({herm:e})")));
    }
    let tr = rho.trace();
    if (tr - real(1.0)).norm() > DENSITY_TOL {
        return Err(ChannelError::InvalidState(format!("trace {tr} is not 1")));
    }
    let low = hermitian_eig(rho)
        .map_err(|e| ChannelError::InvalidState(e.to_string()))?
        .min_eigenvalue();
    if low < -DENSITY_TOL {
        return Err(ChannelError::InvalidState(format!("negative eigenvalue {low:e}")));
    }
    Ok(())
}

/// `ε(ρ) = Σ_k E_k ρ E_k†` on a validated single-qubit state.
pub fn apply_channel(ch: &KrausChannel, rho: &ComplexMatrix) -> Result<ComplexMatrix, ChannelError> {
    validate_density(rho)?;
    Ok(ch.apply_unchecked(rho))
}

/// Phase-flip probability `½(1 + √(1 − λ))` equivalent to phase damping `λ`.
pub fn damping_to_flip_prob(lambda: f64) -> Result<f64, ChannelError> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(ChannelError::ParamOutOfRange(lambda));
    }
    Ok(0.5 * (1.0 + (1.0 - lambda).sqrt()))
}

/// `λ = 1 − exp(−elapsed/τ)`. With `τ = T₂` (or `T₁`) this is the damping
/// strength after `elapsed` of phase (or amplitude) damping, matching
/// `e^{−elapsed/(2τ)} = √(1 − λ)`.
pub fn decay_to_lambda(elapsed_time: f64, time_constant: f64) -> Result<f64, ChannelError> {
    if !(time_constant > 0.0) {
        return Err(ChannelError::NonPositiveTimeConstant(time_constant));
    }
    if !(elapsed_time >= 0.0) {
        return Err(ChannelError::NegativeTime(elapsed_time));
    }
    Ok(-(-elapsed_time / time_constant).exp_m1())
}

/// Damping rate `Γ = 1/(2τ)` for a time constant `τ`.
pub fn damping_rate(time_constant: f64) -> Result<f64, ChannelError> {
    if !(time_constant > 0.0) {
        return Err(ChannelError::NonPositiveTimeConstant(time_constant));
    }
    Ok(0.5 / time_constant)
}
