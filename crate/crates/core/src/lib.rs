//! Quality of exact single-qubit unitary t-designs under noise.
//!
//! An exact `t`-design reproduces the Haar moments `E(ρ^⊗t)`. When a noise
//! channel acts on every state before (or after) the design unitary, the
//! reproduced moment drifts, and the drift is measured by the smallest `ε`
//! with `(1 − ε)·E ⪯ Ẽ ⪯ (1 + ε)·E`.
//!
//! * [`linalg`]: dense complex matrices, tensor powers, Hermitian spectra.
//! * [`designs`]: Pauli, Clifford and binary icosahedral ensembles, and a
//!   Haar quadrature oracle that certifies their order.
//! * [`channels`]: the six single-qubit noise channels in Kraus form.
//! * [`quality`]: exact/noisy moments and the minimal `ε`.
//! * [`bloch`]: Bloch-ball state samples.

pub mod bloch;
pub mod channels;
pub mod designs;
pub mod linalg;
pub mod quality;

pub use bloch::{cube_grid, density_from_point, spherical_grid, BlochError, BlochGridSpec, BlochPoint};
pub use channels::{apply_channel, make_channel, ChannelError, ChannelKind, KrausChannel};
pub use designs::{
    clifford_design, design_moment, haar_moment_oracle, icosahedral_design, pauli_design, verify_design_order,
    DesignError, UnitaryEnsemble,
};
pub use linalg::{ComplexMatrix, LinalgError, C64};
pub use quality::{
    epsilon_for_state, epsilon_over_sample, exact_moment, min_epsilon, noisy_moment, CertifiedDesign,
    EpsilonMode, EpsilonResult, ModeVariant, NoiseModel, PreparedSample, QualityError,
};

/// Any error raised by this crate.
#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Quality(#[from] QualityError),
    #[error(transparent)]
    Bloch(#[from] BlochError),
}
