//! Exact single-qubit unitary designs and the Haar moment they reproduce.
//!
//! Three ensembles are built by group closure: the Pauli group (a 1-design),
//! the 24-element Clifford group (a 3-design) and the 120-element binary
//! icosahedral group (a 5-design). `haar_moment_oracle` integrates over
//! SU(2) directly and never touches an ensemble, so it can certify them.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::{conjugate_tensor_power, paulis, ComplexMatrix, LinalgError, C64};

/// Highest order the quadrature oracle accepts.
pub const MAX_ORACLE_ORDER: usize = 6;

const WEIGHT_TOL: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-12;
const CLOSURE_MATCH_TOL: f64 = 1e-9;
const CERTIFY_SAMPLES: usize = 50;
const CERTIFY_REL_TOL: f64 = 1e-10;
const CERTIFY_SEED: u64 = 0x7D35_1A2B;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DesignError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("ensemble is empty")]
    Empty,
    #[error("element {index} has non-positive weight {weight}")]
    NonPositiveWeight { index: usize, weight: f64 },
    #[error("weights sum to {sum}, not 1")]
    WeightSum { sum: f64 },
    #[error("element {index} is not a 2x2 unitary (deviation {deviation:e})")]
    NotUnitary { index: usize, deviation: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("order {t} is outside the supported range 1..={MAX_ORACLE_ORDER}")]
    UnsupportedOrder { t: usize },
}

/// A weighted finite set of single-qubit unitaries.
#[derive(Debug, Clone)]
pub struct UnitaryEnsemble {
    label: String,
    elements: Vec<(f64, ComplexMatrix)>,
}

impl UnitaryEnsemble {
    pub fn new(label: impl Into<String>, elements: Vec<(f64, ComplexMatrix)>) -> Result<Self, DesignError> {
        if elements.is_empty() {
            return Err(DesignError::Empty);
        }
        let mut sum = 0.0;
        for (index, (weight, u)) in elements.iter().enumerate() {
            if !(*weight > 0.0) {
                return Err(DesignError::NonPositiveWeight { index, weight: *weight });
            }
            sum += weight;
            let deviation = unitarity_defect(u);
            if deviation > UNITARY_TOL {
                return Err(DesignError::NotUnitary { index, deviation });
            }
        }
        if (sum - 1.0).abs() > WEIGHT_TOL {
            return Err(DesignError::WeightSum { sum });
        }
        Ok(UnitaryEnsemble { label: label.into(), elements })
    }

    pub fn uniform(label: impl Into<String>, unitaries: Vec<ComplexMatrix>) -> Result<Self, DesignError> {
        let w = 1.0 / unitaries.len().max(1) as f64;
        Self::new(label, unitaries.into_iter().map(|u| (w, u)).collect())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[(f64, ComplexMatrix)] {
        &self.elements
    }

    pub fn unitaries(&self) -> impl Iterator<Item = &ComplexMatrix> {
        self.elements.iter().map(|(_, u)| u)
    }

    /// One element per line: the weight, then the eight interleaved
    /// real/imaginary parts of `U` in row-major order, comma separated.
    pub fn to_text(&self) -> String {
        let mut out = format!("# ensemble: {}\n", self.label);
        for (w, u) in &self.elements {
            let mut fields = vec![format!("{w:.17e}")];
            for z in u.entries() {
                fields.push(format!("{:.17e}", z.re));
                fields.push(format!("{:.17e}", z.im));
            }
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }

    /// Parses the format written by [`UnitaryEnsemble::to_text`]. Blank lines
    /// and `#` comments are skipped; a `# ensemble: NAME` comment sets the label.
    pub fn from_text(text: &str) -> Result<Self, DesignError> {
        let mut label = String::from("custom");
        let mut elements = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(name) = comment.trim().strip_prefix("ensemble:") {
                    label = name.trim().to_string();
                }
                continue;
            }
            let values: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| DesignError::Parse { line: n + 1, message: e.to_string() })?;
            if values.len() != 9 {
                return Err(DesignError::Parse {
                    line: n + 1,
                    message: format!("expected 9 fields, found {}", values.len()),
                });
            }
            let entries = values[1..].chunks(2).map(|p| C64::new(p[0], p[1])).collect();
            elements.push((values[0], ComplexMatrix::from_row_major(2, entries)?));
        }
        Self::new(label, elements)
    }
}

/// `‖U†U − I‖_F`, infinite for a non-2×2 input.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    if u.dim() != 2 {
        return f64::INFINITY;
    }
    (&u.adjoint() * u).distance(&ComplexMatrix::identity(2))
}

/// The uniform Pauli ensemble `{I, X, Y, Z}`.
pub fn pauli_design() -> UnitaryEnsemble {
    UnitaryEnsemble::uniform("pauli", vec![paulis::i2(), paulis::x(), paulis::y(), paulis::z()])
        .expect("Pauli matrices form a valid ensemble")
}

/// Scales `u` so its first nonzero entry (row-major) is real and positive.
fn canonical_phase(u: &ComplexMatrix) -> ComplexMatrix {
    let lead = u
        .entries()
        .iter()
        .copied()
        .find(|z| z.norm() > 1e-12)
        .expect("unitary has a nonzero entry");
    u.scale_complex(lead.conj() / lead.norm())
}

/// Breadth-first closure of `generators` under left multiplication,
/// starting from the identity.
fn close_group(generators: &[ComplexMatrix], normalize: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Vec<ComplexMatrix> {
    let mut group = vec![normalize(&ComplexMatrix::identity(2))];
    let mut frontier = group.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for a in &frontier {
            for g in generators {
                let candidate = normalize(&(g * a));
                if !group.iter().any(|h| h.max_abs_diff(&candidate) < CLOSURE_MATCH_TOL) {
                    group.push(candidate.clone());
                    next.push(candidate);
                }
            }
        }
        frontier = next;
        assert!(group.len() <= 1024, "group closure failed to terminate");
    }
    group
}

/// The single-qubit Clifford group modulo global phase, generated by `H`
/// and `S`.
pub fn clifford_design() -> UnitaryEnsemble {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = ComplexMatrix::mat2(C64::new(s, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0));
    let phase = ComplexMatrix::mat2(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0));
    let group = close_group(&[h, phase], canonical_phase);
    assert_eq!(group.len(), 24, "Clifford closure must have 24 projective elements");
    UnitaryEnsemble::uniform("clifford", group).expect("Clifford group forms a valid ensemble")
}

/// `exp(−i·angle·(n·σ)/2)` for a (not necessarily unit) axis `n`.
pub fn su2_rotation(axis: [f64; 3], angle: f64) -> ComplexMatrix {
    let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let [nx, ny, nz] = axis.map(|a| a / norm);
    let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    ComplexMatrix::mat2(
        C64::new(c, -s * nz),
        C64::new(-s * ny, -s * nx),
        C64::new(s * ny, -s * nx),
        C64::new(c, s * nz),
    )
}

/// The binary icosahedral group: 120 elements of SU(2), both `±U` kept.
pub fn icosahedral_design() -> UnitaryEnsemble {
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    // Five-fold rotation about a vertex of the icosahedron with vertices
    // at cyclic permutations of (0, ±1, ±φ), and a three-fold rotation
    // about the body diagonal.
    let five = su2_rotation([0.0, 1.0, golden], 2.0 * PI / 5.0);
    let three = su2_rotation([1.0, 1.0, 1.0], 2.0 * PI / 3.0);
    let group = close_group(&[five, three], |u| u.clone());
    assert_eq!(group.len(), 120, "binary icosahedral closure must have 120 elements");
    UnitaryEnsemble::uniform("icosahedral", group).expect("icosahedral group forms a valid ensemble")
}

fn qubit_count(m: &ComplexMatrix, t: usize) -> Result<(), DesignError> {
    let expected = 1usize << t.min(12);
    if t == 0 {
        return Err(LinalgError::ZeroPower.into());
    }
    if m.dim() != expected {
        return Err(LinalgError::DimensionMismatch { expected, found: m.dim() }.into());
    }
    Ok(())
}

/// `Σ_i p_i · U_i^⊗t · M · (U_i^⊗t)†`, summed in ensemble order.
pub fn design_moment(ens: &UnitaryEnsemble, m: &ComplexMatrix, t: usize) -> Result<ComplexMatrix, DesignError> {
    qubit_count(m, t)?;
    let mut acc = ComplexMatrix::zeros(m.dim());
    for (w, u) in ens.elements() {
        acc.add_scaled(&conjugate_tensor_power(m, u, t)?, *w);
    }
    Ok(acc)
}

fn rz(angle: f64) -> ComplexMatrix {
    let half = angle / 2.0;
    ComplexMatrix::from_diagonal(&[C64::from_polar(1.0, -half), C64::from_polar(1.0, half)])
}

fn ry(angle: f64) -> ComplexMatrix {
    su2_rotation([0.0, 1.0, 0.0], angle)
}

/// Weights for `½∫_0^π h(β) sin β dβ` from `n` equispaced samples of `h`
/// over a full period. Exact for trigonometric polynomials of degree below
/// `n/2`.
fn polar_weights(n: usize) -> Vec<f64> {
    let kmax = (n - 1) / 2;
    // ½∫_0^π e^{ikβ} sin β dβ
    let moment = |k: i64| -> C64 {
        match k.abs() {
            1 => C64::new(0.0, PI / 4.0 * k.signum() as f64),
            _ => {
                let even = if k % 2 == 0 { 2.0 } else { 0.0 };
                C64::new(0.5 * even / (1.0 - (k * k) as f64), 0.0)
            }
        }
    };
    (0..n)
        .map(|j| {
            let beta = 2.0 * PI * j as f64 / n as f64;
            let mut w = C64::new(0.0, 0.0);
            for k in -(kmax as i64)..=(kmax as i64) {
                w += moment(k) * C64::from_polar(1.0, -(k as f64) * beta);
            }
            w.re / n as f64
        })
        .collect()
}

/// Trapezoid average over one period of `Rz(angle)^⊗t` conjugation.
fn azimuthal_average(m: &ComplexMatrix, t: usize, nodes: usize) -> Result<ComplexMatrix, LinalgError> {
    let mut acc = ComplexMatrix::zeros(m.dim());
    for a in 0..nodes {
        let angle = 2.0 * PI * a as f64 / nodes as f64;
        acc.add_scaled(&conjugate_tensor_power(m, &rz(angle), t)?, 1.0 / nodes as f64);
    }
    Ok(acc)
}

/// Haar average `∫ U^⊗t M (U^⊗t)† dU` by product quadrature over the Euler
/// angles of `U = Rz(α)·Ry(β)·Rz(γ)`.
///
/// Every integrand entry is a trigonometric polynomial of degree at most `t`
/// in each angle, so `2(t + 1)` equispaced nodes per angle integrate it
/// exactly. The α and γ sums factor out of the β sum by linearity.
pub fn haar_moment_oracle(m: &ComplexMatrix, t: usize) -> Result<ComplexMatrix, DesignError> {
    if t == 0 || t > MAX_ORACLE_ORDER {
        return Err(DesignError::UnsupportedOrder { t });
    }
    qubit_count(m, t)?;
    let nodes = 2 * (t + 1);
    let inner = azimuthal_average(m, t, nodes)?;
    let mut polar = ComplexMatrix::zeros(m.dim());
    for (j, w) in polar_weights(nodes).into_iter().enumerate() {
        let beta = 2.0 * PI * j as f64 / nodes as f64;
        polar.add_scaled(&conjugate_tensor_power(&inner, &ry(beta), t)?, w);
    }
    Ok(azimuthal_average(&polar, t, nodes)?)
}

/// Random Hermitian test matrix with entries uniform in the unit square.
pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    let raw = ComplexMatrix::from_fn(dim, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    raw.hermitian_part()
}

/// Largest relative deviation `‖design − Haar‖_F / ‖M‖_F` over the fixed
/// test set at order `t`.
pub fn max_oracle_deviation(ens: &UnitaryEnsemble, t: usize) -> Result<f64, DesignError> {
    let mut rng = ChaCha8Rng::seed_from_u64(CERTIFY_SEED ^ t as u64);
    let mut worst = 0.0f64;
    for _ in 0..CERTIFY_SAMPLES {
        let m = random_hermitian(&mut rng, 1 << t);
        let diff = design_moment(ens, &m, t)?.distance(&haar_moment_oracle(&m, t)?);
        worst = worst.max(diff / m.frobenius_norm());
    }
    Ok(worst)
}

/// Largest `t ≤ t_max` such that every order `1..=t` matches the Haar
/// oracle on 50 fixed-seed Hermitian test matrices. Returns 0 when even the
/// first moment disagrees.
pub fn verify_design_order(ens: &UnitaryEnsemble, t_max: usize) -> Result<usize, DesignError> {
    if t_max > MAX_ORACLE_ORDER {
        return Err(DesignError::UnsupportedOrder { t: t_max });
    }
    for t in 1..=t_max {
        if max_oracle_deviation(ens, t)? > CERTIFY_REL_TOL {
            return Ok(t - 1);
        }
    }
    Ok(t_max)
}
