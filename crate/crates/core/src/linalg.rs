//! Dense complex matrices sized for `t`-fold qubit tensor powers.
//!
//! Everything here is row-major and immutable once built. The Kronecker
//! convention is `(M ⊗ N)[i·dimN + k][j·dimN + l] = M[i][j]·N[k][l]`, so a
//! serialized `tensor_power` is bit-comparable across tools that use the
//! same convention.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

/// Largest dimension any tensor power may reach.
pub const MAX_DIM: usize = 4096;

/// Tolerance used when a matrix is flagged Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub type C64 = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("tensor power must be at least 1")]
    ZeroPower,
    #[error("dimension {dim} exceeds the {MAX_DIM} resource guard")]
    TooLarge { dim: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("expected {expected} entries, found {found}")]
    BadEntryCount { expected: usize, found: usize },
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        ComplexMatrix { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if dim == 0 || data.len() != dim * dim {
            return Err(LinalgError::BadEntryCount { expected: dim * dim, found: data.len() });
        }
        Ok(ComplexMatrix { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { dim, data }
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// 2×2 matrix from its rows.
    pub fn mat2(a: C64, b: C64, c: C64, d: C64) -> Self {
        ComplexMatrix { dim: 2, data: vec![a, b, c, d] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        ComplexMatrix { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        ComplexMatrix { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    /// `self += s·other`, the accumulation step of every weighted sum here.
    pub fn add_scaled(&mut self, other: &ComplexMatrix, s: f64) {
        assert_eq!(self.dim, other.dim, "dimension mismatch in add_scaled");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    /// Largest `|M[i][j] − conj(M[j][i])|`.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// Replaces the matrix by `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn kron(&self, other: &ComplexMatrix) -> Self {
        let n = other.dim;
        let dim = self.dim * n;
        let mut out = Self::zeros(dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self[(i, j)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..n {
                    let row = (i * n + k) * dim + j * n;
                    let src = &other.data[k * n..(k + 1) * n];
                    for (dst, b) in out.data[row..row + n].iter_mut().zip(src) {
                        *dst = a * b;
                    }
                }
            }
        }
        out
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matmul");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let src = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// `v† M v` for a column vector `v`.
    pub fn quadratic_form(&self, v: &[C64]) -> C64 {
        assert_eq!(v.len(), self.dim);
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.dim {
            let row: C64 = (0..self.dim).map(|j| self[(i, j)] * v[j]).sum();
            acc += v[i].conj() * row;
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn distance(&self, other: &ComplexMatrix) -> f64 {
        (self - other).frobenius_norm()
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in add");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sub");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn checked_power_dim(base: usize, t: usize) -> Result<usize, LinalgError> {
    if t == 0 {
        return Err(LinalgError::ZeroPower);
    }
    let mut dim = 1usize;
    for _ in 0..t {
        dim = dim.saturating_mul(base);
        if dim > MAX_DIM {
            return Err(LinalgError::TooLarge { dim });
        }
    }
    Ok(dim)
}

/// `M^⊗t` under the row-major Kronecker convention.
pub fn tensor_power(m: &ComplexMatrix, t: usize) -> Result<ComplexMatrix, LinalgError> {
    checked_power_dim(m.dim(), t)?;
    let mut out = m.clone();
    for _ in 1..t {
        out = out.kron(m);
    }
    Ok(out)
}

/// Applies the 2×2 `u` to tensor factor `site` (0 = most significant) of a
/// `t`-qubit operator, from the left.
fn apply_left_local(m: &mut ComplexMatrix, u: &ComplexMatrix, site: usize, t: usize) {
    let dim = m.dim;
    let stride = 1usize << (t - 1 - site);
    for row in 0..dim {
        if row & stride != 0 {
            continue;
        }
        let partner = row | stride;
        for col in 0..dim {
            let a = m.data[row * dim + col];
            let b = m.data[partner * dim + col];
            m.data[row * dim + col] = u.data[0] * a + u.data[1] * b;
            m.data[partner * dim + col] = u.data[2] * a + u.data[3] * b;
        }
    }
}

/// Multiplies a `t`-qubit operator by `u†` on tensor factor `site`, from the right.
fn apply_right_adjoint_local(m: &mut ComplexMatrix, u: &ComplexMatrix, site: usize, t: usize) {
    let dim = m.dim;
    let stride = 1usize << (t - 1 - site);
    // (M U†)[r][c] = Σ_k M[r][k] conj(U[c][k])
    let (u00, u01, u10, u11) = (u.data[0].conj(), u.data[1].conj(), u.data[2].conj(), u.data[3].conj());
    for r in 0..dim {
        let base = r * dim;
        for col in 0..dim {
            if col & stride != 0 {
                continue;
            }
            let partner = col | stride;
            let a = m.data[base + col];
            let b = m.data[base + partner];
            m.data[base + col] = a * u00 + b * u01;
            m.data[base + partner] = a * u10 + b * u11;
        }
    }
}

/// `U^⊗t · M · (U^⊗t)†` for a single-qubit `U`, applied factor by factor.
pub fn conjugate_tensor_power(
    m: &ComplexMatrix,
    u: &ComplexMatrix,
    t: usize,
) -> Result<ComplexMatrix, LinalgError> {
    if u.dim() != 2 {
        return Err(LinalgError::DimensionMismatch { expected: 2, found: u.dim() });
    }
    let dim = checked_power_dim(2, t)?;
    if m.dim() != dim {
        return Err(LinalgError::DimensionMismatch { expected: dim, found: m.dim() });
    }
    let mut out = m.clone();
    for site in 0..t {
        apply_left_local(&mut out, u, site, t);
        apply_right_adjoint_local(&mut out, u, site, t);
    }
    Ok(out)
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector for `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        (0..self.eigenvectors.dim()).map(|i| self.eigenvectors[(i, k)]).collect()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("spectrum is never empty")
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `V · diag(λ) · V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.dim();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| v[(i, k)] * v[(j, k)].conj() * self.eigenvalues[k]).sum()
        })
    }
}

/// Spectrum of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<Spectrum, LinalgError> {
    let deviation = m.hermiticity_error();
    if deviation > HERMITIAN_TOL {
        return Err(LinalgError::NotHermitian { deviation });
    }
    let sym = m.hermitian_part();
    let eig = SymmetricEigen::new(sym.to_nalgebra());
    let n = m.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(Spectrum { eigenvalues, eigenvectors })
}

/// Projector onto the span of eigenvectors with eigenvalue above
/// `rel_cutoff · λ_max`, together with its rank.
pub fn support_projector(
    m: &ComplexMatrix,
    rel_cutoff: f64,
) -> Result<(ComplexMatrix, usize), LinalgError> {
    let spectrum = hermitian_eig(m)?;
    let kept = support_indices(&spectrum, rel_cutoff);
    Ok((projector_onto(&spectrum.eigenvectors, &kept), kept.len()))
}

/// Indices of eigenvalues strictly above `rel_cutoff · λ_max`; empty when
/// `λ_max ≤ 0`.
pub(crate) fn support_indices(spectrum: &Spectrum, rel_cutoff: f64) -> Vec<usize> {
    let top = spectrum.max_eigenvalue();
    if top <= 0.0 {
        return Vec::new();
    }
    let floor = rel_cutoff * top;
    (0..spectrum.eigenvalues.len()).filter(|&k| spectrum.eigenvalues[k] > floor).collect()
}

pub(crate) fn projector_onto(vectors: &ComplexMatrix, columns: &[usize]) -> ComplexMatrix {
    let n = vectors.dim();
    ComplexMatrix::from_fn(n, |i, j| {
        columns.iter().map(|&k| vectors[(i, k)] * vectors[(j, k)].conj()).sum()
    })
}

/// Pauli matrices and other fixed single-qubit operators.
pub mod paulis {
    use super::{ComplexMatrix, C64};

    const O: C64 = C64::new(0.0, 0.0);
    const R: C64 = C64::new(1.0, 0.0);
    const J: C64 = C64::new(0.0, 1.0);

    pub fn i2() -> ComplexMatrix {
        ComplexMatrix::mat2(R, O, O, R)
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::mat2(O, R, R, O)
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::mat2(O, -J, J, O)
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::mat2(R, O, O, -R)
    }

    /// SWAP on two qubits.
    pub fn swap() -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(4);
        m[(0, 0)] = R;
        m[(1, 2)] = R;
        m[(2, 1)] = R;
        m[(3, 3)] = R;
        m
    }
}

#[cfg(test)]
mod tests {
    use super::paulis::*;
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(dim, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
        random_matrix(rng, dim).hermitian_part()
    }

    /// Gram-Schmidt on a random matrix.
    fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
        let m = random_matrix(rng, dim);
        let mut cols: Vec<Vec<C64>> = Vec::new();
        for j in 0..dim {
            let mut v: Vec<C64> = (0..dim).map(|i| m[(i, j)]).collect();
            for q in &cols {
                let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
        ComplexMatrix::from_fn(dim, |i, j| cols[j][i])
    }

    #[test]
    fn tensor_power_of_identity() {
        assert_eq!(tensor_power(&i2(), 3).unwrap(), ComplexMatrix::identity(8));
    }

    #[test]
    fn tensor_square_of_projector() {
        let p = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        let expected = ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(tensor_power(&p, 2).unwrap(), expected);
    }

    #[test]
    fn tensor_square_of_x_is_antidiagonal() {
        let xx = tensor_power(&x(), 2).unwrap();
        let expected = ComplexMatrix::from_fn(4, |i, j| if i + j == 3 { c(1.0) } else { c(0.0) });
        assert_eq!(xx, expected);
    }

    #[test]
    fn tensor_power_rejects_zero_and_oversize() {
        assert_eq!(tensor_power(&x(), 0), Err(LinalgError::ZeroPower));
        assert!(matches!(tensor_power(&x(), 13), Err(LinalgError::TooLarge { .. })));
        assert!(tensor_power(&x(), 12).is_ok());
    }

    #[test]
    fn kron_follows_row_major_convention() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_matrix(&mut rng, 2);
        let b = random_matrix(&mut rng, 3);
        let k = a.kron(&b);
        for i in 0..2 {
            for j in 0..2 {
                for p in 0..3 {
                    for q in 0..3 {
                        assert_eq!(k[(i * 3 + p, j * 3 + q)], a[(i, j)] * b[(p, q)]);
                    }
                }
            }
        }
    }

    #[test]
    fn conjugation_by_identity_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = random_matrix(&mut rng, 8);
        let out = conjugate_tensor_power(&m, &i2(), 3).unwrap();
        assert!(out.max_abs_diff(&m) < 1e-15);
    }

    #[test]
    fn bit_flip_of_basis_projector() {
        let p0 = ComplexMatrix::from_real_diagonal(&[1.0, 0.0]);
        let p1 = ComplexMatrix::from_real_diagonal(&[0.0, 1.0]);
        let out = conjugate_tensor_power(&tensor_power(&p0, 2).unwrap(), &x(), 2).unwrap();
        assert!(out.max_abs_diff(&tensor_power(&p1, 2).unwrap()) < 1e-15);
    }

    #[test]
    fn conjugation_matches_kronecker_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for t in 1..=5 {
            let rho = {
                let a = random_matrix(&mut rng, 2);
                let g = &a * &a.adjoint();
                g.scale(1.0 / g.trace().re)
            };
            let u = random_unitary(&mut rng, 2);
            let lhs = conjugate_tensor_power(&tensor_power(&rho, t).unwrap(), &u, t).unwrap();
            let rotated = &(&u * &rho) * &u.adjoint();
            let rhs = tensor_power(&rotated, t).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-13, "t = {t}");
            // Full Kronecker route on a generic operator.
            let m = random_matrix(&mut rng, 1 << t);
            let w = tensor_power(&u, t).unwrap();
            let direct = &(&w * &m) * &w.adjoint();
            let local = conjugate_tensor_power(&m, &u, t).unwrap();
            assert!(local.max_abs_diff(&direct) < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn conjugation_rejects_bad_dims() {
        let m = ComplexMatrix::identity(4);
        assert!(matches!(
            conjugate_tensor_power(&m, &i2(), 3),
            Err(LinalgError::DimensionMismatch { expected: 8, found: 4 })
        ));
        assert!(conjugate_tensor_power(&m, &ComplexMatrix::identity(4), 2).is_err());
    }

    #[test]
    fn eig_of_diagonal_and_pauli() {
        let s = hermitian_eig(&ComplexMatrix::from_real_diagonal(&[3.0, 1.0, 2.0])).unwrap();
        for (got, want) in s.eigenvalues.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        let s = hermitian_eig(&x()).unwrap();
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_reconstructs_planted_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v = random_unitary(&mut rng, 32);
        let lambda: Vec<f64> = (0..32).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let m = &(&v * &ComplexMatrix::from_real_diagonal(&lambda)) * &v.adjoint();
        let m = m.hermitian_part();
        let s = hermitian_eig(&m).unwrap();
        let residual = s.reconstruct().distance(&m);
        assert!(residual <= 1e-10 * m.frobenius_norm().max(1.0), "residual {residual:e}");
        let gram = &s.eigenvectors.adjoint() * &s.eigenvectors;
        assert!(gram.distance(&ComplexMatrix::identity(32)) <= 1e-10);
        let mut sorted = lambda.clone();
        sorted.sort_by(f64::total_cmp);
        for (a, b) in s.eigenvalues.iter().zip(&sorted) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn eig_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_hermitian(&mut rng, 16);
        let a = hermitian_eig(&m).unwrap();
        let b = hermitian_eig(&m).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.eigenvectors, b.eigenvectors);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::mat2(c(1.0), c(2.0), c(0.0), c(1.0));
        assert!(matches!(hermitian_eig(&m), Err(LinalgError::NotHermitian { .. })));
    }

    #[test]
    fn min_eigenvalue_matches_rayleigh_quotients() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for dim in [2usize, 4, 8] {
            let m = random_hermitian(&mut rng, dim);
            let lo = hermitian_eig(&m).unwrap().min_eigenvalue();
            let mut best = f64::INFINITY;
            for _ in 0..1000 {
                let v: Vec<C64> = (0..dim)
                    .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                best = best.min(m.quadratic_form(&v).re / norm2);
            }
            // Random vectors only bound the minimum from above.
            assert!(best >= lo - 1e-12);
            // Minimising over the eigenbasis hits it exactly.
            let s = hermitian_eig(&m).unwrap();
            let v0 = s.eigenvector(0);
            assert!((m.quadratic_form(&v0).re - lo).abs() < 1e-8);
        }
    }

    #[test]
    fn support_projector_full_rank_and_cutoff() {
        let (p, r) = support_projector(&ComplexMatrix::identity(4), 1e-10).unwrap();
        assert_eq!(r, 4);
        assert!(p.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-14);

        let m = ComplexMatrix::from_real_diagonal(&[1.0, 1e-16, 0.0, 0.0]);
        let (p, r) = support_projector(&m, 1e-10).unwrap();
        assert_eq!(r, 1);
        assert!(p.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0, 0.0])) < 1e-14);
    }

    #[test]
    fn support_projector_of_zero_is_empty() {
        let (p, r) = support_projector(&ComplexMatrix::zeros(4), 1e-10).unwrap();
        assert_eq!(r, 0);
        assert_eq!(p, ComplexMatrix::zeros(4));
    }

    #[test]
    fn support_projector_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_matrix(&mut rng, 8);
        // Rank-3 PSD matrix.
        let mut m = ComplexMatrix::zeros(8);
        for k in 0..3 {
            let v: Vec<C64> = (0..8).map(|i| a[(i, k)]).collect();
            m = &m + &ComplexMatrix::from_fn(8, |i, j| v[i] * v[j].conj());
        }
        let (p, r) = support_projector(&m, 1e-10).unwrap();
        assert_eq!(r, 3);
        assert!((&p * &p).distance(&p) < 1e-10);
        assert!(p.adjoint().distance(&p) < 1e-10);
    }

    #[test]
    fn swap_squares_to_identity() {
        assert_eq!(&swap() * &swap(), ComplexMatrix::identity(4));
    }

    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn tensor_power_is_multiplicative(seed in any::<u64>(), t in 1usize..=5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(&mut rng, 2);
            let b = random_matrix(&mut rng, 2);
            let lhs = &tensor_power(&a, t).unwrap() * &tensor_power(&b, t).unwrap();
            let rhs = tensor_power(&(&a * &b), t).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-10 * rhs.frobenius_norm().max(1.0));
        }

        #[test]
        fn conjugation_preserves_trace_and_hermiticity(seed in any::<u64>(), t in 1usize..=5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_hermitian(&mut rng, 1 << t);
            let u = random_unitary(&mut rng, 2);
            let out = conjugate_tensor_power(&m, &u, t).unwrap();
            prop_assert!((out.trace() - m.trace()).norm() <= 1e-12 * m.frobenius_norm().max(1.0));
            prop_assert!(out.hermiticity_error() <= 1e-12);
        }
    }
}
