//! Dense complex linear algebra used throughout the simulator.
//!
//! [`Operator`] is a square, row-major matrix of `Complex64`. Dimensions stay
//! small (at most a few thousand), so everything here is plain dense
//! arithmetic. Hermitian eigendecomposition is delegated to `nalgebra`; every
//! other routine is written out directly.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Numerical thresholds shared by the whole crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Bound on `||H - H^dagger||_F` accepted as Hermitian.
    pub hermiticity: f64,
    /// Bound on `||U^dagger U - I||_F` accepted as unitary.
    pub unitarity: f64,
    /// Looser unitarity bound used as a precondition on caller-supplied gates.
    pub unitarity_input: f64,
    /// Minimal phase-invariant fidelity for two gates to count as equal.
    pub fidelity: f64,
    /// Bound on `| ||psi|| - 1 |`.
    pub normalization: f64,
    /// Leakage above this means the evolution did not return to the logical subspace.
    pub leakage: f64,
    /// Smallest singular value accepted by the polar decomposition.
    pub rank: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermiticity: 1e-12,
        unitarity: 1e-10,
        unitarity_input: 1e-8,
        fidelity: 1.0 - 1e-9,
        normalization: 1e-12,
        leakage: 1e-8,
        rank: 1e-8,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    data: Vec<Complex64>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Operator {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op[(i, i)] = ONE;
        }
        op
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Operator { dim, data }
    }

    /// Builds an operator from row-major entries; `entries.len()` must be a square.
    pub fn from_row_major(entries: Vec<Complex64>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim * dim != entries.len() {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite("operator"));
        }
        Ok(Operator { dim, data: entries })
    }

    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self::from_fn(N, |r, c| Complex64::new(rows[r][c], 0.0))
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let mut op = Self::zeros(entries.len());
        for (i, &z) in entries.iter().enumerate() {
            op[(i, i)] = z;
        }
        op
    }

    /// `|ket><bra|`
    pub fn outer(ket: &[Complex64], bra: &[Complex64]) -> Result<Self> {
        if ket.len() != bra.len() {
            return Err(Error::DimensionMismatch {
                expected: ket.len(),
                actual: bra.len(),
            });
        }
        Ok(Self::from_fn(ket.len(), |r, c| ket[r] * bra[c].conj()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.dim).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)])
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Operator {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * z).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        let gram = self.adjoint().matmul(self);
        let (values, _) = hermitian_eigen(&gram);
        values.iter().cloned().fold(0.0, f64::max).max(0.0).sqrt()
    }

    pub fn matmul(&self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Operator { dim: n, data: out }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.dim, v.len(), "apply dimension mismatch");
        (0..self.dim)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Kronecker product `self ⊗ rhs`; `self` indexes the more significant factor.
    pub fn kron(&self, rhs: &Operator) -> Operator {
        let (m, n) = (self.dim, rhs.dim);
        let dim = m * n;
        let mut out = Operator::zeros(dim);
        for r1 in 0..m {
            for c1 in 0..m {
                let a = self[(r1, c1)];
                if a == ZERO {
                    continue;
                }
                for r2 in 0..n {
                    for c2 in 0..n {
                        out[(r1 * n + r2, c1 * n + c2)] = a * rhs[(r2, c2)];
                    }
                }
            }
        }
        out
    }

    pub fn commutator(&self, rhs: &Operator) -> Operator {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    /// Sub-matrix on the given index sets (same length), `out[a][b] = self[rows[a]][cols[b]]`.
    pub fn restrict(&self, indices: &[usize]) -> Operator {
        Self::from_fn(indices.len(), |a, b| self[(indices[a], indices[b])])
    }

    /// `||H - H^dagger||_F`
    pub fn hermiticity_defect(&self) -> f64 {
        let mut acc = 0.0;
        for r in 0..self.dim {
            for c in 0..self.dim {
                acc += (self[(r, c)] - self[(c, r)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `||U^dagger U - I||_F`
    pub fn unitarity_defect(&self) -> f64 {
        (&self.adjoint().matmul(self) - &Operator::identity(self.dim)).frobenius_norm()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Determinant by partial-pivot LU.
    pub fn determinant(&self) -> Complex64 {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut det = ONE;
        for k in 0..n {
            let pivot = (k..n)
                .max_by(|&i, &j| a[i * n + k].norm().total_cmp(&a[j * n + k].norm()))
                .unwrap_or(k);
            if a[pivot * n + k] == ZERO {
                return ZERO;
            }
            if pivot != k {
                for c in 0..n {
                    a.swap(k * n + c, pivot * n + c);
                }
                det = -det;
            }
            let p = a[k * n + k];
            det *= p;
            for i in k + 1..n {
                let f = a[i * n + k] / p;
                for c in k..n {
                    let v = a[k * n + c];
                    a[i * n + c] -= f * v;
                }
            }
        }
        det
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.dim, self.dim, |r, c| self[(r, c)])
    }
}

impl Index<(usize, usize)> for Operator {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for Operator {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.dim + c]
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim);
        Operator {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim);
        Operator {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.matmul(rhs)
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = self
                .row(r)
                .iter()
                .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Serialized as a list of rows, each entry an `[re, im]` pair.
impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.dim))?;
        for r in 0..self.dim {
            let row: Vec<[f64; 2]> = self.row(r).iter().map(|z| [z.re, z.im]).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

/// Normalized complex amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized within the default tolerance.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                actual: 0,
            });
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite("state vector"));
        }
        let norm = norm2(&amplitudes);
        if (norm - 1.0).abs() > Tolerances::DEFAULT.normalization {
            return Err(Error::NotNormalized { norm });
        }
        Ok(StateVector { amplitudes })
    }

    /// Rescales to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = norm2(&amplitudes);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized { norm });
        }
        Ok(StateVector {
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        StateVector { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.amplitudes)
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn evolve(&self, u: &Operator) -> Result<StateVector> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: u.dim(),
            });
        }
        StateVector::new(u.apply(&self.amplitudes))
    }
}

pub fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a|b>`
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Eigenvalues (ascending) and eigenvectors (as columns) of the Hermitian part of `h`.
pub fn hermitian_eigen(h: &Operator) -> (Vec<f64>, Operator) {
    let m = h.to_nalgebra();
    let sym = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..h.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Operator::from_fn(h.dim(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// `V diag(f(lambda)) V^dagger`
pub(crate) fn spectral_map(
    values: &[f64],
    vectors: &Operator,
    f: impl Fn(f64) -> Complex64,
) -> Operator {
    let n = vectors.dim();
    let weights: Vec<Complex64> = values.iter().map(|&l| f(l)).collect();
    let mut out = Operator::zeros(n);
    for r in 0..n {
        for c in 0..n {
            let mut acc = ZERO;
            for k in 0..n {
                acc += vectors[(r, k)] * weights[k] * vectors[(c, k)].conj();
            }
            out[(r, c)] = acc;
        }
    }
    out
}

/// `exp(-i t H)` for Hermitian `H`, via eigendecomposition.
pub fn expm_hermitian(h: &Operator, t: f64) -> Result<Operator> {
    if !h.is_finite() || !t.is_finite() {
        return Err(Error::NonFinite("Hamiltonian"));
    }
    let defect = h.hermiticity_defect();
    if defect > Tolerances::DEFAULT.hermiticity {
        return Err(Error::NotHermitian { defect });
    }
    if t == 0.0 {
        return Ok(Operator::identity(h.dim()));
    }
    let (values, vectors) = hermitian_eigen(h);
    Ok(spectral_map(&values, &vectors, |l| {
        Complex64::from_polar(1.0, -t * l)
    }))
}

/// Unitary factor `W` of the polar decomposition `M = W P`.
///
/// Computed as `M (M^dagger M)^{-1/2}`.
pub fn polar_unitary(m: &Operator) -> Result<Operator> {
    if !m.is_finite() {
        return Err(Error::NonFinite("operator"));
    }
    let gram = m.adjoint().matmul(m);
    let (values, vectors) = hermitian_eigen(&gram);
    let smallest = values.first().copied().unwrap_or(0.0).max(0.0).sqrt();
    if smallest <= Tolerances::DEFAULT.rank {
        return Err(Error::RankDeficient { smallest });
    }
    let inv_sqrt = spectral_map(&values, &vectors, |l| Complex64::new(l.sqrt().recip(), 0.0));
    Ok(m.matmul(&inv_sqrt))
}

/// Phase-invariant gate fidelity `|Tr(U^dagger V)| / dim`.
pub fn gate_fidelity(u: &Operator, v: &Operator) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            actual: v.dim(),
        });
    }
    let tol = Tolerances::DEFAULT.unitarity_input;
    for op in [u, v] {
        let defect = op.unitarity_defect();
        if defect > tol {
            return Err(Error::NotUnitary { defect });
        }
    }
    Ok(trace_overlap(u, v).min(1.0))
}

/// `|Tr(U^dagger V)| / dim` without unitarity checks.
pub(crate) fn trace_overlap(u: &Operator, v: &Operator) -> f64 {
    let tr: Complex64 = u
        .as_slice()
        .iter()
        .zip(v.as_slice())
        .map(|(a, b)| a.conj() * b)
        .sum();
    tr.norm() / u.dim() as f64
}
