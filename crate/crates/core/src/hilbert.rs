//! Dense complex linear algebra on finite-dimensional Hilbert spaces.
//!
//! Bipartite operators use the Kronecker convention with the
//! chronology-respecting (CR) factor as the major index and the
//! chronology-violating (CV) factor as the minor index:
//! `|i⟩_CR ⊗ |j⟩_CV` lives at `i * dim_cv + j`.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{modulus, real, Real};

pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

/// Largest number of matrix entries a tensor product may produce.
pub const MAX_MATRIX_ENTRIES: usize = 1 << 20;

/// Subsystem of a CR ⊗ CV bipartite space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Cr,
    Cv,
}

/// Factor dimensions of a CR ⊗ CV bipartite space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    pub cr: usize,
    pub cv: usize,
}

impl Dims {
    pub fn new(cr: usize, cv: usize) -> Self {
        Self { cr, cv }
    }

    pub fn square(d: usize) -> Self {
        Self { cr: d, cv: d }
    }

    pub fn total(&self) -> usize {
        self.cr * self.cv
    }
}

fn check_entries(rows: usize, cols: usize, cap: usize) -> Result<()> {
    let entries = rows
        .checked_mul(cols)
        .ok_or(Error::DimensionOverflow { entries: usize::MAX, cap })?;
    if entries > cap {
        return Err(Error::DimensionOverflow { entries, cap });
    }
    Ok(())
}

fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| {
        let a = modulus(*z);
        if a > acc {
            a
        } else {
            acc
        }
    })
}

/// A general (not necessarily square or unitary) linear map.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator<T: Real> {
    matrix: CMatrix<T>,
}

impl<T: Real> Operator<T> {
    pub fn new(matrix: CMatrix<T>) -> Self {
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(CMatrix::identity(dim, dim))
    }

    pub fn zeros(dim_out: usize, dim_in: usize) -> Self {
        Self::new(CMatrix::zeros(dim_out, dim_in))
    }

    pub fn from_diagonal(entries: &[Complex<T>]) -> Self {
        Self::new(CMatrix::from_diagonal(&CVector::from_column_slice(entries)))
    }

    /// `|ket⟩⟨bra|`.
    pub fn outer(ket: &StateVector<T>, bra: &StateVector<T>) -> Self {
        Self::new(&ket.amplitudes * bra.amplitudes.adjoint())
    }

    pub fn dim_in(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn dim_out(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.matrix.adjoint())
    }

    pub fn trace(&self) -> Complex<T> {
        self.matrix.trace()
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self::new(&self.matrix * factor)
    }

    /// `self · rhs`.
    pub fn compose(&self, rhs: &Operator<T>) -> Result<Self> {
        if self.dim_in() != rhs.dim_out() {
            return Err(Error::DimensionMismatch {
                context: "operator product",
                expected: self.dim_in(),
                found: rhs.dim_out(),
            });
        }
        Ok(Self::new(&self.matrix * &rhs.matrix))
    }

    pub fn apply(&self, psi: &StateVector<T>) -> Result<StateVector<T>> {
        if self.dim_in() != psi.dim() {
            return Err(Error::DimensionMismatch {
                context: "operator action",
                expected: self.dim_in(),
                found: psi.dim(),
            });
        }
        Ok(StateVector::new(&self.matrix * &psi.amplitudes))
    }

    pub fn tensor(&self, other: &Operator<T>) -> Result<Self> {
        self.tensor_with_cap(other, MAX_MATRIX_ENTRIES)
    }

    pub fn tensor_with_cap(&self, other: &Operator<T>, cap: usize) -> Result<Self> {
        let rows = self.dim_out().saturating_mul(other.dim_out());
        let cols = self.dim_in().saturating_mul(other.dim_in());
        check_entries(rows, cols, cap)?;
        Ok(Self::new(self.matrix.kronecker(&other.matrix)))
    }

    /// Largest entry modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Operator<T>) -> T {
        max_abs(&(&self.matrix - &other.matrix))
    }

    pub fn max_abs_entry(&self) -> T {
        max_abs(&self.matrix)
    }

    /// `max |(U†U − 1)_ij|`.
    pub fn unitarity_defect(&self) -> T {
        if self.dim_in() != self.dim_out() {
            return T::lit(f64::INFINITY);
        }
        let gram = self.matrix.adjoint() * &self.matrix;
        max_abs(&(gram - CMatrix::identity(self.dim_in(), self.dim_in())))
    }

    /// `max |(UU† − 1)_ij|`.
    pub fn co_unitarity_defect(&self) -> T {
        if self.dim_in() != self.dim_out() {
            return T::lit(f64::INFINITY);
        }
        let gram = &self.matrix * self.matrix.adjoint();
        max_abs(&(gram - CMatrix::identity(self.dim_in(), self.dim_in())))
    }
}

/// An operator known to satisfy `U†U = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary<T: Real>(Operator<T>);

impl<T: Real> Unitary<T> {
    /// Default unitarity tolerance for checked construction.
    pub const TOLERANCE: f64 = 1e-10;

    pub fn try_new(op: Operator<T>) -> Result<Self> {
        Self::try_new_with_tol(op, T::tol(Self::TOLERANCE))
    }

    pub fn try_new_with_tol(op: Operator<T>, tol: T) -> Result<Self> {
        let deviation = op.unitarity_defect();
        if !(deviation <= tol) {
            return Err(Error::NotUnitary { deviation: deviation.as_f64() });
        }
        Ok(Self(op))
    }

    /// Wraps an operator that is unitary by construction.
    pub(crate) fn new_unchecked(op: Operator<T>) -> Self {
        Self(op)
    }

    pub fn identity(dim: usize) -> Self {
        Self(Operator::identity(dim))
    }

    pub fn as_operator(&self) -> &Operator<T> {
        &self.0
    }

    pub fn into_operator(self) -> Operator<T> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn compose(&self, rhs: &Unitary<T>) -> Result<Self> {
        Ok(Self(self.0.compose(&rhs.0)?))
    }

    pub fn tensor(&self, other: &Unitary<T>) -> Result<Self> {
        Ok(Self(self.0.tensor(&other.0)?))
    }
}

impl<T: Real> std::ops::Deref for Unitary<T> {
    type Target = Operator<T>;

    fn deref(&self) -> &Operator<T> {
        &self.0
    }
}

/// A ket.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    amplitudes: CVector<T>,
}

impl<T: Real> StateVector<T> {
    /// Normalization tolerance for states that must be unit vectors.
    pub const NORM_TOLERANCE: f64 = 1e-9;

    pub fn new(amplitudes: CVector<T>) -> Self {
        Self { amplitudes }
    }

    pub fn from_slice(amplitudes: &[Complex<T>]) -> Self {
        Self::new(CVector::from_column_slice(amplitudes))
    }

    pub fn from_real(amplitudes: &[f64]) -> Self {
        Self::new(CVector::from_iterator(
            amplitudes.len(),
            amplitudes.iter().map(|&a| real(T::lit(a))),
        ))
    }

    /// `|index⟩` in a space of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = CVector::zeros(dim);
        amplitudes[index] = Complex::new(T::one(), T::zero());
        Self::new(amplitudes)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector<T> {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex<T> {
        self.amplitudes[index]
    }

    pub fn norm_squared(&self) -> T {
        self.amplitudes.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - T::one()).abs() <= T::tol(Self::NORM_TOLERANCE)
    }

    pub fn ensure_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized { norm: self.norm().as_f64() })
        }
    }

    /// Unit vector along `self`; fails on the zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == T::zero() {
            return Err(Error::NotNormalized { norm: 0.0 });
        }
        Ok(Self::new(&self.amplitudes / real(norm)))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector<T>) -> Result<Complex<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                context: "inner product",
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self::new(&self.amplitudes * factor)
    }

    pub fn add(&self, other: &StateVector<T>) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                context: "state sum",
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self::new(&self.amplitudes + &other.amplitudes))
    }

    pub fn tensor(&self, other: &StateVector<T>) -> Result<Self> {
        self.tensor_with_cap(other, MAX_MATRIX_ENTRIES)
    }

    pub fn tensor_with_cap(&self, other: &StateVector<T>, cap: usize) -> Result<Self> {
        check_entries(self.dim().saturating_mul(other.dim()), 1, cap)?;
        Ok(Self::new(self.amplitudes.kronecker(&other.amplitudes)))
    }

    /// Multiplies by the global phase that makes the first non-negligible
    /// amplitude real and positive.
    pub fn canonical_phase(&self) -> Self {
        let threshold = self.norm() * T::tol(1e-12);
        match self.amplitudes.iter().find(|z| modulus(**z) > threshold) {
            Some(&lead) => {
                let m = modulus(lead);
                self.scale(Complex::new(lead.re / m, -lead.im / m))
            }
            None => self.clone(),
        }
    }

    /// `|self⟩⟨self|` for a normalized ket.
    pub fn projector(&self) -> Result<DensityOperator<T>> {
        self.ensure_normalized()?;
        Ok(DensityOperator::from_matrix_unchecked(
            &self.amplitudes * self.amplitudes.adjoint(),
        ))
    }
}

/// A Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator<T: Real> {
    matrix: CMatrix<T>,
}

impl<T: Real> DensityOperator<T> {
    pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
    pub const TRACE_TOLERANCE: f64 = 1e-12;
    pub const EIGENVALUE_FLOOR: f64 = -1e-10;

    /// Validates and wraps a matrix.
    pub fn try_new(matrix: CMatrix<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                context: "density matrix",
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let skew = max_abs(&(&matrix - matrix.adjoint()));
        if skew > T::tol(Self::HERMITIAN_TOLERANCE) {
            return Err(Error::InvalidDensity {
                reason: "not Hermitian",
                deviation: skew.as_f64(),
            });
        }
        let trace = matrix.trace();
        let trace_err = modulus(trace - real(T::one()));
        if trace_err > T::tol(Self::TRACE_TOLERANCE) {
            return Err(Error::InvalidDensity {
                reason: "trace differs from one",
                deviation: trace_err.as_f64(),
            });
        }
        let hermitian = (&matrix + matrix.adjoint()) * real(T::lit(0.5));
        let lowest = hermitian
            .symmetric_eigenvalues()
            .iter()
            .fold(T::lit(f64::INFINITY), |acc, &v| if v < acc { v } else { acc });
        if lowest < T::lit(Self::EIGENVALUE_FLOOR) {
            return Err(Error::InvalidDensity {
                reason: "negative eigenvalue",
                deviation: lowest.as_f64(),
            });
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix<T>) -> Self {
        Self { matrix }
    }

    pub fn from_pure(psi: &StateVector<T>) -> Result<Self> {
        psi.projector()
    }

    /// Diagonal density with the given populations, which must be
    /// non-negative and sum to one.
    pub fn diagonal(weights: &[T]) -> Result<Self> {
        if let Some(&w) = weights.iter().find(|w| **w < T::zero()) {
            return Err(Error::InvalidDensity {
                reason: "negative population",
                deviation: w.as_f64(),
            });
        }
        let diag: Vec<Complex<T>> = weights.iter().map(|&w| real(w)).collect();
        Self::try_new(CMatrix::from_diagonal(&CVector::from_vec(diag)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let w = real(T::one() / T::lit(dim as f64));
        Self { matrix: CMatrix::identity(dim, dim) * w }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn to_operator(&self) -> Operator<T> {
        Operator::new(self.matrix.clone())
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.matrix[(row, col)]
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    /// `⟨index|ρ|index⟩`.
    pub fn population(&self, index: usize) -> T {
        self.matrix[(index, index)].re
    }

    pub fn populations(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.population(i)).collect()
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, psi: &StateVector<T>) -> Result<T> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "expectation value",
                expected: self.dim(),
                found: psi.dim(),
            });
        }
        Ok(psi.amplitudes.dotc(&(&self.matrix * &psi.amplitudes)).re)
    }

    /// Convex combination `weight·self + (1 − weight)·other`.
    pub fn mix(&self, other: &DensityOperator<T>, weight: T) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                context: "density mixture",
                expected: self.dim(),
                found: other.dim(),
            });
        }
        if weight < T::zero() || weight > T::one() {
            return Err(Error::InvalidParameter {
                name: "weight",
                value: weight.as_f64(),
                reason: "must lie in [0, 1]",
            });
        }
        Ok(Self {
            matrix: &self.matrix * real(weight) + &other.matrix * real(T::one() - weight),
        })
    }

    pub fn tensor(&self, other: &DensityOperator<T>) -> Result<Self> {
        check_entries(
            self.dim().saturating_mul(other.dim()),
            self.dim().saturating_mul(other.dim()),
            MAX_MATRIX_ENTRIES,
        )?;
        Ok(Self { matrix: self.matrix.kronecker(&other.matrix) })
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &Unitary<T>) -> Result<Self> {
        if u.dim_in() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "unitary conjugation",
                expected: u.dim_in(),
                found: self.dim(),
            });
        }
        Ok(Self { matrix: u.matrix() * &self.matrix * u.matrix().adjoint() })
    }

    pub fn max_abs_diff(&self, other: &DensityOperator<T>) -> T {
        max_abs(&(&self.matrix - &other.matrix))
    }
}

/// Traces out the slot not named by `keep`.
pub fn partial_trace<T: Real>(op: &Operator<T>, keep: Slot, dims: Dims) -> Result<Operator<T>> {
    Ok(Operator::new(partial_trace_matrix(op.matrix(), keep, dims)?))
}

/// [`partial_trace`] on a density operator; the result is again a density.
pub fn partial_trace_density<T: Real>(
    rho: &DensityOperator<T>,
    keep: Slot,
    dims: Dims,
) -> Result<DensityOperator<T>> {
    Ok(DensityOperator::from_matrix_unchecked(partial_trace_matrix(
        rho.matrix(),
        keep,
        dims,
    )?))
}

pub(crate) fn partial_trace_matrix<T: Real>(
    m: &CMatrix<T>,
    keep: Slot,
    dims: Dims,
) -> Result<CMatrix<T>> {
    let total = dims.total();
    if m.nrows() != total || m.ncols() != total {
        return Err(Error::DimensionMismatch {
            context: "partial trace",
            expected: total,
            found: if m.nrows() != total { m.nrows() } else { m.ncols() },
        });
    }
    let Dims { cr, cv } = dims;
    let out = match keep {
        Slot::Cr => CMatrix::from_fn(cr, cr, |a, b| {
            (0..cv).fold(Complex::new(T::zero(), T::zero()), |acc, j| {
                acc + m[(a * cv + j, b * cv + j)]
            })
        }),
        Slot::Cv => CMatrix::from_fn(cv, cv, |a, b| {
            (0..cr).fold(Complex::new(T::zero(), T::zero()), |acc, i| {
                acc + m[(i * cv + a, i * cv + b)]
            })
        }),
    };
    Ok(out)
}

/// `½ ‖a − b‖₁`, half the sum of singular values of the difference.
pub fn trace_distance<T: Real>(a: &DensityOperator<T>, b: &DensityOperator<T>) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            context: "trace distance",
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(trace_norm(&(a.matrix() - b.matrix())) * T::lit(0.5))
}

pub(crate) fn trace_norm<T: Real>(m: &CMatrix<T>) -> T {
    m.singular_values().iter().fold(T::zero(), |acc, &s| acc + s)
}

/// `|⟨a|b⟩|²` for normalized kets.
pub fn fidelity_pure<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> Result<T> {
    a.ensure_normalized()?;
    b.ensure_normalized()?;
    Ok(a.inner(b)?.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn sample_matrix(d: usize, seed: f64) -> CMatrix<f64> {
        CMatrix::from_fn(d, d, |i, j| {
            let x = seed + 1.3 * i as f64 + 0.7 * j as f64;
            c(x.sin(), (2.0 * x).cos())
        })
    }

    #[test]
    fn identity_tensor_identity() {
        let id3 = Operator::<f64>::identity(3);
        let id9 = id3.tensor(&id3).unwrap();
        assert_eq!(id9, Operator::identity(9));
    }

    #[test]
    fn basis_tensor_bookkeeping() {
        let v = StateVector::<f64>::basis(2, 0)
            .tensor(&StateVector::basis(2, 1))
            .unwrap();
        assert_eq!(v, StateVector::basis(4, 1));
    }

    #[test]
    fn tensor_trace_factorizes() {
        let a = Operator::new(sample_matrix(3, 0.1));
        let b = Operator::new(sample_matrix(3, 2.9));
        let ab = a.tensor(&b).unwrap();
        // oracle: explicit double sum of diagonal products
        let mut expected = c(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                expected += a.entry(i, i) * b.entry(j, j);
            }
        }
        assert!(modulus(ab.trace() - expected) < 1e-13);
    }

    #[test]
    fn tensor_respects_cap() {
        let a = Operator::<f64>::identity(33);
        let err = a.tensor(&a).unwrap_err();
        assert!(matches!(err, Error::DimensionOverflow { .. }));
        let small = Operator::<f64>::identity(4);
        assert!(small.tensor_with_cap(&small, 255).is_err());
        assert!(small.tensor_with_cap(&small, 256).is_ok());
    }

    #[test]
    fn partial_trace_of_product() {
        let a = Operator::new(sample_matrix(3, 0.4));
        let b = Operator::new(sample_matrix(2, 1.7));
        let ab = a.tensor(&b).unwrap();
        let dims = Dims::new(3, 2);
        let keep_cr = partial_trace(&ab, Slot::Cr, dims).unwrap();
        let keep_cv = partial_trace(&ab, Slot::Cv, dims).unwrap();
        assert!(keep_cr.max_abs_diff(&a.scale(b.trace())) < 1e-13);
        assert!(keep_cv.max_abs_diff(&b.scale(a.trace())) < 1e-13);
        assert!(modulus(keep_cr.trace() - ab.trace()) < 1e-13);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let a = Operator::<f64>::identity(6);
        assert!(matches!(
            partial_trace(&a, Slot::Cr, Dims::new(2, 2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn trace_distance_basics() {
        let zero = StateVector::<f64>::basis(2, 0).projector().unwrap();
        let one = StateVector::<f64>::basis(2, 1).projector().unwrap();
        assert!(trace_distance(&zero, &zero).unwrap().abs() < 1e-15);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-14);
        let three = DensityOperator::<f64>::maximally_mixed(3);
        assert!(trace_distance(&zero, &three).is_err());
    }

    #[test]
    fn fidelity_is_phase_blind() {
        let psi = StateVector::<f64>::from_slice(&[c(0.6, 0.0), c(0.0, 0.8)]);
        let rotated = psi.scale(crate::scalar::cis(std::f64::consts::PI / 3.0));
        assert!((fidelity_pure(&psi, &rotated).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn fidelity_rejects_unnormalized() {
        let psi = StateVector::<f64>::from_real(&[1.0, 1.0]);
        let phi = StateVector::<f64>::basis(2, 0);
        assert!(matches!(fidelity_pure(&psi, &phi), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn density_validation() {
        assert!(DensityOperator::<f64>::diagonal(&[0.5, 0.5]).is_ok());
        assert!(DensityOperator::<f64>::diagonal(&[0.5, 0.6]).is_err());
        assert!(DensityOperator::<f64>::diagonal(&[1.5, -0.5]).is_err());
        let skew = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        assert!(matches!(
            DensityOperator::try_new(skew),
            Err(Error::InvalidDensity { reason: "not Hermitian", .. })
        ));
        let indefinite =
            CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.9, 0.0), c(0.9, 0.0), c(0.5, 0.0)]);
        assert!(matches!(
            DensityOperator::try_new(indefinite),
            Err(Error::InvalidDensity { reason: "negative eigenvalue", .. })
        ));
    }

    #[test]
    fn canonical_phase_makes_lead_positive() {
        let psi = StateVector::<f64>::from_slice(&[c(0.0, 0.0), c(0.0, -0.6), c(0.8, 0.0)]);
        let fixed = psi.canonical_phase();
        assert!(fixed.amplitude(1).im.abs() < 1e-15);
        assert!((fixed.amplitude(1).re - 0.6).abs() < 1e-15);
        assert!((fixed.amplitude(2).im - 0.8).abs() < 1e-15);
    }

    #[test]
    fn works_in_single_precision() {
        let a = Operator::<f32>::identity(2);
        let b = a.tensor(&a).unwrap();
        let pt = partial_trace(&b, Slot::Cr, Dims::square(2)).unwrap();
        assert!(pt.max_abs_diff(&a.scale(Complex::new(2.0, 0.0))) < 1e-6);
        let zero = StateVector::<f32>::basis(2, 0).projector().unwrap();
        let mixed = DensityOperator::<f32>::maximally_mixed(2);
        assert!((trace_distance(&zero, &mixed).unwrap() - 0.5).abs() < 1e-6);
    }
}
