//! Dense complex matrices and the decompositions built on them.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use faer::Mat;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense complex matrix with finite entries.
///
/// Storage is delegated to `nalgebra`; the logical layout exposed through
/// [`ComplexMatrix::new`], [`ComplexMatrix::to_row_major`] and JSON is
/// row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self.get(i, j);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(Self {
            inner: DMatrix::from_row_slice(rows, cols, &entries),
        })
    }

    /// Builds a real matrix from row-major entries. Panics on a length mismatch.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        Self::from_fn(rows, cols, |i, j| C64::new(entries[i * cols + j], 0.0))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self {
            inner: DMatrix::from_fn(rows, cols, f),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            inner: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: DMatrix::identity(n, n),
        }
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { ZERO })
    }

    pub fn real_diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    /// The matrix unit with a single 1 at `(row, col)`.
    pub fn unit(rows: usize, cols: usize, row: usize, col: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m.inner[(row, col)] = ONE;
        m
    }

    pub fn from_dmatrix(inner: DMatrix<C64>) -> Self {
        Self { inner }
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.inner
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.inner
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.inner[(row, col)]
    }

    pub fn is_finite(&self) -> bool {
        self.inner
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn to_row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }

    fn check_same_shape(&self, other: &Self, op: &str) -> Result<()> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return Err(Error::DimensionMismatch(format!(
                "{op}: {}x{} vs {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "add")?;
        Ok(Self::from_dmatrix(&self.inner + &other.inner))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "sub")?;
        Ok(Self::from_dmatrix(&self.inner - &other.inner))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::DimensionMismatch(format!(
                "mul: {}x{} times {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(Self::from_dmatrix(&self.inner * &other.inner))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_dmatrix(&self.inner * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_dmatrix(self.inner.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self::from_dmatrix(self.inner.transpose())
    }

    pub fn conjugate(&self) -> Self {
        Self::from_dmatrix(self.inner.map(|z| z.conj()))
    }

    pub fn trace(&self) -> C64 {
        self.inner.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        if self.rows() == 0 || self.cols() == 0 {
            return 0.0;
        }
        if self.rows() == 1 || self.cols() == 1 {
            return self.frobenius_norm();
        }
        match self.to_faer().singular_values() {
            Ok(values) => values.iter().copied().fold(0.0, f64::max),
            // fall back to the Gram matrix
            Err(_) => {
                let gram = ComplexMatrix::from_dmatrix(self.inner.adjoint() * &self.inner);
                gram.to_faer()
                    .self_adjoint_eigenvalues(faer::Side::Lower)
                    .map_or(f64::NAN, |ev| {
                        ev.iter().copied().fold(0.0, f64::max).max(0.0).sqrt()
                    })
            }
        }
    }

    fn to_faer(&self) -> Mat<C64> {
        Mat::from_fn(self.rows(), self.cols(), |i, j| self.inner[(i, j)])
    }

    /// Copies the `nrows x ncols` sub-block starting at `(row, col)`.
    pub fn block(&self, row: usize, col: usize, nrows: usize, ncols: usize) -> Self {
        Self::from_dmatrix(self.inner.view((row, col), (nrows, ncols)).into_owned())
    }

    /// Assembles a matrix from a rectangular grid of blocks.
    pub fn from_blocks(grid: &[Vec<ComplexMatrix>]) -> Result<Self> {
        let nr = grid.len();
        if nr == 0 || grid[0].is_empty() {
            return Err(Error::InvalidInput("empty block grid".into()));
        }
        let nc = grid[0].len();
        if grid.iter().any(|row| row.len() != nc) {
            return Err(Error::InvalidInput("ragged block grid".into()));
        }
        let row_heights: Vec<usize> = grid.iter().map(|row| row[0].rows()).collect();
        let col_widths: Vec<usize> = grid[0].iter().map(|m| m.cols()).collect();
        for (p, row) in grid.iter().enumerate() {
            for (q, m) in row.iter().enumerate() {
                if m.rows() != row_heights[p] || m.cols() != col_widths[q] {
                    return Err(Error::DimensionMismatch(format!(
                        "block ({p},{q}) is {}x{}, expected {}x{}",
                        m.rows(),
                        m.cols(),
                        row_heights[p],
                        col_widths[q]
                    )));
                }
            }
        }
        let total_r: usize = row_heights.iter().sum();
        let total_c: usize = col_widths.iter().sum();
        let mut out = DMatrix::zeros(total_r, total_c);
        let mut r0 = 0;
        for (p, row) in grid.iter().enumerate() {
            let mut c0 = 0;
            for (q, m) in row.iter().enumerate() {
                out.view_mut((r0, c0), (row_heights[p], col_widths[q]))
                    .copy_from(&m.inner);
                c0 += col_widths[q];
            }
            r0 += row_heights[p];
        }
        Ok(Self::from_dmatrix(out))
    }

    /// Block-diagonal matrix with the given square or rectangular blocks.
    pub fn block_diagonal(blocks: &[ComplexMatrix]) -> Self {
        let total_r: usize = blocks.iter().map(|b| b.rows()).sum();
        let total_c: usize = blocks.iter().map(|b| b.cols()).sum();
        let mut out = DMatrix::zeros(total_r, total_c);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            out.view_mut((r0, c0), (b.rows(), b.cols()))
                .copy_from(&b.inner);
            r0 += b.rows();
            c0 += b.cols();
        }
        Self::from_dmatrix(out)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self::from_dmatrix(self.inner.kronecker(&other.inner))
    }

    pub fn svd(&self) -> Result<SvdResult> {
        svd(self)
    }

    pub fn hermitian_eigen(&self) -> Result<HermitianEigen> {
        hermitian_eigen(self)
    }

    /// `‖self - self*‖`.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (self - &self.adjoint()).operator_norm()
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    /// Panics on a shape mismatch; use [`ComplexMatrix::checked_add`] otherwise.
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_dmatrix(&self.inner + &rhs.inner)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_dmatrix(&self.inner - &rhs.inner)
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_dmatrix(&self.inner * &rhs.inner)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix::from_dmatrix(-&self.inner)
    }
}

/// Thin singular value decomposition `a = U diag(σ) V*`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// `rows x r` with orthonormal columns.
    pub left_vectors: ComplexMatrix,
    /// Nonincreasing, nonnegative, length `r = min(rows, cols)`.
    pub singular_values: Vec<f64>,
    /// `cols x r` with orthonormal columns.
    pub right_vectors: ComplexMatrix,
}

impl SvdResult {
    pub fn max_singular_value(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Rebuilds `U diag(f(σ)) V*`.
    pub fn recompose_with(&self, mut f: impl FnMut(f64) -> C64) -> ComplexMatrix {
        let u = self.left_vectors.as_dmatrix();
        let v = self.right_vectors.as_dmatrix();
        let mut scaled = u.clone();
        for (k, &s) in self.singular_values.iter().enumerate() {
            let w = f(s);
            for i in 0..scaled.nrows() {
                scaled[(i, k)] *= w;
            }
        }
        ComplexMatrix::from_dmatrix(scaled * v.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.recompose_with(|s| C64::new(s, 0.0))
    }
}

/// Singular value decomposition with singular values sorted nonincreasing.
pub fn svd(a: &ComplexMatrix) -> Result<SvdResult> {
    if !a.is_finite() {
        return Err(Error::InvalidInput(
            "SVD input has non-finite entries".into(),
        ));
    }
    let (m, n) = (a.rows(), a.cols());
    let r = m.min(n);
    if r == 0 {
        return Ok(SvdResult {
            left_vectors: ComplexMatrix::zeros(m, 0),
            singular_values: Vec::new(),
            right_vectors: ComplexMatrix::zeros(n, 0),
        });
    }
    let decomposition = a
        .to_faer()
        .thin_svd()
        .map_err(|e| Error::NoConvergence(format!("SVD did not converge: {e:?}")))?;
    let (u, v, sigma_diag) = (decomposition.U(), decomposition.V(), decomposition.S());
    let sigma: Vec<f64> = (0..r).map(|k| sigma_diag[k].re).collect();

    let mut order: Vec<usize> = (0..r).collect();
    // stable sort keeps the result deterministic on ties
    order.sort_by(|&x, &y| {
        sigma[y]
            .partial_cmp(&sigma[x])
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let left = DMatrix::from_fn(m, r, |i, k| u[(i, order[k])]);
    let right = DMatrix::from_fn(n, r, |j, k| v[(j, order[k])]);
    let values = order.iter().map(|&k| sigma[k].max(0.0)).collect();
    Ok(SvdResult {
        left_vectors: ComplexMatrix::from_dmatrix(left),
        singular_values: values,
        right_vectors: ComplexMatrix::from_dmatrix(right),
    })
}

/// Eigendecomposition `a = W diag(λ) W*` of a Hermitian matrix, eigenvalues
/// in nondecreasing order.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn recompose_with(&self, mut f: impl FnMut(f64) -> C64) -> ComplexMatrix {
        let w = self.eigenvectors.as_dmatrix();
        let mut scaled = w.clone();
        for (k, &l) in self.eigenvalues.iter().enumerate() {
            let s = f(l);
            for i in 0..scaled.nrows() {
                scaled[(i, k)] *= s;
            }
        }
        ComplexMatrix::from_dmatrix(scaled * w.adjoint())
    }
}

/// Eigendecomposition of the Hermitian part `(a + a*)/2` of a square matrix.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<HermitianEigen> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let herm = ComplexMatrix::from_dmatrix((&a.inner + a.inner.adjoint()) * C64::new(0.5, 0.0));
    let eig = herm
        .to_faer()
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::NoConvergence(format!("eigendecomposition did not converge: {e:?}")))?;
    let (values, vectors) = (eig.S(), eig.U());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        values[x]
            .re
            .partial_cmp(&values[y].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvectors = DMatrix::from_fn(n, n, |i, k| vectors[(i, order[k])]);
    Ok(HermitianEigen {
        eigenvalues: order.iter().map(|&k| values[k].re).collect(),
        eigenvectors: ComplexMatrix::from_dmatrix(eigenvectors),
    })
}

// JSON: {"rows":n,"cols":m,"re":[...],"im":[...]}, row-major.

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let entries = self.to_row_major();
        MatrixJson {
            rows: self.rows(),
            cols: self.cols(),
            re: entries.iter().map(|z| z.re).collect(),
            im: entries.iter().map(|z| z.im).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = MatrixJson::deserialize(deserializer)?;
        let expected = raw.rows * raw.cols;
        if raw.re.len() != expected {
            return Err(D::Error::custom(format!(
                "field `re`: expected {expected} entries, got {}",
                raw.re.len()
            )));
        }
        if raw.im.len() != expected {
            return Err(D::Error::custom(format!(
                "field `im`: expected {expected} entries, got {}",
                raw.im.len()
            )));
        }
        let entries = raw
            .re
            .iter()
            .zip(&raw.im)
            .map(|(&re, &im)| C64::new(re, im))
            .collect();
        ComplexMatrix::new(raw.rows, raw.cols, entries).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
        // small LCG keeps these unit tests independent of the crate RNG helpers
        let mut state = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        ComplexMatrix::from_fn(rows, cols, |_, _| C64::new(next(), next()))
    }

    #[test]
    fn adjoint_is_an_involution() {
        let a = sample(3, 4, 1);
        assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn identity_is_neutral() {
        let a = sample(3, 3, 2);
        let prod = ComplexMatrix::identity(3).checked_mul(&a).unwrap();
        assert!((&prod - &a).max_abs() < 1e-15);
    }

    #[test]
    fn adjoint_conjugates_scalars() {
        let a = ComplexMatrix::new(1, 1, vec![I]).unwrap();
        assert_eq!(a.adjoint().get(0, 0), -I);
    }

    #[test]
    fn mismatched_shapes_are_rejected() {
        let a = sample(2, 3, 3);
        let b = sample(2, 3, 4);
        assert!(matches!(
            a.checked_mul(&b),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(a.checked_add(&sample(3, 2, 5)).is_err());
    }

    #[test]
    fn non_finite_entries_are_rejected() {
        let err = ComplexMatrix::new(1, 2, vec![ONE, C64::new(f64::NAN, 0.0)]);
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn svd_of_diagonal() {
        let a = ComplexMatrix::real_diagonal(&[1.0, 3.0]);
        let s = svd(&a).unwrap();
        assert_eq!(s.singular_values.len(), 2);
        assert!((s.singular_values[0] - 3.0).abs() < 1e-14);
        assert!((s.singular_values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn svd_of_zero() {
        let s = svd(&ComplexMatrix::zeros(3, 2)).unwrap();
        assert!(s.singular_values.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn svd_reconstructs_rectangular() {
        for (m, n) in [(5, 3), (3, 5), (1, 4), (7, 7)] {
            let a = sample(m, n, (m * 10 + n) as u64);
            let s = svd(&a).unwrap();
            let err = (&a - &s.reconstruct()).operator_norm();
            assert!(err <= 1e-12 * a.operator_norm().max(1.0), "{m}x{n}: {err}");
            assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
            let utu = &s.left_vectors.adjoint() * &s.left_vectors;
            assert!((&utu - &ComplexMatrix::identity(m.min(n))).max_abs() < 1e-12);
        }
    }

    #[test]
    fn svd_is_deterministic() {
        let a = sample(4, 4, 9);
        let s1 = svd(&a).unwrap();
        let s2 = svd(&a).unwrap();
        assert_eq!(s1.left_vectors, s2.left_vectors);
        assert_eq!(s1.singular_values, s2.singular_values);
    }

    #[test]
    fn hermitian_eigen_sorted_and_reconstructs() {
        let b = sample(4, 4, 11);
        let h = &b + &b.adjoint();
        let e = hermitian_eigen(&h).unwrap();
        assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let back = e.recompose_with(|l| C64::new(l, 0.0));
        assert!((&back - &h).max_abs() < 1e-12);
    }

    #[test]
    fn blocks_roundtrip() {
        let a = sample(2, 2, 1);
        let b = sample(2, 3, 2);
        let c = sample(1, 2, 3);
        let d = sample(1, 3, 4);
        let m =
            ComplexMatrix::from_blocks(&[vec![a.clone(), b.clone()], vec![c, d.clone()]]).unwrap();
        assert_eq!(m.rows(), 3);
        assert_eq!(m.cols(), 5);
        assert_eq!(m.block(0, 2, 2, 3), b);
        assert_eq!(m.block(2, 2, 1, 3), d);
        assert!(ComplexMatrix::from_blocks(&[vec![a.clone()], vec![a.clone(), a]]).is_err());
    }

    #[test]
    fn json_layout_is_row_major() {
        let a = ComplexMatrix::new(2, 2, vec![ONE, I, C64::new(2.0, 0.0), ZERO]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(
            s,
            r#"{"rows":2,"cols":2,"re":[1.0,0.0,2.0,0.0],"im":[0.0,1.0,0.0,0.0]}"#
        );
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        let bad =
            serde_json::from_str::<ComplexMatrix>(r#"{"rows":2,"cols":2,"re":[1],"im":[0,0,0,0]}"#);
        assert!(bad.unwrap_err().to_string().contains("re"));
    }
}
