//! Linear maps between finite-dimensional C*-algebras, stored by their action
//! on the matrix-unit basis.

mod norm;

pub use norm::{estimate_amplified_norm, estimate_amplified_norm_from, norm_table, NormEstimate};

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize};

use crate::algebra::{Algebra, Element, MatrixUnit};
use crate::matrix::{ComplexMatrix, C64, ZERO};
use crate::rng::{gaussian_matrix, rng_from_seed};
use crate::tolerance::Tolerances;
use crate::{Error, Result};

/// A linear map `T: A → B`; column `j` of `matrix` holds the coordinates of
/// `T(e_j)` for the `j`-th matrix unit of `A`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearMap {
    domain: Algebra,
    codomain: Algebra,
    matrix: ComplexMatrix,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LinearMapJson {
    domain: Algebra,
    codomain: Algebra,
    matrix: ComplexMatrix,
}

impl<'de> Deserialize<'de> for LinearMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = LinearMapJson::deserialize(deserializer)?;
        LinearMap::new(raw.domain, raw.codomain, raw.matrix).map_err(serde::de::Error::custom)
    }
}

impl LinearMap {
    pub fn new(domain: Algebra, codomain: Algebra, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != codomain.dim() || matrix.cols() != domain.dim() {
            return Err(Error::DimensionMismatch(format!(
                "map matrix is {}x{}, expected {}x{} (dim codomain x dim domain)",
                matrix.rows(),
                matrix.cols(),
                codomain.dim(),
                domain.dim()
            )));
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidInput(
                "map matrix has non-finite entries".into(),
            ));
        }
        Ok(Self {
            domain,
            codomain,
            matrix,
        })
    }

    /// Builds the map from its values on matrix units.
    pub fn from_fn(
        domain: &Algebra,
        codomain: &Algebra,
        mut f: impl FnMut(&Element) -> Element,
    ) -> Result<Self> {
        let mut columns = Vec::with_capacity(domain.dim());
        for e in domain.basis() {
            let image = f(&e);
            if image.algebra() != codomain || image.level() != 1 {
                return Err(Error::AlgebraMismatch(
                    "image of a basis element is not in the codomain".into(),
                ));
            }
            columns.push(image.coordinates());
        }
        let matrix = ComplexMatrix::from_fn(codomain.dim(), domain.dim(), |r, c| columns[c][r]);
        Self::new(domain.clone(), codomain.clone(), matrix)
    }

    pub fn identity(algebra: &Algebra) -> Self {
        Self {
            domain: algebra.clone(),
            codomain: algebra.clone(),
            matrix: ComplexMatrix::identity(algebra.dim()),
        }
    }

    pub fn zero(domain: &Algebra, codomain: &Algebra) -> Self {
        Self {
            domain: domain.clone(),
            codomain: codomain.clone(),
            matrix: ComplexMatrix::zeros(codomain.dim(), domain.dim()),
        }
    }

    /// The transpose `θ(m)` on `M_m(C)`.
    pub fn make_transpose(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("transpose needs m >= 1".into()));
        }
        Ok(Self::blockwise_transpose(&Algebra::matrix(m)))
    }

    /// `a ↦ aᵗ` applied in every block of `algebra`.
    pub fn blockwise_transpose(algebra: &Algebra) -> Self {
        Self::from_fn(algebra, algebra, |e| e.transpose()).expect("transpose preserves the algebra")
    }

    pub fn domain(&self) -> &Algebra {
        &self.domain
    }

    pub fn codomain(&self) -> &Algebra {
        &self.codomain
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    fn check_domain(&self, x: &Element) -> Result<()> {
        if x.algebra() != &self.domain {
            return Err(Error::AlgebraMismatch(format!(
                "map domain has blocks {:?}, element has blocks {:?}",
                self.domain.block_dims(),
                x.algebra().block_dims()
            )));
        }
        Ok(())
    }

    /// `T(e_j)` for the `j`-th matrix unit.
    pub fn image_of_unit(&self, index: usize) -> Element {
        let coords: Vec<C64> = (0..self.codomain.dim())
            .map(|r| self.matrix.get(r, index))
            .collect();
        Element::from_coordinates(&self.codomain, 1, &coords)
            .expect("column has codomain dimension")
    }

    /// `T(e_j)` for every matrix unit, in basis order.
    pub fn basis_images(&self) -> Vec<Element> {
        (0..self.domain.dim())
            .map(|j| self.image_of_unit(j))
            .collect()
    }

    fn apply_coordinates(&self, coords: &[C64]) -> Vec<C64> {
        let m = self.matrix.as_dmatrix();
        (0..m.nrows())
            .map(|r| {
                let mut acc = ZERO;
                for (c, x) in coords.iter().enumerate() {
                    acc += m[(r, c)] * x;
                }
                acc
            })
            .collect()
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        self.check_domain(x)?;
        if x.level() != 1 {
            return self.amplified_apply(x);
        }
        Element::from_coordinates(&self.codomain, 1, &self.apply_coordinates(&x.coordinates()))
    }

    /// `T_n((x_pq)) = (T(x_pq))`.
    pub fn amplified_apply(&self, x: &Element) -> Result<Element> {
        self.check_domain(x)?;
        let n = x.level();
        let dom = self.domain.block_dims();
        let cod = self.codomain.block_dims();
        let mut out: Vec<nalgebra::DMatrix<C64>> = cod
            .iter()
            .map(|&l| nalgebra::DMatrix::zeros(n * l, n * l))
            .collect();
        let mut coords = Vec::with_capacity(self.domain.dim());
        for p in 0..n {
            for q in 0..n {
                coords.clear();
                for (i, &k) in dom.iter().enumerate() {
                    let b = x.block(i).as_dmatrix();
                    for r in 0..k {
                        for c in 0..k {
                            coords.push(b[(p * k + r, q * k + c)]);
                        }
                    }
                }
                let image = self.apply_coordinates(&coords);
                let mut offset = 0;
                for (target, &l) in out.iter_mut().zip(cod) {
                    for r in 0..l {
                        for c in 0..l {
                            target[(p * l + r, q * l + c)] = image[offset + r * l + c];
                        }
                    }
                    offset += l * l;
                }
            }
        }
        let out = out.into_iter().map(ComplexMatrix::from_dmatrix).collect();
        Element::new(self.codomain.clone(), n, out)
    }

    /// `T_n` as a map between the flattened algebras `A^{(n)} → B^{(n)}`.
    pub fn amplify(&self, n: usize) -> Result<LinearMap> {
        if n == 0 {
            return Err(Error::InvalidInput(
                "amplification level must be >= 1".into(),
            ));
        }
        let dom = self.domain.amplified(n);
        let cod = self.codomain.amplified(n);
        let mut failure = None;
        let map = LinearMap::from_fn(&dom, &cod, |e| {
            let x = e
                .unflatten(&self.domain, n)
                .expect("basis of the amplified domain");
            match self.amplified_apply(&x) {
                Ok(y) => y.flatten(),
                Err(err) => {
                    failure = Some(err);
                    Element::zero(&cod, 1)
                }
            }
        })?;
        match failure {
            Some(err) => Err(err),
            None => Ok(map),
        }
    }

    /// `T ∘ other`.
    pub fn compose(&self, other: &LinearMap) -> Result<LinearMap> {
        if other.codomain != self.domain {
            return Err(Error::AlgebraMismatch(
                "composition: codomain of the inner map differs from domain of the outer map"
                    .into(),
            ));
        }
        LinearMap::new(
            other.domain.clone(),
            self.codomain.clone(),
            &self.matrix * &other.matrix,
        )
    }

    /// `T ⊕ U: A₁ ⊕ A₂ → B₁ ⊕ B₂`, acting summand-wise.
    pub fn direct_sum(&self, other: &LinearMap) -> LinearMap {
        let m = ComplexMatrix::block_diagonal(&[self.matrix.clone(), other.matrix.clone()]);
        LinearMap::new(
            self.domain.direct_sum(&other.domain),
            self.codomain.direct_sum(&other.codomain),
            m,
        )
        .expect("block diagonal has matching shape")
    }

    /// `a ↦ T(a) ⊕ U(a)` into `B₁ ⊕ B₂`.
    pub fn stack(&self, other: &LinearMap) -> Result<LinearMap> {
        if self.domain != other.domain {
            return Err(Error::AlgebraMismatch(
                "stack: maps have different domains".into(),
            ));
        }
        let m =
            ComplexMatrix::from_blocks(&[vec![self.matrix.clone()], vec![other.matrix.clone()]])?;
        LinearMap::new(
            self.domain.clone(),
            self.codomain.direct_sum(&other.codomain),
            m,
        )
    }

    fn check_same_shape(&self, other: &LinearMap) -> Result<()> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(Error::AlgebraMismatch(
                "maps act between different algebras".into(),
            ));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &LinearMap) -> Result<LinearMap> {
        self.check_same_shape(other)?;
        LinearMap::new(
            self.domain.clone(),
            self.codomain.clone(),
            &self.matrix + &other.matrix,
        )
    }

    pub fn checked_sub(&self, other: &LinearMap) -> Result<LinearMap> {
        self.check_same_shape(other)?;
        LinearMap::new(
            self.domain.clone(),
            self.codomain.clone(),
            &self.matrix - &other.matrix,
        )
    }

    pub fn scale(&self, s: C64) -> LinearMap {
        LinearMap {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: self.matrix.scale(s),
        }
    }

    /// `a ↦ T(a*)*`.
    pub fn adjoint_map(&self) -> LinearMap {
        let units = self.domain.units();
        LinearMap::from_fn(&self.domain, &self.codomain, |e| {
            let u = units[unit_position(&self.domain, e)];
            let flipped = self.domain.unit_index(MatrixUnit {
                block: u.block,
                row: u.col,
                col: u.row,
            });
            self.image_of_unit(flipped).adjoint()
        })
        .expect("images lie in the codomain")
    }

    /// The Hilbert-Schmidt adjoint `T^†: B → A`, `⟨T^† y, x⟩ = ⟨y, T x⟩`.
    pub fn hs_adjoint(&self) -> LinearMap {
        LinearMap {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// Largest `‖T(e*) − T(e)*‖` over matrix units, with its unit index.
    pub fn symmetry_defect(&self) -> (f64, usize) {
        let adj = self.adjoint_map();
        let mut worst = (0.0, 0);
        for j in 0..self.domain.dim() {
            let d = self.image_of_unit(j).distance(&adj.image_of_unit(j));
            if d > worst.0 {
                worst = (d, j);
            }
        }
        worst
    }

    /// `T(a*) = T(a)*`, checked on matrix units.
    pub fn is_symmetric(&self) -> bool {
        let tol = Tolerances::current();
        let scale = self
            .basis_images()
            .iter()
            .map(Element::operator_norm)
            .fold(0.0, f64::max);
        tol.is_zero(self.symmetry_defect().0, scale)
    }

    /// Samples positive elements (the unit, diagonal matrix units, then
    /// `y*y` for Gaussian `y`) and looks for an image that is not positive.
    pub fn is_positive(&self, trials: usize, seed: u64) -> PositivityVerdict {
        let tol = Tolerances::current();
        let mut candidates = vec![Element::unit(&self.domain, 1)];
        for (idx, u) in self.domain.units().into_iter().enumerate() {
            if u.row == u.col {
                candidates.push(self.domain.basis_element(idx));
            }
        }
        let mut rng = rng_from_seed(seed);
        let mut checked = 0;
        let next_random = |rng: &mut crate::rng::SeededRng| {
            let blocks = self
                .domain
                .block_dims()
                .iter()
                .map(|&k| {
                    // random rank so that boundary points of the cone are probed too
                    let r = rng.random_range(1..=k);
                    let y = gaussian_matrix(r, k, rng);
                    &y.adjoint() * &y
                })
                .collect();
            Element::new(self.domain.clone(), 1, blocks).expect("shapes follow the domain")
        };
        let total = candidates.len() + trials;
        for t in 0..total {
            let x = if t < candidates.len() {
                candidates[t].clone()
            } else {
                next_random(&mut rng)
            };
            checked += 1;
            let (min_eig, herm, scale) = self.positivity_defect(&x);
            if herm > tol.threshold(scale) || min_eig < -tol.threshold(scale) {
                return PositivityVerdict::CertifiedFalse {
                    witness: x,
                    min_eigenvalue: min_eig,
                    hermitian_defect: herm,
                };
            }
        }
        PositivityVerdict::ProbablyTrue { samples: checked }
    }

    /// Smallest eigenvalue and Hermitian defect of `T(x)` over codomain
    /// blocks, with the scale they are judged against.
    fn positivity_defect(&self, x: &Element) -> (f64, f64, f64) {
        let image = self.apply(x).expect("sample lives in the domain");
        let scale = image.operator_norm().max(x.operator_norm());
        let mut min_eig = f64::INFINITY;
        let mut herm = 0.0_f64;
        for b in image.blocks() {
            herm = herm.max(b.hermitian_defect());
            if let Ok(e) = b.hermitian_eigen() {
                min_eig = min_eig.min(e.min_eigenvalue());
            }
        }
        (min_eig, herm, scale)
    }

    /// Whether `T(x)` is positive within tolerance.
    pub fn is_positive_at(&self, x: &Element) -> bool {
        let tol = Tolerances::current();
        let (min_eig, herm, scale) = self.positivity_defect(x);
        herm <= tol.threshold(scale) && min_eig >= -tol.threshold(scale)
    }

    /// Choi matrices `Σ_pq E_pq ⊗ T(e_pq)|_j` for every pair of domain block
    /// `i` and codomain block `j`.
    pub fn choi_blocks(&self) -> Vec<ComplexMatrix> {
        let dom = self.domain.block_dims();
        let cod = self.codomain.block_dims();
        let mut out = Vec::new();
        for (i, &k) in dom.iter().enumerate() {
            let images: Vec<Vec<Element>> = (0..k)
                .map(|p| {
                    (0..k)
                        .map(|q| {
                            self.image_of_unit(self.domain.unit_index(MatrixUnit {
                                block: i,
                                row: p,
                                col: q,
                            }))
                        })
                        .collect()
                })
                .collect();
            for j in 0..cod.len() {
                let grid: Vec<Vec<ComplexMatrix>> = images
                    .iter()
                    .map(|row| row.iter().map(|e| e.block(j).clone()).collect())
                    .collect();
                out.push(ComplexMatrix::from_blocks(&grid).expect("square grid of equal blocks"));
            }
        }
        out
    }

    /// Smallest eigenvalue over all Choi blocks, next to the largest Choi norm.
    pub fn choi_min_eigenvalue(&self) -> Result<(f64, f64)> {
        let mut min_eig = f64::INFINITY;
        let mut norm = 0.0_f64;
        for c in self.choi_blocks() {
            let e = c.hermitian_eigen()?;
            // a non-Hermitian Choi block cannot be PSD
            let herm = c.hermitian_defect();
            min_eig = min_eig.min(e.min_eigenvalue() - herm);
            norm = norm.max(c.operator_norm());
        }
        Ok((min_eig, norm))
    }

    /// Choi positivity with eigenvalue threshold `−1e-9·max(1, ‖C‖)`.
    pub fn is_completely_positive(&self) -> bool {
        match self.choi_min_eigenvalue() {
            Ok((min_eig, norm)) => min_eig >= -CP_EIGEN_TOL * norm.max(1.0),
            Err(_) => false,
        }
    }
}

/// Relative eigenvalue slack for the Choi test.
pub const CP_EIGEN_TOL: f64 = 1e-9;

fn unit_position(algebra: &Algebra, e: &Element) -> usize {
    // basis elements from `Algebra::basis` have exactly one unit entry
    let coords = e.coordinates();
    coords
        .iter()
        .position(|c| *c != ZERO)
        .unwrap_or_else(|| panic!("not a matrix unit of {:?}", algebra.block_dims()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PositivityVerdict {
    ProbablyTrue {
        samples: usize,
    },
    CertifiedFalse {
        witness: Element,
        min_eigenvalue: f64,
        hermitian_defect: f64,
    },
}

impl PositivityVerdict {
    pub fn is_probably_true(&self) -> bool {
        matches!(self, PositivityVerdict::ProbablyTrue { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::amplify_element;
    use crate::rng::{random_element, random_unitary};

    fn e(k: usize, i: usize, j: usize) -> Element {
        Element::from_matrix(ComplexMatrix::unit(k, k, i, j)).unwrap()
    }

    #[test]
    fn identity_and_zero_maps() {
        let alg = Algebra::new(vec![1, 2]).unwrap();
        let x = random_element(&alg, 1, &mut rng_from_seed(1));
        assert_eq!(LinearMap::identity(&alg).apply(&x).unwrap(), x);
        assert_eq!(
            LinearMap::zero(&alg, &alg).apply(&x).unwrap(),
            Element::zero(&alg, 1)
        );
    }

    #[test]
    fn transpose_moves_units() {
        let t = LinearMap::make_transpose(2).unwrap();
        assert_eq!(t.apply(&e(2, 0, 1)).unwrap(), e(2, 1, 0));
        assert_eq!(
            LinearMap::make_transpose(1).unwrap(),
            LinearMap::identity(&Algebra::matrix(1))
        );
        assert_eq!(
            t.compose(&t).unwrap(),
            LinearMap::identity(&Algebra::matrix(2))
        );
        assert!(LinearMap::make_transpose(0).is_err());
    }

    #[test]
    fn apply_rejects_foreign_elements() {
        let t = LinearMap::make_transpose(2).unwrap();
        assert!(t.apply(&e(3, 0, 0)).is_err());
    }

    #[test]
    fn amplification_acts_entrywise() {
        let alg = Algebra::new(vec![2, 1]).unwrap();
        let mut rng = rng_from_seed(2);
        let t = LinearMap::new(alg.clone(), alg.clone(), gaussian_matrix(5, 5, &mut rng)).unwrap();
        let grid: Vec<Vec<Element>> = (0..3)
            .map(|_| (0..3).map(|_| random_element(&alg, 1, &mut rng)).collect())
            .collect();
        let x = amplify_element(&grid).unwrap();
        let images: Vec<Vec<Element>> = grid
            .iter()
            .map(|row| row.iter().map(|g| t.apply(g).unwrap()).collect())
            .collect();
        assert_eq!(
            t.amplified_apply(&x).unwrap(),
            amplify_element(&images).unwrap()
        );
        let a = random_element(&alg, 1, &mut rng);
        assert_eq!(
            t.amplified_apply(&a.diagonal_amplification(2)).unwrap(),
            t.apply(&a).unwrap().diagonal_amplification(2)
        );
        let t3 = t.amplify(3).unwrap();
        assert_eq!(
            t3.apply(&x.flatten()).unwrap(),
            amplify_element(&images).unwrap().flatten()
        );
    }

    #[test]
    fn paper_pair_under_amplified_transpose() {
        let m2 = Algebra::matrix(2);
        let grid = |entries: &[f64]| {
            Element::new(m2.clone(), 2, vec![ComplexMatrix::from_real(4, 4, entries)]).unwrap()
        };
        let x = grid(&[
            1., 0., 1., 0., 0., 0., 0., 0., 1., 0., 1., 0., 0., 0., 0., 0.,
        ]);
        let y = grid(&[
            0., 0., 0., 0., 1., 2., -1., 0., 0., 0., 0., 0., 2., 2., -2., 0.,
        ]);
        let t = LinearMap::make_transpose(2).unwrap();
        let tx = t.amplified_apply(&x).unwrap();
        let ty = t.amplified_apply(&y).unwrap();
        // each 2x2 entry is transposed in place
        assert_eq!(tx.entry(0, 1), x.entry(0, 1).transpose());
        assert_eq!(ty.entry(1, 0), y.entry(1, 0).transpose());
        let product = &tx.adjoint() * &ty;
        let expected = grid(&[
            0., 3., 0., -3., 0., 0., 0., 0., 0., 3., 0., -3., 0., 0., 0., 0.,
        ]);
        assert!(product.distance(&expected) <= 1e-12);
    }

    #[test]
    fn symmetry_checks() {
        assert!(LinearMap::make_transpose(3).unwrap().is_symmetric());
        let alg = Algebra::matrix(2);
        let u = e(2, 0, 1);
        let left = LinearMap::from_fn(&alg, &alg, |a| &u * a).unwrap();
        assert!(!left.is_symmetric());
        let w = Element::from_matrix(random_unitary(2, &mut rng_from_seed(3))).unwrap();
        let conj = LinearMap::from_fn(&alg, &alg, |a| &(&w * a) * &w.adjoint()).unwrap();
        assert!(conj.is_symmetric());
    }

    #[test]
    fn positivity_sampling() {
        let alg = Algebra::matrix(2);
        assert!(LinearMap::identity(&alg)
            .is_positive(50, 1)
            .is_probably_true());
        assert!(LinearMap::make_transpose(2)
            .unwrap()
            .is_positive(200, 1)
            .is_probably_true());
        match LinearMap::identity(&alg)
            .scale(C64::new(-1.0, 0.0))
            .is_positive(10, 1)
        {
            PositivityVerdict::CertifiedFalse { witness, .. } => {
                assert_eq!(witness, Element::unit(&alg, 1))
            }
            other => panic!("expected a certificate, got {other:?}"),
        }
    }

    #[test]
    fn complete_positivity() {
        assert!(LinearMap::identity(&Algebra::new(vec![2, 3]).unwrap()).is_completely_positive());
        assert!(!LinearMap::make_transpose(2)
            .unwrap()
            .is_completely_positive());
        // compression by an isometry C^2 -> C^3
        let v = random_unitary(3, &mut rng_from_seed(4)).block(0, 0, 3, 2);
        let compress = LinearMap::from_fn(&Algebra::matrix(3), &Algebra::matrix(2), |a| {
            Element::from_matrix(&(&v.adjoint() * a.block(0)) * &v).unwrap()
        })
        .unwrap();
        assert!(compress.is_completely_positive());
    }

    #[test]
    fn compose_direct_sum_adjoint() {
        let alg = Algebra::new(vec![2, 1]).unwrap();
        let mut rng = rng_from_seed(5);
        let t = LinearMap::new(alg.clone(), alg.clone(), gaussian_matrix(5, 5, &mut rng)).unwrap();
        assert_eq!(t.compose(&LinearMap::identity(&alg)).unwrap(), t);
        assert_eq!(t.adjoint_map().adjoint_map(), t);
        let a = random_element(&alg, 1, &mut rng);
        assert!(
            t.adjoint_map()
                .apply(&a)
                .unwrap()
                .distance(&t.apply(&a.adjoint()).unwrap().adjoint())
                < 1e-12
        );
        let t2 = LinearMap::make_transpose(2).unwrap();
        let t3 = LinearMap::make_transpose(3).unwrap();
        let sum_alg = Algebra::new(vec![2, 3]).unwrap();
        assert_eq!(t2.direct_sum(&t3), LinearMap::blockwise_transpose(&sum_alg));
    }

    #[test]
    fn hs_adjoint_pairs_with_trace_inner_product() {
        let dom = Algebra::new(vec![2]).unwrap();
        let cod = Algebra::new(vec![1, 2]).unwrap();
        let mut rng = rng_from_seed(6);
        let t = LinearMap::new(dom.clone(), cod.clone(), gaussian_matrix(5, 4, &mut rng)).unwrap();
        let x = random_element(&dom, 1, &mut rng);
        let y = random_element(&cod, 1, &mut rng);
        let lhs = crate::algebra::trace_inner(
            &t.hs_adjoint().apply(&y).unwrap().coordinates(),
            &x.coordinates(),
        );
        let rhs =
            crate::algebra::trace_inner(&y.coordinates(), &t.apply(&x).unwrap().coordinates());
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn json_roundtrip_and_shape_errors() {
        let t = LinearMap::make_transpose(2).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        let back: LinearMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        let bad = r#"{"domain":{"blocks":[2]},"codomain":{"blocks":[2]},"matrix":{"rows":1,"cols":1,"re":[1],"im":[0]}}"#;
        assert!(serde_json::from_str::<LinearMap>(bad).is_err());
    }
}
