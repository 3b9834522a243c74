//! Finite-dimensional C*-algebras `M_{k1}(C) ⊕ … ⊕ M_{ks}(C)` and their
//! elements, including elements of the amplifications `M_n(A)`.
//!
//! An element of `M_n(A)` is stored per summand as one `(n·k_i) x (n·k_i)`
//! matrix. Its `(p, q)` entry in `M_n(A)` is the level-1 element whose block
//! `i` is the `k_i x k_i` sub-block at offset `(p·k_i, q·k_i)`.
//!
//! Coordinates use matrix units ordered by block, then row, then column.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::matrix::{ComplexMatrix, C64, ZERO};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "AlgebraJson", into = "AlgebraJson")]
pub struct Algebra {
    blocks: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraJson {
    blocks: Vec<usize>,
}

impl TryFrom<AlgebraJson> for Algebra {
    type Error = Error;
    fn try_from(raw: AlgebraJson) -> Result<Self> {
        Algebra::new(raw.blocks)
    }
}

impl From<Algebra> for AlgebraJson {
    fn from(a: Algebra) -> Self {
        AlgebraJson { blocks: a.blocks }
    }
}

/// A matrix unit `e^{(block)}_{row,col}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MatrixUnit {
    pub block: usize,
    pub row: usize,
    pub col: usize,
}

impl Algebra {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidInput(
                "algebra needs at least one block".into(),
            ));
        }
        if blocks.contains(&0) {
            return Err(Error::InvalidInput("block sizes must be positive".into()));
        }
        Ok(Self { blocks })
    }

    /// The full matrix algebra `M_k(C)`.
    pub fn matrix(k: usize) -> Self {
        Self::new(vec![k]).expect("positive block size")
    }

    /// `C^s` as `s` one-dimensional blocks.
    pub fn abelian(s: usize) -> Self {
        Self::new(vec![1; s]).expect("positive block count")
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// `Σ k_i²`.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|k| k * k).sum()
    }

    pub fn is_abelian(&self) -> bool {
        self.blocks.iter().all(|&k| k == 1)
    }

    /// The algebra `M_n(A)`, realised as blocks of size `n·k_i`.
    pub fn amplified(&self, n: usize) -> Self {
        Self {
            blocks: self.blocks.iter().map(|k| k * n).collect(),
        }
    }

    pub fn direct_sum(&self, other: &Algebra) -> Self {
        let mut blocks = self.blocks.clone();
        blocks.extend_from_slice(&other.blocks);
        Self { blocks }
    }

    /// Offset of block `i` in the coordinate vector.
    pub fn block_offset(&self, block: usize) -> usize {
        self.blocks[..block].iter().map(|k| k * k).sum()
    }

    pub fn unit_index(&self, unit: MatrixUnit) -> usize {
        let k = self.blocks[unit.block];
        self.block_offset(unit.block) + unit.row * k + unit.col
    }

    pub fn unit_at(&self, mut index: usize) -> MatrixUnit {
        for (block, &k) in self.blocks.iter().enumerate() {
            if index < k * k {
                return MatrixUnit {
                    block,
                    row: index / k,
                    col: index % k,
                };
            }
            index -= k * k;
        }
        panic!("basis index out of range");
    }

    /// All matrix units in coordinate order.
    pub fn units(&self) -> Vec<MatrixUnit> {
        (0..self.dim()).map(|i| self.unit_at(i)).collect()
    }

    /// The matrix unit as a level-1 element.
    pub fn basis_element(&self, index: usize) -> Element {
        let u = self.unit_at(index);
        let mut e = Element::zero(self, 1);
        let k = self.blocks[u.block];
        e.blocks[u.block] = ComplexMatrix::unit(k, k, u.row, u.col);
        e
    }

    pub fn basis(&self) -> Vec<Element> {
        (0..self.dim()).map(|i| self.basis_element(i)).collect()
    }
}

/// A member of `M_n(A)`; `n = 1` is the algebra itself.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    algebra: Algebra,
    level: usize,
    blocks: Vec<ComplexMatrix>,
}

impl Element {
    pub fn new(algebra: Algebra, level: usize, blocks: Vec<ComplexMatrix>) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidInput(
                "amplification level must be positive".into(),
            ));
        }
        if blocks.len() != algebra.num_blocks() {
            return Err(Error::AlgebraMismatch(format!(
                "expected {} blocks, got {}",
                algebra.num_blocks(),
                blocks.len()
            )));
        }
        for (i, (b, &k)) in blocks.iter().zip(algebra.block_dims()).enumerate() {
            let d = k * level;
            if b.rows() != d || b.cols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "block {i} is {}x{}, expected {d}x{d}",
                    b.rows(),
                    b.cols()
                )));
            }
            if !b.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "block {i} has non-finite entries"
                )));
            }
        }
        Ok(Self {
            algebra,
            level,
            blocks,
        })
    }

    /// Single-block element of `M_k(C)`.
    pub fn from_matrix(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(
                "element blocks must be square".into(),
            ));
        }
        let k = m.rows();
        Self::new(Algebra::matrix(k), 1, vec![m])
    }

    pub fn zero(algebra: &Algebra, level: usize) -> Self {
        let blocks = algebra
            .block_dims()
            .iter()
            .map(|&k| ComplexMatrix::zeros(k * level, k * level))
            .collect();
        Self {
            algebra: algebra.clone(),
            level,
            blocks,
        }
    }

    pub fn unit(algebra: &Algebra, level: usize) -> Self {
        let blocks = algebra
            .block_dims()
            .iter()
            .map(|&k| ComplexMatrix::identity(k * level))
            .collect();
        Self {
            algebra: algebra.clone(),
            level,
            blocks,
        }
    }

    pub(crate) fn from_parts_unchecked(
        algebra: Algebra,
        level: usize,
        blocks: Vec<ComplexMatrix>,
    ) -> Self {
        debug_assert_eq!(blocks.len(), algebra.num_blocks());
        Self {
            algebra,
            level,
            blocks,
        }
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &ComplexMatrix {
        &self.blocks[i]
    }

    pub fn into_blocks(self) -> Vec<ComplexMatrix> {
        self.blocks
    }

    pub fn same_space(&self, other: &Element) -> bool {
        self.level == other.level && self.algebra == other.algebra
    }

    pub fn check_same_space(&self, other: &Element) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(Error::AlgebraMismatch(format!(
                "{:?} vs {:?}",
                self.algebra.block_dims(),
                other.algebra.block_dims()
            )));
        }
        if self.level != other.level {
            return Err(Error::AlgebraMismatch(format!(
                "amplification levels {} vs {}",
                self.level, other.level
            )));
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &Element,
        f: impl Fn(&ComplexMatrix, &ComplexMatrix) -> ComplexMatrix,
    ) -> Element {
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| f(a, b))
            .collect();
        Element::from_parts_unchecked(self.algebra.clone(), self.level, blocks)
    }

    fn map_blocks(&self, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Element {
        Element::from_parts_unchecked(
            self.algebra.clone(),
            self.level,
            self.blocks.iter().map(f).collect(),
        )
    }

    pub fn checked_add(&self, other: &Element) -> Result<Element> {
        self.check_same_space(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &Element) -> Result<Element> {
        self.check_same_space(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn checked_mul(&self, other: &Element) -> Result<Element> {
        self.check_same_space(other)?;
        Ok(self.zip_with(other, |a, b| a * b))
    }

    pub fn scale(&self, s: C64) -> Element {
        self.map_blocks(|b| b.scale(s))
    }

    pub fn scale_real(&self, s: f64) -> Element {
        self.scale(C64::new(s, 0.0))
    }

    pub fn adjoint(&self) -> Element {
        self.map_blocks(|b| b.adjoint())
    }

    /// Blockwise transpose (the transpose of `M_n(A)` as a matrix algebra).
    pub fn transpose(&self) -> Element {
        self.map_blocks(|b| b.transpose())
    }

    /// Max over blocks of the largest singular value.
    pub fn operator_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.operator_norm())
            .fold(0.0, f64::max)
    }

    /// `‖self - other‖`; panics when the spaces differ.
    pub fn distance(&self, other: &Element) -> f64 {
        assert!(self.same_space(other), "distance between different spaces");
        (self - other).operator_norm()
    }

    pub fn is_zero_within(&self, eps: f64) -> bool {
        self.operator_norm() <= eps
    }

    /// Coordinates in the matrix-unit basis of the (amplified) algebra.
    pub fn coordinates(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.algebra.amplified(self.level).dim());
        for b in &self.blocks {
            out.extend(b.to_row_major());
        }
        out
    }

    pub fn from_coordinates(algebra: &Algebra, level: usize, coords: &[C64]) -> Result<Element> {
        let amp = algebra.amplified(level);
        if coords.len() != amp.dim() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coordinates, got {}",
                amp.dim(),
                coords.len()
            )));
        }
        let mut blocks = Vec::with_capacity(amp.num_blocks());
        let mut offset = 0;
        for &d in amp.block_dims() {
            blocks.push(ComplexMatrix::new(
                d,
                d,
                coords[offset..offset + d * d].to_vec(),
            )?);
            offset += d * d;
        }
        Element::new(algebra.clone(), level, blocks)
    }

    /// Reinterprets an element of `M_n(A)` as a level-1 element of the
    /// algebra `A^{(n)}` with blocks `n·k_i`.
    pub fn flatten(&self) -> Element {
        Element::from_parts_unchecked(self.algebra.amplified(self.level), 1, self.blocks.clone())
    }

    /// Inverse of [`Element::flatten`].
    pub fn unflatten(&self, algebra: &Algebra, level: usize) -> Result<Element> {
        if self.level != 1 || self.algebra != algebra.amplified(level) {
            return Err(Error::AlgebraMismatch(
                "element does not live in the requested amplification".into(),
            ));
        }
        Ok(Element::from_parts_unchecked(
            algebra.clone(),
            level,
            self.blocks.clone(),
        ))
    }

    /// The `(p, q)` entry of an element of `M_n(A)`, as a level-1 element.
    pub fn entry(&self, p: usize, q: usize) -> Element {
        assert!(p < self.level && q < self.level, "entry index out of range");
        let blocks = self
            .blocks
            .iter()
            .zip(self.algebra.block_dims())
            .map(|(b, &k)| b.block(p * k, q * k, k, k))
            .collect();
        Element::from_parts_unchecked(self.algebra.clone(), 1, blocks)
    }

    /// `Diag(x, …, x)` in `M_n(A)` for a level-1 `x`.
    pub fn diagonal_amplification(&self, n: usize) -> Element {
        assert_eq!(self.level, 1, "diagonal amplification of a level-1 element");
        let blocks = self
            .blocks
            .iter()
            .map(|b| ComplexMatrix::identity(n).kron(b))
            .collect();
        Element::from_parts_unchecked(self.algebra.clone(), n, blocks)
    }
}

/// Assembles the element of `M_n(A)` whose `(p, q)` entry is `grid[p][q]`.
pub fn amplify_element(grid: &[Vec<Element>]) -> Result<Element> {
    let n = grid.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty grid".into()));
    }
    if grid.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidInput(
            "ragged grid: expected an n x n grid".into(),
        ));
    }
    let first = &grid[0][0];
    for row in grid {
        for x in row {
            if x.level != 1 {
                return Err(Error::InvalidInput(
                    "grid entries must be level-1 elements".into(),
                ));
            }
            first.check_same_space(x)?;
        }
    }
    let algebra = first.algebra.clone();
    let blocks = (0..algebra.num_blocks())
        .map(|i| {
            let rows: Vec<Vec<ComplexMatrix>> = grid
                .iter()
                .map(|row| row.iter().map(|x| x.blocks[i].clone()).collect())
                .collect();
            ComplexMatrix::from_blocks(&rows)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Element::from_parts_unchecked(algebra, n, blocks))
}

impl<'a> Add<&'a Element> for &'a Element {
    type Output = Element;
    /// Panics when the operands live in different spaces.
    fn add(self, rhs: &'a Element) -> Element {
        self.checked_add(rhs).expect("element addition")
    }
}

impl<'a> Sub<&'a Element> for &'a Element {
    type Output = Element;
    fn sub(self, rhs: &'a Element) -> Element {
        self.checked_sub(rhs).expect("element subtraction")
    }
}

impl<'a> Mul<&'a Element> for &'a Element {
    type Output = Element;
    fn mul(self, rhs: &'a Element) -> Element {
        self.checked_mul(rhs).expect("element multiplication")
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale_real(-1.0)
    }
}

impl std::iter::Sum for Element {
    /// Panics on an empty iterator; there is no space to place the zero in.
    fn sum<It: Iterator<Item = Element>>(mut iter: It) -> Element {
        let first = iter.next().expect("sum of an empty element iterator");
        iter.fold(first, |acc, x| &acc + &x)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementJson {
    algebra: Algebra,
    n: usize,
    blocks: Vec<ComplexMatrix>,
}

impl Serialize for Element {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        ElementJson {
            algebra: self.algebra.clone(),
            n: self.level,
            blocks: self.blocks.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = ElementJson::deserialize(deserializer)?;
        Element::new(raw.algebra, raw.n, raw.blocks).map_err(D::Error::custom)
    }
}

/// Coordinate dot product `Σ conj(x_i) y_i` (the trace inner product `tr(x* y)`).
pub fn trace_inner(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).fold(ZERO, |acc, (a, b)| acc + a.conj() * b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{I, ONE};

    fn m2(entries: [f64; 4]) -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &entries)
    }

    #[test]
    fn algebra_dimensions() {
        let a = Algebra::new(vec![2, 1, 3]).unwrap();
        assert_eq!(a.dim(), 4 + 1 + 9);
        assert!(!a.is_abelian());
        assert!(Algebra::abelian(3).is_abelian());
        assert!(Algebra::new(vec![]).is_err());
        assert!(Algebra::new(vec![2, 0]).is_err());
        assert_eq!(a.amplified(2).block_dims(), &[4, 2, 6]);
    }

    #[test]
    fn basis_order_is_block_row_col() {
        let a = Algebra::new(vec![2, 1]).unwrap();
        let units = a.units();
        assert_eq!(
            units[1],
            MatrixUnit {
                block: 0,
                row: 0,
                col: 1
            }
        );
        assert_eq!(
            units[2],
            MatrixUnit {
                block: 0,
                row: 1,
                col: 0
            }
        );
        assert_eq!(
            units[4],
            MatrixUnit {
                block: 1,
                row: 0,
                col: 0
            }
        );
        for (i, u) in units.iter().enumerate() {
            assert_eq!(a.unit_index(*u), i);
        }
        let e = a.basis_element(1);
        assert_eq!(e.coordinates()[1], ONE);
    }

    #[test]
    fn norm_is_max_over_blocks() {
        let a = Algebra::new(vec![1, 2]).unwrap();
        let x = Element::new(
            a,
            1,
            vec![
                ComplexMatrix::from_real(1, 1, &[2.0]),
                m2([5.0, 0.0, 0.0, 1.0]),
            ],
        )
        .unwrap();
        assert!((x.operator_norm() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn unitary_has_norm_one() {
        let u = ComplexMatrix::new(2, 2, vec![ZERO, I, ONE, ZERO]).unwrap();
        assert!((Element::from_matrix(u).unwrap().operator_norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn unit_is_neutral_and_self_adjoint() {
        let a = Algebra::new(vec![2, 1]).unwrap();
        let x = Element::from_coordinates(
            &a,
            1,
            &(0..5)
                .map(|k| C64::new(k as f64, 1.0 - k as f64))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let one = Element::unit(&a, 1);
        assert_eq!(&one * &x, x);
        assert_eq!(one.adjoint(), one);
    }

    #[test]
    fn product_adjoint_reverses_order() {
        let x = Element::from_matrix(
            ComplexMatrix::new(2, 2, vec![ONE, I, ZERO, C64::new(2.0, 1.0)]).unwrap(),
        )
        .unwrap();
        let y = Element::from_matrix(m2([0.0, 1.0, 3.0, -1.0])).unwrap();
        let lhs = (&x * &y).adjoint();
        let rhs = &y.adjoint() * &x.adjoint();
        assert!(lhs.distance(&rhs) < 1e-14);
    }

    #[test]
    fn mismatched_spaces_are_rejected() {
        let x = Element::unit(&Algebra::matrix(2), 1);
        let y = Element::unit(&Algebra::matrix(2), 2);
        let z = Element::unit(&Algebra::matrix(3), 1);
        assert!(matches!(x.checked_add(&y), Err(Error::AlgebraMismatch(_))));
        assert!(matches!(x.checked_mul(&z), Err(Error::AlgebraMismatch(_))));
    }

    #[test]
    fn single_entry_grid_is_identity() {
        let x = Element::from_matrix(m2([1.0, 2.0, 3.0, 4.0])).unwrap();
        assert_eq!(amplify_element(&[vec![x.clone()]]).unwrap(), x);
    }

    #[test]
    fn diagonal_grid_keeps_norm() {
        let x = Element::from_matrix(m2([1.0, 2.0, 3.0, 4.0])).unwrap();
        let z = Element::zero(x.algebra(), 1);
        let d = amplify_element(&[vec![x.clone(), z.clone()], vec![z, x.clone()]]).unwrap();
        assert_eq!(d, x.diagonal_amplification(2));
        assert!((d.operator_norm() - x.operator_norm()).abs() < 1e-13);
    }

    #[test]
    fn grid_matches_hand_assembled_matrix() {
        // entry (p,q) holds the 2x2 block at rows 2p.., cols 2q..
        let e = |v: f64| Element::from_matrix(m2([v, v + 1.0, v + 2.0, v + 3.0])).unwrap();
        let grid = vec![vec![e(0.0), e(10.0)], vec![e(20.0), e(30.0)]];
        let x = amplify_element(&grid).unwrap();
        let expected = ComplexMatrix::from_real(
            4,
            4,
            &[
                0.0, 1.0, 10.0, 11.0, //
                2.0, 3.0, 12.0, 13.0, //
                20.0, 21.0, 30.0, 31.0, //
                22.0, 23.0, 32.0, 33.0,
            ],
        );
        assert_eq!(x.block(0), &expected);
        assert_eq!(x.entry(1, 0), e(20.0));
        assert_eq!(x.level(), 2);
    }

    #[test]
    fn ragged_grid_is_rejected() {
        let x = Element::unit(&Algebra::matrix(2), 1);
        assert!(amplify_element(&[vec![x.clone(), x.clone()], vec![x]]).is_err());
    }

    #[test]
    fn flatten_roundtrip() {
        let a = Algebra::new(vec![1, 2]).unwrap();
        let x = Element::unit(&a, 3);
        let flat = x.flatten();
        assert_eq!(flat.algebra().block_dims(), &[3, 6]);
        assert_eq!(flat.unflatten(&a, 3).unwrap(), x);
    }

    #[test]
    fn element_json_roundtrip() {
        let a = Algebra::new(vec![1, 2]).unwrap();
        let x = Element::unit(&a, 1);
        let s = serde_json::to_string(&x).unwrap();
        assert!(s.starts_with(r#"{"algebra":{"blocks":[1,2]},"n":1,"blocks":"#));
        let back: Element = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        let bad =
            r#"{"algebra":{"blocks":[2]},"n":1,"blocks":[{"rows":1,"cols":1,"re":[1],"im":[0]}]}"#;
        assert!(serde_json::from_str::<Element>(bad).is_err());
    }
}
