//! Exact structural checks on matrix-unit bases.
//!
//! Each identity is linear in the outer slots and conjugate-linear in the
//! middle one, so it holds everywhere iff it holds on all basis tuples, with
//! the middle slot also taken as `i·e`. Products of matrix units are computed
//! symbolically (`e_pq e_rs = δ_qr e_ps` inside one block), so the left-hand
//! side is a single column of the action matrix. Defects are measured in the
//! Frobenius norm.

use rayon::prelude::*;
use serde::Serialize;

use super::witness::{Target, Witness};
use crate::algebra::{Algebra, Element, MatrixUnit};
use crate::maps::LinearMap;
use crate::matrix::{ComplexMatrix, C64, I, ONE};
use crate::tolerance::Tolerances;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TripleIdentity {
    /// `S({a,b,c}) = {S a, S b, S c}`.
    TripleHom,
    /// `S(a b* c) = S(a) S(b)* S(c)`.
    TroHom,
    /// `S(a b* c) = S(c) S(b)* S(a)`.
    TroAntiHom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairIdentity {
    /// `J(a∘b) = J(a)∘J(b)` with `a∘b = (ab + ba)/2`.
    Jordan,
    /// `S(ab) = S(a) S(b)`.
    Multiplicative,
}

/// Result of a structural check: the largest defect seen and, when the
/// identity fails, the first failing basis tuple.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub holds: bool,
    pub max_defect: f64,
    pub witness: Option<Witness>,
}

fn frobenius(blocks: &[ComplexMatrix]) -> f64 {
    blocks
        .iter()
        .map(|b| b.frobenius_norm().powi(2))
        .sum::<f64>()
        .sqrt()
}

fn diff_norm(x: &[ComplexMatrix], y: &[ComplexMatrix]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).frobenius_norm().powi(2))
        .sum::<f64>()
        .sqrt()
}

/// `e_i e_j* e_k` as a matrix unit, if nonzero.
fn unit_tro(a: MatrixUnit, b: MatrixUnit, c: MatrixUnit) -> Option<MatrixUnit> {
    (a.block == b.block && b.block == c.block && a.col == b.col && b.row == c.row).then_some(
        MatrixUnit {
            block: a.block,
            row: a.row,
            col: c.col,
        },
    )
}

/// `e_i e_j` as a matrix unit, if nonzero.
fn unit_product(a: MatrixUnit, b: MatrixUnit) -> Option<MatrixUnit> {
    (a.block == b.block && a.col == b.row).then_some(MatrixUnit {
        block: a.block,
        row: a.row,
        col: b.col,
    })
}

/// Images of all matrix units, split into codomain blocks.
struct Images<'a> {
    domain: &'a Algebra,
    units: Vec<MatrixUnit>,
    blocks: Vec<Vec<ComplexMatrix>>,
    norms: Vec<f64>,
    zero: Vec<ComplexMatrix>,
}

impl<'a> Images<'a> {
    fn new(s: &'a LinearMap) -> Self {
        let blocks: Vec<Vec<ComplexMatrix>> = s
            .basis_images()
            .into_iter()
            .map(Element::into_blocks)
            .collect();
        let norms = blocks.iter().map(|b| frobenius(b)).collect();
        let zero = Element::zero(s.codomain(), 1).into_blocks();
        Self {
            domain: s.domain(),
            units: s.domain().units(),
            blocks,
            norms,
            zero,
        }
    }

    fn of(&self, unit: Option<MatrixUnit>) -> &[ComplexMatrix] {
        match unit {
            Some(u) => &self.blocks[self.domain.unit_index(u)],
            None => &self.zero,
        }
    }
}

fn scaled(blocks: &[ComplexMatrix], s: C64) -> Vec<ComplexMatrix> {
    blocks.iter().map(|b| b.scale(s)).collect()
}

fn combine(x: &[ComplexMatrix], y: &[ComplexMatrix], s: C64) -> Vec<ComplexMatrix> {
    x.iter().zip(y).map(|(a, b)| (a + b).scale(s)).collect()
}

/// `x y* z` blockwise.
fn block_tro(x: &[ComplexMatrix], y: &[ComplexMatrix], z: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    x.iter()
        .zip(y)
        .zip(z)
        .map(|((a, b), c)| &(a * &b.adjoint()) * c)
        .collect()
}

fn block_mul(x: &[ComplexMatrix], y: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    x.iter().zip(y).map(|(a, b)| a * b).collect()
}

/// Defect of one triple identity at basis units `(i, λ·j, k)`.
fn basis_triple_defect(
    img: &Images,
    identity: TripleIdentity,
    i: usize,
    j: usize,
    k: usize,
    lambda: C64,
) -> (f64, f64) {
    let (ui, uj, uk) = (img.units[i], img.units[j], img.units[k]);
    let a = &img.blocks[i];
    let b = scaled(&img.blocks[j], lambda);
    let c = &img.blocks[k];
    let factor = lambda.conj();
    let (lhs, rhs) = match identity {
        TripleIdentity::TripleHom => {
            let lhs = combine(
                img.of(unit_tro(ui, uj, uk)),
                img.of(unit_tro(uk, uj, ui)),
                factor * 0.5,
            );
            let rhs = combine(
                &block_tro(a, &b, c),
                &block_tro(c, &b, a),
                C64::new(0.5, 0.0),
            );
            (lhs, rhs)
        }
        TripleIdentity::TroHom => (
            scaled(img.of(unit_tro(ui, uj, uk)), factor),
            block_tro(a, &b, c),
        ),
        TripleIdentity::TroAntiHom => (
            scaled(img.of(unit_tro(ui, uj, uk)), factor),
            block_tro(c, &b, a),
        ),
    };
    let scale = img.norms[i] * img.norms[j] * img.norms[k] + frobenius(&lhs);
    (diff_norm(&lhs, &rhs), scale)
}

fn basis_pair_defect(img: &Images, identity: PairIdentity, i: usize, j: usize) -> (f64, f64) {
    let (ui, uj) = (img.units[i], img.units[j]);
    let (a, b) = (&img.blocks[i], &img.blocks[j]);
    let (lhs, rhs) = match identity {
        PairIdentity::Multiplicative => (img.of(unit_product(ui, uj)).to_vec(), block_mul(a, b)),
        PairIdentity::Jordan => (
            combine(
                img.of(unit_product(ui, uj)),
                img.of(unit_product(uj, ui)),
                C64::new(0.5, 0.0),
            ),
            combine(&block_mul(a, b), &block_mul(b, a), C64::new(0.5, 0.0)),
        ),
    };
    let scale = img.norms[i] * img.norms[j] + frobenius(&lhs);
    (diff_norm(&lhs, &rhs), scale)
}

/// Scans `outer` indices in parallel chunks, keeping the first failure in
/// index order and stopping after the chunk where it occurs.
fn scan<F>(outer: usize, check: F) -> (f64, Option<(usize, usize, usize, bool)>)
where
    F: Fn(usize) -> (f64, Option<(usize, usize, usize, bool)>) + Sync,
{
    let chunk = rayon::current_num_threads().max(1) * 2;
    let mut max_defect = 0.0_f64;
    let mut start = 0;
    while start < outer {
        let end = (start + chunk).min(outer);
        let results: Vec<_> = (start..end).into_par_iter().map(&check).collect();
        let mut failure = None;
        for (d, f) in results {
            max_defect = max_defect.max(d);
            if failure.is_none() {
                failure = f;
            }
        }
        if failure.is_some() {
            return (max_defect, failure);
        }
        start = end;
    }
    (max_defect, None)
}

pub(crate) fn check_triple_identity(
    s: &LinearMap,
    identity: TripleIdentity,
    target: Target,
) -> CheckOutcome {
    let tol = Tolerances::current();
    let img = Images::new(s);
    let dim = img.units.len();
    let (max_defect, failure) = scan(dim, |i| {
        let mut worst = 0.0_f64;
        for j in 0..dim {
            for k in 0..dim {
                for (imag, lambda) in [(false, ONE), (true, I)] {
                    let (d, scale) = basis_triple_defect(&img, identity, i, j, k, lambda);
                    worst = worst.max(d);
                    if !tol.is_zero(d, scale) {
                        return (worst, Some((i, j, k, imag)));
                    }
                }
            }
        }
        (worst, None)
    });
    let witness = failure.map(|(i, j, k, imag)| {
        let b = img.domain.basis_element(j);
        Witness::Triple {
            identity,
            target,
            a: img.domain.basis_element(i),
            b: if imag { b.scale(I) } else { b },
            c: img.domain.basis_element(k),
        }
    });
    CheckOutcome {
        holds: witness.is_none(),
        max_defect,
        witness,
    }
}

fn check_pair_identity(s: &LinearMap, identity: PairIdentity) -> CheckOutcome {
    let tol = Tolerances::current();
    let img = Images::new(s);
    let dim = img.units.len();
    let (max_defect, failure) = scan(dim, |i| {
        let mut worst = 0.0_f64;
        for j in 0..dim {
            let (d, scale) = basis_pair_defect(&img, identity, i, j);
            worst = worst.max(d);
            if !tol.is_zero(d, scale) {
                return (worst, Some((i, j, 0, false)));
            }
        }
        (worst, None)
    });
    let witness = failure.map(|(i, j, _, _)| Witness::Pair {
        identity,
        a: img.domain.basis_element(i),
        b: img.domain.basis_element(j),
    });
    CheckOutcome {
        holds: witness.is_none(),
        max_defect,
        witness,
    }
}

/// `S({a,b,c}) = {S(a), S(b), S(c)}` for all `a, b, c`.
pub fn is_triple_homomorphism(s: &LinearMap) -> CheckOutcome {
    check_triple_identity(s, TripleIdentity::TripleHom, Target::Map)
}

/// `S(a b* c) = S(a) S(b)* S(c)` for all `a, b, c`.
pub fn is_tro_homomorphism(s: &LinearMap) -> CheckOutcome {
    check_triple_identity(s, TripleIdentity::TroHom, Target::Map)
}

/// `S(a b* c) = S(c) S(b)* S(a)` for all `a, b, c`.
pub fn is_tro_anti_homomorphism(s: &LinearMap) -> CheckOutcome {
    check_triple_identity(s, TripleIdentity::TroAntiHom, Target::Map)
}

/// `S(ab) = S(a) S(b)` for all `a, b`.
pub fn is_multiplicative(s: &LinearMap) -> CheckOutcome {
    check_pair_identity(s, PairIdentity::Multiplicative)
}

fn symmetry_outcome(s: &LinearMap) -> CheckOutcome {
    let (defect, index) = s.symmetry_defect();
    let holds = s.is_symmetric();
    CheckOutcome {
        holds,
        max_defect: defect,
        witness: (!holds).then(|| Witness::Symmetry {
            a: s.domain().basis_element(index),
        }),
    }
}

/// Symmetric and `J(a∘b) = J(a)∘J(b)`.
pub fn is_jordan_star_homomorphism(j: &LinearMap) -> CheckOutcome {
    let sym = symmetry_outcome(j);
    if !sym.holds {
        return sym;
    }
    let jordan = check_pair_identity(j, PairIdentity::Jordan);
    CheckOutcome {
        max_defect: jordan.max_defect.max(sym.max_defect),
        ..jordan
    }
}

/// Symmetric and multiplicative.
pub fn is_star_homomorphism(s: &LinearMap) -> CheckOutcome {
    let sym = symmetry_outcome(s);
    if !sym.holds {
        return sym;
    }
    let mult = is_multiplicative(s);
    CheckOutcome {
        max_defect: mult.max_defect.max(sym.max_defect),
        ..mult
    }
}

/// Defect of a triple identity at arbitrary elements, with its scale.
pub fn triple_defect(
    s: &LinearMap,
    identity: TripleIdentity,
    a: &Element,
    b: &Element,
    c: &Element,
) -> Result<(f64, f64)> {
    use crate::triple::{jordan_triple_product, tro_product};
    let (sa, sb, sc) = (s.apply(a)?, s.apply(b)?, s.apply(c)?);
    let (lhs, rhs) = match identity {
        TripleIdentity::TripleHom => (
            s.apply(&jordan_triple_product(a, b, c)?)?,
            jordan_triple_product(&sa, &sb, &sc)?,
        ),
        TripleIdentity::TroHom => (
            s.apply(&tro_product(a, b, c)?)?,
            tro_product(&sa, &sb, &sc)?,
        ),
        TripleIdentity::TroAntiHom => (
            s.apply(&tro_product(a, b, c)?)?,
            tro_product(&sc, &sb, &sa)?,
        ),
    };
    let scale = sa.operator_norm() * sb.operator_norm() * sc.operator_norm() + lhs.operator_norm();
    Ok((lhs.distance(&rhs), scale))
}

/// Defect of a product identity at arbitrary elements, with its scale.
pub fn pair_defect(
    s: &LinearMap,
    identity: PairIdentity,
    a: &Element,
    b: &Element,
) -> Result<(f64, f64)> {
    let (sa, sb) = (s.apply(a)?, s.apply(b)?);
    let (lhs, rhs) = match identity {
        PairIdentity::Multiplicative => (s.apply(&(a * b))?, &sa * &sb),
        PairIdentity::Jordan => {
            let ab = (&(a * b) + &(b * a)).scale_real(0.5);
            (s.apply(&ab)?, (&(&sa * &sb) + &(&sb * &sa)).scale_real(0.5))
        }
    };
    let scale = sa.operator_norm() * sb.operator_norm() + lhs.operator_norm();
    Ok((lhs.distance(&rhs), scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_unitary, rng_from_seed};

    fn unitary_sandwich(k: usize, seed: u64) -> LinearMap {
        let mut rng = rng_from_seed(seed);
        let u = random_unitary(k, &mut rng);
        let v = random_unitary(k, &mut rng);
        let alg = Algebra::matrix(k);
        LinearMap::from_fn(&alg, &alg, |a| {
            Element::from_matrix(&(&u * a.block(0)) * &v.adjoint()).unwrap()
        })
        .unwrap()
    }

    #[test]
    fn transpose_is_triple_and_anti_but_not_tro() {
        for m in 2..=3 {
            let t = LinearMap::make_transpose(m).unwrap();
            assert!(is_triple_homomorphism(&t).holds);
            assert!(is_tro_anti_homomorphism(&t).holds);
            assert!(is_jordan_star_homomorphism(&t).holds);
            let out = is_tro_homomorphism(&t);
            assert!(!out.holds);
            let w = out.witness.unwrap();
            assert!(w.replay(&t).unwrap());
        }
    }

    #[test]
    fn transpose_tro_witness_is_the_zero_tro_counterexample() {
        // first failing triple in basis order: a = e11, b = e11, c = e12
        let t = LinearMap::make_transpose(2).unwrap();
        match is_tro_homomorphism(&t).witness.unwrap() {
            Witness::Triple { a, b, c, .. } => {
                let alg = Algebra::matrix(2);
                assert_eq!(a, alg.basis_element(0));
                assert_eq!(b, alg.basis_element(0));
                assert_eq!(c, alg.basis_element(1));
            }
            other => panic!("unexpected witness {other:?}"),
        }
    }

    #[test]
    fn scaling_breaks_the_cubic_identity() {
        let alg = Algebra::matrix(2);
        let two = LinearMap::identity(&alg).scale(C64::new(2.0, 0.0));
        let out = is_triple_homomorphism(&two);
        assert!(!out.holds);
        match out.witness.unwrap() {
            Witness::Triple { a, b, c, .. } => {
                // first basis triple (e11, e11, e11)
                assert_eq!(a, alg.basis_element(0));
                assert_eq!(b, a);
                assert_eq!(c, a);
            }
            other => panic!("unexpected witness {other:?}"),
        }
    }

    #[test]
    fn unitary_sandwich_is_tro_hom() {
        let s = unitary_sandwich(3, 1);
        assert!(is_triple_homomorphism(&s).holds);
        assert!(is_tro_homomorphism(&s).holds);
    }

    #[test]
    fn diagonal_copies_are_tro_hom() {
        let dom = Algebra::matrix(2);
        let cod = Algebra::matrix(4);
        let s = LinearMap::from_fn(&dom, &cod, |a| {
            a.diagonal_amplification(2)
                .flatten()
                .unflatten(&cod, 1)
                .unwrap()
        })
        .unwrap();
        assert!(is_tro_homomorphism(&s).holds);
    }

    #[test]
    fn identity_on_noncommutative_block_is_not_anti() {
        assert!(!is_tro_anti_homomorphism(&LinearMap::identity(&Algebra::matrix(2))).holds);
        assert!(is_tro_anti_homomorphism(&LinearMap::identity(&Algebra::matrix(1))).holds);
        assert!(is_tro_anti_homomorphism(&LinearMap::identity(&Algebra::abelian(3))).holds);
    }

    #[test]
    fn jordan_checks() {
        let alg = Algebra::matrix(2);
        let sym_sum = LinearMap::identity(&alg)
            .checked_add(&LinearMap::make_transpose(2).unwrap())
            .unwrap();
        let out = is_jordan_star_homomorphism(&sym_sum);
        assert!(!out.holds);
        assert!(out.witness.unwrap().replay(&sym_sum).unwrap());
        let mut rng = rng_from_seed(3);
        let w = random_unitary(2, &mut rng);
        let conj = LinearMap::from_fn(&alg, &alg, |a| {
            Element::from_matrix(&(&w * a.block(0)) * &w.adjoint()).unwrap()
        })
        .unwrap();
        assert!(is_jordan_star_homomorphism(&conj).holds);
        assert!(is_star_homomorphism(&conj).holds);
    }

    #[test]
    fn multiplicativity() {
        let alg = Algebra::matrix(2);
        assert!(is_multiplicative(&LinearMap::identity(&alg)).holds);
        let t = LinearMap::make_transpose(2).unwrap();
        let out = is_multiplicative(&t);
        assert!(!out.holds);
        assert!(out.witness.unwrap().replay(&t).unwrap());
    }
}
