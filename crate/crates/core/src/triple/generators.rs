//! Seeded generators of structured tuples: orthogonal pairs, right-orthogonal
//! pairs, zero-TRO triples and zero-product pairs.
//!
//! Every construction starts from one random singular frame per block and
//! hands disjoint sets of frame slots to the different outputs, so the
//! defining relation holds up to rounding.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::{Algebra, Element};
use crate::matrix::{ComplexMatrix, C64};
use crate::rng::{derive_seed, gaussian_matrix, random_unitary, rng_from_seed, SeededRng};
use crate::{Error, Result};

const SIGMA_RANGE: (f64, f64) = (0.5, 2.0);

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    First,
    Second,
    Neither,
}

/// All (block, index) slots of the amplified algebra, shuffled, with the
/// first slot given to the first output, the second to the second output and
/// the rest distributed at random.
fn assign_slots(algebra: &Algebra, level: usize, rng: &mut SeededRng) -> Vec<Vec<Side>> {
    let dims: Vec<usize> = algebra.block_dims().iter().map(|k| k * level).collect();
    let mut slots: Vec<(usize, usize)> = dims
        .iter()
        .enumerate()
        .flat_map(|(b, &d)| (0..d).map(move |i| (b, i)))
        .collect();
    slots.shuffle(rng);
    let mut sides: Vec<Vec<Side>> = dims.iter().map(|&d| vec![Side::Neither; d]).collect();
    for (pos, &(b, i)) in slots.iter().enumerate() {
        sides[b][i] = match pos {
            0 => Side::First,
            1 => Side::Second,
            _ => match rng.random_range(0..3) {
                0 => Side::First,
                1 => Side::Second,
                _ => Side::Neither,
            },
        };
    }
    sides
}

fn sigma(rng: &mut SeededRng) -> f64 {
    rng.random_range(SIGMA_RANGE.0..=SIGMA_RANGE.1)
}

/// `Σ_{i: side(i) = want} σ_i u_i v_i*` with freshly drawn weights.
fn frame_sum(
    u: &ComplexMatrix,
    v: &ComplexMatrix,
    sides: &[Side],
    want: Side,
    rng: &mut SeededRng,
) -> ComplexMatrix {
    let d: Vec<f64> = sides
        .iter()
        .map(|&s| if s == want { sigma(rng) } else { 0.0 })
        .collect();
    &(u * &ComplexMatrix::real_diagonal(&d)) * &v.adjoint()
}

fn element(algebra: &Algebra, level: usize, blocks: Vec<ComplexMatrix>) -> Element {
    Element::new(algebra.clone(), level, blocks).expect("generator shapes follow the algebra")
}

/// `(a, b)` with `a b* = b* a = 0`, built from one SVD frame per block with
/// disjoint slot sets. If the whole space has a single slot, `b` is zero.
pub fn random_orthogonal_pair(algebra: &Algebra, level: usize, seed: u64) -> (Element, Element) {
    let mut rng = rng_from_seed(seed);
    let sides = assign_slots(algebra, level, &mut rng);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for side in &sides {
        let d = side.len();
        let u = random_unitary(d, &mut rng);
        let v = random_unitary(d, &mut rng);
        a.push(frame_sum(&u, &v, side, Side::First, &mut rng));
        b.push(frame_sum(&u, &v, side, Side::Second, &mut rng));
    }
    (element(algebra, level, a), element(algebra, level, b))
}

/// `(a, b)` with `a b* = 0` but `b* a ≠ 0`: both share a left frame while
/// their right supports are disjoint.
///
/// Fails when every block of the amplified algebra is `1 x 1`.
pub fn random_right_orthogonal_pair(
    algebra: &Algebra,
    level: usize,
    seed: u64,
) -> Result<(Element, Element)> {
    let eligible: Vec<usize> = algebra
        .block_dims()
        .iter()
        .enumerate()
        .filter(|(_, &k)| k * level >= 2)
        .map(|(i, _)| i)
        .collect();
    if eligible.is_empty() {
        return Err(Error::Generator(
            "right-orthogonal pairs with b*a != 0 need a block of size at least 2".into(),
        ));
    }
    for attempt in 0..8 {
        let mut rng = rng_from_seed(derive_seed(seed, attempt));
        let chosen = eligible[rng.random_range(0..eligible.len())];
        let sides = assign_slots(algebra, level, &mut rng);
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (block, side) in sides.iter().enumerate() {
            let d = side.len();
            let u = random_unitary(d, &mut rng);
            let v = random_unitary(d, &mut rng);
            if block == chosen {
                // left vectors u_0.. shared, right vectors split at p
                let p = rng.random_range(1..d);
                let ma = rng.random_range(1..=p.min(d));
                let mb = rng.random_range(1..=(d - p).min(d));
                let left_a = u.block(0, 0, d, ma);
                let left_b = u.block(0, 0, d, mb);
                let right_a = v.block(0, 0, d, ma);
                let right_b = v.block(0, p, d, mb);
                let da: Vec<f64> = (0..ma).map(|_| sigma(&mut rng)).collect();
                let db: Vec<f64> = (0..mb).map(|_| sigma(&mut rng)).collect();
                a.push(&(&left_a * &ComplexMatrix::real_diagonal(&da)) * &right_a.adjoint());
                b.push(&(&left_b * &ComplexMatrix::real_diagonal(&db)) * &right_b.adjoint());
            } else {
                a.push(frame_sum(&u, &v, side, Side::First, &mut rng));
                b.push(frame_sum(&u, &v, side, Side::Second, &mut rng));
            }
        }
        let (a, b) = (element(algebra, level, a), element(algebra, level, b));
        let scale = a.operator_norm() * b.operator_norm();
        if (&b.adjoint() * &a).operator_norm() > 1e-6 * scale {
            return Ok((a, b));
        }
    }
    Err(Error::Generator("b*a vanished in every attempt".into()))
}

/// `(a, b, c)` with `b* c = 0` (orthogonal left supports of `b` and `c`),
/// hence `[a, b, c] = 0`; `a` is an unrestricted Gaussian element.
pub fn random_zero_tro_triple(
    algebra: &Algebra,
    level: usize,
    seed: u64,
) -> (Element, Element, Element) {
    let mut rng = rng_from_seed(seed);
    let sides = assign_slots(algebra, level, &mut rng);
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut c = Vec::new();
    for side in &sides {
        let d = side.len();
        a.push(gaussian_matrix(d, d, &mut rng));
        let u = random_unitary(d, &mut rng);
        let x = gaussian_matrix(d, d, &mut rng);
        let y = gaussian_matrix(d, d, &mut rng);
        let pb: Vec<f64> = side.iter().map(|&s| f64::from(s == Side::First)).collect();
        let pc: Vec<f64> = side.iter().map(|&s| f64::from(s == Side::Second)).collect();
        b.push(&(&u * &ComplexMatrix::real_diagonal(&pb)) * &x);
        c.push(&(&u * &ComplexMatrix::real_diagonal(&pc)) * &y);
    }
    (
        element(algebra, level, a),
        element(algebra, level, b),
        element(algebra, level, c),
    )
}

/// `(a, b)` with `a b = 0`: the right support of `a` is orthogonal to the
/// left support of `b`. Both are otherwise generic (not normal).
pub fn random_zero_product_pair(algebra: &Algebra, level: usize, seed: u64) -> (Element, Element) {
    let mut rng = rng_from_seed(seed);
    let sides = assign_slots(algebra, level, &mut rng);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for side in &sides {
        let d = side.len();
        let u = random_unitary(d, &mut rng);
        let x = gaussian_matrix(d, d, &mut rng);
        let y = gaussian_matrix(d, d, &mut rng);
        let pa: Vec<f64> = side.iter().map(|&s| f64::from(s == Side::First)).collect();
        let pb: Vec<f64> = side.iter().map(|&s| f64::from(s == Side::Second)).collect();
        a.push(&(&x * &ComplexMatrix::real_diagonal(&pa)) * &u.adjoint());
        b.push(&(&u * &ComplexMatrix::real_diagonal(&pb)) * &y);
    }
    (element(algebra, level, a), element(algebra, level, b))
}

/// Positive `(a, b)` with `a b = 0`, diagonal in a common unitary frame.
pub fn random_orthogonal_positive_pair(
    algebra: &Algebra,
    level: usize,
    seed: u64,
) -> (Element, Element) {
    let mut rng = rng_from_seed(seed);
    let sides = assign_slots(algebra, level, &mut rng);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for side in &sides {
        let d = side.len();
        let u = random_unitary(d, &mut rng);
        a.push(frame_sum(&u, &u, side, Side::First, &mut rng));
        b.push(frame_sum(&u, &u, side, Side::Second, &mut rng));
    }
    (element(algebra, level, a), element(algebra, level, b))
}

/// Random self-adjoint element, used where a Hermitian probe is needed.
pub fn random_self_adjoint(algebra: &Algebra, level: usize, seed: u64) -> Element {
    let mut rng = rng_from_seed(seed);
    let blocks = algebra
        .block_dims()
        .iter()
        .map(|&k| {
            let g = gaussian_matrix(k * level, k * level, &mut rng);
            (&g + &g.adjoint()).scale(C64::new(0.5, 0.0))
        })
        .collect();
    element(algebra, level, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triple::{is_orthogonal, is_right_orthogonal, tro_product};

    #[test]
    fn orthogonal_pairs_are_orthogonal() {
        let alg = Algebra::matrix(4);
        for seed in 0..1000 {
            let (a, b) = random_orthogonal_pair(&alg, 1, seed);
            assert!((&a * &b.adjoint()).operator_norm() <= 1e-12);
            assert!((&b.adjoint() * &a).operator_norm() <= 1e-12);
            assert!(is_orthogonal(&a, &b));
        }
    }

    #[test]
    fn abelian_pair_uses_complementary_summands() {
        let alg = Algebra::abelian(2);
        for seed in 0..20 {
            let (a, b) = random_orthogonal_pair(&alg, 1, seed);
            for i in 0..2 {
                let na = a.block(i).max_abs();
                let nb = b.block(i).max_abs();
                assert!(na == 0.0 || nb == 0.0);
            }
            assert!(a.operator_norm() > 0.0 && b.operator_norm() > 0.0);
        }
    }

    #[test]
    fn single_slot_gives_zero_second_element() {
        let (a, b) = random_orthogonal_pair(&Algebra::matrix(1), 1, 3);
        assert!(a.operator_norm() > 0.0);
        assert_eq!(b.operator_norm(), 0.0);
    }

    #[test]
    fn right_orthogonal_pairs() {
        let alg = Algebra::new(vec![1, 2]).unwrap();
        for seed in 0..1000 {
            let (a, b) = random_right_orthogonal_pair(&alg, 1, seed).unwrap();
            assert!(is_right_orthogonal(&a, &b));
            assert!(!is_orthogonal(&a, &b));
        }
        assert!(random_right_orthogonal_pair(&Algebra::abelian(3), 1, 0).is_err());
        assert!(random_right_orthogonal_pair(&Algebra::abelian(3), 2, 0).is_ok());
    }

    #[test]
    fn matrix_unit_right_orthogonal_example() {
        let a = Element::from_matrix(ComplexMatrix::unit(2, 2, 0, 0)).unwrap();
        let b = Element::from_matrix(ComplexMatrix::unit(2, 2, 0, 1)).unwrap();
        assert_eq!((&a * &b.adjoint()).operator_norm(), 0.0);
        assert!((&b.adjoint() * &a).operator_norm() > 0.5);
    }

    #[test]
    fn zero_tro_triples() {
        let alg = Algebra::new(vec![2, 3]).unwrap();
        for seed in 0..1000 {
            let (a, b, c) = random_zero_tro_triple(&alg, 1, seed);
            let scale = a.operator_norm() * b.operator_norm() * c.operator_norm();
            assert!(tro_product(&a, &b, &c).unwrap().operator_norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn zero_product_and_positive_pairs() {
        let alg = Algebra::new(vec![1, 3]).unwrap();
        for seed in 0..200 {
            let (a, b) = random_zero_product_pair(&alg, 2, seed);
            assert!((&a * &b).operator_norm() <= 1e-12 * a.operator_norm() * b.operator_norm());
            let (p, q) = random_orthogonal_positive_pair(&alg, 1, seed);
            assert!((&p * &q).operator_norm() <= 1e-12);
            for x in [&p, &q] {
                for blk in x.blocks() {
                    assert!(blk.hermitian_eigen().unwrap().min_eigenvalue() >= -1e-12);
                }
            }
        }
    }

    #[test]
    fn generators_are_deterministic() {
        let alg = Algebra::new(vec![2, 2]).unwrap();
        assert_eq!(
            random_orthogonal_pair(&alg, 2, 9),
            random_orthogonal_pair(&alg, 2, 9)
        );
        assert_ne!(
            random_orthogonal_pair(&alg, 2, 9),
            random_orthogonal_pair(&alg, 2, 10)
        );
    }
}
