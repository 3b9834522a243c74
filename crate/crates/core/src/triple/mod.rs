//! The ternary calculus: TRO and Jordan triple products, orthogonality,
//! odd powers, the triple spectrum and the singular-value functional calculus.

mod function;
pub mod generators;

pub use function::ScalarFunction;
pub use generators::{
    random_orthogonal_pair, random_orthogonal_positive_pair, random_right_orthogonal_pair,
    random_self_adjoint, random_zero_product_pair, random_zero_tro_triple,
};

use serde::{Deserialize, Serialize};

use crate::algebra::Element;
use crate::matrix::{ComplexMatrix, C64};
use crate::tolerance::Tolerances;
use crate::{Error, Result};

/// `[a, b, c] = a b* c`.
pub fn tro_product(a: &Element, b: &Element, c: &Element) -> Result<Element> {
    a.check_same_space(b)?;
    a.check_same_space(c)?;
    Ok(&(a * &b.adjoint()) * c)
}

/// `{a, b, c} = (a b* c + c b* a) / 2`.
pub fn jordan_triple_product(a: &Element, b: &Element, c: &Element) -> Result<Element> {
    let abc = tro_product(a, b, c)?;
    let cba = tro_product(c, b, a)?;
    Ok((&abc + &cba).scale_real(0.5))
}

/// Norms of `a b*` and `b* a` next to the scale `‖a‖‖b‖` they are judged against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityDefect {
    pub right: f64,
    pub left: f64,
    pub scale: f64,
}

impl OrthogonalityDefect {
    pub fn of(a: &Element, b: &Element) -> Self {
        let right = (a * &b.adjoint()).operator_norm();
        let left = (&b.adjoint() * a).operator_norm();
        Self {
            right,
            left,
            scale: a.operator_norm() * b.operator_norm(),
        }
    }

    pub fn is_orthogonal(&self, tol: &Tolerances) -> bool {
        tol.is_zero(self.right, self.scale) && tol.is_zero(self.left, self.scale)
    }

    pub fn is_right_orthogonal(&self, tol: &Tolerances) -> bool {
        tol.is_zero(self.right, self.scale)
    }
}

/// `a ⊥ b`, i.e. `a b* = b* a = 0` up to the scale-relative tolerance.
///
/// Panics when `a` and `b` live in different spaces.
pub fn is_orthogonal(a: &Element, b: &Element) -> bool {
    OrthogonalityDefect::of(a, b).is_orthogonal(&Tolerances::current())
}

/// `a b* = 0`. Equivalent to `[a, b, b] = 0`.
pub fn is_right_orthogonal(a: &Element, b: &Element) -> bool {
    OrthogonalityDefect::of(a, b).is_right_orthogonal(&Tolerances::current())
}

/// `a^[k]` for odd `k`, through `a^[1] = a`, `a^[k] = [a, a, a^[k-2]]`.
pub fn odd_power(a: &Element, k: u32) -> Result<Element> {
    if k.is_multiple_of(2) {
        return Err(Error::EvenExponent(k));
    }
    let aa = a * &a.adjoint();
    let mut p = a.clone();
    for _ in 0..(k / 2) {
        p = &aa * &p;
    }
    Ok(p)
}

/// Distinct nonzero singular values of an element, pooled over blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleSpectrum {
    /// Increasing, all in `(0, max_point]`.
    pub points: Vec<f64>,
    /// `‖a‖`.
    pub max_point: f64,
}

impl TripleSpectrum {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Per-block thin SVDs of an element, with the element-wide cutoff below
/// which singular values count as zero.
struct BlockSvds {
    svds: Vec<crate::matrix::SvdResult>,
    cutoff: f64,
}

fn block_svds(a: &Element, tol: &Tolerances) -> Result<BlockSvds> {
    let svds = a
        .blocks()
        .iter()
        .map(|b| b.svd())
        .collect::<Result<Vec<_>>>()?;
    let sigma_max = svds
        .iter()
        .map(|s| s.max_singular_value())
        .fold(0.0, f64::max);
    Ok(BlockSvds {
        svds,
        cutoff: tol.rank * sigma_max,
    })
}

impl BlockSvds {
    fn apply(&self, a: &Element, f: impl Fn(f64) -> C64) -> Element {
        let cutoff = self.cutoff;
        let blocks: Vec<ComplexMatrix> = self
            .svds
            .iter()
            .map(|s| {
                s.recompose_with(|sigma| {
                    if sigma > cutoff {
                        f(sigma)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
            })
            .collect();
        Element::new(a.algebra().clone(), a.level(), blocks).expect("same shapes as input")
    }
}

pub fn triple_spectrum(a: &Element) -> Result<TripleSpectrum> {
    let tol = Tolerances::current();
    let svds = block_svds(a, &tol)?;
    let mut values: Vec<f64> = svds
        .svds
        .iter()
        .flat_map(|s| s.singular_values.iter().copied())
        .filter(|&s| s > svds.cutoff && s > 0.0)
        .collect();
    values.sort_by(|x, y| x.partial_cmp(y).expect("finite singular values"));
    let max_point = values.last().copied().unwrap_or(0.0);
    let merge = tol.span * max_point;
    let mut points: Vec<f64> = Vec::new();
    for v in values {
        match points.last_mut() {
            // keep the larger representative so that ‖a‖ stays a point
            Some(last) if v - *last <= merge => *last = v,
            _ => points.push(v),
        }
    }
    Ok(TripleSpectrum { points, max_point })
}

/// `f(a) = U f(Σ) V*` blockwise; singular values at or below the rank cutoff
/// are mapped to `f(0) = 0`.
pub fn apply_scalar_function(f: &ScalarFunction, a: &Element) -> Result<Element> {
    let tol = Tolerances::current();
    let svds = block_svds(a, &tol)?;
    Ok(svds.apply(a, |s| f.eval(s)))
}

/// The partial isometry `U P V*` keeping singular directions above the cutoff.
pub fn range_partial_isometry(a: &Element) -> Result<Element> {
    let tol = Tolerances::current();
    let svds = block_svds(a, &tol)?;
    Ok(svds.apply(a, |_| C64::new(1.0, 0.0)))
}

/// `|a*| = (a a*)^{1/2}` and its pseudo-inverse, both from the same SVD.
pub(crate) fn left_modulus_and_pinv(a: &Element) -> Result<(Element, Element)> {
    let tol = Tolerances::current();
    let svds = block_svds(a, &tol)?;
    let cutoff = svds.cutoff;
    let mut modulus = Vec::new();
    let mut pinv = Vec::new();
    for s in &svds.svds {
        let u = &s.left_vectors;
        let scaled = |g: &dyn Fn(f64) -> f64| {
            let d: Vec<f64> = s
                .singular_values
                .iter()
                .map(|&x| if x > cutoff { g(x) } else { 0.0 })
                .collect();
            &(u * &ComplexMatrix::real_diagonal(&d)) * &u.adjoint()
        };
        modulus.push(scaled(&|x| x));
        pinv.push(scaled(&|x| 1.0 / x));
    }
    Ok((
        Element::new(a.algebra().clone(), a.level(), modulus)?,
        Element::new(a.algebra().clone(), a.level(), pinv)?,
    ))
}

/// `|a| = (a* a)^{1/2}`.
pub fn absolute_value(a: &Element) -> Result<Element> {
    let blocks = a
        .blocks()
        .iter()
        .map(|b| {
            let s = b.svd()?;
            let v = &s.right_vectors;
            Ok(&(v * &ComplexMatrix::real_diagonal(&s.singular_values)) * &v.adjoint())
        })
        .collect::<Result<Vec<_>>>()?;
    Element::new(a.algebra().clone(), a.level(), blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::rng::{random_element, rng_from_seed};

    fn e(k: usize, i: usize, j: usize) -> Element {
        Element::from_matrix(ComplexMatrix::unit(k, k, i, j)).unwrap()
    }

    fn diag(values: &[f64]) -> Element {
        Element::from_matrix(ComplexMatrix::real_diagonal(values)).unwrap()
    }

    #[test]
    fn projection_is_fixed_by_tro_product() {
        let p = e(2, 0, 0);
        assert_eq!(tro_product(&p, &p, &p).unwrap(), p);
        assert_eq!(jordan_triple_product(&p, &p, &p).unwrap(), p);
    }

    #[test]
    fn zero_tro_product_example() {
        let a = e(2, 0, 0);
        let b = e(2, 1, 0);
        assert!(tro_product(&a, &a, &b).unwrap().operator_norm() == 0.0);
    }

    #[test]
    fn tro_product_matches_direct_evaluation() {
        let mut rng = rng_from_seed(1);
        let alg = Algebra::new(vec![2, 3]).unwrap();
        let (a, b, c) = (
            random_element(&alg, 1, &mut rng),
            random_element(&alg, 1, &mut rng),
            random_element(&alg, 1, &mut rng),
        );
        let t = tro_product(&a, &b, &c).unwrap();
        for i in 0..2 {
            let direct = &(a.block(i) * &b.block(i).adjoint()) * c.block(i);
            assert!((&direct - t.block(i)).max_abs() < 1e-13);
        }
        let j = jordan_triple_product(&a, &b, &c).unwrap();
        let j2 = jordan_triple_product(&c, &b, &a).unwrap();
        assert!(j.distance(&j2) < 1e-13);
        let formula = (&t + &tro_product(&c, &b, &a).unwrap()).scale_real(0.5);
        assert!(j.distance(&formula) < 1e-13);
    }

    #[test]
    fn mismatched_triple_is_rejected() {
        let a = e(2, 0, 0);
        let b = e(3, 0, 0);
        assert!(tro_product(&a, &a, &b).is_err());
    }

    #[test]
    fn orthogonality_of_matrix_units() {
        assert!(is_orthogonal(&e(2, 0, 0), &e(2, 1, 1)));
        // e11 e12* = e11 e21 = 0 but e12* e11 = e21 ≠ 0
        assert!(!is_orthogonal(&e(2, 0, 0), &e(2, 0, 1)));
        assert!(is_right_orthogonal(&e(2, 0, 0), &e(2, 0, 1)));
        let z = Element::zero(&Algebra::matrix(2), 1);
        assert!(is_right_orthogonal(&e(2, 0, 1), &z));
    }

    #[test]
    fn odd_powers() {
        let a = diag(&[2.0, 1.0]);
        assert_eq!(odd_power(&a, 1).unwrap(), a);
        assert!(odd_power(&a, 3).unwrap().distance(&diag(&[8.0, 1.0])) < 1e-14);
        assert!(matches!(odd_power(&a, 4), Err(Error::EvenExponent(4))));
    }

    #[test]
    fn fifth_power_matches_nested_brackets() {
        let mut rng = rng_from_seed(2);
        let a = random_element(&Algebra::matrix(3), 1, &mut rng);
        let a3 = tro_product(&a, &a, &a).unwrap();
        let nested = tro_product(&a, &a, &a3).unwrap();
        let p5 = odd_power(&a, 5).unwrap();
        assert!(p5.distance(&nested) <= 1e-12 * nested.operator_norm());
        let via_svd = apply_scalar_function(&ScalarFunction::power(5.0).unwrap(), &a).unwrap();
        assert!(p5.distance(&via_svd) <= 1e-10 * nested.operator_norm());
    }

    #[test]
    fn spectrum_examples() {
        let zero = Element::zero(&Algebra::matrix(3), 1);
        assert!(triple_spectrum(&zero).unwrap().is_empty());
        let s = triple_spectrum(&diag(&[2.0, 1.0, 1.0])).unwrap();
        assert_eq!(s.points.len(), 2);
        assert!((s.points[0] - 1.0).abs() < 1e-14 && (s.points[1] - 2.0).abs() < 1e-14);
        let mut rng = rng_from_seed(3);
        let a = random_element(&Algebra::new(vec![2, 3]).unwrap(), 1, &mut rng);
        let s = triple_spectrum(&a).unwrap();
        assert!((s.max_point - a.operator_norm()).abs() <= 1e-10 * a.operator_norm());
        assert!(s.points.iter().all(|&p| p > 0.0 && p <= s.max_point));
    }

    #[test]
    fn identity_function_returns_input() {
        let mut rng = rng_from_seed(4);
        let a = random_element(&Algebra::matrix(4), 1, &mut rng);
        let fa = apply_scalar_function(&ScalarFunction::identity(), &a).unwrap();
        assert!(fa.distance(&a) <= 1e-12 * a.operator_norm());
    }

    #[test]
    fn cube_matches_recursion_and_cuberoot_inverts() {
        let mut rng = rng_from_seed(5);
        let a = random_element(&Algebra::new(vec![1, 3]).unwrap(), 1, &mut rng);
        let cubed = apply_scalar_function(&ScalarFunction::cube(), &a).unwrap();
        let a3 = odd_power(&a, 3).unwrap();
        assert!(cubed.distance(&a3) <= 1e-11 * a3.operator_norm());
        let b = apply_scalar_function(&ScalarFunction::cuberoot(), &a).unwrap();
        let bbb = tro_product(&b, &b, &b).unwrap();
        assert!(bbb.distance(&a) <= 1e-11 * a.operator_norm());
    }

    #[test]
    fn range_partial_isometry_examples() {
        let u =
            Element::from_matrix(ComplexMatrix::from_real(2, 2, &[0.0, 1.0, -1.0, 0.0])).unwrap();
        assert!(range_partial_isometry(&u).unwrap().distance(&u) < 1e-14);
        let r = range_partial_isometry(&diag(&[3.0, 0.0])).unwrap();
        assert!(r.distance(&diag(&[1.0, 0.0])) < 1e-14);
    }

    #[test]
    fn range_partial_isometry_support_relations() {
        let mut rng = rng_from_seed(6);
        let a = random_element(&Algebra::new(vec![2, 2]).unwrap(), 2, &mut rng);
        let r = range_partial_isometry(&a).unwrap();
        let rrr = tro_product(&r, &r, &r).unwrap();
        assert!(rrr.distance(&r) <= 1e-10);
        let left = &(&r * &r.adjoint()) * &a;
        let right = &(&a * &r.adjoint()) * &r;
        assert!(left.distance(&a) <= 1e-8 * a.operator_norm());
        assert!(right.distance(&a) <= 1e-8 * a.operator_norm());
    }

    #[test]
    fn absolute_value_squares_to_gram() {
        let mut rng = rng_from_seed(7);
        let a = random_element(&Algebra::matrix(3), 1, &mut rng);
        let m = absolute_value(&a).unwrap();
        assert!((&m * &m).distance(&(&a.adjoint() * &a)) < 1e-12 * a.operator_norm().powi(2));
    }
}
