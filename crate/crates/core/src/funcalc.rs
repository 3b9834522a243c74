//! Triple functional calculus of orthogonality preservers.
//!
//! For `T = h r* S` the calculus is `f(T)(a) = f(h) r* S(a)`, where `f(h)`
//! is the odd functional calculus of `h` (`f` applied to singular values).

use serde::{Deserialize, Serialize};

use crate::algebra::Element;
use crate::maps::LinearMap;
use crate::matrix::{ComplexMatrix, C64};
use crate::preservers::{is_tro_homomorphism, Factorization};
use crate::tolerance::Tolerances;
use crate::triple::{apply_scalar_function, odd_power, tro_product, ScalarFunction};
use crate::{Error, Result};

/// `f(T)` as a linear map.
pub fn op_functional_calculus(f_t: &Factorization, f: &ScalarFunction) -> Result<LinearMap> {
    let weight = &apply_scalar_function(f, &f_t.h)? * &f_t.r.adjoint();
    weighted_support(f_t, &weight)
}

fn weighted_support(f_t: &Factorization, weight: &Element) -> Result<LinearMap> {
    let images = f_t.support.basis_images();
    LinearMap::from_fn(f_t.support.domain(), f_t.support.codomain(), {
        let mut it = images.into_iter();
        move |_| weight * &it.next().expect("one image per basis element")
    })
}

/// `T(a) = h r* S(a)`, rebuilt from the factorization.
fn rebuild(f_t: &Factorization, a: &Element) -> Result<Element> {
    Ok(&(&f_t.h * &f_t.r.adjoint()) * &f_t.support.apply(a)?)
}

fn relative(lhs: &Element, rhs: &Element) -> f64 {
    let scale = lhs.operator_norm() + rhs.operator_norm();
    if scale == 0.0 {
        0.0
    } else {
        lhs.distance(rhs) / scale
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResiduals {
    /// Exponent `2k - 1`.
    pub exponent: u32,
    /// `h* T(a)^[2k-1]` against `(T(a*)^[2k-1])* h`.
    pub weight_left: f64,
    /// `h (T(a*)^[2k-1])*` against `T(a)^[2k-1] h*`.
    pub weight_right: f64,
    /// `h^[2k-1] r* S(a^[2k-1])` against `T(a)^[2k-1]`.
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuncalcIdentityReport {
    pub depth: u32,
    pub levels: Vec<IdentityResiduals>,
    /// Largest relative residual over all levels and identities.
    pub max_residual: f64,
}

/// Evaluates the weight and power identities for `k = 1..=depth`. Residuals
/// are relative to `‖lhs‖ + ‖rhs‖`.
pub fn verify_funcalc_identities(
    f_t: &Factorization,
    a: &Element,
    depth: u32,
) -> Result<FuncalcIdentityReport> {
    let h = &f_t.h;
    let h_star = h.adjoint();
    let ta = rebuild(f_t, a)?;
    let ta_adj = rebuild(f_t, &a.adjoint())?;
    let mut levels = Vec::new();
    for k in 1..=depth {
        let e = 2 * k - 1;
        let p = odd_power(&ta, e)?;
        let q = odd_power(&ta_adj, e)?.adjoint();
        let weight_left = relative(&(&h_star * &p), &(&q * h));
        let weight_right = relative(&(h * &q), &(&p * &h_star));
        let lhs =
            &(&odd_power(h, e)? * &f_t.r.adjoint()) * &f_t.support.apply(&odd_power(a, e)?)?;
        let power = relative(&lhs, &p);
        levels.push(IdentityResiduals {
            exponent: e,
            weight_left,
            weight_right,
            power,
        });
    }
    let max_residual = levels
        .iter()
        .flat_map(|l| [l.weight_left, l.weight_right, l.power])
        .fold(0.0, f64::max);
    Ok(FuncalcIdentityReport {
        depth,
        levels,
        max_residual,
    })
}

/// Relative residual of `[f1(T)a, f2(T)b, f3(T)c] = (f1 f2* f3)(T)([a,b,c])`.
///
/// Requires the supporting map to be a TRO homomorphism.
#[allow(clippy::too_many_arguments)]
pub fn verify_tro_product_identity(
    f_t: &Factorization,
    f1: &ScalarFunction,
    f2: &ScalarFunction,
    f3: &ScalarFunction,
    a: &Element,
    b: &Element,
    c: &Element,
) -> Result<f64> {
    if !is_tro_homomorphism(&f_t.support).holds {
        return Err(Error::NotTroHomomorphism);
    }
    let apply = |f: &ScalarFunction, x: &Element| -> Result<Element> {
        let w = &apply_scalar_function(f, &f_t.h)? * &f_t.r.adjoint();
        Ok(&w * &f_t.support.apply(x)?)
    };
    let lhs = tro_product(&apply(f1, a)?, &apply(f2, b)?, &apply(f3, c)?)?;
    let rhs = apply(
        &ScalarFunction::triple_product(f1, f2, f3),
        &tro_product(a, b, c)?,
    )?;
    Ok(relative(&lhs, &rhs))
}

/// `f(T) = f(h) J` for a symmetric orthogonality preserver with self-adjoint
/// `h`, where `J = r* S` and `f` is applied to the eigenvalues of `h`.
/// Eigenvalues within `rank · ‖h‖` of zero are sent to zero.
pub fn symmetric_functional_calculus(t: &LinearMap, f: &ScalarFunction) -> Result<LinearMap> {
    if !t.is_symmetric() {
        return Err(Error::InvalidInput("map is not symmetric".into()));
    }
    let f_t = crate::preservers::factorize(t).map_err(|e| {
        Error::InvalidInput(format!(
            "map does not factor as a weighted triple homomorphism: {e}"
        ))
    })?;
    let tol = Tolerances::current();
    let h = &f_t.h;
    let h_norm = h.operator_norm();
    let defect = h.distance(&h.adjoint());
    if !tol.is_zero(defect, h_norm) {
        return Err(Error::NotSelfAdjoint { defect });
    }
    let cutoff = tol.rank * h_norm;
    let mut blocks = Vec::with_capacity(h.blocks().len());
    for block in h.blocks() {
        let eig = block.hermitian_eigen()?;
        let mut values = Vec::with_capacity(eig.eigenvalues.len());
        for &l in &eig.eigenvalues {
            if l.abs() <= cutoff {
                values.push(C64::new(0.0, 0.0));
                continue;
            }
            let v = f.eval(l);
            if !tol.is_zero(v.im.abs(), v.norm()) {
                return Err(Error::InvalidInput(format!(
                    "`{}` is not real at the eigenvalue {l} of T(1)",
                    f.label()
                )));
            }
            values.push(C64::new(v.re, 0.0));
        }
        let w = &eig.eigenvectors;
        blocks.push(&(w * &ComplexMatrix::diagonal(&values)) * &w.adjoint());
    }
    let weight = Element::new(h.algebra().clone(), 1, blocks)?;
    let weight = &weight * &f_t.r.adjoint();
    weighted_support(&f_t, &weight)
}

/// One term `f ⊗ a` of a finite tensor.
#[derive(Debug, Clone)]
pub struct TensorTerm {
    pub f: ScalarFunction,
    pub a: Element,
}

/// A finite sum `Σ fᵢ ⊗ aᵢ`. In JSON each `f` is a preset string understood
/// by [`ScalarFunction::parse`].
#[derive(Debug, Clone, Default)]
pub struct FiniteTensor {
    pub terms: Vec<TensorTerm>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermJson {
    f: String,
    a: Element,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorJson {
    terms: Vec<TermJson>,
}

impl Serialize for FiniteTensor {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        TensorJson {
            terms: self
                .terms
                .iter()
                .map(|t| TermJson {
                    f: t.f.label().to_string(),
                    a: t.a.clone(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FiniteTensor {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = TensorJson::deserialize(deserializer)?;
        let terms = raw
            .terms
            .into_iter()
            .enumerate()
            .map(|(i, t)| {
                let f = ScalarFunction::parse(&t.f)
                    .map_err(|e| D::Error::custom(format!("terms[{i}].f: {e}")))?;
                if t.a.level() != 1 {
                    return Err(D::Error::custom(format!(
                        "terms[{i}].a: expected level 1, got {}",
                        t.a.level()
                    )));
                }
                Ok(TensorTerm { f, a: t.a })
            })
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        Ok(FiniteTensor { terms })
    }
}

impl FiniteTensor {
    pub fn single(f: ScalarFunction, a: Element) -> Self {
        Self {
            terms: vec![TensorTerm { f, a }],
        }
    }
}

/// `Φ_T(Σ fᵢ ⊗ aᵢ) = Σ fᵢ(T)(aᵢ)` for a contractive `T`.
pub fn evaluate_phi(f_t: &Factorization, tensor: &FiniteTensor) -> Result<Element> {
    let tol = Tolerances::current();
    let norm = f_t.h.operator_norm();
    if norm > 1.0 + tol.threshold(1.0) {
        return Err(Error::NotContractive { norm });
    }
    let codomain = f_t.support.codomain();
    let r_star = f_t.r.adjoint();
    let mut sum = Element::zero(codomain, 1);
    for term in &tensor.terms {
        let w = &apply_scalar_function(&term.f, &f_t.h)? * &r_star;
        sum = &sum + &(&w * &f_t.support.apply(&term.a)?);
    }
    Ok(sum)
}

/// Orthonormal basis of the sub-TRO generated by the range of a map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TroClosure {
    pub basis: Vec<Element>,
    /// Dimension after each round, starting with the span of the range.
    pub dimensions: Vec<usize>,
    pub rounds: usize,
}

impl TroClosure {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

/// Gram-Schmidt accumulator over coordinate vectors.
struct Span {
    vectors: Vec<Vec<C64>>,
    cutoff_rel: f64,
}

impl Span {
    /// Adds `v` if its component orthogonal to the span exceeds
    /// `cutoff_rel · scale`; orthogonalizes twice.
    fn push(&mut self, mut v: Vec<C64>, scale: f64) -> bool {
        for _ in 0..2 {
            for q in &self.vectors {
                let c: C64 = q.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= self.cutoff_rel * scale || norm == 0.0 {
            return false;
        }
        for z in &mut v {
            *z /= norm;
        }
        self.vectors.push(v);
        true
    }
}

/// Closes `span T(A)` under `[·,·,·]`: each round adds every bracket of
/// current basis vectors that involves at least one vector added in the
/// previous round. Fails if the dimension still grows after `max_rounds`.
pub fn tro_closure_of_range(t: &LinearMap, max_rounds: usize) -> Result<TroClosure> {
    let tol = Tolerances::current();
    let codomain = t.codomain();
    let images = t.basis_images();
    let range_scale = images
        .iter()
        .map(|x| {
            x.coordinates()
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);
    let mut span = Span {
        vectors: Vec::new(),
        cutoff_rel: tol.span,
    };
    for x in &images {
        span.push(x.coordinates(), range_scale);
    }
    let to_element =
        |v: &Vec<C64>| Element::from_coordinates(codomain, 1, v).expect("codomain coordinates");
    let mut basis: Vec<Element> = span.vectors.iter().map(to_element).collect();
    let mut dimensions = vec![basis.len()];
    let mut fresh_from = 0;
    let mut rounds = 0;
    while fresh_from < basis.len() {
        if rounds == max_rounds {
            return Err(Error::ClosureNotStable {
                rounds,
                previous: fresh_from,
                current: basis.len(),
            });
        }
        rounds += 1;
        let n = basis.len();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i < fresh_from && j < fresh_from && k < fresh_from {
                        continue;
                    }
                    let p = tro_product(&basis[i], &basis[j], &basis[k])?;
                    span.push(p.coordinates(), 1.0);
                }
            }
        }
        fresh_from = n;
        basis.extend(span.vectors[n..].iter().map(to_element));
        dimensions.push(basis.len());
    }
    Ok(TroClosure {
        basis,
        dimensions,
        rounds,
    })
}
