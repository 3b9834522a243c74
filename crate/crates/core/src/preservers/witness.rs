//! Counterexamples attached to false verdicts. Each one can be replayed
//! against the map it refutes.

use serde::Serialize;

use super::checks::{pair_defect, triple_defect, PairIdentity, TripleIdentity};
use super::factorize::{factorize, FactorizationFailure, FactorizationIdentity};
use crate::algebra::Element;
use crate::maps::LinearMap;
use crate::tolerance::Tolerances;
use crate::triple::{absolute_value, tro_product, OrthogonalityDefect};
use crate::Result;

/// Which map a structural witness refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// The classified map itself.
    Map,
    /// Its supporting triple homomorphism, as recovered by `factorize`.
    Support,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A basis triple on which a triple-product identity fails.
    Triple {
        identity: TripleIdentity,
        target: Target,
        a: Element,
        b: Element,
        c: Element,
    },
    /// A basis pair on which a product identity fails.
    Pair {
        identity: PairIdentity,
        a: Element,
        b: Element,
    },
    /// `T(a*) ≠ T(a)*`.
    Symmetry { a: Element },
    /// `a ⊥ b` in `M_n(A)` while `T_n(a)` and `T_n(b)` are not orthogonal.
    OrthogonalPair {
        level: usize,
        a: Element,
        b: Element,
    },
    /// `a b* = 0` while `T(a) T(b)* ≠ 0`.
    RightOrthogonalPair { a: Element, b: Element },
    /// `[a, b, c] = 0` while `[T(a), T(b), T(c)] ≠ 0`.
    ZeroTroTriple { a: Element, b: Element, c: Element },
    /// `a b = 0` while `T(a) T(b) ≠ 0`.
    ZeroProductPair { a: Element, b: Element },
    /// Positive `a, b` with `a b = 0` while `T(a) T(b) ≠ 0`.
    OrthogonalPositivePair { a: Element, b: Element },
    /// `|T(a)| ≠ T(|a|)`.
    AbsoluteValue { a: Element },
    /// `a ≥ 0` while `T(a)` is not positive.
    NotPositive { a: Element },
    /// A Choi block with a negative eigenvalue.
    ChoiNegative {
        domain_block: usize,
        codomain_block: usize,
        min_eigenvalue: f64,
    },
    /// An identity of the weighted factorization that fails on a basis
    /// element of `M_level(A)`.
    Factorization {
        identity: FactorizationIdentity,
        level: usize,
        basis_index: usize,
        defect: f64,
    },
}

fn violates(value: f64, scale: f64) -> bool {
    !Tolerances::current().is_zero(value, scale)
}

impl Witness {
    /// Re-evaluates the witness against `t`; `true` when the violation is
    /// reproduced.
    pub fn replay(&self, t: &LinearMap) -> Result<bool> {
        Ok(match self {
            Witness::Triple {
                identity,
                target,
                a,
                b,
                c,
            } => {
                let (defect, scale) = match target {
                    Target::Map => triple_defect(t, *identity, a, b, c)?,
                    Target::Support => match factorize(t) {
                        Ok(f) => triple_defect(&f.support, *identity, a, b, c)?,
                        Err(FactorizationFailure::NotTripleHomomorphism { .. })
                            if *identity == TripleIdentity::TripleHom =>
                        {
                            return Ok(true)
                        }
                        Err(_) => return Ok(false),
                    },
                };
                violates(defect, scale)
            }
            Witness::Pair { identity, a, b } => {
                let (defect, scale) = pair_defect(t, *identity, a, b)?;
                violates(defect, scale)
            }
            Witness::Symmetry { a } => {
                let lhs = t.apply(&a.adjoint())?;
                let rhs = t.apply(a)?.adjoint();
                violates(
                    lhs.distance(&rhs),
                    lhs.operator_norm() + rhs.operator_norm(),
                )
            }
            Witness::OrthogonalPair { level, a, b } => {
                let input = OrthogonalityDefect::of(a, b);
                let tol = Tolerances::current();
                if !input.is_orthogonal(&tol) || a.level() != *level {
                    return Ok(false);
                }
                let ta = t.amplified_apply(a)?;
                let tb = t.amplified_apply(b)?;
                !OrthogonalityDefect::of(&ta, &tb).is_orthogonal(&tol)
            }
            Witness::RightOrthogonalPair { a, b } => {
                let tol = Tolerances::current();
                if !OrthogonalityDefect::of(a, b).is_right_orthogonal(&tol) {
                    return Ok(false);
                }
                let (ta, tb) = (t.apply(a)?, t.apply(b)?);
                !OrthogonalityDefect::of(&ta, &tb).is_right_orthogonal(&tol)
            }
            Witness::ZeroTroTriple { a, b, c } => {
                let input = tro_product(a, b, c)?.operator_norm();
                let in_scale = a.operator_norm() * b.operator_norm() * c.operator_norm();
                if violates(input, in_scale) {
                    return Ok(false);
                }
                let (ta, tb, tc) = (t.apply(a)?, t.apply(b)?, t.apply(c)?);
                let out = tro_product(&ta, &tb, &tc)?.operator_norm();
                violates(
                    out,
                    ta.operator_norm() * tb.operator_norm() * tc.operator_norm(),
                )
            }
            Witness::ZeroProductPair { a, b } | Witness::OrthogonalPositivePair { a, b } => {
                if violates(
                    (a * b).operator_norm(),
                    a.operator_norm() * b.operator_norm(),
                ) {
                    return Ok(false);
                }
                let (ta, tb) = (t.apply(a)?, t.apply(b)?);
                violates(
                    (&ta * &tb).operator_norm(),
                    ta.operator_norm() * tb.operator_norm(),
                )
            }
            Witness::AbsoluteValue { a } => {
                let ta = t.apply(a)?;
                let lhs = absolute_value(&ta)?;
                let rhs = t.apply(&absolute_value(a)?)?;
                violates(
                    lhs.distance(&rhs),
                    lhs.operator_norm() + rhs.operator_norm(),
                )
            }
            Witness::NotPositive { a } => !t.is_positive_at(a),
            Witness::ChoiNegative {
                domain_block,
                codomain_block,
                ..
            } => {
                let blocks = t.choi_blocks();
                let index = domain_block * t.codomain().num_blocks() + codomain_block;
                match blocks.get(index) {
                    Some(c) => {
                        let e = c.hermitian_eigen()?;
                        e.min_eigenvalue() - c.hermitian_defect()
                            < -crate::maps::CP_EIGEN_TOL * c.operator_norm().max(1.0)
                    }
                    None => false,
                }
            }
            Witness::Factorization {
                identity,
                level,
                basis_index,
                ..
            } => {
                let map = if *level == 1 {
                    t.clone()
                } else {
                    t.amplify(*level)?
                };
                match factorize(&map) {
                    Err(FactorizationFailure::IdentityViolated {
                        identity: id,
                        basis_index: idx,
                        ..
                    }) => id == *identity && idx == *basis_index,
                    Err(FactorizationFailure::NotTripleHomomorphism { .. }) => {
                        *identity == FactorizationIdentity::SupportIsTripleHomomorphism
                    }
                    _ => false,
                }
            }
        })
    }
}
