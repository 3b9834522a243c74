//! Extraction of the weighted factorization `T(a) = h r(h)* S(a) = S(a) r(h)* h`.
//!
//! With `h = T(1)` and `r = r(h)` one has `h r* = |h*|`, so on the support of
//! `r` the supporting map is `S(e) = |h*|⁺ T(e) r*r`, and `S` is set to zero
//! outside that corner. Every identity is then verified on the matrix-unit
//! basis; the first one that fails refutes orthogonality preservation.

use serde::Serialize;
use thiserror::Error as ThisError;

use super::checks::{check_triple_identity, TripleIdentity};
use super::witness::{Target, Witness};
use crate::algebra::{Element, MatrixUnit};
use crate::maps::LinearMap;
use crate::tolerance::Tolerances;
use crate::triple::{left_modulus_and_pinv, range_partial_isometry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorizationIdentity {
    /// `T(e) = h r* S(e)`.
    LeftProduct,
    /// `T(e) = S(e) r* h`.
    RightProduct,
    /// `h* S(e) = S(e*)* h`.
    WeightLeft,
    /// `h S(e*)* = S(e) h*`.
    WeightRight,
    /// `S` preserves the Jordan triple product.
    SupportIsTripleHomomorphism,
}

impl FactorizationIdentity {
    pub fn formula(self) -> &'static str {
        match self {
            FactorizationIdentity::LeftProduct => "T(e) = h r* S(e)",
            FactorizationIdentity::RightProduct => "T(e) = S(e) r* h",
            FactorizationIdentity::WeightLeft => "h* S(e) = S(e*)* h",
            FactorizationIdentity::WeightRight => "h S(e*)* = S(e) h*",
            FactorizationIdentity::SupportIsTripleHomomorphism => "S({a,b,c}) = {S a, S b, S c}",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Factorization {
    /// `T(1)`.
    pub h: Element,
    /// Range partial isometry of `h`.
    pub r: Element,
    /// Supporting triple homomorphism, zero off the `r` corner.
    pub support: LinearMap,
    /// Largest basis defect of `T(e) = h r* S(e)` and `T(e) = S(e) r* h`.
    pub residual: f64,
    /// Largest basis defect of the two weight identities.
    pub identity_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, ThisError)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum FactorizationFailure {
    #[error("identity {} fails on basis element {basis_index}: defect {defect:.3e} at scale {scale:.3e}", .identity.formula())]
    IdentityViolated {
        identity: FactorizationIdentity,
        basis_index: usize,
        defect: f64,
        scale: f64,
    },
    #[error("recovered support is not a triple homomorphism (defect {defect:.3e})")]
    NotTripleHomomorphism { witness: Witness, defect: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl FactorizationFailure {
    /// Failures that certify the map is not orthogonality preserving.
    pub fn is_certificate(&self) -> bool {
        matches!(
            self,
            FactorizationFailure::IdentityViolated { .. }
                | FactorizationFailure::NotTripleHomomorphism { .. }
        )
    }

    /// The failure as a replayable witness against the map at `level`.
    pub fn witness(&self, level: usize) -> Option<Witness> {
        match self {
            FactorizationFailure::IdentityViolated {
                identity,
                basis_index,
                defect,
                ..
            } => Some(Witness::Factorization {
                identity: *identity,
                level,
                basis_index: *basis_index,
                defect: *defect,
            }),
            FactorizationFailure::NotTripleHomomorphism { witness, defect } => {
                Some(if level == 1 {
                    witness.clone()
                } else {
                    Witness::Factorization {
                        identity: FactorizationIdentity::SupportIsTripleHomomorphism,
                        level,
                        basis_index: 0,
                        defect: *defect,
                    }
                })
            }
            _ => None,
        }
    }
}

fn numerical(e: crate::Error) -> FactorizationFailure {
    FactorizationFailure::Numerical(e.to_string())
}

pub fn factorize(t: &LinearMap) -> Result<Factorization, FactorizationFailure> {
    let tol = Tolerances::current();
    let domain = t.domain();
    let images = t.basis_images();
    let h = t.apply(&Element::unit(domain, 1)).map_err(numerical)?;
    let h_norm = h.operator_norm();
    let map_norm = images
        .iter()
        .map(Element::operator_norm)
        .fold(0.0, f64::max);
    if tol.is_zero(h_norm, map_norm) {
        if map_norm <= tol.abs {
            return Ok(Factorization {
                r: h.clone(),
                h,
                support: LinearMap::zero(domain, t.codomain()),
                residual: map_norm,
                identity_residual: 0.0,
            });
        }
        // an orthogonality preserver vanishes with T(1)
        let (basis_index, defect) =
            images
                .iter()
                .map(Element::operator_norm)
                .enumerate()
                .fold(
                    (0, 0.0),
                    |best, (j, v)| if v > best.1 { (j, v) } else { best },
                );
        return Err(FactorizationFailure::IdentityViolated {
            identity: FactorizationIdentity::LeftProduct,
            basis_index,
            defect,
            scale: defect + h_norm,
        });
    }
    let r = range_partial_isometry(&h).map_err(numerical)?;
    let (_, pinv) = left_modulus_and_pinv(&h).map_err(numerical)?;
    let right_support = &r.adjoint() * &r;
    let s_images: Vec<Element> = images
        .iter()
        .map(|te| &(&pinv * te) * &right_support)
        .collect();

    let adjoint_index: Vec<usize> = domain
        .units()
        .into_iter()
        .map(|u| {
            domain.unit_index(MatrixUnit {
                block: u.block,
                row: u.col,
                col: u.row,
            })
        })
        .collect();
    let h_star = h.adjoint();
    let r_star = r.adjoint();
    let hr = &h * &r_star;
    let rh = &r_star * &h;

    let mut residual = 0.0_f64;
    let mut identity_residual = 0.0_f64;
    let identities = [
        FactorizationIdentity::LeftProduct,
        FactorizationIdentity::RightProduct,
        FactorizationIdentity::WeightLeft,
        FactorizationIdentity::WeightRight,
    ];
    for identity in identities {
        for (j, (te, se)) in images.iter().zip(&s_images).enumerate() {
            let s_adj = &s_images[adjoint_index[j]];
            let (lhs, rhs, scale) = match identity {
                FactorizationIdentity::LeftProduct => {
                    let rhs = &hr * se;
                    (
                        te.clone(),
                        rhs,
                        te.operator_norm() + h_norm * se.operator_norm(),
                    )
                }
                FactorizationIdentity::RightProduct => {
                    let rhs = se * &rh;
                    (
                        te.clone(),
                        rhs,
                        te.operator_norm() + h_norm * se.operator_norm(),
                    )
                }
                FactorizationIdentity::WeightLeft => (
                    &h_star * se,
                    &s_adj.adjoint() * &h,
                    h_norm * (se.operator_norm() + s_adj.operator_norm()),
                ),
                FactorizationIdentity::WeightRight => (
                    &h * &s_adj.adjoint(),
                    se * &h_star,
                    h_norm * (se.operator_norm() + s_adj.operator_norm()),
                ),
                FactorizationIdentity::SupportIsTripleHomomorphism => unreachable!(),
            };
            let defect = lhs.distance(&rhs);
            if !tol.is_zero(defect, scale) {
                return Err(FactorizationFailure::IdentityViolated {
                    identity,
                    basis_index: j,
                    defect,
                    scale,
                });
            }
            match identity {
                FactorizationIdentity::LeftProduct | FactorizationIdentity::RightProduct => {
                    residual = residual.max(defect)
                }
                _ => identity_residual = identity_residual.max(defect),
            }
        }
    }

    let support = LinearMap::from_fn(domain, t.codomain(), {
        let mut it = s_images.into_iter();
        move |_| it.next().expect("one image per basis element")
    })
    .map_err(numerical)?;
    let check = check_triple_identity(&support, TripleIdentity::TripleHom, Target::Support);
    if let Some(witness) = check.witness {
        return Err(FactorizationFailure::NotTripleHomomorphism {
            witness,
            defect: check.max_defect,
        });
    }
    Ok(Factorization {
        h,
        r,
        support,
        residual,
        identity_residual,
    })
}
