//! Lower bounds for `‖T_n‖` by alternating maximization.
//!
//! The objective is `Re⟨ξ, T_n(x) η⟩` over unit vectors `ξ, η` and the unit
//! ball of `M_n(A)`. For fixed `x` the best pair is the top singular pair of
//! `T_n(x)`. For fixed `(ξ, η)` the objective equals `Re⟨Φ, x⟩` with
//! `Φ = (T^†)_n(ξη*)`, maximized by the blockwise polar part of `Φ` with value
//! the sum of the blocks' trace norms. Each half-step can only increase the
//! objective, and every iterate is a valid witness.

use rayon::prelude::*;
use serde::Serialize;

use super::LinearMap;
use crate::algebra::Element;
use crate::matrix::{ComplexMatrix, C64};
use crate::rng::{derive_seed, random_unit_element, rng_from_seed};
use crate::tolerance::Tolerances;
use crate::{Error, Result};

const MAX_ITERATIONS: usize = 500;
const MIN_IMPROVEMENT: f64 = 1e-10;

/// A certified lower bound `‖T_n(witness)‖ ≤ ‖T_n‖` with `‖witness‖ ≤ 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormEstimate {
    pub level: usize,
    pub lower_bound: f64,
    pub witness: Element,
    /// Iterations of the run that produced the witness.
    pub iterations: usize,
    pub restarts: usize,
    pub converged: bool,
}

struct Run {
    witness: Element,
    value: f64,
    iterations: usize,
    converged: bool,
}

/// Top singular triple over all blocks of `y`: `(block, σ, ξ, η)`.
fn top_singular_pair(y: &Element) -> Result<Option<(usize, f64, ComplexMatrix, ComplexMatrix)>> {
    let mut best: Option<(usize, f64, ComplexMatrix, ComplexMatrix)> = None;
    for (j, b) in y.blocks().iter().enumerate() {
        let s = b.svd()?;
        let sigma = s.max_singular_value();
        if sigma > 0.0 && best.as_ref().is_none_or(|(_, bs, _, _)| sigma > *bs) {
            let d = b.rows();
            let xi = s.left_vectors.block(0, 0, d, 1);
            let eta = s.right_vectors.block(0, 0, d, 1);
            best = Some((j, sigma, xi, eta));
        }
    }
    Ok(best)
}

/// Blockwise `U V*` of `phi`, dropping directions below the rank cutoff.
fn polar_part(phi: &Element) -> Result<Element> {
    let tol = Tolerances::current();
    let svds = phi
        .blocks()
        .iter()
        .map(|b| b.svd())
        .collect::<Result<Vec<_>>>()?;
    let sigma_max = svds
        .iter()
        .map(|s| s.max_singular_value())
        .fold(0.0, f64::max);
    let cutoff = tol.rank * sigma_max;
    let blocks = svds
        .iter()
        .map(|s| {
            s.recompose_with(|x| {
                if x > cutoff {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        })
        .collect();
    Element::new(phi.algebra().clone(), phi.level(), blocks)
}

fn run(t: &LinearMap, t_dagger: &LinearMap, start: Element) -> Result<Run> {
    let mut x = start;
    let mut best = Run {
        value: t.amplified_apply(&x)?.operator_norm(),
        witness: x.clone(),
        iterations: 0,
        converged: false,
    };
    let mut previous = f64::NEG_INFINITY;
    for it in 1..=MAX_ITERATIONS {
        let y = t.amplified_apply(&x)?;
        let Some((j, sigma, xi, eta)) = top_singular_pair(&y)? else {
            best.converged = true;
            break;
        };
        if sigma > best.value {
            best.value = sigma;
            best.witness = x.clone();
        }
        best.iterations = it;
        if sigma - previous < MIN_IMPROVEMENT {
            best.converged = true;
            break;
        }
        previous = sigma;
        let mut w = Element::zero(t.codomain(), x.level()).into_blocks();
        w[j] = &xi * &eta.adjoint();
        let w = Element::new(t.codomain().clone(), x.level(), w)?;
        let phi = t_dagger.amplified_apply(&w)?;
        if phi.operator_norm() == 0.0 {
            best.converged = true;
            break;
        }
        x = polar_part(&phi)?;
    }
    Ok(best)
}

/// Pads an element of `M_m(A)` to `M_n(A)`, `n ≥ m`, with zeros.
fn embed_corner(x: &Element, n: usize) -> Result<Element> {
    let m = x.level();
    let blocks = x
        .blocks()
        .iter()
        .zip(x.algebra().block_dims())
        .map(|(b, &k)| {
            let d = m * k;
            ComplexMatrix::from_fn(n * k, n * k, |r, c| {
                if r < d && c < d {
                    b.get(r, c)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        })
        .collect();
    Element::new(x.algebra().clone(), n, blocks)
}

/// Best of `restarts` seeded runs at level `n`.
pub fn estimate_amplified_norm(
    t: &LinearMap,
    n: usize,
    restarts: usize,
    seed: u64,
) -> Result<NormEstimate> {
    estimate_amplified_norm_from(t, n, restarts, seed, None)
}

/// As [`estimate_amplified_norm`], with an additional run started from
/// `start` (an element of `M_m(A)` for some `m ≤ n`, padded with zeros).
pub fn estimate_amplified_norm_from(
    t: &LinearMap,
    n: usize,
    restarts: usize,
    seed: u64,
    start: Option<&Element>,
) -> Result<NormEstimate> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "amplification level must be >= 1".into(),
        ));
    }
    if restarts == 0 && start.is_none() {
        return Err(Error::InvalidInput(
            "at least one restart is required".into(),
        ));
    }
    let mut starts = Vec::with_capacity(restarts + 1);
    if let Some(s) = start {
        if s.algebra() != t.domain() || s.level() > n {
            return Err(Error::AlgebraMismatch(
                "warm start does not fit the amplified domain".into(),
            ));
        }
        let padded = embed_corner(s, n)?;
        let norm = padded.operator_norm();
        starts.push(if norm > 1.0 {
            padded.scale_real(1.0 / norm)
        } else {
            padded
        });
    }
    // ‖T‖ = ‖T(1)‖ for orthogonality preservers, so the unit is always tried.
    starts.push(Element::unit(t.domain(), n));
    for r in 0..restarts {
        let mut rng = rng_from_seed(derive_seed(seed, r as u64));
        starts.push(random_unit_element(t.domain(), n, &mut rng));
    }
    let t_dagger = t.hs_adjoint();
    let runs = starts
        .into_par_iter()
        .map(|s| run(t, &t_dagger, s))
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value > runs[best].value {
            best = i;
        }
    }
    let winner = runs.into_iter().nth(best).expect("at least one run");
    let lower_bound = t.amplified_apply(&winner.witness)?.operator_norm();
    Ok(NormEstimate {
        level: n,
        lower_bound,
        witness: winner.witness,
        iterations: winner.iterations,
        restarts,
        converged: winner.converged,
    })
}

/// Estimates for `n = 1..=n_max`; each level also starts from the previous
/// level's witness, so the bounds are nondecreasing in `n`.
pub fn norm_table(
    t: &LinearMap,
    n_max: usize,
    restarts: usize,
    seed: u64,
) -> Result<Vec<NormEstimate>> {
    let mut out: Vec<NormEstimate> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let start = out.last().map(|e| e.witness.clone());
        out.push(estimate_amplified_norm_from(
            t,
            n,
            restarts,
            derive_seed(seed, 1000 + n as u64),
            start.as_ref(),
        )?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;

    #[test]
    fn identity_is_isometric() {
        let id = LinearMap::identity(&Algebra::new(vec![1, 2]).unwrap());
        for n in 1..=3 {
            let e = estimate_amplified_norm(&id, n, 4, 1).unwrap();
            assert!(
                (e.lower_bound - 1.0).abs() < 1e-9,
                "n={n}: {}",
                e.lower_bound
            );
        }
    }

    #[test]
    fn transpose_of_two_by_two_at_level_two() {
        let t = LinearMap::make_transpose(2).unwrap();
        let e = estimate_amplified_norm(&t, 2, 20, 7).unwrap();
        assert!((e.lower_bound - 2.0).abs() < 1e-3, "{}", e.lower_bound);
        assert!(e.witness.operator_norm() <= 1.0 + 1e-12);
        let replay = t.amplified_apply(&e.witness).unwrap().operator_norm();
        assert!((replay - e.lower_bound).abs() <= 1e-10);
    }

    #[test]
    fn zero_map_gives_zero() {
        let alg = Algebra::matrix(2);
        let e = estimate_amplified_norm(&LinearMap::zero(&alg, &alg), 2, 3, 0).unwrap();
        assert_eq!(e.lower_bound, 0.0);
        assert!(estimate_amplified_norm(&LinearMap::zero(&alg, &alg), 0, 3, 0).is_err());
    }

    #[test]
    fn table_is_monotone() {
        let alg = Algebra::matrix(2);
        let mut rng = rng_from_seed(3);
        let t = LinearMap::new(
            alg.clone(),
            alg,
            crate::rng::gaussian_matrix(4, 4, &mut rng),
        )
        .unwrap();
        let table = norm_table(&t, 4, 5, 11).unwrap();
        for w in table.windows(2) {
            assert!(w[1].lower_bound >= w[0].lower_bound - 1e-12);
        }
    }
}
