//! Splitting a triple homomorphism into a TRO homomorphism and a TRO
//! anti-homomorphism with orthogonal ranges.
//!
//! `J = r* S` with `r = S(1)` is a Jordan *-homomorphism. Its multiplicative
//! defects `J(ee') - J(e)J(e')` live where `J` acts anti-multiplicatively, so
//! the projection `z` onto the smallest `J(A)`-invariant subspace containing
//! their ranges separates the two parts: `φ = r(1-z)J`, `ψ = r z J`.

use serde::Serialize;

use super::checks::{is_triple_homomorphism, is_tro_anti_homomorphism, is_tro_homomorphism};
use crate::algebra::Element;
use crate::maps::LinearMap;
use crate::matrix::ComplexMatrix;
use crate::tolerance::Tolerances;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TripleDecomposition {
    /// TRO-homomorphism summand.
    pub hom: LinearMap,
    /// TRO-anti-homomorphism summand.
    pub anti: LinearMap,
    /// Splitting projection, one block per codomain block.
    pub projection: Element,
    /// Largest `‖φ(e)ψ(e')*‖` and `‖φ(e)*ψ(e')‖` over basis pairs.
    pub orthogonality_defect: f64,
}

/// Orthonormal basis of the column span of `m`, cutting at `span · σ_max`.
fn column_basis(m: &ComplexMatrix, span: f64) -> Result<ComplexMatrix> {
    if m.cols() == 0 || m.max_abs() == 0.0 {
        return Ok(ComplexMatrix::zeros(m.rows(), 0));
    }
    let svd = m.svd()?;
    let cut = span * svd.max_singular_value();
    let rank = svd.singular_values.iter().filter(|s| **s > cut).count();
    Ok(svd.left_vectors.block(0, 0, m.rows(), rank))
}

fn hcat(parts: &[ComplexMatrix], rows: usize) -> ComplexMatrix {
    let cols: usize = parts.iter().map(ComplexMatrix::cols).sum();
    let mut out = ComplexMatrix::zeros(rows, cols).into_dmatrix();
    let mut at = 0;
    for p in parts {
        out.view_mut((0, at), (rows, p.cols()))
            .copy_from(p.as_dmatrix());
        at += p.cols();
    }
    ComplexMatrix::from_dmatrix(out)
}

pub fn decompose_triple_hom(s: &LinearMap) -> Result<TripleDecomposition> {
    if !is_triple_homomorphism(s).holds {
        return Err(Error::NotTripleHomomorphism);
    }
    let tol = Tolerances::current();
    let domain = s.domain();
    let codomain = s.codomain();
    let r = s.apply(&Element::unit(domain, 1))?;
    let r_star = r.adjoint();
    let j: Vec<Element> = s.basis_images().iter().map(|x| &r_star * x).collect();
    let units = domain.units();

    // defects on basis pairs; products of matrix units are units or zero
    let mut defects: Vec<Element> = Vec::new();
    for (p, u) in units.iter().enumerate() {
        for (q, v) in units.iter().enumerate() {
            let jj = &j[p] * &j[q];
            let d = if u.block == v.block && u.col == v.row {
                let idx = domain.unit_index(crate::algebra::MatrixUnit {
                    block: u.block,
                    row: u.row,
                    col: v.col,
                });
                &j[idx] - &jj
            } else {
                jj.scale_real(-1.0)
            };
            defects.push(d);
        }
    }

    let mut z_blocks = Vec::with_capacity(codomain.num_blocks());
    for (b, &k) in codomain.block_dims().iter().enumerate() {
        let start: Vec<ComplexMatrix> = defects.iter().map(|d| d.block(b).clone()).collect();
        let mut q = column_basis(&hcat(&start, k), tol.span)?;
        for _ in 0..(domain.dim() * domain.dim()).max(1) {
            if q.cols() == 0 || q.cols() == k {
                break;
            }
            let mut parts = vec![q.clone()];
            parts.extend(j.iter().map(|x| x.block(b) * &q));
            let next = column_basis(&hcat(&parts, k), tol.span)?;
            let grew = next.cols() > q.cols();
            q = next;
            if !grew {
                break;
            }
        }
        z_blocks.push(&q * &q.adjoint());
    }
    let z = Element::new(codomain.clone(), 1, z_blocks)?;
    let unit = Element::unit(codomain, 1);
    let keep = &r * &(&unit - &z);
    let hom = LinearMap::from_fn(domain, codomain, {
        let mut it = j.iter();
        move |_| &keep * it.next().expect("one image per basis element")
    })?;
    let anti = s.checked_sub(&hom)?;

    let failures = [
        (!is_tro_homomorphism(&hom).holds).then_some("hom part is not a TRO homomorphism"),
        (!is_tro_anti_homomorphism(&anti).holds)
            .then_some("anti part is not a TRO anti-homomorphism"),
    ];
    let hom_images = hom.basis_images();
    let anti_images = anti.basis_images();
    let mut worst = 0.0_f64;
    let mut orth_ok = true;
    for x in &hom_images {
        for y in &anti_images {
            let scale = x.operator_norm() * y.operator_norm();
            let d = (x * &y.adjoint())
                .operator_norm()
                .max((&x.adjoint() * y).operator_norm());
            worst = worst.max(d);
            orth_ok &= tol.is_zero(d, scale);
        }
    }
    let mut problems: Vec<&str> = failures.into_iter().flatten().collect();
    if !orth_ok {
        problems.push("ranges are not orthogonal");
    }
    if !problems.is_empty() {
        return Err(Error::DecompositionFailed(format!(
            "{} (max range defect {worst:.3e})",
            problems.join("; ")
        )));
    }
    Ok(TripleDecomposition {
        hom,
        anti,
        projection: z,
        orthogonality_defect: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::preservers::generators::{generate, GeneratorKind, GeneratorParams};

    fn max_entry_distance(a: &LinearMap, b: &LinearMap) -> f64 {
        a.checked_sub(b).unwrap().matrix().max_abs()
    }

    #[test]
    fn tro_hom_has_zero_anti_part() {
        let alg = Algebra::new(vec![1, 2]).unwrap();
        let d = decompose_triple_hom(&LinearMap::identity(&alg)).unwrap();
        assert!(d.anti.matrix().max_abs() <= 1e-12);
    }

    #[test]
    fn transpose_is_all_anti() {
        let t = LinearMap::make_transpose(3).unwrap();
        let d = decompose_triple_hom(&t).unwrap();
        assert!(d.hom.matrix().max_abs() <= 1e-12);
        assert!(max_entry_distance(&d.anti, &t) <= 1e-12);
    }

    #[test]
    fn mixed_generator_recovers_parts() {
        for seed in 0..5 {
            let params = GeneratorParams::new(Algebra::new(vec![2, 1]).unwrap());
            let g = generate(GeneratorKind::WeightedTripleHomMixed, &params, seed).unwrap();
            let d = decompose_triple_hom(&g.truth.support).unwrap();
            assert!(
                max_entry_distance(&d.hom, &g.truth.hom_part) <= 1e-8,
                "seed {seed}"
            );
            assert!(
                max_entry_distance(&d.anti, &g.truth.anti_part) <= 1e-8,
                "seed {seed}"
            );
        }
    }

    #[test]
    fn non_triple_hom_rejected() {
        let alg = Algebra::matrix(2);
        let t = LinearMap::identity(&alg).scale(crate::matrix::C64::new(2.0, 0.0));
        assert!(matches!(
            decompose_triple_hom(&t),
            Err(Error::NotTripleHomomorphism)
        ));
    }
}
