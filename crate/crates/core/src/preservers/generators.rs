//! Seeded maps with known structure.
//!
//! Each codomain block `j` is `U_j (⊕ g ⊗ a_i ⊕ g' ⊗ a_iᵗ ⊕ 0) V_j*`: copies
//! of the domain blocks, some transposed, weighted by positive definite `g`
//! acting on the multiplicity space. The supporting triple homomorphism is
//! the same expression with every `g = 1`, and `T(1)` is the weight `h`.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::algebra::{Algebra, Element};
use crate::maps::LinearMap;
use crate::matrix::ComplexMatrix;
use crate::rng::{
    gaussian_matrix, random_positive_definite, random_unitary, rng_from_seed, SeededRng,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    /// Unweighted TRO homomorphism.
    TroHom,
    /// Unweighted TRO anti-homomorphism.
    TroAntiHom,
    WeightedTroHom,
    /// Weighted triple homomorphism with both plain and transposed copies.
    WeightedTripleHomMixed,
    /// `a ↦ h π(a)` with `π` a *-homomorphism and `h ≥ 0` commuting with it.
    CpOrderZero,
    /// `a ↦ h ψ(a)` with `ψ` containing a transposed copy of a block of size
    /// at least two: positive, not completely positive.
    TransposeTypePositive,
    /// Gaussian action matrix.
    RandomMap,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 7] = [
        GeneratorKind::TroHom,
        GeneratorKind::TroAntiHom,
        GeneratorKind::WeightedTroHom,
        GeneratorKind::WeightedTripleHomMixed,
        GeneratorKind::CpOrderZero,
        GeneratorKind::TransposeTypePositive,
        GeneratorKind::RandomMap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::TroHom => "tro_hom",
            GeneratorKind::TroAntiHom => "tro_anti_hom",
            GeneratorKind::WeightedTroHom => "weighted_tro_hom",
            GeneratorKind::WeightedTripleHomMixed => "weighted_triple_hom_mixed",
            GeneratorKind::CpOrderZero => "cp_order_zero",
            GeneratorKind::TransposeTypePositive => "transpose_type_positive",
            GeneratorKind::RandomMap => "random_map",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::Generator(format!("unknown generator kind `{name}`")))
    }
}

/// Shape parameters for a generated map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorParams {
    pub domain: Algebra,
    /// Number of codomain blocks.
    pub codomain_blocks: usize,
    /// Largest number of copies of a domain block inside one codomain block.
    pub max_multiplicity: usize,
    /// Largest zero padding added to a codomain block.
    pub max_padding: usize,
    /// Codomain dimension for `RandomMap` (as a single block).
    pub random_codomain: usize,
}

impl GeneratorParams {
    pub fn new(domain: Algebra) -> Self {
        let k = domain.block_dims().iter().copied().max().unwrap_or(1);
        Self {
            domain,
            codomain_blocks: 1,
            max_multiplicity: 2,
            max_padding: 1,
            random_codomain: k,
        }
    }
}

/// What the generator knows about the map it produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundTruth {
    pub kind: GeneratorKind,
    /// `T(1)`; zero for random maps.
    pub h: Element,
    /// Supporting triple homomorphism `S₀` (zero for random maps).
    pub support: LinearMap,
    /// TRO-homomorphism summand of `S₀`.
    pub hom_part: LinearMap,
    /// TRO-anti-homomorphism summand of `S₀`.
    pub anti_part: LinearMap,
    /// Verdicts implied by the construction.
    pub expected: BTreeMap<String, bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratedMap {
    pub map: LinearMap,
    pub truth: GroundTruth,
}

/// One copy of domain block `block` inside a codomain block.
#[derive(Debug, Clone)]
struct CopyGroup {
    block: usize,
    multiplicity: usize,
    transposed: bool,
    weight: ComplexMatrix,
}

struct CodomainBlock {
    groups: Vec<CopyGroup>,
    size: usize,
    u: ComplexMatrix,
    v: ComplexMatrix,
}

struct Layout {
    blocks: Vec<CodomainBlock>,
}

impl Layout {
    fn codomain(&self) -> Result<Algebra> {
        Algebra::new(self.blocks.iter().map(|b| b.size).collect())
    }

    /// Evaluates `U (⊕ w ⊗ a_i^{(t)} ⊕ 0) V*`, optionally with unit weights
    /// and optionally restricted to plain or transposed groups.
    fn evaluate(&self, a: &Element, unit_weights: bool, only: Option<bool>) -> Element {
        let blocks = self
            .blocks
            .iter()
            .map(|cb| {
                let mut diag = Vec::new();
                let mut used = 0;
                for g in &cb.groups {
                    let ai = a.block(g.block);
                    let piece = if g.transposed {
                        ai.transpose()
                    } else {
                        ai.clone()
                    };
                    // a transposed 1x1 block is also a plain copy; it counts as homomorphic
                    let anti = g.transposed && ai.rows() >= 2;
                    let keep = only.is_none_or(|t| t == anti);
                    let w = if unit_weights {
                        ComplexMatrix::identity(g.multiplicity)
                    } else {
                        g.weight.clone()
                    };
                    let m = w.kron(&piece);
                    used += m.rows();
                    diag.push(if keep {
                        m
                    } else {
                        ComplexMatrix::zeros(m.rows(), m.cols())
                    });
                }
                if cb.size > used {
                    diag.push(ComplexMatrix::zeros(cb.size - used, cb.size - used));
                }
                let d = if diag.is_empty() {
                    ComplexMatrix::zeros(0, 0)
                } else {
                    ComplexMatrix::block_diagonal(&diag)
                };
                &(&cb.u * &d) * &cb.v.adjoint()
            })
            .collect();
        Element::new(self.codomain().expect("positive sizes"), 1, blocks).expect("layout sizes")
    }
}

fn weight(kind: GeneratorKind, p: usize, rng: &mut SeededRng) -> ComplexMatrix {
    match kind {
        GeneratorKind::TroHom | GeneratorKind::TroAntiHom => ComplexMatrix::identity(p),
        _ => random_positive_definite(p, 0.5, 1.5, rng),
    }
}

fn layout(kind: GeneratorKind, params: &GeneratorParams, rng: &mut SeededRng) -> Result<Layout> {
    let dims = params.domain.block_dims();
    let nonabelian: Vec<usize> = (0..dims.len()).filter(|&i| dims[i] >= 2).collect();
    let plain = !matches!(kind, GeneratorKind::TroAntiHom);
    let transposed = matches!(
        kind,
        GeneratorKind::TroAntiHom
            | GeneratorKind::WeightedTripleHomMixed
            | GeneratorKind::TransposeTypePositive
    );
    let mixed = matches!(
        kind,
        GeneratorKind::WeightedTripleHomMixed | GeneratorKind::TransposeTypePositive
    );
    let same_frame = matches!(
        kind,
        GeneratorKind::CpOrderZero | GeneratorKind::TransposeTypePositive
    );
    if kind == GeneratorKind::TransposeTypePositive && nonabelian.is_empty() {
        return Err(Error::Generator(
            "transpose-type maps need a domain block of size at least 2".into(),
        ));
    }
    let mut blocks = Vec::new();
    for _ in 0..params.codomain_blocks.max(1) {
        let mut groups = Vec::new();
        for (i, _) in dims.iter().enumerate() {
            for t in [false, true] {
                if (t && !transposed) || (!t && !plain) {
                    continue;
                }
                let p = rng.random_range(0..=params.max_multiplicity);
                if p > 0 {
                    groups.push(CopyGroup {
                        block: i,
                        multiplicity: p,
                        transposed: t,
                        weight: weight(kind, p, rng),
                    });
                }
            }
        }
        blocks.push(groups);
    }
    // guarantee a nonzero map and, for mixed kinds, a transposed copy that
    // actually differs from a plain one
    let need_anti = mixed && !nonabelian.is_empty();
    let has_anti = |blocks: &Vec<Vec<CopyGroup>>| {
        blocks
            .iter()
            .flatten()
            .any(|g| g.transposed && dims[g.block] >= 2)
    };
    if need_anti && !has_anti(&blocks) {
        let i = nonabelian[rng.random_range(0..nonabelian.len())];
        blocks[0].push(CopyGroup {
            block: i,
            multiplicity: 1,
            transposed: true,
            weight: weight(kind, 1, rng),
        });
    }
    if blocks.iter().all(|g| g.is_empty()) {
        let i = rng.random_range(0..dims.len());
        blocks[0].push(CopyGroup {
            block: i,
            multiplicity: 1,
            transposed: !plain,
            weight: weight(kind, 1, rng),
        });
    }
    if mixed && !blocks.iter().flatten().any(|g| !g.transposed) {
        let i = rng.random_range(0..dims.len());
        blocks[0].insert(
            0,
            CopyGroup {
                block: i,
                multiplicity: 1,
                transposed: false,
                weight: weight(kind, 1, rng),
            },
        );
    }
    let mut out = Vec::new();
    for groups in blocks {
        let used: usize = groups.iter().map(|g| g.multiplicity * dims[g.block]).sum();
        let mut size = used + rng.random_range(0..=params.max_padding);
        if size == 0 {
            size = 1;
        }
        let u = random_unitary(size, rng);
        let v = if same_frame {
            u.clone()
        } else {
            random_unitary(size, rng)
        };
        out.push(CodomainBlock { groups, size, u, v });
    }
    Ok(Layout { blocks: out })
}

fn expectations(kind: GeneratorKind, layout: &Layout, dims: &[usize]) -> BTreeMap<String, bool> {
    let anti_nontrivial = layout
        .blocks
        .iter()
        .flat_map(|b| &b.groups)
        .any(|g| g.transposed && dims[g.block] >= 2);
    let mut e = BTreeMap::new();
    let mut set = |k: &str, v: bool| {
        e.insert(k.to_string(), v);
    };
    if kind == GeneratorKind::RandomMap {
        return e;
    }
    let cop = !anti_nontrivial;
    set("op_level_1", true);
    for key in [
        "op_level_2",
        "cop",
        "weighted_tro_hom",
        "zero_tro_product_preserving",
        "right_orthogonality_preserving",
    ] {
        set(key, cop);
    }
    match kind {
        GeneratorKind::TroHom => {
            set("triple_hom", true);
            set("tro_hom", true);
        }
        GeneratorKind::TroAntiHom => {
            set("triple_hom", true);
            set("tro_anti_hom", true);
            set("tro_hom", cop);
        }
        GeneratorKind::CpOrderZero | GeneratorKind::TransposeTypePositive => {
            set("positive", true);
            set("symmetric", true);
            set("completely_positive", cop);
            for key in [
                "cp_order_zero",
                "absolute_value_preserving",
                "zero_product_preserving",
            ] {
                set(key, cop);
            }
        }
        _ => {}
    }
    e
}

/// Generates a map of the given kind together with its ground truth.
pub fn generate(kind: GeneratorKind, params: &GeneratorParams, seed: u64) -> Result<GeneratedMap> {
    let mut rng = rng_from_seed(seed);
    let domain = &params.domain;
    if kind == GeneratorKind::RandomMap {
        let codomain = Algebra::matrix(params.random_codomain.max(1));
        let m = gaussian_matrix(codomain.dim(), domain.dim(), &mut rng);
        let map = LinearMap::new(domain.clone(), codomain.clone(), m)?;
        let zero = LinearMap::zero(domain, &codomain);
        let mut expected = BTreeMap::new();
        expected.insert("op_level_1".to_string(), false);
        return Ok(GeneratedMap {
            truth: GroundTruth {
                kind,
                h: Element::zero(&codomain, 1),
                support: zero.clone(),
                hom_part: zero.clone(),
                anti_part: zero,
                expected,
            },
            map,
        });
    }
    let layout = layout(kind, params, &mut rng)?;
    let codomain = layout.codomain()?;
    let build = |unit_weights: bool, only: Option<bool>| {
        LinearMap::from_fn(domain, &codomain, |e| {
            layout.evaluate(e, unit_weights, only)
        })
    };
    let map = build(false, None)?;
    let support = build(true, None)?;
    let hom_part = build(true, Some(false))?;
    let anti_part = build(true, Some(true))?;
    let h = layout.evaluate(&Element::unit(domain, 1), false, None);
    let expected = expectations(kind, &layout, domain.block_dims());
    Ok(GeneratedMap {
        map,
        truth: GroundTruth {
            kind,
            h,
            support,
            hom_part,
            anti_part,
            expected,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preservers::checks::{
        is_triple_homomorphism, is_tro_anti_homomorphism, is_tro_homomorphism,
    };

    #[test]
    fn tro_hom_generator_passes_exact_check() {
        let params = GeneratorParams::new(Algebra::new(vec![2, 1]).unwrap());
        for seed in 0..5 {
            let g = generate(GeneratorKind::TroHom, &params, seed).unwrap();
            assert!(is_tro_homomorphism(&g.map).holds);
            assert_eq!(g.map, g.truth.support);
        }
    }

    #[test]
    fn anti_and_mixed_supports() {
        let params = GeneratorParams::new(Algebra::matrix(2));
        for seed in 0..5 {
            let g = generate(GeneratorKind::TroAntiHom, &params, seed).unwrap();
            assert!(is_tro_anti_homomorphism(&g.map).holds);
            let m = generate(GeneratorKind::WeightedTripleHomMixed, &params, seed).unwrap();
            assert!(is_triple_homomorphism(&m.truth.support).holds);
            assert!(!is_tro_homomorphism(&m.truth.support).holds);
            assert!(is_tro_homomorphism(&m.truth.hom_part).holds);
            assert!(is_tro_anti_homomorphism(&m.truth.anti_part).holds);
        }
    }

    #[test]
    fn weight_is_the_image_of_the_unit() {
        let params = GeneratorParams::new(Algebra::new(vec![1, 2]).unwrap());
        let g = generate(GeneratorKind::WeightedTroHom, &params, 4).unwrap();
        let h = g.map.apply(&Element::unit(&params.domain, 1)).unwrap();
        assert!(h.distance(&g.truth.h) < 1e-12);
    }

    #[test]
    fn cp_generators() {
        let params = GeneratorParams::new(Algebra::new(vec![2, 1]).unwrap());
        for seed in 0..5 {
            let g = generate(GeneratorKind::CpOrderZero, &params, seed).unwrap();
            assert!(g.map.is_completely_positive());
            let n = generate(GeneratorKind::TransposeTypePositive, &params, seed).unwrap();
            assert!(!n.map.is_completely_positive());
            assert!(n.map.is_positive(100, seed).is_probably_true());
        }
        assert!(generate(
            GeneratorKind::TransposeTypePositive,
            &GeneratorParams::new(Algebra::abelian(2)),
            0
        )
        .is_err());
    }

    #[test]
    fn kinds_roundtrip_names() {
        for k in GeneratorKind::ALL {
            assert_eq!(GeneratorKind::parse(k.name()).unwrap(), k);
        }
        assert!(GeneratorKind::parse("nope").is_err());
    }
}
