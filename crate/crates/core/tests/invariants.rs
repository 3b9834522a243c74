use nalgebra::DMatrix;
use proptest::prelude::*;
use trolab_core::funcalc::{op_functional_calculus, tro_closure_of_range};
use trolab_core::maps::norm_table;
use trolab_core::preservers::{
    decompose_triple_hom, factorize, generate, is_tro_anti_homomorphism, is_tro_homomorphism,
    refute_orthogonality_preserving, GeneratorKind, GeneratorParams,
};
use trolab_core::rng::{random_element, rng_from_seed};
use trolab_core::triple::{jordan_triple_product, tro_product};
use trolab_core::{Algebra, ComplexMatrix, Element, LinearMap, ScalarFunction, C64};

fn domains() -> impl Strategy<Value = Algebra> {
    prop_oneof![
        Just(vec![1]),
        Just(vec![2]),
        Just(vec![1, 1]),
        Just(vec![2, 1]),
        Just(vec![3]),
    ]
    .prop_map(|b| Algebra::new(b).unwrap())
}

fn generated(
    kind: GeneratorKind,
    domain: &Algebra,
    seed: u64,
) -> trolab_core::preservers::GeneratedMap {
    generate(kind, &GeneratorParams::new(domain.clone()), seed).unwrap()
}

fn map_distance(a: &LinearMap, b: &LinearMap) -> f64 {
    (a.matrix() - b.matrix()).max_abs()
}

/// Singular values of a square matrix from the real symmetric embedding of `m* m`.
fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let g = m.adjoint().as_dmatrix() * m.as_dmatrix();
    let k = g.nrows();
    let real = DMatrix::from_fn(2 * k, 2 * k, |i, j| {
        let z = g[(i % k, j % k)];
        match (i < k, j < k) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut ev: Vec<f64> = real
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev.into_iter().step_by(2).collect()
}

#[test]
fn transpose_is_an_anti_homomorphism_but_never_a_tro_homomorphism() {
    for m in 2..=4 {
        let t = LinearMap::make_transpose(m).unwrap();
        assert!(!is_tro_homomorphism(&t).holds, "m = {m}");
        assert!(is_tro_anti_homomorphism(&t).holds, "m = {m}");
    }
    let t = LinearMap::make_transpose(1).unwrap();
    assert!(is_tro_homomorphism(&t).holds);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tro_cube_has_cubed_norm(domain in domains(), seed in any::<u64>()) {
        let a = random_element(&domain, 1, &mut rng_from_seed(seed));
        let cube = tro_product(&a, &a, &a).unwrap();
        let n = a.operator_norm();
        prop_assert!((cube.operator_norm() - n.powi(3)).abs() <= 1e-10 * n.powi(3).max(1.0));
    }

    #[test]
    fn jordan_product_is_symmetric_in_outer_slots(domain in domains(), seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let (a, b, c) = (
            random_element(&domain, 1, &mut rng),
            random_element(&domain, 1, &mut rng),
            random_element(&domain, 1, &mut rng),
        );
        let x = jordan_triple_product(&a, &b, &c).unwrap();
        let y = jordan_triple_product(&c, &b, &a).unwrap();
        prop_assert!(x.distance(&y) <= 1e-12 * x.operator_norm().max(1.0));
    }

    #[test]
    fn generated_homomorphisms_pass_their_checks(domain in domains(), seed in any::<u64>()) {
        let hom = generated(GeneratorKind::TroHom, &domain, seed);
        prop_assert!(is_tro_homomorphism(&hom.map).holds);
        let anti = generated(GeneratorKind::TroAntiHom, &domain, seed);
        prop_assert!(is_tro_anti_homomorphism(&anti.map).holds);
    }

    #[test]
    fn decomposition_splits_exactly_into_orthogonal_parts(domain in domains(), seed in any::<u64>()) {
        let g = generated(GeneratorKind::WeightedTripleHomMixed, &domain, seed);
        let s = &g.truth.support;
        let d = decompose_triple_hom(s).unwrap();
        let sum = d.hom.checked_add(&d.anti).unwrap();
        prop_assert!(map_distance(&sum, s) <= 1e-14 * s.matrix().max_abs().max(1.0));
        prop_assert!(d.orthogonality_defect <= 1e-8);
        prop_assert!(is_tro_homomorphism(&d.hom).holds);
        prop_assert!(is_tro_anti_homomorphism(&d.anti).holds);
    }

    #[test]
    fn triple_hom_that_survives_level_two_is_a_tro_hom(seed in any::<u64>()) {
        let domain = Algebra::matrix(2);
        let g = generated(GeneratorKind::WeightedTripleHomMixed, &domain, seed);
        let s = &g.truth.support;
        if refute_orthogonality_preserving(s, 2, 40, seed).is_none() {
            prop_assert!(is_tro_homomorphism(s).holds);
        }
        if !is_tro_homomorphism(s).holds {
            prop_assert!(refute_orthogonality_preserving(s, 2, 40, seed).is_some());
        }
    }

    #[test]
    fn weighted_tro_homs_are_contractive_multiples(domain in domains(), seed in any::<u64>()) {
        let g = generated(GeneratorKind::WeightedTroHom, &domain, seed);
        let h = g.truth.h.operator_norm();
        for e in norm_table(&g.map, 3, 3, seed).unwrap() {
            prop_assert!(e.lower_bound <= h + 1e-6, "n = {}: {} > {}", e.level, e.lower_bound, h);
            prop_assert!(e.lower_bound >= h - 1e-3, "n = {}: {} < {}", e.level, e.lower_bound, h);
        }
    }

    #[test]
    fn norm_table_is_nondecreasing(domain in domains(), seed in any::<u64>()) {
        let g = generated(GeneratorKind::RandomMap, &domain, seed);
        let table = norm_table(&g.map, 3, 2, seed).unwrap();
        for w in table.windows(2) {
            prop_assert!(w[1].lower_bound >= w[0].lower_bound * (1.0 - 1e-12));
        }
    }

    #[test]
    fn functional_calculus_weight_has_the_image_spectrum(domain in domains(), seed in any::<u64>(), p in 0.2f64..3.0) {
        let g = generated(GeneratorKind::WeightedTroHom, &domain, seed);
        let fac = factorize(&g.map).unwrap();
        let f = ScalarFunction::power(p).unwrap();
        let f_t = op_functional_calculus(&fac, &f).unwrap();
        let weight = f_t.apply(&Element::unit(&domain, 1)).unwrap();
        let expected = fac
            .h
            .blocks()
            .iter()
            .flat_map(singular_values)
            .filter(|s| *s > 1e-9)
            .map(|s| s.powf(p))
            .fold(0.0, f64::max);
        prop_assert!((weight.operator_norm() - expected).abs() <= 1e-9 * expected.max(1.0));

        let again = factorize(&f_t).unwrap();
        prop_assert!(again.residual <= 1e-8);
        prop_assert!(is_tro_homomorphism(&again.support).holds);
    }

    #[test]
    fn closure_contains_the_range_and_is_bracket_closed(domain in domains(), seed in any::<u64>()) {
        let g = generated(GeneratorKind::WeightedTripleHomMixed, &domain, seed);
        let closure = tro_closure_of_range(&g.map, 10).unwrap();
        let coords: Vec<Vec<C64>> = closure.basis.iter().map(|b| b.coordinates()).collect();
        let residual = |x: &Element| -> f64 {
            let mut v = x.coordinates();
            for q in &coords {
                let ip: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= ip * qi;
                }
            }
            v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
        };
        for img in g.map.basis_images() {
            prop_assert!(residual(&img) <= 1e-9 * img.operator_norm().max(1.0));
        }
        for a in &closure.basis {
            for b in &closure.basis {
                for c in &closure.basis {
                    prop_assert!(residual(&tro_product(a, b, c).unwrap()) <= 1e-8);
                }
            }
        }
    }

    #[test]
    fn amplification_agrees_with_entrywise_application(domain in domains(), seed in any::<u64>(), n in 1usize..=3) {
        let g = generated(GeneratorKind::RandomMap, &domain, seed);
        let x = random_element(&domain, n, &mut rng_from_seed(seed ^ 1));
        let direct = g.map.amplified_apply(&x).unwrap();
        let via = g.map.amplify(n).unwrap().apply(&x.flatten()).unwrap();
        prop_assert!(direct.flatten().distance(&via) <= 1e-12 * direct.operator_norm().max(1.0));
    }

    #[test]
    fn maps_and_elements_survive_json(domain in domains(), seed in any::<u64>()) {
        let g = generated(GeneratorKind::RandomMap, &domain, seed);
        let back: LinearMap = serde_json::from_str(&serde_json::to_string(&g.map).unwrap()).unwrap();
        prop_assert_eq!(&back, &g.map);
        let x = random_element(&domain, 2, &mut rng_from_seed(seed));
        let back: Element = serde_json::from_str(&serde_json::to_string(&x).unwrap()).unwrap();
        prop_assert_eq!(back, x);
    }
}
