//! Hard-coded examples with known answers, rerun by `repro-paper`.

use serde::Serialize;
use trolab_core::maps::norm_table;
use trolab_core::preservers::known_transpose_pair;
use trolab_core::triple::{is_orthogonal, tro_product};
use trolab_core::{Algebra, ComplexMatrix, Element, LinearMap, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusItem {
    pub name: String,
    pub passed: bool,
    pub detail: serde_json::Value,
}

/// `(θ(2)_2 x)* θ(2)_2 y` for the known orthogonal pair.
pub fn expected_pair_product() -> ComplexMatrix {
    ComplexMatrix::from_real(
        4,
        4,
        &[
            0., 3., 0., -3., 0., 0., 0., 0., 0., 3., 0., -3., 0., 0., 0., 0.,
        ],
    )
}

fn pair_item() -> Result<CorpusItem> {
    let t = LinearMap::make_transpose(2)?;
    let (x, y) = known_transpose_pair();
    let orthogonal = is_orthogonal(&x, &y);
    let tx = t.amplified_apply(&x)?;
    let ty = t.amplified_apply(&y)?;
    let product = &tx.adjoint() * &ty;
    let error = (product.block(0) - &expected_pair_product()).max_abs();
    Ok(CorpusItem {
        name: "orthogonal_pair_under_amplified_transpose".into(),
        passed: orthogonal && error <= 1e-12,
        detail: serde_json::json!({
            "inputs_orthogonal": orthogonal,
            "product": product.block(0),
            "max_entry_error": error,
        }),
    })
}

fn zero_tro_item() -> Result<CorpusItem> {
    let m2 = Algebra::matrix(2);
    let t = LinearMap::make_transpose(2)?;
    let a = Element::from_matrix(ComplexMatrix::unit(2, 2, 0, 0))?;
    let b = Element::from_matrix(ComplexMatrix::unit(2, 2, 1, 0))?;
    let input = tro_product(&a, &a, &b)?;
    let (sa, sb) = (t.apply(&a)?, t.apply(&b)?);
    let output = tro_product(&sa, &sa, &sb)?;
    let expected = Element::from_matrix(ComplexMatrix::unit(2, 2, 0, 1))?;
    let error = output.distance(&expected);
    Ok(CorpusItem {
        name: "zero_tro_product_not_preserved_by_transpose".into(),
        passed: input == Element::zero(&m2, 1) && error == 0.0,
        detail: serde_json::json!({
            "input_product": input,
            "output_product": output,
            "error": error,
        }),
    })
}

fn norm_item(restarts: usize, seed: u64) -> Result<CorpusItem> {
    let t = LinearMap::make_transpose(2)?;
    let table = norm_table(&t, 3, restarts, seed)?;
    let exact = [1.0, 2.0, 2.0];
    let bounds: Vec<f64> = table.iter().map(|e| e.lower_bound).collect();
    let passed = bounds
        .iter()
        .zip(exact)
        .all(|(b, e)| *b >= e - 1e-3 && *b <= e + 1e-9);
    Ok(CorpusItem {
        name: "transpose_norm_table".into(),
        passed,
        detail: serde_json::json!({ "levels": [1, 2, 3], "lower_bounds": bounds, "exact": exact }),
    })
}

pub fn run_corpus(restarts: usize, seed: u64) -> Result<Vec<CorpusItem>> {
    Ok(vec![
        pair_item()?,
        zero_tro_item()?,
        norm_item(restarts, seed)?,
    ])
}
