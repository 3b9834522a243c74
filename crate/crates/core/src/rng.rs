//! Reproducible random sampling.
//!
//! Every generator takes an explicit 64-bit seed and draws from
//! `ChaCha8Rng::seed_from_u64(seed)`. Independent streams (per trial, per
//! restart) use `derive_seed(seed, index)`, a SplitMix64 mix of both values.
//! Complex Gaussians have independent `N(0, 1/2)` real and imaginary parts,
//! sampled with `rand_distr::StandardNormal`. Haar-like unitaries come from
//! the QR factorization of a Gaussian matrix with the phases of `R`'s diagonal
//! moved into `Q`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{Algebra, Element};
use crate::matrix::{ComplexMatrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 of `seed ^ (index · golden)`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    // fill row-major so the stream order matches the logical layout
    let entries: Vec<C64> = (0..rows * cols).map(|_| gaussian(rng)).collect();
    ComplexMatrix::from_fn(rows, cols, |i, j| entries[i * cols + j])
}

pub fn random_unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = gaussian_matrix(n, n, rng).into_dmatrix();
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, k)] *= phase;
        }
    }
    ComplexMatrix::from_dmatrix(q)
}

/// Hermitian positive definite `n x n` matrix with eigenvalues drawn
/// uniformly from `[lo, hi]`.
pub fn random_positive_definite(n: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> ComplexMatrix {
    let w = random_unitary(n, rng);
    let values: Vec<f64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
    let d = ComplexMatrix::real_diagonal(&values);
    &(&w * &d) * &w.adjoint()
}

/// Element with i.i.d. complex Gaussian entries in every block.
pub fn random_element(algebra: &Algebra, level: usize, rng: &mut impl Rng) -> Element {
    let blocks = algebra
        .block_dims()
        .iter()
        .map(|&k| gaussian_matrix(k * level, k * level, rng))
        .collect();
    Element::new(algebra.clone(), level, blocks).expect("shapes follow the algebra")
}

/// Gaussian element rescaled to operator norm 1.
pub fn random_unit_element(algebra: &Algebra, level: usize, rng: &mut impl Rng) -> Element {
    let x = random_element(algebra, level, rng);
    let n = x.operator_norm();
    if n > 0.0 {
        x.scale_real(1.0 / n)
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_reproducible() {
        let a = gaussian_matrix(3, 3, &mut rng_from_seed(7));
        let b = gaussian_matrix(3, 3, &mut rng_from_seed(7));
        let c = gaussian_matrix(3, 3, &mut rng_from_seed(8));
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }

    #[test]
    fn unitaries_are_unitary() {
        let mut rng = rng_from_seed(3);
        for n in 1..6 {
            let u = random_unitary(n, &mut rng);
            let err = (&(&u.adjoint() * &u) - &ComplexMatrix::identity(n)).max_abs();
            assert!(err < 1e-13, "n={n}: {err}");
        }
    }

    #[test]
    fn positive_definite_spectrum_in_range() {
        let mut rng = rng_from_seed(4);
        let g = random_positive_definite(4, 0.5, 2.0, &mut rng);
        let e = g.hermitian_eigen().unwrap();
        assert!(e
            .eigenvalues
            .iter()
            .all(|&l| (0.5 - 1e-12..=2.0 + 1e-12).contains(&l)));
    }
}
