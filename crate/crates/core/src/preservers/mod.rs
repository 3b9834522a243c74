//! Structure classifiers for linear maps between finite-dimensional
//! C*-algebras: exact homomorphism checks, orthogonality-preservation
//! decisions, the weighted factorization, the equivalence reports and the
//! splitting of triple homomorphisms.

pub mod checks;
pub mod classify;
pub mod decompose;
pub mod factorize;
pub mod generators;
pub mod witness;

pub use checks::{
    is_jordan_star_homomorphism, is_multiplicative, is_star_homomorphism, is_triple_homomorphism,
    is_tro_anti_homomorphism, is_tro_homomorphism, CheckOutcome, PairIdentity, TripleIdentity,
};
pub use classify::{
    classify_cop, classify_order_zero, is_orthogonality_preserving,
    is_orthogonality_preserving_with, known_transpose_pair, refute_orthogonality_preserving, Basis,
    ClassificationReport, OpDecision, OpVerdict, Verdict, VerdictEntry,
};
pub use decompose::{decompose_triple_hom, TripleDecomposition};
pub use factorize::{factorize, Factorization, FactorizationFailure, FactorizationIdentity};
pub use generators::{generate, GeneratedMap, GeneratorKind, GeneratorParams, GroundTruth};
pub use witness::{Target, Witness};
