//! Orthogonality-preservation decisions and the two equivalence reports.
//!
//! Structural routes (exact basis checks, the weighted factorization and the
//! Choi matrix) give certified verdicts. Sampling is used to refute; a sampled
//! property with no counterexample is reported as true with basis `sampled`.

use std::collections::BTreeMap;

use serde::Serialize;

use super::checks::{
    check_triple_identity, is_jordan_star_homomorphism, is_star_homomorphism,
    is_triple_homomorphism, is_tro_anti_homomorphism, is_tro_homomorphism, CheckOutcome,
    TripleIdentity,
};
use super::factorize::{factorize, Factorization, FactorizationFailure};
use super::witness::{Target, Witness};
use crate::algebra::{Algebra, Element};
use crate::maps::{LinearMap, PositivityVerdict, CP_EIGEN_TOL};
use crate::matrix::ComplexMatrix;
use crate::rng::{derive_seed, random_element, rng_from_seed};
use crate::tolerance::Tolerances;
use crate::triple::{
    absolute_value, random_orthogonal_pair, random_orthogonal_positive_pair,
    random_right_orthogonal_pair, random_self_adjoint, random_zero_product_pair,
    random_zero_tro_triple, tro_product, OrthogonalityDefect,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    True,
    False,
    Unknown,
}

impl Verdict {
    fn from_bool(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }
}

/// How a verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// Decided by a finite exact procedure or a replayable counterexample.
    Certified,
    /// No counterexample among the sampled inputs.
    Sampled,
    /// Neither route was conclusive.
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VerdictEntry {
    pub value: Verdict,
    pub basis: Basis,
}

/// Three-valued decision on orthogonality preservation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OpVerdict {
    CertifiedTrue,
    CertifiedFalse,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpDecision {
    pub verdict: OpVerdict,
    pub factorization: Option<Factorization>,
    pub failure: Option<FactorizationFailure>,
    pub witness: Option<Witness>,
}

/// Samples orthogonal pairs in `M_n(A)` and returns the first whose images
/// under `T_n` are not orthogonal. For `A = M_2(C)` at `n = 2` a known
/// counterexample pair for the transpose is tried first.
pub fn refute_orthogonality_preserving(
    t: &LinearMap,
    n: usize,
    trials: usize,
    seed: u64,
) -> Option<Witness> {
    let tol = Tolerances::current();
    let domain = t.domain();
    let test = |a: Element, b: Element| -> Option<Witness> {
        let ta = t.amplified_apply(&a).ok()?;
        let tb = t.amplified_apply(&b).ok()?;
        (!OrthogonalityDefect::of(&ta, &tb).is_orthogonal(&tol))
            .then_some(Witness::OrthogonalPair { level: n, a, b })
    };
    if n == 2 && domain == &Algebra::matrix(2) {
        let (x, y) = known_transpose_pair();
        if let Some(w) = test(x, y) {
            return Some(w);
        }
    }
    (0..trials).find_map(|i| {
        let (a, b) = random_orthogonal_pair(domain, n, derive_seed(seed, i as u64));
        test(a, b)
    })
}

/// An orthogonal pair in `M_2(M_2(C))` whose images under the amplified
/// transpose are not orthogonal.
pub fn known_transpose_pair() -> (Element, Element) {
    let m2 = Algebra::matrix(2);
    let grid = |e: &[f64]| {
        Element::new(m2.clone(), 2, vec![ComplexMatrix::from_real(4, 4, e)]).expect("4x4 block")
    };
    (
        grid(&[
            1., 0., 1., 0., 0., 0., 0., 0., 1., 0., 1., 0., 0., 0., 0., 0.,
        ]),
        grid(&[
            0., 0., 0., 0., 1., 2., -1., 0., 0., 0., 0., 0., 2., 2., -2., 0.,
        ]),
    )
}

pub fn is_orthogonality_preserving(t: &LinearMap) -> OpDecision {
    is_orthogonality_preserving_with(t, 200, 0)
}

/// Certified true iff the weighted factorization succeeds; certified false
/// when it fails on a basis identity or sampling finds an orthogonal pair
/// that is not preserved.
pub fn is_orthogonality_preserving_with(t: &LinearMap, trials: usize, seed: u64) -> OpDecision {
    match factorize(t) {
        Ok(f) => OpDecision {
            verdict: OpVerdict::CertifiedTrue,
            factorization: Some(f),
            failure: None,
            witness: None,
        },
        Err(failure) => {
            let pair = refute_orthogonality_preserving(t, 1, trials, seed);
            let verdict = if failure.is_certificate() || pair.is_some() {
                OpVerdict::CertifiedFalse
            } else {
                OpVerdict::Unknown
            };
            let witness = pair.or_else(|| failure.witness(1));
            OpDecision {
                verdict,
                factorization: None,
                failure: Some(failure),
                witness,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    /// `cop` or `order_zero`.
    pub kind: String,
    pub verdicts: BTreeMap<String, VerdictEntry>,
    pub witnesses: BTreeMap<String, Witness>,
    pub factorization: Option<Factorization>,
    /// Property names that must agree for this report to be consistent.
    pub equivalence: Vec<String>,
    pub consistent: bool,
    pub inconsistencies: Vec<String>,
    pub notes: Vec<String>,
    pub trials: usize,
    pub seed: u64,
}

impl ClassificationReport {
    fn new(kind: &str, trials: usize, seed: u64) -> Self {
        Self {
            kind: kind.to_string(),
            verdicts: BTreeMap::new(),
            witnesses: BTreeMap::new(),
            factorization: None,
            equivalence: Vec::new(),
            consistent: true,
            inconsistencies: Vec::new(),
            notes: Vec::new(),
            trials,
            seed,
        }
    }

    fn set(&mut self, key: &str, value: Verdict, basis: Basis, witness: Option<Witness>) {
        self.verdicts
            .insert(key.to_string(), VerdictEntry { value, basis });
        if let Some(w) = witness {
            self.witnesses.insert(key.to_string(), w);
        }
    }

    fn set_check(&mut self, key: &str, out: CheckOutcome) {
        self.set(
            key,
            Verdict::from_bool(out.holds),
            Basis::Certified,
            out.witness,
        );
    }

    pub fn verdict(&self, key: &str) -> Verdict {
        self.verdicts.get(key).map_or(Verdict::Unknown, |e| e.value)
    }

    /// Values of the equivalence group, in order.
    pub fn equivalence_verdicts(&self) -> Vec<Verdict> {
        self.equivalence.iter().map(|k| self.verdict(k)).collect()
    }

    pub fn all_equivalent(&self, value: Verdict) -> bool {
        self.equivalence_verdicts().iter().all(|v| *v == value)
    }

    /// Replays every stored witness against `t`; returns the keys whose
    /// witness does not reproduce.
    pub fn failed_replays(&self, t: &LinearMap) -> Vec<String> {
        self.witnesses
            .iter()
            .filter(|(_, w)| !w.replay(t).unwrap_or(false))
            .map(|(k, _)| k.clone())
            .collect()
    }

    fn flag(&mut self, message: String) {
        self.consistent = false;
        self.inconsistencies.push(message);
    }
}

/// Per-property sub-seeds, so adding a property does not shift the others.
fn sub_seed(seed: u64, tag: u64) -> u64 {
    derive_seed(seed, 0xC0FF_EE00 + tag)
}

fn structural_checks(report: &mut ClassificationReport, t: &LinearMap) {
    report.set_check("triple_hom", is_triple_homomorphism(t));
    report.set_check("tro_hom", is_tro_homomorphism(t));
    report.set_check("tro_anti_hom", is_tro_anti_homomorphism(t));
    report.set_check("jordan_star_hom", is_jordan_star_homomorphism(t));
    report.set_check("star_hom", is_star_homomorphism(t));
    let sym = t.is_symmetric();
    let witness = (!sym).then(|| Witness::Symmetry {
        a: t.domain().basis_element(t.symmetry_defect().1),
    });
    report.set(
        "symmetric",
        Verdict::from_bool(sym),
        Basis::Certified,
        witness,
    );
}

fn positivity(report: &mut ClassificationReport, t: &LinearMap) -> bool {
    let positive = t.is_positive(report.trials, sub_seed(report.seed, 1));
    match &positive {
        PositivityVerdict::ProbablyTrue { .. } => {
            report.set("positive", Verdict::True, Basis::Sampled, None)
        }
        PositivityVerdict::CertifiedFalse { witness, .. } => report.set(
            "positive",
            Verdict::False,
            Basis::Certified,
            Some(Witness::NotPositive { a: witness.clone() }),
        ),
    }
    let cp = t.is_completely_positive();
    let witness = if cp { None } else { choi_witness(t) };
    report.set(
        "completely_positive",
        Verdict::from_bool(cp),
        Basis::Certified,
        witness,
    );
    positive.is_probably_true()
}

fn choi_witness(t: &LinearMap) -> Option<Witness> {
    let nb = t.codomain().num_blocks();
    let mut best: Option<(usize, f64)> = None;
    for (idx, c) in t.choi_blocks().iter().enumerate() {
        let e = c.hermitian_eigen().ok()?;
        let v = e.min_eigenvalue() - c.hermitian_defect();
        if v < -CP_EIGEN_TOL * c.operator_norm().max(1.0) && best.is_none_or(|(_, b)| v < b) {
            best = Some((idx, v));
        }
    }
    best.map(|(idx, v)| Witness::ChoiNegative {
        domain_block: idx / nb,
        codomain_block: idx % nb,
        min_eigenvalue: v,
    })
}

/// Embeds a level-1 orthogonal-pair witness as `Diag(a, 0), Diag(b, 0)`.
fn lift_pair(w: &Witness, n: usize) -> Option<Witness> {
    match w {
        Witness::OrthogonalPair { level: 1, a, b } => {
            let zero = Element::zero(a.algebra(), 1);
            let pad = |x: &Element| {
                let grid: Vec<Vec<Element>> = (0..n)
                    .map(|p| {
                        (0..n)
                            .map(|q| {
                                if p == 0 && q == 0 {
                                    x.clone()
                                } else {
                                    zero.clone()
                                }
                            })
                            .collect()
                    })
                    .collect();
                crate::algebra::amplify_element(&grid).ok()
            };
            Some(Witness::OrthogonalPair {
                level: n,
                a: pad(a)?,
                b: pad(b)?,
            })
        }
        _ => None,
    }
}

/// Fills `op_level_1`, `weighted_tro_hom`, `op_level_2` and `cop`.
fn orthogonality_levels(report: &mut ClassificationReport, t: &LinearMap) {
    let (trials, seed) = (report.trials, report.seed);
    let op1 = is_orthogonality_preserving_with(t, trials, sub_seed(seed, 2));
    let op1_witness = op1.witness.clone();
    match op1.verdict {
        OpVerdict::CertifiedTrue => report.set("op_level_1", Verdict::True, Basis::Certified, None),
        OpVerdict::CertifiedFalse => report.set(
            "op_level_1",
            Verdict::False,
            Basis::Certified,
            op1_witness.clone(),
        ),
        OpVerdict::Unknown => {
            report.set("op_level_1", Verdict::Unknown, Basis::Undecided, None);
            if let Some(f) = &op1.failure {
                report
                    .notes
                    .push(format!("factorization inconclusive: {f}"));
            }
        }
    }
    if let Some(f) = &op1.factorization {
        report.notes.push(
            "the recovered support map is set to zero outside the corner r r* B r* r".to_string(),
        );
        report.factorization = Some(f.clone());
    }

    // weighted TRO homomorphism: OP and the support preserves [.,.,.]
    let weighted = match (&op1.verdict, &op1.factorization) {
        (OpVerdict::CertifiedTrue, Some(f)) => {
            let out = check_triple_identity(&f.support, TripleIdentity::TroHom, Target::Support);
            report.set_check("weighted_tro_hom", out.clone());
            Verdict::from_bool(out.holds)
        }
        (OpVerdict::CertifiedFalse, _) => {
            report.set(
                "weighted_tro_hom",
                Verdict::False,
                Basis::Certified,
                op1_witness.clone(),
            );
            Verdict::False
        }
        _ => {
            report.set("weighted_tro_hom", Verdict::Unknown, Basis::Undecided, None);
            Verdict::Unknown
        }
    };

    // 2-OP: refutation at level 2 first, then structure
    let pair2 = refute_orthogonality_preserving(t, 2, trials, sub_seed(seed, 3));
    if let Some(w) = pair2.clone() {
        report.set("op_level_2", Verdict::False, Basis::Certified, Some(w));
    } else if op1.verdict == OpVerdict::CertifiedFalse {
        let lifted = op1_witness.as_ref().and_then(|w| lift_pair(w, 2));
        let witness = lifted.or_else(|| match t.amplify(2).map(|t2| factorize(&t2)) {
            Ok(Err(failure)) => failure.witness(2),
            _ => None,
        });
        report.set("op_level_2", Verdict::False, Basis::Certified, witness);
    } else if weighted == Verdict::True {
        // T_2 = h_(2) r_(2)* S_2 with S_2 a triple homomorphism
        report.set("op_level_2", Verdict::True, Basis::Certified, None);
    } else if weighted == Verdict::False {
        match t.amplify(2).map(|t2| factorize(&t2)) {
            Ok(Err(failure)) if failure.is_certificate() => report.set(
                "op_level_2",
                Verdict::False,
                Basis::Certified,
                failure.witness(2),
            ),
            Ok(Ok(_)) => report.set("op_level_2", Verdict::True, Basis::Certified, None),
            _ => report.set("op_level_2", Verdict::Unknown, Basis::Undecided, None),
        }
    } else {
        report.set("op_level_2", Verdict::Unknown, Basis::Undecided, None);
    }

    // c.o.p.: decided structurally as the weighted TRO property
    let cop_witness = match weighted {
        Verdict::False => pair2.or_else(|| report.witnesses.get("weighted_tro_hom").cloned()),
        _ => None,
    };
    let basis = if weighted == Verdict::Unknown {
        Basis::Undecided
    } else {
        Basis::Certified
    };
    report.set("cop", weighted, basis, cop_witness);
}

fn sampled(report: &mut ClassificationReport, key: &str, witness: Option<Witness>) {
    match witness {
        Some(w) => report.set(key, Verdict::False, Basis::Certified, Some(w)),
        None => report.set(key, Verdict::True, Basis::Sampled, None),
    }
}

fn zero_tro_sampling(t: &LinearMap, trials: usize, seed: u64) -> Result<Option<Witness>> {
    let tol = Tolerances::current();
    for i in 0..trials {
        let (a, b, c) = random_zero_tro_triple(t.domain(), 1, derive_seed(seed, i as u64));
        let (ta, tb, tc) = (t.apply(&a)?, t.apply(&b)?, t.apply(&c)?);
        let out = tro_product(&ta, &tb, &tc)?.operator_norm();
        if !tol.is_zero(
            out,
            ta.operator_norm() * tb.operator_norm() * tc.operator_norm(),
        ) {
            return Ok(Some(Witness::ZeroTroTriple { a, b, c }));
        }
    }
    Ok(None)
}

fn right_orthogonality_sampling(
    t: &LinearMap,
    trials: usize,
    seed: u64,
    notes: &mut Vec<String>,
) -> Result<Option<Witness>> {
    let tol = Tolerances::current();
    let proper = random_right_orthogonal_pair(t.domain(), 1, seed).is_ok();
    if !proper {
        notes.push(
            "domain is abelian: right-orthogonal pairs sampled as orthogonal pairs".to_string(),
        );
    }
    for i in 0..trials {
        let s = derive_seed(seed, i as u64);
        // alternate with orthogonal pairs so every block is exercised
        let (a, b) = if proper && i % 2 == 0 {
            random_right_orthogonal_pair(t.domain(), 1, s)?
        } else {
            random_orthogonal_pair(t.domain(), 1, s)
        };
        let (ta, tb) = (t.apply(&a)?, t.apply(&b)?);
        if !OrthogonalityDefect::of(&ta, &tb).is_right_orthogonal(&tol) {
            return Ok(Some(Witness::RightOrthogonalPair { a, b }));
        }
    }
    Ok(None)
}

/// The five-way report for weighted TRO homomorphisms: c.o.p., 2-OP,
/// weighted TRO homomorphism, zero-TRO-product preservation and
/// right-orthogonality preservation.
pub fn classify_cop(t: &LinearMap, trials: usize, seed: u64) -> Result<ClassificationReport> {
    let mut report = ClassificationReport::new("cop", trials, seed);
    structural_checks(&mut report, t);
    positivity(&mut report, t);
    orthogonality_levels(&mut report, t);
    let w = zero_tro_sampling(t, trials, sub_seed(seed, 4))?;
    sampled(&mut report, "zero_tro_product_preserving", w);
    let mut notes = Vec::new();
    let w = right_orthogonality_sampling(t, trials, sub_seed(seed, 5), &mut notes)?;
    report.notes.extend(notes);
    sampled(&mut report, "right_orthogonality_preserving", w);

    report.equivalence = [
        "cop",
        "op_level_2",
        "weighted_tro_hom",
        "zero_tro_product_preserving",
        "right_orthogonality_preserving",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    check_cop_consistency(&mut report);
    Ok(report)
}

fn check_cop_consistency(report: &mut ClassificationReport) {
    match report.verdict("op_level_1") {
        Verdict::True => {
            let values: Vec<(String, Verdict)> = report
                .equivalence
                .iter()
                .map(|k| (k.clone(), report.verdict(k)))
                .filter(|(_, v)| *v != Verdict::Unknown)
                .collect();
            if values.windows(2).any(|w| w[0].1 != w[1].1) {
                report.flag(format!(
                    "orthogonality preserving map with disagreeing verdicts: {values:?}"
                ));
            }
        }
        Verdict::False => {
            for key in ["cop", "op_level_2", "weighted_tro_hom"] {
                if report.verdict(key) == Verdict::True {
                    report.flag(format!(
                        "{key} is true for a map that is not orthogonality preserving"
                    ));
                }
            }
        }
        Verdict::Unknown => report
            .notes
            .push("orthogonality preservation undecided; equivalences not checked".to_string()),
    }
}

/// The five-way report for positive maps: c.p. order zero, preservation of
/// absolute values, preservation of zero products, 2-OP and c.o.p.
///
/// Fails with [`Error::NotPositive`] when positivity sampling finds a
/// counterexample.
pub fn classify_order_zero(
    t: &LinearMap,
    trials: usize,
    seed: u64,
) -> Result<ClassificationReport> {
    let mut report = ClassificationReport::new("order_zero", trials, seed);
    if !positivity(&mut report, t) {
        return Err(Error::NotPositive);
    }
    let sym = t.is_symmetric();
    let witness = (!sym).then(|| Witness::Symmetry {
        a: t.domain().basis_element(t.symmetry_defect().1),
    });
    report.set(
        "symmetric",
        Verdict::from_bool(sym),
        Basis::Certified,
        witness,
    );
    let tol = Tolerances::current();
    let domain = t.domain().clone();

    // (1) completely positive and order zero
    let mut order_zero = None;
    for i in 0..trials {
        let (a, b) =
            random_orthogonal_positive_pair(&domain, 1, derive_seed(sub_seed(seed, 6), i as u64));
        let (ta, tb) = (t.apply(&a)?, t.apply(&b)?);
        if !tol.is_zero(
            (&ta * &tb).operator_norm(),
            ta.operator_norm() * tb.operator_norm(),
        ) {
            order_zero = Some(Witness::OrthogonalPositivePair { a, b });
            break;
        }
    }
    sampled(&mut report, "order_zero", order_zero.clone());
    match report.verdict("completely_positive") {
        Verdict::False => {
            let w = report.witnesses.get("completely_positive").cloned();
            report.set("cp_order_zero", Verdict::False, Basis::Certified, w);
        }
        _ => sampled(&mut report, "cp_order_zero", order_zero),
    }

    // (2) |T(a)| = T(|a|), on general and on self-adjoint a
    let mut abs_witness = None;
    let mut rng = rng_from_seed(sub_seed(seed, 7));
    for i in 0..trials {
        let a = if i % 2 == 0 {
            random_element(&domain, 1, &mut rng)
        } else {
            random_self_adjoint(&domain, 1, derive_seed(sub_seed(seed, 8), i as u64))
        };
        let lhs = absolute_value(&t.apply(&a)?)?;
        let rhs = t.apply(&absolute_value(&a)?)?;
        if !tol.is_zero(
            lhs.distance(&rhs),
            lhs.operator_norm() + rhs.operator_norm(),
        ) {
            abs_witness = Some(Witness::AbsoluteValue { a });
            break;
        }
    }
    sampled(&mut report, "absolute_value_preserving", abs_witness);

    // (3) zero products
    let mut zp = None;
    for i in 0..trials {
        let (a, b) = random_zero_product_pair(&domain, 1, derive_seed(sub_seed(seed, 9), i as u64));
        let (ta, tb) = (t.apply(&a)?, t.apply(&b)?);
        if !tol.is_zero(
            (&ta * &tb).operator_norm(),
            ta.operator_norm() * tb.operator_norm(),
        ) {
            zp = Some(Witness::ZeroProductPair { a, b });
            break;
        }
    }
    sampled(&mut report, "zero_product_preserving", zp);

    // (4), (5)
    orthogonality_levels(&mut report, t);

    report.equivalence = [
        "cp_order_zero",
        "absolute_value_preserving",
        "zero_product_preserving",
        "op_level_2",
        "cop",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let values: Vec<(String, Verdict)> = report
        .equivalence
        .iter()
        .map(|k| (k.clone(), report.verdict(k)))
        .filter(|(_, v)| *v != Verdict::Unknown)
        .collect();
    if values.windows(2).any(|w| w[0].1 != w[1].1) {
        report.flag(format!(
            "positive map with disagreeing verdicts: {values:?}"
        ));
    }
    Ok(report)
}
