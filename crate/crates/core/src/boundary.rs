//! Boundary-link obstruction for the 4-strand pretzel family and a general
//! longitude membership test.
//!
//! The pipeline: build the Wirtinger data for L(p,n), take Fox derivatives
//! of the relators and the longitude with respect to the distinguished
//! generator, push every variable except the distinguished one to 1, and ask
//! whether the longitude derivative lies in the ideal generated by the
//! relator derivatives. Failure of membership obstructs the link from being
//! a boundary link; success is inconclusive by design.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::foxcalc::{
    fox_derivative, AbelianizationMap, FoxError, GroupWord, Presentation, Relator,
};
use crate::laurent::{LaurentError, LaurentPolynomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundaryError {
    #[error("pretzel parameters must satisfy p >= 1 and n >= 1 (got p={p}, n={n})")]
    InvalidParams { p: u32, n: u32 },
    #[error("presentation has no longitude")]
    MissingLongitude,
    #[error("presentation has no distinguished generator")]
    MissingDistinguishedGenerator,
    #[error(transparent)]
    Fox(#[from] FoxError),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// Parameters (p, n) of the pretzel link P(2p+1, 2n, -2n, -2p-1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PretzelParams {
    p: u32,
    n: u32,
}

impl PretzelParams {
    pub fn new(p: u32, n: u32) -> Result<Self, BoundaryError> {
        if p == 0 || n == 0 {
            return Err(BoundaryError::InvalidParams { p, n });
        }
        Ok(Self { p, n })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Obstructed,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionWitness {
    /// Monic-normalized gcd of the specialized relator derivatives; absent
    /// when every generator specializes to zero.
    pub gcd: Option<LaurentPolynomial>,
    /// Nonzero remainder of the target modulo the gcd (the target itself
    /// when there is no gcd): the concrete divisibility failure.
    pub remainder: LaurentPolynomial,
}

/// Outcome of the longitude membership test, carrying enough data to replay
/// the decision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub verdict: Verdict,
    /// The specialized longitude derivative.
    pub target: LaurentPolynomial,
    /// Specialized relator derivatives, zeros dropped, duplicates removed.
    pub generators_specialized: Vec<LaurentPolynomial>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ObstructionWitness>,
}

impl ObstructionReport {
    /// Recompute the membership decision from the stored target and
    /// generators and compare with the stored verdict.
    pub fn recheck(&self) -> Result<bool, LaurentError> {
        let member = LaurentPolynomial::ideal_membership_single_var(
            &self.target,
            &self.generators_specialized,
        )?;
        let expected = if member { Verdict::Inconclusive } else { Verdict::Obstructed };
        Ok(expected == self.verdict)
    }
}

fn word(text: &str) -> GroupWord {
    GroupWord::parse(text).expect("fixed word spelling parses")
}

/// The Wirtinger-derived presentation data for L(p,n): generators a, b, c, d
/// with images s^-1, s, t, s; relators
///
/// r1 = (a b^-1)^p  a b a^-1  (b a^-1)^p  (a d^-1)^p  a d^-1 a^-1  (d a^-1)^p
/// r2 = (a b^-1)^p  a d^-1 a^-1  (b a^-1)^p  (b c^-1)^n  b  (c b^-1)^n
///
/// plus an opaque third relator supported on {a, c, d} (so its derivative
/// with respect to b vanishes); longitude b^n d^-n (the t=1 reduction of the
/// true longitude), distinguished generator b.
pub fn pretzel_presentation(params: PretzelParams) -> Presentation {
    let p = i64::from(params.p);
    let n = i64::from(params.n);
    let r1 = word("a b^-1")
        .pow(p)
        .concat(&word("a b a^-1"))
        .concat(&word("b a^-1").pow(p))
        .concat(&word("a d^-1").pow(p))
        .concat(&word("a d^-1 a^-1"))
        .concat(&word("d a^-1").pow(p));
    let r2 = word("a b^-1")
        .pow(p)
        .concat(&word("a d^-1 a^-1"))
        .concat(&word("b a^-1").pow(p))
        .concat(&word("b c^-1").pow(n))
        .concat(&GroupWord::generator("b"))
        .concat(&word("c b^-1").pow(n));
    let longitude = GroupWord::generator("b")
        .pow(n)
        .concat(&GroupWord::generator("d").pow(-n));
    let abelianization = AbelianizationMap::new([
        ("a".to_string(), LaurentPolynomial::monomial("s", -1)),
        ("b".to_string(), LaurentPolynomial::monomial("s", 1)),
        ("c".to_string(), LaurentPolynomial::monomial("t", 1)),
        ("d".to_string(), LaurentPolynomial::monomial("s", 1)),
    ])
    .expect("fixed images are unit monomials");
    Presentation::new(
        vec!["a".into(), "b".into(), "c".into(), "d".into()],
        vec![
            Relator::Word(r1),
            Relator::Word(r2),
            Relator::opaque(["a", "c", "d"]),
        ],
        abelianization,
        Some(longitude),
        Some("b".to_string()),
    )
    .expect("pretzel presentation is always valid")
}

/// Closed forms for the b-derivatives of r1 and r2:
///
/// d_b(r1) = s^-1 - s^-2 + ... + s^-(2p+1)   (alternating signs)
/// d_b(r2) = d_b(r1) + (t^-1 - 1) * (1 + s t^-1 + ... + (s t^-1)^(n-1))
pub fn relator_derivative_closed_form(
    params: PretzelParams,
) -> (LaurentPolynomial, LaurentPolynomial) {
    let mut first = LaurentPolynomial::zero();
    for i in 1..=2 * i64::from(params.p) + 1 {
        let sign = if i % 2 == 1 { 1 } else { -1 };
        first = first.add(&LaurentPolynomial::term(sign, &[("s", (-i).into())]));
    }
    let mut geom = LaurentPolynomial::zero();
    for j in 0..i64::from(params.n) {
        geom = geom.add(&LaurentPolynomial::term(
            1,
            &[("s", j.into()), ("t", (-j).into())],
        ));
    }
    let t_factor = LaurentPolynomial::monomial("t", -1).sub(&LaurentPolynomial::one());
    let second = first.add(&t_factor.mul(&geom));
    (first, second)
}

/// Longitude membership test for an arbitrary presentation with a longitude
/// and a distinguished generator.
///
/// Every ring variable other than those of the distinguished generator's
/// abelianization image is specialized to 1 before the (one-variable) ideal
/// membership question is asked.
pub fn longitude_obstruction(pres: &Presentation) -> Result<ObstructionReport, BoundaryError> {
    let longitude = pres.longitude.as_ref().ok_or(BoundaryError::MissingLongitude)?;
    let g = pres
        .distinguished_generator
        .as_deref()
        .ok_or(BoundaryError::MissingDistinguishedGenerator)?;
    let m = &pres.abelianization;
    let target_raw = fox_derivative(longitude, g, m)?;
    let mut gens_raw = Vec::with_capacity(pres.relators.len());
    for r in &pres.relators {
        gens_raw.push(r.derivative(g, m)?);
    }
    let keep: BTreeSet<String> = m.image(g)?.variables().iter().cloned().collect();
    let mut assignments = BTreeMap::new();
    for poly in gens_raw.iter().chain(std::iter::once(&target_raw)) {
        for v in poly.variables() {
            if !keep.contains(v) {
                assignments.insert(v.clone(), LaurentPolynomial::one());
            }
        }
    }
    let target = target_raw.specialize(&assignments)?;
    let mut generators: Vec<LaurentPolynomial> = Vec::new();
    for raw in &gens_raw {
        let sp = raw.specialize(&assignments)?;
        if !sp.is_zero() && !generators.contains(&sp) {
            generators.push(sp);
        }
    }
    let member = LaurentPolynomial::ideal_membership_single_var(&target, &generators)?;
    let (verdict, witness) = if member {
        (Verdict::Inconclusive, None)
    } else {
        let gcd = LaurentPolynomial::gcd_single_var(&generators)?;
        let remainder = match &gcd {
            Some(d) => LaurentPolynomial::remainder_single_var(d, &target)?,
            None => target.clone(),
        };
        (Verdict::Obstructed, Some(ObstructionWitness { gcd, remainder }))
    };
    Ok(ObstructionReport { verdict, target, generators_specialized: generators, witness })
}

/// Full pipeline verdict for L(p,n).
pub fn is_pretzel_boundary_obstructed(params: PretzelParams) -> bool {
    let report = longitude_obstruction(&pretzel_presentation(params))
        .expect("pretzel pipeline cannot fail on valid parameters");
    report.verdict == Verdict::Obstructed
}

/// Theorem-level closed form: obstructed iff n is not a multiple of 2(2p+1).
pub fn closed_form_obstructed(params: PretzelParams) -> bool {
    params.n % (2 * (2 * params.p + 1)) != 0
}

/// One cell of a pretzel grid scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PretzelScanRow {
    pub p: u32,
    pub n: u32,
    pub pipeline_obstructed: bool,
    pub closed_form_obstructed: bool,
    pub agree: bool,
}

fn scan_cell(params: PretzelParams) -> PretzelScanRow {
    let pipeline = is_pretzel_boundary_obstructed(params);
    let closed = closed_form_obstructed(params);
    PretzelScanRow {
        p: params.p,
        n: params.n,
        pipeline_obstructed: pipeline,
        closed_form_obstructed: closed,
        agree: pipeline == closed,
    }
}

fn grid(p_max: u32, n_max: u32) -> Result<Vec<PretzelParams>, BoundaryError> {
    if p_max == 0 || n_max == 0 {
        return Err(BoundaryError::InvalidParams { p: p_max, n: n_max });
    }
    let mut cells = Vec::with_capacity((p_max as usize) * (n_max as usize));
    for p in 1..=p_max {
        for n in 1..=n_max {
            cells.push(PretzelParams { p, n });
        }
    }
    Ok(cells)
}

/// Scan the (p, n) grid; rows in row-major (p, n) order. Dispatches to the
/// parallel implementation when the `parallel` feature is on.
pub fn scan_pretzel_grid(p_max: u32, n_max: u32) -> Result<Vec<PretzelScanRow>, BoundaryError> {
    #[cfg(feature = "parallel")]
    {
        scan_pretzel_grid_par(p_max, n_max)
    }
    #[cfg(not(feature = "parallel"))]
    {
        scan_pretzel_grid_seq(p_max, n_max)
    }
}

pub fn scan_pretzel_grid_seq(
    p_max: u32,
    n_max: u32,
) -> Result<Vec<PretzelScanRow>, BoundaryError> {
    Ok(grid(p_max, n_max)?.into_iter().map(scan_cell).collect())
}

#[cfg(feature = "parallel")]
pub fn scan_pretzel_grid_par(
    p_max: u32,
    n_max: u32,
) -> Result<Vec<PretzelScanRow>, BoundaryError> {
    use rayon::prelude::*;
    Ok(grid(p_max, n_max)?.into_par_iter().map(scan_cell).collect())
}

/// Spelled-word derivatives for both relators with respect to b.
pub fn spelled_relator_derivatives(
    params: PretzelParams,
) -> (LaurentPolynomial, LaurentPolynomial) {
    let pres = pretzel_presentation(params);
    let m = &pres.abelianization;
    let take = |r: &Relator| match r {
        Relator::Word(w) => fox_derivative(w, "b", m).expect("declared generators"),
        Relator::Opaque { .. } => unreachable!("first two relators are spelled"),
    };
    (take(&pres.relators[0]), take(&pres.relators[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foxcalc::abelianize;

    fn lp(text: &str) -> LaurentPolynomial {
        LaurentPolynomial::parse(text).unwrap()
    }

    fn params(p: u32, n: u32) -> PretzelParams {
        PretzelParams::new(p, n).unwrap()
    }

    #[test]
    fn rejects_zero_parameters() {
        assert!(PretzelParams::new(0, 1).is_err());
        assert!(PretzelParams::new(1, 0).is_err());
        assert!(scan_pretzel_grid_seq(0, 5).is_err());
    }

    #[test]
    fn r1_spelling_at_p1() {
        let pres = pretzel_presentation(params(1, 1));
        let Relator::Word(r1) = &pres.relators[0] else { panic!("r1 is spelled") };
        // The concatenation contains one cancelling pair; the stored word is
        // the free reduction, which parsing the raw spelling also produces.
        let raw = GroupWord::parse("ab-1aba-1ba-1ad-1ad-1a-1da-1").unwrap();
        assert_eq!(r1, &raw);
        assert_eq!(
            r1.to_string(),
            "a b^-1 a b a^-1 b d^-1 a d^-1 a^-1 d a^-1"
        );
        assert_eq!(r1.len(), 12);
    }

    #[test]
    fn relators_die_under_abelianization() {
        for (p, n) in [(1, 1), (1, 6), (2, 5), (3, 4), (6, 40)] {
            let pres = pretzel_presentation(params(p, n));
            for r in &pres.relators {
                if let Relator::Word(w) = r {
                    assert!(abelianize(w, &pres.abelianization).unwrap().is_one());
                }
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        let (first, _) = relator_derivative_closed_form(params(1, 1));
        assert_eq!(first, lp("s^-3 - s^-2 + s^-1"));
        let (first, _) = relator_derivative_closed_form(params(2, 1));
        assert_eq!(first, lp("s^-5 - s^-4 + s^-3 - s^-2 + s^-1"));
        let (_, second) = relator_derivative_closed_form(params(1, 2));
        let expected = lp("s^-3 - s^-2 + s^-1")
            .add(&lp("t^-1 - 1").mul(&lp("1 + s*t^-1")));
        assert_eq!(second, expected);
    }

    #[test]
    fn r2_derivative_at_1_1() {
        let (_, second) = spelled_relator_derivatives(params(1, 1));
        assert_eq!(second, lp("s^-3 - s^-2 + s^-1 + t^-1 - 1"));
    }

    #[test]
    fn spelled_matches_closed_form_small_grid() {
        for p in 1..=3 {
            for n in 1..=8 {
                let pr = params(p, n);
                let (s1, s2) = spelled_relator_derivatives(pr);
                let (c1, c2) = relator_derivative_closed_form(pr);
                assert_eq!(s1, c1, "p={p} n={n} first");
                assert_eq!(s2, c2, "p={p} n={n} second");
            }
        }
    }

    #[test]
    fn t_specialization_collapses_r2_to_r1() {
        for (p, n) in [(1, 1), (2, 3), (3, 7), (4, 12)] {
            let (c1, c2) = relator_derivative_closed_form(params(p, n));
            let mut at_one = BTreeMap::new();
            at_one.insert("t".to_string(), LaurentPolynomial::one());
            assert_eq!(c2.specialize(&at_one).unwrap(), c1);
        }
    }

    #[test]
    fn obstruction_report_at_1_1() {
        let report = longitude_obstruction(&pretzel_presentation(params(1, 1))).unwrap();
        assert_eq!(report.verdict, Verdict::Obstructed);
        assert_eq!(report.target, lp("1"));
        assert_eq!(report.generators_specialized, vec![lp("s^-3 - s^-2 + s^-1")]);
        let w = report.witness.as_ref().unwrap();
        assert!(!w.remainder.is_zero());
        assert_eq!(w.gcd.as_ref().unwrap(), &lp("1 - s + s^2"));
        assert!(report.recheck().unwrap());
    }

    #[test]
    fn membership_holds_at_1_6() {
        let report = longitude_obstruction(&pretzel_presentation(params(1, 6))).unwrap();
        assert_eq!(report.verdict, Verdict::Inconclusive);
        assert!(report.witness.is_none());
        assert!(report.recheck().unwrap());
    }

    #[test]
    fn identity_longitude_is_inconclusive() {
        let mut pres = pretzel_presentation(params(1, 1));
        pres.longitude = Some(GroupWord::identity());
        let report = longitude_obstruction(&pres).unwrap();
        assert_eq!(report.verdict, Verdict::Inconclusive);
        assert!(report.target.is_zero());
    }

    #[test]
    fn missing_data_errors() {
        let mut pres = pretzel_presentation(params(1, 1));
        pres.longitude = None;
        assert!(matches!(
            longitude_obstruction(&pres),
            Err(BoundaryError::MissingLongitude)
        ));
        let mut pres = pretzel_presentation(params(1, 1));
        pres.distinguished_generator = None;
        assert!(matches!(
            longitude_obstruction(&pres),
            Err(BoundaryError::MissingDistinguishedGenerator)
        ));
    }

    #[test]
    fn pipeline_verdict_examples() {
        assert!(is_pretzel_boundary_obstructed(params(1, 1)));
        assert!(!is_pretzel_boundary_obstructed(params(2, 10)));
        assert!(is_pretzel_boundary_obstructed(params(2, 5)));
        assert!(!is_pretzel_boundary_obstructed(params(1, 6)));
        assert!(!is_pretzel_boundary_obstructed(params(1, 12)));
    }

    #[test]
    fn grid_scan_agrees_and_orders_rows() {
        let rows = scan_pretzel_grid_seq(2, 12).unwrap();
        assert_eq!(rows.len(), 24);
        assert!(rows.iter().all(|r| r.agree));
        assert_eq!((rows[0].p, rows[0].n), (1, 1));
        assert_eq!((rows[23].p, rows[23].n), (2, 12));
        // The dispatching wrapper returns identical rows.
        assert_eq!(scan_pretzel_grid(2, 12).unwrap(), rows);
    }

    #[test]
    fn report_serde_round_trip() {
        let report = longitude_obstruction(&pretzel_presentation(params(2, 3))).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        let back: ObstructionReport = serde_json::from_str(&json).unwrap();
        assert_eq!(report, back);
    }
}
