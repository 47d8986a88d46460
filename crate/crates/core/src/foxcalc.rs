//! Free-group words, finite presentations, and Fox free derivatives.
//!
//! Words are stored freely reduced. Derivatives are taken directly in the
//! abelianized Laurent ring: the only consumer is the longitude obstruction,
//! which never needs values in the noncommutative group ring, and the
//! abelianized walk is a single pass over the word.
//!
//! # Word syntax
//!
//! Words are whitespace-separated tokens. A token is one of
//!
//! * `name^k` - the generator `name` raised to a nonzero integer power,
//! * a bare alphabetic name such as `a` or `gen` - a single positive letter,
//! * a compact run such as `ab-1a` or `b2d-2` - single-letter generators,
//!   each optionally followed by a signed integer exponent.
//!
//! Multi-character generator names that contain digits need the explicit
//! `name^k` form.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::LaurentPolynomial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FoxError {
    #[error("cannot parse word token `{token}`")]
    ParseWord { token: String },
    #[error("generator `{0}` has no abelianization image")]
    UnknownGenerator(String),
    #[error("abelianization image of `{generator}` is not a coefficient-1 unit monomial")]
    NonUnitImage { generator: String },
    #[error("letter `{letter}` is not a declared generator")]
    UndeclaredLetter { letter: String },
    #[error("relator {index} does not abelianize to 1")]
    RelatorNotKilled { index: usize },
    #[error("opaque relator support set mentions undeclared generator `{0}`")]
    OpaqueSupportUndeclared(String),
    #[error("derivative with respect to `{generator}` of an opaque relator with `{generator}` in its support")]
    OpaqueDerivative { generator: String },
    #[error("distinguished generator `{0}` is not declared")]
    UndeclaredDistinguished(String),
    #[error("presentation document error: {0}")]
    Document(String),
}

/// One letter of a word: a generator symbol with exponent +1 or -1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub symbol: String,
    pub inverse: bool,
}

impl Letter {
    pub fn new(symbol: &str, inverse: bool) -> Self {
        Self { symbol: symbol.to_string(), inverse }
    }

    fn is_inverse_of(&self, other: &Letter) -> bool {
        self.symbol == other.symbol && self.inverse != other.inverse
    }
}

/// A freely reduced word in a free group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GroupWord {
    letters: Vec<Letter>,
}

impl GroupWord {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn generator(symbol: &str) -> Self {
        Self { letters: vec![Letter::new(symbol, false)] }
    }

    /// Build from any letter sequence, freely reducing as letters arrive.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut stack: Vec<Letter> = Vec::new();
        for l in letters {
            if stack.last().is_some_and(|top| top.is_inverse_of(&l)) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        Self { letters: stack }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.is_empty()
    }

    pub fn concat(&self, other: &Self) -> Self {
        Self::from_letters(self.letters.iter().chain(other.letters.iter()).cloned())
    }

    pub fn inverse(&self) -> Self {
        Self {
            letters: self
                .letters
                .iter()
                .rev()
                .map(|l| Letter::new(&l.symbol, !l.inverse))
                .collect(),
        }
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Self::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// u w u^-1 where u is `by`.
    pub fn conjugated_by(&self, by: &Self) -> Self {
        by.concat(self).concat(&by.inverse())
    }

    pub fn generators_used(&self) -> BTreeSet<String> {
        self.letters.iter().map(|l| l.symbol.clone()).collect()
    }

    pub fn parse(text: &str) -> Result<Self, FoxError> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            for (symbol, exp) in parse_token(token)? {
                let inverse = exp < 0;
                for _ in 0..exp.unsigned_abs() {
                    letters.push(Letter::new(&symbol, inverse));
                }
            }
        }
        Ok(Self::from_letters(letters))
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if l.inverse {
                write!(f, "{}^-1", l.symbol)?;
            } else {
                write!(f, "{}", l.symbol)?;
            }
        }
        Ok(())
    }
}

fn is_plain_name(token: &str) -> bool {
    !token.is_empty()
        && token
            .chars()
            .all(|c| c.is_ascii_alphabetic() || c == '_')
}

fn parse_token(token: &str) -> Result<Vec<(String, i64)>, FoxError> {
    let bad = || FoxError::ParseWord { token: token.to_string() };
    if token == "1" {
        return Ok(Vec::new());
    }
    if let Some((name, exp)) = token.split_once('^') {
        if !name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            return Err(bad());
        }
        let exp: i64 = exp.parse().map_err(|_| bad())?;
        return Ok(vec![(name.to_string(), exp)]);
    }
    if is_plain_name(token) {
        return Ok(vec![(token.to_string(), 1)]);
    }
    // Compact run of single-letter generators with optional signed exponents.
    let bytes = token.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if !bytes[i].is_ascii_alphabetic() {
            return Err(bad());
        }
        let symbol = (bytes[i] as char).to_string();
        i += 1;
        let start = i;
        let mut j = i;
        if j < bytes.len() && bytes[j] == b'-' {
            j += 1;
        }
        let digits_from = j;
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        let exp = if j > digits_from {
            i = j;
            token[start..j].parse::<i64>().map_err(|_| bad())?
        } else {
            if j > start {
                // A dangling `-` with no digits.
                return Err(bad());
            }
            1
        };
        out.push((symbol, exp));
    }
    Ok(out)
}

/// Generator-to-unit-monomial images defining the abelianization onto a
/// Laurent ring. Images must be single-term monomials with coefficient 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianizationMap {
    images: BTreeMap<String, LaurentPolynomial>,
}

impl AbelianizationMap {
    pub fn new<I>(images: I) -> Result<Self, FoxError>
    where
        I: IntoIterator<Item = (String, LaurentPolynomial)>,
    {
        let images: BTreeMap<String, LaurentPolynomial> = images.into_iter().collect();
        for (g, img) in &images {
            let coeff_one = img
                .terms()
                .next()
                .is_some_and(|(_, c)| c.is_one());
            if !img.is_unit() || !coeff_one {
                return Err(FoxError::NonUnitImage { generator: g.clone() });
            }
        }
        Ok(Self { images })
    }

    pub fn image(&self, generator: &str) -> Result<&LaurentPolynomial, FoxError> {
        self.images
            .get(generator)
            .ok_or_else(|| FoxError::UnknownGenerator(generator.to_string()))
    }

    pub fn generators(&self) -> impl Iterator<Item = &str> {
        self.images.keys().map(String::as_str)
    }

    pub fn contains(&self, generator: &str) -> bool {
        self.images.contains_key(generator)
    }

    /// All ring variables used by the images.
    pub fn variables(&self) -> BTreeSet<String> {
        self.images
            .values()
            .flat_map(|p| p.variables().iter().cloned())
            .collect()
    }
}

/// Product of letter images: the abelianization of `w`, always a unit monomial.
pub fn abelianize(w: &GroupWord, m: &AbelianizationMap) -> Result<LaurentPolynomial, FoxError> {
    let mut out = LaurentPolynomial::one();
    for l in w.letters() {
        let img = m.image(&l.symbol)?;
        let factor = if l.inverse {
            img.unit_inverse().expect("images are units by construction")
        } else {
            img.clone()
        };
        out = out.mul(&factor);
    }
    Ok(out)
}

/// Left Fox derivative composed with the abelianization.
///
/// Defined by the axioms d(g)=1, d(g^-1) = -m(g)^-1, d(h^{+-1}) = 0 for
/// h != g, and the product rule d(uv) = d(u) + abelianize(u) d(v). A single
/// walk accumulates the running prefix monomial.
pub fn fox_derivative(
    w: &GroupWord,
    g: &str,
    m: &AbelianizationMap,
) -> Result<LaurentPolynomial, FoxError> {
    if !m.contains(g) {
        return Err(FoxError::UnknownGenerator(g.to_string()));
    }
    let mut d = LaurentPolynomial::zero();
    let mut prefix = LaurentPolynomial::one();
    for l in w.letters() {
        let img = m.image(&l.symbol)?;
        if l.inverse {
            let inv = img.unit_inverse().expect("images are units by construction");
            prefix = prefix.mul(&inv);
            if l.symbol == g {
                d = d.sub(&prefix);
            }
        } else {
            if l.symbol == g {
                d = d.add(&prefix);
            }
            prefix = prefix.mul(img);
        }
    }
    Ok(d)
}

/// A relator: either a spelled word, or an opaque relator known only by the
/// set of generators it may mention (derivatives with respect to anything
/// outside the support are zero).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Relator {
    Word(GroupWord),
    Opaque { support: BTreeSet<String> },
}

impl Relator {
    pub fn word(w: GroupWord) -> Self {
        Relator::Word(w)
    }

    pub fn opaque<I: IntoIterator<Item = S>, S: Into<String>>(support: I) -> Self {
        Relator::Opaque { support: support.into_iter().map(Into::into).collect() }
    }

    /// Fox derivative of the relator with respect to `g`.
    pub fn derivative(
        &self,
        g: &str,
        m: &AbelianizationMap,
    ) -> Result<LaurentPolynomial, FoxError> {
        match self {
            Relator::Word(w) => fox_derivative(w, g, m),
            Relator::Opaque { support } => {
                if support.contains(g) {
                    Err(FoxError::OpaqueDerivative { generator: g.to_string() })
                } else {
                    Ok(LaurentPolynomial::zero())
                }
            }
        }
    }
}

/// A finite presentation with abelianization data and optional longitude.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<Relator>,
    pub abelianization: AbelianizationMap,
    pub longitude: Option<GroupWord>,
    pub distinguished_generator: Option<String>,
}

impl Presentation {
    pub fn new(
        generators: Vec<String>,
        relators: Vec<Relator>,
        abelianization: AbelianizationMap,
        longitude: Option<GroupWord>,
        distinguished_generator: Option<String>,
    ) -> Result<Self, FoxError> {
        let p = Self { generators, relators, abelianization, longitude, distinguished_generator };
        p.validate()?;
        Ok(p)
    }

    /// Check every structural invariant: declared letters, unit images for
    /// all generators, relators killed by the abelianization, opaque support
    /// sets inside the generator list.
    pub fn validate(&self) -> Result<(), FoxError> {
        let declared: BTreeSet<&str> = self.generators.iter().map(String::as_str).collect();
        for g in &self.generators {
            self.abelianization.image(g)?;
        }
        let check_word = |w: &GroupWord| -> Result<(), FoxError> {
            for l in w.letters() {
                if !declared.contains(l.symbol.as_str()) {
                    return Err(FoxError::UndeclaredLetter { letter: l.symbol.clone() });
                }
            }
            Ok(())
        };
        for (i, r) in self.relators.iter().enumerate() {
            match r {
                Relator::Word(w) => {
                    check_word(w)?;
                    if !abelianize(w, &self.abelianization)?.is_one() {
                        return Err(FoxError::RelatorNotKilled { index: i });
                    }
                }
                Relator::Opaque { support } => {
                    for s in support {
                        if !declared.contains(s.as_str()) {
                            return Err(FoxError::OpaqueSupportUndeclared(s.clone()));
                        }
                    }
                }
            }
        }
        if let Some(l) = &self.longitude {
            check_word(l)?;
        }
        if let Some(d) = &self.distinguished_generator {
            if !declared.contains(d.as_str()) {
                return Err(FoxError::UndeclaredDistinguished(d.clone()));
            }
        }
        Ok(())
    }

    pub fn to_toml_string(&self) -> String {
        let doc = PresentationDoc {
            generators: self.generators.clone(),
            relators: self
                .relators
                .iter()
                .map(|r| match r {
                    Relator::Word(w) => RelatorDoc::Word(w.to_string()),
                    Relator::Opaque { support } => RelatorDoc::Opaque {
                        opaque: support.iter().cloned().collect(),
                    },
                })
                .collect(),
            longitude: self.longitude.as_ref().map(|w| w.to_string()),
            distinguished_generator: self.distinguished_generator.clone(),
            abelianization: self
                .abelianization
                .images
                .iter()
                .map(|(g, p)| (g.clone(), p.to_string()))
                .collect(),
        };
        toml::to_string(&doc).expect("presentation serializes")
    }

    pub fn from_toml_str(text: &str) -> Result<Self, FoxError> {
        let doc: PresentationDoc =
            toml::from_str(text).map_err(|e| FoxError::Document(e.to_string()))?;
        let mut images = Vec::new();
        for (g, img) in &doc.abelianization {
            let p = LaurentPolynomial::parse(img)
                .map_err(|e| FoxError::Document(format!("image of `{g}`: {e}")))?;
            images.push((g.clone(), p));
        }
        let abelianization = AbelianizationMap::new(images)?;
        let mut relators = Vec::new();
        for r in &doc.relators {
            relators.push(match r {
                RelatorDoc::Word(text) => Relator::Word(GroupWord::parse(text)?),
                RelatorDoc::Opaque { opaque } => Relator::opaque(opaque.clone()),
            });
        }
        let longitude = doc.longitude.as_deref().map(GroupWord::parse).transpose()?;
        Self::new(
            doc.generators,
            relators,
            abelianization,
            longitude,
            doc.distinguished_generator,
        )
    }
}

#[derive(Serialize, Deserialize)]
struct PresentationDoc {
    generators: Vec<String>,
    relators: Vec<RelatorDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    longitude: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    distinguished_generator: Option<String>,
    abelianization: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RelatorDoc {
    Word(String),
    Opaque { opaque: Vec<String> },
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pretzel_map() -> AbelianizationMap {
        AbelianizationMap::new([
            ("a".to_string(), LaurentPolynomial::monomial("s", -1)),
            ("b".to_string(), LaurentPolynomial::monomial("s", 1)),
            ("c".to_string(), LaurentPolynomial::monomial("t", 1)),
            ("d".to_string(), LaurentPolynomial::monomial("s", 1)),
        ])
        .unwrap()
    }

    fn lp(text: &str) -> LaurentPolynomial {
        LaurentPolynomial::parse(text).unwrap()
    }

    #[test]
    fn free_reduction_on_construction() {
        let w = GroupWord::parse("a a^-1").unwrap();
        assert!(w.is_identity());
        let w = GroupWord::parse("a b b^-1 a^-1 c").unwrap();
        assert_eq!(w.to_string(), "c");
        // Reduction cascades through the middle.
        let w = GroupWord::parse("a b c c^-1 b^-1 a^-1").unwrap();
        assert!(w.is_identity());
    }

    #[test]
    fn parse_forms_agree() {
        let spaced = GroupWord::parse("a b^-1 a b a^-1").unwrap();
        let compact = GroupWord::parse("ab-1aba-1").unwrap();
        let ascii = GroupWord::parse("a b-1 a b a-1").unwrap();
        assert_eq!(spaced, compact);
        assert_eq!(spaced, ascii);
        assert_eq!(GroupWord::parse("b^2 d^-2").unwrap(), GroupWord::parse("b2d-2").unwrap());
        assert_eq!(GroupWord::parse("1").unwrap(), GroupWord::identity());
    }

    #[test]
    fn parse_rejects_malformed_tokens() {
        for text in ["a^", "a^x", "2a", "a--1", "-a", "a^1.5", "a-"] {
            assert!(GroupWord::parse(text).is_err(), "{text}");
        }
    }

    #[test]
    fn inverse_and_pow() {
        let w = GroupWord::parse("a b^-1").unwrap();
        assert_eq!(w.inverse().to_string(), "b a^-1");
        assert!(w.concat(&w.inverse()).is_identity());
        assert_eq!(w.pow(2).to_string(), "a b^-1 a b^-1");
        assert_eq!(w.pow(-1), w.inverse());
        assert!(w.pow(0).is_identity());
    }

    #[test]
    fn abelianize_examples() {
        let m = pretzel_map();
        let w = GroupWord::parse("a b^-1").unwrap();
        assert_eq!(abelianize(&w, &m).unwrap(), lp("s^-2"));
        assert_eq!(abelianize(&GroupWord::identity(), &m).unwrap(), lp("1"));
    }

    #[test]
    fn fox_axioms() {
        let m = pretzel_map();
        let b = GroupWord::generator("b");
        assert_eq!(fox_derivative(&b, "b", &m).unwrap(), lp("1"));
        assert_eq!(fox_derivative(&b.inverse(), "b", &m).unwrap(), lp("-s^-1"));
        assert_eq!(fox_derivative(&b, "a", &m).unwrap(), lp("0"));
        assert!(matches!(
            fox_derivative(&b, "x", &m),
            Err(FoxError::UnknownGenerator(_))
        ));
    }

    #[test]
    fn longitude_derivative_n2() {
        let m = pretzel_map();
        let w = GroupWord::parse("b^2 d^-2").unwrap();
        assert_eq!(fox_derivative(&w, "b", &m).unwrap(), lp("1 + s"));
    }

    #[test]
    fn opaque_relator_derivative() {
        let m = pretzel_map();
        let r = Relator::opaque(["a", "c", "d"]);
        assert!(r.derivative("b", &m).unwrap().is_zero());
        assert!(matches!(
            r.derivative("a", &m),
            Err(FoxError::OpaqueDerivative { .. })
        ));
    }

    #[test]
    fn abelianization_map_rejects_bad_images() {
        for bad in ["0", "2", "1 + s", "-s"] {
            let r = AbelianizationMap::new([("a".to_string(), lp(bad))]);
            assert!(matches!(r, Err(FoxError::NonUnitImage { .. })), "{bad}");
        }
    }

    #[test]
    fn presentation_validation() {
        let m = pretzel_map();
        // A relator with an undeclared letter.
        let r = Presentation::new(
            vec!["a".into(), "b".into()],
            vec![Relator::Word(GroupWord::parse("a x").unwrap())],
            AbelianizationMap::new([
                ("a".to_string(), lp("s^-1")),
                ("b".to_string(), lp("s")),
                ("x".to_string(), lp("s")),
            ])
            .unwrap(),
            None,
            None,
        );
        assert!(matches!(r, Err(FoxError::UndeclaredLetter { .. })));
        // A relator that survives abelianization (b d maps to s^2).
        let r = Presentation::new(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            vec![Relator::Word(GroupWord::parse("b d").unwrap())],
            m,
            None,
            None,
        );
        assert!(matches!(r, Err(FoxError::RelatorNotKilled { index: 0 })));
    }

    #[test]
    fn presentation_toml_round_trip() {
        let p = Presentation::new(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            vec![
                Relator::Word(GroupWord::parse("a b^-1 a^-1 b").unwrap()),
                Relator::opaque(["a", "c", "d"]),
            ],
            pretzel_map(),
            Some(GroupWord::parse("b^2 d^-2").unwrap()),
            Some("b".to_string()),
        )
        .unwrap();
        let text = p.to_toml_string();
        let back = Presentation::from_toml_str(&text).unwrap();
        assert_eq!(p, back);
    }

    // Independent oracle: the Fox walk over a raw, unreduced letter sequence.
    fn raw_walk(
        letters: &[(char, bool)],
        g: &str,
        m: &AbelianizationMap,
    ) -> LaurentPolynomial {
        let mut d = LaurentPolynomial::zero();
        let mut prefix = LaurentPolynomial::one();
        for (sym, inverse) in letters {
            let sym = sym.to_string();
            let img = m.image(&sym).unwrap().clone();
            if *inverse {
                let inv = img.unit_inverse().unwrap();
                if sym == g {
                    // d(h^-1) = -m(h)^-1 scaled by the prefix.
                    d = d.sub(&prefix.mul(&inv));
                }
                prefix = prefix.mul(&inv);
            } else {
                if sym == g {
                    d = d.add(&prefix);
                }
                prefix = prefix.mul(&img);
            }
        }
        d
    }

    fn arb_letters() -> impl Strategy<Value = Vec<(char, bool)>> {
        proptest::collection::vec(
            (proptest::sample::select(vec!['a', 'b', 'c', 'd']), any::<bool>()),
            0..24,
        )
    }

    fn to_word(letters: &[(char, bool)]) -> GroupWord {
        GroupWord::from_letters(
            letters
                .iter()
                .map(|(c, inv)| Letter::new(&c.to_string(), *inv)),
        )
    }

    proptest! {
        #[test]
        fn derivative_matches_unreduced_walk(letters in arb_letters()) {
            // The library reduces on construction; the oracle walks the raw
            // spelling. Agreement is exactly free-reduction invariance.
            let m = pretzel_map();
            let w = to_word(&letters);
            for g in ["a", "b", "c", "d"] {
                prop_assert_eq!(
                    fox_derivative(&w, g, &m).unwrap(),
                    raw_walk(&letters, g, &m)
                );
            }
        }

        #[test]
        fn product_rule(u in arb_letters(), v in arb_letters()) {
            let m = pretzel_map();
            let (u, v) = (to_word(&u), to_word(&v));
            let uv = u.concat(&v);
            for g in ["a", "b", "c", "d"] {
                let lhs = fox_derivative(&uv, g, &m).unwrap();
                let rhs = fox_derivative(&u, g, &m).unwrap()
                    .add(&abelianize(&u, &m).unwrap().mul(&fox_derivative(&v, g, &m).unwrap()));
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn inverse_rule(w in arb_letters()) {
            let m = pretzel_map();
            let w = to_word(&w);
            for g in ["a", "b", "c", "d"] {
                let lhs = fox_derivative(&w.inverse(), g, &m).unwrap();
                let ab_inv = abelianize(&w, &m).unwrap().unit_inverse().unwrap();
                let rhs = ab_inv.mul(&fox_derivative(&w, g, &m).unwrap()).neg();
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn fundamental_identity(w in arb_letters()) {
            let m = pretzel_map();
            let w = to_word(&w);
            let mut lhs = LaurentPolynomial::zero();
            for g in ["a", "b", "c", "d"] {
                let dg = fox_derivative(&w, g, &m).unwrap();
                let factor = m.image(g).unwrap().sub(&LaurentPolynomial::one());
                lhs = lhs.add(&dg.mul(&factor));
            }
            let rhs = abelianize(&w, &m).unwrap().sub(&LaurentPolynomial::one());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
