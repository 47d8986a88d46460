//! Exact arithmetic in cyclotomic fields Q(zeta_m).
//!
//! Elements are residues modulo the m-th cyclotomic polynomial, with
//! rational coefficients and the designated embedding zeta = e^{2*pi*i/m}.
//! Signs of real elements are decided rigorously: a real residue is a
//! rational combination of cos(2*pi*k/m) values, each of which is enclosed
//! in a shrinking rational interval (Machin pi, Taylor cosine with an
//! explicit remainder). A nonzero residue maps to a nonzero real under the
//! embedding, so refinement always terminates with a certified sign.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, LazyLock, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CyclotomicError {
    #[error("element is not real (not fixed by conjugation)")]
    NotReal,
}

static PHI_CACHE: LazyLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// Monic integer coefficients of the m-th cyclotomic polynomial, ascending.
pub fn cyclotomic_polynomial(m: u64) -> Arc<Vec<BigInt>> {
    assert!(m >= 1);
    if let Some(hit) = PHI_CACHE.lock().unwrap().get(&m) {
        return hit.clone();
    }
    // (x^m - 1) divided by the product of Phi_d over proper divisors d | m.
    let mut num = vec![BigInt::zero(); m as usize + 1];
    num[0] = BigInt::from(-1);
    num[m as usize] = BigInt::one();
    for d in 1..m {
        if m % d == 0 {
            let phi_d = cyclotomic_polynomial(d);
            num = exact_div(&num, &phi_d);
        }
    }
    let out = Arc::new(num);
    PHI_CACHE.lock().unwrap().insert(m, out.clone());
    out
}

/// Exact division of integer polynomials (divisor monic), ascending coeffs.
fn exact_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut num = num.to_vec();
    while num.last().is_some_and(|c| c.is_zero()) {
        num.pop();
    }
    let dd = den.len() - 1;
    assert!(den[dd].is_one(), "divisor must be monic");
    assert!(num.len() > dd);
    let mut q = vec![BigInt::zero(); num.len() - dd];
    for i in (0..q.len()).rev() {
        let c = num[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        q[i] = c.clone();
        for (j, d) in den.iter().enumerate() {
            let v = &num[i + j] - d * &c;
            num[i + j] = v;
        }
    }
    assert!(num.iter().all(|c| c.is_zero()), "division was not exact");
    q
}

pub fn euler_phi(m: u64) -> u64 {
    (cyclotomic_polynomial(m).len() - 1) as u64
}

/// A residue in Q[x]/(Phi_m), i.e. an element of Q(zeta_m).
#[derive(Clone, PartialEq, Eq)]
pub struct CyclotomicElement {
    order: u64,
    /// Coefficients of 1, zeta, ..., zeta^(phi(m)-1).
    coeffs: Vec<BigRational>,
}

impl CyclotomicElement {
    pub fn zero(order: u64) -> Self {
        let phi = euler_phi(order) as usize;
        Self { order, coeffs: vec![BigRational::zero(); phi] }
    }

    pub fn one(order: u64) -> Self {
        Self::from_rational(order, BigRational::one())
    }

    pub fn from_rational(order: u64, q: BigRational) -> Self {
        let mut e = Self::zero(order);
        if !e.coeffs.is_empty() {
            e.coeffs[0] = q;
        } else {
            // phi(1) would be 0-length; order >= 2 in practice.
            assert!(q.is_zero(), "order 1 field holds only zero residues");
        }
        e
    }

    pub fn from_integer(order: u64, n: i64) -> Self {
        Self::from_rational(order, BigRational::from_integer(BigInt::from(n)))
    }

    /// zeta^k for any integer k (reduced mod m).
    pub fn zeta_pow(order: u64, k: i64) -> Self {
        let m = order as i64;
        let k = k.rem_euclid(m) as usize;
        let mut dense = vec![BigRational::zero(); k + 1];
        dense[k] = BigRational::one();
        Self::reduce(order, dense)
    }

    fn reduce(order: u64, mut dense: Vec<BigRational>) -> Self {
        let phi_poly = cyclotomic_polynomial(order);
        let phi = phi_poly.len() - 1;
        for i in (phi..dense.len()).rev() {
            if dense[i].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut dense[i], BigRational::zero());
            for (j, p) in phi_poly.iter().take(phi).enumerate() {
                let v = &dense[i - phi + j] - &c * BigRational::from_integer(p.clone());
                dense[i - phi + j] = v;
            }
        }
        dense.truncate(phi);
        dense.resize(phi, BigRational::zero());
        Self { order, coeffs: dense }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|q| q.is_one())
    }

    /// The rational value when the reduced representation is a constant.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs.first().cloned().unwrap_or_else(BigRational::zero))
        } else {
            None
        }
    }

    fn assert_same_order(&self, other: &Self) {
        assert_eq!(self.order, other.order, "mixed cyclotomic orders");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_order(other);
        Self {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self { order: self.order, coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_order(other);
        let mut dense = vec![BigRational::zero(); 2 * self.coeffs.len().max(1)];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let v = &dense[i + j] + a * b;
                dense[i + j] = v;
            }
        }
        Self::reduce(self.order, dense)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// Phi_m (irreducible, so every nonzero residue is invertible).
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let phi_poly = cyclotomic_polynomial(self.order);
        let modulus: Vec<BigRational> = phi_poly
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        // Invariants: r0 = a0*f mod Phi, r1 = a1*f mod Phi (Bezout tracking
        // of the f-cofactor only).
        let mut r0 = modulus;
        let mut r1 = self.coeffs.clone();
        trim(&mut r1);
        let mut a0: Vec<BigRational> = vec![];
        let mut a1: Vec<BigRational> = vec![BigRational::one()];
        while !r1.is_empty() {
            let (q, r) = poly_divmod(&r0, &r1);
            let a_next = poly_sub(&a0, &poly_mul(&q, &a1));
            r0 = r1;
            r1 = r;
            a0 = a1;
            a1 = a_next;
        }
        // r0 = gcd (a nonzero constant, since Phi_m is irreducible).
        assert_eq!(r0.len(), 1, "cyclotomic polynomial must be irreducible");
        let c = r0[0].clone();
        let inv_coeffs: Vec<BigRational> = a0.iter().map(|x| x / &c).collect();
        Some(Self::reduce(self.order, inv_coeffs))
    }

    /// Complex conjugation: zeta -> zeta^(m-1).
    pub fn conj(&self) -> Self {
        let m = self.order as usize;
        let mut dense = vec![BigRational::zero(); m];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let at = (m - i) % m;
            let v = &dense[at] + c;
            dense[at] = v;
        }
        Self::reduce(self.order, dense)
    }

    pub fn is_real(&self) -> bool {
        *self == self.conj()
    }

    /// Certified sign (-1, 0, +1) of a real element under the designated
    /// embedding zeta = e^{2*pi*i/m}.
    pub fn certified_sign(&self) -> Result<i8, CyclotomicError> {
        if self.is_zero() {
            return Ok(0);
        }
        if !self.is_real() {
            return Err(CyclotomicError::NotReal);
        }
        if let Some(q) = self.as_rational() {
            return Ok(rational_sign(&q));
        }
        // alpha = sum q_i cos(2 pi i / m): the imaginary parts cancel since
        // alpha is real, so enclosing the cosine sum encloses alpha.
        let mut terms = 24usize;
        loop {
            let pi = interval::pi(terms);
            let mut acc = interval::Interval::point(BigRational::zero());
            for (i, q) in self.coeffs.iter().enumerate() {
                if q.is_zero() {
                    continue;
                }
                let angle = pi.scale(&BigRational::new(
                    BigInt::from(2 * i as i64),
                    BigInt::from(self.order),
                ));
                let c = interval::cos(&angle, terms);
                acc = acc.add(&c.scale(q));
            }
            if acc.lo.is_positive() {
                return Ok(1);
            }
            if acc.hi.is_negative() {
                return Ok(-1);
            }
            terms *= 2;
            assert!(
                terms <= 1 << 16,
                "sign refinement failed to converge; nonzero real residue expected"
            );
        }
    }
}

fn rational_sign(q: &BigRational) -> i8 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

fn trim(v: &mut Vec<BigRational>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let mut bt = b.to_vec();
    trim(&mut bt);
    assert!(!bt.is_empty());
    if r.len() < bt.len() {
        return (vec![], r);
    }
    let mut q = vec![BigRational::zero(); r.len() - bt.len() + 1];
    let lead = bt.last().unwrap().clone();
    while r.len() >= bt.len() {
        let shift = r.len() - bt.len();
        let f = r.last().unwrap() / &lead;
        q[shift] = f.clone();
        for (j, c) in bt.iter().enumerate() {
            let v = &r[shift + j] - c * &f;
            r[shift + j] = v;
        }
        trim(&mut r);
        if r.is_empty() {
            break;
        }
        if r.len() < bt.len() {
            break;
        }
    }
    (q, r)
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let v = &out[i + j] + x * y;
            out[i + j] = v;
        }
    }
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] = x.clone();
    }
    for (i, y) in b.iter().enumerate() {
        let v = &out[i] - y;
        out[i] = v;
    }
    trim(&mut out);
    out
}

impl fmt::Debug for CyclotomicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CyclotomicElement(m={}, {})", self.order, self)
    }
}

impl fmt::Display for CyclotomicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if wrote {
                if c.is_negative() {
                    write!(f, " - ")?;
                } else {
                    write!(f, " + ")?;
                }
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let mag = c.abs();
            if i == 0 {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                if i == 1 {
                    write!(f, "zeta")?;
                } else {
                    write!(f, "zeta^{i}")?;
                }
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Rational interval arithmetic sufficient for cosine-sum enclosures.
///
/// Endpoints are exact rationals, but pi and cos are computed internally in
/// dyadic fixed point (integers scaled by 2^bits with directed rounding and a
/// conservative ulp budget). Exact rational Taylor sums would be correct too,
/// yet their denominators grow multiplicatively and every add then pays a gcd
/// on thousands of digits; fixed point keeps every intermediate near `bits`
/// bits wide.
mod interval {
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_rational::BigRational;
    use num_traits::{One, Signed, Zero};
    use std::collections::HashMap;
    use std::sync::{LazyLock, Mutex};

    #[derive(Clone, Debug)]
    pub struct Interval {
        pub lo: BigRational,
        pub hi: BigRational,
    }

    impl Interval {
        pub fn point(q: BigRational) -> Self {
            Self { lo: q.clone(), hi: q }
        }

        pub fn new(lo: BigRational, hi: BigRational) -> Self {
            debug_assert!(lo <= hi);
            Self { lo, hi }
        }

        pub fn add(&self, other: &Self) -> Self {
            Self::new(&self.lo + &other.lo, &self.hi + &other.hi)
        }

        pub fn scale(&self, q: &BigRational) -> Self {
            if q.is_negative() {
                Self::new(&self.hi * q, &self.lo * q)
            } else {
                Self::new(&self.lo * q, &self.hi * q)
            }
        }
    }

    /// Working precision for a given refinement level. Doubling `terms`
    /// doubles the precision, so enclosure widths shrink geometrically.
    fn bits_for(terms: usize) -> u64 {
        8 * terms.max(24) as u64
    }

    fn from_fix(n: &BigInt, bits: u64) -> BigRational {
        BigRational::new(n.clone(), BigInt::one() << bits)
    }

    /// floor(q * 2^bits) as an integer.
    fn fix_floor(q: &BigRational, bits: u64) -> BigInt {
        (q.numer() << bits).div_floor(q.denom())
    }

    /// arctan(1/q) * 2^bits bracketed as [lo, hi] integer numerators.
    ///
    /// Leibniz series with every term truncated at the precision floor; the
    /// series self-terminates once q^(2j+1) exceeds 2^bits. The bracket pads
    /// one ulp per emitted term plus one for the tail, which the alternating
    /// decreasing remainder bounds by the first underflowed term (< 1 ulp).
    fn arctan_inv_fix(q: u64, bits: u64) -> (BigInt, BigInt) {
        let scale = BigInt::one() << bits;
        let q = BigInt::from(q);
        let q2 = &q * &q;
        let mut qpow = q.clone();
        let mut sum = BigInt::zero();
        let mut emitted: u64 = 0;
        let mut j: u64 = 0;
        loop {
            let denom = &qpow * BigInt::from(2 * j + 1);
            let term = &scale / &denom;
            if term.is_zero() {
                break;
            }
            if j % 2 == 0 {
                sum += &term;
            } else {
                sum -= &term;
            }
            emitted += 1;
            qpow *= &q2;
            j += 1;
        }
        let slop = BigInt::from(emitted + 1);
        (&sum - &slop, &sum + &slop)
    }

    /// pi * 2^bits brackets, cached per precision: Machin's
    /// pi = 16 arctan(1/5) - 4 arctan(1/239).
    static PI_CACHE: LazyLock<Mutex<HashMap<u64, (BigInt, BigInt)>>> =
        LazyLock::new(|| Mutex::new(HashMap::new()));

    fn pi_fix(bits: u64) -> (BigInt, BigInt) {
        if let Some(hit) = PI_CACHE.lock().unwrap().get(&bits) {
            return hit.clone();
        }
        let (lo5, hi5) = arctan_inv_fix(5, bits);
        let (lo239, hi239) = arctan_inv_fix(239, bits);
        let lo = lo5 * 16 - hi239 * 4;
        let hi = hi5 * 16 - lo239 * 4;
        let pair = (lo, hi);
        PI_CACHE.lock().unwrap().insert(bits, pair.clone());
        pair
    }

    pub fn pi(terms: usize) -> Interval {
        let bits = bits_for(terms);
        let (lo, hi) = pi_fix(bits);
        Interval::new(from_fix(&lo, bits), from_fix(&hi, bits))
    }

    /// cos over an interval: fixed-point Taylor sum at the dyadic point
    /// nearest the midpoint, plus the alternating-series remainder, widened
    /// by the half-width (cos is 1-Lipschitz).
    ///
    /// Error budget, in ulps of 2^-bits. The expansion point mu = M/2^bits
    /// satisfies |mid - mu| < 1 ulp and is folded into the Lipschitz term.
    /// m2 = floor(M^2 / 2^bits) carries at most 1 ulp against mu^2 * 2^bits.
    /// Each step t_j = floor(t_{j-1} * m2 / (2^bits * d_j)) adds under 2^6
    /// ulps before amplification (term magnitudes stay below 2^7 for
    /// |mu| < 7), and products of the remaining step ratios mu^2/d_j are
    /// bounded by 2^3, so 2^14 ulps per step covers everything with two
    /// orders of margin. The tail after `terms` >= 24 alternating decreasing
    /// terms is bounded by the first omitted term.
    pub fn cos(x: &Interval, terms: usize) -> Interval {
        let terms = terms.max(24);
        let bits = bits_for(terms);
        let two = BigRational::from_integer(BigInt::from(2));
        let mid = (&x.lo + &x.hi) / &two;
        let half = (&x.hi - &x.lo) / &two;
        debug_assert!(mid.abs() < BigRational::from_integer(BigInt::from(7)));
        let m = fix_floor(&mid, bits);
        let m2 = (&m * &m) >> bits;
        let mut term = BigInt::one() << bits;
        let mut sum = BigInt::zero();
        for j in 0..terms as u64 {
            if j % 2 == 0 {
                sum += &term;
            } else {
                sum -= &term;
            }
            let denom = BigInt::from((2 * j + 1) * (2 * j + 2)) << bits;
            term = (&term * &m2) / denom;
        }
        let width = term.abs() + (BigInt::from(terms as u64 + 4) << 14);
        let ulp = from_fix(&BigInt::one(), bits);
        let slack = &half + &ulp;
        let lo = from_fix(&(&sum - &width), bits) - &slack;
        let hi = from_fix(&(&sum + &width), bits) + &slack;
        Interval::new(lo, hi)
    }
}
