//! Levine-Tristram signatures at roots of unity, exactly.
//!
//! For a Seifert matrix `psi` and `omega = e^{2*pi*i*k/m}` on the unit circle
//! (omega != 1), the Hermitian matrix `(1-omega)psi + (1-conj(omega))psi^T`
//! has a well-defined signature. This module evaluates it over the cyclotomic
//! field Q(zeta_m) by Hermitian congruence elimination with certified pivot
//! signs, locates the jump locus from `det(psi - x*psi^T)`, assembles
//! piecewise-constant signature profiles, and derives the hyperbolicity
//! obstruction and the doubly-slice-genus lower bound for Bing doubles.
//!
//! A floating-point mode covers arbitrary circle angles; it refuses to guess
//! near zero ([`SignatureError::UncertifiableSign`]) instead of rounding.

use crate::cyclotomic::{cyclotomic_polynomial, euler_phi, CyclotomicElement};
use crate::seifert::SeifertMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SignatureError {
    #[error("root of unity must satisfy 0 < k/m < 1 after reduction (omega != 1), got {k}/{m}")]
    InvalidRoot { k: u64, m: u64 },
    #[error("cannot parse {input:?} as a root of unity; expected k/m")]
    ParseRoot { input: String },
    #[error("circle angle must lie strictly between 0 and 1 turns, got {turns}")]
    InvalidAngle { turns: f64 },
    #[error("an eigenvalue is too close to zero to certify its sign at precision {precision}")]
    UncertifiableSign { precision: u32 },
}

/// A primitive direction on the unit circle: `omega = e^{2*pi*i*k/m}` stored
/// as the reduced fraction `k/m` with `0 < k < m`. The point 1 is excluded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    k: u64,
    m: u64,
}

impl RootOfUnity {
    /// Reduces `k/m` modulo 1 and by the gcd; rejects `omega = 1`.
    pub fn new(k: u64, m: u64) -> Result<Self, SignatureError> {
        if m == 0 {
            return Err(SignatureError::InvalidRoot { k, m });
        }
        let r = k % m;
        if r == 0 {
            return Err(SignatureError::InvalidRoot { k, m });
        }
        let g = r.gcd(&m);
        Ok(Self { k: r / g, m: m / g })
    }

    pub fn numerator(&self) -> u64 {
        self.k
    }

    /// The multiplicative order of omega.
    pub fn order(&self) -> u64 {
        self.m
    }

    /// Complex conjugate: `(m - k)/m`.
    pub fn conj(&self) -> Self {
        Self { k: self.m - self.k, m: self.m }
    }

    /// The fraction of a full turn, exactly.
    pub fn fraction(&self) -> BigRational {
        BigRational::new(BigInt::from(self.k), BigInt::from(self.m))
    }

    pub fn fraction_f64(&self) -> f64 {
        self.k as f64 / self.m as f64
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.k, self.m)
    }
}

impl FromStr for RootOfUnity {
    type Err = SignatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || SignatureError::ParseRoot { input: s.to_string() };
        let (k, m) = s.trim().split_once('/').ok_or_else(err)?;
        let k: u64 = k.trim().parse().map_err(|_| err())?;
        let m: u64 = m.trim().parse().map_err(|_| err())?;
        Self::new(k, m)
    }
}

impl Ord for RootOfUnity {
    fn cmp(&self, other: &Self) -> Ordering {
        // k1/m1 vs k2/m2 by cross multiplication; u128 avoids overflow.
        (self.k as u128 * other.m as u128).cmp(&(other.k as u128 * self.m as u128))
    }
}

impl PartialOrd for RootOfUnity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for RootOfUnity {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RootOfUnity {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A point of the unit circle usable as an arc endpoint: either 1 itself or a
/// root of unity distinct from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CirclePoint {
    One,
    Root(RootOfUnity),
}

impl fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CirclePoint::One => write!(f, "1"),
            CirclePoint::Root(r) => write!(f, "{r}"),
        }
    }
}

impl Serialize for CirclePoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Square Hermitian matrix: exact cyclotomic entries, or complex doubles in
/// numeric mode.
#[derive(Clone, Debug, PartialEq)]
pub enum HermitianMatrix {
    Exact { order: u64, entries: Vec<Vec<CyclotomicElement>> },
    Numeric { re: Vec<Vec<f64>>, im: Vec<Vec<f64>> },
}

impl HermitianMatrix {
    pub fn dim(&self) -> usize {
        match self {
            HermitianMatrix::Exact { entries, .. } => entries.len(),
            HermitianMatrix::Numeric { re, .. } => re.len(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, HermitianMatrix::Exact { .. })
    }
}

/// `(1-omega)psi + (1-conj(omega))psi^T` over `Q(zeta_m)`, `omega = zeta_m^k`.
pub fn hermitian_matrix(m: &SeifertMatrix, w: RootOfUnity) -> HermitianMatrix {
    let order = w.order();
    let omega = CyclotomicElement::zeta_pow(order, w.numerator() as i64);
    let one = CyclotomicElement::one(order);
    let c = one.sub(&omega);
    let cbar = c.conj();
    let n = m.rank();
    let psi = m.psi();
    let entry = |i: usize, j: usize| {
        let a = BigRational::from_integer(psi.get(i, j).clone());
        let b = BigRational::from_integer(psi.get(j, i).clone());
        c.scale(&a).add(&cbar.scale(&b))
    };
    let entries: Vec<Vec<CyclotomicElement>> =
        (0..n).map(|i| (0..n).map(|j| entry(i, j)).collect()).collect();
    debug_assert!(entries
        .iter()
        .enumerate()
        .all(|(i, row)| row.iter().enumerate().all(|(j, e)| *e == entries[j][i].conj())));
    HermitianMatrix::Exact { order, entries }
}

/// Numeric counterpart at `omega = e^{2*pi*i*turns}` for arbitrary angles.
pub fn hermitian_matrix_numeric(
    m: &SeifertMatrix,
    turns: f64,
) -> Result<HermitianMatrix, SignatureError> {
    if !(turns > 0.0 && turns < 1.0) {
        return Err(SignatureError::InvalidAngle { turns });
    }
    let theta = 2.0 * std::f64::consts::PI * turns;
    let (sin, cos) = theta.sin_cos();
    let n = m.rank();
    let psi = m.psi();
    let at = |i: usize, j: usize| psi.get(i, j).to_f64().expect("integer entry fits a double");
    let mut re = vec![vec![0.0; n]; n];
    let mut im = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            // (1-omega)psi_ij + (1-conj(omega))psi_ji with omega = cos + i sin.
            re[i][j] = (1.0 - cos) * (at(i, j) + at(j, i));
            im[i][j] = sin * (at(j, i) - at(i, j));
        }
    }
    Ok(HermitianMatrix::Numeric { re, im })
}

/// Exact signature of a Hermitian cyclotomic matrix by congruence
/// elimination. A nonzero real diagonal pivot contributes its certified sign
/// and Schur-complements the rest; when the active diagonal vanishes but some
/// off-diagonal entry h survives, the corresponding hyperbolic plane is split
/// off with net contribution zero. Remaining zero blocks contribute zero.
fn hermitian_signature_exact(entries: &[Vec<CyclotomicElement>]) -> i64 {
    let n = entries.len();
    let mut a: Vec<Vec<CyclotomicElement>> = entries.to_vec();
    let mut active: Vec<usize> = (0..n).collect();
    let mut signature = 0i64;
    while !active.is_empty() {
        if let Some(pos) = active.iter().position(|&i| !a[i][i].is_zero()) {
            let i = active.remove(pos);
            let p = a[i][i].clone();
            let sign = p.certified_sign().expect("Hermitian diagonal entries are real");
            signature += i64::from(sign);
            let p_inv = p.inv().expect("nonzero pivot");
            for &j in &active {
                for &k in &active {
                    let correction = a[j][i].mul(&a[i][k]).mul(&p_inv);
                    a[j][k] = a[j][k].sub(&correction);
                }
            }
        } else if let Some((i, j)) = first_offdiagonal(&a, &active) {
            // Hyperbolic step: the plane spanned by i and j has signature 0.
            let h = a[i][j].clone();
            let h_conj = a[j][i].clone();
            let h_inv = h.inv().expect("nonzero off-diagonal entry");
            let h_conj_inv = h_conj.inv().expect("nonzero off-diagonal entry");
            active.retain(|&x| x != i && x != j);
            for &l in &active {
                for &k in &active {
                    let via_i = a[l][i].mul(&a[j][k]).mul(&h_conj_inv);
                    let via_j = a[l][j].mul(&a[i][k]).mul(&h_inv);
                    a[l][k] = a[l][k].sub(&via_i).sub(&via_j);
                }
            }
        } else {
            break;
        }
    }
    signature
}

fn first_offdiagonal(a: &[Vec<CyclotomicElement>], active: &[usize]) -> Option<(usize, usize)> {
    for (s, &i) in active.iter().enumerate() {
        for &j in &active[s + 1..] {
            if !a[i][j].is_zero() {
                return Some((i, j));
            }
        }
    }
    None
}

/// Exact Levine-Tristram signature at a root of unity.
pub fn signature_at(m: &SeifertMatrix, w: RootOfUnity) -> i64 {
    match hermitian_matrix(m, w) {
        HermitianMatrix::Exact { entries, .. } => hermitian_signature_exact(&entries),
        HermitianMatrix::Numeric { .. } => unreachable!("exact constructor"),
    }
}

/// Signatures at many points; the default build evaluates them in parallel.
pub fn signatures_at_many(m: &SeifertMatrix, points: &[RootOfUnity]) -> Vec<i64> {
    #[cfg(feature = "parallel")]
    {
        signatures_at_many_par(m, points)
    }
    #[cfg(not(feature = "parallel"))]
    {
        signatures_at_many_seq(m, points)
    }
}

pub fn signatures_at_many_seq(m: &SeifertMatrix, points: &[RootOfUnity]) -> Vec<i64> {
    points.iter().map(|&w| signature_at(m, w)).collect()
}

#[cfg(feature = "parallel")]
pub fn signatures_at_many_par(m: &SeifertMatrix, points: &[RootOfUnity]) -> Vec<i64> {
    use rayon::prelude::*;
    points.par_iter().map(|&w| signature_at(m, w)).collect()
}

/// Coefficients of `det(x*I - H)` for the exact Hermitian matrix at `w`,
/// constant term first, by the Faddeev-LeVerrier recurrence. The
/// coefficients are real cyclotomic elements; at quadratic fields they are
/// plain rationals.
pub fn char_poly_at(m: &SeifertMatrix, w: RootOfUnity) -> Vec<CyclotomicElement> {
    let HermitianMatrix::Exact { order, entries } = hermitian_matrix(m, w) else {
        unreachable!("exact constructor")
    };
    let n = m.rank();
    let zero = CyclotomicElement::zero(order);
    let one = CyclotomicElement::one(order);
    let mut coeffs = vec![zero.clone(); n + 1];
    coeffs[n] = one;
    if n == 0 {
        return coeffs;
    }
    let trace = |x: &Vec<Vec<CyclotomicElement>>| {
        (0..n).fold(zero.clone(), |acc, i| acc.add(&x[i][i]))
    };
    let matmul = |x: &Vec<Vec<CyclotomicElement>>, y: &Vec<Vec<CyclotomicElement>>| {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).fold(zero.clone(), |acc, l| acc.add(&x[i][l].mul(&y[l][j])))
                    })
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    };
    let mut mk = entries.clone();
    for step in 1..=n {
        let c = trace(&mk).scale(&BigRational::new(BigInt::from(-1), BigInt::from(step)));
        coeffs[n - step] = c.clone();
        if step == n {
            break;
        }
        let mut shifted = mk;
        for i in 0..n {
            shifted[i][i] = shifted[i][i].add(&c);
        }
        mk = matmul(&entries, &shifted);
    }
    coeffs
}

/// Renders characteristic-polynomial coefficients as `x^4 - 6*x^3 + ...`,
/// using plain numbers for rational coefficients and parenthesized
/// cyclotomic expressions otherwise.
pub fn char_poly_display(coeffs: &[CyclotomicElement]) -> String {
    let mut out = String::new();
    for (deg, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let (sign_str, magnitude) = match c.as_rational() {
            Some(q) => {
                let neg = q.is_negative();
                let mag = q.abs();
                let mag_str = if mag.is_one() && deg > 0 { String::new() } else { mag.to_string() };
                (if neg { "-" } else { "+" }, mag_str)
            }
            None => ("+", format!("({c})")),
        };
        if out.is_empty() {
            if sign_str == "-" {
                out.push('-');
            }
        } else {
            out.push_str(if sign_str == "-" { " - " } else { " + " });
        }
        match deg {
            0 => {
                if magnitude.is_empty() {
                    out.push('1');
                } else {
                    out.push_str(&magnitude);
                }
            }
            _ => {
                if !magnitude.is_empty() {
                    out.push_str(&magnitude);
                    out.push('*');
                }
                if deg == 1 {
                    out.push('x');
                } else {
                    out.push_str(&format!("x^{deg}"));
                }
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// `det(psi - x*psi^T)` as integer coefficients, constant term first,
/// recovered from n+1 integer determinant samples by Lagrange interpolation.
pub fn torsion_polynomial(m: &SeifertMatrix) -> Vec<BigInt> {
    let n = m.rank();
    let psi = m.psi();
    let psi_t = psi.transpose();
    let samples: Vec<BigInt> = (0..=n)
        .map(|c| psi.sub(&psi_t.scale(&BigInt::from(c))).det())
        .collect();
    // Lagrange basis over the nodes 0..=n, assembled exactly.
    let mut coeffs = vec![BigRational::zero(); n + 1];
    for (node, value) in samples.iter().enumerate() {
        if value.is_zero() {
            continue;
        }
        // Numerator polynomial prod_{other != node} (x - other) and the
        // scalar denominator prod (node - other).
        let mut num = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for other in 0..=n {
            if other == node {
                continue;
            }
            let shift = BigRational::from_integer(BigInt::from(other as i64));
            let mut next = vec![BigRational::zero(); num.len() + 1];
            for (d, c) in num.iter().enumerate() {
                next[d + 1] = &next[d + 1] + c;
                next[d] = &next[d] - &(c * &shift);
            }
            num = next;
            denom *= BigRational::from_integer(BigInt::from(node as i64 - other as i64));
        }
        let weight = BigRational::from_integer(value.clone()) / denom;
        for (d, c) in num.iter().enumerate() {
            coeffs[d] = &coeffs[d] + &(c * &weight);
        }
    }
    coeffs
        .into_iter()
        .map(|q| {
            assert!(q.is_integer(), "determinant polynomial has integer coefficients");
            q.to_integer()
        })
        .collect()
}

fn poly_degree(p: &[BigInt]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

/// Remainder of dividing `p` by the monic integer polynomial `d`.
fn monic_rem(p: &[BigInt], d: &[BigInt]) -> Vec<BigInt> {
    let dd = poly_degree(d).expect("monic divisor");
    debug_assert!(d[dd].is_one());
    let mut r: Vec<BigInt> = p.to_vec();
    while let Some(rd) = poly_degree(&r) {
        if rd < dd {
            break;
        }
        let f = r[rd].clone();
        for i in 0..=dd {
            let v = &r[rd - dd + i] - &(&d[i] * &f);
            r[rd - dd + i] = v;
        }
    }
    r.truncate(poly_degree(&r).map_or(0, |d| d + 1));
    r
}

/// Orders m >= 2 whose primitive roots are unit-circle zeros of the torsion
/// polynomial: the m with `Phi_m` dividing it. Signatures can only jump
/// there.
pub fn jump_orders(delta: &[BigInt]) -> Vec<u64> {
    let Some(deg) = poly_degree(delta) else {
        return Vec::new();
    };
    let deg = deg as u64;
    let mut orders = Vec::new();
    // phi(m) >= sqrt(m/2), so phi(m) <= deg bounds m by 2*deg^2 + 2.
    for m in 2..=(2 * deg * deg + 2) {
        if euler_phi(m) > deg {
            continue;
        }
        let phi = cyclotomic_polynomial(m);
        if monic_rem(delta, &phi).is_empty() {
            orders.push(m);
        }
    }
    orders
}

/// The candidate jump points of the signature function: every primitive k/m
/// for each flagged order. A vanishing torsion polynomial (degenerate psi)
/// falls back to sampling all orders up to `resolution`.
pub fn jump_points(m: &SeifertMatrix, resolution: u64) -> Vec<RootOfUnity> {
    let delta = torsion_polynomial(m);
    let orders = if poly_degree(&delta).is_none() {
        (2..=resolution.max(2)).collect()
    } else {
        jump_orders(&delta)
    };
    let mut points = Vec::new();
    for order in orders {
        for k in 1..order {
            if k.gcd(&order) == 1 {
                points.push(RootOfUnity { k, m: order });
            }
        }
    }
    points.sort();
    points.dedup();
    points
}

/// One maximal open arc of constancy, with the signature value taken at its
/// midpoint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignatureArc {
    pub from: CirclePoint,
    pub to: CirclePoint,
    pub value: i64,
}

/// Piecewise description of the signature function on the circle minus 1:
/// open arcs between consecutive jump candidates plus the values at the
/// candidates themselves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignatureProfile {
    pub arcs: Vec<SignatureArc>,
    pub point_values: Vec<(RootOfUnity, i64)>,
}

fn midpoint(a: &BigRational, b: &BigRational) -> RootOfUnity {
    let mid = (a + b) / BigRational::from_integer(BigInt::from(2));
    let k = mid.numer().to_u64().expect("midpoint numerator fits u64");
    let m = mid.denom().to_u64().expect("midpoint denominator fits u64");
    RootOfUnity::new(k, m).expect("midpoint lies strictly inside the circle gap")
}

/// Arc midpoints between consecutive jump candidates (with 1 as the common
/// boundary), or 1/2 when there are no candidates.
fn arc_midpoints(jumps: &[RootOfUnity]) -> Vec<RootOfUnity> {
    if jumps.is_empty() {
        return vec![RootOfUnity { k: 1, m: 2 }];
    }
    let zero = BigRational::zero();
    let one = BigRational::one();
    let mut mids = Vec::with_capacity(jumps.len() + 1);
    let mut previous = zero;
    for j in jumps {
        mids.push(midpoint(&previous, &j.fraction()));
        previous = j.fraction();
    }
    mids.push(midpoint(&previous, &one));
    mids
}

/// Evaluate the full piecewise signature picture. `resolution` only matters
/// for degenerate matrices whose torsion polynomial vanishes identically, in
/// which case jump candidates are sampled up to that order.
pub fn signature_profile(m: &SeifertMatrix, resolution: u64) -> SignatureProfile {
    assert!(resolution >= 1, "resolution must be positive");
    let jumps = jump_points(m, resolution);
    let mids = arc_midpoints(&jumps);
    let arc_values = signatures_at_many(m, &mids);
    let jump_values = signatures_at_many(m, &jumps);
    let mut arcs = Vec::with_capacity(mids.len());
    for (i, value) in arc_values.iter().enumerate() {
        let from = if i == 0 { CirclePoint::One } else { CirclePoint::Root(jumps[i - 1]) };
        let to = if i == jumps.len() { CirclePoint::One } else { CirclePoint::Root(jumps[i]) };
        arcs.push(SignatureArc { from, to, value: *value });
    }
    let point_values = jumps.into_iter().zip(jump_values).collect();
    SignatureProfile { arcs, point_values }
}

/// The default evaluation set: jump candidates plus all arc midpoints.
/// Needs no signature evaluations itself.
pub fn default_test_set(m: &SeifertMatrix, resolution: u64) -> Vec<RootOfUnity> {
    let jumps = jump_points(m, resolution);
    let mut points = arc_midpoints(&jumps);
    points.extend(jumps);
    points.sort();
    points.dedup();
    points
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HyperbolicVerdict {
    Violated,
    VanishesOnTestSet,
}

/// Outcome of the hyperbolicity obstruction: hyperbolic forms have vanishing
/// signature everywhere, so one nonzero value refutes hyperbolicity; full
/// vanishing on a finite set certifies nothing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HyperbolicCertificate {
    pub verdict: HyperbolicVerdict,
    pub witness: Option<(RootOfUnity, i64)>,
    pub tested_points: Vec<RootOfUnity>,
}

pub fn hyperbolic_obstruction(m: &SeifertMatrix, test_set: &[RootOfUnity]) -> HyperbolicCertificate {
    assert!(!test_set.is_empty(), "hyperbolicity test set must be nonempty");
    let values = signatures_at_many(m, test_set);
    let witness = test_set
        .iter()
        .zip(&values)
        .find(|(_, &v)| v != 0)
        .map(|(&w, &v)| (w, v));
    HyperbolicCertificate {
        verdict: if witness.is_some() {
            HyperbolicVerdict::Violated
        } else {
            HyperbolicVerdict::VanishesOnTestSet
        },
        witness,
        tested_points: test_set.to_vec(),
    }
}

/// Lower bound for the doubly slice genus of the Bing double: the maximum of
/// `2*|signature|` over the test set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DsBoundReport {
    pub bound: i64,
    pub witness: Option<(RootOfUnity, i64)>,
    pub tested_points: Vec<RootOfUnity>,
    pub note: String,
}

pub fn bing_double_ds_bound(m: &SeifertMatrix, test_set: &[RootOfUnity]) -> DsBoundReport {
    assert!(!test_set.is_empty(), "test set must be nonempty");
    let values = signatures_at_many(m, test_set);
    let mut bound = 0i64;
    let mut witness = None;
    for (&w, &v) in test_set.iter().zip(&values) {
        if 2 * v.abs() > bound {
            bound = 2 * v.abs();
            witness = Some((w, v));
        }
    }
    DsBoundReport {
        bound,
        witness,
        tested_points: test_set.to_vec(),
        note: "lower bound for the doubly slice genus of the Bing double; assumes the input \
               matrix comes from a slice knot"
            .to_string(),
    }
}

/// Numeric-mode signature at a root of unity.
pub fn signature_at_numeric(
    m: &SeifertMatrix,
    w: RootOfUnity,
    precision: u32,
) -> Result<i64, SignatureError> {
    signature_at_angle_numeric(m, w.fraction_f64(), precision)
}

/// Numeric-mode signature at an arbitrary circle angle (in turns). Uses the
/// symmetric realification [[S, -A], [A, S]] of H = S + iA, whose spectrum
/// doubles that of H, and cyclic Jacobi iteration; eigenvalues within
/// `10^-precision` of zero relative to the largest are refused.
pub fn signature_at_angle_numeric(
    m: &SeifertMatrix,
    turns: f64,
    precision: u32,
) -> Result<i64, SignatureError> {
    let HermitianMatrix::Numeric { re, im } = hermitian_matrix_numeric(m, turns)? else {
        unreachable!("numeric constructor")
    };
    let n = m.rank();
    if n == 0 {
        return Ok(0);
    }
    let mut real = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            real[i][j] = re[i][j];
            real[n + i][n + j] = re[i][j];
            real[i][n + j] = -im[i][j];
            real[n + i][j] = im[i][j];
        }
    }
    let eigenvalues = jacobi_eigenvalues(real);
    let scale = eigenvalues.iter().fold(0.0f64, |acc, e| acc.max(e.abs()));
    if scale == 0.0 {
        return Ok(0);
    }
    let tolerance = 10f64.powi(-(precision as i32)) * scale;
    let mut positive = 0i64;
    let mut negative = 0i64;
    for e in &eigenvalues {
        if e.abs() <= tolerance {
            return Err(SignatureError::UncertifiableSign { precision });
        }
        if *e > 0.0 {
            positive += 1;
        } else {
            negative += 1;
        }
    }
    if (positive - negative) % 2 != 0 {
        // Realified eigenvalues come in pairs; an odd split means a pair
        // straddled the tolerance cut.
        return Err(SignatureError::UncertifiableSign { precision });
    }
    Ok((positive - negative) / 2)
}

/// Cyclic Jacobi eigenvalue iteration for a symmetric matrix.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    if n <= 1 {
        return a.first().map(|r| r[0]).into_iter().collect();
    }
    let frobenius: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let target = frobenius * 1e-14;
    for _sweep in 0..60 {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q] * a[p][q])
            .sum::<f64>()
            .sqrt();
        if off <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}
