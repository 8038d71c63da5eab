//! Truncated Witt rings `W_n(F_q)` and polynomial simple frames over them.
//!
//! `W_n(F_{p^f})` is realized as the Galois ring `(Z/p^n)[x]/(P)` for a monic
//! lift `P` of an irreducible polynomial over `F_p`. Its Frobenius lift is the
//! unique ring endomorphism sending `x` to the root of `P` that reduces to
//! `x^p`; that root is found by Newton iteration.
//!
//! Every element carries an effective precision `k <= n`: it lives in
//! `W_k(F_q)`. Arithmetic between elements of different precision happens at
//! the smaller one, and [`Scalar::div_p_exact`] lowers the precision by one.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WittError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("precision must be at least 2, got {0}")]
    PrecisionTooSmall(u32),
    #[error("residue degree must be at least 1")]
    ZeroDegree,
    #[error("{p}^{n} does not fit the 31-bit residue word")]
    TooLarge { p: u64, n: u32 },
    #[error("no irreducible polynomial of degree {f} over F_{p} was found")]
    NoIrreducible { p: u64, f: usize },
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("element is not divisible by p")]
    NotDivisible,
    #[error("precision exhausted: dividing by p would leave no significant digits")]
    PrecisionExhausted,
    #[error("Frobenius lift on t is not congruent to t^p modulo p")]
    InvalidFrame,
    #[error("malformed element: {0}")]
    Malformed(String),
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// ---------------------------------------------------------------------------
// Raw polynomial arithmetic on coefficient vectors (low degree first).

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

/// Product of two residues of `(Z/q)[x]/(modulus)`, both of length `f`.
fn mul_mod(a: &[u64], b: &[u64], modulus: &[u64], q: u64) -> Vec<u64> {
    let f = modulus.len() - 1;
    let mut t = vec![0u64; 2 * f - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            t[i + j] = (t[i + j] + ai * bj) % q;
        }
    }
    for d in (f..t.len()).rev() {
        let c = t[d];
        if c == 0 {
            continue;
        }
        for i in 0..f {
            let s = (c * modulus[i]) % q;
            t[d - f + i] = (t[d - f + i] + q - s) % q;
        }
        t[d] = 0;
    }
    t.truncate(f);
    t
}

/// Remainder of `a` by a monic-after-normalization divisor over `F_p`.
fn fp_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    let lead_inv = fp_inv(*b.last().unwrap(), p);
    while r.len() > db {
        let dr = r.len() - 1;
        let c = r[dr] * lead_inv % p;
        for i in 0..=db {
            let s = c * b[i] % p;
            r[dr - db + i] = (r[dr - db + i] + p - s) % p;
        }
        r = trim(r);
    }
    r
}

fn fp_inv(a: u64, p: u64) -> u64 {
    let mut acc = 1;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = fp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// `x^(p^d) mod modulus` over `F_p`, as a length-`f` residue.
fn fp_frobenius_power_of_x(modulus: &[u64], p: u64, d: usize) -> Vec<u64> {
    let f = modulus.len() - 1;
    let mut x = vec![0u64; f];
    if f == 1 {
        // x reduces to -modulus[0]
        x[0] = (p - modulus[0] % p) % p;
    } else {
        x[1] = 1;
    }
    for _ in 0..d {
        let mut acc = {
            let mut one = vec![0u64; f];
            one[0] = 1;
            one
        };
        let mut base = x.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(&acc, &base, modulus, p);
            }
            base = mul_mod(&base, &base, modulus, p);
            e >>= 1;
        }
        x = acc;
    }
    x
}

/// Irreducibility over `F_p` of a monic polynomial: `x^(p^f) = x` modulo it and
/// `gcd(x^(p^d) - x, P) = 1` for every proper divisor `d` of `f`.
pub(crate) fn is_irreducible_mod_p(modulus: &[u64], p: u64) -> bool {
    let f = modulus.len() - 1;
    if f == 0 || modulus[f] % p != 1 {
        return false;
    }
    if f == 1 {
        return true;
    }
    let m: Vec<u64> = modulus.iter().map(|c| c % p).collect();
    let mut x = vec![0u64; f];
    x[1] = 1;
    if fp_frobenius_power_of_x(&m, p, f) != x {
        return false;
    }
    for d in 1..f {
        if f % d != 0 {
            continue;
        }
        let mut h = fp_frobenius_power_of_x(&m, p, d);
        h[1] = (h[1] + p - 1) % p;
        let g = fp_gcd(&m, &h, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// First monic irreducible of degree `f` when coefficient vectors are counted
/// in base `p` (constant term least significant).
fn first_irreducible(p: u64, f: usize) -> Option<Vec<u64>> {
    let count = p.checked_pow(f as u32)?;
    (0..count).find_map(|k| {
        let mut coeffs = Vec::with_capacity(f + 1);
        let mut k = k;
        for _ in 0..f {
            coeffs.push(k % p);
            k /= p;
        }
        coeffs.push(1);
        is_irreducible_mod_p(&coeffs, p).then_some(coeffs)
    })
}

// ---------------------------------------------------------------------------

/// Shared handle to a ring descriptor.
pub type Ring = Arc<RingDescriptor>;

/// The ring `W_n(F_{p^f}) = (Z/p^n)[x]/(modulus)` with its Frobenius lift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingDescriptor {
    p: u64,
    f: usize,
    n: u32,
    modulus: Vec<u64>,
    frobenius_image: Vec<u64>,
    /// `sigma_powers[i]` is `sigma(x)^i` at precision `n`.
    sigma_powers: Vec<Vec<u64>>,
    /// `p^k` for `k = 0..=n`.
    powers_of_p: Vec<u64>,
}

/// Builds `W_n(F_{p^f})` with the first irreducible modulus.
pub fn ring_make(p: u64, f: usize, n: u32) -> Result<Ring, WittError> {
    RingDescriptor::new(p, f, n)
}

impl RingDescriptor {
    pub fn new(p: u64, f: usize, n: u32) -> Result<Ring, WittError> {
        Self::check_params(p, f, n)?;
        let modulus = first_irreducible(p, f).ok_or(WittError::NoIrreducible { p, f })?;
        Self::with_modulus(p, f, n, modulus)
    }

    /// Uses the given monic modulus (`f + 1` coefficients, constant first).
    pub fn with_modulus(p: u64, f: usize, n: u32, modulus: Vec<u64>) -> Result<Ring, WittError> {
        Self::check_params(p, f, n)?;
        if modulus.len() != f + 1 {
            return Err(WittError::InvalidModulus(format!(
                "expected {} coefficients, got {}",
                f + 1,
                modulus.len()
            )));
        }
        let pn = p.pow(n);
        if modulus[f] != 1 {
            return Err(WittError::InvalidModulus("modulus must be monic".into()));
        }
        if modulus.iter().any(|&c| c >= pn) {
            return Err(WittError::InvalidModulus("coefficient out of range".into()));
        }
        if !is_irreducible_mod_p(&modulus, p) {
            return Err(WittError::InvalidModulus("not irreducible modulo p".into()));
        }
        let powers_of_p = (0..=n).map(|k| p.pow(k)).collect();
        let mut desc = RingDescriptor {
            p,
            f,
            n,
            modulus,
            frobenius_image: Vec::new(),
            sigma_powers: Vec::new(),
            powers_of_p,
        };
        desc.frobenius_image = desc.hensel_frobenius_image();
        let mut powers = Vec::with_capacity(f);
        let mut cur = vec![0u64; f];
        cur[0] = 1 % pn;
        for _ in 0..f {
            powers.push(cur.clone());
            cur = mul_mod(&cur, &desc.frobenius_image, &desc.modulus, pn);
        }
        desc.sigma_powers = powers;
        Ok(Arc::new(desc))
    }

    fn check_params(p: u64, f: usize, n: u32) -> Result<(), WittError> {
        if !is_prime(p) {
            return Err(WittError::NotPrime(p));
        }
        if n < 2 {
            return Err(WittError::PrecisionTooSmall(n));
        }
        if f == 0 {
            return Err(WittError::ZeroDegree);
        }
        match p.checked_pow(n) {
            Some(pn) if pn < (1 << 31) => Ok(()),
            _ => Err(WittError::TooLarge { p, n }),
        }
    }

    /// Newton iteration for the root of the modulus congruent to `x^p`.
    fn hensel_frobenius_image(&self) -> Vec<u64> {
        let f = self.f;
        let pn = self.p.pow(self.n);
        if f == 1 {
            // the modulus is x - a, whose only root is the class of x
            return vec![(pn - self.modulus[0]) % pn];
        }
        let eval = |r: &[u64], coeffs: &[u64]| -> Vec<u64> {
            let mut acc = vec![0u64; f];
            for &c in coeffs.iter().rev() {
                acc = mul_mod(&acc, r, &self.modulus, pn);
                acc[0] = (acc[0] + c) % pn;
            }
            acc
        };
        let derivative: Vec<u64> = (1..=f)
            .map(|i| (self.modulus[i] * i as u64) % pn)
            .collect();
        let mut x = vec![0u64; f];
        x[1] = 1;
        let mut root = {
            let mut acc = vec![0u64; f];
            acc[0] = 1;
            for _ in 0..self.p {
                acc = mul_mod(&acc, &x, &self.modulus, pn);
            }
            acc
        };
        for _ in 0..self.n {
            let value = eval(&root, &self.modulus);
            let slope = eval(&root, &derivative);
            let slope_inv = self.raw_inverse(&slope, self.n);
            let step = mul_mod(&value, &slope_inv, &self.modulus, pn);
            for i in 0..f {
                root[i] = (root[i] + pn - step[i]) % pn;
            }
        }
        root
    }

    fn raw_inverse(&self, a: &[u64], prec: u32) -> Vec<u64> {
        let q = self.powers_of_p[prec as usize];
        let residue = self.p.pow(self.f as u32);
        // |W_k(F_q)^x| = (q - 1) q^(k - 1)
        let order = (residue - 1) * residue.pow(prec - 1);
        let mut acc = vec![0u64; self.f];
        acc[0] = 1 % q;
        let mut base = a.to_vec();
        let mut e = order - 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(&acc, &base, &self.modulus, q);
            }
            base = mul_mod(&base, &base, &self.modulus, q);
            e >>= 1;
        }
        acc
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn frobenius_image_coeffs(&self) -> &[u64] {
        &self.frobenius_image
    }

    /// Order `q = p^f` of the residue field.
    pub fn residue_order(&self) -> u64 {
        self.p.pow(self.f as u32)
    }

    fn modulus_at(&self, prec: u32) -> u64 {
        self.powers_of_p[prec as usize]
    }

    pub fn to_json(&self) -> RingJson {
        RingJson {
            p: self.p,
            f: self.f,
            n: self.n,
            modulus: self.modulus.clone(),
        }
    }

    pub fn from_json(json: &RingJson) -> Result<Ring, WittError> {
        Self::with_modulus(json.p, json.f, json.n, json.modulus.clone())
    }
}

/// Wire form of a ring descriptor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingJson {
    pub p: u64,
    pub f: usize,
    pub n: u32,
    pub modulus: Vec<u64>,
}

/// Wire form of a ring element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElemJson {
    pub coeffs: Vec<u64>,
    pub prec: u32,
}

// ---------------------------------------------------------------------------

/// An element of `W_k(F_q)` for some effective precision `1 <= k <= n`.
/// Precision 1 elements are elements of the residue field `F_q`.
#[derive(Clone)]
pub struct RingElem {
    ring: Ring,
    coeffs: Vec<u64>,
    prec: u32,
}

impl RingElem {
    pub fn from_coeffs(ring: &Ring, coeffs: &[i64], prec: u32) -> Self {
        assert!(prec >= 1 && prec <= ring.n, "precision {prec} out of range");
        assert!(coeffs.len() <= ring.f, "too many coefficients");
        let q = ring.modulus_at(prec) as i64;
        let mut c = vec![0u64; ring.f];
        for (slot, &v) in c.iter_mut().zip(coeffs) {
            *slot = v.rem_euclid(q) as u64;
        }
        RingElem {
            ring: ring.clone(),
            coeffs: c,
            prec,
        }
    }

    pub fn from_int(ring: &Ring, value: i64, prec: u32) -> Self {
        Self::from_coeffs(ring, &[value], prec)
    }

    pub fn zero(ring: &Ring, prec: u32) -> Self {
        Self::from_int(ring, 0, prec)
    }

    pub fn one(ring: &Ring, prec: u32) -> Self {
        Self::from_int(ring, 1, prec)
    }

    /// The class of `x`; for `f = 1` this is the integer root of the linear modulus.
    pub fn generator(ring: &Ring, prec: u32) -> Self {
        if ring.f == 1 {
            let q = ring.modulus_at(prec);
            let v = (q - ring.modulus[0] % q) % q;
            return RingElem {
                ring: ring.clone(),
                coeffs: vec![v],
                prec,
            };
        }
        Self::from_coeffs(ring, &[0, 1], prec)
    }

    pub fn random<R: Rng + ?Sized>(ring: &Ring, prec: u32, rng: &mut R) -> Self {
        let q = ring.modulus_at(prec);
        RingElem {
            ring: ring.clone(),
            coeffs: (0..ring.f).map(|_| rng.gen_range(0..q)).collect(),
            prec,
        }
    }

    pub fn random_unit<R: Rng + ?Sized>(ring: &Ring, prec: u32, rng: &mut R) -> Self {
        loop {
            let x = Self::random(ring, prec, rng);
            if x.is_unit() {
                return x;
            }
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn to_json(&self) -> ElemJson {
        ElemJson {
            coeffs: self.coeffs.clone(),
            prec: self.prec,
        }
    }

    pub fn from_json(ring: &Ring, json: &ElemJson) -> Result<Self, WittError> {
        if json.prec == 0 || json.prec > ring.n {
            return Err(WittError::Malformed(format!("precision {} out of range", json.prec)));
        }
        if json.coeffs.len() != ring.f {
            return Err(WittError::Malformed(format!(
                "expected {} coefficients, got {}",
                ring.f,
                json.coeffs.len()
            )));
        }
        let q = ring.modulus_at(json.prec);
        if json.coeffs.iter().any(|&c| c >= q) {
            return Err(WittError::Malformed("coefficient is not a canonical residue".into()));
        }
        Ok(RingElem {
            ring: ring.clone(),
            coeffs: json.coeffs.clone(),
            prec: json.prec,
        })
    }

    /// Index of a residue-field element in `0..q` (coefficients read in base p).
    pub fn residue_index(&self) -> u64 {
        let p = self.ring.p;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| acc * p + c % p)
    }

    /// Inverse of [`RingElem::residue_index`].
    pub fn from_residue_index(ring: &Ring, mut index: u64) -> Self {
        let p = ring.p;
        let coeffs = (0..ring.f)
            .map(|_| {
                let c = index % p;
                index /= p;
                c
            })
            .collect();
        RingElem {
            ring: ring.clone(),
            coeffs,
            prec: 1,
        }
    }

    fn same_ring(&self, other: &Self) {
        debug_assert!(
            Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring,
            "mixing elements of different rings"
        );
    }

    fn binary(&self, rhs: &Self, op: impl Fn(u64, u64, u64) -> u64) -> Self {
        self.same_ring(rhs);
        let prec = self.prec.min(rhs.prec);
        let q = self.ring.modulus_at(prec);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(&a, &b)| op(a % q, b % q, q))
            .collect();
        RingElem {
            ring: self.ring.clone(),
            coeffs,
            prec,
        }
    }
}

impl PartialEq for RingElem {
    fn eq(&self, other: &Self) -> bool {
        self.prec == other.prec
            && self.coeffs == other.coeffs
            && (Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring)
    }
}

impl fmt::Debug for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self, self.ring.p, self.prec)
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            terms.push(match (i, c) {
                (0, c) => format!("{c}"),
                (1, 1) => "x".to_string(),
                (1, c) => format!("{c}x"),
                (i, 1) => format!("x^{i}"),
                (i, c) => format!("{c}x^{i}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join("+"))
        }
    }
}

impl Scalar for RingElem {
    fn zero_like(&self) -> Self {
        RingElem {
            ring: self.ring.clone(),
            coeffs: vec![0; self.ring.f],
            prec: self.prec,
        }
    }

    fn one_like(&self) -> Self {
        self.int_like(1)
    }

    fn int_like(&self, value: i64) -> Self {
        RingElem::from_int(&self.ring, value, self.prec)
    }

    fn add(&self, rhs: &Self) -> Self {
        self.binary(rhs, |a, b, q| (a + b) % q)
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.binary(rhs, |a, b, q| (a + q - b) % q)
    }

    fn mul(&self, rhs: &Self) -> Self {
        self.same_ring(rhs);
        let prec = self.prec.min(rhs.prec);
        let q = self.ring.modulus_at(prec);
        let a: Vec<u64> = self.coeffs.iter().map(|c| c % q).collect();
        let b: Vec<u64> = rhs.coeffs.iter().map(|c| c % q).collect();
        RingElem {
            ring: self.ring.clone(),
            coeffs: mul_mod(&a, &b, &self.ring.modulus, q),
            prec,
        }
    }

    fn neg(&self) -> Self {
        let q = self.ring.modulus_at(self.prec);
        RingElem {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|&c| (q - c) % q).collect(),
            prec: self.prec,
        }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn is_unit(&self) -> bool {
        let p = self.ring.p;
        self.coeffs.iter().any(|&c| c % p != 0)
    }

    fn inverse(&self) -> Option<Self> {
        if !self.is_unit() {
            return None;
        }
        Some(RingElem {
            ring: self.ring.clone(),
            coeffs: self.ring.raw_inverse(&self.coeffs, self.prec),
            prec: self.prec,
        })
    }

    fn frobenius(&self) -> Self {
        let q = self.ring.modulus_at(self.prec);
        let mut out = vec![0u64; self.ring.f];
        for (c, power) in self.coeffs.iter().zip(&self.ring.sigma_powers) {
            if *c == 0 {
                continue;
            }
            for (slot, &v) in out.iter_mut().zip(power) {
                *slot = (*slot + c * (v % q)) % q;
            }
        }
        RingElem {
            ring: self.ring.clone(),
            coeffs: out,
            prec: self.prec,
        }
    }

    fn div_p_exact(&self) -> Result<Self, WittError> {
        if self.prec < 2 {
            return Err(WittError::PrecisionExhausted);
        }
        let p = self.ring.p;
        if self.coeffs.iter().any(|&c| c % p != 0) {
            return Err(WittError::NotDivisible);
        }
        Ok(RingElem {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|&c| c / p).collect(),
            prec: self.prec - 1,
        })
    }

    fn reduce_mod_p(&self) -> Self {
        self.truncate(1)
    }

    fn precision(&self) -> u32 {
        self.prec
    }

    fn truncate(&self, prec: u32) -> Self {
        assert!(
            prec >= 1 && prec <= self.prec,
            "cannot truncate precision {} to {}",
            self.prec,
            prec
        );
        let q = self.ring.modulus_at(prec);
        RingElem {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|&c| c % q).collect(),
            prec,
        }
    }

    fn prime(&self) -> u64 {
        self.ring.p
    }
}

// ---------------------------------------------------------------------------
// Polynomial frames.

pub type Frame = Arc<PolyFrame>;

/// The polynomial ring `W_n(F_q)[t]` with a Frobenius lift acting on the base
/// ring as usual and sending `t` to `sigma_t`.
#[derive(Debug, Clone)]
pub struct PolyFrame {
    base: Ring,
    /// Coefficients of `sigma(t)` at precision `n`, trailing zeros removed.
    sigma_t: Vec<RingElem>,
}

impl PolyFrame {
    /// The frame with `sigma(t) = t^p`.
    pub fn standard(base: &Ring) -> Frame {
        let n = base.n;
        let mut sigma_t = vec![RingElem::zero(base, n); base.p as usize + 1];
        sigma_t[base.p as usize] = RingElem::one(base, n);
        Arc::new(PolyFrame {
            base: base.clone(),
            sigma_t,
        })
    }

    /// The frame with `sigma(t) = t^p + p * c(t)`.
    pub fn shifted(base: &Ring, c: &[RingElem]) -> Frame {
        let n = base.n;
        let len = (base.p as usize + 1).max(c.len());
        let mut sigma_t = vec![RingElem::zero(base, n); len];
        sigma_t[base.p as usize] = RingElem::one(base, n);
        for (slot, ci) in sigma_t.iter_mut().zip(c) {
            *slot = slot.add(&ci.times_p());
        }
        Self::new(base, sigma_t).expect("t^p + p c(t) is a Frobenius lift")
    }

    pub fn new(base: &Ring, sigma_t: Vec<RingElem>) -> Result<Frame, WittError> {
        let n = base.n;
        let mut sigma_t: Vec<RingElem> = sigma_t
            .into_iter()
            .map(|c| {
                if c.prec == n {
                    Ok(c)
                } else {
                    Err(WittError::Malformed("sigma(t) must be given at full precision".into()))
                }
            })
            .collect::<Result<_, _>>()?;
        while sigma_t.last().is_some_and(|c| c.is_zero()) {
            sigma_t.pop();
        }
        let p = base.p as usize;
        for (i, c) in sigma_t.iter().enumerate() {
            let expected = if i == p { 1 } else { 0 };
            if c.reduce_mod_p() != RingElem::from_int(base, expected, 1) {
                return Err(WittError::InvalidFrame);
            }
        }
        if sigma_t.len() <= p {
            return Err(WittError::InvalidFrame);
        }
        Ok(Arc::new(PolyFrame {
            base: base.clone(),
            sigma_t,
        }))
    }

    pub fn base(&self) -> &Ring {
        &self.base
    }

    pub fn sigma_t(&self) -> &[RingElem] {
        &self.sigma_t
    }

    fn sigma_t_agrees(&self, other: &PolyFrame, prec: u32) -> bool {
        let a: Vec<RingElem> = self.sigma_t.iter().map(|c| c.truncate(prec)).collect();
        let b: Vec<RingElem> = other.sigma_t.iter().map(|c| c.truncate(prec)).collect();
        trim_elems(a) == trim_elems(b)
    }
}

fn trim_elems(mut v: Vec<RingElem>) -> Vec<RingElem> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

/// An element of `W_k(F_q)[t]` in a polynomial frame. Coefficients are kept at
/// the element's precision with trailing zeros removed.
#[derive(Clone)]
pub struct PolyElem {
    frame: Frame,
    coeffs: Vec<RingElem>,
    prec: u32,
}

impl PolyElem {
    pub fn from_coeffs(frame: &Frame, coeffs: Vec<RingElem>, prec: u32) -> Self {
        let coeffs = coeffs.into_iter().map(|c| c.truncate(prec)).collect();
        PolyElem {
            frame: frame.clone(),
            coeffs: trim_elems(coeffs),
            prec,
        }
    }

    pub fn constant(frame: &Frame, c: &RingElem) -> Self {
        Self::from_coeffs(frame, vec![c.clone()], c.prec)
    }

    pub fn zero(frame: &Frame, prec: u32) -> Self {
        PolyElem {
            frame: frame.clone(),
            coeffs: Vec::new(),
            prec,
        }
    }

    pub fn t(frame: &Frame, prec: u32) -> Self {
        let base = &frame.base;
        Self::from_coeffs(
            frame,
            vec![RingElem::zero(base, prec), RingElem::one(base, prec)],
            prec,
        )
    }

    pub fn random<R: Rng + ?Sized>(frame: &Frame, prec: u32, max_degree: usize, rng: &mut R) -> Self {
        let coeffs = (0..=max_degree)
            .map(|_| RingElem::random(&frame.base, prec, rng))
            .collect();
        Self::from_coeffs(frame, coeffs, prec)
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn coeffs(&self) -> &[RingElem] {
        &self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn constant_term(&self) -> RingElem {
        self.coeffs
            .first()
            .cloned()
            .unwrap_or_else(|| RingElem::zero(&self.frame.base, self.prec))
    }

    fn same_frame(&self, other: &Self) {
        debug_assert!(
            Arc::ptr_eq(&self.frame, &other.frame)
                || (self.frame.base == other.frame.base
                    && self.frame.sigma_t_agrees(&other.frame, self.prec.min(other.prec))),
            "mixing elements of different frames"
        );
    }

    fn coeff(&self, i: usize, prec: u32) -> RingElem {
        match self.coeffs.get(i) {
            Some(c) => c.truncate(prec),
            None => RingElem::zero(&self.frame.base, prec),
        }
    }
}

impl PartialEq for PolyElem {
    fn eq(&self, other: &Self) -> bool {
        self.prec == other.prec
            && self.coeffs == other.coeffs
            && (Arc::ptr_eq(&self.frame, &other.frame)
                || (self.frame.base == other.frame.base
                    && self.frame.sigma_t_agrees(&other.frame, self.prec)))
    }
}

impl fmt::Debug for PolyElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self, self.frame.base.p, self.prec)
    }
}

impl fmt::Display for PolyElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let c_str = c.to_string();
            let c_str = if c_str.contains('+') || c_str.contains('x') {
                format!("({c_str})")
            } else {
                c_str
            };
            terms.push(match i {
                0 => c_str,
                1 if c.is_one() => "t".to_string(),
                1 => format!("{c_str}t"),
                _ if c.is_one() => format!("t^{i}"),
                _ => format!("{c_str}t^{i}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join("+"))
        }
    }
}

impl Scalar for PolyElem {
    fn zero_like(&self) -> Self {
        PolyElem::zero(&self.frame, self.prec)
    }

    fn one_like(&self) -> Self {
        self.int_like(1)
    }

    fn int_like(&self, value: i64) -> Self {
        PolyElem::constant(&self.frame, &RingElem::from_int(&self.frame.base, value, self.prec))
    }

    fn add(&self, rhs: &Self) -> Self {
        self.same_frame(rhs);
        let prec = self.prec.min(rhs.prec);
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len)
            .map(|i| self.coeff(i, prec).add(&rhs.coeff(i, prec)))
            .collect();
        PolyElem::from_coeffs(&self.frame, coeffs, prec)
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    fn mul(&self, rhs: &Self) -> Self {
        self.same_frame(rhs);
        let prec = self.prec.min(rhs.prec);
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return PolyElem::zero(&self.frame, prec);
        }
        let base = &self.frame.base;
        let mut out = vec![RingElem::zero(base, prec); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        PolyElem::from_coeffs(&self.frame, out, prec)
    }

    fn neg(&self) -> Self {
        PolyElem {
            frame: self.frame.clone(),
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
            prec: self.prec,
        }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Units of `W_k(F_q)[t]` are the polynomials reducing to a nonzero constant.
    fn is_unit(&self) -> bool {
        let r = self.reduce_mod_p();
        r.coeffs.len() == 1 && r.coeffs[0].is_unit()
    }

    fn inverse(&self) -> Option<Self> {
        if !self.is_unit() {
            return None;
        }
        let a0 = self.constant_term();
        let a0_inv = PolyElem::constant(&self.frame, &a0.inverse()?);
        // self = a0 (1 + y) with y nilpotent of order <= prec
        let y = a0_inv.mul(&self.sub(&PolyElem::constant(&self.frame, &a0)));
        let minus_y = y.neg();
        let mut term = self.one_like();
        let mut series = self.one_like();
        for _ in 1..self.prec {
            term = term.mul(&minus_y);
            series = series.add(&term);
        }
        Some(a0_inv.mul(&series))
    }

    fn frobenius(&self) -> Self {
        let prec = self.prec;
        let sigma_t = PolyElem::from_coeffs(
            &self.frame,
            self.frame.sigma_t.iter().map(|c| c.truncate(prec)).collect(),
            prec,
        );
        let mut acc = PolyElem::zero(&self.frame, prec);
        for c in self.coeffs.iter().rev() {
            acc = acc
                .mul(&sigma_t)
                .add(&PolyElem::constant(&self.frame, &c.frobenius()));
        }
        acc
    }

    fn div_p_exact(&self) -> Result<Self, WittError> {
        if self.prec < 2 {
            return Err(WittError::PrecisionExhausted);
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.div_p_exact())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PolyElem::from_coeffs(&self.frame, coeffs, self.prec - 1))
    }

    /// Lands in `F_q[t]` with the standard frame: every Frobenius lift reduces
    /// to `t -> t^p`, so the residue ring does not remember the frame.
    fn reduce_mod_p(&self) -> Self {
        let frame = PolyFrame::standard(&self.frame.base);
        PolyElem::from_coeffs(&frame, self.coeffs.clone(), 1)
    }

    fn precision(&self) -> u32 {
        self.prec
    }

    fn truncate(&self, prec: u32) -> Self {
        assert!(prec >= 1 && prec <= self.prec, "cannot raise precision");
        PolyElem::from_coeffs(&self.frame, self.coeffs.clone(), prec)
    }

    fn prime(&self) -> u64 {
        self.frame.base.p
    }
}
