//! Matrix groups `GL_m` and `GSp_m` with a minuscule cocharacter, the
//! subgroups cut out by its weights, the zip group `E_mu` and cosets of
//! `U_-^sigma`.
//!
//! The cocharacter `mu` acts with weight 1 or 0 on each standard coordinate.
//! It induces the block patterns used throughout:
//!
//! * `P+`: entry `(i, j)` vanishes when `w_i < w_j`,
//! * `P-`: entry `(i, j)` vanishes when `w_i > w_j`,
//! * `M = P+ ∩ P-`, and `U±` are `P±` with identity diagonal blocks.
//!
//! With weights sorted as `(1, ..., 1, 0, ..., 0)` these are the block upper
//! triangular, block lower triangular and block diagonal matrices.
//!
//! All groups here are split and `mu` is defined over `F_p`, so every
//! `sigma`-twisted subgroup coincides with its untwisted version. The
//! Frobenius still acts non-trivially on points with coefficients in
//! `F_{p^f}`, which is why `sigma(m)` appears in the zip-group action.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Matrix;
use crate::sample::RandomScalar;
use crate::scalar::Scalar;
use crate::witt::WittError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("invalid cocharacter weights: {0}")]
    InvalidWeights(String),
    #[error("GSp needs an even matrix size, got {0}")]
    OddSizeGSp(usize),
    #[error("shape mismatch: expected {expected}x{expected}, got {rows}x{cols}")]
    ShapeMismatch { expected: usize, rows: usize, cols: usize },
    #[error("matrix is not an element of {0}")]
    NotMember(String),
    #[error("element is not in the subgroup {0}")]
    SubgroupViolation(Subgroup),
    #[error("cannot parse group spec {0:?}")]
    Parse(String),
    #[error(transparent)]
    Witt(#[from] WittError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupKind {
    GL,
    GSp,
}

/// A group together with the 0/1 weights of its cocharacter on the standard
/// coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SpecJson", into = "SpecJson")]
pub struct GroupSpec {
    kind: GroupKind,
    m: usize,
    mu: Vec<u8>,
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    kind: GroupKind,
    m: usize,
    mu: Vec<u8>,
}

impl TryFrom<SpecJson> for GroupSpec {
    type Error = GroupError;

    fn try_from(j: SpecJson) -> Result<Self, GroupError> {
        group_make(j.kind, j.m, &j.mu)
    }
}

impl From<GroupSpec> for SpecJson {
    fn from(s: GroupSpec) -> Self {
        SpecJson {
            kind: s.kind,
            m: s.m,
            mu: s.mu,
        }
    }
}

pub fn group_make(kind: GroupKind, m: usize, mu: &[u8]) -> Result<GroupSpec, GroupError> {
    if m == 0 {
        return Err(GroupError::InvalidWeights("empty matrix size".into()));
    }
    if mu.len() != m {
        return Err(GroupError::InvalidWeights(format!(
            "expected {m} weights, got {}",
            mu.len()
        )));
    }
    if mu.iter().any(|&w| w > 1) {
        return Err(GroupError::InvalidWeights("weights must be 0 or 1".into()));
    }
    if kind == GroupKind::GSp {
        if m % 2 == 1 {
            return Err(GroupError::OddSizeGSp(m));
        }
        let g = m / 2;
        if mu[..g].iter().any(|&w| w != 1) || mu[g..].iter().any(|&w| w != 0) {
            return Err(GroupError::InvalidWeights(
                "GSp requires the Siegel weights (1,...,1,0,...,0)".into(),
            ));
        }
    }
    Ok(GroupSpec {
        kind,
        m,
        mu: mu.to_vec(),
    })
}

impl GroupSpec {
    /// Parses `KIND:m:weights`, e.g. `GL:3:110` or `GSp:4:1100`.
    pub fn parse(s: &str) -> Result<GroupSpec, GroupError> {
        let bad = || GroupError::Parse(s.to_string());
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let kind = match parts[0].to_ascii_lowercase().as_str() {
            "gl" => GroupKind::GL,
            "gsp" => GroupKind::GSp,
            _ => return Err(bad()),
        };
        let m: usize = parts[1].parse().map_err(|_| bad())?;
        let mu = parts[2]
            .chars()
            .filter(|c| *c != ',')
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(GroupError::InvalidWeights(format!("unexpected weight {c:?}"))),
            })
            .collect::<Result<Vec<u8>, _>>()?;
        group_make(kind, m, &mu)
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn mu(&self) -> &[u8] {
        &self.mu
    }

    pub fn weight(&self, i: usize) -> u8 {
        self.mu[i]
    }

    /// Number of weight-1 coordinates, the rank of the Hodge filtration.
    pub fn d(&self) -> usize {
        self.mu.iter().filter(|&&w| w == 1).count()
    }

    pub fn weight_one(&self) -> Vec<usize> {
        (0..self.m).filter(|&i| self.mu[i] == 1).collect()
    }

    pub fn weight_zero(&self) -> Vec<usize> {
        (0..self.m).filter(|&i| self.mu[i] == 0).collect()
    }

    /// Partner coordinate `m - 1 - i` under the symplectic form.
    pub fn partner(&self, i: usize) -> usize {
        self.m - 1 - i
    }

    /// The antidiagonal Gram matrix `J` (GSp only): `+1` in the upper half,
    /// `-1` in the lower half.
    pub fn gram<S: Scalar>(&self, proto: &S) -> Matrix<S> {
        let m = self.m;
        let z = proto.zero_like();
        Matrix::from_fn(m, m, |i, j| {
            if j == m - 1 - i {
                proto.int_like(if i < m / 2 { 1 } else { -1 })
            } else {
                z.clone()
            }
        })
    }

    fn short(&self) -> String {
        let w: String = self.mu.iter().map(|w| w.to_string()).collect();
        format!("{:?}:{}:{}", self.kind, self.m, w)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.short())
    }
}

fn check_shape<S: Scalar>(spec: &GroupSpec, g: &Matrix<S>) -> Result<(), GroupError> {
    if g.rows() != spec.m || g.cols() != spec.m {
        return Err(GroupError::ShapeMismatch {
            expected: spec.m,
            rows: g.rows(),
            cols: g.cols(),
        });
    }
    Ok(())
}

/// The similitude factor `c` with `g^T J g = c J`, if `c` exists and is a unit.
pub fn similitude<S: Scalar>(spec: &GroupSpec, g: &Matrix<S>) -> Option<S> {
    let j = spec.gram(g.proto());
    let form = g.transpose().mul(&j).mul(g);
    let c = form.get(0, spec.m - 1).clone();
    if !c.is_unit() {
        return None;
    }
    if form == j.scale(&c) {
        Some(c)
    } else {
        None
    }
}

pub fn is_member<S: Scalar>(spec: &GroupSpec, g: &Matrix<S>) -> Result<bool, GroupError> {
    check_shape(spec, g)?;
    Ok(match spec.kind {
        GroupKind::GL => g.det().is_unit(),
        GroupKind::GSp => similitude(spec, g).is_some(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subgroup {
    PPlus,
    UPlus,
    PMinus,
    UMinus,
    Levi,
    PMinusSigma,
    UMinusSigma,
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Subgroup::PPlus => "P+",
            Subgroup::UPlus => "U+",
            Subgroup::PMinus => "P-",
            Subgroup::UMinus => "U-",
            Subgroup::Levi => "M",
            Subgroup::PMinusSigma => "P-^sigma",
            Subgroup::UMinusSigma => "U-^sigma",
        };
        write!(f, "{s}")
    }
}

/// Block-pattern test for a matrix already known to lie in the group.
pub fn subgroup_member<S: Scalar>(spec: &GroupSpec, g: &Matrix<S>, which: Subgroup) -> bool {
    let w = &spec.mu;
    let (kill_below, kill_above, unipotent) = match which {
        Subgroup::PPlus => (true, false, false),
        Subgroup::UPlus => (true, false, true),
        Subgroup::PMinus | Subgroup::PMinusSigma => (false, true, false),
        Subgroup::UMinus | Subgroup::UMinusSigma => (false, true, true),
        Subgroup::Levi => (true, true, false),
    };
    for i in 0..spec.m {
        for j in 0..spec.m {
            let a = g.get(i, j);
            if w[i] < w[j] && kill_below && !a.is_zero() {
                return false;
            }
            if w[i] > w[j] && kill_above && !a.is_zero() {
                return false;
            }
            if w[i] == w[j] && unipotent {
                let ok = if i == j { a.is_one() } else { a.is_zero() };
                if !ok {
                    return false;
                }
            }
        }
    }
    true
}

/// The block-diagonal part of `g`; for `g` in `P+` or `P-` this is its Levi
/// component.
pub fn levi_part<S: Scalar>(spec: &GroupSpec, g: &Matrix<S>) -> Matrix<S> {
    let z = g.proto().zero_like();
    Matrix::from_fn(spec.m, spec.m, |i, j| {
        if spec.mu[i] == spec.mu[j] {
            g.get(i, j).clone()
        } else {
            z.clone()
        }
    })
}

/// `mu(s)`: `s` on weight-1 coordinates, 1 elsewhere.
pub fn cochar_at<S: Scalar>(spec: &GroupSpec, s: &S) -> Matrix<S> {
    let one = s.one_like();
    let diag: Vec<S> = spec
        .mu
        .iter()
        .map(|&w| if w == 1 { s.clone() } else { one.clone() })
        .collect();
    Matrix::diagonal(&diag)
}

/// `mu(p)`, a non-invertible matrix over `W_n`.
pub fn cochar_at_p<S: Scalar>(spec: &GroupSpec, proto: &S) -> Matrix<S> {
    cochar_at(spec, &proto.int_like(proto.prime() as i64))
}

/// `p * mu(p)^{-1}`: 1 on weight-1 coordinates, `p` on weight-0 coordinates.
pub fn cochar_complement_at_p<S: Scalar>(spec: &GroupSpec, proto: &S) -> Matrix<S> {
    let p = proto.int_like(proto.prime() as i64);
    let one = proto.one_like();
    let diag: Vec<S> = spec
        .mu
        .iter()
        .map(|&w| if w == 1 { one.clone() } else { p.clone() })
        .collect();
    Matrix::diagonal(&diag)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MuConjugate<S> {
    /// `mu(p) h mu(p)^{-1}` at one level of precision less, when integral.
    pub matrix: Option<Matrix<S>>,
    pub integral: bool,
    pub congruent_to_one: bool,
}

/// Conjugation by `mu(p)`, which scales entry `(i, j)` by `p^(w_i - w_j)`.
pub fn mu_p_conjugate<S: Scalar>(
    spec: &GroupSpec,
    h: &Matrix<S>,
) -> Result<MuConjugate<S>, GroupError> {
    check_shape(spec, h)?;
    let prec = h.precision();
    if prec < 2 {
        return Err(WittError::PrecisionExhausted.into());
    }
    let mut entries = Vec::with_capacity(spec.m);
    for i in 0..spec.m {
        let mut row = Vec::with_capacity(spec.m);
        for j in 0..spec.m {
            let a = h.get(i, j);
            let e = match spec.mu[i] as i8 - spec.mu[j] as i8 {
                1 => a.times_p().truncate(prec - 1),
                0 => a.truncate(prec - 1),
                _ => match a.truncate(prec).div_p_exact() {
                    Ok(b) => b,
                    Err(WittError::NotDivisible) => {
                        return Ok(MuConjugate {
                            matrix: None,
                            integral: false,
                            congruent_to_one: false,
                        })
                    }
                    Err(e) => return Err(e.into()),
                },
            };
            row.push(e);
        }
        entries.push(row);
    }
    let c = Matrix::from_rows(entries);
    let congruent_to_one = c.reduce_mod_p().is_identity();
    Ok(MuConjugate {
        matrix: Some(c),
        integral: true,
        congruent_to_one,
    })
}

// ---------------------------------------------------------------------------

/// A matrix known to lie in the group of its spec.
#[derive(Clone, PartialEq)]
pub struct GroupElem<S> {
    spec: GroupSpec,
    mat: Matrix<S>,
}

impl<S: Scalar> GroupElem<S> {
    pub fn new(spec: &GroupSpec, mat: Matrix<S>) -> Result<Self, GroupError> {
        if !is_member(spec, &mat)? {
            return Err(GroupError::NotMember(spec.to_string()));
        }
        Ok(GroupElem {
            spec: spec.clone(),
            mat,
        })
    }

    /// Wraps a matrix produced by group operations; membership is re-checked
    /// in debug builds.
    pub fn from_trusted(spec: &GroupSpec, mat: Matrix<S>) -> Self {
        debug_assert!(
            is_member(spec, &mat).unwrap_or(false),
            "not an element of {spec}: {mat}"
        );
        GroupElem {
            spec: spec.clone(),
            mat,
        }
    }

    pub fn identity(spec: &GroupSpec, proto: &S) -> Self {
        GroupElem {
            spec: spec.clone(),
            mat: Matrix::identity(spec.m, proto),
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.mat
    }

    pub fn into_matrix(self) -> Matrix<S> {
        self.mat
    }

    pub fn similitude(&self) -> Option<S> {
        match self.spec.kind {
            GroupKind::GL => None,
            GroupKind::GSp => similitude(&self.spec, &self.mat),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::from_trusted(&self.spec, self.mat.mul(&rhs.mat))
    }

    pub fn inverse(&self) -> Self {
        let inv = self.mat.inverse().expect("group elements are invertible");
        Self::from_trusted(&self.spec, inv)
    }

    /// Entrywise Frobenius. `J` has entries in `{0, 1, -1}`, so this
    /// preserves the group.
    pub fn frobenius(&self) -> Self {
        Self::from_trusted(&self.spec, self.mat.frobenius())
    }

    pub fn reduce_mod_p(&self) -> Self {
        Self::from_trusted(&self.spec, self.mat.reduce_mod_p())
    }

    pub fn truncate(&self, prec: u32) -> Self {
        Self::from_trusted(&self.spec, self.mat.truncate(prec))
    }

    pub fn in_subgroup(&self, which: Subgroup) -> bool {
        subgroup_member(&self.spec, &self.mat, which)
    }
}

pub fn sigma_elem<S: Scalar>(g: &GroupElem<S>) -> GroupElem<S> {
    g.frobenius()
}

impl<S: fmt::Debug> fmt::Debug for GroupElem<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:?}", self.spec, self.mat)
    }
}

/// Which half of the columns a symplectic fix-up may change.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Adjust {
    /// Change the weight-0 columns by adding combinations of the weight-1
    /// columns (right multiplication by `U+`).
    WeightZero,
    /// Change the weight-1 columns by adding combinations of the weight-0
    /// columns (right multiplication by `U-`).
    WeightOne,
}

/// Moves `g` within its right `U+` or `U-` coset (of `GL_m`) into `GSp_m`.
///
/// The pairing between the two halves of the columns is invariant under such
/// moves and must already be `c K`; the alternating Gram matrix of the
/// adjustable half is then cleared by a strictly triangular correction, which
/// needs no division by 2. Returns `None` if no symplectic representative
/// exists. Weights must be sorted, as they are for every GSp spec.
pub fn symplectic_fixup<S: Scalar>(spec: &GroupSpec, g: &Matrix<S>, adjust: Adjust) -> Option<Matrix<S>> {
    assert_eq!(spec.kind, GroupKind::GSp, "symplectic fix-up needs a GSp spec");
    let m = spec.m;
    let h = m / 2;
    let proto = g.proto();
    let j = spec.gram(proto);
    let k = flip(h, proto);
    let first: Vec<usize> = (0..h).collect();
    let second: Vec<usize> = (h..m).collect();
    let p = g.select_cols(&first);
    let q = g.select_cols(&second);
    let (fixed, moving) = match adjust {
        Adjust::WeightZero => (&p, &q),
        Adjust::WeightOne => (&q, &p),
    };
    if !fixed.transpose().mul(&j).mul(fixed).is_zero() {
        return None;
    }
    let n = p.transpose().mul(&j).mul(&q);
    let c = n.get(0, h - 1).clone();
    let c_inv = c.inverse()?;
    if n != k.scale(&c) {
        return None;
    }
    let s = moving.transpose().mul(&j).mul(moving);
    let z = proto.zero_like();
    let mut y = Matrix::from_fn(h, h, |a, b| if a < b { s.get(a, b).mul(&c_inv) } else { z.clone() });
    if adjust == Adjust::WeightOne {
        y = y.map(|a| a.neg());
    }
    let moved = moving.add(&fixed.mul(&k).mul(&y));
    let out = match adjust {
        Adjust::WeightZero => p.hstack(&moved),
        Adjust::WeightOne => moved.hstack(&q),
    };
    similitude(spec, &out).map(|_| out)
}

// ---------------------------------------------------------------------------
// Random elements

fn transvection<S: Scalar>(m: usize, i: usize, j: usize, a: &S) -> Matrix<S> {
    let mut t = Matrix::identity(m, a);
    t.set(i, j, a.clone());
    t
}

/// Random element of `GL_k` as a product of a unit diagonal and transvections.
/// Whether random entries are arbitrary or congruent to the identity mod p.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Draw {
    Any,
    Congruent,
}

fn draw_entry<S: RandomScalar, R: Rng + ?Sized>(proto: &S, rng: &mut R, draw: Draw) -> S {
    match draw {
        Draw::Any => proto.random_like(rng),
        Draw::Congruent => proto.random_p_multiple_like(rng),
    }
}

fn draw_unit<S: RandomScalar, R: Rng + ?Sized>(proto: &S, rng: &mut R, draw: Draw) -> S {
    match draw {
        Draw::Any => proto.random_unit_like(rng),
        Draw::Congruent => proto.one_like().add(&proto.random_p_multiple_like(rng)),
    }
}

fn random_gl_block<S: RandomScalar, R: Rng + ?Sized>(k: usize, proto: &S, rng: &mut R, draw: Draw) -> Matrix<S> {
    let diag: Vec<S> = (0..k).map(|_| draw_unit(proto, rng, draw)).collect();
    let mut g = Matrix::diagonal(&diag);
    if k > 1 {
        for _ in 0..2 * k * k {
            let i = rng.gen_range(0..k);
            let mut j = rng.gen_range(0..k - 1);
            if j >= i {
                j += 1;
            }
            g = g.mul(&transvection(k, i, j, &draw_entry(proto, rng, draw)));
        }
    }
    g
}

/// Antidiagonal matrix of ones.
fn flip<S: Scalar>(k: usize, proto: &S) -> Matrix<S> {
    let z = proto.zero_like();
    let o = proto.one_like();
    Matrix::from_fn(k, k, |i, j| if i + j == k - 1 { o.clone() } else { z.clone() })
}

fn embed_blocks<S: Scalar>(spec: &GroupSpec, proto: &S, blocks: &[(Vec<usize>, Matrix<S>)]) -> Matrix<S> {
    let mut g = Matrix::identity(spec.m, proto);
    for (idx, b) in blocks {
        for (a, &i) in idx.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                g.set(i, j, b.get(a, c).clone());
            }
        }
    }
    g
}

pub fn random_unipotent_plus<S: RandomScalar, R: Rng + ?Sized>(
    spec: &GroupSpec,
    proto: &S,
    rng: &mut R,
) -> Matrix<S> {
    random_unipotent(spec, proto, rng, true, Draw::Any)
}

pub fn random_unipotent_minus<S: RandomScalar, R: Rng + ?Sized>(
    spec: &GroupSpec,
    proto: &S,
    rng: &mut R,
) -> Matrix<S> {
    random_unipotent(spec, proto, rng, false, Draw::Any)
}

fn random_unipotent<S: RandomScalar, R: Rng + ?Sized>(
    spec: &GroupSpec,
    proto: &S,
    rng: &mut R,
    plus: bool,
    draw: Draw,
) -> Matrix<S> {
    let m = spec.m;
    let mut u = Matrix::identity(m, proto);
    match spec.kind {
        GroupKind::GL => {
            for i in 0..m {
                for j in 0..m {
                    let hit = if plus {
                        spec.mu[i] > spec.mu[j]
                    } else {
                        spec.mu[i] < spec.mu[j]
                    };
                    if hit {
                        u.set(i, j, draw_entry(proto, rng, draw));
                    }
                }
            }
        }
        GroupKind::GSp => {
            // off-diagonal block K S with S symmetric
            let g = m / 2;
            let mut s = Matrix::zeros(g, g, proto);
            for i in 0..g {
                for j in i..g {
                    let a = draw_entry(proto, rng, draw);
                    s.set(i, j, a.clone());
                    s.set(j, i, a);
                }
            }
            let b = flip(g, proto).mul(&s);
            for i in 0..g {
                for j in 0..g {
                    if plus {
                        u.set(i, g + j, b.get(i, j).clone());
                    } else {
                        u.set(g + i, j, b.get(i, j).clone());
                    }
                }
            }
        }
    }
    u
}

pub fn random_levi<S: RandomScalar, R: Rng + ?Sized>(spec: &GroupSpec, proto: &S, rng: &mut R) -> Matrix<S> {
    levi_with(spec, proto, rng, Draw::Any)
}

/// A random element of `G` congruent to the identity mod p.
pub fn random_congruence<S: RandomScalar, R: Rng + ?Sized>(spec: &GroupSpec, proto: &S, rng: &mut R) -> Matrix<S> {
    random_unipotent(spec, proto, rng, true, Draw::Congruent)
        .mul(&random_unipotent(spec, proto, rng, false, Draw::Congruent))
        .mul(&levi_with(spec, proto, rng, Draw::Congruent))
}

fn levi_with<S: RandomScalar, R: Rng + ?Sized>(spec: &GroupSpec, proto: &S, rng: &mut R, draw: Draw) -> Matrix<S> {
    match spec.kind {
        GroupKind::GL => {
            let blocks: Vec<(Vec<usize>, Matrix<S>)> = [spec.weight_one(), spec.weight_zero()]
                .into_iter()
                .filter(|idx| !idx.is_empty())
                .map(|idx| {
                    let b = random_gl_block(idx.len(), proto, rng, draw);
                    (idx, b)
                })
                .collect();
            embed_blocks(spec, proto, &blocks)
        }
        GroupKind::GSp => {
            let g = spec.m / 2;
            let a = random_gl_block(g, proto, rng, draw);
            let c = draw_unit(proto, rng, draw);
            let k = flip(g, proto);
            let a_inv = a.inverse().expect("block is invertible");
            let d = k.mul(&a_inv.transpose()).mul(&k).scale(&c);
            embed_blocks(
                spec,
                proto,
                &[(spec.weight_one(), a), (spec.weight_zero(), d)],
            )
        }
    }
}

pub fn random_pplus<S: RandomScalar, R: Rng + ?Sized>(spec: &GroupSpec, proto: &S, rng: &mut R) -> Matrix<S> {
    random_unipotent_plus(spec, proto, rng).mul(&random_levi(spec, proto, rng))
}

pub fn random_pminus<S: RandomScalar, R: Rng + ?Sized>(spec: &GroupSpec, proto: &S, rng: &mut R) -> Matrix<S> {
    random_unipotent_minus(spec, proto, rng).mul(&random_levi(spec, proto, rng))
}

/// A random Weyl-type element: a permutation matrix for GL, a product of
/// rotations `e_i -> -e_{m-1-i}, e_{m-1-i} -> e_i` on random pairs for GSp.
pub fn random_weyl<S: RandomScalar, R: Rng + ?Sized>(spec: &GroupSpec, proto: &S, rng: &mut R) -> Matrix<S> {
    let m = spec.m;
    let z = proto.zero_like();
    match spec.kind {
        GroupKind::GL => {
            let mut perm: Vec<usize> = (0..m).collect();
            perm.shuffle(rng);
            Matrix::from_fn(m, m, |i, j| if perm[j] == i { proto.one_like() } else { z.clone() })
        }
        GroupKind::GSp => {
            let mut w = Matrix::identity(m, proto);
            for i in 0..m / 2 {
                if rng.gen_bool(0.5) {
                    let j = m - 1 - i;
                    w.set(i, i, z.clone());
                    w.set(j, j, z.clone());
                    w.set(i, j, proto.one_like());
                    w.set(j, i, proto.int_like(-1));
                }
            }
            w
        }
    }
}

/// A random group element, spread over all Bruhat cells.
pub fn random_element<S: RandomScalar, R: Rng + ?Sized>(spec: &GroupSpec, proto: &S, rng: &mut R) -> GroupElem<S> {
    let g = random_pplus(spec, proto, rng)
        .mul(&random_weyl(spec, proto, rng))
        .mul(&random_pminus(spec, proto, rng));
    GroupElem::from_trusted(spec, g)
}

// ---------------------------------------------------------------------------
// The zip group

/// An element `(u+ m, u- sigma(m))` of `E_mu`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZipGroupElem<S> {
    pub u_plus: Matrix<S>,
    pub levi: Matrix<S>,
    pub u_minus: Matrix<S>,
}

pub fn emu_make<S: Scalar>(
    spec: &GroupSpec,
    u_plus: Matrix<S>,
    levi: Matrix<S>,
    u_minus: Matrix<S>,
) -> Result<ZipGroupElem<S>, GroupError> {
    for (g, which) in [
        (&u_plus, Subgroup::UPlus),
        (&levi, Subgroup::Levi),
        (&u_minus, Subgroup::UMinusSigma),
    ] {
        if !is_member(spec, g)? {
            return Err(GroupError::NotMember(spec.to_string()));
        }
        if !subgroup_member(spec, g, which) {
            return Err(GroupError::SubgroupViolation(which));
        }
    }
    Ok(ZipGroupElem {
        u_plus,
        levi,
        u_minus,
    })
}

impl<S: Scalar> ZipGroupElem<S> {
    pub fn identity(spec: &GroupSpec, proto: &S) -> Self {
        let i = Matrix::identity(spec.m, proto);
        ZipGroupElem {
            u_plus: i.clone(),
            levi: i.clone(),
            u_minus: i,
        }
    }

    pub fn p_plus(&self) -> Matrix<S> {
        self.u_plus.mul(&self.levi)
    }

    pub fn p_minus(&self) -> Matrix<S> {
        self.u_minus.mul(&self.levi.frobenius())
    }

    /// The element `e` with `g . e = (g . self) . rhs`.
    pub fn compose(&self, spec: &GroupSpec, rhs: &Self) -> Self {
        let p_plus = self.p_plus().mul(&rhs.p_plus());
        let p_minus = self.p_minus().mul(&rhs.p_minus());
        let levi = levi_part(spec, &p_plus);
        let u_plus = p_plus.mul(&levi.inverse().expect("Levi part is invertible"));
        let u_minus = p_minus.mul(&levi.frobenius().inverse().expect("Levi part is invertible"));
        ZipGroupElem {
            u_plus,
            levi,
            u_minus,
        }
    }
}

pub fn random_emu<S: RandomScalar, R: Rng + ?Sized>(spec: &GroupSpec, proto: &S, rng: &mut R) -> ZipGroupElem<S> {
    ZipGroupElem {
        u_plus: random_unipotent_plus(spec, proto, rng),
        levi: random_levi(spec, proto, rng),
        u_minus: random_unipotent_minus(spec, proto, rng),
    }
}

/// `g . (p+, p-) = p+^{-1} g p-`.
pub fn emu_act<S: Scalar>(g: &Matrix<S>, e: &ZipGroupElem<S>) -> Matrix<S> {
    let p_plus_inv = e.p_plus().inverse().expect("P+ elements are invertible");
    p_plus_inv.mul(g).mul(&e.p_minus())
}

// ---------------------------------------------------------------------------
// Cosets of U_-^sigma

/// The right coset `rep * U_-^sigma`.
#[derive(Clone, Debug)]
pub struct ZipCoset<S> {
    spec: GroupSpec,
    rep: Matrix<S>,
}

impl<S: Scalar> ZipCoset<S> {
    pub fn new(spec: &GroupSpec, rep: Matrix<S>) -> Self {
        ZipCoset {
            spec: spec.clone(),
            rep,
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn rep(&self) -> &Matrix<S> {
        &self.rep
    }

    /// Best-effort normal form. Right multiplication by `U_-` adds
    /// combinations of weight-0 columns to weight-1 columns, so over a field
    /// the weight-1 columns are reduced against the weight-0 columns at the
    /// first rows where those are independent. For GSp the reduced matrix is kept only if it stays in the
    /// group.
    pub fn canonical(&self) -> Self {
        let fixed = self.spec.weight_zero();
        let reducible = self.spec.weight_one();
        if fixed.is_empty() || reducible.is_empty() {
            return self.clone();
        }
        let a = self.rep.select_cols(&fixed);
        let pivot = crate::matrix::subsets(self.spec.m, fixed.len())
            .into_iter()
            .find_map(|rows| {
                a.select_rows(&rows)
                    .inverse()
                    .map(|inv| (rows, inv))
            });
        let Some((rows, a_p_inv)) = pivot else {
            return self.clone();
        };
        let mut out = self.rep.clone();
        for &j in &reducible {
            let c = self.rep.col(j);
            let coeff = a_p_inv.mul(&c.select_rows(&rows));
            let reduced = c.sub(&a.mul(&coeff));
            for i in 0..self.spec.m {
                out.set(i, j, reduced.get(i, 0).clone());
            }
        }
        if self.spec.kind == GroupKind::GSp && similitude(&self.spec, &out).is_none() {
            return self.clone();
        }
        ZipCoset::new(&self.spec, out)
    }

    /// `g1 U = g2 U` iff `g1^{-1} g2` lies in `U_-^sigma`.
    pub fn coset_equal(&self, other: &Self) -> bool {
        if self.spec != other.spec {
            return false;
        }
        match self.rep.inverse() {
            Some(inv) => subgroup_member(&self.spec, &inv.mul(&other.rep), Subgroup::UMinusSigma),
            None => false,
        }
    }

    /// `gU . p+ = p+^{-1} g sigma(m) U` for `p+ = u+ m`.
    pub fn act_pplus(&self, p_plus: &Matrix<S>) -> Result<Self, GroupError> {
        if !subgroup_member(&self.spec, p_plus, Subgroup::PPlus) {
            return Err(GroupError::SubgroupViolation(Subgroup::PPlus));
        }
        let inv = p_plus
            .inverse()
            .ok_or_else(|| GroupError::NotMember(self.spec.to_string()))?;
        let m = levi_part(&self.spec, p_plus);
        Ok(ZipCoset::new(
            &self.spec,
            inv.mul(&self.rep).mul(&m.frobenius()),
        ))
    }
}

pub fn coset_equal<S: Scalar>(a: &ZipCoset<S>, b: &ZipCoset<S>) -> bool {
    a.coset_equal(b)
}

pub fn coset_act_pplus<S: Scalar>(c: &ZipCoset<S>, p_plus: &Matrix<S>) -> Result<ZipCoset<S>, GroupError> {
    c.act_pplus(p_plus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witt::{ring_make, PolyElem, PolyFrame, RingElem};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gl2() -> GroupSpec {
        group_make(GroupKind::GL, 2, &[1, 0]).unwrap()
    }

    fn gsp4() -> GroupSpec {
        group_make(GroupKind::GSp, 4, &[1, 1, 0, 0]).unwrap()
    }

    fn ints(ring: &crate::witt::Ring, prec: u32, rows: &[Vec<i64>]) -> Matrix<RingElem> {
        Matrix::from_ints(rows, &RingElem::one(ring, prec))
    }

    #[test]
    fn make_and_parse() {
        assert!(group_make(GroupKind::GSp, 4, &[1, 1, 0, 0]).is_ok());
        assert!(matches!(
            group_make(GroupKind::GSp, 4, &[1, 0, 1, 0]),
            Err(GroupError::InvalidWeights(_))
        ));
        assert!(matches!(
            group_make(GroupKind::GSp, 3, &[1, 0, 0]),
            Err(GroupError::OddSizeGSp(3))
        ));
        assert!(group_make(GroupKind::GL, 2, &[2, 0]).is_err());
        assert_eq!(GroupSpec::parse("GL:2:10").unwrap(), gl2());
        assert_eq!(GroupSpec::parse("gsp:4:1100").unwrap(), gsp4());
        assert!(GroupSpec::parse("GL:2").is_err());
        let json = serde_json::to_string(&gsp4()).unwrap();
        assert_eq!(json, r#"{"kind":"GSp","m":4,"mu":[1,1,0,0]}"#);
        assert_eq!(serde_json::from_str::<GroupSpec>(&json).unwrap(), gsp4());
        assert!(serde_json::from_str::<GroupSpec>(r#"{"kind":"GSp","m":4,"mu":[1,0,1,0]}"#).is_err());
    }

    #[test]
    fn membership_examples() {
        let ring = ring_make(3, 1, 2).unwrap();
        let spec = gl2();
        assert!(is_member(&spec, &ints(&ring, 2, &[vec![1, 0], vec![0, 1]])).unwrap());
        assert!(!is_member(&spec, &ints(&ring, 2, &[vec![3, 0], vec![0, 1]])).unwrap());
        assert!(is_member(&spec, &ints(&ring, 2, &[vec![1]])).is_err());

        let field = ring_make(3, 1, 2).unwrap();
        let sp = gsp4();
        let one = RingElem::one(&field, 1);
        let u = RingElem::from_int(&field, 2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let g = cochar_at(&sp, &u).mul(&random_unipotent_plus(&sp, &one, &mut rng));
            assert!(is_member(&sp, &g).unwrap());
            assert_eq!(similitude(&sp, &g).unwrap(), u);
        }
        // a generic upper-unipotent matrix is not symplectic
        let bad = Matrix::from_ints(
            &[vec![1, 0, 1, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]],
            &one,
        );
        assert!(!is_member(&sp, &bad).unwrap());
    }

    #[test]
    fn block_patterns() {
        let ring = ring_make(2, 1, 2).unwrap();
        let spec = gl2();
        let up = ints(&ring, 1, &[vec![1, 1], vec![0, 1]]);
        let low = ints(&ring, 1, &[vec![1, 0], vec![1, 1]]);
        assert!(subgroup_member(&spec, &up, Subgroup::UPlus));
        assert!(!subgroup_member(&spec, &up, Subgroup::UMinus));
        assert!(subgroup_member(&spec, &low, Subgroup::UMinus));
        assert!(subgroup_member(&spec, &low, Subgroup::UMinusSigma));
        let gl3 = group_make(GroupKind::GL, 3, &[1, 1, 0]).unwrap();
        let ring3 = ring_make(3, 1, 2).unwrap();
        let m = ints(&ring3, 1, &[vec![1, 2, 0], vec![1, 1, 0], vec![0, 0, 2]]);
        assert!(subgroup_member(&gl3, &m, Subgroup::Levi));
        assert!(subgroup_member(&gl3, &m, Subgroup::PPlus));
        assert!(!subgroup_member(&gl3, &m, Subgroup::UPlus));
    }

    #[test]
    fn cocharacter_values() {
        let ring = ring_make(3, 1, 2).unwrap();
        let one = RingElem::one(&ring, 2);
        assert_eq!(cochar_at_p(&gl2(), &one), ints(&ring, 2, &[vec![3, 0], vec![0, 1]]));
        assert!(cochar_at(&gl2(), &one).is_identity());
        let u = RingElem::from_int(&ring, 4, 2);
        assert_eq!(similitude(&gsp4(), &cochar_at(&gsp4(), &u)).unwrap(), u);
    }

    #[test]
    fn mu_p_conjugation_examples() {
        let ring = ring_make(3, 1, 2).unwrap();
        let spec = gl2();
        let h = ints(&ring, 2, &[vec![1, 1], vec![0, 1]]);
        let c = mu_p_conjugate(&spec, &h).unwrap();
        assert!(c.integral && c.congruent_to_one);
        let got = c.matrix.unwrap();
        assert_eq!(got.precision(), 1);
        assert_eq!(got, ints(&ring, 2, &[vec![1, 3], vec![0, 1]]).truncate(1));

        let ring3 = ring_make(3, 1, 3).unwrap();
        let c3 = mu_p_conjugate(&spec, &ints(&ring3, 3, &[vec![1, 1], vec![0, 1]])).unwrap();
        assert_eq!(c3.matrix.unwrap(), ints(&ring3, 2, &[vec![1, 3], vec![0, 1]]));

        let low = mu_p_conjugate(&spec, &ints(&ring, 2, &[vec![1, 0], vec![1, 1]])).unwrap();
        assert!(!low.integral && low.matrix.is_none());

        let id = mu_p_conjugate(&spec, &ints(&ring, 2, &[vec![1, 0], vec![0, 1]])).unwrap();
        assert!(id.integral && id.congruent_to_one && id.matrix.unwrap().is_identity());

        // lower-left divisible by p: integral, but a Levi entry keeps it away from 1
        let h = ints(&ring, 2, &[vec![2, 0], vec![3, 1]]);
        let c = mu_p_conjugate(&spec, &h).unwrap();
        assert!(c.integral && !c.congruent_to_one);
        assert_eq!(c.matrix.unwrap(), ints(&ring, 1, &[vec![2, 0], vec![1, 1]]));

        assert!(matches!(
            mu_p_conjugate(&spec, &h.truncate(1)),
            Err(GroupError::Witt(WittError::PrecisionExhausted))
        ));
    }

    #[test]
    fn sigma_on_points() {
        let ring = ring_make(2, 2, 2).unwrap();
        let spec = gl2();
        let x = RingElem::generator(&ring, 2);
        let one = x.one_like();
        let z = x.zero_like();
        let g = GroupElem::new(&spec, Matrix::from_rows(vec![vec![one.clone(), x.clone()], vec![z.clone(), one.clone()]])).unwrap();
        let s = sigma_elem(&g);
        assert_eq!(s.matrix().get(0, 1), &RingElem::from_coeffs(&ring, &[3, 3], 2));
        assert_eq!(sigma_elem(&GroupElem::identity(&spec, &one)), GroupElem::identity(&spec, &one));
        let fp = ring_make(5, 1, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_element(&spec, &RingElem::one(&fp, 2), &mut rng);
        assert_eq!(sigma_elem(&h), h);
    }

    #[test]
    fn emu_orbit_of_identity_in_gl2_f2() {
        let ring = ring_make(2, 1, 2).unwrap();
        let spec = gl2();
        let one = RingElem::one(&ring, 1);
        let id = Matrix::identity(2, &one);
        assert!(emu_act(&id, &ZipGroupElem::identity(&spec, &one)).is_identity());
        let mut orbit = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                let e = emu_make(
                    &spec,
                    Matrix::from_ints(&[vec![1, a], vec![0, 1]], &one),
                    id.clone(),
                    Matrix::from_ints(&[vec![1, 0], vec![b, 1]], &one),
                )
                .unwrap();
                let g = emu_act(&id, &e);
                if !orbit.contains(&g) {
                    orbit.push(g);
                }
            }
        }
        let expected = [
            vec![vec![1, 0], vec![0, 1]],
            vec![vec![1, 1], vec![0, 1]],
            vec![vec![1, 0], vec![1, 1]],
            vec![vec![0, 1], vec![1, 1]],
        ];
        assert_eq!(orbit.len(), 4);
        for e in expected {
            assert!(orbit.contains(&Matrix::from_ints(&e, &one)));
        }
        assert!(matches!(
            emu_make(&spec, Matrix::from_ints(&[vec![1, 0], vec![1, 1]], &one), id.clone(), id.clone()),
            Err(GroupError::SubgroupViolation(Subgroup::UPlus))
        ));
    }

    #[test]
    fn emu_is_a_right_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (spec, p, f) in [(gl2(), 3, 2), (gsp4(), 3, 1), (group_make(GroupKind::GL, 3, &[1, 0, 1]).unwrap(), 2, 2)] {
            let ring = ring_make(p, f, 2).unwrap();
            let one = RingElem::one(&ring, 2);
            for _ in 0..30 {
                let g = random_element(&spec, &one, &mut rng);
                let e1 = random_emu(&spec, &one, &mut rng);
                let e2 = random_emu(&spec, &one, &mut rng);
                let lhs = emu_act(&emu_act(g.matrix(), &e1), &e2);
                let rhs = emu_act(g.matrix(), &e1.compose(&spec, &e2));
                assert_eq!(lhs, rhs);
                assert!(is_member(&spec, &rhs).unwrap());
            }
        }
    }

    #[test]
    fn coset_examples() {
        let ring = ring_make(2, 1, 2).unwrap();
        let spec = gl2();
        let one = RingElem::one(&ring, 1);
        let id = ZipCoset::new(&spec, Matrix::identity(2, &one));
        let w = ZipCoset::new(&spec, Matrix::from_ints(&[vec![0, 1], vec![1, 0]], &one));
        assert!(id.coset_equal(&id));
        assert!(!id.coset_equal(&w));
        assert!(!w.coset_equal(&id));
        let u = Matrix::from_ints(&[vec![1, 0], vec![1, 1]], &one);
        let wu = ZipCoset::new(&spec, w.rep().mul(&u));
        assert!(w.coset_equal(&wu));
        assert_eq!(wu.canonical().rep(), w.canonical().rep());
        assert!(id.act_pplus(&Matrix::identity(2, &one)).unwrap().coset_equal(&id));
        assert!(id.act_pplus(&u).is_err());
    }

    #[test]
    fn levi_action_on_identity_coset() {
        let ring = ring_make(2, 2, 2).unwrap();
        let spec = gl2();
        let x = RingElem::generator(&ring, 1);
        let one = x.one_like();
        let m = Matrix::diagonal(&[x.clone(), one.clone()]);
        let id = ZipCoset::new(&spec, Matrix::identity(2, &one));
        let got = id.act_pplus(&m).unwrap();
        let expected = m.inverse().unwrap().mul(&m.frobenius());
        assert_eq!(got.rep(), &expected);
        assert!(!got.rep().is_identity());
    }

    #[test]
    fn coset_action_descends() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (spec, p, f) in [(gl2(), 2, 2), (gsp4(), 3, 1), (group_make(GroupKind::GL, 3, &[0, 1, 1]).unwrap(), 3, 1)] {
            let ring = ring_make(p, f, 2).unwrap();
            let one = RingElem::one(&ring, 1);
            for _ in 0..30 {
                let g = random_element(&spec, &one, &mut rng).into_matrix();
                let u = random_unipotent_minus(&spec, &one, &mut rng);
                let pp = random_pplus(&spec, &one, &mut rng);
                let a = ZipCoset::new(&spec, g.clone());
                let b = ZipCoset::new(&spec, g.mul(&u));
                assert!(a.coset_equal(&b));
                assert!(a.canonical().coset_equal(&a));
                assert_eq!(a.canonical().rep(), b.canonical().rep());
                assert!(a.act_pplus(&pp).unwrap().coset_equal(&b.act_pplus(&pp).unwrap()));
            }
        }
    }

    #[test]
    fn symplectic_fixup_stays_in_coset() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let sp = group_make(GroupKind::GSp, 6, &[1, 1, 1, 0, 0, 0]).unwrap();
        let gl = group_make(GroupKind::GL, 6, &[1, 1, 1, 0, 0, 0]).unwrap();
        for p in [2, 3] {
            let ring = ring_make(p, 2, 2).unwrap();
            let one = RingElem::one(&ring, 2);
            for _ in 0..20 {
                let g = random_element(&sp, &one, &mut rng).into_matrix();
                let um = random_unipotent_minus(&gl, &one, &mut rng);
                let up = random_unipotent_plus(&gl, &one, &mut rng);
                let moved = symplectic_fixup(&sp, &g.mul(&um), Adjust::WeightOne).unwrap();
                assert!(subgroup_member(&gl, &g.inverse().unwrap().mul(&moved), Subgroup::UMinus));
                let moved = symplectic_fixup(&sp, &g.mul(&up), Adjust::WeightZero).unwrap();
                assert!(subgroup_member(&gl, &g.inverse().unwrap().mul(&moved), Subgroup::UPlus));
            }
        }
        // a general GL element has no symplectic point in its coset
        let ring = ring_make(3, 1, 2).unwrap();
        let one = RingElem::one(&ring, 1);
        let sp4 = gsp4();
        let g = Matrix::from_ints(&[vec![1, 0, 0, 0], vec![0, 2, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]], &one);
        assert!(symplectic_fixup(&sp4, &g, Adjust::WeightOne).is_none());
    }

    #[test]
    fn congruence_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for spec in [gl2(), gsp4()] {
            let ring = ring_make(3, 2, 3).unwrap();
            let one = RingElem::one(&ring, 3);
            for _ in 0..20 {
                let h = random_congruence(&spec, &one, &mut rng);
                assert!(is_member(&spec, &h).unwrap());
                assert!(h.reduce_mod_p().is_identity());
            }
        }
    }

    #[test]
    fn levi_commutes_with_cocharacter() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for spec in [gl2(), gsp4(), group_make(GroupKind::GL, 3, &[1, 0, 1]).unwrap()] {
            let ring = ring_make(5, 1, 3).unwrap();
            let one = RingElem::one(&ring, 3);
            for _ in 0..20 {
                let m = random_levi(&spec, &one, &mut rng);
                let t = cochar_at(&spec, &one.random_unit_like(&mut rng));
                assert_eq!(m.mul(&t), t.mul(&m));
                let tp = cochar_at_p(&spec, &one);
                assert_eq!(m.mul(&tp), tp.mul(&m));
            }
        }
    }

    #[test]
    fn random_elements_over_polynomial_frames() {
        let ring = ring_make(3, 1, 2).unwrap();
        let frame = PolyFrame::standard(&ring);
        let one = PolyElem::t(&frame, 2).one_like();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for spec in [gl2(), gsp4()] {
            let u = random_unipotent_plus(&spec, &one, &mut rng);
            assert!(is_member(&spec, &u).unwrap());
            assert!(subgroup_member(&spec, &u, Subgroup::UPlus));
            let m = random_levi(&spec, &one, &mut rng);
            assert!(is_member(&spec, &m).unwrap());
        }
    }
}
