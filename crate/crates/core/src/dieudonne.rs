//! Dieudonné modules at finite precision.
//!
//! A module is free of rank `m` with matrices `F` and `V` in the standard
//! basis. The standard basis of `M^sigma` is identified with that of `M`, so
//! applying `sigma` to a map is entrywise Frobenius of its matrix. `F` sends
//! `e_j` to column `j`. The Hodge filtration `M^1` is given by a spanning
//! `m x d` matrix whose columns extend to a basis.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{
    cochar_at_p, cochar_complement_at_p, random_element, GroupElem, GroupError, GroupSpec,
};
use crate::json::{matrix_from_json, matrix_to_json, MatrixJson};
use crate::matrix::{subsets, Matrix};
use crate::scalar::Scalar;
use crate::witt::{Frame, PolyElem, Ring, RingDescriptor, RingElem, RingJson, WittError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DieudonneError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("the Hodge filtration is not a direct summand")]
    NotADirectSummand,
    #[error("unsupported shape for this fixture: {0}")]
    UnsupportedShape(String),
    #[error("F and V mod p do not form an exact sequence: {0}")]
    ExactnessFailure(String),
    #[error("invalid module: {0}")]
    Invalid(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Witt(#[from] WittError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DieudonneModule<S> {
    spec: GroupSpec,
    f: Matrix<S>,
    v: Matrix<S>,
    hodge: Matrix<S>,
}

impl<S: Scalar> DieudonneModule<S> {
    /// Checks shapes only; see [`dm_validate`] for the module axioms.
    pub fn new(spec: &GroupSpec, f: Matrix<S>, v: Matrix<S>, hodge: Matrix<S>) -> Result<Self, DieudonneError> {
        let m = spec.m();
        let d = spec.d();
        for (name, a, cols) in [("F", &f, m), ("V", &v, m), ("hodge", &hodge, d)] {
            if a.rows() != m || a.cols() != cols {
                return Err(DieudonneError::Shape(format!(
                    "{name} is {}x{}, expected {m}x{cols}",
                    a.rows(),
                    a.cols()
                )));
            }
        }
        Ok(DieudonneModule {
            spec: spec.clone(),
            f,
            v,
            hodge,
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn f(&self) -> &Matrix<S> {
        &self.f
    }

    pub fn v(&self) -> &Matrix<S> {
        &self.v
    }

    pub fn hodge(&self) -> &Matrix<S> {
        &self.hodge
    }

    pub fn rank(&self) -> usize {
        self.spec.m()
    }

    pub fn precision(&self) -> u32 {
        self.f.precision().min(self.v.precision()).min(self.hodge.precision())
    }

    pub fn proto(&self) -> &S {
        self.f.proto()
    }

    pub fn with_hodge(&self, hodge: Matrix<S>) -> Result<Self, DieudonneError> {
        Self::new(&self.spec, self.f.clone(), self.v.clone(), hodge)
    }

    pub fn truncate(&self, prec: u32) -> Self {
        DieudonneModule {
            spec: self.spec.clone(),
            f: self.f.truncate(prec),
            v: self.v.truncate(prec),
            hodge: self.hodge.truncate(prec),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&'static str> {
        self.checks.iter().find(|c| !c.passed).map(|c| c.name)
    }
}

pub const CHECK_FV: &str = "F V = p I";
pub const CHECK_VF: &str = "V F = p I";
pub const CHECK_HODGE_KILLED: &str = "F mod p kills sigma(M^1)";
pub const CHECK_F_RANK: &str = "rank of F mod p is m - d";
pub const CHECK_SUMMAND: &str = "M^1 is a direct summand";
pub const CHECK_EXACT: &str = "Im F = Ker V and Im V = Ker F mod p";

/// Checks the module axioms and returns every result, in a fixed order.
pub fn dm_validate<S: Scalar>(dm: &DieudonneModule<S>) -> ValidationReport {
    let m = dm.rank();
    let d = dm.spec.d();
    let proto = dm.proto();
    let p_id = Matrix::identity(m, proto).times_p();
    let fv = dm.f.mul(&dm.v);
    let vf = dm.v.mul(&dm.f);
    let fbar = dm.f.reduce_mod_p();
    let vbar = dm.v.reduce_mod_p();
    let hbar = dm.hodge.reduce_mod_p();
    let rank_f = fbar.rank();
    let rank_v = vbar.rank();
    let checks = vec![
        Check {
            name: CHECK_FV,
            passed: fv.congruent(&p_id),
        },
        Check {
            name: CHECK_VF,
            passed: vf.congruent(&p_id),
        },
        Check {
            name: CHECK_HODGE_KILLED,
            passed: fbar.mul(&hbar.frobenius()).is_zero(),
        },
        Check {
            name: CHECK_F_RANK,
            passed: rank_f == m - d,
        },
        Check {
            name: CHECK_SUMMAND,
            passed: standard_completion(&dm.spec, &dm.hodge).is_some(),
        },
        Check {
            name: CHECK_EXACT,
            passed: rank_f + rank_v == m,
        },
    ];
    ValidationReport { checks }
}

/// Standard basis vectors completing `hodge` to a basis, preferring the
/// weight-0 coordinates. Returns the chosen coordinates.
pub fn standard_completion<S: Scalar>(spec: &GroupSpec, hodge: &Matrix<S>) -> Option<Vec<usize>> {
    let m = spec.m();
    let k = m - hodge.cols();
    let preferred = spec.weight_zero();
    let candidates = std::iter::once(preferred.clone())
        .filter(|c| c.len() == k)
        .chain(subsets(m, k).into_iter().filter(|c| *c != preferred));
    for cols in candidates {
        let basis = hodge.hstack(&unit_columns(m, &cols, hodge.proto()));
        if basis.det().is_unit() {
            return Some(cols);
        }
    }
    None
}

/// The `m x k` matrix of standard basis vectors `e_c`, `c` in `cols`.
pub fn unit_columns<S: Scalar>(m: usize, cols: &[usize], proto: &S) -> Matrix<S> {
    let o = proto.one_like();
    let z = proto.zero_like();
    Matrix::from_fn(m, cols.len(), |i, j| if cols[j] == i { o.clone() } else { z.clone() })
}

/// The module with `F = g mu(p)`, `V = p mu(p)^{-1} g^{-1}` and the standard
/// weight-1 coordinates as Hodge filtration.
pub fn dm_from_group_element<S: Scalar>(g: &GroupElem<S>) -> Result<DieudonneModule<S>, DieudonneError> {
    let spec = g.spec();
    let proto = g.matrix().proto();
    if g.matrix().precision() < 2 {
        return Err(WittError::PrecisionExhausted.into());
    }
    let f = g.matrix().mul(&cochar_at_p(spec, proto));
    let v = cochar_complement_at_p(spec, proto).mul(g.inverse().matrix());
    let hodge = unit_columns(spec.m(), &spec.weight_one(), proto);
    DieudonneModule::new(spec, f, v, hodge)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StandardKind {
    Ordinary,
    Supersingular,
}

/// Pairs `(a, b)` of a weight-1 and a weight-0 coordinate used by the
/// supersingular fixture.
fn supersingular_pairs(spec: &GroupSpec) -> Result<Vec<(usize, usize)>, DieudonneError> {
    let ones = spec.weight_one();
    let zeros = spec.weight_zero();
    if ones.len() != zeros.len() {
        return Err(DieudonneError::UnsupportedShape(format!(
            "supersingular fixture needs as many weight-1 as weight-0 coordinates in {spec}"
        )));
    }
    Ok(match spec.kind() {
        crate::group::GroupKind::GL => ones.into_iter().zip(zeros).collect(),
        crate::group::GroupKind::GSp => ones.into_iter().map(|a| (a, spec.partner(a))).collect(),
    })
}

/// Ordinary: `F = mu(p)`. Supersingular: on every pair `(a, b)`,
/// `F e_a = e_b`, `F e_b = p e_a`, the same for `V`, and `M^1` spanned by the
/// weight-0 coordinates.
pub fn dm_standard<S: Scalar>(
    kind: StandardKind,
    spec: &GroupSpec,
    proto: &S,
) -> Result<DieudonneModule<S>, DieudonneError> {
    match kind {
        StandardKind::Ordinary => dm_from_group_element(&GroupElem::identity(spec, proto)),
        StandardKind::Supersingular => {
            let pairs = supersingular_pairs(spec)?;
            if proto.precision() < 2 {
                return Err(WittError::PrecisionExhausted.into());
            }
            let m = spec.m();
            let mut f = Matrix::zeros(m, m, proto);
            let p = proto.int_like(proto.prime() as i64);
            for &(a, b) in &pairs {
                f.set(b, a, proto.one_like());
                f.set(a, b, p.clone());
            }
            let hodge = unit_columns(m, &spec.weight_zero(), proto);
            DieudonneModule::new(spec, f.clone(), f, hodge)
        }
    }
}

/// The same module in the basis `a e_1, ..., a e_m`:
/// `F' = a F sigma(a)^{-1}`, `V' = sigma(a) V a^{-1}`, `M^1' = a M^1`.
pub fn dm_change_basis<S: Scalar>(dm: &DieudonneModule<S>, a: &GroupElem<S>) -> DieudonneModule<S> {
    let a_mat = a.matrix();
    let a_inv = a.inverse();
    let sa = a.frobenius();
    let sa_inv = sa.inverse();
    DieudonneModule {
        spec: dm.spec.clone(),
        f: a_mat.mul(&dm.f).mul(sa_inv.matrix()),
        v: sa.matrix().mul(&dm.v).mul(a_inv.matrix()),
        hodge: a_mat.mul(&dm.hodge),
    }
}

/// A seeded random module: the module of a random group element, written in
/// a random basis adapted to the group.
pub fn dm_random(spec: &GroupSpec, ring: &Ring, seed: u64) -> DieudonneModule<RingElem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let one = RingElem::one(ring, ring.n());
    let g = random_element(spec, &one, &mut rng);
    let a = random_element(spec, &one, &mut rng);
    let dm = dm_from_group_element(&g).expect("full precision is at least 2");
    dm_change_basis(&dm, &a)
}

/// The constant family over a polynomial frame.
pub fn dm_base_change(dm: &DieudonneModule<RingElem>, frame: &Frame) -> DieudonneModule<PolyElem> {
    let lift = |m: &Matrix<RingElem>| m.map(|a| PolyElem::constant(frame, a));
    DieudonneModule {
        spec: dm.spec.clone(),
        f: lift(&dm.f),
        v: lift(&dm.v),
        hodge: lift(&dm.hodge),
    }
}

// ---------------------------------------------------------------------------

/// A complement `M^0` of the Hodge filtration, `M = M^1 ⊕ M^0`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalDecomposition<S> {
    pub hodge: Matrix<S>,
    pub complement: Matrix<S>,
}

impl<S: Scalar> NormalDecomposition<S> {
    /// `[hodge | complement]`.
    pub fn basis(&self) -> Matrix<S> {
        self.hodge.hstack(&self.complement)
    }
}

pub enum NdSource<'a, S> {
    StandardComplement,
    /// The decomposition induced by a trivialization: `M^1` and `M^0` are
    /// spanned by the weight-1 and weight-0 columns of `beta`.
    FromBeta(&'a Matrix<S>),
}

pub fn normal_decomposition<S: Scalar>(
    dm: &DieudonneModule<S>,
    source: NdSource<'_, S>,
) -> Result<NormalDecomposition<S>, DieudonneError> {
    let spec = &dm.spec;
    match source {
        NdSource::StandardComplement => {
            let cols = standard_completion(spec, &dm.hodge).ok_or(DieudonneError::NotADirectSummand)?;
            Ok(NormalDecomposition {
                hodge: dm.hodge.clone(),
                complement: unit_columns(spec.m(), &cols, dm.proto()),
            })
        }
        NdSource::FromBeta(beta) => {
            if beta.rows() != spec.m() || beta.cols() != spec.m() {
                return Err(DieudonneError::Shape("beta must be m x m".into()));
            }
            let inv = beta.inverse().ok_or(DieudonneError::NotADirectSummand)?;
            let coords = inv.mul(&dm.hodge);
            if !coords.select_rows(&spec.weight_zero()).is_zero() {
                return Err(DieudonneError::Invalid(
                    "beta does not carry the weight-1 coordinates onto M^1".into(),
                ));
            }
            Ok(NormalDecomposition {
                hodge: beta.select_cols(&spec.weight_one()),
                complement: beta.select_cols(&spec.weight_zero()),
            })
        }
    }
}

/// `F = Gamma o f` for a normal decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaFactorization<S> {
    /// `Gamma` in the standard basis, one level of precision below `F`.
    pub gamma: Matrix<S>,
    /// `f` in the basis `sigma([hodge | complement])`: `p` on the Hodge part.
    pub f_diag: Matrix<S>,
    /// `sigma([hodge | complement])`.
    pub sigma_basis: Matrix<S>,
}

impl<S: Scalar> GammaFactorization<S> {
    /// `f` in the standard basis.
    pub fn f_standard(&self) -> Matrix<S> {
        let inv = self
            .sigma_basis
            .inverse()
            .expect("a normal decomposition is a basis");
        self.sigma_basis.mul(&self.f_diag).mul(&inv)
    }

    /// `Gamma f = F` at the precision of `Gamma`.
    pub fn reconstructs(&self, f: &Matrix<S>) -> bool {
        self.gamma.mul(&self.f_standard()).congruent(f)
    }
}

/// `Gamma = (1/p) F` on `M^{1,sigma}` and `F` on `M^{0,sigma}`.
pub fn gamma_factorization<S: Scalar>(
    dm: &DieudonneModule<S>,
    nd: &NormalDecomposition<S>,
) -> Result<GammaFactorization<S>, DieudonneError> {
    let prec = dm.precision();
    if prec < 2 {
        return Err(WittError::PrecisionExhausted.into());
    }
    let d = nd.hodge.cols();
    let m = dm.rank();
    let sb = nd.basis().frobenius();
    let image = dm.f.mul(&sb);
    let proto = dm.proto();
    let mut divided = Matrix::zeros(m, m, &proto.truncate(prec - 1));
    for j in 0..m {
        for i in 0..m {
            let a = image.get(i, j);
            let e = if j < d {
                a.truncate(prec).div_p_exact()?
            } else {
                a.truncate(prec - 1)
            };
            divided.set(i, j, e);
        }
    }
    let sb_inv = sb.inverse().ok_or(DieudonneError::NotADirectSummand)?;
    let gamma = divided.mul(&sb_inv.truncate(prec - 1));
    let p = proto.int_like(proto.prime() as i64);
    let diag: Vec<S> = (0..m).map(|j| if j < d { p.clone() } else { proto.one_like() }).collect();
    Ok(GammaFactorization {
        gamma,
        f_diag: Matrix::diagonal(&diag),
        sigma_basis: sb,
    })
}

// ---------------------------------------------------------------------------

/// The mod-p data of a module whose residue ring is a field: `F̄`, `V̄`, the
/// Hodge filtration `M̄^1`, the conjugate filtration `M̄_0 = Im F̄ = Ker V̄`
/// and the zip isomorphism `delta = [V̄]^{-1} ⊕ F̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct FZip<S> {
    pub fbar: Matrix<S>,
    pub vbar: Matrix<S>,
    /// Basis of `M̄^1`.
    pub hodge: Matrix<S>,
    /// Basis of `M̄_0`.
    pub conjugate: Matrix<S>,
}

pub fn fzip_of<S: Scalar>(dm: &DieudonneModule<S>) -> Result<FZip<S>, DieudonneError> {
    let m = dm.rank();
    let d = dm.spec.d();
    let fbar = dm.f.reduce_mod_p();
    let vbar = dm.v.reduce_mod_p();
    let hodge = dm.hodge.reduce_mod_p();
    if !vbar.mul(&fbar).is_zero() || !fbar.mul(&vbar).is_zero() {
        return Err(DieudonneError::ExactnessFailure("F̄ V̄ or V̄ F̄ is nonzero".into()));
    }
    let (_, pivots) = fbar.rref();
    let rank_v = vbar.rank_field();
    if pivots.len() + rank_v != m {
        return Err(DieudonneError::ExactnessFailure(format!(
            "rank F̄ + rank V̄ = {} + {rank_v} != {m}",
            pivots.len()
        )));
    }
    if pivots.len() != m - d || !fbar.mul(&hodge.frobenius()).is_zero() {
        return Err(DieudonneError::Invalid("σ(M̄^1) is not the kernel of F̄".into()));
    }
    let conjugate = fbar.select_cols(&pivots);
    Ok(FZip {
        fbar,
        vbar,
        hodge,
        conjugate,
    })
}

impl<S: Scalar> FZip<S> {
    /// `[V̄]^{-1}(w)` for `w` in `σ(M̄^1) = Im V̄`: some `n` with `V̄ n = w`,
    /// well defined modulo `M̄_0`.
    pub fn v_inverse(&self, w: &Matrix<S>) -> Option<Matrix<S>> {
        self.vbar.solve_field(w)
    }

    /// Whether `a ≡ b` modulo `M̄_0`, column by column.
    pub fn congruent_mod_conjugate(&self, a: &Matrix<S>, b: &Matrix<S>) -> bool {
        let diff = a.sub(b);
        (0..diff.cols()).all(|j| {
            self.conjugate.rank_field() == self.conjugate.hstack(&diff.col(j)).rank_field()
        })
    }

    /// Both halves of `delta` are isomorphisms: `[V̄]^{-1}` maps a basis of
    /// `σ(M̄^1)` to vectors independent modulo `M̄_0`, and `F̄` maps a
    /// complement of `σ(M̄^1)` onto `M̄_0`.
    pub fn delta_is_iso(&self, spec: &GroupSpec) -> bool {
        let sh = self.hodge.frobenius();
        let Some(lifts) = self.v_inverse(&sh) else {
            return false;
        };
        let m = spec.m();
        let Some(cols) = standard_completion(spec, &sh) else {
            return false;
        };
        let comp = unit_columns(m, &cols, sh.proto());
        self.conjugate.hstack(&lifts).rank_field() == m
            && self.fbar.mul(&comp).same_column_space(&self.conjugate)
    }
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuleJson {
    pub ring: RingJson,
    pub spec: GroupSpec,
    #[serde(rename = "F")]
    pub f: MatrixJson,
    #[serde(rename = "V")]
    pub v: MatrixJson,
    pub hodge: MatrixJson,
}

impl DieudonneModule<RingElem> {
    pub fn ring(&self) -> &Ring {
        self.f.proto().ring()
    }

    pub fn to_json(&self) -> ModuleJson {
        ModuleJson {
            ring: self.ring().to_json(),
            spec: self.spec.clone(),
            f: matrix_to_json(&self.f),
            v: matrix_to_json(&self.v),
            hodge: matrix_to_json(&self.hodge),
        }
    }

    pub fn from_json(json: &ModuleJson) -> Result<Self, DieudonneError> {
        let ring = RingDescriptor::from_json(&json.ring)?;
        Self::new(
            &json.spec,
            matrix_from_json(&ring, &json.f)?,
            matrix_from_json(&ring, &json.v)?,
            matrix_from_json(&ring, &json.hodge)?,
        )
    }
}
