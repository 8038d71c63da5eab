//! The zip invariant of a Dieudonné module with G-structure.
//!
//! Given a trivialization `beta` carrying the standard weight-1 coordinates
//! onto the Hodge filtration, the trivialized Frobenius factors as
//! `beta^{-1} F sigma(beta) = I mu(p)` with `I = beta^{-1} Gamma sigma(beta)`
//! integral. The invariant is the class of `I mod p` in `G / U_-^sigma`.
//!
//! The second route builds `theta` from the mod-p F-zip alone: it sends the
//! weight-0 coordinates through `F̄ sigma(beta̅)` and lifts the weight-1
//! coordinates through `V̄`. Its class `beta̅^{-1} theta U_-^sigma` is then
//! compared with the first.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dieudonne::{
    dm_base_change, dm_random, dm_validate, fzip_of, gamma_factorization, normal_decomposition,
    standard_completion, unit_columns, DieudonneError, DieudonneModule, ModuleJson, NdSource,
};
use crate::group::{
    cochar_at_p, mu_p_conjugate, random_congruence, random_levi, random_pplus, random_unipotent_plus,
    symplectic_fixup, Adjust, GroupElem, GroupError, GroupKind, GroupSpec, ZipCoset,
};
use crate::matrix::Matrix;
use crate::sample::RandomScalar;
use crate::scalar::Scalar;
use crate::witt::{PolyElem, PolyFrame, Ring, RingElem, WittError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZipError {
    #[error("no trivialization: {0}")]
    NoTrivialization(String),
    #[error("postcondition failed: {0}")]
    Postcondition(String),
    #[error(transparent)]
    Dieudonne(#[from] DieudonneError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Witt(#[from] WittError),
}

/// A module together with `beta` in `G` carrying the standard weight-1
/// coordinates onto `M^1`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrivializedPoint<S> {
    pub module: DieudonneModule<S>,
    pub beta: GroupElem<S>,
}

impl<S: Scalar> TrivializedPoint<S> {
    pub fn new(module: DieudonneModule<S>, beta: GroupElem<S>) -> Result<Self, ZipError> {
        normal_decomposition(&module, NdSource::FromBeta(beta.matrix()))?;
        Ok(TrivializedPoint { module, beta })
    }

    /// `(M, beta h)`.
    pub fn act(&self, h: &GroupElem<S>) -> Result<Self, ZipError> {
        Self::new(self.module.clone(), self.beta.mul(h))
    }

    /// The trivialized Frobenius `beta^{-1} F sigma(beta)`.
    pub fn frobenius(&self) -> Matrix<S> {
        self.beta
            .inverse()
            .matrix()
            .mul(self.module.f())
            .mul(self.beta.frobenius().matrix())
    }
}

/// Places the Hodge basis at the weight-1 coordinates and a complement at the
/// weight-0 coordinates. For GSp the complement is moved inside its `U+`
/// coset until the matrix is symplectic. A nonzero seed further multiplies
/// by a random element of `P+`.
pub fn trivialize<S: RandomScalar>(dm: &DieudonneModule<S>, seed: u64) -> Result<TrivializedPoint<S>, ZipError> {
    let spec = dm.spec();
    let m = spec.m();
    let proto = dm.proto();
    let hodge = dm.hodge();
    let cols = standard_completion(spec, hodge)
        .ok_or_else(|| ZipError::NoTrivialization("M^1 is not a direct summand".into()))?;
    let comp = unit_columns(m, &cols, proto);
    let beta = match spec.kind() {
        GroupKind::GL => {
            let mut b = Matrix::zeros(m, m, proto);
            for (src, &dst) in spec.weight_one().iter().enumerate() {
                for i in 0..m {
                    b.set(i, dst, hodge.get(i, src).clone());
                }
            }
            for (src, &dst) in spec.weight_zero().iter().enumerate() {
                for i in 0..m {
                    b.set(i, dst, comp.get(i, src).clone());
                }
            }
            b
        }
        GroupKind::GSp => {
            let j = spec.gram(proto);
            if !hodge.transpose().mul(&j).mul(hodge).is_zero() {
                return Err(ZipError::NoTrivialization("M^1 is not Lagrangian".into()));
            }
            let n = hodge.transpose().mul(&j).mul(&comp);
            let n_inv = n
                .inverse()
                .ok_or_else(|| ZipError::NoTrivialization("degenerate pairing on M^1".into()))?;
            let k = Matrix::from_fn(m / 2, m / 2, |a, b| proto.int_like((a + b == m / 2 - 1) as i64));
            let c1 = comp.mul(&n_inv).mul(&k);
            symplectic_fixup(spec, &hodge.hstack(&c1), Adjust::WeightZero)
                .ok_or_else(|| ZipError::NoTrivialization("no symplectic completion of M^1".into()))?
        }
    };
    let mut beta = GroupElem::new(spec, beta)
        .map_err(|_| ZipError::NoTrivialization("completion is not in the group".into()))?;
    if seed != 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        beta = beta.mul(&GroupElem::from_trusted(spec, random_pplus(spec, proto, &mut rng)));
    }
    TrivializedPoint::new(dm.clone(), beta)
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegralPart<S> {
    /// `beta^{-1} Gamma sigma(beta)`, one level of precision below the module.
    pub integral: GroupElem<S>,
    /// `Gamma` for the normal decomposition induced by `beta`.
    pub gamma: Matrix<S>,
}

pub fn trivialized_frobenius<S: Scalar>(x: &TrivializedPoint<S>) -> Result<IntegralPart<S>, ZipError> {
    let beta = x.beta.matrix();
    let nd = normal_decomposition(&x.module, NdSource::FromBeta(beta))?;
    let gf = gamma_factorization(&x.module, &nd)?;
    let prec = gf.gamma.precision();
    let integral = x
        .beta
        .inverse()
        .matrix()
        .truncate(prec)
        .mul(&gf.gamma)
        .mul(&x.beta.frobenius().matrix().truncate(prec));
    let integral = GroupElem::new(x.module.spec(), integral)
        .map_err(|_| ZipError::Postcondition("the integral part is not in G".into()))?;
    Ok(IntegralPart {
        integral,
        gamma: gf.gamma,
    })
}

/// `beta I mu(p) sigma(beta)^{-1} = F` at the precision of `I`.
pub fn reconstructs<S: Scalar>(x: &TrivializedPoint<S>, part: &IntegralPart<S>) -> bool {
    let spec = x.module.spec();
    let prec = part.integral.matrix().precision();
    let lhs = x
        .beta
        .matrix()
        .truncate(prec)
        .mul(part.integral.matrix())
        .mul(&cochar_at_p(spec, part.integral.matrix().proto()))
        .mul(&x.beta.frobenius().inverse().matrix().truncate(prec));
    lhs.congruent(x.module.f())
}

#[derive(Clone, Debug)]
pub struct ZipInvariant<S> {
    pub integral: GroupElem<S>,
    pub coset: ZipCoset<S>,
}

pub fn zip_invariant<S: Scalar>(x: &TrivializedPoint<S>) -> Result<ZipInvariant<S>, ZipError> {
    let part = trivialized_frobenius(x)?;
    let coset = ZipCoset::new(x.module.spec(), part.integral.matrix().reduce_mod_p());
    Ok(ZipInvariant {
        integral: part.integral,
        coset,
    })
}

#[derive(Clone, Debug)]
pub struct ZetaInvariant<S> {
    pub coset: ZipCoset<S>,
    /// `theta` built from the F-zip, in the standard basis.
    pub theta: Matrix<S>,
    /// `Gamma̅ sigma(beta̅)` carries the weight-0 coordinates onto `M̄_0`.
    pub bridge_ok: bool,
    /// `[V̄]^{-1}(m̄) = Gamma̅(m)` modulo `M̄_0` on `sigma(beta̅)` of the
    /// weight-1 coordinates.
    pub diagram_ok: bool,
}

/// The second route for the trivialization `x`. Needs a residue field.
pub fn zeta_invariant_at<S: Scalar>(x: &TrivializedPoint<S>) -> Result<ZetaInvariant<S>, ZipError> {
    let dm = &x.module;
    let spec = dm.spec();
    let m = spec.m();
    let fz = fzip_of(dm)?;
    let beta_bar = x.beta.matrix().reduce_mod_p();
    let s_beta = beta_bar.frobenius();
    let mut theta = Matrix::zeros(m, m, s_beta.proto());
    let mut lifts = Vec::new();
    for j in 0..m {
        let col = if spec.weight(j) == 0 {
            fz.fbar.mul(&s_beta.col(j))
        } else {
            let lift = fz.v_inverse(&s_beta.col(j)).ok_or_else(|| {
                ZipError::Postcondition(format!("sigma(beta) e_{j} is not in the image of V mod p"))
            })?;
            lifts.push((j, lift.clone()));
            lift
        };
        for i in 0..m {
            theta.set(i, j, col.get(i, 0).clone());
        }
    }
    let beta_inv = beta_bar
        .inverse()
        .ok_or_else(|| ZipError::Postcondition("beta mod p is not invertible".into()))?;
    let mut rep = beta_inv.mul(&theta);
    match spec.kind() {
        GroupKind::GL => {
            if !rep.det().is_unit() {
                return Err(ZipError::Postcondition("theta is not invertible".into()));
            }
        }
        GroupKind::GSp => {
            rep = symplectic_fixup(spec, &rep, Adjust::WeightOne).ok_or_else(|| {
                ZipError::Postcondition("no symplectic theta in the U- coset".into())
            })?;
            theta = beta_bar.mul(&rep);
        }
    }

    let part = trivialized_frobenius(x)?;
    let theta_prime = part.gamma.reduce_mod_p().mul(&s_beta);
    let bridge_ok = theta_prime
        .select_cols(&spec.weight_zero())
        .same_column_space(&fz.conjugate);
    let diagram_ok = lifts
        .iter()
        .all(|(j, lift)| fz.congruent_mod_conjugate(lift, &theta_prime.col(*j)));
    Ok(ZetaInvariant {
        coset: ZipCoset::new(spec, rep),
        theta,
        bridge_ok,
        diagram_ok,
    })
}

pub fn zeta_invariant<S: RandomScalar>(dm: &DieudonneModule<S>) -> Result<ZetaInvariant<S>, ZipError> {
    zeta_invariant_at(&trivialize(dm, 0)?)
}

// ---------------------------------------------------------------------------
// Verification

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Integrality,
    GammaIso,
    LiftIndependence,
    FrameIndependence,
    Equivariance,
    Comparison,
}

impl Property {
    pub const ALL: [Property; 6] = [
        Property::Integrality,
        Property::GammaIso,
        Property::LiftIndependence,
        Property::FrameIndependence,
        Property::Equivariance,
        Property::Comparison,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Integrality => "integrality",
            Property::GammaIso => "gamma-iso",
            Property::LiftIndependence => "lift-independence",
            Property::FrameIndependence => "frame-independence",
            Property::Equivariance => "equivariance",
            Property::Comparison => "comparison",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    pub trial: usize,
    pub detail: String,
    pub module: ModuleJson,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub property: Property,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    /// The first few failures, in trial order.
    pub counterexamples: Vec<Counterexample>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

const MAX_COUNTEREXAMPLES: usize = 5;

/// Per-trial generator: stream `trial` of the seeded ChaCha generator, so
/// results do not depend on scheduling.
fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn collect(
    property: Property,
    trials: usize,
    results: Vec<(usize, Result<(), String>, &DieudonneModule<RingElem>)>,
) -> VerifyReport {
    let failed: Vec<Counterexample> = results
        .iter()
        .filter_map(|(t, r, dm)| {
            r.as_ref().err().map(|detail| Counterexample {
                trial: *t,
                detail: detail.clone(),
                module: dm.to_json(),
            })
        })
        .collect();
    VerifyReport {
        property,
        trials,
        passed: trials - failed.len(),
        failed: failed.len(),
        counterexamples: failed.into_iter().take(MAX_COUNTEREXAMPLES).collect(),
    }
}

/// Runs `trials` randomized checks of `property` on a fixed module.
pub fn verify(dm: &DieudonneModule<RingElem>, property: Property, trials: usize, seed: u64) -> VerifyReport {
    let results: Vec<_> = (0..trials)
        .into_par_iter()
        .map(|t| (t, run_trial(dm, property, &mut trial_rng(seed, t)), dm))
        .collect();
    collect(property, trials, results)
}

/// Runs `trials` checks of `property`, each on its own random module.
pub fn verify_random(
    spec: &GroupSpec,
    ring: &Ring,
    property: Property,
    trials: usize,
    seed: u64,
) -> VerifyReport {
    let modules: Vec<_> = (0..trials)
        .into_par_iter()
        .map(|t| dm_random(spec, ring, trial_rng(seed, t).gen()))
        .collect();
    let results: Vec<_> = modules
        .par_iter()
        .enumerate()
        .map(|(t, dm)| (t, run_trial(dm, property, &mut trial_rng(seed ^ 0x5eed, t)), dm))
        .collect();
    collect(property, trials, results)
}

fn run_trial(dm: &DieudonneModule<RingElem>, property: Property, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let report = dm_validate(dm);
    if let Some(name) = report.first_failure() {
        return Err(format!("module fails validation: {name}"));
    }
    let r: Result<(), ZipError> = match property {
        Property::Integrality => return trial_integrality(dm.spec(), dm.proto(), rng),
        Property::GammaIso => trial_gamma_iso(dm, rng),
        Property::LiftIndependence => trial_lift(dm, rng),
        Property::FrameIndependence => trial_frame(dm, rng),
        Property::Equivariance => trial_equivariance(dm, rng),
        Property::Comparison => trial_comparison(dm, rng),
    };
    match r {
        Ok(()) => Ok(()),
        Err(ZipError::Postcondition(s)) => Err(s),
        Err(e) => Err(e.to_string()),
    }
}

fn fail(msg: String) -> ZipError {
    ZipError::Postcondition(msg)
}

/// Conjugation by `mu(p)` is integral on `P+` and congruent to 1 on `U+`.
fn trial_integrality(spec: &GroupSpec, proto: &RingElem, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let h = random_pplus(spec, proto, rng);
    let c = mu_p_conjugate(spec, &h).map_err(|e| e.to_string())?;
    if !c.integral {
        return Err(format!("mu(p) h mu(p)^-1 is not integral for h in P+: {h}"));
    }
    let u = random_unipotent_plus(spec, proto, rng);
    let c = mu_p_conjugate(spec, &u).map_err(|e| e.to_string())?;
    if !c.integral || !c.congruent_to_one {
        return Err(format!("mu(p) u mu(p)^-1 is not 1 mod p for u in U+: {u}"));
    }
    Ok(())
}

/// `Gamma f = F` with `Gamma` invertible, for the standard complement and a
/// random trivialization.
fn trial_gamma_iso(dm: &DieudonneModule<RingElem>, rng: &mut ChaCha8Rng) -> Result<(), ZipError> {
    let x = trivialize(dm, rng.gen())?;
    for source in [NdSource::StandardComplement, NdSource::FromBeta(x.beta.matrix())] {
        let nd = normal_decomposition(dm, source)?;
        let gf = gamma_factorization(dm, &nd)?;
        if !gf.gamma.det().is_unit() {
            return Err(fail(format!("Gamma is not invertible: {}", gf.gamma)));
        }
        if !gf.reconstructs(dm.f()) {
            return Err(fail("Gamma f != F".into()));
        }
    }
    Ok(())
}

/// Another lift of the same mod-p point: `beta' = beta h` with `h = 1 mod p`
/// in `G`, and the Hodge lift `M^1' = beta' <e_i : w_i = 1>`.
fn trial_lift(dm: &DieudonneModule<RingElem>, rng: &mut ChaCha8Rng) -> Result<(), ZipError> {
    let spec = dm.spec();
    let x = trivialize(dm, 0)?;
    let base = zip_invariant(&x)?;
    let h = GroupElem::from_trusted(spec, random_congruence(spec, dm.proto(), rng));
    let beta = x.beta.mul(&h);
    let moved = dm.with_hodge(beta.matrix().select_cols(&spec.weight_one()))?;
    if !dm_validate(&moved).ok() {
        return Err(fail("the new Hodge lift is not admissible".into()));
    }
    let y = TrivializedPoint::new(moved, beta)?;
    let other = zip_invariant(&y)?;
    if !base.coset.coset_equal(&other.coset) {
        return Err(fail(format!(
            "lifts give different cosets: {} vs {}",
            base.coset.rep(),
            other.coset.rep()
        )));
    }
    Ok(())
}

/// The constant family over `W[t]` with `sigma(t) = t^p` and with
/// `sigma(t) = t^p + p c(t)`, trivialized by `beta_0 u(t) m` with `u(t)` in
/// `U+` of t-degree at most 2.
fn trial_frame(dm: &DieudonneModule<RingElem>, rng: &mut ChaCha8Rng) -> Result<(), ZipError> {
    let spec = dm.spec();
    let ring = dm.ring().clone();
    let n = ring.n();
    let x = trivialize(dm, 0)?;
    let c: Vec<RingElem> = (0..=2).map(|_| RingElem::random(&ring, n, rng)).collect();
    let frames = [PolyFrame::standard(&ring), PolyFrame::shifted(&ring, &c)];
    let prec = dm.precision();
    let t_proto = PolyElem::t(&frames[0], prec).one_like();
    let u = random_unipotent_plus(spec, &t_proto, rng);
    let levi = random_levi(spec, dm.proto(), rng);
    let mut cosets = Vec::new();
    for frame in &frames {
        let into = |m: &Matrix<PolyElem>| {
            m.map(|a| PolyElem::from_coeffs(frame, a.coeffs().to_vec(), a.precision()))
        };
        let lift = |m: &Matrix<RingElem>| m.map(|a| PolyElem::constant(frame, a));
        let beta = lift(x.beta.matrix()).mul(&into(&u)).mul(&lift(&levi));
        let beta = GroupElem::new(spec, beta)?;
        let point = TrivializedPoint::new(dm_base_change(dm, frame), beta)?;
        let inv = zip_invariant(&point)?;
        if !reconstructs(&point, &trivialized_frobenius(&point)?) {
            return Err(fail("beta I mu(p) sigma(beta)^-1 != F over the frame".into()));
        }
        cosets.push(inv.coset);
    }
    if !cosets[0].coset_equal(&cosets[1]) {
        return Err(fail(format!(
            "frames give different cosets: {} vs {}",
            cosets[0].rep(),
            cosets[1].rep()
        )));
    }
    Ok(())
}

/// `x . p+` against the action of `p+ mod p` on the coset.
fn trial_equivariance(dm: &DieudonneModule<RingElem>, rng: &mut ChaCha8Rng) -> Result<(), ZipError> {
    let spec = dm.spec();
    let x = trivialize(dm, rng.gen_range(0..4))?;
    let h = GroupElem::from_trusted(spec, random_pplus(spec, dm.proto(), rng));
    let y = x.act(&h)?;
    let expected_frob = h.inverse().matrix().mul(&x.frobenius()).mul(h.frobenius().matrix());
    if y.frobenius() != expected_frob {
        return Err(fail("F_{x h} != h^-1 F_x sigma(h)".into()));
    }
    let lhs = zip_invariant(&y)?.coset;
    let rhs = zip_invariant(&x)?.coset.act_pplus(&h.matrix().reduce_mod_p())?;
    if !lhs.coset_equal(&rhs) {
        return Err(fail(format!(
            "not equivariant: {} vs {}",
            lhs.rep(),
            rhs.rep()
        )));
    }
    Ok(())
}

/// The two routes agree, and `theta' = Gamma̅ sigma(beta̅)` satisfies the
/// bridge and diagram checks.
fn trial_comparison(dm: &DieudonneModule<RingElem>, rng: &mut ChaCha8Rng) -> Result<(), ZipError> {
    let seed = if rng.gen_bool(0.25) { 0 } else { rng.gen() };
    let x = trivialize(dm, seed)?;
    let eta = zip_invariant(&x)?;
    let zeta = zeta_invariant_at(&x)?;
    if !zeta.bridge_ok {
        return Err(fail("theta' does not carry the weight-0 coordinates onto Im F mod p".into()));
    }
    if !zeta.diagram_ok {
        return Err(fail("[V]^-1 and Gamma disagree modulo the conjugate filtration".into()));
    }
    if !eta.coset.coset_equal(&zeta.coset) {
        return Err(fail(format!(
            "eta and zeta differ: {} vs {}",
            eta.coset.rep(),
            zeta.coset.rep()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dieudonne::{dm_from_group_element, dm_standard, StandardKind};
    use crate::group::{group_make, random_element};
    use crate::witt::ring_make;

    fn gl2() -> GroupSpec {
        group_make(GroupKind::GL, 2, &[1, 0]).unwrap()
    }

    fn gsp4() -> GroupSpec {
        group_make(GroupKind::GSp, 4, &[1, 1, 0, 0]).unwrap()
    }

    #[test]
    fn ordinary_and_supersingular() {
        for p in [2, 3, 5] {
            let ring = ring_make(p, 1, 2).unwrap();
            let one = RingElem::one(&ring, 2);
            let ord = dm_standard(StandardKind::Ordinary, &gl2(), &one).unwrap();
            let x = trivialize(&ord, 0).unwrap();
            assert!(x.beta.matrix().is_identity());
            let inv = zip_invariant(&x).unwrap();
            assert!(inv.integral.matrix().is_identity());

            let ss = dm_standard(StandardKind::Supersingular, &gl2(), &one).unwrap();
            let x = trivialize(&ss, 0).unwrap();
            let w = Matrix::from_ints(&[vec![0, 1], vec![1, 0]], &one);
            assert_eq!(x.beta.matrix(), &w);
            let ss_inv = zip_invariant(&x).unwrap();
            assert_eq!(ss_inv.integral.matrix(), &w.truncate(1));
            assert!(!ss_inv.coset.coset_equal(&inv.coset));
            let z = zeta_invariant(&ss).unwrap();
            assert!(z.coset.coset_equal(&ss_inv.coset) && z.bridge_ok && z.diagram_ok);
        }
    }

    #[test]
    fn round_trip_from_group_element() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for spec in [gl2(), gsp4(), group_make(GroupKind::GL, 3, &[1, 1, 0]).unwrap()] {
            for (p, f) in [(2, 1), (3, 2)] {
                let ring = ring_make(p, f, 2).unwrap();
                let one = RingElem::one(&ring, 2);
                for _ in 0..10 {
                    let g = random_element(&spec, &one, &mut rng);
                    let dm = dm_from_group_element(&g).unwrap();
                    let x = trivialize(&dm, 0).unwrap();
                    assert!(x.beta.matrix().is_identity());
                    let part = trivialized_frobenius(&x).unwrap();
                    assert!(part.integral.matrix().congruent(g.matrix()));
                    assert!(reconstructs(&x, &part));
                }
            }
        }
    }

    #[test]
    fn gsp_fixtures_trivialize() {
        let ring = ring_make(3, 1, 2).unwrap();
        let one = RingElem::one(&ring, 2);
        for kind in [StandardKind::Ordinary, StandardKind::Supersingular] {
            let dm = dm_standard(kind, &gsp4(), &one).unwrap();
            for seed in 0..5 {
                let x = trivialize(&dm, seed).unwrap();
                let part = trivialized_frobenius(&x).unwrap();
                assert!(reconstructs(&x, &part));
                let z = zeta_invariant_at(&x).unwrap();
                assert!(z.bridge_ok && z.diagram_ok);
                assert!(zip_invariant(&x).unwrap().coset.coset_equal(&z.coset));
            }
        }
    }

    #[test]
    fn non_lagrangian_hodge_has_no_trivialization() {
        let ring = ring_make(3, 1, 2).unwrap();
        let one = RingElem::one(&ring, 2);
        let dm = dm_standard(StandardKind::Ordinary, &gsp4(), &one).unwrap();
        let h = Matrix::from_ints(&[vec![1, 0], vec![0, 0], vec![0, 0], vec![0, 1]], &one);
        let bad = dm.with_hodge(h).unwrap();
        assert!(matches!(trivialize(&bad, 0), Err(ZipError::NoTrivialization(_))));
    }

    #[test]
    fn verifiers_pass_on_random_modules() {
        for spec in [gl2(), gsp4()] {
            let ring = ring_make(3, 2, 2).unwrap();
            for property in Property::ALL {
                let r = verify_random(&spec, &ring, property, 6, 1);
                assert!(r.ok(), "{property:?} on {spec}: {:?}", r.counterexamples);
            }
        }
    }

    #[test]
    fn verification_is_deterministic() {
        let ring = ring_make(2, 2, 3).unwrap();
        let dm = dm_random(&gsp4(), &ring, 3);
        let a = verify(&dm, Property::LiftIndependence, 8, 42);
        let b = verify(&dm, Property::LiftIndependence, 8, 42);
        assert_eq!(a, b);
        assert!(a.ok());
    }

    #[test]
    fn injected_fault_is_caught() {
        let ring = ring_make(3, 1, 2).unwrap();
        let one = RingElem::one(&ring, 2);
        let ss = dm_standard(StandardKind::Supersingular, &gl2(), &one).unwrap();
        let bad = ss
            .with_hodge(Matrix::from_ints(&[vec![1], vec![1]], &one))
            .unwrap();
        let r = verify(&bad, Property::Comparison, 4, 0);
        assert_eq!(r.failed, 4);
        assert!(!r.counterexamples.is_empty());
    }
}
