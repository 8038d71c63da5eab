use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use eozip::dieudonne::{dm_change_basis, dm_from_group_element, dm_validate};
use eozip::group::{
    emu_act, is_member, random_element, random_emu, random_levi, random_pminus, random_pplus,
    random_unipotent_minus, random_unipotent_plus, subgroup_member, GroupSpec, Subgroup,
};
use eozip::matrix::Matrix;
use eozip::orbit::{orbit_decompose, OrbitTable, DEFAULT_CAP};
use eozip::scalar::Scalar;
use eozip::witt::{ring_make, Ring, RingElem};
use eozip::zip::{trivialize, zip_invariant};

fn ring_strategy() -> impl Strategy<Value = Ring> {
    (prop::sample::select(vec![2u64, 3, 5, 7]), 1usize..=3, 2u32..=4).prop_map(|(p, f, n)| ring_make(p, f, n).unwrap())
}

fn spec_strategy() -> impl Strategy<Value = GroupSpec> {
    prop::sample::select(vec!["GL:2:10", "GL:3:100", "GL:3:011", "GL:4:1010", "GSp:4:1100", "GSp:6:111000"])
        .prop_map(|s| GroupSpec::parse(s).unwrap())
}

fn elem(ring: &Ring, seed: u64) -> RingElem {
    RingElem::random(ring, ring.n(), &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn witt_ring_laws(ring in ring_strategy(), s in any::<[u64; 3]>()) {
        let (a, b, c) = (elem(&ring, s[0]), elem(&ring, s[1]), elem(&ring, s[2]));
        prop_assert_eq!(a.add(&b).mul(&c), a.mul(&c).add(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.sub(&b).add(&b), a.clone());
        prop_assert!(a.add(&a.neg()).is_zero());
    }

    #[test]
    fn frobenius_is_a_lift(ring in ring_strategy(), s in any::<[u64; 2]>()) {
        let (a, b) = (elem(&ring, s[0]), elem(&ring, s[1]));
        prop_assert_eq!(a.mul(&b).frobenius(), a.frobenius().mul(&b.frobenius()));
        prop_assert_eq!(a.add(&b).frobenius(), a.frobenius().add(&b.frobenius()));
        prop_assert_eq!(a.frobenius().reduce_mod_p(), a.pow(ring.p()).reduce_mod_p());
        // sigma^f is the identity
        let mut x = a.clone();
        for _ in 0..ring.f() {
            x = x.frobenius();
        }
        prop_assert_eq!(x, a);
    }

    #[test]
    fn units_and_division(ring in ring_strategy(), s in any::<u64>()) {
        let a = elem(&ring, s);
        match a.inverse() {
            Some(b) => prop_assert!(a.mul(&b).is_one()),
            None => prop_assert!(a.is_divisible_by_p()),
        }
        if ring.n() >= 2 {
            let d = a.times_p().div_p_exact().unwrap();
            prop_assert_eq!(d, a.truncate(ring.n() - 1));
        }
        let r = a.reduce_mod_p();
        prop_assert_eq!(RingElem::from_residue_index(&ring, r.residue_index()), r);
    }

    #[test]
    fn determinant_is_multiplicative(ring in ring_strategy(), m in 1usize..=4, s in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let one = RingElem::one(&ring, ring.n());
        let a = Matrix::from_fn(m, m, |_, _| RingElem::random(&ring, ring.n(), &mut rng));
        let b = Matrix::from_fn(m, m, |_, _| RingElem::random(&ring, ring.n(), &mut rng));
        prop_assert_eq!(a.mul(&b).det(), a.det().mul(&b.det()));
        if let Some(inv) = a.inverse() {
            prop_assert!(a.mul(&inv).is_identity());
            prop_assert!(a.det().is_unit());
        } else {
            prop_assert!(!a.det().is_unit());
        }
        prop_assert_eq!(Matrix::identity(m, &one).det(), one);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn subgroups_are_closed(spec in spec_strategy(), ring in ring_strategy(), s in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let one = RingElem::one(&ring, ring.n());
        let checks: [(Subgroup, Matrix<RingElem>, Matrix<RingElem>); 5] = [
            (Subgroup::PPlus, random_pplus(&spec, &one, &mut rng), random_pplus(&spec, &one, &mut rng)),
            (Subgroup::PMinus, random_pminus(&spec, &one, &mut rng), random_pminus(&spec, &one, &mut rng)),
            (Subgroup::UPlus, random_unipotent_plus(&spec, &one, &mut rng), random_unipotent_plus(&spec, &one, &mut rng)),
            (Subgroup::UMinus, random_unipotent_minus(&spec, &one, &mut rng), random_unipotent_minus(&spec, &one, &mut rng)),
            (Subgroup::Levi, random_levi(&spec, &one, &mut rng), random_levi(&spec, &one, &mut rng)),
        ];
        for (which, a, b) in checks {
            prop_assert!(subgroup_member(&spec, &a, which), "{} generator", which);
            prop_assert!(subgroup_member(&spec, &a.mul(&b), which), "{} product", which);
            let inv = a.inverse().unwrap();
            prop_assert!(subgroup_member(&spec, &inv, which), "{} inverse", which);
            prop_assert!(is_member(&spec, &a.mul(&b)).unwrap());
        }
        let g = random_element(&spec, &one, &mut rng);
        prop_assert!(is_member(&spec, g.matrix()).unwrap());
        prop_assert!(is_member(&spec, g.inverse().matrix()).unwrap());
        prop_assert!(is_member(&spec, g.frobenius().matrix()).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn emu_action_law(spec in spec_strategy(), ring in ring_strategy(), s in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let one = RingElem::one(&ring, ring.n());
        let g = random_element(&spec, &one, &mut rng).into_matrix();
        let e1 = random_emu(&spec, &one, &mut rng);
        let e2 = random_emu(&spec, &one, &mut rng);
        let lhs = emu_act(&emu_act(&g, &e1), &e2);
        let rhs = emu_act(&g, &e1.compose(&spec, &e2));
        prop_assert_eq!(lhs, rhs);
        prop_assert!(is_member(&spec, &emu_act(&g, &e1)).unwrap());
    }

    #[test]
    fn modules_of_group_elements_are_valid(spec in spec_strategy(), ring in ring_strategy(), s in any::<u64>()) {
        prop_assume!(ring.n() >= 2);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let one = RingElem::one(&ring, ring.n());
        let g = random_element(&spec, &one, &mut rng);
        let a = random_element(&spec, &one, &mut rng);
        let dm = dm_from_group_element(&g).unwrap();
        prop_assert!(dm_validate(&dm).ok());
        prop_assert!(dm_validate(&dm_change_basis(&dm, &a)).ok());
    }
}

/// The orbit of the invariant does not depend on the basis or on the
/// trivialization, so it must agree with the orbit of `g` itself.
fn invariant_orbit_matches(table: &OrbitTable, ring: &Ring, s: u64) -> Result<(), TestCaseError> {
    let spec = table.spec();
    let mut rng = ChaCha8Rng::seed_from_u64(s);
    let one = RingElem::one(ring, ring.n());
    let g = random_element(spec, &one, &mut rng);
    let a = random_element(spec, &one, &mut rng);
    let dm = dm_change_basis(&dm_from_group_element(&g).unwrap(), &a);
    let x = trivialize(&dm, s).unwrap();
    let coset = zip_invariant(&x).unwrap().coset;
    let got = table.classify_coset(&coset).unwrap();
    let want = table.classify(g.matrix()).unwrap();
    prop_assert_eq!(got, want);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn invariant_lands_in_the_orbit_of_g(
        which in prop::sample::select(vec![("GL:2:10", 3u64, 1usize), ("GL:3:100", 2, 1), ("GSp:4:1100", 2, 1), ("GL:2:10", 4, 2)]),
        n in 2u32..=3,
        s in any::<u64>(),
    ) {
        let (spec, q, f) = which;
        let spec = GroupSpec::parse(spec).unwrap();
        let p = if f == 2 { 2 } else { q };
        let ring = ring_make(p, f, n).unwrap();
        let table = orbit_decompose(&spec, q, DEFAULT_CAP).unwrap();
        invariant_orbit_matches(&table, &ring, s)?;
    }
}
