//! The nine acceptance criteria at their stated sizes. Each prints one
//! PASS/FAIL line; the test fails if any criterion does.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use eozip::dieudonne::{dm_from_group_element, dm_random, dm_standard, StandardKind};
use eozip::group::{mu_p_conjugate, random_element, random_pplus, random_unipotent_plus, GroupElem, GroupSpec};
use eozip::matrix::Matrix;
use eozip::orbit::{orbit_decompose, DEFAULT_CAP};
use eozip::scalar::Scalar;
use eozip::witt::{ring_make, Ring, RingElem};
use eozip::zip::{trivialize, verify, verify_random, zeta_invariant, zip_invariant, Property, TrivializedPoint};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn spec(s: &str) -> GroupSpec {
    GroupSpec::parse(s).unwrap()
}

const SPECS: [&str; 3] = ["GL:2:10", "GL:3:100", "GSp:4:1100"];

/// p in {2, 3, 5}, f in {1, 2}, n in {2, 3}, three groups.
fn configs() -> Vec<(GroupSpec, Ring)> {
    let mut out = Vec::new();
    for p in [2, 3, 5] {
        for f in [1, 2] {
            for n in [2, 3] {
                for s in SPECS {
                    out.push((spec(s), ring_make(p, f, n).unwrap()));
                }
            }
        }
    }
    out
}

fn label(spec: &GroupSpec, ring: &Ring) -> String {
    format!("{spec} over W_{}(F_{})", ring.n(), ring.residue_order())
}

/// Runs `property` on `per` random modules of every config.
fn random_suite(configs: &[(GroupSpec, Ring)], property: Property, per: usize, seed: u64) -> (usize, Vec<String>) {
    let mut total = 0;
    let mut failures = Vec::new();
    for (i, (spec, ring)) in configs.iter().enumerate() {
        let r = verify_random(spec, ring, property, per, seed + i as u64);
        total += r.trials;
        if !r.ok() {
            let first = r.counterexamples.first().map(|c| c.detail.clone()).unwrap_or_default();
            failures.push(format!("{}: {} failed ({first})", label(spec, ring), r.failed));
        }
    }
    (total, failures)
}

fn summarize(what: &str, total: usize, failures: Vec<String>) -> Outcome {
    let pass = failures.is_empty() && total > 0;
    let mut detail = format!("{total} {what}, {} failing configs", failures.len());
    for f in failures.iter().take(3) {
        detail.push_str("; ");
        detail.push_str(f);
    }
    outcome(pass, detail)
}

fn criterion_1() -> Outcome {
    let (total, failures) = random_suite(&configs(), Property::GammaIso, 30, 1_000);
    let pass = total >= 1000;
    let o = summarize("modules", total, failures);
    outcome(o.pass && pass, o.detail)
}

fn criterion_2() -> Outcome {
    let configs = configs();
    let per = 500;
    let failures: Vec<String> = configs
        .par_iter()
        .enumerate()
        .filter_map(|(i, (spec, ring))| {
            let one = RingElem::one(ring, ring.n());
            let mut rng = ChaCha8Rng::seed_from_u64(2_000 + i as u64);
            let mut bad = 0;
            for _ in 0..per {
                let h = random_pplus(spec, &one, &mut rng);
                let c = mu_p_conjugate(spec, &h).unwrap();
                // entry (i, j) of mu(p) h mu(p)^-1 is p^{w_i - w_j} h_ij: the
                // only division happens where w_i < w_j, and P+ is zero there
                let independent = (0..spec.m()).all(|a| (0..spec.m()).all(|b| spec.weight(a) >= spec.weight(b) || h.get(a, b).is_zero()));
                if !c.integral || !independent {
                    bad += 1;
                }
                let u = random_unipotent_plus(spec, &one, &mut rng);
                let c = mu_p_conjugate(spec, &u).unwrap();
                if !c.integral || !c.congruent_to_one {
                    bad += 1;
                }
            }
            (bad > 0).then(|| format!("{}: {bad} failures", label(spec, ring)))
        })
        .collect();
    let total = configs.len() * per;
    summarize("samples of h in P+ and of u in U+", total, failures)
}

fn criterion_3() -> Outcome {
    let configs = configs();
    let modules = 200;
    let per = 20;
    let failures: Vec<String> = (0..modules)
        .into_par_iter()
        .filter_map(|i| {
            let (spec, ring) = &configs[i % configs.len()];
            let dm = dm_random(spec, ring, 3_000 + i as u64);
            let r = verify(&dm, Property::LiftIndependence, per, i as u64);
            (!r.ok()).then(|| format!("module {i} ({}): {} failed", label(spec, ring), r.failed))
        })
        .collect();
    summarize(&format!("modules x {per} lifts"), modules, failures)
}

fn criterion_4() -> Outcome {
    // over Z/p^2[t]
    let configs: Vec<(GroupSpec, Ring)> = [2, 3, 5]
        .into_iter()
        .flat_map(|p| SPECS.into_iter().map(move |s| (spec(s), ring_make(p, 1, 2).unwrap())))
        .collect();
    let (total, failures) = random_suite(&configs, Property::FrameIndependence, 6, 4_000);
    let o = summarize("frame runs", total, failures);
    outcome(o.pass && total >= 50, o.detail)
}

fn criterion_5() -> Outcome {
    let (total, failures) = random_suite(&configs(), Property::Equivariance, 6, 5_000);
    let o = summarize("(module, p+) pairs", total, failures);
    outcome(o.pass && total >= 200, o.detail)
}

fn criterion_6() -> Outcome {
    let mut failures = Vec::new();
    let mut fixtures = 0;
    for p in [2, 3, 5] {
        for f in [1, 2] {
            let ring = ring_make(p, f, 2).unwrap();
            let one = RingElem::one(&ring, 2);
            for s in ["GL:2:10", "GL:4:1100", "GSp:4:1100", "GSp:6:111000"] {
                let spec = spec(s);
                for kind in [StandardKind::Ordinary, StandardKind::Supersingular] {
                    let dm = dm_standard(kind, &spec, &one).unwrap();
                    fixtures += 1;
                    let eta = zip_invariant(&trivialize(&dm, 0).unwrap()).unwrap().coset;
                    let zeta = zeta_invariant(&dm).unwrap();
                    let r = verify(&dm, Property::Comparison, 5, fixtures as u64);
                    if !eta.coset_equal(&zeta.coset) || !zeta.bridge_ok || !zeta.diagram_ok || !r.ok() {
                        failures.push(format!("{kind:?} {}", label(&spec, &ring)));
                    }
                }
            }
        }
    }
    let (total, more) = random_suite(&configs(), Property::Comparison, 6, 6_000);
    failures.extend(more);
    let o = summarize(&format!("random modules and {fixtures} fixtures"), total, failures);
    outcome(o.pass && total >= 200, o.detail)
}

fn criterion_7() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (s, expected) in [("GL:2:10", 2), ("GL:3:100", 3), ("GL:3:110", 3), ("GSp:4:1100", 4)] {
        let start = Instant::now();
        let t = orbit_decompose(&spec(s), 2, DEFAULT_CAP).unwrap();
        let secs = start.elapsed().as_secs_f64();
        let strata = t.strata().len();
        let mut ok = strata == expected && secs < 10.0;
        if s == "GL:2:10" {
            let mut sizes: Vec<usize> = t.orbits().iter().map(|o| o.size).collect();
            sizes.sort();
            ok &= t.orbits().len() == 2 && sizes == vec![2, 4];
        }
        pass &= ok;
        parts.push(format!(
            "{s}: {strata} geometric orbits (expected {expected}), {} rational, {secs:.2}s",
            t.orbits().len()
        ));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_8() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let gl2 = spec("GL:2:10");
    for p in [2, 3, 5] {
        let table = orbit_decompose(&gl2, p, DEFAULT_CAP).unwrap();
        let ring = ring_make(p, 1, 2).unwrap();
        let one = RingElem::one(&ring, 2);
        let id = table.classify(&Matrix::identity(2, &one)).unwrap();
        let w = table.classify(&Matrix::from_ints(&[vec![0, 1], vec![1, 0]], &one)).unwrap();
        let class = |kind| {
            let dm = dm_standard(kind, &gl2, &one).unwrap();
            let coset = zip_invariant(&trivialize(&dm, 0).unwrap()).unwrap().coset;
            table.classify_coset(&coset).unwrap()
        };
        let ord = class(StandardKind::Ordinary);
        let ss = class(StandardKind::Supersingular);
        let mut ok = ord == id && ss == w && ord != ss && table.stratum_of(ord) != table.stratum_of(ss);
        if p == 2 {
            ok &= table.orbits()[ss].size == 2;
        }
        pass &= ok;
        parts.push(format!(
            "p={p}: ordinary in orbit {ord} (size {}), supersingular in orbit {ss} (size {})",
            table.orbits()[ord].size,
            table.orbits()[ss].size
        ));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_9() -> Outcome {
    let tables = [
        ("GL:2:10", 2),
        ("GL:2:10", 3),
        ("GL:2:10", 4),
        ("GL:2:10", 5),
        ("GL:3:100", 2),
        ("GL:3:110", 2),
        ("GSp:4:1100", 2),
        ("GSp:4:1100", 3),
    ];
    let per = 130;
    let mut failures = Vec::new();
    let mut total = 0;
    for (i, (s, q)) in tables.into_iter().enumerate() {
        let spec = spec(s);
        let table = orbit_decompose(&spec, q, DEFAULT_CAP).unwrap();
        let (p, f) = eozip::orbit::prime_power(q).unwrap();
        let ring = ring_make(p, f, 2).unwrap();
        let one = RingElem::one(&ring, 2);
        let bad: usize = (0..per)
            .into_par_iter()
            .filter(|&t| {
                let mut rng = ChaCha8Rng::seed_from_u64(9_000 + i as u64);
                rng.set_stream(t as u64);
                let _: u8 = rng.gen();
                let g = random_element(&spec, &one, &mut rng);
                let dm = dm_from_group_element(&g).unwrap();
                let x = TrivializedPoint::new(dm, GroupElem::identity(&spec, &one)).unwrap();
                let coset = zip_invariant(&x).unwrap().coset;
                table.classify_coset(&coset).ok() != table.classify(g.matrix()).ok()
            })
            .count();
        total += per;
        if bad > 0 {
            failures.push(format!("{s} over F_{q}: {bad} mismatches"));
        }
    }
    let o = summarize("random g", total, failures);
    outcome(o.pass && total >= 1000, o.detail)
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("factorization law", criterion_1),
        ("integrality", criterion_2),
        ("lift independence", criterion_3),
        ("frame independence", criterion_4),
        ("equivariance", criterion_5),
        ("comparison of the two routes", criterion_6),
        ("orbit counts", criterion_7),
        ("classic fixtures", criterion_8),
        ("round trip through classify", criterion_9),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        println!(
            "criterion {} ({name}): {} [{:.1}s] {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
