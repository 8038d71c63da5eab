//! Orbits of the zip group `E_mu` on `G(F_q)` by brute force.
//!
//! Field elements are indices `0..q` into precomputed addition and
//! multiplication tables; a matrix is a row-major array of indices and its
//! key packs the entries in base `q` with entry `(0, 0)` most significant, so
//! numeric order on keys is lexicographic order on entries.
//!
//! The group is enumerated by closure from generators and the orbits are the
//! connected components of the graph joining `g` to `g . e` for generators
//! `e` of `E_mu`.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{GroupKind, GroupSpec, ZipCoset};
use crate::json::{matrix_from_json, matrix_to_json, MatrixJson};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::witt::{is_prime, ring_make, Ring, RingElem, WittError};

pub const DEFAULT_CAP: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrbitError {
    #[error("|G(F_q)| = {order} exceeds the enumeration cap {cap}")]
    CapExceeded { order: u128, cap: u64 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("matrix is not an element of G(F_q)")]
    NotInGroup,
    #[error("q^(m^2) does not fit the 128-bit matrix key")]
    KeyOverflow,
    #[error("orbit table does not match its spec: {0}")]
    Mismatch(String),
    #[error("enumeration found {found} elements, the order formula gives {expected}")]
    OrderMismatch { found: usize, expected: u128 },
    #[error(transparent)]
    Witt(#[from] WittError),
}

/// `q = p^f`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, usize)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    if !is_prime(p) {
        return None;
    }
    let mut r = q;
    let mut f = 0;
    while r % p == 0 {
        r /= p;
        f += 1;
    }
    (r == 1).then_some((p, f))
}

/// Arithmetic tables of `F_q`, indexed as [`RingElem::residue_index`].
#[derive(Clone, Debug)]
pub struct Fq {
    ring: Ring,
    q: usize,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    frob: Vec<u16>,
    primitive: u16,
}

impl Fq {
    pub fn new(q: u64) -> Result<Fq, OrbitError> {
        let (p, f) = prime_power(q).ok_or(OrbitError::NotPrimePower(q))?;
        if q > u16::MAX as u64 {
            return Err(OrbitError::KeyOverflow);
        }
        let ring = ring_make(p, f, 2)?;
        let q = q as usize;
        let elems: Vec<RingElem> = (0..q as u64).map(|i| RingElem::from_residue_index(&ring, i)).collect();
        let idx = |a: &RingElem| a.residue_index() as u16;
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for a in 0..q {
            for b in 0..q {
                add[a * q + b] = idx(&elems[a].add(&elems[b]));
                mul[a * q + b] = idx(&elems[a].mul(&elems[b]));
            }
        }
        let neg = elems.iter().map(|a| idx(&a.neg())).collect();
        let inv = elems.iter().map(|a| a.inverse().map_or(0, |b| idx(&b))).collect();
        let frob = elems.iter().map(|a| idx(&a.frobenius())).collect();
        let primitive = (1..q)
            .find(|&a| {
                let mut x = a;
                let mut order = 1;
                while x != 1 {
                    x = mul[x * q + a] as usize;
                    order += 1;
                }
                order == q - 1
            })
            .expect("F_q^* is cyclic") as u16;
        Ok(Fq {
            ring,
            q,
            add,
            mul,
            neg,
            inv,
            frob,
            primitive,
        })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn primitive(&self) -> u16 {
        self.primitive
    }

    pub fn elem(&self, i: u16) -> RingElem {
        RingElem::from_residue_index(&self.ring, i as u64)
    }

    /// Indices of `1, x, ..., x^{f-1}`, an `F_p`-basis.
    pub fn additive_basis(&self) -> Vec<u16> {
        let p = self.ring.p() as u16;
        (0..self.ring.f()).map(|k| p.pow(k as u32)).collect()
    }
}

type Compact = Vec<u16>;
type Row = Vec<u16>;

impl Fq {
    fn sigma(&self, v: &[u16]) -> Row {
        v.iter().map(|&x| self.frob[x as usize]).collect()
    }

    fn dot(&self, a: &[u16], b: &[u16]) -> u16 {
        a.iter()
            .zip(b)
            .fold(0, |acc, (&x, &y)| self.add[acc as usize * self.q + self.mul[x as usize * self.q + y as usize] as usize])
    }

    /// Reduced row echelon form with zero rows dropped; a canonical basis of
    /// the row space.
    fn rref(&self, mut rows: Vec<Row>) -> Vec<Row> {
        let q = self.q;
        let n = rows.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for col in 0..n {
            let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
                continue;
            };
            rows.swap(rank, piv);
            let s = self.inv[rows[rank][col] as usize] as usize;
            for x in rows[rank].iter_mut() {
                *x = self.mul[*x as usize * q + s];
            }
            let pivot_row = rows[rank].clone();
            for r in 0..rows.len() {
                if r != rank && rows[r][col] != 0 {
                    let c = self.neg[rows[r][col] as usize] as usize;
                    for (x, &y) in rows[r].iter_mut().zip(&pivot_row) {
                        *x = self.add[*x as usize * q + self.mul[c * q + y as usize] as usize];
                    }
                }
            }
            rank += 1;
        }
        rows.truncate(rank);
        rows
    }

    /// Basis of `{x : r . x = 0 for every row r}` in `F_q^n`.
    fn kernel(&self, rows: &[Row], n: usize) -> Vec<Row> {
        let r = self.rref(rows.to_vec());
        let pivots: Vec<usize> = r.iter().map(|row| row.iter().position(|&x| x != 0).unwrap()).collect();
        (0..n)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut v = vec![0; n];
                v[free] = 1;
                for (row, &pc) in r.iter().zip(&pivots) {
                    v[pc] = self.neg[row[free] as usize];
                }
                v
            })
            .collect()
    }
}

fn cm_mul(fq: &Fq, m: usize, a: &[u16], b: &[u16]) -> Compact {
    let q = fq.q;
    let mut out = vec![0u16; m * m];
    for i in 0..m {
        for k in 0..m {
            let x = a[i * m + k] as usize;
            if x == 0 {
                continue;
            }
            for j in 0..m {
                let y = b[k * m + j] as usize;
                let prod = fq.mul[x * q + y] as usize;
                let slot = &mut out[i * m + j];
                *slot = fq.add[*slot as usize * q + prod];
            }
        }
    }
    out
}

fn cm_key(fq: &Fq, a: &[u16]) -> u128 {
    a.iter().fold(0u128, |acc, &x| acc * fq.q as u128 + x as u128)
}

fn cm_from_key(fq: &Fq, m: usize, mut key: u128) -> Compact {
    let mut out = vec![0u16; m * m];
    for slot in out.iter_mut().rev() {
        *slot = (key % fq.q as u128) as u16;
        key /= fq.q as u128;
    }
    out
}

fn to_compact(a: &Matrix<RingElem>) -> Compact {
    a.entries().iter().map(|x| x.reduce_mod_p().residue_index() as u16).collect()
}

fn from_compact(fq: &Fq, m: usize, a: &[u16]) -> Matrix<RingElem> {
    Matrix::from_fn(m, m, |i, j| fq.elem(a[i * m + j]))
}

fn gl_order(m: u32, q: u128) -> u128 {
    (0..m).map(|i| q.pow(m) - q.pow(i)).product()
}

/// `|GL_m(F_q)|` or `|GSp_m(F_q)| = (q-1) q^{g^2} prod (q^{2i} - 1)`.
pub fn group_order(spec: &GroupSpec, q: u64) -> u128 {
    let q = q as u128;
    let m = spec.m() as u32;
    match spec.kind() {
        GroupKind::GL => gl_order(m, q),
        GroupKind::GSp => {
            let g = m / 2;
            (q - 1) * q.pow(g * g) * (1..=g).map(|i| q.pow(2 * i) - 1).product::<u128>()
        }
    }
}

/// `|E_mu(F_q)| = |U+|^2 |M|`.
pub fn emu_order(spec: &GroupSpec, q: u64) -> u128 {
    let q128 = q as u128;
    let m = spec.m() as u32;
    let d = spec.d() as u32;
    match spec.kind() {
        GroupKind::GL => q128.pow(2 * d * (m - d)) * gl_order(d, q128) * gl_order(m - d, q128),
        GroupKind::GSp => {
            let g = m / 2;
            q128.pow(g * (g + 1)) * gl_order(g, q128) * (q128 - 1)
        }
    }
}

/// Elementary generators over `F_q`: (group generators, `U+` generators,
/// `U-` generators, Levi generators).
fn generators(spec: &GroupSpec, fq: &Fq) -> [Vec<Matrix<RingElem>>; 4] {
    let m = spec.m();
    let one = fq.elem(1);
    let basis: Vec<RingElem> = fq.additive_basis().into_iter().map(|i| fq.elem(i)).collect();
    let zeta = fq.elem(fq.primitive());
    let id = Matrix::identity(m, &one);
    let with = |entries: &[(usize, usize, RingElem)]| {
        let mut g = id.clone();
        for (i, j, a) in entries {
            g.set(*i, *j, a.clone());
        }
        g
    };
    let w = spec.mu();
    let mut u_plus = Vec::new();
    let mut u_minus = Vec::new();
    let mut levi = Vec::new();
    match spec.kind() {
        GroupKind::GL => {
            for i in 0..m {
                for j in 0..m {
                    if i == j {
                        continue;
                    }
                    for a in &basis {
                        let t = with(&[(i, j, a.clone())]);
                        if w[i] > w[j] {
                            u_plus.push(t);
                        } else if w[i] < w[j] {
                            u_minus.push(t);
                        } else {
                            levi.push(t);
                        }
                    }
                }
            }
            for i in 0..m {
                levi.push(with(&[(i, i, zeta.clone())]));
            }
        }
        GroupKind::GSp => {
            let g = m / 2;
            // symmetric S with entries a at (i, j) and (j, i); the block K S
            // has them at (g-1-i, j) and (g-1-j, i).
            for i in 0..g {
                for j in i..g {
                    for a in &basis {
                        let mut plus = vec![(g - 1 - i, g + j, a.clone())];
                        let mut minus = vec![(g + g - 1 - i, j, a.clone())];
                        if i != j {
                            plus.push((g - 1 - j, g + i, a.clone()));
                            minus.push((g + g - 1 - j, i, a.clone()));
                        }
                        u_plus.push(with(&plus));
                        u_minus.push(with(&minus));
                    }
                }
            }
            // Levi: diag(A, K A^{-T} K) with A a transvection or diag(zeta, 1, ...)
            for i in 0..g {
                for j in 0..g {
                    if i == j {
                        continue;
                    }
                    for a in &basis {
                        // A = 1 + a E_ij, K A^{-T} K = 1 - a E_{g-1-j, g-1-i}
                        levi.push(with(&[
                            (i, j, a.clone()),
                            (g + (g - 1 - j), g + (g - 1 - i), a.neg()),
                        ]));
                    }
                }
            }
            let zeta_inv = zeta.inverse().expect("primitive element is a unit");
            levi.push(with(&[(0, 0, zeta.clone()), (m - 1, m - 1, zeta_inv)]));
            let sim: Vec<(usize, usize, RingElem)> = (g..m).map(|i| (i, i, zeta.clone())).collect();
            levi.push(with(&sim));
        }
    }
    let mut group = u_plus.clone();
    group.extend(u_minus.iter().cloned());
    group.extend(levi.iter().cloned());
    [group, u_plus, u_minus, levi]
}

fn check_key_width(spec: &GroupSpec, q: u64) -> Result<(), OrbitError> {
    let bits = (spec.m() * spec.m()) as f64 * (q as f64).log2();
    if bits >= 127.0 {
        return Err(OrbitError::KeyOverflow);
    }
    Ok(())
}

fn check_cap(spec: &GroupSpec, q: u64, cap: u64) -> Result<u128, OrbitError> {
    let order = group_order(spec, q);
    if order > cap as u128 {
        return Err(OrbitError::CapExceeded { order, cap });
    }
    Ok(order)
}

/// All elements of `G(F_q)` as sorted keys.
fn enumerate_keys(spec: &GroupSpec, fq: &Fq, cap: u64) -> Result<Vec<u128>, OrbitError> {
    let q = fq.q as u64;
    check_key_width(spec, q)?;
    let order = check_cap(spec, q, cap)?;
    let m = spec.m();
    let gens: Vec<Compact> = generators(spec, fq)[0].iter().map(to_compact).collect();
    let id = to_compact(&Matrix::identity(m, &fq.elem(1)));
    let mut seen: HashSet<u128> = HashSet::new();
    seen.insert(cm_key(fq, &id));
    let mut frontier = vec![id];
    while !frontier.is_empty() {
        let next: Vec<(u128, Compact)> = frontier
            .par_iter()
            .flat_map_iter(|g| gens.iter().map(move |s| cm_mul(fq, m, g, s)))
            .map(|h| (cm_key(fq, &h), h))
            .collect();
        frontier = Vec::new();
        for (k, h) in next {
            if seen.insert(k) {
                frontier.push(h);
            }
        }
        if seen.len() as u128 > order {
            break;
        }
    }
    if seen.len() as u128 != order {
        return Err(OrbitError::OrderMismatch {
            found: seen.len(),
            expected: order,
        });
    }
    let mut keys: Vec<u128> = seen.into_iter().collect();
    keys.sort_unstable();
    Ok(keys)
}

/// Canonical type of the mod-p Dieudonné module of `g`: the sorted triples
/// `(dim W, dim F(W), dim V^{-1}(W))` over the coarsest flag stable under
/// `F` and `V^{-1}`. Two elements of `G(F_q)` have the same type exactly when
/// they lie in one `E_mu`-orbit over the algebraic closure.
fn canonical_type(spec: &GroupSpec, fq: &Fq, g: &[u16], g_inv: &[u16]) -> Vec<(usize, usize, usize)> {
    let m = spec.m();
    // F = g mu(p) and V = mu'(p) g^{-1} modulo p
    let fbar: Vec<Row> = (0..m)
        .map(|i| (0..m).map(|j| if spec.weight(j) == 0 { g[i * m + j] } else { 0 }).collect())
        .collect();
    let vbar: Vec<Row> = (0..m)
        .map(|i| if spec.weight(i) == 1 { g_inv[i * m..(i + 1) * m].to_vec() } else { vec![0; m] })
        .collect();
    let image_f = |w: &[Row]| -> Vec<Row> {
        let rows = w
            .iter()
            .map(|b| {
                let sb = fq.sigma(b);
                fbar.iter().map(|r| fq.dot(r, &sb)).collect()
            })
            .collect();
        fq.rref(rows)
    };
    // x with V̄ x in σ(W): annihilate V̄ x by every functional vanishing on σ(W)
    let preimage_v = |w: &[Row]| -> Vec<Row> {
        let sw: Vec<Row> = w.iter().map(|b| fq.sigma(b)).collect();
        let ann = fq.kernel(&sw, m);
        let rows: Vec<Row> = ann
            .iter()
            .map(|a| (0..m).map(|j| fq.dot(a, &vbar.iter().map(|r| r[j]).collect::<Row>())).collect())
            .collect();
        fq.kernel(&rows, m)
    };
    let full: Vec<Row> = (0..m).map(|i| (0..m).map(|j| (i == j) as u16).collect()).collect();
    let mut seen: HashMap<Vec<Row>, (usize, usize)> = HashMap::new();
    let mut todo = vec![Vec::new(), full];
    while let Some(w) = todo.pop() {
        if seen.contains_key(&w) {
            continue;
        }
        let fw = image_f(&w);
        let vw = fq.rref(preimage_v(&w));
        seen.insert(w, (fw.len(), vw.len()));
        todo.push(fw);
        todo.push(vw);
    }
    let mut t: Vec<(usize, usize, usize)> = seen.iter().map(|(w, &(a, b))| (w.len(), a, b)).collect();
    t.sort_unstable();
    t
}

/// Every element of `G(F_q)` exactly once, in lexicographic order.
pub fn enumerate_group(spec: &GroupSpec, q: u64, cap: u64) -> Result<Vec<Matrix<RingElem>>, OrbitError> {
    let fq = Fq::new(q)?;
    let keys = enumerate_keys(spec, &fq, cap)?;
    Ok(keys.iter().map(|&k| from_compact(&fq, spec.m(), &cm_from_key(&fq, spec.m(), k))).collect())
}

/// Number of elements of `G(F_q)` found by testing every matrix; an
/// independent check of the closure and the order formula.
pub fn brute_force_order(spec: &GroupSpec, q: u64) -> Result<u64, OrbitError> {
    let fq = Fq::new(q)?;
    let m = spec.m();
    let total = (q as u128).pow((m * m) as u32);
    if total > 1 << 24 {
        return Err(OrbitError::CapExceeded {
            order: total,
            cap: 1 << 24,
        });
    }
    let count = (0..total as u64)
        .into_par_iter()
        .filter(|&k| {
            let g = from_compact(&fq, m, &cm_from_key(&fq, m, k as u128));
            crate::group::is_member(spec, &g).unwrap_or(false)
        })
        .count();
    Ok(count as u64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    /// Key of the lexicographically smallest member.
    pub rep: u128,
    pub size: usize,
    pub stratum: usize,
}

/// The points of one `E_mu`-orbit over the algebraic closure (an
/// Ekedahl-Oort stratum), as a union of rational orbits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub orbits: Vec<usize>,
    pub size: usize,
}

#[derive(Clone, Debug)]
pub struct OrbitTable {
    spec: GroupSpec,
    fq: Fq,
    orbits: Vec<Orbit>,
    strata: Vec<Stratum>,
    index: HashMap<u128, u32>,
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let up = parent[parent[x as usize] as usize];
        parent[x as usize] = up;
        x = up;
    }
    x
}

pub fn orbit_decompose(spec: &GroupSpec, q: u64, cap: u64) -> Result<OrbitTable, OrbitError> {
    let fq = Fq::new(q)?;
    let m = spec.m();
    let keys = enumerate_keys(spec, &fq, cap)?;
    let position: HashMap<u128, u32> = keys.iter().enumerate().map(|(i, &k)| (k, i as u32)).collect();

    // each generator e of E_mu acts as g -> L g R
    let [_, u_plus, u_minus, levi] = generators(spec, &fq);
    let id = Matrix::identity(m, &fq.elem(1));
    let mut actions: Vec<(Compact, Compact)> = Vec::new();
    for u in &u_plus {
        actions.push((to_compact(&u.inverse().expect("unipotent")), to_compact(&id)));
    }
    for u in &u_minus {
        actions.push((to_compact(&id), to_compact(u)));
    }
    for l in &levi {
        actions.push((
            to_compact(&l.inverse().expect("Levi generator is invertible")),
            to_compact(&l.frobenius()),
        ));
    }

    let edges: Vec<Vec<u32>> = keys
        .par_iter()
        .map(|&k| {
            let g = cm_from_key(&fq, m, k);
            actions
                .iter()
                .map(|(l, r)| {
                    let h = cm_mul(&fq, m, &cm_mul(&fq, m, l, &g), r);
                    position[&cm_key(&fq, &h)]
                })
                .collect()
        })
        .collect();
    let mut parent: Vec<u32> = (0..keys.len() as u32).collect();
    for (i, targets) in edges.iter().enumerate() {
        for &t in targets {
            let a = find(&mut parent, i as u32);
            let b = find(&mut parent, t);
            if a != b {
                // keys are sorted, so the smaller index is the smaller key
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi as usize] = lo;
            }
        }
    }
    let mut roots: Vec<u32> = (0..keys.len() as u32).map(|i| find(&mut parent, i)).collect();
    let mut distinct: Vec<u32> = roots.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let orbit_of_root: HashMap<u32, u32> = distinct.iter().enumerate().map(|(i, &r)| (r, i as u32)).collect();
    let mut orbits: Vec<Orbit> = distinct
        .iter()
        .map(|&r| Orbit {
            rep: keys[r as usize],
            size: 0,
            stratum: 0,
        })
        .collect();
    let mut index = HashMap::with_capacity(keys.len());
    for (i, r) in roots.iter_mut().enumerate() {
        let id = orbit_of_root[r];
        orbits[id as usize].size += 1;
        index.insert(keys[i], id);
    }
    let mut types: Vec<Vec<(usize, usize, usize)>> = Vec::new();
    let mut strata: Vec<Stratum> = Vec::new();
    for (i, o) in orbits.iter_mut().enumerate() {
        let g = cm_from_key(&fq, m, o.rep);
        let g_inv = to_compact(&from_compact(&fq, m, &g).inverse().expect("group element"));
        let t = canonical_type(spec, &fq, &g, &g_inv);
        o.stratum = types.iter().position(|x| *x == t).unwrap_or_else(|| {
            types.push(t);
            strata.push(Stratum {
                orbits: Vec::new(),
                size: 0,
            });
            types.len() - 1
        });
        strata[o.stratum].orbits.push(i);
        strata[o.stratum].size += o.size;
    }
    Ok(OrbitTable {
        spec: spec.clone(),
        fq,
        orbits,
        strata,
        index,
    })
}

impl OrbitTable {
    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn q(&self) -> u64 {
        self.fq.q as u64
    }

    pub fn orbits(&self) -> &[Orbit] {
        &self.orbits
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    pub fn stratum_of(&self, orbit: usize) -> usize {
        self.orbits[orbit].stratum
    }

    pub fn total(&self) -> usize {
        self.index.len()
    }

    pub fn rep(&self, id: usize) -> Matrix<RingElem> {
        let m = self.spec.m();
        from_compact(&self.fq, m, &cm_from_key(&self.fq, m, self.orbits[id].rep))
    }

    /// Orbit of a matrix over `W_n(F_q)` for any `n`, through its reduction.
    pub fn classify(&self, g: &Matrix<RingElem>) -> Result<usize, OrbitError> {
        let ring = g.proto().ring();
        if ring.p() != self.fq.ring.p()
            || ring.f() != self.fq.ring.f()
            || ring.modulus().iter().zip(self.fq.ring.modulus()).any(|(a, b)| a % ring.p() != b % ring.p())
            || g.rows() != self.spec.m()
            || g.cols() != self.spec.m()
        {
            return Err(OrbitError::NotInGroup);
        }
        let key = cm_key(&self.fq, &to_compact(g));
        self.index.get(&key).map(|&i| i as usize).ok_or(OrbitError::NotInGroup)
    }

    /// Well defined because `U_-^sigma` lies in `E_mu`.
    pub fn classify_coset(&self, c: &ZipCoset<RingElem>) -> Result<usize, OrbitError> {
        self.classify(c.rep())
    }

    pub fn to_json(&self) -> OrbitTableJson {
        OrbitTableJson {
            spec: self.spec.clone(),
            q: self.q(),
            orbits: (0..self.orbits.len())
                .map(|i| OrbitJson {
                    rep: matrix_to_json(&self.rep(i)),
                    size: self.orbits[i].size,
                    stratum: self.orbits[i].stratum,
                })
                .collect(),
        }
    }

    /// Rebuilds the table from its spec and `q` and checks it against the
    /// file.
    pub fn from_json(json: &OrbitTableJson, cap: u64) -> Result<OrbitTable, OrbitError> {
        let table = orbit_decompose(&json.spec, json.q, cap)?;
        if json.orbits.len() != table.orbits.len() {
            return Err(OrbitError::Mismatch(format!(
                "{} orbits listed, {} found",
                json.orbits.len(),
                table.orbits.len()
            )));
        }
        for (i, o) in json.orbits.iter().enumerate() {
            let rep = matrix_from_json(&table.fq.ring, &o.rep)?;
            if rep != table.rep(i) || o.size != table.orbits[i].size || o.stratum != table.orbits[i].stratum {
                return Err(OrbitError::Mismatch(format!("orbit {i} differs")));
            }
        }
        Ok(table)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitJson {
    pub rep: MatrixJson,
    pub size: usize,
    pub stratum: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitTableJson {
    pub spec: GroupSpec,
    pub q: u64,
    pub orbits: Vec<OrbitJson>,
}
