//! Sumsets of adjoint orbits in sl_n(F_p), n ∈ {2, 3}.
//!
//! Every `S_k` is a union of Ad-orbits, so the iteration runs on orbit ids.
//! Orbits are labelled by a complete invariant: characteristic polynomial,
//! degree of the minimal polynomial, and for regular nilpotents the class of
//! `det[X^{n-1}v, …, Xv, v]` in F*/F*^n (the only GL-classes that split
//! into several SL-orbits when n ≤ 3 and p ∤ n).

use crate::error::{Error, Result};
use crate::rings::is_prime;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;
use serde::Serialize;
use std::fmt;
use std::sync::OnceLock;

const BITS: u32 = 6;
const MAX_P: u32 = 1 << BITS;
const SAMPLES: usize = 20_000;

/// A trace-zero n×n matrix over F_p.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LieAlgVec {
    n: usize,
    p: u32,
    entries: Vec<u32>,
}

impl LieAlgVec {
    pub fn new(n: usize, p: u32, entries: &[i64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::invalid(format!("expected {} entries, got {}", n * n, entries.len())));
        }
        let entries: Vec<u32> = entries.iter().map(|&e| e.rem_euclid(p as i64) as u32).collect();
        let tr = (0..n).map(|i| entries[i * n + i]).sum::<u32>() % p;
        if tr != 0 {
            return Err(Error::invalid("matrix does not have trace zero"));
        }
        Ok(LieAlgVec { n, p, entries })
    }

    pub fn from_rows(p: u32, rows: &[Vec<i64>]) -> Result<Self> {
        let flat: Vec<i64> = rows.iter().flatten().copied().collect();
        Self::new(rows.len(), p, &flat)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }
}

impl fmt::Display for LieAlgVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .entries
            .chunks(self.n)
            .map(|r| format!("[{}]", r.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

type M = [u32; 9];

#[derive(Clone, Debug, Serialize)]
pub struct OrbitClass {
    pub key: u32,
    #[serde(skip)]
    rep: M,
}

/// sl_n(F_p) with its orbit universe.
pub struct AdjointSpace {
    n: usize,
    p: u32,
    inv: Vec<u32>,
    /// exponent sending F* onto F*/F*^n
    label_exp: u32,
    orbits: Vec<OrbitClass>,
    id_of: Vec<u32>,
    cache: Vec<OnceLock<Vec<u64>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SaturationOutcome {
    /// `S_k` is the whole space.
    Full { k: usize },
    /// The chain stopped growing at `S_k` below the whole space.
    Stalled { k: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct Saturation {
    pub n: usize,
    pub p: u32,
    pub x: String,
    /// Size of the orbit of X when it was enumerated.
    pub orbit_size: Option<usize>,
    /// Number of orbits in `S_1, S_2, …`.
    pub chain: Vec<usize>,
    pub total_orbits: usize,
    pub outcome: SaturationOutcome,
    /// `4·(n²−1)`, reported for comparison only.
    pub reference_bound: usize,
}

impl Saturation {
    pub fn k(&self) -> Option<usize> {
        match self.outcome {
            SaturationOutcome::Full { k } => Some(k),
            SaturationOutcome::Stalled { .. } => None,
        }
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

impl AdjointSpace {
    pub fn new(n: usize, p: u32) -> Result<Self> {
        if !(2..=3).contains(&n) {
            return Err(Error::Unsupported(format!("adjoint orbits are classified for n in {{2,3}}, got {n}")));
        }
        if !is_prime(p as u64) || p >= MAX_P {
            return Err(Error::Unsupported(format!("p must be a prime below {MAX_P}, got {p}")));
        }
        if p as usize % n == 0 {
            return Err(Error::precondition(format!("p = {p} divides n = {n}")));
        }
        let mut inv = vec![0u32; p as usize];
        for a in 1..p {
            inv[a as usize] = pow_mod(a as u64, p as u64 - 2, p as u64) as u32;
        }
        let d = num_integer::gcd(n as u32, p - 1);
        let mut space = AdjointSpace { n, p, inv, label_exp: (p - 1) / d, orbits: Vec::new(), id_of: vec![u32::MAX; 1 << 20], cache: Vec::new() };
        for rep in space.universe_reps(d) {
            let key = space.key(&rep);
            if space.id_of[key as usize] != u32::MAX {
                return Err(Error::Invariant(format!("two orbit representatives share key {key}")));
            }
            space.id_of[key as usize] = space.orbits.len() as u32;
            space.orbits.push(OrbitClass { key, rep });
        }
        space.cache = (0..space.orbits.len()).map(|_| OnceLock::new()).collect();
        Ok(space)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn orbit_count(&self) -> usize {
        self.orbits.len()
    }

    pub fn orbit_rep(&self, id: usize) -> LieAlgVec {
        let n = self.n;
        let e: Vec<i64> = (0..n * n).map(|k| self.orbits[id].rep[k] as i64).collect();
        LieAlgVec::new(n, self.p, &e).expect("trace-zero representative")
    }

    /// Representatives of every SL_n-orbit, via rational canonical forms.
    fn universe_reps(&self, d: u32) -> Vec<M> {
        let (n, p) = (self.n, self.p);
        let neg = |a: u32| (p - a) % p;
        // coset representatives of F*/F*^n
        let mut labels = Vec::new();
        let mut seen = FxHashSet::default();
        for l in 1..p {
            if seen.insert(pow_mod(l as u64, self.label_exp as u64, p as u64)) {
                labels.push(l);
            }
        }
        debug_assert_eq!(labels.len() as u32, d);
        let mut reps = Vec::new();
        let mut zero = [0u32; 9];
        if n == 2 {
            reps.push(zero);
            for c in 1..p {
                // companion matrix of t² + c
                let mut m = zero;
                m[1] = neg(c);
                m[2] = 1;
                reps.push(m);
            }
            for &l in &labels {
                let mut m = zero;
                m[1] = l;
                reps.push(m);
            }
        } else {
            reps.push(zero);
            for c1 in 0..p {
                for c0 in 0..p {
                    if c1 == 0 && c0 == 0 {
                        continue;
                    }
                    // companion matrix of t³ + c1·t − c0 (det = c0)
                    let mut m = zero;
                    m[3] = 1;
                    m[7] = 1;
                    m[2] = c0;
                    m[5] = neg(c1);
                    reps.push(m);
                }
            }
            for a in 1..p {
                // diag(a, a, −2a)
                let mut m = zero;
                m[0] = a;
                m[4] = a;
                m[8] = neg(2 * a % p);
                reps.push(m);
            }
            zero[2] = 1;
            reps.push(zero);
            for &l in &labels {
                let mut m = [0u32; 9];
                m[1] = l;
                m[5] = 1;
                reps.push(m);
            }
        }
        reps
    }

    #[inline]
    fn at(&self, m: &M, i: usize, j: usize) -> u64 {
        m[i * self.n + j] as u64
    }

    fn det(&self, m: &M) -> u32 {
        let p = self.p as u64;
        let a = |i, j| self.at(m, i, j);
        let v = if self.n == 2 {
            a(0, 0) * a(1, 1) + (p - a(0, 1)) * a(1, 0)
        } else {
            let t1 = a(0, 0) * ((a(1, 1) * a(2, 2) + p * p - a(1, 2) * a(2, 1)) % p);
            let t2 = a(0, 1) * ((a(1, 0) * a(2, 2) + p * p - a(1, 2) * a(2, 0)) % p);
            let t3 = a(0, 2) * ((a(1, 0) * a(2, 1) + p * p - a(1, 1) * a(2, 0)) % p);
            t1 + (p - t2 % p) + t3
        };
        (v % p) as u32
    }

    fn mat_mul(&self, a: &M, b: &M) -> M {
        let (n, p) = (self.n, self.p as u64);
        let mut c = [0u32; 9];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0u64;
                for k in 0..n {
                    s += a[i * n + k] as u64 * b[k * n + j] as u64;
                }
                c[i * n + j] = (s % p) as u32;
            }
        }
        c
    }

    fn mat_vec(&self, a: &M, v: &[u32; 3]) -> [u32; 3] {
        let (n, p) = (self.n, self.p as u64);
        let mut out = [0u32; 3];
        for i in 0..n {
            out[i] = ((0..n).map(|k| a[i * n + k] as u64 * v[k] as u64).sum::<u64>() % p) as u32;
        }
        out
    }

    /// Degree of the minimal polynomial of a nonzero matrix (1, 2 or 3).
    fn min_poly_degree(&self, m: &M) -> u32 {
        let n = self.n;
        let p = self.p as u64;
        let off = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| i != j && m[i * n + j] != 0);
        let scalar_diag = (1..n).all(|i| m[i * n + i] == m[0]);
        if off.is_none() && scalar_diag {
            return 1;
        }
        if n == 2 {
            return 2;
        }
        let sq = self.mat_mul(m, m);
        // solve X² = αX + βI from one informative coordinate, then check
        let alpha = match off {
            Some((i, j)) => sq[i * n + j] as u64 * self.inv[m[i * n + j] as usize] as u64 % p,
            None => {
                let (i, j) = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| m[i * n + i] != m[j * n + j]).unwrap();
                let num = (sq[i * n + i] as u64 + p - sq[j * n + j] as u64) % p;
                let den = (m[i * n + i] as u64 + p - m[j * n + j] as u64) % p;
                num * self.inv[den as usize] as u64 % p
            }
        };
        let beta = (sq[0] as u64 + p * p - alpha * m[0] as u64) % p;
        let ok = (0..n * n).all(|k| {
            let id = if k % (n + 1) == 0 { beta } else { 0 };
            (alpha * m[k] as u64 + id) % p == sq[k] as u64
        });
        if ok {
            2
        } else {
            3
        }
    }

    /// The orbit invariant, packed into 20 bits.
    pub(crate) fn key(&self, m: &M) -> u32 {
        let (n, p) = (self.n, self.p);
        if m[..n * n].iter().all(|&e| e == 0) {
            return 1 << 12;
        }
        let det = self.det(m);
        let c1 = if n == 2 {
            0
        } else {
            let pm = |i: usize, j: usize| {
                let (a, b, c, d) = (m[i * 3 + i] as u64, m[i * 3 + j] as u64, m[j * 3 + i] as u64, m[j * 3 + j] as u64);
                (a * d + p as u64 * p as u64 - b * c) % p as u64
            };
            ((pm(0, 1) + pm(0, 2) + pm(1, 2)) % p as u64) as u32
        };
        let deg = self.min_poly_degree(m);
        let mut label = 0;
        if deg as usize == n && c1 == 0 && det == 0 {
            // regular nilpotent: v with X^{n-1}v ≠ 0
            for j in 0..n {
                let mut v = [0u32; 3];
                v[j] = 1;
                let mut cols = vec![v];
                for _ in 1..n {
                    let w = self.mat_vec(m, cols.last().unwrap());
                    cols.push(w);
                }
                if cols[n - 1][..n].iter().any(|&e| e != 0) {
                    // basis matrix with columns X^{n-1}v, …, Xv, v
                    let mut b = [0u32; 9];
                    for (c, col) in cols.iter().rev().enumerate() {
                        for r in 0..n {
                            b[r * n + c] = col[r];
                        }
                    }
                    label = pow_mod(self.det(&b) as u64, self.label_exp as u64, p as u64) as u32;
                    break;
                }
            }
        }
        c1 | det << BITS | deg << 12 | label << 14
    }

    fn orbit_id(&self, m: &M) -> usize {
        let id = self.id_of[self.key(m) as usize];
        debug_assert!(id != u32::MAX, "unclassified matrix {m:?}");
        id as usize
    }

    fn pack(&self, m: &M) -> u64 {
        m[..self.n * self.n].iter().enumerate().fold(0u64, |acc, (k, &e)| acc | (e as u64) << (BITS as usize * k))
    }

    fn unpack(&self, x: u64) -> M {
        let mut m = [0u32; 9];
        for (k, e) in m[..self.n * self.n].iter_mut().enumerate() {
            *e = ((x >> (BITS as usize * k)) & (MAX_P as u64 - 1)) as u32;
        }
        m
    }

    /// `e_{ij}(1) · X · e_{ij}(-1)`: row i += row j, then column j −= column i.
    fn conj_elementary(&self, m: &M, i: usize, j: usize) -> M {
        let (n, p) = (self.n, self.p);
        let mut r = *m;
        for c in 0..n {
            r[i * n + c] = (r[i * n + c] + r[j * n + c]) % p;
        }
        for row in 0..n {
            r[row * n + j] = (r[row * n + j] + p - r[row * n + i]) % p;
        }
        r
    }

    /// The SL_n-orbit of `x` by breadth-first search under elementary
    /// conjugations.
    pub(crate) fn orbit(&self, x: &M) -> Vec<u64> {
        let n = self.n;
        let start = self.pack(x);
        let mut seen = FxHashSet::default();
        seen.insert(start);
        let mut list = vec![start];
        let mut head = 0;
        while head < list.len() {
            let m = self.unpack(list[head]);
            head += 1;
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let y = self.pack(&self.conj_elementary(&m, i, j));
                    if seen.insert(y) {
                        list.push(y);
                    }
                }
            }
        }
        list
    }

    fn sub(&self, a: &M, b: &M) -> M {
        let p = self.p;
        let mut c = [0u32; 9];
        for k in 0..self.n * self.n {
            c[k] = (a[k] + p - b[k]) % p;
        }
        c
    }

    #[cfg(test)]
    fn add(&self, a: &M, b: &M) -> M {
        let mut c = [0u32; 9];
        for k in 0..self.n * self.n {
            c[k] = (a[k] + b[k]) % self.p;
        }
        c
    }

    fn scale(&self, a: &M, l: u32) -> M {
        let mut c = [0u32; 9];
        for k in 0..self.n * self.n {
            c[k] = (a[k] as u64 * l as u64 % self.p as u64) as u32;
        }
        c
    }

    fn to_m(&self, x: &LieAlgVec) -> Result<M> {
        if x.n != self.n || x.p != self.p {
            return Err(Error::invalid("vector lives in a different Lie algebra"));
        }
        let mut m = [0u32; 9];
        m[..self.n * self.n].copy_from_slice(&x.entries);
        Ok(m)
    }

    /// Orbit id of a vector.
    pub fn classify(&self, x: &LieAlgVec) -> Result<usize> {
        Ok(self.orbit_id(&self.to_m(x)?))
    }

    fn is_small(&self, id: usize) -> bool {
        // derogatory classes (and everything for n = 2) have orbits of size O(p^4)
        self.n == 2 || ((self.orbits[id].key >> 12) & 3) < self.n as u32
    }

    fn orbit_list(&self, id: usize) -> &[u64] {
        self.cache[id].get_or_init(|| self.orbit(&self.orbits[id].rep))
    }

    fn adjugate(&self, g: &M) -> M {
        let (n, p) = (self.n, self.p as u64);
        let mut r = [0u32; 9];
        if n == 2 {
            r[0] = g[3];
            r[1] = ((p - g[1] as u64) % p) as u32;
            r[2] = ((p - g[2] as u64) % p) as u32;
            r[3] = g[0];
            return r;
        }
        for i in 0..3 {
            for j in 0..3 {
                // cofactor C_{ji} lands at (i, j)
                let (r0, r1) = ([1, 0, 0][j], [2, 2, 1][j]);
                let (c0, c1) = ([1, 0, 0][i], [2, 2, 1][i]);
                let minor = (g[r0 * 3 + c0] as u64 * g[r1 * 3 + c1] as u64 + p * p - g[r0 * 3 + c1] as u64 * g[r1 * 3 + c0] as u64) % p;
                r[i * 3 + j] = if (i + j) % 2 == 0 { minor } else { (p - minor) % p } as u32;
            }
        }
        r
    }

    /// `gXg⁻¹` for a uniformly random `g ∈ SL_n(F_p)`.
    fn random_conj(&self, rng: &mut ChaCha8Rng, x: &M) -> M {
        let (n, p) = (self.n, self.p);
        loop {
            let mut g = [0u32; 9];
            for e in g[..n * n].iter_mut() {
                *e = rng.gen_range(0..p);
            }
            let d = self.det(&g);
            if d == 0 {
                continue;
            }
            let di = self.inv[d as usize] as u64;
            for e in g[..n].iter_mut() {
                *e = (*e as u64 * di % p as u64) as u32;
            }
            return self.mat_mul(&self.mat_mul(&g, x), &self.adjugate(&g));
        }
    }

    /// Whether orbit `id` meets `S + O_X` for an Ad-invariant `S` given by
    /// `inside`. Uses `Y − hXh⁻¹ ∈ S ⇔ h⁻¹Yh − X ∈ S` to scan the smaller
    /// orbit; two large orbits are probed by random conjugates first.
    fn reachable(&self, id: usize, xm: &M, x_id: usize, inside: &[bool], rng: &mut ChaCha8Rng, big: &mut Option<Vec<u64>>) -> bool {
        let hit = |d: &M| inside[self.orbit_id(d)];
        let rep = &self.orbits[id].rep;
        let (y_small, x_small) = (self.is_small(id), self.is_small(x_id));
        if y_small && (!x_small || self.orbit_list(id).len() <= self.orbit_list(x_id).len()) {
            return self.orbit_list(id).iter().any(|&y| hit(&self.sub(&self.unpack(y), xm)));
        }
        if x_small {
            return self.orbit_list(x_id).iter().any(|&o| hit(&self.sub(rep, &self.unpack(o))));
        }
        for _ in 0..SAMPLES {
            if hit(&self.sub(rep, &self.random_conj(rng, xm))) {
                return true;
            }
        }
        let list = big.get_or_insert_with(|| self.orbit(xm));
        list.iter().any(|&o| hit(&self.sub(rep, &self.unpack(o))))
    }

    /// Runs `S_1 = O`, `S_{m+1} = S_m ∪ (S_m + O)` on orbit ids. Random
    /// probing only affects running time; every verdict is exact.
    pub fn saturate(&self, x: &LieAlgVec) -> Result<Saturation> {
        if x.is_zero() {
            return Err(Error::invalid("X must be nonzero"));
        }
        let xm = self.to_m(x)?;
        let x_id = self.orbit_id(&xm);
        let mut rng = ChaCha8Rng::seed_from_u64(self.pack(&xm) ^ (self.p as u64) << 56);
        let mut big = None;
        let total = self.orbits.len();
        let mut inside = vec![false; total];
        inside[x_id] = true;
        let mut chain = vec![1];
        let outcome = loop {
            let k = chain.len();
            if chain[k - 1] == total {
                break SaturationOutcome::Full { k };
            }
            if k >= 2 && chain[k - 1] == chain[k - 2] {
                break SaturationOutcome::Stalled { k: k - 1 };
            }
            let mut next = inside.clone();
            for id in 0..total {
                if !inside[id] {
                    next[id] = self.reachable(id, &xm, x_id, &inside, &mut rng, &mut big);
                }
            }
            if inside.iter().zip(&next).any(|(a, b)| *a && !*b) {
                return Err(Error::Invariant("sumset chain is not monotone".into()));
            }
            inside = next;
            chain.push(inside.iter().filter(|&&b| b).count());
        };
        let orbit_size = if self.is_small(x_id) { Some(self.orbit_list(x_id).len()) } else { big.map(|b| b.len()) };
        Ok(Saturation {
            n: self.n,
            p: self.p,
            x: x.to_string(),
            orbit_size,
            chain,
            total_orbits: total,
            outcome,
            reference_bound: 4 * (self.n * self.n - 1),
        })
    }

    /// Saturation data for every nonzero orbit. Orbits related by a scalar
    /// λ ∈ F* share their data (`S_k(λX) = λ·S_k(X)`), so only one per
    /// scalar class is computed.
    pub fn saturate_all(&self) -> Result<Vec<Saturation>> {
        let mut out: Vec<Option<Saturation>> = vec![None; self.orbits.len()];
        for id in 0..self.orbits.len() {
            let rep = self.orbits[id].rep;
            if out[id].is_some() || rep.iter().all(|&e| e == 0) {
                continue;
            }
            let sat = self.saturate(&self.orbit_rep(id))?;
            for l in 1..self.p {
                let other = self.orbit_id(&self.scale(&rep, l));
                if out[other].is_none() {
                    let mut s = sat.clone();
                    s.x = self.orbit_rep(other).to_string();
                    out[other] = Some(s);
                }
            }
        }
        Ok(out.into_iter().flatten().collect())
    }
}

pub fn adjoint_saturation(n: usize, p: u32, x: &LieAlgVec) -> Result<Saturation> {
    AdjointSpace::new(n, p)?.saturate(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive orbit partition of sl_n(F_p) by BFS over every vector.
    fn exhaustive_orbits(sp: &AdjointSpace) -> Vec<u32> {
        let (n, p) = (sp.n, sp.p as usize);
        let dim = n * n;
        let index = |m: &M| m[..dim].iter().rev().fold(0usize, |acc, &e| acc * p + e as usize);
        let mut label = vec![u32::MAX; p.pow(dim as u32)];
        let mut next = 0;
        for start in 0..label.len() {
            let mut m = [0u32; 9];
            let mut r = start;
            for e in m[..dim].iter_mut() {
                *e = (r % p) as u32;
                r /= p;
            }
            if (0..n).map(|i| m[i * n + i]).sum::<u32>() % sp.p != 0 || label[start] != u32::MAX {
                continue;
            }
            for v in sp.orbit(&m) {
                label[index(&sp.unpack(v))] = next;
            }
            next += 1;
        }
        label
    }

    fn check_invariant_is_complete(n: usize, p: u32) {
        let sp = AdjointSpace::new(n, p).unwrap();
        let label = exhaustive_orbits(&sp);
        let dim = n * n;
        let mut key_of_orbit = std::collections::HashMap::new();
        let mut orbit_of_key = std::collections::HashMap::new();
        for (idx, &l) in label.iter().enumerate() {
            if l == u32::MAX {
                continue;
            }
            let mut m = [0u32; 9];
            let mut r = idx;
            for e in m[..dim].iter_mut() {
                *e = (r % p as usize) as u32;
                r /= p as usize;
            }
            let k = sp.key(&m);
            assert_eq!(*key_of_orbit.entry(l).or_insert(k), k, "key varies on an orbit");
            assert_eq!(*orbit_of_key.entry(k).or_insert(l), l, "key merges two orbits");
        }
        assert_eq!(key_of_orbit.len(), sp.orbit_count(), "n={n} p={p}");
    }

    #[test]
    fn invariant_classifies_orbits_n2() {
        for p in [3, 5, 7, 11, 13] {
            check_invariant_is_complete(2, p);
        }
    }

    #[test]
    fn invariant_classifies_orbits_n3() {
        for p in [2, 5, 7] {
            check_invariant_is_complete(3, p);
        }
    }

    /// Direct sumset iteration over all vectors.
    fn naive_k(sp: &AdjointSpace, x: &M) -> Option<usize> {
        let orbit: Vec<u64> = sp.orbit(x);
        let full = (sp.p as usize).pow((sp.n * sp.n - 1) as u32);
        let mut s: FxHashSet<u64> = orbit.iter().copied().collect();
        let mut k = 1;
        while s.len() < full {
            let mut next = s.clone();
            for &a in &s {
                for &o in &orbit {
                    next.insert(sp.pack(&sp.add(&sp.unpack(a), &sp.unpack(o))));
                }
            }
            if next.len() == s.len() {
                return None;
            }
            s = next;
            k += 1;
        }
        Some(k)
    }

    #[test]
    fn saturation_matches_naive_sumsets() {
        for (n, p) in [(2, 5), (2, 7), (3, 2)] {
            let sp = AdjointSpace::new(n, p).unwrap();
            for id in 0..sp.orbit_count() {
                let x = sp.orbit_rep(id);
                if x.is_zero() {
                    continue;
                }
                let got = sp.saturate(&x).unwrap();
                assert_eq!(got.k(), naive_k(&sp, &sp.to_m(&x).unwrap()), "n={n} p={p} x={x}");
            }
        }
    }

    /// Chain lengths by exhaustive scans of the full orbit of X.
    fn exhaustive_chain(sp: &AdjointSpace, x: &M) -> Vec<usize> {
        let orbit: Vec<M> = sp.orbit(x).into_iter().map(|v| sp.unpack(v)).collect();
        let mut inside = vec![false; sp.orbit_count()];
        inside[sp.orbit_id(x)] = true;
        for o in &orbit {
            inside[sp.orbit_id(&sp.add(x, o))] = true;
        }
        let mut chain = vec![1, inside.iter().filter(|&&b| b).count()];
        while chain[chain.len() - 1] < sp.orbit_count() && chain[chain.len() - 1] > chain[chain.len() - 2] {
            let next: Vec<bool> = (0..sp.orbit_count())
                .map(|id| inside[id] || orbit.iter().any(|o| inside[sp.orbit_id(&sp.sub(&sp.orbits[id].rep, o))]))
                .collect();
            inside = next;
            chain.push(inside.iter().filter(|&&b| b).count());
        }
        chain
    }

    #[test]
    fn probing_agrees_with_exhaustive_scans() {
        for p in [5, 7] {
            let sp = AdjointSpace::new(3, p).unwrap();
            for id in 0..sp.orbit_count() {
                let x = sp.orbit_rep(id);
                if !x.is_zero() {
                    assert_eq!(sp.saturate(&x).unwrap().chain, exhaustive_chain(&sp, &sp.orbits[id].rep), "p={p} x={x}");
                }
            }
        }
    }

    #[test]
    fn nilpotent_example_and_errors() {
        let x = LieAlgVec::from_rows(5, &[vec![0, 1], vec![0, 0]]).unwrap();
        let sat = adjoint_saturation(2, 5, &x).unwrap();
        assert!(matches!(sat.outcome, SaturationOutcome::Full { .. }));
        assert!(sat.chain.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(sat.orbit_size, Some(12));
        let zero = LieAlgVec::new(2, 5, &[0, 0, 0, 0]).unwrap();
        assert!(adjoint_saturation(2, 5, &zero).is_err());
        assert!(matches!(AdjointSpace::new(3, 3), Err(Error::Precondition(_))));
        assert!(LieAlgVec::new(2, 5, &[1, 0, 0, 1]).is_err());
    }

    #[test]
    fn scalar_classes_share_results() {
        let sp = AdjointSpace::new(3, 5).unwrap();
        let all = sp.saturate_all().unwrap();
        assert_eq!(all.len(), sp.orbit_count() - 1);
        for s in &all {
            let x = sp.orbit_rep(sp.orbit_id(&{
                let rows = crate::matgroups::parse_int_rows(&s.x).unwrap();
                sp.to_m(&LieAlgVec::from_rows(5, &rows).unwrap()).unwrap()
            }));
            assert_eq!(sp.saturate(&x).unwrap().chain, s.chain);
        }
    }
}
