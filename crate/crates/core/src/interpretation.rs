//! Rings interpreted inside linear groups.
//!
//! * [`RingEncoding`]: a ring A inside PSL_n(A), n ≥ 3, carried by the root
//!   group E_{1,n}(A). Addition is the group product; multiplication is the
//!   commutator of two conjugates of the operands by permutation matrices.
//! * [`Psl2Field`]: F_p inside PSL_2(F_p), carried by the centralizer of the
//!   unipotent `u = e_{1,2}(1)`, with multiplication recovered from torus
//!   conjugates of `u`.
//! * [`fiber_correspondence`]: two normal subgroups agree as soon as the
//!   quotient maps restricted to Φ² have the same fibers.

use crate::elementset::ElementSet;
use crate::error::{Error, Result};
use crate::matgroups::{elementary, enumerate, index_of_mat, perm_conjugator, psl_project, GroupTable, Mat, ProjMat};
use crate::rings::{is_prime, RingSpec};
use crate::scalar::Scalar;
use rustc_hash::FxHashMap;
use serde::Serialize;

/// An element of A, carried by its image `e_{1,n}(a)` in PSL_n(A).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EncodedRingElem<T: Scalar> {
    carrier: ProjMat<T>,
}

impl<T: Scalar> EncodedRingElem<T> {
    pub fn carrier(&self) -> &ProjMat<T> {
        &self.carrier
    }

    pub fn ring(&self) -> &RingSpec {
        self.carrier.ring()
    }

    pub fn n(&self) -> usize {
        self.carrier.n()
    }

    pub fn decode(&self) -> T {
        int_decode(&self.carrier).expect("carrier invariant")
    }
}

/// The interpretation of A in PSL_n(A) with its permutation conjugators
/// `p_{1,n-1}` and `p_{n-1,n}` fixed once.
#[derive(Clone, Debug)]
pub struct RingEncoding<T: Scalar> {
    ring: RingSpec,
    n: usize,
    p_left: ProjMat<T>,
    p_right: ProjMat<T>,
}

impl<T: Scalar> RingEncoding<T> {
    pub fn new(ring: &RingSpec, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid("the ring encoding needs n >= 3"));
        }
        Ok(RingEncoding {
            ring: ring.clone(),
            n,
            p_left: psl_project(&perm_conjugator(ring, n, 1, n - 1)?),
            p_right: psl_project(&perm_conjugator(ring, n, n - 1, n)?),
        })
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn encode(&self, a: &T) -> EncodedRingElem<T> {
        let e = elementary(&self.ring, self.n, 1, self.n, a).expect("1 != n");
        EncodedRingElem { carrier: psl_project(&e) }
    }

    /// Wraps a PSL element after checking that it lies in E_{1,n}.
    pub fn wrap(&self, x: ProjMat<T>) -> Result<EncodedRingElem<T>> {
        if x.n() != self.n || x.ring() != &self.ring {
            return Err(Error::RingMismatch);
        }
        int_decode(&x)?;
        Ok(EncodedRingElem { carrier: x })
    }

    fn check(&self, x: &EncodedRingElem<T>) -> Result<()> {
        if x.n() != self.n || x.ring() != &self.ring {
            return Err(Error::RingMismatch);
        }
        Ok(())
    }

    /// e_{1,n}(a) e_{1,n}(b) = e_{1,n}(a+b).
    pub fn add(&self, x: &EncodedRingElem<T>, y: &EncodedRingElem<T>) -> Result<EncodedRingElem<T>> {
        self.check(x)?;
        self.check(y)?;
        Ok(EncodedRingElem { carrier: x.carrier.mul(&y.carrier) })
    }

    /// [p_{1,n-1} e_{1,n}(a) p_{1,n-1}⁻¹, p_{n-1,n} e_{1,n}(b) p_{n-1,n}⁻¹]
    /// = e_{1,n}(ab), evaluated literally.
    pub fn mul(&self, x: &EncodedRingElem<T>, y: &EncodedRingElem<T>) -> Result<EncodedRingElem<T>> {
        self.check(x)?;
        self.check(y)?;
        let left = x.carrier.conj_by(&self.p_left);
        let right = y.carrier.conj_by(&self.p_right);
        let c = ProjMat::commutator(&left, &right);
        int_decode(&c).map_err(|_| Error::Invariant("commutator left E_1n".into()))?;
        Ok(EncodedRingElem { carrier: c })
    }
}

pub fn int_encode<T: Scalar>(ring: &RingSpec, n: usize, a: &T) -> Result<EncodedRingElem<T>> {
    Ok(RingEncoding::new(ring, n)?.encode(a))
}

/// Reads the (1,n) entry of the canonical representative, failing unless the
/// element is some `e_{1,n}(a)`.
pub fn int_decode<T: Scalar>(x: &ProjMat<T>) -> Result<T> {
    let m = x.rep();
    let n = m.n();
    for i in 0..n {
        for j in 0..n {
            let v = m.get(i, j);
            let ok = if i == j {
                v.is_one()
            } else if i == 0 && j == n - 1 {
                true
            } else {
                v.is_zero()
            };
            if !ok {
                return Err(Error::NotInCarrier);
            }
        }
    }
    Ok(m.get(0, n - 1).clone())
}

pub fn enc_add<T: Scalar>(x: &EncodedRingElem<T>, y: &EncodedRingElem<T>) -> Result<EncodedRingElem<T>> {
    RingEncoding::new(x.ring(), x.n())?.add(x, y)
}

pub fn enc_mul<T: Scalar>(x: &EncodedRingElem<T>, y: &EncodedRingElem<T>) -> Result<EncodedRingElem<T>> {
    RingEncoding::new(x.ring(), x.n())?.mul(x, y)
}

/// Over ℤ, `r | s` iff e_{1,n}(s) lies in the cyclic group generated by
/// e_{1,n}(r); decided as divisibility of the decoded values.
pub fn enc_divides<T: Scalar>(r: &EncodedRingElem<T>, s: &EncodedRingElem<T>) -> Result<bool> {
    if r.ring() != &RingSpec::Integers || s.ring() != &RingSpec::Integers {
        return Err(Error::Unsupported("divisibility encoding is defined over int".into()));
    }
    if r.n() != s.n() {
        return Err(Error::RingMismatch);
    }
    let (a, b) = (r.decode(), s.decode());
    Ok(if a.is_zero() { b.is_zero() } else { (b % a).is_zero() })
}

/// Which route produced a PSL_2 field product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FieldMulRoute {
    /// One of the factors is 0.
    Zero,
    /// Torus witnesses `s1, s2` with `(s1⁻¹ u s1)(s2⁻¹ u s2) = a`.
    Torus { s1: u32, s2: u32 },
    /// `a` has no witness pair; `a = a1 + a2` with both summands witnessed.
    Split { a1: u32, a2: u32 },
}

/// F_p interpreted in PSL_2(F_p), p ≥ 5 prime.
pub struct Psl2Field {
    p: u32,
    group: GroupTable,
    u: u32,
    carrier: Vec<u32>,
    value_of: FxHashMap<u32, u32>,
    torus: Vec<u32>,
    /// First witness pair, in scan order over T × T, for each carrier element.
    witness: FxHashMap<u32, (u32, u32)>,
}

impl Psl2Field {
    pub fn new(p: u32) -> Result<Self> {
        if p < 5 || !is_prime(p as u64) {
            return Err(Error::invalid(format!("PSL_2 field encoding needs a prime p >= 5, got {p}")));
        }
        let group = enumerate(&format!("psl:2:gf:{p}"))?;
        let ring = RingSpec::gf(p as u64)?;
        let at = |a: u32, b: u32, c: u32, d: u32| -> Result<u32> {
            let m = Mat::<i64>::new(&ring, 2, vec![a as i64, b as i64, c as i64, d as i64])?;
            index_of_mat(&group, &m).ok_or_else(|| Error::Invariant("matrix missing from PSL_2 table".into()))
        };
        let u = at(1, 1, 0, 1)?;
        let eps = 2u32;
        let eps_inv = ring.inv(&(eps as i64))? as u32;
        let t = at(eps, 0, 0, eps_inv)?;
        let carrier = (0..p).map(|x| at(1, x, 0, 1)).collect::<Result<Vec<_>>>()?;
        let cent_u = group.centralizer(&group.singleton(u));
        if cent_u != ElementSet::from_indices(group.order(), carrier.iter().copied()) {
            return Err(Error::Invariant("Cent(u) differs from the upper unitriangular group".into()));
        }
        let torus = group.centralizer(&group.singleton(t)).to_vec();
        let value_of = carrier.iter().enumerate().map(|(x, &i)| (i, x as u32)).collect();
        let mut witness = FxHashMap::default();
        for &s1 in &torus {
            let c1 = group.conj(group.inv(s1), u);
            for &s2 in &torus {
                let c2 = group.conj(group.inv(s2), u);
                witness.entry(group.mul(c1, c2)).or_insert((s1, s2));
            }
        }
        Ok(Psl2Field { p, group, u, carrier, value_of, torus, witness })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn group(&self) -> &GroupTable {
        &self.group
    }

    pub fn u(&self) -> u32 {
        self.u
    }

    /// U = Cent(u), indexed by field value.
    pub fn carrier(&self) -> &[u32] {
        &self.carrier
    }

    /// T = Cent(t) for `t = diag(2, 2⁻¹)`.
    pub fn torus(&self) -> &[u32] {
        &self.torus
    }

    pub fn encode(&self, x: u32) -> u32 {
        self.carrier[(x % self.p) as usize]
    }

    pub fn decode(&self, i: u32) -> Result<u32> {
        self.value_of.get(&i).copied().ok_or(Error::NotInCarrier)
    }

    pub fn add(&self, a: u32, b: u32) -> Result<u32> {
        self.decode(a)?;
        self.decode(b)?;
        Ok(self.group.mul(a, b))
    }

    fn apply_witness(&self, (s1, s2): (u32, u32), b: u32) -> u32 {
        let g = &self.group;
        g.mul(g.conj(g.inv(s1), b), g.conj(g.inv(s2), b))
    }

    pub fn witnesses(&self, a: u32) -> Option<(u32, u32)> {
        self.witness.get(&a).copied()
    }

    /// Product of two encoded field elements using only group operations.
    pub fn mul(&self, a: u32, b: u32) -> Result<(u32, FieldMulRoute)> {
        let (x, y) = (self.decode(a)?, self.decode(b)?);
        if x == 0 || y == 0 {
            return Ok((self.encode(0), FieldMulRoute::Zero));
        }
        if let Some(w) = self.witnesses(a) {
            return Ok((self.apply_witness(w, b), FieldMulRoute::Torus { s1: w.0, s2: w.1 }));
        }
        // a is not a sum of two torus conjugates of u; distribute over a split
        for &a1 in &self.carrier {
            let a2 = self.group.mul(self.group.inv(a1), a);
            if let (Some(w1), Some(w2)) = (self.witnesses(a1), self.witnesses(a2)) {
                let r = self.group.mul(self.apply_witness(w1, b), self.apply_witness(w2, b));
                return Ok((r, FieldMulRoute::Split { a1, a2 }));
            }
        }
        Err(Error::Invariant(format!("no torus witnesses for {x} in PSL_2(F_{})", self.p)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum FiberVerdict {
    Equal,
    /// `x, y ∈ Φ²` lie in the same coset of one subgroup but not the other.
    CounterexamplePair { x: u32, y: u32, same_mod_l: bool },
}

/// Labels each element by the least index of its left coset `gH`.
pub fn coset_labels(g: &GroupTable, h: &ElementSet) -> Vec<u32> {
    let hv = h.to_vec();
    let mut label = vec![u32::MAX; g.order()];
    for x in 0..g.order() as u32 {
        if label[x as usize] != u32::MAX {
            continue;
        }
        for &y in &hv {
            label[g.mul(x, y) as usize] = x;
        }
    }
    label
}

fn projects_onto(g: &GroupTable, phi: &ElementSet, h: &ElementSet) -> bool {
    let label = coset_labels(g, h);
    let hit: std::collections::HashSet<u32> = phi.iter().map(|x| label[x as usize]).collect();
    hit.len() * h.len() == g.order()
}

pub fn fiber_correspondence(g: &GroupTable, l: &ElementSet, m: &ElementSet, phi: &ElementSet) -> Result<FiberVerdict> {
    let pre = |ok: bool, what: &str| if ok { Ok(()) } else { Err(Error::precondition(what)) };
    pre(g.is_normal_subgroup(l), "L is not a normal subgroup")?;
    pre(g.is_normal_subgroup(m), "M is not a normal subgroup")?;
    pre(phi.contains(g.identity()), "Φ does not contain the identity")?;
    pre(g.is_symmetric(phi), "Φ is not symmetric")?;
    pre(g.generates(phi), "Φ does not generate G")?;
    pre(projects_onto(g, phi, l), "Φ does not project onto G/L")?;
    pre(projects_onto(g, phi, m), "Φ does not project onto G/M")?;

    let phi_v = phi.to_vec();
    let mut phi2 = g.empty_set();
    for &a in &phi_v {
        for &b in &phi_v {
            phi2.insert(g.mul(a, b));
        }
    }
    let lab_l = coset_labels(g, l);
    let lab_m = coset_labels(g, m);
    let mut by_l: FxHashMap<u32, u32> = FxHashMap::default();
    let mut by_m: FxHashMap<u32, u32> = FxHashMap::default();
    for x in phi2.iter() {
        let (cl, cm) = (lab_l[x as usize], lab_m[x as usize]);
        match by_l.get(&cl) {
            Some(&y) if lab_m[y as usize] != cm => return Ok(FiberVerdict::CounterexamplePair { x: y, y: x, same_mod_l: true }),
            Some(_) => {}
            None => {
                by_l.insert(cl, x);
            }
        }
        match by_m.get(&cm) {
            Some(&y) if lab_l[y as usize] != cl => return Ok(FiberVerdict::CounterexamplePair { x: y, y: x, same_mod_l: false }),
            Some(_) => {}
            None => {
                by_m.insert(cm, x);
            }
        }
    }
    if l != m {
        return Err(Error::Invariant("fibers coincide but L != M".into()));
    }
    Ok(FiberVerdict::Equal)
}

/// Adds coset representatives (with inverses) to `phi` until it projects onto
/// both G/L and G/M; also adds the identity and inverses of existing members.
pub fn extend_to_surjective(g: &GroupTable, l: &ElementSet, m: &ElementSet, phi: &ElementSet) -> ElementSet {
    let mut out = phi.union(&g.inverse_set(phi));
    out.insert(g.identity());
    for h in [l, m] {
        let label = coset_labels(g, h);
        let mut hit: std::collections::HashSet<u32> = out.iter().map(|x| label[x as usize]).collect();
        for x in 0..g.order() as u32 {
            if hit.insert(label[x as usize]) {
                out.insert(x);
                out.insert(g.inv(x));
                hit.insert(label[g.inv(x) as usize]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgroups::congruence_kernel;
    use crate::rings::IdealSpec;
    use num_bigint::BigInt;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn encode_decode_examples() {
        let int = RingSpec::Integers;
        let enc = RingEncoding::<BigInt>::new(&int, 3).unwrap();
        let zero = enc.encode(&big(0));
        assert!(zero.carrier().is_identity());
        assert_eq!(zero.decode(), big(0));
        let m5 = enc.encode(&big(-5));
        assert_eq!(m5.carrier().rep().get(0, 2), &big(-5));
        assert!(RingEncoding::<BigInt>::new(&int, 2).is_err());
    }

    #[test]
    fn decode_rejects_non_carrier() {
        let r = RingSpec::zmod(7).unwrap();
        let e = psl_project(&elementary::<i64>(&r, 3, 2, 1, &1).unwrap());
        assert_eq!(int_decode(&e), Err(Error::NotInCarrier));
        let enc = RingEncoding::<i64>::new(&r, 3).unwrap();
        assert!(enc.wrap(e).is_err());
    }

    #[test]
    fn add_and_mul_examples() {
        let int = RingSpec::Integers;
        let enc = RingEncoding::<BigInt>::new(&int, 3).unwrap();
        let (two, three) = (enc.encode(&big(2)), enc.encode(&big(3)));
        assert_eq!(enc.add(&two, &three).unwrap(), enc.encode(&big(5)));
        assert_eq!(enc.mul(&two, &three).unwrap(), enc.encode(&big(6)));
        let one = enc.encode(&big(1));
        assert_eq!(enc.mul(&one, &one).unwrap(), one);
        let a = enc.encode(&big(11));
        assert_eq!(enc.mul(&a, &enc.encode(&big(0))).unwrap(), enc.encode(&big(0)));
        assert_eq!(enc.add(&a, &enc.encode(&big(0))).unwrap(), a);

        let z7 = RingSpec::zmod(7).unwrap();
        let e7 = RingEncoding::<i64>::new(&z7, 3).unwrap();
        assert_eq!(e7.add(&e7.encode(&5), &e7.encode(&4)).unwrap().decode(), 2);
        assert_eq!(enc_add(&e7.encode(&5), &e7.encode(&4)).unwrap(), e7.encode(&2));
        assert_eq!(enc_mul(&e7.encode(&5), &e7.encode(&4)).unwrap(), e7.encode(&6));
    }

    #[test]
    fn mismatched_rings_rejected() {
        let a = int_encode::<i64>(&RingSpec::zmod(5).unwrap(), 3, &1).unwrap();
        let b = int_encode::<i64>(&RingSpec::zmod(7).unwrap(), 3, &1).unwrap();
        assert_eq!(enc_add(&a, &b), Err(Error::RingMismatch));
        let c = int_encode::<i64>(&RingSpec::zmod(5).unwrap(), 4, &1).unwrap();
        assert_eq!(enc_mul(&a, &c), Err(Error::RingMismatch));
    }

    #[test]
    fn commutator_formula_in_higher_dimension() {
        for n in 3..=5 {
            let enc = RingEncoding::<BigInt>::new(&RingSpec::Integers, n).unwrap();
            for (a, b) in [(2, 3), (-4, 7), (0, 9), (13, -13)] {
                let prod = enc.mul(&enc.encode(&big(a)), &enc.encode(&big(b))).unwrap();
                assert_eq!(prod.decode(), big(a * b), "n={n}");
            }
        }
    }

    #[test]
    fn divisibility_examples() {
        let enc = RingEncoding::<BigInt>::new(&RingSpec::Integers, 3).unwrap();
        let e = |v| enc.encode(&big(v));
        assert!(enc_divides(&e(3), &e(12)).unwrap());
        assert!(enc_divides(&e(0), &e(0)).unwrap());
        assert!(!enc_divides(&e(0), &e(5)).unwrap());
        assert!(!enc_divides(&e(4), &e(6)).unwrap());
        assert!(enc_divides(&e(-4), &e(8)).unwrap());
        let f = int_encode::<BigInt>(&RingSpec::zmod(5).unwrap(), 3, &big(1)).unwrap();
        assert!(enc_divides(&f, &f).is_err());
    }

    #[test]
    fn psl2_field_examples() {
        let f5 = Psl2Field::new(5).unwrap();
        let (prod, _) = f5.mul(f5.encode(2), f5.encode(3)).unwrap();
        assert_eq!(f5.decode(prod).unwrap(), 1);
        let f7 = Psl2Field::new(7).unwrap();
        assert_eq!(f7.carrier().len(), 7);
        for b in 0..7 {
            let (prod, _) = f7.mul(f7.encode(1), f7.encode(b)).unwrap();
            assert_eq!(f7.decode(prod).unwrap(), b);
        }
        assert!(Psl2Field::new(3).is_err());
        assert!(Psl2Field::new(9).is_err());
    }

    #[test]
    fn psl2_field_multiplication_table() {
        for p in [5u32, 7, 11, 13] {
            let f = Psl2Field::new(p).unwrap();
            for x in 0..p {
                for y in 0..p {
                    let (prod, route) = f.mul(f.encode(x), f.encode(y)).unwrap();
                    assert_eq!(f.decode(prod).unwrap(), x * y % p, "p={p} x={x} y={y} via {route:?}");
                }
                let sum = f.add(f.encode(x), f.encode(3)).unwrap();
                assert_eq!(f.decode(sum).unwrap(), (x + 3) % p);
            }
        }
    }

    #[test]
    fn mod_five_needs_the_split_route() {
        // nonzero sums of two nonzero squares mod 5 are {2, 3}
        let f = Psl2Field::new(5).unwrap();
        let direct: Vec<u32> = (1..5).filter(|&x| f.witnesses(f.encode(x)).is_some()).collect();
        assert_eq!(direct, vec![2, 3]);
        let (_, route) = f.mul(f.encode(1), f.encode(4)).unwrap();
        assert!(matches!(route, FieldMulRoute::Split { .. }));
    }

    #[test]
    fn fibres_equal_for_identical_subgroups() {
        let g = enumerate("sl:2:zmod:6").unwrap();
        let r = RingSpec::zmod(6).unwrap();
        let l = congruence_kernel(&g, &IdealSpec::new(&r, 2)).unwrap();
        let phi = extend_to_surjective(&g, &l, &l, &ElementSet::from_indices(g.order(), g.generators().iter().copied()));
        assert_eq!(fiber_correspondence(&g, &l, &l, &phi).unwrap(), FiberVerdict::Equal);
        let triv = g.singleton(0);
        assert_eq!(fiber_correspondence(&g, &triv, &triv, &g.all()).unwrap(), FiberVerdict::Equal);
    }

    #[test]
    fn fibres_differ_for_distinct_kernels() {
        let g = enumerate("sl:2:zmod:6").unwrap();
        let r = RingSpec::zmod(6).unwrap();
        let l = congruence_kernel(&g, &IdealSpec::new(&r, 2)).unwrap();
        let m = congruence_kernel(&g, &IdealSpec::new(&r, 3)).unwrap();
        let gens = ElementSet::from_indices(g.order(), g.generators().iter().copied());
        let phi = extend_to_surjective(&g, &l, &m, &gens);
        match fiber_correspondence(&g, &l, &m, &phi).unwrap() {
            FiberVerdict::CounterexamplePair { x, y, same_mod_l } => {
                let d = g.mul(g.inv(x), y);
                assert_eq!(l.contains(d), same_mod_l);
                assert_eq!(m.contains(d), !same_mod_l);
            }
            FiberVerdict::Equal => panic!("distinct kernels reported equal"),
        }
    }

    #[test]
    fn fibre_preconditions() {
        let g = enumerate("sl:2:gf:3").unwrap();
        let all = g.all();
        let one = g.singleton(0);
        // Φ = {1} does not generate
        assert!(matches!(fiber_correspondence(&g, &all, &all, &one), Err(Error::Precondition(_))));
        // a non-normal subgroup
        let h = g.subgroup_closure(&g.singleton(g.generators()[0]));
        assert!(matches!(fiber_correspondence(&g, &h, &all, &all), Err(Error::Precondition(_))));
    }
}
