//! Exact arithmetic in the integers and in the residue rings ℤ/m.
//!
//! Every ring in scope is a principal ideal ring, so ideals are carried as a
//! single canonical generator.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RingSpec {
    Integers,
    ModM {
        modulus: u64,
        /// Prime factorization `(p, e)` with `p` increasing.
        factors: Vec<(u64, u32)>,
    },
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

impl RingSpec {
    pub fn integers() -> Self {
        RingSpec::Integers
    }

    pub fn zmod(m: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::invalid(format!("modulus {m} < 2")));
        }
        Ok(RingSpec::ModM { modulus: m, factors: factorize(m) })
    }

    pub fn gf(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::invalid(format!("gf:{p} requires a prime, {p} is composite")));
        }
        Self::zmod(p)
    }

    pub fn modulus(&self) -> Option<u64> {
        match self {
            RingSpec::Integers => None,
            RingSpec::ModM { modulus, .. } => Some(*modulus),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.modulus().is_some()
    }

    pub fn is_field(&self) -> bool {
        matches!(self, RingSpec::ModM { factors, .. } if factors.len() == 1 && factors[0].1 == 1)
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        match self {
            RingSpec::Integers => &[],
            RingSpec::ModM { factors, .. } => factors,
        }
    }

    /// Canonical form: the residue in `[0, m)` for ℤ/m, the value itself for ℤ.
    pub fn reduce<T: Scalar>(&self, a: &T) -> T {
        match self {
            RingSpec::Integers => a.clone(),
            RingSpec::ModM { modulus, .. } => a.mod_floor(&T::from_u64_lossless(*modulus)),
        }
    }

    pub fn is_canonical<T: Scalar>(&self, a: &T) -> bool {
        self.reduce(a) == *a
    }

    pub fn zero<T: Scalar>(&self) -> T {
        T::zero()
    }

    pub fn one<T: Scalar>(&self) -> T {
        // ℤ/m with m ≥ 2, so 1 is canonical
        T::one()
    }

    pub fn add<T: Scalar>(&self, a: &T, b: &T) -> T {
        self.reduce(&(a.clone() + b.clone()))
    }

    pub fn sub<T: Scalar>(&self, a: &T, b: &T) -> T {
        self.reduce(&(a.clone() - b.clone()))
    }

    pub fn mul<T: Scalar>(&self, a: &T, b: &T) -> T {
        self.reduce(&(a.clone() * b.clone()))
    }

    pub fn neg<T: Scalar>(&self, a: &T) -> T {
        self.reduce(&(-a.clone()))
    }

    pub fn is_unit<T: Scalar>(&self, a: &T) -> bool {
        match self {
            RingSpec::Integers => a.abs().is_one(),
            RingSpec::ModM { modulus, .. } => {
                a.gcd(&T::from_u64_lossless(*modulus)).is_one()
            }
        }
    }

    pub fn inv<T: Scalar>(&self, a: &T) -> Result<T> {
        match self {
            RingSpec::Integers => {
                if a.abs().is_one() {
                    Ok(a.clone())
                } else {
                    Err(Error::NotAUnit(format!("{a} in int")))
                }
            }
            RingSpec::ModM { modulus, .. } => {
                let m = T::from_u64_lossless(*modulus);
                let g = a.extended_gcd(&m);
                if !g.gcd.is_one() {
                    return Err(Error::NotAUnit(format!("{a} in zmod:{modulus}")));
                }
                Ok(self.reduce(&g.x))
            }
        }
    }

    pub fn pow<T: Scalar>(&self, a: &T, mut e: u64) -> T {
        let mut base = self.reduce(a);
        let mut acc = T::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        self.reduce(&acc)
    }

    /// Units λ with λ^n = 1, in increasing canonical order.
    pub fn roots_of_unity<T: Scalar>(&self, n: usize) -> Vec<T> {
        match self {
            RingSpec::Integers => {
                if n % 2 == 0 {
                    vec![T::one(), -T::one()]
                } else {
                    vec![T::one()]
                }
            }
            RingSpec::ModM { modulus, .. } => (1..*modulus)
                .map(T::from_u64_lossless)
                .filter(|l| self.is_unit(l) && self.pow(l, n as u64).is_one())
                .collect(),
        }
    }

    /// Total order on canonical elements used for lexicographic matrix
    /// comparison. Residues compare numerically; integers in the order
    /// 0, 1, -1, 2, -2, ...
    pub fn cmp_canonical<T: Scalar>(&self, a: &T, b: &T) -> Ordering {
        match self {
            RingSpec::ModM { .. } => a.cmp(b),
            RingSpec::Integers => {
                let key = |v: &T| (v.abs(), v.is_negative());
                key(a).cmp(&key(b))
            }
        }
    }

    /// All canonical elements of a finite ring.
    pub fn elements(&self) -> Result<Vec<u64>> {
        match self {
            RingSpec::Integers => Err(Error::Unsupported("the integers are infinite".into())),
            RingSpec::ModM { modulus, .. } => Ok((0..*modulus).collect()),
        }
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::Integers => write!(f, "int"),
            RingSpec::ModM { modulus, .. } if self.is_field() => write!(f, "gf:{modulus}"),
            RingSpec::ModM { modulus, .. } => write!(f, "zmod:{modulus}"),
        }
    }
}

impl FromStr for RingSpec {
    type Err = Error;

    /// Grammar: `int | zmod:<m> | gf:<p>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "int" {
            return Ok(RingSpec::Integers);
        }
        let (scheme, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::syntax(0, format!("expected `int`, `zmod:<m>` or `gf:<p>`, got `{s}`")))?;
        let value: u64 = rest
            .parse()
            .map_err(|_| Error::syntax(scheme.len() + 1, format!("expected a positive integer, got `{rest}`")))?;
        match scheme {
            "zmod" => RingSpec::zmod(value),
            "gf" => RingSpec::gf(value),
            other => Err(Error::syntax(0, format!("unknown ring scheme `{other}`"))),
        }
    }
}

/// Parses a ring spec; see the grammar on [`RingSpec::from_str`].
pub fn ring_make(text: &str) -> Result<RingSpec> {
    text.parse()
}

/// An element of a ring, stored with arbitrary precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RingElem(pub BigInt);

impl RingElem {
    pub fn new(ring: &RingSpec, v: impl Into<BigInt>) -> Self {
        RingElem(ring.reduce(&v.into()))
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Mul,
    Neg,
    Inv,
}

pub fn ring_arith(r: &RingSpec, op: RingOp, a: &RingElem, b: Option<&RingElem>) -> Result<RingElem> {
    for x in std::iter::once(a).chain(b) {
        if !r.is_canonical(&x.0) {
            return Err(Error::invalid(format!("{} is not canonical in {r}", x.0)));
        }
    }
    let rhs = || b.ok_or_else(|| Error::invalid("binary operation needs two operands"));
    let v = match op {
        RingOp::Add => r.add(&a.0, &rhs()?.0),
        RingOp::Mul => r.mul(&a.0, &rhs()?.0),
        RingOp::Neg => r.neg(&a.0),
        RingOp::Inv => r.inv(&a.0)?,
    };
    Ok(RingElem(v))
}

/// A principal ideal `(g)`. In ℤ/m the generator is normalized to
/// `gcd(g, m)`, with `m` itself written as 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IdealSpec {
    pub generator: RingElem,
}

impl IdealSpec {
    pub fn new(ring: &RingSpec, g: impl Into<BigInt>) -> Self {
        let g: BigInt = g.into();
        let gen = match ring {
            RingSpec::Integers => g.abs(),
            RingSpec::ModM { modulus, .. } => {
                let d = g.gcd(&BigInt::from(*modulus));
                if d == BigInt::from(*modulus) {
                    BigInt::zero()
                } else {
                    d
                }
            }
        };
        IdealSpec { generator: RingElem(gen) }
    }

    pub fn zero() -> Self {
        IdealSpec { generator: RingElem(BigInt::zero()) }
    }

    /// Modulus of the quotient ring; 0 stands for the quotient by (0) of ℤ.
    pub fn quotient_modulus(&self, ring: &RingSpec) -> u64 {
        let g: u64 = num_traits::ToPrimitive::to_u64(&self.generator.0).unwrap_or(0);
        match ring {
            RingSpec::ModM { modulus, .. } if g == 0 => *modulus,
            _ => g,
        }
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.generator.0.is_one()
    }

    pub fn is_maximal(&self, ring: &RingSpec) -> bool {
        match ring {
            RingSpec::Integers => num_traits::ToPrimitive::to_u64(&self.generator.0).is_some_and(is_prime),
            RingSpec::ModM { .. } => is_prime(self.quotient_modulus(ring)),
        }
    }
}

impl fmt::Display for IdealSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.generator)
    }
}

/// Maximal ideals of a finite ring: `(p)` for each prime `p | m`; the zero
/// ideal for a field.
pub fn maximal_ideals(r: &RingSpec) -> Result<Vec<IdealSpec>> {
    match r {
        RingSpec::Integers => Err(Error::Unsupported("the integers have infinitely many maximal ideals".into())),
        RingSpec::ModM { factors, .. } => Ok(factors.iter().map(|&(p, _)| IdealSpec::new(r, p)).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(v: i64) -> RingElem {
        RingElem(BigInt::from(v))
    }

    #[test]
    fn parses_ring_specs() {
        assert_eq!(ring_make("zmod:4").unwrap().modulus(), Some(4));
        assert_eq!(ring_make("int").unwrap(), RingSpec::Integers);
        assert!(ring_make("gf:6").is_err());
        assert!(ring_make("zmod:1").is_err());
        assert!(ring_make("zmod:x").is_err());
        assert!(ring_make("poly:3").is_err());
        assert_eq!(ring_make("gf:7").unwrap(), ring_make("zmod:7").unwrap());
        assert_eq!(ring_make("gf:7").unwrap().to_string(), "gf:7");
        assert_eq!(ring_make("zmod:12").unwrap().to_string(), "zmod:12");
    }

    #[test]
    fn arithmetic_examples() {
        let z5 = ring_make("zmod:5").unwrap();
        assert_eq!(ring_arith(&z5, RingOp::Mul, &e(3), Some(&e(4))).unwrap(), e(2));
        let int = RingSpec::Integers;
        assert_eq!(ring_arith(&int, RingOp::Add, &e(-7), Some(&e(7))).unwrap(), e(0));
        let z4 = ring_make("zmod:4").unwrap();
        assert!(matches!(ring_arith(&z4, RingOp::Inv, &e(2), None), Err(Error::NotAUnit(_))));
        assert_eq!(ring_arith(&z4, RingOp::Inv, &e(3), None).unwrap(), e(3));
        assert!(ring_arith(&z4, RingOp::Add, &e(5), Some(&e(1))).is_err());
    }

    #[test]
    fn maximal_ideal_examples() {
        let gens = |s: &str| -> Vec<RingElem> {
            maximal_ideals(&ring_make(s).unwrap()).unwrap().into_iter().map(|q| q.generator).collect()
        };
        assert_eq!(gens("zmod:12"), vec![e(2), e(3)]);
        assert_eq!(gens("gf:5"), vec![e(0)]);
        assert_eq!(gens("zmod:8"), vec![e(2)]);
        assert!(maximal_ideals(&RingSpec::Integers).is_err());
    }

    #[test]
    fn ring_axioms_exhaustive_small_moduli() {
        for m in 2..=64u64 {
            let r = RingSpec::zmod(m).unwrap();
            for a in 0..m as i64 {
                for b in 0..m as i64 {
                    assert_eq!(r.add(&a, &b), r.add(&b, &a));
                    assert_eq!(r.mul(&a, &b), r.mul(&b, &a));
                    // associativity and distributivity against a sparse third operand
                    for c in [0, 1, (m as i64) / 2, m as i64 - 1] {
                        assert_eq!(r.add(&r.add(&a, &b), &c), r.add(&a, &r.add(&b, &c)));
                        assert_eq!(r.mul(&r.mul(&a, &b), &c), r.mul(&a, &r.mul(&b, &c)));
                        assert_eq!(r.mul(&a, &r.add(&b, &c)), r.add(&r.mul(&a, &b), &r.mul(&a, &c)));
                    }
                }
                assert_eq!(r.add(&a, &0), a);
                assert_eq!(r.mul(&a, &1), a);
                assert_eq!(r.add(&a, &r.neg(&a)), 0);
                match r.inv(&a) {
                    Ok(b) => {
                        assert_eq!(r.mul(&a, &b), 1);
                        assert_eq!(a.gcd(&(m as i64)), 1);
                    }
                    Err(_) => assert_ne!(a.gcd(&(m as i64)), 1),
                }
            }
        }
    }

    #[test]
    fn omega_matches_trial_division() {
        for m in 2..=500u64 {
            let omega = (2..=m).filter(|&p| is_prime(p) && m % p == 0).count();
            let r = RingSpec::zmod(m).unwrap();
            assert_eq!(maximal_ideals(&r).unwrap().len(), omega, "m = {m}");
            let prod: u64 = r.factors().iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(prod, m);
        }
    }

    #[test]
    fn integer_order_puts_positive_first() {
        let int = RingSpec::Integers;
        assert_eq!(int.cmp_canonical(&1i64, &-1i64), Ordering::Less);
        assert_eq!(int.cmp_canonical(&-1i64, &2i64), Ordering::Less);
        assert_eq!(int.cmp_canonical(&0i64, &-1i64), Ordering::Less);
    }

    #[test]
    fn roots_of_unity_mod_seven() {
        let r = RingSpec::gf(7).unwrap();
        assert_eq!(r.roots_of_unity::<i64>(3), vec![1, 2, 4]);
        assert_eq!(RingSpec::Integers.roots_of_unity::<i64>(4), vec![1, -1]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(10_000))]
            #[test]
            fn integer_ring_axioms(a in -1_000_000i64..1_000_000, b in -1_000_000i64..1_000_000, c in -1_000_000i64..1_000_000) {
                let r = RingSpec::Integers;
                let (a, b, c) = (BigInt::from(a), BigInt::from(b), BigInt::from(c));
                prop_assert_eq!(r.add(&r.add(&a, &b), &c), r.add(&a, &r.add(&b, &c)));
                prop_assert_eq!(r.mul(&r.mul(&a, &b), &c), r.mul(&a, &r.mul(&b, &c)));
                prop_assert_eq!(r.mul(&a, &r.add(&b, &c)), r.add(&r.mul(&a, &b), &r.mul(&a, &c)));
                prop_assert_eq!(r.mul(&a, &b), r.mul(&b, &a));
                prop_assert_eq!(r.add(&a, &b), r.add(&b, &a));
            }
        }
    }
}
