//! Exact integer scalars.
//!
//! Ring and matrix arithmetic is written once against [`Scalar`] and used with
//! `i64` (fast, for residues of small moduli), `i128`, and `BigInt` (for the
//! integers, where products of elementary matrices grow without bound).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive};
use std::fmt::{Debug, Display};
use std::hash::Hash;

pub trait Scalar:
    Integer + Signed + Clone + Debug + Display + Hash + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    fn to_bigint(&self) -> BigInt;
    /// Returns `None` when the value does not fit.
    fn from_bigint(v: &BigInt) -> Option<Self>;

    fn from_u64_lossless(v: u64) -> Self {
        Self::from_u64(v).expect("u64 value does not fit scalar")
    }
}

impl Scalar for i64 {
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn from_bigint(v: &BigInt) -> Option<Self> {
        v.to_i64()
    }
}

impl Scalar for i128 {
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn from_bigint(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }
}

impl Scalar for BigInt {
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
    fn from_bigint(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
}
