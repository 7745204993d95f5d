//! Exact coefficient rings: the integers, the residues modulo `m >= 2`, and the rationals.
//!
//! A [`Ring`] is a small handle; [`Scalar`]s are plain values that only make sense
//! together with the ring that produced them. All arithmetic goes through the ring so
//! that residues stay normalized in `[0, m)` and integers never leave `Z`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which coefficient ring to compute over.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RingSpecRepr", into = "RingSpecRepr")]
pub enum RingSpec {
    Integers,
    IntegersMod(u64),
    Rationals,
}

#[derive(Serialize, Deserialize)]
struct RingSpecRepr {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    modulus: Option<u64>,
}

impl TryFrom<RingSpecRepr> for RingSpec {
    type Error = Error;

    fn try_from(r: RingSpecRepr) -> Result<Self> {
        match (r.kind.as_str(), r.modulus) {
            ("integers", None) => Ok(RingSpec::Integers),
            ("rationals", None) => Ok(RingSpec::Rationals),
            ("integers-mod-m", Some(m)) => Ok(RingSpec::IntegersMod(m)),
            (k, m) => Err(Error::InvalidRing(format!("kind {k:?} with modulus {m:?}"))),
        }
    }
}

impl From<RingSpec> for RingSpecRepr {
    fn from(s: RingSpec) -> Self {
        match s {
            RingSpec::Integers => RingSpecRepr { kind: "integers".into(), modulus: None },
            RingSpec::Rationals => RingSpecRepr { kind: "rationals".into(), modulus: None },
            RingSpec::IntegersMod(m) => {
                RingSpecRepr { kind: "integers-mod-m".into(), modulus: Some(m) }
            }
        }
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::Integers => write!(f, "Z"),
            RingSpec::IntegersMod(m) => write!(f, "Z/{m}"),
            RingSpec::Rationals => write!(f, "Q"),
        }
    }
}

/// An exact ring element. Integers and residues are stored with denominator one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// Small integer view, when the value is an integer that fits.
    pub fn to_i64(&self) -> Option<i64> {
        if self.0.is_integer() {
            self.0.numer().to_i64()
        } else {
            None
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Arithmetic handle for one of the supported rings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ring {
    spec: RingSpec,
    modulus: Option<BigInt>,
}

impl Ring {
    pub fn new(spec: RingSpec) -> Result<Self> {
        let modulus = match spec {
            RingSpec::IntegersMod(m) if m < 2 => {
                return Err(Error::InvalidRing(format!("modulus {m} < 2")))
            }
            RingSpec::IntegersMod(m) => Some(BigInt::from(m)),
            _ => None,
        };
        Ok(Ring { spec, modulus })
    }

    pub fn integers() -> Self {
        Ring { spec: RingSpec::Integers, modulus: None }
    }

    pub fn rationals() -> Self {
        Ring { spec: RingSpec::Rationals, modulus: None }
    }

    pub fn modular(m: u64) -> Result<Self> {
        Ring::new(RingSpec::IntegersMod(m))
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }

    /// Whether `Q` is a subring, which unlocks the divided norm `1/r! * sum`.
    pub fn contains_rationals(&self) -> bool {
        self.spec == RingSpec::Rationals
    }

    /// Number of elements, or `None` for infinite rings.
    pub fn cardinality(&self) -> Option<u64> {
        match self.spec {
            RingSpec::IntegersMod(m) => Some(m),
            _ => None,
        }
    }

    /// All elements of a finite ring in canonical order.
    pub fn elements(&self) -> Option<Vec<Scalar>> {
        self.cardinality().map(|m| (0..m as i64).map(|i| self.int(i)).collect())
    }

    fn normalize(&self, q: BigRational) -> Scalar {
        match &self.modulus {
            Some(m) => {
                debug_assert!(q.is_integer());
                Scalar(BigRational::from_integer(q.numer().mod_floor(m)))
            }
            None => Scalar(q),
        }
    }

    pub fn zero(&self) -> Scalar {
        Scalar(BigRational::zero())
    }

    pub fn one(&self) -> Scalar {
        self.normalize(BigRational::one())
    }

    pub fn int(&self, n: i64) -> Scalar {
        self.normalize(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(&self, n: BigInt) -> Scalar {
        self.normalize(BigRational::from_integer(n))
    }

    /// `(-1)^e`.
    pub fn sign(&self, odd: bool) -> Scalar {
        if odd {
            self.int(-1)
        } else {
            self.one()
        }
    }

    /// Parse an integer or `p/q` literal. Fractions are only accepted over `Q`.
    pub fn parse(&self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad scalar literal {s:?} for ring {}", self.spec));
        if let Some((p, q)) = s.split_once('/') {
            if !self.contains_rationals() {
                return Err(bad());
            }
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Scalar(BigRational::new(p, q)))
        } else {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(self.from_bigint(n))
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.normalize(&a.0 + &b.0)
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.normalize(&a.0 - &b.0)
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        if a.0.is_zero() || b.0.is_zero() {
            return self.zero();
        }
        if a.0.is_one() {
            return b.clone();
        }
        if b.0.is_one() {
            return a.clone();
        }
        self.normalize(&a.0 * &b.0)
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        self.normalize(-a.0.clone())
    }

    pub fn is_unit(&self, a: &Scalar) -> bool {
        self.inv(a).is_ok()
    }

    /// Two-sided inverse; fails with [`Error::NonUnit`] when none exists.
    pub fn inv(&self, a: &Scalar) -> Result<Scalar> {
        let err = || Error::NonUnit(format!("{a} in {}", self.spec));
        match (&self.spec, &self.modulus) {
            (RingSpec::Rationals, _) => {
                if a.0.is_zero() {
                    Err(err())
                } else {
                    Ok(Scalar(a.0.recip()))
                }
            }
            (RingSpec::Integers, _) => {
                if a.0.abs().is_one() {
                    Ok(a.clone())
                } else {
                    Err(err())
                }
            }
            (RingSpec::IntegersMod(_), Some(m)) => {
                let e = a.0.numer().extended_gcd(m);
                if e.gcd.is_one() {
                    Ok(self.from_bigint(e.x))
                } else {
                    Err(err())
                }
            }
            (RingSpec::IntegersMod(_), None) => unreachable!("modulus set in constructor"),
        }
    }

    /// `1 / n!` when it exists in the ring.
    pub fn inv_factorial(&self, n: usize) -> Result<Scalar> {
        let f: BigInt = (1..=n as u64).map(BigInt::from).product();
        self.inv(&self.from_bigint(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn z2_one_plus_one_is_zero() {
        let r = Ring::modular(2).unwrap();
        assert!(r.add(&r.one(), &r.one()).is_zero());
    }

    #[test]
    fn two_is_not_a_unit_in_z() {
        let r = Ring::integers();
        assert!(matches!(r.inv(&r.int(2)), Err(Error::NonUnit(_))));
        assert!(!r.contains_rationals());
    }

    #[test]
    fn rationals_flag() {
        assert!(Ring::rationals().contains_rationals());
    }

    #[test]
    fn modulus_below_two_rejected() {
        assert!(matches!(Ring::modular(1), Err(Error::InvalidRing(_))));
        assert!(matches!(Ring::modular(0), Err(Error::InvalidRing(_))));
    }

    #[test]
    fn z8_examples() {
        let r = Ring::modular(8).unwrap();
        assert!(r.add(&r.int(3), &r.int(5)).is_zero());
        // brute-force search for the inverse of 3 mod 8
        let brute = (0..8).find(|x| (3 * x) % 8 == 1).unwrap();
        assert_eq!(brute, 3);
        assert_eq!(r.inv(&r.int(3)).unwrap(), r.int(brute));
        assert!(r.inv(&r.int(2)).is_err());
    }

    #[test]
    fn ring_spec_json() {
        let s: RingSpec = serde_json::from_str(r#"{"kind":"integers-mod-m","modulus":8}"#).unwrap();
        assert_eq!(s, RingSpec::IntegersMod(8));
        assert_eq!(serde_json::to_string(&RingSpec::Rationals).unwrap(), r#"{"kind":"rationals"}"#);
        assert!(serde_json::from_str::<RingSpec>(r#"{"kind":"integers","modulus":3}"#).is_err());
    }

    fn rings() -> Vec<Ring> {
        vec![
            Ring::integers(),
            Ring::rationals(),
            Ring::modular(2).unwrap(),
            Ring::modular(8).unwrap(),
            Ring::modular(15).unwrap(),
        ]
    }

    fn value(r: &Ring, n: i64, d: i64) -> Scalar {
        if r.contains_rationals() {
            Scalar(BigRational::new(n.into(), d.into()))
        } else {
            r.int(n)
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn ring_axioms(a in -50i64..50, b in -50i64..50, c in -50i64..50, d in 1i64..7, idx in 0usize..5) {
            let r = &rings()[idx];
            let (a, b, c) = (value(r, a, d), value(r, b, d + 1), value(r, c, 1));
            prop_assert_eq!(r.add(&r.add(&a, &b), &c), r.add(&a, &r.add(&b, &c)));
            prop_assert_eq!(r.mul(&r.mul(&a, &b), &c), r.mul(&a, &r.mul(&b, &c)));
            prop_assert_eq!(r.add(&a, &b), r.add(&b, &a));
            prop_assert_eq!(r.mul(&a, &b), r.mul(&b, &a));
            prop_assert_eq!(r.mul(&a, &r.add(&b, &c)), r.add(&r.mul(&a, &b), &r.mul(&a, &c)));
            prop_assert_eq!(r.mul(&r.one(), &a), a.clone());
            prop_assert_eq!(r.add(&r.zero(), &a), a.clone());
            prop_assert!(r.add(&a, &r.neg(&a)).is_zero());
            if let Some(m) = r.cardinality() {
                let v = a.to_i64().unwrap();
                prop_assert!(v >= 0 && (v as u64) < m);
            }
            if let Ok(i) = r.inv(&a) {
                prop_assert!(r.mul(&i, &a).is_one());
                prop_assert!(r.mul(&a, &i).is_one());
            }
        }
    }
}
