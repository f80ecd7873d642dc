//! Exact scalar arithmetic over the rationals and over prime fields.
//!
//! Every operation is exact: rationals are always-reduced fractions with
//! arbitrary-precision integers, prime-field elements are residues mod p.
//! Equality checks are bit-exact, never tolerance-based.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),
    #[error("cannot parse field spec {0:?} (expected \"q\" or \"p:<prime>\")")]
    BadSpec(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("the rationals are infinite and cannot be enumerated")]
    InfiniteField,
}

/// The ground field: the rationals, or F_p for a prime p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldSpec {
    Rationals,
    Prime(u64),
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        if is_prime(p) {
            Ok(FieldSpec::Prime(p))
        } else {
            Err(FieldError::NotPrime(p))
        }
    }

    /// Parses "q" (rationals) or "p:<prime>".
    pub fn parse(s: &str) -> Result<Self, FieldError> {
        if s == "q" || s == "Q" {
            return Ok(FieldSpec::Rationals);
        }
        if let Some(rest) = s.strip_prefix("p:") {
            let p: u64 = rest
                .parse()
                .map_err(|_| FieldError::BadSpec(s.to_string()))?;
            return FieldSpec::prime(p);
        }
        Err(FieldError::BadSpec(s.to_string()))
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(BigRational::zero()),
            FieldSpec::Prime(p) => Scalar::Fp { p: *p, v: 0 },
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(BigRational::from_integer(BigInt::from(v))),
            FieldSpec::Prime(p) => {
                let p = *p;
                let r = v.rem_euclid(p as i64) as u64;
                Scalar::Fp { p, v: r }
            }
        }
    }

    pub fn from_ratio(&self, num: i64, den: i64) -> Result<Scalar, FieldError> {
        if den == 0 {
            return Err(FieldError::DivisionByZero);
        }
        match self {
            FieldSpec::Rationals => Ok(Scalar::Rat(BigRational::new(
                BigInt::from(num),
                BigInt::from(den),
            ))),
            FieldSpec::Prime(_) => {
                let d = self.from_i64(den);
                Ok(self.from_i64(num).mul_ref(&d.inv()?))
            }
        }
    }

    /// All field elements, for prime fields only.
    pub fn elements(&self) -> Result<Vec<Scalar>, FieldError> {
        match self {
            FieldSpec::Rationals => Err(FieldError::InfiniteField),
            FieldSpec::Prime(p) => Ok((0..*p).map(|v| Scalar::Fp { p: *p, v }).collect()),
        }
    }

    pub fn characteristic(&self) -> Option<u64> {
        match self {
            FieldSpec::Rationals => None,
            FieldSpec::Prime(p) => Some(*p),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "q"),
            FieldSpec::Prime(p) => write!(f, "p:{p}"),
        }
    }
}

/// An exact field element. Mixed-field arithmetic is a programming error
/// and panics.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Rat(BigRational),
    Fp { p: u64, v: u64 },
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc: u64 = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * b as u128) % p as u128) as u64;
        }
        b = ((b as u128 * b as u128) % p as u128) as u64;
        e >>= 1;
    }
    acc
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Rat(_) => FieldSpec::Rationals,
            Scalar::Fp { p, .. } => FieldSpec::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Fp { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_one(),
            Scalar::Fp { v, .. } => *v == 1,
        }
    }

    pub fn add_ref(&self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            (Scalar::Fp { p, v: a }, Scalar::Fp { p: q, v: b }) => {
                assert_eq!(p, q, "field mismatch");
                Scalar::Fp {
                    p: *p,
                    v: (a + b) % p,
                }
            }
            _ => panic!("field mismatch"),
        }
    }

    pub fn sub_ref(&self, rhs: &Scalar) -> Scalar {
        self.add_ref(&rhs.neg_ref())
    }

    pub fn mul_ref(&self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Fp { p, v: a }, Scalar::Fp { p: q, v: b }) => {
                assert_eq!(p, q, "field mismatch");
                Scalar::Fp {
                    p: *p,
                    v: ((*a as u128 * *b as u128) % *p as u128) as u64,
                }
            }
            _ => panic!("field mismatch"),
        }
    }

    pub fn neg_ref(&self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Fp { p, v } => Scalar::Fp {
                p: *p,
                v: if *v == 0 { 0 } else { p - v },
            },
        }
    }

    pub fn inv(&self) -> Result<Scalar, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match self {
            Scalar::Rat(a) => Scalar::Rat(a.recip()),
            Scalar::Fp { p, v } => Scalar::Fp {
                p: *p,
                v: mod_pow(*v, p - 2, *p),
            },
        })
    }

    pub fn div_ref(&self, rhs: &Scalar) -> Result<Scalar, FieldError> {
        Ok(self.mul_ref(&rhs.inv()?))
    }

    /// Reduces a rational scalar mod p; fails if p divides the denominator.
    pub fn reduce_mod(&self, p: u64) -> Result<Scalar, FieldError> {
        match self {
            Scalar::Fp { p: q, .. } if *q == p => Ok(self.clone()),
            Scalar::Fp { .. } => panic!("field mismatch"),
            Scalar::Rat(r) => {
                let pb = BigInt::from(p);
                let den = r.denom();
                if (den % &pb).is_zero() {
                    return Err(FieldError::DivisionByZero);
                }
                let num_m = ((r.numer() % &pb) + &pb) % &pb;
                let den_m = ((den % &pb) + &pb) % &pb;
                let n: u64 = num_m.try_into().unwrap();
                let d: u64 = den_m.try_into().unwrap();
                let fp = FieldSpec::Prime(p);
                let d_inv = Scalar::Fp { p, v: d }.inv()?;
                Ok(Scalar::Fp { p, v: n }.mul_ref(&d_inv).mul_ref(&fp.one()))
            }
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.add_ref(rhs)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.sub_ref(rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.mul_ref(rhs)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Fp { v, .. } => write!(f, "{v}"),
        }
    }
}

/// Parses a rational scalar from its "num/den" (or plain integer) encoding.
pub fn parse_rational(s: &str) -> Result<Scalar, FieldError> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| FieldError::BadSpec(s.to_string()))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| FieldError::BadSpec(s.to_string()))?;
    if d.is_zero() {
        return Err(FieldError::DivisionByZero);
    }
    let mut r = BigRational::new(n, d);
    if r.denom().is_negative() {
        r = -r;
    }
    Ok(Scalar::Rat(r))
}
