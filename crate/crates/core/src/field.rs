//! Exact scalars: arbitrary-precision rationals and residues modulo a word-sized prime.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const MAX_MODULUS: u64 = 1 << 31;

/// A prime modulus `q` with `2 <= q <= 2^31`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    pub fn new(q: u64) -> Result<Self> {
        if !(2..=MAX_MODULUS).contains(&q) || !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(PrimeModulus(q))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The field all scalars of a computation live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    Prime(PrimeModulus),
}

impl FieldSpec {
    pub fn gf(q: u64) -> Result<Self> {
        PrimeModulus::new(q).map(FieldSpec::Prime)
    }

    pub fn modulus(self) -> Option<u64> {
        match self {
            FieldSpec::Rationals => None,
            FieldSpec::Prime(q) => Some(q.get()),
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, FieldSpec::Prime(_))
    }

    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, v: i64) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
            FieldSpec::Prime(q) => {
                let q = q.get();
                Scalar::Residue(Residue {
                    value: v.rem_euclid(q as i64) as u64,
                    modulus: q,
                })
            }
        }
    }

    /// Builds `num/den`; `den` must be nonzero (and invertible mod q).
    pub fn ratio(self, num: i64, den: i64) -> Option<Scalar> {
        if den == 0 {
            return None;
        }
        match self {
            FieldSpec::Rationals => Some(Scalar::Rational(BigRational::new(
                BigInt::from(num),
                BigInt::from(den),
            ))),
            FieldSpec::Prime(_) => self.from_i64(den).inv().map(|d| &self.from_i64(num) * &d),
        }
    }

    /// Residue from an already-canonical value; panics when out of range.
    pub fn residue(self, value: u64) -> Scalar {
        match self {
            FieldSpec::Prime(q) => {
                assert!(value < q.get());
                Scalar::Residue(Residue {
                    value,
                    modulus: q.get(),
                })
            }
            FieldSpec::Rationals => self.from_i64(value as i64),
        }
    }

    /// Parses a scalar literal in canonical form: `p` or `p/q` (lowest terms,
    /// `q > 0`) over the rationals, a residue `0..q` over GF(q).
    pub fn parse_scalar(self, s: &str) -> std::result::Result<Scalar, String> {
        match self {
            FieldSpec::Rationals => {
                let (num, den) = match s.split_once('/') {
                    Some((n, d)) => (n, Some(d)),
                    None => (s, None),
                };
                let num: BigInt = num
                    .parse()
                    .map_err(|_| format!("bad rational numerator `{s}`"))?;
                let den: BigInt = match den {
                    Some(d) => d
                        .parse()
                        .map_err(|_| format!("bad rational denominator `{s}`"))?,
                    None => BigInt::one(),
                };
                if !den.is_positive() {
                    return Err(format!("denominator must be positive in `{s}`"));
                }
                if !num.gcd(&den).is_one() {
                    return Err(format!("rational `{s}` is not in lowest terms"));
                }
                Ok(Scalar::Rational(BigRational::new_raw(num, den)))
            }
            FieldSpec::Prime(q) => {
                let v: u64 = s.parse().map_err(|_| format!("bad residue `{s}`"))?;
                if v >= q.get() {
                    return Err(format!("residue {v} is not canonical mod {}", q.get()));
                }
                Ok(self.residue(v))
            }
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "rational"),
            FieldSpec::Prime(q) => write!(f, "gf:{}", q.get()),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    /// Accepts `rational` or `gf:<q>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::parse(
                0,
                format!("unknown field `{s}` (expected rational or gf:<q>)"),
            )
        };
        match s {
            "rational" | "rationals" => Ok(FieldSpec::Rationals),
            _ => {
                let q = s.strip_prefix("gf:").ok_or_else(bad)?;
                let q: u64 = q.parse().map_err(|_| bad())?;
                FieldSpec::gf(q)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn value(self) -> u64 {
        self.value
    }
}

/// An exact field element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Residue(Residue),
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Rational(_) => FieldSpec::Rationals,
            Scalar::Residue(r) => FieldSpec::Prime(PrimeModulus(r.modulus)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Residue(r) => r.value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Residue(r) => r.value == 1,
        }
    }

    /// Multiplicative inverse; `None` for zero. GF(q) uses extended Euclid.
    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Rational(r) => Scalar::Rational(r.recip()),
            Scalar::Residue(r) => {
                let g = (r.value as i64).extended_gcd(&(r.modulus as i64));
                debug_assert_eq!(g.gcd, 1);
                Scalar::Residue(Residue {
                    value: g.x.rem_euclid(r.modulus as i64) as u64,
                    modulus: r.modulus,
                })
            }
        })
    }

    pub fn div(&self, other: &Scalar) -> Option<Scalar> {
        other.inv().map(|d| self * &d)
    }

    /// Reduces a rational into GF(q); `None` if the denominator vanishes mod q.
    pub fn reduce_mod(&self, field: FieldSpec) -> Option<Scalar> {
        match (self, field) {
            (Scalar::Rational(r), FieldSpec::Prime(q)) => {
                let q = BigInt::from(q.get());
                let num = r.numer().mod_floor(&q).to_i64()?;
                let den = r.denom().mod_floor(&q).to_i64()?;
                field.ratio(num, den)
            }
            (s, f) if s.field() == f => Some(s.clone()),
            _ => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Scalar::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Residue(r) => write!(f, "{}", r.value),
        }
    }
}

fn residue_pair(a: &Residue, b: &Residue) -> u64 {
    assert_eq!(a.modulus, b.modulus, "scalars from different prime fields");
    a.modulus
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Residue(a), Scalar::Residue(b)) => {
                let q = residue_pair(a, b);
                Scalar::Residue(Residue {
                    value: (a.value + b.value) % q,
                    modulus: q,
                })
            }
            _ => panic!("scalars from different fields"),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a - b),
            (Scalar::Residue(a), Scalar::Residue(b)) => {
                let q = residue_pair(a, b);
                Scalar::Residue(Residue {
                    value: (a.value + q - b.value) % q,
                    modulus: q,
                })
            }
            _ => panic!("scalars from different fields"),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Residue(a), Scalar::Residue(b)) => {
                let q = residue_pair(a, b);
                Scalar::Residue(Residue {
                    value: (a.value * b.value) % q,
                    modulus: q,
                })
            }
            _ => panic!("scalars from different fields"),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Residue(a) => Scalar::Residue(Residue {
                value: (a.modulus - a.value) % a.modulus,
                modulus: a.modulus,
            }),
        }
    }
}
