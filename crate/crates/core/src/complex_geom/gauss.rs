//! Exact Gaussian rationals `p + q i` with `p, q ∈ ℚ`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::GeomError;

/// A complex number with exact rational coordinates.
///
/// Both parts are kept in lowest terms by `BigRational`, so structural
/// equality and hashing coincide with numerical equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn i() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_ints(n, 0)
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self {
            re: BigRational::from_integer(BigInt::from(re)),
            im: BigRational::from_integer(BigInt::from(im)),
        }
    }

    /// `(re_num/den) + (im_num/den) i`.
    pub fn from_fraction(re_num: i64, im_num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let d = BigInt::from(den);
        Self {
            re: BigRational::new(BigInt::from(re_num), d.clone()),
            im: BigRational::new(BigInt::from(im_num), d),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// Squared modulus, exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Exact quotient; `None` when dividing by zero.
    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        let n = rhs.norm_sqr();
        if n.is_zero() {
            return None;
        }
        let num = self * &rhs.conj();
        Some(Self::new(num.re / &n, num.im / n))
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::new(&self.re * k, &self.im * k)
    }

    /// True when both coordinates are integers.
    pub fn is_gaussian_integer(&self) -> bool {
        self.re.is_integer() && self.im.is_integer()
    }

    /// Integer coordinates, if this is a Gaussian integer that fits in `i64`.
    pub fn to_gaussian_i64(&self) -> Option<(i64, i64)> {
        if !self.is_gaussian_integer() {
            return None;
        }
        Some((self.re.to_integer().to_i64()?, self.im.to_integer().to_i64()?))
    }

    /// Least common denominator of both coordinates.
    pub fn common_denominator(&self) -> BigInt {
        num_integer::Integer::lcm(self.re.denom(), self.im.denom())
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Huge numerators: fall back to a quotient of floats.
        r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
    })
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl<'a> $trait<&'a GaussRational> for &'a GaussRational {
            type Output = GaussRational;
            fn $method(self, rhs: &'a GaussRational) -> GaussRational {
                let f: fn(&GaussRational, &GaussRational) -> GaussRational = $body;
                f(self, rhs)
            }
        }
        impl $trait for GaussRational {
            type Output = GaussRational;
            fn $method(self, rhs: GaussRational) -> GaussRational {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a GaussRational> for GaussRational {
            type Output = GaussRational;
            fn $method(self, rhs: &'a GaussRational) -> GaussRational {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| GaussRational::new(&a.re + &b.re, &a.im + &b.im));
forward_binop!(Sub, sub, |a, b| GaussRational::new(&a.re - &b.re, &a.im - &b.im));
forward_binop!(Mul, mul, |a, b| GaussRational::new(
    &a.re * &b.re - &a.im * &b.im,
    &a.re * &b.im + &a.im * &b.re
));

impl Neg for GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational::new(-self.re, -self.im)
    }
}

impl Neg for &GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational::new(-self.re.clone(), -self.im.clone())
    }
}

impl fmt::Debug for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GaussRational {
    /// Renders as e.g. `3/2`, `i/2` written `1/2i`, `1+i`, `-1/2-3i`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im_abs = self.im.abs();
        let im_text = if im_abs.is_one() {
            "i".to_string()
        } else {
            format!("{im_abs}i")
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.re),
            (true, false) => {
                if self.im.is_negative() {
                    write!(f, "-{im_text}")
                } else {
                    write!(f, "{im_text}")
                }
            }
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(f, "{}{sign}{im_text}", self.re)
            }
        }
    }
}

/// Parses sums of rational terms such as `1/2+1+i`, `-i/2+1+i`, `3/2`, `2i`.
impl FromStr for GaussRational {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GeomError::Parse(format!("invalid Gaussian rational `{s}`"));
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if text.is_empty() {
            return Err(bad());
        }
        let mut acc = GaussRational::zero();
        let mut term = String::new();
        let mut sign = 1i64;
        let flush = |term: &str, sign: i64, acc: &mut GaussRational| -> Result<(), GeomError> {
            if term.is_empty() {
                return Err(bad());
            }
            let imaginary = term.contains('i');
            let body: String = term.chars().filter(|&c| c != 'i' && c != '*').collect();
            let body = if body.is_empty() {
                "1".to_string()
            } else if let Some(rest) = body.strip_prefix('/') {
                format!("1/{rest}")
            } else {
                body
            };
            let value: BigRational = body.parse().map_err(|_| bad())?;
            let value = value * BigRational::from_integer(BigInt::from(sign));
            if imaginary {
                acc.im += value;
            } else {
                acc.re += value;
            }
            Ok(())
        };
        for (idx, c) in text.chars().enumerate() {
            if (c == '+' || c == '-') && idx > 0 {
                flush(&term, sign, &mut acc)?;
                term.clear();
                sign = if c == '-' { -1 } else { 1 };
            } else if c == '-' {
                sign = -1;
            } else if c == '+' {
                sign = 1;
            } else {
                term.push(c);
            }
        }
        flush(&term, sign, &mut acc)?;
        Ok(acc)
    }
}
