use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{parse_err, Error, Result};

/// Arbitrary precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact value of a finite double.
pub fn rat_from_f64(x: f64) -> Rational {
    BigRational::from_float(x).unwrap_or_else(Rational::zero)
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `p/q` with an explicit denominator, as used by every file format.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `p/q`, `p` and a leading sign.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("bad rational `{s}`"));
    if s.is_empty() {
        return Err(bad());
    }
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(p))
        }
    }
}

/// Gaussian rational `re + i·im`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct CRat {
    pub re: Rational,
    pub im: Rational,
}

impl CRat {
    pub fn new(re: Rational, im: Rational) -> Self {
        CRat { re, im }
    }

    pub fn real(re: Rational) -> Self {
        CRat {
            re,
            im: Rational::zero(),
        }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        CRat::new(rat_int(re), rat_int(im))
    }

    pub fn zero() -> Self {
        CRat::default()
    }

    pub fn one() -> Self {
        CRat::real(Rational::one())
    }

    pub fn i() -> Self {
        CRat::new(Rational::zero(), Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        CRat::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|²`, exact.
    pub fn norm_sq(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, r: &Rational) -> Self {
        CRat::new(&self.re * r, &self.im * r)
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm_sq();
        if n.is_zero() {
            return None;
        }
        Some(CRat::new(&self.re / &n, -&self.im / &n))
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    pub fn from_c64(z: Complex64) -> Self {
        CRat::new(rat_from_f64(z.re), rat_from_f64(z.im))
    }

    /// Parses `a/b+c/di`, `a/b-c/di`, `a/b`, `c/di`, `i`, `-i`.
    pub fn parse(s: &str) -> Result<CRat> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::InvalidArgument(format!("bad complex rational `{s}`"));
        if t.is_empty() {
            return Err(bad());
        }
        if let Some(body) = t.strip_suffix('i') {
            let split = body
                .char_indices()
                .skip(1)
                .filter(|&(_, c)| c == '+' || c == '-')
                .map(|(i, _)| i)
                .last();
            let (re, im) = match split {
                Some(i) => (&body[..i], &body[i..]),
                None => ("", body),
            };
            let im = match im {
                "" | "+" => Rational::one(),
                "-" => -Rational::one(),
                x => parse_rational(x).map_err(|_| bad())?,
            };
            let re = if re.is_empty() {
                Rational::zero()
            } else {
                parse_rational(re).map_err(|_| bad())?
            };
            Ok(CRat::new(re, im))
        } else {
            Ok(CRat::real(parse_rational(&t).map_err(|_| bad())?))
        }
    }

    pub fn parse_at(s: &str, line: usize) -> Result<CRat> {
        CRat::parse(s).map_err(|e| parse_err(line, e.to_string()))
    }
}

impl fmt::Display for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.im.is_negative() { '-' } else { '+' };
        write!(
            f,
            "{}{}{}/{}i",
            format_rational(&self.re),
            sign,
            self.im.numer().abs(),
            self.im.denom()
        )
    }
}

impl From<Rational> for CRat {
    fn from(r: Rational) -> Self {
        CRat::real(r)
    }
}

impl<'a> Add<&'a CRat> for &'a CRat {
    type Output = CRat;
    fn add(self, o: &CRat) -> CRat {
        CRat::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Add for CRat {
    type Output = CRat;
    fn add(self, o: CRat) -> CRat {
        CRat::new(self.re + o.re, self.im + o.im)
    }
}

impl<'a> Sub<&'a CRat> for &'a CRat {
    type Output = CRat;
    fn sub(self, o: &CRat) -> CRat {
        CRat::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Sub for CRat {
    type Output = CRat;
    fn sub(self, o: CRat) -> CRat {
        CRat::new(self.re - o.re, self.im - o.im)
    }
}

impl<'a> Mul<&'a CRat> for &'a CRat {
    type Output = CRat;
    fn mul(self, o: &CRat) -> CRat {
        CRat::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }
}

impl Mul for CRat {
    type Output = CRat;
    fn mul(self, o: CRat) -> CRat {
        &self * &o
    }
}

impl Div for &CRat {
    type Output = CRat;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: &CRat) -> CRat {
        self * &o.inv().expect("division by zero")
    }
}

impl Neg for CRat {
    type Output = CRat;
    fn neg(self) -> CRat {
        CRat::new(-self.re, -self.im)
    }
}

impl Neg for &CRat {
    type Output = CRat;
    fn neg(self) -> CRat {
        CRat::new(-&self.re, -&self.im)
    }
}

impl AddAssign<&CRat> for CRat {
    fn add_assign(&mut self, o: &CRat) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&CRat> for CRat {
    fn sub_assign(&mut self, o: &CRat) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(CRat::parse("1/2+0/1i").unwrap(), CRat::real(rat(1, 2)));
        assert_eq!(CRat::parse("0/1-1/2i").unwrap(), CRat::new(rat(0, 1), rat(-1, 2)));
        assert_eq!(CRat::parse("-3/4").unwrap(), CRat::real(rat(-3, 4)));
        assert_eq!(CRat::parse("-i").unwrap(), CRat::new(rat(0, 1), rat(-1, 1)));
        assert_eq!(CRat::parse("2/3i").unwrap(), CRat::new(rat(0, 1), rat(2, 3)));
        assert_eq!(CRat::parse("-1/2-1/3i").unwrap(), CRat::new(rat(-1, 2), rat(-1, 3)));
        assert!(CRat::parse("1/0").is_err());
        assert!(CRat::parse("").is_err());
    }

    #[test]
    fn display_round_trip() {
        for s in ["1/2+0/1i", "0/1-1/2i", "-7/3+5/11i"] {
            assert_eq!(CRat::parse(s).unwrap().to_string(), s);
        }
    }

    #[test]
    fn field_ops() {
        let a = CRat::parse("1/2+1/3i").unwrap();
        let b = CRat::parse("-2+5/7i").unwrap();
        let q = &a / &b;
        assert_eq!(&q * &b, a);
        assert_eq!((&a * &a.conj()).re, a.norm_sq());
    }
}
