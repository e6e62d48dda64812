//! Exact numbers of the form `Σ_k c_k / √k` with Gaussian-rational `c_k` and
//! positive integers `k` whose pairwise ratios are not rational squares.
//! Square roots of distinct square-free integers are linearly independent over
//! the Gaussian rationals, so a value is zero iff every coefficient is zero.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::{rat_to_f64, CRat, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Default)]
pub struct Surd {
    terms: Vec<(BigUint, CRat)>,
}

const SMALL_PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Splits `k = s²·r`, removing square factors of small primes and whole squares.
fn reduce_radicand(k: &BigUint) -> (BigUint, BigUint) {
    let mut r = k.clone();
    let mut s = BigUint::one();
    for &p in SMALL_PRIMES.iter() {
        let p2 = BigUint::from(p * p);
        while (&r % &p2).is_zero() {
            r /= &p2;
            s *= p;
        }
    }
    let root = r.sqrt();
    if &root * &root == r {
        s *= root;
        r = BigUint::one();
    }
    (s, r)
}

fn perfect_sqrt(x: &BigUint) -> Option<BigUint> {
    let r = x.sqrt();
    if &r * &r == *x {
        Some(r)
    } else {
        None
    }
}

fn big_to_rat(x: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(x.clone()))
}

impl Surd {
    pub fn zero() -> Self {
        Surd::default()
    }

    pub fn one() -> Self {
        Surd::from_crat(CRat::one())
    }

    pub fn from_crat(c: CRat) -> Self {
        let mut s = Surd::zero();
        s.add_term(BigUint::one(), c);
        s
    }

    pub fn from_rational(r: Rational) -> Self {
        Surd::from_crat(CRat::real(r))
    }

    /// `c / √k`.
    pub fn term(c: CRat, k: BigUint) -> Self {
        let mut s = Surd::zero();
        s.add_term(k, c);
        s
    }

    /// `1/√r` for a positive rational `r = p/q`, written as `q/√(pq)`.
    pub fn inv_sqrt(r: &Rational) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::InvalidArgument(format!(
                "inverse square root of non-positive {r}"
            )));
        }
        let p = r.numer().magnitude().clone();
        let q = r.denom().magnitude().clone();
        let c = CRat::real(big_to_rat(&q));
        Ok(Surd::term(c, p * q))
    }

    /// `√r` for a non-negative rational.
    pub fn sqrt(r: &Rational) -> Result<Self> {
        if r.is_zero() {
            return Ok(Surd::zero());
        }
        let inv = Surd::inv_sqrt(r)?;
        Ok(inv.scale(r))
    }

    fn add_term(&mut self, k: BigUint, c: CRat) {
        if c.is_zero() {
            return;
        }
        let (s, k) = reduce_radicand(&k);
        let c = c.scale(&Rational::new(BigInt::one(), BigInt::from(s)));
        for (k0, c0) in self.terms.iter_mut() {
            if *k0 == k {
                *c0 += &c;
                self.terms.retain(|(_, c)| !c.is_zero());
                return;
            }
            let prod = &k * &*k0;
            if let Some(root) = perfect_sqrt(&prod) {
                // 1/√k = (k0/root)/√k0
                let f = big_to_rat(k0) / big_to_rat(&root);
                *c0 += &c.scale(&f);
                self.terms.retain(|(_, c)| !c.is_zero());
                return;
            }
        }
        self.terms.push((k, c));
        self.terms.sort_by(|a, b| a.0.cmp(&b.0));
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_crat().map(|c| c == CRat::one()).unwrap_or(false)
    }

    /// The value as a Gaussian rational, if it is one.
    pub fn as_crat(&self) -> Option<CRat> {
        match self.terms.as_slice() {
            [] => Some(CRat::zero()),
            [(k, c)] if k.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    /// The single radicand when the value is `c/√k`, with `k = 1` for zero.
    pub fn single_radicand(&self) -> Option<(BigUint, CRat)> {
        match self.terms.as_slice() {
            [] => Some((BigUint::one(), CRat::zero())),
            [(k, c)] => Some((k.clone(), c.clone())),
            _ => None,
        }
    }

    pub fn terms(&self) -> &[(BigUint, CRat)] {
        &self.terms
    }

    pub fn conj(&self) -> Self {
        Surd {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c.conj())).collect(),
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        let mut out = Surd::zero();
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c.scale(r));
        }
        out
    }

    pub fn scale_c(&self, z: &CRat) -> Self {
        let mut out = Surd::zero();
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c * z);
        }
        out
    }

    pub fn add(&self, o: &Surd) -> Surd {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn add_assign(&mut self, o: &Surd) {
        for (k, c) in &o.terms {
            self.add_term(k.clone(), c.clone());
        }
    }

    pub fn sub(&self, o: &Surd) -> Surd {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Surd {
        Surd {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, o: &Surd) -> Surd {
        let mut out = Surd::zero();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &o.terms {
                // 1/√k1 · 1/√k2 = (1/g) / √(k1 k2 / g²)
                let g = k1.gcd(k2);
                let k = (k1 / &g) * (k2 / &g);
                let c = (c1 * c2).scale(&Rational::new(BigInt::one(), BigInt::from(g)));
                out.add_term(k, c);
            }
        }
        out
    }

    /// `|z|²` as a surd (real-valued).
    pub fn norm_sq(&self) -> Surd {
        self.conj().mul(self)
    }

    pub fn to_c64(&self) -> Complex64 {
        let mut z = Complex64::new(0.0, 0.0);
        for (k, c) in &self.terms {
            let kf = k.to_f64().unwrap_or(f64::INFINITY);
            z += c.to_c64() / kf.sqrt();
        }
        z
    }

    pub fn re_f64(&self) -> f64 {
        self.to_c64().re
    }

    /// Sign of the real part compared with a rational, exact when the value
    /// is rational and by double evaluation otherwise.
    pub fn cmp_real(&self, r: &Rational) -> std::cmp::Ordering {
        if let Some(c) = self.as_crat() {
            return c.re.cmp(r);
        }
        self.re_f64()
            .partial_cmp(&rat_to_f64(r))
            .unwrap_or(std::cmp::Ordering::Equal)
    }

    /// Parses the form written by `Display`: `crat` or `crat~k` terms joined by `&`.
    pub fn parse(s: &str) -> Result<Surd> {
        let mut out = Surd::zero();
        for part in s.split('&') {
            let part = part.trim();
            let (c, k) = match part.split_once('~') {
                Some((c, k)) => {
                    let k: BigUint = k
                        .trim()
                        .parse()
                        .map_err(|_| Error::InvalidArgument(format!("bad radicand `{part}`")))?;
                    if k.is_zero() {
                        return Err(Error::InvalidArgument(format!("zero radicand `{part}`")));
                    }
                    (CRat::parse(c)?, k)
                }
                None => (CRat::parse(part)?, BigUint::one()),
            };
            out.add_term(k, c);
        }
        Ok(out)
    }
}

impl PartialEq for Surd {
    fn eq(&self, o: &Surd) -> bool {
        self.sub(o).is_zero()
    }
}

impl Eq for Surd {}

impl From<CRat> for Surd {
    fn from(c: CRat) -> Self {
        Surd::from_crat(c)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "{}", CRat::zero());
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "&")?;
            }
            if k.is_one() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}~{k}")?;
            }
        }
        Ok(())
    }
}
