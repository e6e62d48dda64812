use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::{One, Zero};

use super::rational::{format_rational, parse_rational, rat_to_f64, CRat, Rational};
use super::surd::Surd;
use crate::error::{Error, Result};

/// Dense vector of Gaussian rationals.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CVec(pub Vec<CRat>);

impl CVec {
    pub fn zeros(dim: usize) -> Self {
        CVec(vec![CRat::zero(); dim])
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = CVec::zeros(dim);
        v.0[i] = CRat::one();
        v
    }

    pub fn from_ints(xs: &[(i64, i64)]) -> Self {
        CVec(xs.iter().map(|&(a, b)| CRat::from_ints(a, b)).collect())
    }

    pub fn from_reals(xs: &[Rational]) -> Self {
        CVec(xs.iter().cloned().map(CRat::real).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(CRat::is_zero)
    }

    /// `⟨self|o⟩`, antilinear in `self`.
    pub fn inner(&self, o: &CVec) -> CRat {
        let mut acc = CRat::zero();
        for (a, b) in self.0.iter().zip(&o.0) {
            if !a.is_zero() && !b.is_zero() {
                acc += &(&a.conj() * b);
            }
        }
        acc
    }

    pub fn norm_sq(&self) -> Rational {
        self.0.iter().map(CRat::norm_sq).fold(Rational::zero(), |a, b| a + b)
    }

    pub fn scale(&self, c: &CRat) -> CVec {
        CVec(self.0.iter().map(|x| x * c).collect())
    }

    pub fn scale_r(&self, r: &Rational) -> CVec {
        CVec(self.0.iter().map(|x| x.scale(r)).collect())
    }

    pub fn add(&self, o: &CVec) -> CVec {
        CVec(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &CVec) -> CVec {
        CVec(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    /// `self += c·o`.
    pub fn axpy(&mut self, c: &CRat, o: &CVec) {
        if c.is_zero() {
            return;
        }
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            if !b.is_zero() {
                *a += &(c * b);
            }
        }
    }

    pub fn to_c64(&self) -> DVector<Complex64> {
        DVector::from_iterator(self.dim(), self.0.iter().map(CRat::to_c64))
    }

    pub fn from_c64(v: &DVector<Complex64>) -> CVec {
        CVec(v.iter().map(|z| CRat::from_c64(*z)).collect())
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            Err(Error::DimensionMismatch {
                expected: dim,
                got: self.dim(),
            })
        } else {
            Ok(())
        }
    }
}

/// Dense row-major matrix of Gaussian rationals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<CRat>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![CRat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, CRat::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<CRat>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(CMat { rows: r, cols: c, data })
    }

    /// `|v⟩⟨w|`.
    pub fn outer(v: &CVec, w: &CVec) -> Self {
        let mut m = CMat::zeros(v.dim(), w.dim());
        for i in 0..v.dim() {
            for j in 0..w.dim() {
                m.set(i, j, &v.0[i] * &w.0[j].conj());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &CRat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CRat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[CRat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> CMat {
        let mut m = CMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).conj());
            }
        }
        m
    }

    pub fn is_hermitian(&self) -> bool {
        self.rows == self.cols && *self == self.adjoint()
    }

    pub fn trace(&self) -> CRat {
        let mut t = CRat::zero();
        for i in 0..self.rows.min(self.cols) {
            t += self.get(i, i);
        }
        t
    }

    pub fn mul(&self, o: &CMat) -> Result<CMat> {
        if self.cols != o.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: o.rows,
            });
        }
        let mut m = CMat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let cur = &m.data[i * o.cols + j] + &(a * b);
                        m.data[i * o.cols + j] = cur;
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn mul_vec(&self, v: &CVec) -> Result<CVec> {
        v.check_dim(self.cols)?;
        Ok(CVec(
            (0..self.rows)
                .map(|i| {
                    let mut acc = CRat::zero();
                    for (a, b) in self.row(i).iter().zip(&v.0) {
                        if !a.is_zero() && !b.is_zero() {
                            acc += &(a * b);
                        }
                    }
                    acc
                })
                .collect(),
        ))
    }

    pub fn scale_r(&self, r: &Rational) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.scale(r)).collect(),
        }
    }

    pub fn add(&self, o: &CMat) -> Result<CMat> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                got: o.rows * o.cols,
            });
        }
        Ok(CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn to_c64(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_c64())
    }
}

/// A unit vector `direction/√norm_sq` with rational direction.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ScaledUnitVector {
    direction: CVec,
    norm_sq: Rational,
}

impl ScaledUnitVector {
    /// Fails on the null vector.
    pub fn new(direction: CVec) -> Result<Self> {
        let norm_sq = direction.norm_sq();
        if norm_sq.is_zero() {
            return Err(Error::InvalidArgument("null vector has no direction".into()));
        }
        Ok(ScaledUnitVector { direction, norm_sq })
    }

    /// Parses `nsq p/q : a1, a2, …`, checking `nsq` against the direction.
    pub fn parse(line: &str) -> Result<Self> {
        let bad = |m: &str| Error::InvalidArgument(format!("bad vector line `{line}`: {m}"));
        let rest = line.trim().strip_prefix("nsq").ok_or_else(|| bad("missing nsq"))?;
        let (nsq, entries) = rest.split_once(':').ok_or_else(|| bad("missing `:`"))?;
        let nsq = parse_rational(nsq)?;
        let dir = CVec(
            entries
                .split(',')
                .map(|e| CRat::parse(e.trim()))
                .collect::<Result<Vec<_>>>()?,
        );
        let v = ScaledUnitVector::new(dir)?;
        if v.norm_sq != nsq {
            return Err(bad("nsq disagrees with the direction"));
        }
        Ok(v)
    }

    pub fn direction(&self) -> &CVec {
        &self.direction
    }

    pub fn norm_sq(&self) -> &Rational {
        &self.norm_sq
    }

    pub fn dim(&self) -> usize {
        self.direction.dim()
    }

    /// Same unit vector with the direction rescaled to coprime integer parts.
    pub fn primitive(&self) -> ScaledUnitVector {
        use num_integer::Integer;
        let parts = || self.direction.0.iter().flat_map(|c| [&c.re, &c.im]);
        let den = parts().fold(num_bigint::BigInt::one(), |d, p| d.lcm(p.denom()));
        let num = parts().fold(num_bigint::BigInt::zero(), |g, p| g.gcd(&(p * &den).to_integer()));
        let f = Rational::new(den, num);
        ScaledUnitVector::new(self.direction.scale_r(&f)).expect("nonzero direction")
    }

    /// Exact `⟨self|o⟩` between the normalised vectors.
    pub fn inner(&self, o: &ScaledUnitVector) -> Surd {
        let ip = self.direction.inner(&o.direction);
        let w = &self.norm_sq * &o.norm_sq;
        Surd::inv_sqrt(&w).expect("positive norms").scale_c(&ip)
    }

    pub fn to_surd_vec(&self) -> SurdVec {
        let s = Surd::inv_sqrt(&self.norm_sq).expect("positive norm");
        SurdVec(self.direction.0.iter().map(|c| s.scale_c(c)).collect())
    }

    pub fn to_c64(&self) -> DVector<Complex64> {
        let s = rat_to_f64(&self.norm_sq).sqrt();
        self.direction.to_c64() / Complex64::new(s, 0.0)
    }

    /// Projector `|v⟩⟨v|`, exact and rational.
    pub fn projector(&self) -> CMat {
        let inv = Rational::one() / &self.norm_sq;
        CMat::outer(&self.direction, &self.direction).scale_r(&inv)
    }
}

impl fmt::Display for ScaledUnitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "nsq {} : ", format_rational(&self.norm_sq))?;
        for (i, c) in self.direction.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Vector with exact surd entries; carries standard-compression payloads.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SurdVec(pub Vec<Surd>);

impl SurdVec {
    pub fn zeros(dim: usize) -> Self {
        SurdVec(vec![Surd::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn inner(&self, o: &SurdVec) -> Surd {
        let mut acc = Surd::zero();
        for (a, b) in self.0.iter().zip(&o.0) {
            if !a.is_zero() && !b.is_zero() {
                acc.add_assign(&a.conj().mul(b));
            }
        }
        acc
    }

    pub fn norm_sq(&self) -> Surd {
        self.inner(self)
    }

    pub fn to_c64(&self) -> DVector<Complex64> {
        DVector::from_iterator(self.dim(), self.0.iter().map(Surd::to_c64))
    }

    /// Rewrites the vector as a [`ScaledUnitVector`] when every entry shares
    /// one radicand and the squared norm is one.
    pub fn to_scaled(&self) -> Option<ScaledUnitVector> {
        let mut radicand = None;
        let mut dir = Vec::with_capacity(self.dim());
        for e in &self.0 {
            if e.is_zero() {
                dir.push((None, CRat::zero()));
                continue;
            }
            let (k, c) = e.single_radicand()?;
            match &radicand {
                None => radicand = Some(k.clone()),
                Some(k0) if *k0 == k => {}
                Some(_) => return None,
            }
            dir.push((Some(k), c));
        }
        let k = radicand?;
        let dir = CVec(dir.into_iter().map(|(_, c)| c).collect());
        let v = ScaledUnitVector::new(dir).ok()?;
        let expect = Rational::from_integer(num_bigint::BigInt::from(k));
        if *v.norm_sq() == expect {
            Some(v)
        } else {
            None
        }
    }

    /// One vector per line: the `nsq` form when possible, otherwise
    /// `surd s1, s2, …` with `c~k` terms meaning `c/√k`.
    pub fn dump(&self) -> String {
        match self.to_scaled() {
            Some(v) => v.to_string(),
            None => {
                let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
                format!("surd {}", parts.join(", "))
            }
        }
    }

    pub fn parse(line: &str) -> Result<SurdVec> {
        let t = line.trim();
        if let Some(rest) = t.strip_prefix("surd") {
            Ok(SurdVec(
                rest.split(',')
                    .map(|e| Surd::parse(e.trim()))
                    .collect::<Result<Vec<_>>>()?,
            ))
        } else {
            Ok(ScaledUnitVector::parse(t)?.to_surd_vec())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::rat;

    #[test]
    fn scaled_vector_dump_round_trip() {
        let v = ScaledUnitVector::new(CVec::from_ints(&[(1, 0), (0, -1), (2, 3)])).unwrap();
        assert_eq!(*v.norm_sq(), rat(15, 1));
        let line = v.to_string();
        assert_eq!(ScaledUnitVector::parse(&line).unwrap(), v);
        assert!(ScaledUnitVector::parse("nsq 2/1 : 1/1+0/1i").is_err());
    }

    #[test]
    fn surd_vec_scaled_form() {
        let v = ScaledUnitVector::new(CVec::from_ints(&[(1, 0), (1, 0)])).unwrap();
        let s = v.to_surd_vec();
        assert_eq!(s.to_scaled().unwrap(), v);
        assert!(s.norm_sq().is_one());
        let back = SurdVec::parse(&s.dump()).unwrap();
        assert_eq!(back, s);
    }
}
