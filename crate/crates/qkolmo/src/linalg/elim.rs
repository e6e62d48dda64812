use num_traits::One;

use super::rational::{CRat, Rational};
use super::vector::{CVec, ScaledUnitVector};
use crate::error::{Error, Result};

/// Row space kept in reduced row echelon form, extended one row at a time.
#[derive(Clone, Debug)]
pub struct RowSpace {
    ncols: usize,
    rows: Vec<(usize, Vec<CRat>)>,
}

impl RowSpace {
    pub fn new(ncols: usize) -> Self {
        RowSpace {
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ncols
    }

    fn reduce(&self, v: &mut [CRat]) {
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &(&f * r);
                }
            }
        }
    }

    /// Exact test without modifying the space.
    pub fn contains(&self, v: &[CRat]) -> Result<bool> {
        self.check(v.len())?;
        let mut w = v.to_vec();
        self.reduce(&mut w);
        Ok(w.iter().all(CRat::is_zero))
    }

    /// Adds a row; returns whether the rank grew.
    pub fn insert(&mut self, v: &[CRat]) -> Result<bool> {
        self.check(v.len())?;
        if self.is_full() {
            return Ok(false);
        }
        let mut w = v.to_vec();
        self.reduce(&mut w);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return Ok(false);
        };
        let inv = w[p].inv().expect("nonzero pivot");
        for x in w.iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        for (_, row) in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, r) in row.iter_mut().zip(&w) {
                if !r.is_zero() {
                    *x -= &(&f * r);
                }
            }
        }
        self.rows.push((p, w));
        self.rows.sort_by_key(|(p, _)| *p);
        Ok(true)
    }

    /// Basis of `{x : row·x = 0 for every row}`.
    pub fn nullspace(&self) -> Vec<CVec> {
        let pivots: Vec<usize> = self.rows.iter().map(|(p, _)| *p).collect();
        let mut out = Vec::new();
        for f in (0..self.ncols).filter(|c| !pivots.contains(c)) {
            let mut x = CVec::zeros(self.ncols);
            x.0[f] = CRat::one();
            for (p, row) in &self.rows {
                x.0[*p] = -&row[f];
            }
            out.push(x);
        }
        out
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.ncols {
            Err(Error::DimensionMismatch {
                expected: self.ncols,
                got: len,
            })
        } else {
            Ok(())
        }
    }
}

fn common_dim<'a>(vs: impl IntoIterator<Item = &'a CVec>) -> Result<Option<usize>> {
    let mut dim = None;
    for v in vs {
        match dim {
            None => dim = Some(v.dim()),
            Some(d) => v.check_dim(d)?,
        }
    }
    Ok(dim)
}

/// Exact Gram-Schmidt in input order; null vectors are dropped.
pub fn gram_schmidt(vectors: &[CVec]) -> Result<Vec<ScaledUnitVector>> {
    common_dim(vectors)?;
    let mut out: Vec<ScaledUnitVector> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for u in &out {
            let c = u.direction().inner(v);
            if c.is_zero() {
                continue;
            }
            let c = c.scale(&(Rational::one() / u.norm_sq()));
            w.axpy(&-c, u.direction());
        }
        if !w.is_zero() {
            out.push(ScaledUnitVector::new(w)?);
        }
    }
    Ok(out)
}

/// Exact rank of `basis` and whether `candidate` lies in its span.
pub fn rank_and_membership(basis: &[CVec], candidate: &CVec) -> Result<(usize, bool)> {
    let dim = candidate.dim();
    let mut rs = RowSpace::new(dim);
    for b in basis {
        b.check_dim(dim)?;
        rs.insert(&b.0)?;
    }
    let inside = rs.contains(&candidate.0)?;
    Ok((rs.rank(), inside))
}

/// Exact rank of a family of vectors.
pub fn rank(vectors: &[CVec]) -> Result<usize> {
    let Some(dim) = common_dim(vectors)? else {
        return Ok(0);
    };
    let mut rs = RowSpace::new(dim);
    for v in vectors {
        rs.insert(&v.0)?;
    }
    Ok(rs.rank())
}

/// Exact equality of spans by mutual membership.
pub fn same_span(a: &[CVec], b: &[CVec]) -> Result<bool> {
    let Some(dim) = common_dim(a.iter().chain(b))? else {
        return Ok(true);
    };
    let mut ra = RowSpace::new(dim);
    for v in a {
        ra.insert(&v.0)?;
    }
    let mut rb = RowSpace::new(dim);
    for v in b {
        rb.insert(&v.0)?;
    }
    for v in a {
        if !rb.contains(&v.0)? {
            return Ok(false);
        }
    }
    for v in b {
        if !ra.contains(&v.0)? {
            return Ok(false);
        }
    }
    Ok(true)
}
