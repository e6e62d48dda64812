//! Floating spectral utilities. Exactness is kept for rank and orthogonality;
//! eigenvalues go through nalgebra's Hermitian tridiagonalisation.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::rational::{CRat, Rational};
use super::vector::{CMat, CVec};
use crate::error::{Error, Result};

pub type FMat = DMatrix<Complex64>;
pub type FVec = DVector<Complex64>;

const HERMITIAN_TOL: f64 = 1e-9;

pub fn is_hermitian_f(m: &FMat, tol: f64) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    for i in 0..m.nrows() {
        for j in 0..=i {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > tol * scale {
                return false;
            }
        }
    }
    true
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &FMat) -> Result<Vec<f64>> {
    if !is_hermitian_f(m, HERMITIAN_TOL) {
        return Err(Error::NotHermitian);
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(ev)
}

/// Eigen-decomposition `(values, vectors)` of a Hermitian matrix, values descending.
pub fn hermitian_eigen(m: &FMat) -> Result<(Vec<f64>, FMat)> {
    if !is_hermitian_f(m, HERMITIAN_TOL) {
        return Err(Error::NotHermitian);
    }
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = FMat::from_fn(m.nrows(), idx.len(), |r, c| eig.eigenvectors[(r, idx[c])]);
    Ok((vals, vecs))
}

/// `½ Tr|ρ−σ|`.
pub fn trace_distance(rho: &FMat, sigma: &FMat) -> Result<f64> {
    if rho.shape() != sigma.shape() {
        return Err(Error::DimensionMismatch {
            expected: rho.nrows(),
            got: sigma.nrows(),
        });
    }
    if !is_hermitian_f(rho, HERMITIAN_TOL) || !is_hermitian_f(sigma, HERMITIAN_TOL) {
        return Err(Error::NotHermitian);
    }
    trace_norm_half(&(rho - sigma))
}

/// `½ Tr|Δ|` for Hermitian `Δ`.
pub fn trace_norm_half(delta: &FMat) -> Result<f64> {
    Ok(0.5 * hermitian_eigenvalues(delta)?.iter().map(|x| x.abs()).sum::<f64>())
}

/// Exact-input variant: hermiticity is checked exactly.
pub fn trace_distance_exact(rho: &CMat, sigma: &CMat) -> Result<f64> {
    if !rho.is_hermitian() || !sigma.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    trace_distance(&rho.to_c64(), &sigma.to_c64())
}

/// `√(1−|⟨ψ|φ⟩|²)` for unit vectors.
pub fn pure_trace_distance(psi: &FVec, phi: &FVec) -> f64 {
    let ov = psi.dotc(phi).norm_sqr();
    (1.0 - ov).max(0.0).sqrt()
}

/// Largest absolute eigenvalue of a Hermitian matrix.
pub fn hermitian_op_norm(m: &FMat) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?.iter().map(|x| x.abs()).fold(0.0, f64::max))
}

/// Largest singular value.
pub fn op_norm(m: &FMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// `−Σ p log₂ p`, ignoring non-positive entries.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

/// von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &FMat) -> Result<f64> {
    Ok(shannon_entropy(&hermitian_eigenvalues(rho)?))
}

/// `|ψ⟩⟨ψ|`.
pub fn projector(psi: &FVec) -> FMat {
    psi * psi.adjoint()
}

fn round_to_dyadic(r: &Rational, digits: u32) -> Rational {
    let scale = BigInt::from(1u8) << digits;
    let num = r.numer() * &scale;
    let den = r.denom().clone();
    let (q, rem) = num.div_mod_floor(&den);
    let up = (rem * BigInt::from(2u8)) >= den;
    let k = if up { q + BigInt::from(1u8) } else { q };
    Rational::new(k, scale)
}

/// The nearest multiple of `2^{−digits}` to every part, as exact rationals.
pub fn approx_to_dyadic(v: &CVec, digits: u32) -> CVec {
    CVec(
        v.0.iter()
            .map(|c| CRat::new(round_to_dyadic(&c.re, digits), round_to_dyadic(&c.im, digits)))
            .collect(),
    )
}

/// Double approximation with every real and imaginary part within `2^{−digits}`.
/// Beyond 52 digits a double cannot hold the rounding grid and the result is the
/// nearest double of each part, accurate to one unit in the last place.
pub fn approx_to_digits(v: &CVec, digits: u32) -> FVec {
    if digits > 52 {
        return v.to_c64();
    }
    let d = approx_to_dyadic(v, digits);
    FVec::from_iterator(
        d.dim(),
        d.0.iter()
            .map(|c| Complex64::new(c.re.to_f64().unwrap_or(f64::NAN), c.im.to_f64().unwrap_or(f64::NAN))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::rat;

    #[test]
    fn trace_distance_examples() {
        let e0 = FVec::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let e1 = FVec::from_vec(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        let p = projector(&e0);
        assert!(trace_distance(&p, &p).unwrap().abs() < 1e-15);
        assert!((trace_distance(&p, &projector(&e1)).unwrap() - 1.0).abs() < 1e-12);
        let s = 0.5f64.sqrt();
        let plus = FVec::from_vec(vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)]);
        let d = trace_distance(&p, &projector(&plus)).unwrap();
        assert!((d - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((pure_trace_distance(&e0, &plus) - d).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = FMat::zeros(2, 2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert_eq!(trace_distance(&m, &m), Err(Error::NotHermitian));
    }

    #[test]
    fn digits_examples() {
        let v = CVec::from_ints(&[(1, 0), (0, 0)]);
        let a = approx_to_digits(&v, 8);
        assert_eq!(a[0], Complex64::new(1.0, 0.0));
        assert_eq!(a[1], Complex64::new(0.0, 0.0));
        let third = CVec::from_reals(&[rat(1, 3)]);
        assert!((approx_to_digits(&third, 4)[0].re - 1.0 / 3.0).abs() < 1.0 / 16.0);
        // long division of 1/7 to 30 binary places is the oracle
        let seventh = CVec::from_reals(&[rat(1, 7)]);
        let mut rem = 1u64;
        let mut oracle = 0.0f64;
        for i in 1..=30 {
            rem *= 2;
            let bit = rem / 7;
            rem %= 7;
            oracle += bit as f64 * 2f64.powi(-i);
        }
        let got = approx_to_digits(&seventh, 20)[0].re;
        assert!((got - oracle).abs() < 2f64.powi(-20));
    }
}
