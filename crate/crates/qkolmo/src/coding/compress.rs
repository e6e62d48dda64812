use num_complex::Complex64;
use num_traits::One;

use crate::error::{Error, Result};
use crate::linalg::{gram_schmidt, CVec, FVec, Rational, ScaledUnitVector, Surd, SurdVec};
use crate::qtm::{block_dim, Density, QubitString, SurdMat};

/// `⌈log₂ n⌉`, with `⌈log 1⌉ = 0`.
pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Gram-Schmidt of the projections `P_U|eᵢ⟩` in computational order.
pub fn standard_basis(u: &[CVec]) -> Result<Vec<ScaledUnitVector>> {
    let ortho = gram_schmidt(u)?;
    if ortho.is_empty() {
        return Err(Error::EmptySpan);
    }
    let dim = ortho[0].dim();
    let mut projections = Vec::new();
    let mut out = Vec::new();
    for i in 0..dim {
        let mut p = CVec::zeros(dim);
        for b in &ortho {
            let c = b.direction().0[i].conj();
            if !c.is_zero() {
                p.axpy(&c.scale(&(Rational::one() / b.norm_sq())), b.direction());
            }
        }
        if p.is_zero() {
            continue;
        }
        projections.push(p);
        out = gram_schmidt(&projections)?;
        if out.len() == ortho.len() {
            break;
        }
        projections = out.iter().map(|v| v.direction().clone()).collect();
    }
    Ok(out.iter().map(ScaledUnitVector::primitive).collect())
}

/// Standard compression `C_U` onto `⌈log dim U⌉` qubits and its inverse.
#[derive(Clone, Debug)]
pub struct CompressionMap {
    basis: Vec<ScaledUnitVector>,
    unit: Vec<SurdVec>,
    source_qubits: usize,
    target_qubits: usize,
}

impl CompressionMap {
    /// `u` spans `U ⊆ H_n`.
    pub fn new(u: &[CVec]) -> Result<CompressionMap> {
        let basis = standard_basis(u)?;
        let dim = basis[0].dim();
        if !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "ambient dimension {dim} is not a power of two"
            )));
        }
        Ok(CompressionMap {
            unit: basis.iter().map(ScaledUnitVector::to_surd_vec).collect(),
            source_qubits: dim.trailing_zeros() as usize,
            target_qubits: ceil_log2(basis.len()),
            basis,
        })
    }

    pub fn from_basis(basis: Vec<ScaledUnitVector>) -> Result<CompressionMap> {
        let dirs: Vec<CVec> = basis.iter().map(|b| b.direction().clone()).collect();
        CompressionMap::new(&dirs)
    }

    pub fn basis(&self) -> &[ScaledUnitVector] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn source_qubits(&self) -> usize {
        self.source_qubits
    }

    pub fn target_qubits(&self) -> usize {
        self.target_qubits
    }

    /// Coordinates `⟨uᵢ|ψ⟩`, failing unless `ψ ∈ U` exactly.
    pub fn coordinates(&self, psi: &SurdVec) -> Result<Vec<Surd>> {
        if psi.dim() != 1 << self.source_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << self.source_qubits,
                got: psi.dim(),
            });
        }
        let coords: Vec<Surd> = self.unit.iter().map(|u| u.inner(psi)).collect();
        let mut rest = psi.clone();
        for (c, u) in coords.iter().zip(&self.unit) {
            if c.is_zero() {
                continue;
            }
            for (r, x) in rest.0.iter_mut().zip(&u.0) {
                if !x.is_zero() {
                    *r = r.sub(&c.mul(x));
                }
            }
        }
        if rest.0.iter().all(Surd::is_zero) {
            Ok(coords)
        } else {
            Err(Error::NotInSubspace)
        }
    }

    /// `uᵢ ↦ fᵢ`.
    pub fn compress(&self, psi: &SurdVec) -> Result<SurdVec> {
        let coords = self.coordinates(psi)?;
        let mut chi = SurdVec::zeros(1 << self.target_qubits);
        for (i, c) in coords.into_iter().enumerate() {
            chi.0[i] = c;
        }
        Ok(chi)
    }

    pub fn compress_rational(&self, psi: &CVec) -> Result<SurdVec> {
        self.compress(&SurdVec(psi.0.iter().cloned().map(Surd::from_crat).collect()))
    }

    /// Exact inverse on the range: `∑ χᵢ uᵢ`.
    pub fn decompress(&self, chi: &SurdVec) -> Result<SurdVec> {
        self.check_payload(chi.dim())?;
        if chi.0[self.dim()..].iter().any(|x| !x.is_zero()) {
            return Err(Error::NotInSubspace);
        }
        let mut out = SurdVec::zeros(1 << self.source_qubits);
        for (c, u) in chi.0.iter().zip(&self.unit) {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.0.iter_mut().zip(&u.0) {
                if !x.is_zero() {
                    o.add_assign(&c.mul(x));
                }
            }
        }
        Ok(out)
    }

    /// Binary digits of matrix-entry accuracy asked for by the precision
    /// budget `δ / (2^{n+1} (10·√2ⁿ)^{2ⁿ})`.
    pub fn required_digits(&self, delta: f64) -> u32 {
        let n = self.source_qubits as f64;
        let d = 2f64.powf(n);
        let log_budget = delta.log2() - (n + 1.0) - d * (10.0 * d.sqrt()).log2();
        (-log_budget).ceil().max(1.0) as u32
    }

    /// Floating decompression with the standard basis rounded to the precision
    /// budget (capped at double precision).
    pub fn decompress_float(&self, chi: &FVec, delta: f64) -> Result<FVec> {
        self.check_payload(chi.len())?;
        let digits = self.required_digits(delta).min(52);
        let scale = 2f64.powi(digits as i32);
        let round = |x: f64| (x * scale).round() / scale;
        let mut out = FVec::zeros(1 << self.source_qubits);
        for (i, u) in self.unit.iter().enumerate() {
            let c = chi[i];
            for (o, x) in out.iter_mut().zip(&u.0) {
                let z = x.to_c64();
                *o += c * Complex64::new(round(z.re), round(z.im));
            }
        }
        Ok(out)
    }

    fn check_payload(&self, len: usize) -> Result<()> {
        if len != 1 << self.target_qubits {
            Err(Error::DimensionMismatch {
                expected: 1 << self.target_qubits,
                got: len,
            })
        } else {
            Ok(())
        }
    }
}

/// `V_n`: block basis vector `i` of `⊕_{k≤n} H_k` ↦ computational vector `i`
/// of `H_{n+1}`, with `n = ℓ(σ)`.
pub fn embed_fixed_length(sigma: &QubitString) -> QubitString {
    let sigma = sigma.clone().trimmed();
    let n = sigma.max_len();
    let off = (1usize << (n + 1)) - 1;
    let dim = block_dim(n + 1);
    let src = block_dim(n);
    let rho = match sigma.density() {
        Density::Exact(m) => {
            let mut out = SurdMat::zeros(dim);
            for i in 0..src {
                for j in 0..src {
                    let e = m.get(i, j);
                    if !e.is_zero() {
                        out.set(off + i, off + j, e.clone());
                    }
                }
            }
            Density::Exact(out)
        }
        Density::Float(m) => {
            let mut out = crate::linalg::FMat::zeros(dim, dim);
            for i in 0..src {
                for j in 0..src {
                    out[(off + i, off + j)] = m[(i, j)];
                }
            }
            Density::Float(out)
        }
    };
    QubitString::new_unchecked(n + 1, rho)
}

/// Inverse of [`embed_fixed_length`]; fails outside the embedded range.
pub fn unembed_fixed_length(tau: &QubitString) -> Result<QubitString> {
    let tau = tau.clone().trimmed();
    let m = tau.max_len();
    if m == 0 {
        return Err(Error::NotInSubspace);
    }
    let n = m - 1;
    let off = (1usize << m) - 1;
    let src = block_dim(n);
    let supp = tau.support();
    if supp.iter().any(|&i| i < off || i >= off + src) {
        return Err(Error::NotInSubspace);
    }
    let rho = match tau.density() {
        Density::Exact(mm) => {
            let mut out = SurdMat::zeros(src);
            for i in 0..src {
                for j in 0..src {
                    out.set(i, j, mm.get(off + i, off + j).clone());
                }
            }
            Density::Exact(out)
        }
        Density::Float(mm) => Density::Float(mm.view((off, off), (src, src)).into_owned()),
    };
    Ok(QubitString::new_unchecked(n, rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn e(dim: usize, i: usize) -> CVec {
        CVec::basis(dim, i)
    }

    #[test]
    fn standard_basis_examples() {
        let b = standard_basis(&[e(4, 0), e(4, 1)]).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b[0].direction(), &e(4, 0));
        assert_eq!(b[1].direction(), &e(4, 1));
        let full = standard_basis(&[CVec::from_ints(&[(1, 0), (1, 0)]), CVec::from_ints(&[(1, 0), (-1, 0)])]).unwrap();
        assert_eq!(full[0].direction(), &e(2, 0));
        assert_eq!(full[1].direction(), &e(2, 1));
        let line = standard_basis(&[CVec::from_ints(&[(1, 0), (1, 0)])]).unwrap();
        assert_eq!(line.len(), 1);
        assert_eq!(*line[0].norm_sq(), rat(2, 1));
        assert_eq!(line[0].direction().0[0], line[0].direction().0[1]);
        assert!(matches!(standard_basis(&[CVec::zeros(2)]), Err(Error::EmptySpan)));
    }

    #[test]
    fn compression_examples() {
        let map = CompressionMap::new(&[e(4, 0), e(4, 1)]).unwrap();
        assert_eq!(map.target_qubits(), 1);
        let chi = map.compress_rational(&e(4, 1)).unwrap();
        assert!(chi.0[0].is_zero() && chi.0[1].is_one());
        assert_eq!(
            map.decompress(&chi).unwrap().0,
            SurdVec(e(4, 1).0.into_iter().map(Surd::from_crat).collect()).0
        );
        assert!(matches!(map.compress_rational(&e(4, 2)), Err(Error::NotInSubspace)));

        let one = CompressionMap::new(&[CVec::from_ints(&[(1, 0), (1, 0)])]).unwrap();
        assert_eq!(one.target_qubits(), 0);
        let h = Surd::inv_sqrt(&rat(2, 1)).unwrap();
        let psi = SurdVec(vec![h.clone(), h]);
        let chi = one.compress(&psi).unwrap();
        assert_eq!(chi.dim(), 1);
        assert!(chi.0[0].is_one());
        assert_eq!(one.decompress(&chi).unwrap(), psi);
        let f = one.decompress_float(&chi.to_c64(), 1e-6).unwrap();
        assert!((f - psi.to_c64()).norm() < 1e-6);
    }

    #[test]
    fn fixed_length_embedding() {
        let l = embed_fixed_length(&QubitString::empty());
        assert_eq!(l.max_len(), 1);
        assert!(l.exact_eq(&QubitString::classical("0").unwrap()).unwrap());
        let h = Surd::inv_sqrt(&rat(2, 1)).unwrap();
        let s = QubitString::pure(&[("0".into(), h.clone()), ("11".into(), h.clone())]).unwrap();
        let t = embed_fixed_length(&s);
        assert_eq!(t.lengths().0, 3);
        let want = QubitString::pure(&[("001".into(), h.clone()), ("110".into(), h)]).unwrap();
        assert!(t.exact_eq(&want).unwrap());
        assert!(unembed_fixed_length(&t).unwrap().exact_eq(&s).unwrap());
        assert!(unembed_fixed_length(&QubitString::classical("111").unwrap()).is_err());
    }
}
