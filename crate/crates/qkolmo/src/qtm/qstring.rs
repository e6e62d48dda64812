use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, CRat, FMat, Rational, Surd, SurdVec};

/// Position of a classical string in the ordered basis `λ, 0, 1, 00, 01, …`.
pub fn string_index(s: &str) -> usize {
    let mut v = 0usize;
    for c in s.chars() {
        v = 2 * v + usize::from(c == '1');
    }
    (1usize << s.len()) - 1 + v
}

/// Inverse of [`string_index`].
pub fn index_string(idx: usize) -> String {
    let len = (usize::BITS - (idx + 1).leading_zeros() - 1) as usize;
    let v = idx + 1 - (1usize << len);
    (0..len)
        .map(|i| if (v >> (len - 1 - i)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// The `2^n` strings of length `n` in lexicographic order.
pub fn strings_of_len(n: usize) -> Vec<String> {
    (0..1usize << n)
        .map(|v| {
            (0..n)
                .map(|i| if (v >> (n - 1 - i)) & 1 == 1 { '1' } else { '0' })
                .collect()
        })
        .collect()
}

/// Longest base length held as a dense density matrix.
pub const MAX_DENSE_LEN: usize = 12;

fn check_len(n: usize) -> Result<()> {
    if n > MAX_DENSE_LEN {
        return Err(Error::CapExceeded {
            what: "qubit string base length",
            value: n as u128,
            cap: MAX_DENSE_LEN as u128,
        });
    }
    Ok(())
}

/// Dimension of `⊕_{k ≤ n} H_k`.
pub fn block_dim(n: usize) -> usize {
    (1usize << (n + 1)) - 1
}

pub fn is_binary(s: &str) -> bool {
    s.chars().all(|c| c == '0' || c == '1')
}

/// Square matrix of exact surd entries, sparse in practice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurdMat {
    dim: usize,
    data: Vec<Surd>,
}

impl SurdMat {
    pub fn zeros(dim: usize) -> Self {
        SurdMat {
            dim,
            data: vec![Surd::zero(); dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &Surd {
        &self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Surd) {
        self.data[i * self.dim + j] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: &Surd) {
        self.data[i * self.dim + j].add_assign(v);
    }

    pub fn is_hermitian(&self) -> bool {
        (0..self.dim).all(|i| (0..=i).all(|j| *self.get(i, j) == self.get(j, i).conj()))
    }

    pub fn trace(&self) -> Surd {
        let mut t = Surd::zero();
        for i in 0..self.dim {
            t.add_assign(self.get(i, i));
        }
        t
    }

    pub fn to_c64(&self) -> FMat {
        FMat::from_fn(self.dim, self.dim, |i, j| self.get(i, j).to_c64())
    }

    /// All entries as Gaussian rationals, if they are.
    pub fn as_crat(&self) -> Option<Vec<CRat>> {
        self.data.iter().map(Surd::as_crat).collect()
    }
}

/// Exact positive semidefiniteness of a Hermitian Gaussian-rational matrix by
/// symmetric pivoting on positive diagonal entries.
pub fn is_psd_exact(dim: usize, entries: &[CRat]) -> bool {
    let mut a: Vec<Vec<CRat>> = (0..dim).map(|i| entries[i * dim..(i + 1) * dim].to_vec()).collect();
    loop {
        let n = a.len();
        if n == 0 {
            return true;
        }
        if a.iter().enumerate().any(|(i, r)| r[i].re < Rational::zero()) {
            return false;
        }
        match (0..n).find(|&i| !r_is_zero(&a[i][i])) {
            None => return a.iter().all(|r| r.iter().all(CRat::is_zero)),
            Some(p) => {
                let d = a[p][p].re.clone();
                let col: Vec<CRat> = (0..n).map(|i| a[i][p].clone()).collect();
                let mut next = Vec::with_capacity(n - 1);
                for i in (0..n).filter(|&i| i != p) {
                    let mut row = Vec::with_capacity(n - 1);
                    for j in (0..n).filter(|&j| j != p) {
                        let s = (&col[i] * &col[j].conj()).scale(&(Rational::from_integer(1.into()) / &d));
                        row.push(&a[i][j] - &s);
                    }
                    next.push(row);
                }
                a = next;
            }
        }
    }
}

fn r_is_zero(c: &CRat) -> bool {
    c.is_zero()
}

#[derive(Clone, Debug)]
pub enum Density {
    Exact(SurdMat),
    Float(FMat),
}

/// A density operator on `⊕_{k ≤ max_len} H_k`.
#[derive(Clone, Debug)]
pub struct QubitString {
    max_len: usize,
    rho: Density,
}

impl QubitString {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(max_len: usize, rho: Density) -> Result<QubitString> {
        let dim = block_dim(max_len);
        match &rho {
            Density::Exact(m) => {
                if m.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: m.dim(),
                    });
                }
                if !m.is_hermitian() {
                    return Err(Error::NotHermitian);
                }
                if !m.trace().is_one() {
                    return Err(Error::InvalidArgument("trace is not one".into()));
                }
                let supp: Vec<usize> = (0..dim).filter(|&i| !m.get(i, i).is_zero()).collect();
                let mut sub = SurdMat::zeros(supp.len());
                for (a, &i) in supp.iter().enumerate() {
                    for (b, &j) in supp.iter().enumerate() {
                        sub.set(a, b, m.get(i, j).clone());
                    }
                }
                let psd = match sub.as_crat() {
                    Some(e) => is_psd_exact(supp.len(), &e),
                    None => hermitian_eigenvalues(&sub.to_c64())?.iter().all(|&x| x >= -1e-10),
                };
                if !psd {
                    return Err(Error::InvalidArgument("density is not positive".into()));
                }
                // A zero diagonal forces a zero row in a positive matrix.
                for i in (0..dim).filter(|i| !supp.contains(i)) {
                    if (0..dim).any(|j| !m.get(i, j).is_zero()) {
                        return Err(Error::InvalidArgument("density is not positive".into()));
                    }
                }
            }
            Density::Float(m) => {
                if m.nrows() != dim || m.ncols() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: m.nrows(),
                    });
                }
                let ev = hermitian_eigenvalues(m)?;
                if ev.iter().any(|&x| x < -1e-10) {
                    return Err(Error::InvalidArgument("density is not positive".into()));
                }
                if (m.trace().re - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidArgument("trace is not one".into()));
                }
            }
        }
        Ok(QubitString { max_len, rho })
    }

    pub(crate) fn new_unchecked(max_len: usize, rho: Density) -> QubitString {
        QubitString { max_len, rho }
    }

    /// `|s⟩⟨s|` for a classical string.
    pub fn classical(s: &str) -> Result<QubitString> {
        if !is_binary(s) {
            return Err(Error::InvalidArgument(format!("not a binary string: `{s}`")));
        }
        let n = s.len();
        check_len(n)?;
        let mut m = SurdMat::zeros(block_dim(n));
        let i = string_index(s);
        m.set(i, i, Surd::one());
        Ok(QubitString::new_unchecked(n, Density::Exact(m)))
    }

    /// The empty string λ.
    pub fn empty() -> QubitString {
        QubitString::classical("").expect("empty string")
    }

    /// Pure state `Σ a_s |s⟩` given by string components (need not be normalised
    /// to the same length; must have unit norm exactly).
    pub fn pure(components: &[(String, Surd)]) -> Result<QubitString> {
        let max_len = components.iter().map(|(s, _)| s.len()).max().unwrap_or(0);
        check_len(max_len)?;
        let mut v = SurdVec::zeros(block_dim(max_len));
        for (s, a) in components {
            if !is_binary(s) {
                return Err(Error::InvalidArgument(format!("not a binary string: `{s}`")));
            }
            v.0[string_index(s)].add_assign(a);
        }
        QubitString::from_block_vector(max_len, &v)
    }

    /// Pure state from a vector on `⊕_{k ≤ max_len} H_k`.
    pub fn from_block_vector(max_len: usize, v: &SurdVec) -> Result<QubitString> {
        check_len(max_len)?;
        let dim = block_dim(max_len);
        if v.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.dim(),
            });
        }
        if !v.norm_sq().is_one() {
            return Err(Error::InvalidArgument("pure state must have unit norm".into()));
        }
        let mut m = SurdMat::zeros(dim);
        let nz: Vec<usize> = (0..dim).filter(|&i| !v.0[i].is_zero()).collect();
        for &i in &nz {
            for &j in &nz {
                m.set(i, j, v.0[i].mul(&v.0[j].conj()));
            }
        }
        Ok(QubitString::new_unchecked(max_len, Density::Exact(m)))
    }

    /// Pure state of fixed length `n` from a vector on `H_n`.
    pub fn fixed_length(n: usize, v: &SurdVec) -> Result<QubitString> {
        check_len(n)?;
        if v.dim() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                got: v.dim(),
            });
        }
        let mut b = SurdVec::zeros(block_dim(n));
        let off = (1usize << n) - 1;
        for (i, a) in v.0.iter().enumerate() {
            b.0[off + i] = a.clone();
        }
        QubitString::from_block_vector(n, &b)
    }

    /// Floating pure state of fixed length `n`.
    pub fn fixed_length_float(n: usize, v: &crate::linalg::FVec) -> Result<QubitString> {
        check_len(n)?;
        let dim = block_dim(n);
        let off = (1usize << n) - 1;
        let mut m = FMat::zeros(dim, dim);
        for i in 0..v.len() {
            for j in 0..v.len() {
                m[(off + i, off + j)] = v[i] * v[j].conj();
            }
        }
        QubitString::new(n, Density::Float(m))
    }

    /// Convex combination; exact iff all parts are exact.
    pub fn mixture(parts: &[(Rational, QubitString)]) -> Result<QubitString> {
        let max_len = parts.iter().map(|(_, s)| s.max_len).max().unwrap_or(0);
        let dim = block_dim(max_len);
        let all_exact = parts.iter().all(|(_, s)| matches!(s.rho, Density::Exact(_)));
        if all_exact {
            let mut m = SurdMat::zeros(dim);
            for (w, s) in parts {
                let Density::Exact(r) = &s.rho else { unreachable!() };
                for i in 0..r.dim() {
                    for j in 0..r.dim() {
                        let e = r.get(i, j);
                        if !e.is_zero() {
                            m.add_at(i, j, &e.scale(w));
                        }
                    }
                }
            }
            QubitString::new(max_len, Density::Exact(m))
        } else {
            let mut m = FMat::zeros(dim, dim);
            for (w, s) in parts {
                let f = s.to_float_matrix();
                let wf = crate::linalg::rat_to_f64(w);
                for i in 0..f.nrows() {
                    for j in 0..f.ncols() {
                        m[(i, j)] += f[(i, j)] * wf;
                    }
                }
            }
            QubitString::new(max_len, Density::Float(m))
        }
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn density(&self) -> &Density {
        &self.rho
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.rho, Density::Exact(_))
    }

    pub fn dim(&self) -> usize {
        block_dim(self.max_len)
    }

    pub fn to_float_matrix(&self) -> FMat {
        match &self.rho {
            Density::Exact(m) => m.to_c64(),
            Density::Float(m) => m.clone(),
        }
    }

    pub fn to_float(&self) -> QubitString {
        QubitString::new_unchecked(self.max_len, Density::Float(self.to_float_matrix()))
    }

    /// Density embedded into `⊕_{k ≤ n} H_k` for `n ≥ max_len`.
    pub fn float_matrix_padded(&self, n: usize) -> FMat {
        let f = self.to_float_matrix();
        let dim = block_dim(n.max(self.max_len));
        let mut m = FMat::zeros(dim, dim);
        for i in 0..f.nrows() {
            for j in 0..f.ncols() {
                m[(i, j)] = f[(i, j)];
            }
        }
        m
    }

    /// Basis indices with nonzero diagonal weight.
    pub fn support(&self) -> Vec<usize> {
        match &self.rho {
            Density::Exact(m) => (0..m.dim()).filter(|&i| !m.get(i, i).is_zero()).collect(),
            Density::Float(m) => (0..m.nrows()).filter(|&i| m[(i, i)].re > 1e-14).collect(),
        }
    }

    /// Base length and average length `Tr(σΛ)`.
    pub fn lengths(&self) -> (usize, f64) {
        let supp = self.support();
        let base = supp.iter().map(|&i| index_string(i).len()).max().unwrap_or(0);
        let avg = match &self.rho {
            Density::Exact(_) => self.average_length_exact().map(|s| s.re_f64()).unwrap_or(0.0),
            Density::Float(m) => supp.iter().map(|&i| index_string(i).len() as f64 * m[(i, i)].re).sum(),
        };
        (base, avg)
    }

    /// Exact average length, when the state is exact.
    pub fn average_length_exact(&self) -> Option<Surd> {
        let Density::Exact(m) = &self.rho else {
            return None;
        };
        let mut acc = Surd::zero();
        for i in 0..m.dim() {
            let l = index_string(i).len() as i64;
            if l > 0 && !m.get(i, i).is_zero() {
                acc.add_assign(&m.get(i, i).scale(&crate::linalg::rat_int(l)));
            }
        }
        Some(acc)
    }

    /// Matrix element by string labels.
    pub fn entry(&self, s: &str, t: &str) -> Complex64 {
        let (i, j) = (string_index(s), string_index(t));
        if i >= self.dim() || j >= self.dim() {
            return Complex64::zero();
        }
        match &self.rho {
            Density::Exact(m) => m.get(i, j).to_c64(),
            Density::Float(m) => m[(i, j)],
        }
    }

    pub fn entry_exact(&self, s: &str, t: &str) -> Option<Surd> {
        let (i, j) = (string_index(s), string_index(t));
        match &self.rho {
            Density::Exact(m) if i < m.dim() && j < m.dim() => Some(m.get(i, j).clone()),
            Density::Exact(_) => Some(Surd::zero()),
            Density::Float(_) => None,
        }
    }

    /// Exact equality of two exact strings (padding to the larger length).
    pub fn exact_eq(&self, o: &QubitString) -> Option<bool> {
        let (Density::Exact(a), Density::Exact(b)) = (&self.rho, &o.rho) else {
            return None;
        };
        let dim = a.dim().max(b.dim());
        let get = |m: &SurdMat, i: usize, j: usize| {
            if i < m.dim() && j < m.dim() {
                m.get(i, j).clone()
            } else {
                Surd::zero()
            }
        };
        Some((0..dim).all(|i| (0..dim).all(|j| get(a, i, j) == get(b, i, j))))
    }

    /// Trace distance after padding both to a common length.
    pub fn trace_distance(&self, o: &QubitString) -> Result<f64> {
        let n = self.max_len.max(o.max_len);
        crate::linalg::trace_distance(&self.float_matrix_padded(n), &o.float_matrix_padded(n))
    }

    /// Partial trace onto the first `k` cells, read back as a qubit string.
    pub fn truncate_prefix(&self, k: usize) -> QubitString {
        if self.max_len <= k {
            return self.clone();
        }
        let split = |i: usize| {
            let s = index_string(i);
            let cut = s.len().min(k);
            (s[..cut].to_string(), s[cut..].to_string())
        };
        let dim = self.dim();
        let out_dim = block_dim(k);
        let parts: Vec<(usize, String)> = (0..dim)
            .map(|i| {
                let (p, r) = split(i);
                (string_index(&p), r)
            })
            .collect();
        let supp = self.support();
        match &self.rho {
            Density::Exact(m) => {
                let mut out = SurdMat::zeros(out_dim);
                for &i in &supp {
                    for &j in &supp {
                        if parts[i].1 == parts[j].1 {
                            out.add_at(parts[i].0, parts[j].0, m.get(i, j));
                        }
                    }
                }
                QubitString::new_unchecked(k, Density::Exact(out))
            }
            Density::Float(m) => {
                let mut out = FMat::zeros(out_dim, out_dim);
                for &i in &supp {
                    for &j in &supp {
                        if parts[i].1 == parts[j].1 {
                            out[(parts[i].0, parts[j].0)] += m[(i, j)];
                        }
                    }
                }
                QubitString::new_unchecked(k, Density::Float(out))
            }
        }
        .trimmed()
    }

    /// Drops trailing length blocks that carry no weight.
    pub fn trimmed(self) -> QubitString {
        let (base, _) = self.lengths();
        if base >= self.max_len {
            return self;
        }
        let dim = block_dim(base);
        let rho = match &self.rho {
            Density::Exact(m) => {
                let mut out = SurdMat::zeros(dim);
                for i in 0..dim {
                    for j in 0..dim {
                        out.set(i, j, m.get(i, j).clone());
                    }
                }
                Density::Exact(out)
            }
            Density::Float(m) => Density::Float(m.view((0, 0), (dim, dim)).into_owned()),
        };
        QubitString::new_unchecked(base, rho)
    }

    /// Classical prefix `|s⟩⟨s| ⊗ σ` as string concatenation.
    pub fn prepend_classical(&self, s: &str) -> Result<QubitString> {
        if !is_binary(s) {
            return Err(Error::InvalidArgument(format!("not a binary string: `{s}`")));
        }
        let n = self.max_len + s.len();
        check_len(n)?;
        let map: Vec<usize> = (0..self.dim())
            .map(|i| string_index(&format!("{s}{}", index_string(i))))
            .collect();
        let dim = block_dim(n);
        let rho = match &self.rho {
            Density::Exact(m) => {
                let mut out = SurdMat::zeros(dim);
                for i in 0..m.dim() {
                    for j in 0..m.dim() {
                        if !m.get(i, j).is_zero() {
                            out.set(map[i], map[j], m.get(i, j).clone());
                        }
                    }
                }
                Density::Exact(out)
            }
            Density::Float(m) => {
                let mut out = FMat::zeros(dim, dim);
                for i in 0..m.nrows() {
                    for j in 0..m.ncols() {
                        out[(map[i], map[j])] = m[(i, j)];
                    }
                }
                Density::Float(out)
            }
        };
        Ok(QubitString::new_unchecked(n, rho))
    }

    /// Human-readable list of nonzero entries.
    pub fn describe(&self) -> String {
        let supp = self.support();
        let label = |i: usize| {
            let s = index_string(i);
            if s.is_empty() {
                "λ".to_string()
            } else {
                s
            }
        };
        if supp.len() == 1 {
            return label(supp[0]);
        }
        let mut parts = Vec::new();
        for &i in &supp {
            for &j in &supp {
                let z = match &self.rho {
                    Density::Exact(m) => m.get(i, j).to_c64(),
                    Density::Float(m) => m[(i, j)],
                };
                if z.norm() > 1e-12 {
                    parts.push(format!("<{}|rho|{}>={:.6}{:+.6}i", label(i), label(j), z.re, z.im));
                }
            }
        }
        parts.join(" ")
    }
}
