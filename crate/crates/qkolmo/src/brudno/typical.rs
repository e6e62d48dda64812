//! Universal typical subspaces: symmetric-subspace amplification of a
//! classical block code, identity padding, completion and orthonormalization.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::One;

use crate::caps::{check, Caps};
use crate::error::{Error, Result};
use crate::linalg::{gram_schmidt, rank, shannon_entropy, CRat, CVec, RowSpace, ScaledUnitVector};

/// `C(n + 4^l − 1, 4^l − 1)`.
pub fn symmetric_subspace_dim(l: usize, n: usize) -> BigUint {
    let k = (1usize << (2 * l)) - 1;
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n + k - i) / BigUint::from(i + 1);
    }
    acc
}

/// Multisets of size `k` from `0..m`, as sorted vectors.
fn multisets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(m: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..m {
            cur.push(x);
            go(m, k, x, cur, out);
            cur.pop();
        }
    }
    go(m, k, 0, &mut cur, &mut out);
    out
}

/// Distinct orderings of a multiset given as value counts.
fn arrangements(counts: &mut BTreeMap<usize, usize>, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == len {
        out.push(cur.clone());
        return;
    }
    let keys: Vec<usize> = counts.iter().filter(|(_, &c)| c > 0).map(|(&k, _)| k).collect();
    for k in keys {
        *counts.get_mut(&k).expect("present") -= 1;
        cur.push(k);
        arrangements(counts, len, cur, out);
        cur.pop();
        *counts.get_mut(&k).expect("present") += 1;
    }
}

fn check_side(l: usize, n: usize, caps: &Caps) -> Result<usize> {
    let ln = l.checked_mul(n).filter(|&x| x < 64).ok_or(Error::CapExceeded {
        what: "symmetric-subspace side 2^{ln}",
        value: u128::MAX,
        cap: caps.sym_side as u128,
    })?;
    check("symmetric-subspace side 2^{ln}", 1u128 << ln, caps.sym_side as u128)?;
    Ok(ln)
}

/// The spanning matrices `A_{i₁…iₙ} = ∑_σ e_{σ(i)}` of `SYM^n(A^{(l)})`,
/// flattened row-major; entries are integers.
pub fn symmetric_basis(l: usize, n: usize, caps: &Caps) -> Result<Vec<CVec>> {
    let ln = check_side(l, n, caps)?;
    let side = 1usize << ln;
    let units = 1usize << (2 * l);
    let mask = (1usize << l) - 1;
    let mut out = Vec::new();
    for ms in multisets(units, n) {
        let mut counts = BTreeMap::new();
        for &u in &ms {
            *counts.entry(u).or_insert(0) += 1;
        }
        let mut arr = Vec::new();
        arrangements(&mut counts, n, &mut Vec::new(), &mut arr);
        let mut m = vec![CRat::zero(); side * side];
        let one = CRat::one();
        for a in arr {
            let (mut r, mut c) = (0usize, 0usize);
            for u in a {
                r = (r << l) | (u >> l);
                c = (c << l) | (u & mask);
            }
            m[r * side + c] += &one;
        }
        out.push(CVec(m));
    }
    Ok(out)
}

/// Formula value and the exact rank of the spanning set.
pub fn symmetric_subspace_check(l: usize, n: usize, caps: &Caps) -> Result<(BigUint, usize)> {
    Ok((symmetric_subspace_dim(l, n), rank(&symmetric_basis(l, n, caps)?)?))
}

/// Blocks `ω₁ … ωₙ` of `l` bits each.
fn blocks(word: &str, l: usize) -> Result<Vec<usize>> {
    if !word.len().is_multiple_of(l) || !word.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::InvalidArgument(format!(
            "`{word}` is not a binary word of {l}-bit blocks"
        )));
    }
    Ok(word
        .as_bytes()
        .chunks(l)
        .map(|c| c.iter().fold(0usize, |v, &b| 2 * v + usize::from(b == b'1')))
        .collect())
}

/// `{A|ω⟩ : A ∈ SYM^n}`: for each column value, the positions carrying it
/// receive every multiset of row values in every distinct order.
fn amplified(omega: &[usize], l: usize) -> Vec<CVec> {
    let n = omega.len();
    let rows = 1usize << l;
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (k, &b) in omega.iter().enumerate() {
        groups.entry(b).or_default().push(k);
    }
    // per group: for every multiset of row values, its distinct orders
    type Group = (Vec<usize>, Vec<Vec<Vec<usize>>>);
    let per_group: Vec<Group> = groups
        .into_values()
        .map(|pos| {
            let choices = multisets(rows, pos.len())
                .into_iter()
                .map(|ms| {
                    let mut counts = BTreeMap::new();
                    for &a in &ms {
                        *counts.entry(a).or_insert(0) += 1;
                    }
                    let mut arr = Vec::new();
                    arrangements(&mut counts, pos.len(), &mut Vec::new(), &mut arr);
                    arr
                })
                .collect();
            (pos, choices)
        })
        .collect();
    let dim = 1usize << (l * n);
    let mut out = Vec::new();
    let mut pick = vec![0usize; per_group.len()];
    loop {
        // tensor product over groups of the chosen symmetrized vectors
        let mut terms: Vec<Vec<usize>> = vec![vec![0; n]];
        for (g, (pos, choices)) in per_group.iter().enumerate() {
            let orders = &choices[pick[g]];
            let mut next = Vec::with_capacity(terms.len() * orders.len());
            for t in &terms {
                for o in orders {
                    let mut u = t.clone();
                    for (p, a) in pos.iter().zip(o.iter()) {
                        u[*p] = *a;
                    }
                    next.push(u);
                }
            }
            terms = next;
        }
        let mut v = vec![CRat::zero(); dim];
        let one = CRat::one();
        for t in terms {
            let idx = t.iter().fold(0usize, |acc, &a| (acc << l) | a);
            v[idx] += &one;
        }
        out.push(CVec(v));
        let mut g = 0;
        loop {
            if g == pick.len() {
                return out;
            }
            pick[g] += 1;
            if pick[g] < per_group[g].1.len() {
                break;
            }
            pick[g] = 0;
            g += 1;
        }
    }
}

/// `W^{(ln)} ⊗ 1^{⊗(m−ln)}` built from a classical block code.
#[derive(Clone, Debug)]
pub struct UniversalProjector {
    pub l: usize,
    pub n: usize,
    pub m: usize,
    pub codewords: usize,
    /// Independent integer vectors spanning the range of `W^{(ln)}`.
    pub span: Vec<CVec>,
}

pub fn universal_typical_projector(
    codewords: &[String],
    l: usize,
    n: usize,
    m: usize,
    caps: &Caps,
) -> Result<UniversalProjector> {
    if l == 0 || n == 0 {
        return Err(Error::InvalidArgument("l and n must be positive".into()));
    }
    if m < l * n {
        return Err(Error::InvalidArgument(format!(
            "m = {m} is shorter than l·n = {}",
            l * n
        )));
    }
    let ln = check_side(l, n, caps)?;
    check("typical-projector side 2^m", 1u128 << m.min(127), caps.sym_side as u128)?;
    let mut seen = std::collections::BTreeSet::new();
    let mut space = RowSpace::new(1 << ln);
    let mut span = Vec::new();
    for w in codewords {
        if w.len() != ln {
            return Err(Error::InvalidArgument(format!(
                "codeword `{w}` does not have length {ln}"
            )));
        }
        if !seen.insert(w.as_str()) {
            return Err(Error::InvalidArgument(format!("codeword `{w}` is repeated")));
        }
        if space.is_full() {
            continue;
        }
        for v in amplified(&blocks(w, l)?, l) {
            if space.insert(&v.0)? {
                span.push(v);
            }
        }
    }
    Ok(UniversalProjector {
        l,
        n,
        m,
        codewords: codewords.len(),
        span,
    })
}

impl UniversalProjector {
    pub fn pad(&self) -> usize {
        self.m - self.l * self.n
    }

    /// `Tr = D · 2^{m−ln}`.
    pub fn rank(&self) -> usize {
        self.span.len() << self.pad()
    }

    pub fn log_trace(&self) -> f64 {
        (self.rank() as f64).log2()
    }

    /// `log((n+1)^{4^l} · #codewords · 2^{m−ln})`.
    pub fn log_trace_bound(&self) -> f64 {
        (1usize << (2 * self.l)) as f64 * ((self.n + 1) as f64).log2()
            + (self.codewords.max(1) as f64).log2()
            + self.pad() as f64
    }

    /// `|u_k⟩ ⊗ |φ_i⟩`.
    pub fn padded_vectors(&self) -> Vec<CVec> {
        let k = self.pad();
        let dim = 1usize << self.m;
        let mut out = Vec::with_capacity(self.rank());
        for u in &self.span {
            for i in 0..1usize << k {
                let mut v = vec![CRat::zero(); dim];
                for (j, c) in u.0.iter().enumerate() {
                    if !c.is_zero() {
                        v[(j << k) | i] = c.clone();
                    }
                }
                out.push(CVec(v));
            }
        }
        out
    }

    /// The padded vectors followed by the computational vectors they leave
    /// independent, orthonormalized; the first `rank()` span the range.
    pub fn completed_basis(&self) -> Result<Vec<ScaledUnitVector>> {
        let dim = 1usize << self.m;
        let mut all = self.padded_vectors();
        let mut space = RowSpace::new(dim);
        for v in &all {
            space.insert(&v.0)?;
        }
        for i in 0..dim {
            if space.is_full() {
                break;
            }
            let e = CVec::basis(dim, i);
            if space.insert(&e.0)? {
                all.push(e);
            }
        }
        gram_schmidt(&all)
    }

    /// Floating orthonormal basis of the range.
    pub fn onb(&self) -> Result<Vec<Vec<Complex64>>> {
        Ok(gram_schmidt(&self.padded_vectors())?
            .iter()
            .map(|b| b.to_c64().iter().copied().collect())
            .collect())
    }

    /// Distance from a vector of `H_m` to the range.
    pub fn distance_to_range(onb: &[Vec<Complex64>], v: &[Complex64]) -> f64 {
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let proj: f64 = onb
            .iter()
            .map(|b| b.iter().zip(v).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm_sqr())
            .sum();
        (norm2 - proj).max(0.0).sqrt()
    }
}

/// The power of two `l` with `l·2^{3l} ≤ m < 2l·2^{6l}`.
pub fn block_length_lm(m: u64) -> Result<u64> {
    if m < 8 {
        return Err(Error::InvalidArgument(format!("no block length for m = {m} < 8")));
    }
    let m = m as u128;
    let mut l: u32 = 1;
    loop {
        let lo = u128::from(l) << (3 * l);
        if lo > m {
            return Err(Error::InvalidArgument(format!("no block length for m = {m}")));
        }
        if m < (u128::from(l) << (6 * l)) * 2 {
            return Ok(u64::from(l));
        }
        l *= 2;
    }
}

fn empirical_entropy(blocks: &[usize]) -> f64 {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &b in blocks {
        *counts.entry(b).or_insert(0) += 1;
    }
    let n = blocks.len() as f64;
    shannon_entropy(&counts.values().map(|&c| c as f64 / n).collect::<Vec<_>>())
}

/// Every word in `({0,1}^l)^n` whose block histogram has Shannon entropy at
/// most `R`, in lexicographic order, capped at `2^{⌈Rn⌉}` words.
pub fn empirical_typical_codewords(l: usize, n: usize, rate: f64, caps: &Caps) -> Result<Vec<String>> {
    if rate <= 0.0 || !rate.is_finite() {
        return Err(Error::InvalidArgument("rate must be positive".into()));
    }
    let ln = l * n;
    check("block-code word length", ln as u128, caps.n_diag as u128)?;
    let cap_bits = (rate * n as f64).ceil();
    let cap = if cap_bits >= ln as f64 {
        usize::MAX
    } else {
        1usize << cap_bits as u32
    };
    let mut out = Vec::new();
    for w in 0..1usize << ln {
        if out.len() >= cap {
            break;
        }
        let s: String = (0..ln)
            .rev()
            .map(|k| if (w >> k) & 1 == 1 { '1' } else { '0' })
            .collect();
        let b = blocks(&s, l.max(1))?;
        if empirical_entropy(&b) <= rate + 1e-12 {
            out.push(s);
        }
    }
    Ok(out)
}

/// `(4^l/l)·log(n+1)/n + R/l + 1/n`, the per-site bound on `log Tr Q`.
pub fn aggregated_trace_bound(l: usize, n: usize, rate: f64) -> f64 {
    (1usize << (2 * l)) as f64 / l as f64 * ((n + 1) as f64).log2() / n as f64 + rate / l as f64 + 1.0 / n as f64
}

/// `Q^{(m)}_{s,ε}`: block length `l_m`, `n_m = ⌊m/l_m⌋`, rate
/// `R_m = l_m(s + ε/2)`.
pub fn q_projector(m: usize, s: f64, eps: f64, caps: &Caps) -> Result<(UniversalProjector, f64)> {
    let l = block_length_lm(m as u64)? as usize;
    let n = m / l;
    let rate = l as f64 * (s + eps / 2.0);
    let words = empirical_typical_codewords(l, n, rate, caps)?;
    Ok((universal_typical_projector(&words, l, n, m, caps)?, rate))
}
