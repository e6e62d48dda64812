//! Stationary sources on the qubit chain: iid products of a one-site density
//! matrix and diagonal two-state Markov chains.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::caps::{check, Caps};
use crate::error::{parse_err, Error, Result};
use crate::linalg::{rat_to_f64, shannon_entropy, von_neumann_entropy, CRat, FMat, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SourceKind {
    /// `ρ^{⊗n}` with `ρ = [[p00, p01], [p01*, p11]]`.
    Iid { p00: Rational, p01: CRat, p11: Rational },
    /// Symbol `xᵢ₊₁` drawn from row `xᵢ` of `P`, started in `π`.
    MarkovDiag { p: [[Rational; 2]; 2], pi: [Rational; 2] },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceModel {
    pub name: String,
    pub kind: SourceKind,
}

/// Accepts `p/q`, integers and finite decimals, all read exactly.
pub fn parse_exact(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("bad number `{s}`"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if (int.is_empty() && frac.is_empty()) || !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let r = Rational::new(num, BigInt::from(10u8).pow(frac.len() as u32));
    Ok(if neg { -r } else { r })
}

impl SourceModel {
    pub fn iid(name: &str, p00: Rational, p01: CRat, p11: Rational) -> Result<SourceModel> {
        let s = SourceModel {
            name: name.to_string(),
            kind: SourceKind::Iid { p00, p01, p11 },
        };
        s.validate()?;
        Ok(s)
    }

    /// `diag(p, 1 − p)`.
    pub fn iid_diag(name: &str, p: Rational) -> Result<SourceModel> {
        let q = Rational::one() - &p;
        SourceModel::iid(name, p, CRat::zero(), q)
    }

    pub fn markov(name: &str, p: [[Rational; 2]; 2], pi: [Rational; 2]) -> Result<SourceModel> {
        let s = SourceModel {
            name: name.to_string(),
            kind: SourceKind::MarkovDiag { p, pi },
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(format!("source `{}`: {m}", self.name)));
        match &self.kind {
            SourceKind::Iid { p00, p01, p11 } => {
                if p00.is_negative() || p11.is_negative() || !(p00 + p11).is_one() {
                    return bad("ρ must have nonnegative diagonal and unit trace");
                }
                if p01.norm_sq() > p00 * p11 {
                    return bad("ρ is not positive semidefinite");
                }
            }
            SourceKind::MarkovDiag { p, pi } => {
                for row in p {
                    if row.iter().any(Signed::is_negative) || !(&row[0] + &row[1]).is_one() {
                        return bad("P must be row-stochastic");
                    }
                }
                if pi.iter().any(Signed::is_negative) || !(&pi[0] + &pi[1]).is_one() {
                    return bad("π must be a probability vector");
                }
                for j in 0..2 {
                    if &pi[0] * &p[0][j] + &pi[1] * &p[1][j] != pi[j] {
                        return bad("π is not stationary for P");
                    }
                }
            }
        }
        Ok(())
    }

    pub fn renamed(mut self, name: &str) -> SourceModel {
        self.name = name.to_string();
        self
    }

    pub fn is_diagonal(&self) -> bool {
        match &self.kind {
            SourceKind::Iid { p01, .. } => p01.is_zero(),
            SourceKind::MarkovDiag { .. } => true,
        }
    }

    /// `π` is the only stationary vector (both rows of `P` equal to the
    /// identity leaves every `π` stationary).
    pub fn has_unique_stationary(&self) -> bool {
        match &self.kind {
            SourceKind::Iid { .. } => true,
            SourceKind::MarkovDiag { p, .. } => !(p[0][0].is_one() && p[1][1].is_one()),
        }
    }

    /// One-site density matrix.
    pub fn site(&self) -> FMat {
        match &self.kind {
            SourceKind::Iid { p00, p01, p11 } => {
                let off = p01.to_c64();
                FMat::from_row_slice(
                    2,
                    2,
                    &[
                        Complex64::new(rat_to_f64(p00), 0.0),
                        off,
                        off.conj(),
                        Complex64::new(rat_to_f64(p11), 0.0),
                    ],
                )
            }
            SourceKind::MarkovDiag { pi, .. } => FMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
                Complex64::new(rat_to_f64(&pi[0]), 0.0),
                Complex64::new(rat_to_f64(&pi[1]), 0.0),
            ])),
        }
    }

    /// Eigenvalues of the one-site matrix, descending.
    pub fn site_spectrum(&self) -> [f64; 2] {
        match &self.kind {
            SourceKind::Iid { p00, p01, p11 } => {
                let (a, d) = (rat_to_f64(p00), rat_to_f64(p11));
                let r = ((a - d).powi(2) + 4.0 * rat_to_f64(&p01.norm_sq())).sqrt();
                [(1.0 + r) / 2.0, ((1.0 - r) / 2.0).max(0.0)]
            }
            SourceKind::MarkovDiag { pi, .. } => {
                let (a, b) = (rat_to_f64(&pi[0]), rat_to_f64(&pi[1]));
                [a.max(b), a.min(b)]
            }
        }
    }

    /// `s(Ψ)`: `S(ρ)` for iid, `−∑ πᵢPᵢⱼ log Pᵢⱼ` for Markov.
    pub fn entropy_rate(&self) -> f64 {
        match &self.kind {
            SourceKind::Iid { .. } => shannon_entropy(&self.site_spectrum()),
            SourceKind::MarkovDiag { p, pi } => (0..2)
                .map(|i| rat_to_f64(&pi[i]) * shannon_entropy(&[rat_to_f64(&p[i][0]), rat_to_f64(&p[i][1])]))
                .sum(),
        }
    }

    /// Probability of a classical word (diagonal sources).
    pub fn word_probability(&self, bits: &[u8]) -> Option<Rational> {
        match &self.kind {
            SourceKind::Iid { p00, p01, p11 } if p01.is_zero() => Some(
                bits.iter()
                    .fold(Rational::one(), |acc, &b| acc * if b == 0 { p00 } else { p11 }),
            ),
            SourceKind::Iid { .. } => None,
            SourceKind::MarkovDiag { p, pi } => {
                let Some(&first) = bits.first() else {
                    return Some(Rational::one());
                };
                let mut acc = pi[first as usize].clone();
                for w in bits.windows(2) {
                    acc *= &p[w[0] as usize][w[1] as usize];
                }
                Some(acc)
            }
        }
    }

    pub fn local_density(&self, n: usize, caps: &Caps) -> Result<LocalDensity> {
        if self.is_diagonal() {
            check("local-density length (diagonal source)", n as u128, caps.n_diag as u128)?;
            let probs = (0..1usize << n)
                .map(|i| {
                    let bits: Vec<u8> = (0..n).rev().map(|k| ((i >> k) & 1) as u8).collect();
                    self.word_probability(&bits).expect("diagonal source")
                })
                .collect();
            Ok(LocalDensity::Diagonal(probs))
        } else {
            check(
                "local-density length (general iid source)",
                n as u128,
                caps.n_general as u128,
            )?;
            let site = self.site();
            let mut m = FMat::from_element(1, 1, Complex64::new(1.0, 0.0));
            for _ in 0..n {
                m = m.kronecker(&site);
            }
            Ok(LocalDensity::Dense(m))
        }
    }

    /// Distinct eigenvalues of `ρ^{(n)}` with multiplicities, exact for
    /// diagonal iid sources; `None` for Markov chains.
    fn iid_spectrum(&self, n: usize) -> Option<Vec<(Spec, BigUint)>> {
        let SourceKind::Iid { p00, p01, p11 } = &self.kind else {
            return None;
        };
        let mut out = Vec::with_capacity(n + 1);
        let mut binom = BigUint::one();
        for k in 0..=n {
            let lam = if p01.is_zero() {
                Spec::Exact(num_traits::pow(p00.clone(), n - k) * num_traits::pow(p11.clone(), k))
            } else {
                let [a, b] = self.site_spectrum();
                Spec::Float(a.powi((n - k) as i32) * b.powi(k as i32))
            };
            out.push((lam, binom.clone()));
            binom = binom * BigUint::from(n - k) / BigUint::from(k + 1);
        }
        Some(out)
    }

    /// β: rank of the smallest spectral projector of `ρ^{(n)}` with mass at
    /// least `1 − ε`.
    pub fn beta_min(&self, n: usize, eps: &Rational, caps: &Caps) -> Result<TypicalProjector> {
        if !eps.is_positive() || eps >= &Rational::one() {
            return Err(Error::InvalidArgument("ε must lie in (0, 1)".into()));
        }
        // iid spectra come from type classes, so no dense matrix is formed
        check("typical-projector length", n as u128, caps.n_diag as u128)?;
        let target = Rational::one() - eps;
        let mut levels: Vec<(Spec, BigUint)> = match self.iid_spectrum(n) {
            Some(s) => s,
            None => match self.local_density(n, caps)? {
                LocalDensity::Diagonal(p) => p.into_iter().map(|x| (Spec::Exact(x), BigUint::one())).collect(),
                LocalDensity::Dense(_) => unreachable!("Markov sources are diagonal"),
            },
        };
        levels.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
        let mut rank = BigUint::zero();
        let exact = levels.iter().all(|(s, _)| matches!(s, Spec::Exact(_)));
        if exact {
            let mut mass = Rational::zero();
            for (s, mult) in &levels {
                let Spec::Exact(p) = s else { unreachable!() };
                if p.is_zero() {
                    break;
                }
                let block = p * Rational::from_integer(BigInt::from(mult.clone()));
                if &mass + &block >= target {
                    let need = ((&target - &mass) / p).ceil().to_integer();
                    let need = need.to_biguint().expect("nonnegative");
                    mass += p * Rational::from_integer(BigInt::from(need.clone()));
                    rank += need;
                    break;
                }
                mass += block;
                rank += mult;
            }
            return Ok(TypicalProjector::new(n, rank, rat_to_f64(&mass), Some(mass)));
        }
        let target = rat_to_f64(&target) * (1.0 - 1e-12);
        let mut mass = 0.0;
        for (s, mult) in &levels {
            let Spec::Float(p) = *s else { unreachable!() };
            if p <= 0.0 {
                break;
            }
            let m = mult.to_f64().unwrap_or(f64::INFINITY);
            if mass + p * m >= target {
                let need = ((target - mass) / p).ceil().max(0.0);
                rank += BigUint::from(need as u64);
                mass += p * need;
                break;
            }
            mass += p * m;
            rank += mult;
        }
        Ok(TypicalProjector::new(n, rank, mass.min(1.0), None))
    }

    pub fn parse(text: &str) -> Result<SourceModel> {
        let (mut name, mut kind, mut rho, mut p, mut pi) = (None, None, None, None, None);
        for (i, line) in text.lines().enumerate() {
            let l = line.split('#').next().unwrap_or("").trim();
            if l.is_empty() {
                continue;
            }
            let (key, val) = l
                .split_once(':')
                .ok_or_else(|| parse_err(i + 1, format!("expected `key: value`, got `{l}`")))?;
            let nums = || -> Result<Vec<Rational>> {
                val.split_whitespace()
                    .map(|x| parse_exact(x).map_err(|e| parse_err(i + 1, e.to_string())))
                    .collect()
            };
            match key.trim() {
                "name" => name = Some(val.trim().to_string()),
                "kind" => kind = Some(val.trim().to_string()),
                "rho" => rho = Some((i + 1, nums()?)),
                "P" => p = Some((i + 1, nums()?)),
                "pi" => pi = Some((i + 1, nums()?)),
                k => return Err(parse_err(i + 1, format!("unknown key `{k}`"))),
            }
        }
        let name = name.unwrap_or_else(|| "source".into());
        match kind.as_deref() {
            Some("iid") => {
                let (line, r) = rho.ok_or_else(|| parse_err(0, "iid source needs `rho:`"))?;
                let [a, br, bi, d] =
                    <[Rational; 4]>::try_from(r).map_err(|_| parse_err(line, "rho needs four numbers"))?;
                SourceModel::iid(&name, a, CRat::new(br, bi), d)
            }
            Some("markov") => {
                let (line, pv) = p.ok_or_else(|| parse_err(0, "markov source needs `P:`"))?;
                let [a, b, c, d] =
                    <[Rational; 4]>::try_from(pv).map_err(|_| parse_err(line, "P needs four numbers"))?;
                let (line, piv) = pi.ok_or_else(|| parse_err(0, "markov source needs `pi:`"))?;
                let [x, y] = <[Rational; 2]>::try_from(piv).map_err(|_| parse_err(line, "pi needs two numbers"))?;
                SourceModel::markov(&name, [[a, b], [c, d]], [x, y])
            }
            Some(k) => Err(parse_err(0, format!("unknown source kind `{k}`"))),
            None => Err(parse_err(0, "missing `kind:`")),
        }
    }
}

impl fmt::Display for SourceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = crate::linalg::format_rational;
        writeln!(f, "name: {}", self.name)?;
        match &self.kind {
            SourceKind::Iid { p00, p01, p11 } => {
                writeln!(f, "kind: iid")?;
                writeln!(f, "rho: {} {} {} {}", r(p00), r(&p01.re), r(&p01.im), r(p11))
            }
            SourceKind::MarkovDiag { p, pi } => {
                writeln!(f, "kind: markov")?;
                writeln!(f, "P: {} {} {} {}", r(&p[0][0]), r(&p[0][1]), r(&p[1][0]), r(&p[1][1]))?;
                writeln!(f, "pi: {} {}", r(&pi[0]), r(&pi[1]))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Spec {
    Exact(Rational),
    Float(f64),
}

impl PartialOrd for Spec {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        match (self, o) {
            (Spec::Exact(a), Spec::Exact(b)) => a.partial_cmp(b),
            _ => self.to_f64().partial_cmp(&o.to_f64()),
        }
    }
}

impl Spec {
    fn to_f64(&self) -> f64 {
        match self {
            Spec::Exact(r) => rat_to_f64(r),
            Spec::Float(x) => *x,
        }
    }
}

/// `ρ^{(n)}`: exact probabilities for diagonal sources, a dense matrix otherwise.
#[derive(Clone, Debug, PartialEq)]
pub enum LocalDensity {
    Diagonal(Vec<Rational>),
    Dense(FMat),
}

impl LocalDensity {
    pub fn dim(&self) -> usize {
        match self {
            LocalDensity::Diagonal(p) => p.len(),
            LocalDensity::Dense(m) => m.nrows(),
        }
    }

    pub fn to_float(&self) -> FMat {
        match self {
            LocalDensity::Diagonal(p) => FMat::from_diagonal(&nalgebra::DVector::from_iterator(
                p.len(),
                p.iter().map(|x| Complex64::new(rat_to_f64(x), 0.0)),
            )),
            LocalDensity::Dense(m) => m.clone(),
        }
    }

    /// Trace over the last site.
    pub fn trace_last(&self) -> LocalDensity {
        match self {
            LocalDensity::Diagonal(p) => LocalDensity::Diagonal(p.chunks(2).map(|c| &c[0] + &c[1]).collect()),
            LocalDensity::Dense(m) => {
                let d = m.nrows() / 2;
                LocalDensity::Dense(FMat::from_fn(d, d, |i, j| {
                    m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)]
                }))
            }
        }
    }

    /// Largest entrywise difference (exactly zero when both sides are exact
    /// and equal).
    pub fn distance(&self, o: &LocalDensity) -> f64 {
        match (self, o) {
            (LocalDensity::Diagonal(a), LocalDensity::Diagonal(b)) if a.len() == b.len() => a
                .iter()
                .zip(b)
                .map(|(x, y)| rat_to_f64(&(x - y).abs()))
                .fold(0.0, f64::max),
            _ => {
                let (a, b) = (self.to_float(), o.to_float());
                if a.shape() != b.shape() {
                    return f64::INFINITY;
                }
                (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
            }
        }
    }

    pub fn entropy(&self) -> Result<f64> {
        match self {
            LocalDensity::Diagonal(p) => Ok(shannon_entropy(&p.iter().map(rat_to_f64).collect::<Vec<_>>())),
            LocalDensity::Dense(m) => von_neumann_entropy(m),
        }
    }
}

/// Minimal spectral projector with `Ψ^{(n)}`-weight at least `1 − ε`.
#[derive(Clone, Debug, PartialEq)]
pub struct TypicalProjector {
    pub n: usize,
    pub rank: BigUint,
    /// `log₂ rank`.
    pub log_trace: f64,
    pub mass: f64,
    pub exact_mass: Option<Rational>,
}

impl TypicalProjector {
    fn new(n: usize, rank: BigUint, mass: f64, exact_mass: Option<Rational>) -> Self {
        let log_trace = if rank.is_zero() {
            f64::NEG_INFINITY
        } else {
            log2_big(&rank)
        };
        TypicalProjector {
            n,
            rank,
            log_trace,
            mass,
            exact_mass,
        }
    }
}

fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 52 {
        return x.to_f64().unwrap_or(f64::INFINITY).log2();
    }
    let shift = bits - 52;
    (x >> shift).to_f64().unwrap_or(f64::INFINITY).log2() + shift as f64
}

/// `(n, beta, beta/n, s, gap)`.
pub type BetaRow = (usize, f64, f64, f64, f64);

/// One row `n  beta  beta/n  s  gap` of the convergence report.
pub fn beta_report(source: &SourceModel, ns: &[usize], eps: &Rational, caps: &Caps) -> Result<Vec<BetaRow>> {
    let s = source.entropy_rate();
    ns.iter()
        .map(|&n| {
            let b = source.beta_min(n, eps, caps)?.log_trace;
            let per = b / n as f64;
            Ok((n, b, per, s, per - s))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn diag(p: i64, q: i64) -> SourceModel {
        SourceModel::iid_diag("d", rat(p, q)).unwrap()
    }

    #[test]
    fn local_density_examples() {
        let c = Caps::default();
        let mixed = diag(1, 2).local_density(2, &c).unwrap();
        assert_eq!(mixed, LocalDensity::Diagonal(vec![rat(1, 4); 4]));
        let d = diag(9, 10).local_density(2, &c).unwrap();
        assert_eq!(
            d,
            LocalDensity::Diagonal(vec![rat(81, 100), rat(9, 100), rat(9, 100), rat(1, 100)])
        );
        let frozen = SourceModel::markov(
            "f",
            [[rat(1, 1), rat(0, 1)], [rat(0, 1), rat(1, 1)]],
            [rat(1, 2), rat(1, 2)],
        )
        .unwrap();
        assert!(!frozen.has_unique_stationary());
        assert_eq!(
            frozen.local_density(2, &c).unwrap(),
            LocalDensity::Diagonal(vec![rat(1, 2), rat(0, 1), rat(0, 1), rat(1, 2)])
        );
    }

    #[test]
    fn entropy_rate_examples() {
        let pure = SourceModel::iid("p", rat(1, 1), CRat::zero(), rat(0, 1)).unwrap();
        assert_eq!(pure.entropy_rate(), 0.0);
        assert!((diag(1, 2).entropy_rate() - 1.0).abs() < 1e-15);
        let h = -(0.9f64 * 0.9f64.log2() + 0.1 * 0.1f64.log2());
        assert!((diag(9, 10).entropy_rate() - h).abs() < 1e-12);
        assert!((h - 0.46900).abs() < 1e-5);
        // |+⟩⟨+| is pure
        let plus = SourceModel::iid("+", rat(1, 2), CRat::real(rat(1, 2)), rat(1, 2)).unwrap();
        assert!(plus.entropy_rate().abs() < 1e-12);
    }

    #[test]
    fn beta_examples() {
        let c = Caps::default();
        let e = rat(1, 10);
        let pure = SourceModel::iid("p", rat(1, 2), CRat::real(rat(1, 2)), rat(1, 2)).unwrap();
        for n in [1, 4, 9] {
            let b = pure.beta_min(n, &e, &c).unwrap();
            assert_eq!(b.rank, BigUint::one());
            assert!(b.log_trace.abs() < 1e-12);
        }
        let m = diag(1, 2).beta_min(2, &e, &c).unwrap();
        assert_eq!(m.rank, BigUint::from(4u8));
        assert_eq!(m.log_trace, 2.0);
        let d = diag(9, 10).beta_min(2, &e, &c).unwrap();
        assert_eq!(d.rank, BigUint::from(2u8));
        assert_eq!(d.exact_mass, Some(rat(9, 10)));
        assert_eq!(d.log_trace, 1.0);
    }

    #[test]
    fn markov_beta_matches_greedy_count() {
        let c = Caps::default();
        let s = SourceModel::markov(
            "m",
            [[rat(3, 4), rat(1, 4)], [rat(1, 2), rat(1, 2)]],
            [rat(2, 3), rat(1, 3)],
        )
        .unwrap();
        let p = match s.local_density(6, &c).unwrap() {
            LocalDensity::Diagonal(p) => p,
            _ => unreachable!(),
        };
        let mut sorted = p.clone();
        sorted.sort_by(|a, b| b.cmp(a));
        let mut acc = Rational::zero();
        let mut k = 0u32;
        while acc < rat(9, 10) {
            acc += &sorted[k as usize];
            k += 1;
        }
        assert_eq!(s.beta_min(6, &rat(1, 10), &c).unwrap().rank, BigUint::from(k));
    }

    #[test]
    fn file_round_trip() {
        let text = "name: skew\nkind: iid\nrho: 0.9 0 0 0.1\n";
        let s = SourceModel::parse(text).unwrap();
        assert_eq!(s, diag(9, 10).renamed("skew"));
        assert_eq!(SourceModel::parse(&s.to_string()).unwrap(), s);
        let m = SourceModel::parse("kind: markov\nP: 1/2 1/2 1/2 1/2\npi: 1/2 1/2\n").unwrap();
        assert!(m.is_diagonal());
        assert!(SourceModel::parse("kind: markov\nP: 1 0 1 0\npi: 1/2 1/2\n").is_err());
        assert!(SourceModel::parse("kind: iid\nrho: 1/2 1 0 1/2\n").is_err());
        assert_eq!(parse_exact("-0.25").unwrap(), rat(-1, 4));
    }
}
