//! Complexity estimates over searched candidate sets, the counting bound,
//! Holevo's χ and the incompressibility audit.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::caps::{check, Caps};
use crate::error::{Error, Result};
use crate::linalg::{von_neumann_entropy, FMat, FVec};
use crate::qtm::{apply, encode_pair, strings_of_len, QtmSpec, QubitString};

/// `(log d + 4δ log 1/δ)/(1 − 4δ)`, with `0 · log(1/0) = 0`.
pub fn counting_bound(d: u64, delta: f64) -> Result<f64> {
    if d < 1 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    let limit = 1.0 / (2.0 * std::f64::consts::E);
    if !(0.0..limit).contains(&delta) {
        return Err(Error::InvalidArgument(format!("δ = {delta} is outside [0, 1/(2e))")));
    }
    let tail = if delta == 0.0 {
        0.0
    } else {
        4.0 * delta * (1.0 / delta).log2()
    };
    Ok(((d as f64).log2() + tail) / (1.0 - 4.0 * delta))
}

/// `{λᵢ, ρᵢ}` on a common space.
#[derive(Clone, Debug)]
pub struct Ensemble {
    weights: Vec<f64>,
    states: Vec<FMat>,
}

const TOL: f64 = 1e-9;

impl Ensemble {
    pub fn new(weights: Vec<f64>, states: Vec<FMat>) -> Result<Ensemble> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::InvalidArgument("ensemble needs one weight per state".into()));
        }
        if weights.iter().any(|&w| w < 0.0) || (weights.iter().sum::<f64>() - 1.0).abs() > TOL {
            return Err(Error::InvalidArgument("weights must be a probability vector".into()));
        }
        let dim = states[0].nrows();
        for s in &states {
            if s.nrows() != dim || s.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: s.nrows(),
                });
            }
            if (s - s.adjoint()).iter().any(|z| z.norm() > TOL) {
                return Err(Error::NotHermitian);
            }
            let ev = crate::linalg::hermitian_eigenvalues(s)?;
            if ev.iter().any(|&x| x < -TOL) || (s.trace().re - 1.0).abs() > TOL {
                return Err(Error::InvalidArgument(
                    "ensemble member is not a density operator".into(),
                ));
            }
        }
        Ok(Ensemble { weights, states })
    }

    /// Pure states `|ψᵢ⟩` (normalized here) with weights.
    pub fn pure(weights: Vec<f64>, vectors: &[FVec]) -> Result<Ensemble> {
        let states = vectors
            .iter()
            .map(|v| {
                let u = v / Complex64::new(v.norm(), 0.0);
                &u * u.adjoint()
            })
            .collect();
        Ensemble::new(weights, states)
    }

    pub fn uniform(states: Vec<FMat>) -> Result<Ensemble> {
        let w = vec![1.0 / states.len().max(1) as f64; states.len()];
        Ensemble::new(w, states)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[FMat] {
        &self.states
    }

    pub fn average(&self) -> FMat {
        let dim = self.states[0].nrows();
        self.weights
            .iter()
            .zip(&self.states)
            .fold(FMat::zeros(dim, dim), |acc, (w, s)| acc + s * Complex64::new(*w, 0.0))
    }

    /// Every member replaced by its diagonal in the computational basis.
    pub fn dephased(&self) -> Ensemble {
        let states = self.states.iter().map(|s| FMat::from_diagonal(&s.diagonal())).collect();
        Ensemble {
            weights: self.weights.clone(),
            states,
        }
    }
}

/// `χ = S(∑λᵢρᵢ) − ∑λᵢS(ρᵢ)`.
pub fn chi_quantity(e: &Ensemble) -> Result<f64> {
    let mut chi = von_neumann_entropy(&e.average())?;
    for (w, s) in e.weights.iter().zip(&e.states) {
        if *w > 0.0 {
            chi -= w * von_neumann_entropy(s)?;
        }
    }
    Ok(chi.max(0.0))
}

/// Candidates for the complexity searches.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// All classical strings of length at most this.
    pub max_len: usize,
    /// Extra caller-supplied (typically pure) candidates.
    pub extra: Vec<QubitString>,
    pub t_max: usize,
}

impl SearchConfig {
    pub fn classical(max_len: usize, t_max: usize) -> Self {
        SearchConfig {
            max_len,
            extra: Vec::new(),
            t_max,
        }
    }

    fn candidates(&self, caps: &Caps) -> Result<Vec<QubitString>> {
        let count = (1u128 << (self.max_len + 1)) - 1 + self.extra.len() as u128;
        check("search candidates", count, caps.search as u128)?;
        let mut out = Vec::with_capacity(count as usize);
        for n in 0..=self.max_len {
            for s in strings_of_len(n) {
                out.push(QubitString::classical(&s)?);
            }
        }
        out.extend(self.extra.iter().cloned());
        out.sort_by_key(|c| c.max_len());
        Ok(out)
    }
}

/// An upper bound on a complexity over a searched set: the least witness
/// length, or "more than `L`" when nothing in the set works.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QcBound {
    AtMost(usize),
    /// No candidate succeeded; the searched set went up to this base length.
    Exceeds(usize),
}

impl QcBound {
    /// `AtMost(l)` as `l`, `Exceeds(l)` as `l + 1`.
    pub fn floor(self) -> usize {
        match self {
            QcBound::AtMost(l) => l,
            QcBound::Exceeds(l) => l + 1,
        }
    }

    pub fn value(self) -> Option<usize> {
        match self {
            QcBound::AtMost(l) => Some(l),
            QcBound::Exceeds(_) => None,
        }
    }
}

impl fmt::Display for QcBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QcBound::AtMost(l) => write!(f, "<= {l} (upper bound over searched set)"),
            QcBound::Exceeds(l) => write!(f, "> {l} over searched set"),
        }
    }
}

fn max_len_of(cands: &[QubitString], cfg: &SearchConfig) -> usize {
    cands
        .iter()
        .map(QubitString::max_len)
        .max()
        .unwrap_or(0)
        .max(cfg.max_len)
}

fn least<F>(cands: &[QubitString], ok: F) -> Result<Option<usize>>
where
    F: Fn(&QubitString) -> Result<bool> + Sync,
{
    let hits: Vec<Result<Option<usize>>> = cands
        .par_iter()
        .map(|c| Ok(if ok(c)? { Some(c.max_len()) } else { None }))
        .collect();
    let mut best: Option<usize> = None;
    for h in hits {
        if let Some(l) = h? {
            best = Some(best.map_or(l, |b| b.min(l)));
        }
    }
    Ok(best)
}

fn close(
    spec: &QtmSpec,
    rho: &QubitString,
    sigma: &QubitString,
    delta: f64,
    t_max: usize,
    caps: &Caps,
) -> Result<bool> {
    Ok(match apply(spec, sigma, t_max, caps)? {
        Some(out) => out.trace_distance(rho)? < delta,
        None => false,
    })
}

/// `QC^δ_M(ρ)` over the searched set.
pub fn qc_upper_bound(
    spec: &QtmSpec,
    rho: &QubitString,
    delta: f64,
    cfg: &SearchConfig,
    caps: &Caps,
) -> Result<QcBound> {
    let cands = cfg.candidates(caps)?;
    let l = max_len_of(&cands, cfg);
    Ok(match least(&cands, |c| close(spec, rho, c, delta, cfg.t_max, caps))? {
        Some(b) => QcBound::AtMost(b),
        None => QcBound::Exceeds(l),
    })
}

/// How `M(k, σ)` is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamMode {
    /// Run the machine on `⟨k, σ⟩`.
    Encoded,
    /// Wrapper that strips the parameter and runs the machine on `σ`.
    Ignored,
}

fn run_param(
    spec: &QtmSpec,
    k: u64,
    sigma: &QubitString,
    mode: ParamMode,
    t_max: usize,
    caps: &Caps,
) -> Result<Option<QubitString>> {
    match mode {
        ParamMode::Encoded => apply(spec, &encode_pair(k, sigma)?, t_max, caps),
        ParamMode::Ignored => apply(spec, sigma, t_max, caps),
    }
}

/// Approximation-scheme complexity: least `ℓ(σ)` with
/// `‖ρ − M(k,σ)‖ < 1/k` for every `k ≤ k_max`.
pub fn qc_scheme_upper_bound(
    spec: &QtmSpec,
    rho: &QubitString,
    k_max: u64,
    mode: ParamMode,
    cfg: &SearchConfig,
    caps: &Caps,
) -> Result<QcBound> {
    if k_max < 1 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let cands = cfg.candidates(caps)?;
    let l = max_len_of(&cands, cfg);
    let ok = |c: &QubitString| -> Result<bool> {
        for k in 1..=k_max {
            match run_param(spec, k, c, mode, cfg.t_max, caps)? {
                Some(out) if out.trace_distance(rho)? < 1.0 / k as f64 => {}
                _ => return Ok(false),
            }
        }
        Ok(true)
    };
    Ok(match least(&cands, ok)? {
        Some(b) => QcBound::AtMost(b),
        None => QcBound::Exceeds(l),
    })
}

/// Both sides of `QC^{1/k}(ρ) ≤ QC(ρ) + 2⌊log k⌋ + 2` over one searched
/// set, with `QC^{1/k}` searched over `⟨k, σ⟩` for every candidate `σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationReport {
    pub k: u64,
    pub scheme: QcBound,
    pub fixed: QcBound,
    pub overhead: usize,
}

impl RelationReport {
    pub fn holds(&self) -> bool {
        match (self.scheme, self.fixed) {
            (QcBound::Exceeds(_), _) => true,
            (QcBound::AtMost(s), QcBound::AtMost(f)) => f <= s + self.overhead,
            (QcBound::AtMost(_), QcBound::Exceeds(_)) => false,
        }
    }
}

pub fn relation_check(
    spec: &QtmSpec,
    rho: &QubitString,
    k: u64,
    mode: ParamMode,
    cfg: &SearchConfig,
    caps: &Caps,
) -> Result<RelationReport> {
    let scheme = qc_scheme_upper_bound(spec, rho, k, mode, cfg, caps)?;
    let cands = cfg.candidates(caps)?;
    let overhead = crate::qtm::encoded_length(k, 0);
    let hits: Vec<Result<Option<usize>>> = cands
        .par_iter()
        .map(|c| {
            let good = match run_param(spec, k, c, mode, cfg.t_max, caps)? {
                Some(out) => out.trace_distance(rho)? < 1.0 / k as f64,
                None => false,
            };
            Ok(if good { Some(encode_pair(k, c)?.max_len()) } else { None })
        })
        .collect();
    let mut best: Option<usize> = None;
    for h in hits {
        if let Some(l) = h? {
            best = Some(best.map_or(l, |b| b.min(l)));
        }
    }
    let fixed = match best {
        Some(b) => QcBound::AtMost(b),
        None => QcBound::Exceeds(max_len_of(&cands, cfg) + overhead),
    };
    Ok(RelationReport {
        k,
        scheme,
        fixed,
        overhead,
    })
}

/// `(1 − 4δ) log n − 1 − 4δ log(1/δ)`.
pub fn orthonormal_bound(n: usize, delta: f64) -> f64 {
    let tail = if delta == 0.0 {
        0.0
    } else {
        4.0 * delta * (1.0 / delta).log2()
    };
    (1.0 - 4.0 * delta) * (n as f64).log2() - 1.0 - tail
}

/// `S(avg) − 4δ log((n+1)/(2δ)) − 1` for `n` pure states.
pub fn holevo_bound(avg_entropy: f64, n: usize, delta: f64) -> f64 {
    let tail = if delta == 0.0 {
        0.0
    } else {
        4.0 * delta * ((n as f64 + 1.0) / (2.0 * delta)).log2()
    };
    avg_entropy - tail - 1.0
}

#[derive(Clone, Debug)]
pub struct AuditReport {
    pub n: usize,
    pub delta: f64,
    pub orthonormal_bound: f64,
    pub holevo_bound: f64,
    /// Searched `QC^δ` upper bound per member.
    pub members: Vec<QcBound>,
    /// Some member's searched bound is at least both lower bounds.
    pub consistent: bool,
}

/// Checks that the searched complexities of an orthonormal family do not
/// all fall below the incompressibility lower bounds.
pub fn incompressibility_audit(
    spec: &QtmSpec,
    states: &[QubitString],
    vectors: &[FVec],
    delta: f64,
    cfg: &SearchConfig,
    caps: &Caps,
) -> Result<AuditReport> {
    if states.len() != vectors.len() || states.is_empty() {
        return Err(Error::InvalidArgument("need one vector per state".into()));
    }
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate().take(i + 1) {
            let ip = a.dotc(b).norm();
            let want = if i == j { 1.0 } else { 0.0 };
            if (ip - want).abs() > TOL {
                return Err(Error::InvalidArgument(format!(
                    "states {j} and {i} are not orthonormal"
                )));
            }
        }
    }
    let n = states.len();
    let ens = Ensemble::pure(vec![1.0 / n as f64; n], vectors)?;
    let s_avg = von_neumann_entropy(&ens.average())?;
    let ob = orthonormal_bound(n, delta);
    let hb = holevo_bound(s_avg, n, delta);
    let members = if ob.max(hb) <= 0.0 {
        // vacuous bounds; nothing to search
        Vec::new()
    } else {
        states
            .iter()
            .map(|s| qc_upper_bound(spec, s, delta, cfg, caps))
            .collect::<Result<_>>()?
    };
    let need = ob.max(hb);
    let consistent = need <= 0.0 || members.iter().any(|m| m.floor() as f64 >= need);
    Ok(AuditReport {
        n,
        delta,
        orthonormal_bound: ob,
        holevo_bound: hb,
        members,
        consistent,
    })
}

/// Outputs of all classical inputs up to length `max_len` and a greedy
/// orthonormal family of pure states each within `δ` of some output.
#[derive(Clone, Debug)]
pub struct CountingReport {
    pub inputs: usize,
    pub family: usize,
    pub bound: f64,
}

impl CountingReport {
    pub fn holds(&self) -> bool {
        (self.family as f64).log2() <= self.bound + 1e-12
    }
}

pub fn counting_experiment(
    spec: &QtmSpec,
    max_len: usize,
    delta: f64,
    t_max: usize,
    caps: &Caps,
) -> Result<CountingReport> {
    let cfg = SearchConfig::classical(max_len, t_max);
    let cands = cfg.candidates(caps)?;
    let outs: Vec<QubitString> = cands
        .iter()
        .map(|c| apply(spec, c, t_max, caps))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let out_len = outs.iter().map(QubitString::max_len).max().unwrap_or(0);
    let mut family: Vec<FVec> = Vec::new();
    for o in &outs {
        let m = o.float_matrix_padded(out_len);
        let (vals, vecs) = crate::linalg::hermitian_eigen(&m)?;
        // the top eigenvector is the closest pure state
        let v: FVec = vecs.column(0).into_owned();
        let d = pure_distance(&m, &v, vals[0])?;
        if d >= delta {
            continue;
        }
        if family.iter().all(|f| f.dotc(&v).norm() < TOL) {
            family.push(v);
        }
    }
    let dim = (1u64 << (max_len + 1)) - 1;
    Ok(CountingReport {
        inputs: cands.len(),
        family: family.len().max(1),
        bound: counting_bound(dim, delta.min(0.18))?,
    })
}

fn pure_distance(rho: &FMat, v: &FVec, _top: f64) -> Result<f64> {
    crate::linalg::trace_distance(rho, &(v * v.adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigenvalues, Surd};
    use crate::qtm::machines;

    fn ket(xs: &[f64]) -> FVec {
        FVec::from_iterator(xs.len(), xs.iter().map(|&x| Complex64::new(x, 0.0)))
    }

    #[test]
    fn counting_examples() {
        assert!((counting_bound(8, 0.0).unwrap() - 3.0).abs() < 1e-12);
        assert!((counting_bound(2, 0.125).unwrap() - 5.0).abs() < 1e-12);
        assert!((counting_bound(4, 0.0625).unwrap() - 4.0).abs() < 1e-12);
        assert!(counting_bound(4, 0.2).is_err());
        assert!(counting_bound(0, 0.0).is_err());
    }

    #[test]
    fn chi_examples() {
        let r = 0.5f64.sqrt();
        let e = Ensemble::pure(vec![0.5, 0.5], &[ket(&[1.0, 0.0]), ket(&[r, r])]).unwrap();
        // oracle: eigenvalues (1 ± 1/√2)/2 of the average
        let p = (1.0 + r) / 2.0;
        let want = -(p * p.log2() + (1.0 - p) * (1.0 - p).log2());
        assert!((chi_quantity(&e).unwrap() - want).abs() < 1e-10);
        assert!((want - 0.6009).abs() < 1e-4);
        let ev = hermitian_eigenvalues(&e.average()).unwrap();
        assert!((ev[0] - p).abs() < 1e-12 || (ev[1] - p).abs() < 1e-12);
        let same = Ensemble::pure(vec![0.3, 0.7], &[ket(&[r, r]), ket(&[r, r])]).unwrap();
        assert!(chi_quantity(&same).unwrap().abs() < 1e-10);
        let basis: Vec<FVec> = (0..4)
            .map(|i| FVec::from_fn(4, |j, _| Complex64::new(f64::from(u8::from(i == j)), 0.0)))
            .collect();
        let u = Ensemble::pure(vec![0.25; 4], &basis).unwrap();
        assert!((chi_quantity(&u).unwrap() - 2.0).abs() < 1e-10);
        assert!(chi_quantity(&e.dephased()).unwrap() <= chi_quantity(&e).unwrap() + 1e-10);
    }

    #[test]
    fn qc_examples() {
        let c = Caps::default();
        let id = machines::identity();
        let rho = QubitString::classical("01").unwrap();
        let cfg = SearchConfig::classical(3, 16);
        assert_eq!(qc_upper_bound(&id, &rho, 0.1, &cfg, &c).unwrap(), QcBound::AtMost(2));
        assert_eq!(
            qc_upper_bound(&id, &QubitString::empty(), 0.1, &cfg, &c).unwrap(),
            QcBound::AtMost(0)
        );
        let h = Surd::inv_sqrt(&crate::linalg::rat(2, 1)).unwrap();
        let plus = QubitString::pure(&[("0".into(), h.clone()), ("1".into(), h)]).unwrap();
        assert_eq!(qc_upper_bound(&id, &plus, 0.1, &cfg, &c).unwrap(), QcBound::Exceeds(3));
        let with_plus = SearchConfig {
            extra: vec![plus.clone()],
            ..cfg.clone()
        };
        assert_eq!(
            qc_upper_bound(&id, &plus, 0.1, &with_plus, &c).unwrap(),
            QcBound::AtMost(1)
        );
    }

    #[test]
    fn relation_examples() {
        let c = Caps::default();
        let id = machines::identity();
        let cfg = SearchConfig::classical(2, 24);
        for s in ["", "1", "01"] {
            let rho = QubitString::classical(s).unwrap();
            for k in [1, 2, 3, 5] {
                let r = relation_check(&id, &rho, k, ParamMode::Ignored, &cfg, &c).unwrap();
                assert_eq!(r.scheme, QcBound::AtMost(s.len()));
                assert!(r.holds(), "{r:?}");
                let plain = relation_check(&id, &rho, k, ParamMode::Encoded, &cfg, &c).unwrap();
                assert!(plain.holds(), "{plain:?}");
            }
        }
    }

    #[test]
    fn audit_examples() {
        assert!((orthonormal_bound(256, 0.01) - 6.4142).abs() < 1e-3);
        assert!((orthonormal_bound(4, 0.0625) + 0.5).abs() < 1e-12);
        assert!(orthonormal_bound(1, 0.01) < 0.0);
        // 1 − (1/4) log 40
        assert!((holevo_bound(2.0, 4, 0.0625) - (1.0 - 0.25 * 40f64.log2())).abs() < 1e-12);

        let c = Caps::default();
        let id = machines::identity();
        let strs = ["00", "01", "10", "11"];
        let states: Vec<QubitString> = strs.iter().map(|s| QubitString::classical(s).unwrap()).collect();
        let vecs: Vec<FVec> = (0..4)
            .map(|i| FVec::from_fn(4, |j, _| Complex64::new(f64::from(u8::from(i == j)), 0.0)))
            .collect();
        let r = incompressibility_audit(&id, &states, &vecs, 0.0625, &SearchConfig::classical(2, 16), &c).unwrap();
        assert!(r.consistent && r.members.is_empty());
        let r0 = incompressibility_audit(&id, &states, &vecs, 0.01, &SearchConfig::classical(2, 16), &c).unwrap();
        assert!(r0.orthonormal_bound > 0.0);
        assert!(r0.consistent);
        assert!(r0.members.iter().all(|m| *m == QcBound::AtMost(2)));
        let bad = vec![vecs[0].clone(), vecs[0].clone()];
        assert!(incompressibility_audit(&id, &states[..2], &bad, 0.0, &SearchConfig::classical(2, 16), &c).is_err());
    }

    #[test]
    fn counting_experiment_respects_bound() {
        let c = Caps::default();
        for m in [
            machines::identity(),
            machines::hadamard_like(),
            machines::random_machine(5, 3),
        ] {
            let r = counting_experiment(&m, 3, 0.05, 24, &c).unwrap();
            assert!(r.holds(), "{r:?}");
        }
    }
}
