//! Invariant suites driven by `verify-suite`.

use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::brudno::{empirical_typical_codewords, symmetric_subspace_check, universal_typical_projector, SourceModel};
use crate::caps::Caps;
use crate::coding::{kraft_check, kraft_sum, CompressionMap, PrefixCode};
use crate::error::{parse_err, Error, Result};
use crate::halting::{bounds::halting_lemma_suite, exact_halting_spaces};
use crate::linalg::{op_norm, rat, CRat, CVec, FMat, Rational, Surd, SurdVec};
use crate::pipeline::{
    chi_quantity, counting_experiment, decode_program, encode_input, relation_check, Ensemble, ParamMode,
    PipelineOptions, SearchConfig,
};
use crate::qtm::{apply, machines, validate_unitarity, QtmSpec, QubitString};

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: usize,
    pub machines: Vec<QtmSpec>,
    pub sources: Vec<SourceModel>,
}

impl SuiteConfig {
    pub fn builtin(seed: u64) -> Result<SuiteConfig> {
        Ok(SuiteConfig {
            seed,
            trials: 1000,
            machines: vec![
                machines::identity(),
                machines::hadamard_like(),
                machines::length_two(),
                machines::split_prefix(),
                machines::random_machine(3, 3),
            ],
            sources: vec![
                SourceModel::iid_diag("skew", rat(9, 10))?,
                SourceModel::iid("tilted", rat(3, 4), CRat::new(rat(1, 5), rat(1, 10)), rat(1, 4))?,
                SourceModel::markov(
                    "sticky",
                    [[rat(3, 4), rat(1, 4)], [rat(1, 2), rat(1, 2)]],
                    [rat(2, 3), rat(1, 3)],
                )?,
            ],
        })
    }

    /// `seed:`, `trials:`, `machine: <path>` and `source: <path>` lines;
    /// paths are relative to the config file.
    pub fn parse(text: &str, base: &Path) -> Result<SuiteConfig> {
        let mut cfg = SuiteConfig {
            seed: 1,
            trials: 1000,
            machines: Vec::new(),
            sources: Vec::new(),
        };
        for (i, line) in text.lines().enumerate() {
            let l = line.split('#').next().unwrap_or("").trim();
            if l.is_empty() {
                continue;
            }
            let (k, v) = l
                .split_once(':')
                .ok_or_else(|| parse_err(i + 1, format!("expected `key: value`, got `{l}`")))?;
            let v = v.trim();
            let read = |p: &str| std::fs::read_to_string(base.join(p)).map_err(|e| Error::Io(format!("{p}: {e}")));
            match k.trim() {
                "seed" => cfg.seed = v.parse().map_err(|_| parse_err(i + 1, "bad seed"))?,
                "trials" => cfg.trials = v.parse().map_err(|_| parse_err(i + 1, "bad trial count"))?,
                "machine" => cfg.machines.push(QtmSpec::parse(&read(v)?)?),
                "source" => cfg.sources.push(SourceModel::parse(&read(v)?)?),
                other => return Err(parse_err(i + 1, format!("unknown key `{other}`"))),
            }
        }
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn result(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> SuiteResult {
    SuiteResult {
        name: name.into(),
        passed,
        detail: detail.into(),
    }
}

/// Runs every suite; domain errors inside a suite count as failures.
pub fn run_suite(cfg: &SuiteConfig, caps: &Caps) -> Vec<SuiteResult> {
    let mut out = Vec::new();
    let mut unitary = Vec::new();
    for m in &cfg.machines {
        let r = validate_unitarity(m, 8, 3, caps);
        let ok = matches!(r, Ok(true));
        out.push(result(
            format!("validate {}", m.name()),
            ok,
            match &r {
                Ok(true) => "unitary".to_string(),
                Ok(false) => "not unitary on the reachable window".to_string(),
                Err(e) => e.to_string(),
            },
        ));
        if ok {
            unitary.push(m);
        }
    }
    for m in &unitary {
        out.push(wrap(
            format!("halting orthogonality {}", m.name()),
            orthogonality(m, caps),
        ));
    }
    out.push(wrap("lemma bounds", lemma_bounds(cfg, &unitary, caps)));
    out.push(wrap("blind prefix coding", prefix_coding(cfg.seed, 200)));
    out.push(wrap("compression round trip", compression(cfg.seed, 50)));
    out.push(wrap("universal pipeline", pipeline(cfg.seed, caps)));
    out.push(wrap("counting bound", counting(&unitary, caps)));
    out.push(wrap("chi and norms", chi_norms(cfg.seed, cfg.trials)));
    for s in &cfg.sources {
        out.push(wrap(format!("source {}", s.name), source_checks(s, caps)));
    }
    out.push(wrap("symmetric subspace", symmetric(caps)));
    out.push(wrap("relation lemma", relation(caps)));
    out
}

fn wrap(name: impl Into<String>, r: Result<(bool, String)>) -> SuiteResult {
    match r {
        Ok((ok, d)) => result(name, ok, d),
        Err(e) => result(name, false, format!("error: {e}")),
    }
}

fn orthogonality(m: &QtmSpec, caps: &Caps) -> Result<(bool, String)> {
    let mut dims = Vec::new();
    for n in 0..=2 {
        let spaces = exact_halting_spaces(m, n, 16, caps)?;
        let all: Vec<(usize, CVec)> = spaces
            .iter()
            .flat_map(|h| h.directions().into_iter().map(move |v| (h.t, v)))
            .collect();
        for (i, (t, a)) in all.iter().enumerate() {
            for (s, b) in &all[..i] {
                if s != t && !a.inner(b).is_zero() {
                    return Ok((false, format!("spaces at t={s} and t={t} overlap for n={n}")));
                }
            }
        }
        let total: usize = spaces.iter().map(|h| h.dim()).sum();
        if total > 1 << n {
            return Ok((false, format!("dimension budget exceeded for n={n}")));
        }
        dims.push(total);
    }
    Ok((true, format!("total dims for n=0..2: {dims:?}")))
}

fn lemma_bounds(cfg: &SuiteConfig, unitary: &[&QtmSpec], caps: &Caps) -> Result<(bool, String)> {
    // the first machine (supplied or random) that halts at two times on H_2
    let extra: Vec<QtmSpec> = (0..50).map(|s| machines::random_machine(s, 3)).collect();
    for m in unitary.iter().copied().chain(extra.iter()) {
        let live = exact_halting_spaces(m, 2, 10, caps)?
            .iter()
            .filter(|h| h.dim() > 0)
            .count();
        if live < 2 {
            continue;
        }
        let reports = halting_lemma_suite(m, 2, 10, cfg.trials, cfg.seed, caps)?;
        let ok = reports.iter().all(|r| r.passed());
        let v: usize = reports.iter().map(|r| r.violations).sum();
        return Ok((
            ok,
            format!(
                "{} on {}: {} trials each, {v} violations",
                reports.len(),
                m.name(),
                cfg.trials
            ),
        ));
    }
    Ok((false, "no machine with two halting times".into()))
}

fn prefix_coding(seed: u64, trials: usize) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let mut lens = Vec::new();
        for _ in 0..rng.gen_range(1..=64) {
            let l = rng.gen_range(1..=12);
            lens.push(l);
            if !kraft_check(&lens) {
                lens.pop();
            }
        }
        let code = PrefixCode::from_lengths(&lens)?;
        if !code.is_prefix_free() || kraft_sum(&lens) > Rational::from_integer(1.into()) {
            return Ok((false, format!("lengths {lens:?}")));
        }
    }
    let w = PrefixCode::from_lengths(&[1, 2, 2])?;
    let ok = w.codewords() == ["0", "10", "11"];
    Ok((
        ok,
        format!("{trials} random sequences; {{1,2,2}} -> {:?}", w.codewords()),
    ))
}

fn random_cvec(rng: &mut ChaCha8Rng, dim: usize) -> CVec {
    CVec(
        (0..dim)
            .map(|_| CRat::from_ints(rng.gen_range(-3..=3), rng.gen_range(-3..=3)))
            .collect(),
    )
}

pub(crate) fn unit(v: &CVec) -> SurdVec {
    let s = Surd::inv_sqrt(&v.norm_sq()).expect("nonzero vector");
    SurdVec(v.0.iter().map(|c| s.scale_c(c)).collect())
}

fn compression(seed: u64, trials: usize) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0de);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let n = rng.gen_range(1..=3);
        let dim = 1usize << n;
        let k = rng.gen_range(1..=dim);
        let span: Vec<CVec> = (0..k)
            .map(|_| random_cvec(&mut rng, dim))
            .filter(|v| !v.is_zero())
            .collect();
        if span.is_empty() {
            continue;
        }
        let map = CompressionMap::new(&span)?;
        let mut psi = CVec::zeros(dim);
        for v in &span {
            psi.axpy(&CRat::from_ints(rng.gen_range(-2..=2), rng.gen_range(-2..=2)), v);
        }
        if psi.is_zero() {
            continue;
        }
        let psi = unit(&psi);
        let chi = map.compress(&psi)?;
        if map.decompress(&chi)? != psi {
            return Ok((false, "exact round trip differs".into()));
        }
        for delta in [1e-3, 1e-6] {
            let f = map.decompress_float(&chi.to_c64(), delta)?;
            let err = (f - psi.to_c64()).norm();
            worst = worst.max(err / delta);
            if err > delta {
                return Ok((false, format!("float error {err:e} > {delta:e}")));
            }
        }
    }
    Ok((true, format!("{trials} subspaces; worst float error / δ = {worst:.3e}")))
}

fn pipeline(seed: u64, caps: &Caps) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
    let id = machines::identity();
    let opts = PipelineOptions::default();
    let delta = rat(1, 10_000);
    for n in 1..=2usize {
        let h = exact_halting_spaces(&id, n, 16, caps)?;
        let basis: Vec<CVec> = h.iter().flat_map(|s| s.directions()).collect();
        for _ in 0..5 {
            let mut v = CVec::zeros(1 << n);
            for b in &basis {
                v.axpy(&CRat::from_ints(rng.gen_range(-3..=3), rng.gen_range(-3..=3)), b);
            }
            if v.is_zero() {
                continue;
            }
            let psi = unit(&v);
            let prog = encode_input(&id, &psi, &opts, caps)?;
            if prog.quantum_length() != n + 1 {
                return Ok((false, format!("length {} for n = {n}", prog.quantum_length())));
            }
            let want = apply(&id, &QubitString::fixed_length(n, &psi)?, 16, caps)?.ok_or(Error::NonHalting(16))?;
            let exact = decode_program(&prog, &rat(0, 1), 16, caps)?;
            if exact.exact_eq(&want) != Some(true) {
                return Ok((false, "exact decode differs".into()));
            }
            let d = decode_program(&prog, &delta, 16, caps)?.trace_distance(&want)?;
            if d >= 1e-4 {
                return Ok((false, format!("float decode off by {d:e}")));
            }
        }
    }
    Ok((
        true,
        "identity, n = 1, 2: length n+1, exact and δ = 1e-4 round trips".into(),
    ))
}

fn counting(unitary: &[&QtmSpec], caps: &Caps) -> Result<(bool, String)> {
    let mut worst = f64::NEG_INFINITY;
    for m in unitary.iter().take(3) {
        let r = counting_experiment(m, 4, 1.0 / 16.0, 24, caps)?;
        worst = worst.max((r.family as f64).log2() - r.bound);
        if !r.holds() {
            return Ok((false, format!("{}: family {} vs bound {}", m.name(), r.family, r.bound)));
        }
    }
    Ok((true, format!("max log-family minus bound {worst:.3}")))
}

fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> FMat {
    let g = FMat::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let m = &g * g.adjoint();
    let tr = m.trace();
    m / tr
}

fn chi_norms(seed: u64, trials: usize) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x51);
    let mut worst_chi: f64 = 0.0;
    let mut worst_norm = f64::NEG_INFINITY;
    for _ in 0..trials {
        let dim = 1usize << rng.gen_range(1..=2);
        let k = rng.gen_range(1..=4);
        let states: Vec<FMat> = (0..k).map(|_| random_density(&mut rng, dim)).collect();
        let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..1.0)).collect();
        let s: f64 = w.iter().sum();
        let e = Ensemble::new(w.iter().map(|x| x / s).collect(), states.clone())?;
        let chi = chi_quantity(&e)?;
        worst_chi = worst_chi.min(chi);
        let delta = &states[0] - &states[k - 1];
        let tr: f64 = crate::linalg::hermitian_eigenvalues(&delta)?
            .iter()
            .map(|x| x.abs())
            .sum();
        worst_norm = worst_norm.max(op_norm(&delta) - tr);
    }
    let ok = worst_chi >= -1e-10 && worst_norm <= 1e-10;
    Ok((
        ok,
        format!("{trials} trials; min χ {worst_chi:.3e}; max ‖Δ‖−‖Δ‖_Tr {worst_norm:.3e}"),
    ))
}

fn source_checks(s: &SourceModel, caps: &Caps) -> Result<(bool, String)> {
    let top = if s.is_diagonal() { 10 } else { 6 };
    let mut prev = s.local_density(1, caps)?;
    let mut max_dev: f64 = 0.0;
    let mut ents = vec![0.0, prev.entropy()?];
    for n in 2..=top {
        let cur = s.local_density(n, caps)?;
        max_dev = max_dev.max(cur.trace_last().distance(&prev));
        ents.push(cur.entropy()?);
        prev = cur;
    }
    let tol = if s.is_diagonal() { 0.0 } else { 1e-12 };
    let sub = (1..=top).all(|a| (1..=top - a).all(|b| ents[a + b] <= ents[a] + ents[b] + 1e-9));
    let rate = s.entropy_rate();
    let eps = rat(1, 10);
    let gap = |n: usize| -> Result<f64> { Ok((s.beta_min(n, &eps, caps)?.log_trace / n as f64 - rate).abs()) };
    let ns = [4usize, 8, 12, 16];
    let gaps: Vec<f64> = ns.iter().map(|&n| gap(n)).collect::<Result<_>>()?;
    // nonincreasing up to one bit of log-trace per step
    let trend = gaps.windows(2).zip(&ns).all(|(g, &n)| g[1] <= g[0] + 1.0 / n as f64);
    let g16 = gaps[3];
    let ok = max_dev <= tol && sub && trend && g16 <= 0.15;
    Ok((
        ok,
        format!("consistency {max_dev:.1e}; subadditive {sub}; gaps {gaps:.4?}"),
    ))
}

fn symmetric(caps: &Caps) -> Result<(bool, String)> {
    for n in 1..=3 {
        let (f, r) = symmetric_subspace_check(1, n, caps)?;
        if f != r.into() {
            return Ok((false, format!("n = {n}: formula {f} vs rank {r}")));
        }
    }
    for (l, n, rate) in [(1, 2, 0.5), (1, 3, 0.9), (1, 4, 0.9), (2, 2, 1.0)] {
        let words = empirical_typical_codewords(l, n, rate, caps)?;
        let p = universal_typical_projector(&words, l, n, l * n, caps)?;
        if p.log_trace() > p.log_trace_bound() + 1e-12 {
            return Ok((false, format!("trace bound fails at l={l}, n={n}")));
        }
    }
    Ok((true, "ranks C(n+3,3) for n = 1..3; trace bounds hold".into()))
}

fn relation(caps: &Caps) -> Result<(bool, String)> {
    let id = machines::identity();
    let cfg = SearchConfig::classical(3, 24);
    let targets = ["", "0", "1", "01", "110"];
    for t in targets {
        let rho = QubitString::classical(t)?;
        for k in [2, 4, 8] {
            let r = relation_check(&id, &rho, k, ParamMode::Ignored, &cfg, caps)?;
            if !r.holds() {
                return Ok((false, format!("target {t:?}, k = {k}: {r:?}")));
            }
        }
    }
    Ok((true, format!("{} targets, k in {{2,4,8}}", targets.len())))
}
