//! One test per acceptance criterion. Each prints a single PASS/FAIL line.

use std::io::Write;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qkolmo::brudno::{empirical_typical_codewords, symmetric_subspace_check, universal_typical_projector, SourceModel};
use qkolmo::coding::{kraft_check, kraft_sum, CompressionMap, PrefixCode};
use qkolmo::halting::bounds::halting_lemma_suite;
use qkolmo::halting::{approx_halting_space, eps_t_halting, exact_halting_space, exact_halting_spaces};
use qkolmo::linalg::{op_norm, rat, CRat, CVec, FMat, Rational, Surd, SurdVec};
use qkolmo::pipeline::{
    chi_quantity, counting_bound, counting_experiment, decode_program, encode_input, relation_check, Ensemble,
    ParamMode, PipelineOptions, SearchConfig,
};
use qkolmo::qtm::{apply, machines, validate_unitarity, QtmSpec, QubitString};
use qkolmo::Caps;

fn report(id: u32, ok: bool, elapsed: Duration, limit: Option<Duration>, detail: &str) {
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let verdict = if ok && in_time { "PASS" } else { "FAIL" };
    // the raw handle bypasses libtest capture, so the line shows in every run
    let _ = writeln!(
        std::io::stderr(),
        "criterion {id}: {verdict} ({detail}; {:.2}s)",
        elapsed.as_secs_f64()
    );
    assert!(ok, "criterion {id}: {detail}");
    assert!(in_time, "criterion {id}: over the time limit");
}

fn caps() -> Caps {
    Caps::default()
}

fn unit(v: &CVec) -> SurdVec {
    let s = Surd::inv_sqrt(&v.norm_sq()).unwrap();
    SurdVec(v.0.iter().map(|c| s.scale_c(c)).collect())
}

fn random_combination(rng: &mut ChaCha8Rng, basis: &[CVec], dim: usize) -> Option<SurdVec> {
    let mut v = CVec::zeros(dim);
    for b in basis {
        v.axpy(&CRat::from_ints(rng.gen_range(-3..=3), rng.gen_range(-3..=3)), b);
    }
    (!v.is_zero()).then(|| unit(&v))
}

#[test]
fn criterion_01_halting_orthogonality_and_budget() {
    let start = Instant::now();
    let caps = caps();
    let mut ms = vec![machines::identity()];
    // validated machines with at least two halting times on H_3
    let mut seed = 0;
    while ms.len() < 6 {
        let m = machines::random_machine(seed, 2 + (seed as usize % 2));
        seed += 1;
        let live = exact_halting_spaces(&m, 3, 16, &caps)
            .unwrap()
            .iter()
            .filter(|h| h.dim() > 0)
            .count();
        if live >= 2 && validate_unitarity(&m, 8, 3, &caps).unwrap() {
            ms.push(m);
        }
    }
    let mut checked = 0;
    for m in &ms {
        for n in 0..=3 {
            let spaces = exact_halting_spaces(m, n, 16, &caps).unwrap();
            let total: usize = spaces.iter().map(|h| h.dim()).sum();
            assert!(total <= 1 << n, "{} n={n}: total {total}", m.name());
            for (i, a) in spaces.iter().enumerate() {
                for b in &spaces[..i] {
                    for u in a.directions() {
                        for v in b.directions() {
                            assert!(u.inner(&v).is_zero(), "{} n={n}: t={} vs t={}", m.name(), a.t, b.t);
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    report(
        1,
        true,
        start.elapsed(),
        Some(Duration::from_secs(60)),
        &format!("{} machines, {checked} exact cross products zero", ms.len()),
    );
}

#[test]
fn criterion_02_approx_matches_exact_for_identity() {
    let start = Instant::now();
    let caps = caps();
    let id = machines::identity();
    let delta = rat(1, 100);
    let eps20 = &delta * rat(20, 1);
    let mut ok = true;
    let mut dims = Vec::new();
    for t in 1..=8 {
        let exact = exact_halting_space(&id, 1, t, &caps).unwrap();
        let approx = approx_halting_space(&id, 1, &delta, t, &caps).unwrap();
        ok &= approx.dim() == exact.dim();
        dims.push(approx.dim());
        for b in &approx.basis {
            let sigma = QubitString::fixed_length(1, &unit(b)).unwrap();
            ok &= eps_t_halting(&id, &sigma, t, &eps20, &caps).unwrap();
        }
    }
    // identity on H_1 halts exactly at t = 2
    ok &= dims == [0, 2, 0, 0, 0, 0, 0, 0];
    report(
        2,
        ok,
        start.elapsed(),
        Some(Duration::from_secs(120)),
        &format!("dims over t=1..8: {dims:?}"),
    );
}

#[test]
fn criterion_03_blind_prefix_coding() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let one = Rational::from_integer(1.into());
    let mut ok = true;
    for _ in 0..1000 {
        let mut code = PrefixCode::new();
        let mut lens = Vec::new();
        for _ in 0..rng.gen_range(1..=64) {
            let l = rng.gen_range(1..=12);
            lens.push(l);
            if !kraft_check(&lens) {
                lens.pop();
                continue;
            }
            let w = code.extend(l).unwrap().to_string();
            ok &= w.len() == l;
        }
        let words = code.codewords();
        // pairwise prefix oracle
        for (i, a) in words.iter().enumerate() {
            for (j, b) in words.iter().enumerate() {
                ok &= i == j || !b.starts_with(a.as_str());
            }
        }
        ok &= kraft_sum(&lens) <= one;
    }
    let worked = PrefixCode::from_lengths(&[1, 2, 2]).unwrap();
    ok &= worked.codewords() == ["0", "10", "11"];
    report(
        3,
        ok,
        start.elapsed(),
        None,
        "1000 sequences extended; {1,2,2} -> {0,10,11}",
    );
}

#[test]
fn criterion_04_standard_compression_round_trip() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut ok = true;
    let mut done = 0;
    let mut worst: f64 = 0.0;
    while done < 200 {
        let n = rng.gen_range(1..=4);
        let dim = 1usize << n;
        let k = rng.gen_range(1..=dim.min(4));
        let span: Vec<CVec> = (0..k)
            .map(|_| {
                CVec(
                    (0..dim)
                        .map(|_| CRat::from_ints(rng.gen_range(-2..=2), rng.gen_range(-2..=2)))
                        .collect(),
                )
            })
            .filter(|v| !v.is_zero())
            .collect();
        if span.is_empty() {
            continue;
        }
        let Some(psi) = random_combination(&mut rng, &span, dim) else {
            continue;
        };
        let map = CompressionMap::new(&span).unwrap();
        let chi = map.compress(&psi).unwrap();
        ok &= map.decompress(&chi).unwrap() == psi;
        for delta in [1e-3, 1e-6] {
            let f = map.decompress_float(&chi.to_c64(), delta).unwrap();
            let err = (f - psi.to_c64()).norm();
            worst = worst.max(err / delta);
            ok &= err <= delta;
        }
        done += 1;
    }
    report(
        4,
        ok,
        start.elapsed(),
        None,
        &format!("200 subspaces exact; worst float error/δ {worst:.2e}"),
    );
}

fn pipeline_trials(m: &QtmSpec, n: usize, count: usize, rng: &mut ChaCha8Rng, caps: &Caps) -> bool {
    let spaces: Vec<_> = exact_halting_spaces(m, n, 16, caps)
        .unwrap()
        .into_iter()
        .filter(|h| h.dim() > 0)
        .collect();
    assert!(!spaces.is_empty(), "{} has no halting inputs of length {n}", m.name());
    let opts = PipelineOptions::default();
    let mut ok = true;
    let mut done = 0;
    while done < count {
        let h = &spaces[rng.gen_range(0..spaces.len())];
        let Some(psi) = random_combination(rng, &h.directions(), 1 << n) else {
            continue;
        };
        let prog = encode_input(m, &psi, &opts, caps).unwrap();
        ok &= prog.quantum_length() == n + 1;
        let want = apply(m, &QubitString::fixed_length(n, &psi).unwrap(), 16, caps)
            .unwrap()
            .unwrap();
        let exact = decode_program(&prog, &rat(0, 1), 16, caps).unwrap();
        ok &= exact.exact_eq(&want) == Some(true);
        let d = decode_program(&prog, &rat(1, 10_000), 16, caps)
            .unwrap()
            .trace_distance(&want)
            .unwrap();
        ok &= d <= 1e-4;
        done += 1;
    }
    ok
}

#[test]
fn criterion_05_universal_pipeline() {
    let start = Instant::now();
    let caps = caps();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let id = machines::identity();
    let mut ok = pipeline_trials(&id, 1, 50, &mut rng, &caps);
    ok &= pipeline_trials(&id, 2, 50, &mut rng, &caps);
    // a random reversible machine with at least two halting times on H_2
    let m = (0..)
        .map(|s| machines::random_machine(s, 3))
        .find(|m| {
            exact_halting_spaces(m, 2, 16, &caps)
                .unwrap()
                .iter()
                .filter(|h| h.dim() > 0)
                .count()
                >= 2
        })
        .unwrap();
    ok &= pipeline_trials(&m, 2, 50, &mut rng, &caps);
    report(
        5,
        ok,
        start.elapsed(),
        Some(Duration::from_secs(600)),
        &format!("identity n=1,2 and {}: 150 inputs", m.name()),
    );
}

#[test]
fn criterion_06_counting_bound() {
    let start = Instant::now();
    let caps = caps();
    let delta = 1.0 / 16.0;
    let r = counting_experiment(&machines::identity(), 6, delta, 16, &caps).unwrap();
    // independent closed form over dim H_{<=6} = 127
    let oracle = (127f64.log2() + 4.0 * delta * (1.0 / delta).log2()) / (1.0 - 4.0 * delta);
    let mut ok = r.inputs == 127 && (r.bound - oracle).abs() < 1e-12 && (r.family as f64).log2() <= r.bound;
    for d in 1..=16u64 {
        ok &= counting_bound(d, 0.0).unwrap() == (d as f64).log2();
    }
    report(
        6,
        ok,
        start.elapsed(),
        None,
        &format!(
            "family {} (log {:.3}) vs bound {:.4}",
            r.family,
            (r.family as f64).log2(),
            r.bound
        ),
    );
}

fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> FMat {
    let g = FMat::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let m = &g * g.adjoint();
    let tr = m.trace();
    m / tr
}

#[test]
fn criterion_07_bound_lemmas() {
    let start = Instant::now();
    let caps = caps();
    let m = (0..)
        .map(|s| machines::random_machine(s, 3))
        .find(|m| {
            exact_halting_spaces(m, 2, 10, &caps)
                .unwrap()
                .iter()
                .filter(|h| h.dim() > 0)
                .count()
                >= 2
        })
        .unwrap();
    let reports = halting_lemma_suite(&m, 2, 10, 1000, 7, &caps).unwrap();
    let mut ok = reports.len() == 3 && reports.iter().all(|r| r.trials >= 1000 && r.passed());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut norm_bad, mut chi_bad) = (0, 0);
    for _ in 0..1000 {
        let dim = 1usize << rng.gen_range(1..=3);
        let a = random_density(&mut rng, dim);
        let b = random_density(&mut rng, dim);
        let delta = &a - &b;
        // trace norm from singular values as the oracle
        let tr: f64 = DMatrix::from(delta.clone()).singular_values().iter().sum();
        if op_norm(&delta) > tr + 1e-10 {
            norm_bad += 1;
        }
        let k = rng.gen_range(1..=4);
        let states: Vec<FMat> = (0..k).map(|_| random_density(&mut rng, dim)).collect();
        let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..1.0)).collect();
        let s: f64 = w.iter().sum();
        let e = Ensemble::new(w.iter().map(|x| x / s).collect(), states).unwrap();
        if chi_quantity(&e).unwrap() < -1e-10 {
            chi_bad += 1;
        }
    }
    ok &= norm_bad == 0 && chi_bad == 0;
    let v: usize = reports.iter().map(|r| r.violations).sum();
    report(
        7,
        ok,
        start.elapsed(),
        None,
        &format!("5 checks x 1000 trials; violations {v}/{norm_bad}/{chi_bad}"),
    );
}

#[test]
fn criterion_08_brudno_desk_scale() {
    let start = Instant::now();
    let caps = caps();
    let src = SourceModel::iid_diag("skew", rat(9, 10)).unwrap();
    let s_oracle = -(0.9f64 * 0.9f64.log2() + 0.1 * 0.1f64.log2());
    let s = src.entropy_rate();
    let eps = rat(1, 10);
    let gap = |n: usize| (src.beta_min(n, &eps, &caps).unwrap().log_trace / n as f64 - s).abs();
    let (g4, g16) = (gap(4), gap(16));
    let ok = (s - s_oracle).abs() < 1e-12 && (s - 0.46900).abs() < 5e-6 && g16 <= 0.15 && g16 <= g4;
    report(
        8,
        ok,
        start.elapsed(),
        Some(Duration::from_secs(10)),
        &format!("s {s:.5}; gap n=4 {g4:.4}, n=16 {g16:.4}"),
    );
}

fn binomial(n: u64, k: u64) -> u64 {
    (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
}

#[test]
fn criterion_09_symmetric_subspace() {
    let start = Instant::now();
    let caps = caps();
    let mut ok = true;
    for n in 1..=3usize {
        let (formula, rank) = symmetric_subspace_check(1, n, &caps).unwrap();
        let want = binomial(n as u64 + 3, 3);
        ok &= rank as u64 == want && formula == want.into();
    }
    let mut instances = 0;
    for (l, n, r) in [
        (1, 2, 0.5),
        (1, 3, 0.9),
        (1, 4, 0.7),
        (1, 5, 0.9),
        (2, 2, 1.0),
        (2, 3, 1.2),
    ] {
        let words = empirical_typical_codewords(l, n, r, &caps).unwrap();
        let p = universal_typical_projector(&words, l, n, l * n, &caps).unwrap();
        let bound = (1usize << (2 * l)) as f64 * ((n + 1) as f64).log2() + r * n as f64 + l as f64;
        ok &= (p.rank() as f64).log2() <= bound + 1e-12;
        instances += 1;
    }
    report(
        9,
        ok,
        start.elapsed(),
        None,
        &format!("ranks C(n+3,3) for n=1..3; {instances} trace-bound instances"),
    );
}

#[test]
fn criterion_10_relation_lemma() {
    let start = Instant::now();
    let caps = caps();
    let id = machines::identity();
    let mut targets: Vec<QubitString> = ["", "0", "1", "00", "01", "10", "11", "000", "011", "101", "110", "111"]
        .iter()
        .map(|s| QubitString::classical(s).unwrap())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut extra = Vec::new();
    while targets.len() < 20 {
        let n = rng.gen_range(1..=2);
        let basis: Vec<CVec> = (0..1usize << n)
            .map(|i| {
                CVec(
                    (0..1usize << n)
                        .map(|j| if i == j { CRat::one() } else { CRat::zero() })
                        .collect(),
                )
            })
            .collect();
        let Some(psi) = random_combination(&mut rng, &basis, 1 << n) else {
            continue;
        };
        let q = QubitString::fixed_length(n, &psi).unwrap();
        extra.push(q.clone());
        targets.push(q);
    }
    let cfg = SearchConfig {
        max_len: 3,
        extra,
        t_max: 24,
    };
    let mut ok = true;
    for rho in &targets {
        for k in [2, 4, 8] {
            ok &= relation_check(&id, rho, k, ParamMode::Ignored, &cfg, &caps)
                .unwrap()
                .holds();
        }
    }
    report(
        10,
        ok,
        start.elapsed(),
        None,
        &format!("{} targets, k in {{2,4,8}}", targets.len()),
    );
}
