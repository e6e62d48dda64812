//! Small machines used by tests, fixtures and the verification suite.

use std::collections::BTreeMap;

use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::spec::{Branch, Cell, Dir, QtmSpec, RuleGroup, BLANK};
use crate::linalg::{rat, rat_int, CRat, Rational};

type Rules = BTreeMap<(usize, Cell), RuleGroup>;

fn cell(s: &str) -> Cell {
    let t = |c: char| match c {
        '0' => 0,
        '1' => 1,
        _ => BLANK,
    };
    let cs: Vec<char> = s.chars().collect();
    Cell::new(t(cs[0]), t(cs[1]))
}

fn det(rules: &mut Rules, q: usize, a: &str, next: usize, w: &str, dir: Dir) {
    rules.insert(
        (q, cell(a)),
        RuleGroup {
            branches: vec![Branch {
                next,
                write: cell(w),
                dir,
                amp: CRat::one(),
            }],
            normsq: Rational::one(),
        },
    );
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn build(name: &str, states: &[&str], rules: Rules) -> QtmSpec {
    let n = states.len();
    QtmSpec::new(name, names(states), 0, n - 1, rules).expect("built-in machine is well formed")
}

/// Moves the input track onto the output track and halts on the first blank.
pub fn identity() -> QtmSpec {
    let mut r = Rules::new();
    det(&mut r, 0, "##", 1, "##", Dir::R);
    det(&mut r, 0, "0#", 0, "#0", Dir::R);
    det(&mut r, 0, "1#", 0, "#1", Dir::R);
    build("identity", &["q0", "qf"], r)
}

/// Walks right forever; the final state is unreachable.
pub fn never_halting() -> QtmSpec {
    let mut r = Rules::new();
    for a in Cell::all() {
        let s = a.to_string();
        det(&mut r, 0, &s, 0, &s, Dir::R);
    }
    build("never-halting", &["q0", "qf"], r)
}

/// Copies the input while rotating the control between `q0` and `q1` with
/// amplitudes `1/√2, ∓i/√2`; only `q0` halts on the blank.
pub fn hadamard_like() -> QtmSpec {
    let mut r = Rules::new();
    let h = |w: &str, s: i64| {
        let branches = vec![
            Branch {
                next: 0,
                write: cell(w),
                dir: Dir::R,
                amp: CRat::one(),
            },
            Branch {
                next: 1,
                write: cell(w),
                dir: Dir::R,
                amp: CRat::from_ints(0, s),
            },
        ];
        RuleGroup {
            branches,
            normsq: rat(2, 1),
        }
    };
    for (a, w) in [("0#", "#0"), ("1#", "#1")] {
        r.insert((0, cell(a)), h(w, -1));
        r.insert((1, cell(a)), h(w, 1));
    }
    det(&mut r, 0, "##", 2, "##", Dir::R);
    det(&mut r, 1, "##", 1, "##", Dir::R);
    build("hadamard-like", &["q0", "q1", "qf"], r)
}

/// Two different symbols are mapped to the same successor: not unitary.
pub fn collision() -> QtmSpec {
    let mut r = Rules::new();
    det(&mut r, 0, "0#", 1, "##", Dir::R);
    det(&mut r, 0, "1#", 1, "##", Dir::R);
    det(&mut r, 0, "##", 2, "##", Dir::R);
    for a in ["0#", "1#", "##"] {
        det(&mut r, 1, a, 2, a, Dir::R);
    }
    build("collision", &["q0", "q1", "qf"], r)
}

/// Copies exactly two input symbols and halts at `t = 3`; every other length
/// falls into a right-moving loop.
pub fn length_two() -> QtmSpec {
    let (q0, q1, q2, lp, qf) = (0, 1, 2, 3, 4);
    let mut r = Rules::new();
    for (a, w) in [("0#", "#0"), ("1#", "#1")] {
        det(&mut r, q0, a, q1, w, Dir::R);
        det(&mut r, q1, a, q2, w, Dir::R);
        det(&mut r, q2, a, lp, a, Dir::R);
    }
    det(&mut r, q0, "##", lp, "##", Dir::R);
    det(&mut r, q1, "##", lp, "##", Dir::R);
    det(&mut r, q2, "##", qf, "##", Dir::R);
    for a in Cell::all() {
        let s = a.to_string();
        det(&mut r, lp, &s, lp, &s, Dir::R);
    }
    build("length-two", &["q0", "q1", "q2", "loop", "qf"], r)
}

/// Halts on `0` (length 1) and on `1x` (length 2), so halting strings of
/// different lengths start with different bits.
pub fn split_prefix() -> QtmSpec {
    let (q0, a0, b0, c0, lp, qf) = (0, 1, 2, 3, 4, 5);
    let mut r = Rules::new();
    det(&mut r, q0, "0#", a0, "#0", Dir::R);
    det(&mut r, q0, "1#", b0, "#1", Dir::R);
    det(&mut r, q0, "##", lp, "##", Dir::R);
    det(&mut r, a0, "##", qf, "##", Dir::R);
    det(&mut r, b0, "##", lp, "##", Dir::R);
    det(&mut r, c0, "##", qf, "##", Dir::R);
    for (a, w) in [("0#", "#0"), ("1#", "#1")] {
        det(&mut r, a0, a, lp, a, Dir::R);
        det(&mut r, b0, a, c0, w, Dir::R);
        det(&mut r, c0, a, lp, a, Dir::R);
    }
    for a in Cell::all() {
        let s = a.to_string();
        det(&mut r, lp, &s, lp, &s, Dir::R);
    }
    build("split-prefix", &["q0", "a", "b", "c", "loop", "qf"], r)
}

/// Rational unitary: permutation × phases in {±1, ±i} × an optional
/// (3/5, 4/5) rotation. Returned as `u[row][col]`.
fn random_unitary(m: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<CRat>> {
    let mut u: Vec<Vec<CRat>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| if i == j { CRat::one() } else { CRat::zero() })
                .collect()
        })
        .collect();
    if m >= 2 && rng.gen_bool(0.7) {
        let i = rng.gen_range(0..m);
        let mut j = rng.gen_range(0..m - 1);
        if j >= i {
            j += 1;
        }
        let (c, s) = (CRat::real(rat(3, 5)), CRat::real(rat(4, 5)));
        u[i][i] = c.clone();
        u[j][j] = c;
        u[i][j] = -&s;
        u[j][i] = s;
    }
    let phases = [CRat::one(), -&CRat::one(), CRat::i(), -&CRat::i()];
    for row in u.iter_mut() {
        let p = phases[rng.gen_range(0..4)].clone();
        for x in row.iter_mut() {
            *x = &*x * &p;
        }
    }
    let mut perm: Vec<usize> = (0..m).collect();
    perm.shuffle(rng);
    perm.into_iter().map(|i| u[i].clone()).collect()
}

/// Random machine with `m` non-final states. All moves go right. On an input
/// symbol `a` the control is mixed by a rational unitary `U^(a)` and the
/// written cell `w_{q'}(a)` depends on the successor state, so different
/// inputs can interfere. On the blank the non-final states follow a chain
/// ending in `qf`, giving several halting times.
#[allow(clippy::needless_range_loop)]
pub fn random_machine(seed: u64, m: usize) -> QtmSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let qf = m;
    let writes: Vec<Vec<Cell>> = (0..=m)
        .map(|_| {
            let mut w: Vec<Cell> = Cell::all().collect();
            w.shuffle(&mut rng);
            w
        })
        .collect();
    let mut r = Rules::new();
    for a in [cell("0#"), cell("1#")] {
        let u = random_unitary(m, &mut rng);
        for q in 0..m {
            let branches = (0..m)
                .filter(|&q2| !u[q2][q].is_zero())
                .map(|q2| Branch {
                    next: q2,
                    write: writes[q2][a.code() as usize],
                    dir: Dir::R,
                    amp: u[q2][q].clone(),
                })
                .collect();
            r.insert(
                (q, a),
                RuleGroup {
                    branches,
                    normsq: rat_int(1),
                },
            );
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut rng);
    let blank = Cell::BLANK;
    for (k, &q) in order.iter().enumerate() {
        let next = if k == 0 { qf } else { order[k - 1] };
        r.insert(
            (q, blank),
            RuleGroup {
                branches: vec![Branch {
                    next,
                    write: writes[next][blank.code() as usize],
                    dir: Dir::R,
                    amp: CRat::one(),
                }],
                normsq: Rational::one(),
            },
        );
    }
    let mut states: Vec<String> = (0..m).map(|i| format!("q{i}")).collect();
    states.push("qf".into());
    QtmSpec::new(format!("random-{seed}-{m}"), states, 0, qf, r).expect("random machine is well formed")
}
