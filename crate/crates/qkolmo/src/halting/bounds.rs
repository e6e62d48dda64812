//! Randomized checks of the halting-stability lemmas and of the properties
//! of approximate halting spaces.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::approx::ApproxHaltingSpace;
use super::exact::{exact_halting_spaces, HaltingForms, HaltingSpace};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::linalg::rat_to_f64;
use crate::qtm::QtmSpec;

pub const SLACK: f64 = 1e-10;

/// Outcome of one randomized lemma check.
#[derive(Clone, Debug, PartialEq)]
pub struct LemmaReport {
    pub name: String,
    pub trials: usize,
    pub violations: usize,
    /// Largest observed `lhs − rhs` (negative when every trial holds with room).
    pub max_excess: f64,
}

impl LemmaReport {
    fn new(name: &str) -> Self {
        LemmaReport {
            name: name.to_string(),
            trials: 0,
            violations: 0,
            max_excess: f64::NEG_INFINITY,
        }
    }

    pub fn record(&mut self, lhs: f64, rhs: f64) {
        self.trials += 1;
        let ex = lhs - rhs;
        self.max_excess = self.max_excess.max(ex);
        if ex > SLACK {
            self.violations += 1;
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

type V = Vec<Complex64>;

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

fn normalize(v: V) -> V {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

fn dotc(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// A unit vector near the span of `basis`, at a random distance.
fn near(basis: &[V], dim: usize, rng: &mut ChaCha8Rng) -> V {
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    for b in basis {
        let c = Complex64::new(gaussian(rng), gaussian(rng));
        for (x, y) in v.iter_mut().zip(b) {
            *x += c * y;
        }
    }
    let v = normalize(v);
    let eta: f64 = rng.gen_range(0.0f64..0.7).powi(2);
    let g: V = (0..dim).map(|_| Complex64::new(gaussian(rng), gaussian(rng))).collect();
    let g = normalize(g);
    normalize(v.iter().zip(&g).map(|(a, b)| a + b * eta).collect())
}

fn float_basis(h: &HaltingSpace) -> Vec<V> {
    h.basis
        .iter()
        .map(|b| normalize(b.to_c64().iter().copied().collect()))
        .collect()
}

/// Matrix-element, superposition and almost-orthogonality checks on vectors
/// sampled around the exact halting spaces of `spec` on `H_n`.
pub fn halting_lemma_suite(
    spec: &QtmSpec,
    n: usize,
    t_max: usize,
    trials: usize,
    seed: u64,
    caps: &Caps,
) -> Result<Vec<LemmaReport>> {
    let spaces = exact_halting_spaces(spec, n, t_max, caps)?;
    let forms = HaltingForms::new(spec, n, t_max, caps)?;
    let dim = 1usize << n;
    let live: Vec<(usize, Vec<V>)> = spaces
        .iter()
        .filter(|h| h.dim() > 0 && h.t > 0)
        .map(|h| (h.t, float_basis(h)))
        .collect();
    if live.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need halting inputs at two different times on H_{n} within t = {t_max}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut elem = LemmaReport::new("matrix element |<qf|M^t'(|phi><psi|)|qf>| <= sqrt(eps delta)");
    let mut sup = LemmaReport::new("superposition (sum |a_i| sqrt eps_i)^2-t-halting");
    let mut orth = LemmaReport::new("almost orthogonality |<psi|phi>| <= sqrt(1-(1-eps-delta)^2)");

    while elem.trials < trials {
        let (t, b) = &live[rng.gen_range(0..live.len())];
        let phi = near(b, dim, &mut rng);
        let psi = near(b, dim, &mut rng);
        let (e, d) = (forms.eps_min(&phi, *t), forms.eps_min(&psi, *t));
        let tp = rng.gen_range(0..*t);
        elem.record(forms.element(tp, &psi, &phi).norm(), (e * d).sqrt());
    }

    while sup.trials < trials {
        let (t, b) = &live[rng.gen_range(0..live.len())];
        let k = rng.gen_range(2..=4);
        let parts: Vec<V> = (0..k).map(|_| near(b, dim, &mut rng)).collect();
        let alpha: Vec<Complex64> = (0..k)
            .map(|_| Complex64::new(gaussian(&mut rng), gaussian(&mut rng)))
            .collect();
        let mut s = vec![Complex64::new(0.0, 0.0); dim];
        for (a, p) in alpha.iter().zip(&parts) {
            for (x, y) in s.iter_mut().zip(p) {
                *x += a * y;
            }
        }
        let ns = s.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if ns < 1e-6 {
            continue;
        }
        let s: V = s.iter().map(|z| z / ns).collect();
        let bound: f64 = alpha
            .iter()
            .zip(&parts)
            .map(|(a, p)| a.norm() / ns * forms.eps_min(p, *t).sqrt())
            .sum::<f64>()
            .powi(2);
        sup.record(forms.eps_min(&s, *t), bound);
    }

    let mut attempts = 0usize;
    while orth.trials < trials {
        attempts += 1;
        if attempts > 100 * trials {
            break;
        }
        let i = rng.gen_range(0..live.len());
        let mut j = rng.gen_range(0..live.len() - 1);
        if j >= i {
            j += 1;
        }
        let ((t, bt), (tp, btp)) = (&live[i], &live[j]);
        let psi = near(bt, dim, &mut rng);
        let phi = near(btp, dim, &mut rng);
        let (e, d) = (forms.eps_min(&psi, *t), forms.eps_min(&phi, *tp));
        if e + d > 1.0 {
            continue;
        }
        orth.record(dotc(&psi, &phi).norm(), (1.0 - (1.0 - e - d).powi(2)).max(0.0).sqrt());
    }
    if orth.trials < trials {
        orth.violations += trials - orth.trials;
    }
    Ok(vec![elem, sup, orth])
}

/// Spot checks of an approximate halting space against the exact one.
#[derive(Clone, Debug, PartialEq)]
pub struct PropertyReport {
    /// `max` least-ε over basis vectors, to be compared with `20δ`.
    pub max_basis_eps: f64,
    /// `max` distance from sampled exact halting unit vectors to the space,
    /// to be compared with `(11/2)δ`.
    pub max_exact_distance: f64,
    pub delta: f64,
}

impl PropertyReport {
    pub fn holds(&self) -> bool {
        self.max_basis_eps <= 20.0 * self.delta + SLACK && self.max_exact_distance < 5.5 * self.delta + SLACK
    }
}

pub fn approx_properties(
    spec: &QtmSpec,
    approx: &ApproxHaltingSpace,
    exact: &HaltingSpace,
    samples: usize,
    seed: u64,
    caps: &Caps,
) -> Result<PropertyReport> {
    let forms = HaltingForms::new(spec, approx.n, approx.t, caps)?;
    let max_basis_eps = approx
        .onb()
        .iter()
        .map(|b| forms.eps_min(b, approx.t))
        .fold(0.0, f64::max);
    let dim = 1usize << approx.n;
    let basis = float_basis(exact);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let onb = approx.onb();
    let mut max_exact_distance: f64 = 0.0;
    if !basis.is_empty() {
        for _ in 0..samples {
            let mut v = vec![Complex64::new(0.0, 0.0); dim];
            for b in &basis {
                let c = Complex64::new(gaussian(&mut rng), gaussian(&mut rng));
                for (x, y) in v.iter_mut().zip(b) {
                    *x += c * y;
                }
            }
            let v = normalize(v);
            let proj: f64 = onb.iter().map(|b| dotc(b, &v).norm_sqr()).sum();
            max_exact_distance = max_exact_distance.max((1.0 - proj).max(0.0).sqrt());
        }
    }
    Ok(PropertyReport {
        max_basis_eps,
        max_exact_distance,
        delta: rat_to_f64(&approx.delta),
    })
}

/// Largest `|⟨ψ_t|ψ_{t'}⟩|` between orthonormal bases of two approximate
/// spaces, to be compared with `4√(5δ)`.
pub fn cross_time_overlap(a: &ApproxHaltingSpace, b: &ApproxHaltingSpace) -> f64 {
    let (oa, ob) = (a.onb(), b.onb());
    oa.iter()
        .flat_map(|x| ob.iter().map(move |y| dotc(x, y).norm()))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rank, rat, CRat, CVec, Rational};
    use crate::qtm::machines;

    fn machine_with_two_times() -> QtmSpec {
        let c = Caps::default();
        (0..50)
            .map(|s| machines::random_machine(s, 3))
            .find(|m| {
                exact_halting_spaces(m, 2, 10, &c)
                    .unwrap()
                    .iter()
                    .filter(|h| h.dim() > 0)
                    .count()
                    >= 2
            })
            .expect("some random machine halts at two times")
    }

    #[test]
    fn lemmas_hold_on_samples() {
        let m = machine_with_two_times();
        for r in halting_lemma_suite(&m, 2, 10, 200, 7, &Caps::default()).unwrap() {
            assert!(r.passed(), "{r:?}");
            assert_eq!(r.trials, 200);
        }
    }

    #[test]
    fn inner_product_dimension_bound() {
        // e_i + c·1 with small c: pairwise overlaps below 1/(N−1) force rank N
        for dim in 2..6usize {
            let c = rat(1, 4 * dim as i64);
            let vs: Vec<CVec> = (0..dim)
                .map(|i| {
                    CVec(
                        (0..dim)
                            .map(|j| {
                                CRat::real(if i == j {
                                    Rational::from_integer(1.into()) + &c
                                } else {
                                    c.clone()
                                })
                            })
                            .collect(),
                    )
                })
                .collect();
            let bound = rat(1, (dim as i64 - 1).max(1)).pow(2);
            for i in 0..dim {
                for j in 0..i {
                    let ip = vs[i].inner(&vs[j]).norm_sq();
                    assert!(ip / (vs[i].norm_sq() * vs[j].norm_sq()) < bound);
                }
            }
            assert_eq!(rank(&vs).unwrap(), dim);
        }
    }
}
