use std::collections::HashMap;

use num_complex::Complex64;

use crate::caps::{check, Caps};
use crate::error::{Error, Result};
use crate::linalg::{gram_schmidt, CRat, CVec, FMat, Rational, RowSpace, ScaledUnitVector, Surd};
use crate::qtm::sim::{Amp, Columns, Config};
use crate::qtm::{qf_weights, strings_of_len, QtmSpec, QubitString};

/// `(name, hash prefix)` identifying a machine in reports.
pub fn machine_id(spec: &QtmSpec) -> String {
    format!("{}:{}", spec.name(), &spec.hash_hex()[..16])
}

/// Exact halting subspace `H^{(n)}(t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HaltingSpace {
    pub machine: String,
    pub n: usize,
    pub t: usize,
    pub basis: Vec<ScaledUnitVector>,
}

impl HaltingSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// One basis vector per line in the `nsq p/q : …` form.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for b in &self.basis {
            s.push_str(&b.to_string());
            s.push('\n');
        }
        s
    }

    pub fn parse_basis(text: &str) -> Result<Vec<ScaledUnitVector>> {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with("#!"))
            .map(ScaledUnitVector::parse)
            .collect()
    }

    pub fn directions(&self) -> Vec<CVec> {
        self.basis.iter().map(|b| b.direction().clone()).collect()
    }
}

pub(crate) fn check_n(n: usize, cap: usize, what: &'static str) -> Result<()> {
    check(what, n as u128, cap as u128)
}

/// Rows `(config ↦ [col_j[config]]_j)` of a set of evolved columns, restricted
/// to configurations accepted by `keep`.
fn rows<A: Amp>(cols: &Columns<A>, keep: impl Fn(&Config) -> bool) -> Vec<Vec<(usize, A)>> {
    let mut by_cfg: HashMap<&Config, Vec<(usize, A)>> = HashMap::new();
    for (j, col) in cols.cols.iter().enumerate() {
        for (c, a) in col {
            if keep(c) {
                by_cfg.entry(c).or_default().push((j, a.clone()));
            }
        }
    }
    let mut out: Vec<_> = by_cfg.into_iter().collect();
    out.sort_by(|a, b| a.0.cmp(b.0));
    out.into_iter().map(|(_, r)| r).collect()
}

/// A surd row with a common radicand, rescaled to Gaussian rationals.
fn rational_row(row: &[(usize, Surd)], dim: usize, t: usize) -> Result<Vec<CRat>> {
    let mut out = vec![CRat::zero(); dim];
    let mut radicand = None;
    for (j, s) in row {
        let (k, c) = s
            .single_radicand()
            .ok_or_else(|| Error::Incommensurable(format!("amplitude {s} at time {t} mixes radicands")))?;
        match &radicand {
            None => radicand = Some(k),
            Some(k0) if *k0 == k => {}
            Some(k0) => {
                return Err(Error::Incommensurable(format!(
                    "constraint at time {t} mixes 1/√{k0} and 1/√{k}"
                )))
            }
        }
        out[*j] = c;
    }
    Ok(out)
}

/// Exact halting spaces `H^{(n)}(t)` for `t = 0..=t_max` (index = `t`).
pub fn exact_halting_spaces(spec: &QtmSpec, n: usize, t_max: usize, caps: &Caps) -> Result<Vec<HaltingSpace>> {
    check_n(n, caps.n_exact, "input length for exact kernels")?;
    check("simulation time", t_max as u128, caps.t as u128)?;
    let dim = 1usize << n;
    let qf = spec.final_state();
    let id = machine_id(spec);
    let mut cols: Columns<Surd> = Columns::new(spec, &strings_of_len(n), Surd::one());
    let mut before = RowSpace::new(dim);
    let mut out = Vec::with_capacity(t_max + 1);
    loop {
        let t = cols.time;
        let basis = if before.is_full() {
            Vec::new()
        } else {
            let mut here = before.clone();
            for r in rows(&cols, |c| c.state != qf) {
                here.insert(&rational_row(&r, dim, t)?)?;
                if here.is_full() {
                    break;
                }
            }
            gram_schmidt(&here.nullspace())?
        };
        out.push(HaltingSpace {
            machine: id.clone(),
            n,
            t,
            basis: basis.iter().map(ScaledUnitVector::primitive).collect(),
        });
        if t == t_max {
            break;
        }
        if !before.is_full() {
            for r in rows(&cols, |c| c.state == qf) {
                before.insert(&rational_row(&r, dim, t)?)?;
            }
        }
        if before.is_full() {
            // everything has either halted or left the kernel; later spaces are {0}
            for t2 in t + 1..=t_max {
                out.push(HaltingSpace {
                    machine: id.clone(),
                    n,
                    t: t2,
                    basis: Vec::new(),
                });
            }
            break;
        }
        cols.step(spec, caps)?;
    }
    Ok(out)
}

pub fn exact_halting_space(spec: &QtmSpec, n: usize, t: usize, caps: &Caps) -> Result<HaltingSpace> {
    Ok(exact_halting_spaces(spec, n, t, caps)?
        .pop()
        .expect("at least one space"))
}

/// Quadratic forms `Q_{t'} = C†C` of the qf-amplitudes on `H_n`, so that the
/// qf-weight of a vector `φ` at time `t'` is `φ† Q_{t'} φ`.
#[derive(Clone, Debug)]
pub struct HaltingForms {
    pub n: usize,
    pub forms: Vec<FMat>,
}

impl HaltingForms {
    pub fn new(spec: &QtmSpec, n: usize, t: usize, caps: &Caps) -> Result<HaltingForms> {
        check("simulation time", t as u128, caps.t as u128)?;
        let dim = 1usize << n;
        let qf = spec.final_state();
        let mut cols: Columns<Complex64> = Columns::new(spec, &strings_of_len(n), Complex64::new(1.0, 0.0));
        let mut forms = Vec::with_capacity(t + 1);
        loop {
            let mut q = FMat::zeros(dim, dim);
            for r in rows(&cols, |c| c.state == qf) {
                for (j, a) in &r {
                    for (k, b) in &r {
                        q[(*j, *k)] += a.conj() * b;
                    }
                }
            }
            forms.push(q);
            if cols.time == t {
                break;
            }
            cols.step(spec, caps)?;
        }
        Ok(HaltingForms { n, forms })
    }

    pub fn t(&self) -> usize {
        self.forms.len() - 1
    }

    /// `φ† Q_{t'} ψ`.
    pub fn element(&self, t: usize, phi: &[Complex64], psi: &[Complex64]) -> Complex64 {
        let q = &self.forms[t];
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, a) in phi.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let mut row = Complex64::new(0.0, 0.0);
            for (k, b) in psi.iter().enumerate() {
                row += q[(j, k)] * b;
            }
            acc += a.conj() * row;
        }
        acc
    }

    pub fn weight(&self, t: usize, phi: &[Complex64]) -> f64 {
        self.element(t, phi, phi).re
    }

    /// `max_{t'≤t} |a(t') − δ_{t't}|`: the least ε for which a unit `φ` is
    /// ε-t-halting.
    pub fn eps_min(&self, phi: &[Complex64], t: usize) -> f64 {
        (0..=t)
            .map(|s| {
                let a = self.weight(s, phi);
                if s == t {
                    (1.0 - a).abs()
                } else {
                    a.abs()
                }
            })
            .fold(0.0, f64::max)
    }
}

/// qf-weight at most ε before `t` and at least `1−ε` at `t`.
pub fn eps_t_halting(spec: &QtmSpec, sigma: &QubitString, t: usize, eps: &Rational, caps: &Caps) -> Result<bool> {
    let w = qf_weights(spec, sigma, t, caps)?;
    let one_minus = Rational::from_integer(1.into()) - eps;
    Ok(w[..t].iter().all(|x| x.le(eps)) && w[t].ge(&one_minus))
}

/// Checks the prefix condition on all exact halting spaces up to
/// `(n_max, t_max)`: for halting `ψ` of length `n` and `φ` of length `m > n`,
/// `⟨ψ ⊗ r|φ⟩ = 0` for every suffix `r`.
pub fn is_prefix_domain(spec: &QtmSpec, n_max: usize, t_max: usize, caps: &Caps) -> Result<bool> {
    let per_len: Vec<Vec<CVec>> = (0..=n_max)
        .map(|n| {
            Ok(exact_halting_spaces(spec, n, t_max, caps)?
                .into_iter()
                .flat_map(|h| h.directions())
                .collect())
        })
        .collect::<Result<_>>()?;
    for (n, short) in per_len.iter().enumerate() {
        for (m, long) in per_len.iter().enumerate().skip(n + 1) {
            let k = m - n;
            for psi in short {
                for phi in long {
                    for r in 0..1usize << k {
                        let mut acc = CRat::zero();
                        for (i, a) in psi.0.iter().enumerate() {
                            if !a.is_zero() {
                                acc += &(&a.conj() * &phi.0[(i << k) | r]);
                            }
                        }
                        if !acc.is_zero() {
                            return Ok(false);
                        }
                    }
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;
    use crate::qtm::machines;

    #[test]
    fn identity_spaces() {
        let c = Caps::default();
        let m = machines::identity();
        assert_eq!(exact_halting_space(&m, 2, 3, &c).unwrap().dim(), 4);
        assert_eq!(exact_halting_space(&m, 2, 2, &c).unwrap().dim(), 0);
        let all = exact_halting_spaces(&m, 1, 6, &c).unwrap();
        let dims: Vec<usize> = all.iter().map(HaltingSpace::dim).collect();
        assert_eq!(dims, vec![0, 0, 2, 0, 0, 0, 0]);
        assert_eq!(
            exact_halting_space(&machines::never_halting(), 2, 6, &c).unwrap().dim(),
            0
        );
    }

    #[test]
    fn eps_halting_examples() {
        let c = Caps::default();
        let m = machines::identity();
        let s = QubitString::classical("0").unwrap();
        assert!(eps_t_halting(&m, &s, 2, &rat(0, 1), &c).unwrap());
        assert!(!eps_t_halting(&m, &s, 3, &rat(0, 1), &c).unwrap());
        let eta = rat(1, 10);
        let mix = QubitString::mixture(&[
            (rat(9, 10), QubitString::classical("0").unwrap()),
            (eta.clone(), QubitString::classical("00").unwrap()),
        ])
        .unwrap();
        assert!(eps_t_halting(&m, &mix, 2, &eta, &c).unwrap());
        assert!(!eps_t_halting(&m, &mix, 2, &rat(1, 20), &c).unwrap());
    }

    #[test]
    fn prefix_domain_examples() {
        let c = Caps::default();
        assert!(is_prefix_domain(&machines::length_two(), 3, 8, &c).unwrap());
        assert!(!is_prefix_domain(&machines::identity(), 3, 8, &c).unwrap());
        assert!(is_prefix_domain(&machines::split_prefix(), 3, 8, &c).unwrap());
    }

    #[test]
    fn forms_match_simulation() {
        let c = Caps::default();
        let m = machines::random_machine(3, 3);
        let f = HaltingForms::new(&m, 2, 8, &c).unwrap();
        let s = QubitString::classical("10").unwrap();
        let w = qf_weights(&m, &s, 8, &c).unwrap();
        let e = [0.0, 0.0, 1.0, 0.0].map(|x| Complex64::new(x, 0.0));
        for (t, x) in w.iter().enumerate() {
            assert!((f.weight(t, &e) - x.to_f64()).abs() < 1e-12);
        }
    }
}
