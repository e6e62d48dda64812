//! Ball tests, interpolating subspaces and δ-approximate halting spaces.
//!
//! The algorithm is run on floating quadratic forms `Q_{t'}`: every `a(t')`
//! they return is accurate to about `1e-15`, far inside the `(3/32)ε`
//! accuracy the net procedure asks for.

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use super::exact::{check_n, machine_id, HaltingForms};
use crate::caps::{check, Caps};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, hermitian_eigenvalues, rat, CRat, CVec, FMat, Rational};
use crate::qtm::QtmSpec;

type V = Vec<Complex64>;

/// Slack for floating comparisons against the algorithm's thresholds.
const FLOAT_SLACK: f64 = 1e-9;

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

fn dotc(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn to_vec(v: &CVec) -> V {
    v.0.iter().map(CRat::to_c64).collect()
}

fn dim_qubits(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::InvalidArgument(format!("dimension {dim} is not a power of two")));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Phase representatives of a δ-cover of the unit sphere of `H_n`.
///
/// Chart `m` holds the vectors whose coordinate `m` is real, positive and of
/// maximal modulus. The other coordinates run over the lattice of mesh
/// `δ/(2√(2^{n+1}))` and coordinate `m` is fixed by normalization. Every unit
/// vector is, up to a global phase, within `δ√(2ⁿ−1)/4 < δ` of a
/// representative. Halting properties and distances to subspaces are phase
/// invariant, so the phase orbit of a representative needs no separate points.
#[derive(Clone, Debug)]
pub struct SphereCover {
    pub n: usize,
    pub mesh: f64,
    pub reps: Vec<V>,
}

pub fn sphere_cover(n: usize, delta: f64, cap: u64) -> Result<SphereCover> {
    let dim = 1usize << n;
    let mesh = delta / (2.0 * ((2 * dim) as f64).sqrt());
    let mut reps = Vec::new();
    if dim == 1 {
        reps.push(vec![Complex64::new(1.0, 0.0)]);
        return Ok(SphereCover { n, mesh, reps });
    }
    let free = 2 * (dim - 1);
    let bound = std::f64::consts::FRAC_1_SQRT_2 + 2.0 * mesh;
    let kmax = (bound / mesh).floor() as i64;
    for chart in 0..dim {
        let mut k = vec![-kmax - 1; free];
        // odometer over the lattice box, pruned by the norm
        'outer: loop {
            let mut i = 0;
            loop {
                if i == free {
                    break 'outer;
                }
                k[i] += 1;
                if k[i] <= kmax {
                    break;
                }
                k[i] = -kmax;
                i += 1;
            }
            let z: Vec<Complex64> = k
                .chunks(2)
                .map(|p| Complex64::new(p[0] as f64 * mesh, p[1] as f64 * mesh))
                .collect();
            let nz: f64 = z.iter().map(|c| c.norm_sqr()).sum();
            if nz >= 1.0 {
                continue;
            }
            let x = (1.0 - nz).sqrt();
            if z.iter().any(|c| c.norm() > x + 2.0 * mesh) {
                continue;
            }
            let mut v = Vec::with_capacity(dim);
            v.extend_from_slice(&z[..chart]);
            v.push(Complex64::new(x, 0.0));
            v.extend_from_slice(&z[chart..]);
            reps.push(v);
            check("sphere cover representatives", reps.len() as u128, cap as u128)?;
        }
    }
    Ok(SphereCover { n, mesh, reps })
}

/// Algorithm B on precomputed forms.
///
/// Net points are unit vectors `p` with `‖p − φ‖ < δ`, hence all within
/// `r = δ + |1 − ‖φ‖|` of the normalized center `c`. On unit vectors each
/// defect `|a_p(t') − δ_{t't}|` is `‖A^{1/2} p‖²` for some `0 ≤ A ≤ 1`, so
/// the square root of the largest defect is 1-Lipschitz. When its value at
/// `c` is farther than `r` from `√((5/8)ε)` every net point gets the same
/// mark and the net need not be built.
pub fn ball_test(
    forms: &HaltingForms,
    phi: &[Complex64],
    delta: f64,
    eps: f64,
    t: usize,
    net_cap: u64,
) -> Result<bool> {
    let nphi = norm(phi);
    if (nphi - 1.0).abs() >= delta {
        return Err(Error::InvalidArgument("the ball does not meet the unit sphere".into()));
    }
    let c: V = phi.iter().map(|z| z / nphi).collect();
    let r = delta + (nphi - 1.0).abs();
    let thr = 5.0 / 8.0 * eps;
    let f = forms.eps_min(&c, t).max(0.0).sqrt();
    if f - r - FLOAT_SLACK > thr.sqrt() {
        return Ok(false);
    }
    if f + r + FLOAT_SLACK <= thr.sqrt() {
        return Ok(true);
    }
    let tangent = tangent_basis(&c);
    let m = tangent.len();
    // tangent grid of mesh h: covering radius (3/128)ε before normalization
    let h = 3.0 / 64.0 * eps / (m as f64).sqrt();
    let umax = (2.0 * (r / 2.0).min(1.0).asin()).min(1.5).tan();
    let kmax = (umax / h).ceil() as i64;
    let mut net = NetSearch {
        forms,
        phi,
        c: &c,
        tangent: &tangent,
        h,
        umax,
        delta,
        thr,
        t,
        evaluated: 0,
        cap: net_cap,
    };
    net.search(&mut vec![-kmax; m], &mut vec![kmax; m])
}

/// Branch and bound over boxes of tangent-grid indices. Radial projection
/// onto the sphere and the square-root defect are both 1-Lipschitz, so a box
/// whose center is farther than its half-diagonal from the ball or above the
/// threshold holds no marked net point. The answer is the same as scanning
/// every grid point.
struct NetSearch<'a> {
    forms: &'a HaltingForms,
    phi: &'a [Complex64],
    c: &'a [Complex64],
    tangent: &'a [V],
    h: f64,
    umax: f64,
    delta: f64,
    thr: f64,
    t: usize,
    evaluated: u64,
    cap: u64,
}

impl NetSearch<'_> {
    fn point(&self, u: &[f64]) -> V {
        let mut x = self.c.to_vec();
        for (s, e) in u.iter().zip(self.tangent) {
            if *s != 0.0 {
                for (xj, ej) in x.iter_mut().zip(e) {
                    *xj += ej * *s;
                }
            }
        }
        let nx = norm(&x);
        x.iter().map(|z| z / nx).collect()
    }

    fn search(&mut self, lo: &mut [i64], hi: &mut [i64]) -> Result<bool> {
        self.evaluated += 1;
        check("ball net evaluations", self.evaluated as u128, self.cap as u128)?;
        let u: Vec<f64> = lo
            .iter()
            .zip(hi.iter())
            .map(|(a, b)| (a + b) as f64 * 0.5 * self.h)
            .collect();
        let rho = 0.5
            * self.h
            * lo.iter()
                .zip(hi.iter())
                .map(|(a, b)| ((b - a) as f64).powi(2))
                .sum::<f64>()
                .sqrt();
        let un = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if un - rho > self.umax + self.h {
            return Ok(false);
        }
        let p = self.point(&u);
        let dp = dist(&p, self.phi);
        if dp - rho >= self.delta {
            return Ok(false);
        }
        let f = self.forms.eps_min(&p, self.t);
        if f.max(0.0).sqrt() - rho > self.thr.sqrt() + FLOAT_SLACK {
            return Ok(false);
        }
        let (axis, width) = lo
            .iter()
            .zip(hi.iter())
            .map(|(a, b)| b - a)
            .enumerate()
            .max_by_key(|&(_, w)| w)
            .expect("nonempty tangent space");
        if width == 0 {
            return Ok(dp < self.delta && f <= self.thr);
        }
        let mid = lo[axis] + width / 2;
        let (l0, h0) = (lo[axis], hi[axis]);
        hi[axis] = mid;
        let left = self.search(lo, hi)?;
        hi[axis] = h0;
        if left {
            return Ok(true);
        }
        lo[axis] = mid + 1;
        let right = self.search(lo, hi)?;
        lo[axis] = l0;
        Ok(right)
    }
}

/// Orthonormal basis (over the reals) of the tangent space of the unit
/// sphere at `c`.
fn tangent_basis(c: &[Complex64]) -> Vec<V> {
    let dim = c.len();
    let rdot =
        |a: &[Complex64], b: &[Complex64]| -> f64 { a.iter().zip(b).map(|(x, y)| x.re * y.re + x.im * y.im).sum() };
    let mut out: Vec<V> = vec![c.to_vec()];
    for j in 0..2 * dim {
        let mut e = vec![Complex64::new(0.0, 0.0); dim];
        e[j / 2] = if j % 2 == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 1.0)
        };
        for _ in 0..2 {
            for b in &out {
                let s = rdot(b, &e);
                for (x, y) in e.iter_mut().zip(b) {
                    *x -= y * s;
                }
            }
        }
        let ne = norm(&e);
        if ne > 1e-8 {
            out.push(e.iter().map(|z| z / ne).collect());
        }
        if out.len() == 2 * dim {
            break;
        }
    }
    out.remove(0);
    out
}

/// Algorithm B: `0` if `U_δ(φ)` is not ε-t-halting, `1` if it is
/// (ε/4)-t-halting.
pub fn ball_halting_test(
    spec: &QtmSpec,
    phi: &CVec,
    delta: &Rational,
    eps: &Rational,
    t: usize,
    caps: &Caps,
) -> Result<bool> {
    let n = dim_qubits(phi.dim())?;
    check_n(n, caps.n_net, "input length for net algorithms")?;
    let forms = HaltingForms::new(spec, n, t, caps)?;
    ball_test(&forms, &to_vec(phi), to_f64(delta), to_f64(eps), t, caps.net)
}

/// Orthonormalizes `vs` (modified Gram-Schmidt), dropping near-null vectors.
fn orthonormalize(vs: &[V]) -> Vec<V> {
    let mut out: Vec<V> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &out {
                let c = dotc(b, &w);
                for (x, y) in w.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let nw = norm(&w);
        if nw > 1e-10 {
            out.push(w.iter().map(|z| z / nw).collect());
        }
    }
    out
}

/// `‖(1 − P_U)φ‖` for an orthonormal basis of `U`.
fn dist_to_span(onb: &[V], phi: &[Complex64]) -> f64 {
    let proj: f64 = onb.iter().map(|b| dotc(b, phi).norm_sqr()).sum();
    (norm(phi).powi(2) - proj).max(0.0).sqrt()
}

struct Targets<'a> {
    neg: &'a [&'a [Complex64]],
    pos: &'a [&'a [Complex64]],
    big_delta: f64,
    small_tilde: f64,
}

impl Targets<'_> {
    fn accepts(&self, onb: &[V]) -> bool {
        self.pos
            .iter()
            .all(|p| dist_to_span(onb, p) < self.big_delta - FLOAT_SLACK)
            && self
                .neg
                .iter()
                .all(|q| dist_to_span(onb, q) > self.small_tilde + FLOAT_SLACK)
    }
}

/// Rounds a floating basis to short dyadic rationals.
fn rationalize(onb: &[V]) -> Vec<CVec> {
    let snap = |x: f64| {
        let y = (x * 2f64.powi(40)).round() / 2f64.powi(40);
        if y.abs() < 1e-12 {
            0.0
        } else {
            y
        }
    };
    onb.iter()
        .map(|v| {
            CVec(
                v.iter()
                    .map(|z| CRat::from_c64(Complex64::new(snap(z.re), snap(z.im))))
                    .collect(),
            )
        })
        .collect()
}

/// Verifies a candidate after rounding; returns the rational basis on success.
fn try_candidate(tg: &Targets, onb: &[V], d: usize) -> Option<Vec<CVec>> {
    if onb.len() != d {
        return None;
    }
    let rounded = rationalize(onb);
    let back = orthonormalize(&rounded.iter().map(to_vec).collect::<Vec<_>>());
    (back.len() == d && tg.accepts(&back)).then_some(rounded)
}

fn sum_projectors(dim: usize, vs: &[&[Complex64]], w: f64) -> FMat {
    let mut a = FMat::zeros(dim, dim);
    for v in vs {
        for i in 0..dim {
            if v[i].norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..dim {
                a[(i, j)] += v[i] * v[j].conj() * w;
            }
        }
    }
    a
}

fn top_eigenvectors(a: &FMat, d: usize) -> Result<Vec<V>> {
    let (_, vecs) = hermitian_eigen(a)?;
    Ok((0..d).map(|c| vecs.column(c).iter().copied().collect()).collect())
}

/// Greedy pivoted choice of up to `k` positives with large residuals.
fn greedy_pick<'a>(pos: &[&'a [Complex64]], k: usize) -> Vec<&'a [Complex64]> {
    let mut chosen: Vec<&[Complex64]> = Vec::new();
    let mut onb: Vec<V> = Vec::new();
    while chosen.len() < k {
        let best = pos
            .iter()
            .map(|p| (dist_to_span(&onb, p), *p))
            .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        match best {
            Some((r, p)) if r > 1e-9 => {
                chosen.push(p);
                onb = orthonormalize(&chosen.iter().map(|v| v.to_vec()).collect::<Vec<_>>());
            }
            _ => break,
        }
    }
    chosen
}

/// No `d`-dimensional subspace lies within δ of these `d+1` vectors when the
/// least eigenvalue of their Gram matrix exceeds `(d+1)δ²`: the projections
/// onto such a subspace would have a Gram matrix perturbed by at most `δ²`
/// per entry, hence stay independent.
fn no_close_subspace(pos: &[&[Complex64]], d: usize, delta: f64) -> Result<bool> {
    let pick = greedy_pick(pos, d + 1);
    if pick.len() < d + 1 {
        return Ok(false);
    }
    let k = pick.len();
    let g = FMat::from_fn(k, k, |i, j| dotc(pick[i], pick[j]));
    let lmin = hermitian_eigenvalues(&g)?[0];
    Ok(lmin > (k as f64) * delta * delta + FLOAT_SLACK)
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        out.push(c.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Algorithm I on floating data.
///
/// Order of work: the whole space when `d = 2ⁿ`; spectral candidates
/// checked against the output conditions; a Gram certificate that no
/// `d`-dimensional subspace is δ-close to all positives, which allows the
/// answer 0 without searching; finally the brute-force search
/// over well-pivoted echelon bases (entries bounded by 1) on the mesh
/// `min(Δ−δ, Δ̃−δ̃)/(8·2^{n/2})`.
#[allow(clippy::too_many_arguments)]
pub fn interpolate(
    neg: &[&[Complex64]],
    pos: &[&[Complex64]],
    dim: usize,
    d: usize,
    big_delta: f64,
    delta: f64,
    big_tilde: f64,
    small_tilde: f64,
    search_cap: u64,
) -> Result<Option<Vec<CVec>>> {
    if d == 0 || d > dim {
        return Ok(None);
    }
    let tg = Targets {
        neg,
        pos,
        big_delta,
        small_tilde,
    };
    if d == dim {
        let onb: Vec<V> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                    .collect()
            })
            .collect();
        return Ok(tg
            .accepts(&onb)
            .then(|| (0..dim).map(|i| CVec::basis(dim, i)).collect()));
    }
    let mut candidates: Vec<Vec<V>> = Vec::new();
    let a = sum_projectors(dim, pos, 1.0);
    candidates.push(top_eigenvectors(&a, d)?);
    if !neg.is_empty() {
        let w = pos.len().max(1) as f64 / neg.len() as f64;
        for scale in [1.0, w] {
            let b = &a - sum_projectors(dim, neg, scale);
            candidates.push(top_eigenvectors(&b, d)?);
        }
    }
    candidates.push(orthonormalize(
        &greedy_pick(pos, d).iter().map(|v| v.to_vec()).collect::<Vec<_>>(),
    ));
    for c in &candidates {
        if let Some(b) = try_candidate(&tg, &orthonormalize(c), d) {
            return Ok(Some(b));
        }
    }

    if no_close_subspace(pos, d, delta)? {
        return Ok(None);
    }
    let n = dim_qubits(dim)?;
    let gamma = (big_delta - delta).min(big_tilde - small_tilde) / (8.0 * 2f64.powf(n as f64 / 2.0));
    let steps = (1.0 / gamma).floor() as i64;
    let per_entry = (2 * steps + 1) as u128;
    let free = 2 * d * (dim - d);
    let per_pivot = per_entry.checked_pow(free as u32).unwrap_or(u128::MAX);
    let total = binomial(dim, d).saturating_mul(per_pivot);
    if total > search_cap as u128 {
        return Err(Error::SearchCapExceeded(format!(
            "{total} candidate subspaces of dimension {d} in {dim} dimensions (cap {search_cap})"
        )));
    }
    let decode = |pivots: &[usize], mut idx: u128| -> Vec<V> {
        let others: Vec<usize> = (0..dim).filter(|j| !pivots.contains(j)).collect();
        let mut basis = vec![vec![Complex64::new(0.0, 0.0); dim]; d];
        for (i, &p) in pivots.iter().enumerate() {
            basis[i][p] = Complex64::new(1.0, 0.0);
        }
        for row in basis.iter_mut() {
            for &j in &others {
                let mut part = [0.0f64; 2];
                for x in part.iter_mut() {
                    let k = (idx % per_entry) as i64 - steps;
                    idx /= per_entry;
                    *x = k as f64 * gamma;
                }
                row[j] = Complex64::new(part[0], part[1]);
            }
        }
        basis
    };
    for pivots in combinations(dim, d) {
        let found = (0..per_pivot as u64)
            .into_par_iter()
            .find_first(|&i| tg.accepts(&orthonormalize(&decode(&pivots, i as u128))));
        if let Some(i) = found {
            if let Some(b) = try_candidate(&tg, &orthonormalize(&decode(&pivots, i as u128)), d) {
                return Ok(Some(b));
            }
        }
    }
    Ok(None)
}

/// Algorithm I: `Some(basis)` of a `d`-dimensional subspace within `Δ` of
/// every positive and farther than `δ̃` from every negative.
#[allow(clippy::too_many_arguments)]
pub fn interpolating_subspace(
    tilde: &[CVec],
    pos: &[CVec],
    d: usize,
    big_delta: &Rational,
    delta: &Rational,
    big_tilde: &Rational,
    small_tilde: &Rational,
    caps: &Caps,
) -> Result<Option<Vec<CVec>>> {
    if big_delta <= delta || big_tilde <= small_tilde {
        return Err(Error::InvalidArgument("need Δ > δ and Δ̃ > δ̃".into()));
    }
    let dim = tilde.iter().chain(pos).map(CVec::dim).next().ok_or(Error::EmptySpan)?;
    for v in tilde.iter().chain(pos) {
        v.check_dim(dim)?;
    }
    let nf: Vec<V> = tilde.iter().map(to_vec).collect();
    let pf: Vec<V> = pos.iter().map(to_vec).collect();
    let nr: Vec<&[Complex64]> = nf.iter().map(Vec::as_slice).collect();
    let pr: Vec<&[Complex64]> = pf.iter().map(Vec::as_slice).collect();
    interpolate(
        &nr,
        &pr,
        dim,
        d,
        to_f64(big_delta),
        to_f64(delta),
        to_f64(big_tilde),
        to_f64(small_tilde),
        caps.search,
    )
}

/// `H^{(n,δ)}(t)` with its accuracy `ε^{(n,δ)}(t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxHaltingSpace {
    pub machine: String,
    pub n: usize,
    pub delta: Rational,
    pub t: usize,
    pub basis: Vec<CVec>,
    pub eps: Rational,
}

impl ApproxHaltingSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn float_basis(&self) -> Vec<V> {
        self.basis.iter().map(to_vec).collect()
    }

    /// Orthonormal floating basis of the span.
    pub fn onb(&self) -> Vec<V> {
        orthonormalize(&self.float_basis())
    }

    /// Distance from a vector to the span.
    pub fn distance(&self, phi: &[Complex64]) -> f64 {
        dist_to_span(&self.onb(), phi)
    }

    /// One `nsq` line per basis vector, as for exact spaces.
    pub fn dump(&self) -> Result<String> {
        let mut s = String::new();
        for b in &self.basis {
            s.push_str(&crate::linalg::ScaledUnitVector::new(b.clone())?.to_string());
            s.push('\n');
        }
        Ok(s)
    }
}

/// δ-approximate halting space, following the definition step by step:
/// ε := 18δ; the δ-cover above; B at ε (positives) and at 18δ (negatives);
/// dimension countdown with I(Δ=2δ, δ, Δ̃=7δ/4, δ̃=3δ/2); ε-halving.
pub fn approx_halting_space(
    spec: &QtmSpec,
    n: usize,
    delta: &Rational,
    t: usize,
    caps: &Caps,
) -> Result<ApproxHaltingSpace> {
    check_n(n, caps.n_net, "input length for net algorithms")?;
    if *delta <= Rational::zero() {
        return Err(Error::InvalidArgument("δ must be positive".into()));
    }
    let forms = HaltingForms::new(spec, n, t, caps)?;
    let dim = 1usize << n;
    let df = to_f64(delta);
    let cover = sphere_cover(n, df, caps.reps)?;
    let eps18 = delta * rat(18, 1);
    let marks = |eps: f64| -> Result<Vec<bool>> {
        cover
            .reps
            .par_iter()
            .map(|r| ball_test(&forms, r, df, eps, t, caps.net))
            .collect()
    };
    let at18 = marks(to_f64(&eps18))?;
    let neg: Vec<&[Complex64]> = cover
        .reps
        .iter()
        .zip(&at18)
        .filter(|(_, m)| !**m)
        .map(|(r, _)| r.as_slice())
        .collect();
    let mut eps = eps18.clone();
    let done = |basis: Vec<CVec>, eps: Rational| ApproxHaltingSpace {
        machine: machine_id(spec),
        n,
        delta: delta.clone(),
        t,
        basis,
        eps,
    };
    for _ in 0..=caps.halvings {
        let here = if eps == eps18 {
            at18.clone()
        } else {
            marks(to_f64(&eps))?
        };
        let pos: Vec<&[Complex64]> = cover
            .reps
            .iter()
            .zip(&here)
            .filter(|(_, m)| **m)
            .map(|(r, _)| r.as_slice())
            .collect();
        if pos.is_empty() {
            return Ok(done(Vec::new(), eps));
        }
        for d in (1..=dim).rev() {
            if let Some(b) = interpolate(&neg, &pos, dim, d, 2.0 * df, df, 1.75 * df, 1.5 * df, caps.search)? {
                return Ok(done(b, eps));
            }
        }
        eps /= Rational::from_integer(2.into());
    }
    Err(Error::CapExceeded {
        what: "accuracy halvings",
        value: caps.halvings as u128 + 1,
        cap: caps.halvings as u128,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qtm::machines;

    #[test]
    fn ball_examples() {
        let c = Caps::default();
        let id = machines::identity();
        let e0 = CVec::basis(2, 0);
        assert!(ball_halting_test(&id, &e0, &rat(1, 10), &rat(1, 10), 2, &c).unwrap());
        assert!(!ball_halting_test(&id, &e0, &rat(1, 10), &rat(1, 10), 3, &c).unwrap());
        let nh = machines::never_halting();
        assert!(!ball_halting_test(&nh, &e0, &rat(1, 10), &rat(1, 2), 2, &c).unwrap());
    }

    #[test]
    fn interpolation_examples() {
        let c = Caps::default();
        let (e0, e1) = (CVec::basis(2, 0), CVec::basis(2, 1));
        let q = |a, b| rat(a, b);
        let full = interpolating_subspace(
            &[],
            &[e0.clone(), e1.clone()],
            2,
            &q(1, 4),
            &q(1, 8),
            &q(1, 2),
            &q(1, 4),
            &c,
        )
        .unwrap()
        .unwrap();
        assert_eq!(full.len(), 2);
        let line = interpolating_subspace(
            std::slice::from_ref(&e1),
            std::slice::from_ref(&e0),
            1,
            &q(1, 4),
            &q(1, 8),
            &q(1, 2),
            &q(1, 4),
            &c,
        )
        .unwrap()
        .unwrap();
        assert_eq!(line.len(), 1);
        assert!(line[0].0[1].is_zero());
        let none = interpolating_subspace(&[], &[e0, e1], 1, &q(1, 4), &q(1, 8), &q(1, 2), &q(1, 4), &c).unwrap();
        assert!(none.is_none());
    }

    #[test]
    fn cover_is_a_cover() {
        let cover = sphere_cover(1, 0.2, 1_000_000).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(1);
        use rand::Rng;
        for _ in 0..200 {
            let v: V = (0..2)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let nv = norm(&v);
            let v: V = v.iter().map(|z| z / nv).collect();
            let best = cover
                .reps
                .iter()
                .map(|r| (2.0 - 2.0 * dotc(r, &v).norm()).max(0.0).sqrt())
                .fold(f64::MAX, f64::min);
            assert!(best < 0.2 / 4.0 + 1e-12);
        }
    }

    #[test]
    fn identity_approx_spaces() {
        let c = Caps::default();
        let id = machines::identity();
        let d = rat(1, 100);
        let h = approx_halting_space(&id, 1, &d, 2, &c).unwrap();
        assert_eq!(h.dim(), 2);
        assert_eq!(h.eps, rat(18, 100));
        let z = approx_halting_space(&id, 1, &d, 1, &c).unwrap();
        assert_eq!(z.dim(), 0);
    }
}
