use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;

use num_complex::Complex64;
use rayon::prelude::*;

use super::qstring::{block_dim, index_string, string_index, Density, QubitString, SurdMat};
use super::spec::{Cell, Compiled, QtmSpec, BLANK};
use crate::caps::{check, Caps};
use crate::error::{Error, Result};
use crate::linalg::{FMat, Rational, Surd};

/// Float weights within this distance of 0 or 1 count as 0 or 1.
pub const FLOAT_HALT_TOL: f64 = 1e-9;
const FLOAT_PRUNE: f64 = 1e-30;

/// Machine configuration with a sparse tape: only non-blank cells are stored,
/// sorted by position.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Config {
    pub state: usize,
    pub head: i32,
    pub tape: Vec<(i32, Cell)>,
}

impl Config {
    /// Input `s` on cells `0..len`, output track blank, head at 0.
    pub fn initial(q0: usize, s: &str) -> Config {
        let tape = s
            .chars()
            .enumerate()
            .map(|(i, c)| (i as i32, Cell::new(u8::from(c == '1'), BLANK)))
            .collect();
        Config {
            state: q0,
            head: 0,
            tape,
        }
    }

    pub fn cell(&self, pos: i32) -> Cell {
        match self.tape.binary_search_by_key(&pos, |&(p, _)| p) {
            Ok(i) => self.tape[i].1,
            Err(_) => Cell::BLANK,
        }
    }

    fn with_cell(&self, pos: i32, c: Cell) -> Vec<(i32, Cell)> {
        let mut tape = self.tape.clone();
        match tape.binary_search_by_key(&pos, |&(p, _)| p) {
            Ok(i) if c.is_blank() => {
                tape.remove(i);
            }
            Ok(i) => tape[i].1 = c,
            Err(_) if c.is_blank() => {}
            Err(i) => tape.insert(i, (pos, c)),
        }
        tape
    }

    pub(crate) fn successor(&self, b: &Compiled) -> Config {
        Config {
            state: b.next,
            head: self.head + b.dir.delta(),
            tape: self.with_cell(self.head, b.write),
        }
    }

    /// Maximal run of non-blank output symbols from cell 0.
    pub fn output_string(&self) -> String {
        let mut s = String::new();
        let mut pos = 0;
        loop {
            match self.cell(pos).output {
                0 => s.push('0'),
                1 => s.push('1'),
                _ => break,
            }
            pos += 1;
        }
        s
    }

    /// Everything the reading operation discards: the configuration with the
    /// read output cells blanked.
    pub fn junk(&self, out_len: usize) -> Config {
        let mut tape = self.tape.clone();
        for p in 0..out_len as i32 {
            if let Ok(i) = tape.binary_search_by_key(&p, |&(q, _)| q) {
                tape[i].1.output = BLANK;
            }
        }
        tape.retain(|(_, c)| !c.is_blank());
        Config {
            state: self.state,
            head: self.head,
            tape,
        }
    }

    /// Tape and head, the part traced out for the control state.
    fn tape_head(&self) -> (i32, Vec<(i32, Cell)>) {
        (self.head, self.tape.clone())
    }
}

/// Amplitude arithmetic shared by exact and floating simulation.
pub trait Amp: Clone + Send + Sync + Debug {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, o: &Self);
    fn mul(&self, o: &Self) -> Self;
    fn conj(&self) -> Self;
    fn branch(c: &Compiled) -> Self;
    fn to_c64(&self) -> Complex64;
}

impl Amp for Surd {
    fn zero() -> Self {
        Surd::zero()
    }
    fn is_zero(&self) -> bool {
        Surd::is_zero(self)
    }
    fn add_assign(&mut self, o: &Self) {
        Surd::add_assign(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Surd::mul(self, o)
    }
    fn conj(&self) -> Self {
        Surd::conj(self)
    }
    fn branch(c: &Compiled) -> Self {
        c.exact.clone()
    }
    fn to_c64(&self) -> Complex64 {
        Surd::to_c64(self)
    }
}

impl Amp for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.norm_sqr() < FLOAT_PRUNE
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn branch(c: &Compiled) -> Self {
        c.float
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
}

pub type Column<A> = BTreeMap<Config, A>;

/// `V^t` applied to a family of classical initial configurations.
#[derive(Clone, Debug)]
pub struct Columns<A> {
    pub cols: Vec<Column<A>>,
    pub time: usize,
}

/// One step of the evolution `V`. Configurations in the final state are frozen.
pub fn step_column<A: Amp>(spec: &QtmSpec, col: &Column<A>, cap: usize) -> Result<Column<A>> {
    let qf = spec.final_state();
    let mut out: Column<A> = BTreeMap::new();
    for (c, a) in col {
        if c.state == qf {
            out.entry(c.clone()).or_insert_with(A::zero).add_assign(a);
            continue;
        }
        let sym = c.cell(c.head);
        let rules = spec.compiled(c.state, sym).ok_or_else(|| {
            Error::MalformedTable(format!(
                "no rule for ({}, {sym}) reached at head {}",
                spec.states()[c.state],
                c.head
            ))
        })?;
        for b in rules {
            out.entry(c.successor(b))
                .or_insert_with(A::zero)
                .add_assign(&a.mul(&A::branch(b)));
        }
    }
    out.retain(|_, a| !a.is_zero());
    check("configurations per column", out.len() as u128, cap as u128)?;
    Ok(out)
}

impl<A: Amp> Columns<A> {
    pub fn new(spec: &QtmSpec, strings: &[String], one: A) -> Columns<A> {
        let cols = strings
            .iter()
            .map(|s| {
                let mut m = BTreeMap::new();
                m.insert(Config::initial(spec.initial(), s), one.clone());
                m
            })
            .collect();
        Columns { cols, time: 0 }
    }

    pub fn step(&mut self, spec: &QtmSpec, caps: &Caps) -> Result<()> {
        let next: Result<Vec<Column<A>>> = self
            .cols
            .par_iter()
            .map(|c| step_column(spec, c, caps.configs))
            .collect();
        self.cols = next?;
        self.time += 1;
        Ok(())
    }
}

/// Classification of a qf-weight against the strict halting conditions.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum WeightClass {
    Zero,
    One,
    Between,
}

/// A qf-weight (or any real expectation) in either number system.
#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    Exact(Surd),
    Float(f64),
}

impl Weight {
    pub fn class(&self) -> WeightClass {
        match self {
            Weight::Exact(s) if s.is_zero() => WeightClass::Zero,
            Weight::Exact(s) if s.is_one() => WeightClass::One,
            Weight::Exact(_) => WeightClass::Between,
            Weight::Float(x) if x.abs() <= FLOAT_HALT_TOL => WeightClass::Zero,
            Weight::Float(x) if (x - 1.0).abs() <= FLOAT_HALT_TOL => WeightClass::One,
            Weight::Float(_) => WeightClass::Between,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Weight::Exact(s) => s.re_f64(),
            Weight::Float(x) => *x,
        }
    }

    /// `self ≤ r`, exactly in exact mode.
    pub fn le(&self, r: &Rational) -> bool {
        match self {
            Weight::Exact(s) => s.cmp_real(r) != std::cmp::Ordering::Greater,
            Weight::Float(x) => *x <= crate::linalg::rat_to_f64(r) + 1e-12,
        }
    }

    /// `self ≥ r`, exactly in exact mode.
    pub fn ge(&self, r: &Rational) -> bool {
        match self {
            Weight::Exact(s) => s.cmp_real(r) != std::cmp::Ordering::Less,
            Weight::Float(x) => *x >= crate::linalg::rat_to_f64(r) - 1e-12,
        }
    }
}

#[derive(Clone, Debug)]
struct Evolved<A> {
    columns: Columns<A>,
    /// Block-basis indices of the columns.
    labels: Vec<usize>,
    /// Input density restricted to the support, `rho[j][k]`.
    rho: Vec<Vec<A>>,
}

impl<A: Amp> Evolved<A> {
    fn pairs(&self) -> impl Iterator<Item = (usize, usize, &A)> {
        self.rho.iter().enumerate().flat_map(|(j, r)| {
            r.iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(move |(k, x)| (j, k, x))
        })
    }

    fn qf_weight(&self, qf: usize) -> A {
        let mut w = A::zero();
        for (j, k, r) in self.pairs() {
            let (cj, ck) = (&self.columns.cols[j], &self.columns.cols[k]);
            for (c, a) in cj.iter().filter(|(c, _)| c.state == qf) {
                if let Some(b) = ck.get(c) {
                    w.add_assign(&r.mul(&a.mul(&b.conj())));
                }
            }
        }
        w
    }

    fn total_weight(&self) -> A {
        let mut w = A::zero();
        for (j, k, r) in self.pairs() {
            let (cj, ck) = (&self.columns.cols[j], &self.columns.cols[k]);
            for (c, a) in cj {
                if let Some(b) = ck.get(c) {
                    w.add_assign(&r.mul(&a.mul(&b.conj())));
                }
            }
        }
        w
    }

    fn control(&self, n_states: usize) -> Vec<A> {
        type Key = (i32, Vec<(i32, Cell)>);
        let groups: Vec<HashMap<Key, Vec<(usize, A)>>> = self
            .columns
            .cols
            .iter()
            .map(|col| {
                let mut g: HashMap<Key, Vec<(usize, A)>> = HashMap::new();
                for (c, a) in col {
                    g.entry(c.tape_head()).or_default().push((c.state, a.clone()));
                }
                g
            })
            .collect();
        let mut m = vec![A::zero(); n_states * n_states];
        for (j, k, r) in self.pairs() {
            for (key, gj) in &groups[j] {
                let Some(gk) = groups[k].get(key) else { continue };
                for (q, a) in gj {
                    for (q2, b) in gk {
                        m[q * n_states + q2].add_assign(&r.mul(&a.mul(&b.conj())));
                    }
                }
            }
        }
        m
    }

    /// Output density entries by block index, and the largest output length.
    fn output(&self) -> (usize, BTreeMap<(usize, usize), A>) {
        let mut max_len = 0;
        let groups: Vec<BTreeMap<Config, Vec<(usize, A)>>> = self
            .columns
            .cols
            .iter()
            .map(|col| {
                let mut g: BTreeMap<Config, Vec<(usize, A)>> = BTreeMap::new();
                for (c, a) in col {
                    let s = c.output_string();
                    max_len = max_len.max(s.len());
                    g.entry(c.junk(s.len()))
                        .or_default()
                        .push((string_index(&s), a.clone()));
                }
                g
            })
            .collect();
        let mut out: BTreeMap<(usize, usize), A> = BTreeMap::new();
        for (j, k, r) in self.pairs() {
            for (key, gj) in &groups[j] {
                let Some(gk) = groups[k].get(key) else { continue };
                for (s, a) in gj {
                    for (s2, b) in gk {
                        out.entry((*s, *s2))
                            .or_insert_with(A::zero)
                            .add_assign(&r.mul(&a.mul(&b.conj())));
                    }
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        (max_len, out)
    }
}

#[derive(Clone, Debug)]
enum Inner {
    Exact(Evolved<Surd>),
    Float(Evolved<Complex64>),
}

/// Evolved global state `M^t(σ)`, kept as evolved columns for the support of
/// the input density.
#[derive(Clone, Debug)]
pub struct GlobalState {
    n_states: usize,
    final_state: usize,
    inner: Inner,
}

impl GlobalState {
    /// Initial state for `input`: tape holds the input, control `q0`, head 0.
    pub fn initial(spec: &QtmSpec, input: &QubitString) -> GlobalState {
        let supp = input.support();
        let strings: Vec<String> = supp.iter().map(|&i| index_string(i)).collect();
        let inner = match input.density() {
            Density::Exact(m) => Inner::Exact(Evolved {
                columns: Columns::new(spec, &strings, Surd::one()),
                labels: supp.clone(),
                rho: supp
                    .iter()
                    .map(|&i| supp.iter().map(|&j| m.get(i, j).clone()).collect())
                    .collect(),
            }),
            Density::Float(m) => Inner::Float(Evolved {
                columns: Columns::new(spec, &strings, Complex64::new(1.0, 0.0)),
                labels: supp.clone(),
                rho: supp
                    .iter()
                    .map(|&i| supp.iter().map(|&j| m[(i, j)]).collect())
                    .collect(),
            }),
        };
        GlobalState {
            n_states: spec.n_states(),
            final_state: spec.final_state(),
            inner,
        }
    }

    pub fn time(&self) -> usize {
        match &self.inner {
            Inner::Exact(e) => e.columns.time,
            Inner::Float(e) => e.columns.time,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.inner, Inner::Exact(_))
    }

    pub fn step(&mut self, spec: &QtmSpec, caps: &Caps) -> Result<()> {
        match &mut self.inner {
            Inner::Exact(e) => e.columns.step(spec, caps),
            Inner::Float(e) => e.columns.step(spec, caps),
        }
    }

    /// `⟨qf|M_C^t(σ)|qf⟩`.
    pub fn qf_weight(&self) -> Weight {
        match &self.inner {
            Inner::Exact(e) => Weight::Exact(e.qf_weight(self.final_state)),
            Inner::Float(e) => Weight::Float(e.qf_weight(self.final_state).re),
        }
    }

    /// Squared norm (trace) of the global state.
    pub fn total_weight(&self) -> Weight {
        match &self.inner {
            Inner::Exact(e) => Weight::Exact(e.total_weight()),
            Inner::Float(e) => Weight::Float(e.total_weight().re),
        }
    }

    /// Largest number of configurations over the evolved columns.
    pub fn support_size(&self) -> usize {
        match &self.inner {
            Inner::Exact(e) => e.columns.cols.iter().map(|c| c.len()).max().unwrap_or(0),
            Inner::Float(e) => e.columns.cols.iter().map(|c| c.len()).max().unwrap_or(0),
        }
    }

    /// Block-basis indices of the input support, in column order.
    pub fn labels(&self) -> &[usize] {
        match &self.inner {
            Inner::Exact(e) => &e.labels,
            Inner::Float(e) => &e.labels,
        }
    }

    /// `M_C^t(σ) = Tr_{T,H} M^t(σ)` over the ordered state set.
    pub fn control_state(&self) -> Density {
        let n = self.n_states;
        match &self.inner {
            Inner::Exact(e) => {
                let v = e.control(n);
                let mut m = SurdMat::zeros(n);
                for (i, x) in v.into_iter().enumerate() {
                    m.set(i / n, i % n, x);
                }
                Density::Exact(m)
            }
            Inner::Float(e) => {
                let v = e.control(n);
                Density::Float(FMat::from_fn(n, n, |i, j| v[i * n + j]))
            }
        }
    }

    /// The reading operation: output track from cell 0 up to the first blank,
    /// with everything else traced out.
    pub fn read_output(&self) -> QubitString {
        match &self.inner {
            Inner::Exact(e) => {
                let (len, entries) = e.output();
                let mut m = SurdMat::zeros(block_dim(len));
                for ((i, j), v) in entries {
                    m.set(i, j, v);
                }
                QubitString::new_unchecked(len, Density::Exact(m)).trimmed()
            }
            Inner::Float(e) => {
                let (len, entries) = e.output();
                let d = block_dim(len);
                let mut m = FMat::zeros(d, d);
                for ((i, j), v) in entries {
                    m[(i, j)] = v;
                }
                QubitString::new_unchecked(len, Density::Float(m)).trimmed()
            }
        }
    }
}

fn check_t(t: usize, caps: &Caps) -> Result<()> {
    check("simulation time", t as u128, caps.t as u128)
}

/// `M^t(σ)`.
pub fn run(spec: &QtmSpec, input: &QubitString, t: usize, caps: &Caps) -> Result<GlobalState> {
    check_t(t, caps)?;
    let mut g = GlobalState::initial(spec, input);
    for _ in 0..t {
        g.step(spec, caps)?;
    }
    Ok(g)
}

/// qf-weights at times `0..=t`.
pub fn qf_weights(spec: &QtmSpec, input: &QubitString, t: usize, caps: &Caps) -> Result<Vec<Weight>> {
    check_t(t, caps)?;
    let mut g = GlobalState::initial(spec, input);
    let mut out = vec![g.qf_weight()];
    for _ in 0..t {
        g.step(spec, caps)?;
        out.push(g.qf_weight());
    }
    Ok(out)
}

/// Least `t ≤ t_max` with qf-weight exactly 1 at `t` and exactly 0 before.
pub fn halting_time(spec: &QtmSpec, input: &QubitString, t_max: usize, caps: &Caps) -> Result<Option<usize>> {
    Ok(halting_state(spec, input, t_max, caps)?.map(|g| g.time()))
}

fn halting_state(spec: &QtmSpec, input: &QubitString, t_max: usize, caps: &Caps) -> Result<Option<GlobalState>> {
    check_t(t_max, caps)?;
    let mut g = GlobalState::initial(spec, input);
    loop {
        match g.qf_weight().class() {
            WeightClass::One => return Ok(Some(g)),
            WeightClass::Between => return Ok(None),
            WeightClass::Zero => {}
        }
        if g.time() >= t_max {
            return Ok(None);
        }
        g.step(spec, caps)?;
    }
}

/// `M(σ)`: run to the halting time and read the output.
pub fn apply(spec: &QtmSpec, input: &QubitString, t_max: usize, caps: &Caps) -> Result<Option<QubitString>> {
    Ok(halting_state(spec, input, t_max, caps)?.map(|g| g.read_output()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;
    use crate::qtm::machines;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn identity_run_examples() {
        let m = machines::identity();
        let s = QubitString::classical("01").unwrap();
        let g0 = run(&m, &s, 0, &caps()).unwrap();
        let Density::Exact(c) = g0.control_state() else {
            panic!()
        };
        assert!(c.get(m.initial(), m.initial()).is_one());
        let g2 = run(&m, &s, 2, &caps()).unwrap();
        let Inner::Exact(e) = &g2.inner else { panic!() };
        let (cfg, _) = e.columns.cols[0].iter().next().unwrap();
        assert_eq!(cfg.state, m.initial());
        assert_eq!(cfg.head, 2);
        assert_eq!(cfg.output_string(), "01");
        assert!(cfg.tape.iter().all(|(_, c)| c.input == BLANK));
        let g3 = run(&m, &s, 3, &caps()).unwrap();
        let Density::Exact(c) = g3.control_state() else {
            panic!()
        };
        assert!(c.get(m.final_state(), m.final_state()).is_one());
        assert_eq!(halting_time(&m, &s, 10, &caps()).unwrap(), Some(3));
        let out = apply(&m, &s, 10, &caps()).unwrap().unwrap();
        assert!(out.exact_eq(&s).unwrap());
    }

    #[test]
    fn superposed_lengths_do_not_halt() {
        let m = machines::identity();
        let h = Surd::inv_sqrt(&rat(2, 1)).unwrap();
        let s = QubitString::pure(&[("0".into(), h.clone()), ("11".into(), h)]).unwrap();
        assert_eq!(halting_time(&m, &s, 10, &caps()).unwrap(), None);
        let g = run(&m, &s, 2, &caps()).unwrap();
        let Density::Exact(c) = g.control_state() else { panic!() };
        let half = Surd::from_rational(rat(1, 2));
        assert!(*c.get(m.final_state(), m.final_state()) == half);
        assert!(*c.get(m.initial(), m.initial()) == half);
        assert!(apply(&m, &s, 10, &caps()).unwrap().is_none());
        assert_eq!(
            halting_time(
                &machines::never_halting(),
                &QubitString::classical("0").unwrap(),
                10,
                &caps()
            )
            .unwrap(),
            None
        );
    }

    #[test]
    fn mixtures_are_preserved() {
        let m = machines::identity();
        let mix = QubitString::mixture(&[
            (rat(1, 2), QubitString::classical("00").unwrap()),
            (rat(1, 2), QubitString::classical("11").unwrap()),
        ])
        .unwrap();
        let out = apply(&m, &mix, 10, &caps()).unwrap().unwrap();
        assert!(out.exact_eq(&mix).unwrap());
    }

    #[test]
    fn junk_is_traced_out() {
        let plain = Config {
            state: 0,
            head: 1,
            tape: vec![(0, Cell::new(BLANK, 0))],
        };
        let junky = Config {
            state: 0,
            head: 1,
            tape: vec![(-5, Cell::new(BLANK, 1)), (0, Cell::new(BLANK, 0))],
        };
        assert_eq!(plain.output_string(), "0");
        assert_eq!(junky.output_string(), "0");
        assert_ne!(plain.junk(1), junky.junk(1));
        let h = Surd::inv_sqrt(&rat(2, 1)).unwrap();
        let mut col = BTreeMap::new();
        col.insert(plain, h.clone());
        col.insert(junky, h);
        let e = Evolved {
            columns: Columns {
                cols: vec![col],
                time: 0,
            },
            labels: vec![0],
            rho: vec![vec![Surd::one()]],
        };
        let (len, out) = e.output();
        assert_eq!(len, 1);
        assert_eq!(out.len(), 1);
        assert!(out[&(1, 1)].is_one());
    }

    #[test]
    fn float_and_exact_agree() {
        let m = machines::hadamard_like();
        let s = QubitString::classical("01").unwrap();
        let we = qf_weights(&m, &s, 5, &caps()).unwrap();
        let wf = qf_weights(&m, &s.to_float(), 5, &caps()).unwrap();
        for (a, b) in we.iter().zip(&wf) {
            assert!((a.to_f64() - b.to_f64()).abs() < 1e-12);
        }
        let g = run(&m, &s, 5, &caps()).unwrap();
        assert!(matches!(g.total_weight().class(), WeightClass::One));
    }
}
