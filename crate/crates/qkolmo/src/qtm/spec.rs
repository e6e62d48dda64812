use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Signed};
use sha2::{Digest, Sha256};

use crate::error::{parse_err, Error, Result};
use crate::linalg::{format_rational, parse_rational, rat_to_f64, CRat, Rational, Surd};

/// Symbol on one track: `0`, `1` or blank.
pub type TrackSym = u8;
pub const BLANK: TrackSym = 2;

/// Two-track tape symbol (input track, output track).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Cell {
    pub input: TrackSym,
    pub output: TrackSym,
}

impl Cell {
    pub const BLANK: Cell = Cell {
        input: BLANK,
        output: BLANK,
    };

    pub fn new(input: TrackSym, output: TrackSym) -> Cell {
        Cell { input, output }
    }

    pub fn code(self) -> u8 {
        self.input * 3 + self.output
    }

    pub fn from_code(c: u8) -> Cell {
        Cell::new(c / 3, c % 3)
    }

    pub fn all() -> impl Iterator<Item = Cell> {
        (0..9u8).map(Cell::from_code)
    }

    pub fn is_blank(self) -> bool {
        self == Cell::BLANK
    }

    fn parse(s: &str, line: usize) -> Result<Cell> {
        let t = |c: char| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            '#' => Ok(BLANK),
            _ => Err(parse_err(line, format!("bad track symbol `{c}` in `{s}`"))),
        };
        let cs: Vec<char> = s.chars().collect();
        if cs.len() != 2 {
            return Err(parse_err(line, format!("cell symbol must have two tracks: `{s}`")));
        }
        Ok(Cell::new(t(cs[0])?, t(cs[1])?))
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = |x: TrackSym| match x {
            0 => '0',
            1 => '1',
            _ => '#',
        };
        write!(f, "{}{}", c(self.input), c(self.output))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Dir {
    L,
    R,
}

impl Dir {
    pub fn delta(self) -> i32 {
        match self {
            Dir::L => -1,
            Dir::R => 1,
        }
    }
}

/// One successor `(state, written cell, move)` with its listed amplitude.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub next: usize,
    pub write: Cell,
    pub dir: Dir,
    pub amp: CRat,
}

/// All successors of one `(state, cell)` pair. The effective amplitude of a
/// branch is `amp / √normsq`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleGroup {
    pub branches: Vec<Branch>,
    pub normsq: Rational,
}

/// Effective amplitudes precomputed in both number systems.
#[derive(Clone, Debug)]
pub struct Compiled {
    pub next: usize,
    pub write: Cell,
    pub dir: Dir,
    pub exact: Surd,
    pub float: Complex64,
}

#[derive(Clone, Debug)]
pub struct QtmSpec {
    name: String,
    states: Vec<String>,
    initial: usize,
    final_state: usize,
    rules: BTreeMap<(usize, Cell), RuleGroup>,
    compiled: BTreeMap<(usize, Cell), Vec<Compiled>>,
}

impl QtmSpec {
    /// Checks the table and precomputes effective amplitudes.
    pub fn new(
        name: impl Into<String>,
        states: Vec<String>,
        initial: usize,
        final_state: usize,
        rules: BTreeMap<(usize, Cell), RuleGroup>,
    ) -> Result<QtmSpec> {
        let bad = |m: String| Error::MalformedTable(m);
        if states.len() < 2 {
            return Err(bad("need at least an initial and a final state".into()));
        }
        let uniq: BTreeSet<&String> = states.iter().collect();
        if uniq.len() != states.len() {
            return Err(bad("duplicate state names".into()));
        }
        if initial >= states.len() || final_state >= states.len() {
            return Err(bad("initial or final state out of range".into()));
        }
        if initial == final_state {
            return Err(bad("initial and final state coincide".into()));
        }
        let mut compiled = BTreeMap::new();
        for (&(q, a), g) in &rules {
            if q >= states.len() {
                return Err(bad(format!("rule for unknown state index {q}")));
            }
            if !g.normsq.is_positive() {
                return Err(bad(format!("non-positive normsq in rule ({}, {a})", states[q])));
            }
            if g.branches.is_empty() {
                return Err(bad(format!("empty rule group ({}, {a})", states[q])));
            }
            let mut seen = BTreeSet::new();
            let scale = Surd::inv_sqrt(&g.normsq)?;
            let fscale = 1.0 / rat_to_f64(&g.normsq).sqrt();
            let mut out = Vec::new();
            for b in &g.branches {
                if b.next >= states.len() {
                    return Err(bad(format!("branch to unknown state index {}", b.next)));
                }
                if b.amp.is_zero() {
                    return Err(bad(format!("zero amplitude in rule ({}, {a})", states[q])));
                }
                if !seen.insert((b.next, b.write, b.dir)) {
                    return Err(bad(format!("repeated successor in rule ({}, {a})", states[q])));
                }
                out.push(Compiled {
                    next: b.next,
                    write: b.write,
                    dir: b.dir,
                    exact: scale.scale_c(&b.amp),
                    float: b.amp.to_c64() * fscale,
                });
            }
            compiled.insert((q, a), out);
        }
        Ok(QtmSpec {
            name: name.into(),
            states,
            initial,
            final_state,
            rules,
            compiled,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn final_state(&self) -> usize {
        self.final_state
    }

    pub fn rules(&self) -> &BTreeMap<(usize, Cell), RuleGroup> {
        &self.rules
    }

    pub fn rule(&self, q: usize, a: Cell) -> Option<&RuleGroup> {
        self.rules.get(&(q, a))
    }

    pub(crate) fn compiled(&self, q: usize, a: Cell) -> Option<&[Compiled]> {
        self.compiled.get(&(q, a)).map(Vec::as_slice)
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// SHA-256 of the canonical serialisation, hex encoded.
    pub fn hash_hex(&self) -> String {
        hex::encode(Sha256::digest(self.to_string().as_bytes()))
    }

    /// Parses the line-oriented machine format.
    pub fn parse(text: &str) -> Result<QtmSpec> {
        let mut name = String::from("machine");
        let mut states: Option<Vec<String>> = None;
        let mut initial: Option<String> = None;
        let mut final_state: Option<String> = None;
        struct RawBranch {
            next: String,
            write: Cell,
            dir: Dir,
            amp: CRat,
        }
        // line, state, read cell, branches, declared normalisation
        type RawRule = (usize, String, Cell, Vec<RawBranch>, Option<Rational>);
        let mut raw: Vec<RawRule> = Vec::new();

        for (i, line) in text.lines().enumerate() {
            let ln = i + 1;
            let line = match line.find("#!") {
                Some(p) => &line[..p],
                None => line,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("states:") {
                states = Some(rest.split_whitespace().map(String::from).collect());
                continue;
            }
            if let Some(rest) = line.strip_prefix("initial:") {
                initial = Some(rest.trim().to_string());
                continue;
            }
            if let Some(rest) = line.strip_prefix("final:") {
                final_state = Some(rest.trim().to_string());
                continue;
            }
            if let Some(rest) = line.strip_prefix("name:") {
                name = rest.trim().to_string();
                continue;
            }
            if let Some(rest) = line.strip_prefix("normsq:") {
                let r = parse_rational(rest).map_err(|e| parse_err(ln, e.to_string()))?;
                match raw.last_mut() {
                    Some(g) if g.4.is_none() => g.4 = Some(r),
                    _ => return Err(parse_err(ln, "normsq without a preceding rule group")),
                }
                continue;
            }
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| parse_err(ln, format!("unrecognised line `{line}`")))?;
            let lt: Vec<&str> = lhs.split_whitespace().collect();
            if lt.len() != 2 {
                return Err(parse_err(ln, "left side must be `state cell`"));
            }
            let cell = Cell::parse(lt[1], ln)?;
            let mut branches = Vec::new();
            let mut normsq = None;
            for seg in rhs.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                if let Some(r) = seg.strip_prefix("normsq:") {
                    normsq = Some(parse_rational(r).map_err(|e| parse_err(ln, e.to_string()))?);
                    continue;
                }
                let t: Vec<&str> = seg.split_whitespace().collect();
                if t.len() != 4 {
                    return Err(parse_err(ln, format!("branch must be `state cell dir amp`: `{seg}`")));
                }
                let dir = match t[2] {
                    "L" => Dir::L,
                    "R" => Dir::R,
                    d => return Err(parse_err(ln, format!("bad direction `{d}`"))),
                };
                branches.push(RawBranch {
                    next: t[0].to_string(),
                    write: Cell::parse(t[1], ln)?,
                    dir,
                    amp: CRat::parse_at(t[3], ln)?,
                });
            }
            raw.push((ln, lt[0].to_string(), cell, branches, normsq));
        }

        let states = states.ok_or_else(|| parse_err(0, "missing `states:` header"))?;
        let idx = |s: &str, ln: usize| {
            states
                .iter()
                .position(|x| x == s)
                .ok_or_else(|| parse_err(ln, format!("unknown state `{s}`")))
        };
        let initial = idx(&initial.ok_or_else(|| parse_err(0, "missing `initial:`"))?, 0)?;
        let final_state = idx(&final_state.ok_or_else(|| parse_err(0, "missing `final:`"))?, 0)?;
        let mut rules = BTreeMap::new();
        for (ln, q, cell, bs, normsq) in raw {
            let q = idx(&q, ln)?;
            let mut branches = Vec::new();
            for b in bs {
                branches.push(Branch {
                    next: idx(&b.next, ln)?,
                    write: b.write,
                    dir: b.dir,
                    amp: b.amp,
                });
            }
            let g = RuleGroup {
                branches,
                normsq: normsq.unwrap_or_else(Rational::one),
            };
            if rules.insert((q, cell), g).is_some() {
                return Err(parse_err(ln, format!("duplicate rule for ({}, {cell})", states[q])));
            }
        }
        QtmSpec::new(name, states, initial, final_state, rules)
    }
}

impl fmt::Display for QtmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "name: {}", self.name)?;
        writeln!(f, "states: {}", self.states.join(" "))?;
        writeln!(f, "initial: {}", self.states[self.initial])?;
        writeln!(f, "final: {}", self.states[self.final_state])?;
        for (&(q, a), g) in &self.rules {
            write!(f, "{} {} ->", self.states[q], a)?;
            for (i, b) in g.branches.iter().enumerate() {
                let sep = if i == 0 { " " } else { " ; " };
                let d = match b.dir {
                    Dir::L => "L",
                    Dir::R => "R",
                };
                write!(f, "{sep}{} {} {d} {}", self.states[b.next], b.write, b.amp)?;
            }
            if !g.normsq.is_one() {
                write!(f, " ; normsq: {}", format_rational(&g.normsq))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ID: &str = "states: q0 qf\ninitial: q0\nfinal: qf\n\
        q0 ## -> qf ## R 1/1+0/1i\n\
        q0 0# -> q0 #0 R 1/1+0/1i\n\
        q0 1# -> q0 #1 R 1/1+0/1i  #! copy\n";

    #[test]
    fn parse_and_serialise_round_trip() {
        let m = QtmSpec::parse(ID).unwrap();
        assert_eq!(m.n_states(), 2);
        assert_eq!(m.rules().len(), 3);
        let again = QtmSpec::parse(&m.to_string()).unwrap();
        assert_eq!(again.to_string(), m.to_string());
        assert_eq!(again.hash_hex(), m.hash_hex());
    }

    #[test]
    fn normsq_forms() {
        let text = "states: q0 q1 qf\ninitial: q0\nfinal: qf\n\
            q0 0# -> q1 #0 R 1 ; qf #0 R -i ; normsq: 2\n\
            q0 1# -> q1 #1 R 1\nnormsq: 1\n";
        let m = QtmSpec::parse(text).unwrap();
        let g = m.rule(0, Cell::new(0, BLANK)).unwrap();
        assert_eq!(g.normsq, crate::linalg::rat(2, 1));
        let c = m.compiled(0, Cell::new(0, BLANK)).unwrap();
        assert!((c[1].float.im + 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn malformed_tables_rejected() {
        assert!(QtmSpec::parse("states: q0\ninitial: q0\nfinal: q0\n").is_err());
        let zero = "states: q0 qf\ninitial: q0\nfinal: qf\nq0 ## -> qf ## R 0\n";
        assert!(matches!(QtmSpec::parse(zero), Err(Error::MalformedTable(_))));
        let dup = "states: q0 qf\ninitial: q0\nfinal: qf\nq0 ## -> qf ## R 1\nq0 ## -> qf ## L 1\n";
        assert!(matches!(QtmSpec::parse(dup), Err(Error::Parse { .. })));
        let unk = "states: q0 qf\ninitial: q0\nfinal: qf\nq0 ## -> qx ## R 1\n";
        assert!(QtmSpec::parse(unk).is_err());
    }
}
