//! Host-level universal decoder: a halting input of length `n` is encoded as
//! a blind prefix codeword for its halting time followed by the standard
//! compression of the input, `n + 1` qubits in total; the decoder recomputes
//! the halting spaces, finds the codeword, decompresses, simulates and reads
//! the output.

use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use crate::caps::Caps;
use crate::coding::{ceil_log2, self_delim_decode, self_delim_encode, CompressionMap, PrefixCode};
use crate::error::{parse_err, Error, Result};
use crate::halting::{approx_halting_space, exact_halting_spaces, machine_id, ApproxHaltingSpace};
use crate::linalg::{
    format_rational, op_norm, parse_rational, rat, rat_to_f64, CRat, CVec, FVec, Rational, Surd, SurdVec,
};
use crate::qtm::{run, QtmSpec, QubitString};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Approx,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Approx => "approx",
        })
    }
}

/// `2^{−2n}/81`.
pub fn default_eps0(n: usize) -> Rational {
    Rational::new(BigInt::from(1), BigInt::from(81) * (BigInt::from(1) << (2 * n)))
}

/// One halting time with its space.
#[derive(Clone, Debug)]
pub struct SeqEntry {
    pub t: usize,
    /// Spanning vectors of the (exact or approximate) space.
    pub basis: Vec<CVec>,
    /// Accuracy of an approximate space.
    pub eps: Option<Rational>,
}

impl SeqEntry {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Clone, Debug)]
pub struct HaltingTimeSequence {
    pub machine: String,
    pub n: usize,
    pub eps0: Rational,
    pub mode: Mode,
    pub entries: Vec<SeqEntry>,
}

impl HaltingTimeSequence {
    /// `(tᵢ, dᵢ)`.
    pub fn times(&self) -> Vec<(usize, usize)> {
        self.entries.iter().map(|e| (e.t, e.dim())).collect()
    }

    /// `ℓᵢ = n + 1 − ⌈log dᵢ⌉`.
    pub fn codeword_lengths(&self) -> Vec<usize> {
        self.entries.iter().map(|e| self.n + 1 - ceil_log2(e.dim())).collect()
    }

    pub fn code(&self) -> Result<PrefixCode> {
        PrefixCode::from_lengths(&self.codeword_lengths())
    }
}

fn space_at(spec: &QtmSpec, n: usize, t: usize, eps0: &Rational, caps: &Caps) -> Result<ApproxHaltingSpace> {
    approx_halting_space(spec, n, eps0, t, caps)
}

/// All `t ≤ t_max` with a nonzero halting space.
pub fn halting_time_sequence(
    spec: &QtmSpec,
    n: usize,
    eps0: &Rational,
    t_max: usize,
    mode: Mode,
    caps: &Caps,
) -> Result<HaltingTimeSequence> {
    let entries = match mode {
        Mode::Exact => exact_halting_spaces(spec, n, t_max, caps)?
            .into_iter()
            .filter(|h| h.dim() > 0)
            .map(|h| SeqEntry {
                t: h.t,
                basis: h.directions(),
                eps: None,
            })
            .collect(),
        Mode::Approx => {
            let mut out = Vec::new();
            for t in 1..=t_max {
                let a = space_at(spec, n, t, eps0, caps)?;
                if a.dim() > 0 {
                    out.push(SeqEntry {
                        t,
                        basis: a.basis,
                        eps: Some(a.eps),
                    });
                }
            }
            out
        }
    };
    Ok(HaltingTimeSequence {
        machine: machine_id(spec),
        n,
        eps0: eps0.clone(),
        mode,
        entries,
    })
}

/// `s_M`: self-delimited byte length followed by the spec bytes, eight bits
/// per byte.
pub fn machine_description(spec: &QtmSpec) -> String {
    let text = spec.to_string();
    let mut s = self_delim_encode(text.len() as u64).expect("positive length");
    for b in text.bytes() {
        s.push_str(&format!("{b:08b}"));
    }
    s
}

/// Inverse of [`machine_description`]; returns the machine and the rest.
pub fn parse_machine_description(bits: &str) -> Result<(QtmSpec, &str)> {
    let (len, rest) = self_delim_decode(bits)?;
    let nbits = 8 * len as usize;
    if rest.len() < nbits {
        return Err(Error::MalformedStream);
    }
    let bytes: Vec<u8> = rest.as_bytes()[..nbits]
        .chunks(8)
        .map(|c| u8::from_str_radix(std::str::from_utf8(c).unwrap_or("x"), 2).map_err(|_| Error::MalformedStream))
        .collect::<Result<_>>()?;
    let text = String::from_utf8(bytes).map_err(|_| Error::MalformedStream)?;
    Ok((QtmSpec::parse(&text)?, &rest[nbits..]))
}

/// `σ_M = s_M ⊗ |cᵢ⟩ ⊗ payload`.
#[derive(Clone, Debug)]
pub struct UniversalProgram {
    pub machine: QtmSpec,
    pub codeword: String,
    pub payload: SurdVec,
    pub mode: Mode,
    /// Accuracy `ε0` of the approximate spaces (approx mode only).
    pub eps0: Option<Rational>,
}

impl UniversalProgram {
    pub fn payload_qubits(&self) -> usize {
        self.payload.dim().trailing_zeros() as usize
    }

    /// Length of the quantum part `|cᵢ⟩ ⊗ payload`.
    pub fn quantum_length(&self) -> usize {
        self.codeword.len() + self.payload_qubits()
    }

    pub fn input_length(&self) -> Result<usize> {
        self.quantum_length()
            .checked_sub(1)
            .ok_or_else(|| Error::InvalidArgument("program has no quantum part".into()))
    }

    pub fn description_length(&self) -> usize {
        machine_description(&self.machine).len()
    }

    /// The quantum part as a qubit string (exact when the payload is).
    pub fn quantum_part(&self) -> Result<QubitString> {
        let k = self.payload_qubits();
        let norm = self.payload.norm_sq();
        let payload = if norm.is_one() {
            QubitString::fixed_length(k, &self.payload)?
        } else {
            let v = self.payload.to_c64();
            let nv = v.norm();
            QubitString::fixed_length_float(k, &(v / Complex64::new(nv, 0.0)))?
        };
        payload.prepend_classical(&self.codeword)
    }

    pub fn to_file(&self) -> String {
        let mode = match (&self.mode, &self.eps0) {
            (Mode::Approx, Some(e)) => format!("approx {}", format_rational(e)),
            (m, _) => m.to_string(),
        };
        format!(
            "[machine]\n{}[codeword]\n{}\n[payload]\n{}\n[mode]\n{}\n",
            self.machine,
            self.codeword,
            self.payload.dump(),
            mode
        )
    }

    pub fn parse(text: &str) -> Result<UniversalProgram> {
        let mut section = "";
        let mut machine = String::new();
        let (mut codeword, mut payload, mut mode) = (None, None, None);
        for (i, line) in text.lines().enumerate() {
            let l = line.trim();
            if l.starts_with('[') && l.ends_with(']') {
                section = match l {
                    "[machine]" | "[codeword]" | "[payload]" | "[mode]" => l,
                    _ => return Err(parse_err(i + 1, format!("unknown section {l}"))),
                };
                continue;
            }
            match section {
                "[machine]" => {
                    machine.push_str(line);
                    machine.push('\n');
                }
                _ if l.is_empty() => {}
                "[codeword]" => {
                    if !l.bytes().all(|b| b == b'0' || b == b'1') {
                        return Err(parse_err(i + 1, "codeword must be binary"));
                    }
                    codeword = Some(l.to_string());
                }
                "[payload]" => payload = Some(SurdVec::parse(l).map_err(|e| parse_err(i + 1, e.to_string()))?),
                "[mode]" => {
                    let mut it = l.split_whitespace();
                    mode = Some(match (it.next(), it.next()) {
                        (Some("exact"), None) => (Mode::Exact, None),
                        (Some("approx"), e) => (Mode::Approx, e.map(parse_rational).transpose()?),
                        _ => return Err(parse_err(i + 1, format!("bad mode `{l}`"))),
                    });
                }
                _ => return Err(parse_err(i + 1, "text outside a section")),
            }
        }
        // an empty codeword line is legal, so a missing [codeword] body means ""
        let codeword = codeword.unwrap_or_default();
        let payload = payload.ok_or_else(|| parse_err(0, "missing [payload]"))?;
        if !payload.dim().is_power_of_two() {
            return Err(parse_err(0, "payload dimension is not a power of two"));
        }
        let (mode, eps0) = mode.ok_or_else(|| parse_err(0, "missing [mode]"))?;
        Ok(UniversalProgram {
            machine: QtmSpec::parse(&machine)?,
            codeword,
            payload,
            mode,
            eps0,
        })
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub mode: Mode,
    pub t_max: usize,
    /// `ε0`; defaults to `2^{−2n}/81`.
    pub eps0: Option<Rational>,
    /// Decoding accuracy used to truncate the fine-tuning cascade.
    pub delta: Rational,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            mode: Mode::Exact,
            t_max: 32,
            eps0: None,
            delta: rat(1, 10_000),
        }
    }
}

/// Fine-tuning cascade `U = U_N ∘ … ∘ U_1` from `V_0 = H^{(n,ε0)}(t)` towards
/// the halting space, with `ε_k = ε^{(n,ε_{k−1})}(t)/80`.
#[derive(Clone, Debug)]
pub struct FineTuning {
    pub levels: usize,
    pub map: DMatrix<Complex64>,
    pub last_defect: f64,
}

fn onb_matrix(a: &ApproxHaltingSpace) -> DMatrix<Complex64> {
    let onb = a.onb();
    let dim = 1usize << a.n;
    DMatrix::from_fn(dim, onb.len(), |i, j| onb[j][i])
}

/// Truncation level: least `N` with `c_n (18/80)^{N/2} < δ/6`,
/// `c_n = (8/3)√((11/2)ε0)(5/2)^{2ⁿ}`.
pub fn cascade_levels(n: usize, eps0: f64, delta: f64) -> usize {
    let c = 8.0 / 3.0 * (5.5 * eps0).sqrt() * 2.5f64.powf(2f64.powi(n as i32));
    let mut k = 0;
    while c * (18.0f64 / 80.0).powf(k as f64 / 2.0) >= delta / 6.0 && k < 64 {
        k += 1;
    }
    k.max(1)
}

pub fn fine_tuning(spec: &QtmSpec, n: usize, t: usize, eps0: &Rational, delta: f64, caps: &Caps) -> Result<FineTuning> {
    let v0 = space_at(spec, n, t, eps0, caps)?;
    let dim = 1usize << n;
    let max_levels = cascade_levels(n, rat_to_f64(eps0), delta);
    let mut map = DMatrix::<Complex64>::identity(dim, dim);
    let mut prev = v0;
    let mut last_defect = f64::INFINITY;
    let mut levels = 0;
    while levels < max_levels {
        let eps_k = &prev.eps / Rational::from_integer(80.into());
        let next = space_at(spec, n, t, &eps_k, caps)?;
        if next.dim() != prev.dim() {
            return Err(Error::InvalidArgument(format!(
                "approximate spaces at t = {t} change dimension ({} → {}) along the cascade",
                prev.dim(),
                next.dim()
            )));
        }
        let (a, b) = (onb_matrix(&prev), onb_matrix(&next));
        // polar part of B†A gives the closest isometry V_{k−1} → V_k
        let m = b.adjoint() * &a;
        let svd = m.svd(true, true);
        let r = svd.u.expect("u requested") * svd.v_t.expect("v requested");
        let uk = &b * r * a.adjoint() + (DMatrix::identity(dim, dim) - &a * a.adjoint());
        last_defect = op_norm(&(&uk * &a - &a));
        map = uk * map;
        levels += 1;
        prev = next;
        if last_defect < delta / 6.0 {
            break;
        }
    }
    Ok(FineTuning {
        levels,
        map,
        last_defect,
    })
}

fn rationalize(v: &FVec) -> SurdVec {
    let snap = |x: f64| (x * 2f64.powi(48)).round() / 2f64.powi(48);
    SurdVec(
        v.iter()
            .map(|z| Surd::from_crat(CRat::from_c64(Complex64::new(snap(z.re), snap(z.im)))))
            .collect(),
    )
}

/// Encodes a halting input `ψ ∈ H_n` into `|cᵢ⟩ ⊗ C_{V}(ψ)`.
pub fn encode_input(spec: &QtmSpec, psi: &SurdVec, opts: &PipelineOptions, caps: &Caps) -> Result<UniversalProgram> {
    if !psi.dim().is_power_of_two() {
        return Err(Error::InvalidArgument("input dimension is not a power of two".into()));
    }
    let n = psi.dim().trailing_zeros() as usize;
    let eps0 = opts.eps0.clone().unwrap_or_else(|| default_eps0(n));
    let seq = halting_time_sequence(spec, n, &eps0, opts.t_max, opts.mode, caps)?;
    let code = seq.code()?;
    match opts.mode {
        Mode::Exact => {
            for (e, c) in seq.entries.iter().zip(code.codewords()) {
                let map = CompressionMap::new(&e.basis)?;
                match map.compress(psi) {
                    Ok(payload) => {
                        return Ok(UniversalProgram {
                            machine: spec.clone(),
                            codeword: c.clone(),
                            payload,
                            mode: Mode::Exact,
                            eps0: None,
                        })
                    }
                    Err(Error::NotInSubspace) => continue,
                    Err(e) => return Err(e),
                }
            }
            Err(Error::NonHalting(opts.t_max))
        }
        Mode::Approx => {
            let input = QubitString::fixed_length(n, psi)?;
            let t = crate::qtm::halting_time(spec, &input, opts.t_max, caps)?.ok_or(Error::NonHalting(opts.t_max))?;
            let (i, e) = seq
                .entries
                .iter()
                .enumerate()
                .find(|(_, e)| e.t == t)
                .ok_or(Error::NonHalting(opts.t_max))?;
            let ft = fine_tuning(spec, n, t, &eps0, rat_to_f64(&opts.delta), caps)?;
            let back = ft.map.adjoint() * psi.to_c64();
            let map = CompressionMap::new(&e.basis)?;
            let coords: Vec<Complex64> = map.basis().iter().map(|u| u.to_c64().dotc(&back)).collect();
            let mut chi = FVec::zeros(1 << map.target_qubits());
            for (k, c) in coords.into_iter().enumerate() {
                chi[k] = c;
            }
            Ok(UniversalProgram {
                machine: spec.clone(),
                codeword: code.codewords()[i].clone(),
                payload: rationalize(&chi),
                mode: Mode::Approx,
                eps0: Some(eps0),
            })
        }
    }
}

/// [`encode_input`] for a superposition of classical strings, which must
/// halt and share one length.
pub fn encode_superposition(
    spec: &QtmSpec,
    components: &[(String, Surd)],
    opts: &PipelineOptions,
    caps: &Caps,
) -> Result<UniversalProgram> {
    let sigma = QubitString::pure(components)?;
    crate::qtm::halting_time(spec, &sigma, opts.t_max, caps)?.ok_or(Error::NonHalting(opts.t_max))?;
    let n = components.first().map(|(s, _)| s.len()).unwrap_or(0);
    if components.iter().any(|(s, _)| s.len() != n) {
        return Err(Error::InvalidArgument("halting superposition mixes lengths".into()));
    }
    let mut psi = SurdVec::zeros(1 << n);
    for (s, a) in components {
        psi.0[crate::qtm::string_index(s) + 1 - (1 << n)].add_assign(a);
    }
    encode_input(spec, &psi, opts, caps)
}

/// Decode loop: halting spaces for `t = 1, 2, …`, blind codewords, prefix
/// match, decompression, fine-tuning, `τ` simulation steps, reading.
/// `δ = 0` asks for the exact path (exact mode only).
pub fn decode_program(prog: &UniversalProgram, delta: &Rational, t_max: usize, caps: &Caps) -> Result<QubitString> {
    let spec = &prog.machine;
    let n = prog.input_length()?;
    let eps0 = prog.eps0.clone().unwrap_or_else(|| default_eps0(n));
    let mut code = PrefixCode::new();
    let mut found = None;
    let exact_all = if prog.mode == Mode::Exact {
        Some(exact_halting_spaces(spec, n, t_max, caps)?)
    } else {
        None
    };
    for t in 1..=t_max {
        let (basis, eps) = match &exact_all {
            Some(all) => (all[t].directions(), None),
            None => {
                let a = space_at(spec, n, t, &eps0, caps)?;
                (a.basis, Some(a.eps))
            }
        };
        if basis.is_empty() {
            continue;
        }
        let len = n + 1 - ceil_log2(basis.len());
        let c = code.extend(len)?.to_string();
        if prog.codeword == c {
            found = Some((t, basis, eps));
            break;
        }
    }
    let (tau, basis, _) = found.ok_or(Error::NoMatchingCodeword(t_max))?;
    let map = CompressionMap::new(&basis)?;
    if map.target_qubits() != prog.payload_qubits() {
        return Err(Error::DimensionMismatch {
            expected: 1 << map.target_qubits(),
            got: prog.payload.dim(),
        });
    }
    let input = if delta.is_zero() {
        if prog.mode != Mode::Exact {
            return Err(Error::InvalidArgument("approx programs decode with δ > 0".into()));
        }
        QubitString::fixed_length(n, &map.decompress(&prog.payload)?)?
    } else {
        let d = rat_to_f64(delta);
        let mut v = map.decompress_float(&prog.payload.to_c64(), d / 3.0)?;
        if prog.mode == Mode::Approx {
            let ft = fine_tuning(spec, n, tau, &eps0, d, caps)?;
            v = ft.map * v;
        }
        let nv = v.norm();
        QubitString::fixed_length_float(n, &(v / Complex64::new(nv, 0.0)))?
    };
    Ok(run(spec, &input, tau, caps)?.read_output())
}

/// Whole-number check used by reports.
pub fn rational_to_string(r: &Rational) -> String {
    match r.to_integer().to_i64() {
        Some(k) if r.is_integer() => k.to_string(),
        _ => format_rational(r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;
    use crate::qtm::{apply, machines};

    fn h() -> Surd {
        Surd::inv_sqrt(&rat(2, 1)).unwrap()
    }

    #[test]
    fn sequence_examples() {
        let c = Caps::default();
        let id = machines::identity();
        let s1 = halting_time_sequence(&id, 1, &default_eps0(1), 16, Mode::Exact, &c).unwrap();
        assert_eq!(s1.times(), vec![(2, 2)]);
        let s2 = halting_time_sequence(&id, 2, &default_eps0(2), 16, Mode::Exact, &c).unwrap();
        assert_eq!(s2.times(), vec![(3, 4)]);
        let nh = halting_time_sequence(&machines::never_halting(), 2, &default_eps0(2), 16, Mode::Exact, &c).unwrap();
        assert!(nh.times().is_empty());
        assert_eq!(default_eps0(1), rat(1, 324));
    }

    #[test]
    fn encode_examples() {
        let c = Caps::default();
        let id = machines::identity();
        let o = PipelineOptions::default();
        let zero = SurdVec(vec![Surd::one(), Surd::zero()]);
        let p = encode_input(&id, &zero, &o, &c).unwrap();
        assert_eq!(p.codeword, "0");
        assert_eq!(p.payload_qubits(), 1);
        assert_eq!(p.quantum_length(), 2);
        let bell = SurdVec(vec![h(), Surd::zero(), Surd::zero(), h()]);
        let p2 = encode_input(&id, &bell, &o, &c).unwrap();
        assert_eq!(p2.codeword, "0");
        assert_eq!(p2.quantum_length(), 3);
        let out = decode_program(&p2, &rat(1, 1_000_000), 16, &c).unwrap();
        let want = apply(&id, &QubitString::fixed_length(2, &bell).unwrap(), 16, &c)
            .unwrap()
            .unwrap();
        assert!(out.trace_distance(&want).unwrap() < 1e-6);
        let exact = decode_program(&p2, &rat(0, 1), 16, &c).unwrap();
        assert!(exact.exact_eq(&want).unwrap());

        let mixed = [("0".to_string(), h()), ("11".to_string(), h())];
        assert!(matches!(
            encode_superposition(&id, &mixed, &o, &c),
            Err(Error::NonHalting(_))
        ));
        let p3 = encode_superposition(&id, &[("10".to_string(), Surd::one())], &o, &c).unwrap();
        assert_eq!(p3.quantum_length(), 3);
    }

    #[test]
    fn decode_rejects_unknown_codeword() {
        let c = Caps::default();
        let id = machines::identity();
        let mut p = encode_input(
            &id,
            &SurdVec(vec![Surd::one(), Surd::zero()]),
            &PipelineOptions::default(),
            &c,
        )
        .unwrap();
        p.codeword = "1".into();
        assert!(matches!(
            decode_program(&p, &rat(0, 1), 12, &c),
            Err(Error::NoMatchingCodeword(12))
        ));
    }

    #[test]
    fn program_file_round_trip() {
        let c = Caps::default();
        let id = machines::identity();
        let p = encode_input(&id, &SurdVec(vec![h(), h()]), &PipelineOptions::default(), &c).unwrap();
        let q = UniversalProgram::parse(&p.to_file()).unwrap();
        assert_eq!(q.codeword, p.codeword);
        assert_eq!(q.payload, p.payload);
        assert_eq!(q.machine.to_string(), id.to_string());
        let bits = machine_description(&id);
        let (back, rest) = parse_machine_description(&bits).unwrap();
        assert_eq!(back.to_string(), id.to_string());
        assert!(rest.is_empty());
    }

    #[test]
    fn approx_mode_on_the_empty_input() {
        let c = Caps::default();
        let id = machines::identity();
        let o = PipelineOptions {
            mode: Mode::Approx,
            ..PipelineOptions::default()
        };
        let p = encode_input(&id, &SurdVec(vec![Surd::one()]), &o, &c).unwrap();
        assert_eq!(p.quantum_length(), 1);
        let out = decode_program(&p, &rat(1, 10_000), 8, &c).unwrap();
        let want = QubitString::empty();
        assert!(out.trace_distance(&want).unwrap() < 1e-4);
    }
}
