//! Batch front end. Exit codes: 0 success, 1 domain error, 2 usage error.

pub mod suite;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::brudno::{beta_report, parse_exact, SourceModel};
use crate::caps::Caps;
use crate::coding::{kraft_sum, PrefixCode};
use crate::error::{Error, Result};
use crate::halting::{approx_halting_space, exact_halting_spaces, machine_id};
use crate::linalg::{format_rational, rat_to_f64, Rational, SurdVec};
use crate::pipeline::{
    chi_quantity, counting_bound, decode_program, encode_input, qc_scheme_upper_bound, qc_upper_bound, Ensemble, Mode,
    ParamMode, PipelineOptions, SearchConfig, UniversalProgram,
};
use crate::qtm::{halting_time, run, validate_unitarity, QtmSpec, QubitString};

#[derive(Parser, Debug)]
#[command(name = "qkolmo", version, about = "Quantum Turing machine analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
    /// Cap overrides applied after QKOLMO_CAPS, e.g. `n_exact=8,t=128`.
    #[arg(long, global = true)]
    caps: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Tsv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Approx,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ParamArg {
    Encoded,
    Ignored,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact isometry check on the reachable window.
    Validate {
        machine: PathBuf,
        #[arg(long, default_value_t = 8)]
        tmax: usize,
        #[arg(long, default_value_t = 3)]
        nmax: usize,
    },
    /// Run an input to its halting time and read the output.
    Simulate {
        machine: PathBuf,
        /// Classical input string.
        #[arg(long, conflicts_with = "vector")]
        input: Option<String>,
        /// Fixed-length input vector (`nsq …` or `surd …` line).
        #[arg(long)]
        vector: Option<String>,
        #[arg(long, default_value_t = 32)]
        tmax: usize,
    },
    /// Exact halting spaces H^(n)(t).
    HaltingSpaces {
        machine: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 16)]
        tmax: usize,
        /// Print basis vectors.
        #[arg(long)]
        dump: bool,
    },
    /// Approximate halting spaces at accuracy δ.
    ApproxSpaces {
        machine: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "1/100")]
        delta: String,
        #[arg(long, default_value_t = 8)]
        tmax: usize,
    },
    /// Blind prefix codewords for a length sequence.
    Code {
        #[arg(long, value_delimiter = ',', required = true)]
        lengths: Vec<usize>,
    },
    /// Encode a halting input as codeword plus compressed payload.
    Encode {
        machine: PathBuf,
        #[arg(long, conflicts_with = "vector")]
        input: Option<String>,
        #[arg(long)]
        vector: Option<String>,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[arg(long)]
        eps0: Option<String>,
        #[arg(long, default_value_t = 32)]
        tmax: usize,
        /// Decoding accuracy for the fine-tuning cascade (approx mode).
        #[arg(long, default_value = "1/10000")]
        delta: String,
    },
    /// Decode a program file and print the output.
    Decode {
        program: PathBuf,
        /// 0 asks for exact decoding.
        #[arg(long, default_value = "0")]
        delta: String,
        #[arg(long, default_value_t = 32)]
        tmax: usize,
    },
    /// Upper bound on QC^δ (or QC with --kmax) over a searched set.
    QcBound {
        machine: PathBuf,
        /// Classical target string.
        #[arg(long, conflicts_with = "target_vector")]
        target: Option<String>,
        #[arg(long)]
        target_vector: Option<String>,
        #[arg(long, default_value = "1/10")]
        delta: String,
        /// Longest classical candidate.
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        /// Approximation-scheme mode: all k ≤ kmax.
        #[arg(long)]
        kmax: Option<u64>,
        #[arg(long, value_enum, default_value_t = ParamArg::Encoded)]
        param: ParamArg,
        /// Extra candidate inputs (`nsq …` or `surd …` lines).
        #[arg(long = "candidate")]
        candidates: Vec<String>,
        #[arg(long, default_value_t = 32)]
        tmax: usize,
    },
    /// Quantum counting bound (log d + 4δ log 1/δ)/(1 − 4δ).
    Counting {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        delta: String,
    },
    /// Holevo χ of an ensemble of pure states.
    Chi {
        /// Pure state vectors (`nsq …` or `surd …` lines).
        #[arg(long = "state", required = true)]
        states: Vec<String>,
        /// Weights; uniform when omitted.
        #[arg(long, value_delimiter = ',')]
        weights: Vec<String>,
    },
    /// β_{ε,n}/n against the entropy rate of a source.
    Brudno {
        source: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "4,8,12,16")]
        ns: Vec<usize>,
        #[arg(long, default_value = "1/10")]
        eps: String,
    },
    /// Every invariant suite over the machines and sources of a config.
    VerifySuite {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
    },
}

/// Report text plus exit status.
pub struct Outcome {
    pub code: i32,
    pub text: String,
    /// Diagnostics for stderr rather than a report.
    pub is_error: bool,
}

fn read(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn machine(p: &Path) -> Result<QtmSpec> {
    QtmSpec::parse(&read(p)?)
}

fn number(s: &str) -> Result<Rational> {
    parse_exact(s)
}

fn input_string(input: &Option<String>, vector: &Option<String>) -> Result<QubitString> {
    match (input, vector) {
        (Some(s), None) => QubitString::classical(s),
        (None, Some(v)) => fixed_vector(v).and_then(|(n, v)| QubitString::fixed_length(n, &v)),
        _ => Err(Error::InvalidArgument("give exactly one of --input or --vector".into())),
    }
}

fn fixed_vector(line: &str) -> Result<(usize, SurdVec)> {
    let v = SurdVec::parse(line)?;
    if !v.dim().is_power_of_two() {
        return Err(Error::InvalidArgument("vector dimension is not a power of two".into()));
    }
    Ok((v.dim().trailing_zeros() as usize, v))
}

struct Report {
    format: Format,
    text: String,
}

impl Report {
    fn new(format: Format, provenance: &[(&str, String)]) -> Report {
        let mut text = String::new();
        for (k, v) in provenance {
            let _ = writeln!(text, "# {k}: {v}");
        }
        Report { format, text }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    /// A table row: tab separated in TSV mode, padded otherwise.
    fn row(&mut self, cells: &[String]) {
        let s = match self.format {
            Format::Tsv => cells.join("\t"),
            Format::Text => cells
                .iter()
                .map(|c| format!("{c:<12}"))
                .collect::<Vec<_>>()
                .join(" ")
                .trim_end()
                .to_string(),
        };
        self.line(s);
    }
}

fn prov_machine(spec: &QtmSpec, caps: &Caps, mode: &str) -> Vec<(&'static str, String)> {
    vec![
        ("machine", machine_id(spec)),
        ("caps", caps.summary()),
        ("mode", mode.to_string()),
    ]
}

/// Parses `args` (including the program name) and runs the command.
pub fn dispatch<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return Outcome {
                code,
                text: e.render().to_string(),
                is_error: code != 0,
            };
        }
    };
    let caps = match Caps::from_env().and_then(|c| match &cli.caps {
        Some(s) => c.with_overrides(s),
        None => Ok(c),
    }) {
        Ok(c) => c,
        Err(e) => {
            return Outcome {
                code: 2,
                text: format!("error: {e}\n"),
                is_error: true,
            }
        }
    };
    match execute(&cli.cmd, cli.format, &caps) {
        Ok((code, text)) => Outcome {
            code,
            text,
            is_error: false,
        },
        Err(e) => Outcome {
            code: 1,
            text: format!("error: {e}\n"),
            is_error: true,
        },
    }
}

/// Entry point of the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let output = Cli::try_parse_from(args.clone()).ok().and_then(|c| c.output);
    let out = dispatch(args);
    match (&output, out.is_error) {
        (_, true) => eprint!("{}", out.text),
        (Some(p), false) => {
            if let Err(e) = std::fs::write(p, &out.text) {
                eprintln!("error: {}: {e}", p.display());
                return 1;
            }
        }
        (None, false) => print!("{}", out.text),
    }
    out.code
}

fn execute(cmd: &Command, format: Format, caps: &Caps) -> Result<(i32, String)> {
    match cmd {
        Command::Validate { machine: p, tmax, nmax } => {
            let m = machine(p)?;
            let ok = validate_unitarity(&m, *tmax, *nmax, caps)?;
            let mut r = Report::new(format, &prov_machine(&m, caps, "exact"));
            r.line(format!("unitary: {}", if ok { "yes" } else { "no" }));
            Ok((if ok { 0 } else { 1 }, r.text))
        }
        Command::Simulate {
            machine: p,
            input,
            vector,
            tmax,
        } => {
            let m = machine(p)?;
            let sigma = input_string(input, vector)?;
            let mode = if sigma.is_exact() { "exact" } else { "float" };
            let mut r = Report::new(format, &prov_machine(&m, caps, mode));
            match halting_time(&m, &sigma, *tmax, caps)? {
                Some(t) => {
                    let out = run(&m, &sigma, t, caps)?.read_output();
                    r.line(format!("halts at t={t}, output {}", out.describe()));
                    Ok((0, r.text))
                }
                None => Err(Error::NonHalting(*tmax)),
            }
        }
        Command::HaltingSpaces {
            machine: p,
            n,
            tmax,
            dump,
        } => {
            let m = machine(p)?;
            let spaces = exact_halting_spaces(&m, *n, *tmax, caps)?;
            let mut r = Report::new(format, &prov_machine(&m, caps, "exact"));
            r.row(&["t".into(), "dim".into()]);
            let mut total = 0;
            for h in spaces.iter().filter(|h| h.dim() > 0) {
                total += h.dim();
                r.row(&[h.t.to_string(), h.dim().to_string()]);
                if *dump {
                    for line in h.dump().lines() {
                        r.line(format!("  {line}"));
                    }
                }
            }
            r.line(format!("total: {total} of {}", 1usize << n));
            Ok((0, r.text))
        }
        Command::ApproxSpaces {
            machine: p,
            n,
            delta,
            tmax,
        } => {
            let m = machine(p)?;
            let d = number(delta)?;
            let mut r = Report::new(
                format,
                &prov_machine(&m, caps, &format!("approx delta={}", format_rational(&d))),
            );
            r.row(&["t".into(), "dim".into(), "eps".into()]);
            for t in 1..=*tmax {
                let a = approx_halting_space(&m, *n, &d, t, caps)?;
                r.row(&[t.to_string(), a.dim().to_string(), format_rational(&a.eps)]);
            }
            Ok((0, r.text))
        }
        Command::Code { lengths } => {
            let code = PrefixCode::from_lengths(lengths)?;
            let mut r = Report::new(format, &[("mode", "exact".into())]);
            r.row(&["length".into(), "codeword".into()]);
            for (l, c) in lengths.iter().zip(code.codewords()) {
                r.row(&[l.to_string(), c.clone()]);
            }
            let k = kraft_sum(lengths);
            r.line(format!(
                "kraft: {}",
                if k.is_integer() {
                    k.numer().to_string()
                } else {
                    format_rational(&k)
                }
            ));
            Ok((0, r.text))
        }
        Command::Encode {
            machine: p,
            input,
            vector,
            mode,
            eps0,
            tmax,
            delta,
        } => {
            let m = machine(p)?;
            let psi = match (input, vector) {
                (Some(s), None) => {
                    let mut v = SurdVec::zeros(1 << s.len());
                    if !crate::qtm::is_binary(s) {
                        return Err(Error::InvalidArgument(format!("`{s}` is not a binary string")));
                    }
                    v.0[crate::qtm::string_index(s) + 1 - (1 << s.len())] = crate::linalg::Surd::one();
                    v
                }
                (None, Some(v)) => fixed_vector(v)?.1,
                _ => return Err(Error::InvalidArgument("give exactly one of --input or --vector".into())),
            };
            let opts = PipelineOptions {
                mode: match mode {
                    ModeArg::Exact => Mode::Exact,
                    ModeArg::Approx => Mode::Approx,
                },
                t_max: *tmax,
                eps0: eps0.as_deref().map(number).transpose()?,
                delta: number(delta)?,
            };
            let prog = encode_input(&m, &psi, &opts, caps)?;
            Ok((0, prog.to_file()))
        }
        Command::Decode { program, delta, tmax } => {
            let prog = UniversalProgram::parse(&read(program)?)?;
            let d = number(delta)?;
            let out = decode_program(&prog, &d, *tmax, caps)?;
            let mut r = Report::new(format, &prov_machine(&prog.machine, caps, &prog.mode.to_string()));
            r.line(format!("codeword: {}", prog.codeword));
            r.line(format!("quantum length: {}", prog.quantum_length()));
            r.line(format!("description bits: {}", prog.description_length()));
            r.line(format!("output: {}", out.describe()));
            Ok((0, r.text))
        }
        Command::QcBound {
            machine: p,
            target,
            target_vector,
            delta,
            max_len,
            kmax,
            param,
            candidates,
            tmax,
        } => {
            let m = machine(p)?;
            let rho = input_string(target, target_vector)?;
            let extra = candidates
                .iter()
                .map(|c| fixed_vector(c).and_then(|(n, v)| QubitString::fixed_length(n, &v)))
                .collect::<Result<Vec<_>>>()?;
            let cfg = SearchConfig {
                max_len: *max_len,
                extra,
                t_max: *tmax,
            };
            let mut r = Report::new(format, &prov_machine(&m, caps, "searched-set"));
            match kmax {
                None => {
                    let d = rat_to_f64(&number(delta)?);
                    let b = qc_upper_bound(&m, &rho, d, &cfg, caps)?;
                    r.line(format!("QC^delta (delta={d}): {b}"));
                }
                Some(k) => {
                    let mode = match param {
                        ParamArg::Encoded => ParamMode::Encoded,
                        ParamArg::Ignored => ParamMode::Ignored,
                    };
                    let b = qc_scheme_upper_bound(&m, &rho, *k, mode, &cfg, caps)?;
                    r.line(format!("QC (k <= {k}): {b}"));
                }
            }
            r.line("direction: upper bound; no lower bound is claimed");
            Ok((0, r.text))
        }
        Command::Counting { d, delta } => {
            let dl = rat_to_f64(&number(delta)?);
            let b = counting_bound(*d, dl)?;
            let mut r = Report::new(format, &[("mode", "float".into())]);
            r.line(format!("bound: {}", fmt_num(b)));
            r.line("direction: upper bound on log #(orthonormal vectors within delta of outputs)");
            Ok((0, r.text))
        }
        Command::Chi { states, weights } => {
            let vecs: Vec<_> = states
                .iter()
                .map(|s| fixed_vector(s).map(|(_, v)| v.to_c64()))
                .collect::<Result<_>>()?;
            let w: Vec<f64> = if weights.is_empty() {
                vec![1.0 / vecs.len() as f64; vecs.len()]
            } else {
                weights
                    .iter()
                    .map(|x| number(x).map(|r| rat_to_f64(&r)))
                    .collect::<Result<_>>()?
            };
            let e = Ensemble::pure(w, &vecs)?;
            let mut r = Report::new(format, &[("mode", "float".into())]);
            r.line(format!("chi: {:.6}", chi_quantity(&e)?));
            Ok((0, r.text))
        }
        Command::Brudno { source, ns, eps } => {
            let s = SourceModel::parse(&read(source)?)?;
            let e = number(eps)?;
            let mode = if s.is_diagonal() { "exact" } else { "float" };
            let mut r = Report::new(
                format,
                &[
                    ("source", s.name.clone()),
                    ("caps", caps.summary()),
                    ("mode", mode.into()),
                ],
            );
            r.row(&["n", "beta", "beta/n", "s", "gap"].map(String::from));
            for (n, b, per, rate, gap) in beta_report(&s, ns, &e, caps)? {
                r.row(&[
                    n.to_string(),
                    format!("{b:.6}"),
                    format!("{per:.6}"),
                    format!("{rate:.6}"),
                    format!("{gap:.6}"),
                ]);
            }
            Ok((0, r.text))
        }
        Command::VerifySuite { config, seed, trials } => {
            let mut cfg = match config {
                Some(p) => suite::SuiteConfig::parse(&read(p)?, p.parent().unwrap_or(Path::new(".")))?,
                None => suite::SuiteConfig::builtin(1)?,
            };
            if let Some(s) = seed {
                cfg.seed = *s;
            }
            if let Some(t) = trials {
                cfg.trials = *t;
            }
            let results = suite::run_suite(&cfg, caps);
            let mut r = Report::new(
                format,
                &[
                    ("seed", cfg.seed.to_string()),
                    ("caps", caps.summary()),
                    ("mode", "suite".into()),
                ],
            );
            for x in &results {
                r.row(&[
                    if x.passed { "PASS" } else { "FAIL" }.to_string(),
                    x.name.clone(),
                    x.detail.clone(),
                ]);
            }
            let failed = results.iter().filter(|x| !x.passed).count();
            r.line(format!("{} suites, {failed} failed", results.len()));
            Ok((if failed == 0 { 0 } else { 1 }, r.text))
        }
    }
}

/// Integers without a fraction, otherwise six decimals.
fn fmt_num(x: f64) -> String {
    if (x - x.round()).abs() < 1e-12 {
        format!("{}", x.round() as i64)
    } else {
        format!("{x:.6}")
    }
}
