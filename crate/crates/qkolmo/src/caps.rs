//! Resource caps. Every cap violation is reported as [`Error::CapExceeded`];
//! nothing is truncated silently. Defaults can be raised through the
//! `QKOLMO_CAPS` environment variable, e.g. `QKOLMO_CAPS="n_exact=8,t=128"`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Input length for net-based algorithms (balls, approximate spaces).
    pub n_net: usize,
    /// Input length for exact kernels.
    pub n_exact: usize,
    /// Simulation horizon.
    pub t: usize,
    /// Cover representatives per approximate-space pass.
    pub reps: u64,
    /// Net points per ball test.
    pub net: u64,
    /// Candidate subspaces in the brute-force interpolation search.
    pub search: u64,
    /// Configurations per evolved column.
    pub configs: usize,
    /// Local-density length for diagonal sources.
    pub n_diag: usize,
    /// Local-density length for general iid sources.
    pub n_general: usize,
    /// Matrix side 2^{ln} for symmetric-subspace constructions.
    pub sym_side: usize,
    /// Accuracy halvings in the approximate-space loop.
    pub halvings: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            n_net: 3,
            n_exact: 6,
            t: 64,
            reps: 5_000_000,
            net: 2_000_000,
            search: 20_000_000,
            configs: 1 << 20,
            n_diag: 16,
            n_general: 12,
            sym_side: 256,
            halvings: 12,
        }
    }
}

impl Caps {
    /// Defaults overridden by `QKOLMO_CAPS` when it is set and well formed.
    pub fn from_env() -> Result<Caps> {
        match std::env::var("QKOLMO_CAPS") {
            Ok(s) if !s.trim().is_empty() => Caps::default().with_overrides(&s),
            _ => Ok(Caps::default()),
        }
    }

    pub fn with_overrides(mut self, spec: &str) -> Result<Caps> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("bad cap entry `{item}`")))?;
            let v: u64 = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad cap value `{item}`")))?;
            match k.trim() {
                "n_net" => self.n_net = v as usize,
                "n_exact" => self.n_exact = v as usize,
                "t" => self.t = v as usize,
                "reps" => self.reps = v,
                "net" => self.net = v,
                "search" => self.search = v,
                "configs" => self.configs = v as usize,
                "n_diag" => self.n_diag = v as usize,
                "n_general" => self.n_general = v as usize,
                "sym_side" => self.sym_side = v as usize,
                "halvings" => self.halvings = v as usize,
                other => return Err(Error::InvalidArgument(format!("unknown cap `{other}`"))),
            }
        }
        Ok(self)
    }

    pub fn summary(&self) -> String {
        format!(
            "n_net={} n_exact={} t={} reps={} net={} search={} configs={} n_diag={} n_general={} sym_side={} halvings={}",
            self.n_net,
            self.n_exact,
            self.t,
            self.reps,
            self.net,
            self.search,
            self.configs,
            self.n_diag,
            self.n_general,
            self.sym_side,
            self.halvings
        )
    }
}

pub(crate) fn check(what: &'static str, value: u128, cap: u128) -> Result<()> {
    if value > cap {
        Err(Error::CapExceeded { what, value, cap })
    } else {
        Ok(())
    }
}
