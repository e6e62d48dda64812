use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::qstring::strings_of_len;
use super::sim::Config;
use super::spec::QtmSpec;
use crate::caps::{check, Caps};
use crate::error::Result;
use crate::linalg::Surd;

/// Non-final configurations structurally reachable in fewer than `t_max`
/// steps from inputs of length at most `n_max`. `None` if some reachable
/// configuration has no rule.
fn reachable(spec: &QtmSpec, t_max: usize, n_max: usize, caps: &Caps) -> Result<Option<BTreeSet<Config>>> {
    let qf = spec.final_state();
    let mut seen = BTreeSet::new();
    let mut frontier: BTreeSet<Config> = (0..=n_max)
        .flat_map(strings_of_len)
        .map(|s| Config::initial(spec.initial(), &s))
        .collect();
    for _ in 0..t_max {
        let mut next = BTreeSet::new();
        for c in frontier {
            if c.state == qf || seen.contains(&c) {
                continue;
            }
            let Some(rules) = spec.compiled(c.state, c.cell(c.head)) else {
                return Ok(None);
            };
            for b in rules {
                next.insert(c.successor(b));
            }
            seen.insert(c);
        }
        check("reachable configurations", seen.len() as u128, caps.configs as u128)?;
        frontier = next;
    }
    Ok(Some(seen))
}

/// Exact isometry check of the one-step map on the reachable window.
pub fn validate_unitarity(spec: &QtmSpec, t_max: usize, n_max: usize, caps: &Caps) -> Result<bool> {
    let Some(configs) = reachable(spec, t_max, n_max, caps)? else {
        return Ok(false);
    };
    let configs: Vec<Config> = configs.into_iter().collect();
    let mut index: HashMap<Config, Vec<(usize, Surd)>> = HashMap::new();
    for (i, c) in configs.iter().enumerate() {
        let rules = spec.compiled(c.state, c.cell(c.head)).expect("checked above");
        let mut img: BTreeMap<Config, Surd> = BTreeMap::new();
        for b in rules {
            img.entry(c.successor(b))
                .or_insert_with(Surd::zero)
                .add_assign(&b.exact);
        }
        for (d, a) in img {
            if !a.is_zero() {
                index.entry(d).or_default().push((i, a));
            }
        }
    }
    let mut gram: HashMap<(usize, usize), Surd> = HashMap::new();
    for col in index.values() {
        for (i, a) in col {
            for (j, b) in col {
                if i <= j {
                    gram.entry((*i, *j))
                        .or_insert_with(Surd::zero)
                        .add_assign(&a.conj().mul(b));
                }
            }
        }
    }
    for i in 0..configs.len() {
        match gram.get(&(i, i)) {
            Some(d) if d.is_one() => {}
            _ => return Ok(false),
        }
    }
    Ok(gram.iter().all(|(&(i, j), v)| i == j || v.is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qtm::machines;

    #[test]
    fn validation_examples() {
        let c = Caps::default();
        assert!(validate_unitarity(&machines::identity(), 8, 3, &c).unwrap());
        assert!(!validate_unitarity(&machines::collision(), 8, 3, &c).unwrap());
        assert!(validate_unitarity(&machines::hadamard_like(), 8, 3, &c).unwrap());
        assert!(validate_unitarity(&machines::never_halting(), 8, 3, &c).unwrap());
        assert!(validate_unitarity(&machines::length_two(), 8, 3, &c).unwrap());
        assert!(validate_unitarity(&machines::split_prefix(), 8, 3, &c).unwrap());
    }
}
