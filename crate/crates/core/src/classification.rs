//! Lookup of candidate semisimple parts by dimension, backed by a bundled table.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DATA: &str = include_str!("../data/classification.toml");

/// Simple factors understood by the lookup, in canonical spelling and order.
const FACTORS: [&str; 14] = [
    "SO(3,2)", "SO(2,1)", "SO(3)", "SO(5)", "SL2(R)", "SL3(R)", "SL4(R)", "SL5(R)", "SL6(R)",
    "Sp4(R)", "Sp6(R)", "SL2(C)", "SL3(C)", "SO3(C)",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Regular elements have no eigenvalue one on V₁.
    NoUnit,
    /// Regular elements have eigenvalue one on V₁.
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    NotProper,
    NotCrystallographic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    PossibleLinearPart {
        family: Family,
        item: u8,
        v1_dim: usize,
        outcome: Outcome,
    },
    Excluded {
        reason: String,
    },
    NotInTables,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::PossibleLinearPart {
                family,
                item,
                v1_dim,
                outcome,
            } => {
                let family = match family {
                    Family::NoUnit => "no unit eigenvalue",
                    Family::Unit => "unit eigenvalue",
                };
                let outcome = match outcome {
                    Outcome::NotProper => "not properly discontinuous",
                    Outcome::NotCrystallographic => "not crystallographic",
                };
                write!(
                    f,
                    "possible linear part ({family}, item {item}, dim V1 = {v1_dim}); {outcome}"
                )
            }
            Verdict::Excluded { reason } => write!(f, "excluded: {reason}"),
            Verdict::NotInTables => write!(f, "not in tables"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Lookup {
    pub dim: usize,
    /// Canonical spelling of the descriptor.
    pub group: String,
    pub verdict: Verdict,
}

#[derive(Deserialize)]
struct PossibleRow {
    group: String,
    family: Family,
    item: u8,
    v1_dim: usize,
    dims: Vec<usize>,
    outcome: Outcome,
}

#[derive(Deserialize)]
struct ExcludedRow {
    group: String,
    dims: Vec<usize>,
    reason: String,
}

#[derive(Deserialize)]
struct Table {
    possible: Vec<PossibleRow>,
    excluded: Vec<ExcludedRow>,
}

fn table() -> &'static BTreeMap<(String, usize), Verdict> {
    static TABLE: OnceLock<BTreeMap<(String, usize), Verdict>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let raw: Table = toml::from_str(DATA).expect("bundled classification table parses");
        let mut map = BTreeMap::new();
        for r in raw.possible {
            let key = canonical(&r.group).expect("bundled descriptor");
            for d in r.dims {
                let v = Verdict::PossibleLinearPart {
                    family: r.family,
                    item: r.item,
                    v1_dim: r.v1_dim,
                    outcome: r.outcome,
                };
                map.insert((key.clone(), d), v);
            }
        }
        for r in raw.excluded {
            let key = canonical(&r.group).expect("bundled descriptor");
            for d in r.dims {
                map.entry((key.clone(), d)).or_insert(Verdict::Excluded {
                    reason: r.reason.clone(),
                });
            }
        }
        map
    })
}

fn canonical_factor(s: &str) -> Option<&'static str> {
    let squash = |t: &str| -> String {
        t.chars()
            .filter(|c| !matches!(c, '_' | '(' | ')' | ',' | ' '))
            .collect::<String>()
            .to_ascii_lowercase()
    };
    let key = squash(s);
    FACTORS.iter().copied().find(|f| {
        let k = squash(f);
        // A bare SLn or Spn means the real form.
        key == k || (k.ends_with('r') && key == k[..k.len() - 1])
    })
}

/// Canonical spelling of a descriptor such as `SO(2,1) × SL3(R)`; factors may be
/// joined by `×`, `x` or `*` and are put in a fixed order.
pub fn canonical(descriptor: &str) -> Result<String> {
    let unknown = || Error::UnknownDescriptor(descriptor.to_string());
    let text = descriptor.trim().replace('×', "*");
    // A letter x separates factors after a closing bracket or between spaces.
    let text = [")x", ")X", " x ", " X "].iter().fold(text, |t, sep| {
        t.replace(sep, if sep.starts_with(')') { ")*" } else { "*" })
    });
    let mut factors = Vec::new();
    for part in text.split('*') {
        let part = part.trim();
        if part.is_empty() {
            return Err(unknown());
        }
        factors.push(canonical_factor(part).ok_or_else(unknown)?);
    }
    factors.sort_by_key(|f| FACTORS.iter().position(|g| g == f));
    Ok(factors.join("×"))
}

/// Looks up the semisimple part `descriptor` acting on ℝ^dim.
pub fn classification_lookup(dim: usize, descriptor: &str) -> Result<Lookup> {
    if !(1..=6).contains(&dim) {
        return Err(Error::InvalidInput(format!(
            "dimension {dim} is outside 1..=6"
        )));
    }
    let group = canonical(descriptor)?;
    let verdict = table()
        .get(&(group.clone(), dim))
        .cloned()
        .unwrap_or(Verdict::NotInTables);
    Ok(Lookup {
        dim,
        group,
        verdict,
    })
}

/// Every tabulated (group, dimension) pair, one line each, ordered by
/// dimension and then group.
pub fn table_report() -> String {
    let mut rows: Vec<(&(String, usize), &Verdict)> = table().iter().collect();
    rows.sort_by(|a, b| (a.0 .1, &a.0 .0).cmp(&(b.0 .1, &b.0 .0)));
    rows.iter()
        .map(|((g, d), v)| format!("{d} {g}: {v}\n"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_spellings() {
        assert_eq!(canonical("SL3(R)×SO(2,1)").unwrap(), "SO(2,1)×SL3(R)");
        assert_eq!(canonical("sl3 x so(2,1)").unwrap(), "SO(2,1)×SL3(R)");
        assert_eq!(canonical("SO(2,1)xSL_3(R)").unwrap(), "SO(2,1)×SL3(R)");
        assert_eq!(canonical("SL3").unwrap(), "SL3(R)");
        assert!(canonical("G2").is_err());
        assert!(canonical("").is_err());
    }

    #[test]
    fn table_loads() {
        assert!(table().len() > 13);
    }
}
