use serde::{Deserialize, Serialize};

use super::words::{collect_words, Word};
use super::{Certificate, GroupSpec};
use crate::affine::AffineMap;
use crate::dynamics::{power_to_hyperbolic, profile, transversality_profiles, HyperbolicProfile};
use crate::error::Result;
use crate::sign::{extended_alpha, margulis_alpha, ProductSplit, QuadraticForm};

/// Powers beyond this are not tried when an element is not yet contracting enough.
const POWER_CAP: u64 = 64;
const MIN_TRANSVERSALITY: f64 = 1e-9;
/// Target for s when a power is needed to make an element contracting.
const S_TARGET: f64 = 0.5;

/// Where the sign comes from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SignSetting {
    Form { form: QuadraticForm },
    Product { split: ProductSplit },
}

impl SignSetting {
    pub fn from_spec(spec: &GroupSpec) -> Option<Self> {
        if let Some(split) = &spec.product_split {
            return Some(SignSetting::Product {
                split: split.clone(),
            });
        }
        let form = spec.form.as_ref()?;
        (form.p == form.q + 1).then(|| SignSetting::Form { form: form.clone() })
    }

    pub fn alpha(&self, g: &AffineMap) -> Result<f64> {
        Ok(match self {
            SignSetting::Form { form } => margulis_alpha(g, form)?.alpha,
            SignSetting::Product { split } => extended_alpha(g, split)?.alpha,
        })
    }
}

/// Two transversal hyperbolic elements with signs of opposite parity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OppositeSignCert {
    pub words: [Word; 2],
    pub word_texts: [String; 2],
    /// The certified elements are these powers of the words.
    pub exponents: [u64; 2],
    pub maps: [AffineMap; 2],
    pub alphas: [f64; 2],
    pub transversality: f64,
    pub setting: SignSetting,
}

struct Candidate {
    word: Word,
    exponent: u64,
    map: AffineMap,
    alpha: f64,
    profile: HyperbolicProfile,
}

fn candidate(
    spec: &GroupSpec,
    setting: &SignSetting,
    w: &Word,
    g: &AffineMap,
) -> Option<Candidate> {
    if w.is_empty() {
        return None;
    }
    let first = profile(g).ok()?;
    if !first.regularity(&spec.ambient).r_regular || first.degenerate {
        return None;
    }
    let (exponent, map, prof) = if first.contracting() {
        (1, g.clone(), first)
    } else {
        let n = power_to_hyperbolic(g, &spec.ambient, S_TARGET).ok()?;
        if n > POWER_CAP {
            return None;
        }
        let m = g.power(n as i64);
        let p = profile(&m).ok()?;
        (n, m, p)
    };
    if !prof.is_hyperbolic(&spec.ambient) {
        return None;
    }
    let alpha = setting.alpha(&map).ok()?;
    let scale = 1.0 + map.translation.norm();
    if alpha.abs() <= 1e-9 * scale {
        return None;
    }
    Some(Candidate {
        word: w.clone(),
        exponent,
        map,
        alpha,
        profile: prof,
    })
}

/// Length-lex first pair (by the later word, then the earlier one) of transversal
/// hyperbolic elements with α(g)·α(h) < 0. `None` means not found within budget.
pub fn opposite_sign_search(
    spec: &GroupSpec,
    max_len: usize,
    jobs: usize,
) -> Result<Option<Certificate>> {
    let Some(setting) = SignSetting::from_spec(spec) else {
        return Ok(None);
    };
    let cands = collect_words(spec, max_len, jobs, |w, g| candidate(spec, &setting, w, g))?;
    let cands: Vec<Candidate> = cands.into_iter().map(|(_, c)| c).collect();
    let names = spec.names();
    for j in 0..cands.len() {
        for i in 0..j {
            let (g, h) = (&cands[i], &cands[j]);
            if g.alpha * h.alpha >= 0.0 {
                continue;
            }
            let Ok(eps) = transversality_profiles(&g.profile, &h.profile) else {
                continue;
            };
            if eps > MIN_TRANSVERSALITY {
                return Ok(Some(Certificate::OppositeSignPair(OppositeSignCert {
                    words: [g.word.clone(), h.word.clone()],
                    word_texts: [g.word.display(&names), h.word.display(&names)],
                    exponents: [g.exponent, h.exponent],
                    maps: [g.map.clone(), h.map.clone()],
                    alphas: [g.alpha, h.alpha],
                    transversality: eps,
                    setting,
                })));
            }
        }
    }
    Ok(None)
}
