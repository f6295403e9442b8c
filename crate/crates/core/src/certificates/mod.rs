//! Group-level procedures over words in the generators and the certificates they emit.

mod check;
pub mod exact;
mod gadget;
mod scan;
mod screen;
mod search;
mod specs;
mod witness;
mod words;

use serde::{Deserialize, Serialize};

use crate::affine::AffineMap;
use crate::dynamics::AmbientGroup;
use crate::error::{Error, Result};
use crate::sign::{ProductSplit, QuadraticForm};

pub use gadget::{
    four_transversal_config, sign_gadget_build, FourConfig, Gadget, GadgetBudget, GadgetMember,
    GadgetTriple,
};
pub use scan::{
    ball_image_distance, direction_set_estimate, proper_scan, DirectionEntry, DirectionSample,
    ScanCert, ScanEntry,
};
pub use screen::{eigenvalue_one_screen, FixedPointCert};
pub use search::{opposite_sign_search, OppositeSignCert, SignSetting};
pub use specs::{fixed_point_spec, margulis3d_example, opposite_sign_spec, product_sign_spec};
pub use witness::{nonproper_witness, WitnessCert, WitnessEntry, WitnessMode};
pub use words::{collect_words, enumerate_words, Word, MAX_WORD_LEN};

/// A finitely generated affine group given by generators.
#[derive(Debug, Clone)]
pub struct GroupSpec {
    pub dim: usize,
    pub generators: Vec<AffineMap>,
    pub ambient: AmbientGroup,
    pub form: Option<QuadraticForm>,
    pub product_split: Option<ProductSplit>,
}

const FORM_TOL: f64 = 1e-7;

impl GroupSpec {
    /// Validates dimensions and form preservation; unnamed generators get letters a, b, c, ….
    pub fn new(
        generators: Vec<AffineMap>,
        ambient: AmbientGroup,
        form: Option<QuadraticForm>,
        product_split: Option<ProductSplit>,
    ) -> Result<Self> {
        let dim = generators
            .first()
            .map(|g| g.dim())
            .ok_or_else(|| Error::InvalidInput("no generators".into()))?;
        let mut gens = Vec::with_capacity(generators.len());
        for (i, g) in generators.into_iter().enumerate() {
            if g.dim() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    found: g.dim(),
                });
            }
            let name = g.name.clone().unwrap_or_else(|| default_name(i));
            if name.is_empty() || name.contains(char::is_whitespace) || name.contains('^') {
                return Err(Error::InvalidInput(format!("bad generator name {name:?}")));
            }
            if gens
                .iter()
                .any(|h: &AffineMap| h.name.as_deref() == Some(name.as_str()))
            {
                return Err(Error::InvalidInput(format!(
                    "duplicate generator name {name:?}"
                )));
            }
            if let Some(f) = &form {
                if f.dim() != dim {
                    return Err(Error::DimMismatch {
                        expected: dim,
                        found: f.dim(),
                    });
                }
                let r = f.isometry_residual(&g.linear);
                if r >= FORM_TOL {
                    return Err(Error::NotIsometry { residual: r });
                }
            }
            if let Some(ps) = &product_split {
                if dim != 6 {
                    return Err(Error::DimMismatch {
                        expected: 6,
                        found: dim,
                    });
                }
                let t1 = ps.theta1(&g.linear)?;
                let r = ps.form_on_v1.isometry_residual(&t1);
                if r >= FORM_TOL {
                    return Err(Error::NotIsometry { residual: r });
                }
            }
            gens.push(g.named(name));
        }
        Ok(GroupSpec {
            dim,
            generators: gens,
            ambient,
            form,
            product_split,
        })
    }

    pub fn names(&self) -> Vec<String> {
        self.generators
            .iter()
            .map(|g| g.name.clone().unwrap_or_default())
            .collect()
    }

    /// Conjugates every generator by `t`, transporting the form as well.
    pub fn conjugate_by(&self, t: &AffineMap) -> Result<GroupSpec> {
        let gens = self
            .generators
            .iter()
            .map(|g| {
                let mut c = g.conjugate_by(t);
                c.name = g.name.clone();
                c
            })
            .collect();
        let form = match &self.form {
            Some(f) => Some(QuadraticForm::with_basis(f.p, f.q, &t.linear * f.basis())?),
            None => None,
        };
        GroupSpec::new(gens, self.ambient, form, self.product_split.clone())
    }
}

fn default_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("g{i}")
    }
}

/// A machine-checkable record.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Certificate {
    FixedPointViolation(FixedPointCert),
    OppositeSignPair(OppositeSignCert),
    BallIntersectionWitness(WitnessCert),
    EvidenceScan(ScanCert),
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::FixedPointViolation(_) => "FixedPointViolation",
            Certificate::OppositeSignPair(_) => "OppositeSignPair",
            Certificate::BallIntersectionWitness(_) => "BallIntersectionWitness",
            Certificate::EvidenceScan(_) => "EvidenceScan",
        }
    }

    /// Re-checks the certificate from its own payload.
    pub fn verify(&self) -> std::result::Result<(), String> {
        match self {
            Certificate::FixedPointViolation(c) => check::fixed_point(c),
            Certificate::OppositeSignPair(c) => check::opposite_sign(c),
            Certificate::BallIntersectionWitness(c) => check::witness(c),
            Certificate::EvidenceScan(c) => check::scan(c),
        }
    }
}
