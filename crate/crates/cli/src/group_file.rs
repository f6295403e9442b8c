//! Group definitions on disk.
//!
//! ```toml
//! dim = 3
//! ambient = "SO(2,1)"
//!
//! [form]
//! p = 2
//! q = 1
//!
//! [[generator]]
//! name = "g"
//! matrix = [[1.25, 0.0, 0.75], [0.0, 1.0, 0.0], [0.75, 0.0, 1.25]]
//! translation = [0.0, 1.0, 0.0]
//! ```
//!
//! `product_split = "standard"` or a `[product_split]` table with columns `v1`,
//! `v2` marks the six-dimensional product case. `builtin:<name>` in place of a
//! path loads a bundled group.

use std::f64::consts::FRAC_PI_2;

use affcert::certificates::{
    fixed_point_spec, margulis3d_example, opposite_sign_spec, product_sign_spec, GroupSpec,
};
use affcert::classification::canonical;
use affcert::dynamics::{AmbientGroup, AmbientKind};
use affcert::sign::{FormRecord, ProductSplit, QuadraticForm, SplitRecord};
use affcert::AffineMap;
use serde::{Deserialize, Serialize};

pub const BUILTINS: [&str; 4] = ["opposite-sign", "margulis3d", "fixed-point", "product"];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient: Option<String>,
    /// Overrides for the ambient group's minimal neutral and fixed dimensions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neutral_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product_split: Option<SplitSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<FormSection>,
    #[serde(rename = "generator")]
    pub generators: Vec<GeneratorSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormSection {
    pub p: usize,
    pub q: usize,
    /// Basis vectors v₁..v_p, w₁..w_q; the standard basis when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SplitSection {
    Named(String),
    Columns(SplitRecord),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSection {
    pub name: String,
    /// Row-major.
    pub matrix: Vec<Vec<f64>>,
    pub translation: Vec<f64>,
}

fn so_signature(text: &str) -> Option<(usize, usize)> {
    let inner = text.trim().strip_prefix("SO(")?.strip_suffix(')')?;
    let (p, q) = inner.split_once(',')?;
    Some((p.trim().parse().ok()?, q.trim().parse().ok()?))
}

fn sl_size(text: &str) -> Option<usize> {
    let t = text.trim();
    let t = t
        .strip_prefix("SL(")
        .and_then(|r| r.strip_suffix(')'))
        .or_else(|| {
            t.strip_prefix("SL")
                .map(|r| r.strip_suffix("(R)").unwrap_or(r))
        })?;
    t.parse().ok()
}

impl GroupFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("group files serialize")
    }

    fn ambient_group(
        &self,
        form: Option<&QuadraticForm>,
        split: bool,
    ) -> Result<AmbientGroup, String> {
        let n = self.dim;
        let base = match self.ambient.as_deref().map(str::trim) {
            None => match form {
                Some(f) => AmbientGroup::so_pq(f.p, f.q),
                None if split => AmbientGroup::product_so21_sl3(),
                None => AmbientGroup::generic(n, 0, 0),
            },
            Some("generic") => AmbientGroup::generic(n, 0, 0),
            Some(text) => {
                if let Some((p, q)) = so_signature(text) {
                    AmbientGroup::so_pq(p, q)
                } else if let Some(k) = sl_size(text) {
                    AmbientGroup::sl(k, 0)
                } else if canonical(text).is_ok_and(|c| c == "SO(2,1)×SL3(R)") {
                    AmbientGroup::product_so21_sl3()
                } else {
                    return Err(format!("unknown ambient group {text:?}"));
                }
            }
        };
        if base.dim() != n {
            return Err(format!(
                "ambient group acts on dimension {}, the file declares {n}",
                base.dim()
            ));
        }
        Ok(AmbientGroup {
            expected_neutral_dim: self.neutral_dim.unwrap_or(base.expected_neutral_dim),
            expected_fixed_dim: self.fixed_dim.unwrap_or(base.expected_fixed_dim),
            ..base
        })
    }

    pub fn to_spec(&self) -> Result<GroupSpec, String> {
        if self.generators.is_empty() {
            return Err("at least one [[generator]] is required".into());
        }
        let mut gens = Vec::new();
        for g in &self.generators {
            let bad = |what: &str| format!("generator {:?}: {what}", g.name);
            if g.matrix.len() != self.dim || g.matrix.iter().any(|r| r.len() != self.dim) {
                return Err(bad(&format!("matrix must be {0}×{0}", self.dim)));
            }
            if g.translation.len() != self.dim {
                return Err(bad(&format!("translation must have {} entries", self.dim)));
            }
            let linear =
                affcert::linalg::RealMatrix::from_fn(self.dim, self.dim, |i, j| g.matrix[i][j]);
            let t = affcert::linalg::RealVector::from_column_slice(&g.translation);
            let map = AffineMap::new(linear, t).map_err(|e| bad(&e.to_string()))?;
            gens.push(map.named(g.name.clone()));
        }
        let form = match &self.form {
            None => None,
            Some(f) => Some(match &f.basis {
                None => QuadraticForm::standard(f.p, f.q),
                Some(b) => QuadraticForm::try_from(FormRecord {
                    p: f.p,
                    q: f.q,
                    basis: b.clone(),
                })
                .map_err(|e| format!("form: {e}"))?,
            }),
        };
        if let Some(f) = &form {
            if f.dim() != self.dim {
                return Err(format!(
                    "form has dimension {}, the file declares {}",
                    f.dim(),
                    self.dim
                ));
            }
        }
        let split = match &self.product_split {
            None => None,
            Some(SplitSection::Named(s)) if s == "standard" => Some(ProductSplit::standard()),
            Some(SplitSection::Named(s)) => return Err(format!("unknown product split {s:?}")),
            Some(SplitSection::Columns(r)) => {
                Some(ProductSplit::try_from(r.clone()).map_err(|e| format!("product_split: {e}"))?)
            }
        };
        let ambient = self.ambient_group(form.as_ref(), split.is_some())?;
        GroupSpec::new(gens, ambient, form, split).map_err(|e| e.to_string())
    }

    pub fn from_spec(spec: &GroupSpec) -> Self {
        let rows = |g: &AffineMap| {
            (0..g.dim())
                .map(|i| g.linear.row(i).iter().copied().collect())
                .collect()
        };
        let (ambient, base) = match spec.ambient.kind {
            AmbientKind::SoPq { p, q } => (format!("SO({p},{q})"), AmbientGroup::so_pq(p, q)),
            AmbientKind::Sl { n } => (format!("SL({n})"), AmbientGroup::sl(n, 0)),
            AmbientKind::ProductSo21Sl3 => {
                ("SO(2,1)×SL3(R)".into(), AmbientGroup::product_so21_sl3())
            }
            AmbientKind::Generic { n } => ("generic".into(), AmbientGroup::generic(n, 0, 0)),
        };
        let differs = |a: usize, b: usize| (a != b).then_some(a);
        GroupFile {
            dim: spec.dim,
            ambient: Some(ambient),
            neutral_dim: differs(spec.ambient.expected_neutral_dim, base.expected_neutral_dim),
            fixed_dim: differs(spec.ambient.expected_fixed_dim, base.expected_fixed_dim),
            product_split: spec
                .product_split
                .as_ref()
                .map(|s| SplitSection::Columns(s.clone().into())),
            form: spec.form.as_ref().map(|f| {
                let r = FormRecord::from(f.clone());
                let standard = FormRecord::from(QuadraticForm::standard(f.p, f.q));
                FormSection {
                    p: r.p,
                    q: r.q,
                    basis: (r.basis != standard.basis).then_some(r.basis),
                }
            }),
            generators: spec
                .generators
                .iter()
                .map(|g| GeneratorSection {
                    name: g.name.clone().unwrap_or_default(),
                    matrix: rows(g),
                    translation: g.translation.iter().copied().collect(),
                })
                .collect(),
        }
    }
}

pub fn builtin(name: &str) -> Result<GroupSpec, String> {
    match name {
        "opposite-sign" => Ok(opposite_sign_spec()),
        "margulis3d" => margulis3d_example(4f64.ln(), FRAC_PI_2, 10.0).map_err(|e| e.to_string()),
        "fixed-point" => Ok(fixed_point_spec()),
        "product" => Ok(product_sign_spec()),
        _ => Err(format!(
            "unknown builtin {name:?}; available: {}",
            BUILTINS.join(", ")
        )),
    }
}

/// Loads `builtin:<name>` or a group file.
pub fn load(input: &str) -> Result<GroupSpec, String> {
    if let Some(name) = input.strip_prefix("builtin:") {
        return builtin(name);
    }
    let text = std::fs::read_to_string(input).map_err(|e| format!("{input}: {e}"))?;
    GroupFile::parse(&text)
        .and_then(|f| f.to_spec())
        .map_err(|e| format!("{input}: {e}"))
}
