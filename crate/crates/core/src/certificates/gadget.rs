//! Configuration builders for changing the sign in the six-dimensional product case.
//!
//! The first step finds four transversal hyperbolic elements whose attracting
//! lines in V₁ pair up into two planes meeting inside the timelike cone. The
//! second prepares, near each of the four lines, triples of hyperbolic elements
//! whose contracting spaces on V₂ are in general position, together with the
//! constants measuring how far any line or plane stays from them.

use serde::{Deserialize, Serialize};

use super::words::{collect_words, Word};
use super::GroupSpec;
use crate::affine::AffineMap;
use crate::dynamics::{profile, profile_linear, transversality_profiles, HyperbolicProfile};
use crate::error::{Error, Result};
use crate::linalg::{
    min_singular_value, operator_norm, restrict, split, RealMatrix, RealVector, Subspace,
};
use crate::metric::{subspace_dist, subspace_hausdorff};
use crate::sign::{ProductSplit, QuadraticForm};

const TRANSVERSAL_MIN: f64 = 1e-6;
const CONE_MARGIN: f64 = 1e-6;
const GENERAL_POSITION: f64 = 1e-6;
/// Quadruples are drawn from this many leading candidates.
const CANDIDATE_LIMIT: usize = 32;
/// Members per set collected before searching for a triple.
const MEMBER_LIMIT: usize = 12;

/// Four elements and the pairing {a, b | c, d} with (A⁺a + A⁺b) ∩ (A⁺c + A⁺d) timelike.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FourConfig {
    pub words: Vec<Word>,
    pub word_texts: Vec<String>,
    pub maps: Vec<AffineMap>,
    /// Indices into the four elements: two pairs.
    pub pairing: [[usize; 2]; 2],
    /// Spanning vector of the intersection line, in the coordinates of the (2,1) space.
    pub v: Vec<f64>,
    /// B(v,v)/‖v‖².
    pub b_ratio: f64,
}

/// The (2,1) level: the map itself for a (2,1) form, θ₁ for a product split.
enum Level {
    Form(QuadraticForm),
    Product(ProductSplit),
}

impl Level {
    fn of(spec: &GroupSpec) -> Option<Level> {
        if let Some(ps) = &spec.product_split {
            return Some(Level::Product(ps.clone()));
        }
        let f = spec.form.as_ref()?;
        (f.p == 2 && f.q == 1).then(|| Level::Form(f.clone()))
    }

    fn form(&self) -> QuadraticForm {
        match self {
            Level::Form(f) => f.clone(),
            Level::Product(ps) => ps.form_on_v1.clone(),
        }
    }

    fn matrix(&self, l: &RealMatrix) -> Option<RealMatrix> {
        match self {
            Level::Form(_) => Some(l.clone()),
            Level::Product(ps) => ps.theta1(l).ok(),
        }
    }
}

/// Profile of a (2,1)-level matrix if it is hyperbolic there.
fn level_profile(m: &RealMatrix) -> Option<HyperbolicProfile> {
    let p = profile_linear(m).ok()?;
    let (plus, minus, zero) = p.split.dims();
    (p.contracting() && plus == 1 && minus == 1 && zero == 1).then_some(p)
}

pub fn four_transversal_config(
    spec: &GroupSpec,
    max_len: usize,
    jobs: usize,
) -> Result<Option<FourConfig>> {
    let Some(level) = Level::of(spec) else {
        return Ok(None);
    };
    let form = level.form();
    let cands = collect_words(spec, max_len, jobs, |w, g| {
        if w.is_empty() {
            return None;
        }
        let m = level.matrix(&g.linear)?;
        level_profile(&m).map(|p| (g.clone(), p))
    })?;
    let cands: Vec<_> = cands.into_iter().take(CANDIDATE_LIMIT).collect();
    let k = cands.len();
    let mut trans = vec![vec![false; k]; k];
    for i in 0..k {
        for j in 0..i {
            let t = transversality_profiles(&cands[i].1 .1, &cands[j].1 .1).unwrap_or(0.0)
                > TRANSVERSAL_MIN;
            trans[i][j] = t;
            trans[j][i] = t;
        }
    }
    let names = spec.names();
    let orderings = [[[0, 1], [2, 3]], [[0, 2], [1, 3]], [[0, 3], [1, 2]]];
    for a in 0..k {
        for b in a + 1..k {
            if !trans[a][b] {
                continue;
            }
            for c in b + 1..k {
                if !trans[a][c] || !trans[b][c] {
                    continue;
                }
                for d in c + 1..k {
                    if !trans[a][d] || !trans[b][d] || !trans[c][d] {
                        continue;
                    }
                    let idx = [a, b, c, d];
                    let lines: Vec<&Subspace> =
                        idx.iter().map(|&i| &cands[i].1 .1.split.a_plus).collect();
                    for pairing in orderings {
                        let p1 = lines[pairing[0][0]].sum(lines[pairing[0][1]]);
                        let p2 = lines[pairing[1][0]].sum(lines[pairing[1][1]]);
                        let meet = p1.intersection(&p2);
                        if p1.dim() != 2 || p2.dim() != 2 || meet.dim() != 1 {
                            continue;
                        }
                        let v = meet.vectors().remove(0);
                        let ratio = form.b(&v, &v) / v.norm_squared();
                        if ratio < -CONE_MARGIN {
                            return Ok(Some(FourConfig {
                                words: idx.iter().map(|&i| cands[i].0.clone()).collect(),
                                word_texts: idx
                                    .iter()
                                    .map(|&i| cands[i].0.display(&names))
                                    .collect(),
                                maps: idx.iter().map(|&i| cands[i].1 .0.clone()).collect(),
                                pairing,
                                v: v.iter().copied().collect(),
                                b_ratio: ratio,
                            }));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Search limits for [`sign_gadget_build`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GadgetBudget {
    /// Seed words are drawn from the ball of this radius.
    pub max_len: usize,
    /// Conjugating powers n in γᵢⁿ γ γᵢ⁻ⁿ.
    pub max_conj_power: u32,
    /// Largest power k tried to bring s(gᵏ) below one.
    pub max_mix_power: u32,
    /// Mesh resolution for the infima over lines and planes.
    pub mesh: usize,
    /// Divisor applied to the infima.
    pub safety: f64,
}

impl Default for GadgetBudget {
    fn default() -> Self {
        GadgetBudget {
            max_len: 2,
            max_conj_power: 8,
            max_mix_power: 256,
            mesh: 24,
            safety: 100.0,
        }
    }
}

/// A member (γⁿ·σ·γ⁻ⁿ)ᵏ for a seed σ and a conjugator γ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GadgetMember {
    /// Spells γⁿ·σ·γ⁻ⁿ, before the power k.
    pub word: Word,
    pub word_text: String,
    pub seed: AffineMap,
    pub conjugator: AffineMap,
    pub conj_power: u32,
    pub exponent: u32,
    /// s of the member itself.
    pub s: f64,
    pub eps_hyperbolic: f64,
    /// dim A⁻(θ₂).
    pub contracting_dim_v2: usize,
}

impl GadgetMember {
    /// The member as a map. Its spectral data should be read through
    /// [`GadgetMember::seed`], since conjugation ruins the conditioning.
    pub fn map(&self) -> AffineMap {
        let c = self.conjugator.power(self.conj_power as i64);
        let c_inv = self.conjugator.power(-(self.conj_power as i64));
        c.then_unchecked(&self.seed)
            .then_unchecked(&c_inv)
            .power(self.exponent as i64)
    }
}

/// The sets S (contracting dimension 2 on V₂) and T (dimension 1) near one target line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GadgetTriple {
    /// A⁺(θ₁(γᵢ)) in V₁ coordinates.
    pub target: Vec<f64>,
    pub s_set: Vec<GadgetMember>,
    pub t_set: Vec<GadgetMember>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Gadget {
    pub triples: Vec<GadgetTriple>,
    pub delta: f64,
    pub eps: f64,
    pub q: f64,
    pub d1_s: f64,
    pub d1_t: f64,
    pub d2_s: f64,
    pub d2_t: f64,
    pub safety: f64,
}

struct Analysis {
    s: f64,
    eps: f64,
    /// A⁻(θ₁) in V₁ coordinates.
    rep1: Subspace,
    /// A⁻(θ₂) in V₂ coordinates.
    rep2: Subspace,
}

fn matrix_power(m: &RealMatrix, n: u32) -> RealMatrix {
    (0..n).fold(RealMatrix::identity(m.nrows(), m.ncols()), |acc, _| {
        &acc * m
    })
}

/// ‖(c r c⁻¹)ᵏ‖ on c·S, where r is the matrix of a map on the invariant
/// subspace S in its orthonormal basis b.
fn transported_norm(c: &RealMatrix, b: &RealMatrix, r: &RealMatrix, k: u32) -> Option<f64> {
    let t = (c * b).qr().r();
    let t_inv = crate::linalg::inverse(&t)?;
    let m = t * matrix_power(r, k) * t_inv;
    m.iter().all(|x| x.is_finite()).then(|| operator_norm(&m))
}

/// Data of (cσc⁻¹)ᵏ with c = γⁿ, carried over from σ. A±, A⁰ move by c and the
/// restricted matrices are similar to those of σ, so σ's splitting is reused.
fn analyse(
    seed: &AffineMap,
    gamma: &RealMatrix,
    n: u32,
    ps: &ProductSplit,
    k: u32,
) -> Option<Analysis> {
    let p = profile(seed).ok()?;
    let (t1, t2) = ps.blocks(&seed.linear).ok()?;
    let s1 = split(&t1).ok()?;
    let s2 = split(&t2).ok()?;
    if p.degenerate || s1.a_minus.dim() != 1 || !s2.a_zero.is_trivial() {
        return None;
    }
    let c = matrix_power(gamma, n);
    let (c1, c2) = ps.blocks(&c).ok()?;
    let sp = &p.split;
    let eps = subspace_dist(&sp.a_plus.image(&c), &sp.d_minus().image(&c))
        .ok()?
        .min(subspace_dist(&sp.a_minus.image(&c), &sp.d_plus().image(&c)).ok()?);
    let inv = crate::linalg::inverse(&seed.linear)?;
    let s_minus = transported_norm(
        &c,
        sp.a_minus.basis(),
        &restrict(&seed.linear, &sp.a_minus),
        k,
    )?;
    let s_plus = transported_norm(&c, sp.a_plus.basis(), &restrict(&inv, &sp.a_plus), k)?;
    Some(Analysis {
        s: s_minus.max(s_plus),
        eps,
        rep1: s1.a_minus.image(&c1),
        rep2: s2.a_minus.image(&c2),
    })
}

impl GadgetMember {
    fn analysis(&self, ps: &ProductSplit) -> Option<Analysis> {
        analyse(
            &self.seed,
            &self.conjugator.linear,
            self.conj_power,
            ps,
            self.exponent,
        )
    }
}

/// ‖ unit normals or directions stacked ‖: smallest singular value.
fn general_position(spaces: &[&Subspace], planes: bool) -> f64 {
    let cols: Vec<RealVector> = spaces
        .iter()
        .map(|s| {
            if planes {
                s.orthogonal_complement().vectors().remove(0)
            } else {
                s.vectors().remove(0)
            }
        })
        .collect();
    min_singular_value(&RealMatrix::from_columns(&cols))
}

fn line_of(v: &[f64]) -> Subspace {
    Subspace::span(v.len(), &[RealVector::from_column_slice(v)])
}

/// Infimum of `f` over lines of ℝ³ (given by unit vectors): mesh on a hemisphere,
/// then pattern search around the best mesh point.
fn infimum_over_lines(f: &dyn Fn(&RealVector) -> f64, mesh: usize) -> f64 {
    let dir = |theta: f64, phi: f64| {
        RealVector::from_column_slice(&[
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        ])
    };
    let m = mesh.max(4);
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..=m {
        let theta = std::f64::consts::FRAC_PI_2 * i as f64 / m as f64;
        for j in 0..2 * m {
            let phi = std::f64::consts::PI * j as f64 / m as f64;
            let v = f(&dir(theta, phi));
            if v < best.0 {
                best = (v, theta, phi);
            }
        }
    }
    let mut step = std::f64::consts::FRAC_PI_2 / m as f64;
    for _ in 0..60 {
        let mut improved = false;
        for (dt, dp) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
            let (t, p) = (best.1 + dt * step, best.2 + dp * step);
            let v = f(&dir(t, p));
            if v < best.0 {
                best = (v, t, p);
                improved = true;
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    best.0
}

fn sum_dist(u: &Subspace, spaces: &[&Subspace]) -> f64 {
    spaces
        .iter()
        .map(|s| subspace_dist(u, s).unwrap_or(0.0))
        .sum()
}

impl Gadget {
    /// Re-checks every requirement on the sets from the stored maps.
    pub fn verify(&self, split: &ProductSplit) -> std::result::Result<(), String> {
        let mut q = 0.0f64;
        for (i, tr) in self.triples.iter().enumerate() {
            let target = line_of(&tr.target);
            for (set, dim, label) in [(&tr.s_set, 2, "S"), (&tr.t_set, 1, "T")] {
                if set.len() != 3 {
                    return Err(format!("{label}_{i} does not have three members"));
                }
                let mut reps = Vec::new();
                for m in set {
                    if m.exponent == 0 {
                        return Err(format!(
                            "{label}_{i}: member {} has exponent 0",
                            m.word_text
                        ));
                    }
                    let a = m.analysis(split).ok_or_else(|| {
                        format!("{label}_{i}: member {} is not analysable", m.word_text)
                    })?;
                    let d = subspace_dist(&a.rep1, &target).map_err(|e| e.to_string())?;
                    if d >= self.delta {
                        return Err(format!(
                            "{label}_{i}: A-(theta1) of {} is {d} from the target",
                            m.word_text
                        ));
                    }
                    if !(a.s < 1.0) || a.eps < self.eps * 0.999 {
                        return Err(format!(
                            "{label}_{i}: {} is not hyperbolic enough",
                            m.word_text
                        ));
                    }
                    if a.rep2.dim() != dim {
                        return Err(format!(
                            "{label}_{i}: {} has the wrong contracting dimension on V2",
                            m.word_text
                        ));
                    }
                    q = q.max(a.s);
                    reps.push(a.rep2);
                }
                let refs: Vec<&Subspace> = reps.iter().collect();
                if general_position(&refs, dim == 2) <= GENERAL_POSITION {
                    return Err(format!(
                        "{label}_{i}: the contracting spaces on V2 are not in general position"
                    ));
                }
            }
        }
        if !(q < 1.0) || q > self.q * 1.001 {
            return Err("the recorded bound q is not met".into());
        }
        if [self.d1_s, self.d1_t, self.d2_s, self.d2_t]
            .iter()
            .any(|d| !(*d > 0.0))
        {
            return Err("a separation constant is not positive".into());
        }
        Ok(())
    }
}

struct Seed {
    word: Word,
    map: AffineMap,
}

fn collect_members(
    gamma: (&Word, &AffineMap),
    seeds: &[Seed],
    target: &Subspace,
    dim: usize,
    delta: f64,
    budget: &GadgetBudget,
    ps: &ProductSplit,
    names: &[String],
) -> Vec<(GadgetMember, Subspace)> {
    let mut out = Vec::new();
    for n in 1..=budget.max_conj_power {
        let cw = gamma.0.power(n as usize);
        for seed in seeds {
            let Some(a) = analyse(&seed.map, &gamma.1.linear, n, ps, 1) else {
                continue;
            };
            if a.rep2.dim() != dim
                || !(a.eps > 0.0)
                || subspace_dist(&a.rep1, target).map_or(true, |d| d >= delta)
            {
                continue;
            }
            // Seeds commuting with γ give the same space for every n.
            if out.iter().any(|(_, r): &(GadgetMember, Subspace)| {
                subspace_hausdorff(r, &a.rep2).map_or(true, |d| d < GENERAL_POSITION)
            }) {
                continue;
            }
            let Some((k, s)) = (1..=budget.max_mix_power).find_map(|k| {
                let s = if k == 1 {
                    Some(a.s)
                } else {
                    analyse(&seed.map, &gamma.1.linear, n, ps, k).map(|b| b.s)
                };
                s.filter(|s| *s < 1.0).map(|s| (k, s))
            }) else {
                continue;
            };
            let word = cw.concat(&seed.word).concat(&cw.inverse());
            out.push((
                GadgetMember {
                    word_text: word.display(names),
                    word,
                    seed: seed.map.clone(),
                    conjugator: gamma.1.clone(),
                    conj_power: n,
                    exponent: k,
                    s,
                    eps_hyperbolic: a.eps,
                    contracting_dim_v2: dim,
                },
                a.rep2,
            ));
            if out.len() >= MEMBER_LIMIT {
                return out;
            }
        }
    }
    out
}

fn pick_triple(members: &[(GadgetMember, Subspace)], planes: bool) -> Option<Vec<GadgetMember>> {
    let k = members.len();
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                let spaces = [&members[a].1, &members[b].1, &members[c].1];
                if general_position(&spaces, planes) > GENERAL_POSITION {
                    return Some(vec![
                        members[a].0.clone(),
                        members[b].0.clone(),
                        members[c].0.clone(),
                    ]);
                }
            }
        }
    }
    None
}

/// Builds the sets Sᵢ, Tᵢ near the attracting lines of `config` and the
/// constants d₁, d₂ as mesh infima divided by `budget.safety`.
pub fn sign_gadget_build(
    spec: &GroupSpec,
    config: &FourConfig,
    delta: f64,
    budget: &GadgetBudget,
) -> Result<Gadget> {
    let ps = spec
        .product_split
        .as_ref()
        .ok_or_else(|| Error::NotProductCompatible("the spec has no product split".into()))?;
    if !(delta > 0.0) || !(budget.safety > 0.0) {
        return Err(Error::InvalidInput(
            "delta and safety must be positive".into(),
        ));
    }
    let names = spec.names();
    let seeds: Vec<Seed> = collect_words(spec, budget.max_len, 1, |w, g| {
        (!w.is_empty() && analyse(g, &RealMatrix::identity(6, 6), 0, ps, 1).is_some())
            .then(|| g.clone())
    })?
    .into_iter()
    .map(|(word, map)| Seed { word, map })
    .collect();

    let mut triples = Vec::new();
    for (i, (w, g)) in config.words.iter().zip(&config.maps).enumerate() {
        let t1 = ps.theta1(&g.linear)?;
        let target = split(&t1)?.a_plus;
        let mut sets = Vec::new();
        for (dim, label) in [(2, "S"), (1, "T")] {
            let members = collect_members((w, g), &seeds, &target, dim, delta, budget, ps, &names);
            let triple = pick_triple(&members, dim == 2).ok_or_else(|| {
                Error::BudgetExhausted(format!("no set {label}_{i} within budget"))
            })?;
            sets.push(triple);
        }
        let t_set = sets.pop().expect("two sets");
        let s_set = sets.pop().expect("two sets");
        triples.push(GadgetTriple {
            target: target.vectors()[0].iter().copied().collect(),
            s_set,
            t_set,
        });
    }

    let all = |pick: fn(&GadgetTriple) -> &Vec<GadgetMember>| -> Vec<Analysis> {
        triples
            .iter()
            .flat_map(|t| pick(t).iter())
            .filter_map(|m| m.analysis(ps))
            .collect()
    };
    let s_an = all(|t| &t.s_set);
    let t_an = all(|t| &t.t_set);
    let everything = s_an.iter().chain(&t_an);
    let eps = everything
        .clone()
        .map(|a| a.eps)
        .fold(f64::INFINITY, f64::min);
    let q = everything.map(|a| a.s).fold(0.0, f64::max);

    let rep1 = |v: &[Analysis]| v.iter().map(|a| a.rep1.clone()).collect::<Vec<_>>();
    let rep2 = |v: &[Analysis]| v.iter().map(|a| a.rep2.clone()).collect::<Vec<_>>();
    let lines_inf = |spaces: Vec<Subspace>, as_plane: bool| {
        let refs: Vec<&Subspace> = spaces.iter().collect();
        infimum_over_lines(
            &|u: &RealVector| {
                let line = Subspace::span(3, std::slice::from_ref(u));
                let probe = if as_plane {
                    line.orthogonal_complement()
                } else {
                    line
                };
                sum_dist(&probe, &refs)
            },
            budget.mesh,
        ) / budget.safety
    };
    let gadget = Gadget {
        d1_s: lines_inf(rep1(&s_an), false),
        d1_t: lines_inf(rep1(&t_an), false),
        d2_s: lines_inf(rep2(&s_an), false),
        d2_t: lines_inf(rep2(&t_an), true),
        triples,
        delta,
        eps,
        q,
        safety: budget.safety,
    };
    gadget.verify(ps).map_err(Error::BudgetExhausted)?;
    Ok(gadget)
}
