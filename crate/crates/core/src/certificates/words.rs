use std::cmp::Ordering;
use std::fmt::Write as _;
use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::GroupSpec;
use crate::affine::AffineMap;
use crate::error::{Error, Result};

pub const MAX_WORD_LEN: usize = 16;

/// A freely reduced word. Letter `k > 0` is generator `k − 1`, `−k` its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<i32>);

fn rank(letter: i32) -> usize {
    2 * (letter.unsigned_abs() as usize - 1) + usize::from(letter < 0)
}

fn letter_of_rank(r: usize) -> i32 {
    let g = (r / 2 + 1) as i32;
    if r.is_multiple_of(2) {
        g
    } else {
        -g
    }
}

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }

    /// Concatenation followed by free reduction.
    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        for &l in &other.0 {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn power(&self, n: usize) -> Word {
        let mut w = Word::identity();
        for _ in 0..n {
            w = w.concat(self);
        }
        w
    }

    /// Length-lexicographic order with letters ordered a, a⁻¹, b, b⁻¹, ….
    pub fn shortlex_cmp(&self, other: &Word) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            self.0
                .iter()
                .map(|&l| rank(l))
                .cmp(other.0.iter().map(|&l| rank(l)))
        })
    }

    pub fn validate(&self, generators: usize) -> Result<()> {
        for w in self.0.windows(2) {
            if w[0] == -w[1] {
                return Err(Error::InvalidWord("not freely reduced".into()));
            }
        }
        if self
            .0
            .iter()
            .any(|&l| l == 0 || l.unsigned_abs() as usize > generators)
        {
            return Err(Error::InvalidWord("letter out of range".into()));
        }
        Ok(())
    }

    /// The element l₁ ∘ l₂ ∘ … ∘ l_k.
    pub fn evaluate(&self, spec: &GroupSpec) -> Result<AffineMap> {
        self.validate(spec.generators.len())?;
        let letters = letter_maps(spec);
        let mut acc = AffineMap::identity(spec.dim);
        for &l in &self.0 {
            acc = acc.then_unchecked(&letters[rank(l)]);
        }
        Ok(acc)
    }

    /// Text form such as `a b a^-1`; the identity prints as `e`.
    pub fn display(&self, names: &[String]) -> String {
        if self.is_empty() {
            return "e".into();
        }
        let mut s = String::new();
        for (i, &l) in self.0.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            let name = names
                .get(l.unsigned_abs() as usize - 1)
                .map_or("?", |x| x.as_str());
            s.push_str(name);
            if l < 0 {
                let _ = write!(s, "^-1");
            }
        }
        s
    }

    /// Parses whitespace-separated letters `x`, `x^-1` or `x^k` for integer k.
    pub fn parse(text: &str, names: &[String]) -> Result<Word> {
        let mut w = Word::identity();
        for tok in text.split_whitespace() {
            if tok == "e" && !names.iter().any(|n| n == "e") {
                continue;
            }
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => (
                    n,
                    e.parse::<i32>()
                        .map_err(|_| Error::InvalidWord(format!("bad exponent in {tok:?}")))?,
                ),
                None => (tok, 1),
            };
            let idx = names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::InvalidWord(format!("unknown generator {name:?}")))?;
            let letter = (idx + 1) as i32 * exp.signum();
            for _ in 0..exp.unsigned_abs() {
                w = w.concat(&Word(vec![letter]));
            }
        }
        Ok(w)
    }
}

fn letter_maps(spec: &GroupSpec) -> Vec<AffineMap> {
    let mut out = Vec::with_capacity(2 * spec.generators.len());
    for g in &spec.generators {
        out.push(g.clone());
        out.push(g.inverse());
    }
    out
}

fn check_len(max_len: usize) -> Result<()> {
    if max_len > MAX_WORD_LEN {
        return Err(Error::BallTooLarge(max_len));
    }
    Ok(())
}

/// Depth-first walk over reduced words of exactly `len` letters starting with `first`
/// (by rank), in lexicographic order.
fn walk<F>(letters: &[AffineMap], first: usize, len: usize, visit: &mut F) -> ControlFlow<()>
where
    F: FnMut(&Word, &AffineMap) -> ControlFlow<()>,
{
    fn rec<F>(
        letters: &[AffineMap],
        len: usize,
        word: &mut Vec<i32>,
        prefix: &AffineMap,
        visit: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&Word, &AffineMap) -> ControlFlow<()>,
    {
        if word.len() == len {
            return visit(&Word(word.clone()), prefix);
        }
        let last = *word.last().expect("nonempty prefix");
        for r in 0..letters.len() {
            let l = letter_of_rank(r);
            if l == -last {
                continue;
            }
            word.push(l);
            let next = prefix.then_unchecked(&letters[r]);
            let flow = rec(letters, len, word, &next, visit);
            word.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }
    let mut word = vec![letter_of_rank(first)];
    rec(letters, len, &mut word, &letters[first].clone(), visit)
}

/// Visits every freely reduced word of length ≤ `max_len` once, in length-lex order,
/// starting with the identity. The visitor may stop the walk early.
pub fn enumerate_words<F>(spec: &GroupSpec, max_len: usize, mut visit: F) -> Result<()>
where
    F: FnMut(&Word, &AffineMap) -> ControlFlow<()>,
{
    check_len(max_len)?;
    if visit(&Word::identity(), &AffineMap::identity(spec.dim)).is_break() {
        return Ok(());
    }
    let letters = letter_maps(spec);
    for len in 1..=max_len {
        for first in 0..letters.len() {
            if walk(&letters, first, len, &mut visit).is_break() {
                return Ok(());
            }
        }
    }
    Ok(())
}

/// Maps `f` over the ball of radius `max_len` and keeps the `Some` results in
/// length-lex order. With `jobs > 1` the subtrees under each first letter run in
/// parallel; the merged output is identical to the serial one.
pub fn collect_words<T, F>(
    spec: &GroupSpec,
    max_len: usize,
    jobs: usize,
    f: F,
) -> Result<Vec<(Word, T)>>
where
    T: Send,
    F: Fn(&Word, &AffineMap) -> Option<T> + Sync,
{
    check_len(max_len)?;
    if jobs <= 1 {
        let mut out = Vec::new();
        enumerate_words(spec, max_len, |w, g| {
            if let Some(v) = f(w, g) {
                out.push((w.clone(), v));
            }
            ControlFlow::Continue(())
        })?;
        return Ok(out);
    }
    let letters = letter_maps(spec);
    let subtree = |first: usize| -> Vec<(Word, T)> {
        let mut out = Vec::new();
        for len in 1..=max_len {
            let _ = walk(&letters, first, len, &mut |w: &Word, g: &AffineMap| {
                if let Some(v) = f(w, g) {
                    out.push((w.clone(), v));
                }
                ControlFlow::Continue(())
            });
        }
        out
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    let parts: Vec<Vec<(Word, T)>> =
        pool.install(|| (0..letters.len()).into_par_iter().map(subtree).collect());
    let mut out = Vec::new();
    let id = Word::identity();
    if let Some(v) = f(&id, &AffineMap::identity(spec.dim)) {
        out.push((id, v));
    }
    out.extend(parts.into_iter().flatten());
    out.sort_by(|a, b| a.0.shortlex_cmp(&b.0));
    Ok(out)
}
