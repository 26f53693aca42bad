//! Generator words, their shuffle images, and graded span tables.
//!
//! A word is a sequence of generators x_{k,r}; its image is the left-to-right
//! shuffle product. The filtration degree of a word is the sum of its modes;
//! span tables record, per weight, the rank of all word images with degree
//! <= d as d grows. Enumeration shares prefixes, so each distinct prefix
//! product is computed once.

use alloc::vec::Vec;
use core::fmt;

use crate::quiver::{DimVec, Quiver};
use crate::rank::{rank_profile, row_from_poly};
use crate::rng::SplitMix64;
use crate::shuffle::{shuffle_mul, ShuffleElement};
use crate::{Budget, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GeneratorWord(pub Vec<(usize, u32)>);

impl GeneratorWord {
    pub fn weight(&self, n_vertices: usize) -> DimVec {
        let mut v = DimVec::zero(n_vertices);
        for &(k, _) in &self.0 {
            v.0[k] += 1;
        }
        v
    }

    /// Filtration degree: the sum of the modes.
    pub fn fdeg(&self) -> u32 {
        self.0.iter().map(|&(_, r)| r).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (k, r)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "x({k},{r})")?;
        }
        Ok(())
    }
}

/// Image of a word under the generator assignment, multiplied left to right.
pub fn psi_image(word: &GeneratorWord, q: &Quiver) -> Result<ShuffleElement> {
    let n = q.vertex_count();
    let mut acc = ShuffleElement::one(n);
    for &(k, r) in &word.0 {
        acc = shuffle_mul(&acc, &ShuffleElement::generator(n, k, r), q)?;
    }
    Ok(acc)
}

/// Every word of the given weight with fdeg <= max_fdeg, with its image.
/// Products are built along the enumeration tree (one multiplication per
/// tree edge), so shared prefixes cost nothing extra.
pub fn words_with_images(
    q: &Quiver,
    weight: &DimVec,
    max_fdeg: u32,
    budget: &Budget,
) -> Result<Vec<(GeneratorWord, ShuffleElement)>> {
    budget.check_weight(weight.norm1(), "word enumeration")?;
    budget.check_fdeg(max_fdeg, "word enumeration")?;
    let n = q.vertex_count();
    let mut out = Vec::new();
    let mut remaining = weight.clone();
    let mut word: Vec<(usize, u32)> = Vec::new();
    rec(
        q,
        &ShuffleElement::one(n),
        &mut remaining,
        max_fdeg,
        &mut word,
        &mut out,
    )?;
    return Ok(out);

    fn rec(
        q: &Quiver,
        acc: &ShuffleElement,
        remaining: &mut DimVec,
        deg_left: u32,
        word: &mut Vec<(usize, u32)>,
        out: &mut Vec<(GeneratorWord, ShuffleElement)>,
    ) -> Result<()> {
        if remaining.is_zero() {
            out.push((GeneratorWord(word.clone()), acc.clone()));
            return Ok(());
        }
        let n = q.vertex_count();
        for k in 0..n {
            if remaining.get(k) == 0 {
                continue;
            }
            remaining.0[k] -= 1;
            for r in 0..=deg_left {
                let next = shuffle_mul(acc, &ShuffleElement::generator(n, k, r), q)?;
                word.push((k, r));
                rec(q, &next, remaining, deg_left - r, word, out)?;
                word.pop();
            }
            remaining.0[k] += 1;
        }
        Ok(())
    }
}

/// Span table of one weight piece: per filtration degree d, the dimension of
/// the span of all word images with fdeg <= d, computed as an exact rank
/// over Q(h).
#[derive(Clone, Debug)]
pub struct SpanTable {
    pub weight: DimVec,
    pub max_fdeg: u32,
    /// Number of words with fdeg exactly d, d = 0..=max_fdeg.
    pub words_per_degree: Vec<usize>,
    /// Cumulative dimension of F_d, d = 0..=max_fdeg.
    pub dims: Vec<usize>,
}

pub fn spherical_span(
    q: &Quiver,
    weight: &DimVec,
    max_fdeg: u32,
    budget: &Budget,
    rng: &mut SplitMix64,
) -> Result<SpanTable> {
    let all = words_with_images(q, weight, max_fdeg, budget)?;
    let mut groups: Vec<Vec<crate::rank::Row>> = alloc::vec![Vec::new(); max_fdeg as usize + 1];
    let mut words_per_degree = alloc::vec![0usize; max_fdeg as usize + 1];
    for (w, img) in &all {
        let d = w.fdeg() as usize;
        groups[d].push(row_from_poly(img.poly()));
        words_per_degree[d] += 1;
    }
    let dims = rank_profile(&groups, rng)?;
    Ok(SpanTable { weight: weight.clone(), max_fdeg, words_per_degree, dims })
}

/// Words of one exact total weight and exact filtration degree, convenience
/// for relation instances.
pub fn words_of_degree(
    q: &Quiver,
    weight: &DimVec,
    fdeg: u32,
    budget: &Budget,
) -> Result<Vec<(GeneratorWord, ShuffleElement)>> {
    Ok(words_with_images(q, weight, fdeg, budget)?
        .into_iter()
        .filter(|(w, _)| w.fdeg() == fdeg)
        .collect())
}
