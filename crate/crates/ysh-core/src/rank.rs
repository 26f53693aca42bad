//! Exact ranks of monomial-indexed matrices over Q(h).
//!
//! Rows are sparse maps from a column key (a monomial in the slot variables)
//! to a univariate polynomial in h. Elimination is fraction-free: a new row
//! is combined with pivot rows by cross-multiplication only, then stripped of
//! its polynomial and rational content, so no entry ever leaves Q[h].
//!
//! Every symbolic rank is cross-checked against Gaussian elimination at
//! several random rational values of h. Specialization can only lose rank
//! (minors that vanish identically stay zero), so agreement at one point
//! certifies the symbolic answer.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::poly::{Mono, Poly, Var};
use crate::rng::SplitMix64;
use crate::scalar::Rat;
use crate::{Error, Result};

/// Dense univariate polynomial in h over Q; ascending coefficients, trimmed.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct UniPoly {
    c: Vec<Rat>,
}

impl UniPoly {
    pub fn zero() -> UniPoly {
        UniPoly { c: Vec::new() }
    }

    pub fn constant(r: Rat) -> UniPoly {
        UniPoly::from_coeffs(alloc::vec![r])
    }

    pub fn from_coeffs(c: Vec<Rat>) -> UniPoly {
        let mut p = UniPoly { c };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.c.last().is_some_and(|r| r.is_zero()) {
            self.c.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Rat> {
        self.c.last()
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.c
    }

    pub fn add(&self, o: &UniPoly) -> UniPoly {
        let mut c = alloc::vec![Rat::zero(); self.c.len().max(o.c.len())];
        for (i, r) in self.c.iter().enumerate() {
            c[i] += r;
        }
        for (i, r) in o.c.iter().enumerate() {
            c[i] += r;
        }
        UniPoly::from_coeffs(c)
    }

    pub fn sub(&self, o: &UniPoly) -> UniPoly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly { c: self.c.iter().map(|r| -r.clone()).collect() }
    }

    pub fn mul(&self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let mut c = alloc::vec![Rat::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        UniPoly::from_coeffs(c)
    }

    pub fn scale(&self, r: &Rat) -> UniPoly {
        if r.is_zero() {
            return UniPoly::zero();
        }
        UniPoly { c: self.c.iter().map(|x| x * r).collect() }
    }

    pub fn eval(&self, at: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for r in self.c.iter().rev() {
            acc = acc * at + r;
        }
        acc
    }

    /// Euclidean remainder over the field Q.
    fn rem(&self, d: &UniPoly) -> UniPoly {
        debug_assert!(!d.is_zero());
        let mut r = self.clone();
        while let (Some(dr), Some(dd)) = (r.degree(), d.degree()) {
            if dr < dd {
                break;
            }
            let q = r.lead().unwrap() / d.lead().unwrap();
            let shift = dr - dd;
            for i in 0..=dd {
                let t = &d.c[i] * &q;
                r.c[i + shift] -= t;
            }
            r.trim();
        }
        r
    }

    /// Monic gcd over Q.
    pub fn gcd(a: &UniPoly, b: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if let Some(l) = a.lead().cloned() {
            a = a.scale(&(Rat::one() / l));
        }
        a
    }

    /// Exact quotient; None when the division leaves a remainder.
    pub fn div_exact(&self, d: &UniPoly) -> Option<UniPoly> {
        if self.is_zero() {
            return Some(UniPoly::zero());
        }
        if d.is_zero() {
            return None;
        }
        let mut r = self.clone();
        let dd = d.degree().unwrap();
        let mut q = alloc::vec![Rat::zero(); self.c.len()];
        while let Some(dr) = r.degree() {
            if dr < dd {
                return None;
            }
            let k = r.lead().unwrap() / d.lead().unwrap();
            let shift = dr - dd;
            q[shift] = k.clone();
            for i in 0..=dd {
                let t = &d.c[i] * &k;
                r.c[i + shift] -= t;
            }
            r.trim();
            if r.is_zero() {
                return Some(UniPoly::from_coeffs(q));
            }
        }
        Some(UniPoly::from_coeffs(q))
    }
}

/// Sparse row: column monomial -> entry in Q[h].
pub type Row = BTreeMap<Mono, UniPoly>;

/// Row of `p` with h split out: columns are slot-monomials, entries collect
/// the h-layers. This is the rank over the field Q(h).
pub fn row_from_poly(p: &Poly) -> Row {
    let mut row: Row = BTreeMap::new();
    for (m, c) in p.terms() {
        let (rest, k) = m.split_var(Var::Hbar);
        let entry = row.entry(rest).or_insert_with(UniPoly::zero);
        let mut coeffs = core::mem::take(&mut entry.c);
        if coeffs.len() <= k as usize {
            coeffs.resize(k as usize + 1, Rat::zero());
        }
        coeffs[k as usize] += c;
        *entry = UniPoly::from_coeffs(coeffs);
    }
    row.retain(|_, e| !e.is_zero());
    row
}

/// Row of `p` with h kept as a column variable: rank over plain Q.
pub fn row_from_poly_flat(p: &Poly) -> Row {
    p.terms()
        .map(|(m, c)| (m.clone(), UniPoly::constant(c.clone())))
        .collect()
}

fn strip_content(row: &mut Row) {
    if row.is_empty() {
        return;
    }
    // polynomial content
    let mut g = UniPoly::zero();
    for e in row.values() {
        g = UniPoly::gcd(&g, e);
        if g.degree() == Some(0) {
            break;
        }
    }
    if g.degree().unwrap_or(0) > 0 {
        for e in row.values_mut() {
            *e = e.div_exact(&g).expect("gcd divides");
        }
    }
    // rational content: scale to primitive integer coefficients
    let mut den_lcm = BigInt::one();
    let mut num_gcd = BigInt::zero();
    for e in row.values() {
        for r in e.coeffs() {
            den_lcm = den_lcm.lcm(r.denom());
            num_gcd = num_gcd.gcd(r.numer());
        }
    }
    if !num_gcd.is_zero() {
        let scale = Rat::new(den_lcm, num_gcd);
        for e in row.values_mut() {
            *e = e.scale(&scale);
        }
    }
    // sign: leading entry's leading coefficient positive
    let negative = row
        .values()
        .next()
        .and_then(|e| e.lead())
        .is_some_and(|l| l.is_negative());
    if negative {
        for e in row.values_mut() {
            *e = e.neg();
        }
    }
}

/// Incremental fraction-free eliminator over Q(h).
#[derive(Default)]
pub struct Eliminator {
    pivots: BTreeMap<Mono, Row>,
}

impl Eliminator {
    pub fn new() -> Eliminator {
        Eliminator { pivots: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Feeds one row; returns true when it was independent of what came
    /// before (rank grew).
    pub fn offer(&mut self, row: Row) -> bool {
        let mut row = row;
        row.retain(|_, e| !e.is_zero());
        loop {
            let Some(col) = row.keys().next().cloned() else {
                return false;
            };
            let Some(piv) = self.pivots.get(&col) else {
                strip_content(&mut row);
                self.pivots.insert(col, row);
                return true;
            };
            // row <- row * piv[col] - piv * row[col]; kills the lead column
            let a = piv.get(&col).unwrap().clone();
            let b = row.get(&col).unwrap().clone();
            let mut next: Row = BTreeMap::new();
            for (m, e) in &row {
                let v = e.mul(&a);
                if !v.is_zero() {
                    next.insert(m.clone(), v);
                }
            }
            for (m, e) in piv {
                let v = e.mul(&b);
                if v.is_zero() {
                    continue;
                }
                let cur = next.remove(m).unwrap_or_else(UniPoly::zero);
                let s = cur.sub(&v);
                if !s.is_zero() {
                    next.insert(m.clone(), s);
                }
            }
            debug_assert!(!next.contains_key(&col));
            strip_content(&mut next);
            row = next;
        }
    }
}

/// Plain Gaussian eliminator over Q for specialized cross-checks.
#[derive(Default)]
struct ScalarEliminator {
    pivots: BTreeMap<Mono, BTreeMap<Mono, Rat>>,
}

impl ScalarEliminator {
    fn offer(&mut self, row: BTreeMap<Mono, Rat>) -> bool {
        let mut row = row;
        row.retain(|_, e| !e.is_zero());
        loop {
            let Some(col) = row.keys().next().cloned() else {
                return false;
            };
            let Some(piv) = self.pivots.get(&col) else {
                self.pivots.insert(col, row);
                return true;
            };
            let factor = row.get(&col).unwrap() / piv.get(&col).unwrap();
            for (m, e) in piv {
                let t = e * &factor;
                let cur = row.remove(m).unwrap_or_else(Rat::zero);
                let s = cur - t;
                if !s.is_zero() {
                    row.insert(m.clone(), s);
                }
            }
        }
    }
}

fn specialize_row(row: &Row, at: &Rat) -> BTreeMap<Mono, Rat> {
    row.iter()
        .map(|(m, e)| (m.clone(), e.eval(at)))
        .filter(|(_, r)| !r.is_zero())
        .collect()
}

/// Cumulative ranks after each group of rows, fraction-free over Q(h), with
/// random-specialization certification. `rng` drives only the choice of
/// check points, so results are deterministic per seed.
pub fn rank_profile(groups: &[Vec<Row>], rng: &mut SplitMix64) -> Result<Vec<usize>> {
    let mut elim = Eliminator::new();
    let mut profile = Vec::with_capacity(groups.len());
    for g in groups {
        for row in g {
            elim.offer(row.clone());
        }
        profile.push(elim.rank());
    }

    // certification at random nonzero h
    let mut used: Vec<Rat> = Vec::new();
    let mut best: Vec<usize> = alloc::vec![0; groups.len()];
    let mut certified = false;
    for _ in 0..8 {
        let at = loop {
            let c = rng.small_nonzero_rat(40, 4);
            if !used.contains(&c) {
                break c;
            }
        };
        used.push(at.clone());
        let mut selim = ScalarEliminator::default();
        let mut sprof = Vec::with_capacity(groups.len());
        for g in groups {
            for row in g {
                selim.offer(specialize_row(row, &at));
            }
            sprof.push(selim.pivots.len());
        }
        for (s, sym) in sprof.iter().zip(profile.iter()) {
            if s > sym {
                return Err(Error::Internal(alloc::format!(
                    "specialized rank {s} exceeds symbolic rank {sym}"
                )));
            }
        }
        for (b, s) in best.iter_mut().zip(sprof.iter()) {
            *b = (*b).max(*s);
        }
        if sprof == profile {
            certified = true;
        }
        if certified && used.len() >= 3 {
            break;
        }
    }
    if !certified {
        return Err(Error::Internal(alloc::format!(
            "rank profile {profile:?} never certified by specialization (best seen {best:?})"
        )));
    }
    Ok(profile)
}

/// Rank of a single batch of rows.
pub fn exact_rank(rows: Vec<Row>, rng: &mut SplitMix64) -> Result<usize> {
    Ok(rank_profile(&[rows], rng)?[0])
}
