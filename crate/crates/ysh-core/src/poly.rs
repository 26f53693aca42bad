//! Multivariate polynomials over exact rationals.
//!
//! Variables are the slot variables `l(vertex, slot)` (slot numbering is
//! 1-based) and the deformation parameter `h`. The variable order is
//! lexicographic on `(vertex, slot)` with `h` sorted last; monomials compare
//! lexicographically with the smallest variable most significant. Printing
//! walks terms in descending monomial order, so output is canonical and the
//! expression parser can read it back.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::scalar::{fmt_rat, rat_i, Rat};
use crate::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Var {
    /// `l(vertex, slot)`, slot counted from 1 within its vertex.
    Slot { vertex: u16, slot: u16 },
    /// The deformation parameter `h`.
    Hbar,
}

impl Var {
    pub fn slot(vertex: u16, slot: u16) -> Var {
        debug_assert!(slot >= 1, "slots are 1-based");
        Var::Slot { vertex, slot }
    }

    pub fn is_slot(&self) -> bool {
        matches!(self, Var::Slot { .. })
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Slot { vertex, slot } => write!(f, "l({vertex},{slot})"),
            Var::Hbar => write!(f, "h"),
        }
    }
}

/// Monomial: sorted list of `(variable, exponent)` with all exponents >= 1.
/// The empty list is the monomial 1.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Mono(Vec<(Var, u32)>);

impl Mono {
    pub fn one() -> Mono {
        Mono(Vec::new())
    }

    pub fn var(v: Var) -> Mono {
        Mono(alloc::vec![(v, 1)])
    }

    pub fn var_pow(v: Var, e: u32) -> Mono {
        if e == 0 {
            Mono::one()
        } else {
            Mono(alloc::vec![(v, e)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0, self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Mono(out)
    }

    pub fn pow(&self, e: u32) -> Mono {
        if e == 0 {
            return Mono::one();
        }
        Mono(self.0.iter().map(|&(v, k)| (v, k * e)).collect())
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.0
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn slot_degree(&self) -> u32 {
        self.0
            .iter()
            .filter(|(v, _)| v.is_slot())
            .map(|&(_, e)| e)
            .sum()
    }

    /// Removes `v` and returns (monomial without `v`, exponent of `v`).
    pub fn split_var(&self, v: Var) -> (Mono, u32) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|&&(w, k)| {
                if w == v {
                    e = k;
                    false
                } else {
                    true
                }
            })
            .copied()
            .collect();
        (Mono(rest), e)
    }

    pub fn map_vars(&self, f: impl Fn(Var) -> Var) -> Mono {
        let mut acc: BTreeMap<Var, u32> = BTreeMap::new();
        for &(v, e) in &self.0 {
            *acc.entry(f(v)).or_insert(0) += e;
        }
        Mono(acc.into_iter().collect())
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.iter().map(|&(v, _)| v)
    }
}

impl Ord for Mono {
    // Lexicographic: smallest variable most significant, higher exponent wins.
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.0.iter();
        let mut b = other.0.iter();
        let (mut x, mut y) = (a.next(), b.next());
        loop {
            match (x, y) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                        x = a.next();
                        y = b.next();
                    }
                },
            }
        }
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (v, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Polynomial: monomial -> nonzero rational coefficient.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Mono, Rat>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: BTreeMap::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::one(), c);
        }
        Poly { terms }
    }

    pub fn int(n: i64) -> Poly {
        Poly::constant(rat_i(n))
    }

    pub fn var(v: Var) -> Poly {
        Poly::from_term(Mono::var(v), Rat::one())
    }

    pub fn hbar() -> Poly {
        Poly::var(Var::Hbar)
    }

    pub fn from_term(m: Mono, c: Rat) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Rat)> {
        self.terms.iter()
    }

    /// Some(c) when the polynomial is the constant c (including 0).
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn coeff(&self, m: &Mono) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add_term(&mut self, m: Mono, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_mono(&self, m: &Mono) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (t.mul(m), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    pub fn degree_in(&self, v: Var) -> Option<u32> {
        self.terms.keys().map(|m| m.degree_in(v)).max()
    }

    /// Max total degree in the slot variables alone (h not counted).
    pub fn slot_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.slot_degree()).max()
    }

    pub fn hbar_degree(&self) -> Option<u32> {
        self.degree_in(Var::Hbar)
    }

    /// True when every term has the same total degree (the zero polynomial
    /// is homogeneous by convention).
    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.total_degree());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn vars(&self) -> alloc::collections::BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.vars()).collect()
    }

    /// Coefficient of `v^e`, as a polynomial in the remaining variables.
    pub fn coeff_of_power(&self, v: Var, e: u32) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (rest, k) = m.split_var(v);
            if k == e {
                out.add_term(rest, c.clone());
            }
        }
        out
    }

    /// Splits into h-degree layers: exponent of h -> polynomial in slots only.
    pub fn hbar_layers(&self) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (rest, k) = m.split_var(Var::Hbar);
            out.entry(k).or_insert_with(Poly::zero).add_term(rest, c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    pub fn map_vars(&self, f: impl Fn(Var) -> Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.map_vars(&f), c.clone());
        }
        out
    }

    /// Substitutes a polynomial for a variable (Horner over descending powers).
    pub fn substitute(&self, v: Var, value: &Poly) -> Poly {
        let mut layers: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (rest, k) = m.split_var(v);
            layers.entry(k).or_insert_with(Poly::zero).add_term(rest, c.clone());
        }
        let mut acc = Poly::zero();
        let mut prev_exp: Option<u32> = None;
        for (e, layer) in layers.into_iter().rev() {
            if let Some(p) = prev_exp {
                acc = &acc * &value.pow(p - e);
            }
            acc = &acc + &layer;
            prev_exp = Some(e);
        }
        if let Some(p) = prev_exp {
            if p > 0 {
                acc = &acc * &value.pow(p);
            }
        }
        acc
    }

    /// Substitutes a rational constant for a variable.
    pub fn eval_var(&self, v: Var, value: &Rat) -> Poly {
        let mut out = Poly::zero();
        let mut pow_cache: Vec<Rat> = alloc::vec![Rat::one()];
        for (m, c) in &self.terms {
            let (rest, k) = m.split_var(v);
            while pow_cache.len() <= k as usize {
                let last = pow_cache.last().unwrap() * value;
                pow_cache.push(last);
            }
            out.add_term(rest, c * &pow_cache[k as usize]);
        }
        out
    }

    pub fn set_hbar_zero(&self) -> Poly {
        self.eval_var(Var::Hbar, &Rat::zero())
    }

    /// d/dv, treating all other variables as constants.
    pub fn derivative(&self, v: Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (rest, k) = m.split_var(v);
            if k > 0 {
                out.add_term(rest.mul(&Mono::var_pow(v, k - 1)), c * rat_i(k as i64));
            }
        }
        out
    }

    pub fn leading(&self) -> Option<(&Mono, &Rat)> {
        self.terms.last_key_value()
    }

    // ----- symmetric-group machinery over per-vertex slots -----

    /// Applies the slot permutation `perm[vertex][s-1] = image of slot s`.
    pub fn apply_slot_perm(&self, perm: &[Vec<u16>]) -> Poly {
        self.map_vars(|v| match v {
            Var::Slot { vertex, slot } => {
                let p = &perm[vertex as usize];
                if (slot as usize) <= p.len() {
                    Var::Slot { vertex, slot: p[slot as usize - 1] }
                } else {
                    v
                }
            }
            Var::Hbar => v,
        })
    }

    /// Checks invariance under every adjacent slot transposition of the
    /// product of symmetric groups attached to `weight`; adjacent swaps
    /// generate, so this decides full symmetry. On failure reports one
    /// offending swap.
    pub fn check_symmetric(&self, weight: &[u32]) -> Result<()> {
        for (vertex, &n) in weight.iter().enumerate() {
            for s in 1..n as u16 {
                let swapped = self.map_vars(|v| match v {
                    Var::Slot { vertex: i, slot } if i as usize == vertex => {
                        let slot = if slot == s {
                            s + 1
                        } else if slot == s + 1 {
                            s
                        } else {
                            slot
                        };
                        Var::Slot { vertex: i, slot }
                    }
                    other => other,
                });
                if swapped != *self {
                    return Err(Error::NotSymmetric { vertex, swap: (s, s + 1) });
                }
            }
        }
        Ok(())
    }

    pub fn is_symmetric(&self, weight: &[u32]) -> bool {
        self.check_symmetric(weight).is_ok()
    }

    /// Group-sum symmetrization: the sum of sigma(p) over the full product of
    /// symmetric groups. Applied to an already-symmetric p this returns
    /// |group| * p, so it is idempotent only up to that factor.
    pub fn symmetrize(&self, weight: &[u32]) -> Poly {
        let mut out = Poly::zero();
        for perm in all_slot_perms(weight) {
            out = &out + &self.apply_slot_perm(&perm);
        }
        out
    }
}

/// All elements of the product over vertices of S_{weight[i]}, each as a
/// per-vertex mapping table. Order is deterministic.
pub fn all_slot_perms(weight: &[u32]) -> Vec<Vec<Vec<u16>>> {
    let mut out: Vec<Vec<Vec<u16>>> = alloc::vec![Vec::new()];
    for &n in weight {
        let perms = perms_of(n as u16);
        let mut next = Vec::with_capacity(out.len() * perms.len());
        for base in &out {
            for p in &perms {
                let mut b = base.clone();
                b.push(p.clone());
                next.push(b);
            }
        }
        out = next;
    }
    out
}

fn perms_of(n: u16) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    let mut cur: Vec<u16> = (1..=n).collect();
    heap_permute(&mut cur, n as usize, &mut out);
    out
}

fn heap_permute(cur: &mut Vec<u16>, k: usize, out: &mut Vec<Vec<u16>>) {
    if k <= 1 {
        out.push(cur.clone());
        return;
    }
    for i in 0..k {
        heap_permute(cur, k - 1, out);
        if k % 2 == 0 {
            cur.swap(i, k - 1);
        } else {
            cur.swap(0, k - 1);
        }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Descending monomial order: leading term first.
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c < &Rat::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{}", fmt_rat(&abs))?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_rat(&abs))?;
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn to_string_canonical(&self) -> String {
        use alloc::string::ToString;
        self.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn l(v: u16, s: u16) -> Poly {
        Poly::var(Var::slot(v, s))
    }

    #[test]
    fn var_order_slots_before_hbar() {
        assert!(Var::slot(0, 1) < Var::slot(0, 2));
        assert!(Var::slot(0, 2) < Var::slot(1, 1));
        assert!(Var::slot(5, 9) < Var::Hbar);
    }

    #[test]
    fn mono_lex_order() {
        let a = Mono::var(Var::slot(0, 1));
        let b = Mono::var(Var::slot(0, 2));
        assert!(a > b, "smaller variable is more significant");
        let a2 = Mono::var_pow(Var::slot(0, 1), 2);
        assert!(a2 > a);
        let ab = a.mul(&b);
        assert!(a2 > ab);
        assert!(Mono::var(Var::Hbar) < a);
        assert!(Mono::one() < Mono::var(Var::Hbar));
    }

    #[test]
    fn display_is_canonical() {
        let p = &(&l(0, 1) * &l(0, 1)) - &Poly::hbar().scale(&rat(3, 2));
        assert_eq!(p.to_string(), "l(0,1)^2 - 3/2*h");
        let q = &(&l(0, 2) + &l(0, 1)) + &Poly::int(1);
        assert_eq!(q.to_string(), "l(0,1) + l(0,2) + 1");
        assert_eq!(Poly::zero().to_string(), "0");
        assert_eq!((&Poly::zero() - &Poly::one()).to_string(), "-1");
    }

    #[test]
    fn ring_identities() {
        let p = &(&l(0, 1) + &Poly::hbar()) * &(&l(1, 1) - &Poly::int(2));
        let q = &l(0, 1) * &l(1, 1);
        // distributivity
        let lhs = &p * &(&q + &Poly::one());
        let rhs = &(&p * &q) + &p;
        assert_eq!(lhs, rhs);
        // substitution of self is identity
        assert_eq!(p.substitute(Var::Hbar, &Poly::hbar()), p);
    }

    #[test]
    fn substitute_expands() {
        // (x+1)^2 with x -> y - 1 gives y^2
        let x = Var::slot(0, 1);
        let y = Var::slot(0, 2);
        let p = (&l(0, 1) + &Poly::one()).pow(2);
        let sub = &l(0, 2) - &Poly::one();
        assert_eq!(p.substitute(x, &sub), Poly::var(y).pow(2));
    }

    #[test]
    fn derivative_product_rule() {
        let x = Var::slot(0, 1);
        let p = &l(0, 1) * &(&l(0, 1) + &Poly::hbar());
        let d = p.derivative(x);
        let expect = &(&l(0, 1) + &l(0, 1)) + &Poly::hbar();
        assert_eq!(d, expect);
    }

    #[test]
    fn symmetrize_examples() {
        // weight (2): S_2 orbit sums
        let p = l(0, 1);
        assert_eq!(p.symmetrize(&[2]), &l(0, 1) + &l(0, 2));
        let prod = &l(0, 1) * &l(0, 2);
        assert_eq!(prod.symmetrize(&[2]), prod.scale(&rat_i(2)));
        // symmetric input comes back |group|-scaled
        let s = &l(0, 1) + &l(0, 2);
        assert_eq!(s.symmetrize(&[2]), s.scale(&rat_i(2)));
    }

    #[test]
    fn symmetry_check_reports_offender() {
        let p = l(0, 1);
        assert!(p.is_symmetric(&[1]));
        match p.check_symmetric(&[2]) {
            Err(Error::NotSymmetric { vertex: 0, swap: (1, 2) }) => {}
            other => panic!("expected NotSymmetric, got {other:?}"),
        }
        let sym = &(&l(0, 1) + &l(0, 2)) + &Poly::hbar();
        assert!(sym.is_symmetric(&[2]));
    }

    #[test]
    fn symmetrize_two_vertices() {
        // weight (1,2): group is S_1 x S_2
        let p = &l(0, 1) * &l(1, 1);
        let expect = &(&l(0, 1) * &l(1, 1)) + &(&l(0, 1) * &l(1, 2));
        assert_eq!(p.symmetrize(&[1, 2]), expect);
    }

    #[test]
    fn hbar_layers_split() {
        let p = &(&l(0, 1) * &Poly::hbar()) + &(&l(0, 2) + &Poly::hbar().pow(2).scale(&rat(1, 2)));
        let layers = p.hbar_layers();
        assert_eq!(layers.len(), 3);
        assert_eq!(layers[&0], l(0, 2));
        assert_eq!(layers[&1], l(0, 1));
        assert_eq!(layers[&2], Poly::constant(rat(1, 2)));
        assert_eq!(p.set_hbar_zero(), l(0, 2));
    }

    #[test]
    fn homogeneity() {
        assert!(Poly::zero().is_homogeneous());
        assert!((&l(0, 1) + &Poly::hbar()).is_homogeneous());
        assert!(!(&l(0, 1) + &Poly::one()).is_homogeneous());
    }
}
