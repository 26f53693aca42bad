//! The weighted shuffle algebra of a quiver.
//!
//! An element of weight v is a polynomial in the slot variables l(i,s),
//! 1 <= s <= v_i, symmetric in the slots of each vertex separately, with
//! coefficients in Q[h]. The product of elements of weights v1, v2 works in
//! merged coordinates: the left factor keeps slots 1..v1_i, the right factor
//! is shifted to slots v1_i+1..v1_i+v2_i, both are multiplied by the kernel
//! `fac`, and the result is summed over all per-vertex shuffles (renamings
//! that stay increasing on each side). The diagonal denominators of `fac`
//! cancel in the sum; the code divides them out exactly and treats any
//! leftover as an internal error.
//!
//! `localized_mul` is the same construction for the bigger localized algebra,
//! whose kernel swaps arrow factors for ratios of shifted linear forms, and
//! `embed` is the algebra map f -> f / H_v connecting the two. `embed` turns
//! shuffle products into localized products; the tests use that as the
//! arbiter for every orientation convention in this file.

use alloc::vec::Vec;

use num_traits::One;

use crate::linear::{div_exact, LinearForm};
use crate::poly::{Poly, Var};
use crate::quiver::{DimVec, Quiver};
use crate::ratfun::RatFun;
use crate::rng::SplitMix64;
use crate::scalar::{rat, Rat};
use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ShuffleElement {
    weight: DimVec,
    poly: Poly,
}

impl ShuffleElement {
    /// Validates slot support and per-vertex symmetry.
    pub fn new(weight: DimVec, poly: Poly) -> Result<ShuffleElement> {
        for v in poly.vars() {
            if let Var::Slot { vertex, slot } = v {
                let ok = (vertex as usize) < weight.len()
                    && slot >= 1
                    && (slot as u32) <= weight.get(vertex as usize);
                if !ok {
                    return Err(Error::Shape(alloc::format!(
                        "variable {v} is outside weight ({weight})"
                    )));
                }
            }
        }
        poly.check_symmetric(&weight.0)?;
        Ok(ShuffleElement { weight, poly })
    }

    pub(crate) fn from_raw(weight: DimVec, poly: Poly) -> ShuffleElement {
        debug_assert!(poly.is_symmetric(&weight.0));
        ShuffleElement { weight, poly }
    }

    pub fn zero(weight: DimVec) -> ShuffleElement {
        ShuffleElement { weight, poly: Poly::zero() }
    }

    /// The unit: constant 1 in weight 0.
    pub fn one(n_vertices: usize) -> ShuffleElement {
        ShuffleElement { weight: DimVec::zero(n_vertices), poly: Poly::one() }
    }

    /// Generator x_{k,r}: the monomial l(k,1)^r in weight e_k.
    pub fn generator(n_vertices: usize, k: usize, r: u32) -> ShuffleElement {
        ShuffleElement {
            weight: DimVec::unit(n_vertices, k),
            poly: Poly::var(Var::slot(k as u16, 1)).pow(r),
        }
    }

    pub fn weight(&self) -> &DimVec {
        &self.weight
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn add(&self, o: &ShuffleElement) -> Result<ShuffleElement> {
        self.check_same_weight(o)?;
        Ok(ShuffleElement {
            weight: self.weight.clone(),
            poly: &self.poly + &o.poly,
        })
    }

    pub fn sub(&self, o: &ShuffleElement) -> Result<ShuffleElement> {
        self.check_same_weight(o)?;
        Ok(ShuffleElement {
            weight: self.weight.clone(),
            poly: &self.poly - &o.poly,
        })
    }

    pub fn scale(&self, c: &Rat) -> ShuffleElement {
        ShuffleElement { weight: self.weight.clone(), poly: self.poly.scale(c) }
    }

    /// Multiplies by a polynomial in h alone (a central scalar).
    pub fn mul_hbar_poly(&self, p: &Poly) -> Result<ShuffleElement> {
        if p.vars().iter().any(|v| v.is_slot()) {
            return Err(Error::Shape(alloc::string::String::from(
                "central scalar must involve h only",
            )));
        }
        Ok(ShuffleElement { weight: self.weight.clone(), poly: &self.poly * p })
    }

    pub fn set_hbar_zero(&self) -> ShuffleElement {
        ShuffleElement { weight: self.weight.clone(), poly: self.poly.set_hbar_zero() }
    }

    fn check_same_weight(&self, o: &ShuffleElement) -> Result<()> {
        if self.weight != o.weight {
            return Err(Error::Shape(alloc::format!(
                "weights ({}) and ({}) differ",
                self.weight, o.weight
            )));
        }
        Ok(())
    }
}

impl core::fmt::Display for ShuffleElement {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "[{}] {}", self.weight, self.poly)
    }
}

/// One shuffle: per vertex, the table image-of-slot for all merged slots.
pub type ShuffleMap = Vec<Vec<u16>>;

fn subsets_ascending(n: u16, k: u16) -> Vec<Vec<u16>> {
    fn rec(start: u16, n: u16, k: u16, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if k == 0 {
            out.push(cur.clone());
            return;
        }
        for x in start..=(n - k + 1) {
            cur.push(x);
            rec(x + 1, n, k - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, k, &mut Vec::new(), &mut out);
    out
}

/// All shuffles of (v1, v2): per vertex i, the renamings of merged slots
/// 1..v1_i+v2_i that are increasing on the first v1_i and on the rest.
pub fn shuffle_maps(v1: &DimVec, v2: &DimVec) -> Vec<ShuffleMap> {
    let n = v1.len();
    let mut per_vertex: Vec<Vec<Vec<u16>>> = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = (v1.get(i) as u16, v2.get(i) as u16);
        let total = a + b;
        let mut tables = Vec::new();
        for left in subsets_ascending(total, a) {
            let mut table = alloc::vec![0u16; total as usize];
            let mut right = Vec::with_capacity(b as usize);
            let mut inl = alloc::vec![false; total as usize + 1];
            for &x in &left {
                inl[x as usize] = true;
            }
            for x in 1..=total {
                if !inl[x as usize] {
                    right.push(x);
                }
            }
            for (s, &img) in left.iter().enumerate() {
                table[s] = img;
            }
            for (t, &img) in right.iter().enumerate() {
                table[a as usize + t] = img;
            }
            tables.push(table);
        }
        per_vertex.push(tables);
    }
    // cartesian product
    let mut out: Vec<ShuffleMap> = alloc::vec![Vec::new()];
    for tables in per_vertex {
        let mut next = Vec::with_capacity(out.len() * tables.len());
        for base in &out {
            for t in &tables {
                let mut b = base.clone();
                b.push(t.clone());
                next.push(b);
            }
        }
        out = next;
    }
    out
}

fn rename_of(map: &ShuffleMap) -> impl Fn(Var) -> Var + Copy + '_ {
    move |v| match v {
        Var::Slot { vertex, slot } => Var::Slot {
            vertex,
            slot: map[vertex as usize][slot as usize - 1],
        },
        Var::Hbar => Var::Hbar,
    }
}

/// Applies a shuffle renaming to a rational function given in merged
/// coordinates (left factor at slots 1..v1_i, right factor shifted by v1_i).
pub fn apply_shuffle_substitution(rf: &RatFun, map: &ShuffleMap) -> Result<RatFun> {
    rf.map_vars(rename_of(map))
}

/// The product kernel in merged coordinates, split into linear numerator
/// factors and normalized denominator forms (denominators are exactly the
/// diagonal differences, which the shuffle sum cancels).
pub struct Kernel {
    pub num_factors: Vec<Poly>,
    pub den_forms: Vec<LinearForm>,
}

fn half(w: i64, hbar_zero: bool) -> Rat {
    if hbar_zero {
        Rat::from_integer(0.into())
    } else {
        rat(w, 2)
    }
}

fn lvar(i: usize, s: u32) -> Poly {
    Poly::var(Var::slot(i as u16, s as u16))
}

/// `fac` for weights (v1, v2) over `q`, in merged coordinates. With
/// `hbar_zero` the kernel is the h -> 0 degeneration (diagonal factors
/// cancel pairwise and drop out).
pub fn fac_kernel(v1: &DimVec, v2: &DimVec, q: &Quiver, hbar_zero: bool) -> Kernel {
    let n = q.vertex_count();
    let mut num_factors = Vec::new();
    let mut den_forms = Vec::new();
    for i in 0..n {
        for s in 1..=v1.get(i) {
            for t in 1..=v2.get(i) {
                let diff = &lvar(i, s) - &lvar(i, v1.get(i) + t);
                if !hbar_zero {
                    num_factors.push(&diff + &Poly::hbar());
                    let (form, scale) = LinearForm::from_poly(&diff).expect("diagonal form");
                    debug_assert!(scale.is_one());
                    den_forms.push(form);
                }
            }
        }
    }
    for a in q.arrows() {
        let (o, c) = (a.out, a.inc);
        for s in 1..=v1.get(o) {
            for t in 1..=v2.get(c) {
                let p = &(&lvar(c, v1.get(c) + t) - &lvar(o, s))
                    + &Poly::hbar().scale(&half(a.weight, hbar_zero));
                num_factors.push(p);
            }
        }
        for s in 1..=v1.get(c) {
            for t in 1..=v2.get(o) {
                let p = &(&lvar(c, s) - &lvar(o, v1.get(o) + t))
                    - &Poly::hbar().scale(&half(a.weight_rev, hbar_zero));
                num_factors.push(p);
            }
        }
    }
    Kernel { num_factors, den_forms }
}

/// `fac` as a single rational function (for inspection and for the pairing).
pub fn fac(v1: &DimVec, v2: &DimVec, q: &Quiver) -> Result<RatFun> {
    let k = fac_kernel(v1, v2, q, false);
    let mut num = Poly::one();
    for f in &k.num_factors {
        num = &num * f;
    }
    let mut rf = RatFun::from_poly(num);
    for form in &k.den_forms {
        rf = rf.div_linear(&form.as_poly(), 1)?;
    }
    Ok(rf)
}

fn check_quiver_weight(q: &Quiver, w: &DimVec) -> Result<()> {
    if w.len() != q.vertex_count() {
        return Err(Error::Shape(alloc::format!(
            "weight ({w}) does not fit a quiver on {} vertices",
            q.vertex_count()
        )));
    }
    Ok(())
}

fn shift_right_factor(g: &Poly, v1: &DimVec) -> Poly {
    g.map_vars(|v| match v {
        Var::Slot { vertex, slot } => Var::Slot {
            vertex,
            slot: slot + v1.get(vertex as usize) as u16,
        },
        Var::Hbar => Var::Hbar,
    })
}

/// Vandermonde forms of the merged weight: one normalized form per vertex
/// and slot pair s < t.
fn vandermonde_forms(v: &DimVec) -> Vec<LinearForm> {
    let mut out = Vec::new();
    for i in 0..v.len() {
        for s in 1..=v.get(i) {
            for t in (s + 1)..=v.get(i) {
                let (form, scale) = LinearForm::from_poly(&(&lvar(i, s) - &lvar(i, t)))
                    .expect("difference form");
                debug_assert!(scale.is_one());
                out.push(form);
            }
        }
    }
    out
}

pub fn shuffle_mul(f: &ShuffleElement, g: &ShuffleElement, q: &Quiver) -> Result<ShuffleElement> {
    shuffle_mul_with(f, g, q, false)
}

/// The h -> 0 degeneration of the product: same shuffle sum over the
/// degenerated kernel. Apply it to elements already at h = 0.
pub fn shuffle_mul_hbar_zero(
    f: &ShuffleElement,
    g: &ShuffleElement,
    q: &Quiver,
) -> Result<ShuffleElement> {
    shuffle_mul_with(f, g, q, true)
}

pub fn shuffle_mul_with(
    f: &ShuffleElement,
    g: &ShuffleElement,
    q: &Quiver,
    hbar_zero: bool,
) -> Result<ShuffleElement> {
    check_quiver_weight(q, f.weight())?;
    check_quiver_weight(q, g.weight())?;
    let v1 = f.weight().clone();
    let v2 = g.weight().clone();
    let v = v1.add(&v2);

    let base = &f.poly * &shift_right_factor(&g.poly, &v1);
    let kernel = fac_kernel(&v1, &v2, q, hbar_zero);
    let all_forms = vandermonde_forms(&v);

    let mut acc = Poly::zero();
    for map in shuffle_maps(&v1, &v2) {
        let rename = rename_of(&map);
        let mut term = base.map_vars(rename);
        if term.is_zero() {
            continue;
        }
        for nf in &kernel.num_factors {
            term = &term * &nf.map_vars(rename);
        }
        // renamed denominator forms: a squarefree subset of the Vandermonde
        let mut sign = Rat::one();
        let mut present: Vec<LinearForm> = Vec::with_capacity(kernel.den_forms.len());
        for df in &kernel.den_forms {
            let (form, scale) = df.map_vars(rename)?;
            sign *= scale; // always +1 or -1 for difference forms
            present.push(form);
        }
        for vf in &all_forms {
            if !present.contains(vf) {
                term = &term * &vf.as_poly();
            }
        }
        acc = &acc + &term.scale(&sign);
    }

    // the sum is divisible by the full Vandermonde; anything else is a bug
    for vf in &all_forms {
        acc = div_exact(&acc, vf).ok_or_else(|| {
            Error::Internal(alloc::format!(
                "shuffle product not divisible by diagonal factor {vf}"
            ))
        })?;
    }
    Ok(ShuffleElement::from_raw(v, acc))
}

/// The extra degree a product picks up from the kernel: for each arrow,
/// opposite-side pairs of slots at its endpoints.
pub fn cross_degree(v1: &DimVec, v2: &DimVec, q: &Quiver) -> u32 {
    let mut e = 0;
    for a in q.arrows() {
        e += v1.get(a.out) * v2.get(a.inc) + v1.get(a.inc) * v2.get(a.out);
    }
    e
}

// ----- the localized algebra -----

#[derive(Clone, Debug)]
pub struct LocalizedElement {
    weight: DimVec,
    value: RatFun,
}

impl LocalizedElement {
    pub fn new(weight: DimVec, value: RatFun) -> LocalizedElement {
        LocalizedElement { weight, value }
    }

    pub fn weight(&self) -> &DimVec {
        &self.weight
    }

    pub fn value(&self) -> &RatFun {
        &self.value
    }

    pub fn eq_rational(&self, o: &LocalizedElement) -> bool {
        self.weight == o.weight && self.value.eq_rational(&o.value)
    }

    /// Per-vertex symmetry of the value, decided on adjacent transpositions
    /// by cross-multiplication.
    pub fn check_symmetric(&self) -> Result<()> {
        for (vertex, &count) in self.weight.0.iter().enumerate() {
            for s in 1..count as u16 {
                let swapped = self.value.map_vars(|v| match v {
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
                })?;
                if !swapped.eq_rational(&self.value) {
                    return Err(Error::NotSymmetric { vertex, swap: (s, s + 1) });
                }
            }
        }
        Ok(())
    }
}

/// Kernel of the localized product: diagonal factors as in `fac`, plus for
/// every ordered vertex pair (i, j) with a = #arrows i -> j, ratios
/// (l'_j - l''_i - a h/2) / (l'_j - l''_i + a h/2) over the slot pairs.
fn localized_kernel(v1: &DimVec, v2: &DimVec, q: &Quiver) -> Result<RatFun> {
    let n = q.vertex_count();
    let mut rf = RatFun::one();
    for i in 0..n {
        for s in 1..=v1.get(i) {
            for t in 1..=v2.get(i) {
                let diff = &lvar(i, s) - &lvar(i, v1.get(i) + t);
                rf = rf.mul_poly(&(&diff + &Poly::hbar()));
                rf = rf.div_linear(&diff, 1)?;
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let a = q.arrows_from_to(i, j) as i64;
            if a == 0 {
                continue;
            }
            for s in 1..=v2.get(i) {
                for t in 1..=v1.get(j) {
                    let diff = &lvar(j, t) - &lvar(i, v1.get(i) + s);
                    let shift = Poly::hbar().scale(&rat(a, 2));
                    rf = rf.mul_poly(&(&diff - &shift));
                    rf = rf.div_linear(&(&diff + &shift), 1)?;
                }
            }
        }
    }
    Ok(rf)
}

pub fn localized_mul(
    f: &LocalizedElement,
    g: &LocalizedElement,
    q: &Quiver,
) -> Result<LocalizedElement> {
    check_quiver_weight(q, f.weight())?;
    check_quiver_weight(q, g.weight())?;
    let v1 = f.weight().clone();
    let v = v1.add(g.weight());

    let shifted = g.value.map_vars(|var| match var {
        Var::Slot { vertex, slot } => Var::Slot {
            vertex,
            slot: slot + v1.get(vertex as usize) as u16,
        },
        Var::Hbar => Var::Hbar,
    })?;
    let base = f.value.mul(&shifted).mul(&localized_kernel(&v1, g.weight(), q)?);

    let mut acc = RatFun::zero();
    for map in shuffle_maps(&v1, g.weight()) {
        acc = acc.add(&apply_shuffle_substitution(&base, &map)?);
    }
    Ok(LocalizedElement::new(v, acc.normalized()))
}

/// The linear factors of H_v: for every arrow o -> c with weight m and every
/// slot pair, l(c,t) - l(o,s) + (m/2) h.
pub fn h_factor_list(v: &DimVec, q: &Quiver) -> Vec<Poly> {
    let mut out = Vec::new();
    for a in q.arrows() {
        for s in 1..=v.get(a.out) {
            for t in 1..=v.get(a.inc) {
                out.push(
                    &(&lvar(a.inc, t) - &lvar(a.out, s))
                        + &Poly::hbar().scale(&rat(a.weight, 2)),
                );
            }
        }
    }
    out
}

pub fn h_factor(v: &DimVec, q: &Quiver) -> Poly {
    let mut p = Poly::one();
    for f in h_factor_list(v, q) {
        p = &p * &f;
    }
    p
}

/// The embedding f -> f / H_v of the shuffle algebra into the localized one.
/// Identity on every weight e_k (no loops: H is empty there).
pub fn embed(f: &ShuffleElement, q: &Quiver) -> Result<LocalizedElement> {
    check_quiver_weight(q, f.weight())?;
    let mut value = RatFun::from_poly(f.poly.clone());
    for factor in h_factor_list(f.weight(), q) {
        value = value.div_linear(&factor, 1)?;
    }
    Ok(LocalizedElement::new(f.weight().clone(), value.normalized()))
}

/// Seeded random element at a fixed weight: a handful of monomials in the
/// slot variables (slot exponents below `max_deg + 1`, an occasional power of
/// h, small nonzero rational coefficients), symmetrized per vertex. The seed
/// fully determines the result, so corpora built from it are reproducible.
pub fn random_element(weight: &DimVec, max_deg: u32, rng: &mut SplitMix64) -> ShuffleElement {
    let picks = 2 + rng.below(3);
    let mut p = Poly::zero();
    for _ in 0..picks {
        let mut m = Poly::constant(rng.small_nonzero_rat(3, 2));
        for vertex in 0..weight.len() {
            for slot in 1..=weight.get(vertex) {
                let e = rng.below(u64::from(max_deg) + 1) as u32;
                if e > 0 {
                    m = &m * &Poly::var(Var::slot(vertex as u16, slot as u16)).pow(e);
                }
            }
        }
        if rng.below(2) == 1 {
            m = &m * &Poly::hbar();
        }
        p = &p + &m;
    }
    ShuffleElement::from_raw(weight.clone(), p.symmetrize(&weight.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat_i;

    fn one_vertex() -> Quiver {
        Quiver::from_arrows(1, &[], false).unwrap()
    }

    fn a2() -> Quiver {
        Quiver::path(2)
    }

    fn x(q: &Quiver, k: usize, r: u32) -> ShuffleElement {
        ShuffleElement::generator(q.vertex_count(), k, r)
    }

    fn l(v: u16, s: u16) -> Poly {
        Poly::var(Var::slot(v, s))
    }

    #[test]
    fn one_vertex_square_of_lowest_mode() {
        let q = one_vertex();
        let p = shuffle_mul(&x(&q, 0, 0), &x(&q, 0, 0), &q).unwrap();
        assert_eq!(p.weight(), &DimVec(alloc::vec![2]));
        assert_eq!(p.poly(), &Poly::int(2));
    }

    #[test]
    fn one_vertex_mode_one_against_unit_weights() {
        let q = one_vertex();
        // (l) * 1 = l1 + l2 + h and 1 * (l) = l1 + l2 - h
        let left = shuffle_mul(&x(&q, 0, 1), &x(&q, 0, 0), &q).unwrap();
        let right = shuffle_mul(&x(&q, 0, 0), &x(&q, 0, 1), &q).unwrap();
        let sym = &l(0, 1) + &l(0, 2);
        assert_eq!(left.poly(), &(&sym + &Poly::hbar()));
        assert_eq!(right.poly(), &(&sym - &Poly::hbar()));
        let comm = left.sub(&right).unwrap();
        assert_eq!(comm.poly(), &Poly::hbar().scale(&rat_i(2)));
    }

    #[test]
    fn weight_zero_is_a_unit() {
        let q = a2();
        let one = ShuffleElement::one(2);
        let f = x(&q, 0, 3);
        assert_eq!(shuffle_mul(&one, &f, &q).unwrap(), f);
        assert_eq!(shuffle_mul(&f, &one, &q).unwrap(), f);
    }

    #[test]
    fn a2_cross_products_and_commutator() {
        let q = a2();
        // p = l(0,1), q = l(1,1): x_{0,r} * x_{1,s} = p^r q^s (q - p + h/2)
        for (r, s) in [(0u32, 0u32), (1, 0), (2, 1)] {
            let fwd = shuffle_mul(&x(&q, 0, r), &x(&q, 1, s), &q).unwrap();
            let bwd = shuffle_mul(&x(&q, 1, s), &x(&q, 0, r), &q).unwrap();
            let mono = &l(0, 1).pow(r) * &l(1, 1).pow(s);
            let diff = &l(1, 1) - &l(0, 1);
            let h2 = Poly::hbar().scale(&rat(1, 2));
            assert_eq!(fwd.poly(), &(&mono * &(&diff + &h2)));
            assert_eq!(bwd.poly(), &(&mono * &(&diff - &h2)));
            let comm = fwd.sub(&bwd).unwrap();
            assert_eq!(comm.poly(), &(&mono * &Poly::hbar()));
        }
    }

    #[test]
    fn cycle_three_matches_path_on_adjacent_pair() {
        let q3 = Quiver::cycle(3);
        let f = shuffle_mul(&x(&q3, 0, 0), &x(&q3, 1, 0), &q3).unwrap();
        let diff = &(&l(1, 1) - &l(0, 1)) + &Poly::hbar().scale(&rat(1, 2));
        assert_eq!(f.poly(), &diff);
        // vertices 0 and 2 are joined by the arrow 2 -> 0, so this order is
        // the reversed one and picks up the minus shift
        let g = shuffle_mul(&x(&q3, 0, 0), &x(&q3, 2, 0), &q3).unwrap();
        let diff20 = &(&l(0, 1) - &l(2, 1)) - &Poly::hbar().scale(&rat(1, 2));
        assert_eq!(g.poly(), &diff20);
        let gr = shuffle_mul(&x(&q3, 2, 0), &x(&q3, 0, 0), &q3).unwrap();
        let diff02 = &(&l(0, 1) - &l(2, 1)) + &Poly::hbar().scale(&rat(1, 2));
        assert_eq!(gr.poly(), &diff02);
    }

    #[test]
    fn products_are_symmetric_and_homogeneous() {
        let q = Quiver::cycle(3);
        let f = shuffle_mul(&x(&q, 0, 1), &x(&q, 0, 2), &q).unwrap();
        assert!(f.poly().is_symmetric(&f.weight().0));
        assert!(f.poly().is_homogeneous());
        let g = shuffle_mul(&f, &x(&q, 1, 0), &q).unwrap();
        assert!(g.poly().is_symmetric(&g.weight().0));
        assert!(g.poly().is_homogeneous());
    }

    #[test]
    fn associativity_small_cases() {
        let q = one_vertex();
        let a = x(&q, 0, 0);
        let b = x(&q, 0, 1);
        let c = x(&q, 0, 2);
        let ab_c = shuffle_mul(&shuffle_mul(&a, &b, &q).unwrap(), &c, &q).unwrap();
        let a_bc = shuffle_mul(&a, &shuffle_mul(&b, &c, &q).unwrap(), &q).unwrap();
        assert_eq!(ab_c, a_bc);

        let q2 = a2();
        let a = x(&q2, 0, 1);
        let b = x(&q2, 1, 0);
        let c = x(&q2, 0, 0);
        let ab_c = shuffle_mul(&shuffle_mul(&a, &b, &q2).unwrap(), &c, &q2).unwrap();
        let a_bc = shuffle_mul(&a, &shuffle_mul(&b, &c, &q2).unwrap(), &q2).unwrap();
        assert_eq!(ab_c, a_bc);
    }

    #[test]
    fn degree_law_with_cross_term() {
        let q = a2();
        let f = x(&q, 0, 2); // degree 2
        let g = x(&q, 1, 1); // degree 1
        let e = cross_degree(f.weight(), g.weight(), &q);
        assert_eq!(e, 1);
        let p = shuffle_mul(&f, &g, &q).unwrap();
        assert_eq!(p.poly().total_degree(), Some(2 + 1 + 1));
    }

    #[test]
    fn hbar_zero_degeneration_commutes() {
        let q = a2();
        let f = shuffle_mul(&x(&q, 0, 1), &x(&q, 1, 2), &q).unwrap();
        let g = x(&q, 0, 2);
        let full = shuffle_mul(&f, &g, &q).unwrap().set_hbar_zero();
        let degen = shuffle_mul_hbar_zero(&f.set_hbar_zero(), &g.set_hbar_zero(), &q).unwrap();
        assert_eq!(full, degen);
        // and the degenerated one-vertex product is commutative
        let q1 = one_vertex();
        let a = x(&q1, 0, 1);
        let b = x(&q1, 0, 2);
        let ab = shuffle_mul_hbar_zero(&a, &b, &q1).unwrap();
        let ba = shuffle_mul_hbar_zero(&b, &a, &q1).unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn h_factor_examples() {
        let q = a2();
        let v = DimVec(alloc::vec![1, 1]);
        let h = h_factor(&v, &q);
        let expect = &(&l(1, 1) - &l(0, 1)) + &Poly::hbar().scale(&rat(1, 2));
        assert_eq!(h, expect);
        // weight e_k: no factors
        assert_eq!(h_factor(&DimVec(alloc::vec![1, 0]), &q), Poly::one());
    }

    #[test]
    fn embed_is_identity_on_unit_weights() {
        let q = a2();
        let f = x(&q, 0, 3);
        let e = embed(&f, &q).unwrap();
        assert!(e.value().eq_rational(&RatFun::from_poly(f.poly().clone())));
    }

    #[test]
    fn localized_product_of_units() {
        let q = a2();
        // embed(x_{0,0}) *' embed(x_{1,0}) = embed(x00 * x10) = H/H = 1
        let e0 = embed(&x(&q, 0, 0), &q).unwrap();
        let e1 = embed(&x(&q, 1, 0), &q).unwrap();
        let prod = localized_mul(&e0, &e1, &q).unwrap();
        assert!(prod.value().eq_rational(&RatFun::one()));
        // one vertex: 1 *' 1 at (e, e) = 2
        let q1 = one_vertex();
        let u = embed(&x(&q1, 0, 0), &q1).unwrap();
        let sq = localized_mul(&u, &u, &q1).unwrap();
        assert!(sq.value().eq_rational(&RatFun::from_poly(Poly::int(2))));
    }

    #[test]
    fn embedding_is_multiplicative() {
        for q in [a2(), Quiver::cycle(3)] {
            let pairs = [
                (x(&q, 0, 1), x(&q, 1, 0)),
                (x(&q, 0, 0), x(&q, 0, 2)),
                (
                    shuffle_mul(&x(&q, 0, 0), &x(&q, 1, 1), &q).unwrap(),
                    x(&q, 0, 1),
                ),
            ];
            for (f, g) in pairs {
                let lhs = embed(&shuffle_mul(&f, &g, &q).unwrap(), &q).unwrap();
                let rhs = localized_mul(&embed(&f, &q).unwrap(), &embed(&g, &q).unwrap(), &q)
                    .unwrap();
                assert!(lhs.eq_rational(&rhs), "embedding must be a homomorphism");
            }
        }
    }

    #[test]
    fn localized_values_stay_symmetric() {
        let q = one_vertex();
        let u = embed(&x(&q, 0, 1), &q).unwrap();
        let sq = localized_mul(&u, &u, &q).unwrap();
        sq.check_symmetric().unwrap();
    }

    #[test]
    fn fac_rational_form_one_vertex() {
        let q = one_vertex();
        let e = DimVec(alloc::vec![1]);
        let k = fac(&e, &e, &q).unwrap();
        let num = &(&l(0, 1) - &l(0, 2)) + &Poly::hbar();
        let expect = RatFun::new(num, &[(&l(0, 1) - &l(0, 2), 1)]).unwrap();
        assert!(k.eq_rational(&expect));
    }

    #[test]
    fn rejects_mismatched_shapes() {
        let q = a2();
        let f = ShuffleElement::generator(3, 0, 0);
        assert!(shuffle_mul(&f, &f, &q).is_err());
        let bad = ShuffleElement::new(DimVec(alloc::vec![1, 0]), l(1, 1));
        assert!(bad.is_err());
        let asym = ShuffleElement::new(DimVec(alloc::vec![2, 0]), l(0, 1));
        assert!(matches!(asym, Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn generator_powers_shuffle_power() {
        // x_{0,0}^(star 3) at one vertex = 3! by symmetrization
        let q = one_vertex();
        let x0 = x(&q, 0, 0);
        let sq = shuffle_mul(&x0, &x0, &q).unwrap();
        let cube = shuffle_mul(&sq, &x0, &q).unwrap();
        assert_eq!(cube.poly(), &Poly::int(6));
    }

    #[test]
    fn random_elements_are_symmetric_and_seeded() {
        let w = DimVec(alloc::vec![2, 1]);
        let mut g1 = SplitMix64::new(41);
        let mut g2 = SplitMix64::new(41);
        let a = random_element(&w, 3, &mut g1);
        let b = random_element(&w, 3, &mut g2);
        assert_eq!(a, b);
        assert!(ShuffleElement::new(w.clone(), a.poly().clone()).is_ok());
        let mut g3 = SplitMix64::new(42);
        let c = random_element(&w, 3, &mut g3);
        assert_ne!(a, c);
    }
}
