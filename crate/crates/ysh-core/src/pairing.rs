//! Residue pairings on the shuffle algebra.
//!
//! Three layers, in decreasing order of how much is pinned down:
//!
//! * rank-one pairing at weight e_k: (f, g) is read off the expansion of
//!   f(x) g(-x) at infinity. The sign is calibrated so that
//!   (lambda^r, lambda^s) = (-1)^s when r + s = -1 and 0 otherwise, which
//!   means the pairing takes +[coefficient of x^{-1}], the negative of the
//!   orientation residue_at uses (that one keeps the sum over P^1 at zero).
//! * Cartan series pairing: (H_k(u), H_k(w)) = fac(u|w)/fac(w|u), expanded
//!   in the region |u| >> |w|, returned as a coefficient table over h.
//! * the general-weight kernel fac(x_v) on a single variable set. Only the
//!   kernel itself is built; the surrounding multi-variable residue sum is
//!   deliberately not implemented, so this stays experimental.

use alloc::vec::Vec;

use crate::poly::{Poly, Var};
use crate::quiver::{DimVec, Quiver};
use crate::ratfun::RatFun;
use crate::scalar::rat_i;
use crate::series::{laurent_at_infinity, residue_at, Point};
use crate::shuffle::fac_kernel;
use crate::{Error, Result};

/// A weight-e_k element in one lambda variable, Laurent monomials allowed
/// through denominator forms.
#[derive(Clone, Debug)]
pub struct RankOneElement {
    vertex: usize,
    value: RatFun,
}

impl RankOneElement {
    /// The variable the element lives in.
    pub fn var_of(vertex: usize) -> Var {
        Var::slot(vertex as u16, 1)
    }

    pub fn new(vertex: usize, value: RatFun) -> Result<RankOneElement> {
        let x = Self::var_of(vertex);
        let mut vars = value.num().vars();
        for (form, _) in value.den_factors() {
            vars.extend(form.as_poly().vars());
        }
        for v in vars {
            if v != x && v != Var::Hbar {
                return Err(Error::Shape(alloc::format!(
                    "rank-one element at vertex {vertex} uses foreign variable {v}"
                )));
            }
        }
        Ok(RankOneElement { vertex, value })
    }

    /// lambda^r, any integer r; negative powers go to the denominator.
    pub fn monomial(vertex: usize, r: i64) -> RankOneElement {
        let x = Poly::var(Self::var_of(vertex));
        let value = if r >= 0 {
            RatFun::from_poly(x.pow(r as u32))
        } else {
            RatFun::new(Poly::one(), &[(x, (-r) as u32)]).expect("lambda is a valid form")
        };
        RankOneElement { vertex, value }
    }

    pub fn vertex(&self) -> usize {
        self.vertex
    }

    pub fn value(&self) -> &RatFun {
        &self.value
    }
}

/// Rank-one pairing. Zero across different vertices; otherwise the
/// calibrated residue of f(x) g(-x) at infinity, a rational function of h.
pub fn pair_rank_one(f: &RankOneElement, g: &RankOneElement) -> Result<RatFun> {
    if f.vertex != g.vertex {
        return Ok(RatFun::zero());
    }
    let x = RankOneElement::var_of(f.vertex);
    let minus_x = Poly::var(x).scale(&rat_i(-1));
    let g_neg = g.value.substitute(x, &minus_x)?;
    let product = f.value.mul(&g_neg);
    // +[coeff of x^{-1}] = -(residue at infinity)
    Ok(residue_at(&product, x, &Point::Infinity)?.neg())
}

/// Coefficient table of the Cartan series pairing at one vertex.
/// `entries[r][c]` is the h-polynomial at u^{-r} w^{c}, 0 <= r <= u_depth,
/// 0 <= c <= w_span.
#[derive(Clone, Debug, PartialEq)]
pub struct CartanTable {
    pub vertex: usize,
    pub u_depth: u32,
    pub w_span: u32,
    pub entries: Vec<Vec<Poly>>,
}

impl CartanTable {
    /// True exactly for the table of the constant series 1.
    pub fn is_identity(&self) -> bool {
        self.entries.iter().enumerate().all(|(r, row)| {
            row.iter().enumerate().all(|(c, p)| {
                if r == 0 && c == 0 {
                    p == &Poly::one()
                } else {
                    p.is_zero()
                }
            })
        })
    }

    pub fn set_hbar_zero(&self) -> CartanTable {
        CartanTable {
            vertex: self.vertex,
            u_depth: self.u_depth,
            w_span: self.w_span,
            entries: self
                .entries
                .iter()
                .map(|row| row.iter().map(Poly::set_hbar_zero).collect())
                .collect(),
        }
    }
}

fn loop_at(q: &Quiver, k: usize) -> bool {
    q.arrows().iter().any(|a| a.out == k && a.inc == k)
}

/// The exact rational function fac(u|w)/fac(w|u) at vertex k, with
/// u = l(k,1) and w = l(k,2). Arrows never contribute at weight pair
/// (e_k, e_k), so for a loopless vertex this is the diagonal ratio
/// (u - w + h)/(u - w - h) in disguise.
pub fn cartan_ratio(k: usize, q: &Quiver) -> Result<RatFun> {
    if k >= q.vertex_count() {
        return Err(Error::Shape(alloc::format!("vertex {k} out of range")));
    }
    if loop_at(q, k) {
        return Err(Error::Unsupported(alloc::format!(
            "cartan pairing needs a loopless vertex, got a loop at {k}"
        )));
    }
    let ek = DimVec::unit(q.vertex_count(), k);
    let fwd = fac_kernel(&ek, &ek, q, false);
    let swap = |v: Var| match v {
        Var::Slot { vertex, slot } if vertex as usize == k => {
            Var::slot(vertex, if slot == 1 { 2 } else { 1 })
        }
        other => other,
    };
    // ratio = (fwd num * swapped den) / (fwd den * swapped num)
    let mut num = Poly::one();
    for p in &fwd.num_factors {
        num = &num * p;
    }
    for form in &fwd.den_forms {
        num = &num * &form.as_poly().map_vars(swap);
    }
    let mut den: Vec<(Poly, u32)> = Vec::new();
    for form in &fwd.den_forms {
        den.push((form.as_poly(), 1));
    }
    for p in &fwd.num_factors {
        den.push((p.map_vars(swap), 1));
    }
    RatFun::new(num, &den)
}

/// Expands fac(u|w)/fac(w|u) in the region |u| >> |w| and tabulates the
/// coefficients of u^{-r} w^{c} for r <= u_depth, c <= w_span.
pub fn pair_cartan_series(k: usize, q: &Quiver, u_depth: u32, w_span: u32) -> Result<CartanTable> {
    let ratio = cartan_ratio(k, q)?;
    let u = Var::slot(k as u16, 1);
    let w = Var::slot(k as u16, 2);
    let in_u = laurent_at_infinity(&ratio, u, -(u_depth as i64))?;
    let mut entries = Vec::with_capacity(u_depth as usize + 1);
    for r in 0..=u_depth as i64 {
        let cu = in_u.coeff(-r)?;
        // inner expansion variable is w; for legal inputs the coefficient is
        // already polynomial in w, and the expansion just reads it off
        let in_w = laurent_at_infinity(&cu, w, 0)?;
        let mut row = Vec::with_capacity(w_span as usize + 1);
        for c in 0..=w_span as i64 {
            let entry = in_w.coeff(c)?.as_poly().ok_or_else(|| {
                Error::Internal(alloc::string::String::from(
                    "cartan coefficient did not reduce to a polynomial",
                ))
            })?;
            if entry.vars().iter().any(|v| *v != Var::Hbar) {
                return Err(Error::Internal(alloc::string::String::from(
                    "cartan coefficient kept a lambda variable",
                )));
            }
            row.push(entry);
        }
        entries.push(row);
    }
    Ok(CartanTable { vertex: k, u_depth, w_span, entries })
}

/// The single-variable-set kernel fac(x_v): per vertex all ordered pairs of
/// distinct slots contribute (l_s - l_t + h)/(l_t - l_s), and every arrow
/// contributes its two shifted blocks on the same variables.
pub fn pairing_kernel(v: &DimVec, q: &Quiver) -> Result<RatFun> {
    if v.len() != q.vertex_count() {
        return Err(Error::Shape(alloc::format!(
            "weight has {} entries for {} vertices",
            v.len(),
            q.vertex_count()
        )));
    }
    let slot = |i: usize, s: u32| Poly::var(Var::slot(i as u16, s as u16 + 1));
    let mut num = Poly::one();
    let mut den: Vec<(Poly, u32)> = Vec::new();
    for i in 0..v.len() {
        let vi = v.get(i);
        for s in 0..vi {
            for t in 0..vi {
                if s == t {
                    continue;
                }
                num = &num * &(&(&slot(i, s) - &slot(i, t)) + &Poly::hbar());
                den.push((&slot(i, t) - &slot(i, s), 1));
            }
        }
    }
    for a in q.arrows() {
        let half = |m: i64| Poly::hbar().scale(&crate::scalar::rat(m, 2));
        for s in 0..v.get(a.out) {
            for t in 0..v.get(a.inc) {
                num = &num * &(&(&slot(a.inc, t) - &slot(a.out, s)) + &half(a.weight));
            }
        }
        for s in 0..v.get(a.inc) {
            for t in 0..v.get(a.out) {
                num = &num * &(&(&slot(a.out, t) - &slot(a.inc, s)) + &half(a.weight_rev));
            }
        }
    }
    RatFun::new(num, &den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn rank_one_generator_table() {
        // (lambda^r, lambda^s) = (-1)^s exactly when r + s = -1
        for r in -4..=4i64 {
            for s in -4..=4i64 {
                let f = RankOneElement::monomial(0, r);
                let g = RankOneElement::monomial(0, s);
                let got = pair_rank_one(&f, &g).unwrap();
                let expect = if r + s == -1 {
                    RatFun::from_poly(Poly::int(if s % 2 == 0 { 1 } else { -1 }))
                } else {
                    RatFun::zero()
                };
                assert!(got.eq_rational(&expect), "r={r} s={s}: got {got}");
            }
        }
    }

    #[test]
    fn rank_one_drops_cross_vertex_pairs() {
        let f = RankOneElement::monomial(0, 0);
        let g = RankOneElement::monomial(1, -1);
        assert!(pair_rank_one(&f, &g).unwrap().is_zero_exact());
    }

    #[test]
    fn rank_one_is_bilinear() {
        let x = Poly::var(RankOneElement::var_of(0));
        let f1 = RankOneElement::monomial(0, 2);
        let f2 = RankOneElement::monomial(0, 0);
        let combo = RankOneElement::new(
            0,
            RatFun::from_poly(&x.pow(2).scale(&rat_i(3)) + &Poly::int(5)),
        )
        .unwrap();
        let g = RankOneElement::monomial(0, -3);
        let a = pair_rank_one(&combo, &g).unwrap();
        let b1 = pair_rank_one(&f1, &g).unwrap();
        let b2 = pair_rank_one(&f2, &g).unwrap();
        let lin = b1.scale(&rat_i(3)).add(&b2.scale(&rat_i(5)));
        assert!(a.eq_rational(&lin));
    }

    #[test]
    fn rank_one_rejects_foreign_variables() {
        let bad = RatFun::from_poly(Poly::var(Var::slot(1, 1)));
        assert!(RankOneElement::new(0, bad).is_err());
    }

    #[test]
    fn rank_one_polynomial_inputs_pair_to_zero() {
        for r in 0..4 {
            for s in 0..4 {
                let f = RankOneElement::monomial(0, r);
                let g = RankOneElement::monomial(0, s);
                assert!(pair_rank_one(&f, &g).unwrap().is_zero_exact());
            }
        }
    }

    #[test]
    fn rank_one_with_shifted_pole() {
        // f = 1/(x + h), g = 1: expansion of 1/(x+h) starts at x^{-1} with
        // coefficient 1, so the pairing is 1
        let x = Poly::var(RankOneElement::var_of(0));
        let f = RankOneElement::new(
            0,
            RatFun::new(Poly::one(), &[(&x + &Poly::hbar(), 1)]).unwrap(),
        )
        .unwrap();
        let g = RankOneElement::monomial(0, 0);
        assert!(pair_rank_one(&f, &g).unwrap().eq_rational(&RatFun::one()));
    }

    #[test]
    fn cartan_ratio_closed_form() {
        // (u - w + h)/(u - w - h) regardless of arrows at other vertices
        let q = Quiver::cycle(3);
        let ratio = cartan_ratio(1, &q).unwrap();
        let u = Poly::var(Var::slot(1, 1));
        let w = Poly::var(Var::slot(1, 2));
        let num = &(&u - &w) + &Poly::hbar();
        let den = &(&u - &w) - &Poly::hbar();
        let expect = RatFun::new(num, &[(den, 1)]).unwrap();
        assert!(ratio.eq_rational(&expect));
    }

    #[test]
    fn cartan_table_small_orders() {
        let q = Quiver::path(2);
        let t = pair_cartan_series(0, &q, 3, 2).unwrap();
        let h = Poly::hbar();
        // row u^0: the constant 1
        assert_eq!(t.entries[0], alloc::vec![Poly::one(), Poly::zero(), Poly::zero()]);
        // row u^{-r}: 2h (w + h)^{r-1}
        assert_eq!(t.entries[1], alloc::vec![h.scale(&rat_i(2)), Poly::zero(), Poly::zero()]);
        assert_eq!(
            t.entries[2],
            alloc::vec![h.pow(2).scale(&rat_i(2)), h.scale(&rat_i(2)), Poly::zero()]
        );
        assert_eq!(
            t.entries[3],
            alloc::vec![h.pow(3).scale(&rat_i(2)), h.pow(2).scale(&rat_i(4)), h.scale(&rat_i(2))]
        );
    }

    #[test]
    fn cartan_table_hbar_zero_is_identity() {
        let q = Quiver::cycle(3);
        let t = pair_cartan_series(2, &q, 4, 3).unwrap();
        assert!(!t.is_identity());
        assert!(t.set_hbar_zero().is_identity());
    }

    #[test]
    fn cartan_swap_product_is_one() {
        let q = Quiver::path(2);
        let ratio = cartan_ratio(0, &q).unwrap();
        let swapped = ratio
            .map_vars(|v| match v {
                Var::Slot { vertex: 0, slot: 1 } => Var::slot(0, 2),
                Var::Slot { vertex: 0, slot: 2 } => Var::slot(0, 1),
                other => other,
            })
            .unwrap();
        assert!(ratio.mul(&swapped).eq_rational(&RatFun::one()));
    }

    #[test]
    fn cartan_rejects_loops_and_bad_vertex() {
        let q = Quiver::from_arrows(1, &[(0, 0)], true).unwrap();
        assert!(matches!(cartan_ratio(0, &q), Err(Error::Unsupported(_))));
        let p = Quiver::path(2);
        assert!(cartan_ratio(5, &p).is_err());
    }

    #[test]
    fn kernel_unit_weights_and_zero() {
        let q = Quiver::cycle(3);
        let one = RatFun::one();
        assert!(pairing_kernel(&DimVec::unit(3, 0), &q).unwrap().eq_rational(&one));
        assert!(pairing_kernel(&DimVec::zero(3), &q).unwrap().eq_rational(&one));
    }

    #[test]
    fn kernel_double_weight_single_vertex() {
        let q = Quiver::from_arrows(1, &[], false).unwrap();
        let got = pairing_kernel(&DimVec(alloc::vec![2]), &q).unwrap();
        let l1 = Poly::var(Var::slot(0, 1));
        let l2 = Poly::var(Var::slot(0, 2));
        let h = Poly::hbar();
        let num = &(&(&l1 - &l2) + &h) * &(&(&l2 - &l1) + &h);
        let expect = RatFun::new(
            num,
            &[(&l2 - &l1, 1), (&l1 - &l2, 1)],
        )
        .unwrap();
        assert!(got.eq_rational(&expect));
    }

    #[test]
    fn kernel_picks_up_arrow_blocks() {
        // weight (1,1) on the path: no diagonal pairs, one arrow, two blocks
        let q = Quiver::path(2);
        let got = pairing_kernel(&DimVec(alloc::vec![1, 1]), &q).unwrap();
        let p = Poly::var(Var::slot(0, 1));
        let qv = Poly::var(Var::slot(1, 1));
        let half = Poly::hbar().scale(&rat(1, 2));
        let expect = RatFun::from_poly(
            &(&(&qv - &p) + &half) * &(&(&p - &qv) + &half),
        );
        assert!(got.eq_rational(&expect));
    }
}
