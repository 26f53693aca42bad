//! Linear forms: the only denominators the engine ever produces.
//!
//! A form is `sum of slot terms + c_h*h + c_0` with at most two slot
//! variables, normalized so the coefficient of the smallest variable (slots
//! first, then h) is exactly +1. Normalization makes the factored-denominator
//! representation canonical: equal forms compare equal structurally. Forms in
//! h alone arise transiently when residues are taken at points whose
//! difference is a multiple of h; constants never qualify.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::poly::{Poly, Var};
use crate::scalar::Rat;
use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LinearForm {
    /// Sorted by variable; all coefficients nonzero; first coefficient is +1.
    slots: Vec<(Var, Rat)>,
    hbar: Rat,
    constant: Rat,
}

impl LinearForm {
    /// Builds the normalized form `scale * form == input`. Fails unless the
    /// input is linear, involves 1 or 2 slot variables, and is not constant.
    pub fn from_poly(p: &Poly) -> Result<(LinearForm, Rat)> {
        let mut slots: Vec<(Var, Rat)> = Vec::new();
        let mut hbar = Rat::zero();
        let mut constant = Rat::zero();
        for (m, c) in p.terms() {
            match m.factors() {
                [] => constant = c.clone(),
                [(v, 1)] => match v {
                    Var::Hbar => hbar = c.clone(),
                    Var::Slot { .. } => slots.push((*v, c.clone())),
                },
                _ => {
                    return Err(Error::Shape(alloc::format!(
                        "expected a linear form, found term {m}"
                    )))
                }
            }
        }
        if slots.is_empty() && hbar.is_zero() {
            return Err(Error::Shape(String::from(
                "linear form must involve a variable, constants do not qualify",
            )));
        }
        if slots.len() > 2 {
            return Err(Error::Shape(alloc::format!(
                "linear form involves {} slot variables, at most 2 allowed",
                slots.len()
            )));
        }
        slots.sort_by(|a, b| a.0.cmp(&b.0));
        let scale = if slots.is_empty() { hbar.clone() } else { slots[0].1.clone() };
        debug_assert!(!scale.is_zero());
        let inv = Rat::one() / scale.clone();
        for (_, c) in slots.iter_mut() {
            *c *= &inv;
        }
        hbar *= &inv;
        constant *= &inv;
        Ok((LinearForm { slots, hbar, constant }, scale))
    }

    /// `x - r`: handy direct constructor for series work.
    pub fn var_minus(v: Var, r: &Poly) -> Result<(LinearForm, Rat)> {
        LinearForm::from_poly(&(&Poly::var(v) - r))
    }

    pub fn as_poly(&self) -> Poly {
        let mut p = Poly::constant(self.constant.clone());
        p.add_term(crate::poly::Mono::var(Var::Hbar), self.hbar.clone());
        for (v, c) in &self.slots {
            p.add_term(crate::poly::Mono::var(*v), c.clone());
        }
        p
    }

    /// The distinguished (smallest, monic) variable.
    pub fn lead_var(&self) -> Var {
        self.slots.first().map(|&(v, _)| v).unwrap_or(Var::Hbar)
    }

    pub fn coeff_of(&self, v: Var) -> Rat {
        if v == Var::Hbar {
            return self.hbar.clone();
        }
        self.slots
            .iter()
            .find(|(w, _)| *w == v)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rat::zero)
    }

    pub fn involves(&self, v: Var) -> bool {
        if v == Var::Hbar {
            return !self.hbar.is_zero();
        }
        self.slots.iter().any(|(w, _)| *w == v)
    }

    /// `self` minus its `v` term, negated: the root of the form in `v` when
    /// the `v` coefficient is 1 (i.e. `form = v - root`).
    pub fn root_in(&self, v: Var) -> Result<Poly> {
        let c = self.coeff_of(v);
        if !c.is_one() {
            return Err(Error::Shape(alloc::format!(
                "form {self} is not monic in {v}"
            )));
        }
        let mut p = self.as_poly();
        p.add_term(crate::poly::Mono::var(v), -Rat::one());
        Ok(-&p)
    }

    /// Renames variables; returns the renormalized form and the sign/scale
    /// picked up (result_scale * new_form == old_form with vars renamed).
    pub fn map_vars(&self, f: impl Fn(Var) -> Var) -> Result<(LinearForm, Rat)> {
        LinearForm::from_poly(&self.as_poly().map_vars(f))
    }

    /// Substitutes a polynomial for a variable. The result is returned as a
    /// plain polynomial (it may be constant or no longer a form).
    pub fn substitute(&self, v: Var, value: &Poly) -> Poly {
        self.as_poly().substitute(v, value)
    }

    pub fn eval_hbar(&self, value: &Rat) -> Poly {
        self.as_poly().eval_var(Var::Hbar, value)
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_poly())
    }
}

/// Exact division of `p` by a linear form, via synthetic division in the
/// form's distinguished variable. Returns None when the remainder is nonzero.
pub fn div_exact(p: &Poly, form: &LinearForm) -> Option<Poly> {
    let x = form.lead_var();
    // form = x + g  =>  dividing by (x - r) with r = -g
    let mut g = form.as_poly();
    g.add_term(crate::poly::Mono::var(x), -Rat::one());
    let r = -&g;

    let mut layers: alloc::collections::BTreeMap<u32, Poly> = alloc::collections::BTreeMap::new();
    for (m, c) in p.terms() {
        let (rest, k) = m.split_var(x);
        layers
            .entry(k)
            .or_insert_with(Poly::zero)
            .add_term(rest, c.clone());
    }
    let top = *layers.keys().last().unwrap_or(&0);
    if top == 0 {
        return p.is_zero().then(Poly::zero);
    }
    let layer = |e: u32| layers.get(&e).cloned().unwrap_or_else(Poly::zero);
    // b_{top-1} = N_top; b_{e-1} = N_e + r*b_e; remainder = N_0 + r*b_0
    let mut quotient = Poly::zero();
    let mut carry = layer(top);
    for e in (1..=top).rev() {
        quotient += &carry.mul_mono(&crate::poly::Mono::var_pow(x, e - 1));
        if e > 1 {
            carry = &layer(e - 1) + &(&r * &carry);
        }
    }
    let remainder = &layer(0) + &(&r * &carry);
    remainder.is_zero().then_some(quotient)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_i};

    fn l(v: u16, s: u16) -> Poly {
        Poly::var(Var::slot(v, s))
    }

    #[test]
    fn normalization_extracts_scale() {
        // -2*l(0,1) + 2*l(0,2) - h  ==  -2 * (l(0,1) - l(0,2) + h/2)
        let p = &(&l(0, 2) - &l(0, 1)).scale(&rat_i(2)) - &Poly::hbar();
        let (form, scale) = LinearForm::from_poly(&p).unwrap();
        assert_eq!(scale, rat_i(-2));
        assert_eq!(form.as_poly().scale(&scale), p);
        assert_eq!(form.lead_var(), Var::slot(0, 1));
        assert_eq!(form.coeff_of(Var::slot(0, 1)), rat_i(1));
        assert_eq!(form.coeff_of(Var::Hbar), rat(1, 2));
    }

    #[test]
    fn rejects_nonlinear_and_constant() {
        assert!(LinearForm::from_poly(&(&l(0, 1) * &l(0, 1))).is_err());
        assert!(LinearForm::from_poly(&Poly::int(3)).is_err());
        // h alone is allowed: it shows up as a residue-point difference
        let (hform, scale) = LinearForm::from_poly(&Poly::hbar().scale(&rat_i(2))).unwrap();
        assert_eq!(scale, rat_i(2));
        assert_eq!(hform.lead_var(), Var::Hbar);
    }

    #[test]
    fn division_exact_and_inexact() {
        // (x - y + h) * (x + y) divided back
        let x = &l(0, 1);
        let y = &l(0, 2);
        let f = &(x - y) + &Poly::hbar();
        let g = x + y;
        let prod = &f * &g;
        let (form, scale) = LinearForm::from_poly(&f).unwrap();
        assert_eq!(scale, rat_i(1));
        let q = div_exact(&prod, &form).expect("divides");
        assert_eq!(q, g);
        assert!(div_exact(&(&prod + &Poly::one()), &form).is_none());
        // dividing the zero polynomial works
        assert_eq!(div_exact(&Poly::zero(), &form), Some(Poly::zero()));
    }

    #[test]
    fn division_with_multiplicity() {
        let f = &(&l(0, 1) - &l(0, 2)) + &Poly::hbar();
        let (form, _) = LinearForm::from_poly(&f).unwrap();
        let sq = &f * &f;
        let q1 = div_exact(&sq, &form).unwrap();
        assert_eq!(q1, f);
        let q2 = div_exact(&q1, &form).unwrap();
        assert_eq!(q2, Poly::one());
        assert!(div_exact(&q2, &form).is_none());
    }

    #[test]
    fn renaming_tracks_sign() {
        // l(0,1) - l(0,2) under the swap becomes l(0,2) - l(0,1):
        // renormalizes to -(l(0,1) - l(0,2))
        let (form, _) = LinearForm::from_poly(&(&l(0, 1) - &l(0, 2))).unwrap();
        let (swapped, sign) = form
            .map_vars(|v| match v {
                Var::Slot { vertex: 0, slot: 1 } => Var::slot(0, 2),
                Var::Slot { vertex: 0, slot: 2 } => Var::slot(0, 1),
                other => other,
            })
            .unwrap();
        assert_eq!(sign, rat_i(-1));
        assert_eq!(swapped, form);
    }

    #[test]
    fn root_in_lead_var() {
        let p = &(&l(0, 1) - &l(1, 1)) + &Poly::hbar().scale(&rat(1, 2));
        let (form, _) = LinearForm::from_poly(&p).unwrap();
        let root = form.root_in(Var::slot(0, 1)).unwrap();
        assert_eq!(root, &l(1, 1) - &Poly::hbar().scale(&rat(1, 2)));
        // substituting the root kills the form
        assert!(form.substitute(Var::slot(0, 1), &root).is_zero());
    }
}
