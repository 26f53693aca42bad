//! Rational functions with factored denominators.
//!
//! The denominator is kept as a multiset of normalized linear forms, never
//! expanded unless asked. All cancellation is exact trial division by those
//! forms; nothing here ever needs a general multivariate gcd.

use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::linear::{div_exact, LinearForm};
use crate::poly::{Poly, Var};
use crate::scalar::{rat_i, Rat};
use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatFun {
    num: Poly,
    /// Sorted by form; multiplicities >= 1. Empty denominator means `num`.
    den: Vec<(LinearForm, u32)>,
}

impl RatFun {
    pub fn zero() -> RatFun {
        RatFun { num: Poly::zero(), den: Vec::new() }
    }

    pub fn one() -> RatFun {
        RatFun::from_poly(Poly::one())
    }

    pub fn from_poly(num: Poly) -> RatFun {
        RatFun { num, den: Vec::new() }
    }

    /// `num / prod(factors)`. Each factor is normalized; its scale is folded
    /// into the numerator. Zero factors are rejected upstream by the form
    /// constructor (constants do not qualify as forms).
    pub fn new(num: Poly, factors: &[(Poly, u32)]) -> Result<RatFun> {
        let mut rf = RatFun::from_poly(num);
        for (p, mult) in factors {
            rf = rf.div_linear(p, *mult)?;
        }
        Ok(rf)
    }

    /// Divides by `form^mult` where `form` is given as a linear polynomial.
    pub fn div_linear(&self, p: &Poly, mult: u32) -> Result<RatFun> {
        if mult == 0 {
            return Ok(self.clone());
        }
        let (form, scale) = LinearForm::from_poly(p)?;
        let mut out = self.clone();
        let inv = Rat::one() / scale;
        for _ in 0..mult {
            out.num = out.num.scale(&inv);
        }
        out.push_den(form, mult);
        Ok(out)
    }

    fn push_den(&mut self, form: LinearForm, mult: u32) {
        if mult == 0 {
            return;
        }
        match self.den.binary_search_by(|(f, _)| f.cmp(&form)) {
            Ok(i) => self.den[i].1 += mult,
            Err(i) => self.den.insert(i, (form, mult)),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den_factors(&self) -> &[(LinearForm, u32)] {
        &self.den
    }

    pub fn den_poly(&self) -> Poly {
        let mut d = Poly::one();
        for (f, m) in &self.den {
            d = &d * &f.as_poly().pow(*m);
        }
        d
    }

    pub fn is_zero_exact(&self) -> bool {
        self.num.is_zero()
    }

    pub fn mul(&self, other: &RatFun) -> RatFun {
        let mut out = RatFun {
            num: &self.num * &other.num,
            den: self.den.clone(),
        };
        for (f, m) in &other.den {
            out.push_den(f.clone(), *m);
        }
        out
    }

    pub fn mul_poly(&self, p: &Poly) -> RatFun {
        RatFun { num: &self.num * p, den: self.den.clone() }
    }

    pub fn scale(&self, c: &Rat) -> RatFun {
        RatFun { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn neg(&self) -> RatFun {
        RatFun { num: -&self.num, den: self.den.clone() }
    }

    pub fn add(&self, other: &RatFun) -> RatFun {
        // common denominator: per-form max multiplicity
        let mut lcd: Vec<(LinearForm, u32)> = self.den.clone();
        for (f, m) in &other.den {
            match lcd.binary_search_by(|(g, _)| g.cmp(f)) {
                Ok(i) => lcd[i].1 = lcd[i].1.max(*m),
                Err(i) => lcd.insert(i, (f.clone(), *m)),
            }
        }
        let complement = |den: &[(LinearForm, u32)]| -> Poly {
            let mut p = Poly::one();
            for (f, m) in &lcd {
                let have = den
                    .binary_search_by(|(g, _)| g.cmp(f))
                    .map(|i| den[i].1)
                    .unwrap_or(0);
                if *m > have {
                    p = &p * &f.as_poly().pow(m - have);
                }
            }
            p
        };
        let num = &(&self.num * &complement(&self.den))
            + &(&other.num * &complement(&other.den));
        RatFun { num, den: lcd }
    }

    pub fn sub(&self, other: &RatFun) -> RatFun {
        self.add(&other.neg())
    }

    /// Cancels denominator forms that divide the numerator exactly.
    pub fn normalized(&self) -> RatFun {
        let mut num = self.num.clone();
        let mut den: Vec<(LinearForm, u32)> = Vec::with_capacity(self.den.len());
        if num.is_zero() {
            return RatFun::zero();
        }
        for (f, m) in &self.den {
            let mut m = *m;
            while m > 0 {
                match div_exact(&num, f) {
                    Some(q) => {
                        num = q;
                        m -= 1;
                    }
                    None => break,
                }
            }
            if m > 0 {
                den.push((f.clone(), m));
            }
        }
        RatFun { num, den }
    }

    /// Some(p) when the function is (exactly) the polynomial p.
    pub fn as_poly(&self) -> Option<Poly> {
        let n = self.normalized();
        n.den.is_empty().then_some(n.num)
    }

    pub fn into_poly(self) -> Result<Poly> {
        let n = self.normalized();
        if n.den.is_empty() {
            Ok(n.num)
        } else {
            Err(Error::Internal(alloc::format!(
                "expected a polynomial, denominator {} survives cancellation",
                n.den_display()
            )))
        }
    }

    fn den_display(&self) -> alloc::string::String {
        use alloc::string::ToString;
        let mut s = alloc::string::String::new();
        for (i, (f, m)) in self.den.iter().enumerate() {
            if i > 0 {
                s.push('*');
            }
            s.push('(');
            s.push_str(&f.to_string());
            s.push(')');
            if *m > 1 {
                s.push('^');
                s.push_str(&m.to_string());
            }
        }
        s
    }

    /// Mathematical equality by cross-multiplication; representation-free.
    pub fn eq_rational(&self, other: &RatFun) -> bool {
        &self.num * &other.den_poly() == &other.num * &self.den_poly()
    }

    /// Renames variables; denominator forms renormalize, signs fold into the
    /// numerator.
    pub fn map_vars(&self, f: impl Fn(Var) -> Var + Copy) -> Result<RatFun> {
        let mut out = RatFun::from_poly(self.num.map_vars(f));
        for (form, m) in &self.den {
            let (renamed, scale) = form.map_vars(f)?;
            let inv = Rat::one() / scale;
            for _ in 0..*m {
                out.num = out.num.scale(&inv);
            }
            out.push_den(renamed, *m);
        }
        Ok(out)
    }

    /// Substitutes a linear polynomial for a variable. Errors when the point
    /// sits on one of the poles.
    pub fn substitute(&self, v: Var, value: &Poly) -> Result<RatFun> {
        if value.total_degree().unwrap_or(0) > 1 {
            return Err(Error::Unsupported(alloc::string::String::from(
                "only linear substitutions keep denominators linear",
            )));
        }
        let mut out = RatFun::from_poly(self.num.substitute(v, value));
        for (form, m) in &self.den {
            let sub = form.substitute(v, value);
            match sub.as_constant() {
                Some(c) if c.is_zero() => {
                    return Err(Error::PoleAtPoint(alloc::format!(
                        "denominator {form} vanishes identically under the substitution"
                    )))
                }
                Some(c) => {
                    let inv = Rat::one() / c;
                    for _ in 0..*m {
                        out.num = out.num.scale(&inv);
                    }
                }
                None => {
                    let (nf, scale) = LinearForm::from_poly(&sub)?;
                    let inv = Rat::one() / scale;
                    for _ in 0..*m {
                        out.num = out.num.scale(&inv);
                    }
                    out.push_den(nf, *m);
                }
            }
        }
        Ok(out)
    }

    /// d/dv. Denominator forms are linear, so their derivatives are the
    /// constants `coeff_of(v)` and the quotient rule stays in factored shape:
    /// (N / prod F_i^{m_i})' = (N' prod F_i - N sum_i m_i c_i prod_{j!=i} F_j)
    ///                         / prod F_i^{m_i + 1).
    pub fn derivative(&self, v: Var) -> RatFun {
        let forms: Vec<&LinearForm> = self.den.iter().map(|(f, _)| f).collect();
        let prod_all = |skip: Option<usize>| -> Poly {
            let mut p = Poly::one();
            for (i, f) in forms.iter().enumerate() {
                if Some(i) != skip {
                    p = &p * &f.as_poly();
                }
            }
            p
        };
        let mut num = &self.num.derivative(v) * &prod_all(None);
        for (i, (f, m)) in self.den.iter().enumerate() {
            let c = f.coeff_of(v);
            if c.is_zero() {
                continue;
            }
            let term = (&self.num * &prod_all(Some(i))).scale(&(c * rat_i(*m as i64)));
            num = &num - &term;
        }
        let den = self.den.iter().map(|(f, m)| (f.clone(), m + 1)).collect();
        RatFun { num, den }
    }

    pub fn set_hbar_zero(&self) -> Result<RatFun> {
        self.substitute(Var::Hbar, &Poly::zero())
    }

    /// Total multiplicity of denominator forms involving `v`.
    pub fn pole_count_in(&self, v: Var) -> u32 {
        self.den
            .iter()
            .filter(|(f, _)| f.involves(v))
            .map(|(_, m)| m)
            .sum()
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({}) / ({})", self.num, self.den_display())
    }
}
