//! Multivariate polynomials with exact rational coefficients.
//!
//! These carry formal time variables through the fermion oracle and the
//! symbolic Schur identities. Each variable has a weight (for a time variable
//! `t_k` the weight is `k`), so truncation by total weighted degree is
//! available.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::Ring;

/// A variable: a family tag plus an index. Families 0..=3 are the four time
/// sequences `t^(1), t^(2), t̄^(1), t̄^(2)`; the index is the time subscript
/// and also the weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub family: u8,
    pub index: u32,
}

impl Var {
    pub const T1: u8 = 0;
    pub const T2: u8 = 1;
    pub const TB1: u8 = 2;
    pub const TB2: u8 = 3;
    pub const X: u8 = 4;
    pub const Y: u8 = 5;

    pub fn new(family: u8, index: u32) -> Var {
        Var { family, index }
    }

    pub fn weight(&self) -> u32 {
        match self.family {
            Var::X | Var::Y => 1,
            _ => self.index,
        }
    }

    fn name(&self) -> String {
        match self.family {
            Var::T1 => format!("t1_{}", self.index),
            Var::T2 => format!("t2_{}", self.index),
            Var::TB1 => format!("tb1_{}", self.index),
            Var::TB2 => format!("tb2_{}", self.index),
            Var::X => format!("x{}", self.index),
            Var::Y => format!("y{}", self.index),
            f => format!("v{f}_{}", self.index),
        }
    }
}

/// Sorted list of `(variable, exponent)` with positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().map(|(v, e)| v.weight() * e).sum()
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn var(v: Var) -> Poly {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(v), BigRational::one());
        Poly { terms }
    }

    pub fn constant(c: BigRational) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    /// Drops every term whose weighted degree exceeds `max`.
    pub fn truncate(&self, max: u32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.weight() <= max)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn min_weight(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.weight()).min()
    }

    /// Product truncated at weighted degree `max`.
    pub fn mul_trunc(&self, other: &Poly, max: u32) -> Poly {
        let mut out: BTreeMap<Monomial, BigRational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            let wa = ma.weight();
            if wa > max {
                continue;
            }
            for (mb, cb) in &other.terms {
                if wa + mb.weight() > max {
                    continue;
                }
                add_term(&mut out, ma.mul(mb), ca * cb);
            }
        }
        Poly { terms: out }
    }

    /// Substitutes rational values for variables; unlisted variables stay.
    pub fn eval_partial(&self, f: &dyn Fn(Var) -> Option<BigRational>) -> Poly {
        let mut out = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut rest = Vec::new();
            for &(v, e) in &m.0 {
                match f(v) {
                    Some(x) => coef *= num_traits::pow(x, e as usize),
                    None => rest.push((v, e)),
                }
            }
            add_term(&mut out, Monomial(rest), coef);
        }
        Poly { terms: out }
    }

    /// Full evaluation at rational values.
    pub fn eval(&self, f: &dyn Fn(Var) -> BigRational) -> BigRational {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter()
                    .fold(c.clone(), |acc, &(v, e)| acc * num_traits::pow(f(v), e as usize))
            })
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// The constant term.
    pub fn constant_term(&self) -> BigRational {
        self.terms
            .get(&Monomial::one())
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }
}

fn add_term(map: &mut BTreeMap<Monomial, BigRational>, m: Monomial, c: BigRational) {
    if c.is_zero() {
        return;
    }
    match map.entry(m) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        for (m, c) in rhs.terms {
            add_term(&mut self.terms, m, c);
        }
        self
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        self + (-rhs)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        self.mul_trunc(&rhs, u32::MAX)
    }
}

impl Zero for Poly {
    fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Poly {
    fn one() -> Self {
        Poly::constant(BigRational::one())
    }
}

impl Ring for Poly {
    fn from_ratio(num: i64, den: i64) -> Self {
        Poly::constant(BigRational::from_ratio(num, den))
    }
}

/// Canonical text: terms in monomial order, e.g. `1/2*t1_1^2 - t1_2`.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let vars: Vec<String> =
                m.0.iter()
                    .map(|(v, e)| {
                        if *e == 1 {
                            v.name()
                        } else {
                            format!("{}^{}", v.name(), e)
                        }
                    })
                    .collect();
            if vars.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                f.write_str(&vars.join("*"))?;
            } else {
                write!(f, "{}*{}", abs, vars.join("*"))?;
            }
        }
        Ok(())
    }
}
