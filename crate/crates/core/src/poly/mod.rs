//! Exact sparse multivariate polynomials over big integers / big rationals.
//!
//! Variables are `x1, x2, ...` with algebraic degree 1 (cohomological degree
//! 2 in the geometric reading). Monomials are ordered so that the leading
//! monomial of a Schubert polynomial is `x^code(w)`: compare exponent
//! vectors from the highest variable index downwards, larger exponent wins.

mod schubert;

pub use schubert::{
    coinvariant_normal_form, divided_difference_chain, expand_in_schubert_basis,
    schubert_polynomial, symmetric_generator, SchubertExpansion, SymmetricKind,
};

use crate::error::{Error, Result};
use num::traits::Signed;
use num::{BigInt, BigRational, One, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Exponent vector with finite support; trailing zeros are trimmed so equal
/// monomials compare equal regardless of how many variables were in play.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        let mut v = exps.to_vec();
        while v.last() == Some(&0) {
            v.pop();
        }
        Monomial(v)
    }

    /// `x_i` (1-based).
    pub fn variable(i: usize) -> Self {
        assert!(i >= 1, "variables are 1-based");
        let mut v = vec![0; i];
        v[i - 1] = 1;
        Monomial(v)
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.0.get(i - 1).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    /// Largest variable index with nonzero exponent (0 for the unit).
    pub fn max_var(&self) -> usize {
        self.0.len()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let len = self.0.len().max(other.0.len());
        let mut v = vec![0u32; len];
        for (i, slot) in v.iter_mut().enumerate() {
            *slot = self.0.get(i).copied().unwrap_or(0) + other.0.get(i).copied().unwrap_or(0);
        }
        Monomial(v)
    }

    fn with_exponent(&self, i: usize, e: u32) -> Monomial {
        let len = self.0.len().max(i);
        let mut v = self.0.clone();
        v.resize(len, 0);
        v[i - 1] = e;
        Monomial::from_exponents(&v)
    }

    /// Swaps the exponents of `x_i` and `x_j`.
    pub fn swap_vars(&self, i: usize, j: usize) -> Monomial {
        let len = self.0.len().max(i).max(j);
        let mut v = self.0.clone();
        v.resize(len, 0);
        v.swap(i - 1, j - 1);
        Monomial::from_exponents(&v)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let len = self.0.len().max(other.0.len());
        for idx in (0..len).rev() {
            let a = self.0.get(idx).copied().unwrap_or(0);
            let b = other.0.get(idx).copied().unwrap_or(0);
            match a.cmp(&b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Coefficient rings the polynomial engine works over.
pub trait Coeff:
    Clone + PartialEq + fmt::Debug + fmt::Display + Signed + std::str::FromStr + Send + Sync + 'static
{
}

impl Coeff for BigInt {}
impl Coeff for BigRational {}

/// Sparse polynomial; no zero coefficients are ever stored.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly<C: Coeff> {
    terms: BTreeMap<Monomial, C>,
}

pub type IntPolynomial = Poly<BigInt>;
pub type QPolynomial = Poly<BigRational>;

impl<C: Coeff> Poly<C> {
    pub fn zero() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Poly::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::unit(), c);
        }
        Poly { terms }
    }

    pub fn from_int(v: i64) -> Self
    where
        C: From<i64>,
    {
        Poly::constant(C::from(v))
    }

    /// `x_i`.
    pub fn variable(i: usize) -> Self {
        Poly::term(Monomial::variable(i), C::one())
    }

    pub fn term(m: Monomial, c: C) -> Self {
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

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    /// Leading term in the Schubert term order (largest monomial).
    pub fn leading(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    /// Largest variable index appearing.
    pub fn max_var(&self) -> usize {
        self.terms.keys().map(|m| m.max_var()).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.total_degree());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// Splits into homogeneous components, keyed by total degree.
    pub fn homogeneous_components(&self) -> BTreeMap<usize, Poly<C>> {
        let mut out: BTreeMap<usize, Poly<C>> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.total_degree())
                .or_insert_with(Poly::zero)
                .add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly<C>) -> Poly<C> {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly<C>) -> Poly<C> {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly<C> {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Poly<C>) -> Poly<C> {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        out
    }

    pub fn scale(&self, c: &C) -> Poly<C> {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k.clone() * c.clone()))
                .collect(),
        }
    }

    /// Adds `c * p` in place.
    pub fn add_scaled(&mut self, c: &C, p: &Poly<C>) {
        if c.is_zero() {
            return;
        }
        for (m, k) in &p.terms {
            self.add_term(m.clone(), k.clone() * c.clone());
        }
    }

    /// Applies the variable swap `x_i <-> x_j`.
    pub fn swap_vars(&self, i: usize, j: usize) -> Poly<C> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.swap_vars(i, j), c.clone());
        }
        out
    }

    /// Applies `sigma(x_i) = x_{sigma(i)}` for a permutation of the variables.
    pub fn apply_permutation(&self, w: &crate::weyl::Permutation) -> Result<Poly<C>> {
        if self.max_var() > w.n() {
            return Err(Error::validation(format!(
                "polynomial uses x{} but the permutation lives in S_{}",
                self.max_var(),
                w.n()
            )));
        }
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; w.n()];
            for i in 1..=m.max_var() {
                exps[w.apply(i) - 1] = m.exponent(i);
            }
            out.add_term(Monomial::from_exponents(&exps), c.clone());
        }
        Ok(out)
    }

    /// Substitutes `x_i := args[i-1]`; every variable in use must be covered.
    pub fn compose(&self, args: &[Poly<C>]) -> Result<Poly<C>> {
        if self.max_var() > args.len() {
            return Err(Error::validation(format!(
                "substitution covers {} variables but x{} appears",
                args.len(),
                self.max_var()
            )));
        }
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut prod = Poly::constant(c.clone());
            for i in 1..=m.max_var() {
                for _ in 0..m.exponent(i) {
                    prod = prod.mul(&args[i - 1]);
                }
            }
            out = out.add(&prod);
        }
        Ok(out)
    }

    /// Evaluates at the point `x_i = values[i-1]`.
    pub fn eval(&self, values: &[C]) -> Result<C> {
        if self.max_var() > values.len() {
            return Err(Error::validation(format!(
                "evaluation point has {} coordinates but x{} appears",
                values.len(),
                self.max_var()
            )));
        }
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for i in 1..=m.max_var() {
                for _ in 0..m.exponent(i) {
                    t = t * values[i - 1].clone();
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }
}

/// All monomials of total degree `d` in variables `x1..xk`, in descending
/// term order (deterministic row order for elimination).
pub fn monomials_of_degree(k: usize, d: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; k];
    fn rec(exps: &mut Vec<u32>, pos: usize, left: u32, out: &mut Vec<Monomial>) {
        if pos + 1 == exps.len() {
            exps[pos] = left;
            out.push(Monomial::from_exponents(exps));
            return;
        }
        for e in 0..=left {
            exps[pos] = e;
            rec(exps, pos + 1, left - e, out);
        }
        exps[pos] = 0;
    }
    if k == 0 {
        if d == 0 {
            out.push(Monomial::unit());
        }
        return out;
    }
    rec(&mut exps, 0, d as u32, &mut out);
    out.sort_by(|a, b| b.cmp(a));
    out
}

/// Divided difference `d_i f = (f - s_i f) / (x_i - x_{i+1})`.
///
/// Computed monomial by monomial through the telescoping expansion of
/// `(x^p y^q - x^q y^p) / (x - y)`, so the division is exact by construction
/// over any coefficient ring.
pub fn divided_difference<C: Coeff>(i: usize, f: &Poly<C>) -> Poly<C> {
    assert!(i >= 1, "divided differences are indexed from 1");
    let mut out = Poly::zero();
    for (m, c) in &f.terms {
        let p = m.exponent(i);
        let q = m.exponent(i + 1);
        match p.cmp(&q) {
            Ordering::Equal => {}
            Ordering::Greater => {
                for t in 0..(p - q) {
                    let mm = m.with_exponent(i, q + t).with_exponent(i + 1, p - 1 - t);
                    out.add_term(mm, c.clone());
                }
            }
            Ordering::Less => {
                for t in 0..(q - p) {
                    let mm = m.with_exponent(i, p + t).with_exponent(i + 1, q - 1 - t);
                    out.add_term(mm, -c.clone());
                }
            }
        }
    }
    out
}

impl IntPolynomial {
    /// Promotes integer coefficients to rationals.
    pub fn to_rational(&self) -> QPolynomial {
        self.map_coeffs(|c| BigRational::from_integer(c.clone()))
    }
}

impl QPolynomial {
    /// Clears denominators and divides by the content; the sign is fixed so
    /// the leading coefficient is positive. Returns the zero polynomial
    /// unchanged.
    pub fn primitive_integer(&self) -> IntPolynomial {
        if self.is_zero() {
            return IntPolynomial::zero();
        }
        let mut lcm = BigInt::one();
        for c in self.terms.values() {
            lcm = num::integer::lcm(lcm, c.denom().clone());
        }
        let mut ints: Vec<(Monomial, BigInt)> = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c.numer() * (&lcm / c.denom())))
            .collect();
        let mut content = BigInt::zero();
        for (_, c) in &ints {
            content = num::integer::gcd(content, c.abs());
        }
        if content.is_zero() {
            content = BigInt::one();
        }
        for (_, c) in ints.iter_mut() {
            *c = &*c / &content;
        }
        if ints.last().map(|(_, c)| c.is_negative()).unwrap_or(false) {
            for (_, c) in ints.iter_mut() {
                *c = -c.clone();
            }
        }
        let mut out = IntPolynomial::zero();
        for (m, c) in ints {
            out.add_term(m, c);
        }
        out
    }

    /// True if every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }
}

/// How variables are rendered and parsed in the textual format.
#[derive(Clone, Debug)]
pub enum VarNames {
    /// `x1, x2, ...` for prefix `"x"`.
    Prefixed(String),
    /// Explicit names; slot `i` (1-based) renders as `names[i-1]`.
    Explicit(Vec<String>),
}

impl VarNames {
    pub fn x() -> Self {
        VarNames::Prefixed("x".to_string())
    }

    pub fn name(&self, i: usize) -> String {
        match self {
            VarNames::Prefixed(p) => format!("{}{}", p, i),
            VarNames::Explicit(names) => names
                .get(i - 1)
                .cloned()
                .unwrap_or_else(|| format!("?{}", i)),
        }
    }

    fn index_of(&self, token: &str) -> Option<usize> {
        match self {
            VarNames::Prefixed(p) => {
                let rest = token.strip_prefix(p.as_str())?;
                let idx: usize = rest.parse().ok()?;
                (idx >= 1).then_some(idx)
            }
            VarNames::Explicit(names) => names.iter().position(|n| n == token).map(|i| i + 1),
        }
    }
}

impl<C: Coeff> Poly<C> {
    /// Renders in the textual format, e.g. `3*x1^2*x2 - x3`. Terms appear in
    /// descending term order, so printing is deterministic.
    pub fn render(&self, names: &VarNames) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || m.is_unit() {
                factors.push(mag.to_string());
            }
            for i in 1..=m.max_var() {
                let e = m.exponent(i);
                if e == 1 {
                    factors.push(names.name(i));
                } else if e > 1 {
                    factors.push(format!("{}^{}", names.name(i), e));
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }

    /// Parses the textual format produced by [`Poly::render`].
    pub fn parse(text: &str, names: &VarNames) -> Result<Poly<C>> {
        let mut out = Poly::zero();
        let mut rest = text.trim();
        if rest.is_empty() {
            return Err(Error::validation("empty polynomial text"));
        }
        let mut sign_negative = false;
        if let Some(r) = rest.strip_prefix('-') {
            sign_negative = true;
            rest = r.trim_start();
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r.trim_start();
        }
        loop {
            let (term_str, tail) = split_term(rest);
            let (m, c) = parse_term::<C>(term_str, names)?;
            out.add_term(m, if sign_negative { -c } else { c });
            match tail {
                None => break,
                Some((neg, t)) => {
                    sign_negative = neg;
                    rest = t;
                }
            }
        }
        Ok(out)
    }
}

/// Splits off the first additive term; returns the remaining text with the
/// sign of the following term.
fn split_term(text: &str) -> (&str, Option<(bool, &str)>) {
    for (pos, ch) in text.char_indices() {
        if (ch == '+' || ch == '-') && pos > 0 {
            let prev = text[..pos].trim_end().chars().last();
            // a sign after '^', '*' or '/' would be part of a number, not a separator
            if matches!(prev, Some('^') | Some('*') | Some('/')) {
                continue;
            }
            return (
                text[..pos].trim(),
                Some((ch == '-', text[pos + 1..].trim_start())),
            );
        }
    }
    (text.trim(), None)
}

fn parse_term<C: Coeff>(term: &str, names: &VarNames) -> Result<(Monomial, C)> {
    let mut coeff = C::one();
    let mut mono = Monomial::unit();
    if term.is_empty() {
        return Err(Error::validation("empty term in polynomial text"));
    }
    for factor in term.split('*') {
        let factor = factor.trim();
        if factor.is_empty() {
            return Err(Error::validation("empty factor in polynomial text"));
        }
        if factor.chars().next().unwrap().is_ascii_digit() {
            let c: C = factor
                .parse()
                .map_err(|_| Error::validation(format!("bad coefficient '{}'", factor)))?;
            coeff = coeff * c;
        } else {
            let (var_tok, exp) = match factor.split_once('^') {
                None => (factor, 1u32),
                Some((v, e)) => (
                    v.trim(),
                    e.trim()
                        .parse()
                        .map_err(|_| Error::validation(format!("bad exponent '{}'", e)))?,
                ),
            };
            let idx = names
                .index_of(var_tok)
                .ok_or_else(|| Error::validation(format!("unknown variable '{}'", var_tok)))?;
            for _ in 0..exp {
                mono = mono.mul(&Monomial::variable(idx));
            }
        }
    }
    Ok((mono, coeff))
}

impl<C: Coeff> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&VarNames::x()))
    }
}

impl<C: Coeff> fmt::Debug for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(text: &str) -> IntPolynomial {
        IntPolynomial::parse(text, &VarNames::x()).unwrap()
    }

    #[test]
    fn term_order_prefers_higher_variables() {
        // x2 > x1^k for any k in the Schubert order
        let x1 = Monomial::variable(1);
        let x2 = Monomial::variable(2);
        let x1sq = x1.mul(&x1);
        assert!(x2 > x1);
        assert!(x2 > x1sq);
        assert!(x1sq > x1);
        assert!(x1 > Monomial::unit());
    }

    #[test]
    fn parse_render_round_trip() {
        for text in [
            "3*x1^2*x2 - x3",
            "x1 + x2",
            "-x1",
            "0",
            "7",
            "x1^3 - 2*x1*x2 + 5",
        ] {
            let p = int(text);
            let q = int(&p.render(&VarNames::x()));
            assert_eq!(p, q, "round trip of {}", text);
        }
    }

    #[test]
    fn render_canonical_examples() {
        assert_eq!(int("x3 - 3*x1^2*x2").render(&VarNames::x()), "x3 - 3*x1^2*x2");
        assert_eq!(int("- x1 + x2").render(&VarNames::x()), "x2 - x1");
        assert_eq!(IntPolynomial::zero().render(&VarNames::x()), "0");
    }

    #[test]
    fn rational_coefficients_parse() {
        let p = QPolynomial::parse("3/2*x1 - 1/3", &VarNames::x()).unwrap();
        let rendered = p.render(&VarNames::x());
        let q = QPolynomial::parse(&rendered, &VarNames::x()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn divided_difference_examples() {
        // d_1 x1 = 1
        assert_eq!(divided_difference(1, &int("x1")), int("1"));
        // d_1 (x1 x2) = 0
        assert_eq!(divided_difference(1, &int("x1*x2")), IntPolynomial::zero());
        // d_1 x1^2 = x1 + x2
        assert_eq!(divided_difference(1, &int("x1^2")), int("x1 + x2"));
    }

    #[test]
    fn divided_difference_defining_identity() {
        // (x_i - x_{i+1}) * d_i f = f - s_i f, checked on assorted inputs
        for text in ["x1^3*x2 - x2*x3^2 + 4*x1*x4", "x1^5", "x2^2*x3", "7"] {
            let f = int(text);
            for i in 1..=4 {
                let lhs = int(&format!("x{}", i))
                    .sub(&int(&format!("x{}", i + 1)))
                    .mul(&divided_difference(i, &f));
                let rhs = f.sub(&f.swap_vars(i, i + 1));
                assert_eq!(lhs, rhs, "i={} f={}", i, text);
            }
        }
    }

    #[test]
    fn divided_difference_result_is_symmetric() {
        let f = int("x1^4*x2^2 - 3*x1*x2*x3 + x3^3");
        for i in 1..=3 {
            let g = divided_difference(i, &f);
            assert_eq!(g, g.swap_vars(i, i + 1), "i={}", i);
        }
    }

    #[test]
    fn compose_substitutes() {
        // p(x1,x2) = x1^2 + x2 at x1 = y1 - y2 (renamed to x's), x2 = -y2
        let p = int("x1^2 + x2");
        let args = vec![int("x1 - x2"), int("-x2")];
        assert_eq!(p.compose(&args).unwrap(), int("x1^2 - 2*x1*x2 + x2^2 - x2"));
    }

    #[test]
    fn primitive_integer_normalises() {
        let q = QPolynomial::parse("-2/3*x1 + 4/3*x2", &VarNames::x()).unwrap();
        let p = q.primitive_integer();
        assert_eq!(p, int("2*x2 - x1"));
    }

    #[test]
    fn eval_exact() {
        let p = int("x1^2*x2 - 7");
        let v = p
            .eval(&[BigInt::from(3), BigInt::from(2)])
            .unwrap();
        assert_eq!(v, BigInt::from(11));
    }
}
