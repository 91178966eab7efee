//! Schubert polynomials, expansion in the Schubert basis, and the
//! coinvariant normal form realising the Borel presentation of `H*(G/B)`.
//!
//! Construction runs bottom-up through the transition recursion
//! `S_w = x_r S_v + sum S_{v t_{qr}}` (r the last descent of w), which is
//! output-sensitive: it never materialises the staircase-degree polynomials
//! a top-down divided-difference descent would walk through. The descent
//! construction is kept in the test suite as an independent oracle.

use super::{divided_difference, IntPolynomial, Monomial, Poly};
use crate::error::{Error, Result};
use crate::weyl::Permutation;
use num::{BigInt, One, Zero};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

fn memo() -> &'static RwLock<HashMap<Permutation, Arc<IntPolynomial>>> {
    static MEMO: OnceLock<RwLock<HashMap<Permutation, Arc<IntPolynomial>>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The Schubert polynomial of `w`, memoized process-wide.
///
/// Stable under appending fixed points, so the memo key is the trimmed
/// permutation. Concurrent callers may race on a missing entry; both compute
/// the same value and the first insert wins.
pub fn schubert_polynomial(w: &Permutation) -> Arc<IntPolynomial> {
    let w = w.trimmed();
    if let Some(p) = memo().read().unwrap().get(&w) {
        return Arc::clone(p);
    }
    let computed = Arc::new(compute_schubert(&w));
    let mut guard = memo().write().unwrap();
    Arc::clone(guard.entry(w).or_insert(computed))
}

fn compute_schubert(w: &Permutation) -> IntPolynomial {
    let code = w.code();
    if code.windows(2).all(|c| c[0] >= c[1]) {
        // dominant permutation: a single monomial
        let exps: Vec<u32> = code.iter().map(|&c| c as u32).collect();
        return IntPolynomial::term(Monomial::from_exponents(&exps), BigInt::one());
    }
    let r = w.last_descent().expect("non-dominant permutation has a descent");
    let s = (r + 1..=w.n())
        .filter(|&j| w.apply(j) < w.apply(r))
        .max()
        .expect("descent guarantees a smaller value to the right");
    let v = w.mul_transposition_right(r, s);
    let mut out = Poly::variable(r).mul(&schubert_polynomial(&v));
    for q in 1..r {
        if v.transposition_raises_by_one(q, r) {
            out = out.add(&schubert_polynomial(&v.mul_transposition_right(q, r)));
        }
    }
    out
}

/// Applies divided differences along a word, leftmost operator first.
pub fn divided_difference_chain(word: &[usize], f: &IntPolynomial) -> IntPolynomial {
    let mut g = f.clone();
    for &i in word {
        g = divided_difference(i, &g);
    }
    g
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetricKind {
    PowerSum,
    Elementary,
}

/// `p_k(x_1..x_n)` or `e_k(x_1..x_n)`.
pub fn symmetric_generator(kind: SymmetricKind, k: usize, n: usize) -> Result<IntPolynomial> {
    if k < 1 || k > n {
        return Err(Error::validation(format!(
            "symmetric generator degree {} outside 1..{}",
            k, n
        )));
    }
    match kind {
        SymmetricKind::PowerSum => {
            let mut out = IntPolynomial::zero();
            for i in 1..=n {
                let mut exps = vec![0u32; i];
                exps[i - 1] = k as u32;
                out.add_term(Monomial::from_exponents(&exps), BigInt::one());
            }
            Ok(out)
        }
        SymmetricKind::Elementary => {
            let mut out = IntPolynomial::zero();
            let mut subset: Vec<usize> = Vec::new();
            elementary_rec(1, n, k, &mut subset, &mut out);
            Ok(out)
        }
    }
}

fn elementary_rec(
    from: usize,
    n: usize,
    k: usize,
    subset: &mut Vec<usize>,
    out: &mut IntPolynomial,
) {
    if subset.len() == k {
        let mut exps = vec![0u32; *subset.last().unwrap()];
        for &i in subset.iter() {
            exps[i - 1] = 1;
        }
        out.add_term(Monomial::from_exponents(&exps), BigInt::one());
        return;
    }
    for i in from..=n {
        subset.push(i);
        elementary_rec(i + 1, n, k, subset, out);
        subset.pop();
    }
}

/// An integer combination of Schubert classes, indexed by (trimmed)
/// permutations that may live in any `S_m`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct SchubertExpansion {
    coeffs: BTreeMap<Permutation, BigInt>,
}

impl SchubertExpansion {
    pub fn new() -> Self {
        SchubertExpansion {
            coeffs: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, w: Permutation, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(w.trimmed()) {
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

    pub fn coefficient(&self, w: &Permutation) -> BigInt {
        self.coeffs
            .get(&w.trimmed())
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Permutation, &BigInt)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `sum coeffs[w] * S_w`; the inverse of expansion, bit-exact.
    pub fn recombine(&self) -> IntPolynomial {
        let mut out = IntPolynomial::zero();
        for (w, c) in &self.coeffs {
            out.add_scaled(c, &schubert_polynomial(w));
        }
        out
    }

    /// Deterministic display, graded by length then one-line order.
    pub fn render(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut items: Vec<(&Permutation, &BigInt)> = self.coeffs.iter().collect();
        items.sort_by_key(|(w, _)| (w.length(), w.entries().to_vec()));
        let mut out = String::new();
        for (idx, (w, c)) in items.into_iter().enumerate() {
            let neg = c < &BigInt::zero();
            let mag = c.magnitude();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if !mag.is_one() {
                out.push_str(&format!("{}*", mag));
            }
            out.push_str(&format!("[{}]", w));
        }
        out
    }
}

impl std::fmt::Debug for SchubertExpansion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Expands `f` as an exact integer combination of Schubert polynomials.
///
/// Peels the leading monomial `x^a` (Schubert term order), subtracts
/// `coeff * S_w` for the permutation with code `a`, and repeats; every
/// subtraction step strictly lowers the leading monomial, so the loop
/// terminates with the unique expansion.
pub fn expand_in_schubert_basis(f: &IntPolynomial) -> SchubertExpansion {
    let mut out = SchubertExpansion::new();
    for (_deg, mut comp) in f.homogeneous_components() {
        while let Some((m, c)) = comp.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let code: Vec<usize> = m.exponents().iter().map(|&e| e as usize).collect();
            let w = Permutation::from_code(&code);
            let sw = schubert_polynomial(&w);
            assert_eq!(
                sw.leading().map(|(mm, _)| mm.clone()),
                Some(m.clone()),
                "Schubert leading monomial must be x^code(w)"
            );
            comp.add_scaled(&-c.clone(), &sw);
            assert!(
                comp.leading().is_none_or(|(mm, _)| mm < &m),
                "peel-off failed to lower the leading monomial"
            );
            out.add(w, c);
        }
    }
    out
}

/// The class of `f` in `H*(G/B)` for `SL(n)`: the Schubert expansion with
/// every permutation outside `S_n` discarded. The normal form of any
/// positive-degree symmetric polynomial is empty.
///
/// Coefficients are extracted by divided differences instead of peel-off:
/// `c_w = d_{i_k} ... d_{i_1} f` for a reduced word `w^{-1} = s_{i_1}...s_{i_k}`,
/// computed for all `w in S_n` at once by a breadth-first walk of the weak
/// order. Terms supported outside `S_n` die automatically, so the walk stays
/// inside `S_n` no matter how large the intermediate expansion would be.
pub fn coinvariant_normal_form(f: &IntPolynomial, n: usize) -> Result<SchubertExpansion> {
    if n == 0 {
        return Err(Error::validation("coinvariant ring needs n >= 1"));
    }
    if f.max_var() > n {
        return Err(Error::validation(format!(
            "polynomial mentions x{} outside Z[x1..x{}]",
            f.max_var(),
            n
        )));
    }
    let mut out = SchubertExpansion::new();
    for (d, comp) in f.homogeneous_components() {
        if d == 0 {
            out.add(Permutation::identity(1), comp.coefficient(&Monomial::unit()));
            continue;
        }
        let mut level: HashMap<Permutation, IntPolynomial> = HashMap::new();
        level.insert(Permutation::identity(n), comp);
        for _step in 0..d {
            let mut next: HashMap<Permutation, IntPolynomial> = HashMap::new();
            for (u, g) in &level {
                for i in 1..n {
                    if u.has_descent(i) {
                        continue;
                    }
                    let v = u.mul_simple_right(i);
                    if next.contains_key(&v) {
                        continue; // any reduced word gives the same value
                    }
                    let h = divided_difference(i, g);
                    if !h.is_zero() {
                        next.insert(v, h);
                    }
                }
            }
            level = next;
            if level.is_empty() {
                break;
            }
        }
        for (v, h) in level {
            out.add(v.inverse().trimmed(), h.coefficient(&Monomial::unit()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::VarNames;

    fn perm(v: &[usize]) -> Permutation {
        Permutation::from_one_line(v.to_vec()).unwrap()
    }

    fn int(text: &str) -> IntPolynomial {
        IntPolynomial::parse(text, &VarNames::x()).unwrap()
    }

    #[test]
    fn schubert_small_values() {
        assert_eq!(*schubert_polynomial(&perm(&[1, 2, 3])), int("1"));
        assert_eq!(*schubert_polynomial(&perm(&[2, 1, 3])), int("x1"));
        assert_eq!(*schubert_polynomial(&perm(&[1, 3, 2])), int("x1 + x2"));
        assert_eq!(*schubert_polynomial(&perm(&[3, 1, 2])), int("x1^2"));
        assert_eq!(*schubert_polynomial(&perm(&[2, 3, 1])), int("x1*x2"));
        assert_eq!(*schubert_polynomial(&perm(&[3, 2, 1])), int("x1^2*x2"));
    }

    #[test]
    fn schubert_divisor_classes_are_partial_sums() {
        // S_{s_r} = x1 + ... + xr
        for n in 2..=10 {
            for r in 1..n {
                let mut w = Permutation::identity(n);
                w = w.mul_simple_right(r);
                let expected: IntPolynomial = (1..=r)
                    .fold(IntPolynomial::zero(), |acc, i| acc.add(&Poly::variable(i)));
                assert_eq!(*schubert_polynomial(&w), expected, "n={} r={}", n, r);
            }
        }
    }

    #[test]
    fn schubert_leading_monomial_is_code() {
        // exhaustive over S_5: leading monomial (term order) = x^code(w)
        for w in crate::weyl::minimal_coset_reps(
            &crate::weyl::ParabolicSet::new(5, []).unwrap(),
            None,
        ) {
            let sw = schubert_polynomial(&w);
            let code: Vec<u32> = w.code().iter().map(|&c| c as u32).collect();
            assert_eq!(
                sw.leading().map(|(m, c)| (m.clone(), c.clone())),
                Some((Monomial::from_exponents(&code), BigInt::one())),
                "w={}",
                w
            );
        }
    }

    #[test]
    fn expansion_examples() {
        let e = expand_in_schubert_basis(&int("x1^2"));
        assert_eq!(e.coefficient(&perm(&[3, 1, 2])), BigInt::from(1));
        assert_eq!(e.len(), 1);

        let e = expand_in_schubert_basis(&int("x1 + x2"));
        assert_eq!(e.coefficient(&perm(&[1, 3, 2])), BigInt::from(1));
        assert_eq!(e.len(), 1);

        let e = expand_in_schubert_basis(&IntPolynomial::zero());
        assert!(e.is_empty());
    }

    #[test]
    fn expansion_recombines() {
        for text in ["x1^3*x2 - x2*x3^2 + 4*x1*x4", "x3^2", "x1*x2*x3 + 7"] {
            let f = int(text);
            let e = expand_in_schubert_basis(&f);
            assert_eq!(e.recombine(), f, "f={}", text);
        }
    }

    #[test]
    fn normal_form_examples() {
        // p_2 vanishes in the coinvariant ring
        let p2 = symmetric_generator(SymmetricKind::PowerSum, 2, 3).unwrap();
        assert!(coinvariant_normal_form(&p2, 3).unwrap().is_empty());

        // x3 = -(x1 + x2) modulo e_1
        let e = coinvariant_normal_form(&int("x3"), 3).unwrap();
        assert_eq!(e.coefficient(&perm(&[1, 3, 2])), BigInt::from(-1));
        assert_eq!(e.len(), 1);

        let e = coinvariant_normal_form(&int("1"), 3).unwrap();
        assert_eq!(e.coefficient(&Permutation::identity(3)), BigInt::from(1));
        assert_eq!(e.len(), 1);
    }

    #[test]
    fn normal_form_rejects_foreign_variables() {
        assert!(coinvariant_normal_form(&int("x4"), 3).is_err());
    }

    #[test]
    fn normal_form_agrees_with_expansion_filter() {
        // the two routes (divided-difference walk vs peel-off + discard)
        // must compute the same class
        for text in ["x1^2*x2 + x3^2", "x2^4", "x1*x3 - x2*x3 + x3^2"] {
            let f = int(text);
            let nf = coinvariant_normal_form(&f, 3).unwrap();
            let full = expand_in_schubert_basis(&f);
            for (w, c) in full.iter() {
                if w.n() <= 3 {
                    assert_eq!(&nf.coefficient(w), c, "f={} w={}", text, w);
                }
            }
            for (w, c) in nf.iter() {
                assert_eq!(&full.coefficient(w), c, "f={} w={}", text, w);
            }
        }
    }

    #[test]
    fn power_sums_die_in_their_coinvariant_ring() {
        for n in 1..=6 {
            for k in 1..=n {
                let pk = symmetric_generator(SymmetricKind::PowerSum, k, n).unwrap();
                assert!(
                    coinvariant_normal_form(&pk, n).unwrap().is_empty(),
                    "p_{} mod I_{}",
                    k,
                    n
                );
            }
        }
    }

    #[test]
    fn symmetric_generator_examples() {
        assert_eq!(
            symmetric_generator(SymmetricKind::PowerSum, 2, 3).unwrap(),
            int("x1^2 + x2^2 + x3^2")
        );
        assert_eq!(
            symmetric_generator(SymmetricKind::Elementary, 1, 3).unwrap(),
            int("x1 + x2 + x3")
        );
        assert_eq!(
            symmetric_generator(SymmetricKind::PowerSum, 1, 2).unwrap(),
            int("x1 + x2")
        );
        assert_eq!(
            symmetric_generator(SymmetricKind::Elementary, 2, 3).unwrap(),
            int("x1*x2 + x1*x3 + x2*x3")
        );
        assert!(symmetric_generator(SymmetricKind::PowerSum, 4, 3).is_err());
        assert!(symmetric_generator(SymmetricKind::PowerSum, 0, 3).is_err());
    }

    #[test]
    fn nilpotence_and_braid_relations() {
        let f = int("x1^3*x2^2 - 2*x2*x3^2 + x1*x4");
        for i in 1..=3 {
            assert!(divided_difference(i, &divided_difference(i, &f)).is_zero());
            let lhs = divided_difference_chain(&[i, i + 1, i], &f);
            let rhs = divided_difference_chain(&[i + 1, i, i + 1], &f);
            assert_eq!(lhs, rhs, "braid at {}", i);
        }
    }

    #[test]
    fn memo_is_consistent_under_concurrency() {
        use rayon::prelude::*;
        let w = perm(&[3, 1, 4, 2]);
        let polys: Vec<IntPolynomial> = (0..16)
            .into_par_iter()
            .map(|_| (*schubert_polynomial(&w)).clone())
            .collect();
        for p in &polys {
            assert_eq!(p, &polys[0]);
        }
    }
}
