//! Case-split sum-of-squares nonexistence certificates and their verifier.
//!
//! A certificate is a binary tree branching on the sign of a nonnegative
//! variable (`= 0` vs `> 0`). Each leaf exhibits an exact polynomial
//! identity
//!
//! ```text
//! sum lambda_p * p  +  sum mu_e * e  +  sum nu * x_zero
//!     + (prod x_pos^k) * (sum c_j * q_j^2)  =  0
//! ```
//!
//! with rational `lambda_p >= 0` over effectivity polynomials, arbitrary
//! polynomial multipliers over consistency equations and branch equalities,
//! and `c_j > 0`. On any admissible point the first three summands are
//! nonnegative resp. zero, so every `q_j` vanishes; the leaf passes when
//! the linear spans of the `q_j` and the branch equalities force every
//! variable to zero. Verification is pure arithmetic; no solving.

use super::{value_of, PullbackSystem};
use crate::error::{Error, Result};
use crate::geometry::linalg::QMatrix;
use crate::poly::{monomials_of_degree, Poly, QPolynomial, VarNames};
use crate::weyl::{grassmannian_permutation, Partition, Permutation};
use num::traits::Signed;
use num::{BigRational, One, Zero};
use std::collections::BTreeMap;

/// Key into the effectivity constraints of a system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EffKey {
    /// A system variable (1-based slot); constrained `>= 0` directly.
    Var(usize),
    /// A derived basis-class polynomial `b_w`.
    Class(Permutation),
}

impl EffKey {
    fn render(&self) -> String {
        match self {
            EffKey::Var(slot) => format!("var:{}", slot),
            EffKey::Class(w) => format!("class:[{}]", w),
        }
    }

    fn parse(text: &str) -> Result<EffKey> {
        if let Some(rest) = text.strip_prefix("var:") {
            return Ok(EffKey::Var(rest.parse().map_err(|_| {
                Error::validation(format!("bad effectivity key '{}'", text))
            })?));
        }
        if let Some(rest) = text.strip_prefix("class:[") {
            let perm = rest
                .strip_suffix(']')
                .ok_or_else(|| Error::validation(format!("bad effectivity key '{}'", text)))?;
            return Ok(EffKey::Class(Permutation::parse(perm)?));
        }
        Err(Error::validation(format!(
            "bad effectivity key '{}'",
            text
        )))
    }
}

/// One leaf of the case tree.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LeafCert {
    /// `(key, lambda)` with `lambda >= 0`.
    pub nonneg: Vec<(EffKey, BigRational)>,
    /// `(consistency index, mu)`.
    pub equality: Vec<(usize, QPolynomial)>,
    /// `(slot, nu)` over ancestor `= 0` branch variables.
    pub zero_mul: Vec<(usize, QPolynomial)>,
    /// `(slot, k)` over ancestor `> 0` branch variables.
    pub pos_powers: Vec<(usize, u32)>,
    /// `(c, q)` with `c > 0`; linear `q` feed the zero-forcing conclusion.
    pub squares: Vec<(BigRational, QPolynomial)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertNode {
    Leaf(LeafCert),
    Branch {
        /// 1-based variable slot being sign-split.
        slot: usize,
        zero: Box<CertNode>,
        pos: Box<CertNode>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonexistenceCertificate {
    pub label: String,
    pub root: CertNode,
}

/// Checks a certificate against a system.
///
/// Malformed certificates (negative multipliers, dangling references,
/// uncovered assumptions) are validation errors; a well-formed certificate
/// whose identity fails or whose conclusions do not force all variables to
/// zero yields `Ok(false)`.
pub fn verify_certificate(
    sys: &PullbackSystem,
    cert: &NonexistenceCertificate,
) -> Result<bool> {
    let mut zeros = Vec::new();
    let mut poss = Vec::new();
    verify_node(sys, &cert.root, &mut zeros, &mut poss)
}

fn verify_node(
    sys: &PullbackSystem,
    node: &CertNode,
    zeros: &mut Vec<usize>,
    poss: &mut Vec<usize>,
) -> Result<bool> {
    match node {
        CertNode::Branch { slot, zero, pos } => {
            if *slot < 1 || *slot > sys.vars().len() {
                return Err(Error::validation(format!(
                    "branch on unknown variable slot {}",
                    slot
                )));
            }
            zeros.push(*slot);
            let a = verify_node(sys, zero, zeros, poss)?;
            zeros.pop();
            poss.push(*slot);
            let b = verify_node(sys, pos, zeros, poss)?;
            poss.pop();
            Ok(a && b)
        }
        CertNode::Leaf(leaf) => verify_leaf(sys, leaf, zeros, poss),
    }
}

fn verify_leaf(
    sys: &PullbackSystem,
    leaf: &LeafCert,
    zeros: &[usize],
    poss: &[usize],
) -> Result<bool> {
    let nvars = sys.vars().len();
    let mut acc = QPolynomial::zero();
    for (key, lambda) in &leaf.nonneg {
        if lambda.is_negative() {
            return Err(Error::validation(format!(
                "negative multiplier {} on {}",
                lambda,
                key.render()
            )));
        }
        let p = sys.effectivity_poly(key)?;
        acc = acc.add(&p.map_coeffs(|c| c * lambda));
    }
    for (idx, mu) in &leaf.equality {
        let e = sys.consistency().get(*idx).ok_or_else(|| {
            Error::validation(format!("consistency index {} out of range", idx))
        })?;
        acc = acc.add(&e.to_rational().mul(mu));
    }
    for (slot, nu) in &leaf.zero_mul {
        if !zeros.contains(slot) {
            return Err(Error::validation(format!(
                "multiplier on x{} which is not an assumed-zero branch variable",
                slot
            )));
        }
        acc = acc.add(&Poly::variable(*slot).mul(nu));
    }
    let mut factor = QPolynomial::one();
    for (slot, k) in &leaf.pos_powers {
        if !poss.contains(slot) {
            return Err(Error::validation(format!(
                "positive power of x{} which is not an assumed-positive branch variable",
                slot
            )));
        }
        for _ in 0..*k {
            factor = factor.mul(&Poly::variable(*slot));
        }
    }
    let mut sq = QPolynomial::zero();
    for (c, q) in &leaf.squares {
        if !c.is_positive() {
            return Err(Error::validation(format!(
                "square coefficient {} must be positive",
                c
            )));
        }
        sq = sq.add(&q.mul(q).map_coeffs(|k| k * c));
    }
    acc = acc.add(&factor.mul(&sq));
    if !acc.is_zero() {
        return Ok(false);
    }

    // conclusions: linear squares plus branch equalities must span everything
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for (_, q) in &leaf.squares {
        if q.is_homogeneous() && q.total_degree() == 1 {
            let mut row = vec![BigRational::zero(); nvars];
            for (m, c) in q.iter() {
                row[m.max_var() - 1] = c.clone();
            }
            rows.push(row);
        }
    }
    for slot in zeros {
        let mut row = vec![BigRational::zero(); nvars];
        row[slot - 1] = BigRational::one();
        rows.push(row);
    }
    if rows.is_empty() {
        return Ok(nvars == 0);
    }
    Ok(QMatrix::from_rows(rows).rank() == nvars)
}

/// Expresses `target` as `sum mu_i * gens[i] + sum nu_s * x_s` by exact
/// linear algebra over the monomial space; returns the multipliers.
pub(crate) fn express_as_ideal_combination(
    target: &QPolynomial,
    gens: &[QPolynomial],
    zero_slots: &[usize],
    nvars: usize,
) -> Option<(Vec<QPolynomial>, Vec<QPolynomial>)> {
    if target.is_zero() {
        return Some((
            vec![QPolynomial::zero(); gens.len()],
            vec![QPolynomial::zero(); zero_slots.len()],
        ));
    }
    if !target.is_homogeneous() {
        return None;
    }
    let deg = target.total_degree();
    enum Col {
        Gen(usize),
        Zero(usize),
    }
    let mut col_polys: Vec<(Col, QPolynomial, QPolynomial)> = Vec::new(); // (owner, multiplier mono, product)
    for (i, g) in gens.iter().enumerate() {
        if g.is_zero() || !g.is_homogeneous() || g.total_degree() > deg {
            continue;
        }
        for mono in monomials_of_degree(nvars, deg - g.total_degree()) {
            let mult = QPolynomial::term(mono, BigRational::one());
            col_polys.push((Col::Gen(i), mult.clone(), g.mul(&mult)));
        }
    }
    for (zi, slot) in zero_slots.iter().enumerate() {
        for mono in monomials_of_degree(nvars, deg - 1) {
            let mult = QPolynomial::term(mono, BigRational::one());
            col_polys.push((
                Col::Zero(zi),
                mult.clone(),
                Poly::variable(*slot).mul(&mult),
            ));
        }
    }
    if col_polys.is_empty() {
        return None;
    }
    let row_monos = monomials_of_degree(nvars, deg);
    let row_of: BTreeMap<_, _> = row_monos.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
    let mut matrix = QMatrix::zero(row_monos.len(), col_polys.len());
    for (c, (_, _, p)) in col_polys.iter().enumerate() {
        for (m, v) in p.iter() {
            matrix.set(*row_of.get(m)?, c, v.clone());
        }
    }
    let mut b = vec![BigRational::zero(); row_monos.len()];
    for (m, v) in target.iter() {
        b[*row_of.get(m)?] = v.clone();
    }
    let x = matrix.solve(&b)?;
    let mut mus = vec![QPolynomial::zero(); gens.len()];
    let mut nus = vec![QPolynomial::zero(); zero_slots.len()];
    for ((owner, mult, _), coeff) in col_polys.iter().zip(&x) {
        if coeff.is_zero() {
            continue;
        }
        let scaled = mult.map_coeffs(|k| k * coeff);
        match owner {
            Col::Gen(i) => mus[*i] = mus[*i].add(&scaled),
            Col::Zero(zi) => nus[*zi] = nus[*zi].add(&scaled),
        }
    }
    Some((mus, nus))
}

/// The shipped certificate families applicable to this system. Both are
/// generated parametrically in `n` and re-verified by [`verify_certificate`]
/// before any verdict is issued.
pub fn certificate_library(sys: &PullbackSystem) -> Vec<NonexistenceCertificate> {
    let mut out = Vec::new();
    if let Some(c) = power_sum_certificate(sys) {
        out.push(c);
    }
    if let Some(c) = incidence_case_split_certificate(sys) {
        out.push(c);
    }
    out
}

/// Full-flag targets, any `m >= 2`: writing the divisor images as `y_r` and
/// the variable images as consecutive differences, the degree-2 power-sum
/// relation is itself a sum of squares `y_1^2 + (y_2-y_1)^2 + ... +
/// y_{n-1}^2`, which forces every divisor image to vanish.
fn power_sum_certificate(sys: &PullbackSystem) -> Option<NonexistenceCertificate> {
    let target = sys.target();
    if !target.levi().is_empty() || sys.m() < 2 {
        return None;
    }
    let n = target.n();
    if n < 2 {
        return None;
    }
    let nvars = sys.vars().len();
    if nvars != n - 1 {
        return None;
    }
    let x = |i: usize| QPolynomial::variable(i);
    let one = BigRational::one();
    let mut squares: Vec<(BigRational, QPolynomial)> = Vec::new();
    squares.push((one.clone(), x(1)));
    for t in 2..n {
        squares.push((one.clone(), x(t).sub(&x(t - 1))));
    }
    squares.push((one.clone(), x(n - 1)));
    let mut sq_sum = QPolynomial::zero();
    for (c, q) in &squares {
        sq_sum = sq_sum.add(&q.mul(q).map_coeffs(|k| k * c));
    }
    let gens: Vec<QPolynomial> = sys.consistency().iter().map(|c| c.to_rational()).collect();
    let (mus, _) = express_as_ideal_combination(&sq_sum.neg(), &gens, &[], nvars)?;
    let equality = mus
        .into_iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .collect();
    Some(NonexistenceCertificate {
        label: "power-sum-sos".to_string(),
        root: CertNode::Leaf(LeafCert {
            nonneg: Vec::new(),
            equality,
            zero_mul: Vec::new(),
            pos_powers: Vec::new(),
            squares,
        }),
    })
}

/// Minimal-parabolic targets with the omitted dimension at an end of the
/// diagram, `m = 3` exactly: the two-branch split on the first divisor
/// image. On the zero branch `2 b_{2,3}` is minus a sum of squares modulo
/// the branch equality; on the positive branch the codimension-3 class
/// `b_{E2} = a_2 (b_{2,3} - b_{2,1})` carries the sum of squares after
/// dividing by the branch variable. Deliberately not offered for m > 3.
fn incidence_case_split_certificate(sys: &PullbackSystem) -> Option<NonexistenceCertificate> {
    let target = sys.target();
    let n = target.n();
    if sys.m() != 3 || n < 4 || target.levi().len() != 1 {
        return None;
    }
    let j = *target.levi().iter().next().unwrap();
    let mirrored = if j == 1 {
        false
    } else if j == n - 1 {
        true
    } else {
        return None;
    };
    let nvars = sys.vars().len();
    let slot_of = |i: usize| -> Option<usize> {
        let divisor = if mirrored { n - i } else { i };
        sys.divisor_slot(divisor)
    };
    let mut slots = Vec::new();
    for i in 2..n {
        slots.push(slot_of(i)?);
    }
    let x = |i: usize| QPolynomial::variable(slots[i - 2]);
    let perm_for = |parts: &[usize], k: usize| -> Option<Permutation> {
        let p = grassmannian_permutation(&Partition::new(parts.to_vec()).ok()?, k, n).ok()?;
        Some(if mirrored {
            p.conjugate_by_longest()
        } else {
            p
        })
    };
    let gens: Vec<QPolynomial> = sys.consistency().iter().map(|c| c.to_rational()).collect();
    let one = BigRational::one();
    let branch = slots[0];

    // zero branch: 2 b_{2,3} + (squares) + nu * a_2 = 0
    let d23 = perm_for(&[2], 2)?;
    let b23 = sys.derived_for(&d23)?.clone();
    let mut squares0: Vec<(BigRational, QPolynomial)> = vec![(one.clone(), x(3))];
    for i in 3..n - 1 {
        squares0.push((one.clone(), x(i).sub(&x(i + 1))));
    }
    squares0.push((one.clone(), x(n - 1)));
    let mut lhs0 = b23.map_coeffs(|c| c * BigRational::from_integer(2.into()));
    for (c, q) in &squares0 {
        lhs0 = lhs0.add(&q.mul(q).map_coeffs(|k| k * c));
    }
    let (mus0, nus0) = express_as_ideal_combination(&lhs0.neg(), &gens, &[branch], nvars)?;
    let leaf0 = LeafCert {
        nonneg: vec![(EffKey::Class(d23), BigRational::from_integer(2.into()))],
        equality: mus0
            .into_iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .collect(),
        zero_mul: nus0
            .into_iter()
            .map(|p| (branch, p))
            .filter(|(_, p)| !p.is_zero())
            .collect(),
        pos_powers: Vec::new(),
        squares: squares0,
    };

    // positive branch: b_{E2} + a_2 * (squares) = 0 modulo consistency
    let mut nonneg1 = Vec::new();
    let mut lhs1 = QPolynomial::zero();
    if let Some(e2) = perm_for(&[3], 2) {
        if let Some(p) = sys.derived_for(&e2) {
            lhs1 = p.clone();
            nonneg1.push((EffKey::Class(e2), one.clone()));
        }
    }
    let mut squares1: Vec<(BigRational, QPolynomial)> = Vec::new();
    for i in 2..n - 1 {
        squares1.push((one.clone(), x(i).sub(&x(i + 1))));
    }
    squares1.push((one.clone(), x(n - 1)));
    let mut sq1 = QPolynomial::zero();
    for (c, q) in &squares1 {
        sq1 = sq1.add(&q.mul(q).map_coeffs(|k| k * c));
    }
    lhs1 = lhs1.add(&Poly::variable(branch).mul(&sq1));
    let (mus1, _) = express_as_ideal_combination(&lhs1.neg(), &gens, &[], nvars)?;
    let leaf1 = LeafCert {
        nonneg: nonneg1,
        equality: mus1
            .into_iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .collect(),
        zero_mul: Vec::new(),
        pos_powers: vec![(branch, 1)],
        squares: squares1,
    };

    Some(NonexistenceCertificate {
        label: "incidence-case-split-sos".to_string(),
        root: CertNode::Branch {
            slot: branch,
            zero: Box::new(CertNode::Leaf(leaf0)),
            pos: Box::new(CertNode::Leaf(leaf1)),
        },
    })
}

impl NonexistenceCertificate {
    /// Serialises to the versioned line format; polynomials use generic
    /// slot names `v1, v2, ...` so certificates stand alone.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("certificate v1\n");
        out.push_str(&format!("label = {}\n", self.label));
        let mut lines = Vec::new();
        render_node(&self.root, "r", &mut lines);
        for l in lines {
            out.push_str(&l);
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<NonexistenceCertificate> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::validation("empty certificate text"))?;
        if header.trim() != "certificate v1" {
            return Err(Error::validation("bad certificate header"));
        }
        let label = value_of(lines.next(), "label")?;
        let mut kinds: BTreeMap<String, (String, usize)> = BTreeMap::new();
        let mut items: BTreeMap<String, Vec<Vec<String>>> = BTreeMap::new();
        for line in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<String> = line.split(" ; ").map(|s| s.to_string()).collect();
            match fields[0].as_str() {
                "node" => {
                    if fields.len() < 3 {
                        return Err(Error::validation(format!("bad node line '{}'", line)));
                    }
                    let slot = if fields[2] == "branch" {
                        fields
                            .get(3)
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| Error::validation("branch without slot"))?
                    } else {
                        0
                    };
                    kinds.insert(fields[1].clone(), (fields[2].clone(), slot));
                }
                "item" => {
                    if fields.len() < 3 {
                        return Err(Error::validation(format!("bad item line '{}'", line)));
                    }
                    items
                        .entry(fields[1].clone())
                        .or_default()
                        .push(fields[2..].to_vec());
                }
                other => {
                    return Err(Error::validation(format!(
                        "unknown certificate line kind '{}'",
                        other
                    )))
                }
            }
        }
        let root = build_node("r", &kinds, &items)?;
        Ok(NonexistenceCertificate { label, root })
    }
}

fn render_node(node: &CertNode, path: &str, out: &mut Vec<String>) {
    match node {
        CertNode::Branch { slot, zero, pos } => {
            out.push(format!("node ; {} ; branch ; {}", path, slot));
            render_node(zero, &format!("{}0", path), out);
            render_node(pos, &format!("{}1", path), out);
        }
        CertNode::Leaf(leaf) => {
            out.push(format!("node ; {} ; leaf", path));
            let names = VarNames::Prefixed("v".to_string());
            for (key, c) in &leaf.nonneg {
                out.push(format!("item ; {} ; nonneg ; {} ; {}", path, key.render(), c));
            }
            for (idx, p) in &leaf.equality {
                out.push(format!(
                    "item ; {} ; equality ; {} ; {}",
                    path,
                    idx,
                    p.render(&names)
                ));
            }
            for (slot, p) in &leaf.zero_mul {
                out.push(format!(
                    "item ; {} ; zero-mul ; {} ; {}",
                    path,
                    slot,
                    p.render(&names)
                ));
            }
            for (slot, k) in &leaf.pos_powers {
                out.push(format!("item ; {} ; pos-power ; {} ; {}", path, slot, k));
            }
            for (c, q) in &leaf.squares {
                out.push(format!(
                    "item ; {} ; square ; {} ; {}",
                    path,
                    c,
                    q.render(&names)
                ));
            }
        }
    }
}

fn build_node(
    path: &str,
    kinds: &BTreeMap<String, (String, usize)>,
    items: &BTreeMap<String, Vec<Vec<String>>>,
) -> Result<CertNode> {
    let (kind, slot) = kinds
        .get(path)
        .ok_or_else(|| Error::validation(format!("missing certificate node '{}'", path)))?;
    match kind.as_str() {
        "branch" => Ok(CertNode::Branch {
            slot: *slot,
            zero: Box::new(build_node(&format!("{}0", path), kinds, items)?),
            pos: Box::new(build_node(&format!("{}1", path), kinds, items)?),
        }),
        "leaf" => {
            let names = VarNames::Prefixed("v".to_string());
            let mut leaf = LeafCert::default();
            for fields in items.get(path).map(|v| v.as_slice()).unwrap_or(&[]) {
                let tag = fields
                    .first()
                    .ok_or_else(|| Error::validation("empty certificate item"))?;
                let bad = || Error::validation(format!("bad certificate item {:?}", fields));
                match tag.as_str() {
                    "nonneg" => {
                        if fields.len() != 3 {
                            return Err(bad());
                        }
                        leaf.nonneg.push((
                            EffKey::parse(&fields[1])?,
                            fields[2].parse().map_err(|_| bad())?,
                        ));
                    }
                    "equality" => {
                        if fields.len() != 3 {
                            return Err(bad());
                        }
                        leaf.equality.push((
                            fields[1].parse().map_err(|_| bad())?,
                            QPolynomial::parse(&fields[2], &names)?,
                        ));
                    }
                    "zero-mul" => {
                        if fields.len() != 3 {
                            return Err(bad());
                        }
                        leaf.zero_mul.push((
                            fields[1].parse().map_err(|_| bad())?,
                            QPolynomial::parse(&fields[2], &names)?,
                        ));
                    }
                    "pos-power" => {
                        if fields.len() != 3 {
                            return Err(bad());
                        }
                        leaf.pos_powers.push((
                            fields[1].parse().map_err(|_| bad())?,
                            fields[2].parse().map_err(|_| bad())?,
                        ));
                    }
                    "square" => {
                        if fields.len() != 3 {
                            return Err(bad());
                        }
                        leaf.squares.push((
                            fields[1].parse().map_err(|_| bad())?,
                            QPolynomial::parse(&fields[2], &names)?,
                        ));
                    }
                    _ => return Err(bad()),
                }
            }
            Ok(CertNode::Leaf(leaf))
        }
        other => Err(Error::validation(format!("bad node kind '{}'", other))),
    }
}
