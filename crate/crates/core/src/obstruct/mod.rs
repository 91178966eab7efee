//! Cohomological obstruction systems for hypothetical morphisms
//! `P^m -> G/P_J`.
//!
//! A morphism pulls the Schubert divisor classes back to nonnegative
//! multiples `a_r t` of the hyperplane class, and every ring relation among
//! Schubert classes of codimension `<= m` descends to an integer constraint
//! on the `a_r`. The system builder expresses each basis class image
//! `b_w` as an exact rational polynomial in the divisor images by linear
//! elimination degree by degree; unsolvable directions become homogeneous
//! consistency equations, and effectivity demands every `b_w >= 0`.
//!
//! Nonexistence is only ever claimed through a verified case-split
//! sum-of-squares certificate; an exhausted bounded search yields
//! `Undetermined`, never a nonexistence verdict.

mod cert;

pub use cert::{
    certificate_library, verify_certificate, CertNode, EffKey, LeafCert, NonexistenceCertificate,
};

use crate::cohomology::{
    cache_dir, cup_product, load_cached_tables, schubert_basis, CohomClass, FlagSpace,
};
use crate::error::{Error, Result};
use crate::poly::{monomials_of_degree, IntPolynomial, Monomial, Poly, QPolynomial, VarNames};
use crate::weyl::Permutation;
use num::traits::Signed;
use num::{BigInt, BigRational, One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Default exhaustive-search bound for witness assignments.
pub const DEFAULT_SEARCH_BOUND: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarKind {
    /// Image of the Schubert divisor `s_r`.
    Divisor(usize),
    /// Basis class whose image is not determined by divisor products; kept
    /// as an independent unknown.
    FreeClass(Permutation),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SysVar {
    pub name: String,
    pub degree: usize,
    pub kind: VarKind,
}

/// The full pullback constraint system of a candidate `P^m -> G/P_J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PullbackSystem {
    target: FlagSpace,
    m: usize,
    vars: Vec<SysVar>,
    /// `(w, b_w)` for every `w` in `W^J` with `l(w) <= m`, ordered by
    /// `(grade, descending code)`.
    derived: Vec<(Permutation, QPolynomial)>,
    /// Homogeneous polynomials in the variables that must vanish.
    consistency: Vec<IntPolynomial>,
}

impl PullbackSystem {
    pub fn target(&self) -> &FlagSpace {
        &self.target
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn vars(&self) -> &[SysVar] {
        &self.vars
    }

    pub fn var_names(&self) -> VarNames {
        VarNames::Explicit(self.vars.iter().map(|v| v.name.clone()).collect())
    }

    pub fn derived(&self) -> &[(Permutation, QPolynomial)] {
        &self.derived
    }

    pub fn derived_for(&self, w: &Permutation) -> Option<&QPolynomial> {
        let key = w.trimmed().embed(self.target.n()).ok()?;
        self.derived
            .iter()
            .find(|(u, _)| u == &key)
            .map(|(_, p)| p)
    }

    pub fn consistency(&self) -> &[IntPolynomial] {
        &self.consistency
    }

    /// 1-based polynomial slot of the divisor variable for `s_r`.
    pub fn divisor_slot(&self, r: usize) -> Option<usize> {
        self.vars
            .iter()
            .position(|v| v.kind == VarKind::Divisor(r))
            .map(|i| i + 1)
    }

    /// 1-based slots of free-class variables.
    pub fn free_slots(&self) -> Vec<usize> {
        self.vars
            .iter()
            .enumerate()
            .filter(|(_, v)| matches!(v.kind, VarKind::FreeClass(_)))
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// Effectivity constraints: one entry per variable and one per derived
    /// class of grade >= 2 (grade-1 classes are the variables themselves).
    pub fn effectivity(&self) -> Vec<(EffKey, QPolynomial)> {
        let mut out = Vec::new();
        for (i, _) in self.vars.iter().enumerate() {
            out.push((EffKey::Var(i + 1), Poly::variable(i + 1)));
        }
        for (w, p) in &self.derived {
            if w.length() >= 2 {
                out.push((EffKey::Class(w.clone()), p.clone()));
            }
        }
        out
    }

    pub fn effectivity_poly(&self, key: &EffKey) -> Result<QPolynomial> {
        match key {
            EffKey::Var(slot) => {
                if *slot < 1 || *slot > self.vars.len() {
                    return Err(Error::validation(format!(
                        "certificate references variable slot {} of {}",
                        slot,
                        self.vars.len()
                    )));
                }
                Ok(Poly::variable(*slot))
            }
            EffKey::Class(w) => self
                .derived_for(w)
                .cloned()
                .ok_or_else(|| Error::validation(format!("certificate references unknown class {}", w))),
        }
    }

    /// `a` scaled by `lambda` respecting variable degrees: slot `i` picks up
    /// `lambda^degree(i)`.
    pub fn scale_assignment(&self, a: &Assignment, lambda: &BigInt) -> Assignment {
        Assignment {
            values: self
                .vars
                .iter()
                .zip(&a.values)
                .map(|(v, x)| x * num::pow::pow(lambda.clone(), v.degree))
                .collect(),
        }
    }

    /// True iff the assignment is nonnegative, satisfies every consistency
    /// equation exactly, and every derived class value is a nonnegative
    /// integer.
    pub fn check_assignment(&self, a: &Assignment) -> Result<bool> {
        if a.values.len() != self.vars.len() {
            return Err(Error::validation(format!(
                "assignment has {} values, system has {} variables",
                a.values.len(),
                self.vars.len()
            )));
        }
        if a.values.iter().any(|v| v.is_negative()) {
            return Ok(false);
        }
        for c in &self.consistency {
            if !c.eval(&a.values)?.is_zero() {
                return Ok(false);
            }
        }
        let point: Vec<BigRational> = a
            .values
            .iter()
            .map(|v| BigRational::from_integer(v.clone()))
            .collect();
        for (w, p) in &self.derived {
            if w.length() < 2 {
                continue;
            }
            let v = p.eval(&point)?;
            if !v.is_integer() || v.is_negative() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Serialises to the versioned key-sorted text format.
    pub fn render(&self) -> String {
        let names = self.var_names();
        let mut out = String::new();
        out.push_str("pullback-system v1\n");
        out.push_str(&format!("target = {}\n", self.target.render()));
        out.push_str(&format!("m = {}\n", self.m));
        out.push_str(&format!(
            "vars = {}\n",
            self.vars
                .iter()
                .map(|v| v.name.clone())
                .collect::<Vec<_>>()
                .join(" ")
        ));
        out.push_str(&format!(
            "var-kinds = {}\n",
            self.vars
                .iter()
                .map(|v| match &v.kind {
                    VarKind::Divisor(r) => format!("d{}", r),
                    VarKind::FreeClass(w) => format!("c[{}]", w),
                })
                .collect::<Vec<_>>()
                .join(" ")
        ));
        out.push_str(&format!("consistency-count = {}\n", self.consistency.len()));
        for (i, c) in self.consistency.iter().enumerate() {
            out.push_str(&format!("consistency.{} = {}\n", i + 1, c.render(&names)));
        }
        out.push_str(&format!("derived-count = {}\n", self.derived.len()));
        for (i, (w, p)) in self.derived.iter().enumerate() {
            out.push_str(&format!(
                "derived.{} = [{}] ; {} ; {}\n",
                i + 1,
                w,
                w.length(),
                p.render(&names)
            ));
        }
        out
    }

    pub fn parse(text: &str) -> Result<PullbackSystem> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::validation("empty system text"))?;
        if header.trim() != "pullback-system v1" {
            return Err(Error::validation("bad system header"));
        }
        let target = FlagSpace::parse(value_of(lines.next(), "target")?.as_str(), None)?;
        let m: usize = value_of(lines.next(), "m")?
            .parse()
            .map_err(|_| Error::validation("bad m"))?;
        let var_names: Vec<String> = value_of(lines.next(), "vars")?
            .split_whitespace()
            .map(|s| s.to_string())
            .collect();
        let var_kinds: Vec<String> = value_of(lines.next(), "var-kinds")?
            .split_whitespace()
            .map(|s| s.to_string())
            .collect();
        if var_kinds.len() != var_names.len() {
            return Err(Error::validation("vars and var-kinds length mismatch"));
        }
        let mut vars = Vec::with_capacity(var_names.len());
        for (name, kind) in var_names.iter().zip(&var_kinds) {
            let kind = if let Some(r) = kind.strip_prefix("c[") {
                let perm = r
                    .strip_suffix(']')
                    .ok_or_else(|| Error::validation("bad free-class kind"))?;
                VarKind::FreeClass(Permutation::parse(perm)?)
            } else if let Some(r) = kind.strip_prefix('d') {
                VarKind::Divisor(
                    r.parse()
                        .map_err(|_| Error::validation("bad divisor kind"))?,
                )
            } else {
                return Err(Error::validation(format!("bad var kind '{}'", kind)));
            };
            let degree = match &kind {
                VarKind::Divisor(_) => 1,
                VarKind::FreeClass(w) => w.length(),
            };
            vars.push(SysVar {
                name: name.clone(),
                degree,
                kind,
            });
        }
        let names = VarNames::Explicit(var_names);
        let ccount: usize = value_of(lines.next(), "consistency-count")?
            .parse()
            .map_err(|_| Error::validation("bad consistency-count"))?;
        let mut consistency = Vec::with_capacity(ccount);
        for i in 0..ccount {
            let v = value_of(lines.next(), &format!("consistency.{}", i + 1))?;
            consistency.push(IntPolynomial::parse(&v, &names)?);
        }
        let dcount: usize = value_of(lines.next(), "derived-count")?
            .parse()
            .map_err(|_| Error::validation("bad derived-count"))?;
        let mut derived = Vec::with_capacity(dcount);
        for i in 0..dcount {
            let v = value_of(lines.next(), &format!("derived.{}", i + 1))?;
            let fields: Vec<&str> = v.splitn(3, " ; ").collect();
            if fields.len() != 3 {
                return Err(Error::validation("bad derived line"));
            }
            let perm_text = fields[0]
                .trim()
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| Error::validation("bad derived permutation"))?;
            let w = Permutation::parse(perm_text)?;
            let p = QPolynomial::parse(fields[2].trim(), &names)?;
            derived.push((w, p));
        }
        Ok(PullbackSystem {
            target,
            m,
            vars,
            derived,
            consistency,
        })
    }
}

pub(crate) fn value_of(line: Option<&str>, key: &str) -> Result<String> {
    let line = line.ok_or_else(|| Error::validation(format!("missing '{}' line", key)))?;
    let (k, v) = line
        .split_once('=')
        .ok_or_else(|| Error::validation(format!("bad line '{}'", line)))?;
    if k.trim() != key {
        return Err(Error::validation(format!(
            "expected key '{}', found '{}'",
            key,
            k.trim()
        )));
    }
    Ok(v.trim().to_string())
}

/// An integer point in variable order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub values: Vec<BigInt>,
}

impl Assignment {
    pub fn all_ones(k: usize) -> Self {
        Assignment {
            values: vec![BigInt::one(); k],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub fn render(&self) -> String {
        self.values
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse(text: &str) -> Result<Assignment> {
        let values = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<BigInt>()
                    .map_err(|_| Error::validation(format!("bad assignment value '{}'", t)))
            })
            .collect::<Result<_>>()?;
        Ok(Assignment { values })
    }

    pub fn render_named(&self, sys: &PullbackSystem) -> String {
        sys.vars()
            .iter()
            .zip(&self.values)
            .map(|(v, x)| format!("{}={}", v.name, x))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// One row of a degree layer during elimination: integer class coefficients
/// as rationals plus a polynomial right-hand side in the divisor variables.
struct Row {
    coeffs: Vec<BigRational>,
    rhs: QPolynomial,
}

/// Builds the pullback system of a candidate `P^m -> target`.
///
/// For each degree `d <= m` every monomial in the divisor variables is
/// expressed through the Schubert basis by iterated cup products; solving
/// the resulting exact linear system yields the `b_w` polynomials, leftover
/// directions become consistency equations, and undetermined classes turn
/// into fresh nonnegative unknowns.
pub fn build_pullback_system(target: &FlagSpace, m: usize) -> Result<PullbackSystem> {
    if m < 1 {
        return Err(Error::validation("source dimension m must be >= 1"));
    }
    let n = target.n();
    let dim = target.dimension();
    let divisors = target.divisor_indices();
    let k = divisors.len();

    let mut vars: Vec<SysVar> = divisors
        .iter()
        .map(|&r| SysVar {
            name: format!("a{}", r),
            degree: 1,
            kind: VarKind::Divisor(r),
        })
        .collect();

    let mut derived: Vec<(Permutation, QPolynomial)> =
        vec![(Permutation::identity(n), QPolynomial::one())];
    let mut consistency: Vec<IntPolynomial> = Vec::new();

    let divisor_classes: Vec<CohomClass> = divisors
        .iter()
        .map(|&r| {
            let w = Permutation::identity(n).mul_simple_right(r);
            CohomClass::schubert(target.clone(), &w)
        })
        .collect::<Result<_>>()?;
    if m >= 1 && dim >= 1 {
        for (slot, c) in divisor_classes.iter().enumerate() {
            let (w, _) = c.iter().next().expect("divisor class is a basis element");
            derived.push((w.clone(), Poly::variable(slot + 1)));
        }
    }

    // monomial images of the previous degree
    let mut prev: BTreeMap<Monomial, CohomClass> = BTreeMap::new();
    for (slot, c) in divisor_classes.iter().enumerate() {
        prev.insert(Monomial::variable(slot + 1), c.clone());
    }

    for d in 2..=m {
        let mut images: Vec<(Monomial, CohomClass)> = Vec::new();
        for mono in monomials_of_degree(k, d) {
            let i = (1..=k)
                .find(|&i| mono.exponent(i) > 0)
                .expect("degree-d monomial has a variable");
            let mut rest = mono.exponents().to_vec();
            rest[i - 1] -= 1;
            let rest = Monomial::from_exponents(&rest);
            let base = prev
                .get(&rest)
                .expect("images are built degree by degree");
            images.push((mono, cup_product(&divisor_classes[i - 1], base)?));
        }

        let basis_d: Vec<Permutation> = if d <= dim {
            schubert_basis(target, d)?
        } else {
            Vec::new()
        };
        if basis_d.is_empty() && d <= dim {
            return Err(Error::internal(format!(
                "empty Schubert basis in codimension {} <= dim {}",
                d, dim
            )));
        }
        let col_of: BTreeMap<&Permutation, usize> =
            basis_d.iter().enumerate().map(|(i, w)| (w, i)).collect();

        let mut rows: Vec<Row> = Vec::with_capacity(images.len());
        for (mono, class) in &images {
            let mut coeffs = vec![BigRational::zero(); basis_d.len()];
            for (w, c) in class.iter() {
                let col = *col_of.get(w).ok_or_else(|| {
                    Error::internal(format!("product support {} outside the degree-{} basis", w, d))
                })?;
                coeffs[col] = BigRational::from_integer(c.clone());
            }
            rows.push(Row {
                coeffs,
                rhs: QPolynomial::term(mono.clone(), BigRational::one()),
            });
        }

        // exact Gauss-Jordan over the class columns, polynomial right sides
        let mut pivot_rows: Vec<(usize, Row)> = Vec::new(); // (col, normalized row)
        let mut free_cols: Vec<usize> = Vec::new();
        let mut remaining = rows;
        for col in 0..basis_d.len() {
            let Some(pos) = remaining.iter().position(|r| !r.coeffs[col].is_zero()) else {
                free_cols.push(col);
                continue;
            };
            let mut pivot = remaining.remove(pos);
            let inv = pivot.coeffs[col].recip();
            for c in pivot.coeffs.iter_mut() {
                *c = &*c * &inv;
            }
            pivot.rhs = pivot.rhs.map_coeffs(|q| q * &inv);
            for r in remaining.iter_mut() {
                eliminate(r, col, &pivot);
            }
            for (_, r) in pivot_rows.iter_mut() {
                eliminate(r, col, &pivot);
            }
            pivot_rows.push((col, pivot));
        }

        // leftover rows are consistency equations
        for r in remaining {
            debug_assert!(r.coeffs.iter().all(|c| c.is_zero()));
            if r.rhs.is_zero() {
                continue;
            }
            let c = r.rhs.primitive_integer();
            debug_assert!(c.is_homogeneous());
            if !consistency.contains(&c) {
                consistency.push(c);
            }
        }

        // undetermined classes become fresh unknowns of this degree
        let mut free_poly: BTreeMap<usize, QPolynomial> = BTreeMap::new();
        for col in &free_cols {
            let w = &basis_d[*col];
            vars.push(SysVar {
                name: format!("b{}", w.entries().iter().map(|e| e.to_string()).collect::<Vec<_>>().join("_")),
                degree: d,
                kind: VarKind::FreeClass(w.clone()),
            });
            free_poly.insert(*col, Poly::variable(vars.len()));
        }

        let mut solved: BTreeMap<usize, QPolynomial> = BTreeMap::new();
        for (col, row) in &pivot_rows {
            let mut p = row.rhs.clone();
            for (fcol, fpoly) in &free_poly {
                let c = &row.coeffs[*fcol];
                if !c.is_zero() {
                    p = p.sub(&fpoly.map_coeffs(|q| q * c));
                }
            }
            solved.insert(*col, p);
        }
        for fcol in &free_cols {
            solved.insert(*fcol, free_poly[fcol].clone());
        }
        for (col, w) in basis_d.iter().enumerate() {
            derived.push((w.clone(), solved.remove(&col).expect("every class solved or free")));
        }

        prev = images.into_iter().collect();
    }

    Ok(PullbackSystem {
        target: target.clone(),
        m,
        vars,
        derived,
        consistency,
    })
}

fn eliminate(r: &mut Row, col: usize, pivot: &Row) {
    let factor = r.coeffs[col].clone();
    if factor.is_zero() {
        return;
    }
    for (c, p) in r.coeffs.iter_mut().zip(&pivot.coeffs) {
        *c = &*c - &(p * &factor);
    }
    r.rhs = r.rhs.sub(&pivot.rhs.map_coeffs(|q| q * &factor));
}

/// Exhaustively scans integer assignments with `0 <= value <= bound`,
/// skipping zero, in deterministic order: shells of increasing maximum
/// value, lexicographic within a shell. Returns the first admissible one.
pub fn search_witness(sys: &PullbackSystem, bound: usize) -> Result<Option<Assignment>> {
    let k = sys.vars().len();
    if k == 0 {
        return Ok(None);
    }
    let mut values = vec![BigInt::zero(); k];
    for shell in 1..=bound {
        if let Some(found) = scan_shell(sys, &mut values, 0, shell, false)? {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

fn scan_shell(
    sys: &PullbackSystem,
    values: &mut Vec<BigInt>,
    pos: usize,
    shell: usize,
    hit_shell: bool,
) -> Result<Option<Assignment>> {
    if pos == values.len() {
        if !hit_shell {
            return Ok(None);
        }
        let a = Assignment {
            values: values.clone(),
        };
        if sys.check_assignment(&a)? {
            return Ok(Some(a));
        }
        return Ok(None);
    }
    for v in 0..=shell {
        values[pos] = BigInt::from(v);
        let hits = hit_shell || v == shell;
        if let Some(found) = scan_shell(sys, values, pos + 1, shell, hits)? {
            return Ok(Some(found));
        }
    }
    values[pos] = BigInt::zero();
    Ok(None)
}

/// Outcome of [`decide`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    NonexistenceCertified(NonexistenceCertificate),
    NoObstructionFound(Assignment),
    Undetermined { bound: usize },
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::NonexistenceCertified(_) => "nonexistence-certified",
            Verdict::NoObstructionFound(_) => "no-obstruction-found",
            Verdict::Undetermined { .. } => "undetermined",
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("verdict v1\n");
        out.push_str(&format!("kind = {}\n", self.kind()));
        match self {
            Verdict::NonexistenceCertified(cert) => {
                out.push_str(&cert.render());
            }
            Verdict::NoObstructionFound(a) => {
                out.push_str(&format!("witness = {}\n", a.render()));
            }
            Verdict::Undetermined { bound } => {
                out.push_str(&format!("bound = {}\n", bound));
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Verdict> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::validation("empty verdict text"))?;
        if header.trim() != "verdict v1" {
            return Err(Error::validation("bad verdict header"));
        }
        let kind = value_of(lines.next(), "kind")?;
        match kind.as_str() {
            "nonexistence-certified" => {
                let rest: Vec<&str> = lines.collect();
                let cert = NonexistenceCertificate::parse(&rest.join("\n"))?;
                Ok(Verdict::NonexistenceCertified(cert))
            }
            "no-obstruction-found" => {
                let witness = Assignment::parse(&value_of(lines.next(), "witness")?)?;
                Ok(Verdict::NoObstructionFound(witness))
            }
            "undetermined" => {
                let bound: usize = value_of(lines.next(), "bound")?
                    .parse()
                    .map_err(|_| Error::validation("bad bound"))?;
                Ok(Verdict::Undetermined { bound })
            }
            other => Err(Error::validation(format!("unknown verdict kind '{}'", other))),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind())
    }
}

/// A verdict together with the system it was reached on.
#[derive(Clone, Debug)]
pub struct Decision {
    pub system: PullbackSystem,
    pub verdict: Verdict,
    pub tables_loaded: usize,
}

/// Builds the system, tries the shipped certificate families, then searches
/// for a bounded witness. Cached structure-constant tables for the target's
/// `n` are loaded from the cache directory first.
pub fn decide(target: &FlagSpace, m: usize, bound: usize) -> Result<Decision> {
    let tables_loaded = load_cached_tables(target.n(), &cache_dir())?;
    let system = build_pullback_system(target, m)?;
    let library = certificate_library(&system);
    decide_with(system, bound, &library, tables_loaded)
}

/// [`decide`] with an explicit certificate library; every candidate is
/// verified against the system before a nonexistence verdict is issued.
pub fn decide_with(
    system: PullbackSystem,
    bound: usize,
    library: &[NonexistenceCertificate],
    tables_loaded: usize,
) -> Result<Decision> {
    for cert in library {
        if verify_certificate(&system, cert)? {
            return Ok(Decision {
                system,
                verdict: Verdict::NonexistenceCertified(cert.clone()),
                tables_loaded,
            });
        }
    }
    if let Some(witness) = search_witness(&system, bound)? {
        return Ok(Decision {
            system,
            verdict: Verdict::NoObstructionFound(witness),
            tables_loaded,
        });
    }
    Ok(Decision {
        system,
        verdict: Verdict::Undetermined { bound },
        tables_loaded,
    })
}
