//! Graded cohomology rings of type-A flag varieties on their Schubert bases.
//!
//! One trusted product kernel (lift to Schubert polynomials, multiply, take
//! the coinvariant normal form, restrict to `W^J`) plus an independent Monk
//! oracle for divisor products. Structure constants of `H*(G/P_J)` are a
//! subset of those of `H*(G/B)` under the standard inclusion, so product
//! tables are computed and cached once per `(n, d1, d2)` and shared by every
//! parabolic.

mod table;

pub use table::{
    cache_dir, clear_cache, load_cached_tables, product_table, table_file_name,
    verify_table_file, write_table_to_cache, ProductTable,
};

use crate::error::{Error, Result};
use crate::poly::{coinvariant_normal_form, schubert_polynomial};
use crate::weyl::{
    grassmannian_permutation, minimal_coset_reps, ParabolicSet, Partition, Permutation,
};
use num::{BigInt, One, Zero};
use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

/// Descriptor `(n, J)` of the partial flag variety `SL(n)/P_J`.
///
/// `J` lists the simple reflections inside the Levi of the parabolic:
/// `J = {}` is the full flag variety, `J = S \ {k}` the Grassmannian
/// `Gr(k,n)`, and `J = {j}` the quotient by the minimal parabolic attached
/// to the j-th simple root (full flags with dimension `j` omitted).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FlagSpace {
    parabolic: ParabolicSet,
}

impl FlagSpace {
    pub fn new(n: usize, levi: impl IntoIterator<Item = usize>) -> Result<Self> {
        Ok(FlagSpace {
            parabolic: ParabolicSet::new(n, levi)?,
        })
    }

    pub fn full_flag(n: usize) -> Result<Self> {
        FlagSpace::new(n, [])
    }

    pub fn grassmannian(k: usize, n: usize) -> Result<Self> {
        if k < 1 || k >= n {
            return Err(Error::validation(format!(
                "Gr({},{}) needs 1 <= k <= n-1",
                k, n
            )));
        }
        FlagSpace::new(n, (1..n).filter(|&i| i != k))
    }

    /// Flags with dimension `j` omitted: the quotient by the minimal
    /// parabolic attached to the j-th simple root.
    pub fn minimal_parabolic(j: usize, n: usize) -> Result<Self> {
        if j < 1 || j >= n {
            return Err(Error::validation(format!(
                "minimal parabolic index {} outside 1..{}",
                j,
                n - 1
            )));
        }
        FlagSpace::new(n, [j])
    }

    /// The two-step flag variety `G(k, k+1, n)`.
    pub fn two_step(k: usize, n: usize) -> Result<Self> {
        if k < 1 || k + 1 >= n {
            return Err(Error::validation(format!(
                "two-step flag G({},{},{}) needs 1 <= k < k+1 <= n-1",
                k,
                k + 1,
                n
            )));
        }
        FlagSpace::new(n, (1..n).filter(|&i| i != k && i != k + 1))
    }

    pub fn n(&self) -> usize {
        self.parabolic.n()
    }

    pub fn levi(&self) -> &BTreeSet<usize> {
        self.parabolic.j()
    }

    pub fn parabolic(&self) -> &ParabolicSet {
        &self.parabolic
    }

    /// Complex dimension: `l(w0) - l(w0(J))`.
    pub fn dimension(&self) -> usize {
        let n = self.n();
        n * (n - 1) / 2 - self.parabolic.longest_subgroup_length()
    }

    /// Rank of the Picard group: `(n-1) - |J|`.
    pub fn picard_rank(&self) -> usize {
        self.n() - 1 - self.levi().len()
    }

    /// Simple-reflection indices of the Schubert divisors: `r` outside `J`.
    pub fn divisor_indices(&self) -> Vec<usize> {
        (1..self.n()).filter(|r| !self.levi().contains(r)).collect()
    }

    /// True iff `w` (given in `S_n`) indexes a Schubert class of this space.
    pub fn contains(&self, w: &Permutation) -> bool {
        w.n() == self.n() && w.is_minimal_coset_rep(self.levi())
    }

    /// The image space under the diagram involution `alpha_i -> alpha_{n-i}`.
    pub fn dynkin_involution(&self) -> FlagSpace {
        let n = self.n();
        FlagSpace::new(n, self.levi().iter().map(|&j| n - j))
            .expect("involution preserves validity")
    }

    /// Canonical CLI syntax; the most specific of
    /// `full-flag:N | gr:K,N | minimal:J,N | levi:{..},N`.
    pub fn render(&self) -> String {
        let n = self.n();
        let levi = self.levi();
        if levi.is_empty() {
            return format!("full-flag:{}", n);
        }
        if levi.len() + 2 == n {
            if let Some(k) = (1..n).find(|k| !levi.contains(k)) {
                return format!("gr:{},{}", k, n);
            }
        }
        if levi.len() == 1 {
            return format!("minimal:{},{}", levi.iter().next().unwrap(), n);
        }
        let inner: Vec<String> = levi.iter().map(|j| j.to_string()).collect();
        format!("levi:{{{}}},{}", inner.join(","), n)
    }

    /// Parses the CLI syntax accepted by [`FlagSpace::render`]. `default_n`
    /// supplies `n` for the bare `full-flag` form.
    pub fn parse(text: &str, default_n: Option<usize>) -> Result<Self> {
        let text = text.trim();
        let bad = |msg: &str| Error::validation(format!("bad space '{}': {}", text, msg));
        if text == "full-flag" {
            let n = default_n.ok_or_else(|| bad("full-flag needs n (use full-flag:N or --n)"))?;
            return FlagSpace::full_flag(n);
        }
        let (kind, rest) = text
            .split_once(':')
            .ok_or_else(|| bad("expected kind:args"))?;
        match kind {
            "full-flag" => {
                let n = rest.parse().map_err(|_| bad("bad n"))?;
                FlagSpace::full_flag(n)
            }
            "gr" => {
                let (k, n) = rest.split_once(',').ok_or_else(|| bad("expected gr:K,N"))?;
                FlagSpace::grassmannian(
                    k.trim().parse().map_err(|_| bad("bad k"))?,
                    n.trim().parse().map_err(|_| bad("bad n"))?,
                )
            }
            "minimal" => {
                let (j, n) = rest
                    .split_once(',')
                    .ok_or_else(|| bad("expected minimal:J,N"))?;
                FlagSpace::minimal_parabolic(
                    j.trim().parse().map_err(|_| bad("bad j"))?,
                    n.trim().parse().map_err(|_| bad("bad n"))?,
                )
            }
            "levi" => {
                let rest = rest.trim();
                let (set, n) = rest
                    .strip_prefix('{')
                    .and_then(|r| r.split_once('}'))
                    .ok_or_else(|| bad("expected levi:{j1,j2,...},N"))?;
                let n = n
                    .trim()
                    .strip_prefix(',')
                    .ok_or_else(|| bad("expected ,N after {..}"))?
                    .trim()
                    .parse()
                    .map_err(|_| bad("bad n"))?;
                let js: Vec<usize> = if set.trim().is_empty() {
                    Vec::new()
                } else {
                    set.split(',')
                        .map(|t| t.trim().parse().map_err(|_| bad("bad levi index")))
                        .collect::<Result<_>>()?
                };
                FlagSpace::new(n, js)
            }
            _ => Err(bad("unknown kind")),
        }
    }
}

impl fmt::Display for FlagSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// The Schubert basis of `H^{2d}(G/P_J)`: exactly the `w in W^J` with
/// `l(w) = d`, ordered by descending Lehmer code.
pub fn schubert_basis(space: &FlagSpace, d: usize) -> Result<Vec<Permutation>> {
    if d > space.dimension() {
        return Err(Error::validation(format!(
            "codimension {} exceeds dim {} of {}",
            d,
            space.dimension(),
            space
        )));
    }
    let mut basis: Vec<Permutation> = minimal_coset_reps(space.parabolic(), Some(d))
        .into_iter()
        .filter(|w| w.length() == d)
        .collect();
    basis.sort_by_key(|w| std::cmp::Reverse(w.code()));
    Ok(basis)
}

/// A homogeneous integer combination of Schubert classes of a fixed space,
/// graded by codimension.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CohomClass {
    space: FlagSpace,
    grade: usize,
    coeffs: BTreeMap<Permutation, BigInt>,
}

impl CohomClass {
    pub fn zero(space: FlagSpace, grade: usize) -> Self {
        CohomClass {
            space,
            grade,
            coeffs: BTreeMap::new(),
        }
    }

    /// The class of a single Schubert cycle; `w` must index a basis element.
    pub fn schubert(space: FlagSpace, w: &Permutation) -> Result<Self> {
        let w = w
            .trimmed()
            .embed(space.n())
            .map_err(|_| Error::validation(format!("{} does not fit inside S_{}", w, space.n())))?;
        if !space.contains(&w) {
            return Err(Error::validation(format!(
                "{} is not a minimal coset representative for {}",
                w, space
            )));
        }
        let grade = w.length();
        let mut coeffs = BTreeMap::new();
        coeffs.insert(w, BigInt::from(1));
        Ok(CohomClass {
            space,
            grade,
            coeffs,
        })
    }

    pub fn identity_class(space: FlagSpace) -> Self {
        let id = Permutation::identity(space.n());
        CohomClass::schubert(space, &id).expect("identity is always a coset representative")
    }

    pub fn space(&self) -> &FlagSpace {
        &self.space
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficient(&self, w: &Permutation) -> BigInt {
        let key = match w.trimmed().embed(self.space.n()) {
            Ok(k) => k,
            Err(_) => return BigInt::zero(),
        };
        self.coeffs.get(&key).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Permutation, &BigInt)> {
        self.coeffs.iter()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    fn add_coeff(&mut self, w: Permutation, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(w) {
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

    pub fn add(&self, other: &CohomClass) -> Result<CohomClass> {
        if self.space != other.space || self.grade != other.grade {
            return Err(Error::validation(
                "cannot add classes of different spaces or grades",
            ));
        }
        let mut out = self.clone();
        for (w, c) in &other.coeffs {
            out.add_coeff(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigInt) -> CohomClass {
        if c.is_zero() {
            return CohomClass::zero(self.space.clone(), self.grade);
        }
        CohomClass {
            space: self.space.clone(),
            grade: self.grade,
            coeffs: self
                .coeffs
                .iter()
                .map(|(w, k)| (w.clone(), k * c))
                .collect(),
        }
    }

    /// Deterministic rendering: `sigma[w]` terms in descending-code order.
    pub fn render(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut items: Vec<(&Permutation, &BigInt)> = self.coeffs.iter().collect();
        items.sort_by_key(|(w, _)| std::cmp::Reverse(w.code()));
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
            out.push_str(&format!("s[{}]", w));
        }
        out
    }
}

impl fmt::Display for CohomClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Structure constants `c_{uv}^w` of `H*(G/B)` for `SL(n)`: consults the
/// table registry, otherwise multiplies Schubert polynomials and takes the
/// coinvariant normal form. Every constant must come out positive.
pub fn structure_constants(
    n: usize,
    u: &Permutation,
    v: &Permutation,
) -> Result<Vec<(Permutation, BigInt)>> {
    let (a, b) = if u.length() <= v.length() {
        (u, v)
    } else {
        (v, u)
    };
    if let Some(t) = product_table(n, a.length(), b.length()) {
        if let Some(entry) = t.get(a, b) {
            return Ok(entry.to_vec());
        }
    }
    structure_constants_direct(n, a, b)
}

/// The polynomial-kernel route, bypassing any cached table.
pub fn structure_constants_direct(
    n: usize,
    u: &Permutation,
    v: &Permutation,
) -> Result<Vec<(Permutation, BigInt)>> {
    let prod = schubert_polynomial(u).mul(&schubert_polynomial(v));
    let nf = coinvariant_normal_form(&prod, n)?;
    let mut out = Vec::with_capacity(nf.len());
    for (w, c) in nf.iter() {
        if c < &BigInt::zero() {
            return Err(Error::internal(format!(
                "negative structure constant {} at {} in S_{} product {} * {}",
                c, w, n, u, v
            )));
        }
        out.push((w.embed(n)?, c.clone()));
    }
    out.sort_by(|(a, _), (b, _)| a.cmp(b));
    Ok(out)
}

/// Cup product through the Borel presentation: lift to Schubert polynomials,
/// multiply, take the coinvariant normal form, and restrict the support to
/// `W^J`.
pub fn cup_product(a: &CohomClass, b: &CohomClass) -> Result<CohomClass> {
    if a.space != b.space {
        return Err(Error::validation(format!(
            "cup product across different spaces {} vs {}",
            a.space, b.space
        )));
    }
    let space = a.space.clone();
    let n = space.n();
    let mut out = CohomClass::zero(space.clone(), a.grade + b.grade);
    for (u, cu) in &a.coeffs {
        for (v, cv) in &b.coeffs {
            for (w, c) in structure_constants(n, u, v)? {
                if space.contains(&w) {
                    out.add_coeff(w, c * cu * cv);
                }
            }
        }
    }
    Ok(out)
}

/// One Monk step: multiplies the basis class of `u` by the divisor class of
/// `s_r`, as the sum of `u t_{ab}` over `a <= r < b` with `l(u t_{ab}) =
/// l(u) + 1`, re-projected to `W^J`. Independent of the polynomial kernel.
pub fn monk_step(u: &Permutation, r: usize, space: &FlagSpace) -> Result<CohomClass> {
    let n = space.n();
    if r < 1 || r >= n {
        return Err(Error::validation(format!(
            "divisor index {} outside 1..{}",
            r,
            n - 1
        )));
    }
    if space.levi().contains(&r) {
        return Err(Error::validation(format!(
            "s_{} is not a Schubert divisor of {}",
            r, space
        )));
    }
    let u = u.trimmed().embed(n).map_err(|_| {
        Error::validation(format!("{} does not fit inside S_{}", u, n))
    })?;
    if !space.contains(&u) {
        return Err(Error::validation(format!(
            "{} is not a minimal coset representative for {}",
            u, space
        )));
    }
    let mut out = CohomClass::zero(space.clone(), u.length() + 1);
    for a in 1..=r {
        for b in r + 1..=n {
            if u.transposition_raises_by_one(a, b) {
                let w = u.mul_transposition_right(a, b);
                if space.contains(&w) {
                    out.add_coeff(w, BigInt::from(1));
                }
            }
        }
    }
    Ok(out)
}

/// The incidence cycles of the Grassmannian `Gr(k,n)` and the two
/// codimension-3 cycles used on `Gr(2,n)`, resolved inside an ambient space
/// whose `W^J` contains them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NamedCycleKind {
    /// `D(k)`: the Schubert divisor of `Gr(k,n)`, partition `(1)`.
    Divisor(usize),
    /// `D(k,j)` with `j = k+1` (partition `(2)`) or `j = k-1` (partition `(1,1)`).
    Incidence(usize, usize),
    /// Partition `(2,1)` on `Gr(2,n)`.
    E1,
    /// Partition `(3)` on `Gr(2,n)`.
    E2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedCycle {
    pub kind: NamedCycleKind,
    pub ambient: FlagSpace,
}

impl NamedCycle {
    pub fn new(kind: NamedCycleKind, ambient: FlagSpace) -> Self {
        NamedCycle { kind, ambient }
    }

    /// `(k, partition)` of the underlying Grassmannian cycle.
    pub fn shape(&self) -> Result<(usize, Partition)> {
        match &self.kind {
            NamedCycleKind::Divisor(k) => Ok((*k, Partition::new([1])?)),
            NamedCycleKind::Incidence(k, j) if *j == k + 1 => Ok((*k, Partition::new([2])?)),
            NamedCycleKind::Incidence(k, j) if j + 1 == *k => Ok((*k, Partition::new([1, 1])?)),
            NamedCycleKind::Incidence(k, j) => Err(Error::validation(format!(
                "incidence cycle D({},{}) must have |k-j| = 1",
                k, j
            ))),
            NamedCycleKind::E1 => Ok((2, Partition::new([2, 1])?)),
            NamedCycleKind::E2 => Ok((2, Partition::new([3])?)),
        }
    }

    pub fn render(&self) -> String {
        match &self.kind {
            NamedCycleKind::Divisor(k) => format!("D{}", k),
            NamedCycleKind::Incidence(k, j) => format!("D{},{}", k, j),
            NamedCycleKind::E1 => "E1".to_string(),
            NamedCycleKind::E2 => "E2".to_string(),
        }
    }

    /// Parses `D2 | D2,3 | E1 | E2`.
    pub fn parse(text: &str, ambient: FlagSpace) -> Result<Self> {
        let text = text.trim();
        let kind = if text == "E1" {
            NamedCycleKind::E1
        } else if text == "E2" {
            NamedCycleKind::E2
        } else if let Some(rest) = text.strip_prefix('D') {
            match rest.split_once(',') {
                None => NamedCycleKind::Divisor(
                    rest.parse()
                        .map_err(|_| Error::validation(format!("bad cycle '{}'", text)))?,
                ),
                Some((k, j)) => NamedCycleKind::Incidence(
                    k.trim()
                        .parse()
                        .map_err(|_| Error::validation(format!("bad cycle '{}'", text)))?,
                    j.trim()
                        .parse()
                        .map_err(|_| Error::validation(format!("bad cycle '{}'", text)))?,
                ),
            }
        } else {
            return Err(Error::validation(format!("unknown cycle '{}'", text)));
        };
        Ok(NamedCycle::new(kind, ambient))
    }
}

/// Resolves a named cycle to its class. Out-of-box shapes (empty incidence
/// sets such as `D(1,0)` or `D(n,n+1)`) resolve to the zero class; shapes
/// whose permutation falls outside `W^J` of the ambient are domain errors.
pub fn named_cycle(nc: &NamedCycle) -> Result<CohomClass> {
    let (k, lambda) = nc.shape()?;
    let n = nc.ambient.n();
    if k < 1 || k > n {
        return Err(Error::validation(format!(
            "cycle {} has no meaning for n = {}",
            nc.render(),
            n
        )));
    }
    if !lambda.fits_in_box(k, n - k) {
        return Ok(CohomClass::zero(nc.ambient.clone(), lambda.size()));
    }
    let w = grassmannian_permutation(&lambda, k, n)?;
    CohomClass::schubert(nc.ambient.clone(), &w).map_err(|_| {
        Error::validation(format!(
            "cycle {} (descent at {}) does not live on {}",
            nc.render(),
            k,
            nc.ambient
        ))
    })
}

/// Box-constrained Pieri step: the partitions obtained from `lambda` by
/// adding one box, inside the `k x (n-k)` box. Independent oracle for
/// divisor products on `Gr(k,n)`.
pub fn pieri_product(lambda: &Partition, k: usize, n: usize) -> Result<Vec<Partition>> {
    if k < 1 || k > n {
        return Err(Error::validation(format!("k={} outside 1..{}", k, n)));
    }
    if !lambda.fits_in_box(k, n - k) {
        return Err(Error::validation(format!(
            "partition {} outside the {}x{} box",
            lambda,
            k,
            n - k
        )));
    }
    let mut out = Vec::new();
    for row in 0..k {
        let mut parts: Vec<usize> = lambda.parts().to_vec();
        parts.resize(k, 0);
        parts[row] += 1;
        if parts[row] > n - k {
            continue;
        }
        if row > 0 && parts[row] > parts[row - 1] {
            continue;
        }
        out.push(Partition::new(parts)?);
    }
    Ok(out)
}

/// The diagram involution on classes: `J -> {n-j}` and each basis element
/// `w -> w0 w w0`. An involution and a ring isomorphism.
pub fn dynkin_involution_class(c: &CohomClass) -> CohomClass {
    let space = c.space().dynkin_involution();
    let mut out = CohomClass::zero(space, c.grade());
    for (w, k) in c.iter() {
        out.add_coeff(w.conjugate_by_longest(), k.clone());
    }
    out
}
