//! Constructive geometry over exact rationals: nested subspaces, the
//! symplectic line map `P^3 -> G(1,3,4)`, and its fiberwise embedding into
//! flag varieties of minimal parabolics.

pub mod linalg;

use crate::error::{Error, Result};
use linalg::QMatrix;
use num::{BigInt, BigRational, One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// Default seed for reproducible sampling runs.
pub const DEFAULT_SEED: u64 = 0x5EED_F1A6;

/// A linear subspace of `Q^n`, stored by its reduced-row-echelon basis so
/// equal subspaces compare equal literally.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalSubspace {
    ambient_dim: usize,
    basis: Vec<Vec<BigRational>>,
}

impl RationalSubspace {
    /// Builds the span of the given vectors; fails if they are dependent
    /// (the caller claimed a basis) or have the wrong ambient dimension.
    pub fn new(ambient_dim: usize, basis: Vec<Vec<BigRational>>) -> Result<Self> {
        for v in &basis {
            if v.len() != ambient_dim {
                return Err(Error::validation(format!(
                    "vector of length {} in ambient dimension {}",
                    v.len(),
                    ambient_dim
                )));
            }
        }
        let claimed = basis.len();
        let space = RationalSubspace::span(ambient_dim, basis);
        if space.dim() != claimed {
            return Err(Error::validation(
                "basis vectors are linearly dependent (exact rank check)",
            ));
        }
        Ok(space)
    }

    /// The span of arbitrary vectors (dependencies allowed).
    pub fn span(ambient_dim: usize, vectors: Vec<Vec<BigRational>>) -> Self {
        if vectors.is_empty() {
            return RationalSubspace {
                ambient_dim,
                basis: Vec::new(),
            };
        }
        let (r, pivots) = QMatrix::from_rows(vectors).rref();
        let basis = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        RationalSubspace { ambient_dim, basis }
    }

    pub fn zero_space(ambient_dim: usize) -> Self {
        RationalSubspace {
            ambient_dim,
            basis: Vec::new(),
        }
    }

    pub fn full_space(ambient_dim: usize) -> Self {
        let mut basis = Vec::with_capacity(ambient_dim);
        for i in 0..ambient_dim {
            let mut v = vec![BigRational::zero(); ambient_dim];
            v[i] = BigRational::one();
            basis.push(v);
        }
        RationalSubspace { ambient_dim, basis }
    }

    /// Span of integer coordinate vectors; test/sampling convenience.
    pub fn span_ints(ambient_dim: usize, vectors: &[&[i64]]) -> Self {
        RationalSubspace::span(
            ambient_dim,
            vectors
                .iter()
                .map(|v| {
                    v.iter()
                        .map(|&x| BigRational::from_integer(BigInt::from(x)))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<BigRational>] {
        &self.basis
    }

    pub fn contains_vector(&self, v: &[BigRational]) -> bool {
        if v.len() != self.ambient_dim {
            return false;
        }
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        RationalSubspace::span(self.ambient_dim, rows).dim() == self.dim()
    }

    pub fn contains(&self, other: &RationalSubspace) -> bool {
        self.ambient_dim == other.ambient_dim
            && other.basis.iter().all(|v| self.contains_vector(v))
    }

    /// The subspace `self + other`.
    pub fn sum(&self, other: &RationalSubspace) -> RationalSubspace {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        RationalSubspace::span(self.ambient_dim, rows)
    }
}

/// A point of a partial flag variety: nested subspaces with prescribed
/// dimensions. Construction is permissive (so broken nestings can be
/// packaged and inspected); [`validate_flag`] is the exact checker.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FlagPoint {
    ambient_dim: usize,
    subspaces: Vec<RationalSubspace>,
}

impl FlagPoint {
    pub fn new(ambient_dim: usize, subspaces: Vec<RationalSubspace>) -> Result<Self> {
        for s in &subspaces {
            if s.ambient_dim() != ambient_dim {
                return Err(Error::validation(
                    "flag member has the wrong ambient dimension",
                ));
            }
        }
        Ok(FlagPoint {
            ambient_dim,
            subspaces,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subspaces.iter().map(|s| s.dim()).collect()
    }

    pub fn subspaces(&self) -> &[RationalSubspace] {
        &self.subspaces
    }

    pub fn subspace_of_dim(&self, d: usize) -> Option<&RationalSubspace> {
        self.subspaces.iter().find(|s| s.dim() == d)
    }

    /// Serialises as a structured-text matrix list with `p/q` entries.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("flag-point v1\n");
        out.push_str(&format!("ambient = {}\n", self.ambient_dim));
        out.push_str(&format!("subspaces = {}\n", self.subspaces.len()));
        for s in &self.subspaces {
            out.push_str(&format!("dim {}\n", s.dim()));
            for row in s.basis() {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                out.push_str(&cells.join(" "));
                out.push('\n');
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<FlagPoint> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::validation("empty flag-point text"))?;
        if header.trim() != "flag-point v1" {
            return Err(Error::validation("bad flag-point header"));
        }
        let ambient: usize = parse_kv(lines.next(), "ambient")?;
        let count: usize = parse_kv(lines.next(), "subspaces")?;
        let mut subspaces = Vec::with_capacity(count);
        for _ in 0..count {
            let dim_line = lines
                .next()
                .ok_or_else(|| Error::validation("truncated flag-point text"))?;
            let d: usize = dim_line
                .trim()
                .strip_prefix("dim ")
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::validation("bad dim line"))?;
            let mut rows = Vec::with_capacity(d);
            for _ in 0..d {
                let row_line = lines
                    .next()
                    .ok_or_else(|| Error::validation("truncated flag-point text"))?;
                let row: Vec<BigRational> = row_line
                    .split_whitespace()
                    .map(|t| {
                        t.parse::<BigRational>()
                            .map_err(|_| Error::validation(format!("bad rational '{}'", t)))
                    })
                    .collect::<Result<_>>()?;
                rows.push(row);
            }
            subspaces.push(RationalSubspace::new(ambient, rows)?);
        }
        FlagPoint::new(ambient, subspaces)
    }
}

fn parse_kv(line: Option<&str>, key: &str) -> Result<usize> {
    line.and_then(|l| l.trim().strip_prefix(key))
        .and_then(|r| r.trim().strip_prefix('='))
        .and_then(|r| r.trim().parse().ok())
        .ok_or_else(|| Error::validation(format!("expected '{} = <value>'", key)))
}

impl fmt::Display for FlagPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// True iff the dimensions are strictly increasing and each member is
/// exactly contained in the next.
pub fn validate_flag(pt: &FlagPoint) -> bool {
    let subs = pt.subspaces();
    for w in subs.windows(2) {
        if w[0].dim() >= w[1].dim() || !w[1].contains(&w[0]) {
            return false;
        }
    }
    true
}

/// A nondegenerate alternating bilinear form on `Q^4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticForm {
    matrix: QMatrix,
}

impl SymplecticForm {
    pub fn new(matrix: QMatrix) -> Result<Self> {
        if matrix.rows() != 4 || matrix.cols() != 4 {
            return Err(Error::validation("symplectic form must be 4x4"));
        }
        for i in 0..4 {
            for j in 0..4 {
                if matrix.at(i, j) != &(-matrix.at(j, i).clone()) {
                    return Err(Error::validation("form is not alternating"));
                }
            }
        }
        if matrix.determinant().is_zero() {
            return Err(Error::validation("form is degenerate"));
        }
        Ok(SymplecticForm { matrix })
    }

    /// `omega(e1,e3) = omega(e2,e4) = 1`, all other independent pairings 0.
    pub fn standard() -> Self {
        let mut m = QMatrix::zero(4, 4);
        let one = BigRational::one();
        m.set(0, 2, one.clone());
        m.set(2, 0, -one.clone());
        m.set(1, 3, one.clone());
        m.set(3, 1, -one);
        SymplecticForm { matrix: m }
    }

    pub fn pairing(&self, u: &[BigRational], v: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for i in 0..4 {
            for j in 0..4 {
                acc += &u[i] * self.matrix.at(i, j) * &v[j];
            }
        }
        acc
    }
}

/// The symplectic perpendicular of a line in `Q^4`: the exact kernel of
/// `v -> omega(l, v)`, a 3-space containing the line.
pub fn symplectic_perp(
    line: &RationalSubspace,
    omega: &SymplecticForm,
) -> Result<RationalSubspace> {
    if line.ambient_dim() != 4 || line.dim() != 1 {
        return Err(Error::validation("expected a line in ambient dimension 4"));
    }
    let l = &line.basis()[0];
    // row functional v -> omega(l, v)
    let mut row = vec![BigRational::zero(); 4];
    for (j, slot) in row.iter_mut().enumerate() {
        for i in 0..4 {
            *slot += &l[i] * omega.matrix.at(i, j);
        }
    }
    let kernel = QMatrix::from_rows(vec![row]).kernel_basis();
    let perp = RationalSubspace::span(4, kernel);
    if perp.dim() != 3 {
        return Err(Error::internal(
            "perpendicular of a line under a nondegenerate form must have dimension 3",
        ));
    }
    if !perp.contains(line) {
        return Err(Error::internal(
            "alternating form must leave the line inside its perpendicular",
        ));
    }
    Ok(perp)
}

/// `L -> (L, L^perp, V)`: a point of `G(1,3,4)`, with the standard form.
pub fn p3_to_g134(line: &RationalSubspace) -> Result<FlagPoint> {
    p3_to_g134_with(&SymplecticForm::standard(), line)
}

pub fn p3_to_g134_with(omega: &SymplecticForm, line: &RationalSubspace) -> Result<FlagPoint> {
    let perp = symplectic_perp(line, omega)?;
    FlagPoint::new(4, vec![line.clone(), perp, RationalSubspace::full_space(4)])
}

/// Lifts a `(1,3,4)` flag point through the quotient by `L_{j-2}` into the
/// fiber of `G(1,..,j-1,j+1,..,n) -> G(1,..,j-2,j+2,..,n)` over the fixed
/// partial flag, producing a full flag with dimension `j` omitted.
///
/// `fixed` lists the subspaces of dimensions `1..j-2` and `j+2..n` in
/// increasing order; the final full space may be omitted.
pub fn embed_fiber(
    pt: &FlagPoint,
    n: usize,
    j: usize,
    fixed: &[RationalSubspace],
) -> Result<FlagPoint> {
    if j < 2 || j + 2 > n {
        return Err(Error::validation(format!(
            "embedding needs 2 <= j <= n-2, got j={} n={}",
            j, n
        )));
    }
    if pt.ambient_dim() != 4 || pt.dims() != vec![1, 3, 4] {
        return Err(Error::validation("point must be a (1,3,4) flag in Q^4"));
    }
    if !validate_flag(pt) {
        return Err(Error::validation("input flag point fails validation"));
    }
    let mut expected_dims: Vec<usize> = (1..=j.saturating_sub(2)).collect();
    expected_dims.extend(j + 2..=n);
    let mut fixed: Vec<RationalSubspace> = fixed.to_vec();
    if fixed.len() + 1 == expected_dims.len() {
        fixed.push(RationalSubspace::full_space(n));
    }
    if fixed.len() != expected_dims.len() {
        return Err(Error::validation(format!(
            "fixed flag must have dimensions {:?}",
            expected_dims
        )));
    }
    for (s, &d) in fixed.iter().zip(&expected_dims) {
        if s.ambient_dim() != n || s.dim() != d {
            return Err(Error::validation(format!(
                "fixed flag member has dimension {} where {} was expected",
                s.dim(),
                d
            )));
        }
    }
    for w in fixed.windows(2) {
        if !w[1].contains(&w[0]) {
            return Err(Error::validation("fixed flag is not nested"));
        }
    }
    let small = if j == 2 {
        RationalSubspace::zero_space(n)
    } else {
        fixed[j - 3].clone() // dimension j-2
    };
    let big = fixed[expected_dims.iter().position(|&d| d == j + 2).unwrap()].clone();
    debug_assert_eq!(big.dim() - small.dim(), 4);

    // complement basis of small inside big: the quotient identification Q^4 ~ big/small
    let mut complement: Vec<Vec<BigRational>> = Vec::with_capacity(4);
    let mut acc = small.clone();
    for row in big.basis() {
        if !acc.contains_vector(row) {
            complement.push(row.clone());
            acc = acc.sum(&RationalSubspace::span(n, vec![row.clone()]));
        }
    }
    if complement.len() != 4 {
        return Err(Error::internal("quotient complement must have dimension 4"));
    }
    let lift = |v: &[BigRational]| -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); n];
        for (t, c) in complement.iter().enumerate() {
            for (slot, cv) in out.iter_mut().zip(c) {
                *slot += &v[t] * cv;
            }
        }
        out
    };
    let preimage = |s: &RationalSubspace| -> RationalSubspace {
        let mut rows = small.basis().to_vec();
        rows.extend(s.basis().iter().map(|v| lift(v)));
        RationalSubspace::span(n, rows)
    };
    let l_jm1 = preimage(&pt.subspaces()[0]); // dimension j-1
    let l_jp1 = preimage(&pt.subspaces()[1]); // dimension j+1

    let mut members: Vec<RationalSubspace> = Vec::new();
    for d in 1..=n {
        if d == j {
            continue;
        }
        if d == j - 1 {
            members.push(l_jm1.clone());
        } else if d == j + 1 {
            members.push(l_jp1.clone());
        } else {
            let idx = expected_dims.iter().position(|&e| e == d).unwrap();
            members.push(fixed[idx].clone());
        }
    }
    let point = FlagPoint::new(n, members)?;
    if !validate_flag(&point) {
        return Err(Error::internal(
            "fiber embedding produced a non-nested flag",
        ));
    }
    Ok(point)
}

/// First pair of indices whose flag points differ (exact comparison), if any.
pub fn nonconstancy_witness(points: &[FlagPoint]) -> Option<(usize, usize)> {
    for i in 0..points.len() {
        for k in i + 1..points.len() {
            if points[i] != points[k] {
                return Some((i, k));
            }
        }
    }
    None
}

/// Reproducible random rational lines in `Q^4`: integer coordinates drawn
/// from `[-9, 9]`, zero vectors rejected and redrawn.
pub fn sample_rational_lines(count: usize, seed: u64) -> Vec<RationalSubspace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let coords: Vec<i64> = (0..4).map(|_| rng.gen_range(-9..=9)).collect();
        if coords.iter().all(|&c| c == 0) {
            continue;
        }
        out.push(RationalSubspace::span_ints(4, &[&coords]));
    }
    out
}

/// The standard coordinate flag member `M_i = span(e_1..e_i)` in `Q^n`.
pub fn coordinate_subspace(i: usize, n: usize) -> RationalSubspace {
    let mut rows = Vec::with_capacity(i);
    for r in 0..i {
        let mut v = vec![BigRational::zero(); n];
        v[r] = BigRational::one();
        rows.push(v);
    }
    RationalSubspace::span(n, rows)
}

/// The coordinate fixed flag for [`embed_fiber`]: `M_1, ..., M_{j-2},
/// M_{j+2}, ..., M_n`.
pub fn coordinate_fixed_flag(n: usize, j: usize) -> Vec<RationalSubspace> {
    let mut out = Vec::new();
    for d in 1..=j.saturating_sub(2) {
        out.push(coordinate_subspace(d, n));
    }
    for d in j + 2..=n {
        out.push(coordinate_subspace(d, n));
    }
    out
}
