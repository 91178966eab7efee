//! Symmetric-group combinatorics: lengths, Lehmer codes, parabolic
//! subgroups `W_J` and their minimal coset representatives `W^J`.
//!
//! Permutations are kept in one-line notation `(w(1), ..., w(n))`; products,
//! inversions and descent tests are all cheapest in that form. Reduced words
//! are derived on demand and never stored.

use crate::error::{Error, Result};
use std::collections::BTreeSet;
use std::fmt;

/// A permutation of `{1..n}` in one-line notation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    entries: Vec<usize>,
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strs: Vec<String> = self.entries.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", strs.join(","))
    }
}

impl Permutation {
    /// Validates one-line notation: the entries must be a bijection of `{1..n}`.
    pub fn from_one_line(entries: Vec<usize>) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::validation("empty one-line notation"));
        }
        let mut seen = vec![false; n + 1];
        for &v in &entries {
            if v < 1 || v > n {
                return Err(Error::validation(format!(
                    "entry {} out of range 1..{} in one-line notation",
                    v, n
                )));
            }
            if seen[v] {
                return Err(Error::validation(format!(
                    "duplicate entry {} in one-line notation",
                    v
                )));
            }
            seen[v] = true;
        }
        Ok(Permutation { entries })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            entries: (1..=n).collect(),
        }
    }

    /// The longest element `w0`: `i -> n+1-i`.
    pub fn longest(n: usize) -> Self {
        Permutation {
            entries: (1..=n).rev().collect(),
        }
    }

    /// Parses `"2,1,3"` style comma-separated one-line notation.
    pub fn parse(text: &str) -> Result<Self> {
        let entries: Vec<usize> = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::validation(format!("bad permutation entry '{}'", t)))
            })
            .collect::<Result<_>>()?;
        Permutation::from_one_line(entries)
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    /// `w(i)` with 1-based `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.entries[i - 1]
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().enumerate().all(|(i, &v)| v == i + 1)
    }

    /// Inversion count `#{(i,j) : i<j, w(i)>w(j)}`.
    pub fn length(&self) -> usize {
        let mut len = 0;
        for i in 0..self.entries.len() {
            for j in i + 1..self.entries.len() {
                if self.entries[i] > self.entries[j] {
                    len += 1;
                }
            }
        }
        len
    }

    /// Lehmer code: `code[i] = #{j>i : w(j) < w(i)}` (0-based output slots).
    pub fn code(&self) -> Vec<usize> {
        let n = self.entries.len();
        let mut code = vec![0; n];
        for i in 0..n {
            for j in i + 1..n {
                if self.entries[j] < self.entries[i] {
                    code[i] += 1;
                }
            }
        }
        code
    }

    /// The unique permutation with the given Lehmer code, in the smallest
    /// symmetric group containing it (trailing fixed points trimmed).
    pub fn from_code(code: &[usize]) -> Self {
        let mut n = 1;
        for (i, &c) in code.iter().enumerate() {
            n = n.max(i + 1 + c);
        }
        let mut avail: Vec<usize> = (1..=n).collect();
        let mut entries = Vec::with_capacity(n);
        for i in 0..n {
            let c = if i < code.len() { code[i] } else { 0 };
            entries.push(avail.remove(c));
        }
        Permutation { entries }.trimmed()
    }

    pub fn inverse(&self) -> Self {
        let n = self.entries.len();
        let mut inv = vec![0; n];
        for (i, &v) in self.entries.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Permutation { entries: inv }
    }

    /// Group product `(self * other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Self {
        assert_eq!(self.n(), other.n(), "composing permutations of unequal rank");
        Permutation {
            entries: other.entries.iter().map(|&v| self.entries[v - 1]).collect(),
        }
    }

    /// Right product by the simple reflection `s_i` (swaps positions `i, i+1`).
    pub fn mul_simple_right(&self, i: usize) -> Self {
        let mut entries = self.entries.clone();
        entries.swap(i - 1, i);
        Permutation { entries }
    }

    /// Right product by the transposition `t_{ab}` (swaps positions `a, b`).
    pub fn mul_transposition_right(&self, a: usize, b: usize) -> Self {
        let mut entries = self.entries.clone();
        entries.swap(a - 1, b - 1);
        Permutation { entries }
    }

    /// True iff `w(i) > w(i+1)`.
    pub fn has_descent(&self, i: usize) -> bool {
        self.entries[i - 1] > self.entries[i]
    }

    /// Positions `i` with `w(i) > w(i+1)`.
    pub fn descents(&self) -> Vec<usize> {
        (1..self.entries.len())
            .filter(|&i| self.has_descent(i))
            .collect()
    }

    pub fn last_descent(&self) -> Option<usize> {
        (1..self.entries.len()).rev().find(|&i| self.has_descent(i))
    }

    pub fn first_ascent(&self) -> Option<usize> {
        (1..self.entries.len()).find(|&i| !self.has_descent(i))
    }

    /// Extends to `S_m` by appending fixed points.
    pub fn embed(&self, m: usize) -> Result<Self> {
        if m < self.entries.len() {
            return Err(Error::validation(format!(
                "cannot embed a permutation of S_{} into S_{}",
                self.entries.len(),
                m
            )));
        }
        let mut entries = self.entries.clone();
        entries.extend(self.entries.len() + 1..=m);
        Ok(Permutation { entries })
    }

    /// Drops trailing fixed points; the canonical representative under the
    /// stability `w -> w x 1`. The identity trims to `[1]`.
    pub fn trimmed(&self) -> Self {
        let mut m = self.entries.len();
        while m > 1 && self.entries[m - 1] == m {
            m -= 1;
        }
        Permutation {
            entries: self.entries[..m].to_vec(),
        }
    }

    /// Conjugation by the longest element: `(w0 w w0)(i) = n+1 - w(n+1-i)`.
    pub fn conjugate_by_longest(&self) -> Self {
        let n = self.entries.len();
        Permutation {
            entries: (1..=n).map(|i| n + 1 - self.entries[n - i]).collect(),
        }
    }

    /// True iff `w(j) < w(j+1)` for every `j` in `js`, i.e. `w` is the
    /// minimal-length representative of its coset `w W_J`.
    pub fn is_minimal_coset_rep(&self, js: &BTreeSet<usize>) -> bool {
        js.iter().all(|&j| !self.has_descent(j))
    }

    /// True iff `l(w t_{ab}) = l(w) + 1` for positions `a < b`: the values
    /// satisfy `w(a) < w(b)` with nothing in between at intermediate
    /// positions.
    pub fn transposition_raises_by_one(&self, a: usize, b: usize) -> bool {
        let va = self.apply(a);
        let vb = self.apply(b);
        va < vb && !(a + 1..b).any(|c| va < self.apply(c) && self.apply(c) < vb)
    }
}

/// Computes `(length, code)` of a permutation in one pass over the code.
pub fn length_and_code(w: &Permutation) -> (usize, Vec<usize>) {
    let code = w.code();
    (code.iter().sum(), code)
}

/// Parabolic datum `(n, J)` with `J` a set of simple-reflection indices in
/// `1..n-1` generating `W_J`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParabolicSet {
    n: usize,
    j: BTreeSet<usize>,
}

impl ParabolicSet {
    pub fn new(n: usize, j: impl IntoIterator<Item = usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("rank parameter n must be positive"));
        }
        let j: BTreeSet<usize> = j.into_iter().collect();
        for &idx in &j {
            if idx < 1 || idx >= n {
                return Err(Error::validation(format!(
                    "simple reflection index {} outside 1..{}",
                    idx,
                    n.saturating_sub(1)
                )));
            }
        }
        Ok(ParabolicSet { n, j })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j(&self) -> &BTreeSet<usize> {
        &self.j
    }

    /// `|W_J|`: product of factorials over the maximal runs of adjacent
    /// indices in `J`.
    pub fn subgroup_order(&self) -> u128 {
        self.j_runs()
            .into_iter()
            .map(|run| factorial(run + 1))
            .product()
    }

    /// Length of the longest element of `W_J`.
    pub fn longest_subgroup_length(&self) -> usize {
        self.j_runs()
            .into_iter()
            .map(|run| run * (run + 1) / 2)
            .sum()
    }

    /// Sizes of maximal runs of consecutive indices in `J`.
    fn j_runs(&self) -> Vec<usize> {
        let mut runs = Vec::new();
        let mut prev: Option<usize> = None;
        let mut cur = 0usize;
        for &idx in &self.j {
            match prev {
                Some(p) if idx == p + 1 => cur += 1,
                _ => {
                    if cur > 0 {
                        runs.push(cur);
                    }
                    cur = 1;
                }
            }
            prev = Some(idx);
        }
        if cur > 0 {
            runs.push(cur);
        }
        runs
    }
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product::<u128>().max(1)
}

/// Enumerates `W^J` elements with `l(w) <= max_length` (`None` = unbounded),
/// sorted by `(length, one-line lexicographic)`.
///
/// Generation walks Lehmer codes directly: `w` avoids a descent at `j` iff
/// `code[j] <= code[j+1]`, so the backtracking never touches permutations
/// outside `W^J`, which keeps low-codimension queries cheap even for large n.
pub fn minimal_coset_reps(p: &ParabolicSet, max_length: Option<usize>) -> Vec<Permutation> {
    let n = p.n();
    let bound = max_length.unwrap_or(n * (n - 1) / 2);
    let mut out = Vec::new();
    let mut code = vec![0usize; n];
    gen_codes(&mut code, 0, bound, n, p.j(), &mut out);
    out.sort_by_key(|w| (w.length(), w.entries().to_vec()));
    out
}

fn gen_codes(
    code: &mut Vec<usize>,
    pos: usize,
    budget: usize,
    n: usize,
    j: &BTreeSet<usize>,
    out: &mut Vec<Permutation>,
) {
    if pos == n {
        let w = Permutation::from_code(code);
        out.push(w.embed(n).expect("code fits in S_n"));
        return;
    }
    // w has no descent at position p iff code[p-1] <= code[p]
    let max_here = (n - 1 - pos).min(budget);
    for c in 0..=max_here {
        if pos > 0 && j.contains(&pos) && code[pos - 1] > c {
            continue;
        }
        code[pos] = c;
        gen_codes(code, pos + 1, budget - c, n, j, out);
    }
    code[pos] = 0;
}

/// A partition: weakly decreasing positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(parts: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut parts: Vec<usize> = parts.into_iter().collect();
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::validation("partition parts must be weakly decreasing"));
        }
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn fits_in_box(&self, rows: usize, cols: usize) -> bool {
        self.0.len() <= rows && self.0.first().copied().unwrap_or(0) <= cols
    }

    /// Complement inside a `rows x cols` box: `(cols - l_rows, ..., cols - l_1)`.
    pub fn complement_in_box(&self, rows: usize, cols: usize) -> Result<Self> {
        if !self.fits_in_box(rows, cols) {
            return Err(Error::validation("partition does not fit in the box"));
        }
        let mut padded: Vec<usize> = self.0.clone();
        padded.resize(rows, 0);
        Partition::new(padded.into_iter().rev().map(|p| cols - p))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "()");
        }
        let strs: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", strs.join(","))
    }
}

/// The unique permutation in `S_n` with descent only at `k` whose code,
/// restricted to the first `k` slots, is the reversed partition. Indexes the
/// Schubert class of the partition on `Gr(k,n)`.
pub fn grassmannian_permutation(lambda: &Partition, k: usize, n: usize) -> Result<Permutation> {
    if k < 1 || k > n {
        return Err(Error::validation(format!("k={} outside 1..{}", k, n)));
    }
    if !lambda.fits_in_box(k, n - k) {
        return Err(Error::validation(format!(
            "partition {} does not fit in the {}x{} box",
            lambda,
            k,
            n - k
        )));
    }
    let mut entries = Vec::with_capacity(n);
    for i in 1..=k {
        let part = lambda.parts().get(k - i).copied().unwrap_or(0);
        entries.push(i + part);
    }
    let used: BTreeSet<usize> = entries.iter().copied().collect();
    entries.extend((1..=n).filter(|v| !used.contains(v)));
    Permutation::from_one_line(entries)
}

/// Inverse of [`grassmannian_permutation`]: reads the partition off a
/// permutation whose descents all sit at `k`.
pub fn partition_of_grassmannian(w: &Permutation, k: usize) -> Result<Partition> {
    let descents = w.descents();
    if !descents.iter().all(|&d| d == k) {
        return Err(Error::validation(format!(
            "{} is not Grassmannian with descent at {}",
            w, k
        )));
    }
    Partition::new((1..=k).rev().map(|i| w.apply(i) - i))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(v: &[usize]) -> Permutation {
        Permutation::from_one_line(v.to_vec()).unwrap()
    }

    /// Brute-force W^J filter over all of S_n; the generator must agree.
    fn coset_reps_naive(p: &ParabolicSet, max_len: Option<usize>) -> Vec<Permutation> {
        let mut all = Vec::new();
        permute(&mut (1..=p.n()).collect::<Vec<_>>(), 0, &mut all);
        let bound = max_len.unwrap_or(usize::MAX);
        let mut out: Vec<Permutation> = all
            .into_iter()
            .map(perm_from)
            .filter(|w| w.is_minimal_coset_rep(p.j()) && w.length() <= bound)
            .collect();
        out.sort_by_key(|w| (w.length(), w.entries().to_vec()));
        out
    }

    fn perm_from(v: Vec<usize>) -> Permutation {
        Permutation::from_one_line(v).unwrap()
    }

    fn permute(v: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k == v.len() {
            out.push(v.clone());
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            permute(v, k + 1, out);
            v.swap(k, i);
        }
    }

    #[test]
    fn length_and_code_examples() {
        assert_eq!(length_and_code(&perm(&[1, 2, 3])), (0, vec![0, 0, 0]));
        assert_eq!(length_and_code(&perm(&[1, 3, 2])), (1, vec![0, 1, 0]));
        // brute-force inversion count of the longest element of S_4
        let w = perm(&[4, 3, 2, 1]);
        let mut inv = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                if w.entries()[i] > w.entries()[j] {
                    inv += 1;
                }
            }
        }
        assert_eq!(inv, 6);
        assert_eq!(length_and_code(&w), (6, vec![3, 2, 1, 0]));
    }

    #[test]
    fn malformed_one_line_rejected() {
        assert!(Permutation::from_one_line(vec![1, 1, 3]).is_err());
        assert!(Permutation::from_one_line(vec![0, 1, 2]).is_err());
        assert!(Permutation::from_one_line(vec![2, 3, 4]).is_err());
        assert!(Permutation::from_one_line(vec![]).is_err());
    }

    #[test]
    fn code_round_trip() {
        for w in coset_reps_naive(&ParabolicSet::new(5, []).unwrap(), None) {
            assert_eq!(Permutation::from_code(&w.code()).embed(5).unwrap(), w);
        }
    }

    #[test]
    fn coset_reps_examples() {
        let p = ParabolicSet::new(3, [1]).unwrap();
        let reps = minimal_coset_reps(&p, None);
        assert_eq!(
            reps,
            vec![perm(&[1, 2, 3]), perm(&[1, 3, 2]), perm(&[2, 3, 1])]
        );

        let p = ParabolicSet::new(3, []).unwrap();
        assert_eq!(minimal_coset_reps(&p, None).len(), 6);

        let p = ParabolicSet::new(4, [1, 2, 3]).unwrap();
        assert_eq!(minimal_coset_reps(&p, None), vec![perm(&[1, 2, 3, 4])]);
    }

    #[test]
    fn coset_generator_matches_naive_filter() {
        for n in 2..=5 {
            for mask in 0..(1u32 << (n - 1)) {
                let j: Vec<usize> = (1..n).filter(|&i| mask & (1 << (i - 1)) != 0).collect();
                let p = ParabolicSet::new(n, j).unwrap();
                for bound in [None, Some(0), Some(1), Some(3)] {
                    assert_eq!(
                        minimal_coset_reps(&p, bound),
                        coset_reps_naive(&p, bound),
                        "n={} J={:?} bound={:?}",
                        n,
                        p.j(),
                        bound
                    );
                }
            }
        }
    }

    #[test]
    fn coset_times_subgroup_is_group_order() {
        for n in 1..=6 {
            for mask in 0..(1u32 << (n - 1)) {
                let j: Vec<usize> = (1..n).filter(|&i| mask & (1 << (i - 1)) != 0).collect();
                let p = ParabolicSet::new(n, j).unwrap();
                let reps = minimal_coset_reps(&p, None);
                assert_eq!(
                    reps.len() as u128 * p.subgroup_order(),
                    factorial(n),
                    "n={} J={:?}",
                    n,
                    p.j()
                );
            }
        }
    }

    #[test]
    fn longest_element_complements_length() {
        for n in 1..=6 {
            let w0 = Permutation::longest(n);
            let top = n * (n - 1) / 2;
            for w in coset_reps_naive(&ParabolicSet::new(n, []).unwrap(), None) {
                assert_eq!(w0.compose(&w).length(), top - w.length());
            }
        }
    }

    #[test]
    fn length_generating_function_is_q_factorial() {
        // coefficientwise: sum_w q^{l(w)} = prod_{i=1}^{n} (1 + q + ... + q^{i-1})
        for n in 1..=6 {
            let mut histogram = vec![0u64; n * (n - 1) / 2 + 1];
            for w in coset_reps_naive(&ParabolicSet::new(n, []).unwrap(), None) {
                histogram[w.length()] += 1;
            }
            let mut poly = vec![1u64];
            for i in 1..=n {
                let mut next = vec![0u64; poly.len() + i - 1];
                for (d, &c) in poly.iter().enumerate() {
                    for k in 0..i {
                        next[d + k] += c;
                    }
                }
                poly = next;
            }
            assert_eq!(histogram, poly, "n={}", n);
        }
    }

    #[test]
    fn grassmannian_permutation_examples() {
        let l1 = Partition::new([1]).unwrap();
        assert_eq!(
            grassmannian_permutation(&l1, 2, 4).unwrap(),
            perm(&[1, 3, 2, 4])
        );
        let l11 = Partition::new([1, 1]).unwrap();
        assert_eq!(
            grassmannian_permutation(&l11, 2, 4).unwrap(),
            perm(&[2, 3, 1, 4])
        );
        assert_eq!(
            grassmannian_permutation(&Partition::empty(), 2, 4).unwrap(),
            perm(&[1, 2, 3, 4])
        );
        // out of the k x (n-k) box
        let l3 = Partition::new([3]).unwrap();
        assert!(grassmannian_permutation(&l3, 2, 4).is_err());
    }

    #[test]
    fn grassmannian_permutation_matches_descent_search() {
        // brute force: the unique permutation with descents inside {k} and the
        // right length whose code restricted to 1..k is the reversed partition
        for (parts, k, n) in [(vec![1], 2usize, 4usize), (vec![1, 1], 2, 4), (vec![2, 1], 2, 5)] {
            let lambda = Partition::new(parts).unwrap();
            let target = grassmannian_permutation(&lambda, k, n).unwrap();
            let p = ParabolicSet::new(n, []).unwrap();
            let matches: Vec<Permutation> = coset_reps_naive(&p, None)
                .into_iter()
                .filter(|w| {
                    w.descents().iter().all(|&d| d == k)
                        && w.length() == lambda.size()
                        && partition_of_grassmannian(w, k).unwrap() == lambda
                })
                .collect();
            assert_eq!(matches, vec![target]);
        }
    }

    #[test]
    fn partition_round_trip() {
        let lambda = Partition::new([3, 1]).unwrap();
        let w = grassmannian_permutation(&lambda, 2, 6).unwrap();
        assert_eq!(partition_of_grassmannian(&w, 2).unwrap(), lambda);
    }

    #[test]
    fn conjugate_by_longest_is_involution() {
        for w in coset_reps_naive(&ParabolicSet::new(5, []).unwrap(), None) {
            let c = w.conjugate_by_longest();
            assert_eq!(c.length(), w.length());
            assert_eq!(c.conjugate_by_longest(), w);
        }
    }

    #[test]
    fn trim_and_embed() {
        let w = perm(&[2, 1, 3, 4]);
        assert_eq!(w.trimmed(), perm(&[2, 1]));
        assert_eq!(w.trimmed().embed(4).unwrap(), w);
        assert_eq!(Permutation::identity(4).trimmed(), perm(&[1]));
    }
}
