//! Write-once structure-constant tables and their on-disk cache.
//!
//! A table holds every product of degree-`d1` by degree-`d2` Schubert basis
//! classes of `H*(G/B)` for one `n`. Tables are published to a process-wide
//! registry (read-many after publication; a racing recomputation produces
//! the identical table, so the first insert wins) and serialise to a
//! line-oriented `u v w c` text format that is bit-reproducible across runs.

use super::{schubert_basis, structure_constants_direct, FlagSpace};
use crate::error::{Error, Result};
use crate::weyl::Permutation;
use num::BigInt;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock, RwLock};

/// Name of the environment variable pointing at the cache directory.
pub const CACHE_DIR_ENV: &str = "FLAGCALC_CACHE_DIR";

const FORMAT_HEADER: &str = "flagcalc-sc v1";

type Entry = Vec<(Permutation, BigInt)>;
type Entries = BTreeMap<(Permutation, Permutation), Entry>;
type Registry = RwLock<HashMap<(usize, usize, usize), Arc<ProductTable>>>;

/// All structure constants `c_{uv}^w` of `H*(G/B)` for `SL(n)` with
/// `l(u) = d1 <= d2 = l(v)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProductTable {
    n: usize,
    d1: usize,
    d2: usize,
    entries: Entries,
}

impl ProductTable {
    /// Computes the full table through the polynomial kernel. Pairs are
    /// independent, so the work is parallelised; the merge is deterministic.
    pub fn compute(n: usize, d1: usize, d2: usize) -> Result<ProductTable> {
        if d1 > d2 {
            return ProductTable::compute(n, d2, d1);
        }
        let space = FlagSpace::full_flag(n)?;
        let basis1 = schubert_basis(&space, d1)?;
        let basis2 = schubert_basis(&space, d2)?;
        let mut pairs = Vec::with_capacity(basis1.len() * basis2.len());
        for u in &basis1 {
            for v in &basis2 {
                pairs.push((u.clone(), v.clone()));
            }
        }
        let computed: Vec<((Permutation, Permutation), Entry)> = pairs
            .into_par_iter()
            .map(|(u, v)| {
                structure_constants_direct(n, &u, &v).map(|c| ((u, v), c))
            })
            .collect::<Result<_>>()?;
        Ok(ProductTable {
            n,
            d1,
            d2,
            entries: computed.into_iter().collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.d1, self.d2)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, u: &Permutation, v: &Permutation) -> Option<&[(Permutation, BigInt)]> {
        self.entries.get(&(u.clone(), v.clone())).map(|v| v.as_slice())
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(Permutation, Permutation)> {
        self.entries.keys()
    }

    /// Serialises to the versioned line format. An empty product is recorded
    /// with the sentinel line `u v - 0` so the pair stays distinguishable
    /// from an absent one.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(FORMAT_HEADER);
        out.push('\n');
        out.push_str(&format!("n {}\n", self.n));
        out.push_str("levi -\n");
        out.push_str(&format!("degrees {} {}\n", self.d1, self.d2));
        let count: usize = self
            .entries
            .values()
            .map(|ws| ws.len().max(1))
            .sum();
        out.push_str(&format!("count {}\n", count));
        for ((u, v), ws) in &self.entries {
            if ws.is_empty() {
                out.push_str(&format!("{} {} - 0\n", u, v));
            } else {
                for (w, c) in ws {
                    out.push_str(&format!("{} {} {} {}\n", u, v, w, c));
                }
            }
        }
        out
    }

    pub fn from_reader(reader: impl std::io::Read) -> Result<ProductTable> {
        let mut lines = BufReader::new(reader).lines();
        let mut next_line = || -> Result<String> {
            lines
                .next()
                .ok_or_else(|| Error::validation("truncated table file"))?
                .map_err(Error::from)
        };
        let header = next_line()?;
        if header.trim() != FORMAT_HEADER {
            return Err(Error::validation(format!(
                "unsupported table header '{}'",
                header.trim()
            )));
        }
        let n: usize = parse_field(&next_line()?, "n")?;
        let levi_line = next_line()?;
        if levi_line.trim() != "levi -" {
            return Err(Error::validation("only full-flag tables are cached"));
        }
        let deg_line = next_line()?;
        let deg_parts: Vec<&str> = deg_line.split_whitespace().collect();
        if deg_parts.len() != 3 || deg_parts[0] != "degrees" {
            return Err(Error::validation("bad degrees line"));
        }
        let d1: usize = deg_parts[1]
            .parse()
            .map_err(|_| Error::validation("bad d1"))?;
        let d2: usize = deg_parts[2]
            .parse()
            .map_err(|_| Error::validation("bad d2"))?;
        let count: usize = parse_field(&next_line()?, "count")?;
        let mut entries: Entries = BTreeMap::new();
        for _ in 0..count {
            let line = next_line()?;
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 {
                return Err(Error::validation(format!("bad table line '{}'", line)));
            }
            let u = Permutation::parse(parts[0])?;
            let v = Permutation::parse(parts[1])?;
            let entry = entries.entry((u, v)).or_default();
            if parts[2] != "-" {
                let w = Permutation::parse(parts[2])?;
                let c: BigInt = parts[3]
                    .parse()
                    .map_err(|_| Error::validation(format!("bad coefficient '{}'", parts[3])))?;
                entry.push((w, c));
            }
        }
        Ok(ProductTable { n, d1, d2, entries })
    }
}

fn parse_field(line: &str, key: &str) -> Result<usize> {
    let rest = line
        .trim()
        .strip_prefix(key)
        .ok_or_else(|| Error::validation(format!("expected '{} <value>'", key)))?;
    rest.trim()
        .parse()
        .map_err(|_| Error::validation(format!("bad value in '{}'", line)))
}

fn registry() -> &'static Registry {
    static REG: OnceLock<Registry> = OnceLock::new();
    REG.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Looks up a published table; no disk access.
pub fn product_table(n: usize, d1: usize, d2: usize) -> Option<Arc<ProductTable>> {
    registry().read().unwrap().get(&(n, d1, d2)).cloned()
}

/// Publishes a table; an already-published identical table wins.
pub fn install_table(t: ProductTable) -> Arc<ProductTable> {
    let key = (t.n, t.d1, t.d2);
    let arc = Arc::new(t);
    let mut guard = registry().write().unwrap();
    Arc::clone(guard.entry(key).or_insert(arc))
}

/// The cache directory: `$FLAGCALC_CACHE_DIR`, else `.flagcalc-cache`.
pub fn cache_dir() -> PathBuf {
    match std::env::var_os(CACHE_DIR_ENV) {
        Some(dir) => PathBuf::from(dir),
        None => PathBuf::from(".flagcalc-cache"),
    }
}

pub fn table_file_name(n: usize, d1: usize, d2: usize) -> String {
    format!("sc-n{}-d{}x{}.tbl", n, d1, d2)
}

/// Writes the table under `dir`, creating it if needed.
pub fn write_table_to_cache(t: &ProductTable, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(table_file_name(t.n, t.d1, t.d2));
    let mut f = std::fs::File::create(&path)?;
    f.write_all(t.to_text().as_bytes())?;
    Ok(path)
}

/// Loads every cached table for this `n` into the registry. A missing
/// directory is fine (nothing to load).
pub fn load_cached_tables(n: usize, dir: &Path) -> Result<usize> {
    if !dir.is_dir() {
        return Ok(0);
    }
    let prefix = format!("sc-n{}-", n);
    let mut loaded = 0;
    let mut names: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    names.sort();
    for path in names {
        let name = match path.file_name().and_then(|s| s.to_str()) {
            Some(s) => s,
            None => continue,
        };
        if !name.starts_with(&prefix) || !name.ends_with(".tbl") {
            continue;
        }
        let table = ProductTable::from_reader(std::fs::File::open(&path)?)?;
        if table.n == n {
            install_table(table);
            loaded += 1;
        }
    }
    Ok(loaded)
}

/// Re-derives a deterministic `percent`% sample of a table file through the
/// polynomial kernel and compares bit-exactly. Returns the number of pairs
/// checked; a mismatch names the offending key.
pub fn verify_table_file(path: &Path, percent: usize, seed: u64) -> Result<usize> {
    let table = ProductTable::from_reader(std::fs::File::open(path)?)?;
    let mut keys: Vec<(Permutation, Permutation)> = table.entries.keys().cloned().collect();
    let sample = (keys.len() * percent).div_ceil(100).max(1).min(keys.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    keys.shuffle(&mut rng);
    keys.truncate(sample);
    keys.sort();
    for (u, v) in &keys {
        let expected = structure_constants_direct(table.n, u, v)?;
        let stored = table.get(u, v).unwrap_or(&[]);
        if stored != expected.as_slice() {
            return Err(Error::internal(format!(
                "cache mismatch in {} at key {} {}",
                path.display(),
                u,
                v
            )));
        }
    }
    Ok(keys.len())
}

/// Removes all table files under `dir`; returns how many were deleted.
pub fn clear_cache(dir: &Path) -> Result<usize> {
    if !dir.is_dir() {
        return Ok(0);
    }
    let mut removed = 0;
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let name = match path.file_name().and_then(|s| s.to_str()) {
            Some(s) => s,
            None => continue,
        };
        if name.starts_with("sc-n") && name.ends_with(".tbl") {
            std::fs::remove_file(&path)?;
            removed += 1;
        }
    }
    Ok(removed)
}
