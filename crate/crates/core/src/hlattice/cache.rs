use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use super::{enumerate_norm_coset, parse_vector, DiscriminantGroup, LatticeVector};
use crate::error::{Error, Result};
use crate::qfield::{parse_rat, Rat};

const HEADER: &str = "heegner-norm-cache v1";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CacheKey {
    pub lattice: String,
    pub gamma: usize,
    pub m: Rat,
}

impl CacheKey {
    fn file_name(&self) -> String {
        format!("{}_{}_{}_{}.txt", &self.lattice[..16], self.gamma, self.m.numer(), self.m.denom())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
}

/// Memoizes `enumerate_norm_coset` per (lattice, coset, norm), in memory and
/// optionally in a directory of text files.
#[derive(Debug, Default)]
pub struct NormCache {
    dir: Option<PathBuf>,
    mem: Mutex<HashMap<CacheKey, Arc<Vec<LatticeVector>>>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl NormCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn with_dir(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(NormCache {
            dir: Some(dir),
            ..Self::default()
        })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
        }
    }

    pub fn key(disc: &DiscriminantGroup, gamma: usize, m: &Rat) -> CacheKey {
        CacheKey {
            lattice: disc.lattice().hash_hex(),
            gamma,
            m: m.clone(),
        }
    }

    pub fn vectors(&self, disc: &DiscriminantGroup, gamma: usize, m: &Rat) -> Result<Arc<Vec<LatticeVector>>> {
        if !disc.contains_index(gamma) {
            return Err(Error::InvalidArgument(format!("coset index {gamma} out of range")));
        }
        let key = Self::key(disc, gamma, m);
        if let Some(v) = self.mem.lock().unwrap().get(&key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(v.clone());
        }
        if let Some(v) = self.read_file(disc, &key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            let v = Arc::new(v);
            self.mem.lock().unwrap().insert(key, v.clone());
            return Ok(v);
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let v = Arc::new(enumerate_norm_coset(disc.lattice(), disc.rep(gamma), m)?);
        self.write_file(&key, &v)?;
        self.mem.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }

    /// Number of vectors; served from the header of a cache file when present.
    pub fn count(&self, disc: &DiscriminantGroup, gamma: usize, m: &Rat) -> Result<usize> {
        let key = Self::key(disc, gamma, m);
        if let Some(v) = self.mem.lock().unwrap().get(&key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(v.len());
        }
        if let Some(n) = self.read_count(&key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(n);
        }
        Ok(self.vectors(disc, gamma, m)?.len())
    }

    fn path(&self, key: &CacheKey) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(key.file_name()))
    }

    fn read_header(lines: &mut impl Iterator<Item = std::io::Result<String>>, key: &CacheKey) -> Option<usize> {
        let mut next = || lines.next()?.ok();
        if next()? != HEADER {
            return None;
        }
        if next()? != format!("lattice {}", key.lattice) {
            return None;
        }
        if next()? != format!("gamma {}", key.gamma) {
            return None;
        }
        let m = next()?;
        if parse_rat(m.strip_prefix("m ")?)? != key.m {
            return None;
        }
        next()?.strip_prefix("count ")?.parse().ok()
    }

    fn read_count(&self, key: &CacheKey) -> Option<usize> {
        let file = fs::File::open(self.path(key)?).ok()?;
        let mut lines = BufReader::new(file).lines();
        Self::read_header(&mut lines, key)
    }

    fn read_file(&self, disc: &DiscriminantGroup, key: &CacheKey) -> Option<Vec<LatticeVector>> {
        let file = fs::File::open(self.path(key)?).ok()?;
        let mut lines = BufReader::new(file).lines();
        let count = Self::read_header(&mut lines, key)?;
        let field = disc.lattice().field();
        let mut out = Vec::with_capacity(count);
        for line in lines {
            let line = line.ok()?;
            if line.trim().is_empty() {
                continue;
            }
            out.push(parse_vector(field, &line)?);
        }
        (out.len() == count).then_some(out)
    }

    fn write_file(&self, key: &CacheKey, vectors: &[LatticeVector]) -> Result<()> {
        let (Some(dir), Some(path)) = (self.dir.as_ref(), self.path(key)) else {
            return Ok(());
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        writeln!(tmp, "{HEADER}")?;
        writeln!(tmp, "lattice {}", key.lattice)?;
        writeln!(tmp, "gamma {}", key.gamma)?;
        writeln!(tmp, "m {}", key.m)?;
        writeln!(tmp, "count {}", vectors.len())?;
        for v in vectors {
            writeln!(tmp, "{v}")?;
        }
        tmp.flush()?;
        tmp.persist(&path).map_err(|e| Error::Cache(e.to_string()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hlattice::diagonal_lattice;
    use crate::qfield::{int, FieldSpec};

    #[test]
    fn disk_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let lat = diagonal_lattice(FieldSpec::new(-3).unwrap(), &[-1, -1]).unwrap();
        let disc = lat.discriminant_group().unwrap();
        let first = NormCache::with_dir(dir.path()).unwrap();
        let v = first.vectors(&disc, 0, &int(-2)).unwrap();
        assert_eq!(first.stats(), CacheStats { hits: 0, misses: 1 });
        let again = first.vectors(&disc, 0, &int(-2)).unwrap();
        assert_eq!(v, again);
        assert_eq!(first.stats().hits, 1);

        let second = NormCache::with_dir(dir.path()).unwrap();
        assert_eq!(second.count(&disc, 0, &int(-2)).unwrap(), v.len());
        let from_disk = second.vectors(&disc, 0, &int(-2)).unwrap();
        assert_eq!(*from_disk, *v);
        assert_eq!(second.stats(), CacheStats { hits: 2, misses: 0 });
    }

    #[test]
    fn corrupt_file_is_recomputed() {
        let dir = tempfile::tempdir().unwrap();
        let lat = diagonal_lattice(FieldSpec::new(-4).unwrap(), &[-1]).unwrap();
        let disc = lat.discriminant_group().unwrap();
        let key = NormCache::key(&disc, 0, &int(-5));
        fs::write(dir.path().join(key.file_name()), "garbage").unwrap();
        let cache = NormCache::with_dir(dir.path()).unwrap();
        assert_eq!(cache.vectors(&disc, 0, &int(-5)).unwrap().len(), 8);
        assert_eq!(cache.stats().misses, 1);
    }
}
