//! Coefficient families `gamma`, `alpha` and `beta`.
//!
//! Each family is a triangular table indexed by a level `j` in `2..=k` and a
//! position `i` in `2..=d`. Level 2 is a closed-form base row; every later
//! level copies the entries below position `j - 1` and replaces the rest with
//! suffix sums of the previous level. `beta` stops one position short of `d`
//! and is extended by `beta(j, d) = 0`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecursionTables {
    d: usize,
    k: usize,
    // rows[j - 2][i - 2]
    gamma: Vec<Vec<u64>>,
    alpha: Vec<Vec<u64>>,
    beta: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Gamma,
    Alpha,
    Beta,
}

fn build_family(d: usize, k: usize, base: impl Fn(usize) -> u64, top: usize) -> Option<Vec<Vec<u64>>> {
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(k - 1);
    rows.push((2..=d).map(|i| if i <= top { base(i) } else { 0 }).collect());
    for j in 3..=k {
        let prev = &rows[j - 3];
        let mut row = prev.clone();
        // suffix sums over positions j-1..=top
        let mut acc: u64 = 0;
        for i in (j - 1..=top).rev() {
            acc = acc.checked_add(prev[i - 2])?;
            row[i - 2] = acc;
        }
        rows.push(row);
    }
    Some(rows)
}

/// Builds all three families for one `(d, k)`.
pub fn build_tables(d: usize, k: usize) -> Result<RecursionTables> {
    if k < 2 || k > d {
        return Err(Error::InvalidDimensions { d, k });
    }
    let overflow = || Error::CoefficientOverflow { d, k };
    let gamma = build_family(d, k, |i| (d + 1 - i) as u64, d).ok_or_else(overflow)?;
    let alpha = build_family(d, k, |_| 1, d).ok_or_else(overflow)?;
    let beta = build_family(d, k, |i| (d - i) as u64, d - 1).ok_or_else(overflow)?;
    Ok(RecursionTables { d, k, gamma, alpha, beta })
}

/// Memoized [`build_tables`]; repeated queries for one `(d, k)` share a table.
pub fn cached_tables(d: usize, k: usize) -> Result<Arc<RecursionTables>> {
    type Cache = Mutex<HashMap<(usize, usize), Arc<RecursionTables>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().unwrap().get(&(d, k)) {
        return Ok(Arc::clone(t));
    }
    let built = Arc::new(build_tables(d, k)?);
    cache.lock().unwrap().insert((d, k), Arc::clone(&built));
    Ok(built)
}

impl RecursionTables {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn family(&self, f: Family) -> &[Vec<u64>] {
        match f {
            Family::Gamma => &self.gamma,
            Family::Alpha => &self.alpha,
            Family::Beta => &self.beta,
        }
    }

    /// Entry `(j, i)` of a family. Panics outside `2 <= j <= k`, `2 <= i <= d`.
    pub fn get(&self, f: Family, j: usize, i: usize) -> u64 {
        assert!((2..=self.k).contains(&j) && (2..=self.d).contains(&i), "({j}, {i}) out of range");
        self.family(f)[j - 2][i - 2]
    }

    pub fn gamma(&self, j: usize, i: usize) -> u64 {
        self.get(Family::Gamma, j, i)
    }

    pub fn alpha(&self, j: usize, i: usize) -> u64 {
        self.get(Family::Alpha, j, i)
    }

    pub fn beta(&self, j: usize, i: usize) -> u64 {
        self.get(Family::Beta, j, i)
    }

    /// Row `j` of a family, positions `2..=d`.
    pub fn row(&self, f: Family, j: usize) -> &[u64] {
        assert!((2..=self.k).contains(&j), "level {j} out of range");
        &self.family(f)[j - 2]
    }
}

/// `alpha(j, i) + beta(j, i) == gamma(j, i)` over the whole table.
pub fn verify_alpha_beta_gamma(tables: &RecursionTables) -> bool {
    (2..=tables.k).all(|j| {
        (2..=tables.d).all(|i| tables.alpha(j, i) as u128 + tables.beta(j, i) as u128 == tables.gamma(j, i) as u128)
    })
}
