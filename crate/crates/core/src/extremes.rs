//! Closed-form extreme volumes.
//!
//! For `2 <= k <= d` each position `i` in `k..=d` contributes a candidate
//! `(-1)^(d-i) C(d-k, i-k) / gamma(k, i)`. The maximal negative volume is the
//! smallest candidate clipped at zero, the maximal positive volume is the
//! largest candidate.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{binom, int, sign_pow, Rational};
use crate::recursions::{cached_tables, RecursionTables};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Minus => "minus",
            Sign::Plus => "plus",
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Sign {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "minus" => Ok(Sign::Minus),
            "plus" => Ok(Sign::Plus),
            other => Err(format!("unknown sign {other:?}, expected minus or plus")),
        }
    }
}

/// One solved extreme-volume query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremeVolume {
    pub sign: Sign,
    pub d: usize,
    pub k: usize,
    pub value: Rational,
    /// Smallest position attaining `value`; `None` only for a zero minus-volume.
    pub witness_index: Option<usize>,
    pub candidates: Vec<(usize, Rational)>,
}

impl ExtremeVolume {
    pub fn candidate(&self, i: usize) -> Option<&Rational> {
        self.candidates.iter().find(|(j, _)| *j == i).map(|(_, v)| v)
    }
}

pub(crate) fn check_dims(d: usize, k: usize) -> Result<()> {
    if k == 1 && d >= 2 {
        return Err(Error::UnsupportedK1);
    }
    if k < 2 || k > d {
        return Err(Error::InvalidDimensions { d, k });
    }
    Ok(())
}

/// `(-1)^(d-i) C(d-k, i-k) / gamma(k, i)`.
pub fn candidate_value(d: usize, k: usize, i: usize, tables: &RecursionTables) -> Result<Rational> {
    check_dims(d, k)?;
    if tables.d() != d || tables.k() != k {
        return Err(Error::InvalidDimensions { d: tables.d(), k: tables.k() });
    }
    if i < k || i > d {
        return Err(Error::IndexOutOfRange { i: i as i64, lo: k as i64, hi: d as i64 });
    }
    let c = binom((d - k) as u64, (i - k) as i64);
    Ok(sign_pow((d - i) as i64) * int(c) / int(tables.gamma(k, i)))
}

pub fn extreme_volume(d: usize, k: usize, sign: Sign) -> Result<ExtremeVolume> {
    check_dims(d, k)?;
    let tables = cached_tables(d, k)?;
    let candidates = (k..=d).map(|i| candidate_value(d, k, i, &tables).map(|v| (i, v))).collect::<Result<Vec<_>>>()?;

    // Strict comparison keeps the smallest achieving index.
    let mut best = &candidates[0];
    for c in &candidates[1..] {
        let better = match sign {
            Sign::Minus => c.1 < best.1,
            Sign::Plus => c.1 > best.1,
        };
        if better {
            best = c;
        }
    }
    let (value, witness_index) = match sign {
        Sign::Minus if !best.1.is_negative() => (Rational::zero(), None),
        _ => (best.1.clone(), Some(best.0)),
    };
    debug_assert!(sign == Sign::Minus || value >= Rational::one());
    Ok(ExtremeVolume { sign, d, k, value, witness_index, candidates })
}

/// Lower-triangular table of extreme values, rows `k`, columns `d`, both in
/// `2..=d_max`. Cells with `k > d` are empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremeTable {
    pub d_max: usize,
    pub sign: Sign,
    cells: Vec<Vec<Option<Rational>>>,
}

impl ExtremeTable {
    pub fn get(&self, k: usize, d: usize) -> Option<&Rational> {
        if !(2..=self.d_max).contains(&k) || !(2..=self.d_max).contains(&d) {
            return None;
        }
        self.cells[k - 2][d - 2].as_ref()
    }

    /// Rows in order `k = 2..=d_max`, each covering `d = 2..=d_max`.
    pub fn rows(&self) -> impl Iterator<Item = (usize, &[Option<Rational>])> {
        self.cells.iter().enumerate().map(|(r, row)| (r + 2, row.as_slice()))
    }
}

pub fn extreme_table(d_max: usize, sign: Sign) -> Result<ExtremeTable> {
    if d_max < 2 {
        return Err(Error::InvalidDimensions { d: d_max, k: 2 });
    }
    let cells = (2..=d_max)
        .into_par_iter()
        .map(|k| {
            (2..=d_max)
                .map(|d| if k > d { Ok(None) } else { extreme_volume(d, k, sign).map(|e| Some(e.value)) })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExtremeTable { d_max, sign, cells })
}
