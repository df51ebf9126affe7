//! The extremal realization: box `[a, 1]^d`, a permutation-symmetric vertex
//! profile on it, and the extension of that profile to the whole unit cube.
//!
//! The extension lives on the grid `{0, a, 1}^d`. Grid values are zero on
//! every face through the origin and equal the profile on `{a, 1}^d`. Each of
//! the `2^d` subboxes cut out by the grid carries a constant density whose
//! integral reproduces its grid volume, and the quasi-copula is the integral
//! of that density over the lower orthant `[0, x]`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{binom, in_unit_interval, int, sign_pow, Rational};
use crate::extremes::{check_dims, extreme_volume, Sign};
use crate::recursions::cached_tables;

/// Values of a symmetric quasi-copula at the vertices of `[a, 1]^d`.
///
/// `q[i]` is the value at every vertex with exactly `i` coordinates equal to 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricVertexProfile {
    pub d: usize,
    pub k: usize,
    pub sign: Sign,
    pub a: Rational,
    pub q: Vec<Rational>,
    pub i0: usize,
    pub candidates: Vec<(usize, Rational)>,
}

/// Builds the extremal profile for `(d, k, sign)`.
///
/// The witness `i0` is the smallest position attaining the extreme value. The
/// profile vanishes below `i0`, jumps to `1 / gamma(k, i0)` at `i0`, and above
/// it has vanishing `k`-th differences. The box corner is
/// `a = beta(k, i0) / gamma(k, i0)`.
pub fn build_profile(d: usize, k: usize, sign: Sign) -> Result<SymmetricVertexProfile> {
    check_dims(d, k)?;
    let extreme = extreme_volume(d, k, sign)?;
    let i0 = extreme.witness_index.ok_or(Error::NoNegativeMass { d, k })?;
    let tables = cached_tables(d, k)?;
    let gamma = int(tables.gamma(k, i0));
    let a = int(tables.beta(k, i0)) / &gamma;

    let mut q = vec![Rational::zero(); d + 1];
    q[i0] = Rational::one() / gamma;
    for i in i0 + 1..=d {
        let mut acc = Rational::zero();
        for j in 1..=k {
            acc += sign_pow(j as i64 + 1) * int(binom(k as u64, j as i64)) * &q[i - j];
        }
        q[i] = acc;
    }

    Ok(SymmetricVertexProfile { d, k, sign, a, q, i0, candidates: extreme.candidates })
}

/// Alternating vertex sum `sum_i (-1)^(d-i) C(d, i) q_i`, the volume of
/// `[a, 1]^d`.
pub fn profile_volume(p: &SymmetricVertexProfile) -> Rational {
    p.q.iter().enumerate().map(|(i, qi)| sign_pow((p.d - i) as i64) * int(binom(p.d as u64, i as i64)) * qi).sum()
}

/// Grid levels: 0 is the coordinate 0, 1 is `a`, 2 is 1.
pub type Level = u8;

fn pow3(d: usize) -> usize {
    3usize.pow(d as u32)
}

pub(crate) fn grid_index(levels: &[Level]) -> usize {
    levels.iter().rev().fold(0, |acc, &l| acc * 3 + l as usize)
}

pub(crate) fn grid_levels(mut idx: usize, d: usize) -> Vec<Level> {
    let mut out = Vec::with_capacity(d);
    for _ in 0..d {
        out.push((idx % 3) as Level);
        idx /= 3;
    }
    out
}

pub(crate) fn level_value(level: Level, a: &Rational) -> Rational {
    match level {
        0 => Rational::zero(),
        1 => a.clone(),
        _ => Rational::one(),
    }
}

/// A function on the grid `{0, a, 1}^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridFunction {
    pub d: usize,
    pub a: Rational,
    values: Vec<Rational>,
}

impl GridFunction {
    pub fn from_fn(d: usize, a: Rational, mut f: impl FnMut(&[Level]) -> Rational) -> Self {
        let values = (0..pow3(d)).map(|idx| f(&grid_levels(idx, d))).collect();
        GridFunction { d, a, values }
    }

    pub fn value(&self, levels: &[Level]) -> &Rational {
        assert_eq!(levels.len(), self.d);
        &self.values[grid_index(levels)]
    }

    pub(crate) fn value_at_index(&self, idx: usize) -> &Rational {
        &self.values[idx]
    }

    pub fn point(&self, levels: &[Level]) -> Vec<Rational> {
        levels.iter().map(|&l| level_value(l, &self.a)).collect()
    }

    /// All grid points as `(levels, value)` in index order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<Level>, &Rational)> {
        self.values.iter().enumerate().map(move |(idx, v)| (grid_levels(idx, self.d), v))
    }
}

/// Zero on the faces through the origin, `q[#ones]` on `{a, 1}^d`.
pub fn grid_vertex_values(p: &SymmetricVertexProfile) -> GridFunction {
    GridFunction::from_fn(p.d, p.a.clone(), |levels| {
        if levels.contains(&0) {
            Rational::zero()
        } else {
            p.q[levels.iter().filter(|&&l| l == 2).count()].clone()
        }
    })
}

/// Piecewise-constant density on the `2^d` subboxes of the grid.
///
/// Subbox `I` (a bitmask, bit `j` set meaning the upper slab `[a, 1]` on axis
/// `j`) carries density `rho[I]` and mass `subbox_volume[I]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityField {
    pub d: usize,
    pub a: Rational,
    pub rho: Vec<Rational>,
    pub subbox_volume: Vec<Rational>,
}

impl DensityField {
    fn slab(&self, upper: bool) -> (Rational, Rational) {
        if upper {
            (self.a.clone(), Rational::one())
        } else {
            (Rational::zero(), self.a.clone())
        }
    }

    /// Lebesgue volume of subbox `I`.
    pub fn lebesgue_volume(&self, subbox: usize) -> Rational {
        (0..self.d)
            .map(|j| {
                let (lo, hi) = self.slab(subbox >> j & 1 == 1);
                hi - lo
            })
            .product()
    }

    pub fn is_degenerate(&self, subbox: usize) -> bool {
        self.lebesgue_volume(subbox).is_zero()
    }

    /// `Q(x) = sum_I rho_I * vol(B_I ∩ [0, x])`.
    pub fn evaluate_q(&self, x: &[Rational]) -> Result<Rational> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: x.len() });
        }
        if let Some((index, v)) = x.iter().enumerate().find(|(_, v)| !in_unit_interval(v)) {
            return Err(Error::CoordinateOutOfRange { index, value: v.to_string() });
        }
        let mut total = Rational::zero();
        'subbox: for (subbox, rho) in self.rho.iter().enumerate() {
            if rho.is_zero() {
                continue;
            }
            let mut overlap = Rational::one();
            for (j, xj) in x.iter().enumerate() {
                let (lo, hi) = self.slab(subbox >> j & 1 == 1);
                let len = if xj <= &lo {
                    continue 'subbox;
                } else if xj >= &hi {
                    hi - lo
                } else {
                    xj - lo
                };
                overlap *= len;
            }
            total += rho * overlap;
        }
        Ok(total)
    }

    /// Values of the extension on every grid point, computed through the
    /// integral.
    pub fn grid_values(&self) -> GridFunction {
        let a = self.a.clone();
        GridFunction::from_fn(self.d, self.a.clone(), |levels| {
            let x: Vec<Rational> = levels.iter().map(|&l| level_value(l, &a)).collect();
            self.evaluate_q(&x).expect("grid points lie in the unit cube")
        })
    }
}

/// Masses of the `2^d` subboxes from grid values, and the matching densities.
///
/// Subboxes of zero width (only possible when `a` is 0 or 1) get mass and
/// density 0.
pub fn subbox_volumes(g: &GridFunction) -> DensityField {
    let d = g.d;
    let mut field =
        DensityField { d, a: g.a.clone(), rho: Vec::with_capacity(1 << d), subbox_volume: Vec::with_capacity(1 << d) };
    let mut levels = vec![0 as Level; d];
    for subbox in 0..1usize << d {
        let width = field.lebesgue_volume(subbox);
        if width.is_zero() {
            field.rho.push(Rational::zero());
            field.subbox_volume.push(Rational::zero());
            continue;
        }
        let mut mass = Rational::zero();
        for corner in 0..1usize << d {
            let mut lower = 0;
            for (j, l) in levels.iter_mut().enumerate() {
                let base = (subbox >> j & 1) as Level;
                let up = (corner >> j & 1) as Level;
                *l = base + up;
                lower += 1 - up as usize;
            }
            let v = g.value(&levels);
            if lower % 2 == 0 {
                mass += v;
            } else {
                mass -= v;
            }
        }
        field.rho.push(&mass / &width);
        field.subbox_volume.push(mass);
    }
    field
}

impl SymmetricVertexProfile {
    pub fn volume(&self) -> Rational {
        profile_volume(self)
    }

    pub fn density_field(&self) -> DensityField {
        subbox_volumes(&grid_vertex_values(self))
    }

    /// Evaluates the extension at `x`.
    pub fn evaluate(&self, x: &[Rational]) -> Result<Rational> {
        self.density_field().evaluate_q(x)
    }

    /// `q` is nondecreasing, ends at 1, stays in `[0, a]` below the top and
    /// never rises faster than `1 - a`.
    pub fn is_well_shaped(&self) -> bool {
        let one = Rational::one();
        let step = &one - &self.a;
        self.q.len() == self.d + 1
            && self.q[self.d] == one
            && self.q[..self.d].iter().all(|qi| !qi.is_negative() && qi <= &self.a)
            && self.q.windows(2).all(|w| w[0] <= w[1] && &w[1] - &w[0] <= step)
    }
}
