//! Duality between the reduced program and its four-variable dual.

use num_traits::{Signed, Zero};

use super::{Bounds, LinearProgram, Relation, Sense, SimplexResult};
use crate::construction::SymmetricVertexProfile;
use crate::error::{Error, Result};
use crate::exact::{int, Rational};
use crate::extremes::{extreme_volume, Sign};
use crate::verify::{difference_triangle, FeasibilityReport};

impl LinearProgram {
    /// Textbook dual of a program whose rows are all `<=` and whose variables
    /// are all nonnegative and unbounded above.
    ///
    /// `min c.x, Ax <= b` becomes `max -b.y, A^T y >= -c`;
    /// `max c.x, Ax <= b` becomes `min b.y, A^T y >= c`. One dual row per
    /// primal variable, in primal order, named after it.
    pub fn canonical_dual(&self) -> Result<LinearProgram> {
        self.validate()?;
        let zero = Rational::zero();
        if let Some(c) = self.constraints.iter().find(|c| c.relation != Relation::Le) {
            return Err(Error::NotCanonical(format!("row {} is not <=", c.name)));
        }
        if let Some((name, _)) = self
            .variable_names
            .iter()
            .zip(&self.bounds)
            .find(|(_, b)| b.lower.as_ref() != Some(&zero) || b.upper.is_some())
        {
            return Err(Error::NotCanonical(format!("variable {name} is not plain nonnegative")));
        }
        let flip = self.sense == Sense::Minimize;
        let mut dual = LinearProgram::new(if flip { Sense::Maximize } else { Sense::Minimize });
        for (i, c) in self.constraints.iter().enumerate() {
            let cost = if flip { -&c.rhs } else { c.rhs.clone() };
            dual.add_variable(format!("y{}", i + 1), Bounds::nonnegative(), cost);
        }
        for (j, (name, cost)) in self.variable_names.iter().zip(&self.objective).enumerate() {
            let terms: Vec<(usize, Rational)> = self
                .constraints
                .iter()
                .enumerate()
                .flat_map(|(i, c)| c.terms.iter().filter(|(v, _)| *v == j).map(move |(_, a)| (i, a.clone())))
                .collect();
            let rhs = if flip { -cost } else { cost.clone() };
            dual.add_constraint(name.clone(), terms, Relation::Ge, rhs);
        }
        Ok(dual)
    }
}

/// Both solves are optimal with equal optimum.
pub fn check_strong_duality(primal: &SimplexResult, dual: &SimplexResult) -> bool {
    primal.is_optimal() && dual.is_optimal() && primal.optimum == dual.optimum
}

/// A point of the four-variable dual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualSolution {
    pub y1: Rational,
    pub y2: Rational,
    pub y3: Rational,
    pub y4: Rational,
}

impl DualSolution {
    pub fn from_values(y: &[Rational]) -> Result<Self> {
        match y {
            [y1, y2, y3, y4] => Ok(DualSolution { y1: y1.clone(), y2: y2.clone(), y3: y3.clone(), y4: y4.clone() }),
            _ => Err(Error::DimensionMismatch { expected: 4, got: y.len() }),
        }
    }

    pub fn values(&self) -> Vec<Rational> {
        vec![self.y1.clone(), self.y2.clone(), self.y3.clone(), self.y4.clone()]
    }

    /// Closed-form optimal dual point. Zero when the extreme volume is zero,
    /// otherwise strictly positive with `y1 = |w| / 2`,
    /// `y4 = |w| / (2 (d - 1))` and `y2 = y3 = y1 + d y4`.
    pub fn constructed(d: usize, k: usize, sign: Sign) -> Result<Self> {
        let w = extreme_volume(d, k, sign)?.value.abs();
        let y1 = &w / int(2);
        let y4 = &w / int(2 * (d as i64 - 1));
        let y2 = &y1 + int(d as i64) * &y4;
        Ok(DualSolution { y1, y3: y2.clone(), y2, y4 })
    }

    /// `y1 + (d - 1) y4`, the dual objective up to sign.
    pub fn affine_value(&self, d: usize) -> Rational {
        &self.y1 + int(d as i64 - 1) * &self.y4
    }

    /// `y2 = y3` and `y2 = y1 + d y4`.
    pub fn satisfies_structure(&self, d: usize) -> bool {
        self.y2 == self.y3 && self.y2 == &self.y1 + int(d as i64) * &self.y4
    }
}

/// Reduced-program coordinates of a symmetric profile, in the variable order
/// of the reduced program, with the upper box corner at 1.
pub fn reduced_primal_from_profile(p: &SymmetricVertexProfile) -> Result<Vec<Rational>> {
    let tri = difference_triangle(&p.q, p.k)?;
    let mut x = vec![p.a.clone(), int(1), p.q[0].clone(), tri.get(1, 1).clone()];
    x.extend((2..p.k).map(|i| tri.get(i, i).clone()));
    x.extend((p.k..=p.d).map(|i| tri.get(p.k, i).clone()));
    Ok(x)
}

/// Which rows hold with equality at `x`.
pub fn tight_rows(lp: &LinearProgram, x: &[Rational]) -> Vec<bool> {
    lp.constraints.iter().map(|c| c.lhs(x) == c.rhs).collect()
}

/// Checks that `x` and `dual` are a complementary pair for the reduced
/// program: `x` is primal feasible, `dual` is dual feasible, every row with
/// a positive multiplier is tight and every positive variable has zero
/// reduced cost.
pub fn check_complementary_slackness(
    reduced: &LinearProgram,
    x: &[Rational],
    dual: &DualSolution,
) -> Result<FeasibilityReport> {
    let dual_lp = reduced.canonical_dual()?;
    let y = dual.values();
    if reduced.constraints.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: reduced.constraints.len(), got: y.len() });
    }
    if x.len() != reduced.num_variables() {
        return Err(Error::DimensionMismatch { expected: reduced.num_variables(), got: x.len() });
    }
    let zero = Rational::zero();
    let mut report = FeasibilityReport::default();
    for (j, v) in x.iter().enumerate() {
        report.require("primal_sign", vec![j], v.clone(), Relation::Ge, zero.clone());
    }
    for (i, c) in reduced.constraints.iter().enumerate() {
        let slack = &c.rhs - c.lhs(x);
        report.require("primal_row", vec![i], slack.clone(), Relation::Ge, zero.clone());
        report.require("dual_sign", vec![i], y[i].clone(), Relation::Ge, zero.clone());
        report.require("row_slackness", vec![i], &y[i] * slack, Relation::Eq, zero.clone());
    }
    for (j, row) in dual_lp.constraints.iter().enumerate() {
        let surplus = row.lhs(&y) - &row.rhs;
        report.require("dual_row", vec![j], surplus.clone(), Relation::Ge, zero.clone());
        report.require("variable_slackness", vec![j], &x[j] * surplus, Relation::Eq, zero.clone());
    }
    Ok(report.finish())
}
