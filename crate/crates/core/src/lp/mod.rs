//! Exact rational linear programming.
//!
//! [`solve_simplex`] is a dense two-phase tableau simplex with Bland's rule.
//! Every optimal answer carries primal values and constraint multipliers and
//! is re-checked against the original program before it is returned: primal
//! feasibility, dual feasibility and a zero duality gap, all in exact
//! arithmetic.
//!
//! [`programs`] builds the four program families whose optima are the extreme
//! volumes, and [`duality`] holds the strong-duality and
//! complementary-slackness checks between them.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exact::Rational;

pub mod duality;
pub mod programs;
mod simplex;

pub use duality::{
    check_complementary_slackness, check_strong_duality, reduced_primal_from_profile, tight_rows, DualSolution,
};
pub use programs::{
    build_dual_lp, build_dual_with_structure, build_full_lp, build_full_lp_capped, build_reduced_lp,
    build_symmetric_lp, oracle, LpVariant, FULL_LP_MAX_D,
};
pub use simplex::{certify, solve_simplex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        })
    }
}

impl Relation {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    /// Sparse coefficients `(variable, value)`; zero entries are dropped.
    pub terms: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn lhs(&self, x: &[Rational]) -> Rational {
        self.terms.iter().map(|(j, c)| c * &x[*j]).sum()
    }

    pub fn dense(&self, n: usize) -> Vec<Rational> {
        let mut row = vec![Rational::default(); n];
        for (j, c) in &self.terms {
            row[*j] += c;
        }
        row
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Bounds {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

impl Bounds {
    pub fn nonnegative() -> Self {
        Bounds { lower: Some(Rational::default()), upper: None }
    }

    pub fn between(lower: Rational, upper: Rational) -> Self {
        Bounds { lower: Some(lower), upper: Some(upper) }
    }

    pub fn free() -> Self {
        Bounds::default()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lower.as_ref().is_none_or(|l| x >= l) && self.upper.as_ref().is_none_or(|u| x <= u)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<Bounds>,
    pub variable_names: Vec<String>,
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        LinearProgram { sense, objective: vec![], constraints: vec![], bounds: vec![], variable_names: vec![] }
    }

    pub fn num_variables(&self) -> usize {
        self.objective.len()
    }

    pub fn add_variable(&mut self, name: impl Into<String>, bounds: Bounds, cost: Rational) -> usize {
        self.objective.push(cost);
        self.bounds.push(bounds);
        self.variable_names.push(name.into());
        self.objective.len() - 1
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: impl IntoIterator<Item = (usize, Rational)>,
        relation: Relation,
        rhs: Rational,
    ) {
        let mut merged: Vec<(usize, Rational)> = Vec::new();
        for (j, c) in terms {
            match merged.iter_mut().find(|(i, _)| *i == j) {
                Some((_, acc)) => *acc += c,
                None => merged.push((j, c)),
            }
        }
        merged.retain(|(_, c)| c != &Rational::default());
        merged.sort_by_key(|(j, _)| *j);
        self.constraints.push(Constraint { name: name.into(), terms: merged, relation, rhs });
    }

    pub fn variable(&self, name: &str) -> Option<usize> {
        self.variable_names.iter().position(|n| n == name)
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        if self.bounds.len() != n || self.variable_names.len() != n {
            return Err(Error::MalformedLp(format!(
                "{} objective entries, {} bounds, {} names",
                n,
                self.bounds.len(),
                self.variable_names.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &self.variable_names {
            if !seen.insert(name) {
                return Err(Error::MalformedLp(format!("duplicate variable name {name:?}")));
            }
        }
        for (name, b) in self.variable_names.iter().zip(&self.bounds) {
            if let (Some(l), Some(u)) = (&b.lower, &b.upper) {
                if l > u {
                    return Err(Error::MalformedLp(format!("variable {name} has empty bounds [{l}, {u}]")));
                }
            }
        }
        for c in &self.constraints {
            if let Some((j, _)) = c.terms.iter().find(|(j, _)| *j >= n) {
                return Err(Error::MalformedLp(format!("constraint {} references variable {j} of {n}", c.name)));
            }
        }
        Ok(())
    }

    /// Whether `x` satisfies every constraint and bound exactly.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_variables()
            && self.bounds.iter().zip(x).all(|(b, v)| b.contains(v))
            && self.constraints.iter().all(|c| c.relation.holds(&c.lhs(x), &c.rhs))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::Unbounded => "unbounded",
        }
    }
}

/// Outcome of a solve.
///
/// Constraint multipliers in `dual_solution` are sensitivities: the rate at
/// which the optimum moves when the constraint's right-hand side grows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexResult {
    pub status: Status,
    pub optimum: Option<Rational>,
    pub primal_solution: Vec<Rational>,
    pub dual_solution: Vec<Rational>,
    pub pivot_count: usize,
    /// Improving direction when unbounded.
    pub ray: Option<Vec<Rational>>,
    /// Phase-one optimum (total artificial infeasibility) when infeasible.
    pub infeasibility: Option<Rational>,
}

impl SimplexResult {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}

impl FromStr for Sense {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "min" | "minimize" => Ok(Sense::Minimize),
            "max" | "maximize" => Ok(Sense::Maximize),
            _ => Err(format!("unknown sense {s:?}")),
        }
    }
}
