use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::{LinearProgram, Relation, Sense, SimplexResult, Status};
use crate::error::{Error, Result};
use crate::exact::Rational;

/// An original variable written as `offset + sum(+-column)`.
struct Substitution {
    offset: Rational,
    columns: Vec<(usize, bool)>,
}

struct StandardForm {
    subs: Vec<Substitution>,
    n_struct: usize,
    rows: Vec<Vec<(usize, Rational)>>,
    relations: Vec<Relation>,
    rhs: Vec<Rational>,
    negated: Vec<bool>,
    cost: Vec<Rational>,
    n_original_rows: usize,
}

fn sense_factor(sense: Sense) -> Rational {
    match sense {
        Sense::Minimize => Rational::from_integer(1.into()),
        Sense::Maximize => Rational::from_integer((-1).into()),
    }
}

impl StandardForm {
    fn new(lp: &LinearProgram) -> Self {
        let mut subs = Vec::with_capacity(lp.num_variables());
        let mut n_struct = 0;
        let mut bound_rows = Vec::new();
        for b in &lp.bounds {
            let sub = match (&b.lower, &b.upper) {
                (Some(l), upper) => {
                    if let Some(u) = upper {
                        bound_rows.push((n_struct, u - l));
                    }
                    n_struct += 1;
                    Substitution { offset: l.clone(), columns: vec![(n_struct - 1, false)] }
                }
                (None, Some(u)) => {
                    n_struct += 1;
                    Substitution { offset: u.clone(), columns: vec![(n_struct - 1, true)] }
                }
                (None, None) => {
                    n_struct += 2;
                    Substitution {
                        offset: Rational::zero(),
                        columns: vec![(n_struct - 2, false), (n_struct - 1, true)],
                    }
                }
            };
            subs.push(sub);
        }

        let mut rows = Vec::new();
        let mut relations = Vec::new();
        let mut rhs = Vec::new();
        for c in &lp.constraints {
            let mut row = Vec::new();
            let mut b = c.rhs.clone();
            for (j, a) in &c.terms {
                let sub = &subs[*j];
                b -= a * &sub.offset;
                for (col, neg) in &sub.columns {
                    row.push((*col, if *neg { -a } else { a.clone() }));
                }
            }
            rows.push(row);
            relations.push(c.relation);
            rhs.push(b);
        }
        let n_original_rows = rows.len();
        for (col, u) in bound_rows {
            rows.push(vec![(col, Rational::from_integer(1.into()))]);
            relations.push(Relation::Le);
            rhs.push(u);
        }

        let mut negated = vec![false; rows.len()];
        for i in 0..rows.len() {
            // Zero right-hand sides are flipped to `<=` too so their slack can
            // start in the basis.
            if rhs[i].is_negative() || (rhs[i].is_zero() && relations[i] == Relation::Ge) {
                negated[i] = true;
                rhs[i] = -&rhs[i];
                for (_, a) in rows[i].iter_mut() {
                    *a = -&*a;
                }
                relations[i] = match relations[i] {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
        }

        let factor = sense_factor(lp.sense);
        let mut cost = vec![Rational::zero(); n_struct];
        for (c, sub) in lp.objective.iter().zip(&subs) {
            for (col, neg) in &sub.columns {
                let v = c * &factor;
                cost[*col] = if *neg { -v } else { v };
            }
        }
        StandardForm { subs, n_struct, rows, relations, rhs, negated, cost, n_original_rows }
    }

    fn to_original(&self, cols: &[Rational], with_offset: bool) -> Vec<Rational> {
        self.subs
            .iter()
            .map(|s| {
                let mut v = if with_offset { s.offset.clone() } else { Rational::zero() };
                for (col, neg) in &s.columns {
                    if *neg {
                        v -= &cols[*col];
                    } else {
                        v += &cols[*col];
                    }
                }
                v
            })
            .collect()
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    obj: Vec<Rational>,
    basis: Vec<usize>,
    rhs_col: usize,
    pivots: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        let row = &mut self.rows[r];
        let mut prow = Vec::new();
        for (j, v) in row.iter_mut().enumerate() {
            if !v.is_zero() {
                *v *= &inv;
                prow.push((j, v.clone()));
            }
        }
        let eliminate = |target: &mut Vec<Rational>| {
            let f = target[c].clone();
            if f.is_zero() {
                return;
            }
            for (j, v) in &prow {
                target[*j] -= &f * v;
            }
        };
        self.rows.par_iter_mut().enumerate().filter(|(i, _)| *i != r).for_each(|(_, t)| eliminate(t));
        eliminate(&mut self.obj);
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Bland's rule over columns `0..eligible`. Returns the entering column
    /// of an unbounded direction, or `None` at optimality.
    fn run(&mut self, eligible: usize) -> Option<usize> {
        loop {
            let enter = (0..eligible).find(|&j| self.obj[j].is_negative())?;
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = &row[self.rhs_col] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                None => return Some(enter),
                Some((r, _)) => self.pivot(r, enter),
            }
        }
    }

    fn set_objective(&mut self, cost: &[Rational]) {
        let mut obj = cost.to_vec();
        obj.resize(self.rhs_col + 1, Rational::zero());
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = cost.get(b).cloned().unwrap_or_else(Rational::zero);
            if cb.is_zero() {
                continue;
            }
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    obj[j] -= &cb * v;
                }
            }
        }
        self.obj = obj;
    }
}

/// Solves `lp` exactly. An optimal result has already passed [`certify`].
pub fn solve_simplex(lp: &LinearProgram) -> Result<SimplexResult> {
    lp.validate()?;
    let sf = StandardForm::new(lp);
    let m = sf.rows.len();
    let n = sf.n_struct;
    let n_slack = sf.relations.iter().filter(|r| **r != Relation::Eq).count();
    let n_art = sf.relations.iter().filter(|r| **r != Relation::Le).count();
    let art0 = n + n_slack;
    let rhs_col = art0 + n_art;

    // Every row owns a column that starts as +-e_i; its reduced cost yields
    // the row's multiplier.
    let mut unit: Vec<(usize, bool)> = Vec::with_capacity(m);
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut phase1_cost = vec![Rational::zero(); rhs_col];
    let (mut slack, mut art) = (n, art0);
    let one = || Rational::from_integer(1.into());
    for i in 0..m {
        let mut row = vec![Rational::zero(); rhs_col + 1];
        for (col, a) in &sf.rows[i] {
            row[*col] += a;
        }
        row[rhs_col] = sf.rhs[i].clone();
        match sf.relations[i] {
            Relation::Le => {
                row[slack] = one();
                basis.push(slack);
                unit.push((slack, false));
                slack += 1;
            }
            Relation::Ge => {
                row[slack] = -one();
                unit.push((slack, true));
                slack += 1;
            }
            Relation::Eq => unit.push((art, false)),
        }
        if sf.relations[i] != Relation::Le {
            row[art] = one();
            basis.push(art);
            phase1_cost[art] = one();
            art += 1;
        }
        rows.push(row);
    }

    let mut t = Tableau { rows, obj: vec![], basis, rhs_col, pivots: 0 };
    t.set_objective(&phase1_cost);
    let stuck = t.run(art0);
    debug_assert!(stuck.is_none(), "phase one is bounded below by zero");
    let residual = -&t.obj[rhs_col];
    if !residual.is_zero() {
        return Ok(SimplexResult {
            status: Status::Infeasible,
            optimum: None,
            primal_solution: vec![],
            dual_solution: vec![],
            pivot_count: t.pivots,
            ray: None,
            infeasibility: Some(residual),
        });
    }

    // Drive zero-level artificials out of the basis; rows where that is
    // impossible are redundant and keep their artificial at zero.
    for i in 0..m {
        if t.basis[i] >= art0 {
            if let Some(j) = (0..art0).find(|&j| !t.rows[i][j].is_zero()) {
                t.pivot(i, j);
            }
        }
    }

    t.set_objective(&sf.cost);
    let unbounded = t.run(art0);

    let mut cols = vec![Rational::zero(); art0];
    for (row, &b) in t.rows.iter().zip(&t.basis) {
        if b < art0 {
            cols[b] = row[rhs_col].clone();
        }
    }
    let x = sf.to_original(&cols[..n], true);

    if let Some(e) = unbounded {
        let mut dir = vec![Rational::zero(); art0];
        dir[e] = Rational::from_integer(1.into());
        for (row, &b) in t.rows.iter().zip(&t.basis) {
            if b < art0 {
                dir[b] = -&row[e];
            }
        }
        let ray = sf.to_original(&dir[..n], false);
        check_ray(lp, &ray)?;
        return Ok(SimplexResult {
            status: Status::Unbounded,
            optimum: None,
            primal_solution: x,
            dual_solution: vec![],
            pivot_count: t.pivots,
            ray: Some(ray),
            infeasibility: None,
        });
    }

    let factor = sense_factor(lp.sense);
    let y: Vec<Rational> = (0..sf.n_original_rows)
        .map(|i| {
            let (col, negative) = unit[i];
            let y_min = if negative { t.obj[col].clone() } else { -&t.obj[col] };
            let y_min = if sf.negated[i] { -y_min } else { y_min };
            y_min * &factor
        })
        .collect();
    certify(lp, &x, &y)?;
    Ok(SimplexResult {
        status: Status::Optimal,
        optimum: Some(lp.objective_value(&x)),
        primal_solution: x,
        dual_solution: y,
        pivot_count: t.pivots,
        ray: None,
        infeasibility: None,
    })
}

/// Checks that `x` is optimal for `lp` with constraint multipliers `y`
/// (sensitivity convention): `x` is feasible, `y` is dual feasible and the
/// two objectives agree.
pub fn certify(lp: &LinearProgram, x: &[Rational], y: &[Rational]) -> Result<()> {
    lp.validate()?;
    let fail = |msg: String| Err(Error::CertificateFailed(msg));
    if x.len() != lp.num_variables() || y.len() != lp.constraints.len() {
        return fail(format!("got {} values and {} multipliers", x.len(), y.len()));
    }
    for ((name, b), v) in lp.variable_names.iter().zip(&lp.bounds).zip(x) {
        if !b.contains(v) {
            return fail(format!("variable {name} = {v} is out of bounds"));
        }
    }
    for c in &lp.constraints {
        let lhs = c.lhs(x);
        if !c.relation.holds(&lhs, &c.rhs) {
            return fail(format!("constraint {}: {} {} {} fails", c.name, lhs, c.relation, c.rhs));
        }
    }

    let factor = sense_factor(lp.sense);
    let mut reduced: Vec<Rational> = lp.objective.iter().map(|c| c * &factor).collect();
    let mut dual_value = Rational::zero();
    for (c, yi) in lp.constraints.iter().zip(y) {
        let y_min = yi * &factor;
        let sign_ok = match c.relation {
            Relation::Ge => !y_min.is_negative(),
            Relation::Le => !y_min.is_positive(),
            Relation::Eq => true,
        };
        if !sign_ok {
            return fail(format!("multiplier of {} has the wrong sign: {yi}", c.name));
        }
        for (j, a) in &c.terms {
            reduced[*j] -= a * &y_min;
        }
        dual_value += &c.rhs * &y_min;
    }
    for ((name, b), r) in lp.variable_names.iter().zip(&lp.bounds).zip(&reduced) {
        let bound = if r.is_positive() {
            &b.lower
        } else if r.is_negative() {
            &b.upper
        } else {
            continue;
        };
        match bound {
            Some(v) => dual_value += r * v,
            None => return fail(format!("reduced cost {r} of {name} has no matching bound")),
        }
    }
    let primal_value = lp.objective_value(x) * &factor;
    if primal_value != dual_value {
        return fail(format!("duality gap: primal {primal_value}, dual {dual_value}"));
    }
    Ok(())
}

fn check_ray(lp: &LinearProgram, ray: &[Rational]) -> Result<()> {
    let fail = |msg: String| Err(Error::CertificateFailed(msg));
    for (b, r) in lp.bounds.iter().zip(ray) {
        if (b.lower.is_some() && r.is_negative()) || (b.upper.is_some() && r.is_positive()) {
            return fail("ray leaves a variable bound".into());
        }
    }
    for c in &lp.constraints {
        if !c.relation.holds(&c.lhs(ray), &Rational::zero()) {
            return fail(format!("ray leaves constraint {}", c.name));
        }
    }
    if !(lp.objective_value(ray) * sense_factor(lp.sense)).is_negative() {
        return fail("ray does not improve the objective".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::lp::Bounds;

    fn r(n: i64) -> Rational {
        rat(n, 1)
    }

    #[test]
    fn single_bound() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_variable("x", Bounds::free(), r(1));
        lp.add_constraint("cap", [(x, r(1))], Relation::Le, r(1));
        let s = solve_simplex(&lp).unwrap();
        assert_eq!(s.status, Status::Optimal);
        assert_eq!(s.optimum, Some(r(1)));
        assert_eq!(s.primal_solution, vec![r(1)]);
        assert_eq!(s.dual_solution, vec![r(1)]);
    }

    #[test]
    fn infeasible() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_variable("x", Bounds::nonnegative(), r(0));
        lp.add_constraint("neg", [(x, r(1))], Relation::Le, r(-1));
        let s = solve_simplex(&lp).unwrap();
        assert_eq!(s.status, Status::Infeasible);
        assert_eq!(s.infeasibility, Some(r(1)));
    }

    #[test]
    fn unbounded_with_ray() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_variable("x", Bounds::nonnegative(), r(1));
        let y = lp.add_variable("y", Bounds::nonnegative(), r(0));
        lp.add_constraint("c", [(x, r(1)), (y, r(-1))], Relation::Le, r(2));
        let s = solve_simplex(&lp).unwrap();
        assert_eq!(s.status, Status::Unbounded);
        let ray = s.ray.unwrap();
        assert!(ray[0].is_positive());
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_variable("x", Bounds::nonnegative(), r(3));
        let y = lp.add_variable("y", Bounds::nonnegative(), r(5));
        lp.add_constraint("p1", [(x, r(1))], Relation::Le, r(4));
        lp.add_constraint("p2", [(y, r(2))], Relation::Le, r(12));
        lp.add_constraint("p3", [(x, r(3)), (y, r(2))], Relation::Le, r(18));
        let s = solve_simplex(&lp).unwrap();
        assert_eq!(s.optimum, Some(r(36)));
        assert_eq!(s.primal_solution, vec![r(2), r(6)]);
        assert_eq!(s.dual_solution, vec![r(0), rat(3, 2), r(1)]);
    }

    #[test]
    fn equalities_bounds_and_free_variables() {
        // min x - y with x + y = 3, x in [1, 2], y free, y <= 5
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_variable("x", Bounds::between(r(1), r(2)), r(1));
        let y = lp.add_variable("y", Bounds::free(), r(-1));
        lp.add_constraint("sum", [(x, r(1)), (y, r(1))], Relation::Eq, r(3));
        lp.add_constraint("ycap", [(y, r(1))], Relation::Le, r(5));
        let s = solve_simplex(&lp).unwrap();
        assert_eq!(s.optimum, Some(r(-1)));
        assert_eq!(s.primal_solution, vec![r(1), r(2)]);
    }

    #[test]
    fn upper_only_and_ge_rows() {
        // max x + 2y with x <= 3 (no lower), y >= 0, x + y <= 4, x - y >= -10
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_variable("x", Bounds { lower: None, upper: Some(r(3)) }, r(1));
        let y = lp.add_variable("y", Bounds::nonnegative(), r(2));
        lp.add_constraint("s", [(x, r(1)), (y, r(1))], Relation::Le, r(4));
        lp.add_constraint("g", [(x, r(1)), (y, r(-1))], Relation::Ge, r(-10));
        let s = solve_simplex(&lp).unwrap();
        // y = x + 10 at most and x + y <= 4: x = -3, y = 7 gives 11
        assert_eq!(s.optimum, Some(r(11)));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_variable("x", Bounds::nonnegative(), r(1));
        let y = lp.add_variable("y", Bounds::nonnegative(), r(2));
        lp.add_constraint("e1", [(x, r(1)), (y, r(1))], Relation::Eq, r(2));
        lp.add_constraint("e2", [(x, r(2)), (y, r(2))], Relation::Eq, r(4));
        let s = solve_simplex(&lp).unwrap();
        assert_eq!(s.optimum, Some(r(2)));
    }

    #[test]
    fn malformed() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        lp.add_variable("x", Bounds::nonnegative(), r(1));
        lp.add_constraint("bad", [(3, r(1))], Relation::Le, r(1));
        assert!(matches!(solve_simplex(&lp), Err(Error::MalformedLp(_))));
        let mut lp = LinearProgram::new(Sense::Minimize);
        lp.add_variable("x", Bounds::nonnegative(), r(1));
        lp.add_variable("x", Bounds::nonnegative(), r(1));
        assert!(matches!(solve_simplex(&lp), Err(Error::MalformedLp(_))));
        let mut lp = LinearProgram::new(Sense::Minimize);
        lp.add_variable("x", Bounds::between(r(2), r(1)), r(1));
        assert!(matches!(solve_simplex(&lp), Err(Error::MalformedLp(_))));
    }

    #[test]
    fn certify_rejects_gap() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_variable("x", Bounds::nonnegative(), r(1));
        lp.add_constraint("cap", [(x, r(1))], Relation::Le, r(1));
        assert!(certify(&lp, &[r(1)], &[r(1)]).is_ok());
        assert!(certify(&lp, &[rat(1, 2)], &[r(1)]).is_err());
        assert!(certify(&lp, &[r(1)], &[r(2)]).is_err());
        assert!(certify(&lp, &[r(1)], &[r(-1)]).is_err());
        assert!(certify(&lp, &[r(2)], &[r(1)]).is_err());
    }
}
