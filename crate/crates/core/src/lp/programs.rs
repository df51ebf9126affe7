//! The program families whose optima are the extreme volumes.
//!
//! * full: every vertex value of `[a, 1]^d` is a variable, together with the
//!   lower corner `a` (upper corner fixed at 1). Exponential in `d`.
//! * symmetric: the same program restricted to permutation-symmetric
//!   vertex values, one per number of coordinates at 1.
//! * reduced: the symmetric program rewritten in iterated differences.
//! * dual: the dual of the reduced program, in four variables.
//!
//! Negative volume is a minimisation and positive volume a maximisation in
//! the first three; the dual flips the sense and reports the same value.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use super::{solve_simplex, Bounds, LinearProgram, Relation, Sense, SimplexResult};
use crate::error::{Error, Result};
use crate::exact::{binom, int, sign_pow, Rational};
use crate::extremes::{check_dims, Sign};
use crate::recursions::cached_tables;

pub const FULL_LP_MAX_D: usize = 5;

fn primal_sense(sign: Sign) -> Sense {
    match sign {
        Sign::Minus => Sense::Minimize,
        Sign::Plus => Sense::Maximize,
    }
}

fn coeff(c: i64) -> Rational {
    int(c)
}

fn alt_binom(e: usize, n: usize, k: usize) -> Rational {
    sign_pow(e as i64) * int(binom(n as u64, k as i64))
}

pub fn build_full_lp(d: usize, k: usize, sign: Sign) -> Result<LinearProgram> {
    build_full_lp_capped(d, k, sign, FULL_LP_MAX_D)
}

/// Full vertex program with an explicit dimension cap.
pub fn build_full_lp_capped(d: usize, k: usize, sign: Sign, cap: usize) -> Result<LinearProgram> {
    check_dims(d, k)?;
    if d > cap {
        return Err(Error::LpTooLarge { d, cap });
    }
    let mut lp = LinearProgram::new(primal_sense(sign));
    let corners: Vec<usize> = (0..d)
        .map(|l| {
            lp.add_variable(format!("a{}", l + 1), Bounds::between(Rational::zero(), Rational::one()), Rational::zero())
        })
        .collect();
    let n_vertices = 1usize << d;
    let full = n_vertices - 1;
    let label = |v: usize| (0..d).map(|l| if v >> l & 1 == 1 { '1' } else { '0' }).collect::<String>();
    let vertex: Vec<usize> = (0..n_vertices)
        .map(|v| {
            let ones = v.count_ones() as usize;
            lp.add_variable(format!("q{}", label(v)), Bounds::nonnegative(), sign_pow((d - ones) as i64))
        })
        .collect();

    for (l, &corner) in corners.iter().enumerate() {
        for v in (0..n_vertices).filter(|v| v >> l & 1 == 0) {
            let w = v | 1 << l;
            lp.add_constraint(
                format!("lipschitz_{}_{}", label(v), l + 1),
                [(vertex[w], coeff(1)), (vertex[v], coeff(-1)), (corner, coeff(1))],
                Relation::Le,
                coeff(1),
            );
        }
    }

    for j in 1..=k {
        for free in (0..n_vertices).filter(|m| m.count_ones() as usize == j) {
            let fixed = full & !free;
            for base in (0..n_vertices).filter(|b| b & !fixed == 0) {
                let top = base | free;
                let terms: Vec<(usize, Rational)> = (0..n_vertices)
                    .filter(|s| s & !free == 0)
                    .map(|s| (vertex[base | s], sign_pow((top.count_ones() - (base | s).count_ones()) as i64)))
                    .collect();
                lp.add_constraint(
                    format!("face_{}_{}", label(free), label(base)),
                    terms,
                    Relation::Ge,
                    Rational::zero(),
                );
            }
        }
    }

    for (v, &qv) in vertex.iter().enumerate() {
        let ones = v.count_ones() as i64;
        let mut terms = vec![(qv, coeff(1))];
        terms.extend((0..d).filter(|l| v >> l & 1 == 0).map(|l| (corners[l], coeff(-1))));
        lp.add_constraint(format!("lower_{}", label(v)), terms, Relation::Ge, coeff(ones - d as i64 + 1));
        for l in (0..d).filter(|l| v >> l & 1 == 0) {
            lp.add_constraint(
                format!("upper_{}_{}", label(v), l + 1),
                [(qv, coeff(1)), (corners[l], coeff(-1))],
                Relation::Le,
                Rational::zero(),
            );
        }
        if ones > 0 {
            lp.add_constraint(format!("upper_{}", label(v)), [(qv, coeff(1))], Relation::Le, coeff(1));
        }
    }
    Ok(lp)
}

/// The symmetric program: variables `a, q0..qd`.
pub fn build_symmetric_lp(d: usize, k: usize, sign: Sign) -> Result<LinearProgram> {
    check_dims(d, k)?;
    let mut lp = LinearProgram::new(primal_sense(sign));
    let a = lp.add_variable("a", Bounds::between(Rational::zero(), Rational::one()), Rational::zero());
    let q: Vec<usize> =
        (0..=d).map(|i| lp.add_variable(format!("q{i}"), Bounds::nonnegative(), alt_binom(d - i, d, i))).collect();

    for i in 1..=d {
        lp.add_constraint(
            format!("lipschitz_{i}"),
            [(q[i], coeff(1)), (q[i - 1], coeff(-1)), (a, coeff(1))],
            Relation::Le,
            coeff(1),
        );
    }
    for j in 1..=k {
        for l in j..=d {
            let terms: Vec<(usize, Rational)> = (0..=j).map(|i| (q[l - i], alt_binom(i, j, i))).collect();
            lp.add_constraint(format!("difference_{j}_{l}"), terms, Relation::Ge, Rational::zero());
        }
    }
    for (i, &qi) in q.iter().enumerate() {
        lp.add_constraint(
            format!("lower_envelope_{i}"),
            [(qi, coeff(1)), (a, coeff(-((d - i) as i64)))],
            Relation::Ge,
            coeff(i as i64 - d as i64 + 1),
        );
        if i < d {
            lp.add_constraint(
                format!("upper_envelope_{i}"),
                [(qi, coeff(1)), (a, coeff(-1))],
                Relation::Le,
                Rational::zero(),
            );
        }
    }
    lp.add_constraint("top_vertex", [(q[d], coeff(1))], Relation::Eq, coeff(1));
    Ok(lp)
}

/// The reduced program. Variables, in order: `a`, `b`, `q0`, `delta1_1`,
/// `delta{i}_{i}` for `i` in `2..k`, then `delta{k}_{i}` for `i` in `k..=d`.
/// Rows: `b_cap`, `alpha`, `beta`, `gamma`.
pub fn build_reduced_lp(d: usize, k: usize, sign: Sign) -> Result<LinearProgram> {
    check_dims(d, k)?;
    let t = cached_tables(d, k)?;
    let mut lp = LinearProgram::new(primal_sense(sign));
    let nn = Bounds::nonnegative;
    let a = lp.add_variable("a", nn(), Rational::zero());
    let b = lp.add_variable("b", nn(), Rational::zero());
    let q0 = lp.add_variable("q0", nn(), Rational::zero());
    let first = lp.add_variable("delta1_1", nn(), Rational::zero());
    // (variable, alpha, beta, gamma)
    let mut deltas = Vec::new();
    for i in 2..k {
        let v = lp.add_variable(format!("delta{i}_{i}"), nn(), Rational::zero());
        deltas.push((v, t.alpha(k, i), t.beta(k, i), t.gamma(k, i)));
    }
    for i in k..=d {
        let v = lp.add_variable(format!("delta{k}_{i}"), nn(), alt_binom(d + i, d - k, i - k));
        deltas.push((v, t.alpha(k, i), t.beta(k, i), t.gamma(k, i)));
    }
    let dd = d as i64;

    lp.add_constraint("b_cap", [(b, coeff(1))], Relation::Le, coeff(1));
    let mut alpha = vec![(a, coeff(1)), (b, coeff(-1)), (first, coeff(1))];
    alpha.extend(deltas.iter().map(|&(v, al, _, _)| (v, int(al))));
    lp.add_constraint("alpha", alpha, Relation::Le, Rational::zero());
    let mut beta = vec![(a, coeff(-1)), (q0, coeff(1)), (first, coeff(dd - 1))];
    beta.extend(deltas.iter().map(|&(v, _, be, _)| (v, int(be))));
    lp.add_constraint("beta", beta, Relation::Le, Rational::zero());
    let mut gamma = vec![(b, coeff(dd)), (q0, coeff(-1)), (first, coeff(-dd))];
    gamma.extend(deltas.iter().map(|&(v, _, _, ga)| (v, -int(ga))));
    lp.add_constraint("gamma", gamma, Relation::Le, coeff(dd - 1));
    Ok(lp)
}

/// The four-variable dual, rows in the order: `b`, `a`, `q0`, `delta1_1`,
/// then one per remaining reduced variable.
pub fn build_dual_lp(d: usize, k: usize, sign: Sign) -> Result<LinearProgram> {
    check_dims(d, k)?;
    let t = cached_tables(d, k)?;
    let dd = d as i64;
    let (sense, cost1, cost4) = match sign {
        Sign::Minus => (Sense::Maximize, coeff(-1), coeff(1 - dd)),
        Sign::Plus => (Sense::Minimize, coeff(1), coeff(dd - 1)),
    };
    let mut lp = LinearProgram::new(sense);
    let y1 = lp.add_variable("y1", Bounds::nonnegative(), cost1);
    let y2 = lp.add_variable("y2", Bounds::nonnegative(), Rational::zero());
    let y3 = lp.add_variable("y3", Bounds::nonnegative(), Rational::zero());
    let y4 = lp.add_variable("y4", Bounds::nonnegative(), cost4);

    let zero = Rational::zero;
    lp.add_constraint("b", [(y1, coeff(1)), (y2, coeff(-1)), (y4, coeff(dd))], Relation::Ge, zero());
    lp.add_constraint("a", [(y2, coeff(1)), (y3, coeff(-1))], Relation::Ge, zero());
    lp.add_constraint("q0", [(y3, coeff(1)), (y4, coeff(-1))], Relation::Ge, zero());
    lp.add_constraint("delta1_1", [(y2, coeff(1)), (y3, coeff(dd - 1)), (y4, coeff(-dd))], Relation::Ge, zero());
    let row = |i: usize| [(y2, int(t.alpha(k, i))), (y3, int(t.beta(k, i))), (y4, -int(t.gamma(k, i)))];
    for i in 2..k {
        lp.add_constraint(format!("delta{i}_{i}"), row(i), Relation::Ge, zero());
    }
    for i in k..=d {
        let rhs = match sign {
            Sign::Minus => alt_binom(d + 1 + i, d - k, i - k),
            Sign::Plus => alt_binom(d + i, d - k, i - k),
        };
        lp.add_constraint(format!("delta{k}_{i}"), row(i), Relation::Ge, rhs);
    }
    Ok(lp)
}

/// The dual with the two structural identities `y2 = y3` and
/// `y2 = y1 + d y4` imposed as extra equality rows.
pub fn build_dual_with_structure(d: usize, k: usize, sign: Sign) -> Result<LinearProgram> {
    let mut lp = build_dual_lp(d, k, sign)?;
    lp.add_constraint("y2_equals_y3", [(1, coeff(1)), (2, coeff(-1))], Relation::Eq, Rational::zero());
    lp.add_constraint(
        "y2_equals_y1_plus_d_y4",
        [(1, coeff(1)), (0, coeff(-1)), (3, coeff(-(d as i64)))],
        Relation::Eq,
        Rational::zero(),
    );
    Ok(lp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LpVariant {
    Full,
    Symmetric,
    Reduced,
    Dual,
}

impl LpVariant {
    pub const ALL: [LpVariant; 4] = [LpVariant::Full, LpVariant::Symmetric, LpVariant::Reduced, LpVariant::Dual];

    pub fn as_str(self) -> &'static str {
        match self {
            LpVariant::Full => "full",
            LpVariant::Symmetric => "symmetric",
            LpVariant::Reduced => "reduced",
            LpVariant::Dual => "dual",
        }
    }

    pub fn build(self, d: usize, k: usize, sign: Sign) -> Result<LinearProgram> {
        match self {
            LpVariant::Full => build_full_lp(d, k, sign),
            LpVariant::Symmetric => build_symmetric_lp(d, k, sign),
            LpVariant::Reduced => build_reduced_lp(d, k, sign),
            LpVariant::Dual => build_dual_lp(d, k, sign),
        }
    }
}

impl fmt::Display for LpVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LpVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        LpVariant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| format!("unknown variant {s:?}, expected full, symmetric, reduced or dual"))
    }
}

/// Builds and solves one program.
pub fn oracle(variant: LpVariant, d: usize, k: usize, sign: Sign) -> Result<SimplexResult> {
    solve_simplex(&variant.build(d, k, sign)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::extremes::extreme_volume;
    use crate::lp::Status;

    #[test]
    fn example_optima() {
        for variant in [LpVariant::Symmetric, LpVariant::Reduced, LpVariant::Dual] {
            let s = oracle(variant, 4, 2, Sign::Minus).unwrap();
            assert_eq!(s.optimum, Some(rat(-1, 1)), "{variant}");
            let s = oracle(variant, 5, 3, Sign::Minus).unwrap();
            assert_eq!(s.optimum, Some(rat(-2, 3)), "{variant}");
            let s = oracle(variant, 6, 2, Sign::Plus).unwrap();
            assert_eq!(s.optimum, Some(rat(2, 1)), "{variant}");
        }
    }

    #[test]
    fn small_full_programs() {
        for d in 2..=4 {
            for k in 2..=d {
                for sign in [Sign::Minus, Sign::Plus] {
                    let s = oracle(LpVariant::Full, d, k, sign).unwrap();
                    assert_eq!(s.status, Status::Optimal);
                    assert_eq!(s.optimum.unwrap(), extreme_volume(d, k, sign).unwrap().value, "d={d} k={k} {sign}");
                }
            }
        }
    }

    #[test]
    fn full_program_cap() {
        assert_eq!(build_full_lp(6, 2, Sign::Minus), Err(Error::LpTooLarge { d: 6, cap: 5 }));
        assert!(build_full_lp_capped(6, 2, Sign::Minus, 6).is_ok());
        assert_eq!(build_full_lp(3, 1, Sign::Minus), Err(Error::UnsupportedK1));
    }

    #[test]
    fn shapes() {
        let lp = build_full_lp(3, 2, Sign::Minus).unwrap();
        assert_eq!(lp.num_variables(), 3 + 8);
        let lp = build_reduced_lp(6, 4, Sign::Plus).unwrap();
        let names: Vec<&str> = lp.variable_names.iter().map(String::as_str).collect();
        assert_eq!(names, ["a", "b", "q0", "delta1_1", "delta2_2", "delta3_3", "delta4_4", "delta4_5", "delta4_6"]);
        assert_eq!(lp.constraints.len(), 4);
        let lp = build_dual_lp(6, 4, Sign::Plus).unwrap();
        assert_eq!(lp.num_variables(), 4);
        assert_eq!(lp.constraints.len(), 9);
    }

    #[test]
    fn variant_names() {
        for v in LpVariant::ALL {
            assert_eq!(v.as_str().parse::<LpVariant>(), Ok(v));
        }
        assert!("simplex".parse::<LpVariant>().is_err());
    }
}
