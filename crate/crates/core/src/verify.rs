//! Independent checkers for a constructed quasi-copula.
//!
//! Three levels of evidence, from cheapest to most direct:
//!
//! * [`check_symmetric_feasibility`] checks the collapsed constraint set on the
//!   vertex profile alone.
//! * [`check_quasi_copula_axioms`] checks boundary conditions, monotonicity,
//!   the Lipschitz bound and the Fréchet envelope on the piecewise-multilinear
//!   extension. Within one subbox the extension is multilinear, so its partial
//!   slopes are extreme on subbox edges and edge checks are exhaustive.
//! * [`check_k_increasing_extension`] enumerates every `j`-face of every
//!   subbox for `j <= k` and requires a nonnegative volume on each. A
//!   multilinear function is `k`-increasing on a box once it is on all its
//!   `k`-faces, so this certifies the whole extension.

use std::fmt;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::construction::{grid_index, level_value, DensityField, GridFunction, Level, SymmetricVertexProfile};
use crate::error::{Error, Result};
use crate::exact::{binom, int, max_rat, sign_pow, Rational};
pub use crate::lp::Relation;

/// One failed constraint: `lhs relation rhs` does not hold.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub constraint: String,
    pub index: Vec<usize>,
    pub lhs: Rational,
    pub relation: Relation,
    pub rhs: Rational,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:?}: {} {} {} fails", self.constraint, self.index, self.lhs, self.relation, self.rhs)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn require(
        &mut self,
        constraint: &str,
        index: Vec<usize>,
        lhs: Rational,
        relation: Relation,
        rhs: Rational,
    ) {
        if !relation.holds(&lhs, &rhs) {
            self.violations.push(Violation { constraint: constraint.to_string(), index, lhs, relation, rhs });
        }
    }

    pub(crate) fn finish(mut self) -> Self {
        self.violations.sort();
        self
    }

    pub fn merge(mut self, other: FeasibilityReport) -> Self {
        self.violations.extend(other.violations);
        self.finish()
    }

    pub fn by_constraint<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Violation> + 'a {
        self.violations.iter().filter(move |v| v.constraint == name)
    }
}

/// Iterated differences of a profile: `delta(1, i) = q_i - q_{i-1}` and
/// `delta(j, i) = delta(j-1, i) - delta(j-1, i-1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceTriangle {
    k: usize,
    d: usize,
    // rows[j - 1][i - j]
    rows: Vec<Vec<Rational>>,
}

impl DifferenceTriangle {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, j: usize, i: usize) -> &Rational {
        assert!((1..=self.k).contains(&j) && (j..=self.d).contains(&i), "delta({j}, {i}) out of range");
        &self.rows[j - 1][i - j]
    }

    /// `delta(j, i)` for `i` in `j..=d`.
    pub fn row(&self, j: usize) -> &[Rational] {
        &self.rows[j - 1]
    }
}

pub fn difference_triangle(q: &[Rational], k: usize) -> Result<DifferenceTriangle> {
    let d = q.len().saturating_sub(1);
    if k < 1 || k > d {
        return Err(Error::IndexOutOfRange { i: k as i64, lo: 1, hi: d as i64 });
    }
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(k);
    rows.push(q.windows(2).map(|w| &w[1] - &w[0]).collect());
    for _ in 2..=k {
        let next = rows.last().unwrap().windows(2).map(|w| &w[1] - &w[0]).collect();
        rows.push(next);
    }
    Ok(DifferenceTriangle { k, d, rows })
}

/// `sum_{l=0}^{j} C(j, l) (-1)^l q_{i-l}`.
pub fn difference_closed_form(q: &[Rational], j: usize, i: usize) -> Rational {
    (0..=j).map(|l| sign_pow(l as i64) * int(binom(j as u64, l as i64)) * &q[i - l]).sum()
}

/// `(max(0, sum x_i - d + 1), min_i x_i)`.
pub fn frechet_bounds(x: &[Rational]) -> (Rational, Rational) {
    let d = x.len() as i64;
    let sum: Rational = x.iter().sum();
    let lower = max_rat(&Rational::zero(), &(sum - int(d - 1))).clone();
    let upper = x.iter().min().cloned().unwrap_or_else(Rational::one);
    (lower, upper)
}

/// The symmetric constraint set with the upper box corner fixed at 1.
pub fn check_symmetric_feasibility(p: &SymmetricVertexProfile) -> FeasibilityReport {
    let mut report = FeasibilityReport::default();
    let d = p.d;
    let (zero, one) = (Rational::zero(), Rational::one());
    report.require("profile_length", vec![], int(p.q.len() as i64), Relation::Eq, int(d as i64 + 1));
    if p.q.len() != d + 1 {
        return report.finish();
    }
    report.require("range_a", vec![0], p.a.clone(), Relation::Ge, zero.clone());
    report.require("range_a", vec![1], p.a.clone(), Relation::Le, one.clone());

    let step = &one - &p.a;
    for i in 1..=d {
        report.require("lipschitz", vec![i], &p.q[i] - &p.q[i - 1], Relation::Le, step.clone());
    }

    let k = p.k.clamp(1, d);
    let tri = difference_triangle(&p.q, k).expect("k clamped into range");
    for j in 1..=k {
        for (offset, delta) in tri.row(j).iter().enumerate() {
            report.require("difference", vec![j, j + offset], delta.clone(), Relation::Ge, zero.clone());
        }
    }

    for i in 0..d {
        let g = int((d - i) as i64) * &p.a + int(i as i64 - d as i64 + 1);
        let lower = max_rat(&zero, &g).clone();
        report.require("lower_envelope", vec![i], p.q[i].clone(), Relation::Ge, lower);
        report.require("upper_envelope", vec![i], p.q[i].clone(), Relation::Le, p.a.clone());
    }
    report.require("top_vertex", vec![d], p.q[d].clone(), Relation::Eq, one);
    report.finish()
}

/// A `j`-face of one subbox of the `{0, a, 1}^d` grid.
///
/// Axes in `free_axes` span the subbox slab; every other axis sits at the
/// slab's lower end (bit clear in `base_vertex`) or upper end (bit set).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceDescriptor {
    pub d: usize,
    pub free_axes: usize,
    pub base_vertex: usize,
    pub parent_subbox: usize,
}

impl FaceDescriptor {
    pub fn dimension(&self) -> usize {
        self.free_axes.count_ones() as usize
    }

    /// Grid levels and sign of every vertex. The sign is `(-1)^m` with `m` the
    /// number of free axes at their lower end.
    pub fn vertices(&self) -> impl Iterator<Item = (Vec<Level>, bool)> + '_ {
        let free: Vec<usize> = (0..self.d).filter(|m| self.free_axes >> m & 1 == 1).collect();
        (0..1usize << free.len()).map(move |corner| {
            let mut levels: Vec<Level> =
                (0..self.d).map(|m| ((self.parent_subbox >> m & 1) + (self.base_vertex >> m & 1)) as Level).collect();
            let mut lower = 0;
            for (bit, &m) in free.iter().enumerate() {
                let up = corner >> bit & 1;
                levels[m] = ((self.parent_subbox >> m & 1) + up) as Level;
                lower += 1 - up;
            }
            (levels, lower % 2 == 0)
        })
    }

    pub fn index_key(&self) -> Vec<usize> {
        vec![self.dimension(), self.parent_subbox, self.free_axes, self.base_vertex]
    }
}

fn subbox_is_degenerate(d: usize, a: &Rational, subbox: usize) -> bool {
    let full = (1usize << d) - 1;
    (a.is_zero() && subbox != full) || (a == &Rational::one() && subbox != 0)
}

/// Every `j`-face of every non-degenerate subbox, `C(d, j) 2^(d-j)` per subbox.
pub fn enumerate_k_faces(d: usize, a: &Rational, j: usize) -> impl Iterator<Item = FaceDescriptor> {
    let a = a.clone();
    let full = (1usize << d) - 1;
    (0..1usize << d).filter(move |&s| !subbox_is_degenerate(d, &a, s)).flat_map(move |parent_subbox| {
        (0..1usize << d).filter(move |axes| axes.count_ones() as usize == j).flat_map(move |free_axes| {
            let fixed = full & !free_axes;
            // all submasks of `fixed`
            let mut subs = Vec::with_capacity(1 << (d - j));
            let mut s = fixed;
            loop {
                subs.push(s);
                if s == 0 {
                    break;
                }
                s = (s - 1) & fixed;
            }
            subs.into_iter().rev().map(move |base_vertex| FaceDescriptor { d, free_axes, base_vertex, parent_subbox })
        })
    })
}

fn signed_sum<'a>(terms: impl Iterator<Item = (&'a Rational, bool)>) -> Rational {
    let mut acc = Rational::zero();
    for (v, positive) in terms {
        if positive {
            acc += v;
        } else {
            acc -= v;
        }
    }
    acc
}

/// Signed vertex sum of the extension over a face, evaluating the integral at
/// each vertex.
pub fn face_volume(f: &DensityField, face: &FaceDescriptor) -> Rational {
    let values: Vec<(Rational, bool)> = face
        .vertices()
        .map(|(levels, positive)| {
            let x: Vec<Rational> = levels.iter().map(|&l| level_value(l, &f.a)).collect();
            (f.evaluate_q(&x).expect("face vertices lie on the grid"), positive)
        })
        .collect();
    signed_sum(values.iter().map(|(v, s)| (v, *s)))
}

/// [`face_volume`] from precomputed grid values.
pub fn face_volume_on_grid(g: &GridFunction, face: &FaceDescriptor) -> Rational {
    let values: Vec<(usize, bool)> = face.vertices().map(|(levels, s)| (grid_index(&levels), s)).collect();
    signed_sum(values.iter().map(|&(idx, s)| (g.value_at_index(idx), s)))
}

/// Nonnegative volume on every `j`-face of every subbox for `j` in `1..=k`.
pub fn check_k_increasing_extension(f: &DensityField, k: usize) -> FeasibilityReport {
    let grid = f.grid_values();
    check_k_increasing_on_grid(&grid, k)
}

pub(crate) fn check_k_increasing_on_grid(grid: &GridFunction, k: usize) -> FeasibilityReport {
    let d = grid.d;
    let violations: Vec<Violation> = (1..=k.min(d))
        .into_par_iter()
        .flat_map_iter(|j| {
            enumerate_k_faces(d, &grid.a, j).filter_map(move |face| {
                let vol = face_volume_on_grid(grid, &face);
                vol.is_negative().then(|| Violation {
                    constraint: format!("face_volume_{j}"),
                    index: face.index_key(),
                    lhs: vol,
                    relation: Relation::Ge,
                    rhs: Rational::zero(),
                })
            })
        })
        .collect();
    FeasibilityReport { violations }.finish()
}

/// Boundary conditions, monotonicity, Lipschitz bound, range and Fréchet
/// envelope of the extension, checked on grid points and subbox edges.
pub fn check_quasi_copula_axioms(f: &DensityField) -> FeasibilityReport {
    let grid = f.grid_values();
    let mut report = check_axioms_on_grid(&grid);
    let d = f.d;
    let one = Rational::one();
    let two = int(2);
    for mid in [&f.a / &two, (&f.a + &one) / &two] {
        for slot in 0..d {
            let mut x = vec![one.clone(); d];
            x[slot] = mid.clone();
            let v = f.evaluate_q(&x).expect("midpoint lies in the unit cube");
            report.require("boundary_top_midpoint", vec![slot], v, Relation::Eq, mid.clone());
        }
    }
    report.finish()
}

pub(crate) fn check_axioms_on_grid(grid: &GridFunction) -> FeasibilityReport {
    let d = grid.d;
    let mut report = FeasibilityReport::default();
    let (zero, one) = (Rational::zero(), Rational::one());
    for (levels, v) in grid.iter() {
        let idx = grid_index(&levels);
        let x = grid.point(&levels);
        if levels.contains(&0) {
            report.require("boundary_zero", vec![idx], v.clone(), Relation::Eq, zero.clone());
        }
        let below_top: Vec<usize> = (0..d).filter(|&m| levels[m] != 2).collect();
        if below_top.len() <= 1 {
            let u = below_top.first().map_or(one.clone(), |&m| x[m].clone());
            report.require("boundary_top", vec![idx], v.clone(), Relation::Eq, u);
        }
        report.require("range", vec![idx, 0], v.clone(), Relation::Ge, zero.clone());
        report.require("range", vec![idx, 1], v.clone(), Relation::Le, one.clone());
        let (lo, hi) = frechet_bounds(&x);
        report.require("frechet_lower", vec![idx], v.clone(), Relation::Ge, lo);
        report.require("frechet_upper", vec![idx], v.clone(), Relation::Le, hi);

        for m in 0..d {
            if levels[m] == 2 {
                continue;
            }
            let mut next = levels.clone();
            next[m] += 1;
            let rise = grid.value(&next) - v;
            let len = level_value(next[m], &grid.a) - level_value(levels[m], &grid.a);
            report.require("monotone", vec![idx, m], rise.clone(), Relation::Ge, zero.clone());
            report.require("lipschitz", vec![idx, m], rise, Relation::Le, len);
        }
    }
    report.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::build_profile;
    use crate::exact::rat;
    use crate::extremes::Sign;
    use proptest::prelude::*;

    fn profile(d: usize, k: usize, a: Rational, q: Vec<Rational>) -> SymmetricVertexProfile {
        SymmetricVertexProfile { d, k, sign: Sign::Plus, a, q, i0: d, candidates: vec![] }
    }

    fn trivial(d: usize) -> SymmetricVertexProfile {
        let mut q = vec![Rational::zero(); d + 1];
        q[d] = Rational::one();
        profile(d, d, Rational::zero(), q)
    }

    #[test]
    fn triangle_examples() {
        let q = vec![rat(0, 1), rat(0, 1), rat(0, 1), rat(1, 2), rat(1, 1)];
        let t = difference_triangle(&q, 2).unwrap();
        assert_eq!(t.row(2), &[rat(0, 1), rat(1, 2), rat(0, 1)]);

        let t = difference_triangle(&trivial(5).q, 5).unwrap();
        for j in 1..=5 {
            assert_eq!(t.get(j, 5), &rat(1, 1));
        }

        let t = difference_triangle(&vec![rat(2, 7); 6], 5).unwrap();
        assert!((1..=5).all(|j| t.row(j).iter().all(Zero::is_zero)));

        assert!(difference_triangle(&q, 0).is_err());
        assert!(difference_triangle(&q, 5).is_err());
    }

    #[test]
    fn frechet_examples() {
        let ones = vec![rat(1, 1); 4];
        assert_eq!(frechet_bounds(&ones), (rat(1, 1), rat(1, 1)));
        assert_eq!(frechet_bounds(&[rat(0, 1), rat(1, 2), rat(1, 1)]), (rat(0, 1), rat(0, 1)));
        assert_eq!(frechet_bounds(&[rat(1, 2), rat(1, 1), rat(1, 1), rat(1, 1)]), (rat(1, 2), rat(1, 2)));
    }

    #[test]
    fn symmetric_feasibility_examples() {
        assert!(check_symmetric_feasibility(&build_profile(4, 2, Sign::Minus).unwrap()).passed());
        assert!(check_symmetric_feasibility(&trivial(6)).passed());

        let mut p = build_profile(5, 3, Sign::Minus).unwrap();
        p.a = rat(2, 3);
        let report = check_symmetric_feasibility(&p);
        let lip: Vec<_> = report.by_constraint("lipschitz").collect();
        assert_eq!(lip.len(), 1);
        assert_eq!((lip[0].index.as_slice(), &lip[0].lhs, &lip[0].rhs), (&[5][..], &rat(2, 3), &rat(1, 3)));
    }

    #[test]
    fn face_counts() {
        assert_eq!(enumerate_k_faces(2, &rat(1, 2), 1).count(), 16);
        assert_eq!(enumerate_k_faces(3, &rat(1, 2), 2).count(), 48);
        assert_eq!(enumerate_k_faces(3, &rat(1, 2), 3).count(), 8);
        // a = 0 leaves only the full cube.
        assert_eq!(enumerate_k_faces(3, &rat(0, 1), 2).count(), 6);
        for d in 1..=5 {
            for j in 1..=d {
                let per_box = binom(d as u64, j as i64) * num_bigint::BigInt::from(1u64 << (d - j));
                let faces: Vec<_> = enumerate_k_faces(d, &rat(1, 3), j).collect();
                assert_eq!(num_bigint::BigInt::from(faces.len()), per_box * num_bigint::BigInt::from(1u64 << d));
                let mut dedup = faces.clone();
                dedup.sort();
                dedup.dedup();
                assert_eq!(dedup.len(), faces.len());
            }
        }
    }

    #[test]
    fn face_volume_examples() {
        let f = trivial(3).density_field();
        let top = FaceDescriptor { d: 3, free_axes: 0b111, base_vertex: 0, parent_subbox: 0b111 };
        assert_eq!(face_volume(&f, &top), rat(1, 1));

        let p = build_profile(4, 2, Sign::Minus).unwrap();
        let f = p.density_field();
        let main = FaceDescriptor { d: 4, free_axes: 0b1111, base_vertex: 0, parent_subbox: 0b1111 };
        assert_eq!(face_volume(&f, &main), rat(-1, 1));
        assert_eq!(face_volume(&f, &main), p.volume());

        // subbox 0 touches the origin: all its vertices on x_1 = 0 carry 0.
        let origin = FaceDescriptor { d: 4, free_axes: 0b0110, base_vertex: 0, parent_subbox: 0 };
        assert_eq!(face_volume(&f, &origin), rat(0, 1));

        let grid = f.grid_values();
        for j in 1..=4 {
            for face in enumerate_k_faces(4, &f.a, j).step_by(7) {
                assert_eq!(face_volume(&f, &face), face_volume_on_grid(&grid, &face));
            }
        }
    }

    #[test]
    fn k_increasing_examples() {
        let f = build_profile(4, 2, Sign::Minus).unwrap().density_field();
        assert!(check_k_increasing_extension(&f, 2).passed());
        let report = check_k_increasing_extension(&f, 3);
        assert!(!report.passed());
        assert!(report.violations.iter().all(|v| v.constraint == "face_volume_3"));

        let f = trivial(4).density_field();
        assert!(check_k_increasing_extension(&f, 4).passed());
    }

    #[test]
    fn axioms_examples() {
        assert!(check_quasi_copula_axioms(&trivial(4).density_field()).passed());
        assert!(check_quasi_copula_axioms(&build_profile(5, 3, Sign::Minus).unwrap().density_field()).passed());

        let planted = profile(3, 2, rat(1, 2), vec![rat(0, 1), rat(1, 2), rat(1, 4), rat(1, 1)]);
        let report = check_quasi_copula_axioms(&planted.density_field());
        assert!(report.by_constraint("monotone").count() > 0);
    }

    #[test]
    fn lower_levels_follow_from_higher() {
        for d in 3..=5 {
            for k in 2..=d {
                for sign in [Sign::Minus, Sign::Plus] {
                    let Ok(p) = build_profile(d, k, sign) else { continue };
                    let grid = p.density_field().grid_values();
                    for level in 1..=d {
                        if check_k_increasing_on_grid(&grid, level).passed() {
                            for lower in 1..level {
                                assert!(check_k_increasing_on_grid(&grid, lower).passed());
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn closed_form_matches_recursion_on_profiles() {
        let p = build_profile(9, 4, Sign::Minus).unwrap();
        let t = difference_triangle(&p.q, 4).unwrap();
        for j in 1..=4 {
            for i in j..=9 {
                assert_eq!(t.get(j, i), &difference_closed_form(&p.q, j, i));
            }
        }
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..12).prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #[test]
        fn closed_form_matches_recursion(q in proptest::collection::vec(small_rational(), 2..10), k in 1usize..9) {
            let d = q.len() - 1;
            let k = k.min(d);
            let t = difference_triangle(&q, k).unwrap();
            for j in 1..=k {
                for i in j..=d {
                    prop_assert_eq!(t.get(j, i), &difference_closed_form(&q, j, i));
                }
            }
        }

        // On arbitrary small profiles the symmetric constraint set and the
        // brute-force extension checks agree.
        #[test]
        fn symmetric_iff_brute_force(
            d in 2usize..=4,
            k_off in 0usize..3,
            a_num in 1i64..6,
            steps in proptest::collection::vec(0i64..4, 5),
        ) {
            let k = (2 + k_off).min(d);
            let a = rat(a_num, 6);
            // q_0..q_{d-1} from cumulative steps in units of 1/12, q_d = 1
            let mut q = Vec::with_capacity(d + 1);
            let mut acc = 0i64;
            for s in steps.iter().take(d) {
                q.push(rat(acc, 12));
                acc += s;
            }
            q.push(rat(1, 1));
            let p = profile(d, k, a, q);
            let symmetric = check_symmetric_feasibility(&p).passed();
            let f = p.density_field();
            let brute = check_quasi_copula_axioms(&f).passed() && check_k_increasing_extension(&f, k).passed();
            prop_assert_eq!(symmetric, brute, "profile {:?}", p);
        }
    }
}
