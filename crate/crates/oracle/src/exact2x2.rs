//! Exact rational membership for 2 x 2 targets in finitely generated cones.
//!
//! The symmetric 2 x 2 matrices embed into Q^3 as `(g_xx, g_xy, g_yy)`, and
//! a direction `w` maps to `(w_1^2, w_1 w_2, w_2^2)`. Membership is decided
//! by exact facet enumeration of the (always pointed) cone: no tolerances,
//! no floating point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Exact rational scalar used throughout the oracle.
pub type Rat = BigRational;

/// Rational symmetric 2 x 2 covariance target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalCov2 {
    pub xx: Rat,
    pub xy: Rat,
    pub yy: Rat,
}

impl RationalCov2 {
    pub fn from_i64(xx: (i64, i64), xy: (i64, i64), yy: (i64, i64)) -> Self {
        let r = |(n, d): (i64, i64)| Rat::new(BigInt::from(n), BigInt::from(d));
        Self {
            xx: r(xx),
            xy: r(xy),
            yy: r(yy),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactVerdict {
    Member,
    NotMember,
}

type V3 = [Rat; 3];

fn v3_zero() -> V3 {
    [Rat::zero(), Rat::zero(), Rat::zero()]
}

fn is_zero(v: &V3) -> bool {
    v.iter().all(Rat::is_zero)
}

fn cross(a: &V3, b: &V3) -> V3 {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn dot(a: &V3, b: &V3) -> Rat {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

fn neg(v: &V3) -> V3 {
    [-v[0].clone(), -v[1].clone(), -v[2].clone()]
}

/// Coordinates `(alpha, beta)` with `x = alpha u + beta v`, when `x` lies in
/// the span of the independent pair `(u, v)`.
fn coords_in_plane(u: &V3, v: &V3, x: &V3) -> Option<(Rat, Rat)> {
    // pick a nonsingular 2 x 2 minor of [u v]
    for (r1, r2) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let det = &u[r1] * &v[r2] - &u[r2] * &v[r1];
        if !det.is_zero() {
            let alpha = (&x[r1] * &v[r2] - &x[r2] * &v[r1]) / det.clone();
            let beta = (&u[r1] * &x[r2] - &u[r2] * &x[r1]) / det;
            // consistency on the remaining coordinate
            let r3 = 3 - r1 - r2;
            if &alpha * &u[r3] + &beta * &v[r3] == x[r3] {
                return Some((alpha, beta));
            }
            return None;
        }
    }
    None
}

/// Decides `gamma in cone{w w^T}` for rational direction vectors, exactly.
pub fn exact_2x2_membership(gamma: &RationalCov2, gens: &[(Rat, Rat)]) -> ExactVerdict {
    let b: V3 = [gamma.xx.clone(), gamma.xy.clone(), gamma.yy.clone()];
    if is_zero(&b) {
        return ExactVerdict::Member;
    }
    let dirs: Vec<V3> = gens
        .iter()
        .map(|(w1, w2)| [w1 * w1, w1 * w2, w2 * w2])
        .filter(|g| !is_zero(g))
        .collect();
    if dirs.is_empty() {
        return ExactVerdict::NotMember;
    }

    // greedy exact basis of the span
    let mut basis: Vec<V3> = Vec::new();
    for g in &dirs {
        match basis.len() {
            0 => basis.push(g.clone()),
            1 => {
                if !is_zero(&cross(&basis[0], g)) {
                    basis.push(g.clone());
                }
            }
            2 => {
                let normal = cross(&basis[0], &basis[1]);
                if !dot(&normal, g).is_zero() {
                    basis.push(g.clone());
                }
            }
            _ => break,
        }
    }

    match basis.len() {
        1 => {
            // all directions are positive multiples of basis[0] (their
            // first/last coordinates are squares, so no sign flips occur)
            let u = &basis[0];
            let k = (0..3).find(|&k| !u[k].is_zero()).expect("nonzero basis");
            let t = &b[k] / &u[k];
            for r in 0..3 {
                if &t * &u[r] != b[r] {
                    return ExactVerdict::NotMember;
                }
            }
            if t >= Rat::zero() {
                ExactVerdict::Member
            } else {
                ExactVerdict::NotMember
            }
        }
        2 => {
            let (u, v) = (basis[0].clone(), basis[1].clone());
            let Some((bx, by)) = coords_in_plane(&u, &v, &b) else {
                return ExactVerdict::NotMember;
            };
            let mut plane: Vec<(Rat, Rat)> = Vec::with_capacity(dirs.len());
            for g in &dirs {
                let (a, c) = coords_in_plane(&u, &v, g).expect("generators span the plane");
                plane.push((a, c));
            }
            // the cone is pointed, so a planar order by cross product is
            // total once anchored at any member direction
            let cross2 =
                |p: &(Rat, Rat), q: &(Rat, Rat)| -> Rat { &p.0 * &q.1 - &p.1 * &q.0 };
            let mut lo = plane[0].clone();
            let mut hi = plane[0].clone();
            for h in plane.iter().skip(1) {
                if cross2(h, &lo).is_positive() {
                    lo = h.clone();
                }
                if cross2(&hi, h).is_positive() {
                    hi = h.clone();
                }
            }
            let bb = (bx, by);
            if cross2(&lo, &bb) >= Rat::zero() && cross2(&bb, &hi) >= Rat::zero() {
                ExactVerdict::Member
            } else {
                ExactVerdict::NotMember
            }
        }
        3 => {
            // facet enumeration: every facet of the full-dimensional pointed
            // cone is spanned by two of the directions
            let mut facets: Vec<V3> = Vec::new();
            for i in 0..dirs.len() {
                for j in (i + 1)..dirs.len() {
                    let h = cross(&dirs[i], &dirs[j]);
                    if is_zero(&h) {
                        continue;
                    }
                    let mut all_nonneg = true;
                    let mut all_nonpos = true;
                    for g in &dirs {
                        let s = dot(&h, g);
                        if s.is_positive() {
                            all_nonpos = false;
                        }
                        if s.is_negative() {
                            all_nonneg = false;
                        }
                        if !all_nonneg && !all_nonpos {
                            break;
                        }
                    }
                    if all_nonneg {
                        facets.push(h);
                    } else if all_nonpos {
                        facets.push(neg(&h));
                    }
                }
            }
            if facets
                .iter()
                .all(|h| dot(h, &b) >= Rat::zero())
            {
                ExactVerdict::Member
            } else {
                ExactVerdict::NotMember
            }
        }
        _ => unreachable!("basis size is at most 3"),
    }
}

/// Convenience: rational direction list from integer pairs.
pub fn int_directions(ws: &[(i64, i64)]) -> Vec<(Rat, Rat)> {
    ws.iter()
        .map(|&(a, b)| {
            (
                Rat::from_integer(BigInt::from(a)),
                Rat::from_integer(BigInt::from(b)),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dichotomic() -> Vec<(Rat, Rat)> {
        int_directions(&[(1, 0), (0, 1), (1, 1), (1, -1)])
    }

    #[test]
    fn generator_itself_is_member() {
        let gamma = RationalCov2::from_i64((1, 1), (1, 1), (1, 1));
        assert_eq!(exact_2x2_membership(&gamma, &dichotomic()), ExactVerdict::Member);
    }

    #[test]
    fn indefinite_matrix_is_not_member() {
        let gamma = RationalCov2::from_i64((1, 1), (2, 1), (1, 1));
        assert_eq!(
            exact_2x2_membership(&gamma, &dichotomic()),
            ExactVerdict::NotMember
        );
    }

    #[test]
    fn steep_family_rejected_exactly() {
        // gamma_xx = 1/2, gamma_xy = 1, gamma_yy = 21/10
        let gamma = RationalCov2::from_i64((1, 2), (1, 1), (21, 10));
        assert_eq!(
            exact_2x2_membership(&gamma, &dichotomic()),
            ExactVerdict::NotMember
        );
    }

    #[test]
    fn boundary_point_is_member() {
        // gamma_xx = gamma_xy = 1 = gamma_yy lies on the cone boundary
        let gamma = RationalCov2::from_i64((1, 1), (1, 1), (1, 1));
        assert_eq!(exact_2x2_membership(&gamma, &dichotomic()), ExactVerdict::Member);
        // adding any diagonal slack keeps membership
        let gamma = RationalCov2::from_i64((3, 2), (1, 1), (5, 4));
        assert_eq!(exact_2x2_membership(&gamma, &dichotomic()), ExactVerdict::Member);
    }

    #[test]
    fn rank_one_generator_sets() {
        let gens = int_directions(&[(1, 2), (2, 4)]);
        let member = RationalCov2::from_i64((1, 1), (2, 1), (4, 1));
        assert_eq!(exact_2x2_membership(&member, &gens), ExactVerdict::Member);
        let not = RationalCov2::from_i64((1, 1), (2, 1), (5, 1));
        assert_eq!(exact_2x2_membership(&not, &gens), ExactVerdict::NotMember);
        let neg_scale = RationalCov2::from_i64((-1, 1), (-2, 1), (-4, 1));
        assert_eq!(exact_2x2_membership(&neg_scale, &gens), ExactVerdict::NotMember);
    }

    #[test]
    fn planar_generator_sets() {
        // two independent diagonal directions span the diagonal plane
        let gens = int_directions(&[(1, 0), (0, 1)]);
        let diag = RationalCov2::from_i64((2, 1), (0, 1), (3, 1));
        assert_eq!(exact_2x2_membership(&diag, &gens), ExactVerdict::Member);
        let off = RationalCov2::from_i64((2, 1), (1, 1), (3, 1));
        assert_eq!(exact_2x2_membership(&off, &gens), ExactVerdict::NotMember);
        let neg = RationalCov2::from_i64((-2, 1), (0, 1), (3, 1));
        assert_eq!(exact_2x2_membership(&neg, &gens), ExactVerdict::NotMember);
    }

    #[test]
    fn empty_generators_reject_nonzero() {
        let gamma = RationalCov2::from_i64((1, 1), (0, 1), (0, 1));
        assert_eq!(exact_2x2_membership(&gamma, &[]), ExactVerdict::NotMember);
        let zero = RationalCov2::from_i64((0, 1), (0, 1), (0, 1));
        assert_eq!(exact_2x2_membership(&zero, &[]), ExactVerdict::Member);
    }
}
