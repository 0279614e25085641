use std::cmp::Ordering;

use proptest::prelude::*;

use mvdyn_circle::bounds::OuterGrid;
use mvdyn_circle::hull::{hull_vertices, orientation};
use mvdyn_circle::*;
use mvdyn_core::scalar::ratio;

/// Points fit in an arc iff some arc starting at one of them covers all.
fn arc_brute_force(points: &[Q], arc: &Q) -> bool {
    points.iter().any(|start| {
        points.iter().all(|x| {
            let d = x - start;
            let d = &d - d.floor();
            d <= *arc
        })
    })
}

fn in_triangle(p: &(Q, Q), a: &(Q, Q), b: &(Q, Q), c: &(Q, Q)) -> bool {
    let o = [orientation(a, b, p), orientation(b, c, p), orientation(c, a, p)];
    if orientation(a, b, c) == Ordering::Equal {
        // A flat triangle is a segment: p must be on its line and between its ends.
        let within = |v: fn(&(Q, Q)) -> &Q| {
            let vs = [v(a), v(b), v(c)];
            let lo = vs.iter().min().unwrap();
            let hi = vs.iter().max().unwrap();
            *lo <= v(p) && v(p) <= *hi
        };
        return o.iter().all(|x| *x == Ordering::Equal) && within(|q| &q.0) && within(|q| &q.1);
    }
    !(o.contains(&Ordering::Greater) && o.contains(&Ordering::Less))
}

/// A point is a strict hull vertex iff it is not in the hull of the other
/// (distinct) points, which in the plane means no triangle of them holds it.
fn is_vertex_brute_force(points: &[(Q, Q)], i: usize) -> bool {
    let p = &points[i];
    let others: Vec<&(Q, Q)> = points.iter().filter(|q| *q != p).collect();
    let n = others.len();
    for a in 0..n {
        for b in a..n {
            for c in b..n {
                if in_triangle(p, others[a], others[b], others[c]) {
                    return false;
                }
            }
        }
    }
    true
}

proptest! {
    #[test]
    fn sturmian_matches_brute_force(raw in prop::collection::vec(0i64..60, 1..7), arc in 1i64..=60) {
        let points: Vec<Q> = raw.iter().map(|&k| ratio(k, 60)).collect();
        let arc = ratio(arc, 60);
        prop_assert_eq!(is_sturmian(&points, &arc, Metric::Circle), arc_brute_force(&points, &arc));
    }

    #[test]
    fn hull_vertices_match_brute_force(raw in prop::collection::vec((-4i64..=4, -4i64..=4), 1..11)) {
        let pts: Vec<(Q, Q)> = raw.iter().map(|&(x, y)| (ratio(x, 1), ratio(y, 1))).collect();
        let hull = hull_vertices(&pts);
        let mut distinct = pts.clone();
        distinct.sort();
        distinct.dedup();
        if distinct.len() >= 3 {
            for (i, p) in distinct.iter().enumerate() {
                prop_assert_eq!(hull.contains(p), is_vertex_brute_force(&distinct, i), "{:?}", p);
            }
            // Every point lies on the inner side of every hull edge.
            let k = hull.len();
            for j in 0..k {
                for p in &distinct {
                    prop_assert_ne!(orientation(&hull[j], &hull[(j + 1) % k], p), Ordering::Less);
                }
            }
        }
    }

    #[test]
    fn pq_orbits_validate(p in 1i64..=3, extra in 1i64..=2, k in 1usize..=5) {
        let s = pq_correspondence(p, p + extra).unwrap();
        let orbits = enumerate_periodic_orbits(&s, k).unwrap();
        let mut periodic_points = vec![0i64; k + 1];
        for o in &orbits {
            prop_assert!(o.validate(&s));
            let b = barycentre(&o.points_f64()).norm();
            prop_assert!(b <= 1.0 + 1e-12);
            prop_assert_eq!(o.period() == 1, (b - 1.0).abs() < 1e-12);
            periodic_points[o.period()] += o.period() as i64;
        }
        // Points of period dividing n solve p^n x ≡ q^n x, so there are q^n - p^n.
        let q = p + extra;
        for n in 1..=k {
            let total: i64 = (1..=n).filter(|d| n % d == 0).map(|d| periodic_points[d]).sum();
            prop_assert_eq!(total, q.pow(n as u32) - p.pow(n as u32));
        }
    }

    #[test]
    fn grid_shadows_every_orbit(n in 8usize..80) {
        for s in [three_branch_doubling(), pq_correspondence(2, 3).unwrap()] {
            let g = OuterGrid::new(&s, n).unwrap();
            let cell = |x: &Q| {
                let c = (x * Q::from_integer((n as i64).into())).floor().to_integer();
                usize::try_from(c).unwrap().min(n - 1)
            };
            for o in enumerate_periodic_orbits(&s, 4).unwrap() {
                let k = o.period();
                for j in 0..k {
                    prop_assert!(g.system().has_edge(cell(&o.points[j]), cell(&o.points[(j + 1) % k])));
                }
            }
        }
    }

    #[test]
    fn sandwich_on_random_observables(k in 0i64..64, n in prop::sample::select(vec![16usize, 64, 128])) {
        for s in [doubling_map(), three_branch_doubling(), pq_correspondence(2, 3).unwrap()] {
            for f in [Observable::cos(ratio(k, 64)), Observable::neg_dist(ratio(k, 64))] {
                let (lo, _) = beta_lower(&s, &f, 5).unwrap();
                prop_assert!(lo <= beta_upper(&s, &f, n).unwrap());
            }
        }
    }
}
