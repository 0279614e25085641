//! Exact certificate that a branch system is locally expanding.
//!
//! For `d(x, y) <= η` every pair of images must satisfy `d(x', y') >= λ d(x, y)`.
//! Images under one branch expand by its slope. Images under different branches
//! `i ≠ j` stay at least `sep_ij - (|s_i| + |s_j|) η` apart, where `sep_ij` is the
//! smallest distance between `T_i` and `T_j` on their common domain, so
//! `η <= sep_ij / (λ + |s_i| + |s_j|)` suffices.

use num_traits::{One, Signed, Zero};

use mvdyn_core::scalar::ratio;

use crate::error::CircleError;
use crate::system::{Metric, PiecewiseAffineMVSystem, Piece, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionCertificate {
    /// Expansion factor, the smallest `|slope|`.
    pub lambda: Q,
    /// Scale below which the expansion inequality holds.
    pub eta: Q,
}

fn circle_dist(d: &Q) -> Q {
    let f = d - d.floor();
    let g = Q::one() - &f;
    if f < g {
        f
    } else {
        g
    }
}

/// Smallest distance between `p(x)` and `q(x)` for `x ∈ [a, b]`.
fn min_gap(p: &Piece, q: &Piece, a: &Q, b: &Q, metric: Metric) -> Q {
    let da = p.apply(a) - q.apply(a);
    let db = p.apply(b) - q.apply(b);
    let (lo, hi) = if da <= db { (da, db) } else { (db, da) };
    match metric {
        Metric::Interval => {
            if !lo.is_positive() && !hi.is_negative() {
                Q::zero()
            } else {
                lo.abs().min(hi.abs())
            }
        }
        Metric::Circle => {
            // The difference lies in [-1, 1]; it vanishes on the circle at integers.
            if lo.ceil() <= hi {
                Q::zero()
            } else {
                circle_dist(&lo).min(circle_dist(&hi))
            }
        }
    }
}

/// What two branches do where their domains meet.
enum Meeting {
    /// Smallest distance between their values on common points.
    Separated(Q),
    /// Their values agree at 0 = 1 and one continues the other across it with
    /// slopes of the same sign; the bound is the one for a single wrapping branch.
    Continued(Q),
    /// Their values agree at a common point.
    Collide,
}

fn meetings(system: &PiecewiseAffineMVSystem, i: usize, j: usize) -> Vec<Meeting> {
    let metric = system.metric();
    let pieces = system.pieces();
    let mut out = Vec::new();
    for p in pieces.iter().filter(|p| p.branch == i) {
        for q in pieces.iter().filter(|q| q.branch == j) {
            let a = if p.lo > q.lo { &p.lo } else { &q.lo };
            let b = if p.hi < q.hi { &p.hi } else { &q.hi };
            if a <= b {
                let gap = min_gap(p, q, a, b, metric);
                out.push(if gap.is_zero() { Meeting::Collide } else { Meeting::Separated(gap) });
            }
            if metric == Metric::Circle {
                let zero = Q::zero();
                let one = Q::one();
                let mut across = |left: &Piece, right: &Piece| {
                    // `left` ends at 1, `right` starts at 0.
                    let d = circle_dist(&(left.apply(&one) - right.apply(&zero)));
                    out.push(if !d.is_zero() {
                        Meeting::Separated(d)
                    } else if left.slope.is_positive() == right.slope.is_positive() {
                        let s = left.slope.abs().max(right.slope.abs());
                        Meeting::Continued(ratio(1, 2) / s)
                    } else {
                        Meeting::Collide
                    });
                };
                if p.hi == one && q.lo == zero {
                    across(p, q);
                }
                if q.hi == one && p.lo == zero {
                    across(q, p);
                }
            }
        }
    }
    out
}

/// Distance between disjoint branch domains.
fn domain_gap(system: &PiecewiseAffineMVSystem, i: usize, j: usize) -> Q {
    let (li, ri) = &system.branches()[i].domain;
    let (lj, rj) = &system.branches()[j].domain;
    let direct = if ri < lj { lj - ri } else { li - rj };
    match system.metric() {
        Metric::Interval => direct,
        Metric::Circle => {
            let span = ri.max(rj) - li.min(lj);
            direct.min(Q::one() - span)
        }
    }
}

/// Returns `(λ, η)` or [`CircleError::NotExpanding`] naming two branches that
/// meet on a common point.
pub fn expansion_certificate(system: &PiecewiseAffineMVSystem) -> Result<ExpansionCertificate, CircleError> {
    let lambda = system.min_expansion();
    let branches = system.branches();
    let mut eta: Option<Q> = None;
    let mut bound = |v: Q| {
        eta = Some(match eta.take() {
            Some(e) if e <= v => e,
            _ => v,
        });
    };
    for (i, b) in branches.iter().enumerate() {
        if b.wraps {
            if system.metric() == Metric::Interval {
                // The jump of a wrapped branch brings nearby points together.
                return Err(CircleError::NotExpanding { i, j: i });
            }
            bound(ratio(1, 2) / b.slope.abs());
        }
    }
    for i in 0..branches.len() {
        for j in i + 1..branches.len() {
            let si = branches[i].slope.abs();
            let sj = branches[j].slope.abs();
            let found = meetings(system, i, j);
            if found.is_empty() {
                bound(domain_gap(system, i, j) / ratio(2, 1));
            }
            for m in found {
                match m {
                    Meeting::Collide => return Err(CircleError::NotExpanding { i, j }),
                    Meeting::Separated(sep) => bound(sep / (lambda.clone() + si.clone() + sj.clone())),
                    Meeting::Continued(e) => bound(e),
                }
            }
        }
    }
    // A single non-wrapping branch expands at every scale; any η up to the
    // diameter of the space is admissible.
    let eta = eta.unwrap_or_else(|| match system.metric() {
        Metric::Interval => Q::one(),
        Metric::Circle => ratio(1, 2),
    });
    Ok(ExpansionCertificate { lambda, eta })
}
