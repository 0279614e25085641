//! Piecewise-affine multi-valued maps of `[0, 1]` or of the circle `R/Z`.

use num_traits::{One, Signed, Zero};

use mvdyn_core::scalar::{ratio, Rational};

use crate::error::CircleError;

pub type Q = Rational;

/// How distances are measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Metric {
    /// Euclidean distance on `[0, 1]`.
    Interval,
    /// Intrinsic distance on `R/Z`; the points 0 and 1 coincide.
    Circle,
}

/// `x -> slope * x + offset` on `[l, r]`, reduced mod 1 when `wraps`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub slope: Q,
    pub offset: Q,
    pub domain: (Q, Q),
    pub wraps: bool,
}

impl Branch {
    pub fn new(slope: Q, offset: Q, domain: (Q, Q), wraps: bool) -> Self {
        Self {
            slope,
            offset,
            domain,
            wraps,
        }
    }

    /// The unreduced affine value.
    pub fn lift(&self, x: &Q) -> Q {
        &self.slope * x + &self.offset
    }

    pub fn contains(&self, x: &Q) -> bool {
        *x >= self.domain.0 && *x <= self.domain.1
    }

    /// Image of a point of the domain, reduced mod 1 for wrapping branches.
    pub fn apply(&self, x: &Q) -> Q {
        let y = self.lift(x);
        if self.wraps {
            frac(&y)
        } else {
            y
        }
    }
}

/// A non-wrapping affine piece `x -> slope * x + shift` on `[lo, hi]`, with values
/// in `[0, 1]`. A wrapping branch splits into one piece per integer part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub branch: usize,
    pub slope: Q,
    pub shift: Q,
    pub lo: Q,
    pub hi: Q,
}

impl Piece {
    pub fn apply(&self, x: &Q) -> Q {
        &self.slope * x + &self.shift
    }

    pub fn contains(&self, x: &Q) -> bool {
        *x >= self.lo && *x <= self.hi
    }

    /// Image of `[a, b] ∩ [lo, hi]`, or `None` if the intersection is empty.
    pub fn image(&self, a: &Q, b: &Q) -> Option<(Q, Q)> {
        let lo = if *a > self.lo { a } else { &self.lo };
        let hi = if *b < self.hi { b } else { &self.hi };
        if lo > hi {
            return None;
        }
        let (u, v) = (self.apply(lo), self.apply(hi));
        Some(if u <= v { (u, v) } else { (v, u) })
    }
}

/// `T(x) = { T_i(x) : x ∈ C_i }`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseAffineMVSystem {
    name: String,
    branches: Vec<Branch>,
    metric: Metric,
    pieces: Vec<Piece>,
}

pub(crate) fn floor(x: &Q) -> Q {
    x.floor()
}

/// `x mod 1` in `[0, 1)`.
pub fn frac(x: &Q) -> Q {
    x - floor(x)
}

fn split(index: usize, b: &Branch) -> Vec<Piece> {
    let (l, r) = &b.domain;
    if !b.wraps {
        return vec![Piece {
            branch: index,
            slope: b.slope.clone(),
            shift: b.offset.clone(),
            lo: l.clone(),
            hi: r.clone(),
        }];
    }
    let (u, v) = (b.lift(l), b.lift(r));
    let (ymin, ymax) = if u <= v { (u, v) } else { (v, u) };
    let first = floor(&ymin);
    let last = ymax.ceil() - Q::one();
    let mut pieces = Vec::new();
    let mut m = first;
    while m <= last {
        // Solve slope * x + offset ∈ [m, m + 1] for x, clipped to the domain.
        let a = (&m - &b.offset) / &b.slope;
        let c = (&m + Q::one() - &b.offset) / &b.slope;
        let (a, c) = if a <= c { (a, c) } else { (c, a) };
        let lo = if a > *l { a } else { l.clone() };
        let hi = if c < *r { c } else { r.clone() };
        if lo < hi || (lo == hi && l == r) {
            pieces.push(Piece {
                branch: index,
                slope: b.slope.clone(),
                shift: &b.offset - &m,
                lo,
                hi,
            });
        }
        m += Q::one();
    }
    if pieces.is_empty() && l == r {
        let m = floor(&b.lift(l));
        pieces.push(Piece {
            branch: index,
            slope: b.slope.clone(),
            shift: &b.offset - &m,
            lo: l.clone(),
            hi: r.clone(),
        });
    }
    pieces
}

impl PiecewiseAffineMVSystem {
    /// Validates slopes, domains and ranges. Branch separation is not checked
    /// here; see [`crate::expansion::expansion_certificate`].
    pub fn new(name: impl Into<String>, branches: Vec<Branch>, metric: Metric) -> Result<Self, CircleError> {
        if branches.is_empty() {
            return Err(CircleError::NoBranches);
        }
        for (i, b) in branches.iter().enumerate() {
            let (l, r) = &b.domain;
            if b.slope.abs() <= Q::one() {
                return Err(CircleError::InvalidBranch {
                    index: i,
                    reason: format!("slope {} is not expanding", b.slope),
                });
            }
            if l.is_negative() || r > &Q::one() || l > r {
                return Err(CircleError::InvalidBranch {
                    index: i,
                    reason: format!("domain [{l}, {r}] is not inside [0, 1]"),
                });
            }
            if !b.wraps {
                let (u, v) = (b.lift(l), b.lift(r));
                let ok = |y: &Q| !y.is_negative() && *y <= Q::one();
                if !ok(&u) || !ok(&v) {
                    return Err(CircleError::InvalidBranch {
                        index: i,
                        reason: format!("image of [{l}, {r}] leaves [0, 1]"),
                    });
                }
            }
        }
        let pieces = branches
            .iter()
            .enumerate()
            .flat_map(|(i, b)| split(i, b))
            .collect();
        Ok(Self {
            name: name.into(),
            branches,
            metric,
            pieces,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Smallest `|slope|`.
    pub fn min_expansion(&self) -> Q {
        self.branches
            .iter()
            .map(|b| b.slope.abs())
            .min()
            .expect("at least one branch")
    }

    /// Reduces a point to its canonical representative: mod 1 on the circle.
    pub fn normalize(&self, x: &Q) -> Q {
        match self.metric {
            Metric::Interval => x.clone(),
            Metric::Circle => frac(x),
        }
    }

    /// All images of `x`, one per branch whose domain contains it.
    pub fn image(&self, x: &Q) -> Vec<(usize, Q)> {
        let mut out = Vec::new();
        for (i, b) in self.branches.iter().enumerate() {
            if b.contains(x) {
                out.push((i, self.normalize(&b.apply(x))));
            } else if self.metric == Metric::Circle && x.is_zero() && b.contains(&Q::one()) {
                out.push((i, self.normalize(&b.apply(&Q::one()))));
            }
        }
        out
    }

    /// Distance between two points under the system's metric.
    pub fn distance(&self, x: &Q, y: &Q) -> Q {
        let d = (x - y).abs();
        match self.metric {
            Metric::Interval => d,
            Metric::Circle => {
                let d = frac(&d);
                let e = Q::one() - &d;
                if d < e {
                    d
                } else {
                    e
                }
            }
        }
    }

    /// Whether the system's branches contain every branch of `other`.
    pub fn contains_branches_of(&self, other: &Self) -> bool {
        other.branches.iter().all(|b| self.branches.contains(b))
    }
}

/// The doubling map augmented by the middle branch: `T_i(x) = 2x - i/2` on
/// `C_0 = [0, 1/2]`, `C_1 = [1/4, 3/4]`, `C_2 = [1/2, 1]`, Euclidean metric.
pub fn three_branch_doubling() -> PiecewiseAffineMVSystem {
    let branches = (0..3)
        .map(|i| {
            Branch::new(
                ratio(2, 1),
                ratio(-i, 2),
                (ratio(i, 4), ratio(i + 2, 4)),
                false,
            )
        })
        .collect();
    PiecewiseAffineMVSystem::new("three-branch", branches, Metric::Interval).expect("valid branches")
}

/// `x -> 2x` on `[0, 1/2]` and `x -> 2x - 1` on `[1/2, 1]`, Euclidean metric.
pub fn doubling_map() -> PiecewiseAffineMVSystem {
    let branches = vec![
        Branch::new(ratio(2, 1), ratio(0, 1), (ratio(0, 1), ratio(1, 2)), false),
        Branch::new(ratio(2, 1), ratio(-1, 1), (ratio(1, 2), ratio(1, 1)), false),
    ];
    PiecewiseAffineMVSystem::new("doubling", branches, Metric::Interval).expect("valid branches")
}

/// `T(x) = { (qx + j)/p mod 1 : 0 <= j < p }` on the circle.
pub fn pq_correspondence(p: i64, q: i64) -> Result<PiecewiseAffineMVSystem, CircleError> {
    if p < 1 || q <= p {
        return Err(CircleError::InvalidParameters(format!(
            "need 1 <= p < q, got p = {p}, q = {q}"
        )));
    }
    let branches = (0..p)
        .map(|j| Branch::new(ratio(q, p), ratio(j, p), (ratio(0, 1), ratio(1, 1)), true))
        .collect();
    PiecewiseAffineMVSystem::new(format!("pq-{p}-{q}"), branches, Metric::Circle)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_branch_images() {
        let t = three_branch_doubling();
        let b1 = &t.branches()[1];
        assert_eq!(b1.apply(&ratio(1, 4)), ratio(0, 1));
        assert_eq!(b1.apply(&ratio(3, 4)), ratio(1, 1));
        assert_eq!(
            t.image(&ratio(1, 2)),
            vec![(0, ratio(1, 1)), (1, ratio(1, 2)), (2, ratio(0, 1))]
        );
        assert_eq!(t.pieces().len(), 3);
    }

    #[test]
    fn pq_pieces() {
        let t = pq_correspondence(2, 3).unwrap();
        assert_eq!(t.branches().len(), 2);
        assert!(t.branches().iter().all(|b| b.slope == ratio(3, 2)));
        // (3x + j)/2 on [0, 1] crosses one integer for each j.
        assert_eq!(t.pieces().len(), 4);
        for p in t.pieces() {
            for x in [&p.lo, &p.hi] {
                let y = p.apply(x);
                assert!(y >= ratio(0, 1) && y <= ratio(1, 1));
            }
        }
        assert_eq!(t.image(&ratio(0, 1)), vec![(0, ratio(0, 1)), (1, ratio(1, 2))]);
        let mut at_one = t.image(&ratio(1, 1));
        at_one.sort_by(|a, b| a.1.cmp(&b.1));
        assert_eq!(at_one.iter().map(|p| p.1.clone()).collect::<Vec<_>>(), vec![ratio(0, 1), ratio(1, 2)]);
    }

    #[test]
    fn pq_doubling() {
        let t = pq_correspondence(1, 2).unwrap();
        assert_eq!(t.branches().len(), 1);
        assert_eq!(t.pieces().len(), 2);
        assert_eq!(t.image(&ratio(3, 4)), vec![(0, ratio(1, 2))]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(pq_correspondence(2, 2).is_err());
        assert!(pq_correspondence(0, 3).is_err());
        let flat = Branch::new(ratio(1, 1), ratio(0, 1), (ratio(0, 1), ratio(1, 1)), false);
        assert!(PiecewiseAffineMVSystem::new("x", vec![flat], Metric::Interval).is_err());
        let out = Branch::new(ratio(2, 1), ratio(0, 1), (ratio(0, 1), ratio(1, 1)), false);
        assert!(PiecewiseAffineMVSystem::new("x", vec![out], Metric::Interval).is_err());
    }

    #[test]
    fn circle_distance() {
        let t = pq_correspondence(2, 3).unwrap();
        assert_eq!(t.distance(&ratio(1, 10), &ratio(9, 10)), ratio(1, 5));
        let d = doubling_map();
        assert_eq!(d.distance(&ratio(1, 10), &ratio(9, 10)), ratio(4, 5));
    }
}
