//! Exact enumeration of periodic orbits.
//!
//! Itineraries are words over the affine pieces of the system. Only Lyndon words
//! are visited (generated in lexicographic order by the FKM recursion), so each
//! cycle of symbols appears once. Along each prefix the image of the cylinder is
//! tracked and empty cylinders are pruned. At a Lyndon word of length `k` the
//! composed map `x -> S x + O` has the unique fixed point `O / (1 - S)`, which is
//! then checked by exact forward iteration.

use std::collections::BTreeSet;

use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::CircleError;
use crate::system::{Metric, PiecewiseAffineMVSystem, Q};

/// Longest period [`enumerate_periodic_orbits`] accepts.
pub const MAX_PERIOD_LIMIT: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PeriodicOrbit {
    /// Branch index used at each step.
    pub itinerary: Vec<usize>,
    /// `points[j + 1] = T_{itinerary[j]}(points[j])`, cyclically.
    pub points: Vec<Q>,
}

impl PeriodicOrbit {
    pub fn period(&self) -> usize {
        self.points.len()
    }

    /// Itinerary as a string: digits, or dot-separated numbers past 9 branches.
    pub fn itinerary_string(&self) -> String {
        if self.itinerary.iter().all(|&b| b < 10) {
            self.itinerary.iter().map(|b| b.to_string()).collect()
        } else {
            self.itinerary.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(".")
        }
    }

    pub fn points_f64(&self) -> Vec<f64> {
        self.points.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Re-checks every step exactly against the system.
    pub fn validate(&self, system: &PiecewiseAffineMVSystem) -> bool {
        let k = self.period();
        if k == 0 || self.itinerary.len() != k {
            return false;
        }
        (0..k).all(|j| {
            let next = &self.points[(j + 1) % k];
            system
                .image(&self.points[j])
                .iter()
                .any(|(b, y)| *b == self.itinerary[j] && y == next)
        }) && minimal_period(&self.points) == k
    }
}

/// Average of `e^{2πix}` over the orbit points.
pub fn barycentre(points: &[f64]) -> Complex64 {
    let sum: Complex64 = points
        .iter()
        .map(|x| Complex64::from_polar(1.0, std::f64::consts::TAU * (x - x.floor())))
        .sum();
    sum / points.len() as f64
}

/// Whether all points lie in a closed arc of length `arc` (circle) or a closed
/// interval of length `arc` (interval metric).
pub fn is_sturmian(points: &[Q], arc: &Q, metric: Metric) -> bool {
    if points.is_empty() {
        return true;
    }
    match metric {
        Metric::Interval => {
            let min = points.iter().min().expect("non-empty");
            let max = points.iter().max().expect("non-empty");
            max - min <= *arc
        }
        Metric::Circle => {
            let mut xs: Vec<Q> = points.iter().map(|x| x - x.floor()).collect();
            xs.sort();
            xs.dedup();
            let wrap = Q::one() - xs.last().expect("non-empty") + &xs[0];
            let largest = xs.windows(2).map(|w| &w[1] - &w[0]).fold(wrap, |a, g| if g > a { g } else { a });
            largest >= Q::one() - arc
        }
    }
}

fn minimal_period(points: &[Q]) -> usize {
    let k = points.len();
    (1..=k)
        .find(|&d| k.is_multiple_of(d) && (0..k).all(|j| points[j] == points[(j + d) % k]))
        .unwrap_or(k)
}

fn least_rotation<T: Ord + Clone>(v: &[T]) -> usize {
    (0..v.len())
        .min_by(|&a, &b| v[a..].iter().chain(&v[..a]).cmp(v[b..].iter().chain(&v[..b])))
        .unwrap_or(0)
}

fn rotate<T: Clone>(v: &[T], r: usize) -> Vec<T> {
    v[r..].iter().chain(&v[..r]).cloned().collect()
}

struct Search<'a, F> {
    system: &'a PiecewiseAffineMVSystem,
    max_len: usize,
    word: Vec<usize>,
    visit: F,
}

impl<F: FnMut(&[usize], Vec<Q>)> Search<'_, F> {
    /// FKM step: `word` is a prenecklace whose longest Lyndon prefix has length
    /// `p`; `image` is the image of its cylinder and `(s, o)` the composed map.
    fn extend(&mut self, p: usize, image: (Q, Q), s: Q, o: Q) {
        let t = self.word.len();
        if t > 0 && p == t {
            self.leaf(&s, &o);
        }
        if t == self.max_len {
            return;
        }
        let first = if t == 0 { 0 } else { self.word[t - p] };
        for letter in first..self.system.pieces().len() {
            let piece = &self.system.pieces()[letter];
            let Some(next_image) = piece.image(&image.0, &image.1) else {
                continue;
            };
            let next_p = if t > 0 && letter == self.word[t - p] { p } else { t + 1 };
            let next_s = &piece.slope * &s;
            let next_o = &piece.slope * &o + &piece.shift;
            self.word.push(letter);
            self.extend(next_p, next_image, next_s, next_o);
            self.word.pop();
        }
    }

    fn leaf(&mut self, s: &Q, o: &Q) {
        let x = o / (Q::one() - s);
        let pieces = self.system.pieces();
        let mut points = Vec::with_capacity(self.word.len());
        let mut cur = x.clone();
        for &letter in &self.word {
            let piece = &pieces[letter];
            if !piece.contains(&cur) {
                return;
            }
            points.push(cur.clone());
            cur = piece.apply(&cur);
        }
        debug_assert_eq!(cur, x);
        (self.visit)(&self.word, points);
    }
}

/// Calls `visit(piece_word, points)` for every Lyndon piece word of length at
/// most `max_period` that is realized by a periodic point. Points are not yet
/// normalized and may repeat across words; see [`enumerate_periodic_orbits`].
pub fn for_each_piece_cycle(
    system: &PiecewiseAffineMVSystem,
    max_period: usize,
    first_letter: Option<usize>,
    visit: impl FnMut(&[usize], Vec<Q>),
) {
    let mut search = Search {
        system,
        max_len: max_period,
        word: Vec::new(),
        visit,
    };
    let full = (Q::zero(), Q::one());
    match first_letter {
        None => search.extend(1, full, Q::one(), Q::zero()),
        Some(letter) => {
            let piece = &system.pieces()[letter];
            if let Some(image) = piece.image(&full.0, &full.1) {
                search.word.push(letter);
                search.extend(1, image, piece.slope.clone(), piece.shift.clone());
            }
        }
    }
}

/// Canonical orbit from a realized piece word, or `None` if its points have a
/// shorter period.
fn canonical(system: &PiecewiseAffineMVSystem, word: &[usize], points: Vec<Q>) -> Option<PeriodicOrbit> {
    let points: Vec<Q> = points.iter().map(|x| system.normalize(x)).collect();
    if minimal_period(&points) != points.len() {
        return None;
    }
    let itinerary: Vec<usize> = word.iter().map(|&l| system.pieces()[l].branch).collect();
    let pairs: Vec<(usize, Q)> = itinerary.iter().copied().zip(points).collect();
    let r = least_rotation(&pairs);
    let (itinerary, points) = rotate(&pairs, r).into_iter().unzip();
    Some(PeriodicOrbit { itinerary, points })
}

/// Whether a point sequence could also be produced by another piece word: some
/// point lies in two pieces of one branch, or at 0 = 1 on the circle.
fn ambiguous(system: &PiecewiseAffineMVSystem, points: &[Q]) -> bool {
    let pieces = system.pieces();
    points.iter().any(|x| {
        (system.metric() == Metric::Circle && (x.is_zero() || x.is_one()))
            || pieces.iter().enumerate().any(|(a, p)| {
                p.contains(x) && pieces[a + 1..].iter().any(|q| q.branch == p.branch && q.contains(x))
            })
    })
}

/// Every periodic orbit of period at most `max_period`, each once, sorted by
/// period and then canonical itinerary.
///
/// Orbits are identified by their point sequences up to rotation; when two
/// itineraries trace the same points (possible only where pieces of one branch
/// meet) the lexicographically least is kept.
pub fn enumerate_periodic_orbits(
    system: &PiecewiseAffineMVSystem,
    max_period: usize,
) -> Result<Vec<PeriodicOrbit>, CircleError> {
    let mut orbits = Vec::new();
    visit_periodic_orbits(system, max_period, |o| orbits.push(o))?;
    orbits.sort_by(|a, b| (a.period(), &a.itinerary, &a.points).cmp(&(b.period(), &b.itinerary, &b.points)));
    Ok(orbits)
}

/// Streams the orbits of [`enumerate_periodic_orbits`] in an unspecified but
/// deterministic order, without holding them all.
pub fn visit_periodic_orbits(
    system: &PiecewiseAffineMVSystem,
    max_period: usize,
    mut visit: impl FnMut(PeriodicOrbit),
) -> Result<(), CircleError> {
    if max_period > MAX_PERIOD_LIMIT {
        return Err(CircleError::PeriodTooLarge {
            requested: max_period,
            limit: MAX_PERIOD_LIMIT,
        });
    }
    let n_pieces = system.pieces().len();
    // Each first letter is an independent subtree.
    let per_letter: Vec<(Vec<PeriodicOrbit>, Vec<PeriodicOrbit>)> = (0..n_pieces)
        .into_par_iter()
        .map(|letter| {
            let mut plain = Vec::new();
            let mut shared = Vec::new();
            for_each_piece_cycle(system, max_period, Some(letter), |word, points| {
                let amb = ambiguous(system, &points);
                if let Some(o) = canonical(system, word, points) {
                    if amb {
                        shared.push(o);
                    } else {
                        plain.push(o);
                    }
                }
            });
            (plain, shared)
        })
        .collect();
    let mut shared_all = Vec::new();
    for (plain, shared) in per_letter {
        plain.into_iter().for_each(&mut visit);
        shared_all.extend(shared);
    }
    // Keep the least itinerary for each point cycle.
    shared_all.sort();
    let mut seen = BTreeSet::new();
    for o in shared_all {
        let r = least_rotation(&o.points);
        if seen.insert(rotate(&o.points, r)) {
            visit(o);
        }
    }
    Ok(())
}
