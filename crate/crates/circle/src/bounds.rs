//! Two-sided bounds on the maximum ergodic average.
//!
//! The lower bound is the best average over periodic orbits. The upper bound
//! runs the maximum cycle mean on an outer grid: cell `a` goes to cell `b` when
//! some branch image of the closed cell `a` meets the closed cell `b`, so the
//! cells visited by any true orbit form a grid cycle. `f` is sampled at cell
//! centres and a margin `L/N · λ/(λ-1)` covers the sampling error.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use mvdyn_core::mea::{max_cycle_mean_value, max_mean_cycle};
use mvdyn_core::subaction::subaction_with_beta;
use mvdyn_core::{EdgeFunction, FiniteMVSystem};

use crate::error::CircleError;
use crate::observable::Observable;
use crate::orbits::{barycentre, enumerate_periodic_orbits, visit_periodic_orbits, PeriodicOrbit};
use crate::system::{Metric, PiecewiseAffineMVSystem, Q};

/// Smallest grid accepted by [`beta_upper`].
pub const MIN_GRID: usize = 8;

/// What the lower bound needs from a periodic orbit.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitSummary {
    pub itinerary: Vec<usize>,
    pub points: Vec<f64>,
    pub barycentre: Complex64,
}

impl OrbitSummary {
    pub fn period(&self) -> usize {
        self.points.len()
    }

    fn of(o: &PeriodicOrbit) -> Self {
        let points = o.points_f64();
        let barycentre = barycentre(&points);
        Self {
            itinerary: o.itinerary.clone(),
            points,
            barycentre,
        }
    }
}

/// All periodic orbits up to a period, kept in floating point and sorted by
/// `(period, itinerary)`.
#[derive(Clone, Debug)]
pub struct OrbitTable {
    orbits: Vec<OrbitSummary>,
}

impl OrbitTable {
    pub fn new(system: &PiecewiseAffineMVSystem, max_period: usize) -> Result<Self, CircleError> {
        let mut orbits = Vec::new();
        visit_periodic_orbits(system, max_period, |o| orbits.push(OrbitSummary::of(&o)))?;
        orbits.sort_by(|a, b| {
            (a.period(), &a.itinerary)
                .cmp(&(b.period(), &b.itinerary))
                .then_with(|| {
                    a.points
                        .iter()
                        .zip(&b.points)
                        .map(|(x, y)| x.total_cmp(y))
                        .find(|o| *o != Ordering::Equal)
                        .unwrap_or(Ordering::Equal)
                })
        });
        Ok(Self { orbits })
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn orbits(&self) -> &[OrbitSummary] {
        &self.orbits
    }

    /// Best orbit average; the first orbit in table order wins ties.
    pub fn best(&self, f: &Observable) -> Option<(f64, &OrbitSummary)> {
        let mut best: Option<(f64, &OrbitSummary)> = None;
        for o in &self.orbits {
            let v = f.average_from(&o.points, o.barycentre);
            if best.is_none_or(|(b, _)| v > b) {
                best = Some((v, o));
            }
        }
        best
    }
}

/// Largest orbit average over periodic orbits of period at most `max_period`,
/// with the orbit attaining it.
pub fn beta_lower(
    system: &PiecewiseAffineMVSystem,
    f: &Observable,
    max_period: usize,
) -> Result<(f64, PeriodicOrbit), CircleError> {
    let orbits = enumerate_periodic_orbits(system, max_period)?;
    let mut best: Option<(f64, PeriodicOrbit)> = None;
    for o in orbits {
        let v = f.orbit_average(&o);
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, o));
        }
    }
    best.ok_or(CircleError::NoOrbit)
}

fn to_usize_clamped(x: &Q, n: usize) -> usize {
    x.to_integer().to_i64().unwrap_or(0).clamp(0, n as i64 - 1) as usize
}

/// Finite system on the cells `[a/N, (a+1)/N]` whose edges cover every branch.
#[derive(Clone, Debug)]
pub struct OuterGrid {
    n: usize,
    lambda: f64,
    metric: Metric,
    system: FiniteMVSystem,
}

impl OuterGrid {
    pub fn new(system: &PiecewiseAffineMVSystem, n: usize) -> Result<Self, CircleError> {
        if n < MIN_GRID {
            return Err(CircleError::GridTooSmall(n));
        }
        let nq = Q::from_integer(n.into());
        let circle = system.metric() == Metric::Circle;
        let mut edges = BTreeSet::new();
        let add_image = |a: usize, lo: &Q, hi: &Q, edges: &mut BTreeSet<(usize, usize)>| {
            // b/N <= hi and (b+1)/N >= lo.
            let first = (lo * &nq).ceil() - Q::one();
            let last = (hi * &nq).floor();
            if last.is_negative() || first >= nq {
                return;
            }
            for b in to_usize_clamped(&first, n)..=to_usize_clamped(&last, n) {
                edges.insert((a, b));
            }
            if circle {
                if lo.is_zero() {
                    edges.insert((a, n - 1));
                }
                if hi.is_one() {
                    edges.insert((a, 0));
                }
            }
        };
        for a in 0..n {
            let left = Q::new((a as i64).into(), (n as i64).into());
            let right = Q::new((a as i64 + 1).into(), (n as i64).into());
            for piece in system.pieces() {
                if let Some((lo, hi)) = piece.image(&left, &right) {
                    add_image(a, &lo, &hi, &mut edges);
                }
                if circle {
                    // The first and last cells share the point 0 = 1.
                    let shared = if a == 0 {
                        Some(Q::one())
                    } else if a == n - 1 {
                        Some(Q::zero())
                    } else {
                        None
                    };
                    if let Some(x) = shared {
                        if let Some((lo, hi)) = piece.image(&x, &x) {
                            add_image(a, &lo, &hi, &mut edges);
                        }
                    }
                }
            }
        }
        let system_out = FiniteMVSystem::new(n, edges).expect("grid edges are in range and distinct");
        Ok(Self {
            n,
            lambda: system.min_expansion().to_f64().unwrap_or(f64::NAN),
            metric: system.metric(),
            system: system_out,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn system(&self) -> &FiniteMVSystem {
        &self.system
    }

    pub fn centre(&self, a: usize) -> f64 {
        (a as f64 + 0.5) / self.n as f64
    }

    /// `f` at the centre of each edge's tail cell.
    pub fn weights(&self, f: &Observable) -> EdgeFunction<f64> {
        let values: Vec<f64> = (0..self.n).map(|a| f.eval(self.centre(a))).collect();
        EdgeFunction(self.system.edges().iter().map(|&(t, _)| values[t]).collect())
    }

    pub fn margin(&self, lipschitz: f64) -> f64 {
        lipschitz / self.n as f64 * self.lambda / (self.lambda - 1.0)
    }

    /// Grid maximum cycle mean plus the margin.
    pub fn upper_bound(&self, f: &Observable) -> Result<f64, CircleError> {
        let lip = f.lipschitz().ok_or_else(|| CircleError::MissingLipschitz(f.name()))?;
        let alpha = max_cycle_mean_value(&self.system, &self.weights(f))
            .expect("weights match the grid")
            .ok_or(CircleError::NoOrbit)?;
        Ok(alpha + self.margin(lip))
    }

    /// Distance from cell `a` to the point `x`.
    pub fn cell_distance(&self, a: usize, x: &Q) -> Q {
        let n = Q::from_integer((self.n as i64).into());
        let lo = Q::from_integer((a as i64).into()) / &n;
        let hi = Q::from_integer((a as i64 + 1).into()) / &n;
        let to = |x: &Q| {
            if *x < lo {
                &lo - x
            } else if *x > hi {
                x - &hi
            } else {
                Q::zero()
            }
        };
        match self.metric {
            Metric::Interval => to(x),
            Metric::Circle => [x - Q::one(), x.clone(), x + Q::one()]
                .iter()
                .map(to)
                .min()
                .expect("three candidates"),
        }
    }
}

/// Rigorous upper bound for `β(system, f)` from an outer grid of `grid_n` cells.
pub fn beta_upper(system: &PiecewiseAffineMVSystem, f: &Observable, grid_n: usize) -> Result<f64, CircleError> {
    if f.lipschitz().is_none() {
        return Err(CircleError::MissingLipschitz(f.name()));
    }
    OuterGrid::new(system, grid_n)?.upper_bound(f)
}

/// Subaction on the outer grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridMane {
    pub beta: f64,
    pub min_slack: f64,
    pub tight_edges: usize,
    /// Largest distance from the tail cell of a tight edge to the nearest
    /// given orbit point.
    pub max_tight_distance: Q,
}

/// Runs the subaction on the grid system for `f` sampled at cell centres and
/// measures how far tight edges stray from `orbit_points`.
pub fn grid_mane(
    system: &PiecewiseAffineMVSystem,
    f: &Observable,
    grid_n: usize,
    orbit_points: &[Q],
    tol: f64,
) -> Result<GridMane, String> {
    let grid = OuterGrid::new(system, grid_n).map_err(|e| e.to_string())?;
    let w = grid.weights(f);
    let (beta, _) = max_mean_cycle(grid.system(), &w).map_err(|e| e.to_string())?;
    let result = subaction_with_beta(grid.system(), &w, &beta, &tol).map_err(|e| e.to_string())?;
    let mut max_tight_distance = Q::zero();
    let mut tight_edges = 0;
    for (e, &(t, _)) in grid.system().edges().iter().enumerate() {
        if result.tight[e] {
            tight_edges += 1;
            let d = orbit_points
                .iter()
                .map(|x| grid.cell_distance(t, x))
                .min()
                .unwrap_or_else(Q::one);
            if d > max_tight_distance {
                max_tight_distance = d;
            }
        }
    }
    Ok(GridMane {
        beta,
        min_slack: result.min_slack().copied().unwrap_or(0.0),
        tight_edges,
        max_tight_distance,
    })
}
