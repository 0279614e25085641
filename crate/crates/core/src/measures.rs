//! Invariant measures of finite multi-valued systems.
//!
//! A probability vector `mu` on states is invariant exactly when it is the common
//! marginal of some probability circulation on the graph, i.e. edge weights whose
//! out-flow and in-flow at every state both equal `mu`. Invariance is decided by a
//! transportation feasibility problem; extreme points come from simple cycles.

use std::collections::BTreeSet;

use crate::cycles::{simple_cycles, Cycle};
use crate::error::MeasureError;
use crate::flow::FlowNetwork;
use crate::lp::find_nonnegative_solution;
use crate::scalar::{format_rational, Rational, Scalar};
use crate::system::{FiniteMVSystem, StateId};

/// Probability weights on states.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct VertexMeasure<T>(pub Vec<T>);

/// Probability weights on edges (indexed by edge id) with equal marginals.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeCirculation<T>(pub Vec<T>);

fn sum<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, x| acc + x.clone())
}

fn is_probability<T: Scalar>(v: &[T]) -> bool {
    let total_ok = if T::EXACT {
        sum(v) == T::one()
    } else {
        (sum(v).to_f64() - 1.0).abs() <= 1e-12
    };
    total_ok && v.iter().all(|x| *x >= T::zero())
}

impl<T: Scalar> VertexMeasure<T> {
    pub fn new(values: Vec<T>) -> Result<Self, MeasureError> {
        if !is_probability(&values) {
            return Err(MeasureError::NotProbability);
        }
        Ok(Self(values))
    }

    pub fn dirac(n_states: usize, x: StateId) -> Self {
        let mut w = vec![T::zero(); n_states];
        w[x] = T::one();
        Self(w)
    }

    pub fn weights(&self) -> &[T] {
        &self.0
    }

    pub fn support(&self) -> BTreeSet<StateId> {
        (0..self.0.len()).filter(|&i| self.0[i] > T::zero()).collect()
    }

    /// `a * self + (1 - a) * other`.
    pub fn mix(&self, other: &Self, a: &T) -> Self {
        let b = T::one() - a.clone();
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(x, y)| a.clone() * x.clone() + b.clone() * y.clone())
                .collect(),
        )
    }

    /// `∫ f dμ`.
    pub fn integrate(&self, f: &[T]) -> T {
        self.0
            .iter()
            .zip(f)
            .fold(T::zero(), |acc, (w, v)| acc + w.clone() * v.clone())
    }
}

impl VertexMeasure<Rational> {
    /// Weights as `p/q` strings.
    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(format_rational).collect()
    }
}

impl<T: Scalar> EdgeCirculation<T> {
    /// Validates probability weights and flow conservation at every state.
    pub fn new(system: &FiniteMVSystem, values: Vec<T>) -> Result<Self, MeasureError> {
        if values.len() != system.n_edges() {
            return Err(MeasureError::LengthMismatch {
                expected: system.n_edges(),
                found: values.len(),
            });
        }
        if !is_probability(&values) {
            return Err(MeasureError::NotProbability);
        }
        let c = Self(values);
        let (out, inn) = c.marginals(system);
        let balanced = out.0.iter().zip(&inn.0).all(|(a, b)| balance_ok(a, b));
        if !balanced {
            return Err(MeasureError::NotProbability);
        }
        Ok(c)
    }

    pub fn weights(&self) -> &[T] {
        &self.0
    }

    /// `(tail marginal, head marginal)`.
    pub fn marginals(&self, system: &FiniteMVSystem) -> (VertexMeasure<T>, VertexMeasure<T>) {
        let n = system.n_states();
        let mut out = vec![T::zero(); n];
        let mut inn = vec![T::zero(); n];
        for (e, &(t, h)) in system.edges().iter().enumerate() {
            out[t] = out[t].clone() + self.0[e].clone();
            inn[h] = inn[h].clone() + self.0[e].clone();
        }
        (VertexMeasure(out), VertexMeasure(inn))
    }
}

/// Per-state mass balance: exact for rationals, 1e-9 for floats.
fn balance_ok<T: Scalar>(a: &T, b: &T) -> bool {
    if T::EXACT {
        a == b
    } else {
        (a.to_f64() - b.to_f64()).abs() <= 1e-9
    }
}

/// Free-function form of [`EdgeCirculation::marginals`].
pub fn marginals<T: Scalar>(
    c: &EdgeCirculation<T>,
    system: &FiniteMVSystem,
) -> (VertexMeasure<T>, VertexMeasure<T>) {
    c.marginals(system)
}

/// Decides whether `mu` is invariant, returning a witnessing circulation if so.
///
/// Solves a transportation problem from tails (supply `mu`) to heads (demand `mu`)
/// along the edges of the graph; `mu` is invariant iff all mass can be shipped.
pub fn is_invariant<T: Scalar>(
    system: &FiniteMVSystem,
    mu: &VertexMeasure<T>,
) -> Result<Option<EdgeCirculation<T>>, MeasureError> {
    let n = system.n_states();
    if mu.0.len() != n {
        return Err(MeasureError::LengthMismatch {
            expected: n,
            found: mu.0.len(),
        });
    }
    if !is_probability(&mu.0) {
        return Err(MeasureError::NotProbability);
    }
    // Nodes: source, tails 0..n, heads n..2n, sink.
    let source = 2 * n;
    let sink = 2 * n + 1;
    let mut net = FlowNetwork::new(2 * n + 2);
    for x in 0..n {
        net.add_arc(source, x, Some(mu.0[x].clone()));
        net.add_arc(n + x, sink, Some(mu.0[x].clone()));
    }
    let handles: Vec<usize> = system
        .edges()
        .iter()
        .map(|&(t, h)| net.add_arc(t, n + h, None))
        .collect();
    let shipped = net.max_flow(source, sink);
    let feasible = if T::EXACT {
        shipped == T::one()
    } else {
        (shipped.to_f64() - 1.0).abs() <= 1e-9 * n.max(1) as f64
    };
    if !feasible {
        return Ok(None);
    }
    let weights = handles.into_iter().map(|h| net.flow(h)).collect();
    Ok(Some(EdgeCirculation(weights)))
}

/// Uniform measure on a cycle's states together with its circulation.
pub fn cycle_measure<T: Scalar>(
    system: &FiniteMVSystem,
    cycle: &Cycle,
) -> (VertexMeasure<T>, EdgeCirculation<T>) {
    let k = T::from_int(cycle.len() as i64);
    let share = T::one() / k;
    let mut vertex = vec![T::zero(); system.n_states()];
    for &x in cycle.states() {
        vertex[x] = share.clone();
    }
    let mut edges = vec![T::zero(); system.n_edges()];
    for e in cycle.edge_ids(system) {
        edges[e] = share.clone();
    }
    (VertexMeasure(vertex), EdgeCirculation(edges))
}

/// Uniform probability on a set of states.
pub(crate) fn uniform_on<T: Scalar>(n_states: usize, states: &BTreeSet<StateId>) -> VertexMeasure<T> {
    let share = T::one() / T::from_int(states.len() as i64);
    let mut w = vec![T::zero(); n_states];
    for &x in states {
        w[x] = share.clone();
    }
    VertexMeasure(w)
}

/// The extreme points of the set of invariant measures, sorted lexicographically.
///
/// Every extreme point is the uniform measure on some simple cycle; candidates that
/// are convex combinations of the remaining candidates are discarded using an exact
/// feasibility test.
pub fn extreme_invariant_measures(system: &FiniteMVSystem) -> Vec<VertexMeasure<Rational>> {
    let supports: BTreeSet<BTreeSet<StateId>> = simple_cycles(system)
        .iter()
        .map(|c| c.states().iter().copied().collect())
        .collect();
    let candidates: Vec<VertexMeasure<Rational>> = supports
        .iter()
        .map(|s| uniform_on(system.n_states(), s))
        .collect();
    let mut out: Vec<_> = (0..candidates.len())
        .filter(|&i| !is_convex_combination_of_others(&candidates, i))
        .map(|i| candidates[i].clone())
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).expect("rationals are totally ordered"));
    out
}

/// Whether `points[i]` lies in the convex hull of the other points.
pub fn is_convex_combination_of_others(points: &[VertexMeasure<Rational>], i: usize) -> bool {
    let target = &points[i];
    // Only points supported inside the target's support can contribute.
    let support = target.support();
    let others: Vec<&VertexMeasure<Rational>> = points
        .iter()
        .enumerate()
        .filter(|&(j, p)| j != i && p.support().is_subset(&support))
        .map(|(_, p)| p)
        .collect();
    if others.is_empty() {
        return false;
    }
    let dim = target.0.len();
    let mut a: Vec<Vec<Rational>> = (0..dim)
        .map(|r| others.iter().map(|p| p.0[r].clone()).collect())
        .collect();
    a.push(vec![Rational::from_int(1); others.len()]);
    let mut b = target.0.clone();
    b.push(Rational::from_int(1));
    find_nonnegative_solution(&a, &b).is_some()
}
