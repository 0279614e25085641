//! Finite multi-valued systems.
//!
//! A system on states `0..n` is stored as its graph: the set of pairs `(x, y)` with
//! `y ∈ T(x)`. Edges are kept sorted by `(tail, head)`, and an edge's position in
//! that order is its [`EdgeId`].

use std::collections::BTreeSet;

use crate::error::SystemError;

pub type StateId = usize;

/// Position of an edge in the canonical `(tail, head)` ordering.
pub type EdgeId = usize;

/// A set of states.
pub type StateSet = BTreeSet<StateId>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMVSystem {
    n_states: usize,
    edges: Vec<(StateId, StateId)>,
    out_edges: Vec<Vec<EdgeId>>,
    in_edges: Vec<Vec<EdgeId>>,
}

impl FiniteMVSystem {
    /// Builds a system, sorting the edges into canonical order.
    /// Duplicate or out-of-range edges are rejected.
    pub fn new(
        n_states: usize,
        edges: impl IntoIterator<Item = (StateId, StateId)>,
    ) -> Result<Self, SystemError> {
        if n_states == 0 {
            return Err(SystemError::NoStates);
        }
        let mut edges: Vec<_> = edges.into_iter().collect();
        for &(tail, head) in &edges {
            if tail >= n_states || head >= n_states {
                return Err(SystemError::StateOutOfRange {
                    tail,
                    head,
                    n_states,
                });
            }
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(SystemError::DuplicateEdge {
                tail: w[0].0,
                head: w[0].1,
            });
        }
        Ok(Self::from_sorted(n_states, edges))
    }

    fn from_sorted(n_states: usize, edges: Vec<(StateId, StateId)>) -> Self {
        let mut out_edges = vec![Vec::new(); n_states];
        let mut in_edges = vec![Vec::new(); n_states];
        for (id, &(tail, head)) in edges.iter().enumerate() {
            out_edges[tail].push(id);
            in_edges[head].push(id);
        }
        Self {
            n_states,
            edges,
            out_edges,
            in_edges,
        }
    }

    /// The identity relation `T(x) = {x}`.
    pub fn identity(n_states: usize) -> Result<Self, SystemError> {
        Self::new(n_states, (0..n_states).map(|i| (i, i)))
    }

    /// `Z/4Z` with `T(x) = {x + 1, x - 1}`.
    pub fn z4() -> Self {
        Self::cyclic_neighbors(4)
    }

    /// `Z/nZ` with `T(x) = {x + 1, x - 1}`, for `n >= 3`.
    pub fn cyclic_neighbors(n: usize) -> Self {
        assert!(n >= 3, "need at least three states for distinct neighbours");
        Self::new(n, (0..n).flat_map(|x| [(x, (x + 1) % n), (x, (x + n - 1) % n)]))
            .expect("valid by construction")
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(StateId, StateId)] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> (StateId, StateId) {
        self.edges[id]
    }

    pub fn edge_id(&self, tail: StateId, head: StateId) -> Option<EdgeId> {
        self.edges.binary_search(&(tail, head)).ok()
    }

    pub fn has_edge(&self, tail: StateId, head: StateId) -> bool {
        self.edge_id(tail, head).is_some()
    }

    pub fn out_edges(&self, x: StateId) -> &[EdgeId] {
        &self.out_edges[x]
    }

    pub fn in_edges(&self, x: StateId) -> &[EdgeId] {
        &self.in_edges[x]
    }

    /// `T(x)`, in increasing order.
    pub fn successors(&self, x: StateId) -> impl Iterator<Item = StateId> + '_ {
        self.out_edges[x].iter().map(move |&e| self.edges[e].1)
    }

    /// `T^{-1}(x)`, in increasing order.
    pub fn predecessors(&self, x: StateId) -> impl Iterator<Item = StateId> + '_ {
        self.in_edges[x].iter().map(move |&e| self.edges[e].0)
    }

    /// `true` when every state has exactly one successor.
    pub fn is_single_valued(&self) -> bool {
        self.out_edges.iter().all(|o| o.len() == 1)
    }

    /// The subsystem keeping only edges for which `keep` returns true.
    pub fn filter_edges(&self, mut keep: impl FnMut(EdgeId) -> bool) -> Self {
        let edges = (0..self.edges.len())
            .filter(|&e| keep(e))
            .map(|e| self.edges[e])
            .collect();
        Self::from_sorted(self.n_states, edges)
    }

    /// The inverse correspondence: every edge reversed.
    pub fn inverse(&self) -> Self {
        let mut edges: Vec<_> = self.edges.iter().map(|&(t, h)| (h, t)).collect();
        edges.sort_unstable();
        Self::from_sorted(self.n_states, edges)
    }

    /// `T^n(A)`; negative `n` iterates the inverse.
    pub fn iterate_image(&self, set: &StateSet, n: i64) -> StateSet {
        let mut current = set.clone();
        for _ in 0..n.unsigned_abs() {
            let mut next = StateSet::new();
            for &x in &current {
                if n >= 0 {
                    next.extend(self.successors(x));
                } else {
                    next.extend(self.predecessors(x));
                }
            }
            if next == current {
                break;
            }
            current = next;
        }
        current
    }

    /// States lying on some bi-infinite orbit.
    ///
    /// Repeatedly deletes states with no remaining successor or no remaining
    /// predecessor. The result is empty exactly when the orbit space is empty.
    pub fn eventual_domain(&self) -> StateSet {
        let n = self.n_states;
        let mut alive = vec![true; n];
        let mut out_deg: Vec<usize> = self.out_edges.iter().map(Vec::len).collect();
        let mut in_deg: Vec<usize> = self.in_edges.iter().map(Vec::len).collect();
        let mut queue: Vec<StateId> = (0..n).filter(|&x| out_deg[x] == 0 || in_deg[x] == 0).collect();
        for &x in &queue {
            alive[x] = false;
        }
        while let Some(x) = queue.pop() {
            for &e in &self.out_edges[x] {
                let y = self.edges[e].1;
                in_deg[y] -= 1;
                if alive[y] && in_deg[y] == 0 {
                    alive[y] = false;
                    queue.push(y);
                }
            }
            for &e in &self.in_edges[x] {
                let w = self.edges[e].0;
                out_deg[w] -= 1;
                if alive[w] && out_deg[w] == 0 {
                    alive[w] = false;
                    queue.push(w);
                }
            }
        }
        (0..n).filter(|&x| alive[x]).collect()
    }

    /// Whether the orbit space is non-empty, i.e. the graph has a directed cycle.
    pub fn orbit_space_nonempty(&self) -> bool {
        !self.eventual_domain().is_empty()
    }

    /// The graph system: states are edges of `self`, and `e1 -> e2` whenever
    /// `head(e1) = tail(e2)`.
    pub fn graph_system(&self) -> Self {
        let mut edges = Vec::new();
        for (e1, &(_, head)) in self.edges.iter().enumerate() {
            for &e2 in &self.out_edges[head] {
                edges.push((e1, e2));
            }
        }
        // Already sorted: e1 ascending, e2 ascending within out_edges.
        Self::from_sorted(self.edges.len().max(1), edges)
    }

    /// The system restricted to a subset of states, re-indexed densely.
    /// Returns the subsystem and the map from new to old state ids.
    pub fn restrict(&self, states: &StateSet) -> Option<(Self, Vec<StateId>)> {
        if states.is_empty() {
            return None;
        }
        let old: Vec<StateId> = states.iter().copied().collect();
        let mut new_of = vec![usize::MAX; self.n_states];
        for (i, &x) in old.iter().enumerate() {
            new_of[x] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(t, h)| new_of[t] != usize::MAX && new_of[h] != usize::MAX)
            .map(|&(t, h)| (new_of[t], new_of[h]))
            .collect::<Vec<_>>();
        Some((Self::new(old.len(), edges).expect("subset of a valid system"), old))
    }
}

/// Real-valued function on states.
#[derive(Clone, Debug, PartialEq)]
pub struct StateFunction<T>(pub Vec<T>);

/// Real-valued function on the edges of a system, indexed by [`EdgeId`].
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeFunction<T>(pub Vec<T>);

impl<T: Clone> StateFunction<T> {
    pub fn new(system: &FiniteMVSystem, values: Vec<T>) -> Result<Self, SystemError> {
        if values.len() != system.n_states() {
            return Err(SystemError::LengthMismatch {
                expected: system.n_states(),
                found: values.len(),
            });
        }
        Ok(Self(values))
    }

    pub fn constant(n_states: usize, c: T) -> Self {
        Self(vec![c; n_states])
    }

    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn get(&self, x: StateId) -> &T {
        &self.0[x]
    }

    /// `f̂(x, y) = f(x)`.
    pub fn lift(&self, system: &FiniteMVSystem) -> EdgeFunction<T> {
        EdgeFunction(system.edges().iter().map(|&(t, _)| self.0[t].clone()).collect())
    }
}

impl<T: Clone> EdgeFunction<T> {
    pub fn new(system: &FiniteMVSystem, values: Vec<T>) -> Result<Self, SystemError> {
        if values.len() != system.n_edges() {
            return Err(SystemError::LengthMismatch {
                expected: system.n_edges(),
                found: values.len(),
            });
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn get(&self, e: EdgeId) -> &T {
        &self.0[e]
    }

    /// Reinterprets an edge function as a state function on the graph system.
    pub fn as_graph_state_function(&self) -> StateFunction<T> {
        StateFunction(self.0.clone())
    }
}

/// Free-function form of [`StateFunction::lift`].
pub fn lift_function<T: Clone>(f: &StateFunction<T>, system: &FiniteMVSystem) -> EdgeFunction<T> {
    f.lift(system)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[usize]) -> StateSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(
            FiniteMVSystem::new(2, [(0, 2)]),
            Err(SystemError::StateOutOfRange {
                tail: 0,
                head: 2,
                n_states: 2
            })
        );
        assert_eq!(
            FiniteMVSystem::new(2, [(0, 1), (0, 1)]),
            Err(SystemError::DuplicateEdge { tail: 0, head: 1 })
        );
        assert_eq!(FiniteMVSystem::new(0, []), Err(SystemError::NoStates));
    }

    #[test]
    fn edges_are_canonically_ordered() {
        let s = FiniteMVSystem::new(3, [(2, 0), (0, 2), (0, 1), (1, 1)]).unwrap();
        assert_eq!(s.edges(), &[(0, 1), (0, 2), (1, 1), (2, 0)]);
        assert_eq!(s.edge_id(1, 1), Some(2));
        assert_eq!(s.edge_id(1, 0), None);
    }

    #[test]
    fn inverse_examples() {
        let z4 = FiniteMVSystem::z4();
        assert_eq!(z4.inverse(), z4);
        let id = FiniteMVSystem::identity(3).unwrap();
        assert_eq!(id.inverse(), id);
        let s = FiniteMVSystem::new(2, [(0, 1)]).unwrap();
        assert_eq!(s.inverse().edges(), &[(1, 0)]);
    }

    #[test]
    fn iterate_image_examples() {
        let id = FiniteMVSystem::identity(4).unwrap();
        for n in [-3, 0, 1, 5] {
            assert_eq!(id.iterate_image(&set(&[1, 3]), n), set(&[1, 3]));
        }
        let z4 = FiniteMVSystem::z4();
        assert_eq!(z4.iterate_image(&set(&[0]), 1), set(&[1, 3]));
        assert_eq!(z4.iterate_image(&set(&[0]), 2), set(&[0, 2]));
        assert_eq!(z4.iterate_image(&set(&[0]), -1), set(&[1, 3]));
        let chain = FiniteMVSystem::new(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(chain.iterate_image(&set(&[0]), 2), set(&[2]));
        assert_eq!(chain.iterate_image(&set(&[0]), 3), set(&[]));
        assert_eq!(chain.iterate_image(&set(&[2]), -2), set(&[0]));
    }

    #[test]
    fn eventual_domain_examples() {
        assert_eq!(FiniteMVSystem::identity(3).unwrap().eventual_domain(), set(&[0, 1, 2]));
        assert_eq!(FiniteMVSystem::new(2, [(0, 1)]).unwrap().eventual_domain(), set(&[]));
        let s = FiniteMVSystem::new(3, [(0, 1), (1, 0), (2, 0)]).unwrap();
        assert_eq!(s.eventual_domain(), set(&[0, 1]));
        // A tail hanging off the cycle in the forward direction is pruned too.
        let s = FiniteMVSystem::new(3, [(0, 0), (0, 1), (1, 2)]).unwrap();
        assert_eq!(s.eventual_domain(), set(&[0]));
    }

    #[test]
    fn orbit_space_examples() {
        assert!(FiniteMVSystem::new(3, [(0, 1), (2, 2)]).unwrap().orbit_space_nonempty());
        assert!(!FiniteMVSystem::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap().orbit_space_nonempty());
        assert!(FiniteMVSystem::z4().orbit_space_nonempty());
    }

    #[test]
    fn graph_system_examples() {
        let loop0 = FiniteMVSystem::new(1, [(0, 0)]).unwrap();
        assert_eq!(loop0.graph_system(), loop0);

        let two = FiniteMVSystem::new(2, [(0, 1), (1, 0)]).unwrap();
        let g = two.graph_system();
        assert_eq!(g.n_states(), 2);
        assert_eq!(g.edges(), &[(0, 1), (1, 0)]);

        let z4 = FiniteMVSystem::z4();
        let g = z4.graph_system();
        assert_eq!(g.n_states(), 8);
        assert_eq!(g.n_edges(), 16);
        for e in 0..8 {
            assert_eq!(g.out_edges(e).len(), 2);
        }
    }

    #[test]
    fn lift_examples() {
        let z4 = FiniteMVSystem::z4();
        let c = StateFunction::constant(4, 7i64);
        assert!(c.lift(&z4).values().iter().all(|&v| v == 7));

        let ind = StateFunction(vec![1i64, 0, 0, 0]);
        let lifted = lift_function(&ind, &z4);
        let ones: Vec<_> = (0..z4.n_edges())
            .filter(|&e| lifted.values()[e] == 1)
            .map(|e| z4.edge(e))
            .collect();
        assert_eq!(ones, vec![(0, 1), (0, 3)]);

        let s = FiniteMVSystem::new(3, [(0, 0), (0, 1), (0, 2), (1, 2)]).unwrap();
        let f = StateFunction(vec![3i64, 5, 11]);
        let lf = f.lift(&s);
        for x in 0..3 {
            let sum: i64 = s.out_edges(x).iter().map(|&e| lf.values()[e]).sum();
            assert_eq!(sum, s.out_edges(x).len() as i64 * f.values()[x]);
        }
    }

    #[test]
    fn restrict_reindexes() {
        let s = FiniteMVSystem::new(3, [(0, 1), (1, 0), (2, 0)]).unwrap();
        let (sub, map) = s.restrict(&s.eventual_domain()).unwrap();
        assert_eq!(map, vec![0, 1]);
        assert_eq!(sub.edges(), &[(0, 1), (1, 0)]);
    }
}
