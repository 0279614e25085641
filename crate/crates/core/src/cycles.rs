//! Simple directed cycles and their enumeration (Johnson's algorithm).

use std::collections::VecDeque;
use std::fmt;

use crate::scalar::Scalar;
use crate::system::{EdgeFunction, EdgeId, FiniteMVSystem, StateFunction, StateId};

/// A simple directed cycle, stored rotated so that its smallest state comes first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cycle {
    states: Vec<StateId>,
}

impl Cycle {
    /// Validates that `states` is a simple cycle of `system` and canonicalizes it.
    pub fn new(system: &FiniteMVSystem, states: Vec<StateId>) -> Option<Self> {
        if states.is_empty() {
            return None;
        }
        let mut seen = vec![false; system.n_states()];
        for &x in &states {
            if x >= system.n_states() || seen[x] {
                return None;
            }
            seen[x] = true;
        }
        let k = states.len();
        if (0..k).any(|i| !system.has_edge(states[i], states[(i + 1) % k])) {
            return None;
        }
        Some(Self::canonical(states))
    }

    fn canonical(mut states: Vec<StateId>) -> Self {
        let start = states
            .iter()
            .enumerate()
            .min_by_key(|&(_, &x)| x)
            .map(|(i, _)| i)
            .unwrap_or(0);
        states.rotate_left(start);
        Self { states }
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Edge ids along the cycle, starting with the edge out of `states()[0]`.
    pub fn edge_ids(&self, system: &FiniteMVSystem) -> Vec<EdgeId> {
        let k = self.states.len();
        (0..k)
            .map(|i| {
                system
                    .edge_id(self.states[i], self.states[(i + 1) % k])
                    .expect("cycle edges belong to the system")
            })
            .collect()
    }

    /// Mean of an edge function around the cycle.
    pub fn edge_mean<T: Scalar>(&self, system: &FiniteMVSystem, w: &EdgeFunction<T>) -> T {
        let sum = self
            .edge_ids(system)
            .into_iter()
            .fold(T::zero(), |acc, e| acc + w.get(e).clone());
        sum / T::from_int(self.len() as i64)
    }

    /// Mean of a state function over the cycle's states.
    pub fn state_mean<T: Scalar>(&self, f: &StateFunction<T>) -> T {
        let sum = self.states.iter().fold(T::zero(), |acc, &x| acc + f.get(x).clone());
        sum / T::from_int(self.len() as i64)
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in &self.states {
            write!(f, "{x}->")?;
        }
        write!(f, "{}", self.states[0])
    }
}

/// All simple cycles of `system`, sorted by `(length, states)`.
pub fn simple_cycles(system: &FiniteMVSystem) -> Vec<Cycle> {
    let mut out = Vec::new();
    for_each_simple_cycle(system, |c| out.push(Cycle::canonical(c.to_vec())));
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.states.cmp(&b.states)));
    out
}

/// Calls `visit` once per simple cycle, each given starting at its smallest state.
pub fn for_each_simple_cycle(system: &FiniteMVSystem, mut visit: impl FnMut(&[StateId])) {
    let n = system.n_states();
    let adj: Vec<Vec<StateId>> = (0..n).map(|x| system.successors(x).collect()).collect();
    let radj: Vec<Vec<StateId>> = (0..n).map(|x| system.predecessors(x).collect()).collect();

    let mut blocked = vec![false; n];
    let mut block_map: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for s in 0..n {
        // Component of s in the subgraph on states >= s.
        let fwd = reach(&adj, s);
        let bwd = reach(&radj, s);
        let in_comp: Vec<bool> = (0..n).map(|v| fwd[v] && bwd[v]).collect();
        if !adj[s].iter().any(|&w| w >= s && in_comp[w]) {
            continue;
        }
        for v in s..n {
            blocked[v] = false;
            block_map[v].clear();
        }
        johnson_circuits(s, &adj, &in_comp, &mut blocked, &mut block_map, &mut visit);
    }

    fn reach(adj: &[Vec<StateId>], s: StateId) -> Vec<bool> {
        let mut seen = vec![false; adj.len()];
        let mut queue = VecDeque::from([s]);
        seen[s] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if w >= s && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }
}

fn johnson_circuits(
    s: StateId,
    adj: &[Vec<StateId>],
    in_comp: &[bool],
    blocked: &mut [bool],
    block_map: &mut [Vec<StateId>],
    visit: &mut impl FnMut(&[StateId]),
) {
    fn unblock(v: StateId, blocked: &mut [bool], block_map: &mut [Vec<StateId>]) {
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            if blocked[u] {
                blocked[u] = false;
                stack.append(&mut block_map[u]);
            }
        }
    }

    let neighbours = |v: StateId| -> Vec<StateId> {
        adj[v]
            .iter()
            .copied()
            .filter(|&w| w >= s && in_comp[w])
            .collect()
    };

    // Iterative CIRCUIT(v): (vertex, remaining neighbours, found-a-circuit flag).
    let mut path = vec![s];
    blocked[s] = true;
    let mut stack: Vec<(StateId, Vec<StateId>, bool)> = vec![(s, neighbours(s), false)];
    while let Some(top) = stack.last_mut() {
        if let Some(w) = top.1.pop() {
            if w == s {
                visit(&path);
                top.2 = true;
            } else if !blocked[w] {
                path.push(w);
                blocked[w] = true;
                let nb = neighbours(w);
                stack.push((w, nb, false));
            }
        } else {
            let (v, _, found) = stack.pop().expect("non-empty");
            if found {
                unblock(v, blocked, block_map);
            } else {
                for w in neighbours(v) {
                    if !block_map[w].contains(&v) {
                        block_map[w].push(v);
                    }
                }
            }
            path.pop();
            if let Some(parent) = stack.last_mut() {
                parent.2 |= found;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: DFS over all simple paths from each minimal start.
    fn brute_cycles(system: &FiniteMVSystem) -> Vec<Vec<usize>> {
        fn dfs(
            s: usize,
            v: usize,
            sys: &FiniteMVSystem,
            path: &mut Vec<usize>,
            on: &mut Vec<bool>,
            out: &mut Vec<Vec<usize>>,
        ) {
            for w in sys.successors(v).collect::<Vec<_>>() {
                if w == s {
                    out.push(path.clone());
                } else if w > s && !on[w] {
                    on[w] = true;
                    path.push(w);
                    dfs(s, w, sys, path, on, out);
                    path.pop();
                    on[w] = false;
                }
            }
        }
        let mut out = Vec::new();
        for s in 0..system.n_states() {
            let mut on = vec![false; system.n_states()];
            on[s] = true;
            dfs(s, s, system, &mut vec![s], &mut on, &mut out);
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }

    #[test]
    fn z4_has_six_cycles() {
        let cycles = simple_cycles(&FiniteMVSystem::z4());
        let states: Vec<_> = cycles.iter().map(|c| c.states().to_vec()).collect();
        assert_eq!(
            states,
            vec![
                vec![0, 1],
                vec![0, 3],
                vec![1, 2],
                vec![2, 3],
                vec![0, 1, 2, 3],
                vec![0, 3, 2, 1]
            ]
        );
    }

    #[test]
    fn complete_digraph_count() {
        // Complete digraph with loops on 5 vertices: sum_k C(5,k)(k-1)! = 5+10+20+30+24.
        let n = 5;
        let s = FiniteMVSystem::new(n, (0..n).flat_map(|i| (0..n).map(move |j| (i, j)))).unwrap();
        assert_eq!(simple_cycles(&s).len(), 89);
    }

    #[test]
    fn matches_brute_force_on_small_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..=7);
            let p: f64 = rng.gen_range(0.1..0.7);
            let edges: Vec<_> = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|_| rng.gen_bool(p))
                .collect();
            let s = FiniteMVSystem::new(n, edges).unwrap();
            let ours: Vec<_> = simple_cycles(&s).into_iter().map(|c| c.states().to_vec()).collect();
            assert_eq!(ours, brute_cycles(&s));
        }
    }

    #[test]
    fn cycle_validation() {
        let z4 = FiniteMVSystem::z4();
        assert!(Cycle::new(&z4, vec![2, 1]).is_some());
        assert_eq!(Cycle::new(&z4, vec![2, 3, 0, 1]).unwrap().states(), &[0, 1, 2, 3]);
        assert!(Cycle::new(&z4, vec![0, 2]).is_none());
        assert!(Cycle::new(&z4, vec![0, 1, 0, 1]).is_none());
        assert!(Cycle::new(&z4, vec![]).is_none());
        assert_eq!(Cycle::new(&z4, vec![0, 1]).unwrap().to_string(), "0->1->0");
    }
}
