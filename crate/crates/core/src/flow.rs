//! Edmonds–Karp maximum flow over a [`Scalar`] field.
//!
//! Capacities may be infinite (`None`). Shortest augmenting paths guarantee
//! termination for rational capacities.

use std::collections::VecDeque;

use crate::scalar::Scalar;

#[derive(Clone, Debug)]
struct Arc<T> {
    to: usize,
    /// Residual capacity; `None` is unbounded.
    residual: Option<T>,
    rev: usize,
}

#[derive(Clone, Debug)]
pub struct FlowNetwork<T> {
    arcs: Vec<Vec<Arc<T>>>,
    /// (node, arc index) for each added arc.
    handles: Vec<(usize, usize)>,
}

impl<T: Scalar> FlowNetwork<T> {
    pub fn new(n_nodes: usize) -> Self {
        Self {
            arcs: vec![Vec::new(); n_nodes],
            handles: Vec::new(),
        }
    }

    /// Adds an arc and returns its handle.
    pub fn add_arc(&mut self, from: usize, to: usize, capacity: Option<T>) -> usize {
        let fwd_idx = self.arcs[from].len();
        let rev_idx = self.arcs[to].len() + usize::from(from == to);
        self.arcs[from].push(Arc {
            to,
            residual: capacity,
            rev: rev_idx,
        });
        self.arcs[to].push(Arc {
            to: from,
            residual: Some(T::zero()),
            rev: fwd_idx,
        });
        self.handles.push((from, fwd_idx));
        self.handles.len() - 1
    }

    fn has_residual(r: &Option<T>) -> bool {
        match r {
            None => true,
            Some(c) => *c > T::resolution(),
        }
    }

    /// Pushes as much flow as possible from `source` to `sink`; returns the total.
    /// Panics if an infinite-capacity path joins source and sink.
    pub fn max_flow(&mut self, source: usize, sink: usize) -> T {
        let n = self.arcs.len();
        let mut total = T::zero();
        loop {
            let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
            let mut seen = vec![false; n];
            seen[source] = true;
            let mut queue = VecDeque::from([source]);
            while let Some(v) = queue.pop_front() {
                if v == sink {
                    break;
                }
                for (i, a) in self.arcs[v].iter().enumerate() {
                    if !seen[a.to] && Self::has_residual(&a.residual) {
                        seen[a.to] = true;
                        prev[a.to] = Some((v, i));
                        queue.push_back(a.to);
                    }
                }
            }
            if !seen[sink] {
                return total;
            }
            let mut bottleneck: Option<T> = None;
            let mut v = sink;
            while let Some((u, i)) = prev[v] {
                if let Some(c) = &self.arcs[u][i].residual {
                    bottleneck = Some(match bottleneck {
                        None => c.clone(),
                        Some(b) => T::min_val(b, c.clone()),
                    });
                }
                v = u;
            }
            let delta = bottleneck.expect("augmenting path of unbounded capacity");
            let mut v = sink;
            while let Some((u, i)) = prev[v] {
                let rev = self.arcs[u][i].rev;
                if let Some(c) = &mut self.arcs[u][i].residual {
                    *c = c.clone() - delta.clone();
                }
                if let Some(c) = &mut self.arcs[v][rev].residual {
                    *c = c.clone() + delta.clone();
                }
                v = u;
            }
            total = total + delta;
        }
    }

    /// Flow currently carried by an arc.
    pub fn flow(&self, handle: usize) -> T {
        let (from, idx) = self.handles[handle];
        let arc = &self.arcs[from][idx];
        // Flow equals the residual of the paired reverse arc.
        self.arcs[arc.to][arc.rev]
            .residual
            .clone()
            .expect("reverse arcs are finite")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    #[test]
    fn textbook_network() {
        // CLRS figure 26.1: max flow 23.
        let mut net = FlowNetwork::<Rational>::new(6);
        let cap = |c| Some(ratio(c, 1));
        for (u, v, c) in [
            (0, 1, 16),
            (0, 2, 13),
            (2, 1, 4),
            (1, 3, 12),
            (3, 2, 9),
            (2, 4, 14),
            (4, 3, 7),
            (3, 5, 20),
            (4, 5, 4),
        ] {
            net.add_arc(u, v, cap(c));
        }
        assert_eq!(net.max_flow(0, 5), ratio(23, 1));
    }

    #[test]
    fn infinite_middle_arcs() {
        let mut net = FlowNetwork::<Rational>::new(4);
        let a = net.add_arc(0, 1, Some(ratio(1, 3)));
        let m = net.add_arc(1, 2, None);
        let b = net.add_arc(2, 3, Some(ratio(1, 2)));
        assert_eq!(net.max_flow(0, 3), ratio(1, 3));
        assert_eq!(net.flow(a), ratio(1, 3));
        assert_eq!(net.flow(m), ratio(1, 3));
        assert_eq!(net.flow(b), ratio(1, 3));
    }
}
