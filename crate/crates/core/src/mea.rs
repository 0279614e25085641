//! Maximum ergodic averages on finite systems.
//!
//! On a finite system every formulation of the maximum ergodic average (space
//! average over invariant measures, time averages along orbits, the limit of the
//! best finite-horizon path averages) reduces to the maximum cycle mean of the
//! graph. The value is computed with Karp's algorithm; the maximizing cycle is
//! then extracted from the subgraph of edges that are tight for a potential.

use std::collections::{BTreeSet, VecDeque};

use crate::cycles::{for_each_simple_cycle, simple_cycles, Cycle};
use crate::error::MeaError;
use crate::measures::{uniform_on, VertexMeasure};
use crate::scalar::{render, ExtendedReal, Scalar};
use crate::system::{EdgeFunction, FiniteMVSystem, StateFunction, StateId};

/// Largest system accepted by [`brute_force_alpha`].
pub const BRUTE_FORCE_LIMIT: usize = 12;

fn check_edge_len<T>(system: &FiniteMVSystem, w: &EdgeFunction<T>) -> Result<(), MeaError> {
    if w.0.len() != system.n_edges() {
        return Err(MeaError::LengthMismatch {
            expected: system.n_edges(),
            found: w.0.len(),
        });
    }
    Ok(())
}

fn check_state_len<T>(system: &FiniteMVSystem, f: &StateFunction<T>) -> Result<(), MeaError> {
    if f.0.len() != system.n_states() {
        return Err(MeaError::LengthMismatch {
            expected: system.n_states(),
            found: f.0.len(),
        });
    }
    Ok(())
}

/// One relaxation round: best weight of a walk with one more edge ending at each state.
fn extend_walks<T: Scalar>(
    system: &FiniteMVSystem,
    w: &EdgeFunction<T>,
    row: &[Option<T>],
) -> Vec<Option<T>> {
    let mut next: Vec<Option<T>> = vec![None; system.n_states()];
    for (e, &(t, h)) in system.edges().iter().enumerate() {
        if let Some(d) = &row[t] {
            let cand = d.clone() + w.0[e].clone();
            let better = match &next[h] {
                None => true,
                Some(cur) => cand > *cur,
            };
            if better {
                next[h] = Some(cand);
            }
        }
    }
    next
}

/// Maximum cycle mean by Karp's formula, or `None` for an acyclic graph.
///
/// Uses O(n) memory by recomputing the walk table in a second pass, which keeps
/// large grid systems cheap.
pub fn max_cycle_mean_value<T: Scalar>(
    system: &FiniteMVSystem,
    w: &EdgeFunction<T>,
) -> Result<Option<T>, MeaError> {
    check_edge_len(system, w)?;
    let n = system.n_states();
    let start: Vec<Option<T>> = vec![Some(T::zero()); n];
    let mut row = start.clone();
    for _ in 0..n {
        row = extend_walks(system, w, &row);
    }
    let last = row;
    if last.iter().all(Option::is_none) {
        return Ok(None);
    }
    // min over k of (D_n(v) - D_k(v)) / (n - k), per state.
    let mut worst: Vec<Option<T>> = vec![None; n];
    let mut row = start;
    for k in 0..n {
        let len = T::from_int((n - k) as i64);
        for v in 0..n {
            if let (Some(dn), Some(dk)) = (&last[v], &row[v]) {
                let ratio = (dn.clone() - dk.clone()) / len.clone();
                let smaller = match &worst[v] {
                    None => true,
                    Some(cur) => ratio < *cur,
                };
                if smaller {
                    worst[v] = Some(ratio);
                }
            }
        }
        if k + 1 < n {
            row = extend_walks(system, w, &row);
        }
    }
    Ok(worst
        .into_iter()
        .flatten()
        .fold(None, |best: Option<T>, v| match best {
            None => Some(v),
            Some(b) => Some(T::max_val(b, v)),
        }))
}

/// Longest-walk potential for the reduced weights `w - alpha`, started at zero
/// everywhere. Requires that no reduced cycle is positive.
fn reduced_potential<T: Scalar>(system: &FiniteMVSystem, w: &EdgeFunction<T>, alpha: &T) -> Vec<T> {
    let n = system.n_states();
    let mut p = vec![T::zero(); n];
    for _ in 0..=n {
        let mut changed = false;
        for (e, &(t, h)) in system.edges().iter().enumerate() {
            let cand = p[t].clone() + w.0[e].clone() - alpha.clone();
            if cand > p[h].clone() + T::resolution() {
                p[h] = cand;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    p
}

/// Tolerance used to call an edge tight with respect to a potential.
fn tight_tolerance<T: Scalar>() -> T {
    if T::EXACT {
        T::zero()
    } else {
        T::resolution() * T::from_int(100)
    }
}

/// The subsystem of edges lying on maximum-mean cycles' support: every cycle of
/// the returned graph has mean exactly `alpha`, and every maximizing cycle of
/// `system` survives.
pub fn maximizing_subsystem<T: Scalar>(
    system: &FiniteMVSystem,
    w: &EdgeFunction<T>,
    alpha: &T,
) -> FiniteMVSystem {
    let p = reduced_potential(system, w, alpha);
    let tol = tight_tolerance::<T>();
    system.filter_edges(|e| {
        let (t, h) = system.edge(e);
        let slack = p[h].clone() - p[t].clone() - (w.0[e].clone() - alpha.clone());
        slack <= tol
    })
}

/// Shortest cycle, ties broken by the lexicographically smallest canonical
/// state sequence.
fn shortest_lex_cycle(g: &FiniteMVSystem) -> Option<Cycle> {
    let n = g.n_states();
    let bfs = |s: StateId, forward: bool| -> Vec<Option<usize>> {
        let mut dist = vec![None; n];
        dist[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].expect("queued states have a distance");
            let next: Vec<StateId> = if forward {
                g.successors(v).collect()
            } else {
                g.predecessors(v).collect()
            };
            for u in next {
                if u >= s && dist[u].is_none() {
                    dist[u] = Some(d + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    };

    let mut best: Option<(usize, StateId)> = None;
    for s in 0..n {
        let dist = bfs(s, true);
        let len = g
            .predecessors(s)
            .filter(|&u| u >= s)
            .filter_map(|u| dist[u].map(|d| d + 1))
            .min();
        if let Some(len) = len {
            if best.is_none_or(|(bl, _)| len < bl) {
                best = Some((len, s));
            }
        }
    }
    let (len, s) = best?;
    let to_s = bfs(s, false);
    let mut states = vec![s];
    let mut cur = s;
    for step in 1..len {
        let remaining = len - step;
        cur = g
            .successors(cur)
            .find(|&v| v > s && to_s[v] == Some(remaining))
            .expect("a shortest cycle continues from every state on it");
        states.push(cur);
    }
    Cycle::new(g, states)
}

/// Maximum mean of `w` over simple cycles, with a cycle attaining it.
///
/// Ties are broken by shorter length, then by the lexicographically smaller state
/// sequence (each cycle read from its smallest state).
pub fn max_mean_cycle<T: Scalar>(
    system: &FiniteMVSystem,
    w: &EdgeFunction<T>,
) -> Result<(T, Cycle), MeaError> {
    let alpha = max_cycle_mean_value(system, w)?.ok_or(MeaError::NoCycle)?;
    let tight = maximizing_subsystem(system, w, &alpha);
    let cycle = shortest_lex_cycle(&tight).ok_or(MeaError::NoCycle)?;
    let cycle = Cycle::new(system, cycle.states().to_vec()).expect("tight edges are system edges");
    let alpha = if T::EXACT { cycle.edge_mean(system, w) } else { alpha };
    Ok((alpha, cycle))
}

/// `α(f)` for a function on states: the maximum cycle mean of its lift.
pub fn alpha_state<T: Scalar>(
    system: &FiniteMVSystem,
    f: &StateFunction<T>,
) -> Result<(T, Cycle), MeaError> {
    check_state_len(system, f)?;
    max_mean_cycle(system, &f.lift(system))
}

/// `δ_n`: the best average of `f` over paths `(x_0, ..., x_n)`, divided by `n + 1`.
pub fn delta_finite_horizon<T: Scalar>(
    system: &FiniteMVSystem,
    f: &StateFunction<T>,
    n: usize,
) -> Result<T, MeaError> {
    check_state_len(system, f)?;
    let mut best: Vec<Option<T>> = f.0.iter().cloned().map(Some).collect();
    for _ in 0..n {
        let mut next: Vec<Option<T>> = vec![None; system.n_states()];
        for &(t, h) in system.edges() {
            if let Some(b) = &best[t] {
                let cand = b.clone() + f.0[h].clone();
                if next[h].as_ref().is_none_or(|cur| cand > *cur) {
                    next[h] = Some(cand);
                }
            }
        }
        best = next;
    }
    let top = best
        .into_iter()
        .flatten()
        .fold(None, |acc: Option<T>, v| Some(acc.map_or(v.clone(), |a| T::max_val(a, v))));
    top.map(|s| s / T::from_int(n as i64 + 1))
        .ok_or(MeaError::NoPath(n))
}

/// A starting offset into `cycle` from which every Birkhoff average of `f` along
/// the periodic orbit is at least the cycle mean.
///
/// Starts just after the position where the prefix sums of `f - mean` are lowest
/// (earliest such position on ties).
pub fn epsilon_witness<T: Scalar>(cycle: &Cycle, f: &StateFunction<T>) -> usize {
    let mean = cycle.state_mean(f);
    let mut prefix = T::zero();
    let mut best = (T::zero(), 0usize);
    for (j, &x) in cycle.states().iter().enumerate() {
        if prefix < best.0 {
            best = (prefix.clone(), j);
        }
        prefix = prefix + f.get(x).clone() - mean.clone();
    }
    best.1
}

/// Birkhoff averages `(1/(n+1)) S_n f` for `n = 0..count` along the periodic orbit
/// that runs through `cycle` starting at `rotation`.
pub fn birkhoff_averages<T: Scalar>(
    cycle: &Cycle,
    f: &StateFunction<T>,
    rotation: usize,
    count: usize,
) -> Vec<T> {
    let states = cycle.states();
    let mut sum = T::zero();
    (0..count)
        .map(|n| {
            sum = sum.clone() + f.get(states[(rotation + n) % states.len()]).clone();
            sum.clone() / T::from_int(n as i64 + 1)
        })
        .collect()
}

/// Maximum state-function mean over all simple cycles, by enumeration.
/// Acyclic systems give `NegInf`.
pub fn brute_force_alpha<T: Scalar>(
    system: &FiniteMVSystem,
    f: &StateFunction<T>,
) -> Result<ExtendedReal<T>, MeaError> {
    if system.n_states() > BRUTE_FORCE_LIMIT {
        return Err(MeaError::TooLarge {
            n_states: system.n_states(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    check_state_len(system, f)?;
    let mut best = ExtendedReal::NegInf;
    for_each_simple_cycle(system, |states| {
        let sum = states.iter().fold(T::zero(), |a, &x| a + f.get(x).clone());
        let mean = ExtendedReal::Finite(sum / T::from_int(states.len() as i64));
        if mean > best {
            best = mean;
        }
    });
    Ok(best)
}

/// Uniform measures on every maximizing simple cycle, deduplicated and sorted.
pub fn maximizing_measures<T: Scalar>(
    system: &FiniteMVSystem,
    f: &StateFunction<T>,
) -> Result<Vec<VertexMeasure<T>>, MeaError> {
    let (alpha, _) = alpha_state(system, f)?;
    let tight = maximizing_subsystem(system, &f.lift(system), &alpha);
    let supports: BTreeSet<BTreeSet<StateId>> = simple_cycles(&tight)
        .iter()
        .map(|c| c.states().iter().copied().collect())
        .collect();
    let mut out: Vec<VertexMeasure<T>> = supports
        .iter()
        .map(|s| uniform_on(system.n_states(), s))
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

/// Maps a cycle of the graph system (whose states are edge ids) to the cycle of
/// tails in the base system. Returns `None` if the tails repeat.
pub fn project_lifted_cycle(system: &FiniteMVSystem, lifted: &Cycle) -> Option<Cycle> {
    let tails = lifted.states().iter().map(|&e| system.edge(e).0).collect();
    Cycle::new(system, tails)
}

/// Everything computed for one `(system, f)` pair.
#[derive(Clone, Debug, PartialEq)]
pub struct MeaReport<T> {
    pub alpha: T,
    pub maximizing_cycle: Cycle,
    /// `(n, δ_n)` pairs.
    pub delta_seq: Vec<(usize, T)>,
    pub epsilon_rotation: usize,
    pub tolerance: f64,
}

impl<T: Scalar> MeaReport<T> {
    pub fn compute(
        system: &FiniteMVSystem,
        f: &StateFunction<T>,
        horizons: &[usize],
    ) -> Result<Self, MeaError> {
        let (alpha, cycle) = alpha_state(system, f)?;
        let delta_seq = horizons
            .iter()
            .map(|&n| delta_finite_horizon(system, f, n).map(|d| (n, d)))
            .collect::<Result<Vec<_>, _>>()?;
        let epsilon_rotation = epsilon_witness(&cycle, f);
        Ok(Self {
            alpha,
            maximizing_cycle: cycle,
            delta_seq,
            epsilon_rotation,
            tolerance: if T::EXACT { 0.0 } else { T::resolution().to_f64() },
        })
    }

    /// Flat `key = value` block.
    pub fn to_text(&self) -> String {
        let cycle = self
            .maximizing_cycle
            .states()
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        let mut s = String::new();
        s.push_str(&format!("alpha = {}\n", render(&self.alpha)));
        s.push_str(&format!("alpha_f64 = {:.17}\n", self.alpha.to_f64()));
        s.push_str(&format!("cycle = {cycle}\n"));
        s.push_str(&format!("cycle_length = {}\n", self.maximizing_cycle.len()));
        s.push_str(&format!("epsilon_rotation = {}\n", self.epsilon_rotation));
        s.push_str(&format!("tolerance = {}\n", self.tolerance));
        s
    }

    /// CSV with header `n,delta`.
    pub fn delta_csv(&self) -> String {
        let mut s = String::from("n,delta\n");
        for (n, d) in &self.delta_seq {
            s.push_str(&format!("{n},{}\n", render(d)));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    fn sf(v: &[(i64, i64)]) -> StateFunction<Rational> {
        StateFunction(v.iter().map(|&(p, q)| ratio(p, q)).collect())
    }

    fn indicator(n: usize, i: usize) -> StateFunction<Rational> {
        StateFunction((0..n).map(|x| ratio(i64::from(x == i), 1)).collect())
    }

    #[test]
    fn max_mean_cycle_examples() {
        let lp = FiniteMVSystem::new(1, [(0, 0)]).unwrap();
        let (v, c) = max_mean_cycle(&lp, &EdgeFunction(vec![ratio(7, 3)])).unwrap();
        assert_eq!(v, ratio(7, 3));
        assert_eq!(c.states(), &[0]);

        let z4 = FiniteMVSystem::z4();
        let (v, c) = max_mean_cycle(&z4, &indicator(4, 0).lift(&z4)).unwrap();
        assert_eq!(v, ratio(1, 2));
        assert_eq!(c.states(), &[0, 1]);

        let loops = FiniteMVSystem::new(2, [(0, 0), (1, 1)]).unwrap();
        let (v, c) = max_mean_cycle(&loops, &EdgeFunction(vec![ratio(3, 1), ratio(5, 1)])).unwrap();
        assert_eq!(v, ratio(5, 1));
        assert_eq!(c.states(), &[1]);

        let dag = FiniteMVSystem::new(2, [(0, 1)]).unwrap();
        assert_eq!(
            max_mean_cycle(&dag, &EdgeFunction(vec![ratio(1, 1)])),
            Err(MeaError::NoCycle)
        );
    }

    #[test]
    fn ties_prefer_short_then_lexicographic() {
        // Constant weights: every cycle is maximizing; the loop at 2 is shortest.
        let s = FiniteMVSystem::new(3, [(0, 1), (1, 0), (2, 2), (1, 2), (2, 1)]).unwrap();
        let (_, c) = max_mean_cycle(&s, &EdgeFunction(vec![ratio(1, 1); 5])).unwrap();
        assert_eq!(c.states(), &[2]);
        // Two 2-cycles of equal mean: 0->1->0 and 1->2->1.
        let s = FiniteMVSystem::new(3, [(0, 1), (1, 0), (1, 2), (2, 1)]).unwrap();
        let (_, c) = max_mean_cycle(&s, &EdgeFunction(vec![ratio(0, 1); 4])).unwrap();
        assert_eq!(c.states(), &[0, 1]);
        // Lexicographic among equal length cycles from the same start.
        let s = FiniteMVSystem::new(4, [(0, 2), (2, 0), (0, 3), (3, 0), (1, 1)]).unwrap();
        let w = EdgeFunction(vec![ratio(1, 1), ratio(1, 1), ratio(0, 1), ratio(1, 1), ratio(1, 1)]);
        // Edge order: (0,2),(0,3),(1,1),(2,0),(3,0); the loop at 1 has weight 0,
        // both 2-cycles through 0 have mean 1.
        let (v, c) = max_mean_cycle(&s, &w).unwrap();
        assert_eq!(v, ratio(1, 1));
        assert_eq!(c.states(), &[0, 2]);
    }

    #[test]
    fn alpha_state_examples() {
        let z4 = FiniteMVSystem::z4();
        assert_eq!(alpha_state(&z4, &sf(&[(2, 3); 4])).unwrap().0, ratio(2, 3));
        assert_eq!(alpha_state(&z4, &indicator(4, 0)).unwrap().0, ratio(1, 2));
    }

    #[test]
    fn delta_examples() {
        let lp = FiniteMVSystem::new(1, [(0, 0)]).unwrap();
        for n in [0, 1, 5, 20] {
            assert_eq!(delta_finite_horizon(&lp, &sf(&[(4, 1)]), n).unwrap(), ratio(4, 1));
        }
        let z4 = FiniteMVSystem::z4();
        assert_eq!(delta_finite_horizon(&z4, &indicator(4, 0), 1).unwrap(), ratio(1, 2));
        let chain = FiniteMVSystem::new(3, [(0, 1), (1, 2)]).unwrap();
        let f = sf(&[(1, 1), (0, 1), (0, 1)]);
        assert_eq!(delta_finite_horizon(&chain, &f, 2).unwrap(), ratio(1, 3));
        assert_eq!(delta_finite_horizon(&chain, &f, 3), Err(MeaError::NoPath(3)));
    }

    #[test]
    fn delta_matches_path_enumeration_on_z4() {
        // All 8 paths of length 1 in Z/4Z, and all 16 of length 2.
        let z4 = FiniteMVSystem::z4();
        let f = sf(&[(1, 1), (0, 1), (0, 1), (0, 1)]);
        for n in 1..=4usize {
            let mut best = None::<Rational>;
            let mut stack: Vec<Vec<usize>> = (0..4).map(|x| vec![x]).collect();
            while let Some(p) = stack.pop() {
                if p.len() == n + 1 {
                    let s: Rational = p.iter().map(|&x| f.0[x].clone()).sum();
                    best = Some(best.map_or(s.clone(), |b| if s > b { s.clone() } else { b }));
                    continue;
                }
                for y in z4.successors(*p.last().unwrap()) {
                    let mut q = p.clone();
                    q.push(y);
                    stack.push(q);
                }
            }
            let expect = best.unwrap() / ratio(n as i64 + 1, 1);
            assert_eq!(delta_finite_horizon(&z4, &f, n).unwrap(), expect);
        }
    }

    #[test]
    fn epsilon_examples() {
        let lp = FiniteMVSystem::new(1, [(0, 0)]).unwrap();
        let c = Cycle::new(&lp, vec![0]).unwrap();
        assert_eq!(epsilon_witness(&c, &sf(&[(9, 1)])), 0);

        // 2-cycle with values (0, 1): the witness must start at the value-1 state.
        let two = FiniteMVSystem::new(2, [(0, 1), (1, 0)]).unwrap();
        let c = Cycle::new(&two, vec![0, 1]).unwrap();
        let f = sf(&[(0, 1), (1, 1)]);
        let r = epsilon_witness(&c, &f);
        assert_eq!(c.states()[r], 1);
        let avgs = birkhoff_averages(&c, &f, r, 4);
        assert_eq!(avgs, vec![ratio(1, 1), ratio(1, 2), ratio(2, 3), ratio(1, 2)]);
        // The other rotation fails immediately.
        assert_eq!(birkhoff_averages(&c, &f, 1 - r, 1)[0], ratio(0, 1));

        let z4 = FiniteMVSystem::z4();
        let c = Cycle::new(&z4, vec![0, 1, 2, 3]).unwrap();
        assert_eq!(epsilon_witness(&c, &sf(&[(1, 2); 4])), 0);
    }

    #[test]
    fn brute_force_examples() {
        let z4 = FiniteMVSystem::z4();
        assert_eq!(
            brute_force_alpha(&z4, &indicator(4, 0)).unwrap(),
            ExtendedReal::Finite(ratio(1, 2))
        );
        let dag = FiniteMVSystem::new(2, [(0, 1)]).unwrap();
        assert_eq!(brute_force_alpha(&dag, &sf(&[(1, 1), (1, 1)])).unwrap(), ExtendedReal::NegInf);
        let big = FiniteMVSystem::identity(13).unwrap();
        assert!(matches!(
            brute_force_alpha(&big, &StateFunction::constant(13, ratio(0, 1))),
            Err(MeaError::TooLarge { .. })
        ));
    }

    #[test]
    fn maximizing_measures_examples() {
        let z4 = FiniteMVSystem::z4();
        let all = maximizing_measures(&z4, &sf(&[(0, 1); 4])).unwrap();
        // Four 2-cycles plus the uniform measure shared by both 4-cycles.
        assert_eq!(all.len(), 5);

        let ms = maximizing_measures(&z4, &indicator(4, 0)).unwrap();
        let half = |a: usize, b: usize| {
            let mut w = vec![ratio(0, 1); 4];
            w[a] = ratio(1, 2);
            w[b] = ratio(1, 2);
            VertexMeasure(w)
        };
        assert_eq!(ms, vec![half(0, 3), half(0, 1)]);

        let loops = FiniteMVSystem::new(2, [(0, 0), (1, 1)]).unwrap();
        let ms = maximizing_measures(&loops, &sf(&[(3, 1), (5, 1)])).unwrap();
        assert_eq!(ms, vec![VertexMeasure::dirac(2, 1)]);
    }

    #[test]
    fn float_karp_agrees_with_rational() {
        let z4 = FiniteMVSystem::z4();
        let f = StateFunction(vec![0.3, -1.0, 0.9, 0.2]);
        let (v, c) = alpha_state(&z4, &f).unwrap();
        let (exact, ce) = alpha_state(&z4, &sf(&[(3, 10), (-1, 1), (9, 10), (1, 5)])).unwrap();
        assert_eq!(exact, ratio(11, 20));
        assert!((v - exact.to_f64()).abs() < 1e-12);
        assert_eq!(c.states(), &[2, 3]);
        assert_eq!(ce, c);
    }

    #[test]
    fn report_text() {
        let z4 = FiniteMVSystem::z4();
        let rep = MeaReport::compute(&z4, &indicator(4, 0), &[1, 2]).unwrap();
        assert!(rep.to_text().starts_with("alpha = 1/2\n"));
        assert_eq!(rep.delta_csv(), "n,delta\n1,1/2\n2,2/3\n");
    }
}
