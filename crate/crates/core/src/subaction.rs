//! Constructive Mañé lemma on finite systems.
//!
//! Given `f` on the edges of the graph and its maximum ergodic average `β`, the
//! potential
//!
//! ```text
//! φ(x) = sup { Σ_{k=-n}^{-1} f(x_k, x_{k+1}) - nβ : n >= 1, backward paths ending at x }
//! ```
//!
//! is finite on every state with a predecessor and `-inf` elsewhere. Replacing the
//! `-inf` values by a sufficiently low constant gives a real function `v` with
//! `f(x, y) + v(x) - v(y) <= β` on every edge, with equality along every
//! maximizing cycle.

use crate::cycles::Cycle;
use crate::error::SubactionError;
use crate::mea::alpha_state;
use crate::scalar::{render, ExtendedReal, Scalar};
use crate::system::{EdgeFunction, FiniteMVSystem, StateFunction};

/// `φ` by forward value iteration on the reduced weights `f - β`.
pub fn compute_phi<T: Scalar>(
    system: &FiniteMVSystem,
    f: &EdgeFunction<T>,
    beta: &T,
) -> Result<Vec<ExtendedReal<T>>, SubactionError> {
    compute_phi_traced(system, f, beta).map(|(phi, _)| phi)
}

/// As [`compute_phi`], also returning the iterate after every round.
///
/// Round `k` holds the supremum over backward paths of length at most `k`, so the
/// iterates increase monotonically. Without a positive reduced cycle they freeze
/// after at most `n_states` rounds; a change in round `n_states + 1` is reported as
/// [`SubactionError::PositiveCycle`].
#[allow(clippy::type_complexity)]
pub fn compute_phi_traced<T: Scalar>(
    system: &FiniteMVSystem,
    f: &EdgeFunction<T>,
    beta: &T,
) -> Result<(Vec<ExtendedReal<T>>, Vec<Vec<ExtendedReal<T>>>), SubactionError> {
    let n = system.n_states();
    let mut phi: Vec<ExtendedReal<T>> = vec![ExtendedReal::NegInf; n];
    let mut trace = Vec::new();
    for round in 1..=n + 1 {
        let mut next = phi.clone();
        let mut changed_at = None;
        for (e, &(t, h)) in system.edges().iter().enumerate() {
            // A backward path may start at t (contributing 0) or extend one into t.
            let base = match &phi[t] {
                ExtendedReal::Finite(v) if *v > T::zero() => v.clone(),
                _ => T::zero(),
            };
            let cand = base + f.0[e].clone() - beta.clone();
            let improves = match &next[h] {
                ExtendedReal::NegInf => true,
                ExtendedReal::Finite(cur) => cand > cur.clone() + T::resolution(),
            };
            if improves {
                next[h] = ExtendedReal::Finite(cand);
                changed_at.get_or_insert(h);
            }
        }
        phi = next;
        trace.push(phi.clone());
        match changed_at {
            None => return Ok((phi, trace)),
            Some(state) if round == n + 1 => {
                return Err(SubactionError::PositiveCycle { state, rounds: round })
            }
            Some(_) => {}
        }
    }
    unreachable!("loop returns by round n + 1")
}

/// `v = φ` where finite, `-M - max f + β` where `φ = -inf`, with `M` the largest
/// finite `|φ|`. Returns `(v, M)`.
pub fn compute_v<T: Scalar>(phi: &[ExtendedReal<T>], f: &EdgeFunction<T>, beta: &T) -> (Vec<T>, T) {
    let bound = phi
        .iter()
        .filter_map(|p| p.finite().map(Scalar::abs_val))
        .fold(T::zero(), T::max_val);
    let max_f = f
        .0
        .iter()
        .cloned()
        .reduce(T::max_val)
        .unwrap_or_else(T::zero);
    let floor = -bound.clone() - max_f + beta.clone();
    let v = phi
        .iter()
        .map(|p| match p {
            ExtendedReal::Finite(x) => x.clone(),
            ExtendedReal::NegInf => floor.clone(),
        })
        .collect();
    (v, bound)
}

/// Outcome of checking `f + v∘π - v∘π' <= β` on every edge.
#[derive(Clone, Debug, PartialEq)]
pub struct SubactionResult<T> {
    pub beta: T,
    pub phi: Vec<ExtendedReal<T>>,
    pub v: Vec<T>,
    /// Bound with `|φ| <= M` on the finite part.
    pub bound_m: T,
    /// `β - (f(e) + v(tail) - v(head))` per edge.
    pub slack: Vec<T>,
    pub tight: Vec<bool>,
    pub tolerance: T,
}

impl<T: Scalar> SubactionResult<T> {
    pub fn min_slack(&self) -> Option<&T> {
        self.slack
            .iter()
            .reduce(|a, b| if b < a { b } else { a })
    }

    /// Whether every edge of `cycle` is tight.
    pub fn cycle_is_tight(&self, system: &FiniteMVSystem, cycle: &Cycle) -> bool {
        cycle.edge_ids(system).into_iter().all(|e| self.tight[e])
    }

    /// State rows: `state,phi,v`.
    pub fn states_csv(&self) -> String {
        let mut s = String::from("state,phi,v\n");
        for (x, (p, v)) in self.phi.iter().zip(&self.v).enumerate() {
            let p = match p {
                ExtendedReal::NegInf => "-inf".to_string(),
                ExtendedReal::Finite(p) => render(p),
            };
            s.push_str(&format!("{x},{p},{}\n", render(v)));
        }
        s
    }

    /// Edge rows: `tail,head,f,slack,tight`.
    pub fn edges_csv(&self, system: &FiniteMVSystem, f: &EdgeFunction<T>) -> String {
        let mut s = String::from("tail,head,f,slack,tight\n");
        for (e, &(t, h)) in system.edges().iter().enumerate() {
            s.push_str(&format!(
                "{t},{h},{},{},{}\n",
                render(&f.0[e]),
                render(&self.slack[e]),
                u8::from(self.tight[e])
            ));
        }
        s
    }
}

/// Computes the slack of every edge and fails on the worst violation below `-tol`.
pub fn verify_mane<T: Scalar>(
    system: &FiniteMVSystem,
    f: &EdgeFunction<T>,
    v: &[T],
    beta: &T,
    tol: &T,
) -> Result<Vec<T>, SubactionError> {
    let slack: Vec<T> = system
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(t, h))| beta.clone() - (f.0[e].clone() + v[t].clone() - v[h].clone()))
        .collect();
    let worst = slack
        .iter()
        .enumerate()
        .reduce(|a, b| if b.1 < a.1 { b } else { a });
    if let Some((e, s)) = worst {
        if *s < -tol.clone() {
            let (tail, head) = system.edge(e);
            return Err(SubactionError::ViolatedEdge {
                edge: e,
                tail,
                head,
                excess: -s.to_f64(),
            });
        }
    }
    Ok(slack)
}

/// `φ`, `v` and the verified slacks for an edge function with known `β`.
pub fn subaction_with_beta<T: Scalar>(
    system: &FiniteMVSystem,
    f: &EdgeFunction<T>,
    beta: &T,
    tol: &T,
) -> Result<SubactionResult<T>, SubactionError> {
    let phi = compute_phi(system, f, beta)?;
    let (v, bound_m) = compute_v(&phi, f, beta);
    let slack = verify_mane(system, f, &v, beta, tol)?;
    let tight = slack.iter().map(|s| s.clone() <= tol.clone()).collect();
    Ok(SubactionResult {
        beta: beta.clone(),
        phi,
        v,
        bound_m,
        slack,
        tight,
        tolerance: tol.clone(),
    })
}

/// Subaction for a function on edges: `β` is the maximum cycle mean of `f`.
pub fn subaction_for_edge_function<T: Scalar>(
    system: &FiniteMVSystem,
    f: &EdgeFunction<T>,
    tol: &T,
) -> Result<(SubactionResult<T>, Cycle), SubactionError> {
    let (beta, cycle) = crate::mea::max_mean_cycle(system, f)?;
    let result = subaction_with_beta(system, f, &beta, tol)?;
    ensure_cycle_tight(system, &result, &cycle)?;
    Ok((result, cycle))
}

/// Subaction for a function on states, lifted by `f̂(x, y) = f(x)`. The returned
/// `v` satisfies `f(x) + v(x) - v(y) <= β` whenever `y ∈ T(x)`.
pub fn subaction_for_state_function<T: Scalar>(
    system: &FiniteMVSystem,
    f: &StateFunction<T>,
    tol: &T,
) -> Result<(SubactionResult<T>, Cycle), SubactionError> {
    let (beta, cycle) = alpha_state(system, f)?;
    let lifted = f.lift(system);
    let result = subaction_with_beta(system, &lifted, &beta, tol)?;
    ensure_cycle_tight(system, &result, &cycle)?;
    Ok((result, cycle))
}

fn ensure_cycle_tight<T: Scalar>(
    system: &FiniteMVSystem,
    result: &SubactionResult<T>,
    cycle: &Cycle,
) -> Result<(), SubactionError> {
    for e in cycle.edge_ids(system) {
        if !result.tight[e] {
            return Err(SubactionError::NotTight {
                edge: e,
                slack: result.slack[e].to_f64(),
            });
        }
    }
    Ok(())
}
