//! Randomized oracle suite over small finite systems.
//!
//! Every instance is checked against brute-force enumeration, the graph-system
//! lift and the subaction construction. The alpha implementation under test is
//! injectable so the suite itself can be shown to catch a wrong one.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::cycles::{for_each_simple_cycle, simple_cycles, Cycle};
use crate::error::{MeaError, SubactionError};
use crate::format::write_system_document;
use crate::mea::{
    alpha_state, birkhoff_averages, brute_force_alpha, delta_finite_horizon, epsilon_witness,
    maximizing_measures, project_lifted_cycle,
};
use crate::measures::{is_convex_combination_of_others, is_invariant, VertexMeasure};
use crate::random::{random_instance, Instance, InstanceKind};
use crate::scalar::{ExtendedReal, Rational, Scalar};
use crate::subaction::{subaction_for_state_function, SubactionResult};
use crate::system::{FiniteMVSystem, StateFunction, StateSet};

/// The alpha implementation under test.
pub type AlphaFn = fn(&FiniteMVSystem, &StateFunction<Rational>) -> ExtendedReal<Rational>;

/// Karp-based alpha, with `NegInf` for acyclic systems.
pub fn karp_alpha(system: &FiniteMVSystem, f: &StateFunction<Rational>) -> ExtendedReal<Rational> {
    match alpha_state(system, f) {
        Ok((a, _)) => ExtendedReal::Finite(a),
        Err(_) => ExtendedReal::NegInf,
    }
}

/// Horizons at which `δ_n` is compared with `α`.
pub const DELTA_HORIZONS: [usize; 4] = [8, 16, 32, 64];

/// Names of the checks, in report order.
pub const CHECKS: [&str; 12] = [
    "alpha_equals_brute_force",
    "delta_within_bound",
    "epsilon_witness_prefix_averages",
    "graph_lift_alpha",
    "graph_lift_cycle_correspondence",
    "mane_nonnegative_slack",
    "mane_maximizing_cycle_tight",
    "mane_tight_cycles_are_maximizing",
    "phi_edge_inequality",
    "single_valued_per_state",
    "maximizing_measures_invariant",
    "maximizing_extremes_are_extreme",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub instances: usize,
    pub max_states: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 20240601,
            instances: 1000,
            max_states: 8,
        }
    }
}

/// Result of the checks on one instance. `None` means the check did not apply.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceOutcome {
    pub index: usize,
    pub results: Vec<Option<Result<(), String>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckSummary {
    pub name: &'static str,
    pub applicable: usize,
    pub failed: usize,
    /// The first failing instance, with the system document that reproduces it.
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub checks: Vec<CheckSummary>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failed == 0)
    }

    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let c = &self.config;
        let _ = writeln!(s, "seed = {}", c.seed);
        let _ = writeln!(s, "instances = {}", c.instances);
        let _ = writeln!(s, "max_states = {}", c.max_states);
        for check in &self.checks {
            let status = if check.failed == 0 { "PASS" } else { "FAIL" };
            let _ = writeln!(
                s,
                "{status} {} ({} checked, {} failed)",
                check.name, check.applicable, check.failed
            );
        }
        for check in &self.checks {
            if let Some(cx) = &check.counterexample {
                let _ = writeln!(s, "\ncounterexample for {}:\n{cx}", check.name);
            }
        }
        let _ = writeln!(s, "result = {}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }
}

/// Runs every check on `config.instances` random instances in parallel; the
/// report is independent of scheduling.
pub fn run_suite(config: SuiteConfig, alpha: AlphaFn) -> SuiteReport {
    let max_states = config.max_states.min(8);
    let outcomes: Vec<(Instance, InstanceOutcome)> = (0..config.instances)
        .into_par_iter()
        .map(|i| {
            let inst = random_instance(config.seed, i, max_states);
            let out = check_instance(&inst, alpha);
            (inst, out)
        })
        .collect();
    let checks = CHECKS
        .iter()
        .enumerate()
        .map(|(k, &name)| {
            let mut summary = CheckSummary {
                name,
                applicable: 0,
                failed: 0,
                counterexample: None,
            };
            for (inst, out) in &outcomes {
                match &out.results[k] {
                    None => {}
                    Some(Ok(())) => summary.applicable += 1,
                    Some(Err(detail)) => {
                        summary.applicable += 1;
                        summary.failed += 1;
                        if summary.counterexample.is_none() {
                            summary.counterexample = Some(format!(
                                "instance {}: {detail}\n{}",
                                inst.index,
                                write_system_document(&inst.system, Some(&inst.f), None)
                            ));
                        }
                    }
                }
            }
            summary
        })
        .collect();
    SuiteReport {
        config: SuiteConfig {
            max_states,
            ..config
        },
        checks,
    }
}

fn ensure(cond: bool, detail: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(detail())
    }
}

/// Runs all checks on one instance.
pub fn check_instance(inst: &Instance, alpha_impl: AlphaFn) -> InstanceOutcome {
    let s = &inst.system;
    let f = &inst.f;
    let mut results: Vec<Option<Result<(), String>>> = vec![None; CHECKS.len()];

    let brute = brute_force_alpha(s, f).expect("instances have at most 8 states");
    let claimed = alpha_impl(s, f);
    results[0] = Some(ensure(claimed == brute, || {
        format!("alpha = {claimed}, brute force = {brute}")
    }));

    let karp = alpha_state(s, f);
    let (alpha, cycle) = match karp {
        Ok(v) => v,
        Err(e) => {
            results[5] = Some(ensure(
                matches!(
                    subaction_for_state_function(s, f, &Rational::from_int(0)),
                    Err(SubactionError::Mea(MeaError::NoCycle))
                ),
                || format!("acyclic system but subaction did not report NoCycle ({e})"),
            ));
            return InstanceOutcome {
                index: inst.index,
                results,
            };
        }
    };

    results[1] = Some(check_delta(s, f, &alpha));
    results[2] = Some(check_epsilon(&cycle, f, &alpha));
    let (lift_alpha, lift_cycles) = check_graph_lift(s, f, &alpha, &cycle);
    results[3] = Some(lift_alpha);
    results[4] = Some(lift_cycles);

    match subaction_for_state_function(s, f, &Rational::from_int(0)) {
        Ok((res, max_cycle)) => {
            results[5] = Some(ensure(res.slack.iter().all(|x| *x >= Rational::from_int(0)), || {
                format!("negative slack {:?}", res.min_slack())
            }));
            results[6] = Some(ensure(res.cycle_is_tight(s, &max_cycle), || {
                format!("maximizing cycle {max_cycle} has a slack edge")
            }));
            results[7] = Some(check_tight_cycles(s, f, &res));
            results[8] = Some(check_phi_edges(s, f, &res));
            if inst.kind == InstanceKind::SingleValued {
                results[9] = Some(check_single_valued(s, f, &res));
            }
        }
        Err(e) => {
            results[5] = Some(Err(format!("subaction failed: {e}")));
        }
    }

    match maximizing_measures(s, f) {
        Ok(ms) => {
            results[10] = Some(check_measures_invariant(s, f, &alpha, &ms));
            results[11] = Some(check_extremes(s, &ms));
        }
        Err(e) => results[10] = Some(Err(format!("maximizing_measures failed: {e}"))),
    }

    InstanceOutcome {
        index: inst.index,
        results,
    }
}

fn max_abs(f: &StateFunction<Rational>) -> Rational {
    f.0.iter().map(Scalar::abs_val).fold(Rational::from_int(0), Rational::max_val)
}

fn check_delta(s: &FiniteMVSystem, f: &StateFunction<Rational>, alpha: &Rational) -> Result<(), String> {
    let scale = Rational::from_int(2 * s.n_states() as i64) * max_abs(f);
    for n in DELTA_HORIZONS {
        let d = delta_finite_horizon(s, f, n).map_err(|e| format!("delta_{n}: {e}"))?;
        let bound = scale.clone() / Rational::from_int(n as i64 + 1);
        ensure((d.clone() - alpha.clone()).abs_val() <= bound, || {
            format!("delta_{n} = {d}, alpha = {alpha}, bound = {bound}")
        })?;
    }
    Ok(())
}

fn check_epsilon(cycle: &Cycle, f: &StateFunction<Rational>, alpha: &Rational) -> Result<(), String> {
    let r = epsilon_witness(cycle, f);
    let short = birkhoff_averages(cycle, f, r, 4 * cycle.len());
    let long = birkhoff_averages(cycle, f, r, 8 * cycle.len());
    let min_short = short.iter().cloned().reduce(Rational::min_val).expect("cycles are non-empty");
    let min_long = long.iter().cloned().reduce(Rational::min_val).expect("cycles are non-empty");
    ensure(min_short >= *alpha && min_short == min_long, || {
        format!("rotation {r} of {cycle}: min average {min_short} (longer window {min_long}), alpha {alpha}")
    })
}

fn check_graph_lift(
    s: &FiniteMVSystem,
    f: &StateFunction<Rational>,
    alpha: &Rational,
    cycle: &Cycle,
) -> (Result<(), String>, Result<(), String>) {
    let g = s.graph_system();
    let lifted = f.lift(s);
    let fg = lifted.as_graph_state_function();
    let (ga, gc) = match alpha_state(&g, &fg) {
        Ok(v) => v,
        Err(e) => {
            let err = Err(format!("graph system: {e}"));
            return (err.clone(), err);
        }
    };
    let eq = ensure(ga == *alpha, || format!("graph alpha {ga} != alpha {alpha}"));
    let corr = (|| {
        let down = project_lifted_cycle(s, &gc).ok_or_else(|| format!("lifted cycle {gc} does not project"))?;
        ensure(down.state_mean(f) == *alpha, || {
            format!("projection {down} of {gc} has mean {}", down.state_mean(f))
        })?;
        let up = Cycle::new(&g, cycle.edge_ids(s)).ok_or_else(|| format!("{cycle} does not lift"))?;
        ensure(up.state_mean(&fg) == *alpha, || format!("lift {up} of {cycle} is not maximizing"))
    })();
    (eq, corr)
}

/// Every cycle of tight edges has mean β, and every maximizing simple cycle is
/// made of tight edges.
fn check_tight_cycles(
    s: &FiniteMVSystem,
    f: &StateFunction<Rational>,
    res: &SubactionResult<Rational>,
) -> Result<(), String> {
    let tight = s.filter_edges(|e| res.tight[e]);
    let mut tight_count = 0usize;
    let mut bad = None;
    for_each_simple_cycle(&tight, |states| {
        tight_count += 1;
        let mean = states.iter().fold(Rational::from_int(0), |a, &x| a + f.get(x)) / Rational::from_int(states.len() as i64);
        if mean != res.beta && bad.is_none() {
            bad = Some(format!("tight cycle {states:?} has mean {mean}"));
        }
    });
    if let Some(b) = bad {
        return Err(b);
    }
    let maximizing = simple_cycles(s)
        .iter()
        .filter(|c| c.state_mean(f) == res.beta)
        .count();
    ensure(maximizing == tight_count, || {
        format!("{maximizing} maximizing cycles but {tight_count} all-tight cycles")
    })
}

fn check_phi_edges(
    s: &FiniteMVSystem,
    f: &StateFunction<Rational>,
    res: &SubactionResult<Rational>,
) -> Result<(), String> {
    for &(x, y) in s.edges() {
        if let ExtendedReal::Finite(px) = &res.phi[x] {
            let ExtendedReal::Finite(py) = &res.phi[y] else {
                return Err(format!("phi({x}) finite but phi({y}) = -inf"));
            };
            ensure(*px <= py.clone() + res.beta.clone() - f.get(x).clone(), || {
                format!("phi({x}) = {px} > phi({y}) + beta - f = {}", py.clone() + res.beta.clone() - f.get(x).clone())
            })?;
        }
    }
    for x in 0..s.n_states() {
        let no_pred = s.in_edges(x).is_empty();
        ensure(no_pred == !res.phi[x].is_finite(), || {
            format!("phi({x}) = {} but in-degree {}", res.phi[x], s.in_edges(x).len())
        })?;
    }
    Ok(())
}

fn check_single_valued(
    s: &FiniteMVSystem,
    f: &StateFunction<Rational>,
    res: &SubactionResult<Rational>,
) -> Result<(), String> {
    for x in 0..s.n_states() {
        let y = s.successors(x).next().ok_or_else(|| format!("state {x} has no image"))?;
        let lhs = f.get(x).clone() + res.v[x].clone() - res.v[y].clone();
        ensure(lhs <= res.beta, || format!("f({x}) + v({x}) - v({y}) = {lhs} > {}", res.beta))?;
    }
    Ok(())
}

fn check_measures_invariant(
    s: &FiniteMVSystem,
    f: &StateFunction<Rational>,
    alpha: &Rational,
    ms: &[VertexMeasure<Rational>],
) -> Result<(), String> {
    ensure(!ms.is_empty(), || "no maximizing measure".to_string())?;
    for m in ms {
        let witness = is_invariant(s, m).map_err(|e| e.to_string())?;
        ensure(witness.is_some(), || format!("{:?} is not invariant", m.to_strings()))?;
        let integral = m.integrate(&f.0);
        ensure(integral == *alpha, || format!("{:?} integrates to {integral}", m.to_strings()))?;
    }
    Ok(())
}

/// Measures extreme within the returned set must be extreme invariant measures.
/// A measure is extreme for `T` exactly when it is extreme for `T` restricted to
/// its support, so only cycles inside the support are compared.
fn check_extremes(s: &FiniteMVSystem, ms: &[VertexMeasure<Rational>]) -> Result<(), String> {
    for (i, m) in ms.iter().enumerate() {
        if is_convex_combination_of_others(ms, i) {
            continue;
        }
        let support: StateSet = m.support();
        let (sub, map) = s.restrict(&support).ok_or("empty support")?;
        let mut points: Vec<VertexMeasure<Rational>> = vec![VertexMeasure(map.iter().map(|&x| m.0[x].clone()).collect())];
        let mut seen = std::collections::BTreeSet::new();
        for c in simple_cycles(&sub) {
            let set: StateSet = c.states().iter().copied().collect();
            if set.len() < support.len() && seen.insert(set.clone()) {
                let share = Rational::from_int(1) / Rational::from_int(set.len() as i64);
                let mut w = vec![Rational::from_int(0); sub.n_states()];
                for x in set {
                    w[x] = share.clone();
                }
                points.push(VertexMeasure(w));
            }
        }
        ensure(!is_convex_combination_of_others(&points, 0), || {
            format!("maximizing measure {:?} is not extreme", m.to_strings())
        })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let report = run_suite(
            SuiteConfig {
                seed: 3,
                instances: 60,
                max_states: 6,
            },
            karp_alpha,
        );
        assert!(report.passed(), "{}", report.to_text());
        assert_eq!(report.check("alpha_equals_brute_force").unwrap().applicable, 60);
    }

    fn off_by_a_bit(s: &FiniteMVSystem, f: &StateFunction<Rational>) -> ExtendedReal<Rational> {
        match karp_alpha(s, f) {
            ExtendedReal::Finite(a) if s.n_states() > 3 => {
                ExtendedReal::Finite(a + crate::scalar::ratio(1, 1000))
            }
            other => other,
        }
    }

    #[test]
    fn wrong_alpha_is_caught() {
        let report = run_suite(
            SuiteConfig {
                seed: 3,
                instances: 60,
                max_states: 6,
            },
            off_by_a_bit,
        );
        assert!(!report.passed());
        let c = report.check("alpha_equals_brute_force").unwrap();
        assert!(c.failed > 0);
        assert!(c.counterexample.as_ref().unwrap().contains("\"edges\""));
    }

    #[test]
    fn report_is_deterministic() {
        let cfg = SuiteConfig {
            seed: 9,
            instances: 40,
            max_states: 8,
        };
        assert_eq!(run_suite(cfg, karp_alpha).to_text(), run_suite(cfg, karp_alpha).to_text());
    }
}
