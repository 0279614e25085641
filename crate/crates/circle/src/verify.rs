//! Randomized checks of the circle systems, for `mvdyn verify`.

use std::fmt::Write;

use rand::Rng;

use mvdyn_core::random::instance_rng;
use mvdyn_core::scalar::ratio;

use crate::bounds::{beta_lower, beta_upper};
use crate::expansion::expansion_certificate;
use crate::observable::Observable;
use crate::orbits::{barycentre, enumerate_periodic_orbits};
use crate::system::{doubling_map, pq_correspondence, three_branch_doubling, PiecewiseAffineMVSystem, Q};

pub const CIRCLE_CHECKS: [&str; 5] = [
    "orbits_validate",
    "expansion_certified",
    "barycentre_modulus",
    "sandwich_ordered",
    "branch_subset_monotone",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CircleSuiteConfig {
    pub seed: u64,
    /// Random `θ` values drawn from `k/256`.
    pub thetas: usize,
    pub max_period: usize,
    pub grid_n: usize,
}

impl Default for CircleSuiteConfig {
    fn default() -> Self {
        Self {
            seed: 20240601,
            thetas: 8,
            max_period: 8,
            grid_n: 256,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircleCheck {
    pub name: &'static str,
    pub checked: usize,
    pub failed: usize,
    pub counterexample: Option<String>,
}

impl CircleCheck {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checked: 0,
            failed: 0,
            counterexample: None,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(describe());
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircleReport {
    pub config: CircleSuiteConfig,
    pub checks: Vec<CircleCheck>,
}

impl CircleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failed == 0)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let c = &self.config;
        let _ = writeln!(s, "circle_seed = {}", c.seed);
        let _ = writeln!(s, "circle_thetas = {}", c.thetas);
        let _ = writeln!(s, "circle_max_period = {}", c.max_period);
        let _ = writeln!(s, "circle_grid = {}", c.grid_n);
        for check in &self.checks {
            let status = if check.failed == 0 { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "{status} {} ({} checked, {} failed)", check.name, check.checked, check.failed);
        }
        for check in &self.checks {
            if let Some(cx) = &check.counterexample {
                let _ = writeln!(s, "\ncounterexample for {}:\n{cx}", check.name);
            }
        }
        let _ = writeln!(s, "circle_result = {}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }
}

fn builtins() -> Vec<PiecewiseAffineMVSystem> {
    vec![
        doubling_map(),
        three_branch_doubling(),
        pq_correspondence(1, 2).expect("valid parameters"),
        pq_correspondence(2, 3).expect("valid parameters"),
    ]
}

/// Runs every circle check; the report depends only on the configuration.
pub fn run_circle_suite(config: CircleSuiteConfig) -> CircleReport {
    let mut checks: Vec<CircleCheck> = CIRCLE_CHECKS.iter().map(|n| CircleCheck::new(n)).collect();
    let systems = builtins();

    for s in &systems {
        let orbits = enumerate_periodic_orbits(s, config.max_period);
        let orbits = match orbits {
            Ok(o) => o,
            Err(e) => {
                checks[0].record(false, || format!("{}: {e}", s.name()));
                continue;
            }
        };
        for o in &orbits {
            checks[0].record(o.validate(s), || format!("{}: orbit {:?} fails exact iteration", s.name(), o));
            let b = barycentre(&o.points_f64()).norm();
            let ok = b <= 1.0 + 1e-12 && ((o.period() == 1) == ((b - 1.0).abs() <= 1e-12));
            checks[2].record(ok, || format!("{}: orbit {:?} has |barycentre| = {b}", s.name(), o));
        }
        let cert = expansion_certificate(s);
        checks[1].record(
            matches!(&cert, Ok(c) if c.lambda > Q::from_integer(1.into()) && c.eta > Q::from_integer(0.into())),
            || format!("{}: {cert:?}", s.name()),
        );
    }

    let mut rng = instance_rng(config.seed, usize::MAX);
    let thetas: Vec<Q> = (0..config.thetas).map(|_| ratio(rng.gen_range(0..=256), 256)).collect();
    let (d, t) = (&systems[0], &systems[1]);
    for theta in &thetas {
        for f in [Observable::cos(theta.clone()), Observable::neg_dist(theta.clone())] {
            let mut bounds = Vec::new();
            for s in &systems {
                let lower = beta_lower(s, &f, config.max_period).map(|(v, _)| v);
                let upper = beta_upper(s, &f, config.grid_n);
                let ok = matches!((&lower, &upper), (Ok(l), Ok(u)) if l <= u);
                checks[3].record(ok, || format!("{} {:?}: lower {lower:?}, upper {upper:?}", s.name(), f));
                bounds.push((lower, upper));
            }
            let ok = match (&bounds[0], &bounds[1]) {
                ((Ok(dl), Ok(du)), (Ok(tl), Ok(tu))) => tl >= dl && tu >= du,
                _ => false,
            };
            checks[4].record(ok, || {
                format!("{} vs {} {:?}: {:?} vs {:?}", t.name(), d.name(), f, bounds[1], bounds[0])
            });
        }
    }
    CircleReport { config, checks }
}
