use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use mvdyn_circle::{doubling_map, pq_correspondence, three_branch_doubling, PiecewiseAffineMVSystem, Q};
use mvdyn_core::{FiniteMVSystem, Rational, Scalar, StateFunction};

#[derive(Parser, Debug)]
#[command(name = "mvdyn", version, about = "Ergodic optimization for multi-valued dynamical systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// System document (JSON with n_states, edges, optional f_state / f_edge).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,

    /// Built-in system: z4, identity:N, selfloop:c, doubling, threebranch, pq:P,Q.
    #[arg(long, global = true)]
    pub builtin: Option<String>,

    /// Function: indicator:i, const:c, cos:theta, negdist:theta, cos, negdist or file.
    #[arg(long = "f", global = true)]
    pub f: Option<String>,

    #[arg(long, global = true)]
    pub max_period: Option<usize>,

    /// Number of cells in the outer grid.
    #[arg(long, global = true)]
    pub grid: Option<usize>,

    /// Slack tolerance, as a decimal or p/q.
    #[arg(long, global = true)]
    pub tol: Option<String>,

    /// Sweep theta over j/(2K) for j = 0..=K.
    #[arg(long, global = true)]
    pub theta_grid: Option<usize>,

    /// Use this beta instead of the computed maximum.
    #[arg(long, global = true)]
    pub beta_override: Option<String>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Largest n for the finite-horizon averages.
    #[arg(long, global = true)]
    pub horizon: Option<usize>,

    /// Random instances in the verification suite.
    #[arg(long, global = true)]
    pub instances: Option<usize>,

    /// Largest random system in the verification suite (at most 8).
    #[arg(long, global = true)]
    pub max_states: Option<usize>,

    /// Replace the maximum cycle mean with a slightly wrong one, to show that
    /// the verification suite notices.
    #[arg(long, global = true, hide = true)]
    pub inject_fault: bool,

    /// Directory for output files. Without it, results go to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Maximum ergodic average, maximizing cycle and finite-horizon averages.
    Mea,
    /// Extreme invariant measures.
    Measures,
    /// Calibrated potential, subaction and edge slacks.
    Subaction,
    /// Lower and upper bounds on beta over a range of theta.
    Sweep,
    /// Barycentres of periodic orbits and their convex hull.
    Hull,
    /// Randomized oracle suites.
    Verify,
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    Rational::parse_value(s).map_err(|e| anyhow!("{e}"))
}

/// A finite system with the function it comes with, if any.
pub struct FiniteInput {
    pub system: FiniteMVSystem,
    pub f_state: Option<StateFunction<Rational>>,
    pub f_edge: Option<mvdyn_core::EdgeFunction<Rational>>,
}

pub enum Builtin {
    Finite(FiniteInput),
    Circle(PiecewiseAffineMVSystem),
}

pub fn builtin(name: &str) -> Result<Builtin> {
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    let finite = |system: FiniteMVSystem, f_state| Builtin::Finite(FiniteInput { system, f_state, f_edge: None });
    Ok(match (head, arg) {
        ("z4", None) => finite(FiniteMVSystem::z4(), None),
        ("identity", Some(n)) => {
            let n: usize = n.parse().with_context(|| format!("bad state count `{n}`"))?;
            finite(FiniteMVSystem::identity(n)?, None)
        }
        ("selfloop", Some(c)) => {
            let c = c.strip_prefix("c=").unwrap_or(c);
            let c = parse_rational(c)?;
            finite(FiniteMVSystem::identity(1)?, Some(StateFunction(vec![c])))
        }
        ("doubling", None) => Builtin::Circle(doubling_map()),
        ("threebranch", None) => Builtin::Circle(three_branch_doubling()),
        ("pq", Some(pq)) => {
            let (p, q) = pq.split_once(',').ok_or_else(|| anyhow!("expected pq:P,Q"))?;
            let p: i64 = p.trim().parse().with_context(|| format!("bad P `{p}`"))?;
            let q: i64 = q.trim().parse().with_context(|| format!("bad Q `{q}`"))?;
            Builtin::Circle(pq_correspondence(p, q)?)
        }
        _ => bail!("unknown builtin `{name}`"),
    })
}

/// Arc length used to call an orbit of a builtin circle system Sturmian.
pub fn sturmian_arc(name: &str) -> Result<Q> {
    Ok(match name.split_once(':') {
        Some(("pq", pq)) => {
            let q = pq.split_once(',').map(|(_, q)| q).unwrap_or("");
            let q: i64 = q.trim().parse().with_context(|| format!("bad Q in `{name}`"))?;
            mvdyn_core::ratio(1, q)
        }
        _ => match name {
            "doubling" => mvdyn_core::ratio(1, 2),
            "threebranch" => mvdyn_core::ratio(1, 4),
            _ => bail!("no Sturmian arc for `{name}`"),
        },
    })
}
