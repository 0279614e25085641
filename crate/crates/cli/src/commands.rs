use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};

use mvdyn_circle::hull::{hull_csv, hull_polygon, hull_svg, is_convex_polygon, modulus_ok};
use mvdyn_circle::sweep::{half_circle_thetas, sweep_csv, sweep_svg};
use mvdyn_circle::verify::{run_circle_suite, CircleSuiteConfig};
use mvdyn_circle::{barycentre_hull, doubling_map, theta_sweep, three_branch_doubling, Family};
use mvdyn_core::format::{measures_csv, parse_system_document};
use mvdyn_core::mea::{max_cycle_mean_value, MeaReport};
use mvdyn_core::scalar::render;
use mvdyn_core::subaction::subaction_with_beta;
use mvdyn_core::verify::{karp_alpha, run_suite, SuiteConfig};
use mvdyn_core::{
    extreme_invariant_measures, subaction_for_edge_function, subaction_for_state_function, ExtendedReal, FiniteMVSystem,
    MeaError, Rational, StateFunction, SubactionError, SubactionResult,
};

use crate::args::{builtin, parse_rational, sturmian_arc, Builtin, Cli, Command, FiniteInput};
use crate::Failure;

type Outcome = Result<(), Failure>;

pub fn run(cli: &Cli) -> Outcome {
    match cli.command {
        Command::Mea => mea(cli),
        Command::Measures => measures(cli),
        Command::Subaction => subaction(cli),
        Command::Sweep => sweep(cli),
        Command::Hull => hull(cli),
        Command::Verify => verify(cli),
    }
}

/// Writes `files` into `--out`, or prints them after `report` on stdout.
fn emit(cli: &Cli, report: &str, files: &[(&str, &str)]) -> Outcome {
    print!("{report}");
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for (name, body) in files {
                write_file(dir, name, body)?;
            }
        }
        None => {
            for (name, body) in files {
                if !name.ends_with(".svg") && *body != report {
                    print!("\n# {name}\n{body}");
                }
            }
        }
    }
    Ok(())
}

fn write_file(dir: &Path, name: &str, body: &str) -> Outcome {
    let path = dir.join(name);
    fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn finite_input(cli: &Cli) -> Result<FiniteInput, Failure> {
    match (&cli.input, &cli.builtin) {
        (Some(_), Some(_)) => Err(anyhow!("give either --input or --builtin, not both").into()),
        (Some(path), None) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let doc = parse_system_document::<Rational>(&text)
                .map_err(|e| anyhow!("{}: {e}", path.display()))?;
            Ok(FiniteInput {
                system: doc.system,
                f_state: doc.f_state,
                f_edge: doc.f_edge,
            })
        }
        (None, Some(name)) => match builtin(name)? {
            Builtin::Finite(f) => Ok(f),
            Builtin::Circle(_) => Err(anyhow!("`{name}` is a circle system; this command needs a finite one").into()),
        },
        (None, None) => Err(anyhow!("give --input FILE or --builtin NAME").into()),
    }
}

/// The state function selected by `--f`, if it is one.
fn state_function(cli: &Cli, input: &FiniteInput) -> Result<Option<StateFunction<Rational>>, Failure> {
    let n = input.system.n_states();
    let Some(choice) = cli.f.as_deref() else {
        return Ok(input.f_state.clone());
    };
    if choice == "file" {
        return Ok(input.f_state.clone());
    }
    let (kind, arg) = choice.split_once(':').ok_or_else(|| anyhow!("bad --f `{choice}`"))?;
    match kind {
        "indicator" => {
            let i: usize = arg.parse().with_context(|| format!("bad state `{arg}`"))?;
            if i >= n {
                return Err(anyhow!("indicator state {i} is outside 0..{n}").into());
            }
            let mut v = vec![mvdyn_core::ratio(0, 1); n];
            v[i] = mvdyn_core::ratio(1, 1);
            Ok(Some(StateFunction(v)))
        }
        "const" => Ok(Some(StateFunction::constant(n, parse_rational(arg)?))),
        _ => Err(anyhow!("--f `{choice}` does not apply to a finite system").into()),
    }
}

fn tolerance(cli: &Cli) -> Result<Rational, Failure> {
    let tol = match &cli.tol {
        Some(t) => parse_rational(t)?,
        None => mvdyn_core::ratio(0, 1),
    };
    if tol < mvdyn_core::ratio(0, 1) {
        return Err(anyhow!("--tol must be non-negative").into());
    }
    Ok(tol)
}

fn mea_failure(e: MeaError) -> Failure {
    match e {
        MeaError::NoCycle => Failure::NoCycle,
        e => Failure::Input(e.into()),
    }
}

fn mea(cli: &Cli) -> Outcome {
    let input = finite_input(cli)?;
    let f = state_function(cli, &input)?.ok_or_else(|| anyhow!("mea needs a state function: --f or f_state in the input"))?;
    let horizon = cli.horizon.unwrap_or(64);
    if horizon == 0 {
        return Err(anyhow!("--horizon must be positive").into());
    }
    let horizons: Vec<usize> = (1..=horizon).collect();
    let report = MeaReport::compute(&input.system, &f, &horizons).map_err(mea_failure)?;
    let mut text = format!("n_states = {}\nn_edges = {}\n", input.system.n_states(), input.system.n_edges());
    text.push_str(&report.to_text());
    emit(cli, &text, &[("mea_report.txt", &text), ("delta.csv", &report.delta_csv())])
}

fn measures(cli: &Cli) -> Outcome {
    let input = finite_input(cli)?;
    let ms = extreme_invariant_measures(&input.system);
    let text = format!("n_states = {}\nextreme_measures = {}\n", input.system.n_states(), ms.len());
    emit(cli, &text, &[("measures.csv", &measures_csv(input.system.n_states(), &ms))])
}

fn subaction_failure(e: SubactionError) -> Failure {
    match e {
        SubactionError::Mea(m) => mea_failure(m),
        e => Failure::Validation(e.to_string()),
    }
}

fn subaction(cli: &Cli) -> Outcome {
    let input = finite_input(cli)?;
    let tol = tolerance(cli)?;
    let system = &input.system;
    let f_state = state_function(cli, &input)?;
    let lifted = match (&f_state, &input.f_edge) {
        (Some(f), _) => f.lift(system),
        (None, Some(f)) => f.clone(),
        (None, None) => return Err(anyhow!("subaction needs --f, f_state or f_edge").into()),
    };
    let (result, cycle): (SubactionResult<Rational>, Option<Vec<usize>>) = match &cli.beta_override {
        Some(b) => {
            let beta = parse_rational(b)?;
            if max_cycle_mean_value(system, &lifted).map_err(mea_failure)?.is_none() {
                return Err(Failure::NoCycle);
            }
            (subaction_with_beta(system, &lifted, &beta, &tol).map_err(subaction_failure)?, None)
        }
        None => {
            let (r, c) = match &f_state {
                Some(f) => subaction_for_state_function(system, f, &tol),
                None => subaction_for_edge_function(system, &lifted, &tol),
            }
            .map_err(subaction_failure)?;
            (r, Some(c.states().to_vec()))
        }
    };
    let mut text = String::new();
    let _ = writeln!(text, "beta = {}", render(&result.beta));
    if let Some(c) = &cycle {
        let c: Vec<String> = c.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(text, "cycle = {}", c.join(" "));
    }
    let _ = writeln!(text, "bound_m = {}", render(&result.bound_m));
    let min = result.min_slack().map(render).unwrap_or_else(|| "none".into());
    let _ = writeln!(text, "min_slack = {min}");
    let _ = writeln!(text, "tight_edges = {}", result.tight.iter().filter(|&&t| t).count());
    let unreachable = result.phi.iter().filter(|p| matches!(p, ExtendedReal::NegInf)).count();
    let _ = writeln!(text, "phi_neg_inf_states = {unreachable}");
    let _ = writeln!(text, "tolerance = {}", render(&result.tolerance));
    emit(
        cli,
        &text,
        &[("states.csv", &result.states_csv()), ("edges.csv", &result.edges_csv(system, &lifted))],
    )
}

fn family(cli: &Cli) -> Result<Family, Failure> {
    match cli.f.as_deref() {
        None | Some("cos") => Ok(Family::Cos),
        Some("negdist") => Ok(Family::NegDist),
        Some(other) => Err(anyhow!("sweep takes --f cos or --f negdist, not `{other}`").into()),
    }
}

fn sweep(cli: &Cli) -> Outcome {
    let fam = family(cli)?;
    let systems = match &cli.builtin {
        None => vec![doubling_map(), three_branch_doubling()],
        Some(name) => match builtin(name)? {
            Builtin::Circle(s) => vec![s],
            Builtin::Finite(_) => return Err(anyhow!("sweep needs a circle system").into()),
        },
    };
    let k = cli.theta_grid.unwrap_or(128);
    let max_period = cli.max_period.unwrap_or(14);
    let grid = cli.grid.unwrap_or(2048);
    if k == 0 {
        return Err(anyhow!("--theta-grid must be positive").into());
    }
    let thetas = half_circle_thetas(k);
    let rows = theta_sweep(&systems, fam, &thetas, max_period, grid).map_err(|e| anyhow!("{e}"))?;

    let mut problems = Vec::new();
    for r in &rows {
        if r.beta_lower > r.beta_upper {
            problems.push(format!("{} at theta {}: lower {} > upper {}", r.system, r.theta, r.beta_lower, r.beta_upper));
        }
    }
    if systems.len() == 2 {
        for pair in rows.chunks(2) {
            if pair[1].beta_lower < pair[0].beta_lower {
                problems.push(format!("theta {}: {} lower bound below {}", pair[0].theta, pair[1].system, pair[0].system));
            }
        }
    }
    if fam == Family::Cos {
        for r in rows.iter().filter(|r| r.theta == mvdyn_core::ratio(0, 1)) {
            if r.beta_lower != 1.0 {
                problems.push(format!("{} at theta 0: lower bound {} is not 1", r.system, r.beta_lower));
            }
        }
    }
    let max_gap = rows.iter().map(|r| r.gap()).fold(0.0_f64, f64::max);
    let small = rows.iter().filter(|r| r.gap() <= 0.02).count();
    let mut text = String::new();
    let _ = writeln!(text, "rows = {}", rows.len());
    let _ = writeln!(text, "max_period = {max_period}");
    let _ = writeln!(text, "grid = {grid}");
    let _ = writeln!(text, "max_gap = {max_gap}");
    let _ = writeln!(text, "rows_with_gap_at_most_0.02 = {small}");
    let _ = writeln!(text, "checks = {}", if problems.is_empty() { "PASS" } else { "FAIL" });
    emit(cli, &text, &[("sweep.csv", &sweep_csv(&rows)), ("sweep.svg", &sweep_svg(&rows))])?;
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure::Validation(problems.join("; ")))
    }
}

fn hull(cli: &Cli) -> Outcome {
    let name = cli.builtin.clone().unwrap_or_else(|| "pq:2,3".to_string());
    let system = match builtin(&name)? {
        Builtin::Circle(s) => s,
        Builtin::Finite(_) => return Err(anyhow!("hull needs a circle system").into()),
    };
    let arc = sturmian_arc(&name)?;
    let max_period = cli.max_period.unwrap_or(10);
    let points = barycentre_hull(&system, max_period, &arc).map_err(|e| anyhow!("{e}"))?;
    let on: Vec<_> = points.iter().filter(|p| p.on_hull).collect();
    let polygon = hull_polygon(&points);
    let mut problems = Vec::new();
    if let Some(p) = points.iter().find(|p| !modulus_ok(p, 1e-12)) {
        problems.push(format!("orbit {} has |barycentre| = {}", p.id, p.value.norm()));
    }
    if !is_convex_polygon(&polygon) {
        problems.push("hull polygon is not convex".to_string());
    }
    let mut text = String::new();
    let _ = writeln!(text, "system = {name}");
    let _ = writeln!(text, "max_period = {max_period}");
    let _ = writeln!(text, "arc = {}", render(&arc));
    let _ = writeln!(text, "orbits = {}", points.len());
    let _ = writeln!(text, "hull_orbits = {}", on.len());
    let _ = writeln!(text, "hull_vertices = {}", polygon.len());
    let _ = writeln!(text, "hull_orbits_sturmian = {}", on.iter().filter(|p| p.sturmian).count());
    let _ = writeln!(text, "checks = {}", if problems.is_empty() { "PASS" } else { "FAIL" });
    emit(cli, &text, &[("hull.csv", &hull_csv(&points)), ("hull.svg", &hull_svg(&points))])?;
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure::Validation(problems.join("; ")))
    }
}

fn faulty_alpha(system: &FiniteMVSystem, f: &StateFunction<Rational>) -> ExtendedReal<Rational> {
    match karp_alpha(system, f) {
        ExtendedReal::Finite(a) if system.n_states() > 3 => ExtendedReal::Finite(a + mvdyn_core::ratio(1, 1000)),
        other => other,
    }
}

fn verify(cli: &Cli) -> Outcome {
    let defaults = SuiteConfig::default();
    let max_states = cli.max_states.unwrap_or(defaults.max_states);
    if max_states == 0 || max_states > 8 {
        return Err(anyhow!("--max-states must be between 1 and 8").into());
    }
    let seed = cli.seed.unwrap_or(defaults.seed);
    let config = SuiteConfig {
        seed,
        instances: cli.instances.unwrap_or(defaults.instances),
        max_states,
    };
    let alpha = if cli.inject_fault { faulty_alpha } else { karp_alpha };
    let core = run_suite(config, alpha);
    let circle = run_circle_suite(CircleSuiteConfig {
        seed,
        ..CircleSuiteConfig::default()
    });
    let text = format!("{}{}", core.to_text(), circle.to_text());
    emit(cli, &text, &[("verify.txt", &text)])?;
    if core.passed() && circle.passed() {
        Ok(())
    } else {
        Err(Failure::Validation("see the report for counterexamples".into()))
    }
}
