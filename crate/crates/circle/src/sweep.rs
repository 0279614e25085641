//! Bounds on `β(f_θ)` or `β(g_θ)` across a range of `θ`.

use std::fmt::Write;

use rayon::prelude::*;

use mvdyn_core::format::read_table;
use mvdyn_core::scalar::{format_rational, Scalar};
use mvdyn_core::{ParseError, Rational};

use crate::bounds::{OrbitTable, OuterGrid};
use crate::error::CircleError;
use crate::observable::Observable;
use crate::system::{PiecewiseAffineMVSystem, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `f_θ(x) = cos 2π(x - θ)`.
    Cos,
    /// `g_θ(x) = -|x - θ|`.
    NegDist,
}

impl Family {
    pub fn at(self, theta: Q) -> Observable {
        match self {
            Family::Cos => Observable::cos(theta),
            Family::NegDist => Observable::neg_dist(theta),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub theta: Q,
    pub system: String,
    pub beta_lower: f64,
    pub beta_upper: f64,
    pub witness_period: usize,
}

impl SweepRow {
    pub fn gap(&self) -> f64 {
        self.beta_upper - self.beta_lower
    }
}

/// `θ = j / (2k)` for `j = 0..=k`, covering `[0, 1/2]`.
pub fn half_circle_thetas(k: usize) -> Vec<Q> {
    (0..=k).map(|j| Q::new((j as i64).into(), (2 * k as i64).into())).collect()
}

/// One row per `(θ, system)`, ordered by `θ` and then by the order of `systems`.
pub fn theta_sweep(
    systems: &[PiecewiseAffineMVSystem],
    family: Family,
    thetas: &[Q],
    max_period: usize,
    grid_n: usize,
) -> Result<Vec<SweepRow>, CircleError> {
    let prepared = systems
        .iter()
        .map(|s| Ok((s.name().to_string(), OrbitTable::new(s, max_period)?, OuterGrid::new(s, grid_n)?)))
        .collect::<Result<Vec<_>, CircleError>>()?;
    let rows: Vec<Vec<SweepRow>> = thetas
        .par_iter()
        .map(|theta| {
            let f = family.at(theta.clone());
            prepared
                .iter()
                .map(|(name, table, grid)| {
                    let (beta_lower, witness) = table.best(&f).ok_or(CircleError::NoOrbit)?;
                    Ok(SweepRow {
                        theta: theta.clone(),
                        system: name.clone(),
                        beta_lower,
                        beta_upper: grid.upper_bound(&f)?,
                        witness_period: witness.period(),
                    })
                })
                .collect::<Result<Vec<_>, CircleError>>()
        })
        .collect::<Result<_, _>>()?;
    Ok(rows.into_iter().flatten().collect())
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("theta,system,beta_lower,beta_upper,witness_period\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            format_rational(&r.theta),
            r.system,
            r.beta_lower,
            r.beta_upper,
            r.witness_period
        );
    }
    s
}

pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>, ParseError> {
    let (header, rows) = read_table(text)?;
    let expected = ["theta", "system", "beta_lower", "beta_upper", "witness_period"];
    if header != expected {
        return Err(ParseError::Document {
            line: 1,
            column: 1,
            message: format!("expected header {}", expected.join(",")),
        });
    }
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            let bad = |message: &str| ParseError::Document {
                line: i + 2,
                column: 1,
                message: message.to_string(),
            };
            if r.len() != 5 {
                return Err(bad("expected 5 fields"));
            }
            Ok(SweepRow {
                theta: Rational::parse_value(&r[0])?,
                system: r[1].clone(),
                beta_lower: r[2].parse().map_err(|_| bad("bad beta_lower"))?,
                beta_upper: r[3].parse().map_err(|_| bad("bad beta_upper"))?,
                witness_period: r[4].parse().map_err(|_| bad("bad witness_period"))?,
            })
        })
        .collect()
}

const COLOURS: [&str; 4] = ["#c0392b", "#2c6fbb", "#27864a", "#8e44ad"];

/// Line plot of the lower bounds (solid) and upper bounds (dashed) per system.
pub fn sweep_svg(rows: &[SweepRow]) -> String {
    let mut systems: Vec<&str> = Vec::new();
    for r in rows {
        if !systems.contains(&r.system.as_str()) {
            systems.push(&r.system);
        }
    }
    let thetas: Vec<f64> = rows.iter().map(|r| mvdyn_core::Scalar::to_f64(&r.theta)).collect();
    let t_max = thetas.iter().cloned().fold(0.0_f64, f64::max).max(1e-9);
    let y_min = rows.iter().map(|r| r.beta_lower).fold(f64::INFINITY, f64::min).min(0.0);
    let y_max = rows.iter().map(|r| r.beta_upper).fold(f64::NEG_INFINITY, f64::max).max(1.0);
    let (left, right, top, bottom) = (70.0, 770.0, 30.0, 540.0);
    let px = |t: f64| left + (right - left) * t / t_max;
    let py = |y: f64| bottom - (bottom - top) * (y - y_min) / (y_max - y_min);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 800 600" width="800" height="600">"#);
    let _ = writeln!(s, r#"<rect x="0" y="0" width="800" height="600" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        right - left,
        bottom - top
    );
    let _ = writeln!(s, r#"<text x="{}" y="580" font-size="14" text-anchor="middle">theta (0 to {t_max:.3})</text>"#, (left + right) / 2.0);
    let _ = writeln!(s, r#"<text x="10" y="{}" font-size="14">{y_max:.3}</text>"#, top + 5.0);
    let _ = writeln!(s, r#"<text x="10" y="{bottom}" font-size="14">{y_min:.3}</text>"#);
    for (k, name) in systems.iter().enumerate() {
        let colour = COLOURS[k % COLOURS.len()];
        let mine: Vec<(&SweepRow, f64)> = rows.iter().zip(&thetas).filter(|(r, _)| r.system == *name).map(|(r, &t)| (r, t)).collect();
        for (dash, pick) in [("", true), (r#" stroke-dasharray="6 4""#, false)] {
            let pts: Vec<String> = mine
                .iter()
                .map(|(r, t)| {
                    let y = if pick { r.beta_lower } else { r.beta_upper };
                    format!("{:.2},{:.2}", px(*t), py(y))
                })
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5"{dash} points="{}"/>"#,
                pts.join(" ")
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="14" fill="{colour}">{name}</text>"#,
            right - 150.0,
            top + 20.0 + 18.0 * k as f64
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{doubling_map, three_branch_doubling};
    use mvdyn_core::scalar::ratio;

    #[test]
    fn thetas_cover_half_circle() {
        let t = half_circle_thetas(4);
        assert_eq!(t, vec![ratio(0, 1), ratio(1, 8), ratio(1, 4), ratio(3, 8), ratio(1, 2)]);
    }

    #[test]
    fn small_sweep_is_ordered_and_round_trips() {
        let systems = [doubling_map(), three_branch_doubling()];
        let rows = theta_sweep(&systems, Family::Cos, &half_circle_thetas(8), 8, 128).unwrap();
        assert_eq!(rows.len(), 18);
        assert_eq!(rows[0].beta_lower, 1.0);
        assert_eq!(rows[1].beta_lower, 1.0);
        for pair in rows.chunks(2) {
            assert_eq!(pair[0].theta, pair[1].theta);
            assert!(pair[1].beta_lower >= pair[0].beta_lower);
            assert!(pair[1].beta_upper >= pair[0].beta_upper);
            assert!(pair.iter().all(|r| r.beta_lower <= r.beta_upper));
        }
        let csv = sweep_csv(&rows);
        assert_eq!(parse_sweep_csv(&csv).unwrap(), rows);
        let svg = sweep_svg(&rows);
        assert!(svg.starts_with("<svg") && svg.contains(r#"viewBox="0 0 800 600""#));
        assert_eq!(svg.matches("<polyline").count(), 4);
    }

    #[test]
    fn neg_dist_family() {
        let rows = theta_sweep(&[doubling_map()], Family::NegDist, &[ratio(0, 1), ratio(1, 2)], 6, 64).unwrap();
        // 0 is fixed, so g_0 has maximum 0.
        assert_eq!(rows[0].beta_lower, 0.0);
        assert!(rows[1].beta_lower < 0.0);
    }

    #[test]
    fn csv_rejects_bad_header() {
        assert!(parse_sweep_csv("a,b\n1,2\n").is_err());
    }
}
