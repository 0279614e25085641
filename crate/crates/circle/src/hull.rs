//! Barycentres of periodic orbits and their convex hull.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt::Write;

use num_complex::Complex64;
use num_traits::Zero;

use mvdyn_core::format::read_table;
use mvdyn_core::ParseError;

use crate::error::CircleError;
use crate::orbits::{barycentre, enumerate_periodic_orbits, is_sturmian, PeriodicOrbit};
use crate::system::{PiecewiseAffineMVSystem, Q};

/// Longest period [`barycentre_hull`] accepts.
pub const MAX_HULL_PERIOD: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct BarycentrePoint {
    pub id: usize,
    pub orbit: PeriodicOrbit,
    pub value: Complex64,
    pub on_hull: bool,
    pub sturmian: bool,
}

type P2 = (Q, Q);

fn exact(z: Complex64) -> P2 {
    let q = |v: f64| Q::from_float(v).expect("barycentres are finite");
    (q(z.re), q(z.im))
}

/// Sign of the turn `a -> b -> c`: `Greater` for counter-clockwise.
pub fn orientation(a: &P2, b: &P2, c: &P2) -> Ordering {
    let cross = (&b.0 - &a.0) * (&c.1 - &a.1) - (&b.1 - &a.1) * (&c.0 - &a.0);
    cross.cmp(&Q::zero())
}

/// Vertices of the convex hull in counter-clockwise order, starting from the
/// lowest-leftmost point. Points in the interior of an edge are not vertices.
pub fn hull_vertices(points: &[P2]) -> Vec<P2> {
    let mut pts: Vec<P2> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    if pts.len() < 3 {
        return pts;
    }
    pts.sort();
    let mut lower: Vec<P2> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && orientation(&lower[lower.len() - 2], &lower[lower.len() - 1], p) != Ordering::Greater {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<P2> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && orientation(&upper[upper.len() - 2], &upper[upper.len() - 1], p) != Ordering::Greater {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Barycentres of all periodic orbits up to `max_period`, marking hull vertices
/// and orbits that fit in an arc of length `arc`.
pub fn barycentre_hull(
    system: &PiecewiseAffineMVSystem,
    max_period: usize,
    arc: &Q,
) -> Result<Vec<BarycentrePoint>, CircleError> {
    if max_period > MAX_HULL_PERIOD {
        return Err(CircleError::PeriodTooLarge {
            requested: max_period,
            limit: MAX_HULL_PERIOD,
        });
    }
    let orbits = enumerate_periodic_orbits(system, max_period)?;
    let values: Vec<Complex64> = orbits.iter().map(|o| barycentre(&o.points_f64())).collect();
    let coords: Vec<P2> = values.iter().map(|&z| exact(z)).collect();
    let vertices: BTreeSet<P2> = hull_vertices(&coords).into_iter().collect();
    Ok(orbits
        .into_iter()
        .zip(values)
        .zip(coords)
        .enumerate()
        .map(|(id, ((orbit, value), c))| BarycentrePoint {
            id,
            sturmian: is_sturmian(&orbit.points, arc, system.metric()),
            orbit,
            value,
            on_hull: vertices.contains(&c),
        })
        .collect())
}

/// Hull vertices in counter-clockwise order, one point per distinct barycentre.
pub fn hull_polygon(points: &[BarycentrePoint]) -> Vec<Complex64> {
    let on: Vec<P2> = points.iter().filter(|p| p.on_hull).map(|p| exact(p.value)).collect();
    hull_vertices(&on)
        .into_iter()
        .map(|(x, y)| Complex64::new(mvdyn_core::Scalar::to_f64(&x), mvdyn_core::Scalar::to_f64(&y)))
        .collect()
}

/// Whether consecutive vertices always turn counter-clockwise.
pub fn is_convex_polygon(vertices: &[Complex64]) -> bool {
    let v: Vec<P2> = vertices.iter().map(|&z| exact(z)).collect();
    let n = v.len();
    n < 3 || (0..n).all(|i| orientation(&v[i], &v[(i + 1) % n], &v[(i + 2) % n]) == Ordering::Greater)
}

pub fn hull_csv(points: &[BarycentrePoint]) -> String {
    let mut s = String::from("id,period,itinerary,re,im,on_hull,sturmian\n");
    for p in points {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            p.id,
            p.orbit.period(),
            p.orbit.itinerary_string(),
            p.value.re,
            p.value.im,
            u8::from(p.on_hull),
            u8::from(p.sturmian)
        );
    }
    s
}

/// A parsed hull CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct HullRow {
    pub id: usize,
    pub period: usize,
    pub itinerary: String,
    pub value: Complex64,
    pub on_hull: bool,
    pub sturmian: bool,
}

impl From<&BarycentrePoint> for HullRow {
    fn from(p: &BarycentrePoint) -> Self {
        Self {
            id: p.id,
            period: p.orbit.period(),
            itinerary: p.orbit.itinerary_string(),
            value: p.value,
            on_hull: p.on_hull,
            sturmian: p.sturmian,
        }
    }
}

pub fn parse_hull_csv(text: &str) -> Result<Vec<HullRow>, ParseError> {
    let (header, rows) = read_table(text)?;
    let expected = ["id", "period", "itinerary", "re", "im", "on_hull", "sturmian"];
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
            let bad = |what: &str| ParseError::Document {
                line: i + 2,
                column: 1,
                message: format!("bad {what}"),
            };
            if r.len() != 7 {
                return Err(bad("field count"));
            }
            let flag = |s: &str, what: &str| match s {
                "0" => Ok(false),
                "1" => Ok(true),
                _ => Err(bad(what)),
            };
            Ok(HullRow {
                id: r[0].parse().map_err(|_| bad("id"))?,
                period: r[1].parse().map_err(|_| bad("period"))?,
                itinerary: r[2].clone(),
                value: Complex64::new(r[3].parse().map_err(|_| bad("re"))?, r[4].parse().map_err(|_| bad("im"))?),
                on_hull: flag(&r[5], "on_hull")?,
                sturmian: flag(&r[6], "sturmian")?,
            })
        })
        .collect()
}

/// Unit circle, all barycentres, and the hull boundary.
pub fn hull_svg(points: &[BarycentrePoint]) -> String {
    let (cx, cy, r) = (400.0, 300.0, 260.0);
    let map = |z: Complex64| (cx + r * z.re, cy - r * z.im);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 800 600" width="800" height="600">"#);
    let _ = writeln!(s, r#"<rect x="0" y="0" width="800" height="600" fill="white"/>"#);
    let _ = writeln!(s, r##"<circle cx="{cx}" cy="{cy}" r="{r}" fill="none" stroke="#999999"/>"##);
    let _ = writeln!(s, r##"<line x1="{}" y1="{cy}" x2="{}" y2="{cy}" stroke="#dddddd"/>"##, cx - r, cx + r);
    let _ = writeln!(s, r##"<line x1="{cx}" y1="{}" x2="{cx}" y2="{}" stroke="#dddddd"/>"##, cy - r, cy + r);
    for p in points.iter().filter(|p| !p.on_hull) {
        let (x, y) = map(p.value);
        let _ = writeln!(s, r##"<circle cx="{x:.2}" cy="{y:.2}" r="1" fill="#888888"/>"##);
    }
    let poly: Vec<String> = hull_polygon(points)
        .into_iter()
        .map(|z| {
            let (x, y) = map(z);
            format!("{x:.2},{y:.2}")
        })
        .collect();
    let _ = writeln!(s, r##"<polygon fill="none" stroke="#2c6fbb" stroke-width="1.5" points="{}"/>"##, poly.join(" "));
    for p in points.iter().filter(|p| p.on_hull) {
        let (x, y) = map(p.value);
        let fill = if p.sturmian { "#2c6fbb" } else { "#c0392b" };
        let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{fill}"/>"#);
    }
    s.push_str("</svg>\n");
    s
}

/// `|b| <= 1`, with equality exactly for fixed points (up to `tol`).
pub fn modulus_ok(p: &BarycentrePoint, tol: f64) -> bool {
    let m = p.value.norm();
    m <= 1.0 + tol && ((p.orbit.period() == 1) == ((m - 1.0).abs() <= tol))
}
