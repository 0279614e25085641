//! Functions on `[0, 1]` whose ergodic averages are maximized.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::orbits::{barycentre, PeriodicOrbit};
use crate::system::Q;

/// A real function on `[0, 1]`, with a Lipschitz constant when one is known.
#[derive(Clone)]
pub enum Observable {
    /// `f_θ(x) = cos 2π(x - θ)`.
    Cos { theta: Q },
    /// `g_θ(x) = -|x - θ|`.
    NegDist { theta: Q },
    Const(Q),
    Custom {
        name: String,
        eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        lipschitz: Option<f64>,
    },
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

fn q64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

impl Observable {
    pub fn cos(theta: Q) -> Self {
        Observable::Cos { theta }
    }

    pub fn neg_dist(theta: Q) -> Self {
        Observable::NegDist { theta }
    }

    pub fn name(&self) -> String {
        match self {
            Observable::Cos { theta } => format!("cos:{theta}"),
            Observable::NegDist { theta } => format!("negdist:{theta}"),
            Observable::Const(c) => format!("const:{c}"),
            Observable::Custom { name, .. } => name.clone(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Observable::Cos { theta } => (TAU * (x - q64(theta))).cos(),
            Observable::NegDist { theta } => -(x - q64(theta)).abs(),
            Observable::Const(c) => q64(c),
            Observable::Custom { eval, .. } => eval(x),
        }
    }

    pub fn lipschitz(&self) -> Option<f64> {
        match self {
            Observable::Cos { .. } => Some(TAU),
            Observable::NegDist { .. } => Some(1.0),
            Observable::Const(_) => Some(0.0),
            Observable::Custom { lipschitz, .. } => *lipschitz,
        }
    }

    /// Mean of the function over the orbit points.
    pub fn orbit_average(&self, orbit: &PeriodicOrbit) -> f64 {
        let points = orbit.points_f64();
        self.average_from(&points, barycentre(&points))
    }

    /// Mean over `points`, given their barycentre. For `f_θ` this is
    /// `Re(e^{-2πiθ} b)`.
    pub fn average_from(&self, points: &[f64], bary: Complex64) -> f64 {
        match self {
            Observable::Cos { theta } => (Complex64::from_polar(1.0, -TAU * q64(theta)) * bary).re,
            Observable::Const(c) => q64(c),
            _ => points.iter().map(|&x| self.eval(x)).sum::<f64>() / points.len() as f64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mvdyn_core::scalar::ratio;

    fn orbit(points: &[(i64, i64)]) -> PeriodicOrbit {
        PeriodicOrbit {
            itinerary: vec![0; points.len()],
            points: points.iter().map(|&(p, q)| ratio(p, q)).collect(),
        }
    }

    #[test]
    fn averages_on_small_orbits() {
        let f0 = Observable::cos(ratio(0, 1));
        assert_eq!(f0.orbit_average(&orbit(&[(0, 1)])), 1.0);
        assert!((f0.orbit_average(&orbit(&[(1, 3), (2, 3)])) + 0.5).abs() < 1e-15);
        let c = Observable::Const(ratio(-7, 3));
        assert_eq!(c.orbit_average(&orbit(&[(1, 3), (2, 3)])), -7.0 / 3.0);
    }

    #[test]
    fn barycentre_route_matches_pointwise_mean() {
        let o = orbit(&[(1, 7), (2, 7), (4, 7)]);
        let pts = o.points_f64();
        for k in 0..16 {
            let f = Observable::cos(ratio(k, 16));
            let direct = pts.iter().map(|&x| f.eval(x)).sum::<f64>() / 3.0;
            assert!((f.orbit_average(&o) - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn neg_dist_values() {
        let g = Observable::neg_dist(ratio(1, 4));
        assert_eq!(g.eval(0.75), -0.5);
        assert_eq!(g.eval(0.25), 0.0);
        assert_eq!(g.lipschitz(), Some(1.0));
        let custom = Observable::Custom {
            name: "sq".into(),
            eval: Arc::new(|x| x * x),
            lipschitz: None,
        };
        assert_eq!(custom.lipschitz(), None);
        assert_eq!(custom.eval(0.5), 0.25);
    }
}
