//! Piecewise-affine expanding multi-valued maps of the interval and the circle:
//! exact periodic orbits, expansion certificates, two-sided bounds on the maximum
//! ergodic average and barycentre hulls.

pub mod bounds;
pub mod error;
pub mod expansion;
pub mod hull;
pub mod observable;
pub mod orbits;
pub mod sweep;
pub mod system;
pub mod verify;

pub use bounds::{beta_lower, beta_upper, grid_mane, GridMane, OrbitTable, OuterGrid};
pub use error::CircleError;
pub use hull::{barycentre_hull, BarycentrePoint};
pub use expansion::{expansion_certificate, ExpansionCertificate};
pub use observable::Observable;
pub use orbits::{barycentre, enumerate_periodic_orbits, is_sturmian, PeriodicOrbit};
pub use sweep::{theta_sweep, Family, SweepRow};
pub use system::{doubling_map, pq_correspondence, three_branch_doubling, Branch, Metric, PiecewiseAffineMVSystem, Q};
