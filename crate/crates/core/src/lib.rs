//! Ergodic optimization on finite multi-valued dynamical systems.
//!
//! A finite system is a set of states `0..n` with a relation `T`, stored as the
//! sorted list of its edges. The crate computes maximum cycle means, finite-horizon
//! averages, invariant measures and their extreme points, and subactions certifying
//! the maximal value.

pub mod cycles;
pub mod error;
pub mod flow;
pub mod format;
pub mod lp;
pub mod mea;
pub mod measures;
pub mod random;
pub mod scalar;
pub mod subaction;
pub mod system;
pub mod verify;

pub use cycles::{simple_cycles, Cycle};
pub use error::{MeaError, MeasureError, ParseError, SubactionError, SystemError};
pub use mea::{alpha_state, delta_finite_horizon, max_mean_cycle, MeaReport};
pub use measures::{extreme_invariant_measures, is_invariant, EdgeCirculation, VertexMeasure};
pub use scalar::{ratio, ExtendedReal, Rational, Scalar};
pub use subaction::{subaction_for_edge_function, subaction_for_state_function, SubactionResult};
pub use system::{EdgeFunction, FiniteMVSystem, StateFunction, StateId, StateSet};
