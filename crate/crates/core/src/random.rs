//! Seeded random instances for the oracle suites.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::scalar::{ratio, Rational};
use crate::system::{FiniteMVSystem, StateFunction};

/// Shape of a random instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InstanceKind {
    /// Each ordered pair is an edge independently.
    Relation,
    /// Exactly one successor per state.
    SingleValued,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub index: usize,
    pub kind: InstanceKind,
    pub system: FiniteMVSystem,
    pub f: StateFunction<Rational>,
}

/// Generator for instance `index` of the suite seeded by `seed`. Each instance has
/// its own ChaCha stream, so instances can be built in any order.
pub fn instance_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// A random system on at most `max_states` states with a rational state function.
///
/// Every fifth instance is single-valued. Relations use a random edge density, and
/// about one in ten is left without a guaranteed successor per state, so acyclic
/// systems occur.
pub fn random_instance(seed: u64, index: usize, max_states: usize) -> Instance {
    let mut rng = instance_rng(seed, index);
    let n = rng.gen_range(1..=max_states.max(1));
    let kind = if index % 5 == 4 {
        InstanceKind::SingleValued
    } else {
        InstanceKind::Relation
    };
    let mut edges = Vec::new();
    match kind {
        InstanceKind::SingleValued => {
            for x in 0..n {
                edges.push((x, rng.gen_range(0..n)));
            }
        }
        InstanceKind::Relation => {
            let density = rng.gen_range(0.1..0.55);
            let total = rng.gen_bool(0.9);
            for x in 0..n {
                let before = edges.len();
                for y in 0..n {
                    if rng.gen_bool(density) {
                        edges.push((x, y));
                    }
                }
                if total && edges.len() == before {
                    edges.push((x, rng.gen_range(0..n)));
                }
            }
        }
    }
    let system = FiniteMVSystem::new(n, edges).expect("generated edges are in range and distinct");
    let f = StateFunction((0..n).map(|_| random_rational(&mut rng)).collect());
    Instance {
        index,
        kind,
        system,
        f,
    }
}

/// Numerator in `-20..=20`, denominator in `1..=6`.
pub fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    ratio(rng.gen_range(-20..=20), rng.gen_range(1..=6))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_index() {
        for i in 0..20 {
            assert_eq!(random_instance(7, i, 8), random_instance(7, i, 8));
        }
        assert_ne!(random_instance(7, 3, 8), random_instance(8, 3, 8));
    }

    #[test]
    fn single_valued_kind() {
        let inst = random_instance(1, 4, 8);
        assert_eq!(inst.kind, InstanceKind::SingleValued);
        assert!(inst.system.is_single_valued());
    }

    #[test]
    fn mix_contains_acyclic_and_cyclic() {
        let cyclic = (0..300)
            .filter(|&i| random_instance(11, i, 8).system.orbit_space_nonempty())
            .count();
        assert!(cyclic > 200 && cyclic < 300, "{cyclic}");
    }
}
