//! Pair potentials: well-behaved radial functions, Potts-type potentials,
//! the smooth/small decomposition and Hamiltonians.

mod decomposition;
mod file;
mod hamiltonian;
mod potts;
mod smooth;
mod well_behaved;

pub use decomposition::{
    build_decomposition, cutoff_fk, e_deriv_fk, DecompositionParams, DecomposedPotential, SmallPart, SmoothPart,
};
pub use file::{ModelSpec, PairSpec, MODEL_SCHEMA_VERSION};
pub use hamiltonian::{hamiltonian, hamiltonian_brute_force, hamiltonian_particles, interaction_energy, PairEnergy};
pub use potts::{eval_pair_potential, pair_region, PairRegion, PottsPotential};
pub use smooth::{Mollifier, SmoothRadial};
pub use well_behaved::{decompose_well_behaved, ContinuousPart, Cubic, PiecewiseCubic, WellBehavedFn};
