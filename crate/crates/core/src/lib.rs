//! Continuum Gibbs particle systems in the plane with a finite spin space.
//!
//! The crate is organised bottom-up:
//!
//! - [`particles`]: spins, particles, windows, configurations, norms and the
//!   seedable random streams every other module draws from.
//! - [`potentials`]: well-behaved radial interactions, Potts-type pair
//!   potentials with disc hard cores, the smooth/small decomposition
//!   `U = Ū − u` and Hamiltonians.
//! - [`sampler`]: Poisson base process and a grand-canonical
//!   Metropolis–Hastings chain for the conditional Gibbs distribution.
//! - [`bonds`]: the Bernoulli bond process with probabilities `1 − e^{−u}`,
//!   the augmented bond set `B₊`, clusters and cluster ranges.
//! - [`transform`]: the deformed translation (forward, backward and inverse),
//!   its Jacobian density and the good-configuration functionals.
//! - [`verify`]: executable checks built on top of all of the above.
//! - [`cli`]: the batch front door used by the `contgibbs` binary.
//!
//! Runnable walkthroughs live in `examples/`.

pub mod bonds;
pub mod cells;
pub mod cli;
pub mod error;
pub mod extreal;
pub mod particles;
pub mod potentials;
pub mod quadrature;
pub mod rng;
pub mod sampler;
pub mod stats;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
pub use extreal::ExtReal;
pub use particles::{distance, restrict, Configuration, Norm, Particle, Spin, Window};
pub use rng::{rng_stream, Stream};
