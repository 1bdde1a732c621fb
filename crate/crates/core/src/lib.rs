//! Exact dephasing dynamics of two entangled spin-1/2 particles coupled to
//! one shared or two independent spin-1/2 baths through `σz ⊗ σz`
//! interactions.
//!
//! The Hamiltonian is diagonal in the product basis, so every quantity here
//! is computed in closed form: decoherence factors are products over bath
//! spins, the reduced pair state is assembled entry by entry, and the
//! concurrence and CHSH quantity follow from that 4×4 matrix. The [`oracle`]
//! module evolves the full pair+bath state vector and traces the bath out,
//! which is what the analytic path is checked against.

pub mod chsh;
pub mod decoherence;
pub mod density;
pub mod entanglement;
pub mod error;
pub mod harness;
pub mod oracle;
pub mod types;

pub use error::{Error, Result};
pub use types::{
    bath_spin_from_angles, make_bell_state, Bath, BathLabel, BathSpin, DecoherenceFactors,
    DensityMatrix4, Environment, PairState,
};
