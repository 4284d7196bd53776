//! Numerical laboratory for the effective boson-spin model of a polarized
//! nuclear-ensemble quantum memory.
//!
//! A single conduction electron couples through the hyperfine contact
//! interaction to `N` nuclear spins of size `I₀`. In the low-excitation
//! sector the collective nuclear lowering operator
//!
//! ```text
//! B = Σ_j g_j I_-^(j) / sqrt(2 I₀ Σ_j g_j²)
//! ```
//!
//! behaves as a single bosonic mode and the electron-nuclei system reduces to
//! a resonant Jaynes-Cummings model. The crate builds both sides of that
//! statement:
//!
//! * [`couplings`]: coupling profiles `{g_j}`, homogeneity metrics and the
//!   orthonormal mode family used for the auxiliary modes `C_k`.
//! * [`fockspace`]: invariant-subspace bases `V_n` of fixed total `J_z` and
//!   exact sparse operators on them.
//! * [`hamiltonian`]: the full hyperfine Hamiltonian, its
//!   `H_R + H_S + H_p` decomposition and the effective single-mode model.
//! * [`spectra`]: dense eigensolves, analytic effective spectra and their
//!   comparison.
//! * [`dynamics`]: the write/read storage protocol, effective and exact.
//! * [`decoherence`]: thermal dephasing by the auxiliary modes.
//! * [`verify`]: the invariant suite run by `nucmem verify`.
//!
//! Units: `ħ = 1`, couplings in units of a reference `g₀ = 1`. For a typical
//! dot the revival period `2π/g` is of order `10⁻⁷ s`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod couplings;
pub mod decoherence;
pub mod dynamics;
pub mod error;
pub mod fockspace;
pub mod hamiltonian;
pub mod io;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
