//! Simulation and verification laboratory for the one-dimensional nearest-neighbour
//! Ising chain in a random external field, in the regime of large coupling.
//!
//! The model on a window `[ℓ, r]` with boundary spins `a, b ∈ {−1, +1}` has energy
//!
//! ```text
//! H(σ) = J · Σ_{n=ℓ}^{r+1} σ_{n−1} σ_n  +  Σ_{n=ℓ}^{r} h_n σ_n ,
//!        σ_{ℓ−1} := a,  σ_{r+1} := b,
//! ```
//!
//! and partition function `Z = Σ_σ exp H(σ)`. Everything in this crate is organised
//! around the coupling scale `Γ = 2J` (the energy of one domain wall), the random
//! walk `S_n` of partial field sums, and the boundary-information chains
//!
//! ```text
//! l_n = log Z^{a+}_{ℓ,n} − log Z^{a−}_{ℓ,n},   r_n = log Z^{+b}_{n,r} − log Z^{−b}_{n,r},
//! ```
//!
//! which evolve by the smooth step map `y ↦ b_Γ(y + 2h)` and, in the zero-temperature
//! limit, by its hard-wall counterpart `y ↦ clamp(y + 2h, ±Γ)`.
//!
//! Modules:
//!
//! * [`disorder`] — field laws, reproducible per-site sampling, walk construction.
//! * [`transfer`] — exact log-partition functions, smooth chains, Gibbs sampling.
//! * [`extrema`] — Γ-extrema of the walk, record scanning, ladder epochs,
//!   zero-temperature spin profiles derived from extrema.
//! * [`reflected`] — hard-wall (clamped) chains, their closed forms and coalescence.
//! * [`rg`] — sign-run coarse-graining of the walk into bonds and bond decimation.
//! * [`oracle`] — brute-force enumeration references: partition functions, Gibbs
//!   marginals, ground-state (maximizer) families, finite-temperature limits.
//! * [`experiments`] — reproducible statistical experiments built on the above.
//!
//! All randomness is counter-based: the field value at a site is a pure function of
//! `(law, seed, stream, site)`, so enlarging a window never perturbs previously
//! sampled values and every experiment is bitwise reproducible at any thread count.

pub mod csvout;
pub mod disorder;
pub mod error;
pub mod experiments;
pub mod extrema;
pub mod oracle;
pub mod reflected;
pub mod rg;
pub mod rng;
pub mod transfer;

pub use error::RficError;

/// Convenience alias used by every fallible operation in the crate.
pub type Result<T> = std::result::Result<T, RficError>;
