//! Wave patterns at a semiclassical sine-Gordon separatrix crossing.
//!
//! * [`ratpoly`]: exact polynomials and rational functions over ℚ, with Sturm root isolation.
//! * [`pii`]: the rational Painlevé-II hierarchy and its exact identities.
//! * [`inner_rhp`]: Airy-based inner model solution, Schlesinger ladder, expansion data.
//! * [`initdata`]: impulse profiles, criticality constants, quadratures, coordinates.
//! * [`waveform`]: region tiling, kink / grazing / multiscale models, exact reference solutions.
//! * [`pde`]: direct velocity-Verlet solver for the Cauchy problem, used as an oracle.
//! * [`par`]: grid-fill parallelism behind the `parallel` feature.

pub mod ratpoly;
pub mod pii;
pub mod inner_rhp;
pub mod initdata;
pub mod waveform;
pub mod par;
pub mod pde;
