//! Numerical constructions and verifiers for three families of pathological
//! examples: Hölder functions with no approximately differentiable points
//! (the multi-bump machinery), wave modes with derivative loss, and rescaled
//! transport fields.
//!
//! Modules are layered bottom up:
//!
//! * [`interval`]: exact interval-set algebra and the dyadic families `U_n`, `K_n`.
//! * [`holder`]: grid estimators for Hölder and Lipschitz constants.
//! * [`multibump`]: bumps, multi-bump functions, the extension lemma and the
//!   parameter bookkeeping of the empty-interior argument.
//! * [`wave`]: the oscillating speed, mode integrators, energies and Gevrey norms.
//! * [`transport`]: periodic grid fields, spectral norms, rescaling schedules
//!   and a semi-Lagrangian solver.
//!
//! Interchangeable algorithms (bump shapes, integrators, base fields,
//! interpolation kernels) are registered by name in a [`registry::Registry`].

pub mod error;
pub mod fn1d;
pub mod holder;
pub mod interval;
pub mod multibump;
pub mod registry;
pub mod stats;
pub mod transport;
pub mod wave;

pub use error::{Error, Result};
pub use fn1d::Fn1D;
