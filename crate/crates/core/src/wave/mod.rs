//! Wave modes with a Hölder propagation speed.
//!
//! The mode equation is `v'' + λ²c(t)v = 0`. On `[0, δ_n]` the speed `c_n` is a
//! rescaled copy of `γ`, which pumps energy at the rate `2ε_n mλ_n`; beyond
//! `δ_n` it agrees with a Lipschitz tail and energies are controlled by the
//! sandwich in [`energy`].

pub mod blowup;
pub mod energy;
pub mod gevrey;
pub mod ingredient;
pub mod ode;
pub mod schedule;
pub mod speeds;

pub use blowup::{blowup_demo, explicit_solution_error, BlowupConfig, BlowupRow, BlowupSample, BlowupTable};
pub use energy::{energy_bounds_check, EnergyBounds, EnergyReport};
pub use gevrey::{gevrey_norm, GevreyKind, GevreyNorm, GevreyVector};
pub use ingredient::{basic_ingredient, envelope_growth_fit, verify_ode_identity, BasicIngredient};
pub use ode::{
    integrate_mode, integrate_mode_with, integrator_registry, FnSpeed, ModeIntegrator, ModeOptions, ModeSolution,
    Speed,
};
pub use schedule::{derive_hgamma, derive_hgamma_with, speed_schedule, speed_schedule_with_tail, SpeedProfile};
pub use speeds::{random_lipschitz_speed, resonant_speed, PiecewiseLinearSpeed};
