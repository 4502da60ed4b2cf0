//! Periodic transport fields.
//!
//! Fields live on an `n × n` periodic square of side `L` whose points are
//! `−L/2 + jL/n`. Supports are kept away from the boundary, so the torus stands
//! in for the plane with no periodization error beyond rounding.

pub mod advect;
pub mod fields;
pub mod grid;
pub mod norms;
pub mod schedule;
pub mod snapshot;
pub mod verify;

pub use advect::{advect, advect_from, interpolator_registry, mixing_fit, AdvectOptions, CubicLagrange, Evolution, Interpolator, Linear, MixingFit};
pub use fields::{
    base_registry, blob, rescale_triple, sample_theta, sample_velocity, standin_mixer, BaseField, BaseTriple, Cellular,
    FnVelocity, RescaledTriple, RescaledVelocity, Rotation, ShearMixer, Superposition, VelocityField,
};
pub use grid::{Grid, ScalarField2D, TimeTag, VectorField2D};
pub use norms::{check_admissible, hs_norm, w1p_norm, AdmissibilityReport, HsNorm};
pub use schedule::{
    blowup_budget, check_schedule, combined_sobolev_factor, default_schedule, first_disjoint_n, unit_ball_volume,
    BudgetRow, BudgetTable, RescaleSchedule, ScheduleReport,
};
pub use snapshot::{read_snapshot, write_snapshot};
pub use verify::{scaling_law_check, ScalingLawReport};
