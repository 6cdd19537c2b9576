//! Numerical laboratory for non-autonomous parabolic implosion.
//!
//! A parabolic germ `f(w) = w + w^2 + a w^3 + ...` perturbed by
//! `eps_{k,n}^2` with `eps_{k,n} = pi/n + pi sigma_{k,n}/n^2 + ...` sends
//! `w_0` after `n` steps close to `L_{u_n}(w_0)`, where `L_u` is the Lavaurs
//! map of phase `u` and `u_n = (1/n) sum sigma_{k,n} G((k+1)/n)` with
//! `G(x) = 2 sin^2(pi x)`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod fatou;
pub mod germ;
pub mod implosion;
pub mod julia;
pub mod precision;
pub mod schedule;
pub mod verify;

pub use config::{parse_config, ConfigError, ExperimentConfig};
pub use fatou::{approx_abel, FatouError, FatouSolver, LavaursMap, Side};
pub use germ::{basin_entry, nonautonomous_orbit, BasinOutcome, Germ, GermError, OrbitTrace, Petal};
pub use implosion::{
    run_implosion, CoordinateFrame, ImplosionError, ImplosionOptions, ImplosionReport,
};
pub use julia::{render_basin, render_julia, render_julia_lavaurs, Bitmap, GridSpec, Label};
pub use precision::{DoubleDouble, Precision};
pub use schedule::{phase, weight_g, weighted_average, PhaseResult, SigmaSchedule};
pub use verify::{verify, Suite, VerifyReport};
