//! Grid functions on boxes and balls, and the integral operators acting on them.

pub mod domain;
pub mod grid;
pub mod maximal;
pub mod modular;
pub mod representation;
pub mod riesz;
pub mod testfn;

pub use domain::{Domain, DomainKind};
pub use grid::{Grid, GridFunction, Layout};
pub use maximal::{ball_average, check_average_jensen, check_potential_maximal, maximal_at, maximal_function, radius_ladder};
pub use modular::{char_ball_norm_bounds, check_holder, luxemburg_by, luxemburg_norm, modular, modular_scaled, EPS_NORM};
pub use representation::{representation_formula_check, representation_value, EPS_REP};
pub use riesz::{riesz_at, riesz_potential, riesz_radial, riesz_radial_lower_bound, sphere_kernel};
pub use testfn::{Profile, RadialTest};
