//! The magnetic flow in action coordinates, its guiding-centre slow-fast
//! form, fixed-step integration and orbit diagnostics.

mod closure;
mod curvature;
mod flow;
mod integrate;
mod state;

pub use closure::{closure_test, ClosureOptions, ClosureReport};
pub use curvature::geodesic_curvature;
pub use flow::{
    hamiltonian, kinetic_momentum, ode_rhs, ode_rhs_slowfast, reduced_energy, relative_equilibria,
    RelativeEquilibria,
};
pub use integrate::{integrate, integrate_slowfast, GuidingTrajectory, Method, Trajectory};
pub use state::{
    angle_difference, guiding_transform, inverse_guiding_transform, normalize_angle, scale_change,
    unscale, GuidingState, PhaseState,
};
