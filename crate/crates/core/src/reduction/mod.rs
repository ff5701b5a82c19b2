//! The reduced one-degree-of-freedom system of slow motions: turning
//! points, radial period, apsidal advance and the `h⁴` closure condition.

mod apsidal;
mod hsweep;
mod taylor;
mod turning;

pub use apsidal::{
    apsidal_angle, apsidal_limit, apsidal_report, limit_period, radial_period, reduce_sweep,
    write_sweep_csv, ApsidalReport, APSIDAL_TOLERANCE, PERIOD_TOLERANCE,
};
pub use hsweep::{apsidal_h_sweep, longitude_advance, orbit_for_latitudes, HSweep, SweepPoint, SWEEP_POWERS};
pub use taylor::{h4_coefficient, taylor_jet, FJet, H4Coefficient};
pub use turning::{effective_potential, turning_points, ReducedParams, TurningPoints};
