//! Time maximization of the transfer probability and parameter sweeps.

mod sweep;
mod time_max;

pub use sweep::{sweep, Argmax, Axis, SweepGrid, SweepOptions, SweepParameter};
pub use time_max::{
    assistance_gain, max_over_time, maximize_profile, AssistanceGain, TimeMax, TimeWindow, SECTOR_CUTOFF,
    TIE_TOLERANCE,
};
