//! Uplink scheduling analysis for periodic-burst haptic traffic sharing an
//! N-channel radio with compound Poisson background traffic.
//!
//! * [`radio`] and [`traffic`] hold the configuration types and arrival
//!   generators.
//! * [`analysis`] decides per scheme which haptic packets are sent or
//!   dropped and what capacity remains.
//! * [`snc`] turns the remaining capacity into a service curve and a
//!   probabilistic delay bound for background traffic.
//! * [`sim`] replays everything slot by slot as an independent check.
//! * [`experiment`] loads configs and runs sweeps for the command-line tool.

pub mod analysis;
pub mod error;
pub mod experiment;
pub mod radio;
pub mod sim;
pub mod snc;
pub mod time;
pub mod traffic;

pub use error::{ConfigIssue, Error, Result};
pub use radio::{RadioConfig, SchedulingScheme};
pub use time::Time;
pub use traffic::{HapticTrafficModel, LeftoverTrafficModel};
