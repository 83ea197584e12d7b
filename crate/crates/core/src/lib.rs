//! Quantum billiard-ball clocks sent around a closed timelike curve.
//!
//! The modules are generic over the real scalar ([`scalar::Real`], implemented
//! for `f32` and `f64`); the aliases below fix it to `f64`.
//!
//! ```
//! use ctc_core::{dctc, gates::CircuitSpec, clock::ClockSpec};
//!
//! let circuit = CircuitSpec::with_delay_ratio(ClockSpec::unit_tick(2).unwrap(), 0.5);
//! let query = dctc::FixedPointQuery::new(circuit, 0.25);
//! let theta = dctc::analytic_cv(&query).unwrap();
//! assert!(query.channel().unwrap().residual(&theta).unwrap() < 1e-12);
//! ```

pub mod clock;
pub mod dctc;
pub mod error;
pub mod gates;
pub mod hilbert;
pub mod pctc;
pub mod scalar;

pub use error::{Error, Result};

pub type StateVector = hilbert::StateVector<f64>;
pub type DensityOperator = hilbert::DensityOperator<f64>;
pub type Operator = hilbert::Operator<f64>;
pub type Unitary = hilbert::Unitary<f64>;
pub type ClockSpec = clock::ClockSpec<f64>;
pub type CircuitSpec = gates::CircuitSpec<f64>;
pub type CtcChannel = dctc::CtcChannel<f64>;
pub type FixedPointQuery = dctc::FixedPointQuery<f64>;
pub type FixedPointFamily = dctc::FixedPointFamily<f64>;
pub type EcpSolution = dctc::EcpSolution<f64>;
pub type BipartiteState = pctc::BipartiteState<f64>;
