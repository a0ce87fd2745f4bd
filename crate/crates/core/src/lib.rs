//! Binary phase configuration of a reconfigurable surface, treated as a
//! black-box search problem.
//!
//! [`channel`] simulates correlated Ricean links and the resulting SNR,
//! [`objective`] wraps any SNR source behind one trait, [`optimizers`] holds
//! cross-entropy and the local-search baselines, and [`harness`] runs seeded
//! repeated trials and sweeps. [`cli`] backs the `rislab` binary.
//!
//! ```
//! use rislab::objective::SimulatedObjective;
//! use rislab::optimizers::ce_optimize;
//! use rislab::scenario::Scenario;
//! use rislab::seed::{trial_rng, Stream};
//!
//! let s = Scenario::default().with_elements(16);
//! let channel = s.channel_model().unwrap().draw(&mut trial_rng(1, 0, Stream::Channel));
//! let res = ce_optimize(&SimulatedObjective::new(channel), &s.ce_params(), &mut trial_rng(1, 0, Stream::Optimizer)).unwrap();
//! assert!(res.evaluations <= 1501);
//! ```

pub mod channel;
pub mod configuration;
pub mod objective;
pub mod optimizers;
pub mod scenario;
pub mod seed;
pub mod harness;
pub mod cli;
