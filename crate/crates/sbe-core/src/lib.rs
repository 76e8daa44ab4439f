//! Stochastic linear optimization over polytope decision sets under
//! adversarially corrupted rewards.
//!
//! The crate is organized as a set of strategy families behind small traits,
//! registered by name and selected at runtime:
//!
//! - [`geometry`]: validated polytopes (paired V-rep/H-rep), the
//!   maximum-volume inscribed ellipsoid with a per-instance containment
//!   certificate, and the orthogonal exploration basis derived from it.
//! - [`env`]: linear reward models with sub-Gaussian noise, corruption
//!   strategies sealed round-by-round before the action is revealed, and the
//!   corruption budget ledger.
//! - [`learner`]: the epoch-based support-basis-exploration learner plus
//!   non-robust baselines (optimism and explore-then-commit), all behind the
//!   [`learner::Learner`] trait.
//! - [`harness`]: experiment orchestration, pseudo-regret traces, sweeps over
//!   corruption budgets, concentration helpers, and confidence-bound checks
//!   that require harness-side access to the hidden parameter.
//! - [`config`]: the JSON experiment configuration shared by the library and
//!   the command-line front end.
//!
//! The learner-facing API never exposes the hidden vector, realized
//! corruption, or actual rewards; only the harness sees those.

pub mod config;
pub mod env;
pub mod geometry;
pub mod harness;
pub mod learner;
pub mod linalg;
