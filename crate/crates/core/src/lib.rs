//! Explanation hacking over Rashomon sets of tabular classifiers.
//!
//! The crate covers both sides of the problem:
//!
//! * the attack: train a zoo of defensible pipelines, explain each one with
//!   Kernel SHAP on a frozen sample, then either cherry-pick candidates whose
//!   explanation supports a chosen conclusion ([`search::cherry_pick`]) or
//!   rank them with a scalarized lie/performance/obviousness objective
//!   ([`search::directed_search`]);
//! * the defense: build the distribution of an explanation metric over an
//!   honest search and locate a reported value in its tails
//!   ([`audit::locate`]).
//!
//! Modules are layered bottom-up: [`tabular`] → [`zoo`] → [`shapley`] →
//! [`summary`] → [`search`] → [`audit`], with [`persist`] reading and writing
//! search-result directories.

pub mod audit;
pub mod persist;
pub mod rng;
pub mod search;
pub mod shapley;
pub mod summary;
pub mod tabular;
pub mod zoo;

/// Seed used by every experiment unless the caller overrides it.
pub const DEFAULT_SEED: u64 = 42;
