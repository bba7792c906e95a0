//! Many-to-one two-sided matching markets with substitutable, q-separable
//! firm preferences.
//!
//! The crate covers the market model and its stability notions, the
//! worker-side lattice of stable matchings, deferred acceptance from both
//! sides, the Set Offering restabilization algorithm, exhaustive oracles for
//! small markets, and market transitions (worker retirement and firm entry).
//!
//! It is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod da;
pub mod disruption;
mod enumerate;
mod error;
mod ids;
mod lattice;
mod market;
mod matching;
mod preference;
mod set_offering;
pub mod stability;
pub mod validate;

pub use da::{da_firm_proposing, da_worker_proposing, da_worker_proposing_in_order};
pub use disruption::{
    induce, is_consistent, leads_to, restabilize, verify_transition_theorems, MarketTransition, NewFirm,
};
pub use enumerate::{
    achievable_firms, achievable_in, enumerate_fqs, enumerate_individually_rational, enumerate_stable, EnumLimits,
};
pub use error::Error;
pub use ids::{workers, FirmId, WorkerId, WorkerSet};
pub use lattice::{blair_dominates, dominates_firms, dominates_workers, join_workers, meet_workers, StableSet};
pub use market::{responsive_market, Market};
pub use matching::Matching;
pub use preference::{FirmPreference, FirmPreferenceBody, WorkerPreference};
pub use set_offering::{
    initial_available, initial_available_literal, run_set_offering, set_offering, SoIteration, SoTrace,
};
pub use stability::{blocking_pairs, envy_set, is_firm_quasi_stable, is_individually_rational, is_stable};
pub use validate::{validate_q_separable, validate_substitutable};
