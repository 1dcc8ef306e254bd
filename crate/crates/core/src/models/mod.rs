//! Random graph models, their parameters and the conditioning events.

mod modified;
mod params;
mod potential;
mod sample;

pub use modified::{listed_subgraphs, prune, sample_modified_sbm, RemovalPolicy};
pub use params::{ModelParams, OTTER_ALPHA};
pub use potential::{
    classify_self_bad, event_e_indicator, event_e_rate, find_bad_subgraph, is_admissible_er, phi_potential,
    self_bad_subgraphs, upsilon_potential, BadClass, EventModel, EventRate, Potential,
};
pub use sample::{
    random_permutation, sample_correlated_er, sample_correlated_sbm, sample_er, sample_sbm, subsample, trial_rng,
    CorrelatedSample,
};
