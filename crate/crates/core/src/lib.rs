//! Polarization analysis over news-comment corpora.
//!
//! Given media, articles and comments annotated with reply, sympathy and
//! antipathy counts, the crate discovers two opposed media groups from the
//! correlation structure of per-user sympathy ratios, derives continuous user
//! leanings, measures homophily in the co-commenting network, profiles how each
//! media group responds to commenters across the leaning spectrum, and
//! classifies articles into media groups from response statistics alone.
//!
//! A seeded synthetic generator ([`synth`]) plants ground truth for every stage,
//! and [`report`] runs the stages end to end while persisting every
//! intermediate table.

pub mod affect;
pub mod binning;
pub mod classify;
pub mod conet;
pub mod corpus;
mod error;
pub mod leaning;
pub mod mediaclust;
pub mod report;
pub mod stats;
pub mod synth;

pub use error::{Error, ErrorClass, Result};
