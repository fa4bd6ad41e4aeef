//! Quantifies the risk that a topic present in a document collection is
//! absent from the identified (produced) set yet present in the missed set.
//!
//! The crate combines:
//!
//! - a closed-form missed-topic risk model ([`fomo`]);
//! - generalized coupon-collector simulation over multi-label topic data
//!   ([`coverage`]);
//! - a desk-scale text pipeline — tokenization ([`text`]), topic extraction
//!   by collapsed-Gibbs LDA ([`lda`]), relevance classification
//!   ([`classify`]), and a continuous-active-learning review simulation
//!   ([`cal`]);
//! - seeded synthetic-data generators that serve as ground-truth oracles
//!   ([`synth`]);
//! - shared statistics: power-law fitting, sequence entropy rates, and
//!   nearest-rank percentiles ([`stats`]).
//!
//! Everything stochastic draws from an explicitly specified 64-bit
//! generator ([`rng`]) seeded per task, so identical inputs produce
//! identical outputs on any platform and with any number of worker threads.

pub mod cal;
pub mod classify;
pub mod coverage;
pub mod error;
pub mod fomo;
pub mod lda;
pub mod rng;
pub mod stats;
pub mod synth;
pub mod text;

pub use error::{Error, Result};
