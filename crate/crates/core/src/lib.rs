//! Word-level category structure of speech registers.
//!
//! Tokens listed in a corpus manifest are turned into cube-root compressed
//! mel filterbank frames, compared with DTW over frame angles, and scored per
//! speaker and register for ABX discriminability, medoid separation,
//! within-type variability and mean normalized edit distance. Registers are
//! then compared across speakers with paired t-tests.
//!
//! The acoustic code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the `f64` precision the experiment runners use.

pub mod audio;
pub mod cache;
pub mod corpus;
pub mod distance;
pub mod error;
pub mod experiments;
pub mod features;
pub mod metrics;
pub mod scalar;
pub mod stats;
pub mod synth;

pub use scalar::Scalar;

pub type FeatureSequence = features::FeatureSequence<f64>;
pub type DistanceTable = distance::DistanceTable<f64>;
pub type Frontend = features::Frontend<f64>;
pub type Pcm = audio::Pcm<f64>;

pub type FeatureSequence32 = features::FeatureSequence<f32>;
pub type DistanceTable32 = distance::DistanceTable<f32>;
pub type Frontend32 = features::Frontend<f32>;
