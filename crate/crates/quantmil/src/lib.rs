//! Multiple-instance learning built around quantile bag representations.
//!
//! A *bag* is a variable-size collection of feature vectors (*instances*)
//! that share a single label. Instead of classifying instances one by one,
//! each bag is summarized by a few per-feature order statistics, giving a
//! fixed-length vector that any ordinary classifier can consume. The crate
//! ships the full pipeline this was built for — classifying stained-cell
//! microscope slides where every cell in a slide carries the slide's label:
//!
//! - [`data`] — instances, bags, datasets, quantile specs, posteriors.
//! - [`imaging`] — histogram equalization, Gabor filter banks, and the
//!   63-dimensional per-cell texture features.
//! - [`representation`] — quantile and min/max bag vectors.
//! - [`classify`] — multinomial logistic regression and a one-vs-all
//!   L1-regularized linear SVM.
//! - [`combine`] — majority vote, mean and product rules, label propagation.
//! - [`pipeline`] — bag-level and instance-level train/predict plumbing.
//! - [`eval`] — train/test split and leave-one-bag-out protocols, confusion
//!   matrices, per-bag reports.
//! - [`synth`] — seeded synthetic bag generators for benchmarking.
//! - [`fileio`] — manifest, feature cache, bag-vector, model, and report
//!   file formats used by the `quantmil` binary.

pub mod classify;
pub mod cli;
pub mod combine;
pub mod data;
pub mod eval;
pub mod fileio;
pub mod imaging;
pub mod pipeline;
pub mod representation;
pub mod synth;

pub use data::{Bag, ClassId, ClassPosterior, Dataset, Instance, QuantileSpec};
pub use representation::{bag_minimax_rep, bag_quantile_rep, quantile_value, BagVector};
