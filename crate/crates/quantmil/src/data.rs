//! Core data model shared by every other module: instances, bags, datasets,
//! quantile specifications, and class posteriors.
//!
//! All types are plain immutable values; nothing here mutates after
//! construction, so everything can be shared freely across threads.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense class identifier in `0..C-1`. Class names live in
/// [`Dataset::class_names`].
pub type ClassId = usize;

#[derive(Debug, Error, PartialEq)]
pub enum DataError {
    #[error("instance has no features")]
    EmptyInstance,
    #[error("instance contains a non-finite feature value")]
    NonFiniteFeature,
    #[error("bag {id}: empty bag")]
    EmptyBag { id: String },
    #[error("bag {id}: inconsistent dimension (expected {expected}, found {found})")]
    DimensionMismatch {
        id: String,
        expected: usize,
        found: usize,
    },
    #[error("duplicate bag id {id}")]
    DuplicateBagId { id: String },
    #[error("bag {id}: label {label} out of range for {class_count} classes")]
    LabelOutOfRange {
        id: String,
        label: usize,
        class_count: usize,
    },
    #[error("a dataset needs at least two classes, got {0}")]
    TooFewClasses(usize),
    #[error("dataset has no bags")]
    EmptyDataset,
    #[error("quantile level {0} outside [0, 1]")]
    QuantileOutOfRange(f64),
    #[error("quantile levels must be strictly increasing")]
    UnsortedQuantiles,
    #[error("quantile spec has no levels")]
    EmptyQuantileSpec,
    #[error("posterior has no entries")]
    EmptyPosterior,
    #[error("posterior entry {0} outside [0, 1]")]
    PosteriorOutOfRange(f64),
    #[error("posterior entries sum to {0}, expected 1")]
    PosteriorNotNormalized(f64),
}

/// One feature vector inside a bag.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub features: Vec<f64>,
}

impl Instance {
    /// Builds an instance, rejecting empty or non-finite feature vectors.
    pub fn new(features: Vec<f64>) -> Result<Self, DataError> {
        if features.is_empty() {
            return Err(DataError::EmptyInstance);
        }
        if !features.iter().all(|v| v.is_finite()) {
            return Err(DataError::NonFiniteFeature);
        }
        Ok(Self { features })
    }

    pub fn dim(&self) -> usize {
        self.features.len()
    }
}

/// An ordered collection of instances sharing one id and one label.
///
/// Instance order is preserved on ingestion but carries no meaning: every
/// representation downstream is permutation-invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Bag {
    pub id: String,
    /// Class id; `None` for unlabeled (test-time) bags.
    pub label: Option<ClassId>,
    pub instances: Vec<Instance>,
}

impl Bag {
    /// Builds a bag, rejecting empty bags and mixed instance dimensions.
    pub fn new(
        id: impl Into<String>,
        label: Option<ClassId>,
        instances: Vec<Instance>,
    ) -> Result<Self, DataError> {
        let id = id.into();
        let Some(first) = instances.first() else {
            return Err(DataError::EmptyBag { id });
        };
        let dim = first.dim();
        for instance in &instances {
            if instance.dim() != dim {
                return Err(DataError::DimensionMismatch {
                    id,
                    expected: dim,
                    found: instance.dim(),
                });
            }
        }
        Ok(Self {
            id,
            label,
            instances,
        })
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// Feature dimension shared by all instances. Zero for an (invalid)
    /// empty bag.
    pub fn dim(&self) -> usize {
        self.instances.first().map_or(0, Instance::dim)
    }

    /// Values of feature `feature` across all instances, in instance order.
    pub fn feature_column(&self, feature: usize) -> Vec<f64> {
        self.instances
            .iter()
            .map(|x| x.features[feature])
            .collect()
    }
}

/// A corpus of bags plus the class-name table giving meaning to labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub bags: Vec<Bag>,
    pub class_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset and enforces every invariant checked by
    /// [`validate_dataset`]; duplicate bag ids are rejected here, at
    /// construction.
    pub fn validated(bags: Vec<Bag>, class_names: Vec<String>) -> Result<Self, DataError> {
        if bags.is_empty() {
            return Err(DataError::EmptyDataset);
        }
        if class_names.len() < 2 {
            return Err(DataError::TooFewClasses(class_names.len()));
        }
        let dim = bags[0].dim();
        let mut seen = std::collections::HashSet::new();
        for bag in &bags {
            if !seen.insert(bag.id.clone()) {
                return Err(DataError::DuplicateBagId { id: bag.id.clone() });
            }
            if bag.instances.is_empty() {
                return Err(DataError::EmptyBag { id: bag.id.clone() });
            }
            for instance in &bag.instances {
                if instance.dim() != dim {
                    return Err(DataError::DimensionMismatch {
                        id: bag.id.clone(),
                        expected: dim,
                        found: instance.dim(),
                    });
                }
                if !instance.features.iter().all(|v| v.is_finite()) {
                    return Err(DataError::NonFiniteFeature);
                }
            }
            if let Some(label) = bag.label {
                if label >= class_names.len() {
                    return Err(DataError::LabelOutOfRange {
                        id: bag.id.clone(),
                        label,
                        class_count: class_names.len(),
                    });
                }
            }
        }
        Ok(Self { bags, class_names })
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    /// Feature dimension of the first bag; zero if the dataset is empty.
    pub fn dim(&self) -> usize {
        self.bags.first().map_or(0, Bag::dim)
    }

    pub fn bag(&self, id: &str) -> Option<&Bag> {
        self.bags.iter().find(|b| b.id == id)
    }
}

/// Checks every dataset invariant and returns one human-readable line per
/// breach; an empty list means the dataset is valid.
pub fn validate_dataset(ds: &Dataset) -> Vec<String> {
    let mut violations = Vec::new();
    if ds.bags.is_empty() {
        violations.push("dataset has no bags".to_string());
    }
    if ds.class_names.len() < 2 {
        violations.push(format!(
            "dataset declares {} classes; at least 2 required",
            ds.class_names.len()
        ));
    }
    let dim = ds.dim();
    let mut seen = std::collections::HashSet::new();
    for bag in &ds.bags {
        if !seen.insert(bag.id.as_str()) {
            violations.push(format!("duplicate bag id {}", bag.id));
        }
        if bag.instances.is_empty() {
            violations.push(format!("bag {}: empty bag", bag.id));
            continue;
        }
        if bag.instances.iter().any(|x| x.dim() != bag.dim()) || bag.dim() != dim {
            violations.push(format!("bag {}: inconsistent dimension", bag.id));
        }
        if bag
            .instances
            .iter()
            .any(|x| x.features.iter().any(|v| !v.is_finite()))
        {
            violations.push(format!("bag {}: non-finite feature value", bag.id));
        }
        if bag.dim() == 0 {
            violations.push(format!("bag {}: zero-dimensional instances", bag.id));
        }
        if let Some(label) = bag.label {
            if label >= ds.class_names.len() {
                violations.push(format!(
                    "bag {}: label {} out of range for {} classes",
                    bag.id,
                    label,
                    ds.class_names.len()
                ));
            }
        }
    }
    violations
}

/// An ordered list of quantile levels in `[0, 1]` used to summarize each
/// feature's marginal distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QuantileSpec {
    levels: Vec<f64>,
}

impl QuantileSpec {
    /// Builds a spec from strictly increasing levels in `[0, 1]`.
    pub fn new(levels: Vec<f64>) -> Result<Self, DataError> {
        if levels.is_empty() {
            return Err(DataError::EmptyQuantileSpec);
        }
        for &q in &levels {
            if !q.is_finite() || !(0.0..=1.0).contains(&q) {
                return Err(DataError::QuantileOutOfRange(q));
            }
        }
        if levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(DataError::UnsortedQuantiles);
        }
        Ok(Self { levels })
    }

    /// The `{0, 1}` spec: per-feature minimum and maximum.
    pub fn minimax() -> Self {
        Self {
            levels: vec![0.0, 1.0],
        }
    }

    /// Parses a comma-separated level list such as `"0.1,0.11,0.5,1"`.
    pub fn parse(text: &str) -> Result<Self, DataError> {
        let levels = text
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| DataError::QuantileOutOfRange(f64::NAN))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        Self::new(levels)
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

impl Default for QuantileSpec {
    /// The 10%, 11%, 50% and 100% levels.
    fn default() -> Self {
        Self {
            levels: vec![0.10, 0.11, 0.50, 1.00],
        }
    }
}

impl std::fmt::Display for QuantileSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.levels.iter().map(|q| q.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// A probability distribution over the `C` classes.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassPosterior {
    probs: Vec<f64>,
}

impl ClassPosterior {
    /// Builds a posterior, rejecting entries outside `[0, 1]` or a total
    /// farther than `1e-9` from one.
    pub fn new(probs: Vec<f64>) -> Result<Self, DataError> {
        if probs.is_empty() {
            return Err(DataError::EmptyPosterior);
        }
        for &p in &probs {
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(DataError::PosteriorOutOfRange(p));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(DataError::PosteriorNotNormalized(sum));
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn class_count(&self) -> usize {
        self.probs.len()
    }

    /// Index of the largest probability; ties go to the lowest class.
    pub fn argmax(&self) -> ClassId {
        argmax_tie_low(&self.probs).expect("posterior is never empty")
    }
}

/// Index of the maximum value, breaking ties toward the lowest index.
/// Returns `None` for an empty slice.
pub fn argmax_tie_low(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}
