//! Computational laboratory for binary classification under permutation
//! invariances: exact combinatorial dimension calculators, orientation-based
//! transductive predictors, a minimax orientation game solved as a linear
//! program, the full roster of learners (empirical risk minimization with and
//! without data augmentation, boosting-based adaptive learners, sample
//! compression) and a Monte-Carlo experiment harness over the canonical
//! hard constructions.

pub mod core;
pub mod dims;
pub mod experiment;
pub(crate) mod flow;
pub mod learners;
pub mod mugame;
pub mod oig;
pub(crate) mod simplex;

pub use crate::core::{
    augment, classify_setting, close_group, err, err_sample, invariance_parameter,
    is_g_invariant_distribution, sample, Atom, CoreError, GroupAction, Hypothesis,
    HypothesisClass, InstanceSpace, Label, LabeledDistribution, OrbitPartition, Predictor,
    Sample, Setting,
};
