//! Problem setting: finite instance spaces, permutation group actions,
//! hypothesis classes, labeled distributions and samples.
//!
//! Everything downstream (dimension calculators, graph predictors, the
//! orientation game, learners, experiments) works over these types. All
//! structures are finite, immutable after construction and deterministic:
//! the same inputs always produce the same internal orderings.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Label = u8;

/// Probabilities must sum to one within this tolerance.
pub const PROB_TOLERANCE: f64 = 1e-12;
/// Error comparisons treat values within this tolerance as equal.
pub const ERR_TOLERANCE: f64 = 1e-9;
/// Group closures larger than this are refused.
pub const DEFAULT_CLOSURE_CAP: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("instance ids must be unique, `{0}` repeats")]
    DuplicateInstance(String),
    #[error("unknown instance id `{0}`")]
    UnknownInstance(String),
    #[error("generator {index} is not a permutation of 0..{n}")]
    InvalidPermutation { index: usize, n: usize },
    #[error("group closure exceeds cap of {cap} elements")]
    SizeLimitExceeded { cap: usize },
    #[error("hypothesis {index} has length {got}, expected {want}")]
    LabelLengthMismatch { index: usize, got: usize, want: usize },
    #[error("labels must be 0 or 1, hypothesis {index} has {value}")]
    InvalidLabel { index: usize, value: u8 },
    #[error("hypothesis class must be nonempty")]
    EmptyClass,
    #[error("distribution atoms must have probability in (0,1], got {0}")]
    InvalidProbability(f64),
    #[error("distribution probabilities sum to {0}, not 1")]
    ProbabilityMassMismatch(f64),
    #[error("instance {0} appears with two different labels")]
    AmbiguousLabel(usize),
    #[error("distribution is not invariant: orbit of instance {0} carries both labels")]
    NotGInvariant(usize),
    #[error("sample is empty")]
    EmptySample,
    #[error("instance index {0} out of range")]
    InstanceOutOfRange(usize),
}

/// Finite instance space; instances are referred to by dense indices,
/// the ids only matter for I/O.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceSpace {
    ids: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl InstanceSpace {
    pub fn new(ids: Vec<String>) -> Result<Self, CoreError> {
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(CoreError::DuplicateInstance(id.clone()));
            }
        }
        Ok(Self { ids, index })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn lookup(&self, id: &str) -> Result<usize, CoreError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| CoreError::UnknownInstance(id.to_string()))
    }

    /// Rebuilds the id index after deserialization.
    pub fn reindex(&mut self) {
        self.index = self
            .ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i))
            .collect();
    }
}

/// Partition of the instance space into orbits. Orbits are listed in
/// order of their smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPartition {
    orbit_id: Vec<usize>,
    orbits: Vec<Vec<usize>>,
}

impl OrbitPartition {
    pub fn orbit_of(&self, x: usize) -> usize {
        self.orbit_id[x]
    }

    pub fn members(&self, orbit: usize) -> &[usize] {
        &self.orbits[orbit]
    }

    pub fn count(&self) -> usize {
        self.orbits.len()
    }

    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    /// True when `x` and `y` lie in the same orbit.
    pub fn same_orbit(&self, x: usize, y: usize) -> bool {
        self.orbit_id[x] == self.orbit_id[y]
    }
}

/// A permutation group acting on `0..n`, given by generators. The orbit
/// partition is precomputed; the full closure is only materialized on
/// demand because it can be exponentially larger than the generators.
#[derive(Debug, Clone)]
pub struct GroupAction {
    n: usize,
    generators: Vec<Vec<usize>>,
    orbits: OrbitPartition,
}

impl GroupAction {
    pub fn new(n: usize, generators: Vec<Vec<usize>>) -> Result<Self, CoreError> {
        for (index, g) in generators.iter().enumerate() {
            if g.len() != n || !is_permutation(g) {
                return Err(CoreError::InvalidPermutation { index, n });
            }
        }
        let orbits = orbit_partition(n, &generators);
        Ok(Self { n, generators, orbits })
    }

    /// The trivial action (every orbit a singleton).
    pub fn identity(n: usize) -> Self {
        Self::new(n, Vec::new()).expect("identity action is always valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Vec<usize>] {
        &self.generators
    }

    pub fn orbits(&self) -> &OrbitPartition {
        &self.orbits
    }
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &v in p {
        if v >= p.len() || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

/// Connected components under the generator maps. Generators are
/// bijections, so components equal group orbits without materializing
/// the closure.
fn orbit_partition(n: usize, generators: &[Vec<usize>]) -> OrbitPartition {
    let mut orbit_id = vec![usize::MAX; n];
    let mut orbits = Vec::new();
    for start in 0..n {
        if orbit_id[start] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut members = vec![start];
        orbit_id[start] = id;
        let mut queue = vec![start];
        while let Some(x) = queue.pop() {
            for g in generators {
                let y = g[x];
                if orbit_id[y] == usize::MAX {
                    orbit_id[y] = id;
                    members.push(y);
                    queue.push(y);
                }
            }
        }
        members.sort_unstable();
        orbits.push(members);
    }
    OrbitPartition { orbit_id, orbits }
}

/// BFS closure of the generated group, as sorted permutation arrays.
/// Fails once more than `cap` distinct elements appear.
pub fn close_group(action: &GroupAction, cap: usize) -> Result<Vec<Vec<usize>>, CoreError> {
    let n = action.n;
    let identity: Vec<usize> = (0..n).collect();
    let mut elements = BTreeSet::new();
    elements.insert(identity.clone());
    let mut queue = vec![identity];
    while let Some(p) = queue.pop() {
        for g in &action.generators {
            // compose: first apply p, then g
            let q: Vec<usize> = p.iter().map(|&i| g[i]).collect();
            if elements.insert(q.clone()) {
                if elements.len() > cap {
                    return Err(CoreError::SizeLimitExceeded { cap });
                }
                queue.push(q);
            }
        }
    }
    Ok(elements.into_iter().collect())
}

/// A total 0/1 labeling of the instance space, member of a class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hypothesis {
    labels: Vec<Label>,
}

impl Hypothesis {
    pub fn new(labels: Vec<Label>) -> Result<Self, CoreError> {
        if let Some((index, &value)) = labels.iter().enumerate().find(|&(_, &v)| v > 1) {
            return Err(CoreError::InvalidLabel { index, value });
        }
        Ok(Self { labels })
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> Label {
        self.labels[x]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Finite hypothesis class. Duplicate labelings are dropped, keeping the
/// first occurrence, so index-based tie-breaking is well defined.
#[derive(Debug, Clone)]
pub struct HypothesisClass {
    hypotheses: Vec<Hypothesis>,
    n: usize,
}

impl HypothesisClass {
    pub fn new(labelings: Vec<Vec<Label>>, n: usize) -> Result<Self, CoreError> {
        if labelings.is_empty() {
            return Err(CoreError::EmptyClass);
        }
        let mut seen = BTreeSet::new();
        let mut hypotheses = Vec::with_capacity(labelings.len());
        for (index, labels) in labelings.into_iter().enumerate() {
            if labels.len() != n {
                return Err(CoreError::LabelLengthMismatch { index, got: labels.len(), want: n });
            }
            if let Some(&value) = labels.iter().find(|&&v| v > 1) {
                return Err(CoreError::InvalidLabel { index, value });
            }
            if seen.insert(labels.clone()) {
                hypotheses.push(Hypothesis { labels });
            }
        }
        Ok(Self { hypotheses, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }

    pub fn get(&self, i: usize) -> &Hypothesis {
        &self.hypotheses[i]
    }
}

/// One support point of a labeled distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub x: usize,
    pub y: Label,
    pub p: f64,
}

/// Distribution over labeled instances with deterministic labels: each
/// support instance carries exactly one label.
#[derive(Debug, Clone)]
pub struct LabeledDistribution {
    atoms: Vec<Atom>,
}

impl LabeledDistribution {
    pub fn new(mut atoms: Vec<Atom>) -> Result<Self, CoreError> {
        let mut total = 0.0;
        let mut label_of = BTreeMap::new();
        for atom in &atoms {
            if atom.y > 1 {
                return Err(CoreError::InvalidLabel { index: atom.x, value: atom.y });
            }
            if !(atom.p > 0.0 && atom.p <= 1.0) {
                return Err(CoreError::InvalidProbability(atom.p));
            }
            if *label_of.entry(atom.x).or_insert(atom.y) != atom.y {
                return Err(CoreError::AmbiguousLabel(atom.x));
            }
            total += atom.p;
        }
        if (total - 1.0).abs() > PROB_TOLERANCE {
            return Err(CoreError::ProbabilityMassMismatch(total));
        }
        atoms.sort_by_key(|a| a.x);
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Label of `x` under the distribution, if `x` is in the support.
    pub fn label_of(&self, x: usize) -> Option<Label> {
        self.atoms
            .binary_search_by(|a| a.x.cmp(&x))
            .ok()
            .map(|i| self.atoms[i].y)
    }
}

/// Labeled multiset, in draw order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Sample {
    pairs: Vec<(usize, Label)>,
}

impl Sample {
    pub fn new(pairs: Vec<(usize, Label)>) -> Self {
        Self { pairs }
    }

    pub fn pairs(&self) -> &[(usize, Label)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Distinct instances, sorted.
    pub fn instances(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.pairs.iter().map(|&(x, _)| x).collect();
        set.into_iter().collect()
    }
}

/// A total predictor, not necessarily a member of any class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Predictor {
    labels: Vec<Label>,
}

impl Predictor {
    pub fn new(labels: Vec<Label>) -> Self {
        Self { labels }
    }

    pub fn constant(n: usize, label: Label) -> Self {
        Self { labels: vec![label; n] }
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> Label {
        self.labels[x]
    }
}

/// Expands each pair to its full labeled orbit: for `(x, y)` every
/// `(gx, y)` appears once, and distinct source pairs keep separate
/// copies of any overlap.
pub fn augment(sample: &Sample, action: &GroupAction) -> Sample {
    let orbits = action.orbits();
    let mut pairs = Vec::new();
    for &(x, y) in sample.pairs() {
        for &z in orbits.members(orbits.orbit_of(x)) {
            pairs.push((z, y));
        }
    }
    Sample::new(pairs)
}

/// True when support labels are constant on every support orbit, i.e.
/// the deterministic labeling extends to an invariant one.
pub fn is_g_invariant_distribution(dist: &LabeledDistribution, action: &GroupAction) -> bool {
    let orbits = action.orbits();
    let mut orbit_label: BTreeMap<usize, Label> = BTreeMap::new();
    for atom in dist.atoms() {
        let o = orbits.orbit_of(atom.x);
        if *orbit_label.entry(o).or_insert(atom.y) != atom.y {
            return false;
        }
    }
    true
}

/// The three regimes a problem instance can be in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Setting {
    /// Some zero-error hypothesis is constant on every support orbit.
    InvariantlyRealizable,
    /// Zero-error hypotheses exist but none is invariant on the support.
    RelaxedRealizable,
    /// No hypothesis attains zero error.
    Agnostic,
}

/// Classifies the instance. Errors if the distribution itself is not
/// invariant (labels must be constant on support orbits).
pub fn classify_setting(
    dist: &LabeledDistribution,
    class: &HypothesisClass,
    action: &GroupAction,
) -> Result<Setting, CoreError> {
    let orbits = action.orbits();
    for atom in dist.atoms() {
        let o = orbits.orbit_of(atom.x);
        for &z in orbits.members(o) {
            if let Some(y) = dist.label_of(z) {
                if y != atom.y {
                    return Err(CoreError::NotGInvariant(atom.x));
                }
            }
        }
    }
    let mut any_zero = false;
    for h in class.hypotheses() {
        if err(h.labels(), dist) > ERR_TOLERANCE {
            continue;
        }
        any_zero = true;
        let invariant_on_support = dist.atoms().iter().all(|atom| {
            let o = orbits.orbit_of(atom.x);
            orbits.members(o).iter().all(|&z| h.label(z) == h.label(atom.x))
        });
        if invariant_on_support {
            return Ok(Setting::InvariantlyRealizable);
        }
    }
    if any_zero {
        Ok(Setting::RelaxedRealizable)
    } else {
        Ok(Setting::Agnostic)
    }
}

/// Exact error of a total labeling against the distribution.
pub fn err(labels: &[Label], dist: &LabeledDistribution) -> f64 {
    dist.atoms()
        .iter()
        .filter(|a| labels[a.x] != a.y)
        .map(|a| a.p)
        .sum()
}

/// Empirical error on a sample (multiset average).
pub fn err_sample(labels: &[Label], sample: &Sample) -> Result<f64, CoreError> {
    if sample.is_empty() {
        return Err(CoreError::EmptySample);
    }
    let wrong = sample.pairs().iter().filter(|&&(x, y)| labels[x] != y).count();
    Ok(wrong as f64 / sample.len() as f64)
}

/// Mass of support instances whose orbit is not labeled constantly by
/// `labels` (the non-invariance parameter of a hypothesis).
pub fn invariance_parameter(labels: &[Label], dist: &LabeledDistribution, action: &GroupAction) -> f64 {
    let orbits = action.orbits();
    dist.atoms()
        .iter()
        .filter(|a| {
            let o = orbits.orbit_of(a.x);
            orbits.members(o).iter().any(|&z| labels[z] != labels[a.x])
        })
        .map(|a| a.p)
        .sum()
}

/// Draws `m` labeled examples i.i.d. from the distribution.
pub fn sample<R: Rng>(dist: &LabeledDistribution, m: usize, rng: &mut R) -> Sample {
    let mut cumulative = Vec::with_capacity(dist.atoms().len());
    let mut acc = 0.0;
    for atom in dist.atoms() {
        acc += atom.p;
        cumulative.push(acc);
    }
    let mut pairs = Vec::with_capacity(m);
    for _ in 0..m {
        let u: f64 = rng.gen::<f64>() * acc;
        let idx = match cumulative.binary_search_by(|c| c.partial_cmp(&u).unwrap()) {
            Ok(i) => (i + 1).min(dist.atoms().len() - 1),
            Err(i) => i.min(dist.atoms().len() - 1),
        };
        let atom = dist.atoms()[idx];
        pairs.push((atom.x, atom.y));
    }
    Sample::new(pairs)
}
