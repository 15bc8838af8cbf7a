//! Named problem generators and a deterministic Monte-Carlo harness.
//!
//! Each construction bundles a fixed instance space, group action and
//! hypothesis class with a per-trial sampler for the target and the
//! data distribution; one construction additionally samples the group
//! itself per trial, modelling a learner that must work against an
//! unknown symmetry. The harness derives every trial's randomness from
//! a master seed and the trial index alone, so results are identical
//! across thread counts and reruns.

use std::collections::BTreeSet;

use rand::seq::index::sample as index_sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::core::{
    sample, Atom, GroupAction, Hypothesis, HypothesisClass, InstanceSpace, Label,
    LabeledDistribution, Sample, Setting,
};
use crate::learners::{run_spec_at, LearnerSpec};

#[derive(Debug, Error, PartialEq)]
pub enum ExperimentError {
    #[error("parameter {param}={value} outside {allowed}")]
    ParamOutOfRange { param: &'static str, value: usize, allowed: &'static str },
    #[error("fraction {param}={value} outside {allowed}")]
    FractionOutOfRange { param: &'static str, value: f64, allowed: &'static str },
    #[error("unknown variant {0:?}")]
    UnknownVariant(String),
}

/// One sampled problem instance: the reference hypothesis (the target
/// in realizable settings, the best-in-class otherwise), the data
/// distribution, and an optional per-trial group replacing the
/// construction-level one.
pub struct Trial {
    pub hypothesis: Hypothesis,
    pub dist: LabeledDistribution,
    pub action: Option<GroupAction>,
}

type Sampler = Box<dyn Fn(&mut ChaCha8Rng) -> Trial + Send + Sync>;

/// A named experiment family with its per-trial sampler.
pub struct Construction {
    pub name: String,
    pub space: InstanceSpace,
    pub action: GroupAction,
    pub class: HypothesisClass,
    /// Setting every sampled trial lands in, when that is an invariant
    /// of the family rather than of the draw.
    pub expected_setting: Option<Setting>,
    sampler: Sampler,
}

impl Construction {
    pub fn sample_trial(&self, rng: &mut ChaCha8Rng) -> Trial {
        (self.sampler)(rng)
    }
}

fn ids(prefix: impl Fn(usize) -> String, n: usize) -> InstanceSpace {
    InstanceSpace::new((0..n).map(prefix).collect()).expect("distinct ids")
}

/// Bit masks over `bits` positions with exactly `ones` set, ascending.
fn exact_masks(bits: usize, ones: usize) -> Vec<u32> {
    assert!(bits <= 24 && ones <= bits);
    if ones == 0 {
        return vec![0];
    }
    let mut masks = Vec::new();
    let limit = 1u32 << bits;
    let mut v = (1u32 << ones) - 1;
    while v < limit {
        masks.push(v);
        let t = v | (v - 1);
        let low = !t & (!t).wrapping_neg();
        v = (t + 1) | ((low - 1) >> (v.trailing_zeros() + 1));
    }
    masks
}

fn uniform_mass(n: usize) -> f64 {
    1.0 / n as f64
}

/// Which of the three single-hypothesis probe classes to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeVariant {
    /// All-zero hypothesis: invariantly realizable.
    Constant,
    /// Indicator of the negative half: realizable but never invariant.
    Negative,
    /// Indicator of the positive half: positive error on the probe data.
    Positive,
}

/// Four signed points, two sign orbits, a single-hypothesis class and a
/// fixed distribution on the positive points labeled zero. The three
/// variants land in the three settings.
pub fn setting_probe(variant: ProbeVariant) -> Result<Construction, ExperimentError> {
    let n = 4; // +1, -1, +2, -2
    let space = InstanceSpace::new(
        ["+1", "-1", "+2", "-2"].iter().map(|s| s.to_string()).collect(),
    )
    .unwrap();
    let action = GroupAction::new(n, vec![vec![1, 0, 3, 2]]).unwrap();
    let (labels, name, expected) = match variant {
        ProbeVariant::Constant => {
            (vec![0, 0, 0, 0], "setting_probe_constant", Setting::InvariantlyRealizable)
        }
        ProbeVariant::Negative => {
            (vec![0, 1, 0, 1], "setting_probe_negative", Setting::RelaxedRealizable)
        }
        ProbeVariant::Positive => {
            (vec![1, 0, 1, 0], "setting_probe_positive", Setting::Agnostic)
        }
    };
    let class = HypothesisClass::new(vec![labels], n).unwrap();
    let hypothesis = class.get(0).clone();
    let dist = LabeledDistribution::new(vec![
        Atom { x: 0, y: 0, p: 0.5 },
        Atom { x: 2, y: 0, p: 0.5 },
    ])
    .unwrap();
    Ok(Construction {
        name: name.to_string(),
        space,
        action,
        class,
        expected_setting: Some(expected),
        sampler: Box::new(move |_| Trial {
            hypothesis: hypothesis.clone(),
            dist: dist.clone(),
            action: None,
        }),
    })
}

/// 2d sign orbits with the class of exactly-d positive sets: positives
/// occupy indices 0..2d, their negatives 2d..4d, the flip swaps the
/// halves. No member is invariant, so the sign-orbit shattering number
/// collapses to zero while the plain and augmented ones stay d. Trials
/// put uniform mass on the positives, labeled by a uniformly drawn
/// member, touching each orbit once so the source stays invariant.
pub fn sign_exact_sets(d: usize) -> Result<Construction, ExperimentError> {
    if !(1..=12).contains(&d) {
        return Err(ExperimentError::ParamOutOfRange { param: "d", value: d, allowed: "1..=12" });
    }
    let n = 4 * d;
    let space = ids(
        |z| if z < 2 * d { format!("+{}", z + 1) } else { format!("-{}", z - 2 * d + 1) },
        n,
    );
    let mut flip: Vec<usize> = (0..n).collect();
    for i in 0..2 * d {
        flip.swap(i, 2 * d + i);
    }
    let action = GroupAction::new(n, vec![flip]).unwrap();
    let labelings: Vec<Vec<Label>> = exact_masks(2 * d, d)
        .into_iter()
        .map(|mask| {
            let mut labels = vec![0; n];
            for (i, l) in labels.iter_mut().enumerate().take(2 * d) {
                *l = (mask >> i & 1) as Label;
            }
            labels
        })
        .collect();
    let class = HypothesisClass::new(labelings, n).unwrap();
    let sampler_class = class.clone();
    Ok(Construction {
        name: format!("sign_exact_sets_d{d}"),
        space,
        action,
        class,
        expected_setting: Some(Setting::RelaxedRealizable),
        sampler: Box::new(move |rng| {
            let h = sampler_class.get(rng.gen_range(0..sampler_class.len())).clone();
            let atoms = (0..2 * d)
                .map(|x| Atom { x, y: h.label(x), p: uniform_mass(2 * d) })
                .collect();
            Trial { hypothesis: h, dist: LabeledDistribution::new(atoms).unwrap(), action: None }
        }),
    })
}

/// k objects with n cyclically rotated variants each. The plain class
/// is every labeling; with `disagree` set it is cut down to labelings
/// where each object's upright and half-turned variants differ, which
/// kills the invariant members entirely. Trials put uniform mass on the
/// upright variants, labeled by a uniformly drawn member, so the plain
/// family is invariantly realizable and the cut-down one never is.
pub fn rotations(n: usize, k: usize, disagree: bool) -> Result<Construction, ExperimentError> {
    if !(2..=16).contains(&n) || (disagree && !n.is_multiple_of(2)) {
        return Err(ExperimentError::ParamOutOfRange {
            param: "n",
            value: n,
            allowed: "2..=16, even when variants must disagree",
        });
    }
    if k == 0 || n * k > 16 {
        return Err(ExperimentError::ParamOutOfRange {
            param: "k",
            value: k,
            allowed: "1..= with n*k <= 16",
        });
    }
    let total = n * k;
    let space = ids(|z| format!("o{}r{}", z / n, z % n), total);
    let mut rot: Vec<usize> = (0..total).collect();
    for obj in 0..k {
        for r in 0..n {
            rot[obj * n + r] = obj * n + (r + 1) % n;
        }
    }
    let action = GroupAction::new(total, vec![rot]).unwrap();
    let labelings: Vec<Vec<Label>> = (0u32..(1 << total))
        .map(|mask| (0..total).map(|i| (mask >> i & 1) as Label).collect::<Vec<_>>())
        .filter(|labels: &Vec<Label>| {
            !disagree || (0..k).all(|obj| labels[obj * n] != labels[obj * n + n / 2])
        })
        .collect();
    let class = HypothesisClass::new(labelings, total).unwrap();
    let sampler_class = class.clone();
    let name = if disagree {
        format!("rotations_n{n}_k{k}_disagree")
    } else {
        format!("rotations_n{n}_k{k}")
    };
    let expected = if disagree {
        Setting::RelaxedRealizable
    } else {
        Setting::InvariantlyRealizable
    };
    Ok(Construction {
        name,
        space,
        action,
        class,
        expected_setting: Some(expected),
        sampler: Box::new(move |rng| {
            let h = sampler_class.get(rng.gen_range(0..sampler_class.len())).clone();
            let atoms = (0..k)
                .map(|obj| Atom { x: obj * n, y: h.label(obj * n), p: uniform_mass(k) })
                .collect();
            Trial { hypothesis: h, dist: LabeledDistribution::new(atoms).unwrap(), action: None }
        }),
    })
}

/// A zero point plus 2d sign pairs (+i at 2i-1, -i at 2i); hypotheses
/// keep everything at 1 except a complementary d-set of positives.
/// Trials hide a uniform d-set u*, put mass 1-16*eps on the zero point
/// and spread the rest over the positives of u*, all labeled 1, so the
/// trial is invariantly realizable yet augmentation-based learners must
/// resolve every orbit. Sample size near d/(64*eps) is the regime the
/// family is built for.
pub fn da_suboptimal(d: usize, eps: f64) -> Result<Construction, ExperimentError> {
    if !(1..=12).contains(&d) {
        return Err(ExperimentError::ParamOutOfRange { param: "d", value: d, allowed: "1..=12" });
    }
    if !(eps > 0.0 && 16.0 * eps < 1.0) {
        return Err(ExperimentError::FractionOutOfRange {
            param: "eps",
            value: eps,
            allowed: "(0, 1/16)",
        });
    }
    let n = 4 * d + 1;
    let space = ids(
        |z| {
            if z == 0 {
                "0".to_string()
            } else if z % 2 == 1 {
                format!("+{}", z.div_ceil(2))
            } else {
                format!("-{}", z / 2)
            }
        },
        n,
    );
    let mut flip: Vec<usize> = (0..n).collect();
    for i in 1..=2 * d {
        flip.swap(2 * i - 1, 2 * i);
    }
    let action = GroupAction::new(n, vec![flip]).unwrap();
    let labelings: Vec<Vec<Label>> = exact_masks(2 * d, d)
        .into_iter()
        .map(|mask| {
            let mut labels = vec![1; n];
            for i in 1..=2 * d {
                if mask >> (i - 1) & 1 == 0 {
                    labels[2 * i - 1] = 0;
                }
            }
            labels
        })
        .collect();
    let class = HypothesisClass::new(labelings, n).unwrap();
    Ok(Construction {
        name: format!("da_suboptimal_d{d}"),
        space,
        action,
        class,
        expected_setting: Some(Setting::InvariantlyRealizable),
        sampler: Box::new(move |rng| {
            let chosen = index_sample(rng, 2 * d, d).into_vec();
            let mut labels = vec![1; n];
            for i in 0..2 * d {
                labels[2 * (i + 1) - 1] = 0;
            }
            let mut atoms = vec![Atom { x: 0, y: 1, p: 1.0 - 16.0 * eps }];
            for &i in &chosen {
                labels[2 * (i + 1) - 1] = 1;
                atoms.push(Atom { x: 2 * (i + 1) - 1, y: 1, p: 16.0 * eps / d as f64 });
            }
            Trial {
                hypothesis: Hypothesis::new(labels).unwrap(),
                dist: LabeledDistribution::new(atoms).unwrap(),
                action: None,
            }
        }),
    })
}

/// d shattered points under the full class. Each trial hides a subset
/// A* of the first d-1 points, labels by its indicator and replaces the
/// group with one whose orbits are the A* block, its complement and the
/// last point, so only a learner that is handed the trial group can
/// exploit invariance. Mass 1-16*eps sits on the last point and the
/// rest is uniform over the first d-1.
pub fn da_helps(d: usize, eps: f64) -> Result<Construction, ExperimentError> {
    if !(2..=16).contains(&d) {
        return Err(ExperimentError::ParamOutOfRange { param: "d", value: d, allowed: "2..=16" });
    }
    if !(eps > 0.0 && 16.0 * eps < 1.0) {
        return Err(ExperimentError::FractionOutOfRange {
            param: "eps",
            value: eps,
            allowed: "(0, 1/16)",
        });
    }
    let space = ids(|z| format!("x{}", z + 1), d);
    let action = GroupAction::identity(d);
    let labelings: Vec<Vec<Label>> = (0u32..(1 << d))
        .map(|mask| (0..d).map(|i| (mask >> i & 1) as Label).collect())
        .collect();
    let class = HypothesisClass::new(labelings, d).unwrap();
    Ok(Construction {
        name: format!("da_helps_d{d}"),
        space,
        action,
        class,
        expected_setting: Some(Setting::InvariantlyRealizable),
        sampler: Box::new(move |rng| {
            let block: Vec<usize> = (0..d - 1).filter(|_| rng.gen::<bool>()).collect();
            let labels: Vec<Label> =
                (0..d).map(|i| u8::from(i < d - 1 && block.contains(&i))).collect();
            let complement: Vec<usize> =
                (0..d - 1).filter(|i| !block.contains(i)).collect();
            let mut generators = Vec::new();
            for cycle in [&block, &complement] {
                if cycle.len() < 2 {
                    continue;
                }
                let mut perm: Vec<usize> = (0..d).collect();
                for (j, &z) in cycle.iter().enumerate() {
                    perm[z] = cycle[(j + 1) % cycle.len()];
                }
                generators.push(perm);
            }
            if generators.is_empty() {
                generators.push((0..d).collect());
            }
            let mut atoms = vec![Atom { x: d - 1, y: 0, p: 1.0 - 16.0 * eps }];
            for (i, &y) in labels.iter().enumerate().take(d - 1) {
                atoms.push(Atom { x: i, y, p: 16.0 * eps / (d - 1) as f64 });
            }
            Trial {
                hypothesis: Hypothesis::new(labels).unwrap(),
                dist: LabeledDistribution::new(atoms).unwrap(),
                action: Some(GroupAction::new(d, generators).unwrap()),
            }
        }),
    })
}

/// 2d sign pairs, instances (s, e_i) at index 2(i-1) + (s negative),
/// and just two hypotheses labeling by sign. Each trial draws one
/// natural background per pair and puts uniform mass on the natural
/// points labeled by sign, so the positive-sign hypothesis is always
/// exact while augmentation erases the information in the backgrounds.
pub fn da_hurts(d: usize) -> Result<Construction, ExperimentError> {
    if !(1..=16).contains(&d) {
        return Err(ExperimentError::ParamOutOfRange { param: "d", value: d, allowed: "1..=16" });
    }
    let n = 4 * d;
    let space = ids(
        |z| format!("{}e{}", if z % 2 == 0 { "+" } else { "-" }, z / 2 + 1),
        n,
    );
    let mut flip: Vec<usize> = (0..n).collect();
    for i in 0..2 * d {
        flip.swap(2 * i, 2 * i + 1);
    }
    let action = GroupAction::new(n, vec![flip]).unwrap();
    let mut plus = vec![0; n];
    let mut minus = vec![0; n];
    for i in 0..2 * d {
        plus[2 * i] = 1;
        minus[2 * i + 1] = 1;
    }
    let class = HypothesisClass::new(vec![plus.clone(), minus], n).unwrap();
    let target = Hypothesis::new(plus).unwrap();
    Ok(Construction {
        name: format!("da_hurts_d{d}"),
        space,
        action,
        class,
        expected_setting: Some(Setting::RelaxedRealizable),
        sampler: Box::new(move |rng| {
            let atoms = (0..2 * d)
                .map(|i| {
                    if rng.gen::<bool>() {
                        Atom { x: 2 * i, y: 1, p: uniform_mass(2 * d) }
                    } else {
                        Atom { x: 2 * i + 1, y: 0, p: uniform_mass(2 * d) }
                    }
                })
                .collect();
            Trial {
                hypothesis: target.clone(),
                dist: LabeledDistribution::new(atoms).unwrap(),
                action: None,
            }
        }),
    })
}

/// d blocks of `block` points each under the trivial group, with the
/// class labeling every block constantly. Each trial draws block coins
/// and flips exactly ceil(block/4) labels inside every block, so no
/// hypothesis is exact and the best one misses a fixed quarter of each
/// block.
pub fn set_shatter(d: usize, block: usize) -> Result<Construction, ExperimentError> {
    if !(1..=16).contains(&d) {
        return Err(ExperimentError::ParamOutOfRange { param: "d", value: d, allowed: "1..=16" });
    }
    if !(2..=64).contains(&block) || d * block > 512 {
        return Err(ExperimentError::ParamOutOfRange {
            param: "block",
            value: block,
            allowed: "2..=64 with d*block <= 512",
        });
    }
    let n = d * block;
    let space = ids(|z| format!("b{}p{}", z / block, z % block), n);
    let action = GroupAction::identity(n);
    let labelings: Vec<Vec<Label>> = (0u32..(1 << d))
        .map(|mask| (0..n).map(|z| (mask >> (z / block) & 1) as Label).collect())
        .collect();
    let class = HypothesisClass::new(labelings, n).unwrap();
    let flips = block.div_ceil(4);
    Ok(Construction {
        name: format!("set_shatter_d{d}_a{block}"),
        space,
        action,
        class,
        expected_setting: Some(Setting::Agnostic),
        sampler: Box::new(move |rng| {
            let mut labels = vec![0; n];
            let mut atoms = Vec::with_capacity(n);
            for b in 0..d {
                let coin: Label = u8::from(rng.gen::<bool>());
                labels[b * block..(b + 1) * block].fill(coin);
                let flipped = index_sample(rng, block, flips).into_vec();
                let mut noisy: Vec<Label> = vec![coin; block];
                for j in flipped {
                    noisy[j] = 1 - coin;
                }
                for (j, &y) in noisy.iter().enumerate() {
                    atoms.push(Atom { x: b * block + j, y, p: uniform_mass(n) });
                }
            }
            Trial {
                hypothesis: Hypothesis::new(labels).unwrap(),
                dist: LabeledDistribution::new(atoms).unwrap(),
                action: None,
            }
        }),
    })
}

/// Serializable handle naming a construction and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum ConstructionSpec {
    SettingProbe { variant: ProbeVariant },
    SignExactSets { d: usize },
    Rotations {
        n: usize,
        k: usize,
        #[serde(default)]
        disagree: bool,
    },
    DaSuboptimal { d: usize, eps: f64 },
    DaHelps {
        d: usize,
        #[serde(default)]
        eps: Option<f64>,
    },
    DaHurts { d: usize },
    SetShatter {
        d: usize,
        #[serde(default = "default_block")]
        block: usize,
    },
}

fn default_block() -> usize {
    8
}

/// Default accuracy scale for the hidden-group family; small enough to
/// be a legal mass split, large enough that a handful of samples is the
/// interesting regime.
pub const DA_HELPS_DEFAULT_EPS: f64 = 1.0 / 18.0;

impl ConstructionSpec {
    pub fn build(&self) -> Result<Construction, ExperimentError> {
        match *self {
            ConstructionSpec::SettingProbe { variant } => setting_probe(variant),
            ConstructionSpec::SignExactSets { d } => sign_exact_sets(d),
            ConstructionSpec::Rotations { n, k, disagree } => rotations(n, k, disagree),
            ConstructionSpec::DaSuboptimal { d, eps } => da_suboptimal(d, eps),
            ConstructionSpec::DaHelps { d, eps } => {
                da_helps(d, eps.unwrap_or(DA_HELPS_DEFAULT_EPS))
            }
            ConstructionSpec::DaHurts { d } => da_hurts(d),
            ConstructionSpec::SetShatter { d, block } => set_shatter(d, block),
        }
    }
}

/// Which part of the error mass a trial reports.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMetric {
    /// Full distribution error.
    #[default]
    Full,
    /// Error restricted to atoms whose orbit contains no training
    /// instance; isolates what a learner does where augmentation gave
    /// it no cover.
    UnseenOrbit,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream seed derived from a master seed; used for trial
/// indices and sample sizes so no two cells share a generator state.
pub fn mix_seed(master: u64, stream: u64) -> u64 {
    splitmix64(master ^ splitmix64(stream))
}

fn kahan_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in xs {
        let y = x - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Aggregated outcome of one (construction, learner, m) cell.
#[derive(Debug, Clone, Serialize)]
pub struct CellResult {
    pub construction: String,
    pub learner: String,
    pub m: usize,
    pub trials: usize,
    /// Trials whose learner returned an error; excluded from the
    /// aggregates below.
    pub failures: usize,
    pub mean_err: f64,
    pub se: f64,
    pub pr_exceed_eps: f64,
    pub eps: f64,
    pub metric: ErrorMetric,
    pub seed: u64,
    pub wall_ms: f64,
    /// Per successful trial errors, in trial order.
    #[serde(skip)]
    pub errs: Vec<f64>,
}

fn trial_error(
    dist: &LabeledDistribution,
    action: &GroupAction,
    s: &Sample,
    preds: &[Label],
    metric: ErrorMetric,
) -> f64 {
    let orbits = action.orbits();
    let seen: BTreeSet<usize> =
        s.pairs().iter().map(|&(x, _)| orbits.orbit_of(x)).collect();
    kahan_sum(dist.atoms().iter().zip(preds).filter_map(|(atom, &pred)| {
        if matches!(metric, ErrorMetric::UnseenOrbit) && seen.contains(&orbits.orbit_of(atom.x)) {
            return None;
        }
        (pred != atom.y).then_some(atom.p)
    }))
}

/// Runs `trials` independent trials of a learner at sample size `m`.
/// Trial t's generator is seeded from (seed, t) only; learners are
/// evaluated at the support of the trial distribution, which is enough
/// to compute the exact error.
pub fn monte_carlo(
    c: &Construction,
    spec: &LearnerSpec,
    m: usize,
    trials: usize,
    seed: u64,
    eps: f64,
    metric: ErrorMetric,
) -> CellResult {
    let started = std::time::Instant::now();
    let outcomes: Vec<Option<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, t as u64));
            let trial = c.sample_trial(&mut rng);
            let action = trial.action.as_ref().unwrap_or(&c.action);
            let s = sample(&trial.dist, m, &mut rng);
            let unlabeled: Vec<usize> = match spec.unlabeled_need() {
                0 => Vec::new(),
                u => sample(&trial.dist, u, &mut rng)
                    .pairs()
                    .iter()
                    .map(|&(x, _)| x)
                    .collect(),
            };
            let eval: Vec<usize> = trial.dist.atoms().iter().map(|a| a.x).collect();
            run_spec_at(spec, &s, &unlabeled, &c.class, action, &eval, &mut rng)
                .ok()
                .map(|preds| trial_error(&trial.dist, action, &s, &preds, metric))
        })
        .collect();
    let errs: Vec<f64> = outcomes.iter().copied().flatten().collect();
    let failures = trials - errs.len();
    let n = errs.len();
    let mean_err = if n == 0 { f64::NAN } else { kahan_sum(errs.iter().copied()) / n as f64 };
    let se = if n < 2 {
        0.0
    } else {
        let var = kahan_sum(errs.iter().map(|e| (e - mean_err) * (e - mean_err)))
            / (n - 1) as f64;
        (var / n as f64).sqrt()
    };
    let pr_exceed_eps = if n == 0 {
        f64::NAN
    } else {
        errs.iter().filter(|&&e| e > eps).count() as f64 / n as f64
    };
    CellResult {
        construction: c.name.clone(),
        learner: spec.name().to_string(),
        m,
        trials,
        failures,
        mean_err,
        se,
        pr_exceed_eps,
        eps,
        metric,
        seed,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
        errs,
    }
}

/// One cell per sample size, each with its own derived seed, plus the
/// smallest size whose exceedance probability is at most `delta`.
#[allow(clippy::too_many_arguments)]
pub fn sample_complexity_curve(
    c: &Construction,
    spec: &LearnerSpec,
    ms: &[usize],
    trials: usize,
    seed: u64,
    eps: f64,
    metric: ErrorMetric,
    delta: f64,
) -> (Vec<CellResult>, Option<usize>) {
    let cells: Vec<CellResult> = ms
        .iter()
        .map(|&m| monte_carlo(c, spec, m, trials, mix_seed(seed, m as u64), eps, metric))
        .collect();
    let enough = cells.iter().find(|cell| cell.pr_exceed_eps <= delta).map(|cell| cell.m);
    (cells, enough)
}

/// Fixed-schema table of results, one row per cell.
pub fn csv_rows(results: &[CellResult]) -> String {
    let mut out = String::from("construction,learner,m,trials,mean_err,se,pr_exceed_eps,seed\n");
    for r in results {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.construction, r.learner, r.m, r.trials, r.mean_err, r.se, r.pr_exceed_eps, r.seed
        ));
    }
    out
}

/// One (m, mean error, 95% confidence halfwidth) triple per cell,
/// grouped into curves by construction and learner, for plotting.
pub fn plotdata(results: &[CellResult]) -> serde_json::Value {
    let mut curves: Vec<((String, String), Vec<serde_json::Value>)> = Vec::new();
    for r in results {
        let key = (r.construction.clone(), r.learner.clone());
        let point = serde_json::json!({
            "m": r.m,
            "mean_err": r.mean_err,
            "ci": 1.96 * r.se,
        });
        match curves.iter_mut().find(|(k, _)| *k == key) {
            Some((_, points)) => points.push(point),
            None => curves.push((key, vec![point])),
        }
    }
    serde_json::Value::Array(
        curves
            .into_iter()
            .map(|((construction, learner), points)| {
                serde_json::json!({
                    "construction": construction,
                    "learner": learner,
                    "points": points,
                })
            })
            .collect(),
    )
}

fn default_exceed_delta() -> f64 {
    0.1
}

/// Everything an experiment run needs besides the trial count, master
/// seed and thread budget, which arrive on the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub construction: ConstructionSpec,
    pub learners: Vec<LearnerSpec>,
    pub ms: Vec<usize>,
    /// Accuracy threshold behind the exceedance-probability column.
    pub eps: f64,
    /// Exceedance-probability target defining a sufficient sample size.
    #[serde(default = "default_exceed_delta")]
    pub delta: f64,
    #[serde(default)]
    pub metric: ErrorMetric,
}

/// A learner's smallest sufficient sample size (None when no size on
/// the grid qualified), keyed by "position:name".
pub type SufficientSize = (String, Option<usize>);

/// Runs every learner in the config over the sample-size grid. All
/// learners share per-(m, trial) seeds, so they see identical trials
/// and comparisons are paired. Returns all cells plus each learner's
/// smallest sufficient sample size, keyed by position and name.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    trials: usize,
    seed: u64,
) -> Result<(Vec<CellResult>, Vec<SufficientSize>), ExperimentError> {
    let c = cfg.construction.build()?;
    let mut results = Vec::new();
    let mut sufficient = Vec::new();
    for (i, spec) in cfg.learners.iter().enumerate() {
        let (cells, enough) = sample_complexity_curve(
            &c, spec, &cfg.ms, trials, seed, cfg.eps, cfg.metric, cfg.delta,
        );
        sufficient.push((format!("{}:{}", i, spec.name()), enough));
        results.extend(cells);
    }
    Ok((results, sufficient))
}
