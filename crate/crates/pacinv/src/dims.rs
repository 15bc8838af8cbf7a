//! Exact combinatorial dimension calculators and the restricted
//! hypothesis classes the predictors are built from.
//!
//! All searches are exhaustive with downward-closure pruning: a set
//! shattered under any of the constraints below stays shattered after
//! removing a point, so depth-first extension with early exit is sound.
//! Sizes are desk-scale (tens of instances, at most a few thousand
//! hypotheses); nothing here tries to be polynomial.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use crate::core::{GroupAction, Hypothesis, HypothesisClass, Label, LabeledDistribution};

/// Which constraint produced a restricted class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RestrictionKind {
    /// Hypotheses constant on the full orbit of every base point.
    Invariant,
    /// Hypotheses constant on each orbit intersected with the base set.
    OrbitConsistent,
    /// Orbit-consistent hypotheses whose non-invariance fraction over
    /// the input multiset is at most the bound.
    EtaBounded(f64),
    /// Plain projections, no constraint.
    Raw,
}

/// Projections of the surviving hypotheses onto a base instance set.
#[derive(Debug, Clone)]
pub struct RestrictedClass {
    /// Sorted distinct instances the labelings are indexed by.
    pub base_instances: Vec<usize>,
    /// Deduplicated labeling vectors, sorted lexicographically.
    pub labelings: Vec<Vec<Label>>,
    pub kind: RestrictionKind,
}

impl RestrictedClass {
    pub fn is_empty(&self) -> bool {
        self.labelings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.labelings.len()
    }

    /// VC dimension of the labeling table over the base instances.
    pub fn vcdim(&self) -> usize {
        vcdim_table(&self.labelings, self.base_instances.len())
    }

    /// Position of an instance in `base_instances`, if present.
    pub fn coordinate_of(&self, x: usize) -> Option<usize> {
        self.base_instances.binary_search(&x).ok()
    }
}

fn distinct_sorted(xs: &[usize]) -> Vec<usize> {
    let set: BTreeSet<usize> = xs.iter().copied().collect();
    set.into_iter().collect()
}

fn project(labels: &[Label], base: &[usize]) -> Vec<Label> {
    base.iter().map(|&x| labels[x]).collect()
}

fn constant_on(labels: &[Label], members: &[usize]) -> bool {
    members.iter().all(|&z| labels[z] == labels[members[0]])
}

fn collect_restricted<F>(
    class: &HypothesisClass,
    base: Vec<usize>,
    kind: RestrictionKind,
    keep: F,
) -> RestrictedClass
where
    F: Fn(&Hypothesis) -> bool,
{
    let labelings: BTreeSet<Vec<Label>> = class
        .hypotheses()
        .iter()
        .filter(|h| keep(h))
        .map(|h| project(h.labels(), &base))
        .collect();
    RestrictedClass { base_instances: base, labelings: labelings.into_iter().collect(), kind }
}

/// Projections of hypotheses constant on the full orbit of every point
/// of `xs`.
pub fn restrict_invariant(
    class: &HypothesisClass,
    action: &GroupAction,
    xs: &[usize],
) -> RestrictedClass {
    let base = distinct_sorted(xs);
    let orbits = action.orbits();
    let orbit_ids: BTreeSet<usize> = base.iter().map(|&x| orbits.orbit_of(x)).collect();
    collect_restricted(class, base, RestrictionKind::Invariant, |h| {
        orbit_ids.iter().all(|&o| constant_on(h.labels(), orbits.members(o)))
    })
}

/// Projections of hypotheses that agree within each orbit restricted to
/// the base set (the full orbit may still be split elsewhere).
pub fn restrict_orbit_consistent(
    class: &HypothesisClass,
    action: &GroupAction,
    xs: &[usize],
) -> RestrictedClass {
    let base = distinct_sorted(xs);
    let groups = orbit_groups(&base, action);
    collect_restricted(class, base, RestrictionKind::OrbitConsistent, |h| {
        groups.iter().all(|g| constant_on(h.labels(), g))
    })
}

/// Projections of orbit-consistent hypotheses whose fraction of
/// multiset points lying on a split orbit is at most `eta`.
pub fn restrict_eta(
    class: &HypothesisClass,
    action: &GroupAction,
    xs: &[usize],
    eta: f64,
) -> RestrictedClass {
    let base = distinct_sorted(xs);
    let groups = orbit_groups(&base, action);
    let orbits = action.orbits();
    let total = xs.len().max(1) as f64;
    collect_restricted(class, base, RestrictionKind::EtaBounded(eta), |h| {
        let consistent = groups.iter().all(|g| constant_on(h.labels(), g));
        if !consistent {
            return false;
        }
        let split = xs
            .iter()
            .filter(|&&x| !constant_on(h.labels(), orbits.members(orbits.orbit_of(x))))
            .count();
        split as f64 / total <= eta + 1e-12
    })
}

/// Plain projections of the whole class.
pub fn restrict_raw(class: &HypothesisClass, xs: &[usize]) -> RestrictedClass {
    let base = distinct_sorted(xs);
    collect_restricted(class, base, RestrictionKind::Raw, |_| true)
}

/// Base points grouped by orbit (only groups with two or more points
/// constrain anything, but singletons are harmless).
fn orbit_groups(base: &[usize], action: &GroupAction) -> Vec<Vec<usize>> {
    let orbits = action.orbits();
    let mut map: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &x in base {
        map.entry(orbits.orbit_of(x)).or_default().push(x);
    }
    map.into_values().collect()
}

/// VC dimension of an explicit labeling table over `n` instances.
/// An empty table has no realizable labeling at all and reports 0.
pub(crate) fn vcdim_table(labelings: &[Vec<Label>], n: usize) -> usize {
    if labelings.is_empty() || n == 0 {
        return 0;
    }
    let mut best = 0;
    let mut chosen = Vec::new();
    vcdim_dfs(labelings, n, 0, &mut chosen, &mut best);
    best
}

fn vcdim_dfs(
    labelings: &[Vec<Label>],
    n: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    best: &mut usize,
) {
    *best = (*best).max(chosen.len());
    for next in start..n {
        if chosen.len() + (n - next) <= *best {
            break;
        }
        chosen.push(next);
        if is_shattered(labelings, chosen) {
            vcdim_dfs(labelings, n, next + 1, chosen, best);
        }
        chosen.pop();
    }
}

fn is_shattered(labelings: &[Vec<Label>], chosen: &[usize]) -> bool {
    debug_assert!(chosen.len() < 64);
    let want = 1u64 << chosen.len();
    let mut seen = BTreeSet::new();
    for labels in labelings {
        let mut pattern = 0u64;
        for (bit, &x) in chosen.iter().enumerate() {
            pattern |= (labels[x] as u64) << bit;
        }
        if seen.insert(pattern) && seen.len() as u64 == want {
            return true;
        }
    }
    false
}

/// Classical VC dimension of the class.
pub fn vcdim(class: &HypothesisClass) -> usize {
    let tables: Vec<Vec<Label>> = class.hypotheses().iter().map(|h| h.labels().to_vec()).collect();
    vcdim_table(&tables, class.n())
}

/// Largest set of points with pairwise-disjoint orbits shattered by
/// hypotheses constant on the full orbit of every chosen point. Since
/// such hypotheses label whole orbits, only one representative per
/// orbit needs to be searched.
pub fn vc_o(class: &HypothesisClass, action: &GroupAction) -> usize {
    let orbits = action.orbits();
    let reps: Vec<usize> = orbits.orbits().iter().map(|members| members[0]).collect();
    let all: Vec<usize> = (0..class.len()).collect();
    let mut best = 0;
    let mut chosen = Vec::new();
    vc_o_dfs(class, action, &reps, 0, &all, &mut chosen, &mut best);
    best
}

fn vc_o_dfs(
    class: &HypothesisClass,
    action: &GroupAction,
    reps: &[usize],
    start: usize,
    alive: &[usize],
    chosen: &mut Vec<usize>,
    best: &mut usize,
) {
    *best = (*best).max(chosen.len());
    let orbits = action.orbits();
    for next in start..reps.len() {
        if chosen.len() + (reps.len() - next) <= *best {
            break;
        }
        let members = orbits.members(orbits.orbit_of(reps[next]));
        let filtered: Vec<usize> = alive
            .iter()
            .copied()
            .filter(|&h| constant_on(class.get(h).labels(), members))
            .collect();
        chosen.push(reps[next]);
        if filtered.len() >= (1 << chosen.len()) && shattered_by(class, &filtered, chosen) {
            vc_o_dfs(class, action, reps, next + 1, &filtered, chosen, best);
        }
        chosen.pop();
    }
}

fn shattered_by(class: &HypothesisClass, hyps: &[usize], chosen: &[usize]) -> bool {
    let want = 1u64 << chosen.len();
    let mut seen = BTreeSet::new();
    for &h in hyps {
        let labels = class.get(h).labels();
        let mut pattern = 0u64;
        for (bit, &x) in chosen.iter().enumerate() {
            pattern |= (labels[x] as u64) << bit;
        }
        if seen.insert(pattern) && seen.len() as u64 == want {
            return true;
        }
    }
    false
}

/// Largest set of points with pairwise-disjoint orbits shattered by the
/// class, with no invariance requirement. The representative inside each
/// orbit matters here, so the search ranges over all instances.
pub fn vc_ao(class: &HypothesisClass, action: &GroupAction) -> usize {
    let tables: Vec<Vec<Label>> = class.hypotheses().iter().map(|h| h.labels().to_vec()).collect();
    let mut best = 0;
    let mut chosen = Vec::new();
    let mut used_orbits = BTreeSet::new();
    vc_ao_dfs(&tables, action, 0, &mut used_orbits, &mut chosen, &mut best);
    best
}

fn vc_ao_dfs(
    tables: &[Vec<Label>],
    action: &GroupAction,
    start: usize,
    used_orbits: &mut BTreeSet<usize>,
    chosen: &mut Vec<usize>,
    best: &mut usize,
) {
    *best = (*best).max(chosen.len());
    let n = action.n();
    for next in start..n {
        if chosen.len() + (n - next) <= *best {
            break;
        }
        let orbit = action.orbits().orbit_of(next);
        if used_orbits.contains(&orbit) {
            continue;
        }
        chosen.push(next);
        if is_shattered(tables, chosen) {
            used_orbits.insert(orbit);
            vc_ao_dfs(tables, action, next + 1, used_orbits, chosen, best);
            used_orbits.remove(&orbit);
        }
        chosen.pop();
    }
}

/// Result of a budgeted dimension search. `exact` is false when the
/// node budget or the size cap stopped the search, in which case
/// `value` is a verified lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimBound {
    pub value: usize,
    pub exact: bool,
}

/// Default node budget for `dim_hg`.
pub const DIM_HG_NODE_BUDGET: u64 = 10_000_000;

/// Largest k admitting k disjoint orbits whose possible labelings cover
/// all of {0,1}^k together with a per-labeling witness family in which
/// labelings differing in exactly one coordinate share the witness
/// instance at that coordinate.
///
/// Searched by increasing k (dropping a coordinate of any witness family
/// yields one for k-1, so the first infeasible k ends the search), over
/// orbit subsets, with backtracking over witness choices in increasing
/// labeling order so every labeling is constrained by its already-placed
/// lower neighbors.
pub fn dim_hg(class: &HypothesisClass, action: &GroupAction, k_max: usize) -> DimBound {
    let orbits = action.orbits();
    let orbit_count = orbits.count();
    let hard_cap = k_max.min(orbit_count).min(20);
    let mut budget = DIM_HG_NODE_BUDGET;
    let mut value = 0;
    for k in 1..=hard_cap {
        let mut subset = Vec::new();
        match any_subset_works(class, action, k, 0, &mut subset, &mut budget) {
            Ok(true) => value = k,
            Ok(false) => return DimBound { value, exact: true },
            // budget exhausted mid-search: value so far is only a bound
            Err(()) => return DimBound { value, exact: false },
        }
    }
    // every k up to the cap succeeded; exact only if no larger k is possible
    DimBound { value, exact: value == orbit_count }
}

fn any_subset_works(
    class: &HypothesisClass,
    action: &GroupAction,
    k: usize,
    start: usize,
    subset: &mut Vec<usize>,
    budget: &mut u64,
) -> Result<bool, ()> {
    if subset.len() == k {
        return witness_family_exists(class, action, subset, budget);
    }
    let orbit_count = action.orbits().count();
    for next in start..orbit_count {
        if subset.len() + (orbit_count - next) < k {
            break;
        }
        subset.push(next);
        let ok = any_subset_works(class, action, k, next + 1, subset, budget)?;
        subset.pop();
        if ok {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Checks conditions (ii) and (iii) for one orbit subset: all 2^k
/// labelings possible, plus a witness family obeying the shared-instance
/// constraint across one-coordinate flips.
fn witness_family_exists(
    class: &HypothesisClass,
    action: &GroupAction,
    orbit_ids: &[usize],
    budget: &mut u64,
) -> Result<bool, ()> {
    let orbits = action.orbits();
    let k = orbit_ids.len();
    let members: Vec<&[usize]> = orbit_ids.iter().map(|&o| orbits.members(o)).collect();
    let mut product: u64 = 1;
    for m in &members {
        product = product.saturating_mul(m.len() as u64);
    }
    let work = product.saturating_mul(class.len() as u64);
    if work > *budget {
        return Err(());
    }
    *budget -= work;

    // witness sets per labeling, enumerated over sequences x hypotheses
    let mut witnesses: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); 1 << k];
    let mut seq = vec![0usize; k];
    loop {
        let xs: Vec<usize> = seq.iter().enumerate().map(|(i, &j)| members[i][j]).collect();
        for h in class.hypotheses() {
            let mut f = 0usize;
            for (i, &x) in xs.iter().enumerate() {
                f |= (h.label(x) as usize) << i;
            }
            witnesses[f].insert(xs.clone());
        }
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == k {
                break;
            }
            seq[pos] += 1;
            if seq[pos] < members[pos].len() {
                break;
            }
            seq[pos] = 0;
            pos += 1;
        }
        if pos == k {
            break;
        }
    }
    if witnesses.iter().any(|u| u.is_empty()) {
        return Ok(false);
    }
    let witness_lists: Vec<Vec<Vec<usize>>> =
        witnesses.into_iter().map(|u| u.into_iter().collect()).collect();
    let mut assigned: Vec<Option<usize>> = vec![None; 1 << k];
    assign_witness(&witness_lists, k, 0, &mut assigned, budget)
}

fn assign_witness(
    witness_lists: &[Vec<Vec<usize>>],
    k: usize,
    f: usize,
    assigned: &mut Vec<Option<usize>>,
    budget: &mut u64,
) -> Result<bool, ()> {
    if f == 1 << k {
        return Ok(true);
    }
    for (idx, candidate) in witness_lists[f].iter().enumerate() {
        if *budget == 0 {
            return Err(());
        }
        *budget -= 1;
        // flipping any set bit of f reaches an already-assigned neighbor,
        // which pins the candidate's instance at that coordinate
        let mut ok = true;
        for i in 0..k {
            if f & (1 << i) != 0 {
                let neighbor = f ^ (1 << i);
                let chosen = assigned[neighbor].expect("lower labelings are assigned first");
                if witness_lists[neighbor][chosen][i] != candidate[i] {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        assigned[f] = Some(idx);
        if assign_witness(witness_lists, k, f + 1, assigned, budget)? {
            return Ok(true);
        }
        assigned[f] = None;
    }
    Ok(false)
}

/// Monte-Carlo estimate of the expected VC dimension of the
/// eta-restricted class on an (m+1)-point sample, conditioned on the
/// target's projection surviving the restriction.
#[derive(Debug, Clone, Copy)]
pub struct VcoEtaEstimate {
    /// Mean restricted VC dimension over conditioned draws (0 when the
    /// conditioning event never occurred).
    pub estimate: f64,
    /// Fraction of draws on which the conditioning event held.
    pub conditioning_rate: f64,
    pub trials: usize,
}

#[allow(clippy::too_many_arguments)]
pub fn vco_eta_estimate<R: Rng>(
    m: usize,
    h_star: &Hypothesis,
    class: &HypothesisClass,
    action: &GroupAction,
    dist: &LabeledDistribution,
    eta: f64,
    trials: usize,
    rng: &mut R,
) -> VcoEtaEstimate {
    assert!(trials >= 1, "at least one trial required");
    let mut conditioned = 0usize;
    let mut total_dim = 0usize;
    for _ in 0..trials {
        let draw = crate::core::sample(dist, m + 1, rng);
        let xs: Vec<usize> = draw.pairs().iter().map(|&(x, _)| x).collect();
        let restricted = restrict_eta(class, action, &xs, eta);
        let target = project(h_star.labels(), &restricted.base_instances);
        if restricted.labelings.binary_search(&target).is_ok() {
            conditioned += 1;
            total_dim += restricted.vcdim();
        }
    }
    let estimate =
        if conditioned == 0 { 0.0 } else { total_dim as f64 / conditioned as f64 };
    VcoEtaEstimate {
        estimate,
        conditioning_rate: conditioned as f64 / trials as f64,
        trials,
    }
}
