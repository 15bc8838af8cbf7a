//! The augmented-orbit one-inclusion graph and its minimax orientation
//! game.
//!
//! Given a multiset of orbits, an adversary picks a (labeling, witness
//! sequence) pair while the learner commits a randomized orientation of
//! the graph's edges; the learner pays the expected number of edges
//! oriented toward the adversary's cluster. The game value is computed
//! by solving both the primal (min over orientations of the max row
//! loss) and dual (max over row distributions of the best-response
//! value) linear programs and certifying that the two agree.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::core::{GroupAction, HypothesisClass, Label};
use crate::simplex::{solve_lp, SimplexError};

pub const DEFAULT_MU_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum MuError {
    #[error("orbit index {0} out of range ({1} orbits)")]
    OrbitOutOfRange(usize, usize),
    #[error("orbit tuple must be nonempty")]
    EmptyTuple,
    #[error("enumeration size {size} exceeds cap {cap}")]
    SizeLimitExceeded { size: u64, cap: u64 },
    #[error("duality gap {gap:e} exceeds tolerance {tolerance:e}")]
    NumericalFailure { gap: f64, tolerance: f64 },
    #[error("linear program failed: {0}")]
    Lp(#[from] SimplexError),
}

/// Enumeration guards. The candidate space is exponential in the tuple
/// length, so both the raw sequence count and the row count are capped.
#[derive(Debug, Clone, Copy)]
pub struct MuCaps {
    /// Max product of orbit sizes (instance sequences enumerated).
    pub max_sequences: u64,
    /// Max number of (labeling, witness) rows.
    pub max_rows: u64,
}

impl Default for MuCaps {
    fn default() -> Self {
        Self { max_sequences: 1_000_000, max_rows: 100_000 }
    }
}

/// Ordered multiset of orbits, stored as orbit ids of an action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitTuple {
    orbit_ids: Vec<usize>,
}

impl OrbitTuple {
    pub fn new(action: &GroupAction, orbit_ids: Vec<usize>) -> Result<Self, MuError> {
        if orbit_ids.is_empty() {
            return Err(MuError::EmptyTuple);
        }
        let count = action.orbits().count();
        for &id in &orbit_ids {
            if id >= count {
                return Err(MuError::OrbitOutOfRange(id, count));
            }
        }
        Ok(Self { orbit_ids })
    }

    pub fn len(&self) -> usize {
        self.orbit_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbit_ids.is_empty()
    }

    pub fn orbit_ids(&self) -> &[usize] {
        &self.orbit_ids
    }

    /// How many times each orbit id occurs.
    pub fn multiplicities(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &id in &self.orbit_ids {
            *m.entry(id).or_insert(0) += 1;
        }
        m
    }
}

/// One adversary row: a labeling of the tuple plus a witness sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BRow {
    /// Index into `LabelingCandidates::labelings`.
    pub labeling: usize,
    /// One instance per tuple position, drawn from that position's orbit.
    pub witness: Vec<usize>,
}

/// All possible labelings of an orbit tuple with their witnesses.
#[derive(Debug, Clone)]
pub struct LabelingCandidates {
    /// Possible labelings, sorted; position i labels tuple position i.
    pub labelings: Vec<Vec<Label>>,
    /// All (labeling, witness) pairs, sorted by (labeling, witness).
    pub rows: Vec<BRow>,
}

impl LabelingCandidates {
    /// Witness sequences of one labeling.
    pub fn witnesses(&self, labeling: usize) -> impl Iterator<Item = &BRow> {
        self.rows.iter().filter(move |r| r.labeling == labeling)
    }
}

/// Enumerates every labeling a hypothesis can induce on some instance
/// sequence of the tuple, keeping only labelings that are constant on
/// repeated orbits, together with all witness sequences.
pub fn enumerate_candidates(
    tuple: &OrbitTuple,
    class: &HypothesisClass,
    action: &GroupAction,
    caps: &MuCaps,
) -> Result<LabelingCandidates, MuError> {
    let orbits = action.orbits();
    let members: Vec<&[usize]> = tuple.orbit_ids.iter().map(|&o| orbits.members(o)).collect();
    let t = tuple.len();
    let mut product: u64 = 1;
    for m in &members {
        product = product.saturating_mul(m.len() as u64);
    }
    if product > caps.max_sequences {
        return Err(MuError::SizeLimitExceeded { size: product, cap: caps.max_sequences });
    }

    // positions sharing an orbit must carry equal labels
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &o) in tuple.orbit_ids.iter().enumerate() {
        groups.entry(o).or_default().push(i);
    }
    let groups: Vec<Vec<usize>> = groups.into_values().collect();

    let mut pairs: BTreeSet<(Vec<Label>, Vec<usize>)> = BTreeSet::new();
    let mut seq = vec![0usize; t];
    loop {
        let xs: Vec<usize> = seq.iter().enumerate().map(|(i, &j)| members[i][j]).collect();
        for h in class.hypotheses() {
            let f: Vec<Label> = xs.iter().map(|&x| h.label(x)).collect();
            let consistent = groups.iter().all(|g| g.iter().all(|&i| f[i] == f[g[0]]));
            if consistent && pairs.insert((f, xs.clone())) && pairs.len() as u64 > caps.max_rows {
                return Err(MuError::SizeLimitExceeded {
                    size: pairs.len() as u64,
                    cap: caps.max_rows,
                });
            }
        }
        let mut pos = 0;
        loop {
            if pos == t {
                break;
            }
            seq[pos] += 1;
            if seq[pos] < members[pos].len() {
                break;
            }
            seq[pos] = 0;
            pos += 1;
        }
        if pos == t {
            break;
        }
    }

    let labelings: Vec<Vec<Label>> = pairs.iter().map(|(f, _)| f.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let index: BTreeMap<&Vec<Label>, usize> =
        labelings.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let rows = pairs
        .iter()
        .map(|(f, x)| BRow { labeling: index[f], witness: x.clone() })
        .collect();
    Ok(LabelingCandidates { labelings, rows })
}

/// One undirected edge of the augmented graph; its endpoints are the
/// labelings that set the flip coordinate to 0 and 1 respectively, both
/// paired with the shared instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugEdge {
    pub zero_labeling: usize,
    pub one_labeling: usize,
    pub instance: usize,
    /// Tuple position at which the endpoint labelings differ.
    pub position: usize,
}

/// The graph of (labeling, instance) vertices with flip edges at
/// instances whose orbit occurs exactly once in the tuple.
#[derive(Debug, Clone)]
pub struct AugmentedOrbitGraph {
    pub tuple: OrbitTuple,
    pub candidates: LabelingCandidates,
    pub vertices: Vec<(usize, usize)>,
    pub edges: Vec<AugEdge>,
    /// Per row, the incident edges as (edge index, row is the 1-side).
    row_incidence: Vec<Vec<(usize, bool)>>,
}

impl AugmentedOrbitGraph {
    pub fn rows(&self) -> &[BRow] {
        &self.candidates.rows
    }

    /// Loss of one adversary row under an orientation: the expected
    /// number of incident edges pointing at the row's cluster.
    pub fn row_loss(&self, row: usize, orientation: &[f64]) -> f64 {
        self.row_incidence[row]
            .iter()
            .map(|&(e, one_side)| if one_side { 1.0 - orientation[e] } else { orientation[e] })
            .sum()
    }

    /// Count of incident edges where the row sits on the 1-side.
    fn row_constant(&self, row: usize) -> f64 {
        self.row_incidence[row].iter().filter(|&&(_, one)| one).count() as f64
    }
}

/// Builds the augmented graph from enumerated candidates: a vertex is a
/// (labeling, instance) pair occurring in some witness; an edge joins
/// labelings differing exactly at the unique position of the shared
/// instance's orbit.
pub fn build_augmented_graph(
    candidates: LabelingCandidates,
    tuple: OrbitTuple,
    action: &GroupAction,
) -> AugmentedOrbitGraph {
    let orbits = action.orbits();
    let t = tuple.len();
    let multiplicity = tuple.multiplicities();

    let mut vertex_set: BTreeSet<(usize, usize)> = BTreeSet::new();
    for row in &candidates.rows {
        for &x in &row.witness {
            vertex_set.insert((row.labeling, x));
        }
    }
    let vertices: Vec<(usize, usize)> = vertex_set.iter().copied().collect();

    let labeling_index: BTreeMap<&Vec<Label>, usize> =
        candidates.labelings.iter().enumerate().map(|(i, f)| (f, i)).collect();

    // edges, created once from their 0-side endpoint
    let mut edges = Vec::new();
    let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
    for (fi, f) in candidates.labelings.iter().enumerate() {
        for (j, &orbit_id) in tuple.orbit_ids.iter().enumerate() {
            if multiplicity[&orbit_id] != 1 || f[j] != 0 {
                continue;
            }
            let mut g = f.clone();
            g[j] = 1;
            let Some(&gi) = labeling_index.get(&g) else { continue };
            for &x in orbits.members(orbit_id) {
                if vertex_set.contains(&(fi, x)) && vertex_set.contains(&(gi, x)) {
                    edge_index.insert((fi, x), edges.len());
                    edge_index.insert((gi, x), edges.len());
                    edges.push(AugEdge {
                        zero_labeling: fi,
                        one_labeling: gi,
                        instance: x,
                        position: j,
                    });
                }
            }
        }
    }

    // a row's cluster meets an edge only through position coordinates:
    // the vertex at position i is (labeling, witness[i]) and its edge, if
    // any, flips coordinate i
    let mut row_incidence = Vec::with_capacity(candidates.rows.len());
    for row in &candidates.rows {
        let mut incident = Vec::new();
        for i in 0..t {
            if let Some(&e) = edge_index.get(&(row.labeling, row.witness[i])) {
                debug_assert_eq!(edges[e].position, i);
                let one_side = candidates.labelings[row.labeling][i] == 1;
                incident.push((e, one_side));
            }
        }
        row_incidence.push(incident);
    }

    AugmentedOrbitGraph { tuple, candidates, vertices, edges, row_incidence }
}

/// Convenience: enumerate candidates and build the graph in one step.
pub fn augmented_graph(
    tuple: OrbitTuple,
    class: &HypothesisClass,
    action: &GroupAction,
    caps: &MuCaps,
) -> Result<AugmentedOrbitGraph, MuError> {
    let candidates = enumerate_candidates(&tuple, class, action, caps)?;
    Ok(build_augmented_graph(candidates, tuple, action))
}

/// Solved game: value, both players' optimal strategies, and the
/// certified duality gap.
#[derive(Debug, Clone)]
pub struct GameSolution {
    /// Game value, evaluated directly as the max row loss of `w_star`.
    pub value: f64,
    /// Per edge: probability of orienting toward the (0-side, 1-side)
    /// endpoints; the two entries sum to one.
    pub w_star: Vec<(f64, f64)>,
    /// Adversary distribution over rows, renormalized to sum to one.
    pub p_star: Vec<f64>,
    /// Max row loss of w_star minus the best-response value of p_star;
    /// nonnegative up to roundoff and at most the tolerance.
    pub duality_gap: f64,
}

/// Best-response value of an explicit row distribution: expected 1-side
/// count plus every edge's negative part of its net pull.
pub fn mu_given_p(graph: &AugmentedOrbitGraph, p: &[f64]) -> f64 {
    assert_eq!(p.len(), graph.rows().len());
    let mut constant = 0.0;
    let mut net = vec![0.0f64; graph.edges.len()];
    for (r, &pr) in p.iter().enumerate() {
        constant += pr * graph.row_constant(r);
        for &(e, one_side) in &graph.row_incidence[r] {
            net[e] += if one_side { -pr } else { pr };
        }
    }
    constant + net.iter().map(|&v| v.min(0.0)).sum::<f64>()
}

/// Solves the orientation game on an already-built graph.
pub fn solve_mu_on_graph(
    graph: &AugmentedOrbitGraph,
    tolerance: f64,
) -> Result<GameSolution, MuError> {
    let n_rows = graph.rows().len();
    let n_edges = graph.edges.len();
    if n_edges == 0 {
        let p = if n_rows == 0 { Vec::new() } else { vec![1.0 / n_rows as f64; n_rows] };
        return Ok(GameSolution { value: 0.0, w_star: Vec::new(), p_star: p, duality_gap: 0.0 });
    }

    // primal: variables (w_1..w_E, v), maximize -v subject to
    //   sum_e M[r][e] w_e - v <= -c_r   for each row
    //   w_e <= 1                        for each edge
    let mut a = Vec::with_capacity(n_rows + n_edges);
    let mut b = Vec::with_capacity(n_rows + n_edges);
    for r in 0..n_rows {
        let mut row = vec![0.0; n_edges + 1];
        for &(e, one_side) in &graph.row_incidence[r] {
            row[e] = if one_side { -1.0 } else { 1.0 };
        }
        row[n_edges] = -1.0;
        a.push(row);
        b.push(-graph.row_constant(r));
    }
    for e in 0..n_edges {
        let mut row = vec![0.0; n_edges + 1];
        row[e] = 1.0;
        a.push(row);
        b.push(1.0);
    }
    let mut c = vec![0.0; n_edges + 1];
    c[n_edges] = -1.0;
    let primal = solve_lp(&c, &a, &b)?;
    let w: Vec<f64> = primal.x[..n_edges].iter().map(|&v| v.clamp(0.0, 1.0)).collect();
    let value = (0..n_rows)
        .map(|r| graph.row_loss(r, &w))
        .fold(0.0f64, f64::max);

    // dual: variables (P_1..P_R, s_1..s_E), maximize sum c_r P_r - sum s_e
    // subject to -(M^T P)_e - s_e <= 0 and sum P = 1
    let nv = n_rows + n_edges;
    let mut a = Vec::with_capacity(n_edges + 2);
    let mut b = Vec::with_capacity(n_edges + 2);
    let mut col_of_edge = Vec::with_capacity(n_edges);
    for e in 0..n_edges {
        col_of_edge.push(n_rows + e);
        let mut row = vec![0.0; nv];
        row[n_rows + e] = -1.0;
        a.push(row);
        b.push(0.0);
    }
    for (r, incidence) in graph.row_incidence.iter().enumerate() {
        for &(e, one_side) in incidence {
            a[e][r] = if one_side { 1.0 } else { -1.0 };
        }
    }
    let mut sum_row = vec![0.0; nv];
    sum_row[..n_rows].fill(1.0);
    a.push(sum_row.clone());
    b.push(1.0);
    for v in sum_row.iter_mut() {
        *v = -*v;
    }
    a.push(sum_row);
    b.push(-1.0);
    let mut c = vec![0.0; nv];
    for (r, cost) in c.iter_mut().enumerate().take(n_rows) {
        *cost = graph.row_constant(r);
    }
    for e in 0..n_edges {
        c[n_rows + e] = -1.0;
    }
    let dual = solve_lp(&c, &a, &b)?;
    let mut p: Vec<f64> = dual.x[..n_rows].iter().map(|&v| v.max(0.0)).collect();
    let mass: f64 = p.iter().sum();
    if mass <= 0.0 {
        return Err(MuError::NumericalFailure { gap: f64::INFINITY, tolerance });
    }
    for v in p.iter_mut() {
        *v /= mass;
    }
    let dual_value = mu_given_p(graph, &p);

    let gap = value - dual_value;
    if gap > tolerance || gap < -tolerance {
        return Err(MuError::NumericalFailure { gap, tolerance });
    }
    let w_star = w.iter().map(|&w0| (w0, 1.0 - w0)).collect();
    Ok(GameSolution { value, w_star, p_star: p, duality_gap: gap })
}

/// Enumerates, builds and solves in one call.
pub fn solve_mu(
    tuple: OrbitTuple,
    class: &HypothesisClass,
    action: &GroupAction,
    tolerance: f64,
    caps: &MuCaps,
) -> Result<(AugmentedOrbitGraph, GameSolution), MuError> {
    let graph = augmented_graph(tuple, class, action, caps)?;
    let solution = solve_mu_on_graph(&graph, tolerance)?;
    Ok((graph, solution))
}

/// Supremum of the game value over all orbit multisets of a given size.
#[derive(Debug, Clone)]
pub struct MuSupremum {
    pub value: f64,
    /// A tuple attaining `value`.
    pub best_tuple: Option<OrbitTuple>,
    /// False when the tuple budget or a per-tuple cap stopped the
    /// search, making `value` only a verified lower bound.
    pub exact: bool,
    pub tuples_evaluated: usize,
}

/// Evaluates the game on every multiset of `t` orbits (with repetition)
/// up to `tuple_budget` tuples.
pub fn mu_over_tuples(
    class: &HypothesisClass,
    action: &GroupAction,
    t: usize,
    tolerance: f64,
    caps: &MuCaps,
    tuple_budget: usize,
) -> Result<MuSupremum, MuError> {
    assert!(t >= 1);
    let orbit_count = action.orbits().count();
    let mut best = MuSupremum { value: 0.0, best_tuple: None, exact: true, tuples_evaluated: 0 };
    let mut ids = vec![0usize; t];
    loop {
        if best.tuples_evaluated >= tuple_budget {
            best.exact = false;
            return Ok(best);
        }
        let tuple = OrbitTuple::new(action, ids.clone())?;
        match solve_mu(tuple.clone(), class, action, tolerance, caps) {
            Ok((_, solution)) => {
                best.tuples_evaluated += 1;
                if solution.value > best.value || best.best_tuple.is_none() {
                    best.value = solution.value;
                    best.best_tuple = Some(tuple);
                }
            }
            Err(MuError::SizeLimitExceeded { .. }) => {
                // tuple too big to certify: the supremum may hide here
                best.exact = false;
                best.tuples_evaluated += 1;
            }
            Err(other) => return Err(other),
        }
        // next nondecreasing id sequence (multisets with repetition)
        let mut pos = t;
        loop {
            if pos == 0 {
                return Ok(best);
            }
            pos -= 1;
            if ids[pos] + 1 < orbit_count {
                ids[pos] += 1;
                for k in pos + 1..t {
                    ids[k] = ids[pos];
                }
                break;
            }
        }
    }
}
