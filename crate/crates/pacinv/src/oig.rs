//! One-inclusion graphs over restricted hypothesis classes: minimum
//! max-in-degree orientations and the transductive hold-out predictor.
//!
//! Vertices are the distinct labelings of a base instance set; edges
//! join labelings at Hamming distance one. An orientation charges each
//! edge to one endpoint (the "loser"); the predictor resolves a
//! held-out coordinate by following the edge away from the charged
//! endpoint, so a vertex's prediction mistakes are exactly its charges.

use thiserror::Error;

use crate::core::{Label, Sample};
use crate::dims::{vcdim_table, RestrictedClass};
use crate::flow::FlowNetwork;

#[derive(Debug, Error)]
pub enum OigError {
    #[error("restricted class has no labelings")]
    EmptyClass,
    #[error("instance {0} is not part of the graph's base set")]
    InstanceNotInGraph(usize),
    #[error("no vertex is consistent with the sample")]
    NoConsistentVertex,
    #[error("consistent vertices disagree at the test instance without forming an edge there")]
    UnderdeterminedSample,
    #[error("sample is not realizable by the class")]
    NotRealizable,
}

/// Edge between two vertices differing at exactly one coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OigEdge {
    pub a: usize,
    pub b: usize,
    pub coordinate: usize,
}

#[derive(Debug, Clone)]
pub struct OneInclusionGraph {
    /// Sorted distinct instances; coordinate i of a vertex labels
    /// `base_instances[i]`.
    pub base_instances: Vec<usize>,
    pub vertices: Vec<Vec<Label>>,
    pub edges: Vec<OigEdge>,
}

impl OneInclusionGraph {
    pub fn vcdim(&self) -> usize {
        vcdim_table(&self.vertices, self.base_instances.len())
    }

    fn coordinate_of(&self, x: usize) -> Result<usize, OigError> {
        self.base_instances.binary_search(&x).map_err(|_| OigError::InstanceNotInGraph(x))
    }
}

/// Edge winners: the endpoint a prediction follows; the other endpoint
/// is charged.
#[derive(Debug, Clone)]
pub struct Orientation {
    /// Per edge, the winning vertex index (one of the edge's endpoints).
    pub winner: Vec<usize>,
}

impl Orientation {
    /// Number of edges charged to (= lost by) each vertex.
    pub fn charges(&self, graph: &OneInclusionGraph) -> Vec<usize> {
        let mut counts = vec![0usize; graph.vertices.len()];
        for (e, edge) in graph.edges.iter().enumerate() {
            let loser = if self.winner[e] == edge.a { edge.b } else { edge.a };
            counts[loser] += 1;
        }
        counts
    }
}

/// Builds the graph by pairwise Hamming-distance-one comparison.
pub fn build_graph(class: &RestrictedClass) -> Result<OneInclusionGraph, OigError> {
    if class.is_empty() {
        return Err(OigError::EmptyClass);
    }
    let vertices = class.labelings.clone();
    let mut edges = Vec::new();
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            let mut diff = None;
            for (c, (va, vb)) in vertices[i].iter().zip(&vertices[j]).enumerate() {
                if va != vb {
                    if diff.is_some() {
                        diff = None;
                        break;
                    }
                    diff = Some(c);
                }
            }
            if let Some(coordinate) = diff {
                edges.push(OigEdge { a: i, b: j, coordinate });
            }
        }
    }
    Ok(OneInclusionGraph { base_instances: class.base_instances.clone(), vertices, edges })
}

/// Charges every edge to an endpoint so that no vertex is charged more
/// than `k` times, if possible. Returns per-edge winners. The flow
/// prefers charging the endpoint labeled 1 at the edge's coordinate, so
/// ties resolve toward predicting 0.
fn orient_with_bound(graph: &OneInclusionGraph, k: usize) -> Option<Orientation> {
    let ne = graph.edges.len();
    let nv = graph.vertices.len();
    let source = 0;
    let edge_base = 1;
    let vertex_base = edge_base + ne;
    let sink = vertex_base + nv;
    let mut net = FlowNetwork::new(sink + 1);
    let mut charge_arcs = Vec::with_capacity(ne);
    for (e, edge) in graph.edges.iter().enumerate() {
        net.add_arc(source, edge_base + e, 1);
        let (one_side, zero_side) = if graph.vertices[edge.a][edge.coordinate] == 1 {
            (edge.a, edge.b)
        } else {
            (edge.b, edge.a)
        };
        let first = net.add_arc(edge_base + e, vertex_base + one_side, 1);
        let second = net.add_arc(edge_base + e, vertex_base + zero_side, 1);
        charge_arcs.push(((first, one_side), (second, zero_side)));
    }
    for v in 0..nv {
        net.add_arc(vertex_base + v, sink, k as i64);
    }
    if net.max_flow(source, sink) != ne as i64 {
        return None;
    }
    let winner = graph
        .edges
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let ((first_arc, first_v), (_, second_v)) = charge_arcs[e];
            let loser = if net.flow(first_arc) == 1 { first_v } else { second_v };
            if loser == edge.a {
                edge.b
            } else {
                edge.a
            }
        })
        .collect();
    Some(Orientation { winner })
}

/// Minimum max-charge orientation, found by binary search on the bound
/// with a feasibility flow per candidate. The achieved bound never
/// exceeds the VC dimension of the vertex labelings (checked).
pub fn orient(graph: &OneInclusionGraph) -> (Orientation, usize) {
    if graph.edges.is_empty() {
        return (Orientation { winner: Vec::new() }, 0);
    }
    let mut degree = vec![0usize; graph.vertices.len()];
    for edge in &graph.edges {
        degree[edge.a] += 1;
        degree[edge.b] += 1;
    }
    let mut hi = degree.iter().copied().max().unwrap_or(0);
    let mut lo = 1;
    let mut best = orient_with_bound(graph, hi).expect("max degree is always feasible");
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match orient_with_bound(graph, mid) {
            Some(orientation) => {
                best = orientation;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    let d = graph.vcdim();
    assert!(
        hi <= d,
        "orientation bound {hi} exceeds the vertex labelings' VC dimension {d}"
    );
    (best, hi)
}

/// Predicts the label of `x` from a sample over the remaining base
/// instances: a sample hit answers directly; otherwise the vertices
/// consistent with the sample either agree at `x` or form a single edge
/// there, whose winner answers.
pub fn predict_q(
    graph: &OneInclusionGraph,
    orientation: &Orientation,
    sample: &Sample,
    x: usize,
) -> Result<Label, OigError> {
    let cx = graph.coordinate_of(x)?;
    for &(sx, sy) in sample.pairs() {
        if sx == x {
            return Ok(sy);
        }
    }
    let coords: Vec<(usize, Label)> = sample
        .pairs()
        .iter()
        .map(|&(sx, sy)| graph.coordinate_of(sx).map(|c| (c, sy)))
        .collect::<Result<_, _>>()?;
    let consistent: Vec<usize> = (0..graph.vertices.len())
        .filter(|&v| coords.iter().all(|&(c, y)| graph.vertices[v][c] == y))
        .collect();
    match consistent.as_slice() {
        [] => Err(OigError::NoConsistentVertex),
        all => {
            let first = graph.vertices[all[0]][cx];
            if all.iter().all(|&v| graph.vertices[v][cx] == first) {
                return Ok(first);
            }
            if let [u, v] = *all {
                if let Some(e) = graph
                    .edges
                    .iter()
                    .position(|edge| edge.coordinate == cx && ((edge.a, edge.b) == (u, v)))
                {
                    return Ok(graph.vertices[orientation.winner[e]][cx]);
                }
            }
            Err(OigError::UnderdeterminedSample)
        }
    }
}

/// Exact leave-one-out error of the predictor on a realizable sample:
/// the average over held-out positions of predicting that position from
/// the rest under one fixed minimum orientation. At most vcdim/|S|.
pub fn loo_error(class: &RestrictedClass, sample: &Sample) -> Result<f64, OigError> {
    if sample.is_empty() {
        return Err(OigError::NotRealizable);
    }
    let graph = build_graph(class)?;
    let coords: Vec<(usize, Label)> = sample
        .pairs()
        .iter()
        .map(|&(sx, sy)| graph.coordinate_of(sx).map(|c| (c, sy)))
        .collect::<Result<_, _>>()?;
    let realizable = (0..graph.vertices.len())
        .any(|v| coords.iter().all(|&(c, y)| graph.vertices[v][c] == y));
    if !realizable {
        return Err(OigError::NotRealizable);
    }
    let (orientation, bound) = orient(&graph);
    let mut mistakes = 0usize;
    for i in 0..sample.len() {
        let (x, y) = sample.pairs()[i];
        let rest = Sample::new(
            sample
                .pairs()
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &p)| p)
                .collect(),
        );
        if predict_q(&graph, &orientation, &rest, x)? != y {
            mistakes += 1;
        }
    }
    let loo = mistakes as f64 / sample.len() as f64;
    debug_assert!(
        loo <= bound as f64 / sample.len() as f64 + 1e-9,
        "leave-one-out error {loo} exceeds charge bound {bound}/{}",
        sample.len()
    );
    Ok(loo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dims::{restrict_raw, RestrictionKind};
    use crate::core::HypothesisClass;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn class_over(labelings: Vec<Vec<Label>>, n: usize) -> RestrictedClass {
        let class = HypothesisClass::new(labelings, n).unwrap();
        restrict_raw(&class, &(0..n).collect::<Vec<_>>())
    }

    fn full_cube(t: usize) -> RestrictedClass {
        let labelings: Vec<Vec<Label>> = (0u32..(1 << t))
            .map(|m| (0..t).map(|i| ((m >> i) & 1) as u8).collect())
            .collect();
        class_over(labelings, t)
    }

    fn star() -> RestrictedClass {
        class_over(vec![vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]], 3)
    }

    #[test]
    fn build_graph_examples() {
        let singleton = class_over(vec![vec![0, 1]], 2);
        assert!(build_graph(&singleton).unwrap().edges.is_empty());

        let cube = build_graph(&full_cube(3)).unwrap();
        assert_eq!(cube.edges.len(), 12);

        let star = build_graph(&star()).unwrap();
        assert_eq!(star.edges.len(), 3);
        assert!(star.edges.iter().all(|e| e.a == 0));
    }

    #[test]
    fn empty_class_is_rejected() {
        let empty = RestrictedClass {
            base_instances: vec![0, 1],
            labelings: Vec::new(),
            kind: RestrictionKind::Raw,
        };
        assert!(matches!(build_graph(&empty), Err(OigError::EmptyClass)));
    }

    /// Brute-force minimum max-charge over all orientations.
    fn min_max_charge_oracle(graph: &OneInclusionGraph) -> usize {
        let ne = graph.edges.len();
        assert!(ne <= 16);
        let mut best = usize::MAX;
        for mask in 0u32..(1 << ne) {
            let mut charges = vec![0usize; graph.vertices.len()];
            for (e, edge) in graph.edges.iter().enumerate() {
                let loser = if mask & (1 << e) != 0 { edge.a } else { edge.b };
                charges[loser] += 1;
            }
            best = best.min(charges.iter().copied().max().unwrap_or(0));
        }
        best
    }

    #[test]
    fn orientation_on_fixed_graphs() {
        let graph = build_graph(&star()).unwrap();
        let (orientation, bound) = orient(&graph);
        assert_eq!(bound, min_max_charge_oracle(&graph));
        assert_eq!(bound, 1);
        assert_eq!(orientation.charges(&graph).iter().max(), Some(&1));

        let cube = build_graph(&full_cube(3)).unwrap();
        let (orientation, bound) = orient(&cube);
        assert_eq!(bound, 2);
        assert!(bound <= cube.vcdim());
        assert_eq!(orientation.charges(&cube).iter().max(), Some(&2));

        let singleton = build_graph(&class_over(vec![vec![0, 0]], 2)).unwrap();
        assert_eq!(orient(&singleton).1, 0);
    }

    #[test]
    fn orientation_matches_oracle_on_random_classes() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..40 {
            let t = 2 + rng.gen::<usize>() % 3;
            let count = 2 + rng.gen::<usize>() % 6;
            let labelings: Vec<Vec<Label>> = (0..count)
                .map(|_| (0..t).map(|_| rng.gen::<bool>() as u8).collect())
                .collect();
            let class = class_over(labelings, t);
            let graph = build_graph(&class).unwrap();
            if graph.edges.len() > 16 {
                continue;
            }
            let (_, bound) = orient(&graph);
            assert_eq!(bound, min_max_charge_oracle(&graph));
        }
    }

    #[test]
    fn haussler_bound_on_random_classes() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..200 {
            let t = 2 + rng.gen::<usize>() % 6; // 2..=7
            let count = 2 + rng.gen::<usize>() % 49; // 2..=50
            let labelings: Vec<Vec<Label>> = (0..count)
                .map(|_| (0..t).map(|_| rng.gen::<bool>() as u8).collect())
                .collect();
            let class = class_over(labelings, t);
            let graph = build_graph(&class).unwrap();
            // orient() asserts bound <= vcdim internally
            let (orientation, bound) = orient(&graph);
            let max_charge = orientation.charges(&graph).into_iter().max().unwrap_or(0);
            // a minimum-bound orientation always attains its bound
            assert_eq!(max_charge, bound);
        }
    }

    #[test]
    fn feasibility_is_monotone_in_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..30 {
            let t = 2 + rng.gen::<usize>() % 3;
            let count = 2 + rng.gen::<usize>() % 7;
            let labelings: Vec<Vec<Label>> = (0..count)
                .map(|_| (0..t).map(|_| rng.gen::<bool>() as u8).collect())
                .collect();
            let graph = build_graph(&class_over(labelings, t)).unwrap();
            let (_, bound) = orient(&graph);
            for k in bound..bound + 3 {
                assert!(orient_with_bound(&graph, k).is_some());
            }
            if bound > 0 {
                assert!(orient_with_bound(&graph, bound - 1).is_none());
            }
        }
    }

    #[test]
    fn predictions_on_the_star() {
        let graph = build_graph(&star()).unwrap();
        let (orientation, _) = orient(&graph);

        // unique consistent vertex
        let s = Sample::new(vec![(0, 1), (1, 0)]);
        assert_eq!(predict_q(&graph, &orientation, &s, 2).unwrap(), 0);

        // test instance answered from the sample itself
        let s = Sample::new(vec![(0, 1), (2, 0)]);
        assert_eq!(predict_q(&graph, &orientation, &s, 0).unwrap(), 1);

        // two consistent vertices forming an edge at the held-out
        // coordinate: the charged endpoint is the 1-side, so 0 wins
        let s = Sample::new(vec![(1, 0), (2, 0)]);
        assert_eq!(predict_q(&graph, &orientation, &s, 0).unwrap(), 0);

        // nothing matches
        let s = Sample::new(vec![(0, 1), (1, 1)]);
        assert!(matches!(
            predict_q(&graph, &orientation, &s, 2),
            Err(OigError::NoConsistentVertex)
        ));

        let s = Sample::new(vec![(4, 0)]);
        assert!(matches!(
            predict_q(&graph, &orientation, &s, 0),
            Err(OigError::InstanceNotInGraph(4))
        ));
    }

    #[test]
    fn disagreement_without_edge_is_underdetermined() {
        let class = class_over(vec![vec![0, 0, 0], vec![1, 1, 0]], 3);
        let graph = build_graph(&class).unwrap();
        let (orientation, _) = orient(&graph);
        let s = Sample::new(vec![(2, 0)]);
        assert!(matches!(
            predict_q(&graph, &orientation, &s, 0),
            Err(OigError::UnderdeterminedSample)
        ));
    }

    #[test]
    fn prediction_ignores_sample_order() {
        let graph = build_graph(&full_cube(3)).unwrap();
        let (orientation, _) = orient(&graph);
        let pairs = vec![(0, 1), (1, 0)];
        let forward = predict_q(&graph, &orientation, &Sample::new(pairs.clone()), 2).unwrap();
        let mut reversed = pairs;
        reversed.reverse();
        let backward = predict_q(&graph, &orientation, &Sample::new(reversed), 2).unwrap();
        assert_eq!(forward, backward);
    }

    #[test]
    fn loo_error_examples() {
        // singleton class always predicts its own labeling
        let class = class_over(vec![vec![0, 1, 0]], 3);
        let s = Sample::new(vec![(0, 0), (1, 1), (2, 0)]);
        assert_eq!(loo_error(&class, &s).unwrap(), 0.0);

        // the star charged away from the center predicts it perfectly
        let s = Sample::new(vec![(0, 0), (1, 0), (2, 0)]);
        assert_eq!(loo_error(&star(), &s).unwrap(), 0.0);

        // a two-vertex class over one instance must guess one side
        let class = class_over(vec![vec![0], vec![1]], 1);
        assert_eq!(loo_error(&class, &Sample::new(vec![(0, 0)])).unwrap(), 0.0);
        assert_eq!(loo_error(&class, &Sample::new(vec![(0, 1)])).unwrap(), 1.0);

        // duplicates are answered from the surviving copy
        let s = Sample::new(vec![(0, 1), (0, 1)]);
        assert_eq!(loo_error(&class, &s).unwrap(), 0.0);

        let bad = Sample::new(vec![(0, 1), (1, 1), (2, 1)]);
        assert!(matches!(loo_error(&star(), &bad), Err(OigError::NotRealizable)));
    }

    #[test]
    fn loo_error_bounded_by_dimension_on_random_classes() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for _ in 0..60 {
            let t = 2 + rng.gen::<usize>() % 4;
            let count = 2 + rng.gen::<usize>() % 10;
            let labelings: Vec<Vec<Label>> = (0..count)
                .map(|_| (0..t).map(|_| rng.gen::<bool>() as u8).collect())
                .collect();
            let class = class_over(labelings, t);
            // pick a realizable sample: label every instance by a vertex
            let v = class.labelings[rng.gen::<usize>() % class.labelings.len()].clone();
            let pairs: Vec<(usize, Label)> = (0..t).map(|x| (x, v[x])).collect();
            let loo = loo_error(&class, &Sample::new(pairs)).unwrap();
            assert!(loo <= class.vcdim() as f64 / t as f64 + 1e-12);
        }
    }
}
