//! Command-line front end: dimension reports, restricted one-inclusion
//! graphs, orientation-game values, single learner runs and the
//! Monte-Carlo experiment harness. Problems arrive as JSON files
//! naming instances, group generators, hypothesis labelings and an
//! optional labeled distribution.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::json;

use pacinv::core::{
    err_sample, sample, Atom, GroupAction, HypothesisClass, InstanceSpace, Label,
    LabeledDistribution,
};
use pacinv::dims::{
    dim_hg, restrict_eta, restrict_invariant, restrict_orbit_consistent, restrict_raw, vc_ao,
    vc_o, vcdim, RestrictedClass,
};
use pacinv::experiment::{csv_rows, plotdata, run_experiment, ExperimentConfig};
use pacinv::learners::{adaptive_agnostic, adaptive_relaxed, run_spec, AdaptiveOutcome, LearnerSpec};
use pacinv::mugame::{mu_over_tuples, solve_mu, MuCaps, OrbitTuple, DEFAULT_MU_TOLERANCE};
use pacinv::oig::build_graph;

#[derive(Parser)]
#[command(name = "pacinv", version, about = "Laboratory for learning under group invariances")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact dimensions of a problem: plain, orbit and augmented-orbit
    /// shattering numbers plus the hypothesis-graph dimension.
    Dims {
        problem: PathBuf,
        /// Cap on the hypothesis-graph dimension search.
        #[arg(long, default_value_t = 6)]
        k_max: usize,
    },
    /// One-inclusion graph of the class restricted to given instances.
    Graph {
        problem: PathBuf,
        /// invariant | orbit | raw | eta=<fraction>
        #[arg(long, default_value = "orbit")]
        restriction: String,
        /// Comma-separated instance ids; all instances when omitted.
        #[arg(long, value_delimiter = ',')]
        instances: Vec<String>,
    },
    /// Value of the orientation game on an augmented orbit graph.
    Mu {
        problem: PathBuf,
        /// Comma-separated orbit ids of an explicit tuple; when absent
        /// the value is maximised over all tuples of length t.
        #[arg(long, value_delimiter = ',')]
        tuple: Vec<usize>,
        /// Tuple length for the supremum search.
        #[arg(long, default_value_t = 2)]
        t: usize,
        #[arg(long, default_value_t = DEFAULT_MU_TOLERANCE)]
        tolerance: f64,
        /// Max tuples visited by the supremum search.
        #[arg(long, default_value_t = 20_000)]
        tuple_budget: usize,
        /// Max instance sequences enumerated per tuple.
        #[arg(long, default_value_t = 1_000_000)]
        max_sequences: u64,
        /// Max (labeling, witness) rows per tuple.
        #[arg(long, default_value_t = 100_000)]
        max_rows: u64,
    },
    /// Draw a sample from the problem distribution and run one learner.
    Learn {
        problem: PathBuf,
        /// Learner description, as a JSON file path or an inline JSON
        /// object.
        #[arg(long)]
        learner: String,
        /// Training sample size.
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo comparison of learners over a named construction.
    Experiment {
        /// Experiment description (construction, learners, sizes, eps).
        #[arg(long)]
        config: PathBuf,
        /// CSV output path; a JSON sidecar with the full configuration
        /// and aggregates lands next to it.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Worker threads; the rayon default when omitted.
        #[arg(long)]
        threads: Option<usize>,
        /// Also write per-curve (m, mean_err, ci) triples for plotting.
        #[arg(long)]
        emit_plotdata: bool,
    },
}

#[derive(Deserialize)]
struct AtomRow {
    x: usize,
    y: Label,
    p: f64,
}

#[derive(Deserialize)]
struct ProblemFile {
    instances: Vec<String>,
    #[serde(default)]
    group_generators: Vec<Vec<usize>>,
    hypotheses: Vec<Vec<Label>>,
    #[serde(default)]
    distribution: Vec<AtomRow>,
}

struct Problem {
    space: InstanceSpace,
    action: GroupAction,
    class: HypothesisClass,
    dist: Option<LabeledDistribution>,
}

fn load_problem(path: &Path) -> Result<Problem, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let file: ProblemFile =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let space = InstanceSpace::new(file.instances).map_err(|e| e.to_string())?;
    let n = space.len();
    let generators = if file.group_generators.is_empty() {
        vec![(0..n).collect()]
    } else {
        file.group_generators
    };
    let action = GroupAction::new(n, generators).map_err(|e| e.to_string())?;
    let class = HypothesisClass::new(file.hypotheses, n).map_err(|e| e.to_string())?;
    let dist = if file.distribution.is_empty() {
        None
    } else {
        let atoms =
            file.distribution.iter().map(|r| Atom { x: r.x, y: r.y, p: r.p }).collect();
        Some(LabeledDistribution::new(atoms).map_err(|e| e.to_string())?)
    };
    Ok(Problem { space, action, class, dist })
}

/// Prints to stdout, treating a closed pipe (e.g. `| head`) as a
/// normal end of output rather than an error.
fn print_line(text: &str) {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = writeln!(stdout, "{text}") {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        panic!("failed printing to stdout: {e}");
    }
}

fn emit(out: Option<&Path>, value: &serde_json::Value) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    match out {
        Some(path) => fs::write(path, text + "\n")
            .map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print_line(&text);
            Ok(())
        }
    }
}

fn cmd_dims(problem: &Path, k_max: usize) -> Result<(), String> {
    let p = load_problem(problem)?;
    let bound = dim_hg(&p.class, &p.action, k_max);
    emit(
        None,
        &json!({
            "instances": p.space.len(),
            "orbits": p.action.orbits().count(),
            "hypotheses": p.class.len(),
            "vcdim": vcdim(&p.class),
            "vc_o": vc_o(&p.class, &p.action),
            "vc_ao": vc_ao(&p.class, &p.action),
            "dim_hg": {"value": bound.value, "exact": bound.exact},
        }),
    )
}

fn restricted(
    p: &Problem,
    restriction: &str,
    xs: &[usize],
) -> Result<RestrictedClass, String> {
    if let Some(eta) = restriction.strip_prefix("eta=") {
        let eta: f64 = eta.parse().map_err(|e| format!("eta: {e}"))?;
        if !(0.0..=1.0).contains(&eta) {
            return Err(format!("eta={eta} outside [0, 1]"));
        }
        return Ok(restrict_eta(&p.class, &p.action, xs, eta));
    }
    match restriction {
        "invariant" => Ok(restrict_invariant(&p.class, &p.action, xs)),
        "orbit" => Ok(restrict_orbit_consistent(&p.class, &p.action, xs)),
        "raw" => Ok(restrict_raw(&p.class, xs)),
        other => Err(format!("unknown restriction {other:?}")),
    }
}

fn cmd_graph(problem: &Path, restriction: &str, instance_ids: &[String]) -> Result<(), String> {
    let p = load_problem(problem)?;
    let xs: Vec<usize> = if instance_ids.is_empty() {
        (0..p.space.len()).collect()
    } else {
        instance_ids
            .iter()
            .map(|id| p.space.lookup(id).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?
    };
    let class = restricted(&p, restriction, &xs)?;
    if class.is_empty() {
        return emit(None, &json!({"vertices": [], "edges": [], "vcdim": 0}));
    }
    let graph = build_graph(&class).map_err(|e| e.to_string())?;
    let edges: Vec<serde_json::Value> = graph
        .edges
        .iter()
        .map(|e| {
            json!({
                "a": e.a,
                "b": e.b,
                "coordinate": p.space.id(class.base_instances[e.coordinate]),
            })
        })
        .collect();
    emit(
        None,
        &json!({
            "instances": class.base_instances.iter().map(|&x| p.space.id(x)).collect::<Vec<_>>(),
            "vertices": graph.vertices,
            "edges": edges,
            "vcdim": graph.vcdim(),
        }),
    )
}

#[allow(clippy::too_many_arguments)]
fn cmd_mu(
    problem: &Path,
    tuple: &[usize],
    t: usize,
    tolerance: f64,
    tuple_budget: usize,
    max_sequences: u64,
    max_rows: u64,
) -> Result<(), String> {
    let p = load_problem(problem)?;
    let caps = MuCaps { max_sequences, max_rows };
    if tuple.is_empty() {
        let sup = mu_over_tuples(&p.class, &p.action, t, tolerance, &caps, tuple_budget)
            .map_err(|e| e.to_string())?;
        return emit(
            None,
            &json!({
                "value": sup.value,
                "exact": sup.exact,
                "tuples_evaluated": sup.tuples_evaluated,
                "best_tuple": sup.best_tuple.map(|u| u.orbit_ids().to_vec()),
            }),
        );
    }
    let tuple = OrbitTuple::new(&p.action, tuple.to_vec()).map_err(|e| e.to_string())?;
    let (graph, solution) =
        solve_mu(tuple, &p.class, &p.action, tolerance, &caps).map_err(|e| e.to_string())?;
    emit(
        None,
        &json!({
            "value": solution.value,
            "duality_gap": solution.duality_gap,
            "rows": graph.rows().len(),
            "orientation": solution.w_star,
            "adversary": solution.p_star,
        }),
    )
}

fn learner_spec(arg: &str) -> Result<LearnerSpec, String> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| format!("{arg}: {e}"))?
    };
    serde_json::from_str(&text).map_err(|e| format!("learner spec: {e}"))
}

fn adaptive_metadata(outcome: &AdaptiveOutcome) -> serde_json::Value {
    json!({
        "chosen": outcome.chosen,
        "candidates": outcome.candidates,
    })
}

fn cmd_learn(
    problem: &Path,
    learner: &str,
    m: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), String> {
    let p = load_problem(problem)?;
    let dist = p.dist.as_ref().ok_or("problem file has no distribution")?;
    let spec = learner_spec(learner)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = sample(dist, m, &mut rng);
    let unlabeled: Vec<usize> = match spec.unlabeled_need() {
        0 => Vec::new(),
        u => sample(dist, u, &mut rng).pairs().iter().map(|&(x, _)| x).collect(),
    };
    // adaptive learners are rerun through their own entry points so the
    // candidate table survives into the metadata
    let (predictor, metadata) = match &spec {
        LearnerSpec::AdaptiveRelaxed { delta, split } => {
            let outcome = adaptive_relaxed(&s, &p.class, &p.action, *delta, *split, &mut rng)
                .map_err(|e| e.to_string())?;
            let meta = adaptive_metadata(&outcome);
            (outcome.predictor, Some(meta))
        }
        LearnerSpec::AdaptiveAgnostic { delta, split, .. } => {
            let outcome = adaptive_agnostic(
                &s, &unlabeled, &p.class, &p.action, *delta, *split, &mut rng,
            )
            .map_err(|e| e.to_string())?;
            let meta = adaptive_metadata(&outcome);
            (outcome.predictor, Some(meta))
        }
        _ => {
            let predictor = run_spec(&spec, &s, &unlabeled, &p.class, &p.action, &mut rng)
                .map_err(|e| e.to_string())?;
            (predictor, None)
        }
    };
    let train_error = if s.is_empty() {
        None
    } else {
        Some(err_sample(predictor.labels(), &s).expect("nonempty sample"))
    };
    emit(
        out,
        &json!({
            "learner": spec,
            "m": m,
            "seed": seed,
            "sample": s.pairs(),
            "predictor": predictor.labels(),
            "train_error": train_error,
            "metadata": metadata,
        }),
    )
}

fn cmd_experiment(
    config: &Path,
    out: &Path,
    seed: u64,
    trials: usize,
    threads: Option<usize>,
    emit_plotdata: bool,
) -> Result<(), String> {
    let text =
        fs::read_to_string(config).map_err(|e| format!("{}: {e}", config.display()))?;
    let cfg: ExperimentConfig =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", config.display()))?;
    let run = || run_experiment(&cfg, trials, seed);
    let (results, sufficient) = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| e.to_string())?
            .install(run),
        None => run(),
    }
    .map_err(|e| e.to_string())?;
    fs::write(out, csv_rows(&results)).map_err(|e| format!("{}: {e}", out.display()))?;
    let sidecar = json!({
        "config": cfg,
        "seed": seed,
        "trials": trials,
        "sufficient_m": sufficient,
        "results": results,
    });
    let sidecar_path = out.with_extension("json");
    emit(Some(&sidecar_path), &sidecar)?;
    if emit_plotdata {
        let plot_path = out.with_extension("plot.json");
        emit(Some(&plot_path), &plotdata(&results))?;
    }
    for r in &results {
        print_line(&format!(
            "{} {} m={} mean_err={:.6} se={:.6} pr>eps={:.4} failures={}",
            r.construction, r.learner, r.m, r.mean_err, r.se, r.pr_exceed_eps, r.failures
        ));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.cmd {
        Cmd::Dims { problem, k_max } => cmd_dims(problem, *k_max),
        Cmd::Graph { problem, restriction, instances } => {
            cmd_graph(problem, restriction, instances)
        }
        Cmd::Mu { problem, tuple, t, tolerance, tuple_budget, max_sequences, max_rows } => {
            cmd_mu(problem, tuple, *t, *tolerance, *tuple_budget, *max_sequences, *max_rows)
        }
        Cmd::Learn { problem, learner, m, seed, out } => {
            cmd_learn(problem, learner, *m, *seed, out.as_deref())
        }
        Cmd::Experiment { config, out, seed, trials, threads, emit_plotdata } => {
            cmd_experiment(config, out, *seed, *trials, *threads, *emit_plotdata)
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
