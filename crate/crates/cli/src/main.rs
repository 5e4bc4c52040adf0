//! The `ftsdist` command line tool: behavioural distances and
//! bisimulation quotients for nondeterministic fuzzy transition systems,
//! with exact rational output.
//!
//! Exit codes: 0 success, 2 parse error, 3 usage or validation error,
//! 4 numeric verification failure.

mod output;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use ftsdist_core::bisim::quotient;
use ftsdist_core::lifting::lift;
use ftsdist_core::metric::{
    discount_steps, fixpoint_discounted_approx, fixpoint_discounted_exact, fixpoint_undiscounted,
    recovery_epsilon, DistanceMatrix, MetricError,
};
use ftsdist_core::model::{Fts, FuzzySubset, StateId};
use ftsdist_core::rational::{Literal, UnitRational};

use output::{Format, Metadata, OutputDocument, Payload};

#[derive(Parser)]
#[command(
    name = "ftsdist",
    version,
    about = "Behavioural distances and bisimulation for fuzzy transition systems",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report model sizes, the membership value set, and counts
    Info {
        /// JSON model file
        model: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Compute the behavioural distance matrix (or a single pair)
    Distance {
        /// JSON model file
        model: PathBuf,
        /// Discount factor in (0,1); requires --epsilon
        #[arg(long)]
        gamma: Option<String>,
        /// Approximation tolerance in (0,1)
        #[arg(long)]
        epsilon: Option<String>,
        /// Recover the exact discounted fixpoint by smallest-denominator
        /// rounding; requires --denominator-bound
        #[arg(long)]
        exact: bool,
        /// Upper bound on the denominators of the exact fixpoint entries
        #[arg(long)]
        denominator_bound: Option<u64>,
        /// Report only the distance between two named states
        #[arg(long, num_args = 2, value_names = ["FROM", "TO"])]
        pair: Option<Vec<String>>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Print the bisimulation quotient blocks
    Bisim {
        /// JSON model file
        model: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Lift a state metric to a distance between two distributions
    Lift {
        /// JSON model file (provides the state space)
        model: PathBuf,
        /// Use the discrete metric: 0 on the diagonal, 1 elsewhere
        #[arg(long, conflicts_with = "metric")]
        discrete: bool,
        /// JSON metric file {"states": [...], "matrix": [[...]]}
        #[arg(long)]
        metric: Option<PathBuf>,
        /// Inline JSON distribution, e.g. '{"s1":"1/2","s2":"0.9"}'
        #[arg(long)]
        mu: String,
        /// Inline JSON distribution
        #[arg(long)]
        eta: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

/// A failed run, carrying the exit code taxonomy.
enum Failure {
    /// Unreadable or invalid input data (exit 2).
    Parse(String),
    /// Invalid options or failed validation (exit 3).
    Usage(String),
    /// A numeric verification failed (exit 4).
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Usage(_) => 3,
            Failure::Verification(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Parse(m) | Failure::Usage(m) | Failure::Verification(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(rendered) => {
            print!("{rendered}");
            if !rendered.ends_with('\n') {
                println!();
            }
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn run(command: Command) -> Result<String, Failure> {
    match command {
        Command::Info { model, format } => {
            let m = load_model(&model)?;
            let doc = OutputDocument {
                mode: "info",
                payload: Payload::Info {
                    state_count: m.state_count(),
                    label_count: m.label_count(),
                    transition_count: m.transitions().len(),
                    size_arith: m.size_arith(),
                    size_bits: m.size_bits(),
                    theta: m.theta().iter().map(UnitRational::to_string).collect(),
                },
                metadata: Metadata::default(),
            };
            Ok(doc.render(format))
        }
        Command::Distance {
            model,
            gamma,
            epsilon,
            exact,
            denominator_bound,
            pair,
            format,
        } => {
            let m = load_model(&model)?;
            let doc = run_distance(&m, gamma, epsilon, exact, denominator_bound, pair)?;
            Ok(doc.render(format))
        }
        Command::Bisim { model, format } => {
            let m = load_model(&model)?;
            let blocks = quotient(&m)
                .blocks()
                .iter()
                .map(|block| {
                    block
                        .iter()
                        .map(|s| m.state_name(*s).to_string())
                        .collect()
                })
                .collect();
            let doc = OutputDocument {
                mode: "bisim",
                payload: Payload::Blocks { blocks },
                metadata: Metadata::default(),
            };
            Ok(doc.render(format))
        }
        Command::Lift {
            model,
            discrete,
            metric,
            mu,
            eta,
            format,
        } => {
            let m = load_model(&model)?;
            let d = match (discrete, metric) {
                (true, None) => DistanceMatrix::discrete(m.state_count()),
                (false, Some(path)) => load_metric(&m, &path)?,
                (false, None) => {
                    return Err(Failure::Usage(
                        "one of --discrete or --metric <FILE> is required".into(),
                    ))
                }
                (true, Some(_)) => unreachable!("clap rejects the combination"),
            };
            let mu = parse_distribution(&m, &mu)?;
            let eta = parse_distribution(&m, &eta)?;
            let doc = OutputDocument {
                mode: "lift",
                payload: Payload::Distance {
                    distance: lift(&d, &mu, &eta).to_string(),
                },
                metadata: Metadata::default(),
            };
            Ok(doc.render(format))
        }
    }
}

fn run_distance(
    m: &Fts,
    gamma: Option<String>,
    epsilon: Option<String>,
    exact: bool,
    denominator_bound: Option<u64>,
    pair: Option<Vec<String>>,
) -> Result<OutputDocument, Failure> {
    let discounting = match (&gamma, &epsilon) {
        (None, None) => {
            if exact || denominator_bound.is_some() {
                return Err(Failure::Usage(
                    "--exact and --denominator-bound require --gamma and --epsilon".into(),
                ));
            }
            None
        }
        (Some(g), Some(e)) => Some((
            parse_unit_option(g, "--gamma")?,
            parse_unit_option(e, "--epsilon")?,
        )),
        (Some(_), None) => {
            return Err(Failure::Usage("--gamma requires --epsilon".into()));
        }
        (None, Some(_)) => {
            return Err(Failure::Usage("--epsilon requires --gamma".into()));
        }
    };
    if exact && denominator_bound.is_none() {
        return Err(Failure::Usage("--exact requires --denominator-bound".into()));
    }
    if !exact && denominator_bound.is_some() {
        return Err(Failure::Usage(
            "--denominator-bound is only meaningful with --exact".into(),
        ));
    }

    let (distances, metadata) = match discounting {
        None => {
            let report = fixpoint_undiscounted(m);
            let metadata = Metadata {
                iterations: Some(report.iterations),
                converged: Some(report.converged),
                ..Metadata::default()
            };
            (report.distances, metadata)
        }
        Some((gamma, epsilon)) if !exact => {
            let report =
                fixpoint_discounted_approx(m, &gamma, &epsilon).map_err(metric_failure)?;
            let metadata = Metadata {
                gamma: Some(gamma.to_string()),
                epsilon: Some(epsilon.to_string()),
                iterations: Some(report.iterations),
                converged: Some(report.converged),
                ..Metadata::default()
            };
            (report.distances, metadata)
        }
        Some((gamma, _epsilon)) => {
            let bound = denominator_bound.expect("checked above");
            let distances =
                fixpoint_discounted_exact(m, &gamma, bound).map_err(metric_failure)?;
            let internal_epsilon = recovery_epsilon(bound).map_err(metric_failure)?;
            let iterations =
                discount_steps(&gamma, &internal_epsilon).map_err(metric_failure)?;
            let metadata = Metadata {
                gamma: Some(gamma.to_string()),
                denominator_bound: Some(bound),
                iterations: Some(iterations),
                converged: Some(true),
                ..Metadata::default()
            };
            (distances, metadata)
        }
    };

    let payload = match pair {
        Some(names) => {
            let from = resolve_state(m, &names[0])?;
            let to = resolve_state(m, &names[1])?;
            Payload::Pair {
                pair: [names[0].clone(), names[1].clone()],
                distance: distances.get(from, to).to_string(),
            }
        }
        None => matrix_payload(m, &distances),
    };
    Ok(OutputDocument {
        mode: "distance",
        payload,
        metadata,
    })
}

fn matrix_payload(m: &Fts, distances: &DistanceMatrix) -> Payload {
    Payload::Matrix {
        states: m.states().map(|s| m.state_name(s).to_string()).collect(),
        matrix: m
            .states()
            .map(|s| {
                m.states()
                    .map(|t| distances.get(s, t).to_string())
                    .collect()
            })
            .collect(),
    }
}

fn load_model(path: &Path) -> Result<Fts, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Parse(format!("cannot read {}: {e}", path.display())))?;
    Fts::parse(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

/// Reads and validates a metric file, then reindexes it to the model's
/// state order. Axiom violations are validation failures; everything else
/// is a parse failure.
fn load_metric(m: &Fts, path: &Path) -> Result<DistanceMatrix, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Parse(format!("cannot read {}: {e}", path.display())))?;
    let (names, matrix) = DistanceMatrix::parse_json(&text).map_err(metric_failure)?;
    if names.len() != m.state_count() {
        return Err(Failure::Usage(format!(
            "metric file lists {} states, the model has {}",
            names.len(),
            m.state_count()
        )));
    }
    let mut position = Vec::with_capacity(names.len());
    for name in &names {
        let id = m.state_id(name).ok_or_else(|| {
            Failure::Usage(format!("metric file names unknown state `{name}`"))
        })?;
        position.push(id);
    }
    let mut seen = vec![false; m.state_count()];
    for id in &position {
        if std::mem::replace(&mut seen[id.0], true) {
            return Err(Failure::Usage(format!(
                "metric file repeats state `{}`",
                m.state_name(*id)
            )));
        }
    }
    let mut aligned = DistanceMatrix::bottom(m.state_count());
    for (i, s) in position.iter().enumerate() {
        for (j, t) in position.iter().enumerate() {
            if i < j {
                aligned.set_symmetric(*s, *t, matrix.get(StateId(i), StateId(j)).clone());
            }
        }
    }
    Ok(aligned)
}

fn metric_failure(e: MetricError) -> Failure {
    match e {
        MetricError::NonzeroDiagonal { .. }
        | MetricError::Asymmetric { .. }
        | MetricError::TriangleViolation { .. }
        | MetricError::InvalidGamma(_)
        | MetricError::InvalidEpsilon(_)
        | MetricError::InvalidDenominatorBound => Failure::Usage(e.to_string()),
        MetricError::DenominatorBoundTooSmall { .. } => Failure::Verification(e.to_string()),
        other => Failure::Parse(other.to_string()),
    }
}

fn parse_unit_option(text: &str, flag: &str) -> Result<UnitRational, Failure> {
    text.parse::<UnitRational>()
        .map_err(|e| Failure::Usage(format!("{flag}: {e}")))
}

fn resolve_state(m: &Fts, name: &str) -> Result<StateId, Failure> {
    m.state_id(name)
        .ok_or_else(|| Failure::Usage(format!("unknown state `{name}`")))
}

/// Parses an inline `{"state": "literal", ...}` distribution over the
/// model's states.
fn parse_distribution(m: &Fts, text: &str) -> Result<FuzzySubset, Failure> {
    let raw: BTreeMap<String, String> = serde_json::from_str(text)
        .map_err(|e| Failure::Parse(format!("invalid distribution: {e}")))?;
    let mut entries = Vec::with_capacity(raw.len());
    for (name, literal_text) in raw {
        let state = m
            .state_id(&name)
            .ok_or_else(|| Failure::Parse(format!("unknown state `{name}` in distribution")))?;
        let literal: Literal = literal_text
            .parse()
            .map_err(|e| Failure::Parse(format!("membership for `{name}`: {e}")))?;
        if literal.value().is_zero() {
            return Err(Failure::Parse(format!(
                "explicit zero membership for `{name}`: supports are listed without zero entries"
            )));
        }
        entries.push((state, literal.value()));
    }
    FuzzySubset::from_entries(entries).map_err(|e| Failure::Parse(e.to_string()))
}
