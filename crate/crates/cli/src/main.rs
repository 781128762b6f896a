use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qdet_core::bayes::{map_regions, solve_bayes};
use qdet_core::capacity::{capacity, CapacityOptions, MethodChoice};
use qdet_core::io;
use qdet_core::operator::{state_to_bloch, HermitianOperator, StateVector};
use qdet_core::sic;
use qdet_core::unambiguous::solve_unambiguous;
use qdet_core::{CostMatrix, Error, Povm};

#[derive(Parser)]
#[command(name = "qdet", version, about = "Optimal encodings and readout bounds for a fixed POVM detector")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimum Bayes cost: best grouping, signal states and cost.
    Bayes {
        #[arg(long)]
        povm: PathBuf,
        /// Comma-separated priors, e.g. 0.5,0.5
        #[arg(long, value_delimiter = ',', required = true)]
        priors: Vec<f64>,
        /// Cost file, or `minerr` for the 0/1 cost.
        #[arg(long, default_value = "minerr")]
        cost: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Unambiguous discrimination with an inconclusive outcome.
    Unambig {
        #[arg(long)]
        povm: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        priors: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Capacity: maximal mutual information over input ensembles.
    Capacity {
        #[arg(long)]
        povm: PathBuf,
        /// Group action file for the covariant solver.
        #[arg(long)]
        group: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        #[arg(long, default_value_t = qdet_core::capacity::DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal-grouping regions over the three-message prior simplex (CSV).
    Regions {
        #[arg(long)]
        povm: PathBuf,
        #[arg(long)]
        resolution: f64,
        /// Restrict to π1 ≥ π2 ≥ π3.
        #[arg(long)]
        ordered: bool,
        #[arg(long, default_value = "minerr")]
        cost: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// The noisy qubit SIC-POVM: detector, symmetry group or closed forms.
    Sic {
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long, value_enum)]
        emit: Emit,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Auto,
    Commuting,
    Covariant,
    General,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Povm,
    Group,
    Analytics,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CapExceeded { .. } | Error::GridTooFine { .. } => 3,
            Error::Infeasible => 4,
            Error::NotConverged { .. } => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: 1,
        message: format!("{}: {e}", path.display()),
    }
}

type CmdResult = Result<(), Failure>;

/// Nine significant digits.
fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..9).contains(&mag) {
        format!("{:.*}", (8 - mag).max(0) as usize, x)
    } else {
        format!("{x:.8e}")
    }
}

fn vec_str(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|&x| num(x)).collect();
    format!("[{}]", items.join(", "))
}

fn complex_str(re: f64, im: f64) -> String {
    if im == 0.0 {
        num(re)
    } else if im < 0.0 {
        format!("{}-{}i", num(re), num(-im))
    } else {
        format!("{}+{}i", num(re), num(im))
    }
}

fn matrix_lines(op: &HermitianOperator<f64>, indent: &str) -> String {
    op.matrix()
        .rows()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(|z| complex_str(z.re, z.im)).collect();
            format!("{indent}[{}]\n", cells.join(", "))
        })
        .collect()
}

fn state_json(op: &HermitianOperator<f64>) -> Value {
    let mut v = json!({ "matrix": op.matrix().rows().map(|r| r.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>()).collect::<Vec<_>>() });
    if let Ok(b) = state_to_bloch(op) {
        v["bloch"] = json!([b.x, b.y, b.z]);
    }
    v
}

fn vector_json(psi: &StateVector<f64>) -> Value {
    Value::Array(psi.iter().map(|z| json!([z.re, z.im])).collect())
}

/// Signal state report: the matrix, plus its Bloch vector for a qubit.
fn describe_state(label: &str, op: &HermitianOperator<f64>) -> String {
    let mut s = format!("  {label}\n{}", matrix_lines(op, "    "));
    if let Ok(b) = state_to_bloch(op) {
        s.push_str(&format!("    bloch = {}\n", vec_str(&[b.x, b.y, b.z])));
    }
    s
}

fn write_json(path: &Path, v: &Value) -> CmdResult {
    fs::write(path, io::to_pretty(v)).map_err(|e| io_failure(path, e))
}

fn load_cost(spec: &str, n: usize) -> Result<CostMatrix<f64>, Failure> {
    if spec == "minerr" {
        Ok(CostMatrix::min_error(n))
    } else {
        Ok(io::read_cost(Path::new(spec))?)
    }
}

fn cmd_bayes(povm: &Path, priors: &[f64], cost: &str, out: Option<&Path>) -> CmdResult {
    let povm: Povm<f64> = io::read_detector(povm)?;
    let cost = load_cost(cost, priors.len())?;
    let s = solve_bayes(&povm, priors, &cost)?;
    let mut report = format!("grouping: {}\nsignal states:\n", s.grouping);
    for (i, rho) in s.signal_states.iter().enumerate() {
        report.push_str(&describe_state(&format!("message {} (prior {})", i + 1, num(s.priors[i])), rho));
    }
    report.push_str(&format!("gain: {}\ncost: {}\n", num(s.gain), num(s.original_cost)));
    print!("{report}");
    if let Some(out) = out {
        write_json(
            out,
            &json!({
                "grouping": s.grouping.assignment(),
                "priors": s.priors,
                "signal_states": s.signal_states.iter().map(state_json).collect::<Vec<_>>(),
                "score_vector": s.score_vector,
                "gain": s.gain,
                "cost": s.original_cost,
            }),
        )?;
    }
    Ok(())
}

fn cmd_unambig(povm: &Path, priors: &[f64], out: Option<&Path>) -> CmdResult {
    let povm: Povm<f64> = io::read_detector(povm)?;
    let s = solve_unambiguous(&povm, priors)?;
    let mut report = format!("grouping: {} (last set is inconclusive)\nsignal states:\n", s.grouping);
    for (i, rho) in s.signal_states.iter().enumerate() {
        report.push_str(&describe_state(
            &format!("message {} (success {})", i + 1, num(s.message_scores[i])),
            rho,
        ));
    }
    let never = s.never_identified();
    if !never.is_empty() {
        let ids: Vec<String> = never.iter().map(|i| (i + 1).to_string()).collect();
        report.push_str(&format!("never identified: {}\n", ids.join(", ")));
    }
    report.push_str(&format!("p_success: {}\n", num(s.p_success)));
    print!("{report}");
    if let Some(out) = out {
        write_json(
            out,
            &json!({
                "grouping": s.grouping.assignment(),
                "signal_states": s.signal_states.iter().map(state_json).collect::<Vec<_>>(),
                "message_scores": s.message_scores,
                "p_success": s.p_success,
            }),
        )?;
    }
    Ok(())
}

fn cmd_capacity(
    povm: &Path,
    group: Option<&Path>,
    method: Method,
    restarts: usize,
    seed: u64,
    out: Option<&Path>,
) -> CmdResult {
    let povm: Povm<f64> = io::read_detector(povm)?;
    let group = group.map(io::read_group).transpose()?;
    let options = CapacityOptions {
        method: match method {
            Method::Auto => MethodChoice::Auto,
            Method::Commuting => MethodChoice::Commuting,
            Method::Covariant => MethodChoice::Covariant,
            Method::General => MethodChoice::General,
        },
        group,
        restarts,
        seed,
        ..CapacityOptions::default()
    };
    let r = capacity(&povm, &options)?;
    for w in &r.diagnostics.warnings {
        eprintln!("warning: {w}");
    }
    let mut report = format!(
        "capacity: {} bits\nmethod: {}\ncertified: {}\nensemble:\n",
        num(r.bits),
        r.method,
        r.certified
    );
    for (i, rho) in r.ensemble.states().iter().enumerate() {
        report.push_str(&describe_state(&format!("state {} (prior {})", i + 1, num(r.ensemble.priors()[i])), rho));
    }
    report.push_str(&format!("subentropy lower bound: {}\n", num(r.lower_bound)));
    match r.holevo {
        Some(h) => report.push_str(&format!("rescaled-POVM Holevo quantity: {}\n", num(h))),
        None => report.push_str("rescaled-POVM Holevo quantity: undefined (zero-trace element)\n"),
    }
    print!("{report}");
    if let Some(out) = out {
        write_json(
            out,
            &json!({
                "bits": r.bits,
                "method": r.method.as_str(),
                "certified": r.certified,
                "priors": r.ensemble.priors(),
                "state_vectors": r.state_vectors.iter().map(vector_json).collect::<Vec<_>>(),
                "states": r.ensemble.states().iter().map(state_json).collect::<Vec<_>>(),
                "seed_state": r.seed_state.as_ref().map(vector_json),
                "lower_bound": r.lower_bound,
                "holevo": r.holevo,
                "iterations": r.diagnostics.iterations,
                "restarts": r.diagnostics.restarts,
                "warnings": r.diagnostics.warnings,
            }),
        )?;
    }
    Ok(())
}

fn cmd_regions(povm: &Path, resolution: f64, ordered: bool, cost: &str, out: &Path) -> CmdResult {
    let povm: Povm<f64> = io::read_detector(povm)?;
    let cost = load_cost(cost, 3)?;
    let map = map_regions(&povm, &cost, resolution, ordered)?;
    fs::write(out, map.to_csv()).map_err(|e| io_failure(out, e))?;
    println!("cells: {}  step: 1/{}", map.cells.len(), map.steps);
    for c in &map.classes {
        println!("class {}: {}  e.g. {}", c.id, c.signature, c.representative);
    }
    for j in &map.junctions {
        let ids: Vec<String> = j.classes.iter().map(|c| c.to_string()).collect();
        println!(
            "junction of classes {} at pi = {}{}",
            ids.join(","),
            vec_str(&j.priors),
            if j.refined { "" } else { " (grid estimate)" }
        );
    }
    Ok(())
}

fn cmd_sic(epsilon: f64, emit: Emit, out: Option<&Path>) -> CmdResult {
    let q = sic::sic_qubit(epsilon)?;
    let doc = match emit {
        Emit::Povm => io::detector_json(&q.povm),
        Emit::Group => io::group_json(&sic::tetrahedral_group::<f64>()),
        Emit::Analytics => {
            let min_error: Vec<Value> = (2..=6)
                .map(|n| Ok(json!({ "messages": n, "p_success": sic::analytic_min_error(n, epsilon)? })))
                .collect::<Result<_, Error>>()?;
            let (t1, t2) = sic::triple_point(epsilon);
            let mut v = json!({
                "epsilon": epsilon,
                "min_error_uniform": min_error,
                "triple_point": [t1, t2, 1.0 - t1 - t2],
                "capacity": sic::analytic_capacity(epsilon)?,
            });
            if epsilon > 0.0 {
                let r = sic::verify_capacity_inequality(epsilon, 10_000)?;
                v["inequality"] = json!({
                    "min_gap": r.min_gap,
                    "worst_t": r.worst_t,
                    "anchor_error": r.anchor_error,
                    "gamma": r.gamma,
                    "passed": r.passed,
                });
            }
            v
        }
    };
    let text = io::to_pretty(&doc);
    match out {
        Some(p) => fs::write(p, text).map_err(|e| io_failure(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Bayes { povm, priors, cost, out } => cmd_bayes(povm, priors, cost, out.as_deref()),
        Command::Unambig { povm, priors, out } => cmd_unambig(povm, priors, out.as_deref()),
        Command::Capacity {
            povm,
            group,
            method,
            restarts,
            seed,
            out,
        } => cmd_capacity(povm, group.as_deref(), *method, *restarts, *seed, out.as_deref()),
        Command::Regions {
            povm,
            resolution,
            ordered,
            cost,
            out,
        } => cmd_regions(povm, *resolution, *ordered, cost, out),
        Command::Sic { epsilon, emit, out } => cmd_sic(*epsilon, *emit, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
