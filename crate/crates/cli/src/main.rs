mod args;

use std::path::Path;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::{json, Value};

use args::*;
use qrgg::bounds::{epsilon_curve, full_report, PPrimeSource};
use qrgg::experiment::{
    run_experiment_with_jobs, run_sweep, spearman, AuditSpec, Histogram, OuterRadius, PPrimeBasis, Preset, SweepConfig,
};
use qrgg::output::{fmt_sig, histogram_csv, histogram_svg, to_json, trials_csv, write_atomic};
use qrgg::{
    fixtures, min_cut, multicast_capacity, verify_achievability, ConnectionModel, ConnectivityGraph, ExperimentConfig,
    GraphFile, Seed,
};

const EXIT_VALIDATION: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_AUDIT: u8 = 3;

enum Failure {
    Validation(String),
    Runtime(String),
    Audit,
}

impl From<qrgg::Error> for Failure {
    fn from(e: qrgg::Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

type CmdResult = Result<(), Failure>;

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_VALIDATION),
            };
        }
    };
    let outcome = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Capacity(a) => capacity(a),
        Command::Bounds(a) => bounds(a),
        Command::Experiment(a) => experiment(a),
        Command::Sweep(a) => sweep(a),
        Command::VerifyRlnc(a) => verify_rlnc(a),
        Command::Export(a) => export(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_RUNTIME)
        }
        Err(Failure::Audit) => {
            eprintln!("audit: at least one bound was violated beyond sampling slack");
            ExitCode::from(EXIT_AUDIT)
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> CmdResult {
    match out {
        Some(path) => write_atomic(path, text.as_bytes()).map_err(Failure::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> CmdResult {
    write_atomic(path, text.as_bytes()).map_err(Failure::from)
}

fn read_graph(path: &Path) -> Result<ConnectivityGraph, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
    let file: GraphFile = serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    Ok(ConnectivityGraph::from_file(file)?)
}

fn fixture(f: FixtureArg) -> ConnectivityGraph {
    fixtures::by_name(f.name()).expect("every fixture flag has a graph")
}

/// Model from flags, falling back to `defaults = (r, r', p)` for a fixed
/// kernel when a preset supplies them.
fn resolve_model(m: &ModelArgs, defaults: Option<(f64, f64, f64)>) -> Result<ConnectionModel, Failure> {
    let r = m.r.or(defaults.map(|d| d.0)).ok_or_else(|| invalid("--r is required"))?;
    let r_prime = m.r_prime.or(defaults.map(|d| d.1)).ok_or_else(|| invalid("--r-prime is required"))?;
    let model = match m.kernel {
        KernelArg::Fixed => {
            if m.p_connection.is_some() {
                return Err(invalid("--p-connection needs --kernel linear-decay"));
            }
            let p = m.p.or(defaults.map(|d| d.2)).ok_or_else(|| invalid("--p is required for the fixed kernel"))?;
            ConnectionModel::fixed(r, r_prime, p)?
        }
        KernelArg::LinearDecay => {
            if m.p.is_some() {
                return Err(invalid("--p applies to the fixed kernel; use --p-connection"));
            }
            let pc = m.p_connection.ok_or_else(|| invalid("--p-connection is required for --kernel linear-decay"))?;
            ConnectionModel::linear_decay(r, r_prime, pc)?
        }
    };
    Ok(model)
}

fn generate(a: GenerateArgs) -> CmdResult {
    eprintln!("resolved config: {a:?}");
    let model = resolve_model(&a.model, None)?;
    let graph = ConnectivityGraph::build(a.n, a.terminals, &model, Seed(a.seed))?;
    eprintln!("nodes {} edges {}", graph.node_count(), graph.edge_count());
    let text = serde_json::to_string_pretty(&graph.to_file()).map_err(qrgg::Error::from)? + "\n";
    emit(&text, a.out.as_deref())
}

fn capacity(a: CapacityArgs) -> CmdResult {
    eprintln!("resolved config: {a:?}");
    let graph = if let Some(path) = &a.graph {
        read_graph(path)?
    } else if let Some(f) = a.fixture {
        fixture(f)
    } else {
        let n = a.n.ok_or_else(|| invalid("give --graph, --fixture or --n with generation flags"))?;
        let seed = a.seed.ok_or_else(|| invalid("--seed (or QRGG_SEED) is required to generate a topology"))?;
        let model = resolve_model(&a.model, None)?;
        ConnectivityGraph::build(n, a.terminals, &model, Seed(seed))?
    };
    let capacity = multicast_capacity(&graph)?;
    let cuts = graph.terminals().iter().map(|&t| min_cut(&graph, t)).collect::<qrgg::Result<Vec<_>>>()?;
    let report = json!({ "capacity": capacity, "per_terminal": cuts });
    emit(&to_json(&report)?, a.out.as_deref())
}

fn bounds(a: BoundsArgs) -> CmdResult {
    eprintln!("resolved config: {a:?}");
    let model = resolve_model(&a.model, None)?;
    let source = match a.p_prime {
        Some(p) => PPrimeSource::Fixed(p),
        None => PPrimeSource::Estimate { samples: a.samples, seed: Seed(a.seed) },
    };
    let report = full_report(a.n, a.terminals, &model, a.k, source)?;
    if let Some(path) = &a.epsilon_curve {
        let mut csv = String::from("k,epsilon\n");
        for (k, eps) in epsilon_curve(a.n, report.p_prime)? {
            csv.push_str(&format!("{k},{}\n", fmt_sig(eps)));
        }
        write_file(path, &csv)?;
    }
    let value = json!({
        "report": report,
        "notes": ["failure probabilities use proof-explicit constants: 2*tau/n^2 (lower) and 2*n^(-4/3) (upper)"],
    });
    emit(&to_json(&value)?, a.out.as_deref())
}

fn experiment_config(a: &ExperimentArgs) -> Result<ExperimentConfig, Failure> {
    let preset = a.preset.map(|p| match p {
        PresetArg::Fig3 => Preset::Fig3,
        PresetArg::Fig4 => Preset::Fig4,
    });
    let mut config = match preset {
        Some(p) => p.config(a.trials, a.seed),
        None => {
            let n = a.n.ok_or_else(|| invalid("--n is required without --preset"))?;
            ExperimentConfig::new(n, 1, resolve_model(&a.model, None)?, a.trials, a.seed)
        }
    };
    if let Some(p) = preset {
        let (_, r, r_prime) = p.geometry();
        config.model = resolve_model(&a.model, Some((r, r_prime, 0.5)))?;
    }
    if let Some(n) = a.n {
        config.n_relays = n;
    }
    if let Some(t) = a.terminals {
        config.n_terminals = t;
    }
    config.histogram_bins = a.bins;
    config.rlnc_check = a.rlnc_check;
    config.p_prime_samples = a.samples;
    if !a.audit.is_empty() {
        let basis = match a.audit_p_prime {
            AuditBasisArg::Estimate => PPrimeBasis::Estimate,
            AuditBasisArg::IntervalUpper => PPrimeBasis::IntervalUpper,
        };
        config.audit = Some(AuditSpec { epsilons: a.audit.clone(), k_list: a.audit_k.clone(), basis });
    } else if !a.audit_k.is_empty() {
        return Err(invalid("--audit-k needs --audit"));
    }
    Ok(config)
}

fn title_for(n: usize, r: f64, r_prime: f64, trials: usize) -> String {
    format!("n={n}, r={}, r'={}, {trials} trials", fmt_sig(r), fmt_sig(r_prime))
}

fn experiment(a: ExperimentArgs) -> CmdResult {
    let config = experiment_config(&a)?;
    eprintln!("resolved config: {}", serde_json::to_string(&config).map_err(qrgg::Error::from)?);
    eprintln!("jobs: {}", a.jobs);
    let result = run_experiment_with_jobs(&config, a.jobs)?;
    eprintln!("mean {} std_dev {}", fmt_sig(result.mean), fmt_sig(result.std_dev));
    if let Some(path) = &a.csv {
        write_file(path, &trials_csv(&result.per_trial_capacity))?;
    }
    if let Some(path) = &a.hist_csv {
        write_file(path, &histogram_csv(&result.histogram))?;
    }
    if let Some(path) = &a.svg {
        let title = title_for(config.n_relays, config.model.r(), config.model.r_prime(), config.trials);
        write_file(path, &histogram_svg(&result.histogram, &title))?;
    }
    emit(&to_json(&result)?, a.out.as_deref())?;
    for row in result.audit_outcomes.iter().filter(|r| !r.pass) {
        eprintln!(
            "violation: {:?} eps={} k={} observed={} bound={} slack={}",
            row.check,
            fmt_sig(row.epsilon),
            row.k,
            fmt_sig(row.observed),
            fmt_sig(row.bound),
            fmt_sig(row.slack)
        );
    }
    if result.audit_passed() {
        Ok(())
    } else {
        Err(Failure::Audit)
    }
}

fn sweep(a: SweepArgs) -> CmdResult {
    eprintln!("resolved config: {a:?}");
    let outer = match (&a.r_prime_list, a.r_prime_offset) {
        (Some(list), _) => OuterRadius::List(list.clone()),
        (None, Some(d)) => OuterRadius::Offset(d),
        (None, None) => OuterRadius::Ratio(a.r_prime_ratio),
    };
    let config = SweepConfig {
        n_list: a.n_list.clone(),
        r_list: a.r_list.clone(),
        outer,
        p_connection: a.p_connection,
        n_terminals: a.terminals,
        trials: a.trials,
        master_seed: a.seed,
        p_prime_samples: a.samples,
    };
    let rows = run_sweep::<f64>(&config, a.jobs)?;
    let mut trend = Vec::new();
    for &r in &a.r_list {
        let cell: Vec<_> = rows.iter().filter(|row| row.r == r).collect();
        let ns: Vec<f64> = cell.iter().map(|row| row.n as f64).collect();
        let means: Vec<f64> = cell.iter().map(|row| row.mean).collect();
        let rho = if ns.len() > 1 { spearman(&ns, &means) } else { f64::NAN };
        trend.push(json!({ "r": r, "spearman_n_mean": rho }));
    }
    let value = json!({
        "config": config,
        "rows": rows,
        "trend": trend,
        "notes": ["default r' = 1.8 r and p_connection = 0.9 are inferred settings"],
    });
    emit(&to_json(&value)?, a.out.as_deref())
}

fn verify_rlnc(a: VerifyRlncArgs) -> CmdResult {
    eprintln!("resolved config: {a:?}");
    let graph = match (&a.graph, a.fixture) {
        (Some(path), _) => read_graph(path)?,
        (None, Some(f)) => fixture(f),
        (None, None) => return Err(invalid("give --graph or --fixture")),
    };
    let report = verify_achievability(&graph, a.trials, Seed(a.seed))?;
    if let Some(cycle) = &report.cycle {
        eprintln!("coding graph is cyclic through nodes {cycle:?}");
    }
    emit(&to_json(&report)?, a.out.as_deref())
}

fn export(a: ExportArgs) -> CmdResult {
    eprintln!("resolved config: {a:?}");
    let path = &a.result;
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let field = |name: &str| value.get(name).cloned().ok_or_else(|| invalid(format!("result has no {name} field")));
    let capacities: Vec<u64> =
        serde_json::from_value(field("per_trial_capacity")?).map_err(|e| invalid(e.to_string()))?;
    let histogram: Histogram = serde_json::from_value(field("histogram")?).map_err(|e| invalid(e.to_string()))?;
    if a.csv.is_none() && a.hist_csv.is_none() && a.svg.is_none() {
        return Err(invalid("nothing to export; give --csv, --hist-csv or --svg"));
    }
    if let Some(p) = &a.csv {
        write_file(p, &trials_csv(&capacities))?;
    }
    if let Some(p) = &a.hist_csv {
        write_file(p, &histogram_csv(&histogram))?;
    }
    if let Some(p) = &a.svg {
        let title = a.title.clone().unwrap_or_else(|| {
            let config = &value["provenance"]["config"];
            let n = config["n_relays"].as_u64().unwrap_or(0) as usize;
            let r = config["model"]["r"].as_f64().unwrap_or(f64::NAN);
            let r_prime = config["model"]["r_prime"].as_f64().unwrap_or(f64::NAN);
            title_for(n, r, r_prime, capacities.len())
        });
        write_file(p, &histogram_svg(&histogram, &title))?;
    }
    Ok(())
}
