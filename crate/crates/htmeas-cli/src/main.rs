use std::collections::HashSet;
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use htmeas::circuit::{diag_circuit, emit_qasm, trotter_step, Circuit};
use htmeas::grouping::{ht_group, ht_group_local, ht_group_repicking, sorted_insertion, Grouping};
use htmeas::hwgraph::{preset, subgraphs_all, subgraphs_sample, Graph};
use htmeas::io::{
    grouping_from_json, grouping_to_json, parse_collections, parse_hamiltonian, parse_state_params,
    Hamiltonian,
};
use htmeas::metrics::{heuristic_allocation, optimal_allocation, r_hat, true_r, Allocation};
use htmeas::oracle::{
    collection_variance, grouping_expectation, product_state, verify_collection, SamplingPlan,
    StateVector, MAX_QUBITS,
};
use htmeas::synth::{satisfies, Search};
use htmeas::{fixtures, Error, Method, PauliOp, Predicate, SolverConfig, ValueFn};

/// `out!` that exits quietly when stdout is closed early (e.g. piped into `head`).
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        if let Err(e) = write!(std::io::stdout(), $($arg)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            panic!("failed writing to stdout: {e}");
        }
    }};
}

macro_rules! outln {
    () => { out!("\n") };
    ($($arg:tt)*) => {{
        out!($($arg)*);
        out!("\n");
    }};
}

/// Hardware-tailored Pauli grouping and readout circuits.
#[derive(Parser)]
#[command(name = "htmeas", version)]
struct Cli {
    /// Worker threads for template evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Si,
    SiQwc,
    Ht,
    HtLocal,
}

#[derive(Clone, Copy, ValueEnum)]
enum ValueArg {
    Size,
    Weighted,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmitFormat {
    Qasm,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum AllocArg {
    Optimal,
    Heuristic,
}

#[derive(Subcommand)]
enum Cmd {
    /// Group a Hamiltonian and write the grouping as JSON.
    Group {
        /// Hamiltonian file (`<coeff> <pauli>` per line) or `builtin:h4`.
        hamiltonian: String,
        #[arg(long, value_enum, default_value = "ht")]
        method: MethodArg,
        /// Connectivity graph: `linear:N`, `cycle:N`, `grid:RxC` or an edge-list file.
        #[arg(long)]
        graph: Option<String>,
        /// Template count, or `all` for every subgraph.
        #[arg(long, default_value = "all")]
        subgraphs: String,
        /// Number of exhaustively searched qubits, or `exact`.
        #[arg(long, default_value = "exact")]
        cutoff: String,
        /// Draw a fresh random template set every round (`ht` with a numeric `--subgraphs`).
        #[arg(long)]
        repick: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "weighted")]
        value: ValueArg,
        /// Output path for the grouping JSON (`-` for stdout).
        #[arg(long)]
        out: Option<String>,
    },
    /// Shot-reduction figures and allocations for a grouping.
    Metrics {
        /// Grouping JSON or `builtin:h4-tpb|h4-gc|h4-ht`.
        grouping: String,
        /// Product-state parameters JSON or `builtin:ansatz`.
        #[arg(long)]
        state: Option<String>,
        /// Pauli strings to leave out (file or `builtin:h4-excluded`).
        #[arg(long)]
        exclude: Option<String>,
        /// Print allocations as CSV instead of JSON.
        #[arg(long)]
        csv: bool,
    },
    /// Emit readout circuits or a Trotter step.
    Emit {
        grouping: String,
        #[arg(long, value_enum, default_value = "qasm")]
        format: EmitFormat,
        /// Emit one first-order Trotter product with this many steps.
        #[arg(long)]
        trotter: Option<usize>,
        /// Only this collection (1-based).
        #[arg(long)]
        collection: Option<usize>,
    },
    /// Check a grouping against a Hamiltonian and its readout circuits.
    Verify {
        grouping: String,
        hamiltonian: String,
    },
    /// Sampled energy estimate with a finite shot budget.
    Simulate {
        grouping: String,
        hamiltonian: String,
        state: String,
        #[arg(long)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "optimal")]
        allocation: AllocArg,
    },
}

enum Failure {
    Verify(String),
    Usage(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) => Failure::Io(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read(path: &str) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{path}: {e}")))
}

fn write(path: &str, text: &str) -> CliResult<()> {
    if path == "-" {
        out!("{text}");
        return Ok(());
    }
    fs::write(path, text).map_err(|e| Failure::Io(format!("{path}: {e}")))
}

fn load_hamiltonian(spec: &str) -> CliResult<Hamiltonian> {
    match spec {
        "builtin:h4" => Ok(fixtures::h4()),
        path => Ok(parse_hamiltonian(&read(path)?)?),
    }
}

fn load_grouping(spec: &str) -> CliResult<Grouping> {
    Ok(match spec {
        "builtin:h4-tpb" => fixtures::h4_tpb().with_tpb_readouts()?,
        "builtin:h4-gc" => fixtures::h4_gc(),
        "builtin:h4-ht" => fixtures::h4_ht().with_readouts(&SolverConfig::default())?,
        path => grouping_from_json(&read(path)?)?,
    })
}

fn load_state(spec: &str) -> CliResult<StateVector> {
    let params = match spec {
        "builtin:ansatz" => fixtures::ansatz_params(),
        path => parse_state_params(&read(path)?)?,
    };
    Ok(product_state(&params)?)
}

fn load_graph(spec: &str) -> CliResult<Graph> {
    if Path::new(spec).is_file() {
        return Ok(Graph::parse_text(&read(spec)?)?);
    }
    Ok(preset(spec)?)
}

fn solver_config(cutoff: &str) -> CliResult<SolverConfig> {
    let search = match cutoff {
        "exact" => Search::Exact,
        c => Search::Cutoff(c.parse().map_err(|_| {
            Failure::Usage(format!("--cutoff expects a number or `exact`, got {c:?}"))
        })?),
    };
    Ok(SolverConfig {
        search,
        componentwise: true,
    })
}

fn summary(g: &Grouping) -> CliResult<String> {
    let sizes: Vec<String> = g.sizes().iter().map(|s| s.to_string()).collect();
    Ok(format!(
        "N={}\nR_hat={:.6}\nsizes={}\n",
        g.collections.len(),
        r_hat(g)?,
        sizes.join(",")
    ))
}

#[allow(clippy::too_many_arguments)]
fn cmd_group(
    hamiltonian: &str,
    method: MethodArg,
    graph: Option<&str>,
    subgraphs: &str,
    repick: bool,
    cutoff: &str,
    seed: u64,
    value: ValueArg,
    out: Option<&str>,
) -> CliResult<()> {
    if repick && !(matches!(method, MethodArg::Ht) && subgraphs != "all") {
        return Err(Failure::Usage(
            "--repick needs --method ht and a numeric --subgraphs".into(),
        ));
    }
    let h = load_hamiltonian(hamiltonian)?;
    let value = match value {
        ValueArg::Size => ValueFn::Size,
        ValueArg::Weighted => ValueFn::SizeWeighted,
    };
    let solver = solver_config(cutoff)?;
    let conn = || -> CliResult<Graph> {
        let spec = graph.ok_or_else(|| {
            Failure::Usage("--graph is required for hardware-tailored methods".into())
        })?;
        let g = load_graph(spec)?;
        if g.n() != h.n {
            return Err(Failure::Usage(format!(
                "graph has {} vertices but the Hamiltonian has {} qubits",
                g.n(),
                h.n
            )));
        }
        Ok(g)
    };
    let mut g = match method {
        MethodArg::Si => sorted_insertion(&h.terms, Predicate::Gc)?,
        MethodArg::SiQwc => sorted_insertion(&h.terms, Predicate::Qwc)?.with_tpb_readouts()?,
        MethodArg::Ht => {
            let conn = conn()?;
            let mut g = if subgraphs == "all" {
                ht_group(&h.terms, &conn, &subgraphs_all(&conn)?, solver, value)?
            } else {
                let count = subgraphs.parse().map_err(|_| {
                    Failure::Usage(format!(
                        "--subgraphs expects a number or `all`, got {subgraphs:?}"
                    ))
                })?;
                if repick {
                    ht_group_repicking(&h.terms, &conn, count, solver, value, seed)?
                } else {
                    let templates = subgraphs_sample(&conn, count, seed)?;
                    ht_group(&h.terms, &conn, &templates, solver, value)?
                }
            };
            g.config.seed = Some(seed);
            g.config.repick = repick.then_some(true);
            g
        }
        MethodArg::HtLocal => {
            let conn = conn()?;
            let s_max = if subgraphs == "all" {
                usize::MAX
            } else {
                subgraphs.parse().map_err(|_| {
                    Failure::Usage(format!(
                        "--subgraphs expects a number or `all`, got {subgraphs:?}"
                    ))
                })?
            };
            ht_group_local(&h.terms, &conn, s_max, solver, value, seed)?
        }
    };
    g.offset = h.offset;
    if matches!(method, MethodArg::Ht | MethodArg::HtLocal) {
        g.config.graph = graph.map(str::to_string);
        g.config.subgraphs = Some(subgraphs.to_string());
        g.config.cutoff = Some(cutoff.to_string());
    }
    g.config.source = Some(hamiltonian.to_string());
    let text = summary(&g)?;
    match out {
        Some("-") => {
            eprint!("{text}");
            write("-", &grouping_to_json(&g))?;
            outln!();
        }
        Some(path) => {
            out!("{text}");
            write(path, &grouping_to_json(&g))?;
        }
        None => out!("{text}"),
    }
    Ok(())
}

fn allocation_rows(label: &str, a: &Allocation) -> Vec<(String, usize, f64)> {
    a.fractions
        .iter()
        .enumerate()
        .map(|(i, f)| (label.to_string(), i + 1, *f))
        .collect()
}

fn cmd_metrics(
    grouping: &str,
    state: Option<&str>,
    exclude: Option<&str>,
    csv: bool,
) -> CliResult<()> {
    let mut g = load_grouping(grouping)?;
    if let Some(spec) = exclude {
        let drop: HashSet<PauliOp> = match spec {
            "builtin:h4-excluded" => fixtures::o_prime_excluded(),
            path => parse_collections(&read(path)?)?
                .into_iter()
                .flatten()
                .collect(),
        };
        g = g.without(&drop);
        g.offset = 0.0;
    }
    let mut rows = allocation_rows("heuristic", &heuristic_allocation(&g, None)?);
    let mut doc = serde_json::json!({
        "method": g.method.name(),
        "N": g.collections.len(),
        "terms": g.num_terms(),
        "R_hat": r_hat(&g)?,
    });
    if let Some(spec) = state {
        let st = load_state(spec)?;
        let r = true_r(&g, &st)?;
        let vars: Vec<f64> = g
            .collections
            .iter()
            .map(|c| collection_variance(&st, c))
            .collect::<htmeas::Result<_>>()?;
        rows.extend(allocation_rows(
            "optimal",
            &optimal_allocation(&vars, None)?,
        ));
        doc["energy"] = grouping_expectation(&st, &g)?.into();
        doc["R"] = r.r.into();
        doc["degenerate"] = r.degenerate.into();
    }
    outln!("N={}", g.collections.len());
    outln!("R_hat={:.6}", r_hat(&g)?);
    if state.is_some() {
        outln!("energy={:.9}", doc["energy"].as_f64().unwrap_or(f64::NAN));
        outln!("R={:.6}", doc["R"].as_f64().unwrap_or(f64::NAN));
    }
    if csv {
        outln!("allocation,collection,fraction");
        for (label, i, f) in rows {
            outln!("{label},{i},{f:.8}");
        }
    } else {
        let mut alloc = serde_json::Map::new();
        for (label, _, f) in rows {
            alloc
                .entry(label)
                .or_insert_with(|| serde_json::Value::Array(Vec::new()))
                .as_array_mut()
                .expect("array")
                .push(f.into());
        }
        doc["allocation"] = alloc.into();
        outln!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("metrics serialize")
        );
    }
    Ok(())
}

fn readout_circuit(g: &Grouping, i: usize) -> CliResult<Circuit> {
    let r = g.collections[i]
        .readout
        .as_ref()
        .ok_or_else(|| Failure::Usage(format!("collection {} has no readout circuit", i + 1)))?;
    let mut c = diag_circuit(&r.layer, &r.template)?;
    c.measure_all();
    Ok(c)
}

fn cmd_emit(
    grouping: &str,
    format: EmitFormat,
    trotter: Option<usize>,
    collection: Option<usize>,
) -> CliResult<()> {
    let g = load_grouping(grouping)?;
    let circuits: Vec<(String, Circuit)> = match (trotter, collection) {
        (Some(k), _) => vec![(format!("trotter k={k}"), trotter_step(&g, k)?)],
        (None, Some(i)) => {
            if i == 0 || i > g.collections.len() {
                return Err(Failure::Usage(format!(
                    "collection {i} out of range 1..={}",
                    g.collections.len()
                )));
            }
            vec![(format!("collection {i}"), readout_circuit(&g, i - 1)?)]
        }
        (None, None) => (0..g.collections.len())
            .map(|i| Ok((format!("collection {}", i + 1), readout_circuit(&g, i)?)))
            .collect::<CliResult<_>>()?,
    };
    match format {
        EmitFormat::Qasm => {
            for (idx, (label, c)) in circuits.iter().enumerate() {
                if circuits.len() > 1 {
                    if idx > 0 {
                        outln!();
                    }
                    outln!("// {label}");
                }
                out!("{}", emit_qasm(c));
            }
        }
        EmitFormat::Json => {
            let list: Vec<_> = circuits
                .iter()
                .map(|(label, c)| {
                    serde_json::json!({
                        "label": label,
                        "two_qubit_gates": c.count_two_qubit(),
                        "qasm": emit_qasm(c),
                    })
                })
                .collect();
            let doc = serde_json::json!({ "schema": htmeas::io::SCHEMA, "circuits": list });
            outln!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("circuits serialize")
            );
        }
    }
    Ok(())
}

fn cmd_verify(grouping: &str, hamiltonian: &str) -> CliResult<()> {
    let g = load_grouping(grouping)?;
    let h = load_hamiltonian(hamiltonian)?;
    let mut problems = Vec::new();
    if g.n != h.n {
        return Err(Failure::Verify(format!(
            "grouping has {} qubits, Hamiltonian {}",
            g.n, h.n
        )));
    }
    let mut want: Vec<String> = h
        .terms
        .iter()
        .map(|t| format!("{} {}", t.op, t.coeff))
        .collect();
    let mut got: Vec<String> = g.terms().map(|t| format!("{} {}", t.op, t.coeff)).collect();
    want.sort();
    got.sort();
    if want != got {
        problems.push("collections do not partition the Hamiltonian's terms".to_string());
    }
    let mut checked = 0;
    for (i, c) in g.collections.iter().enumerate() {
        let ops: Vec<&PauliOp> = c.terms().map(|t| &t.op).collect();
        for (a, p) in ops.iter().enumerate() {
            for q in &ops[a + 1..] {
                let ok = match g.method {
                    Method::SiQwc => p.qwc_with(q),
                    _ => p.commutes_with(q),
                };
                if !ok {
                    problems.push(format!(
                        "collection {}: {p} and {q} violate the grouping predicate",
                        i + 1
                    ));
                }
            }
        }
        if let Some(r) = &c.readout {
            for m in &c.members {
                if !satisfies(&r.layer, &r.template, &m.term.op) {
                    problems.push(format!(
                        "collection {}: {} is not diagonalized",
                        i + 1,
                        m.term.op
                    ));
                }
            }
            if g.n <= MAX_QUBITS {
                for p in verify_collection(c, g.n)? {
                    problems.push(format!(
                        "collection {}: {p} fails the dense conjugation check",
                        i + 1
                    ));
                }
                checked += c.members.len();
            }
        }
    }
    if problems.is_empty() {
        outln!(
            "ok: {} collections, {} terms, {checked} targets checked densely",
            g.collections.len(),
            g.num_terms()
        );
        Ok(())
    } else {
        Err(Failure::Verify(problems.join("\n")))
    }
}

fn cmd_simulate(
    grouping: &str,
    hamiltonian: &str,
    state: &str,
    shots: u64,
    seed: u64,
    alloc: AllocArg,
) -> CliResult<()> {
    let mut g = load_grouping(grouping)?;
    let h = load_hamiltonian(hamiltonian)?;
    g.offset = h.offset;
    let st = load_state(state)?;
    let allocation = match alloc {
        AllocArg::Optimal => {
            let vars: Vec<f64> = g
                .collections
                .iter()
                .map(|c| collection_variance(&st, c))
                .collect::<htmeas::Result<_>>()?;
            optimal_allocation(&vars, None)?
        }
        AllocArg::Heuristic => heuristic_allocation(&g, None)?,
    };
    let plan = SamplingPlan::new(&st, &g)?;
    let counts = plan.shots(&allocation, shots)?;
    let estimate = plan.estimate(&counts, seed)?;
    let exact = grouping_expectation(&st, &g)?;
    outln!("estimate={estimate:.9}");
    outln!("exact={exact:.9}");
    outln!("error={:.9}", estimate - exact);
    outln!("sigma={:.9}", plan.estimator_variance(&counts).sqrt());
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Usage(format!("--threads: {e}")))?;
    }
    match cli.cmd {
        Cmd::Group {
            hamiltonian,
            method,
            graph,
            subgraphs,
            repick,
            cutoff,
            seed,
            value,
            out,
        } => cmd_group(
            &hamiltonian,
            method,
            graph.as_deref(),
            &subgraphs,
            repick,
            &cutoff,
            seed,
            value,
            out.as_deref(),
        ),
        Cmd::Metrics {
            grouping,
            state,
            exclude,
            csv,
        } => cmd_metrics(&grouping, state.as_deref(), exclude.as_deref(), csv),
        Cmd::Emit {
            grouping,
            format,
            trotter,
            collection,
        } => cmd_emit(&grouping, format, trotter, collection),
        Cmd::Verify {
            grouping,
            hamiltonian,
        } => cmd_verify(&grouping, &hamiltonian),
        Cmd::Simulate {
            grouping,
            hamiltonian,
            state,
            shots,
            seed,
            allocation,
        } => cmd_simulate(&grouping, &hamiltonian, &state, shots, seed, allocation),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify(msg)) => {
            eprintln!("verification failed:\n{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("I/O error: {msg}");
            ExitCode::from(3)
        }
    }
}
