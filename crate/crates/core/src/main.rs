//! `qsim`: run, compile, verify and benchmark phased-permutation circuits.
//!
//! Exit codes: 0 success, 1 usage error, 2 input error, 3 runtime failure
//! (including failed verification checks).

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use qsim::analysis::{
    self, dense, verify_sparse, verify_unitary, ProbabilityAccumulator, ReportFormat, DEFAULT_TOP_K,
};
use qsim::bench::{self, BenchConfig};
use qsim::executor::{default_workers, run_parallel, ExecError, ExecutionPlan, DEFAULT_CHUNK_SIZE};
use qsim::format::{self, ChunkFormat, ChunkWriter};
use qsim::{
    build_step_matrix, compose_explicit_with_cap, evaluate_chunk, Circuit, Error, InputState,
    DEFAULT_EXPLICIT_CAP, EXACT_TOL,
};

const CAP_ENV: &str = "QSIM_MAX_EXPLICIT_QUBITS";

/// Largest qubit count for which `verify` evaluates the full state vector.
const VERIFY_NORM_MAX_QUBITS: u32 = 20;

#[derive(Parser)]
#[command(
    name = "qsim",
    version,
    about = "Chunked state-vector simulation of phased-permutation circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a range of output amplitudes.
    Run(RunArgs),
    /// Write the circuit's explicit sparse matrix.
    Compile(CompileArgs),
    /// Check circuit or sparse-matrix invariants.
    Verify(VerifyArgs),
    /// Time full-vector evaluation over a range of qubit counts.
    Bench(BenchArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    circuit: PathBuf,
    /// First output index.
    #[arg(long, default_value_t = 0)]
    start: u64,
    /// Number of output indices [default: through the end of the vector].
    #[arg(long)]
    len: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_CHUNK_SIZE)]
    chunk_size: u64,
    /// Worker threads [default: available parallelism].
    #[arg(long)]
    workers: Option<usize>,
    /// Output file [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ChunkFormat::Text)]
    format: ChunkFormat,
    /// Append a probability report.
    #[arg(long)]
    post: bool,
    #[arg(long, default_value_t = DEFAULT_TOP_K)]
    top_k: usize,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    report_format: ReportFormat,
}

#[derive(Args)]
struct CompileArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Explicit-matrix qubit cap [default: $QSIM_MAX_EXPLICIT_QUBITS or 26].
    #[arg(long)]
    max_qubits: Option<u32>,
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "source")]
struct VerifySource {
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// A stored sparse matrix instead of a circuit.
    #[arg(long)]
    sparse: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: VerifySource,
    /// Compare against the dense oracle (circuits of at most 10 qubits).
    #[arg(long, requires = "circuit")]
    against_dense: bool,
    #[arg(long)]
    max_qubits: Option<u32>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    min_qubits: u32,
    #[arg(long)]
    max_qubits: u32,
    /// Gates per circuit.
    #[arg(long, default_value_t = 200)]
    steps: usize,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    /// CSV output file [default: stdout].
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = bench::DEFAULT_SEED)]
    seed: u64,
    /// Task size [default: chosen per qubit count].
    #[arg(long)]
    chunk_size: Option<u64>,
}

enum Failure {
    Usage(String),
    Input(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
            Failure::Runtime(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Input(m) | Failure::Runtime(m) => m,
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Compile(args) => cmd_compile(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn load_circuit(path: &Path) -> Result<(Circuit, InputState), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    format::parse_circuit(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", path.display())))
}

fn explicit_cap(flag: Option<u32>) -> Result<u32, Failure> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    match std::env::var(CAP_ENV) {
        Ok(value) => value
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{CAP_ENV} must be an integer, got {value:?}"))),
        Err(_) => Ok(DEFAULT_EXPLICIT_CAP),
    }
}

fn resolve_workers(flag: Option<usize>) -> usize {
    flag.unwrap_or_else(default_workers)
}

fn cmd_run(args: RunArgs) -> CmdResult {
    let (circuit, input) = load_circuit(&args.circuit)?;
    let dim = circuit.dim();
    if args.start >= dim {
        return Err(Failure::Input(format!(
            "start {} outside dimension {dim}",
            args.start
        )));
    }
    let len = args.len.unwrap_or(dim - args.start);
    let end = args
        .start
        .checked_add(len)
        .filter(|&end| end <= dim && len > 0)
        .ok_or_else(|| {
            Failure::Input(format!(
                "range [{}, {}+{len}) outside dimension {dim}",
                args.start, args.start
            ))
        })?;
    let plan = ExecutionPlan::new(
        args.start..end,
        args.chunk_size,
        resolve_workers(args.workers),
    )
    .map_err(|e| Failure::Usage(e.to_string()))?;

    let out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(create(path)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let mut writer = ChunkWriter::new(out, args.format);
    let mut post = args
        .post
        .then(|| ProbabilityAccumulator::new(circuit.num_qubits(), args.top_k));

    let outcome = match post.as_mut() {
        Some(acc) => run_parallel(&circuit, &input, &plan, &mut (&mut writer, acc)),
        None => run_parallel(&circuit, &input, &plan, &mut writer),
    };
    let report = outcome.map_err(|e| match e {
        ExecError::Sink {
            delivered_end,
            source,
        } => Failure::Runtime(format!(
            "output failed: {source}; partial output covers [{}, {delivered_end}) only",
            args.start
        )),
        other => Failure::Runtime(other.to_string()),
    })?;
    log::info!(
        "{} indices in {:.3}s over {} tasks; peak task buffers {} amplitudes ({} bytes)",
        report.indices,
        report.elapsed.as_secs_f64(),
        report.tasks_completed,
        report.peak_amplitudes,
        report.peak_bytes()
    );

    if let Some(acc) = post {
        let text = acc.report().render(args.report_format);
        let binary_on_stdout = args.out.is_none() && args.format == ChunkFormat::Binary;
        let written = if binary_on_stdout {
            io::stderr().write_all(text.as_bytes())
        } else {
            let mut out = writer.into_inner();
            out.write_all(text.as_bytes()).and_then(|_| out.flush())
        };
        written.map_err(|e| Failure::Runtime(format!("cannot write report: {e}")))?;
    }
    Ok(())
}

fn cmd_compile(args: CompileArgs) -> CmdResult {
    let (circuit, _) = load_circuit(&args.circuit)?;
    let cap = explicit_cap(args.max_qubits)?;
    let u = compose_explicit_with_cap(&circuit, cap).map_err(|e| match e {
        Error::TooLarge { .. } => Failure::Input(format!(
            "{e} (`qsim run --start/--len`), or raise --max-qubits or {CAP_ENV}"
        )),
        other => Failure::Input(other.to_string()),
    })?;
    let mut out = create(&args.out)?;
    format::serialize_sparse(&u, &mut out)
        .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", args.out.display())))?;
    let report = verify_unitary(&u);
    print!("{report}");
    if !report.is_unitary {
        return Err(Failure::Runtime(
            "composed matrix failed the unitarity check".into(),
        ));
    }
    Ok(())
}

struct Check {
    name: &'static str,
    outcome: Option<bool>,
    detail: String,
}

impl Check {
    fn pass_if(name: &'static str, ok: bool, detail: String) -> Self {
        Check {
            name,
            outcome: Some(ok),
            detail,
        }
    }

    fn skipped(name: &'static str, detail: String) -> Self {
        Check {
            name,
            outcome: None,
            detail,
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> CmdResult {
    let checks = match (&args.source.circuit, &args.source.sparse) {
        (_, Some(path)) => verify_sparse_file(path)?,
        (Some(path), None) => {
            let (circuit, input) = load_circuit(path)?;
            verify_circuit(
                &circuit,
                &input,
                args.against_dense,
                explicit_cap(args.max_qubits)?,
            )?
        }
        (None, None) => unreachable!("clap requires a source"),
    };
    let mut failed = 0;
    for check in &checks {
        let tag = match check.outcome {
            Some(true) => "PASS",
            Some(false) => {
                failed += 1;
                "FAIL"
            }
            None => "SKIP",
        };
        println!("{tag} {}: {}", check.name, check.detail);
    }
    if failed > 0 {
        return Err(Failure::Runtime(format!("{failed} check(s) failed")));
    }
    Ok(())
}

fn verify_sparse_file(path: &Path) -> Result<Vec<Check>, Failure> {
    let file = File::open(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    let u = format::parse_sparse_unchecked(BufReader::new(file))
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let report = verify_sparse(&u);
    let bijective = report.bijective == Some(true);
    let modulus = report.max_modulus_deviation.unwrap_or(0.0);
    Ok(vec![
        Check::pass_if(
            "bijectivity",
            bijective,
            match report.repeated_column {
                Some(col) => format!("column {col} appears in more than one row"),
                None => format!("{} rows, every column used once", u.dim()),
            },
        ),
        Check::pass_if(
            "unit values",
            modulus <= EXACT_TOL,
            format!("max ||v| - 1| = {modulus:e}"),
        ),
        Check::pass_if(
            "unitarity",
            report.is_unitary,
            format!("max |U†U - I| = {:e}", report.max_deviation),
        ),
    ])
}

fn verify_circuit(
    circuit: &Circuit,
    input: &InputState,
    against_dense: bool,
    cap: u32,
) -> Result<Vec<Check>, Failure> {
    let m = circuit.num_qubits();
    if against_dense && m > analysis::DENSE_MAX_QUBITS {
        return Err(Failure::Input(format!(
            "--against-dense supports at most {} qubits, circuit has {m}",
            analysis::DENSE_MAX_QUBITS
        )));
    }
    let mut checks = Vec::new();

    match compose_explicit_with_cap(circuit, cap) {
        Ok(u) => {
            let report = verify_sparse(&u);
            checks.push(Check::pass_if(
                "bijectivity",
                report.bijective == Some(true),
                format!("{} rows", u.dim()),
            ));
            let modulus = report.max_modulus_deviation.unwrap_or(0.0);
            let exact_ones = circuit.has_phase_steps()
                || u.vals().iter().all(|v| *v == Complex64::new(1.0, 0.0));
            checks.push(Check::pass_if(
                "unit values",
                modulus <= EXACT_TOL && exact_ones,
                if circuit.has_phase_steps() {
                    format!("max ||v| - 1| = {modulus:e}")
                } else {
                    "no phase steps; every value exactly 1".to_string()
                },
            ));
            let mut symmetric = true;
            let mut checked = 0;
            for (k, step) in circuit
                .steps()
                .iter()
                .enumerate()
                .filter(|(_, s)| s.is_involution())
            {
                let su = build_step_matrix(step, m).map_err(|e| Failure::Runtime(e.to_string()))?;
                let ones = su.vals().iter().all(|v| *v == Complex64::new(1.0, 0.0));
                if !(su.is_symmetric() && ones) {
                    symmetric = false;
                    checks.push(Check::pass_if(
                        "step symmetry",
                        false,
                        format!("step {} is not symmetric", k + 1),
                    ));
                }
                checked += 1;
            }
            if symmetric {
                checks.push(Check::pass_if(
                    "step symmetry",
                    true,
                    format!("{checked} bit-flip/swap steps equal their transpose"),
                ));
            }
        }
        Err(Error::TooLarge { .. }) => {
            for name in ["bijectivity", "unit values", "step symmetry"] {
                checks.push(Check::skipped(
                    name,
                    format!("{m} qubits exceeds explicit cap {cap}"),
                ));
            }
        }
        Err(e) => return Err(Failure::Runtime(e.to_string())),
    }

    if m <= VERIFY_NORM_MAX_QUBITS {
        let out = evaluate_chunk(circuit, input, 0, circuit.dim())
            .map_err(|e| Failure::Runtime(e.to_string()))?;
        let out_norm = out.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let in_norm = input.norm_sqr().sqrt();
        let diff = (out_norm - in_norm).abs();
        let tol = qsim::ACCUMULATED_TOL * in_norm.max(1.0);
        checks.push(Check::pass_if(
            "norm conservation",
            diff <= tol,
            format!("|out| = {out_norm}, |in| = {in_norm}, diff {diff:e}"),
        ));

        if against_dense {
            let oracle =
                dense::dense_output(circuit, input).map_err(|e| Failure::Runtime(e.to_string()))?;
            let max_abs = out
                .amps
                .iter()
                .zip(oracle.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            checks.push(Check::pass_if(
                "dense state oracle",
                max_abs <= EXACT_TOL,
                format!("max |lazy - dense| = {max_abs:e}"),
            ));
            let dense_u = dense::DenseMatrix::from_circuit(circuit)
                .map_err(|e| Failure::Runtime(e.to_string()))?;
            let explicit = compose_explicit_with_cap(circuit, analysis::DENSE_MAX_QUBITS)
                .and_then(|u| dense::DenseMatrix::from_sparse(&u))
                .map_err(|e| Failure::Runtime(e.to_string()))?;
            let diff = dense_u.max_abs_diff(&explicit);
            checks.push(Check::pass_if(
                "dense matrix oracle",
                diff <= EXACT_TOL,
                format!("max |explicit - product of dense steps| = {diff:e}"),
            ));
            let dev = dense_u.unitarity_deviation();
            checks.push(Check::pass_if(
                "dense unitarity",
                dev <= EXACT_TOL,
                format!("max |U†U - I| = {dev:e}"),
            ));
        }
    } else {
        checks.push(Check::skipped(
            "norm conservation",
            format!("{m} qubits exceeds {VERIFY_NORM_MAX_QUBITS} for full evaluation"),
        ));
    }
    Ok(checks)
}

fn cmd_bench(args: BenchArgs) -> CmdResult {
    let config = BenchConfig {
        min_qubits: args.min_qubits,
        max_qubits: args.max_qubits,
        steps: args.steps,
        workers: resolve_workers(args.workers),
        repeats: args.repeats,
        seed: args.seed,
        chunk_size: args.chunk_size,
    };
    if args.chunk_size == Some(0) {
        return Err(Failure::Usage("--chunk-size must be at least 1".into()));
    }
    let records = bench::run_bench(&config, |r| {
        eprintln!(
            "M={} W={} chunk={} {:.6}s",
            r.num_qubits, r.workers, r.chunk, r.seconds
        );
    })
    .map_err(|e| match e {
        bench::BenchError::Range { .. } | bench::BenchError::Zero => Failure::Usage(e.to_string()),
        other => Failure::Runtime(other.to_string()),
    })?;

    let written = match &args.csv {
        Some(path) => bench::write_csv(&records, create(path)?),
        None => bench::write_csv(&records, io::stdout().lock()),
    };
    written.map_err(|e| Failure::Runtime(format!("cannot write CSV: {e}")))?;

    for r in records.iter().filter(|r| r.growth.is_some()) {
        eprintln!(
            "growth M={}->{}: x{:.2}",
            r.num_qubits - 1,
            r.num_qubits,
            r.growth.unwrap_or_default()
        );
    }
    Ok(())
}
