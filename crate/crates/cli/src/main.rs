//! `qident` — command-line front-end for the circuit identity and
//! equivalence toolkit.
//!
//! Every invocation prints exactly one JSON object on stdout (machine
//! surface) and a short human summary on stderr. The JSON object always
//! carries the echoed command line, a digest of every input file, the
//! resolved seed, the engine payload under `report`, and the wall time.
//!
//! Exit codes: 0 success (NEAR / satisfied / value computed), 1 FAR or a
//! violated bound, 2 malformed input or arguments, 3 dense-simulation cap
//! exceeded, 4 promise violation (the verdict is still printed), 5 subspace
//! problems (not invariant, dirty membership, trivial), 70 numerical
//! failure.

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use qident::circuit::Circuit;
use qident::reduction::{build_circuit, check_bounds, separation_ok, BoundCheck};
use qident::sim::{circuit_unitary, CMatrix, StateVector};
use qident::spectral::{
    decide_from_report, equivalence_report, spectral_report, SubspaceSpec, Verdict,
};
use qident::verifier::{
    acceptance_probability, build_equivalence_verifier, find_extremal_eigenvectors,
    max_acceptance, pair_witness, EquivalenceParams, VerifierSpec, Witness,
};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

const TWO_PI: f64 = 2.0 * PI;

/// Inspect and compare quantum circuits up to global phase.
#[derive(Parser)]
#[command(name = "qident", version, about, max_term_width = 100)]
struct Cli {
    /// Seed echoed into the report; the QIDENT_SEED environment variable
    /// takes precedence. All engines are deterministic, so this only pins
    /// the report metadata.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for grid sweeps (--oracle-grid, --phi-grid).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance from a circuit to the nearest phase multiple of the identity
    Dist(DistArgs),
    /// Equivalence of two circuits up to global phase, optionally restricted
    /// to an invariant subspace
    Equiv(EquivArgs),
    /// Build the phase-estimation verifier deciding equivalence of two
    /// circuits
    Verifier(VerifierArgs),
    /// Acceptance probability of a verifier circuit on a witness
    Accept(AcceptArgs),
    /// Build the reduction circuit tying verifier acceptance to the
    /// identity-check distance
    Reduce(ReduceArgs),
    /// Check the reduction distance bounds, or the bare bound separation
    Bounds(BoundsArgs),
}

#[derive(Args)]
struct DistArgs {
    /// Circuit file
    circuit: PathBuf,
    /// FAR threshold: distances >= delta decide FAR (requires --mu)
    #[arg(long)]
    delta: Option<f64>,
    /// NEAR threshold: distances <= mu decide NEAR (requires --delta)
    #[arg(long)]
    mu: Option<f64>,
    /// Cross-check the spectral distance against a brute-force minimization
    /// over this many phase grid points
    #[arg(long, value_name = "N")]
    oracle_grid: Option<usize>,
}

#[derive(Args)]
struct EquivArgs {
    /// First circuit file
    a: PathBuf,
    /// Second circuit file
    b: PathBuf,
    /// FAR threshold on the restricted distance
    #[arg(long)]
    delta: f64,
    /// NEAR threshold on the restricted distance
    #[arg(long)]
    mu: f64,
    /// Membership circuit defining the invariant subspace to compare on
    #[arg(long, value_name = "CIRCUIT")]
    subspace: Option<PathBuf>,
    /// Ancilla count of the membership circuit (defaults to its `ancillas`
    /// annotation, then 0)
    #[arg(long, value_name = "M", requires = "subspace")]
    anc: Option<usize>,
}

#[derive(Args)]
struct VerifierArgs {
    /// First circuit file
    a: PathBuf,
    /// Second circuit file
    b: PathBuf,
    /// FAR threshold of the promise (chordal eigenvalue separation)
    #[arg(long)]
    delta: f64,
    /// NEAR threshold of the promise
    #[arg(long)]
    mu: f64,
    /// Phase-register bits per side (defaults to the promise-derived width)
    #[arg(long)]
    t: Option<usize>,
    /// Write the verifier circuit to this file
    #[arg(long, value_name = "FILE")]
    emit: Option<PathBuf>,
}

#[derive(Args)]
struct AcceptArgs {
    /// Verifier circuit file (with `output` / `ancillas` annotations)
    verifier: PathBuf,
    /// Witness state file (`dim D` header, one `re im` pair per line)
    #[arg(long, value_name = "FILE", conflicts_with = "honest")]
    witness: Option<PathBuf>,
    /// Derive the honest witness from this circuit pair: the eigenvector
    /// pair at the endpoints of their comparison spectrum's covering arc
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    honest: Option<Vec<PathBuf>>,
    /// Also maximize acceptance over all witnesses
    #[arg(long)]
    max: bool,
}

#[derive(Args)]
struct ReduceArgs {
    /// Verifier circuit file
    verifier: PathBuf,
    /// Phase angle (radians, or pi/2, pi/4, pi/8)
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    phi: f64,
    /// Write the reduction circuit to this file
    #[arg(long, value_name = "FILE")]
    emit: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Verifier circuit file; omit to evaluate the bare bound separation
    /// for --epsilon and --phi
    verifier: Option<PathBuf>,
    /// Phase angle (radians, or pi/2, pi/4, pi/8)
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    phi: Option<f64>,
    /// Check the bounds over this many phases spread across (0, pi/2]
    #[arg(long, value_name = "N", conflicts_with = "phi")]
    phi_grid: Option<usize>,
    /// Acceptance error for the bare separation evaluation
    #[arg(long, conflicts_with_all = ["verifier", "phi_grid"])]
    epsilon: Option<f64>,
}

/// A failed run: exit code plus the message for stderr.
struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

impl From<qident::Error> for Failure {
    fn from(e: qident::Error) -> Failure {
        use qident::Error::*;
        let code = match &e {
            Parse { .. } | Io(_) | NotNormalized { .. } | Dimension { .. }
            | QubitCountMismatch { .. } | QubitOutOfRange { .. } | DuplicateQubit { .. }
            | BadThresholds { .. } | InvalidParameter { .. } => 2,
            DenseLimit { .. } => 3,
            DirtyMembership { .. } | SubspaceNotInvariant { .. } | TrivialSubspace => 5,
            NotUnitary { .. } | NoConvergence { .. } | DegenerateSpectrum => 70,
        };
        fail(code, e.to_string())
    }
}

fn parse_angle(s: &str) -> Result<f64, String> {
    match s {
        "pi/2" => Ok(FRAC_PI_2),
        "pi/4" => Ok(FRAC_PI_4),
        "pi/8" => Ok(FRAC_PI_8),
        _ => s
            .parse::<f64>()
            .map_err(|_| format!("expected radians or one of pi/2, pi/4, pi/8, got `{}`", s)),
    }
}

/// Tracks input files: their digests are part of every report.
#[derive(Default)]
struct Inputs {
    digests: Vec<Value>,
}

impl Inputs {
    fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let bytes = std::fs::read(path)
            .map_err(|e| fail(2, format!("cannot read {}: {}", path.display(), e)))?;
        self.digests.push(json!({
            "path": path.display().to_string(),
            "sha256": format!("{:x}", Sha256::digest(&bytes)),
        }));
        String::from_utf8(bytes)
            .map_err(|_| fail(2, format!("{} is not valid UTF-8", path.display())))
    }

    fn circuit(&mut self, path: &Path) -> Result<Circuit, Failure> {
        let text = self.read(path)?;
        Circuit::parse(&text)
            .map_err(|e| fail(2, format!("{}: {}", path.display(), e)))
    }

    fn verifier(&mut self, path: &Path) -> Result<VerifierSpec, Failure> {
        let circuit = self.circuit(path)?;
        VerifierSpec::from_annotations(circuit)
            .map_err(|e| fail(2, format!("{}: {}", path.display(), e)))
    }
}

/// What a subcommand produced: the JSON payload, the process exit code, and
/// the one-line human summary.
struct Outcome {
    report: Value,
    code: u8,
    summary: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let argv: Vec<String> = std::env::args().skip(1).collect();

    let seed = match resolve_seed(cli.seed) {
        Ok(seed) => seed,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return ExitCode::from(f.code);
        }
    };
    let jobs = cli.jobs.max(1);

    let mut inputs = Inputs::default();
    let outcome = match &cli.command {
        Command::Dist(args) => cmd_dist(args, jobs, &mut inputs),
        Command::Equiv(args) => cmd_equiv(args, &mut inputs),
        Command::Verifier(args) => cmd_verifier(args, &mut inputs),
        Command::Accept(args) => cmd_accept(args, &mut inputs),
        Command::Reduce(args) => cmd_reduce(args, &mut inputs),
        Command::Bounds(args) => cmd_bounds(args, jobs, &mut inputs),
    };

    match outcome {
        Ok(out) => {
            let full = json!({
                "command": argv,
                "inputs": inputs.digests,
                "seed": seed,
                "report": out.report,
                "wall_time_s": started.elapsed().as_secs_f64(),
            });
            println!("{}", full);
            eprintln!("{}", out.summary);
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<Option<u64>, Failure> {
    match std::env::var("QIDENT_SEED") {
        Ok(text) => text
            .parse::<u64>()
            .map(Some)
            .map_err(|_| fail(2, format!("QIDENT_SEED must be an unsigned integer, got `{}`", text))),
        Err(std::env::VarError::NotPresent) => Ok(flag),
        Err(e) => Err(fail(2, format!("QIDENT_SEED: {}", e))),
    }
}

fn thresholds(delta: Option<f64>, mu: Option<f64>) -> Result<Option<(f64, f64)>, Failure> {
    match (delta, mu) {
        (Some(d), Some(m)) => Ok(Some((d, m))),
        (None, None) => Ok(None),
        _ => Err(fail(2, "--delta and --mu must be given together")),
    }
}

fn verdict_code(verdict: Verdict) -> u8 {
    match verdict {
        Verdict::Near => 0,
        Verdict::Far => 1,
        Verdict::PromiseViolated => 4,
    }
}

fn cmd_dist(args: &DistArgs, jobs: usize, inputs: &mut Inputs) -> Result<Outcome, Failure> {
    let circuit = inputs.circuit(&args.circuit)?;
    let u = circuit_unitary(&circuit)?;
    let spectral = spectral_report(&u)?;

    let mut report = json!({ "spectral": spectral });
    let mut code = 0u8;
    let mut summary = format!(
        "distance {:.9} to the nearest phase multiple (optimal phase {:.9})",
        spectral.distance, spectral.optimal_phase
    );

    if let Some((delta, mu)) = thresholds(args.delta, args.mu)? {
        let verdict = decide_from_report(&spectral, delta, mu)?;
        summary.push_str(&format!("; verdict {:?}", verdict.verdict));
        // dist reports FAR as a successful answer; only the excluded middle
        // changes the exit code
        code = match verdict.verdict {
            Verdict::PromiseViolated => 4,
            _ => 0,
        };
        report["verdict"] = serde_json::to_value(&verdict).expect("verdict serializes");
    }

    if let Some(grid_points) = args.oracle_grid {
        if grid_points == 0 {
            return Err(fail(2, "--oracle-grid must be positive"));
        }
        let eigenvalues = schur_eigenvalues(&u);
        let minimum = grid_minimum(&eigenvalues, grid_points, jobs);
        let discrepancy = (spectral.distance - minimum).abs();
        summary.push_str(&format!(
            "; grid oracle {:.9} over {} points (|difference| {:.3e})",
            minimum, grid_points, discrepancy
        ));
        report["oracle"] = json!({
            "grid_points": grid_points,
            "grid_minimum": minimum,
            "discrepancy": discrepancy,
        });
    }

    Ok(Outcome { report, code, summary })
}

fn parse_subspace(
    args: &EquivArgs,
    inputs: &mut Inputs,
) -> Result<Option<SubspaceSpec>, Failure> {
    let Some(path) = &args.subspace else { return Ok(None) };
    let membership = inputs.circuit(path)?;
    let n_ancillas = args.anc.or(membership.ancilla_count()).unwrap_or(0);
    let output_qubit = membership.output_qubit().unwrap_or(membership.n_qubits() - 1);
    let spec = SubspaceSpec::new(membership, n_ancillas, output_qubit)
        .map_err(|e| fail(2, format!("{}: {}", path.display(), e)))?;
    Ok(Some(spec))
}

fn cmd_equiv(args: &EquivArgs, inputs: &mut Inputs) -> Result<Outcome, Failure> {
    let a = inputs.circuit(&args.a)?;
    let b = inputs.circuit(&args.b)?;
    let subspace = parse_subspace(args, inputs)?;

    let spectral = equivalence_report(&a, &b, subspace.as_ref())?;
    let verdict = decide_from_report(&spectral, args.delta, args.mu)?;
    let code = verdict_code(verdict.verdict);
    let summary = format!(
        "restricted distance {:.9}; verdict {:?}",
        verdict.distance, verdict.verdict
    );
    let report = json!({ "spectral": spectral, "verdict": verdict });
    Ok(Outcome { report, code, summary })
}

fn cmd_verifier(args: &VerifierArgs, inputs: &mut Inputs) -> Result<Outcome, Failure> {
    let a = inputs.circuit(&args.a)?;
    let b = inputs.circuit(&args.b)?;
    let params = match args.t {
        Some(t) => EquivalenceParams::with_bits(t, args.delta, args.mu)?,
        None => EquivalenceParams::for_promise(args.delta, args.mu)?,
    };
    let spec = build_equivalence_verifier(&a, &b, None, &params)?;
    let circuit = spec.circuit();

    let emitted = write_emitted(args.emit.as_deref(), circuit)?;
    let summary = format!(
        "built {}-qubit verifier ({} gates, t = {}, chord threshold {:.9}){}",
        circuit.n_qubits(),
        circuit.gates().len(),
        params.t,
        params.chord_threshold,
        emitted
            .as_ref()
            .map(|p| format!("; wrote {}", p))
            .unwrap_or_default()
    );
    let report = json!({
        "t": params.t,
        "delta": params.delta,
        "mu": params.mu,
        "chord_threshold": params.chord_threshold,
        "n_qubits": circuit.n_qubits(),
        "n_inputs": spec.n_inputs(),
        "n_ancillas": spec.n_ancillas(),
        "output_qubit": spec.output_qubit(),
        "gate_count": circuit.gates().len(),
        "emitted": emitted,
    });
    Ok(Outcome { report, code: 0, summary })
}

fn cmd_accept(args: &AcceptArgs, inputs: &mut Inputs) -> Result<Outcome, Failure> {
    let spec = inputs.verifier(&args.verifier)?;
    let mut report = serde_json::Map::new();
    let mut parts: Vec<String> = Vec::new();

    let witness = match (&args.witness, &args.honest) {
        (Some(path), None) => {
            let text = inputs.read(path)?;
            let state = StateVector::parse(&text)
                .map_err(|e| fail(2, format!("{}: {}", path.display(), e)))?;
            report.insert("witness_source".into(), json!("file"));
            Some(state)
        }
        (None, Some(pair)) => {
            let a = inputs.circuit(&pair[0])?;
            let b = inputs.circuit(&pair[1])?;
            let comparison = circuit_unitary(&a.concat(&b.inverse())?)?;
            let extremes = find_extremal_eigenvectors(&comparison)?;
            report.insert("witness_source".into(), json!("honest"));
            report.insert("phase_start".into(), json!(extremes.phase_start));
            report.insert("phase_end".into(), json!(extremes.phase_end));
            report.insert("chord".into(), json!(extremes.chord()));
            Some(pair_witness(&extremes.vector_start, &extremes.vector_end)?)
        }
        (None, None) => None,
        (Some(_), Some(_)) => unreachable!("clap conflict"),
    };

    if witness.is_none() && !args.max {
        return Err(fail(2, "provide --witness FILE, --honest A B, or --max"));
    }

    if let Some(state) = witness {
        if state.n_qubits() != spec.n_inputs() {
            return Err(fail(
                2,
                format!(
                    "witness has {} qubits but the verifier takes {}",
                    state.n_qubits(),
                    spec.n_inputs()
                ),
            ));
        }
        let p = acceptance_probability(&spec, &Witness::Pure(state))?;
        report.insert("acceptance".into(), json!(p));
        parts.push(format!("acceptance {:.12}", p));
    }

    if args.max {
        let best = max_acceptance(&spec)?;
        report.insert("p_max".into(), json!(best.p_max));
        parts.push(format!("p_max {:.12}", best.p_max));
    }

    Ok(Outcome {
        report: Value::Object(report),
        code: 0,
        summary: parts.join("; "),
    })
}

fn cmd_reduce(args: &ReduceArgs, inputs: &mut Inputs) -> Result<Outcome, Failure> {
    let spec = inputs.verifier(&args.verifier)?;
    let z = build_circuit(&spec, args.phi)?;
    let emitted = write_emitted(args.emit.as_deref(), &z)?;
    let summary = format!(
        "built {}-qubit reduction circuit ({} gates, phi {:.9}){}",
        z.n_qubits(),
        z.gates().len(),
        args.phi,
        emitted
            .as_ref()
            .map(|p| format!("; wrote {}", p))
            .unwrap_or_default()
    );
    let report = json!({
        "phi": args.phi,
        "n_qubits": z.n_qubits(),
        "gate_count": z.gates().len(),
        "emitted": emitted,
    });
    Ok(Outcome { report, code: 0, summary })
}

fn cmd_bounds(args: &BoundsArgs, jobs: usize, inputs: &mut Inputs) -> Result<Outcome, Failure> {
    let Some(path) = &args.verifier else {
        // bare-formula mode: how far apart the two bounds sit
        let (Some(epsilon), Some(phi)) = (args.epsilon, args.phi) else {
            return Err(fail(2, "without a verifier, both --epsilon and --phi are required"));
        };
        let separation = separation_ok(epsilon, phi)?;
        let summary = format!(
            "bounds at epsilon {} phi {:.9}: lower {:.9}, upper {:.9}, {}",
            epsilon,
            phi,
            separation.lower,
            separation.upper,
            if separation.separated { "separated" } else { "not separated" }
        );
        return Ok(Outcome {
            report: json!({ "epsilon": epsilon, "phi": phi, "separation": separation }),
            code: if separation.separated { 0 } else { 1 },
            summary,
        });
    };

    let spec = inputs.verifier(path)?;
    if let Some(n) = args.phi_grid {
        if n == 0 {
            return Err(fail(2, "--phi-grid must be positive"));
        }
        let phis: Vec<f64> = (1..=n).map(|k| k as f64 * FRAC_PI_2 / n as f64).collect();
        let checks = run_grid(&phis, jobs, |phi| check_bounds(&spec, phi))?;
        let satisfied = checks.iter().filter(|c| c.satisfied).count();
        let all = satisfied == checks.len();
        let summary = format!("{}/{} phases satisfy their bound", satisfied, checks.len());
        Ok(Outcome {
            report: json!({ "checks": checks, "all_satisfied": all }),
            code: if all { 0 } else { 1 },
            summary,
        })
    } else {
        let Some(phi) = args.phi else {
            return Err(fail(2, "provide --phi ANGLE or --phi-grid N"));
        };
        let check = check_bounds(&spec, phi)?;
        let summary = format!(
            "{:?}: measured {:.9} vs bound {:.9} (margin {:.3e}) — {}{}",
            check.case,
            check.measured,
            check.bound,
            check.margin,
            if check.satisfied { "satisfied" } else { "VIOLATED" },
            check
                .warning
                .as_ref()
                .map(|w| format!("; warning: {}", w))
                .unwrap_or_default()
        );
        let code = if check.satisfied { 0 } else { 1 };
        Ok(Outcome { report: json!(check), code, summary })
    }
}

fn write_emitted(path: Option<&Path>, circuit: &Circuit) -> Result<Option<String>, Failure> {
    let Some(path) = path else { return Ok(None) };
    std::fs::write(path, circuit.serialize())
        .map_err(|e| fail(2, format!("cannot write {}: {}", path.display(), e)))?;
    Ok(Some(path.display().to_string()))
}

/// Eigenvalues via Schur factorization: a second, independent route used
/// only for the --oracle-grid cross-check.
fn schur_eigenvalues(u: &CMatrix) -> Vec<Complex64> {
    let (_, t) = u.clone().schur().unpack();
    (0..t.nrows()).map(|j| t[(j, j)]).collect()
}

/// Minimize `max_j |lambda_j - e^{i phi}|` over a uniform phase grid,
/// optionally splitting the grid across threads. The result is independent
/// of the split: each chunk reduces with `min`, which is exact.
fn grid_minimum(eigenvalues: &[Complex64], grid_points: usize, jobs: usize) -> f64 {
    let worst_at = |k: usize| -> f64 {
        let probe = Complex64::from_polar(1.0, TWO_PI * k as f64 / grid_points as f64);
        eigenvalues.iter().map(|l| (l - probe).norm()).fold(0.0f64, f64::max)
    };
    if jobs <= 1 || grid_points < 2 * jobs {
        return (0..grid_points).map(worst_at).fold(f64::INFINITY, f64::min);
    }
    let chunk = grid_points.div_ceil(jobs);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs)
            .map(|w| {
                let lo = w * chunk;
                let hi = ((w + 1) * chunk).min(grid_points);
                scope.spawn(move || (lo..hi).map(worst_at).fold(f64::INFINITY, f64::min))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("grid worker"))
            .fold(f64::INFINITY, f64::min)
    })
}

/// Evaluate one fallible check per phase, preserving order, optionally in
/// parallel.
fn run_grid<F>(phis: &[f64], jobs: usize, check: F) -> Result<Vec<BoundCheck>, Failure>
where
    F: Fn(f64) -> qident::Result<BoundCheck> + Sync,
{
    if jobs <= 1 || phis.len() < 2 {
        return phis.iter().map(|&phi| check(phi).map_err(Failure::from)).collect();
    }
    let chunk = phis.len().div_ceil(jobs);
    let results: Vec<qident::Result<BoundCheck>> = std::thread::scope(|scope| {
        let check = &check;
        let handles: Vec<_> = phis
            .chunks(chunk)
            .map(|slice| {
                scope.spawn(move || slice.iter().map(|&phi| check(phi)).collect::<Vec<_>>())
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("bounds worker"))
            .collect()
    });
    results.into_iter().map(|r| r.map_err(Failure::from)).collect()
}
