//! `symclif`: canonicalize Pauli symmetries, count/sample/enumerate symmetric
//! Clifford groups, and certify symmetric unitary designs via frame
//! potentials.
//!
//! Exit codes: 0 success, 2 parse error, 3 unsupported symmetry,
//! 4 resource guard exceeded.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;
use symclif_core::canonical::{canonicalize, StandardForm};
use symclif_core::clifford::CliffordTableau;
use symclif_core::commutant::{analytic_frame_potential, block_decompose, SymmetrySpec};
use symclif_core::framepot::{
    build_d_channel, certify_design, clifford_ensemble, frame_potential_group_sum, frame_potential_mc,
    FramePotentialEstimate, Method, TwirlEnsemble,
};
use symclif_core::linalg::Matrix;
use symclif_core::pauli::{subgroup_from_generators, PauliOp};
use symclif_core::samplers::{
    enumerate_pauli_symmetric, enumerate_su2, enumerate_u1, group_size, sample_pauli_symmetric,
    sample_su2, sample_u1, su2_size, u1_size,
};
use symclif_core::{shard_rng, Error};

#[derive(Parser)]
#[command(name = "symclif", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpecArgs {
    /// Pauli symmetry: comma-separated generator strings, e.g. XXXX,ZZZZ
    #[arg(long, value_name = "GENS", group = "spec")]
    pauli: Option<String>,
    /// U(1) symmetry (total-Z conservation) on N qubits
    #[arg(long, value_name = "N", group = "spec")]
    u1: Option<usize>,
    /// SU(2) symmetry (total-spin conservation) on N qubits
    #[arg(long, value_name = "N", group = "spec")]
    su2: Option<usize>,
    /// Custom symmetry from a JSON spec file
    #[arg(long, value_name = "FILE", group = "spec")]
    custom: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Comma-separated list of moments, e.g. 1,2,3
    #[arg(long, value_name = "LIST", default_value = "1,2,3")]
    t: String,
    /// Monte Carlo sample budget / enumeration cap
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    /// RNG seed; fully determines the output
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (results are independent of this)
    #[arg(long)]
    threads: Option<usize>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format for tabular results
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Emit dense matrices (JSON) instead of tableau text
    #[arg(long, default_value_t = false)]
    dense: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum FpMethod {
    Mc,
    GroupSum,
    Analytic,
}

#[derive(Subcommand)]
enum Command {
    /// Conjugate a Pauli symmetry into standard form
    Canonicalize {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Exact size of the symmetric Clifford group mod phase
    Size {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Uniform samples from the symmetric Clifford group
    Sample {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Number of samples to draw
        #[arg(long, default_value_t = 1)]
        count: u64,
    },
    /// Enumerate the whole symmetric Clifford group (guarded by --samples)
    Enumerate {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Frame potentials of the symmetric Clifford group
    #[command(name = "frame-potential")]
    FramePotential {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = FpMethod::Mc)]
        method: FpMethod,
    },
    /// Design/no-design verdicts against the symmetric unitary group
    Certify {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Verify the derandomizing D-channel on random operators
    #[command(name = "twirl-check")]
    TwirlCheck {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        run: RunArgs,
    },
}

fn parse_spec(args: &SpecArgs) -> Result<SymmetrySpec, CliError> {
    if let Some(gens) = &args.pauli {
        let mut ops = Vec::new();
        for part in gens.split(',') {
            ops.push(PauliOp::parse(part).map_err(CliError::from)?);
        }
        let n = ops.first().map(|p| p.n()).ok_or_else(|| CliError::parse("empty Pauli generator list"))?;
        if ops.iter().any(|p| p.n() != n) {
            return Err(CliError::parse("Pauli generators have mixed lengths"));
        }
        Ok(SymmetrySpec::Pauli(subgroup_from_generators(n, &ops)))
    } else if let Some(n) = args.u1 {
        if n == 0 {
            return Err(CliError::parse("--u1 needs at least one qubit"));
        }
        Ok(SymmetrySpec::U1(n))
    } else if let Some(n) = args.su2 {
        if n == 0 {
            return Err(CliError::parse("--su2 needs at least one qubit"));
        }
        Ok(SymmetrySpec::SU2(n))
    } else if let Some(path) = &args.custom {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
        SymmetrySpec::from_json(&text).map_err(CliError::from)
    } else {
        Err(CliError::parse("one of --pauli, --u1, --su2, --custom is required"))
    }
}

fn parse_t_list(list: &str) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::new();
    for part in list.split(',') {
        let t: usize = part.trim().parse().map_err(|_| CliError::parse(format!("bad t value {part:?}")))?;
        if t == 0 {
            return Err(CliError::parse("t must be positive"));
        }
        out.push(t);
    }
    Ok(out)
}

struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn parse(msg: impl Into<String>) -> Self {
        CliError { code: 2, message: msg.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_) | Error::IdentityPauli | Error::CommutingPair => 2,
            Error::Unsupported(_) | Error::NotSymmetric => 3,
            Error::CapExceeded(_) | Error::EnumerationCap { .. } => 4,
            Error::DecompositionFailed(_) | Error::Internal(_) => 1,
        };
        CliError { code, message: e.to_string() }
    }
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError { code: 1, message: format!("cannot write {}: {e}", path.display()) }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| CliError { code: 1, message: e.to_string() })
        }
    }
}

#[derive(Serialize, Deserialize)]
struct CanonicalizeReport {
    n1: usize,
    n2: usize,
    n3: usize,
    w: String,
    standard_generators: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct TwirlCheckReport {
    n1: usize,
    n2: usize,
    n3: usize,
    operators: usize,
    samples: u64,
    seed: u64,
    linearity_residual: f64,
    invariance_residual: f64,
}

fn require_pauli(spec: &SymmetrySpec) -> Result<StandardForm, CliError> {
    match spec {
        SymmetrySpec::Pauli(q) => Ok(canonicalize(q)),
        _ => Err(CliError {
            code: 3,
            message: "this command needs a Pauli symmetry (--pauli)".into(),
        }),
    }
}

fn tableau_block(t: &CliffordTableau, dense: bool) -> Result<String, CliError> {
    if dense {
        let m = t.to_matrix().map_err(CliError::from)?;
        let rows: Vec<Vec<[f64; 2]>> = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        Ok(serde_json::to_string(&rows).unwrap())
    } else {
        Ok(t.to_string())
    }
}

fn fp_csv_row(label: &str, est: &FramePotentialEstimate, seed: u64, elapsed_ms: u128) -> String {
    format!(
        "{label},{},{},{:.12e},{:.12e},{},{seed},{elapsed_ms}\n",
        est.t,
        est.method.as_str(),
        est.value,
        est.stderr,
        est.samples
    )
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    let run_args = match &cli.command {
        Command::Canonicalize { run, .. }
        | Command::Size { run, .. }
        | Command::Sample { run, .. }
        | Command::Enumerate { run, .. }
        | Command::FramePotential { run, .. }
        | Command::Certify { run, .. }
        | Command::TwirlCheck { run, .. } => run,
    };
    if let Some(k) = run_args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError { code: 1, message: e.to_string() })?;
    }

    match &cli.command {
        Command::Canonicalize { spec, run } => {
            let spec = parse_spec(spec)?;
            let sf = require_pauli(&spec)?;
            let report = CanonicalizeReport {
                n1: sf.n1(),
                n2: sf.n2(),
                n3: sf.n3(),
                w: sf.w().to_string(),
                standard_generators: sf.standard_generators().iter().map(|g| g.to_string()).collect(),
            };
            write_output(&run.out, &format!("{}\n", serde_json::to_string_pretty(&report).unwrap()))
        }
        Command::Size { spec, run } => {
            let spec = parse_spec(spec)?;
            let size = match &spec {
                SymmetrySpec::Pauli(q) => group_size(&canonicalize(q)),
                SymmetrySpec::U1(n) => u1_size(*n),
                SymmetrySpec::SU2(n) => su2_size(*n),
                SymmetrySpec::Custom { .. } => {
                    return Err(CliError { code: 3, message: "no group size for custom symmetries".into() })
                }
            };
            write_output(&run.out, &format!("{size}\n"))
        }
        Command::Sample { spec, run, count } => {
            let spec = parse_spec(spec)?;
            let mut rng = shard_rng(run.seed, 0);
            let mut blocks = Vec::new();
            for _ in 0..*count {
                let t = match &spec {
                    SymmetrySpec::Pauli(q) => sample_pauli_symmetric(&canonicalize(q), &mut rng).to_tableau(),
                    SymmetrySpec::U1(n) => sample_u1(*n, &mut rng),
                    SymmetrySpec::SU2(n) => sample_su2(*n, &mut rng),
                    SymmetrySpec::Custom { .. } => {
                        return Err(CliError {
                            code: 3,
                            message: "no symmetric Clifford sampler for custom symmetries".into(),
                        })
                    }
                };
                blocks.push(tableau_block(&t, run.dense)?);
            }
            write_output(&run.out, &format!("{}\n", blocks.join("\n")))
        }
        Command::Enumerate { spec, run } => {
            let spec = parse_spec(spec)?;
            let cap = run.samples as u128;
            let mut blocks = Vec::new();
            match &spec {
                SymmetrySpec::Pauli(q) => {
                    let sf = canonicalize(q);
                    for e in enumerate_pauli_symmetric(&sf, cap).map_err(CliError::from)? {
                        blocks.push(tableau_block(&e.to_tableau(), run.dense)?);
                    }
                }
                SymmetrySpec::U1(n) => {
                    for t in enumerate_u1(*n, cap).map_err(CliError::from)? {
                        blocks.push(tableau_block(&t, run.dense)?);
                    }
                }
                SymmetrySpec::SU2(n) => {
                    for t in enumerate_su2(*n, cap).map_err(CliError::from)? {
                        blocks.push(tableau_block(&t, run.dense)?);
                    }
                }
                SymmetrySpec::Custom { .. } => {
                    return Err(CliError {
                        code: 3,
                        message: "no symmetric Clifford enumeration for custom symmetries".into(),
                    })
                }
            }
            write_output(&run.out, &format!("{}\n", blocks.join("\n")))
        }
        Command::FramePotential { spec, run, method } => {
            let spec = parse_spec(spec)?;
            let ts = parse_t_list(&run.t)?;
            let label = spec.label();
            let mut rows = String::from("symmetry,t,method,estimate,stderr,samples,seed,elapsed_ms\n");
            for &t in &ts {
                let start = Instant::now();
                let est = match method {
                    FpMethod::Mc => {
                        let ens = clifford_ensemble(&spec).map_err(CliError::from)?;
                        frame_potential_mc(&ens, &ens, t, run.samples, run.seed.wrapping_add(t as u64))
                    }
                    FpMethod::GroupSum => {
                        let ens = finite_ensemble(&spec, run.samples as u128)?;
                        frame_potential_group_sum(&ens, t).map_err(CliError::from)?
                    }
                    FpMethod::Analytic => {
                        let mut rng = shard_rng(run.seed, u64::MAX);
                        let bd = block_decompose(&spec, 1e-8, &mut rng).map_err(CliError::from)?;
                        let value = analytic_frame_potential(&bd, t).map_err(CliError::from)? as f64;
                        FramePotentialEstimate { t, value, stderr: 0.0, samples: 0, method: Method::Analytic }
                    }
                };
                rows.push_str(&fp_csv_row(&label, &est, run.seed, start.elapsed().as_millis()));
            }
            emit_table(run, rows)
        }
        Command::Certify { spec, run } => {
            let spec = parse_spec(spec)?;
            let ts = parse_t_list(&run.t)?;
            let t_max = *ts.iter().max().unwrap();
            let label = spec.label();
            let start = Instant::now();
            let report = certify_design(&spec, t_max, run.samples, run.seed).map_err(CliError::from)?;
            let elapsed_ms = start.elapsed().as_millis();
            let mut rows =
                String::from("symmetry,t,method,estimate,stderr,samples,seed,elapsed_ms,analytic,verdict\n");
            for row in report.iter().filter(|r| ts.contains(&r.t)) {
                rows.push_str(&format!(
                    "{label},{},{},{:.12e},{:.12e},{},{},{elapsed_ms},{:.12e},{}\n",
                    row.t,
                    row.estimate.method.as_str(),
                    row.estimate.value,
                    row.estimate.stderr,
                    row.estimate.samples,
                    run.seed,
                    row.analytic,
                    row.verdict.as_str()
                ));
            }
            emit_table(run, rows)
        }
        Command::TwirlCheck { spec, run } => {
            let spec = parse_spec(spec)?;
            let sf = require_pauli(&spec)?;
            let sf_std = StandardForm::standard(sf.n1(), sf.n2(), sf.n3());
            let dc = build_d_channel(&sf_std, run.samples.min(200)).map_err(CliError::from)?;
            let mut rng = shard_rng(run.seed, 1);
            let big = 1usize << (3 * sf_std.n());
            let operators = 5usize;
            let mut linearity: f64 = 0.0;
            let mut invariance: f64 = 0.0;
            for _ in 0..operators {
                let a = random_operator(big, &mut rng);
                let b = random_operator(big, &mut rng);
                let c = C64::new(0.6, -0.2);
                let lhs = dc.apply(&a.scale(c).add(&b), &mut rng);
                let rhs = dc.apply(&a, &mut rng).scale(c).add(&dc.apply(&b, &mut rng));
                linearity = linearity.max(lhs.sub(&rhs).max_abs());
                let da = dc.apply(&a, &mut rng);
                for _ in 0..10 {
                    let u = sample_pauli_symmetric(&sf_std, &mut rng)
                        .to_tableau()
                        .to_matrix()
                        .map_err(CliError::from)?;
                    let k = u.kron(&u).kron(&u);
                    invariance = invariance.max(da.conjugated_by(&k).sub(&da).max_abs());
                }
            }
            let report = TwirlCheckReport {
                n1: sf_std.n1(),
                n2: sf_std.n2(),
                n3: sf_std.n3(),
                operators,
                samples: run.samples,
                seed: run.seed,
                linearity_residual: linearity,
                invariance_residual: invariance,
            };
            write_output(&run.out, &format!("{}\n", serde_json::to_string_pretty(&report).unwrap()))
        }
    }
}

fn random_operator(dim: usize, rng: &mut impl Rng) -> Matrix {
    let mut m = Matrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    m
}

/// Materialize the whole symmetric Clifford group for exact group sums.
fn finite_ensemble(spec: &SymmetrySpec, cap: u128) -> Result<TwirlEnsemble, CliError> {
    let els: Vec<CliffordTableau> = match spec {
        SymmetrySpec::Pauli(q) => enumerate_pauli_symmetric(&canonicalize(q), cap)
            .map_err(CliError::from)?
            .map(|e| e.to_tableau())
            .collect(),
        SymmetrySpec::U1(n) => enumerate_u1(*n, cap).map_err(CliError::from)?.collect(),
        SymmetrySpec::SU2(n) => enumerate_su2(*n, cap).map_err(CliError::from)?.collect(),
        SymmetrySpec::Custom { .. } => {
            return Err(CliError { code: 3, message: "no finite enumeration for custom symmetries".into() })
        }
    };
    Ok(TwirlEnsemble::FiniteClifford(els))
}

fn emit_table(run: &RunArgs, csv: String) -> Result<(), CliError> {
    match run.format {
        Format::Csv => write_output(&run.out, &csv),
        Format::Json => {
            let mut lines = csv.lines();
            let header: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
            let rows: Vec<serde_json::Value> = lines
                .map(|line| {
                    let vals: Vec<&str> = line.split(',').collect();
                    let mut obj = serde_json::Map::new();
                    for (k, v) in header.iter().zip(vals) {
                        let parsed = v
                            .parse::<f64>()
                            .map(|f| serde_json::json!(f))
                            .unwrap_or_else(|_| serde_json::json!(v));
                        obj.insert(k.to_string(), parsed);
                    }
                    serde_json::Value::Object(obj)
                })
                .collect();
            write_output(&run.out, &format!("{}\n", serde_json::to_string_pretty(&rows).unwrap()))
        }
    }
}

fn main() {
    std::process::exit(match run() {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    })
}
