//! `sip`: command-line front end for the semi-inner-product toolkit.
//!
//! Every subcommand maps 1:1 to a library operation, reads the norm (and
//! operator, where applicable) from JSON files, takes vectors as
//! comma-separated decimals on argv, and prints a single JSON document to
//! stdout. Runs are deterministic: identical argv, including the seed,
//! produce byte-identical output.
//!
//! Exit codes: 0 = computed (verdicts live in the report), 2 = invalid
//! input, 3 = numerical failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sip_core::{
    adjoint_abelian_residual, auerbach_search, check_direct_sum, check_isometry,
    check_transversal_normal, ellipse_fit_residual, lemma_decomposition_residual,
    lipschitz_scan, matrix_from_json, ode_residual, power_identity_residual, section_point,
    sip_axiom_report, sip_eval, uniform_continuity_probe, verify_theorem, Error, ErrorKind,
    NormSpec, PlaneFrame, RealMatrix, RealVector, Sampler,
};

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Text,
}

#[derive(Parser)]
#[command(
    name = "sip",
    version,
    about = "Semi-inner-products of smooth norms: evaluation, operator checks, sphere geometry"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Seed for all sampled checks (SIP_SEED overrides this default)
    #[arg(long, global = true, env = "SIP_SEED", default_value_t = 7)]
    seed: u64,

    /// Number of samples per randomized check
    #[arg(long, global = true, default_value_t = 512)]
    samples: usize,

    /// Residual threshold separating pass from fail verdicts
    #[arg(long, global = true, default_value_t = 1e-7)]
    tol: f64,

    /// Report format
    #[arg(long, global = true, value_enum, default_value = "json")]
    output: Output,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the semi-inner-product [x, y]
    Eval {
        #[arg(long)]
        norm: PathBuf,
        /// Comma-separated coordinates
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Audit the SIP axioms over seeded samples
    Axioms {
        #[arg(long)]
        norm: PathBuf,
    },
    /// Adjoint-abelian residual max |[Ax,y] − [x,Ay]| (normalized)
    CheckAa {
        #[arg(long)]
        norm: PathBuf,
        #[arg(long)]
        op: PathBuf,
    },
    /// Mutual transversality/normality of two subspaces
    Transversal {
        #[arg(long)]
        norm: PathBuf,
        /// Basis of the first subspace: vectors joined by ';'
        #[arg(long)]
        u: String,
        /// Basis of the second subspace: vectors joined by ';'
        #[arg(long)]
        v: String,
    },
    /// SIP splitting defect of a direct-sum decomposition
    DirectSum {
        #[arg(long)]
        norm: PathBuf,
        /// One subspace basis per flag: vectors joined by ';'
        #[arg(long = "sub", required = true)]
        subs: Vec<String>,
    },
    /// Isometry defect max |‖Ax‖ − 1| over unit x
    Isometry {
        #[arg(long)]
        norm: PathBuf,
        #[arg(long)]
        op: PathBuf,
    },
    /// Residual of [z, x] = [z, x_i] for z in the i-th eigenvalue group
    Lemma5 {
        #[arg(long)]
        norm: PathBuf,
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        z: String,
        #[arg(long)]
        x: String,
    },
    /// Residual of the power identity [z, x] = [z, Σ (λ_i/λ₁)²ⁿ x_i]
    PowerId {
        #[arg(long)]
        norm: PathBuf,
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        z: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        n: u32,
    },
    /// Adjoint-abelian verdict against the three structural conditions
    VerifyTheorem {
        #[arg(long)]
        norm: PathBuf,
        #[arg(long)]
        op: PathBuf,
    },
    /// Auerbach basis by determinant maximization
    Auerbach {
        #[arg(long)]
        norm: PathBuf,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        /// Treat a non-converged search as a failure (exit 3)
        #[arg(long)]
        strict: bool,
    },
    /// Point of the unit-sphere section S ∩ span{u, v} at angle theta
    Section {
        #[arg(long)]
        norm: PathBuf,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long)]
        theta: f64,
    },
    /// Centered-ellipse fit residual of a plane section
    Ellipse {
        #[arg(long)]
        norm: PathBuf,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
    /// Residual of the section-graph ODE f′ = −x·f/(1 − x²)
    Ode {
        #[arg(long)]
        norm: PathBuf,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long)]
        x0: f64,
    },
    /// Lipschitz quotient scan of y ↦ [x, y] on the unit sphere
    Lipschitz {
        #[arg(long)]
        norm: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 64)]
        mesh: usize,
        #[arg(long, default_value_t = 4)]
        refine: usize,
    },
    /// Uniform-continuity probe over explicit sphere pairs
    Ucont {
        #[arg(long)]
        norm: PathBuf,
        #[arg(long)]
        x: String,
        /// One pair per flag: "y;z" with comma-separated coordinates
        #[arg(long = "pair", required = true)]
        pairs: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(doc) => {
            match cli.output {
                Output::Json => println!("{doc}"),
                Output::Text => print_text(&doc),
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            match err.kind() {
                ErrorKind::InvalidInput => ExitCode::from(2),
                ErrorKind::Numerical => ExitCode::from(3),
            }
        }
    }
}

fn run(cli: &Cli) -> sip_core::Result<Value> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        return Err(Error::Invalid("tol must be a positive real".into()));
    }
    let sampler = Sampler::new(cli.seed, cli.samples);
    match &cli.cmd {
        Cmd::Eval { norm, x, y } => {
            let spec = load_norm(norm)?;
            let value = sip_eval(&spec, &parse_vector(x)?, &parse_vector(y)?)?;
            Ok(json!({ "value": value }))
        }
        Cmd::Axioms { norm } => {
            let spec = load_norm(norm)?;
            let report = sip_axiom_report(&spec, cli.samples, cli.seed)?;
            let mut doc = serde_json::to_value(&report).expect("report serializes");
            doc["max_violation"] = json!(report.max_violation());
            doc["pass"] = json!(report.max_violation() <= cli.tol);
            Ok(doc)
        }
        Cmd::CheckAa { norm, op } => {
            let spec = load_norm(norm)?;
            let a = load_op(op, &spec)?;
            let residual = adjoint_abelian_residual(&spec, &a, &sampler)?;
            Ok(json!({ "residual": residual, "adjoint_abelian": residual <= cli.tol }))
        }
        Cmd::Transversal { norm, u, v } => {
            let spec = load_norm(norm)?;
            let residual = check_transversal_normal(
                &spec,
                &parse_vector_list(u)?,
                &parse_vector_list(v)?,
                &sampler,
            )?;
            Ok(json!({ "residual": residual, "transversal_normal": residual <= cli.tol }))
        }
        Cmd::DirectSum { norm, subs } => {
            let spec = load_norm(norm)?;
            let subspaces = subs
                .iter()
                .map(|s| parse_vector_list(s))
                .collect::<sip_core::Result<Vec<_>>>()?;
            let defect = check_direct_sum(&spec, &subspaces, &sampler)?;
            Ok(json!({ "defect": defect, "splits": defect <= cli.tol }))
        }
        Cmd::Isometry { norm, op } => {
            let spec = load_norm(norm)?;
            let a = load_op(op, &spec)?;
            let residual = check_isometry(&spec, &a, &sampler)?;
            Ok(json!({ "residual": residual, "isometry": residual <= cli.tol }))
        }
        Cmd::Lemma5 { norm, op, z, x } => {
            let spec = load_norm(norm)?;
            let a = load_op(op, &spec)?;
            let residual =
                lemma_decomposition_residual(&spec, &a, &parse_vector(z)?, &parse_vector(x)?)?;
            Ok(json!({ "residual": residual, "holds": residual <= cli.tol }))
        }
        Cmd::PowerId { norm, op, z, x, n } => {
            let spec = load_norm(norm)?;
            let a = load_op(op, &spec)?;
            let residual =
                power_identity_residual(&spec, &a, &parse_vector(z)?, &parse_vector(x)?, *n)?;
            Ok(json!({ "residual": residual, "holds": residual <= cli.tol }))
        }
        Cmd::VerifyTheorem { norm, op } => {
            let spec = load_norm(norm)?;
            let a = load_op(op, &spec)?;
            let report = verify_theorem(&spec, &a, &sampler, cli.tol)?;
            Ok(serde_json::to_value(&report).expect("report serializes"))
        }
        Cmd::Auerbach {
            norm,
            restarts,
            strict,
        } => {
            let spec = load_norm(norm)?;
            let basis = auerbach_search(&spec, cli.seed, *restarts)?;
            if *strict && !basis.converged {
                return Err(Error::Numerical(format!(
                    "auerbach search did not converge (pair residual {})",
                    basis.pair_residual
                )));
            }
            Ok(json!({
                "vectors": basis.vectors.iter().map(vector_json).collect::<Vec<_>>(),
                "pair_residual": basis.pair_residual,
                "det": basis.det_value,
                "converged": basis.converged,
            }))
        }
        Cmd::Section { norm, u, v, theta } => {
            let spec = load_norm(norm)?;
            let frame = PlaneFrame::new(&spec, parse_vector(u)?, parse_vector(v)?)?;
            let point = section_point(&spec, &frame, *theta)?;
            Ok(json!({ "point": vector_json(&point) }))
        }
        Cmd::Ellipse { norm, u, v, grid } => {
            let spec = load_norm(norm)?;
            let frame = PlaneFrame::new(&spec, parse_vector(u)?, parse_vector(v)?)?;
            let residual = ellipse_fit_residual(&spec, &frame, *grid)?;
            Ok(json!({ "residual": residual, "is_centered_ellipse": residual <= cli.tol }))
        }
        Cmd::Ode { norm, u, v, x0 } => {
            let spec = load_norm(norm)?;
            let frame = PlaneFrame::new(&spec, parse_vector(u)?, parse_vector(v)?)?;
            let check = ode_residual(&spec, &frame, *x0)?;
            Ok(json!({ "residual": check.residual, "premise_ok": check.premise_ok }))
        }
        Cmd::Lipschitz {
            norm,
            x,
            mesh,
            refine,
        } => {
            let spec = load_norm(norm)?;
            let est = lipschitz_scan(&spec, &parse_vector(x)?, *mesh, *refine)?;
            Ok(json!({
                "kappa_hat": est.kappa_hat,
                "level_maxima": est.level_maxima,
                "witness_y": vector_json(&est.witness_pair.0),
                "witness_z": vector_json(&est.witness_pair.1),
                "mesh": est.mesh_size,
            }))
        }
        Cmd::Ucont { norm, x, pairs } => {
            let spec = load_norm(norm)?;
            let parsed = pairs
                .iter()
                .map(|p| {
                    let vs = parse_vector_list(p)?;
                    if vs.len() != 2 {
                        return Err(Error::Invalid(format!(
                            "--pair wants exactly two vectors, got {}",
                            vs.len()
                        )));
                    }
                    let mut it = vs.into_iter();
                    Ok((it.next().unwrap(), it.next().unwrap()))
                })
                .collect::<sip_core::Result<Vec<_>>>()?;
            let report = uniform_continuity_probe(&spec, &parse_vector(x)?, &parsed)?;
            Ok(serde_json::to_value(&report).expect("report serializes"))
        }
    }
}

fn load_norm(path: &Path) -> sip_core::Result<NormSpec<f64>> {
    NormSpec::from_json(&read(path)?)
}

fn load_op(path: &Path, spec: &NormSpec<f64>) -> sip_core::Result<RealMatrix> {
    let a = matrix_from_json::<f64>(&read(path)?)?;
    if a.nrows() != spec.dim() || a.ncols() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: a.nrows().max(a.ncols()),
        });
    }
    Ok(a)
}

fn read(path: &Path) -> sip_core::Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

fn parse_vector(text: &str) -> sip_core::Result<RealVector> {
    let coords = text
        .split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|_| Error::Invalid(format!("bad coordinate {f:?}")))
        })
        .collect::<sip_core::Result<Vec<f64>>>()?;
    if coords.is_empty() {
        return Err(Error::Invalid("empty vector".into()));
    }
    Ok(RealVector::from_vec(coords))
}

fn parse_vector_list(text: &str) -> sip_core::Result<Vec<RealVector>> {
    text.split(';').map(parse_vector).collect()
}

fn vector_json(v: &RealVector) -> Value {
    json!(v.iter().copied().collect::<Vec<f64>>())
}

fn print_text(doc: &Value) {
    match doc {
        Value::Object(map) => {
            for (key, value) in map {
                println!("{key}: {value}");
            }
        }
        other => println!("{other}"),
    }
}
