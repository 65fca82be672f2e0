//! `symctl`: command-line front end for the symctl library.
//!
//! Every subcommand prints one JSON report `{command, config, result}` on
//! stdout. Exit codes: 0 success, 1 verification or library failure, 2 usage
//! or input-format error.

mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use parse::ComplexList;

use symctl::feedback::{
    closed_loop_charpoly, generic_system, place_poles_with, verify_structure, FeedbackProblem, GenericParams,
    SolverOptions, Variant, DEFAULT_SEED,
};
use symctl::io::{self, RealizationDoc, SolutionSetDoc};
use symctl::matcore::poly_sqrt;
use symctl::purbhoo::{purbhoo_transfer, reality_experiment_on};
use symctl::schubert::{dm, geometry_identity_check};
use symctl::sysreal::{
    classify_realization, classify_transfer, is_minimal, moduli_dimension, symmetrize, transfer_mismatch,
    Realization, SymmetryType, TransferProbe,
};
use symctl::{Error, Tolerances};

#[derive(Parser)]
#[command(name = "symctl", version, about = "Control systems with symmetric, Hamiltonian and skew transfer functions")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Relative singular-value cutoff for ranks.
    #[arg(long, global = true, env = "SYMCTL_RANK_TOL", default_value_t = 1e-10)]
    rank_tol: f64,
    /// Relative residual accepted by verifications.
    #[arg(long, global = true, env = "SYMCTL_RESIDUAL_TOL", default_value_t = 1e-8)]
    residual_tol: f64,
    /// Relative distance under which two solutions are the same.
    #[arg(long, global = true, env = "SYMCTL_DEDUPE_RADIUS", default_value_t = 1e-6)]
    dedupe_radius: f64,
    /// Worker threads for the multistart solver (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Realization and transfer-function symmetry classes of a system.
    Classify {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        probe_points: usize,
    },
    /// Equivalent realization carrying the structure of a symmetry type.
    Symmetrize {
        #[arg(long)]
        system: PathBuf,
        #[arg(long = "type")]
        ty: SymmetryType,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Also write the realization document here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Dimension of the space of transfer functions of a symmetry type.
    Dimension {
        #[arg(long = "type")]
        ty: SymmetryType,
        #[arg(short = 'm')]
        m: usize,
        #[arg(short = 'n')]
        n: usize,
    },
    /// Generic witness system for skew-symmetric pole placement.
    Generic {
        #[arg(short = 'm')]
        m: usize,
        #[arg(short = 'n')]
        n: usize,
        #[arg(long)]
        variant: Variant,
        /// Comma-separated; defaults to 1, 2, …, n/2.
        #[arg(long, allow_hyphen_values = true, value_parser = parse::complex_list)]
        alphas: Option<ComplexList>,
        /// Comma-separated; defaults to the first m primes.
        #[arg(long, allow_hyphen_values = true, value_parser = parse::complex_list)]
        betas: Option<ComplexList>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Skew-symmetric feedback laws placing the given poles.
    PlacePoles {
        #[arg(long)]
        system: PathBuf,
        /// Comma-separated, `a+bi` syntax allowed.
        #[arg(long, allow_hyphen_values = true, value_parser = parse::complex_list)]
        poles: ComplexList,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Multistart count (default 64·d_m).
        #[arg(long)]
        starts: Option<usize>,
        /// Defaults to the document's symmetry tag, then to classification.
        #[arg(long)]
        variant: Option<Variant>,
        /// Skip the input/output scaling step.
        #[arg(long)]
        no_balance: bool,
    },
    /// Number of complex skew-symmetric feedback laws placing C(m,2) poles.
    Dm {
        #[arg(short = 'm')]
        m: usize,
    },
    /// The osculating-flag system, optionally with the real-feedback experiment.
    Purbhoo {
        #[arg(short = 'm')]
        m: usize,
        /// C(m,2) distinct nonzero real poles.
        #[arg(long, allow_hyphen_values = true, value_parser = parse::complex_list)]
        poles: Option<ComplexList>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        starts: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check a feedback law against a system.
    Verify {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        feedback: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "geometry,square,structure")]
        checks: Vec<Check>,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
enum Check {
    Geometry,
    Square,
    Structure,
}

/// Outcome of a subcommand: the result document and whether every
/// verification it performed passed.
struct Outcome {
    result: Value,
    passed: bool,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Self { result, passed: true }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Format(_) => 2,
        _ => 1,
    }
}

fn error_kind(e: &Error) -> String {
    let debug = format!("{e:?}");
    debug.split(['(', ' ', '{']).next().unwrap_or("Error").to_string()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = match Tolerances::new(cli.global.rank_tol, cli.global.residual_tol, cli.global.dedupe_radius) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let (name, config) = describe(&cli.command, &tol, cli.global.threads);
    let run = || dispatch(&cli.command, &tol);
    let outcome = match cli.global.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                eprintln!("error: cannot build thread pool: {e}");
                return ExitCode::from(2);
            }
        },
        None => run(),
    };
    let (body, code) = match outcome {
        Ok(out) => {
            let code = if out.passed { 0 } else { 1 };
            (json!({ "command": name, "config": config, "result": out.result }), code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            let err = json!({ "kind": error_kind(&e), "message": e.to_string() });
            (json!({ "command": name, "config": config, "error": err }), exit_code_for(&e))
        }
    };
    match serde_json::to_string_pretty(&body) {
        Ok(text) => println!("{text}"),
        Err(e) => {
            eprintln!("error: cannot serialize report: {e}");
            return ExitCode::from(1);
        }
    }
    ExitCode::from(code)
}

fn describe(cmd: &Command, tol: &Tolerances, threads: Option<usize>) -> (&'static str, Value) {
    let tolerances = json!({
        "rank_tol": tol.rank_tol,
        "residual_tol": tol.residual_tol,
        "dedupe_radius": tol.dedupe_radius,
    });
    let base = |name: &'static str, extra: Value| {
        let mut cfg = json!({ "tolerances": tolerances, "threads": threads });
        if let (Value::Object(map), Value::Object(more)) = (&mut cfg, extra) {
            map.extend(more);
        }
        (name, cfg)
    };
    match cmd {
        Command::Classify { system, seed, probe_points } => base(
            "classify",
            json!({ "system": system, "seed": seed, "probe_points": probe_points }),
        ),
        Command::Symmetrize { system, ty, seed, output } => base(
            "symmetrize",
            json!({ "system": system, "type": ty, "seed": seed, "output": output }),
        ),
        Command::Dimension { ty, m, n } => base("dimension", json!({ "type": ty, "m": m, "n": n })),
        Command::Generic { m, n, variant, alphas, betas, output } => base(
            "generic",
            json!({
                "m": m, "n": n, "variant": variant,
                "alphas": alphas.as_ref().map(|v| pairs(&v.0)),
                "betas": betas.as_ref().map(|v| pairs(&v.0)),
                "output": output,
            }),
        ),
        Command::PlacePoles { system, poles, seed, starts, variant, no_balance } => base(
            "place-poles",
            json!({
                "system": system, "poles": pairs(&poles.0), "seed": seed, "starts": starts,
                "variant": variant, "balance": !no_balance,
            }),
        ),
        Command::Dm { m } => base("dm", json!({ "m": m })),
        Command::Purbhoo { m, poles, seed, starts, output } => base(
            "purbhoo",
            json!({
                "m": m, "poles": poles.as_ref().map(|v| pairs(&v.0)), "seed": seed,
                "starts": starts, "output": output,
            }),
        ),
        Command::Verify { system, feedback, checks, samples, seed } => base(
            "verify",
            json!({
                "system": system, "feedback": feedback,
                "checks": checks.iter().map(|c| format!("{c:?}").to_lowercase()).collect::<Vec<_>>(),
                "samples": samples, "seed": seed,
            }),
        ),
    }
}

fn pairs(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn names(set: &std::collections::BTreeSet<SymmetryType>) -> Vec<String> {
    set.iter().map(|t| t.to_string()).collect()
}

fn dispatch(cmd: &Command, tol: &Tolerances) -> symctl::Result<Outcome> {
    match cmd {
        Command::Classify { system, seed, probe_points } => {
            let (r, tag) = io::read_realization(system)?;
            let probe = TransferProbe::random(&r, *probe_points, tol.residual_tol, *seed);
            let structural = classify_realization(&r, tol.residual_tol);
            let transfer = classify_transfer(&r, &probe)?;
            Ok(Outcome::ok(json!({
                "n": r.n(),
                "m": r.m(),
                "tag": tag,
                "minimal": is_minimal(&r, tol),
                "realization_symmetries": names(&structural),
                "transfer_symmetries": names(&transfer),
            })))
        }
        Command::Symmetrize { system, ty, seed, output } => {
            let (r, _) = io::read_realization(system)?;
            let out = symmetrize(&r, *ty, tol, *seed)?;
            let probe = TransferProbe::random(&r, 10, tol.residual_tol, *seed);
            let mismatch = transfer_mismatch(&r, &out, &probe)?;
            let doc = RealizationDoc::new(&out, Some(*ty));
            if let Some(path) = output {
                io::write_json(path, &doc)?;
            }
            Ok(Outcome::ok(json!({
                "realization": doc,
                "realization_symmetries": names(&classify_realization(&out, tol.residual_tol)),
                "transfer_mismatch": mismatch,
            })))
        }
        Command::Dimension { ty, m, n } => Ok(Outcome::ok(json!({ "dimension": moduli_dimension(*ty, *m, *n)? }))),
        Command::Generic { m, n, variant, alphas, betas, output } => {
            let ell = variant.ell(*n)?;
            let standard = GenericParams::standard(*m, ell);
            let params = GenericParams {
                alphas: alphas.clone().map_or(standard.alphas, |l| l.0),
                betas: betas.clone().map_or(standard.betas, |l| l.0),
            };
            let r = generic_system(*m, *n, *variant, &params)?;
            let doc = RealizationDoc::new(&r, Some(variant.symmetry()));
            if let Some(path) = output {
                io::write_json(path, &doc)?;
            }
            Ok(Outcome::ok(json!({ "ell": ell, "params": params_doc(&params), "realization": doc })))
        }
        Command::PlacePoles { system, poles, seed, starts, variant, no_balance } => {
            let (r, tag) = io::read_realization(system)?;
            let variant = resolve_variant(&r, *variant, tag, tol)?;
            let problem = FeedbackProblem::new(r, variant, poles.0.clone(), tol)?;
            let opts = SolverOptions {
                seed: *seed,
                max_starts: *starts,
                tol: *tol,
                balance: !no_balance,
                ..SolverOptions::default()
            };
            let set = place_poles_with(&problem, &opts)?;
            Ok(Outcome::ok(json!({
                "variant": variant,
                "ell": problem.ell,
                "solutions": SolutionSetDoc::from(&set),
            })))
        }
        Command::Dm { m } => {
            let d = dm(*m)?;
            // exact integer, also given as a string in case it exceeds u64
            let exact = u64::try_from(&d).map(Value::from).unwrap_or(Value::Null);
            Ok(Outcome::ok(json!({ "m": m, "dm": exact, "dm_decimal": d.to_string() })))
        }
        Command::Purbhoo { m, poles, seed, starts, output } => {
            let sys = purbhoo_transfer(*m, tol, *seed)?;
            let expected_count = u64::try_from(dm(*m)?).ok();
            let doc = RealizationDoc::new(&sys.realization, Some(SymmetryType::SkewSymmetric));
            if let Some(path) = output {
                io::write_json(path, &doc)?;
            }
            let verification = json!({
                "mcmillan_degree": sys.mcmillan_degree,
                "expected_degree": sys.m * (sys.m - 1),
                "real": sys.realization.max_imag() == 0.0,
                "realization_symmetries": names(&classify_realization(&sys.realization, tol.residual_tol)),
            });
            let mut result = json!({ "system": doc, "verification": verification, "dm": expected_count });
            let mut passed = true;
            if let Some(poles) = poles {
                if poles.0.iter().any(|z| z.im != 0.0) {
                    return Err(Error::InvalidParams("the experiment takes real poles".into()));
                }
                let real: Vec<f64> = poles.0.iter().map(|z| z.re).collect();
                let opts = SolverOptions {
                    seed: *seed,
                    max_starts: *starts,
                    tol: *tol,
                    ..SolverOptions::default()
                };
                let set = reality_experiment_on(&sys, &real, &opts)?;
                let count_matches = expected_count == Some(set.len() as u64);
                passed = count_matches && set.all_real();
                result["experiment"] = json!({
                    "count": set.len(),
                    "count_matches_dm": count_matches,
                    "all_real": set.all_real(),
                    "solutions": SolutionSetDoc::from(&set),
                });
            }
            Ok(Outcome { result, passed })
        }
        Command::Verify { system, feedback, checks, samples, seed } => {
            let (r, tag) = io::read_realization(system)?;
            let f = io::read_feedback(feedback)?;
            let variant = resolve_variant(&r, None, tag, tol)?;
            let mut report = serde_json::Map::new();
            let mut passed = true;
            for check in checks {
                let (key, entry) = match check {
                    Check::Geometry => {
                        let probe = TransferProbe::random(&r, *samples, tol.residual_tol, *seed);
                        let rep = geometry_identity_check(&r, &f, &probe.sample_points)?;
                        let pass = rep.max_deviation <= tol.residual_tol;
                        ("geometry", json!({ "pass": pass, "max_deviation": rep.max_deviation }))
                    }
                    Check::Square => square_check(&r, &f, variant, tol)?,
                    Check::Structure => match verify_structure(&r, &f, variant, tol) {
                        Ok(rep) => ("structure", json!({ "pass": true, "report": rep })),
                        Err(Error::StructureViolated(msg)) => ("structure", json!({ "pass": false, "message": msg })),
                        Err(e) => return Err(e),
                    },
                };
                passed &= entry["pass"].as_bool().unwrap_or(false);
                report.insert(key.to_string(), entry);
            }
            Ok(Outcome {
                result: json!({ "variant": variant, "pass": passed, "checks": report }),
                passed,
            })
        }
    }
}

fn params_doc(p: &GenericParams) -> Value {
    json!({ "alphas": pairs(&p.alphas), "betas": pairs(&p.betas) })
}

/// Square law (skew-symmetric) or parity law (skew-Hamiltonian) of `φ`.
fn square_check(r: &Realization, f: &symctl::SkewFeedback, variant: Variant, tol: &Tolerances) -> symctl::Result<(&'static str, Value)> {
    let phi = closed_loop_charpoly(r, f)?;
    let entry = match variant {
        Variant::SkewSymmetric => match poly_sqrt(&phi, tol) {
            Ok(q) => {
                let residual = phi.relative_distance(&(&q * &q));
                json!({ "pass": residual <= tol.residual_tol, "law": "square", "residual": residual })
            }
            Err(e) => json!({ "pass": false, "law": "square", "message": e.to_string() }),
        },
        Variant::SkewHamiltonian => {
            let mirrored = if r.n() % 2 == 1 { -phi.reflect() } else { phi.reflect() };
            let residual = phi.relative_distance(&mirrored);
            json!({ "pass": residual <= tol.residual_tol, "law": "parity", "residual": residual })
        }
    };
    Ok(("square", entry))
}

fn resolve_variant(
    r: &Realization,
    explicit: Option<Variant>,
    tag: Option<SymmetryType>,
    tol: &Tolerances,
) -> symctl::Result<Variant> {
    if let Some(v) = explicit {
        return Ok(v);
    }
    match tag {
        Some(SymmetryType::SkewSymmetric) => return Ok(Variant::SkewSymmetric),
        Some(SymmetryType::SkewHamiltonian) => return Ok(Variant::SkewHamiltonian),
        _ => {}
    }
    let classes = classify_realization(r, tol.residual_tol);
    if classes.contains(&SymmetryType::SkewSymmetric) {
        Ok(Variant::SkewSymmetric)
    } else if classes.contains(&SymmetryType::SkewHamiltonian) {
        Ok(Variant::SkewHamiltonian)
    } else {
        Err(Error::SymmetryMismatch(
            "system is realized neither skew-symmetric nor skew-Hamiltonian".into(),
        ))
    }
}
