//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on a domain error (a JSON object
//! `{"error": kind, "message": text}` is written to standard error), 2 on a
//! usage error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::bases::{is_mu_pair, is_orthonormal, Basis, MuPair};
use crate::equivalence::{apply_script, haagerup_fingerprint, standard_form};
use crate::error::{Error, Result};
use crate::families::{make_family_pair, FamilyId, FamilyParams, ParamSet};
use crate::io;
use crate::linalg::{CMatrix, Tolerance};
use crate::search::{find_extension_basis, OrthoGraph, SearchConfig};

#[derive(Debug, Parser)]
#[command(name = "mub6", version, about = "Mutually unbiased product-basis pairs in dimension six")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a family member as a pair JSON document.
    Construct {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check orthonormality and mutual unbiasedness of a pair.
    Verify {
        #[command(flatten)]
        source: PairSource,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce a pair to standard form {I, H}, or replay a script on it.
    Reduce {
        #[command(flatten)]
        source: PairSource,
        /// Replay this script instead of the built-in reduction.
        #[arg(long, requires = "pair")]
        script: Option<PathBuf>,
        #[arg(long)]
        emit_script: Option<PathBuf>,
        #[arg(long)]
        emit_pair: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Haagerup fingerprint of a Hadamard matrix.
    Fingerprint {
        #[command(flatten)]
        source: PairSource,
        /// Matrix file (text format, JSON rows, or basis wrapper).
        #[arg(long, conflicts_with_all = ["family", "pair"])]
        matrix: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for vectors unbiased to both members, and for a third basis.
    SearchExtend {
        #[command(flatten)]
        source: PairSource,
        /// Defaults to 20000 in dimension 6 and 500 otherwise.
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        max_iters: usize,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Orthogonality graph of a set of vectors (search output or bare array).
    OrthoGraph {
        #[arg(long)]
        vectors: PathBuf,
        #[arg(long, default_value_t = 1e-7)]
        ortho_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct FamilyArgs {
    #[arg(long, value_parser = parse_family)]
    family: FamilyId,
    #[arg(long, allow_negative_numbers = true)]
    xi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    zeta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    chi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    tau: Option<f64>,
}

#[derive(Debug, Args)]
struct PairSource {
    #[arg(long, value_parser = parse_family, conflicts_with = "pair")]
    family: Option<FamilyId>,
    #[arg(long, allow_negative_numbers = true)]
    xi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    zeta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    chi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    tau: Option<f64>,
    #[arg(long)]
    pair: Option<PathBuf>,
}

fn parse_family(s: &str) -> std::result::Result<FamilyId, String> {
    s.parse().map_err(|_| format!("expected one of P0, P1, P2, P3, got '{s}'"))
}

/// Distinguishes bad invocations (exit 2) from domain failures (exit 1).
enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(Failure::Usage(msg.into()))
}

fn param_set(xi: Option<f64>, eta: Option<f64>, zeta: Option<f64>, chi: Option<f64>, sigma: Option<f64>, tau: Option<f64>) -> ParamSet {
    ParamSet {
        xi,
        eta,
        zeta,
        chi,
        sigma,
        tau,
    }
}

fn family_params(id: FamilyId, set: &ParamSet) -> CliResult<FamilyParams> {
    let given = [
        ("xi", set.xi),
        ("eta", set.eta),
        ("zeta", set.zeta),
        ("chi", set.chi),
        ("sigma", set.sigma),
        ("tau", set.tau),
    ];
    let allowed: &[&str] = match id {
        FamilyId::P0 | FamilyId::P2 => &[],
        FamilyId::P1 => &["xi", "eta"],
        FamilyId::P3 => &["zeta", "chi", "sigma", "tau"],
    };
    if let Some((name, _)) = given.iter().find(|(n, v)| v.is_some() && !allowed.contains(n)) {
        return usage(format!("--{name} does not apply to family {id}"));
    }
    Ok(FamilyParams::from_parts(id, set)?)
}

impl FamilyArgs {
    fn params(&self) -> CliResult<FamilyParams> {
        let set = param_set(self.xi, self.eta, self.zeta, self.chi, self.sigma, self.tau);
        family_params(self.family, &set)
    }
}

enum Source {
    Family(FamilyParams),
    File(PathBuf),
}

impl PairSource {
    fn resolve(&self) -> CliResult<Source> {
        let set = param_set(self.xi, self.eta, self.zeta, self.chi, self.sigma, self.tau);
        match (&self.family, &self.pair) {
            (Some(id), None) => Ok(Source::Family(family_params(*id, &set)?)),
            (None, Some(path)) => {
                if set != ParamSet::default() {
                    return usage("angle flags need --family");
                }
                Ok(Source::File(path.clone()))
            }
            _ => usage("exactly one of --family or --pair is required"),
        }
    }

    fn load(&self, tol: &Tolerance) -> CliResult<MuPair> {
        match self.resolve()? {
            Source::Family(params) => Ok(make_family_pair(params, tol)?),
            Source::File(path) => Ok(io::pair_from_json(&read(&path)?, tol)?),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Parses `args` (program name first) and runs the command, writing to the
/// process's standard streams.
pub fn run(args: &[String]) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with(args: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(rendered.as_bytes())
            } else {
                stderr.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
        Err(Failure::Domain(e)) => {
            let body = json!({"error": e.kind(), "message": e.to_string()});
            let _ = writeln!(stderr, "{body}");
            1
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> CliResult<i32> {
    let tol = Tolerance::default();
    match command {
        Command::Construct { family, out } => {
            let pair = make_family_pair(family.params()?, &tol)?;
            emit(&out, &io::pair_to_json(&pair), stdout)?;
            Ok(0)
        }
        Command::Verify { source, out } => verify(&source, &out, &tol, stdout),
        Command::Reduce {
            source,
            script,
            emit_script,
            emit_pair,
            out,
        } => {
            let (pair, script) = match (source.resolve()?, script) {
                (Source::Family(params), _) => standard_form(params, &tol)?,
                (Source::File(path), Some(script_path)) => {
                    let pair = io::pair_from_json(&read(&path)?, &tol)?;
                    let script = io::script_from_json(&read(&script_path)?)?;
                    (apply_script(&pair, &script, &tol)?, script)
                }
                (Source::File(path), None) => {
                    let pair = io::pair_from_json(&read(&path)?, &tol)?;
                    let Some(prov) = pair.provenance.clone() else {
                        return usage("pair has no family; pass --script to replay one");
                    };
                    let (_, script) = standard_form(prov.params, &tol)?;
                    (apply_script(&pair, &script, &tol)?, script)
                }
            };
            let pair_text = io::pair_to_json(&pair);
            let script_text = io::script_to_json(&script);
            if let Some(p) = &emit_pair {
                std::fs::write(p, &pair_text).map_err(Error::from)?;
            }
            if let Some(p) = &emit_script {
                std::fs::write(p, &script_text).map_err(Error::from)?;
            }
            let combined = json!({
                "pair": serde_json::from_str::<serde_json::Value>(&pair_text).map_err(Error::from)?,
                "script": serde_json::from_str::<serde_json::Value>(&script_text).map_err(Error::from)?,
            });
            emit(&out, &format!("{combined}\n"), stdout)?;
            Ok(0)
        }
        Command::Fingerprint { source, matrix, out } => {
            let h = match matrix {
                Some(path) => io::read_matrix_file(&path)?,
                None => match source.resolve()? {
                    Source::Family(params) => standard_form(params, &tol)?.0.second.into_matrix(),
                    Source::File(path) => {
                        let pair = io::pair_from_json(&read(&path)?, &tol)?;
                        hadamard_member(&pair, &tol)?
                    }
                },
            };
            let fp = haagerup_fingerprint(&h, &tol)?;
            emit(&out, &io::fingerprint_to_json(&fp), stdout)?;
            Ok(0)
        }
        Command::SearchExtend {
            source,
            restarts,
            seed,
            max_iters,
            threads,
            out,
        } => {
            let pair = source.load(&tol)?;
            let default_restarts = if pair.dim() == 6 { 20_000 } else { 500 };
            let cfg = SearchConfig {
                restarts: restarts.unwrap_or(default_restarts),
                master_seed: seed,
                max_iters,
                ..SearchConfig::default()
            };
            let result = match threads {
                None => find_extension_basis(&pair, &cfg, &tol)?,
                Some(0) => return usage("--threads must be positive"),
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Failure::Usage(e.to_string()))?
                    .install(|| find_extension_basis(&pair, &cfg, &tol))?,
            };
            emit(&out, &io::search_to_json(&result, seed), stdout)?;
            Ok(0)
        }
        Command::OrthoGraph { vectors, ortho_tol, out } => {
            if !(ortho_tol.is_finite() && ortho_tol > 0.0) {
                return usage("--ortho-tol must be positive");
            }
            let vs = io::vectors_from_json(&read(&vectors)?)?;
            if let Some(v) = vs.iter().find(|v| v.dim() != vs[0].dim()) {
                return Err(Error::DimensionMismatch {
                    left: vs[0].dim(),
                    right: v.dim(),
                }
                .into());
            }
            let g = OrthoGraph::from_vectors(&vs, ortho_tol);
            let clique = g.max_clique(vs.first().map_or(0, |v| v.dim()));
            let mut doc = serde_json::to_value(io::GraphDoc::from_graph(&g)).map_err(Error::from)?;
            doc["max_clique"] = json!(clique.len());
            emit(&out, &pretty(&doc), stdout)?;
            Ok(0)
        }
    }
}

/// The member of `{I, H}` (in either order) that is a Hadamard matrix.
fn hadamard_member(pair: &MuPair, tol: &Tolerance) -> Result<CMatrix> {
    [&pair.second, &pair.first]
        .into_iter()
        .map(|b| b.matrix())
        .find(|m| m.is_hadamard(tol))
        .cloned()
        .ok_or(Error::NotHadamard)
}

fn verify(source: &PairSource, out: &Option<PathBuf>, tol: &Tolerance, stdout: &mut dyn Write) -> CliResult<i32> {
    let (first, second) = match source.resolve()? {
        Source::Family(params) => {
            let p = make_family_pair(params, tol)?;
            (p.first, p.second)
        }
        Source::File(path) => {
            // unbiasedness is what is being checked, so read without it
            let doc: io::PairDoc = serde_json::from_str(&read(&path)?).map_err(Error::from)?;
            (
                Basis::from_matrix(doc.first.to_matrix()?, tol)?,
                Basis::from_matrix(doc.second.to_matrix()?, tol)?,
            )
        }
    };
    let report = is_mu_pair(&first, &second, tol)?;
    let pass = report.is_mu && is_orthonormal(&first, tol) && is_orthonormal(&second, tol);
    let doc = json!({
        "result": if pass { "pass" } else { "fail" },
        "dim": first.dim(),
        "worst_deviation": report.worst_deviation,
        "worst_index": [report.worst_index.0, report.worst_index.1],
        "mu_tol": tol.mu_tol,
    });
    emit(out, &pretty(&doc), stdout)?;
    if pass {
        Ok(0)
    } else {
        Err(Error::NotMutuallyUnbiased(report.worst_deviation).into())
    }
}
