//! `arrconn`: command-line front end for arrangement connections.
//!
//! Exit codes: 0 when every check passes, 1 when a mathematical check fails,
//! 2 for input errors, 3 when a resource cap is exceeded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use arrconn::arrangement::{
    center_rank_essential, irreducible_components, irreducible_decomposition, is_irreducible,
    is_irreducible_flat, Arrangement, ArrangementError, Flat,
};
use arrconn::connection::{
    check_flat, check_torsion_free, check_weight_constraints, flat_label, weights, ConnectionError,
};
use arrconn::holonomy::{
    central_loop_spectrum_check, holonomy_report, HolonomyError, HolonomyOptions, Irreducibility,
};
use arrconn::io::{self, IoError};
use arrconn::lauricella::{recover_parameters, reduced_residues, LauricellaError, ParameterVector};
use arrconn::numkernel::{parse_rational, GaussianRational};
use arrconn::pkcriteria::{
    alpha0, fs_volumes, pk_exists, signature_formula_exact, subset_diagnostics, AngleVector,
    PkError, DEFAULT_PK_TOL,
};
use clap::{Parser, Subcommand, ValueEnum};
use num::complex::Complex64;
use num::BigRational;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(
    name = "arrconn",
    version,
    about = "Flat logarithmic connections on hyperplane-arrangement complements"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit the structured JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Numerical tolerance (meaning depends on the subcommand).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for basepoints and loop directions.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Intersection lattice, irreducible flats and decomposition.
    Lattice {
        /// Arrangement (or connection) JSON file.
        #[arg(long)]
        arrangement: PathBuf,
    },
    /// Torsion-freeness, flatness, weights and weight constraints.
    Check {
        /// Connection JSON file.
        #[arg(long)]
        connection: PathBuf,
    },
    /// Emit the reduced Lauricella connection on the braid arrangement as a connection file.
    Lauricella {
        /// Dimension n.
        #[arg(long)]
        n: usize,
        /// Parameters a_1,…,a_{n+1} as rationals or decimals.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        a: Vec<String>,
    },
    /// Recover the Lauricella parameters of a connection on the braid arrangement.
    Recover {
        /// Connection JSON file.
        #[arg(long)]
        connection: PathBuf,
    },
    /// Existence criteria for cone angles 2πα_i.
    PkExists {
        /// Angles α_1,…,α_{n+1}.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        alpha: Vec<String>,
    },
    /// Signature (p, q) of the invariant Hermitian form for parameters a.
    Signature {
        /// Parameters a_1,…,a_{n+1}.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        a: Vec<String>,
    },
    /// Fubini–Study and link volumes for cone angles α.
    Volume {
        /// Angles α_1,…,α_{n+1}.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        alpha: Vec<String>,
    },
    /// Numerical holonomy: generators, invariant forms, irreducibility, central spectra.
    Holonomy {
        /// Connection JSON file.
        #[arg(long)]
        connection: PathBuf,
        /// Which loops to transport.
        #[arg(long, value_enum, default_value_t = LoopSet::All)]
        loops: LoopSet,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum LoopSet {
    Meridians,
    Central,
    All,
}

/// Failure modes mapped to exit codes.
#[derive(Debug)]
enum Failure {
    Input(String),
    Cap(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Input(_) => 2,
            Self::Cap(_) => 3,
        }
    }
}

fn from_arrangement_error(e: &ArrangementError) -> Failure {
    match e {
        ArrangementError::CapExceeded { .. } => Failure::Cap(e.to_string()),
        _ => Failure::Input(e.to_string()),
    }
}

impl From<ArrangementError> for Failure {
    fn from(e: ArrangementError) -> Self {
        from_arrangement_error(&e)
    }
}

impl From<ConnectionError> for Failure {
    fn from(e: ConnectionError) -> Self {
        match &e {
            ConnectionError::Arrangement(inner) => from_arrangement_error(inner),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Arrangement(inner) => inner.into(),
            IoError::Connection(inner) => inner.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<HolonomyError> for Failure {
    fn from(e: HolonomyError) -> Self {
        match e {
            HolonomyError::Connection(inner) => inner.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

/// A finished report: text and JSON renderings and the pass/fail status.
struct Report {
    text: String,
    json: Value,
    pass: bool,
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn rationals(list: &[String]) -> Result<Vec<BigRational>, Failure> {
    list.iter()
        .map(|s| parse_rational(s).map_err(|e| Failure::Input(e.to_string())))
        .collect()
}

fn sorted_flats(arrangement: &Arrangement) -> Result<Vec<Flat>, Failure> {
    let mut flats = arrangement.lattice()?.flats().to_vec();
    flats.sort_by(|a, b| {
        a.codim()
            .cmp(&b.codim())
            .then_with(|| a.containing_set().cmp(b.containing_set()))
    });
    Ok(flats)
}

fn cmd_lattice(path: &Path) -> Result<Report, Failure> {
    let arrangement = io::parse_arrangement(&read(path)?)?;
    let flats = sorted_flats(&arrangement)?;
    let cre = center_rank_essential(&arrangement);
    let blocks: Vec<Vec<String>> = irreducible_decomposition(&arrangement)
        .iter()
        .map(|b| {
            b.iter()
                .map(|&i| arrangement.hyperplane(i).id.clone())
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    let mut text = String::new();
    let _ = writeln!(
        text,
        "dimension {}, {} hyperplanes, rank {}, {}, {}",
        arrangement.dimension(),
        arrangement.len(),
        cre.rank,
        if cre.essential {
            "essential"
        } else {
            "not essential"
        },
        if is_irreducible(&arrangement) {
            "irreducible"
        } else {
            "reducible"
        }
    );
    let block_text: Vec<String> = blocks
        .iter()
        .map(|b| format!("{{{}}}", b.join(",")))
        .collect();
    let _ = writeln!(
        text,
        "decomposition: {}",
        if block_text.is_empty() {
            "-".into()
        } else {
            block_text.join(" ⊕ ")
        }
    );
    let _ = writeln!(text, "{} flats", flats.len());
    let _ = writeln!(
        text,
        "{:<6} {:<40} {:<12} components",
        "codim", "flat", "irreducible"
    );
    for flat in &flats {
        let label = flat_label(&arrangement, flat);
        let irreducible = !flat.is_ambient() && is_irreducible_flat(&arrangement, flat);
        let components: Vec<String> = if flat.is_ambient() {
            Vec::new()
        } else {
            irreducible_components(&arrangement, flat)?
                .iter()
                .map(|c| flat_label(&arrangement, c))
                .collect()
        };
        let _ = writeln!(
            text,
            "{:<6} {:<40} {:<12} {}",
            flat.codim(),
            label,
            if flat.is_ambient() {
                "-"
            } else if irreducible {
                "yes"
            } else {
                "no"
            },
            components.join(" ")
        );
        let ids: Vec<String> = flat
            .containing_set()
            .iter()
            .map(|&i| arrangement.hyperplane(i).id.clone())
            .collect();
        rows.push(json!({
            "codim": flat.codim(),
            "hyperplanes": ids,
            "irreducible": irreducible,
            "components": components,
        }));
    }
    let json = json!({
        "dimension": arrangement.dimension(),
        "hyperplanes": arrangement.len(),
        "rank": cre.rank,
        "essential": cre.essential,
        "irreducible": is_irreducible(&arrangement),
        "decomposition": blocks,
        "flat_count": flats.len(),
        "flats": rows,
    });
    Ok(Report {
        text,
        json,
        pass: true,
    })
}

fn cmd_check(path: &Path) -> Result<Report, Failure> {
    let c = io::parse_connection(&read(path)?)?;
    let mut failures: Vec<String> = Vec::new();
    let tf = check_torsion_free(&c)?;
    if !tf.torsion_free {
        failures.push(format!(
            "torsion_free: A_H does not vanish on H for {}",
            tf.violators.join(", ")
        ));
    }
    let flat = check_flat(&c)?;
    if let Some(v) = flat.violations.first() {
        failures.push(format!(
            "flat: commutator [A_L, A_H] ≠ 0 at L = {}, H = {}",
            v.flat_label, v.hyperplane
        ));
    }
    let table = weights(&c)?;
    if !table.nonzero_weights {
        failures.push(format!(
            "nonzero_weights: zero weight at {}",
            table.zero_weight.join(", ")
        ));
    }
    let (constraints_json, constraints_text) = match check_weight_constraints(&c) {
        Ok(r) => {
            if !r.all_zero {
                let bad: Vec<&str> = r
                    .entries
                    .iter()
                    .filter(|e| !e.residual.is_zero())
                    .map(|e| e.h0.as_str())
                    .collect();
                failures.push(format!(
                    "linear_constraints: nonzero residual for H0 = {}",
                    bad.join(", ")
                ));
            }
            let rows: Vec<Value> = r
                .entries
                .iter()
                .map(|e| json!({"h0": e.h0, "lhs": e.lhs.to_string(), "rhs": e.rhs.to_string(), "residual": e.residual.to_string()}))
                .collect();
            (
                json!({"applicable": true, "all_zero": r.all_zero, "entries": rows}),
                if r.all_zero { "pass" } else { "FAIL" }.to_string(),
            )
        }
        Err(ConnectionError::NotEssentialIrreducible) => (
            json!({"applicable": false, "reason": "arrangement is not essential and irreducible of dimension ≥ 2"}),
            "not applicable (arrangement not essential irreducible)".to_string(),
        ),
        Err(e) => return Err(e.into()),
    };
    let weight_rows: Vec<Value> = table
        .entries
        .iter()
        .map(|e| json!({"flat": e.label, "weight": e.weight.to_string()}))
        .collect();
    let mut text = String::new();
    let verdict = |ok: bool| if ok { "pass" } else { "FAIL" };
    let _ = writeln!(text, "torsion_free       {}", verdict(tf.torsion_free));
    let _ = writeln!(text, "flat               {}", verdict(flat.flat));
    let _ = writeln!(
        text,
        "nonzero_weights    {}",
        verdict(table.nonzero_weights)
    );
    let _ = writeln!(text, "linear_constraints {constraints_text}");
    let _ = writeln!(text, "weights:");
    for e in &table.entries {
        let _ = writeln!(text, "  {:<40} {}", e.label, e.weight);
    }
    if let Some(first) = failures.first() {
        let _ = writeln!(text, "first failure: {first}");
    }
    let json = json!({
        "torsion_free": {"pass": tf.torsion_free, "violators": tf.violators},
        "flat": {"pass": flat.flat, "violations": flat.violations.iter().map(|v| json!({"flat": v.flat_label, "hyperplane": v.hyperplane})).collect::<Vec<_>>()},
        "nonzero_weights": {"pass": table.nonzero_weights, "zero_weight": table.zero_weight},
        "weight_table": weight_rows,
        "linear_constraints": constraints_json,
        "first_failure": failures.first(),
        "pass": failures.is_empty(),
    });
    Ok(Report {
        text,
        json,
        pass: failures.is_empty(),
    })
}

fn cmd_lauricella(n: usize, a: &[String]) -> Result<Report, Failure> {
    if n == 0 {
        return Err(Failure::Input("--n must be at least 1".into()));
    }
    if a.len() != n + 1 {
        return Err(Failure::Input(format!(
            "--a needs n + 1 = {} parameters, found {}",
            n + 1,
            a.len()
        )));
    }
    let values = rationals(a)?
        .into_iter()
        .map(GaussianRational::from_rational)
        .collect();
    let params = ParameterVector::new(values).map_err(|e| Failure::Input(e.to_string()))?;
    let c = reduced_residues(&params);
    let json = io::connection_to_value(&c)?;
    let text = serde_json::to_string_pretty(&json).expect("JSON values always serialize") + "\n";
    Ok(Report {
        text,
        json,
        pass: true,
    })
}

fn cmd_recover(path: &Path) -> Result<Report, Failure> {
    let c = io::parse_connection(&read(path)?)?;
    match recover_parameters(&c) {
        Ok(r) => {
            let values: Vec<String> = r
                .parameters
                .values()
                .iter()
                .map(ToString::to_string)
                .collect();
            let text = format!(
                "a = {}\na_infinity = {}{}\n",
                r.parameters,
                r.parameters.a_infinity(),
                if r.ambiguous {
                    "\n(ambiguous: only the sum a_1 + a_2 is determined for n = 1)"
                } else {
                    ""
                }
            );
            let json = json!({"lauricella": true, "a": values, "a_infinity": r.parameters.a_infinity().to_string(), "ambiguous": r.ambiguous});
            Ok(Report {
                text,
                json,
                pass: true,
            })
        }
        Err(LauricellaError::Connection(e)) => Err(e.into()),
        Err(LauricellaError::Arrangement(e)) => Err(e.into()),
        Err(e) => Ok(Report {
            text: format!("not a Lauricella connection: {e}\n"),
            json: json!({"lauricella": false, "reason": e.to_string()}),
            pass: false,
        }),
    }
}

fn pk_failure(e: PkError) -> Failure {
    Failure::Input(e.to_string())
}

fn cmd_pk_exists(alpha: &[String], tol: f64) -> Result<Report, Failure> {
    let angles = AngleVector::Exact(rationals(alpha)?);
    let report = pk_exists(&angles, tol).map_err(pk_failure)?;
    let table = subset_diagnostics(&angles, tol);
    let mut text = String::new();
    let _ = writeln!(text, "exists: {}", if report.exists { "yes" } else { "no" });
    if let Some(f) = &report.failed {
        let _ = writeln!(
            text,
            "failed condition: {} ({})",
            f.name(),
            serde_json::to_string(f).expect("serializable")
        );
    }
    let _ = writeln!(text, "sum of fractional parts: {}", report.frac_sum);
    if report.tolerance_ambiguous {
        let _ = writeln!(text, "warning: a decision fell within the tolerance");
    }
    let _ = writeln!(text, "cone angles β_ij = α_i + α_j − 1:");
    for c in &report.cone_angles {
        let _ = writeln!(text, "  ({}, {})  {}", c.i, c.j, c.beta);
    }
    let json = json!({"report": report, "subsets": table});
    Ok(Report {
        text,
        json,
        pass: report.exists,
    })
}

fn cmd_signature(a: &[String]) -> Result<Report, Failure> {
    let values = rationals(a)?;
    if values.len() < 2 {
        return Err(Failure::Input("--a needs at least 2 parameters".into()));
    }
    let s = signature_formula_exact(&values);
    let text = format!(
        "n = {}\n(p, q) = ({}, {})\nkernel dimension = {}\nregion = {:?}\na_infinity = {}\n",
        values.len() - 1,
        s.p,
        s.q,
        s.kernel_dim,
        s.region,
        s.a_infinity
    );
    let json = serde_json::to_value(&s).expect("serializable");
    Ok(Report {
        text,
        json,
        pass: true,
    })
}

fn cmd_volume(alpha: &[String]) -> Result<Report, Failure> {
    let values = rationals(alpha)?;
    if values.len() < 2 {
        return Err(Failure::Input("--alpha needs at least 2 angles".into()));
    }
    let n = values.len() - 1;
    let a0 = alpha0(&AngleVector::Exact(values));
    match fs_volumes(a0, n) {
        Ok(v) => Ok(Report {
            text: format!(
                "alpha_0 = {a0}\nvol_FS = {}\nvol_link = {}\n",
                v.vol_fs, v.vol_sphere
            ),
            json: json!({"alpha0": a0, "n": n, "vol_fs": v.vol_fs, "vol_sphere": v.vol_sphere}),
            pass: true,
        }),
        Err(PkError::OriginAtInfiniteDistance(x)) => Ok(Report {
            text: format!(
                "alpha_0 = {x} ≤ 0: the origin is at infinite distance; no finite volume\n"
            ),
            json: json!({"alpha0": x, "n": n, "vol_fs": Value::Null, "vol_sphere": Value::Null}),
            pass: false,
        }),
        Err(e) => Err(pk_failure(e)),
    }
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn cmd_holonomy(path: &Path, loops: LoopSet, tol: f64, seed: u64) -> Result<Report, Failure> {
    let c = io::parse_connection(&read(path)?)?;
    let mut json = serde_json::Map::new();
    let mut text = String::new();
    let mut pass = true;
    if c.arrangement().is_empty() {
        return Err(Failure::Input("the arrangement has no hyperplanes".into()));
    }
    if matches!(loops, LoopSet::Meridians | LoopSet::All) {
        let opts = HolonomyOptions {
            seed,
            ..HolonomyOptions::default()
        };
        let rep = holonomy_report(&c, &opts)?;
        let generator = |g: &arrconn::holonomy::GeneratorHolonomy| {
            json!({
                "label": g.label,
                "hyperplane": g.hyperplane,
                "matrix": io::cmatrix_to_value(&g.matrix),
                "determinant": complex_json(g.matrix.determinant()),
                "err": g.err,
                "clearance": g.clearance,
            })
        };
        let _ = writeln!(
            text,
            "basepoint: {}",
            fmt_vec(rep.basepoint.iter().map(|z| z.re))
        );
        let _ = writeln!(
            text,
            "{:<24} {:>12} {:>12} {:>10}",
            "loop", "det (re)", "det (im)", "err"
        );
        for g in rep.meridians.iter().chain(std::iter::once(&rep.central)) {
            let d = g.matrix.determinant();
            let _ = writeln!(
                text,
                "{:<24} {:>12.8} {:>12.8} {:>10.2e}",
                g.label, d.re, d.im, g.err
            );
        }
        let _ = writeln!(
            text,
            "invariant Hermitian forms: {}",
            rep.invariant_forms.len()
        );
        match &rep.signature {
            Some(s) => {
                let _ = writeln!(
                    text,
                    "signature (up to sign): ({}, {}), kernel {}",
                    s.p, s.q, s.kernel_dim
                );
            }
            None => {
                let _ = writeln!(
                    text,
                    "signature: not reported (form space is not one-dimensional)"
                );
            }
        }
        let verdict = match rep.irreducibility.verdict {
            Irreducibility::Irreducible => "irreducible",
            Irreducibility::Reducible => "reducible",
            Irreducibility::Ambiguous => "ambiguous",
        };
        let _ = writeln!(
            text,
            "irreducibility: {verdict} (algebra dimension {})",
            rep.irreducibility.algebra_dim
        );
        let line = rep
            .irreducibility
            .invariant_line
            .as_ref()
            .map(|v| v.iter().map(|z| complex_json(*z)).collect::<Vec<_>>());
        if let Some(v) = &rep.irreducibility.invariant_line {
            let _ = writeln!(text, "invariant line: {}", fmt_vec(v.iter().map(|z| z.re)));
        }
        let _ = writeln!(text, "max err: {:.3e}", rep.max_err);
        json.insert(
            "basepoint".into(),
            json!(rep
                .basepoint
                .iter()
                .map(|z| complex_json(*z))
                .collect::<Vec<_>>()),
        );
        json.insert(
            "meridians".into(),
            Value::Array(rep.meridians.iter().map(generator).collect()),
        );
        json.insert("central".into(), generator(&rep.central));
        json.insert(
            "invariant_forms".into(),
            Value::Array(
                rep.invariant_forms
                    .iter()
                    .map(|f| io::cmatrix_to_value(f.matrix()))
                    .collect(),
            ),
        );
        json.insert(
            "signature".into(),
            rep.signature.as_ref().map_or(Value::Null, |s| {
                json!({"p": s.p, "q": s.q, "kernel_dim": s.kernel_dim, "eigenvalues": s.eigenvalues, "up_to_sign": true})
            }),
        );
        json.insert(
            "irreducibility".into(),
            json!({"verdict": verdict, "algebra_dim": rep.irreducibility.algebra_dim, "word_length": rep.irreducibility.word_length, "invariant_line": line}),
        );
        json.insert("max_err".into(), json!(rep.max_err));
    }
    if matches!(loops, LoopSet::Central | LoopSet::All) {
        let a = c.arrangement();
        let center = a.flat_of(&(0..a.len()).collect::<Vec<_>>());
        let rep = central_loop_spectrum_check(&c, &center, tol, seed)?;
        pass &= rep.pass;
        let _ = writeln!(text, "central loops at {}:", rep.flat);
        let mut entries = Vec::new();
        for e in &rep.entries {
            let _ = writeln!(
                text,
                "  {:<40} max deviation {:.3e}  {}",
                e.label,
                e.max_deviation,
                if e.pass { "pass" } else { "FAIL" }
            );
            entries.push(json!({
                "label": e.label,
                "expected": e.expected.iter().map(|z| complex_json(*z)).collect::<Vec<_>>(),
                "computed": e.computed.iter().map(|z| complex_json(*z)).collect::<Vec<_>>(),
                "max_deviation": e.max_deviation,
                "err": e.err,
                "pass": e.pass,
            }));
        }
        json.insert(
            "central_spectra".into(),
            json!({"flat": rep.flat, "entries": entries, "pass": rep.pass}),
        );
    }
    json.insert("pass".into(), json!(pass));
    Ok(Report {
        text,
        json: Value::Object(json),
        pass,
    })
}

fn fmt_vec(values: impl Iterator<Item = f64>) -> String {
    let parts: Vec<String> = values.map(|x| format!("{x}")).collect();
    format!("({})", parts.join(", "))
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    match &cli.command {
        Command::Lattice { arrangement } => cmd_lattice(arrangement),
        Command::Check { connection } => cmd_check(connection),
        Command::Lauricella { n, a } => cmd_lauricella(*n, a),
        Command::Recover { connection } => cmd_recover(connection),
        Command::PkExists { alpha } => cmd_pk_exists(alpha, cli.tol.unwrap_or(DEFAULT_PK_TOL)),
        Command::Signature { a } => cmd_signature(a),
        Command::Volume { alpha } => cmd_volume(alpha),
        Command::Holonomy { connection, loops } => {
            cmd_holonomy(connection, *loops, cli.tol.unwrap_or(1e-6), cli.seed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(f) => {
            let (Failure::Input(msg) | Failure::Cap(msg)) = &f;
            eprintln!("error: {msg}");
            return ExitCode::from(f.code());
        }
    };
    let output = if cli.json || matches!(cli.command, Command::Lauricella { .. }) {
        serde_json::to_string_pretty(&report.json).expect("JSON values always serialize") + "\n"
    } else {
        report.text
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, output) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{output}"),
    }
    ExitCode::from(if report.pass { 0 } else { 1 })
}
