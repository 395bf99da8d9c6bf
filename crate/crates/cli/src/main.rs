//! Batch front end for the block-combinatorics pipeline.
//!
//! Every command loads a weighted datum (from a JSON file or generated from a
//! principal grading), runs one stage of the pipeline, prints a short human
//! summary to standard output, and optionally writes canonical JSON to
//! `--out`.  Identical configurations produce byte-identical outputs.
//!
//! Exit codes: 0 on success, 1 when an invariant or audit fails (the report
//! is still produced), 2 on usage or input-parse errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use spiralblocks::arrangement::Chamber;
use spiralblocks::blockspace::{
    canonical_signed_basis, eta_invariance_check, heart_check, heart_parity_audit,
    positive_basis, BlockSpace, LatticeVector,
};
use spiralblocks::datum::{load_datum, principal, render_violations, BlockDatum};
use spiralblocks::exact::{expand_at_0, series_pairs, IntLaurent, RatFunc};
use spiralblocks::factorize::{
    build_m, factorization_json, factorize_m, parity_audit, OrbitLabeling,
};
use spiralblocks::linalg::QMat;
use spiralblocks::pairing::{h_value, tau};
use spiralblocks::rootsys::DEFAULT_GROUP_CAP;
use spiralblocks::{Error, Result};

#[derive(Parser)]
#[command(
    name = "spiralblocks",
    version,
    about = "Exact block combinatorics: chambers, Gram forms, canonical bases, factorizations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Where the datum comes from: a JSON file or a generated principal datum.
#[derive(Args)]
struct DatumArgs {
    /// Datum JSON file.
    #[arg(long, value_name = "FILE")]
    datum: Option<PathBuf>,
    /// Generate a principal datum for this root system type (e.g. A2, G2).
    #[arg(long, value_name = "TYPE", requires = "degrees", requires = "m", requires = "eta")]
    principal: Option<String>,
    /// Comma-separated degrees of the simple roots (with --principal).
    #[arg(long, value_delimiter = ',', value_name = "LIST", allow_hyphen_values = true)]
    degrees: Option<Vec<i64>>,
    /// Grading modulus (with --principal).
    #[arg(long, value_name = "INT")]
    m: Option<i64>,
    /// Weight eta of the grading cocharacter (with --principal).
    #[arg(long, value_name = "INT", allow_hyphen_values = true)]
    eta: Option<i64>,
}

impl DatumArgs {
    fn load(&self) -> Result<BlockDatum> {
        match (&self.datum, &self.principal) {
            (Some(path), None) => load_datum(path),
            _ => self.load_unchecked(),
        }
    }

    /// Parses without running the semantic validation, so the `validate`
    /// command can report every violation itself instead of failing at load.
    fn load_unchecked(&self) -> Result<BlockDatum> {
        match (&self.datum, &self.principal) {
            (Some(path), None) => {
                let text = fs::read_to_string(path)?;
                serde_json::from_str(&text).map_err(|e| Error::DatumParse(e.to_string()))
            }
            (None, Some(label)) => principal(
                label,
                self.degrees.as_deref().unwrap_or_default(),
                self.m.unwrap_or(1),
                self.eta.unwrap_or(1),
            ),
            (Some(_), Some(_)) => Err(Error::DatumParse(
                "--datum and --principal are mutually exclusive".into(),
            )),
            (None, None) => Err(Error::DatumParse(
                "a datum is required: pass --datum FILE or --principal TYPE".into(),
            )),
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Seed determining representative choices.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Expansion order for series audits.
    #[arg(long = "series-order", default_value_t = 40)]
    series_order: i64,
    /// Worker threads for data-parallel sections (default: all cores).
    #[arg(long, value_name = "INT")]
    jobs: Option<usize>,
    /// Write machine-readable JSON to this path.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the datum invariants and report violations.
    Validate {
        #[command(flatten)]
        datum: DatumArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Enumerate the chambers of the spiral arrangement.
    Chambers {
        #[command(flatten)]
        datum: DatumArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Compute the Gram matrix over the chambers.
    Gram {
        #[command(flatten)]
        datum: DatumArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Print the block rank (dimension of the Gram quotient).
    Rank {
        #[command(flatten)]
        datum: DatumArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Extract the canonical signed basis and certify positivity.
    Basis {
        #[command(flatten)]
        datum: DatumArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Factorize M = S*T*Sp and run the parity audits.
    Factorize {
        #[command(flatten)]
        datum: DatumArgs,
        /// Factorize this matrix file ([[RatFunc, ...], ...]) instead of the
        /// basis Gram of a datum.
        #[arg(long, value_name = "FILE", conflicts_with_all = ["datum", "principal"])]
        matrix: Option<PathBuf>,
        /// Orbit labeling file: {"orbits": [{"id", "kappa", "members"}]}.
        #[arg(long, value_name = "FILE")]
        labeling: PathBuf,
        /// Exit 1 when the parity audit fails.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run every invariant suite and summarize.
    Audit {
        #[command(flatten)]
        datum: DatumArgs,
        /// Also check invariance under replacing eta by this value.
        #[arg(long = "eta-alt", value_name = "INT", allow_hyphen_values = true)]
        eta_alt: Option<i64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Produce the full pipeline report in one document.
    Report {
        #[command(flatten)]
        datum: DatumArgs,
        /// Orbit labeling for the factorization section.
        #[arg(long, value_name = "FILE")]
        labeling: Option<PathBuf>,
        /// Also check invariance under replacing eta by this value.
        #[arg(long = "eta-alt", value_name = "INT", allow_hyphen_values = true)]
        eta_alt: Option<i64>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Io(_)
        | Error::Json(_)
        | Error::DatumParse(_)
        | Error::BadLabeling(_)
        | Error::Precondition(_) => 2,
        _ => 1,
    }
}

fn configure_jobs(common: &CommonArgs) {
    if let Some(jobs) = common.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global();
    }
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn maybe_write(common: &CommonArgs, value: &Value) -> Result<()> {
    if let Some(path) = &common.out {
        write_json(path, value)?;
    }
    Ok(())
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Validate { datum, common } => {
            configure_jobs(&common);
            let d = datum.load_unchecked()?;
            let violations = d.validate(DEFAULT_GROUP_CAP);
            let value = json!({
                "valid": violations.is_empty(),
                "violations": violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            });
            maybe_write(&common, &value)?;
            if violations.is_empty() {
                println!(
                    "datum valid: m={}, eta={}, rankE={}, {} car entries",
                    d.m,
                    d.eta,
                    d.rank_e,
                    d.car.len()
                );
                Ok(ExitCode::SUCCESS)
            } else {
                println!("datum rejected:");
                println!("{}", render_violations(&violations));
                Ok(ExitCode::from(1))
            }
        }
        Command::Chambers { datum, common } => {
            configure_jobs(&common);
            let d = datum.load()?;
            require_valid(&d)?;
            let chambers =
                spiralblocks::arrangement::enumerate_chambers(&d, common.seed)?;
            println!("{} chambers", chambers.len());
            for c in &chambers {
                println!("  signs {:?} representative {}", c.signs, point_text(&c.representative));
            }
            maybe_write(&common, &chambers_json(&chambers))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Gram { datum, common } => {
            configure_jobs(&common);
            let d = datum.load()?;
            require_valid(&d)?;
            let gram = spiralblocks::pairing::build_gram(&d, common.seed)?;
            println!(
                "Gram matrix over {} chambers computed; symmetric, entries in Q(v)",
                gram.chambers.len()
            );
            let value = json!({
                "chambers": chambers_json(&gram.chambers),
                "entries": gram.entries,
            });
            maybe_write(&common, &value)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Rank { datum, common } => {
            configure_jobs(&common);
            let d = datum.load()?;
            require_valid(&d)?;
            let gram = spiralblocks::pairing::build_gram(&d, common.seed)?;
            let (kernel, pivots) = spiralblocks::blockspace::radical_of(&gram.entries)?;
            println!("{}", pivots.len());
            let value = json!({
                "rank": pivots.len(),
                "radicalDim": kernel.len(),
            });
            maybe_write(&common, &value)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Basis { datum, common } => {
            configure_jobs(&common);
            let d = datum.load()?;
            require_valid(&d)?;
            let bs = BlockSpace::build(&d, common.seed)?;
            let sb = canonical_signed_basis(&bs)?;
            let pos = positive_basis(&bs, &sb)?;
            println!(
                "rank {}, radical dimension {}, {} basis elements, positivity certified",
                bs.quotient_dim,
                bs.radical_basis.len(),
                pos.len()
            );
            maybe_write(&common, &basis_json(&bs, &pos, common.series_order))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Factorize { datum, matrix, labeling, strict, common } => {
            configure_jobs(&common);
            let labeling = OrbitLabeling::load(&labeling)?;
            let m = match &matrix {
                Some(path) => load_matrix(path)?,
                None => {
                    let d = datum.load()?;
                    require_valid(&d)?;
                    let bs = BlockSpace::build(&d, common.seed)?;
                    let sb = canonical_signed_basis(&bs)?;
                    let pos = positive_basis(&bs, &sb)?;
                    let gram_on_basis: QMat = pos
                        .iter()
                        .map(|a| pos.iter().map(|b| bs.pair(a, b)).collect())
                        .collect();
                    build_m(&gram_on_basis, &labeling)?
                }
            };
            let f = factorize_m(&m, &labeling)?;
            let report = parity_audit(&f);
            let value = factorization_json(&f);
            maybe_write(&common, &value)?;
            println!(
                "factorized {}x{} matrix over {} orbits",
                f.ordering.len(),
                f.ordering.len(),
                f.blocks.len()
            );
            println!(
                "parity audit: P in N[v^-2] {}; T in Q(v^2) {}; factors heart-fixed {}",
                pass_word(report.p_parity()),
                pass_word(report.t_even()),
                pass_word(report.heart_fixed())
            );
            for (i, j, entry) in &report.p_failures {
                println!("  P[{i}][{j}] = {entry} violates N[v^-2]");
            }
            if strict && !report.all_pass() {
                println!("strict mode: parity audit failed");
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Audit { datum, eta_alt, common } => {
            configure_jobs(&common);
            let d = datum.load()?;
            let (value, all_pass) = run_audit(&d, eta_alt, &common)?;
            maybe_write(&common, &value)?;
            Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Report { datum, labeling, eta_alt, common } => {
            configure_jobs(&common);
            let d = datum.load()?;
            let labeling = match &labeling {
                Some(path) => Some(OrbitLabeling::load(path)?),
                None => None,
            };
            let (value, ok) = run_report(&d, labeling.as_ref(), eta_alt, &common)?;
            maybe_write(&common, &value)?;
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

/// Refuse to run the pipeline on an invalid datum.
fn require_valid(d: &BlockDatum) -> Result<()> {
    let violations = d.validate(DEFAULT_GROUP_CAP);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(violations))
    }
}

fn pass_word(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

fn point_text(point: &[num::BigRational]) -> String {
    let parts: Vec<String> = point.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn chambers_json(chambers: &[Chamber]) -> Value {
    Value::Array(
        chambers
            .iter()
            .map(|c| {
                json!({
                    "signs": c.signs,
                    "representative": c.representative.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

fn basis_json(bs: &BlockSpace, basis: &[LatticeVector], series_order: i64) -> Value {
    let elements: Vec<Value> = basis
        .iter()
        .map(|b| {
            let coefficients: serde_json::Map<String, Value> = b
                .coefficients
                .iter()
                .map(|(tag, f)| {
                    (tag.to_string(), serde_json::to_value(RatFunc::from(f.clone())).unwrap())
                })
                .collect();
            let series = expand_at_0(&bs.pair(b, b), series_order);
            json!({
                "coefficients": coefficients,
                "selfPairingSeries": series_pairs(&series),
            })
        })
        .collect();
    json!({
        "rank": bs.quotient_dim,
        "radicalDim": bs.radical_basis.len(),
        "basis": elements,
    })
}

fn load_matrix(path: &Path) -> Result<QMat> {
    let text = fs::read_to_string(path)?;
    let m: QMat = serde_json::from_str(&text)?;
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::Shape("matrix file must contain a square matrix".into()));
    }
    Ok(m)
}

struct Suite {
    name: &'static str,
    pass: bool,
    detail: String,
}

/// Run the invariant suites; returns the JSON report and the overall verdict.
fn run_audit(d: &BlockDatum, eta_alt: Option<i64>, common: &CommonArgs) -> Result<(Value, bool)> {
    let mut suites: Vec<Suite> = Vec::new();
    let mut record = |name: &'static str, outcome: std::result::Result<String, String>| {
        let (pass, detail) = match outcome {
            Ok(detail) => (true, detail),
            Err(detail) => (false, detail),
        };
        println!("audit: {name} ... {}", pass_word(pass));
        if !pass {
            println!("  {detail}");
        }
        suites.push(Suite { name, pass, detail });
    };

    let violations = d.validate(DEFAULT_GROUP_CAP);
    record(
        "datum validation",
        if violations.is_empty() {
            Ok("all datum invariants hold".into())
        } else {
            Err(render_violations(&violations))
        },
    );
    if !violations.is_empty() {
        let value = suites_json(&suites);
        return Ok((value, false));
    }

    let bs = BlockSpace::build(d, common.seed)?;
    let n = bs.gram.chambers.len();

    // Gram symmetry is audited inside the build; re-state it here.
    record("gram symmetry", {
        let mut bad = None;
        for i in 0..n {
            for j in 0..n {
                if bs.gram.entries[i][j] != bs.gram.entries[j][i] {
                    bad = Some((i, j));
                }
            }
        }
        match bad {
            None => Ok(format!("{n}x{n} matrix symmetric")),
            Some((i, j)) => Err(format!("entries ({i},{j}) and ({j},{i}) differ")),
        }
    });

    record("representative independence", {
        let other = BlockSpace::build(d, common.seed.wrapping_add(9001))?;
        if other.gram.entries == bs.gram.entries {
            Ok("Gram identical under resampled representatives".into())
        } else {
            Err("Gram changed when representatives were resampled".into())
        }
    });

    record("tau vanishes on the diagonal", {
        let bad: Vec<usize> = (0..n)
            .filter(|&i| {
                let r = &bs.gram.chambers[i].representative;
                tau(d, r, r) != 0
            })
            .collect();
        if bad.is_empty() {
            Ok(format!("{n} chamber representatives checked"))
        } else {
            Err(format!("tau(phi, phi) != 0 at chambers {bad:?}"))
        }
    });

    record("tau parity matches h", {
        let mut failures = 0usize;
        for i in 0..n {
            for j in 0..n {
                let ri = &bs.gram.chambers[i].representative;
                let rj = &bs.gram.chambers[j].representative;
                let t = tau(d, ri, rj);
                if (t - bs.h[i] - bs.h[j]).rem_euclid(2) != 0 {
                    failures += 1;
                }
            }
        }
        if failures == 0 {
            Ok(format!("{} ordered pairs checked", n * n))
        } else {
            Err(format!("{failures} pairs violate the parity relation"))
        }
    });

    record("h is Weyl invariant", {
        let group = d.weyl_group_on_e(DEFAULT_GROUP_CAP)?;
        let mut failures = 0usize;
        for (i, c) in bs.gram.chambers.iter().enumerate() {
            for w in &group.elements {
                let moved = spiralblocks::pairing::apply_on_e(w, &c.representative);
                match h_value(d, &moved) {
                    Ok(hw) if hw == bs.h[i] => {}
                    _ => failures += 1,
                }
            }
        }
        if failures == 0 {
            Ok(format!("{} chamber-by-group checks", n * group.order()))
        } else {
            Err(format!("{failures} Weyl translates change h"))
        }
    });

    record("two-sided radical", {
        match bs.audit_radical() {
            Ok(()) => Ok(format!("radical dimension {}", bs.radical_basis.len())),
            Err(e) => Err(e.to_string()),
        }
    });

    record("heart parity of rescaled entries", {
        match heart_parity_audit(&bs) {
            Ok(()) => Ok("every v^(h+h') [c|c'] lies in Q(v^2)".into()),
            Err(e) => Err(e.to_string()),
        }
    });

    record("bar and heart involutions", {
        let gens = bs.lattice_generators();
        let mut ok = true;
        for (k, g) in gens.iter().enumerate() {
            let twist = bs.sub_scaled(
                g,
                &IntLaurent::monomial(-1, (k as i64 % 3) - 1),
                &gens[(k + 1) % gens.len()],
            );
            for x in [g, &twist] {
                ok &= bs.bar_vector(&bs.bar_vector(x)).coords == x.coords;
                ok &= bs.heart_vector(&bs.heart_vector(x)).coords == x.coords;
                let bh = bs.bar_vector(&bs.heart_vector(x));
                let hb = bs.heart_vector(&bs.bar_vector(x));
                ok &= bh.coords == hb.coords;
            }
        }
        if ok {
            Ok(format!("checked on {} generators and twists", gens.len()))
        } else {
            Err("an involution identity failed".into())
        }
    });

    record("heart respects the pairing", {
        let gens = bs.lattice_generators();
        let mut ok = true;
        for a in &gens {
            for b in &gens {
                let lhs = bs.pair(&bs.heart_vector(a), &bs.heart_vector(b));
                ok &= lhs == bs.pair(a, b).heart();
            }
        }
        if ok {
            Ok(format!("{} generator pairs checked", gens.len() * gens.len()))
        } else {
            Err("(x♥ : y♥) != heart((x : y)) on some generator pair".into())
        }
    });

    if let Some(eta_alt) = eta_alt {
        record("eta invariance", {
            match eta_invariance_check(d, eta_alt, common.seed) {
                Ok(cmp) if cmp.all_equal() => {
                    Ok(format!("chambers, Gram, rank, basis agree at eta = {eta_alt}"))
                }
                Ok(cmp) => Err(format!("{cmp:?}")),
                Err(e) => Err(e.to_string()),
            }
        });
    }

    let all_pass = suites.iter().all(|s| s.pass);
    println!("audit summary: {}", if all_pass { "all suites PASS" } else { "FAILURES present" });
    Ok((suites_json(&suites), all_pass))
}

fn suites_json(suites: &[Suite]) -> Value {
    json!({
        "suites": suites
            .iter()
            .map(|s| json!({"name": s.name, "pass": s.pass, "detail": s.detail}))
            .collect::<Vec<_>>(),
        "allPass": suites.iter().all(|s| s.pass),
    })
}

/// The full pipeline in one document.
fn run_report(
    d: &BlockDatum,
    labeling: Option<&OrbitLabeling>,
    eta_alt: Option<i64>,
    common: &CommonArgs,
) -> Result<(Value, bool)> {
    let violations = d.validate(DEFAULT_GROUP_CAP);
    if !violations.is_empty() {
        println!("datum rejected:");
        println!("{}", render_violations(&violations));
        let value = json!({
            "datum": d,
            "validation": {
                "valid": false,
                "violations": violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            },
        });
        return Ok((value, false));
    }

    let bs = BlockSpace::build(d, common.seed)?;
    println!(
        "report: m={}, eta={}, rankE={}; {} chambers, rank {}",
        d.m,
        d.eta,
        d.rank_e,
        bs.gram.chambers.len(),
        bs.quotient_dim
    );

    let basis_section;
    let mut factorization_section = Value::Null;
    let mut basis_for_factorization: Option<Vec<LatticeVector>> = None;
    match canonical_signed_basis(&bs).and_then(|sb| {
        let pos = positive_basis(&bs, &sb)?;
        Ok(pos)
    }) {
        Ok(pos) => {
            println!("basis: {} elements, positivity certified", pos.len());
            basis_section = basis_json(&bs, &pos, common.series_order);
            basis_for_factorization = Some(pos);
        }
        Err(e) => {
            println!("basis: not computed ({e})");
            basis_section = json!({ "error": e.to_string() });
        }
    }

    if let (Some(labeling), Some(pos)) = (labeling, &basis_for_factorization) {
        let gram_on_basis: QMat = pos
            .iter()
            .map(|a| pos.iter().map(|b| bs.pair(a, b)).collect())
            .collect();
        let m = build_m(&gram_on_basis, labeling)?;
        let f = factorize_m(&m, labeling)?;
        let report = parity_audit(&f);
        println!(
            "factorization: parity audit {}",
            pass_word(report.all_pass())
        );
        factorization_section = factorization_json(&f);
        if let Ok(kappas) = labeling.kappas(pos.len()) {
            let hearts = heart_check(&bs, pos, &kappas)?;
            println!("heart check: {}", pass_word(hearts.all_pass()));
            factorization_section["heartCheck"] = json!(hearts.passes);
        }
    }

    let (audit_value, audit_pass) = run_audit(d, eta_alt, common)?;

    let value = json!({
        "datum": d,
        "validation": { "valid": true, "violations": [] },
        "chambers": chambers_json(&bs.gram.chambers),
        "gram": bs.gram.entries,
        "rank": { "rank": bs.quotient_dim, "radicalDim": bs.radical_basis.len() },
        "basis": basis_section,
        "factorization": factorization_section,
        "audit": audit_value,
    });
    Ok((value, audit_pass))
}
