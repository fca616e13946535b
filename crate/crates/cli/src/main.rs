//! Command line front end: enumeration, predicate checks, PS3
//! certification, quiver reconstruction, block classification, the
//! Cartan identity check, and the summary count table.
//!
//! Records stream as JSON lines on stdout (or to --out); human-facing
//! count summaries go to stderr so piped output stays parseable. Exit
//! codes: 0 success, 1 a checked predicate failed, 2 usage or malformed
//! input, 3 an I/O failure. Output is deterministic: equal inputs give
//! byte-identical bytes regardless of worker count, and nothing here
//! draws randomness.

use std::fs;
use std::io::{self, Read as _, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use shadow_core::{
    block_classify, cartan_identity_check, enumerate_shades_with, enumerate_shadows_with,
    ps2_holds, ps3_decide, rank, reconstruct, to_dot, BlockMatch, CartanCandidate, Check,
    ConeRay, Error, IntMatrix, Ps3Outcome, Quiver, ReconstructionOptions, Report, SkewIntMatrix,
    TameFilter, DEFAULT_SIZE_LIMIT,
};

#[derive(Parser)]
#[command(name = "shadow", version, about = "Tame periodicity shadow toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate shades of one size as JSON lines
    Shades(SizeArgs),
    /// Enumerate shadows of one size as JSON lines
    Shadows(ShadowsArgs),
    /// Evaluate defining predicates on a matrix and report each verdict
    Check(CheckArgs),
    /// Decide PS3, printing a certificate or a refutation witness
    Certify(InputArgs),
    /// Rebuild all candidate quivers whose shadow is the input
    Reconstruct(ReconstructArgs),
    /// Classify every 2-cycle of a quiver into its block shape
    Blocks(InputArgs),
    /// Check the identity Ad*C = 0 for a quiver and a symmetric matrix
    Cartan(CartanArgs),
    /// Tabulate shade and shadow counts as CSV
    Table(TableArgs),
}

#[derive(Args)]
struct SizeArgs {
    /// Matrix size to enumerate
    #[arg(long)]
    size: usize,
    /// Worker threads for search partitions (default: all cores)
    #[arg(long)]
    workers: Option<usize>,
    /// Write records to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ShadowsArgs {
    #[command(flatten)]
    size: SizeArgs,
    /// Embed the PS3 certificate in each record
    #[arg(long)]
    certificates: bool,
}

#[derive(Args)]
struct CheckArgs {
    /// Matrix JSON file ("-" for stdin)
    #[arg(value_name = "FILE")]
    file: PathBuf,
    /// Predicate selection
    #[arg(long, value_enum, default_value_t = Which::All)]
    which: Which,
    /// Write the report to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InputArgs {
    /// Input JSON file ("-" for stdin)
    #[arg(value_name = "FILE")]
    file: PathBuf,
    /// Write output to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Shadow matrix JSON file ("-" for stdin)
    #[arg(value_name = "FILE")]
    file: PathBuf,
    /// Write one DOT file per candidate into this directory
    #[arg(long)]
    dot_dir: Option<PathBuf>,
    /// Keep candidates with a globally unique single arrow
    #[arg(long)]
    no_infinite_type: bool,
    /// Apply the arrow-count rules to rows only, not to columns
    #[arg(long)]
    no_column_checks: bool,
    /// Emit only loop-free candidates
    #[arg(long)]
    no_loops: bool,
    /// Write records to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CartanArgs {
    /// Quiver JSON file ("-" for stdin)
    #[arg(value_name = "QUIVER")]
    quiver: PathBuf,
    /// Symmetric matrix JSON file ("-" for stdin)
    #[arg(value_name = "MATRIX")]
    matrix: PathBuf,
    /// Write the report to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    /// Largest size to tabulate
    #[arg(long)]
    max_size: usize,
    /// Worker threads for search partitions (default: all cores)
    #[arg(long)]
    workers: Option<usize>,
    /// Write the CSV to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    All,
    Ps1,
    Ps2,
    Ps3,
    Tame,
}

enum Failure {
    Predicate(String),
    Usage(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Predicate(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Predicate(m) | Failure::Usage(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotAShadow { .. } | Error::InvalidCartanCandidate => {
                Failure::Predicate(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Shades(args) => cmd_shades(args),
        Command::Shadows(args) => cmd_shadows(args),
        Command::Check(args) => cmd_check(args),
        Command::Certify(args) => cmd_certify(args),
        Command::Reconstruct(args) => cmd_reconstruct(args),
        Command::Blocks(args) => cmd_blocks(args),
        Command::Cartan(args) => cmd_cartan(args),
        Command::Table(args) => cmd_table(args),
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Io(format!("cannot read stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path)
            .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
    }
}

fn parse_skew(text: &str) -> Result<SkewIntMatrix, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Usage(format!("invalid matrix JSON: {e}")))
}

fn parse_int_matrix(text: &str) -> Result<IntMatrix, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Usage(format!("invalid matrix JSON: {e}")))
}

fn parse_quiver(text: &str) -> Result<Quiver, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Usage(format!("invalid quiver JSON: {e}")))
}

fn open_output(out: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => {
            let f = fs::File::create(p)
                .map_err(|e| Failure::Io(format!("cannot create {}: {e}", p.display())))?;
            Box::new(io::BufWriter::new(f))
        }
        None => Box::new(io::BufWriter::new(io::stdout())),
    })
}

fn write_line(w: &mut dyn Write, value: &impl Serialize) -> Result<(), Failure> {
    let line =
        serde_json::to_string(value).map_err(|e| Failure::Io(format!("serialization: {e}")))?;
    writeln!(w, "{line}").map_err(|e| Failure::Io(format!("write failed: {e}")))
}

fn finish(mut w: Box<dyn Write>) -> Result<(), Failure> {
    w.flush().map_err(|e| Failure::Io(format!("write failed: {e}")))
}

fn workers_or_default(workers: Option<usize>) -> Result<usize, Failure> {
    match workers {
        Some(0) => Err(Failure::Usage("--workers must be at least 1".to_string())),
        Some(k) => Ok(k),
        None => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

/// Sizes beyond the default limit enumerate only when SHADOW_MAX_N
/// allows them; warn that runtime grows steeply.
fn warn_large(n: usize) {
    if n > DEFAULT_SIZE_LIMIT && n <= shadow_core::configured_size_limit() {
        eprintln!(
            "warning: size {n} is above the default limit {DEFAULT_SIZE_LIMIT}; \
             expect a long search"
        );
    }
}

fn cmd_shades(args: SizeArgs) -> Result<(), Failure> {
    let workers = workers_or_default(args.workers)?;
    warn_large(args.size);
    let records = enumerate_shades_with(args.size, &TameFilter::default(), workers)?;
    let mut w = open_output(args.out.as_deref())?;
    for r in &records {
        write_line(w.as_mut(), r)?;
    }
    finish(w)?;
    eprintln!("{} shades of size {}", records.len(), args.size);
    Ok(())
}

fn cmd_shadows(args: ShadowsArgs) -> Result<(), Failure> {
    let workers = workers_or_default(args.size.workers)?;
    warn_large(args.size.size);
    let mut records =
        enumerate_shadows_with(args.size.size, &TameFilter::default(), workers)?;
    if !args.certificates {
        for r in &mut records {
            r.certificate = None;
        }
    }
    let mut w = open_output(args.size.out.as_deref())?;
    for r in &records {
        write_line(w.as_mut(), r)?;
    }
    finish(w)?;
    eprintln!("{} shadows of size {}", records.len(), args.size.size);
    Ok(())
}

fn check_named(name: &str, pass: bool, good: &str, bad: String) -> Check {
    Check {
        name: name.to_string(),
        pass,
        detail: if pass { good.to_string() } else { bad },
    }
}

fn t1_check(a: &SkewIntMatrix) -> Check {
    let bad: Vec<usize> = (0..a.n())
        .filter(|&i| a.row(i).iter().any(|&x| x.abs() > 2))
        .collect();
    check_named(
        "t1",
        bad.is_empty(),
        "all entries lie in [-2,2]",
        format!("rows {bad:?} carry entries outside [-2,2]"),
    )
}

fn t2_check(a: &SkewIntMatrix) -> Check {
    let bad: Vec<usize> = (0..a.n())
        .filter(|&i| {
            let row = a.row(i);
            let pos = row.iter().filter(|&&x| x > 0).count();
            let neg = row.iter().filter(|&&x| x < 0).count();
            (row.contains(&2) && pos > 1) || (row.contains(&-2) && neg > 1)
        })
        .collect();
    check_named(
        "t2",
        bad.is_empty(),
        "no row pairs an extreme entry with a second entry of its sign",
        format!("rows {bad:?} pair an extreme entry with another of its sign"),
    )
}

fn t3_check(a: &SkewIntMatrix) -> Check {
    let bad: Vec<usize> = (0..a.n())
        .filter(|&i| {
            let row = a.row(i);
            row.iter().filter(|&&x| x == 1).count() > 4
                || row.iter().filter(|&&x| x == -1).count() > 4
        })
        .collect();
    check_named(
        "t3",
        bad.is_empty(),
        "every row has at most four entries of each unit sign",
        format!("rows {bad:?} exceed four entries of one unit sign"),
    )
}

fn ps1_check(a: &SkewIntMatrix) -> Check {
    let r = rank(&a.as_int_matrix());
    check_named(
        "ps1",
        r < a.n(),
        &format!("rank {r} is below the size {}", a.n()),
        format!("full rank {r}: the matrix is nonsingular"),
    )
}

fn ps2_check(a: &SkewIntMatrix) -> Check {
    let bad: Vec<usize> = (0..a.n())
        .filter(|&i| {
            let row = a.row(i);
            row.iter().any(|&x| x > 0) != row.iter().any(|&x| x < 0)
        })
        .collect();
    check_named(
        "ps2",
        bad.is_empty() && ps2_holds(a),
        "every nonzero row carries both signs",
        format!("rows {bad:?} carry one sign only"),
    )
}

fn ray_count(k: usize) -> String {
    if k == 1 { "1 extreme ray".to_string() } else { format!("{k} extreme rays") }
}

fn ps3_check(a: &SkewIntMatrix) -> Check {
    match ps3_decide(a) {
        Ps3Outcome::Feasible(cert) => check_named(
            "ps3",
            true,
            &format!("certificate built from {}", ray_count(cert.rays_used.len())),
            String::new(),
        ),
        Ps3Outcome::Infeasible(w) => check_named(
            "ps3",
            false,
            "",
            format!(
                "no certificate: index {} is zero on every extreme ray ({} found)",
                w.missing_index, w.ray_count
            ),
        ),
    }
}

fn cmd_check(args: CheckArgs) -> Result<(), Failure> {
    let a = parse_skew(&read_input(&args.file)?)?;
    let mut checks = Vec::new();
    if matches!(args.which, Which::All | Which::Tame) {
        checks.push(t1_check(&a));
        checks.push(t2_check(&a));
        checks.push(t3_check(&a));
    }
    if matches!(args.which, Which::All | Which::Ps1) {
        checks.push(ps1_check(&a));
    }
    if matches!(args.which, Which::All | Which::Ps2) {
        checks.push(ps2_check(&a));
    }
    if matches!(args.which, Which::All | Which::Ps3) {
        checks.push(ps3_check(&a));
    }
    let report = Report { checks };
    let mut w = open_output(args.out.as_deref())?;
    write_line(w.as_mut(), &report)?;
    finish(w)?;
    let failed = report.checks.iter().filter(|c| !c.pass).count();
    if failed > 0 {
        return Err(Failure::Predicate(format!(
            "{failed} of {} checks failed",
            report.checks.len()
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct CertifyFeasible<'a> {
    matrix: &'a SkewIntMatrix,
    certificate: &'a IntMatrix,
    rays: &'a [ConeRay],
}

#[derive(Serialize)]
struct CertifyWitness<'a> {
    matrix: &'a SkewIntMatrix,
    missing_index: usize,
}

fn cmd_certify(args: InputArgs) -> Result<(), Failure> {
    let a = parse_skew(&read_input(&args.file)?)?;
    let mut w = open_output(args.out.as_deref())?;
    match ps3_decide(&a) {
        Ps3Outcome::Feasible(cert) => {
            write_line(
                w.as_mut(),
                &CertifyFeasible { matrix: &a, certificate: &cert.c, rays: &cert.rays_used },
            )?;
            finish(w)?;
            eprintln!("feasible: certificate uses {}", ray_count(cert.rays_used.len()));
            Ok(())
        }
        Ps3Outcome::Infeasible(witness) => {
            write_line(
                w.as_mut(),
                &CertifyWitness { matrix: &a, missing_index: witness.missing_index },
            )?;
            finish(w)?;
            Err(Failure::Predicate(format!(
                "infeasible at index {}",
                witness.missing_index
            )))
        }
    }
}

fn cmd_reconstruct(args: ReconstructArgs) -> Result<(), Failure> {
    let a = parse_skew(&read_input(&args.file)?)?;
    let opts = ReconstructionOptions {
        infinite_type: !args.no_infinite_type,
        arr_checks_on_columns: !args.no_column_checks,
        include_loops: !args.no_loops,
    };
    let candidates = reconstruct(&a, &opts)?;
    let mut w = open_output(args.out.as_deref())?;
    for c in &candidates {
        write_line(w.as_mut(), c)?;
    }
    finish(w)?;
    if let Some(dir) = &args.dot_dir {
        fs::create_dir_all(dir)
            .map_err(|e| Failure::Io(format!("cannot create {}: {e}", dir.display())))?;
        for (i, c) in candidates.iter().enumerate() {
            let path = dir.join(format!("candidate-{i:04}.dot"));
            fs::write(&path, to_dot(&c.quiver, &c.blocks))
                .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?;
        }
    }
    eprintln!("{} candidate quivers", candidates.len());
    if candidates.is_empty() && a.is_zero() && a.n() >= 4 {
        eprintln!("note: the zero shadow admits candidates only up to size 3");
    }
    Ok(())
}

#[derive(Serialize)]
struct BlockLine<'a> {
    pair: [usize; 2],
    block: Option<&'a BlockMatch>,
}

fn cmd_blocks(args: InputArgs) -> Result<(), Failure> {
    let q = parse_quiver(&read_input(&args.file)?)?;
    let pairs = q.two_cycles();
    let mut matches: Vec<(usize, usize, Option<BlockMatch>)> = Vec::new();
    for &(i, j) in &pairs {
        matches.push((i, j, block_classify(&q, i, j)?));
    }
    let mut w = open_output(args.out.as_deref())?;
    for (i, j, m) in &matches {
        write_line(w.as_mut(), &BlockLine { pair: [*i, *j], block: m.as_ref() })?;
    }
    finish(w)?;
    let unmatched = matches.iter().filter(|(_, _, m)| m.is_none()).count();
    eprintln!("{} two-cycles, {} unmatched", matches.len(), unmatched);
    if unmatched > 0 {
        return Err(Failure::Predicate(format!(
            "{unmatched} two-cycles fit no block shape"
        )));
    }
    Ok(())
}

fn cmd_cartan(args: CartanArgs) -> Result<(), Failure> {
    if args.quiver == Path::new("-") && args.matrix == Path::new("-") {
        return Err(Failure::Usage("only one input may come from stdin".to_string()));
    }
    let q = parse_quiver(&read_input(&args.quiver)?)?;
    let m = parse_int_matrix(&read_input(&args.matrix)?)?;
    let candidate = CartanCandidate::new(m)?;
    let report = cartan_identity_check(&q, &candidate)?;
    let mut w = open_output(args.out.as_deref())?;
    write_line(w.as_mut(), &report)?;
    finish(w)?;
    if !report.all_pass() {
        return Err(Failure::Predicate("the product has nonzero entries".to_string()));
    }
    Ok(())
}

fn cmd_table(args: TableArgs) -> Result<(), Failure> {
    let workers = workers_or_default(args.workers)?;
    if args.max_size == 0 {
        return Err(Failure::Usage("--max-size must be at least 1".to_string()));
    }
    let limit = shadow_core::configured_size_limit();
    if args.max_size > limit {
        return Err(Failure::from(Error::UnsupportedSize { n: args.max_size, limit }));
    }
    warn_large(args.max_size);
    let sizes: Vec<usize> =
        if args.max_size >= 3 { (3..=args.max_size).collect() } else { vec![args.max_size] };
    let mut w = open_output(args.out.as_deref())?;
    let emit = |w: &mut dyn Write, line: &str| -> Result<(), Failure> {
        writeln!(w, "{line}").map_err(|e| Failure::Io(format!("write failed: {e}")))
    };
    emit(w.as_mut(), "n,shades,shadows,essential")?;
    for &n in &sizes {
        let shades = enumerate_shades_with(n, &TameFilter::default(), workers)?;
        let shadows = shades.iter().filter(|r| ps3_decide(&r.matrix).is_feasible()).count();
        emit(w.as_mut(), &format!("{n},{},{shadows},", shades.len()))?;
        eprintln!("size {n}: {} shades, {shadows} shadows", shades.len());
    }
    if args.max_size <= 2 {
        emit(
            w.as_mut(),
            "# sizes 1 and 2 admit only the zero matrix as shade and shadow",
        )?;
    }
    emit(
        w.as_mut(),
        "# the essential column is left empty: deciding essentiality needs tools outside this toolkit",
    )?;
    finish(w)
}
