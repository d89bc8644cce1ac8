use std::fs;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use orcp_core::closure::closure;
use orcp_core::enumeration::{count, Family, FamilySpec, Level};
use orcp_core::factorization::{factor_step, factor_to_top};
use orcp_core::generators::{build_table, set_g, set_m, set_z, MVariant};
use orcp_core::green_star::{classify, Relation};
use orcp_core::rank::{exact_rank, exact_rank_unguarded, RankMode};
use orcp_core::verify::{run_suite, SuiteOptions};
use orcp_core::{Error, PartialMap};

#[derive(Parser)]
#[command(name = "orcp", version, about = "Exact computations with monoids of partial contractions of a finite chain")]
struct Cli {
    /// Cap the number of worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the members of a family in canonical order.
    Enumerate(EnumerateArgs),
    /// Close a set of generators read as JSONL records.
    Closure(ClosureArgs),
    /// Exact rank of OCP_n or ORCP_n, or of their height <= n-1 ideal.
    Rank(RankArgs),
    /// Split a map into two maps of height one more.
    Factor(FactorArgs),
    /// Print a named generating set.
    Gens(GensArgs),
    /// Lay out the top level by kernel and image.
    Tables(TablesArgs),
    /// Starred Green's classes of a family.
    Classes(ClassesArgs),
    /// Run the claims suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Jsonl,
    Text,
}

#[derive(Args)]
struct LevelArgs {
    /// Only maps of exactly this height.
    #[arg(long, conflicts_with = "ideal")]
    height: Option<u8>,
    /// Only maps of height at most this.
    #[arg(long)]
    ideal: Option<u8>,
}

impl LevelArgs {
    fn level(&self) -> Level {
        match (self.height, self.ideal) {
            (Some(p), _) => Level::Exact(p),
            (_, Some(p)) => Level::Ideal(p),
            _ => Level::All,
        }
    }
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long)]
    n: u8,
    #[command(flatten)]
    level: LevelArgs,
    /// Print only the number of members.
    #[arg(long)]
    count: bool,
    #[arg(long, value_enum, default_value = "jsonl")]
    format: Format,
    /// Allow n above the enumeration guard.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct ClosureArgs {
    /// JSONL file of maps, or `-` for standard input.
    #[arg(long)]
    gens: PathBuf,
    /// Print size, rounds and product counts instead of the members.
    #[arg(long)]
    stats: bool,
    #[arg(long, value_enum, default_value = "jsonl")]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Certified,
}

#[derive(Args)]
struct RankArgs {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long)]
    n: u8,
    /// Rank of the height <= n-1 ideal instead of the whole monoid.
    #[arg(long)]
    ideal: bool,
    #[arg(long, value_enum, default_value = "certified")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "jsonl")]
    format: Format,
    /// Allow exhaustive search above its guard.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct FactorArgs {
    /// Map in text form, e.g. "n=4; 2->2, 3->3".
    #[arg(long, value_parser = parse_map)]
    map: PartialMap,
    #[arg(long, value_parser = parse_family)]
    family: Family,
    /// Factor all the way to maps of height n-1.
    #[arg(long)]
    to_top: bool,
    #[arg(long, value_enum, default_value = "jsonl")]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum SetName {
    #[value(name = "G", alias = "g")]
    G,
    #[value(name = "M", alias = "m")]
    M,
    #[value(name = "Z", alias = "z")]
    Z,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    AsWritten,
    Corrected,
}

#[derive(Args)]
struct GensArgs {
    #[arg(long, value_enum)]
    set: SetName,
    #[arg(long)]
    n: u8,
    /// Index range of the starred family in M.
    #[arg(long, value_enum, default_value = "corrected")]
    variant: VariantArg,
    #[arg(long, value_enum, default_value = "jsonl")]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Md,
    Csv,
}

#[derive(Args)]
struct TablesArgs {
    #[arg(long)]
    n: u8,
    /// 1 for the order-preserving table, 2 for preserving and reversing rows.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    which: u8,
    #[arg(long, value_enum, default_value = "md")]
    format: TableFormat,
}

#[derive(Args)]
struct ClassesArgs {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long)]
    n: u8,
    #[command(flatten)]
    level: LevelArgs,
    #[arg(long, value_parser = parse_relation)]
    relation: Relation,
    /// Print only the number of classes.
    #[arg(long)]
    count: bool,
    #[arg(long, value_enum, default_value = "jsonl")]
    format: Format,
    #[arg(long)]
    force: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Paper,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "paper")]
    suite: Suite,
    /// Restrict every claim to this chain size.
    #[arg(long)]
    n: Option<u8>,
    /// Random factorization samples at n = 6.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_map(s: &str) -> Result<PartialMap, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_relation(s: &str) -> Result<Relation, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    /// Bad input, guard tripped, or I/O trouble.
    Usage(String),
    /// A computation ran and a check did not hold.
    Claim(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Certification(_) | Error::SearchExhausted(_) | Error::NotAGeneratingSet => {
                Failure::Claim(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Out<'a> = BufWriter<io::StdoutLock<'a>>;
type Outcome = Result<bool, Failure>;

fn json_line<T: serde::Serialize>(out: &mut Out, value: &T) -> Result<(), Failure> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn spec_of(family: Family, n: u8, level: &LevelArgs) -> Result<FamilySpec, Failure> {
    let spec = FamilySpec {
        family,
        n,
        level: level.level(),
    };
    spec.validate()?;
    Ok(spec)
}

fn members(spec: &FamilySpec, force: bool) -> Result<Vec<PartialMap>, Failure> {
    let iter = if force { spec.iter_unguarded()? } else { spec.iter()? };
    Ok(iter.collect())
}

fn run_enumerate(a: &EnumerateArgs, out: &mut Out) -> Outcome {
    let spec = spec_of(a.family, a.n, &a.level)?;
    if a.count {
        let total = if a.force { spec.iter_unguarded()?.count() } else { count(&spec)? };
        writeln!(out, "{total}")?;
        return Ok(true);
    }
    let iter = if a.force { spec.iter_unguarded()? } else { spec.iter()? };
    for f in iter {
        match a.format {
            Format::Jsonl => json_line(out, &f)?,
            Format::Text => writeln!(out, "{f}")?,
        }
    }
    Ok(true)
}

fn read_maps(path: &PathBuf) -> Result<Vec<PartialMap>, Failure> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        for line in io::stdin().lock().lines() {
            s.push_str(&line?);
            s.push('\n');
        }
        s
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
    };
    let mut maps = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let map = if line.starts_with('{') {
            serde_json::from_str(line).map_err(|e| Failure::Usage(format!("line {}: {e}", i + 1)))?
        } else {
            line.parse().map_err(|e: Error| Failure::Usage(format!("line {}: {e}", i + 1)))?
        };
        maps.push(map);
    }
    Ok(maps)
}

fn run_closure(a: &ClosureArgs, out: &mut Out) -> Outcome {
    let gens = read_maps(&a.gens)?;
    let result = closure(&gens)?;
    if a.stats {
        let stats = serde_json::json!({
            "generators": result.generator_count,
            "size": result.len(),
            "rounds": result.rounds,
            "products": result.product_count,
            "empty_products": result.empty_products,
        });
        match a.format {
            Format::Jsonl => json_line(out, &stats)?,
            Format::Text => writeln!(
                out,
                "generators {}\nsize {}\nrounds {}\nproducts {}\nempty products {}",
                result.generator_count,
                result.len(),
                result.rounds,
                result.product_count,
                result.empty_products
            )?,
        }
        return Ok(true);
    }
    for f in &result.elements {
        match a.format {
            Format::Jsonl => json_line(out, f)?,
            Format::Text => writeln!(out, "{f}")?,
        }
    }
    Ok(true)
}

fn run_rank(a: &RankArgs, out: &mut Out) -> Outcome {
    let spec = if a.ideal {
        FamilySpec::ideal(a.family, a.n, a.n.saturating_sub(1))
    } else {
        FamilySpec::new(a.family, a.n)
    };
    let mode = match a.mode {
        ModeArg::Exhaustive => RankMode::Exhaustive,
        ModeArg::Certified => RankMode::Certified,
    };
    let cert = if a.force {
        exact_rank_unguarded(&spec, mode)?
    } else {
        exact_rank(&spec, mode)?
    };
    match a.format {
        Format::Jsonl => json_line(out, &cert)?,
        Format::Text => {
            writeln!(out, "{}", cert.rank)?;
            for w in &cert.witness {
                writeln!(out, "  {w}")?;
            }
        }
    }
    Ok(true)
}

fn run_factor(a: &FactorArgs, out: &mut Out) -> Outcome {
    if a.to_top {
        let factors = factor_to_top(&a.map, a.family)?;
        match a.format {
            Format::Jsonl => json_line(out, &factors)?,
            Format::Text => {
                for f in &factors {
                    writeln!(out, "{f}")?;
                }
            }
        }
    } else {
        let pair = factor_step(&a.map, a.family)?;
        match a.format {
            Format::Jsonl => json_line(out, &pair)?,
            Format::Text => writeln!(out, "{}\nbeta  = {}\ngamma = {}", pair.branch, pair.beta, pair.gamma)?,
        }
    }
    Ok(true)
}

fn run_gens(a: &GensArgs, out: &mut Out) -> Outcome {
    let set = match a.set {
        SetName::G => set_g(a.n)?,
        SetName::Z => set_z(a.n)?,
        SetName::M => set_m(
            a.n,
            match a.variant {
                VariantArg::AsWritten => MVariant::AsWritten,
                VariantArg::Corrected => MVariant::Corrected,
            },
        )?,
    };
    for e in &set {
        match a.format {
            Format::Jsonl => json_line(out, e)?,
            Format::Text => writeln!(out, "{e}")?,
        }
    }
    Ok(true)
}

fn run_tables(a: &TablesArgs, out: &mut Out) -> Outcome {
    let table = build_table(a.n, a.which)?;
    match a.format {
        TableFormat::Md => write!(out, "{}", table.to_markdown())?,
        TableFormat::Csv => write!(out, "{}", table.to_csv())?,
    }
    Ok(true)
}

fn run_classes(a: &ClassesArgs, out: &mut Out) -> Outcome {
    let spec = spec_of(a.family, a.n, &a.level)?;
    let partition = classify(&members(&spec, a.force)?)?;
    let classes = partition.classes(a.relation);
    if a.count {
        writeln!(out, "{}", classes.len())?;
        return Ok(true);
    }
    for class in classes {
        match a.format {
            Format::Jsonl => json_line(out, class)?,
            Format::Text => {
                let items: Vec<String> = class.iter().map(|f| format!("[{f}]")).collect();
                writeln!(out, "{}", items.join(" "))?;
            }
        }
    }
    Ok(true)
}

fn run_verify(a: &VerifyArgs, out: &mut Out) -> Outcome {
    let Suite::Paper = a.suite;
    let report = run_suite(&SuiteOptions {
        n: a.n,
        random_samples: a.samples,
        seed: a.seed,
    });
    match a.format {
        Format::Jsonl => {
            for c in &report.claims {
                json_line(out, c)?;
            }
        }
        Format::Text => write!(out, "{}", report.to_text())?,
    }
    Ok(report.all_pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = match &cli.command {
        Command::Enumerate(a) => run_enumerate(a, &mut out),
        Command::Closure(a) => run_closure(a, &mut out),
        Command::Rank(a) => run_rank(a, &mut out),
        Command::Factor(a) => run_factor(a, &mut out),
        Command::Gens(a) => run_gens(a, &mut out),
        Command::Tables(a) => run_tables(a, &mut out),
        Command::Classes(a) => run_classes(a, &mut out),
        Command::Verify(a) => run_verify(a, &mut out),
    };
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(true), Ok(())) => ExitCode::SUCCESS,
        (Ok(false), _) => ExitCode::from(1),
        (Err(Failure::Claim(msg)), _) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        (Err(Failure::Usage(msg)), _) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        (Ok(true), Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
