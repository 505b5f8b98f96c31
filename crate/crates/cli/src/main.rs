//! `circrank`: generate circulant block diagonal matrices, compute real and
//! binary ranks, build and check rectangle partitions, and report bounds.
//!
//! Exit status: 0 on success, 1 when a verification or theorem check fails,
//! 2 on usage errors and malformed input.

mod check;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use circrank_core::{
    binary_rank_exact, canonicalize_2regular, certify, complement_partition, permute, real_rank,
    verify_partition, BlockSpec, BoundKind, Error, Matrix01, Partition, PartitionFault, RankReport,
    SearchConfig,
};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "circrank",
    version,
    about = "Binary rank of circulant block diagonal 0/1 matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Solver time budget in seconds.
    #[arg(long, global = true, env = "BINRANK_BUDGET")]
    budget: Option<f64>,
    /// Solver threads; 0 uses all cores, 1 searches sequentially.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Write the matrix of a spec.
    Gen {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        complement: bool,
        /// Permute rows and columns at random (see --seed).
        #[arg(long)]
        shuffle: bool,
    },
    /// Real rank of a matrix.
    Rank {
        #[command(flatten)]
        input: MatrixInput,
    },
    /// Exact binary rank, or a bracket when the budget runs out.
    Binrank {
        #[command(flatten)]
        input: MatrixInput,
    },
    /// Partition of the complement of a spec's matrix, merged from per-block
    /// witnesses.
    Construct {
        #[arg(long)]
        spec: String,
    },
    /// Check a partition file against its matrix.
    Verify {
        /// Matrix the partition must target; defaults to the target stored
        /// in the partition file.
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long)]
        partition: PathBuf,
    },
    /// Real rank, applicable bounds and (with --search) solver bounds.
    Certify {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        complement: bool,
        /// Also run the exact search.
        #[arg(long)]
        search: bool,
    },
    /// Block sizes and permutations of a 2-regular matrix.
    Canon {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Compare every bound statement against the solver over a grid of
    /// specs.
    CheckTheorems(check::GridArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["matrix", "spec"])))]
struct MatrixInput {
    /// Matrix file, text or JSON.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Spec instead of a matrix file.
    #[arg(long)]
    spec: Option<String>,
    /// With --spec, use the complement.
    #[arg(long, requires = "spec")]
    complement: bool,
}

/// Failure modes, by exit status.
enum Failure {
    /// Malformed input or arguments: exit 2.
    Input(String),
    /// A check ran and failed: exit 1.
    Check(String),
}

type Outcome = Result<(), Failure>;

fn input_error(source: &str, e: Error) -> Failure {
    match e {
        Error::Parse {
            line,
            column,
            message,
        } => Failure::Input(format!("{source}:{line}:{column}: {message}")),
        other => Failure::Input(format!("{source}: {other}")),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> Result<Matrix01, Failure> {
    Matrix01::parse_any(&read(path)?).map_err(|e| input_error(&path.display().to_string(), e))
}

fn read_partition(path: &Path) -> Result<Partition, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| {
        Failure::Input(format!(
            "{}:{}:{}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

fn parse_spec(s: &str) -> Result<BlockSpec, Failure> {
    BlockSpec::parse(s).map_err(|e| input_error("--spec", e))
}

fn spec_matrix(spec: &BlockSpec, complemented: bool) -> Matrix01 {
    circrank_core::certificates::spec_matrix(spec, complemented)
}

impl Common {
    fn search_config(&self) -> SearchConfig {
        SearchConfig {
            time_budget: self.budget.map(Duration::from_secs_f64),
            threads: self.threads,
            ..Default::default()
        }
    }

    fn emit_json(&self, value: &impl Serialize, text: impl FnOnce() -> String) -> Outcome {
        let body = match self.format {
            Format::Json => serde_json::to_string_pretty(value).expect("serializable") + "\n",
            Format::Text => text(),
        };
        match &self.out {
            Some(path) => std::fs::write(path, body)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
            None => {
                print!("{body}");
                Ok(())
            }
        }
    }
}

fn matrix_input(input: &MatrixInput) -> Result<(Matrix01, Option<BlockSpec>), Failure> {
    match (&input.matrix, &input.spec) {
        (Some(path), _) => Ok((read_matrix(path)?, None)),
        (None, Some(s)) => {
            let spec = parse_spec(s)?;
            Ok((spec_matrix(&spec, input.complement), Some(spec)))
        }
        (None, None) => unreachable!("clap requires one input"),
    }
}

fn rects_text(p: &Partition) -> String {
    let mut s = String::new();
    for r in &p.rects {
        let _ = writeln!(s, "{:?} x {:?}", r.rows, r.cols);
    }
    s
}

fn cmd_gen(c: &Common, spec: &str, complemented: bool, shuffle: bool) -> Outcome {
    let spec = parse_spec(spec)?;
    let mut m = spec_matrix(&spec, complemented);
    if shuffle {
        let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
        let mut rows: Vec<usize> = (0..m.n_rows()).collect();
        let mut cols: Vec<usize> = (0..m.n_cols()).collect();
        rows.shuffle(&mut rng);
        cols.shuffle(&mut rng);
        m = permute(&m, &rows, &cols).expect("permutations of the right length");
    }
    c.emit_json(&m, || m.to_text())
}

fn cmd_rank(c: &Common, input: &MatrixInput) -> Outcome {
    let (m, _) = matrix_input(input)?;
    let r = real_rank(&m);
    let value = json!({ "n_rows": m.n_rows(), "n_cols": m.n_cols(), "real_rank": r });
    c.emit_json(&value, || format!("{r}\n"))
}

#[derive(Serialize)]
struct BinrankJson<'a> {
    exact: Option<usize>,
    lower: usize,
    upper: usize,
    witness: &'a Partition,
}

fn cmd_binrank(c: &Common, input: &MatrixInput) -> Outcome {
    let (m, spec) = matrix_input(input)?;
    let mut cfg = c.search_config();
    if let Some(spec) = spec.filter(|s| input.complement && s.all_k_positive()) {
        cfg.seed_partition =
            Some(complement_partition(&spec).map_err(|e| input_error("--spec", e))?);
    }
    let out = binary_rank_exact(&m, &cfg).map_err(|e| input_error("matrix", e))?;
    let value = BinrankJson {
        exact: out.exact,
        lower: out.lower,
        upper: out.upper,
        witness: &out.witness,
    };
    c.emit_json(&value, || {
        let head = match out.exact {
            Some(r) => format!("binary rank {r}\n"),
            None => format!(
                "binary rank in [{}, {}] (budget exhausted)\n",
                out.lower, out.upper
            ),
        };
        head + &rects_text(&out.witness)
    })
}

fn cmd_construct(c: &Common, spec: &str) -> Outcome {
    let spec = parse_spec(spec)?;
    let p = complement_partition(&spec).map_err(|e| input_error("--spec", e))?;
    c.emit_json(&p, || format!("{} rectangles\n{}", p.len(), rects_text(&p)))
}

fn fault_cell(f: &PartitionFault) -> Option<(usize, usize)> {
    match *f {
        PartitionFault::ZeroCell { row, col, .. }
        | PartitionFault::Overlap { row, col, .. }
        | PartitionFault::Uncovered { row, col } => Some((row, col)),
        _ => None,
    }
}

fn cmd_verify(c: &Common, matrix: Option<&Path>, partition: &Path) -> Outcome {
    let mut p = read_partition(partition)?;
    if let Some(path) = matrix {
        let m = read_matrix(path)?;
        if (m.n_rows(), m.n_cols()) != (p.target.n_rows(), p.target.n_cols()) {
            return Err(Failure::Input(format!(
                "{}: matrix is {}x{} but the partition targets {}x{}",
                path.display(),
                m.n_rows(),
                m.n_cols(),
                p.target.n_rows(),
                p.target.n_cols()
            )));
        }
        p.target = m;
    }
    let result = verify_partition(&p);
    let value = match &result {
        Ok(()) => json!({ "valid": true, "rectangles": p.len() }),
        Err(f) => json!({
            "valid": false,
            "rectangles": p.len(),
            "fault": f.to_string(),
            "cell": fault_cell(f),
        }),
    };
    c.emit_json(&value, || match &result {
        Ok(()) => format!("pass: {} rectangles\n", p.len()),
        Err(f) => format!("fail: {f}\n"),
    })?;
    match result {
        Ok(()) => Ok(()),
        Err(f) => Err(Failure::Check(format!("partition is invalid: {f}"))),
    }
}

fn report_text(r: &RankReport) -> String {
    let mut s = format!(
        "{} {}: real rank {}, binary rank in [{}, {}]",
        r.spec,
        if r.complemented {
            "complement"
        } else {
            "matrix"
        },
        r.real_rank,
        r.lower,
        r.upper
    );
    if let Some(e) = r.exact {
        let _ = write!(s, " (exact {e})");
    }
    s.push('\n');
    for c in r.claims.iter().filter(|c| c.applicable) {
        let op = if c.kind == BoundKind::Lower {
            ">="
        } else {
            "<="
        };
        let _ = writeln!(
            s,
            "  {op} {:>3}  {}: {}",
            c.value.unwrap_or(0),
            c.theorem,
            c.reason
        );
    }
    s
}

fn cmd_certify(c: &Common, spec: &str, complemented: bool, search: bool) -> Outcome {
    let spec = parse_spec(spec)?;
    let cfg = c.search_config();
    let report = certify(&spec, complemented, search.then_some(&cfg))
        .map_err(|e| input_error("--spec", e))?;
    c.emit_json(&report, || report_text(&report))
}

fn cmd_canon(c: &Common, matrix: &Path) -> Outcome {
    let m = read_matrix(matrix)?;
    let form =
        canonicalize_2regular(&m).map_err(|e| input_error(&matrix.display().to_string(), e))?;
    c.emit_json(&form, || {
        let sizes: Vec<String> = form.sizes.iter().map(|s| s.to_string()).collect();
        format!("2;{}\n", sizes.join(","))
    })
}

fn run(cli: &Cli) -> Outcome {
    let c = &cli.common;
    match &cli.command {
        Command::Gen {
            spec,
            complement,
            shuffle,
        } => cmd_gen(c, spec, *complement, *shuffle),
        Command::Rank { input } => cmd_rank(c, input),
        Command::Binrank { input } => cmd_binrank(c, input),
        Command::Construct { spec } => cmd_construct(c, spec),
        Command::Verify { matrix, partition } => cmd_verify(c, matrix.as_deref(), partition),
        Command::Certify {
            spec,
            complement,
            search,
        } => cmd_certify(c, spec, *complement, *search),
        Command::Canon { matrix } => cmd_canon(c, matrix),
        Command::CheckTheorems(args) => check::run(c, args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("circrank: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("circrank: {msg}");
            ExitCode::from(2)
        }
    }
}
