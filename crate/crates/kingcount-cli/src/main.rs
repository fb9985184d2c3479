//! Command-line front end over the enumeration engines, the result journal,
//! and the constants pipeline.
//!
//! Exit codes: 0 success, 1 verification failure (fixture mismatch or engine
//! disagreement), 2 usage error, 3 budget or resource error. Standard output
//! is byte-identical for a fixed command, store state, and any thread count.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use kingcount::catalog::{self, Mode, Payload, ResultRecord, Store, SCHEMA_VERSION};
use kingcount::estimate::{
    self, Dataset, DatasetNeeds, DensityKind, EstimateOptions, FitWeighting,
};
use kingcount::kinggraph::{
    brute_force_count_table, brute_force_tile_packings, brute_force_weighted,
};
use kingcount::profile_dp;
use kingcount::wang::{self, ContractOptions};
use kingcount::{BigCount, CountTable, Error, GridShape};

#[derive(Parser)]
#[command(
    name = "kingcount",
    version,
    about = "Exact enumeration of non-attacking king placements on rectangular boards"
)]
struct Cli {
    /// Worker threads inside engine steps (0 = machine parallelism);
    /// never affects output bytes
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Journal path (overrides KINGCOUNT_STORE and the default kingcount.jsonl)
    #[arg(long, global = true)]
    store: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Wang,
    Profile,
    Both,
}

impl Engine {
    fn name(self) -> &'static str {
        match self {
            Engine::Wang => "wang",
            Engine::Profile => "profile",
            Engine::Both => "both",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Records,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    FreeEnergy,
    PeakFreeEnergy,
    WeightedFreeEnergy,
    PeakDensity,
}

impl From<Kind> for DensityKind {
    fn from(kind: Kind) -> DensityKind {
        match kind {
            Kind::FreeEnergy => DensityKind::FreeEnergy,
            Kind::PeakFreeEnergy => DensityKind::PeakFreeEnergy,
            Kind::WeightedFreeEnergy => DensityKind::WeightedFreeEnergy,
            Kind::PeakDensity => DensityKind::PeakDensity,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Weighting {
    AreaSquared,
    Uniform,
}

#[derive(Subcommand)]
enum Command {
    /// Count independent sets of the m x n king graph
    Count {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = Engine::Both)]
        engine: Engine,
        /// Tiles per merged block in the wang engine
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..=8))]
        merge_width: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Append the result to the journal
        #[arg(long, default_value_t = false)]
        record: bool,
    },
    /// Count independent sets of every size c (CSV: c,count)
    Constrained {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = Engine::Both)]
        engine: Engine,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..=8))]
        merge_width: u32,
        /// Report only sizes up to this cap (the wang engine prunes while
        /// sweeping; the profile engine computes the full table first)
        #[arg(long)]
        max_c: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long, default_value_t = false)]
        record: bool,
    },
    /// Vertex-weighted enumeration: sum of set sizes over all independent sets
    Weighted {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = Engine::Both)]
        engine: Engine,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..=8))]
        merge_width: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long, default_value_t = false)]
        record: bool,
    },
    /// CSV table of counts and free-energy densities over a shape range
    Table {
        /// Largest first dimension
        #[arg(long)]
        max_m: u32,
        /// Largest m+n
        #[arg(long)]
        max_sum: u32,
    },
    /// Fit a density observable against the boundary density (m+n)/(mn)
    Estimate {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Smallest board dimension admitted to the fit
        #[arg(long, default_value_t = 10)]
        min_dim: u32,
        /// Largest m+n in the fit grid
        #[arg(long, default_value_t = 40)]
        max_sum: u32,
        #[arg(long, value_enum, default_value_t = Weighting::AreaSquared)]
        weighting: Weighting,
    },
    /// Check journal contents against the embedded reference fixtures
    Verify,
    /// OEIS b-file of counts read by antidiagonals (s = m+n, then m)
    Export {
        /// Largest antidiagonal m+n
        #[arg(long, default_value_t = 12)]
        max_sum: u32,
        /// Write to a file instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force oracle outputs for a small board
    Oracle {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidShape { .. }
        | Error::InsufficientData { .. }
        | Error::DegenerateFit
        | Error::NonPositiveValue
        | Error::NotConcave
        | Error::NonMonotoneIndex { .. } => 2,
        Error::IntegrityError { .. } => 1,
        Error::ShapeTooLarge { .. }
        | Error::MergeWidthOutOfRange { .. }
        | Error::WidthOutOfRange { .. }
        | Error::BudgetExceeded { .. }
        | Error::CorruptJournal { .. }
        | Error::Io(_) => 3,
    }
}

fn store_path(cli: &Cli) -> PathBuf {
    cli.store
        .clone()
        .or_else(|| std::env::var_os("KINGCOUNT_STORE").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("kingcount.jsonl"))
}

fn record_result(
    cli: &Cli,
    shape: GridShape,
    mode: Mode,
    payload: Payload,
    engine: Engine,
    merge_width: u32,
    elapsed: f64,
) -> kingcount::Result<()> {
    let mut store = Store::open(store_path(cli))?;
    store.put(ResultRecord {
        shape,
        mode,
        payload,
        engine: engine.name().to_string(),
        merge_width: match engine {
            Engine::Profile => None,
            _ => Some(merge_width),
        },
        elapsed: Some(elapsed),
        schema_version: SCHEMA_VERSION,
    })
}

fn print_payload(shape: GridShape, mode: Mode, payload: &Payload, engine: Engine, format: Format) {
    match format {
        Format::Text => match payload {
            Payload::Scalar(s) => println!("{s}"),
            Payload::Vector(v) => {
                println!("c,count");
                for (c, value) in v.iter().enumerate() {
                    println!("{c},{value}");
                }
            }
        },
        Format::Csv => match payload {
            Payload::Scalar(s) => {
                println!("m,n,{mode}");
                println!("{},{},{s}", shape.m, shape.n);
            }
            Payload::Vector(v) => {
                println!("c,count");
                for (c, value) in v.iter().enumerate() {
                    println!("{c},{value}");
                }
            }
        },
        Format::Records => {
            let record = ResultRecord {
                shape,
                mode,
                payload: payload.clone(),
                engine: engine.name().to_string(),
                merge_width: None,
                elapsed: None,
                schema_version: SCHEMA_VERSION,
            };
            println!("{}", record.to_json_line());
        }
    }
}

/// Runs a scalar computation on the selected engine(s); in `both` mode the
/// two values must agree exactly or the command fails with exit code 1.
fn scalar_on(
    engine: Engine,
    wang_run: impl Fn() -> kingcount::Result<BigCount>,
    profile_run: impl Fn() -> kingcount::Result<BigCount>,
) -> kingcount::Result<std::result::Result<BigCount, (BigCount, BigCount)>> {
    Ok(match engine {
        Engine::Wang => Ok(wang_run()?),
        Engine::Profile => Ok(profile_run()?),
        Engine::Both => {
            let w = wang_run()?;
            let p = profile_run()?;
            if w == p {
                Ok(w)
            } else {
                Err((w, p))
            }
        }
    })
}

fn run(cli: &Cli) -> kingcount::Result<u8> {
    match &cli.command {
        Command::Count {
            m,
            n,
            engine,
            merge_width,
            format,
            record,
        } => {
            let shape = GridShape::new(*m, *n)?;
            let opts = ContractOptions {
                merge_width: *merge_width as usize,
                threads: cli.threads,
                ..ContractOptions::default()
            };
            let started = Instant::now();
            let outcome = scalar_on(
                *engine,
                || wang::contract_count_with(shape, &opts),
                || profile_dp::dp_count_with(shape, cli.threads),
            )?;
            let value = match outcome {
                Ok(v) => v,
                Err((w, p)) => {
                    eprintln!("engine mismatch for {shape}: wang={w} profile={p}");
                    return Ok(1);
                }
            };
            let payload = Payload::scalar(&value);
            print_payload(shape, Mode::Count, &payload, *engine, *format);
            if *record {
                record_result(
                    cli,
                    shape,
                    Mode::Count,
                    payload,
                    *engine,
                    *merge_width,
                    started.elapsed().as_secs_f64(),
                )?;
            }
            Ok(0)
        }
        Command::Constrained {
            m,
            n,
            engine,
            merge_width,
            max_c,
            format,
            record,
        } => {
            let shape = GridShape::new(*m, *n)?;
            let opts = ContractOptions {
                merge_width: *merge_width as usize,
                threads: cli.threads,
                ..ContractOptions::default()
            };
            let truncate = |mut t: CountTable| {
                if let Some(cap) = max_c {
                    t.counts.truncate(cap + 1);
                }
                t
            };
            let started = Instant::now();
            let table = match engine {
                Engine::Wang => wang::contract_count_by_c_with(shape, &opts, *max_c)?,
                Engine::Profile => truncate(profile_dp::dp_count_by_c_with(shape, cli.threads)?),
                Engine::Both => {
                    let w = wang::contract_count_by_c_with(shape, &opts, *max_c)?;
                    let p = truncate(profile_dp::dp_count_by_c_with(shape, cli.threads)?);
                    if w.counts != p.counts {
                        eprintln!("engine mismatch for {shape} count table");
                        return Ok(1);
                    }
                    w
                }
            };
            let payload = Payload::vector(&table.counts);
            print_payload(shape, Mode::CountByC, &payload, *engine, *format);
            if *record {
                record_result(
                    cli,
                    shape,
                    Mode::CountByC,
                    payload,
                    *engine,
                    *merge_width,
                    started.elapsed().as_secs_f64(),
                )?;
            }
            Ok(0)
        }
        Command::Weighted {
            m,
            n,
            engine,
            merge_width,
            format,
            record,
        } => {
            let shape = GridShape::new(*m, *n)?;
            let opts = ContractOptions {
                merge_width: *merge_width as usize,
                threads: cli.threads,
                ..ContractOptions::default()
            };
            let started = Instant::now();
            let outcome = scalar_on(
                *engine,
                || wang::contract_weighted_with(shape, &opts),
                || profile_dp::dp_weighted_with(shape, cli.threads),
            )?;
            let value = match outcome {
                Ok(v) => v,
                Err((w, p)) => {
                    eprintln!("engine mismatch for {shape}: wang={w} profile={p}");
                    return Ok(1);
                }
            };
            let payload = Payload::scalar(&value);
            print_payload(shape, Mode::Weighted, &payload, *engine, *format);
            if *record {
                record_result(
                    cli,
                    shape,
                    Mode::Weighted,
                    payload,
                    *engine,
                    *merge_width,
                    started.elapsed().as_secs_f64(),
                )?;
            }
            Ok(0)
        }
        Command::Table { max_m, max_sum } => {
            let mut memo: BTreeMap<(u32, u32), kingcount::Result<BigCount>> = BTreeMap::new();
            println!("m,n,count,free_energy");
            for m in 1..=*max_m {
                for n in 1..=max_sum.saturating_sub(m) {
                    let shape = GridShape::new(m, n)?;
                    let canonical = shape.canonicalize();
                    let value = memo
                        .entry((canonical.m, canonical.n))
                        .or_insert_with(|| profile_dp::dp_count_with(canonical, cli.threads));
                    match value {
                        Ok(count) => {
                            let density = estimate::ln_big(count)? / shape.area() as f64;
                            println!("{m},{n},{count},{density:.12}");
                        }
                        // Marked, not fabricated.
                        Err(_) => println!("{m},{n},unavailable,"),
                    }
                }
            }
            Ok(0)
        }
        Command::Estimate {
            kind,
            min_dim,
            max_sum,
            weighting,
        } => {
            let kind: DensityKind = (*kind).into();
            let shapes = estimate::desk_grid(*min_dim, *max_sum);
            let needs = match kind {
                DensityKind::FreeEnergy => DatasetNeeds::counts_only(),
                DensityKind::WeightedFreeEnergy => DatasetNeeds {
                    tables: false,
                    weighted: true,
                },
                _ => DatasetNeeds {
                    tables: true,
                    weighted: false,
                },
            };
            let dataset = Dataset::compute(&shapes, needs, cli.threads)?;
            let opts = EstimateOptions {
                min_dim: *min_dim,
                weighting: match weighting {
                    Weighting::AreaSquared => FitWeighting::AreaSquared,
                    Weighting::Uniform => FitWeighting::Uniform,
                },
            };
            let fit = estimate::estimate_constants(&dataset, kind, &opts)?;
            println!("kind: {}", kind.label());
            println!("points: {}", fit.points_used);
            println!(
                "intercept: {:.12} +/- {:.12}",
                fit.intercept, fit.residual_max
            );
            println!("slope: {:.12}", fit.slope);
            Ok(0)
        }
        Command::Verify => {
            let store = Store::open(store_path(cli))?;
            let report = catalog::verify_fixtures(&store);
            print!("{report}");
            Ok(u8::from(report.has_failures()))
        }
        Command::Export { max_sum, out } => {
            let mut memo: BTreeMap<(u32, u32), BigCount> = BTreeMap::new();
            let mut values = Vec::new();
            let mut index = 0u64;
            for s in 2..=*max_sum {
                for m in 1..s {
                    let shape = GridShape::new(m, s - m)?.canonicalize();
                    let count = match memo.get(&(shape.m, shape.n)) {
                        Some(v) => v.clone(),
                        None => {
                            let v = profile_dp::dp_count_with(shape, cli.threads)?;
                            memo.insert((shape.m, shape.n), v.clone());
                            v
                        }
                    };
                    index += 1;
                    values.push((index, count));
                }
            }
            let text = catalog::export_bfile(&values)?;
            match out {
                Some(path) => std::fs::write(path, text + "\n")?,
                None => println!("{text}"),
            }
            Ok(0)
        }
        Command::Oracle { m, n } => {
            let shape = GridShape::new(*m, *n)?;
            let table = brute_force_count_table(shape)?;
            let weighted = brute_force_weighted(shape)?;
            println!("c,count");
            for (c, count) in table.counts.iter().enumerate() {
                println!("{c},{count}");
            }
            println!("total,{}", table.total());
            println!("weighted,{weighted}");
            if let Ok(packings) = brute_force_tile_packings(shape) {
                println!("packings,{packings}");
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
