use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use listpac::dims::{kds_dimension, kexp_dimension, knat_dimension, sauer_check};
use listpac::hclass::{generate_example1, generate_grid, parse_class, parse_sample, random_class};
use listpac::learn::{compress, parse_compression, reconstruct, CompressConfig, OneInclusionLearner, SchemeDims};
use listpac::oig::{degree_stats, DEFAULT_AVD_CAP};
use listpac::orient::{exact_min_max_outdegree, greedy_orientation, validate, DegreeBound, DEFAULT_EXACT_CAP};
use listpac::shift::shift_fixed_point;
use listpac::xp::{
    hard_instance_error, learning_curve, ExperimentConfig, FiniteDistribution, HardInstanceReport,
    DEFAULT_ENUMERATION_BUDGET, LEARNING_CURVE_SCHEMA, PRNG_ID,
};
use listpac::{ExactDegreeStats, HypothesisClass, OneInclusionGraph, Rational};

#[derive(Parser)]
#[command(name = "listpac", about = "List learning on finite hypothesis classes", disable_version_flag = true)]
struct Cli {
    /// Print version, output schema and PRNG identifiers.
    #[arg(long, short = 'V')]
    version: bool,

    /// Cap on worker threads.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,

    /// Write data here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args)]
struct ClassArg {
    /// HCF file, or a generator: `grid:D:P`, `example1:M:B`, `random:M:P:SIZE:SEED`.
    #[arg(long)]
    class: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Kds,
    Knat,
    Kexp,
}

#[derive(Subcommand)]
enum Command {
    /// One dimension as a CSV row `kind,k,value,exhaustive,witness`.
    Dims {
        #[command(flatten)]
        class: ClassArg,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, value_parser = k_parser())]
        k: u64,
        /// Shattering-check budget; exceeding it gives a non-exhaustive lower bound.
        #[arg(long, default_value_t = u64::MAX)]
        cap: u64,
    },
    /// Vertex and edge counts, average degrees and the degree histogram.
    Oig {
        #[command(flatten)]
        class: ClassArg,
        #[arg(long, value_parser = k_parser())]
        k: u64,
    },
    /// Shift to the downward-closed fixed point; prints the final class.
    Shift {
        #[command(flatten)]
        class: ClassArg,
        /// Also write the step trace CSV here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Orient the one-inclusion graph into k-lists.
    Orient {
        #[command(flatten)]
        class: ClassArg,
        #[arg(long, value_parser = k_parser())]
        k: u64,
        /// Degree premise: `none`, `ds:D` or `exp:D`.
        #[arg(long, default_value = "none", value_parser = parse_bound)]
        bound: DegreeBound,
        /// Minimize the maximum outdegree exactly (tiny graphs only).
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
        cap: u64,
    },
    /// The one-inclusion k-list at one point.
    Predict {
        #[command(flatten)]
        class: ClassArg,
        /// File of `point label` lines, 1-based points.
        #[arg(long)]
        sample: PathBuf,
        /// 1-based query point.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        point: u64,
        #[arg(long, value_parser = k_parser())]
        k: u64,
    },
    /// Compress a realizable sample into a reconstructable subsample.
    Compress {
        #[command(flatten)]
        class: ClassArg,
        #[arg(long)]
        sample: PathBuf,
        #[arg(long, value_parser = k_parser())]
        k: u64,
        #[arg(long, default_value_t = 1)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Stage-2 sequence length override.
        #[arg(long)]
        n: Option<usize>,
        /// Stage-2 sequence count override.
        #[arg(long)]
        l: Option<usize>,
    },
    /// Rebuild the list hypothesis from a compression file.
    Reconstruct {
        #[command(flatten)]
        class: ClassArg,
        /// Output of `compress`.
        #[arg(long)]
        input: PathBuf,
    },
    /// Learning curve of the compression learner under a finite distribution.
    Simulate {
        #[command(flatten)]
        class: ClassArg,
        #[arg(long, value_parser = k_parser())]
        k: u64,
        #[arg(long, default_value_t = 1)]
        t: usize,
        /// Comma separated sample sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        m_grid: Vec<usize>,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// 1-based row of the class labelling the distribution.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        target: u64,
        /// Comma separated positive point weights (default uniform).
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<u64>>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        l: Option<usize>,
    },
    /// Exact and sampled error of the one-inclusion learner on the hard instance.
    Lowerbound {
        #[command(flatten)]
        class: ClassArg,
        #[arg(long, value_parser = k_parser())]
        k: u64,
        /// Number of coordinates of the hard instance.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_AVD_CAP)]
        avd_cap: u64,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
        budget: u128,
    },
    /// Check the list Sauer bound against the k-Natarajan dimension.
    Sauer {
        #[command(flatten)]
        class: ClassArg,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        k: u64,
    },
}

fn k_parser() -> clap::builder::RangedU64ValueParser<u64> {
    clap::value_parser!(u64).range(1..)
}

fn parse_bound(s: &str) -> Result<DegreeBound, String> {
    if s == "none" {
        return Ok(DegreeBound::None);
    }
    let (kind, value) = s.split_once(':').ok_or_else(|| format!("expected none, ds:D or exp:D, got {s:?}"))?;
    let d: usize = value.parse().map_err(|_| format!("not a dimension: {value:?}"))?;
    match kind {
        "ds" => Ok(DegreeBound::DsDimension(d)),
        "exp" => Ok(DegreeBound::ExpDimension(d)),
        _ => Err(format!("unknown bound kind {kind:?}")),
    }
}

/// Failure of a well-formed invocation (exit code 1).
struct Failure(String);

impl From<listpac::Error> for Failure {
    fn from(e: listpac::Error) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<String, Failure>;

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_class(source: &str) -> Result<HypothesisClass, Failure> {
    let parts: Vec<&str> = source.split(':').collect();
    let nums = |n: usize| -> Result<Vec<u64>, Failure> {
        if parts.len() != n + 1 {
            return Err(Failure(format!("generator {:?} takes {n} parameters", parts[0])));
        }
        parts[1..]
            .iter()
            .map(|p| p.parse::<u64>().map_err(|_| Failure(format!("bad generator parameter {p:?}"))))
            .collect()
    };
    let class = match parts[0] {
        "grid" if parts.len() > 1 => {
            let v = nums(2)?;
            generate_grid(v[0] as usize, v[1] as u32)?
        }
        "example1" if parts.len() > 1 => {
            let v = nums(2)?;
            generate_example1(v[0] as usize, v[1] as usize)?
        }
        "random" if parts.len() > 1 => {
            let v = nums(4)?;
            random_class(v[0] as usize, v[1] as u32, v[2] as usize, v[3])?
        }
        _ => parse_class(&read(&PathBuf::from(source))?).map_err(|e| Failure(format!("{source}: {e}")))?,
    };
    Ok(class)
}

fn dims(class: &HypothesisClass, kind: Kind, k: usize, cap: u64) -> Outcome {
    let report = match kind {
        Kind::Kds => kds_dimension(class, k, cap)?,
        Kind::Knat => knat_dimension(class, k, cap)?,
        Kind::Kexp => kexp_dimension(class, k, cap)?,
    };
    Ok(report.to_csv_row() + "\n")
}

fn oig(class: &HypothesisClass, k: usize) -> Outcome {
    let graph = OneInclusionGraph::build(class);
    let stats: ExactDegreeStats = degree_stats(&graph, k);
    let mut out = String::from("vertices,edges,k,avd,savd\n");
    writeln!(out, "{},{},{},{},{}", graph.num_vertices(), graph.edges().len(), k, stats.avd, stats.savd).unwrap();
    out.push_str("degree,count\n");
    for d in 0..=class.num_coords() {
        let count = stats.degrees.iter().filter(|&&x| x == d).count();
        if count > 0 {
            writeln!(out, "{d},{count}").unwrap();
        }
    }
    Ok(out)
}

fn orient(class: &HypothesisClass, k: usize, bound: DegreeBound, exact: bool, cap: u64) -> Outcome {
    let graph = OneInclusionGraph::build(class);
    let (sigma, summary) = if exact {
        let (sigma, value) = exact_min_max_outdegree(&graph, k, cap)?;
        (sigma, format!("# max_outdegree={value} bound=exact"))
    } else {
        let g = greedy_orientation(&graph, k, bound)?;
        let bound = match bound.value(k) {
            Some(b) => b.to_string(),
            None => "none".into(),
        };
        let summary = format!("# max_outdegree={} bound={bound} peel_degree={}", g.max_outdegree, g.max_peel_degree);
        (g.orientation, summary)
    };
    validate(&graph, &sigma)?;
    let mut out = String::from("direction,key,oriented\n");
    for (id, edge) in graph.edges().iter().enumerate() {
        let key: Vec<String> = graph.edge_key(id).iter().map(|y| y.to_string()).collect();
        let list: Vec<String> = sigma.list(id).iter().map(|v| (v + 1).to_string()).collect();
        writeln!(out, "{},{},{}", edge.direction + 1, key.join(" "), list.join(" ")).unwrap();
    }
    out.push_str(&summary);
    out.push('\n');
    Ok(out)
}

fn lowerbound(report: &HardInstanceReport<Rational>, k: usize, m: usize) -> String {
    let f = |r: &Rational| num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN);
    let exact = report.exact.as_ref().map(|e| e.to_string()).unwrap_or_else(|| "NA".into());
    let meets = report.exact_meets_bound().map(|b| b.to_string()).unwrap_or_else(|| "NA".into());
    let mut out =
        String::from("m,k,mu,coords,family_size,bound,bound_f64,proof_bound,exact,exact_f64,monte_carlo,trials,meets_bound\n");
    writeln!(
        out,
        "{m},{k},{},{},{},{},{:.6},{},{exact},{},{:.6},{},{meets}",
        report.density.value,
        report.density.coords.to_one_based_string(),
        report.family_size,
        report.bound,
        f(&report.bound),
        report.proof_bound,
        report.exact.as_ref().map(|e| format!("{:.6}", f(e))).unwrap_or_else(|| "NA".into()),
        f(&report.monte_carlo),
        report.trials,
    )
    .unwrap();
    out
}

fn run(cli: Cli) -> Result<(String, Option<(PathBuf, String)>), Failure> {
    let command = cli.command.expect("checked by caller");
    let mut extra = None;
    let out = match command {
        Command::Dims { class, kind, k, cap } => dims(&load_class(&class.class)?, kind, k as usize, cap)?,
        Command::Oig { class, k } => oig(&load_class(&class.class)?, k as usize)?,
        Command::Shift { class, trace } => {
            let t = shift_fixed_point(&load_class(&class.class)?);
            if let Some(path) = trace {
                extra = Some((path, t.to_csv()));
            }
            t.final_class.to_hcf()
        }
        Command::Orient { class, k, bound, exact, cap } => {
            orient(&load_class(&class.class)?, k as usize, bound, exact, cap)?
        }
        Command::Predict { class, sample, point, k } => {
            let h = load_class(&class.class)?;
            let s = parse_sample(&read(&sample)?)?;
            let list = OneInclusionLearner::new(&h, k as usize)?.predict(&s, point as usize - 1)?;
            let labels: Vec<String> = list.iter().map(|y| y.to_string()).collect();
            labels.join(" ") + "\n"
        }
        Command::Compress { class, sample, k, t, seed, n, l } => {
            let h = load_class(&class.class)?;
            let s = parse_sample(&read(&sample)?)?;
            let config = CompressConfig { k: k as usize, t, seed, n, l };
            let result = compress(&h, &s, &config, None)?;
            if !result.certified {
                return Err(Failure("compression did not certify a cover of the sample".into()));
            }
            result.to_text()
        }
        Command::Reconstruct { class, input } => {
            let h = load_class(&class.class)?;
            let (selected, params) = parse_compression(&read(&input)?)?;
            reconstruct(&h, &selected, &params)?.to_csv()
        }
        Command::Simulate { class, k, t, m_grid, trials, seed, delta, epsilon, target, weights, n, l } => {
            let h = load_class(&class.class)?;
            let row = h
                .rows()
                .get(target as usize - 1)
                .ok_or_else(|| Failure(format!("--target {target} exceeds the {} rows of the class", h.len())))?;
            let weights = weights.unwrap_or_else(|| vec![1; h.num_coords()]);
            if weights.len() != h.num_coords() {
                return Err(Failure(format!("--weights needs {} entries", h.num_coords())));
            }
            let dist = FiniteDistribution::labeled_by(row, &weights)?;
            let config = ExperimentConfig { seed, trials: trials as usize, m_grid, k: k as usize, t, delta, epsilon, n, l };
            let dims = SchemeDims::compute(&h, k as usize, u64::MAX)?;
            learning_curve(&h, &dist, &config, dims)?.to_csv()
        }
        Command::Lowerbound { class, k, m, trials, seed, avd_cap, budget } => {
            let h = load_class(&class.class)?;
            let report = hard_instance_error(&h, k as usize, m as usize, trials, seed, avd_cap, budget)?;
            lowerbound(&report, k as usize, m as usize)
        }
        Command::Sauer { class, k } => {
            let r = sauer_check(&load_class(&class.class)?, k as usize)?;
            let verdict = if r.holds { "OK" } else { "FAIL" };
            let line = format!("{verdict} bound={} size={}\n", r.bound, r.size);
            if !r.holds {
                return Err(Failure(line.trim_end().to_string()));
            }
            line
        }
    };
    Ok((out, extra))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if cli.version {
        println!(
            "listpac {}\nschema {LEARNING_CURVE_SCHEMA}\nprng {PRNG_ID}",
            env!("CARGO_PKG_VERSION")
        );
        return ExitCode::SUCCESS;
    }
    if cli.command.is_none() {
        eprintln!("error: a subcommand is required\n\nUsage: listpac <COMMAND>\n\nFor more information, try '--help'.");
        return ExitCode::from(2);
    }
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(1);
        }
    }
    let out_path = cli.out.clone();
    match run(cli) {
        Ok((data, extra)) => {
            if let Some((path, text)) = extra {
                if let Err(e) = fs::write(&path, text) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            let written = match &out_path {
                Some(path) => fs::write(path, data).map_err(|e| format!("{}: {e}", path.display())),
                None => std::io::stdout().write_all(data.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Err(Failure(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
