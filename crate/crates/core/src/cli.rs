//! Command-line front end. Every subcommand renders its whole output into a
//! string, written to `--out` or standard output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::alpha::AlphaParam;
use crate::decomposition::coupled_grow;
use crate::error::{Error, Result};
use crate::growth::{enumerate_growth, grow_abstract, grow_planar_traced, GrowthOutcome};
use crate::moments::{exact_expectations, gamma_exponent};
use crate::observables::{count_F, count_F_region, Region};
use crate::rng::{master_rng, replicate_rng};
use crate::seedtest::{distinguish, is_blind};
use crate::trees::{DecoratedTree, PlaneTree, Tree};

const EXIT_CODES: &str = "Exit codes:
  0  success
  2  invalid input or configuration (including parse errors)
  3  an enumeration or search cap was exceeded
  4  a precondition failed (e.g. isomorphic seeds, blind pattern)";

#[derive(Debug, Parser)]
#[command(name = "pa-seed", version, about = "Seed recognition for α-preferential-attachment trees", after_help = EXIT_CODES)]
pub struct Cli {
    /// Worker threads for Monte Carlo stages (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write output here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Grow a tree from a seed.
    Grow {
        #[arg(long)]
        seed: PathBuf,
        #[arg(long, default_value = "1")]
        alpha: AlphaParam,
        #[arg(long)]
        n: usize,
        #[arg(long = "seed-rng", default_value_t = 0)]
        seed_rng: u64,
        /// Keep the plane embedding and corner colours.
        #[arg(long)]
        planar: bool,
        /// Also print the corner chosen at each step (implies --planar).
        #[arg(long)]
        trajectory: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Evaluate F_τ on a tree.
    Observe {
        #[arg(long)]
        tau: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        /// Restrict to embeddings meeting (`intersects`), inside or outside the seed.
        #[arg(long, requires = "seed_size")]
        region: Option<Region>,
        #[arg(long)]
        seed_size: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Exact E[F_τ(T_n)] as CSV.
    Moments {
        #[arg(long)]
        tau: PathBuf,
        #[arg(long)]
        seed: PathBuf,
        #[arg(long, default_value = "1")]
        alpha: AlphaParam,
        #[arg(long = "n-list", value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Growth exponents of E[F_τ(T_n)].
    Exponents {
        #[arg(long)]
        tau: PathBuf,
        #[arg(long, default_value = "1")]
        alpha: AlphaParam,
        #[command(flatten)]
        output: Output,
    },
    /// Whether τ is blind for two seeds of equal size.
    Blind {
        #[arg(long)]
        seed1: PathBuf,
        #[arg(long)]
        seed2: PathBuf,
        #[arg(long)]
        tau: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Full distinguishing report as JSON.
    Distinguish {
        #[arg(long)]
        seed1: PathBuf,
        #[arg(long)]
        seed2: PathBuf,
        #[arg(long, default_value = "1")]
        alpha: AlphaParam,
        #[arg(long = "n-list", value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        #[arg(long = "seed-rng", default_value_t = 0)]
        seed_rng: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Coupled growth of two plane seeds; per-replicate F_τ as CSV.
    Couple {
        #[arg(long)]
        seed1: PathBuf,
        #[arg(long)]
        seed2: PathBuf,
        #[arg(long)]
        tau: PathBuf,
        #[arg(long, default_value = "1")]
        alpha: AlphaParam,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        #[arg(long = "seed-rng", default_value_t = 0)]
        seed_rng: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Exact law of T_n grown from a seed, as CSV.
    Oracle {
        #[arg(long)]
        seed: PathBuf,
        #[arg(long, default_value = "1")]
        alpha: AlphaParam,
        #[arg(long)]
        n: usize,
        /// Merge isomorphic outcomes.
        #[arg(long)]
        canonical: bool,
        #[command(flatten)]
        output: Output,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
}

fn read_tree(path: &Path) -> Result<Tree> {
    Tree::parse(&read(path)?)
}

fn read_decorated(path: &Path) -> Result<DecoratedTree> {
    DecoratedTree::parse(&read(path)?)
}

fn read_plane(path: &Path) -> Result<PlaneTree> {
    PlaneTree::parse(&read(path)?)
}

impl Command {
    fn output(&self) -> &Output {
        match self {
            Command::Grow { output, .. }
            | Command::Observe { output, .. }
            | Command::Moments { output, .. }
            | Command::Exponents { output, .. }
            | Command::Blind { output, .. }
            | Command::Distinguish { output, .. }
            | Command::Couple { output, .. }
            | Command::Oracle { output, .. } => output,
        }
    }
}

/// Runs one subcommand and returns its rendered output.
pub fn render(command: &Command) -> Result<String> {
    let mut out = String::new();
    match command {
        Command::Grow { seed, alpha, n, seed_rng, planar, trajectory, .. } => {
            let mut rng = master_rng(*seed_rng);
            if *planar || *trajectory {
                let text = read(seed)?;
                let seed = PlaneTree::parse(&text).or_else(|_| PlaneTree::from_tree(Tree::parse(&text)?))?;
                let (tree, trace) = grow_planar_traced(&seed, *alpha, *n, &mut rng)?;
                out.push_str(&tree.to_text());
                if *trajectory {
                    for step in trace {
                        writeln!(out, "# {step}").unwrap();
                    }
                }
            } else {
                out.push_str(&grow_abstract(&read_tree(seed)?, *alpha, *n, &mut rng)?.to_text());
            }
        }
        Command::Observe { tau, tree, region, seed_size, .. } => {
            let tau = read_decorated(tau)?;
            let tree = read_tree(tree)?;
            let value = match region {
                Some(r) => count_F_region(&tau, &tree, seed_size.unwrap_or(0), *r)?,
                None => count_F(&tau, &tree),
            };
            writeln!(out, "{value}").unwrap();
        }
        Command::Moments { tau, seed, alpha, n_list, .. } => {
            check_increasing(n_list)?;
            let tau = read_decorated(tau)?;
            let values = exact_expectations(&tau, &read_tree(seed)?, *alpha, n_list)?;
            out.push_str("n,expectation_num,expectation_den,float\n");
            for (n, v) in n_list.iter().zip(values) {
                let r = v.to_rational();
                writeln!(out, "{n},{},{},{:e}", r.numer(), r.denom(), v.to_f64()).unwrap();
            }
        }
        Command::Exponents { tau, alpha, .. } => {
            let tau = read_decorated(tau)?;
            let report = gamma_exponent(&tau, *alpha)?;
            writeln!(out, "weight\t{}", tau.weight()).unwrap();
            writeln!(out, "power\t{}", report.power).unwrap();
            writeln!(out, "log_power\t{}", report.log_power).unwrap();
            writeln!(out, "critical\t{}", report.critical).unwrap();
        }
        Command::Blind { seed1, seed2, tau, .. } => {
            let tau = read_tree(tau)?;
            let report = is_blind(&tau, &read_tree(seed1)?, &read_tree(seed2)?)?;
            let edges: Vec<String> = tau.edges().iter().map(|(u, v)| format!("{u}-{v}")).collect();
            writeln!(out, "tau\tn={} edges={}", tau.vertex_count(), edges.join(",")).unwrap();
            writeln!(out, "is_blind\t{}", report.is_blind).unwrap();
            let witness = match &report.witness {
                Some(d) => format!("d={}", join(d.values(), ",")),
                None => "none".to_string(),
            };
            writeln!(out, "witness\t{witness}").unwrap();
        }
        Command::Distinguish { seed1, seed2, alpha, n_list, reps, seed_rng, .. } => {
            let report = distinguish(&read_tree(seed1)?, &read_tree(seed2)?, *alpha, n_list, *reps, *seed_rng)?;
            out.push_str(&report.to_json());
            out.push('\n');
        }
        Command::Couple { seed1, seed2, tau, alpha, n, reps, seed_rng, .. } => {
            let (s1, s2) = (read_plane(seed1)?, read_plane(seed2)?);
            let tau = read_decorated(tau)?;
            let k = s1.vertex_count();
            out.push_str("replicate,first,second,first_outside,second_outside\n");
            for i in 0..*reps {
                let mut rng = replicate_rng(*seed_rng, i as u64);
                let c = coupled_grow(&s1, &s2, *alpha, *n, &mut rng)?;
                let (a, b) = (c.first.tree(), c.second.tree());
                writeln!(
                    out,
                    "{i},{},{},{},{}",
                    count_F(&tau, a),
                    count_F(&tau, b),
                    count_F_region(&tau, a, k, Region::OutsideSeed)?,
                    count_F_region(&tau, b, k, Region::OutsideSeed)?
                )
                .unwrap();
            }
        }
        Command::Oracle { seed, alpha, n, canonical, .. } => {
            let law = enumerate_growth(&read_tree(seed)?, *alpha, *n, *canonical)?;
            out.push_str(&write_oracle_csv(&law));
        }
    }
    Ok(out)
}

fn check_increasing(n_list: &[usize]) -> Result<()> {
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("n list must be strictly increasing"));
    }
    Ok(())
}

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

/// CSV with columns `probability_num,probability_den,float,vertices,edges`;
/// edges are `u-v` pairs separated by `;`.
pub fn write_oracle_csv(law: &[GrowthOutcome]) -> String {
    let mut out = String::from("probability_num,probability_den,float,vertices,edges\n");
    for o in law {
        let edges: Vec<String> = o.tree.edges().iter().map(|(u, v)| format!("{u}-{v}")).collect();
        writeln!(
            out,
            "{},{},{:e},{},{}",
            o.probability.numer(),
            o.probability.denom(),
            o.probability.to_f64().unwrap_or(f64::NAN),
            o.tree.vertex_count(),
            edges.join(";")
        )
        .unwrap();
    }
    out
}

/// Inverse of [`write_oracle_csv`].
pub fn read_oracle_csv(text: &str) -> Result<Vec<GrowthOutcome>> {
    let mut lines = text.lines();
    if lines.next() != Some("probability_num,probability_den,float,vertices,edges") {
        return Err(Error::parse("unexpected oracle header"));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let bad = || Error::parse(format!("oracle row {}: {line:?}", i + 1));
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 5 {
                return Err(bad());
            }
            let num: BigInt = cols[0].parse().map_err(|_| bad())?;
            let den: BigInt = cols[1].parse().map_err(|_| bad())?;
            let n: usize = cols[3].parse().map_err(|_| bad())?;
            let edges = cols[4]
                .split(';')
                .filter(|s| !s.is_empty())
                .map(|e| {
                    let (u, v) = e.split_once('-').ok_or_else(bad)?;
                    Ok((u.parse().map_err(|_| bad())?, v.parse().map_err(|_| bad())?))
                })
                .collect::<Result<Vec<(usize, usize)>>>()?;
            if den == BigInt::from(0) {
                return Err(bad());
            }
            Ok(GrowthOutcome {
                tree: Tree::from_edges(n, &edges)?,
                probability: BigRational::new(num, den),
            })
        })
        .collect()
}

/// Parses arguments, runs, writes output; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(threads) = cli.threads {
        // a second build in the same process fails; the existing pool is kept
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let result = render(&cli.command).and_then(|text| match &cli.command.output().out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::invalid(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
