use clap::{Args, Parser, Subcommand, ValueEnum};
use netmoment::bootstrap::{
    resample_distribution, subsample_distribution, BootstrapOptions, Scheme,
};
use netmoment::edgeworth::{
    applicability_warning, default_grid, expansion_cdf, expansion_cdf_clamped, rate_bound,
    write_grid_csv, EdgeworthCoefficients,
};
use netmoment::graph::parse_edge_list;
use netmoment::graphon::{sample_network, GraphonSpec, RhoSpec};
use netmoment::harness::{
    run_accuracy_experiment, run_coverage_experiment, run_sparsity_sweep, summarize, write_csv,
    write_summary_csv, ExperimentConfig, MotifSpec,
};
use netmoment::inference::{confidence_interval, one_sample_test, CiMethod};
use netmoment::moments::{compute_stats, jackknife_variance, Studentization};
use netmoment::{AdjacencyMatrix, Error, Motif, Result};
use serde_json::json;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "netmoment",
    version,
    about = "Network motif moments and Edgeworth inference"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphArgs {
    /// Edge list: one `i j` pair per line, 1-based, `#` comments.
    #[arg(long)]
    graph: PathBuf,
    /// Node count, when isolated nodes are not listed.
    #[arg(long)]
    nodes: Option<usize>,
    /// Built-in name (edge, triangle, vshape, three-star) or inline JSON
    /// `{"nodes": r, "edges": [[1,2], ...]}`.
    #[arg(long, default_value = "triangle")]
    motif: String,
}

impl GraphArgs {
    fn load(&self) -> Result<(AdjacencyMatrix, Motif)> {
        let text = std::fs::read_to_string(&self.graph)?;
        let a = parse_edge_list(&text, self.nodes)?;
        let m = MotifSpec::parse(&self.motif)?.build()?;
        Ok((a, m))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Accuracy,
    Coverage,
    Sparsity,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a network from a graphon and print it as an edge list.
    Sample {
        /// Name (smooth, nonsmooth, two-block) or JSON spec.
        #[arg(long, default_value = "two-block")]
        graphon: String,
        #[arg(long)]
        n: usize,
        /// `1`, `n^-1/4`, `n^-1/2`, `n^-1` or a number in (0, 1].
        #[arg(long, default_value = "1")]
        rho: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample moment, variance estimates and Edgeworth coefficients.
    Moments {
        #[command(flatten)]
        g: GraphArgs,
        /// Include the per-node projections.
        #[arg(long)]
        g1: bool,
    },
    /// Empirical Edgeworth CDF on a grid, as CSV.
    Edgeworth {
        #[command(flatten)]
        g: GraphArgs,
        /// Clamp values to [0, 1] for display.
        #[arg(long)]
        clamp: bool,
        /// Sparsity used for the applicability check and the rate bound.
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        /// Assert that the local projection is non-lattice.
        #[arg(long)]
        nonlattice: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-sided confidence interval for the population moment.
    Ci {
        #[command(flatten)]
        g: GraphArgs,
        #[arg(long, default_value_t = 0.2)]
        alpha: f64,
        #[arg(long, default_value = "edgeworth")]
        method: String,
    },
    /// One-sample test of H0: mu = null.
    Test {
        #[command(flatten)]
        g: GraphArgs,
        #[arg(long)]
        null: f64,
    },
    /// Bootstrap replicates of the studentized moment, as CSV.
    Bootstrap {
        #[command(flatten)]
        g: GraphArgs,
        #[arg(long, default_value = "subsample")]
        scheme: String,
        /// Sub-sample size; defaults to n/2.
        #[arg(long)]
        nstar: Option<usize>,
        #[arg(long = "B", alias = "b", default_value_t = 500)]
        b: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Studentize replicates with the jackknife variance.
        #[arg(long)]
        jackknife: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a simulation protocol from a JSON config.
    Experiment {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output path; stdout if neither is set.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write per-configuration means and standard deviations.
        #[arg(long)]
        summary: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sample {
            graphon,
            n,
            rho,
            seed,
            out,
        } => {
            let g = GraphonSpec::parse(&graphon)?.build()?;
            let rho = RhoSpec::parse(&rho)?.resolve(n);
            let a = sample_network(&g, rho, n, seed)?;
            let mut w = output(out.as_ref())?;
            w.write_all(a.to_edge_list().as_bytes())?;
            w.flush()?;
        }
        Command::Moments { g, g1 } => {
            let (a, m) = g.load()?;
            let stats = compute_stats(&a, &m)?;
            let jack = if a.n() > m.r() {
                Some(jackknife_variance(&a, &m)?)
            } else {
                None
            };
            let mut v = json!({
                "motif": stats.motif,
                "n": stats.n,
                "r": stats.r,
                "u_hat": stats.u_hat,
                "s_hat_sq": stats.s_hat_sq,
                "s_hat_sq_jackknife": jack,
                "xi1_hat_sq": stats.xi1_hat_sq,
                "e_g1_cubed": stats.e_g1_cubed,
                "e_g1g1g2": stats.e_g1g1g2,
                "degenerate": stats.degenerate,
            });
            if g1 {
                v["g1_hat"] = json!(stats.g1_hat);
            }
            print_json(&v)?;
        }
        Command::Edgeworth {
            g,
            clamp,
            rho,
            nonlattice,
            out,
        } => {
            let (a, m) = g.load()?;
            let stats = compute_stats(&a, &m)?;
            let c = EdgeworthCoefficients::empirical(&stats)?;
            if let Some(w) = applicability_warning(rho, a.n(), nonlattice) {
                eprintln!("warning: {w}");
            }
            eprintln!("rate bound: {}", rate_bound(rho, a.n(), &m)?);
            let grid = default_grid();
            let values: Vec<f64> = grid
                .iter()
                .map(|&x| {
                    if clamp {
                        expansion_cdf_clamped(&c, x)
                    } else {
                        expansion_cdf(&c, x)
                    }
                })
                .collect();
            let mut w = output(out.as_ref())?;
            write_grid_csv(&mut w, &grid, &values)?;
            w.flush()?;
        }
        Command::Ci { g, alpha, method } => {
            let (a, m) = g.load()?;
            let method: CiMethod = method.parse()?;
            let stats = compute_stats(&a, &m)?;
            let ci = confidence_interval(&stats, alpha, method)?;
            print_json(&json!({
                "motif": stats.motif,
                "n": stats.n,
                "u_hat": stats.u_hat,
                "s_hat": stats.s_hat(),
                "lo": ci.lo,
                "hi": ci.hi,
                "alpha": ci.alpha,
                "method": ci.method,
                "warning": ci.warning,
            }))?;
        }
        Command::Test { g, null } => {
            let (a, m) = g.load()?;
            let stats = compute_stats(&a, &m)?;
            let t = one_sample_test(&stats, null)?;
            let mut v = serde_json::to_value(&t)?;
            v["motif"] = json!(stats.motif);
            v["n"] = json!(stats.n);
            print_json(&v)?;
        }
        Command::Bootstrap {
            g,
            scheme,
            nstar,
            b,
            seed,
            jackknife,
            out,
        } => {
            let (a, m) = g.load()?;
            let opts = BootstrapOptions {
                studentization: if jackknife {
                    Studentization::Jackknife
                } else {
                    Studentization::Plugin
                },
                ..Default::default()
            };
            let d = match scheme.parse::<Scheme>()? {
                Scheme::Subsample => {
                    subsample_distribution(&a, &m, nstar.unwrap_or(a.n() / 2), b, seed, &opts)?
                }
                Scheme::Resample => resample_distribution(&a, &m, b, seed, &opts)?,
            };
            let mut w = output(out.as_ref())?;
            writeln!(w, "replicate")?;
            for v in d.cdf.samples() {
                writeln!(w, "{v}")?;
            }
            w.flush()?;
            let qs: Vec<_> = [0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95]
                .iter()
                .map(|&p| json!({"p": p, "q": d.cdf.quantile(p)}))
                .collect();
            eprintln!(
                "{}",
                json!({"replicates": d.replicates, "dropped": d.dropped, "quantiles": qs})
            );
        }
        Command::Experiment {
            kind,
            config,
            out,
            summary,
            threads,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if threads.is_some() {
                cfg.threads = threads;
            }
            let records = match kind {
                Kind::Accuracy => run_accuracy_experiment(&cfg)?,
                Kind::Coverage => run_coverage_experiment(&cfg)?,
                Kind::Sparsity => run_sparsity_sweep(&cfg)?,
            };
            for r in &records {
                r.validate()?;
            }
            let path = out.or_else(|| cfg.output.clone());
            let mut w = output(path.as_ref())?;
            write_csv(&mut w, &records)?;
            w.flush()?;
            if let Some(p) = summary {
                let mut w = output(Some(&p))?;
                write_summary_csv(&mut w, &summarize(&records))?;
                w.flush()?;
            }
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        let code = match e {
            Error::Io(_) => 3,
            Error::Degenerate(_) | Error::TooManyDegenerate { .. } => 4,
            _ => 2,
        };
        std::process::exit(code);
    }
}
