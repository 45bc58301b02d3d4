use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sbm_chroma::indep::SearchBudget;
use sbm_chroma::{boundary_export, c_star, BlockGraph, BlockModel64, CStarOptions64, TypeVector};
use sbm_chroma_cli::experiments::{
    color_run, mc_count, oracle_rows, run_shape_gallery, run_trend, TrendConfig, REPORT_HEADER,
};
use sbm_chroma_cli::output::{cstar_json, region_csv};
use sbm_chroma_cli::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "sbm-chroma",
    version,
    about = "Chromatic constant and coloring experiments on block model graphs"
)]
struct Cli {
    /// Model file: JSON {"k": int, "alpha": [..], "P": [[..]]}
    #[arg(long, global = true, value_name = "PATH")]
    model: Option<PathBuf>,
    /// Master seed for anything randomized
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Directory for output files
    #[arg(long, global = true, default_value = ".", value_name = "DIR")]
    out_dir: PathBuf,
    /// Worker threads for trial-parallel commands (0 = automatic)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certified bracket for the chromatic constant (JSON on stdout)
    Cstar {
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        /// Skip closed-form fast paths
        #[arg(long)]
        force_numeric: bool,
    },
    /// Boundary trace of the admissible region for k = 2 models (CSV)
    RegionExport {
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        /// Output file (relative paths land in --out-dir); stdout if absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a block graph and emit the adjacency text format
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plan-based coloring of a sampled graph, optionally vs DSATUR
    Color {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        epsilon_cap: f64,
        /// Extra baseline to run (only `dsatur`)
        #[arg(long)]
        baseline: Option<String>,
        /// Also write the report rows to this CSV file
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
    },
    /// Monte Carlo check of the expected typed independent-set count (JSON)
    McCount {
        #[arg(long)]
        n: usize,
        /// Target type, comma-separated: t1,t2,...
        #[arg(long = "type")]
        type_spec: String,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
    },
    /// Exact chromatic number vs DSATUR vs plan on tiny graphs (CSV)
    OracleCompare {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        epsilon_cap: f64,
    },
    /// Color/prediction ratio across a list of n values (CSV with medians)
    Trend {
        #[arg(long = "n-list", value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        seeds: usize,
        #[arg(long, default_value_t = 1.0 / 3.0)]
        epsilon_cap: f64,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Boundary CSV per qualitative p12 case of a two-part model
    ShapeGallery {
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        /// Explicit p12 values instead of the band-derived cases
        #[arg(long = "p12-list", value_delimiter = ',')]
        p12_list: Option<Vec<f64>>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn load_model(path: &Option<PathBuf>) -> CliResult<BlockModel64> {
    let path = path
        .as_ref()
        .ok_or_else(|| CliError::Config("--model is required".into()))?;
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    Ok(BlockModel64::from_json_str(&text)?)
}

fn resolve_out(out_dir: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        out_dir.join(path)
    }
}

fn write_file(out_dir: &Path, path: &Path, content: &str) -> CliResult<()> {
    let target = resolve_out(out_dir, path);
    if let Some(parent) = target.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::Io(format!("creating {}: {e}", parent.display())))?;
        }
    }
    fs::write(&target, content)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", target.display())))
}

fn install_thread_pool(threads: usize) -> CliResult<()> {
    if threads == 0 {
        return Ok(());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> CliResult<()> {
    install_thread_pool(cli.threads)?;
    match cli.command {
        Command::Cstar {
            tol,
            resolution,
            force_numeric,
        } => {
            let model = load_model(&cli.model)?;
            let opts = CStarOptions64 {
                resolution,
                tol,
                force_numeric,
                ..CStarOptions64::default()
            };
            let result = c_star(&model, &opts)?;
            println!("{}", cstar_json(&result));
            if result.budget_exceeded {
                return Err(CliError::Budget(format!(
                    "bracket width {} did not reach tol {tol} within the doubling budget",
                    result.upper - result.lower
                )));
            }
            Ok(())
        }
        Command::RegionExport { resolution, out } => {
            let model = load_model(&cli.model)?;
            let rows = boundary_export(&model, resolution)?;
            let csv = region_csv(&rows);
            match out {
                Some(path) => write_file(&cli.out_dir, &path, &csv),
                None => {
                    print!("{csv}");
                    Ok(())
                }
            }
        }
        Command::Sample { n, out } => {
            let model = load_model(&cli.model)?;
            let graph = BlockGraph::sample(&model, n, cli.seed)?;
            let text = graph.encode_text();
            match out {
                Some(path) => write_file(&cli.out_dir, &path, &text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Command::Color {
            n,
            epsilon_cap,
            baseline,
            report,
            restarts,
        } => {
            let with_dsatur = match baseline.as_deref() {
                None => false,
                Some("dsatur") => true,
                Some(other) => {
                    return Err(CliError::Config(format!(
                        "unknown baseline {other:?}; only `dsatur` is available"
                    )))
                }
            };
            let model = load_model(&cli.model)?;
            let budget = SearchBudget {
                max_restarts: restarts,
                ..SearchBudget::default()
            };
            let rows = color_run(&model, n, cli.seed, epsilon_cap, &budget, with_dsatur)?;
            let mut csv = String::from(REPORT_HEADER);
            csv.push('\n');
            for row in &rows {
                csv.push_str(&row.to_csv());
                csv.push('\n');
            }
            print!("{csv}");
            if let Some(path) = report {
                write_file(&cli.out_dir, &path, &csv)?;
            }
            Ok(())
        }
        Command::McCount {
            n,
            type_spec,
            trials,
        } => {
            let model = load_model(&cli.model)?;
            let counts: Result<Vec<u32>, _> =
                type_spec.split(',').map(|s| s.trim().parse()).collect();
            let counts =
                counts.map_err(|e| CliError::Config(format!("bad --type {type_spec:?}: {e}")))?;
            if counts.len() != model.k() {
                return Err(CliError::Config(format!(
                    "--type has {} coordinates but the model has k = {}",
                    counts.len(),
                    model.k()
                )));
            }
            let outcome = mc_count(&model, n, &TypeVector::new(counts), trials, cli.seed)?;
            println!("{}", serde_json::to_string(&outcome).expect("serializable"));
            Ok(())
        }
        Command::OracleCompare {
            n,
            trials,
            epsilon_cap,
        } => {
            let model = load_model(&cli.model)?;
            let rows = oracle_rows(
                &model,
                n,
                trials,
                cli.seed,
                epsilon_cap,
                &SearchBudget::default(),
            )?;
            let mut csv = String::from("exact,dsatur,plan\n");
            for (exact, baseline, plan) in rows {
                csv.push_str(&format!("{exact},{baseline},{plan}\n"));
            }
            print!("{csv}");
            Ok(())
        }
        Command::Trend {
            n_list,
            seeds,
            epsilon_cap,
            restarts,
            out,
        } => {
            let model = load_model(&cli.model)?;
            let config = TrendConfig {
                n_list,
                seeds,
                master_seed: cli.seed,
                epsilon_cap,
                budget: SearchBudget {
                    max_restarts: restarts,
                    ..SearchBudget::default()
                },
            };
            let (rows, medians) = run_trend(&model, &config)?;
            let csv = sbm_chroma_cli::experiments::trend_csv(&rows, &medians);
            print!("{csv}");
            if let Some(path) = out {
                write_file(&cli.out_dir, &path, &csv)?;
            }
            Ok(())
        }
        Command::ShapeGallery {
            resolution,
            p12_list,
        } => {
            let model = load_model(&cli.model)?;
            let cases = run_shape_gallery(&model, resolution, p12_list.as_deref())?;
            let mut manifest = String::from("tag,p12,file\n");
            for (tag, p12, csv) in &cases {
                let file = format!("shape_{tag}.csv");
                write_file(&cli.out_dir, Path::new(&file), csv)?;
                manifest.push_str(&format!("{tag},{p12},{file}\n"));
            }
            print!("{manifest}");
            Ok(())
        }
    }
}
