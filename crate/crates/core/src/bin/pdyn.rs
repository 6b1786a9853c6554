use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use perturbed_dynamics::experiment::{json, run_experiment, ExperimentConfig};
use perturbed_dynamics::gallery::{self, BuildParams, GalleryItem};
use perturbed_dynamics::maps::PiecewiseLinearMap;
use perturbed_dynamics::plot;
use perturbed_dynamics::stochproc::{read_csv, Executor};

#[derive(Parser)]
#[command(name = "pdyn", version, about = "Randomly perturbed interval dynamics experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Override `process.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override `process.trials`.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Worker threads; 0 uses every core. Never changes the output.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Directory for relative output paths, or the output file for `plot`
    /// and `gallery build`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run any experiment config.
    Run { config: PathBuf },
    Simulate { config: PathBuf },
    Recurrence { config: PathBuf },
    Trap { config: PathBuf },
    Chain { config: PathBuf },
    Periodic { config: PathBuf },
    Decompose { config: PathBuf },
    Shadow { config: PathBuf },
    Liyorke { config: PathBuf },
    /// List or build named maps and sequences.
    Gallery {
        #[command(subcommand)]
        action: GalleryAction,
    },
    /// Render a trajectory CSV or a map literal (JSON) as SVG.
    Plot {
        input: Option<PathBuf>,
        /// Plot a gallery map instead of a file.
        #[arg(long)]
        gallery: Option<String>,
    },
}

#[derive(Subcommand)]
enum GalleryAction {
    List,
    Build {
        name: String,
        #[arg(long)]
        depth: Option<u32>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        amplitude: Option<f64>,
        #[arg(long)]
        rate: Option<f64>,
    },
}

enum Failure {
    Input(String),
    Analysis,
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, contents: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write_file(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn run_config(path: &Path, expect: Option<&str>, g: &Global) -> Result<(), Failure> {
    let mut cfg = ExperimentConfig::from_path(path).map_err(|e| Failure::Input(e.to_string()))?;
    if let Some(kind) = expect {
        if cfg.analysis.kind() != kind {
            return Err(Failure::Input(format!(
                "{}: analysis kind is {:?}, but the {kind} verb was used",
                path.display(),
                cfg.analysis.kind()
            )));
        }
    }
    if let Some(s) = g.seed {
        cfg.process.seed = s;
    }
    if let Some(t) = g.trials {
        cfg.process.trials = t;
    }
    cfg.validate()
        .map_err(|(section, key, msg)| Failure::Input(format!("[{section}] {}: {msg}", key.unwrap_or(""))))?;
    let exec = Executor::with_workers(g.workers).map_err(|e| Failure::Input(e.to_string()))?;

    let resolve = |name: &str| match &g.out {
        Some(dir) => dir.join(name),
        None => PathBuf::from(name),
    };
    let json_out = cfg.output.json.as_deref().map(resolve);
    match run_experiment(&cfg, &exec) {
        Ok(outcome) => {
            emit(json_out.as_deref(), &outcome.report())?;
            if let Some(csv_name) = &cfg.output.csv {
                match outcome.csv() {
                    Some(csv) => write_file(&resolve(csv_name), &csv)?,
                    None => eprintln!("note: {} keeps no trajectories; no csv written", cfg.analysis.kind()),
                }
            }
            if let Some(svg_name) = &cfg.output.svg {
                write_file(&resolve(svg_name), &outcome.svg)?;
            }
            Ok(())
        }
        Err(failure) => {
            emit(json_out.as_deref(), &failure.report())?;
            eprintln!("error: {}", failure.message);
            Err(Failure::Analysis)
        }
    }
}

fn gallery_cmd(action: GalleryAction, g: &Global) -> Result<(), Failure> {
    match action {
        GalleryAction::List => {
            for e in gallery::entries() {
                let params = if e.params.is_empty() { String::new() } else { format!(" [{}]", e.params.join(", ")) };
                println!("{:<18} {:<8} {}{params}", e.name, format!("{:?}", e.kind).to_lowercase(), e.description);
            }
            Ok(())
        }
        GalleryAction::Build { name, depth, lambda, amplitude, rate } => {
            let item = gallery::build(&name, &BuildParams { lambda, depth, amplitude, rate })
                .map_err(|e| Failure::Input(e.to_string()))?;
            let text = match item {
                GalleryItem::Map(f) => json::to_string(&f),
                GalleryItem::Sequence(s) => json::to_string(&serde_json::json!({
                    "sequence": s.kind_tag(),
                    "first": s.generator(0).into_owned(),
                    "limit": s.limit(),
                })),
            }
            .expect("map serializes");
            emit(g.out.as_deref(), &text)
        }
    }
}

fn plot_cmd(input: Option<PathBuf>, gallery_name: Option<String>, g: &Global) -> Result<(), Failure> {
    let svg = match (input, gallery_name) {
        (_, Some(name)) => {
            let item = gallery::build(&name, &BuildParams::default()).map_err(|e| Failure::Input(e.to_string()))?;
            match item {
                GalleryItem::Map(f) => plot::svg_map(&name, &f),
                GalleryItem::Sequence(s) => plot::svg_maps(&name, &[&s.generator(0), s.limit()]),
            }
        }
        (Some(path), None) => {
            let text = fs::read_to_string(&path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            let title = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            if path.extension().is_some_and(|e| e == "csv") {
                let paths = read_csv(text.as_bytes()).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                let states: Vec<&[f64]> = paths.iter().map(|p| p.states.as_slice()).collect();
                plot::svg_trajectories(&title, &states)
            } else {
                let f: PiecewiseLinearMap =
                    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                plot::svg_map(&title, &f)
            }
        }
        (None, None) => return Err(Failure::Input("plot needs an input file or --gallery".into())),
    };
    emit(g.out.as_deref(), &svg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let result = match cli.command {
        Command::Run { config } => run_config(&config, None, g),
        Command::Simulate { config } => run_config(&config, Some("simulate"), g),
        Command::Recurrence { config } => run_config(&config, Some("recurrence"), g),
        Command::Trap { config } => run_config(&config, Some("trap"), g),
        Command::Chain { config } => run_config(&config, Some("chain"), g),
        Command::Periodic { config } => run_config(&config, Some("periodic"), g),
        Command::Decompose { config } => run_config(&config, Some("decompose"), g),
        Command::Shadow { config } => run_config(&config, Some("shadow"), g),
        Command::Liyorke { config } => run_config(&config, Some("liyorke"), g),
        Command::Gallery { action } => gallery_cmd(action, g),
        Command::Plot { input, gallery } => plot_cmd(input, gallery, g),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Analysis) => ExitCode::from(2),
    }
}
