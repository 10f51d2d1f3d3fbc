//! Command-line front end. Errors go to stderr as one JSON object; exit
//! status 2 means invalid input, 3 means an I/O failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use crate::dataset::{
    import_external_metrics, ingest, join_external, load_scripts, Category, DatasetError, DatasetManifest,
    MANIFEST_FILE,
};
use crate::imaging::{load_image, save_png, ImagingError, SeededRandom};
use crate::metrics::{compute_all, read_metrics_csv, write_metrics_csv, MetricRecord};
use crate::report::{correlate, write_report, ReportError};
use crate::stats::{
    fit_truncated_gaussian_with, read_fits_csv, read_histograms_csv, write_fits_csv, write_histograms_csv,
    FitObjective, ValuationFit,
};
use crate::uglifier::{apply_script_with, auto_uglify, EngineConfig, ManipulationScript, ScriptLabel};

#[derive(Parser, Debug)]
#[command(name = "aesthetica", version, about = "Uglifier, aesthetic metrics and valuation statistics")]
pub struct Cli {
    /// TOML file of engine constants (flat `key = value` lines).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for batch stages; defaults to all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Objective {
    Ls,
    Mle,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Add a directory of images to the dataset manifest.
    Ingest {
        #[arg(long)]
        root: PathBuf,
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, default_value = "ORIGINAL")]
        category: String,
        #[arg(long, default_value = "local")]
        source: String,
    },
    /// Apply a manipulation script to one image.
    Uglify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        script: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay recorded uglification scripts on randomly chosen originals.
    AutoUglify {
        #[arg(long)]
        root: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory, relative to the root unless absolute.
        #[arg(long, default_value = "images/auto_uglified")]
        out: PathBuf,
    },
    /// Compute every metric for every manifest entry.
    Metrics {
        #[arg(long)]
        root: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// External metric table as `name=path.csv`; repeatable.
        #[arg(long = "external")]
        external: Vec<String>,
    },
    /// Fit truncated Gaussians to vote histograms.
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "ls")]
        objective: Objective,
    },
    /// Correlate metrics with fitted valuations.
    Correlate {
        #[arg(long)]
        root: PathBuf,
        #[arg(long)]
        metrics: PathBuf,
        #[arg(long)]
        fits: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write correlation table, distributions, boxplots, ANOVA and snapshot.
    Report {
        #[arg(long)]
        root: PathBuf,
        #[arg(long)]
        metrics: PathBuf,
        #[arg(long)]
        fits: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve the /v1 HTTP API for a dataset.
    Serve {
        #[arg(long)]
        root: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build the demo incoming directories from a folder of photos.
    DemoPrepare {
        #[arg(long)]
        photos: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Simulate observers voting through the rating protocol.
    DemoVotes {
        #[arg(long)]
        root: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 360)]
        observers: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    fn validation(message: impl Into<String>) -> Self {
        CliError {
            kind: "validation",
            message: message.into(),
        }
    }

    fn io(message: impl Into<String>) -> Self {
        CliError {
            kind: "io",
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        if self.kind == "io" {
            3
        } else {
            2
        }
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        match e {
            DatasetError::Io { .. } => CliError::io(e.to_string()),
            other => CliError::validation(other.to_string()),
        }
    }
}

impl From<ImagingError> for CliError {
    fn from(e: ImagingError) -> Self {
        match e {
            ImagingError::Io { .. } => CliError::io(e.to_string()),
            other => CliError::validation(other.to_string()),
        }
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::Io { .. } | ReportError::Dataset(DatasetError::Io { .. }) => CliError::io(e.to_string()),
            other => CliError::validation(other.to_string()),
        }
    }
}

impl From<crate::demo::DemoError> for CliError {
    fn from(e: crate::demo::DemoError) -> Self {
        use crate::demo::DemoError;
        match e {
            DemoError::Io { .. } | DemoError::Imaging(ImagingError::Io { .. }) | DemoError::Dataset(DatasetError::Io { .. }) => {
                CliError::io(e.to_string())
            }
            other => CliError::validation(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(format!("{}: {e}", parent.display())))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> CliResult<std::fs::File> {
    std::fs::File::open(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

pub fn load_config(path: Option<&Path>) -> CliResult<EngineConfig> {
    match path {
        None => Ok(EngineConfig::default()),
        Some(p) => toml::from_str(&read(p)?).map_err(|e| CliError::validation(format!("config {}: {e}", p.display()))),
    }
}

fn print_json(v: serde_json::Value) {
    use std::io::Write;
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&v).expect("json"));
}

fn load_manifest(root: &Path) -> CliResult<DatasetManifest> {
    Ok(DatasetManifest::load(root.join(MANIFEST_FILE))?)
}

fn load_metrics(path: &Path) -> CliResult<Vec<MetricRecord>> {
    read_metrics_csv(open(path)?).map_err(|e| CliError::validation(e.to_string()))
}

fn load_fits(path: &Path) -> CliResult<Vec<ValuationFit>> {
    read_fits_csv(open(path)?).map_err(|e| CliError::validation(e.to_string()))
}

pub fn run(cli: Cli) -> CliResult<()> {
    let config = load_config(cli.config.as_deref())?;
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = cli.threads {
            b = b.num_threads(n);
        }
        b.build().map_err(|e| CliError::validation(e.to_string()))?
    };
    match cli.command {
        Command::Ingest { root, dir, category, source } => {
            let category: Category = category.parse()?;
            let mut manifest = DatasetManifest::load_or_default(&root)?;
            let report = ingest(&mut manifest, &root, &dir, category, &source)?;
            manifest.save(root.join(MANIFEST_FILE))?;
            print_json(json!(report));
        }
        Command::Uglify { input, script, out } => {
            let img = load_image(&input)?;
            let script = ManipulationScript::from_json(&read(&script)?).map_err(|e| CliError::validation(e.to_string()))?;
            let result = apply_script_with(&img, &script, &config).map_err(|e| CliError::validation(e.to_string()))?;
            save_png(&result, &out)?;
            print_json(json!({ "out": out, "scriptId": script.script_id(), "steps": script.steps.len() }));
        }
        Command::AutoUglify { root, count, seed, out } => {
            let out_dir = root.join(out);
            let mut manifest = load_manifest(&root)?;
            let recorded: Vec<ManipulationScript> = load_scripts(&root)?
                .into_iter()
                .filter(|s| s.label == ScriptLabel::Uglified)
                .collect();
            let mut originals: Vec<String> =
                manifest.sorted().by_category(Category::Original).map(|e| e.image_id.clone()).collect();
            if count > originals.len() {
                return Err(CliError::validation(format!("only {} originals available", originals.len())));
            }
            let mut rng = SeededRandom::new(seed);
            rng.shuffle(&mut originals);
            originals.truncate(count);
            originals.sort();
            let scripts = auto_uglify(&originals, &recorded, &mut rng).map_err(|e| CliError::validation(e.to_string()))?;
            std::fs::create_dir_all(&out_dir).map_err(|e| CliError::io(format!("{}: {e}", out_dir.display())))?;
            let outputs: Vec<CliResult<()>> = pool.install(|| {
                scripts
                    .par_iter()
                    .map(|script| {
                        let entry = manifest.get(&script.source_image_id).expect("original in manifest");
                        let img = load_image(root.join(&entry.path))?;
                        let result =
                            apply_script_with(&img, script, &config).map_err(|e| CliError::validation(e.to_string()))?;
                        let stem = format!("auto_{}", script.source_image_id);
                        save_png(&result, out_dir.join(format!("{stem}.png")))?;
                        write(&out_dir.join(format!("{stem}.json")), script.to_json_pretty() + "\n")
                    })
                    .collect()
            });
            outputs.into_iter().collect::<CliResult<()>>()?;
            let report = ingest(&mut manifest, &root, &out_dir, Category::AutoUglified, "auto-uglifier")?;
            manifest.save(root.join(MANIFEST_FILE))?;
            print_json(json!({
                "scripts": scripts.iter().map(|s| s.script_id()).collect::<Vec<_>>(),
                "added": report.added.len(),
                "warnings": report.warnings,
            }));
        }
        Command::Metrics { root, out, external } => {
            let manifest = load_manifest(&root)?.sorted();
            let results: Vec<CliResult<MetricRecord>> = pool.install(|| {
                manifest
                    .entries
                    .par_iter()
                    .map(|e| Ok(compute_all(&load_image(root.join(&e.path))?, &e.image_id)))
                    .collect()
            });
            let mut records = results.into_iter().collect::<CliResult<Vec<_>>>()?;
            for spec in external {
                let (name, path) = spec
                    .split_once('=')
                    .ok_or_else(|| CliError::validation(format!("--external expects name=path, got {spec}")))?;
                let table = import_external_metrics(open(Path::new(path))?, name)?;
                join_external(&mut records, &table)?;
            }
            let mut buf = Vec::new();
            write_metrics_csv(&records, &mut buf).map_err(|e| CliError::validation(e.to_string()))?;
            write(&out, buf)?;
            print_json(json!({ "out": out, "rows": records.len() }));
        }
        Command::Fit { input, out, objective } => {
            let hists = read_histograms_csv(open(&input)?).map_err(|e| CliError::validation(e.to_string()))?;
            let kind = match objective {
                Objective::Ls => FitObjective::LeastSquares,
                Objective::Mle => FitObjective::MaximumLikelihood,
            };
            let fits: Vec<ValuationFit> =
                pool.install(|| hists.par_iter().map(|h| fit_truncated_gaussian_with(h, kind)).collect());
            let mut buf = Vec::new();
            write_fits_csv(&fits, &mut buf).map_err(|e| CliError::validation(e.to_string()))?;
            write(&out, buf)?;
            print_json(json!({ "out": out, "rows": fits.len() }));
        }
        Command::Correlate { root, metrics, fits, out } => {
            let manifest = load_manifest(&root)?;
            let summary = correlate(&manifest, &load_metrics(&metrics)?, &load_fits(&fits)?)?;
            write(&out, serde_json::to_string_pretty(&summary).expect("json") + "\n")?;
            print_json(json!({ "out": out, "metrics": summary.rows.len() }));
        }
        Command::Report { root, metrics, fits, out } => {
            let manifest = load_manifest(&root)?;
            let summary = write_report(&out, &manifest, &load_metrics(&metrics)?, &load_fits(&fits)?)?;
            print_json(json!(summary));
        }
        Command::Serve { root, addr, seed } => {
            let state = crate::service::ServiceState::open(&root, config, seed)?;
            let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::io(e.to_string()))?;
            runtime.block_on(async move {
                let listener = tokio::net::TcpListener::bind(&addr)
                    .await
                    .map_err(|e| CliError::io(format!("bind {addr}: {e}")))?;
                eprintln!("listening on http://{addr}/v1");
                axum::serve(listener, crate::service::router(state))
                    .await
                    .map_err(|e| CliError::io(e.to_string()))
            })?;
        }
        Command::DemoPrepare { photos, out, seed } => {
            let layout = crate::demo::prepare_demo(&photos, &out, seed)?;
            print_json(json!({
                "original": layout.original,
                "beautified": layout.beautified,
                "uglified": layout.uglified,
            }));
        }
        Command::DemoVotes { root, out, observers, seed } => {
            let manifest = load_manifest(&root)?;
            let hists = crate::demo::simulate_votes(&manifest, observers, seed)?;
            let mut buf = Vec::new();
            write_histograms_csv(&hists, &mut buf).map_err(|e| CliError::validation(e.to_string()))?;
            write(&out, buf)?;
            let votes: u64 = hists.iter().map(|h| h.total()).sum();
            print_json(json!({ "out": out, "images": hists.len(), "votes": votes }));
        }
    }
    Ok(())
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", json!({ "error": "validation", "message": e.to_string() }));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.kind, "message": e.message }));
            ExitCode::from(e.exit_code())
        }
    }
}
