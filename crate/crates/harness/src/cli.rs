use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{ExperimentConfig, InstanceSpec};
use crate::error::{exit, HarnessError, Result};
use crate::instance::{generate_to, read_provenance, Family, Instance, InstanceGenerator};
use crate::report::{read_records, summarize, summary_table, write_summary, SUMMARY_FILE};
use crate::run::{inequality_for, run, sweep};

#[derive(Debug, Parser)]
#[command(name = "lowdeg", version, about = "Experiments with low-degree learners and Bohnenblust–Hille checks")]
pub struct Cli {
    /// Base seed; overrides the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "LOWDEG_OUT_DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = "LOWDEG_THREADS", default_value_t = 0)]
    pub threads: usize,
    /// Scales every theory shot count; overrides the config.
    #[arg(long, global = true)]
    pub shot_multiplier: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a ground-truth instance with a provenance sidecar.
    Generate(GenerateArgs),
    /// Run the configured experiment.
    Run,
    /// Run the experiment over the config's sweep axes.
    Sweep,
    /// Aggregate record files into summary tables.
    Report {
        #[arg(required = true)]
        records: Vec<PathBuf>,
    },
    /// Check an instance file: validity, degree, and its inequality.
    Verify {
        instance: PathBuf,
        /// Declared degree; defaults to the provenance sidecar.
        #[arg(long)]
        d: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub family: Option<Family>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub sparsity: Option<usize>,
    #[arg(long)]
    pub junta: Option<usize>,
    #[arg(long)]
    pub terms: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
}

const DEFAULT_OUT: &str = "lowdeg-out";

impl Cli {
    fn load_config(&self) -> Result<ExperimentConfig> {
        let path = self
            .config
            .as_ref()
            .ok_or_else(|| HarnessError::config("this verb needs --config"))?;
        let mut cfg = ExperimentConfig::load(path)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(m) = self.shot_multiplier {
            cfg.params.shot_multiplier = m;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn out_dir(&self, cfg: Option<&ExperimentConfig>) -> PathBuf {
        self.out
            .clone()
            .or_else(|| cfg.and_then(|c| c.output.dir.clone()))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }
}

fn generator_from(cli: &Cli, a: &GenerateArgs) -> Result<InstanceGenerator> {
    let base: Option<InstanceSpec> = match &cli.config {
        Some(_) => Some(cli.load_config()?.instance),
        None => None,
    };
    let base_seed = match &cli.config {
        Some(p) => Some(ExperimentConfig::load(p)?.seed),
        None => None,
    };
    let family = a
        .family
        .or(base.as_ref().and_then(|b| b.family))
        .ok_or_else(|| HarnessError::config("generate needs --family"))?;
    let d = a
        .d
        .or(base.as_ref().map(|b| b.d))
        .ok_or_else(|| HarnessError::config("generate needs --d"))?;
    let seed = cli
        .seed
        .or(base.as_ref().and_then(|b| b.seed))
        .or(base_seed)
        .ok_or_else(|| HarnessError::config("generate needs --seed"))?;
    let pick = |x: Option<usize>, f: fn(&InstanceSpec) -> Option<usize>| x.or(base.as_ref().and_then(f));
    Ok(InstanceGenerator {
        family,
        n: pick(a.n, |b| b.n),
        d,
        sparsity: pick(a.sparsity, |b| b.sparsity),
        junta: pick(a.junta, |b| b.junta),
        terms: pick(a.terms, |b| b.terms),
        m: pick(a.m, |b| b.m),
        seed: Some(seed),
    })
}

fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Generate(a) => {
            let g = generator_from(cli, a)?;
            let (path, inst) = generate_to(&g, &cli.out_dir(None))?;
            println!("{} ({} instance, n = {}, degree {})", path.display(), inst.kind(), inst.n(), inst.degree());
        }
        Command::Run | Command::Sweep => {
            let cfg = cli.load_config()?;
            let sweeping = matches!(cli.command, Command::Sweep);
            let records = if sweeping { sweep(&cfg, cli.threads)? } else { run(&cfg, cli.threads)? };
            let dir = cli.out_dir(Some(&cfg));
            crate::report::write_outputs(&dir, &cfg, &records, if sweeping { "sweep" } else { "run" }, cli.threads)?;
            print!("{}", summary_table(&summarize(&records)?));
            println!("wrote {} records to {}", records.len(), dir.display());
        }
        Command::Report { records } => {
            let recs = read_records(records)?;
            let rows = summarize(&recs)?;
            print!("{}", summary_table(&rows));
            if let Some(dir) = &cli.out {
                std::fs::create_dir_all(dir)?;
                write_summary(&rows, std::fs::File::create(dir.join(SUMMARY_FILE))?)?;
            }
        }
        Command::Verify { instance, d } => {
            let inst = Instance::read(instance)?;
            let d = match d {
                Some(d) => *d,
                None => read_provenance(instance)?
                    .map(|p| p.params.d)
                    .ok_or_else(|| HarnessError::config("no provenance sidecar; pass --d"))?,
            };
            let found = inst.check_degree(d)?;
            println!("kind: {}\nn: {}\ndegree: {found} (declared {d})", inst.kind(), inst.n());
            if let Some(r) = inequality_for(&inst, d)? {
                print!("{r}");
            }
        }
    }
    Ok(())
}

/// Runs the CLI on `args` and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::CONFIG } else { exit::OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
