//! Command-line front end: config ingestion, experiment runners, and
//! CSV / JSON / event-log emission.

pub mod error;
pub mod eventlog;
pub mod run;
pub mod spec;
pub mod table;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

pub use error::{CliError, Result};
use spec::{Experiment, ExperimentSpec, Format, Kind};

/// Subcommands; each runs exactly one config kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Whichway,
    MartensSweep,
    Bell,
    Aspect,
    Sample,
}

impl Command {
    pub fn kind(self) -> Kind {
        match self {
            Command::Whichway => Kind::Whichway,
            Command::MartensSweep => Kind::SweepMartens,
            Command::Bell => Kind::Bell,
            Command::Aspect => Kind::Aspect,
            Command::Sample => Kind::Sample,
        }
    }
}

/// Flags shared by all subcommands; flags win over config values.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub n: Option<u64>,
}

pub fn load_spec(path: &Path) -> Result<ExperimentSpec> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    ExperimentSpec::from_json_str(&text)
}

/// Config with command-line overrides folded in.
pub fn effective_spec(command: Command, opts: &Options) -> Result<ExperimentSpec> {
    let mut spec = load_spec(&opts.config)?;
    if spec.experiment.kind() != command.kind() {
        return Err(CliError::config(
            "kind",
            format!(
                "config kind is {}, but the {} command was invoked",
                spec.experiment.kind(),
                command.kind()
            ),
        ));
    }
    if let Experiment::Sample(p) = &mut spec.experiment {
        if opts.n.is_some() {
            p.n_events = opts.n;
        }
        if opts.seed.is_some() {
            p.seed = opts.seed;
        }
    } else if opts.n.is_some() || opts.seed.is_some() {
        return Err(CliError::config(
            "kind",
            "--n and --seed only apply to the sample command",
        ));
    }
    if opts.out.is_some() || opts.format.is_some() {
        let out = spec.output.get_or_insert_with(Default::default);
        if let Some(path) = &opts.out {
            out.path = Some(path.to_string_lossy().into_owned());
        }
        if opts.format.is_some() {
            out.format = opts.format;
        }
    }
    Ok(spec)
}

fn write_to(
    path: Option<&Path>,
    stdout: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<()> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::io(p, e))?;
            let mut w = BufWriter::new(file);
            f(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(p, e))
        }
        None => f(stdout).map_err(|e| CliError::io("<stdout>", e)),
    }
}

pub fn execute(command: Command, opts: &Options, stdout: &mut dyn Write) -> Result<()> {
    let spec = effective_spec(command, opts)?;
    let output = spec.output.clone().unwrap_or_default();
    let format = output.format.unwrap_or_default();
    let out_path = output.path.as_ref().map(PathBuf::from);

    let table = match &spec.experiment {
        Experiment::Whichway(p) => run::run_whichway(p)?,
        Experiment::SweepMartens(p) => run::run_martens_sweep(p)?,
        Experiment::Bell(p) => run::run_bell(p)?,
        Experiment::Aspect(p) => run::run_aspect(p)?,
        Experiment::Sample(_) => {
            let log_path = out_path
                .ok_or_else(|| CliError::config("output.path", "sample needs an event-log path (config or --out)"))?;
            let outcome = run::run_sample_to_file(&spec, &log_path)?;
            return write_to(None, stdout, |w| outcome.summary.write(w, format, &spec));
        }
    };
    write_to(out_path.as_deref(), stdout, |w| table.write(w, format, &spec))
}
