//! Front end for `modcomp-core`: reads a fan file, runs the component
//! computation and writes a table, a JSON report and DOT graphs.

pub mod dot;
pub mod table;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use modcomp_core::moduli::{irreducible_components, ModuliError, RunOptions};
use modcomp_core::{ClassNames, ComponentReport, CurveClass, FanSpec, IrreducibleClasses, Mode, Target, ToricError};
use serde::Deserialize;
use thiserror::Error;

pub use dot::{poset_dot, tree_dot};
pub use table::render_table;

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub fan_path: PathBuf,
    /// Comma-separated coordinates or a symbolic sum of named classes.
    pub beta: String,
    pub marks: usize,
    pub mode: Mode,
    pub table: bool,
    /// `-` writes to standard output.
    pub json: Option<PathBuf>,
    pub dot_dir: Option<PathBuf>,
    pub max_parts: Option<usize>,
    /// Irreducible-class list replacing the fan file's or the built-in one.
    pub classes: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(fan_path: impl Into<PathBuf>, beta: impl Into<String>, marks: usize, mode: Mode) -> Self {
        RunConfig {
            fan_path: fan_path.into(),
            beta: beta.into(),
            marks,
            mode,
            table: true,
            json: None,
            dot_dir: None,
            max_parts: None,
            classes: None,
            threads: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Fan { path: PathBuf, source: ToricError },
    #[error("{}: {reason}", path.display())]
    Classes { path: PathBuf, reason: String },
    #[error("bad beta: {0}")]
    Beta(String),
    #[error("moduli space empty for n < 2")]
    QuasimapMarks,
    #[error(transparent)]
    Moduli(ModuliError),
    #[error("{}: {source}", path.display())]
    Output { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Fan { .. } | CliError::Classes { .. } => 2,
            CliError::Beta(_) => 3,
            CliError::QuasimapMarks => 4,
            CliError::Moduli(_) | CliError::Output { .. } => 1,
        }
    }
}

impl From<ModuliError> for CliError {
    fn from(e: ModuliError) -> Self {
        match e {
            ModuliError::QuasimapMarks => CliError::QuasimapMarks,
            ModuliError::BadBeta(c) => CliError::Beta(format!("{c} is zero or not effective")),
            other => CliError::Moduli(other),
        }
    }
}

/// What a successful run produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: ComponentReport,
    pub names: ClassNames,
    pub written: Vec<PathBuf>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ClassEntry {
    Coords(Vec<i64>),
    Expr(String),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ClassFile {
    List(Vec<ClassEntry>),
    Table { irreducible_classes: Vec<ClassEntry> },
}

/// Reads an irreducible-class list: a JSON array, or a JSON/TOML table with
/// key `irreducible_classes`. Entries are coordinate lists or class expressions.
pub fn load_classes(path: &Path, target: &Target) -> Result<Vec<CurveClass>, CliError> {
    let err = |reason: String| CliError::Classes { path: path.to_path_buf(), reason };
    let text = fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
    let file: ClassFile = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml")) {
        toml_table(&text).map_err(err)?
    } else {
        serde_json::from_str(&text).map_err(|e| err(e.to_string()))?
    };
    let entries = match file {
        ClassFile::List(v) | ClassFile::Table { irreducible_classes: v } => v,
    };
    let rank = target.basis.pic_rank();
    entries
        .into_iter()
        .map(|entry| {
            let c = match entry {
                ClassEntry::Coords(v) => CurveClass(v),
                ClassEntry::Expr(s) => target.names.parse(&s, rank).map_err(|e| err(e.to_string()))?,
            };
            target.basis.check_class(&c).map_err(|e| err(e.to_string()))?;
            Ok(c)
        })
        .collect()
}

fn toml_table(text: &str) -> Result<ClassFile, String> {
    #[derive(Deserialize)]
    struct T {
        irreducible_classes: Vec<ClassEntry>,
    }
    let t: T = toml::from_str(text).map_err(|e| e.to_string())?;
    Ok(ClassFile::Table { irreducible_classes: t.irreducible_classes })
}

pub fn load_target(config: &RunConfig) -> Result<Target, CliError> {
    let fan_err = |source| CliError::Fan { path: config.fan_path.clone(), source };
    let spec = FanSpec::from_path(&config.fan_path).map_err(fan_err)?;
    let mut target = Target::from_spec(&spec).map_err(fan_err)?;
    if let Some(path) = &config.classes {
        let list = load_classes(path, &target)?;
        target.irreducible = IrreducibleClasses::resolve(&target.basis, Some(list));
    }
    Ok(target)
}

pub fn parse_beta(target: &Target, input: &str) -> Result<CurveClass, CliError> {
    let beta = target.names.parse(input, target.basis.pic_rank()).map_err(|e| CliError::Beta(e.to_string()))?;
    if beta.is_zero() || !target.basis.is_effective(&beta) {
        return Err(CliError::Beta(format!("{} is zero or not effective", target.names.format(&beta))));
    }
    Ok(beta)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Output { path: path.to_path_buf(), source })
}

pub fn report_json(report: &ComponentReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// Runs the computation and writes the requested artifacts. The table and a
/// JSON report addressed to `-` go to `out`.
pub fn run(config: &RunConfig, out: &mut dyn Write) -> Result<RunOutcome, CliError> {
    let target = load_target(config)?;
    let beta = parse_beta(&target, &config.beta)?;
    if config.mode == Mode::Quasimaps && config.marks < 2 {
        return Err(CliError::QuasimapMarks);
    }
    let options = RunOptions { max_parts: config.max_parts, threads: config.threads };
    let report = irreducible_components(&target, &beta, config.marks, config.mode, &options)?;
    let names = target.names.clone();
    let stdout_err = |source| CliError::Output { path: PathBuf::from("-"), source };
    let mut written = Vec::new();

    if config.table {
        out.write_all(render_table(&report, &names).as_bytes()).map_err(stdout_err)?;
    }
    if let Some(path) = &config.json {
        let json = report_json(&report);
        if path.as_os_str() == "-" {
            out.write_all(json.as_bytes()).map_err(stdout_err)?;
        } else {
            write_file(path, &json)?;
            written.push(path.clone());
        }
    }
    if let Some(dir) = &config.dot_dir {
        fs::create_dir_all(dir).map_err(|source| CliError::Output { path: dir.clone(), source })?;
        for t in &report.trees {
            let path = dir.join(format!("{}.dot", t.id));
            write_file(&path, &tree_dot(&t.id, &t.tree, &names))?;
            written.push(path);
        }
        let path = dir.join("poset.dot");
        write_file(&path, &poset_dot(&report, &names))?;
        written.push(path);
    }
    Ok(RunOutcome { report, names, written })
}
