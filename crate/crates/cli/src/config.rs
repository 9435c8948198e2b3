use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use menzerath_core::{InputMode, MeanMode, NegBinMethod, Weighting};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Raw,
    Tagged,
}

impl From<Mode> for InputMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Raw => InputMode::Raw,
            Mode::Tagged => InputMode::Tagged,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum WeightingArg {
    #[default]
    Count,
    Uniform,
}

impl From<WeightingArg> for Weighting {
    fn from(w: WeightingArg) -> Self {
        match w {
            WeightingArg::Count => Weighting::Count,
            WeightingArg::Uniform => Weighting::Uniform,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum NegBinMethodArg {
    #[default]
    Ls,
    Mle,
}

impl From<NegBinMethodArg> for NegBinMethod {
    fn from(m: NegBinMethodArg) -> Self {
        match m {
            NegBinMethodArg::Ls => NegBinMethod::LeastSquares,
            NegBinMethodArg::Mle => NegBinMethod::MaximumLikelihood,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum MeanArg {
    #[default]
    Pooled,
    PerSentence,
}

impl From<MeanArg> for MeanMode {
    fn from(m: MeanArg) -> Self {
        match m {
            MeanArg::Pooled => MeanMode::Pooled,
            MeanArg::PerSentence => MeanMode::PerSentence,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Tsv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Tsv => "tsv",
            Format::Json => "json",
        }
    }
}

/// Options shared by the pipeline commands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub mode: Mode,
    pub lexicon: Option<PathBuf>,
    pub weighting: WeightingArg,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(inputs: Vec<PathBuf>) -> Self {
        RunConfig {
            inputs,
            mode: Mode::Tagged,
            lexicon: None,
            weighting: WeightingArg::Count,
            format: Format::Tsv,
            out: None,
        }
    }

    pub fn with_out(mut self, out: impl Into<PathBuf>) -> Self {
        self.out = Some(out.into());
        self
    }
}

/// Creates `dir` if needed and checks that files can be written there.
pub fn ensure_writable(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let probe = dir.join(".menzerath-write-check");
    fs::write(&probe, b"").with_context(|| format!("output directory {} is not writable", dir.display()))?;
    fs::remove_file(&probe).ok();
    Ok(())
}

pub fn read_input(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn read_text(path: &Path) -> Result<String> {
    let bytes = read_input(path)?;
    match String::from_utf8(bytes) {
        Ok(s) => Ok(s),
        Err(e) => bail!(
            "{}: invalid UTF-8 at byte offset {}",
            path.display(),
            e.utf8_error().valid_up_to()
        ),
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}
