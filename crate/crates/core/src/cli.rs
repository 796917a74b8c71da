//! Command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::baselines::{DvLogisticConfig, PsoConfig};
use crate::data::{parse_feature_list, parse_str, Dataset, Dialect, FEATURE_NAMES};
use crate::error::{Error, Result};
use crate::eval::{compare_models, cross_validate, evaluate, CvOptions, DEFAULT_K};
use crate::model::{AnyModel, Classifier, Learner, ModelKind, ModelSpec};
use crate::persist::{model_from_text, model_to_text};
use crate::train::Hyperparams;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "CARDIOSEQ_OUT";
pub const DEFAULT_OUT: &str = "cardioseq-out";

#[derive(Debug, Parser)]
#[command(
    name = "cardioseq",
    version,
    about = "Heart-disease classification with a multi-width 1D CNN and baselines"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a dataset and summarize it.
    Validate,
    /// Train one model on the whole dataset and write it to the output directory.
    Train,
    /// Run k-fold cross-validation.
    Cv,
    /// Cross-validate several models on several datasets.
    Compare,
    /// Score one record with a saved model.
    Predict {
        /// Model file written by `train`.
        model_file: PathBuf,
        /// 13 comma-separated feature values, `?` for missing.
        record: String,
    },
}

/// Every flag can also be set as `key = value` in the file given by `--config`;
/// flags win over the file.
#[derive(Debug, Default, Args)]
pub struct Flags {
    /// Dataset path, or a comma-separated list for `compare`.
    #[arg(long, global = true)]
    pub data: Option<String>,
    /// statlog, cleveland or auto, optionally one per dataset.
    #[arg(long, global = true)]
    pub dialect: Option<String>,
    /// cnn, dv-logistic or pso-elm, or a comma-separated list.
    #[arg(long, global = true)]
    pub model: Option<String>,
    #[arg(long, global = true)]
    pub epochs: Option<String>,
    #[arg(long, global = true)]
    pub lr: Option<String>,
    #[arg(long, global = true)]
    pub dropout: Option<String>,
    #[arg(long, global = true)]
    pub batch: Option<String>,
    /// Kernels per convolution width.
    #[arg(long, global = true)]
    pub kernels: Option<String>,
    /// `global` or `windowed:WIDTH:STRIDE`.
    #[arg(long, global = true)]
    pub pool: Option<String>,
    /// Number of folds.
    #[arg(long, global = true)]
    pub k: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// Output directory (default: $CARDIOSEQ_OUT, then ./cardioseq-out).
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// `key = value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Plain random folds instead of stratified ones.
    #[arg(long, global = true)]
    pub unstratified: bool,
    #[arg(long, global = true)]
    pub dv_lr: Option<String>,
    #[arg(long, global = true)]
    pub dv_epochs: Option<String>,
    #[arg(long, global = true)]
    pub elm_hidden: Option<String>,
    #[arg(long, global = true)]
    pub pso_swarm: Option<String>,
    #[arg(long, global = true)]
    pub pso_iterations: Option<String>,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut out: Vec<(&'static str, String)> = [
            ("data", &self.data),
            ("dialect", &self.dialect),
            ("model", &self.model),
            ("epochs", &self.epochs),
            ("lr", &self.lr),
            ("dropout", &self.dropout),
            ("batch", &self.batch),
            ("kernels", &self.kernels),
            ("pool", &self.pool),
            ("k", &self.k),
            ("seed", &self.seed),
            ("out", &self.out),
            ("dv_lr", &self.dv_lr),
            ("dv_epochs", &self.dv_epochs),
            ("elm_hidden", &self.elm_hidden),
            ("pso_swarm", &self.pso_swarm),
            ("pso_iterations", &self.pso_iterations),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.clone().map(|v| (k, v)))
        .collect();
        if self.unstratified {
            out.push(("stratified", "false".into()));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DialectChoice {
    Auto,
    Fixed(Dialect),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub data: Vec<PathBuf>,
    pub dialects: Vec<DialectChoice>,
    pub models: Vec<ModelKind>,
    pub hyper: Hyperparams,
    pub logistic: DvLogisticConfig,
    pub pso: PsoConfig,
    pub k: usize,
    pub stratified: bool,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            data: Vec::new(),
            dialects: vec![DialectChoice::Auto],
            models: Vec::new(),
            hyper: Hyperparams::default(),
            logistic: DvLogisticConfig::default(),
            pso: PsoConfig::default(),
            k: DEFAULT_K,
            stratified: true,
            out: None,
        }
    }
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "data" => self.data = list(value).map(PathBuf::from).collect(),
            "dialect" => {
                self.dialects = list(value)
                    .map(|d| match d {
                        "auto" => Ok(DialectChoice::Auto),
                        d => d.parse().map(DialectChoice::Fixed),
                    })
                    .collect::<Result<_>>()?
            }
            "model" => self.models = list(value).map(str::parse).collect::<Result<_>>()?,
            "epochs" => self.hyper.epochs = number(key, value)?,
            "lr" => self.hyper.learning_rate = number(key, value)?,
            "dropout" => self.hyper.dropout_rate = number(key, value)?,
            "batch" => self.hyper.batch_size = number(key, value)?,
            "kernels" => self.hyper.kernels_per_width = number(key, value)?,
            "pool" => self.hyper.pool = value.trim().parse()?,
            "k" => self.k = number(key, value)?,
            "seed" => self.hyper.seed = number(key, value)?,
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "stratified" => self.stratified = number(key, value)?,
            "dv_lr" => self.logistic.learning_rate = number(key, value)?,
            "dv_epochs" => self.logistic.epochs = number(key, value)?,
            "elm_hidden" => self.pso.hidden_size = number(key, value)?,
            "pso_swarm" => self.pso.swarm_size = number(key, value)?,
            "pso_iterations" => self.pso.iterations = number(key, value)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies a `key = value` file. Blank lines and `#` comments are skipped;
    /// unknown or repeated keys are errors.
    pub fn apply_config_text(&mut self, text: &str) -> Result<()> {
        let mut seen = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            let key = key.trim();
            if seen.contains(&key) {
                return Err(Error::Config(format!(
                    "line {}: `{key}` given twice",
                    i + 1
                )));
            }
            seen.push(key);
            self.set(key, value.trim()).map_err(|e| {
                Error::Config(format!(
                    "line {}: {}",
                    i + 1,
                    e.to_string().trim_start_matches("config: ")
                ))
            })?;
        }
        Ok(())
    }

    pub fn from_flags(flags: &Flags) -> Result<Self> {
        let mut config = RunConfig::default();
        if let Some(path) = &flags.config {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            config.apply_config_text(&text)?;
        }
        for (key, value) in flags.pairs() {
            config.set(key, &value)?;
        }
        Ok(config)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| {
                std::env::var_os(OUT_ENV)
                    .filter(|v| !v.is_empty())
                    .map(PathBuf::from)
            })
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }

    pub fn cv_options(&self) -> CvOptions {
        CvOptions {
            k: self.k,
            seed: self.hyper.seed,
            stratify: self.stratified,
        }
    }

    pub fn spec(&self, kind: ModelKind) -> ModelSpec {
        match kind {
            ModelKind::Cnn => ModelSpec::Cnn(self.hyper.clone()),
            ModelKind::DvLogistic => ModelSpec::DvLogistic(self.logistic),
            ModelKind::PsoElm => ModelSpec::PsoElm(self.pso),
        }
    }

    fn validate_models(&self) -> Result<()> {
        self.hyper.validate()?;
        self.pso.validate()?;
        if !(self.logistic.learning_rate > 0.0 && self.logistic.learning_rate.is_finite()) {
            return Err(Error::InvalidHyperparams("dv_lr must be positive".into()));
        }
        if self.k < 2 {
            return Err(Error::InvalidHyperparams(format!(
                "k must be at least 2, got {}",
                self.k
            )));
        }
        Ok(())
    }

    fn single_model(&self) -> Result<ModelKind> {
        match self.models[..] {
            [] => Ok(ModelKind::Cnn),
            [one] => Ok(one),
            _ => Err(Error::Config("this command takes a single model".into())),
        }
    }

    /// Loads every dataset, each with its own dialect or the single one given.
    pub fn datasets(&self) -> Result<Vec<(String, Dataset)>> {
        if self.data.is_empty() {
            return Err(Error::Config("no dataset given (use --data)".into()));
        }
        if self.dialects.len() != 1 && self.dialects.len() != self.data.len() {
            return Err(Error::Config(format!(
                "{} dialects given for {} datasets",
                self.dialects.len(),
                self.data.len()
            )));
        }
        self.data
            .iter()
            .enumerate()
            .map(|(i, path)| {
                let choice = self.dialects[if self.dialects.len() == 1 { 0 } else { i }];
                load_dataset(path, choice).map(|d| (dataset_name(path), d))
            })
            .collect()
    }
}

pub fn dataset_name(path: &Path) -> String {
    path.file_name().map_or_else(
        || path.display().to_string(),
        |n| n.to_string_lossy().into_owned(),
    )
}

pub fn load_dataset(path: &Path, dialect: DialectChoice) -> Result<Dataset> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8_lossy(&bytes);
    let dialect = match dialect {
        DialectChoice::Auto => Dialect::detect(&text),
        DialectChoice::Fixed(d) => d,
    };
    parse_str(&text, dialect)
}

/// Writes `contents` to a temporary sibling and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let name = path
        .file_name()
        .map_or_else(String::new, |n| n.to_string_lossy().into_owned());
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    result.map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

fn io_out(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

pub fn cmd_validate(config: &RunConfig, out: &mut dyn Write) -> Result<()> {
    for (name, data) in config.datasets()? {
        let [absent, present] = data.class_counts();
        writeln!(out, "{name}: {} records", data.len()).map_err(io_out)?;
        writeln!(out, "class balance: absent {absent}, present {present}").map_err(io_out)?;
        writeln!(out, "missing values:").map_err(io_out)?;
        for (feature, count) in FEATURE_NAMES.iter().zip(data.missing_counts()) {
            writeln!(out, "  {feature:<9} {count}").map_err(io_out)?;
        }
    }
    Ok(())
}

pub fn cmd_train(config: &RunConfig, out: &mut dyn Write) -> Result<()> {
    config.validate_models()?;
    let kind = config.single_model()?;
    let (name, data) = config
        .datasets()?
        .into_iter()
        .next()
        .expect("at least one dataset");
    let model = config.spec(kind).fit(&data, config.hyper.seed)?;
    let dir = config.out_dir();
    let model_path = dir.join("model.txt");
    write_atomic(&model_path, model_to_text(&model).as_bytes())?;
    let preprocessor = match &model {
        AnyModel::Cnn(m) => &m.preprocessor,
        AnyModel::DvLogistic(m) => &m.preprocessor,
        AnyModel::Elm(m) => &m.preprocessor,
    };
    write_atomic(
        &dir.join("scaler.txt"),
        preprocessor.scaler.to_text(&data.feature_names).as_bytes(),
    )?;
    writeln!(out, "trained {kind} on {name} ({} records)", data.len()).map_err(io_out)?;
    if let AnyModel::Cnn(m) = &model {
        write_atomic(&dir.join("curve.csv"), m.curve.to_csv().as_bytes())?;
        match m.curve.last() {
            Some(last) => writeln!(
                out,
                "final train accuracy {:.6}, loss {:.6}",
                last.train_accuracy, last.train_loss
            )
            .map_err(io_out)?,
            None => writeln!(out, "no epochs run").map_err(io_out)?,
        }
    } else {
        let c = evaluate(&model, &data)?;
        writeln!(
            out,
            "final train accuracy {:.6}",
            c.correct() as f64 / c.total() as f64
        )
        .map_err(io_out)?;
    }
    writeln!(out, "wrote {}", model_path.display()).map_err(io_out)?;
    Ok(())
}

pub fn cmd_cv(config: &RunConfig, out: &mut dyn Write) -> Result<()> {
    config.validate_models()?;
    let kinds = if config.models.is_empty() {
        vec![ModelKind::Cnn]
    } else {
        config.models.clone()
    };
    let dir = config.out_dir();
    for (name, data) in config.datasets()? {
        for &kind in &kinds {
            let mut report = cross_validate(&data, &config.spec(kind), &config.cv_options())?;
            report.dataset.clone_from(&name);
            let stem = if config.data.len() > 1 {
                format!("cv-{kind}-{name}")
            } else {
                format!("cv-{kind}")
            };
            write_atomic(
                &dir.join(format!("{stem}.txt")),
                report.to_text().as_bytes(),
            )?;
            write_atomic(&dir.join(format!("{stem}.csv")), report.to_csv().as_bytes())?;
            writeln!(
                out,
                "{kind} on {name}: mean accuracy {:.6}",
                report.mean_accuracy
            )
            .map_err(io_out)?;
        }
    }
    Ok(())
}

pub fn cmd_compare(config: &RunConfig, out: &mut dyn Write) -> Result<()> {
    config.validate_models()?;
    let kinds = if config.models.is_empty() {
        ModelKind::ALL.to_vec()
    } else {
        config.models.clone()
    };
    let specs: Vec<ModelSpec> = kinds.iter().map(|&k| config.spec(k)).collect();
    let datasets = config.datasets()?;
    let table = compare_models(&datasets, &specs, &config.cv_options())?;
    let dir = config.out_dir();
    write_atomic(&dir.join("comparison.txt"), table.to_text().as_bytes())?;
    write_atomic(&dir.join("comparison.csv"), table.to_csv().as_bytes())?;
    write!(out, "{}", table.to_text()).map_err(io_out)?;
    if table.has_failures() {
        let total = table.rows.len() * table.datasets.len();
        let failed = table
            .rows
            .iter()
            .flat_map(|r| &r.cells)
            .filter(|c| c.mean().is_none())
            .count();
        return Err(Error::ComparisonFailed { failed, total });
    }
    Ok(())
}

pub fn cmd_predict(model_file: &Path, record: &str, out: &mut dyn Write) -> Result<()> {
    let bytes = fs::read(model_file).map_err(|e| Error::io(model_file, e))?;
    let model = model_from_text(&String::from_utf8_lossy(&bytes))?;
    let features = parse_feature_list(record)?;
    let p = model.predict(&features)?;
    writeln!(
        out,
        "class {}, p = {:.6} {:.6}",
        p.class.index(),
        p.probabilities[0],
        p.probabilities[1]
    )
    .map_err(io_out)
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    if let Command::Predict { model_file, record } = &cli.command {
        return cmd_predict(model_file, record, out);
    }
    let config = RunConfig::from_flags(&cli.flags)?;
    match &cli.command {
        Command::Validate => cmd_validate(&config, out),
        Command::Train => cmd_train(&config, out),
        Command::Cv => cmd_cv(&config, out),
        Command::Compare => cmd_compare(&config, out),
        Command::Predict { .. } => unreachable!("handled above"),
    }
}

/// Process exit code for a finished run: 0 success, 2 bad input, 3 failed run.
pub fn exit_code(result: &Result<()>) -> i32 {
    match result {
        Ok(()) => 0,
        Err(e) if e.is_input_error() => 2,
        Err(_) => 3,
    }
}
