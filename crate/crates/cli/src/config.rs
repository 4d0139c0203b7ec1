//! Config file, flag overrides and the resolved run configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use sbvqe::pauli_bench::Method;
use sbvqe::vqe::{default_layers, GradientMode, OptimizerConfig, ShotPolicy};
use sbvqe::SupercellDims;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("bad config {path}: {message}")]
    Syntax { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Sampled,
}

/// `auto` runs the two-stage band-gap workflow; a number runs one stage at that ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OmegaPolicy {
    Auto,
    Fixed(f64),
}

impl OmegaPolicy {
    /// Reference energy for single-operator commands.
    pub fn reference(self) -> f64 {
        match self {
            OmegaPolicy::Auto => 0.0,
            OmegaPolicy::Fixed(w) => w,
        }
    }
}

impl FromStr for OmegaPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.trim().eq_ignore_ascii_case("auto") {
            return Ok(OmegaPolicy::Auto);
        }
        match s.trim().parse::<f64>() {
            Ok(w) if w.is_finite() => Ok(OmegaPolicy::Fixed(w)),
            _ => Err(format!(
                "omega must be `auto` or a finite number, got {s:?}"
            )),
        }
    }
}

impl fmt::Display for OmegaPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaPolicy::Auto => f.write_str("auto"),
            OmegaPolicy::Fixed(w) => write!(f, "{w}"),
        }
    }
}

impl Serialize for OmegaPolicy {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            OmegaPolicy::Auto => s.serialize_str("auto"),
            OmegaPolicy::Fixed(w) => s.serialize_f64(*w),
        }
    }
}

impl<'de> Deserialize<'de> for OmegaPolicy {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(w) if w.is_finite() => Ok(OmegaPolicy::Fixed(w)),
            Raw::Num(w) => Err(serde::de::Error::custom(format!(
                "omega must be finite, got {w}"
            ))),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

fn parse_dims(s: &str) -> Result<SupercellDims, String> {
    s.parse::<SupercellDims>().map_err(|e| e.to_string())
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.trim().parse::<Method>().map_err(|e| e.to_string())
}

/// Flags shared by every subcommand. Each one overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Supercell size, `nx,ny,nz`.
    #[arg(long, value_parser = parse_dims)]
    pub dims: Option<SupercellDims>,
    /// Include spin and spin-orbit coupling.
    #[arg(long)]
    pub spin: bool,
    /// Spinless basis, overriding `spin = true` in the config.
    #[arg(long, conflicts_with = "spin")]
    pub no_spin: bool,
    /// Tight-binding parameter file; the built-in PbI3 set otherwise.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Use this MatrixMarket Hamiltonian instead of assembling one.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Target sampling error for shot allocation.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Fixed shots for every circuit.
    #[arg(long)]
    pub shots_per_circuit: Option<u64>,
    #[arg(long)]
    pub layers: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `auto` or a reference energy.
    #[arg(long)]
    pub omega: Option<OmegaPolicy>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Attach exact-diagonalisation references.
    #[arg(long)]
    pub validate_ed: bool,
    /// Parameter-shift gradients, sampled like the cost in sampled mode.
    #[arg(long)]
    pub parameter_shift: bool,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Benchmark sizes, `nx,ny,nz;nx,ny,nz;...`.
    #[arg(long, value_parser = parse_dims, value_delimiter = ';')]
    pub sizes: Vec<SupercellDims>,
    /// Benchmark methods, comma separated.
    #[arg(long, value_parser = parse_method, value_delimiter = ',')]
    pub methods: Vec<Method>,
    /// Per-cell benchmark timeout in seconds.
    #[arg(long)]
    pub timeout: Option<f64>,
    /// Run benchmark cells concurrently instead of one at a time.
    #[arg(long)]
    pub parallel_cells: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    dims: Option<String>,
    spin: Option<bool>,
    params: Option<PathBuf>,
    matrix: Option<PathBuf>,
    mode: Option<Mode>,
    epsilon: Option<f64>,
    shots_per_circuit: Option<u64>,
    layers: Option<usize>,
    seed: Option<u64>,
    omega: Option<OmegaPolicy>,
    out: Option<PathBuf>,
    validate_ed: Option<bool>,
    threads: Option<usize>,
    optimizer: Option<OptimizerConfig>,
    bench: Option<FileBench>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileBench {
    sizes: Option<Vec<String>>,
    methods: Option<Vec<Method>>,
    timeout_s: Option<f64>,
    min_sample_time_s: Option<f64>,
    max_repeats: Option<usize>,
    parallel_cells: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchConfig {
    pub sizes: Vec<String>,
    pub methods: Vec<Method>,
    pub timeout_s: f64,
    pub min_sample_time_s: f64,
    pub max_repeats: usize,
    pub parallel_cells: bool,
}

/// Fully resolved configuration, embedded in every output file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub dims: String,
    pub spin: bool,
    /// `builtin` for the bundled parameter set.
    pub params: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<String>,
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots_per_circuit: Option<u64>,
    pub layers: usize,
    pub seed: u64,
    pub omega: OmegaPolicy,
    pub out: String,
    pub validate_ed: bool,
    pub threads: usize,
    pub optimizer: OptimizerConfig,
    pub bench: BenchConfig,
    #[serde(skip)]
    pub supercell: SupercellDims,
    #[serde(skip)]
    pub params_path: Option<PathBuf>,
    #[serde(skip)]
    pub matrix_path: Option<PathBuf>,
    #[serde(skip)]
    pub out_dir: PathBuf,
    #[serde(skip)]
    pub bench_sizes: Vec<SupercellDims>,
}

pub const DEFAULT_BENCH_SIZES: [&str; 4] = ["1x1x1", "1x1x2", "1x2x2", "2x2x2"];

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

fn read_file(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| ConfigError::Syntax {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self, ConfigError> {
        let file = match &args.config {
            Some(p) => read_file(p)?,
            None => FileConfig::default(),
        };
        let supercell = match (args.dims, &file.dims) {
            (Some(d), _) => d,
            (None, Some(s)) => parse_dims(s).map_err(invalid)?,
            (None, None) => SupercellDims::new(1, 1, 2),
        };
        if supercell.cell_count() == 0 {
            return Err(invalid(format!(
                "supercell dimensions must be positive, got {supercell}"
            )));
        }
        let spin = if args.spin {
            true
        } else if args.no_spin {
            false
        } else {
            file.spin.unwrap_or(true)
        };
        let params_path = args.params.clone().or(file.params);
        let matrix_path = args.matrix.clone().or(file.matrix);
        let mode = args.mode.or(file.mode).unwrap_or(Mode::Exact);

        // A flag beats either shot setting from the file; within one layer both is an error.
        let layer = |eps: Option<f64>,
                     shots: Option<u64>,
                     origin: &str|
         -> Result<Option<ShotPolicy>, ConfigError> {
            match (eps, shots) {
                (Some(_), Some(_)) => Err(invalid(format!(
                    "{origin} sets both epsilon and shots_per_circuit"
                ))),
                (Some(e), None) => Ok(Some(ShotPolicy::Epsilon(e))),
                (None, Some(k)) => Ok(Some(ShotPolicy::PerCircuit(k))),
                (None, None) => Ok(None),
            }
        };
        let policy = match layer(args.epsilon, args.shots_per_circuit, "the command line")? {
            Some(p) => Some(p),
            None => layer(file.epsilon, file.shots_per_circuit, "the config file")?,
        };
        match policy {
            Some(ShotPolicy::Epsilon(e)) if !(e > 0.0 && e.is_finite()) => {
                return Err(invalid(format!(
                    "epsilon must be positive and finite, got {e}"
                )))
            }
            Some(ShotPolicy::PerCircuit(0)) => {
                return Err(invalid("shots_per_circuit must be at least 1"))
            }
            None if mode == Mode::Sampled => {
                return Err(invalid("sampled mode needs epsilon or shots_per_circuit"))
            }
            _ => {}
        }
        let (epsilon, shots_per_circuit) = match policy {
            Some(ShotPolicy::Epsilon(e)) => (Some(e), None),
            Some(ShotPolicy::PerCircuit(k)) => (None, Some(k)),
            None => (None, None),
        };

        let layers = args
            .layers
            .or(file.layers)
            .unwrap_or_else(|| default_layers(supercell.cell_count()));
        if layers == 0 {
            return Err(invalid("layers must be at least 1"));
        }
        let threads = args.threads.or(file.threads).unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        });
        if threads == 0 {
            return Err(invalid("threads must be at least 1"));
        }
        let mut optimizer = file.optimizer.unwrap_or_default();
        if args.parameter_shift {
            optimizer.gradient = GradientMode::ParameterShift;
        }
        if !(optimizer.learning_rate > 0.0 && optimizer.convergence_band > 0.0)
            || optimizer.max_iterations == 0
        {
            return Err(invalid(
                "optimizer needs a positive learning_rate, convergence_band and max_iterations",
            ));
        }

        let fb = file.bench.unwrap_or_default();
        let flag_sizes = Some(args.sizes.clone()).filter(|s| !s.is_empty());
        let bench_sizes = match (flag_sizes, &fb.sizes) {
            (Some(s), _) => s,
            (None, Some(s)) => s
                .iter()
                .map(|d| parse_dims(d))
                .collect::<Result<_, _>>()
                .map_err(invalid)?,
            (None, None) => DEFAULT_BENCH_SIZES
                .iter()
                .map(|d| parse_dims(d).expect("valid default"))
                .collect(),
        };
        if bench_sizes.is_empty() {
            return Err(invalid("benchmark needs at least one size"));
        }
        let methods = Some(args.methods.clone())
            .filter(|m| !m.is_empty())
            .or(fb.methods)
            .unwrap_or_else(|| Method::ALL.to_vec());
        if methods.is_empty() {
            return Err(invalid("benchmark needs at least one method"));
        }
        let timeout_s = args.timeout.or(fb.timeout_s).unwrap_or(3600.0);
        let min_sample_time_s = fb.min_sample_time_s.unwrap_or(0.2);
        if !(timeout_s >= 0.0
            && timeout_s.is_finite()
            && min_sample_time_s >= 0.0
            && min_sample_time_s.is_finite())
        {
            return Err(invalid("benchmark times must be finite and non-negative"));
        }
        let max_repeats = fb.max_repeats.unwrap_or(201);
        if max_repeats == 0 {
            return Err(invalid("max_repeats must be at least 1"));
        }
        let bench = BenchConfig {
            sizes: bench_sizes.iter().map(|d| d.to_string()).collect(),
            methods,
            timeout_s,
            min_sample_time_s,
            max_repeats,
            parallel_cells: args.parallel_cells || fb.parallel_cells.unwrap_or(false),
        };

        let out_dir = args
            .out
            .clone()
            .or(file.out)
            .unwrap_or_else(|| PathBuf::from("out"));
        Ok(RunConfig {
            dims: supercell.to_string(),
            spin,
            params: params_path
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| "builtin".into()),
            matrix: matrix_path.as_ref().map(|p| p.display().to_string()),
            mode,
            epsilon,
            shots_per_circuit,
            layers,
            seed: args.seed.or(file.seed).unwrap_or(0),
            omega: args.omega.or(file.omega).unwrap_or(OmegaPolicy::Auto),
            out: out_dir.display().to_string(),
            validate_ed: args.validate_ed || file.validate_ed.unwrap_or(false),
            threads,
            optimizer,
            bench,
            supercell,
            params_path,
            matrix_path,
            out_dir,
            bench_sizes,
        })
    }

    /// Shot policy in sampled mode, `None` in exact mode.
    pub fn shot_policy(&self) -> Option<ShotPolicy> {
        if self.mode == Mode::Exact {
            return None;
        }
        self.policy()
    }

    /// Shot setting regardless of mode.
    pub fn policy(&self) -> Option<ShotPolicy> {
        match (self.epsilon, self.shots_per_circuit) {
            (Some(e), _) => Some(ShotPolicy::Epsilon(e)),
            (None, Some(k)) => Some(ShotPolicy::PerCircuit(k)),
            (None, None) => None,
        }
    }

    /// The resolved config as TOML, one line per output comment.
    pub fn comment_lines(&self) -> Vec<String> {
        let text = toml::to_string(self).expect("config serialises");
        let mut lines = vec!["sbvqe resolved config".to_string()];
        lines.extend(text.lines().filter(|l| !l.is_empty()).map(str::to_string));
        lines
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_parsing() {
        assert_eq!("auto".parse::<OmegaPolicy>().unwrap(), OmegaPolicy::Auto);
        assert_eq!(
            "-0.25".parse::<OmegaPolicy>().unwrap(),
            OmegaPolicy::Fixed(-0.25)
        );
        assert!("nan".parse::<OmegaPolicy>().is_err());
        let f: FileConfig = toml::from_str("omega = 1").unwrap();
        assert_eq!(f.omega, Some(OmegaPolicy::Fixed(1.0)));
        let f: FileConfig = toml::from_str("omega = \"auto\"").unwrap();
        assert_eq!(f.omega, Some(OmegaPolicy::Auto));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<FileConfig>("dimz = \"1,1,1\"").is_err());
        assert!(toml::from_str::<FileConfig>("[optimizer]\nrate = 1").is_err());
    }

    #[test]
    fn defaults_and_validation() {
        let c = RunConfig::resolve(&CommonArgs::default()).unwrap();
        assert_eq!(c.supercell, SupercellDims::new(1, 1, 2));
        assert!(c.spin);
        assert_eq!(c.layers, 4);
        assert_eq!(c.mode, Mode::Exact);
        assert!(c.comment_lines().iter().any(|l| l == "seed = 0"));
        let sampled = CommonArgs {
            mode: Some(Mode::Sampled),
            ..Default::default()
        };
        assert!(RunConfig::resolve(&sampled).is_err());
        let bad_eps = CommonArgs {
            mode: Some(Mode::Sampled),
            epsilon: Some(0.0),
            ..Default::default()
        };
        assert!(RunConfig::resolve(&bad_eps).is_err());
        let both = CommonArgs {
            epsilon: Some(0.1),
            shots_per_circuit: Some(5),
            ..Default::default()
        };
        assert!(RunConfig::resolve(&both).is_err());
        let zero_layers = CommonArgs {
            layers: Some(0),
            ..Default::default()
        };
        assert!(RunConfig::resolve(&zero_layers).is_err());
    }
}
