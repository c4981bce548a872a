//! Experiment configuration: a TOML file, optional dotted-key overrides,
//! and constructors for the domain and initial profile they describe.
//!
//! Every knob has a default, so `mems evolve` with no config runs the
//! reference case (unit interval, chi = 1, lambda = 0.5, start from rest).
//! Overrides are applied to the raw TOML table before the typed parse, so
//! a typo in a key fails loudly instead of being ignored.

use std::fs;
use std::path::{Path, PathBuf};

use mems_core::{minimal_solution, principal_eigenpair, DiscreteField, Domain, DomainSpec};
use mems_core::EvolveOptions;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Supported domain shapes. Balls are radially symmetric, so both shapes
/// reduce to one spatial coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    Interval,
    Ball,
}

/// The `[domain]` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DomainConfig {
    pub kind: Shape,
    /// Half-width of the interval or radius of the ball.
    pub size: f64,
    /// Space dimension; balls only, default 2.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dim: Option<usize>,
    /// Interior cells per radius; the grid spacing is size / cells.
    pub cells: usize,
}

impl Default for DomainConfig {
    fn default() -> Self {
        DomainConfig {
            kind: Shape::Interval,
            size: 1.0,
            dim: None,
            cells: 128,
        }
    }
}

impl DomainConfig {
    pub fn build(&self) -> Result<Domain> {
        let spec = match self.kind {
            Shape::Interval => DomainSpec::interval(self.size, self.cells),
            Shape::Ball => DomainSpec::ball(self.size, self.dim.unwrap_or(2), self.cells),
        };
        Ok(Domain::new(spec)?)
    }
}

/// The `[params]` table: forcing strength and nonlocal coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    pub chi: f64,
    pub lambda: f64,
    /// Sweep voltages, strictly increasing; quench-sweep only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambdas: Option<Vec<f64>>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            chi: 1.0,
            lambda: 0.5,
            lambdas: None,
        }
    }
}

/// The `[u0]` table, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialData {
    /// Start from rest.
    Zero,
    /// c times the principal eigenfunction (normalized to integral one).
    ScaledEigenfunction { c: f64 },
    /// Minimal steady profile of the local equation at voltage mu.
    SteadyProfile { mu: f64 },
    /// Node values read from a text file, one per line, boundary included.
    File { path: PathBuf },
}

impl Default for InitialData {
    fn default() -> Self {
        InitialData::Zero
    }
}

impl InitialData {
    /// Realizes the profile on a concrete grid.
    pub fn build(&self, d: &Domain) -> Result<DiscreteField> {
        match self {
            InitialData::Zero => Ok(d.zero_field()),
            InitialData::ScaledEigenfunction { c } => {
                let eig = principal_eigenpair(d)?;
                let values = eig.phi1.values.iter().map(|&v| c * v).collect();
                Ok(d.field_from_values(values)?)
            }
            InitialData::SteadyProfile { mu } => Ok(minimal_solution(d, *mu)?),
            InitialData::File { path } => {
                let body = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                let mut values = Vec::new();
                for (ln, line) in body.lines().enumerate() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    let v: f64 = line.parse().map_err(|_| {
                        Error::Config(format!(
                            "{}:{}: expected a number, got {line:?}",
                            path.display(),
                            ln + 1
                        ))
                    })?;
                    values.push(v);
                }
                Ok(d.field_from_values(values)?)
            }
        }
    }
}

/// The `[evolve]` table; time stepping and sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveConfig {
    pub dt: f64,
    pub t_max: f64,
    /// Keep every stride-th accepted step in the sampled series.
    pub stride: usize,
    /// Touchdown is declared at sup u >= 1 - quench_tol.
    pub quench_tol: f64,
    /// Steady state is declared when the step-to-step change, scaled to
    /// rate, falls below this.
    pub steady_tol: f64,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig {
            dt: 1e-3,
            t_max: 50.0,
            stride: 10,
            quench_tol: 1e-3,
            steady_tol: 1e-8,
        }
    }
}

impl EvolveConfig {
    pub fn to_options(&self) -> EvolveOptions {
        let mut opts = EvolveOptions::new(self.dt, self.t_max).with_stride(self.stride);
        opts.quench_tol = self.quench_tol;
        opts.steady_tol = self.steady_tol;
        opts
    }
}

/// The `[output]` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
        }
    }
}

/// One experiment, fully described.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Optional experiment name; must match the invoked subcommand.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub experiment: Option<String>,
    /// Reserved for future randomized experiments. Echoed into records so
    /// configs stay forward-compatible; nothing consumes it yet.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub domain: DomainConfig,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub u0: InitialData,
    #[serde(default)]
    pub evolve: EvolveConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let body = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&body)
    }

    /// Applies `key.path=value` overrides on the raw TOML table, then
    /// re-parses, so unknown keys and type mismatches are caught the same
    /// way they would be in the file itself.
    pub fn with_overrides(&self, overrides: &[String]) -> Result<Self> {
        if overrides.is_empty() {
            return Ok(self.clone());
        }
        let value =
            toml::Value::try_from(self).map_err(|e| Error::Config(format!("re-encode: {e}")))?;
        let mut table = match value {
            toml::Value::Table(t) => t,
            _ => unreachable!("a struct encodes as a table"),
        };
        for spec in overrides {
            let (key, raw) = spec.split_once('=').ok_or_else(|| {
                Error::Config(format!("override {spec:?} is not of the form key=value"))
            })?;
            let parts: Vec<&str> = key.split('.').collect();
            if parts.iter().any(|p| p.is_empty()) {
                return Err(Error::Config(format!("override key {key:?} has an empty part")));
            }
            set_dotted(&mut table, &parts, parse_override_value(raw), spec)?;
        }
        toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))
    }

    /// Cross-field checks that the serde layer cannot express.
    pub fn validate(&self) -> Result<()> {
        if self.domain.kind == Shape::Interval && self.domain.dim.is_some() {
            return Err(Error::Config(
                "domain.dim applies to balls only".to_string(),
            ));
        }
        let p = &self.params;
        if !p.chi.is_finite() || p.chi < 0.0 {
            return Err(Error::Config(format!(
                "params.chi must be nonnegative, got {}",
                p.chi
            )));
        }
        if !p.lambda.is_finite() || p.lambda < 0.0 {
            return Err(Error::Config(format!(
                "params.lambda must be nonnegative, got {}",
                p.lambda
            )));
        }
        if let Some(ls) = &p.lambdas {
            if ls.is_empty() {
                return Err(Error::Config("params.lambdas is empty".to_string()));
            }
            if ls.iter().any(|l| !l.is_finite() || *l <= 0.0) {
                return Err(Error::Config(
                    "params.lambdas must be positive and finite".to_string(),
                ));
            }
            if ls.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Config(
                    "params.lambdas must be strictly increasing".to_string(),
                ));
            }
        }
        let e = &self.evolve;
        if !(e.dt > 0.0 && e.t_max > 0.0 && e.quench_tol > 0.0 && e.steady_tol > 0.0) {
            return Err(Error::Config(
                "evolve: dt, t_max, quench_tol, steady_tol must be positive".to_string(),
            ));
        }
        if e.stride == 0 {
            return Err(Error::Config("evolve.stride must be at least 1".to_string()));
        }
        match &self.u0 {
            InitialData::ScaledEigenfunction { c } if !c.is_finite() || *c < 0.0 => {
                Err(Error::Config(format!(
                    "u0.c must be nonnegative, got {c}"
                )))
            }
            InitialData::SteadyProfile { mu } if !mu.is_finite() || *mu <= 0.0 => Err(
                Error::Config(format!("u0.mu must be positive, got {mu}")),
            ),
            _ => Ok(()),
        }
    }

    /// Stamps (or cross-checks) the experiment name, so the record echoes
    /// what actually ran.
    pub fn for_experiment(mut self, name: &str) -> Result<Self> {
        if let Some(e) = &self.experiment {
            if e != name {
                return Err(Error::Config(format!(
                    "config is for experiment {e:?}, but {name:?} was invoked"
                )));
            }
        }
        self.experiment = Some(name.to_string());
        Ok(self)
    }

    pub fn domain(&self) -> Result<Domain> {
        self.domain.build()
    }

    pub fn initial_field(&self, d: &Domain) -> Result<DiscreteField> {
        self.u0.build(d)
    }

    pub fn evolve_options(&self) -> EvolveOptions {
        self.evolve.to_options()
    }
}

/// Values are parsed as TOML fragments (so numbers, booleans, and arrays
/// work without quoting); anything that fails to parse is taken as a bare
/// string, which keeps paths and enum tags convenient on a shell line.
fn parse_override_value(raw: &str) -> toml::Value {
    let wrapped = format!("v = {raw}");
    match toml::from_str::<toml::value::Table>(&wrapped) {
        Ok(mut t) => t.remove("v").expect("key v was just parsed"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

fn set_dotted(
    table: &mut toml::value::Table,
    keys: &[&str],
    value: toml::Value,
    spec: &str,
) -> Result<()> {
    let (head, rest) = keys.split_first().expect("empty parts were rejected");
    if rest.is_empty() {
        table.insert(head.to_string(), value);
        return Ok(());
    }
    let entry = table
        .entry(head.to_string())
        .or_insert_with(|| toml::Value::Table(toml::value::Table::new()));
    match entry.as_table_mut() {
        Some(sub) => set_dotted(sub, rest, value, spec),
        None => Err(Error::Config(format!(
            "override {spec:?} descends into {head:?}, which is not a table"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_describe_the_reference_interval_run() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.domain.kind, Shape::Interval);
        assert_eq!(cfg.domain.cells, 128);
        assert_eq!(cfg.params.chi, 1.0);
        assert_eq!(cfg.params.lambda, 0.5);
        let d = cfg.domain().unwrap();
        let u0 = cfg.initial_field(&d).unwrap();
        assert_eq!(u0.max_abs(), 0.0);
    }

    #[test]
    fn full_config_round_trips_through_toml() {
        let text = r#"
            experiment = "evolve"
            seed = 7

            [domain]
            kind = "ball"
            size = 2.0
            dim = 3
            cells = 64

            [params]
            chi = 0.4
            lambda = 5.0
            lambdas = [5.0, 10.0, 20.0]

            [u0]
            kind = "scaled-eigenfunction"
            c = 0.3

            [evolve]
            dt = 5e-4
            t_max = 10.0
            stride = 4
            quench_tol = 1e-3
            steady_tol = 1e-9

            [output]
            dir = "runs/ball"
        "#;
        let cfg = ExperimentConfig::parse(text).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.domain.dim, Some(3));
        assert_eq!(cfg.u0, InitialData::ScaledEigenfunction { c: 0.3 });
        let encoded = toml::to_string(&cfg).unwrap();
        let back = ExperimentConfig::parse(&encoded).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn overrides_reach_nested_keys_and_switch_variants() {
        let cfg = ExperimentConfig::default()
            .with_overrides(&[
                "params.lambda=0.7".to_string(),
                "domain.cells=256".to_string(),
                "u0.kind=steady-profile".to_string(),
                "u0.mu=0.2".to_string(),
                "output.dir=elsewhere".to_string(),
                "params.lambdas=[1.0, 2.0]".to_string(),
            ])
            .unwrap();
        assert_eq!(cfg.params.lambda, 0.7);
        assert_eq!(cfg.domain.cells, 256);
        assert_eq!(cfg.u0, InitialData::SteadyProfile { mu: 0.2 });
        assert_eq!(cfg.output.dir, PathBuf::from("elsewhere"));
        assert_eq!(cfg.params.lambdas.as_deref(), Some(&[1.0, 2.0][..]));
    }

    #[test]
    fn misspelled_override_keys_are_rejected() {
        let err = ExperimentConfig::default()
            .with_overrides(&["params.lamda=3.0".to_string()])
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("lamda"), "unhelpful message: {msg}");
    }

    #[test]
    fn validation_rejects_unordered_sweeps_and_misplaced_dim() {
        let mut cfg = ExperimentConfig::default();
        cfg.params.lambdas = Some(vec![10.0, 5.0]);
        assert!(cfg.validate().is_err());
        cfg.params.lambdas = Some(vec![5.0, 10.0]);
        cfg.validate().unwrap();
        cfg.domain.dim = Some(2);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn experiment_name_is_stamped_and_cross_checked() {
        let cfg = ExperimentConfig::default().for_experiment("energy").unwrap();
        assert_eq!(cfg.experiment.as_deref(), Some("energy"));
        assert!(cfg.clone().for_experiment("evolve").is_err());
        cfg.for_experiment("energy").unwrap();
    }

    #[test]
    fn file_profiles_are_read_one_value_per_line() {
        let mut cfg = ExperimentConfig::default();
        cfg.domain.cells = 16;
        let d = cfg.domain().unwrap();
        let want = d.field_from_fn(|x| 0.25 * (1.0 - x * x));

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u0.txt");
        let mut body = String::from("# initial profile\n");
        for v in &want.values {
            body.push_str(&format!("{v}\n"));
        }
        std::fs::write(&path, body).unwrap();

        cfg.u0 = InitialData::File { path: path.clone() };
        let got = cfg.initial_field(&d).unwrap();
        assert_eq!(got.values, want.values);

        std::fs::write(&path, "0.1\n0.2\n").unwrap();
        assert!(cfg.initial_field(&d).is_err());
    }
}
