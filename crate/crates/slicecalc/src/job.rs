//! Job files: one operator, one command, optional settings.

use serde::Deserialize;
use serde_json::Value;
use slicecalc_core::calculus::{apply_left, apply_right, riesz_projector, CalcOptions, NodeRule};
use slicecalc_core::spectrum::{s_spectrum, s_spectrum_oracle, OracleField, OracleGrid, SResolvent};
use slicecalc_core::{CliffordMatrix, ImaginaryUnit};

use crate::error::{CliError, EXIT_OK, EXIT_VERIFY};
use crate::json::{CalcResultJson, MatrixJson, SpectrumJson};
use crate::lang::parse_function;
use crate::random;
use crate::verify::{self, VerifyConfig};

pub const DEFAULT_GRID_STEP: f64 = 0.01;
pub const DEFAULT_RANDOM_SCALE: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Spectrum,
    Apply,
    Project,
    Verify,
    Sweep,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    #[default]
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomOperator {
    pub d: usize,
    pub n: usize,
    #[serde(default = "default_scale")]
    pub scale: f64,
}

fn default_scale() -> f64 {
    DEFAULT_RANDOM_SCALE
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    pub padding: Option<f64>,
    /// Fixed nodes per circle; adaptive doubling when absent.
    pub nodes: Option<usize>,
    pub units: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    /// Imaginary unit of the integration slice.
    pub unit: Option<Vec<f64>>,
    pub grid_step: Option<f64>,
    /// Where `spectrum` also writes the oracle CSV.
    pub sweep_csv: Option<String>,
}

impl Options {
    /// Fields set in `other` win.
    pub fn merged(&self, other: &Options) -> Options {
        Options {
            padding: other.padding.or(self.padding),
            nodes: other.nodes.or(self.nodes),
            units: other.units.or(self.units),
            seed: other.seed.or(self.seed),
            tol: other.tol.or(self.tol),
            unit: other.unit.clone().or_else(|| self.unit.clone()),
            grid_step: other.grid_step.or(self.grid_step),
            sweep_csv: other.sweep_csv.clone().or_else(|| self.sweep_csv.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: Command,
    pub operator: Option<MatrixJson>,
    /// Seeded random operator, used instead of `operator`.
    pub random: Option<RandomOperator>,
    pub function: Option<String>,
    #[serde(default)]
    pub side: Side,
    pub subset: Option<Vec<usize>>,
    #[serde(default)]
    pub options: Options,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Output {
    Json(Value),
    Csv(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub output: Output,
    pub exit_code: i32,
}

impl JobSpec {
    pub fn parse(text: &str) -> Result<JobSpec, CliError> {
        let job: JobSpec = serde_json::from_str(text)?;
        job.validate()?;
        Ok(job)
    }

    fn validate(&self) -> Result<(), CliError> {
        let missing = |what: &str| CliError::Parse(format!("command {:?} requires \"{what}\"", self.command));
        let stray = |what: &str| CliError::Parse(format!("command {:?} does not take \"{what}\"", self.command));
        match (&self.operator, &self.random) {
            (None, None) => return Err(CliError::Parse("job needs \"operator\" or \"random\"".into())),
            (Some(_), Some(_)) => return Err(CliError::Parse("\"operator\" and \"random\" are exclusive".into())),
            _ => {}
        }
        let apply = self.command == Command::Apply;
        let project = self.command == Command::Project;
        match (apply, &self.function) {
            (true, None) => return Err(missing("function")),
            (false, Some(_)) => return Err(stray("function")),
            _ => {}
        }
        if !apply && self.side != Side::Left {
            return Err(stray("side"));
        }
        match (project, &self.subset) {
            (true, None) => return Err(missing("subset")),
            (false, Some(_)) => return Err(stray("subset")),
            _ => {}
        }
        if self.options.sweep_csv.is_some() && self.command != Command::Spectrum {
            return Err(stray("options.sweep_csv"));
        }
        Ok(())
    }

    pub fn operator(&self, seed: u64) -> Result<CliffordMatrix, CliError> {
        match (&self.operator, &self.random) {
            (Some(m), _) => m.to_matrix(),
            (None, Some(r)) => {
                if r.d == 0 || r.n > slicecalc_core::algebra::MAX_GENERATORS || !(r.scale > 0.0) {
                    return Err(CliError::Parse(format!("invalid random operator {r:?}")));
                }
                Ok(random::operator(&mut random::rng(seed), r.d, r.n, r.scale))
            }
            (None, None) => Err(CliError::Parse("job needs \"operator\" or \"random\"".into())),
        }
    }
}

pub fn calc_options(o: &Options) -> Result<CalcOptions, CliError> {
    let mut opts = CalcOptions::default();
    if let Some(p) = o.padding {
        opts.padding = p;
    }
    if let Some(n) = o.nodes {
        if n < 2 || n % 2 != 0 {
            return Err(CliError::Parse(format!("nodes = {n} must be an even number of at least 2")));
        }
        opts.nodes = NodeRule::Fixed(n);
    } else if let (Some(tol), NodeRule::Adaptive { start, max, .. }) = (o.tol, opts.nodes) {
        opts.nodes = NodeRule::Adaptive { start, max, tol };
    }
    if let Some(u) = &o.unit {
        opts.unit = Some(ImaginaryUnit::new(u.clone())?);
    }
    Ok(opts)
}

pub fn oracle_csv(field: &OracleField) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(["u", "v", "sigma_min"]).map_err(io)?;
    for row in field.samples() {
        w.serialize(row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

fn oracle(t: &CliffordMatrix, o: &Options) -> Result<OracleField, CliError> {
    let step = o.grid_step.unwrap_or(DEFAULT_GRID_STEP);
    if !(step > 0.0 && step.is_finite()) {
        return Err(CliError::Parse(format!("grid_step = {step} must be positive")));
    }
    Ok(s_spectrum_oracle(t, OracleGrid::covering(t.norm_paper() + step, step))?)
}

/// Runs a job with command-line settings layered over the job's own options.
pub fn run(job: &JobSpec, overrides: &Options) -> Result<Outcome, CliError> {
    let o = job.options.merged(overrides);
    let seed = o.seed.unwrap_or(0);
    let t = job.operator(seed)?;
    let json = |v: Value| Outcome { output: Output::Json(v), exit_code: EXIT_OK };
    match job.command {
        Command::Spectrum => {
            let spec = s_spectrum(&t)?;
            let mut v = serde_json::to_value(SpectrumJson::from_spectrum(&spec))?;
            if let Some(path) = &o.sweep_csv {
                std::fs::write(path, oracle_csv(&oracle(&t, &o)?)?)?;
                v["sweep_csv"] = Value::String(path.clone());
            }
            Ok(json(v))
        }
        Command::Sweep => Ok(Outcome { output: Output::Csv(oracle_csv(&oracle(&t, &o)?)?), exit_code: EXIT_OK }),
        Command::Apply => {
            let f = parse_function(job.function.as_deref().unwrap_or_default())?;
            let res = SResolvent::new(&t)?;
            let opts = calc_options(&o)?;
            let r = match job.side {
                Side::Left => apply_left(&f, &res, &opts)?,
                Side::Right => apply_right(&f, &res, &opts)?,
            };
            Ok(json(serde_json::to_value(CalcResultJson::from_result(&r))?))
        }
        Command::Project => {
            let res = SResolvent::new(&t)?;
            let r = riesz_projector(&res, job.subset.as_deref().unwrap_or_default(), &calc_options(&o)?)?;
            Ok(json(serde_json::to_value(CalcResultJson::from_result(&r))?))
        }
        Command::Verify => {
            let calc = calc_options(&Options { tol: None, ..o.clone() })?;
            let cfg = VerifyConfig { calc, units: o.units.unwrap_or(3), seed, tol: o.tol };
            let report = verify::run(&t, &cfg)?;
            let exit_code = if report.passed { EXIT_OK } else { EXIT_VERIFY };
            Ok(Outcome { output: Output::Json(serde_json::to_value(report)?), exit_code })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_line_settings_win() {
        let job = Options { padding: Some(0.5), nodes: Some(64), ..Options::default() };
        let cli = Options { nodes: Some(128), seed: Some(7), ..Options::default() };
        let merged = job.merged(&cli);
        assert_eq!((merged.padding, merged.nodes, merged.seed), (Some(0.5), Some(128), Some(7)));
    }

    #[test]
    fn node_and_tolerance_settings() {
        let fixed = calc_options(&Options { nodes: Some(64), tol: Some(1e-3), ..Options::default() }).unwrap();
        assert_eq!(fixed.nodes, NodeRule::Fixed(64));
        let adaptive = calc_options(&Options { tol: Some(1e-6), ..Options::default() }).unwrap();
        assert!(matches!(adaptive.nodes, NodeRule::Adaptive { tol, .. } if tol == 1e-6));
        assert!(calc_options(&Options { nodes: Some(3), ..Options::default() }).is_err());
    }

    #[test]
    fn random_operator_follows_the_seed() {
        let job = JobSpec::parse(r#"{"command": "spectrum", "random": {"d": 2, "n": 1}}"#).unwrap();
        assert_eq!(job.operator(3).unwrap(), job.operator(3).unwrap());
        assert_ne!(job.operator(3).unwrap(), job.operator(4).unwrap());
        let bad = JobSpec::parse(r#"{"command": "spectrum", "random": {"d": 0, "n": 1}}"#).unwrap();
        assert!(bad.operator(0).is_err());
    }

    #[test]
    fn side_is_only_for_apply() {
        let text = r#"{"command": "verify", "random": {"d": 1, "n": 1}, "side": "right"}"#;
        assert!(matches!(JobSpec::parse(text), Err(CliError::Parse(_))));
    }
}
