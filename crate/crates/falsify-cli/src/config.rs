//! Experiment configuration: a TOML document with one table per scenario.
//! Exact rationals are written as `"p/q"` strings so nothing is lost to
//! decimal notation.

use std::fmt;
use std::str::FromStr;

use serde::Deserialize;

use falsify_core::numerics::Rational;
use falsify_core::slt::{Domain, EventDistribution, Theory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Slt,
    Seq,
    Uni,
    Sweep,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Scenario::Slt => "slt",
            Scenario::Seq => "seq",
            Scenario::Uni => "uni",
            Scenario::Sweep => "sweep",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SltConfig {
    pub domain_size: Option<usize>,
    /// Label vectors, one character per input, e.g. ["00", "11"].
    pub predictors: Option<Vec<String>>,
    /// Input points for single-instance measurement.
    pub inputs: Option<Vec<usize>>,
    /// Sequence length for worst-case measures and sweeps.
    pub n: Option<usize>,
    pub trials: Option<usize>,
    pub delta: Option<f64>,
    /// Event distributions as lists of ["x:y", "p/q"] pairs.
    pub distributions: Option<Vec<Vec<(String, String)>>>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SeqConfig {
    pub domain_size: Option<usize>,
    pub predictors: Option<Vec<String>>,
    pub max_theory_size: Option<usize>,
    pub depth: Option<usize>,
    /// Node values in heap order for single-tree measurement.
    pub tree: Option<Vec<usize>>,
    /// Rounds of the exact minimax game.
    pub rounds: Option<usize>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct UniConfig {
    /// Target string for single-instance measurement.
    pub target: Option<String>,
    /// Corpus bound: all strings of length <= this.
    pub corpus_max_len: Option<usize>,
    /// Ambient padded length for ledger and finite-stage computations.
    pub ambient: Option<usize>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub domain_size: Option<usize>,
    pub max_theory_size: Option<usize>,
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub seed: Option<u64>,
    pub slt: Option<SltConfig>,
    pub seq: Option<SeqConfig>,
    pub uni: Option<UniConfig>,
    pub sweep: Option<SweepConfig>,
    #[serde(skip)]
    pub raw: String,
}

/// A configuration problem; rendered with the offending field and exits
/// with the usage code.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut config: ExperimentConfig =
            toml::from_str(text).map_err(|e| ConfigError(format!("config: {e}")))?;
        config.raw = text.to_string();
        Ok(config)
    }

    pub fn require_seed(&self) -> Result<u64, ConfigError> {
        self.seed
            .ok_or_else(|| ConfigError("config: `seed` is required for randomized runs".into()))
    }
}

pub fn parse_rational(text: &str) -> Result<Rational, ConfigError> {
    Rational::from_str(text.trim())
        .map_err(|e| ConfigError(format!("config: bad rational {text:?}: {e}")))
}

pub fn parse_predictors(domain_size: usize, labels: &[String]) -> Result<Theory, ConfigError> {
    let predictors = labels
        .iter()
        .map(|s| {
            s.chars()
                .map(|c| match c {
                    '0' => Ok(0u8),
                    '1' => Ok(1u8),
                    other => Err(ConfigError(format!(
                        "config: predictor {s:?} has invalid character {other:?}"
                    ))),
                })
                .collect::<Result<Vec<u8>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let domain =
        Domain::new(domain_size).map_err(|e| ConfigError(format!("config: domain_size: {e}")))?;
    Theory::new(domain, predictors).map_err(|e| ConfigError(format!("config: predictors: {e}")))
}

pub fn parse_distribution(
    domain_size: usize,
    pairs: &[(String, String)],
) -> Result<EventDistribution, ConfigError> {
    let domain =
        Domain::new(domain_size).map_err(|e| ConfigError(format!("config: domain_size: {e}")))?;
    let mut atoms = Vec::with_capacity(pairs.len());
    for (event, mass) in pairs {
        let (x, y) = event
            .split_once(':')
            .ok_or_else(|| ConfigError(format!("config: event {event:?} must be \"x:y\"")))?;
        let x: usize = x
            .trim()
            .parse()
            .map_err(|e| ConfigError(format!("config: event input {x:?}: {e}")))?;
        let y: u8 = y
            .trim()
            .parse()
            .map_err(|e| ConfigError(format!("config: event label {y:?}: {e}")))?;
        atoms.push(((x, y), parse_rational(mass)?));
    }
    EventDistribution::new(domain, atoms)
        .map_err(|e| ConfigError(format!("config: distributions: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use falsify_core::numerics::rat;

    #[test]
    fn parses_a_full_document() {
        let text = r#"
scenario = "slt"
seed = 7

[slt]
domain_size = 2
predictors = ["00", "11"]
inputs = [0, 1]
n = 2
trials = 500
delta = 0.1
distributions = [[["0:1", "1/2"], ["1:1", "1/2"]]]
"#;
        let config = ExperimentConfig::parse(text).unwrap();
        assert_eq!(config.scenario, Scenario::Slt);
        assert_eq!(config.seed, Some(7));
        let slt = config.slt.unwrap();
        let theory = parse_predictors(2, slt.predictors.as_ref().unwrap()).unwrap();
        assert_eq!(theory.size(), 2);
        let dist = parse_distribution(2, &slt.distributions.unwrap()[0]).unwrap();
        assert_eq!(dist.mass((0, 1)), rat(1, 2));
    }

    #[test]
    fn rejects_unknown_fields_with_the_offender() {
        let err = ExperimentConfig::parse("scenario = \"slt\"\nbogus = 1\n").unwrap_err();
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn rational_round_trip() {
        let r = parse_rational("3/7").unwrap();
        assert_eq!(r, rat(3, 7));
        assert_eq!(parse_rational(&r.to_string()).unwrap(), r);
    }
}
