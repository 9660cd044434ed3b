//! Flat `key = value` configuration. Blank lines and `#` comments are
//! ignored; unknown keys are errors.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use springjoint::pattern::SvgStyle;

#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    /// Flat-foldability tolerance used by `generate` and `validate`.
    pub tolerance: f64,
    /// Curve samples written by `kinematics`.
    pub samples: usize,
    /// Maximum oracle error accepted by `oracle`.
    pub oracle_threshold: f64,
    pub design_tolerance: f64,
    pub design_max_iterations: usize,
    pub out_dir: Option<PathBuf>,
    pub svg: SvgStyle,
}

impl Default for CliConfig {
    fn default() -> Self {
        CliConfig {
            tolerance: 1e-9,
            samples: 181,
            oracle_threshold: 1e-9,
            design_tolerance: springjoint::design::DEFAULT_TOLERANCE,
            design_max_iterations: springjoint::design::DEFAULT_MAX_ITERATIONS,
            out_dir: None,
            svg: SvgStyle::default(),
        }
    }
}

fn positive(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value.parse().with_context(|| format!("{key}: {value:?} is not a number"))?;
    if !(v.is_finite() && v > 0.0) {
        bail!("{key} must be positive, got {value}");
    }
    Ok(v)
}

fn non_negative(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value.parse().with_context(|| format!("{key}: {value:?} is not a number"))?;
    if !(v.is_finite() && v >= 0.0) {
        bail!("{key} must be non-negative, got {value}");
    }
    Ok(v)
}

fn count(key: &str, value: &str, min: usize) -> Result<usize> {
    let v: usize = value.parse().with_context(|| format!("{key}: {value:?} is not a count"))?;
    if v < min {
        bail!("{key} must be at least {min}, got {v}");
    }
    Ok(v)
}

impl CliConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = CliConfig::default();
        for (number, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("line {}: expected key = value", number + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let context = || format!("line {}", number + 1);
            match key {
                "tolerance" => config.tolerance = positive(key, value).with_context(context)?,
                "samples" => config.samples = count(key, value, 2).with_context(context)?,
                "oracle_threshold" => config.oracle_threshold = positive(key, value).with_context(context)?,
                "design.tolerance" => config.design_tolerance = positive(key, value).with_context(context)?,
                "design.max_iterations" => config.design_max_iterations = count(key, value, 1).with_context(context)?,
                "out_dir" => config.out_dir = Some(PathBuf::from(value)),
                "svg.mountain_width" => config.svg.mountain_width = positive(key, value).with_context(context)?,
                "svg.valley_width" => config.svg.valley_width = positive(key, value).with_context(context)?,
                "svg.border_width" => config.svg.border_width = positive(key, value).with_context(context)?,
                "svg.flat_width" => config.svg.flat_width = positive(key, value).with_context(context)?,
                "svg.valley_dash" => config.svg.valley_dash = value.to_string(),
                "svg.margin" => config.svg.margin = non_negative(key, value).with_context(context)?,
                other => bail!("line {}: unknown key {other:?}", number + 1),
            }
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_known_keys() {
        let c = CliConfig::parse("# run settings\ntolerance = 1e-8\nsamples=50\nsvg.valley_dash = 0.1 0.05\nout_dir = runs\n").unwrap();
        assert_eq!(c.tolerance, 1e-8);
        assert_eq!(c.samples, 50);
        assert_eq!(c.svg.valley_dash, "0.1 0.05");
        assert_eq!(c.out_dir, Some(PathBuf::from("runs")));
    }

    #[test]
    fn rejects_bad_values() {
        assert!(CliConfig::parse("tolerance = -1").is_err());
        assert!(CliConfig::parse("samples = 1").is_err());
        assert!(CliConfig::parse("colour = red").is_err());
        assert!(CliConfig::parse("tolerance").is_err());
    }
}
