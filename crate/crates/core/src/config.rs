//! Flat `key = value` run configuration.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fibers::Thresholds;
use crate::forge::{Domain, Family, FamilySpec};
use crate::trim::TrimParams;

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub family: FamilySpec,
    pub trim_enabled: bool,
    pub trim: TrimParams,
    pub direction_samples: usize,
    pub k_list: Vec<usize>,
    pub epsilon: Option<f64>,
    pub jitter_amplitude: f64,
    pub jitter_tol: f64,
    pub jitter_attempts: usize,
    pub boundary_tol: f64,
    pub ramification_degree: f64,
    pub sliver_fraction: f64,
    pub h: Option<f64>,
    pub calibration: Option<PathBuf>,
    pub h_default: f64,
    pub h_floor: f64,
    pub calibration_resolution: f64,
    pub transverse_samples: usize,
    pub threads: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let th = Thresholds::default();
        RunConfig {
            family: FamilySpec::default(),
            trim_enabled: false,
            trim: TrimParams::default(),
            direction_samples: 16,
            k_list: vec![4, 8, 16],
            epsilon: None,
            jitter_amplitude: 0.01,
            jitter_tol: 1e-9,
            jitter_attempts: 64,
            boundary_tol: th.boundary_tol,
            ramification_degree: th.ramification_degree,
            sliver_fraction: th.sliver_fraction,
            h: None,
            calibration: None,
            h_default: 1.0,
            h_floor: 1e-6,
            calibration_resolution: 0.04,
            transverse_samples: 64,
            threads: 0,
            seed: 0,
            output_dir: PathBuf::from("out"),
        }
    }
}

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("bad value for `{key}`: `{v}`")))
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

fn parse_complex(key: &str, v: &str) -> Result<Complex64> {
    Complex64::from_str(&v.replace(' ', ""))
        .map_err(|_| Error::Config(format!("bad complex value for `{key}`: `{v}`")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("bad boolean for `{key}`: `{v}`"))),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse_str(&text)
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        let mut domain = None;
        let mut rect = [-1.0, 1.0, -1.0, 1.0];
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", n + 1)))?;
            let (key, v) = (key.trim(), v.trim());
            let f = &mut c.family;
            match key {
                "family" => f.family = parse::<Family>(key, v)?,
                "domain" => domain = Some(v.to_string()),
                "rect" => {
                    let r: Vec<f64> = parse_list(key, v)?;
                    rect = r
                        .try_into()
                        .map_err(|_| Error::Config("`rect` needs four numbers x0, x1, y0, y1".into()))?;
                }
                "resolution" => f.resolution = parse(key, v)?,
                "margin" => f.margin = parse(key, v)?,
                "sheets" => f.sheets = parse(key, v)?,
                "sheet_values" => {
                    f.sheet_values = v.split(',').map(|s| parse_complex(key, s.trim())).collect::<Result<_>>()?
                }
                "degree" => f.degree = parse(key, v)?,
                "branch" => f.branch = parse_complex(key, v)?,
                "coefficients" => {
                    f.coefficients = v.split(',').map(|s| parse_complex(key, s.trim())).collect::<Result<_>>()?
                }
                "tubes" => f.tubes = parse(key, v)?,
                "tube_height" => f.tube_height = parse(key, v)?,
                "path" => f.path = Some(PathBuf::from(v)),
                "trim" => c.trim_enabled = parse_bool(key, v)?,
                "rho" => c.trim.rho = parse(key, v)?,
                "rho_prime" => c.trim.rho_prime_candidates = parse_list(key, v)?,
                "budget" => c.trim.budget = parse(key, v)?,
                "direction_samples" => c.direction_samples = parse(key, v)?,
                "k" => c.k_list = parse_list(key, v)?,
                "epsilon" => c.epsilon = Some(parse(key, v)?),
                "jitter_amplitude" => c.jitter_amplitude = parse(key, v)?,
                "jitter_tol" => c.jitter_tol = parse(key, v)?,
                "jitter_attempts" => c.jitter_attempts = parse(key, v)?,
                "boundary_tol" => c.boundary_tol = parse(key, v)?,
                "ramification_degree" => c.ramification_degree = parse(key, v)?,
                "sliver_fraction" => c.sliver_fraction = parse(key, v)?,
                "h" => c.h = Some(parse(key, v)?),
                "calibration" => c.calibration = Some(PathBuf::from(v)),
                "h_default" => c.h_default = parse(key, v)?,
                "h_floor" => c.h_floor = parse(key, v)?,
                "calibration_resolution" => c.calibration_resolution = parse(key, v)?,
                "transverse_samples" => c.transverse_samples = parse(key, v)?,
                "threads" => c.threads = parse(key, v)?,
                "seed" => c.seed = parse(key, v)?,
                "output_dir" => c.output_dir = PathBuf::from(v),
                _ => return Err(Error::Config(format!("line {}: unknown key `{key}`", n + 1))),
            }
        }
        c.family.domain = match domain.as_deref() {
            None | Some("square") => Domain::Square,
            Some("ball") => Domain::Ball,
            Some("rect") => Domain::Rect {
                x0: rect[0],
                x1: rect[1],
                y0: rect[2],
                y1: rect[3],
            },
            Some(d) => return Err(Error::Config(format!("unknown domain `{d}`"))),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_list.is_empty() {
            return Err(Error::Config("`k` must list at least one value".into()));
        }
        if self.k_list[0] == 0 || self.k_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("`k` must be positive and strictly increasing".into()));
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::Config(format!("epsilon = {e} is not in (0, 1)")));
            }
        }
        if self.direction_samples == 0 {
            return Err(Error::Config("direction_samples must be at least 1".into()));
        }
        if !(self.jitter_amplitude >= 0.0 && self.jitter_tol >= 0.0 && self.boundary_tol > 0.0) {
            return Err(Error::Config("tolerances must be nonnegative".into()));
        }
        if matches!(self.h, Some(h) if !(h > 0.0)) || !(self.h_default > 0.0) {
            return Err(Error::Config("h must be positive".into()));
        }
        self.family.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.trim_enabled {
            self.trim.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }

    /// True when each `k` is twice the previous one.
    pub fn is_doubling(&self) -> bool {
        self.k_list.windows(2).all(|w| w[1] == 2 * w[0])
    }

    pub fn thresholds(&self) -> Thresholds {
        Thresholds {
            boundary_tol: self.boundary_tol,
            ramification_degree: self.ramification_degree,
            sliver_fraction: self.sliver_fraction,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_config() {
        let text = "\
# comment
family = branched_cover   # trailing comment
degree = 3
branch = -0.31+0.22i
domain = ball
k = 4, 8, 16
epsilon = 0.3
trim = true
rho_prime = 0.8, 0.9
seed = 7
";
        let c = RunConfig::parse_str(text).unwrap();
        assert_eq!(c.family.family, Family::BranchedCover);
        assert_eq!(c.family.degree, 3);
        assert_eq!(c.family.branch, Complex64::new(-0.31, 0.22));
        assert_eq!(c.family.domain, Domain::Ball);
        assert_eq!(c.k_list, vec![4, 8, 16]);
        assert_eq!(c.epsilon, Some(0.3));
        assert!(c.trim_enabled);
        assert_eq!(c.trim.rho_prime_candidates, vec![0.8, 0.9]);
        assert_eq!(c.seed, 7);
        assert!(c.is_doubling());
    }

    #[test]
    fn rejects_malformed_configs() {
        for bad in [
            "family = klein_bottle",
            "k = 8, 4",
            "k =",
            "no equals sign",
            "unknown_key = 1",
            "resolution = fast",
            "epsilon = 1.5",
            "trim = maybe",
            "branch = 1+",
        ] {
            assert!(matches!(RunConfig::parse_str(bad), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn empty_config_is_the_default() {
        let c = RunConfig::parse_str("").unwrap();
        assert_eq!(c.k_list, vec![4, 8, 16]);
        assert!(!c.trim_enabled);
    }
}
