//! Parameter grids over config keys, evaluated on a worker pool and emitted
//! in lexicographic grid order.

use rayon::prelude::*;

use crate::config::{parse_number, ConfigError, ScenarioConfig};
use crate::report::{round12, ScenarioReport};
use crate::scenario::{run, RunError};

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub key: String,
    pub values: Vec<f64>,
}

impl Axis {
    /// `key=lo:hi:step`, inclusive of `hi` up to rounding, or `key=v` for a
    /// single value.
    pub fn parse(spec: &str) -> Result<Self, ConfigError> {
        let bad = |m: String| ConfigError::Other(format!("grid `{spec}`: {m}"));
        let (key, range) = spec
            .split_once('=')
            .ok_or_else(|| bad("expected axis=lo:hi:step".into()))?;
        let key = key.trim().to_string();
        let parts: Vec<&str> = range.split(':').collect();
        let values = match parts.as_slice() {
            [v] => vec![parse_number(v).map_err(bad)?],
            [lo, hi, step] => {
                let lo = parse_number(lo).map_err(bad)?;
                let hi = parse_number(hi).map_err(bad)?;
                let step = parse_number(step).map_err(bad)?;
                if !(step > 0.0) {
                    return Err(bad(format!("step must be positive, got {step}")));
                }
                if hi < lo {
                    return Err(bad("empty range (hi < lo)".into()));
                }
                let n = ((hi - lo) / step + 1e-9).floor() as usize;
                (0..=n).map(|k| round12(lo + k as f64 * step)).collect()
            }
            _ => return Err(bad("expected axis=lo:hi:step".into())),
        };
        Ok(Self { key, values })
    }
}

/// Every grid point in lexicographic order (first axis slowest).
pub fn grid_points(axes: &[Axis]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(*v);
                    p
                })
            })
            .collect()
    })
}

/// Runs `base` at each grid point. `jobs = 0` uses rayon's default width.
pub fn sweep(
    base: &ScenarioConfig,
    axes: &[Axis],
    jobs: usize,
) -> Result<Vec<ScenarioReport>, RunError> {
    if axes.is_empty() {
        return Err(ConfigError::Other("empty grid: give at least one --grid axis".into()).into());
    }
    let mut configs = Vec::new();
    for point in grid_points(axes) {
        let mut c = base.clone();
        for (axis, v) in axes.iter().zip(&point) {
            c.set(&axis.key, &format!("{v}"), 0).map_err(|e| match e {
                ConfigError::Value { key, message, .. } => {
                    ConfigError::Other(format!("grid axis `{key}`: {message}"))
                }
                ConfigError::UnknownKey { key, .. } => {
                    ConfigError::Other(format!("grid axis `{key}` is not a config key"))
                }
                ConfigError::WrongKind { key, kind, .. } => {
                    ConfigError::Other(format!("grid axis `{key}` does not apply to kind `{kind}`"))
                }
                other => other,
            })?;
        }
        configs.push(c);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| ConfigError::Other(format!("worker pool: {e}")))?;
    pool.install(|| configs.par_iter().map(run).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Kind;

    #[test]
    fn axis_parsing() {
        let a = Axis::parse("conservation.a=0:1:0.1").unwrap();
        assert_eq!(a.values.len(), 11);
        assert_eq!(a.values[3], 0.3);
        assert_eq!(a.values[10], 1.0);
        assert_eq!(Axis::parse("x=pi/4").unwrap().values.len(), 1);
        assert!(Axis::parse("x=1:0:0.1").is_err());
        assert!(Axis::parse("x=0:1:0").is_err());
        assert!(Axis::parse("x").is_err());
    }

    #[test]
    fn lexicographic_order() {
        let axes = [
            Axis {
                key: "a".into(),
                values: vec![0.0, 1.0],
            },
            Axis {
                key: "b".into(),
                values: vec![2.0, 3.0, 4.0],
            },
        ];
        let pts = grid_points(&axes);
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], vec![0.0, 2.0]);
        assert_eq!(pts[1], vec![0.0, 3.0]);
        assert_eq!(pts[3], vec![1.0, 2.0]);
    }

    #[test]
    fn single_point_matches_run() {
        let base = ScenarioConfig::new(Kind::Conservation);
        let axes = [Axis::parse("conservation.b=0.5").unwrap()];
        let out = sweep(&base, &axes, 2).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0], run(&base).unwrap());
    }

    #[test]
    fn rejects_bad_axes() {
        let base = ScenarioConfig::new(Kind::Conservation);
        assert!(sweep(&base, &[], 1).is_err());
        let axes = [Axis::parse("conservation.a=0:2:0.5").unwrap()];
        assert!(matches!(sweep(&base, &axes, 1), Err(RunError::Config(_))));
        let axes = [Axis::parse("nosignal.psi2.theta=0:1:0.5").unwrap()];
        assert!(matches!(sweep(&base, &axes, 1), Err(RunError::Config(_))));
    }
}
