//! One-dimensional parameter sweeps across schemes.

use rayon::prelude::*;
use serde::Serialize;

use super::config::ScenarioConfig;
use crate::baselines::{run_scheme_with, Scheme};
use crate::error::{Error, Result};
use crate::power_search::Solution;
use crate::system_model::PARAM_NAMES;

/// Axis name (any entry of `PARAM_NAMES`), its values in SI units, and the
/// schemes to run at each value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub axis: String,
    pub values: Vec<f64>,
    pub schemes: Vec<Scheme>,
}

/// `n` evenly spaced points from `lo` to `hi`, both ends exact.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + i as f64 * step })
                .collect()
        }
    }
}

impl SweepSpec {
    /// Standard range for the three headline axes.
    pub fn default_for(axis: &str, schemes: Vec<Scheme>) -> Result<SweepSpec> {
        let values = match axis {
            "B_B" => linspace(0.1e6, 2e6, 11),
            "D" => linspace(0.2e6, 2e6, 10),
            "T_th" => linspace(0.3, 1.2, 10),
            other => {
                return Err(Error::invalid(
                    "axis",
                    format!("no default range for `{other}`; pass explicit values"),
                ))
            }
        };
        let spec = SweepSpec {
            axis: axis.to_string(),
            values,
            schemes,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !PARAM_NAMES.contains(&self.axis.as_str()) {
            return Err(Error::invalid(
                "axis",
                format!("unknown parameter `{}`", self.axis),
            ));
        }
        if self.values.is_empty() {
            return Err(Error::invalid("values", "sweep needs at least one value"));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("values", "sweep values must be finite"));
        }
        if self.values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid(
                "values",
                "sweep values must be strictly increasing",
            ));
        }
        if self.schemes.is_empty() {
            return Err(Error::invalid("schemes", "sweep needs at least one scheme"));
        }
        Ok(())
    }
}

/// Outcome of one scheme at one sweep point. Exactly one of `solution` and
/// `error` is set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRecord {
    pub axis: String,
    pub value: f64,
    pub scheme: Scheme,
    pub solution: Option<Solution>,
    pub error: Option<String>,
}

impl ResultRecord {
    pub fn feasible(&self) -> bool {
        self.solution.is_some()
    }

    /// Total energy, `+inf` when the point has no solution.
    pub fn e_total(&self) -> f64 {
        self.solution
            .as_ref()
            .map_or(f64::INFINITY, |s| s.metrics.e_total)
    }
}

/// Runs every (value, scheme) pair on the current rayon pool. Records come
/// back ordered by value, then by the order of `sweep.schemes`.
pub fn run_sweep(config: &ScenarioConfig, sweep: &SweepSpec) -> Result<Vec<ResultRecord>> {
    sweep.validate()?;
    let base = config.params.to_system();
    let jobs: Vec<(f64, Scheme)> = sweep
        .values
        .iter()
        .flat_map(|&v| sweep.schemes.iter().map(move |&s| (v, s)))
        .collect();

    let records = jobs
        .par_iter()
        .map(|&(value, scheme)| {
            let mut params = base;
            let outcome = params
                .set(&sweep.axis, value)
                .and_then(|()| run_scheme_with(&params, scheme, &config.grid, &config.bcd));
            let (solution, error) = match outcome {
                Ok(s) => (Some(s), None),
                Err(e) => (None, Some(e.to_string())),
            };
            ResultRecord {
                axis: sweep.axis.clone(),
                value,
                scheme,
                solution,
                error,
            }
        })
        .collect();
    Ok(records)
}

/// `run_sweep` on a dedicated pool with `threads` workers.
pub fn run_sweep_with_threads(
    config: &ScenarioConfig,
    sweep: &SweepSpec,
    threads: usize,
) -> Result<Vec<ResultRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    pool.install(|| run_sweep(config, sweep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::power_search::GridSpec;

    fn small_config() -> ScenarioConfig {
        ScenarioConfig {
            grid: GridSpec {
                refine_rounds: 1,
                ..GridSpec::with_n(30)
            },
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(0.3, 1.2, 10);
        assert_eq!(v.len(), 10);
        assert_eq!(v[0], 0.3);
        assert_eq!(v[9], 1.2);
        assert!((v[1] - 0.4).abs() < 1e-15);
        assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
        assert!(linspace(1.0, 2.0, 0).is_empty());
    }

    #[test]
    fn default_ranges() {
        let all = Scheme::ALL.to_vec();
        assert_eq!(
            SweepSpec::default_for("B_B", all.clone())
                .unwrap()
                .values
                .len(),
            11
        );
        assert_eq!(
            SweepSpec::default_for("D", all.clone()).unwrap().values[9],
            2e6
        );
        assert_eq!(
            SweepSpec::default_for("T_th", all.clone()).unwrap().values[0],
            0.3
        );
        assert!(SweepSpec::default_for("alpha", all).is_err());
    }

    #[test]
    fn rejects_bad_specs() {
        let mk = |axis: &str, values: Vec<f64>, schemes: Vec<Scheme>| SweepSpec {
            axis: axis.into(),
            values,
            schemes,
        };
        assert!(mk("B_B", vec![], vec![Scheme::Proposed])
            .validate()
            .is_err());
        assert!(mk("B_B", vec![2.0, 1.0], vec![Scheme::Proposed])
            .validate()
            .is_err());
        assert!(mk("B_B", vec![1.0, 1.0], vec![Scheme::Proposed])
            .validate()
            .is_err());
        assert!(mk("B_B", vec![1.0], vec![]).validate().is_err());
        assert!(mk("bandwidth", vec![1.0], vec![Scheme::Proposed])
            .validate()
            .is_err());
        assert!(mk("alpha", vec![2.0, 2.5], vec![Scheme::Proposed])
            .validate()
            .is_ok());
    }

    #[test]
    fn records_are_ordered_and_complete() {
        let sweep = SweepSpec {
            axis: "T_th".into(),
            values: vec![0.3, 0.7],
            schemes: vec![Scheme::NonSemantic, Scheme::Proposed],
        };
        let recs = run_sweep(&small_config(), &sweep).unwrap();
        let keys: Vec<(f64, Scheme)> = recs.iter().map(|r| (r.value, r.scheme)).collect();
        assert_eq!(
            keys,
            vec![
                (0.3, Scheme::NonSemantic),
                (0.3, Scheme::Proposed),
                (0.7, Scheme::NonSemantic),
                (0.7, Scheme::Proposed)
            ]
        );
        // uncompressed transfer cannot meet 300 ms
        assert!(!recs[0].feasible());
        assert!(recs[0].error.is_some());
        assert_eq!(recs[0].e_total(), f64::INFINITY);
        assert!(recs[1].feasible() && recs[3].feasible());
        assert_eq!(recs[3].solution.as_ref().unwrap().decision.loc.h, 40.0);
    }

    #[test]
    fn invalid_override_becomes_record() {
        let sweep = SweepSpec {
            axis: "q_th".into(),
            values: vec![0.05, 1.5],
            schemes: vec![Scheme::Proposed],
        };
        let recs = run_sweep(&small_config(), &sweep).unwrap();
        assert!(recs[0].feasible());
        assert!(recs[1].error.as_deref().unwrap().contains("q_th"));
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let sweep = SweepSpec {
            axis: "B_B".into(),
            values: vec![0.1e6, 1e6, 2e6],
            schemes: vec![Scheme::Proposed, Scheme::Bcd],
        };
        let one = run_sweep_with_threads(&small_config(), &sweep, 1).unwrap();
        let four = run_sweep_with_threads(&small_config(), &sweep, 4).unwrap();
        assert_eq!(one, four);
    }
}
