//! Self-checks against brute-force references. Each suite draws random
//! cases from a seeded generator and reports how many disagree.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::compression_opt::{latency_roots, optimal_rho, rho_oracle, RhoCoefficients};
use crate::error::Result;
use crate::numerics::{lambert_w0, lambert_wm1, BRANCH_POINT};
use crate::placement::{optimal_uav_location, placement_oracle};
use crate::power_search::{exhaustive_scan, solve, GridSpec};
use crate::system_model::{distance_uav_bs, is_feasible, Offload, SystemParams};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Largest normalised discrepancy seen; below 1 means within tolerance.
    pub worst: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn new(name: &'static str) -> Self {
        SuiteReport {
            name,
            cases: 0,
            failures: 0,
            worst: 0.0,
        }
    }

    /// Records one case whose discrepancy is `ratio` times its tolerance.
    fn record(&mut self, ratio: f64) {
        self.cases += 1;
        if !(ratio <= 1.0) {
            self.failures += 1;
        }
        if ratio.is_nan() || ratio > self.worst {
            self.worst = ratio;
        }
    }
}

/// Case counts per suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyPlan {
    pub lambert: usize,
    pub placement: usize,
    pub rho: usize,
    pub solver: usize,
    /// Points per axis of the brute-force power/ρ scan.
    pub solver_scan_n: usize,
}

impl VerifyPlan {
    pub fn quick() -> Self {
        VerifyPlan {
            lambert: 2_000,
            placement: 20,
            rho: 100,
            solver: 5,
            solver_scan_n: 40,
        }
    }

    pub fn full() -> Self {
        VerifyPlan {
            lambert: 10_000,
            placement: 500,
            rho: 500,
            solver: 100,
            solver_scan_n: 100,
        }
    }
}

fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

/// A random valid scenario around the default operating point.
pub fn random_scenario(rng: &mut impl Rng) -> SystemParams {
    let base = SystemParams::default();
    let h_min = rng.gen_range(20.0..80.0);
    let d_max = h_min + rng.gen_range(20.0..400.0);
    let xi = 0.01;
    SystemParams {
        target_x: rng.gen_range(-500.0..500.0),
        target_y: rng.gen_range(-500.0..500.0),
        xi,
        q_th: (-xi * d_max).exp(),
        data_bits: log_uniform(rng, 2e5, 2e6),
        rho_th: rng.gen_range(0.02..0.3),
        h_min,
        h_max: h_min + 300.0,
        bw_bs: log_uniform(rng, 1e5, 2e6),
        t_th: rng.gen_range(0.4..1.5),
        ..base
    }
}

pub fn random_rho_bundle(rng: &mut impl Rng) -> (RhoCoefficients, f64) {
    let tx_time = log_uniform(rng, 1e-2, 2.0);
    let p = log_uniform(rng, 1e-3, 1.0);
    let compute_time = -log_uniform(rng, 1e-3, 0.5);
    let rho_th = rng.gen_range(0.01..0.5);
    let mut coeffs = RhoCoefficients {
        tx_energy: p * tx_time,
        compute_energy: log_uniform(rng, 1e-4, 1.0) * p * tx_time,
        tx_time,
        compute_time,
        budget: 0.0,
    };
    // budgets spanning infeasible, latency-binding and slack regimes
    let floor = coeffs.latency(-compute_time / tx_time);
    let top = coeffs.latency(rho_th).max(coeffs.latency(1.0));
    coeffs.budget = floor + rng.gen_range(-0.2..1.2) * (top - floor);
    (coeffs, rho_th)
}

pub fn lambert_suite(n: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("lambert_w");
    for i in 0..n {
        let x = match i % 3 {
            0 => rng.gen_range(BRANCH_POINT..0.0),
            1 => log_uniform(&mut rng, 1e-300, 1e300),
            _ => BRANCH_POINT + log_uniform(&mut rng, 1e-16, 0.3),
        };
        let tol = 1e-12 * x.abs().max(1.0);
        let w0 = lambert_w0(x)?;
        let mut ratio = (w0 * w0.exp() - x).abs() / tol;
        if x < 0.0 {
            let wm1 = lambert_wm1(x)?;
            ratio = ratio.max((wm1 * wm1.exp() - x).abs() / tol);
            if !(wm1 <= -1.0 && -1.0 <= w0) {
                ratio = f64::INFINITY;
            }
        }
        rep.record(ratio);
    }
    Ok(rep)
}

pub fn placement_suite(n: usize, seed: u64, step: f64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("placement");
    let bound = step * 3f64.sqrt();
    for _ in 0..n {
        let p = random_scenario(&mut rng);
        let closed = optimal_uav_location(&p)?;
        let grid = placement_oracle(&p, step)?;
        let gap = distance_uav_bs(&grid) - closed.d_ub;
        // the grid may only trail the closed form, and by at most one cell
        let ratio = if gap < -1e-9 {
            f64::INFINITY
        } else {
            gap / bound
        };
        rep.record(ratio);
    }
    Ok(rep)
}

pub fn rho_suite(n: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("compression_ratio");
    for _ in 0..n {
        let (c, rho_th) = random_rho_bundle(&mut rng);
        let closed = optimal_rho(&c, rho_th)?;
        let scan = rho_oracle(&c, rho_th, 100_000)?;
        let mut ratio: f64 = match (closed.rho_star, scan.rho_star) {
            (Some(a), Some(b)) => {
                let not_beaten =
                    c.objective(b) >= c.objective(a) - 1e-9 * c.objective(a).abs().max(1e-12);
                if not_beaten {
                    (a - b).abs() / 1e-4
                } else {
                    f64::INFINITY
                }
            }
            (None, None) => 0.0,
            // the scan grid can miss a sliver of a tiny feasible interval
            (Some(a), None) => match latency_roots(&c)? {
                Some((lo, hi)) if hi - lo < 1e-4 => (a - lo.max(rho_th)).abs() / 1e-4,
                _ => f64::INFINITY,
            },
            (None, Some(_)) => f64::INFINITY,
        };
        if let Some((ra, rb)) = latency_roots(&c)? {
            for r in [ra, rb] {
                let resid = (c.latency(r) - c.budget).abs()
                    / (c.tx_time * r)
                        .abs()
                        .max((c.compute_time * r.ln()).abs())
                        .max(c.budget.abs());
                ratio = ratio.max(resid / 1e-9);
            }
        }
        rep.record(ratio);
    }
    Ok(rep)
}

pub fn solver_suite(n: usize, seed: u64, scan_n: usize, grid: &GridSpec) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("power_search");
    for _ in 0..n {
        let p = random_scenario(&mut rng);
        let loc = optimal_uav_location(&p)?.loc;
        let mut reference = f64::INFINITY;
        for o in Offload::BOTH {
            if let Some((e, _)) = exhaustive_scan(&p, &loc, o, scan_n, grid.floor_ratio)? {
                reference = reference.min(e);
            }
        }
        let ratio = match solve(&p, grid) {
            Ok(s) if !is_feasible(&p, &s.decision).feasible() => f64::INFINITY,
            Ok(s) if reference.is_finite() => {
                ((s.metrics.e_total - reference) / reference).max(0.0) / 0.01
            }
            Ok(_) => 0.0,
            Err(e) if e.is_infeasible() && reference.is_infinite() => 0.0,
            Err(e) if e.is_infeasible() => f64::INFINITY,
            Err(e) => return Err(e),
        };
        rep.record(ratio);
    }
    Ok(rep)
}

pub fn run_all(plan: &VerifyPlan, seed: u64, grid: &GridSpec) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        lambert_suite(plan.lambert, seed)?,
        placement_suite(plan.placement, seed, 5.0)?,
        rho_suite(plan.rho, seed)?,
        solver_suite(plan.solver, seed, plan.solver_scan_n, grid)?,
    ])
}
