//! Two-dimensional transmit-power search and the end-to-end solver.
//!
//! Once the UAV location is fixed by the placement closed form and ρ is a
//! closed-form function of the powers, the only free variables left for a
//! given offload choice are `(p_U, p_B)`. They are found by an exhaustive
//! grid scan with optional zoom-in refinement; the offload case with the
//! lower energy wins.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::Scheme;
use crate::compression_opt::{optimal_rho, rho_coefficients, ClampTag};
use crate::error::{Error, Result};
use crate::placement::{optimal_uav_location, PlacementResult};
use crate::system_model::{
    evaluate, is_feasible, Decision, Offload, Position3D, StageMetrics, SystemParams,
    FEASIBILITY_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Log,
    Linear,
}

/// Resolution of the power search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub n_pu: usize,
    pub n_pb: usize,
    pub spacing: Spacing,
    /// Lowest searched power as a fraction of the axis maximum. Stands in
    /// for the open lower bound `p > 0`.
    pub floor_ratio: f64,
    /// Zoom-in rounds, each shrinking the bracket tenfold around the incumbent.
    pub refine_rounds: u32,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n_pu: 200,
            n_pb: 200,
            spacing: Spacing::Log,
            floor_ratio: 1e-4,
            refine_rounds: 2,
        }
    }
}

impl GridSpec {
    /// Square grid with `n` points per axis, other settings default.
    pub fn with_n(n: usize) -> Self {
        GridSpec {
            n_pu: n,
            n_pb: n,
            ..GridSpec::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_pu < 2 || self.n_pb < 2 {
            return Err(Error::invalid(
                "grid",
                "need at least 2 points per power axis",
            ));
        }
        if !(self.floor_ratio > 0.0 && self.floor_ratio < 1.0) {
            return Err(Error::invalid("grid.floor_ratio", "must lie in (0, 1)"));
        }
        Ok(())
    }

    pub(crate) fn uav_axis(&self, p_max: f64) -> PowerAxis {
        PowerAxis::new(p_max * self.floor_ratio, p_max, self.n_pu, self.spacing)
    }

    pub(crate) fn bs_axis(&self, p_max: f64) -> PowerAxis {
        PowerAxis::new(p_max * self.floor_ratio, p_max, self.n_pb, self.spacing)
    }
}

/// One search axis: `n` points between `lo` and `hi` inclusive, inside the
/// admissible range `[floor, cap]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PowerAxis {
    lo: f64,
    hi: f64,
    n: usize,
    spacing: Spacing,
    floor: f64,
    cap: f64,
}

impl PowerAxis {
    fn new(floor: f64, cap: f64, n: usize, spacing: Spacing) -> Self {
        PowerAxis {
            lo: floor,
            hi: cap,
            n,
            spacing,
            floor,
            cap,
        }
    }

    fn single(value: f64) -> Self {
        PowerAxis {
            lo: value,
            hi: value,
            n: 1,
            spacing: Spacing::Linear,
            floor: value,
            cap: value,
        }
    }

    fn forward(&self, p: f64) -> f64 {
        match self.spacing {
            Spacing::Log => p.log10(),
            Spacing::Linear => p,
        }
    }

    fn inverse(&self, u: f64) -> f64 {
        match self.spacing {
            Spacing::Log => 10f64.powf(u),
            Spacing::Linear => u,
        }
    }

    pub(crate) fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let (u0, u1) = (self.forward(self.lo), self.forward(self.hi));
        let last = (self.n - 1) as f64;
        (0..self.n)
            .map(|i| match i {
                0 => self.lo,
                _ if i == self.n - 1 => self.hi,
                _ => self.inverse(u0 + (u1 - u0) * i as f64 / last),
            })
            .collect()
    }

    /// Bracket a tenth as wide, centred on `center` and kept inside `[floor, cap]`.
    fn refine(&self, center: f64) -> Self {
        if self.n == 1 {
            return *self;
        }
        let (f, c) = (self.forward(self.floor), self.forward(self.cap));
        let width = (self.forward(self.hi) - self.forward(self.lo)) / 10.0;
        let mid = self.forward(center);
        let (mut u0, mut u1) = (mid - width / 2.0, mid + width / 2.0);
        if u0 < f {
            u0 = f;
            u1 = f + width;
        }
        if u1 > c {
            u1 = c;
            u0 = (c - width).max(f);
        }
        let lo = if u0 <= f {
            self.floor
        } else {
            self.inverse(u0)
        };
        let hi = if u1 >= c { self.cap } else { self.inverse(u1) };
        PowerAxis { lo, hi, ..*self }
    }
}

/// How ρ is chosen at each power pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoPolicy {
    /// Closed-form optimum for the given powers.
    Optimal,
    /// Fixed ratio (e.g. 1 for uncompressed transmission).
    Pinned(f64),
}

/// Which powers are searched.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerPolicy {
    Grid,
    /// Both powers fixed to their maxima.
    Max,
}

/// A feasible grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Candidate {
    pub p_uav: f64,
    pub p_bs: f64,
    pub rho: f64,
    pub energy: f64,
    pub clamp: Option<ClampTag>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GridStats {
    pub evaluated: usize,
    pub feasible: usize,
}

impl std::ops::AddAssign for GridStats {
    fn add_assign(&mut self, rhs: Self) {
        self.evaluated += rhs.evaluated;
        self.feasible += rhs.feasible;
    }
}

/// Best point found for one offload choice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CaseResult {
    pub offload: Offload,
    pub best: Option<Candidate>,
    pub stats: GridStats,
}

impl CaseResult {
    /// Minimum energy, `+inf` when the case is infeasible.
    pub fn value(&self) -> f64 {
        self.best.map_or(f64::INFINITY, |c| c.energy)
    }
}

/// Evaluates one power pair; `Ok(None)` when it cannot meet the constraints.
pub(crate) fn evaluate_point(
    params: &SystemParams,
    loc: &Position3D,
    offload: Offload,
    p_uav: f64,
    p_bs: f64,
    rho_policy: RhoPolicy,
) -> Result<Option<Candidate>> {
    let (rho, clamp) = match rho_policy {
        RhoPolicy::Optimal => {
            let coeffs = rho_coefficients(params, loc, offload, p_uav, p_bs)?;
            let sol = optimal_rho(&coeffs, params.rho_th)?;
            match sol.rho_star {
                Some(r) => (r, sol.clamp),
                None => return Ok(None),
            }
        }
        RhoPolicy::Pinned(r) => (r, None),
    };
    let decision = Decision {
        offload,
        loc: *loc,
        rho,
        p_uav,
        p_bs,
    };
    let metrics = evaluate(params, &decision)?;
    // A pinned ratio must meet the budget outright; only the closed-form
    // root is allowed the rounding tolerance. Otherwise a pinned scheme could
    // undercut the optimum by exploiting the tolerance band.
    let allowance = match rho_policy {
        RhoPolicy::Optimal => FEASIBILITY_TOL,
        RhoPolicy::Pinned(_) => 0.0,
    };
    if !(metrics.slack_t >= -allowance) {
        return Ok(None);
    }
    Ok(Some(Candidate {
        p_uav,
        p_bs,
        rho,
        energy: metrics.e_total,
        clamp,
    }))
}

/// Grid search over the powers for one offload choice at a fixed location.
///
/// Ties go to the lexicographically smallest `(p_U, p_B)` within a round and
/// to the incumbent across rounds, so the result does not depend on how the
/// rows were scheduled.
pub fn search_case(
    params: &SystemParams,
    loc: &Position3D,
    offload: Offload,
    grid: &GridSpec,
    rho_policy: RhoPolicy,
    power_policy: PowerPolicy,
) -> Result<CaseResult> {
    grid.validate()?;
    let (mut axis_u, mut axis_b) = match power_policy {
        PowerPolicy::Max => (
            PowerAxis::single(params.p_uav_max),
            PowerAxis::single(params.p_bs_max),
        ),
        PowerPolicy::Grid => (
            grid.uav_axis(params.p_uav_max),
            match offload {
                // p_B plays no role when nothing is sent to the server.
                Offload::Bs => PowerAxis::single(params.p_bs_max),
                Offload::Server => grid.bs_axis(params.p_bs_max),
            },
        ),
    };
    let rounds = match power_policy {
        PowerPolicy::Max => 0,
        PowerPolicy::Grid => grid.refine_rounds,
    };

    let mut best: Option<Candidate> = None;
    let mut stats = GridStats::default();
    for _ in 0..=rounds {
        let us = axis_u.points();
        let bs = axis_b.points();
        let rows = us
            .par_iter()
            .map(|&pu| {
                bs.iter()
                    .map(|&pb| evaluate_point(params, loc, offload, pu, pb, rho_policy))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;

        let mut round_best: Option<Candidate> = None;
        for cand in rows.into_iter().flatten() {
            stats.evaluated += 1;
            if let Some(c) = cand {
                stats.feasible += 1;
                if round_best.is_none_or(|b| c.energy < b.energy) {
                    round_best = Some(c);
                }
            }
        }
        if let Some(rb) = round_best {
            if best.is_none_or(|b| rb.energy < b.energy) {
                best = Some(rb);
            }
        }
        let Some(b) = best else { break };
        axis_u = axis_u.refine(b.p_uav);
        axis_b = axis_b.refine(b.p_bs);
    }

    Ok(CaseResult {
        offload,
        best,
        stats,
    })
}

/// Power search for one offload choice with ρ at its closed-form optimum.
pub fn solve_for_offload(
    params: &SystemParams,
    loc: &Position3D,
    offload: Offload,
    grid: &GridSpec,
) -> Result<CaseResult> {
    search_case(
        params,
        loc,
        offload,
        grid,
        RhoPolicy::Optimal,
        PowerPolicy::Grid,
    )
}

/// Offload to the server only when strictly cheaper.
pub fn offload_decision(v0: f64, v1: f64) -> Result<Offload> {
    let finite = |v: f64| v.is_finite();
    match (finite(v0), finite(v1)) {
        (false, false) => Err(Error::Infeasible(
            "neither offload choice admits a feasible configuration".into(),
        )),
        (true, false) => Ok(Offload::Server),
        (false, true) => Ok(Offload::Bs),
        (true, true) => Ok(if v0 < v1 {
            Offload::Server
        } else {
            Offload::Bs
        }),
    }
}

/// Optimal (or scheme-constrained) configuration with diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution {
    pub scheme: Scheme,
    pub decision: Decision,
    pub metrics: StageMetrics,
    /// Minimum energy with the task offloaded to the server; `+inf` if
    /// infeasible or not considered by the scheme.
    pub v0: f64,
    /// Minimum energy with the command generated at the BS.
    pub v1: f64,
    /// Closed-form placement, absent when the scheme pins the location.
    pub placement: Option<PlacementResult>,
    pub rho_clamp: Option<ClampTag>,
    pub grid_stats: GridStats,
    /// Energy after each block-coordinate iteration (BCD only).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub bcd_trace: Vec<f64>,
}

/// Picks the better of the searched cases and re-validates the winner
/// through the system model.
pub(crate) fn assemble(
    params: &SystemParams,
    scheme: Scheme,
    placement: Option<PlacementResult>,
    loc: Position3D,
    cases: &[CaseResult],
) -> Result<Solution> {
    let value = |o: Offload| {
        cases
            .iter()
            .find(|c| c.offload == o)
            .map_or(f64::INFINITY, CaseResult::value)
    };
    let (v0, v1) = (value(Offload::Server), value(Offload::Bs));
    let offload = offload_decision(v0, v1)?;
    let chosen = cases
        .iter()
        .find(|c| c.offload == offload)
        .and_then(|c| c.best)
        .ok_or_else(|| Error::Internal("winning offload case has no candidate".into()))?;

    let mut grid_stats = GridStats::default();
    for c in cases {
        grid_stats += c.stats;
    }
    finish(
        params,
        scheme,
        placement,
        Decision {
            offload,
            loc,
            rho: chosen.rho,
            p_uav: chosen.p_uav,
            p_bs: chosen.p_bs,
        },
        (v0, v1),
        chosen.clamp,
        grid_stats,
    )
}

pub(crate) fn finish(
    params: &SystemParams,
    scheme: Scheme,
    placement: Option<PlacementResult>,
    decision: Decision,
    (v0, v1): (f64, f64),
    rho_clamp: Option<ClampTag>,
    grid_stats: GridStats,
) -> Result<Solution> {
    let metrics = evaluate(params, &decision)?;
    let report = is_feasible(params, &decision);
    if !report.feasible() {
        return Err(Error::Internal(format!(
            "{scheme} produced an infeasible decision: {report:?}"
        )));
    }
    Ok(Solution {
        scheme,
        decision,
        metrics,
        v0,
        v1,
        placement,
        rho_clamp,
        grid_stats,
        bcd_trace: Vec::new(),
    })
}

/// Full pipeline: closed-form placement, closed-form ρ as a function of the
/// powers, power search for both offload choices, then the offload rule.
pub fn solve(params: &SystemParams, grid: &GridSpec) -> Result<Solution> {
    params.validate()?;
    let placement = optimal_uav_location(params)?;
    let cases = Offload::BOTH
        .iter()
        .map(|&o| solve_for_offload(params, &placement.loc, o, grid))
        .collect::<Result<Vec<_>>>()?;
    assemble(
        params,
        Scheme::Proposed,
        Some(placement),
        placement.loc,
        &cases,
    )
}

/// Brute-force reference: scans `n` log-spaced values of each of p_U, p_B
/// and ρ and keeps the cheapest decision that passes every constraint.
/// Uses only the system model, not the closed-form ρ.
pub fn exhaustive_scan(
    params: &SystemParams,
    loc: &Position3D,
    offload: Offload,
    n: usize,
    floor_ratio: f64,
) -> Result<Option<(f64, Decision)>> {
    if n < 2 {
        return Err(Error::invalid("n", "need at least 2 points per axis"));
    }
    let logspace = |lo: f64, hi: f64| -> Vec<f64> {
        let (a, b) = (lo.ln(), hi.ln());
        (0..n)
            .map(|i| match i {
                0 => lo,
                _ if i == n - 1 => hi,
                _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
            })
            .collect()
    };
    let pus = logspace(params.p_uav_max * floor_ratio, params.p_uav_max);
    let pbs = logspace(params.p_bs_max * floor_ratio, params.p_bs_max);
    let rhos = logspace(params.rho_th, 1.0);

    let per_pu = pus
        .par_iter()
        .map(|&p_uav| {
            let mut best: Option<(f64, Decision)> = None;
            for &p_bs in &pbs {
                for &rho in &rhos {
                    let d = Decision {
                        offload,
                        loc: *loc,
                        rho,
                        p_uav,
                        p_bs,
                    };
                    if !is_feasible(params, &d).feasible() {
                        continue;
                    }
                    let e = evaluate(params, &d)?.e_total;
                    if best.is_none_or(|(b, _)| e < b) {
                        best = Some((e, d));
                    }
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_pu
        .into_iter()
        .flatten()
        .fold(None, |acc: Option<(f64, Decision)>, c| match acc {
            Some(b) if b.0 <= c.0 => Some(b),
            _ => Some(c),
        }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_grid() -> GridSpec {
        GridSpec {
            n_pu: 40,
            n_pb: 40,
            ..GridSpec::default()
        }
    }

    #[test]
    fn pinned_ratio_gets_no_tolerance() {
        let mut p = SystemParams::default();
        let loc = optimal_uav_location(&p).unwrap().loc;
        let d = Decision {
            offload: Offload::Server,
            loc,
            rho: 1.0,
            p_uav: p.p_uav_max,
            p_bs: p.p_bs_max,
        };
        p.t_th = evaluate(&p, &d).unwrap().t_total - 5e-10;
        assert!(is_feasible(&p, &d).feasible());
        let pinned = evaluate_point(&p, &loc, d.offload, d.p_uav, d.p_bs, RhoPolicy::Pinned(1.0));
        assert_eq!(pinned.unwrap(), None);
        let optimal = evaluate_point(&p, &loc, d.offload, d.p_uav, d.p_bs, RhoPolicy::Optimal);
        assert!(optimal.unwrap().is_some());
    }

    #[test]
    fn axis_endpoints_are_exact() {
        let axis = GridSpec::default().uav_axis(1.0);
        let pts = axis.points();
        assert_eq!(pts.len(), 200);
        assert_eq!(pts[0], 1e-4);
        assert_eq!(*pts.last().unwrap(), 1.0);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));

        let r = axis.refine(1.0);
        assert_eq!(r.hi, 1.0);
        assert!((r.lo.log10() - (-0.4)).abs() < 1e-12);
        let r = axis.refine(1e-4);
        assert_eq!(r.lo, 1e-4);
        let r = axis.refine(1e-2).refine(1e-2);
        assert!((r.hi.log10() - r.lo.log10() - 0.04).abs() < 1e-12);

        let lin = PowerAxis::new(0.1, 1.0, 10, Spacing::Linear);
        let pts = lin.points();
        assert!((pts[1] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::with_n(1).validate().is_err());
        let g = GridSpec {
            floor_ratio: 0.0,
            ..GridSpec::default()
        };
        assert!(g.validate().is_err());
    }

    #[test]
    fn offload_rule() {
        assert_eq!(offload_decision(1.0, 2.0).unwrap(), Offload::Server);
        assert_eq!(offload_decision(2.0, 2.0).unwrap(), Offload::Bs);
        assert_eq!(offload_decision(f64::INFINITY, 5.0).unwrap(), Offload::Bs);
        assert_eq!(
            offload_decision(5.0, f64::INFINITY).unwrap(),
            Offload::Server
        );
        assert!(offload_decision(f64::INFINITY, f64::INFINITY)
            .unwrap_err()
            .is_infeasible());
    }

    #[test]
    fn bs_case_ignores_the_bs_power_axis() {
        let p = SystemParams::default();
        let loc = optimal_uav_location(&p).unwrap().loc;
        let a = solve_for_offload(&p, &loc, Offload::Bs, &small_grid()).unwrap();
        let g = GridSpec {
            n_pb: 7,
            ..small_grid()
        };
        let b = solve_for_offload(&p, &loc, Offload::Bs, &g).unwrap();
        assert_eq!(a.value(), b.value());
    }

    #[test]
    fn larger_power_cap_never_hurts() {
        let p = SystemParams::default();
        let loc = optimal_uav_location(&p).unwrap().loc;
        let base = solve_for_offload(&p, &loc, Offload::Server, &small_grid()).unwrap();
        let bigger = SystemParams {
            p_uav_max: 2.0 * p.p_uav_max,
            ..p
        };
        // same floor in watts; the grids differ, so allow for their resolution
        let g = GridSpec {
            floor_ratio: 0.5e-4,
            ..small_grid()
        };
        let grown = solve_for_offload(&bigger, &loc, Offload::Server, &g).unwrap();
        assert!(grown.value() <= base.value() * (1.0 + 1e-3));
    }

    #[test]
    fn refinement_matches_dense_grid() {
        let p = SystemParams::default();
        let loc = optimal_uav_location(&p).unwrap().loc;
        let dense = GridSpec {
            n_pu: 500,
            n_pb: 500,
            refine_rounds: 0,
            ..GridSpec::default()
        };
        let coarse = GridSpec {
            n_pu: 50,
            n_pb: 50,
            refine_rounds: 3,
            ..GridSpec::default()
        };
        for o in Offload::BOTH {
            let d = solve_for_offload(&p, &loc, o, &dense).unwrap().value();
            let c = solve_for_offload(&p, &loc, o, &coarse).unwrap().value();
            assert!((d - c).abs() <= 5e-3 * d, "{o:?}: dense {d} vs refined {c}");
        }
    }

    #[test]
    fn solve_returns_feasible_minimum_of_both_cases() {
        let p = SystemParams::default();
        let s = solve(&p, &small_grid()).unwrap();
        assert!(is_feasible(&p, &s.decision).feasible());
        assert_eq!(s.metrics.e_total, s.v0.min(s.v1));
        assert!(s.metrics.slack_t >= -1e-9);
        assert_eq!(s.scheme, Scheme::Proposed);
        assert!(s.grid_stats.feasible > 0);
        for (v, o) in [(s.v0, Offload::Server), (s.v1, Offload::Bs)] {
            if v.is_finite() {
                let case = solve_for_offload(&p, &s.decision.loc, o, &small_grid()).unwrap();
                let c = case.best.unwrap();
                let d = Decision {
                    offload: o,
                    loc: s.decision.loc,
                    rho: c.rho,
                    p_uav: c.p_uav,
                    p_bs: c.p_bs,
                };
                assert!(is_feasible(&p, &d).feasible());
                assert_eq!(evaluate(&p, &d).unwrap().e_total, v);
            }
        }
    }

    #[test]
    fn solve_is_deterministic_across_thread_counts() {
        let p = SystemParams::default();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| solve(&p, &small_grid()).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn tighter_budget_never_lowers_energy() {
        let mut prev = 0.0;
        for t_th in [1.2, 1.0, 0.8, 0.6, 0.5, 0.4] {
            let p = SystemParams {
                t_th,
                ..SystemParams::default()
            };
            let e = solve(&p, &small_grid()).unwrap().metrics.e_total;
            assert!(e >= prev, "T_th {t_th}: {e} < {prev}");
            prev = e;
        }
    }

    #[test]
    fn infeasible_scenarios_are_reported() {
        let p = SystemParams {
            t_th: 0.01,
            ..SystemParams::default()
        };
        assert!(solve(&p, &small_grid()).unwrap_err().is_infeasible());
        let p = SystemParams {
            h_min: 350.0,
            ..SystemParams::default()
        };
        assert!(solve(&p, &small_grid()).is_err());
    }

    #[test]
    fn beats_exhaustive_scan() {
        let p = SystemParams::default();
        let s = solve(&p, &GridSpec::default()).unwrap();
        let loc = s.decision.loc;
        for o in Offload::BOTH {
            let scan = exhaustive_scan(&p, &loc, o, 40, 1e-4).unwrap();
            let v = if o == Offload::Server { s.v0 } else { s.v1 };
            if let Some((e, _)) = scan {
                assert!(v <= e * 1.01, "{o:?}: {v} vs scan {e}");
            }
        }
    }
}
