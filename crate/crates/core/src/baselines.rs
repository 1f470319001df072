//! Comparison schemes. Each one fixes a single ingredient of the joint
//! optimisation (offload choice, compression, powers, location) or swaps the
//! global power search for block coordinate descent, and is evaluated
//! through the same system model as the proposed solver.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::compression_opt::{optimal_rho, rho_coefficients};
use crate::error::{Error, Result};
use crate::placement::optimal_uav_location;
use crate::power_search::{
    assemble, evaluate_point, finish, offload_decision, search_case, solve, solve_for_offload,
    GridSpec, GridStats, PowerPolicy, RhoPolicy, Solution,
};
use crate::system_model::{evaluate, Decision, Offload, Position3D, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Proposed,
    GenerateAtServer,
    GenerateAtBs,
    NonSemantic,
    MaxPower,
    FixedUavLocation,
    Bcd,
}

impl Scheme {
    pub const ALL: [Scheme; 7] = [
        Scheme::Proposed,
        Scheme::GenerateAtServer,
        Scheme::GenerateAtBs,
        Scheme::NonSemantic,
        Scheme::MaxPower,
        Scheme::FixedUavLocation,
        Scheme::Bcd,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::GenerateAtServer => "generate_at_server",
            Scheme::GenerateAtBs => "generate_at_bs",
            Scheme::NonSemantic => "non_semantic",
            Scheme::MaxPower => "max_power",
            Scheme::FixedUavLocation => "fixed_uav_location",
            Scheme::Bcd => "bcd",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.tag() == s)
            .ok_or_else(|| Error::invalid("scheme", format!("unknown scheme `{s}`")))
    }
}

/// Stopping rule for block coordinate descent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BcdOptions {
    pub max_iters: usize,
    /// Stop once an iteration improves the energy by less than this fraction.
    pub tol: f64,
}

impl Default for BcdOptions {
    fn default() -> Self {
        BcdOptions {
            max_iters: 50,
            tol: 1e-6,
        }
    }
}

pub fn run_scheme(params: &SystemParams, scheme: Scheme, grid: &GridSpec) -> Result<Solution> {
    run_scheme_with(params, scheme, grid, &BcdOptions::default())
}

pub fn run_scheme_with(
    params: &SystemParams,
    scheme: Scheme,
    grid: &GridSpec,
    bcd: &BcdOptions,
) -> Result<Solution> {
    params.validate()?;
    let placement = optimal_uav_location(params)?;
    // Schemes that pin a variable search the base grid only, so every point
    // they visit is also visited by the proposed search.
    let base_grid = GridSpec {
        refine_rounds: 0,
        ..*grid
    };
    let at_optimum = |offloads: &[Offload], rho: RhoPolicy, power: PowerPolicy| {
        let cases = offloads
            .iter()
            .map(|&o| search_case(params, &placement.loc, o, &base_grid, rho, power))
            .collect::<Result<Vec<_>>>()?;
        assemble(params, scheme, Some(placement), placement.loc, &cases)
    };

    match scheme {
        Scheme::Proposed => solve(params, grid),
        Scheme::GenerateAtServer | Scheme::GenerateAtBs => {
            let offload = if scheme == Scheme::GenerateAtServer {
                Offload::Server
            } else {
                Offload::Bs
            };
            let case = solve_for_offload(params, &placement.loc, offload, grid)?;
            assemble(params, scheme, Some(placement), placement.loc, &[case])
        }
        Scheme::NonSemantic => {
            at_optimum(&Offload::BOTH, RhoPolicy::Pinned(1.0), PowerPolicy::Grid)
        }
        Scheme::MaxPower => at_optimum(&Offload::BOTH, RhoPolicy::Optimal, PowerPolicy::Max),
        Scheme::FixedUavLocation => {
            let loc = Position3D::new(params.target_x, params.target_y, params.h_min);
            let cases = Offload::BOTH
                .iter()
                .map(|&o| {
                    search_case(
                        params,
                        &loc,
                        o,
                        &base_grid,
                        RhoPolicy::Optimal,
                        PowerPolicy::Grid,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            assemble(params, scheme, None, loc, &cases)
        }
        Scheme::Bcd => run_bcd(params, grid, bcd),
    }
}

/// Outcome of BCD for one offload choice.
#[derive(Debug, Clone)]
struct BcdCase {
    decision: Decision,
    trace: Vec<f64>,
    stats: GridStats,
}

/// Block coordinate descent: starting from maximum powers, alternate the
/// closed-form ρ step with one-dimensional power scans (p_U, then p_B) at
/// fixed ρ, for each offload choice.
pub fn run_bcd(params: &SystemParams, grid: &GridSpec, opts: &BcdOptions) -> Result<Solution> {
    if opts.max_iters < 1 || !(opts.tol >= 0.0) {
        return Err(Error::invalid("bcd", "need max_iters >= 1 and tol >= 0"));
    }
    params.validate()?;
    grid.validate()?;
    let placement = optimal_uav_location(params)?;

    let mut cases: Vec<(Offload, Option<BcdCase>)> = Vec::new();
    for offload in Offload::BOTH {
        cases.push((
            offload,
            bcd_case(params, &placement.loc, offload, grid, opts)?,
        ));
    }
    let value = |o: Offload| {
        cases
            .iter()
            .find(|(c, _)| *c == o)
            .and_then(|(_, r)| r.as_ref())
            .map_or(f64::INFINITY, |r| {
                *r.trace.last().expect("trace is never empty")
            })
    };
    let (v0, v1) = (value(Offload::Server), value(Offload::Bs));
    let offload = offload_decision(v0, v1)?;

    let mut stats = GridStats::default();
    for c in cases.iter().filter_map(|(_, c)| c.as_ref()) {
        stats += c.stats;
    }
    let chosen = cases
        .into_iter()
        .find(|(o, _)| *o == offload)
        .and_then(|(_, c)| c)
        .ok_or_else(|| Error::Internal("winning BCD case missing".into()))?;

    let mut sol = finish(
        params,
        Scheme::Bcd,
        Some(placement),
        chosen.decision,
        (v0, v1),
        None,
        stats,
    )?;
    sol.bcd_trace = chosen.trace;
    Ok(sol)
}

fn bcd_case(
    params: &SystemParams,
    loc: &Position3D,
    offload: Offload,
    grid: &GridSpec,
    opts: &BcdOptions,
) -> Result<Option<BcdCase>> {
    let mut stats = GridStats::default();
    let mut d = Decision {
        offload,
        loc: *loc,
        rho: 1.0,
        p_uav: params.p_uav_max,
        p_bs: params.p_bs_max,
    };
    let coeffs = rho_coefficients(params, loc, offload, d.p_uav, d.p_bs)?;
    match optimal_rho(&coeffs, params.rho_th)?.rho_star {
        Some(r) => d.rho = r,
        None => return Ok(None),
    }
    let mut energy = evaluate(params, &d)?.e_total;
    let mut trace = vec![energy];

    let pu_axis = grid.uav_axis(params.p_uav_max).points();
    let pb_axis = grid.bs_axis(params.p_bs_max).points();

    for _ in 0..opts.max_iters {
        let previous = energy;

        // Power block at fixed rho. The current power is on the axis, so the
        // scan can only improve on it.
        if let Some(c) = scan_axis(params, &d, &pu_axis, |d, p| d.p_uav = p, &mut stats)? {
            d.p_uav = c.0;
            energy = c.1;
        }
        if offload == Offload::Server {
            if let Some(c) = scan_axis(params, &d, &pb_axis, |d, p| d.p_bs = p, &mut stats)? {
                d.p_bs = c.0;
                energy = c.1;
            }
        }

        // Rho block at fixed powers.
        let coeffs = rho_coefficients(params, loc, offload, d.p_uav, d.p_bs)?;
        if let Some(r) = optimal_rho(&coeffs, params.rho_th)?.rho_star {
            let trial = Decision { rho: r, ..d };
            let e = evaluate(params, &trial)?.e_total;
            if e <= energy {
                d = trial;
                energy = e;
            }
        }

        trace.push(energy);
        if previous - energy < opts.tol * previous.abs() {
            break;
        }
    }

    Ok(Some(BcdCase {
        decision: d,
        trace,
        stats,
    }))
}

/// Cheapest feasible value along one power axis, other variables fixed.
fn scan_axis(
    params: &SystemParams,
    base: &Decision,
    axis: &[f64],
    set: impl Fn(&mut Decision, f64),
    stats: &mut GridStats,
) -> Result<Option<(f64, f64)>> {
    let mut best: Option<(f64, f64)> = None;
    for &p in axis {
        let mut d = *base;
        set(&mut d, p);
        stats.evaluated += 1;
        let cand = evaluate_point(
            params,
            &d.loc,
            d.offload,
            d.p_uav,
            d.p_bs,
            RhoPolicy::Pinned(d.rho),
        )?;
        if let Some(c) = cand {
            stats.feasible += 1;
            if best.is_none_or(|(_, e)| c.energy < e) {
                best = Some((p, c.energy));
            }
        }
    }
    Ok(best)
}
