//! Per-cycle latency and energy model of the sense → compress → transmit →
//! recover → generate pipeline, plus constraint checks for a candidate
//! decision. All quantities are SI: bits, Hz, W, s, J, m.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance applied to every constraint slack.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Physical and model constants of one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Target horizontal position (m); the target sits on the ground.
    pub target_x: f64,
    pub target_y: f64,
    /// Sensing decay coefficient ξ (1/m).
    pub xi: f64,
    /// Minimum sensing QoS.
    pub q_th: f64,
    /// Raw data size D (bits).
    pub data_bits: f64,
    /// Lower bound on the compression ratio.
    pub rho_th: f64,
    /// Compression, recovery and inference cost (cycles/bit).
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    /// Processor clock rates (cycles/s).
    pub f_uav: f64,
    pub f_bs: f64,
    /// Switched capacitance, so that τ·f³ is in watts.
    pub tau_uav: f64,
    pub tau_bs: f64,
    /// Reference UAV→BS channel gain at 1 m (linear).
    pub g0: f64,
    pub alpha: f64,
    /// UAV→BS and BS→server bandwidths (Hz).
    pub bw_uav: f64,
    pub bw_bs: f64,
    /// Noise power spectral density (W/Hz).
    pub n0: f64,
    /// BS→server channel gain (linear).
    pub g_bs: f64,
    /// Transmit power caps (W).
    pub p_uav_max: f64,
    pub p_bs_max: f64,
    /// UAV altitude bounds (m).
    pub h_min: f64,
    pub h_max: f64,
    /// Latency budget per update cycle (s).
    pub t_th: f64,
}

/// Scalar fields addressable by name, e.g. as a sweep axis.
pub const PARAM_NAMES: [&str; 24] = [
    "x_T", "y_T", "xi", "q_th", "D", "rho_th", "kappa1", "kappa2", "kappa3", "f_U", "f_B", "tau_U",
    "tau_B", "G0", "alpha", "B_U", "B_B", "N0", "G_BS", "p_U_max", "p_B_max", "H_min", "H_max",
    "T_th",
];

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            target_x: 300.0,
            target_y: 100.0,
            xi: 0.01,
            q_th: 0.05,
            data_bits: 1e6,
            rho_th: 0.05,
            kappa1: 20.0,
            kappa2: 20.0,
            kappa3: 100.0,
            f_uav: 1e9,
            f_bs: 2e9,
            tau_uav: 1e-28,
            tau_bs: 1e-28,
            g0: db_to_linear(-60.0),
            alpha: 2.0,
            bw_uav: 1e5,
            bw_bs: 5e5,
            n0: dbm_per_hz_to_watt_per_hz(-174.0),
            g_bs: db_to_linear(-100.0),
            p_uav_max: dbm_to_watt(30.0),
            p_bs_max: dbm_to_watt(30.0),
            h_min: 40.0,
            h_max: 400.0,
            t_th: 0.7,
        }
    }
}

impl SystemParams {
    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "x_T" => &mut self.target_x,
            "y_T" => &mut self.target_y,
            "xi" => &mut self.xi,
            "q_th" => &mut self.q_th,
            "D" => &mut self.data_bits,
            "rho_th" => &mut self.rho_th,
            "kappa1" => &mut self.kappa1,
            "kappa2" => &mut self.kappa2,
            "kappa3" => &mut self.kappa3,
            "f_U" => &mut self.f_uav,
            "f_B" => &mut self.f_bs,
            "tau_U" => &mut self.tau_uav,
            "tau_B" => &mut self.tau_bs,
            "G0" => &mut self.g0,
            "alpha" => &mut self.alpha,
            "B_U" => &mut self.bw_uav,
            "B_B" => &mut self.bw_bs,
            "N0" => &mut self.n0,
            "G_BS" => &mut self.g_bs,
            "p_U_max" => &mut self.p_uav_max,
            "p_B_max" => &mut self.p_bs_max,
            "H_min" => &mut self.h_min,
            "H_max" => &mut self.h_max,
            "T_th" => &mut self.t_th,
            _ => return None,
        })
    }

    /// Reads a field by its symbolic name (see [`PARAM_NAMES`]).
    pub fn get(&self, name: &str) -> Result<f64> {
        let mut copy = *self;
        copy.slot(name)
            .map(|v| *v)
            .ok_or_else(|| Error::invalid(name, "unknown parameter name"))
    }

    /// Overwrites a field by its symbolic name. Does not re-validate.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = self
            .slot(name)
            .ok_or_else(|| Error::invalid(name, "unknown parameter name"))?;
        *slot = value;
        Ok(())
    }

    /// Maximum UAV-to-target distance that still meets `q_th`.
    pub fn d_max(&self) -> f64 {
        -self.q_th.ln() / self.xi
    }

    pub fn validate(&self) -> Result<()> {
        for name in PARAM_NAMES {
            let v = self.get(name)?;
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
            if name != "x_T" && name != "y_T" && v <= 0.0 {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        if self.q_th >= 1.0 {
            return Err(Error::invalid(
                "q_th",
                format!("must lie in (0, 1), got {}", self.q_th),
            ));
        }
        if self.rho_th > 1.0 {
            return Err(Error::invalid(
                "rho_th",
                format!("must lie in (0, 1], got {}", self.rho_th),
            ));
        }
        if self.alpha < 1.0 {
            return Err(Error::invalid(
                "alpha",
                format!("must be >= 1, got {}", self.alpha),
            ));
        }
        if self.h_min > self.h_max {
            return Err(Error::invalid(
                "H_min",
                format!("H_min = {} exceeds H_max = {}", self.h_min, self.h_max),
            ));
        }
        let d_max = self.d_max();
        if self.h_min > d_max {
            return Err(Error::invalid(
                "H_min",
                format!(
                    "H_min = {} exceeds D_max = -ln(q_th)/xi = {d_max}",
                    self.h_min
                ),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position3D {
    pub x: f64,
    pub y: f64,
    /// Altitude above ground (m).
    pub h: f64,
}

impl Position3D {
    pub fn new(x: f64, y: f64, h: f64) -> Self {
        Position3D { x, y, h }
    }

    fn is_valid(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.h.is_finite() && self.h >= 0.0
    }
}

/// Where the control command is generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Offload {
    /// Offload to the cloud server (a = 0).
    Server,
    /// Generate locally at the mobile BS (a = 1).
    Bs,
}

impl Offload {
    pub const BOTH: [Offload; 2] = [Offload::Server, Offload::Bs];

    pub fn bit(self) -> u8 {
        match self {
            Offload::Server => 0,
            Offload::Bs => 1,
        }
    }

    pub fn from_bit(a: u8) -> Option<Self> {
        match a {
            0 => Some(Offload::Server),
            1 => Some(Offload::Bs),
            _ => None,
        }
    }
}

/// One candidate configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub offload: Offload,
    pub loc: Position3D,
    pub rho: f64,
    pub p_uav: f64,
    pub p_bs: f64,
}

/// Stage-by-stage latency (s) and energy (J) of one update cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageMetrics {
    pub t_u: f64,
    pub t_ub: f64,
    pub t_b: f64,
    pub t_bi: f64,
    pub t_bs: f64,
    pub e_u: f64,
    pub e_ub: f64,
    pub e_b: f64,
    pub e_bi: f64,
    pub e_bs: f64,
    pub e_total: f64,
    pub t_total: f64,
    pub q: f64,
    pub slack_t: f64,
    pub slack_q: f64,
}

pub fn distance_uav_bs(loc: &Position3D) -> f64 {
    (loc.x * loc.x + loc.y * loc.y + loc.h * loc.h).sqrt()
}

pub fn distance_uav_target(params: &SystemParams, loc: &Position3D) -> f64 {
    let dx = loc.x - params.target_x;
    let dy = loc.y - params.target_y;
    (dx * dx + dy * dy + loc.h * loc.h).sqrt()
}

pub fn sensing_qos(params: &SystemParams, loc: &Position3D) -> f64 {
    (-params.xi * distance_uav_target(params, loc)).exp()
}

/// Line-of-sight gain `G0 / d^alpha` between UAV and BS.
pub fn channel_gain_uav_bs(params: &SystemParams, loc: &Position3D) -> Result<f64> {
    let d = distance_uav_bs(loc);
    if d == 0.0 {
        return Err(Error::DegeneratePosition);
    }
    Ok(params.g0 / d.powf(params.alpha))
}

/// Shannon rate in bit/s. Zero when the SNR underflows.
pub fn shannon_rate(power: f64, gain: f64, bandwidth: f64, n0: f64) -> f64 {
    let snr = power * gain / (bandwidth * n0);
    bandwidth * snr.ln_1p() / std::f64::consts::LN_2
}

/// Seconds to push `bits` through a link of the given rate; infinite on a dead link.
pub(crate) fn link_latency(bits: f64, rate: f64) -> f64 {
    if rate > 0.0 {
        bits / rate
    } else {
        f64::INFINITY
    }
}

/// Evaluates every stage of the cycle for `decision`.
pub fn evaluate(params: &SystemParams, decision: &Decision) -> Result<StageMetrics> {
    let Decision {
        offload,
        loc,
        rho,
        p_uav,
        p_bs,
    } = *decision;
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::invalid(
            "rho",
            format!("must lie in (0, 1], got {rho}"),
        ));
    }
    if !(p_uav > 0.0 && p_uav.is_finite()) {
        return Err(Error::invalid(
            "p_U",
            format!("must be positive, got {p_uav}"),
        ));
    }
    if !(p_bs > 0.0 && p_bs.is_finite()) {
        return Err(Error::invalid(
            "p_B",
            format!("must be positive, got {p_bs}"),
        ));
    }
    if !loc.is_valid() {
        return Err(Error::invalid("loc", format!("invalid position {loc:?}")));
    }

    let d = params.data_bits;
    // Positive zero at rho = 1.
    let nats = 0.0 - rho.ln();

    let gain = channel_gain_uav_bs(params, &loc)?;
    let rate_uav = shannon_rate(p_uav, gain, params.bw_uav, params.n0);
    let rate_bs = shannon_rate(p_bs, params.g_bs, params.bw_bs, params.n0);

    let power_uav_cpu = params.tau_uav * params.f_uav.powi(3);
    let power_bs_cpu = params.tau_bs * params.f_bs.powi(3);

    let t_u = params.kappa1 * d * nats / params.f_uav;
    let e_u = power_uav_cpu * t_u;
    let t_ub = link_latency(d * rho, rate_uav);
    let e_ub = p_uav * t_ub;
    let t_b = params.kappa2 * d * nats / params.f_bs;
    let e_b = power_bs_cpu * t_b;
    let t_bi = params.kappa3 * d / params.f_bs;
    let e_bi = power_bs_cpu * t_bi;
    let t_bs = link_latency(d, rate_bs);
    let e_bs = p_bs * t_bs;

    let (e_total, t_total) = match offload {
        Offload::Bs => (e_u + e_ub + e_b + e_bi, t_u + t_ub + t_b + t_bi),
        Offload::Server => (e_u + e_ub + e_b + e_bs, t_u + t_ub + t_b + t_bs),
    };
    if e_total.is_nan() || t_total.is_nan() {
        return Err(Error::NonFinite("stage metrics"));
    }
    let q = sensing_qos(params, &loc);

    Ok(StageMetrics {
        t_u,
        t_ub,
        t_b,
        t_bi,
        t_bs,
        e_u,
        e_ub,
        e_b,
        e_bi,
        e_bs,
        e_total,
        t_total,
        q,
        slack_t: params.t_th - t_total,
        slack_q: q - params.q_th,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    Latency,
    Qos,
    Altitude,
    RhoBounds,
    UavPower,
    BsPower,
    OffloadBinary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstraintCheck {
    pub constraint: Constraint,
    /// Distance to the boundary; negative means violated.
    pub slack: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub checks: Vec<ConstraintCheck>,
}

impl FeasibilityReport {
    pub fn feasible(&self) -> bool {
        self.checks.iter().all(|c| c.satisfied)
    }

    pub fn check(&self, constraint: Constraint) -> &ConstraintCheck {
        self.checks
            .iter()
            .find(|c| c.constraint == constraint)
            .expect("every constraint is checked")
    }

    pub fn min_slack(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.slack)
            .fold(f64::INFINITY, f64::min)
    }
}

fn check(constraint: Constraint, slack: f64) -> ConstraintCheck {
    ConstraintCheck {
        constraint,
        slack,
        satisfied: slack >= -FEASIBILITY_TOL,
    }
}

/// Checks every constraint of the joint problem. Infeasibility is data here.
pub fn is_feasible(params: &SystemParams, decision: &Decision) -> FeasibilityReport {
    let slack_t = match evaluate(params, decision) {
        Ok(m) => m.slack_t,
        Err(_) => f64::NEG_INFINITY,
    };
    let slack_q = if decision.loc.is_valid() {
        sensing_qos(params, &decision.loc) - params.q_th
    } else {
        f64::NEG_INFINITY
    };
    let h = decision.loc.h;
    let slack_h = (h - params.h_min).min(params.h_max - h);
    let rho = decision.rho;
    let slack_rho = (rho - params.rho_th).min(1.0 - rho);
    let pos = |p: f64| if p > 0.0 { p } else { f64::NEG_INFINITY };
    let slack_pu = pos(decision.p_uav).min(params.p_uav_max - decision.p_uav);
    let slack_pb = pos(decision.p_bs).min(params.p_bs_max - decision.p_bs);

    let nan_to_violation = |s: f64| if s.is_nan() { f64::NEG_INFINITY } else { s };
    FeasibilityReport {
        checks: vec![
            check(Constraint::Latency, nan_to_violation(slack_t)),
            check(Constraint::Qos, nan_to_violation(slack_q)),
            check(Constraint::Altitude, nan_to_violation(slack_h)),
            check(Constraint::RhoBounds, nan_to_violation(slack_rho)),
            check(Constraint::UavPower, nan_to_violation(slack_pu)),
            check(Constraint::BsPower, nan_to_violation(slack_pb)),
            // The enum admits only the two offload values.
            check(Constraint::OffloadBinary, 0.0),
        ],
    }
}

pub fn dbm_to_watt(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watt_to_dbm(watt: f64) -> f64 {
    10.0 * watt.log10() + 30.0
}

pub fn dbm_per_hz_to_watt_per_hz(dbm_per_hz: f64) -> f64 {
    dbm_to_watt(dbm_per_hz)
}

pub fn watt_per_hz_to_dbm_per_hz(watt_per_hz: f64) -> f64 {
    watt_to_dbm(watt_per_hz)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
