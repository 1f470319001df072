//! Scenario files. Values are written in the units engineers quote (dBm, dB,
//! dBm/Hz) and converted to SI when the file is turned into `SystemParams`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baselines::{BcdOptions, Scheme};
use crate::error::{Error, Result};
use crate::power_search::GridSpec;
use crate::system_model::{db_to_linear, dbm_per_hz_to_watt_per_hz, dbm_to_watt, SystemParams};

/// Model constants in file units. Missing keys take their default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioParams {
    pub target_x_m: f64,
    pub target_y_m: f64,
    pub xi_per_m: f64,
    pub q_th: f64,
    pub data_bits: f64,
    pub rho_th: f64,
    pub kappa1_cycles_per_bit: f64,
    pub kappa2_cycles_per_bit: f64,
    pub kappa3_cycles_per_bit: f64,
    pub f_uav_hz: f64,
    pub f_bs_hz: f64,
    pub tau_uav: f64,
    pub tau_bs: f64,
    pub g0_db: f64,
    pub alpha: f64,
    pub bw_uav_hz: f64,
    pub bw_bs_hz: f64,
    pub n0_dbm_per_hz: f64,
    pub g_bs_db: f64,
    pub p_uav_max_dbm: f64,
    pub p_bs_max_dbm: f64,
    pub h_min_m: f64,
    pub h_max_m: f64,
    pub t_th_s: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            target_x_m: 300.0,
            target_y_m: 100.0,
            xi_per_m: 0.01,
            q_th: 0.05,
            data_bits: 1e6,
            rho_th: 0.05,
            kappa1_cycles_per_bit: 20.0,
            kappa2_cycles_per_bit: 20.0,
            kappa3_cycles_per_bit: 100.0,
            f_uav_hz: 1e9,
            f_bs_hz: 2e9,
            tau_uav: 1e-28,
            tau_bs: 1e-28,
            g0_db: -60.0,
            alpha: 2.0,
            bw_uav_hz: 1e5,
            bw_bs_hz: 5e5,
            n0_dbm_per_hz: -174.0,
            g_bs_db: -100.0,
            p_uav_max_dbm: 30.0,
            p_bs_max_dbm: 30.0,
            h_min_m: 40.0,
            h_max_m: 400.0,
            t_th_s: 0.7,
        }
    }
}

impl ScenarioParams {
    /// SI parameters, unvalidated.
    pub fn to_system(&self) -> SystemParams {
        SystemParams {
            target_x: self.target_x_m,
            target_y: self.target_y_m,
            xi: self.xi_per_m,
            q_th: self.q_th,
            data_bits: self.data_bits,
            rho_th: self.rho_th,
            kappa1: self.kappa1_cycles_per_bit,
            kappa2: self.kappa2_cycles_per_bit,
            kappa3: self.kappa3_cycles_per_bit,
            f_uav: self.f_uav_hz,
            f_bs: self.f_bs_hz,
            tau_uav: self.tau_uav,
            tau_bs: self.tau_bs,
            g0: db_to_linear(self.g0_db),
            alpha: self.alpha,
            bw_uav: self.bw_uav_hz,
            bw_bs: self.bw_bs_hz,
            n0: dbm_per_hz_to_watt_per_hz(self.n0_dbm_per_hz),
            g_bs: db_to_linear(self.g_bs_db),
            p_uav_max: dbm_to_watt(self.p_uav_max_dbm),
            p_bs_max: dbm_to_watt(self.p_bs_max_dbm),
            h_min: self.h_min_m,
            h_max: self.h_max_m,
            t_th: self.t_th_s,
        }
    }
}

/// Contents of a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Schemes run by `sweep` when none are given on the command line.
    pub schemes: Vec<Scheme>,
    pub params: ScenarioParams,
    pub grid: GridSpec,
    pub bcd: BcdOptions,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            schemes: Scheme::ALL.to_vec(),
            params: ScenarioParams::default(),
            grid: GridSpec::default(),
            bcd: BcdOptions::default(),
        }
    }
}

impl ScenarioConfig {
    /// Validated SI parameters.
    pub fn system_params(&self) -> Result<SystemParams> {
        let p = self.params.to_system();
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.system_params()?;
        self.grid.validate()?;
        if self.bcd.max_iters < 1 || !(self.bcd.tol >= 0.0) {
            return Err(Error::invalid("bcd", "need max_iters >= 1 and tol >= 0"));
        }
        if self.schemes.is_empty() {
            return Err(Error::invalid("schemes", "must not be empty"));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario config always serializes")
    }
}

/// Parses and validates a scenario from TOML text. `origin` is only used in
/// diagnostics.
pub fn parse_config(text: &str, origin: &Path) -> Result<ScenarioConfig> {
    let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config {
        path: origin.to_path_buf(),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, path)
}
