//! Optimal semantic compression ratio for fixed powers and offload choice.
//!
//! With location, offload and powers fixed, the energy left to trade is
//! `A·ρ - F·ln ρ` subject to `K1·ρ + K2·ln ρ <= T` and `ρ_th <= ρ <= 1`.
//! The latency constraint cuts out an interval `[ρ_a, ρ_b]` whose endpoints
//! are the two real Lambert-W solutions of `K1·ρ + K2·ln ρ = T`, so the
//! optimum is the unconstrained minimiser `F/A` projected onto that interval
//! intersected with `[ρ_th, 1]`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{lambert_w0, lambert_wm1, lambert_wm1_from_log, BRANCH_CLAMP, BRANCH_POINT};
use crate::system_model::{
    channel_gain_uav_bs, link_latency, shannon_rate, Offload, Position3D, SystemParams,
    FEASIBILITY_TOL,
};

/// Coefficients of the one-dimensional ρ problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoCoefficients {
    /// UAV transmission energy per unit ρ (J). Equals `p_U * tx_time`.
    pub tx_energy: f64,
    /// Compression plus recovery energy per nat of `-ln ρ` (J).
    pub compute_energy: f64,
    /// UAV transmission time per unit ρ (s).
    pub tx_time: f64,
    /// Compression plus recovery time coefficient of `ln ρ` (s, negative).
    pub compute_time: f64,
    /// Latency budget left after the command-generation stage (s).
    pub budget: f64,
}

impl RhoCoefficients {
    pub fn objective(&self, rho: f64) -> f64 {
        self.tx_energy * rho - self.compute_energy * rho.ln()
    }

    pub fn latency(&self, rho: f64) -> f64 {
        self.tx_time * rho + self.compute_time * rho.ln()
    }
}

pub fn rho_coefficients(
    params: &SystemParams,
    loc: &Position3D,
    offload: Offload,
    p_uav: f64,
    p_bs: f64,
) -> Result<RhoCoefficients> {
    let d = params.data_bits;
    let gain = channel_gain_uav_bs(params, loc)?;
    let tx_time = link_latency(d, shannon_rate(p_uav, gain, params.bw_uav, params.n0));
    let compute_energy = d
        * (params.tau_uav * params.kappa1 * params.f_uav.powi(2)
            + params.tau_bs * params.kappa2 * params.f_bs.powi(2));
    let compute_time = -d * (params.kappa1 / params.f_uav + params.kappa2 / params.f_bs);
    let generation_time = match offload {
        Offload::Bs => params.kappa3 * d / params.f_bs,
        Offload::Server => {
            link_latency(d, shannon_rate(p_bs, params.g_bs, params.bw_bs, params.n0))
        }
    };
    Ok(RhoCoefficients {
        tx_energy: p_uav * tx_time,
        compute_energy,
        tx_time,
        compute_time,
        budget: params.t_th - generation_time,
    })
}

/// Which bound of the projection produced ρ*.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClampTag {
    Interior,
    RhoTh,
    RhoA,
    RhoB,
    One,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoSolution {
    /// Optimal ratio, `None` when no ratio meets the constraints.
    pub rho_star: Option<f64>,
    /// Unconstrained minimiser `F/A`.
    pub rho_0: f64,
    /// Latency roots; absent when the budget cannot be met at any ratio.
    pub rho_a: Option<f64>,
    pub rho_b: Option<f64>,
    pub clamp: Option<ClampTag>,
}

impl RhoSolution {
    pub fn feasible(&self) -> bool {
        self.rho_star.is_some()
    }

    fn infeasible(rho_0: f64, rho_a: Option<f64>, rho_b: Option<f64>) -> Self {
        RhoSolution {
            rho_star: None,
            rho_0,
            rho_a,
            rho_b,
            clamp: None,
        }
    }
}

/// Roots `ρ_a <= ρ_b` of `K1·ρ + K2·ln ρ = T`, or `None` if the left side
/// never drops to `T`.
pub fn latency_roots(coeffs: &RhoCoefficients) -> Result<Option<(f64, f64)>> {
    let (k1, k2, t) = (coeffs.tx_time, coeffs.compute_time, coeffs.budget);
    if !(t > 0.0) || !k1.is_finite() {
        return Ok(None);
    }
    let z = (k1 / k2) * (t / k2).exp();
    if z < BRANCH_POINT - BRANCH_CLAMP {
        return Ok(None);
    }
    let scale = k2 / k1;
    // W0 is linear near 0, so a tiny or underflowed z costs nothing there;
    // W-1 diverges and needs ln(-z) computed without forming z.
    let rho_a = scale * lambert_w0(z)?;
    let w_b = if z < -1e-300 {
        lambert_wm1(z)?
    } else {
        lambert_wm1_from_log((k1 / -k2).ln() + t / k2)?
    };
    let rho_b = scale * w_b;
    if !(rho_a <= rho_b) {
        return Err(Error::Internal(format!(
            "W0 root {rho_a} above W-1 root {rho_b} for z = {z}"
        )));
    }
    Ok(Some((rho_a, rho_b)))
}

pub fn optimal_rho(coeffs: &RhoCoefficients, rho_th: f64) -> Result<RhoSolution> {
    let rho_0 = coeffs.compute_energy / coeffs.tx_energy;
    let Some((rho_a, rho_b)) = latency_roots(coeffs)? else {
        return Ok(RhoSolution::infeasible(rho_0, None, None));
    };

    let (mut rho, mut tag) = (rho_0, ClampTag::Interior);
    if rho_th > rho {
        (rho, tag) = (rho_th, ClampTag::RhoTh);
    }
    if rho_a > rho {
        (rho, tag) = (rho_a, ClampTag::RhoA);
    }
    if 1.0 < rho {
        (rho, tag) = (1.0, ClampTag::One);
    }
    if rho_b < rho {
        (rho, tag) = (rho_b, ClampTag::RhoB);
    }

    // The projection emits a value even when the two intervals are disjoint.
    let disjoint = rho_th.max(rho_a) > rho_b.min(1.0);
    if disjoint || coeffs.latency(rho) > coeffs.budget + FEASIBILITY_TOL {
        return Ok(RhoSolution::infeasible(rho_0, Some(rho_a), Some(rho_b)));
    }
    Ok(RhoSolution {
        rho_star: Some(rho),
        rho_0,
        rho_a: Some(rho_a),
        rho_b: Some(rho_b),
        clamp: Some(tag),
    })
}

/// Brute-force scan of a log-spaced grid on `[rho_th, 1]`.
pub fn rho_oracle(coeffs: &RhoCoefficients, rho_th: f64, n_points: usize) -> Result<RhoSolution> {
    if n_points < 1000 {
        return Err(Error::invalid(
            "n_points",
            "oracle needs at least 1000 points",
        ));
    }
    let ln_lo = rho_th.ln();
    let last = (n_points - 1) as f64;
    let mut best: Option<(f64, f64)> = None;
    for i in 0..n_points {
        let rho = match i {
            0 => rho_th,
            _ if i == n_points - 1 => 1.0,
            _ => (ln_lo * (1.0 - i as f64 / last)).exp(),
        };
        if coeffs.latency(rho) > coeffs.budget {
            continue;
        }
        let obj = coeffs.objective(rho);
        if best.is_none_or(|(b, _)| obj < b) {
            best = Some((obj, rho));
        }
    }
    Ok(RhoSolution {
        rho_star: best.map(|(_, r)| r),
        rho_0: coeffs.compute_energy / coeffs.tx_energy,
        rho_a: None,
        rho_b: None,
        clamp: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::solve_bracketed;
    use proptest::prelude::*;

    fn coeffs(a: f64, f: f64, k1: f64, k2: f64, t: f64) -> RhoCoefficients {
        RhoCoefficients {
            tx_energy: a,
            compute_energy: f,
            tx_time: k1,
            compute_time: k2,
            budget: t,
        }
    }

    #[test]
    fn upper_root_survives_underflow() {
        // exp(T/K2) = exp(-900) underflows, yet the budget still binds below 1
        let c = RhoCoefficients {
            tx_energy: 1.0,
            compute_energy: 2.0,
            tx_time: 1.0,
            compute_time: -1e-3,
            budget: 0.9,
        };
        let (a, b) = latency_roots(&c).unwrap().unwrap();
        assert_eq!(a, 0.0);
        assert!((c.latency(b) - c.budget).abs() <= 1e-12);
        assert!((b - 0.899_894_6).abs() < 1e-6, "{b}");
        let sol = optimal_rho(&c, 0.05).unwrap();
        assert_eq!(sol.rho_star, Some(b));
        assert_eq!(sol.clamp, Some(ClampTag::RhoB));
    }

    #[test]
    fn coefficient_definitions() {
        let p = SystemParams {
            data_bits: 1e6,
            tau_uav: 1e-28,
            kappa1: 100.0,
            f_uav: 1e9,
            tau_bs: 1e-28,
            kappa2: 100.0,
            f_bs: 1e10,
            ..SystemParams::default()
        };
        let loc = Position3D::new(10.0, 5.0, 40.0);
        let c = rho_coefficients(&p, &loc, Offload::Bs, 0.3, 0.7).unwrap();
        assert!((c.compute_energy - 1.01).abs() < 1e-12);
        assert!((c.tx_energy / c.tx_time - 0.3).abs() < 1e-15);
        assert!((c.budget - (p.t_th - p.kappa3 * p.data_bits / p.f_bs)).abs() < 1e-15);
        let c2 = rho_coefficients(&p, &loc, Offload::Bs, 0.3, 0.01).unwrap();
        assert_eq!(c.budget, c2.budget);
        assert!(c.compute_time < 0.0);

        let s1 = rho_coefficients(&p, &loc, Offload::Server, 0.3, 0.7).unwrap();
        let s2 = rho_coefficients(&p, &loc, Offload::Server, 0.3, 0.01).unwrap();
        assert!(s1.budget > s2.budget);
    }

    #[test]
    fn interior_minimiser() {
        let c = coeffs(10.0, 2.0, 1e-3, -1e-3, 100.0);
        let s = optimal_rho(&c, 0.05).unwrap();
        assert_eq!(s.rho_star, Some(0.2));
        assert_eq!(s.clamp, Some(ClampTag::Interior));
        let o = rho_oracle(&c, 0.05, 100_000).unwrap();
        assert!((o.rho_star.unwrap() - 0.2).abs() < 1e-4);
    }

    #[test]
    fn clamps_at_one() {
        let c = coeffs(2.0, 3.0, 1e-3, -1e-3, 100.0);
        let s = optimal_rho(&c, 0.05).unwrap();
        assert_eq!(s.rho_star, Some(1.0));
        assert_eq!(s.clamp, Some(ClampTag::One));
    }

    #[test]
    fn clamps_at_rho_th() {
        let c = coeffs(100.0, 1.0, 1e-3, -1e-3, 100.0);
        let s = optimal_rho(&c, 0.05).unwrap();
        assert_eq!(s.rho_star, Some(0.05));
        assert_eq!(s.clamp, Some(ClampTag::RhoTh));
    }

    #[test]
    fn latency_binding_case() {
        let c = coeffs(10.0, 2.0, 1.0, -0.5, 0.9);
        // independent roots of rho - 0.5 ln rho = 0.9 on either side of 0.5
        let lo = solve_bracketed(|r| c.latency(r) - 0.9, 0.01, 0.5, 1e-14).unwrap();
        let hi = solve_bracketed(|r| c.latency(r) - 0.9, 0.5, 1.0, 1e-14).unwrap();
        assert!((lo - 0.303_017_284_150_262_1).abs() < 1e-12);
        assert!((hi - 0.768_049_364_202_844_8).abs() < 1e-12);

        let s = optimal_rho(&c, 0.05).unwrap();
        assert!((s.rho_a.unwrap() - lo).abs() < 1e-12);
        assert!((s.rho_b.unwrap() - hi).abs() < 1e-12);
        assert_eq!(s.clamp, Some(ClampTag::RhoA));
        assert!((s.rho_star.unwrap() - lo).abs() < 1e-12);

        let o = rho_oracle(&c, 0.05, 100_000).unwrap();
        assert!((o.rho_star.unwrap() - lo).abs() < 1e-4);
    }

    #[test]
    fn clamps_at_rho_b() {
        // F/A = 5 pushes right, latency caps at rho_b ~ 0.768
        let c = coeffs(1.0, 5.0, 1.0, -0.5, 0.9);
        let s = optimal_rho(&c, 0.05).unwrap();
        assert_eq!(s.clamp, Some(ClampTag::RhoB));
        assert!((s.rho_star.unwrap() - 0.768_049_364_202_844_8).abs() < 1e-12);
    }

    #[test]
    fn latency_unsatisfiable() {
        // min of rho - 0.5 ln rho is 0.8466 at rho = 0.5
        let c = coeffs(10.0, 2.0, 1.0, -0.5, 0.8);
        let s = optimal_rho(&c, 0.05).unwrap();
        assert!(!s.feasible());
        assert!(s.rho_a.is_none());
        let o = rho_oracle(&c, 0.05, 100_000).unwrap();
        assert!(o.rho_star.is_none());
    }

    #[test]
    fn disjoint_intervals_flagged() {
        // roots ~[0.303, 0.768] but rho_th = 0.9
        let c = coeffs(10.0, 2.0, 1.0, -0.5, 0.9);
        let s = optimal_rho(&c, 0.9).unwrap();
        assert!(!s.feasible());
        assert!(s.rho_a.is_some());
    }

    #[test]
    fn non_positive_budget_short_circuits() {
        let s = optimal_rho(&coeffs(1.0, 1.0, 1.0, -1.0, 0.0), 0.05).unwrap();
        assert!(!s.feasible());
        let s = optimal_rho(&coeffs(1.0, 1.0, 1.0, -1.0, -3.0), 0.05).unwrap();
        assert!(!s.feasible());
    }

    #[test]
    fn tangent_budget_gives_double_root() {
        // T equals the minimum latency exactly: z = -1/e
        let t = 0.5 - 0.5 * 0.5f64.ln();
        let c = coeffs(10.0, 2.0, 1.0, -0.5, t);
        let s = optimal_rho(&c, 0.05).unwrap();
        let (a, b) = (s.rho_a.unwrap(), s.rho_b.unwrap());
        assert!(a <= b && (b - a) < 1e-6);
        assert!(s.feasible());
    }

    #[test]
    fn oracle_rejects_coarse_grids() {
        assert!(rho_oracle(&coeffs(1.0, 1.0, 1.0, -1.0, 1.0), 0.05, 10).is_err());
    }

    fn arb_coeffs() -> impl Strategy<Value = RhoCoefficients> {
        (
            -3.0f64..1.0,
            -3.0f64..1.0,
            -2.0f64..1.0,
            -3.0f64..0.0,
            0.0f64..3.0,
        )
            .prop_map(|(a, f, k1, k2, t)| {
                let k1 = 10f64.powf(k1);
                let k2 = -(10f64.powf(k2));
                RhoCoefficients {
                    tx_energy: 10f64.powf(a),
                    compute_energy: 10f64.powf(f),
                    tx_time: k1,
                    compute_time: k2,
                    // scale the budget around the latency at rho = 1
                    budget: k1 * t,
                }
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn roots_satisfy_the_latency_equation(c in arb_coeffs()) {
            if let Some((a, b)) = latency_roots(&c).unwrap() {
                prop_assert!(a <= b);
                for r in [a, b] {
                    if r.is_normal() {
                        prop_assert!((c.latency(r) - c.budget).abs() <= 1e-9 * c.budget.abs());
                    }
                }
            }
        }

        #[test]
        fn closed_form_is_locally_optimal(c in arb_coeffs(), rho_th in 0.01f64..0.5) {
            let s = optimal_rho(&c, rho_th).unwrap();
            if let Some(r) = s.rho_star {
                prop_assert!(r >= rho_th && r <= 1.0);
                prop_assert!(c.latency(r) <= c.budget + 1e-9);
                let f = c.objective(r);
                for eps in [1e-6, 1e-4, 1e-2] {
                    for cand in [r * (1.0 - eps), r * (1.0 + eps)] {
                        if cand >= rho_th && cand <= 1.0 && c.latency(cand) <= c.budget {
                            prop_assert!(c.objective(cand) >= f - 1e-12 * f.abs());
                        }
                    }
                }
            }
        }

        #[test]
        fn larger_budget_widens_interval(c in arb_coeffs(), grow in 1.0f64..2.0) {
            let wider = RhoCoefficients { budget: c.budget * grow, ..c };
            if let (Some((a1, b1)), Some((a2, b2))) =
                (latency_roots(&c).unwrap(), latency_roots(&wider).unwrap())
            {
                prop_assert!(a2 <= a1 * (1.0 + 1e-12));
                prop_assert!(b2 >= b1 * (1.0 - 1e-12));
            }
        }
    }
}
