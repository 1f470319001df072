//! UAV placement: the point closest to the BS (at the origin) that keeps the
//! target within sensing range and respects the altitude slab.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::system_model::{distance_uav_bs, distance_uav_target, Position3D, SystemParams};

/// Which closed-form case produced the placement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlacementCase {
    /// Target close enough: hover right above the BS.
    Overhead,
    /// UAV sits on the rim of the sensing cylinder, on the BS–target line.
    Rim,
}

impl PlacementCase {
    /// 1 or 2, following the usual case numbering.
    pub fn number(self) -> u8 {
        match self {
            PlacementCase::Overhead => 1,
            PlacementCase::Rim => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlacementResult {
    pub loc: Position3D,
    pub case: PlacementCase,
    pub d_max: f64,
    pub d_ut: f64,
    pub d_ub: f64,
}

/// Largest UAV-to-target distance meeting the QoS threshold.
pub fn d_max(params: &SystemParams) -> f64 {
    params.d_max()
}

pub fn optimal_uav_location(params: &SystemParams) -> Result<PlacementResult> {
    let d_max = d_max(params);
    let h = params.h_min;
    if !(h <= d_max) {
        return Err(Error::PlacementInfeasible { h_min: h, d_max });
    }
    let (xt, yt) = (params.target_x, params.target_y);
    let horizontal_sq = xt * xt + yt * yt;
    let rim_sq = d_max * d_max - h * h;

    let (loc, case) = if horizontal_sq <= rim_sq {
        (Position3D::new(0.0, 0.0, h), PlacementCase::Overhead)
    } else {
        let shrink = 1.0 - rim_sq.sqrt() / horizontal_sq.sqrt();
        (
            Position3D::new(xt * shrink, yt * shrink, h),
            PlacementCase::Rim,
        )
    };

    Ok(PlacementResult {
        loc,
        case,
        d_max,
        d_ut: distance_uav_target(params, &loc),
        d_ub: distance_uav_bs(&loc),
    })
}

/// Exhaustive grid search over a box around the BS and the target. Returns
/// the feasible grid point with the smallest distance to the BS, ties broken
/// by the lexicographically smallest (x, y, h).
pub fn placement_oracle(params: &SystemParams, grid_step: f64) -> Result<Position3D> {
    if !(grid_step > 0.0) {
        return Err(Error::invalid("grid_step", "must be positive"));
    }
    let d_max = d_max(params);
    let axis = |lo: f64, hi: f64| -> Vec<f64> {
        let n = ((hi - lo) / grid_step).floor() as usize;
        (0..=n).map(|i| lo + i as f64 * grid_step).collect()
    };
    let (xt, yt) = (params.target_x, params.target_y);
    let xs = axis(xt.min(0.0) - 50.0, xt.max(0.0) + 50.0);
    let ys = axis(yt.min(0.0) - 50.0, yt.max(0.0) + 50.0);
    let hs = axis(params.h_min, params.h_max);

    let per_x: Vec<Option<(f64, Position3D)>> = xs
        .par_iter()
        .map(|&x| {
            let mut best: Option<(f64, Position3D)> = None;
            for &y in &ys {
                for &h in &hs {
                    let loc = Position3D::new(x, y, h);
                    if distance_uav_target(params, &loc) > d_max {
                        continue;
                    }
                    let d = distance_uav_bs(&loc);
                    if best.is_none_or(|(b, _)| d < b) {
                        best = Some((d, loc));
                    }
                }
            }
            best
        })
        .collect();

    per_x
        .into_iter()
        .flatten()
        .fold(None, |acc: Option<(f64, Position3D)>, cand| match acc {
            Some(b) if b.0 <= cand.0 => Some(b),
            _ => Some(cand),
        })
        .map(|(_, loc)| loc)
        .ok_or_else(|| Error::Infeasible("no feasible placement grid point".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system_model::sensing_qos;
    use proptest::prelude::*;

    fn params_with_dmax(d_max: f64) -> SystemParams {
        // q_th = exp(-xi * d_max)
        let xi = 0.01;
        SystemParams {
            xi,
            q_th: (-xi * d_max).exp(),
            ..SystemParams::default()
        }
    }

    #[test]
    fn d_max_values() {
        let p = SystemParams {
            q_th: (-1.0f64).exp(),
            xi: 0.01,
            ..SystemParams::default()
        };
        assert!((d_max(&p) - 100.0).abs() < 1e-12);
        let p = SystemParams { q_th: 0.2, ..p };
        assert!((d_max(&p) - 160.943_791_243_410_03).abs() < 1e-9);
        let p = SystemParams {
            q_th: 1.0 - 1e-12,
            ..p
        };
        assert!(d_max(&p) < 1e-9);
    }

    #[test]
    fn overhead_case() {
        let p = params_with_dmax(400.0);
        let r = optimal_uav_location(&p).unwrap();
        assert_eq!(r.case, PlacementCase::Overhead);
        assert_eq!(r.loc, Position3D::new(0.0, 0.0, 40.0));
        let oracle = placement_oracle(&p, 5.0).unwrap();
        assert!(distance_uav_bs(&oracle) - r.d_ub <= 5.0 * 3f64.sqrt());
        assert!((oracle.x.powi(2) + oracle.y.powi(2)).sqrt() <= 5.0);
    }

    #[test]
    fn rim_case() {
        let p = params_with_dmax(200.0);
        let r = optimal_uav_location(&p).unwrap();
        assert_eq!(r.case, PlacementCase::Rim);
        assert!((r.loc.x - 114.096_799_382_044_03).abs() < 1e-6);
        assert!((r.loc.y - 38.032_266_460_681_34).abs() < 1e-6);
        assert_eq!(r.loc.h, 40.0);
        assert!((r.d_ut - 200.0).abs() < 1e-9);
        let oracle = placement_oracle(&p, 2.0).unwrap();
        let gap = distance_uav_bs(&oracle) - r.d_ub;
        assert!(gap >= -1e-9 && gap <= 2.0 * 3f64.sqrt(), "gap {gap}");
    }

    #[test]
    fn target_at_origin() {
        let p = SystemParams {
            target_x: 0.0,
            target_y: 0.0,
            ..SystemParams::default()
        };
        let r = optimal_uav_location(&p).unwrap();
        assert_eq!(r.loc, Position3D::new(0.0, 0.0, p.h_min));
        assert_eq!(r.case, PlacementCase::Overhead);
    }

    #[test]
    fn infeasible_altitude() {
        let p = SystemParams {
            h_min: 350.0,
            ..SystemParams::default()
        };
        assert!(matches!(
            optimal_uav_location(&p),
            Err(Error::PlacementInfeasible { .. })
        ));
        assert!(placement_oracle(&p, 5.0).is_err());
        assert!(placement_oracle(&SystemParams::default(), 0.0).is_err());
    }

    #[test]
    fn continuous_across_case_boundary() {
        let base = params_with_dmax(200.0);
        let rim = (200.0f64.powi(2) - 40.0f64.powi(2)).sqrt();
        let (ux, uy) = (0.6, 0.8);
        let at = |r: f64| {
            let p = SystemParams {
                target_x: ux * r,
                target_y: uy * r,
                ..base
            };
            optimal_uav_location(&p).unwrap()
        };
        let exact = at(rim);
        assert_eq!(exact.case, PlacementCase::Overhead);
        let inside = at(rim - 1e-6);
        let outside = at(rim + 1e-6);
        assert_eq!(inside.case, PlacementCase::Overhead);
        assert_eq!(outside.case, PlacementCase::Rim);
        assert!((outside.d_ub - inside.d_ub).abs() < 1e-5);
        assert!((outside.d_ut - 200.0).abs() < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn closed_form_properties(
            xt in -500.0f64..500.0,
            yt in -500.0f64..500.0,
            h_min in 5.0f64..100.0,
            extra in 1.0f64..300.0,
        ) {
            let p = SystemParams {
                target_x: xt,
                target_y: yt,
                h_min,
                h_max: h_min + 200.0,
                ..params_with_dmax(h_min + extra)
            };
            let r = optimal_uav_location(&p).unwrap();
            prop_assert_eq!(r.loc.h, p.h_min);
            prop_assert!(r.d_ut <= r.d_max + 1e-9);
            prop_assert!(sensing_qos(&p, &r.loc) >= p.q_th * (1.0 - 1e-12));
            // collinear with the target's ground projection
            prop_assert!((r.loc.x * yt - r.loc.y * xt).abs() <= 1e-9 * (1.0 + xt.abs() + yt.abs()).powi(2));
        }
    }
}
