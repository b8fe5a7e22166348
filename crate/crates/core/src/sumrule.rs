//! The `C_0` sum rule `Z = E_0 + A_0`.
//!
//! * `Z = -(1/2) int log det( w(theta) / (2 sin^2 theta) ) dtheta / 2 pi`
//! * `E_0 = -sum_k m_k log |z_k|`
//! * `A_0 = -lim sum_{j <= n} log |det A_j|`
//!
//! A second route to `Z` goes through the outer factor:
//! `Z = -int log |det G| dtheta / 2 pi - (l/2) log 2`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::det;
use crate::measure::{BoundState, MatrixMeasure};
use crate::moprl::BlockJacobi;
use crate::szego::OuterFunction;

/// Partial sums of `A_0` count as oscillating if consecutive increments change
/// sign with a swing above this.
pub const OSCILLATION_THRESHOLD: f64 = 1e-3;

/// A circle integral from the `M`- and `2M`-node grids.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Extrapolated {
    /// `2 I_{2M} - I_M`.
    pub value: f64,
    pub coarse: f64,
    pub fine: f64,
    /// `|I_{2M} - I_M|`.
    pub error: f64,
}

impl Extrapolated {
    fn new(coarse: f64, fine: f64) -> Self {
        Extrapolated {
            value: 2.0 * fine - coarse,
            coarse,
            fine,
            error: (fine - coarse).abs(),
        }
    }
}

fn z_on_grid(mu: &MatrixMeasure, count: usize) -> Result<f64> {
    let w = mu.szego_weight_at(count)?;
    let l = mu.dim() as f64;
    let mut sum = 0.0;
    for m in 0..count {
        let d = det(&w.value(m)).re;
        if !(d > 0.0) {
            return Err(Error::NotPD { node: m, det: d });
        }
        let s2 = 2.0 * w.theta(m).sin().powi(2);
        sum += d.ln() - l * s2.ln();
    }
    Ok(-0.5 * sum / count as f64)
}

/// `Z` from the weight, on the measure's grid and its refinement.
pub fn z_quantity(mu: &MatrixMeasure) -> Result<Extrapolated> {
    let m = mu.quad_order();
    Ok(Extrapolated::new(z_on_grid(mu, m)?, z_on_grid(mu, 2 * m)?))
}

/// `E_0 = -sum m_k log |z_k|`.
pub fn e0_quantity(states: &[BoundState]) -> f64 {
    states
        .iter()
        .map(|s| -(s.multiplicity as f64) * s.z.norm().ln())
        .sum()
}

/// `-sum_{j <= n} log |det A_j|`.
pub fn a0_quantity(jacobi: &BlockJacobi, n: usize) -> Result<f64> {
    if n > jacobi.depth() {
        return Err(Error::DepthExceeded {
            requested: n,
            available: jacobi.depth(),
        });
    }
    Ok(jacobi.a_blocks()[..n]
        .iter()
        .map(|a| -det(a).norm().ln())
        .sum())
}

#[derive(Debug, Clone, Serialize)]
pub struct SumRuleLedger {
    pub z: Extrapolated,
    pub e0: f64,
    pub n_values: Vec<usize>,
    pub a0_partial: Vec<f64>,
    /// `|Z - E_0 - A_0(n)|`.
    pub residuals: Vec<f64>,
    /// `int log |det G| dtheta / 2 pi`, when an outer factor is supplied.
    pub log_det_g: Option<Extrapolated>,
    /// `|sum log |det A_j| + sum m_k log |z_k| - int log |det G| - (l/2) log 2|`.
    pub bridge: Vec<f64>,
    /// `|Z - Z_G|` between the two routes to `Z`.
    pub route_gap: Option<f64>,
    /// `2 max(err Z, err G)`, floored at `1e-10`.
    pub route_allowance: Option<f64>,
    pub oscillating: bool,
}

impl SumRuleLedger {
    /// Do the balance and bridge residuals agree within the allowance?
    pub fn routes_agree(&self) -> bool {
        match (self.route_gap, self.route_allowance) {
            (Some(gap), Some(allow)) => {
                gap <= allow
                    && self
                        .residuals
                        .iter()
                        .zip(&self.bridge)
                        .all(|(r, b)| (r - b).abs() <= allow)
            }
            _ => true,
        }
    }
}

/// Evaluates the sum rule for each `n` in `n_list`.
pub fn check_sum_rule(
    mu: &MatrixMeasure,
    jacobi: &BlockJacobi,
    states: &[BoundState],
    g: Option<&OuterFunction>,
    n_list: &[usize],
) -> Result<SumRuleLedger> {
    let z = z_quantity(mu)?;
    let e0 = e0_quantity(states);
    let l = mu.dim() as f64;
    let a0_partial: Vec<f64> = n_list
        .iter()
        .map(|&n| a0_quantity(jacobi, n))
        .collect::<Result<_>>()?;
    let residuals = a0_partial
        .iter()
        .map(|a| (z.value - e0 - a).abs())
        .collect();

    let log_det_g = g.map(|g| {
        let (value, error) = g.log_det_mean();
        Extrapolated {
            value,
            coarse: value,
            fine: value,
            error,
        }
    });
    let half_log2 = 0.5 * l * 2f64.ln();
    let bridge = match &log_det_g {
        Some(ig) => a0_partial
            .iter()
            .map(|a| (-a - e0 - ig.value - half_log2).abs())
            .collect(),
        None => Vec::new(),
    };
    let route_gap = log_det_g.map(|ig| (z.value - (-ig.value - half_log2)).abs());
    let route_allowance = log_det_g.map(|ig| (2.0 * z.error.max(ig.error)).max(1e-10));

    Ok(SumRuleLedger {
        z,
        e0,
        n_values: n_list.to_vec(),
        oscillating: oscillates(jacobi, n_list),
        a0_partial,
        residuals,
        log_det_g,
        bridge,
        route_gap,
        route_allowance,
    })
}

/// Sign changes with swing above the threshold among the increments
/// `-log |det A_j|` over the last half of the range.
fn oscillates(jacobi: &BlockJacobi, n_list: &[usize]) -> bool {
    let top = n_list
        .iter()
        .copied()
        .max()
        .unwrap_or(0)
        .min(jacobi.depth());
    let inc: Vec<f64> = jacobi.a_blocks()[top / 2..top]
        .iter()
        .map(|a| -det(a).norm().ln())
        .collect();
    inc.windows(2)
        .any(|w| w[0].signum() != w[1].signum() && (w[0] - w[1]).abs() > OSCILLATION_THRESHOLD)
}
