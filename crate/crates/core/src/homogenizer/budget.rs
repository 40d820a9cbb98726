use serde::{Deserialize, Serialize};

use super::{cos_pow2n, SwapAngle};
use crate::error::{Error, Result};

/// Angle and reservoir size that guarantee homogenization to precision `delta`.
///
/// `sin η_max = √(δ/2)` keeps every reservoir qubit within `δ` of its initial
/// state, and `n_delta = ⌈ln(δ/2) / ln(1 − δ/2)⌉` collisions at that angle
/// bring any system state within `δ` of the reservoir state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomogenizationBudget {
    pub delta: f64,
    pub eta_max: f64,
    pub sin_eta_max: f64,
    pub n_delta: u64,
}

impl HomogenizationBudget {
    pub fn angle(&self) -> SwapAngle {
        SwapAngle::from_sin_squared(self.delta / 2.0).expect("delta in (0, 2)")
    }

    /// The real-valued lower bound before rounding up.
    pub fn n_delta_real(&self) -> f64 {
        n_bound(self.delta)
    }

    /// Worst-case `D(ρ_S^(n), ξ) = 2c^{2n}` at the budget angle.
    pub fn worst_system_distance(&self, n: u64) -> f64 {
        2.0 * cos_pow2n(&self.angle(), n)
    }

    /// Worst-case `D(ξ'_1, ξ) = 2s²` at the budget angle.
    pub fn worst_reservoir_distance(&self) -> f64 {
        2.0 * self.sin_eta_max * self.sin_eta_max
    }
}

fn n_bound(delta: f64) -> f64 {
    (delta / 2.0).ln() / (1.0 - delta / 2.0).ln()
}

pub fn budget_from_delta(delta: f64) -> Result<HomogenizationBudget> {
    if !(delta > 0.0 && delta < 2.0) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    let sin_eta_max = (delta / 2.0).sqrt();
    // Bounds within 1e-9 of an integer are rounding noise, not a fractional step.
    let n_delta = (n_bound(delta) - 1e-9).ceil().max(1.0) as u64;
    Ok(HomogenizationBudget {
        delta,
        eta_max: sin_eta_max.asin(),
        sin_eta_max,
        n_delta,
    })
}
