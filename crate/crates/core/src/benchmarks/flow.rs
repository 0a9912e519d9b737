//! Synthetic flow-reactor task: temperature and two reagent flow rates, with
//! flow-rate constraints, a reagent-cost objective, and an analytic yield
//! stand-in.
//!
//! The yield proxy is not a chemistry model. It is a smooth surface chosen
//! to exercise the constrained two-objective pipeline: unimodal in
//! temperature (peak at 125 C), penalizing flow ratios away from 1, and
//! saturating in total flow. A yield of 0.9 is reachable only at moderate
//! total flow, so reducing cost after meeting the yield target is a real
//! trade-off.

use crate::domain::ParamVector;
use crate::error::{Error, Result};

/// $/L of the C60 solution and of the sultine solution.
const C60_PRICE: f64 = 168.8;
const SULTINE_PRICE: f64 = 2.674;

pub(super) fn native(x: &ParamVector) -> [f64; 3] {
    [100.0 + 50.0 * x[0], 200.0 * x[1], 200.0 * x[2]]
}

/// `10 < F_C + F_S < 310`, `F_C < 2 F_S` and `F_S < 2 F_C` (uL/min).
pub fn flow_reactor_feasible(f_c: f64, f_s: f64) -> bool {
    let total = f_c + f_s;
    10.0 < total && total < 310.0 && f_c < 2.0 * f_s && f_s < 2.0 * f_c
}

/// Reagent cost in $/min for flow rates in uL/min.
pub fn flow_cost(f_c: f64, f_s: f64) -> f64 {
    (f_c * C60_PRICE + f_s * SULTINE_PRICE) / 1e6
}

pub fn flow_yield_proxy(temperature: f64, f_c: f64, f_s: f64) -> f64 {
    let dt = (temperature - 125.0) / 25.0;
    let log_ratio = (f_c / f_s).ln();
    let y = 0.99 - 0.25 * dt * dt - 0.5 * log_ratio * log_ratio - 0.8 * (-(f_c + f_s) / 40.0).exp();
    y.clamp(0.0, 1.0)
}

/// `(yield_proxy, cost)` for native inputs (C, uL/min, uL/min).
pub fn eval_flow_reactor(temperature: f64, f_c: f64, f_s: f64) -> Result<(f64, f64)> {
    if !(100.0..=150.0).contains(&temperature)
        || !(0.0..=200.0).contains(&f_c)
        || !(0.0..=200.0).contains(&f_s)
    {
        return Err(Error::Feasibility(format!(
            "flow reactor input out of range: T={temperature}, F_C={f_c}, F_S={f_s}"
        )));
    }
    if !flow_reactor_feasible(f_c, f_s) {
        return Err(Error::Feasibility(format!(
            "flow rates violate the reactor constraints: F_C={f_c}, F_S={f_s}"
        )));
    }
    Ok((flow_yield_proxy(temperature, f_c, f_s), flow_cost(f_c, f_s)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cost_arithmetic() {
        let (_, cost) = eval_flow_reactor(120.0, 100.0, 100.0).unwrap();
        assert!((cost - 0.0171474).abs() < 1e-12);
    }

    #[test]
    fn constraint_examples() {
        assert!(matches!(
            eval_flow_reactor(120.0, 0.0, 0.0),
            Err(Error::Feasibility(_))
        ));
        assert!(matches!(
            eval_flow_reactor(120.0, 200.0, 50.0),
            Err(Error::Feasibility(_))
        ));
        assert!(matches!(
            eval_flow_reactor(120.0, 40.0, 100.0),
            Err(Error::Feasibility(_))
        ));
        assert!(matches!(
            eval_flow_reactor(160.0, 50.0, 50.0),
            Err(Error::Feasibility(_))
        ));
    }

    #[test]
    fn yield_shape() {
        let best = flow_yield_proxy(125.0, 150.0, 150.0);
        assert!(best > 0.9);
        assert!(flow_yield_proxy(100.0, 150.0, 150.0) < best);
        assert!(flow_yield_proxy(125.0, 20.0, 20.0) < 0.9);
        assert!(flow_yield_proxy(125.0, 180.0, 100.0) < best);
        // Saturating in total flow.
        let a = flow_yield_proxy(125.0, 60.0, 60.0);
        let b = flow_yield_proxy(125.0, 120.0, 120.0);
        assert!(a < b && b - a < 0.1);
    }
}
