//! Pilot-based point-to-point baseline: train `N*` antennas, then send data
//! through the estimated channel for the rest of the block.

use super::cmatrix::log2_det_identity_plus;
use super::{effective_snr, mmse_estimate, run_scheme, RatePoint, SimConfig};
use crate::model::nstar;
use crate::{Error, Result};

pub fn simulate_p2p(
    tx_antennas: u64,
    rx_antennas: u64,
    coherence_time: u64,
    sim: &SimConfig,
) -> Result<Vec<RatePoint>> {
    if coherence_time < 2 {
        return Err(Error::Precondition(
            "point-to-point training needs T >= 2".into(),
        ));
    }
    let ns = nstar(tx_antennas, rx_antennas, coherence_time);
    let data_frac = 1.0 - ns as f64 / coherence_time as f64;
    let points = run_scheme(sim, 1, |rng, rho| {
        let (_, est) = mmse_estimate(rng, rx_antennas as usize, ns as usize, rho);
        let per_slot = log2_det_identity_plus(effective_snr(rho) / ns as f64, &est);
        vec![data_frac * per_slot]
    });
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linksim::dof_slopes;

    #[test]
    fn siso_slope_near_dof() {
        // M = N = 1, T = 10: DoF 1 * (1 - 1/10) = 0.9.
        let sim = SimConfig::new(vec![40.0, 60.0], 4000, 11).unwrap();
        let pts = simulate_p2p(1, 1, 10, &sim).unwrap();
        let slope = dof_slopes(&pts).unwrap()[0];
        assert!((slope - 0.9).abs() < 0.1, "slope {slope}");
    }

    #[test]
    fn mimo_slope_near_dof() {
        // M = N = 2, T = 4: DoF 2 (1 - 2/4) = 1.
        let sim = SimConfig::new(vec![40.0, 60.0], 4000, 12).unwrap();
        let pts = simulate_p2p(2, 2, 4, &sim).unwrap();
        let slope = dof_slopes(&pts).unwrap()[0];
        assert!((slope - 1.0).abs() < 0.12, "slope {slope}");
    }

    #[test]
    fn rates_monotone_in_snr() {
        let sim = SimConfig::new(vec![0.0, 10.0, 20.0, 30.0], 2000, 5).unwrap();
        let pts = simulate_p2p(2, 1, 8, &sim).unwrap();
        for w in pts.windows(2) {
            let slack = 3.0 * (w[0].stderrs[0] + w[1].stderrs[0]);
            assert!(w[1].rates[0] + slack >= w[0].rates[0]);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let sim = SimConfig::new(vec![10.0, 20.0], 500, 99).unwrap();
        let a = simulate_p2p(2, 2, 8, &sim).unwrap();
        let b = simulate_p2p(2, 2, 8, &sim).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_degenerate_coherence() {
        let sim = SimConfig::new(vec![10.0], 10, 1).unwrap();
        assert!(simulate_p2p(1, 1, 1, &sim).is_err());
    }
}
