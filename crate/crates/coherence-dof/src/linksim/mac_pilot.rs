//! Finite-SNR MAC pilot scheme at identical coherence times: each scheduled
//! transmitter sounds its allocated antennas one slot at a time, the receiver
//! forms a joint MMSE estimate and zero-forces the multiuser signal.

use super::cmatrix::{gram, invert};
use super::{effective_snr, mmse_estimate, run_scheme, RatePoint, SimConfig};
use crate::model::{mprime_allocation, MacConfig, OrderedSubset};
use crate::{Error, Result};

pub fn simulate_mac_pilot(
    cfg: &MacConfig,
    priority: &OrderedSubset,
    sim: &SimConfig,
) -> Result<Vec<RatePoint>> {
    if cfg.num_transmitters() > 2 {
        return Err(Error::Precondition(
            "the MAC simulator covers at most two transmitters".into(),
        ));
    }
    if !cfg.identical_coherence() {
        return Err(Error::Precondition("identical coherence times required".into()));
    }
    let t = cfg.coherence_time(0);
    let n = cfg.rx_antennas();
    if t < 2 * n {
        return Err(Error::Precondition(format!("T = {t} < 2N = {}", 2 * n)));
    }
    let mprime = mprime_allocation(priority, cfg)?;
    let total: u64 = mprime.iter().sum();
    if total == 0 {
        return Err(Error::Config("empty transmitter set".into()));
    }
    // Stream ownership, in pilot order.
    let mut owners: Vec<usize> = Vec::new();
    for (&j, &mj) in priority.indices().iter().zip(&mprime) {
        owners.extend(std::iter::repeat(j).take(mj as usize));
    }
    let data_frac = 1.0 - total as f64 / t as f64;
    let entities = cfg.num_transmitters();
    let n_rx = n as usize;
    let mprime_of = {
        let mut v = vec![0u64; entities];
        for (&j, &mj) in priority.indices().iter().zip(&mprime) {
            v[j] = mj;
        }
        v
    };

    let points = run_scheme(sim, entities, |rng, rho| {
        let (_, est) = mmse_estimate(rng, n_rx, total as usize, rho);
        let g = gram(&est);
        let ginv = invert(&g);
        let mut rates = vec![0.0; entities];
        for (s, &j) in owners.iter().enumerate() {
            // Post-zero-forcing SNR of stream s with per-stream power
            // rho/M'_j and the estimated-channel attenuation.
            let rho_j = effective_snr(rho) / mprime_of[j] as f64;
            let snr = rho_j / ginv[s][s].re.max(f64::MIN_POSITIVE);
            rates[j] += data_frac * (1.0 + snr).log2();
        }
        rates
    });
    Ok(points)
}
