//! Finite-SNR product superposition for a two-receiver broadcast channel
//! with nested coherence times.
//!
//! Receiver 0 (short coherence) re-estimates an equivalent channel at the
//! head of every one of its blocks — a raw pilot in the first block, the
//! rider's superposition data afterwards — and decodes coherently. Receiver 1
//! (long coherence) holds one estimate for the whole superblock and decodes
//! the rider symbols carried on the pilot heads it does not need.

use super::cmatrix::log2_det_identity_plus;
use super::{effective_snr, mmse_estimate, run_scheme, FadingProcess, RatePoint, SimConfig};
use crate::bc_regions::PsVariant;
use crate::model::BcConfig;
use crate::{Error, Result};

pub fn simulate_bc_ps(
    cfg: &BcConfig,
    variant: PsVariant,
    sim: &SimConfig,
) -> Result<Vec<RatePoint>> {
    if cfg.num_receivers() != 2 {
        return Err(Error::Precondition(
            "the superposition simulator covers exactly two receivers".into(),
        ));
    }
    if !cfg.nested() {
        return Err(Error::Precondition(
            "integer-ratio aligned coherence times required".into(),
        ));
    }
    let order = cfg.coherence_order();
    let (fast, slow) = (order[0], order[1]);
    let t1 = cfg.coherence_time(fast);
    let t2 = cfg.coherence_time(slow);
    let ratio = t2 / t1;
    if ratio < 2 {
        return Err(Error::Precondition(
            "the slow receiver needs a strictly longer coherence time".into(),
        ));
    }
    let n_star = cfg.nstar_of(fast);
    if n_star == 0 {
        return Err(Error::Precondition("fast receiver cannot be trained".into()));
    }
    let m = cfg.tx_antennas();
    let n_fast = cfg.rx_antennas(fast) as usize;
    let n_slow = cfg.rx_antennas(slow) as usize;
    // Head width in the first block and rider stream count per pilot slot.
    let (head, rider_dims) = match variant {
        PsVariant::D1 => {
            let wide = m.min(cfg.rx_antennas(fast).max(cfg.rx_antennas(slow))).min(t1);
            (wide, m.min(cfg.rx_antennas(slow)).min(t1))
        }
        PsVariant::D2 => (n_star, cfg.rx_antennas(slow).min(n_star)),
    };

    let fast_clock = FadingProcess {
        entity: fast,
        coherence_time: t1,
        offset: 0,
    };
    let _ = fast_clock.block_index(0);

    let points = run_scheme(sim, 2, |rng, rho| {
        let rho_eff = effective_snr(rho);
        // Receiver 0: a fresh equivalent-channel estimate per fast block.
        let mut fast_bits = 0.0;
        for block in 0..ratio {
            let (_, est) = mmse_estimate(rng, n_fast, n_star as usize, rho);
            let per_slot = log2_det_identity_plus(rho_eff / n_star as f64, &est);
            let data_slots = if block == 0 { t1 - head } else { t1 - n_star };
            fast_bits += data_slots as f64 * per_slot;
        }
        // Receiver 1: one standing estimate, rider data on later heads.
        let (_, est) = mmse_estimate(rng, n_slow, rider_dims as usize, rho);
        let per_slot = log2_det_identity_plus(rho_eff / rider_dims as f64, &est);
        let slow_bits = ((ratio - 1) * n_star) as f64 * per_slot;
        let mut rates = vec![0.0; 2];
        rates[fast] = fast_bits / t2 as f64;
        rates[slow] = slow_bits / t2 as f64;
        rates
    });
    Ok(points)
}
