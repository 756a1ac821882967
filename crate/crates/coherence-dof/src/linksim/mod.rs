//! Monte-Carlo finite-SNR link simulator.
//!
//! Rayleigh block fading, pilot-based MMSE channel estimation, and the
//! standard worst-case-Gaussian achievable-rate lower bound for schemes that
//! decode through an estimated channel: a data slot carrying `s` streams at
//! effective SNR `rho_eff` contributes `log2 det(I + rho_eff/s H_hat H_hat^H)`
//! bits, with `rho_eff = rho (1 - sigma_e^2) / (1 + rho sigma_e^2)` and
//! per-coefficient estimation error `sigma_e^2 = 1/(1+rho)`.
//!
//! Everything is driven by a master seed; each (SNR point, trial) pair gets
//! its own counter-derived substream and trials are reduced in index order,
//! so results are bit-identical regardless of parallelism.

mod bc_ps;
mod cmatrix;
mod mac_pilot;
mod p2p;

pub use bc_ps::simulate_bc_ps;
pub use mac_pilot::simulate_mac_pilot;
pub use p2p::simulate_p2p;

use crate::{Error, Result};
use cmatrix::{cn_matrix, CMat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

/// Monte-Carlo run parameters. SNR points must be strictly increasing; the
/// last two are used for slope estimation.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub snr_points_db: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(snr_points_db: Vec<f64>, trials: u64, seed: u64) -> Result<Self> {
        if snr_points_db.is_empty() || trials == 0 {
            return Err(Error::Config("need at least one SNR point and one trial".into()));
        }
        if snr_points_db.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("SNR points must be strictly increasing".into()));
        }
        Ok(Self {
            snr_points_db,
            trials,
            seed,
        })
    }
}

/// Mean rates (bits per slot) with standard errors at one SNR point.
#[derive(Debug, Clone, PartialEq)]
pub struct RatePoint {
    pub snr_db: f64,
    pub rates: Vec<f64>,
    pub stderrs: Vec<f64>,
    pub trials: u64,
}

/// Block-fading clock of one entity: a fresh channel draw every
/// `coherence_time` slots, boundaries at `offset + k T`.
#[derive(Debug, Clone, Copy)]
pub struct FadingProcess {
    pub entity: usize,
    pub coherence_time: u64,
    pub offset: u64,
}

impl FadingProcess {
    /// Index of the fading block containing `slot`.
    pub fn block_index(&self, slot: u64) -> u64 {
        (slot + self.coherence_time - self.offset % self.coherence_time) / self.coherence_time
    }
}

/// Per-coefficient MMSE error variance of a unit-power pilot at SNR `rho`.
pub fn mmse_error_var(rho: f64) -> f64 {
    1.0 / (1.0 + rho)
}

/// Effective post-estimation SNR of the worst-case-Gaussian bound.
pub fn effective_snr(rho: f64) -> f64 {
    let e = mmse_error_var(rho);
    rho * (1.0 - e) / (1.0 + rho * e)
}

/// Draws a true channel and its MMSE estimate from a one-antenna-per-slot
/// pilot at SNR `rho`. Estimate coefficients are CN(0, 1 - sigma_e^2) and the
/// error is independent CN(0, sigma_e^2).
pub fn mmse_estimate<R: Rng>(rng: &mut R, rows: usize, cols: usize, rho: f64) -> (CMat, CMat) {
    let h = cn_matrix(rng, rows, cols, 1.0);
    let z = cn_matrix(rng, rows, cols, 1.0);
    let s = rho.sqrt();
    let g = s / (1.0 + rho);
    let est = (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| (h[i][j] * s + z[i][j]) * g)
                .collect()
        })
        .collect();
    (h, est)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Deterministic substream for one (SNR point, trial) pair.
pub(crate) fn trial_rng(seed: u64, point: usize, trial: u64) -> ChaCha12Rng {
    let s = splitmix64(splitmix64(seed ^ (point as u64).wrapping_mul(0xa076_1d64_78bd_642f)) ^ trial);
    ChaCha12Rng::seed_from_u64(s)
}

/// Runs `trials` independent fading realizations at each SNR point and
/// reduces them in trial order.
pub(crate) fn run_scheme<F>(sim: &SimConfig, entities: usize, per_trial: F) -> Vec<RatePoint>
where
    F: Fn(&mut ChaCha12Rng, f64) -> Vec<f64> + Sync,
{
    sim.snr_points_db
        .iter()
        .enumerate()
        .map(|(pi, &db)| {
            let rho = 10f64.powf(db / 10.0);
            let samples: Vec<Vec<f64>> = (0..sim.trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = trial_rng(sim.seed, pi, t);
                    per_trial(&mut rng, rho)
                })
                .collect();
            let n = sim.trials as f64;
            let mut rates = vec![0.0; entities];
            for s in &samples {
                for (acc, v) in rates.iter_mut().zip(s) {
                    *acc += v;
                }
            }
            for r in rates.iter_mut() {
                *r /= n;
            }
            let mut sq = vec![0.0; entities];
            for s in &samples {
                for ((acc, v), mean) in sq.iter_mut().zip(s).zip(&rates) {
                    *acc += (v - mean) * (v - mean);
                }
            }
            let stderrs = sq
                .iter()
                .map(|&v| if sim.trials > 1 { (v / (n * (n - 1.0))).sqrt() } else { 0.0 })
                .collect();
            RatePoint {
                snr_db: db,
                rates,
                stderrs,
                trials: sim.trials,
            }
        })
        .collect()
}

/// DoF slope estimate per entity from the two largest SNR points:
/// `(R(rho2) - R(rho1)) / (log2 rho2 - log2 rho1)`.
pub fn dof_slopes(points: &[RatePoint]) -> Result<Vec<f64>> {
    if points.len() < 2 {
        return Err(Error::Config("slope estimation needs two SNR points".into()));
    }
    let hi = &points[points.len() - 1];
    let lo = &points[points.len() - 2];
    // log2(rho2/rho1) = (dB difference)/10 * log2(10).
    let denom = (hi.snr_db - lo.snr_db) / 10.0 * 10f64.log2();
    Ok(hi
        .rates
        .iter()
        .zip(&lo.rates)
        .map(|(a, b)| (a - b) / denom)
        .collect())
}

/// CSV block `scheme,entity,snr_db,rate_bps,stderr,trials,seed`, one line per
/// entity per SNR point.
pub fn rate_points_csv(scheme: &str, points: &[RatePoint], seed: u64) -> String {
    let mut out = String::from("scheme,entity,snr_db,rate_bps,stderr,trials,seed\n");
    for p in points {
        for (e, (r, s)) in p.rates.iter().zip(&p.stderrs).enumerate() {
            out.push_str(&format!(
                "{scheme},{e},{},{:.10},{:.10},{},{seed}\n",
                p.snr_db, r, s, p.trials
            ));
        }
    }
    out
}
