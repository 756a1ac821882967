//! Schedules for the multiple-access pilot scheme with nested (or identical)
//! coherence times.
//!
//! Each fastest-member block opens with pilots for every member whose fading
//! block starts there (nesting makes those members a prefix of the coherence
//! order), sent one transmitter antenna at a time; the rest of the block is
//! simultaneous coherent transmission in which member `j` moves `M'_j`
//! streams per slot.

use super::{Channel, DofCount, Schedule, Segment, SegmentKind};
use crate::model::{mprime_allocation, MacConfig, OrderedSubset};
use crate::{Error, Result};

pub fn schedule_mac(priority: &OrderedSubset, cfg: &MacConfig) -> Result<(Schedule, DofCount)> {
    if priority.is_empty() {
        return Err(Error::Config("subset must be nonempty".into()));
    }
    let n = cfg.rx_antennas();
    for &j in priority.indices() {
        if j >= cfg.num_transmitters() {
            return Err(Error::Config(format!("transmitter index {j} out of range")));
        }
        if cfg.coherence_time(j) < 2 * n {
            return Err(Error::Precondition(format!(
                "transmitter {j} has T = {} < 2N = {}",
                cfg.coherence_time(j),
                2 * n
            )));
        }
    }
    let mut order = priority.indices().to_vec();
    order.sort_by_key(|&j| (cfg.coherence_time(j), j));
    for w in order.windows(2) {
        let (a, b) = (cfg.coherence_time(w[0]), cfg.coherence_time(w[1]));
        if b % a != 0 {
            return Err(Error::Precondition(format!(
                "coherence times {a} and {b} are not integer multiples"
            )));
        }
    }

    let mprime = mprime_allocation(priority, cfg)?;
    let mut mprime_of = vec![0u64; cfg.num_transmitters()];
    for (&j, &mj) in priority.indices().iter().zip(&mprime) {
        mprime_of[j] = mj;
    }
    let shares: Vec<(usize, u64)> = order.iter().map(|&j| (j, mprime_of[j])).collect();

    let t_first = cfg.coherence_time(order[0]);
    let horizon = cfg.coherence_time(*order.last().expect("nonempty"));

    let mut segments = Vec::new();
    for interval in 0..horizon / t_first {
        let a = interval * t_first;
        let depth = (0..order.len())
            .rev()
            .find(|&m| a % cfg.coherence_time(order[m]) == 0)
            .expect("the fastest member transitions at every head");
        let pilot_cost: u64 = order[..=depth].iter().map(|&j| mprime_of[j]).sum();
        if pilot_cost >= t_first {
            return Err(Error::Precondition(format!(
                "pilot cost {pilot_cost} leaves no data slots in a {t_first}-slot block"
            )));
        }
        let mut cursor = a;
        for &j in &order[..=depth] {
            if mprime_of[j] == 0 {
                continue;
            }
            segments.push(Segment {
                start: cursor,
                length: mprime_of[j],
                kind: SegmentKind::Pilot {
                    antennas: mprime_of[j],
                    serves: vec![j],
                },
            });
            cursor += mprime_of[j];
        }
        segments.push(Segment {
            start: cursor,
            length: a + t_first - cursor,
            kind: SegmentKind::MacData {
                shares: shares.clone(),
            },
        });
    }

    let schedule = Schedule::new(Channel::Mac(cfg.clone()), horizon, segments)?;
    let count = schedule.count()?;
    Ok((schedule, count))
}
