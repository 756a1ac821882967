//! Slot-level scheduling oracle.
//!
//! The closed-form DoF tuples all arise from concrete transmission schemes:
//! pilots at fading transitions, data in between, superposition data riding
//! on pilots that some receiver does not need, and alignment signaling across
//! staggered transitions. This module materializes those schemes as explicit
//! segment lists over a finite horizon and counts DoF-bearing symbols per
//! entity, so the formulas can be checked against an independent accounting
//! of every slot.
//!
//! Schedules are periodic with period `horizon`; coherence blocks are
//! therefore treated circularly (a block may wrap through slot 0).

mod bc_general;
mod bc_nested;
mod mac;
mod staggered;

pub use bc_general::schedule_bc_general;
pub use bc_nested::schedule_bc;
pub use mac::schedule_mac;
pub use staggered::{schedule_staggered, StaggeredMode};

use crate::model::{rat_u, BcConfig, MacConfig, Rat};
use crate::{Error, Result};

/// What a stretch of slots carries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SegmentKind {
    /// Known training symbols, one antenna per slot. `serves` lists the
    /// entities that refresh an estimate here.
    Pilot { antennas: u64, serves: Vec<usize> },
    /// Coherent data for one broadcast receiver.
    Data { entity: usize, spatial_dims: u64 },
    /// Superposition data for `rider`, sent where a pilot would otherwise be;
    /// entities faster than the rider treat it as their equivalent training.
    PsData {
        rider: usize,
        spatial_dims: u64,
        underlying: Box<SegmentKind>,
    },
    /// Blind-interference-alignment signaling: every 3 slots yield 2 symbols
    /// to each entity of the pair (only the aggregate is meaningful).
    BiaData { entities: (usize, usize) },
    /// Simultaneous coherent MAC transmission; each `(entity, dims)` share
    /// earns `dims` symbols per slot.
    MacData { shares: Vec<(usize, u64)> },
}

/// A contiguous run of slots with one kind of content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub start: u64,
    pub length: u64,
    pub kind: SegmentKind,
}

/// Which channel a schedule belongs to (and hence how entities map to
/// coherence blocks and antenna caps).
#[derive(Debug, Clone)]
pub enum Channel {
    Bc(BcConfig),
    Mac(MacConfig),
}

impl Channel {
    fn num_entities(&self) -> usize {
        match self {
            Channel::Bc(c) => c.num_receivers(),
            Channel::Mac(c) => c.num_transmitters(),
        }
    }

    fn coherence_time(&self, e: usize) -> u64 {
        match self {
            Channel::Bc(c) => c.coherence_time(e),
            Channel::Mac(c) => c.coherence_time(e),
        }
    }

    fn offset(&self, e: usize) -> u64 {
        match self {
            Channel::Bc(c) => c.receivers()[e].offset,
            Channel::Mac(_) => 0,
        }
    }

    fn pilot_antenna_cap(&self) -> u64 {
        match self {
            Channel::Bc(c) => c.tx_antennas(),
            Channel::Mac(c) => {
                let total: u64 = c.transmitters().iter().map(|t| t.tx_antennas).sum();
                c.rx_antennas().min(total)
            }
        }
    }

    /// Per-slot symbol cap for an entity's tally.
    fn tally_cap(&self, e: usize) -> u64 {
        match self {
            Channel::Bc(c) => c.tx_antennas().min(c.rx_antennas(e)),
            Channel::Mac(c) => c.rx_antennas().min(c.tx_antennas(e)),
        }
    }
}

/// A slot-level transmission plan over one period.
#[derive(Debug, Clone)]
pub struct Schedule {
    pub horizon: u64,
    pub segments: Vec<Segment>,
    pub channel: Channel,
}

/// Per-entity symbol tallies over a schedule's horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofCount {
    tallies: Vec<u64>,
    horizon: u64,
}

impl DofCount {
    pub fn tallies(&self) -> &[u64] {
        &self.tallies
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    /// Symbols per slot for entity `e`, as an exact rational.
    pub fn dof(&self, e: usize) -> Rat {
        rat_u(self.tallies[e]) / rat_u(self.horizon)
    }

    /// The whole tuple as rationals.
    pub fn dof_tuple(&self) -> Vec<Rat> {
        (0..self.tallies.len()).map(|e| self.dof(e)).collect()
    }
}

/// One circular coherence block of an entity.
#[derive(Debug, Clone, Copy)]
struct Block {
    /// Start slot in `[0, horizon)`; the block may wrap past the horizon.
    start: u64,
    length: u64,
}

impl Schedule {
    pub fn new(channel: Channel, horizon: u64, segments: Vec<Segment>) -> Result<Self> {
        let s = Self {
            horizon,
            segments,
            channel,
        };
        s.validate()?;
        Ok(s)
    }

    /// Coherence blocks of entity `e` intersecting the horizon. Block
    /// boundaries sit at `offset + k T`. When `T` divides the horizon the
    /// blocks are circular (the schedule is one period of a periodic
    /// pattern); otherwise they are clipped to the horizon.
    fn blocks_of(&self, e: usize) -> Vec<Block> {
        let t = self.channel.coherence_time(e);
        let o = self.channel.offset(e);
        let h = self.horizon;
        let mut out = Vec::new();
        if t <= h && h % t == 0 {
            for m in 0..h / t {
                out.push(Block {
                    start: o + m * t,
                    length: t,
                });
            }
        } else {
            let mut s = o as i64 - t as i64;
            while s < h as i64 {
                let b0 = s.max(0) as u64;
                let b1 = ((s + t as i64) as u64).min(h);
                if b1 > b0 {
                    out.push(Block {
                        start: b0,
                        length: b1 - b0,
                    });
                }
                s += t as i64;
            }
        }
        out
    }

    /// Circular overlap of `[start, start+len)` with a block.
    fn overlap(&self, start: u64, len: u64, b: &Block) -> u64 {
        let lin = |a0: u64, a1: u64, b0: u64, b1: u64| a1.min(b1).saturating_sub(a0.max(b0));
        let end = b.start + b.length;
        let mut o = lin(start, start + len, b.start, end.min(self.horizon));
        if end > self.horizon {
            o += lin(start, start + len, 0, end - self.horizon);
        }
        o
    }

    /// Tiling, antenna caps, estimability, and tally caps.
    pub fn validate(&self) -> Result<()> {
        // Segments must tile [0, horizon) exactly, in order, without overlap.
        let mut cursor = 0u64;
        for seg in &self.segments {
            if seg.start != cursor || seg.length == 0 {
                return Err(Error::OracleMismatch(format!(
                    "segments do not tile the horizon: expected start {cursor}, got {} (length {})",
                    seg.start, seg.length
                )));
            }
            cursor += seg.length;
        }
        if cursor != self.horizon {
            return Err(Error::OracleMismatch(format!(
                "segments cover {cursor} of {} slots",
                self.horizon
            )));
        }
        // Pilot widths can never exceed what the transmit side can sound.
        let cap = self.channel.pilot_antenna_cap();
        for seg in &self.segments {
            if let SegmentKind::Pilot { antennas, .. } = &seg.kind {
                if *antennas > cap {
                    return Err(Error::OracleMismatch(format!(
                        "pilot sounds {antennas} antennas, cap is {cap}"
                    )));
                }
            }
        }
        self.check_estimability()?;
        let count = self.count_unchecked();
        for e in 0..self.channel.num_entities() {
            let cap = self.channel.tally_cap(e);
            if count.tallies[e] > self.horizon * cap {
                return Err(Error::OracleMismatch(format!(
                    "entity {e} tallies {} symbols over {} slots, cap {cap}/slot",
                    count.tallies[e], self.horizon
                )));
            }
        }
        Ok(())
    }

    /// The channel-knowledge state check: in every coherence block of every
    /// entity, the slots it can train on (pilots, plus superposition layers
    /// ridden by strictly slower entities) must cover the spatial
    /// dimensionality it decodes there. Decoding may precede training within
    /// a block; receivers buffer.
    pub fn check_estimability(&self) -> Result<()> {
        // Broadcast pilots are observable by everyone; MAC pilots sound one
        // transmitter's antennas at a time, so an entity only counts pilot
        // segments explicitly serving it.
        let is_mac = matches!(self.channel, Channel::Mac(_));
        for e in 0..self.channel.num_entities() {
            let te = self.channel.coherence_time(e);
            for b in self.blocks_of(e) {
                let mut known = 0u64;
                let mut needed = 0u64;
                for seg in &self.segments {
                    let ov = self.overlap(seg.start, seg.length, &b);
                    if ov == 0 {
                        continue;
                    }
                    match &seg.kind {
                        SegmentKind::Pilot { serves, .. } => {
                            if !is_mac || serves.contains(&e) {
                                known += ov;
                            }
                        }
                        SegmentKind::PsData {
                            rider,
                            spatial_dims,
                            ..
                        } => {
                            if *rider == e {
                                needed = needed.max(*spatial_dims);
                            } else if self.channel.coherence_time(*rider) > te {
                                known += ov;
                            }
                        }
                        SegmentKind::Data {
                            entity,
                            spatial_dims,
                        } => {
                            if *entity == e {
                                needed = needed.max(*spatial_dims);
                            }
                        }
                        SegmentKind::BiaData { entities } => {
                            if entities.0 == e || entities.1 == e {
                                needed = needed.max(1);
                            }
                        }
                        SegmentKind::MacData { shares } => {
                            if let Some(&(_, dims)) = shares.iter().find(|(ent, _)| *ent == e) {
                                needed = needed.max(dims);
                            }
                        }
                    }
                }
                if known < needed {
                    return Err(Error::Estimability {
                        entity: e,
                        block_start: b.start as i64,
                        known,
                        needed,
                    });
                }
            }
        }
        Ok(())
    }

    fn count_unchecked(&self) -> DofCount {
        let k = self.channel.num_entities();
        let mut tallies = vec![0u64; k];
        let mut bia_slots: Vec<((usize, usize), u64)> = Vec::new();
        for seg in &self.segments {
            match &seg.kind {
                SegmentKind::Pilot { .. } => {}
                SegmentKind::Data {
                    entity,
                    spatial_dims,
                } => tallies[*entity] += spatial_dims * seg.length,
                SegmentKind::PsData {
                    rider,
                    spatial_dims,
                    ..
                } => tallies[*rider] += spatial_dims * seg.length,
                SegmentKind::BiaData { entities } => {
                    match bia_slots.iter_mut().find(|(p, _)| p == entities) {
                        Some((_, n)) => *n += seg.length,
                        None => bia_slots.push((*entities, seg.length)),
                    }
                }
                SegmentKind::MacData { shares } => {
                    for &(e, dims) in shares {
                        tallies[e] += dims * seg.length;
                    }
                }
            }
        }
        for ((a, b), slots) in bia_slots {
            // 3-slot alignment blocks yield 2 symbols per entity.
            debug_assert!(slots % 3 == 0, "BIA slot total must be a multiple of 3");
            tallies[a] += 2 * slots / 3;
            tallies[b] += 2 * slots / 3;
        }
        DofCount {
            tallies,
            horizon: self.horizon,
        }
    }

    /// Validates the schedule and tallies DoF-bearing symbols per entity.
    pub fn count(&self) -> Result<DofCount> {
        self.validate()?;
        Ok(self.count_unchecked())
    }

    /// One line per segment: `start,length,kind,entity,dims`.
    ///
    /// `entity` is the beneficiary (rider for superposition, `+`-joined pair
    /// or share list otherwise), `dims` the per-slot symbol count (antennas
    /// for pilots). Byte-stable for identical inputs.
    pub fn dump_csv(&self) -> String {
        let mut out = String::from("start,length,kind,entity,dims\n");
        for seg in &self.segments {
            let (kind, entity, dims) = match &seg.kind {
                SegmentKind::Pilot { antennas, serves } => {
                    ("pilot", join_ids(serves.iter().copied()), *antennas)
                }
                SegmentKind::Data {
                    entity,
                    spatial_dims,
                } => ("data", entity.to_string(), *spatial_dims),
                SegmentKind::PsData {
                    rider,
                    spatial_dims,
                    ..
                } => ("psdata", rider.to_string(), *spatial_dims),
                SegmentKind::BiaData { entities } => (
                    "biadata",
                    join_ids([entities.0, entities.1].into_iter()),
                    2,
                ),
                SegmentKind::MacData { shares } => (
                    "macdata",
                    join_ids(shares.iter().map(|(e, _)| *e)),
                    shares.iter().map(|(_, d)| d).sum(),
                ),
            };
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                seg.start, seg.length, kind, entity, dims
            ));
        }
        out
    }
}

fn join_ids(ids: impl Iterator<Item = usize>) -> String {
    let v: Vec<String> = ids.map(|i| i.to_string()).collect();
    if v.is_empty() {
        "-".to_string()
    } else {
        v.join("+")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{rat, OrderedSubset};

    #[test]
    fn estimability_trips_on_corrupted_pilot() {
        let cfg = BcConfig::aligned(1, &[(1, 2), (1, 4)]).unwrap();
        let sub = OrderedSubset::new(vec![0, 1]).unwrap();
        let (mut sched, _) = schedule_bc(&sub, &cfg, crate::bc_regions::PsVariant::D2).unwrap();
        sched.check_estimability().unwrap();
        // Replace the leading pilot with data: receiver 0 loses its training.
        let first = &mut sched.segments[0];
        assert!(matches!(first.kind, SegmentKind::Pilot { .. }));
        first.kind = SegmentKind::Data {
            entity: 0,
            spatial_dims: 1,
        };
        assert!(matches!(
            sched.check_estimability(),
            Err(Error::Estimability { entity: 0, .. })
        ));
    }

    #[test]
    fn tiling_violations_are_rejected() {
        let cfg = BcConfig::aligned(1, &[(1, 4)]).unwrap();
        let channel = Channel::Bc(cfg);
        // Gap at slot 2.
        let bad = Schedule::new(
            channel.clone(),
            4,
            vec![
                Segment {
                    start: 0,
                    length: 1,
                    kind: SegmentKind::Pilot {
                        antennas: 1,
                        serves: vec![0],
                    },
                },
                Segment {
                    start: 2,
                    length: 2,
                    kind: SegmentKind::Data {
                        entity: 0,
                        spatial_dims: 1,
                    },
                },
            ],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn dof_count_is_exact_rational() {
        let cfg = BcConfig::aligned(1, &[(1, 2), (1, 4)]).unwrap();
        let sub = OrderedSubset::new(vec![0, 1]).unwrap();
        let (_, count) = schedule_bc(&sub, &cfg, crate::bc_regions::PsVariant::D2).unwrap();
        assert_eq!(count.dof(0), rat(1, 2));
        assert_eq!(count.dof(1), rat(1, 4));
    }
}
