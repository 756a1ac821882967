//! Schedules for the staggered two-receiver configuration: `M = 2`, single
//! antenna receivers, and the slower link's transitions at the midpoint of
//! the faster link's blocks.
//!
//! The combined scheme opens with two mid-block pilots (which land on the
//! last and first slots of the slow receiver's blocks), runs alignment
//! signaling across the first one-and-a-half fast blocks, then switches to
//! superposition: a two-slot rider block that both refreshes receiver 1's
//! equivalent channel and carries two symbols for receiver 2, and plain
//! single-slot riders in the remaining blocks.

use super::{Channel, DofCount, Schedule, Segment, SegmentKind};
use crate::bc_regions::validate_staggered;
use crate::model::{BcConfig, BcReceiver, OrderedSubset};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StaggeredMode {
    /// Blind interference alignment combined with product superposition.
    BiaPs,
    /// Product superposition alone (pilot reuse, no alignment).
    PsOnly,
}

fn staggered_config(t1: u64, t2: u64) -> BcConfig {
    BcConfig::new(
        2,
        vec![
            BcReceiver {
                rx_antennas: 1,
                coherence_time: t1,
                offset: 0,
            },
            BcReceiver {
                rx_antennas: 1,
                coherence_time: t2,
                offset: t1 / 2,
            },
        ],
    )
    .expect("valid staggered configuration")
}

pub fn schedule_staggered(t1: u64, t2: u64, mode: StaggeredMode) -> Result<(Schedule, DofCount)> {
    validate_staggered(t1, t2)?;
    let cfg = staggered_config(t1, t2);
    if mode == StaggeredMode::PsOnly {
        let sub = OrderedSubset::new(vec![0, 1])?;
        return super::schedule_bc_general(&sub, &cfg);
    }

    let half = t1 / 2;
    let mut segments = Vec::new();
    let bia = SegmentKind::BiaData { entities: (0, 1) };
    let r1_data = SegmentKind::Data {
        entity: 0,
        spatial_dims: 1,
    };

    // First fast block: alignment around the two mid-block pilots.
    segments.push(Segment {
        start: 0,
        length: half - 1,
        kind: bia.clone(),
    });
    segments.push(Segment {
        start: half - 1,
        length: 2,
        kind: SegmentKind::Pilot {
            antennas: 2,
            serves: vec![0, 1],
        },
    });
    segments.push(Segment {
        start: half + 1,
        length: half - 1,
        kind: bia.clone(),
    });

    // Second fast block: alignment tail, then a two-slot rider that renews
    // receiver 1's equivalent estimate and pays receiver 2 two symbols.
    segments.push(Segment {
        start: t1,
        length: (t1 - 2) / 2,
        kind: bia,
    });
    segments.push(Segment {
        start: t1 + (t1 - 2) / 2,
        length: 2,
        kind: SegmentKind::PsData {
            rider: 1,
            spatial_dims: 1,
            underlying: Box::new(SegmentKind::Pilot {
                antennas: 1,
                serves: vec![0],
            }),
        },
    });
    segments.push(Segment {
        start: t1 + (t1 - 2) / 2 + 2,
        length: (t1 - 2) / 2,
        kind: r1_data.clone(),
    });

    // Remaining fast blocks: one rider slot, rest data for receiver 1.
    for k in 2..t2 / t1 {
        let a = k * t1;
        segments.push(Segment {
            start: a,
            length: 1,
            kind: SegmentKind::PsData {
                rider: 1,
                spatial_dims: 1,
                underlying: Box::new(SegmentKind::Pilot {
                    antennas: 1,
                    serves: vec![0],
                }),
            },
        });
        segments.push(Segment {
            start: a + 1,
            length: t1 - 1,
            kind: r1_data.clone(),
        });
    }

    let schedule = Schedule::new(Channel::Bc(cfg), t2, segments)?;
    let count = schedule.count()?;
    Ok((schedule, count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bc_regions::staggered_pairs;

    #[test]
    fn combined_counts() {
        let (_, count) = schedule_staggered(6, 12, StaggeredMode::BiaPs).unwrap();
        assert_eq!(count.tallies(), &[6, 6]);
        let (_, count) = schedule_staggered(6, 18, StaggeredMode::BiaPs).unwrap();
        assert_eq!(count.tallies(), &[11, 7]);
    }

    #[test]
    fn ps_only_counts() {
        let (_, count) = schedule_staggered(4, 8, StaggeredMode::PsOnly).unwrap();
        assert_eq!(count.tallies(), &[6, 1]);
    }

    #[test]
    fn counts_equal_closed_form_pairs() {
        for (t1, t2) in [(4u64, 8u64), (4, 16), (6, 12), (6, 18), (6, 24), (8, 16)] {
            let pairs = staggered_pairs(t1, t2).unwrap();
            let (_, bia) = schedule_staggered(t1, t2, StaggeredMode::BiaPs).unwrap();
            let (_, ps) = schedule_staggered(t1, t2, StaggeredMode::PsOnly).unwrap();
            for e in 0..2 {
                assert_eq!(bia.dof(e), pairs.bia_ps.coord(e).clone(), "bia {t1},{t2}");
                assert_eq!(ps.dof(e), pairs.ps_only.coord(e).clone(), "ps {t1},{t2}");
            }
        }
    }

    #[test]
    fn rejects_bad_geometry() {
        assert!(schedule_staggered(5, 10, StaggeredMode::BiaPs).is_err());
        assert!(schedule_staggered(6, 15, StaggeredMode::BiaPs).is_err());
    }
}
