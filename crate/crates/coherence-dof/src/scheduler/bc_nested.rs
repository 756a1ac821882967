//! Schedules for aligned integer-ratio broadcast configurations.
//!
//! Over a horizon of one longest-member coherence block, every fastest-member
//! block opens with a pilot head. A head at time `t` is ridden by the fastest
//! subset member `j` whose own channel did not just change (`t % T_j != 0`)
//! but whose predecessor's did (`t % T_prev == 0`); heads at the slowest
//! member's transitions stay raw. Riders' superposition data doubles as the
//! equivalent-channel training of every faster member, which is what lets
//! the fastest member keep estimating without extra cost.

use super::{Channel, DofCount, Schedule, Segment, SegmentKind};
use crate::bc_regions::PsVariant;
use crate::model::{BcConfig, OrderedSubset};
use crate::{Error, Result};

pub fn schedule_bc(
    sub: &OrderedSubset,
    cfg: &BcConfig,
    variant: PsVariant,
) -> Result<(Schedule, DofCount)> {
    if !cfg.nested() {
        return Err(Error::Precondition(
            "integer-ratio aligned coherence times required".into(),
        ));
    }
    let times: Vec<u64> = cfg.receivers().iter().map(|r| r.coherence_time).collect();
    sub.validate_ascending(&times)?;
    let members = sub.indices();
    if members.is_empty() {
        return Err(Error::Config("subset must be nonempty".into()));
    }
    let jmin = members[0];
    let n_star = cfg.nstar_of(jmin);
    if n_star == 0 {
        return Err(Error::Precondition(format!(
            "receiver {jmin} has T = 1 and cannot be trained"
        )));
    }
    let t_first = cfg.coherence_time(jmin);
    let horizon = cfg.coherence_time(*members.last().expect("nonempty"));
    let t_second = members.get(1).map(|&j| cfg.coherence_time(j));
    let n_max = members
        .iter()
        .map(|&j| cfg.rx_antennas(j))
        .max()
        .expect("nonempty");
    let wide = cfg.tx_antennas().min(n_max).min(t_first);

    let mut segments = Vec::new();
    for interval in 0..horizon / t_first {
        let a = interval * t_first;
        // Deepest member whose block starts here; nesting makes the
        // transitioning members a prefix of the subset order.
        let depth = (0..members.len())
            .rev()
            .find(|&p| a % cfg.coherence_time(members[p]) == 0)
            .expect("the fastest member transitions at every head");
        let rider = members.get(depth + 1).copied();

        let extended =
            variant == PsVariant::D1 && matches!(t_second, Some(t2) if a % t2 == 0);
        let width = if extended { wide } else { n_star };

        let mut cursor = a;
        match rider {
            Some(r) => {
                let dims = match variant {
                    PsVariant::D1 => cfg.tx_antennas().min(cfg.rx_antennas(r)).min(t_first),
                    PsVariant::D2 => cfg.rx_antennas(r).min(n_star),
                };
                let faster: Vec<usize> = members[..=depth].to_vec();
                segments.push(Segment {
                    start: cursor,
                    length: n_star,
                    kind: SegmentKind::PsData {
                        rider: r,
                        spatial_dims: dims,
                        underlying: Box::new(SegmentKind::Pilot {
                            antennas: n_star,
                            serves: faster,
                        }),
                    },
                });
                cursor += n_star;
                if width > n_star {
                    segments.push(Segment {
                        start: cursor,
                        length: width - n_star,
                        kind: SegmentKind::Pilot {
                            antennas: width - n_star,
                            serves: members.to_vec(),
                        },
                    });
                    cursor += width - n_star;
                }
            }
            None => {
                segments.push(Segment {
                    start: cursor,
                    length: width,
                    kind: SegmentKind::Pilot {
                        antennas: width,
                        serves: members.to_vec(),
                    },
                });
                cursor += width;
            }
        }
        if cursor < a + t_first {
            segments.push(Segment {
                start: cursor,
                length: a + t_first - cursor,
                kind: SegmentKind::Data {
                    entity: jmin,
                    spatial_dims: n_star,
                },
            });
        }
    }

    let schedule = Schedule::new(Channel::Bc(cfg.clone()), horizon, segments)?;
    let count = schedule.count()?;
    Ok((schedule, count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bc_regions::{d1_tuple, d2_tuple};

    fn sub(cfg: &BcConfig, idx: &[usize]) -> OrderedSubset {
        let times: Vec<u64> = cfg.receivers().iter().map(|r| r.coherence_time).collect();
        OrderedSubset::ascending(idx.to_vec(), &times).unwrap()
    }

    #[test]
    fn fig2_counts() {
        let cfg = BcConfig::aligned(1, &[(1, 2), (1, 4)]).unwrap();
        let s = sub(&cfg, &[0, 1]);
        let (_, count) = schedule_bc(&s, &cfg, PsVariant::D2).unwrap();
        assert_eq!(count.tallies(), &[2, 1]);
        assert_eq!(count.horizon(), 4);
    }

    #[test]
    fn fig3_d1_counts() {
        let cfg = BcConfig::aligned(2, &[(1, 4), (3, 24)]).unwrap();
        let s = sub(&cfg, &[0, 1]);
        let (sched, count) = schedule_bc(&s, &cfg, PsVariant::D1).unwrap();
        assert_eq!(count.tallies(), &[17, 10]);
        assert_eq!(count.horizon(), 24);
        // The head of the horizon is the extended pilot (width 2).
        assert!(matches!(
            &sched.segments[0].kind,
            SegmentKind::Pilot { antennas: 2, .. }
        ));
    }

    #[test]
    fn singleton_is_pilot_plus_data() {
        let cfg = BcConfig::aligned(2, &[(1, 4), (3, 24)]).unwrap();
        for (k, t, want) in [(0usize, 4u64, 3u64), (1, 24, 44)] {
            let s = sub(&cfg, &[k]);
            let (_, count) = schedule_bc(&s, &cfg, PsVariant::D2).unwrap();
            assert_eq!(count.tallies()[k], want);
            assert_eq!(count.horizon(), t);
            // N* (T - N*) per block.
            let ns = cfg.nstar_of(k);
            assert_eq!(want, ns * (t - ns));
        }
    }

    #[test]
    fn counts_match_formulas_on_three_receivers() {
        let cfg = BcConfig::aligned(4, &[(1, 6), (2, 18), (3, 54)]).unwrap();
        for mask in 1u32..8 {
            let idx: Vec<usize> = (0..3).filter(|&i| mask & (1 << i) != 0).collect();
            let s = sub(&cfg, &idx);
            for variant in [PsVariant::D1, PsVariant::D2] {
                let (_, count) = schedule_bc(&s, &cfg, variant).unwrap();
                let formula = match variant {
                    PsVariant::D1 => d1_tuple(&s, &cfg).unwrap(),
                    PsVariant::D2 => d2_tuple(&s, &cfg).unwrap(),
                };
                for e in 0..3 {
                    assert_eq!(
                        count.dof(e),
                        formula.coord(e).clone(),
                        "subset {idx:?} variant {variant:?} entity {e}"
                    );
                }
            }
        }
    }

    #[test]
    fn rejects_unserveable_fastest_member() {
        let cfg = BcConfig::aligned(1, &[(1, 1), (1, 4)]).unwrap();
        let s = sub(&cfg, &[0, 1]);
        assert!(matches!(
            schedule_bc(&s, &cfg, PsVariant::D2),
            Err(Error::Precondition(_))
        ));
    }
}
