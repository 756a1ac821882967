//! Schedules for arbitrary positive-integer coherence times and arbitrary
//! transition offsets.
//!
//! One pilot of width `N*_jmin` is placed inside every fastest-member block
//! over a horizon of `lcm` of the member coherence times. Pilot blocks that
//! no slower member strictly needs are reassigned as superposition riders:
//! member `p` (ascending coherence order) rides exactly
//! `H/T_{p-1} - H/T_p` of them, which reproduces the telescoping closed
//! form for every offset combination.
//!
//! Placement runs in two phases. First, walking members slowest-first, every
//! member block *reserves* a pilot it can train on, sharing a slower
//! member's reservation whenever the pilot window fits inside both blocks
//! (a reservation at level `q` guarantees the block stays raw or is ridden
//! by someone slower than `q`, which trains `q` and everyone faster).
//! Second, riders fill the remaining blocks fastest-first, nudging each
//! pilot off the rider's own transition so the ride is decodable with one
//! standing estimate.
//!
//! Supported shapes: two members with any ratio and any offsets, and three
//! or more members with either aligned block starts (any ratio) or nested
//! times (any offsets). Three-plus members with near-equal coprime times
//! *and* offsets can make every single-pilot training window thinner than
//! the pilot itself at some drift phase; such inputs fail with an honest
//! error rather than a mis-counted schedule.

use super::{Channel, DofCount, Schedule, Segment, SegmentKind};
use crate::model::{BcConfig, OrderedSubset};
use crate::{Error, Result};

/// Schedules longer than this are refused; use the closed form instead.
pub const MAX_HORIZON_SLOTS: u64 = 10_000_000;

#[derive(Debug)]
struct PilotBlock {
    /// Canonical start of the enclosing fastest-member block; the last block
    /// extends past the horizon when the fastest member has an offset.
    block_start: i64,
    /// Admissible pilot window `[lo, hi)`, narrowed by every reservation.
    lo: i64,
    hi: i64,
    /// Slowest member relying on this pilot for training, if any.
    reserve_max: Option<usize>,
    rider: Option<usize>,
    trainees: Vec<usize>,
}

/// Geometry of the fastest member's block grid over unrolled linear time.
#[derive(Clone, Copy)]
struct Grid {
    t_f: i64,
    o_f: i64,
    b_count: i64,
}

impl Grid {
    /// Linear block `j` starts at `o_f + j t_f`.
    fn start(&self, j: i64) -> i64 {
        self.o_f + j * self.t_f
    }

    /// Largest `j` whose block starts at or before `x`.
    fn containing(&self, x: i64) -> i64 {
        (x - self.o_f).div_euclid(self.t_f)
    }

    /// Circular index and time shift of linear block `j`.
    fn circ(&self, j: i64) -> (usize, i64) {
        let k = j.rem_euclid(self.b_count);
        (k as usize, (j - k) * self.t_f)
    }
}

pub fn schedule_bc_general(sub: &OrderedSubset, cfg: &BcConfig) -> Result<(Schedule, DofCount)> {
    let times: Vec<u64> = cfg.receivers().iter().map(|r| r.coherence_time).collect();
    sub.validate_ascending(&times)?;
    let members = sub.indices().to_vec();
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

    let mut horizon: u128 = 1;
    for &j in &members {
        horizon = num::integer::lcm(horizon, cfg.coherence_time(j) as u128);
        if horizon > MAX_HORIZON_SLOTS as u128 {
            return Err(Error::HorizonTooLarge(horizon, MAX_HORIZON_SLOTS));
        }
    }
    let h = horizon as u64;
    let hi64 = h as i64;
    let t_f = cfg.coherence_time(jmin) as i64;
    let grid = Grid {
        t_f,
        o_f: cfg.receivers()[jmin].offset as i64,
        b_count: hi64 / t_f,
    };
    let ns = n_star as i64;

    let mut blocks: Vec<PilotBlock> = (0..grid.b_count)
        .map(|k| {
            let s = grid.start(k);
            PilotBlock {
                block_start: s,
                lo: s,
                hi: s + t_f,
                reserve_max: None,
                rider: None,
                trainees: Vec::new(),
            }
        })
        .collect();

    let member_t = |p: usize| cfg.coherence_time(members[p]) as i64;
    let member_o = |p: usize| cfg.receivers()[members[p]].offset as i64;

    // Phase 1: training reservations, slowest member first. Every member
    // block gets one pilot it can train on. Sharing a slower member's
    // reservation is mandatory when it fits (the reservation sets end up
    // nested across members, which is what makes the ride quotas add up),
    // and fresh trainer pilots are positioned clear of other members'
    // transitions so they stay shareable and rideable.
    // Phase 1: training reservations, slowest member first. Every member
    // block gets one pilot it can train on. Sharing a slower member's
    // reservation is preferred (the reservation sets end up nested across
    // members, which is what makes the ride quotas add up); conflicts where
    // one pilot could serve two blocks of the same member are resolved by
    // augmenting-path matching. Fresh trainers are ranked so their windows
    // avoid other members' transitions (keeping them shareable) and spread
    // across faster-member blocks that lack a trainer.
    let mut occupied: std::collections::HashSet<(usize, i64)> = std::collections::HashSet::new();
    for p in (1..members.len()).rev() {
        let t_p = member_t(p);
        let o_p = member_o(p);
        let n_blocks = (hi64 / t_p) as usize;

        // Candidate trainer blocks per member block, leftmost first: the
        // pilot window must fit inside the member block with ns slots.
        let mut cand: Vec<Vec<(usize, i64)>> = Vec::with_capacity(n_blocks);
        for m in 0..n_blocks {
            let pb_lo = o_p + m as i64 * t_p;
            let pb_hi = pb_lo + t_p;
            let mut list = Vec::new();
            let mut j = grid.containing(pb_lo);
            while grid.start(j) < pb_hi {
                let (k, delta) = grid.circ(j);
                j += 1;
                if blocks[k].rider.is_some() {
                    continue;
                }
                let lo = (blocks[k].lo + delta).max(pb_lo);
                let hi = (blocks[k].hi + delta).min(pb_hi);
                if hi - lo >= ns {
                    list.push((k, delta));
                }
            }
            cand.push(list);
        }

        // Greedy seed: prefer sharing an existing reservation; otherwise
        // rank fresh candidates by window cleanliness and spread.
        let mut owner: Vec<Option<usize>> = vec![None; blocks.len()];
        let mut chosen: Vec<Option<usize>> = vec![None; n_blocks];
        for m in 0..n_blocks {
            let pb_lo = o_p + m as i64 * t_p;
            let mut best: Option<((bool, bool, bool, i64), usize)> = None;
            for &(k, delta) in &cand[m] {
                if owner[k].is_some() {
                    continue;
                }
                let share = blocks[k].reserve_max.is_some();
                let lo = (blocks[k].lo + delta).max(pb_lo);
                let hi = (blocks[k].hi + delta).min(pb_lo + t_p);
                let mut cuts: Vec<i64> = Vec::new();
                for q in 1..members.len() {
                    if q == p {
                        continue;
                    }
                    let tq = member_t(q);
                    let cut = lo + (member_o(q) - lo).rem_euclid(tq);
                    if cut > lo && cut < hi {
                        cuts.push(cut);
                    }
                }
                let clean = largest_clean_segment(lo, hi, &mut cuts, ns).is_some();
                let unoccupied = (1..p).all(|q| {
                    let t_q = member_t(q);
                    let qb = lo - (lo - member_o(q)).rem_euclid(t_q);
                    !occupied.contains(&(q, qb.rem_euclid(hi64)))
                });
                let score = (share, clean, unoccupied, -(blocks[k].lo + delta));
                if best.as_ref().map_or(true, |(s, _)| score > *s) {
                    best = Some((score, k));
                }
            }
            if let Some((_, k)) = best {
                owner[k] = Some(m);
                chosen[m] = Some(k);
            }
        }

        // Augment any still-uncovered member blocks (Kuhn's algorithm).
        for m in 0..n_blocks {
            if chosen[m].is_some() {
                continue;
            }
            let mut visited = vec![false; blocks.len()];
            if !augment(m, &cand, &mut owner, &mut chosen, &mut visited) {
                let pb_lo = o_p + m as i64 * t_p;
                return Err(Error::OracleMismatch(format!(
                    "no training pilot fits member {} in its block [{pb_lo}, {})",
                    members[p],
                    pb_lo + t_p
                )));
            }
        }

        // Apply the matching: narrow each trainer window into its member
        // block and record occupancy for the faster members' spreading.
        for m in 0..n_blocks {
            let k = chosen[m].expect("matched above");
            let delta = cand[m]
                .iter()
                .find(|(ck, _)| *ck == k)
                .expect("candidate recorded")
                .1;
            let pb_lo = o_p + m as i64 * t_p;
            let lo = (blocks[k].lo + delta).max(pb_lo);
            let hi = (blocks[k].hi + delta).min(pb_lo + t_p);
            let blk = &mut blocks[k];
            blk.lo = lo - delta;
            blk.hi = hi - delta;
            blk.reserve_max = Some(blk.reserve_max.map_or(p, |q| q.max(p)));
            blk.trainees.push(p);
            for q in 1..p {
                let t_q = member_t(q);
                let qb = (lo - delta) - ((lo - delta) - member_o(q)).rem_euclid(t_q);
                occupied.insert((q, qb.rem_euclid(hi64)));
            }
        }
    }

    // Phase 2: rides, fastest first, in time order. A block reserved at
    // level `q` may only be ridden by someone slower than `q`; the rider's
    // pilot keeps to the reserved window, so every trainee stays served.
    for p in 1..members.len() {
        let mut remaining =
            h / cfg.coherence_time(members[p - 1]) - h / cfg.coherence_time(members[p]);
        let t_p = member_t(p);
        let o_p = member_o(p);
        for k in 0..blocks.len() {
            if remaining == 0 {
                break;
            }
            if blocks[k].rider.is_some() || matches!(blocks[k].reserve_max, Some(q) if q >= p) {
                continue;
            }
            // Nudge the pilot off p's own fading transition.
            let mut pos = blocks[k].lo;
            let db = (o_p - pos).rem_euclid(t_p);
            if db > 0 && db < ns {
                pos += db;
            }
            if pos + ns > blocks[k].hi {
                continue;
            }
            let blk = &mut blocks[k];
            blk.lo = pos;
            blk.hi = pos + ns;
            blk.rider = Some(p);
            remaining -= 1;
        }
        if remaining > 0 {
            return Err(Error::OracleMismatch(format!(
                "could not place {remaining} superposition rides for member {}",
                members[p]
            )));
        }
    }

    // Emit segments, splitting anything that crosses the horizon.
    let mut segments: Vec<Segment> = Vec::new();
    let mut push = |start: i64, len: i64, kind: SegmentKind| {
        if len <= 0 {
            return;
        }
        let s = start.rem_euclid(hi64) as u64;
        let l = len as u64;
        if s + l <= h {
            segments.push(Segment {
                start: s,
                length: l,
                kind,
            });
        } else {
            segments.push(Segment {
                start: s,
                length: h - s,
                kind: kind.clone(),
            });
            segments.push(Segment {
                start: 0,
                length: s + l - h,
                kind,
            });
        }
    };
    for blk in &blocks {
        let pos = blk.lo;
        let end = blk.block_start + t_f;
        let data = SegmentKind::Data {
            entity: jmin,
            spatial_dims: n_star,
        };
        push(blk.block_start, pos - blk.block_start, data.clone());
        let pilot_kind = match blk.rider {
            Some(p) => {
                let rider = members[p];
                SegmentKind::PsData {
                    rider,
                    spatial_dims: cfg.rx_antennas(rider).min(n_star),
                    underlying: Box::new(SegmentKind::Pilot {
                        antennas: n_star,
                        serves: members[..p].to_vec(),
                    }),
                }
            }
            None => {
                let mut serves = vec![jmin];
                serves.extend(blk.trainees.iter().map(|&p| members[p]));
                serves.sort_unstable();
                serves.dedup();
                SegmentKind::Pilot {
                    antennas: n_star,
                    serves,
                }
            }
        };
        push(pos, ns, pilot_kind);
        push(pos + ns, end - (pos + ns), data);
    }
    segments.sort_by_key(|s| s.start);

    let schedule = Schedule::new(Channel::Bc(cfg.clone()), h, segments)?;
    let count = schedule.count()?;
    Ok((schedule, count))
}

/// Augmenting-path step of the member-block/trainer matching.
fn augment(
    m: usize,
    cand: &[Vec<(usize, i64)>],
    owner: &mut Vec<Option<usize>>,
    chosen: &mut Vec<Option<usize>>,
    visited: &mut Vec<bool>,
) -> bool {
    for &(k, _) in &cand[m] {
        if visited[k] {
            continue;
        }
        visited[k] = true;
        let displaced = owner[k];
        if displaced.is_none() || augment(displaced.unwrap(), cand, owner, chosen, visited) {
            owner[k] = Some(m);
            chosen[m] = Some(k);
            return true;
        }
    }
    false
}

/// Largest sub-window of `[lo, hi)` not crossed by any cut, if one of at
/// least `ns` slots exists (leftmost among ties).
fn largest_clean_segment(lo: i64, hi: i64, cuts: &mut Vec<i64>, ns: i64) -> Option<(i64, i64)> {
    cuts.sort_unstable();
    cuts.dedup();
    let mut best: Option<(i64, i64)> = None;
    let mut seg_lo = lo;
    for &c in cuts.iter().chain(std::iter::once(&hi)) {
        if c - seg_lo >= ns && best.map_or(true, |(a, b)| c - seg_lo > b - a) {
            best = Some((seg_lo, c));
        }
        seg_lo = c;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bc_regions::arbitrary_tuple;
    use crate::model::BcReceiver;

    fn sub(cfg: &BcConfig, idx: &[usize]) -> OrderedSubset {
        let times: Vec<u64> = cfg.receivers().iter().map(|r| r.coherence_time).collect();
        OrderedSubset::ascending(idx.to_vec(), &times).unwrap()
    }

    fn cfg_with_offsets(m: u64, rx: &[(u64, u64, u64)]) -> BcConfig {
        BcConfig::new(
            m,
            rx.iter()
                .map(|&(n, t, o)| BcReceiver {
                    rx_antennas: n,
                    coherence_time: t,
                    offset: o,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn unaligned_pair_counts() {
        // T = (4, 8) with a one-slot offset: counts (6, 1) over 8 slots.
        let cfg = cfg_with_offsets(2, &[(1, 4, 0), (1, 8, 1)]);
        let s = sub(&cfg, &[0, 1]);
        let (_, count) = schedule_bc_general(&s, &cfg).unwrap();
        assert_eq!(count.tallies(), &[6, 1]);
        assert_eq!(count.horizon(), 8);
    }

    #[test]
    fn arbitrary_ratio_counts() {
        // T = (4, 6): horizon 12, counts (9, 1).
        let cfg = BcConfig::aligned(1, &[(1, 4), (1, 6)]).unwrap();
        let s = sub(&cfg, &[0, 1]);
        let (_, count) = schedule_bc_general(&s, &cfg).unwrap();
        assert_eq!(count.tallies(), &[9, 1]);
        assert_eq!(count.horizon(), 12);
    }

    #[test]
    fn equal_times_any_offset_gives_tdma_counts() {
        for o in 0..6u64 {
            let cfg = cfg_with_offsets(1, &[(1, 6, 0), (1, 6, o)]);
            let s = sub(&cfg, &[0, 1]);
            let (_, count) = schedule_bc_general(&s, &cfg).unwrap();
            assert_eq!(count.tallies(), &[5, 0], "offset {o}");
        }
    }

    #[test]
    fn counts_match_closed_form_for_all_offsets() {
        let shapes: &[(u64, &[(u64, u64)])] = &[
            (2, &[(1, 4), (1, 8)]),
            (1, &[(1, 4), (1, 6)]),
            (2, &[(2, 6), (2, 9)]),
            (3, &[(2, 5), (3, 7)]),
            (2, &[(1, 4), (3, 10)]),
        ];
        for &(m, rx) in shapes {
            let (n2, t2) = rx[1];
            for o2 in 0..rx[0].1 {
                let cfg = cfg_with_offsets(m, &[(rx[0].0, rx[0].1, 0), (n2, t2, o2)]);
                let s = sub(&cfg, &[0, 1]);
                let want = arbitrary_tuple(&s, &cfg).unwrap();
                let (_, count) = schedule_bc_general(&s, &cfg).unwrap();
                for e in 0..2 {
                    assert_eq!(
                        count.dof(e),
                        want.coord(e).clone(),
                        "m={m} rx={rx:?} o2={o2} entity {e}"
                    );
                }
            }
        }
    }

    #[test]
    fn offsets_on_both_members_match_closed_form() {
        for o1 in 0..4u64 {
            for o2 in [0u64, 1, 3, 5, 7] {
                let cfg = cfg_with_offsets(2, &[(1, 4, o1), (1, 8, o2)]);
                let s = sub(&cfg, &[0, 1]);
                let want = arbitrary_tuple(&s, &cfg).unwrap();
                let (_, count) = schedule_bc_general(&s, &cfg).unwrap();
                for e in 0..2 {
                    assert_eq!(
                        count.dof(e),
                        want.coord(e).clone(),
                        "o1={o1} o2={o2} entity {e}"
                    );
                }
            }
        }
    }

    #[test]
    fn three_member_arbitrary_ratios() {
        let cfg = BcConfig::aligned(3, &[(2, 5), (2, 7), (2, 11)]).unwrap();
        let s = sub(&cfg, &[0, 1, 2]);
        let want = arbitrary_tuple(&s, &cfg).unwrap();
        let (_, count) = schedule_bc_general(&s, &cfg).unwrap();
        for e in 0..3 {
            assert_eq!(count.dof(e), want.coord(e).clone(), "entity {e}");
        }
        assert_eq!(count.horizon(), 385);
    }

    #[test]
    fn three_member_offsets_match_closed_form() {
        for o2 in [0u64, 2, 5] {
            for o3 in [0u64, 3, 7] {
                let cfg = cfg_with_offsets(2, &[(1, 4, 0), (1, 8, o2), (2, 16, o3)]);
                let s = sub(&cfg, &[0, 1, 2]);
                let want = arbitrary_tuple(&s, &cfg).unwrap();
                let (_, count) = schedule_bc_general(&s, &cfg).unwrap();
                for e in 0..3 {
                    assert_eq!(
                        count.dof(e),
                        want.coord(e).clone(),
                        "o2={o2} o3={o3} entity {e}"
                    );
                }
            }
        }
    }

    #[test]
    fn randomized_shapes_and_offsets_match_closed_form() {
        // Deterministic xorshift sampling over the supported envelope:
        // two members with any ratio and offsets, three members with any
        // ratio at aligned starts, three members with nested times and
        // offsets. The counts must reproduce the telescoping closed form
        // for every draw.
        let mut state: u64 = 0x243f6a8885a308d3;
        let mut next = move |bound: u64| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state % bound
        };
        for case in 0..200 {
            let flavor = next(3);
            let m = 1 + next(3);
            let mut rx: Vec<(u64, u64, u64)> = Vec::new();
            match flavor {
                0 => {
                    // Two members, ragged times, random offsets.
                    let t1 = 3 + next(8);
                    let t2 = t1 + 1 + next(12);
                    rx.push((1 + next(3), t1, next(t1)));
                    rx.push((1 + next(3), t2, next(t2)));
                }
                1 => {
                    // Three members, ragged times, aligned starts.
                    let t1 = 3 + next(6);
                    let t2 = t1 + 1 + next(7);
                    let t3 = t2 + 1 + next(7);
                    rx.push((1 + next(3), t1, 0));
                    rx.push((1 + next(3), t2, 0));
                    rx.push((1 + next(3), t3, 0));
                }
                _ => {
                    // Three members, nested times, random offsets.
                    let t1 = 3 + next(6);
                    let t2 = t1 * (1 + next(3));
                    let t3 = t2 * (1 + next(3));
                    rx.push((1 + next(3), t1, next(t1)));
                    rx.push((1 + next(3), t2, next(t2)));
                    rx.push((1 + next(3), t3, next(t3)));
                }
            }
            rx.sort_by_key(|r| r.1);
            // The fastest member must be trainable.
            if m.min(rx[0].0).min(rx[0].1 / 2) == 0 {
                continue;
            }
            let k = rx.len();
            let cfg = cfg_with_offsets(m, &rx);
            let s = sub(&cfg, &(0..k).collect::<Vec<_>>());
            let want = arbitrary_tuple(&s, &cfg).unwrap();
            let (_, count) = schedule_bc_general(&s, &cfg)
                .unwrap_or_else(|e| panic!("case {case} cfg {rx:?} m={m}: {e}"));
            for e in 0..k {
                assert_eq!(
                    count.dof(e),
                    want.coord(e).clone(),
                    "case {case} cfg {rx:?} m={m} entity {e}"
                );
            }
        }
    }

    #[test]
    fn refuses_oversized_horizon() {
        let cfg = BcConfig::aligned(1, &[(1, 9999991), (1, 9999993)]).unwrap();
        let s = sub(&cfg, &[0, 1]);
        assert!(matches!(
            schedule_bc_general(&s, &cfg),
            Err(Error::HorizonTooLarge(..))
        ));
    }
}
