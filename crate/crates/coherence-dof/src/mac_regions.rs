//! Multiple-access DoF formulas: pilot-based achievable tuples for identical
//! and nested coherence times, and the cooperative (enhanced-channel) outer
//! bounds.

use crate::geometry::{extreme_points, Halfspace, RegionH, RegionV};
use crate::model::{inv, mprime_allocation, rat_u, DofPoint, MacConfig, OrderedSubset, Rat};
use crate::{Error, Result};
use num::{One, Signed, Zero};

fn check_t_at_least_2n(cfg: &MacConfig, members: &[usize]) -> Result<()> {
    let n = cfg.rx_antennas();
    for &j in members {
        if cfg.coherence_time(j) < 2 * n {
            return Err(Error::Precondition(format!(
                "transmitter {j} has T = {} < 2N = {}",
                cfg.coherence_time(j),
                2 * n
            )));
        }
    }
    Ok(())
}

fn members_in_coherence_order(cfg: &MacConfig, members: &[usize]) -> Vec<usize> {
    let mut order = members.to_vec();
    order.sort_by_key(|&j| (cfg.coherence_time(j), j));
    order
}

fn check_nested_members(cfg: &MacConfig, members: &[usize]) -> Result<()> {
    let order = members_in_coherence_order(cfg, members);
    for w in order.windows(2) {
        let (a, b) = (cfg.coherence_time(w[0]), cfg.coherence_time(w[1]));
        if b % a != 0 {
            return Err(Error::Precondition(format!(
                "coherence times {a} and {b} are not integer multiples"
            )));
        }
    }
    Ok(())
}

/// Tuple achieved by the identical-coherence pilot scheme: every member `j`
/// in the priority-ordered set gets `d_j = M'_j (1 - sum M' / T)`.
pub fn mac_identical_tuple(
    priority: &OrderedSubset,
    cfg: &MacConfig,
    t: u64,
) -> Result<DofPoint> {
    if cfg.transmitters().iter().any(|x| x.coherence_time != t) {
        return Err(Error::Config(format!(
            "all transmitters must have coherence time {t}"
        )));
    }
    if t < 2 * cfg.rx_antennas() {
        return Err(Error::Precondition(format!(
            "T = {t} < 2N = {}",
            2 * cfg.rx_antennas()
        )));
    }
    let mprime = mprime_allocation(priority, cfg)?;
    let total: u64 = mprime.iter().sum();
    let share = Rat::one() - rat_u(total) * inv(t);
    let mut coords = vec![Rat::zero(); cfg.num_transmitters()];
    for (&j, &mj) in priority.indices().iter().zip(&mprime) {
        coords[j] = rat_u(mj) * share.clone();
    }
    DofPoint::new(coords)
}

/// Cooperative outer bound at identical coherence time `T`: one face per
/// nonempty subset,
///
/// `sum_{j in S} d_j <= min{N, sum M_j} (1 - min{N, sum M_j}/T)`.
pub fn mac_identical_outer(cfg: &MacConfig, t: u64) -> Result<RegionH> {
    if cfg.transmitters().iter().any(|x| x.coherence_time != t) {
        return Err(Error::Config(format!(
            "all transmitters must have coherence time {t}"
        )));
    }
    cooperative_outer(cfg, |_members| t)
}

/// Outer bound for nested coherence times: the enhanced channel stretches
/// every member of a subset to the subset's *longest* coherence time.
pub fn mac_hetero_outer(cfg: &MacConfig) -> Result<RegionH> {
    if !cfg.nested() {
        return Err(Error::Precondition(
            "integer-ratio coherence times required".into(),
        ));
    }
    cooperative_outer(cfg, |members| {
        members
            .iter()
            .map(|&j| cfg.coherence_time(j))
            .max()
            .expect("nonempty subset")
    })
}

fn cooperative_outer(cfg: &MacConfig, t_of: impl Fn(&[usize]) -> u64) -> Result<RegionH> {
    let k = cfg.num_transmitters();
    let n = cfg.rx_antennas();
    let mut halfspaces = Vec::new();
    for mask in 1u32..(1 << k) {
        let members: Vec<usize> = (0..k).filter(|&i| mask & (1 << i) != 0).collect();
        let m_sum: u64 = members.iter().map(|&j| cfg.tx_antennas(j)).sum();
        let b = n.min(m_sum);
        let t = t_of(&members);
        let mut rhs = rat_u(b) * (Rat::one() - rat_u(b) * inv(t));
        if rhs.is_negative() {
            // Outside the theorems' sensible range (T < spatial dimension);
            // the bound degenerates to zero.
            rhs = Rat::zero();
        }
        let mut coeffs = vec![Rat::zero(); k];
        for &j in &members {
            coeffs[j] = Rat::one();
        }
        halfspaces.push(Halfspace::new(coeffs, rhs)?);
    }
    RegionH::new(k, halfspaces)
}

/// Tuple achieved by the nested-coherence pilot scheme. The antenna budget
/// `M'` is split in *priority* order; the pilot/data accounting runs in
/// *coherence* order `i_1..i_J` (fastest first):
///
/// `d_j = M'_j sum_m (T_{i_1} - sum_{n<=m} M'_{i_n}) (1/T_{i_m} - 1/T_{i_{m+1}})`
///
/// with `1/T_{i_{J+1}} := 0`.
pub fn mac_hetero_tuple(priority: &OrderedSubset, cfg: &MacConfig) -> Result<DofPoint> {
    for &j in priority.indices() {
        if j >= cfg.num_transmitters() {
            return Err(Error::Config(format!("transmitter index {j} out of range")));
        }
    }
    if priority.is_empty() {
        return Ok(DofPoint::origin(cfg.num_transmitters()));
    }
    check_nested_members(cfg, priority.indices())?;
    check_t_at_least_2n(cfg, priority.indices())?;

    let mprime = mprime_allocation(priority, cfg)?;
    let mut mprime_of = vec![0u64; cfg.num_transmitters()];
    for (&j, &mj) in priority.indices().iter().zip(&mprime) {
        mprime_of[j] = mj;
    }

    let order = members_in_coherence_order(cfg, priority.indices());
    let t_first = cfg.coherence_time(order[0]);
    let mut share = Rat::zero();
    let mut pilot_cost = 0u64;
    for (m, &im) in order.iter().enumerate() {
        pilot_cost += mprime_of[im];
        let gap = if m + 1 < order.len() {
            inv(cfg.coherence_time(im)) - inv(cfg.coherence_time(order[m + 1]))
        } else {
            inv(cfg.coherence_time(im))
        };
        share += (rat_u(t_first) - rat_u(pilot_cost)) * gap;
    }

    let mut coords = vec![Rat::zero(); cfg.num_transmitters()];
    for &j in priority.indices() {
        coords[j] = rat_u(mprime_of[j]) * share.clone();
    }
    DofPoint::new(coords)
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Achievable MAC region: the downward-closed hull of the tuples over every
/// ordered subset (member subset x priority permutation).
pub fn achievable_region_mac(cfg: &MacConfig) -> Result<RegionV> {
    if !cfg.nested() {
        return Err(Error::Precondition(
            "identical or integer-ratio coherence times required".into(),
        ));
    }
    let k = cfg.num_transmitters();
    let identical = cfg.identical_coherence();
    let mut tuples = vec![DofPoint::origin(k)];
    for mask in 1u32..(1 << k) {
        let members: Vec<usize> = (0..k).filter(|&i| mask & (1 << i) != 0).collect();
        for perm in permutations(&members) {
            let priority = OrderedSubset::new(perm)?;
            let tup = if identical {
                mac_identical_tuple(&priority, cfg, cfg.coherence_time(0))?
            } else {
                mac_hetero_tuple(&priority, cfg)?
            };
            tuples.push(tup);
        }
    }
    RegionV::new(k, extreme_points(&tuples)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::hull_subset_of;
    use crate::model::rat;

    fn pt(coords: &[(i64, i64)]) -> DofPoint {
        DofPoint::new(coords.iter().map(|&(p, q)| rat(p, q)).collect()).unwrap()
    }

    fn prio(idx: &[usize]) -> OrderedSubset {
        OrderedSubset::new(idx.to_vec()).unwrap()
    }

    fn mac_identical_cfg() -> MacConfig {
        MacConfig::from_pairs(4, &[(3, 10), (2, 10)]).unwrap()
    }

    fn mac_hetero_cfg() -> MacConfig {
        MacConfig::from_pairs(4, &[(2, 8), (4, 32)]).unwrap()
    }

    #[test]
    fn identical_tuple_examples() {
        let cfg = mac_identical_cfg();
        assert_eq!(
            mac_identical_tuple(&prio(&[0, 1]), &cfg, 10).unwrap(),
            pt(&[(18, 10), (6, 10)])
        );
        assert_eq!(
            mac_identical_tuple(&prio(&[1, 0]), &cfg, 10).unwrap(),
            pt(&[(12, 10), (12, 10)])
        );
        assert_eq!(
            mac_identical_tuple(&prio(&[1]), &cfg, 10).unwrap(),
            pt(&[(0, 1), (16, 10)])
        );
        // T < 2N violates the theorem precondition.
        let tight = MacConfig::from_pairs(2, &[(1, 3), (1, 3)]).unwrap();
        assert!(matches!(
            mac_identical_tuple(&prio(&[0, 1]), &tight, 3),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn identical_outer_examples() {
        let h = mac_identical_outer(&mac_identical_cfg(), 10).unwrap();
        let faces: Vec<(Vec<Rat>, Rat)> = h
            .halfspaces()
            .iter()
            .map(|f| (f.coeffs().to_vec(), f.rhs().clone()))
            .collect();
        assert!(faces.contains(&(vec![rat(1, 1), rat(0, 1)], rat(21, 10))));
        assert!(faces.contains(&(vec![rat(0, 1), rat(1, 1)], rat(16, 10))));
        assert!(faces.contains(&(vec![rat(1, 1), rat(1, 1)], rat(24, 10))));
        assert_eq!(faces.len(), 3);

        // Fig. 11 config: the sum bound is 3 * 7/10.
        let cfg = MacConfig::from_pairs(3, &[(4, 10), (2, 10)]).unwrap();
        let h = mac_identical_outer(&cfg, 10).unwrap();
        assert_eq!(h.max_sum().unwrap(), rat(21, 10));

        // Single transmitter: point-to-point bound.
        let cfg = MacConfig::from_pairs(4, &[(3, 10)]).unwrap();
        let h = mac_identical_outer(&cfg, 10).unwrap();
        assert_eq!(h.max_sum().unwrap(), rat(21, 10));
    }

    #[test]
    fn hetero_tuple_examples() {
        let cfg = mac_hetero_cfg();
        assert_eq!(
            mac_hetero_tuple(&prio(&[0, 1]), &cfg).unwrap(),
            pt(&[(11, 8), (11, 8)])
        );
        // Reversed priority starves transmitter 0 entirely.
        assert_eq!(
            mac_hetero_tuple(&prio(&[1, 0]), &cfg).unwrap(),
            pt(&[(0, 1), (7, 2)])
        );
        let cfg = MacConfig::from_pairs(4, &[(3, 8), (2, 24)]).unwrap();
        assert_eq!(
            mac_hetero_tuple(&prio(&[0, 1]), &cfg).unwrap(),
            pt(&[(42, 24), (14, 24)])
        );
    }

    #[test]
    fn hetero_tuple_preconditions() {
        let bad_ratio = MacConfig::from_pairs(2, &[(1, 6), (1, 8)]).unwrap();
        assert!(matches!(
            mac_hetero_tuple(&prio(&[0, 1]), &bad_ratio),
            Err(Error::Precondition(_))
        ));
        let short_t = MacConfig::from_pairs(4, &[(2, 6), (4, 24)]).unwrap();
        assert!(matches!(
            mac_hetero_tuple(&prio(&[0, 1]), &short_t),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn hetero_outer_examples() {
        let h = mac_hetero_outer(&mac_hetero_cfg()).unwrap();
        let faces: Vec<(Vec<Rat>, Rat)> = h
            .halfspaces()
            .iter()
            .map(|f| (f.coeffs().to_vec(), f.rhs().clone()))
            .collect();
        assert!(faces.contains(&(vec![rat(1, 1), rat(0, 1)], rat(3, 2))));
        assert!(faces.contains(&(vec![rat(0, 1), rat(1, 1)], rat(7, 2))));
        assert!(faces.contains(&(vec![rat(1, 1), rat(1, 1)], rat(7, 2))));

        let cfg = MacConfig::from_pairs(4, &[(3, 8), (2, 24)]).unwrap();
        let h = mac_hetero_outer(&cfg).unwrap();
        assert_eq!(h.max_sum().unwrap(), rat(10, 3));

        let single = MacConfig::from_pairs(4, &[(3, 10)]).unwrap();
        let h = mac_hetero_outer(&single).unwrap();
        assert_eq!(h.max_sum().unwrap(), rat(21, 10));
    }

    #[test]
    fn achievable_region_examples() {
        let v = achievable_region_mac(&mac_identical_cfg()).unwrap();
        assert_eq!(
            v.generators(),
            &[
                pt(&[(0, 1), (16, 10)]),
                pt(&[(12, 10), (12, 10)]),
                pt(&[(18, 10), (6, 10)]),
                pt(&[(21, 10), (0, 1)]),
            ]
        );

        let v = achievable_region_mac(&mac_hetero_cfg()).unwrap();
        for want in [
            pt(&[(3, 2), (0, 1)]),
            pt(&[(0, 1), (7, 2)]),
            pt(&[(11, 8), (11, 8)]),
        ] {
            assert!(v.generators().contains(&want), "missing {want}");
        }

        let single = MacConfig::from_pairs(4, &[(3, 10)]).unwrap();
        let v = achievable_region_mac(&single).unwrap();
        assert_eq!(v.generators(), &[pt(&[(21, 10)])]);
    }

    #[test]
    fn sum_dof_tight_at_identical_t() {
        for n in 2..=4u64 {
            for m1 in 1..=4u64 {
                for m2 in 1..=4u64 {
                    for t in [2 * n, 2 * n + 2, 24] {
                        let cfg = MacConfig::from_pairs(n, &[(m1, t), (m2, t)]).unwrap();
                        let ach = achievable_region_mac(&cfg).unwrap();
                        let outer = mac_identical_outer(&cfg, t).unwrap();
                        let b = n.min(m1 + m2);
                        let want = rat_u(b) * (Rat::one() - rat_u(b) * inv(t));
                        assert_eq!(ach.max_sum(), want, "cfg {cfg:?}");
                        assert_eq!(outer.max_sum().unwrap(), want, "cfg {cfg:?}");
                        assert!(hull_subset_of(&ach, &outer).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn inner_inside_outer_on_nested_grid() {
        for n in 2..=4u64 {
            for m1 in 1..=4u64 {
                for m2 in 1..=4u64 {
                    for ratio in [2u64, 3] {
                        let t1 = 2 * n;
                        let cfg = MacConfig::from_pairs(n, &[(m1, t1), (m2, t1 * ratio)]).unwrap();
                        let ach = achievable_region_mac(&cfg).unwrap();
                        let outer = mac_hetero_outer(&cfg).unwrap();
                        assert!(hull_subset_of(&ach, &outer).unwrap(), "cfg {cfg:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn hetero_reduces_to_identical_at_equal_t() {
        for n in 2..=4u64 {
            for m1 in 1..=3u64 {
                for m2 in 1..=3u64 {
                    let t = 2 * n + 2;
                    let cfg = MacConfig::from_pairs(n, &[(m1, t), (m2, t)]).unwrap();
                    for p in [vec![0usize, 1], vec![1, 0], vec![0], vec![1]] {
                        let priority = prio(&p);
                        assert_eq!(
                            mac_hetero_tuple(&priority, &cfg).unwrap(),
                            mac_identical_tuple(&priority, &cfg, t).unwrap(),
                            "n={n} m=({m1},{m2}) p={p:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn priority_permutation_preserves_budget_total() {
        let cfg = MacConfig::from_pairs(5, &[(2, 12), (3, 12), (4, 12)]).unwrap();
        let mut totals = std::collections::HashSet::new();
        for perm in permutations(&[0, 1, 2]) {
            let mp = mprime_allocation(&prio(&perm), &cfg).unwrap();
            totals.insert(mp.iter().sum::<u64>());
        }
        assert_eq!(totals.len(), 1);
        assert!(totals.contains(&5));
    }
}
