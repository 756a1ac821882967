//! Broadcast-channel DoF formulas: the identical-coherence region, the two
//! families of product-superposition tuples and their hull, the
//! channel-enhancement outer bound, the arbitrary-coherence tuples, the
//! staggered BIA+superposition pairs, and the optimality-case classifier.

use crate::geometry::{extreme_points, Halfspace, RegionH, RegionV};
use crate::model::{inv, rat_u, BcConfig, DofPoint, OrderedSubset, Rat};
use crate::{Error, Result};
use num::{One, Zero};

/// Which of the two product-superposition tuple families to evaluate.
///
/// `D1` spends extra pilot width so every receiver can estimate the widest
/// channel it may need; `D2` restricts all training to the fastest receiver's
/// effective dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsVariant {
    D1,
    D2,
}

/// DoF region of a broadcast channel whose receivers share one coherence
/// time, with the full cost of channel estimation charged: a single face
///
/// `sum_i d_i / (N_i* (1 - N_i*/T)) <= 1`.
///
/// Entities with `N_i* = 0` (only possible at `T = 1`) are unserveable and
/// get pinned to zero instead of contributing a face term.
pub fn identical_region_noncoherent(cfg: &BcConfig, t: u64) -> Result<RegionH> {
    if cfg.receivers().iter().any(|r| r.coherence_time != t) {
        return Err(Error::Precondition(format!(
            "all receivers must share coherence time {t}"
        )));
    }
    let k = cfg.num_receivers();
    let mut halfspaces = Vec::new();
    let mut face = vec![Rat::zero(); k];
    let mut any_positive = false;
    for i in 0..k {
        let ns = cfg.nstar_of(i);
        if ns == 0 {
            halfspaces.push(axis_cap(k, i, Rat::zero())?);
        } else {
            // 1 / (N* (1 - N*/T))
            let denom = rat_u(ns) * (Rat::one() - rat_u(ns) / rat_u(t));
            face[i] = denom.recip();
            any_positive = true;
        }
    }
    if any_positive {
        halfspaces.push(Halfspace::new(face, Rat::one())?);
    }
    RegionH::new(k, halfspaces)
}

/// DoF region with *free* receiver-side channel knowledge and identical
/// coherence times: plain TDMA, `sum_i d_i / min{M, N_i} <= 1`.
pub fn identical_region_coherent(cfg: &BcConfig) -> Result<RegionH> {
    let t = cfg.coherence_time(0);
    if cfg.receivers().iter().any(|r| r.coherence_time != t) {
        return Err(Error::Precondition(
            "all receivers must share one coherence time".into(),
        ));
    }
    let k = cfg.num_receivers();
    let face: Vec<Rat> = (0..k)
        .map(|i| rat_u(cfg.tx_antennas().min(cfg.rx_antennas(i))).recip())
        .collect();
    RegionH::new(k, vec![Halfspace::new(face, Rat::one())?])
}

fn axis_cap(dim: usize, coord: usize, rhs: Rat) -> Result<Halfspace> {
    let mut c = vec![Rat::zero(); dim];
    c[coord] = Rat::one();
    Halfspace::new(c, rhs)
}

fn coherence_times(cfg: &BcConfig) -> Vec<u64> {
    cfg.receivers().iter().map(|r| r.coherence_time).collect()
}

/// Shared body of the two tuple families and the arbitrary-coherence tuple.
///
/// Members must be ordered ascending by coherence time. The fastest member
/// pays the training cost; every slower member rides otherwise-redundant
/// pilot blocks, once per transition *gap* between it and its predecessor in
/// the subset, which is where the telescoping `1/T_prev - 1/T_j` comes from.
fn ps_tuple(cfg: &BcConfig, members: &[usize], variant: PsVariant) -> Result<DofPoint> {
    let k = cfg.num_receivers();
    if members.is_empty() {
        return Ok(DofPoint::origin(k));
    }
    let jmin = members[0];
    let ns_min = cfg.nstar_of(jmin);
    let t_min = cfg.coherence_time(jmin);
    let mut coords = vec![Rat::zero(); k];

    // Head term for the fastest member.
    let mut head = Rat::one() - rat_u(ns_min) * inv(t_min);
    if variant == PsVariant::D1 {
        if let Some(&second) = members.get(1) {
            let n_max = members
                .iter()
                .map(|&j| cfg.rx_antennas(j))
                .max()
                .expect("nonempty");
            let wide = cfg.tx_antennas().min(n_max).min(t_min);
            head -= rat_u(wide - ns_min) * inv(cfg.coherence_time(second));
        }
        // Singleton sets follow the 1/T_(J+1) := 0 convention: no penalty.
    }
    coords[jmin] = rat_u(ns_min) * head;

    // Telescoping gains for the slower members.
    for w in members.windows(2) {
        let (prev, j) = (w[0], w[1]);
        let per_slot = match variant {
            PsVariant::D1 => cfg.tx_antennas().min(cfg.rx_antennas(j)).min(t_min),
            PsVariant::D2 => cfg.rx_antennas(j).min(ns_min),
        };
        let gap = inv(cfg.coherence_time(prev)) - inv(cfg.coherence_time(j));
        coords[j] = rat_u(ns_min) * rat_u(per_slot) * gap;
    }
    DofPoint::new(coords)
}

fn validated_members(sub: &OrderedSubset, cfg: &BcConfig) -> Result<Vec<usize>> {
    sub.validate_ascending(&coherence_times(cfg))?;
    Ok(sub.indices().to_vec())
}

/// First achievable tuple family (extended training): for the subset's
/// fastest member `j_min`,
///
/// `d = N*(1 - N*/T_jmin - (min{M, N_max, T_jmin} - N*)/T_second)`,
///
/// and for every slower member `j`,
///
/// `d_j = N*_jmin min{M, N_j, T_jmin} (1/T_prev - 1/T_j)`.
pub fn d1_tuple(sub: &OrderedSubset, cfg: &BcConfig) -> Result<DofPoint> {
    if !cfg.nested() {
        return Err(Error::Precondition(
            "integer-ratio aligned coherence times required".into(),
        ));
    }
    let members = validated_members(sub, cfg)?;
    ps_tuple(cfg, &members, PsVariant::D1)
}

/// Second achievable tuple family (short training): the fastest member keeps
/// its full single-receiver DoF `N*(1 - N*/T)` and slower members ride with
/// per-slot dimension `min{N_j, N*_jmin}`.
pub fn d2_tuple(sub: &OrderedSubset, cfg: &BcConfig) -> Result<DofPoint> {
    if !cfg.nested() {
        return Err(Error::Precondition(
            "integer-ratio aligned coherence times required".into(),
        ));
    }
    let members = validated_members(sub, cfg)?;
    ps_tuple(cfg, &members, PsVariant::D2)
}

/// The same tuple as [`d2_tuple`], achievable for *any* positive integer
/// coherence times and any transition offsets.
pub fn arbitrary_tuple(sub: &OrderedSubset, cfg: &BcConfig) -> Result<DofPoint> {
    let members = validated_members(sub, cfg)?;
    ps_tuple(cfg, &members, PsVariant::D2)
}

fn all_subsets_ascending(cfg: &BcConfig) -> Vec<Vec<usize>> {
    let times = coherence_times(cfg);
    let k = cfg.num_receivers();
    let mut subs = Vec::with_capacity(1 << k);
    for mask in 0u32..(1 << k) {
        let idx: Vec<usize> = (0..k).filter(|&i| mask & (1 << i) != 0).collect();
        let sub = OrderedSubset::ascending(idx, &times).expect("indices in range");
        subs.push(sub.indices().to_vec());
    }
    subs
}

/// Achievable region for aligned integer-ratio coherence times: the
/// downward-closed hull of both tuple families over every receiver subset.
pub fn achievable_region_bc(cfg: &BcConfig) -> Result<RegionV> {
    if !cfg.nested() {
        return Err(Error::Precondition(
            "integer-ratio aligned coherence times required".into(),
        ));
    }
    let mut tuples = Vec::new();
    for members in all_subsets_ascending(cfg) {
        tuples.push(ps_tuple(cfg, &members, PsVariant::D1)?);
        tuples.push(ps_tuple(cfg, &members, PsVariant::D2)?);
    }
    RegionV::new(cfg.num_receivers(), extreme_points(&tuples)?)
}

/// Achievable region for arbitrary coherence times (short-training tuples
/// only, which is all that survives without alignment).
pub fn achievable_region_bc_arbitrary(cfg: &BcConfig) -> Result<RegionV> {
    let mut tuples = Vec::new();
    for members in all_subsets_ascending(cfg) {
        tuples.push(ps_tuple(cfg, &members, PsVariant::D2)?);
    }
    RegionV::new(cfg.num_receivers(), extreme_points(&tuples)?)
}

/// Outer bound for aligned integer-ratio coherence times: one face per
/// nonempty subset,
///
/// `sum_{j in S} d_j / (N_j* (1 - N_j*/T_jmax)) <= 1`,
///
/// where `T_jmax` is the subset's longest coherence time (the enhanced
/// channel every member gets stretched to).
pub fn outer_region_bc(cfg: &BcConfig) -> Result<RegionH> {
    if !cfg.nested() {
        return Err(Error::Precondition(
            "integer-ratio aligned coherence times required".into(),
        ));
    }
    let k = cfg.num_receivers();
    let mut halfspaces = Vec::new();
    let mut seen_faces: Vec<Vec<Rat>> = Vec::new();
    for i in 0..k {
        if cfg.nstar_of(i) == 0 {
            halfspaces.push(axis_cap(k, i, Rat::zero())?);
        }
    }
    for members in all_subsets_ascending(cfg) {
        let served: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&j| cfg.nstar_of(j) > 0)
            .collect();
        if served.is_empty() {
            continue;
        }
        let t_max = served
            .iter()
            .map(|&j| cfg.coherence_time(j))
            .max()
            .expect("nonempty");
        let mut face = vec![Rat::zero(); k];
        for &j in &served {
            let ns = cfg.nstar_of(j);
            let denom = rat_u(ns) * (Rat::one() - rat_u(ns) / rat_u(t_max));
            face[j] = denom.recip();
        }
        if !seen_faces.contains(&face) {
            seen_faces.push(face.clone());
            halfspaces.push(Halfspace::new(face, Rat::one())?);
        }
    }
    RegionH::new(k, halfspaces)
}

/// DoF pairs for the staggered two-receiver configuration (`M = 2`,
/// `N_1 = N_2 = 1`, transitions of each link at the midpoint of the other's
/// block): blind interference alignment combined with product superposition,
/// and product superposition alone.
pub struct StaggeredPairs {
    pub bia_ps: DofPoint,
    pub ps_only: DofPoint,
}

pub fn staggered_pairs(t1: u64, t2: u64) -> Result<StaggeredPairs> {
    validate_staggered(t1, t2)?;
    let (t1r, t2r) = (rat_u(t1), rat_u(t2));
    let bia_ps = DofPoint::new(vec![
        Rat::one() - inv(t1) - inv(t2) - &t1r / (rat_u(2) * &t2r),
        &t1r / &t2r + inv(t1) - rat_u(2) * inv(t2),
    ])?;
    let ps_only = DofPoint::new(vec![Rat::one() - inv(t1), inv(t1) - inv(t2)])?;
    Ok(StaggeredPairs { bia_ps, ps_only })
}

pub(crate) fn validate_staggered(t1: u64, t2: u64) -> Result<()> {
    if t1 % 2 != 0 || t1 < 4 {
        return Err(Error::Precondition(format!(
            "staggering needs an even T1 >= 4, got {t1}"
        )));
    }
    if t2 % t1 != 0 || t2 / t1 < 2 {
        return Err(Error::Precondition(format!(
            "T2 must be an integer multiple >= 2 of T1, got {t2}/{t1}"
        )));
    }
    Ok(())
}

/// The four configurations where the inner and outer bounds are known to
/// meet, all under `T_j >= 2 max{M, N_j}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimalityCase {
    /// `M <= min_j N_j`: the transmitter is the bottleneck everywhere.
    FewerTx,
    /// All receivers have the same antenna count.
    EqualRx,
    /// Every other coherence time is at least `ratio` times the shortest
    /// (asymptotic case; only reported when a threshold is supplied).
    OneShortCoherence,
    /// All coherence times equal: TDMA territory.
    IdenticalT,
    None,
}

/// Default disparity threshold for [`OptimalityCase::OneShortCoherence`].
pub const ONE_SHORT_DEFAULT_RATIO: u64 = 64;

/// Classifies a configuration against the known-tight cases, in order.
/// Returns `None` when `T_j >= 2 max{M, N_j}` fails for some receiver, when
/// the coherence times are not integer-ratio aligned, or when no case
/// applies. `OneShortCoherence` is checked only if `short_ratio` is given.
pub fn optimality_case(cfg: &BcConfig, short_ratio: Option<u64>) -> OptimalityCase {
    let m = cfg.tx_antennas();
    let precondition = cfg
        .receivers()
        .iter()
        .all(|r| r.coherence_time >= 2 * m.max(r.rx_antennas));
    if !precondition || !cfg.nested() {
        return OptimalityCase::None;
    }
    if m <= cfg.receivers().iter().map(|r| r.rx_antennas).min().unwrap() {
        return OptimalityCase::FewerTx;
    }
    let n0 = cfg.rx_antennas(0);
    if cfg.receivers().iter().all(|r| r.rx_antennas == n0) {
        return OptimalityCase::EqualRx;
    }
    if let Some(ratio) = short_ratio {
        let order = cfg.coherence_order();
        let t1 = cfg.coherence_time(order[0]);
        if order.len() >= 2
            && order[1..]
                .iter()
                .all(|&j| cfg.coherence_time(j) >= ratio.saturating_mul(t1))
        {
            return OptimalityCase::OneShortCoherence;
        }
    }
    let t0 = cfg.coherence_time(0);
    if cfg.receivers().iter().all(|r| r.coherence_time == t0) {
        return OptimalityCase::IdenticalT;
    }
    OptimalityCase::None
}
