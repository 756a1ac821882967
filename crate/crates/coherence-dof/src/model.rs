//! Core domain types: exact scalars, channel configurations, DoF tuples and
//! ordered entity subsets.

use crate::{Error, Result};
use num::{BigInt, BigRational, One, Signed, Zero};

/// Exact rational scalar used for all region arithmetic.
///
/// `num::BigRational` keeps values canonical (reduced, positive denominator)
/// after every operation, and its big-integer components absorb horizons as
/// large as products of coherence times without overflow.
pub type Rat = BigRational;

/// Rational from an integer numerator/denominator pair.
pub fn rat(num: i64, den: i64) -> Rat {
    assert!(den != 0, "zero denominator");
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Rational from an unsigned integer.
pub fn rat_u(n: u64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Canonical `p/q` rendering, always with an explicit denominator.
pub fn fmt_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` (or a bare integer `p`).
pub fn parse_rat(s: &str) -> Result<Rat> {
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Config(format!("bad rational component {t:?}")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::Config(format!("zero denominator in {s:?}")));
            }
            Ok(Rat::new(parse_int(p)?, den))
        }
        None => Ok(Rat::from_integer(parse_int(s)?)),
    }
}

/// A DoF tuple: one nonnegative rational coordinate per receiver/transmitter,
/// in symbols per slot per log-SNR.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DofPoint {
    coords: Vec<Rat>,
}

impl DofPoint {
    pub fn new(coords: Vec<Rat>) -> Result<Self> {
        if coords.iter().any(|c| c.is_negative()) {
            return Err(Error::Config("DoF coordinates must be nonnegative".into()));
        }
        Ok(Self { coords })
    }

    pub fn origin(dim: usize) -> Self {
        Self {
            coords: vec![Rat::zero(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &Rat {
        &self.coords[i]
    }

    pub fn sum(&self) -> Rat {
        self.coords.iter().fold(Rat::zero(), |a, c| a + c)
    }

    pub fn is_origin(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Componentwise `self <= other`.
    pub fn dominated_by(&self, other: &DofPoint) -> bool {
        self.dim() == other.dim()
            && self
                .coords
                .iter()
                .zip(&other.coords)
                .all(|(a, b)| a <= b)
    }
}

impl std::fmt::Display for DofPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(fmt_rat).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// One broadcast receiver: antenna count, coherence time in slots, and the
/// offset of its fading transitions (block boundaries at `offset + k T`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BcReceiver {
    pub rx_antennas: u64,
    pub coherence_time: u64,
    pub offset: u64,
}

/// Broadcast-channel configuration: one transmitter, `K` receivers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BcConfig {
    tx_antennas: u64,
    receivers: Vec<BcReceiver>,
}

impl BcConfig {
    pub fn new(tx_antennas: u64, receivers: Vec<BcReceiver>) -> Result<Self> {
        if tx_antennas == 0 {
            return Err(Error::Config("transmitter needs at least one antenna".into()));
        }
        if receivers.is_empty() {
            return Err(Error::Config("at least one receiver required".into()));
        }
        for (k, r) in receivers.iter().enumerate() {
            if r.rx_antennas == 0 || r.coherence_time == 0 {
                return Err(Error::Config(format!(
                    "receiver {k}: antenna count and coherence time must be positive"
                )));
            }
            if r.offset >= r.coherence_time {
                return Err(Error::Config(format!(
                    "receiver {k}: offset {} must be < coherence time {}",
                    r.offset, r.coherence_time
                )));
            }
        }
        Ok(Self {
            tx_antennas,
            receivers,
        })
    }

    /// Convenience constructor for aligned receivers (all offsets zero).
    pub fn aligned(tx_antennas: u64, rx: &[(u64, u64)]) -> Result<Self> {
        Self::new(
            tx_antennas,
            rx.iter()
                .map(|&(n, t)| BcReceiver {
                    rx_antennas: n,
                    coherence_time: t,
                    offset: 0,
                })
                .collect(),
        )
    }

    pub fn tx_antennas(&self) -> u64 {
        self.tx_antennas
    }

    pub fn receivers(&self) -> &[BcReceiver] {
        &self.receivers
    }

    pub fn num_receivers(&self) -> usize {
        self.receivers.len()
    }

    pub fn rx_antennas(&self, k: usize) -> u64 {
        self.receivers[k].rx_antennas
    }

    pub fn coherence_time(&self, k: usize) -> u64 {
        self.receivers[k].coherence_time
    }

    /// Effective spatial dimension `min{M, N_k, floor(T_k/2)}` of receiver `k`.
    pub fn nstar_of(&self, k: usize) -> u64 {
        nstar(
            self.tx_antennas,
            self.receivers[k].rx_antennas,
            self.receivers[k].coherence_time,
        )
    }

    /// True iff, after sorting ascending by coherence time, every consecutive
    /// ratio is an integer and all offsets are zero.
    pub fn nested(&self) -> bool {
        if self.receivers.iter().any(|r| r.offset != 0) {
            return false;
        }
        let mut times: Vec<u64> = self.receivers.iter().map(|r| r.coherence_time).collect();
        times.sort_unstable();
        times.windows(2).all(|w| w[1] % w[0] == 0)
    }

    /// Receiver indices sorted ascending by coherence time, ties by index.
    pub fn coherence_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.receivers.len()).collect();
        idx.sort_by_key(|&k| (self.receivers[k].coherence_time, k));
        idx
    }
}

/// One MAC transmitter: antenna count and coherence time in slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MacTransmitter {
    pub tx_antennas: u64,
    pub coherence_time: u64,
}

/// Multiple-access configuration: `K` transmitters, one receiver.
///
/// The MAC theorems additionally require `T_k >= 2N` for every transmitter;
/// that is checked by the operations that depend on it, not at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacConfig {
    rx_antennas: u64,
    transmitters: Vec<MacTransmitter>,
}

impl MacConfig {
    pub fn new(rx_antennas: u64, transmitters: Vec<MacTransmitter>) -> Result<Self> {
        if rx_antennas == 0 {
            return Err(Error::Config("receiver needs at least one antenna".into()));
        }
        if transmitters.is_empty() {
            return Err(Error::Config("at least one transmitter required".into()));
        }
        for (k, t) in transmitters.iter().enumerate() {
            if t.tx_antennas == 0 || t.coherence_time == 0 {
                return Err(Error::Config(format!(
                    "transmitter {k}: antenna count and coherence time must be positive"
                )));
            }
        }
        Ok(Self {
            rx_antennas,
            transmitters,
        })
    }

    /// Convenience constructor from `(M_k, T_k)` pairs.
    pub fn from_pairs(rx_antennas: u64, tx: &[(u64, u64)]) -> Result<Self> {
        Self::new(
            rx_antennas,
            tx.iter()
                .map(|&(m, t)| MacTransmitter {
                    tx_antennas: m,
                    coherence_time: t,
                })
                .collect(),
        )
    }

    pub fn rx_antennas(&self) -> u64 {
        self.rx_antennas
    }

    pub fn transmitters(&self) -> &[MacTransmitter] {
        &self.transmitters
    }

    pub fn num_transmitters(&self) -> usize {
        self.transmitters.len()
    }

    pub fn tx_antennas(&self, k: usize) -> u64 {
        self.transmitters[k].tx_antennas
    }

    pub fn coherence_time(&self, k: usize) -> u64 {
        self.transmitters[k].coherence_time
    }

    /// All `T_k` equal.
    pub fn identical_coherence(&self) -> bool {
        self.transmitters
            .windows(2)
            .all(|w| w[0].coherence_time == w[1].coherence_time)
    }

    /// Coherence times are integer multiples of each other along the sorted order.
    pub fn nested(&self) -> bool {
        let mut times: Vec<u64> = self.transmitters.iter().map(|t| t.coherence_time).collect();
        times.sort_unstable();
        times.windows(2).all(|w| w[1] % w[0] == 0)
    }

    /// Transmitter indices sorted ascending by coherence time, ties by index.
    pub fn coherence_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.transmitters.len()).collect();
        idx.sort_by_key(|&k| (self.transmitters[k].coherence_time, k));
        idx
    }
}

/// A duplicate-free, explicitly ordered subset of entity indices.
///
/// Broadcast operations require the order to be ascending by coherence time
/// (shortest first); MAC operations interpret the order as the antenna-budget
/// priority and derive the coherence order from the configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedSubset {
    indices: Vec<usize>,
}

impl OrderedSubset {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for &i in &indices {
            if !seen.insert(i) {
                return Err(Error::Config(format!("duplicate entity index {i}")));
            }
        }
        Ok(Self { indices })
    }

    /// Subset sorted ascending by the given per-entity coherence times,
    /// ties broken by index.
    pub fn ascending(mut indices: Vec<usize>, times: &[u64]) -> Result<Self> {
        for &i in &indices {
            if i >= times.len() {
                return Err(Error::Config(format!("entity index {i} out of range")));
            }
        }
        indices.sort_by_key(|&i| (times[i], i));
        Self::new(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, k: usize) -> bool {
        self.indices.contains(&k)
    }

    /// Checks every index is valid for an entity count and the order is
    /// ascending by the supplied coherence times (ties by index).
    pub fn validate_ascending(&self, times: &[u64]) -> Result<()> {
        for &i in &self.indices {
            if i >= times.len() {
                return Err(Error::Config(format!("entity index {i} out of range")));
            }
        }
        let sorted = self
            .indices
            .windows(2)
            .all(|w| (times[w[0]], w[0]) < (times[w[1]], w[1]));
        if !sorted {
            return Err(Error::Config(
                "subset must be ordered ascending by coherence time".into(),
            ));
        }
        Ok(())
    }
}

/// Effective spatial dimension `min{M, N, floor(T/2)}` of a non-coherent link.
///
/// Returns 0 only for `T = 1`; such an entity cannot be trained and must be
/// treated as achieving zero DoF.
pub fn nstar(tx_antennas: u64, rx_antennas: u64, coherence_time: u64) -> u64 {
    tx_antennas.min(rx_antennas).min(coherence_time / 2)
}

/// Greedy antenna-budget split `M'_j = min{M_j, [N - sum of earlier M']+}`
/// among MAC transmitters taken in priority order.
///
/// The result is aligned with `priority.indices()`.
pub fn mprime_allocation(priority: &OrderedSubset, cfg: &MacConfig) -> Result<Vec<u64>> {
    let mut remaining = cfg.rx_antennas();
    let mut out = Vec::with_capacity(priority.len());
    for &j in priority.indices() {
        if j >= cfg.num_transmitters() {
            return Err(Error::Config(format!("transmitter index {j} out of range")));
        }
        let m = cfg.tx_antennas(j).min(remaining);
        remaining -= m;
        out.push(m);
    }
    Ok(out)
}

/// `1/T` as a rational.
pub fn inv(t: u64) -> Rat {
    Rat::new(BigInt::one(), BigInt::from(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_arithmetic_is_exact_and_canonical() {
        // (a/b + c/d) recanonicalized equals the exact fraction.
        let cases = [
            ((1i64, 6i64), (1i64, 3i64), (1i64, 2i64)),
            ((17, 24), (7, 24), (1, 1)),
            ((-1, 4), (3, 4), (1, 2)),
            ((5, 10), (0, 7), (1, 2)),
        ];
        for ((a, b), (c, d), (p, q)) in cases {
            let s = rat(a, b) + rat(c, d);
            assert_eq!(s, rat(p, q));
            assert_eq!(fmt_rat(&s), format!("{p}/{q}"));
        }
        // Canonical form: positive denominator, reduced.
        let r = Rat::new(BigInt::from(-4), BigInt::from(-6));
        assert_eq!(fmt_rat(&r), "2/3");
        assert_eq!(parse_rat("2/3").unwrap(), r);
        assert_eq!(parse_rat("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(parse_rat("5").unwrap(), rat(5, 1));
        assert!(parse_rat("1/0").is_err());
    }

    #[test]
    fn nstar_examples() {
        assert_eq!(nstar(1, 1, 2), 1);
        assert_eq!(nstar(2, 3, 24), 2);
        assert_eq!(nstar(5, 5, 4), 2);
        // T = 1 entities are unserveable.
        assert_eq!(nstar(3, 2, 1), 0);
    }

    #[test]
    fn nstar_floor_branch_inactive_when_t_at_least_2n() {
        for m in 1..=5u64 {
            for n in 1..=5u64 {
                for t in (2 * n)..(2 * n + 8) {
                    assert_eq!(nstar(m, n, t), m.min(n), "m={m} n={n} t={t}");
                }
            }
        }
    }

    #[test]
    fn mprime_examples() {
        let cfg = MacConfig::from_pairs(4, &[(3, 10), (2, 10)]).unwrap();
        let p12 = OrderedSubset::new(vec![0, 1]).unwrap();
        assert_eq!(mprime_allocation(&p12, &cfg).unwrap(), vec![3, 1]);
        let p21 = OrderedSubset::new(vec![1, 0]).unwrap();
        assert_eq!(mprime_allocation(&p21, &cfg).unwrap(), vec![2, 2]);
        let single = MacConfig::from_pairs(4, &[(3, 10)]).unwrap();
        let p1 = OrderedSubset::new(vec![0]).unwrap();
        assert_eq!(mprime_allocation(&p1, &single).unwrap(), vec![3]);
    }

    #[test]
    fn mprime_sums_to_min_of_budget_and_total() {
        // Greedy water-filling exhausts min{N, sum M_j} on every ordered set.
        for n in 1..=6u64 {
            for m1 in 1..=4u64 {
                for m2 in 1..=4u64 {
                    for m3 in 1..=4u64 {
                        let cfg =
                            MacConfig::from_pairs(n, &[(m1, 10), (m2, 10), (m3, 10)]).unwrap();
                        for perm in [
                            vec![0, 1, 2],
                            vec![0, 2, 1],
                            vec![1, 0, 2],
                            vec![1, 2, 0],
                            vec![2, 0, 1],
                            vec![2, 1, 0],
                        ] {
                            let sub = OrderedSubset::new(perm).unwrap();
                            let mp = mprime_allocation(&sub, &cfg).unwrap();
                            let total: u64 = mp.iter().sum();
                            assert_eq!(total, n.min(m1 + m2 + m3));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn nested_flag() {
        assert!(BcConfig::aligned(2, &[(1, 4), (3, 24)]).unwrap().nested());
        assert!(BcConfig::aligned(2, &[(3, 24), (1, 4)]).unwrap().nested());
        assert!(!BcConfig::aligned(1, &[(1, 4), (1, 6)]).unwrap().nested());
        // Equal times nest trivially.
        assert!(BcConfig::aligned(1, &[(1, 4), (1, 4)]).unwrap().nested());
        // Any nonzero offset breaks nesting.
        let cfg = BcConfig::new(
            2,
            vec![
                BcReceiver {
                    rx_antennas: 1,
                    coherence_time: 4,
                    offset: 0,
                },
                BcReceiver {
                    rx_antennas: 1,
                    coherence_time: 8,
                    offset: 1,
                },
            ],
        )
        .unwrap();
        assert!(!cfg.nested());
    }

    #[test]
    fn config_validation() {
        assert!(BcConfig::aligned(0, &[(1, 2)]).is_err());
        assert!(BcConfig::aligned(1, &[]).is_err());
        assert!(BcConfig::aligned(1, &[(0, 2)]).is_err());
        assert!(BcConfig::new(
            1,
            vec![BcReceiver {
                rx_antennas: 1,
                coherence_time: 4,
                offset: 4,
            }],
        )
        .is_err());
        assert!(MacConfig::from_pairs(0, &[(1, 2)]).is_err());
        assert!(MacConfig::from_pairs(1, &[(1, 0)]).is_err());
        assert!(OrderedSubset::new(vec![0, 1, 0]).is_err());
    }

    #[test]
    fn subset_ordering() {
        let times = [24u64, 4, 8];
        let sub = OrderedSubset::ascending(vec![0, 1, 2], &times).unwrap();
        assert_eq!(sub.indices(), &[1, 2, 0]);
        sub.validate_ascending(&times).unwrap();
        assert!(OrderedSubset::new(vec![0, 1])
            .unwrap()
            .validate_ascending(&times)
            .is_err());
        // Ties broken by index.
        let tie = OrderedSubset::ascending(vec![1, 0], &[4, 4]).unwrap();
        assert_eq!(tie.indices(), &[0, 1]);
    }
}
