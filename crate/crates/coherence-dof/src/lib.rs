//! Degrees-of-freedom (DoF) regions of block-fading broadcast and
//! multiple-access channels whose links have *unequal* coherence times and
//! whose receivers must pay for their own channel estimates.
//!
//! The crate has three layers that check each other:
//!
//! * **Closed forms** ([`bc_regions`], [`mac_regions`]): exact rational
//!   formulas for achievable DoF tuples (pilot + product-superposition
//!   schemes, blind interference alignment for staggered fading) and for the
//!   channel-enhancement outer bounds, built on exact polytope machinery in
//!   [`geometry`].
//! * **Slot-level oracle** ([`scheduler`]): materializes the transmission
//!   schemes as explicit pilot/data/superposition schedules over a finite
//!   horizon and counts DoF-bearing symbols per entity; the counts must equal
//!   the closed forms exactly, as rationals.
//! * **Link simulator** ([`linksim`]): Monte-Carlo finite-SNR rates with
//!   MMSE channel estimation, corroborating the DoF slopes empirically.
//!
//! All region arithmetic is exact (`num::BigRational`); floating point is
//! confined to the simulator.
//!
//! Runnable demonstrations live in `examples/` (one per capability):
//!
//! ```text
//! examples/
//! ├── region_bc.rs        # broadcast regions, tight and non-tight configs
//! ├── region_mac.rs       # multiple-access regions, identical & nested T
//! ├── optimality_cases.rs # the four tightness cases
//! ├── verify_oracle.rs    # slot oracle vs closed forms on a grid
//! ├── staggered_bia.rs    # blind interference alignment + superposition
//! ├── simulate_p2p.rs     # pilot-based point-to-point rates vs SNR
//! ├── simulate_bc_ps.rs   # product superposition at finite SNR
//! └── simulate_mac.rs     # MAC pilot + zero-forcing at finite SNR
//! ```
//!
//! A thin CLI (`coherence-dof`) wraps the same entry points; see [`cli`].

pub mod bc_regions;
pub mod cli;
pub mod config;
pub mod geometry;
pub mod linksim;
pub mod mac_regions;
pub mod model;
pub mod scheduler;
pub mod svg;
pub mod verify;

pub use model::{BcConfig, DofPoint, MacConfig, OrderedSubset, Rat};

/// Crate-wide error type.
///
/// `Config` covers malformed inputs, `Precondition` covers violated theorem
/// hypotheses (e.g. `T < 2N` in the MAC), and `OracleMismatch` is reserved
/// for a slot-level count disagreeing with a closed form.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("theorem precondition violated: {0}")]
    Precondition(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("region is unbounded in coordinate {0}")]
    Unbounded(usize),
    #[error("estimability violated: entity {entity} has {known} known slots but decodes {needed} dimensions in the block starting at slot {block_start}")]
    Estimability {
        entity: usize,
        block_start: i64,
        known: u64,
        needed: u64,
    },
    #[error("schedule horizon {0} exceeds the {1}-slot limit; use the closed form instead")]
    HorizonTooLarge(u128, u64),
    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
