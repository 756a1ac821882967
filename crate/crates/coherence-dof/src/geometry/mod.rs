//! Exact rational polytope machinery for DoF regions.
//!
//! Regions come in two forms. [`RegionH`] is an intersection of halfspaces
//! `sum c_i d_i <= rhs` (nonnegativity is implicit); [`RegionV`] is the
//! *downward closure* of the convex hull of a generator set. Downward closure
//! is part of the semantics throughout: a DoF region always contains every
//! componentwise-smaller point, because a receiver can simply be served less.
//!
//! Everything here is exact; membership questions reduce to rational linear
//! feasibility (see [`lp`]) and vertex enumeration to basis intersection,
//! which is cheap and robust at dimension <= 4.

pub mod lp;

use crate::model::{DofPoint, Rat};
use crate::{Error, Result};
use num::{Signed, Zero};

/// One inequality `sum coeffs[i] * d_i <= rhs` with nonnegative coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Halfspace {
    coeffs: Vec<Rat>,
    rhs: Rat,
}

impl Halfspace {
    pub fn new(coeffs: Vec<Rat>, rhs: Rat) -> Result<Self> {
        if coeffs.iter().any(|c| c.is_negative()) {
            return Err(Error::Config(
                "halfspace coefficients must be nonnegative".into(),
            ));
        }
        if coeffs.iter().all(|c| c.is_zero()) {
            return Err(Error::Config(
                "halfspace needs at least one positive coefficient".into(),
            ));
        }
        if rhs.is_negative() {
            return Err(Error::Config("halfspace bound must be nonnegative".into()));
        }
        Ok(Self { coeffs, rhs })
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn rhs(&self) -> &Rat {
        &self.rhs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn satisfied_by(&self, p: &DofPoint) -> bool {
        let lhs = self
            .coeffs
            .iter()
            .zip(p.coords())
            .fold(Rat::zero(), |acc, (c, x)| acc + c * x);
        lhs <= self.rhs
    }
}

/// Halfspace form of a region: `{d >= 0}` intersected with the inequalities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionH {
    dim: usize,
    halfspaces: Vec<Halfspace>,
}

impl RegionH {
    pub fn new(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Self> {
        for h in &halfspaces {
            if h.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: h.dim(),
                });
            }
        }
        Ok(Self { dim, halfspaces })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    /// Exact membership: `p >= 0` and every halfspace satisfied.
    pub fn contains(&self, p: &DofPoint) -> Result<bool> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: p.dim(),
            });
        }
        Ok(self.halfspaces.iter().all(|h| h.satisfied_by(p)))
    }

    /// Every coordinate direction must be capped by some halfspace; with
    /// nonnegative coefficients this is exactly boundedness.
    fn check_bounded(&self) -> Result<()> {
        for i in 0..self.dim {
            if !self.halfspaces.iter().any(|h| h.coeffs[i].is_positive()) {
                return Err(Error::Unbounded(i));
            }
        }
        Ok(())
    }

    /// All extreme points of the polytope, enumerated by intersecting every
    /// choice of `dim` active constraints (halfspaces and axes), exactly.
    pub fn vertices(&self) -> Result<Vec<DofPoint>> {
        self.check_bounded()?;
        let k = self.dim;
        // Constraint rows: each halfspace as (coeffs, rhs), each axis d_i >= 0
        // as (e_i, 0).
        let mut rows: Vec<(Vec<Rat>, Rat)> = self
            .halfspaces
            .iter()
            .map(|h| (h.coeffs.clone(), h.rhs.clone()))
            .collect();
        for i in 0..k {
            let mut e = vec![Rat::zero(); k];
            e[i] = Rat::from_integer(1.into());
            rows.push((e, Rat::zero()));
        }

        let mut out: Vec<DofPoint> = Vec::new();
        for choice in combinations(rows.len(), k) {
            let a: Vec<Vec<Rat>> = choice.iter().map(|&i| rows[i].0.clone()).collect();
            let b: Vec<Rat> = choice.iter().map(|&i| rows[i].1.clone()).collect();
            if let Some(x) = lp::solve_square(&a, &b) {
                if x.iter().all(|v| !v.is_negative()) {
                    let p = DofPoint::new(x)?;
                    if self.contains(&p)? && !out.contains(&p) {
                        out.push(p);
                    }
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Maximum of `sum d_i` over the region.
    pub fn max_sum(&self) -> Result<Rat> {
        let verts = self.vertices()?;
        Ok(verts
            .iter()
            .map(|v| v.sum())
            .max()
            .unwrap_or_else(Rat::zero))
    }
}

/// Vertex (generator) form of a region: the downward closure of the convex
/// hull of the generators, intersected with the nonnegative orthant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionV {
    dim: usize,
    generators: Vec<DofPoint>,
}

impl RegionV {
    /// Generators are deduplicated; the origin is always implicitly present.
    pub fn new(dim: usize, generators: Vec<DofPoint>) -> Result<Self> {
        let mut gens: Vec<DofPoint> = Vec::new();
        for g in generators {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: g.dim(),
                });
            }
            if !gens.contains(&g) {
                gens.push(g);
            }
        }
        gens.sort();
        Ok(Self {
            dim,
            generators: gens,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[DofPoint] {
        &self.generators
    }

    /// Membership in the downward-closed hull: some convex combination of the
    /// generators dominates `p` componentwise.
    pub fn contains(&self, p: &DofPoint) -> Result<bool> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: p.dim(),
            });
        }
        if p.is_origin() {
            return Ok(true);
        }
        if self.generators.is_empty() {
            return Ok(false);
        }
        // Variables: lambda_i (one per generator), slack_j (one per coord).
        //   sum lambda_i           = 1
        //   sum lambda_i g_i[j] - slack_j = p[j]
        let n = self.generators.len();
        let k = self.dim;
        let mut a: Vec<Vec<Rat>> = Vec::with_capacity(k + 1);
        let mut row0 = vec![Rat::zero(); n + k];
        for cell in row0.iter_mut().take(n) {
            *cell = Rat::from_integer(1.into());
        }
        a.push(row0);
        let mut b = vec![Rat::from_integer(1.into())];
        for j in 0..k {
            let mut row = vec![Rat::zero(); n + k];
            for (i, g) in self.generators.iter().enumerate() {
                row[i] = g.coord(j).clone();
            }
            row[n + j] = Rat::from_integer((-1).into());
            a.push(row);
            b.push(p.coord(j).clone());
        }
        Ok(lp::feasible(&a, &b))
    }

    /// Maximum of `sum d_i` over the region (attained at a generator).
    pub fn max_sum(&self) -> Rat {
        self.generators
            .iter()
            .map(|g| g.sum())
            .max()
            .unwrap_or_else(Rat::zero)
    }
}

/// Minimal generator description of a point cloud under region semantics:
/// keeps exactly the input points that are vertices of the downward-closed
/// hull (the origin, a vertex of every region, is never reported).
pub fn extreme_points(pts: &[DofPoint]) -> Result<Vec<DofPoint>> {
    if pts.is_empty() {
        return Ok(Vec::new());
    }
    let dim = pts[0].dim();
    for p in pts {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.dim(),
            });
        }
    }
    let mut input: Vec<DofPoint> = Vec::new();
    for p in pts {
        if !input.contains(p) {
            input.push(p.clone());
        }
    }

    // The downward-closed hull equals the plain convex hull of the axis
    // projections of the generators (every coordinate subset zeroed), so
    // vertex-ness can be decided by exact convex-combination feasibility.
    let mut cloud: Vec<DofPoint> = vec![DofPoint::origin(dim)];
    for p in &input {
        for mask in 0..(1u32 << dim) {
            let coords: Vec<Rat> = (0..dim)
                .map(|j| {
                    if mask & (1 << j) == 0 {
                        p.coord(j).clone()
                    } else {
                        Rat::zero()
                    }
                })
                .collect();
            let q = DofPoint::new(coords)?;
            if !cloud.contains(&q) {
                cloud.push(q);
            }
        }
    }

    let mut kept: Vec<DofPoint> = Vec::new();
    for p in &input {
        if p.is_origin() {
            continue;
        }
        let others: Vec<&DofPoint> = cloud.iter().filter(|q| *q != p).collect();
        if !in_convex_hull(p, &others) {
            kept.push(p.clone());
        }
    }
    kept.sort();
    Ok(kept)
}

/// All size-`k` index subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let remaining = k - cur.len();
        for i in start..=(n - remaining) {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    if k <= n {
        rec(0, n, k, &mut cur, &mut out);
    }
    out
}

/// Exact convex-combination membership (no downward slack).
fn in_convex_hull(p: &DofPoint, points: &[&DofPoint]) -> bool {
    if points.is_empty() {
        return false;
    }
    let n = points.len();
    let k = p.dim();
    let mut a: Vec<Vec<Rat>> = Vec::with_capacity(k + 1);
    a.push(vec![Rat::from_integer(1.into()); n]);
    let mut b = vec![Rat::from_integer(1.into())];
    for j in 0..k {
        a.push(points.iter().map(|q| q.coord(j).clone()).collect());
        b.push(p.coord(j).clone());
    }
    lp::feasible(&a, &b)
}

/// True iff the downward-closed hull of `v` lies inside `h`. Checking the
/// generators suffices: the halfspace coefficients are nonnegative, so
/// domination and convex mixing cannot break a satisfied inequality.
pub fn hull_subset_of(v: &RegionV, h: &RegionH) -> Result<bool> {
    if v.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: v.dim(),
        });
    }
    for g in v.generators() {
        if !h.contains(g)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact region equality: `v` inside `h`, and every vertex of `h` inside the
/// downward-closed hull of `v`.
pub fn region_equal(v: &RegionV, h: &RegionH) -> Result<bool> {
    if !hull_subset_of(v, h)? {
        return Ok(false);
    }
    for vertex in h.vertices()? {
        if !v.contains(&vertex)? {
            return Ok(false);
        }
    }
    Ok(true)
}
