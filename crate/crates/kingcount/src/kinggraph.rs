//! King-graph ground truth: board shapes, count tables, brute-force oracles,
//! and the closed forms known for maximum independent sets.
//!
//! The oracles here enumerate by direct definition (backtracking over the
//! 8-neighborhood adjacency, or over explicit 2×2 block placements) and exist
//! to pin down the transfer engines on small boards. They are deliberately
//! capped at sizes that finish quickly.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::{BigCount, Error, Result};

/// Maximum vertex count accepted by the vertex-level brute-force oracles.
pub const BRUTE_FORCE_VERTEX_LIMIT: u64 = 36;
/// Maximum boundary-grid cell count accepted by the tile-packing oracle.
pub const BRUTE_FORCE_CELL_LIMIT: u64 = 42;

/// Board dimensions: `m` columns by `n` rows, both at least 1.
///
/// Vertices are indexed `(column, row)` with 0-based indices; adjacency is the
/// full 8-neighborhood. Every counting function in this crate is invariant
/// under transposition, so `(m, n)` and `(n, m)` are interchangeable.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct GridShape {
    pub m: u32,
    pub n: u32,
}

impl GridShape {
    pub fn new(m: u32, n: u32) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidShape { m, n });
        }
        Ok(GridShape { m, n })
    }

    /// The transpose-symmetric canonical form, with `m <= n`.
    pub fn canonicalize(self) -> Self {
        GridShape {
            m: self.m.min(self.n),
            n: self.m.max(self.n),
        }
    }

    pub fn area(self) -> u64 {
        u64::from(self.m) * u64::from(self.n)
    }

    /// Size of a maximum independent set: ⌊(m+1)/2⌋·⌊(n+1)/2⌋.
    pub fn max_independent_size(self) -> usize {
        (u64::from(self.m + 1) / 2 * (u64::from(self.n + 1) / 2)) as usize
    }

    /// The fit abscissa (m+n)/(mn) used for finite-size extrapolation.
    pub fn boundary_density(self) -> f64 {
        f64::from(self.m + self.n) / self.area() as f64
    }
}

impl std::fmt::Display for GridShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.m, self.n)
    }
}

/// Number of independent sets of each size, indexed by vertex count `c`.
///
/// A complete table runs from `c = 0` (the empty set) through
/// `shape.max_independent_size()`. Tables produced with an explicit cap on `c`
/// are shorter; [`CountTable::is_complete`] distinguishes the two.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CountTable {
    pub shape: GridShape,
    pub counts: Vec<BigCount>,
}

impl CountTable {
    pub fn c_max(&self) -> usize {
        self.shape.max_independent_size()
    }

    pub fn is_complete(&self) -> bool {
        self.counts.len() == self.c_max() + 1
    }

    /// Total number of independent sets: the sum over all sizes.
    pub fn total(&self) -> BigCount {
        self.counts.iter().sum()
    }

    /// Sum of `c * counts[c]`: the vertex-weighted enumeration.
    pub fn weighted_total(&self) -> BigCount {
        let mut acc = BigCount::zero();
        for (c, count) in self.counts.iter().enumerate() {
            acc += count * (c as u64);
        }
        acc
    }
}

/// Bitmasks of the already-visited neighbors of each cell, in row-major order.
fn earlier_neighbor_masks(m: usize, n: usize) -> Vec<u64> {
    let mut masks = vec![0u64; m * n];
    for y in 0..n {
        for x in 0..m {
            let mut mask = 0u64;
            let mut add = |nx: isize, ny: isize| {
                if nx >= 0 && ny >= 0 && (nx as usize) < m && (ny as usize) < n {
                    mask |= 1 << (ny as usize * m + nx as usize);
                }
            };
            let (x, y) = (x as isize, y as isize);
            add(x - 1, y);
            add(x - 1, y - 1);
            add(x, y - 1);
            add(x + 1, y - 1);
            masks[y as usize * m + x as usize] = mask;
        }
    }
    masks
}

fn check_vertex_limit(shape: GridShape) -> Result<()> {
    if shape.area() > BRUTE_FORCE_VERTEX_LIMIT {
        return Err(Error::ShapeTooLarge {
            m: shape.m,
            n: shape.n,
            limit: "36 vertices",
        });
    }
    Ok(())
}

/// Counts independent sets of every size by exhaustive backtracking.
pub fn brute_force_count_table(shape: GridShape) -> Result<CountTable> {
    check_vertex_limit(shape)?;
    let neighbors = earlier_neighbor_masks(shape.m as usize, shape.n as usize);
    let mut counts = vec![0u64; shape.max_independent_size() + 1];

    fn go(i: usize, used: u64, size: usize, neighbors: &[u64], counts: &mut [u64]) {
        if i == neighbors.len() {
            counts[size] += 1;
            return;
        }
        go(i + 1, used, size, neighbors, counts);
        if used & neighbors[i] == 0 {
            go(i + 1, used | 1 << i, size + 1, neighbors, counts);
        }
    }
    go(0, 0, 0, &neighbors, &mut counts);

    Ok(CountTable {
        shape,
        counts: counts.into_iter().map(BigCount::from).collect(),
    })
}

/// Sum of set sizes over all independent sets, by direct traversal.
pub fn brute_force_weighted(shape: GridShape) -> Result<BigCount> {
    check_vertex_limit(shape)?;
    let neighbors = earlier_neighbor_masks(shape.m as usize, shape.n as usize);

    fn go(i: usize, used: u64, size: u64, neighbors: &[u64], acc: &mut u128) {
        if i == neighbors.len() {
            *acc += u128::from(size);
            return;
        }
        go(i + 1, used, size, neighbors, acc);
        if used & neighbors[i] == 0 {
            go(i + 1, used | 1 << i, size + 1, neighbors, acc);
        }
    }
    let mut acc = 0u128;
    go(0, 0, 0, &neighbors, &mut acc);
    Ok(BigCount::from(acc))
}

/// Counts placements of pairwise non-overlapping 2×2 blocks in the
/// (m+1)×(n+1) boundary grid, the empty placement included.
///
/// This is the other side of the bijection: the result must equal the total
/// number of independent sets of the m×n king graph.
pub fn brute_force_tile_packings(shape: GridShape) -> Result<BigCount> {
    let cells = u64::from(shape.m + 1) * u64::from(shape.n + 1);
    if cells > BRUTE_FORCE_CELL_LIMIT {
        return Err(Error::ShapeTooLarge {
            m: shape.m,
            n: shape.n,
            limit: "42 boundary-grid cells",
        });
    }
    let (m, n) = (shape.m as usize, shape.n as usize);
    let grid_w = m + 1;
    // Footprint of the 2x2 block anchored at (x, y), covering columns x..=x+1
    // and rows y..=y+1 of the boundary grid.
    let mut footprints = Vec::with_capacity(m * n);
    for y in 0..n {
        for x in 0..m {
            let mut fp = 0u64;
            for dy in 0..2 {
                for dx in 0..2 {
                    fp |= 1 << ((y + dy) * grid_w + (x + dx));
                }
            }
            footprints.push(fp);
        }
    }

    fn go(i: usize, occupied: u64, footprints: &[u64], acc: &mut u64) {
        if i == footprints.len() {
            *acc += 1;
            return;
        }
        go(i + 1, occupied, footprints, acc);
        if occupied & footprints[i] == 0 {
            go(i + 1, occupied | footprints[i], footprints, acc);
        }
    }
    let mut acc = 0u64;
    go(0, 0, &footprints, &mut acc);
    Ok(BigCount::from(acc))
}

/// Closed form for the number of maximum independent sets, where one exists.
///
/// Both dimensions odd gives the unique step-2 lattice; one odd dimension lets
/// each king column slide like a bead row, giving a power formula. With both
/// dimensions even no simple closed form is known and `None` is returned;
/// callers fall back to an engine.
pub fn max_independent_count_closed_form(shape: GridShape) -> Option<BigCount> {
    let (m, n) = (shape.m, shape.n);
    match (m % 2, n % 2) {
        (1, 1) => Some(BigCount::one()),
        (1, 0) => Some(BigCount::from(n / 2 + 1).pow(m.div_ceil(2))),
        (0, 1) => Some(BigCount::from(m / 2 + 1).pow(n.div_ceil(2))),
        _ => None,
    }
}
