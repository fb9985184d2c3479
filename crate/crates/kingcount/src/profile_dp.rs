//! Row-profile transfer engine: bitmask dynamic programming over king-graph
//! rows.
//!
//! A row is encoded as a bitmask with no two adjacent bits set; two stacked
//! rows are compatible when no king attacks another across the row boundary.
//! Iterating the transfer over the shorter board dimension gives the plain
//! count, the count-by-size table, and the vertex-weighted total. This engine
//! is the fast path for wide tables and the independent cross-check for the
//! tile contraction in [`crate::wang`].

use num_traits::Zero;

use crate::kinggraph::{CountTable, GridShape};
use crate::{BigCount, Error, Result};

/// Widest frontier accepted by [`dp_count`] and [`dp_weighted`].
pub const MAX_WIDTH: usize = 30;
/// Widest frontier accepted by [`dp_count_by_c`].
pub const MAX_WIDTH_BY_C: usize = 26;

/// One row of king placements: bit `i` set means a king in column `i`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct RowProfile(pub u32);

impl RowProfile {
    pub fn king_count(self) -> u32 {
        self.0.count_ones()
    }
}

/// All row masks of the given width with no two adjacent bits set, in
/// increasing numeric order. There are F(width+2) of them.
pub fn valid_profiles(width: usize) -> Result<Vec<RowProfile>> {
    if width == 0 || width > MAX_WIDTH {
        return Err(Error::WidthOutOfRange {
            width,
            max: MAX_WIDTH,
        });
    }
    // profiles(w) = profiles(w-1) ++ [p | 1<<(w-1) for p in profiles(w-2)],
    // which preserves ascending order.
    let mut prev: Vec<u32> = vec![0];
    let mut cur: Vec<u32> = vec![0, 1];
    for w in 2..=width {
        let top = 1u32 << (w - 1);
        let mut next = Vec::with_capacity(cur.len() + prev.len());
        next.extend_from_slice(&cur);
        next.extend(prev.iter().map(|p| p | top));
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(cur.into_iter().map(RowProfile).collect())
}

/// True when the two profiles can appear in adjacent rows.
pub fn compatible(p: RowProfile, q: RowProfile) -> bool {
    p.0 & (q.0 | q.0 << 1 | q.0 >> 1) == 0
}

/// Pair of running totals used by the weighted transfer: how many
/// configurations reach a state, and the sum of their king counts so far.
///
/// Appending a row with `k` kings maps `(count, weight_sum)` to
/// `(count, weight_sum + k * count)`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct WeightedMass {
    pub count: BigCount,
    pub weight_sum: BigCount,
}

fn canonical_dims(shape: GridShape) -> (usize, usize) {
    let c = shape.canonicalize();
    (c.m as usize, c.n as usize)
}

fn check_width(width: usize, max: usize) -> Result<()> {
    if width > max {
        return Err(Error::WidthOutOfRange { width, max });
    }
    Ok(())
}

fn resolve_threads(threads: usize) -> usize {
    if threads == 0 {
        std::thread::available_parallelism().map_or(1, |p| p.get())
    } else {
        threads
    }
}

/// Computes `(0..len).map(f)` with the work split over `threads` workers.
///
/// Each index is computed by exactly one worker with a fixed inner order, so
/// the result does not depend on the worker count.
fn parallel_map<T, F>(len: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let threads = threads.min(len.max(1));
    if threads <= 1 || len < 64 {
        return (0..len).map(f).collect();
    }
    let chunk = len.div_ceil(threads);
    let f = &f;
    let mut parts: Vec<Vec<T>> = Vec::with_capacity(threads);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let lo = t * chunk;
                let hi = ((t + 1) * chunk).min(len);
                scope.spawn(move || (lo..hi).map(f).collect::<Vec<T>>())
            })
            .collect();
        for handle in handles {
            parts.push(handle.join().expect("dp worker panicked"));
        }
    });
    parts.into_iter().flatten().collect()
}

/// Calls `f` with every valid sub-profile of `allowed` (no two adjacent bits),
/// the empty mask included.
fn for_each_subprofile(allowed: u32, f: &mut impl FnMut(u32)) {
    fn rec(avail: u32, cur: u32, f: &mut impl FnMut(u32)) {
        if avail == 0 {
            f(cur);
            return;
        }
        let bit = avail & avail.wrapping_neg();
        rec(avail & !bit, cur, f);
        rec(avail & !(bit | bit << 1), cur | bit, f);
    }
    rec(allowed, 0, f);
}

/// Number of independent sets of the king graph, by row transfer.
pub fn dp_count(shape: GridShape) -> Result<BigCount> {
    dp_count_with(shape, 0)
}

/// [`dp_count`] with an explicit worker count (0 = machine parallelism).
/// The result is identical for every worker count.
pub fn dp_count_with(shape: GridShape, threads: usize) -> Result<BigCount> {
    let (width, rows) = canonical_dims(shape);
    check_width(width, MAX_WIDTH)?;
    count_oriented(width, rows, resolve_threads(threads))
}

/// The transfer with an explicit frontier orientation; `dp_count` always
/// points the frontier across the smaller dimension, this does not.
fn count_oriented(width: usize, rows: usize, threads: usize) -> Result<BigCount> {
    let profiles = valid_profiles(width)?;
    let full = (1u32 << width) - 1;

    let mut cur: Vec<BigCount> = vec![BigCount::from(1u32); profiles.len()];
    for _ in 1..rows {
        let next = parallel_map(profiles.len(), threads, |j| {
            let q = profiles[j].0;
            let allowed = full & !(q | q << 1 | q >> 1);
            let mut acc = BigCount::zero();
            for_each_subprofile(allowed, &mut |p| {
                let i = profiles.binary_search(&RowProfile(p)).unwrap();
                acc += &cur[i];
            });
            acc
        });
        cur = next;
    }
    Ok(cur.iter().sum())
}

/// Full count table `N(c)` for every vertex count `c`, by row transfer with a
/// per-row convolution on the king count of the appended profile.
pub fn dp_count_by_c(shape: GridShape) -> Result<CountTable> {
    dp_count_by_c_with(shape, 0)
}

pub fn dp_count_by_c_with(shape: GridShape, threads: usize) -> Result<CountTable> {
    let (width, rows) = canonical_dims(shape);
    check_width(width, MAX_WIDTH_BY_C)?;
    let threads = resolve_threads(threads);
    let profiles = valid_profiles(width)?;
    let full = (1u32 << width) - 1;
    let c_max = shape.max_independent_size();
    let per_row = width.div_ceil(2);

    let mut cur: Vec<Vec<BigCount>> = profiles
        .iter()
        .map(|p| {
            let mut v = vec![BigCount::zero(); c_max + 1];
            v[p.king_count() as usize] = BigCount::from(1u32);
            v
        })
        .collect();

    for row in 1..rows {
        // After `row + 1` rows no state can hold more kings than this.
        let reachable = (per_row * row).min(c_max);
        let next = parallel_map(profiles.len(), threads, |j| {
            let q = profiles[j].0;
            let shift = profiles[j].king_count() as usize;
            let allowed = full & !(q | q << 1 | q >> 1);
            let mut acc = vec![BigCount::zero(); c_max + 1];
            for_each_subprofile(allowed, &mut |p| {
                let i = profiles.binary_search(&RowProfile(p)).unwrap();
                let src = &cur[i];
                for c in 0..=reachable.min(c_max - shift) {
                    if !src[c].is_zero() {
                        acc[c + shift] += &src[c];
                    }
                }
            });
            acc
        });
        cur = next;
    }

    let mut counts = vec![BigCount::zero(); c_max + 1];
    for state in &cur {
        for (c, v) in state.iter().enumerate() {
            if !v.is_zero() {
                counts[c] += v;
            }
        }
    }
    Ok(CountTable { shape, counts })
}

/// Vertex-weighted enumeration: the sum of king counts over all independent
/// sets, accumulated as a [`WeightedMass`] pair per profile.
pub fn dp_weighted(shape: GridShape) -> Result<BigCount> {
    dp_weighted_with(shape, 0)
}

pub fn dp_weighted_with(shape: GridShape, threads: usize) -> Result<BigCount> {
    let (width, rows) = canonical_dims(shape);
    check_width(width, MAX_WIDTH)?;
    let threads = resolve_threads(threads);
    let profiles = valid_profiles(width)?;
    let full = (1u32 << width) - 1;

    let mut cur: Vec<WeightedMass> = profiles
        .iter()
        .map(|p| WeightedMass {
            count: BigCount::from(1u32),
            weight_sum: BigCount::from(p.king_count()),
        })
        .collect();

    for _ in 1..rows {
        let next = parallel_map(profiles.len(), threads, |j| {
            let q = profiles[j].0;
            let allowed = full & !(q | q << 1 | q >> 1);
            let mut acc = WeightedMass::default();
            for_each_subprofile(allowed, &mut |p| {
                let i = profiles.binary_search(&RowProfile(p)).unwrap();
                acc.count += &cur[i].count;
                acc.weight_sum += &cur[i].weight_sum;
            });
            acc.weight_sum += &acc.count * profiles[j].king_count();
            acc
        });
        cur = next;
    }
    Ok(cur.iter().map(|m| &m.weight_sum).sum())
}
