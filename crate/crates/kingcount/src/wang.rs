//! Wang-tile formulation: boundary-grid tile sets, horizontal tile merging
//! with Fibonacci vertical alphabets, and the frontier contraction engine.
//!
//! Independent sets of the m×n king graph biject with packings of 2×2 blocks
//! in the (m+1)×(n+1) boundary grid. Each grid cell becomes a unit square
//! tile with a character from {blank, one} on every edge; a tiling is valid
//! when shared edges carry equal characters and the outer boundary is blank.
//! A 2×2 block decomposes as
//!
//! ```text
//!         +----+----+
//!         | C    B  |        C emits `one` rightward,
//!         +----+----+        B relays `one` downward,
//!         | C    A* |        A consumes both and carries the king (*),
//!         +----+----+        D (all blank) fills every empty cell.
//! ```
//!
//! so kings sit at bottom-right corners of blocks and two blocks can never
//! overlap. Merging `l` horizontally adjacent tiles into one block tile
//! shrinks the vertical alphabet from 2^l strings to the F(l+2) strings with
//! no two consecutive `one`s, which is what makes wide boards tractable.
//!
//! The contraction sweeps the boundary grid row by row, one block at a time,
//! holding a map from frontier states (vertical-edge word per block, one
//! in-row horizontal carry, and an optional marker or king-count channel) to
//! exact counts. States with zero mass are never stored.

use std::collections::{BTreeSet, HashMap};

use num_traits::Zero;

use crate::kinggraph::{CountTable, GridShape};
use crate::{fibonacci, BigCount, Error, Result};

/// Largest supported merge width.
pub const MAX_MERGE_WIDTH: usize = 8;

/// A character on a tile edge: the boundary blank or the signal `one`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum EdgeChar {
    Blank,
    One,
}

impl EdgeChar {
    fn bit(self) -> u64 {
        match self {
            EdgeChar::Blank => 0,
            EdgeChar::One => 1,
        }
    }
}

impl std::fmt::Display for EdgeChar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EdgeChar::Blank => "#",
            EdgeChar::One => "1",
        })
    }
}

/// A unit Wang tile. `king_marker` is true on the tile whose cell is the
/// bottom-right corner of a 2×2 block, i.e. the cell that carries a king.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct WangTile {
    pub top: EdgeChar,
    pub left: EdgeChar,
    pub bottom: EdgeChar,
    pub right: EdgeChar,
    pub king_marker: bool,
}

/// The four base tiles: the king tile, the downward relay, the rightward
/// emitter, and the blank filler. Exactly one tile carries the king marker,
/// and the three non-blank tiles compose uniquely into a 2×2 block.
pub fn base_tileset() -> [WangTile; 4] {
    use EdgeChar::{Blank, One};
    [
        // A: consumes the rightward and downward signals; the king cell.
        WangTile {
            top: One,
            left: One,
            bottom: Blank,
            right: Blank,
            king_marker: true,
        },
        // B: top-right cell of a block, relays the signal downward.
        WangTile {
            top: Blank,
            left: One,
            bottom: One,
            right: Blank,
            king_marker: false,
        },
        // C: left column of a block, emits the signal rightward.
        WangTile {
            top: Blank,
            left: Blank,
            bottom: Blank,
            right: One,
            king_marker: false,
        },
        // D: empty cell.
        WangTile {
            top: Blank,
            left: Blank,
            bottom: Blank,
            right: Blank,
            king_marker: false,
        },
    ]
}

/// A word of edge characters along the top or bottom of a merged tile.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct EdgeWord(pub Vec<EdgeChar>);

impl EdgeWord {
    /// Bitmask with bit `i` set when position `i` carries `one`.
    pub fn mask(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (i, c)| acc | c.bit() << i)
    }
}

impl std::fmt::Display for EdgeWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.0 {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A horizontal run of base tiles whose spliced edges match pairwise.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MergedTile {
    pub cells: Vec<WangTile>,
}

impl MergedTile {
    pub fn left(&self) -> EdgeChar {
        self.cells.first().expect("merged tile is nonempty").left
    }

    pub fn right(&self) -> EdgeChar {
        self.cells.last().expect("merged tile is nonempty").right
    }

    pub fn top_word(&self) -> EdgeWord {
        EdgeWord(self.cells.iter().map(|t| t.top).collect())
    }

    pub fn bottom_word(&self) -> EdgeWord {
        EdgeWord(self.cells.iter().map(|t| t.bottom).collect())
    }

    pub fn king_count(&self) -> usize {
        self.cells.iter().filter(|t| t.king_marker).count()
    }
}

/// The merged tile set of a given width, optionally restricted to a blank
/// left edge (the variant used for the leftmost block of each row).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MergedTileSet {
    pub merge_width: usize,
    pub left_restricted: bool,
    pub tiles: Vec<MergedTile>,
}

fn check_merge_width(l: usize) -> Result<()> {
    if l == 0 || l > MAX_MERGE_WIDTH {
        return Err(Error::MergeWidthOutOfRange { l });
    }
    Ok(())
}

fn merge_impl(l: usize, left_restricted: bool) -> Vec<MergedTile> {
    let base = base_tileset();
    let mut tiles = Vec::new();
    let mut chain: Vec<WangTile> = Vec::with_capacity(l);

    fn extend(
        chain: &mut Vec<WangTile>,
        base: &[WangTile; 4],
        l: usize,
        out: &mut Vec<MergedTile>,
    ) {
        if chain.len() == l {
            out.push(MergedTile {
                cells: chain.clone(),
            });
            return;
        }
        let carry = chain.last().expect("chain started").right;
        for &t in base {
            if t.left == carry {
                chain.push(t);
                extend(chain, base, l, out);
                chain.pop();
            }
        }
    }

    for &t in &base {
        if left_restricted && t.left != EdgeChar::Blank {
            continue;
        }
        chain.push(t);
        extend(&mut chain, &base, l, &mut tiles);
        chain.pop();
    }
    tiles
}

/// All width-`l` merged tiles.
pub fn merge_tiles(l: usize) -> Result<MergedTileSet> {
    check_merge_width(l)?;
    Ok(MergedTileSet {
        merge_width: l,
        left_restricted: false,
        tiles: merge_impl(l, false),
    })
}

/// Width-`l` merged tiles whose leftmost edge is forced blank.
pub fn merge_tiles_left_restricted(l: usize) -> Result<MergedTileSet> {
    check_merge_width(l)?;
    Ok(MergedTileSet {
        merge_width: l,
        left_restricted: true,
        tiles: merge_impl(l, true),
    })
}

/// The set of distinct top-edge words of a merged tile set (equal to the set
/// of bottom-edge words): every length-l word over {blank, one} with no two
/// consecutive `one`s, F(l+2) words in total for the unrestricted set.
pub fn vertical_alphabet(ts: &MergedTileSet) -> BTreeSet<EdgeWord> {
    ts.tiles.iter().map(|t| t.top_word()).collect()
}

/// Dense state-tensor size for a frontier of `m` columns decomposed into one
/// left-restricted block of width m0 and blocks of width `l`, where
/// m = l*m1 + m0 with 1 <= m0 <= l. Saturates at `u128::MAX`.
pub fn predict_state_size(m: u32, l: u32) -> Result<u128> {
    check_merge_width(l as usize)?;
    if m == 0 {
        return Err(Error::InvalidShape { m, n: 1 });
    }
    let m1 = (m - 1) / l;
    let m0 = m - l * m1;
    let mut size: u128 = 2 * u128::from(fibonacci(m0 + 1));
    let factor = u128::from(fibonacci(l + 2));
    for _ in 0..m1 {
        size = size.saturating_mul(factor);
    }
    Ok(size)
}

/// Knobs for the contraction engine.
#[derive(Clone, Copy, Debug)]
pub struct ContractOptions {
    /// Tiles per merged block; 4 balances state size against transfer size.
    pub merge_width: usize,
    /// Cap on live states; exceeding it aborts with `BudgetExceeded`.
    pub state_budget: usize,
    /// Worker count for the per-step transform; 0 means machine parallelism.
    /// Results are identical for every worker count.
    pub threads: usize,
}

impl Default for ContractOptions {
    fn default() -> Self {
        ContractOptions {
            merge_width: 4,
            state_budget: 1 << 27,
            threads: 0,
        }
    }
}

impl ContractOptions {
    pub fn with_merge_width(l: usize) -> Self {
        ContractOptions {
            merge_width: l,
            ..ContractOptions::default()
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Mode {
    Plain,
    ByC { cap: usize },
    Weighted,
}

#[derive(Clone, Copy, Debug)]
struct Transition {
    bottom_idx: u8,
    right: u8,
    kings: u8,
    /// Ones in the bottom word: kings this placement forces in the next row.
    bottom_ones: u8,
}

struct Block {
    alphabet_len: usize,
    blank_idx: u64,
    bits: u32,
    offset: u32,
    /// Ones per alphabet word, indexed like the alphabet.
    word_ones: Vec<u8>,
    /// Transitions bucketed by `[left_carry][top_index]`.
    transitions: [Vec<Vec<Transition>>; 2],
}

fn bits_for(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

fn build_block(ts: &MergedTileSet, offset: u32) -> Block {
    let tops: BTreeSet<u64> = ts.tiles.iter().map(|t| t.top_word().mask()).collect();
    let bottoms: BTreeSet<u64> = ts.tiles.iter().map(|t| t.bottom_word().mask()).collect();
    debug_assert_eq!(tops, bottoms, "top and bottom alphabets must coincide");
    let alphabet: Vec<u64> = tops.into_iter().collect();
    let index_of = |mask: u64| alphabet.binary_search(&mask).expect("word in alphabet") as u8;

    let mut transitions = [
        vec![Vec::new(); alphabet.len()],
        vec![Vec::new(); alphabet.len()],
    ];
    for tile in &ts.tiles {
        let top = index_of(tile.top_word().mask());
        let bottom_mask = tile.bottom_word().mask();
        transitions[tile.left().bit() as usize][top as usize].push(Transition {
            bottom_idx: index_of(bottom_mask),
            right: tile.right().bit() as u8,
            kings: tile.king_count() as u8,
            bottom_ones: bottom_mask.count_ones() as u8,
        });
    }

    Block {
        alphabet_len: alphabet.len(),
        blank_idx: u64::from(index_of(0)),
        bits: bits_for(alphabet.len()),
        offset,
        word_ones: alphabet.iter().map(|w| w.count_ones() as u8).collect(),
        transitions,
    }
}

struct Layout {
    blocks: Vec<Block>,
    carry_offset: u32,
    channel_offset: u32,
    blank_key: u64,
}

fn build_layout(frontier_cells: usize, l: usize, mode: Mode) -> Result<Layout> {
    let m1 = (frontier_cells - 1) / l;
    let m0 = frontier_cells - l * m1;
    let restricted = merge_tiles_left_restricted(m0)?;
    let unrestricted = if m1 > 0 { Some(merge_tiles(l)?) } else { None };

    let mut blocks = Vec::with_capacity(m1 + 1);
    let mut offset = 0u32;
    let push = |ts: &MergedTileSet, offset: &mut u32, blocks: &mut Vec<Block>| {
        let block = build_block(ts, *offset);
        *offset += block.bits;
        blocks.push(block);
    };
    push(&restricted, &mut offset, &mut blocks);
    if let Some(ts) = &unrestricted {
        for _ in 0..m1 {
            push(ts, &mut offset, &mut blocks);
        }
    }

    let carry_offset = offset;
    let channel_offset = carry_offset + 1;
    let channel_bits = match mode {
        Mode::Plain => 0,
        Mode::Weighted => 1,
        Mode::ByC { cap } => bits_for(cap + 1),
    };
    if channel_offset + channel_bits > 63 {
        // The packed key no longer fits; such a run would dwarf any sane
        // budget long before this point.
        return Err(Error::BudgetExceeded {
            predicted: u128::MAX,
            budget: 0,
        });
    }
    let blank_key = blocks
        .iter()
        .fold(0u64, |acc, b| acc | b.blank_idx << b.offset);
    Ok(Layout {
        blocks,
        carry_offset,
        channel_offset,
        blank_key,
    })
}

fn dense_state_estimate(layout: &Layout, mode: Mode) -> u128 {
    let channel_card: u128 = match mode {
        Mode::Plain => 1,
        Mode::Weighted => 2,
        Mode::ByC { cap } => cap as u128 + 1,
    };
    layout
        .blocks
        .iter()
        .fold(2u128, |acc, b| acc.saturating_mul(b.alphabet_len as u128))
        .saturating_mul(channel_card)
}

/// Multiplicative hasher for the packed state keys; they are already
/// well-mixed small integers, so sip hashing is wasted work.
#[derive(Default, Clone)]
struct KeyHasher(u64);

impl std::hash::Hasher for KeyHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, _: &[u8]) {
        unreachable!("state keys hash as u64");
    }

    fn write_u64(&mut self, key: u64) {
        self.0 = key.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_right(29);
    }
}

type StateMap = HashMap<u64, BigCount, std::hash::BuildHasherDefault<KeyHasher>>;

fn add_mass(map: &mut StateMap, key: u64, mass: BigCount) {
    match map.entry(key) {
        std::collections::hash_map::Entry::Occupied(mut e) => *e.get_mut() += mass,
        std::collections::hash_map::Entry::Vacant(e) => {
            e.insert(mass);
        }
    }
}

/// Applies one block transition to a single state, pushing successors into `out`.
fn apply_state(
    key: u64,
    mass: &BigCount,
    block: &Block,
    layout: &Layout,
    last_in_row: bool,
    mode: Mode,
    out: &mut StateMap,
) {
    let idx_mask = (1u64 << block.bits) - 1;
    let idx = ((key >> block.offset) & idx_mask) as usize;
    let carry = ((key >> layout.carry_offset) & 1) as usize;
    let channel = key >> layout.channel_offset;
    let rest = key & !(idx_mask << block.offset) & !(1u64 << layout.carry_offset);
    let rest = rest & ((1u64 << layout.channel_offset) - 1);

    // Kings already forced by pending bottom words across the profile; a
    // state whose committed plus forced kings exceed the cap can never reach
    // an accepted configuration, so it is dropped rather than carried.
    let pending: usize = match mode {
        Mode::ByC { .. } => layout
            .blocks
            .iter()
            .map(|b| b.word_ones[((key >> b.offset) & ((1u64 << b.bits) - 1)) as usize] as usize)
            .sum(),
        _ => 0,
    };

    for t in &block.transitions[carry][idx] {
        if last_in_row && t.right != 0 {
            continue;
        }
        let base = rest
            | u64::from(t.bottom_idx) << block.offset
            | u64::from(t.right) << layout.carry_offset;
        match mode {
            Mode::Plain => {
                add_mass(out, base | channel << layout.channel_offset, mass.clone());
            }
            Mode::ByC { cap } => {
                let next = channel as usize + t.kings as usize;
                let next_pending = pending - block.word_ones[idx] as usize + t.bottom_ones as usize;
                if next + next_pending <= cap {
                    add_mass(
                        out,
                        base | (next as u64) << layout.channel_offset,
                        mass.clone(),
                    );
                }
            }
            Mode::Weighted => {
                if t.kings == 0 || channel == 1 {
                    add_mass(out, base | channel << layout.channel_offset, mass.clone());
                } else {
                    // An unmarked state may keep every king white, or color
                    // exactly one of this block's kings black.
                    add_mass(out, base, mass.clone());
                    add_mass(
                        out,
                        base | 1 << layout.channel_offset,
                        mass * u32::from(t.kings),
                    );
                }
            }
        }
    }
}

fn step(
    states: StateMap,
    block: &Block,
    layout: &Layout,
    last_in_row: bool,
    mode: Mode,
    budget: usize,
    threads: usize,
) -> Result<StateMap> {
    let next = if threads > 1 && states.len() >= 2048 {
        let entries: Vec<(u64, BigCount)> = states.into_iter().collect();
        let chunk = entries.len().div_ceil(threads);
        let mut partials: Vec<StateMap> = Vec::with_capacity(threads);
        std::thread::scope(|scope| {
            let handles: Vec<_> = entries
                .chunks(chunk)
                .map(|slice| {
                    scope.spawn(move || {
                        let mut out = StateMap::default();
                        for (key, mass) in slice {
                            apply_state(*key, mass, block, layout, last_in_row, mode, &mut out);
                        }
                        out
                    })
                })
                .collect();
            for handle in handles {
                partials.push(handle.join().expect("contraction worker panicked"));
            }
        });
        let mut merged = partials.pop().unwrap_or_default();
        for partial in partials {
            for (key, mass) in partial {
                add_mass(&mut merged, key, mass);
            }
        }
        merged
    } else {
        let mut out = StateMap::default();
        for (key, mass) in &states {
            apply_state(*key, mass, block, layout, last_in_row, mode, &mut out);
        }
        out
    };
    if next.len() > budget {
        return Err(Error::BudgetExceeded {
            predicted: next.len() as u128,
            budget,
        });
    }
    Ok(next)
}

/// Runs the contraction over the boundary grid and returns the accepted mass
/// per channel value (a single entry for plain mode).
fn contract(shape: GridShape, opts: &ContractOptions, mode: Mode) -> Result<Vec<BigCount>> {
    check_merge_width(opts.merge_width)?;
    let canonical = shape.canonicalize();
    let frontier_cells = canonical.m as usize + 1;
    let rows = canonical.n as usize + 1;

    let layout = build_layout(frontier_cells, opts.merge_width, mode)?;
    let predicted = dense_state_estimate(&layout, mode);
    if predicted > opts.state_budget as u128 {
        return Err(Error::BudgetExceeded {
            predicted,
            budget: opts.state_budget,
        });
    }
    let threads = if opts.threads == 0 {
        std::thread::available_parallelism().map_or(1, |p| p.get())
    } else {
        opts.threads
    };

    let mut states = StateMap::default();
    states.insert(layout.blank_key, BigCount::from(1u32));
    let last = layout.blocks.len() - 1;
    for _row in 0..rows {
        for (b, block) in layout.blocks.iter().enumerate() {
            states = step(
                states,
                block,
                &layout,
                b == last,
                mode,
                opts.state_budget,
                threads,
            )?;
        }
    }

    let channels = match mode {
        Mode::Plain => 1,
        Mode::Weighted => 2,
        Mode::ByC { cap } => cap + 1,
    };
    let profile_mask = (1u64 << layout.channel_offset) - 1;
    let mut accepted = vec![BigCount::zero(); channels];
    for (key, mass) in states {
        if key & profile_mask == layout.blank_key {
            accepted[(key >> layout.channel_offset) as usize] += mass;
        }
    }
    Ok(accepted)
}

/// Total number of independent sets, via frontier contraction at merge width `l`.
pub fn contract_count(shape: GridShape, l: usize) -> Result<BigCount> {
    contract_count_with(shape, &ContractOptions::with_merge_width(l))
}

pub fn contract_count_with(shape: GridShape, opts: &ContractOptions) -> Result<BigCount> {
    let accepted = contract(shape, opts, Mode::Plain)?;
    Ok(accepted.into_iter().next().expect("one channel"))
}

/// Full count table, tracking the number of king-marked tiles per state.
pub fn contract_count_by_c(shape: GridShape, l: usize) -> Result<CountTable> {
    contract_count_by_c_with(shape, &ContractOptions::with_merge_width(l), None)
}

/// Count table restricted to `c <= max_c`; states that exceed the cap are
/// discarded during the sweep, which keeps the channel small.
pub fn contract_count_by_c_capped(shape: GridShape, l: usize, max_c: usize) -> Result<CountTable> {
    contract_count_by_c_with(shape, &ContractOptions::with_merge_width(l), Some(max_c))
}

pub fn contract_count_by_c_with(
    shape: GridShape,
    opts: &ContractOptions,
    max_c: Option<usize>,
) -> Result<CountTable> {
    let c_max = shape.max_independent_size();
    let cap = max_c.map_or(c_max, |c| c.min(c_max));
    let counts = contract(shape, opts, Mode::ByC { cap })?;
    Ok(CountTable { shape, counts })
}

/// Vertex-weighted enumeration: configurations with exactly one black king.
///
/// States carry a marker channel realizing the primed-alphabet construction:
/// the sweep starts unmarked, each king placement in an unmarked state may
/// color that king black (setting the marker), and only marked final states
/// are accepted. Equivalent to the sum of `c * N(c)`.
pub fn contract_weighted(shape: GridShape, l: usize) -> Result<BigCount> {
    contract_weighted_with(shape, &ContractOptions::with_merge_width(l))
}

pub fn contract_weighted_with(shape: GridShape, opts: &ContractOptions) -> Result<BigCount> {
    let accepted = contract(shape, opts, Mode::Weighted)?;
    Ok(accepted.into_iter().nth(1).expect("marked channel"))
}
