//! Constants pipeline: per-shape densities, quadratic peak interpolation, and
//! weighted affine fits in the boundary density (m+n)/(mn).
//!
//! Finite boards deviate from the infinite-board limits roughly in proportion
//! to their boundary density, so fitting a density observable against
//! (m+n)/(mn) and reading off the intercept extrapolates to the infinite
//! king graph. The observables: the average free energy ln N/(mn), its peak
//! variant ln N̂/(mn), the weighted analogue ln W/(mn), and the maximum
//! entropy density c̄/(mn).

use std::collections::BTreeMap;

use num_traits::{ToPrimitive, Zero};

use crate::kinggraph::{CountTable, GridShape};
use crate::{profile_dp, BigCount, Error, Result};

/// Which density observable a record carries.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum DensityKind {
    /// ln N / (mn): average free energy of the board.
    FreeEnergy,
    /// ln N̂ / (mn), where N̂ is the count at the peak vertex number.
    PeakFreeEnergy,
    /// ln W / (mn): weighted-enumeration analogue.
    WeightedFreeEnergy,
    /// c̄ / (mn): interpolated maximum entropy density.
    PeakDensity,
}

impl DensityKind {
    pub fn label(self) -> &'static str {
        match self {
            DensityKind::FreeEnergy => "free-energy",
            DensityKind::PeakFreeEnergy => "peak-free-energy",
            DensityKind::WeightedFreeEnergy => "weighted-free-energy",
            DensityKind::PeakDensity => "peak-density",
        }
    }
}

/// One observation: a density value `y` at boundary density `x`.
#[derive(Clone, Copy, Debug)]
pub struct DensityRecord {
    pub shape: GridShape,
    pub x: f64,
    pub y: f64,
    pub kind: DensityKind,
    pub area: u64,
}

/// Natural log of an exact count, accurate to well below 1e-14 relative
/// error even for counts of thousands of digits.
///
/// The top 64 bits supply the mantissa and the remaining bit length enters as
/// a multiple of ln 2, so the value never passes through a lossy whole-number
/// conversion.
pub fn ln_big(value: &BigCount) -> Result<f64> {
    if value.is_zero() {
        return Err(Error::NonPositiveValue);
    }
    let bits = value.bits();
    if bits <= 64 {
        return Ok((value.to_u64().expect("fits in u64") as f64).ln());
    }
    let shift = bits - 64;
    let top = (value >> shift).to_u64().expect("top 64 bits");
    Ok((top as f64).ln() + shift as f64 * std::f64::consts::LN_2)
}

/// Builds a logarithmic density record (free energy and its variants).
pub fn density_from_count(
    kind: DensityKind,
    shape: GridShape,
    value: &BigCount,
) -> Result<DensityRecord> {
    debug_assert!(kind != DensityKind::PeakDensity);
    let y = ln_big(value)? / shape.area() as f64;
    Ok(DensityRecord {
        shape,
        x: shape.boundary_density(),
        y,
        kind,
        area: shape.area(),
    })
}

/// Builds a peak-density record from an interpolated peak location.
pub fn density_from_peak(shape: GridShape, c_bar: f64) -> DensityRecord {
    DensityRecord {
        shape,
        x: shape.boundary_density(),
        y: c_bar / shape.area() as f64,
        kind: DensityKind::PeakDensity,
        area: shape.area(),
    }
}

/// Smallest `c` attaining the maximum count (the smaller-tie rule).
pub fn argmax_c(table: &CountTable) -> usize {
    let mut best = 0;
    for (c, count) in table.counts.iter().enumerate() {
        if count > &table.counts[best] {
            best = c;
        }
    }
    best
}

/// Vertex of the quadratic through (c-1, y_minus), (c, y0), (c+1, y_plus).
pub fn interpolate_peak(y_minus: f64, y0: f64, y_plus: f64, c: usize) -> Result<f64> {
    let denom = 2.0 * (2.0 * y0 - y_minus - y_plus);
    if denom.is_nan() || denom <= 0.0 || [y_minus, y0, y_plus].iter().any(|y| !y.is_finite()) {
        return Err(Error::NotConcave);
    }
    Ok(c as f64 + (y_plus - y_minus) / denom)
}

/// Interpolated peak location c̄ of a count table.
///
/// Falls back to the integer argmax when the peak sits at either end of the
/// table or a neighboring count is zero, matching the convention used for
/// the published peak tables.
pub fn peak_location(table: &CountTable) -> Result<f64> {
    let c = argmax_c(table);
    if c == 0 || c + 1 >= table.counts.len() {
        return Ok(c as f64);
    }
    let (lo, hi) = (&table.counts[c - 1], &table.counts[c + 1]);
    if lo.is_zero() || hi.is_zero() {
        return Ok(c as f64);
    }
    interpolate_peak(ln_big(lo)?, ln_big(&table.counts[c])?, ln_big(hi)?, c)
}

/// Weighting policy for the affine fit.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum FitWeighting {
    /// Weight proportional to (mn)^2: the unmodeled error shrinks like 1/(mn),
    /// so larger boards deserve quadratically more trust.
    #[default]
    AreaSquared,
    Uniform,
}

/// Affine-fit output: intercept (the limit constant), slope (the boundary
/// coefficient), and the worst residual as an honest uncertainty bracket.
#[derive(Clone, Copy, Debug)]
pub struct FitResult {
    pub intercept: f64,
    pub slope: f64,
    pub residual_max: f64,
    pub points_used: usize,
}

/// Weighted least squares of `y` on `x`.
///
/// Records are summed in shape order regardless of input order, so the result
/// is reproducible bit for bit.
pub fn fit_affine(records: &[DensityRecord], weighting: FitWeighting) -> Result<FitResult> {
    if records.len() < 2 {
        return Err(Error::InsufficientData {
            got: records.len(),
            need: 2,
        });
    }
    let mut sorted: Vec<&DensityRecord> = records.iter().collect();
    sorted.sort_by_key(|r| (r.shape.m, r.shape.n, r.kind));

    let weight_of = |r: &DensityRecord| match weighting {
        FitWeighting::AreaSquared => (r.area as f64) * (r.area as f64),
        FitWeighting::Uniform => 1.0,
    };
    let total_weight: f64 = sorted.iter().map(|r| weight_of(r)).sum();

    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for r in &sorted {
        let w = weight_of(r) / total_weight;
        sw += w;
        sx += w * r.x;
        sy += w * r.y;
        sxx += w * r.x * r.x;
        sxy += w * r.x * r.y;
    }
    let denom = sw * sxx - sx * sx;
    if denom.is_nan() || denom.abs() <= 1e-300 {
        return Err(Error::DegenerateFit);
    }
    let slope = (sw * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / sw;
    let residual_max = sorted
        .iter()
        .map(|r| (r.y - intercept - slope * r.x).abs())
        .fold(0.0f64, f64::max);
    Ok(FitResult {
        intercept,
        slope,
        residual_max,
        points_used: sorted.len(),
    })
}

/// Exact per-shape data feeding the fits: count tables for the peak
/// observables, plain counts for the free energy, weighted totals for the
/// weighted analogue.
#[derive(Clone, Debug, Default)]
pub struct Dataset {
    pub counts: BTreeMap<(u32, u32), BigCount>,
    pub tables: BTreeMap<(u32, u32), CountTable>,
    pub weighted: BTreeMap<(u32, u32), BigCount>,
}

/// Which per-shape quantities [`Dataset::compute`] should fill in.
#[derive(Clone, Copy, Debug)]
pub struct DatasetNeeds {
    pub tables: bool,
    pub weighted: bool,
}

impl DatasetNeeds {
    pub fn all() -> Self {
        DatasetNeeds {
            tables: true,
            weighted: true,
        }
    }

    pub fn counts_only() -> Self {
        DatasetNeeds {
            tables: false,
            weighted: false,
        }
    }
}

impl Dataset {
    /// Runs the profile engine over the given shapes. Shapes are processed
    /// sequentially; `threads` parallelizes within each transfer step, so the
    /// data is identical for every thread count.
    pub fn compute(shapes: &[GridShape], needs: DatasetNeeds, threads: usize) -> Result<Dataset> {
        let mut ds = Dataset::default();
        for &shape in shapes {
            let key = (shape.m, shape.n);
            if needs.tables {
                let table = profile_dp::dp_count_by_c_with(shape, threads)?;
                ds.counts.insert(key, table.total());
                ds.tables.insert(key, table);
            } else {
                ds.counts
                    .insert(key, profile_dp::dp_count_with(shape, threads)?);
            }
            if needs.weighted {
                ds.weighted
                    .insert(key, profile_dp::dp_weighted_with(shape, threads)?);
            }
        }
        Ok(ds)
    }
}

/// The canonical desk-scale fit grid: min_dim <= m <= n with m+n <= max_sum.
pub fn desk_grid(min_dim: u32, max_sum: u32) -> Vec<GridShape> {
    let mut shapes = Vec::new();
    for m in min_dim..=max_sum / 2 {
        for n in m..=max_sum.saturating_sub(m) {
            shapes.push(GridShape { m, n });
        }
    }
    shapes
}

/// Fit options: the minimum-dimension filter drops boards with strong parity
/// wobble, and the weighting policy is configurable for comparison runs.
#[derive(Clone, Copy, Debug)]
pub struct EstimateOptions {
    pub min_dim: u32,
    pub weighting: FitWeighting,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            min_dim: 10,
            weighting: FitWeighting::AreaSquared,
        }
    }
}

/// Assembles the records of a kind from the dataset, filters by minimum
/// dimension, and fits. The residual maximum of the returned fit doubles as
/// the reported uncertainty bracket.
pub fn estimate_constants(
    dataset: &Dataset,
    kind: DensityKind,
    opts: &EstimateOptions,
) -> Result<FitResult> {
    let mut records = Vec::new();
    let keep = |m: u32, n: u32| m.min(n) >= opts.min_dim;
    match kind {
        DensityKind::FreeEnergy => {
            for (&(m, n), count) in &dataset.counts {
                if keep(m, n) {
                    records.push(density_from_count(kind, GridShape { m, n }, count)?);
                }
            }
        }
        DensityKind::WeightedFreeEnergy => {
            for (&(m, n), w) in &dataset.weighted {
                if keep(m, n) {
                    records.push(density_from_count(kind, GridShape { m, n }, w)?);
                }
            }
        }
        DensityKind::PeakFreeEnergy => {
            for (&(m, n), table) in &dataset.tables {
                if keep(m, n) {
                    let peak = &table.counts[argmax_c(table)];
                    records.push(density_from_count(kind, GridShape { m, n }, peak)?);
                }
            }
        }
        DensityKind::PeakDensity => {
            for (&(m, n), table) in &dataset.tables {
                if keep(m, n) {
                    records.push(density_from_peak(GridShape { m, n }, peak_location(table)?));
                }
            }
        }
    }
    if records.len() < 2 {
        return Err(Error::InsufficientData {
            got: records.len(),
            need: 2,
        });
    }
    fit_affine(&records, opts.weighting)
}
