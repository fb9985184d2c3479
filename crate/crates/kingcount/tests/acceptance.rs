//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `--nocapture` to see them on success).
//!
//! Criteria cover the pinned reference strips, four-way engine agreement,
//! the tiling bijection, closed forms, the Fibonacci alphabet law, peak
//! locations and the rounding identity, the extrapolated constants, the
//! weighted/peak inequalities, and byte-level determinism across thread
//! counts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::OnceLock;

use num_traits::Zero;

use kingcount::catalog::{fixtures, Mode};
use kingcount::estimate::{
    argmax_c, desk_grid, estimate_constants, peak_location, Dataset, DatasetNeeds, DensityKind,
    EstimateOptions,
};
use kingcount::kinggraph::{
    brute_force_count_table, brute_force_tile_packings, brute_force_weighted,
    max_independent_count_closed_form,
};
use kingcount::wang::{merge_tiles, predict_state_size, vertical_alphabet};
use kingcount::{fibonacci, profile_dp, wang, BigCount, CountTable, GridShape};

fn shape(m: u32, n: u32) -> GridShape {
    GridShape::new(m, n).unwrap()
}

fn report(criterion: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion:02} {verdict}: {detail}");
    assert!(pass, "criterion {criterion:02} failed: {detail}");
}

/// Reference peak locations c(m,n) for boards through 12x12 (row m, column n).
const PEAK_TABLE_12: [[usize; 12]; 12] = [
    [0, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 4],
    [1, 1, 1, 2, 2, 2, 3, 3, 3, 4, 4, 4],
    [1, 1, 2, 2, 3, 4, 4, 5, 5, 6, 6, 7],
    [1, 2, 2, 3, 4, 4, 5, 6, 6, 7, 7, 8],
    [2, 2, 3, 4, 4, 5, 6, 7, 8, 8, 9, 10],
    [2, 2, 4, 4, 5, 6, 7, 8, 9, 10, 11, 12],
    [2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13],
    [2, 3, 5, 6, 7, 8, 9, 10, 12, 13, 14, 15],
    [3, 3, 5, 6, 8, 9, 10, 12, 13, 14, 16, 17],
    [3, 4, 6, 7, 8, 10, 11, 13, 14, 16, 17, 19],
    [3, 4, 6, 7, 9, 11, 12, 14, 16, 17, 19, 20],
    [4, 4, 7, 8, 10, 12, 13, 15, 17, 19, 20, 22],
];

/// Canonical count tables for every m <= n <= 12, via the profile engine.
fn tables_through_12() -> &'static BTreeMap<(u32, u32), CountTable> {
    static TABLES: OnceLock<BTreeMap<(u32, u32), CountTable>> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut map = BTreeMap::new();
        for m in 1..=12u32 {
            for n in m..=12u32 {
                map.insert((m, n), profile_dp::dp_count_by_c(shape(m, n)).unwrap());
            }
        }
        map
    })
}

/// The criterion-8 dataset: full tables and weighted totals over the desk
/// grid 10 <= m <= n, m+n <= 40.
fn desk_dataset() -> &'static Dataset {
    static DATASET: OnceLock<Dataset> = OnceLock::new();
    DATASET.get_or_init(|| Dataset::compute(&desk_grid(10, 40), DatasetNeeds::all(), 0).unwrap())
}

/// Criterion 1 output, used verbatim for the determinism rerun.
fn strip_output(threads: usize) -> String {
    let mut out = String::new();
    for n in 1..=10u32 {
        let value = profile_dp::dp_count_with(shape(n, 39), threads).unwrap();
        writeln!(out, "count {n}x39 = {value}").unwrap();
    }
    for n in 1..=10u32 {
        let value = profile_dp::dp_weighted_with(shape(n, 36), threads).unwrap();
        writeln!(out, "weighted {n}x36 = {value}").unwrap();
    }
    out
}

/// Criterion 8 output, used verbatim for the determinism rerun.
fn constants_output(dataset: &Dataset) -> String {
    let opts = EstimateOptions::default();
    let mut out = String::new();
    for kind in [
        DensityKind::FreeEnergy,
        DensityKind::PeakFreeEnergy,
        DensityKind::WeightedFreeEnergy,
        DensityKind::PeakDensity,
    ] {
        let fit = estimate_constants(dataset, kind, &opts).unwrap();
        writeln!(
            out,
            "{} intercept={:.12} slope={:.12} residual={:.12} points={}",
            kind.label(),
            fit.intercept,
            fit.slope,
            fit.residual_max,
            fit.points_used
        )
        .unwrap();
    }
    out
}

#[test]
fn c01_reference_strips_exact() {
    let output = strip_output(0);
    let mut failures = Vec::new();
    for fixture in fixtures() {
        let canonical = fixture.shape.canonicalize();
        let actual = match fixture.mode {
            Mode::Count => profile_dp::dp_count(canonical).unwrap(),
            Mode::Weighted => profile_dp::dp_weighted(canonical).unwrap(),
            Mode::CountByC => unreachable!("no table fixtures"),
        };
        if actual.to_string() != fixture.expected {
            failures.push(format!(
                "{} {}: expected {} got {}",
                fixture.mode, canonical, fixture.expected, actual
            ));
        }
    }
    assert_eq!(output.lines().count(), 20);
    report(
        1,
        failures.is_empty(),
        &format!(
            "20 strip values exact (counts 39-strip, weighted 36-strip){}",
            failures.join("; ")
        ),
    );
}

#[test]
fn c02_oracle_equivalence_all_shapes_up_to_36_vertices() {
    let mut checked = 0;
    for m in 1..=6u32 {
        for n in m..=36u32 {
            let s = shape(m, n);
            if s.area() > 36 {
                continue;
            }
            let oracle_table = brute_force_count_table(s).unwrap();
            let oracle_weighted = brute_force_weighted(s).unwrap();
            let oracle_count = oracle_table.total();

            for l in [1, 4] {
                assert_eq!(
                    wang::contract_count(s, l).unwrap(),
                    oracle_count,
                    "{s} count l={l}"
                );
                assert_eq!(
                    wang::contract_count_by_c(s, l).unwrap().counts,
                    oracle_table.counts,
                    "{s} table l={l}"
                );
                assert_eq!(
                    wang::contract_weighted(s, l).unwrap(),
                    oracle_weighted,
                    "{s} weighted l={l}"
                );
            }
            assert_eq!(profile_dp::dp_count(s).unwrap(), oracle_count, "{s}");
            assert_eq!(
                profile_dp::dp_count_by_c(s).unwrap().counts,
                oracle_table.counts,
                "{s}"
            );
            assert_eq!(profile_dp::dp_weighted(s).unwrap(), oracle_weighted, "{s}");
            checked += 1;
        }
    }
    report(
        2,
        checked == 73,
        &format!(
            "wang(l=1,4), profile, and brute force agree on N, tables, W over {checked} shapes"
        ),
    );
}

#[test]
fn c03_bijection_with_tile_packings() {
    let mut checked = 0;
    for m in 1..=6u32 {
        for n in m..=20u32 {
            let s = shape(m, n);
            if u64::from(s.m + 1) * u64::from(s.n + 1) > 42 {
                continue;
            }
            let packings = brute_force_tile_packings(s).unwrap();
            assert_eq!(packings, profile_dp::dp_count(s).unwrap(), "{s} vs engine");
            assert_eq!(
                packings,
                brute_force_count_table(s).unwrap().total(),
                "{s} vs oracle"
            );
            checked += 1;
        }
    }
    report(
        3,
        checked > 0,
        &format!("2x2-block packings equal independent-set counts on {checked} shapes"),
    );
}

#[test]
fn c04_closed_forms() {
    for ((m, n), table) in tables_through_12() {
        if let Some(expected) = max_independent_count_closed_form(shape(*m, *n)) {
            assert_eq!(
                table.counts[table.c_max()],
                expected,
                "{m}x{n} maximum-set count"
            );
        }
    }
    assert_eq!(
        tables_through_12()[&(4, 5)].counts[6],
        BigCount::from(27u32)
    );
    for n in 1..=60u32 {
        assert_eq!(
            profile_dp::dp_count(shape(1, n)).unwrap(),
            BigCount::from(fibonacci(n + 2)),
            "1x{n}"
        );
    }
    report(
        4,
        true,
        "odd-parity maximum-set closed forms through 12x12; 1xn counts are Fibonacci through n=60",
    );
}

#[test]
fn c05_alphabet_law_and_state_size() {
    let sizes: Vec<u64> = (1..=8)
        .map(|l| vertical_alphabet(&merge_tiles(l).unwrap()).len() as u64)
        .collect();
    for (i, size) in sizes.iter().enumerate() {
        assert_eq!(*size, fibonacci(i as u32 + 3), "l={}", i + 1);
    }
    assert_eq!(sizes[1], 3);
    assert_eq!(sizes[2], 5);
    assert_eq!(sizes[3], 8);
    assert_eq!(predict_state_size(39, 4).unwrap(), 805_306_368);
    report(
        5,
        true,
        "vertical alphabets are F(l+2) for l=1..8 (3, 5, 8 at l=2,3,4); state size 6*8^9 at width 39",
    );
}

#[test]
fn c06_peak_locations_match_reference_table() {
    let tables = tables_through_12();
    let mut mismatches = Vec::new();
    for m in 1..=12u32 {
        for n in 1..=12u32 {
            let canonical = shape(m, n).canonicalize();
            let got = argmax_c(&tables[&(canonical.m, canonical.n)]);
            let expected = PEAK_TABLE_12[m as usize - 1][n as usize - 1];
            if got != expected {
                mismatches.push(format!("{m}x{n}: reference {expected}, engine {got}"));
            }
        }
    }
    assert_eq!(argmax_c(&tables[&(10, 10)]), 16);
    assert_eq!(argmax_c(&tables[&(5, 5)]), 4);
    report(
        6,
        mismatches.is_empty(),
        &format!(
            "argmax with smaller-tie rule reproduces the 12x12 reference table; 10x10=16, 5x5=4{}{}",
            if mismatches.is_empty() { "" } else { "; mismatches: " },
            mismatches.join(", ")
        ),
    );
}

#[test]
fn c07_rounding_identity() {
    let mut checked = 0;
    for table in tables_through_12().values() {
        let c = argmax_c(table);
        if c == 0 || c + 1 >= table.counts.len() {
            continue;
        }
        if table.counts[c - 1].is_zero() || table.counts[c + 1].is_zero() {
            continue;
        }
        let c_bar = peak_location(table).unwrap();
        assert_eq!(
            (c_bar + 0.5).floor() as usize,
            c,
            "{} c_bar={c_bar}",
            table.shape
        );
        checked += 1;
    }
    report(
        7,
        checked > 0,
        &format!("floor(c_bar + 0.5) recovers the integer peak on {checked} interpolable tables"),
    );
}

#[test]
fn c08_constants_within_tolerance() {
    let dataset = desk_dataset();
    let opts = EstimateOptions::default();

    let free = estimate_constants(dataset, DensityKind::FreeEnergy, &opts).unwrap();
    let peak = estimate_constants(dataset, DensityKind::PeakDensity, &opts).unwrap();
    let weighted = estimate_constants(dataset, DensityKind::WeightedFreeEnergy, &opts).unwrap();

    let mut clauses = Vec::new();
    let mut all_pass = true;
    let mut clause = |name: &str, pass: bool, detail: String| {
        clauses.push(format!(
            "{name} {} ({detail})",
            if pass { "ok" } else { "FAIL" }
        ));
        all_pass &= pass;
    };

    clause(
        "free-energy intercept",
        (free.intercept - 0.2946407678).abs() < 7e-4,
        format!("{:.10} vs 0.2946407678 tol 7e-4", free.intercept),
    );
    clause(
        "free-energy slope",
        (free.slope - 0.13549).abs() < 2e-2,
        format!("{:.6} vs 0.13549 tol 2e-2", free.slope),
    );
    clause(
        "exp(intercept)",
        (free.intercept.exp() - 1.342643951).abs() < 1e-3,
        format!("{:.9} vs 1.342643951 tol 1e-3", free.intercept.exp()),
    );
    clause(
        "peak-density intercept",
        (peak.intercept - 0.1366741).abs() < 3e-3,
        format!("{:.7} vs 0.1366741 tol 3e-3", peak.intercept),
    );
    clause(
        "weighted-free-energy slope in (0.12, 0.18)",
        weighted.slope > 0.12 && weighted.slope < 0.18,
        format!("{:.6}", weighted.slope),
    );

    report(8, all_pass, &clauses.join("; "));
}

#[test]
fn c09_proposition_inequalities() {
    // Peak bound on every computed table: peak * (c_max + 1) >= total.
    let mut tables_checked = 0;
    let small_tables = tables_through_12();
    let dataset = desk_dataset();
    for table in small_tables.values().chain(dataset.tables.values()) {
        let peak = &table.counts[argmax_c(table)];
        assert!(
            peak * BigCount::from(table.c_max() as u64 + 1) >= table.total(),
            "{} peak bound",
            table.shape
        );
        tables_checked += 1;
    }

    // Weighted comparisons on the oracle grid plus the desk grid.
    let mut weighted_checked = 0;
    let mut weighted_pairs: Vec<(GridShape, BigCount, BigCount)> = Vec::new();
    for m in 1..=6u32 {
        for n in m..=36u32 {
            let s = shape(m, n);
            if s.area() <= 36 {
                weighted_pairs.push((
                    s,
                    profile_dp::dp_count(s).unwrap(),
                    profile_dp::dp_weighted(s).unwrap(),
                ));
            }
        }
    }
    for (&(m, n), w) in &dataset.weighted {
        weighted_pairs.push((shape(m, n), dataset.counts[&(m, n)].clone(), w.clone()));
    }
    for (s, count, weighted) in &weighted_pairs {
        if s.m >= 3 || s.n >= 3 {
            assert!(weighted >= count, "{s}: W < N");
        }
        // ln W <= ln N + ln((m+1)(n+1)/4), checked exactly as 4W <= (m+1)(n+1)N.
        assert!(
            weighted * BigCount::from(4u32)
                <= count * BigCount::from(u64::from(s.m + 1) * u64::from(s.n + 1)),
            "{s}: weighted upper bound"
        );
        weighted_checked += 1;
    }

    let w12 = profile_dp::dp_weighted(shape(1, 2)).unwrap();
    let n12 = profile_dp::dp_count(shape(1, 2)).unwrap();
    assert_eq!(w12, BigCount::from(2u32));
    assert_eq!(n12, BigCount::from(3u32));
    assert!(w12 < n12);

    report(
        9,
        true,
        &format!(
            "peak bound on {tables_checked} tables; weighted bounds on {weighted_checked} shapes; W(1x2)=2 < N(1x2)=3"
        ),
    );
}

#[test]
fn c10_determinism_across_thread_counts() {
    let strip_reference = strip_output(1);
    for threads in [2, 8] {
        assert_eq!(
            strip_output(threads),
            strip_reference,
            "strip output differs at {threads} threads"
        );
    }

    let grid = desk_grid(10, 40);
    let constants_reference =
        constants_output(&Dataset::compute(&grid, DatasetNeeds::all(), 1).unwrap());
    for threads in [2, 8] {
        let rerun =
            constants_output(&Dataset::compute(&grid, DatasetNeeds::all(), threads).unwrap());
        assert_eq!(
            rerun, constants_reference,
            "constants output differs at {threads} threads"
        );
    }
    report(
        10,
        true,
        "strip and constants outputs byte-identical at 1, 2, and 8 threads",
    );
}
