//! Cross-engine and structural invariants on a small board grid: the three
//! engines agree in every mode, results are transpose- and merge-width-
//! invariant, and the weighted/peak inequalities hold.

use num_traits::Zero;

use kingcount::estimate::{argmax_c, peak_location};
use kingcount::kinggraph::{
    brute_force_count_table, brute_force_tile_packings, brute_force_weighted,
    max_independent_count_closed_form,
};
use kingcount::{profile_dp, wang, BigCount, GridShape};

fn shape(m: u32, n: u32) -> GridShape {
    GridShape::new(m, n).unwrap()
}

/// Canonical shapes with both dimensions small enough for quick sweeps.
fn test_grid() -> Vec<GridShape> {
    let mut shapes = Vec::new();
    for m in 1..=6u32 {
        for n in m..=8u32 {
            shapes.push(shape(m, n));
        }
    }
    shapes
}

#[test]
fn merge_width_independence() {
    for s in test_grid() {
        let reference = wang::contract_count(s, 1).unwrap();
        for l in 2..=4 {
            assert_eq!(wang::contract_count(s, l).unwrap(), reference, "{s} l={l}");
        }
    }
    // A wider spot check beyond the dense grid.
    let reference = wang::contract_count(shape(12, 13), 1).unwrap();
    for l in 2..=4 {
        assert_eq!(wang::contract_count(shape(12, 13), l).unwrap(), reference);
    }
}

#[test]
fn engines_and_modes_are_consistent() {
    for s in test_grid() {
        let table = profile_dp::dp_count_by_c(s).unwrap();
        let count = profile_dp::dp_count(s).unwrap();
        let weighted = profile_dp::dp_weighted(s).unwrap();
        assert_eq!(table.total(), count, "{s}");
        assert_eq!(table.weighted_total(), weighted, "{s}");

        let wang_table = wang::contract_count_by_c(s, 4).unwrap();
        assert_eq!(wang_table.counts, table.counts, "{s}");
        assert_eq!(wang::contract_count(s, 4).unwrap(), count, "{s}");
        assert_eq!(wang::contract_weighted(s, 4).unwrap(), weighted, "{s}");
    }
}

#[test]
fn transpose_symmetry_of_full_tables() {
    for (m, n) in [(2, 5), (3, 7), (4, 6), (1, 8)] {
        let a = profile_dp::dp_count_by_c(shape(m, n)).unwrap();
        let b = profile_dp::dp_count_by_c(shape(n, m)).unwrap();
        assert_eq!(a.counts, b.counts, "{m}x{n}");
    }
}

#[test]
fn bijection_against_tile_packings() {
    for s in test_grid() {
        if u64::from(s.m + 1) * u64::from(s.n + 1) <= 42 {
            let packings = brute_force_tile_packings(s).unwrap();
            assert_eq!(packings, profile_dp::dp_count(s).unwrap(), "{s}");
        }
    }
}

#[test]
fn oracle_agreement() {
    for s in test_grid() {
        if s.area() <= 36 {
            let oracle = brute_force_count_table(s).unwrap();
            assert_eq!(profile_dp::dp_count_by_c(s).unwrap().counts, oracle.counts);
            assert_eq!(
                brute_force_weighted(s).unwrap(),
                profile_dp::dp_weighted(s).unwrap()
            );
        }
    }
}

#[test]
fn closed_form_matches_engines() {
    for s in test_grid() {
        if let Some(expected) = max_independent_count_closed_form(s) {
            let table = profile_dp::dp_count_by_c(s).unwrap();
            assert_eq!(table.counts[table.c_max()], expected, "{s}");
        }
    }
}

#[test]
fn weighted_and_peak_inequalities() {
    for s in test_grid() {
        let table = profile_dp::dp_count_by_c(s).unwrap();
        let total = table.total();
        let weighted = table.weighted_total();
        if s.m >= 3 || s.n >= 3 {
            assert!(weighted >= total, "{s}");
        }
        // Peak count times the number of possible sizes bounds the total.
        let peak = &table.counts[argmax_c(&table)];
        assert!(
            peak * BigCount::from(table.c_max() as u64 + 1) >= total,
            "{s}"
        );
        // Weighted enumeration never exceeds (m+1)(n+1)/4 configurations per set.
        assert!(
            &weighted * BigCount::from(4u32)
                <= total * BigCount::from(u64::from(s.m + 1) * u64::from(s.n + 1)),
            "{s}"
        );
    }
}

#[test]
fn rounding_identity_on_small_grid() {
    for s in test_grid() {
        let table = profile_dp::dp_count_by_c(s).unwrap();
        let c = argmax_c(&table);
        if c == 0 || c + 1 >= table.counts.len() {
            continue;
        }
        if table.counts[c - 1].is_zero() || table.counts[c + 1].is_zero() {
            continue;
        }
        let c_bar = peak_location(&table).unwrap();
        assert_eq!((c_bar + 0.5).floor() as usize, c, "{s} c_bar={c_bar}");
    }
}
