mod common;

use common::{monomial_formula_mismatches, prime, table23_cells, table23_mismatches};

#[test]
fn tables_of_monomial_images() {
    for v in [5, 7, 11, 13, 17, 19] {
        let p = prime(v);
        let bad = table23_mismatches(p);
        assert!(bad.is_empty(), "p = {v}: {bad:#?}");
        assert!(table23_cells(p) > 7 * (v as usize));
    }
}

#[test]
fn monomial_formula_matches_pipeline() {
    for v in [5, 7, 11, 13] {
        assert!(monomial_formula_mismatches(prime(v)).is_empty(), "p = {v}");
    }
}
