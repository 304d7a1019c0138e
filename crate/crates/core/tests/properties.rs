mod common;

fn assert_clean(what: &str, violations: Vec<String>) {
    assert!(violations.is_empty(), "{what}: {} violations\n{}", violations.len(), violations.join("\n"));
}

#[test]
fn projection_by_elimination_matches_support_oracle() {
    assert_clean("fm vs oracle", common::fm_matches_oracle(200, 1));
}

#[test]
fn lp_optimum_is_best_vertex() {
    assert_clean("lp vs vertices", common::lp_matches_vertices(100, 2));
}

#[test]
fn elimination_order_does_not_matter() {
    assert_clean("fm order", common::fm_order_independent(60, 3));
}

#[test]
fn bounds_are_nested_up_to_three_messages() {
    assert_clean("nesting", common::nesting(3));
}

#[test]
fn regions_follow_relabeling() {
    assert_clean("equivariance", common::equivariance(50, 4));
}

#[test]
fn inner_bound_is_hull_of_achievable_vertices() {
    assert_clean("grid", common::grid_convexity(3, 8));
}
