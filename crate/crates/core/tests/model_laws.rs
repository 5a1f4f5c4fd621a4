mod common;

use common::laws;

#[test]
fn galois_connections() {
    assert!(laws::galois_connections() > 0);
}

#[test]
fn lifts_are_sections_of_down() {
    assert!(laws::lifts_are_sections_of_down() > 0);
}

#[test]
fn decomposition() {
    assert!(laws::decomposition() > 0);
}

#[test]
fn application_commutes_with_strata() {
    assert!(laws::application_commutes_with_strata() > 0);
}

#[test]
fn fixpoints_match_brute_force() {
    laws::fixpoints_match_brute_force();
}
