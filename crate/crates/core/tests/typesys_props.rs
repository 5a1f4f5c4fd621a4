mod common;

use common::props;

#[test]
fn subsumption_is_semantic_order() {
    props::subsumption_is_semantic_order(256);
}

#[test]
fn type_application_is_semantic() {
    props::type_application_is_semantic(256);
}

#[test]
fn interpretation_ignores_high_strata() {
    props::interpretation_ignores_high_strata(256);
}

#[test]
fn domination_deciders_agree_with_order() {
    props::domination_deciders_agree_with_order(256);
}

#[test]
fn representations_round_trip() {
    assert!(props::representations_round_trip() > 0);
}

#[test]
fn dual_interpretation_of_states() {
    props::dual_interpretation_of_states();
}
