mod common;

use common::*;
use oofa::formats::{format_design, parse_design, parse_measure, parse_system, read_dataset};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn systems_round_trip(sys in arb_system(10)) {
        system_round_trip(&sys)?;
    }

    #[test]
    fn designs_round_trip(d in arb_design()) {
        design_round_trip(&d)?;
    }

    #[test]
    fn measures_round_trip(f in arb_measure()) {
        measure_round_trip(&f)?;
    }

    #[test]
    fn roundings_round_trip(f in arb_rounding()) {
        rounding_round_trip(&f)?;
    }

    #[test]
    fn datasets_round_trip(d in arb_dataset()) {
        dataset_round_trip(&d)?;
    }

    #[test]
    fn reports_round_trip(r in arb_report()) {
        report_round_trip(&r)?;
    }
}

#[test]
fn survey_fixture_ingests() {
    let f = std::fs::File::open(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/survey.csv")).unwrap();
    let d = read_dataset(f).unwrap();
    assert_eq!((d.len(), d.m()), (66, 6));
    assert_eq!(d.rows().iter().filter(|r| r.response.is_none()).count(), 1);
    assert!(d.rows()[2].response.is_none());
}

#[test]
fn fixture_design_parses() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/c2_m6_1to3.txt")).unwrap();
    let d = parse_design(&text).unwrap();
    assert_eq!((d.m, d.rows.len()), (6, 120));
    assert!(d.spec.is_none() && d.system.is_none());
    assert_eq!(parse_design(&format_design(&d)).unwrap(), d);
}

#[test]
fn malformed_inputs_are_rejected() {
    assert!(parse_system("m = x").is_err());
    assert!(parse_system("group = 1,2\ngroup = 2,3").is_err());
    assert!(parse_system("m = 4\nwithin = 1->5").is_err());
    assert!(parse_measure("1,2 ; 0.5\n2,1 ; 0.4\n").is_err());
    assert!(parse_measure("1,2 ; -0.5\n2,1 ; 1.5\n").is_err());
    assert!(parse_measure("1,2 0.5\n").is_err());
    assert!(read_dataset("id,score,duration_seconds\n1,2,3\n".as_bytes()).is_err());
    assert!(read_dataset("id,score,duration_seconds,pi1,pi2\n1,2,3,1,1\n".as_bytes()).is_err());
    assert!(read_dataset("id,score,duration_seconds,pi1,pi2\n1,2,3,1,2\n1,2,3,2,1\n".as_bytes()).is_err());
}
