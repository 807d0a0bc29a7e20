//! Generators and round-trip checks shared by the format tests and the
//! acceptance run.

#![allow(dead_code)]

use num_rational::BigRational;
use oofa::analysis::{Dataset, Observation};
use oofa::formats::*;
use oofa_core::criteria::{CriterionReport, DesignMeasure, ExactEfficiencies};
use oofa_core::model::derive_model;
use oofa_core::{ConstraintSystem, GroupPartition, Label, ModelSpec, Order, PairwiseConstraint};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

/// Group sizes plus at most one within constraint per group.
pub fn arb_system(max_m: usize) -> impl Strategy<Value = ConstraintSystem> {
    (
        prop::collection::vec(1usize..=4, 1..=4),
        prop::collection::vec((any::<bool>(), 0usize..16, 0usize..16, any::<bool>()), 4),
    )
        .prop_filter("m too large", move |(sizes, _)| sizes.iter().sum::<usize>() <= max_m)
        .prop_map(|(sizes, picks)| {
            let part = GroupPartition::from_sizes(&sizes).unwrap();
            let mut within = Vec::new();
            for (g, (on, a, b, flip)) in part.groups().iter().zip(picks) {
                if !on || g.len() < 2 {
                    continue;
                }
                let i = a % g.len();
                let j = (i + 1 + b % (g.len() - 1)) % g.len();
                let (x, y) = if flip { (g[j], g[i]) } else { (g[i], g[j]) };
                within.push(PairwiseConstraint::new(x, y).unwrap());
            }
            ConstraintSystem::new(part, within).unwrap()
        })
}

pub fn arb_order(m: usize) -> impl Strategy<Value = Order> {
    Just((1..=m as Label).collect::<Vec<_>>()).prop_shuffle().prop_map(|v| Order::new(v).unwrap())
}

pub fn arb_design() -> impl Strategy<Value = DesignFile> {
    (arb_system(7), any::<bool>(), any::<bool>()).prop_flat_map(|(sys, with_spec, with_prov)| {
        let m = sys.m();
        prop::collection::vec(arb_order(m), 0..20).prop_map(move |rows| DesignFile {
            m,
            spec: with_spec.then(|| derive_model(&sys)),
            system: Some(sys.clone()),
            provenance: with_prov.then(|| format!("construction=c4; rows={}", rows.len())),
            rows,
        })
    })
}

pub fn arb_measure() -> impl Strategy<Value = MeasureFile> {
    (2usize..=6).prop_flat_map(|m| {
        prop::collection::vec((arb_order(m), 0.0f64..1.0), 1..12).prop_map(move |pts| {
            let total: f64 = pts.iter().map(|p| p.1 + 1e-3).sum();
            let (support, weights): (Vec<Order>, Vec<f64>) =
                pts.into_iter().map(|(o, w)| (o, (w + 1e-3) / total)).unzip();
            let weights = normalize(weights);
            MeasureFile { spec: Some(ModelSpec::full(m)), measure: DesignMeasure::new(support, weights).unwrap() }
        })
    })
}

fn normalize(mut w: Vec<f64>) -> Vec<f64> {
    for _ in 0..2 {
        let t: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= t);
    }
    w
}

pub fn arb_rounding() -> impl Strategy<Value = RoundingFile> {
    (2usize..=6).prop_flat_map(|m| {
        prop::collection::vec((arb_order(m), 0u64..50), 0..12)
            .prop_map(move |rows| RoundingFile { spec: Some(ModelSpec::full(m)), rows })
    })
}

pub fn arb_dataset() -> impl Strategy<Value = Dataset> {
    (2usize..=7, any::<bool>()).prop_flat_map(|(m, extra)| {
        prop::collection::vec(
            (arb_order(m), prop::option::of(-1e6f64..1e6), 0.0f64..1e5, "[a-z0-9 .]{0,6}"),
            1..30,
        )
        .prop_map(move |rows| {
            let cols = if extra { vec!["note".to_string()] } else { vec![] };
            let rows = rows
                .into_iter()
                .enumerate()
                .map(|(i, (order, response, duration_seconds, note))| Observation {
                    id: format!("p{i}"),
                    order,
                    response,
                    duration_seconds,
                    extra: if extra { vec![note.trim().to_string()] } else { vec![] },
                })
                .collect();
            Dataset::new(m, cols, rows).unwrap()
        })
    })
}

fn arb_rational() -> impl Strategy<Value = BigRational> {
    (-1000i64..1000, 1i64..1000).prop_map(|(a, b)| BigRational::new(a.into(), b.into()))
}

pub fn arb_report() -> impl Strategy<Value = CriterionReport> {
    let f = || -1e6f64..1e6;
    (
        (1usize..40, prop::option::of(0u64..100_000), prop::option::of(f()), f(), prop::option::of(f())),
        (prop::option::of(f()), f(), f(), any::<bool>(), any::<bool>()),
        prop::option::of((prop::option::of(arb_rational()), arb_rational(), prop::option::of(arb_rational()))),
    )
        .prop_map(|((p, runs, a_value, d_value, g_value), (a_eff, d_eff, g_eff, g_exhaustive, singular), exact)| {
            CriterionReport {
                p,
                runs,
                a_value,
                d_value,
                g_value,
                a_eff,
                d_eff,
                g_eff,
                g_exhaustive,
                singular,
                exact: exact.map(|(a_eff, d_ratio, g_eff)| ExactEfficiencies { a_eff, d_ratio, g_eff }),
            }
        })
}

fn fail(e: impl std::fmt::Display) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

pub fn system_round_trip(sys: &ConstraintSystem) -> Result<(), TestCaseError> {
    prop_assert_eq!(&parse_system(&format_system(sys)).map_err(fail)?, sys);
    prop_assert_eq!(&parse_system(&format_system_inline(sys)).map_err(fail)?, sys);
    Ok(())
}

pub fn design_round_trip(d: &DesignFile) -> Result<(), TestCaseError> {
    prop_assert_eq!(&parse_design(&format_design(d)).map_err(fail)?, d);
    Ok(())
}

/// Weights are printed to 12 significant digits: the parsed value agrees to
/// that precision and is itself reproduced exactly.
pub fn measure_round_trip(f: &MeasureFile) -> Result<(), TestCaseError> {
    let text = format_measure(f);
    let back = parse_measure(&text).map_err(fail)?;
    prop_assert_eq!(&back.spec, &f.spec);
    prop_assert_eq!(back.measure.support(), f.measure.support());
    for (a, b) in back.measure.weights().iter().zip(f.measure.weights()) {
        prop_assert!((a - b).abs() <= 1e-11 * b.max(1e-300) + 1e-15, "{} vs {}", a, b);
    }
    prop_assert_eq!(format_measure(&back), text.clone());
    prop_assert_eq!(parse_measure(&text).map_err(fail)?, back);
    Ok(())
}

pub fn rounding_round_trip(f: &RoundingFile) -> Result<(), TestCaseError> {
    prop_assert_eq!(&parse_rounding(&format_rounding(f)).map_err(fail)?, f);
    Ok(())
}

pub fn dataset_round_trip(d: &Dataset) -> Result<(), TestCaseError> {
    let text = write_dataset(d).map_err(fail)?;
    prop_assert_eq!(&read_dataset(text.as_bytes()).map_err(fail)?, d);
    Ok(())
}

pub fn report_round_trip(r: &CriterionReport) -> Result<(), TestCaseError> {
    prop_assert_eq!(&parse_report(&format_report(r)).map_err(fail)?, r);
    Ok(())
}
