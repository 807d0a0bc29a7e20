use oofa::analysis::*;
use oofa::formats::read_dataset;
use oofa_core::model::derive_model;
use oofa_core::perm::enumerate_feasible;
use oofa_core::{ConstraintSystem, GroupPartition, Order, PairwiseConstraint};
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::SeedableRng;

fn case_system() -> ConstraintSystem {
    ConstraintSystem::new(GroupPartition::from_sizes(&[2, 4]).unwrap(), vec![PairwiseConstraint::new(4, 5).unwrap()])
        .unwrap()
}

fn survey() -> Dataset {
    let f = std::fs::File::open(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/survey.csv")).unwrap();
    read_dataset(f).unwrap()
}

/// Student-t density integrated by adaptive Simpson from 0 to `t`.
fn oracle_cdf(t: f64, df: f64) -> f64 {
    let c = libm::exp(libm::lgamma((df + 1.0) / 2.0) - libm::lgamma(df / 2.0)) / (df * std::f64::consts::PI).sqrt();
    let f = |x: f64| c * (1.0 + x * x / df).powf(-(df + 1.0) / 2.0);
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let b = t.abs();
    if b == 0.0 {
        return 0.5;
    }
    let (fa, fm, fb) = (f(0.0), f(b / 2.0), f(b));
    let whole = b / 6.0 * (fa + 4.0 * fm + fb);
    let half = simpson(&f, 0.0, b, fa, fm, fb, whole, 1e-14, 50);
    if t > 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

#[test]
fn t_cdf_matches_integrated_density() {
    // Reference table built from the oracle first, then compared.
    let dfs = [1.0, 2.0, 3.0, 5.0, 10.0, 17.0, 30.0, 55.0];
    let ts = [-6.0, -2.5, -1.0, -0.3, 0.0, 0.7, 2.0, 4.5];
    let table: Vec<(f64, f64, f64)> =
        dfs.iter().flat_map(|&df| ts.iter().map(move |&t| (t, df, oracle_cdf(t, df)))).collect();
    assert_eq!(table.len(), 64);
    for (t, df, want) in table {
        let got = student_t_cdf(t, df);
        assert!((got - want).abs() < 1e-10, "t={t} df={df}: {got} vs {want}");
    }
    // Closed forms for one and two degrees of freedom.
    assert!((student_t_cdf(1.0, 1.0) - 0.75).abs() < 1e-15);
    assert!((student_t_cdf(2.0, 2.0) - (0.5 + 2.0 / (2.0 * 6f64.sqrt()))).abs() < 1e-14);
}

proptest! {
    #[test]
    fn p_values_decrease_in_abs_t(a in 0.0f64..20.0, b in 0.0f64..20.0, df in 1usize..200) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (plo, phi) = (two_sided_p(lo, df as f64), two_sided_p(hi, df as f64));
        prop_assert!(phi <= plo);
        prop_assert!((0.0..=1.0).contains(&plo) && (0.0..=1.0).contains(&phi));
        prop_assert_eq!(two_sided_p(-a, df as f64), two_sided_p(a, df as f64));
    }

    #[test]
    fn shift_changes_only_intercept(shift in -50.0f64..50.0, seed in any::<u64>()) {
        let sys = case_system();
        let spec = derive_model(&sys);
        let fs = enumerate_feasible(&sys).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Observation> = (0..40)
            .map(|i| Observation {
                id: i.to_string(),
                order: fs.orders().choose(&mut rng).unwrap().clone(),
                response: Some(rand::Rng::random_range(&mut rng, 0.0..6.0)),
                duration_seconds: 1.0,
                extra: vec![],
            })
            .collect();
        let shifted: Vec<Observation> =
            rows.iter().map(|r| Observation { response: r.response.map(|y| y + shift), ..r.clone() }).collect();
        let (a, b) = match (
            ols_fit(&Dataset::new(6, vec![], rows).unwrap(), &spec),
            ols_fit(&Dataset::new(6, vec![], shifted).unwrap(), &spec),
        ) {
            (Ok(a), Ok(b)) => (a, b),
            // A random draw can miss a sign of some pair.
            _ => return Ok(()),
        };
        prop_assert!((b.estimates[0] - a.estimates[0] - shift).abs() < 1e-9);
        for j in 1..a.p {
            prop_assert!((a.estimates[j] - b.estimates[j]).abs() < 1e-9);
        }
        for dir in [Direction::Max, Direction::Min] {
            prop_assert_eq!(predict_best_order(&a, &fs, dir).unwrap(), predict_best_order(&b, &fs, dir).unwrap());
        }
    }
}

#[test]
fn residuals_are_orthogonal_to_columns() {
    let sys = case_system();
    let spec = derive_model(&sys);
    let (data, _) = clean(&survey(), 7200.0, true).unwrap();
    let fit = ols_fit(&data, &spec).unwrap();
    let used: Vec<&Observation> = data.rows().iter().filter(|r| r.response.is_some()).collect();
    assert_eq!(used.len(), fit.residuals.len());
    let scale: f64 = fit.residuals.iter().map(|r| r.abs()).sum();
    for j in 0..fit.p {
        let dot: f64 = used
            .iter()
            .zip(&fit.residuals)
            .map(|(r, e)| spec.expand(&r.order).unwrap().entries()[j] as f64 * e)
            .sum();
        assert!(dot.abs() < 1e-8 * scale, "column {j}: {dot}");
    }
    for j in 0..fit.p {
        assert!((fit.t_values[j] - fit.estimates[j] / fit.std_errors[j]).abs() < 1e-12);
    }
}

#[test]
fn case_study_full_dataset() {
    let raw = survey();
    let (kept, report) = clean(&raw, 7200.0, false).unwrap();
    assert_eq!(kept.len(), 63);
    assert_eq!(report.removed_duration, ["39", "43", "49"]);
    let (dropped, report) = clean(&raw, 7200.0, true).unwrap();
    assert_eq!(dropped.len(), 62);
    assert_eq!(report.removed_missing, ["3"]);
    assert_eq!(clean(&raw, f64::INFINITY, false).unwrap().0, raw);

    let spec = derive_model(&case_system());
    let fit = ols_fit(&kept, &spec).unwrap();
    assert_eq!((fit.n_used, fit.p, fit.df), (62, 7, 55));
    let b12 = spec.term_index(1, 2).unwrap();
    let b46 = spec.term_index(4, 6).unwrap();
    // Reference values from an independent least-squares fit of the same rows.
    assert!((fit.estimates[b12] - 0.4072).abs() < 5e-4);
    assert!((fit.estimates[b46] + 0.5052).abs() < 5e-4);
    assert!((fit.p_values[b12] - 0.0329).abs() < 5e-4);
    assert!((fit.p_values[b46] - 0.0407).abs() < 5e-4);

    let fs = enumerate_feasible(&case_system()).unwrap();
    let best = predict_best_order(&fit, &fs, Direction::Max).unwrap();
    assert!(best.precedes(1, 2) && best.precedes(6, 4));
}

#[test]
fn one_per_order_samples_have_seventeen_df() {
    let sys = case_system();
    let spec = derive_model(&sys);
    let fs = enumerate_feasible(&sys).unwrap();
    let (data, _) = clean(&survey(), 7200.0, true).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let rows: Vec<Observation> = fs
            .orders()
            .iter()
            .map(|o| {
                let pool: Vec<&Observation> = data.rows().iter().filter(|r| &r.order == o).collect();
                (*pool.choose(&mut rng).expect("every feasible order was observed")).clone()
            })
            .collect();
        let fit = ols_fit(&Dataset::new(6, vec![], rows).unwrap(), &spec).unwrap();
        assert_eq!((fit.n_used, fit.df), (24, 17));
        assert!(fit.std_errors.iter().all(|s| s.is_finite() && *s > 0.0));
    }
}

#[test]
fn single_feasible_order_is_recommended() {
    // Every group a singleton: only the identity order is feasible.
    let sys = ConstraintSystem::unconstrained(GroupPartition::from_sizes(&[1, 1, 1, 1]).unwrap());
    let fs = enumerate_feasible(&sys).unwrap();
    assert_eq!(fs.len(), 1);
    let spec = derive_model(&sys);
    let rows = (0..3)
        .map(|i| Observation {
            id: i.to_string(),
            order: Order::identity(4),
            response: Some(i as f64),
            duration_seconds: 0.0,
            extra: vec![],
        })
        .collect();
    let fit = ols_fit(&Dataset::new(4, vec![], rows).unwrap(), &spec).unwrap();
    assert_eq!(predict_best_order(&fit, &fs, Direction::Min).unwrap(), Order::identity(4));
}
