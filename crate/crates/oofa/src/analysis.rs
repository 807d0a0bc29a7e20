//! Least-squares fits of ordering models to response data.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};
use oofa_core::{Error as CoreError, FeasibleSet, ModelSpec, Order};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::Result;

/// One participant or run: the order applied, the response and how long it took.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    pub id: String,
    pub order: Order,
    pub response: Option<f64>,
    pub duration_seconds: f64,
    /// Columns carried through unchanged, aligned with `Dataset::extra_columns`.
    pub extra: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    m: usize,
    extra_columns: Vec<String>,
    rows: Vec<Observation>,
}

impl Dataset {
    pub fn new(m: usize, extra_columns: Vec<String>, rows: Vec<Observation>) -> Result<Self> {
        let mut seen = HashSet::new();
        for r in &rows {
            if r.order.len() != m {
                return Err(CoreError::DimensionMismatch { expected: m, found: r.order.len() }.into());
            }
            if !seen.insert(r.id.as_str()) {
                return Err(CoreError::InvalidArgument(format!("duplicate id {}", r.id)).into());
            }
            if !(r.duration_seconds >= 0.0) {
                return Err(CoreError::InvalidArgument(format!("id {}: negative or missing duration", r.id)).into());
            }
            if r.response.is_some_and(|y| !y.is_finite()) {
                return Err(CoreError::InvalidArgument(format!("id {}: response is not finite", r.id)).into());
            }
            if r.extra.len() != extra_columns.len() {
                return Err(CoreError::InvalidArgument(format!("id {}: wrong number of extra fields", r.id)).into());
            }
        }
        Ok(Dataset { m, extra_columns, rows })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn extra_columns(&self) -> &[String] {
        &self.extra_columns
    }

    pub fn rows(&self) -> &[Observation] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Ids removed by [`clean`], by reason.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CleanReport {
    pub removed_duration: Vec<String>,
    pub removed_missing: Vec<String>,
    pub kept: usize,
}

/// Drops rows slower than `max_duration_s` and, if asked, rows without a response.
pub fn clean(raw: &Dataset, max_duration_s: f64, drop_missing: bool) -> Result<(Dataset, CleanReport)> {
    let mut report = CleanReport::default();
    let mut rows = Vec::new();
    for r in &raw.rows {
        if r.duration_seconds > max_duration_s {
            report.removed_duration.push(r.id.clone());
        } else if drop_missing && r.response.is_none() {
            report.removed_missing.push(r.id.clone());
        } else {
            rows.push(r.clone());
        }
    }
    if rows.is_empty() {
        return Err(CoreError::InvalidArgument("cleaning removed every row".into()).into());
    }
    report.kept = rows.len();
    Ok((Dataset { m: raw.m, extra_columns: raw.extra_columns.clone(), rows }, report))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub spec: ModelSpec,
    pub terms: Vec<String>,
    pub estimates: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub sigma2: f64,
    pub r_squared: f64,
    /// Ids of the rows used, aligned with `residuals`.
    pub ids: Vec<String>,
    pub residuals: Vec<f64>,
    pub n_used: usize,
    pub p: usize,
    pub df: usize,
}

/// `P(T <= t)` for Student's t with `df` degrees of freedom.
pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    StudentsT::new(0.0, 1.0, df).expect("df must be positive").cdf(t)
}

/// `P(|T| >= |t|)`.
pub fn two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    (2.0 * student_t_cdf(-t.abs(), df)).min(1.0)
}

/// Ordinary least squares over the rows with a response.
pub fn ols_fit(data: &Dataset, spec: &ModelSpec) -> Result<FitResult> {
    if spec.m() != data.m {
        return Err(CoreError::DimensionMismatch { expected: data.m, found: spec.m() }.into());
    }
    let used: Vec<&Observation> = data.rows.iter().filter(|r| r.response.is_some()).collect();
    let (n, p) = (used.len(), spec.p());
    if n <= p {
        return Err(CoreError::InsufficientDf { n, p }.into());
    }
    let mut x = DMatrix::<f64>::zeros(n, p);
    for (i, r) in used.iter().enumerate() {
        for (j, v) in spec.expand(&r.order)?.entries().iter().enumerate() {
            x[(i, j)] = *v as f64;
        }
    }
    let y = DVector::from_iterator(n, used.iter().map(|r| r.response.unwrap()));
    let names = spec.term_names();
    check_rank(&x, &names)?;

    let xtx = x.tr_mul(&x);
    let chol = xtx.clone().cholesky().ok_or_else(|| CoreError::RankDeficient { term: names[p - 1].clone() })?;
    let beta = chol.solve(&x.tr_mul(&y));
    let inv = chol.inverse();
    let resid = &y - &x * &beta;
    let df = n - p;
    let rss = resid.norm_squared();
    let sigma2 = rss / df as f64;
    let mean = y.mean();
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { 1.0 };

    let mut se = Vec::with_capacity(p);
    let mut t = Vec::with_capacity(p);
    let mut pv = Vec::with_capacity(p);
    for j in 0..p {
        let s = (sigma2 * inv[(j, j)]).max(0.0).sqrt();
        let tj = if beta[j] == 0.0 { 0.0 } else { beta[j] / s };
        se.push(s);
        t.push(tj);
        pv.push(two_sided_p(tj, df as f64));
    }
    Ok(FitResult {
        spec: spec.clone(),
        terms: names,
        estimates: beta.iter().copied().collect(),
        std_errors: se,
        t_values: t,
        p_values: pv,
        sigma2,
        r_squared,
        ids: used.iter().map(|r| r.id.clone()).collect(),
        residuals: resid.iter().copied().collect(),
        n_used: n,
        p,
        df,
    })
}

/// Gram-Schmidt over the columns in model order; the first column that
/// adds no new direction is the offending term.
fn check_rank(x: &DMatrix<f64>, names: &[String]) -> Result<()> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for j in 0..x.ncols() {
        let col = x.column(j).into_owned();
        let scale = col.norm();
        let mut v = col;
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&v);
                v -= q * c;
            }
        }
        let r = v.norm();
        if scale == 0.0 || r <= 1e-10 * scale {
            return Err(CoreError::RankDeficient { term: names[j].clone() }.into());
        }
        basis.push(v / r);
    }
    Ok(())
}

/// Fitted mean `x(π)ᵀ β̂`.
pub fn fitted_value(fit: &FitResult, order: &Order) -> Result<f64> {
    let x = fit.spec.expand(order)?;
    Ok(x.entries().iter().zip(&fit.estimates).map(|(&a, b)| a as f64 * b).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Max,
    Min,
}

/// Lexicographically smallest feasible order with the extreme fitted mean.
/// Means within `1e-12` relative of each other count as ties.
pub fn predict_best_order(fit: &FitResult, feasible: &FeasibleSet, direction: Direction) -> Result<Order> {
    let sign = match direction {
        Direction::Max => 1.0,
        Direction::Min => -1.0,
    };
    let mut best: Option<(f64, &Order)> = None;
    for o in feasible.orders() {
        let v = sign * fitted_value(fit, o)?;
        match best {
            Some((b, _)) if v <= b + 1e-12 * (1.0 + b.abs()) => {}
            _ => best = Some((v, o)),
        }
    }
    best.map(|(_, o)| o.clone()).ok_or_else(|| CoreError::EmptySupport.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use oofa_core::model::derive_model;
    use oofa_core::perm::enumerate_feasible;
    use oofa_core::{ConstraintSystem, GroupPartition, PairwiseConstraint};

    fn case_system() -> ConstraintSystem {
        ConstraintSystem::new(
            GroupPartition::from_sizes(&[2, 4]).unwrap(),
            vec![PairwiseConstraint::new(4, 5).unwrap()],
        )
        .unwrap()
    }

    fn dataset(orders: &[Order], y: impl Fn(&Order) -> Option<f64>) -> Dataset {
        let rows = orders
            .iter()
            .enumerate()
            .map(|(i, o)| Observation {
                id: (i + 1).to_string(),
                order: o.clone(),
                response: y(o),
                duration_seconds: 10.0 * i as f64,
                extra: vec![],
            })
            .collect();
        Dataset::new(orders[0].len(), vec![], rows).unwrap()
    }

    #[test]
    fn noiseless_responses_recover_coefficients() {
        let sys = case_system();
        let spec = derive_model(&sys);
        let fs = enumerate_feasible(&sys).unwrap();
        let beta = [3.0, 0.5, -0.25, 1.0, 0.0, -2.0, 0.75];
        let truth = |o: &Order| {
            let x = spec.expand(o).unwrap();
            Some(x.entries().iter().zip(beta).map(|(&a, b)| a as f64 * b).sum())
        };
        let fit = ols_fit(&dataset(fs.orders(), truth), &spec).unwrap();
        for (b, e) in beta.iter().zip(&fit.estimates) {
            assert!((b - e).abs() < 1e-12);
        }
        assert!(fit.sigma2 < 1e-24);
        assert_eq!((fit.n_used, fit.p, fit.df), (24, 7, 17));
    }

    #[test]
    fn constant_response_has_zero_slopes() {
        let sys = case_system();
        let spec = derive_model(&sys);
        let fs = enumerate_feasible(&sys).unwrap();
        let fit = ols_fit(&dataset(fs.orders(), |_| Some(4.0)), &spec).unwrap();
        assert!((fit.estimates[0] - 4.0).abs() < 1e-12);
        assert!(fit.estimates[1..].iter().all(|b| b.abs() < 1e-12));
        let best = predict_best_order(&fit, &fs, Direction::Max).unwrap();
        assert_eq!(&best, &fs.orders()[0]);
    }

    #[test]
    fn rank_deficiency_names_term() {
        let sys = case_system();
        let spec = derive_model(&sys);
        let fs = enumerate_feasible(&sys).unwrap();
        // Keep only orders with 1 before 2: the b12 column is constant.
        let rows: Vec<Order> = fs.orders().iter().filter(|o| o.precedes(1, 2)).cloned().collect();
        let err = ols_fit(&dataset(&rows, |_| Some(1.0)), &spec).unwrap_err();
        assert!(matches!(err, crate::Error::Core(CoreError::RankDeficient { ref term }) if term == "b12"), "{err}");
    }

    #[test]
    fn too_few_rows() {
        let sys = case_system();
        let spec = derive_model(&sys);
        let fs = enumerate_feasible(&sys).unwrap();
        let err = ols_fit(&dataset(&fs.orders()[..7], |_| Some(1.0)), &spec).unwrap_err();
        assert!(matches!(err, crate::Error::Core(CoreError::InsufficientDf { n: 7, p: 7 })));
    }

    #[test]
    fn clean_counts_and_errors() {
        let fs = enumerate_feasible(&case_system()).unwrap();
        let d = dataset(&fs.orders()[..4], |o| if o.precedes(3, 4) { Some(1.0) } else { None });
        let (c, rep) = clean(&d, 15.0, false).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(rep.removed_duration, vec!["3".to_string(), "4".to_string()]);
        let (all, _) = clean(&d, f64::INFINITY, false).unwrap();
        assert_eq!(all, d);
        assert!(clean(&d, -1.0, false).is_err());
    }

    #[test]
    fn p_value_at_zero_is_one() {
        for df in [1.0, 2.0, 5.0, 17.0, 55.0] {
            assert_eq!(two_sided_p(0.0, df), 1.0);
        }
    }
}
