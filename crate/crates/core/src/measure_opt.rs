//! D-optimal approximate designs over an enumerated candidate set, and
//! rounding them to exact designs.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::criteria::{moment_matrix_f64, variances_with_inverse, DesignMeasure};
use crate::error::{Error, Result};
use crate::linalg::{spd_inverse_logdet, weakest_direction};
use crate::model::ModelSpec;
use crate::perm::{FeasibleSet, Order};

/// Weights are never pushed below this during iteration.
pub const WEIGHT_FLOOR: f64 = 1e-15;
/// Converged weights below this are reported as zero.
pub const REPORT_ZERO: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub max_iterations: usize,
    /// Stop once `max d(π, ξ) <= p (1 + tolerance)`.
    pub tolerance: f64,
    /// Exponent applied to `d / p` in the update, in `(0, 1]`.
    pub damping: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { max_iterations: 100_000, tolerance: 1e-6, damping: 1.0 }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidArgument("damping must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

/// `x(π)ᵀ M(ξ)⁻¹ x(π)`.
pub fn variance_function(order: &Order, measure: &DesignMeasure, spec: &ModelSpec) -> Result<f64> {
    let m = moment_matrix_f64(measure, spec)?;
    let (inv, _) = spd_inverse_logdet(&m).ok_or_else(|| Error::Singular { direction: weakest_direction(&m) })?;
    Ok(variances_with_inverse(&inv, spec, core::slice::from_ref(order))?[0])
}

/// Result of [`d_optimal_measure`].
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizedMeasure {
    pub measure: DesignMeasure,
    pub iterations: usize,
    /// `max_π d(π, ξ)` at the returned measure.
    pub max_variance: f64,
    /// `log det M(ξ_t)` for `t = 0..=iterations`.
    pub log_det_trace: Vec<f64>,
}

/// D-optimal measure on the full feasible set.
pub fn d_optimal_measure(feasible: &FeasibleSet, spec: &ModelSpec, cfg: OptimizerConfig) -> Result<OptimizedMeasure> {
    d_optimal_over(feasible.orders(), spec, cfg)
}

/// Multiplicative updates `w ← w (d/p)^δ` from the uniform measure on
/// `candidates`, stopped by the equivalence-theorem gap.
pub fn d_optimal_over(candidates: &[Order], spec: &ModelSpec, cfg: OptimizerConfig) -> Result<OptimizedMeasure> {
    cfg.validate()?;
    let n = candidates.len();
    let p = spec.p();
    if n == 0 {
        return Err(Error::EmptySupport);
    }
    if n < p {
        return Err(Error::InsufficientDf { n, p });
    }
    let rows: Vec<Vec<f64>> = candidates
        .iter()
        .map(|o| spec.expand(o).map(|x| x.to_f64()))
        .collect::<Result<_>>()?;
    let moment = |w: &[f64]| {
        let mut m = DMatrix::zeros(p, p);
        for (x, &wi) in rows.iter().zip(w) {
            for a in 0..p {
                for b in 0..p {
                    m[(a, b)] += wi * x[a] * x[b];
                }
            }
        }
        m
    };
    let mut w = vec![1.0 / n as f64; n];
    let target = p as f64 * (1.0 + cfg.tolerance);
    let mut trace = Vec::new();
    let mut iterations = 0;
    loop {
        let m = moment(&w);
        let Some((inv, logdet)) = spd_inverse_logdet(&m) else {
            let dir = weakest_direction(&m);
            let names = spec.term_names();
            let k = (0..dir.len()).fold(0, |b, i| if dir[i].abs() > dir[b].abs() { i } else { b });
            return Err(Error::RankDeficient { term: names.get(k).cloned().unwrap_or_default() });
        };
        if let Some(&prev) = trace.last() {
            debug_assert!(logdet >= prev - 1e-9 * (1.0 + libm::fabs(prev)), "log det decreased");
        }
        trace.push(logdet);
        let d = variances_with_inverse(&inv, spec, candidates)?;
        let max_d = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if max_d <= target {
            let measure = finalize(candidates, &w);
            return Ok(OptimizedMeasure { measure, iterations, max_variance: max_d, log_det_trace: trace });
        }
        if iterations == cfg.max_iterations {
            return Err(Error::NonConvergence { iterations, gap: max_d / p as f64 - 1.0 });
        }
        iterations += 1;
        let mut total = 0.0;
        for (wi, di) in w.iter_mut().zip(&d) {
            let f = if cfg.damping == 1.0 { di / p as f64 } else { libm::pow(di / p as f64, cfg.damping) };
            *wi = (*wi * f).max(WEIGHT_FLOOR);
            total += *wi;
        }
        w.iter_mut().for_each(|wi| *wi /= total);
    }
}

fn finalize(candidates: &[Order], w: &[f64]) -> DesignMeasure {
    let mut out: Vec<f64> = w.iter().map(|&x| if x < REPORT_ZERO { 0.0 } else { x }).collect();
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|x| *x /= total);
    DesignMeasure::from_parts_unchecked(candidates.to_vec(), out)
}

/// Replication counts of [`round_to_exact`].
#[derive(Clone, Debug, PartialEq)]
pub struct RoundedDesign {
    pub counts: Vec<u64>,
    /// `log det Σ n_i x_i x_iᵀ`; `-inf` when singular.
    pub log_det: f64,
    /// True when every floor/ceil allocation was compared.
    pub exhaustive: bool,
}

/// Allocations compared exhaustively up to this many subsets.
const EXHAUSTIVE_LIMIT: u128 = 200_000;

/// Rounds `n ξ(π)` to integers summing to `n`, each count the floor or the
/// ceiling of `n ξ(π)`, choosing the allocation with the largest
/// determinant (first in lexicographic order of the raised points on ties).
pub fn round_to_exact(measure: &DesignMeasure, spec: &ModelSpec, n_trials: u64) -> Result<RoundedDesign> {
    let w = measure.weights();
    let positive = w.iter().filter(|&&x| x > 0.0).count() as u64;
    if n_trials < positive {
        return Err(Error::InvalidArgument(format!(
            "{n_trials} trials cannot cover {positive} support points"
        )));
    }
    let n = n_trials as f64;
    let mut base = Vec::with_capacity(w.len());
    let mut raisable = Vec::new();
    for (i, &wi) in w.iter().enumerate() {
        let t = n * wi;
        let r = libm::round(t);
        if (t - r).abs() < 1e-9 {
            base.push(r as u64);
        } else {
            base.push(libm::floor(t) as u64);
            raisable.push(i);
        }
    }
    let assigned: u64 = base.iter().sum();
    let extra = n_trials
        .checked_sub(assigned)
        .filter(|&e| e as usize <= raisable.len())
        .ok_or_else(|| Error::InvalidMeasure("weights do not sum to one".into()))? as usize;
    let xs: Vec<Vec<f64>> = measure
        .support()
        .iter()
        .map(|o| spec.expand(o).map(|x| x.to_f64()))
        .collect::<Result<_>>()?;
    let log_det = |counts: &[u64]| {
        let p = spec.p();
        let mut m = DMatrix::zeros(p, p);
        for (x, &c) in xs.iter().zip(counts) {
            if c == 0 {
                continue;
            }
            for a in 0..p {
                for b in 0..p {
                    m[(a, b)] += c as f64 * x[a] * x[b];
                }
            }
        }
        spd_inverse_logdet(&m).map_or(f64::NEG_INFINITY, |(_, ld)| ld)
    };
    let choose = binomial(raisable.len() as u128, extra as u128);
    if choose <= EXHAUSTIVE_LIMIT {
        let mut best: Option<(f64, Vec<u64>)> = None;
        for pick in crate::blocks::k_subsets(&(0..raisable.len() as u16).collect::<Vec<_>>(), extra) {
            let mut counts = base.clone();
            for &j in &pick {
                counts[raisable[j as usize]] += 1;
            }
            let ld = log_det(&counts);
            if best.as_ref().is_none_or(|(b, _)| ld > *b + 1e-12 * (1.0 + b.abs())) {
                best = Some((ld, counts));
            }
        }
        let (ld, counts) = best.expect("at least one allocation");
        return Ok(RoundedDesign { counts, log_det: ld, exhaustive: true });
    }
    let mut counts = base;
    let mut open = raisable;
    for _ in 0..extra {
        let mut best = (f64::NEG_INFINITY, 0usize);
        for (k, &i) in open.iter().enumerate() {
            counts[i] += 1;
            let ld = log_det(&counts);
            counts[i] -= 1;
            if ld > best.0 || k == 0 {
                best = (ld, k);
            }
        }
        counts[open.remove(best.1)] += 1;
    }
    let ld = log_det(&counts);
    Ok(RoundedDesign { counts, log_det: ld, exhaustive: false })
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r = 1u128;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::derive_model;
    use crate::perm::{enumerate_feasible, ConstraintSystem, GroupPartition, Label, PairwiseConstraint};

    fn system(sizes: &[usize], within: &[(Label, Label)]) -> ConstraintSystem {
        ConstraintSystem::new(
            GroupPartition::from_sizes(sizes).unwrap(),
            within.iter().map(|&(a, b)| PairwiseConstraint::new(a, b).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn sop_left_weights() {
        let sys = system(&[4], &[(1, 2), (3, 4)]);
        let spec = derive_model(&sys);
        let fs = enumerate_feasible(&sys).unwrap();
        let r = d_optimal_measure(&fs, &spec, OptimizerConfig::default()).unwrap();
        let expected = [0.2, 0.15, 0.15, 0.15, 0.15, 0.2];
        for (w, e) in r.measure.weights().iter().zip(expected) {
            assert!((w - e).abs() < 1e-3, "{w} vs {e}");
        }
        assert!(r.max_variance <= 5.0 * (1.0 + 1e-6));
        assert!(r.log_det_trace.windows(2).all(|p| p[1] >= p[0] - 1e-12));
        let rounded = round_to_exact(&r.measure, &spec, 20).unwrap();
        assert_eq!(rounded.counts, vec![4, 3, 3, 3, 3, 4]);
    }

    #[test]
    fn uniform_recovered() {
        for (sizes, within, n) in [(&[2usize, 2, 2][..], &[][..], 8usize), (&[2, 4][..], &[(4, 5)][..], 24)] {
            let sys = system(sizes, within);
            let spec = derive_model(&sys);
            let fs = enumerate_feasible(&sys).unwrap();
            let r = d_optimal_measure(&fs, &spec, OptimizerConfig::default()).unwrap();
            assert_eq!(r.iterations, 0);
            for w in r.measure.weights() {
                assert!((w - 1.0 / n as f64).abs() < 1e-6);
            }
            let v = variance_function(&fs.orders()[0], &r.measure, &spec).unwrap();
            assert!((v - spec.p() as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn rounding_uniform() {
        let sys = system(&[2, 2, 2], &[]);
        let spec = derive_model(&sys);
        let fs = enumerate_feasible(&sys).unwrap();
        let m = DesignMeasure::uniform(fs.orders().to_vec()).unwrap();
        assert_eq!(round_to_exact(&m, &spec, 8).unwrap().counts, vec![1; 8]);
        let r12 = round_to_exact(&m, &spec, 12).unwrap();
        assert!(r12.exhaustive);
        assert_eq!(r12.counts.iter().sum::<u64>(), 12);
        assert!(r12.counts.iter().all(|&c| c == 1 || c == 2));
        assert!(round_to_exact(&m, &spec, 7).is_err());
    }

    #[test]
    fn singular_and_bad_config() {
        let spec = ModelSpec::full(3);
        let pm = DesignMeasure::point_mass(Order::identity(3));
        assert!(matches!(variance_function(&Order::identity(3), &pm, &spec), Err(Error::Singular { .. })));
        let few = [Order::identity(3)];
        assert!(matches!(d_optimal_over(&few, &spec, OptimizerConfig::default()), Err(Error::InsufficientDf { .. })));
        let cfg = OptimizerConfig { damping: 0.0, ..Default::default() };
        assert!(cfg.validate().is_err());
    }
}
