//! Moment matrices, A/D/G criteria, closed-form optimal values and
//! efficiencies.
//!
//! Exact paths work on integer moment sums `S = Σ x xᵀ` over the rows of a
//! design (so `M = S / n`) and never touch floating point; float paths take
//! an arbitrary [`DesignMeasure`].

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{rat, rat_to_f64, spd_inverse_logdet, weakest_direction, RatMatrix};
use crate::model::{derive_model, ModelSpec, ModelVector};
use crate::perm::{ConstraintSystem, FeasibleSet, GroupPartition, Label, Order};

/// Probability weights over a list of orders.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignMeasure {
    support: Vec<Order>,
    weights: Vec<f64>,
}

/// Allowed distance of the total weight from one; wide enough for weights
/// read back from 12-digit text.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

impl DesignMeasure {
    pub fn new(support: Vec<Order>, weights: Vec<f64>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::EmptySupport);
        }
        if support.len() != weights.len() {
            return Err(Error::DimensionMismatch { expected: support.len(), found: weights.len() });
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidMeasure("weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}, not 1")));
        }
        Ok(DesignMeasure { support, weights })
    }

    pub fn uniform(support: Vec<Order>) -> Result<Self> {
        let n = support.len();
        if n == 0 {
            return Err(Error::EmptySupport);
        }
        let w = 1.0 / n as f64;
        Ok(DesignMeasure { support, weights: vec![w; n] })
    }

    pub fn point_mass(order: Order) -> Self {
        DesignMeasure { support: vec![order], weights: vec![1.0] }
    }

    pub fn support(&self) -> &[Order] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn from_parts_unchecked(support: Vec<Order>, weights: Vec<f64>) -> Self {
        DesignMeasure { support, weights }
    }
}

/// `M = S / n` with `S` the integer moment sums of `n` rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentMatrix {
    p: usize,
    sums: Vec<i64>,
    n: u64,
}

impl MomentMatrix {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn runs(&self) -> u64 {
        self.n
    }

    /// Raw sums `Σ x_a x_b`, row-major.
    pub fn sums(&self) -> &[i64] {
        &self.sums
    }

    pub fn entry(&self, a: usize, b: usize) -> BigRational {
        BigRational::new(BigInt::from(self.sums[a * self.p + b]), BigInt::from(self.n))
    }

    pub fn to_rational(&self) -> RatMatrix {
        RatMatrix::from_fn(self.p, |a, b| self.entry(a, b))
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.p, self.p, |a, b| self.sums[a * self.p + b] as f64 / self.n as f64)
    }

    /// Integer sums `S` as a rational matrix (so `M⁻¹ = n S⁻¹`).
    fn sums_rational(&self) -> RatMatrix {
        RatMatrix::from_fn(self.p, |a, b| BigRational::from_integer(BigInt::from(self.sums[a * self.p + b])))
    }

    /// Exact equality of the normalized matrices `S/n`.
    pub fn same_normalized(&self, other: &MomentMatrix) -> bool {
        self.p == other.p
            && self
                .sums
                .iter()
                .zip(&other.sums)
                .all(|(&a, &b)| a as i128 * other.n as i128 == b as i128 * self.n as i128)
    }
}

/// Exact moment sums of the rows (each row weighted `1/n`).
pub fn moment_sums(rows: &[Order], spec: &ModelSpec) -> Result<MomentMatrix> {
    if rows.is_empty() {
        return Err(Error::EmptySupport);
    }
    let p = spec.p();
    let mut sums = vec![0i64; p * p];
    for o in rows {
        let x = spec.expand(o)?;
        accumulate(&mut sums, &x, p);
    }
    Ok(MomentMatrix { p, sums, n: rows.len() as u64 })
}

fn accumulate(sums: &mut [i64], x: &ModelVector, p: usize) {
    let e = x.entries();
    for a in 0..p {
        let xa = e[a] as i64;
        let row = &mut sums[a * p..(a + 1) * p];
        for (s, &xb) in row.iter_mut().zip(e) {
            *s += xa * xb as i64;
        }
    }
}

/// `Σ ξ(π) x(π) x(π)ᵀ` in floating point.
pub fn moment_matrix_f64(measure: &DesignMeasure, spec: &ModelSpec) -> Result<DMatrix<f64>> {
    let p = spec.p();
    let mut m = DMatrix::zeros(p, p);
    for (o, &w) in measure.support.iter().zip(&measure.weights) {
        if w == 0.0 {
            continue;
        }
        let x = spec.expand(o)?.to_f64();
        for a in 0..p {
            for b in 0..p {
                m[(a, b)] += w * x[a] * x[b];
            }
        }
    }
    Ok(m)
}

/// Maximum of the variance function and where it is attained.
#[derive(Clone, Debug, PartialEq)]
pub struct GValue<T> {
    pub value: T,
    /// Lexicographically smallest maximizer.
    pub argmax: Order,
    /// False when the maximum was taken over a sample only, making `value`
    /// a lower bound.
    pub exhaustive: bool,
}

fn singular_from_rational(m: &RatMatrix) -> Error {
    let dir = m.null_vector().map(|v| normalize(v.iter().map(rat_to_f64).collect())).unwrap_or_default();
    Error::Singular { direction: dir }
}

fn normalize(v: Vec<f64>) -> Vec<f64> {
    let norm = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
    if norm > 0.0 {
        v.into_iter().map(|x| x / norm).collect()
    } else {
        v
    }
}

/// `det M`, exactly.
pub fn d_value_exact(mm: &MomentMatrix) -> BigRational {
    let det_s = mm.sums_rational().det();
    det_s / BigRational::from_integer(BigInt::from(mm.n).pow(mm.p as u32))
}

/// `M⁻¹`, exactly, or a singularity error with a null direction.
pub fn inverse_exact(mm: &MomentMatrix) -> Result<RatMatrix> {
    let s = mm.sums_rational();
    let inv = s.inverse().map_err(|_| singular_from_rational(&s))?;
    let n = BigRational::from_integer(BigInt::from(mm.n));
    Ok(RatMatrix::from_fn(mm.p, |a, b| inv.get(a, b) * &n))
}

/// `tr M⁻¹`, exactly.
pub fn a_value_exact(mm: &MomentMatrix) -> Result<BigRational> {
    Ok(inverse_exact(mm)?.trace())
}

/// `max x(π)ᵀ M⁻¹ x(π)` over `candidates`, exactly.
pub fn g_value_exact(
    mm: &MomentMatrix,
    spec: &ModelSpec,
    candidates: &[Order],
    exhaustive: bool,
) -> Result<GValue<BigRational>> {
    let inv = inverse_exact(mm)?;
    g_value_from_inverse(&inv, spec, candidates, exhaustive)
}

fn g_value_from_inverse(
    inv: &RatMatrix,
    spec: &ModelSpec,
    candidates: &[Order],
    exhaustive: bool,
) -> Result<GValue<BigRational>> {
    if candidates.is_empty() {
        return Err(Error::EmptySupport);
    }
    let p = spec.p();
    let scaled = inv
        .to_scaled_i128()
        .filter(|(q, _)| q.iter().all(|v| v.unsigned_abs() <= i128::MAX as u128 / (p * p) as u128));
    if let Some((q, l)) = scaled {
        let mut best_int: Option<(i128, usize)> = None;
        for (k, o) in candidates.iter().enumerate() {
            let x = spec.expand(o)?;
            let e = x.entries();
            let mut acc: i128 = 0;
            for a in 0..p {
                let mut row: i128 = 0;
                for b in 0..p {
                    row += q[a * p + b] * e[b] as i128;
                }
                acc += row * e[a] as i128;
            }
            let better = match best_int {
                None => true,
                Some((bv, bk)) => acc > bv || (acc == bv && *o < candidates[bk]),
            };
            if better {
                best_int = Some((acc, k));
            }
        }
        let (v, k) = best_int.expect("nonempty candidates");
        return Ok(GValue {
            value: BigRational::new(BigInt::from(v), BigInt::from(l)),
            argmax: candidates[k].clone(),
            exhaustive,
        });
    }
    let mut best: Option<(BigRational, usize)> = None;
    for (k, o) in candidates.iter().enumerate() {
        let v = inv.quad_form_i8(spec.expand(o)?.entries());
        let better = match &best {
            None => true,
            Some((bv, bk)) => v > *bv || (v == *bv && *o < candidates[*bk]),
        };
        if better {
            best = Some((v, k));
        }
    }
    let (value, k) = best.expect("nonempty candidates");
    Ok(GValue { value, argmax: candidates[k].clone(), exhaustive })
}

/// Exact A, D and G values of a design given as rows.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactCriteria {
    pub p: usize,
    /// `None` when `M` is singular.
    pub a: Option<BigRational>,
    pub d: BigRational,
    pub g: Option<GValue<BigRational>>,
    /// Unit null direction of `M` when singular.
    pub singular_direction: Option<Vec<f64>>,
}

pub fn exact_criteria(
    rows: &[Order],
    spec: &ModelSpec,
    candidates: &[Order],
    exhaustive: bool,
) -> Result<ExactCriteria> {
    let mm = moment_sums(rows, spec)?;
    let d = d_value_exact(&mm);
    match inverse_exact(&mm) {
        Ok(inv) => {
            let g = g_value_from_inverse(&inv, spec, candidates, exhaustive)?;
            Ok(ExactCriteria { p: mm.p, a: Some(inv.trace()), d, g: Some(g), singular_direction: None })
        }
        Err(Error::Singular { direction }) => {
            Ok(ExactCriteria { p: mm.p, a: None, d, g: None, singular_direction: Some(direction) })
        }
        Err(e) => Err(e),
    }
}

fn inverse_f64(measure: &DesignMeasure, spec: &ModelSpec) -> Result<(DMatrix<f64>, f64)> {
    let m = moment_matrix_f64(measure, spec)?;
    spd_inverse_logdet(&m).ok_or_else(|| Error::Singular { direction: weakest_direction(&m) })
}

/// `tr M(ξ)⁻¹`.
pub fn a_value(measure: &DesignMeasure, spec: &ModelSpec) -> Result<f64> {
    Ok(inverse_f64(measure, spec)?.0.trace())
}

/// `det M(ξ)`; zero for singular matrices.
pub fn d_value(measure: &DesignMeasure, spec: &ModelSpec) -> Result<f64> {
    let m = moment_matrix_f64(measure, spec)?;
    Ok(match spd_inverse_logdet(&m) {
        Some((_, ld)) => libm::exp(ld),
        None => m.determinant().max(0.0),
    })
}

/// `x(π)ᵀ M(ξ)⁻¹ x(π)` for every candidate order, given `M⁻¹`.
pub fn variances_with_inverse(inv: &DMatrix<f64>, spec: &ModelSpec, candidates: &[Order]) -> Result<Vec<f64>> {
    let p = spec.p();
    candidates
        .iter()
        .map(|o| {
            let x = spec.expand(o)?;
            let e = x.entries();
            let mut acc = 0.0;
            for a in 0..p {
                let mut row = 0.0;
                for b in 0..p {
                    row += inv[(a, b)] * e[b] as f64;
                }
                acc += row * e[a] as f64;
            }
            Ok(acc)
        })
        .collect()
}

/// G value over the full feasible set.
pub fn g_value(measure: &DesignMeasure, spec: &ModelSpec, feasible: &FeasibleSet) -> Result<GValue<f64>> {
    g_value_over(measure, spec, feasible.orders(), true)
}

/// G value over an arbitrary candidate list; `exhaustive` labels whether
/// that list is the whole feasible set.
pub fn g_value_over(
    measure: &DesignMeasure,
    spec: &ModelSpec,
    candidates: &[Order],
    exhaustive: bool,
) -> Result<GValue<f64>> {
    if candidates.is_empty() {
        return Err(Error::EmptySupport);
    }
    let (inv, _) = inverse_f64(measure, spec)?;
    let d = variances_with_inverse(&inv, spec, candidates)?;
    let mut k_best = 0;
    for k in 1..d.len() {
        if d[k] > d[k_best] || (d[k] == d[k_best] && candidates[k] < candidates[k_best]) {
            k_best = k;
        }
    }
    Ok(GValue { value: d[k_best], argmax: candidates[k_best].clone(), exhaustive })
}

/// Optimal criterion values used as efficiency baselines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedForm {
    pub p: usize,
    /// Only claimed where the uniform measure is known to be A-optimal.
    pub a: Option<BigRational>,
    pub d: BigRational,
    pub g: BigRational,
}

fn d_closed(sizes: &[usize]) -> BigRational {
    let mut d = BigRational::one();
    for &k in sizes {
        if k < 2 {
            continue;
        }
        let num = BigInt::from(k as u64 + 1).pow((k - 1) as u32);
        let den = BigInt::from(3u32).pow((k * (k - 1) / 2) as u32);
        d *= BigRational::new(num, den);
    }
    d
}

/// Optimal A, D, G values under pairwise-group constraints only.
pub fn closed_form_pwgco(partition: &GroupPartition) -> ClosedForm {
    let sizes = partition.sizes();
    let mut a = BigRational::one();
    let mut g = 1usize;
    for &k in &sizes {
        let k64 = k as i64;
        a += rat(3 * k64 * (k64 - 1) * (k64 - 1), 2 * (k64 + 1));
        g += k * (k - 1) / 2;
    }
    ClosedForm { p: g, a: Some(a), d: d_closed(&sizes), g: BigRational::from_integer(BigInt::from(g)) }
}

/// Optimal D and G values with at most one within constraint per group.
/// The A value is carried over only when there are no within constraints.
pub fn closed_form_mpwco(partition: &GroupPartition, within_counts: &[usize]) -> Result<ClosedForm> {
    let sizes = partition.sizes();
    if within_counts.len() != sizes.len() {
        return Err(Error::DimensionMismatch { expected: sizes.len(), found: within_counts.len() });
    }
    if within_counts.iter().any(|&c| c > 1) {
        return Err(Error::FormulaInapplicable("a group has more than one within constraint".into()));
    }
    if sizes.iter().zip(within_counts).any(|(&k, &c)| c == 1 && k < 2) {
        return Err(Error::InvalidConstraint("a singleton group cannot hold a constraint".into()));
    }
    let base = closed_form_pwgco(partition);
    let dropped: usize = within_counts.iter().sum();
    let p = base.p - dropped;
    Ok(ClosedForm {
        p,
        a: if dropped == 0 { base.a } else { None },
        d: base.d,
        g: BigRational::from_integer(BigInt::from(p)),
    })
}

/// Closed-form baseline for a system with at most one within constraint
/// per group.
pub fn closed_form_for(system: &ConstraintSystem) -> Result<ClosedForm> {
    closed_form_mpwco(system.partition(), &system.within_counts())
}

/// Criterion values and efficiencies against a baseline.
#[derive(Clone, Debug, PartialEq)]
pub struct CriterionReport {
    pub p: usize,
    pub runs: Option<u64>,
    pub a_value: Option<f64>,
    pub d_value: f64,
    pub g_value: Option<f64>,
    pub a_eff: Option<f64>,
    pub d_eff: f64,
    pub g_eff: f64,
    pub g_exhaustive: bool,
    pub singular: bool,
    /// Present for exact evaluations.
    pub exact: Option<ExactEfficiencies>,
}

/// Exact efficiency ratios; `d_ratio = D / D0` (so `D_eff = d_ratio^{1/p}`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactEfficiencies {
    pub a_eff: Option<BigRational>,
    pub d_ratio: BigRational,
    pub g_eff: Option<BigRational>,
}

impl ExactEfficiencies {
    /// True when every available efficiency equals one exactly.
    pub fn all_one(&self) -> bool {
        let one = BigRational::one();
        self.d_ratio == one && self.g_eff.as_ref() == Some(&one) && self.a_eff.as_ref().is_none_or(|a| *a == one)
    }
}

fn d_eff_from(d: f64, d0: f64, p: usize) -> f64 {
    if d <= 0.0 {
        0.0
    } else {
        libm::pow(d / d0, 1.0 / p as f64)
    }
}

/// Float efficiencies of a measure against a baseline. Singular moment
/// matrices give `A_eff = G_eff = 0` with A and G values absent.
pub fn efficiencies(
    measure: &DesignMeasure,
    spec: &ModelSpec,
    feasible: &FeasibleSet,
    baseline: &ClosedForm,
) -> Result<CriterionReport> {
    check_baseline(spec, baseline)?;
    let d = d_value(measure, spec)?;
    let d0 = rat_to_f64(&baseline.d);
    let (a, g, singular) = match inverse_f64(measure, spec) {
        Ok((inv, _)) => {
            let g = g_value(measure, spec, feasible)?;
            (Some(inv.trace()), Some(g.value), false)
        }
        Err(Error::Singular { .. }) => (None, None, true),
        Err(e) => return Err(e),
    };
    let a_eff = baseline.a.as_ref().map(|a0| a.map_or(0.0, |a| rat_to_f64(a0) / a));
    Ok(CriterionReport {
        p: spec.p(),
        runs: None,
        a_value: a,
        d_value: d,
        g_value: g,
        a_eff,
        d_eff: d_eff_from(d, d0, spec.p()),
        g_eff: g.map_or(0.0, |g| rat_to_f64(&baseline.g) / g),
        g_exhaustive: true,
        singular,
        exact: None,
    })
}

/// Exact efficiencies of a design given as rows. `candidates` should be the
/// full feasible set; pass `exhaustive = false` for a sample.
pub fn exact_efficiencies(
    rows: &[Order],
    spec: &ModelSpec,
    candidates: &[Order],
    exhaustive: bool,
    baseline: &ClosedForm,
) -> Result<CriterionReport> {
    check_baseline(spec, baseline)?;
    let c = exact_criteria(rows, spec, candidates, exhaustive)?;
    let d_ratio = &c.d / &baseline.d;
    let a_eff = baseline.a.as_ref().map(|a0| c.a.as_ref().map_or_else(BigRational::zero, |a| a0 / a));
    let g_eff = c.g.as_ref().map(|g| &baseline.g / &g.value);
    let d_value = rat_to_f64(&c.d);
    Ok(CriterionReport {
        p: spec.p(),
        runs: Some(rows.len() as u64),
        a_value: c.a.as_ref().map(rat_to_f64),
        d_value,
        g_value: c.g.as_ref().map(|g| rat_to_f64(&g.value)),
        a_eff: a_eff.as_ref().map(rat_to_f64),
        d_eff: if d_ratio.is_positive() { libm::pow(rat_to_f64(&d_ratio), 1.0 / spec.p() as f64) } else { 0.0 },
        g_eff: g_eff.as_ref().map_or(0.0, rat_to_f64),
        g_exhaustive: exhaustive,
        singular: c.singular_direction.is_some(),
        exact: Some(ExactEfficiencies { a_eff, d_ratio, g_eff }),
    })
}

fn check_baseline(spec: &ModelSpec, baseline: &ClosedForm) -> Result<()> {
    if spec.p() != baseline.p {
        return Err(Error::DimensionMismatch { expected: baseline.p, found: spec.p() });
    }
    Ok(())
}

/// One entry of the normalized cross-product matrix that disagrees with
/// the structure of the full design.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureViolation {
    pub row_term: String,
    pub col_term: String,
    pub expected: BigRational,
    pub found: BigRational,
}

/// Mean of the code "x before y" under the full design of the group, whose
/// optional constraint is `c`.
fn code_mean(x: Label, y: Label, c: Option<(Label, Label)>) -> BigRational {
    match c {
        Some((a, b)) if (x, y) == (a, b) => BigRational::one(),
        Some((a, b)) if (x, y) == (b, a) => -BigRational::one(),
        Some((a, b)) if x == a || y == b => rat(1, 3),
        Some((a, b)) if x == b || y == a => rat(-1, 3),
        _ => BigRational::zero(),
    }
}

/// Checks every entry of `XᵀX / n` against the values implied by the full
/// design of a system with at most one within constraint per group:
/// unit diagonal, `±1/3` for pairs sharing a component, zero for disjoint
/// pairs in one group, the constraint-induced `±1/3` intercept column, and
/// products of means across groups.
pub fn verify_moment_structure(rows: &[Order], system: &ConstraintSystem) -> Result<Vec<StructureViolation>> {
    if !system.is_simple() {
        return Err(Error::FormulaInapplicable("structure identities assume at most one within constraint per group".into()));
    }
    let spec = derive_model(system);
    let mm = moment_sums(rows, &spec)?;
    let names = spec.term_names();
    let terms = spec.terms();
    let part = system.partition();
    let constraint_of = |g: usize| system.within()[g].first().map(|c| (c.before, c.after));
    let group = |l: Label| part.group_of(l).expect("label in partition");
    let mean = |t: (Label, Label)| code_mean(t.0, t.1, constraint_of(group(t.0)));
    let mut out = Vec::new();
    let p = spec.p();
    for a in 0..p {
        for b in 0..p {
            let expected = if a == b {
                BigRational::one()
            } else if a == 0 || b == 0 {
                mean(terms[a.max(b) - 1])
            } else {
                let (s, t) = (terms[a - 1], terms[b - 1]);
                if group(s.0) != group(t.0) {
                    mean(s) * mean(t)
                } else if let Some(h) = [s.0, s.1].into_iter().find(|h| *h == t.0 || *h == t.1) {
                    let sigma = |pair: (Label, Label)| if pair.0 == h { 1 } else { -1 };
                    rat(sigma(s) * sigma(t), 3)
                } else {
                    BigRational::zero()
                }
            };
            let found = mm.entry(a, b);
            if found != expected {
                out.push(StructureViolation {
                    row_term: names[a].clone(),
                    col_term: names[b].clone(),
                    expected,
                    found,
                });
            }
        }
    }
    Ok(out)
}
