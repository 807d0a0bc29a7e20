//! First-order pairwise-ordering models under a constraint system.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::perm::{ConstraintSystem, Label, Order};

/// Intercept plus the retained pairs `(i, j)`, `i < j`, in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModelSpec {
    m: usize,
    terms: Vec<(Label, Label)>,
}

/// Model row `(1, I_ij(π), ...)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModelVector(pub Vec<i8>);

impl ModelVector {
    pub fn entries(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&v| v as f64).collect()
    }
}

impl ModelSpec {
    /// Builds a spec from explicit terms, which are normalized to `i < j`
    /// and sorted.
    pub fn new(m: usize, terms: Vec<(Label, Label)>) -> Result<Self> {
        let mut norm = Vec::with_capacity(terms.len());
        for (a, b) in terms {
            if a == b {
                return Err(Error::SameLabel(a));
            }
            for l in [a, b] {
                if l == 0 || l as usize > m {
                    return Err(Error::UnknownLabel(l));
                }
            }
            norm.push(if a < b { (a, b) } else { (b, a) });
        }
        norm.sort_unstable();
        let before = norm.len();
        norm.dedup();
        if norm.len() != before {
            return Err(Error::InvalidArgument("duplicate model term".into()));
        }
        Ok(ModelSpec { m, terms: norm })
    }

    /// The unconstrained model with all `m(m-1)/2` pairs.
    pub fn full(m: usize) -> Self {
        let mut terms = Vec::with_capacity(m * m.saturating_sub(1) / 2);
        for i in 1..=m as Label {
            for j in i + 1..=m as Label {
                terms.push((i, j));
            }
        }
        ModelSpec { m, terms }
    }

    /// Keeps the pairs whose code takes both signs over `orders`; for a full
    /// feasible set this agrees with [`derive_model`].
    pub fn from_orders(m: usize, orders: &[Order]) -> Result<Self> {
        let mut plus = alloc::vec![false; (m + 1) * (m + 1)];
        let mut minus = alloc::vec![false; (m + 1) * (m + 1)];
        for o in orders {
            if o.len() != m {
                return Err(Error::DimensionMismatch { expected: m, found: o.len() });
            }
            let pos = o.positions();
            for i in 1..=m {
                for j in i + 1..=m {
                    if pos[i] < pos[j] {
                        plus[i * (m + 1) + j] = true;
                    } else {
                        minus[i * (m + 1) + j] = true;
                    }
                }
            }
        }
        let mut terms = Vec::new();
        for i in 1..=m {
            for j in i + 1..=m {
                if plus[i * (m + 1) + j] && minus[i * (m + 1) + j] {
                    terms.push((i as Label, j as Label));
                }
            }
        }
        Ok(ModelSpec { m, terms })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> &[(Label, Label)] {
        &self.terms
    }

    /// Number of parameters including the intercept.
    pub fn p(&self) -> usize {
        self.terms.len() + 1
    }

    pub fn term_index(&self, i: Label, j: Label) -> Option<usize> {
        let key = if i < j { (i, j) } else { (j, i) };
        self.terms.binary_search(&key).ok().map(|k| k + 1)
    }

    /// Parameter names: `b0`, then `b12`-style names (with a dash once
    /// labels exceed one digit).
    pub fn term_names(&self) -> Vec<String> {
        let wide = self.m > 9;
        let mut out = Vec::with_capacity(self.p());
        out.push(String::from("b0"));
        for (i, j) in &self.terms {
            out.push(if wide { format!("b{i}-{j}") } else { format!("b{i}{j}") });
        }
        out
    }

    pub fn expand(&self, order: &Order) -> Result<ModelVector> {
        if order.len() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, found: order.len() });
        }
        Ok(self.expand_positions(&order.positions()))
    }

    pub(crate) fn expand_positions(&self, pos: &[usize]) -> ModelVector {
        let mut v = Vec::with_capacity(self.p());
        v.push(1);
        for &(i, j) in &self.terms {
            v.push(if pos[i as usize] < pos[j as usize] { 1 } else { -1 });
        }
        ModelVector(v)
    }
}

/// Keeps every within-group pair that the constraints leave free.
///
/// A pair is dropped when it is comparable under the transitive closure of
/// the group precedence and the within constraints, i.e. when its code is
/// constant over the feasible set. With at most one within constraint per
/// group this is exactly "different groups or the constrained pair".
pub fn derive_model(system: &ConstraintSystem) -> ModelSpec {
    let m = system.m();
    let reach = system.precedence_closure();
    let mut terms = Vec::new();
    for i in 1..=m {
        for j in i + 1..=m {
            if !reach[i][j] && !reach[j][i] {
                terms.push((i as Label, j as Label));
            }
        }
    }
    ModelSpec { m, terms }
}

pub fn expand(order: &Order, spec: &ModelSpec) -> Result<ModelVector> {
    spec.expand(order)
}

/// Stacks [`expand`] over the rows.
pub fn model_matrix(rows: &[Order], spec: &ModelSpec) -> Result<Vec<ModelVector>> {
    rows.iter().map(|o| spec.expand(o)).collect()
}

/// Indices of rows that violate the system. Model matrices are still built
/// for such rows; callers decide whether to warn.
pub fn infeasible_rows(rows: &[Order], system: &ConstraintSystem) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (k, o) in rows.iter().enumerate() {
        if !system.is_feasible(o)? {
            out.push(k);
        }
    }
    Ok(out)
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={}; terms=", self.m)?;
        for (k, (i, j)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}-{j}")?;
        }
        Ok(())
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |what: &str| Error::InvalidArgument(format!("model header: {what}"));
        let (m_part, t_part) = s.split_once(';').ok_or_else(|| bad("missing ';'"))?;
        let m = m_part
            .trim()
            .strip_prefix("m=")
            .ok_or_else(|| bad("expected m=<m>"))?
            .trim()
            .parse::<usize>()
            .map_err(|_| bad("m is not an integer"))?;
        let list = t_part.trim().strip_prefix("terms=").ok_or_else(|| bad("expected terms=..."))?.trim();
        let mut terms = Vec::new();
        if !list.is_empty() {
            for item in list.split(',') {
                let (a, b) = item.trim().split_once('-').ok_or_else(|| bad("term must be i-j"))?;
                let a = a.trim().parse::<Label>().map_err(|_| bad("bad label"))?;
                let b = b.trim().parse::<Label>().map_err(|_| bad("bad label"))?;
                terms.push((a, b));
            }
        }
        ModelSpec::new(m, terms)
    }
}
