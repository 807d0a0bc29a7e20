//! Orders, constraint systems and feasible sets.
//!
//! Component labels are 1-based. Group membership is by explicit label sets,
//! so nothing here assumes that a group occupies a contiguous label range.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

pub type Label = u16;

/// Default upper bound on the number of orders materialized by enumeration.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

/// One experimental run: a permutation of the labels `1..=m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Order(Vec<Label>);

impl Order {
    pub fn new(seq: Vec<Label>) -> Result<Self> {
        let m = seq.len();
        let mut seen = vec![false; m + 1];
        for &l in &seq {
            let idx = l as usize;
            if idx == 0 || idx > m {
                return Err(Error::InvalidOrder(format!("label {l} outside 1..={m}")));
            }
            if seen[idx] {
                return Err(Error::InvalidOrder(format!("label {l} repeated")));
            }
            seen[idx] = true;
        }
        Ok(Order(seq))
    }

    /// The identity order `(1, 2, .., m)`.
    pub fn identity(m: usize) -> Self {
        Order((1..=m as Label).collect())
    }

    pub(crate) fn from_vec_unchecked(seq: Vec<Label>) -> Self {
        debug_assert!(Order::new(seq.clone()).is_ok());
        Order(seq)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn into_labels(self) -> Vec<Label> {
        self.0
    }

    /// Position of every label; index 0 is unused.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![usize::MAX; self.0.len() + 1];
        for (i, &l) in self.0.iter().enumerate() {
            pos[l as usize] = i;
        }
        pos
    }

    pub fn position(&self, label: Label) -> Option<usize> {
        self.0.iter().position(|&l| l == label)
    }

    /// The order read back to front.
    pub fn reversed(&self) -> Self {
        let mut seq = self.0.clone();
        seq.reverse();
        Order(seq)
    }

    /// Pairwise-ordering code: `+1` if `i` precedes `j`, `-1` otherwise.
    pub fn pwo(&self, i: Label, j: Label) -> Result<i8> {
        if i == j {
            return Err(Error::SameLabel(i));
        }
        let pi = self.position(i).ok_or(Error::UnknownLabel(i))?;
        let pj = self.position(j).ok_or(Error::UnknownLabel(j))?;
        Ok(if pi < pj { 1 } else { -1 })
    }

    pub fn precedes(&self, i: Label, j: Label) -> bool {
        matches!(self.pwo(i, j), Ok(1))
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Free-function form of [`Order::pwo`].
pub fn pwo(order: &Order, i: Label, j: Label) -> Result<i8> {
    order.pwo(i, j)
}

/// `before` must precede `after`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairwiseConstraint {
    pub before: Label,
    pub after: Label,
}

impl PairwiseConstraint {
    pub fn new(before: Label, after: Label) -> Result<Self> {
        if before == after {
            return Err(Error::InvalidConstraint(format!("{before}->{after} relates a label to itself")));
        }
        if before == 0 || after == 0 {
            return Err(Error::InvalidConstraint("labels are 1-based".into()));
        }
        Ok(PairwiseConstraint { before, after })
    }

    pub fn is_satisfied_by(&self, order: &Order) -> bool {
        order.precedes(self.before, self.after)
    }
}

impl fmt::Display for PairwiseConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.before, self.after)
    }
}

/// Ordered groups `G_1 -> G_2 -> ...` partitioning `1..=m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupPartition {
    groups: Vec<Vec<Label>>,
    m: usize,
}

impl GroupPartition {
    /// Groups are given in precedence order; labels inside a group are sorted.
    pub fn new(groups: Vec<Vec<Label>>) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::InvalidPartition("at least one group is required".into()));
        }
        let m: usize = groups.iter().map(Vec::len).sum();
        let mut seen = vec![false; m + 1];
        let mut sorted = Vec::with_capacity(groups.len());
        for g in groups {
            if g.is_empty() {
                return Err(Error::InvalidPartition("empty group".into()));
            }
            for &l in &g {
                let idx = l as usize;
                if idx == 0 || idx > m {
                    return Err(Error::InvalidPartition(format!("label {l} outside 1..={m}")));
                }
                if seen[idx] {
                    return Err(Error::InvalidPartition(format!("label {l} in more than one group")));
                }
                seen[idx] = true;
            }
            let mut g = g;
            g.sort_unstable();
            sorted.push(g);
        }
        Ok(GroupPartition { groups: sorted, m })
    }

    /// Contiguous groups of the given sizes: `(2,3)` gives `{1,2} -> {3,4,5}`.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        let mut next: Label = 1;
        let mut groups = Vec::with_capacity(sizes.len());
        for &s in sizes {
            groups.push((next..next + s as Label).collect());
            next += s as Label;
        }
        GroupPartition::new(groups)
    }

    /// A single unconstrained group on `1..=m`.
    pub fn single(m: usize) -> Self {
        GroupPartition { groups: vec![(1..=m as Label).collect()], m }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn groups(&self) -> &[Vec<Label>] {
        &self.groups
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }

    pub fn group_of(&self, label: Label) -> Option<usize> {
        self.groups.iter().position(|g| g.binary_search(&label).is_ok())
    }

    /// Every constraint implied by the group precedence.
    pub fn induced_constraints(&self) -> Vec<PairwiseConstraint> {
        let mut out = Vec::new();
        for (g1, a) in self.groups.iter().enumerate() {
            for b in &self.groups[g1 + 1..] {
                for &i in a {
                    for &j in b {
                        out.push(PairwiseConstraint { before: i, after: j });
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Free-function form of [`GroupPartition::induced_constraints`].
pub fn induced_pairwise_constraints(partition: &GroupPartition) -> Vec<PairwiseConstraint> {
    partition.induced_constraints()
}

/// Group precedence plus per-group sets of within-group constraints.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConstraintSystem {
    partition: GroupPartition,
    within: Vec<Vec<PairwiseConstraint>>,
}

impl ConstraintSystem {
    /// Attaches each within constraint to the group holding both endpoints
    /// and rejects cyclic systems.
    pub fn new(partition: GroupPartition, within: Vec<PairwiseConstraint>) -> Result<Self> {
        let mut per_group = vec![Vec::new(); partition.groups.len()];
        for c in within {
            let gb = partition
                .group_of(c.before)
                .ok_or_else(|| Error::InvalidConstraint(format!("{c}: label {} not in 1..={}", c.before, partition.m)))?;
            let ga = partition
                .group_of(c.after)
                .ok_or_else(|| Error::InvalidConstraint(format!("{c}: label {} not in 1..={}", c.after, partition.m)))?;
            if ga != gb {
                return Err(Error::InvalidConstraint(format!("{c} crosses groups")));
            }
            if !per_group[gb].contains(&c) {
                per_group[gb].push(c);
            }
        }
        for g in &mut per_group {
            g.sort_unstable();
        }
        let system = ConstraintSystem { partition, within: per_group };
        system.check_acyclic()?;
        Ok(system)
    }

    /// No within-group constraints.
    pub fn unconstrained(partition: GroupPartition) -> Self {
        let n = partition.groups.len();
        ConstraintSystem { partition, within: vec![Vec::new(); n] }
    }

    pub fn partition(&self) -> &GroupPartition {
        &self.partition
    }

    pub fn m(&self) -> usize {
        self.partition.m
    }

    pub fn within(&self) -> &[Vec<PairwiseConstraint>] {
        &self.within
    }

    pub fn within_counts(&self) -> Vec<usize> {
        self.within.iter().map(Vec::len).collect()
    }

    /// At most one within constraint per group: the setting the closed forms
    /// and constructions cover.
    pub fn is_simple(&self) -> bool {
        self.within.iter().all(|c| c.len() <= 1)
    }

    pub fn within_constraints(&self) -> impl Iterator<Item = &PairwiseConstraint> {
        self.within.iter().flatten()
    }

    pub fn all_constraints(&self) -> Vec<PairwiseConstraint> {
        let mut all = self.partition.induced_constraints();
        all.extend(self.within_constraints().copied());
        all
    }

    pub fn is_feasible(&self, order: &Order) -> Result<bool> {
        if order.len() != self.m() {
            return Err(Error::DimensionMismatch { expected: self.m(), found: order.len() });
        }
        let pos = order.positions();
        let mut last = 0usize;
        for (k, g) in self.partition.groups.iter().enumerate() {
            let lo = g.iter().map(|&l| pos[l as usize]).min().unwrap_or(0);
            let hi = g.iter().map(|&l| pos[l as usize]).max().unwrap_or(0);
            if k > 0 && lo < last {
                return Ok(false);
            }
            last = hi;
        }
        Ok(self
            .within_constraints()
            .all(|c| pos[c.before as usize] < pos[c.after as usize]))
    }

    /// Strict precedence implied by all constraints, transitively closed.
    /// `reach[i][j]` is true when label `i` must come before label `j`.
    pub fn precedence_closure(&self) -> Vec<Vec<bool>> {
        let m = self.m();
        let mut reach = vec![vec![false; m + 1]; m + 1];
        for c in self.all_constraints() {
            reach[c.before as usize][c.after as usize] = true;
        }
        for k in 1..=m {
            for i in 1..=m {
                if reach[i][k] {
                    for j in 1..=m {
                        if reach[k][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
        }
        reach
    }

    fn check_acyclic(&self) -> Result<()> {
        // Kahn's algorithm over induced + within edges.
        let m = self.m();
        let mut succ = vec![Vec::new(); m + 1];
        let mut indeg = vec![0usize; m + 1];
        for c in self.all_constraints() {
            succ[c.before as usize].push(c.after as usize);
            indeg[c.after as usize] += 1;
        }
        let mut queue: VecDeque<usize> = (1..=m).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = queue.pop_front() {
            seen += 1;
            for &w in &succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        if seen == m {
            Ok(())
        } else {
            Err(Error::Cyclic)
        }
    }

    /// `Π |G_g|!`, the enumeration bound before within constraints.
    pub fn product_bound(&self) -> u128 {
        self.partition.groups.iter().map(|g| factorial(g.len())).fold(1u128, |a, b| a.saturating_mul(b))
    }
}

/// The feasible orders of a system in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibleSet {
    orders: Vec<Order>,
    system: ConstraintSystem,
}

impl FeasibleSet {
    pub fn orders(&self) -> &[Order] {
        &self.orders
    }

    pub fn system(&self) -> &ConstraintSystem {
        &self.system
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn contains(&self, order: &Order) -> bool {
        self.orders.binary_search(order).is_ok()
    }

    pub fn into_orders(self) -> Vec<Order> {
        self.orders
    }
}

pub fn is_feasible(order: &Order, system: &ConstraintSystem) -> Result<bool> {
    system.is_feasible(order)
}

/// `Π |G_g|! / 2^{|C_g|}`; only valid when every group has at most one
/// within constraint.
pub fn feasible_count(system: &ConstraintSystem) -> Result<u128> {
    if !system.is_simple() {
        return Err(Error::FormulaInapplicable(
            "a group has more than one within constraint; enumerate instead".into(),
        ));
    }
    let mut total = 1u128;
    for (g, c) in system.partition.groups.iter().zip(&system.within) {
        let f = factorial(g.len()) >> c.len();
        total = total
            .checked_mul(f)
            .ok_or_else(|| Error::Unsupported("feasible count overflows u128".into()))?;
    }
    Ok(total)
}

/// Enumerates the feasible set with the default cap.
pub fn enumerate_feasible(system: &ConstraintSystem) -> Result<FeasibleSet> {
    enumerate_feasible_capped(system, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_feasible_capped(system: &ConstraintSystem, cap: u128) -> Result<FeasibleSet> {
    let bound = system.product_bound();
    if bound > cap {
        return Err(Error::CapExceeded { bound, cap });
    }
    let per_group: Vec<Vec<Vec<Label>>> = system
        .partition
        .groups
        .iter()
        .zip(&system.within)
        .map(|(g, c)| linear_extensions(g, c))
        .collect();
    if per_group.iter().any(Vec::is_empty) {
        return Err(Error::Cyclic);
    }
    let orders = cartesian_concat(&per_group)
        .into_iter()
        .map(Order::from_vec_unchecked)
        .collect();
    Ok(FeasibleSet { orders, system: system.clone() })
}

/// All orderings of `labels` (sorted) that respect `constraints`, in
/// lexicographic order.
pub fn linear_extensions(labels: &[Label], constraints: &[PairwiseConstraint]) -> Vec<Vec<Label>> {
    let k = labels.len();
    let idx = |l: Label| labels.iter().position(|&x| x == l);
    // preds[a] = bitmask of local indices that must precede a
    let mut preds = vec![0u64; k];
    for c in constraints {
        if let (Some(b), Some(a)) = (idx(c.before), idx(c.after)) {
            preds[a] |= 1 << b;
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(labels: &[Label], preds: &[u64], placed: u64, cur: &mut Vec<Label>, out: &mut Vec<Vec<Label>>) {
        if cur.len() == labels.len() {
            out.push(cur.clone());
            return;
        }
        for (i, &l) in labels.iter().enumerate() {
            if placed & (1 << i) == 0 && preds[i] & !placed == 0 {
                cur.push(l);
                rec(labels, preds, placed | (1 << i), cur, out);
                cur.pop();
            }
        }
    }
    rec(labels, &preds, 0, &mut cur, &mut out);
    out
}

/// Concatenates one segment from each list, odometer style with the last
/// list varying fastest. Lexicographic when each list is.
pub(crate) fn cartesian_concat(parts: &[Vec<Vec<Label>>]) -> Vec<Vec<Label>> {
    let total: usize = parts.iter().map(Vec::len).product();
    let width: usize = parts.iter().map(|p| p.first().map_or(0, Vec::len)).sum();
    let mut out = Vec::with_capacity(total);
    if parts.iter().any(Vec::is_empty) {
        return out;
    }
    let mut idx = vec![0usize; parts.len()];
    loop {
        let mut row = Vec::with_capacity(width);
        for (p, &i) in parts.iter().zip(&idx) {
            row.extend_from_slice(&p[i]);
        }
        out.push(row);
        let mut g = parts.len();
        loop {
            if g == 0 {
                return out;
            }
            g -= 1;
            idx[g] += 1;
            if idx[g] < parts[g].len() {
                break;
            }
            idx[g] = 0;
        }
    }
}

pub(crate) fn factorial(n: usize) -> u128 {
    (1..=n as u128).fold(1u128, |a, b| a.saturating_mul(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn ord(v: &[Label]) -> Order {
        Order::new(v.to_vec()).unwrap()
    }

    fn three_pairs() -> ConstraintSystem {
        ConstraintSystem::unconstrained(GroupPartition::from_sizes(&[2, 2, 2]).unwrap())
    }

    fn case_study() -> ConstraintSystem {
        ConstraintSystem::new(
            GroupPartition::from_sizes(&[2, 4]).unwrap(),
            vec![PairwiseConstraint::new(4, 5).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn pwo_examples() {
        assert_eq!(ord(&[1, 2, 3]).pwo(1, 3), Ok(1));
        assert_eq!(ord(&[3, 1, 2]).pwo(1, 3), Ok(-1));
        assert_eq!(ord(&[2, 1, 4, 3, 6, 5]).pwo(5, 6), Ok(-1));
        assert_eq!(ord(&[1, 2, 3]).pwo(2, 2), Err(Error::SameLabel(2)));
        assert_eq!(ord(&[1, 2, 3]).pwo(1, 4), Err(Error::UnknownLabel(4)));
    }

    #[test]
    fn order_validation() {
        assert!(Order::new(vec![1, 1, 2]).is_err());
        assert!(Order::new(vec![0, 1]).is_err());
        assert!(Order::new(vec![1, 3]).is_err());
        assert_eq!(ord(&[2, 3, 1]).to_string(), "2,3,1");
    }

    #[test]
    fn induced_constraints_three_pairs() {
        let c = GroupPartition::from_sizes(&[2, 2, 2]).unwrap().induced_constraints();
        let expected: Vec<_> = [(1, 3), (1, 4), (1, 5), (1, 6), (2, 3), (2, 4), (2, 5), (2, 6), (3, 5), (3, 6), (4, 5), (4, 6)]
            .iter()
            .map(|&(a, b)| PairwiseConstraint::new(a, b).unwrap())
            .collect();
        assert_eq!(c, expected);
        assert!(GroupPartition::single(3).induced_constraints().is_empty());
        let two = GroupPartition::from_sizes(&[1, 1]).unwrap().induced_constraints();
        assert_eq!(two, vec![PairwiseConstraint::new(1, 2).unwrap()]);
    }

    #[test]
    fn feasibility_examples() {
        assert!(three_pairs().is_feasible(&ord(&[1, 2, 4, 3, 6, 5])).unwrap());
        assert!(!three_pairs().is_feasible(&ord(&[3, 1, 2, 4, 5, 6])).unwrap());
        assert!(!case_study().is_feasible(&ord(&[1, 2, 3, 5, 4, 6])).unwrap());
        assert!(matches!(
            three_pairs().is_feasible(&ord(&[1, 2, 3])),
            Err(Error::DimensionMismatch { expected: 6, found: 3 })
        ));
    }

    #[test]
    fn enumerate_three_pairs() {
        let fs = enumerate_feasible(&three_pairs()).unwrap();
        let listed: Vec<Order> = [
            [1, 2, 3, 4, 5, 6],
            [1, 2, 4, 3, 5, 6],
            [1, 2, 3, 4, 6, 5],
            [1, 2, 4, 3, 6, 5],
            [2, 1, 3, 4, 5, 6],
            [2, 1, 4, 3, 5, 6],
            [2, 1, 3, 4, 6, 5],
            [2, 1, 4, 3, 6, 5],
        ]
        .iter()
        .map(|o| ord(o))
        .collect();
        assert_eq!(fs.len(), 8);
        for o in &listed {
            assert!(fs.contains(o));
        }
        assert!(fs.orders().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn enumerate_sop_tables() {
        let left = ConstraintSystem::new(
            GroupPartition::single(4),
            vec![PairwiseConstraint::new(1, 2).unwrap(), PairwiseConstraint::new(3, 4).unwrap()],
        )
        .unwrap();
        let fs = enumerate_feasible(&left).unwrap();
        let rows: Vec<_> = fs.orders().iter().map(|o| o.labels().to_vec()).collect();
        assert_eq!(
            rows,
            vec![
                vec![1, 2, 3, 4],
                vec![1, 3, 2, 4],
                vec![1, 3, 4, 2],
                vec![3, 1, 2, 4],
                vec![3, 1, 4, 2],
                vec![3, 4, 1, 2]
            ]
        );
        let right = ConstraintSystem::new(
            GroupPartition::single(4),
            vec![PairwiseConstraint::new(1, 2).unwrap(), PairwiseConstraint::new(1, 3).unwrap()],
        )
        .unwrap();
        let rows: Vec<_> = enumerate_feasible(&right).unwrap().orders().iter().map(|o| o.labels().to_vec()).collect();
        assert_eq!(
            rows,
            vec![
                vec![1, 2, 3, 4],
                vec![1, 2, 4, 3],
                vec![1, 3, 2, 4],
                vec![1, 3, 4, 2],
                vec![1, 4, 2, 3],
                vec![1, 4, 3, 2],
                vec![4, 1, 2, 3],
                vec![4, 1, 3, 2]
            ]
        );
    }

    #[test]
    fn counts() {
        assert_eq!(feasible_count(&three_pairs()).unwrap(), 8);
        assert_eq!(feasible_count(&case_study()).unwrap(), 24);
        let cod55 = ConstraintSystem::unconstrained(GroupPartition::from_sizes(&[5, 5]).unwrap());
        assert_eq!(feasible_count(&cod55).unwrap(), 14_400);
        assert_eq!(enumerate_feasible(&case_study()).unwrap().len(), 24);
    }

    #[test]
    fn cyclic_and_cross_group_rejected() {
        let p = GroupPartition::single(3);
        let cyc = ConstraintSystem::new(
            p.clone(),
            vec![
                PairwiseConstraint::new(1, 2).unwrap(),
                PairwiseConstraint::new(2, 3).unwrap(),
                PairwiseConstraint::new(3, 1).unwrap(),
            ],
        );
        assert_eq!(cyc, Err(Error::Cyclic));
        let cross = ConstraintSystem::new(
            GroupPartition::from_sizes(&[1, 2]).unwrap(),
            vec![PairwiseConstraint::new(1, 2).unwrap()],
        );
        assert!(matches!(cross, Err(Error::InvalidConstraint(_))));
    }

    #[test]
    fn cap_and_inapplicable_formula() {
        let big = ConstraintSystem::unconstrained(GroupPartition::single(12));
        assert!(matches!(enumerate_feasible(&big), Err(Error::CapExceeded { .. })));
        let multi = ConstraintSystem::new(
            GroupPartition::single(4),
            vec![PairwiseConstraint::new(1, 2).unwrap(), PairwiseConstraint::new(3, 4).unwrap()],
        )
        .unwrap();
        assert!(matches!(feasible_count(&multi), Err(Error::FormulaInapplicable(_))));
    }

    #[test]
    fn non_contiguous_groups() {
        let p = GroupPartition::new(vec![vec![4, 1], vec![3, 2]]).unwrap();
        let sys = ConstraintSystem::unconstrained(p);
        let fs = enumerate_feasible(&sys).unwrap();
        assert_eq!(fs.len(), 4);
        assert_eq!(fs.orders()[0].labels(), &[1, 4, 2, 3]);
        assert!(fs.orders().iter().all(|o| sys.is_feasible(o).unwrap()));
    }
}
