//! Systematic fractional designs whose moment matrix equals that of the
//! full design on the feasible set.
//!
//! - [`construction1`]: group precedence only. Each group gets a small
//!   moment-equivalent design, and the group designs are crossed.
//! - [`construction2`]: one group, even `m`, one within constraint.
//! - [`construction3`]: one group, odd `m`, one within constraint.
//! - [`construction4`]: groups with at most one within constraint each.
//!
//! Group designs are built on canonical labels `1..=|G|` and mapped onto the
//! sorted group labels. Every builder has a `*_size` counterpart that
//! returns the run size without materializing anything.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_integer::Integer;

use crate::blocks::{
    cyclic_bibd_9, even_subset_design, find_component_design, hadamard, hadamard_bibd, verify_block_condition,
    BlockDesign, ComponentDesign, SearchConfig,
};
use crate::error::{Error, Result};
use crate::perm::{cartesian_concat, factorial, linear_extensions, ConstraintSystem, GroupPartition, Label, Order, PairwiseConstraint};

/// Default upper bound on materialized rows.
pub const DEFAULT_ROW_CAP: u128 = 10_000_000;

/// An exact design: `n` orders of `1..=m`, possibly repeated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DesignTable {
    m: usize,
    rows: Vec<Order>,
    provenance: String,
}

impl DesignTable {
    pub fn new(m: usize, rows: Vec<Order>, provenance: impl Into<String>) -> Result<Self> {
        if let Some(o) = rows.iter().find(|o| o.len() != m) {
            return Err(Error::DimensionMismatch { expected: m, found: o.len() });
        }
        Ok(DesignTable { m, rows, provenance: provenance.into() })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rows(&self) -> &[Order] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn into_rows(self) -> Vec<Order> {
        self.rows
    }

    /// Rows sorted, for multiset comparisons.
    pub fn sorted_rows(&self) -> Vec<Order> {
        let mut r = self.rows.clone();
        r.sort();
        r
    }
}

/// Reverses every row.
pub fn column_reversal(block: &[Vec<Label>]) -> Vec<Vec<Label>> {
    block
        .iter()
        .map(|r| {
            let mut r = r.clone();
            r.reverse();
            r
        })
        .collect()
}

/// How one unconstrained group is covered in [`construction1`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupPlan {
    /// Pick a design from the group size (see [`auto_group_design`]).
    Auto,
    /// All `|G|!` orders.
    Full,
    /// A given moment-equivalent design on canonical labels `1..=|G|`.
    Component(ComponentDesign),
    /// Block design on `1..=|G|` with component designs `A` (block size
    /// columns) and `Ā` (the rest) of equal row count.
    Blocks { blocks: BlockDesign, a: ComponentDesign, a_bar: ComponentDesign },
}

/// Settings shared by the constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConstructionConfig {
    pub search: SearchConfig,
    pub row_cap: u128,
}

impl Default for ConstructionConfig {
    fn default() -> Self {
        ConstructionConfig { search: SearchConfig::default(), row_cap: DEFAULT_ROW_CAP }
    }
}

/// Block design used by the automatic plan for groups of seven or more.
pub fn auto_block_design(size: usize) -> Result<BlockDesign> {
    if size < 7 {
        return Err(Error::InvalidArgument(format!("groups of {size} use a direct component design")));
    }
    if size % 4 == 3 && hadamard(size + 1).is_ok() {
        return hadamard_bibd(size.div_ceil(4));
    }
    if size % 4 == 0 && hadamard(size).is_ok() {
        return hadamard_bibd(size / 4)?.relabel(&canon(size)[1..])?.augment(1);
    }
    if size == 9 {
        return Ok(cyclic_bibd_9());
    }
    if size == 10 {
        return cyclic_bibd_9().relabel(&canon(size)[1..])?.augment(1);
    }
    if size % 2 == 0 {
        return even_subset_design(&canon(size));
    }
    Err(Error::Unsupported(format!("no built-in block design for a group of {size} components")))
}

fn canon(size: usize) -> Vec<Label> {
    (1..=size as Label).collect()
}

/// Rows of the automatic design for an unconstrained group of `size`
/// components, without building it.
pub fn auto_group_size(size: usize) -> Result<u128> {
    Ok(match size {
        0 => return Err(Error::InvalidPartition("empty group".into())),
        1..=3 => factorial(size),
        4 | 5 => 12,
        6 => 24,
        _ => {
            let bd = auto_block_design(size)?;
            let k = bd.k();
            let n = auto_group_size(k)?.lcm(&auto_group_size(size - k)?);
            2 * bd.b() as u128 * n
        }
    })
}

/// Moment-equivalent design for an unconstrained group on `1..=size`:
/// full designs up to three components, searched 12-, 12- and 24-run
/// designs for four, five and six, and the block construction beyond.
pub fn auto_group_design(size: usize, search: SearchConfig) -> Result<ComponentDesign> {
    let labels = canon(size);
    match size {
        0 => Err(Error::InvalidPartition("empty group".into())),
        1..=3 => Ok(ComponentDesign::full(&labels)),
        4 | 5 => find_component_design(&labels, 12, search),
        6 => find_component_design(&labels, 24, search),
        _ => {
            let blocks = auto_block_design(size)?;
            let k = blocks.k();
            let a = auto_group_design(k, search)?;
            let a_bar = auto_group_design(size - k, search)?;
            let n = a.len().lcm(&a_bar.len());
            let a = a.replicate(n / a.len());
            let a_bar = a_bar.replicate(n / a_bar.len());
            let rows = block_group_rows(&labels, &blocks, &a, &a_bar)?;
            ComponentDesign::new(labels, rows)
        }
    }
}

/// Steps 2-3 of the first construction on the sorted `group` labels.
fn block_group_rows(
    group: &[Label],
    blocks: &BlockDesign,
    a: &ComponentDesign,
    a_bar: &ComponentDesign,
) -> Result<Vec<Vec<Label>>> {
    if blocks.symbols() != group {
        return Err(Error::InvalidBlockDesign("block symbols differ from the group".into()));
    }
    if !verify_block_condition(blocks) {
        return Err(Error::InvalidBlockDesign("block condition fails".into()));
    }
    if a.len() != a_bar.len() {
        return Err(Error::InvalidArgument(format!(
            "A has {} rows but Ā has {}",
            a.len(),
            a_bar.len()
        )));
    }
    if a.labels().len() != blocks.k() || a_bar.labels().len() != group.len() - blocks.k() {
        return Err(Error::InvalidArgument("component design sizes do not match the block size".into()));
    }
    if !a.is_certified() || !a_bar.is_certified() {
        return Err(Error::InvalidArgument("component designs must be moment-equivalent".into()));
    }
    let mut rows = Vec::with_capacity(2 * blocks.b() * a.len());
    for o in blocks.blocks() {
        let rest: Vec<Label> = group.iter().copied().filter(|l| o.binary_search(l).is_err()).collect();
        let b = a.relabel(o)?;
        let c = a_bar.relabel(&rest)?;
        for (br, cr) in b.rows().iter().zip(c.rows()) {
            rows.push([br.as_slice(), cr.as_slice()].concat());
        }
        for (br, cr) in b.rows().iter().zip(column_reversal(c.rows())) {
            rows.push([cr.as_slice(), br.as_slice()].concat());
        }
    }
    Ok(rows)
}

fn plan_rows(size: usize, plan: &GroupPlan, search: SearchConfig) -> Result<Vec<Vec<Label>>> {
    let labels = canon(size);
    match plan {
        GroupPlan::Auto => Ok(auto_group_design(size, search)?.rows().to_vec()),
        GroupPlan::Full => Ok(linear_extensions(&labels, &[])),
        GroupPlan::Component(cd) => {
            if cd.labels() != labels.as_slice() {
                return Err(Error::InvalidArgument(format!("component design is not on 1..={size}")));
            }
            if !cd.is_certified() {
                return Err(Error::InvalidArgument("component design is not moment-equivalent".into()));
            }
            Ok(cd.rows().to_vec())
        }
        GroupPlan::Blocks { blocks, a, a_bar } => block_group_rows(&labels, blocks, a, a_bar),
    }
}

fn plan_size(size: usize, plan: &GroupPlan) -> Result<u128> {
    match plan {
        GroupPlan::Auto => auto_group_size(size),
        GroupPlan::Full => Ok(factorial(size)),
        GroupPlan::Component(cd) => Ok(cd.len() as u128),
        GroupPlan::Blocks { blocks, a, .. } => Ok(2 * blocks.b() as u128 * a.len() as u128),
    }
}

/// Maps rows on `1..=k` onto the sorted labels of `group`.
fn map_rows(rows: Vec<Vec<Label>>, group: &[Label]) -> Vec<Vec<Label>> {
    rows.into_iter().map(|r| r.into_iter().map(|l| group[l as usize - 1]).collect()).collect()
}

fn cross(m: usize, per_group: Vec<Vec<Vec<Label>>>, provenance: String) -> Result<DesignTable> {
    let rows = cartesian_concat(&per_group).into_iter().map(Order::from_vec_unchecked).collect();
    DesignTable::new(m, rows, provenance)
}

fn check_cap(n: u128, cap: u128) -> Result<()> {
    if n > cap {
        Err(Error::CapExceeded { bound: n, cap })
    } else {
        Ok(())
    }
}

fn product(sizes: impl IntoIterator<Item = Result<u128>>) -> Result<u128> {
    let mut n = 1u128;
    for s in sizes {
        n = n.checked_mul(s?).ok_or_else(|| Error::Unsupported("run size overflows u128".into()))?;
    }
    Ok(n)
}

fn sizes_text(partition: &GroupPartition) -> String {
    let s: Vec<String> = partition.sizes().iter().map(|k| format!("{k}")).collect();
    s.join(",")
}

/// Run size of [`construction1`] with the given plans.
pub fn construction1_size(partition: &GroupPartition, plans: &[GroupPlan]) -> Result<u128> {
    check_plans(partition, plans)?;
    product(partition.sizes().into_iter().zip(plans).map(|(s, p)| plan_size(s, p)))
}

fn check_plans(partition: &GroupPartition, plans: &[GroupPlan]) -> Result<()> {
    if plans.len() != partition.groups().len() {
        return Err(Error::DimensionMismatch { expected: partition.groups().len(), found: plans.len() });
    }
    Ok(())
}

/// Design for group precedence constraints: one moment-equivalent design
/// per group, crossed over groups in group order.
pub fn construction1(partition: &GroupPartition, plans: &[GroupPlan], cfg: ConstructionConfig) -> Result<DesignTable> {
    check_cap(construction1_size(partition, plans)?, cfg.row_cap)?;
    let mut per_group = Vec::with_capacity(plans.len());
    for (g, plan) in partition.groups().iter().zip(plans) {
        per_group.push(map_rows(plan_rows(g.len(), plan, cfg.search)?, g));
    }
    cross(
        partition.m(),
        per_group,
        format!("construction=c1; groups={}; seed={}", sizes_text(partition), cfg.search.seed),
    )
}

/// [`construction1`] with [`GroupPlan::Auto`] for every group.
pub fn construction1_auto(partition: &GroupPartition, cfg: ConstructionConfig) -> Result<DesignTable> {
    let plans = alloc::vec![GroupPlan::Auto; partition.groups().len()];
    construction1(partition, &plans, cfg)
}

fn check_constraint(m: usize, c: PairwiseConstraint) -> Result<()> {
    for l in [c.before, c.after] {
        if l as usize > m {
            return Err(Error::InvalidConstraint(format!("{c}: label {l} outside 1..={m}")));
        }
    }
    Ok(())
}

/// `m! / (m/2)!`.
pub fn construction2_size(m: usize) -> Result<u128> {
    if m % 2 != 0 || m < 4 {
        return Err(Error::InvalidArgument(format!("the even construction needs even m >= 4, got {m}")));
    }
    Ok(factorial(m) / factorial(m / 2))
}

/// One group of even size `m` with the constraint `c`.
pub fn construction2(m: usize, c: PairwiseConstraint, cfg: ConstructionConfig) -> Result<DesignTable> {
    check_cap(construction2_size(m)?, cfg.row_cap)?;
    check_constraint(m, c)?;
    let rows = construction2_rows(m, c);
    DesignTable::new(
        m,
        rows.into_iter().map(Order::from_vec_unchecked).collect(),
        format!("construction=c2; m={m}; constraint={c}"),
    )
}

fn construction2_rows(m: usize, c: PairwiseConstraint) -> Vec<Vec<Label>> {
    let (ic, jc) = (c.before, c.after);
    let all = canon(m);
    let others: Vec<Label> = all.iter().copied().filter(|&l| l != ic).collect();
    let mut rows = Vec::new();
    for t in crate::blocks::k_subsets(&others, m / 2 - 1) {
        let mut o = t;
        o.push(ic);
        o.sort_unstable();
        let rest: Vec<Label> = all.iter().copied().filter(|l| o.binary_search(l).is_err()).collect();
        let cbl = linear_extensions(&rest, &[]);
        if o.contains(&jc) {
            let bc = linear_extensions(&o, &[c]);
            let b: Vec<Vec<Label>> = bc.iter().chain(bc.iter()).cloned().collect();
            for (br, cr) in b.iter().zip(&cbl) {
                rows.push([br.as_slice(), cr.as_slice()].concat());
            }
            for (br, cr) in b.iter().zip(column_reversal(&cbl)) {
                rows.push([cr.as_slice(), br.as_slice()].concat());
            }
        } else {
            let b = linear_extensions(&o, &[]);
            for (br, cr) in b.iter().zip(&cbl) {
                rows.push([br.as_slice(), cr.as_slice()].concat());
            }
            for (br, cr) in b.iter().zip(column_reversal(&cbl)) {
                rows.push([br.as_slice(), cr.as_slice()].concat());
            }
        }
    }
    rows
}

/// `m! / ((m−1)/2)!`.
pub fn construction3_size(m: usize) -> Result<u128> {
    if m % 2 == 0 || m < 5 {
        return Err(Error::InvalidArgument(format!("the odd construction needs odd m >= 5, got {m}")));
    }
    Ok(factorial(m) / factorial((m - 1) / 2))
}

/// Default inserted component: the smallest label other than the
/// constrained pair.
pub fn default_insert(m: usize, c: PairwiseConstraint) -> Label {
    (1..=m as Label).find(|&l| l != c.before && l != c.after).expect("m >= 3")
}

/// One group of odd size `m` with the constraint `c`: the even design on
/// `m − 1` labels with component `insert` placed in each position.
pub fn construction3(m: usize, c: PairwiseConstraint, insert: Option<Label>, cfg: ConstructionConfig) -> Result<DesignTable> {
    check_cap(construction3_size(m)?, cfg.row_cap)?;
    check_constraint(m, c)?;
    let i = insert.unwrap_or_else(|| default_insert(m, c));
    if i == c.before || i == c.after || i == 0 || i as usize > m {
        return Err(Error::InvalidArgument(format!("cannot insert component {i} for constraint {c} with m={m}")));
    }
    let rows = construction3_rows(m, c, i);
    DesignTable::new(
        m,
        rows.into_iter().map(Order::from_vec_unchecked).collect(),
        format!("construction=c3; m={m}; constraint={c}; insert={i}"),
    )
}

fn construction3_rows(m: usize, c: PairwiseConstraint, i: Label) -> Vec<Vec<Label>> {
    let base = construction2_rows(m - 1, PairwiseConstraint { before: 1, after: 2 });
    let mut map = alloc::vec![c.before, c.after];
    map.extend((1..=m as Label).filter(|&l| l != c.before && l != c.after && l != i));
    let base: Vec<Vec<Label>> = base.into_iter().map(|r| r.into_iter().map(|l| map[l as usize - 1]).collect()).collect();
    let mut rows = Vec::with_capacity(base.len() * m);
    for k in 0..m {
        for r in &base {
            let mut row = r.clone();
            row.insert(k, i);
            rows.push(row);
        }
    }
    rows
}

/// Rows for one group of `size` with an optional constraint, on `1..=size`.
fn constrained_group_rows(size: usize, c: Option<PairwiseConstraint>, search: SearchConfig) -> Result<Vec<Vec<Label>>> {
    let Some(c) = c else {
        return Ok(auto_group_design(size, search)?.rows().to_vec());
    };
    Ok(match size {
        2 | 3 => linear_extensions(&canon(size), &[c]),
        s if s % 2 == 0 => construction2_rows(s, c),
        s => construction3_rows(s, c, default_insert(s, c)),
    })
}

fn constrained_group_size(size: usize, constrained: bool) -> Result<u128> {
    if !constrained {
        return auto_group_size(size);
    }
    match size {
        2 | 3 => Ok(factorial(size) / 2),
        s if s % 2 == 0 => construction2_size(s),
        s => construction3_size(s),
    }
}

/// Constraint of group `g` moved onto canonical labels `1..=|G_g|`.
fn canonical_constraint(group: &[Label], c: &PairwiseConstraint) -> PairwiseConstraint {
    let rank = |l: Label| group.binary_search(&l).expect("label in group") as Label + 1;
    PairwiseConstraint { before: rank(c.before), after: rank(c.after) }
}

fn check_simple(system: &ConstraintSystem) -> Result<()> {
    if !system.is_simple() {
        return Err(Error::FormulaInapplicable(
            "the mixed construction allows at most one within constraint per group".into(),
        ));
    }
    Ok(())
}

/// Run size of [`construction4`].
pub fn construction4_size(system: &ConstraintSystem) -> Result<u128> {
    check_simple(system)?;
    product(
        system
            .partition()
            .groups()
            .iter()
            .zip(system.within())
            .map(|(g, c)| constrained_group_size(g.len(), !c.is_empty())),
    )
}

/// Groups with at most one within constraint: the even or odd single-group
/// construction for constrained groups (all feasible orders for groups of
/// two or three), the automatic first-construction design otherwise,
/// crossed over groups.
pub fn construction4(system: &ConstraintSystem, cfg: ConstructionConfig) -> Result<DesignTable> {
    check_cap(construction4_size(system)?, cfg.row_cap)?;
    let mut per_group = Vec::new();
    for (g, c) in system.partition().groups().iter().zip(system.within()) {
        let cc = c.first().map(|c| canonical_constraint(g, c));
        per_group.push(map_rows(constrained_group_rows(g.len(), cc, cfg.search)?, g));
    }
    let counts: Vec<String> = system.within_counts().iter().map(|k| format!("{k}")).collect();
    cross(
        system.m(),
        per_group,
        format!(
            "construction=c4; groups={}; within={}; seed={}",
            sizes_text(system.partition()),
            counts.join(","),
            cfg.search.seed
        ),
    )
}
