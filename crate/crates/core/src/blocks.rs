//! Block designs and moment-equivalent component designs.
//!
//! A component design on a label set `S` is a list of orders of `S` whose
//! uniform moment matrix under the full pairwise-ordering model equals that
//! of the full design (all `|S|!` orders). Block designs choose which
//! components go into the front part of each run in the first
//! construction; they must satisfy
//! `λ_ih − λ_jh = (r_i − r_j)/2` for all distinct `i, j, h`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::perm::{factorial, linear_extensions, Label};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDesign {
    symbols: Vec<Label>,
    blocks: Vec<Vec<Label>>,
}

impl BlockDesign {
    /// Blocks are sorted internally; all blocks must have the same size.
    pub fn new(symbols: Vec<Label>, blocks: Vec<Vec<Label>>) -> Result<Self> {
        let mut symbols = symbols;
        symbols.sort_unstable();
        symbols.dedup();
        let k = blocks.first().map_or(0, Vec::len);
        let mut out = Vec::with_capacity(blocks.len());
        for mut b in blocks {
            if b.len() != k {
                return Err(Error::InvalidBlockDesign("blocks differ in size".into()));
            }
            b.sort_unstable();
            if b.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidBlockDesign("repeated symbol in a block".into()));
            }
            if let Some(s) = b.iter().find(|s| symbols.binary_search(s).is_err()) {
                return Err(Error::InvalidBlockDesign(format!("symbol {s} not in the symbol set")));
            }
            out.push(b);
        }
        Ok(BlockDesign { symbols, blocks: out })
    }

    pub fn symbols(&self) -> &[Label] {
        &self.symbols
    }

    pub fn blocks(&self) -> &[Vec<Label>] {
        &self.blocks
    }

    pub fn v(&self) -> usize {
        self.symbols.len()
    }

    pub fn b(&self) -> usize {
        self.blocks.len()
    }

    pub fn k(&self) -> usize {
        self.blocks.first().map_or(0, Vec::len)
    }

    /// `r_i`: number of blocks containing `i`.
    pub fn replication(&self, i: Label) -> usize {
        self.blocks.iter().filter(|b| b.binary_search(&i).is_ok()).count()
    }

    /// `λ_ij`: number of blocks containing both `i` and `j`.
    pub fn concurrence(&self, i: Label, j: Label) -> usize {
        self.blocks
            .iter()
            .filter(|b| b.binary_search(&i).is_ok() && b.binary_search(&j).is_ok())
            .count()
    }

    /// `(r, λ)` when replication and concurrence are constant.
    pub fn bibd_parameters(&self) -> Option<(usize, usize)> {
        let s = &self.symbols;
        let r = self.replication(*s.first()?);
        if s.iter().any(|&i| self.replication(i) != r) {
            return None;
        }
        if s.len() < 2 {
            return Some((r, 0));
        }
        let lambda = self.concurrence(s[0], s[1]);
        for (a, &i) in s.iter().enumerate() {
            for &j in &s[a + 1..] {
                if self.concurrence(i, j) != lambda {
                    return None;
                }
            }
        }
        Some((r, lambda))
    }

    /// Adds `symbol` to every block.
    pub fn augment(&self, symbol: Label) -> Result<BlockDesign> {
        if self.symbols.contains(&symbol) {
            return Err(Error::InvalidBlockDesign(format!("symbol {symbol} already present")));
        }
        let mut symbols = self.symbols.clone();
        symbols.push(symbol);
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let mut b = b.clone();
                b.push(symbol);
                b
            })
            .collect();
        BlockDesign::new(symbols, blocks)
    }

    /// Maps the symbols (sorted) onto `targets` (sorted) by rank.
    pub fn relabel(&self, targets: &[Label]) -> Result<BlockDesign> {
        if targets.len() != self.symbols.len() {
            return Err(Error::DimensionMismatch { expected: self.symbols.len(), found: targets.len() });
        }
        let mut t = targets.to_vec();
        t.sort_unstable();
        let map = |s: &Label| t[self.symbols.binary_search(s).expect("symbol")];
        BlockDesign::new(t.clone(), self.blocks.iter().map(|b| b.iter().map(map).collect()).collect())
    }
}

/// All `k`-subsets of `set` (taken in sorted order), lexicographically.
pub fn k_subsets(set: &[Label], k: usize) -> Vec<Vec<Label>> {
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    let mut out = Vec::new();
    if k > s.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| s[i]).collect());
        let Some(i) = (0..k).rev().find(|&i| idx[i] < s.len() - k + i) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `λ_ih − λ_jh = (r_i − r_j)/2` for every ordered triple of distinct symbols.
pub fn verify_block_condition(d: &BlockDesign) -> bool {
    let s = d.symbols();
    let r: Vec<i64> = s.iter().map(|&i| d.replication(i) as i64).collect();
    let n = s.len();
    let mut lam = vec![0i64; n * n];
    for (a, &i) in s.iter().enumerate() {
        for (b, &j) in s.iter().enumerate() {
            if a != b {
                lam[a * n + b] = d.concurrence(i, j) as i64;
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for h in 0..n {
                if h != i && h != j && 2 * (lam[i * n + h] - lam[j * n + h]) != r[i] - r[j] {
                    return false;
                }
            }
        }
    }
    true
}

/// A ±1 Hadamard matrix of the given order (Sylvester for 1, 2, 4, 8, 16,
/// 32; Paley I for 12, 20, 24; Paley II for 28).
pub fn hadamard(order: usize) -> Result<Vec<Vec<i8>>> {
    match order {
        1 | 2 | 4 | 8 | 16 | 32 => Ok(sylvester(order)),
        12 | 20 | 24 => Ok(paley1(order - 1)),
        28 => Ok(paley2(13)),
        _ => Err(Error::Unsupported(format!("no built-in Hadamard matrix of order {order}"))),
    }
}

fn sylvester(order: usize) -> Vec<Vec<i8>> {
    let mut h = vec![vec![1i8]];
    while h.len() < order {
        let n = h.len();
        let mut next = vec![vec![0i8; 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                next[i][j] = h[i][j];
                next[i][j + n] = h[i][j];
                next[i + n][j] = h[i][j];
                next[i + n][j + n] = -h[i][j];
            }
        }
        h = next;
    }
    h
}

/// Legendre symbol of `a` modulo the odd prime `q`.
fn chi(a: usize, q: usize) -> i8 {
    let a = a % q;
    if a == 0 {
        return 0;
    }
    if (1..q).any(|x| x * x % q == a) {
        1
    } else {
        -1
    }
}

/// Jacobsthal matrix `Q[i][j] = χ(j − i)`.
fn jacobsthal(q: usize) -> Vec<Vec<i8>> {
    (0..q).map(|i| (0..q).map(|j| chi(j + q - i, q)).collect()).collect()
}

/// Order `q + 1`, `q ≡ 3 (mod 4)` prime.
fn paley1(q: usize) -> Vec<Vec<i8>> {
    let jm = jacobsthal(q);
    let n = q + 1;
    let mut h = vec![vec![0i8; n]; n];
    // H = I + S with S = [[0, 1ᵀ], [-1, Q]].
    for j in 1..n {
        h[0][j] = 1;
        h[j][0] = -1;
    }
    for i in 0..q {
        for j in 0..q {
            h[i + 1][j + 1] = jm[i][j];
        }
    }
    for (i, row) in h.iter_mut().enumerate() {
        row[i] += 1;
    }
    h
}

/// Order `2(q + 1)`, `q ≡ 1 (mod 4)` prime.
fn paley2(q: usize) -> Vec<Vec<i8>> {
    let jm = jacobsthal(q);
    let n = q + 1;
    // S = [[0, 1ᵀ], [1, Q]], symmetric; replace 0 by [[1,-1],[-1,-1]] and
    // ±1 by ±[[1,1],[1,-1]].
    let mut s = vec![vec![0i8; n]; n];
    for j in 1..n {
        s[0][j] = 1;
        s[j][0] = 1;
    }
    for i in 0..q {
        for j in 0..q {
            s[i + 1][j + 1] = jm[i][j];
        }
    }
    let mut h = vec![vec![0i8; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let blk: [[i8; 2]; 2] = match s[i][j] {
                0 => [[1, -1], [-1, -1]],
                v => [[v, v], [v, -v]],
            };
            for a in 0..2 {
                for b in 0..2 {
                    h[2 * i + a][2 * j + b] = blk[a][b];
                }
            }
        }
    }
    h
}

/// Checks `H Hᵀ = n I`.
pub fn is_hadamard(h: &[Vec<i8>]) -> bool {
    let n = h.len();
    h.iter().all(|r| r.len() == n && r.iter().all(|&v| v == 1 || v == -1))
        && (0..n).all(|i| {
            (0..n).all(|j| {
                let dot: i64 = (0..n).map(|k| h[i][k] as i64 * h[j][k] as i64).sum();
                dot == if i == j { n as i64 } else { 0 }
            })
        })
}

/// The `(4t−1, 2t−1, t−1)` design from a normalized Hadamard matrix of
/// order `4t`, on symbols `1..=4t−1`.
pub fn hadamard_bibd(t: usize) -> Result<BlockDesign> {
    if t == 0 {
        return Err(Error::InvalidArgument("t must be positive".into()));
    }
    let mut h = hadamard(4 * t)?;
    let n = h.len();
    // Normalize: first column then first row all +1.
    for row in h.iter_mut() {
        if row[0] < 0 {
            row.iter_mut().for_each(|v| *v = -*v);
        }
    }
    for j in 0..n {
        if h[0][j] < 0 {
            for row in h.iter_mut() {
                row[j] = -row[j];
            }
        }
    }
    let symbols: Vec<Label> = (1..n as Label).collect();
    let blocks = (1..n)
        .map(|i| (1..n).filter(|&j| h[i][j] > 0).map(|j| j as Label).collect())
        .collect();
    BlockDesign::new(symbols, blocks)
}

/// `{min G} ∪ T` for every `(s−1)`-subset `T` of `G \ {min G}`, `|G| = 2s`.
pub fn even_subset_design(group: &[Label]) -> Result<BlockDesign> {
    let mut g = group.to_vec();
    g.sort_unstable();
    g.dedup();
    if g.len() % 2 != 0 || g.len() < 4 {
        return Err(Error::InvalidArgument(format!("even-subset design needs an even group of size >= 4, got {}", g.len())));
    }
    let s = g.len() / 2;
    let min = g[0];
    let blocks = k_subsets(&g[1..], s - 1)
        .into_iter()
        .map(|mut t| {
            t.insert(0, min);
            t
        })
        .collect();
    BlockDesign::new(g, blocks)
}

/// The cyclic `(9, 18, 8, 4, 3)` BIBD developed from base blocks
/// `{0,1,2,4}` and `{0,1,4,6}` mod 9, on symbols `1..=9`.
pub fn cyclic_bibd_9() -> BlockDesign {
    let mut blocks = Vec::with_capacity(18);
    for base in [[0usize, 1, 2, 4], [0, 1, 4, 6]] {
        for shift in 0..9 {
            blocks.push(base.iter().map(|&x| ((x + shift) % 9 + 1) as Label).collect());
        }
    }
    BlockDesign::new((1..=9).collect(), blocks).expect("valid cyclic design")
}

/// Orders of a label set `S`, each row a permutation of `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentDesign {
    labels: Vec<Label>,
    rows: Vec<Vec<Label>>,
    certified: bool,
}

impl ComponentDesign {
    /// Validates the rows and certifies moment equivalence exactly.
    pub fn new(labels: Vec<Label>, rows: Vec<Vec<Label>>) -> Result<Self> {
        let mut labels = labels;
        labels.sort_unstable();
        labels.dedup();
        for r in &rows {
            let mut s = r.clone();
            s.sort_unstable();
            if s != labels {
                return Err(Error::InvalidOrder(format!("row {r:?} is not an order of the label set")));
            }
        }
        let certified = !rows.is_empty() && moment_error(&labels, &rows) == 0;
        Ok(ComponentDesign { labels, rows, certified })
    }

    /// All `|S|!` orders, lexicographically.
    pub fn full(labels: &[Label]) -> Self {
        let mut l = labels.to_vec();
        l.sort_unstable();
        l.dedup();
        let rows = linear_extensions(&l, &[]);
        ComponentDesign { labels: l, rows, certified: true }
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn rows(&self) -> &[Vec<Label>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// True when the exact moment-equivalence check passed.
    pub fn is_certified(&self) -> bool {
        self.certified
    }

    /// The rows repeated `times` times.
    pub fn replicate(&self, times: usize) -> ComponentDesign {
        let mut rows = Vec::with_capacity(self.rows.len() * times);
        for _ in 0..times {
            rows.extend(self.rows.iter().cloned());
        }
        ComponentDesign { labels: self.labels.clone(), rows, certified: self.certified && times > 0 }
    }

    /// Maps labels onto `targets` by rank.
    pub fn relabel(&self, targets: &[Label]) -> Result<ComponentDesign> {
        if targets.len() != self.labels.len() {
            return Err(Error::DimensionMismatch { expected: self.labels.len(), found: targets.len() });
        }
        let mut t = targets.to_vec();
        t.sort_unstable();
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|l| t[self.labels.binary_search(l).expect("label")]).collect())
            .collect();
        Ok(ComponentDesign { labels: t, rows, certified: self.certified })
    }
}

/// Exact check that the rows have the full design's moment matrix.
pub fn is_moment_equivalent(cd: &ComponentDesign) -> bool {
    !cd.rows.is_empty() && moment_error(&cd.labels, &cd.rows) == 0
}

/// Local pair index list and target for the balance equations.
struct Balance {
    pairs: Vec<(usize, usize)>,
    /// `3 ×` the full-design moment entry for each tracked cell.
    cells: Vec<(usize, usize, i64)>,
}

impl Balance {
    fn new(k: usize) -> Self {
        let mut pairs = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                pairs.push((i, j));
            }
        }
        // Column 0 is the intercept; columns 1.. are pairs. Track the upper
        // triangle off the diagonal (diagonals are identically n).
        let mut cells = Vec::new();
        for b in 0..pairs.len() {
            cells.push((0, b + 1, 0));
        }
        for a in 0..pairs.len() {
            for b in a + 1..pairs.len() {
                let (s, t) = (pairs[a], pairs[b]);
                let shared = [s.0, s.1].into_iter().find(|h| *h == t.0 || *h == t.1);
                let v = match shared {
                    Some(h) => {
                        let sig = |p: (usize, usize)| if p.0 == h { 1 } else { -1 };
                        sig(s) * sig(t)
                    }
                    None => 0,
                };
                cells.push((a + 1, b + 1, v));
            }
        }
        Balance { pairs, cells }
    }

    fn codes(&self, pos: &[usize]) -> Vec<i64> {
        let mut x = Vec::with_capacity(self.pairs.len() + 1);
        x.push(1);
        for &(i, j) in &self.pairs {
            x.push(if pos[i] < pos[j] { 1 } else { -1 });
        }
        x
    }

    /// Per-cell errors `3 S − n T3` for rows given as code vectors.
    fn errors(&self, codes: &[&Vec<i64>]) -> Vec<i64> {
        let n = codes.len() as i64;
        self.cells
            .iter()
            .map(|&(a, b, t)| 3 * codes.iter().map(|x| x[a] * x[b]).sum::<i64>() - n * t)
            .collect()
    }
}

fn local_positions(labels: &[Label], row: &[Label]) -> Vec<usize> {
    let mut pos = vec![0; labels.len()];
    for (p, l) in row.iter().enumerate() {
        pos[labels.binary_search(l).expect("label")] = p;
    }
    pos
}

fn moment_error(labels: &[Label], rows: &[Vec<Label>]) -> i64 {
    let bal = Balance::new(labels.len());
    let codes: Vec<Vec<i64>> = rows.iter().map(|r| bal.codes(&local_positions(labels, r))).collect();
    let refs: Vec<&Vec<i64>> = codes.iter().collect();
    bal.errors(&refs).iter().map(|e| e * e).sum()
}

/// Search settings for [`find_component_design`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub seed: u64,
    /// Budget shared by the orbit enumeration and the annealing proposals.
    pub max_proposals: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { seed: 1, max_proposals: 1_000_000 }
    }
}

/// Label-set size up to which searching is attempted.
pub const MAX_SEARCH_COMPONENTS: usize = 6;

/// A certified `n`-row design on `labels`.
///
/// Replicated full designs are used whenever `|S|!` divides `n`. Otherwise
/// the search first tries unions of orbits under the cyclic label shift,
/// then annealing over single-row swaps among distinct rows.
pub fn find_component_design(labels: &[Label], n: usize, cfg: SearchConfig) -> Result<ComponentDesign> {
    let mut l = labels.to_vec();
    l.sort_unstable();
    l.dedup();
    let k = l.len();
    if n == 0 {
        return Err(Error::InvalidArgument("a component design needs at least one row".into()));
    }
    let full = factorial(k) as usize;
    if n % full == 0 {
        return Ok(ComponentDesign::full(&l).replicate(n / full));
    }
    if k >= 3 && n % 6 != 0 || k == 2 && n % 2 != 0 {
        return Err(Error::SearchExhausted(format!(
            "no {n}-row design on {k} components can match the full moment matrix"
        )));
    }
    if k > MAX_SEARCH_COMPONENTS || n > full {
        return Err(Error::SearchExhausted(format!("searching {n} rows on {k} components is not supported")));
    }
    let canon: Vec<Label> = (1..=k as Label).collect();
    let mut budget = cfg.max_proposals;
    let found = orbit_search(k, n, &mut budget).or_else(|| anneal(k, n, cfg.seed, &mut budget));
    match found {
        Some(rows) => {
            let cd = ComponentDesign::new(canon, rows)?;
            debug_assert!(cd.is_certified());
            if !cd.is_certified() {
                return Err(Error::SearchExhausted("search result failed certification".into()));
            }
            cd.relabel(&l)
        }
        None => Err(Error::SearchExhausted(format!("no {n}-row design on {k} components within budget"))),
    }
}

fn all_orders(k: usize) -> Vec<Vec<Label>> {
    let canon: Vec<Label> = (1..=k as Label).collect();
    linear_extensions(&canon, &[])
}

/// Unions of orbits of `σ ↦ (σ + 1 mod k)` summing to `n` rows, tried in
/// lexicographic order of orbit indices.
fn orbit_search(k: usize, n: usize, budget: &mut u64) -> Option<Vec<Vec<Label>>> {
    let bal = Balance::new(k);
    let orders = all_orders(k);
    let mut seen = BTreeSet::new();
    let mut orbits: Vec<(Vec<Vec<Label>>, Vec<i64>)> = Vec::new();
    for o in &orders {
        if seen.contains(o) {
            continue;
        }
        let mut orb = Vec::new();
        let mut cur = o.clone();
        while seen.insert(cur.clone()) {
            orb.push(cur.clone());
            cur = cur.iter().map(|&x| x % k as Label + 1).collect();
        }
        let codes: Vec<Vec<i64>> = orb.iter().map(|r| bal.codes(&local_positions(&canon_of(k), r))).collect();
        let refs: Vec<&Vec<i64>> = codes.iter().collect();
        let sums: Vec<i64> = bal
            .cells
            .iter()
            .map(|&(a, b, _)| 3 * refs.iter().map(|x| x[a] * x[b]).sum::<i64>())
            .collect();
        orbits.push((orb, sums));
    }
    let target: Vec<i64> = bal.cells.iter().map(|&(_, _, t)| n as i64 * t).collect();
    let mut chosen = Vec::new();
    let mut acc = vec![0i64; target.len()];
    fn rec(
        orbits: &[(Vec<Vec<Label>>, Vec<i64>)],
        start: usize,
        left: usize,
        acc: &mut Vec<i64>,
        target: &[i64],
        chosen: &mut Vec<usize>,
        budget: &mut u64,
    ) -> bool {
        if left == 0 {
            *budget = budget.saturating_sub(1);
            return acc == target;
        }
        for i in start..orbits.len() {
            if *budget == 0 {
                return false;
            }
            let (orb, sums) = &orbits[i];
            if orb.len() > left {
                continue;
            }
            for (a, s) in acc.iter_mut().zip(sums) {
                *a += s;
            }
            chosen.push(i);
            if rec(orbits, i + 1, left - orb.len(), acc, target, chosen, budget) {
                return true;
            }
            chosen.pop();
            for (a, s) in acc.iter_mut().zip(sums) {
                *a -= s;
            }
        }
        false
    }
    if rec(&orbits, 0, n, &mut acc, &target, &mut chosen, budget) {
        let mut rows: Vec<Vec<Label>> = chosen.iter().flat_map(|&i| orbits[i].0.iter().cloned()).collect();
        rows.sort();
        Some(rows)
    } else {
        None
    }
}

fn canon_of(k: usize) -> Vec<Label> {
    (1..=k as Label).collect()
}

/// Simulated annealing on the squared balance error, replacing one row at
/// a time by an order not currently in the design.
fn anneal(k: usize, n: usize, seed: u64, budget: &mut u64) -> Option<Vec<Vec<Label>>> {
    const START_TEMP: f64 = 50.0;
    const COOLING: f64 = 0.99999;
    const REHEAT_EVERY: u64 = 200_000;

    let bal = Balance::new(k);
    let canon = canon_of(k);
    let orders = all_orders(k);
    let codes: Vec<Vec<i64>> = orders.iter().map(|r| bal.codes(&local_positions(&canon, r))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_design = vec![false; orders.len()];
    let mut cur = Vec::with_capacity(n);
    while cur.len() < n {
        let c = rng.random_range(0..orders.len());
        if !in_design[c] {
            in_design[c] = true;
            cur.push(c);
        }
    }
    let refs: Vec<&Vec<i64>> = cur.iter().map(|&i| &codes[i]).collect();
    let mut err = bal.errors(&refs);
    let mut cost: i64 = err.iter().map(|e| e * e).sum();
    let mut temp = START_TEMP;
    let mut step = 0u64;
    let mut delta = vec![0i64; err.len()];
    while cost > 0 && *budget > 0 {
        *budget -= 1;
        step += 1;
        let slot = rng.random_range(0..n);
        let cand = rng.random_range(0..orders.len());
        if in_design[cand] {
            continue;
        }
        let (xo, xn) = (&codes[cur[slot]], &codes[cand]);
        let mut d = 0i64;
        for (c, &(a, b, _)) in bal.cells.iter().enumerate() {
            let de = 3 * (xn[a] * xn[b] - xo[a] * xo[b]);
            delta[c] = de;
            let e = err[c];
            d += (e + de) * (e + de) - e * e;
        }
        if d <= 0 || rng.random::<f64>() < libm::exp(-(d as f64) / temp) {
            for (e, de) in err.iter_mut().zip(&delta) {
                *e += de;
            }
            in_design[cur[slot]] = false;
            in_design[cand] = true;
            cur[slot] = cand;
            cost += d;
        }
        temp = (temp * COOLING).max(1.0);
        if step % REHEAT_EVERY == 0 {
            temp = START_TEMP;
        }
    }
    if cost == 0 {
        let mut rows: Vec<Vec<Label>> = cur.iter().map(|&i| orders[i].clone()).collect();
        rows.sort();
        Some(rows)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets() {
        assert_eq!(k_subsets(&[1, 2, 3], 2), vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(k_subsets(&[4, 9], 0), vec![Vec::<Label>::new()]);
        let o: Vec<Vec<Label>> = k_subsets(&[2, 3, 4, 5, 6], 2)
            .into_iter()
            .map(|mut t| {
                t.insert(0, 1);
                t
            })
            .collect();
        assert_eq!(o.len(), 10);
        assert_eq!(o[0], vec![1, 2, 3]);
        assert_eq!(o[1], vec![1, 2, 4]);
        assert_eq!(o[9], vec![1, 5, 6]);
    }

    #[test]
    fn fano_and_augmented() {
        let fano = hadamard_bibd(2).unwrap();
        assert_eq!((fano.v(), fano.b(), fano.k()), (7, 7, 3));
        assert_eq!(fano.bibd_parameters(), Some((3, 1)));
        assert!(verify_block_condition(&fano));
        let shifted = fano.relabel(&[2, 3, 4, 5, 6, 7, 8]).unwrap();
        let aug = shifted.augment(1).unwrap();
        assert_eq!(aug.k(), 4);
        assert!(verify_block_condition(&aug));
        let bad = BlockDesign::new(vec![1, 2, 3], vec![vec![1, 2], vec![1, 3]]).unwrap();
        assert!(!verify_block_condition(&bad));
    }

    #[test]
    fn hadamard_family() {
        for order in [1, 2, 4, 8, 12, 16, 20, 24, 28, 32] {
            assert!(is_hadamard(&hadamard(order).unwrap()), "order {order}");
        }
        assert!(hadamard(36).is_err());
        let t1 = hadamard_bibd(1).unwrap();
        assert_eq!((t1.v(), t1.b(), t1.k(), t1.bibd_parameters()), (3, 3, 1, Some((1, 0))));
        let t3 = hadamard_bibd(3).unwrap();
        assert_eq!((t3.v(), t3.b(), t3.k(), t3.bibd_parameters()), (11, 11, 5, Some((5, 2))));
    }

    #[test]
    fn even_subsets() {
        let d = even_subset_design(&[1, 2, 3, 4]).unwrap();
        assert_eq!(d.blocks(), &[vec![1, 2], vec![1, 3], vec![1, 4]]);
        let d6 = even_subset_design(&[1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!((d6.b(), d6.k()), (10, 3));
        assert!(verify_block_condition(&d6));
        assert!(even_subset_design(&[1, 2, 3]).is_err());
    }

    #[test]
    fn cyclic_nine() {
        let d = cyclic_bibd_9();
        assert_eq!((d.v(), d.b(), d.k()), (9, 18, 4));
        assert_eq!(d.bibd_parameters(), Some((8, 3)));
        assert!(verify_block_condition(&d));
    }

    #[test]
    fn moment_equivalence_examples() {
        let full = ComponentDesign::full(&[1, 2, 3]);
        assert!(is_moment_equivalent(&full));
        assert!(is_moment_equivalent(&full.replicate(2)));
        let mut rows = full.rows().to_vec();
        rows[5] = rows[0].clone();
        assert!(!is_moment_equivalent(&ComponentDesign::new(vec![1, 2, 3], rows).unwrap()));
    }

    #[test]
    fn searched_designs() {
        let cfg = SearchConfig::default();
        assert_eq!(find_component_design(&[1, 2, 3], 6, cfg).unwrap(), ComponentDesign::full(&[1, 2, 3]));
        assert_eq!(find_component_design(&[1, 2, 3], 12, cfg).unwrap().len(), 12);
        let d4 = find_component_design(&[5, 6, 7, 8], 12, cfg).unwrap();
        assert_eq!(d4.labels(), &[5, 6, 7, 8]);
        assert!(d4.is_certified() && is_moment_equivalent(&d4) && d4.len() == 12);
        assert!(find_component_design(&[1, 2, 3, 4], 8, cfg).is_err());
    }
}
