//! Exact binary rank by branch and bound, plus an independent brute-force
//! oracle for cross-checking.
//!
//! The search first removes zero and duplicate rows and columns (neither
//! changes the binary rank), then processes rows one at a time. The ones of
//! the current row are covered left to right: the lowest uncovered column is
//! taken either by an existing class whose column set fits into the
//! uncovered part of the row, or by a new class whose column set is any
//! subset of that part containing the column. Classes are numbered in
//! opening order, so each partition is reached once per row decomposition.
//! A new class may not repeat the column set of an existing one: the two
//! could be merged into a single rectangle.
//!
//! Every row is a 0/1 sum of class column vectors, so over any field the
//! unprocessed rows lie in the span of the current and future classes. With
//! `C` open classes this gives the bound
//! `C + rank(classes + unprocessed rows) - rank(classes)`, evaluated modulo a
//! large prime.

use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::{verify_partition, Partition, Rectangle};
use crate::error::{Error, Result};
use crate::matrix::Matrix01;
use crate::rank::Rational;

/// Order in which rows and columns are visited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellOrder {
    /// Input order.
    Fixed,
    /// Rows by descending degree, then columns by descending degree; ties by
    /// index.
    #[default]
    Greedy,
}

#[derive(Debug, Clone, Default)]
pub struct SearchConfig {
    /// Do not search for partitions larger than this.
    pub max_rects: Option<usize>,
    /// Wall-clock budget; on expiry the current bracket is returned.
    pub time_budget: Option<Duration>,
    pub cell_order: CellOrder,
    /// Worker threads; 0 uses the global rayon pool, 1 searches sequentially.
    pub threads: usize,
    /// A known partition of the input, used as the initial upper bound.
    pub seed_partition: Option<Partition>,
}

impl SearchConfig {
    pub fn with_budget(budget: Duration) -> Self {
        SearchConfig {
            time_budget: Some(budget),
            ..Default::default()
        }
    }
}

/// Result of [`binary_rank_exact`]. `exact` is set iff `lower == upper`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryRankOutcome {
    pub exact: Option<usize>,
    pub lower: usize,
    pub upper: usize,
    /// A partition of size `upper`.
    pub witness: Partition,
    #[serde(default)]
    pub nodes: u64,
    #[serde(default)]
    pub timed_out: bool,
}

/// One-cells no two of which lie in a common all-ones rectangle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsolationSet {
    pub cells: Vec<(usize, usize)>,
}

impl IsolationSet {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Checks the pairwise condition against `m`.
    pub fn is_valid_for(&self, m: &Matrix01) -> bool {
        self.cells.iter().all(|&(a, b)| m.get(a, b))
            && self.cells.iter().enumerate().all(|(x, &(a, b))| {
                self.cells[..x]
                    .iter()
                    .all(|&(c, d)| isolated(m, (a, b), (c, d)))
            })
    }
}

/// Two one-cells share an all-ones rectangle iff the two crossing cells are
/// ones too (this covers cells in a common row or column).
fn isolated(m: &Matrix01, (a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
    !(m.get(a, d) && m.get(c, b))
}

fn grow_isolation(
    m: &Matrix01,
    order: impl Iterator<Item = (usize, usize)>,
) -> Vec<(usize, usize)> {
    let mut cells: Vec<(usize, usize)> = Vec::new();
    for cell in order {
        if m.get(cell.0, cell.1) && cells.iter().all(|&other| isolated(m, cell, other)) {
            cells.push(cell);
        }
    }
    cells
}

/// Largest of several greedily grown isolation sets: diagonal cells first,
/// row-major order, and cells of low-degree rows and columns first.
pub fn isolation_set(m: &Matrix01) -> IsolationSet {
    let (nr, nc) = (m.n_rows(), m.n_cols());
    let ones = m.ones();
    let diag_first = (0..nr.min(nc))
        .map(|i| (i, i))
        .chain(ones.iter().copied().filter(|&(i, j)| i != j));
    let mut best = grow_isolation(m, diag_first);
    let row_major = grow_isolation(m, ones.iter().copied());
    if row_major.len() > best.len() {
        best = row_major;
    }
    let mut by_degree = ones.clone();
    by_degree.sort_by_key(|&(i, j)| (m.row_ones(i) + m.col_ones(j), i, j));
    let sparse_first = grow_isolation(m, by_degree.into_iter());
    if sparse_first.len() > best.len() {
        best = sparse_first;
    }
    IsolationSet { cells: best }
}

pub fn isolation_lower_bound(m: &Matrix01) -> usize {
    isolation_set(m).len()
}

/// Number of distinct nonzero rows: an upper bound on the binary rank.
pub fn distinct_nonzero_rows(m: &Matrix01) -> usize {
    (0..m.n_rows())
        .filter(|&i| m.row_ones(i) > 0)
        .map(|i| m.row_words(i))
        .collect::<HashSet<_>>()
        .len()
}

const P: u64 = (1 << 31) - 1;

fn inv_mod(a: u64) -> u64 {
    let (mut base, mut exp, mut acc) = (a % P, P - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % P;
        }
        base = base * base % P;
        exp >>= 1;
    }
    acc
}

/// Echelon basis over GF(P) of vectors of length `n`. Each vector has a
/// pivot entry 1 and is zero at the pivots of earlier vectors, so insertion
/// only appends and undo is truncation.
#[derive(Clone)]
struct Basis {
    n: usize,
    data: Vec<u64>,
    pivots: Vec<usize>,
}

impl Basis {
    fn new(n: usize) -> Self {
        Basis {
            n,
            data: Vec::new(),
            pivots: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.pivots.len()
    }

    fn truncate(&mut self, len: usize) {
        self.pivots.truncate(len);
        self.data.truncate(len * self.n);
    }

    fn reduce(&self, v: &mut [u64]) {
        for (k, &pc) in self.pivots.iter().enumerate() {
            let f = v[pc];
            if f != 0 {
                let b = &self.data[k * self.n..(k + 1) * self.n];
                let g = P - f;
                for j in pc..self.n {
                    if b[j] != 0 {
                        v[j] = (v[j] + g * b[j]) % P;
                    }
                }
            }
        }
    }

    fn expand(&self, bits: u64) -> [u64; 64] {
        let mut v = [0u64; 64];
        let mut x = bits;
        while x != 0 {
            v[x.trailing_zeros() as usize] = 1;
            x &= x - 1;
        }
        v
    }

    fn contains(&self, bits: u64) -> bool {
        let mut v = self.expand(bits);
        self.reduce(&mut v[..self.n]);
        v[..self.n].iter().all(|&x| x == 0)
    }

    fn insert(&mut self, bits: u64) -> bool {
        let mut v = self.expand(bits);
        let v = &mut v[..self.n];
        self.reduce(v);
        let Some(pc) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = inv_mod(v[pc]);
        for x in v.iter_mut() {
            *x = *x * inv % P;
        }
        self.data.extend_from_slice(v);
        self.pivots.push(pc);
        true
    }
}

/// The reduced, reordered matrix the search runs on.
struct Problem {
    rows: Vec<u64>,
    n_cols: usize,
    /// `suffix[p]` spans rows `p + 1..`.
    suffix: Vec<Basis>,
    row_map: Vec<Vec<usize>>,
    col_map: Vec<Vec<usize>>,
    rank: usize,
    /// Basis of `{w : w^T M = 0}` over rows.
    left_kernel: Vec<Vec<u64>>,
    /// The same space over the rationals, scaled to integer vectors; absent
    /// if an entry does not fit.
    int_kernel: Option<Vec<Vec<i64>>>,
}

/// Integer basis of `{x : a x = 0}` over the rationals.
fn integer_null_space(a: &[Vec<u64>], n: usize) -> Option<Vec<Vec<i64>>> {
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::{ToPrimitive, Zero};

    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| Rational::from_integer(BigInt::from(x)))
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let lead = m[rank][col].clone();
        for x in m[rank].iter_mut() {
            *x = &*x / &lead;
        }
        let prow = m[rank].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != rank && !row[col].is_zero() {
                let f = row[col].clone();
                for j in 0..n {
                    row[j] = &row[j] - &f * &prow[j];
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rational::zero(); n];
            v[free] = Rational::from_integer(BigInt::from(1));
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][free].clone();
            }
            let den = v.iter().fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
            let ints: Vec<BigInt> = v.iter().map(|x| (x * &den).to_integer()).collect();
            let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            ints.iter()
                .map(|x| (x / &g).to_i64())
                .collect::<Option<Vec<i64>>>()
        })
        .collect()
}

/// Rank of a dense matrix over GF(P); destroys the input.
fn rank_mod(a: &mut [Vec<u64>]) -> usize {
    let n_cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..n_cols {
        let Some(p) = (rank..a.len()).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(rank, p);
        let inv = inv_mod(a[rank][col]);
        for x in a[rank].iter_mut() {
            *x = *x * inv % P;
        }
        let (top, rest) = a.split_at_mut(rank + 1);
        let prow = &top[rank];
        for row in rest.iter_mut() {
            let f = row[col];
            if f != 0 {
                for j in col..n_cols {
                    row[j] = (row[j] + (P - f) * prow[j]) % P;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Basis of the null space `{x : a x = 0}` over GF(P).
fn null_space(a: &[Vec<u64>], n: usize) -> Vec<Vec<u64>> {
    let mut m: Vec<Vec<u64>> = a.to_vec();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(rank, p);
        let inv = inv_mod(m[rank][col]);
        for x in m[rank].iter_mut() {
            *x = *x * inv % P;
        }
        let prow = m[rank].clone();
        for (i, row) in m.iter_mut().enumerate() {
            let f = row[col];
            if i != rank && f != 0 {
                for j in 0..n {
                    row[j] = (row[j] + (P - f) * prow[j]) % P;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![0u64; n];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = (P - m[r][free]) % P;
            }
            v
        })
        .collect()
}

/// Whether the kernel sums over the decided rows of `rows` (those before
/// `pos`) can be cancelled by adding some subset of the `free` rows.
/// Gives up (returns true) when the reachable set grows too large.
fn zero_subset_sum(kernel: &[Vec<i64>], rows: u64, pos: usize, free: &[usize]) -> bool {
    const CAP: usize = 1 << 12;
    let start: Vec<i64> = kernel
        .iter()
        .map(|w| (0..pos).filter(|&r| rows >> r & 1 == 1).map(|r| w[r]).sum())
        .collect();
    let mut reach: HashSet<Vec<i64>> = HashSet::from([start]);
    for &r in free {
        let step: Vec<Vec<i64>> = reach
            .iter()
            .map(|s| s.iter().zip(kernel).map(|(x, w)| x + w[r]).collect())
            .collect();
        reach.extend(step);
        if reach.len() > CAP {
            return true;
        }
    }
    reach.iter().any(|s| s.iter().all(|&x| x == 0))
}

/// Groups identical nonzero lines; returns representatives and members.
fn distinct_lines(m: &Matrix01) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
    for i in 0..m.n_rows() {
        if m.row_ones(i) == 0 {
            continue;
        }
        let key = m.row_words(i).to_vec();
        match seen.get(&key) {
            Some(&g) => groups[g].push(i),
            None => {
                seen.insert(key, groups.len());
                groups.push(vec![i]);
            }
        }
    }
    groups
}

impl Problem {
    fn new(m: &Matrix01, order: CellOrder) -> Result<Self> {
        let mut row_map = distinct_lines(m);
        let mut col_map = distinct_lines(m.transpose());
        if row_map.len() > 64 || col_map.len() > 64 {
            return Err(Error::TooLarge(format!(
                "search handles at most 64 distinct rows and columns, got {} and {}",
                row_map.len(),
                col_map.len()
            )));
        }
        if order == CellOrder::Greedy {
            let deg_r = |g: &Vec<usize>| m.row_ones(g[0]);
            let deg_c = |g: &Vec<usize>| m.col_ones(g[0]);
            row_map.sort_by(|a, b| deg_r(b).cmp(&deg_r(a)).then(a[0].cmp(&b[0])));
            col_map.sort_by(|a, b| deg_c(b).cmp(&deg_c(a)).then(a[0].cmp(&b[0])));
        }
        let n_cols = col_map.len();
        let rows: Vec<u64> = row_map
            .iter()
            .map(|g| {
                col_map
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| m.get(g[0], c[0]))
                    .fold(0u64, |acc, (j, _)| acc | 1 << j)
            })
            .collect();
        let mut suffix = vec![Basis::new(n_cols); rows.len()];
        let mut acc = Basis::new(n_cols);
        for p in (0..rows.len()).rev() {
            suffix[p] = acc.clone();
            acc.insert(rows[p]);
        }
        let rank = suffix.first().map_or(0, |b| {
            let mut b = b.clone();
            b.insert(rows[0]);
            b.len()
        });
        let transposed: Vec<Vec<u64>> = (0..n_cols)
            .map(|j| rows.iter().map(|&r| r >> j & 1).collect())
            .collect();
        let left_kernel = null_space(&transposed, rows.len());
        let int_kernel = integer_null_space(&transposed, rows.len());
        Ok(Problem {
            rows,
            n_cols,
            suffix,
            row_map,
            col_map,
            rank,
            left_kernel,
            int_kernel,
        })
    }

    /// With `rank` classes the class row vectors span exactly the column
    /// space, so each must be orthogonal to the left kernel. Rows before
    /// `pos` are decided; later rows that could still join the class are
    /// free. Checks that some completion passes.
    fn row_set_completable(&self, rows: u64, cols: u64, pos: usize) -> bool {
        if self.left_kernel.is_empty() {
            return true;
        }
        let free: Vec<usize> = (pos..self.rows.len())
            .filter(|&r| cols & !self.rows[r] == 0)
            .collect();
        let fixed: Vec<u64> = self
            .left_kernel
            .iter()
            .map(|w| {
                (0..pos)
                    .filter(|&r| rows >> r & 1 == 1)
                    .fold(0, |acc, r| (acc + w[r]) % P)
            })
            .collect();
        if fixed.iter().all(|&x| x == 0) {
            return true;
        }
        let mut q: Vec<Vec<u64>> = self
            .left_kernel
            .iter()
            .map(|w| free.iter().map(|&r| w[r]).collect())
            .collect();
        let mut qv: Vec<Vec<u64>> = q
            .iter()
            .zip(&fixed)
            .map(|(row, &v)| {
                let mut row = row.clone();
                row.push(v);
                row
            })
            .collect();
        if rank_mod(&mut q) != rank_mod(&mut qv) {
            return false;
        }
        self.int_kernel
            .as_ref()
            .is_none_or(|w| zero_subset_sum(w, rows, pos, &free))
    }

    fn expand(&self, target: &Matrix01, classes: &[(u64, u64)]) -> Partition {
        let lift = |mask: u64, map: &[Vec<usize>]| -> Vec<usize> {
            (0..map.len())
                .filter(|&x| mask >> x & 1 == 1)
                .flat_map(|x| map[x].iter().copied())
                .collect()
        };
        let rects = classes
            .iter()
            .map(|&(r, c)| Rectangle::new(lift(r, &self.row_map), lift(c, &self.col_map)))
            .collect();
        Partition::new(target.clone(), rects)
    }

    /// One rectangle per distinct nonzero row, or per distinct nonzero column.
    fn line_partition(&self, by_rows: bool) -> Vec<(u64, u64)> {
        if by_rows {
            self.rows
                .iter()
                .enumerate()
                .map(|(i, &r)| (1 << i, r))
                .collect()
        } else {
            (0..self.n_cols)
                .map(|j| {
                    let rows = self
                        .rows
                        .iter()
                        .enumerate()
                        .filter(|(_, &r)| r >> j & 1 == 1)
                        .fold(0u64, |acc, (i, _)| acc | 1 << i);
                    (rows, 1u64 << j)
                })
                .collect()
        }
    }
}

enum Mode<'a> {
    Plain,
    /// Record every surviving node at this branching depth instead of
    /// expanding it.
    Collect(usize),
    /// Follow the given choice indices, then search normally.
    Replay(&'a [u32]),
}

/// Bases for the rank bound at one row: spans of the class column sets
/// (all of them, and those some remaining row can take), each alone and
/// together with the rows after this one.
#[derive(Clone)]
struct Level {
    all: Basis,
    all_rows: Basis,
    live: Basis,
    live_rows: Basis,
}

impl Level {
    fn lens(&self) -> [usize; 4] {
        [
            self.all.len(),
            self.all_rows.len(),
            self.live.len(),
            self.live_rows.len(),
        ]
    }

    fn truncate(&mut self, lens: [usize; 4]) {
        self.all.truncate(lens[0]);
        self.all_rows.truncate(lens[1]);
        self.live.truncate(lens[2]);
        self.live_rows.truncate(lens[3]);
    }
}

struct Searcher<'a> {
    prob: &'a Problem,
    target: usize,
    classes: Vec<(u64, u64)>,
    levels: Vec<Level>,
    path: Vec<u32>,
    mode: Mode<'a>,
    frontier: Vec<Vec<u32>>,
    nodes: u64,
    deadline: Option<Instant>,
    stop: &'a AtomicBool,
}

impl<'a> Searcher<'a> {
    fn new(
        prob: &'a Problem,
        target: usize,
        mode: Mode<'a>,
        deadline: Option<Instant>,
        stop: &'a AtomicBool,
    ) -> Self {
        let empty = Basis::new(prob.n_cols);
        let level = Level {
            all: empty.clone(),
            all_rows: empty.clone(),
            live: empty.clone(),
            live_rows: empty,
        };
        Searcher {
            prob,
            target,
            classes: Vec::new(),
            levels: vec![level; prob.rows.len()],
            path: Vec::new(),
            mode,
            frontier: Vec::new(),
            nodes: 0,
            deadline,
            stop,
        }
    }

    fn run(&mut self) -> bool {
        if self.prob.rows.is_empty() {
            return true;
        }
        self.enter_row(0)
    }

    fn stopped(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes & 0x3ff == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.stop.store(true, Ordering::Relaxed);
                }
            }
        }
        self.stop.load(Ordering::Relaxed)
    }

    /// Whether a row at or after `pos` can still take class `c`.
    fn live(&self, c: usize, pos: usize) -> bool {
        let cols = self.classes[c].1;
        self.prob.rows[pos..].iter().any(|&r| cols & !r == 0)
    }

    /// Classes no later row can join are final. Two final classes with the
    /// same row set could be merged into one rectangle, so the branch holds
    /// no minimum partition.
    fn has_mergeable_dead_pair(&self, pos: usize) -> bool {
        let mut dead: Vec<u64> = (0..self.classes.len())
            .filter(|&c| !self.live(c, pos))
            .map(|c| self.classes[c].0)
            .collect();
        dead.sort_unstable();
        dead.windows(2).any(|w| w[0] == w[1])
    }

    fn enter_row(&mut self, pos: usize) -> bool {
        if self.has_mergeable_dead_pair(pos) {
            return false;
        }
        if self.target == self.prob.rank
            && !self
                .classes
                .iter()
                .all(|&(r, c)| self.prob.row_set_completable(r, c, pos))
        {
            return false;
        }
        let mut level = Level {
            all: Basis::new(self.prob.n_cols),
            all_rows: self.prob.suffix[pos].clone(),
            live: Basis::new(self.prob.n_cols),
            live_rows: self.prob.suffix[pos].clone(),
        };
        for c in 0..self.classes.len() {
            let cols = self.classes[c].1;
            level.all.insert(cols);
            level.all_rows.insert(cols);
            if self.live(c, pos) {
                level.live.insert(cols);
                level.live_rows.insert(cols);
            }
        }
        self.levels[pos] = level;
        self.cover(pos, self.prob.rows[pos])
    }

    /// Lower bound on the final class count: the uncovered part of this row
    /// and all later rows must lie in the span of the open classes plus one
    /// vector per future class.
    fn bound(&self, pos: usize, rem: u64) -> usize {
        let l = &self.levels[pos];
        let c = self.classes.len();
        let a = c + l.all_rows.len() + !l.all_rows.contains(rem) as usize - l.all.len();
        let b = c + l.live_rows.len() + !l.live_rows.contains(rem) as usize - l.live.len();
        a.max(b)
    }

    fn cover(&mut self, pos: usize, rem: u64) -> bool {
        if self.stopped() {
            return false;
        }
        if rem == 0 {
            if pos + 1 < self.prob.rows.len() {
                return self.enter_row(pos + 1);
            }
            if let Mode::Collect(_) = self.mode {
                self.frontier.push(self.path.clone());
                return false;
            }
            return true;
        }
        if self.bound(pos, rem) > self.target {
            return false;
        }
        let depth = self.path.len();
        let forced = match self.mode {
            Mode::Collect(limit) if depth == limit => {
                self.frontier.push(self.path.clone());
                return false;
            }
            Mode::Replay(prefix) if depth < prefix.len() => Some(prefix[depth]),
            _ => None,
        };
        let b = rem & rem.wrapping_neg();
        let mut idx = 0u32;

        for c in 0..self.classes.len() {
            let cols = self.classes[c].1;
            if cols & b == 0 || cols & !rem != 0 {
                continue;
            }
            if forced.is_none_or(|f| f == idx) {
                self.path.push(idx);
                self.classes[c].0 |= 1 << pos;
                let found = self.cover(pos, rem & !cols);
                self.path.pop();
                if found {
                    return true;
                }
                self.classes[c].0 &= !(1 << pos);
            }
            idx += 1;
        }

        if self.classes.len() < self.target {
            let rest = rem & !b;
            let mut s = rest;
            loop {
                let cols = s | b;
                if !self.classes.iter().any(|&(_, c)| c == cols) {
                    if forced.is_none_or(|f| f == idx) {
                        let l = &mut self.levels[pos];
                        let saved = l.lens();
                        l.all.insert(cols);
                        l.all_rows.insert(cols);
                        l.live.insert(cols);
                        l.live_rows.insert(cols);
                        self.classes.push((1 << pos, cols));
                        self.path.push(idx);
                        let found = self.cover(pos, rem & !cols);
                        self.path.pop();
                        if found {
                            return true;
                        }
                        self.classes.pop();
                        self.levels[pos].truncate(saved);
                    }
                    idx += 1;
                }
                if s == 0 {
                    break;
                }
                s = (s - 1) & rest;
            }
        }
        false
    }
}

/// Searches for a partition with at most `target` classes.
fn search_target(
    prob: &Problem,
    target: usize,
    threads: usize,
    deadline: Option<Instant>,
    stop: &AtomicBool,
    nodes: &AtomicU64,
) -> Option<Vec<(u64, u64)>> {
    if threads == 1 {
        let mut s = Searcher::new(prob, target, Mode::Plain, deadline, stop);
        let found = s.run();
        nodes.fetch_add(s.nodes, Ordering::Relaxed);
        return found.then_some(s.classes);
    }
    let mut collector = Searcher::new(prob, target, Mode::Collect(2), deadline, stop);
    collector.run();
    nodes.fetch_add(collector.nodes, Ordering::Relaxed);
    let frontier = std::mem::take(&mut collector.frontier);
    let work = || {
        frontier.par_iter().find_map_first(|prefix| {
            let mut s = Searcher::new(prob, target, Mode::Replay(prefix), deadline, stop);
            let found = s.run();
            nodes.fetch_add(s.nodes, Ordering::Relaxed);
            found.then_some(s.classes)
        })
    };
    if threads == 0 {
        work()
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(work),
            Err(_) => work(),
        }
    }
}

/// Exact binary rank by iterative deepening from
/// `max(real rank, isolation bound)`.
///
/// If the time budget or `max_rects` stops the search early, `exact` is
/// `None` and `[lower, upper]` is a sound bracket.
pub fn binary_rank_exact(m: &Matrix01, cfg: &SearchConfig) -> Result<BinaryRankOutcome> {
    let start = Instant::now();
    let deadline = cfg.time_budget.map(|b| start + b);
    let prob = Problem::new(m, cfg.cell_order)?;

    let mut best: Vec<(u64, u64)> = prob.line_partition(true);
    let by_cols = prob.line_partition(false);
    if by_cols.len() < best.len() {
        best = by_cols;
    }
    let mut witness = prob.expand(m, &best);
    if let Some(seed) = &cfg.seed_partition {
        if seed.target != *m {
            return Err(Error::DimensionMismatch(
                "seed partition targets a different matrix".into(),
            ));
        }
        verify_partition(seed)
            .map_err(|e| Error::InvalidWitness(format!("seed partition: {e}")))?;
        if seed.len() < witness.len() {
            witness = seed.clone();
        }
    }
    let mut upper = witness.len();
    let mut lower = prob.rank.max(isolation_lower_bound(m)).min(upper);

    let stop = AtomicBool::new(false);
    let nodes = AtomicU64::new(0);
    let mut timed_out = false;
    while lower < upper {
        if cfg.max_rects.is_some_and(|cap| lower > cap) {
            break;
        }
        match search_target(&prob, lower, cfg.threads, deadline, &stop, &nodes) {
            Some(classes) => {
                let p = prob.expand(m, &classes);
                debug_assert_eq!(verify_partition(&p), Ok(()));
                upper = p.len();
                witness = p;
            }
            None if stop.load(Ordering::Relaxed) => {
                timed_out = true;
                break;
            }
            None => lower += 1,
        }
    }
    debug_assert_eq!(verify_partition(&witness), Ok(()));
    Ok(BinaryRankOutcome {
        exact: (lower == upper).then_some(upper),
        lower,
        upper,
        witness,
        nodes: nodes.load(Ordering::Relaxed),
        timed_out,
    })
}

/// Minimum partition size by dynamic programming over sets of one-cells.
/// Shares no code with [`binary_rank_exact`]. At most 20 ones.
pub fn brute_force_oracle(m: &Matrix01) -> Result<usize> {
    let ones = m.ones();
    if ones.len() > 20 {
        return Err(Error::TooLarge(format!(
            "brute force handles at most 20 ones, got {}",
            ones.len()
        )));
    }
    let cell_index: HashMap<(usize, usize), usize> =
        ones.iter().enumerate().map(|(x, &c)| (c, x)).collect();
    let rows: Vec<usize> = (0..m.n_rows()).filter(|&i| m.row_ones(i) > 0).collect();

    // every all-ones rectangle as a mask over one-cells
    let mut rects: Vec<u32> = Vec::new();
    let mut stack: Vec<(usize, Vec<usize>, Vec<usize>)> = rows
        .iter()
        .enumerate()
        .map(|(x, &r)| (x, vec![r], m.row_support(r)))
        .collect();
    while let Some((last, chosen, common)) = stack.pop() {
        let k = common.len();
        for sub in 1u32..(1 << k) {
            let mut mask = 0u32;
            for (bit, &c) in common.iter().enumerate() {
                if sub >> bit & 1 == 1 {
                    for &r in &chosen {
                        mask |= 1 << cell_index[&(r, c)];
                    }
                }
            }
            rects.push(mask);
        }
        for (y, &r) in rows.iter().enumerate().skip(last + 1) {
            let next: Vec<usize> = common.iter().copied().filter(|&c| m.get(r, c)).collect();
            if !next.is_empty() {
                let mut grown = chosen.clone();
                grown.push(r);
                stack.push((y, grown, next));
            }
        }
    }
    rects.sort_unstable();
    rects.dedup();

    fn best(mask: u32, rects: &[u32], memo: &mut HashMap<u32, usize>) -> usize {
        if mask == 0 {
            return 0;
        }
        if let Some(&v) = memo.get(&mask) {
            return v;
        }
        let low = mask & mask.wrapping_neg();
        let v = rects
            .iter()
            .filter(|&&r| r & low != 0 && r & !mask == 0)
            .map(|&r| 1 + best(mask & !r, rects, memo))
            .min()
            .expect("the single cell is a rectangle");
        memo.insert(mask, v);
        v
    }
    let full = if ones.len() == 32 {
        u32::MAX
    } else {
        (1u32 << ones.len()) - 1
    };
    Ok(best(full, &rects, &mut HashMap::new()))
}
