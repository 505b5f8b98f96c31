//! Explicit rectangle partitions.
//!
//! A partition witness for a square block is an [`MtrWitness`]: `t` row/column
//! set pairs whose rectangles partition the ones of the block, the first `r`
//! of which have pairwise disjoint row sets, together with index sets `L` and
//! `L_s` whose column sets tile `[n]` and `[n] \ B_s`. [`merge_construct`]
//! combines witnesses of several diagonal blocks into a partition of the
//! matrix with those blocks on the diagonal and ones elsewhere, using
//! `sum (t_i - r_i) + max r_i` rectangles.
//!
//! All indices in this module are 0-based. Witness index `l` corresponds to
//! label `l + 1` in the 1-based description, so the special rectangles are
//! `0..r`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{build_d, complement, gcd, BlockSpec, Matrix01};

/// A combinatorial rectangle `rows x cols` over flat 0-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rectangle {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl Rectangle {
    /// Sorts and deduplicates both index sets.
    pub fn new(mut rows: Vec<usize>, mut cols: Vec<usize>) -> Self {
        rows.sort_unstable();
        rows.dedup();
        cols.sort_unstable();
        cols.dedup();
        Rectangle { rows, cols }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty() || self.cols.is_empty()
    }

    pub fn area(&self) -> usize {
        self.rows.len() * self.cols.len()
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.rows.binary_search(&row).is_ok() && self.cols.binary_search(&col).is_ok()
    }
}

/// A list of rectangles claimed to partition the ones of `target`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub target: Matrix01,
    pub rects: Vec<Rectangle>,
}

impl Partition {
    pub fn new(target: Matrix01, rects: Vec<Rectangle>) -> Self {
        Partition { target, rects }
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    /// One rectangle per nonzero row.
    pub fn by_rows(m: &Matrix01) -> Self {
        let rects = (0..m.n_rows())
            .filter(|&i| m.row_ones(i) > 0)
            .map(|i| Rectangle::new(vec![i], m.row_support(i)))
            .collect();
        Partition::new(m.clone(), rects)
    }

    pub fn verify(&self) -> std::result::Result<(), PartitionFault> {
        verify_partition(self)
    }
}

/// The first violated partition invariant, with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionFault {
    OutOfRange {
        rect: usize,
        index: usize,
    },
    EmptyRectangle {
        rect: usize,
    },
    ZeroCell {
        rect: usize,
        row: usize,
        col: usize,
    },
    Overlap {
        first: usize,
        second: usize,
        row: usize,
        col: usize,
    },
    Uncovered {
        row: usize,
        col: usize,
    },
}

impl fmt::Display for PartitionFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PartitionFault::OutOfRange { rect, index } => {
                write!(f, "rectangle {rect} uses index {index} outside the matrix")
            }
            PartitionFault::EmptyRectangle { rect } => write!(f, "rectangle {rect} is empty"),
            PartitionFault::ZeroCell { rect, row, col } => {
                write!(f, "rectangle {rect} covers zero cell ({row}, {col})")
            }
            PartitionFault::Overlap {
                first,
                second,
                row,
                col,
            } => write!(
                f,
                "rectangles {first} and {second} both cover ({row}, {col})"
            ),
            PartitionFault::Uncovered { row, col } => {
                write!(f, "one cell ({row}, {col}) is not covered")
            }
        }
    }
}

impl std::error::Error for PartitionFault {}

/// Checks that the rectangles cover only ones, are pairwise disjoint, and
/// cover every one of the target.
pub fn verify_partition(p: &Partition) -> std::result::Result<(), PartitionFault> {
    let m = &p.target;
    let (nr, nc) = (m.n_rows(), m.n_cols());
    let words = m.words_per_row();
    let mut covered = vec![0u64; nr * words];
    for (ri, rect) in p.rects.iter().enumerate() {
        if rect.is_empty() {
            return Err(PartitionFault::EmptyRectangle { rect: ri });
        }
        if let Some(&bad) = rect.rows.iter().find(|&&r| r >= nr) {
            return Err(PartitionFault::OutOfRange {
                rect: ri,
                index: bad,
            });
        }
        if let Some(&bad) = rect.cols.iter().find(|&&c| c >= nc) {
            return Err(PartitionFault::OutOfRange {
                rect: ri,
                index: bad,
            });
        }
        let mut mask = vec![0u64; words];
        for &c in &rect.cols {
            mask[c / 64] |= 1 << (c % 64);
        }
        for &r in &rect.rows {
            let row = m.row_words(r);
            let acc = &mut covered[r * words..(r + 1) * words];
            for w in 0..words {
                let zeros = mask[w] & !row[w];
                if zeros != 0 {
                    let col = w * 64 + zeros.trailing_zeros() as usize;
                    return Err(PartitionFault::ZeroCell {
                        rect: ri,
                        row: r,
                        col,
                    });
                }
                let clash = mask[w] & acc[w];
                if clash != 0 {
                    let col = w * 64 + clash.trailing_zeros() as usize;
                    let first = p.rects[..ri]
                        .iter()
                        .position(|q| q.contains(r, col))
                        .expect("an earlier rectangle covers the cell");
                    return Err(PartitionFault::Overlap {
                        first,
                        second: ri,
                        row: r,
                        col,
                    });
                }
                acc[w] |= mask[w];
            }
        }
    }
    for r in 0..nr {
        let row = m.row_words(r);
        for w in 0..words {
            let missing = row[w] & !covered[r * words + w];
            if missing != 0 {
                let col = w * 64 + missing.trailing_zeros() as usize;
                return Err(PartitionFault::Uncovered { row: r, col });
            }
        }
    }
    Ok(())
}

/// Sets certifying that an `n x n` matrix admits a `t`-rectangle partition
/// with `r` special rectangles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MtrWitness {
    pub n: usize,
    pub t: usize,
    pub r: usize,
    pub a: Vec<Vec<usize>>,
    pub b: Vec<Vec<usize>>,
    /// Non-special indices whose column sets tile `[n]`.
    pub l: Vec<usize>,
    /// For each special `s`, non-special indices whose column sets tile `[n] \ B_s`.
    pub l_s: Vec<Vec<usize>>,
}

impl MtrWitness {
    /// Applies the column map `c -> (c + shift) mod n` to every column set.
    pub fn rotate_columns(&self, shift: usize) -> MtrWitness {
        let n = self.n;
        let mut w = self.clone();
        for b in &mut w.b {
            for c in b.iter_mut() {
                *c = (*c + shift) % n;
            }
            b.sort_unstable();
        }
        w
    }
}

/// Which condition of the witness definition fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MtrFault {
    /// 0 for structural problems, otherwise the failing condition 1..=4.
    pub item: u8,
    pub detail: String,
}

impl fmt::Display for MtrFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.item == 0 {
            write!(f, "malformed witness: {}", self.detail)
        } else {
            write!(f, "condition {} fails: {}", self.item, self.detail)
        }
    }
}

fn fault(item: u8, detail: impl Into<String>) -> MtrFault {
    MtrFault {
        item,
        detail: detail.into(),
    }
}

/// Checks that the index sets in `select` tile `target` (a sorted set).
fn tiles(w: &MtrWitness, select: &[usize], target: &[usize]) -> std::result::Result<(), String> {
    let mut seen = vec![false; w.n];
    for &l in select {
        if l < w.r || l >= w.t {
            return Err(format!("index {} is not a non-special index", l + 1));
        }
        for &c in &w.b[l] {
            if std::mem::replace(&mut seen[c], true) {
                return Err(format!("column {c} appears twice"));
            }
        }
    }
    let mut want = vec![false; w.n];
    for &c in target {
        want[c] = true;
    }
    match (0..w.n).find(|&c| seen[c] != want[c]) {
        Some(c) if want[c] => Err(format!("column {c} is missed")),
        Some(c) => Err(format!("column {c} is not allowed")),
        None => Ok(()),
    }
}

pub fn verify_mtr(m: &Matrix01, w: &MtrWitness) -> std::result::Result<(), MtrFault> {
    let n = w.n;
    if m.n_rows() != n || m.n_cols() != n {
        return Err(fault(
            0,
            format!(
                "matrix is {}x{}, witness has n = {n}",
                m.n_rows(),
                m.n_cols()
            ),
        ));
    }
    if w.t <= w.r {
        return Err(fault(
            0,
            format!("need t > r, got t = {}, r = {}", w.t, w.r),
        ));
    }
    if w.a.len() != w.t || w.b.len() != w.t || w.l_s.len() != w.r {
        return Err(fault(0, "set counts do not match t and r"));
    }
    if w.a.iter().chain(&w.b).flatten().any(|&x| x >= n) {
        return Err(fault(0, "index outside [n]"));
    }

    let rects = (0..w.t)
        .filter(|&l| !w.a[l].is_empty() && !w.b[l].is_empty())
        .map(|l| Rectangle::new(w.a[l].clone(), w.b[l].clone()))
        .collect();
    if let Err(e) = verify_partition(&Partition::new(m.clone(), rects)) {
        return Err(fault(1, e.to_string()));
    }

    let mut owner = vec![usize::MAX; n];
    for s in 0..w.r {
        for &row in &w.a[s] {
            if owner[row] != usize::MAX && owner[row] != s {
                return Err(fault(
                    2,
                    format!("row {row} lies in A_{} and A_{}", owner[row] + 1, s + 1),
                ));
            }
            owner[row] = s;
        }
    }

    let all: Vec<usize> = (0..n).collect();
    tiles(w, &w.l, &all).map_err(|e| fault(3, e))?;

    for s in 0..w.r {
        let rest: Vec<usize> = (0..n).filter(|c| !w.b[s].contains(c)).collect();
        tiles(w, &w.l_s[s], &rest).map_err(|e| fault(4, format!("s = {}: {e}", s + 1)))?;
    }
    Ok(())
}

/// Witness for the circulant `D_{n,k}` (`n - k` ones per row) with `t = n`
/// and `r = gcd(n, k) - 1`.
///
/// `B_l` is the run of `d` columns starting at `l`; the support of row `i`
/// splits into the runs starting at `i, i + d, ...`, and `A_l` collects the
/// rows whose split uses `B_l`.
pub fn dinm_witness(n: usize, k: usize) -> Result<MtrWitness> {
    if k == 0 || k >= n {
        return Err(Error::InvalidParameters(format!(
            "circulant witness needs n > k > 0, got n = {n}, k = {k}"
        )));
    }
    let d = gcd(n, k);
    let b: Vec<Vec<usize>> = (0..n)
        .map(|l| {
            let mut s: Vec<usize> = (0..d).map(|x| (l + x) % n).collect();
            s.sort_unstable();
            s
        })
        .collect();
    let mut a = vec![Vec::new(); n];
    for row in 0..n {
        for step in 0..(n - k) / d {
            a[(row + step * d) % n].push(row);
        }
    }
    for set in &mut a {
        set.sort_unstable();
    }
    let r = d - 1;
    let l = (r..n).filter(|&l| l % d == d - 1).collect();
    let l_s = (0..r)
        .map(|s| (r..n).filter(|&l| l % d == s && l != s).collect())
        .collect();
    Ok(MtrWitness {
        n,
        t: n,
        r,
        a,
        b,
        l,
        l_s,
    })
}

/// One-rectangle witness for the all-one (`all_one`) or zero `n x n` matrix.
///
/// For the zero matrix the single rectangle is `{} x [n]`: it covers no
/// cells, and its column set still tiles `[n]`, which the merge step needs to
/// cover the ones above and below a zero diagonal block.
pub fn trivial_witness(n: usize, all_one: bool) -> Result<MtrWitness> {
    if n == 0 {
        return Err(Error::InvalidParameters("witness needs n >= 1".into()));
    }
    let full: Vec<usize> = (0..n).collect();
    Ok(MtrWitness {
        n,
        t: 1,
        r: 0,
        a: vec![if all_one { full.clone() } else { Vec::new() }],
        b: vec![full],
        l: vec![0],
        l_s: Vec::new(),
    })
}

/// Number of rectangles [`merge_construct`] produces before empty ones are
/// dropped.
pub fn merge_size(witnesses: &[&MtrWitness]) -> usize {
    let r_max = witnesses.iter().map(|w| w.r).max().unwrap_or(0);
    witnesses.iter().map(|w| w.t - w.r).sum::<usize>() + r_max
}

/// Partitions the ones of the matrix with the given diagonal blocks and ones
/// everywhere else.
///
/// Special rectangles with the same index are merged across blocks. Each
/// non-special rectangle of block `i` additionally takes every row outside
/// block `i` that its column set is needed for: rows lying in a special `A_s`
/// with `s < r_i` go to the rectangles of `L_s`, all other rows to those of
/// `L`.
pub fn merge_construct(diag: &[(Matrix01, MtrWitness)]) -> Result<Partition> {
    if diag.is_empty() {
        return Err(Error::InvalidParameters("no diagonal blocks".into()));
    }
    for (i, (m, w)) in diag.iter().enumerate() {
        verify_mtr(m, w).map_err(|e| Error::InvalidWitness(format!("block {}: {e}", i + 1)))?;
    }
    let mut offsets = Vec::with_capacity(diag.len());
    let mut n = 0;
    for (_, w) in diag {
        offsets.push(n);
        n += w.n;
    }
    let mut target = Matrix01::ones_matrix(n, n)?;
    for (bi, (m, w)) in diag.iter().enumerate() {
        let off = offsets[bi];
        for i in 0..w.n {
            for j in 0..w.n {
                if !m.get(i, j) {
                    target.set(off + i, off + j, false);
                }
            }
        }
    }

    // special[row] = (block, s) when the row lies in a special A_s of its block
    let mut special: Vec<Option<usize>> = vec![None; n];
    for (bi, (_, w)) in diag.iter().enumerate() {
        for s in 0..w.r {
            for &row in &w.a[s] {
                let slot = &mut special[offsets[bi] + row];
                if slot.is_some() {
                    return Err(Error::InvalidWitness(format!(
                        "block {}: row {row} lies in two special row sets",
                        bi + 1
                    )));
                }
                *slot = Some(s);
            }
        }
    }

    let r_max = diag.iter().map(|(_, w)| w.r).max().unwrap_or(0);
    let mut rects =
        Vec::with_capacity(merge_size(&diag.iter().map(|(_, w)| w).collect::<Vec<_>>()));
    for s in 0..r_max {
        let mut rows = Vec::new();
        let mut cols = Vec::new();
        for (bi, (_, w)) in diag.iter().enumerate() {
            if s < w.r {
                rows.extend(w.a[s].iter().map(|&x| x + offsets[bi]));
                cols.extend(w.b[s].iter().map(|&x| x + offsets[bi]));
            }
        }
        rects.push(Rectangle::new(rows, cols));
    }

    for (bi, (_, w)) in diag.iter().enumerate() {
        let off = offsets[bi];
        let mut extra: Vec<Vec<usize>> = vec![Vec::new(); w.t];
        for (row, sp) in special.iter().enumerate() {
            if (off..off + w.n).contains(&row) {
                continue;
            }
            let targets = match *sp {
                Some(s) if s < w.r => &w.l_s[s],
                _ => &w.l,
            };
            for &l in targets {
                extra[l].push(row);
            }
        }
        for l in w.r..w.t {
            let mut rows: Vec<usize> = w.a[l].iter().map(|&x| x + off).collect();
            rows.append(&mut extra[l]);
            let cols = w.b[l].iter().map(|&x| x + off).collect();
            rects.push(Rectangle::new(rows, cols));
        }
    }
    rects.retain(|r| !r.is_empty());

    let p = Partition::new(target, rects);
    verify_partition(&p).map_err(|e| Error::InvalidWitness(format!("merged partition: {e}")))?;
    Ok(p)
}

/// The diagonal blocks of the complement of `build_block_diagonal(spec)`,
/// each paired with its witness.
///
/// The complement of the `k`-regular circulant `D_{n, n-k}` is `D_{n, k}` with
/// column `c` moved to `c + k (mod n)`, so the circulant witness is rotated by
/// `k`. Full blocks (`n = k`) complement to zero and use the trivial witness.
pub fn complement_blocks(spec: &BlockSpec) -> Result<Vec<(Matrix01, MtrWitness)>> {
    if !spec.all_k_positive() {
        return Err(Error::InvalidParameters(
            "every k_i must be positive".into(),
        ));
    }
    spec.blocks()
        .iter()
        .map(|b| {
            let block = complement(&build_d(b.n, b.n - b.k)?);
            let witness = if b.n == b.k {
                trivial_witness(b.n, false)?
            } else {
                dinm_witness(b.n, b.k)?.rotate_columns(b.k)
            };
            Ok((block, witness))
        })
        .collect()
}

/// Partition of the complement of `build_block_diagonal(spec)` with at most
/// `rank + max d_hat_i - 1` rectangles.
pub fn complement_partition(spec: &BlockSpec) -> Result<Partition> {
    merge_construct(&complement_blocks(spec)?)
}

/// Block sizes `(k; 2k x l, k x t)` where `r = 2k l + t`, `0 <= t < 2k`: a
/// `k`-regular matrix of binary rank `r` whose complement has much smaller
/// binary rank.
pub fn gap_family(k: usize, r: usize) -> Result<BlockSpec> {
    if k < 2 || r < 2 * k {
        return Err(Error::InvalidParameters(format!(
            "gap family needs k >= 2 and r >= 2k, got k = {k}, r = {r}"
        )));
    }
    let l = r / (2 * k);
    let t = r % (2 * k);
    let mut sizes = vec![2 * k; l];
    sizes.extend(std::iter::repeat_n(k, t));
    BlockSpec::common(k, &sizes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::build_block_diagonal;

    fn all_one_2x2() -> Matrix01 {
        Matrix01::ones_matrix(2, 2).unwrap()
    }

    #[test]
    fn row_partition_is_valid() {
        let m = build_d(7, 3).unwrap();
        assert_eq!(verify_partition(&Partition::by_rows(&m)), Ok(()));
    }

    #[test]
    fn overlap_is_reported() {
        let p = Partition::new(
            all_one_2x2(),
            vec![
                Rectangle::new(vec![0, 1], vec![0]),
                Rectangle::new(vec![1], vec![0, 1]),
            ],
        );
        assert_eq!(
            verify_partition(&p),
            Err(PartitionFault::Overlap {
                first: 0,
                second: 1,
                row: 1,
                col: 0
            })
        );
    }

    #[test]
    fn zero_and_uncovered_cells_are_reported() {
        let m = Matrix01::identity(2).unwrap();
        let p = Partition::new(m.clone(), vec![Rectangle::new(vec![0], vec![0, 1])]);
        assert_eq!(
            verify_partition(&p),
            Err(PartitionFault::ZeroCell {
                rect: 0,
                row: 0,
                col: 1
            })
        );
        let p = Partition::new(m.clone(), vec![Rectangle::new(vec![0], vec![0])]);
        assert_eq!(
            verify_partition(&p),
            Err(PartitionFault::Uncovered { row: 1, col: 1 })
        );
        let p = Partition::new(m, vec![Rectangle::new(vec![0], vec![5])]);
        assert!(matches!(
            verify_partition(&p),
            Err(PartitionFault::OutOfRange { .. })
        ));
    }

    #[test]
    fn circulant_witness_matches_illustrated_sets() {
        let w = dinm_witness(9, 3).unwrap();
        assert_eq!((w.t, w.r), (9, 2));
        // labels are shifted down by one: A_1 = {1, 7}, B_1 = {1, 2, 3}
        assert_eq!(w.a[0], vec![0, 6]);
        assert_eq!(w.b[0], vec![0, 1, 2]);
        for l in 0..9 {
            assert_eq!(w.a[l], {
                let mut v = vec![l, (l + 6) % 9];
                v.sort();
                v
            });
        }
        assert_eq!(verify_mtr(&build_d(9, 3).unwrap(), &w), Ok(()));
    }

    #[test]
    fn coprime_witness_is_single_columns() {
        let w = dinm_witness(5, 3).unwrap();
        assert_eq!((w.t, w.r), (5, 0));
        assert!(w.b.iter().all(|b| b.len() == 1));
        let m = build_d(5, 3).unwrap();
        assert_eq!(verify_mtr(&m, &w), Ok(()));
        let rects = (0..5)
            .map(|l| Rectangle::new(w.a[l].clone(), w.b[l].clone()))
            .collect();
        assert_eq!(verify_partition(&Partition::new(m, rects)), Ok(()));
    }

    #[test]
    fn trivial_witnesses() {
        let w = trivial_witness(3, true).unwrap();
        assert_eq!(
            verify_mtr(&Matrix01::ones_matrix(3, 3).unwrap(), &w),
            Ok(())
        );
        assert_eq!(w.a[0].len() * w.b[0].len(), 9);
        let z = trivial_witness(3, false).unwrap();
        assert_eq!(verify_mtr(&build_d(3, 3).unwrap(), &z), Ok(()));
        let one = trivial_witness(1, true).unwrap();
        assert_eq!(
            verify_mtr(&Matrix01::ones_matrix(1, 1).unwrap(), &one),
            Ok(())
        );
        assert!(trivial_witness(0, true).is_err());
    }

    #[test]
    fn broken_witnesses_name_the_failing_condition() {
        let m = build_d(9, 3).unwrap();
        let mut w = dinm_witness(9, 3).unwrap();
        w.a[1].push(0);
        assert_eq!(verify_mtr(&m, &w).unwrap_err().item, 1);

        // overlapping special row sets on a matrix they still partition
        let m = Matrix01::ones_matrix(2, 2).unwrap();
        let w = MtrWitness {
            n: 2,
            t: 3,
            r: 2,
            a: vec![vec![0], vec![0, 1], vec![1]],
            b: vec![vec![0], vec![1], vec![0]],
            l: vec![2],
            l_s: vec![vec![], vec![]],
        };
        assert_eq!(verify_mtr(&m, &w).unwrap_err().item, 2);

        let mut w = dinm_witness(9, 3).unwrap();
        w.l.pop();
        assert_eq!(verify_mtr(&build_d(9, 3).unwrap(), &w).unwrap_err().item, 3);

        let mut w = dinm_witness(9, 3).unwrap();
        w.l_s[1].clear();
        assert_eq!(verify_mtr(&build_d(9, 3).unwrap(), &w).unwrap_err().item, 4);

        let mut w = dinm_witness(9, 3).unwrap();
        w.l.push(0);
        assert_eq!(verify_mtr(&build_d(9, 3).unwrap(), &w).unwrap_err().item, 3);
    }

    #[test]
    fn rotated_witness_fits_the_complement_block() {
        for (n, k) in [(9, 3), (9, 6), (6, 2), (8, 4), (7, 3)] {
            let block = complement(&build_d(n, n - k).unwrap());
            let rotated = dinm_witness(n, k).unwrap().rotate_columns(k);
            assert_eq!(verify_mtr(&block, &rotated), Ok(()), "n = {n}, k = {k}");
        }
        // the unrotated witness does not fit
        let block = complement(&build_d(9, 6).unwrap());
        assert!(verify_mtr(&block, &dinm_witness(9, 3).unwrap()).is_err());
    }

    #[test]
    fn two_nine_by_nine_blocks_merge_to_sixteen() {
        let w = dinm_witness(9, 3).unwrap();
        let d = build_d(9, 3).unwrap();
        let p = merge_construct(&[(d.clone(), w.clone()), (d, w)]).unwrap();
        assert_eq!(p.len(), 16);
        assert_eq!(verify_partition(&p), Ok(()));
    }

    #[test]
    fn single_block_merge_is_the_witness() {
        let w = dinm_witness(8, 2).unwrap();
        let d = build_d(8, 2).unwrap();
        let p = merge_construct(&[(d, w.clone())]).unwrap();
        assert_eq!(p.len(), w.t);
    }

    #[test]
    fn mixed_blocks_merge() {
        let blocks = vec![
            (build_d(4, 2).unwrap(), dinm_witness(4, 2).unwrap()),
            (build_d(6, 2).unwrap(), dinm_witness(6, 2).unwrap()),
        ];
        let p = merge_construct(&blocks).unwrap();
        assert_eq!(p.len(), 9);
        assert_eq!(verify_partition(&p), Ok(()));
    }

    #[test]
    fn merge_rejects_invalid_witness() {
        let mut w = dinm_witness(4, 2).unwrap();
        w.l.clear();
        assert!(matches!(
            merge_construct(&[(build_d(4, 2).unwrap(), w)]),
            Err(Error::InvalidWitness(_))
        ));
    }

    #[test]
    fn upper_partitions() {
        let p = complement_partition(&BlockSpec::parse("2;4,4").unwrap()).unwrap();
        assert_eq!(p.len(), 7);
        assert_eq!(
            p.target,
            complement(&build_block_diagonal(&BlockSpec::parse("2;4,4").unwrap()))
        );
        let p = complement_partition(&BlockSpec::parse("6;9,9").unwrap()).unwrap();
        assert_eq!(p.len(), 16);
        let s = BlockSpec::parse("1;3,5,2").unwrap();
        let p = complement_partition(&s).unwrap();
        assert_eq!(p.len(), crate::rank::formula_rank_spec(&s).unwrap());
        // full block next to a proper one
        let s = BlockSpec::from_pairs(&[(3, 3), (4, 2)]).unwrap();
        let p = complement_partition(&s).unwrap();
        assert_eq!(verify_partition(&p), Ok(()));
        assert_eq!(p.len(), 1 + 3 + 1);
        // the lone full block complements to zero
        let p = complement_partition(&BlockSpec::parse("3;3").unwrap()).unwrap();
        assert!(p.is_empty());
        assert!(complement_partition(&BlockSpec::parse("0;3").unwrap()).is_err());
    }

    #[test]
    fn gap_family_shapes() {
        assert_eq!(
            gap_family(2, 8).unwrap(),
            BlockSpec::parse("2;4,4").unwrap()
        );
        assert_eq!(
            gap_family(2, 9).unwrap(),
            BlockSpec::parse("2;4,4,2").unwrap()
        );
        assert_eq!(
            gap_family(3, 12).unwrap(),
            BlockSpec::parse("3;6,6").unwrap()
        );
        assert_eq!(
            gap_family(3, 17).unwrap(),
            BlockSpec::parse("3;6,6,3,3,3,3,3").unwrap()
        );
        assert!(gap_family(2, 3).is_err());
        assert!(gap_family(1, 5).is_err());
    }

    #[test]
    fn partition_json_shape() {
        let m = Matrix01::identity(2).unwrap();
        let p = Partition::by_rows(&m);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(
            json,
            r#"{"target":{"n_rows":2,"n_cols":2,"rows":["10","01"]},"rects":[{"rows":[0],"cols":[0]},{"rows":[1],"cols":[1]}]}"#
        );
        let back: Partition = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }
}
