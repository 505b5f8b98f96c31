//! Dense 0/1 matrices with bit-packed rows, plus the circulant and circulant
//! block diagonal constructors.
//!
//! Row `i` is stored as `words_per_row` consecutive `u64` words; bit `j % 64`
//! of word `j / 64` holds entry `(i, j)`. Bits past `n_cols` are always zero.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD: usize = 64;

#[derive(Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct Matrix01 {
    n_rows: usize,
    n_cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
    transposed: OnceLock<Box<Matrix01>>,
}

impl Clone for Matrix01 {
    fn clone(&self) -> Self {
        Matrix01 {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            words_per_row: self.words_per_row,
            bits: self.bits.clone(),
            transposed: OnceLock::new(),
        }
    }
}

impl PartialEq for Matrix01 {
    fn eq(&self, other: &Self) -> bool {
        self.n_rows == other.n_rows && self.n_cols == other.n_cols && self.bits == other.bits
    }
}

impl Eq for Matrix01 {}

impl fmt::Debug for Matrix01 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix01 {}x{}", self.n_rows, self.n_cols)?;
        for i in 0..self.n_rows {
            writeln!(f, "  {}", self.row_string(i))?;
        }
        Ok(())
    }
}

impl Matrix01 {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::EmptyMatrix {
                rows: n_rows,
                cols: n_cols,
            });
        }
        let words_per_row = n_cols.div_ceil(WORD);
        Ok(Matrix01 {
            n_rows,
            n_cols,
            words_per_row,
            bits: vec![0; n_rows * words_per_row],
            transposed: OnceLock::new(),
        })
    }

    pub fn ones_matrix(n_rows: usize, n_cols: usize) -> Result<Self> {
        Self::from_fn(n_rows, n_cols, |_, _| true)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, n, |i, j| i == j)
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, f: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let mut m = Self::zeros(n_rows, n_cols)?;
        for i in 0..n_rows {
            for j in 0..n_cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        Ok(m)
    }

    /// Builds a matrix from rows of `'0'`/`'1'` characters.
    pub fn from_bit_strings<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().chars().count());
        let mut m = Self::zeros(n_rows, n_cols)?;
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            let mut count = 0;
            for (j, ch) in row.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' if j < n_cols => m.set(i, j, true),
                    '1' => {}
                    other => {
                        return Err(Error::parse(
                            i + 1,
                            j + 1,
                            format!("unexpected character {other:?}"),
                        ))
                    }
                }
                count += 1;
            }
            if count != n_cols {
                return Err(Error::parse(
                    i + 1,
                    count.min(n_cols) + 1,
                    format!("row has {count} entries, expected {n_cols}"),
                ));
            }
        }
        Ok(m)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn words_per_row(&self) -> usize {
        self.words_per_row
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.n_rows && j < self.n_cols);
        (self.bits[i * self.words_per_row + j / WORD] >> (j % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.n_rows && j < self.n_cols, "index out of range");
        let w = &mut self.bits[i * self.words_per_row + j / WORD];
        if value {
            *w |= 1 << (j % WORD);
        } else {
            *w &= !(1 << (j % WORD));
        }
        self.transposed = OnceLock::new();
    }

    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    /// Row `i` as a single word; only meaningful when `n_cols <= 64`.
    pub fn row_mask(&self, i: usize) -> u64 {
        debug_assert!(self.n_cols <= WORD);
        self.bits[i * self.words_per_row]
    }

    pub fn row_ones(&self, i: usize) -> usize {
        self.row_words(i)
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    pub fn col_ones(&self, j: usize) -> usize {
        self.transpose().row_ones(j)
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Column indices of the ones in row `i`, ascending.
    pub fn row_support(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.row_ones(i));
        for (wi, &w) in self.row_words(i).iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(wi * WORD + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }

    /// All one-cells in row-major order.
    pub fn ones(&self) -> Vec<(usize, usize)> {
        (0..self.n_rows)
            .flat_map(|i| self.row_support(i).into_iter().map(move |j| (i, j)))
            .collect()
    }

    /// The transpose, computed on first use and cached.
    pub fn transpose(&self) -> &Matrix01 {
        self.transposed.get_or_init(|| {
            let mut t = Matrix01::zeros(self.n_cols, self.n_rows).expect("nonempty");
            for i in 0..self.n_rows {
                for j in self.row_support(i) {
                    t.bits[j * t.words_per_row + i / WORD] |= 1 << (i % WORD);
                }
            }
            Box::new(t)
        })
    }

    pub fn row_string(&self, i: usize) -> String {
        (0..self.n_cols)
            .map(|j| if self.get(i, j) { '1' } else { '0' })
            .collect()
    }

    /// Plain text form: `"R C"` followed by `R` lines of `'0'`/`'1'`.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n_rows, self.n_cols);
        for i in 0..self.n_rows {
            s.push_str(&self.row_string(i));
            s.push('\n');
        }
        s
    }

    pub fn parse_text(input: &str) -> Result<Self> {
        let mut lines = input
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, 1, "missing header line \"R C\""))?;
        let mut dims = Vec::with_capacity(2);
        for tok in header.split_whitespace() {
            let col = header.find(tok).unwrap_or(0) + 1;
            let v: usize = tok.parse().map_err(|_| {
                Error::parse(hline + 1, col, format!("expected a count, found {tok:?}"))
            })?;
            dims.push(v);
        }
        if dims.len() != 2 {
            return Err(Error::parse(
                hline + 1,
                1,
                "header must contain exactly two counts",
            ));
        }
        let (r, c) = (dims[0], dims[1]);
        let mut m = Self::zeros(r, c).map_err(|e| Error::parse(hline + 1, 1, e.to_string()))?;
        let mut seen = 0;
        for (lno, line) in lines {
            let line = line.trim_end();
            if seen == r {
                return Err(Error::parse(lno + 1, 1, format!("more than {r} rows")));
            }
            let mut count = 0;
            for (j, ch) in line.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' if j < c => m.set(seen, j, true),
                    '1' => {}
                    other => {
                        return Err(Error::parse(
                            lno + 1,
                            j + 1,
                            format!("unexpected character {other:?}"),
                        ))
                    }
                }
                count += 1;
            }
            if count != c {
                return Err(Error::parse(
                    lno + 1,
                    count.min(c) + 1,
                    format!("row has {count} entries, expected {c}"),
                ));
            }
            seen += 1;
        }
        if seen != r {
            return Err(Error::parse(
                input.lines().count().max(1),
                1,
                format!("expected {r} rows, found {seen}"),
            ));
        }
        Ok(m)
    }

    /// Accepts either the text form or the JSON form.
    pub fn parse_any(input: &str) -> Result<Self> {
        if input.trim_start().starts_with('{') {
            serde_json::from_str(input)
                .map_err(|e| Error::parse(e.line(), e.column(), e.to_string()))
        } else {
            Self::parse_text(input)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<String>,
}

impl From<Matrix01> for MatrixJson {
    fn from(m: Matrix01) -> Self {
        MatrixJson {
            n_rows: m.n_rows,
            n_cols: m.n_cols,
            rows: (0..m.n_rows).map(|i| m.row_string(i)).collect(),
        }
    }
}

impl TryFrom<MatrixJson> for Matrix01 {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        if j.rows.len() != j.n_rows {
            return Err(Error::DimensionMismatch(format!(
                "n_rows is {} but {} rows given",
                j.n_rows,
                j.rows.len()
            )));
        }
        let m = Matrix01::from_bit_strings(&j.rows)?;
        if m.n_cols != j.n_cols {
            return Err(Error::DimensionMismatch(format!(
                "n_cols is {} but rows have {} entries",
                j.n_cols, m.n_cols
            )));
        }
        Ok(m)
    }
}

/// One diagonal block: an `n x n` circulant with `k` ones per row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub n: usize,
    pub k: usize,
}

impl Block {
    /// `gcd(n, k)`; equals `n` when `k = 0`.
    pub fn d(&self) -> usize {
        gcd(self.n, self.k)
    }

    /// Like [`Block::d`] but with the value 1 for full blocks (`n = k`).
    pub fn d_hat(&self) -> usize {
        if self.n == self.k {
            1
        } else {
            self.d()
        }
    }
}

/// Parameters `(k_1, ..., k_m; n_1, ..., n_m)` of a circulant block diagonal
/// matrix. Block order is significant and is never rearranged.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SpecJson", into = "SpecJson")]
pub struct BlockSpec {
    blocks: Vec<Block>,
    offsets: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    blocks: Vec<Block>,
}

impl From<BlockSpec> for SpecJson {
    fn from(s: BlockSpec) -> Self {
        SpecJson { blocks: s.blocks }
    }
}

impl TryFrom<SpecJson> for BlockSpec {
    type Error = Error;
    fn try_from(j: SpecJson) -> Result<Self> {
        BlockSpec::new(j.blocks)
    }
}

impl BlockSpec {
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidParameters(
                "a spec needs at least one block".into(),
            ));
        }
        for (i, b) in blocks.iter().enumerate() {
            if b.n == 0 || b.k > b.n {
                return Err(Error::InvalidParameters(format!(
                    "block {} has n = {}, k = {}; need n >= k >= 0 and n >= 1",
                    i + 1,
                    b.n,
                    b.k
                )));
            }
        }
        let mut offsets = Vec::with_capacity(blocks.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for b in &blocks {
            acc += b.n;
            offsets.push(acc);
        }
        Ok(BlockSpec { blocks, offsets })
    }

    /// All blocks share the same `k`.
    pub fn common(k: usize, sizes: &[usize]) -> Result<Self> {
        Self::new(sizes.iter().map(|&n| Block { n, k }).collect())
    }

    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(n, k)| Block { n, k }).collect())
    }

    /// Parses `"k;n1,n2,..."` or `"k1,k2,...;n1,n2,..."`; whitespace is ignored.
    pub fn parse(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (ks, ns) = compact
            .split_once(';')
            .ok_or_else(|| Error::parse(1, 1, "expected \"k;n1,n2,...\""))?;
        let list = |part: &str, base: usize| -> Result<Vec<usize>> {
            let mut out = Vec::new();
            let mut col = base;
            for tok in part.split(',') {
                let v = tok.parse::<usize>().map_err(|_| {
                    Error::parse(1, col, format!("expected a number, found {tok:?}"))
                })?;
                out.push(v);
                col += tok.len() + 1;
            }
            Ok(out)
        };
        let ks = list(ks, 1)?;
        let ns = list(ns, compact.find(';').unwrap() + 2)?;
        let ks = if ks.len() == 1 {
            vec![ks[0]; ns.len()]
        } else if ks.len() == ns.len() {
            ks
        } else {
            return Err(Error::parse(
                1,
                1,
                format!("{} values of k for {} blocks", ks.len(), ns.len()),
            ));
        };
        Self::new(
            ns.into_iter()
                .zip(ks)
                .map(|(n, k)| Block { n, k })
                .collect(),
        )
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> Block {
        self.blocks[i]
    }

    pub fn m(&self) -> usize {
        self.blocks.len()
    }

    /// Total dimension `n = sum n_i`.
    pub fn n(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Flat index of the first row/column of block `i` (0-based block id).
    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    pub fn block_range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn common_k(&self) -> Option<usize> {
        let k = self.blocks[0].k;
        self.blocks.iter().all(|b| b.k == k).then_some(k)
    }

    pub fn all_k_positive(&self) -> bool {
        self.blocks.iter().all(|b| b.k > 0)
    }

    /// The block diagonal matrix is all-one: a single full block.
    pub fn is_all_one(&self) -> bool {
        self.m() == 1 && self.blocks[0].n == self.blocks[0].k
    }

    pub fn max_d_hat(&self) -> usize {
        self.blocks.iter().map(Block::d_hat).max().unwrap_or(1)
    }

    /// Flat 0-based position of a 1-based block index.
    pub fn flat(&self, idx: GlobalIndex) -> Result<usize> {
        if idx.block == 0 || idx.block > self.m() {
            return Err(Error::InvalidParameters(format!("no block {}", idx.block)));
        }
        let size = self.blocks[idx.block - 1].n;
        if idx.offset == 0 || idx.offset > size {
            return Err(Error::InvalidParameters(format!(
                "offset {} outside block {} of size {size}",
                idx.offset, idx.block
            )));
        }
        Ok(self.offsets[idx.block - 1] + idx.offset - 1)
    }

    /// The 1-based block index of a flat 0-based position.
    pub fn global(&self, flat: usize) -> Result<GlobalIndex> {
        if flat >= self.n() {
            return Err(Error::InvalidParameters(format!(
                "flat index {flat} outside dimension {}",
                self.n()
            )));
        }
        let i = self.offsets.partition_point(|&o| o <= flat) - 1;
        Ok(GlobalIndex {
            block: i + 1,
            offset: flat - self.offsets[i] + 1,
        })
    }

    /// 0-based block id containing a flat position.
    pub fn block_of(&self, flat: usize) -> usize {
        self.offsets.partition_point(|&o| o <= flat) - 1
    }
}

impl fmt::Display for BlockSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ns: Vec<String> = self.blocks.iter().map(|b| b.n.to_string()).collect();
        match self.common_k() {
            Some(k) => write!(f, "{k};{}", ns.join(",")),
            None => {
                let ks: Vec<String> = self.blocks.iter().map(|b| b.k.to_string()).collect();
                write!(f, "{};{}", ks.join(","), ns.join(","))
            }
        }
    }
}

/// Row or column `(i, j)`: position `j` of block `i`, both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GlobalIndex {
    pub block: usize,
    pub offset: usize,
}

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The `n x n` circulant whose first row is `n - k` ones followed by `k` zeros.
pub fn build_d(n: usize, k: usize) -> Result<Matrix01> {
    if n == 0 || k > n {
        return Err(Error::InvalidParameters(format!(
            "circulant needs n >= k >= 0 and n >= 1, got n = {n}, k = {k}"
        )));
    }
    let ones = n - k;
    Matrix01::from_fn(n, n, |i, j| (j + n - i) % n < ones)
}

/// Block diagonal matrix whose block `i` has `k_i` ones per row, zeros elsewhere.
pub fn build_block_diagonal(spec: &BlockSpec) -> Matrix01 {
    let n = spec.n();
    let mut m = Matrix01::zeros(n, n).expect("spec dimension is positive");
    for (bi, b) in spec.blocks().iter().enumerate() {
        let off = spec.offset(bi);
        for i in 0..b.n {
            for t in 0..b.k {
                m.set(off + i, off + (i + t) % b.n, true);
            }
        }
    }
    m
}

pub fn complement(m: &Matrix01) -> Matrix01 {
    let mut out = m.clone();
    let tail = m.n_cols % WORD;
    let tail_mask = if tail == 0 {
        u64::MAX
    } else {
        (1u64 << tail) - 1
    };
    for i in 0..m.n_rows {
        let row = &mut out.bits[i * m.words_per_row..(i + 1) * m.words_per_row];
        for w in row.iter_mut() {
            *w = !*w;
        }
        *row.last_mut().unwrap() &= tail_mask;
    }
    out
}

fn check_permutation(p: &[usize], len: usize, what: &str) -> Result<()> {
    if p.len() != len {
        return Err(Error::Permutation(format!(
            "{what} permutation has length {}, expected {len}",
            p.len()
        )));
    }
    let mut seen = vec![false; len];
    for &x in p {
        if x >= len || std::mem::replace(&mut seen[x], true) {
            return Err(Error::Permutation(format!(
                "{what} permutation is not a bijection"
            )));
        }
    }
    Ok(())
}

/// `result[r][c] = m[row_perm[r]][col_perm[c]]`.
pub fn permute(m: &Matrix01, row_perm: &[usize], col_perm: &[usize]) -> Result<Matrix01> {
    check_permutation(row_perm, m.n_rows, "row")?;
    check_permutation(col_perm, m.n_cols, "column")?;
    Matrix01::from_fn(m.n_rows, m.n_cols, |r, c| m.get(row_perm[r], col_perm[c]))
}

pub fn invert_permutation(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

/// `Some(k)` when every row and every column has exactly `k` ones.
pub fn is_k_regular(m: &Matrix01) -> Result<Option<usize>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.n_rows,
            cols: m.n_cols,
        });
    }
    let k = m.row_ones(0);
    let rows_ok = (0..m.n_rows).all(|i| m.row_ones(i) == k);
    let cols_ok = rows_ok && (0..m.n_cols).all(|j| m.col_ones(j) == k);
    Ok(cols_ok.then_some(k))
}
