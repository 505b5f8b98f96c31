#![allow(dead_code)]

use circrank_core::{BlockSpec, Matrix01};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Every `(n, k)` with `n` in `ns` and `k` in `ks`, `k <= n`.
pub fn pairs(
    ns: std::ops::RangeInclusive<usize>,
    ks: std::ops::RangeInclusive<usize>,
) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for n in ns {
        for k in ks.clone() {
            if k <= n {
                out.push((n, k));
            }
        }
    }
    out
}

/// Ordered specs with 1 to `max_m` blocks drawn from `pairs`.
pub fn ordered_specs(pairs: &[(usize, usize)], max_m: usize) -> Vec<BlockSpec> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(
        pairs: &[(usize, usize)],
        max_m: usize,
        cur: &mut Vec<(usize, usize)>,
        out: &mut Vec<BlockSpec>,
    ) {
        if !cur.is_empty() {
            out.push(BlockSpec::from_pairs(cur).unwrap());
        }
        if cur.len() == max_m {
            return;
        }
        for &p in pairs {
            cur.push(p);
            rec(pairs, max_m, cur, out);
            cur.pop();
        }
    }
    rec(pairs, max_m, &mut cur, &mut out);
    out
}

/// Specs with 1 to `max_m` blocks drawn from `pairs`, one per multiset.
pub fn unordered_specs(pairs: &[(usize, usize)], max_m: usize) -> Vec<BlockSpec> {
    let mut out = Vec::new();
    fn rec(
        pairs: &[(usize, usize)],
        from: usize,
        max_m: usize,
        cur: &mut Vec<(usize, usize)>,
        out: &mut Vec<BlockSpec>,
    ) {
        if !cur.is_empty() {
            out.push(BlockSpec::from_pairs(cur).unwrap());
        }
        if cur.len() == max_m {
            return;
        }
        for i in from..pairs.len() {
            cur.push(pairs[i]);
            rec(pairs, i, max_m, cur, out);
            cur.pop();
        }
    }
    rec(pairs, 0, max_m, &mut Vec::new(), &mut out);
    out
}

/// Descending block sizes, each at least 2, with total at most `max_n`.
pub fn two_regular_specs(max_n: usize) -> Vec<BlockSpec> {
    let mut out = Vec::new();
    fn rec(left: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<BlockSpec>) {
        if !cur.is_empty() {
            out.push(BlockSpec::common(2, cur).unwrap());
        }
        for s in (2..=cap.min(left)).rev() {
            cur.push(s);
            rec(left - s, s, cur, out);
            cur.pop();
        }
    }
    rec(max_n, max_n, &mut Vec::new(), &mut out);
    out
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64) -> Matrix01 {
    let bits: Vec<bool> = (0..rows * cols).map(|_| rng.random_bool(density)).collect();
    Matrix01::from_fn(rows, cols, |i, j| bits[i * cols + j]).unwrap()
}

pub fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

pub fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}
