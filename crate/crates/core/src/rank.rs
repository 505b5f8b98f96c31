//! Exact rank over the rationals and the closed-form ranks of circulant
//! block diagonal matrices.
//!
//! The rank of a 0/1 matrix is computed modulo several primes below 2^31.
//! Each modular rank is at most the rational rank, and a prime can only lose
//! rank by dividing every maximal nonzero minor. Once the product of the
//! primes exceeds the Hadamard bound on the minors, no nonzero minor is
//! divisible by all of them, so the largest modular rank is exact.
//!
//! Integer matrices use fraction-free (Bareiss) elimination: every
//! intermediate entry is a minor of the input, so each division is exact. The
//! kernel first runs on `i128` with checked arithmetic and restarts on
//! arbitrary-precision integers if any step would overflow. Pivots are
//! chosen in the leftmost nonzero column, topmost remaining row.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::{gcd, BlockSpec, Matrix01};

/// Exact rationals for ranks and certificate arithmetic.
pub type Rational = num_rational::BigRational;

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Rank of a 0/1 matrix over the rationals.
pub fn real_rank(m: &Matrix01) -> usize {
    let full = m.n_rows().min(m.n_cols());
    // one spare bit absorbs rounding in the bound
    let mut missing = minor_bits(m) + 1.0;
    let mut best = rank_mod(m, MERSENNE_61, reduce_m61);
    missing -= 61.0;
    for &p in primes() {
        if best == full || missing <= 0.0 {
            return best;
        }
        best = best.max(rank_mod(m, p, barrett(p)));
        missing -= 30.0;
    }
    if best == full || missing <= 0.0 {
        return best;
    }
    let rows: Vec<Vec<i64>> = (0..m.n_rows())
        .map(|i| (0..m.n_cols()).map(|j| m.get(i, j) as i64).collect())
        .collect();
    integer_rank(&rows)
}

/// `log2` of the Hadamard bound on the minors of `m`: the smaller of the
/// products of row norms and of column norms.
fn minor_bits(m: &Matrix01) -> f64 {
    let bits = |counts: &mut dyn Iterator<Item = usize>| -> f64 {
        counts
            .filter(|&c| c > 1)
            .map(|c| 0.5 * (c as f64).log2())
            .sum()
    };
    let rows = bits(&mut (0..m.n_rows()).map(|i| m.row_ones(i)));
    let cols = bits(&mut (0..m.n_cols()).map(|j| m.col_ones(j)));
    rows.min(cols)
}

/// The 64 largest primes below 2^31, descending; each exceeds 2^30.
fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let is_prime = |x: u64| (2..).take_while(|d| d * d <= x).all(|d| !x.is_multiple_of(d));
        ((1u64 << 30)..(1u64 << 31))
            .rev()
            .filter(|&x| is_prime(x))
            .take(64)
            .collect()
    })
}

const MERSENNE_61: u64 = (1 << 61) - 1;

fn reduce_m61(x: u128) -> u64 {
    let folded = (x as u64 & MERSENNE_61) as u128 + (x >> 61);
    let r = (folded as u64 & MERSENNE_61) + (folded >> 61) as u64;
    if r >= MERSENNE_61 {
        r - MERSENNE_61
    } else {
        r
    }
}

/// Barrett reduction modulo `p < 2^31` for inputs below `2^63`.
fn barrett(p: u64) -> impl Fn(u128) -> u64 + Copy {
    let inv = u128::from(u64::MAX) / u128::from(p);
    move |x: u128| {
        let x = x as u64;
        let q = ((u128::from(x) * inv) >> 64) as u64;
        let r = x - q * p;
        if r >= p {
            r - p
        } else {
            r
        }
    }
}

/// Rank modulo the prime `p`, with `reduce` computing residues mod `p` of
/// products and sums of residues.
fn rank_mod(m: &Matrix01, p: u64, reduce: impl Fn(u128) -> u64 + Copy) -> usize {
    let pow = |mut base: u64, mut exp: u64| {
        let mut acc = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = reduce(u128::from(acc) * u128::from(base));
            }
            base = reduce(u128::from(base) * u128::from(base));
            exp >>= 1;
        }
        acc
    };
    let n_cols = m.n_cols();
    let mut a: Vec<Vec<u64>> = (0..m.n_rows())
        .map(|i| (0..n_cols).map(|j| m.get(i, j) as u64).collect())
        .collect();
    let mut rank = 0;
    for col in 0..n_cols {
        let Some(piv) = (rank..a.len()).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let inv = pow(a[rank][col], p - 2);
        for x in a[rank][col..].iter_mut() {
            *x = reduce(u128::from(*x) * u128::from(inv));
        }
        let (top, rest) = a.split_at_mut(rank + 1);
        let prow = &top[rank];
        for row in rest.iter_mut() {
            let f = row[col];
            if f != 0 {
                let neg = u128::from(p - f);
                for j in col..n_cols {
                    row[j] = reduce(u128::from(row[j]) + neg * u128::from(prow[j]));
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank over the rationals of an integer matrix given by rows.
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let mut small: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    match bareiss_i128(&mut small) {
        Some(r) => r,
        None => {
            let mut big: Vec<Vec<BigInt>> = rows
                .iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect();
            bareiss_big(&mut big)
        }
    }
}

/// Rank over the rationals of a rational matrix (rows need not share a
/// denominator).
pub fn rational_rank(rows: &[Vec<Rational>]) -> usize {
    let mut big: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let lcm = r.iter().fold(BigInt::one(), |acc, x| {
                num_integer::Integer::lcm(&acc, x.denom())
            });
            r.iter()
                .map(|x| (x * Rational::from_integer(lcm.clone())).to_integer())
                .collect()
        })
        .collect();
    bareiss_big(&mut big)
}

fn bareiss_i128(a: &mut [Vec<i128>]) -> Option<usize> {
    let n_rows = a.len();
    let n_cols = a.first().map_or(0, Vec::len);
    let mut prev: i128 = 1;
    let mut rank = 0;
    for col in 0..n_cols {
        if rank == n_rows {
            break;
        }
        let Some(p) = (rank..n_rows).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank][col];
        let (top, rest) = a.split_at_mut(rank + 1);
        let prow = &top[rank];
        for row in rest.iter_mut() {
            let lead = row[col];
            for j in col + 1..n_cols {
                let lhs = pivot.checked_mul(row[j])?;
                let rhs = lead.checked_mul(prow[j])?;
                row[j] = lhs.checked_sub(rhs)? / prev;
            }
            row[col] = 0;
        }
        prev = pivot;
        rank += 1;
    }
    Some(rank)
}

fn bareiss_big(a: &mut [Vec<BigInt>]) -> usize {
    let n_rows = a.len();
    let n_cols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..n_cols {
        if rank == n_rows {
            break;
        }
        let Some(p) = (rank..n_rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank][col].clone();
        let (top, rest) = a.split_at_mut(rank + 1);
        let prow = &top[rank];
        for row in rest.iter_mut() {
            let lead = row[col].clone();
            for j in col + 1..n_cols {
                let v = &pivot * &row[j] - &lead * &prow[j];
                debug_assert!((&v % &prev).is_zero());
                row[j] = v / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

/// Closed-form rank `n - gcd(n, k) + 1` of the `k`-regular circulant
/// `D_{n, n-k}`. Requires `n >= k > 0`.
pub fn formula_rank_d(n: usize, k: usize) -> Result<usize> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameters(format!(
            "rank formula needs n >= k > 0, got n = {n}, k = {k}"
        )));
    }
    Ok(n - gcd(n, k) + 1)
}

/// Closed-form rank `sum (n_i - gcd(n_i, k_i) + 1)`, shared by the block
/// diagonal matrix and its complement. Requires every `k_i > 0`; the single
/// full block is rejected with [`Error::AllOne`].
pub fn formula_rank_spec(spec: &BlockSpec) -> Result<usize> {
    if !spec.all_k_positive() {
        return Err(Error::InvalidParameters(
            "rank formula needs every k_i > 0".into(),
        ));
    }
    if spec.is_all_one() {
        return Err(Error::AllOne);
    }
    spec.blocks().iter().map(|b| formula_rank_d(b.n, b.k)).sum()
}

/// Rank of the block diagonal matrix (or its complement) for any spec with
/// positive `k_i`, including the all-one case.
pub fn spec_real_rank(spec: &BlockSpec, complemented: bool) -> Result<usize> {
    match formula_rank_spec(spec) {
        Err(Error::AllOne) => Ok(if complemented { 0 } else { 1 }),
        other => other,
    }
}

/// Whether the all-one vector is a rational combination of the rows.
pub fn all_one_in_row_span(m: &Matrix01) -> bool {
    let mut rows: Vec<Vec<i64>> = (0..m.n_rows())
        .map(|i| (0..m.n_cols()).map(|j| m.get(i, j) as i64).collect())
        .collect();
    let before = integer_rank(&rows);
    rows.push(vec![1; m.n_cols()]);
    integer_rank(&rows) == before
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{build_block_diagonal, build_d, complement};

    #[test]
    fn small_ranks() {
        assert_eq!(real_rank(&build_d(9, 3).unwrap()), 7);
        assert_eq!(real_rank(&Matrix01::ones_matrix(5, 5).unwrap()), 1);
        assert_eq!(real_rank(&build_d(5, 4).unwrap()), 5);
        assert_eq!(real_rank(&Matrix01::zeros(3, 4).unwrap()), 0);
        assert_eq!(real_rank(&Matrix01::identity(7).unwrap()), 7);
    }

    #[test]
    fn modular_rank_matches_fraction_free_elimination() {
        // xorshift keeps the test free of dev-dependencies
        let mut state = 0x9e37_79b9_7f4a_7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for case in 0..300 {
            let (r, c) = (1 + case % 23, 1 + (case * 7) % 19);
            let dense = case % 3;
            let mut m = Matrix01::zeros(r, c).unwrap();
            for i in 0..r {
                for j in 0..c {
                    m.set(i, j, next() % 4 > dense as u64);
                }
            }
            let rows: Vec<Vec<i64>> = (0..r)
                .map(|i| (0..c).map(|j| m.get(i, j) as i64).collect())
                .collect();
            assert_eq!(real_rank(&m), integer_rank(&rows));
        }
        // duplicated rows and columns make many minors vanish
        let d = build_d(12, 6).unwrap();
        let doubled = Matrix01::from_fn(24, 24, |i, j| d.get(i / 2, j / 2)).unwrap();
        assert_eq!(real_rank(&doubled), 7);
    }

    #[test]
    fn integer_rank_handles_dependence() {
        let rows = vec![vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]];
        assert_eq!(integer_rank(&rows), 2);
        let rows = vec![vec![0, 0], vec![0, 5]];
        assert_eq!(integer_rank(&rows), 1);
    }

    #[test]
    fn overflow_falls_back_to_big_integers() {
        // Entries near i64::MAX force the i128 products out of range.
        let big = i64::MAX / 3;
        let rows = vec![
            vec![big, big - 1, 7],
            vec![big - 5, big, 11],
            vec![3, big - 7, big],
        ];
        let mut small: Vec<Vec<i128>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        assert!(bareiss_i128(&mut small).is_none());
        assert_eq!(integer_rank(&rows), 3);
        let dep = vec![rows[0].clone(), rows[0].iter().map(|x| -x).collect()];
        assert_eq!(integer_rank(&dep), 1);
    }

    #[test]
    fn rational_rank_scales_rows() {
        let rows = vec![
            vec![rational(1, 2), rational(1, 3)],
            vec![rational(3, 2), rational(1, 1)],
        ];
        assert_eq!(rational_rank(&rows), 1);
    }

    #[test]
    fn rank_formulas() {
        assert_eq!(formula_rank_d(9, 6).unwrap(), 7);
        for k in 1..8 {
            assert_eq!(formula_rank_d(2 * k, k).unwrap(), k + 1);
        }
        assert_eq!(formula_rank_d(7, 3).unwrap(), 7);
        assert!(formula_rank_d(5, 0).is_err());
        let s = BlockSpec::parse("2;4,4").unwrap();
        assert_eq!(formula_rank_spec(&s).unwrap(), 6);
        let s = BlockSpec::parse("6;9,9").unwrap();
        assert_eq!(formula_rank_spec(&s).unwrap(), 14);
        assert_eq!(real_rank(&build_block_diagonal(&s)), 14);
        assert_eq!(real_rank(&complement(&build_block_diagonal(&s))), 14);
        assert_eq!(
            formula_rank_spec(&BlockSpec::parse("3;3").unwrap()),
            Err(Error::AllOne)
        );
        assert_eq!(
            spec_real_rank(&BlockSpec::parse("3;3").unwrap(), true).unwrap(),
            0
        );
    }

    #[test]
    fn two_regular_rank_is_n_minus_even_blocks() {
        for sizes in [vec![3], vec![4, 4], vec![2, 3, 4], vec![5, 6, 2]] {
            let s = BlockSpec::common(2, &sizes).unwrap();
            let n: usize = sizes.iter().sum();
            let m_even = sizes.iter().filter(|&&x| x % 2 == 0).count();
            assert_eq!(formula_rank_spec(&s).unwrap(), n - m_even);
        }
    }

    #[test]
    fn row_span_of_all_one() {
        assert!(all_one_in_row_span(&build_d(6, 2).unwrap()));
        assert!(!all_one_in_row_span(&Matrix01::zeros(3, 3).unwrap()));
        let s = BlockSpec::parse("2;3,4").unwrap();
        assert!(all_one_in_row_span(&complement(&build_block_diagonal(&s))));
        let m = Matrix01::from_bit_strings(&["110", "000", "000"]).unwrap();
        assert!(!all_one_in_row_span(&m));
    }
}
