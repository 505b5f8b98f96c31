//! Lower-bound certificates and the bound statements known for circulant
//! block diagonal matrices and their complements.
//!
//! Claims are only emitted when their hypotheses hold literally; a claim
//! whose hypothesis fails is still listed, with `applicable = false` and the
//! failed condition as its reason.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::construction::{complement_partition, gap_family, Partition, Rectangle};
use crate::error::{Error, Result};
use crate::matrix::{build_block_diagonal, complement, gcd, BlockSpec, Matrix01};
use crate::rank::{integer_rank, real_rank, spec_real_rank, Rational};
use crate::solver::{binary_rank_exact, SearchConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Rows,
    Cols,
}

/// Counts of a rectangle's rows (or columns) inside one block, by residue
/// modulo `d = gcd(n, k)` of the position within the block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSequence {
    pub block: usize,
    pub values: Vec<usize>,
}

impl BlockSequence {
    pub fn is_balanced(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }
}

fn check_positive_k(spec: &BlockSpec) -> Result<()> {
    if spec.all_k_positive() {
        Ok(())
    } else {
        Err(Error::InvalidParameters(
            "every k_i must be positive".into(),
        ))
    }
}

fn indices(r: &Rectangle, axis: Axis) -> &[usize] {
    match axis {
        Axis::Rows => &r.rows,
        Axis::Cols => &r.cols,
    }
}

/// Sequence of `r` in block `block` (0-based).
pub fn row_sequence(
    r: &Rectangle,
    spec: &BlockSpec,
    block: usize,
    axis: Axis,
) -> Result<BlockSequence> {
    if block >= spec.m() {
        return Err(Error::InvalidParameters(format!("no block {block}")));
    }
    let b = spec.block(block);
    if b.k == 0 {
        return Err(Error::InvalidParameters(format!(
            "block {block} has k = 0; its sequence is undefined"
        )));
    }
    let d = b.d();
    let range = spec.block_range(block);
    let mut values = vec![0; d];
    for &x in indices(r, axis) {
        if range.contains(&x) {
            values[(x - range.start) % d] += 1;
        }
    }
    Ok(BlockSequence { block, values })
}

pub fn is_balanced(r: &Rectangle, spec: &BlockSpec, block: usize, axis: Axis) -> Result<bool> {
    Ok(row_sequence(r, spec, block, axis)?.is_balanced())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Lower,
    Upper,
}

/// Which matrix a claim is about: the block diagonal matrix or its
/// complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Matrix,
    Complement,
}

/// Source of a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    /// Binary rank is at least real rank.
    RealRank,
    /// One rectangle per distinct nonzero row.
    DistinctRows,
    /// Blocks with at most half their entries nonzero per row have full
    /// binary rank, by the diagonal isolation set.
    Isolation,
    /// Complement partition merged from per-block witnesses; at most
    /// `rank + max d_i - 1` rectangles.
    MergeConstruction,
    /// Blocks `D_{2k,k}` and all-one `k x k` blocks with a small complement.
    GapFamily,
    /// Some block has `n_j = k_j + gcd(n_j, k_j)` with gcd above 1.
    NearGcdBlock,
    /// Every `k_i` divides `n_i` and some `n_i > k_i > 1`.
    DivisibleBlocks,
    /// Common `k`, a common divisor `d > 1` of the gcds with `rank > n / d`.
    CommonDivisor,
    /// Common `k` and all gcds equal to some `d > 1`, with some `n_i > d`.
    EqualGcd,
    /// Common `k` and `n - k` prime.
    PrimeExcess,
    /// A single circulant block.
    SingleCirculant,
    /// 2-regular matrices and their complements.
    TwoRegular,
    /// Complement of a 2-regular matrix with only even blocks.
    TwoRegularEven,
    /// Complement of a 2-regular matrix of odd dimension with few even
    /// blocks.
    TwoRegularOdd,
    /// Complement of a 2-regular matrix of binary rank `r >= 4` has binary
    /// rank at least `ceil(3r/4) + 1`.
    TwoRegularGap,
    /// Independent row or column sequences in a given partition.
    LinearIndependence,
    /// A rectangle of a given partition fails the divisibility condition.
    Divisibility,
    /// Exhaustive search.
    ExactSearch,
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant serializes");
        write!(f, "{}", s.as_str().unwrap_or("?"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundClaim {
    pub kind: BoundKind,
    pub side: Side,
    /// Absent when the claim does not apply.
    pub value: Option<usize>,
    pub theorem: TheoremId,
    pub applicable: bool,
    pub reason: String,
}

impl BoundClaim {
    fn yes(
        kind: BoundKind,
        side: Side,
        value: usize,
        theorem: TheoremId,
        reason: impl Into<String>,
    ) -> Self {
        BoundClaim {
            kind,
            side,
            value: Some(value),
            theorem,
            applicable: true,
            reason: reason.into(),
        }
    }

    fn no(kind: BoundKind, side: Side, theorem: TheoremId, reason: impl Into<String>) -> Self {
        BoundClaim {
            kind,
            side,
            value: None,
            theorem,
            applicable: false,
            reason: reason.into(),
        }
    }

    /// Lower and upper claim with the same value.
    fn exact(side: Side, value: usize, theorem: TheoremId, reason: &str) -> [Self; 2] {
        [
            Self::yes(BoundKind::Lower, side, value, theorem, reason),
            Self::yes(BoundKind::Upper, side, value, theorem, reason),
        ]
    }

    pub fn is_lower(&self) -> bool {
        self.kind == BoundKind::Lower
    }
}

/// Greedy count of rectangles whose block-`h` sequences extend the all-one
/// vector to a linearly independent set; the bound is the real rank plus
/// that count. `p` must partition the complement of the spec's matrix.
pub fn lin_independence_bound(
    p: &Partition,
    spec: &BlockSpec,
    h: usize,
    axis: Axis,
) -> Result<BoundClaim> {
    check_positive_k(spec)?;
    let rreal = spec_real_rank(spec, true)?;
    if h >= spec.m() {
        return Err(Error::InvalidParameters(format!("no block {h}")));
    }
    let d = spec.block(h).d();
    let mut basis: Vec<Vec<i64>> = vec![vec![1; d]];
    for r in &p.rects {
        let seq = row_sequence(r, spec, h, axis)?;
        let v: Vec<i64> = seq.values.iter().map(|&x| x as i64).collect();
        basis.push(v);
        if integer_rank(&basis) < basis.len() {
            basis.pop();
        }
    }
    let ell = basis.len() - 1;
    let axis_name = match axis {
        Axis::Rows => "row",
        Axis::Cols => "column",
    };
    Ok(BoundClaim::yes(
        BoundKind::Lower,
        Side::Complement,
        rreal + ell,
        TheoremId::LinearIndependence,
        format!("{ell} independent {axis_name} sequences in block {}", h + 1),
    ))
}

fn ratio(num: usize, den: usize) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `sum_i |X_i| / k_i` over the blocks, for the rows or columns of `r`.
fn weighted_size(r: &Rectangle, spec: &BlockSpec, axis: Axis) -> Result<Rational> {
    let n = spec.n();
    let mut total = Rational::zero();
    for &x in indices(r, axis) {
        if x >= n {
            return Err(Error::InvalidParameters(format!(
                "index {x} outside dimension {n}"
            )));
        }
        total += ratio(1, spec.block(spec.block_of(x)).k);
    }
    Ok(total)
}

/// `(S, N, K, g)` of the divisibility condition.
fn divisibility_terms(
    r: &Rectangle,
    spec: &BlockSpec,
) -> Result<(Rational, Rational, BigInt, BigInt)> {
    check_positive_k(spec)?;
    let s = weighted_size(r, spec, Axis::Rows)? * weighted_size(r, spec, Axis::Cols)?;
    let n = spec
        .blocks()
        .iter()
        .fold(Rational::zero(), |acc, b| acc + ratio(b.n, b.k))
        - Rational::one();
    let k_lcm = spec
        .blocks()
        .iter()
        .fold(BigInt::one(), |acc, b| acc.lcm(&BigInt::from(b.k)));
    let g = spec.blocks().iter().fold(BigInt::zero(), |acc, b| {
        acc.gcd(&(BigInt::from(b.d()) * &k_lcm / BigInt::from(b.k)))
    });
    Ok((s, n, k_lcm, g))
}

/// Whether `S` is *not* of the form `e * N` with `e = sum e_i d_i / k_i`,
/// `e_i` integers. Such a rectangle forces the partition to exceed the real
/// rank.
///
/// The values of `e` are exactly the multiples of `g / K` for
/// `K = lcm k_i` and `g = gcd_i(d_i K / k_i)`.
pub fn divides_condition(r: &Rectangle, spec: &BlockSpec) -> Result<bool> {
    let (s, n, k_lcm, g) = divisibility_terms(r, spec)?;
    if n.is_zero() {
        return Ok(!s.is_zero());
    }
    let scaled = s / n * Rational::new(k_lcm, g);
    Ok(!scaled.is_integer())
}

/// [`divides_condition`] by enumerating `e_i` in `[-range, range]` (or
/// `[0, range]`) instead of using the lattice generator.
pub fn divides_condition_brute_force(
    r: &Rectangle,
    spec: &BlockSpec,
    range: i64,
    nonnegative_only: bool,
) -> Result<bool> {
    let (s, n, k_lcm, _) = divisibility_terms(r, spec)?;
    if n.is_zero() {
        return Ok(!s.is_zero());
    }
    // with everything scaled by K the candidates e * K are integers
    let wanted = s * Rational::from_integer(k_lcm.clone()) / n;
    if !wanted.is_integer() {
        return Ok(true);
    }
    let wanted = wanted.to_integer();
    let lo = if nonnegative_only { 0 } else { -range };
    let mut reachable: HashSet<BigInt> = HashSet::from([BigInt::zero()]);
    for b in spec.blocks() {
        let step = &(BigInt::from(b.d()) * &k_lcm / BigInt::from(b.k));
        reachable = reachable
            .iter()
            .flat_map(|x| (lo..=range).map(move |e| x + BigInt::from(e) * step))
            .collect();
    }
    Ok(!reachable.contains(&wanted))
}

/// Best lower bound certified by a concrete partition of the complement:
/// independent sequences in any block, or a rectangle meeting the
/// divisibility condition.
pub fn partition_certificates(p: &Partition, spec: &BlockSpec) -> Result<Vec<BoundClaim>> {
    check_positive_k(spec)?;
    let rreal = spec_real_rank(spec, true)?;
    let mut claims = Vec::new();
    for h in 0..spec.m() {
        for axis in [Axis::Rows, Axis::Cols] {
            claims.push(lin_independence_bound(p, spec, h, axis)?);
        }
    }
    let mut hit = None;
    for (i, r) in p.rects.iter().enumerate() {
        if divides_condition(r, spec)? {
            hit = Some(i);
            break;
        }
    }
    claims.push(match hit {
        Some(i) => BoundClaim::yes(
            BoundKind::Lower,
            Side::Complement,
            rreal + 1,
            TheoremId::Divisibility,
            format!("rectangle {i} is not divisible"),
        ),
        None => BoundClaim::no(
            BoundKind::Lower,
            Side::Complement,
            TheoremId::Divisibility,
            "every rectangle meets the divisibility condition",
        ),
    });
    Ok(claims)
}

/// `sum over rectangles of (sum_i |A_i|/k_i)(sum_j |B_j|/k_j)`.
pub fn partition_weight(p: &Partition, spec: &BlockSpec) -> Result<Rational> {
    check_positive_k(spec)?;
    let mut total = Rational::zero();
    for r in &p.rects {
        total += weighted_size(r, spec, Axis::Rows)? * weighted_size(r, spec, Axis::Cols)?;
    }
    Ok(total)
}

/// `(sum n_i/k_i)(sum n_i/k_i - 1)`: the weight of every partition of the
/// complement.
pub fn partition_weight_target(spec: &BlockSpec) -> Result<Rational> {
    check_positive_k(spec)?;
    let s = spec
        .blocks()
        .iter()
        .fold(Rational::zero(), |acc, b| acc + ratio(b.n, b.k));
    Ok(&s * (&s - Rational::one()))
}

fn is_prime(x: usize) -> bool {
    x >= 2 && (2..).take_while(|d| d * d <= x).all(|d| !x.is_multiple_of(d))
}

/// `(k, r)` when the spec is the gap family for `k` and `r`.
fn gap_parameters(spec: &BlockSpec) -> Option<(usize, usize)> {
    let k = spec.common_k()?;
    if k < 2 {
        return None;
    }
    let long = spec.blocks().iter().filter(|b| b.n == 2 * k).count();
    let short = spec.blocks().iter().filter(|b| b.n == k).count();
    let r = 2 * k * long + short;
    (long >= 1 && gap_family(k, r).ok()? == *spec).then_some((k, r))
}

/// Every statement about the binary rank of the spec's matrix and its
/// complement, applicable or not.
pub fn theorem_bounds(spec: &BlockSpec) -> Result<Vec<BoundClaim>> {
    use BoundKind::{Lower, Upper};
    use Side::{Complement, Matrix};
    use TheoremId as T;

    let n = spec.n();
    let m = spec.m();
    let mut out = Vec::new();

    for (side, mat) in [
        (Matrix, build_block_diagonal(spec)),
        (Complement, complement(&build_block_diagonal(spec))),
    ] {
        out.push(BoundClaim::yes(
            Upper,
            side,
            crate::solver::distinct_nonzero_rows(&mat),
            T::DistinctRows,
            "one rectangle per distinct nonzero row",
        ));
        if !spec.all_k_positive() {
            out.push(BoundClaim::yes(
                Lower,
                side,
                real_rank(&mat),
                T::RealRank,
                "real rank by elimination",
            ));
        }
    }

    if !spec.all_k_positive() {
        for t in [
            T::MergeConstruction,
            T::NearGcdBlock,
            T::DivisibleBlocks,
            T::CommonDivisor,
            T::EqualGcd,
            T::PrimeExcess,
            T::SingleCirculant,
            T::TwoRegular,
        ] {
            out.push(BoundClaim::no(Lower, Complement, t, "needs every k_i > 0"));
        }
        return Ok(out);
    }

    let rreal_m = spec_real_rank(spec, false)?;
    let rreal = spec_real_rank(spec, true)?;
    out.push(BoundClaim::yes(
        Lower,
        Matrix,
        rreal_m,
        T::RealRank,
        "closed-form real rank",
    ));
    out.push(BoundClaim::yes(
        Lower,
        Complement,
        rreal,
        T::RealRank,
        "closed-form real rank",
    ));

    // matrix side
    let isolated = spec
        .blocks()
        .iter()
        .all(|b| b.k == b.n || 2 * b.k <= b.n + 1);
    if isolated {
        let v = spec
            .blocks()
            .iter()
            .map(|b| if b.k == b.n { 1 } else { b.n })
            .sum();
        out.extend(BoundClaim::exact(
            Matrix,
            v,
            T::Isolation,
            "each block is full or has k_i <= ceil(n_i/2); blocks add",
        ));
    } else {
        out.push(BoundClaim::no(
            Lower,
            Matrix,
            T::Isolation,
            "some block has k_i > ceil(n_i/2)",
        ));
    }

    let single = spec.block(0);
    for side in [Matrix, Complement] {
        if m == 1 && single.n > single.k {
            out.push(BoundClaim::yes(
                Lower,
                side,
                (rreal + 1).min(single.n),
                T::SingleCirculant,
                "single circulant block with n > k > 0",
            ));
        } else {
            let why = if m == 1 {
                "full block"
            } else {
                "more than one block"
            };
            out.push(BoundClaim::no(Lower, side, T::SingleCirculant, why));
        }
    }

    // complement side
    let merged = complement_partition(spec)?;
    out.push(BoundClaim::yes(
        Upper,
        Complement,
        merged.len(),
        T::MergeConstruction,
        format!(
            "verified partition; at most {} = rank + max d_i - 1",
            rreal + spec.max_d_hat() - 1
        ),
    ));

    match gap_parameters(spec) {
        Some((k, r)) => {
            let v = ((k + 1) * r).div_ceil(2 * k) + 2 * k - 3;
            out.push(BoundClaim::yes(
                Upper,
                Complement,
                v,
                T::GapFamily,
                format!("k = {k}, r = {r}"),
            ));
            out.extend(BoundClaim::exact(
                Matrix,
                r,
                T::GapFamily,
                "blocks D_{2k,k} and all-one k x k",
            ));
        }
        None => out.push(BoundClaim::no(
            Upper,
            Complement,
            T::GapFamily,
            "not of the gap family shape",
        )),
    }

    let plus_one = |ok: bool, t: TheoremId, yes: &str, no: &str| {
        if ok {
            BoundClaim::yes(Lower, Complement, rreal + 1, t, yes)
        } else {
            BoundClaim::no(Lower, Complement, t, no)
        }
    };

    let near = spec
        .blocks()
        .iter()
        .position(|b| b.d() > 1 && b.n == b.k + b.d());
    out.push(plus_one(
        near.is_some(),
        T::NearGcdBlock,
        &format!(
            "block {} has n = k + gcd(n, k), gcd > 1",
            near.map_or(0, |j| j + 1)
        ),
        "no block with n_j = k_j + gcd(n_j, k_j) and gcd > 1",
    ));

    let divisible = spec.blocks().iter().all(|b| b.n % b.k == 0);
    let proper = spec.blocks().iter().any(|b| b.n > b.k && b.k > 1);
    out.push(plus_one(
        divisible && proper,
        T::DivisibleBlocks,
        "every k_i divides n_i and some n_i > k_i > 1",
        if divisible {
            "no block with n_i > k_i > 1"
        } else {
            "some k_i does not divide n_i"
        },
    ));

    match spec.common_k() {
        None => {
            for t in [T::CommonDivisor, T::EqualGcd, T::PrimeExcess] {
                out.push(BoundClaim::no(
                    Lower,
                    Complement,
                    t,
                    "blocks do not share k",
                ));
            }
        }
        Some(k) => {
            let g = spec.blocks().iter().fold(0, |acc, b| gcd(acc, b.d()));
            out.push(plus_one(
                g > 1 && rreal * g > n,
                T::CommonDivisor,
                &format!("d = {g} divides every gcd and rank > n/d"),
                &format!("largest common divisor of the gcds is {g}; need d > 1 and rank > n/d"),
            ));
            let d0 = spec.block(0).d();
            let equal = spec.blocks().iter().all(|b| b.d() == d0);
            out.push(plus_one(
                equal && d0 > 1 && spec.blocks().iter().any(|b| b.n > d0),
                T::EqualGcd,
                &format!("every gcd equals {d0} and some n_i > {d0}"),
                "gcds differ, equal 1, or every n_i equals the gcd",
            ));
            // the counting step needs distinct rows, which a full block of
            // size 2 or more destroys
            let repeated = spec.blocks().iter().any(|b| b.n == k && k >= 2);
            if is_prime(n - k) && !repeated {
                out.push(BoundClaim::yes(
                    Lower,
                    Complement,
                    (rreal + 1).min(n),
                    T::PrimeExcess,
                    format!("n - k = {} is prime and the rows are distinct", n - k),
                ));
            } else {
                let why = if repeated {
                    "a full block repeats rows of the complement".to_string()
                } else {
                    format!("n - k = {} is not prime", n - k)
                };
                out.push(BoundClaim::no(Lower, Complement, T::PrimeExcess, why));
            }
        }
    }

    let two_regular = spec.common_k() == Some(2) && !spec.is_all_one();
    if two_regular {
        let m2 = spec.blocks().iter().filter(|b| b.n == 2).count();
        let m_even = spec.blocks().iter().filter(|b| b.n % 2 == 0).count();
        out.extend(BoundClaim::exact(
            Matrix,
            n - m2,
            T::TwoRegular,
            "2-regular; n - m_2",
        ));
        out.push(BoundClaim::yes(
            Lower,
            Complement,
            n - m_even,
            T::TwoRegular,
            "2-regular; n - m_even",
        ));
        out.push(BoundClaim::yes(
            Upper,
            Complement,
            n - m_even + 1,
            T::TwoRegular,
            "2-regular; n - m_even + 1",
        ));

        let all_even = m_even == m;
        if all_even && spec.blocks().iter().any(|b| b.n > 2) {
            out.extend(BoundClaim::exact(
                Complement,
                n - m + 1,
                T::TwoRegularEven,
                "even blocks, one above 2",
            ));
        } else {
            out.push(BoundClaim::no(
                Lower,
                Complement,
                T::TwoRegularEven,
                "needs all blocks even and one above 2",
            ));
        }

        let n_odd: usize = spec
            .blocks()
            .iter()
            .filter(|b| b.n % 2 == 1)
            .map(|b| b.n)
            .sum();
        if n % 2 == 1 && n + 2 * n_odd > 2 * m_even + n_odd * n_odd {
            out.extend(BoundClaim::exact(
                Complement,
                n - m_even + 1,
                T::TwoRegularOdd,
                "n odd and n > 2 m_even + n_odd (n_odd - 2)",
            ));
        } else {
            out.push(BoundClaim::no(
                Lower,
                Complement,
                T::TwoRegularOdd,
                "needs n odd and n > 2 m_even + n_odd (n_odd - 2)",
            ));
        }

        let r = n - m2;
        if r >= 4 {
            out.push(BoundClaim::yes(
                Lower,
                Complement,
                (3 * r).div_ceil(4) + 1,
                T::TwoRegularGap,
                format!("binary rank of the matrix is r = {r} >= 4"),
            ));
        } else {
            out.push(BoundClaim::no(
                Lower,
                Complement,
                T::TwoRegularGap,
                format!("r = {r} < 4"),
            ));
        }
    } else {
        for t in [
            T::TwoRegular,
            T::TwoRegularEven,
            T::TwoRegularOdd,
            T::TwoRegularGap,
        ] {
            out.push(BoundClaim::no(
                Lower,
                Complement,
                t,
                "not 2-regular, or the all-one 2 x 2 matrix",
            ));
        }
    }
    Ok(out)
}

/// Real rank, all claims about one side, and the tightest bracket they
/// give.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    pub spec: BlockSpec,
    pub complemented: bool,
    pub real_rank: usize,
    pub claims: Vec<BoundClaim>,
    pub exact: Option<usize>,
    pub lower: usize,
    pub upper: usize,
}

impl RankReport {
    fn from_claims(
        spec: &BlockSpec,
        complemented: bool,
        real_rank: usize,
        claims: Vec<BoundClaim>,
    ) -> Self {
        let values = |kind: BoundKind| {
            claims
                .iter()
                .filter(move |c| c.applicable && c.kind == kind)
                .filter_map(|c| c.value)
        };
        let lower = values(BoundKind::Lower).max().unwrap_or(0);
        let upper = values(BoundKind::Upper).min().unwrap_or(usize::MAX);
        RankReport {
            spec: spec.clone(),
            complemented,
            real_rank,
            exact: (lower == upper).then_some(lower),
            lower,
            upper,
            claims,
        }
    }

    /// Lower claims never exceed upper claims.
    pub fn is_consistent(&self) -> bool {
        self.lower <= self.upper
    }
}

/// The matrix (or complement) of a spec.
pub fn spec_matrix(spec: &BlockSpec, complemented: bool) -> Matrix01 {
    let m = build_block_diagonal(spec);
    if complemented {
        complement(&m)
    } else {
        m
    }
}

/// Aggregates the closed-form claims for one side.
pub fn best_bounds(spec: &BlockSpec, complemented: bool) -> Result<RankReport> {
    let side = if complemented {
        Side::Complement
    } else {
        Side::Matrix
    };
    let claims: Vec<BoundClaim> = theorem_bounds(spec)?
        .into_iter()
        .filter(|c| c.side == side)
        .collect();
    let rreal = match spec_real_rank(spec, complemented) {
        Ok(r) => r,
        Err(_) => real_rank(&spec_matrix(spec, complemented)),
    };
    Ok(RankReport::from_claims(spec, complemented, rreal, claims))
}

/// [`best_bounds`] plus an exhaustive search when a configuration is given.
/// The complement search starts from the merged partition.
pub fn certify(
    spec: &BlockSpec,
    complemented: bool,
    search: Option<&SearchConfig>,
) -> Result<RankReport> {
    let report = best_bounds(spec, complemented)?;
    let Some(cfg) = search else {
        return Ok(report);
    };
    let side = if complemented {
        Side::Complement
    } else {
        Side::Matrix
    };
    let mat = spec_matrix(spec, complemented);
    let mut cfg = cfg.clone();
    if complemented && spec.all_k_positive() && cfg.seed_partition.is_none() {
        cfg.seed_partition = Some(complement_partition(spec)?);
    }
    let out = binary_rank_exact(&mat, &cfg)?;
    let mut claims = report.claims;
    let why = if out.exact.is_some() {
        "search completed"
    } else {
        "search stopped early"
    };
    claims.push(BoundClaim::yes(
        BoundKind::Lower,
        side,
        out.lower,
        TheoremId::ExactSearch,
        why,
    ));
    claims.push(BoundClaim::yes(
        BoundKind::Upper,
        side,
        out.upper,
        TheoremId::ExactSearch,
        why,
    ));
    Ok(RankReport::from_claims(
        spec,
        complemented,
        report.real_rank,
        claims,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::dinm_witness;

    fn spec(s: &str) -> BlockSpec {
        BlockSpec::parse(s).unwrap()
    }

    fn applicable(claims: &[BoundClaim], t: TheoremId, side: Side) -> Vec<&BoundClaim> {
        claims
            .iter()
            .filter(|c| c.theorem == t && c.side == side && c.applicable)
            .collect()
    }

    #[test]
    fn sequences() {
        let s = spec("2;4");
        let r = Rectangle::new(vec![0, 2], vec![1]);
        assert_eq!(
            row_sequence(&r, &s, 0, Axis::Rows).unwrap().values,
            vec![2, 0]
        );
        assert!(!is_balanced(&r, &s, 0, Axis::Rows).unwrap());
        let s2 = spec("2;4,4");
        let r = Rectangle::new(vec![4, 5], vec![0]);
        assert_eq!(
            row_sequence(&r, &s2, 0, Axis::Rows).unwrap().values,
            vec![0, 0]
        );
        assert!(is_balanced(&r, &s2, 1, Axis::Rows).unwrap());
        let w = dinm_witness(9, 3).unwrap();
        let r = Rectangle::new(w.a[0].clone(), w.b[0].clone());
        let s = spec("3;9");
        assert_eq!(
            row_sequence(&r, &s, 0, Axis::Rows).unwrap().values,
            vec![2, 0, 0]
        );
        let s = spec("2;5");
        assert!(is_balanced(&Rectangle::new(vec![0, 3], vec![1]), &s, 0, Axis::Cols).unwrap());
        assert!(row_sequence(&r, &spec("0;3"), 0, Axis::Rows).is_err());
    }

    #[test]
    fn divisibility_examples() {
        let s = spec("2;4,4");
        let r = Rectangle::new(vec![0, 1, 2], vec![4, 5]);
        assert!(divides_condition(&r, &s).unwrap());
        assert!(divides_condition_brute_force(&r, &s, 10, false).unwrap());
        // S = N: e = 1 needs g = 1
        let s = spec("2;4,3");
        let r = Rectangle::new(vec![0, 1, 2, 3, 4], vec![5]);
        assert_eq!(
            divides_condition(&r, &s).unwrap(),
            divides_condition_brute_force(&r, &s, 20, false).unwrap()
        );
        // N = 0: a single full block
        let s = spec("3;3");
        assert!(!divides_condition(&Rectangle::new(vec![], vec![]), &s).unwrap());
        assert!(divides_condition(&Rectangle::new(vec![0], vec![1]), &s).unwrap());
    }

    #[test]
    fn weight_of_merged_partitions() {
        for s in ["2;4,4", "6;9,9", "1,2;3,5", "3;3,6"] {
            let s = spec(s);
            let p = complement_partition(&s).unwrap();
            assert_eq!(
                partition_weight(&p, &s).unwrap(),
                partition_weight_target(&s).unwrap()
            );
        }
    }

    #[test]
    fn lin_independence_on_merged_partition() {
        let s = spec("2;4,4");
        let p = complement_partition(&s).unwrap();
        for h in 0..2 {
            for axis in [Axis::Rows, Axis::Cols] {
                let c = lin_independence_bound(&p, &s, h, axis).unwrap();
                assert!(c.value.unwrap() <= p.len());
            }
        }
    }

    #[test]
    fn claims_for_named_specs() {
        let c = theorem_bounds(&spec("6;9,9")).unwrap();
        assert_eq!(
            applicable(&c, TheoremId::EqualGcd, Side::Complement)[0].value,
            Some(15)
        );
        let r = best_bounds(&spec("6;9,9"), true).unwrap();
        assert_eq!((r.real_rank, r.lower, r.upper, r.exact), (14, 15, 16, None));

        let r = best_bounds(&spec("2;4,4"), true).unwrap();
        assert_eq!((r.real_rank, r.lower, r.upper, r.exact), (6, 7, 7, Some(7)));
        assert!(!applicable(&r.claims, TheoremId::DivisibleBlocks, Side::Complement).is_empty());

        let r = best_bounds(&spec("3;7"), true).unwrap();
        assert_eq!(r.exact, Some(7));
        let r = best_bounds(&spec("1;5"), false).unwrap();
        assert_eq!(r.exact, Some(5));
        let r = best_bounds(&spec("1;5"), true).unwrap();
        assert_eq!(r.exact, Some(5));
    }

    #[test]
    fn predicates_respect_hypotheses() {
        // n_j = k_j + d_j with d_j = 1 does not fire
        let c = theorem_bounds(&spec("2;3")).unwrap();
        assert!(applicable(&c, TheoremId::NearGcdBlock, Side::Complement).is_empty());
        // zero k stops every complement statement
        let c = theorem_bounds(&spec("0;2")).unwrap();
        assert!(applicable(&c, TheoremId::NearGcdBlock, Side::Complement).is_empty());
        let r = best_bounds(&spec("0;2"), true).unwrap();
        assert_eq!((r.lower, r.upper), (1, 1));
        // the all-one 2 x 2 matrix is excluded from the 2-regular statements
        let c = theorem_bounds(&spec("2;2")).unwrap();
        assert!(applicable(&c, TheoremId::TwoRegular, Side::Matrix).is_empty());
        let r = best_bounds(&spec("2;2"), true).unwrap();
        assert_eq!((r.lower, r.upper), (0, 0));
    }

    #[test]
    fn prime_excess_needs_distinct_rows() {
        // complement of two all-one 2 x 2 blocks has binary rank 2
        let c = theorem_bounds(&spec("2;2,2")).unwrap();
        assert!(applicable(&c, TheoremId::PrimeExcess, Side::Complement).is_empty());
        let c = theorem_bounds(&spec("2;3,2")).unwrap();
        assert!(applicable(&c, TheoremId::PrimeExcess, Side::Complement).is_empty());
        let c = theorem_bounds(&spec("2;4,3")).unwrap();
        assert_eq!(
            applicable(&c, TheoremId::PrimeExcess, Side::Complement)[0].value,
            Some(7)
        );
    }

    #[test]
    fn gap_family_claims() {
        let c = theorem_bounds(&spec("2;4,4")).unwrap();
        assert_eq!(
            applicable(&c, TheoremId::GapFamily, Side::Complement)[0].value,
            Some(7)
        );
        assert_eq!(
            applicable(&c, TheoremId::GapFamily, Side::Matrix)[0].value,
            Some(8)
        );
        let c = theorem_bounds(&spec("2;4,2,4")).unwrap();
        assert!(applicable(&c, TheoremId::GapFamily, Side::Complement).is_empty());
    }

    #[test]
    fn certify_with_search() {
        let r = certify(&spec("2;4,4"), true, Some(&SearchConfig::default())).unwrap();
        assert_eq!(r.exact, Some(7));
        let r = certify(&spec("2;3,3"), true, Some(&SearchConfig::default())).unwrap();
        assert!(r.is_consistent());
        assert!(r.exact == Some(6) || r.exact == Some(7));
    }

    #[test]
    fn theorem_names_are_descriptive() {
        assert_eq!(TheoremId::TwoRegularGap.to_string(), "two-regular-gap");
        assert_eq!(
            serde_json::to_string(&TheoremId::MergeConstruction).unwrap(),
            "\"merge-construction\""
        );
    }
}
