//! `check-theorems`: every closed-form claim over a family of specs, judged
//! against a solver bracket.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use circrank_core::certificates::spec_matrix;
use circrank_core::{
    best_bounds, binary_rank_exact, complement_partition, BlockSpec, BoundClaim, BoundKind,
    SearchConfig,
};
use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::{input_error, Common, Failure, Outcome};

/// Solver budget per instance when --budget is not given.
const DEFAULT_BUDGET_SECS: f64 = 5.0;

#[derive(Args)]
pub struct GridArgs {
    #[arg(long, value_enum, default_value_t = Family::TwoRegular)]
    family: Family,
    /// Largest block size.
    #[arg(long, default_value_t = 6)]
    max_n: usize,
    /// Ones per row for the common-k family.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Most blocks per spec.
    #[arg(long, default_value_t = 2)]
    max_m: usize,
    #[arg(long, value_enum, default_value_t = SideArg::Complement)]
    side: SideArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// k = 2, block sizes at least 2, total size at most --max-n.
    #[value(name = "2-regular")]
    TwoRegular,
    /// k = --k for every block.
    CommonK,
    /// Any 1 <= k <= n <= --max-n per block.
    General,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SideArg {
    Matrix,
    Complement,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Verdict {
    /// The search finished and the claim holds.
    Confirmed,
    /// The claim is consistent with an unfinished search.
    Unrefuted,
    Violated,
}

#[derive(Serialize)]
struct ClaimCheck {
    #[serde(flatten)]
    claim: BoundClaim,
    verdict: Verdict,
}

#[derive(Serialize)]
struct Instance {
    spec: String,
    complemented: bool,
    real_rank: usize,
    exact: Option<usize>,
    lower: usize,
    upper: usize,
    /// Size of the merged partition (empty rectangles dropped), complement
    /// side only.
    merge_size: Option<usize>,
    /// Whether the merged partition is minimum; absent when unknown.
    merge_tight: Option<bool>,
    claims: Vec<ClaimCheck>,
}

#[derive(Serialize)]
struct Summary {
    instances: usize,
    claims: usize,
    confirmed: usize,
    unrefuted: usize,
    violated: usize,
    merge_tight: usize,
    merge_loose: usize,
}

#[derive(Serialize)]
struct GridReport {
    summary: Summary,
    instances: Vec<Instance>,
}

/// Multisets (non-increasing sequences) of up to `max_m` items from `items`,
/// which must be sorted in decreasing order.
fn multisets<T: Clone>(items: &[T], max_m: usize) -> Vec<Vec<T>> {
    fn go<T: Clone>(
        items: &[T],
        from: usize,
        left: usize,
        cur: &mut Vec<T>,
        out: &mut Vec<Vec<T>>,
    ) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if left == 0 {
            return;
        }
        for i in from..items.len() {
            cur.push(items[i].clone());
            go(items, i, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, 0, max_m, &mut Vec::new(), &mut out);
    out
}

fn family_specs(args: &GridArgs) -> Result<Vec<BlockSpec>, Failure> {
    let bad = |e| input_error("check-theorems", e);
    let mut specs = Vec::new();
    match args.family {
        Family::TwoRegular => {
            let sizes: Vec<usize> = (2..=args.max_n).rev().collect();
            for ms in multisets(&sizes, args.max_m) {
                if ms.iter().sum::<usize>() <= args.max_n {
                    specs.push(BlockSpec::common(2, &ms).map_err(bad)?);
                }
            }
        }
        Family::CommonK => {
            if args.k == 0 || args.k > args.max_n {
                return Err(Failure::Input(format!(
                    "check-theorems: --k must be in 1..={}",
                    args.max_n
                )));
            }
            let sizes: Vec<usize> = (args.k..=args.max_n).rev().collect();
            for ms in multisets(&sizes, args.max_m) {
                specs.push(BlockSpec::common(args.k, &ms).map_err(bad)?);
            }
        }
        Family::General => {
            let mut pairs = Vec::new();
            for n in (1..=args.max_n).rev() {
                for k in (1..=n).rev() {
                    pairs.push((n, k));
                }
            }
            for ms in multisets(&pairs, args.max_m) {
                specs.push(BlockSpec::from_pairs(&ms).map_err(bad)?);
            }
        }
    }
    Ok(specs)
}

fn judge(claim: &BoundClaim, exact: Option<usize>, lower: usize, upper: usize) -> Verdict {
    let v = claim.value.unwrap_or(0);
    let holds = match claim.kind {
        BoundKind::Lower => v <= upper,
        BoundKind::Upper => v >= lower,
    };
    match (holds, exact) {
        (false, _) => Verdict::Violated,
        (true, Some(_)) => Verdict::Confirmed,
        (true, None) => Verdict::Unrefuted,
    }
}

fn check_instance(
    spec: &BlockSpec,
    complemented: bool,
    cfg: &SearchConfig,
) -> Result<Instance, Failure> {
    let bad = |e| input_error(&spec.to_string(), e);
    let report = best_bounds(spec, complemented).map_err(bad)?;
    let merged = complemented && spec.all_k_positive();
    let mut cfg = cfg.clone();
    let mut merge = None;
    if merged {
        let p = complement_partition(spec).map_err(bad)?;
        merge = Some(p.len());
        cfg.seed_partition = Some(p);
    }
    let out = binary_rank_exact(&spec_matrix(spec, complemented), &cfg).map_err(bad)?;
    let merge_tight = merge.and_then(|s| match out.exact {
        Some(e) => Some(s == e),
        None => (s > out.upper).then_some(false),
    });
    let claims = report
        .claims
        .into_iter()
        .filter(|c| c.applicable)
        .map(|claim| {
            let verdict = judge(&claim, out.exact, out.lower, out.upper);
            ClaimCheck { claim, verdict }
        })
        .collect();
    Ok(Instance {
        spec: spec.to_string(),
        complemented,
        real_rank: report.real_rank,
        exact: out.exact,
        lower: out.lower,
        upper: out.upper,
        merge_size: merge,
        merge_tight,
        claims,
    })
}

fn report_text(r: &GridReport) -> String {
    let mut s = String::new();
    for inst in &r.instances {
        let rank = match inst.exact {
            Some(e) => e.to_string(),
            None => format!("[{}, {}]", inst.lower, inst.upper),
        };
        let side = if inst.complemented {
            "complement"
        } else {
            "matrix"
        };
        let _ = write!(
            s,
            "{} {side}: real {} binary {rank}",
            inst.spec, inst.real_rank
        );
        if let Some(m) = inst.merge_size {
            let t = match inst.merge_tight {
                Some(true) => "tight",
                Some(false) => "loose",
                None => "unknown",
            };
            let _ = write!(s, " merge {m} ({t})");
        }
        s.push('\n');
        for c in inst
            .claims
            .iter()
            .filter(|c| c.verdict == Verdict::Violated)
        {
            let _ = writeln!(
                s,
                "  VIOLATED {} {:?} {:?}",
                c.claim.theorem, c.claim.kind, c.claim.value
            );
        }
    }
    let m = &r.summary;
    let _ = writeln!(
        s,
        "{} instances, {} claims: {} confirmed, {} unrefuted, {} violated; merge tight {} loose {}",
        m.instances, m.claims, m.confirmed, m.unrefuted, m.violated, m.merge_tight, m.merge_loose
    );
    s
}

pub fn run(c: &Common, args: &GridArgs) -> Outcome {
    let mut cfg = c.search_config();
    cfg.time_budget = Some(Duration::from_secs_f64(
        c.budget.unwrap_or(DEFAULT_BUDGET_SECS),
    ));
    let sides: &[bool] = match args.side {
        SideArg::Matrix => &[false],
        SideArg::Complement => &[true],
        SideArg::Both => &[false, true],
    };
    let mut instances = Vec::new();
    for spec in family_specs(args)? {
        for &complemented in sides {
            instances.push(check_instance(&spec, complemented, &cfg)?);
        }
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for inst in &instances {
        for cl in &inst.claims {
            let key = match cl.verdict {
                Verdict::Confirmed => "confirmed",
                Verdict::Unrefuted => "unrefuted",
                Verdict::Violated => "violated",
            };
            *counts.entry(key).or_default() += 1;
        }
    }
    let get = |k| counts.get(k).copied().unwrap_or(0);
    let summary = Summary {
        instances: instances.len(),
        claims: instances.iter().map(|i| i.claims.len()).sum(),
        confirmed: get("confirmed"),
        unrefuted: get("unrefuted"),
        violated: get("violated"),
        merge_tight: instances
            .iter()
            .filter(|i| i.merge_tight == Some(true))
            .count(),
        merge_loose: instances
            .iter()
            .filter(|i| i.merge_tight == Some(false))
            .count(),
    };
    let violated = summary.violated;
    let report = GridReport { summary, instances };
    c.emit_json(&report, || report_text(&report))?;
    if violated > 0 {
        return Err(Failure::Check(format!(
            "{violated} claims contradict the solver"
        )));
    }
    Ok(())
}
