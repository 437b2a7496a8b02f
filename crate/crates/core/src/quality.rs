//! Quality certification for digital nets, three independent ways:
//! the row linear-independence definition, the dual-net weight criterion,
//! and geometric equidistribution counts. Also NRT weights, dual-net
//! enumeration, and the omega counting bound.
//!
//! A net defined by s x n matrices is "order sigma (v, n, d)" when every
//! admissible row selection whose weight (the sum, per coordinate, of the
//! min(eta_i, sigma) largest selected row indices) is at most sigma*n - v
//! is linearly independent over F_b. Equivalently, every nonzero dual
//! vector t has NRT weight rho_sigma(t) > sigma*n - v. Minimal v is the
//! certificate; smaller is stronger.

use crate::field::{FieldMatrix, PrimeField};
use crate::net::{GeneratingSet, PointSet};
use serde::Serialize;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QualityError {
    #[error("enumeration budget exceeded: needs {needed} elements, budget {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("instance too large: {0} row-selection tests exceed the budget")]
    InstanceTooLarge(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Hard cap on enumeration work. Exceeding it is an error, never a silent
/// approximation.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub max_elements: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self { max_elements: 1 << 24 }
    }
}

impl Budget {
    pub fn new(max_elements: u64) -> Self {
        Self { max_elements }
    }
}

/// NRT weight of order sigma: the sum of the sigma most significant
/// nonzero digit positions (1-based) of a; rho_sigma(0) = 0.
pub fn nrt_weight(a: u64, sigma: u32, b: u32) -> u32 {
    let mut positions = Vec::new();
    let mut x = a;
    let mut pos = 1u32;
    while x > 0 {
        if x % b as u64 != 0 {
            positions.push(pos);
        }
        x /= b as u64;
        pos += 1;
    }
    let take = positions.len().min(sigma as usize);
    positions.iter().rev().take(take).sum()
}

/// Vector NRT weight: the sum over coordinates.
pub fn nrt_weight_vec(t: &[u64], sigma: u32, b: u32) -> u32 {
    t.iter().map(|&a| nrt_weight(a, sigma, b)).sum()
}

/// t with its most significant digit removed; 0 maps to 0.
pub fn t_prime(a: u64, b: u32) -> u64 {
    if a == 0 {
        return 0;
    }
    let mut pow = 1u64;
    while pow * b as u64 <= a {
        pow *= b as u64;
    }
    a - (a / pow) * pow
}

/// A member of the dual net with cached order-1 and order-2 weights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualVector {
    pub t: Vec<u64>,
    pub rho1: u32,
    pub rho2: u32,
}

impl DualVector {
    fn new(t: Vec<u64>, b: u32) -> Self {
        let rho1 = nrt_weight_vec(&t, 1, b);
        let rho2 = nrt_weight_vec(&t, 2, b);
        Self { t, rho1, rho2 }
    }

    pub fn is_zero(&self) -> bool {
        self.t.iter().all(|&x| x == 0)
    }

    /// Per-coordinate digit columns (tau_0 .. tau_(box-1)), least
    /// significant first.
    pub fn digit_vectors(&self, b: u32, digit_box: usize) -> Vec<Vec<u32>> {
        self.t
            .iter()
            .map(|&a| {
                let mut x = a;
                (0..digit_box)
                    .map(|_| {
                        let digit = (x % b as u64) as u32;
                        x /= b as u64;
                        digit
                    })
                    .collect()
            })
            .collect()
    }
}

/// The stacked map F_b^(d*box) -> F_b^n whose kernel is the dual net:
/// column (i*box + p) is row p of C_i.
fn stacked_transpose(g: &GeneratingSet, digit_box: usize) -> FieldMatrix {
    let n = g.n();
    let mut m = FieldMatrix::zero(g.field(), n, g.d() * digit_box);
    for i in 0..g.d() {
        for p in 0..digit_box {
            for r in 0..n {
                m.set(r, i * digit_box + p, g.matrix(i).get(p, r));
            }
        }
    }
    m
}

/// All dual vectors t with t_i < b^digit_box, sorted lexicographically.
/// Contains t = 0. The count is b^(d*box - rank) exactly.
pub fn enumerate_dual(
    g: &GeneratingSet,
    digit_box: usize,
    budget: &Budget,
) -> Result<Vec<DualVector>, QualityError> {
    if digit_box == 0 || digit_box > g.s() {
        return Err(QualityError::InvalidArgument(format!(
            "digit_box must be in 1..=s={}, got {digit_box}",
            g.s()
        )));
    }
    let b = g.b();
    let stacked = stacked_transpose(g, digit_box);
    let basis = stacked.kernel_basis();
    let k = basis.len() as u32;
    let count = (b as u64)
        .checked_pow(k)
        .filter(|&c| c <= budget.max_elements)
        .ok_or(QualityError::BudgetExceeded {
            needed: k as u64,
            budget: budget.max_elements,
        })?;

    let cols = g.d() * digit_box;
    let field = g.field();
    let mut out = Vec::with_capacity(count as usize);
    let mut current = vec![0u32; cols];
    // depth-first over kernel coefficients; adding a basis vector b times
    // returns the running vector to its previous state
    fn walk(
        level: usize,
        basis: &[Vec<u32>],
        field: PrimeField,
        current: &mut Vec<u32>,
        emit: &mut impl FnMut(&[u32]),
    ) {
        if level == basis.len() {
            emit(current);
            return;
        }
        for _ in 0..field.modulus() {
            walk(level + 1, basis, field, current, emit);
            for (dst, &src) in current.iter_mut().zip(&basis[level]) {
                *dst = field.add(*dst, src);
            }
        }
    }
    {
        let d = g.d();
        let mut emit = |v: &[u32]| {
            let t: Vec<u64> = (0..d)
                .map(|i| {
                    v[i * digit_box..(i + 1) * digit_box]
                        .iter()
                        .rev()
                        .fold(0u64, |acc, &digit| acc * b as u64 + digit as u64)
                })
                .collect();
            out.push(t);
        };
        walk(0, &basis, field, &mut current, &mut emit);
    }
    out.sort_unstable();
    Ok(out.into_iter().map(|t| DualVector::new(t, b)).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct QualityCertificate {
    pub sigma: u32,
    pub v: usize,
    pub method: String,
    pub witness: Option<serde_json::Value>,
}

/// One canonical row selection for a single coordinate: the (at most
/// sigma) weight-carrying top rows, optionally with every row below them
/// included for free.
#[derive(Debug, Clone)]
struct SelOption {
    weight: usize,
    rows: Vec<usize>, // 0-based row indices
}

fn selection_options(s: usize, sigma: u32, max_weight: usize) -> Vec<SelOption> {
    let mut out = Vec::new();
    // descending top tuples of size 1..=sigma
    fn extend(
        s: usize,
        sigma: u32,
        max_weight: usize,
        tops: &mut Vec<usize>, // 1-based, strictly decreasing
        weight: usize,
        out: &mut Vec<SelOption>,
    ) {
        let k = tops.len();
        if k > 0 {
            let rows: Vec<usize> = tops.iter().map(|&t| t - 1).collect();
            out.push(SelOption { weight, rows: rows.clone() });
            let last = *tops.last().unwrap();
            if k == sigma as usize && last >= 2 {
                // eta > sigma: rows below the sigma-th largest are free
                let mut filled = rows;
                filled.extend(0..last - 1);
                out.push(SelOption { weight, rows: filled });
            }
        }
        if k == sigma as usize {
            return;
        }
        let hi = tops.last().map_or(s, |&t| t - 1);
        for next in 1..=hi {
            if weight + next > max_weight {
                break;
            }
            tops.push(next);
            extend(s, sigma, max_weight, tops, weight + next, out);
            tops.pop();
        }
    }
    let mut tops = Vec::new();
    extend(s, sigma, max_weight, &mut tops, 0, &mut out);
    out.sort_by_key(|o| o.weight);
    out
}

/// Search for the minimal-weight linearly dependent canonical selection
/// with total weight <= max_weight. Returns (weight, per-coordinate rows).
fn min_dependent_weight(
    g: &GeneratingSet,
    sigma: u32,
    max_weight: usize,
    budget: &Budget,
) -> Result<Option<(usize, Vec<Vec<usize>>)>, QualityError> {
    let opts = selection_options(g.s(), sigma, max_weight);
    let field = g.field();
    let mut tests = 0u64;

    // options grouped by weight for the exact-weight scan
    let mut by_weight: Vec<Vec<&SelOption>> = vec![Vec::new(); max_weight + 1];
    for o in &opts {
        by_weight[o.weight].push(o);
    }

    fn assemble<'a>(
        g: &'a GeneratingSet,
        by_weight: &[Vec<&'a SelOption>],
        coord: usize,
        remaining: usize,
        exact: bool,
        chosen: &mut Vec<Option<&'a SelOption>>,
        tests: &mut u64,
        budget: &Budget,
        hit: &mut Option<Vec<Vec<usize>>>,
    ) -> Result<bool, QualityError> {
        if coord == g.d() {
            if exact && remaining != 0 {
                return Ok(false);
            }
            if chosen.iter().all(|c| c.is_none()) {
                return Ok(false);
            }
            *tests += 1;
            if *tests > budget.max_elements {
                return Err(QualityError::InstanceTooLarge(*tests));
            }
            let mut rows: Vec<&[u32]> = Vec::new();
            for (i, c) in chosen.iter().enumerate() {
                if let Some(opt) = c {
                    for &r in &opt.rows {
                        rows.push(g.matrix(i).row(r));
                    }
                }
            }
            let rank = FieldMatrix::rank_of_rows(g.field(), &rows);
            if rank < rows.len() {
                *hit = Some(
                    chosen
                        .iter()
                        .map(|c| c.map_or(Vec::new(), |o| o.rows.iter().map(|r| r + 1).collect()))
                        .collect(),
                );
                return Ok(true);
            }
            return Ok(false);
        }
        // empty selection for this coordinate
        chosen.push(None);
        if assemble(g, by_weight, coord + 1, remaining, exact, chosen, tests, budget, hit)? {
            return Ok(true);
        }
        chosen.pop();
        for w in 1..=remaining {
            for opt in &by_weight[w] {
                chosen.push(Some(opt));
                if assemble(g, by_weight, coord + 1, remaining - w, exact, chosen, tests, budget, hit)? {
                    return Ok(true);
                }
                chosen.pop();
            }
        }
        Ok(false)
    }

    let _ = field;
    for target in 1..=max_weight {
        let mut chosen = Vec::new();
        let mut hit = None;
        if assemble(g, &by_weight, 0, target, true, &mut chosen, &mut tests, budget, &mut hit)? {
            return Ok(Some((target, hit.expect("witness recorded"))));
        }
    }
    Ok(None)
}

/// Minimal v by the row linear-independence definition.
///
/// When sigma*n exceeds the matrix height s, the matrices are read as
/// zero-padded below row s (net points carry no digits past position s).
/// A selection touching a padded row contains the zero vector and is
/// dependent outright, so the search is capped at weight s + 1.
pub fn min_quality_v(
    g: &GeneratingSet,
    sigma: u32,
    budget: &Budget,
) -> Result<QualityCertificate, QualityError> {
    if sigma == 0 {
        return Err(QualityError::InvalidArgument("sigma must be >= 1".into()));
    }
    let max_weight = sigma as usize * g.n();
    let padded_cap = g.s() + 1; // cheapest selection using a zero-padded row
    let scan_limit = max_weight.min(padded_cap.saturating_sub(1));
    let found = min_dependent_weight(g, sigma, scan_limit, budget)?;
    let (v, witness) = match found {
        Some((w, selection)) => (
            max_weight - w + 1,
            Some(serde_json::json!({ "selection_rows": selection, "weight": w })),
        ),
        None if padded_cap <= max_weight => (
            max_weight - padded_cap + 1,
            Some(serde_json::json!({ "zero_padded_row": padded_cap, "weight": padded_cap })),
        ),
        None => (0, None),
    };
    Ok(QualityCertificate { sigma, v, method: "independence".into(), witness })
}

/// Minimal weight over the full dual net: the enumerated digit box plus
/// the boundary vector b^box e_1, whose weight box+1 bounds everything
/// with digits beyond the box.
fn dual_min_weight(
    g: &GeneratingSet,
    sigma: u32,
    budget: &Budget,
) -> Result<(u32, DualVector), QualityError> {
    let digit_box = g.s();
    let duals = enumerate_dual(g, digit_box, budget)?;
    let b = g.b();
    let boundary_w = digit_box as u32 + 1;
    let mut best: Option<(u32, &DualVector)> = None;
    for dv in &duals {
        if dv.is_zero() {
            continue;
        }
        let w = nrt_weight_vec(&dv.t, sigma, b);
        if best.map_or(true, |(bw, _)| w < bw) {
            best = Some((w, dv));
        }
    }
    match best {
        Some((w, dv)) if w <= boundary_w => Ok((w, dv.clone())),
        _ => {
            let mut t = vec![0u64; g.d()];
            t[0] = (b as u64).pow(digit_box as u32);
            Ok((boundary_w, DualVector::new(t, b)))
        }
    }
}

/// Minimal v by the dual-net weight criterion.
pub fn min_v_by_dual(
    g: &GeneratingSet,
    sigma: u32,
    budget: &Budget,
) -> Result<QualityCertificate, QualityError> {
    let (min_w, witness) = dual_min_weight(g, sigma, budget)?;
    let max_weight = sigma as usize * g.n();
    let v = (max_weight as i64 - min_w as i64 + 1).max(0) as usize;
    Ok(QualityCertificate {
        sigma,
        v,
        method: "dual-weight".into(),
        witness: (v > 0).then(|| {
            serde_json::json!({ "t": witness.t, "rho_sigma": min_w })
        }),
    })
}

/// True iff every nonzero dual vector has rho_sigma(t) > sigma*n - v.
/// v may be negative to probe beyond-optimal thresholds. On false, the
/// minimal-weight offender is returned.
pub fn check_weight_criterion(
    g: &GeneratingSet,
    sigma: u32,
    v: i64,
    budget: &Budget,
) -> Result<(bool, Option<DualVector>), QualityError> {
    let (min_w, witness) = dual_min_weight(g, sigma, budget)?;
    let threshold = sigma as i64 * g.n() as i64 - v;
    if (min_w as i64) > threshold {
        Ok((true, None))
    } else {
        Ok((false, Some(witness)))
    }
}

fn compositions(d: usize, total: usize) -> Vec<Vec<usize>> {
    fn rec(d: usize, total: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if d == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=total {
            prefix.push(first);
            rec(d - 1, total - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    rec(d, total, &mut prefix, &mut out);
    out
}

/// True iff every b-adic interval of order n - v contains exactly b^v
/// points of pts (all interval shapes, all positions).
pub fn check_equidistribution(pts: &PointSet, v: usize) -> Result<bool, QualityError> {
    let n = pts
        .log_b_len()
        .ok_or_else(|| QualityError::InvalidArgument("point count is not a power of b".into()))?;
    if v > n {
        return Err(QualityError::InvalidArgument(format!("need v <= n, got v={v} n={n}")));
    }
    let order = n - v;
    let b = pts.b();
    let expected = (b as u64).pow(v as u32);
    for shape in compositions(pts.dim(), order) {
        let mut counts: HashMap<Vec<u64>, u64> = HashMap::new();
        for p in 0..pts.len() {
            let key: Vec<u64> = (0..pts.dim())
                .map(|i| pts.coord(p, i).scaled_floor(b, shape[i] as u32))
                .collect();
            *counts.entry(key).or_insert(0) += 1;
        }
        if counts.values().any(|&c| c != expected) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Minimal v accepted by the geometric equidistribution check (order-1
/// sense).
pub fn min_v_by_equidistribution(pts: &PointSet) -> Result<QualityCertificate, QualityError> {
    let n = pts
        .log_b_len()
        .ok_or_else(|| QualityError::InvalidArgument("point count is not a power of b".into()))?;
    for v in 0..=n {
        if check_equidistribution(pts, v)? {
            return Ok(QualityCertificate {
                sigma: 1,
                v,
                method: "equidistribution".into(),
                witness: None,
            });
        }
    }
    unreachable!("v = n always passes: the whole cube holds b^n points")
}

#[derive(Debug, Clone, Serialize)]
pub struct OmegaCount {
    pub gamma: Vec<u32>,
    pub lambda: Vec<u32>,
    pub count: u64,
    pub bound: f64,
    pub within_bound: bool,
}

/// Exact count of dual vectors t with rho1(t_i) = gamma_i and, per
/// coordinate, gamma_i <= lambda_i or rho1(t_i') = lambda_i; compared
/// against the (b-1)^d b^((sum min(lambda_i, gamma_i - 1) - n + v)_+)
/// bound, where v is the net's order-1 quality parameter. gamma_i may
/// exceed the digit box by one: those components carry a free top digit,
/// counted with multiplicity b - 1.
pub fn count_omega(
    duals: &[DualVector],
    b: u32,
    n: usize,
    v1: usize,
    digit_box: usize,
    gamma: &[u32],
    lambda: &[u32],
) -> Result<OmegaCount, QualityError> {
    let d = gamma.len();
    if lambda.len() != d {
        return Err(QualityError::InvalidArgument("gamma/lambda length mismatch".into()));
    }
    if gamma.iter().any(|&gi| gi as usize > digit_box + 1) {
        return Err(QualityError::InvalidArgument(format!(
            "gamma beyond digit_box+1={} is not enumerable",
            digit_box + 1
        )));
    }
    if lambda.iter().any(|&li| li as usize > digit_box) {
        return Err(QualityError::InvalidArgument("lambda must be <= digit_box".into()));
    }
    let mut multiplier = 1u64;
    for &gi in gamma {
        if gi as usize == digit_box + 1 {
            multiplier *= (b - 1) as u64;
        }
    }
    let mut count = 0u64;
    for dv in duals {
        let ok = (0..d).all(|i| {
            let ti = dv.t[i];
            let gi = gamma[i];
            let li = lambda[i];
            if gi as usize == digit_box + 1 {
                // ti is the low part; the free top digit is the leader
                nrt_weight(ti, 1, b) == li
            } else {
                nrt_weight(ti, 1, b) == gi
                    && (gi <= li || nrt_weight(t_prime(ti, b), 1, b) == li)
            }
        });
        if ok {
            count += multiplier;
        }
    }
    // Coordinates with gamma_i = 0 carry no digits at all: they add
    // nothing to the homogeneous system and admit no leading-digit
    // choice, so they contribute neither to the exponent nor to the
    // (b-1) factor. (Extending min(lambda_i, gamma_i - 1) = -1 to them
    // instead produces a bound the exact counts provably exceed.)
    let active = gamma.iter().filter(|&&gi| gi >= 1).count() as u32;
    let exponent: i64 = (0..d)
        .filter(|&i| gamma[i] >= 1)
        .map(|i| (lambda[i] as i64).min(gamma[i] as i64 - 1))
        .sum::<i64>()
        - n as i64
        + v1 as i64;
    let bound_u =
        ((b - 1) as u128).pow(active) * (b as u128).pow(exponent.max(0) as u32);
    Ok(OmegaCount {
        gamma: gamma.to_vec(),
        lambda: lambda.to_vec(),
        count,
        bound: bound_u as f64,
        within_bound: (count as u128) <= bound_u,
    })
}
