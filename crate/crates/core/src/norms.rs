//! Norm evaluation for the discrepancy function: the exact Warnock double
//! sum for L2, the Haar-Parseval route, truncated Besov quasi-norms, and
//! scaling studies across net families.
//!
//! Warnock and Parseval form an oracle pair: they share nothing but the
//! point set, so their agreement certifies both the coefficient machinery
//! and the truncation analysis.

use crate::exec::{self, KahanSum};
use crate::haar::shape_coefficients;
use crate::net::PointSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NormsError {
    #[error("inadmissible Besov parameters: {0}")]
    InadmissibleParams(String),
}

/// Exact squared L2 norm of the discrepancy function:
/// 3^-d - (2/N) sum_z prod (1 - z_i^2)/2 + (1/N^2) sum_{z,z'} prod (1 - max(z_i, z_i')).
pub fn l2_warnock_sq(pts: &PointSet) -> f64 {
    let d = pts.dim();
    let n = pts.len();
    let coords: Vec<Vec<f64>> = (0..n)
        .map(|p| (0..d).map(|i| pts.coord_f64(p, i)).collect())
        .collect();
    let cross = exec::sum_f64(n, |p| {
        coords[p].iter().map(|&z| (1.0 - z * z) / 2.0).product::<f64>()
    });
    // the N^2 double sum cancels against the other terms; compensated
    // accumulation keeps that cancellation benign
    let pair = {
        let partials = exec::map_collect(n, |p| {
            let mut acc = KahanSum::default();
            let zp = &coords[p];
            for zq in &coords {
                let mut prod = 1.0;
                for i in 0..d {
                    prod *= 1.0 - zp[i].max(zq[i]);
                }
                acc.add(prod);
            }
            acc.value()
        });
        exec::pairwise_fold(partials, |a, b| a + b, 0.0)
    };
    let nf = n as f64;
    (3.0f64).powi(-(d as i32)) - 2.0 / nf * cross + pair / (nf * nf)
}

pub fn l2_warnock(pts: &PointSet) -> f64 {
    l2_warnock_sq(pts).max(0.0).sqrt()
}

/// Sequential reference implementation; the parallel route must agree
/// bit-for-bit through the fixed blocked reduction.
pub fn l2_warnock_sq_seq(pts: &PointSet) -> f64 {
    let d = pts.dim();
    let n = pts.len();
    let coords: Vec<Vec<f64>> = (0..n)
        .map(|p| (0..d).map(|i| pts.coord_f64(p, i)).collect())
        .collect();
    let cross = exec::sum_f64_seq(n, |p| {
        coords[p].iter().map(|&z| (1.0 - z * z) / 2.0).product::<f64>()
    });
    let partials = (0..n)
        .map(|p| {
            let mut acc = KahanSum::default();
            for zq in &coords {
                let mut prod = 1.0;
                for i in 0..d {
                    prod *= 1.0 - coords[p][i].max(zq[i]);
                }
                acc.add(prod);
            }
            acc.value()
        })
        .collect();
    let pair = exec::pairwise_fold(partials, |a, b| a + b, 0.0);
    let nf = n as f64;
    (3.0f64).powi(-(d as i32)) - 2.0 / nf * cross + pair / (nf * nf)
}

/// Parseval partial sums of the squared L2 norm through the Haar system,
/// truncated at |j|_+ <= j_max.
#[derive(Debug, Clone)]
pub struct L2HaarReport {
    pub value: f64,
    pub squared: f64,
    /// Contribution of each level 0..=j_max to the squared norm.
    pub per_level: Vec<f64>,
    /// The final level's contribution, as a truncation diagnostic.
    pub last_level: f64,
}

pub fn l2_haar(pts: &PointSet, j_max: u32) -> L2HaarReport {
    let b = pts.b();
    let d = pts.dim();
    let shapes = crate::haar::shapes_up_to(d, j_max);
    let sums = exec::map_collect(shapes.len(), |si| {
        let mut acc = 0.0;
        for sc in shape_coefficients(pts, &shapes[si]) {
            for (_, c) in &sc.occupied {
                acc += c.norm_sqr();
            }
            acc += sc.empty_value.norm_sqr() * sc.empty_count as f64;
        }
        acc
    });
    let mut per_level = vec![0.0f64; j_max as usize + 1];
    for (shape, sum) in shapes.iter().zip(&sums) {
        let kappa = crate::haar::shape_order(shape);
        per_level[kappa as usize] += (b as f64).powi(kappa as i32) * sum;
    }
    let squared: f64 = per_level.iter().sum();
    L2HaarReport {
        value: squared.max(0.0).sqrt(),
        squared,
        last_level: *per_level.last().unwrap_or(&0.0),
        per_level,
    }
}

/// Besov quasi-norm parameters. `p` and `q` accept `f64::INFINITY`; the
/// admissible range is 1/p - 1 < r < min(1/p, 1) with q > 1 when p is
/// infinite. `force` skips the range check for experimental sup-sup runs.
#[derive(Debug, Clone, Copy)]
pub struct BesovParams {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub j_max: u32,
    pub force: bool,
}

impl BesovParams {
    pub fn new(p: f64, q: f64, r: f64, j_max: u32) -> Self {
        Self { p, q, r, j_max, force: false }
    }

    pub fn validate(&self) -> Result<(), NormsError> {
        if !(self.p >= 1.0) || !(self.q >= 1.0) {
            return Err(NormsError::InadmissibleParams(format!(
                "need p, q in [1, inf], got p={} q={}",
                self.p, self.q
            )));
        }
        if self.force {
            return Ok(());
        }
        if self.p.is_infinite() && self.q <= 1.0 {
            return Err(NormsError::InadmissibleParams("need q > 1 when p = inf".into()));
        }
        let inv_p = if self.p.is_infinite() { 0.0 } else { 1.0 / self.p };
        if !(self.r > inv_p - 1.0 && self.r < inv_p.min(1.0)) {
            return Err(NormsError::InadmissibleParams(format!(
                "need 1/p - 1 < r < min(1/p, 1), got r={} with p={}",
                self.r, self.p
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct BesovReport {
    pub value: f64,
    /// Value with the last level dropped, and the resulting increment.
    pub value_prev: f64,
    pub last_level: f64,
}

/// Aggregate per-shape inner norms into the quasi-norm. `items` yields
/// (|j|_+, inner) where inner is sum |mu|^p for finite p or sup |mu| for
/// p = inf; b is the weight base. Exposed so homogeneity can be tested on
/// synthetic data.
pub fn besov_aggregate_b(items: &[(u32, f64)], b: u32, p: f64, q: f64, r: f64) -> f64 {
    let inv_p = if p.is_infinite() { 0.0 } else { 1.0 / p };
    let term = |&(kappa, inner): &(u32, f64)| -> f64 {
        let inner_norm = if p.is_infinite() { inner } else { inner.powf(1.0 / p) };
        (b as f64).powf(kappa as f64 * (r - inv_p + 1.0)) * inner_norm
    };
    if q.is_infinite() {
        items.iter().map(term).fold(0.0, f64::max)
    } else {
        items.iter().map(|it| term(it).powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// Truncated Besov quasi-norm of the discrepancy function through its
/// Haar coefficients.
pub fn besov_quasinorm(pts: &PointSet, bp: &BesovParams) -> Result<BesovReport, NormsError> {
    bp.validate()?;
    let b = pts.b();
    let d = pts.dim();
    let shapes = crate::haar::shapes_up_to(d, bp.j_max);
    let p = bp.p;
    let inners = exec::map_collect(shapes.len(), |si| {
        let mut inner = 0.0f64;
        for sc in shape_coefficients(pts, &shapes[si]) {
            if p.is_infinite() {
                for (_, c) in &sc.occupied {
                    inner = inner.max(c.norm());
                }
                if sc.empty_count > 0 {
                    inner = inner.max(sc.empty_value.norm());
                }
            } else {
                for (_, c) in &sc.occupied {
                    inner += c.norm().powf(p);
                }
                inner += sc.empty_value.norm().powf(p) * sc.empty_count as f64;
            }
        }
        inner
    });
    let items: Vec<(u32, f64)> = shapes
        .iter()
        .zip(inners)
        .map(|(shape, inner)| (crate::haar::shape_order(shape), inner))
        .collect();
    let value = besov_aggregate_b(&items, b, bp.p, bp.q, bp.r);
    let prev_items: Vec<(u32, f64)> =
        items.iter().filter(|(k, _)| *k < bp.j_max).cloned().collect();
    let value_prev = besov_aggregate_b(&prev_items, b, bp.p, bp.q, bp.r);
    Ok(BesovReport { value, value_prev, last_level: value - value_prev })
}

#[derive(Debug, Clone, Copy)]
pub enum ScalingMetric {
    L2Warnock,
    L2Haar { jmax_extra: u32 },
    Besov { p: f64, q: f64, r: f64, jmax_extra: u32 },
}

impl ScalingMetric {
    pub fn name(&self) -> &'static str {
        match self {
            ScalingMetric::L2Warnock => "l2-warnock",
            ScalingMetric::L2Haar { .. } => "l2-haar",
            ScalingMetric::Besov { .. } => "besov",
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub big_n: u64,
    pub value: f64,
    pub normalized: f64,
    pub envelope: String,
}

/// The theoretical envelope the family is normalized against:
/// n^((d-1)/2) / b^n for L2, b^(n(r-1)) n^((d-1)/q) for Besov.
pub fn envelope_value(metric: &ScalingMetric, b: u32, n: usize, d: usize) -> (f64, String) {
    let bf = b as f64;
    let nf = n as f64;
    match metric {
        ScalingMetric::L2Warnock | ScalingMetric::L2Haar { .. } => (
            nf.powf((d as f64 - 1.0) / 2.0) / bf.powi(n as i32),
            "n^((d-1)/2)/b^n".to_string(),
        ),
        ScalingMetric::Besov { q, r, .. } => {
            let logpart = if q.is_infinite() { 1.0 } else { nf.powf((d as f64 - 1.0) / *q) };
            (
                bf.powf(nf * (r - 1.0)) * logpart,
                "b^(n(r-1)) n^((d-1)/q)".to_string(),
            )
        }
    }
}

/// Evaluate the metric on each family member and divide by the envelope.
pub fn scaling_study(
    family: &[(usize, PointSet)],
    metric: &ScalingMetric,
) -> Result<Vec<ScalingRow>, NormsError> {
    family
        .iter()
        .map(|(n, pts)| {
            let value = match metric {
                ScalingMetric::L2Warnock => l2_warnock(pts),
                ScalingMetric::L2Haar { jmax_extra } => {
                    l2_haar(pts, *n as u32 + jmax_extra).value
                }
                ScalingMetric::Besov { p, q, r, jmax_extra } => {
                    let bp = BesovParams::new(*p, *q, *r, *n as u32 + jmax_extra);
                    besov_quasinorm(pts, &bp)?.value
                }
            };
            let (env, envelope) = envelope_value(metric, pts.b(), *n, pts.dim());
            Ok(ScalingRow {
                n: *n,
                big_n: pts.len() as u64,
                value,
                normalized: value / env,
                envelope,
            })
        })
        .collect()
}

/// max/min of the normalized column: the boundedness statistic.
pub fn normalized_spread(rows: &[ScalingRow]) -> f64 {
    let max = rows.iter().map(|r| r.normalized).fold(f64::NEG_INFINITY, f64::max);
    let min = rows.iter().map(|r| r.normalized).fold(f64::INFINITY, f64::min);
    max / min
}
