//! b-adic Walsh functions, character sums over nets, Walsh coefficients of
//! anchored boxes, and the dual-net Walsh series of the discrepancy
//! function — the independent oracle for direct discrepancy evaluation.
//!
//! wal_alpha reads the digits of x at the positions where alpha has
//! nonzero digits: wal_alpha(x) = e^((2 pi i / b)(beta_1 x_{a_1} + ...)).
//! Restricted to points on the b^-s grid, every Walsh coefficient factor
//! with rho_1(t) > s vanishes, which makes the digit-box truncation of the
//! dual series exact rather than approximate; off-grid arguments are
//! rejected instead of approximated.

use crate::exec;
use crate::net::{BadicRational, PointSet};
use crate::quality::DualVector;
use num_complex::Complex64;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WalshError {
    #[error("point is not resolved on the b^-s grid: coordinate {coord} has level {level}, net has {s}")]
    TruncationUnsound { coord: usize, level: u32, s: u32 },
}

/// e^(2 pi i k / b) for k = 0..b-1.
pub fn roots_of_unity(b: u32) -> Vec<Complex64> {
    (0..b)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / b as f64;
            Complex64::new(theta.cos(), theta.sin())
        })
        .collect()
}

/// Exponent (mod b) of wal_alpha at x in one dimension.
fn walsh_exponent_1d(alpha: u64, x: BadicRational, b: u32) -> u32 {
    let mut acc = 0u64;
    let mut a = alpha;
    let mut pos = 1u32;
    while a > 0 {
        let beta = (a % b as u64) as u32;
        if beta != 0 {
            acc += beta as u64 * x.digit(b, pos) as u64;
        }
        a /= b as u64;
        pos += 1;
    }
    (acc % b as u64) as u32
}

/// The alpha-th b-adic Walsh function, tensorized over coordinates.
/// Always a root of unity: |wal_alpha(x)| = 1, wal_0 = 1.
pub fn walsh_eval(alpha: &[u64], x: &[BadicRational], b: u32) -> Complex64 {
    let roots = roots_of_unity(b);
    let mut e = 0u32;
    for (&a, &xi) in alpha.iter().zip(x) {
        e = (e + walsh_exponent_1d(a, xi, b)) % b;
    }
    roots[e as usize]
}

/// Exact exponent histogram of wal_t over a point set: slot e counts the
/// points whose Walsh exponent is e. Classification of character sums is
/// done on these integers, not on floats.
pub fn character_histogram(pts: &PointSet, t: &[u64]) -> Vec<u64> {
    let b = pts.b();
    let partials = exec::map_collect(pts.len().div_ceil(exec::BLOCK), |blk| {
        let lo = blk * exec::BLOCK;
        let hi = ((blk + 1) * exec::BLOCK).min(pts.len());
        let mut hist = vec![0u64; b as usize];
        for p in lo..hi {
            let mut e = 0u32;
            for (i, &a) in t.iter().enumerate() {
                e = (e + walsh_exponent_1d(a, pts.coord(p, i), b)) % b;
            }
            hist[e as usize] += 1;
        }
        hist
    });
    let mut total = vec![0u64; b as usize];
    for h in partials {
        for (dst, src) in total.iter_mut().zip(h) {
            *dst += src;
        }
    }
    total
}

/// Sum of wal_t over the point set; b^n exactly on the dual net, 0 off it.
pub fn character_sum(pts: &PointSet, t: &[u64]) -> Complex64 {
    let roots = roots_of_unity(pts.b());
    character_histogram(pts, t)
        .iter()
        .zip(&roots)
        .map(|(&c, &w)| w * c as f64)
        .sum()
}

/// Exact Walsh coefficient of the anchored box: integral of conj(wal_t)
/// from 0 to x, in closed form.
///
/// For t > 0 with leading digit tau at position gamma, complete blocks of
/// b consecutive level-gamma cells cancel; only the partial block at x
/// survives, leaving a geometric sum over the gamma-th digit of x plus one
/// partial cell.
pub fn chi_walsh_coeff(t: u64, x: BadicRational, b: u32) -> Complex64 {
    if t == 0 {
        return Complex64::new(x.value(b), 0.0);
    }
    let roots = roots_of_unity(b);
    let conj_root = |e: u32| roots[((b - e % b) % b) as usize];

    // gamma = position of the leading digit, tau = its value
    let mut gamma = 0u32;
    let mut tmp = t;
    while tmp > 0 {
        gamma += 1;
        tmp /= b as u64;
    }
    let tau = ((t / (b as u64).pow(gamma - 1)) % b as u64) as u32;
    let t_low = t - tau as u64 * (b as u64).pow(gamma - 1);

    let k_full = x.scaled_floor(b, gamma); // number of complete level-gamma cells below x
    let x_gamma = (k_full % b as u64) as u32;
    // theta = x - k_full * b^-gamma, exact as a ratio of integers
    let theta = if x.level > gamma {
        let denom = (b as u64).pow(x.level);
        (x.num - k_full * (b as u64).pow(x.level - gamma)) as f64 / denom as f64
    } else {
        0.0
    };

    // wal_{t'} is constant on the partial block; evaluate it at x's prefix
    let e_low = walsh_exponent_1d(t_low, x, b);
    let prefix_factor = conj_root(e_low);

    let scale = 1.0 / (b as u64).pow(gamma) as f64;
    let mut cell_sum = Complex64::new(0.0, 0.0);
    for k in 0..x_gamma {
        cell_sum += conj_root((tau * k) % b);
    }
    prefix_factor * (cell_sum * scale + conj_root((tau * x_gamma) % b) * theta)
}

/// (1/N) #(points strictly inside [0, x)) minus the box volume.
pub fn discrepancy_direct(pts: &PointSet, x: &[BadicRational]) -> f64 {
    let b = pts.b();
    let s = pts.digit_level();
    let count = exec::sum_f64(pts.len(), |p| {
        let inside = (0..pts.dim()).all(|i| {
            let z = pts.coord(p, i);
            // z < x exactly: compare z.num * b^x.level with x.num * b^s
            let lhs = z.num as u128 * (b as u128).pow(x[i].level);
            let rhs = x[i].num as u128 * (b as u128).pow(s);
            lhs < rhs
        });
        if inside {
            1.0
        } else {
            0.0
        }
    });
    let volume: f64 = x.iter().map(|xi| xi.value(b)).product();
    count / pts.len() as f64 - volume
}

/// Dual-series evaluation of the discrepancy function at a grid-resolved
/// point: the sum over nonzero dual vectors of the per-coordinate Walsh
/// box coefficients. Exact on the b^-s grid; rejects anything finer.
pub fn discrepancy_walsh(
    pts: &PointSet,
    x: &[BadicRational],
    duals: &[DualVector],
) -> Result<f64, WalshError> {
    let b = pts.b();
    let s = pts.digit_level();
    for (i, xi) in x.iter().enumerate() {
        // representable on the b^-s grid iff num * b^s / b^level is integral
        if xi.level > s {
            let excess = (b as u64).pow(xi.level - s);
            if xi.num % excess != 0 {
                return Err(WalshError::TruncationUnsound { coord: i, level: xi.level, s });
            }
        }
    }
    let total = exec::sum_complex(duals.len(), |k| {
        let dv = &duals[k];
        if dv.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        dv.t.iter()
            .zip(x)
            .map(|(&ti, &xi)| chi_walsh_coeff(ti, xi, b))
            .product()
    });
    debug_assert!(total.im.abs() < 1e-9, "dual series must be real, got {}", total.im);
    Ok(total.re)
}

/// Outcome of the exhaustive grid sweep comparing the dual Walsh series
/// against direct counting at every b^-s grid point.
#[derive(Debug, Clone)]
pub struct GridSweepReport {
    pub cells: u64,
    pub max_abs_gap: f64,
    pub worst: Vec<u64>,
}

/// Compare the Walsh-series route against direct counting on the full
/// b^-s grid. The series (including the t = 0 volume term) is contracted
/// coordinate by coordinate over the lexicographically sorted dual, and
/// counting is done with a d-dimensional prefix sum, so the whole sweep
/// is O(sides^(d+1) + cells) rather than cells x duals.
pub fn walsh_direct_grid_sweep(pts: &PointSet, duals: &[DualVector]) -> GridSweepReport {
    let b = pts.b();
    let s = pts.digit_level();
    let d = pts.dim();
    let side = (b as u64).pow(s) as usize;
    let cells = side.pow(d as u32);

    // chi-hat vectors per distinct t value, shared across coordinates
    let mut chi_memo: HashMap<u64, Vec<Complex64>> = HashMap::new();
    for dv in duals {
        for &ti in &dv.t {
            chi_memo.entry(ti).or_insert_with(|| {
                (0..side)
                    .map(|k| chi_walsh_coeff(ti, BadicRational::new(k as u64, s), b))
                    .collect()
            });
        }
    }

    // recursive contraction: sum over the dual slice of the tensor product
    fn contract(
        coord: usize,
        d: usize,
        side: usize,
        duals: &[DualVector],
        memo: &HashMap<u64, Vec<Complex64>>,
    ) -> Vec<Complex64> {
        if coord == d {
            return vec![Complex64::new(duals.len() as f64, 0.0)];
        }
        let rest = side.pow((d - coord - 1) as u32);
        // group by the current coordinate (input sorted lexicographically)
        let mut groups: Vec<(u64, Vec<Complex64>)> = Vec::new();
        let mut lo = 0;
        while lo < duals.len() {
            let val = duals[lo].t[coord];
            let hi = duals[lo..].iter().position(|dv| dv.t[coord] != val).map_or(duals.len(), |p| lo + p);
            groups.push((val, contract(coord + 1, d, side, &duals[lo..hi], memo)));
            lo = hi;
        }
        if coord == 0 {
            // parallel over the leading grid axis; group order fixed
            let rows = exec::map_collect(side, |xi| {
                let mut row = vec![Complex64::new(0.0, 0.0); rest];
                for (val, sub) in &groups {
                    let w = memo[val][xi];
                    for (dst, &src) in row.iter_mut().zip(sub) {
                        *dst += w * src;
                    }
                }
                row
            });
            rows.into_iter().flatten().collect()
        } else {
            let mut out = vec![Complex64::new(0.0, 0.0); side * rest];
            for (val, sub) in &groups {
                let chi = &memo[val];
                for xi in 0..side {
                    let w = chi[xi];
                    if sub.len() == 1 {
                        out[xi] += w * sub[0];
                    } else {
                        for (y, &src) in sub.iter().enumerate() {
                            out[xi * rest + y] += w * src;
                        }
                    }
                }
            }
            out
        }
    }
    let series = contract(0, d, side, duals, &chi_memo);

    // counting side: histogram + inclusive prefix sums along each axis
    let mut counts = vec![0u32; cells];
    for p in 0..pts.len() {
        let mut idx = 0usize;
        for i in 0..d {
            idx = idx * side + pts.point(p).coord_num(i) as usize;
        }
        counts[idx] += 1;
    }
    for axis in 0..d {
        let stride = side.pow((d - axis - 1) as u32);
        let block = stride * side;
        for base in 0..cells / block {
            for inner in 0..stride {
                let start = base * block + inner;
                for k in 1..side {
                    counts[start + k * stride] += counts[start + (k - 1) * stride];
                }
            }
        }
    }
    // count of points strictly below grid point x is the prefix at x - 1
    let n_points = pts.len() as f64;
    let gap_at = |cell: usize| -> f64 {
        let mut idx = cell;
        let mut shifted = 0usize;
        let mut any_zero = false;
        let mut mult = 1usize;
        let mut coords = vec![0usize; d];
        for i in (0..d).rev() {
            coords[i] = idx % side;
            idx /= side;
        }
        for &c in &coords {
            if c == 0 {
                any_zero = true;
                break;
            }
            shifted = shifted * side + (c - 1);
            mult *= side;
        }
        let _ = mult;
        let count = if any_zero { 0.0 } else { counts[shifted] as f64 };
        (series[cell] - Complex64::new(count / n_points, 0.0)).norm()
    };
    let max_abs_gap = exec::max_f64(cells, gap_at);
    // locate the witness deterministically
    let mut worst_cell = 0usize;
    for cell in 0..cells {
        if gap_at(cell) == max_abs_gap {
            worst_cell = cell;
            break;
        }
    }
    let mut worst = vec![0u64; d];
    let mut idx = worst_cell;
    for i in (0..d).rev() {
        worst[i] = (idx % side) as u64;
        idx /= side;
    }
    GridSweepReport { cells: cells as u64, max_abs_gap, worst }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{construct_hammersley, generate_points};
    use crate::quality::{enumerate_dual, Budget};

    const EPS: f64 = 1e-12;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-10
    }

    #[test]
    fn walsh_zero_is_one() {
        let x = [BadicRational::new(5, 3), BadicRational::new(2, 3)];
        assert!(close(walsh_eval(&[0, 0], &x, 2), Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn walsh_hand_values() {
        // b=2, alpha=1, x=3/4 (digits 1,1): exponent = 1 -> -1
        let x = BadicRational::new(3, 2);
        assert!(close(walsh_eval(&[1], &[x], 2), Complex64::new(-1.0, 0.0)));
        // b=3, alpha=1, x=2/3 (digit 2): e^(4 pi i / 3)
        let x3 = BadicRational::new(2, 1);
        let expected = Complex64::from_polar(1.0, 4.0 * std::f64::consts::PI / 3.0);
        assert!(close(walsh_eval(&[1], &[x3], 3), expected));
    }

    #[test]
    fn walsh_modulus_one_and_multiplicative() {
        let b = 3;
        for alpha in 0..20u64 {
            for num in 0..27u64 {
                let x = BadicRational::new(num, 3);
                let v = walsh_eval(&[alpha], &[x], b);
                assert!((v.norm() - 1.0).abs() < EPS);
            }
        }
        // tensor value = product of per-coordinate values
        let x = [BadicRational::new(7, 3), BadicRational::new(11, 3)];
        let lhs = walsh_eval(&[5, 8], &x, 3);
        let rhs = walsh_eval(&[5], &x[..1], 3) * walsh_eval(&[8], &x[1..], 3);
        assert!(close(lhs, rhs));
    }

    #[test]
    fn character_sum_trivial_and_dual() {
        let g = construct_hammersley(2, 3).unwrap();
        let pts = generate_points(&g);
        let n = 8.0;
        assert!(close(character_sum(&pts, &[0, 0]), Complex64::new(n, 0.0)));

        let duals = enumerate_dual(&g, 3, &Budget::default()).unwrap();
        for dv in &duals {
            let sum = character_sum(&pts, &dv.t);
            assert!(close(sum, Complex64::new(n, 0.0)), "t={:?}", dv.t);
        }
    }

    #[test]
    fn character_sum_exhaustive_classification() {
        let g = construct_hammersley(2, 3).unwrap();
        let pts = generate_points(&g);
        let duals = enumerate_dual(&g, 3, &Budget::default()).unwrap();
        let dual_set: std::collections::BTreeSet<Vec<u64>> =
            duals.iter().map(|d| d.t.clone()).collect();
        for t1 in 0..8u64 {
            for t2 in 0..8u64 {
                let sum = character_sum(&pts, &[t1, t2]);
                if dual_set.contains(&vec![t1, t2]) {
                    assert!(close(sum, Complex64::new(8.0, 0.0)));
                } else {
                    assert!(sum.norm() < 1e-9, "t=({t1},{t2}) sum={sum}");
                }
            }
        }
    }

    /// Independent oracle: integrate conj(wal_t) cell by cell at the
    /// leading-digit level, with no geometric-sum shortcut.
    fn chi_oracle(t: u64, x: BadicRational, b: u32) -> Complex64 {
        if t == 0 {
            return Complex64::new(x.value(b), 0.0);
        }
        let mut gamma = 0u32;
        let mut tmp = t;
        while tmp > 0 {
            gamma += 1;
            tmp /= b as u64;
        }
        let k_full = x.scaled_floor(b, gamma);
        let cell = 1.0 / (b as u64).pow(gamma) as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for c in 0..k_full {
            let anchor = BadicRational::new(c, gamma);
            acc += walsh_eval(&[t], &[anchor], b).conj() * cell;
        }
        let theta = x.value(b) - k_full as f64 * cell;
        if theta > 0.0 {
            let anchor = BadicRational::new(k_full, gamma);
            acc += walsh_eval(&[t], &[anchor], b).conj() * theta;
        }
        acc
    }

    #[test]
    fn chi_examples() {
        // t = 0 -> x
        assert!(close(
            chi_walsh_coeff(0, BadicRational::new(3, 2), 2),
            Complex64::new(0.75, 0.0)
        ));
        // t = 1, b = 2, x = 1 -> 0 (balanced halves)
        assert!(chi_walsh_coeff(1, BadicRational::new(2, 1), 2).norm() < EPS);
        // t = 1, b = 2, x = 1/2 -> 1/2
        assert!(close(
            chi_walsh_coeff(1, BadicRational::new(1, 1), 2),
            Complex64::new(0.5, 0.0)
        ));
    }

    #[test]
    fn chi_matches_piecewise_oracle() {
        for &b in &[2u32, 3, 5] {
            let level = 4u32;
            let denom = (b as u64).pow(level);
            for t in 0..40u64 {
                for num in (0..=denom).step_by(7) {
                    let x = BadicRational::new(num, level);
                    let fast = chi_walsh_coeff(t, x, b);
                    let slow = chi_oracle(t, x, b);
                    assert!(
                        (fast - slow).norm() < 1e-10,
                        "b={b} t={t} x={num}/{denom}: {fast} vs {slow}"
                    );
                }
            }
        }
    }

    #[test]
    fn chi_piecewise_linear_breakpoints() {
        // as a function of x, the coefficient is linear between level-rho1
        // cell boundaries: check midpoint interpolation on a finer grid
        let b = 2u32;
        let t = 5u64; // rho1 = 3
        for k in 0..8u64 {
            let left = chi_walsh_coeff(t, BadicRational::new(2 * k, 4), b);
            let right = chi_walsh_coeff(t, BadicRational::new(2 * k + 2, 4), b);
            let mid = chi_walsh_coeff(t, BadicRational::new(2 * k + 1, 4), b);
            assert!(close(mid, (left + right) / 2.0));
        }
    }

    #[test]
    fn discrepancy_direct_examples() {
        let g = construct_hammersley(2, 2).unwrap();
        let pts = generate_points(&g);
        let zero = [BadicRational::zero(), BadicRational::zero()];
        assert_eq!(discrepancy_direct(&pts, &zero), 0.0);

        // single point at the origin in d = 1
        let single = PointSet::from_numerators(2, 1, vec![vec![0]]).unwrap();
        let x = [BadicRational::new(1, 1)];
        assert!((discrepancy_direct(&single, &x) - 0.5).abs() < EPS);
    }

    use crate::net::PointSet;

    #[test]
    fn walsh_series_matches_direct_on_grid() {
        let g = construct_hammersley(2, 3).unwrap();
        let pts = generate_points(&g);
        let duals = enumerate_dual(&g, 3, &Budget::default()).unwrap();
        for num1 in 0..8u64 {
            for num2 in 0..8u64 {
                let x = [BadicRational::new(num1, 3), BadicRational::new(num2, 3)];
                let series = discrepancy_walsh(&pts, &x, &duals).unwrap();
                let direct = discrepancy_direct(&pts, &x);
                assert!(
                    (series - direct).abs() < 1e-9,
                    "x=({num1}/8,{num2}/8): {series} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn walsh_series_rejects_off_grid() {
        let g = construct_hammersley(2, 2).unwrap();
        let pts = generate_points(&g);
        let duals = enumerate_dual(&g, 2, &Budget::default()).unwrap();
        let x = [BadicRational::new(1, 3), BadicRational::zero()]; // 1/8 finer than 1/4
        assert!(matches!(
            discrepancy_walsh(&pts, &x, &duals),
            Err(WalshError::TruncationUnsound { coord: 0, .. })
        ));
        // but a coarse-level representable point is fine
        let ok = [BadicRational::new(1, 1), BadicRational::new(1, 2)];
        assert!(discrepancy_walsh(&pts, &ok, &duals).is_ok());
    }

    #[test]
    fn grid_sweep_agrees_everywhere() {
        for g in [construct_hammersley(2, 3).unwrap(), construct_hammersley(3, 2).unwrap()] {
            let pts = generate_points(&g);
            let duals = enumerate_dual(&g, g.s(), &Budget::default()).unwrap();
            let report = walsh_direct_grid_sweep(&pts, &duals);
            assert!(report.max_abs_gap < 1e-9, "gap {}", report.max_abs_gap);
            assert_eq!(report.cells, (g.b() as u64).pow((g.s() * g.d()) as u32));
        }
    }
}
