//! Digital construction of point sets from generating matrices.
//!
//! A generating set is a tuple of d matrices of shape s x n over F_b. Point
//! nu (0 <= nu < b^n) has, in coordinate i, the digit column C_i nu-bar where
//! nu-bar lists the b-adic digits of nu least significant first; digit a of
//! the column carries weight b^(-a). Coordinates are kept exact as integer
//! numerators over b^s.

use crate::exec;
use crate::field::{FieldMatrix, GfError, PrimeField};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NetError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("base {b} too small for dimension {d}")]
    BaseTooSmall { b: u32, d: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// d generating matrices plus the (b, s, n, d) metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingSet {
    field: PrimeField,
    s: usize,
    n: usize,
    d: usize,
    matrices: Vec<FieldMatrix>,
}

impl GeneratingSet {
    pub fn new(matrices: Vec<FieldMatrix>) -> Result<Self, NetError> {
        let first = matrices
            .first()
            .ok_or_else(|| NetError::InvariantViolation("need at least one matrix".into()))?;
        let (field, s, n) = (first.field(), first.rows(), first.cols());
        if n == 0 || s == 0 {
            return Err(NetError::InvariantViolation("matrix dimensions must be positive".into()));
        }
        if s < n {
            return Err(NetError::InvariantViolation(format!(
                "need s >= n rows, got s={s} n={n}"
            )));
        }
        for m in &matrices {
            if m.field() != field || m.rows() != s || m.cols() != n {
                return Err(NetError::InvariantViolation(
                    "all matrices must share (b, s, n)".into(),
                ));
            }
        }
        let b = field.modulus() as u64;
        if b.checked_pow(s as u32).is_none() {
            return Err(NetError::InvariantViolation(format!(
                "b^s = {b}^{s} exceeds the exact integer range"
            )));
        }
        Ok(Self { field, s, n, d: matrices.len(), matrices })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn b(&self) -> u32 {
        self.field.modulus()
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn matrices(&self) -> &[FieldMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, i: usize) -> &FieldMatrix {
        &self.matrices[i]
    }

    /// Number of points b^n.
    pub fn point_count(&self) -> u64 {
        (self.b() as u64).pow(self.n as u32)
    }

    /// Returns a copy with one entry replaced; used by mutation testing.
    pub fn with_entry(&self, mat: usize, row: usize, col: usize, value: u32) -> Self {
        let mut out = self.clone();
        out.matrices[mat].set(row, col, value);
        out
    }
}

/// An exact coordinate num / b^level in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BadicRational {
    pub num: u64,
    pub level: u32,
}

impl BadicRational {
    pub fn new(num: u64, level: u32) -> Self {
        Self { num, level }
    }

    pub fn zero() -> Self {
        Self { num: 0, level: 0 }
    }

    pub fn value(&self, b: u32) -> f64 {
        self.num as f64 / (b as u64).pow(self.level) as f64
    }

    /// Digit a (1-based, weight b^-a) of the expansion; zero beyond `level`.
    pub fn digit(&self, b: u32, a: u32) -> u32 {
        if a == 0 || a > self.level {
            return 0;
        }
        ((self.num / (b as u64).pow(self.level - a)) % b as u64) as u32
    }

    /// floor(x * b^j) for j >= 0, exact.
    pub fn scaled_floor(&self, b: u32, j: u32) -> u64 {
        if j >= self.level {
            self.num * (b as u64).pow(j - self.level)
        } else {
            self.num / (b as u64).pow(self.level - j)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetPoint {
    nums: Vec<u64>,
}

impl NetPoint {
    pub fn coord_num(&self, i: usize) -> u64 {
        self.nums[i]
    }

    pub fn coords(&self) -> &[u64] {
        &self.nums
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Digital(Box<GeneratingSet>),
    External,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    b: u32,
    s: u32,
    d: usize,
    points: Vec<NetPoint>,
    provenance: Provenance,
}

impl PointSet {
    pub fn from_numerators(b: u32, s: u32, rows: Vec<Vec<u64>>) -> Result<Self, NetError> {
        let field = PrimeField::new(b)?;
        let d = rows
            .first()
            .ok_or_else(|| NetError::InvariantViolation("empty point set".into()))?
            .len();
        let denom = (field.modulus() as u64)
            .checked_pow(s)
            .ok_or_else(|| NetError::InvariantViolation("b^s overflows".into()))?;
        for r in &rows {
            if r.len() != d {
                return Err(NetError::DimensionMismatch("ragged point rows".into()));
            }
            if r.iter().any(|&k| k >= denom) {
                return Err(NetError::InvariantViolation(
                    "coordinate numerator out of [0, b^s)".into(),
                ));
            }
        }
        Ok(Self {
            b,
            s,
            d,
            points: rows.into_iter().map(|nums| NetPoint { nums }).collect(),
            provenance: Provenance::External,
        })
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    /// Digit resolution: every coordinate is an integer over b^s.
    pub fn digit_level(&self) -> u32 {
        self.s
    }

    pub fn denominator(&self) -> u64 {
        (self.b as u64).pow(self.s)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[NetPoint] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &NetPoint {
        &self.points[i]
    }

    pub fn coord(&self, point: usize, i: usize) -> BadicRational {
        BadicRational::new(self.points[point].nums[i], self.s)
    }

    pub fn coord_f64(&self, point: usize, i: usize) -> f64 {
        self.points[point].nums[i] as f64 / self.denominator() as f64
    }

    pub fn generating_set(&self) -> Option<&GeneratingSet> {
        match &self.provenance {
            Provenance::Digital(g) => Some(g),
            Provenance::External => None,
        }
    }

    /// log_b of the point count, when the count is an exact power of b.
    pub fn log_b_len(&self) -> Option<usize> {
        let mut n = 0usize;
        let mut acc = 1u64;
        while acc < self.points.len() as u64 {
            acc *= self.b as u64;
            n += 1;
        }
        (acc == self.points.len() as u64).then_some(n)
    }
}

/// Run the digital construction: point nu has digit columns C_i nu-bar.
pub fn generate_points(g: &GeneratingSet) -> PointSet {
    let b = g.b() as u64;
    let n = g.n();
    let s = g.s();
    let count = g.point_count();
    let points = exec::map_collect(count as usize, |nu| {
        let mut digits = vec![0u32; n];
        let mut x = nu as u64;
        for slot in digits.iter_mut() {
            *slot = (x % b) as u32;
            x /= b;
        }
        let nums = (0..g.d())
            .map(|i| {
                let col = g.matrix(i).mat_vec(&digits, false).expect("shape checked");
                col.iter().fold(0u64, |acc, &digit| acc * b + digit as u64)
            })
            .collect();
        NetPoint { nums }
    });
    PointSet {
        b: g.b(),
        s: s as u32,
        d: g.d(),
        points,
        provenance: Provenance::Digital(Box::new(g.clone())),
    }
}

/// d = 1 van der Corput radical-inverse net: C_1 = I.
pub fn construct_identity(b: u32, n: usize) -> Result<GeneratingSet, NetError> {
    let field = PrimeField::new(b)?;
    GeneratingSet::new(vec![FieldMatrix::identity(field, n)])
}

/// Two-dimensional Hammersley net: C_1 = I, C_2 = anti-diagonal identity.
pub fn construct_hammersley(b: u32, n: usize) -> Result<GeneratingSet, NetError> {
    let field = PrimeField::new(b)?;
    GeneratingSet::new(vec![
        FieldMatrix::identity(field, n),
        FieldMatrix::anti_identity(field, n),
    ])
}

fn binomial_table(n: usize, field: PrimeField) -> Vec<Vec<u32>> {
    let mut c = vec![vec![0u32; n]; n];
    for i in 0..n {
        c[i][0] = 1 % field.modulus();
        for k in 1..=i {
            c[i][k] = field.add(c[i - 1][k - 1], if k <= i - 1 { c[i - 1][k] } else { 0 });
        }
    }
    c
}

/// The k-th power of the upper-triangular Pascal matrix over F_b:
/// P^k[a][c] = binom(c-1, a-1) k^(c-a), 1-based.
pub fn pascal_power(field: PrimeField, n: usize, k: u32) -> FieldMatrix {
    let binom = binomial_table(n, field);
    let mut m = FieldMatrix::zero(field, n, n);
    for a in 0..n {
        for c in a..n {
            let mut pw = 1 % field.modulus();
            for _ in 0..(c - a) {
                pw = field.mul(pw, k % field.modulus());
            }
            m.set(a, c, field.mul(binom[c][a], pw));
        }
    }
    m
}

/// Pascal-power matrices P^0, ..., P^(d-1); no base/dimension gate. The
/// net quality degrades once d exceeds b (the powers repeat mod b), which
/// is why `construct_faure` refuses that range.
pub fn pascal_power_matrices(b: u32, n: usize, d: usize) -> Result<GeneratingSet, NetError> {
    let field = PrimeField::new(b)?;
    GeneratingSet::new((0..d).map(|i| pascal_power(field, n, i as u32)).collect())
}

/// Classical Faure net for prime b >= d; certified order-1 v = 0 before
/// it is returned.
pub fn construct_faure(b: u32, n: usize, d: usize) -> Result<GeneratingSet, NetError> {
    if (b as usize) < d {
        return Err(NetError::BaseTooSmall { b, d });
    }
    let g = pascal_power_matrices(b, n, d)?;
    let cert = crate::quality::min_quality_v(&g, 1, &crate::quality::Budget::default())
        .map_err(|e| NetError::InvariantViolation(format!("certification failed: {e}")))?;
    if cert.v != 0 {
        return Err(NetError::InvariantViolation(format!(
            "Faure matrices failed order-1 v=0 certification (got v={})",
            cert.v
        )));
    }
    Ok(g)
}

/// Faure matrices extended by the reversal matrix as a final coordinate;
/// supports d up to b + 1. For d <= b this coincides with `construct_faure`'s
/// matrix list.
pub fn construct_faure_plus(b: u32, n: usize, d: usize) -> Result<GeneratingSet, NetError> {
    if d > b as usize + 1 {
        return Err(NetError::BaseTooSmall { b, d });
    }
    let field = PrimeField::new(b)?;
    let mut mats: Vec<FieldMatrix> =
        (0..d.min(b as usize)).map(|i| pascal_power(field, n, i as u32)).collect();
    if d == b as usize + 1 {
        mats.push(FieldMatrix::anti_identity(field, n));
    }
    GeneratingSet::new(mats)
}

/// Digit interlacing: fold sigma consecutive input matrices into one output
/// matrix of shape sigma*n x n. Row sigma*(a-1)+i of output j is row a of
/// input C_((j-1)*sigma+i).
pub fn interlace(gs: &GeneratingSet, sigma: usize) -> Result<GeneratingSet, NetError> {
    if sigma == 0 || gs.d() % sigma != 0 {
        return Err(NetError::DimensionMismatch(format!(
            "matrix count {} not divisible by sigma {}",
            gs.d(),
            sigma
        )));
    }
    if gs.s() != gs.n() {
        return Err(NetError::DimensionMismatch(
            "interlacing expects square s = n input matrices".into(),
        ));
    }
    let n = gs.n();
    let d_out = gs.d() / sigma;
    let field = gs.field();
    let mut out = Vec::with_capacity(d_out);
    for j in 0..d_out {
        let mut rows = Vec::with_capacity(sigma * n);
        for a in 0..n {
            for i in 0..sigma {
                rows.push(gs.matrix(j * sigma + i).row(a).to_vec());
            }
        }
        out.push(FieldMatrix::from_rows(field, rows)?);
    }
    GeneratingSet::new(out)
}

/// Order-2 interlaced net built from the extended Faure matrices; the
/// standard supplier for order-2 instances in dimensions d with 2d <= b + 1.
pub fn construct_interlaced_faure(b: u32, n: usize, d: usize) -> Result<GeneratingSet, NetError> {
    let inputs = construct_faure_plus(b, n, 2 * d)?;
    interlace(&inputs, 2)
}

/// Wire format for net files.
#[derive(Debug, Serialize, Deserialize)]
struct NetFile {
    b: u32,
    s: usize,
    n: usize,
    d: usize,
    matrices: Vec<Vec<Vec<u32>>>,
}

pub fn net_to_json(g: &GeneratingSet) -> String {
    let file = NetFile {
        b: g.b(),
        s: g.s(),
        n: g.n(),
        d: g.d(),
        matrices: (0..g.d())
            .map(|i| (0..g.s()).map(|r| g.matrix(i).row(r).to_vec()).collect())
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("net serializes");
    out.push('\n');
    out
}

pub fn net_from_json(text: &str) -> Result<GeneratingSet, NetError> {
    let file: NetFile = serde_json::from_str(text)
        .map_err(|e| NetError::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
    let field = PrimeField::new(file.b)?;
    if file.d != file.matrices.len() {
        return Err(NetError::InvariantViolation(format!(
            "d = {} but {} matrices present",
            file.d,
            file.matrices.len()
        )));
    }
    if file.s < file.n {
        return Err(NetError::InvariantViolation(format!(
            "need s >= n, got s={} n={}",
            file.s, file.n
        )));
    }
    let mut mats = Vec::with_capacity(file.d);
    for (i, rows) in file.matrices.into_iter().enumerate() {
        if rows.len() != file.s {
            return Err(NetError::InvariantViolation(format!(
                "matrix {i} has {} rows, expected s={}",
                rows.len(),
                file.s
            )));
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != file.n {
                return Err(NetError::InvariantViolation(format!(
                    "matrix {i} row {r} has {} entries, expected n={}",
                    row.len(),
                    file.n
                )));
            }
            if let Some(&bad) = row.iter().find(|&&v| v >= file.b) {
                return Err(NetError::InvariantViolation(format!(
                    "matrix {i} row {r} entry {bad} not in [0, {})",
                    file.b
                )));
            }
        }
        mats.push(FieldMatrix::from_rows(field, rows)?);
    }
    GeneratingSet::new(mats)
}

pub fn save_net(g: &GeneratingSet, path: &Path) -> Result<(), NetError> {
    std::fs::write(path, net_to_json(g))?;
    Ok(())
}

pub fn load_net(path: &Path) -> Result<GeneratingSet, NetError> {
    let text = std::fs::read_to_string(path)?;
    net_from_json(&text)
}

/// Points export: `nu,coord_1_num,...,coord_d_num,denominator`, exact.
pub fn points_to_csv(pts: &PointSet) -> String {
    let mut out = String::from("nu");
    for i in 1..=pts.dim() {
        out.push_str(&format!(",coord_{i}_num"));
    }
    out.push_str(",denominator\n");
    let denom = pts.denominator();
    for (nu, p) in pts.points().iter().enumerate() {
        out.push_str(&nu.to_string());
        for i in 0..pts.dim() {
            out.push_str(&format!(",{}", p.coord_num(i)));
        }
        out.push_str(&format!(",{denom}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn identity_n1_points() {
        let g = GeneratingSet::new(vec![FieldMatrix::identity(PrimeField::new(2).unwrap(), 1)])
            .unwrap();
        let pts = generate_points(&g);
        let nums: Vec<u64> = pts.points().iter().map(|p| p.coord_num(0)).collect();
        assert_eq!(nums, vec![0, 1]); // {0, 1/2}
    }

    #[test]
    fn identity_n2_points_in_order() {
        let g = construct_identity(2, 2).unwrap();
        let pts = generate_points(&g);
        // nu = 1 has nu-bar = (1, 0), digits (1, 0) -> 1/2
        let vals: Vec<f64> = (0..4).map(|i| pts.coord_f64(i, 0)).collect();
        assert_eq!(vals, vec![0.0, 0.5, 0.25, 0.75]);
    }

    #[test]
    fn hammersley_second_coordinate() {
        let g = construct_hammersley(2, 2).unwrap();
        let pts = generate_points(&g);
        // nu = 1: C_2 nu-bar = (0, 1) -> 0/2 + 1/4
        assert_eq!(pts.coord_f64(1, 1), 0.25);
    }

    #[test]
    fn hammersley_degenerate_n1() {
        let g = construct_hammersley(2, 1).unwrap();
        assert_eq!(g.matrix(0), g.matrix(1));
    }

    #[test]
    fn hammersley_reversal_rows() {
        let g = construct_hammersley(2, 3).unwrap();
        assert_eq!(g.matrix(1).row(0), &[0, 0, 1]);
        assert_eq!(g.matrix(1).row(1), &[0, 1, 0]);
        assert_eq!(g.matrix(1).row(2), &[1, 0, 0]);
    }

    #[test]
    fn faure_pascal_entries() {
        let g = construct_faure(3, 2, 2).unwrap();
        // C_2 = P: [[1,1],[0,1]] mod 3
        assert_eq!(g.matrix(1).row(0), &[1, 1]);
        assert_eq!(g.matrix(1).row(1), &[0, 1]);
        let g1 = construct_faure(2, 4, 1).unwrap();
        assert_eq!(g1.matrix(0), &FieldMatrix::identity(PrimeField::new(2).unwrap(), 4));
    }

    #[test]
    fn faure_base_gate() {
        assert!(matches!(
            construct_faure(3, 2, 4),
            Err(NetError::BaseTooSmall { b: 3, d: 4 })
        ));
        // but the ungated Pascal supplier accepts it (P^3 = I mod 3)
        let g = pascal_power_matrices(3, 2, 4).unwrap();
        assert_eq!(g.matrix(3), g.matrix(0));
    }

    #[test]
    fn interlace_row_layout() {
        let g = construct_hammersley(2, 2).unwrap();
        let e = interlace(&g, 2).unwrap();
        assert_eq!(e.d(), 1);
        assert_eq!(e.s(), 4);
        let m = e.matrix(0);
        assert_eq!(m.row(0), g.matrix(0).row(0));
        assert_eq!(m.row(1), g.matrix(1).row(0));
        assert_eq!(m.row(2), g.matrix(0).row(1));
        assert_eq!(m.row(3), g.matrix(1).row(1));
    }

    #[test]
    fn interlace_sigma_one_is_identity() {
        let g = construct_faure(3, 3, 3).unwrap();
        assert_eq!(interlace(&g, 1).unwrap(), g);
    }

    #[test]
    fn interlace_rejects_indivisible() {
        let g = construct_faure(3, 3, 3).unwrap();
        assert!(matches!(interlace(&g, 2), Err(NetError::DimensionMismatch(_))));
    }

    #[test]
    fn interlace_preserves_row_multiset() {
        let gs = construct_faure_plus(3, 3, 4).unwrap();
        let out = interlace(&gs, 2).unwrap();
        let collect = |g: &GeneratingSet| {
            let mut rows: Vec<Vec<u32>> = (0..g.d())
                .flat_map(|i| (0..g.s()).map(move |r| (i, r)))
                .map(|(i, r)| g.matrix(i).row(r).to_vec())
                .collect();
            rows.sort();
            rows
        };
        assert_eq!(collect(&gs), collect(&out));
    }

    #[test]
    fn shipped_nets_have_distinct_points() {
        let nets = [
            construct_hammersley(2, 4).unwrap(),
            construct_hammersley(3, 2).unwrap(),
            construct_faure(3, 3, 3).unwrap(),
            construct_interlaced_faure(3, 2, 2).unwrap(),
            construct_interlaced_faure(2, 3, 1).unwrap(),
        ];
        for g in nets {
            let pts = generate_points(&g);
            let set: BTreeSet<Vec<u64>> =
                pts.points().iter().map(|p| p.coords().to_vec()).collect();
            assert_eq!(set.len() as u64, g.point_count());
            let denom = pts.denominator();
            assert!(pts.points().iter().all(|p| p.coords().iter().all(|&k| k < denom)));
        }
    }

    #[test]
    fn round_trip_json() {
        let g = construct_hammersley(2, 4).unwrap();
        let text = net_to_json(&g);
        let back = net_from_json(&text).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn round_trip_file() {
        let g = construct_hammersley(2, 4).unwrap();
        let path = std::env::temp_dir().join(format!("netscope-rt-{}.json", std::process::id()));
        save_net(&g, &path).unwrap();
        let back = load_net(&path).unwrap();
        std::fs::remove_file(&path).ok();
        assert_eq!(g, back);
    }

    #[test]
    fn load_rejects_composite_base() {
        let text = r#"{"b":4,"s":2,"n":2,"d":1,"matrices":[[[1,0],[0,1]]]}"#;
        assert!(matches!(net_from_json(text), Err(NetError::Field(GfError::NotPrime(4)))));
    }

    #[test]
    fn load_rejects_s_less_than_n() {
        let text = r#"{"b":2,"s":1,"n":2,"d":1,"matrices":[[[1,0]]]}"#;
        assert!(matches!(net_from_json(text), Err(NetError::InvariantViolation(_))));
    }

    #[test]
    fn load_rejects_entry_out_of_range() {
        let text = r#"{"b":2,"s":2,"n":2,"d":1,"matrices":[[[1,0],[0,2]]]}"#;
        assert!(matches!(net_from_json(text), Err(NetError::InvariantViolation(_))));
    }

    #[test]
    fn parse_error_carries_location() {
        let err = net_from_json("{not json").unwrap_err();
        match err {
            NetError::Parse(msg) => assert!(msg.contains("line 1")),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn points_csv_header_and_exactness() {
        let g = construct_hammersley(2, 2).unwrap();
        let csv = points_to_csv(&generate_points(&g));
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "nu,coord_1_num,coord_2_num,denominator");
        assert_eq!(lines.next().unwrap(), "0,0,0,4");
        assert_eq!(lines.next().unwrap(), "1,2,1,4");
    }

    #[test]
    fn badic_rational_digits() {
        let x = BadicRational::new(3, 2); // 3/4 = 0.11 in base 2
        assert_eq!(x.digit(2, 1), 1);
        assert_eq!(x.digit(2, 2), 1);
        assert_eq!(x.digit(2, 3), 0);
        assert_eq!(x.scaled_floor(2, 1), 1);
        assert_eq!(x.scaled_floor(2, 3), 6);
    }
}
