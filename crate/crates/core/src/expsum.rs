//! Character sums: bias, analytic rank, Gowers norms and joint value distributions.
//!
//! Exact sums are integer histograms over trace classes. The complex value
//! `Σ_j counts[j]·ζ_p^j` is only formed at the end, so identities between
//! sums can be checked with zero tolerance.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::family::FiberDistribution;
use crate::gf::{Field, FieldElement};
use crate::kernel::{self, domain_size, ExecConfig};
use crate::poly::{Polynomial, Tensor};

/// Exact `Σ_j counts[j]·ζ_p^j` over a domain of `total` points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CyclotomicSum {
    pub p: u32,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl CyclotomicSum {
    pub fn new(p: u32, counts: Vec<u64>) -> CyclotomicSum {
        assert_eq!(counts.len(), p as usize);
        let total = counts.iter().sum();
        CyclotomicSum { p, counts, total }
    }

    /// Trace-class counts of a value histogram under `ψ_a(x) = ψ(a·x)`.
    pub fn from_values(field: &Field, hist: &[u64], a: FieldElement) -> CyclotomicSum {
        let mut counts = vec![0u64; field.p() as usize];
        for (v, &c) in hist.iter().enumerate() {
            if c > 0 {
                let j = field.char_exponent(field.mul(a, FieldElement(v as u32)));
                counts[j as usize] += c;
            }
        }
        CyclotomicSum::new(field.p(), counts)
    }

    /// Representative with minimum entry 0; equal sums have equal canonical vectors.
    pub fn canonical(&self) -> Vec<u64> {
        let m = self.counts.iter().copied().min().unwrap_or(0);
        self.counts.iter().map(|&c| c - m).collect()
    }

    /// Whether `self/self.total == other/other.total` as exact cyclotomic numbers.
    pub fn same_average(&self, other: &CyclotomicSum) -> bool {
        if self.p != other.p {
            return false;
        }
        let a = self.canonical();
        let b = other.canonical();
        a.iter()
            .zip(&b)
            .all(|(&x, &y)| x as u128 * other.total as u128 == y as u128 * self.total as u128)
    }

    /// The unnormalized sum as an integer, when it is rational.
    pub fn as_integer(&self) -> Option<i128> {
        let rest = &self.counts[1..];
        if rest.windows(2).all(|w| w[0] == w[1]) {
            let c1 = rest.first().copied().unwrap_or(0) as i128;
            Some(self.counts[0] as i128 - c1)
        } else {
            None
        }
    }

    /// `|Σ|²` as an integer when it is rational (always for `p ≤ 3`).
    ///
    /// `|Σ c_j ζ^j|² = Σ_m A_m ζ^m` with `A_m = Σ_j c_j c_{j+m}`, which is
    /// rational exactly when `A_1 = … = A_{p−1}`.
    pub fn norm_squared(&self) -> Option<BigInt> {
        if let Some(v) = self.as_integer() {
            return Some(BigInt::from(v) * BigInt::from(v));
        }
        let p = self.p as usize;
        let auto: Vec<BigInt> = (0..p)
            .map(|m| (0..p).map(|j| BigInt::from(self.counts[j]) * BigInt::from(self.counts[(j + m) % p])).sum())
            .collect();
        auto[1..].windows(2).all(|w| w[0] == w[1]).then(|| &auto[0] - &auto[1])
    }

    /// Unnormalized complex value.
    pub fn raw_value(&self) -> Complex64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(j, &c)| Complex64::from_polar(c as f64, 2.0 * PI * j as f64 / self.p as f64))
            .sum()
    }

    /// `Σ/total`.
    pub fn value(&self) -> Complex64 {
        if self.total == 0 {
            return Complex64::new(0.0, 0.0);
        }
        // rational sums are formed exactly
        match self.as_integer() {
            Some(v) => Complex64::new(v as f64 / self.total as f64, 0.0),
            None => self.raw_value() / self.total as f64,
        }
    }
}

/// Exact rational `numerator / q^log_denominator`, the bias of a multilinear form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactBias {
    pub q: u32,
    pub numerator: u128,
    pub log_denominator: u32,
}

impl ExactBias {
    pub fn from_sum(q: u32, log_denominator: u32, sum: &CyclotomicSum) -> Result<ExactBias> {
        let v = sum
            .as_integer()
            .ok_or_else(|| Error::NotRational(format!("{:?}", sum.counts)))?;
        if v < 0 {
            return Err(Error::NotRational(format!("negative bias {v}")));
        }
        Ok(ExactBias { q, numerator: v as u128, log_denominator }.normalized())
    }

    /// Lowest terms in powers of `q`, so equal values compare equal structurally.
    pub fn normalized(mut self) -> ExactBias {
        if self.numerator == 0 {
            self.log_denominator = 0;
            return self;
        }
        while self.log_denominator > 0 && self.numerator % self.q as u128 == 0 {
            self.numerator /= self.q as u128;
            self.log_denominator -= 1;
        }
        self
    }

    pub fn one(q: u32) -> ExactBias {
        ExactBias { q, numerator: 1, log_denominator: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.numerator == 0
    }

    pub fn value(&self) -> f64 {
        self.numerator as f64 / (self.q as f64).powi(self.log_denominator as i32)
    }

    /// `−log_q` of the bias; `+∞` when the bias is 0.
    pub fn analytic_rank(&self) -> f64 {
        if self.numerator == 0 {
            return f64::INFINITY;
        }
        self.log_denominator as f64 - (self.numerator as f64).ln() / (self.q as f64).ln()
    }

    /// Compares bias values exactly.
    pub fn cmp_value(&self, other: &ExactBias) -> Ordering {
        let lhs = BigInt::from(self.numerator) * BigInt::from(other.q).pow(other.log_denominator);
        let rhs = BigInt::from(other.numerator) * BigInt::from(self.q).pow(self.log_denominator);
        lhs.cmp(&rhs)
    }

    /// `bias > q^{-r}`.
    pub fn exceeds_power(&self, r: u32) -> bool {
        BigInt::from(self.numerator) * BigInt::from(self.q).pow(r)
            > BigInt::from(self.q).pow(self.log_denominator)
    }

    /// `bias ≥ q^{-r}`.
    pub fn at_least_power(&self, r: u32) -> bool {
        BigInt::from(self.numerator) * BigInt::from(self.q).pow(r)
            >= BigInt::from(self.q).pow(self.log_denominator)
    }

    /// Smallest integer `k ≥ 0` with `bias ≥ q^{-k}`, i.e. `⌈−log_q bias⌉`.
    pub fn ceil_neg_log(&self) -> Option<u32> {
        if self.numerator == 0 {
            return None;
        }
        let target = BigInt::from(self.q).pow(self.log_denominator);
        let mut k = 0u32;
        let mut lhs = BigInt::from(self.numerator);
        while lhs < target {
            lhs *= self.q;
            k += 1;
        }
        Some(k)
    }
}

/// Analytic rank, exact or as a sampled interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AnalyticRank {
    Exact(ExactBias),
    Interval { estimate: f64, lo: f64, hi: f64 },
}

impl AnalyticRank {
    /// Point value (`+∞` for zero bias).
    pub fn value(&self) -> f64 {
        match self {
            AnalyticRank::Exact(b) => b.analytic_rank(),
            AnalyticRank::Interval { estimate, .. } => *estimate,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.value().is_infinite()
    }

    /// Ascending order by rank; exact values compare exactly, `+∞` last.
    pub fn cmp_rank(&self, other: &AnalyticRank) -> Ordering {
        match (self, other) {
            (AnalyticRank::Exact(a), AnalyticRank::Exact(b)) if a.q == b.q => b.cmp_value(a),
            _ => self.value().total_cmp(&other.value()),
        }
    }
}

impl Serialize for AnalyticRank {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_rank(&self.value(), s)
    }
}

/// Serializes `+∞` as the string `"inf"`.
pub fn serialize_rank<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

/// Parameters of a sampled estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McOptions {
    pub samples: u64,
    pub delta: f64,
    pub seed: u64,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions { samples: 100_000, delta: 0.01, seed: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mode {
    Exact,
    MonteCarlo(McOptions),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    Exact,
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BiasReport {
    pub mode: ModeKind,
    pub q: u32,
    pub n: usize,
    pub counts: Vec<u64>,
    pub value_re: f64,
    pub value_im: f64,
    pub magnitude: f64,
    pub ci_radius: f64,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    #[serde(skip)]
    pub exact: Option<CyclotomicSum>,
}

impl BiasReport {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.value_re, self.value_im)
    }
}

/// Exact character sum of `P` over `F_q^n`.
pub fn char_sum_exact(poly: &Polynomial, cfg: &ExecConfig) -> Result<CyclotomicSum> {
    let hist = kernel::value_histogram(poly, cfg)?;
    Ok(CyclotomicSum::from_values(poly.field(), &hist, FieldElement::ONE))
}

/// Hoeffding radius for the mean of variables in `[−1, 1]`, union-bounded over
/// the real and imaginary parts.
pub fn hoeffding_radius(samples: u64, delta: f64) -> f64 {
    (2.0 * (4.0 / delta).ln() / samples as f64).sqrt()
}

const MC_CHUNK: u64 = 1 << 12;

/// Trace-class counts of `samples` uniform draws, reproducible from `seed`.
pub fn sample_counts(poly: &Polynomial, opts: &McOptions, cfg: &ExecConfig) -> Result<Vec<u64>> {
    if opts.samples == 0 {
        return Err(Error::ZeroSamples);
    }
    let field = poly.field();
    let (q, n, p) = (field.q(), poly.n(), field.p() as usize);
    let chunks = opts.samples.div_ceil(MC_CHUNK);
    let run_chunk = |chunk: u64| -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(chunk);
        let len = MC_CHUNK.min(opts.samples - chunk * MC_CHUNK);
        let mut counts = vec![0u64; p];
        let mut point = vec![FieldElement::ZERO; n];
        for _ in 0..len {
            for x in point.iter_mut() {
                *x = FieldElement(rng.gen_range(0..q));
            }
            counts[field.char_exponent(poly.eval_unchecked(&point)) as usize] += 1;
        }
        counts
    };
    let parts: Vec<Vec<u64>> = cfg.run(|| (0..chunks).into_par_iter().map(run_chunk).collect());
    let mut total = vec![0u64; p];
    for part in parts {
        kernel::add_into(&mut total, part);
    }
    Ok(total)
}

/// Bias `E_v ψ(P(v))`, exact or sampled.
pub fn bias(poly: &Polynomial, mode: &Mode, cfg: &ExecConfig) -> Result<BiasReport> {
    let q = poly.field().q();
    match mode {
        Mode::Exact => {
            let sum = char_sum_exact(poly, cfg)?;
            let v = sum.value();
            Ok(BiasReport {
                mode: ModeKind::Exact,
                q,
                n: poly.n(),
                counts: sum.counts.clone(),
                value_re: v.re,
                value_im: v.im,
                magnitude: v.norm().min(1.0),
                ci_radius: 0.0,
                samples: None,
                seed: None,
                exact: Some(sum),
            })
        }
        Mode::MonteCarlo(opts) => {
            let counts = sample_counts(poly, opts, cfg)?;
            let v = CyclotomicSum::new(poly.field().p(), counts.clone()).value();
            Ok(BiasReport {
                mode: ModeKind::MonteCarlo,
                q,
                n: poly.n(),
                counts,
                value_re: v.re,
                value_im: v.im,
                magnitude: v.norm().min(1.0),
                ci_radius: hoeffding_radius(opts.samples, opts.delta),
                samples: Some(opts.samples),
                seed: Some(opts.seed),
                exact: None,
            })
        }
    }
}

/// Exact bias of a multilinear form given as a polynomial in `blocks · width` variables.
pub fn tensor_bias(base: &Polynomial, cfg: &ExecConfig) -> Result<ExactBias> {
    let sum = char_sum_exact(base, cfg)?;
    ExactBias::from_sum(base.field().q(), base.n() as u32, &sum)
}

/// Exact bias of a multilinear form, via `b(T) = Pr_{h_1..h_{d-1}}[T(h_1,…,h_{d-1},·) ≡ 0]`.
///
/// Enumerates `q^{n(d-1)}` points instead of `q^{nd}`.
pub fn multilinear_bias(tensor: &Tensor, cfg: &ExecConfig) -> Result<ExactBias> {
    let field = tensor.field();
    let (d, n) = (tensor.blocks(), tensor.width());
    let q = field.q();
    let inner = (d - 1) * n;
    // coefficient of each last-block variable, a form in the first d-1 blocks
    let coeffs: Vec<Polynomial> = (0..n).map(|j| tensor.base().partial(inner + j).with_n(inner)).collect();
    if inner == 0 {
        let zero = coeffs.iter().all(Polynomial::is_zero);
        return Ok(ExactBias { q, numerator: zero as u128, log_denominator: 0 });
    }
    cfg.check(domain_size(q, inner))?;
    let count = kernel::enumerate(
        field,
        inner,
        &coeffs,
        cfg,
        || 0u64,
        |acc, _, _, vals| {
            if vals.iter().all(|v| v.is_zero()) {
                *acc += 1;
            }
        },
        |a, b| *a += b,
    )?;
    Ok(ExactBias { q, numerator: count as u128, log_denominator: inner as u32 }.normalized())
}

/// `ar(P) = −log_q b(P̃)`.
pub fn analytic_rank(poly: &Polynomial, mode: &Mode, cfg: &ExecConfig) -> Result<AnalyticRank> {
    let tensor = poly.multilinearize()?;
    let base = tensor.base();
    match mode {
        Mode::Exact => Ok(AnalyticRank::Exact(multilinear_bias(&tensor, cfg)?)),
        Mode::MonteCarlo(_) => {
            let report = bias(base, mode, cfg)?;
            let q = poly.field().q() as f64;
            let floor = q.powi(-(base.n() as i32));
            let b = report.value_re;
            let r = report.ci_radius;
            let to_rank = |x: f64| -x.ln() / q.ln();
            Ok(AnalyticRank::Interval {
                estimate: to_rank(b.max(floor)),
                lo: to_rank((b + r).min(1.0)).max(0.0),
                hi: to_rank((b - r).max(floor)),
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GowersPath {
    /// Average of the `2^d`-fold multiplicative derivative over `(x, v_1..v_d)`.
    Definition,
    /// Bias of the multilinear form `P̃` (requires `deg P = d`).
    Tensor,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GowersReport {
    pub d: usize,
    pub path: GowersPath,
    /// Exact sum whose average is `‖ψ∘P‖_{U_d}^{2^d}`.
    pub power_sum: CyclotomicSum,
    pub norm: f64,
}

/// `‖ψ∘P‖_{U_d}`.
pub fn gowers_norm(poly: &Polynomial, d: usize, path: GowersPath, cfg: &ExecConfig) -> Result<GowersReport> {
    if d == 0 {
        return Err(Error::DegreeZero);
    }
    let power_sum = match path {
        GowersPath::Definition => gowers_definition_sum(poly, d, cfg)?,
        GowersPath::Tensor => {
            if poly.degree() as usize != d || poly.is_zero() {
                return Err(Error::BadParameters(format!(
                    "tensor path needs deg(P) = d, got deg {} and d = {d}",
                    poly.degree()
                )));
            }
            let tensor = poly.multilinearize()?;
            char_sum_exact(tensor.base(), cfg)?
        }
    };
    let power = power_sum.value().re.max(0.0);
    let norm = power.powf(1.0 / (1u64 << d) as f64);
    Ok(GowersReport { d, path, power_sum, norm })
}

fn gowers_definition_sum(poly: &Polynomial, d: usize, cfg: &ExecConfig) -> Result<CyclotomicSum> {
    let field = poly.field();
    let (q, n, p) = (field.q(), poly.n(), field.p());
    let size = domain_size(q, n);
    cfg.check(domain_size(q, n * (d + 1)).saturating_mul(1 << d))?;
    let size = size as usize;
    let exps: Vec<u32> = kernel::value_table(poly, cfg)?
        .into_iter()
        .map(|v| field.char_exponent(v))
        .collect();
    let adder = PointAdder::new(field, n);
    let corners = 1usize << d;
    let tuples = (size as u64).pow(d as u32);

    let run_x = |x: usize| -> Vec<u64> {
        let mut counts = vec![0u64; p as usize];
        let mut vs = vec![0usize; d];
        let mut pts = vec![0usize; corners];
        for _ in 0..tuples {
            pts[0] = x;
            let mut j = 0u32;
            for w in 1..corners {
                let top = usize::BITS - 1 - w.leading_zeros();
                pts[w] = adder.add(pts[w ^ (1 << top)], vs[top as usize]);
                let e = exps[pts[w]];
                j += if w.count_ones() % 2 == 1 { p - e } else { e };
            }
            j += exps[x];
            counts[(j % p) as usize] += 1;
            for v in vs.iter_mut() {
                *v += 1;
                if *v < size {
                    break;
                }
                *v = 0;
            }
        }
        counts
    };
    let parts: Vec<Vec<u64>> = cfg.run(|| (0..size).into_par_iter().map(run_x).collect());
    let mut counts = vec![0u64; p as usize];
    for part in parts {
        kernel::add_into(&mut counts, part);
    }
    Ok(CyclotomicSum::new(p, counts))
}

// Addition of points of F_q^n addressed by rank.
struct PointAdder {
    field: Field,
    q: u32,
    n: usize,
    size: usize,
    table: Option<Vec<u32>>,
}

const POINT_ADD_TABLE_LIMIT: usize = 1 << 10;

impl PointAdder {
    fn new(field: &Field, n: usize) -> PointAdder {
        let q = field.q();
        let size = domain_size(q, n) as usize;
        let mut adder = PointAdder { field: field.clone(), q, n, size, table: None };
        if size <= POINT_ADD_TABLE_LIMIT {
            let mut t = vec![0u32; size * size];
            for a in 0..size {
                for b in 0..size {
                    t[a * size + b] = adder.add_slow(a, b) as u32;
                }
            }
            adder.table = Some(t);
        }
        adder
    }

    fn add_slow(&self, a: usize, b: usize) -> usize {
        let pa = kernel::unrank(a as u64, self.q, self.n);
        let pb = kernel::unrank(b as u64, self.q, self.n);
        let sum: Vec<FieldElement> = pa.iter().zip(&pb).map(|(&x, &y)| self.field.add(x, y)).collect();
        kernel::rank(&sum, self.q) as usize
    }

    #[inline]
    fn add(&self, a: usize, b: usize) -> usize {
        match &self.table {
            Some(t) => t[a * self.size + b] as usize,
            None => self.add_slow(a, b),
        }
    }
}

/// Check of `|b(P)|^{2^d} ≤ b(P̃)`: exact when `|b(P)|²` is rational, otherwise
/// in floating point with a relative margin of `1e-9`. `None` means the two
/// sides are within that margin and `|b(P)|²` is irrational.
pub fn power_bound_holds(bias_sum: &CyclotomicSum, tensor_sum: &CyclotomicSum, d: usize) -> Option<bool> {
    let t = tensor_sum.as_integer()?;
    let Some(norm2) = bias_sum.norm_squared() else {
        let lhs = (bias_sum.value().norm_sqr()).powi(1 << (d - 1));
        let rhs = t as f64 / tensor_sum.total as f64;
        return if lhs <= rhs * (1.0 - 1e-9) {
            Some(true)
        } else if lhs >= rhs * (1.0 + 1e-9) {
            Some(false)
        } else {
            None
        };
    };
    // |S/N|^{2^d} ≤ T/M  ⇔  (|S|²)^{2^{d-1}} · M ≤ T · N^{2^d}
    let lhs = norm2.pow(1u32 << (d - 1)) * BigInt::from(tensor_sum.total);
    let rhs = BigInt::from(t) * BigInt::from(bias_sum.total).pow(1u32 << d);
    Some(lhs <= rhs)
}

/// Joint value distribution of a family over `F_q^n`.
pub fn joint_distribution(members: &[Polynomial], cfg: &ExecConfig) -> Result<FiberDistribution> {
    let first = members
        .first()
        .ok_or_else(|| Error::BadParameters("empty family".into()))?;
    let field = first.field().clone();
    let q = field.q();
    let c = members.len();
    let cells = domain_size(q, c);
    if cells > 1 << 20 {
        return Err(Error::BudgetExceeded { needed: cells, budget: 1 << 20 });
    }
    let cells = cells as usize;
    let counts = kernel::enumerate(
        &field,
        first.n(),
        members,
        cfg,
        || vec![0u64; cells],
        |acc, _, _, vals| {
            let idx = vals.iter().rev().fold(0usize, |a, v| a * q as usize + v.0 as usize);
            acc[idx] += 1;
        },
        kernel::add_into,
    )?;
    Ok(FiberDistribution::new(field, c, first.n(), counts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{field_create, prime_field};
    use crate::parse::parse;
    use crate::poly::random_poly;

    fn cfg() -> ExecConfig {
        ExecConfig::with_threads(2)
    }

    fn p(text: &str, q: u64, n: usize) -> Polynomial {
        parse(text, &prime_field(q).unwrap(), Some(n)).unwrap()
    }

    #[test]
    fn char_sum_examples() {
        let zero = Polynomial::zero(&prime_field(2).unwrap(), 3);
        let s = char_sum_exact(&zero, &cfg()).unwrap();
        assert_eq!(s.counts, vec![8, 0]);
        assert_eq!(s.value().re, 1.0);
        let s = char_sum_exact(&p("x1", 3, 2), &cfg()).unwrap();
        assert_eq!(s.counts, vec![3, 3, 3]);
        assert_eq!(s.value().norm(), 0.0);
        let s = char_sum_exact(&p("x1*x2", 2, 2), &cfg()).unwrap();
        assert_eq!(s.counts, vec![3, 1]);
        assert_eq!(s.value().re, 0.5);
    }

    #[test]
    fn cyclotomic_canonical_equality() {
        let a = CyclotomicSum::new(3, vec![5, 2, 2]);
        let b = CyclotomicSum::new(3, vec![3, 0, 0]);
        assert_eq!(a.canonical(), b.canonical());
        assert_eq!(a.as_integer(), Some(3));
        let c = CyclotomicSum::new(3, vec![8, 2, 2]);
        assert!(c.same_average(&CyclotomicSum::new(3, vec![4, 1, 1])));
        assert!(!c.same_average(&CyclotomicSum::new(3, vec![6, 0, 0])));
        assert_eq!(CyclotomicSum::new(3, vec![2, 1, 0]).norm_squared(), Some(BigInt::from(3)));
        // Gauss sum over F_5: x² takes 0 once, 1 and 4 twice
        assert_eq!(CyclotomicSum::new(5, vec![1, 2, 0, 0, 2]).norm_squared(), Some(BigInt::from(5)));
        assert_eq!(CyclotomicSum::new(5, vec![1, 1, 0, 0, 0]).norm_squared(), None);
    }

    #[test]
    fn constant_bias_has_unit_magnitude() {
        let f9 = field_create(3, 2).unwrap();
        let c = Polynomial::constant(&f9, 2, f9.generator().unwrap());
        let r = bias(&c, &Mode::Exact, &cfg()).unwrap();
        assert!((r.magnitude - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_bias_is_real_nonnegative() {
        let f3 = prime_field(3).unwrap();
        for seed in 0..20 {
            let t = random_poly(&f3, 2, 3, 5, seed).multilinearize().unwrap();
            let s = char_sum_exact(t.base(), &cfg()).unwrap();
            let v = s.as_integer().expect("rational");
            assert!(v >= 0);
        }
    }

    #[test]
    fn monte_carlo_example() {
        let poly = p("x1*x2", 2, 2);
        let opts = McOptions { samples: 100_000, delta: 0.01, seed: 17 };
        let r = bias(&poly, &Mode::MonteCarlo(opts), &cfg()).unwrap();
        assert!((r.value_re - 0.5).abs() <= r.ci_radius);
        let again = bias(&poly, &Mode::MonteCarlo(opts), &ExecConfig::with_threads(7)).unwrap();
        assert_eq!(r, again);
        let zero = McOptions { samples: 0, ..opts };
        assert!(matches!(bias(&poly, &Mode::MonteCarlo(zero), &cfg()), Err(Error::ZeroSamples)));
    }

    #[test]
    fn analytic_rank_examples() {
        let lin = analytic_rank(&p("x1 + 2*x2", 3, 2), &Mode::Exact, &cfg()).unwrap();
        assert!(lin.is_infinite());
        // P̃ = h1 k2 + h2 k1 over F_2: zero set of k ↦ (k2, k1) forces k = 0, so b = 4/16
        let ar = analytic_rank(&p("x1*x2", 2, 2), &Mode::Exact, &cfg()).unwrap();
        let AnalyticRank::Exact(b) = ar else { panic!() };
        assert_eq!((b.numerator, b.log_denominator), (1, 2));
        assert_eq!(ar.value(), 2.0);
        let shifted = analytic_rank(&p("x1*x2 + x1 + 1", 2, 2), &Mode::Exact, &cfg()).unwrap();
        assert_eq!(shifted, ar);
        assert!(matches!(analytic_rank(&p("1", 2, 2), &Mode::Exact, &cfg()), Err(Error::DegreeZero)));
    }

    #[test]
    fn gowers_examples() {
        let f5 = prime_field(5).unwrap();
        let c = Polynomial::constant(&f5, 2, FieldElement(2));
        let g = gowers_norm(&c, 2, GowersPath::Definition, &cfg()).unwrap();
        assert!((g.norm - 1.0).abs() < 1e-12);
        let poly = p("x1^2 + 3*x1*x2 + x2", 5, 2);
        let u1 = gowers_norm(&poly, 1, GowersPath::Definition, &cfg()).unwrap();
        let b = bias(&poly, &Mode::Exact, &cfg()).unwrap();
        assert!((u1.norm - b.magnitude).abs() < 1e-12);
        let xy = p("x1*x2", 2, 2);
        let def = gowers_norm(&xy, 2, GowersPath::Definition, &cfg()).unwrap();
        let ten = gowers_norm(&xy, 2, GowersPath::Tensor, &cfg()).unwrap();
        assert!(def.power_sum.same_average(&ten.power_sum));
        assert!((def.norm - 0.25f64.powf(0.25)).abs() < 1e-12);
        assert!(matches!(gowers_norm(&xy, 3, GowersPath::Tensor, &cfg()), Err(Error::BadParameters(_))));
    }

    #[test]
    fn multilinear_bias_matches_full_sum() {
        for (q, d, n) in [(2u64, 2usize, 3usize), (3, 2, 2), (2, 3, 2), (3, 3, 1), (5, 1, 2)] {
            let f = prime_field(q).unwrap();
            for seed in 0..10 {
                let t = random_poly(&f, n, d as u32, 4, seed).multilinearize().unwrap();
                let fast = multilinear_bias(&t, &cfg()).unwrap();
                let full = tensor_bias(t.base(), &cfg()).unwrap();
                assert_eq!(fast, full);
            }
        }
    }

    #[test]
    fn exact_bias_arithmetic() {
        let b = ExactBias { q: 2, numerator: 4, log_denominator: 4 };
        assert_eq!(b.ceil_neg_log(), Some(2));
        assert!(b.exceeds_power(3));
        assert!(!b.exceeds_power(2));
        assert!(b.at_least_power(2));
        assert!(!b.at_least_power(1));
        let c = ExactBias { q: 3, numerator: 5, log_denominator: 3 };
        // 5/27 ≥ 1/9? no; ≥ 1/27 yes -> ceil(-log_3(5/27)) = 2
        assert_eq!(c.ceil_neg_log(), Some(2));
        assert_eq!(ExactBias { q: 3, numerator: 0, log_denominator: 2 }.ceil_neg_log(), None);
    }

    #[test]
    fn joint_distribution_examples() {
        let d = joint_distribution(&[p("x1", 3, 2)], &cfg()).unwrap();
        assert_eq!(d.counts(), &[3, 3, 3]);
        let d = joint_distribution(&[p("x1", 3, 2), p("x1", 3, 2)], &cfg()).unwrap();
        for (idx, &c) in d.counts().iter().enumerate() {
            let diag = idx % 3 == idx / 3;
            assert_eq!(c, if diag { 3 } else { 0 });
        }
        let d = joint_distribution(&[p("x1", 2, 3), p("x2*x3", 2, 3)], &cfg()).unwrap();
        // index = λ1 + 2 λ2
        assert_eq!(d.count(&[FieldElement(0), FieldElement(0)]), 3);
        assert_eq!(d.count(&[FieldElement(0), FieldElement(1)]), 1);
        assert_eq!(d.count(&[FieldElement(1), FieldElement(0)]), 3);
        assert_eq!(d.count(&[FieldElement(1), FieldElement(1)]), 1);
    }
}
