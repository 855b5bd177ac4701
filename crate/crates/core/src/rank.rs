//! Partition-rank certificates, lower bounds from bias, and strength checks.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expsum::multilinear_bias;
use crate::gf::{Field, FieldElement, FieldParams};
use crate::kernel::{domain_size, ExecConfig};
use crate::linalg;
use crate::parse::parse;
use crate::poly::{Monomial, Polynomial, Tensor};

/// One product `Q(x_J) · R(x_{J^c})`. Both factors live in the tensor's full
/// variable space; `j` holds 0-based block indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summand {
    pub j: Vec<usize>,
    pub q: Polynomial,
    pub r: Polynomial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionCertificate {
    pub blocks: usize,
    pub width: usize,
    pub summands: Vec<Summand>,
}

impl PartitionCertificate {
    pub fn empty(blocks: usize, width: usize) -> PartitionCertificate {
        PartitionCertificate { blocks, width, summands: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    /// `{ "blocks", "width", "summands": [{ "J": [1-based], "Q", "R" }] }`.
    pub fn to_json(&self) -> Value {
        json!({
            "blocks": self.blocks,
            "width": self.width,
            "summands": self.summands.iter().map(|s| json!({
                "J": s.j.iter().map(|b| b + 1).collect::<Vec<_>>(),
                "Q": s.q.to_string(),
                "R": s.r.to_string(),
            })).collect::<Vec<_>>(),
        })
    }

    /// Reads the JSON form; `width` may be omitted when supplied by the caller.
    pub fn from_json(value: &Value, field: &Field, width: Option<usize>) -> Result<PartitionCertificate> {
        let bad = |msg: &str| Error::BlockMismatch(msg.to_string());
        let blocks = value["blocks"].as_u64().ok_or_else(|| bad("missing \"blocks\""))? as usize;
        let width = match (value["width"].as_u64(), width) {
            (Some(w), Some(expected)) if w as usize != expected => {
                return Err(bad(&format!("certificate width {w} does not match {expected}")))
            }
            (Some(w), _) => w as usize,
            (None, Some(w)) => w,
            (None, None) => return Err(bad("missing \"width\"")),
        };
        let mut summands = Vec::new();
        for s in value["summands"].as_array().ok_or_else(|| bad("missing \"summands\""))? {
            let j = s["J"]
                .as_array()
                .ok_or_else(|| bad("missing \"J\""))?
                .iter()
                .map(|b| match b.as_u64() {
                    Some(b) if b >= 1 => Ok(b as usize - 1),
                    _ => Err(bad("block indices are positive integers")),
                })
                .collect::<Result<Vec<_>>>()?;
            let text = |key: &str| s[key].as_str().ok_or_else(|| bad(&format!("missing \"{key}\"")));
            let q = parse(text("Q")?, field, Some(blocks * width))?;
            let r = parse(text("R")?, field, Some(blocks * width))?;
            summands.push(Summand { j, q, r });
        }
        Ok(PartitionCertificate { blocks, width, summands })
    }

    /// Certificate for `T1 ⊕ T2` (see [`Tensor::direct_sum`]) by concatenation.
    pub fn direct_sum(&self, other: &PartitionCertificate) -> Result<PartitionCertificate> {
        if self.blocks != other.blocks {
            return Err(Error::BlockMismatch("different block counts".into()));
        }
        let (d, n1, n2) = (self.blocks, self.width, other.width);
        let n = n1 + n2;
        let left = |p: &Polynomial| p.map_vars(d * n, |v| (v / n1) * n + v % n1);
        let right = |p: &Polynomial| p.map_vars(d * n, |v| (v / n2) * n + n1 + v % n2);
        let summands = self
            .summands
            .iter()
            .map(|s| Summand { j: s.j.clone(), q: left(&s.q), r: left(&s.r) })
            .chain(other.summands.iter().map(|s| Summand { j: s.j.clone(), q: right(&s.q), r: right(&s.r) }))
            .collect();
        Ok(PartitionCertificate { blocks: d, width: n, summands })
    }
}

/// Checks that `poly` is multilinear in exactly the blocks of `mask`.
fn factor_in_blocks(poly: &Polynomial, mask: u32, d: usize, n: usize) -> bool {
    poly.n() == d * n
        && poly.terms().all(|(m, _)| {
            let mut seen = 0u32;
            for &(v, e) in m.factors() {
                let bit = 1u32 << (v as usize / n);
                if e != 1 || seen & bit != 0 {
                    return false;
                }
                seen |= bit;
            }
            seen == mask
        })
}

fn block_mask(j: &[usize], d: usize) -> Result<u32> {
    let mut mask = 0u32;
    for &b in j {
        if b >= d || mask >> b & 1 == 1 {
            return Err(Error::BlockMismatch(format!("invalid block list {:?}", j)));
        }
        mask |= 1 << b;
    }
    if mask == 0 || mask == (1 << d) - 1 {
        return Err(Error::BlockMismatch("J must be a proper nonempty subset of the blocks".into()));
    }
    Ok(mask)
}

/// Whether `Σ Q_i R_i = T` as polynomials.
pub fn verify_certificate(tensor: &Tensor, cert: &PartitionCertificate) -> Result<bool> {
    let (d, n) = (tensor.blocks(), tensor.width());
    if cert.blocks != d || cert.width != n {
        return Err(Error::BlockMismatch(format!(
            "certificate has {} blocks of width {}, tensor has {d} of width {n}",
            cert.blocks, cert.width
        )));
    }
    let full = (1u32 << d) - 1;
    let mut sum = Polynomial::zero(tensor.field(), d * n);
    for s in &cert.summands {
        let mask = block_mask(&s.j, d)?;
        if **s.q.field() != **tensor.field() || **s.r.field() != **tensor.field() {
            return Err(Error::FieldMismatch);
        }
        if !factor_in_blocks(&s.q, mask, d, n) || !factor_in_blocks(&s.r, full ^ mask, d, n) {
            return Err(Error::BlockMismatch(format!("factors of summand J = {:?} leave their blocks", s.j)));
        }
        sum = sum.add(&s.q.mul(&s.r));
    }
    Ok(sum == *tensor.base())
}

// Dense coefficient array of a d-tensor: entry (i_0, …, i_{d-1}) at Σ i_k n^k.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Dense {
    d: usize,
    n: usize,
    data: Vec<FieldElement>,
}

impl Dense {
    fn from_tensor(t: &Tensor) -> Dense {
        let (d, n) = (t.blocks(), t.width());
        let mut data = vec![FieldElement::ZERO; n.pow(d as u32)];
        for (m, c) in t.base().terms() {
            let idx: usize = m.factors().iter().map(|&(v, _)| (v as usize % n) * n.pow((v as usize / n) as u32)).sum();
            data[idx] = c;
        }
        Dense { d, n, data }
    }

    fn nonzeros(&self) -> usize {
        self.data.iter().filter(|x| !x.is_zero()).count()
    }

    fn blocks_of(&self, mask: u32) -> Vec<usize> {
        (0..self.d).filter(|b| mask >> b & 1 == 1).collect()
    }

    // (row, column) of a full index under the split.
    fn split(&self, idx: usize, rows: &[usize], cols: &[usize]) -> (usize, usize) {
        let digit = |b: usize| (idx / self.n.pow(b as u32)) % self.n;
        let pack = |bs: &[usize]| bs.iter().rev().fold(0, |acc, &b| acc * self.n + digit(b));
        (pack(rows), pack(cols))
    }

    fn flattening(&self, mask: u32) -> linalg::Matrix {
        let rows = self.blocks_of(mask);
        let cols = self.blocks_of(!mask & ((1 << self.d) - 1));
        let mut m = vec![vec![FieldElement::ZERO; self.n.pow(cols.len() as u32)]; self.n.pow(rows.len() as u32)];
        for (idx, &v) in self.data.iter().enumerate() {
            let (r, c) = self.split(idx, &rows, &cols);
            m[r][c] = v;
        }
        m
    }

    fn subtract(&mut self, field: &FieldParams, s: &DenseSummand) {
        let rows = self.blocks_of(s.mask);
        let cols = self.blocks_of(!s.mask & ((1 << self.d) - 1));
        for idx in 0..self.data.len() {
            let (r, c) = self.split(idx, &rows, &cols);
            let prod = field.mul(s.q[r], s.r[c]);
            self.data[idx] = field.sub(self.data[idx], prod);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct DenseSummand {
    mask: u32,
    q: Vec<FieldElement>,
    r: Vec<FieldElement>,
}

impl DenseSummand {
    fn to_summand(&self, field: &Field, d: usize, n: usize) -> Summand {
        let full = (1u32 << d) - 1;
        let factor = |mask: u32, coeffs: &[FieldElement]| {
            let blocks: Vec<usize> = (0..d).filter(|b| mask >> b & 1 == 1).collect();
            Polynomial::from_terms(
                field,
                d * n,
                coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(idx, &c)| {
                    let m = Monomial::from_pairs(
                        blocks.iter().enumerate().map(|(k, &b)| (b * n + (idx / n.pow(k as u32)) % n, 1)),
                    );
                    (m, c)
                }),
            )
        };
        let (q, r) = (factor(self.mask, &self.q), factor(full ^ self.mask, &self.r));
        // J and J^c name the same partition; report the smaller side
        let small = self.mask.count_ones() * 2 <= d as u32;
        let (mask, q, r) = if small { (self.mask, q, r) } else { (full ^ self.mask, r, q) };
        Summand { j: (0..d).filter(|b| mask >> b & 1 == 1).collect(), q, r }
    }
}

/// Splits up to complement: every proper `J` containing block 0.
fn splits(d: usize) -> Vec<u32> {
    (1u32..(1 << d) - 1).filter(|m| m & 1 == 1).collect()
}

/// Rank factorization `M = C·R` of the flattening, one summand per pivot.
fn flattening_summands(field: &FieldParams, dense: &Dense, mask: u32) -> Vec<DenseSummand> {
    let m = dense.flattening(mask);
    let mut reduced = m.clone();
    let pivots = linalg::rref(field, &mut reduced);
    pivots
        .iter()
        .zip(reduced)
        .map(|(&col, r)| DenseSummand { mask, q: m.iter().map(|row| row[col]).collect(), r })
        .collect()
}

fn assemble(field: &Field, dense: &Dense, parts: &[DenseSummand]) -> PartitionCertificate {
    PartitionCertificate {
        blocks: dense.d,
        width: dense.n,
        summands: parts.iter().map(|s| s.to_summand(field, dense.d, dense.n)).collect(),
    }
}

/// Exact partition rank of a bilinear form (matrix rank) with a matching certificate.
pub fn prank_bilinear(tensor: &Tensor) -> Result<(usize, PartitionCertificate)> {
    if tensor.blocks() != 2 {
        return Err(Error::BlockMismatch(format!("bilinear rank needs 2 blocks, got {}", tensor.blocks())));
    }
    let dense = Dense::from_tensor(tensor);
    let parts = flattening_summands(tensor.field(), &dense, 1);
    Ok((parts.len(), assemble(tensor.field(), &dense, &parts)))
}

/// `⌈−log_q b(T)⌉`, a lower bound on `pr(T)`.
pub fn prank_lower(tensor: &Tensor, cfg: &ExecConfig) -> Result<u32> {
    multilinear_bias(tensor, cfg)?.ceil_neg_log().ok_or(Error::ZeroBias)
}

pub const GREEDY_RESTARTS: u64 = 16;

/// Greedy peeling: each step removes, for some split, a group of proportional
/// rows of the residual's flattening. Restart 0 takes the first best move;
/// later restarts break ties at random.
fn greedy(field: &FieldParams, dense: &Dense, restart: u64, seed: u64) -> Vec<DenseSummand> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart);
    let mut residual = dense.clone();
    let mut out = Vec::new();
    while residual.nonzeros() > 0 {
        let mut moves: Vec<(usize, DenseSummand)> = Vec::new();
        for mask in splits(dense.d) {
            let m = residual.flattening(mask);
            // rows grouped by their normalized direction
            let mut groups: BTreeMap<Vec<u32>, (Vec<FieldElement>, usize, Vec<FieldElement>)> = BTreeMap::new();
            for (i, row) in m.iter().enumerate() {
                let Some(lead) = row.iter().copied().find(|x| !x.is_zero()) else { continue };
                let inv = field.inv(lead).expect("nonzero");
                let dir: Vec<FieldElement> = row.iter().map(|&x| field.mul(x, inv)).collect();
                let key: Vec<u32> = dir.iter().map(|x| x.0).collect();
                let entry = groups.entry(key).or_insert_with(|| (vec![FieldElement::ZERO; m.len()], 0, dir));
                entry.0[i] = lead;
                entry.1 += row.iter().filter(|x| !x.is_zero()).count();
            }
            for (_, (q, removed, r)) in groups {
                moves.push((removed, DenseSummand { mask, q, r }));
            }
        }
        let best = moves.iter().map(|m| m.0).max().expect("residual is nonzero");
        let ties: Vec<&DenseSummand> = moves.iter().filter(|m| m.0 == best).map(|m| &m.1).collect();
        let pick = if restart == 0 { ties[0] } else { *ties.choose(&mut rng).expect("nonempty") };
        residual.subtract(field, pick);
        out.push(pick.clone());
    }
    out
}

/// All normalized rank-one summands (`Q` with leading coefficient 1, `R ≠ 0`),
/// or `None` when there are more than `limit`.
fn all_summands(field: &FieldParams, d: usize, n: usize, limit: u64) -> Option<Vec<DenseSummand>> {
    let q = field.q();
    let mut total: u128 = 0;
    for mask in splits(d) {
        let k = mask.count_ones() as usize;
        let qs = (domain_size(q, n.pow(k as u32)) - 1) / (q as u128 - 1);
        let rs = domain_size(q, n.pow((d - k) as u32)) - 1;
        total = total.saturating_add(qs.saturating_mul(rs));
    }
    if total > limit as u128 {
        return None;
    }
    let mut out = Vec::with_capacity(total as usize);
    for mask in splits(d) {
        let k = mask.count_ones() as usize;
        let (qlen, rlen) = (n.pow(k as u32), n.pow((d - k) as u32));
        let qs: Vec<Vec<FieldElement>> = (1..domain_size(q, qlen) as u64)
            .map(|i| crate::kernel::unrank(i, q, qlen))
            .filter(|v| v.iter().find(|x| !x.is_zero()) == Some(&FieldElement::ONE))
            .collect();
        for qv in &qs {
            for i in 1..domain_size(q, rlen) as u64 {
                out.push(DenseSummand { mask, q: qv.clone(), r: crate::kernel::unrank(i, q, rlen) });
            }
        }
    }
    Some(out)
}

/// A single summand equal to `residual`, if one exists.
fn as_single_summand(field: &FieldParams, residual: &Dense) -> Option<DenseSummand> {
    splits(residual.d).into_iter().find_map(|mask| {
        let parts = flattening_summands(field, residual, mask);
        (parts.len() == 1).then(|| parts.into_iter().next().unwrap())
    })
}

/// Exhaustive search for certificates with fewer than `below` summands,
/// examining at most `budget` tuples in total.
fn exhaustive(field: &FieldParams, dense: &Dense, below: usize, budget: u64) -> Option<Vec<DenseSummand>> {
    let options = all_summands(field, dense.d, dense.n, budget)?;
    let mut spent = 0u64;
    for r in 1..below {
        // (r-1)-multisets of options, then the residual must be one summand
        let k = r - 1;
        let count = multiset_count(options.len() as u128, k as u128);
        if spent as u128 + count > budget as u128 {
            return None;
        }
        spent += count as u64;
        let mut idx = vec![0usize; k];
        loop {
            let mut residual = dense.clone();
            for &i in &idx {
                residual.subtract(field, &options[i]);
            }
            if let Some(last) = as_single_summand(field, &residual) {
                let mut parts: Vec<DenseSummand> = idx.iter().map(|&i| options[i].clone()).collect();
                parts.push(last);
                return Some(parts);
            }
            // next nondecreasing index tuple
            let Some(pos) = (0..k).rev().find(|&p| idx[p] + 1 < options.len()) else { break };
            let v = idx[pos] + 1;
            for slot in idx[pos..].iter_mut() {
                *slot = v;
            }
        }
    }
    None
}

fn multiset_count(n: u128, k: u128) -> u128 {
    // C(n + k - 1, k)
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n + i) / (i + 1);
    }
    acc
}

/// Searches for a small partition-rank certificate. The result always
/// verifies; its size is an upper bound, never a claim of minimality.
///
/// Candidates come from every flattening, from seeded greedy restarts and
/// from a budgeted exhaustive search below the best size found. The smallest
/// certificate wins, ties broken by serialized form.
pub fn prank_upper_search(tensor: &Tensor, budget: u64, seed: u64, cfg: &ExecConfig) -> Option<PartitionCertificate> {
    let field = tensor.field();
    let dense = Dense::from_tensor(tensor);
    if dense.nonzeros() == 0 {
        return Some(PartitionCertificate::empty(dense.d, dense.n));
    }
    let mut candidates: Vec<Vec<DenseSummand>> =
        splits(dense.d).into_iter().map(|mask| flattening_summands(field, &dense, mask)).collect();
    let greedy_runs: Vec<Vec<DenseSummand>> =
        cfg.run(|| (0..GREEDY_RESTARTS).into_par_iter().map(|r| greedy(field, &dense, r, seed)).collect());
    candidates.extend(greedy_runs);
    let best = candidates.iter().map(Vec::len).min().expect("at least one split");
    if let Some(found) = exhaustive(field, &dense, best, budget) {
        candidates.push(found);
    }
    let cert = candidates
        .iter()
        .map(|parts| assemble(field, &dense, parts))
        .min_by_key(|c| (c.len(), c.to_json().to_string()))
        .expect("nonempty");
    debug_assert!(verify_certificate(tensor, &cert).unwrap_or(false));
    Some(cert)
}

pub const DEFAULT_SEARCH_BUDGET: u64 = 100_000;

/// The sandwich `r_nc(P) ≤ pr(P̃) ≤ C_d · r_nc(P)` read from both ends.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankBounds {
    /// `⌈pr_lower / C_d⌉`, a lower bound on the nc-rank.
    pub lower: u32,
    /// Best certificate size, an upper bound on the nc-rank.
    pub upper: Option<u32>,
    pub pr_lower: u32,
    pub pr_upper: Option<u32>,
    pub c_d: f64,
    pub method: String,
}

/// Bounds on the nc-rank of `P`. `c_d` defaults to `4^d`, or 1 when `p > d`.
pub fn ncrank_bounds(poly: &Polynomial, c_d: Option<f64>, budget: u64, seed: u64, cfg: &ExecConfig) -> Result<RankBounds> {
    let d = poly.degree();
    if poly.is_zero() || d == 0 {
        return Err(Error::DegreeZero);
    }
    if d == 1 {
        return Err(Error::DegreeTooLow("linear polynomials have infinite rank".into()));
    }
    let c_d = c_d.unwrap_or(if poly.field().p() > d { 1.0 } else { 4f64.powi(d as i32) });
    if c_d.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::NonpositiveConstant("C_d"));
    }
    let tensor = poly.multilinearize()?;
    let pr_lower = prank_lower(&tensor, cfg)?;
    let cert = prank_upper_search(&tensor, budget, seed, cfg);
    let pr_upper = cert.map(|c| c.len() as u32);
    Ok(RankBounds {
        lower: (pr_lower as f64 / c_d).ceil() as u32,
        upper: pr_upper,
        pr_lower,
        pr_upper,
        c_d,
        method: "bias lower bound; flattening, greedy and exhaustive certificate search".into(),
    })
}

/// Whether `P = Σ Q_i R_i` with every factor of degree below `deg P`.
pub fn strength_verify(poly: &Polynomial, summands: &[(Polynomial, Polynomial)]) -> bool {
    let d = poly.degree();
    let mut sum = Polynomial::zero(poly.field(), poly.n());
    for (q, r) in summands {
        if **q.field() != **poly.field() || **r.field() != **poly.field() || q.n() != poly.n() || r.n() != poly.n() {
            return false;
        }
        if q.degree() >= d || r.degree() >= d {
            return false;
        }
        sum = sum.add(&q.mul(r));
    }
    sum == *poly
}
