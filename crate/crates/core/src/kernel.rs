//! Exhaustive enumeration of `F_q^n` with incremental polynomial evaluation.
//!
//! Points are visited in odometer order (coordinate 0 changes fastest), so
//! the visit index is the mixed-radix rank of the point. Each polynomial is
//! compiled into a chain of partial evaluations: level `k` holds the
//! coefficients of the polynomial in `x_0..x_{k-1}` obtained by substituting
//! the current values of `x_k..x_{n-1}`. When coordinate `i` ticks only
//! levels `i..0` are recomputed, so the innermost step touches just the
//! distinct powers of `x_0`.
//!
//! The domain is split into shards by the top coordinates. Shard results
//! are merged in shard order, so the output does not depend on the number
//! of worker threads.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf::{Field, FieldElement};
use crate::poly::{Monomial, Polynomial};

pub const DEFAULT_BUDGET: u64 = 1 << 34;

const MIN_SHARDS: u64 = 256;
const SINGLE_SHARD_BELOW: u64 = 1 << 12;

/// Parallelism and size limits for exact computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExecConfig {
    pub threads: usize,
    /// Maximum number of points an exact enumeration may visit.
    pub budget: u64,
}

impl Default for ExecConfig {
    fn default() -> Self {
        let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
        ExecConfig { threads, budget: DEFAULT_BUDGET }
    }
}

impl ExecConfig {
    pub fn with_threads(threads: usize) -> Self {
        ExecConfig { threads: threads.max(1), ..Default::default() }
    }

    /// Fails with `BudgetExceeded` when `count` points would be visited.
    pub fn check(&self, count: u128) -> Result<()> {
        if count > self.budget as u128 {
            Err(Error::BudgetExceeded { needed: count, budget: self.budget })
        } else {
            Ok(())
        }
    }

    pub(crate) fn run<R: Send>(&self, job: impl FnOnce() -> R + Send) -> R {
        match rayon::ThreadPoolBuilder::new().num_threads(self.threads.max(1)).build() {
            Ok(pool) => pool.install(job),
            Err(_) => job(),
        }
    }
}

/// `q^n` as a `u128`, saturating.
pub fn domain_size(q: u32, n: usize) -> u128 {
    (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX)
}

struct Transition {
    child: u32,
    parent: u32,
    exp: u32,
}

/// A polynomial prepared for incremental evaluation.
pub struct Compiled {
    n: usize,
    top: Vec<FieldElement>,
    // transitions[k] maps level k+1 residuals onto level k residuals via x_k
    transitions: Vec<Vec<Transition>>,
    widths: Vec<usize>,
    max_exp: u32,
}

impl Compiled {
    pub fn new(poly: &Polynomial) -> Compiled {
        let n = poly.n();
        let mut residuals: Vec<Monomial> = Vec::new();
        let mut top = Vec::new();
        for (m, c) in poly.terms() {
            residuals.push(m.clone());
            top.push(c);
        }
        let mut max_exp = 1;
        let mut transitions: Vec<Vec<Transition>> = (0..n).map(|_| Vec::new()).collect();
        let mut widths = vec![0usize; n + 1];
        widths[n] = residuals.len();
        for k in (0..n).rev() {
            let mut parents: Vec<Monomial> = Vec::new();
            let mut index: std::collections::HashMap<Monomial, u32> = std::collections::HashMap::new();
            let mut level = Vec::with_capacity(residuals.len());
            for (child, r) in residuals.iter().enumerate() {
                let exp = r.exponent(k);
                max_exp = max_exp.max(exp);
                let parent = Monomial::from_pairs(
                    r.factors().iter().filter(|&&(v, _)| v as usize != k).map(|&(v, e)| (v as usize, e)),
                );
                let next = parents.len() as u32;
                let pid = *index.entry(parent.clone()).or_insert_with(|| {
                    parents.push(parent);
                    next
                });
                level.push(Transition { child: child as u32, parent: pid, exp });
            }
            transitions[k] = level;
            widths[k] = parents.len();
            residuals = parents;
        }
        Compiled { n, top, transitions, widths, max_exp }
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

struct PowTable {
    q: usize,
    table: Vec<FieldElement>,
}

impl PowTable {
    fn new(field: &Field, max_exp: u32) -> PowTable {
        let q = field.q() as usize;
        let mut table = Vec::with_capacity((max_exp as usize + 1) * q);
        for e in 0..=max_exp {
            for x in field.elements() {
                table.push(field.pow(x, e as u64));
            }
        }
        PowTable { q, table }
    }

    #[inline]
    fn get(&self, x: FieldElement, e: u32) -> FieldElement {
        self.table[e as usize * self.q + x.0 as usize]
    }
}

struct State<'a> {
    compiled: &'a Compiled,
    levels: Vec<Vec<FieldElement>>,
}

impl<'a> State<'a> {
    fn new(compiled: &'a Compiled) -> State<'a> {
        let mut levels: Vec<Vec<FieldElement>> =
            compiled.widths.iter().map(|&w| vec![FieldElement::ZERO; w]).collect();
        levels[compiled.n] = compiled.top.clone();
        State { compiled, levels }
    }

    #[inline]
    fn update(&mut self, field: &Field, pows: &PowTable, from: usize, point: &[FieldElement]) {
        for k in (0..=from).rev() {
            let (lower, upper) = self.levels.split_at_mut(k + 1);
            let target = &mut lower[k];
            let source = &upper[0];
            target.iter_mut().for_each(|c| *c = FieldElement::ZERO);
            let x = point[k];
            for t in &self.compiled.transitions[k] {
                let c = source[t.child as usize];
                if c.is_zero() {
                    continue;
                }
                let term = if t.exp == 0 { c } else { field.mul(c, pows.get(x, t.exp)) };
                let slot = &mut target[t.parent as usize];
                *slot = field.add(*slot, term);
            }
        }
    }

    #[inline]
    fn value(&self) -> FieldElement {
        self.levels[0].first().copied().unwrap_or(FieldElement::ZERO)
    }
}

/// Shard layout: the top `fixed` coordinates select a shard.
fn shard_plan(q: u32, n: usize) -> usize {
    let total = domain_size(q, n);
    if total < SINGLE_SHARD_BELOW as u128 {
        return 0;
    }
    let mut fixed = 0;
    while fixed < n && domain_size(q, fixed) < MIN_SHARDS as u128 {
        fixed += 1;
    }
    fixed
}

/// Visits every point of `F_q^n` with the values of `polys` there.
///
/// `visit(acc, index, point, values)` sees points in odometer order within
/// each shard; shard accumulators are combined with `merge` in shard order.
pub fn enumerate<A, I, V, M>(
    field: &Field,
    n: usize,
    polys: &[Polynomial],
    cfg: &ExecConfig,
    init: I,
    visit: V,
    merge: M,
) -> Result<A>
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    V: Fn(&mut A, u64, &[FieldElement], &[FieldElement]) + Sync + Send,
    M: Fn(&mut A, A),
{
    for p in polys {
        if **p.field() != **field {
            return Err(Error::FieldMismatch);
        }
        if p.n() != n {
            return Err(Error::DimensionMismatch { expected: n, got: p.n() });
        }
    }
    let q = field.q();
    let total = domain_size(q, n);
    cfg.check(total)?;
    let compiled: Vec<Compiled> = polys.iter().map(Compiled::new).collect();
    let max_exp = compiled.iter().map(|c| c.max_exp).max().unwrap_or(1);
    let pows = PowTable::new(field, max_exp);
    let fixed = shard_plan(q, n);
    let free = n - fixed;
    let shard_count = domain_size(q, fixed) as u64;
    let shard_len = domain_size(q, free) as u64;

    let run_shard = |shard: u64| -> A {
        let mut acc = init();
        let mut point = vec![FieldElement::ZERO; n];
        let mut rest = shard;
        for slot in point[free..].iter_mut() {
            *slot = FieldElement((rest % q as u64) as u32);
            rest /= q as u64;
        }
        let mut states: Vec<State> = compiled.iter().map(State::new).collect();
        let mut values = vec![FieldElement::ZERO; compiled.len()];
        if n > 0 {
            for s in states.iter_mut() {
                s.update(field, &pows, n - 1, &point);
            }
        }
        let base = shard * shard_len;
        let mut local = 0u64;
        loop {
            for (v, s) in values.iter_mut().zip(&states) {
                *v = s.value();
            }
            visit(&mut acc, base + local, &point, &values);
            local += 1;
            // odometer step over the free coordinates
            let mut i = 0;
            while i < free {
                if point[i].0 + 1 < q {
                    point[i].0 += 1;
                    break;
                }
                point[i] = FieldElement::ZERO;
                i += 1;
            }
            if i == free {
                break;
            }
            for s in states.iter_mut() {
                s.update(field, &pows, i, &point);
            }
        }
        debug_assert_eq!(local, shard_len);
        acc
    };

    let parts: Vec<A> = if shard_count == 1 {
        vec![run_shard(0)]
    } else {
        cfg.run(|| (0..shard_count).into_par_iter().map(run_shard).collect())
    };
    let mut iter = parts.into_iter();
    let mut acc = iter.next().unwrap_or_else(&init);
    for part in iter {
        merge(&mut acc, part);
    }
    Ok(acc)
}

/// Histogram of the values of `poly` over `F_q^n`, indexed by element ID.
pub fn value_histogram(poly: &Polynomial, cfg: &ExecConfig) -> Result<Vec<u64>> {
    let q = poly.field().q() as usize;
    enumerate(
        poly.field(),
        poly.n(),
        std::slice::from_ref(poly),
        cfg,
        || vec![0u64; q],
        |acc, _, _, vals| acc[vals[0].0 as usize] += 1,
        add_into,
    )
}

/// Values of `poly` at every point, indexed by the point's mixed-radix rank.
pub fn value_table(poly: &Polynomial, cfg: &ExecConfig) -> Result<Vec<FieldElement>> {
    let total = domain_size(poly.field().q(), poly.n());
    cfg.check(total)?;
    let mut out = vec![FieldElement::ZERO; total as usize];
    let chunks: Vec<(u64, Vec<FieldElement>)> = enumerate(
        poly.field(),
        poly.n(),
        std::slice::from_ref(poly),
        cfg,
        Vec::new,
        |acc: &mut Vec<(u64, Vec<FieldElement>)>, idx, _, vals| match acc.last_mut() {
            Some((start, buf)) if *start + buf.len() as u64 == idx => buf.push(vals[0]),
            _ => acc.push((idx, vec![vals[0]])),
        },
        |acc, mut other| acc.append(&mut other),
    )?;
    for (start, buf) in chunks {
        out[start as usize..start as usize + buf.len()].copy_from_slice(&buf);
    }
    Ok(out)
}

/// Element-wise addition of histograms.
#[allow(clippy::ptr_arg)] // used as a merge callback over Vec accumulators
pub fn add_into(acc: &mut Vec<u64>, other: Vec<u64>) {
    for (a, b) in acc.iter_mut().zip(other) {
        *a += b;
    }
}

/// Digits of a mixed-radix rank (coordinate 0 least significant).
pub fn unrank(mut index: u64, q: u32, n: usize) -> Vec<FieldElement> {
    (0..n)
        .map(|_| {
            let d = (index % q as u64) as u32;
            index /= q as u64;
            FieldElement(d)
        })
        .collect()
}

pub fn rank(point: &[FieldElement], q: u32) -> u64 {
    point.iter().rev().fold(0u64, |acc, x| acc * q as u64 + x.0 as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{field_create, prime_field};
    use crate::poly::random_poly;

    fn naive_histogram(poly: &Polynomial) -> Vec<u64> {
        let f = poly.field();
        let total = domain_size(f.q(), poly.n()) as u64;
        let mut h = vec![0u64; f.q() as usize];
        for idx in 0..total {
            let pt = unrank(idx, f.q(), poly.n());
            h[poly.evaluate(&pt).unwrap().0 as usize] += 1;
        }
        h
    }

    #[test]
    fn histogram_matches_pointwise_evaluation() {
        for (p, s, n) in [(2u64, 1u32, 5usize), (3, 1, 4), (2, 2, 3), (5, 1, 3), (3, 2, 3), (2, 1, 13)] {
            let f = field_create(p, s).unwrap();
            for seed in 0..4 {
                let poly = random_poly(&f, n, 3, 7, seed);
                let cfg = ExecConfig::with_threads(3);
                assert_eq!(value_histogram(&poly, &cfg).unwrap(), naive_histogram(&poly), "{poly}");
            }
        }
    }

    #[test]
    fn value_table_in_rank_order() {
        let f = prime_field(3).unwrap();
        let poly = random_poly(&f, 8, 3, 9, 42);
        let table = value_table(&poly, &ExecConfig::with_threads(4)).unwrap();
        assert_eq!(table.len(), 3usize.pow(8));
        for idx in (0..table.len()).step_by(97) {
            let pt = unrank(idx as u64, 3, 8);
            assert_eq!(rank(&pt, 3), idx as u64);
            assert_eq!(table[idx], poly.evaluate(&pt).unwrap());
        }
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let f = prime_field(2).unwrap();
        let poly = random_poly(&f, 16, 4, 30, 5);
        let a = value_histogram(&poly, &ExecConfig::with_threads(1)).unwrap();
        let b = value_histogram(&poly, &ExecConfig::with_threads(2)).unwrap();
        let c = value_histogram(&poly, &ExecConfig::with_threads(8)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn budget_refusal() {
        let f = prime_field(2).unwrap();
        let poly = random_poly(&f, 20, 2, 3, 1);
        let cfg = ExecConfig { threads: 1, budget: 1000 };
        assert!(matches!(value_histogram(&poly, &cfg), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn zero_variables_and_zero_polynomial() {
        let f = prime_field(5).unwrap();
        let c = Polynomial::constant(&f, 0, FieldElement(3));
        assert_eq!(value_histogram(&c, &ExecConfig::default()).unwrap(), vec![0, 0, 0, 1, 0]);
        let z = Polynomial::zero(&f, 2);
        assert_eq!(value_histogram(&z, &ExecConfig::default()).unwrap(), vec![25, 0, 0, 0, 0]);
    }
}
