//! Desk-scale acceptance suites. Each suite returns a report with no timing
//! data, so reports are byte-identical across thread counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expsum::{
    analytic_rank, char_sum_exact, gowers_norm, multilinear_bias, power_bound_holds, AnalyticRank, CyclotomicSum,
    ExactBias, GowersPath, Mode,
};
use crate::family::{equidistribution_check, family_min_arank, fiber_fourier, search_shifts, shift_family, PolyFamily};
use crate::expsum::joint_distribution;
use crate::generators::gen_f;
use crate::gf::{prime_field, FieldElement};
use crate::kernel::{self, ExecConfig};
use crate::parse::parse;
use crate::poly::{random_poly, Monomial, Polynomial, Tensor};
use crate::rank::{prank_bilinear, prank_lower, prank_upper_search, verify_certificate, DEFAULT_SEARCH_BUDGET};
use crate::variety::{codim_singular, count_table, Kappa};

/// Suite names with the acceptance criterion each one checks.
pub const SUITES: [(&str, u32); 10] = [
    ("ga-identity", 1),
    ("tensor-bias", 2),
    ("power-bound", 3),
    ("certificates", 4),
    ("f2-bias", 5),
    ("equidistribution", 6),
    ("singular-locus", 7),
    ("low-characteristic", 8),
    ("shift-search", 9),
    ("determinism", 10),
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub criterion: u32,
    pub pass: bool,
    pub checks: u64,
    pub failures: Vec<String>,
    pub measurements: Value,
}

const MAX_LISTED_FAILURES: usize = 20;

#[derive(Default)]
struct Tally {
    checks: u64,
    failed: u64,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < MAX_LISTED_FAILURES {
                self.failures.push(what());
            }
        }
    }

    fn report(self, suite: &str, measurements: Value) -> SuiteReport {
        let criterion = SUITES.iter().find(|(n, _)| *n == suite).map_or(0, |s| s.1);
        SuiteReport {
            suite: suite.to_string(),
            criterion,
            pass: self.failed == 0,
            checks: self.checks,
            failures: self.failures,
            measurements,
        }
    }
}

/// A random polynomial of the shared corpus.
#[derive(Clone, Debug)]
pub struct CorpusItem {
    pub q: u32,
    pub n: usize,
    pub d: u32,
    pub seed: u64,
    pub poly: Polynomial,
}

impl CorpusItem {
    fn label(&self) -> String {
        format!("q={} n={} d={} seed={}: {}", self.q, self.n, self.d, self.seed, self.poly)
    }
}

/// 204 polynomials: `q ∈ {2,3}`, `n ∈ {1,2,3}`, `d ∈ {2,3}`, 17 seeds each.
pub fn corpus() -> Vec<CorpusItem> {
    let mut out = Vec::new();
    for q in [2u32, 3] {
        let field = prime_field(q as u64).expect("prime");
        for n in 1..=3usize {
            for d in [2u32, 3] {
                for k in 0..17u64 {
                    let seed = ((q as u64 * 10 + n as u64) * 10 + d as u64) * 100 + k;
                    let terms = 1 + (k % 4) as usize;
                    out.push(CorpusItem { q, n, d, seed, poly: random_poly(&field, n, d, terms, seed) });
                }
            }
        }
    }
    out
}

/// Small random families for the Fourier and singular-locus checks.
pub fn family_corpus() -> Vec<PolyFamily> {
    let mut out = Vec::new();
    for q in [2u64, 3] {
        let field = prime_field(q).expect("prime");
        for k in 0..12u64 {
            let n = 2 + (k % 2) as usize;
            let c = 1 + (k % 3) as usize;
            let members: Vec<Polynomial> = (0..c)
                .map(|i| random_poly(&field, n, 1 + ((k + i as u64) % 3) as u32, 2 + i, 1000 * q + 10 * k + i as u64))
                .collect();
            out.push(PolyFamily::new_allow_dependent(members).expect("common space"));
        }
    }
    out
}

fn bias_text(b: &ExactBias) -> String {
    format!("{}/{}^{}", b.numerator, b.q, b.log_denominator)
}

pub fn ga_identity(cfg: &ExecConfig) -> Result<SuiteReport> {
    let mut tally = Tally::default();
    let items = corpus();
    for item in &items {
        let def = gowers_norm(&item.poly, item.d as usize, GowersPath::Definition, cfg)?;
        let ten = gowers_norm(&item.poly, item.d as usize, GowersPath::Tensor, cfg)?;
        tally.check(def.power_sum.same_average(&ten.power_sum), || {
            format!("{}: definition {:?} vs tensor {:?}", item.label(), def.power_sum.counts, ten.power_sum.counts)
        });
    }
    Ok(tally.report("ga-identity", json!({ "corpus": items.len() })))
}

pub fn tensor_bias(cfg: &ExecConfig) -> Result<SuiteReport> {
    let mut tally = Tally::default();
    let items = corpus();
    for item in &items {
        let tensor = item.poly.multilinearize()?;
        let field = tensor.field();
        let hist = kernel::value_histogram(tensor.base(), cfg)?;
        let reference = CyclotomicSum::from_values(field, &hist, FieldElement::ONE);
        for a in 1..field.q() {
            let sum = CyclotomicSum::from_values(field, &hist, FieldElement(a));
            let value = sum.as_integer();
            tally.check(value.is_some_and(|v| v >= 0), || format!("{}: ψ_{a} sum {:?} not a nonnegative integer", item.label(), sum.counts));
            tally.check(sum.canonical() == reference.canonical(), || format!("{}: ψ_{a} changes the bias", item.label()));
        }
    }
    Ok(tally.report("tensor-bias", json!({ "corpus": items.len() })))
}

pub fn power_bound(cfg: &ExecConfig) -> Result<SuiteReport> {
    let mut tally = Tally::default();
    let items = corpus();
    let mut equalities = 0u64;
    for item in &items {
        let b = char_sum_exact(&item.poly, cfg)?;
        let t = char_sum_exact(item.poly.multilinearize()?.base(), cfg)?;
        let holds = power_bound_holds(&b, &t, item.d as usize);
        tally.check(holds == Some(true), || format!("{}: |b(P)|^(2^d) ≤ b(P̃) gave {holds:?}", item.label()));
        // equality when P̃ is as biased as the bound allows
        if let (Some(n2), Some(tv)) = (b.norm_squared(), t.as_integer()) {
            let lhs = n2.pow(1u32 << (item.d - 1)) * num_bigint::BigInt::from(t.total);
            let rhs = num_bigint::BigInt::from(tv) * num_bigint::BigInt::from(b.total).pow(1u32 << item.d);
            equalities += (lhs == rhs) as u64;
        }
    }
    Ok(tally.report("power-bound", json!({ "corpus": items.len(), "equalities": equalities })))
}

fn random_bilinear(k: u64) -> Tensor {
    let mut rng = ChaCha8Rng::seed_from_u64(k);
    let q = if k % 2 == 0 { 2 } else { 3 };
    let n = 1 + (k / 2 % 4) as usize;
    let field = prime_field(q).expect("prime");
    let terms: Vec<(Monomial, FieldElement)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (Monomial::from_pairs([(i, 1), (n + j, 1)]), FieldElement(rng.gen_range(0..q as u32))))
        .collect();
    Tensor::new(Polynomial::from_terms(&field, 2 * n, terms), 2, n).expect("bilinear")
}

pub fn certificates(cfg: &ExecConfig) -> Result<SuiteReport> {
    let mut tally = Tally::default();
    let items = corpus();
    let (mut equalities, mut size_within_log_bias, mut below_lower) = (0u64, 0u64, 0u64);
    for item in &items {
        let tensor = item.poly.multilinearize()?;
        let Some(cert) = prank_upper_search(&tensor, DEFAULT_SEARCH_BUDGET, item.seed, cfg) else {
            continue;
        };
        let r = cert.len() as u32;
        tally.check(verify_certificate(&tensor, &cert)?, || format!("{}: certificate does not verify", item.label()));
        let b = multilinear_bias(&tensor, cfg)?;
        tally.check(b.at_least_power(r), || format!("{}: b(T) = {} < q^-{r}", item.label(), bias_text(&b)));
        equalities += (b.at_least_power(r) && !b.exceeds_power(r)) as u64;
        // measured only: pr(T) ≤ −log_q b(T) read with the certificate size
        size_within_log_bias += (!b.exceeds_power(r)) as u64;
        let lower = prank_lower(&tensor, cfg)?;
        below_lower += (lower > r) as u64;
        tally.check(lower <= r, || format!("{}: lower bound {lower} exceeds certificate size {r}", item.label()));
    }
    let mut mismatched = 0u64;
    for k in 0..100u64 {
        let tensor = random_bilinear(k);
        let (rank, _) = prank_bilinear(&tensor)?;
        let found = prank_upper_search(&tensor, DEFAULT_SEARCH_BUDGET, k, cfg).map(|c| c.len());
        mismatched += (found != Some(rank)) as u64;
        tally.check(found == Some(rank), || format!("bilinear #{k}: search {found:?} vs matrix rank {rank}"));
    }
    Ok(tally.report(
        "certificates",
        json!({
            "corpus": items.len(),
            "bilinear_tensors": 100,
            "bilinear_mismatches": mismatched,
            "bias_equals_q_to_minus_r": equalities,
            "size_at_most_neg_log_bias": size_within_log_bias,
            "lower_bound_violations": below_lower,
        }),
    ))
}

pub fn f2_bias(cfg: &ExecConfig) -> Result<SuiteReport> {
    let mut tally = Tally::default();
    let mut values = serde_json::Map::new();
    for q in [2u32, 3, 5] {
        let field = prime_field(q as u64)?;
        for n in 2..=5usize {
            let poly = gen_f(&field, n, 2)?.poly;
            let b = ExactBias::from_sum(q, 2 * n as u32, &char_sum_exact(&poly, cfg)?)?;
            let target = ExactBias { q, numerator: 1, log_denominator: n as u32 - 1 };
            if n % 2 == 1 {
                tally.check(b == target, || format!("q={q} n={n}: b = {} ≠ q^(1-n)", bias_text(&b)));
            } else {
                tally.check(!b.cmp_value(&target).is_gt(), || format!("q={q} n={n}: b = {} > q^(1-n)", bias_text(&b)));
            }
            values.insert(format!("q={q} n={n}"), json!(bias_text(&b)));
        }
    }
    Ok(tally.report("f2-bias", Value::Object(values)))
}

pub fn equidistribution(cfg: &ExecConfig) -> Result<SuiteReport> {
    let mut tally = Tally::default();
    let f3 = prime_field(3)?;
    let bilinear = PolyFamily::new(vec![parse("x1*x4 + x2*x5 + x3*x6", &f3, Some(6))?])?;
    let report = equidistribution_check(&bilinear, cfg)?;
    // P̃ is the rank-6 symmetric form, while |b(P)| = 3^-3
    let ar6 = AnalyticRank::Exact(ExactBias { q: 3, numerator: 1, log_denominator: 6 });
    tally.check(report.min_span_arank == ar6, || format!("span analytic rank {:?} ≠ 6", report.min_span_arank));
    tally.check((report.min_span_bias_rank - 3.0).abs() < 1e-9, || {
        format!("span bias rank {} ≠ 3", report.min_span_bias_rank)
    });
    tally.check(report.hypothesis && report.bias_hypothesis, || "rank exceeds dim L fails".into());
    tally.check(2 * (report.max_fiber - report.min_fiber) <= report.min_fiber, || {
        format!("fibers {}..{} deviate by more than 1/2", report.min_fiber, report.max_fiber)
    });

    let mut families = family_corpus();
    families.push(bilinear);
    let mut hypothesis_but_spread = 0u64;
    for family in &families {
        let dist = joint_distribution(family.members(), cfg)?;
        for (l, f_hat) in fiber_fourier(&dist) {
            let combo = family.combination(&l);
            let direct = char_sum_exact(&combo, cfg)?;
            tally.check(f_hat.same_average(&direct), || format!("f̂({l:?}) ≠ bias of {combo}"));
        }
        let zero = dist.fourier_at(&vec![FieldElement::ZERO; family.len()]);
        tally.check(zero.as_integer() == Some(zero.total as i128), || "f̂(0) ≠ 1".into());
        if family.dimension() == family.len() {
            let r = equidistribution_check(family, cfg)?;
            hypothesis_but_spread += (r.hypothesis && !r.satisfied) as u64;
        }
    }
    Ok(tally.report(
        "equidistribution",
        json!({
            "bilinear_fibers": [report.min_fiber, report.max_fiber],
            "bilinear_span_arank": report.min_span_arank,
            "bilinear_span_bias_rank": report.min_span_bias_rank,
            "bilinear_deviation": report.deviation,
            "families": families.len(),
            "hypothesis_without_equidistribution": hypothesis_but_spread,
        }),
    ))
}

pub fn singular_locus(cfg: &ExecConfig) -> Result<SuiteReport> {
    let mut tally = Tally::default();
    let mut families = family_corpus();
    for item in corpus() {
        families.push(PolyFamily::new(vec![item.poly])?);
    }
    let mut rows = 0u64;
    for family in families.iter().filter(|f| f.len() <= f.n()) {
        let table = count_table(family, 2, cfg)?;
        for row in &table.rows {
            rows += 1;
            tally.check(row.singular == row.singular_pairing, || {
                format!("s={}: minors {} vs pairing {}", row.s, row.singular, row.singular_pairing)
            });
            tally.check(row.singular <= row.variety, || format!("s={}: singular count exceeds variety count", row.s));
        }
    }
    let mut kappas = serde_json::Map::new();
    for q in [2u64, 3] {
        let field = prime_field(q)?;
        let quad = PolyFamily::new(vec![parse("x1*x2 + x3*x4 + x5*x6", &field, Some(6))?])?;
        let report = codim_singular(&quad, 2, cfg)?;
        for row in &report.table.rows {
            let qs = row.q_s;
            tally.check(row.variety == qs.pow(5) + qs.pow(3) - qs.pow(2), || format!("q_s={qs}: N = {}", row.variety));
            tally.check(row.singular == 1 && row.singular_pairing == 1, || format!("q_s={qs}: singular count {}", row.singular));
        }
        tally.check(report.dim_x.estimate == Some(5) && !report.dim_x.low_confidence, || format!("q={q}: dim X {:?}", report.dim_x));
        tally.check(report.dim_sing.estimate == Some(0) && !report.dim_sing.low_confidence, || format!("q={q}: dim sing {:?}", report.dim_sing));
        tally.check(report.kappa == Kappa::Value(5), || format!("q={q}: κ = {:?}", report.kappa));
        kappas.insert(format!("q={q}"), serde_json::to_value(report.kappa)?);
    }
    Ok(tally.report("singular-locus", json!({ "table_rows": rows, "quadric_kappa": kappas })))
}

/// `Σ_{i<j<k<l} x_i x_j x_k x_l` in `n` variables.
pub fn elementary_quartic(n: usize) -> Result<Polynomial> {
    let field = prime_field(2)?;
    let terms = crate::linalg::subsets(n, 4)
        .into_iter()
        .map(|s| (Monomial::from_pairs(s.into_iter().map(|v| (v, 1))), FieldElement::ONE));
    Ok(Polynomial::from_terms(&field, n, terms))
}

pub fn low_characteristic(cfg: &ExecConfig) -> Result<SuiteReport> {
    let mut tally = Tally::default();
    let mut values = serde_json::Map::new();
    for n in [5usize, 6, 7] {
        let ar = analytic_rank(&elementary_quartic(n)?, &Mode::Exact, cfg)?;
        let AnalyticRank::Exact(b) = ar else { unreachable!("exact mode") };
        tally.check(b.at_least_power(4), || format!("n={n}: ar = {} > 4", ar.value()));
        values.insert(format!("n={n}"), json!({ "bias": bias_text(&b), "analytic_rank": ar.value() }));
    }
    Ok(tally.report("low-characteristic", Value::Object(values)))
}

pub fn shift_search(cfg: &ExecConfig) -> Result<SuiteReport> {
    let mut tally = Tally::default();
    let field = prime_field(2)?;
    let poly = gen_f(&field, 4, 2)?.poly;
    let report = search_shifts(&poly, 2, 64, 1, &Mode::Exact, cfg)?;
    let shifts: Vec<Vec<FieldElement>> =
        report.shifts.iter().map(|h| h.iter().map(|&x| FieldElement(x)).collect()).collect();
    let again = family_min_arank(&shift_family(&poly, &shifts)?, &Mode::Exact, cfg)?;
    tally.check(again.rank.cmp_rank(&report.score).is_eq(), || {
        format!("recomputed {:?} vs reported {:?}", again.rank, report.score)
    });
    let zero = vec![vec![FieldElement::ZERO; poly.n()]; 2];
    let baseline = family_min_arank(&shift_family(&poly, &zero)?, &Mode::Exact, cfg)?;
    tally.check(!report.score.cmp_rank(&baseline.rank).is_lt(), || "score below the zero-shift baseline".into());
    Ok(tally.report(
        "shift-search",
        json!({ "search": report, "baseline": baseline.rank, "recomputed": again.rank }),
    ))
}

/// Every other suite at 1 and 8 threads, compared as serialized bytes.
pub fn determinism(cfg: &ExecConfig) -> Result<SuiteReport> {
    let mut tally = Tally::default();
    let mut compared = Vec::new();
    for (name, _) in SUITES.iter().filter(|(n, _)| *n != "determinism") {
        let one = serde_json::to_string(&run_suite(name, &ExecConfig { threads: 1, ..*cfg })?)?;
        let eight = serde_json::to_string(&run_suite(name, &ExecConfig { threads: 8, ..*cfg })?)?;
        tally.check(one == eight, || format!("{name}: reports differ between 1 and 8 threads"));
        compared.push(*name);
    }
    Ok(tally.report("determinism", json!({ "suites": compared, "threads": [1, 8] })))
}

pub fn run_suite(name: &str, cfg: &ExecConfig) -> Result<SuiteReport> {
    match name {
        "ga-identity" => ga_identity(cfg),
        "tensor-bias" => tensor_bias(cfg),
        "power-bound" => power_bound(cfg),
        "certificates" => certificates(cfg),
        "f2-bias" => f2_bias(cfg),
        "equidistribution" => equidistribution(cfg),
        "singular-locus" => singular_locus(cfg),
        "low-characteristic" => low_characteristic(cfg),
        "shift-search" => shift_search(cfg),
        "determinism" => determinism(cfg),
        other => {
            let known: Vec<&str> = SUITES.iter().map(|s| s.0).collect();
            Err(Error::BadParameters(format!("unknown suite {other:?}; known: {}, all", known.join(", "))))
        }
    }
}
