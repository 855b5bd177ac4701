//! Point counts of `X = {P̄ = 0}` and its singular locus over `F_{p^s}`,
//! dimension estimates from count growth, and the codimension `κ`.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::family::PolyFamily;
use crate::gf::{field_create, Field, FieldElement};
use crate::kernel::{self, domain_size, ExecConfig};
use crate::linalg;
use crate::poly::{formal_jacobian, Polynomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularMethod {
    /// All `c×c` minors of the formal Jacobian vanish.
    Minors,
    /// `det(∂P_i/∂h_k)` vanishes for every standard-basis tuple `h_1..h_c`.
    Pairing,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountRow {
    pub s: u32,
    pub q_s: u64,
    pub variety: u64,
    pub singular: u64,
    pub singular_pairing: u64,
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointCountTable {
    pub p: u32,
    pub q: u32,
    pub n: usize,
    pub rows: Vec<CountRow>,
}

impl PointCountTable {
    /// `s, q_s, N_variety, N_singular, elapsed_ms`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,q_s,N_variety,N_singular,elapsed_ms\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{},{}", r.s, r.q_s, r.variety, r.singular, r.elapsed_ms);
        }
        out
    }

    pub fn methods_agree(&self) -> bool {
        self.rows.iter().all(|r| r.singular == r.singular_pairing)
    }
}

// Field over which to count at extension degree s, with the members lifted into it.
fn extension(family: &PolyFamily, s: u32) -> Result<(Field, Vec<Polynomial>)> {
    let base = family.field();
    if s == 0 {
        return Err(Error::BadParameters("extension degree must be ≥ 1".into()));
    }
    if s == 1 {
        return Ok((base.clone(), family.members().to_vec()));
    }
    if !base.is_prime_field() {
        return Err(Error::NonPrimeBase(base.q()));
    }
    let ext = field_create(base.p() as u64, s)?;
    let lifted = family.members().iter().map(|m| m.lift_to(&ext)).collect::<Result<Vec<_>>>()?;
    Ok((ext, lifted))
}

/// `|X(F_{p^s})|`: points where every member vanishes.
pub fn count_points(family: &PolyFamily, s: u32, cfg: &ExecConfig) -> Result<u64> {
    let (field, members) = extension(family, s)?;
    kernel::enumerate(
        &field,
        family.n(),
        &members,
        cfg,
        || 0u64,
        |acc, _, _, vals| {
            if vals.iter().all(|v| v.is_zero()) {
                *acc += 1;
            }
        },
        |a, b| *a += b,
    )
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Counts {
    variety: u64,
    minors: u64,
    pairing: u64,
}

fn count_row(family: &PolyFamily, s: u32, methods: (bool, bool), cfg: &ExecConfig) -> Result<Counts> {
    // with c > n there are no c×c minors, so every point of X is singular
    let (c, n) = (family.len(), family.n());
    let (field, members) = extension(family, s)?;
    cfg.check(domain_size(field.q(), n))?;
    let jac = formal_jacobian(&members)?;
    let mut polys = members.clone();
    polys.extend(jac.into_iter().flatten());
    let columns = linalg::subsets(n, c);
    let f = &field;
    kernel::enumerate(
        &field,
        n,
        &polys,
        cfg,
        Counts::default,
        |acc, _, _, vals| {
            if !vals[..c].iter().all(|v| v.is_zero()) {
                return;
            }
            acc.variety += 1;
            let jv = |i: usize, j: usize| vals[c + i * n + j];
            let square = |cols: &[usize]| -> linalg::Matrix {
                (0..c).map(|i| cols.iter().map(|&j| jv(i, j)).collect()).collect()
            };
            if methods.0 && columns.iter().all(|cols| linalg::determinant(f, &square(cols)).is_zero()) {
                acc.minors += 1;
            }
            if methods.1 && columns.iter().all(|cols| linalg::determinant_leibniz(f, &square(cols)).is_zero()) {
                acc.pairing += 1;
            }
        },
        |a, b| {
            a.variety += b.variety;
            a.minors += b.minors;
            a.pairing += b.pairing;
        },
    )
}

/// `|X^sing(F_{p^s})|`, the points of `X` where the Jacobian has rank `< c`.
pub fn singular_points(family: &PolyFamily, s: u32, method: SingularMethod, cfg: &ExecConfig) -> Result<u64> {
    if family.len() > family.n() {
        return Err(Error::MoreEquationsThanVariables { equations: family.len(), variables: family.n() });
    }
    let counts = match method {
        SingularMethod::Minors => count_row(family, s, (true, false), cfg)?.minors,
        SingularMethod::Pairing => count_row(family, s, (false, true), cfg)?.pairing,
    };
    Ok(counts)
}

/// Counts for `s = 1..=s_max`, singular points by both methods.
pub fn count_table(family: &PolyFamily, s_max: u32, cfg: &ExecConfig) -> Result<PointCountTable> {
    let field = family.field();
    if s_max > 1 && !field.is_prime_field() {
        return Err(Error::NonPrimeBase(field.q()));
    }
    let mut rows = Vec::new();
    for s in 1..=s_max {
        let start = Instant::now();
        let counts = count_row(family, s, (true, true), cfg)?;
        debug_assert!(counts.minors <= counts.variety);
        rows.push(CountRow {
            s,
            q_s: (field.q() as u64).pow(s),
            variety: counts.variety,
            singular: counts.minors,
            singular_pairing: counts.pairing,
            elapsed_ms: start.elapsed().as_millis() as u64,
        });
    }
    Ok(PointCountTable { p: field.p(), q: field.q(), n: family.n(), rows })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Variety,
    Singular,
}

/// Dimension read off `log_q N_s / s` at the largest `s` with `N_s > 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimEstimate {
    /// `None` when every count is 0 (serialized as `"empty"`).
    #[serde(serialize_with = "estimate_or_empty")]
    pub estimate: Option<u32>,
    pub s_star: Option<u32>,
    pub ratio: Option<f64>,
    /// `log_q N_s / s` for every row with `N_s > 0`.
    pub per_row: Vec<(u32, f64)>,
    pub low_confidence: bool,
}

fn estimate_or_empty<S: Serializer>(v: &Option<u32>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_u32(*x),
        None => s.serialize_str("empty"),
    }
}

pub fn dim_estimate(table: &PointCountTable, which: Which) -> Result<DimEstimate> {
    if table.rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    let q = table.q as f64;
    let per_row: Vec<(u32, f64)> = table
        .rows
        .iter()
        .map(|r| (r.s, if which == Which::Variety { r.variety } else { r.singular }))
        .filter(|&(_, count)| count > 0)
        .map(|(s, count)| (s, (count as f64).ln() / q.ln() / s as f64))
        .collect();
    let Some(&(s_star, ratio)) = per_row.last() else {
        return Ok(DimEstimate { estimate: None, s_star: None, ratio: None, per_row, low_confidence: false });
    };
    let estimate = ratio.round().max(0.0) as u32;
    let disagree = per_row.iter().any(|&(_, r)| r.round() as u32 != estimate);
    Ok(DimEstimate {
        estimate: Some(estimate),
        s_star: Some(s_star),
        ratio: Some(ratio),
        low_confidence: (ratio - estimate as f64).abs() > 0.2 || disagree,
        per_row,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kappa {
    Value(i64),
    /// No singular points at any measured `s`.
    Smooth,
    /// `X` itself has no points.
    Empty,
}

impl Serialize for Kappa {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Kappa::Value(v) => s.serialize_i64(*v),
            Kappa::Smooth => s.serialize_str("smooth"),
            Kappa::Empty => s.serialize_str("empty"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarietyReport {
    pub dim_x: DimEstimate,
    pub dim_sing: DimEstimate,
    pub kappa: Kappa,
    pub methods_agree: bool,
    pub warnings: Vec<String>,
    pub table: PointCountTable,
}

/// Variables of `P` that occur only with exponents divisible by `p`; their
/// formal partials vanish identically.
pub fn char_degenerate_variables(poly: &Polynomial) -> Vec<usize> {
    let p = poly.field().p();
    poly.support()
        .into_iter()
        .filter(|&v| poly.terms().all(|(m, _)| m.exponent(v) % p == 0))
        .collect()
}

fn warnings(family: &PolyFamily) -> Vec<String> {
    let mut out = Vec::new();
    for (i, m) in family.members().iter().enumerate() {
        let vars = char_degenerate_variables(m);
        if !vars.is_empty() {
            let names: Vec<String> = vars.iter().map(|v| format!("x{}", v + 1)).collect();
            out.push(format!(
                "char-degenerate: member {} uses {} only with exponents divisible by {}",
                i + 1,
                names.join(", "),
                m.field().p()
            ));
        }
    }
    out
}

/// `κ = dim X − dim X^sing` from counts at `s = 1..=s_max`.
pub fn codim_singular(family: &PolyFamily, s_max: u32, cfg: &ExecConfig) -> Result<VarietyReport> {
    let table = count_table(family, s_max, cfg)?;
    let dim_x = dim_estimate(&table, Which::Variety)?;
    let dim_sing = dim_estimate(&table, Which::Singular)?;
    let kappa = match (dim_x.estimate, dim_sing.estimate) {
        (None, _) => Kappa::Empty,
        (Some(_), None) => Kappa::Smooth,
        (Some(x), Some(s)) => Kappa::Value(x as i64 - s as i64),
    };
    Ok(VarietyReport { methods_agree: table.methods_agree(), warnings: warnings(family), dim_x, dim_sing, kappa, table })
}

/// Reference counter: evaluates every member term by term at every point.
pub fn count_points_naive(family: &PolyFamily, s: u32) -> Result<u64> {
    let (field, members) = extension(family, s)?;
    let n = family.n();
    let total = domain_size(field.q(), n) as u64;
    let mut count = 0;
    for idx in 0..total {
        let point = kernel::unrank(idx, field.q(), n);
        let vanishes = members.iter().all(|m| {
            m.terms()
                .fold(FieldElement::ZERO, |acc, (mono, c)| {
                    let t = mono
                        .factors()
                        .iter()
                        .fold(c, |t, &(v, e)| field.mul(t, field.pow(point[v as usize], e as u64)));
                    field.add(acc, t)
                })
                .is_zero()
        });
        count += vanishes as u64;
    }
    Ok(count)
}
