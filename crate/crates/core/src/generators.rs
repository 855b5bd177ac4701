//! Determinantal generators: `F^n_s`, its block copies `F^n_{i,s}`, the
//! set-indexed `G`, and the composite family built from shifted derivatives.
//!
//! Variable layouts are fixed:
//! - `F^n_s`: `y^t_i` is variable `(t-1)·n + i`;
//! - `F^n_{i,s}` with `m` blocks: `y^t_{j,r}` is `((t-1)·m + (j-1))·n + r`;
//! - `G`: variables `w^{i,x}_r` in lexicographic order of (label `i`, set `x`, coordinate `r`).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::PolyFamily;
use crate::gf::{Field, FieldElement};
use crate::linalg::{permutations, subsets};
use crate::poly::{Monomial, Polynomial};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VariableName {
    /// 1-based flat index (`x<index>` in polynomial text).
    pub index: usize,
    pub name: String,
}

/// A generated polynomial with its parameters and variable-naming map.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Generated {
    pub kind: &'static str,
    pub params: serde_json::Value,
    #[serde(skip)]
    pub poly: Polynomial,
    pub variables: Vec<VariableName>,
}

/// Sum over the `s`-subsets `I` of `[n]` of `det(y^t_{I_u})`, with row `t`
/// read through `var(t, i)`.
fn minor_sum(field: &Field, vars: usize, n: usize, s: usize, var: impl Fn(usize, usize) -> usize) -> Polynomial {
    let perms = permutations(s);
    let minus_one = field.neg(FieldElement::ONE);
    let mut terms = Vec::new();
    for cols in subsets(n, s) {
        for (perm, even) in &perms {
            let mono = Monomial::from_pairs((0..s).map(|t| (var(t, cols[perm[t]]), 1)));
            terms.push((mono, if *even { FieldElement::ONE } else { minus_one }));
        }
    }
    Polynomial::from_terms(field, vars, terms)
}

fn check_rows(n: usize, s: usize) -> Result<()> {
    if s == 0 || s > n {
        return Err(Error::BadParameters(format!("need 1 ≤ s ≤ n, got n = {n}, s = {s}")));
    }
    Ok(())
}

/// Number of maximal minors summed in `F^n_s`.
pub fn minor_count(n: usize, s: usize) -> usize {
    subsets(n, s).len()
}

/// `F^n_s(y^1, …, y^s) = Σ_{i_1<…<i_s} det(y^t_{i_u})` in `s·n` variables.
pub fn gen_f(field: &Field, n: usize, s: usize) -> Result<Generated> {
    check_rows(n, s)?;
    let poly = minor_sum(field, s * n, n, s, |t, i| t * n + i);
    let variables = (0..s)
        .flat_map(|t| (0..n).map(move |i| VariableName { index: t * n + i + 1, name: format!("y^{}_{}", t + 1, i + 1) }))
        .collect();
    Ok(Generated { kind: "F", params: serde_json::json!({ "n": n, "s": s }), poly, variables })
}

/// `F^n_{i,s}`: `F^n_s` on block `i` of `m`, in `s·n·m` variables.
pub fn gen_f_block(field: &Field, n: usize, s: usize, m: usize, i: usize) -> Result<Generated> {
    check_rows(n, s)?;
    if i == 0 || i > m {
        return Err(Error::BadParameters(format!("need 1 ≤ i ≤ m, got i = {i}, m = {m}")));
    }
    let poly = minor_sum(field, s * n * m, n, s, |t, r| (t * m + i - 1) * n + r);
    let mut variables = Vec::new();
    for t in 0..s {
        for j in 0..m {
            for r in 0..n {
                variables.push(VariableName {
                    index: (t * m + j) * n + r + 1,
                    name: format!("y^{}_{{{},{}}}", t + 1, j + 1, r + 1),
                });
            }
        }
    }
    Ok(Generated { kind: "F_block", params: serde_json::json!({ "n": n, "s": s, "m": m, "i": i }), poly, variables })
}

/// Layout of `G`: for each label, the `d'_i`-subsets of `[e]` in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GLayout {
    pub t: usize,
    pub e: usize,
    pub sets: Vec<Vec<Vec<usize>>>,
    offsets: Vec<usize>,
}

impl GLayout {
    pub fn new(t: usize, degrees: &[u32]) -> Result<GLayout> {
        let s = degrees.len();
        if s == 0 || degrees.iter().any(|&d| d < 2) {
            return Err(Error::BadParameters("every degree must be ≥ 2".into()));
        }
        if t < s {
            return Err(Error::BadParameters(format!("need t ≥ s, got t = {t}, s = {s}")));
        }
        let e: usize = degrees.iter().map(|&d| d as usize - 1).sum();
        let sets: Vec<Vec<Vec<usize>>> = degrees.iter().map(|&d| subsets(e, d as usize - 1)).collect();
        let mut offsets = Vec::with_capacity(s);
        let mut acc = 0;
        for x in &sets {
            offsets.push(acc);
            acc += x.len() * t;
        }
        Ok(GLayout { t, e, sets, offsets })
    }

    pub fn num_vars(&self) -> usize {
        self.sets.iter().map(|x| x.len() * self.t).sum()
    }

    /// 0-based index of `w^{label, sets[label][set]}_coord`.
    pub fn var(&self, label: usize, set: usize, coord: usize) -> usize {
        self.offsets[label] + set * self.t + coord
    }

    /// Ordered tuples `(x_1, …, x_s)` of set indices whose union is `[e]`.
    pub fn covers(&self) -> Vec<Vec<usize>> {
        let full: u64 = (1u64 << self.e) - 1;
        let masks: Vec<Vec<u64>> = self
            .sets
            .iter()
            .map(|xs| xs.iter().map(|x| x.iter().fold(0u64, |m, &b| m | 1 << b)).collect())
            .collect();
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn go(label: usize, used: u64, full: u64, masks: &[Vec<u64>], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if label == masks.len() {
                if used == full {
                    out.push(cur.clone());
                }
                return;
            }
            for (k, &m) in masks[label].iter().enumerate() {
                // sizes add up to e, so a cover is a disjoint one
                if used & m == 0 {
                    cur.push(k);
                    go(label + 1, used | m, full, masks, cur, out);
                    cur.pop();
                }
            }
        }
        go(0, 0, full, &masks, &mut cur, &mut out);
        out
    }
}

/// `G = Σ_{(x_1,…,x_s) covering [e]} F^t_s(w^{1,x_1}, …, w^{s,x_s})`.
pub fn gen_g(field: &Field, t: usize, degrees: &[u32]) -> Result<Generated> {
    let layout = GLayout::new(t, degrees)?;
    let s = degrees.len();
    let vars = layout.num_vars();
    let mut poly = Polynomial::zero(field, vars);
    for cover in layout.covers() {
        poly = poly.add(&minor_sum(field, vars, t, s, |label, r| layout.var(label, cover[label], r)));
    }
    let mut variables = Vec::with_capacity(vars);
    for (label, xs) in layout.sets.iter().enumerate() {
        for (k, x) in xs.iter().enumerate() {
            let set: Vec<String> = x.iter().map(|b| (b + 1).to_string()).collect();
            for r in 0..t {
                variables.push(VariableName {
                    index: layout.var(label, k, r) + 1,
                    name: format!("w^{{{},{{{}}}}}_{}", label + 1, set.join(","), r + 1),
                });
            }
        }
    }
    Ok(Generated { kind: "G", params: serde_json::json!({ "t": t, "s": s, "degrees": degrees }), poly, variables })
}

/// Substitutes `w^{i,x}_r := y^i_r`, forgetting the set labels; the image lives
/// in the variables of `F^t_s`.
pub fn collapse_g(g: &Polynomial, t: usize, degrees: &[u32]) -> Result<Polynomial> {
    let layout = GLayout::new(t, degrees)?;
    let mut target = vec![0usize; layout.num_vars()];
    for (label, xs) in layout.sets.iter().enumerate() {
        for k in 0..xs.len() {
            for r in 0..t {
                target[layout.var(label, k, r)] = label * t + r;
            }
        }
    }
    Ok(g.map_vars(degrees.len() * t, |v| target[v]))
}

/// Number of ordered set partitions of `[e]` into blocks of sizes `d_i − 1`.
pub fn multinomial(degrees: &[u32]) -> u128 {
    let mut acc: u128 = 1;
    let mut total: u128 = 0;
    for &d in degrees {
        for k in 1..=(d as u128 - 1) {
            total += 1;
            acc = acc * total / k;
        }
    }
    acc
}

/// `{P^1, …, P^s} ∪ {F^t_s(Δ_{w_{(i-1)t+1}}P^j, …, Δ_{w_{it}}P^j) : i ∈ [m]}`.
///
/// Row `j` of the `i`-th composite is `(Δ_{w_{(i-1)t+r}} P^j)_{r ≤ t}`.
pub fn build_theorem_m_family(family: &PolyFamily, shifts: &[Vec<FieldElement>], t: usize, m: usize) -> Result<PolyFamily> {
    if shifts.len() != t * m {
        return Err(Error::ArityMismatch { expected: t * m, got: shifts.len() });
    }
    if let Some(low) = family.degrees().into_iter().find(|&d| d < 2) {
        return Err(Error::DegreeTooLow(format!("members must have degree ≥ 2, found {low}")));
    }
    let s = family.len();
    let outer = gen_f(family.field(), t, s)?.poly;
    let e: u32 = family.degrees().iter().map(|d| d - 1).sum();
    let mut members = family.members().to_vec();
    for i in 0..m {
        let mut inners = Vec::with_capacity(s * t);
        for p in family.members() {
            for r in 0..t {
                inners.push(p.delta(&shifts[i * t + r])?);
            }
        }
        let composite = outer.compose(&inners)?;
        assert!(composite.degree() <= e, "composite degree {} exceeds {e}", composite.degree());
        members.push(composite);
    }
    PolyFamily::new_allow_dependent(members)
}
