//! Sparse multivariate polynomials over a finite field.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`] in graded
//! lexicographic order, so two equal polynomials always have identical term
//! maps and print identically. Variables are 0-based internally and printed
//! 1-based (`x1`, `x2`, ...).

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf::{Field, FieldElement};

/// Product of variable powers; `(variable, exponent)` pairs sorted by variable, exponents > 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<(u32, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(index: usize) -> Monomial {
        Monomial(vec![(index as u32, 1)])
    }

    /// Builds a monomial from `(variable, exponent)` pairs in any order; zero exponents are dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, u32)>) -> Monomial {
        let mut acc: BTreeMap<u32, u32> = BTreeMap::new();
        for (v, e) in pairs {
            if e > 0 {
                *acc.entry(v as u32).or_default() += e;
            }
        }
        Monomial(acc.into_iter().collect())
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// `(variable, exponent)` pairs sorted by variable.
    pub fn factors(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn exponent(&self, var: usize) -> u32 {
        self.0
            .iter()
            .find(|&&(v, _)| v as usize == var)
            .map_or(0, |&(_, e)| e)
    }

    pub fn max_var(&self) -> Option<usize> {
        self.0.last().map(|&(v, _)| v as usize)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            match a.0.cmp(&b.0) {
                Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Renames every variable through `f`.
    pub fn map_vars(&self, f: impl Fn(usize) -> usize) -> Monomial {
        Monomial::from_pairs(self.0.iter().map(|&(v, e)| (f(v as usize), e)))
    }
}

impl Ord for Monomial {
    // Graded lex: total degree first, then the exponent of x1, then x2, ...
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => {
                    if va != vb {
                        // the one mentioning the smaller variable has a larger exponent there
                        return if va < vb { Ordering::Greater } else { Ordering::Less };
                    }
                    if ea != eb {
                        return ea.cmp(&eb);
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone)]
pub struct Polynomial {
    field: Field,
    n: usize,
    terms: BTreeMap<Monomial, FieldElement>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.n == other.n && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[q={}, n={}]({})", self.field.q(), self.n, self)
    }
}

impl Polynomial {
    pub fn zero(field: &Field, n: usize) -> Polynomial {
        Polynomial { field: Arc::clone(field), n, terms: BTreeMap::new() }
    }

    pub fn constant(field: &Field, n: usize, c: FieldElement) -> Polynomial {
        Polynomial::from_terms(field, n, [(Monomial::one(), c)])
    }

    /// The variable `x_{index+1}`.
    pub fn var(field: &Field, n: usize, index: usize) -> Polynomial {
        assert!(index < n, "variable index {index} out of range for n = {n}");
        Polynomial::from_terms(field, n, [(Monomial::var(index), FieldElement::ONE)])
    }

    /// Merges like terms and drops zero coefficients.
    pub fn from_terms(
        field: &Field,
        n: usize,
        terms: impl IntoIterator<Item = (Monomial, FieldElement)>,
    ) -> Polynomial {
        let mut map: BTreeMap<Monomial, FieldElement> = BTreeMap::new();
        for (m, c) in terms {
            if let Some(v) = m.max_var() {
                assert!(v < n, "monomial uses x{} but n = {n}", v + 1);
            }
            let slot = map.entry(m).or_insert(FieldElement::ZERO);
            *slot = field.add(*slot, c);
        }
        map.retain(|_, c| !c.is_zero());
        Polynomial { field: Arc::clone(field), n, terms: map }
    }

    fn from_hash(field: &Field, n: usize, acc: HashMap<Monomial, FieldElement>) -> Polynomial {
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Polynomial { field: Arc::clone(field), n, terms }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for the zero polynomial (check [`Polynomial::is_zero`]).
    pub fn degree(&self) -> u32 {
        self.terms.keys().next_back().map_or(0, Monomial::degree)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, FieldElement)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, m: &Monomial) -> FieldElement {
        self.terms.get(m).copied().unwrap_or(FieldElement::ZERO)
    }

    /// Variables that occur in some term.
    pub fn support(&self) -> Vec<usize> {
        let mut vars: Vec<usize> = self
            .terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|&(v, _)| v as usize))
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    pub fn is_homogeneous(&self) -> bool {
        let d = self.degree();
        self.terms.keys().all(|m| m.degree() == d)
    }

    /// Same polynomial regarded in `n` variables (`n` must cover the support).
    pub fn with_n(&self, n: usize) -> Polynomial {
        if let Some(&v) = self.support().last() {
            assert!(v < n, "cannot shrink below the support");
        }
        Polynomial { field: Arc::clone(&self.field), n, terms: self.terms.clone() }
    }

    /// Reinterprets prime-field coefficients in an extension of the same characteristic.
    pub fn lift_to(&self, field: &Field) -> Result<Polynomial> {
        if !self.field.is_prime_field() || self.field.p() != field.p() {
            return Err(Error::FieldMismatch);
        }
        Ok(Polynomial { field: Arc::clone(field), n: self.n, terms: self.terms.clone() })
    }

    pub fn map_vars(&self, n: usize, f: impl Fn(usize) -> usize) -> Polynomial {
        Polynomial::from_terms(&self.field, n, self.terms.iter().map(|(m, &c)| (m.map_vars(&f), c)))
    }

    fn check_compatible(&self, other: &Polynomial) -> Result<()> {
        if *self.field != *other.field {
            return Err(Error::FieldMismatch);
        }
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        self.check_compatible(other).expect("incompatible polynomials");
        Polynomial::from_terms(
            &self.field,
            self.n,
            self.terms.iter().chain(other.terms.iter()).map(|(m, &c)| (m.clone(), c)),
        )
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(self.field.neg(FieldElement::ONE))
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: FieldElement) -> Polynomial {
        let f = &self.field;
        Polynomial::from_terms(f, self.n, self.terms.iter().map(|(m, &a)| (m.clone(), f.mul(a, c))))
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        self.check_compatible(other).expect("incompatible polynomials");
        let f = &self.field;
        let mut acc: HashMap<Monomial, FieldElement> = HashMap::new();
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                let slot = acc.entry(ma.mul(mb)).or_insert(FieldElement::ZERO);
                *slot = f.add(*slot, f.mul(ca, cb));
            }
        }
        Polynomial::from_hash(f, self.n, acc)
    }

    pub fn pow(&self, mut e: u32) -> Polynomial {
        let mut acc = Polynomial::constant(&self.field, self.n, FieldElement::ONE);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn evaluate(&self, point: &[FieldElement]) -> Result<FieldElement> {
        if point.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: point.len() });
        }
        Ok(self.eval_unchecked(point))
    }

    pub(crate) fn eval_unchecked(&self, point: &[FieldElement]) -> FieldElement {
        let f = &self.field;
        let mut acc = FieldElement::ZERO;
        for (m, &c) in &self.terms {
            let mut t = c;
            for &(v, e) in m.factors() {
                t = f.mul(t, f.pow(point[v as usize], e as u64));
            }
            acc = f.add(acc, t);
        }
        acc
    }

    /// Substitutes the constant `value` for variable `var` (the variable count is unchanged).
    pub fn substitute(&self, var: usize, value: FieldElement) -> Polynomial {
        let f = &self.field;
        Polynomial::from_terms(
            f,
            self.n,
            self.terms.iter().map(|(m, &c)| {
                let e = m.exponent(var);
                let rest = Monomial::from_pairs(
                    m.factors().iter().filter(|&&(v, _)| v as usize != var).map(|&(v, e)| (v as usize, e)),
                );
                (rest, f.mul(c, f.pow(value, e as u64)))
            }),
        )
    }

    /// Expands `self(inners[0], ..., inners[m-1])`.
    pub fn compose(&self, inners: &[Polynomial]) -> Result<Polynomial> {
        if inners.len() != self.n {
            return Err(Error::ArityMismatch { expected: self.n, got: inners.len() });
        }
        let Some(first) = inners.first() else {
            // outer has no variables: it is a constant
            return Ok(self.clone());
        };
        let target_n = first.n;
        for inner in inners {
            if *inner.field != *self.field {
                return Err(Error::FieldMismatch);
            }
            if inner.n != target_n {
                return Err(Error::DimensionMismatch { expected: target_n, got: inner.n });
            }
        }
        let f = &self.field;
        let mut powers: HashMap<(u32, u32), Polynomial> = HashMap::new();
        let mut acc: HashMap<Monomial, FieldElement> = HashMap::new();
        for (m, &c) in &self.terms {
            let mut prod = Polynomial::constant(f, target_n, c);
            for &(v, e) in m.factors() {
                let pw = powers.entry((v, e)).or_insert_with(|| inners[v as usize].pow(e));
                prod = prod.mul(pw);
                if prod.is_zero() {
                    break;
                }
            }
            for (pm, pc) in prod.terms {
                let slot = acc.entry(pm).or_insert(FieldElement::ZERO);
                *slot = f.add(*slot, pc);
            }
        }
        Ok(Polynomial::from_hash(f, target_n, acc))
    }

    /// `Δ_h P(x) = P(x + h) − P(x)`.
    pub fn delta(&self, h: &[FieldElement]) -> Result<Polynomial> {
        if h.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: h.len() });
        }
        let f = &self.field;
        let shifted: Vec<Polynomial> = (0..self.n)
            .map(|j| {
                Polynomial::var(f, self.n, j).add(&Polynomial::constant(f, self.n, h[j]))
            })
            .collect();
        Ok(self.compose(&shifted)?.sub(self))
    }

    /// `Δ_{h_1}…Δ_{h_d} P` at base point 0, as a polynomial in `d` blocks of `n` variables
    /// (block `i` variable `j` is `i·n + j`), by inclusion–exclusion over subsets of blocks.
    pub fn difference_form(&self, d: usize) -> Polynomial {
        let f = &self.field;
        let n = self.n;
        let big = d * n;
        let mut acc = Polynomial::zero(f, big);
        for mask in 0u32..(1u32 << d) {
            let size = mask.count_ones() as usize;
            let inners: Vec<Polynomial> = (0..n)
                .map(|j| {
                    Polynomial::from_terms(
                        f,
                        big,
                        (0..d)
                            .filter(|i| mask >> i & 1 == 1)
                            .map(|i| (Monomial::var(i * n + j), FieldElement::ONE)),
                    )
                })
                .collect();
            let value = self.compose(&inners).expect("arity matches");
            acc = if (d - size) % 2 == 0 { acc.add(&value) } else { acc.sub(&value) };
        }
        acc
    }

    /// The symmetric multilinear form `P̃(h_1,…,h_d) = Δ_{h_1}…Δ_{h_d}P` with `d = deg P`.
    pub fn multilinearize(&self) -> Result<Tensor> {
        let d = self.degree() as usize;
        if self.is_zero() || d == 0 {
            return Err(Error::DegreeZero);
        }
        let tensor = Tensor::new(self.difference_form(d), d, self.n)?;
        assert!(tensor.is_symmetric(), "difference form of {self} is not symmetric");
        Ok(tensor)
    }

    /// Formal partial derivative with respect to variable `var`.
    pub fn partial(&self, var: usize) -> Polynomial {
        let f = &self.field;
        Polynomial::from_terms(
            f,
            self.n,
            self.terms.iter().filter_map(|(m, &c)| {
                let e = m.exponent(var);
                if e == 0 {
                    return None;
                }
                let reduced = Monomial::from_pairs(m.factors().iter().map(|&(v, ex)| {
                    (v as usize, if v as usize == var { ex - 1 } else { ex })
                }));
                Some((reduced, f.mul_int(c, e as i64)))
            }),
        )
    }

    pub fn gradient(&self) -> Vec<Polynomial> {
        (0..self.n).map(|j| self.partial(j)).collect()
    }

    /// Homogeneous `Q` in `n + 1` variables with `Q(1, x_1, …, x_n) = P`.
    ///
    /// The homogenizing variable is placed first (index 0, printed `x1`) and
    /// the original variables shift up by one.
    pub fn homogenize(&self) -> Result<Polynomial> {
        let d = self.degree();
        if self.is_zero() || d == 0 {
            return Err(Error::DegreeZero);
        }
        Ok(Polynomial::from_terms(
            &self.field,
            self.n + 1,
            self.terms.iter().map(|(m, &c)| {
                let shifted = m.map_vars(|v| v + 1);
                let pad = d - m.degree();
                (shifted.mul(&Monomial::from_pairs([(0, pad)])), c)
            }),
        ))
    }

    /// Coefficient of every monomial in `basis` (missing monomials read as zero).
    pub fn coefficient_vector(&self, basis: &[Monomial]) -> Vec<FieldElement> {
        basis.iter().map(|m| self.coefficient(m)).collect()
    }
}

/// Formal Jacobian `J[i][j] = ∂P_i/∂x_j`.
pub fn formal_jacobian(members: &[Polynomial]) -> Result<Vec<Vec<Polynomial>>> {
    if let Some(first) = members.first() {
        for m in members {
            first.check_compatible(m)?;
        }
    }
    Ok(members.iter().map(Polynomial::gradient).collect())
}

/// Deterministic random polynomial of exact degree `d` with at most `terms` terms.
pub fn random_poly(field: &Field, n: usize, d: u32, terms: usize, seed: u64) -> Polynomial {
    assert!(terms >= 1 && n >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = field.q();
    let random_monomial = |rng: &mut ChaCha8Rng, deg: u32| {
        Monomial::from_pairs((0..deg).map(|_| (rng.gen_range(0..n), 1)))
    };
    let mut rest = Vec::with_capacity(terms - 1);
    for _ in 1..terms {
        let deg = rng.gen_range(0..=d);
        let m = random_monomial(&mut rng, deg);
        rest.push((m, FieldElement(rng.gen_range(1..q))));
    }
    loop {
        let lead = (random_monomial(&mut rng, d), FieldElement(rng.gen_range(1..q)));
        let p = Polynomial::from_terms(field, n, std::iter::once(lead).chain(rest.iter().cloned()));
        if p.degree() == d && !p.is_zero() {
            return p;
        }
        // the lead cancelled a degree-d term of the rest, which then has degree d itself
        let without = Polynomial::from_terms(field, n, rest.iter().cloned());
        if without.degree() == d && !without.is_zero() {
            return without;
        }
    }
}

fn format_monomial(m: &Monomial) -> String {
    m.factors()
        .iter()
        .map(|&(v, e)| if e == 1 { format!("x{}", v + 1) } else { format!("x{}^{}", v + 1, e) })
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Display for Polynomial {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(out, "0");
        }
        let f = &self.field;
        let mut first = true;
        for (m, &c) in self.terms.iter().rev() {
            if !first {
                write!(out, " + ")?;
            }
            first = false;
            let coeff = f.format_element(c);
            let composite = coeff.contains('+') || coeff.contains('*');
            let coeff = if composite { format!("({coeff})") } else { coeff };
            match (m.is_one(), c == FieldElement::ONE) {
                (true, _) => write!(out, "{coeff}")?,
                (false, true) => write!(out, "{}", format_monomial(m))?,
                (false, false) => write!(out, "{coeff}*{}", format_monomial(m))?,
            }
        }
        Ok(())
    }
}

/// A multilinear form in `d` blocks of `n` variables; block `i` variable `j` is base variable `i·n + j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    base: Polynomial,
    d: usize,
    n: usize,
}

impl Tensor {
    /// Checks that every monomial is linear in each block it touches and touches all `d` blocks.
    pub fn new(base: Polynomial, d: usize, n: usize) -> Result<Tensor> {
        if base.n() != d * n {
            return Err(Error::DimensionMismatch { expected: d * n, got: base.n() });
        }
        for (m, _) in base.terms() {
            let mut seen = vec![false; d];
            for &(v, e) in m.factors() {
                let block = v as usize / n;
                if e != 1 || seen[block] {
                    return Err(Error::BlockMismatch(format!("monomial {} is not multilinear", format_monomial(m))));
                }
                seen[block] = true;
            }
            if seen.iter().any(|s| !s) {
                return Err(Error::BlockMismatch(format!(
                    "monomial {} does not touch every block",
                    format_monomial(m)
                )));
            }
        }
        Ok(Tensor { base, d, n })
    }

    pub fn zero(field: &Field, d: usize, n: usize) -> Tensor {
        Tensor { base: Polynomial::zero(field, d * n), d, n }
    }

    pub fn base(&self) -> &Polynomial {
        &self.base
    }

    pub fn into_base(self) -> Polynomial {
        self.base
    }

    pub fn blocks(&self) -> usize {
        self.d
    }

    pub fn width(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Field {
        self.base.field()
    }

    pub fn is_zero(&self) -> bool {
        self.base.is_zero()
    }

    /// Block of a base variable.
    pub fn block_of(&self, var: usize) -> usize {
        var / self.n
    }

    pub fn evaluate(&self, blocks: &[&[FieldElement]]) -> Result<FieldElement> {
        if blocks.len() != self.d {
            return Err(Error::ArityMismatch { expected: self.d, got: blocks.len() });
        }
        let point: Vec<FieldElement> = blocks.iter().flat_map(|b| b.iter().copied()).collect();
        self.base.evaluate(&point)
    }

    /// Applies a permutation of blocks: block `i` moves to `perm[i]`.
    pub fn permute_blocks(&self, perm: &[usize]) -> Tensor {
        let n = self.n;
        let base = self.base.map_vars(self.d * n, |v| perm[v / n] * n + v % n);
        Tensor { base, d: self.d, n }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.d.saturating_sub(1)).all(|i| {
            let mut perm: Vec<usize> = (0..self.d).collect();
            perm.swap(i, i + 1);
            self.permute_blocks(&perm) == *self
        })
    }

    /// Block-diagonal sum on disjoint variables: `T1(x) + T2(y)` with block width `n1 + n2`.
    pub fn direct_sum(&self, other: &Tensor) -> Result<Tensor> {
        if self.d != other.d {
            return Err(Error::BlockMismatch("different block counts".into()));
        }
        let (d, n1, n2) = (self.d, self.n, other.n);
        let n = n1 + n2;
        let a = self.base.map_vars(d * n, |v| (v / n1) * n + v % n1);
        let b = other.base.map_vars(d * n, |v| (v / n2) * n + n1 + v % n2);
        Tensor::new(a.add(&b), d, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{field_create, prime_field};

    fn p(text: &str, q: u64) -> Polynomial {
        crate::parse::parse(text, &prime_field(q).unwrap(), None).unwrap()
    }

    fn naive_eval(poly: &Polynomial, point: &[FieldElement]) -> FieldElement {
        // term by term, exponentiation by repeated multiplication
        let f = poly.field();
        poly.terms().fold(FieldElement::ZERO, |acc, (m, c)| {
            let mut t = c;
            for &(v, e) in m.factors() {
                for _ in 0..e {
                    t = f.mul(t, point[v as usize]);
                }
            }
            f.add(acc, t)
        })
    }

    fn all_points(q: u32, n: usize) -> Vec<Vec<FieldElement>> {
        let total = (q as usize).pow(n as u32);
        (0..total)
            .map(|mut idx| {
                (0..n)
                    .map(|_| {
                        let d = idx % q as usize;
                        idx /= q as usize;
                        FieldElement(d as u32)
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn grlex_order() {
        let x1 = Monomial::var(0);
        let x2 = Monomial::var(1);
        assert!(x1 > x2);
        assert!(Monomial::from_pairs([(1, 2)]) > x1);
        assert!(Monomial::from_pairs([(0, 1), (1, 1)]) > Monomial::from_pairs([(1, 2)]));
        assert!(Monomial::from_pairs([(0, 2)]) > Monomial::from_pairs([(0, 1), (1, 1)]));
        assert!(Monomial::one() < x2);
    }

    #[test]
    fn evaluation_examples() {
        let a = p("x1*x2", 2);
        assert_eq!(a.evaluate(&[FieldElement(1), FieldElement(1)]).unwrap(), FieldElement(1));
        let b = p("x1*x2 + 2*x3^2", 5);
        assert_eq!(b.evaluate(&[FieldElement(1), FieldElement(2), FieldElement(1)]).unwrap(), FieldElement(4));
        assert!(matches!(b.evaluate(&[FieldElement(1)]), Err(Error::DimensionMismatch { .. })));
        assert_eq!(Polynomial::zero(b.field(), 3).evaluate(&[FieldElement(1); 3]).unwrap(), FieldElement(0));
    }

    #[test]
    fn evaluation_matches_naive_oracle_everywhere() {
        for (q, s) in [(3u64, 1u32), (2, 2), (5, 1)] {
            let f = field_create(q, s).unwrap();
            for seed in 0..10 {
                let poly = random_poly(&f, 3, 3, 6, seed);
                for pt in all_points(f.q(), 3) {
                    assert_eq!(poly.evaluate(&pt).unwrap(), naive_eval(&poly, &pt));
                }
            }
        }
    }

    #[test]
    fn delta_examples() {
        let f5 = prime_field(5).unwrap();
        let sq = p("x1^2", 5);
        assert_eq!(sq.delta(&[FieldElement(1)]).unwrap(), p("2*x1 + 1", 5));
        let lin = p("3*x1 + x2", 5);
        let h = [FieldElement(2), FieldElement(4)];
        assert_eq!(lin.delta(&h).unwrap(), Polynomial::constant(&f5, 2, lin.evaluate(&h).unwrap()));
        let r = random_poly(&f5, 3, 3, 5, 1);
        assert!(r.delta(&[FieldElement(0); 3]).unwrap().is_zero());
    }

    #[test]
    fn delta_lowers_degree_and_commutes() {
        let f3 = prime_field(3).unwrap();
        for seed in 0..20 {
            let poly = random_poly(&f3, 2, 3, 5, seed);
            let h = [FieldElement(1), FieldElement(2)];
            let k = [FieldElement(2), FieldElement(2)];
            let dh = poly.delta(&h).unwrap();
            assert!(dh.is_zero() || dh.degree() < poly.degree());
            assert_eq!(dh.delta(&k).unwrap(), poly.delta(&k).unwrap().delta(&h).unwrap());
        }
    }

    #[test]
    fn multilinearize_bilinear_example() {
        // x1*x2 -> h1*k2 + h2*k1, blocks (x1,x2) and (x3,x4)
        let t = p("x1*x2", 5).multilinearize().unwrap();
        assert_eq!(t.blocks(), 2);
        assert_eq!(*t.base(), p("x1*x4 + x2*x3", 5));
        let lin = p("2*x1 + x2", 5);
        assert_eq!(*lin.multilinearize().unwrap().base(), lin);
        assert!(matches!(p("3", 5).multilinearize(), Err(Error::DegreeZero)));
    }

    #[test]
    fn multilinearize_diagonal_is_d_factorial() {
        let f7 = prime_field(7).unwrap();
        for seed in 0..10 {
            let poly = random_poly(&f7, 2, 3, 4, seed);
            let d = poly.degree() as usize;
            let t = poly.multilinearize().unwrap();
            // substitute h_i = x for all blocks
            let diag: Vec<Polynomial> = (0..d * 2).map(|v| Polynomial::var(&f7, 2, v % 2)).collect();
            let lhs = t.base().compose(&diag).unwrap();
            let top = Polynomial::from_terms(
                &f7,
                2,
                poly.terms().filter(|(m, _)| m.degree() as usize == d).map(|(m, c)| (m.clone(), c)),
            );
            assert_eq!(lhs, top.scale(f7.from_int(6)));
        }
    }

    #[test]
    fn multilinearize_matches_iterated_delta() {
        let f2 = prime_field(2).unwrap();
        let f3 = prime_field(3).unwrap();
        for (f, seed) in [(&f2, 3u64), (&f3, 4), (&f2, 5)] {
            let poly = random_poly(f, 2, 2, 4, seed);
            let t = poly.multilinearize().unwrap();
            for h in all_points(f.q(), 2) {
                for k in all_points(f.q(), 2) {
                    let iter = poly.delta(&h).unwrap().delta(&k).unwrap();
                    // constant in the base point
                    assert_eq!(iter.degree(), 0);
                    let at0 = iter.evaluate(&[FieldElement(0); 2]).unwrap();
                    assert_eq!(t.evaluate(&[&h, &k]).unwrap(), at0);
                }
            }
        }
    }

    #[test]
    fn jacobian_examples() {
        assert_eq!(p("x1^2", 5).partial(0), p("2*x1", 5));
        assert!(p("x1^5", 5).partial(0).is_zero());
        let g = p("x1*x2 + x3*x4", 3).gradient();
        let expect = ["x2", "x1", "x4", "x3"];
        for (gi, e) in g.iter().zip(expect) {
            assert_eq!(*gi, crate::parse::parse(e, &prime_field(3).unwrap(), Some(4)).unwrap());
        }
        let fam = [p("x1*x2", 3), p("x1 + x2^2", 3)];
        let j = formal_jacobian(&fam).unwrap();
        assert_eq!(j.len(), 2);
        assert_eq!(j[1][1], p("2*x2", 3).with_n(2));
    }

    #[test]
    fn homogenize_examples() {
        let f5 = prime_field(5).unwrap();
        let h = p("x1^2 + x2", 5).homogenize().unwrap();
        assert_eq!(h, crate::parse::parse("x2^2 + x1*x3", &f5, Some(3)).unwrap());
        assert!(h.is_homogeneous());
        let lin = p("x1 + 1", 5).homogenize().unwrap();
        assert_eq!(lin, crate::parse::parse("x2 + x1", &f5, Some(2)).unwrap());
        for seed in 0..20 {
            let poly = random_poly(&f5, 3, 3, 5, seed);
            let q = poly.homogenize().unwrap();
            let back = q.substitute(0, FieldElement::ONE);
            let shifted = back.map_vars(3, |v| v - 1);
            assert_eq!(shifted, poly);
        }
    }

    #[test]
    fn compose_examples() {
        let f5 = prime_field(5).unwrap();
        let outer = crate::parse::parse("x1*x2", &f5, Some(2)).unwrap();
        let x1 = Polynomial::var(&f5, 3, 0);
        assert_eq!(outer.compose(&[x1.clone(), x1.clone()]).unwrap(), x1.pow(2));
        let sum = crate::parse::parse("x1 + x2", &f5, Some(2)).unwrap();
        let r = random_poly(&f5, 3, 2, 4, 9);
        assert!(sum.compose(&[r.clone(), r.neg()]).unwrap().is_zero());
        assert!(matches!(sum.compose(&[r.clone()]), Err(Error::ArityMismatch { .. })));
        let f3 = prime_field(3).unwrap();
        let r3 = Polynomial::var(&f3, 3, 0);
        assert!(matches!(sum.compose(&[r.clone(), r3]), Err(Error::FieldMismatch)));

        let det = crate::parse::parse("x1*x4 - x2*x3", &f5, Some(4)).unwrap();
        let inners: Vec<Polynomial> = (0..4).map(|s| random_poly(&f5, 2, 1, 3, s)).collect();
        let c = det.compose(&inners).unwrap();
        assert!(c.degree() <= 2);
        for pt in all_points(5, 2) {
            let vals: Vec<FieldElement> = inners.iter().map(|i| i.evaluate(&pt).unwrap()).collect();
            assert_eq!(c.evaluate(&pt).unwrap(), det.evaluate(&vals).unwrap());
        }
    }

    #[test]
    fn random_poly_contract() {
        let f2 = prime_field(2).unwrap();
        assert_eq!(random_poly(&f2, 4, 2, 3, 7), random_poly(&f2, 4, 2, 3, 7));
        for seed in 0..100 {
            assert_eq!(random_poly(&f2, 4, 2, 3, seed).degree(), 2);
        }
        let single = random_poly(&f2, 4, 3, 1, 11);
        assert_eq!(single.num_terms(), 1);
        assert_eq!(single.degree(), 3);
    }

    #[test]
    fn tensor_validation_and_symmetry() {
        let f2 = prime_field(2).unwrap();
        let base = crate::parse::parse("x1*x4", &f2, Some(4)).unwrap();
        let t = Tensor::new(base, 2, 2).unwrap();
        assert!(!t.is_symmetric());
        let bad = crate::parse::parse("x1*x2", &f2, Some(4)).unwrap();
        assert!(matches!(Tensor::new(bad, 2, 2), Err(Error::BlockMismatch(_))));
        let sym = p("x1*x2*x3 + x1^2", 5);
        assert!(sym.multilinearize().unwrap().is_symmetric());
    }
}
