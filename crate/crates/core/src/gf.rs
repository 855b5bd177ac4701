//! Prime and extension fields `F_{p^s}` with table-driven arithmetic.
//!
//! Elements are identified by the mixed-radix rank of their coefficient
//! vector in the power basis of the modulus root: `id = Σ c_i p^i`, with
//! `c_0` the constant term. The prime subfield is therefore `0..p`, which is
//! what lets polynomials with prime-field coefficients be lifted to an
//! extension without rewriting their coefficients.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_FIELD_ORDER: u32 = 1 << 20;

const ADD_TABLE_LIMIT: u32 = 1 << 10;

/// Element of a finite field, stored as its stable integer ID.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn id(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Shared handle to field parameters.
pub type Field = Arc<FieldParams>;

pub struct FieldParams {
    p: u32,
    s: u32,
    q: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    trace: Vec<u32>,
    add: Option<Vec<u32>>,
}

impl fmt::Debug for FieldParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldParams")
            .field("p", &self.p)
            .field("s", &self.s)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldParams {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.s == other.s && self.modulus == other.modulus
    }
}

impl Eq for FieldParams {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Builds `F_{p^s}` with the lexicographically smallest monic irreducible modulus.
pub fn field_create(p: u64, s: u32) -> Result<Field> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if s == 0 {
        return Err(Error::DegreeZero);
    }
    let q = (p as u128).checked_pow(s).unwrap_or(u128::MAX);
    if q > MAX_FIELD_ORDER as u128 {
        return Err(Error::FieldTooLarge(q));
    }
    Ok(Arc::new(FieldParams::build(p as u32, s, q as u32)))
}

/// Shorthand for `field_create(p, 1)`.
pub fn prime_field(p: u64) -> Result<Field> {
    field_create(p, 1)
}

// Dense polynomials over F_p, constant term first.
fn poly_rem(mut a: Vec<u32>, b: &[u32], p: u32) -> Vec<u32> {
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], p);
    while a.len() > db {
        let top = *a.last().unwrap();
        if top != 0 {
            let f = (top as u64 * lead_inv as u64 % p as u64) as u32;
            let shift = a.len() - 1 - db;
            for (i, &bi) in b.iter().enumerate() {
                let sub = (f as u64 * bi as u64 % p as u64) as u32;
                a[shift + i] = (a[shift + i] + p - sub) % p;
            }
        }
        a.pop();
    }
    a
}

fn inv_mod(a: u32, p: u32) -> u32 {
    pow_mod(a, p - 2, p)
}

fn pow_mod(a: u32, mut e: u32, p: u32) -> u32 {
    let mut base = a as u64 % p as u64;
    let mut acc = 1u64 % p as u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    for k in 1..=deg / 2 {
        // every monic polynomial of degree k
        let count = (p as u64).pow(k as u32);
        for code in 0..count {
            let mut g = vec![0u32; k + 1];
            let mut c = code;
            for gi in g.iter_mut().take(k) {
                *gi = (c % p as u64) as u32;
                c /= p as u64;
            }
            g[k] = 1;
            if poly_rem(f.to_vec(), &g, p).iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

fn find_modulus(p: u32, s: u32) -> Vec<u32> {
    let s = s as usize;
    let total = (p as u64).pow(s as u32);
    for code in 0..total {
        // (c_0, ..., c_{s-1}) in lexicographic order: c_0 most significant
        let mut coeffs = vec![0u32; s + 1];
        let mut c = code;
        for i in (0..s).rev() {
            coeffs[i] = (c % p as u64) as u32;
            c /= p as u64;
        }
        coeffs[s] = 1;
        if coeffs[0] == 0 {
            continue;
        }
        if is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldParams {
    fn build(p: u32, s: u32, q: u32) -> FieldParams {
        let modulus = if s == 1 { vec![0, 1] } else { find_modulus(p, s) };
        let mut field = FieldParams {
            p,
            s,
            q,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
            trace: Vec::new(),
            add: None,
        };
        if s > 1 {
            field.build_log_tables();
            if q <= ADD_TABLE_LIMIT && p != 2 {
                let mut add = vec![0u32; (q * q) as usize];
                for a in 0..q {
                    for b in 0..q {
                        add[(a * q + b) as usize] = field.add_digits(a, b);
                    }
                }
                field.add = Some(add);
            }
        }
        field.build_trace_table();
        field
    }

    fn build_log_tables(&mut self) {
        let q = self.q;
        let order = q - 1;
        for g in 2..q {
            let mut exp = Vec::with_capacity(order as usize);
            let mut x = 1u32;
            let mut ok = true;
            for i in 0..order {
                if i > 0 && x == 1 {
                    ok = false;
                    break;
                }
                exp.push(x);
                x = self.mul_slow(x, g);
            }
            if ok && x == 1 {
                let mut log = vec![0u32; q as usize];
                for (i, &e) in exp.iter().enumerate() {
                    log[e as usize] = i as u32;
                }
                self.exp = exp;
                self.log = log;
                return;
            }
        }
        unreachable!("multiplicative group of a finite field is cyclic");
    }

    fn build_trace_table(&mut self) {
        if self.s == 1 {
            self.trace = (0..self.q).collect();
            return;
        }
        // Tr is F_p-linear: tabulate it on the power basis.
        let mut basis_trace = Vec::with_capacity(self.s as usize);
        let mut t_k = 1u32;
        for _ in 0..self.s {
            let mut acc = 0u32;
            let mut conj = t_k;
            for _ in 0..self.s {
                acc = self.add_digits(acc, conj);
                conj = self.pow_raw(conj, self.p as u64);
            }
            debug_assert!(acc < self.p);
            basis_trace.push(acc);
            t_k = self.mul_slow(t_k, self.p);
        }
        let mut trace = vec![0u32; self.q as usize];
        for (id, slot) in trace.iter_mut().enumerate() {
            let mut c = id as u32;
            let mut acc = 0u64;
            for &bt in &basis_trace {
                acc += (c % self.p) as u64 * bt as u64;
                c /= self.p;
            }
            *slot = (acc % self.p as u64) as u32;
        }
        self.trace = trace;
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn is_prime_field(&self) -> bool {
        self.s == 1
    }

    /// Modulus coefficients, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    pub fn element(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() > self.s as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::FieldMismatch);
        }
        let mut id = 0u32;
        for &c in coeffs.iter().rev() {
            id = id * self.p + c;
        }
        Ok(FieldElement(id))
    }

    /// Reduces an integer into the prime subfield.
    pub fn from_int(&self, v: i64) -> FieldElement {
        FieldElement(v.rem_euclid(self.p as i64) as u32)
    }

    /// The generator `t` of the power basis (`None` for prime fields).
    pub fn generator(&self) -> Option<FieldElement> {
        (self.s > 1).then_some(FieldElement(self.p))
    }

    pub fn coeffs(&self, a: FieldElement) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.s as usize);
        let mut c = a.0;
        for _ in 0..self.s {
            out.push(c % self.p);
            c /= self.p;
        }
        out
    }

    #[inline]
    fn add_digits(&self, a: u32, b: u32) -> u32 {
        let p = self.p;
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut place = 1u32;
        while a > 0 || b > 0 {
            let d = (a % p + b % p) % p;
            out += d * place;
            place *= p;
            a /= p;
            b /= p;
        }
        out
    }

    #[inline]
    fn neg_digits(&self, a: u32) -> u32 {
        let p = self.p;
        let mut a = a;
        let mut out = 0u32;
        let mut place = 1u32;
        while a > 0 {
            let d = (p - a % p) % p;
            out += d * place;
            place *= p;
            a /= p;
        }
        out
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let s = self.s as usize;
        let ca = self.coeffs(FieldElement(a));
        let cb = self.coeffs(FieldElement(b));
        let mut prod = vec![0u32; 2 * s - 1];
        for (i, &x) in ca.iter().enumerate() {
            for (j, &y) in cb.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % self.p as u64) as u32;
            }
        }
        let r = poly_rem(prod, &self.modulus, self.p);
        self.element(&r).expect("reduced").0
    }

    fn pow_raw(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.s == 1 {
            let s = a.0 + b.0;
            FieldElement(if s >= self.p { s - self.p } else { s })
        } else if self.p == 2 {
            FieldElement(a.0 ^ b.0)
        } else if let Some(t) = &self.add {
            FieldElement(t[(a.0 * self.q + b.0) as usize])
        } else {
            FieldElement(self.add_digits(a.0, b.0))
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.s == 1 {
            FieldElement(if a.0 == 0 { 0 } else { self.p - a.0 })
        } else if self.p == 2 {
            a
        } else {
            FieldElement(self.neg_digits(a.0))
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.s == 1 {
            FieldElement((a.0 as u64 * b.0 as u64 % self.p as u64) as u32)
        } else if a.0 == 0 || b.0 == 0 {
            FieldElement::ZERO
        } else {
            let order = self.q - 1;
            let mut l = self.log[a.0 as usize] + self.log[b.0 as usize];
            if l >= order {
                l -= order;
            }
            FieldElement(self.exp[l as usize])
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.s == 1 {
            return Ok(FieldElement(inv_mod(a.0, self.p)));
        }
        let order = self.q - 1;
        let l = self.log[a.0 as usize];
        Ok(FieldElement(self.exp[((order - l) % order) as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        if self.s == 1 {
            return FieldElement(pow_mod(a.0, (e % (self.p as u64 - 1)) as u32, self.p));
        }
        let order = (self.q - 1) as u64;
        let l = self.log[a.0 as usize] as u64 * (e % order) % order;
        FieldElement(self.exp[l as usize])
    }

    /// Scalar multiple by an integer (repeated addition, reduced mod p).
    pub fn mul_int(&self, a: FieldElement, k: i64) -> FieldElement {
        self.mul(a, self.from_int(k))
    }

    /// Absolute trace `Σ_{i<s} a^{p^i}`, read as an integer in `[0, p)`.
    #[inline]
    pub fn trace(&self, a: FieldElement) -> u32 {
        self.trace[a.0 as usize]
    }

    /// Exponent `j` with `ψ(a) = exp(2πi j / p)`.
    #[inline]
    pub fn char_exponent(&self, a: FieldElement) -> u32 {
        self.trace[a.0 as usize]
    }

    pub fn format_element(&self, a: FieldElement) -> String {
        if self.s == 1 {
            return a.0.to_string();
        }
        let coeffs = self.coeffs(a);
        let mut parts = Vec::new();
        for (k, &c) in coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{k}"),
            };
            parts.push(match (c, k) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}*{mono}"),
            });
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join("+")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_moduli() {
        assert_eq!(field_create(2, 1).unwrap().q(), 2);
        assert_eq!(field_create(2, 2).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(field_create(3, 2).unwrap().modulus(), &[1, 0, 1]);
        // F_8: (c0, c1, c2) = (1, 0, 0) gives t^3 + 1 = (t + 1)(t^2 + t + 1), next is t^3 + t^2 + 1
        assert_eq!(field_create(2, 3).unwrap().modulus(), &[1, 0, 1, 1]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(field_create(4, 1), Err(Error::NotPrime(4))));
        assert!(matches!(field_create(1, 1), Err(Error::NotPrime(1))));
        assert!(matches!(field_create(3, 0), Err(Error::DegreeZero)));
        assert!(matches!(field_create(2, 21), Err(Error::FieldTooLarge(_))));
        assert!(field_create(2, 20).is_ok());
    }

    #[test]
    fn small_arithmetic() {
        let f5 = prime_field(5).unwrap();
        assert_eq!(f5.add(FieldElement(3), FieldElement(4)), FieldElement(2));
        let f4 = field_create(2, 2).unwrap();
        let t = f4.generator().unwrap();
        // t * t = t + 1
        assert_eq!(f4.mul(t, t), f4.element(&[1, 1]).unwrap());
        for f in [prime_field(7).unwrap(), f4.clone(), field_create(3, 2).unwrap()] {
            assert_eq!(f.inv(FieldElement::ONE).unwrap(), FieldElement::ONE);
            assert!(matches!(f.inv(FieldElement::ZERO), Err(Error::DivisionByZero)));
        }
    }

    #[test]
    fn trace_examples() {
        let f4 = field_create(2, 2).unwrap();
        assert_eq!(f4.trace(FieldElement::ZERO), 0);
        assert_eq!(f4.trace(f4.generator().unwrap()), 1);
        assert_eq!(f4.char_exponent(f4.generator().unwrap()), 1);
        let f3 = prime_field(3).unwrap();
        assert_eq!(f3.char_exponent(FieldElement(2)), 2);
        assert_eq!(f3.char_exponent(FieldElement(0)), 0);
    }

    fn matrix() -> Vec<Field> {
        [(2, 1), (3, 1), (2, 2), (5, 1), (2, 3), (3, 2), (5, 2)]
            .iter()
            .map(|&(p, s)| field_create(p, s).unwrap())
            .collect()
    }

    #[test]
    fn group_orders_and_axioms() {
        for f in matrix() {
            let q = f.q() as u64;
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), FieldElement::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.pow(a, q - 1), FieldElement::ONE, "{f:?} {a:?}");
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
                    assert_eq!(f.pow(a, q), a);
                }
                for b in f.elements() {
                    assert_eq!(f.add(a, b), FieldElement(f.add_digits(a.0, b.0)));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    if f.s() > 1 {
                        assert_eq!(f.mul(a, b).0, f.mul_slow(a.0, b.0));
                    }
                }
            }
        }
    }

    #[test]
    fn trace_is_balanced_homomorphism() {
        for f in matrix() {
            let p = f.p();
            let mut fibers = vec![0u32; p as usize];
            for a in f.elements() {
                fibers[f.trace(a) as usize] += 1;
                for b in f.elements() {
                    assert_eq!(
                        f.char_exponent(f.add(a, b)),
                        (f.char_exponent(a) + f.char_exponent(b)) % p
                    );
                }
            }
            let expect = f.q() / p;
            assert!(fibers.iter().all(|&c| c == expect), "{f:?}: {fibers:?}");
        }
    }

    #[test]
    fn deterministic_construction() {
        let a = field_create(3, 3).unwrap();
        let b = field_create(3, 3).unwrap();
        assert_eq!(a.modulus(), b.modulus());
        assert_eq!(*a, *b);
    }

    #[test]
    fn element_formatting() {
        let f9 = field_create(3, 2).unwrap();
        assert_eq!(f9.format_element(f9.element(&[1, 2]).unwrap()), "2*t+1");
        assert_eq!(f9.format_element(f9.generator().unwrap()), "t");
        let f8 = field_create(2, 3).unwrap();
        assert_eq!(f8.format_element(f8.element(&[1, 0, 1]).unwrap()), "t^2+1");
    }
}
