use proptest::prelude::*;
use strengthlab::gf::{field_create, Field, FieldElement};
use strengthlab::kernel::unrank;
use strengthlab::parse::parse;
use strengthlab::poly::{random_poly, Polynomial};

const FIELDS: [(u64, u32); 7] = [(2, 1), (3, 1), (2, 2), (5, 1), (2, 3), (3, 2), (5, 2)];

fn fields() -> Vec<Field> {
    FIELDS.iter().map(|&(p, s)| field_create(p, s).unwrap()).collect()
}

#[test]
fn multiplicative_group_has_order_q_minus_one() {
    for f in fields() {
        for g in f.elements().skip(1) {
            assert_eq!(f.pow(g, f.q() as u64 - 1), FieldElement::ONE, "q = {}, g = {}", f.q(), g.id());
        }
    }
}

#[test]
fn trace_fibers_are_balanced() {
    for f in fields() {
        let mut sizes = vec![0u32; f.p() as usize];
        for a in f.elements() {
            sizes[f.trace(a) as usize] += 1;
        }
        let fiber = f.p().pow(f.s() - 1);
        assert!(sizes.iter().all(|&x| x == fiber), "q = {}: {sizes:?}", f.q());
    }
}

#[test]
fn char_exponent_is_additive() {
    for f in fields() {
        let p = f.p();
        for a in f.elements() {
            for b in f.elements() {
                let lhs = f.char_exponent(f.add(a, b));
                assert_eq!(lhs, (f.char_exponent(a) + f.char_exponent(b)) % p);
            }
        }
    }
}

#[test]
fn field_construction_is_deterministic() {
    for &(p, s) in &FIELDS {
        assert_eq!(field_create(p, s).unwrap().modulus(), field_create(p, s).unwrap().modulus());
    }
    assert_eq!(field_create(2, 3).unwrap().modulus(), &[1, 0, 1, 1]);
}

fn corpus() -> Vec<Polynomial> {
    let mut out = Vec::new();
    for f in fields().into_iter().take(4) {
        for n in 1..=3 {
            for d in 1..=3 {
                for seed in 0..4 {
                    out.push(random_poly(&f, n, d, 1 + seed as usize, seed * 31 + n as u64));
                }
            }
        }
    }
    out
}

#[test]
fn deltas_commute() {
    for p in corpus() {
        let f = p.field().clone();
        let n = p.n();
        let h = unrank(3, f.q(), n);
        let k = unrank(5 % f.q() as u64 + 1, f.q(), n);
        let hk = p.delta(&h).unwrap().delta(&k).unwrap();
        let kh = p.delta(&k).unwrap().delta(&h).unwrap();
        assert_eq!(hk, kh, "{p}");
    }
}

#[test]
fn multilinear_form_matches_iterated_deltas() {
    for p in corpus().into_iter().filter(|p| p.degree() >= 1) {
        let f = p.field().clone();
        let (n, d) = (p.n(), p.degree() as usize);
        let tensor = p.multilinearize().unwrap();
        let points = (f.q() as u64).pow((n * d) as u32);
        if points > 1 << 14 {
            continue;
        }
        let origin = vec![FieldElement::ZERO; n];
        let corner = unrank(1, f.q(), n);
        for idx in 0..points {
            let flat = unrank(idx, f.q(), n * d);
            let blocks: Vec<&[FieldElement]> = flat.chunks(n).collect();
            let mut iterated = p.clone();
            for h in &blocks {
                iterated = iterated.delta(h).unwrap();
            }
            // a d-fold difference of a degree-d polynomial is constant in the base point
            let at_origin = iterated.evaluate(&origin).unwrap();
            assert_eq!(at_origin, iterated.evaluate(&corner).unwrap(), "{p}");
            assert_eq!(tensor.evaluate(&blocks).unwrap(), at_origin, "{p} at {idx}");
        }
    }
}

#[test]
fn homogenize_then_dehomogenize_is_identity() {
    for p in corpus().into_iter().filter(|p| p.degree() >= 1) {
        let h = p.homogenize().unwrap();
        assert!(h.is_homogeneous());
        let back = h.substitute(0, FieldElement::ONE).map_vars(p.n(), |v| v - 1);
        assert_eq!(back, p);
    }
}

#[test]
fn parse_examples() {
    let f5 = field_create(5, 1).unwrap();
    let p = parse("x1*x2 + 2*x3^2", &f5, Some(3)).unwrap();
    assert_eq!((p.num_terms(), p.degree()), (2, 2));
    assert!(parse("x1 - x1", &f5, None).unwrap().is_zero());
    let f2 = field_create(2, 1).unwrap();
    assert_eq!(parse("(x1+x2)^2", &f2, None).unwrap(), parse("x1^2 + x2^2", &f2, None).unwrap());
}

proptest! {
    #[test]
    fn printed_polynomials_reparse(field_idx in 0usize..7, n in 1usize..5, d in 0u32..5, terms in 1usize..6, seed in any::<u64>()) {
        let f = &fields()[field_idx];
        let p = random_poly(f, n, d, terms, seed);
        let back = parse(&p.to_string(), f, Some(n)).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn evaluation_is_a_ring_map(field_idx in 0usize..7, seed in any::<u64>(), point in 0u64..10_000) {
        let f = &fields()[field_idx];
        let a = random_poly(f, 3, 2, 3, seed);
        let b = random_poly(f, 3, 3, 2, seed.wrapping_add(1));
        let v = unrank(point % (f.q() as u64).pow(3), f.q(), 3);
        let (ea, eb) = (a.evaluate(&v).unwrap(), b.evaluate(&v).unwrap());
        prop_assert_eq!(a.add(&b).evaluate(&v).unwrap(), f.add(ea, eb));
        prop_assert_eq!(a.mul(&b).evaluate(&v).unwrap(), f.mul(ea, eb));
    }
}
