use strengthlab::expsum::{analytic_rank, char_sum_exact, joint_distribution, multilinear_bias, AnalyticRank, Mode};
use strengthlab::family::{equidistribution_check, fiber_fourier, graded_basis, PolyFamily};
use strengthlab::gf::{prime_field, FieldElement};
use strengthlab::kernel::ExecConfig;
use strengthlab::parse::parse;
use strengthlab::poly::{random_poly, Polynomial};
use strengthlab::rank::{prank_lower, prank_upper_search, verify_certificate, DEFAULT_SEARCH_BUDGET};
use strengthlab::suite::{corpus, family_corpus};

fn cfg() -> ExecConfig {
    ExecConfig::with_threads(2)
}

#[test]
fn certificates_are_sandwiched_by_the_bias_bound() {
    for item in corpus() {
        let t = item.poly.multilinearize().unwrap();
        let cert = prank_upper_search(&t, DEFAULT_SEARCH_BUDGET, item.seed, &cfg()).unwrap();
        assert!(verify_certificate(&t, &cert).unwrap());
        let r = cert.len() as u32;
        let b = multilinear_bias(&t, &cfg()).unwrap();
        // non-strict: rank-r bilinear forms have b(T) = q^-r exactly
        assert!(b.at_least_power(r), "{}: b = {b:?}, r = {r}", item.poly);
        assert!(prank_lower(&t, &cfg()).unwrap() <= r);
    }
}

#[test]
fn bilinear_forms_attain_equality() {
    let f = prime_field(2).unwrap();
    let t = parse("x1*x2", &f, None).unwrap().multilinearize().unwrap();
    let cert = prank_upper_search(&t, DEFAULT_SEARCH_BUDGET, 0, &cfg()).unwrap();
    let b = multilinear_bias(&t, &cfg()).unwrap();
    assert_eq!(cert.len(), 2);
    assert!(b.at_least_power(2) && !b.exceeds_power(2));
}

#[test]
fn direct_sums_concatenate_certificates() {
    let f = prime_field(3).unwrap();
    for seed in 0..10 {
        let a = random_poly(&f, 2, 2, 3, seed).multilinearize().unwrap();
        let b = random_poly(&f, 1, 2, 2, seed + 100).multilinearize().unwrap();
        let ca = prank_upper_search(&a, DEFAULT_SEARCH_BUDGET, 0, &cfg()).unwrap();
        let cb = prank_upper_search(&b, DEFAULT_SEARCH_BUDGET, 0, &cfg()).unwrap();
        let sum = a.direct_sum(&b).unwrap();
        let joined = ca.direct_sum(&cb).unwrap();
        assert!(verify_certificate(&sum, &joined).unwrap());
        let best = prank_upper_search(&sum, DEFAULT_SEARCH_BUDGET, 0, &cfg()).unwrap();
        assert!(best.len() <= ca.len() + cb.len());
    }
}

#[test]
fn fourier_transform_of_fibers_is_the_bias_of_combinations() {
    for family in family_corpus() {
        let dist = joint_distribution(family.members(), &cfg()).unwrap();
        assert_eq!(dist.total(), dist.counts().iter().sum::<u64>());
        for (l, f_hat) in fiber_fourier(&dist) {
            let direct = char_sum_exact(&family.combination(&l), &cfg()).unwrap();
            assert!(f_hat.same_average(&direct), "l = {l:?}");
            if l.iter().all(|x| x.is_zero()) {
                assert_eq!(f_hat.as_integer(), Some(f_hat.total as i128));
            }
        }
    }
}

#[test]
fn analytic_rank_is_projective() {
    for item in corpus().into_iter().step_by(3) {
        let f = item.poly.field().clone();
        let base = analytic_rank(&item.poly, &Mode::Exact, &cfg()).unwrap();
        for c in f.elements().skip(2) {
            let scaled = analytic_rank(&item.poly.scale(c), &Mode::Exact, &cfg()).unwrap();
            assert_eq!(scaled, base, "{} scaled by {}", item.poly, c.id());
        }
    }
}

fn in_span(family: &[Polynomial], p: &Polynomial) -> bool {
    let mut members = family.to_vec();
    let before = PolyFamily::new_allow_dependent(members.clone()).unwrap().dimension();
    members.push(p.clone());
    PolyFamily::new_allow_dependent(members).unwrap().dimension() == before
}

#[test]
fn graded_basis_spans_the_same_space() {
    for family in family_corpus() {
        let Ok(basis) = graded_basis(&family) else { continue };
        let elements = basis.elements();
        assert_eq!(elements.len(), family.dimension());
        for (degree, polys) in &basis.grades {
            assert!(polys.iter().all(|p| p.degree() == *degree));
        }
        assert!(family.members().iter().all(|m| in_span(&elements, m)));
        assert!(elements.iter().all(|e| in_span(family.members(), e)));
    }
}

#[test]
fn equidistribution_measured_on_the_corpus() {
    // Over q ∈ {2, 3} the hypothesis alone does not force deviation ≤ 1/2
    // (x1·x2 + x3·x4 over F_2 has fibers 10 and 6), so this is a measurement.
    let f2 = prime_field(2).unwrap();
    let fam = PolyFamily::new(vec![parse("x1*x2 + x3*x4", &f2, None).unwrap()]).unwrap();
    let r = equidistribution_check(&fam, &cfg()).unwrap();
    assert!(r.hypothesis && !r.satisfied);
    assert_eq!((r.min_fiber, r.max_fiber), (6, 10));

    let f3 = prime_field(3).unwrap();
    let fam = PolyFamily::new(vec![parse("x1*x4 + x2*x5 + x3*x6", &f3, None).unwrap()]).unwrap();
    let r = equidistribution_check(&fam, &cfg()).unwrap();
    assert!(r.hypothesis && r.satisfied && r.deviation <= 0.5);
}

#[test]
fn family_examples() {
    let f2 = prime_field(2).unwrap();
    let fam = PolyFamily::new(vec![parse("x1*x2", &f2, None).unwrap()]).unwrap();
    let r = equidistribution_check(&fam, &cfg()).unwrap();
    // ar(x1·x2) = 2 on the tensor reading, 1 on the bias reading
    assert_eq!(r.min_span_arank.value(), 2.0);
    assert_eq!(r.min_span_bias_rank, 1.0);
    assert!(r.hypothesis && !r.bias_hypothesis);

    let lin = PolyFamily::new(vec![Polynomial::var(&f2, 2, 0), Polynomial::var(&f2, 2, 1)]).unwrap();
    let dist = joint_distribution(lin.members(), &cfg()).unwrap();
    assert!(dist.counts().iter().all(|&c| c == 1));
    let ar = analytic_rank(&lin.combination(&[FieldElement::ONE, FieldElement::ONE]), &Mode::Exact, &cfg()).unwrap();
    assert!(matches!(ar, AnalyticRank::Exact(b) if b.is_zero()));
}
