//! Partition-rank certificates for the multilinear form of a cubic, checked
//! against the bias lower bound. Prints the certificate JSON.
//!
//! cargo run --example partition_rank -- "x1*x2*x3 + x4*x5*x6" 2

use strengthlab::expsum::multilinear_bias;
use strengthlab::gf::prime_field;
use strengthlab::kernel::ExecConfig;
use strengthlab::parse::parse;
use strengthlab::rank::{ncrank_bounds, prank_lower, prank_upper_search, verify_certificate, DEFAULT_SEARCH_BUDGET};

fn main() -> strengthlab::Result<()> {
    let mut args = std::env::args().skip(1);
    let text = args.next().unwrap_or_else(|| "x1*x2*x3 + x1*x4^2".into());
    let p: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(5);
    let field = prime_field(p)?;
    let cfg = ExecConfig::default();
    let poly = parse(&text, &field, None)?;
    let tensor = poly.multilinearize()?;

    let b = multilinear_bias(&tensor, &cfg)?;
    let cert = prank_upper_search(&tensor, DEFAULT_SEARCH_BUDGET, 0, &cfg).expect("search always returns");
    println!("b(P̃) = {}/{}^{}", b.numerator, b.q, b.log_denominator);
    println!("{} ≤ pr(P̃) ≤ {}", prank_lower(&tensor, &cfg)?, cert.len());
    println!("certificate verifies: {}", verify_certificate(&tensor, &cert)?);
    println!("{}", serde_json::to_string_pretty(&cert.to_json())?);

    let bounds = ncrank_bounds(&poly, None, DEFAULT_SEARCH_BUDGET, 0, &cfg)?;
    println!("nc-rank bounds: {} ..= {:?} (C_d = {})", bounds.lower, bounds.upper, bounds.c_d);
    Ok(())
}
