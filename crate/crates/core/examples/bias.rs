//! Exact and sampled bias of a polynomial, plus its analytic rank.
//!
//! cargo run --example bias -- "x1*x2 + x3*x4" 3

use strengthlab::expsum::{analytic_rank, bias, McOptions, Mode};
use strengthlab::gf::prime_field;
use strengthlab::kernel::ExecConfig;
use strengthlab::parse::parse;

fn main() -> strengthlab::Result<()> {
    let mut args = std::env::args().skip(1);
    let text = args.next().unwrap_or_else(|| "x1*x2 + x3*x4".into());
    let p: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(3);
    let field = prime_field(p)?;
    let poly = parse(&text, &field, None)?;
    let cfg = ExecConfig::default();

    let exact = bias(&poly, &Mode::Exact, &cfg)?;
    println!("exact   b(P) = {:.6} + {:.6}i   |b| = {:.6}", exact.value_re, exact.value_im, exact.magnitude);
    let sampled = bias(&poly, &Mode::MonteCarlo(McOptions { samples: 20_000, delta: 0.01, seed: 1 }), &cfg)?;
    println!(
        "sampled b(P) = {:.6} + {:.6}i   ± {:.4} (each part, 99%)",
        sampled.value_re, sampled.value_im, sampled.ci_radius
    );
    let ar = analytic_rank(&poly, &Mode::Exact, &cfg)?;
    println!("ar(P) = -log_q b(P̃) = {}", ar.value());
    Ok(())
}
