//! Joint value distribution of a family and the equidistribution check.

use strengthlab::expsum::joint_distribution;
use strengthlab::family::{equidistribution_check, family_min_arank, fiber_fourier, PolyFamily};
use strengthlab::expsum::Mode;
use strengthlab::gf::prime_field;
use strengthlab::kernel::ExecConfig;
use strengthlab::parse::parse_lines;

fn main() -> strengthlab::Result<()> {
    let f = prime_field(3)?;
    let cfg = ExecConfig::default();
    let family = PolyFamily::new(parse_lines("x1*x4 + x2*x5 + x3*x6\nx1*x2 + x3^2 + x5*x6\n", &f, None)?)?;

    let dist = joint_distribution(family.members(), &cfg)?;
    println!("fiber sizes (λ in rank order): {:?}", dist.counts());
    for (l, s) in fiber_fourier(&dist).into_iter().take(5) {
        let l: Vec<u32> = l.iter().map(|x| x.id()).collect();
        println!("f̂({l:?}) = {:.5}", s.value());
    }
    let best = family_min_arank(&family, &Mode::Exact, &cfg)?;
    println!("min span ar = {} at {}", best.rank.value(), best.representative);
    let report = equidistribution_check(&family, &cfg)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
