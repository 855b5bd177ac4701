//! The U_d norm computed from its definition and from the bias of P̃.
//! Both are exact cyclotomic sums and must agree.

use strengthlab::expsum::{gowers_norm, GowersPath};
use strengthlab::gf::prime_field;
use strengthlab::kernel::ExecConfig;
use strengthlab::parse::parse;

fn main() -> strengthlab::Result<()> {
    let f = prime_field(3)?;
    let cfg = ExecConfig::default();
    for text in ["x1*x2", "x1^2 + x2*x3", "x1*x2*x3 + x1^3", "x1^2*x2 + x2^2"] {
        let p = parse(text, &f, None)?;
        let d = p.degree() as usize;
        let def = gowers_norm(&p, d, GowersPath::Definition, &cfg)?;
        let ten = gowers_norm(&p, d, GowersPath::Tensor, &cfg)?;
        println!(
            "{text:<18} ‖ψ∘P‖_U{d} = {:.6}   definition {:?}   tensor {:?}   agree: {}",
            def.norm,
            def.power_sum.counts,
            ten.power_sum.counts,
            def.power_sum.same_average(&ten.power_sum)
        );
    }
    Ok(())
}
