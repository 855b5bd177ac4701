//! The minor-sum generators and their bias decay.

use strengthlab::expsum::{char_sum_exact, ExactBias};
use strengthlab::generators::{collapse_g, gen_f, gen_g, multinomial};
use strengthlab::gf::prime_field;
use strengthlab::kernel::ExecConfig;

fn main() -> strengthlab::Result<()> {
    let cfg = ExecConfig::default();
    let f3 = prime_field(3)?;
    println!("F^3_2 = {}", gen_f(&f3, 3, 2)?.poly);

    for n in 2..=5 {
        let g = gen_f(&f3, n, 2)?;
        let b = ExactBias::from_sum(3, 2 * n as u32, &char_sum_exact(&g.poly, &cfg)?)?;
        println!("b(F^{n}_2) over F_3 = {}/3^{}", b.numerator, b.log_denominator);
    }

    // the collapse multiplies by a multinomial (3 here), so leave characteristic 3
    let f5 = prime_field(5)?;
    let degrees = [2, 3];
    let g = gen_g(&f5, 2, &degrees)?;
    println!("G with t = 2, degrees {degrees:?}: {} variables, {} terms", g.poly.n(), g.poly.num_terms());
    println!("collapsed: {} (= {} · F^2_2)", collapse_g(&g.poly, 2, &degrees)?, multinomial(&degrees));
    println!("{}", serde_json::to_string_pretty(&g.variables[..4])?);
    Ok(())
}
