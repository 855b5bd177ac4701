//! Point counts of X and X^sing over F_{p^s} and the codimension κ they imply.
//!
//! cargo run --example singular_locus -- 3

use strengthlab::family::PolyFamily;
use strengthlab::gf::prime_field;
use strengthlab::kernel::ExecConfig;
use strengthlab::parse::parse;
use strengthlab::variety::codim_singular;

fn main() -> strengthlab::Result<()> {
    let p: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2);
    let f = prime_field(p)?;
    let cfg = ExecConfig::default();
    for text in ["x1*x2", "x1*x2 + x3*x4", "x1*x2 + x3*x4 + x5*x6", "x1^2 + x2^2"] {
        let family = PolyFamily::new(vec![parse(text, &f, None)?])?;
        let report = codim_singular(&family, 2, &cfg)?;
        print!("{}", report.table.to_csv());
        println!("{text}: dim X ≈ {:?}, dim X^sing ≈ {:?}, κ = {}\n",
            report.dim_x.estimate, report.dim_sing.estimate, serde_json::to_string(&report.kappa)?);
    }
    Ok(())
}
