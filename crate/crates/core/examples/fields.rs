//! Finite-field arithmetic: build F_9, inspect its modulus, trace and a generator.
//!
//! cargo run --example fields -- 3 2

use strengthlab::gf::field_create;

fn main() -> strengthlab::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (p, s) = (args.first().copied().unwrap_or(3), args.get(1).copied().unwrap_or(2) as u32);
    let f = field_create(p, s)?;
    println!("F_{} = F_{}[t] / ({:?}, constant term first)", f.q(), f.p(), f.modulus());
    for a in f.elements() {
        let inv = f.inv(a).map(|b| f.format_element(b)).unwrap_or_else(|_| "-".into());
        println!("{:>8}  id {:>3}  trace {}  inverse {}", f.format_element(a), a.id(), f.trace(a), inv);
    }
    Ok(())
}
