//! Random search for shifts h_1..h_m making {P, Δ_{h_1}P, ..., Δ_{h_m}P}
//! high-rank. Same seed, same answer, on any number of threads.

use strengthlab::expsum::Mode;
use strengthlab::family::search_shifts;
use strengthlab::generators::gen_f;
use strengthlab::gf::prime_field;
use strengthlab::kernel::ExecConfig;

fn main() -> strengthlab::Result<()> {
    let f = prime_field(2)?;
    let poly = gen_f(&f, 4, 2)?.poly;
    println!("P = {poly}");
    for threads in [1, 4] {
        let report = search_shifts(&poly, 2, 64, 1, &Mode::Exact, &ExecConfig::with_threads(threads))?;
        println!("threads {threads}: {}", serde_json::to_string(&report)?);
    }
    Ok(())
}
