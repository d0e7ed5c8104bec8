//! For each irreducible factor g of the differential gcd, searches for a
//! certificate that g divides it, then shifts the certificate into an
//! explicit pair (b, c) violating the factor conditions.

use pbasis::expr::parse_instance;
use pbasis::freudenburg::{shift_to_coprime, verify_witness, witness_search, SearchOutcome, WitnessCase};
use pbasis::jac::dgcd;
use pbasis::oracle::irreducible_factors_trial;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => include_str!("instances/cusp_f2t.txt").to_string(),
    };
    let inst = parse_instance(&text)?;
    let ctx = &inst.context;
    let fs = &inst.fs;
    let d = dgcd(fs)?;
    println!("dgcd = {}", ctx.print(&d));
    let Some(factors) = irreducible_factors_trial(&d, 4)? else {
        println!("dgcd does not factor within degree 4");
        return Ok(());
    };
    for (g, _) in factors {
        print!("g = {}: ", ctx.print(&g));
        let w = match witness_search(fs, &g, 3, 1_000_000)? {
            SearchOutcome::Found(w) => w,
            other => {
                println!("{other:?}");
                continue;
            }
        };
        println!("case {} (verified: {})", w.case, verify_witness(fs, &w)?);
        let pairs = match w.case {
            WitnessCase::I | WitnessCase::II => vec![(w.i, w.b.as_ref(), w.c.as_ref(), if w.case == WitnessCase::I { 2 } else { 1 })],
            WitnessCase::III => vec![(w.i, w.b1.as_ref(), w.c1.as_ref(), 1), (w.j.unwrap(), w.b2.as_ref(), w.c2.as_ref(), 1)],
        };
        for (i, b, c, eps) in pairs {
            let (b, c) = (&b.unwrap().value, &c.unwrap().value);
            let c2 = shift_to_coprime(&fs[i], b, c, &g, eps)?;
            let h = &(b * &fs[i]) + &c2;
            println!("  f{}: b = {}, c = {} -> c' = {}", i + 1, ctx.print(b), ctx.print(c), ctx.print(&c2));
            println!("       b*f + c' = {} is divisible by g^{eps}", ctx.print(&h));
        }
    }
    Ok(())
}
