//! Reads an instance file and prints the jacobian data and the verdict.
//!
//!     cargo run --example analyze -- examples/instances/x2y_f3.txt

use pbasis::basis::is_p_basis_of_constants;
use pbasis::expr::parse_instance;
use pbasis::jac::jacobian_report;

const DEFAULT: &str = "p: 3\ncoeff: Fp\nvars: x, y\nf1: x^2*y\n";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => DEFAULT.to_string(),
    };
    let inst = parse_instance(&text)?;
    let ctx = &inst.context;
    let names = ctx.vars();
    for (i, f) in inst.fs.iter().enumerate() {
        println!("f{} = {}", i + 1, ctx.print(f));
    }
    let report = jacobian_report(&inst.fs)?;
    for (cols, d) in &report.minors {
        let cols: Vec<&str> = cols.iter().map(|&c| names[c].as_str()).collect();
        println!("minor ({}) = {}", cols.join(", "), ctx.print(d));
    }
    let verdict = is_p_basis_of_constants(&inst.fs)?;
    println!("dgcd = {}", ctx.print(&verdict.dgcd_value));
    println!("p-independent: {} via {:?}", verdict.independent, verdict.notes.independence_method);
    if let Some(det) = verdict.notes.determinant_in_k {
        println!("determinant in K*: {det}");
    }
    println!("p-basis: {}", verdict.is_p_basis);
    Ok(())
}
