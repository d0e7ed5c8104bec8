//! Builds a tame automorphism of F_3[x, y, z] from elementary maps and checks
//! that its coordinates form a p-basis: the jacobian determinant is a
//! nonzero constant and every variable has polynomial coordinates over B.

use pbasis::basis::{decompose_over_fraction_span, is_p_basis_of_constants, DecomposeVerdict};
use pbasis::expr::PolyContext;
use pbasis::jac::minor;
use pbasis::KKind;

fn main() -> pbasis::Result<()> {
    let ctx = PolyContext::new(KKind::prime_field(3)?, vec!["x".into(), "y".into(), "z".into()]).expect("valid names");
    let parse = |s: &str| ctx.parse(s).expect("valid polynomial");
    let mut fs = vec![parse("x"), parse("y"), parse("z")];
    // x += y^2, then y += x*z, then z += 2*x*y + 1
    fs[0] = &fs[0] + &fs[1].pow(2);
    fs[1] = &fs[1] + &(&fs[0] * &fs[2]);
    fs[2] = &fs[2] + &(&(&fs[0] * &fs[1]).scale(2) + &parse("1"));
    for (i, f) in fs.iter().enumerate() {
        println!("F{} = {}", i + 1, ctx.print(f));
    }
    println!("det = {}", ctx.print(&minor(&fs, &[0, 1, 2])?));
    println!("p-basis: {}", is_p_basis_of_constants(&fs)?.is_p_basis);
    for v in ["x", "y", "z"] {
        match decompose_over_fraction_span(&parse(v), &fs)? {
            DecomposeVerdict::InPolynomialSpan(coeffs) => {
                println!("{v} uses {} of the {} products F^a", coeffs.len(), 27);
            }
            other => println!("{v}: unexpected {other:?}"),
        }
    }
    Ok(())
}
