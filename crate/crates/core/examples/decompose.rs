//! Writes elements of A as combinations of the products f^a with
//! coefficients in B or in its fraction field.

use pbasis::basis::{decompose_over_fraction_span, DecomposeVerdict};
use pbasis::expr::PolyContext;
use pbasis::KKind;

fn main() -> pbasis::Result<()> {
    let ctx = PolyContext::new(KKind::prime_field(3)?, vec!["x".into(), "y".into()]).expect("valid names");
    let parse = |s: &str| ctx.parse(s).expect("valid polynomial");
    let fs = vec![parse("x^2*y")];
    println!("f = {}", ctx.print(&fs[0]));
    for target in ["x^4*y^2 + y^3", "x*y^2", "y", "x"] {
        print!("{target:>14}: ");
        match decompose_over_fraction_span(&parse(target), &fs)? {
            DecomposeVerdict::NotInFractionSpan => println!("not in the span"),
            DecomposeVerdict::InPolynomialSpan(c) => {
                let terms: Vec<String> = c.iter().map(|(a, y)| format!("({}) f^{}", ctx.print(&y.to_a()), a[0])).collect();
                println!("{}", terms.join(" + "));
            }
            DecomposeVerdict::InFractionSpan(c) => {
                let terms: Vec<String> = c
                    .iter()
                    .map(|(a, q)| format!("({})/({}) f^{}", ctx.print(&q.num.to_a()), ctx.print(&q.den.to_a()), a[0]))
                    .collect();
                println!("{}  [needs denominators]", terms.join(" + "));
            }
        }
    }
    Ok(())
}
