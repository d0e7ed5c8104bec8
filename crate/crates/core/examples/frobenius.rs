//! The Frobenius subring B = K[x^p]: splitting a polynomial into its
//! B-components, p-th roots, and the square-free / B-free test that the
//! factor conditions rest on.

use pbasis::expr::PolyContext;
use pbasis::frob::{b_content, b_decompose, b_recompose, is_squarefree_and_bfree, pth_root};
use pbasis::oracle::irreducible_factors_trial;
use pbasis::KKind;

fn main() -> pbasis::Result<()> {
    let ctx = PolyContext::new(KKind::poly_over_prime_field(2)?, vec!["x".into(), "y".into()]).expect("valid names");
    let parse = |s: &str| ctx.parse(s).expect("valid polynomial");

    let f = parse("x^3*y + t*x^2 + x*y^2 + y + 1");
    println!("f = {}", ctx.print(&f));
    let d = b_decompose(&f);
    for (beta, c) in d.components() {
        println!("  beta {beta:?}: {}", ctx.print(&c.to_a()));
    }
    assert_eq!(b_recompose(&d), f);

    let sq = parse("x^2 + t*y^2");
    println!("p-th root of {} = {:?}", ctx.print(&sq), pth_root(&sq).map(|r| ctx.print(&r)));
    println!("B-content of {} = {}", ctx.print(&(&sq * &f)), ctx.print(&b_content(&(&sq * &f))));

    for s in ["x^2 + t", "x^2*y + y", "(x + y)^2*x", "x^3 + t*x + 1"] {
        let g = parse(s);
        let factors = irreducible_factors_trial(&g, 4)?.expect("small enough to factor");
        let shown: Vec<String> = factors.iter().map(|(q, k)| format!("({})^{k}", ctx.print(q))).collect();
        println!("{s:>14}: square-free and B-free = {:<5}  factors {}", is_squarefree_and_bfree(&g)?, shown.join(" "));
    }
    Ok(())
}
