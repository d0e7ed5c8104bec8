//! Each maximal minor of the jacobian gives a derivation that kills every
//! generator but one, and sends that one to the minor itself.

use pbasis::derivation::jacobian_derivation;
use pbasis::expr::PolyContext;
use pbasis::jac::{column_sets, dgcd, minor};
use pbasis::KKind;

fn main() -> pbasis::Result<()> {
    let ctx = PolyContext::new(KKind::prime_field(5)?, vec!["x".into(), "y".into(), "z".into()]).expect("valid names");
    let fs = vec![ctx.parse("x^2*y + z").unwrap(), ctx.parse("y*z^3 + x").unwrap()];
    for cols in column_sets(3, 2) {
        println!("columns {cols:?}: minor {}", ctx.print(&minor(&fs, &cols)?));
        for i in 0..fs.len() {
            let d = jacobian_derivation(&fs, i, &cols)?;
            let coeffs: Vec<String> = d.coeffs().iter().map(|c| ctx.print(c)).collect();
            let images: Vec<String> = fs.iter().map(|f| ctx.print(&d.apply(f).unwrap())).collect();
            println!("  d{} = ({})  images ({})", i + 1, coeffs.join(", "), images.join(", "));
        }
    }
    println!("dgcd = {}", ctx.print(&dgcd(&fs)?));
    Ok(())
}
