//! Images of the small monomials under `s -> Λ_{d,d}(s Q^(p-1))`, computed
//! by the generic pipeline and by the closed monomial formula.
//!
//! `cargo run --example cartier_tables -- 11`

use motzkin::bipoly::monomial_cartier;
use motzkin::{BiPoly, Binomials, CartierKernel, FieldElement, Prime};

fn main() {
    let p = Prime::new(std::env::args().nth(1).map_or(11, |a| a.parse().expect("prime"))).expect("valid prime");
    let kernel = CartierKernel::new(p);
    let binoms = Binomials::new(p);
    println!("Q^(p-1) has {} terms", kernel.power().len());
    let monomials = [(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 3), (2, 4)];
    for (r, t) in monomials {
        let s = BiPoly::monomial(r, t, FieldElement::ONE);
        println!("\nx^{r} y^{t}:");
        for (d, image) in kernel.images(&s).iter().enumerate() {
            let closed = monomial_cartier(r, t, d as u32, &binoms).expect("digit in range");
            let mark = if &closed == image { "" } else { "  <- closed form differs" };
            println!("  d = {d:>2}: {}{mark}", image.display(p));
        }
    }
}
