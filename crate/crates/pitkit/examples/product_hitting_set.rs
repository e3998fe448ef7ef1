use pitkit::circuit::{Factor, ProductCircuit};
use pitkit::field::pit_field;
use pitkit::pit_white::{hitting_set_product_sparse, pit_product_sparse};
use pitkit::poly::SparsePoly;

pub fn run_example() -> pitkit::Result<()> {
    let f = pit_field(1 << 20, 1)?;
    let hs = hitting_set_product_sparse(f, 2, 2, 4);
    println!("{} points for products of sparse polys (n=2, d=2, s=4)", hs.len());
    let (x, y) = (SparsePoly::var(f, 1), SparsePoly::var(f, 2));
    let prod = ProductCircuit::new(vec![Factor::sparse(x.sub(&y)), Factor::sparse(x.add(&SparsePoly::one(f)))]);
    let hit = hs.hit(&|p| prod.eval(f, p))?.expect("nonzero product is hit");
    println!("(x1 - x2)(x1 + 1) is nonzero at {hit:?}");
    println!("{}", pit_product_sparse(f, &prod)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
