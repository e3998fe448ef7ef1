use pitkit::field::pit_field;
use pitkit::kernels::{dlog_expand, inverse_product_sparse};
use pitkit::poly::{SparsePoly, Z};

pub fn run_example() -> pitkit::Result<()> {
    let f = pit_field(1 << 20, 12)?;
    let (z, x) = (SparsePoly::var(f, Z), SparsePoly::var(f, 1));
    let b = x.add(&SparsePoly::constant(f, 2));
    let prec = 5;
    let dl = dlog_expand(f, 3, &b, prec)?;
    println!("dlog(3 - z(x+2)) mod z^{prec}: {} summands, z-degree {}", dl.value.len(), dl.z_degree);
    let g = SparsePoly::constant(f, 3).sub(&z.mul(&b));
    let lhs = dl.value.expand_trunc(f, Z, prec).mul_trunc(&g, Z, prec);
    assert_eq!(lhs, g.partial(Z).truncate_in(Z, prec));
    let (p, q) = inverse_product_sparse(f, &[(3, b.clone()), (5, x.clone())], prec)?;
    let g2 = SparsePoly::constant(f, 5).sub(&z.mul(&x));
    let one = p.mul_trunc(&g, Z, prec).mul_trunc(&g2, Z, prec).scale(f.inv(q));
    assert_eq!(one, SparsePoly::one(f));
    println!("1/((3 - z(x+2))(5 - zx)) round-trips mod z^{prec}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
