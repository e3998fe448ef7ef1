use pitkit::circuit::{Factor, ProductCircuit};
use pitkit::field::pit_field;
use pitkit::pit_black::pit_composed;
use pitkit::poly::SparsePoly;

pub fn run_example() -> pitkit::Result<()> {
    let f = pit_field(1 << 20, 1)?;
    let (x1, x2, x3) = (SparsePoly::var(f, 1), SparsePoly::var(f, 2), SparsePoly::var(f, 3));
    let g = x1.mul(&x2).add(&x3);
    let h = x2.sub(&x3);
    let ts = [
        ProductCircuit::new(vec![Factor::sparse(g.clone())]),
        ProductCircuit::new(vec![Factor::sparse(h.clone())]),
        ProductCircuit::new(vec![Factor::sparse(g.clone()), Factor::sparse(g.add(&h))]),
    ];
    let (a, b, c) = (SparsePoly::var(f, 1), SparsePoly::var(f, 2), SparsePoly::var(f, 3));
    // T3 = T1^2 + T1*T2
    let annihilator = c.sub(&a.pow(2)).sub(&a.mul(&b));
    let (v, rep) = pit_composed(f, &annihilator, &ts)?;
    println!("C = c - a^2 - ab: {v}, rank {}, basis {:?}", rep.rank, rep.basis);
    assert!(v.is_zero());
    let (v, _) = pit_composed(f, &annihilator.add(&b), &ts)?;
    println!("C + b: {v}");
    assert!(!v.is_zero());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
