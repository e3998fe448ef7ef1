use pitkit::circuit::expansion_cap;
use pitkit::field::pit_field;
use pitkit::kernels::waring_decompose;
use pitkit::poly::{Monomial, SparsePoly};

pub fn run_example() -> pitkit::Result<()> {
    let f = pit_field(1 << 16, 8)?;
    let m = Monomial::from_exps(&[(1, 1), (2, 2), (3, 1)])?;
    let ps = waring_decompose(f, m)?;
    // b = (1, 1, 2) sorted, so (1+1)(2+1) summands
    assert_eq!(ps.len(), 6);
    assert_eq!(ps.expand(f, expansion_cap())?, SparsePoly::monomial(f, m, 1));
    println!("x1*x2^2*x3 = sum of {} fourth powers over F_{}", ps.len(), f.modulus());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
