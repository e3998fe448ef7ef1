use pitkit::field::Fp;
use pitkit::pit_white::{ks_bound, ks_certificate};
use pitkit::poly::{Monomial, SparsePoly};

pub fn run_example() -> pitkit::Result<()> {
    let f = Fp::with_modulus(101)?;
    let m = |e: &[(u32, u32)]| Monomial::from_exps(e);
    let p = SparsePoly::from_terms(f, [(m(&[(1, 2), (2, 1)])?, 1), (m(&[(2, 3)])?, 100), (m(&[(3, 1)])?, 5)]);
    let (sp, d) = (p.sparsity(), p.max_exp() + 1);
    let r = ks_certificate(&p, sp, d)?.expect("nonzero");
    println!("{p} is certified at r = {r} (bound {})", ks_bound(sp, 3, d));
    assert!(r <= ks_bound(sp, 3, d));
    assert_eq!(ks_certificate(&SparsePoly::zero(f), 1, 2)?, None);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
