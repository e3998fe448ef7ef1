use pitkit::circuit::{expansion_cap, point_fn, Factor, PowerSumCircuit, SumUni};
use pitkit::field::pit_field;
use pitkit::kernels::duality_to_roabp;
use pitkit::pit_white::pit_roabp;
use pitkit::poly::UniPoly;

pub fn run_example() -> pitkit::Result<()> {
    let f = pit_field(1 << 16, 8)?;
    let base = |a: u64, b: u64| {
        Factor::Uni(SumUni::new(f, vec![UniPoly::new(f, 1, vec![a, 1]), UniPoly::new(f, 2, vec![0, b, 1])]))
    };
    let ps = PowerSumCircuit::single(3, base(1, 2), 2).plus(&PowerSumCircuit::single(f.neg(1), base(4, 5), 3));
    let r = duality_to_roabp(f, &ps)?;
    println!("width {} over {} layers", r.width, r.order.len());
    for x in [[0, 0], [3, 7], [11, 2]] {
        assert_eq!(r.eval_with(f, &point_fn(&x))?, ps.eval_with(f, &point_fn(&x))?);
    }
    assert_eq!(r.expand(f, expansion_cap())?, ps.expand(f, expansion_cap())?);
    let v = pit_roabp(f, &r);
    assert!(!v.is_zero());
    println!("roabp test: {v}");
    let zero = ps.plus(&ps.scale(f, f.neg(1)));
    assert!(pit_roabp(f, &duality_to_roabp(f, &zero)?).is_zero());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
