use pitkit::circuit::{parse_circuit, CircuitExpr};
use pitkit::pit_white::{didi_pit_traced, DidiOptions};

// (x1 + x2^2)(x1 - x2^2 + x3) - x1(x1 + x3) - x2^2(x3 - x2^2)
const ZERO: &str = "
(field 1000003)
(topsum
  (product (sumuni (u 1 0 1) (u 2 0 0 1)) (sumuni (u 1 0 1) (u 2 0 0 -1) (u 3 0 1)))
  (product (sumuni (u 1 0 -1)) (sumuni (u 1 0 1) (u 3 0 1)))
  (product (sumuni (u 2 0 0 -1)) (sumuni (u 3 0 1) (u 2 0 0 -1))))";

pub fn run_example() -> pitkit::Result<()> {
    let c = parse_circuit(ZERO)?;
    let CircuitExpr::TopSum(t) = &c.expr else { unreachable!() };
    for pretest in [true, false] {
        let (v, trace) = didi_pit_traced(c.field, t, DidiOptions { pretest, ..Default::default() })?;
        println!("pretest {pretest}: {v}\n{trace}");
        assert!(v.is_zero());
        assert!(trace.violations().is_empty());
    }
    let mut nz = t.clone();
    nz.terms.pop();
    let (v, _) = didi_pit_traced(c.field, &nz, DidiOptions::default())?;
    assert!(!v.is_zero());
    println!("dropping a term: {v}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
