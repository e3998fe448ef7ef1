use pitkit::circuit::{expand_to_sparse, parse_circuit, serialize_circuit};

const SRC: &str = "
; (x1 + x2)(x1 - x2) - x1^2 + x2^2
(field 101)
(topsum
  (product (sparse 1 (t 1 (v 1 1)) (t 1 (v 2 1))) (sparse 1 (t 1 (v 1 1)) (t -1 (v 2 1))))
  (product (sparse 2 (t -1 (v 1 2)) (t 1 (v 2 2)))))";

pub fn run_example() -> pitkit::Result<()> {
    let c = parse_circuit(SRC)?;
    let p = expand_to_sparse(&c)?;
    println!("expands to {p}");
    assert!(p.is_zero());
    let again = parse_circuit(&serialize_circuit(&c))?;
    assert_eq!(again, c);
    match parse_circuit("(field 101)\n(topsum (product") {
        Err(e) => println!("{e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
