use pitkit::field::pit_field;
use pitkit::pit_black::{hitting_set_spsp, verify_hitting_set};

pub fn run_example() -> pitkit::Result<()> {
    let f = pit_field(1 << 20, 1)?;
    let hs = hitting_set_spsp(f, 3, 4, 2, 2, 6, 1)?;
    let rep = verify_hitting_set(&hs, 50, 0)?;
    println!("spsp n=3 d=4 k=2 delta=2: {} points, {}/{} hits", hs.len(), rep.hits, rep.samples);
    assert!(rep.misses.is_empty());
    let text = hs.serialize();
    println!("{}", text.lines().next().unwrap_or(""));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
