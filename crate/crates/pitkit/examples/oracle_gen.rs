use pitkit::field::pit_field;
use pitkit::oracle::{brute_zero_test, gen_random, schwartz_zippel, ClassTag, GenParams};

pub fn run_example() -> pitkit::Result<()> {
    let f = pit_field(1 << 20, 12)?;
    let p = GenParams::default();
    for class in ClassTag::ALL {
        let c = gen_random(f, class, &p, 7, false)?;
        let z = gen_random(f, class, &p, 7, true)?;
        assert!(brute_zero_test(&z)?.is_zero());
        println!("{class:>12}: random {}, forced {}", brute_zero_test(&c)?, schwartz_zippel(&z, 10, 1)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
