use pitkit::circuit::{CircuitExpr, Outcome};
use pitkit::field::pit_field;
use pitkit::oracle::{brute_zero_test, gen_nonzero, gen_random, ClassTag, GenParams};
use pitkit::pit_black::{hitting_set_spsp, hitting_set_spsu, pit_jacobian};
use std::time::Instant;

#[test]
fn jacobian_matches_oracle() {
    let f = pit_field(1 << 20, 1).unwrap();
    for (class, p) in [
        (ClassTag::Spsp, GenParams { n: 3, d: 2, k: 2, delta: 2, factors: 2, sparsity: 3 }),
        (ClassTag::Spsu, GenParams { n: 3, d: 2, k: 3, factors: 2, ..Default::default() }),
    ] {
        for seed in 0..60 {
            for force in [false, true] {
                let c = gen_random(f, class, &p, seed, force).unwrap();
                let CircuitExpr::TopSum(t) = &c.expr else { unreachable!() };
                let (v, _) = pit_jacobian(f, t).unwrap();
                let want = brute_zero_test(&c).unwrap().outcome == Outcome::Zero;
                assert_eq!(v.is_zero(), want, "{class} seed {seed} force {force}");
                if let Some(pt) = v.point() {
                    assert_ne!(c.eval(pt).unwrap(), 0);
                }
            }
        }
    }
}

#[test]
fn class_sets_hit_samples() {
    let f = pit_field(1 << 20, 1).unwrap();
    let t0 = Instant::now();
    let hs = hitting_set_spsp(f, 3, 4, 2, 2, 6, 7).unwrap();
    let p = GenParams { n: 3, d: 2, k: 2, delta: 2, factors: 2, sparsity: 3 };
    for seed in 0..100 {
        let c = gen_nonzero(f, ClassTag::Spsp, &p, seed).unwrap();
        assert!(hs.hit(&|x| c.eval(x)).unwrap().is_some(), "spsp seed {seed}");
    }
    let hs = hitting_set_spsu(f, 3, 4, 2, 6, 7).unwrap();
    let p = GenParams { n: 3, d: 2, k: 2, factors: 2, ..Default::default() };
    for seed in 0..100 {
        let c = gen_nonzero(f, ClassTag::Spsu, &p, seed).unwrap();
        assert!(hs.hit(&|x| c.eval(x)).unwrap().is_some(), "spsu seed {seed}");
    }
    println!("{} points, {:?}", hs.len(), t0.elapsed());
}
