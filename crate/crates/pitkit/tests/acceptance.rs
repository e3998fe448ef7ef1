use pitkit::circuit::{
    expansion_cap, point_fn, CircuitExpr, Factor, Outcome, PowerSumCircuit, ProductCircuit, Summand,
};
use pitkit::cli;
use pitkit::field::{pit_field, Fp};
use pitkit::kernels::{dlog_expand, duality_to_roabp, inverse_product_series, powersum_derive, powersum_product, waring_decompose};
use pitkit::oracle::{brute_zero_test, gen_random, rng, ClassTag, GenParams};
use pitkit::pit_black::{build_f, build_f_sparse, build_psi, faithful_map_for, field_for_f, jacobian_minor, PointSource};
use pitkit::pit_white::{didi_pit_traced, ks_bound, ks_certificate, pit_roabp, DidiOptions, ZeroTest};
use pitkit::poly::{Monomial, SparsePoly, Z};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::time::{Duration, Instant};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn field() -> Fp {
    pit_field(1 << 20, 12).unwrap()
}

fn rand_sparse(f: Fp, r: &mut ChaCha8Rng, vars: &[u32], deg: u32, terms: usize) -> SparsePoly {
    let mut p = SparsePoly::zero(f);
    for _ in 0..terms {
        let mut m = Monomial::ONE;
        let d = r.gen_range(0..=deg);
        for _ in 0..d {
            let v = vars[r.gen_range(0..vars.len())];
            m = m.with_exp(v, m.exp(v) + 1).unwrap();
        }
        p = p.add(&SparsePoly::monomial(f, m, f.from_i64(r.gen_range(-9..=9))));
    }
    p
}

fn nonconstant(f: Fp, r: &mut ChaCha8Rng, vars: &[u32], deg: u32, terms: usize) -> SparsePoly {
    loop {
        let p = rand_sparse(f, r, vars, deg, terms);
        if p.degree() > 0 {
            return p;
        }
    }
}

fn didi_criteria() -> (Check, Check) {
    let f = field();
    let p = GenParams { n: 3, d: 2, k: 3, factors: 2, ..Default::default() };
    let t0 = Instant::now();
    let (mut agree, mut total, mut zeros, mut traces, mut violations) = (0, 0, 0, 0, vec![]);
    let mut deepest = 0;
    let modes = [
        DidiOptions::default(),
        DidiOptions { pretest: false, zero_test: ZeroTest::Exact },
        DidiOptions { pretest: false, zero_test: ZeroTest::PowerSum },
    ];
    for seed in 0..600u64 {
        for force in [false, true] {
            if force && seed >= 100 {
                continue;
            }
            let c = gen_random(f, ClassTag::Spsu, &p, seed, force).unwrap();
            let CircuitExpr::TopSum(t) = &c.expr else { unreachable!() };
            let want = brute_zero_test(&c).unwrap().outcome == Outcome::Zero;
            zeros += force as usize;
            let used: &[DidiOptions] = if seed % 10 == 0 { &modes } else { &modes[..2] };
            for &opts in used {
                total += 1;
                match didi_pit_traced(f, t, opts) {
                    Ok((v, tr)) => {
                        agree += (v.is_zero() == want) as usize;
                        traces += 1;
                        deepest = deepest.max(tr.levels.len());
                        violations.extend(tr.violations().into_iter().map(|s| format!("seed {seed}: {s}")));
                    }
                    Err(e) => violations.push(format!("seed {seed}: error {e}")),
                }
            }
        }
    }
    let el = t0.elapsed();
    let c1 = if agree == total && zeros >= 50 && el < Duration::from_secs(600) {
        Ok(format!("{agree}/{total} runs over 600 random + {zeros} forced-zero circuits in {el:.1?}"))
    } else {
        Err(format!("{agree}/{total} agree, {zeros} forced zeros, {el:.1?}"))
    };
    let c2 = if violations.is_empty() {
        Ok(format!("{traces} traces, deepest {deepest} levels, 0 violations"))
    } else {
        Err(format!("{} violations, first: {}", violations.len(), violations[0]))
    };
    (c1, c2)
}

fn waring_criterion() -> Check {
    let f = field();
    let mut count = 0;
    for a in 0..=6u32 {
        for b in 0..=6 - a {
            for c in 0..=6 - a - b {
                let m = Monomial::from_exps(&[(1, a), (2, b), (3, c)]).unwrap();
                let ps = ok(waring_decompose(f, m))?;
                ensure!(ok(ps.expand(f, expansion_cap()))? == SparsePoly::monomial(f, m, 1), "x^{:?} expands wrong", (a, b, c));
                let mut bs: Vec<u32> = [a, b, c].into_iter().filter(|&e| e > 0).collect();
                bs.sort();
                let want: usize = bs.iter().skip(1).map(|&e| e as usize + 1).product();
                ensure!(ps.len() == want, "x^{:?}: {} summands, want {want}", (a, b, c), ps.len());
                count += 1;
            }
        }
    }
    Ok(format!("{count} monomials exact over F_{}", f.modulus()))
}

fn duality_criterion() -> Check {
    let f = field();
    let p = GenParams { n: 3, d: 3, k: 3, delta: 2, ..Default::default() };
    let mut r = rng(4);
    let (mut inst, mut zeros) = (0, 0);
    for seed in 0..320u64 {
        let force = seed % 8 == 0;
        let c = ok(gen_random(f, ClassTag::PowerSum, &p, seed, force))?;
        let CircuitExpr::PowerSum(ps) = &c.expr else { unreachable!() };
        let ro = ok(duality_to_roabp(f, ps))?;
        for _ in 0..100 {
            let x: Vec<u64> = (0..3).map(|_| r.gen_range(0..f.modulus())).collect();
            ensure!(ok(ro.eval_with(f, &point_fn(&x)))? == ok(ps.eval_with(f, &point_fn(&x)))?, "seed {seed}: mismatch at {x:?}");
        }
        let want = ok(brute_zero_test(&c))?.is_zero();
        ensure!(pit_roabp(f, &ro).is_zero() == want, "seed {seed}: pit_roabp disagrees");
        inst += 1;
        zeros += want as usize;
    }
    let mut ids = 0;
    for seed in 0..40 {
        let mut r = rng(1000 + seed);
        let g1 = nonconstant(f, &mut r, &[1], 2, 3);
        let g2 = nonconstant(f, &mut r, &[2], 2, 3);
        let y = SparsePoly::var(f, Z);
        let gg = y.add(&g1).mul(&y.add(&g2)).sub(&y.pow(2));
        for e in 1..=2 {
            ensure!(gg.pow(e).coeff_in(Z, e) == g1.add(&g2).pow(e), "coefficient identity fails for e={e}");
            ids += 1;
        }
    }
    Ok(format!("{inst} instances ({zeros} zero) x 100 points, pit_roabp 100%, {ids} coefficient identities"))
}

fn ks_criterion() -> Check {
    let f = field();
    let mut r = rng(5);
    let mut worst = 0f64;
    for case in 0..150 {
        let (m, n, d) = (r.gen_range(1..=10usize), r.gen_range(1..=4u32), r.gen_range(2..=4u32));
        let p = loop {
            let terms: Vec<(Monomial, u64)> = (0..m)
                .map(|_| {
                    let ex: Vec<(u32, u32)> = (1..=n).map(|v| (v, r.gen_range(0..d))).collect();
                    (Monomial::from_exps(&ex).unwrap(), f.from_i64(r.gen_range(-9..=9)))
                })
                .collect();
            let p = SparsePoly::from_terms(f, terms);
            if !p.is_zero() {
                break p;
            }
        };
        let bound = ks_bound(m, n, d);
        let cert = ok(ks_certificate(&p, m, d))?;
        ensure!(matches!(cert, Some(rr) if rr <= bound), "case {case}: certificate {cert:?} vs bound {bound}");
        worst = worst.max(cert.unwrap() as f64 / bound as f64);
    }
    Ok(format!("150 polynomials certified, max r/bound = {worst:.3}"))
}

fn product(gs: &[SparsePoly]) -> ProductCircuit {
    ProductCircuit::new(gs.iter().cloned().map(Factor::sparse).collect())
}

fn jacobian_criterion() -> Check {
    let f = ok(field_for_f(2, 4))?;
    let (mut count, mut dep) = (0, 0);
    for seed in 0..60u64 {
        let mut r = rng(600 + seed);
        let k = 1 + (seed % 2) as usize;
        let vars = [1, 2, 3];
        let mut ts: Vec<ProductCircuit> = (0..k)
            .map(|_| {
                let m = r.gen_range(1..=2);
                product(&(0..m).map(|_| nonconstant(f, &mut r, &vars, 2, 3)).collect::<Vec<_>>())
            })
            .collect();
        if k == 2 && seed % 6 == 1 {
            let fs = ts[0].factors.clone();
            ts[1] = ProductCircuit::new(fs.iter().chain(fs.iter()).cloned().collect());
        }
        let cols: Vec<u32> = (1..=k as u32).collect();
        let expanded: Vec<SparsePoly> = ts.iter().map(|t| t.expand(f, expansion_cap()).unwrap()).collect();
        let jm = ok(jacobian_minor(&expanded, &cols))?.minor;
        let psi = ok(build_psi(f, &ts))?;
        let d = expanded.iter().map(|p| p.degree()).max().unwrap();
        let prec = k as u32 * (d - 1) + 1;
        let psi_j = psi.apply(&jm).truncate_in(Z, prec);
        ensure!(jm.is_zero() == psi_j.is_zero(), "seed {seed}: shifted Jacobian loses nonzeroness");
        let fc = ok(build_f(f, &ts, &cols, &psi, prec))?;
        let p = fc.expand_mod(f);
        let (ps, q) = ok(build_f_sparse(f, &ts, &cols, &psi, prec))?;
        ensure!(p == ps && q == fc.q, "seed {seed}: structured and sparse F differ");
        ensure!(psi_j.is_zero() == p.is_zero(), "seed {seed}: F and the shifted Jacobian disagree on zeroness");
        let prod = expanded.iter().fold(SparsePoly::one(f), |a, b| a.mul(b));
        let rhs = psi.apply(&prod).mul_trunc(&p, Z, prec);
        ensure!(psi_j.scale(fc.q) == rhs, "seed {seed}: Jacobian product identity fails");
        let delta = 2;
        ensure!(fc.z_degree <= delta * k as u32 * (prec - 1) + delta * k as u32, "seed {seed}: z-degree bound");
        count += 1;
        dep += jm.is_zero() as usize;
    }
    Ok(format!("{count} instances ({dep} with vanishing Jacobian), identities exact mod z^D"))
}

fn faithful_criterion() -> Check {
    let f = field();
    let (mut pairs, mut annihilators, mut zeros) = (0, 0, 0);
    for seed in 0..120u64 {
        let mut r = rng(900 + seed);
        let vars = [1, 2, 3];
        let g = nonconstant(f, &mut r, &vars, 2, 3);
        let h = nonconstant(f, &mut r, &vars, 2, 2);
        let (a, b, c) = (SparsePoly::var(f, 1), SparsePoly::var(f, 2), SparsePoly::var(f, 3));
        let (ts, outer) = match seed % 4 {
            0 => {
                let mult = rand_sparse(f, &mut r, &[1, 2], 1, 2).add(&SparsePoly::one(f));
                let ann = c.sub(&a.mul(&b)).mul(&mult);
                let outer = if seed % 8 == 0 { ann.add(&a) } else { ann };
                (vec![product(std::slice::from_ref(&g)), product(std::slice::from_ref(&h)), product(&[g.clone(), h.clone()])], outer)
            }
            1 => (vec![product(std::slice::from_ref(&g)), product(&[g.clone(), g.clone()])], a.pow(2).sub(&b)),
            _ => {
                let m = 2 + (seed % 2) as usize;
                let ts = (0..m).map(|_| product(&[nonconstant(f, &mut r, &vars, 2, 3)])).collect();
                let vs: Vec<u32> = (1..=m as u32).collect();
                (ts, rand_sparse(f, &mut r, &vs, 2, 3))
            }
        };
        annihilators += (seed % 4 < 2) as usize;
        let expanded: Vec<SparsePoly> = ts.iter().map(|t| t.expand(f, expansion_cap()).unwrap()).collect();
        let direct = outer.compose(&|v| expanded[v as usize - 1].clone());
        let (phi, _) = ok(faithful_map_for(f, &ts, PointSource::Grid))?;
        let images = expanded.iter().map(|p| phi.apply(p)).collect::<Result<Vec<_>, _>>();
        let images = ok(images)?;
        let mapped = outer.compose(&|v| images[v as usize - 1].clone());
        ensure!(direct.is_zero() == mapped.is_zero(), "seed {seed}: zeroness differs under the faithful map");
        pairs += 1;
        zeros += direct.is_zero() as usize;
    }
    ensure!(annihilators >= 20, "only {annihilators} annihilator cases");
    Ok(format!("{pairs} pairs ({annihilators} annihilator cases, {zeros} zero), 100% agreement"))
}

fn hitting_criterion() -> Check {
    let dir = std::env::temp_dir().join(format!("pitkit-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut lines = vec![];
    for (class, args) in [
        ("prod-sparse", vec!["--n", "2", "--d", "2", "--s", "4"]),
        ("spsu", vec!["--n", "3", "--d", "4", "--k", "2"]),
        ("spsp", vec!["--n", "3", "--d", "4", "--k", "2", "--delta", "2"]),
    ] {
        let t0 = Instant::now();
        let file = dir.join(format!("{class}.hs"));
        let file = file.to_str().unwrap().to_string();
        let mut out = vec![];
        let mut argv = vec!["pitkit", "hitting-set", "--class", class, "--out", &file];
        argv.extend(args.iter().copied());
        ensure!(cli::run(argv, &mut out) == 0, "{class}: hitting-set failed");
        let mut out = vec![];
        let code = cli::run(["pitkit", "verify-hs", "--hs", &file, "--samples", "120", "--seed", "11"], &mut out);
        let report = String::from_utf8_lossy(&out).trim().lines().next().unwrap_or("").to_string();
        ensure!(code == 0 && report.starts_with("120/120"), "{class}: {report}");
        ensure!(t0.elapsed() < Duration::from_secs(600), "{class}: too slow");
        lines.push(format!("{class} {report} in {:.1?}", t0.elapsed()));
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(lines.join("; "))
}

fn rand_powersum(f: Fp, r: &mut ChaCha8Rng, vars: &[u32]) -> PowerSumCircuit {
    let s = r.gen_range(1..=3);
    PowerSumCircuit {
        summands: (0..s)
            .map(|_| Summand {
                coef: f.from_i64(r.gen_range(1..=9)),
                base: Factor::from_sparse(rand_sparse(f, r, vars, 2, 3)),
                exp: r.gen_range(1..=3),
            })
            .collect(),
    }
}

fn kernel_criterion() -> Check {
    let f = field();
    let cap = expansion_cap();
    let cases = 200;
    for seed in 0..cases {
        let mut r = rng(2000 + seed);
        let prec = r.gen_range(1..=4);
        let (a1, a2) = (r.gen_range(1..50), r.gen_range(1..50));
        let b1 = rand_sparse(f, &mut r, &[1, 2], 2, 3);
        let b2 = rand_sparse(f, &mut r, &[1, 2], 2, 3);
        let z = SparsePoly::var(f, Z);
        let b12 = b2.scale(a1).add(&b1.scale(a2)).sub(&z.mul(&b1).mul(&b2));
        let lhs = ok(dlog_expand(f, f.mul(a1, a2), &b12, prec))?.value.expand_trunc(f, Z, prec);
        let rhs = ok(dlog_expand(f, a1, &b1, prec))?
            .value
            .plus(&ok(dlog_expand(f, a2, &b2, prec))?.value)
            .expand_trunc(f, Z, prec);
        ensure!(lhs == rhs, "dlog additivity fails at seed {seed}");
    }
    for seed in 0..cases {
        let mut r = rng(3000 + seed);
        let ps = rand_powersum(f, &mut r, &[Z, 1, 2]);
        let d = ok(powersum_derive(f, &ps))?;
        ensure!(ok(d.expand(f, cap))? == ok(ps.expand(f, cap))?.partial(Z), "derivative fails at seed {seed}");
    }
    for seed in 0..cases {
        let mut r = rng(4000 + seed);
        let prec = r.gen_range(1..=5);
        let m = r.gen_range(1..=3);
        let gs: Vec<(u64, SparsePoly)> =
            (0..m).map(|_| (r.gen_range(1..100), rand_sparse(f, &mut r, &[1, 2], 2, 2))).collect();
        let (p, q) = ok(inverse_product_series(f, &gs, prec))?;
        let z = SparsePoly::var(f, Z);
        let mut acc = p.expand_trunc(f, Z, prec);
        for (a, b) in &gs {
            acc = acc.mul_trunc(&SparsePoly::constant(f, *a).sub(&z.mul(b)), Z, prec);
        }
        ensure!(acc == SparsePoly::constant(f, q), "inverse round trip fails at seed {seed}");
    }
    for seed in 0..cases {
        let mut r = rng(5000 + seed);
        let (x, y) = (rand_powersum(f, &mut r, &[1, 2]), rand_powersum(f, &mut r, &[2, 3]));
        let prod = ok(powersum_product(f, &[x.clone(), y.clone()]))?;
        ensure!(ok(prod.expand(f, cap))? == ok(x.expand(f, cap))?.mul(&ok(y.expand(f, cap))?), "product fails at seed {seed}");
    }
    Ok(format!("4 identities x {cases} cases exact"))
}

#[test]
fn acceptance() {
    let t0 = Instant::now();
    let (c1, c2) = didi_criteria();
    let results: Vec<(&str, Check)> = vec![
        ("DiDI oracle agreement", c1),
        ("DiDI trace invariants", c2),
        ("Waring exactness", waring_criterion()),
        ("duality and ROABP", duality_criterion()),
        ("sparse PIT bound", ks_criterion()),
        ("Jacobian pipeline identities", jacobian_criterion()),
        ("faithfulness end to end", faithful_criterion()),
        ("hitting-set property", hitting_criterion()),
        ("kernel micro-identities", kernel_criterion()),
    ];
    let mut failed = 0;
    let mut out = std::io::stdout().lock();
    for (i, (name, r)) in results.iter().enumerate() {
        let _ = match r {
            Ok(msg) => writeln!(out, "criterion {} {name}: PASS ({msg})", i + 1),
            Err(msg) => {
                failed += 1;
                writeln!(out, "criterion {} {name}: FAIL ({msg})", i + 1)
            }
        };
    }
    let _ = writeln!(out, "acceptance finished in {:.1?}", t0.elapsed());
    assert_eq!(failed, 0, "{failed} criteria failed");
}
