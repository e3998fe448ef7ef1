//! Structure-preserving transformations on power-sum circuits.

use crate::circuit::{Factor, PowerSumCircuit, Roabp, Summand, SumUni};
use crate::error::{Error, Result};
use crate::field::{root_of_unity, Fp, Prime};
use crate::poly::{lagrange_basis, Monomial, SparsePoly, UniPoly, Z};

fn prime(f: Fp) -> Prime {
    Prime::new(f.modulus()).expect("field modulus is prime")
}

/// `prod B_i^{b_i}` as a sum of `d`-th powers of `B_1 + sum eps_i B_i`.
pub fn waring_bases(f: Fp, parts: &[(Factor, u32)]) -> Result<PowerSumCircuit> {
    let mut parts: Vec<(Factor, u32)> = parts.iter().filter(|(_, e)| *e > 0).cloned().collect();
    if parts.is_empty() {
        return Ok(PowerSumCircuit::constant(f, 1));
    }
    parts.sort_by_key(|(_, e)| *e);
    let d: u32 = parts.iter().map(|(_, e)| e).sum();
    if parts.len() == 1 {
        return Ok(PowerSumCircuit::single(1, parts[0].0.clone(), d));
    }
    if f.modulus() <= d as u64 {
        return Err(Error::CharTooSmall(d as u64));
    }
    let mut roots = vec![];
    for (_, b) in &parts[1..] {
        let m = *b as u64 + 1;
        roots.push(root_of_unity(prime(f), m).map_err(|_| Error::MissingRootsOfUnity(m))?);
    }
    let mut fact = vec![1u64; d as usize + 1];
    for i in 1..=d as usize {
        fact[i] = f.mul(fact[i - 1], i as u64);
    }
    let mut denom = fact[d as usize];
    for (_, b) in &parts {
        denom = f.div(denom, fact[*b as usize]);
    }
    for (_, b) in &parts[1..] {
        denom = f.mul(denom, *b as u64 + 1);
    }
    let c0 = f.inv(denom);
    let mut out = vec![];
    let mut idx = vec![0u32; parts.len() - 1];
    loop {
        let mut gamma = c0;
        let mut base = parts[0].0.clone();
        for (i, &j) in idx.iter().enumerate() {
            let eps = f.pow(roots[i], j as u64);
            gamma = f.mul(gamma, eps);
            base = base.add(f, &parts[i + 1].0.scale(f, eps));
        }
        out.push(Summand { coef: gamma, base, exp: d });
        let mut i = 0;
        loop {
            if i == idx.len() {
                return Ok(PowerSumCircuit { summands: out });
            }
            idx[i] += 1;
            if idx[i] <= parts[i + 1].1 {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

pub fn waring_decompose(f: Fp, m: Monomial) -> Result<PowerSumCircuit> {
    let parts: Vec<(Factor, u32)> =
        m.vars().map(|(v, e)| (Factor::Uni(SumUni::linear(f, &[(v, 1)])), e)).collect();
    waring_bases(f, &parts)
}

/// Product of power-sum circuits: every summand tuple becomes one Waring block.
pub fn powersum_product(f: Fp, fs: &[PowerSumCircuit]) -> Result<PowerSumCircuit> {
    let mut acc: Vec<(u64, Vec<(Factor, u32)>)> = vec![(1, vec![])];
    for ps in fs {
        let mut next = Vec::with_capacity(acc.len() * ps.len());
        for (c, parts) in &acc {
            for s in &ps.summands {
                let mut coef = f.mul(*c, s.coef);
                let mut parts = parts.clone();
                match s.base.as_constant(f) {
                    Some(b) => coef = f.mul(coef, f.pow(b, s.exp as u64)),
                    None => match parts.iter_mut().find(|(g, _)| *g == s.base) {
                        Some(slot) => slot.1 += s.exp,
                        None => parts.push((s.base.clone(), s.exp)),
                    },
                }
                if coef != 0 {
                    next.push((coef, parts));
                }
            }
        }
        acc = next;
    }
    let mut out = PowerSumCircuit::zero();
    for (c, parts) in acc {
        if parts.is_empty() {
            out.summands.push(Summand { coef: c, base: Factor::constant(f, 1), exp: 1 });
            continue;
        }
        out = out.plus(&waring_bases(f, &parts)?.scale(f, c));
    }
    Ok(out)
}

/// Coefficient of `z^e` by interpolation at `z = 0, 1, ..., d_z`.
pub fn powersum_coef(f: Fp, ps: &PowerSumCircuit, e: u32) -> Result<PowerSumCircuit> {
    let dz = ps.degree_bound_in(f, Z);
    if e > dz {
        return Ok(PowerSumCircuit::zero());
    }
    if dz == 0 {
        return Ok(ps.clone());
    }
    if f.modulus() <= dz as u64 {
        return Err(Error::FieldTooSmall(dz as u64 + 1));
    }
    let nodes: Vec<u64> = (0..=dz as u64).collect();
    let basis = lagrange_basis(f, &nodes);
    let mut out = vec![];
    for (&a, l) in nodes.iter().zip(&basis) {
        let lam = l[e as usize];
        if lam == 0 {
            continue;
        }
        for s in &ps.summands {
            let coef = f.mul(lam, s.coef);
            let base = s.base.eval_var(f, Z, a);
            match base.as_constant(f) {
                Some(0) => {}
                Some(b) => out.push(Summand {
                    coef: f.mul(coef, f.pow(b, s.exp as u64)),
                    base: Factor::constant(f, 1),
                    exp: 1,
                }),
                None => out.push(Summand { coef, base, exp: s.exp }),
            }
        }
    }
    Ok(PowerSumCircuit { summands: out })
}

pub fn z_power(f: Fp, e: u32) -> PowerSumCircuit {
    if e == 0 {
        return PowerSumCircuit::constant(f, 1);
    }
    PowerSumCircuit::single(1, Factor::Uni(SumUni::new(f, vec![UniPoly::new(f, Z, vec![0, 1])])), e)
}

/// `d/dz` as `sum_e e z^{e-1} coef_{z^e}`.
pub fn powersum_derive(f: Fp, ps: &PowerSumCircuit) -> Result<PowerSumCircuit> {
    let dz = ps.degree_bound_in(f, Z);
    if dz == 0 {
        return Ok(PowerSumCircuit::zero());
    }
    if f.modulus() <= dz as u64 {
        return Err(Error::CharTooSmall(dz as u64));
    }
    let mut out = PowerSumCircuit::zero();
    for e in 1..=dz {
        let c = powersum_coef(f, ps, e)?;
        if c.is_empty() {
            continue;
        }
        out = out.plus(&powersum_product(f, &[z_power(f, e - 1), c])?.scale(f, e as u64));
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct DlogResult {
    pub value: PowerSumCircuit,
    pub z_degree: u32,
}

/// `dlog_z(A - zB) = -d_z(Bz)/A * sum_{i<D} (B/A)^i z^i` modulo `z^D`.
pub fn dlog_expand(f: Fp, a: u64, b: &SparsePoly, prec: u32) -> Result<DlogResult> {
    if a == 0 {
        return Err(Error::ZeroConstantTerm);
    }
    if b.is_zero() || prec == 0 {
        return Ok(DlogResult { value: PowerSumCircuit::zero(), z_degree: 0 });
    }
    let ainv = f.inv(a);
    let bz = b.mul_var_pow(Z, 1)?;
    let step = PowerSumCircuit::single(ainv, Factor::from_sparse(bz.clone()), 1);
    let mut power = PowerSumCircuit::constant(f, 1);
    let mut geo = power.clone();
    for _ in 1..prec {
        power = powersum_product(f, &[power, step.clone()])?;
        geo = geo.plus(&power);
    }
    let lead = bz.partial(Z);
    let value = if lead.is_zero() {
        PowerSumCircuit::zero()
    } else {
        powersum_product(f, &[PowerSumCircuit::single(f.neg(ainv), Factor::from_sparse(lead), 1), geo])?
    };
    let bdeg = bz.degree_in(Z);
    Ok(DlogResult { value, z_degree: bdeg.saturating_sub(1) + bdeg * (prec - 1) })
}

/// Exact truncated dlog series on sparse polynomials, the cheap twin of [`dlog_expand`].
pub fn dlog_series(a: u64, b: &SparsePoly, prec: u32) -> Result<SparsePoly> {
    let f = b.field();
    if a == 0 {
        return Err(Error::ZeroConstantTerm);
    }
    let ainv = f.inv(a);
    let bz = b.mul_var_pow(Z, 1)?;
    let step = bz.scale(ainv);
    let mut power = SparsePoly::one(f);
    let mut geo = power.clone();
    for _ in 1..prec {
        power = power.mul_trunc(&step, Z, prec);
        if power.is_zero() {
            break;
        }
        geo = geo.add(&power);
    }
    Ok(bz.partial(Z).scale(f.neg(ainv)).mul_trunc(&geo, Z, prec))
}

/// Whitebox reduction of a `Σ∧Σ∧` circuit to a diagonal ROABP.
pub fn duality_to_roabp(f: Fp, ps: &PowerSumCircuit) -> Result<Roabp> {
    let mut order: Vec<u32> = vec![];
    for s in &ps.summands {
        let Factor::Uni(g) = &s.base else {
            return Err(Error::ClassMismatch("duality needs sum-of-univariate bases".into()));
        };
        for u in g.unis() {
            if u.var == Z {
                return Err(Error::ClassMismatch("duality works over F[x] only".into()));
            }
            if !order.contains(&u.var) {
                order.push(u.var);
            }
        }
    }
    order.sort();
    // each diagonal block: (left weight, per-variable univariate)
    let mut blocks: Vec<(u64, Vec<UniPoly>)> = vec![];
    for s in &ps.summands {
        let Factor::Uni(g) = &s.base else { unreachable!() };
        if g.unis().is_empty() || s.coef == 0 {
            continue;
        }
        let n = g.unis().len() as u64;
        let e = s.exp as u64;
        let npts = e * (n - 1) + 1;
        if f.modulus() < npts {
            return Err(Error::FieldTooSmall(npts));
        }
        let betas: Vec<u64> = (0..npts).collect();
        for &beta in &betas {
            let alpha = f.inv(betas.iter().filter(|&&l| l != beta).fold(1, |acc, &l| f.mul(acc, f.sub(beta, l))));
            let mbn = f.neg(f.pow(beta, n));
            for t in 0..=e {
                let w = f.mul(f.mul(s.coef, alpha), f.mul(f.binomial(e, t), f.pow(mbn, e - t)));
                if w == 0 {
                    continue;
                }
                let diag = order
                    .iter()
                    .map(|&v| match g.unis().iter().find(|u| u.var == v) {
                        Some(u) => u.add(f, &UniPoly::new(f, v, vec![beta])).pow(f, t as u32),
                        None => UniPoly::new(f, v, vec![1]),
                    })
                    .collect();
                blocks.push((w, diag));
            }
        }
    }
    if blocks.is_empty() {
        return Roabp::new(1, order.clone(), order.iter().map(|&v| vec![UniPoly::new(f, v, vec![1])]).collect(), vec![0], vec![1]);
    }
    let w = blocks.len();
    let layers = order
        .iter()
        .enumerate()
        .map(|(li, &v)| {
            let mut m = vec![UniPoly::zero(v); w * w];
            for (bi, (_, diag)) in blocks.iter().enumerate() {
                m[bi * w + bi] = diag[li].clone();
            }
            m
        })
        .collect();
    Roabp::new(w, order, layers, blocks.iter().map(|b| b.0).collect(), vec![1; w])
}

/// `1/prod(A_i - z B_i)` modulo `z^D` as `P / Q` with scalar `Q = prod A_i^D`.
pub fn inverse_product_series(f: Fp, gs: &[(u64, SparsePoly)], prec: u32) -> Result<(PowerSumCircuit, u64)> {
    let mut q = 1;
    let mut pieces = vec![];
    for (a, b) in gs {
        if *a == 0 {
            return Err(Error::ZeroConstantTerm);
        }
        q = f.mul(q, f.pow(*a, prec as u64));
        let zb = Factor::from_sparse(b.mul_var_pow(Z, 1)?);
        let mut ps = PowerSumCircuit::zero();
        for l in 0..prec {
            let c = f.pow(*a, (prec - 1 - l) as u64);
            if l == 0 {
                ps.summands.push(Summand { coef: c, base: Factor::constant(f, 1), exp: 1 });
            } else if !b.is_zero() {
                ps.summands.push(Summand { coef: c, base: zb.clone(), exp: l });
            }
        }
        pieces.push(ps);
    }
    Ok((powersum_product(f, &pieces)?, q))
}

/// Sparse twin of [`inverse_product_series`]: `P` expanded modulo `z^D`.
pub fn inverse_product_sparse(f: Fp, gs: &[(u64, SparsePoly)], prec: u32) -> Result<(SparsePoly, u64)> {
    let mut q = 1;
    let mut p = SparsePoly::one(f);
    for (a, b) in gs {
        if *a == 0 {
            return Err(Error::ZeroConstantTerm);
        }
        q = f.mul(q, f.pow(*a, prec as u64));
        let zb = b.mul_var_pow(Z, 1)?;
        let mut s = SparsePoly::zero(f);
        let mut pw = SparsePoly::one(f);
        for l in 0..prec {
            s = s.add(&pw.scale(f.pow(*a, (prec - 1 - l) as u64)));
            pw = pw.mul_trunc(&zb, Z, prec);
        }
        p = p.mul_trunc(&s, Z, prec);
    }
    Ok((p, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::expand_with_cap;
    use crate::circuit::{Circuit, CircuitExpr};
    use crate::field::pit_field;

    fn expand(f: Fp, ps: &PowerSumCircuit) -> SparsePoly {
        ps.expand(f, 1_000_000).unwrap()
    }

    fn x(f: Fp, i: u32) -> SparsePoly {
        SparsePoly::var(f, i)
    }

    fn lin(f: Fp, c: &[(u32, u64)]) -> Factor {
        Factor::from_sparse(SparsePoly::from_terms(f, c.iter().map(|&(v, a)| (Monomial::var(v, 1).unwrap(), a))))
    }

    #[test]
    fn waring_examples() {
        let f = Fp::with_modulus(7).unwrap();
        let m = Monomial::from_exps(&[(1, 1), (2, 1)]).unwrap();
        let w = waring_decompose(f, m).unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w.summands[0].coef, f.inv(4));
        assert_eq!(w.summands[1].coef, f.neg(f.inv(4)));
        assert_eq!(expand(f, &w), SparsePoly::monomial(f, m, 1));

        let m = Monomial::var(1, 5).unwrap();
        let w = waring_decompose(f, m).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(expand(f, &w), SparsePoly::monomial(f, m, 1));

        let m = Monomial::from_exps(&[(1, 1), (2, 2)]).unwrap();
        let w = waring_decompose(f, m).unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(expand(f, &w), SparsePoly::monomial(f, m, 1));

        let f5 = Fp::with_modulus(5).unwrap();
        assert_eq!(
            waring_decompose(f5, Monomial::from_exps(&[(1, 2), (2, 2)]).unwrap()).unwrap_err(),
            Error::MissingRootsOfUnity(3)
        );
    }

    #[test]
    fn product_examples() {
        let f = pit_field(100, 6).unwrap();
        let a = PowerSumCircuit::single(1, lin(f, &[(1, 1)]), 2);
        let b = PowerSumCircuit::single(1, lin(f, &[(2, 1)]), 2);
        let p = powersum_product(f, &[a.clone(), b]).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(expand(f, &p), x(f, 1).pow(2).mul(&x(f, 2).pow(2)));
        assert_eq!(powersum_product(f, &[a.clone(), PowerSumCircuit::constant(f, 1)]).unwrap(), a);

        let s = PowerSumCircuit::single(1, lin(f, &[(1, 1), (2, 1)]), 2);
        let d = PowerSumCircuit::single(1, lin(f, &[(1, 1), (2, f.neg(1))]), 2);
        let p = powersum_product(f, &[s, d]).unwrap();
        assert_eq!(expand(f, &p), x(f, 1).pow(2).sub(&x(f, 2).pow(2)).pow(2));
    }

    #[test]
    fn coef_examples() {
        let f = pit_field(100, 6).unwrap();
        let zx = |zc: u64| Factor::from_sparse(x(f, 1).add(&SparsePoly::var(f, Z).scale(zc)));
        let ps = PowerSumCircuit::single(1, zx(1), 2);
        assert_eq!(expand(f, &powersum_coef(f, &ps, 1).unwrap()), x(f, 1).scale(2));
        let free = PowerSumCircuit::single(3, lin(f, &[(1, 1), (2, 1)]), 2);
        assert_eq!(powersum_coef(f, &free, 0).unwrap(), free);
        let zx1 = Factor::sparse(SparsePoly::var(f, Z).mul(&x(f, 1)));
        let ps = PowerSumCircuit { summands: vec![
            Summand { coef: 1, base: zx(2), exp: 3 },
            Summand { coef: 1, base: zx1, exp: 2 },
        ] };
        assert_eq!(expand(f, &powersum_coef(f, &ps, 2).unwrap()), x(f, 1).scale(12).add(&x(f, 1).pow(2)));
    }

    #[test]
    fn derive_examples() {
        let f = pit_field(100, 6).unwrap();
        let z = SparsePoly::var(f, Z);
        let ps = PowerSumCircuit::single(1, Factor::from_sparse(x(f, 1).add(&z)), 2);
        assert_eq!(expand(f, &powersum_derive(f, &ps).unwrap()), x(f, 1).add(&z).scale(2));
        let free = PowerSumCircuit::single(1, lin(f, &[(1, 1)]), 3);
        assert!(powersum_derive(f, &free).unwrap().is_empty());
        let target = z.pow(2).mul(&x(f, 1)).add(&z.mul(&x(f, 2).pow(2)));
        let ps = PowerSumCircuit::single(1, Factor::sparse(target), 1);
        assert_eq!(
            expand(f, &powersum_derive(f, &ps).unwrap()),
            z.mul(&x(f, 1)).scale(2).add(&x(f, 2).pow(2))
        );
    }

    #[test]
    fn dlog_examples() {
        let f = pit_field(100, 6).unwrap();
        let z = SparsePoly::var(f, Z);
        let x1 = x(f, 1);
        let want = x1.add(&x1.pow(2).mul(&z)).add(&x1.pow(3).mul(&z.pow(2))).neg();
        let d = dlog_expand(f, 1, &x1, 3).unwrap();
        assert_eq!(expand(f, &d.value).truncate_in(Z, 3), want);
        assert_eq!(dlog_series(1, &x1, 3).unwrap(), want);
        assert!(dlog_expand(f, 2, &SparsePoly::zero(f), 4).unwrap().value.is_empty());
        let s = x1.add(&x(f, 2));
        let want = s.sub(&s.pow(2).mul(&z));
        let d = dlog_expand(f, 1, &s.neg(), 2).unwrap();
        assert_eq!(expand(f, &d.value).truncate_in(Z, 2), want);
        assert_eq!(dlog_series(1, &s.neg(), 2).unwrap(), want);
        assert_eq!(dlog_expand(f, 0, &x1, 2).unwrap_err(), Error::ZeroConstantTerm);
    }

    #[test]
    fn duality_examples() {
        let f = pit_field(100, 6).unwrap();
        let g = lin(f, &[(1, 1), (2, 1)]);
        for e in 1..=2 {
            let ps = PowerSumCircuit::single(1, g.clone(), e);
            let r = duality_to_roabp(f, &ps).unwrap();
            let rc = Circuit::new(f, CircuitExpr::Roabp(r));
            assert_eq!(expand_with_cap(&rc, 10_000).unwrap(), expand(f, &ps));
            for a in 0..3 {
                for b in 0..3 {
                    assert_eq!(rc.eval(&[a, b]).unwrap(), ps.eval_with(f, &|v| Some([a, b][v as usize - 1])).unwrap());
                }
            }
        }
    }

    #[test]
    fn inverse_series_examples() {
        let f = pit_field(100, 6).unwrap();
        let z = SparsePoly::var(f, Z);
        let (x1, x2) = (x(f, 1), x(f, 2));
        let (p, q) = inverse_product_series(f, &[(1, x1.clone())], 2).unwrap();
        assert_eq!(q, 1);
        assert_eq!(expand(f, &p).truncate_in(Z, 2), SparsePoly::one(f).add(&x1.mul(&z)));
        let (p, q) = inverse_product_series(f, &[(5, SparsePoly::zero(f))], 3).unwrap();
        assert_eq!(f.div(expand(f, &p).constant_term(), q), f.inv(5));
        let want = SparsePoly::one(f)
            .add(&x1.add(&x2).mul(&z))
            .add(&x1.pow(2).add(&x1.mul(&x2)).add(&x2.pow(2)).mul(&z.pow(2)));
        let gs = [(1, x1), (1, x2)];
        let (p, q) = inverse_product_series(f, &gs, 3).unwrap();
        assert_eq!(q, 1);
        assert_eq!(expand(f, &p).truncate_in(Z, 3), want);
        assert_eq!(inverse_product_sparse(f, &gs, 3).unwrap().0, want);
    }
}
