//! Jacobian and faithful-map machinery: blackbox hitting sets for
//! `Σ^[k]ΠΣΠ^[δ]` and `Σ^[k]ΠΣ∧`, and PIT for circuits composed with
//! low transcendence-degree inputs.

use crate::circuit::{capped_mul, expansion_cap, Factor, PowerSumCircuit, ProductCircuit, TopSumCircuit, Verdict};
use crate::error::{Error, Result};
use crate::field::Fp;
use crate::kernels::{inverse_product_series, inverse_product_sparse, powersum_product};
use crate::oracle::{gen_nonzero, rng, ClassTag, GenParams};
use crate::pit_white::{find_nonvanishing_point, pit_grid, HittingSet, HsParams};
use crate::poly::{SparsePoly, Z};
use rand::Rng;

pub const MAX_BASIS: usize = 3;
pub const MAX_DELTA: u32 = 3;
pub const MAX_HS_VARS: u32 = 4;
pub const SOURCE_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobianMinor {
    pub sources: Vec<SparsePoly>,
    pub cols: Vec<u32>,
    pub minor: SparsePoly,
}

fn det(f: Fp, m: &[Vec<SparsePoly>], cap: usize) -> Result<SparsePoly> {
    let r = m.len();
    if r == 0 {
        return Ok(SparsePoly::one(f));
    }
    if r == 1 {
        return Ok(m[0][0].clone());
    }
    let mut acc = SparsePoly::zero(f);
    for c in 0..r {
        if m[0][c].is_zero() {
            continue;
        }
        let sub: Vec<Vec<SparsePoly>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, p)| p.clone()).collect())
            .collect();
        let t = capped_mul(&m[0][c], &det(f, &sub, cap)?, cap)?;
        acc = if c % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
    }
    Ok(acc)
}

/// `det (∂_{x_j} T_i)` over the column set `cols`, by cofactor expansion.
pub fn jacobian_minor(polys: &[SparsePoly], cols: &[u32]) -> Result<JacobianMinor> {
    if polys.len() != cols.len() {
        return Err(Error::Unsupported("a minor needs as many columns as polynomials".into()));
    }
    let f = polys.first().map(|p| p.field()).ok_or_else(|| Error::Unsupported("empty minor".into()))?;
    let m: Vec<Vec<SparsePoly>> = polys.iter().map(|p| cols.iter().map(|&c| p.partial(c)).collect()).collect();
    Ok(JacobianMinor { sources: polys.to_vec(), cols: cols.to_vec(), minor: det(f, &m, expansion_cap())? })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrdegBasis {
    pub basis: Vec<usize>,
    pub rank: usize,
    pub cols: Vec<u32>,
    pub minor: SparsePoly,
}

fn subsets(vars: &[u32], r: usize) -> Vec<Vec<u32>> {
    if r == 0 {
        return vec![vec![]];
    }
    let mut out = vec![];
    for (i, &v) in vars.iter().enumerate() {
        for mut rest in subsets(&vars[i + 1..], r - 1) {
            rest.insert(0, v);
            out.push(rest);
        }
    }
    out
}

/// Greedy transcendence basis via nonzero Jacobian minors.
pub fn trdeg_basis(polys: &[SparsePoly]) -> Result<TrdegBasis> {
    let Some(f) = polys.first().map(|p| p.field()) else {
        return Err(Error::Unsupported("empty polynomial list".into()));
    };
    let mut vars: Vec<u32> = polys.iter().flat_map(|p| p.vars()).filter(|&v| v != Z).collect();
    vars.sort();
    vars.dedup();
    let mut basis: Vec<usize> = vec![];
    let mut best = TrdegBasis { basis: vec![], rank: 0, cols: vec![], minor: SparsePoly::one(f) };
    for i in 0..polys.len() {
        if basis.len() == vars.len() {
            break;
        }
        let trial: Vec<SparsePoly> = basis.iter().chain([&i]).map(|&j| polys[j].clone()).collect();
        for cols in subsets(&vars, trial.len()) {
            let jm = jacobian_minor(&trial, &cols)?;
            if !jm.minor.is_zero() {
                basis.push(i);
                best = TrdegBasis { basis: basis.clone(), rank: basis.len(), cols, minor: jm.minor };
                break;
            }
        }
    }
    let d = polys.iter().map(|p| p.degree() as u64).max().unwrap_or(0);
    if best.rank > 0 && (d.max(1) as u128).pow(best.rank as u32) >= f.modulus() as u128 {
        return Err(Error::CharTooSmall(d.pow(best.rank as u32)));
    }
    Ok(best)
}

/// `Ψ: x_i ↦ z x_i + a_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Psi {
    pub a: Vec<u64>,
}

impl Psi {
    pub fn shift(&self, v: u32) -> u64 {
        self.a.get(v as usize - 1).copied().unwrap_or(0)
    }

    pub fn apply(&self, p: &SparsePoly) -> SparsePoly {
        let f = p.field();
        let z = SparsePoly::var(f, Z);
        p.compose(&|v| if v == Z { z.clone() } else { SparsePoly::var(f, v).mul(&z).add(&SparsePoly::constant(f, self.shift(v))) })
    }

    /// `(A, B)` with `Ψ(g) = A - z B`.
    pub fn split(&self, g: &SparsePoly) -> (u64, SparsePoly) {
        let img = self.apply(g);
        let a = img.eval_var(Z, 0).constant_term();
        (a, SparsePoly::constant(g.field(), a).sub(&img).div_var_pow(Z, 1))
    }
}

/// First point of the product hitting set where every factor is nonzero.
pub fn build_psi(f: Fp, ts: &[ProductCircuit]) -> Result<Psi> {
    if ts.iter().any(|t| t.has_zero_factor(f)) {
        return Err(Error::NoPointFound);
    }
    let fs: Vec<&Factor> = ts.iter().flat_map(|t| t.factors.iter()).collect();
    Ok(Psi { a: find_nonvanishing_point(f, &fs, |_| Ok(true))? })
}

#[derive(Debug, Clone)]
pub struct FTerm {
    pub tuple: Vec<usize>,
    pub num: PowerSumCircuit,
    pub den: PowerSumCircuit,
    pub scale: u64,
}

/// `F = (sum_t scale_t · num_t · den_t) / q` modulo `z^prec`.
#[derive(Debug, Clone)]
pub struct FCircuit {
    pub terms: Vec<FTerm>,
    pub q: u64,
    pub prec: u32,
    pub z_degree: u32,
}

fn factor_lists(f: Fp, ts: &[ProductCircuit]) -> Vec<Vec<SparsePoly>> {
    ts.iter().map(|t| t.factors.iter().map(|g| g.to_sparse(f)).collect()).collect()
}

fn tuples(lens: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &l in lens {
        out = out.into_iter().flat_map(|t| (0..l).map(move |i| [t.clone(), vec![i]].concat())).collect();
    }
    out
}

fn permutations(k: usize) -> Vec<(Vec<usize>, bool)> {
    if k == 0 {
        return vec![(vec![], true)];
    }
    let mut out = vec![];
    for (p, even) in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push((q, even ^ ((p.len() - pos) % 2 == 1)));
        }
    }
    out
}

/// `Ψ(J_cols(g_1..g_k))` as a sum over permutations of Waring-converted products.
pub fn numerator_powersum(f: Fp, gs: &[SparsePoly], cols: &[u32], psi: &Psi) -> Result<PowerSumCircuit> {
    let mut out = PowerSumCircuit::zero();
    for (perm, even) in permutations(gs.len()) {
        let parts: Vec<SparsePoly> = gs.iter().zip(&perm).map(|(g, &c)| psi.apply(&g.partial(cols[c]))).collect();
        if parts.iter().any(|p| p.is_zero()) {
            continue;
        }
        let singles: Vec<PowerSumCircuit> =
            parts.into_iter().map(|p| PowerSumCircuit::single(1, Factor::from_sparse(p), 1)).collect();
        let prod = powersum_product(f, &singles)?;
        out = out.plus(&if even { prod } else { prod.scale(f, f.neg(1)) });
    }
    Ok(out)
}

fn check_basis_size(k: usize) -> Result<()> {
    if k > MAX_BASIS {
        return Err(Error::Unsupported(format!("basis size {k} exceeds the cap {MAX_BASIS}")));
    }
    Ok(())
}

/// A field with every root of unity the structured F-circuit can ask for:
/// merged bases reach exponent `k(D-1) + k` with `D = k(d-1)+1`.
pub fn field_for_f(k: u32, d: u32) -> Result<Fp> {
    let prec = k * d.saturating_sub(1) + 1;
    let min = (d.max(2) as u64).saturating_pow(k).max(1 << 20);
    crate::field::pit_field(min, (k * (prec - 1) + k + 1) as u64)
}

/// The structured F-circuit over all factor tuples of the basis products.
pub fn build_f(f: Fp, ts: &[ProductCircuit], cols: &[u32], psi: &Psi, prec: u32) -> Result<FCircuit> {
    check_basis_size(ts.len())?;
    let lists = factor_lists(f, ts);
    let splits: Vec<Vec<(u64, SparsePoly)>> = lists.iter().map(|l| l.iter().map(|g| psi.split(g)).collect()).collect();
    let mut q = 1;
    for (a, _) in splits.iter().flatten() {
        if *a == 0 {
            return Err(Error::ZeroConstantTerm);
        }
        q = f.mul(q, f.pow(*a, prec as u64));
    }
    let delta = lists.iter().flatten().map(|g| g.degree()).max().unwrap_or(0);
    let mut terms = vec![];
    for tuple in tuples(&lists.iter().map(|l| l.len()).collect::<Vec<_>>()) {
        let gs: Vec<SparsePoly> = tuple.iter().enumerate().map(|(i, &j)| lists[i][j].clone()).collect();
        let num = numerator_powersum(f, &gs, cols, psi)?;
        if num.is_empty() {
            continue;
        }
        let picked: Vec<(u64, SparsePoly)> = tuple.iter().enumerate().map(|(i, &j)| splits[i][j].clone()).collect();
        let (den, qt) = inverse_product_series(f, &picked, prec)?;
        terms.push(FTerm { tuple, num, den, scale: f.div(q, qt) });
    }
    let k = ts.len() as u32;
    let z_degree = terms
        .iter()
        .map(|t| t.num.degree_bound_in(f, Z) + t.den.degree_bound_in(f, Z))
        .max()
        .unwrap_or(0);
    debug_assert!(z_degree <= delta * k * prec.saturating_sub(1) + delta * k);
    Ok(FCircuit { terms, q, prec, z_degree })
}

impl FCircuit {
    /// The numerator `P` expanded modulo `z^prec`.
    pub fn expand_mod(&self, f: Fp) -> SparsePoly {
        let mut acc = SparsePoly::zero(f);
        for t in &self.terms {
            let n = t.num.expand_trunc(f, Z, self.prec);
            let d = t.den.expand_trunc(f, Z, self.prec);
            acc = acc.add(&n.mul_trunc(&d, Z, self.prec).scale(t.scale));
        }
        acc
    }

    /// All tuple terms merged into one power-sum circuit by repeated products.
    pub fn to_powersum(&self, f: Fp) -> Result<PowerSumCircuit> {
        let mut out = PowerSumCircuit::zero();
        for t in &self.terms {
            out = out.plus(&powersum_product(f, &[t.num.clone(), t.den.clone()])?.scale(f, t.scale));
        }
        Ok(out)
    }

    pub fn size(&self, f: Fp) -> usize {
        self.terms.iter().map(|t| t.num.size(f) + t.den.size(f)).sum()
    }
}

/// Sparse twin of [`build_f`]: `(P mod z^prec, q)`.
pub fn build_f_sparse(f: Fp, ts: &[ProductCircuit], cols: &[u32], psi: &Psi, prec: u32) -> Result<(SparsePoly, u64)> {
    check_basis_size(ts.len())?;
    let lists = factor_lists(f, ts);
    let splits: Vec<Vec<(u64, SparsePoly)>> = lists.iter().map(|l| l.iter().map(|g| psi.split(g)).collect()).collect();
    let mut q = 1;
    for (a, _) in splits.iter().flatten() {
        if *a == 0 {
            return Err(Error::ZeroConstantTerm);
        }
        q = f.mul(q, f.pow(*a, prec as u64));
    }
    let mut acc = SparsePoly::zero(f);
    for tuple in tuples(&lists.iter().map(|l| l.len()).collect::<Vec<_>>()) {
        let gs: Vec<SparsePoly> = tuple.iter().enumerate().map(|(i, &j)| lists[i][j].clone()).collect();
        let jm = jacobian_minor(&gs, cols)?.minor;
        if jm.is_zero() {
            continue;
        }
        let num = psi.apply(&jm).truncate_in(Z, prec);
        let picked: Vec<(u64, SparsePoly)> = tuple.iter().enumerate().map(|(i, &j)| splits[i][j].clone()).collect();
        let (den, qt) = inverse_product_sparse(f, &picked, prec)?;
        acc = acc.add(&num.mul_trunc(&den, Z, prec).scale(f.div(q, qt)));
    }
    Ok((acc, q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PointSource {
    /// Boxes `{0..b}^n` of growing side, each new shell in counting order.
    #[default]
    Grid,
    /// The product-of-sparse hitting set for the given parameters.
    ProductHs { d: u32, s: u32 },
}

fn grid_shells(f: Fp, n: u32) -> impl Iterator<Item = Vec<u64>> {
    let n = n as usize;
    (0u64..f.modulus()).flat_map(move |b| {
        let side = b + 1;
        let total = side.checked_pow(n as u32).unwrap_or(u64::MAX);
        (0..total).filter_map(move |mut idx| {
            let mut pt = vec![0u64; n];
            for c in pt.iter_mut().rev() {
                *c = idx % side;
                idx /= side;
            }
            (pt.contains(&b) || n == 0).then_some(pt)
        })
    })
}

/// `a'` with `P(a', z) ≠ 0`; returns `Ψ'(x_i) = z a'_i + a_i`.
pub fn find_rank_preserving_point(f: Fp, p: &SparsePoly, n: u32, psi: &Psi, source: PointSource) -> Result<PsiPrime> {
    let check = |pt: &[u64]| -> bool {
        let mut by_z = vec![0u64; p.degree_in(Z) as usize + 1];
        for &(m, c) in p.terms() {
            let mut t = c;
            for (v, e) in m.vars() {
                if v != Z {
                    t = f.mul(t, f.pow(pt[v as usize - 1], e as u64));
                }
            }
            let e = m.exp(Z) as usize;
            by_z[e] = f.add(by_z[e], t);
        }
        by_z.iter().any(|&c| c != 0)
    };
    let mut seen = 0;
    let pts: Box<dyn Iterator<Item = Vec<u64>>> = match source {
        PointSource::Grid => Box::new(grid_shells(f, n)),
        PointSource::ProductHs { d, s } => {
            let hs = crate::pit_white::ProductHs { field: f, n, d, s };
            Box::new(hs.points().collect::<Vec<_>>().into_iter())
        }
    };
    for pt in pts {
        if check(&pt) {
            return Ok(PsiPrime { a: psi.a.clone(), a_prime: pt });
        }
        seen += 1;
        if seen >= SOURCE_CAP {
            break;
        }
    }
    Err(Error::SourceExhausted(seen))
}

/// `Ψ'(x_i) = z a'_i + a_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiPrime {
    pub a: Vec<u64>,
    pub a_prime: Vec<u64>,
}

/// `Φ(x_i) = sum_j y_j t^{ij} + z a'_i + a_i` with `z = var 0`, `y_j = var j`, `t = var k+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaithfulMap {
    pub k: u32,
    pub n: u32,
    pub psi: PsiPrime,
    pub prec: u32,
}

pub fn build_faithful_phi(k: u32, n: u32, psi: PsiPrime, prec: u32) -> FaithfulMap {
    FaithfulMap { k, n, psi, prec }
}

impl FaithfulMap {
    pub fn t_var(&self) -> u32 {
        self.k + 1
    }

    pub fn image(&self, f: Fp, i: u32) -> Result<SparsePoly> {
        let t = self.t_var();
        let mut out = SparsePoly::constant(f, self.psi.a.get(i as usize - 1).copied().unwrap_or(0));
        let ap = self.psi.a_prime.get(i as usize - 1).copied().unwrap_or(0);
        out = out.add(&SparsePoly::var(f, Z).scale(ap));
        for j in 1..=self.k {
            let m = crate::poly::Monomial::from_exps(&[(j, 1), (t, i * j)])?;
            out = out.add(&SparsePoly::monomial(f, m, 1));
        }
        Ok(out)
    }

    pub fn apply(&self, p: &SparsePoly) -> Result<SparsePoly> {
        let f = p.field();
        let images = (1..=self.n.max(p.max_var())).map(|i| self.image(f, i)).collect::<Result<Vec<_>>>()?;
        Ok(p.compose(&|v| images[v as usize - 1].clone()))
    }

    /// The point of `F^n` reached from `(z, y_1..y_k, t)`.
    pub fn point(&self, f: Fp, z: u64, ys: &[u64], t: u64) -> Vec<u64> {
        (1..=self.n)
            .map(|i| {
                let mut x = f.add(self.psi.a[i as usize - 1], f.mul(z, self.psi.a_prime[i as usize - 1]));
                for (j, &y) in ys.iter().enumerate() {
                    x = f.add(x, f.mul(y, f.pow(t, i as u64 * (j as u64 + 1))));
                }
                x
            })
            .collect()
    }

    /// Grid side lengths for a polynomial of degree `d` after `Φ`: `(z, y.., t)`.
    pub fn grid_bounds(&self, d: u32) -> Vec<u64> {
        let mut b = vec![d as u64 + 1; self.k as usize + 1];
        b.push(d as u64 * self.n as u64 * self.k as u64 + 1);
        b
    }

    pub fn grid_points(&self, f: Fp, d: u32) -> Result<Vec<Vec<u64>>> {
        let bounds = self.grid_bounds(d);
        if bounds.iter().any(|&b| b > f.modulus()) {
            return Err(Error::FieldTooSmall(*bounds.iter().max().unwrap()));
        }
        let mut out = vec![];
        pit_grid(f, &bounds, &mut |g: &[u64]| {
            out.push(self.point(f, g[0], &g[1..g.len() - 1], g[g.len() - 1]));
            Ok(0)
        })?;
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct ComposedReport {
    pub basis: Vec<usize>,
    pub rank: usize,
    pub cols: Vec<u32>,
    pub prec: u32,
    pub phi: Option<FaithfulMap>,
    pub grid: Vec<u64>,
}

/// The faithful map for the given inner polynomials, built from a transcendence basis.
pub fn faithful_map_for(f: Fp, ts: &[ProductCircuit], source: PointSource) -> Result<(FaithfulMap, ComposedReport)> {
    let cap = expansion_cap();
    let expanded = ts.iter().map(|t| t.expand(f, cap)).collect::<Result<Vec<_>>>()?;
    let n = expanded.iter().map(|p| p.max_var()).max().unwrap_or(0).max(1);
    let tb = trdeg_basis(&expanded)?;
    let mut report = ComposedReport {
        basis: tb.basis.clone(),
        rank: tb.rank,
        cols: tb.cols.clone(),
        prec: 0,
        phi: None,
        grid: vec![],
    };
    let basis: Vec<ProductCircuit> = tb.basis.iter().map(|&i| ts[i].clone()).collect();
    if tb.rank == 0 {
        let phi = build_faithful_phi(0, n, PsiPrime { a: vec![0; n as usize], a_prime: vec![0; n as usize] }, 1);
        report.phi = Some(phi.clone());
        return Ok((phi, report));
    }
    check_basis_size(tb.rank)?;
    let psi = build_psi(f, &basis)?;
    let d = tb.basis.iter().map(|&i| expanded[i].degree()).max().unwrap_or(1).max(1);
    let prec = tb.rank as u32 * (d - 1) + 1;
    report.prec = prec;
    let (p, _) = build_f_sparse(f, &basis, &tb.cols, &psi, prec)?;
    if p.is_zero() {
        return Err(Error::Invariant("F vanishes for an independent basis".into()));
    }
    let pp = find_rank_preserving_point(f, &p, n, &psi, source)?;
    let phi = build_faithful_phi(tb.rank as u32, n, pp, prec);
    report.phi = Some(phi.clone());
    Ok((phi, report))
}

/// `C(T_1, ..., T_m)` tested through the faithful map and a grid over `(z, y, t)`.
pub fn pit_composed(f: Fp, outer: &SparsePoly, ts: &[ProductCircuit]) -> Result<(Verdict, ComposedReport)> {
    let (phi, mut report) = faithful_map_for(f, ts, PointSource::Grid)?;
    let inner_deg = ts.iter().map(|t| t.degree()).max().unwrap_or(0);
    let d = outer.degree() * inner_deg;
    let bounds = phi.grid_bounds(d);
    if bounds.iter().any(|&b| b > f.modulus()) {
        return Err(Error::FieldTooSmall(*bounds.iter().max().unwrap()));
    }
    report.grid = bounds.clone();
    let eval_at = |x: &[u64]| -> Result<u64> {
        let vals = ts.iter().map(|t| t.eval(f, x)).collect::<Result<Vec<_>>>()?;
        outer.eval(&vals)
    };
    let mut hit = None;
    pit_grid(f, &bounds, &mut |g: &[u64]| {
        let x = phi.point(f, g[0], &g[1..g.len() - 1], g[g.len() - 1]);
        let v = eval_at(&x)?;
        if v != 0 {
            hit = Some(x);
        }
        Ok(v)
    })?;
    Ok((hit.map_or_else(Verdict::zero, Verdict::nonzero_at), report))
}

/// Blackbox-style test of a top-sum circuit via its faithful image.
pub fn pit_jacobian(f: Fp, c: &TopSumCircuit) -> Result<(Verdict, ComposedReport)> {
    let live: Vec<ProductCircuit> = c.terms.iter().filter(|t| !t.has_zero_factor(f)).cloned().collect();
    if live.is_empty() {
        return Ok((Verdict::zero(), ComposedReport { basis: vec![], rank: 0, cols: vec![], prec: 0, phi: None, grid: vec![] }));
    }
    let m = live.len() as u32;
    let outer = (1..=m).fold(SparsePoly::zero(f), |acc, i| acc.add(&SparsePoly::var(f, i)));
    pit_composed(f, &outer, &live)
}

fn check_hs_params(n: u32, d: u32, k: u32, delta: u32) -> Result<()> {
    if n == 0 || d == 0 || k == 0 || delta == 0 {
        return Err(Error::Unsupported("n, d, k and delta must be positive".into()));
    }
    if k as usize > MAX_BASIS || delta > MAX_DELTA || n > MAX_HS_VARS {
        return Err(Error::Unsupported(format!(
            "caps are k <= {MAX_BASIS}, delta <= {MAX_DELTA}, n <= {MAX_HS_VARS}"
        )));
    }
    Ok(())
}

pub const DEFAULT_CANDIDATES: u32 = 2;

/// Union of faithful-map grids over seeded candidate shifts `(a, a')`.
fn class_hitting_set(f: Fp, class: &str, p: HsParams, candidates: u32, seed: u64) -> Result<HittingSet> {
    check_hs_params(p.n, p.d, p.k, if class == "spsu" { 1 } else { p.delta })?;
    let mut hs = HittingSet::new(class, p, f.modulus(), "faithful-grid");
    let mut r = rng(seed);
    for _ in 0..candidates.max(1) {
        let a: Vec<u64> = (0..p.n).map(|_| r.gen_range(1..f.modulus())).collect();
        let a_prime: Vec<u64> = (0..p.n).map(|_| r.gen_range(1..f.modulus())).collect();
        let phi = build_faithful_phi(p.k, p.n, PsiPrime { a, a_prime }, p.k * (p.d.max(1) - 1) + 1);
        hs.extend(phi.grid_points(f, p.d)?);
    }
    Ok(hs)
}

pub fn hitting_set_spsp(f: Fp, n: u32, d: u32, k: u32, delta: u32, s: u32, seed: u64) -> Result<HittingSet> {
    class_hitting_set(f, "spsp", HsParams { n, d, k, delta, s }, DEFAULT_CANDIDATES, seed)
}

pub fn hitting_set_spsu(f: Fp, n: u32, d: u32, k: u32, s: u32, seed: u64) -> Result<HittingSet> {
    class_hitting_set(f, "spsu", HsParams { n, d, k, delta: d, s }, DEFAULT_CANDIDATES, seed)
}

/// Instance-dependent set: the certified faithful grid for one circuit.
pub fn hitting_set_for(f: Fp, c: &TopSumCircuit) -> Result<HittingSet> {
    let live: Vec<ProductCircuit> = c.terms.iter().filter(|t| !t.has_zero_factor(f)).cloned().collect();
    let n = live.iter().map(|t| t.max_var(f)).max().unwrap_or(1).max(1);
    let d = c.degree();
    let params = HsParams { n, d, k: live.len() as u32, delta: d, s: 0 };
    let mut hs = HittingSet::new("instance", params, f.modulus(), "certified-search");
    if live.is_empty() {
        return Ok(hs);
    }
    let (phi, _) = faithful_map_for(f, &live, PointSource::Grid)?;
    hs.extend(phi.grid_points(f, d)?);
    Ok(hs)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HsReport {
    pub samples: usize,
    pub hits: usize,
    pub misses: Vec<u64>,
}

/// Generator parameters whose members stay within the set's `(n, d, k, δ, s)`.
pub fn sample_params(class: ClassTag, p: HsParams) -> Result<GenParams> {
    let d = p.d.max(1);
    let sparsity = if p.s == 0 { 3 } else { p.s.min(3) };
    Ok(match class {
        ClassTag::Spsp => {
            let delta = p.delta.clamp(1, d);
            GenParams { n: p.n, d: 1, k: p.k, delta, factors: d / delta, sparsity }
        }
        ClassTag::Spsu => {
            let du = d.min(2);
            GenParams { n: p.n, d: du, k: p.k, delta: 1, factors: d / du, sparsity }
        }
        ClassTag::ProdSparse => {
            let delta = d.min(2);
            let factors = d / delta;
            let sparsity = if p.s == 0 { 2 } else { (p.s / factors).clamp(1, 3) };
            GenParams { n: p.n, d: 1, k: 1, delta, factors, sparsity }
        }
        other => return Err(Error::ClassMismatch(format!("no hitting-set class `{other}`"))),
    })
}

/// Hit rate of `hs` on `samples` oracle-nonzero members of its class.
pub fn verify_hitting_set(hs: &HittingSet, samples: usize, seed: u64) -> Result<HsReport> {
    let class: ClassTag = hs.class.parse()?;
    let f = Fp::with_modulus(hs.field)?;
    let gp = sample_params(class, hs.params)?;
    let mut report = HsReport { samples, hits: 0, misses: vec![] };
    for i in 0..samples as u64 {
        let c = gen_nonzero(f, class, &gp, seed.wrapping_add(i))?;
        if c.degree() > hs.params.d.max(1) || c.num_vars() > hs.params.n {
            return Err(Error::Invariant(format!("sample {i} lies outside the declared class")));
        }
        if hs.hit(&|x| c.eval(x))?.is_some() {
            report.hits += 1;
        } else {
            report.misses.push(seed.wrapping_add(i));
        }
    }
    Ok(report)
}
