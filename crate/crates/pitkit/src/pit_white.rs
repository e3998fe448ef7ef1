//! Deterministic whitebox testers, ending with the DiDI recursion for `Σ^[k]ΠΣ∧`.

use crate::circuit::{Factor, PowerSumCircuit, ProductCircuit, Roabp, TopSumCircuit, Verdict};
use crate::error::{Error, Result};
use crate::field::Fp;
use crate::kernels::{dlog_series, duality_to_roabp, waring_decompose};
use crate::poly::{Monomial, SparsePoly, Z};
use std::collections::HashSet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HsParams {
    pub n: u32,
    pub d: u32,
    pub k: u32,
    pub delta: u32,
    pub s: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HittingSet {
    pub class: String,
    pub params: HsParams,
    pub field: u64,
    pub provenance: String,
    pub points: Vec<Vec<u64>>,
}

impl HittingSet {
    pub fn new(class: &str, params: HsParams, field: u64, provenance: &str) -> Self {
        HittingSet { class: class.into(), params, field, provenance: provenance.into(), points: vec![] }
    }

    pub fn extend(&mut self, pts: impl IntoIterator<Item = Vec<u64>>) {
        let mut seen: HashSet<Vec<u64>> = self.points.iter().cloned().collect();
        for p in pts {
            if seen.insert(p.clone()) {
                self.points.push(p);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// First point where `eval` is nonzero.
    pub fn hit(&self, eval: &dyn Fn(&[u64]) -> Result<u64>) -> Result<Option<Vec<u64>>> {
        for p in &self.points {
            if eval(p)? != 0 {
                return Ok(Some(p.clone()));
            }
        }
        Ok(None)
    }

    pub fn serialize(&self) -> String {
        let p = self.params;
        let mut out = format!(
            "hs {} n={} d={} k={} delta={} s={} field={} source={}\n",
            self.class, p.n, p.d, p.k, p.delta, p.s, self.field, self.provenance
        );
        for pt in &self.points {
            let s: Vec<String> = pt.iter().map(|v| v.to_string()).collect();
            out.push_str(&s.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<HittingSet> {
        let bad = |line: usize, msg: &str| Error::Syntax { line, col: 1, msg: msg.into() };
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad(1, "empty hitting-set file"))?;
        let mut words = header.split_whitespace();
        if words.next() != Some("hs") {
            return Err(bad(1, "header must start with `hs`"));
        }
        let class = words.next().ok_or_else(|| bad(1, "missing class"))?;
        let mut hs = HittingSet::new(class, HsParams::default(), 0, "");
        for w in words {
            let (k, v) = w.split_once('=').ok_or_else(|| bad(1, "expected key=value"))?;
            if k == "source" {
                hs.provenance = v.into();
                continue;
            }
            let v: u64 = v.parse().map_err(|_| bad(1, "bad integer in header"))?;
            match k {
                "n" => hs.params.n = v as u32,
                "d" => hs.params.d = v as u32,
                "k" => hs.params.k = v as u32,
                "delta" => hs.params.delta = v as u32,
                "s" => hs.params.s = v as u32,
                "field" => hs.field = v,
                _ => return Err(bad(1, "unknown header key")),
            }
        }
        for (i, l) in lines.enumerate() {
            if l.trim().is_empty() {
                continue;
            }
            let pt = l
                .split_whitespace()
                .map(|t| t.parse::<u64>().map_err(|_| bad(i + 2, "bad residue")))
                .collect::<Result<Vec<_>>>()?;
            if pt.len() != hs.params.n as usize || pt.iter().any(|&v| v >= hs.field) {
                return Err(bad(i + 2, "point does not match header"));
            }
            hs.points.push(pt);
        }
        Ok(hs)
    }
}

/// Grid test on `{0..d-1}^n`, last coordinate fastest.
pub fn pit_trivial(field: Fp, n: u32, d: u32, eval: &dyn Fn(&[u64]) -> Result<u64>) -> Result<Verdict> {
    pit_grid(field, &vec![d as u64; n as usize], &mut |pt: &[u64]| eval(pt))
}

/// Grid test on `{0..b_1-1} x .. x {0..b_n-1}`, stopping at the first non-root.
pub fn pit_grid(field: Fp, bounds: &[u64], eval: &mut dyn FnMut(&[u64]) -> Result<u64>) -> Result<Verdict> {
    if let Some(&b) = bounds.iter().find(|&&b| b > field.modulus()) {
        return Err(Error::FieldTooSmall(b));
    }
    if bounds.contains(&0) {
        return Ok(Verdict::zero());
    }
    let mut pt = vec![0u64; bounds.len()];
    loop {
        if eval(&pt)? != 0 {
            return Ok(Verdict::nonzero_at(pt));
        }
        let mut i = bounds.len();
        loop {
            if i == 0 {
                return Ok(Verdict::zero());
            }
            i -= 1;
            pt[i] += 1;
            if pt[i] < bounds[i] {
                break;
            }
            pt[i] = 0;
        }
    }
}

pub fn ks_bound(m: usize, n: u32, d: u32) -> u64 {
    let x = m as f64 * n as f64 * (d.max(2) as f64).log2();
    ((x * x).ceil() as u64).max(1)
}

/// Smallest `r` whose image under `x_i -> y^{d^{i-1} mod r}` is nonzero.
pub fn ks_certificate(p: &SparsePoly, m: usize, d: u32) -> Result<Option<u64>> {
    let f = p.field();
    if p.sparsity() > m {
        return Err(Error::Unsupported(format!("sparsity {} exceeds bound {m}", p.sparsity())));
    }
    if p.max_exp() >= d.max(2) {
        return Err(Error::Unsupported(format!("individual degree {} not below {d}", p.max_exp())));
    }
    if p.is_zero() {
        return Ok(None);
    }
    let base = d.max(2) as u64;
    let n = p.max_var().max(1);
    let bound = ks_bound(m, n, d);
    for r in 1..=bound {
        let mut w = vec![0u64; n as usize + 1];
        let mut pw = 1 % r;
        for wi in w.iter_mut().skip(1) {
            *wi = pw;
            pw = ((pw as u128 * base as u128) % r as u128) as u64;
        }
        let mut img = vec![0u64; r as usize];
        for &(mono, c) in p.terms() {
            let e = mono.vars().fold(0u128, |acc, (v, e)| acc + e as u128 * w[v as usize] as u128) % r as u128;
            img[e as usize] = f.add(img[e as usize], c);
        }
        if img.iter().any(|&c| c != 0) {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

pub fn pit_sparse_ks(p: &SparsePoly, m: usize, d: u32) -> Result<Verdict> {
    Ok(match ks_certificate(p, m, d)? {
        Some(r) => Verdict::nonzero_note(format!("r={r}")),
        None => Verdict::zero(),
    })
}

/// Lazy hitting set for products of sparse polynomials: the sparse-PIT
/// substitution `x_i = a^{(d+1)^{i-1} mod r}` with `a` over `d(r-1)+1` values.
#[derive(Debug, Clone, Copy)]
pub struct ProductHs {
    pub field: Fp,
    pub n: u32,
    pub d: u32,
    pub s: u32,
}

impl ProductHs {
    pub fn r_bound(&self) -> u64 {
        let x = self.s.max(1) as f64 * self.n.max(1) as f64 * ((self.d + 1) as f64).log2();
        ((x * x).ceil() as u64).max(1)
    }

    pub fn points_for_r(&self, r: u64) -> impl Iterator<Item = Vec<u64>> + '_ {
        let f = self.field;
        let base = self.d as u64 + 1;
        let mut w = Vec::with_capacity(self.n as usize);
        let mut pw = 1 % r;
        for _ in 0..self.n {
            w.push(pw);
            pw = ((pw as u128 * base as u128) % r as u128) as u64;
        }
        let count = (self.d as u64 * (r - 1) + 1).min(f.modulus());
        (0..count).map(move |a| w.iter().map(|&e| f.pow(a, e)).collect())
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        (1..=self.r_bound()).flat_map(move |r| self.points_for_r(r))
    }

    pub fn emit(&self) -> HittingSet {
        let mut hs = HittingSet::new(
            "prod-sparse",
            HsParams { n: self.n, d: self.d, k: 1, delta: self.d, s: self.s },
            self.field.modulus(),
            "ks-grid",
        );
        hs.extend(self.points());
        hs
    }
}

pub fn hitting_set_product_sparse(field: Fp, n: u32, d: u32, s: u32) -> HittingSet {
    ProductHs { field, n, d, s }.emit()
}

fn product_params(f: Fp, factors: &[&Factor]) -> (u32, u32, u32) {
    let n = factors.iter().map(|g| g.to_sparse(f).max_var()).max().unwrap_or(0).max(1);
    let d = factors.iter().map(|g| g.degree()).sum::<u32>();
    let s = factors.iter().map(|g| g.size(f) as u32).sum::<u32>();
    (n, d, s)
}

/// First point of the product hitting set where no factor vanishes.
pub fn find_nonvanishing_point(f: Fp, factors: &[&Factor], mut visit: impl FnMut(&[u64]) -> Result<bool>) -> Result<Vec<u64>> {
    let (n, d, s) = product_params(f, factors);
    let hs = ProductHs { field: f, n, d, s };
    for pt in hs.points() {
        if !visit(&pt)? {
            return Err(Error::Invariant("point search interrupted".into()));
        }
        let val = |v: u32| if v == 0 { None } else { pt.get(v as usize - 1).copied() };
        let mut ok = true;
        for g in factors {
            if g.eval_with(f, &val)? == 0 {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(pt);
        }
    }
    Err(Error::NoPointFound)
}

pub fn pit_product_sparse(f: Fp, prod: &ProductCircuit) -> Result<Verdict> {
    if prod.has_zero_factor(f) {
        return Ok(Verdict::zero());
    }
    let fs: Vec<&Factor> = prod.factors.iter().collect();
    Ok(Verdict::nonzero_at(find_nonvanishing_point(f, &fs, |_| Ok(true))?))
}

/// Layer-by-layer span of monomial coefficient vectors.
pub fn pit_roabp(f: Fp, r: &Roabp) -> Verdict {
    let w = r.width;
    let mut basis: Vec<(Monomial, Vec<u64>)> = vec![];
    if r.left.iter().any(|&c| c != 0) {
        basis.push((Monomial::ONE, r.left.clone()));
    }
    for (li, &v) in r.order.iter().enumerate() {
        let deg = r.layers[li].iter().map(|u| u.degree()).max().unwrap_or(0);
        let mut ech = Echelon::new(f, w);
        let mut next = vec![];
        'outer: for (m, b) in &basis {
            for e in 0..=deg {
                let mut vec = vec![0u64; w];
                for (row, &a) in b.iter().enumerate() {
                    if a == 0 {
                        continue;
                    }
                    for (c, out) in vec.iter_mut().enumerate() {
                        let k = r.entry(li, row, c).coeff(e);
                        if k != 0 {
                            *out = f.add(*out, f.mul(a, k));
                        }
                    }
                }
                if ech.insert(&vec) {
                    let label = m.with_exp(v, m.exp(v) + e as u32).expect("roabp degree in range");
                    next.push((label, vec));
                    if next.len() == w {
                        break 'outer;
                    }
                }
            }
        }
        basis = next;
    }
    for (m, b) in &basis {
        let c = b.iter().zip(&r.right).fold(0, |acc, (&a, &x)| f.add(acc, f.mul(a, x)));
        if c != 0 {
            return Verdict::nonzero_note(format!("coefficient of {m} is {}", f.signed(c)));
        }
    }
    Verdict::zero()
}

struct Echelon {
    f: Fp,
    rows: Vec<(usize, Vec<u64>)>,
    w: usize,
}

impl Echelon {
    fn new(f: Fp, w: usize) -> Self {
        Echelon { f, rows: vec![], w }
    }

    fn insert(&mut self, v: &[u64]) -> bool {
        if self.rows.len() == self.w {
            return false;
        }
        let f = self.f;
        let mut v = v.to_vec();
        for (piv, row) in &self.rows {
            let c = v[*piv];
            if c != 0 {
                for (x, &y) in v.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
        let Some(piv) = v.iter().position(|&c| c != 0) else { return false };
        let inv = f.inv(v[piv]);
        for x in v.iter_mut() {
            *x = f.mul(*x, inv);
        }
        self.rows.push((piv, v));
        true
    }
}

pub fn pit_powersum_white(f: Fp, ps: &PowerSumCircuit) -> Result<Verdict> {
    Ok(pit_roabp(f, &duality_to_roabp(f, ps)?))
}

/// A sparse polynomial over `F[x]` rewritten as `Σ∧Σ∧` via Waring on each monomial.
pub fn sparse_to_powersum(p: &SparsePoly) -> Result<PowerSumCircuit> {
    let f = p.field();
    let mut out = PowerSumCircuit::zero();
    for &(m, c) in p.terms() {
        if m.exp(Z) > 0 {
            return Err(Error::ClassMismatch("expected a polynomial free of z".into()));
        }
        out = out.plus(&waring_decompose(f, m)?.scale(f, c));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZeroTest {
    #[default]
    Exact,
    PowerSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DidiOptions {
    pub pretest: bool,
    pub zero_test: ZeroTest,
}

impl Default for DidiOptions {
    fn default() -> Self {
        DidiOptions { pretest: true, zero_test: ZeroTest::Exact }
    }
}

fn is_zero_poly(p: &SparsePoly, mode: ZeroTest) -> Result<bool> {
    match mode {
        ZeroTest::Exact => Ok(p.is_zero()),
        ZeroTest::PowerSum => {
            let ps = sparse_to_powersum(p)?;
            Ok(pit_powersum_white(p.field(), &ps)?.is_zero())
        }
    }
}

/// `(U/V)·(P/Q)` over `F[z,x]`: `U`, `V` are lists of shifted factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BloatedTerm {
    pub u: Vec<SparsePoly>,
    pub v: Vec<SparsePoly>,
    pub p: SparsePoly,
    pub q: SparsePoly,
}

fn part_size(p: &SparsePoly) -> usize {
    p.sparsity() + p.degree() as usize
}

impl BloatedTerm {
    pub fn size(&self) -> usize {
        self.u.iter().chain(&self.v).map(part_size).sum::<usize>() + part_size(&self.p) + part_size(&self.q)
    }

    /// Product of `U` and of `V` at `z = 0`; nonconstant values are reported as `None`.
    pub fn uv_at_zero(&self) -> (Option<u64>, Option<u64>) {
        let f = self.p.field();
        let at0 = |l: &[SparsePoly]| {
            l.iter().try_fold(1u64, |acc, g| {
                let c = g.eval_var(Z, 0);
                c.is_constant().then(|| f.mul(acc, c.constant_term()))
            })
        };
        (at0(&self.u), at0(&self.v))
    }

    /// `v_z(P) - v_z(Q)` computed modulo `z^cap`; `None` when the term vanishes there.
    pub fn valuation(&self, cap: u32, mode: ZeroTest) -> Result<Option<i64>> {
        let vq = self.q.valuation_in(Z).ok_or_else(|| Error::Invariant("zero denominator".into()))?;
        let Some(vp) = lowest_z(&self.p, cap + vq, mode)? else { return Ok(None) };
        Ok(Some(vp as i64 - vq as i64))
    }
}

fn lowest_z(p: &SparsePoly, cap: u32, mode: ZeroTest) -> Result<Option<u32>> {
    if mode == ZeroTest::Exact {
        return Ok(p.valuation_in(Z).filter(|&v| v < cap));
    }
    for e in 0..cap {
        if !is_zero_poly(&p.coeff_in(Z, e), mode)? {
            return Ok(Some(e));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MinValuation {
    AllZero,
    At { index: usize, v: i64, valuations: Vec<Option<i64>> },
}

pub fn min_valuation(terms: &[BloatedTerm], cap: u32, mode: ZeroTest) -> Result<MinValuation> {
    let vals = terms.iter().map(|t| t.valuation(cap, mode)).collect::<Result<Vec<_>>>()?;
    let best = vals.iter().enumerate().filter_map(|(i, v)| v.map(|v| (v, i))).min();
    Ok(match best {
        None => MinValuation::AllZero,
        Some((v, index)) => MinValuation::At { index, v, valuations: vals },
    })
}

fn lowest_coeff(p: &SparsePoly) -> SparsePoly {
    match p.valuation_in(Z) {
        Some(v) => p.coeff_in(Z, v),
        None => SparsePoly::zero(p.field()),
    }
}

/// `(sum_{i != m} T_i/T_m + 1)` at `z = 0`, with every ratio cleared over a common denominator.
pub fn z0_residue_test(terms: &[BloatedTerm], divisor: usize, mode: ZeroTest) -> Result<Verdict> {
    let dt = &terms[divisor];
    let f = dt.p.field();
    let vm = dt.valuation(u32::MAX / 2, ZeroTest::Exact)?.ok_or(Error::UndefinedAtZero)?;
    let (um, vvm) = dt.uv_at_zero();
    let (um, vvm) = (um.ok_or(Error::UndefinedAtZero)?, vvm.ok_or(Error::UndefinedAtZero)?);
    let mut num = SparsePoly::one(f);
    let mut den = SparsePoly::one(f);
    for (i, t) in terms.iter().enumerate() {
        if i == divisor {
            continue;
        }
        let Some(vi) = t.valuation(u32::MAX / 2, ZeroTest::Exact)? else { continue };
        if vi < vm {
            return Err(Error::UndefinedAtZero);
        }
        if vi > vm {
            continue;
        }
        let (ui, vvi) = t.uv_at_zero();
        let (ui, vvi) = (ui.ok_or(Error::UndefinedAtZero)?, vvi.ok_or(Error::UndefinedAtZero)?);
        let ni = lowest_coeff(&t.p).mul(&lowest_coeff(&dt.q)).scale(f.mul(ui, vvm));
        let di = lowest_coeff(&t.q).mul(&lowest_coeff(&dt.p)).scale(f.mul(vvi, um));
        num = num.mul(&di).add(&ni.mul(&den));
        den = den.mul(&di);
    }
    if is_zero_poly(&num, mode)? {
        Ok(Verdict::zero())
    } else {
        Ok(Verdict::nonzero_note("z=0 residue of the ratio sum is nonzero"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DidiLevel {
    pub precision: u32,
    pub valuations: Vec<Option<i64>>,
    pub divisor: Option<usize>,
    pub term_sizes: Vec<usize>,
    /// `v_z` of every term built for the next level, before z-power cancellation.
    pub new_valuations: Vec<i64>,
    /// `U|_{z=0}` and `V|_{z=0}` of every term at this level.
    pub uv_at_zero: Vec<(Option<u64>, Option<u64>)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DidiTrace {
    pub degree: u32,
    pub shift: Vec<u64>,
    pub levels: Vec<DidiLevel>,
    pub exit: String,
}

impl DidiTrace {
    /// Every breach of the descent, valuation and shift invariants.
    pub fn violations(&self) -> Vec<String> {
        let mut out = vec![];
        for (j, l) in self.levels.iter().enumerate() {
            if l.precision == 0 {
                out.push(format!("level {}: precision reached 0 while recursing", j + 1));
            }
            if j > 0 && l.precision >= self.levels[j - 1].precision {
                out.push(format!("level {}: precision did not decrease", j + 1));
            }
            for (i, &v) in l.new_valuations.iter().enumerate() {
                if v < 0 {
                    out.push(format!("level {}: new term {i} has valuation {v}", j + 1));
                }
            }
            for (i, (u, v)) in l.uv_at_zero.iter().enumerate() {
                if !matches!(u, Some(c) if *c != 0) || !matches!(v, Some(c) if *c != 0) {
                    out.push(format!("level {}: term {i} has U or V not a nonzero scalar at z=0", j + 1));
                }
            }
        }
        out
    }
}

impl fmt::Display for DidiTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "degree bound d = {}, shift a = {:?}", self.degree, self.shift)?;
        for (j, l) in self.levels.iter().enumerate() {
            let vals: Vec<String> =
                l.valuations.iter().map(|v| v.map_or("inf".into(), |v| v.to_string())).collect();
            writeln!(
                f,
                "level {}: d_j = {}, v = [{}], divisor = {:?}, sizes = {:?}",
                j + 1,
                l.precision,
                vals.join(", "),
                l.divisor,
                l.term_sizes
            )?;
        }
        write!(f, "exit: {}", self.exit)
    }
}

pub fn didi_pit(f: Fp, c: &TopSumCircuit) -> Result<Verdict> {
    Ok(didi_pit_traced(f, c, DidiOptions::default())?.0)
}

/// Divide, derive and induct on the top fan-in.
pub fn didi_pit_traced(f: Fp, c: &TopSumCircuit, opts: DidiOptions) -> Result<(Verdict, DidiTrace)> {
    if c.kind()? != crate::circuit::FactorKind::SumUni {
        return Err(Error::ClassMismatch("didi needs sum-of-univariate factors".into()));
    }
    let mut trace = DidiTrace::default();
    let terms: Vec<&ProductCircuit> = c.terms.iter().filter(|t| !t.has_zero_factor(f)).collect();
    if terms.is_empty() {
        trace.exit = "every product has a zero factor".into();
        return Ok((Verdict::zero(), trace));
    }
    let d = terms.iter().map(|t| t.degree()).max().unwrap_or(0) + 1;
    trace.degree = d;
    if f.modulus() <= d as u64 {
        return Err(Error::CharTooSmall(d as u64));
    }

    let all: Vec<&Factor> = terms.iter().flat_map(|t| t.factors.iter()).collect();
    let mut hit: Option<Vec<u64>> = None;
    let a = find_nonvanishing_point(f, &all, |pt| {
        if opts.pretest && c.eval(f, pt)? != 0 {
            hit = Some(pt.to_vec());
            return Ok(false);
        }
        Ok(true)
    });
    if let Some(pt) = hit {
        trace.exit = "nonzero at a point of the product hitting set".into();
        return Ok((Verdict::nonzero_at(pt), trace));
    }
    let a = a?;
    trace.shift = a.clone();

    let shift = |g: &Factor| -> SparsePoly {
        let z = SparsePoly::var(f, Z);
        g.to_sparse(f).compose(&|v| {
            let xv = SparsePoly::var(f, v);
            xv.mul(&z).add(&SparsePoly::constant(f, a.get(v as usize - 1).copied().unwrap_or(0)))
        })
    };
    let mut level: Vec<BloatedTerm> = terms
        .iter()
        .map(|t| BloatedTerm {
            u: t.factors.iter().map(shift).collect(),
            v: vec![],
            p: SparsePoly::one(f),
            q: SparsePoly::one(f),
        })
        .collect();

    let mut dj = d;
    loop {
        let mut info = DidiLevel {
            precision: dj,
            term_sizes: level.iter().map(|t| t.size()).collect(),
            uv_at_zero: level.iter().map(|t| t.uv_at_zero()).collect(),
            ..Default::default()
        };
        let mv = min_valuation(&level, dj, opts.zero_test)?;
        let (m, v, vals) = match mv {
            MinValuation::AllZero => {
                info.valuations = vec![None; level.len()];
                trace.levels.push(info);
                trace.exit = format!("all terms vanish modulo z^{dj}");
                return Ok((Verdict::zero(), trace));
            }
            MinValuation::At { index, v, valuations } => (index, v, valuations),
        };
        info.valuations = vals.clone();
        info.divisor = Some(m);
        let live: Vec<usize> = (0..level.len()).filter(|&i| vals[i].is_some()).collect();
        if live.len() == 1 {
            trace.levels.push(info);
            trace.exit = format!("single surviving term with valuation {v} < {dj}");
            return Ok((
                Verdict::nonzero_note(format!("level {}: lone term has valuation {v} below {dj}", trace.levels.len())),
                trace,
            ));
        }
        let kept: Vec<BloatedTerm> = live.iter().map(|&i| level[i].clone()).collect();
        let mpos = live.iter().position(|&i| i == m).unwrap();
        let z0 = z0_residue_test(&kept, mpos, opts.zero_test)?;
        if !z0.is_zero() {
            trace.levels.push(info);
            trace.exit = "z=0 residue nonzero".into();
            let note = format!("level {}: z=0 residue of the ratio sum is nonzero", trace.levels.len());
            return Ok((Verdict::nonzero_note(note), trace));
        }
        let next_prec = dj as i64 - v - 1;
        if next_prec <= 0 {
            trace.levels.push(info);
            trace.exit = format!("residue vanishes and no precision is left (d_j = {dj}, v = {v})");
            return Ok((Verdict::zero(), trace));
        }
        let next_prec = next_prec as u32;
        let mut next = vec![];
        for (i, t) in kept.iter().enumerate() {
            if i == mpos {
                continue;
            }
            let (nt, val) = derive_ratio(t, &kept[mpos], next_prec)?;
            info.new_valuations.push(val);
            next.push(nt);
        }
        trace.levels.push(info);
        level = next;
        dj = next_prec;
    }
}

/// `d/dz (T_i / T_m)` as a new term, valid modulo `z^prec`, plus its valuation.
fn derive_ratio(ti: &BloatedTerm, tm: &BloatedTerm, prec: u32) -> Result<(BloatedTerm, i64)> {
    let f = ti.p.field();
    let u: Vec<SparsePoly> = ti.u.iter().chain(&tm.v).cloned().collect();
    let v: Vec<SparsePoly> = ti.v.iter().chain(&tm.u).cloned().collect();
    let vb = match (ti.q.valuation_in(Z), tm.p.valuation_in(Z)) {
        (Some(x), Some(y)) => x + y,
        _ => return Err(Error::Invariant("zero divisor term".into())),
    };
    let w = 2 * vb;
    let n = prec + w;
    let a = ti.p.mul_trunc(&tm.q, Z, n + 1);
    let b = ti.q.mul_trunc(&tm.p, Z, n + 1);
    let mut s = SparsePoly::zero(f);
    for (g, sign) in u.iter().map(|g| (g, 1)).chain(v.iter().map(|g| (g, -1))) {
        let a0 = g.eval_var(Z, 0);
        if !a0.is_constant() || a0.constant_term() == 0 {
            return Err(Error::Invariant("shifted factor is not a nonzero scalar at z=0".into()));
        }
        let a0 = a0.constant_term();
        let bz = SparsePoly::constant(f, a0).sub(g).div_var_pow(Z, 1);
        let dl = dlog_series(a0, &bz, n)?;
        s = if sign > 0 { s.add(&dl) } else { s.sub(&dl) };
    }
    let ab = a.mul_trunc(&b, Z, n);
    let p = a
        .partial(Z)
        .mul_trunc(&b, Z, n)
        .sub(&a.mul_trunc(&b.partial(Z), Z, n))
        .add(&s.mul_trunc(&ab, Z, n));
    let q = b.mul_trunc(&b, Z, n);
    let vq = q.valuation_in(Z).unwrap_or(0);
    let val = match p.valuation_in(Z) {
        Some(vp) => vp as i64 - vq as i64,
        None => i64::MAX,
    };
    let cut = vq.min(p.valuation_in(Z).unwrap_or(vq));
    let p = p.div_var_pow(Z, cut).truncate_in(Z, prec);
    let q = q.div_var_pow(Z, cut).truncate_in(Z, prec);
    Ok((BloatedTerm { u, v, p, q }, val))
}
