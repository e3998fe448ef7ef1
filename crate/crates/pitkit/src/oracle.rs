//! Ground truth and randomized testers, plus the seeded circuit generator.
//!
//! All randomness comes from ChaCha8 seeded with a `u64`, so a seed names
//! the same circuit on every platform.

use crate::circuit::{
    expand_to_sparse, Circuit, CircuitExpr, Factor, Outcome, PowerSumCircuit, ProductCircuit, Roabp, SparseCircuit,
    SumUni, Summand, TopSumCircuit, Verdict,
};
use crate::error::{Error, Result};
use crate::field::Fp;
use crate::kernels::waring_bases;
use crate::poly::{Monomial, SparsePoly, UniPoly};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;

pub const RETRY_CAP: usize = 64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn schwartz_zippel(c: &Circuit, trials: usize, seed: u64) -> Result<Verdict> {
    let f = c.field;
    let deg = c.degree() as u64;
    if f.modulus() < 2 * deg {
        return Err(Error::FieldTooSmall(2 * deg));
    }
    let mut r = rng(seed);
    let n = c.num_vars() as usize;
    for _ in 0..trials {
        let pt: Vec<u64> = (0..n).map(|_| r.gen_range(0..f.modulus())).collect();
        if c.eval(&pt)? != 0 {
            return Ok(Verdict::nonzero_at(pt));
        }
    }
    Ok(Verdict { outcome: Outcome::ProbablyZero, witness: None })
}

pub fn brute_zero_test(c: &Circuit) -> Result<Verdict> {
    let p = expand_to_sparse(c)?;
    Ok(match p.terms().last() {
        None => Verdict::zero(),
        Some(&(m, k)) => Verdict::nonzero_note(format!("leading term {} {m}", c.field.signed(k))),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassTag {
    Spsu,
    Spsp,
    ProdSparse,
    ProdSumuni,
    PowerSum,
    Roabp,
    Sparse,
}

impl ClassTag {
    pub const ALL: [ClassTag; 7] = [
        ClassTag::Spsu,
        ClassTag::Spsp,
        ClassTag::ProdSparse,
        ClassTag::ProdSumuni,
        ClassTag::PowerSum,
        ClassTag::Roabp,
        ClassTag::Sparse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassTag::Spsu => "spsu",
            ClassTag::Spsp => "spsp",
            ClassTag::ProdSparse => "prod-sparse",
            ClassTag::ProdSumuni => "prod-sumuni",
            ClassTag::PowerSum => "powersum",
            ClassTag::Roabp => "roabp",
            ClassTag::Sparse => "sparse",
        }
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassTag::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| Error::UnknownClass(s.into()))
    }
}

/// `d` bounds univariate degrees (or exponents for power sums), `delta` the
/// degree of sparse factors, `k` the top fan-in, summand count or ROABP width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenParams {
    pub n: u32,
    pub d: u32,
    pub k: u32,
    pub delta: u32,
    pub factors: u32,
    pub sparsity: u32,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams { n: 3, d: 2, k: 3, delta: 2, factors: 2, sparsity: 3 }
    }
}

struct Gen<'a> {
    f: Fp,
    p: &'a GenParams,
    r: ChaCha8Rng,
}

impl Gen<'_> {
    fn coef(&mut self) -> u64 {
        self.f.from_i64(self.r.gen_range(-9..=9))
    }

    fn nonzero_coef(&mut self) -> u64 {
        loop {
            let c = self.coef();
            if c != 0 {
                return c;
            }
        }
    }

    fn var(&mut self) -> u32 {
        self.r.gen_range(1..=self.p.n.max(1))
    }

    fn uni(&mut self, v: u32, max_deg: u32) -> UniPoly {
        let deg = self.r.gen_range(1..=max_deg.max(1));
        let mut cs: Vec<u64> = (0..deg).map(|_| self.coef()).collect();
        cs.push(self.nonzero_coef());
        UniPoly::new(self.f, v, cs)
    }

    fn sumuni(&mut self, max_deg: u32) -> SumUni {
        let f = self.f;
        let mut vars: Vec<u32> = (1..=self.p.n.max(1)).collect();
        vars.shuffle(&mut self.r);
        let m = self.r.gen_range(1..=vars.len());
        let mut unis: Vec<UniPoly> = vars[..m].iter().map(|&v| self.uni(v, max_deg)).collect();
        if self.r.gen_bool(0.5) {
            unis.push(UniPoly::new(f, vars[0], vec![self.nonzero_coef()]));
        }
        SumUni::new(f, unis)
    }

    fn nonzero_sumuni(&mut self, max_deg: u32) -> SumUni {
        loop {
            let s = self.sumuni(max_deg);
            if !s.unis().is_empty() {
                return s;
            }
        }
    }

    fn sparse_poly(&mut self, delta: u32, terms: u32) -> SparsePoly {
        let f = self.f;
        loop {
            let mut out = vec![];
            for _ in 0..self.r.gen_range(1..=terms.max(1)) {
                let deg = self.r.gen_range(0..=delta);
                let mut exps = vec![];
                for _ in 0..deg {
                    exps.push((self.var(), 1));
                }
                out.push((Monomial::from_exps(&exps).expect("small monomial"), self.nonzero_coef()));
            }
            let p = SparsePoly::from_terms(f, out);
            if !p.is_zero() && (delta == 0 || p.degree() > 0) {
                return p;
            }
        }
    }

    fn factor(&mut self, kind: ClassTag) -> Factor {
        match kind {
            ClassTag::Spsp | ClassTag::ProdSparse => {
                let p = self.sparse_poly(self.p.delta, self.p.sparsity);
                Factor::Sparse(SparseCircuit::new(p, self.p.delta).expect("degree within delta"))
            }
            _ => Factor::Uni(self.nonzero_sumuni(self.p.d)),
        }
    }

    fn product(&mut self, kind: ClassTag) -> ProductCircuit {
        let m = self.r.gen_range(1..=self.p.factors.max(1));
        ProductCircuit::new((0..m).map(|_| self.factor(kind)).collect())
    }

    fn shift_like(&mut self, kind: ClassTag) -> Factor {
        let f = self.f;
        let c = match self.r.gen_range(0..3) {
            0 => Factor::constant(f, self.nonzero_coef()),
            _ => {
                let v = self.var();
                Factor::Uni(SumUni::new(f, vec![self.uni(v, self.p.d.min(self.p.delta.max(1)))]))
            }
        };
        self.as_kind(kind, c)
    }

    fn as_kind(&self, kind: ClassTag, g: Factor) -> Factor {
        match (kind, g) {
            (ClassTag::Spsp, g) => {
                let p = g.to_sparse(self.f);
                Factor::Sparse(SparseCircuit::new(p, self.p.delta).expect("degree within delta"))
            }
            (_, g) => g,
        }
    }

    /// `g1·G - (g1 + c)·G + c·G` with `c` constant or univariate, padded by `±T` pairs.
    fn zero_topsum(&mut self, kind: ClassTag) -> Result<TopSumCircuit> {
        let f = self.f;
        let k = self.p.k.max(1);
        let mut terms = vec![];
        if k == 1 {
            let mut t = self.product(kind);
            t.factors.push(self.as_kind(kind, Factor::constant(f, 0)));
            terms.push(t);
        } else {
            let triple = k % 2 == 1;
            let rest = if triple { k - 3 } else { k };
            if triple {
                let g1 = self.factor(kind);
                let tail: Vec<Factor> =
                    (0..self.r.gen_range(0..self.p.factors.max(1))).map(|_| self.factor(kind)).collect();
                let c = self.shift_like(kind);
                let g1c = self.as_kind(kind, g1.add(f, &c));
                let mut t1 = vec![g1];
                let mut t2 = vec![g1c.scale(f, f.neg(1))];
                let mut t3 = vec![c];
                for g in &tail {
                    t1.push(g.clone());
                    t2.push(g.clone());
                    t3.push(g.clone());
                }
                for t in [&mut t1, &mut t2, &mut t3] {
                    t.shuffle(&mut self.r);
                }
                terms.extend([t1, t2, t3].map(ProductCircuit::new));
            }
            for _ in 0..rest / 2 {
                let t = self.product(kind);
                let mut neg = t.clone();
                let i = self.r.gen_range(0..neg.factors.len());
                neg.factors[i] = neg.factors[i].scale(f, f.neg(1));
                neg.factors.shuffle(&mut self.r);
                terms.push(t);
                terms.push(neg);
            }
        }
        terms.shuffle(&mut self.r);
        TopSumCircuit::new(terms)
    }

    fn powersum(&mut self, force_zero: bool) -> Result<PowerSumCircuit> {
        let f = self.f;
        let bdeg = self.p.delta.clamp(1, 2);
        if !force_zero {
            let summands = (0..self.p.k.max(1))
                .map(|_| Summand {
                    coef: self.nonzero_coef(),
                    base: Factor::Uni(self.nonzero_sumuni(bdeg)),
                    exp: self.r.gen_range(1..=self.p.d.max(1)),
                })
                .collect();
            return Ok(PowerSumCircuit { summands });
        }
        let e = self.r.gen_range(1..=self.p.d.max(1));
        let u1 = Factor::Uni(self.nonzero_sumuni(bdeg));
        let u2 = Factor::Uni(self.nonzero_sumuni(bdeg));
        let mut out = PowerSumCircuit::single(1, u1.add(f, &u2), e);
        for i in 0..=e {
            let w = waring_bases(f, &[(u1.clone(), i), (u2.clone(), e - i)])?;
            out = out.plus(&w.scale(f, f.neg(f.binomial(e as u64, i as u64))));
        }
        out.summands.shuffle(&mut self.r);
        Ok(out)
    }

    fn roabp(&mut self, force_zero: bool) -> Result<Roabp> {
        let f = self.f;
        let w = self.p.k.max(1) as usize;
        let mut order: Vec<u32> = (1..=self.p.n.max(1)).collect();
        order.shuffle(&mut self.r);
        let layer = |g: &mut Self, v: u32| -> Vec<UniPoly> {
            (0..w * w)
                .map(|_| {
                    if g.r.gen_bool(0.3) {
                        UniPoly::zero(v)
                    } else {
                        let deg = g.r.gen_range(0..=g.p.d);
                        UniPoly::new(f, v, (0..=deg).map(|_| g.coef()).collect())
                    }
                })
                .collect()
        };
        let layers: Vec<Vec<UniPoly>> = order.iter().map(|&v| layer(self, v)).collect();
        let left: Vec<u64> = (0..w).map(|_| self.coef()).collect();
        let right: Vec<u64> = (0..w).map(|_| self.coef()).collect();
        if !force_zero {
            return Roabp::new(w, order, layers, left, right);
        }
        // block diagonal copy with a negated boundary
        let w2 = 2 * w;
        let doubled = order
            .iter()
            .zip(&layers)
            .map(|(&v, l)| {
                let mut m = vec![UniPoly::zero(v); w2 * w2];
                for r in 0..w {
                    for c in 0..w {
                        m[r * w2 + c] = l[r * w + c].clone();
                        m[(r + w) * w2 + c + w] = l[r * w + c].clone();
                    }
                }
                m
            })
            .collect();
        let left2 = left.iter().copied().chain(left.iter().map(|&c| f.neg(c))).collect();
        let right2 = right.iter().copied().chain(right.iter().copied()).collect();
        Roabp::new(w2, order, doubled, left2, right2)
    }

    fn expr(&mut self, class: ClassTag, force_zero: bool) -> Result<CircuitExpr> {
        let f = self.f;
        Ok(match class {
            ClassTag::Spsu | ClassTag::Spsp => {
                if force_zero {
                    CircuitExpr::TopSum(self.zero_topsum(class)?)
                } else {
                    CircuitExpr::TopSum(TopSumCircuit::new((0..self.p.k.max(1)).map(|_| self.product(class)).collect())?)
                }
            }
            ClassTag::ProdSparse | ClassTag::ProdSumuni => {
                let mut t = self.product(class);
                if force_zero {
                    let i = self.r.gen_range(0..=t.factors.len());
                    let zero = match class {
                        ClassTag::ProdSparse => Factor::Sparse(SparseCircuit::new(SparsePoly::zero(f), self.p.delta)?),
                        _ => Factor::constant(f, 0),
                    };
                    t.factors.insert(i, zero);
                }
                CircuitExpr::Product(t)
            }
            ClassTag::PowerSum => CircuitExpr::PowerSum(self.powersum(force_zero)?),
            ClassTag::Roabp => CircuitExpr::Roabp(self.roabp(force_zero)?),
            ClassTag::Sparse => {
                let p = if force_zero { SparsePoly::zero(f) } else { self.sparse_poly(self.p.delta, self.p.sparsity) };
                CircuitExpr::Sparse(SparseCircuit::new(p, self.p.delta)?)
            }
        })
    }
}

/// A seeded random member of `class`; forced zeros are checked by expansion before they are returned.
pub fn gen_random(f: Fp, class: ClassTag, params: &GenParams, seed: u64, force_zero: bool) -> Result<Circuit> {
    let mut g = Gen { f, p: params, r: rng(seed) };
    for _ in 0..RETRY_CAP {
        let c = Circuit::new(f, g.expr(class, force_zero)?);
        if !force_zero || brute_zero_test(&c)?.outcome == Outcome::Zero {
            return Ok(c);
        }
    }
    Err(Error::RetryCap(RETRY_CAP))
}

/// Like [`gen_random`] but retries until the oracle says nonzero.
pub fn gen_nonzero(f: Fp, class: ClassTag, params: &GenParams, seed: u64) -> Result<Circuit> {
    let mut r = rng(seed);
    for _ in 0..RETRY_CAP {
        let c = gen_random(f, class, params, r.gen(), false)?;
        if brute_zero_test(&c)?.outcome == Outcome::NonZero {
            return Ok(c);
        }
    }
    Err(Error::RetryCap(RETRY_CAP))
}
