//! Circuit IR for the depth-4 classes, evaluation, size accounting and the
//! brute-force expansion used as ground truth.

pub mod text;

pub use text::{parse_circuit, serialize_circuit};

use crate::error::{Error, Result};
use crate::field::Fp;
use crate::poly::{SparsePoly, UniPoly};
use std::fmt;

pub const DEFAULT_EXPANSION_CAP: usize = 1_000_000;
pub const CAP_ENV: &str = "PITKIT_EXPANSION_CAP";

pub fn expansion_cap() -> usize {
    std::env::var(CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_EXPANSION_CAP)
}

/// `g_1(x_1) + ... + g_n(x_n)`, at most one univariate per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SumUni {
    unis: Vec<UniPoly>,
}

impl SumUni {
    pub fn new(f: Fp, unis: Vec<UniPoly>) -> SumUni {
        let mut merged: Vec<UniPoly> = Vec::new();
        for u in unis {
            match merged.iter_mut().find(|m| m.var == u.var) {
                Some(m) => *m = m.add(f, &u),
                None => merged.push(u),
            }
        }
        merged.retain(|u| !u.is_zero());
        merged.sort_by_key(|u| u.var);
        SumUni { unis: merged }
    }

    pub fn constant(f: Fp, c: u64) -> SumUni {
        SumUni::new(f, vec![UniPoly::new(f, 1, vec![c])])
    }

    /// The linear form `sum c_i x_i`.
    pub fn linear(f: Fp, coeffs: &[(u32, u64)]) -> SumUni {
        SumUni::new(f, coeffs.iter().map(|&(v, c)| UniPoly::new(f, v, vec![0, c])).collect())
    }

    pub fn unis(&self) -> &[UniPoly] {
        &self.unis
    }

    pub fn degree(&self) -> u32 {
        self.unis.iter().map(|u| u.degree() as u32).max().unwrap_or(0)
    }

    pub fn to_sparse(&self, f: Fp) -> SparsePoly {
        self.unis.iter().fold(SparsePoly::zero(f), |acc, u| acc.add(&u.to_sparse(f)))
    }

    pub fn eval(&self, f: Fp, val: &dyn Fn(u32) -> Option<u64>) -> Result<u64> {
        let mut s = 0;
        for u in &self.unis {
            if u.degree() == 0 {
                s = f.add(s, u.coeff(0));
                continue;
            }
            s = f.add(s, u.eval(f, val(u.var).ok_or(Error::MissingAssignment(u.var))?));
        }
        Ok(s)
    }

    pub fn scale(&self, f: Fp, c: u64) -> SumUni {
        SumUni::new(f, self.unis.iter().map(|u| u.scale(f, c)).collect())
    }

    pub fn add(&self, f: Fp, o: &SumUni) -> SumUni {
        SumUni::new(f, self.unis.iter().chain(&o.unis).cloned().collect())
    }
}

/// A sparse polynomial of total degree at most `delta`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparseCircuit {
    poly: SparsePoly,
    delta: u32,
}

impl SparseCircuit {
    pub fn new(poly: SparsePoly, delta: u32) -> Result<SparseCircuit> {
        if poly.degree() > delta {
            return Err(Error::DegreeBound { got: poly.degree(), bound: delta });
        }
        Ok(SparseCircuit { poly, delta })
    }

    pub fn poly(&self) -> &SparsePoly {
        &self.poly
    }

    pub fn delta(&self) -> u32 {
        self.delta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    SumUni,
    Sparse,
}

/// A bottom `ΣΠ^[δ]` or `Σ∧` node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Factor {
    Uni(SumUni),
    Sparse(SparseCircuit),
}

impl Factor {
    pub fn kind(&self) -> FactorKind {
        match self {
            Factor::Uni(_) => FactorKind::SumUni,
            Factor::Sparse(_) => FactorKind::Sparse,
        }
    }

    pub fn constant(f: Fp, c: u64) -> Factor {
        Factor::Uni(SumUni::constant(f, c))
    }

    pub fn sparse(p: SparsePoly) -> Factor {
        let d = p.degree();
        Factor::Sparse(SparseCircuit { poly: p, delta: d })
    }

    /// Sum-of-univariates when every monomial touches at most one variable.
    pub fn from_sparse(p: SparsePoly) -> Factor {
        let f = p.field();
        if p.terms().iter().all(|(m, _)| m.vars().count() <= 1) {
            let mut by_var: Vec<(u32, Vec<u64>)> = vec![];
            for &(m, c) in p.terms() {
                let (v, e) = m.vars().next().unwrap_or((1, 0));
                let slot = match by_var.iter().position(|(w, _)| *w == v) {
                    Some(i) => i,
                    None => {
                        by_var.push((v, vec![]));
                        by_var.len() - 1
                    }
                };
                let cs = &mut by_var[slot].1;
                if cs.len() <= e as usize {
                    cs.resize(e as usize + 1, 0);
                }
                cs[e as usize] = f.add(cs[e as usize], c);
            }
            return Factor::Uni(SumUni::new(f, by_var.into_iter().map(|(v, cs)| UniPoly::new(f, v, cs)).collect()));
        }
        Factor::sparse(p)
    }

    pub fn to_sparse(&self, f: Fp) -> SparsePoly {
        match self {
            Factor::Uni(s) => s.to_sparse(f),
            Factor::Sparse(s) => s.poly.clone(),
        }
    }

    /// Substitute the constant `c` for variable `v`.
    pub fn eval_var(&self, f: Fp, v: u32, c: u64) -> Factor {
        match self {
            Factor::Uni(s) => Factor::Uni(SumUni::new(
                f,
                s.unis
                    .iter()
                    .map(|u| if u.var == v { UniPoly::new(f, 1, vec![u.eval(f, c)]) } else { u.clone() })
                    .collect(),
            )),
            Factor::Sparse(s) => Factor::from_sparse(s.poly.eval_var(v, c)),
        }
    }

    pub fn degree(&self) -> u32 {
        match self {
            Factor::Uni(s) => s.degree(),
            Factor::Sparse(s) => s.poly.degree(),
        }
    }

    pub fn size(&self, f: Fp) -> usize {
        let p = self.to_sparse(f);
        p.sparsity() + p.degree() as usize
    }

    pub fn eval_with(&self, f: Fp, val: &dyn Fn(u32) -> Option<u64>) -> Result<u64> {
        match self {
            Factor::Uni(s) => s.eval(f, val),
            Factor::Sparse(s) => s.poly.eval_with(val),
        }
    }

    /// Constant value when the factor is a scalar.
    pub fn as_constant(&self, f: Fp) -> Option<u64> {
        let p = self.to_sparse(f);
        p.is_constant().then(|| p.constant_term())
    }

    pub fn scale(&self, f: Fp, c: u64) -> Factor {
        match self {
            Factor::Uni(s) => Factor::Uni(s.scale(f, c)),
            Factor::Sparse(s) => Factor::Sparse(SparseCircuit { poly: s.poly.scale(c), delta: s.delta }),
        }
    }

    /// Sum of two factors; stays sum-of-univariates when both are.
    pub fn add(&self, f: Fp, o: &Factor) -> Factor {
        match (self, o) {
            (Factor::Uni(a), Factor::Uni(b)) => Factor::Uni(a.add(f, b)),
            _ => {
                let p = self.to_sparse(f).add(&o.to_sparse(f));
                let delta = self.delta_like().max(o.delta_like()).max(p.degree());
                Factor::Sparse(SparseCircuit { poly: p, delta })
            }
        }
    }

    fn delta_like(&self) -> u32 {
        match self {
            Factor::Uni(s) => s.degree(),
            Factor::Sparse(s) => s.delta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Summand {
    pub coef: u64,
    pub base: Factor,
    pub exp: u32,
}

/// `sum c_i f_i^{e_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PowerSumCircuit {
    pub summands: Vec<Summand>,
}

impl PowerSumCircuit {
    pub fn zero() -> Self {
        PowerSumCircuit { summands: vec![] }
    }

    pub fn constant(f: Fp, c: u64) -> Self {
        Self::single(c, Factor::constant(f, 1), 1)
    }

    pub fn single(coef: u64, base: Factor, exp: u32) -> Self {
        PowerSumCircuit { summands: vec![Summand { coef, base, exp }] }
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn scale(&self, f: Fp, c: u64) -> Self {
        PowerSumCircuit {
            summands: self
                .summands
                .iter()
                .map(|s| Summand { coef: f.mul(s.coef, c), ..s.clone() })
                .filter(|s| s.coef != 0)
                .collect(),
        }
    }

    pub fn plus(&self, o: &PowerSumCircuit) -> Self {
        PowerSumCircuit { summands: self.summands.iter().chain(&o.summands).cloned().collect() }
    }

    pub fn max_exp(&self) -> u32 {
        self.summands.iter().map(|s| s.exp).max().unwrap_or(0)
    }

    pub fn degree_bound(&self) -> u32 {
        self.summands.iter().map(|s| s.base.degree() * s.exp).max().unwrap_or(0)
    }

    /// Upper bound on the degree in variable `v`.
    pub fn degree_bound_in(&self, f: Fp, v: u32) -> u32 {
        self.summands.iter().map(|s| s.base.to_sparse(f).degree_in(v) * s.exp).max().unwrap_or(0)
    }

    pub fn all_bases_sumuni(&self) -> bool {
        self.summands.iter().all(|s| s.base.kind() == FactorKind::SumUni)
    }

    pub fn eval_with(&self, f: Fp, val: &dyn Fn(u32) -> Option<u64>) -> Result<u64> {
        let mut acc = 0;
        for s in &self.summands {
            let b = s.base.eval_with(f, val)?;
            acc = f.add(acc, f.mul(s.coef, f.pow(b, s.exp as u64)));
        }
        Ok(acc)
    }

    pub fn expand(&self, f: Fp, cap: usize) -> Result<SparsePoly> {
        let mut acc = SparsePoly::zero(f);
        for s in &self.summands {
            let b = s.base.to_sparse(f);
            let p = capped_pow(&b, s.exp, cap)?;
            acc = acc.add(&p.scale(s.coef));
            if acc.sparsity() > cap {
                return Err(Error::ExpansionCap(cap));
            }
        }
        Ok(acc)
    }

    /// Expansion truncated modulo `v^n`; a cheaper oracle for series work.
    pub fn expand_trunc(&self, f: Fp, v: u32, n: u32) -> SparsePoly {
        let mut acc = SparsePoly::zero(f);
        for s in &self.summands {
            let b = s.base.to_sparse(f);
            acc = acc.add(&b.pow_trunc(s.exp, v, n).scale(s.coef));
        }
        acc
    }

    pub fn size(&self, f: Fp) -> usize {
        self.summands.iter().map(|s| s.base.size(f) + s.exp as usize).sum()
    }
}

/// `prod_j g_j`; the factor list is `L(T)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductCircuit {
    pub factors: Vec<Factor>,
}

impl ProductCircuit {
    pub fn new(factors: Vec<Factor>) -> Self {
        ProductCircuit { factors }
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|g| g.degree()).sum()
    }

    pub fn size(&self, f: Fp) -> usize {
        self.factors.iter().map(|g| g.size(f)).sum()
    }

    pub fn eval_with(&self, f: Fp, val: &dyn Fn(u32) -> Option<u64>) -> Result<u64> {
        let mut acc = 1;
        for g in &self.factors {
            acc = f.mul(acc, g.eval_with(f, val)?);
        }
        Ok(acc)
    }

    pub fn eval(&self, f: Fp, xs: &[u64]) -> Result<u64> {
        self.eval_with(f, &point_fn(xs))
    }

    pub fn expand(&self, f: Fp, cap: usize) -> Result<SparsePoly> {
        let mut acc = SparsePoly::one(f);
        for g in &self.factors {
            acc = capped_mul(&acc, &g.to_sparse(f), cap)?;
        }
        Ok(acc)
    }

    pub fn has_zero_factor(&self, f: Fp) -> bool {
        self.factors.iter().any(|g| g.to_sparse(f).is_zero())
    }

    pub fn max_var(&self, f: Fp) -> u32 {
        self.factors.iter().map(|g| g.to_sparse(f).max_var()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopSumCircuit {
    pub terms: Vec<ProductCircuit>,
}

impl TopSumCircuit {
    pub fn new(terms: Vec<ProductCircuit>) -> Result<Self> {
        let c = TopSumCircuit { terms };
        c.kind()?;
        Ok(c)
    }

    /// The common factor kind; an empty circuit counts as sum-of-univariates.
    pub fn kind(&self) -> Result<FactorKind> {
        let mut kinds = self.terms.iter().flat_map(|t| t.factors.iter().map(|g| g.kind()));
        let first = kinds.next().unwrap_or(FactorKind::SumUni);
        if kinds.any(|k| k != first) {
            return Err(Error::ClassMismatch("mixed factor kinds in one circuit".into()));
        }
        Ok(first)
    }

    pub fn k(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.degree()).max().unwrap_or(0)
    }

    pub fn max_var(&self, f: Fp) -> u32 {
        self.terms.iter().map(|t| t.max_var(f)).max().unwrap_or(0)
    }

    pub fn eval_with(&self, f: Fp, val: &dyn Fn(u32) -> Option<u64>) -> Result<u64> {
        let mut acc = 0;
        for t in &self.terms {
            acc = f.add(acc, t.eval_with(f, val)?);
        }
        Ok(acc)
    }

    pub fn eval(&self, f: Fp, xs: &[u64]) -> Result<u64> {
        self.eval_with(f, &point_fn(xs))
    }

    pub fn expand(&self, f: Fp, cap: usize) -> Result<SparsePoly> {
        let mut acc = SparsePoly::zero(f);
        for t in &self.terms {
            acc = acc.add(&t.expand(f, cap)?);
            if acc.sparsity() > cap {
                return Err(Error::ExpansionCap(cap));
            }
        }
        Ok(acc)
    }
}

/// `left^T · D_1(x_{π1}) ⋯ D_q(x_{πq}) · right` with `w × w` layers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Roabp {
    pub width: usize,
    pub order: Vec<u32>,
    pub layers: Vec<Vec<UniPoly>>,
    pub left: Vec<u64>,
    pub right: Vec<u64>,
}

impl Roabp {
    pub fn new(width: usize, order: Vec<u32>, layers: Vec<Vec<UniPoly>>, left: Vec<u64>, right: Vec<u64>) -> Result<Self> {
        let bad = |m: &str| Err(Error::ClassMismatch(format!("roabp: {m}")));
        if width == 0 || left.len() != width || right.len() != width {
            return bad("boundary vectors must have the declared width");
        }
        if layers.len() != order.len() {
            return bad("one layer per variable in the order");
        }
        let mut seen = order.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != order.len() {
            return bad("variable order repeats a variable");
        }
        for (layer, &v) in layers.iter().zip(&order) {
            if layer.len() != width * width {
                return bad("layer must hold width*width entries");
            }
            if layer.iter().any(|u| u.var != v) {
                return bad("layer entries must be univariate in the layer variable");
            }
        }
        Ok(Roabp { width, order, layers, left, right })
    }

    pub fn entry(&self, layer: usize, r: usize, c: usize) -> &UniPoly {
        &self.layers[layer][r * self.width + c]
    }

    pub fn eval_with(&self, f: Fp, val: &dyn Fn(u32) -> Option<u64>) -> Result<u64> {
        let w = self.width;
        let mut row = self.left.clone();
        for (i, &v) in self.order.iter().enumerate() {
            let x = val(v).ok_or(Error::MissingAssignment(v))?;
            let mut next = vec![0; w];
            for (r, &a) in row.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (c, n) in next.iter_mut().enumerate() {
                    *n = f.add(*n, f.mul(a, self.entry(i, r, c).eval(f, x)));
                }
            }
            row = next;
        }
        Ok(row.iter().zip(&self.right).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b))))
    }

    pub fn expand(&self, f: Fp, cap: usize) -> Result<SparsePoly> {
        let w = self.width;
        let mut row: Vec<SparsePoly> = self.left.iter().map(|&c| SparsePoly::constant(f, c)).collect();
        for i in 0..self.order.len() {
            let mut next = vec![SparsePoly::zero(f); w];
            for (r, a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (c, n) in next.iter_mut().enumerate() {
                    let e = self.entry(i, r, c);
                    if !e.is_zero() {
                        *n = n.add(&capped_mul(a, &e.to_sparse(f), cap)?);
                    }
                }
            }
            row = next;
        }
        Ok(row.iter().zip(&self.right).fold(SparsePoly::zero(f), |acc, (a, &b)| acc.add(&a.scale(b))))
    }

    pub fn size(&self) -> usize {
        self.layers
            .iter()
            .flatten()
            .map(|u| u.coeffs().iter().filter(|&&c| c != 0).count() + u.degree())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CircuitExpr {
    TopSum(TopSumCircuit),
    Product(ProductCircuit),
    PowerSum(PowerSumCircuit),
    SumUni(SumUni),
    Sparse(SparseCircuit),
    Roabp(Roabp),
}

impl CircuitExpr {
    pub fn class_name(&self) -> &'static str {
        match self {
            CircuitExpr::TopSum(t) => match t.kind() {
                Ok(FactorKind::Sparse) => "spsp",
                _ => "spsu",
            },
            CircuitExpr::Product(_) => "product",
            CircuitExpr::PowerSum(_) => "powersum",
            CircuitExpr::SumUni(_) => "sumuni",
            CircuitExpr::Sparse(_) => "sparse",
            CircuitExpr::Roabp(_) => "roabp",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    pub field: Fp,
    pub expr: CircuitExpr,
}

impl Circuit {
    pub fn new(field: Fp, expr: CircuitExpr) -> Self {
        Circuit { field, expr }
    }

    pub fn eval(&self, xs: &[u64]) -> Result<u64> {
        circuit_eval(self, xs)
    }

    /// Number of variables: the largest index used.
    pub fn num_vars(&self) -> u32 {
        let f = self.field;
        match &self.expr {
            CircuitExpr::TopSum(t) => t.max_var(f),
            CircuitExpr::Product(p) => p.max_var(f),
            CircuitExpr::PowerSum(p) => p.summands.iter().map(|s| s.base.to_sparse(f).max_var()).max().unwrap_or(0),
            CircuitExpr::SumUni(s) => s.to_sparse(f).max_var(),
            CircuitExpr::Sparse(s) => s.poly.max_var(),
            CircuitExpr::Roabp(r) => r.order.iter().copied().max().unwrap_or(0),
        }
    }

    /// Syntactic degree bound.
    pub fn degree(&self) -> u32 {
        match &self.expr {
            CircuitExpr::TopSum(t) => t.degree(),
            CircuitExpr::Product(p) => p.degree(),
            CircuitExpr::PowerSum(p) => p.degree_bound(),
            CircuitExpr::SumUni(s) => s.degree(),
            CircuitExpr::Sparse(s) => s.poly.degree(),
            CircuitExpr::Roabp(r) => r
                .layers
                .iter()
                .map(|l| l.iter().map(|u| u.degree()).max().unwrap_or(0) as u32)
                .sum(),
        }
    }
}

pub fn point_fn(xs: &[u64]) -> impl Fn(u32) -> Option<u64> + '_ {
    move |v| if v == 0 { None } else { xs.get(v as usize - 1).copied() }
}

pub fn circuit_eval(c: &Circuit, xs: &[u64]) -> Result<u64> {
    let f = c.field;
    let val = point_fn(xs);
    match &c.expr {
        CircuitExpr::TopSum(t) => t.eval_with(f, &val),
        CircuitExpr::Product(p) => p.eval_with(f, &val),
        CircuitExpr::PowerSum(p) => p.eval_with(f, &val),
        CircuitExpr::SumUni(s) => s.eval(f, &val),
        CircuitExpr::Sparse(s) => s.poly.eval_with(val),
        CircuitExpr::Roabp(r) => r.eval_with(f, &val),
    }
}

pub fn circuit_size(c: &Circuit) -> usize {
    let f = c.field;
    match &c.expr {
        CircuitExpr::TopSum(t) => t.terms.iter().map(|p| p.size(f)).sum(),
        CircuitExpr::Product(p) => p.size(f),
        CircuitExpr::PowerSum(p) => p.size(f),
        CircuitExpr::SumUni(s) => Factor::Uni(s.clone()).size(f),
        CircuitExpr::Sparse(s) => Factor::Sparse(s.clone()).size(f),
        CircuitExpr::Roabp(r) => r.size(),
    }
}

pub fn expand_to_sparse(c: &Circuit) -> Result<SparsePoly> {
    expand_with_cap(c, expansion_cap())
}

pub fn expand_with_cap(c: &Circuit, cap: usize) -> Result<SparsePoly> {
    let f = c.field;
    let p = match &c.expr {
        CircuitExpr::TopSum(t) => t.expand(f, cap)?,
        CircuitExpr::Product(p) => p.expand(f, cap)?,
        CircuitExpr::PowerSum(p) => p.expand(f, cap)?,
        CircuitExpr::SumUni(s) => s.to_sparse(f),
        CircuitExpr::Sparse(s) => s.poly.clone(),
        CircuitExpr::Roabp(r) => r.expand(f, cap)?,
    };
    if p.sparsity() > cap {
        return Err(Error::ExpansionCap(cap));
    }
    Ok(p)
}

pub fn capped_mul(a: &SparsePoly, b: &SparsePoly, cap: usize) -> Result<SparsePoly> {
    if a.sparsity().saturating_mul(b.sparsity()) > cap.saturating_mul(64) {
        return Err(Error::ExpansionCap(cap));
    }
    let p = a.mul(b);
    if p.sparsity() > cap {
        return Err(Error::ExpansionCap(cap));
    }
    Ok(p)
}

pub fn capped_pow(b: &SparsePoly, e: u32, cap: usize) -> Result<SparsePoly> {
    let mut acc = SparsePoly::one(b.field());
    for _ in 0..e {
        acc = capped_mul(&acc, b, cap)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Zero,
    NonZero,
    ProbablyZero,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Point(Vec<u64>),
    Note(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn zero() -> Self {
        Verdict { outcome: Outcome::Zero, witness: None }
    }

    pub fn nonzero_at(point: Vec<u64>) -> Self {
        Verdict { outcome: Outcome::NonZero, witness: Some(Witness::Point(point)) }
    }

    pub fn nonzero_note(note: impl Into<String>) -> Self {
        Verdict { outcome: Outcome::NonZero, witness: Some(Witness::Note(note.into())) }
    }

    pub fn is_zero(&self) -> bool {
        self.outcome != Outcome::NonZero
    }

    pub fn point(&self) -> Option<&[u64]> {
        match &self.witness {
            Some(Witness::Point(p)) => Some(p),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = match self.outcome {
            Outcome::Zero => "zero",
            Outcome::NonZero => "nonzero",
            Outcome::ProbablyZero => "probably-zero",
        };
        match &self.witness {
            None => write!(f, "{o}"),
            Some(Witness::Point(p)) => {
                let s: Vec<String> = p.iter().map(|v| v.to_string()).collect();
                write!(f, "{o} at ({})", s.join(", "))
            }
            Some(Witness::Note(n)) => write!(f, "{o} [{n}]"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> Fp {
        Fp::with_modulus(p).unwrap()
    }

    fn lin(f: Fp, c: &[(u32, i64)]) -> Factor {
        Factor::Uni(SumUni::linear(f, &c.iter().map(|&(v, a)| (v, f.from_i64(a))).collect::<Vec<_>>()))
    }

    #[test]
    fn size_examples() {
        let f = fp(101);
        let g = lin(f, &[(1, 1), (2, 1)]);
        assert_eq!(ProductCircuit::new(vec![g.clone()]).size(f), 3);
        let h = Factor::Uni(SumUni::new(f, vec![UniPoly::new(f, 1, vec![1, 0, 1])]));
        assert_eq!(ProductCircuit::new(vec![g, h]).size(f), 7);
        assert_eq!(ProductCircuit::new(vec![]).size(f), 0);
    }

    #[test]
    fn eval_examples() {
        let f = fp(7);
        let t1 = ProductCircuit::new(vec![lin(f, &[(1, 1)])]);
        let t2 = ProductCircuit::new(vec![lin(f, &[(1, -1)])]);
        let c = Circuit::new(f, CircuitExpr::TopSum(TopSumCircuit::new(vec![t1, t2]).unwrap()));
        assert_eq!(c.eval(&[3]).unwrap(), 0);
        let r = Roabp::new(
            1,
            vec![1, 2],
            vec![vec![UniPoly::new(f, 1, vec![0, 1])], vec![UniPoly::new(f, 2, vec![0, 1])]],
            vec![1],
            vec![1],
        )
        .unwrap();
        let c = Circuit::new(f, CircuitExpr::Roabp(r));
        assert_eq!(c.eval(&[2, 3]).unwrap(), 6);
    }

    #[test]
    fn expand_examples() {
        let f = fp(101);
        let x = |i| SparsePoly::var(f, i);
        let s = lin(f, &[(1, 1), (2, 1)]);
        let d = lin(f, &[(1, 1), (2, -1)]);
        let ps = Circuit::new(f, CircuitExpr::PowerSum(PowerSumCircuit::single(1, s.clone(), 2)));
        assert_eq!(
            expand_to_sparse(&ps).unwrap(),
            x(1).pow(2).add(&x(1).mul(&x(2)).scale(2)).add(&x(2).pow(2))
        );
        let prod = ProductCircuit::new(vec![s, d]);
        let diff = x(1).pow(2).sub(&x(2).pow(2));
        assert_eq!(prod.expand(f, 100).unwrap(), diff);
        let neg = ProductCircuit::new(vec![Factor::sparse(diff.neg())]);
        let zero = Circuit::new(f, CircuitExpr::TopSum(TopSumCircuit { terms: vec![prod, neg] }));
        assert!(expand_to_sparse(&zero).unwrap().is_zero());
    }

    #[test]
    fn expansion_cap_is_hard() {
        let f = fp(101);
        let g = Factor::Uni(SumUni::linear(f, &[(1, 1), (2, 1), (3, 1), (4, 1)]));
        let c = Circuit::new(f, CircuitExpr::PowerSum(PowerSumCircuit::single(1, g, 6)));
        assert_eq!(expand_with_cap(&c, 20), Err(Error::ExpansionCap(20)));
        assert_eq!(expand_with_cap(&c, 1000).unwrap().sparsity(), 84);
    }

    #[test]
    fn single_term_zero_iff_zero_factor() {
        let f = fp(101);
        let zero = Factor::Uni(SumUni::new(f, vec![UniPoly::new(f, 2, vec![0])]));
        let t = ProductCircuit::new(vec![lin(f, &[(1, 1)]), zero]);
        assert!(t.has_zero_factor(f));
        assert!(t.expand(f, 100).unwrap().is_zero());
    }
}
