//! Sparse multivariate polynomials over F_p, dense univariates, rational
//! functions and truncated power series in a distinguished variable.
//!
//! Variables are numbered from 1 (`x1, x2, ...`); index 0 is reserved for the
//! series variable `z` used by the shift maps.

use crate::error::{Error, Result};
use crate::field::Fp;
use rustc_hash::FxHashMap;
use std::cmp::Ordering;
use std::fmt;

pub const MAX_VARS: u32 = 16;
pub const MAX_EXP: u32 = 255;
pub const Z: u32 = 0;

/// Exponent vector packed one byte per variable; variable 0 occupies the most
/// significant byte so that integer order on equal degrees is lex order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial(u128);

#[inline]
fn shift(v: u32) -> u32 {
    8 * (MAX_VARS - 1 - v)
}

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn var(v: u32, e: u32) -> Result<Monomial> {
        Monomial::ONE.with_exp(v, e)
    }

    pub fn from_exps(exps: &[(u32, u32)]) -> Result<Monomial> {
        let mut m = Monomial::ONE;
        for &(v, e) in exps {
            m = m.with_exp(v, m.exp(v) + e)?;
        }
        Ok(m)
    }

    pub fn with_exp(self, v: u32, e: u32) -> Result<Monomial> {
        if v >= MAX_VARS || e > MAX_EXP {
            return Err(Error::MonomialOverflow { max_vars: MAX_VARS, max_exp: MAX_EXP });
        }
        let s = shift(v);
        Ok(Monomial((self.0 & !(0xffu128 << s)) | ((e as u128) << s)))
    }

    #[inline]
    pub fn exp(self, v: u32) -> u32 {
        ((self.0 >> shift(v)) & 0xff) as u32
    }

    #[inline]
    pub fn degree(self) -> u32 {
        self.0.to_be_bytes().iter().map(|&b| b as u32).sum()
    }

    pub fn vars(self) -> impl Iterator<Item = (u32, u32)> {
        (0..MAX_VARS).filter_map(move |v| {
            let e = self.exp(v);
            (e > 0).then_some((v, e))
        })
    }

    pub fn max_exp(self) -> u32 {
        self.0.to_be_bytes().iter().map(|&b| b as u32).max().unwrap()
    }

    /// Caller guarantees no exponent exceeds `MAX_EXP`.
    #[inline]
    pub fn mul_unchecked(self, o: Monomial) -> Monomial {
        Monomial(self.0 + o.0)
    }

    pub fn mul(self, o: Monomial) -> Result<Monomial> {
        let mut m = self;
        for (v, e) in o.vars() {
            m = m.with_exp(v, m.exp(v) + e)?;
        }
        Ok(m)
    }

    pub fn without(self, v: u32) -> Monomial {
        Monomial(self.0 & !(0xffu128 << shift(v)))
    }

    pub fn is_one(self) -> bool {
        self.0 == 0
    }

    fn key(self) -> (u32, u128) {
        (self.degree(), self.0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.key().cmp(&o.key())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

pub fn var_name(v: u32) -> String {
    if v == Z {
        "z".into()
    } else {
        format!("x{v}")
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .vars()
            .map(|(v, e)| if e == 1 { var_name(v) } else { format!("{}^{e}", var_name(v)) })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Canonical sparse polynomial: terms sorted ascending in graded lex order,
/// no zero coefficients, no repeated monomials.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparsePoly {
    field: Fp,
    terms: Vec<(Monomial, u64)>,
}

impl SparsePoly {
    pub fn zero(field: Fp) -> Self {
        SparsePoly { field, terms: Vec::new() }
    }

    pub fn constant(field: Fp, c: u64) -> Self {
        Self::monomial(field, Monomial::ONE, c)
    }

    pub fn one(field: Fp) -> Self {
        Self::constant(field, 1)
    }

    pub fn var(field: Fp, v: u32) -> Self {
        Self::monomial(field, Monomial::var(v, 1).expect("variable index in range"), 1)
    }

    pub fn monomial(field: Fp, m: Monomial, c: u64) -> Self {
        let c = field.from_u64(c);
        let terms = if c == 0 { vec![] } else { vec![(m, c)] };
        SparsePoly { field, terms }
    }

    pub fn from_terms(field: Fp, terms: impl IntoIterator<Item = (Monomial, u64)>) -> Self {
        let mut acc: FxHashMap<Monomial, u64> = FxHashMap::default();
        for (m, c) in terms {
            let e = acc.entry(m).or_insert(0);
            *e = field.add(*e, field.from_u64(c));
        }
        Self::from_map(field, acc)
    }

    fn from_map(field: Fp, acc: FxHashMap<Monomial, u64>) -> Self {
        let mut terms: Vec<(Monomial, u64)> = acc.into_iter().filter(|&(_, c)| c != 0).collect();
        terms.sort_unstable_by_key(|&(m, _)| m.key());
        SparsePoly { field, terms }
    }

    fn from_sorted(field: Fp, terms: Vec<(Monomial, u64)>) -> Self {
        SparsePoly { field, terms }
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn terms(&self) -> &[(Monomial, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn sparsity(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.last().map_or(0, |(m, _)| m.degree())
    }

    pub fn degree_in(&self, v: u32) -> u32 {
        self.terms.iter().map(|(m, _)| m.exp(v)).max().unwrap_or(0)
    }

    pub fn max_exp(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.max_exp()).max().unwrap_or(0)
    }

    pub fn vars(&self) -> Vec<u32> {
        let mut all = 0u128;
        for (m, _) in &self.terms {
            all |= m.0;
        }
        Monomial(all).vars().map(|(v, _)| v).collect()
    }

    pub fn max_var(&self) -> u32 {
        self.vars().last().copied().unwrap_or(0)
    }

    pub fn coeff(&self, m: Monomial) -> u64 {
        self.terms
            .binary_search_by_key(&m.key(), |(t, _)| t.key())
            .map_or(0, |i| self.terms[i].1)
    }

    pub fn constant_term(&self) -> u64 {
        self.coeff(Monomial::ONE)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    fn check(&self, o: &SparsePoly) {
        assert_eq!(self.field, o.field, "field mismatch");
    }

    pub fn add(&self, o: &SparsePoly) -> SparsePoly {
        self.check(o);
        let f = self.field;
        let (a, b) = (&self.terms, &o.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    let c = f.add(a[i].1, b[j].1);
                    if c != 0 {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Self::from_sorted(f, out)
    }

    pub fn neg(&self) -> SparsePoly {
        let f = self.field;
        Self::from_sorted(f, self.terms.iter().map(|&(m, c)| (m, f.neg(c))).collect())
    }

    pub fn sub(&self, o: &SparsePoly) -> SparsePoly {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: u64) -> SparsePoly {
        let f = self.field;
        let c = f.from_u64(c);
        if c == 0 {
            return Self::zero(f);
        }
        Self::from_sorted(f, self.terms.iter().map(|&(m, a)| (m, f.mul(a, c))).collect())
    }

    pub fn mul(&self, o: &SparsePoly) -> SparsePoly {
        self.mul_trunc(o, Z, u32::MAX)
    }

    /// Product with every term of degree `>= n` in variable `v` discarded.
    pub fn mul_trunc(&self, o: &SparsePoly, v: u32, n: u32) -> SparsePoly {
        self.check(o);
        let f = self.field;
        if self.is_zero() || o.is_zero() {
            return Self::zero(f);
        }
        assert!(
            self.max_exp() + o.max_exp() <= MAX_EXP,
            "exponent overflow in product (limit {MAX_EXP})"
        );
        if self.is_constant() {
            return o.scale(self.terms[0].1).truncate_in(v, n);
        }
        if o.is_constant() {
            return self.scale(o.terms[0].1).truncate_in(v, n);
        }
        let mut acc: FxHashMap<Monomial, u64> = FxHashMap::default();
        acc.reserve(self.terms.len().max(o.terms.len()) * 2);
        for &(ma, ca) in &self.terms {
            let ea = ma.exp(v);
            if ea >= n {
                continue;
            }
            for &(mb, cb) in &o.terms {
                if ea + mb.exp(v) >= n {
                    continue;
                }
                let e = acc.entry(ma.mul_unchecked(mb)).or_insert(0);
                *e = f.add(*e, f.mul(ca, cb));
            }
        }
        Self::from_map(f, acc)
    }

    pub fn pow(&self, e: u32) -> SparsePoly {
        self.pow_trunc(e, Z, u32::MAX)
    }

    pub fn pow_trunc(&self, mut e: u32, v: u32, n: u32) -> SparsePoly {
        let mut base = self.truncate_in(v, n);
        let mut r = Self::one(self.field).truncate_in(v, n);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul_trunc(&base, v, n);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_trunc(&base, v, n);
            }
        }
        r
    }

    pub fn eval_with(&self, val: impl Fn(u32) -> Option<u64>) -> Result<u64> {
        let f = self.field;
        let mut cache: Vec<Option<u64>> = vec![None; MAX_VARS as usize];
        for v in self.vars() {
            cache[v as usize] = Some(f.from_u64(val(v).ok_or(Error::MissingAssignment(v))?));
        }
        let mut s = 0;
        for &(m, c) in &self.terms {
            let mut t = c;
            for (v, e) in m.vars() {
                t = f.mul(t, f.pow(cache[v as usize].unwrap(), e as u64));
            }
            s = f.add(s, t);
        }
        Ok(s)
    }

    /// `xs[i-1]` is the value of `x_i`.
    pub fn eval(&self, xs: &[u64]) -> Result<u64> {
        self.eval_with(|v| if v == Z { None } else { xs.get(v as usize - 1).copied() })
    }

    pub fn eval_z(&self, z: u64, xs: &[u64]) -> Result<u64> {
        self.eval_with(|v| if v == Z { Some(z) } else { xs.get(v as usize - 1).copied() })
    }

    pub fn partial(&self, v: u32) -> SparsePoly {
        let f = self.field;
        Self::from_terms(
            f,
            self.terms.iter().filter(|(m, _)| m.exp(v) > 0).map(|&(m, c)| {
                let e = m.exp(v);
                (m.with_exp(v, e - 1).unwrap(), f.mul(c, f.from_u64(e as u64)))
            }),
        )
    }

    /// Substitute `map(v)` for every variable `v`.
    pub fn compose(&self, map: &dyn Fn(u32) -> SparsePoly) -> SparsePoly {
        let f = self.field;
        let vars = self.vars();
        let images: Vec<(u32, SparsePoly)> = vars.iter().map(|&v| (v, map(v))).collect();
        let mut powers: FxHashMap<(u32, u32), SparsePoly> = FxHashMap::default();
        let mut out = Self::zero(f);
        for &(m, c) in &self.terms {
            let mut t = Self::constant(f, c);
            for (v, e) in m.vars() {
                let p = powers
                    .entry((v, e))
                    .or_insert_with(|| images.iter().find(|(w, _)| *w == v).unwrap().1.pow(e));
                t = t.mul(p);
            }
            out = out.add(&t);
        }
        out
    }

    pub fn substitute(&self, v: u32, g: &SparsePoly) -> SparsePoly {
        let f = self.field;
        self.compose(&|w| if w == v { g.clone() } else { SparsePoly::var(f, w) })
    }

    pub fn eval_var(&self, v: u32, c: u64) -> SparsePoly {
        let f = self.field;
        let c = f.from_u64(c);
        Self::from_terms(
            f,
            self.terms.iter().map(|&(m, a)| (m.without(v), f.mul(a, f.pow(c, m.exp(v) as u64)))),
        )
    }

    pub fn map_vars(&self, map: &dyn Fn(u32) -> u32) -> Result<SparsePoly> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for &(m, c) in &self.terms {
            let mut n = Monomial::ONE;
            for (v, e) in m.vars() {
                let w = map(v);
                n = n.with_exp(w, n.exp(w) + e)?;
            }
            terms.push((n, c));
        }
        Ok(Self::from_terms(self.field, terms))
    }

    /// Largest `e` with `v^e` dividing the polynomial; `None` for zero.
    pub fn valuation_in(&self, v: u32) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.exp(v)).min()
    }

    /// Coefficient of `v^e`, a polynomial free of `v`.
    pub fn coeff_in(&self, v: u32, e: u32) -> SparsePoly {
        Self::from_sorted(
            self.field,
            self.terms
                .iter()
                .filter(|(m, _)| m.exp(v) == e)
                .map(|&(m, c)| (m.without(v), c))
                .collect::<Vec<_>>(),
        )
        .resorted()
    }

    fn resorted(mut self) -> Self {
        self.terms.sort_unstable_by_key(|&(m, _)| m.key());
        self
    }

    pub fn truncate_in(&self, v: u32, n: u32) -> SparsePoly {
        if n == u32::MAX {
            return self.clone();
        }
        Self::from_sorted(
            self.field,
            self.terms.iter().filter(|(m, _)| m.exp(v) < n).copied().collect(),
        )
    }

    /// Divide by `v^c`; panics if not divisible.
    pub fn div_var_pow(&self, v: u32, c: u32) -> SparsePoly {
        if c == 0 {
            return self.clone();
        }
        Self::from_sorted(
            self.field,
            self.terms
                .iter()
                .map(|&(m, a)| {
                    let e = m.exp(v);
                    assert!(e >= c, "not divisible by {}^{c}", var_name(v));
                    (m.with_exp(v, e - c).unwrap(), a)
                })
                .collect::<Vec<_>>(),
        )
        .resorted()
    }

    pub fn mul_var_pow(&self, v: u32, c: u32) -> Result<SparsePoly> {
        let m = Monomial::var(v, c)?;
        let mut terms = Vec::with_capacity(self.terms.len());
        for &(t, a) in &self.terms {
            terms.push((t.mul(m)?, a));
        }
        Ok(Self::from_sorted(self.field, terms).resorted())
    }

    pub fn to_string_with(&self, name: &dyn Fn(u32) -> String) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let f = self.field;
        let mut s = String::new();
        for (i, &(m, c)) in self.terms.iter().rev().enumerate() {
            let c = f.signed(c);
            let (neg, a) = (c < 0, c.unsigned_abs());
            s.push_str(match (i, neg) {
                (0, false) => "",
                (0, true) => "-",
                (_, false) => " + ",
                (_, true) => " - ",
            });
            let mono: Vec<String> = m
                .vars()
                .map(|(v, e)| if e == 1 { name(v) } else { format!("{}^{e}", name(v)) })
                .collect();
            match (a, mono.is_empty()) {
                (_, true) => s.push_str(&a.to_string()),
                (1, false) => s.push_str(&mono.join("*")),
                _ => s.push_str(&format!("{a}*{}", mono.join("*"))),
            }
        }
        s
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_with(&var_name))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

pub fn poly_arith(a: &SparsePoly, b: &SparsePoly, op: ArithOp) -> Result<SparsePoly> {
    if a.field != b.field {
        return Err(Error::FieldMismatch(a.field.modulus(), b.field.modulus()));
    }
    Ok(match op {
        ArithOp::Add => a.add(b),
        ArithOp::Sub => a.sub(b),
        ArithOp::Mul => a.mul(b),
    })
}

/// Dense univariate polynomial `c0 + c1 v + ...` in a single variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UniPoly {
    pub var: u32,
    coeffs: Vec<u64>,
}

impl UniPoly {
    pub fn new(f: Fp, var: u32, coeffs: Vec<u64>) -> UniPoly {
        let mut u = UniPoly { var, coeffs: coeffs.into_iter().map(|c| f.from_u64(c)).collect() };
        u.trim();
        u
    }

    pub fn zero(var: u32) -> UniPoly {
        UniPoly { var, coeffs: vec![] }
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, f: Fp, x: u64) -> u64 {
        self.coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn add(&self, f: Fp, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        UniPoly::new(f, self.var, (0..n).map(|i| f.add(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn scale(&self, f: Fp, c: u64) -> UniPoly {
        UniPoly::new(f, self.var, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, f: Fp, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero(self.var);
        }
        let mut out = vec![0; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        UniPoly::new(f, self.var, out)
    }

    pub fn pow(&self, f: Fp, e: u32) -> UniPoly {
        let mut r = UniPoly::new(f, self.var, vec![1]);
        for _ in 0..e {
            r = r.mul(f, self);
        }
        r
    }

    pub fn to_sparse(&self, f: Fp) -> SparsePoly {
        SparsePoly::from_terms(
            f,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| (Monomial::var(self.var, i as u32).expect("degree in range"), c)),
        )
    }
}

/// Lagrange interpolation through `(x, y)` pairs; result lives in `var`.
pub fn interpolate(f: Fp, var: u32, points: &[(u64, u64)]) -> Result<UniPoly> {
    let xs: Vec<u64> = points.iter().map(|&(x, _)| f.from_u64(x)).collect();
    for i in 0..xs.len() {
        if xs[..i].contains(&xs[i]) {
            return Err(Error::DuplicateAbscissa(xs[i]));
        }
    }
    let basis = lagrange_basis(f, &xs);
    let mut out = vec![0; xs.len()];
    for (b, &(_, y)) in basis.iter().zip(points) {
        for (o, &c) in out.iter_mut().zip(b) {
            *o = f.add(*o, f.mul(c, f.from_u64(y)));
        }
    }
    Ok(UniPoly::new(f, var, out))
}

/// Coefficient vectors of the Lagrange basis polynomials on distinct nodes.
pub fn lagrange_basis(f: Fp, xs: &[u64]) -> Vec<Vec<u64>> {
    let n = xs.len();
    // full = prod (y - x_j)
    let mut full = vec![1u64];
    for &x in xs {
        let mut next = vec![0; full.len() + 1];
        for (i, &c) in full.iter().enumerate() {
            next[i + 1] = f.add(next[i + 1], c);
            next[i] = f.sub(next[i], f.mul(c, x));
        }
        full = next;
    }
    xs.iter()
        .map(|&xi| {
            // synthetic division of full by (y - xi)
            let mut q = vec![0; n];
            let mut carry = 0;
            for i in (0..n).rev() {
                carry = f.add(full[i + 1], f.mul(carry, xi));
                q[i] = carry;
            }
            let denom = xs.iter().filter(|&&x| x != xi).fold(1, |a, &x| f.mul(a, f.sub(xi, x)));
            let inv = f.inv(denom);
            q.iter().map(|&c| f.mul(c, inv)).collect()
        })
        .collect()
}

/// `num / den` with no automatic reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    pub num: SparsePoly,
    pub den: SparsePoly,
}

impl RationalFunction {
    pub fn new(num: SparsePoly, den: SparsePoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroInput);
        }
        Ok(RationalFunction { num, den })
    }

    pub fn from_poly(p: SparsePoly) -> Self {
        let f = p.field();
        RationalFunction { num: p, den: SparsePoly::one(f) }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn same_value(&self, o: &RationalFunction) -> bool {
        self.num.mul(&o.den) == o.num.mul(&self.den)
    }

    pub fn valuation(&self, v: u32) -> Result<i64> {
        let a = self.num.valuation_in(v).ok_or(Error::ZeroInput)?;
        let b = self.den.valuation_in(v).expect("nonzero denominator");
        Ok(a as i64 - b as i64)
    }
}

/// Power series in `var` modulo `var^prec`, coefficients free of `var`.
#[derive(Debug, Clone)]
pub struct TruncatedSeries {
    pub var: u32,
    pub prec: u32,
    pub coeffs: Vec<RationalFunction>,
}

impl TruncatedSeries {
    /// Coefficients as polynomials when every denominator is a unit.
    pub fn to_poly(&self) -> Option<SparsePoly> {
        let f = self.coeffs.first()?.num.field();
        let mut out = SparsePoly::zero(f);
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.den.is_constant() {
                return None;
            }
            let p = c.num.scale(f.inv(c.den.constant_term()));
            out = out.add(&p.mul_var_pow(self.var, i as u32).ok()?);
        }
        Some(out)
    }

    pub fn mul(&self, o: &TruncatedSeries) -> TruncatedSeries {
        let f = self.coeffs[0].num.field();
        let n = self.prec.min(o.prec) as usize;
        let coeffs = (0..n)
            .map(|k| {
                let mut acc = RationalFunction::from_poly(SparsePoly::zero(f));
                for i in 0..=k {
                    let (a, b) = (&self.coeffs[i], &o.coeffs[k - i]);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    let num = a.num.mul(&b.num);
                    let den = a.den.mul(&b.den);
                    acc = if acc.den == den {
                        RationalFunction { num: acc.num.add(&num), den }
                    } else {
                        RationalFunction {
                            num: acc.num.mul(&den).add(&num.mul(&acc.den)),
                            den: acc.den.mul(&den),
                        }
                    };
                }
                acc
            })
            .collect();
        TruncatedSeries { var: self.var, prec: n as u32, coeffs }
    }
}

/// Expansion of `f` as a power series in `v` modulo `v^prec`, via the inverse
/// geometric series of the denominator with its `v`-power stripped.
pub fn series_lift(rf: &RationalFunction, v: u32, prec: u32) -> Result<TruncatedSeries> {
    let f = rf.num.field();
    let zero = || RationalFunction::from_poly(SparsePoly::zero(f));
    if rf.num.is_zero() {
        return Ok(TruncatedSeries { var: v, prec, coeffs: (0..prec).map(|_| zero()).collect() });
    }
    let val = rf.valuation(v)?;
    if val < 0 {
        return Err(Error::NegativeValuation(val));
    }
    let a = rf.num.valuation_in(v).unwrap();
    let b = rf.den.valuation_in(v).unwrap();
    let g = rf.num.div_var_pow(v, a);
    let h = rf.den.div_var_pow(v, b);
    let n = prec as usize;
    let hs: Vec<SparsePoly> = (0..n).map(|i| h.coeff_in(v, i as u32)).collect();
    let gs: Vec<SparsePoly> = (0..n).map(|i| g.coeff_in(v, i as u32)).collect();
    let h0 = &hs[0];
    if h0.is_zero() {
        return Err(Error::NegativeValuation(val));
    }
    let mut h0_pows = vec![SparsePoly::one(f)];
    for i in 1..=n {
        let next = h0_pows[i - 1].mul(h0);
        h0_pows.push(next);
    }
    // 1/h = sum r_i / h0^(i+1) v^i
    let mut r: Vec<SparsePoly> = vec![SparsePoly::one(f)];
    for i in 1..n {
        let mut acc = SparsePoly::zero(f);
        for j in 1..=i {
            if hs[j].is_zero() || r[i - j].is_zero() {
                continue;
            }
            acc = acc.add(&hs[j].mul(&r[i - j]).mul(&h0_pows[j - 1]));
        }
        r.push(acc.neg());
    }
    let shift = val as usize;
    let coeffs = (0..n)
        .map(|m| {
            if m < shift {
                return zero();
            }
            let t = m - shift;
            // sum_l g_l r_{t-l} h0^l over h0^(t+1)
            let mut num = SparsePoly::zero(f);
            for l in 0..=t {
                if gs[l].is_zero() || r[t - l].is_zero() {
                    continue;
                }
                num = num.add(&gs[l].mul(&r[t - l]).mul(&h0_pows[l]));
            }
            RationalFunction { num, den: h0_pows[t + 1].clone() }
        })
        .collect();
    Ok(TruncatedSeries { var: v, prec, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fp(p: u64) -> Fp {
        Fp::with_modulus(p).unwrap()
    }

    fn x(f: Fp, i: u32) -> SparsePoly {
        SparsePoly::var(f, i)
    }

    fn c(f: Fp, v: i64) -> SparsePoly {
        SparsePoly::constant(f, f.from_i64(v))
    }

    fn random_poly(f: Fp, rng: &mut ChaCha8Rng, n: u32, deg: u32, terms: usize) -> SparsePoly {
        SparsePoly::from_terms(
            f,
            (0..terms).map(|_| {
                let exps: Vec<(u32, u32)> = (1..=n).map(|v| (v, rng.gen_range(0..=deg))).collect();
                (Monomial::from_exps(&exps).unwrap(), rng.gen_range(0..f.modulus()))
            }),
        )
    }

    #[test]
    fn arith_examples() {
        let f = fp(101);
        let s = x(f, 1).add(&x(f, 2));
        assert_eq!(s.add(&x(f, 2).neg()), x(f, 1));
        assert!(s.mul(&SparsePoly::zero(f)).is_zero());
        let d = x(f, 1).sub(&x(f, 2));
        assert_eq!(s.mul(&d), x(f, 1).pow(2).sub(&x(f, 2).pow(2)));
        let g = fp(103);
        assert_eq!(
            poly_arith(&s, &SparsePoly::var(g, 1), ArithOp::Add),
            Err(Error::FieldMismatch(101, 103))
        );
    }

    #[test]
    fn eval_examples() {
        let f = fp(7);
        assert_eq!(x(f, 1).mul(&x(f, 2)).eval(&[2, 3]).unwrap(), 6);
        assert_eq!(SparsePoly::zero(f).eval(&[5]).unwrap(), 0);
        let g = fp(11);
        assert_eq!(x(g, 1).add(&x(g, 2)).pow(2).eval(&[1, 2]).unwrap(), 9);
        assert_eq!(x(f, 3).eval(&[1, 2]), Err(Error::MissingAssignment(3)));
    }

    #[test]
    fn grlex_order_and_display() {
        let f = fp(101);
        let p = x(f, 2).add(&x(f, 1).pow(2)).add(&c(f, 3)).add(&x(f, 1).mul(&x(f, 2)).scale(100));
        assert_eq!(p.to_string(), "x1^2 - x1*x2 + x2 + 3");
        assert_eq!(SparsePoly::zero(f).to_string(), "0");
    }

    #[test]
    fn valuation_examples() {
        let f = fp(101);
        let z = x(f, Z);
        let rf = RationalFunction::new(z.pow(2).mul(&x(f, 1)), z.mul(&c(f, 1).add(&z))).unwrap();
        assert_eq!(rf.valuation(Z).unwrap(), 1);
        let rf = RationalFunction::new(x(f, 1), x(f, 2)).unwrap();
        assert_eq!(rf.valuation(Z).unwrap(), 0);
        let rf = RationalFunction::new(z.pow(3), z.pow(5).add(&z.pow(4))).unwrap();
        assert_eq!(rf.valuation(Z).unwrap(), -1);
        let rf = RationalFunction::new(SparsePoly::zero(f), z).unwrap();
        assert_eq!(rf.valuation(Z), Err(Error::ZeroInput));
    }

    #[test]
    fn series_lift_examples() {
        let f = fp(101);
        let z = x(f, Z);
        let geo = RationalFunction::new(c(f, 1), c(f, 1).sub(&z)).unwrap();
        assert_eq!(series_lift(&geo, Z, 3).unwrap().to_poly().unwrap(), c(f, 1).add(&z).add(&z.pow(2)));
        let free = RationalFunction::from_poly(x(f, 1));
        assert_eq!(series_lift(&free, Z, 2).unwrap().to_poly().unwrap(), x(f, 1));
        let rf = RationalFunction::new(x(f, 1).mul(&z), c(f, 1).add(&x(f, 2).mul(&z))).unwrap();
        let want = x(f, 1).mul(&z).sub(&x(f, 1).mul(&x(f, 2)).mul(&z.pow(2)));
        assert_eq!(series_lift(&rf, Z, 3).unwrap().to_poly().unwrap(), want);
        let neg = RationalFunction::new(c(f, 1), z.clone()).unwrap();
        assert!(matches!(series_lift(&neg, Z, 3), Err(Error::NegativeValuation(-1))));
    }

    #[test]
    fn series_lift_with_nonunit_leading_coefficient() {
        let f = fp(101);
        let z = x(f, Z);
        // x1 / (x2 + z): coefficient of z^i is x1 (-1)^i / x2^(i+1)
        let rf = RationalFunction::new(x(f, 1), x(f, 2).add(&z)).unwrap();
        let s = series_lift(&rf, Z, 4).unwrap();
        for (i, co) in s.coeffs.iter().enumerate() {
            let want = RationalFunction::new(x(f, 1).scale(f.from_i64((-1i64).pow(i as u32))), x(f, 2).pow(i as u32 + 1))
                .unwrap();
            assert!(co.same_value(&want), "coefficient {i}");
        }
    }

    #[test]
    fn series_inverse_round_trip() {
        let f = fp(1_000_003);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let z = x(f, Z);
            let a = random_poly(f, &mut rng, 2, 2, 3).add(&c(f, rng.gen_range(1..100)));
            let b = random_poly(f, &mut rng, 2, 1, 2).mul(&z).add(&c(f, 1));
            let num = a.mul(&z.pow(rng.gen_range(0..2)));
            let rf = RationalFunction::new(num.clone(), b.clone()).unwrap();
            let inv = RationalFunction::new(b, num).unwrap();
            if inv.valuation(Z).unwrap() < 0 {
                continue;
            }
            let prod = series_lift(&rf, Z, 4).unwrap().mul(&series_lift(&inv, Z, 4).unwrap());
            assert!(prod.coeffs[0].same_value(&RationalFunction::from_poly(c(f, 1))));
            for co in &prod.coeffs[1..] {
                assert!(co.is_zero());
            }
        }
    }

    #[test]
    fn valuation_is_additive() {
        let f = fp(1_000_003);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let z = x(f, Z);
        for _ in 0..100 {
            let mk = |rng: &mut ChaCha8Rng| {
                let p = random_poly(f, rng, 2, 2, 3).add(&c(f, 1)).mul(&z.pow(rng.gen_range(0..3)));
                let q = random_poly(f, rng, 2, 2, 3).add(&c(f, 1)).mul(&z.pow(rng.gen_range(0..3)));
                RationalFunction::new(p, q).unwrap()
            };
            let (a, b) = (mk(&mut rng), mk(&mut rng));
            let ab = RationalFunction::new(a.num.mul(&b.num), a.den.mul(&b.den)).unwrap();
            assert_eq!(ab.valuation(Z).unwrap(), a.valuation(Z).unwrap() + b.valuation(Z).unwrap());
        }
    }

    #[test]
    fn interpolate_examples() {
        let f = fp(101);
        assert_eq!(interpolate(f, 1, &[(0, 1), (1, 2)]).unwrap(), UniPoly::new(f, 1, vec![1, 1]));
        assert_eq!(interpolate(f, 1, &[(5, 9)]).unwrap(), UniPoly::new(f, 1, vec![9]));
        let pts: Vec<(u64, u64)> = [3u64, 7, 11, 20].iter().map(|&y| (y, f.pow(y, 3))).collect();
        assert_eq!(interpolate(f, 1, &pts).unwrap(), UniPoly::new(f, 1, vec![0, 0, 0, 1]));
        assert_eq!(interpolate(f, 1, &[(1, 1), (1, 2)]), Err(Error::DuplicateAbscissa(1)));
    }

    #[test]
    fn interpolate_reproduces_points() {
        let f = fp(10_007);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..12 {
            let mut xs: Vec<u64> = Vec::new();
            while xs.len() < n {
                let v = rng.gen_range(0..f.modulus());
                if !xs.contains(&v) {
                    xs.push(v);
                }
            }
            let pts: Vec<(u64, u64)> = xs.iter().map(|&x| (x, rng.gen_range(0..f.modulus()))).collect();
            let u = interpolate(f, 1, &pts).unwrap();
            assert!(u.degree() < n);
            for &(x, y) in &pts {
                assert_eq!(u.eval(f, x), y);
            }
        }
    }

    #[test]
    fn ring_axioms_random() {
        let f = fp(97);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let a = random_poly(f, &mut rng, 3, 2, 4);
            let b = random_poly(f, &mut rng, 3, 2, 4);
            let cc = random_poly(f, &mut rng, 3, 2, 4);
            assert_eq!(a.mul(&b).mul(&cc), a.mul(&b.mul(&cc)));
            assert_eq!(a.mul(&b.add(&cc)), a.mul(&b).add(&a.mul(&cc)));
            assert_eq!(a.add(&b), b.add(&a));
            if !a.is_zero() && !b.is_zero() {
                assert_eq!(a.mul(&b).degree(), a.degree() + b.degree());
            }
        }
    }

    #[test]
    fn compose_and_truncation() {
        let f = fp(101);
        let z = x(f, Z);
        let p = x(f, 1).mul(&x(f, 2)).add(&c(f, 3));
        let shifted = p.compose(&|v| x(f, v).mul(&z).add(&c(f, v as i64)));
        assert_eq!(shifted.eval_var(Z, 0), c(f, 5));
        assert_eq!(shifted.coeff_in(Z, 1), x(f, 1).scale(2).add(&x(f, 2)));
        assert_eq!(shifted.truncate_in(Z, 1), c(f, 5));
        let t = shifted.mul_trunc(&shifted, Z, 2);
        assert_eq!(t, shifted.mul(&shifted).truncate_in(Z, 2));
        assert_eq!(z.pow(3).mul(&x(f, 1)).div_var_pow(Z, 2), z.mul(&x(f, 1)));
    }

    #[test]
    fn monomial_bounds() {
        assert!(Monomial::var(16, 1).is_err());
        assert!(Monomial::var(3, 256).is_err());
        let m = Monomial::from_exps(&[(1, 2), (3, 1)]).unwrap();
        assert_eq!(m.degree(), 3);
        assert_eq!(m.to_string(), "x1^2*x3");
    }
}
