//! Prime fields with word-sized moduli, plus rationals for I/O.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_prime::nt_funcs::{factorize64, is_prime64};
use num_traits::{Signed, ToPrimitive, Zero};

pub use num_rational::BigRational as Rational;

/// Largest modulus accepted; products of two residues fit in a `u128`.
pub const MAX_MODULUS: u64 = 1 << 62;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Prime> {
        if p >= MAX_MODULUS || !is_prime64(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Prime(p))
    }

    pub fn value(self) -> u64 {
        self.0
    }
}

/// Arithmetic context for F_p. Elements are plain residues in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u64,
}

impl Fp {
    pub fn new(p: Prime) -> Fp {
        Fp { p: p.0 }
    }

    pub fn with_modulus(p: u64) -> Result<Fp> {
        Ok(Fp::new(Prime::new(p)?))
    }

    #[inline]
    pub fn modulus(self) -> u64 {
        self.p
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Panics on zero; callers test first.
    pub fn inv(self, a: u64) -> u64 {
        assert!(!a.is_multiple_of(self.p), "inverse of zero");
        let (mut t, mut nt) = (0i128, 1i128);
        let (mut r, mut nr) = (self.p as i128, a as i128);
        while nr != 0 {
            let q = r / nr;
            (t, nt) = (nt, t - q * nt);
            (r, nr) = (nr, r - q * nr);
        }
        t.rem_euclid(self.p as i128) as u64
    }

    pub fn div(self, a: u64, b: u64) -> u64 {
        self.mul(a, self.inv(b))
    }

    pub fn from_i64(self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    pub fn from_u64(self, v: u64) -> u64 {
        v % self.p
    }

    pub fn from_bigint(self, v: &BigInt) -> u64 {
        let p = BigInt::from(self.p);
        v.mod_floor(&p).to_u64().unwrap()
    }

    /// `None` when the denominator vanishes mod p.
    pub fn from_rational(self, r: &Rational) -> Option<u64> {
        let den = self.from_bigint(r.denom());
        if den == 0 {
            return None;
        }
        Some(self.div(self.from_bigint(r.numer()), den))
    }

    /// Symmetric representative, used for display.
    pub fn signed(self, a: u64) -> i128 {
        if a > self.p / 2 {
            a as i128 - self.p as i128
        } else {
            a as i128
        }
    }

    pub fn binomial(self, n: u64, k: u64) -> u64 {
        if k > n {
            return 0;
        }
        let mut num = 1;
        let mut den = 1;
        for i in 0..k {
            num = self.mul(num, self.from_u64(n - i));
            den = self.mul(den, self.from_u64(i + 1));
        }
        self.div(num, den)
    }
}

pub fn is_prime(n: u64) -> bool {
    is_prime64(n)
}

fn lcm_all(orders: &[u64]) -> Option<u64> {
    let mut l: u64 = 1;
    for &o in orders {
        l = (l / l.gcd(&o)).checked_mul(o)?;
    }
    Some(l)
}

/// Least prime `p >= min` such that every listed order divides `p - 1`.
pub fn find_prime(min: u64, orders: &[u64]) -> Result<Prime> {
    if orders.contains(&0) {
        return Err(Error::Unsupported("unity order 0".into()));
    }
    let l = lcm_all(orders).ok_or(Error::SearchCapExceeded)?;
    let min = min.max(2);
    let mut p = if l == 1 {
        min
    } else {
        let r = (min - 1) % l;
        if r == 0 {
            min
        } else {
            (min - 1 - r).checked_add(l + 1).ok_or(Error::SearchCapExceeded)?
        }
    };
    while p < MAX_MODULUS {
        if is_prime64(p) {
            return Ok(Prime(p));
        }
        p = p.checked_add(l).ok_or(Error::SearchCapExceeded)?;
    }
    Err(Error::SearchCapExceeded)
}

/// The least residue of exact multiplicative order `m`.
pub fn root_of_unity(p: Prime, m: u64) -> Result<u64> {
    let f = Fp::new(p);
    let q = p.0 - 1;
    if m == 0 || !q.is_multiple_of(m) {
        return Err(Error::OrderNotAvailable(m));
    }
    if m == 1 {
        return Ok(1);
    }
    let g = primitive_root(p);
    let h = f.pow(g, q / m);
    let mut best = u64::MAX;
    let mut x = 1;
    for j in 1..=m {
        x = f.mul(x, h);
        if j.gcd(&m) == 1 {
            best = best.min(x);
        }
    }
    Ok(best)
}

pub fn primitive_root(p: Prime) -> u64 {
    let f = Fp::new(p);
    let q = p.0 - 1;
    if q == 1 {
        return 1;
    }
    let primes: Vec<u64> = factorize64(q).into_keys().collect();
    (2..p.0)
        .find(|&g| primes.iter().all(|&r| f.pow(g, q / r) != 1))
        .expect("every prime field has a generator")
}

/// The default field for identity testing: large characteristic and every
/// root of unity of order up to `max_order` in the base field.
pub fn pit_field(min: u64, max_order: u64) -> Result<Fp> {
    let orders: Vec<u64> = (1..=max_order.max(1)).collect();
    Ok(Fp::new(find_prime(min.max(3), &orders)?))
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.parse::<BigInt>().ok()?, d.parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::from(1)),
    };
    if d.is_zero() {
        return None;
    }
    let r = Rational::new(n, d);
    debug_assert!(r.denom().is_positive());
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn find_prime_examples() {
        assert_eq!(find_prime(5, &[3]).unwrap().value(), 7);
        assert_eq!(find_prime(3, &[1]).unwrap().value(), 3);
        let p = find_prime(1_000_000, &[2, 3, 4]).unwrap().value();
        assert_eq!(p % 12, 1);
        assert!(is_prime(p));
        let below = (1_000_000..p).filter(|&q| q % 12 == 1 && is_prime(q)).count();
        assert_eq!(below, 0);
    }

    #[test]
    fn root_of_unity_examples() {
        let p7 = Prime::new(7).unwrap();
        assert_eq!(root_of_unity(p7, 3).unwrap(), 2);
        assert_eq!(root_of_unity(p7, 1).unwrap(), 1);
        assert_eq!(root_of_unity(Prime::new(5).unwrap(), 4).unwrap(), 2);
        assert_eq!(root_of_unity(p7, 4), Err(Error::OrderNotAvailable(4)));
    }

    #[test]
    fn root_of_unity_is_least_of_exact_order() {
        for p in (3..200u64).filter(|&p| is_prime(p)) {
            let f = Fp::with_modulus(p).unwrap();
            for m in (1..p).filter(|m| (p - 1) % m == 0) {
                let w = root_of_unity(Prime::new(p).unwrap(), m).unwrap();
                assert_eq!(f.pow(w, m), 1);
                assert!((1..m).all(|j| f.pow(w, j) != 1));
                let least = (1..p)
                    .find(|&x| f.pow(x, m) == 1 && (1..m).all(|j| f.pow(x, j) != 1))
                    .unwrap();
                assert_eq!(w, least);
            }
        }
    }

    #[test]
    fn inverses_exhaustive_small() {
        for p in (2..=101u64).filter(|&p| is_prime(p)) {
            let f = Fp::with_modulus(p).unwrap();
            for a in 1..p {
                assert_eq!(f.mul(a, f.inv(a)), 1);
            }
        }
    }

    #[test]
    fn rational_reduction_commutes() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let f = Fp::with_modulus(1_000_003).unwrap();
        for _ in 0..500 {
            let a = Rational::new(rng.gen_range(-50i64..50).into(), rng.gen_range(1i64..30).into());
            let b = Rational::new(rng.gen_range(-50i64..50).into(), rng.gen_range(1i64..30).into());
            let (ra, rb) = (f.from_rational(&a).unwrap(), f.from_rational(&b).unwrap());
            assert_eq!(f.from_rational(&(&a + &b)).unwrap(), f.add(ra, rb));
            assert_eq!(f.from_rational(&(&a * &b)).unwrap(), f.mul(ra, rb));
            assert_eq!(f.from_rational(&(&a - &b)).unwrap(), f.sub(ra, rb));
            if !b.is_zero() {
                assert_eq!(f.from_rational(&(&a / &b)).unwrap(), f.div(ra, rb));
            }
        }
    }

    #[test]
    fn parse_rational_forms() {
        let f = Fp::with_modulus(7).unwrap();
        assert_eq!(f.from_rational(&parse_rational("1/2").unwrap()), Some(4));
        assert_eq!(f.from_rational(&parse_rational("-3").unwrap()), Some(4));
        assert!(parse_rational("1/0").is_none());
        assert_eq!(f.from_rational(&parse_rational("1/7").unwrap()), None);
    }
}
