use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::One;

use crate::error::{Error, Result};
use crate::residue::{with_zq, AnyZq, ModRing, Zq};

/// The coefficient ring `A = W(F_{p^d}) = Z_p[X]/(f)` truncated at absolute
/// precision `M`.
///
/// Construction validates the data and caches the matrix of the Frobenius
/// automorphism on the power basis `1, g, …, g^{d−1}`, where `g` is the class
/// of `X`. Contexts are immutable and shared through `Arc`.
pub struct RingContext {
    p: u64,
    d: usize,
    f: Vec<BigInt>,
    precision: u32,
    base: AnyZq,
    /// Columns `φ(g^j)`.
    frob: Vec<Vec<BigUint>>,
    /// Columns `φ^{-1}(g^j) = φ^{d−1}(g^j)`.
    frob_inv: Vec<Vec<BigUint>>,
}

impl fmt::Debug for RingContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RingContext")
            .field("p", &self.p)
            .field("d", &self.d)
            .field("f", &self.f)
            .field("M", &self.precision)
            .finish()
    }
}

impl PartialEq for RingContext {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.precision == other.precision && self.f == other.f
    }
}

impl Eq for RingContext {}

impl RingContext {
    /// Validates `(p, d, f, M)` and builds the context. `f` lists coefficients
    /// constant term first and must be monic of degree `d`.
    pub fn new<I, T>(p: u64, d: usize, f: I, precision: u32) -> Result<Arc<Self>>
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let f: Vec<BigInt> = f.into_iter().map(Into::into).collect();
        if !is_prime(p) {
            return Err(Error::CompositePrime(p));
        }
        if d == 0 {
            return Err(Error::BadDegree("residue degree must be at least 1".into()));
        }
        if f.len() != d + 1 {
            return Err(Error::BadDegree(format!(
                "defining polynomial has {} coefficients, expected {}",
                f.len(),
                d + 1
            )));
        }
        if !f[d].is_one() {
            return Err(Error::BadDegree("defining polynomial must be monic".into()));
        }
        if precision == 0 {
            return Err(Error::BadPrecision(precision));
        }
        let f_mod_p: Vec<u64> = f.iter().map(|c| reduce_i(c, p)).collect();
        if !fp::is_irreducible(&f_mod_p, p) {
            return Err(Error::ReduciblePolynomial(p));
        }
        let base = AnyZq::new(p, precision, &f);
        let (frob, frob_inv) = frobenius_matrices(&base, p, &f, precision)?;
        Ok(Arc::new(RingContext {
            p,
            d,
            f,
            precision,
            base,
            frob,
            frob_inv,
        }))
    }

    /// `Z/p^M`, i.e. `d = 1` with `f = X`.
    pub fn zp(p: u64, precision: u32) -> Result<Arc<Self>> {
        Self::new(p, 1, [0i64, 1], precision)
    }

    /// Uses [`default_polynomial`] for the defining polynomial.
    pub fn with_default_polynomial(p: u64, d: usize, precision: u32) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::CompositePrime(p));
        }
        if d == 0 {
            return Err(Error::BadDegree("residue degree must be at least 1".into()));
        }
        Self::new(p, d, default_polynomial(p, d), precision)
    }

    /// Same `(p, d, f)` at a different working precision.
    pub fn with_precision(&self, precision: u32) -> Result<Arc<Self>> {
        Self::new(self.p, self.d, self.f.clone(), precision)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn polynomial(&self) -> &[BigInt] {
        &self.f
    }

    /// Working absolute precision `M`.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub(crate) fn base(&self) -> &AnyZq {
        &self.base
    }

    /// Quotient ring modulo `p^exp`; reuses the cached base ring when possible.
    pub(crate) fn zq(&self, exp: u32) -> AnyZq {
        if exp == self.precision {
            self.base.clone()
        } else {
            AnyZq::new(self.p, exp, &self.f)
        }
    }

    pub(crate) fn frob_columns(&self) -> &[Vec<BigUint>] {
        &self.frob
    }

    pub(crate) fn frob_inv_columns(&self) -> &[Vec<BigUint>] {
        &self.frob_inv
    }

    pub(crate) fn require_odd(&self) -> Result<()> {
        if self.p == 2 {
            Err(Error::OddPrimeRequired(self.p))
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_same(&self, other: &RingContext) -> Result<()> {
        if std::ptr::eq(self, other) || self == other {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }
}

/// Lexicographically first monic irreducible polynomial of degree `d` modulo
/// `p`, ordering candidates by their lower coefficients read as base-`p`
/// digits, constant term least significant. Gives `X` for `d = 1`.
pub fn default_polynomial(p: u64, d: usize) -> Vec<BigInt> {
    let mut digits = vec![0u64; d];
    loop {
        let mut cand = digits.clone();
        cand.push(1);
        if fp::is_irreducible(&cand, p) {
            return cand.into_iter().map(BigInt::from).collect();
        }
        // irreducible polynomials of every degree exist, so this terminates
        for digit in digits.iter_mut() {
            *digit += 1;
            if *digit < p {
                break;
            }
            *digit = 0;
        }
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u64;
    while k.saturating_mul(k) <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

fn reduce_i(c: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    let r = ((c % &m) + &m) % &m;
    r.try_into().unwrap()
}

/// Columns of a matrix over `Z/p^M`.
type Matrix = Vec<Vec<BigUint>>;

fn frobenius_matrices(
    base: &AnyZq,
    p: u64,
    f: &[BigInt],
    precision: u32,
) -> Result<(Matrix, Matrix)> {
    with_zq!(base, z => {
        let d = z.degree();
        let identity: Vec<Vec<BigUint>> = (0..d).map(|j| z.export(&unit_vector(z, j))).collect();
        if d == 1 {
            return Ok((identity.clone(), identity));
        }
        let g = unit_vector(z, 1);
        let root = hensel_root(z, f, &z.pow_u64(&g, p), precision)?;
        let mut cols = Vec::with_capacity(d);
        let mut power = z.one();
        for _ in 0..d {
            cols.push(power.clone());
            power = z.mul(&power, &root);
        }
        // φ^{-1} = φ^{d−1}
        let mut inv: Vec<_> = (0..d).map(|j| unit_vector(z, j)).collect();
        for _ in 0..d - 1 {
            inv = inv.iter().map(|v| z.apply_matrix(&cols, v)).collect();
        }
        Ok((
            cols.iter().map(|c| z.export(c)).collect(),
            inv.iter().map(|c| z.export(c)).collect(),
        ))
    })
}

fn unit_vector<R: ModRing>(z: &Zq<R>, j: usize) -> Vec<R::Int> {
    let mut v = z.zero();
    v[j] = z.ring.one();
    v
}

fn eval_poly<R: ModRing>(z: &Zq<R>, coeffs: &[R::Int], x: &Vec<R::Int>) -> Vec<R::Int> {
    let mut acc = z.zero();
    for c in coeffs.iter().rev() {
        acc = z.mul(&acc, x);
        acc[0] = z.ring.add(&acc[0], c);
    }
    acc
}

/// Newton iteration for the root of `f` congruent to `seed` modulo `p`.
fn hensel_root<R: ModRing>(
    z: &Zq<R>,
    f: &[BigInt],
    seed: &[R::Int],
    precision: u32,
) -> Result<Vec<R::Int>> {
    let fc: Vec<R::Int> = f.iter().map(|c| z.ring.reduce_signed(c)).collect();
    let df: Vec<R::Int> = fc
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| z.ring.mul(c, &z.ring.reduce(&BigUint::from(i))))
        .collect();
    let mut r = seed.to_vec();
    let mut steps = 0u32;
    while !z.is_zero(&eval_poly(z, &fc, &r)) {
        if steps > precision + 1 {
            return Err(Error::HenselFailure);
        }
        let deriv = eval_poly(z, &df, &r);
        let inv = unit_inverse(z, &deriv).ok_or(Error::HenselFailure)?;
        r = z.sub(&r, &z.mul(&eval_poly(z, &fc, &r), &inv));
        steps += 1;
    }
    Ok(r)
}

/// Inverse of `x` in `Zq` when `x` is a unit: seed in `F_q` by
/// `x^{q−2}`, then Newton steps `y ← y(2 − xy)`.
pub(crate) fn unit_inverse<R: ModRing>(z: &Zq<R>, x: &Vec<R::Int>) -> Option<Vec<R::Int>> {
    let seed = field_inverse(z, &z.export(x))?;
    let mut y = z.import(&seed);
    let two = z.ring.reduce(&BigUint::from(2u32));
    let mut correct = 1u32;
    while correct < z.exp {
        let t = z.sub(&z.constant(&two), &z.mul(x, &y));
        y = z.mul(&y, &t);
        correct = correct.saturating_mul(2);
    }
    Some(y)
}

/// Inverse in the residue field `F_q`, returned as a lift.
fn field_inverse<R: ModRing>(z: &Zq<R>, x: &[BigUint]) -> Option<Vec<BigUint>> {
    let d = z.degree();
    let p = z.p;
    let field = AnyZq::new(
        p,
        1,
        &z.f_mod_p()
            .iter()
            .map(|&c| BigInt::from(c))
            .collect::<Vec<_>>(),
    );
    with_zq!(&field, k => {
        let xe = k.import(x);
        if k.is_zero(&xe) {
            return None;
        }
        let q = BigUint::from(p).pow(d as u32);
        let e = q - BigUint::from(2u32);
        Some(k.export(&k.pow_big(&xe, &e)))
    })
}

/// Polynomials over `F_p` as little-endian coefficient vectors.
mod fp {
    fn mulmod(a: u64, b: u64, p: u64) -> u64 {
        ((a as u128 * b as u128) % p as u128) as u64
    }

    fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
        let mut acc = 1 % p;
        a %= p;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, a, p);
            }
            a = mulmod(a, a, p);
            e >>= 1;
        }
        acc
    }

    fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    /// Remainder of `a` modulo `b` (`b` nonzero, trimmed).
    fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead_inv = powmod(b[db], p - 2, p);
        while r.len() > db {
            let k = r.len() - 1;
            let c = mulmod(r[k], lead_inv, p);
            for (i, bi) in b.iter().enumerate() {
                let t = mulmod(c, *bi, p);
                let idx = k - db + i;
                r[idx] = (r[idx] + p - t) % p;
            }
            trim(&mut r);
        }
        r
    }

    fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + mulmod(*x, *y, p)) % p;
            }
        }
        trim(&mut out);
        out
    }

    fn powmod_poly(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = rem(base, f, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = rem(&mul(&acc, &b, p), f, p);
            }
            b = rem(&mul(&b, &b, p), f, p);
            e >>= 1;
        }
        acc
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    fn sub_x(v: &[u64], p: u64) -> Vec<u64> {
        let mut out = v.to_vec();
        if out.len() < 2 {
            out.resize(2, 0);
        }
        out[1] = (out[1] + p - 1) % p;
        trim(&mut out);
        out
    }

    fn prime_factors(mut n: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut k = 2;
        while k * k <= n {
            if n.is_multiple_of(k) {
                out.push(k);
                while n.is_multiple_of(k) {
                    n /= k;
                }
            }
            k += 1;
        }
        if n > 1 {
            out.push(n);
        }
        out
    }

    /// Rabin's test for a monic polynomial of degree `d ≥ 1`.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let mut f = f.iter().map(|c| c % p).collect::<Vec<_>>();
        trim(&mut f);
        let d = f.len() - 1;
        if d == 1 {
            return true;
        }
        // frob[k] = X^{p^k} mod f
        let mut frob = vec![vec![0u64, 1]];
        for k in 0..d {
            let next = powmod_poly(&frob[k], p, &f, p);
            frob.push(next);
        }
        let x = rem(&[0, 1], &f, p);
        if frob[d] != x {
            return false;
        }
        prime_factors(d).into_iter().all(|q| {
            let g = gcd(&sub_x(&frob[d / q], p), &f, p);
            g.len() == 1
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute force: no root and, for degree ≤ 3, that suffices.
    fn has_root(f: &[i64], p: i64) -> bool {
        (0..p).any(|x| {
            f.iter()
                .rev()
                .fold(0i64, |acc, c| (acc * x + c).rem_euclid(p))
                == 0
        })
    }

    #[test]
    fn zp_context() {
        let ctx = RingContext::new(3, 1, [0i64, 1], 10).unwrap();
        assert_eq!(ctx.degree(), 1);
        assert_eq!(ctx.precision(), 10);
    }

    #[test]
    fn gaussian_context_is_irreducible() {
        assert!(!has_root(&[1, 0, 1], 3));
        assert!(RingContext::new(3, 2, [1i64, 0, 1], 10).is_ok());
    }

    #[test]
    fn rejects_reducible() {
        assert!(has_root(&[-1, 0, 1], 3));
        assert_eq!(
            RingContext::new(3, 2, [-1i64, 0, 1], 10).unwrap_err(),
            Error::ReduciblePolynomial(3)
        );
    }

    #[test]
    fn rejects_composite_and_bad_degree() {
        assert_eq!(RingContext::zp(9, 4).unwrap_err(), Error::CompositePrime(9));
        assert!(matches!(
            RingContext::new(3, 2, [1i64, 1], 4).unwrap_err(),
            Error::BadDegree(_)
        ));
        assert!(matches!(
            RingContext::new(3, 2, [1i64, 0, 2], 4).unwrap_err(),
            Error::BadDegree(_)
        ));
        assert_eq!(RingContext::zp(3, 0).unwrap_err(), Error::BadPrecision(0));
    }

    #[test]
    fn rabin_matches_root_search_for_small_degrees() {
        for p in [3i64, 5, 7] {
            for d in 2..=3usize {
                let count = (p as usize).pow(d as u32);
                for k in 0..count {
                    let mut f: Vec<i64> =
                        (0..d).map(|i| (k as i64 / p.pow(i as u32)) % p).collect();
                    f.push(1);
                    let fu: Vec<u64> = f.iter().map(|&c| c as u64).collect();
                    assert_eq!(
                        fp::is_irreducible(&fu, p as u64),
                        !has_root(&f, p),
                        "{f:?} mod {p}"
                    );
                }
            }
        }
    }

    #[test]
    fn quartic_with_quadratic_factors_is_reducible() {
        // (X^2+1)^2 = X^4 + 2X^2 + 1 has no root mod 3 but is reducible
        assert!(!fp::is_irreducible(&[1, 0, 2, 0, 1], 3));
        // X^4 + X + 2 is irreducible mod 3
        assert!(fp::is_irreducible(&[2, 1, 0, 0, 1], 3));
    }

    #[test]
    fn default_polynomials() {
        let as_i: fn(Vec<BigInt>) -> Vec<i64> =
            |v| v.into_iter().map(|c| c.try_into().unwrap()).collect();
        assert_eq!(as_i(default_polynomial(3, 1)), vec![0, 1]);
        assert_eq!(as_i(default_polynomial(3, 2)), vec![1, 0, 1]);
        assert_eq!(as_i(default_polynomial(5, 2)), vec![2, 0, 1]);
        assert_eq!(as_i(default_polynomial(7, 2)), vec![1, 0, 1]);
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
