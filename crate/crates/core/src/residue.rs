//! Arithmetic kernels for `(Z/p^L)[X]/(f)`.
//!
//! Two backends share one generic implementation: a single-word backend for
//! moduli below 2^64 (products in `u128`) and a `BigUint` fallback. Callers
//! pick the backend through [`AnyZq::new`], which inspects the modulus.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt::Debug;

pub(crate) trait ModRing: Clone + Send + Sync {
    type Int: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Int;
    fn one(&self) -> Self::Int;
    fn reduce(&self, x: &BigUint) -> Self::Int;
    fn lift(&self, x: &Self::Int) -> BigUint;
    fn add(&self, a: &Self::Int, b: &Self::Int) -> Self::Int;
    fn sub(&self, a: &Self::Int, b: &Self::Int) -> Self::Int;
    fn mul(&self, a: &Self::Int, b: &Self::Int) -> Self::Int;
    fn is_zero(&self, a: &Self::Int) -> bool;
    /// `p^k` reduced modulo the ring modulus.
    fn p_pow(&self, k: u32) -> Self::Int;
    /// Divides the least non-negative representative by `p^k`, if it divides.
    fn div_p_pow(&self, a: &Self::Int, k: u32) -> Option<Self::Int>;
    /// Whether `a ≡ 0 (mod p^k)`; `k` may not exceed the modulus exponent.
    fn divisible_by_p_pow(&self, a: &Self::Int, k: u32) -> bool;

    fn neg(&self, a: &Self::Int) -> Self::Int {
        self.sub(&self.zero(), a)
    }

    fn reduce_signed(&self, x: &BigInt) -> Self::Int {
        let r = self.reduce(x.magnitude());
        if x.sign() == Sign::Minus {
            self.neg(&r)
        } else {
            r
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct WordRing {
    modulus: u64,
    pows: Vec<u64>,
}

impl WordRing {
    fn new(p: u64, exp: u32) -> Option<Self> {
        let mut pows = Vec::with_capacity(exp as usize + 1);
        let mut acc: u64 = 1;
        pows.push(1);
        for _ in 0..exp {
            acc = acc.checked_mul(p)?;
            pows.push(acc);
        }
        Some(WordRing { modulus: acc, pows })
    }
}

impl ModRing for WordRing {
    type Int = u64;

    #[inline]
    fn zero(&self) -> u64 {
        0
    }
    #[inline]
    fn one(&self) -> u64 {
        1 % self.modulus
    }
    fn reduce(&self, x: &BigUint) -> u64 {
        match x.to_u64() {
            Some(v) => v % self.modulus,
            None => (x % self.modulus).to_u64().unwrap(),
        }
    }
    fn lift(&self, x: &u64) -> BigUint {
        BigUint::from(*x)
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = *a as u128 + *b as u128;
        let m = self.modulus as u128;
        (if s >= m { s - m } else { s }) as u64
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            ((*a as u128 + self.modulus as u128) - *b as u128) as u64
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.modulus as u128) as u64
    }
    #[inline]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn p_pow(&self, k: u32) -> u64 {
        self.pows.get(k as usize).map_or(0, |v| v % self.modulus)
    }
    fn div_p_pow(&self, a: &u64, k: u32) -> Option<u64> {
        let q = *self.pows.get(k as usize)?;
        a.is_multiple_of(&q).then(|| a / q)
    }
    fn divisible_by_p_pow(&self, a: &u64, k: u32) -> bool {
        a.is_multiple_of(&self.pows[k as usize])
    }
}

#[derive(Clone, Debug)]
pub(crate) struct BigRing {
    modulus: BigUint,
    pows: Vec<BigUint>,
}

impl BigRing {
    fn new(p: u64, exp: u32) -> Self {
        let p = BigUint::from(p);
        let mut pows = Vec::with_capacity(exp as usize + 1);
        let mut acc = BigUint::one();
        pows.push(acc.clone());
        for _ in 0..exp {
            acc *= &p;
            pows.push(acc.clone());
        }
        BigRing { modulus: acc, pows }
    }
}

impl ModRing for BigRing {
    type Int = BigUint;

    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn one(&self) -> BigUint {
        BigUint::one() % &self.modulus
    }
    fn reduce(&self, x: &BigUint) -> BigUint {
        if x < &self.modulus {
            x.clone()
        } else {
            x % &self.modulus
        }
    }
    fn lift(&self, x: &BigUint) -> BigUint {
        x.clone()
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let s = a + b;
        if s >= self.modulus {
            s - &self.modulus
        } else {
            s
        }
    }
    fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            &self.modulus - (b - a)
        }
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.modulus
    }
    fn is_zero(&self, a: &BigUint) -> bool {
        a.is_zero()
    }
    fn p_pow(&self, k: u32) -> BigUint {
        self.pows
            .get(k as usize)
            .map_or_else(BigUint::zero, |v| v % &self.modulus)
    }
    fn div_p_pow(&self, a: &BigUint, k: u32) -> Option<BigUint> {
        let q = self.pows.get(k as usize)?;
        let (quo, rem) = a.div_rem(q);
        rem.is_zero().then_some(quo)
    }
    fn divisible_by_p_pow(&self, a: &BigUint, k: u32) -> bool {
        (a % &self.pows[k as usize]).is_zero()
    }
}

/// `(Z/p^L)[X]/(f)` for monic `f` of degree `d`, elements as coefficient
/// vectors of length `d` in the power basis.
#[derive(Clone, Debug)]
pub(crate) struct Zq<R: ModRing> {
    pub ring: R,
    pub p: u64,
    pub exp: u32,
    d: usize,
    /// Coefficients `f_0, …, f_{d−1}` of `f = X^d + Σ f_i X^i`.
    f_low: Vec<R::Int>,
    f_mod_p: Vec<u64>,
}

pub(crate) type Elem<R> = Vec<<R as ModRing>::Int>;

impl<R: ModRing> Zq<R> {
    fn with_ring(ring: R, p: u64, exp: u32, f: &[BigInt]) -> Self {
        let d = f.len() - 1;
        let f_low = f[..d].iter().map(|c| ring.reduce_signed(c)).collect();
        let pb = BigInt::from(p);
        let f_mod_p = f
            .iter()
            .map(|c| u64::try_from(((c % &pb) + &pb) % &pb).unwrap())
            .collect();
        Zq {
            ring,
            p,
            exp,
            d,
            f_low,
            f_mod_p,
        }
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    /// The defining polynomial reduced modulo `p`, constant term first.
    pub fn f_mod_p(&self) -> &[u64] {
        &self.f_mod_p
    }

    pub fn zero(&self) -> Elem<R> {
        vec![self.ring.zero(); self.d]
    }

    pub fn one(&self) -> Elem<R> {
        let mut v = self.zero();
        v[0] = self.ring.one();
        v
    }

    pub fn constant(&self, c: &R::Int) -> Elem<R> {
        let mut v = self.zero();
        v[0] = c.clone();
        v
    }

    pub fn import(&self, coeffs: &[BigUint]) -> Elem<R> {
        coeffs.iter().map(|c| self.ring.reduce(c)).collect()
    }

    pub fn export(&self, x: &Elem<R>) -> Vec<BigUint> {
        x.iter().map(|c| self.ring.lift(c)).collect()
    }

    pub fn is_zero(&self, x: &Elem<R>) -> bool {
        x.iter().all(|c| self.ring.is_zero(c))
    }

    pub fn add(&self, x: &Elem<R>, y: &Elem<R>) -> Elem<R> {
        x.iter().zip(y).map(|(a, b)| self.ring.add(a, b)).collect()
    }

    pub fn add_assign(&self, x: &mut Elem<R>, y: &Elem<R>) {
        for (a, b) in x.iter_mut().zip(y) {
            *a = self.ring.add(a, b);
        }
    }

    pub fn sub(&self, x: &Elem<R>, y: &Elem<R>) -> Elem<R> {
        x.iter().zip(y).map(|(a, b)| self.ring.sub(a, b)).collect()
    }

    pub fn neg(&self, x: &Elem<R>) -> Elem<R> {
        x.iter().map(|a| self.ring.neg(a)).collect()
    }

    pub fn scale(&self, x: &Elem<R>, c: &R::Int) -> Elem<R> {
        x.iter().map(|a| self.ring.mul(a, c)).collect()
    }

    pub fn mul(&self, x: &Elem<R>, y: &Elem<R>) -> Elem<R> {
        let d = self.d;
        if d == 1 {
            return vec![self.ring.mul(&x[0], &y[0])];
        }
        let r = &self.ring;
        let mut prod = vec![r.zero(); 2 * d - 1];
        for (i, a) in x.iter().enumerate() {
            if r.is_zero(a) {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                let t = r.mul(a, b);
                prod[i + j] = r.add(&prod[i + j], &t);
            }
        }
        // X^d = −Σ f_i X^i
        for k in (d..2 * d - 1).rev() {
            let c = std::mem::replace(&mut prod[k], r.zero());
            if r.is_zero(&c) {
                continue;
            }
            for (i, fi) in self.f_low.iter().enumerate() {
                let t = r.mul(&c, fi);
                prod[k - d + i] = r.sub(&prod[k - d + i], &t);
            }
        }
        prod.truncate(d);
        prod
    }

    pub fn square(&self, x: &Elem<R>) -> Elem<R> {
        self.mul(x, x)
    }

    pub fn pow_u64(&self, x: &Elem<R>, mut e: u64) -> Elem<R> {
        let mut base = x.clone();
        let mut acc = self.one();
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                acc = if first {
                    base.clone()
                } else {
                    self.mul(&acc, &base)
                };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                base = self.square(&base);
            }
        }
        acc
    }

    pub fn pow_big(&self, x: &Elem<R>, e: &BigUint) -> Elem<R> {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.square(&acc);
            if e.bit(i) {
                acc = self.mul(&acc, x);
            }
        }
        acc
    }

    /// `x^p`, short-circuiting on zero.
    pub fn pow_p(&self, x: &Elem<R>) -> Elem<R> {
        if self.is_zero(x) {
            return x.clone();
        }
        self.pow_u64(x, self.p)
    }

    /// Applies a `d × d` matrix given column by column.
    pub fn apply_matrix(&self, cols: &[Elem<R>], x: &Elem<R>) -> Elem<R> {
        let mut out = self.zero();
        for (c, col) in x.iter().zip(cols) {
            if self.ring.is_zero(c) {
                continue;
            }
            self.add_assign(&mut out, &self.scale(col, c));
        }
        out
    }

    /// Componentwise division by `p^k`; `None` unless every coefficient divides.
    pub fn div_p_pow(&self, x: &Elem<R>, k: u32) -> Option<Elem<R>> {
        x.iter().map(|c| self.ring.div_p_pow(c, k)).collect()
    }

    pub fn divisible_by_p_pow(&self, x: &Elem<R>, k: u32) -> bool {
        x.iter().all(|c| self.ring.divisible_by_p_pow(c, k))
    }
}

/// Backend-erased quotient ring.
#[derive(Clone, Debug)]
pub(crate) enum AnyZq {
    Word(Zq<WordRing>),
    Big(Zq<BigRing>),
}

impl AnyZq {
    pub fn new(p: u64, exp: u32, f: &[BigInt]) -> Self {
        match WordRing::new(p, exp) {
            Some(w) => AnyZq::Word(Zq::with_ring(w, p, exp, f)),
            None => AnyZq::Big(Zq::with_ring(BigRing::new(p, exp), p, exp, f)),
        }
    }
}

/// Runs `$body` with `$z` bound to the concrete backend.
macro_rules! with_zq {
    ($any:expr, $z:ident => $body:expr) => {
        match $any {
            $crate::residue::AnyZq::Word($z) => $body,
            $crate::residue::AnyZq::Big($z) => $body,
        }
    };
}
pub(crate) use with_zq;

#[cfg(test)]
mod tests {
    use super::*;

    fn f(coeffs: &[i64]) -> Vec<BigInt> {
        coeffs.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn backend_selection() {
        assert!(matches!(AnyZq::new(3, 40, &f(&[0, 1])), AnyZq::Word(_)));
        assert!(matches!(AnyZq::new(3, 41, &f(&[0, 1])), AnyZq::Big(_)));
    }

    #[test]
    fn gaussian_relation() {
        // g^2 = -1 in Z_9 = Z_3[X]/(X^2+1)
        for any in [
            AnyZq::new(3, 5, &f(&[1, 0, 1])),
            AnyZq::Big(Zq::with_ring(BigRing::new(3, 5), 3, 5, &f(&[1, 0, 1]))),
        ] {
            with_zq!(&any, z => {
                let g = z.import(&[BigUint::zero(), BigUint::one()]);
                let sq = z.export(&z.mul(&g, &g));
                assert_eq!(sq, vec![BigUint::from(242u32), BigUint::zero()]);
            });
        }
    }

    #[test]
    fn backends_agree_on_powers() {
        let poly = f(&[2, -1, 3, 1]);
        let w = Zq::with_ring(WordRing::new(5, 9).unwrap(), 5, 9, &poly);
        let b = Zq::with_ring(BigRing::new(5, 9), 5, 9, &poly);
        let x: Vec<BigUint> = [17u32, 912, 4].iter().map(|&v| BigUint::from(v)).collect();
        let e = BigUint::from(5u32).pow(4);
        let pw = w.export(&w.pow_big(&w.import(&x), &e));
        let pb = b.export(&b.pow_big(&b.import(&x), &e));
        assert_eq!(pw, pb);
        assert_eq!(w.export(&w.pow_u64(&w.import(&x), 625)), pw);
    }
}
