use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use rand::Rng;

use crate::context::{unit_inverse, RingContext};
use crate::error::{Error, Result};
use crate::residue::with_zq;

/// An element of `A = Z_p[X]/(f)` known modulo `p^prec`.
///
/// Coefficients are stored in the power basis as least non-negative residues
/// modulo `p^prec`, so two elements at the same precision are equal exactly
/// when their coefficient vectors agree.
#[derive(Clone)]
pub struct PadicElement {
    ctx: Arc<RingContext>,
    coeffs: Vec<BigUint>,
    prec: u32,
}

/// p-adic valuation of a truncated element.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    Finite(u32),
    /// The element vanishes at its whole guaranteed precision.
    AtLeast(u32),
}

impl Valuation {
    /// Whether the valuation is provably at least `k`.
    pub fn is_at_least(self, k: u32) -> bool {
        match self {
            Valuation::Finite(v) => v >= k,
            Valuation::AtLeast(v) => v >= k,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Neg,
}

/// `op(x, y)` for the binary operations; `Neg` ignores `y`.
pub fn arith(op: ArithOp, x: &PadicElement, y: &PadicElement) -> Result<PadicElement> {
    match op {
        ArithOp::Add => x.add(y),
        ArithOp::Sub => x.sub(y),
        ArithOp::Mul => x.mul(y),
        ArithOp::Neg => {
            x.ctx.check_same(&y.ctx)?;
            Ok(x.neg())
        }
    }
}

fn p_pow_big(p: u64, k: u32) -> BigUint {
    BigUint::from(p).pow(k)
}

impl PadicElement {
    pub(crate) fn from_raw(ctx: &Arc<RingContext>, coeffs: Vec<BigUint>, prec: u32) -> Self {
        let modulus = p_pow_big(ctx.p(), prec);
        let coeffs = coeffs.into_iter().map(|c| c % &modulus).collect();
        PadicElement {
            ctx: Arc::clone(ctx),
            coeffs,
            prec,
        }
    }

    /// Builds an element from integer coordinates (constant term first, at
    /// most `d` of them) at the given precision.
    pub fn new<I, T>(ctx: &Arc<RingContext>, coeffs: I, prec: u32) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let coeffs: Vec<BigInt> = coeffs.into_iter().map(Into::into).collect();
        if coeffs.len() > ctx.degree() {
            return Err(Error::Malformed(format!(
                "{} coordinates for residue degree {}",
                coeffs.len(),
                ctx.degree()
            )));
        }
        if prec > ctx.precision() {
            return Err(Error::Malformed(format!(
                "precision {prec} exceeds working precision {}",
                ctx.precision()
            )));
        }
        let modulus = BigInt::from(p_pow_big(ctx.p(), prec));
        let mut out: Vec<BigUint> = coeffs
            .iter()
            .map(|c| {
                let r = ((c % &modulus) + &modulus) % &modulus;
                r.to_biguint().unwrap()
            })
            .collect();
        out.resize(ctx.degree(), BigUint::zero());
        Ok(PadicElement {
            ctx: Arc::clone(ctx),
            coeffs: out,
            prec,
        })
    }

    /// An integer at full working precision.
    pub fn from_int(ctx: &Arc<RingContext>, value: impl Into<BigInt>) -> Self {
        Self::new(ctx, [value.into()], ctx.precision()).expect("a single coordinate always fits")
    }

    pub fn zero(ctx: &Arc<RingContext>) -> Self {
        Self::from_int(ctx, 0)
    }

    pub fn one(ctx: &Arc<RingContext>) -> Self {
        Self::from_int(ctx, 1)
    }

    /// The class `g` of `X`.
    pub fn generator(ctx: &Arc<RingContext>) -> Self {
        let d = ctx.degree();
        if d == 1 {
            let c = -ctx.polynomial()[0].clone();
            return Self::from_int(ctx, c);
        }
        let mut coeffs = vec![BigInt::zero(); d];
        coeffs[1] = BigInt::from(1);
        Self::new(ctx, coeffs, ctx.precision()).unwrap()
    }

    /// Uniform element at full precision; each coordinate is drawn as `M`
    /// base-`p` digits, least significant first.
    pub fn random<R: Rng + ?Sized>(ctx: &Arc<RingContext>, rng: &mut R) -> Self {
        Self::random_at(ctx, ctx.precision(), rng)
    }

    /// Uniform element modulo `p^prec`, capped at the working precision.
    pub fn random_at<R: Rng + ?Sized>(ctx: &Arc<RingContext>, prec: u32, rng: &mut R) -> Self {
        let prec = prec.min(ctx.precision());
        let p = ctx.p();
        let coeffs = (0..ctx.degree())
            .map(|_| {
                let mut acc = BigUint::zero();
                let mut scale = BigUint::from(1u32);
                for _ in 0..prec {
                    acc += &scale * rng.random_range(0..p);
                    scale *= p;
                }
                acc
            })
            .collect();
        PadicElement {
            ctx: Arc::clone(ctx),
            coeffs,
            prec,
        }
    }

    pub fn context(&self) -> &Arc<RingContext> {
        &self.ctx
    }

    /// Coordinates in the power basis, reduced modulo `p^prec`.
    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    /// Guaranteed absolute precision.
    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Same value known to fewer digits. Requests above the current
    /// precision leave the element unchanged.
    pub fn truncate(&self, prec: u32) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        Self::from_raw(&self.ctx, self.coeffs.clone(), prec)
    }

    fn binary(
        &self,
        other: &Self,
        op: impl FnOnce(&[BigUint], &[BigUint]) -> Vec<BigUint>,
    ) -> Result<Self> {
        self.ctx.check_same(&other.ctx)?;
        let prec = self.prec.min(other.prec);
        let out = op(&self.coeffs, &other.coeffs);
        Ok(Self::from_raw(&self.ctx, out, prec))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.binary(
            other,
            |a, b| with_zq!(self.ctx.base(), z => z.export(&z.add(&z.import(a), &z.import(b)))),
        )
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.binary(
            other,
            |a, b| with_zq!(self.ctx.base(), z => z.export(&z.sub(&z.import(a), &z.import(b)))),
        )
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.binary(
            other,
            |a, b| with_zq!(self.ctx.base(), z => z.export(&z.mul(&z.import(a), &z.import(b)))),
        )
    }

    pub fn neg(&self) -> Self {
        let out = with_zq!(self.ctx.base(), z => z.export(&z.neg(&z.import(&self.coeffs))));
        Self::from_raw(&self.ctx, out, self.prec)
    }

    pub fn pow(&self, e: &BigUint) -> Self {
        let out = with_zq!(self.ctx.base(), z => z.export(&z.pow_big(&z.import(&self.coeffs), e)));
        Self::from_raw(&self.ctx, out, self.prec)
    }

    pub fn pow_u64(&self, e: u64) -> Self {
        self.pow(&BigUint::from(e))
    }

    /// Multiplication by `p^k`; the result is known to `k` more digits (capped
    /// at the working precision).
    pub fn mul_p_pow(&self, k: u32) -> Self {
        let m = self.ctx.precision();
        if k >= m {
            return Self::from_raw(&self.ctx, vec![BigUint::zero(); self.coeffs.len()], m);
        }
        let scale = p_pow_big(self.ctx.p(), k);
        let prec = (self.prec + k).min(self.ctx.precision());
        let out = self.coeffs.iter().map(|c| c * &scale).collect();
        Self::from_raw(&self.ctx, out, prec)
    }

    pub fn valuation(&self) -> Valuation {
        let p = BigUint::from(self.ctx.p());
        let mut best = self.prec;
        for c in &self.coeffs {
            if c.is_zero() {
                continue;
            }
            let mut v = 0;
            let mut r = c.clone();
            while v < best && (&r % &p).is_zero() {
                r /= &p;
                v += 1;
            }
            best = best.min(v);
        }
        if best >= self.prec {
            Valuation::AtLeast(self.prec)
        } else {
            Valuation::Finite(best)
        }
    }

    /// Vanishes at its guaranteed precision.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Equality modulo `p^r`; `false` when either side is known to fewer
    /// than `r` digits.
    pub fn eq_at(&self, other: &Self, r: u32) -> bool {
        if *self.ctx != *other.ctx || r > self.prec || r > other.prec {
            return false;
        }
        let modulus = p_pow_big(self.ctx.p(), r);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .all(|(a, b)| a % &modulus == b % &modulus)
    }

    pub fn invert_unit(&self) -> Result<Self> {
        if self.prec == 0 || !matches!(self.valuation(), Valuation::Finite(0)) {
            return Err(Error::NotAUnit);
        }
        let out = with_zq!(self.ctx.base(), z => {
            unit_inverse(z, &z.import(&self.coeffs)).map(|y| z.export(&y))
        })
        .ok_or(Error::NotAUnit)?;
        Ok(Self::from_raw(&self.ctx, out, self.prec))
    }

    /// `y` with `p^i · y = self`; `y` is known to `prec − i` digits.
    pub fn exact_div_p(&self, i: u32) -> Result<Self> {
        if let Valuation::Finite(v) = self.valuation() {
            if v < i {
                return Err(Error::NotDivisible(i));
            }
        }
        if self.prec < i + 1 {
            return Err(Error::underflow(format!(
                "dividing an element known to {} digits by p^{i}",
                self.prec
            )));
        }
        let q = p_pow_big(self.ctx.p(), i);
        let out = self.coeffs.iter().map(|c| c / &q).collect();
        Ok(Self::from_raw(&self.ctx, out, self.prec - i))
    }

    fn apply_columns(&self, cols: &[Vec<BigUint>]) -> Self {
        if self.ctx.degree() == 1 {
            return self.clone();
        }
        let out = with_zq!(self.ctx.base(), z => {
            let cols: Vec<_> = cols.iter().map(|c| z.import(c)).collect();
            z.export(&z.apply_matrix(&cols, &z.import(&self.coeffs)))
        });
        Self::from_raw(&self.ctx, out, self.prec)
    }

    /// The Frobenius automorphism `φ` of `A`.
    pub fn frobenius(&self) -> Self {
        self.apply_columns(self.ctx.frob_columns())
    }

    pub fn frobenius_inv(&self) -> Self {
        self.apply_columns(self.ctx.frob_inv_columns())
    }

    /// `φ^k` for any integer `k`.
    pub fn frobenius_pow(&self, k: i64) -> Self {
        let d = self.ctx.degree() as i64;
        let k = k.rem_euclid(d);
        let mut out = self.clone();
        for _ in 0..k {
            out = out.frobenius();
        }
        out
    }
}

impl PartialEq for PadicElement {
    /// Equality at the smaller of the two precisions.
    fn eq(&self, other: &Self) -> bool {
        self.eq_at(other, self.prec.min(other.prec))
    }
}

impl fmt::Debug for PadicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (mod p^{})", self.prec)
    }
}

impl fmt::Display for PadicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.len() == 1 {
            return write!(f, "{}", self.coeffs[0]);
        }
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn z3(m: u32) -> Arc<RingContext> {
        RingContext::zp(3, m).unwrap()
    }

    fn gauss(m: u32) -> Arc<RingContext> {
        RingContext::new(3, 2, [1i64, 0, 1], m).unwrap()
    }

    fn int(ctx: &Arc<RingContext>, v: i64) -> PadicElement {
        PadicElement::from_int(ctx, v)
    }

    #[test]
    fn integer_addition() {
        let ctx = z3(10);
        assert_eq!(int(&ctx, 2).add(&int(&ctx, 7)).unwrap(), int(&ctx, 9));
    }

    #[test]
    fn gaussian_square_is_minus_one() {
        let ctx = gauss(10);
        let g = PadicElement::generator(&ctx);
        assert_eq!(g.mul(&g).unwrap(), int(&ctx, -1));
    }

    #[test]
    fn precision_is_minimum() {
        let ctx = z3(10);
        let x = PadicElement::new(&ctx, [5], 10).unwrap();
        let y = PadicElement::new(&ctx, [7], 4).unwrap();
        assert_eq!(x.mul(&y).unwrap().prec(), 4);
    }

    #[test]
    fn context_mismatch() {
        let a = int(&z3(10), 1);
        let b = int(&z3(9), 1);
        assert_eq!(a.add(&b).unwrap_err(), Error::ContextMismatch);
        assert_eq!(
            arith(ArithOp::Neg, &a, &b).unwrap_err(),
            Error::ContextMismatch
        );
    }

    /// Extended Euclid over the integers.
    fn inverse_mod(a: i64, m: i64) -> i64 {
        let (mut r0, mut r1, mut s0, mut s1) = (a, m, 1i64, 0i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        s0.rem_euclid(m)
    }

    #[test]
    fn unit_inverses() {
        let ctx = z3(4);
        assert_eq!(int(&ctx, 1).invert_unit().unwrap(), int(&ctx, 1));
        assert_eq!(inverse_mod(2, 81), 41);
        assert_eq!(int(&ctx, 2).invert_unit().unwrap(), int(&ctx, 41));
        assert_eq!(int(&ctx, 3).invert_unit().unwrap_err(), Error::NotAUnit);
    }

    #[test]
    fn gaussian_inverse() {
        let ctx = gauss(8);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..50 {
            let x = PadicElement::random(&ctx, &mut rng);
            match x.invert_unit() {
                Ok(y) => assert_eq!(x.mul(&y).unwrap(), PadicElement::one(&ctx)),
                Err(e) => {
                    assert_eq!(e, Error::NotAUnit);
                    assert!(x.valuation().is_at_least(1));
                }
            }
        }
    }

    #[test]
    fn valuations() {
        let ctx = z3(10);
        assert_eq!(int(&ctx, 18).valuation(), Valuation::Finite(2));
        assert_eq!(int(&ctx, 1).valuation(), Valuation::Finite(0));
        assert_eq!(int(&ctx, 0).valuation(), Valuation::AtLeast(10));
    }

    #[test]
    fn exact_division() {
        let ctx = z3(5);
        let q = int(&ctx, 6).exact_div_p(1).unwrap();
        assert_eq!(
            (q.clone(), q.prec()),
            (PadicElement::new(&ctx, [2], 4).unwrap(), 4)
        );
        assert_eq!(
            int(&ctx, 2).exact_div_p(1).unwrap_err(),
            Error::NotDivisible(1)
        );

        let ctx = z3(10);
        assert_eq!(504 % 9, 0);
        let q = int(&ctx, 504).exact_div_p(2).unwrap();
        assert_eq!(q, PadicElement::new(&ctx, [504 / 9], 8).unwrap());
        assert_eq!(q.prec(), 8);

        let tiny = PadicElement::new(&ctx, [0], 1).unwrap();
        assert!(matches!(
            tiny.exact_div_p(1),
            Err(Error::PrecisionUnderflow(_))
        ));
    }

    #[test]
    fn frobenius_on_gaussian_integers() {
        let ctx = gauss(10);
        let g = PadicElement::generator(&ctx);
        let phi_g = g.frobenius();
        assert_eq!(phi_g, g.neg());
        // f(φ(g)) = 0 and φ(g) ≡ g^3 mod 3
        let f_val = phi_g
            .mul(&phi_g)
            .unwrap()
            .add(&PadicElement::one(&ctx))
            .unwrap();
        assert!(f_val.is_zero());
        assert!(phi_g.eq_at(&g.pow_u64(3), 1));
    }

    #[test]
    fn frobenius_identity_for_prime_field() {
        let ctx = z3(6);
        let x = int(&ctx, 200);
        assert_eq!(x.frobenius(), x);
        assert_eq!(x.frobenius_inv(), x);
    }

    #[test]
    fn frobenius_laws_on_random_inputs() {
        for (p, d) in [(3u64, 2usize), (5, 2), (7, 3), (3, 4)] {
            let ctx = RingContext::with_default_polynomial(p, d, 7).unwrap();
            let mut rng = ChaCha20Rng::seed_from_u64(p * 10 + d as u64);
            for _ in 0..100 {
                let x = PadicElement::random(&ctx, &mut rng);
                let y = PadicElement::random(&ctx, &mut rng);
                assert_eq!(x.frobenius().frobenius_inv(), x);
                assert_eq!(x.frobenius_pow(d as i64), x);
                assert_eq!(
                    x.add(&y).unwrap().frobenius(),
                    x.frobenius().add(&y.frobenius()).unwrap()
                );
                assert_eq!(
                    x.mul(&y).unwrap().frobenius(),
                    x.frobenius().mul(&y.frobenius()).unwrap()
                );
                assert!(x.frobenius().eq_at(&x.pow_u64(p), 1));
            }
        }
    }

    #[test]
    fn division_undoes_multiplication() {
        let ctx = gauss(9);
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for i in 0..4 {
            let x = PadicElement::random(&ctx, &mut rng).mul_p_pow(i);
            let y = x.exact_div_p(i).unwrap();
            assert_eq!(y.prec(), 9 - i);
            assert!(y.mul_p_pow(i).eq_at(&x, 9 - i));
        }
    }
}
