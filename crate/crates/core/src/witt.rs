//! Truncated Witt vectors `W_n(A)` over the coefficient ring of a
//! [`RingContext`].
//!
//! Ring operations and the Frobenius run through ghost components at a padded
//! modulus `p^{M + n − 1}`. The ghost inversion divides coordinate `i` by
//! `p^i`, so the padding absorbs the loss and every output coordinate comes
//! back correct modulo `p^M` for the given lifts. Coordinate `i` of the result
//! is then stamped with the smallest precision among the input coordinates it
//! depends on, which is what the integrality of the universal Witt
//! polynomials guarantees.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use rand::Rng;

use crate::context::RingContext;
use crate::error::{Error, Result};
use crate::padic::PadicElement;
use crate::residue::{with_zq, Elem, ModRing, Zq};

/// An element of `W_n(A)` given by its Witt coordinates `x_0, …, x_{n−1}`.
#[derive(Clone)]
pub struct WittVector {
    ctx: Arc<RingContext>,
    coords: Vec<PadicElement>,
}

/// Ghost components `w_0, …, w_{n−1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GhostVector {
    ctx: Arc<RingContext>,
    ghosts: Vec<PadicElement>,
}

/// Coefficients `a_i` with `x = Σ s_φ(a_i) V^i(1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VDecomposition {
    ctx: Arc<RingContext>,
    coeffs: Vec<PadicElement>,
}

/// Coefficients `a_k` with `z = Σ s_φ(a_k) V^k([p^m])`.
#[derive(Clone, Debug, PartialEq)]
pub struct K0Decomposition {
    ctx: Arc<RingContext>,
    m: u32,
    coeffs: Vec<PadicElement>,
}

enum GhostOp {
    Add,
    Sub,
    Mul,
    Neg,
    Scale(BigInt),
    Pow(u64),
    /// Ghost shift `(w_0, …, w_n) ↦ (w_1, …, w_n)`, i.e. the Frobenius.
    Shift,
}

fn check_level(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::BadLevel("level must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Running minimum.
fn prefix_min(precs: impl IntoIterator<Item = u32>) -> Vec<u32> {
    let mut acc = u32::MAX;
    precs
        .into_iter()
        .map(|q| {
            acc = acc.min(q);
            acc
        })
        .collect()
}

fn ghost_raw<R: ModRing>(z: &Zq<R>, coords: &[Elem<R>]) -> Vec<Elem<R>> {
    let n = coords.len();
    // pw[j] = x_j^{p^{i−j}} while computing w_i
    let mut pw: Vec<Elem<R>> = Vec::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    for (i, x) in coords.iter().enumerate() {
        for q in pw.iter_mut() {
            *q = z.pow_p(q);
        }
        pw.push(x.clone());
        let mut w = pw[0].clone();
        for (j, q) in pw.iter().enumerate().skip(1) {
            z.add_assign(&mut w, &z.scale(q, &z.ring.p_pow(j as u32)));
        }
        out.push(w);
        debug_assert_eq!(pw.len(), i + 1);
    }
    out
}

/// Exact ghost inversion; every remainder must be divisible by `p^i`.
fn ghost_inverse_raw<R: ModRing>(z: &Zq<R>, ghosts: &[Elem<R>]) -> Result<Vec<Elem<R>>> {
    let mut pw: Vec<Elem<R>> = Vec::with_capacity(ghosts.len());
    let mut out = Vec::with_capacity(ghosts.len());
    for (i, w) in ghosts.iter().enumerate() {
        for q in pw.iter_mut() {
            *q = z.pow_p(q);
        }
        let mut rem = w.clone();
        for (j, q) in pw.iter().enumerate() {
            rem = z.sub(&rem, &z.scale(q, &z.ring.p_pow(j as u32)));
        }
        let x = z
            .div_p_pow(&rem, i as u32)
            .ok_or(Error::NotInGhostImage(i))?;
        pw.push(x.clone());
        out.push(x);
    }
    Ok(out)
}

fn apply_ghost_op<R: ModRing>(z: &Zq<R>, op: &GhostOp, inputs: &[Vec<Elem<R>>]) -> Vec<Elem<R>> {
    let x = &inputs[0];
    match op {
        GhostOp::Add => x.iter().zip(&inputs[1]).map(|(a, b)| z.add(a, b)).collect(),
        GhostOp::Sub => x.iter().zip(&inputs[1]).map(|(a, b)| z.sub(a, b)).collect(),
        GhostOp::Mul => x.iter().zip(&inputs[1]).map(|(a, b)| z.mul(a, b)).collect(),
        GhostOp::Neg => x.iter().map(|a| z.neg(a)).collect(),
        GhostOp::Scale(k) => {
            let k = z.ring.reduce_signed(k);
            x.iter().map(|a| z.scale(a, &k)).collect()
        }
        GhostOp::Pow(e) => x.iter().map(|a| z.pow_u64(a, *e)).collect(),
        GhostOp::Shift => x[1..].to_vec(),
    }
}

/// Runs `op` on ghost components at the padded modulus and stamps the output
/// coordinates with `precs`.
fn transport(inputs: &[&WittVector], op: GhostOp, precs: Vec<u32>) -> Result<WittVector> {
    let ctx = &inputs[0].ctx;
    if let Some(i) = precs.iter().position(|&q| q == 0) {
        return Err(Error::underflow(format!(
            "Witt coordinate {i} would carry no guaranteed digits"
        )));
    }
    let level = inputs.iter().map(|x| x.level()).max().unwrap_or(1);
    let exp = ctx.precision() + level as u32 - 1;
    let any = ctx.zq(exp);
    let coords: Vec<Vec<BigUint>> = with_zq!(&any, z => {
        let ghosts: Vec<Vec<Vec<_>>> = inputs
            .iter()
            .map(|x| {
                let c: Vec<_> = x.coords.iter().map(|e| z.import(e.coeffs())).collect();
                ghost_raw(z, &c)
            })
            .collect();
        let combined = apply_ghost_op(z, &op, &ghosts);
        ghost_inverse_raw(z, &combined)?.iter().map(|c| z.export(c)).collect()
    });
    let coords = coords
        .into_iter()
        .zip(precs)
        .map(|(c, q)| PadicElement::from_raw(ctx, c, q))
        .collect();
    Ok(WittVector {
        ctx: Arc::clone(ctx),
        coords,
    })
}

impl WittVector {
    /// Builds a vector from its coordinates, which must share `ctx`.
    pub fn new(ctx: &Arc<RingContext>, coords: Vec<PadicElement>) -> Result<Self> {
        ctx.require_odd()?;
        check_level(coords.len())?;
        for c in &coords {
            ctx.check_same(c.context())?;
        }
        Ok(WittVector {
            ctx: Arc::clone(ctx),
            coords,
        })
    }

    pub fn zero(ctx: &Arc<RingContext>, n: usize) -> Result<Self> {
        Self::new(ctx, vec![PadicElement::zero(ctx); n])
    }

    pub fn one(ctx: &Arc<RingContext>, n: usize) -> Result<Self> {
        Self::teichmuller(&PadicElement::one(ctx), n)
    }

    /// Integer `k` as `k · 1`.
    pub fn from_int(ctx: &Arc<RingContext>, n: usize, k: i64) -> Result<Self> {
        Self::one(ctx, n)?.scale(k)
    }

    /// Uniform coordinates at full working precision.
    pub fn random<R: Rng + ?Sized>(ctx: &Arc<RingContext>, n: usize, rng: &mut R) -> Result<Self> {
        let coords = (0..n).map(|_| PadicElement::random(ctx, rng)).collect();
        Self::new(ctx, coords)
    }

    /// The Teichmüller lift `[a] = (a, 0, …, 0)`.
    pub fn teichmuller(a: &PadicElement, n: usize) -> Result<Self> {
        let ctx = a.context();
        check_level(n)?;
        let mut coords = vec![a.clone()];
        coords.extend((1..n).map(|_| PadicElement::zero(ctx)));
        Self::new(ctx, coords)
    }

    /// The ring section `s_φ(a)` with ghost components `(a, φ(a), φ²(a), …)`.
    /// Coordinate `i` is known to `a.prec − i` digits.
    pub fn s_phi(a: &PadicElement, n: usize) -> Result<Self> {
        let ctx = a.context();
        ctx.require_odd()?;
        check_level(n)?;
        let mut ghosts = Vec::with_capacity(n);
        let mut g = a.clone();
        for _ in 0..n {
            let next = g.frobenius();
            ghosts.push(g);
            g = next;
        }
        GhostVector::new(ctx, ghosts)?.ghost_inverse()
    }

    pub fn context(&self) -> &Arc<RingContext> {
        &self.ctx
    }

    pub fn level(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[PadicElement] {
        &self.coords
    }

    pub fn precisions(&self) -> Vec<u32> {
        self.coords.iter().map(PadicElement::prec).collect()
    }

    /// All coordinates vanish at their guaranteed precision.
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(PadicElement::is_zero)
    }

    fn check_pair(&self, other: &Self) -> Result<()> {
        self.ctx.check_same(&other.ctx)?;
        if self.level() != other.level() {
            return Err(Error::LevelMismatch(self.level(), other.level()));
        }
        Ok(())
    }

    fn binary(&self, other: &Self, op: GhostOp) -> Result<Self> {
        self.check_pair(other)?;
        let precs = prefix_min(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.prec().min(b.prec())),
        );
        transport(&[self, other], op, precs)
    }

    fn unary(&self, op: GhostOp) -> Result<Self> {
        transport(&[self], op, prefix_min(self.precisions()))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.binary(other, GhostOp::Add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.binary(other, GhostOp::Sub)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.binary(other, GhostOp::Mul)
    }

    pub fn neg(&self) -> Result<Self> {
        self.unary(GhostOp::Neg)
    }

    /// `k · x` for an integer `k`.
    pub fn scale(&self, k: i64) -> Result<Self> {
        self.unary(GhostOp::Scale(BigInt::from(k)))
    }

    /// `x^e` in one ghost transport.
    pub fn pow(&self, e: u64) -> Result<Self> {
        self.unary(GhostOp::Pow(e))
    }

    /// `x^e` by square-and-multiply with [`WittVector::mul`].
    pub fn pow_by_mul(&self, mut e: u64) -> Result<Self> {
        let mut acc = Self::one(&self.ctx, self.level())?;
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Verschiebung `W_n → W_{n+1}`: the coordinate shift `(0, x_0, …)`.
    pub fn verschiebung(&self) -> Self {
        let mut coords = vec![PadicElement::zero(&self.ctx)];
        coords.extend(self.coords.iter().cloned());
        WittVector {
            ctx: Arc::clone(&self.ctx),
            coords,
        }
    }

    /// Witt vector Frobenius `W_{n+1} → W_n`.
    pub fn frobenius(&self) -> Result<Self> {
        if self.level() < 2 {
            return Err(Error::BadLevel("Frobenius needs level at least 2".into()));
        }
        let pm = prefix_min(self.precisions());
        transport(&[self], GhostOp::Shift, pm[1..].to_vec())
    }

    /// Restriction `W_{n+1} → W_n`.
    pub fn restrict(&self) -> Result<Self> {
        self.restrict_to(self.level().saturating_sub(1))
    }

    /// Restriction to level `m ≤ n`.
    pub fn restrict_to(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.level() {
            return Err(Error::BadLevel(format!(
                "cannot restrict level {} to {m}",
                self.level()
            )));
        }
        Ok(WittVector {
            ctx: Arc::clone(&self.ctx),
            coords: self.coords[..m].to_vec(),
        })
    }

    /// Inverse of [`WittVector::verschiebung`]; the leading coordinate must
    /// vanish at its guaranteed precision.
    pub(crate) fn unshift(&self, stage: usize) -> Result<Self> {
        if !self.coords[0].is_zero() {
            return Err(Error::InternalNonzeroLead(stage));
        }
        check_level(self.level() - 1)?;
        Ok(WittVector {
            ctx: Arc::clone(&self.ctx),
            coords: self.coords[1..].to_vec(),
        })
    }

    /// `(x_j · c^{p^j})_j`, the product with the Teichmüller lift `[p^m]`.
    fn times_teich_p_pow(&self, m: u32) -> Self {
        let p = self.ctx.p();
        let mut shift = m as u64;
        let cap = self.ctx.precision() as u64;
        let coords = self
            .coords
            .iter()
            .map(|c| {
                let out = c.mul_p_pow(shift.min(cap) as u32);
                shift = shift.saturating_mul(p);
                out
            })
            .collect();
        WittVector {
            ctx: Arc::clone(&self.ctx),
            coords,
        }
    }

    /// Ghost components. `w_i` is known modulo `p^{q_j + i}` through each
    /// contribution `p^j x_j^{p^{i−j}}` with `x_j` known modulo `p^{q_j}`.
    pub fn ghost(&self) -> GhostVector {
        let any = self.ctx.base();
        let raw: Vec<Vec<BigUint>> = with_zq!(any, z => {
            let c: Vec<_> = self.coords.iter().map(|e| z.import(e.coeffs())).collect();
            ghost_raw(z, &c).iter().map(|w| z.export(w)).collect()
        });
        let m = self.ctx.precision();
        let precs: Vec<u32> = (0..self.level())
            .map(|i| {
                self.coords[..=i]
                    .iter()
                    .enumerate()
                    .map(|(j, x)| {
                        if x.prec() == 0 {
                            j as u32
                        } else {
                            x.prec() + i as u32
                        }
                    })
                    .fold(m, u32::min)
            })
            .collect();
        let ghosts = raw
            .into_iter()
            .zip(precs)
            .map(|(c, q)| PadicElement::from_raw(&self.ctx, c, q))
            .collect();
        GhostVector {
            ctx: Arc::clone(&self.ctx),
            ghosts,
        }
    }

    /// Coefficients with `x = Σ s_φ(a_i) V^i(1)`.
    /// With uniform input precision `P`, `a_i` is known to `P − i` digits.
    pub fn v_decompose(&self) -> Result<VDecomposition> {
        let n = self.level();
        let mut y = self.clone();
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            let lead = y.coords[0].clone();
            if lead.prec() == 0 {
                return Err(Error::underflow(format!(
                    "V-decomposition stage {k} has no digits"
                )));
            }
            coeffs.push(lead.frobenius_pow(-(k as i64)));
            if k + 1 < n {
                let s = Self::s_phi(&lead, y.level())?;
                y = y.sub(&s)?.unshift(k)?;
            }
        }
        Ok(VDecomposition {
            ctx: Arc::clone(&self.ctx),
            coeffs,
        })
    }

    /// Residue of `x` under `W_n(A) → A/p^i`, `Σ s_φ(a_j)V^j(1) ↦ Σ a_j p^j`.
    pub fn wn_to_residue(&self, i: u32) -> Result<PadicElement> {
        if i == 0 {
            return Err(Error::BadLevel("residue index must be at least 1".into()));
        }
        Ok(self.residues_up_to(i)?.pop().expect("i ≥ 1"))
    }

    /// Residues modulo `p^i` for `i = 1..=k` from a single decomposition.
    pub fn residues_up_to(&self, k: u32) -> Result<Vec<PadicElement>> {
        if k > self.ctx.precision() {
            return Err(Error::underflow(format!(
                "residue modulo p^{k} exceeds working precision {}",
                self.ctx.precision()
            )));
        }
        let len = self.level().min(k as usize);
        let dec = self.restrict_to(len.max(1))?.v_decompose()?;
        let terms: Vec<PadicElement> = dec
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, a)| a.mul_p_pow(j as u32))
            .collect();
        let mut out = Vec::with_capacity(k as usize);
        for i in 1..=k {
            let mut acc = PadicElement::zero(&self.ctx);
            for t in terms.iter().take(i as usize) {
                acc = acc.add(t)?;
            }
            if acc.prec() < i {
                return Err(Error::underflow(format!(
                    "residue modulo p^{i} known to {} digits",
                    acc.prec()
                )));
            }
            out.push(acc.truncate(i));
        }
        Ok(out)
    }

    /// Decomposition of a kernel element:
    /// `z = Σ s_φ(a_k) V^k([p^m])` for `z` in the kernel of `W_n(A) → W_n(A/p^m)`.
    pub fn k0_decompose(&self, m: u32) -> Result<K0Decomposition> {
        if m == 0 {
            return Err(Error::BadLevel("k0 exponent must be at least 1".into()));
        }
        for c in &self.coords {
            if c.prec() < m {
                return Err(Error::underflow(format!(
                    "coordinate known to {} digits cannot be tested modulo p^{m}",
                    c.prec()
                )));
            }
            if !c.valuation().is_at_least(m) {
                return Err(Error::NotInKernel(m));
            }
        }
        let n = self.level();
        let mut y = self.clone();
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            let b = y.coords[0].exact_div_p(m).map_err(|e| match e {
                Error::NotDivisible(_) => Error::NotInKernel(m),
                other => other,
            })?;
            coeffs.push(b.frobenius_pow(-(k as i64)));
            if k + 1 < n {
                let t = Self::s_phi(&b, y.level())?.times_teich_p_pow(m);
                y = y.sub(&t)?.unshift(k)?;
            }
        }
        Ok(K0Decomposition {
            ctx: Arc::clone(&self.ctx),
            m,
            coeffs,
        })
    }

    /// Coordinate-wise equality at the smaller stamped precision; errors when
    /// some coordinate pair shares no guaranteed digit.
    pub fn agrees_with(&self, other: &Self) -> Result<bool> {
        self.check_pair(other)?;
        let mut same = true;
        for (i, (a, b)) in self.coords.iter().zip(&other.coords).enumerate() {
            let r = a.prec().min(b.prec());
            if r == 0 {
                return Err(Error::underflow(format!(
                    "coordinate {i} compared with no digits"
                )));
            }
            same &= a.eq_at(b, r);
        }
        Ok(same)
    }
}

impl PartialEq for WittVector {
    fn eq(&self, other: &Self) -> bool {
        *self.ctx == *other.ctx
            && self.level() == other.level()
            && self.coords.iter().zip(&other.coords).all(|(a, b)| a == b)
    }
}

impl fmt::Debug for WittVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.coords).finish()
    }
}

impl GhostVector {
    pub fn new(ctx: &Arc<RingContext>, ghosts: Vec<PadicElement>) -> Result<Self> {
        ctx.require_odd()?;
        check_level(ghosts.len())?;
        for g in &ghosts {
            ctx.check_same(g.context())?;
        }
        Ok(GhostVector {
            ctx: Arc::clone(ctx),
            ghosts,
        })
    }

    pub fn components(&self) -> &[PadicElement] {
        &self.ghosts
    }

    /// The unique Witt vector with these ghost components. Coordinate `i`
    /// is known to `min(Q_i − i, q_0, …, q_{i−1})` digits where `Q_i` is the
    /// precision of `w_i`.
    pub fn ghost_inverse(&self) -> Result<WittVector> {
        let ctx = &self.ctx;
        let coords = with_zq!(ctx.base(), z => {
            let mut pw: Vec<Vec<_>> = Vec::new();
            let mut precs: Vec<u32> = Vec::new();
            let mut coords = Vec::with_capacity(self.ghosts.len());
            for (i, w) in self.ghosts.iter().enumerate() {
                let i32_ = i as u32;
                for q in pw.iter_mut() {
                    *q = z.pow_p(q);
                }
                let mut rem = z.import(w.coeffs());
                let mut known = w.prec();
                for (j, q) in pw.iter().enumerate() {
                    rem = z.sub(&rem, &z.scale(q, &z.ring.p_pow(j as u32)));
                    known = known.min(precs[j] + i32_);
                }
                if !z.divisible_by_p_pow(&rem, known.min(i32_)) {
                    return Err(Error::NotInGhostImage(i));
                }
                if known < i32_ + 1 {
                    return Err(Error::underflow(format!(
                        "ghost component {i} known to {known} digits cannot be divided by p^{i}"
                    )));
                }
                let x = z.div_p_pow(&rem, i32_).expect("divisibility checked");
                let x = PadicElement::from_raw(ctx, z.export(&x), known - i32_);
                pw.push(z.import(x.coeffs()));
                precs.push(x.prec());
                coords.push(x);
            }
            coords
        });
        Ok(WittVector {
            ctx: Arc::clone(ctx),
            coords,
        })
    }
}

impl VDecomposition {
    pub fn new(ctx: &Arc<RingContext>, coeffs: Vec<PadicElement>) -> Result<Self> {
        ctx.require_odd()?;
        check_level(coeffs.len())?;
        for c in &coeffs {
            ctx.check_same(c.context())?;
        }
        Ok(VDecomposition {
            ctx: Arc::clone(ctx),
            coeffs,
        })
    }

    pub fn context(&self) -> &Arc<RingContext> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[PadicElement] {
        &self.coeffs
    }

    pub fn level(&self) -> usize {
        self.coeffs.len()
    }

    /// `Σ V^i(s_φ(φ^i(a_i)))`, which equals `Σ s_φ(a_i) V^i(1)`.
    pub fn recompose(&self) -> Result<WittVector> {
        let n = self.level();
        let mut acc = WittVector::zero(&self.ctx, n)?;
        for (i, a) in self.coeffs.iter().enumerate() {
            let mut term = WittVector::s_phi(&a.frobenius_pow(i as i64), n - i)?;
            for _ in 0..i {
                term = term.verschiebung();
            }
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// `Σ s_φ(a_i) · V^i(1)` with Witt products, the literal form.
    pub fn recompose_by_products(&self) -> Result<WittVector> {
        let n = self.level();
        let mut acc = WittVector::zero(&self.ctx, n)?;
        for (i, a) in self.coeffs.iter().enumerate() {
            let mut v = WittVector::one(&self.ctx, n - i)?;
            for _ in 0..i {
                v = v.verschiebung();
            }
            acc = acc.add(&WittVector::s_phi(a, n)?.mul(&v)?)?;
        }
        Ok(acc)
    }

    /// Equality of every coefficient at its smaller stamped precision.
    pub fn agrees_with(&self, other: &Self) -> Result<bool> {
        agree_coeffs(&self.coeffs, &other.coeffs)
    }
}

impl K0Decomposition {
    pub fn new(ctx: &Arc<RingContext>, m: u32, coeffs: Vec<PadicElement>) -> Result<Self> {
        ctx.require_odd()?;
        check_level(coeffs.len())?;
        if m == 0 {
            return Err(Error::BadLevel("k0 exponent must be at least 1".into()));
        }
        for c in &coeffs {
            ctx.check_same(c.context())?;
        }
        Ok(K0Decomposition {
            ctx: Arc::clone(ctx),
            m,
            coeffs,
        })
    }

    pub fn context(&self) -> &Arc<RingContext> {
        &self.ctx
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn coeffs(&self) -> &[PadicElement] {
        &self.coeffs
    }

    pub fn level(&self) -> usize {
        self.coeffs.len()
    }

    /// `Σ V^k(s_φ(φ^k(a_k)) · [p^m])`, which equals `Σ s_φ(a_k) V^k([p^m])`.
    pub fn recompose(&self) -> Result<WittVector> {
        let n = self.level();
        let mut acc = WittVector::zero(&self.ctx, n)?;
        for (k, a) in self.coeffs.iter().enumerate() {
            let mut term =
                WittVector::s_phi(&a.frobenius_pow(k as i64), n - k)?.times_teich_p_pow(self.m);
            for _ in 0..k {
                term = term.verschiebung();
            }
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// `Σ s_φ(a_k) · V^k([p^m])` with Witt products, the literal form.
    pub fn recompose_by_products(&self) -> Result<WittVector> {
        let n = self.level();
        let pm = PadicElement::one(&self.ctx).mul_p_pow(self.m);
        let mut acc = WittVector::zero(&self.ctx, n)?;
        for (k, a) in self.coeffs.iter().enumerate() {
            let mut v = WittVector::teichmuller(&pm, n - k)?;
            for _ in 0..k {
                v = v.verschiebung();
            }
            acc = acc.add(&WittVector::s_phi(a, n)?.mul(&v)?)?;
        }
        Ok(acc)
    }

    pub fn agrees_with(&self, other: &Self) -> Result<bool> {
        Ok(self.m == other.m && agree_coeffs(&self.coeffs, &other.coeffs)?)
    }
}

fn agree_coeffs(a: &[PadicElement], b: &[PadicElement]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::LevelMismatch(a.len(), b.len()));
    }
    let mut same = true;
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        x.context().check_same(y.context())?;
        let r = x.prec().min(y.prec());
        if r == 0 {
            return Err(Error::underflow(format!(
                "coefficient {i} compared with no digits"
            )));
        }
        same &= x.eq_at(y, r);
    }
    Ok(same)
}

/// Closed form for the decomposition of `[a]`:
/// `a_0 = a`, `a_i = φ^{−i}((a^{p^i} − φ(a)^{p^{i−1}}) / p^i)`.
pub fn teich_coefficients(a: &PadicElement, n: usize) -> Result<VDecomposition> {
    let ctx = a.context();
    ctx.require_odd()?;
    check_level(n)?;
    let p = BigUint::from(ctx.p());
    let fa = a.frobenius();
    let mut coeffs = vec![a.clone()];
    let mut pi = BigUint::from(1u32);
    for i in 1..n {
        let prev = pi.clone();
        pi *= &p;
        let diff = a.pow(&pi).sub(&fa.pow(&prev))?;
        let q = diff.exact_div_p(i as u32)?;
        coeffs.push(q.frobenius_pow(-(i as i64)));
    }
    VDecomposition::new(ctx, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn zp(p: u64, m: u32) -> Arc<RingContext> {
        RingContext::zp(p, m).unwrap()
    }

    fn int(ctx: &Arc<RingContext>, v: i64) -> PadicElement {
        PadicElement::from_int(ctx, v)
    }

    fn witt(ctx: &Arc<RingContext>, vals: &[i64]) -> WittVector {
        WittVector::new(ctx, vals.iter().map(|&v| int(ctx, v)).collect()).unwrap()
    }

    fn assert_coords(x: &WittVector, vals: &[i64]) {
        let ctx = x.context();
        assert_eq!(x.level(), vals.len());
        for (c, &v) in x.coords().iter().zip(vals) {
            assert!(c.eq_at(&int(ctx, v), c.prec()), "{x:?} vs {vals:?}");
        }
    }

    /// Ghost components by direct integer evaluation.
    fn ghost_oracle(p: i128, xs: &[i128], modulus: i128) -> Vec<i128> {
        (0..xs.len())
            .map(|i| {
                let mut w = 0i128;
                for (j, &x) in xs.iter().enumerate().take(i + 1) {
                    let mut t = x.rem_euclid(modulus);
                    for _ in 0..(i - j) {
                        let base = t;
                        for _ in 1..p {
                            t = (t * base).rem_euclid(modulus);
                        }
                    }
                    w = (w + p.pow(j as u32) * t).rem_euclid(modulus);
                }
                w
            })
            .collect()
    }

    #[test]
    fn ghost_examples() {
        let ctx = zp(3, 10);
        let g = witt(&ctx, &[2, 1]).ghost();
        assert_eq!(g.components()[0], int(&ctx, 2));
        assert_eq!(g.components()[1], int(&ctx, 11));
        let t = WittVector::teichmuller(&int(&ctx, 2), 3).unwrap().ghost();
        let want = [2, 8, 512];
        for (w, v) in t.components().iter().zip(want) {
            assert_eq!(*w, int(&ctx, v));
        }
        let v1 = WittVector::one(&ctx, 1).unwrap().verschiebung().ghost();
        assert_eq!(v1.components()[0], int(&ctx, 0));
        assert_eq!(v1.components()[1], int(&ctx, 3));
    }

    #[test]
    fn ghost_matches_integer_oracle() {
        let ctx = zp(5, 6);
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..50 {
            let x = WittVector::random(&ctx, 4, &mut rng).unwrap();
            let xs: Vec<i128> = x
                .coords()
                .iter()
                .map(|c| c.coeffs()[0].to_string().parse().unwrap())
                .collect();
            let want = ghost_oracle(5, &xs, 5i128.pow(6));
            for (w, v) in x.ghost().components().iter().zip(want) {
                assert!(w.eq_at(&int(&ctx, v as i64), 6));
            }
        }
    }

    #[test]
    fn ghost_inverse_examples() {
        let ctx = zp(3, 10);
        let g = |a: i64, b: i64| GhostVector::new(&ctx, vec![int(&ctx, a), int(&ctx, b)]).unwrap();
        assert_coords(&g(2, 11).ghost_inverse().unwrap(), &[2, 1]);
        let x = g(2, 2).ghost_inverse().unwrap();
        assert_coords(&x, &[2, -2]);
        assert_eq!(x.precisions(), vec![10, 9]);
        assert_eq!(
            g(0, 1).ghost_inverse().unwrap_err(),
            Error::NotInGhostImage(1)
        );
    }

    #[test]
    fn ghost_inverse_underflow() {
        let ctx = zp(3, 10);
        let w = vec![int(&ctx, 2), int(&ctx, 2).truncate(1)];
        let err = GhostVector::new(&ctx, w)
            .unwrap()
            .ghost_inverse()
            .unwrap_err();
        assert_eq!(err.kind(), "PrecisionUnderflow");
    }

    #[test]
    fn witt_arithmetic_examples() {
        let ctx = zp(3, 10);
        let one = WittVector::one(&ctx, 2).unwrap();
        let two = one.add(&one).unwrap();
        assert_coords(&two, &[2, -2]);
        assert_eq!(two.precisions(), vec![10, 10]);
        let prod = witt(&ctx, &[2, 0]).mul(&witt(&ctx, &[3, 0])).unwrap();
        assert_coords(&prod, &[6, 0]);
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let x = WittVector::random(&ctx, 4, &mut rng).unwrap();
        assert!(x.add(&x.neg().unwrap()).unwrap().is_zero());
        assert_coords(&WittVector::from_int(&ctx, 2, 3).unwrap(), &[3, -8]);
    }

    #[test]
    fn ring_operations_follow_ghosts() {
        let ctx = RingContext::new(5, 2, [2i64, 0, 1], 7).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..30 {
            let x = WittVector::random(&ctx, 4, &mut rng).unwrap();
            let y = WittVector::random(&ctx, 4, &mut rng).unwrap();
            let (gx, gy) = (x.ghost(), y.ghost());
            let gs = x.add(&y).unwrap().ghost();
            let gp = x.mul(&y).unwrap().ghost();
            for i in 0..4 {
                let (a, b) = (&gx.components()[i], &gy.components()[i]);
                assert_eq!(gs.components()[i], a.add(b).unwrap());
                assert_eq!(gp.components()[i], a.mul(b).unwrap());
            }
            assert_eq!(x.pow(3).unwrap(), x.pow_by_mul(3).unwrap());
        }
    }

    #[test]
    fn verschiebung_and_frobenius() {
        let ctx = zp(3, 10);
        let one = WittVector::one(&ctx, 1).unwrap();
        assert_coords(&one.verschiebung(), &[0, 1]);
        assert_coords(&one.verschiebung().verschiebung(), &[0, 0, 1]);
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        for _ in 0..20 {
            let x = WittVector::random(&ctx, 3, &mut rng).unwrap();
            let fv = x.verschiebung().frobenius().unwrap();
            assert_eq!(fv, x.scale(3).unwrap());
            let gv = x.verschiebung().ghost();
            let gx = x.ghost();
            for i in 1..4 {
                assert_eq!(gv.components()[i], gx.components()[i - 1].mul_p_pow(1));
            }
            let a = PadicElement::random(&ctx, &mut rng);
            let fa = WittVector::teichmuller(&a, 3).unwrap().frobenius().unwrap();
            assert_eq!(fa, WittVector::teichmuller(&a.pow_u64(3), 2).unwrap());
            assert_eq!(
                x.restrict().unwrap().frobenius().unwrap(),
                x.frobenius().unwrap().restrict().unwrap()
            );
        }
        assert!(one.restrict().is_err());
        let v2 = one.verschiebung().verschiebung();
        assert!(v2.restrict().unwrap().is_zero());
    }

    #[test]
    fn s_phi_examples() {
        let ctx = zp(3, 10);
        let s = WittVector::s_phi(&int(&ctx, 2), 2).unwrap();
        assert_coords(&s, &[2, -2]);
        assert_eq!(s, WittVector::from_int(&ctx, 2, 2).unwrap());
        assert_eq!(
            WittVector::s_phi(&int(&ctx, 1), 4).unwrap(),
            WittVector::one(&ctx, 4).unwrap()
        );
        let gctx = RingContext::new(3, 2, [1i64, 0, 1], 10).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = PadicElement::random(&gctx, &mut rng);
            let b = PadicElement::random(&gctx, &mut rng);
            let sa = WittVector::s_phi(&a, 4).unwrap();
            let sb = WittVector::s_phi(&b, 4).unwrap();
            assert_eq!(
                WittVector::s_phi(&a.add(&b).unwrap(), 4).unwrap(),
                sa.add(&sb).unwrap()
            );
            assert_eq!(
                WittVector::s_phi(&a.mul(&b).unwrap(), 4).unwrap(),
                sa.mul(&sb).unwrap()
            );
            let fs = WittVector::s_phi(&a, 5).unwrap().frobenius().unwrap();
            assert_eq!(fs, WittVector::s_phi(&a.frobenius(), 4).unwrap());
        }
    }

    #[test]
    fn v_decompose_examples() {
        let ctx = zp(3, 12);
        let v1 = WittVector::one(&ctx, 1).unwrap().verschiebung();
        let dec = v1.v_decompose().unwrap();
        assert_eq!(dec.coeffs(), &[int(&ctx, 0), int(&ctx, 1)]);
        let a = int(&ctx, 7);
        let dec = WittVector::s_phi(&a, 3).unwrap().v_decompose().unwrap();
        assert_eq!(dec.coeffs(), &[a, int(&ctx, 0), int(&ctx, 0)]);
        let dec = WittVector::teichmuller(&int(&ctx, 2), 3)
            .unwrap()
            .v_decompose()
            .unwrap();
        assert_eq!(dec.coeffs(), &[int(&ctx, 2), int(&ctx, 2), int(&ctx, 56)]);
        let precs: Vec<u32> = dec.coeffs().iter().map(|c| c.prec()).collect();
        assert_eq!(precs, vec![12, 11, 10]);
        // 2 + 3·2 + 9·56 = 512 = 2^9
        assert_eq!(2 + 3 * 2 + 9 * 56, 2i64.pow(9));
    }

    #[test]
    fn teich_coefficients_examples() {
        let ctx = zp(3, 12);
        let dec = teich_coefficients(&int(&ctx, 2), 3).unwrap();
        assert_eq!(dec.coeffs(), &[int(&ctx, 2), int(&ctx, 2), int(&ctx, 56)]);
        let dec = teich_coefficients(&int(&ctx, 3), 2).unwrap();
        assert_eq!(dec.coeffs()[1], int(&ctx, 8));
        assert!(dec.coeffs()[1].eq_at(&int(&ctx, 3i64.pow(2) - 1), 2));
    }

    #[test]
    fn decompositions_roundtrip() {
        let ctx = RingContext::new(7, 2, [1i64, 0, 1], 14).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        for _ in 0..10 {
            let x = WittVector::random(&ctx, 5, &mut rng).unwrap();
            let dec = x.v_decompose().unwrap();
            assert!(dec.recompose().unwrap().agrees_with(&x).unwrap());
            assert!(dec
                .recompose_by_products()
                .unwrap()
                .agrees_with(&x)
                .unwrap());
            let a = PadicElement::random(&ctx, &mut rng);
            let t = WittVector::teichmuller(&a, 5)
                .unwrap()
                .v_decompose()
                .unwrap();
            assert!(t.agrees_with(&teich_coefficients(&a, 5).unwrap()).unwrap());
        }
    }

    #[test]
    fn v_decompose_needs_level_many_digits() {
        let ctx = zp(3, 3);
        let x = WittVector::one(&ctx, 3).unwrap();
        assert!(x.v_decompose().is_ok());
        let ctx = zp(3, 2);
        let x = WittVector::one(&ctx, 3).unwrap();
        assert_eq!(x.v_decompose().unwrap_err().kind(), "PrecisionUnderflow");
    }

    #[test]
    fn residue_examples() {
        let ctx = zp(3, 10);
        let v1 = WittVector::one(&ctx, 1).unwrap().verschiebung();
        assert_eq!(v1.wn_to_residue(2).unwrap(), int(&ctx, 3).truncate(2));
        let four = WittVector::teichmuller(&int(&ctx, 4), 2).unwrap();
        assert_eq!(four.wn_to_residue(1).unwrap(), int(&ctx, 1).truncate(1));
        for j in 0..4 {
            let mut v = WittVector::one(&ctx, 4 - j).unwrap();
            for _ in 0..j {
                v = v.verschiebung();
            }
            for i in (j as u32).max(1)..=4 {
                let r = v.wn_to_residue(i).unwrap();
                assert!(r.eq_at(&int(&ctx, 3i64.pow(j as u32)), i));
            }
        }
    }

    #[test]
    fn k0_examples() {
        let ctx = zp(3, 10);
        let three = WittVector::teichmuller(&int(&ctx, 3), 2).unwrap();
        let dec = three.k0_decompose(1).unwrap();
        assert_eq!(dec.coeffs(), &[int(&ctx, 1), int(&ctx, 0)]);
        let v3 = WittVector::teichmuller(&int(&ctx, 3), 1)
            .unwrap()
            .verschiebung();
        let dec = v3.k0_decompose(1).unwrap();
        assert_eq!(dec.coeffs(), &[int(&ctx, 0), int(&ctx, 1)]);
        let three_one = WittVector::from_int(&ctx, 2, 3).unwrap();
        assert_coords(&three_one, &[3, -8]);
        assert_eq!(
            three_one.k0_decompose(1).unwrap_err(),
            Error::NotInKernel(1)
        );
    }

    #[test]
    fn k0_roundtrip_random() {
        let ctx = RingContext::new(5, 2, [2i64, 0, 1], 12).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for m in 1..=2u32 {
            for _ in 0..10 {
                let coords = (0..4)
                    .map(|_| PadicElement::random(&ctx, &mut rng).mul_p_pow(m))
                    .collect();
                let z = WittVector::new(&ctx, coords).unwrap();
                let dec = z.k0_decompose(m).unwrap();
                assert!(dec.recompose().unwrap().agrees_with(&z).unwrap());
                assert!(dec
                    .recompose_by_products()
                    .unwrap()
                    .agrees_with(&z)
                    .unwrap());
            }
        }
    }

    #[test]
    fn refuses_p_two() {
        let ctx = zp(2, 8);
        let a = int(&ctx, 1);
        assert_eq!(
            WittVector::teichmuller(&a, 2).unwrap_err(),
            Error::OddPrimeRequired(2)
        );
        assert_eq!(
            WittVector::s_phi(&a, 2).unwrap_err(),
            Error::OddPrimeRequired(2)
        );
        assert_eq!(
            teich_coefficients(&a, 2).unwrap_err(),
            Error::OddPrimeRequired(2)
        );
    }
}
