//! The graded ring `E_n^• = W_n(A) ⊕ E_n^1` with
//! `E_n^1 = ∏_{i=1}^{n−1} A/p^i · dV^i(1)`.
//!
//! The `i = 0` factor `A/p^0 = 0` carries no data and is not stored.
//! Degrees two and higher vanish and have no representation.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::context::RingContext;
use crate::error::{Error, Result};
use crate::padic::PadicElement;
use crate::witt::WittVector;

/// A degree-one element `Σ_{i=1}^{n−1} a_i dV^i(1)` of `E_n^1`, with `a_i`
/// stored at precision exactly `i`.
#[derive(Clone)]
pub struct E1Element {
    ctx: Arc<RingContext>,
    n: usize,
    comps: Vec<PadicElement>,
}

/// An element of `E_n^0 ⊕ E_n^1`.
#[derive(Clone, Debug)]
pub struct EElement {
    deg0: WittVector,
    deg1: E1Element,
}

fn component_at(a: &PadicElement, i: usize) -> Result<PadicElement> {
    let i = i as u32;
    if a.prec() < i {
        return Err(Error::underflow(format!(
            "component {i} of a degree-one element known to {} digits",
            a.prec()
        )));
    }
    Ok(a.truncate(i))
}

impl E1Element {
    /// Components `a_1, …, a_{n−1}`; each must be known to at least `i`
    /// digits and is truncated to exactly `i`.
    pub fn new(ctx: &Arc<RingContext>, n: usize, comps: Vec<PadicElement>) -> Result<Self> {
        ctx.require_odd()?;
        if n == 0 {
            return Err(Error::BadLevel("level must be at least 1".into()));
        }
        if comps.len() != n - 1 {
            return Err(Error::BadLevel(format!(
                "level {n} needs {} components, got {}",
                n - 1,
                comps.len()
            )));
        }
        let comps = comps
            .iter()
            .enumerate()
            .map(|(k, a)| {
                ctx.check_same(a.context())?;
                component_at(a, k + 1)
            })
            .collect::<Result<_>>()?;
        Ok(E1Element {
            ctx: Arc::clone(ctx),
            n,
            comps,
        })
    }

    pub fn zero(ctx: &Arc<RingContext>, n: usize) -> Result<Self> {
        Self::new(ctx, n, vec![PadicElement::zero(ctx); n.saturating_sub(1)])
    }

    /// Sparse constructor from `(i, a_i)` pairs; absent indices are zero.
    pub fn from_sparse(
        ctx: &Arc<RingContext>,
        n: usize,
        entries: impl IntoIterator<Item = (usize, PadicElement)>,
    ) -> Result<Self> {
        let mut comps = vec![PadicElement::zero(ctx); n.saturating_sub(1)];
        for (i, a) in entries {
            if i == 0 || i >= n {
                return Err(Error::BadLevel(format!(
                    "component index {i} outside 1..{n}"
                )));
            }
            comps[i - 1] = a;
        }
        Self::new(ctx, n, comps)
    }

    /// `a · dV^i(1)` in `E_n^1`.
    pub fn dv(ctx: &Arc<RingContext>, n: usize, i: usize, a: PadicElement) -> Result<Self> {
        Self::from_sparse(ctx, n, [(i, a)])
    }

    /// Uniform component `i` modulo `p^i`.
    pub fn random<R: Rng + ?Sized>(ctx: &Arc<RingContext>, n: usize, rng: &mut R) -> Result<Self> {
        let comps = (1..n)
            .map(|i| PadicElement::random_at(ctx, i as u32, rng))
            .collect();
        Self::new(ctx, n, comps)
    }

    pub fn context(&self) -> &Arc<RingContext> {
        &self.ctx
    }

    pub fn level(&self) -> usize {
        self.n
    }

    /// `a_i` for `1 ≤ i < n`.
    pub fn component(&self, i: usize) -> &PadicElement {
        &self.comps[i - 1]
    }

    /// `a_1, …, a_{n−1}`.
    pub fn components(&self) -> &[PadicElement] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(PadicElement::is_zero)
    }

    fn check_pair(&self, other: &Self) -> Result<()> {
        self.ctx.check_same(&other.ctx)?;
        if self.n != other.n {
            return Err(Error::LevelMismatch(self.n, other.n));
        }
        Ok(())
    }

    fn map(&self, n: usize, f: impl Fn(usize) -> Result<PadicElement>) -> Result<Self> {
        let comps = (1..n).map(f).collect::<Result<_>>()?;
        Self::new(&self.ctx, n, comps)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_pair(other)?;
        self.map(self.n, |i| self.component(i).add(other.component(i)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_pair(other)?;
        self.map(self.n, |i| self.component(i).sub(other.component(i)))
    }

    pub fn neg(&self) -> Self {
        self.map(self.n, |i| Ok(self.component(i).neg()))
            .expect("negation keeps precision")
    }

    /// `k · ξ` for an integer `k`.
    pub fn scale(&self, k: i64) -> Self {
        let k = PadicElement::from_int(&self.ctx, k);
        self.map(self.n, |i| self.component(i).mul(&k))
            .expect("scaling keeps precision")
    }

    /// Restriction `E_{n+1}^1 → E_n^1`: drops the top component.
    pub fn restrict(&self) -> Result<Self> {
        if self.n < 2 {
            return Err(Error::BadLevel("restriction needs level at least 2".into()));
        }
        Ok(E1Element {
            ctx: Arc::clone(&self.ctx),
            n: self.n - 1,
            comps: self.comps[..self.n - 2].to_vec(),
        })
    }

    /// `F: E_{n+1}^1 → E_n^1`, component `i` becomes `φ(a_{i+1}) mod p^i`.
    pub fn frobenius(&self) -> Result<Self> {
        if self.n < 2 {
            return Err(Error::BadLevel("Frobenius needs level at least 2".into()));
        }
        self.map(self.n - 1, |i| Ok(self.component(i + 1).frobenius()))
    }

    /// `V: E_n^1 → E_{n+1}^1`, component `i + 1` becomes `p φ^{−1}(a_i) mod p^{i+1}`.
    /// Needs working precision at least `n`.
    pub fn verschiebung(&self) -> Result<Self> {
        self.map(self.n + 1, |i| {
            Ok(if i == 1 {
                PadicElement::zero(&self.ctx)
            } else {
                self.component(i - 1).frobenius_inv().mul_p_pow(1)
            })
        })
    }

    /// Componentwise equality modulo `p^i`.
    pub fn agrees_with(&self, other: &Self) -> Result<bool> {
        self.check_pair(other)?;
        Ok(self.comps.iter().zip(&other.comps).all(|(a, b)| a == b))
    }
}

impl PartialEq for E1Element {
    fn eq(&self, other: &Self) -> bool {
        self.agrees_with(other).unwrap_or(false)
    }
}

impl fmt::Debug for E1Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E1(n={}, ", self.n)?;
        f.debug_list().entries(&self.comps).finish()?;
        write!(f, ")")
    }
}

/// `λ: W_n(A) → E_n^0`, the identity, as a degree-zero element.
pub fn lambda(x: &WittVector) -> Result<EElement> {
    EElement::new(x.clone(), E1Element::zero(x.context(), x.level())?)
}

/// `d(Σ s_φ(a_i)V^i(1)) = Σ (a_i mod p^i) dV^i(1)`.
pub fn diff(x: &WittVector) -> Result<E1Element> {
    let dec = x.v_decompose()?;
    E1Element::new(x.context(), x.level(), dec.coeffs()[1..].to_vec())
}

/// The `W_n(A)`-module structure: component `i` is multiplied by the image of
/// `y` in `A/p^i`.
pub fn module_action(y: &WittVector, xi: &E1Element) -> Result<E1Element> {
    y.context().check_same(xi.context())?;
    if y.level() != xi.level() {
        return Err(Error::LevelMismatch(y.level(), xi.level()));
    }
    if xi.level() == 1 {
        return Ok(xi.clone());
    }
    let residues = y.residues_up_to(xi.level() as u32 - 1)?;
    xi.map(xi.level(), |i| xi.component(i).mul(&residues[i - 1]))
}

impl EElement {
    pub fn new(deg0: WittVector, deg1: E1Element) -> Result<Self> {
        deg0.context().check_same(deg1.context())?;
        if deg0.level() != deg1.level() {
            return Err(Error::LevelMismatch(deg0.level(), deg1.level()));
        }
        Ok(EElement { deg0, deg1 })
    }

    pub fn deg0(&self) -> &WittVector {
        &self.deg0
    }

    pub fn deg1(&self) -> &E1Element {
        &self.deg1
    }

    pub fn level(&self) -> usize {
        self.deg0.level()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::new(self.deg0.add(&other.deg0)?, self.deg1.add(&other.deg1)?)
    }

    /// `(x, ξ)(y, η) = (xy, xη + yξ)`; the `ξη` term lies in `E^2 = 0`.
    pub fn graded_mul(&self, other: &Self) -> Result<Self> {
        let deg1 = module_action(&self.deg0, &other.deg1)?
            .add(&module_action(&other.deg0, &self.deg1)?)?;
        Self::new(self.deg0.mul(&other.deg0)?, deg1)
    }

    /// The differential `(x, ξ) ↦ (0, dx)`.
    pub fn d(&self) -> Result<Self> {
        let ctx = self.deg0.context();
        Self::new(WittVector::zero(ctx, self.level())?, diff(&self.deg0)?)
    }

    pub fn frobenius(&self) -> Result<Self> {
        Self::new(self.deg0.frobenius()?, self.deg1.frobenius()?)
    }

    pub fn verschiebung(&self) -> Result<Self> {
        Self::new(self.deg0.verschiebung(), self.deg1.verschiebung()?)
    }

    pub fn restrict(&self) -> Result<Self> {
        Self::new(self.deg0.restrict()?, self.deg1.restrict()?)
    }

    pub fn agrees_with(&self, other: &Self) -> Result<bool> {
        Ok(self.deg0.agrees_with(&other.deg0)? && self.deg1.agrees_with(&other.deg1)?)
    }
}

/// Whether `Fd([a]) = [a]^{p−1} d([a])` holds in `E_n^1`, with `[a]^{p−1}`
/// computed by repeated Witt multiplication.
pub fn teich_relation_check(a: &PadicElement, n: usize) -> Result<bool> {
    let p = a.context().p();
    let lhs = diff(&WittVector::teichmuller(a, n + 1)?)?.frobenius()?;
    let t = WittVector::teichmuller(a, n)?;
    let rhs = module_action(&t.pow_by_mul(p - 1)?, &diff(&t)?)?;
    lhs.agrees_with(&rhs)
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

    fn teich(ctx: &Arc<RingContext>, v: i64, n: usize) -> WittVector {
        WittVector::teichmuller(&int(ctx, v), n).unwrap()
    }

    fn v_one(ctx: &Arc<RingContext>, i: usize, n: usize) -> WittVector {
        let mut x = WittVector::one(ctx, n - i).unwrap();
        for _ in 0..i {
            x = x.verschiebung();
        }
        x
    }

    fn e1(ctx: &Arc<RingContext>, n: usize, vals: &[i64]) -> E1Element {
        E1Element::new(
            ctx,
            n,
            vals.iter()
                .enumerate()
                .map(|(k, &v)| int(ctx, v).truncate(k as u32 + 1))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn diff_examples() {
        let ctx = zp(3, 12);
        assert!(diff(&WittVector::s_phi(&int(&ctx, 5), 4).unwrap())
            .unwrap()
            .is_zero());
        let d3 = diff(&teich(&ctx, 3, 2)).unwrap();
        assert_eq!(d3, e1(&ctx, 2, &[2]));
        assert_eq!(d3, e1(&ctx, 2, &[-1]));
        let d2 = diff(&teich(&ctx, 2, 3)).unwrap();
        assert_eq!(d2, e1(&ctx, 3, &[2, 2]));
        assert_eq!(d2.component(2).prec(), 2);
    }

    #[test]
    fn d_of_p_is_minus_dv1() {
        for p in [3u64, 5, 7] {
            let ctx = zp(p, 6);
            let d = diff(&teich(&ctx, p as i64, 2)).unwrap();
            assert_eq!(d, e1(&ctx, 2, &[-1]));
            assert_eq!(d, e1(&ctx, 2, &[(p as i64).pow(p as u32 - 1) - 1]));
        }
    }

    #[test]
    fn structure_map_examples() {
        let ctx = zp(3, 10);
        let dv1 = E1Element::dv(&ctx, 2, 1, int(&ctx, 1)).unwrap();
        assert!(dv1.frobenius().unwrap().is_zero());
        assert_eq!(
            dv1.verschiebung().unwrap(),
            E1Element::dv(&ctx, 3, 2, int(&ctx, 3)).unwrap()
        );
        let two = E1Element::dv(&ctx, 2, 1, int(&ctx, 2)).unwrap();
        assert_eq!(
            two.verschiebung().unwrap(),
            E1Element::dv(&ctx, 3, 2, int(&ctx, 6)).unwrap()
        );
        assert!(E1Element::zero(&ctx, 3)
            .unwrap()
            .verschiebung()
            .unwrap()
            .is_zero());
        let top = E1Element::dv(&ctx, 4, 3, int(&ctx, 5)).unwrap();
        assert!(top.restrict().unwrap().is_zero());
        let f = diff(&teich(&ctx, 2, 3)).unwrap().frobenius().unwrap();
        assert_eq!(f, e1(&ctx, 2, &[56]));
    }

    #[test]
    fn module_action_examples() {
        let ctx = zp(3, 10);
        let dv2 = E1Element::dv(&ctx, 3, 2, int(&ctx, 1)).unwrap();
        let got = module_action(&v_one(&ctx, 1, 3), &dv2).unwrap();
        assert_eq!(got, E1Element::dv(&ctx, 3, 2, int(&ctx, 3)).unwrap());
        let two_dv1 = E1Element::dv(&ctx, 2, 1, int(&ctx, 2)).unwrap();
        assert_eq!(
            module_action(&teich(&ctx, 4, 2), &two_dv1).unwrap(),
            two_dv1
        );
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for _ in 0..10 {
            let a = PadicElement::random(&ctx, &mut rng);
            let xi = E1Element::random(&ctx, 4, &mut rng).unwrap();
            let got = module_action(&WittVector::s_phi(&a, 4).unwrap(), &xi).unwrap();
            let want = xi.map(4, |i| xi.component(i).mul(&a)).unwrap();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn graded_mul_examples() {
        let ctx = zp(3, 10);
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let beta = EElement::new(
            WittVector::random(&ctx, 3, &mut rng).unwrap(),
            E1Element::random(&ctx, 3, &mut rng).unwrap(),
        )
        .unwrap();
        let unity = lambda(&WittVector::one(&ctx, 3).unwrap()).unwrap();
        assert!(unity.graded_mul(&beta).unwrap().agrees_with(&beta).unwrap());
        let zero0 = WittVector::zero(&ctx, 3).unwrap();
        let xi =
            EElement::new(zero0.clone(), E1Element::random(&ctx, 3, &mut rng).unwrap()).unwrap();
        let eta = EElement::new(zero0, E1Element::random(&ctx, 3, &mut rng).unwrap()).unwrap();
        let prod = xi.graded_mul(&eta).unwrap();
        assert!(prod.deg0().is_zero() && prod.deg1().is_zero());
        let two = lambda(&teich(&ctx, 2, 2)).unwrap();
        let d2 = EElement::new(
            WittVector::zero(&ctx, 2).unwrap(),
            diff(&teich(&ctx, 2, 2)).unwrap(),
        )
        .unwrap();
        let lhs = two.graded_mul(&two.graded_mul(&d2).unwrap()).unwrap();
        let rhs = lambda(&teich(&ctx, 4, 2)).unwrap().graded_mul(&d2).unwrap();
        assert!(lhs.agrees_with(&rhs).unwrap());
    }

    #[test]
    fn teich_relation_examples() {
        let ctx = zp(3, 10);
        for a in [2, 1, 0] {
            assert!(teich_relation_check(&int(&ctx, a), 2).unwrap());
        }
        let gctx = RingContext::new(5, 2, [2i64, 0, 1], 14).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        for _ in 0..20 {
            assert!(teich_relation_check(&PadicElement::random(&gctx, &mut rng), 5).unwrap());
        }
    }

    #[test]
    fn torsion() {
        for p in [3u64, 5, 7] {
            let ctx = zp(p, 14);
            for n in 2..=5usize {
                let top = E1Element::dv(&ctx, n, n - 1, int(&ctx, 1)).unwrap();
                assert!(top.scale((p as i64).pow(n as u32 - 1)).is_zero());
                assert!(!top.scale((p as i64).pow(n as u32 - 2)).is_zero());
            }
        }
    }
}
