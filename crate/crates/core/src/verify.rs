//! Seeded randomized verification of the algebraic laws of `W_n(A)` and `E_n^•`.
//!
//! Each `(grid point, law)` pair draws its trials from its own ChaCha20
//! stream: the 256-bit key is the 64-bit seed in little-endian order followed
//! by 24 zero bytes, and the stream number is `grid_index · 2^32 + law_index`.
//! Reports are therefore independent of scheduling and thread count.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use num_bigint::BigInt;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map};

use crate::complex::{diff, lambda, module_action, E1Element, EElement};
use crate::context::RingContext;
use crate::error::{Error, Result};
use crate::json::{Json, JsonInt};
use crate::padic::PadicElement;
use crate::witt::{teich_coefficients, K0Decomposition, VDecomposition, WittVector};

/// A value taking part in a law: an input or one side of an equation.
#[derive(Clone, Debug)]
pub enum Value {
    Padic(PadicElement),
    Witt(WittVector),
    E1(E1Element),
    E(EElement),
    VDec(VDecomposition),
    K0(K0Decomposition),
    Int(i64),
    Bool(bool),
    List(Vec<Value>),
}

macro_rules! value_from {
    ($($t:ty => $v:ident),*) => {$(
        impl From<$t> for Value {
            fn from(x: $t) -> Self {
                Value::$v(x)
            }
        }
    )*};
}
value_from!(PadicElement => Padic, WittVector => Witt, E1Element => E1, EElement => E,
    VDecomposition => VDec, K0Decomposition => K0, i64 => Int, bool => Bool, Vec<Value> => List);

impl Value {
    /// Equality at guaranteed precision; comparing digits that neither side
    /// guarantees is a precision underflow.
    pub fn agrees_with(&self, other: &Value) -> Result<bool> {
        use Value::*;
        match (self, other) {
            (Padic(a), Padic(b)) => {
                a.context().check_same(b.context())?;
                let r = a.prec().min(b.prec());
                if r == 0 {
                    return Err(Error::underflow("p-adic values compared with no digits"));
                }
                Ok(a.eq_at(b, r))
            }
            (Witt(a), Witt(b)) => a.agrees_with(b),
            (E1(a), E1(b)) => a.agrees_with(b),
            (E(a), E(b)) => a.agrees_with(b),
            (VDec(a), VDec(b)) => a.agrees_with(b),
            (K0(a), K0(b)) => a.agrees_with(b),
            (Int(a), Int(b)) => Ok(a == b),
            (Bool(a), Bool(b)) => Ok(a == b),
            (List(a), List(b)) if a.len() == b.len() => {
                let mut same = true;
                for (x, y) in a.iter().zip(b) {
                    same &= x.agrees_with(y)?;
                }
                Ok(same)
            }
            _ => Ok(false),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        use Value::*;
        let (kind, value) = match self {
            Padic(x) => ("padic", x.to_json()),
            Witt(x) => ("witt", x.to_json()),
            E1(x) => ("e1", x.to_json()),
            E(x) => ("e", x.to_json()),
            VDec(x) => ("v_decomposition", x.to_json()),
            K0(x) => ("k0_decomposition", x.to_json()),
            Int(x) => ("int", json!(x)),
            Bool(x) => ("bool", json!(x)),
            List(xs) => (
                "list",
                serde_json::Value::Array(xs.iter().map(Value::to_json).collect()),
            ),
        };
        json!({ "type": kind, "value": value })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let kind = v
            .get("type")
            .and_then(|t| t.as_str())
            .ok_or_else(|| Error::Malformed("value without \"type\"".into()))?;
        let inner = v
            .get("value")
            .ok_or_else(|| Error::Malformed("value without \"value\"".into()))?;
        Ok(match kind {
            "padic" => Value::Padic(PadicElement::from_json(inner)?),
            "witt" => Value::Witt(WittVector::from_json(inner)?),
            "e1" => Value::E1(E1Element::from_json(inner)?),
            "e" => Value::E(EElement::from_json(inner)?),
            "v_decomposition" => Value::VDec(VDecomposition::from_json(inner)?),
            "k0_decomposition" => Value::K0(K0Decomposition::from_json(inner)?),
            "int" => Value::Int(
                inner
                    .as_i64()
                    .ok_or_else(|| Error::Malformed("bad int value".into()))?,
            ),
            "bool" => Value::Bool(
                inner
                    .as_bool()
                    .ok_or_else(|| Error::Malformed("bad bool value".into()))?,
            ),
            "list" => Value::List(
                inner
                    .as_array()
                    .ok_or_else(|| Error::Malformed("bad list value".into()))?
                    .iter()
                    .map(Value::from_json)
                    .collect::<Result<_>>()?,
            ),
            other => return Err(Error::Malformed(format!("unknown value type {other:?}"))),
        })
    }
}

/// Named trial inputs.
#[derive(Clone, Debug, Default)]
pub struct Inputs(Vec<(String, Value)>);

macro_rules! getter {
    ($name:ident, $v:ident, $t:ty) => {
        pub fn $name(&self, key: &str) -> Result<&$t> {
            match self.get(key)? {
                Value::$v(x) => Ok(x),
                _ => Err(Error::Malformed(format!(
                    "input {key:?} has the wrong type"
                ))),
            }
        }
    };
}

impl Inputs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.0.push((key.to_string(), v.into()));
        self
    }

    pub fn get(&self, key: &str) -> Result<&Value> {
        self.0
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v)
            .ok_or_else(|| Error::Malformed(format!("missing input {key:?}")))
    }

    getter!(padic, Padic, PadicElement);
    getter!(witt, Witt, WittVector);
    getter!(e1, E1, E1Element);
    getter!(vdec, VDec, VDecomposition);

    pub fn int(&self, key: &str) -> Result<i64> {
        match self.get(key)? {
            Value::Int(x) => Ok(*x),
            _ => Err(Error::Malformed(format!(
                "input {key:?} has the wrong type"
            ))),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut m = Map::new();
        for (k, v) in &self.0 {
            m.insert(k.clone(), v.to_json());
        }
        serde_json::Value::Object(m)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Malformed("inputs must be an object".into()))?;
        let mut out = Inputs::new();
        for (k, v) in obj {
            out.0.push((k.clone(), Value::from_json(v)?));
        }
        Ok(out)
    }
}

/// Outcome of one trial.
#[derive(Clone, Debug)]
pub enum Check {
    Pass,
    Fail { lhs: Value, rhs: Value },
}

impl Check {
    pub fn passed(&self) -> bool {
        matches!(self, Check::Pass)
    }
}

fn expect_eq(lhs: impl Into<Value>, rhs: impl Into<Value>) -> Result<Check> {
    let (lhs, rhs) = (lhs.into(), rhs.into());
    Ok(if lhs.agrees_with(&rhs)? {
        Check::Pass
    } else {
        Check::Fail { lhs, rhs }
    })
}

/// Returns early from a law on the first failing comparison.
macro_rules! check {
    ($lhs:expr, $rhs:expr) => {
        let c = expect_eq($lhs, $rhs)?;
        if !c.passed() {
            return Ok(c);
        }
    };
}

/// Deliberate bugs for the mutation self-test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// `F` on `E^1` applies `φ²` instead of `φ`.
    FrobeniusPhiSquared,
    /// `V` on `E^1` forgets the factor `p`.
    VerschiebungMissingP,
    /// `d` puts `a_{i−1}` into component `i`.
    DiffOffByOne,
    /// `V` on Witt vectors computes `V(2x)`.
    CorruptWittV,
}

impl Mutation {
    pub const ALL: [Mutation; 4] = [
        Mutation::FrobeniusPhiSquared,
        Mutation::VerschiebungMissingP,
        Mutation::DiffOffByOne,
        Mutation::CorruptWittV,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::FrobeniusPhiSquared => "frobenius-phi-squared",
            Mutation::VerschiebungMissingP => "verschiebung-missing-p",
            Mutation::DiffOffByOne => "diff-off-by-one",
            Mutation::CorruptWittV => "corrupt-witt-v",
        }
    }
}

impl FromStr for Mutation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Mutation::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Malformed(format!("unknown mutation {s:?}")))
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The structure maps under test, optionally with one seeded bug.
#[derive(Clone, Copy, Debug, Default)]
pub struct Maps {
    pub mutation: Option<Mutation>,
}

impl Maps {
    fn is(&self, m: Mutation) -> bool {
        self.mutation == Some(m)
    }

    pub fn witt_v(&self, x: &WittVector) -> Result<WittVector> {
        if self.is(Mutation::CorruptWittV) {
            return Ok(x.scale(2)?.verschiebung());
        }
        Ok(x.verschiebung())
    }

    pub fn d(&self, x: &WittVector) -> Result<E1Element> {
        if self.is(Mutation::DiffOffByOne) {
            let dec = x.v_decompose()?;
            let n = x.level();
            return E1Element::new(x.context(), n, dec.coeffs()[..n - 1].to_vec());
        }
        diff(x)
    }

    pub fn fe(&self, xi: &E1Element) -> Result<E1Element> {
        if self.is(Mutation::FrobeniusPhiSquared) {
            let n = xi.level();
            if n < 2 {
                return Err(Error::BadLevel("Frobenius needs level at least 2".into()));
            }
            let comps = (1..n - 1)
                .map(|i| xi.component(i + 1).frobenius().frobenius())
                .collect();
            return E1Element::new(xi.context(), n - 1, comps);
        }
        xi.frobenius()
    }

    pub fn ve(&self, xi: &E1Element) -> Result<E1Element> {
        if self.is(Mutation::VerschiebungMissingP) {
            let ctx = xi.context();
            let mut comps = vec![PadicElement::zero(ctx)];
            for i in 1..xi.level() {
                let a = xi.component(i).frobenius_inv();
                let lifted = a.coeffs().iter().map(|c| BigInt::from(c.clone()));
                comps.push(PadicElement::new(ctx, lifted, i as u32 + 1)?);
            }
            return E1Element::new(ctx, xi.level() + 1, comps);
        }
        xi.verschiebung()
    }

    pub fn e_d(&self, a: &EElement) -> Result<EElement> {
        EElement::new(
            WittVector::zero(a.deg0().context(), a.level())?,
            self.d(a.deg0())?,
        )
    }

    pub fn e_f(&self, a: &EElement) -> Result<EElement> {
        EElement::new(a.deg0().frobenius()?, self.fe(a.deg1())?)
    }

    pub fn e_v(&self, a: &EElement) -> Result<EElement> {
        EElement::new(self.witt_v(a.deg0())?, self.ve(a.deg1())?)
    }
}

/// One grid point of a plan with its ring context.
#[derive(Clone, Debug)]
pub struct Setting {
    pub ctx: Arc<RingContext>,
    pub n: usize,
}

impl Setting {
    fn p(&self) -> u64 {
        self.ctx.p()
    }

    fn pi(&self) -> i64 {
        self.ctx.p() as i64
    }

    fn padic<R: Rng>(&self, rng: &mut R) -> PadicElement {
        PadicElement::random(&self.ctx, rng)
    }

    fn witt<R: Rng>(&self, n: usize, rng: &mut R) -> Result<WittVector> {
        WittVector::random(&self.ctx, n, rng)
    }

    fn e1<R: Rng>(&self, n: usize, rng: &mut R) -> Result<E1Element> {
        E1Element::random(&self.ctx, n, rng)
    }

    fn teich(&self, a: &PadicElement, n: usize) -> Result<WittVector> {
        WittVector::teichmuller(a, n)
    }
}

type GenFn = fn(&Setting, &mut ChaCha20Rng) -> Result<Inputs>;
type EvalFn = fn(&Setting, &Inputs, &Maps) -> Result<Check>;

/// A named law with its input generator, evaluator and the working
/// precision it needs at level `n`.
pub struct Law {
    pub name: &'static str,
    /// Smallest working precision `M` at which the law runs without
    /// precision underflow at level `n`.
    pub required_precision: fn(usize) -> u32,
    /// Deterministic laws run once per grid point regardless of the trial
    /// count.
    pub deterministic: bool,
    pub applies: fn(&Setting) -> bool,
    pub generate: GenFn,
    pub evaluate: EvalFn,
}

fn always(_: &Setting) -> bool {
    true
}

fn no_inputs(_: &Setting, _: &mut ChaCha20Rng) -> Result<Inputs> {
    Ok(Inputs::new())
}

fn gen_x(s: &Setting, r: &mut ChaCha20Rng) -> Result<Inputs> {
    Ok(Inputs::new().with("x", s.witt(s.n, r)?))
}

fn gen_xy(s: &Setting, r: &mut ChaCha20Rng) -> Result<Inputs> {
    Ok(Inputs::new()
        .with("x", s.witt(s.n, r)?)
        .with("y", s.witt(s.n, r)?))
}

fn gen_x_up(s: &Setting, r: &mut ChaCha20Rng) -> Result<Inputs> {
    Ok(Inputs::new().with("x", s.witt(s.n + 1, r)?))
}

fn gen_a(s: &Setting, r: &mut ChaCha20Rng) -> Result<Inputs> {
    Ok(Inputs::new().with("a", s.padic(r)))
}

fn gen_xi(s: &Setting, r: &mut ChaCha20Rng) -> Result<Inputs> {
    Ok(Inputs::new().with("xi", s.e1(s.n, r)?))
}

fn residue_index(s: &Setting, r: &mut ChaCha20Rng) -> i64 {
    r.random_range(1..=s.n as i64)
}

fn v_power(ctx: &Arc<RingContext>, maps: &Maps, j: usize, n: usize) -> Result<WittVector> {
    let mut v = WittVector::one(ctx, n - j)?;
    for _ in 0..j {
        v = maps.witt_v(&v)?;
    }
    Ok(v)
}

fn ghost_list(x: &WittVector) -> Vec<Value> {
    x.ghost()
        .components()
        .iter()
        .cloned()
        .map(Value::Padic)
        .collect()
}

fn pointwise(
    a: &WittVector,
    b: &WittVector,
    op: fn(&PadicElement, &PadicElement) -> Result<PadicElement>,
) -> Result<Vec<Value>> {
    let (ga, gb) = (a.ghost(), b.ghost());
    ga.components()
        .iter()
        .zip(gb.components())
        .map(|(x, y)| Ok(Value::Padic(op(x, y)?)))
        .collect()
}

fn law_ghost_additive(_: &Setting, i: &Inputs, _: &Maps) -> Result<Check> {
    let (x, y) = (i.witt("x")?, i.witt("y")?);
    check!(ghost_list(&x.add(y)?), pointwise(x, y, PadicElement::add)?);
    expect_eq(ghost_list(&x.sub(y)?), pointwise(x, y, PadicElement::sub)?)
}

fn law_ghost_multiplicative(_: &Setting, i: &Inputs, _: &Maps) -> Result<Check> {
    let (x, y) = (i.witt("x")?, i.witt("y")?);
    check!(ghost_list(&x.mul(y)?), pointwise(x, y, PadicElement::mul)?);
    let neg: Vec<Value> = x
        .ghost()
        .components()
        .iter()
        .map(|w| Value::Padic(w.neg()))
        .collect();
    expect_eq(ghost_list(&x.neg()?), neg)
}

fn law_ghost_roundtrip(_: &Setting, i: &Inputs, _: &Maps) -> Result<Check> {
    let x = i.witt("x")?;
    let g = x.ghost();
    let back = g.ghost_inverse()?;
    check!(back.clone(), x.clone());
    let g_list: Vec<Value> = g.components().iter().cloned().map(Value::Padic).collect();
    expect_eq(ghost_list(&back), g_list)
}

fn law_fv_equals_p_witt(s: &Setting, i: &Inputs, m: &Maps) -> Result<Check> {
    let x = i.witt("x")?;
    expect_eq(m.witt_v(x)?.frobenius()?, x.scale(s.pi())?)
}

fn gen_v_module_witt(s: &Setting, r: &mut ChaCha20Rng) -> Result<Inputs> {
    Ok(Inputs::new()
        .with("x", s.witt(s.n + 1, r)?)
        .with("y", s.witt(s.n, r)?))
}

fn law_v_module_witt(_: &Setting, i: &Inputs, m: &Maps) -> Result<Check> {
    let (x, y) = (i.witt("x")?, i.witt("y")?);
    expect_eq(m.witt_v(&x.frobenius()?.mul(y)?)?, x.mul(&m.witt_v(y)?)?)
}

fn law_f_s_phi(s: &Setting, i: &Inputs, _: &Maps) -> Result<Check> {
    let a = i.padic("a")?;
    let lhs = WittVector::s_phi(a, s.n + 1)?.frobenius()?;
    check!(lhs, WittVector::s_phi(&a.frobenius(), s.n)?);
    expect_eq(
        s.teich(a, s.n + 1)?.frobenius()?,
        s.teich(&a.pow_u64(s.p()), s.n)?,
    )
}

fn gen_ab(s: &Setting, r: &mut ChaCha20Rng) -> Result<Inputs> {
    Ok(Inputs::new().with("a", s.padic(r)).with("b", s.padic(r)))
}

fn law_s_phi_ring_hom(s: &Setting, i: &Inputs, _: &Maps) -> Result<Check> {
    let (a, b) = (i.padic("a")?, i.padic("b")?);
    let n = s.n;
    let (sa, sb) = (WittVector::s_phi(a, n)?, WittVector::s_phi(b, n)?);
    check!(WittVector::s_phi(&a.add(b)?, n)?, sa.add(&sb)?);
    check!(WittVector::s_phi(&a.mul(b)?, n)?, sa.mul(&sb)?);
    expect_eq(
        WittVector::s_phi(&PadicElement::one(&s.ctx), n)?,
        WittVector::one(&s.ctx, n)?,
    )
}

fn gen_stabilization(s: &Setting, r: &mut ChaCha20Rng) -> Result<Inputs> {
    let coeffs: Vec<Value> = (0..=s.n).map(|_| Value::Padic(s.padic(r))).collect();
    Ok(Inputs::new().with("a", coeffs))
}

fn law_ghost_stabilization(s: &Setting, i: &Inputs, _: &Maps) -> Result<Check> {
    let Value::List(items) = i.get("a")? else {
        return Err(Error::Malformed("input \"a\" must be a list".into()));
    };
    let mut coeffs = items
        .iter()
        .map(|v| match v {
            Value::Padic(a) => Ok(a.clone()),
            _ => Err(Error::Malformed("coefficients must be p-adic".into())),
        })
        .collect::<Result<Vec<_>>>()?;
    if coeffs.len() != s.n + 1 {
        return Err(Error::Malformed(
            "stabilization needs n + 1 coefficients".into(),
        ));
    }
    coeffs.extend([PadicElement::zero(&s.ctx), PadicElement::zero(&s.ctx)]);
    let x = VDecomposition::new(&s.ctx, coeffs)?.recompose()?;
    let w = x.ghost();
    let w = w.components();
    let n = s.n;
    check!(w[n + 1].clone(), w[n].frobenius());
    expect_eq(w[n + 2].clone(), w[n].frobenius_pow(2))
}

fn law_v_decompose_roundtrip(_: &Setting, i: &Inputs, _: &Maps) -> Result<Check> {
    let x = i.witt("x")?;
    let dec = x.v_decompose()?;
    let rec = dec.recompose()?;
    check!(rec.clone(), x.clone());
    check!(dec.recompose_by_products()?, x.clone());
    expect_eq(rec.v_decompose()?, dec)
}

fn gen_injective(s: &Setting, r: &mut ChaCha20Rng) -> Result<Inputs> {
    let coeffs: Vec<PadicElement> = (0..s.n).map(|_| s.padic(r)).collect();
    let k = r.random_range(0..s.n);
    let unit = PadicElement::one(&s.ctx).add(&s.padic(r).mul_p_pow(1))?;
    let mut other = coeffs.clone();
    other[k] = other[k].add(&unit)?;
    Ok(Inputs::new()
        .with("a", VDecomposition::new(&s.ctx, coeffs)?)
        .with("b", VDecomposition::new(&s.ctx, other)?))
}

fn law_v_decompose_injective(_: &Setting, i: &Inputs, _: &Maps) -> Result<Check> {
    let (a, b) = (i.vdec("a")?, i.vdec("b")?);
    if a.agrees_with(b)? {
        return Err(Error::Malformed("injectivity inputs must differ".into()));
    }
    let (ra, rb) = (a.recompose()?, b.recompose()?);
    Ok(if ra.agrees_with(&rb)? {
        Check::Fail {
            lhs: ra.into(),
            rhs: rb.into(),
        }
    } else {
        Check::Pass
    })
}

fn law_teich_coefficients_agree(s: &Setting, i: &Inputs, _: &Maps) -> Result<Check> {
    let a = i.padic("a")?;
    expect_eq(teich_coefficients(a, s.n)?, s.teich(a, s.n)?.v_decompose()?)
}

fn law_dividing_by_p(s: &Setting, i: &Inputs, _: &Maps) -> Result<Check> {
    let a = i.padic("a")?;
    let n = s.n;
    let y = s
        .teich(a, n + 1)?
        .sub(&WittVector::s_phi(a, n + 1)?)?
        .unshift(0)?;
    let lhs = s.teich(a, n)?.pow_by_mul(s.p())?;
    let rhs = WittVector::s_phi(&a.frobenius(), n)?.add(&y.scale(s.pi())?)?;
    expect_eq(lhs, rhs)
}

fn gen_v_image(s: &Setting, r: &mut ChaCha20Rng) -> Result<Inputs> {
    Ok(Inputs::new().with("x", s.witt(s.n - 1, r)?))
}

fn law_v_image_shift(s: &Setting, i: &Inputs, m: &Maps) -> Result<Check> {
    let x = i.witt("x")?;
    let a = x.v_decompose()?;
    let mut want = vec![PadicElement::zero(&s.ctx)];
    want.extend(a.coeffs().iter().map(PadicElement::frobenius_inv));
    expect_eq(
        m.witt_v(x)?.v_decompose()?,
        VDecomposition::new(&s.ctx, want)?,
    )
}

fn gen_residue_kernel(s: &Setting, r: &mut ChaCha20Rng) -> Result<Inputs> {
    let coeffs: Vec<Value> = (0..=s.n)
        .map(|_| s.witt(s.n, r).map(Value::Witt))
        .collect::<Result<_>>()?;
    Ok(Inputs::new()
        .with("i", residue_index(s, r))
        .with("c", coeffs))
}

fn law_residue_kernel(s: &Setting, i: &Inputs, m: &Maps) -> Result<Check> {
    let idx = i.int("i")? as u32;
    let Value::List(cs) = i.get("c")? else {
        return Err(Error::Malformed("input \"c\" must be a list".into()));
    };
    let n = s.n;
    let mut gens = vec![WittVector::from_int(&s.ctx, n, 1)?.scale(s.pi().pow(idx))?];
    for j in 0..n {
        gens.push(v_power(&s.ctx, m, j, n)?.sub(&WittVector::from_int(
            &s.ctx,
            n,
            s.pi().pow(j as u32),
        )?)?);
    }
    if cs.len() != gens.len() {
        return Err(Error::Malformed(format!(
            "expected {} multipliers",
            gens.len()
        )));
    }
    let zero = PadicElement::zero(&s.ctx).truncate(idx);
    let mut combo = WittVector::zero(&s.ctx, n)?;
    for (g, c) in gens.iter().zip(cs) {
        check!(g.wn_to_residue(idx)?, zero.clone());
        let Value::Witt(c) = c else {
            return Err(Error::Malformed("multipliers must be Witt vectors".into()));
        };
        combo = combo.add(&c.mul(g)?)?;
    }
    expect_eq(combo.wn_to_residue(idx)?, zero)
}

fn gen_residue_hom(s: &Setting, r: &mut ChaCha20Rng) -> Result<Inputs> {
    Ok(Inputs::new()
        .with("x", s.witt(s.n, r)?)
        .with("y", s.witt(s.n, r)?)
        .with("a", s.padic(r))
        .with("i", residue_index(s, r)))
}

fn law_residue_ring_hom(s: &Setting, i: &Inputs, _: &Maps) -> Result<Check> {
    let (x, y, a, idx) = (
        i.witt("x")?,
        i.witt("y")?,
        i.padic("a")?,
        i.int("i")? as u32,
    );
    let (rx, ry) = (x.wn_to_residue(idx)?, y.wn_to_residue(idx)?);
    check!(x.add(y)?.wn_to_residue(idx)?, rx.add(&ry)?);
    check!(x.mul(y)?.wn_to_residue(idx)?, rx.mul(&ry)?);
    expect_eq(
        WittVector::s_phi(a, s.n)?.wn_to_residue(idx)?,
        a.truncate(idx),
    )
}

fn gen_k0(s: &Setting, r: &mut ChaCha20Rng) -> Result<Inputs> {
    let m = r.random_range(1..=2u32);
    let coords = (0..s.n).map(|_| s.padic(r).mul_p_pow(m)).collect();
    let coeffs = (0..s.n).map(|_| s.padic(r)).collect();
    Ok(Inputs::new()
        .with("m", m as i64)
        .with("z", WittVector::new(&s.ctx, coords)?)
        .with("a", K0Decomposition::new(&s.ctx, m, coeffs)?))
}

fn law_k0_roundtrip(s: &Setting, i: &Inputs, _: &Maps) -> Result<Check> {
    let (m, z, a) = (i.int("m")? as u32, i.witt("z")?, i.get("a")?);
    let Value::K0(a) = a else {
        return Err(Error::Malformed(
            "input \"a\" must be a k0 decomposition".into(),
        ));
    };
    let dec = z.k0_decompose(m)?;
    check!(dec.recompose()?, z.clone());
    check!(dec.recompose_by_products()?, z.clone());
    check!(a.recompose()?.k0_decompose(m)?, a.clone());
    let mut coords = z.coords().to_vec();
    coords[0] = coords[0].add(&PadicElement::one(&s.ctx))?;
    let outside = WittVector::new(&s.ctx, coords)?;
    let rejected = matches!(outside.k0_decompose(m), Err(Error::NotInKernel(_)));
    expect_eq(rejected, true)
}

fn gen_e(s: &Setting, r: &mut ChaCha20Rng) -> Result<Inputs> {
    Ok(Inputs::new()
        .with("x", s.witt(s.n, r)?)
        .with("xi", s.e1(s.n, r)?))
}

fn law_dd_zero(_: &Setting, i: &Inputs, m: &Maps) -> Result<Check> {
    let a = EElement::new(i.witt("x")?.clone(), i.e1("xi")?.clone())?;
    let dd = m.e_d(&m.e_d(&a)?)?;
    let zero = EElement::new(
        WittVector::zero(a.deg0().context(), a.level())?,
        E1Element::zero(a.deg0().context(), a.level())?,
    )?;
    expect_eq(dd, zero)
}

fn law_leibniz(_: &Setting, i: &Inputs, m: &Maps) -> Result<Check> {
    let (x, y) = (i.witt("x")?, i.witt("y")?);
    let rhs = module_action(x, &m.d(y)?)?.add(&module_action(y, &m.d(x)?)?)?;
    expect_eq(m.d(&x.mul(y)?)?, rhs)
}

fn law_fdv_equals_d(_: &Setting, i: &Inputs, m: &Maps) -> Result<Check> {
    let x = i.witt("x")?;
    expect_eq(m.fe(&m.d(&m.witt_v(x)?)?)?, m.d(x)?)
}

fn law_fv_equals_p(s: &Setting, i: &Inputs, m: &Maps) -> Result<Check> {
    let (x, xi) = (i.witt("x")?, i.e1("xi")?);
    check!(m.fe(&m.ve(xi)?)?, xi.scale(s.pi()));
    let a = EElement::new(x.clone(), xi.clone())?;
    let p = lambda(&WittVector::from_int(&s.ctx, s.n, s.pi())?)?;
    expect_eq(m.e_f(&m.e_v(&a)?)?, p.graded_mul(&a)?)
}

fn law_df_equals_pfd(s: &Setting, i: &Inputs, m: &Maps) -> Result<Check> {
    let x = i.witt("x")?;
    expect_eq(m.d(&x.frobenius()?)?, m.fe(&m.d(x)?)?.scale(s.pi()))
}

fn law_vd_equals_pdv(s: &Setting, i: &Inputs, m: &Maps) -> Result<Check> {
    let x = i.witt("x")?;
    expect_eq(m.ve(&m.d(x)?)?, m.d(&m.witt_v(x)?)?.scale(s.pi()))
}

fn gen_x_up_xi(s: &Setting, r: &mut ChaCha20Rng) -> Result<Inputs> {
    Ok(Inputs::new()
        .with("x", s.witt(s.n + 1, r)?)
        .with("xi", s.e1(s.n, r)?))
}

fn law_v_module_mixed(_: &Setting, i: &Inputs, m: &Maps) -> Result<Check> {
    let (x, xi) = (i.witt("x")?, i.e1("xi")?);
    expect_eq(
        m.ve(&module_action(&x.frobenius()?, xi)?)?,
        module_action(x, &m.ve(xi)?)?,
    )
}

fn gen_f_mult(s: &Setting, r: &mut ChaCha20Rng) -> Result<Inputs> {
    Ok(Inputs::new()
        .with("x", s.witt(s.n + 1, r)?)
        .with("y", s.witt(s.n + 1, r)?)
        .with("xi", s.e1(s.n + 1, r)?))
}

fn law_f_multiplicative(_: &Setting, i: &Inputs, m: &Maps) -> Result<Check> {
    let (x, y, xi) = (i.witt("x")?, i.witt("y")?, i.e1("xi")?);
    let fx = x.frobenius()?;
    check!(x.mul(y)?.frobenius()?, fx.mul(&y.frobenius()?)?);
    expect_eq(
        m.fe(&module_action(x, xi)?)?,
        module_action(&fx, &m.fe(xi)?)?,
    )
}

fn law_teich_relation(s: &Setting, i: &Inputs, m: &Maps) -> Result<Check> {
    let a = i.padic("a")?;
    let n = s.n;
    let lhs = m.fe(&m.d(&s.teich(a, n + 1)?)?)?;
    let t = s.teich(a, n)?;
    let power = t.pow_by_mul(s.p() - 1)?;
    check!(power.clone(), s.teich(&a.pow_u64(s.p() - 1), n)?);
    expect_eq(lhs, module_action(&power, &m.d(&t)?)?)
}

fn gen_r_commutes(s: &Setting, r: &mut ChaCha20Rng) -> Result<Inputs> {
    Ok(Inputs::new()
        .with("x", s.witt(s.n + 1, r)?)
        .with("x2", s.witt(s.n + 2, r)?)
        .with("xi", s.e1(s.n + 1, r)?)
        .with("xi2", s.e1(s.n + 2, r)?))
}

fn law_r_commutes(_: &Setting, i: &Inputs, m: &Maps) -> Result<Check> {
    let (x, x2, xi, xi2) = (i.witt("x")?, i.witt("x2")?, i.e1("xi")?, i.e1("xi2")?);
    check!(m.d(x)?.restrict()?, m.d(&x.restrict()?)?);
    check!(x2.frobenius()?.restrict()?, x2.restrict()?.frobenius()?);
    check!(m.witt_v(x)?.restrict()?, m.witt_v(&x.restrict()?)?);
    check!(m.fe(xi2)?.restrict()?, m.fe(&xi2.restrict()?)?);
    check!(m.ve(xi)?.restrict()?, m.ve(&xi.restrict()?)?);
    expect_eq(lambda(x)?.restrict()?, lambda(&x.restrict()?)?)
}

fn law_torsion(s: &Setting, i: &Inputs, m: &Maps) -> Result<Check> {
    let xi = i.e1("xi")?;
    let n = s.n;
    check!(
        xi.scale(s.pi().pow(n as u32 - 1)),
        E1Element::zero(&s.ctx, n)?
    );
    let top = m.d(&v_power(&s.ctx, m, n - 1, n)?)?;
    check!(
        top.scale(s.pi().pow(n as u32 - 1)),
        E1Element::zero(&s.ctx, n)?
    );
    expect_eq(top.scale(s.pi().pow(n as u32 - 2)).is_zero(), false)
}

fn gen_restriction_kernel(s: &Setting, r: &mut ChaCha20Rng) -> Result<Inputs> {
    let n = s.n;
    let mut comps = Vec::new();
    for k in 1..n {
        comps.push(if r.random_bool(0.5) {
            PadicElement::zero(&s.ctx)
        } else {
            PadicElement::random_at(&s.ctx, k as u32, r)
        });
    }
    Ok(Inputs::new()
        .with("xi", E1Element::new(&s.ctx, n, comps)?)
        .with("alpha", s.padic(r))
        .with("beta", s.padic(r))
        .with("c", s.padic(r))
        .with("t", PadicElement::random_at(&s.ctx, n as u32 - 1, r)))
}

fn law_restriction_kernel(s: &Setting, i: &Inputs, m: &Maps) -> Result<Check> {
    let n = s.n;
    let ctx = &s.ctx;
    let xi = i.e1("xi")?;
    let only_top = xi.components()[..n - 2].iter().all(PadicElement::is_zero);
    check!(xi.restrict()?.is_zero(), only_top);
    let lift = |a: &PadicElement| -> Result<WittVector> {
        let mut v = WittVector::teichmuller(a, 1)?;
        for _ in 0..n - 1 {
            v = m.witt_v(&v)?;
        }
        Ok(v)
    };
    let (alpha, beta) = (i.padic("alpha")?, i.padic("beta")?);
    let omega = EElement::new(lift(alpha)?, m.d(&lift(beta)?)?)?;
    let zero_below = EElement::new(WittVector::zero(ctx, n - 1)?, E1Element::zero(ctx, n - 1)?)?;
    check!(omega.restrict()?, zero_below);
    let (c, t) = (i.padic("c")?, i.padic("t")?);
    let mut coords = vec![PadicElement::zero(ctx); n - 1];
    coords.push(c.clone());
    let kernel_elt = EElement::new(
        WittVector::new(ctx, coords)?,
        E1Element::dv(ctx, n, n - 1, t.clone())?,
    )?;
    let rebuilt = EElement::new(lift(c)?, m.d(&lift(&t.frobenius_pow(n as i64 - 1))?)?)?;
    expect_eq(rebuilt, kernel_elt)
}

fn law_e1_component_sizes(s: &Setting, _: &Inputs, _: &Maps) -> Result<Check> {
    let p = s.p();
    for i in 1..s.n {
        let mut seen = std::collections::BTreeSet::new();
        for r in 0..p.pow(i as u32 + 1) {
            let xi = E1Element::dv(&s.ctx, s.n, i, PadicElement::from_int(&s.ctx, r))?;
            seen.insert(xi.component(i).coeffs()[0].clone());
        }
        check!(seen.len() as i64, p.pow(i as u32) as i64);
    }
    Ok(Check::Pass)
}

fn law_congruence(s: &Setting, i: &Inputs, _: &Maps) -> Result<Check> {
    let a = i.padic("a")?;
    for idx in 1..=s.n as u32 {
        let (holds, lhs, rhs) = congruence_sides(a, idx)?;
        if !holds {
            return Ok(Check::Fail {
                lhs: lhs.into(),
                rhs: rhs.into(),
            });
        }
    }
    Ok(Check::Pass)
}

/// The law table; the index of a law is its RNG stream id.
pub fn laws() -> &'static [Law] {
    static LAWS: OnceLock<Vec<Law>> = OnceLock::new();
    LAWS.get_or_init(|| {
        let law = |name, required_precision, generate, evaluate| Law {
            name,
            required_precision,
            deterministic: false,
            applies: always,
            generate,
            evaluate,
        };
        vec![
            law("ghost_additive", |_| 1, gen_xy, law_ghost_additive),
            law(
                "ghost_multiplicative",
                |_| 1,
                gen_xy,
                law_ghost_multiplicative,
            ),
            law("ghost_roundtrip", |n| n as u32, gen_x, law_ghost_roundtrip),
            law("fv_equals_p_witt", |_| 1, gen_x, law_fv_equals_p_witt),
            law("v_module_witt", |_| 1, gen_v_module_witt, law_v_module_witt),
            law("f_s_phi", |n| n as u32 + 1, gen_a, law_f_s_phi),
            law("s_phi_ring_hom", |n| n as u32, gen_ab, law_s_phi_ring_hom),
            law(
                "ghost_stabilization",
                |n| n as u32 + 3,
                gen_stabilization,
                law_ghost_stabilization,
            ),
            law(
                "v_decompose_roundtrip",
                |n| 2 * n as u32 - 1,
                gen_x,
                law_v_decompose_roundtrip,
            ),
            law(
                "v_decompose_injective",
                |n| n as u32,
                gen_injective,
                law_v_decompose_injective,
            ),
            law(
                "teich_coefficients_agree",
                |n| n as u32,
                gen_a,
                law_teich_coefficients_agree,
            ),
            law("dividing_by_p", |n| n as u32 + 1, gen_a, law_dividing_by_p),
            law(
                "v_image_shift",
                |n| n as u32,
                gen_v_image,
                law_v_image_shift,
            ),
            law(
                "residue_kernel",
                |n| n as u32,
                gen_residue_kernel,
                law_residue_kernel,
            ),
            law(
                "residue_ring_hom",
                |n| n as u32,
                gen_residue_hom,
                law_residue_ring_hom,
            ),
            law("k0_roundtrip", |n| n as u32 + 2, gen_k0, law_k0_roundtrip),
            law("dd_zero", |n| 2 * n as u32 - 2, gen_e, law_dd_zero),
            law("leibniz", |n| 2 * n as u32 - 2, gen_xy, law_leibniz),
            law("fdv_equals_d", |n| 2 * n as u32, gen_x, law_fdv_equals_d),
            law("fv_equals_p", |n| n as u32, gen_e, law_fv_equals_p),
            law(
                "df_equals_pfd",
                |n| 2 * n as u32,
                gen_x_up,
                law_df_equals_pfd,
            ),
            law("vd_equals_pdv", |n| 2 * n as u32, gen_x, law_vd_equals_pdv),
            law(
                "v_module_mixed",
                |n| n as u32,
                gen_x_up_xi,
                law_v_module_mixed,
            ),
            law(
                "f_multiplicative",
                |n| n as u32,
                gen_f_mult,
                law_f_multiplicative,
            ),
            law(
                "teich_relation",
                |n| 2 * n as u32,
                gen_a,
                law_teich_relation,
            ),
            law(
                "r_commutes",
                |n| 2 * n as u32,
                gen_r_commutes,
                law_r_commutes,
            ),
            law("torsion", |n| 2 * n as u32 - 2, gen_xi, law_torsion),
            law(
                "restriction_kernel",
                |n| 2 * n as u32 - 2,
                gen_restriction_kernel,
                law_restriction_kernel,
            ),
            Law {
                name: "e1_component_sizes",
                required_precision: |n| n as u32 - 1,
                deterministic: true,
                applies: |s| s.ctx.degree() == 1,
                generate: no_inputs,
                evaluate: law_e1_component_sizes,
            },
            law("congruence", |n| 2 * n as u32 + 1, gen_a, law_congruence),
        ]
    })
}

pub fn law_index(name: &str) -> Option<usize> {
    laws().iter().position(|l| l.name == name)
}

/// `(p, d, n, M)` with an optional defining polynomial; the default is
/// [`crate::context::default_polynomial`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridPoint {
    pub p: u64,
    pub d: usize,
    pub n: usize,
    #[serde(rename = "M")]
    pub m: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub f: Option<Vec<JsonInt>>,
}

impl GridPoint {
    pub fn setting(&self) -> Result<Setting> {
        let ctx = match &self.f {
            Some(f) => RingContext::new(self.p, self.d, f.iter().map(|c| c.0.clone()), self.m)?,
            None => RingContext::with_default_polynomial(self.p, self.d, self.m)?,
        };
        ctx.require_odd()?;
        if self.n < 2 {
            return Err(Error::BadLevel(format!("grid level {} below 2", self.n)));
        }
        Ok(Setting { ctx, n: self.n })
    }
}

/// A verification plan as read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialPlan {
    pub grid: Vec<GridPoint>,
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    /// Subset of law names; absent means all.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub laws: Option<Vec<String>>,
    /// Per-law trial counts overriding `trials`.
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub law_trials: BTreeMap<String, u64>,
}

impl TrialPlan {
    /// `p ∈ {3, 5, 7}`, `d ∈ {1, 2}`, `n ∈ {2, …, 5}`, `M = 2n + 4`, 500
    /// trials per law and 1000 for the Teichmüller relation.
    pub fn default_plan(seed: u64) -> Self {
        let mut grid = Vec::new();
        for p in [3, 5, 7] {
            for d in [1, 2] {
                for n in 2..=5 {
                    grid.push(GridPoint {
                        p,
                        d,
                        n,
                        m: 2 * n as u32 + 4,
                        f: None,
                    });
                }
            }
        }
        TrialPlan {
            grid,
            trials: 500,
            seed,
            laws: None,
            law_trials: BTreeMap::from([("teich_relation".to_string(), 1000)]),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Malformed(format!("plan: {e}")))
    }

    /// Indices of the selected laws, in table order.
    pub fn selected_laws(&self) -> Result<Vec<usize>> {
        match &self.laws {
            None => Ok((0..laws().len()).collect()),
            Some(names) => {
                let mut idx = names
                    .iter()
                    .map(|n| {
                        law_index(n).ok_or_else(|| Error::Malformed(format!("unknown law {n:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                idx.sort_unstable();
                idx.dedup();
                Ok(idx)
            }
        }
    }

    /// Checks every grid point and that `M` meets each selected law's
    /// precision requirement; returns the settings in grid order.
    pub fn validate(&self) -> Result<Vec<Setting>> {
        for name in self.law_trials.keys() {
            law_index(name).ok_or_else(|| Error::Malformed(format!("unknown law {name:?}")))?;
        }
        let selected = self.selected_laws()?;
        self.grid
            .iter()
            .map(|g| {
                let s = g.setting()?;
                for &li in &selected {
                    let law = &laws()[li];
                    let need = (law.required_precision)(g.n);
                    if (law.applies)(&s) && g.m < need {
                        return Err(Error::underflow(format!(
                            "plan: law {} needs M >= {need} at n = {}, grid point has M = {}",
                            law.name, g.n, g.m
                        )));
                    }
                }
                Ok(s)
            })
            .collect()
    }

    fn trials_for(&self, law: &Law) -> u64 {
        let t = self
            .law_trials
            .get(law.name)
            .copied()
            .unwrap_or(self.trials);
        if law.deterministic {
            t.min(1)
        } else {
            t
        }
    }
}

/// ChaCha20 stream for one `(grid point, law)` pair.
pub fn trial_rng(seed: u64, grid_index: usize, law_index: usize) -> ChaCha20Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    let mut rng = ChaCha20Rng::from_seed(key);
    rng.set_stream(((grid_index as u64) << 32) | law_index as u64);
    rng
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub trial: u64,
    pub inputs: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LawResult {
    pub law: String,
    pub grid_point: GridPoint,
    pub trials: u64,
    /// `"pass"`, `"fail"` or `"error"` (a plan error such as precision underflow).
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub millis: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub seed: JsonInt,
    pub status: String,
    pub results: Vec<LawResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.status == "pass"
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Execution options that do not affect which trials run.
#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub mutation: Option<Mutation>,
    /// Worker threads; `None` or `Some(0)` uses the rayon default.
    pub threads: Option<usize>,
    /// Record wall time per law; off makes reports byte-identical across runs.
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            mutation: None,
            threads: None,
            timing: true,
        }
    }
}

fn run_one(
    plan: &TrialPlan,
    gi: usize,
    setting: &Setting,
    li: usize,
    opts: &RunOptions,
) -> LawResult {
    let law = &laws()[li];
    let start = Instant::now();
    let maps = Maps {
        mutation: opts.mutation,
    };
    let mut rng = trial_rng(plan.seed, gi, li);
    let total = plan.trials_for(law);
    let mut result = LawResult {
        law: law.name.to_string(),
        grid_point: plan.grid[gi].clone(),
        trials: 0,
        status: "pass".into(),
        counterexample: None,
        error: None,
        millis: 0,
    };
    for t in 0..total {
        result.trials = t + 1;
        let inputs = match (law.generate)(setting, &mut rng) {
            Ok(i) => i,
            Err(e) => {
                result.status = "error".into();
                result.error = Some(format!("{}: {e}", e.kind()));
                break;
            }
        };
        let cex = |lhs: Option<Value>, rhs: Option<Value>, error: Option<String>| Counterexample {
            trial: t,
            inputs: inputs.to_json(),
            lhs: lhs.map(|v| v.to_json()),
            rhs: rhs.map(|v| v.to_json()),
            error,
        };
        match (law.evaluate)(setting, &inputs, &maps) {
            Ok(Check::Pass) => {}
            Ok(Check::Fail { lhs, rhs }) => {
                result.status = "fail".into();
                result.counterexample = Some(cex(Some(lhs), Some(rhs), None));
                break;
            }
            Err(e @ Error::PrecisionUnderflow(_)) => {
                result.status = "error".into();
                result.error = Some(format!("{}: {e}", e.kind()));
                break;
            }
            Err(e) => {
                result.status = "fail".into();
                result.counterexample = Some(cex(None, None, Some(format!("{}: {e}", e.kind()))));
                break;
            }
        }
    }
    if opts.timing {
        result.millis = start.elapsed().as_millis() as u64;
    }
    result
}

/// Runs every selected law at every grid point; each `(grid point, law)`
/// pair stops at its first failure.
pub fn check_axioms(plan: &TrialPlan, opts: &RunOptions) -> Result<Report> {
    let settings = plan.validate()?;
    let selected = plan.selected_laws()?;
    let tasks: Vec<(usize, usize)> = (0..settings.len())
        .flat_map(|gi| selected.iter().map(move |&li| (gi, li)))
        .filter(|&(gi, li)| (laws()[li].applies)(&settings[gi]))
        .collect();
    let run = || -> Vec<LawResult> {
        tasks
            .par_iter()
            .map(|&(gi, li)| run_one(plan, gi, &settings[gi], li, opts))
            .collect()
    };
    let results = match opts.threads {
        Some(t) if t > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Malformed(format!("thread pool: {e}")))?
            .install(run),
        _ => run(),
    };
    let status = if results.iter().any(|r| r.status == "fail") {
        "fail"
    } else if results.iter().any(|r| r.status == "error") {
        "error"
    } else {
        "pass"
    };
    Ok(Report {
        seed: JsonInt(plan.seed.into()),
        status: status.into(),
        results,
    })
}

/// Re-evaluates a law on serialized inputs, e.g. a reported counterexample.
pub fn replay(
    law: &str,
    point: &GridPoint,
    inputs: &serde_json::Value,
    mutation: Option<Mutation>,
) -> Result<Check> {
    let li = law_index(law).ok_or_else(|| Error::Malformed(format!("unknown law {law:?}")))?;
    let setting = point.setting()?;
    let inputs = Inputs::from_json(inputs)?;
    (laws()[li].evaluate)(&setting, &inputs, &Maps { mutation })
}

/// Both sides of the Frobenius congruence at index `i`,
/// `(a^{p^{i+1}} − φ(a)^{p^i}) / p^{i+1}` and
/// `((a^{p^i} − φ(a)^{p^{i−1}}) / p^i) · a^{p^i(p−1)}`, and whether they agree
/// modulo `p^i`. Admits `p = 2`.
pub fn congruence_sides(a: &PadicElement, i: u32) -> Result<(bool, PadicElement, PadicElement)> {
    if i == 0 {
        return Err(Error::BadLevel(
            "congruence index must be at least 1".into(),
        ));
    }
    let p = num_bigint::BigUint::from(a.context().p());
    let fa = a.frobenius();
    let pi = p.pow(i);
    let pim1 = p.pow(i - 1);
    let lhs = a.pow(&(&pi * &p)).sub(&fa.pow(&pi))?.exact_div_p(i + 1)?;
    let head = a.pow(&pi).sub(&fa.pow(&pim1))?.exact_div_p(i)?;
    let rhs = head.mul(&a.pow(&(&pi * (&p - 1u32))))?;
    if lhs.prec().min(rhs.prec()) < i {
        return Err(Error::underflow(format!(
            "congruence modulo p^{i} needs more digits"
        )));
    }
    Ok((lhs.eq_at(&rhs, i), lhs, rhs))
}

/// Whether the congruence holds for `a` at index `i` in the context of `a`.
pub fn check_congruence(a: &PadicElement, i: u32) -> Result<bool> {
    Ok(congruence_sides(a, i)?.0)
}

/// `true` iff the congruence fails for `A = Z_2`, `a = 2`, `i = 1`
/// (left side 3, right side 4).
pub fn check_p2_counterexample() -> Result<bool> {
    let ctx = RingContext::zp(2, 8)?;
    Ok(!check_congruence(&PadicElement::from_int(&ctx, 2), 1)?)
}
