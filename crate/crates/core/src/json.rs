//! JSON encodings of rings, elements, Witt vectors, decompositions and
//! complex elements.
//!
//! Integers whose magnitude exceeds `2^53 − 1` are written as decimal strings
//! so that every consumer reads them exactly; parsing accepts either form.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use crate::complex::{E1Element, EElement};
use crate::context::RingContext;
use crate::error::{Error, Result};
use crate::padic::PadicElement;
use crate::witt::{K0Decomposition, VDecomposition, WittVector};

const MAX_SAFE: i64 = (1 << 53) - 1;

/// An integer that round-trips exactly through JSON.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonInt(pub BigInt);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.abs() <= BigInt::from(MAX_SAFE) {
            s.serialize_i64(i64::try_from(&self.0).expect("bounded by 2^53"))
        } else {
            s.serialize_str(&self.0.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct IntVisitor;
        impl Visitor<'_> for IntVisitor {
            type Value = JsonInt;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a decimal string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<JsonInt, E> {
                Ok(JsonInt(v.into()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<JsonInt, E> {
                Ok(JsonInt(v.into()))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<JsonInt, E> {
                v.trim()
                    .parse()
                    .map(JsonInt)
                    .map_err(|_| E::custom(format!("bad integer string {v:?}")))
            }
        }
        d.deserialize_any(IntVisitor)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingJson {
    pub p: u64,
    pub d: usize,
    pub f: Vec<JsonInt>,
    #[serde(rename = "M")]
    pub m: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementJson {
    pub p: u64,
    pub d: usize,
    pub f: Vec<JsonInt>,
    #[serde(rename = "M")]
    pub m: u32,
    pub coeffs: Vec<JsonInt>,
    pub prec: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WittJson {
    pub ring: RingJson,
    pub n: usize,
    pub coords: Vec<ElementJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub kind: String,
    pub coeffs: Vec<ElementJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentJson {
    pub i: usize,
    pub value: ElementJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct E1Json {
    pub ring: RingJson,
    pub n: usize,
    pub components: Vec<ComponentJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EJson {
    pub deg0: WittJson,
    pub deg1: E1Json,
}

/// Conversion to and from the JSON encodings.
pub trait Json: Sized {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;

    fn to_json_string(&self) -> String {
        self.to_json().to_string()
    }

    fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))?;
        Self::from_json(&v)
    }
}

fn encode<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("plain data serializes")
}

fn decode<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T> {
    T::deserialize(v).map_err(|e| Error::Malformed(e.to_string()))
}

fn ints<'a>(xs: impl IntoIterator<Item = &'a BigInt>) -> Vec<JsonInt> {
    xs.into_iter().cloned().map(JsonInt).collect()
}

pub fn ring_json(ctx: &RingContext) -> RingJson {
    RingJson {
        p: ctx.p(),
        d: ctx.degree(),
        f: ints(ctx.polynomial()),
        m: ctx.precision(),
    }
}

pub fn element_json(x: &PadicElement) -> ElementJson {
    let r = ring_json(x.context());
    ElementJson {
        p: r.p,
        d: r.d,
        f: r.f,
        m: r.m,
        coeffs: x
            .coeffs()
            .iter()
            .map(|c| JsonInt(BigInt::from(c.clone())))
            .collect(),
        prec: x.prec(),
    }
}

pub fn witt_json(x: &WittVector) -> WittJson {
    WittJson {
        ring: ring_json(x.context()),
        n: x.level(),
        coords: x.coords().iter().map(element_json).collect(),
    }
}

pub fn e1_json(x: &E1Element) -> E1Json {
    let components = x
        .components()
        .iter()
        .enumerate()
        .filter(|(_, a)| !a.is_zero())
        .map(|(k, a)| ComponentJson {
            i: k + 1,
            value: element_json(a),
        })
        .collect();
    E1Json {
        ring: ring_json(x.context()),
        n: x.level(),
        components,
    }
}

/// Builds contexts while parsing, reusing one `Arc` per distinct ring.
#[derive(Default)]
pub struct ContextCache {
    seen: Vec<(RingJson, Arc<RingContext>)>,
}

impl ContextCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn ring(&mut self, r: &RingJson) -> Result<Arc<RingContext>> {
        if let Some((_, ctx)) = self.seen.iter().find(|(k, _)| k == r) {
            return Ok(Arc::clone(ctx));
        }
        let ctx = RingContext::new(r.p, r.d, r.f.iter().map(|c| c.0.clone()), r.m)?;
        self.seen.push((r.clone(), Arc::clone(&ctx)));
        Ok(ctx)
    }

    pub fn element(&mut self, e: &ElementJson) -> Result<PadicElement> {
        let ctx = self.ring(&RingJson {
            p: e.p,
            d: e.d,
            f: e.f.clone(),
            m: e.m,
        })?;
        PadicElement::new(&ctx, e.coeffs.iter().map(|c| c.0.clone()), e.prec)
    }

    fn elements(
        &mut self,
        ctx: &Arc<RingContext>,
        es: &[ElementJson],
    ) -> Result<Vec<PadicElement>> {
        es.iter()
            .map(|e| {
                let x = self.element(e)?;
                ctx.check_same(x.context())?;
                Ok(x)
            })
            .collect()
    }

    pub fn witt(&mut self, w: &WittJson) -> Result<WittVector> {
        let ctx = self.ring(&w.ring)?;
        if w.coords.len() != w.n {
            return Err(Error::Malformed(format!(
                "level {} with {} coordinates",
                w.n,
                w.coords.len()
            )));
        }
        let coords = self.elements(&ctx, &w.coords)?;
        WittVector::new(&ctx, coords)
    }

    pub fn e1(&mut self, e: &E1Json) -> Result<E1Element> {
        let ctx = self.ring(&e.ring)?;
        let mut entries = Vec::with_capacity(e.components.len());
        for c in &e.components {
            if entries.iter().any(|(i, _)| *i == c.i) {
                return Err(Error::Malformed(format!("component {} listed twice", c.i)));
            }
            let a = self.element(&c.value)?;
            ctx.check_same(a.context())?;
            entries.push((c.i, a));
        }
        E1Element::from_sparse(&ctx, e.n, entries)
    }

    fn coefficient_context(&mut self, coeffs: &[ElementJson]) -> Result<Arc<RingContext>> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::Malformed("empty coefficient list".into()))?;
        Ok(Arc::clone(self.element(first)?.context()))
    }
}

impl Json for Arc<RingContext> {
    fn to_json(&self) -> Value {
        encode(&ring_json(self))
    }
    fn from_json(v: &Value) -> Result<Self> {
        ContextCache::new().ring(&decode(v)?)
    }
}

impl Json for PadicElement {
    fn to_json(&self) -> Value {
        encode(&element_json(self))
    }
    fn from_json(v: &Value) -> Result<Self> {
        ContextCache::new().element(&decode(v)?)
    }
}

impl Json for WittVector {
    fn to_json(&self) -> Value {
        encode(&witt_json(self))
    }
    fn from_json(v: &Value) -> Result<Self> {
        ContextCache::new().witt(&decode(v)?)
    }
}

impl Json for E1Element {
    fn to_json(&self) -> Value {
        encode(&e1_json(self))
    }
    fn from_json(v: &Value) -> Result<Self> {
        ContextCache::new().e1(&decode(v)?)
    }
}

impl Json for EElement {
    fn to_json(&self) -> Value {
        encode(&EJson {
            deg0: witt_json(self.deg0()),
            deg1: e1_json(self.deg1()),
        })
    }
    fn from_json(v: &Value) -> Result<Self> {
        let e: EJson = decode(v)?;
        let mut cache = ContextCache::new();
        EElement::new(cache.witt(&e.deg0)?, cache.e1(&e.deg1)?)
    }
}

impl Json for VDecomposition {
    fn to_json(&self) -> Value {
        encode(&DecompositionJson {
            kind: "v".into(),
            coeffs: self.coeffs().iter().map(element_json).collect(),
            m: None,
        })
    }
    fn from_json(v: &Value) -> Result<Self> {
        let d: DecompositionJson = decode(v)?;
        if d.kind != "v" || d.m.is_some() {
            return Err(Error::Malformed(
                "expected a decomposition of kind \"v\"".into(),
            ));
        }
        let mut cache = ContextCache::new();
        let ctx = cache.coefficient_context(&d.coeffs)?;
        let coeffs = cache.elements(&ctx, &d.coeffs)?;
        VDecomposition::new(&ctx, coeffs)
    }
}

impl Json for K0Decomposition {
    fn to_json(&self) -> Value {
        encode(&DecompositionJson {
            kind: "k0".into(),
            coeffs: self.coeffs().iter().map(element_json).collect(),
            m: Some(self.m()),
        })
    }
    fn from_json(v: &Value) -> Result<Self> {
        let d: DecompositionJson = decode(v)?;
        let m = match (d.kind.as_str(), d.m) {
            ("k0", Some(m)) => m,
            _ => {
                return Err(Error::Malformed(
                    "expected a decomposition of kind \"k0\" with \"m\"".into(),
                ))
            }
        };
        let mut cache = ContextCache::new();
        let ctx = cache.coefficient_context(&d.coeffs)?;
        let coeffs = cache.elements(&ctx, &d.coeffs)?;
        K0Decomposition::new(&ctx, m, coeffs)
    }
}
