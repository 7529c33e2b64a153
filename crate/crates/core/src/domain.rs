//! Confidence domains: preordered monoids `(D, ≤, ⊥, ⊤, ⊛)` with `⊥` neutral
//! and `⊤` absorbing.
//!
//! Registered domains, addressable by string id:
//!
//! | id          | carrier                 | `⊛`                              |
//! |-------------|-------------------------|----------------------------------|
//! | `frac`      | `[0, 1]`                | `s + s'(1 - s)`                  |
//! | `add`       | `[0, ∞]`                | `+`                              |
//! | `max`       | `[0, 1]`                | `max`                            |
//! | `count`     | `{0, 1, 2, …, ∞}`       | `+`                              |
//! | `kalman`    | pairs `(K, r²)`         | sequential gain composition      |
//! | `list:<id>` | finite lists over `<id>`| concatenation collapsing `⊤`     |
//!
//! `⊥` and `⊤` are explicit payload variants; arithmetic branches on them
//! before touching any floating-point value. For the non-commutative domains
//! (`kalman`, `list:*`) `combine(a, b)` means "`a` first, then `b`".

use std::fmt;
use std::str::FromStr;

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Absolute tolerance for confidence comparisons.
pub const TOL: f64 = 1e-12;

/// A registered confidence domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ConfidenceDomain {
    /// Fractional domain `[0,1]`, `s ⊛ s' = s + s' - s s'`.
    Frac,
    /// Additive domain `[0,∞]` under addition.
    Add,
    /// `[0,1]` under `max`.
    Max,
    /// Extended naturals under addition (training-step counts).
    Count,
    /// Kalman gain/sensor-variance pairs.
    Kalman,
    /// Free list extension of an inner domain.
    List(Box<ConfidenceDomain>),
}

/// Shape of a domain's underlying set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Carrier {
    UnitInterval,
    HalfLine,
    ExtendedNaturals,
    GainVariancePairs,
    FiniteLists(Box<Carrier>),
}

/// The payload of a confidence value.
#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    Bot,
    Top,
    Real(f64),
    /// Kalman gain `gain ∈ [0,1]` with sensor variance `variance ∈ [0,∞]`.
    Pair { gain: f64, variance: f64 },
    List(Vec<ConfidenceValue>),
}

/// An element of a [`ConfidenceDomain`].
#[derive(Clone, Debug, PartialEq)]
pub struct ConfidenceValue {
    domain: ConfidenceDomain,
    payload: Payload,
}

impl ConfidenceValue {
    pub fn domain(&self) -> &ConfidenceDomain {
        &self.domain
    }

    pub fn payload(&self) -> &Payload {
        &self.payload
    }

    pub fn is_bot(&self) -> bool {
        match &self.payload {
            Payload::Bot => true,
            Payload::List(items) => items.is_empty(),
            _ => false,
        }
    }

    pub fn is_top(&self) -> bool {
        match &self.payload {
            Payload::Top => true,
            Payload::List(items) => items.len() == 1 && items[0].is_top(),
            _ => false,
        }
    }

    /// Scalar view for one-dimensional domains: `⊥ ↦ 0`, `⊤ ↦ 1` on `[0,1]`
    /// carriers and `⊤ ↦ +∞` on unbounded ones. `None` for pairs and lists.
    pub fn as_extended_real(&self) -> Option<f64> {
        let top = match self.domain {
            ConfidenceDomain::Frac | ConfidenceDomain::Max => 1.0,
            ConfidenceDomain::Add | ConfidenceDomain::Count => f64::INFINITY,
            _ => return None,
        };
        match self.payload {
            Payload::Bot => Some(0.0),
            Payload::Top => Some(top),
            Payload::Real(r) => Some(r),
            _ => None,
        }
    }

    /// Gain and sensor variance of a Kalman value; `⊥ ↦ (0, ∞)`, `⊤ ↦ (1, 0)`.
    pub fn as_gain_pair(&self) -> Option<(f64, f64)> {
        if self.domain != ConfidenceDomain::Kalman {
            return None;
        }
        match self.payload {
            Payload::Bot => Some((0.0, f64::INFINITY)),
            Payload::Top => Some((1.0, 0.0)),
            Payload::Pair { gain, variance } => Some((gain, variance)),
            _ => None,
        }
    }

    /// Elements of a list value.
    pub fn as_list(&self) -> Option<&[ConfidenceValue]> {
        match &self.payload {
            Payload::List(items) => Some(items),
            _ => None,
        }
    }

    /// Human-readable form used in CSV output.
    pub fn display_value(&self) -> String {
        match &self.payload {
            Payload::Bot => "bot".into(),
            Payload::Top => "top".into(),
            Payload::Real(r) => format!("{r}"),
            Payload::Pair { gain, variance } => format!("{gain}:{variance}"),
            Payload::List(items) => {
                let inner: Vec<_> = items.iter().map(|c| c.display_value()).collect();
                format!("[{}]", inner.join(" "))
            }
        }
    }
}

impl Serialize for ConfidenceValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match &self.payload {
            Payload::Bot => s.serialize_str("bot"),
            Payload::Top => s.serialize_str("top"),
            Payload::Real(r) => s.serialize_f64(*r),
            Payload::Pair { gain, variance } => {
                let mut seq = s.serialize_seq(Some(2))?;
                seq.serialize_element(gain)?;
                if variance.is_finite() {
                    seq.serialize_element(variance)?;
                } else {
                    seq.serialize_element("inf")?;
                }
                seq.end()
            }
            Payload::List(items) => {
                let mut map = s.serialize_map(Some(1))?;
                map.serialize_entry("list", items)?;
                map.end()
            }
        }
    }
}

impl fmt::Display for ConfidenceDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfidenceDomain::Frac => f.write_str("frac"),
            ConfidenceDomain::Add => f.write_str("add"),
            ConfidenceDomain::Max => f.write_str("max"),
            ConfidenceDomain::Count => f.write_str("count"),
            ConfidenceDomain::Kalman => f.write_str("kalman"),
            ConfidenceDomain::List(inner) => write!(f, "list:{inner}"),
        }
    }
}

impl FromStr for ConfidenceDomain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frac" => Ok(ConfidenceDomain::Frac),
            "add" => Ok(ConfidenceDomain::Add),
            "max" => Ok(ConfidenceDomain::Max),
            "count" => Ok(ConfidenceDomain::Count),
            "kalman" => Ok(ConfidenceDomain::Kalman),
            _ => match s.strip_prefix("list:") {
                Some(inner) => Ok(list_extend(&inner.parse()?)),
                None => Err(Error::Config(format!("unknown confidence domain `{s}`"))),
            },
        }
    }
}

impl ConfidenceDomain {
    pub fn id(&self) -> String {
        self.to_string()
    }

    pub fn carrier(&self) -> Carrier {
        match self {
            ConfidenceDomain::Frac | ConfidenceDomain::Max => Carrier::UnitInterval,
            ConfidenceDomain::Add => Carrier::HalfLine,
            ConfidenceDomain::Count => Carrier::ExtendedNaturals,
            ConfidenceDomain::Kalman => Carrier::GainVariancePairs,
            ConfidenceDomain::List(inner) => Carrier::FiniteLists(Box::new(inner.carrier())),
        }
    }

    /// True when `⊛` is commutative.
    pub fn is_commutative(&self) -> bool {
        !matches!(self, ConfidenceDomain::Kalman | ConfidenceDomain::List(_))
    }

    fn wrap(&self, payload: Payload) -> ConfidenceValue {
        ConfidenceValue {
            domain: self.clone(),
            payload,
        }
    }

    pub fn bot(&self) -> ConfidenceValue {
        match self {
            ConfidenceDomain::List(_) => self.wrap(Payload::List(Vec::new())),
            _ => self.wrap(Payload::Bot),
        }
    }

    pub fn top(&self) -> ConfidenceValue {
        match self {
            ConfidenceDomain::List(inner) => self.wrap(Payload::List(vec![inner.top()])),
            _ => self.wrap(Payload::Top),
        }
    }

    /// Builds a scalar value, canonicalizing the carrier endpoints to `⊥`/`⊤`.
    pub fn value(&self, r: f64) -> Result<ConfidenceValue> {
        let bad = |reason: String| Error::InvalidConfidence {
            domain: self.id(),
            reason,
        };
        if r.is_nan() {
            return Err(bad("NaN".into()));
        }
        match self {
            ConfidenceDomain::Frac | ConfidenceDomain::Max => {
                if !(0.0..=1.0).contains(&r) {
                    return Err(bad(format!("{r} outside [0,1]")));
                }
                Ok(self.scalar(r, 1.0))
            }
            ConfidenceDomain::Add => {
                if r < 0.0 {
                    return Err(bad(format!("{r} is negative")));
                }
                Ok(self.scalar(r, f64::INFINITY))
            }
            ConfidenceDomain::Count => {
                if r < 0.0 || (r.is_finite() && r.fract() != 0.0) {
                    return Err(bad(format!("{r} is not an extended natural")));
                }
                Ok(self.scalar(r, f64::INFINITY))
            }
            ConfidenceDomain::Kalman | ConfidenceDomain::List(_) => {
                Err(bad("scalar values are not elements of this domain".into()))
            }
        }
    }

    fn scalar(&self, r: f64, top: f64) -> ConfidenceValue {
        if r == 0.0 {
            self.bot()
        } else if r >= top {
            self.top()
        } else {
            self.wrap(Payload::Real(r))
        }
    }

    /// Builds a Kalman `(K, r²)` value.
    pub fn pair(&self, gain: f64, variance: f64) -> Result<ConfidenceValue> {
        if *self != ConfidenceDomain::Kalman {
            return Err(Error::InvalidConfidence {
                domain: self.id(),
                reason: "gain/variance pairs belong to the kalman domain".into(),
            });
        }
        if !(0.0..=1.0).contains(&gain) || variance.is_nan() || variance < 0.0 {
            return Err(Error::InvalidConfidence {
                domain: self.id(),
                reason: format!("pair ({gain}, {variance}) needs K in [0,1] and r2 >= 0"),
            });
        }
        Ok(self.wrap(Payload::Pair { gain, variance }))
    }

    /// Builds a list value; any `⊤` element collapses the list to `[⊤]`.
    pub fn list(&self, items: Vec<ConfidenceValue>) -> Result<ConfidenceValue> {
        let ConfidenceDomain::List(inner) = self else {
            return Err(Error::InvalidConfidence {
                domain: self.id(),
                reason: "lists belong to list domains".into(),
            });
        };
        for item in &items {
            check_member(inner, item)?;
        }
        if items.iter().any(ConfidenceValue::is_top) {
            return Ok(self.top());
        }
        Ok(self.wrap(Payload::List(items)))
    }

    pub fn contains(&self, v: &ConfidenceValue) -> bool {
        if v.domain != *self {
            return false;
        }
        match (&v.payload, self) {
            (Payload::Bot | Payload::Top, ConfidenceDomain::List(_)) => false,
            (Payload::Bot | Payload::Top, _) => true,
            (Payload::Real(r), ConfidenceDomain::Frac | ConfidenceDomain::Max) => {
                (0.0..1.0).contains(r)
            }
            (Payload::Real(r), ConfidenceDomain::Add) => r.is_finite() && *r >= 0.0,
            (Payload::Real(r), ConfidenceDomain::Count) => {
                r.is_finite() && *r >= 0.0 && r.fract() == 0.0
            }
            (Payload::Pair { gain, variance }, ConfidenceDomain::Kalman) => {
                (0.0..=1.0).contains(gain) && *variance >= 0.0
            }
            (Payload::List(items), ConfidenceDomain::List(inner)) => {
                let tops = items.iter().filter(|c| c.is_top()).count();
                items.iter().all(|c| inner.contains(c))
                    && (tops == 0 || items.len() == 1)
                    && items.iter().all(|c| c.as_list().is_none())
            }
            _ => false,
        }
    }

    /// `a ⊛ b`.
    pub fn combine(&self, a: &ConfidenceValue, b: &ConfidenceValue) -> Result<ConfidenceValue> {
        check_member(self, a)?;
        check_member(self, b)?;
        if let ConfidenceDomain::List(_) = self {
            let mut items = a.as_list().unwrap_or_default().to_vec();
            items.extend_from_slice(b.as_list().unwrap_or_default());
            return self.list(items);
        }
        if a.is_top() || b.is_top() {
            return Ok(self.top());
        }
        if a.is_bot() {
            return Ok(b.clone());
        }
        if b.is_bot() {
            return Ok(a.clone());
        }
        match (self, &a.payload, &b.payload) {
            (ConfidenceDomain::Frac, Payload::Real(s), Payload::Real(t)) => {
                self.value((s + t * (1.0 - s)).min(1.0))
            }
            (ConfidenceDomain::Add | ConfidenceDomain::Count, Payload::Real(s), Payload::Real(t)) => {
                self.value(s + t)
            }
            (ConfidenceDomain::Max, Payload::Real(s), Payload::Real(t)) => self.value(s.max(*t)),
            (ConfidenceDomain::Kalman, _, _) => kalman_combine(a, b),
            _ => unreachable!("membership checked above"),
        }
    }

    /// The domain preorder. For `kalman` this is lexicographic on `K`, then
    /// reversed on `r²`; it is a reporting convention only.
    pub fn leq(&self, a: &ConfidenceValue, b: &ConfidenceValue) -> Result<bool> {
        check_member(self, a)?;
        check_member(self, b)?;
        if a.is_bot() || b.is_top() {
            return Ok(true);
        }
        if b.is_bot() || a.is_top() {
            return Ok(false);
        }
        Ok(match (self, &a.payload, &b.payload) {
            (_, Payload::Real(s), Payload::Real(t)) => *s <= *t + TOL,
            (ConfidenceDomain::Kalman, _, _) => {
                let (k1, r1) = a.as_gain_pair().expect("kalman value");
                let (k2, r2) = b.as_gain_pair().expect("kalman value");
                k1 < k2 - TOL || ((k1 - k2).abs() <= TOL && r1 >= r2 - TOL)
            }
            (ConfidenceDomain::List(inner), Payload::List(xs), Payload::List(ys)) => {
                if xs.len() > ys.len() {
                    false
                } else {
                    let n = xs.len();
                    let prefix = xs[..n - 1]
                        .iter()
                        .zip(ys)
                        .all(|(x, y)| approx_eq(x, y));
                    prefix && inner.leq(&xs[n - 1], &ys[n - 1])?
                }
            }
            _ => unreachable!("membership checked above"),
        })
    }
}

fn check_member(d: &ConfidenceDomain, v: &ConfidenceValue) -> Result<()> {
    if v.domain != *d {
        return Err(Error::DomainMismatch {
            expected: d.id(),
            found: v.domain.id(),
        });
    }
    if !d.contains(v) {
        return Err(Error::InvalidConfidence {
            domain: d.id(),
            reason: format!("{} is not an element", v.display_value()),
        });
    }
    Ok(())
}

/// Equality up to [`TOL`], componentwise for pairs and lists.
pub fn approx_eq(a: &ConfidenceValue, b: &ConfidenceValue) -> bool {
    confidence_distance(a, b).is_some_and(|d| d <= TOL)
}

/// Componentwise max-abs distance between two values of the same domain;
/// `⊥`/`⊤` compare exactly. `None` when the shapes differ.
pub fn confidence_distance(a: &ConfidenceValue, b: &ConfidenceValue) -> Option<f64> {
    if a.domain != b.domain {
        return None;
    }
    match (&a.payload, &b.payload) {
        (Payload::Top, Payload::Top) | (Payload::Bot, Payload::Bot) => Some(0.0),
        (Payload::Bot, Payload::Real(r)) | (Payload::Real(r), Payload::Bot) => Some(r.abs()),
        (Payload::Real(r), Payload::Real(s)) => Some((r - s).abs()),
        (Payload::List(xs), Payload::List(ys)) if xs.len() == ys.len() => xs
            .iter()
            .zip(ys)
            .map(|(x, y)| confidence_distance(x, y))
            .try_fold(0.0_f64, |acc, d| d.map(|d| acc.max(d))),
        _ => match (a.as_gain_pair(), b.as_gain_pair()) {
            (Some((k1, r1)), Some((k2, r2))) => {
                let dr = if r1 == r2 { 0.0 } else { (r1 - r2).abs() };
                Some((k1 - k2).abs().max(dr))
            }
            _ => None,
        },
    }
}

/// `a ⊛ b` in domain `d`.
pub fn combine(
    d: &ConfidenceDomain,
    a: &ConfidenceValue,
    b: &ConfidenceValue,
) -> Result<ConfidenceValue> {
    d.combine(a, b)
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(Error::param("beta", format!("{beta} must lie in (0, inf)")))
    }
}

/// The isomorphism `φ_β(s) = -(1/β) log(1 - s)` from `frac` to `add`.
pub fn frac_to_add(beta: f64, s: &ConfidenceValue) -> Result<ConfidenceValue> {
    check_beta(beta)?;
    check_member(&ConfidenceDomain::Frac, s)?;
    let add = ConfidenceDomain::Add;
    match s.payload {
        Payload::Bot => Ok(add.bot()),
        Payload::Top => Ok(add.top()),
        Payload::Real(s) => add.value(-(-s).ln_1p() / beta),
        _ => unreachable!(),
    }
}

/// The inverse isomorphism `φ_β⁻¹(t) = 1 - e^{-βt}`.
pub fn add_to_frac(beta: f64, t: &ConfidenceValue) -> Result<ConfidenceValue> {
    check_beta(beta)?;
    check_member(&ConfidenceDomain::Add, t)?;
    let frac = ConfidenceDomain::Frac;
    match t.payload {
        Payload::Bot => Ok(frac.bot()),
        Payload::Top => Ok(frac.top()),
        Payload::Real(t) => frac.value(-(-beta * t).exp_m1()),
        _ => unreachable!(),
    }
}

/// `K²·r²` with `0·∞ = 0`.
pub(crate) fn gain_weighted(gain: f64, variance: f64) -> f64 {
    if gain == 0.0 {
        0.0
    } else {
        gain * gain * variance
    }
}

/// Composes two Kalman confidences: updating with `c1` and then `c2` equals
/// one update with the result.
///
/// `K₃ = K₁ + K₂ - K₁K₂` and
/// `r₃² = (K₂² r₂² + K₁² (1-K₂)² r₁²) / K₃²`. When both gains vanish the
/// denominator is zero; the result is then `(0, r₁²)`, which updates as the
/// identity like any zero-gain value.
pub fn kalman_combine(c1: &ConfidenceValue, c2: &ConfidenceValue) -> Result<ConfidenceValue> {
    let d = ConfidenceDomain::Kalman;
    check_member(&d, c1)?;
    check_member(&d, c2)?;
    if c1.is_top() || c2.is_top() {
        return Ok(d.top());
    }
    if c1.is_bot() {
        return Ok(c2.clone());
    }
    if c2.is_bot() {
        return Ok(c1.clone());
    }
    let (k1, r1) = c1.as_gain_pair().expect("kalman pair");
    let (k2, r2) = c2.as_gain_pair().expect("kalman pair");
    let k3 = k1 + k2 - k1 * k2;
    if k3 == 0.0 {
        return d.pair(0.0, r1);
    }
    let r3 = (gain_weighted(k2, r2) + gain_weighted(k1 * (1.0 - k2), r1)) / (k3 * k3);
    d.pair(k3.min(1.0), r3)
}

/// The free list extension of `d`. Extending a list domain returns it unchanged,
/// since lists never nest.
pub fn list_extend(d: &ConfidenceDomain) -> ConfidenceDomain {
    match d {
        ConfidenceDomain::List(_) => d.clone(),
        _ => ConfidenceDomain::List(Box::new(d.clone())),
    }
}

/// Every registered scalar and pair domain.
pub fn registered_domains() -> Vec<ConfidenceDomain> {
    vec![
        ConfidenceDomain::Frac,
        ConfidenceDomain::Add,
        ConfidenceDomain::Max,
        ConfidenceDomain::Count,
        ConfidenceDomain::Kalman,
        list_extend(&ConfidenceDomain::Frac),
    ]
}

/// Parses a JSON confidence literal relative to a domain: a number, `"bot"`,
/// `"top"`, `[K, r2]` for pairs, or `{"list": [...]}`.
pub fn parse_confidence(d: &ConfidenceDomain, v: &serde_json::Value) -> Result<ConfidenceValue> {
    use serde_json::Value;
    let bad = || Error::Config(format!("cannot read `{v}` as a `{d}` confidence"));
    match v {
        Value::String(s) if s == "bot" => Ok(d.bot()),
        Value::String(s) if s == "top" => Ok(d.top()),
        Value::String(s) if s == "inf" => d.value(f64::INFINITY),
        Value::Number(n) => d.value(n.as_f64().ok_or_else(bad)?),
        Value::Array(items) if *d == ConfidenceDomain::Kalman && items.len() == 2 => {
            let gain = items[0].as_f64().ok_or_else(bad)?;
            let variance = match &items[1] {
                Value::String(s) if s == "inf" => f64::INFINITY,
                other => other.as_f64().ok_or_else(bad)?,
            };
            d.pair(gain, variance)
        }
        Value::Object(map) => {
            let ConfidenceDomain::List(inner) = d else {
                return Err(bad());
            };
            let items = map.get("list").and_then(Value::as_array).ok_or_else(bad)?;
            let items = items
                .iter()
                .map(|x| parse_confidence(inner, x))
                .collect::<Result<Vec<_>>>()?;
            d.list(items)
        }
        _ => Err(bad()),
    }
}
