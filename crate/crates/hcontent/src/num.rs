//! Exact rationals and mixed exact/float values.
//!
//! Radii and costs stay exact while the exponent is an integer. Anything
//! involving a fractional power falls back to `f64` and is compared with the
//! tolerance [`tau`].

use std::cmp::Ordering;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Q = BigRational;

/// Default float comparison tolerance.
pub const DEFAULT_TAU: f64 = 1e-9;

static TAU_BITS: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695);

/// Current float comparison tolerance.
pub fn tau() -> f64 {
    f64::from_bits(TAU_BITS.load(AtomicOrdering::Relaxed))
}

/// Sets the process-wide tolerance; meant to be called once before any computation.
pub fn set_tau(t: f64) -> Result<(), String> {
    if !(t.is_finite() && t > 0.0 && t < 1e-3) {
        return Err(format!("tolerance must lie in (0, 1e-3), got {t}"));
    }
    TAU_BITS.store(t.to_bits(), AtomicOrdering::Relaxed);
    Ok(())
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("cannot parse `{0}` as a rational number")]
pub struct ParseQError(pub String);

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p/q`, integers and finite decimals (`0.125`, `1e-3`) exactly.
pub fn parse_q(s: &str) -> Result<Q, ParseQError> {
    let t = s.trim();
    let err = || ParseQError(s.to_string());
    if let Some((a, b)) = t.split_once('/') {
        let n: BigInt = a.trim().parse().map_err(|_| err())?;
        let d: BigInt = b.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Q::new(n, d));
    }
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (t, 0),
    };
    let neg = mant.starts_with('-');
    let body = mant.trim_start_matches(['-', '+']);
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(err());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits: BigInt = format!("0{ip}{fp}").parse().map_err(|_| err())?;
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    let mut v = Q::from_integer(digits);
    if scale >= 0 {
        v *= Q::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        v /= Q::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -v } else { v })
}

pub fn q_str(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn q_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact conversion of a finite float.
pub fn q_from_f64(x: f64) -> Q {
    Q::from_float(x).unwrap_or_else(Q::zero)
}

pub fn q_pow(x: &Q, k: u32) -> Q {
    num_traits::pow(x.clone(), k as usize)
}

pub fn q_abs(x: &Q) -> Q {
    x.abs()
}

pub fn q_max(a: &Q, b: &Q) -> Q {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn q_min(a: &Q, b: &Q) -> Q {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn q_ceil_i64(x: &Q) -> i64 {
    x.ceil().to_integer().to_i64().expect("ceil out of i64 range")
}

pub fn q_floor_i64(x: &Q) -> i64 {
    x.floor().to_integer().to_i64().expect("floor out of i64 range")
}

/// `x^(1/k)` when it is rational.
pub fn q_root_exact(x: &Q, k: u32) -> Option<Q> {
    if k == 0 || x.is_negative() {
        return None;
    }
    if k == 1 {
        return Some(x.clone());
    }
    let rn = x.numer().nth_root(k);
    let rd = x.denom().nth_root(k);
    if num_traits::pow(rn.clone(), k as usize) == *x.numer()
        && num_traits::pow(rd.clone(), k as usize) == *x.denom()
    {
        Some(Q::new(rn, rd))
    } else {
        None
    }
}

/// Positive real exponent, kept as a rational.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Exponent(Q);

impl Exponent {
    pub fn new(m: Q) -> Result<Self, String> {
        if m.is_positive() {
            Ok(Exponent(m))
        } else {
            Err(format!("exponent must be positive, got {}", q_str(&m)))
        }
    }

    pub fn int(m: u32) -> Self {
        Exponent(qi(m as i64))
    }

    pub fn parse(s: &str) -> Result<Self, String> {
        let v = parse_q(s).map_err(|e| e.to_string())?;
        Self::new(v)
    }

    pub fn q(&self) -> &Q {
        &self.0
    }

    pub fn f64(&self) -> f64 {
        q_f64(&self.0)
    }

    pub fn as_int(&self) -> Option<u32> {
        if self.0.is_integer() {
            self.0.to_integer().to_u32()
        } else {
            None
        }
    }

    pub fn minus_one(&self) -> Option<Exponent> {
        Exponent::new(&self.0 - qi(1)).ok()
    }

    pub fn plus_one(&self) -> Exponent {
        Exponent(&self.0 + qi(1))
    }

    /// `ceil(m)` as an integer.
    pub fn ceil(&self) -> i64 {
        q_ceil_i64(&self.0)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&q_str(&self.0))
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q_str(&self.0))
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let s = match v {
            serde_json::Value::String(s) => s,
            serde_json::Value::Number(n) => n.to_string(),
            _ => return Err(serde::de::Error::custom("exponent must be a string or number")),
        };
        Exponent::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// A real value that is exact whenever the computation allowed it.
#[derive(Debug, Clone, PartialEq)]
pub enum Val {
    Exact(Q),
    Approx(f64),
}

impl Val {
    pub fn zero() -> Val {
        Val::Exact(Q::zero())
    }

    pub fn from_i64(n: i64) -> Val {
        Val::Exact(qi(n))
    }

    pub fn f64(&self) -> f64 {
        match self {
            Val::Exact(q) => q_f64(q),
            Val::Approx(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Val::Exact(_))
    }

    pub fn exact(&self) -> Option<&Q> {
        match self {
            Val::Exact(q) => Some(q),
            Val::Approx(_) => None,
        }
    }

    pub fn add(&self, o: &Val) -> Val {
        match (self, o) {
            (Val::Exact(a), Val::Exact(b)) => Val::Exact(a + b),
            _ => Val::Approx(self.f64() + o.f64()),
        }
    }

    pub fn sub(&self, o: &Val) -> Val {
        match (self, o) {
            (Val::Exact(a), Val::Exact(b)) => Val::Exact(a - b),
            _ => Val::Approx(self.f64() - o.f64()),
        }
    }

    pub fn mul(&self, o: &Val) -> Val {
        match (self, o) {
            (Val::Exact(a), Val::Exact(b)) => Val::Exact(a * b),
            _ => Val::Approx(self.f64() * o.f64()),
        }
    }

    pub fn mul_q(&self, k: &Q) -> Val {
        self.mul(&Val::Exact(k.clone()))
    }

    pub fn div(&self, o: &Val) -> Val {
        match (self, o) {
            (Val::Exact(a), Val::Exact(b)) if !b.is_zero() => Val::Exact(a / b),
            _ => Val::Approx(self.f64() / o.f64()),
        }
    }

    pub fn sum<'a>(it: impl IntoIterator<Item = &'a Val>) -> Val {
        it.into_iter().fold(Val::zero(), |acc, v| acc.add(v))
    }

    /// `self <= o`, exactly when both sides are exact, else within [`tau`].
    pub fn le(&self, o: &Val) -> bool {
        match (self, o) {
            (Val::Exact(a), Val::Exact(b)) => a <= b,
            _ => le_tol(self.f64(), o.f64()),
        }
    }

    pub fn lt(&self, o: &Val) -> bool {
        match (self, o) {
            (Val::Exact(a), Val::Exact(b)) => a < b,
            _ => self.f64() < o.f64() - tau() * o.f64().abs().max(1.0),
        }
    }

    pub fn eq_tol(&self, o: &Val) -> bool {
        self.le(o) && o.le(self)
    }

    pub fn cmp_val(&self, o: &Val) -> Ordering {
        match (self, o) {
            (Val::Exact(a), Val::Exact(b)) => a.cmp(b),
            _ => self.f64().partial_cmp(&o.f64()).unwrap_or(Ordering::Equal),
        }
    }

    pub fn max(&self, o: &Val) -> Val {
        if self.cmp_val(o) == Ordering::Less {
            o.clone()
        } else {
            self.clone()
        }
    }

    pub fn min(&self, o: &Val) -> Val {
        if o.cmp_val(self) == Ordering::Less {
            o.clone()
        } else {
            self.clone()
        }
    }

    /// `self^e` for an exponent; exact when `e` is an integer.
    pub fn pow(&self, e: &Exponent) -> Val {
        match (self, e.as_int()) {
            (Val::Exact(q), Some(k)) => Val::Exact(q_pow(q, k)),
            _ => Val::Approx(self.f64().powf(e.f64())),
        }
    }

    /// `self^(num/den)`; exact when the root is rational.
    pub fn pow_ratio(&self, num: u32, den: u32) -> Val {
        if let Val::Exact(q) = self {
            if let Some(r) = q_root_exact(q, den) {
                return Val::Exact(q_pow(&r, num));
            }
        }
        Val::Approx(self.f64().powf(num as f64 / den as f64))
    }

    /// `self^p` for a real power given as an [`Exponent`]-like rational.
    pub fn pow_q(&self, p: &Q) -> Val {
        if let (Val::Exact(x), Some(n), Some(d)) =
            (self, p.numer().to_u32(), p.denom().to_u32())
        {
            if let Some(r) = q_root_exact(x, d) {
                return Val::Exact(q_pow(&r, n));
            }
        }
        Val::Approx(self.f64().powf(q_f64(p)))
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Exact(q) => f.write_str(&q_str(q)),
            Val::Approx(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Val {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Val::Exact(q) => s.serialize_str(&q_str(q)),
            Val::Approx(x) => s.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Val {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) => {
                parse_q(&s).map(Val::Exact).map_err(serde::de::Error::custom)
            }
            serde_json::Value::Number(n) => Ok(Val::Approx(n.as_f64().unwrap_or(f64::NAN))),
            _ => Err(serde::de::Error::custom("value must be a string or number")),
        }
    }
}

/// `a <= b` within tolerance.
pub fn le_tol(a: f64, b: f64) -> bool {
    a <= b + tau() * b.abs().max(1.0)
}

/// `r^m`, exact for integer `m`.
pub fn pow_cost(r: &Q, m: &Exponent) -> Val {
    Val::Exact(r.clone()).pow(m)
}

/// Serde helpers for rationals as `"p/q"` strings.
pub mod qser {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q_str(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) => parse_q(&s).map_err(serde::de::Error::custom),
            serde_json::Value::Number(n) => {
                parse_q(&n.to_string()).map_err(serde::de::Error::custom)
            }
            _ => Err(serde::de::Error::custom("rational must be a string or number")),
        }
    }
}

/// Serde helpers for vectors of rationals.
pub mod qvec {
    use super::*;

    pub fn serialize<S: Serializer>(x: &[Q], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(x.iter().map(q_str))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        let v: Vec<serde_json::Value> = Vec::deserialize(d)?;
        v.into_iter()
            .map(|e| match e {
                serde_json::Value::String(s) => parse_q(&s).map_err(serde::de::Error::custom),
                serde_json::Value::Number(n) => {
                    parse_q(&n.to_string()).map_err(serde::de::Error::custom)
                }
                _ => Err(serde::de::Error::custom("rational must be a string or number")),
            })
            .collect()
    }
}

pub fn one() -> Q {
    Q::one()
}
