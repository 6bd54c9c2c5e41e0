//! Laurent polynomials in the skein variable `A`, ratios of them, and
//! numeric evaluation at a unit-modulus phase.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("invalid numeric parameters: {0}")]
    InvalidParams(String),
    #[error("malformed polynomial JSON: {0}")]
    Json(String),
}

/// Exact Laurent polynomial with arbitrary-precision integer coefficients.
///
/// Zero coefficients are never stored, so structural equality is value
/// equality.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(exp: i64, coeff: impl Into<BigInt>) -> Self {
        let c = coeff.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Self { terms }
    }

    /// The variable `A` itself.
    pub fn a() -> Self {
        Self::monomial(1, 1)
    }

    /// The loop value `d = -A^2 - A^-2`.
    pub fn d() -> Self {
        Self::from_terms([(2, BigInt::from(-1)), (-2, BigInt::from(-1))])
    }

    /// `(-A^3)^w`, the framing factor of `w` positive kinks.
    pub fn framing(w: i64) -> Self {
        let sign = if w.rem_euclid(2) == 0 { 1 } else { -1 };
        Self::monomial(3 * w, sign)
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, BigInt)>>(iter: I) -> Self {
        let mut terms: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (e, c) in iter {
            *terms.entry(e).or_insert_with(BigInt::zero) += c;
        }
        terms.retain(|_, c| !c.is_zero());
        Self { terms }
    }

    /// Convenience constructor from small integer pairs `(exponent, coefficient)`.
    pub fn from_i64_terms(pairs: &[(i64, i64)]) -> Self {
        Self::from_terms(pairs.iter().map(|&(e, c)| (e, BigInt::from(c))))
    }

    pub fn terms(&self) -> &BTreeMap<i64, BigInt> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        self.terms.get(&exp).cloned().unwrap_or_default()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.terms.values().next_back()
    }

    /// Returns `(exponent, coefficient)` when the polynomial has exactly one term.
    pub fn as_monomial(&self) -> Option<(i64, &BigInt)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, c)| (*e, c))
        } else {
            None
        }
    }

    /// Multiply by `A^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e, c * s)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Substitute `A -> A^-1`.
    pub fn mirror(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    /// Greatest common divisor of all coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Exact quotient `self / other`, if `other` divides `self` in `Z[A, A^-1]`.
    pub fn div_exact(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let (b_lo, b_hi) = (other.min_exp()?, other.max_exp()?);
        let b_lead = other.leading_coeff()?.clone();
        let mut rem = self.clone();
        let mut quot = BTreeMap::new();
        loop {
            let Some(r_hi) = rem.max_exp() else { break };
            let r_lo = rem.min_exp()?;
            if r_hi - r_lo < b_hi - b_lo {
                return None;
            }
            let (q, r) = rem.leading_coeff()?.div_rem(&b_lead);
            if !r.is_zero() {
                return None;
            }
            let shift = r_hi - b_hi;
            rem -= &(&Self::monomial(shift, q.clone()) * other);
            quot.insert(shift, q);
        }
        Some(Self::from_terms(quot))
    }

    /// Evaluate at an arbitrary nonzero complex `A`.
    pub fn eval(&self, a: Complex64) -> Complex64 {
        let (Some(lo), Some(hi)) = (self.min_exp(), self.max_exp()) else {
            return Complex64::zero();
        };
        // Horner over the dense range, then restore the lowest power.
        let mut acc = Complex64::zero();
        for e in (lo..=hi).rev() {
            acc *= a;
            if let Some(c) = self.terms.get(&e) {
                acc += c.to_f64().unwrap_or(f64::NAN);
            }
        }
        acc * a.powi(lo as i32)
    }

    pub fn eval_at(&self, params: &NumericParams) -> Complex64 {
        self.eval(params.a)
    }

    /// Serialize as `{"variable":"A","terms":[[exp,"coeff"],...]}` in ascending order.
    pub fn to_json(&self) -> Value {
        self.to_json_var("A")
    }

    pub fn to_json_var(&self, var: &str) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(e, c)| json!([e, c.to_string()]))
            .collect();
        json!({ "variable": var, "terms": terms })
    }

    pub fn from_json(v: &Value) -> Result<Self, PolyError> {
        let bad = |m: &str| PolyError::Json(m.to_string());
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing terms array"))?;
        let mut out = Vec::with_capacity(terms.len());
        let mut last: Option<i64> = None;
        for t in terms {
            let pair = t.as_array().filter(|p| p.len() == 2).ok_or_else(|| bad("term is not a pair"))?;
            let e = pair[0].as_i64().ok_or_else(|| bad("exponent is not an integer"))?;
            let c: BigInt = pair[1]
                .as_str()
                .ok_or_else(|| bad("coefficient is not a string"))?
                .parse()
                .map_err(|_| bad("coefficient is not an integer"))?;
            if last.is_some_and(|l| l >= e) {
                return Err(bad("exponents must be strictly ascending"));
            }
            if c.is_zero() {
                return Err(bad("zero coefficient stored"));
            }
            last = Some(e);
            out.push((e, c));
        }
        Ok(Self::from_terms(out))
    }

    /// Render with a custom variable name and exponent formatter.
    pub fn render(&self, var: &str, exp_fmt: impl Fn(i64) -> String) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono = match *e {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{}", exp_fmt(*e)),
            };
            if mono.is_empty() {
                s.push_str(&mag.to_string());
            } else if mag.is_one() {
                s.push_str(&mono);
            } else {
                s.push_str(&format!("{mag}*{mono}"));
            }
        }
        s
    }

    fn to_dense(&self) -> Vec<BigInt> {
        let (Some(lo), Some(hi)) = (self.min_exp(), self.max_exp()) else {
            return Vec::new();
        };
        (lo..=hi).map(|e| self.coeff(e)).collect()
    }

    fn from_dense(v: &[BigInt]) -> Self {
        Self::from_terms(v.iter().enumerate().map(|(i, c)| (i as i64, c.clone())))
    }
}

fn dense_trim(v: &mut Vec<BigInt>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

fn dense_primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    dense_trim(&mut v);
    let g = v.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if !g.is_zero() && !g.is_one() {
        for c in v.iter_mut() {
            *c /= &g;
        }
    }
    v
}

fn dense_pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let lb = b.last().expect("nonzero divisor").clone();
    dense_trim(&mut r);
    while r.len() >= b.len() && !r.is_empty() {
        let lr = r.last().unwrap().clone();
        let shift = r.len() - b.len();
        for c in r.iter_mut() {
            *c *= &lb;
        }
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] -= &lr * bc;
        }
        dense_trim(&mut r);
    }
    r
}

/// Polynomial gcd of two Laurent polynomials, up to units of `Z[A, A^-1]`.
///
/// The result is primitive, has lowest exponent zero and a positive leading
/// coefficient. Integer content is deliberately not part of it.
pub fn poly_gcd(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    if a.is_zero() {
        return normalize_unit(b);
    }
    if b.is_zero() {
        return normalize_unit(a);
    }
    let mut x = dense_primitive(a.to_dense());
    let mut y = dense_primitive(b.to_dense());
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = dense_primitive(dense_pseudo_rem(&x, &y));
        x = y;
        y = r;
    }
    normalize_unit(&LaurentPoly::from_dense(&x))
}

fn normalize_unit(p: &LaurentPoly) -> LaurentPoly {
    if p.is_zero() {
        return LaurentPoly::zero();
    }
    let c = p.content();
    let lo = p.min_exp().unwrap_or(0);
    let mut q = LaurentPoly::from_terms(p.terms.iter().map(|(e, v)| (e - lo, v / &c)));
    if q.leading_coeff().is_some_and(Signed::is_negative) {
        q = -q;
    }
    q
}

/// `Delta_n` from `Delta_{n+1} = d Delta_n - Delta_{n-1}`, `Delta_{-1} = 0`, `Delta_0 = 1`.
pub fn delta(n: i64) -> LaurentPoly {
    if n < 0 {
        return LaurentPoly::zero();
    }
    let d = LaurentPoly::d();
    let (mut prev, mut cur) = (LaurentPoly::zero(), LaurentPoly::one());
    for _ in 0..n {
        let next = &(&d * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

macro_rules! forward_binop {
    ($t:ty, $tr:ident, $m:ident) => {
        impl $tr<$t> for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&$t> for $t {
            type Output = $t;
            fn $m(self, rhs: &$t) -> $t {
                (&self).$m(rhs)
            }
        }
        impl $tr<$t> for &$t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                self.$m(&rhs)
            }
        }
    };
}

impl Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut terms: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                *terms.entry(ea + eb).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        LaurentPoly { terms }
    }
}

forward_binop!(LaurentPoly, Add, add);
forward_binop!(LaurentPoly, Sub, sub);
forward_binop!(LaurentPoly, Mul, mul);

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in &rhs.terms {
            let entry = self.terms.entry(*e).or_insert_with(BigInt::zero);
            *entry += c;
            if entry.is_zero() {
                self.terms.remove(e);
            }
        }
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in &rhs.terms {
            let entry = self.terms.entry(*e).or_insert_with(BigInt::zero);
            *entry -= c;
            if entry.is_zero() {
                self.terms.remove(e);
            }
        }
    }
}

impl MulAssign<&LaurentPoly> for LaurentPoly {
    fn mul_assign(&mut self, rhs: &LaurentPoly) {
        *self = &*self * rhs;
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(mut self) -> LaurentPoly {
        for c in self.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -self.clone()
    }
}

impl From<i64> for LaurentPoly {
    fn from(c: i64) -> Self {
        Self::constant(c)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("A", |e| e.to_string()))
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

/// Ratio of Laurent polynomials kept in lowest terms.
///
/// Canonical form: numerator and denominator share no polynomial factor and no
/// integer content, the denominator has lowest exponent zero and a positive
/// leading coefficient.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunc {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RationalFunc {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self, PolyError> {
        if den.is_zero() {
            return Err(PolyError::ZeroDenominator);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: LaurentPoly, den: LaurentPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if den.is_one() {
            return Self { num, den };
        }
        let g = poly_gcd(&num, &den);
        let (mut num, mut den) = if g.max_exp() == Some(0) {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        let c = num.content().gcd(&den.content());
        if !c.is_one() {
            num = LaurentPoly::from_terms(num.terms.iter().map(|(e, v)| (*e, v / &c)));
            den = LaurentPoly::from_terms(den.terms.iter().map(|(e, v)| (*e, v / &c)));
        }
        let lo = den.min_exp().unwrap_or(0);
        num = num.shift(-lo);
        den = den.shift(-lo);
        if den.leading_coeff().is_some_and(Signed::is_negative) {
            num = -num;
            den = -den;
        }
        Self { num, den }
    }

    pub fn zero() -> Self {
        Self {
            num: LaurentPoly::zero(),
            den: LaurentPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_poly(LaurentPoly::one())
    }

    pub fn d() -> Self {
        Self::from_poly(LaurentPoly::d())
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        Self {
            num: p,
            den: LaurentPoly::one(),
        }
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The polynomial value, when the denominator is trivial.
    pub fn to_poly(&self) -> Option<LaurentPoly> {
        self.den.is_one().then(|| self.num.clone())
    }

    pub fn inv(&self) -> Result<Self, PolyError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, PolyError> {
        Ok(self * &other.inv()?)
    }

    pub fn mirror(&self) -> Self {
        Self::normalized(self.num.mirror(), self.den.mirror())
    }

    pub fn eval(&self, a: Complex64) -> Complex64 {
        self.num.eval(a) / self.den.eval(a)
    }

    pub fn eval_at(&self, params: &NumericParams) -> Complex64 {
        self.eval(params.a)
    }

    pub fn to_json(&self) -> Value {
        json!({ "numerator": self.num.to_json(), "denominator": self.den.to_json() })
    }

    /// Accepts either a bare polynomial object or `{"numerator", "denominator"}`.
    pub fn from_json(v: &Value) -> Result<Self, PolyError> {
        match (v.get("numerator"), v.get("denominator")) {
            (Some(n), Some(d)) => Self::new(LaurentPoly::from_json(n)?, LaurentPoly::from_json(d)?),
            _ => Ok(Self::from_poly(LaurentPoly::from_json(v)?)),
        }
    }
}

/// Explicit normalization entry point; rejects zero denominators.
pub fn rational_normalize(num: LaurentPoly, den: LaurentPoly) -> Result<RationalFunc, PolyError> {
    RationalFunc::new(num, den)
}

impl Add<&RationalFunc> for &RationalFunc {
    type Output = RationalFunc;
    fn add(self, rhs: &RationalFunc) -> RationalFunc {
        if self.den == rhs.den {
            return RationalFunc::normalized(&self.num + &rhs.num, self.den.clone());
        }
        RationalFunc::normalized(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub<&RationalFunc> for &RationalFunc {
    type Output = RationalFunc;
    fn sub(self, rhs: &RationalFunc) -> RationalFunc {
        self + &(-rhs)
    }
}

impl Mul<&RationalFunc> for &RationalFunc {
    type Output = RationalFunc;
    fn mul(self, rhs: &RationalFunc) -> RationalFunc {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunc::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RationalFunc::from_poly(&self.num * &rhs.num);
        }
        RationalFunc::normalized(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

forward_binop!(RationalFunc, Add, add);
forward_binop!(RationalFunc, Sub, sub);
forward_binop!(RationalFunc, Mul, mul);

impl Neg for &RationalFunc {
    type Output = RationalFunc;
    fn neg(self) -> RationalFunc {
        RationalFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for RationalFunc {
    type Output = RationalFunc;
    fn neg(self) -> RationalFunc {
        -&self
    }
}

impl From<LaurentPoly> for RationalFunc {
    fn from(p: LaurentPoly) -> Self {
        Self::from_poly(p)
    }
}

impl fmt::Display for RationalFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunc({self})")
    }
}

/// A numeric point on the unit circle where polynomials get evaluated.
///
/// `theta = pi / (2(k+2))`, `A = exp(i theta)`, `d = -2 cos(pi/(k+2))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericParams {
    pub k: f64,
    pub theta: f64,
    pub a: Complex64,
    pub d: f64,
}

impl NumericParams {
    pub const DEFAULT_K: f64 = 1000.0;

    pub fn from_k(k: f64) -> Result<Self, PolyError> {
        if !k.is_finite() || k <= 0.0 {
            return Err(PolyError::InvalidParams(format!("level k must be positive, got {k}")));
        }
        let theta = std::f64::consts::PI / (2.0 * (k + 2.0));
        Ok(Self {
            k,
            theta,
            a: Complex64::from_polar(1.0, theta),
            d: -2.0 * (std::f64::consts::PI / (k + 2.0)).cos(),
        })
    }

    pub fn from_theta(theta: f64) -> Result<Self, PolyError> {
        if !theta.is_finite() || theta <= 0.0 || theta >= std::f64::consts::FRAC_PI_4 {
            return Err(PolyError::InvalidParams(format!(
                "theta must lie in (0, pi/4), got {theta}"
            )));
        }
        Self::from_k(std::f64::consts::PI / (2.0 * theta) - 2.0)
    }
}

impl Default for NumericParams {
    fn default() -> Self {
        Self::from_k(Self::DEFAULT_K).expect("default level is valid")
    }
}

/// A Jones polynomial re-expressed in `q` via `A^4 -> q^-1`.
///
/// When some `A` exponent is not divisible by four the polynomial is kept in
/// the variable `q^(1/4)` instead.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QForm {
    pub quarter: bool,
    pub poly: LaurentPoly,
}

impl QForm {
    pub fn from_a(p: &LaurentPoly) -> Self {
        let quarter = p.terms().keys().any(|e| e.rem_euclid(4) != 0);
        let div = if quarter { 1 } else { 4 };
        Self {
            quarter,
            poly: LaurentPoly::from_terms(p.terms().iter().map(|(e, c)| (-e / div, c.clone()))),
        }
    }

    pub fn variable(&self) -> &'static str {
        if self.quarter {
            "q^(1/4)"
        } else {
            "q"
        }
    }

    pub fn to_json(&self) -> Value {
        self.poly.to_json_var(self.variable())
    }
}

impl fmt::Display for QForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.quarter {
            f.write_str(&self.poly.render("q", |e| format!("({e}/4)")))
        } else {
            f.write_str(&self.poly.render("q", |e| e.to_string()))
        }
    }
}
