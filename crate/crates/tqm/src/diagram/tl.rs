//! Temperley-Lieb diagram algebra with rectangular (bimodule) diagrams.
//!
//! A diagram with `bottom` lower and `top` upper endpoints stores a partner
//! vector over `0..bottom+top`: index `i < bottom` is bottom position `i`
//! (left to right), index `bottom + j` is top position `j` (left to right).
//! Going around the rectangle the circular order is bottom left to right, then
//! top right to left, which is what planarity refers to.
//!
//! Products stack the right factor on top of the left one, so `x * y` means
//! "first `x`, then `y`" when time runs upward.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;

use super::{count_cycles, BraidWord, DiagramError, Pairing};
use crate::poly::{LaurentPoly, NumericParams, RationalFunc};

/// Minimal ring interface for diagram coefficients.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_c(&self, other: &Self) -> Self;
    fn mul_c(&self, other: &Self) -> Self;
    fn neg_c(&self) -> Self;
    /// Reflection conjugate: `A -> A^-1` for exact coefficients, complex conjugation numerically.
    fn conj_c(&self) -> Self;
}

impl Coeff for RationalFunc {
    fn zero() -> Self {
        RationalFunc::zero()
    }
    fn one() -> Self {
        RationalFunc::one()
    }
    fn is_zero(&self) -> bool {
        RationalFunc::is_zero(self)
    }
    fn add_c(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_c(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_c(&self) -> Self {
        -self
    }
    fn conj_c(&self) -> Self {
        self.mirror()
    }
}

impl Coeff for LaurentPoly {
    fn zero() -> Self {
        LaurentPoly::zero()
    }
    fn one() -> Self {
        LaurentPoly::one()
    }
    fn is_zero(&self) -> bool {
        LaurentPoly::is_zero(self)
    }
    fn add_c(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_c(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_c(&self) -> Self {
        -self
    }
    fn conj_c(&self) -> Self {
        self.mirror()
    }
}

impl Coeff for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add_c(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_c(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_c(&self) -> Self {
        -self
    }
    fn conj_c(&self) -> Self {
        self.conj()
    }
}

fn power<C: Coeff>(d: &C, k: usize) -> C {
    let mut acc = C::one();
    for _ in 0..k {
        acc = acc.mul_c(d);
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Top,
    Bottom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Closure {
    Trace,
    Plat,
}

/// Formal linear combination of Temperley-Lieb diagrams.
#[derive(Clone, PartialEq)]
pub struct TLElement<C = RationalFunc> {
    bottom: usize,
    top: usize,
    terms: BTreeMap<Vec<usize>, C>,
}

impl<C: Coeff> TLElement<C> {
    pub fn zero(bottom: usize, top: usize) -> Self {
        Self {
            bottom,
            top,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let partner = (0..2 * n).map(|i| if i < n { i + n } else { i - n }).collect();
        Self::single(n, n, partner, C::one())
    }

    /// The generator `u_i` on `n` strands (`1 <= i <= n-1`).
    pub fn generator(n: usize, i: usize) -> Result<Self, DiagramError> {
        if i == 0 || i >= n {
            return Err(DiagramError::IndexOutOfRange(format!("u_{i} on {n} strands")));
        }
        let mut partner: Vec<usize> = (0..2 * n).map(|p| if p < n { p + n } else { p - n }).collect();
        partner[i - 1] = i;
        partner[i] = i - 1;
        partner[n + i - 1] = n + i;
        partner[n + i] = n + i - 1;
        Ok(Self::single(n, n, partner, C::one()))
    }

    fn single(bottom: usize, top: usize, partner: Vec<usize>, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(partner, c);
        }
        Self { bottom, top, terms }
    }

    /// A single diagram given by a pairing on `bottom + top` points.
    pub fn from_diagram(bottom: usize, top: usize, p: &Pairing, c: C) -> Result<Self, DiagramError> {
        if p.n_points() != bottom + top {
            return Err(DiagramError::InvalidMatching(format!(
                "pairing on {} points for a {bottom}x{top} diagram",
                p.n_points()
            )));
        }
        if !rect_is_planar(bottom, top, p.partners()) {
            return Err(DiagramError::NotPlanar(format!("{:?}", p.pairs())));
        }
        Ok(Self::single(bottom, top, p.partners().to_vec(), c))
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    /// Strand count of a square element.
    pub fn strands(&self) -> Result<usize, DiagramError> {
        if self.bottom == self.top {
            Ok(self.bottom)
        } else {
            Err(DiagramError::StrandMismatch(self.bottom, self.top))
        }
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, C> {
        &self.terms
    }

    pub fn coeff(&self, partner: &[usize]) -> C {
        self.terms.get(partner).cloned().unwrap_or_else(C::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, partner: Vec<usize>, c: &C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&partner) {
            Some(v) => {
                let s = v.add_c(c);
                if s.is_zero() {
                    self.terms.remove(&partner);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(partner, c.clone());
            }
        }
    }

    fn check_shape(&self, other: &Self) -> Result<(), DiagramError> {
        if self.bottom != other.bottom || self.top != other.top {
            return Err(DiagramError::StrandMismatch(self.bottom, other.bottom));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, DiagramError> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, DiagramError> {
        self.add(&other.scale(&C::one().neg_c()))
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut out = Self::zero(self.bottom, self.top);
        for (p, c) in &self.terms {
            out.add_term(p.clone(), &c.mul_c(s));
        }
        out
    }

    /// Stack `other` on top of `self`; each closed loop contributes a factor `d`.
    pub fn compose(&self, other: &Self, d: &C) -> Result<Self, DiagramError> {
        if self.top != other.bottom {
            return Err(DiagramError::StrandMismatch(self.top, other.bottom));
        }
        let mut out = Self::zero(self.bottom, other.top);
        let mut dpow: Vec<C> = vec![C::one()];
        for (xp, xc) in &self.terms {
            for (yp, yc) in &other.terms {
                let (partner, loops) = compose_diagram(self.bottom, self.top, xp, yp);
                while dpow.len() <= loops {
                    let next = dpow.last().unwrap().mul_c(d);
                    dpow.push(next);
                }
                out.add_term(partner, &xc.mul_c(yc).mul_c(&dpow[loops]));
            }
        }
        Ok(out)
    }

    /// Side-by-side placement with `self` on the left.
    pub fn tensor(&self, other: &Self) -> Self {
        let (xb, xt, yb, yt) = (self.bottom, self.top, other.bottom, other.top);
        let nb = xb + yb;
        let map_x = |p: usize| if p < xb { p } else { nb + (p - xb) };
        let map_y = |q: usize| if q < yb { xb + q } else { nb + xt + (q - yb) };
        let mut out = Self::zero(nb, xt + yt);
        for (xp, xc) in &self.terms {
            for (yp, yc) in &other.terms {
                let mut partner = vec![0; nb + xt + yt];
                for (p, &q) in xp.iter().enumerate() {
                    partner[map_x(p)] = map_x(q);
                }
                for (p, &q) in yp.iter().enumerate() {
                    partner[map_y(p)] = map_y(q);
                }
                out.add_term(partner, &xc.mul_c(yc));
            }
        }
        out
    }

    /// Close the element by `Trace` (top `i` to bottom `i`) or `Plat` (caps on neighbours).
    pub fn closure_with(&self, kind: Closure, d: &C) -> Result<C, DiagramError> {
        let n = self.strands()?;
        let glue: Vec<usize> = match kind {
            Closure::Trace => (0..2 * n).map(|i| if i < n { i + n } else { i - n }).collect(),
            Closure::Plat => {
                if n % 2 == 1 {
                    return Err(DiagramError::OddStrands(n));
                }
                (0..2 * n).map(|i| i ^ 1).collect()
            }
        };
        let mut acc = C::zero();
        for (p, c) in &self.terms {
            acc = acc.add_c(&c.mul_c(&power(d, count_cycles(p, &glue))));
        }
        Ok(acc)
    }

    /// Glue a cap onto positions `position, position+1` of one side.
    pub fn cap_adjacent(&self, side: Side, position: usize, d: &C) -> Result<Self, DiagramError> {
        let m = match side {
            Side::Top => self.top,
            Side::Bottom => self.bottom,
        };
        if m < 2 || position + 1 >= m {
            return Err(DiagramError::IndexOutOfRange(format!(
                "cap at {position} on a side with {m} points"
            )));
        }
        match side {
            Side::Top => self.compose(&cap_diagram(m, position), d),
            Side::Bottom => cup_diagram(m, position).compose(self, d),
        }
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> TLElement<D> {
        let mut out = TLElement::zero(self.bottom, self.top);
        for (p, c) in &self.terms {
            out.add_term(p.clone(), &f(c));
        }
        out
    }
}

impl TLElement<RationalFunc> {
    pub fn eval(&self, params: &NumericParams) -> TLElement<Complex64> {
        self.map_coeffs(|c| c.eval_at(params))
    }

    /// Markov (trace) closure; rejects coefficients that are not Laurent polynomials.
    pub fn markov_closure(&self) -> Result<LaurentPoly, DiagramError> {
        self.polynomial_closure(Closure::Trace)
    }

    pub fn plat_closure(&self) -> Result<LaurentPoly, DiagramError> {
        self.polynomial_closure(Closure::Plat)
    }

    fn polynomial_closure(&self, kind: Closure) -> Result<LaurentPoly, DiagramError> {
        let poly = self.to_poly_coeffs().ok_or(DiagramError::NonPolynomial)?;
        poly.closure_with(kind, &LaurentPoly::d())
    }

    pub fn to_poly_coeffs(&self) -> Option<TLElement<LaurentPoly>> {
        let mut out = TLElement::zero(self.bottom, self.top);
        for (p, c) in &self.terms {
            out.add_term(p.clone(), &c.to_poly()?);
        }
        Some(out)
    }

    pub fn mul_checked(&self, other: &Self) -> Result<Self, DiagramError> {
        self.compose(other, &RationalFunc::d())
    }
}

/// Product of two TL elements; loops evaluate to `d = -A^2 - A^-2`.
pub fn tl_multiply(x: &TLElement, y: &TLElement) -> Result<TLElement, DiagramError> {
    if x.bottom != y.bottom || x.top != y.top || x.bottom != x.top {
        return Err(DiagramError::StrandMismatch(x.top, y.bottom));
    }
    x.mul_checked(y)
}

impl Mul<&TLElement> for &TLElement {
    type Output = TLElement;

    /// Panics on incompatible shapes; use [`tl_multiply`] for a checked product.
    fn mul(self, rhs: &TLElement) -> TLElement {
        self.mul_checked(rhs).expect("compatible TL shapes")
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for TLElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (p, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*{p:?}")?;
        }
        Ok(())
    }
}

impl<C: Coeff> fmt::Debug for TLElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TLElement[{}x{}]{{", self.bottom, self.top)?;
        for (p, c) in &self.terms {
            write!(f, " {p:?}: {c:?};")?;
        }
        write!(f, " }}")
    }
}

/// Positions in the circular order used for planarity of a rectangular diagram.
fn rect_is_planar(bottom: usize, top: usize, partner: &[usize]) -> bool {
    let n = bottom + top;
    let circ = |p: usize| if p < bottom { p } else { n - 1 - (p - bottom) };
    let mut circular = vec![0; n];
    for (p, &q) in partner.iter().enumerate() {
        circular[circ(p)] = circ(q);
    }
    Pairing::new(circular).is_ok_and(|c| c.is_planar())
}

/// Compose partner vectors: `x` has `xb` bottom and `m` top points, `y` sits above.
fn compose_diagram(xb: usize, m: usize, xp: &[usize], yp: &[usize]) -> (Vec<usize>, usize) {
    let off = xb + m;
    let yt = yp.len() - m;
    let partner = |g: usize| if g < off { xp[g] } else { off + yp[g - off] };
    let is_boundary = |g: usize| g < xb || g >= off + m;
    let glue = |g: usize| if g < off { g + m } else { g - m };
    let res = |g: usize| if g < xb { g } else { g - off - m + xb };
    let mid = |g: usize| if g < off { g - xb } else { m + (g - off) };

    let mut out = vec![usize::MAX; xb + yt];
    let mut seen = vec![false; 2 * m];
    let boundary = (0..xb).chain(off + m..off + m + yt);
    for g in boundary {
        if out[res(g)] != usize::MAX {
            continue;
        }
        let mut cur = partner(g);
        while !is_boundary(cur) {
            seen[mid(cur)] = true;
            let n = glue(cur);
            seen[mid(n)] = true;
            cur = partner(n);
        }
        out[res(g)] = res(cur);
        out[res(cur)] = res(g);
    }
    let mut loops = 0;
    for i in 0..m {
        if seen[i] {
            continue;
        }
        loops += 1;
        let start = xb + i;
        let mut cur = start;
        loop {
            seen[mid(cur)] = true;
            let n = glue(cur);
            seen[mid(n)] = true;
            cur = partner(n);
            if cur == start {
                break;
            }
        }
    }
    (out, loops)
}

fn cap_diagram<C: Coeff>(m: usize, pos: usize) -> TLElement<C> {
    let mut partner = vec![0; 2 * m - 2];
    partner[pos] = pos + 1;
    partner[pos + 1] = pos;
    let mut j = 0;
    for i in 0..m {
        if i == pos || i == pos + 1 {
            continue;
        }
        partner[i] = m + j;
        partner[m + j] = i;
        j += 1;
    }
    TLElement::single(m, m - 2, partner, C::one())
}

fn cup_diagram<C: Coeff>(m: usize, pos: usize) -> TLElement<C> {
    let b = m - 2;
    let mut partner = vec![0; 2 * m - 2];
    partner[b + pos] = b + pos + 1;
    partner[b + pos + 1] = b + pos;
    let mut j = 0;
    for i in 0..m {
        if i == pos || i == pos + 1 {
            continue;
        }
        partner[j] = b + i;
        partner[b + i] = j;
        j += 1;
    }
    TLElement::single(b, m, partner, C::one())
}

/// `u_i` with unit coefficient on `n` strands.
pub fn tl_generator(n: usize, i: usize) -> Result<TLElement, DiagramError> {
    TLElement::generator(n, i)
}

/// Image of one braid letter: `A id + A^-1 u_i` for positive, `A^-1 id + A u_i` for negative.
pub fn letter_image(n: usize, g: i32) -> Result<TLElement, DiagramError> {
    let i = g.unsigned_abs() as usize;
    let s = g.signum() as i64;
    let id = TLElement::identity(n).scale(&RationalFunc::from_poly(LaurentPoly::monomial(s, 1)));
    let u = TLElement::generator(n, i)?.scale(&RationalFunc::from_poly(LaurentPoly::monomial(-s, 1)));
    id.add(&u)
}

/// Product of letter images in word order.
pub fn braid_to_tl(w: &BraidWord) -> TLElement {
    let n = w.strands();
    let d = RationalFunc::d();
    let mut acc = TLElement::identity(n);
    for &g in w.letters() {
        let img = letter_image(n, g).expect("valid braid letters");
        acc = acc.compose(&img, &d).expect("square shapes");
    }
    acc
}

pub fn markov_closure(x: &TLElement) -> Result<LaurentPoly, DiagramError> {
    x.markov_closure()
}

pub fn plat_closure(x: &TLElement) -> Result<LaurentPoly, DiagramError> {
    x.plat_closure()
}

pub fn cap_adjacent(x: &TLElement, side: Side, position: usize) -> Result<TLElement, DiagramError> {
    x.cap_adjacent(side, position, &RationalFunc::d())
}

/// The Jones-Wenzl projector `P_m`, built by the standard recursion.
pub fn jones_wenzl(m: usize) -> Result<TLElement, DiagramError> {
    if m == 0 {
        return Err(DiagramError::IndexOutOfRange("Jones-Wenzl index must be >= 1".into()));
    }
    let d = RationalFunc::d();
    let mut p = TLElement::identity(1);
    for n in 0..m - 1 {
        // p = P_{n+1}; build P_{n+2}.
        let q = p.tensor(&TLElement::identity(1));
        let u = TLElement::generator(n + 2, n + 1)?;
        let qu = q.compose(&u, &d)?.compose(&q, &d)?;
        let ratio = RationalFunc::new(crate::poly::delta(n as i64), crate::poly::delta(n as i64 + 1))
            .map_err(|_| DiagramError::NonPolynomial)?;
        p = q.sub(&qu.scale(&ratio))?;
    }
    Ok(p)
}
