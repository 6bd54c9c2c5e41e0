//! Cap-diagram Hilbert spaces on a line of boundary points.
//!
//! A state is a linear combination of non-crossing matchings. The inner
//! product reflects the bra, glues it onto the ket and counts `d` per loop.
//! Several parties share one joined line; each party owns a contiguous
//! block of points, listed left to right.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};
use thiserror::Error;

use crate::bracket::tangle_expansion;
use crate::diagram::{
    braid_to_tl, count_cycles, enumerate_matchings, jones_wenzl, BraidClosure, BraidWord, Coeff,
    DiagramError, Pairing, PlanarMatching, TLElement, TangleDiagram,
};
use crate::poly::{LaurentPoly, NumericParams, PolyError, RationalFunc};
use crate::rmatrix::{matching_state, FlatState, LaurentMatrix, RMatrixError};

/// Relative norm below which a Gram-Schmidt direction counts as null.
pub const NULL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HilbertError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    RMatrix(#[from] RMatrixError),
    #[error("point count mismatch: {0} vs {1}")]
    PointMismatch(usize, usize),
    #[error("party sizes {0:?} do not fit the state")]
    BadParties(Vec<usize>),
    #[error("degenerate parameters: {0}")]
    Degenerate(String),
    #[error("malformed state file: {0}")]
    Json(String),
}

/// Linear combination of cap diagrams on `n_points` boundary points.
#[derive(Clone, PartialEq)]
pub struct CapBasisState<C = RationalFunc> {
    n_points: usize,
    parties: Vec<usize>,
    terms: BTreeMap<PlanarMatching, C>,
}

impl<C: Coeff> CapBasisState<C> {
    pub fn zero(n_points: usize) -> Self {
        Self {
            n_points,
            parties: vec![n_points],
            terms: BTreeMap::new(),
        }
    }

    pub fn from_matching(m: PlanarMatching, c: C) -> Self {
        let mut s = Self::zero(m.n_points());
        s.add_term(m, &c);
        s
    }

    pub fn basis(m: PlanarMatching) -> Self {
        Self::from_matching(m, C::one())
    }

    /// Declare party blocks; sizes must sum to the point count.
    pub fn with_parties(mut self, sizes: &[usize]) -> Result<Self, HilbertError> {
        if sizes.iter().sum::<usize>() != self.n_points || sizes.contains(&0) {
            return Err(HilbertError::BadParties(sizes.to_vec()));
        }
        self.parties = sizes.to_vec();
        Ok(self)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn parties(&self) -> &[usize] {
        &self.parties
    }

    /// First point index of every party.
    pub fn party_offsets(&self) -> Vec<usize> {
        self.parties
            .iter()
            .scan(0, |acc, &s| {
                let o = *acc;
                *acc += s;
                Some(o)
            })
            .collect()
    }

    pub fn terms(&self) -> &BTreeMap<PlanarMatching, C> {
        &self.terms
    }

    pub fn coeff(&self, m: &PlanarMatching) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: PlanarMatching, c: &C) {
        assert_eq!(m.n_points(), self.n_points, "matching on the wrong point count");
        match self.terms.entry(m) {
            Entry::Occupied(mut o) => {
                let v = o.get().add_c(c);
                if v.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c.clone());
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, HilbertError> {
        if self.n_points != other.n_points {
            return Err(HilbertError::PointMismatch(self.n_points, other.n_points));
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut out = Self {
            n_points: self.n_points,
            parties: self.parties.clone(),
            terms: BTreeMap::new(),
        };
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &c.mul_c(s));
        }
        out
    }

    /// Juxtaposition on the joined line, `self` to the left.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n_points + other.n_points);
        out.parties = self.parties.iter().chain(&other.parties).copied().collect();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(PlanarMatching::concat(&[a, b]), &ca.mul_c(cb));
            }
        }
        out
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> CapBasisState<D> {
        let mut out = CapBasisState::zero(self.n_points);
        out.parties = self.parties.clone();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &f(c));
        }
        out
    }

    /// The state as a Temperley-Lieb element with no bottom points.
    pub fn to_tl(&self) -> TLElement<C> {
        let mut el = TLElement::zero(0, self.n_points);
        for (m, c) in &self.terms {
            el.add_term(m.partners().to_vec(), c);
        }
        el
    }

    pub fn from_tl(el: &TLElement<C>) -> Result<Self, HilbertError> {
        if el.bottom() != 0 {
            return Err(HilbertError::PointMismatch(el.bottom(), 0));
        }
        let mut out = Self::zero(el.top());
        for (p, c) in el.terms() {
            out.add_term(PlanarMatching::new(p.clone())?, c);
        }
        Ok(out)
    }

    /// Stack a square operator on points `offset..offset+op.top()`.
    pub fn apply_tl(&self, op: &TLElement<C>, offset: usize, d: &C) -> Result<Self, HilbertError> {
        let w = op.strands()?;
        if offset + w > self.n_points {
            return Err(HilbertError::PointMismatch(offset + w, self.n_points));
        }
        let full = TLElement::identity(offset)
            .tensor(op)
            .tensor(&TLElement::identity(self.n_points - offset - w));
        let mut out = Self::from_tl(&self.to_tl().compose(&full, d)?)?;
        out.parties = self.parties.clone();
        Ok(out)
    }

    /// Cyclic relabeling: point `p` moves to `(p + shift) mod n`.
    pub fn rotate(&self, shift: usize) -> Result<Self, HilbertError> {
        let n = self.n_points;
        let mut out = Self::zero(n);
        for (m, c) in &self.terms {
            let mut partner = vec![0; n];
            for p in 0..n {
                partner[(p + shift) % n] = (m.partner(p) + shift) % n;
            }
            out.add_term(PlanarMatching::new(partner)?, c);
        }
        Ok(out)
    }
}

impl CapBasisState<RationalFunc> {
    /// Apply the braid's Temperley-Lieb image on points `offset..offset+strands`, first letter first.
    pub fn apply_braid(&self, w: &BraidWord, offset: usize) -> Result<Self, HilbertError> {
        self.apply_tl(&braid_to_tl(w), offset, &RationalFunc::d())
    }

    pub fn eval(&self, params: &NumericParams) -> CapBasisState<Complex64> {
        self.map_coeffs(|c| c.eval_at(params))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n_points": self.n_points,
            "parties": self.parties,
            "terms": self
                .terms
                .iter()
                .map(|(m, c)| json!([m.partners(), c.to_json()]))
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, HilbertError> {
        let bad = |m: &str| HilbertError::Json(m.to_string());
        let n = v
            .get("n_points")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("missing n_points"))? as usize;
        let mut s = Self::zero(n);
        for t in v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("missing terms"))? {
            let pair = t.as_array().filter(|p| p.len() == 2).ok_or_else(|| bad("term is not a pair"))?;
            let partner: Vec<usize> =
                serde_json::from_value(pair[0].clone()).map_err(|e| bad(&format!("matching: {e}")))?;
            if partner.len() != n {
                return Err(HilbertError::PointMismatch(partner.len(), n));
            }
            let c = match &pair[1] {
                Value::Number(x) => RationalFunc::from_poly(LaurentPoly::constant(
                    x.as_i64().ok_or_else(|| bad("numeric coefficient must be an integer"))?,
                )),
                other => RationalFunc::from_json(other)?,
            };
            s.add_term(PlanarMatching::new(partner)?, &c);
        }
        match v.get("parties") {
            Some(p) => {
                let sizes: Vec<usize> =
                    serde_json::from_value(p.clone()).map_err(|e| bad(&format!("parties: {e}")))?;
                s.with_parties(&sizes)
            }
            None => Ok(s),
        }
    }
}

impl CapBasisState<Complex64> {
    pub fn norm_sqr(&self, params: &NumericParams) -> f64 {
        overlap_numeric(self, self, params).re
    }
}

impl<C: Coeff> std::fmt::Debug for CapBasisState<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CapBasisState")
            .field("n_points", &self.n_points)
            .field("parties", &self.parties)
            .field("terms", &self.terms)
            .finish()
    }
}

/// `⟨x|y⟩`: reflected bra glued to the ket, `d` per loop.
pub fn overlap<C: Coeff>(x: &CapBasisState<C>, y: &CapBasisState<C>, d: &C) -> Result<C, HilbertError> {
    if x.n_points != y.n_points {
        return Err(HilbertError::PointMismatch(x.n_points, y.n_points));
    }
    let mut dpow = vec![C::one()];
    let mut acc = C::zero();
    for (mx, cx) in &x.terms {
        let bra = cx.conj_c();
        for (my, cy) in &y.terms {
            let loops = count_cycles(mx.partners(), my.partners());
            while dpow.len() <= loops {
                let next = dpow.last().unwrap().mul_c(d);
                dpow.push(next);
            }
            acc = acc.add_c(&bra.mul_c(cy).mul_c(&dpow[loops]));
        }
    }
    Ok(acc)
}

pub fn overlap_exact(x: &CapBasisState, y: &CapBasisState) -> Result<RationalFunc, HilbertError> {
    overlap(x, y, &RationalFunc::d())
}

/// Numeric overlap; panics on mismatched point counts, which callers rule out.
pub fn overlap_numeric(x: &CapBasisState<Complex64>, y: &CapBasisState<Complex64>, params: &NumericParams) -> Complex64 {
    overlap(x, y, &Complex64::new(params.d, 0.0)).expect("states on the same points")
}

/// Sign making the loop form definite on `n_points`.
///
/// Two matchings on `n` points always close into a number of loops with the
/// parity of `n / 2`, so at negative `d` the form is `(-1)^(n/2)` times a
/// positive one.
pub fn form_sign(n_points: usize, params: &NumericParams) -> f64 {
    if params.d < 0.0 && (n_points / 2) % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// The positive inner product: the loop overlap times [`form_sign`].
pub fn inner_product(x: &CapBasisState<Complex64>, y: &CapBasisState<Complex64>, params: &NumericParams) -> Complex64 {
    overlap_numeric(x, y, params) * form_sign(x.n_points, params)
}

/// Orthonormalize in the given order, dropping null directions.
///
/// Each retained vector has a positive coefficient on its own seed state,
/// except that the first one is divided by `d^(n/4)` (signed) when `4 | n`,
/// so that a 4-point space starts with `e_0 / d`.
pub fn gram_schmidt(
    seeds: &[CapBasisState<Complex64>],
    params: &NumericParams,
    tolerance: f64,
) -> (Vec<CapBasisState<Complex64>>, Vec<usize>) {
    let mut basis: Vec<CapBasisState<Complex64>> = Vec::new();
    let mut kept = Vec::new();
    for (i, seed) in seeds.iter().enumerate() {
        let sign = form_sign(seed.n_points, params);
        let scale = sign * seed.norm_sqr(params);
        if scale.abs() < f64::MIN_POSITIVE {
            continue;
        }
        let mut v = seed.clone();
        // Two passes keep the result orthogonal to working precision.
        for _ in 0..2 {
            for u in &basis {
                let p = inner_product(u, &v, params);
                v = v.add(&u.scale(&-p)).expect("same point count");
            }
        }
        let nrm = sign * v.norm_sqr(params);
        if nrm / scale < tolerance {
            continue;
        }
        let mut s = 1.0 / nrm.sqrt();
        if basis.is_empty() && seed.n_points % 4 == 0 && params.d < 0.0 && (seed.n_points / 4) % 2 == 1 {
            s = -s;
        }
        basis.push(v.scale(&Complex64::new(s, 0.0)));
        kept.push(i);
    }
    (basis, kept)
}

/// Exact Gram matrix plus the numeric orthonormalization at given parameters.
#[derive(Clone, Debug)]
pub struct GramData {
    pub n_points: usize,
    pub matchings: Vec<PlanarMatching>,
    /// `gram[i][j] = d^(loops)`, exact.
    pub gram: LaurentMatrix,
    /// Columns are the orthonormal vectors in matching coordinates.
    pub transform: DMatrix<Complex64>,
    pub numeric_rank: usize,
    pub tolerance: f64,
}

impl GramData {
    pub fn evaluated(&self, params: &NumericParams) -> DMatrix<Complex64> {
        self.gram.eval_at(params)
    }
}

pub fn gram_matrix(n_points: usize, params: &NumericParams) -> Result<GramData, HilbertError> {
    if n_points % 2 == 1 {
        return Err(DiagramError::OddStrands(n_points).into());
    }
    let matchings = enumerate_matchings(n_points / 2);
    let d = LaurentPoly::d();
    let gram = LaurentMatrix::from_fn(matchings.len(), matchings.len(), |i, j| {
        d.pow(count_cycles(matchings[i].partners(), matchings[j].partners()) as u32)
    });
    let seeds: Vec<CapBasisState<Complex64>> = matchings.iter().cloned().map(CapBasisState::basis).collect();
    let (basis, _) = gram_schmidt(&seeds, params, NULL_TOLERANCE);
    let index: BTreeMap<&PlanarMatching, usize> = matchings.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut transform = DMatrix::zeros(matchings.len(), basis.len());
    for (col, u) in basis.iter().enumerate() {
        for (m, c) in u.terms() {
            transform[(index[m], col)] = *c;
        }
    }
    Ok(GramData {
        n_points,
        numeric_rank: basis.len(),
        matchings,
        gram,
        transform,
        tolerance: NULL_TOLERANCE,
    })
}

fn check_qubit_params(params: &NumericParams) -> Result<(), HilbertError> {
    let d2 = params.d * params.d;
    if d2.abs() < NULL_TOLERANCE || (d2 - 1.0).abs() < NULL_TOLERANCE {
        return Err(HilbertError::Degenerate(format!("d^2 = {d2}")));
    }
    Ok(())
}

/// `|0⟩ = e_0/d`, `|1⟩ = (e_1 - e_0/d)/sqrt(d^2-1)` on four points.
pub fn orthonormal_qubit_basis(params: &NumericParams) -> Result<[CapBasisState<Complex64>; 2], HilbertError> {
    check_qubit_params(params)?;
    let ms = enumerate_matchings(2);
    let d = Complex64::new(params.d, 0.0);
    let e0 = CapBasisState::basis(ms[0].clone());
    let e1 = CapBasisState::basis(ms[1].clone());
    let zero = e0.scale(&(1.0 / d));
    let one = e1
        .add(&zero.scale(&-Complex64::new(1.0, 0.0)))?
        .scale(&Complex64::new(1.0 / (params.d * params.d - 1.0).sqrt(), 0.0));
    Ok([zero, one])
}

/// Orthonormal basis of one party's `n_points` space, in canonical order.
pub fn party_basis(n_points: usize, params: &NumericParams) -> Result<Vec<CapBasisState<Complex64>>, HilbertError> {
    if n_points == 4 {
        return Ok(orthonormal_qubit_basis(params)?.to_vec());
    }
    let seeds: Vec<_> = enumerate_matchings(n_points / 2)
        .into_iter()
        .map(CapBasisState::basis)
        .collect();
    Ok(gram_schmidt(&seeds, params, NULL_TOLERANCE).0)
}

/// The exact projected seeds of a spin-`j` qudit and their orthonormalization.
#[derive(Clone, Debug)]
pub struct QuditBasis {
    pub two_j: usize,
    pub n_points: usize,
    /// Indexed by intermediate spin label.
    pub projected: Vec<CapBasisState>,
    pub states: Vec<CapBasisState<Complex64>>,
}

/// Four groups of `m = 2j` points; seed `a` joins G1-G2 and G3-G4 by `a` arcs,
/// G2-G3 and G1-G4 by `m - a` arcs.
pub fn qudit_seed(two_j: usize, a: usize) -> Result<PlanarMatching, HilbertError> {
    let m = two_j;
    let mut pairs = Vec::new();
    for t in 0..a {
        pairs.push((m - 1 - t, m + t));
        pairs.push((3 * m - 1 - t, 3 * m + t));
    }
    for t in 0..m - a {
        pairs.push((2 * m - 1 - t, 2 * m + t));
        pairs.push((t, 4 * m - 1 - t));
    }
    Ok(PlanarMatching::from_pairs(4 * m, &pairs)?)
}

pub fn qudit_basis(two_j: usize, params: &NumericParams) -> Result<QuditBasis, HilbertError> {
    if two_j == 0 {
        return Err(HilbertError::Degenerate("spin 0 carries no qudit".into()));
    }
    let m = two_j;
    let p = jones_wenzl(m)?;
    let p4 = p.tensor(&p).tensor(&p).tensor(&p);
    let d = RationalFunc::d();
    let mut projected = Vec::new();
    for a in (0..=m).rev() {
        let seed = CapBasisState::<RationalFunc>::basis(qudit_seed(m, a)?);
        projected.push(CapBasisState::from_tl(&seed.to_tl().compose(&p4, &d)?)?);
    }
    let seeds: Vec<_> = projected.iter().map(|s| s.eval(params)).collect();
    let (states, kept) = gram_schmidt(&seeds, params, NULL_TOLERANCE);
    if kept.len() != m + 1 {
        return Err(HilbertError::Degenerate(format!(
            "only {} of {} qudit states survive",
            kept.len(),
            m + 1
        )));
    }
    Ok(QuditBasis {
        two_j,
        n_points: 4 * m,
        projected,
        states,
    })
}

/// Coefficients on a product of per-party bases, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientGrid {
    pub dims: Vec<usize>,
    pub values: Vec<Complex64>,
}

impl CoefficientGrid {
    pub fn index(&self, labels: &[usize]) -> usize {
        labels.iter().zip(&self.dims).fold(0, |acc, (l, d)| acc * d + l)
    }

    pub fn get(&self, labels: &[usize]) -> Complex64 {
        self.values[self.index(labels)]
    }

    pub fn labels(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for &d in &self.dims {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..d).map(move |l| {
                        let mut q = p.clone();
                        q.push(l);
                        q
                    })
                })
                .collect();
        }
        out
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(Complex64::norm_sqr).sum()
    }

    /// As a two-party matrix: rows are labels of the first `split` parties.
    pub fn as_matrix(&self, split: usize) -> DMatrix<Complex64> {
        let rows: usize = self.dims[..split].iter().product();
        let cols: usize = self.dims[split..].iter().product();
        DMatrix::from_row_slice(rows, cols, &self.values)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dims": self.dims,
            "coefficients": self
                .labels()
                .iter()
                .zip(&self.values)
                .map(|(l, v)| json!({"labels": l, "re": v.re, "im": v.im}))
                .collect::<Vec<_>>(),
        })
    }
}

fn product_states(bases: &[Vec<CapBasisState<Complex64>>]) -> Vec<CapBasisState<Complex64>> {
    let mut out = vec![CapBasisState::from_matching(PlanarMatching::empty(), Complex64::new(1.0, 0.0))];
    for b in bases {
        out = out.iter().flat_map(|p| b.iter().map(move |u| p.tensor(u))).collect();
    }
    out
}

/// Coefficients `⟨i j ...|s⟩` against the given per-party bases.
pub fn expand_in_bases(
    s: &CapBasisState<Complex64>,
    bases: &[Vec<CapBasisState<Complex64>>],
    params: &NumericParams,
) -> Result<CoefficientGrid, HilbertError> {
    let sizes: Vec<usize> = bases.iter().map(|b| b.first().map_or(0, |u| u.n_points)).collect();
    if sizes != s.parties {
        return Err(HilbertError::BadParties(sizes));
    }
    let values = product_states(bases)
        .iter()
        .map(|p| inner_product(p, s, params))
        .collect();
    Ok(CoefficientGrid {
        dims: bases.iter().map(Vec::len).collect(),
        values,
    })
}

/// Expansion on the orthonormal computational basis of every party.
pub fn expand_in_computational_basis(s: &CapBasisState, params: &NumericParams) -> Result<CoefficientGrid, HilbertError> {
    let bases = s
        .parties
        .iter()
        .map(|&n| party_basis(n, params))
        .collect::<Result<Vec<_>, _>>()?;
    expand_in_bases(&s.eval(params), &bases, params)
}

/// Exact qubit expansion. The coefficient of a label string with `r` ones is
/// the returned value divided by `(d^2 - 1)^(r/2)`.
pub fn expand_qubits_exact(s: &CapBasisState) -> Result<BTreeMap<Vec<usize>, RationalFunc>, HilbertError> {
    if s.parties.iter().any(|&p| p != 4) {
        return Err(HilbertError::BadParties(s.parties.clone()));
    }
    let ms = enumerate_matchings(2);
    let inv_d = RationalFunc::d().inv()?;
    let zero = CapBasisState::basis(ms[0].clone()).scale(&inv_d);
    let one_unnorm = CapBasisState::basis(ms[1].clone()).add(&zero.scale(&-RationalFunc::one()))?;
    let mut out = BTreeMap::new();
    let k = s.parties.len();
    for bits in 0..1usize << k {
        let labels: Vec<usize> = (0..k).map(|p| (bits >> (k - 1 - p)) & 1).collect();
        let mut bra = CapBasisState::basis(PlanarMatching::empty());
        for &l in &labels {
            bra = bra.tensor(if l == 0 { &zero } else { &one_unnorm });
        }
        out.insert(labels, overlap_exact(&bra, s)?);
    }
    Ok(out)
}

/// Scale exact qubit coefficients to numbers at given parameters.
pub fn qubit_exact_values(exact: &BTreeMap<Vec<usize>, RationalFunc>, params: &NumericParams) -> BTreeMap<Vec<usize>, Complex64> {
    let norm = (params.d * params.d - 1.0).sqrt();
    exact
        .iter()
        .map(|(l, v)| {
            let ones = l.iter().filter(|&&b| b == 1).count() as i32;
            (l.clone(), v.eval_at(params) / norm.powi(ones))
        })
        .collect()
}

/// Vector of a cap state in the braid representation space.
pub fn flat_state(s: &CapBasisState) -> Result<FlatState, HilbertError> {
    let mut coords = vec![LaurentPoly::zero(); 1 << s.n_points];
    for (m, c) in &s.terms {
        let poly = c
            .to_poly()
            .ok_or_else(|| HilbertError::Degenerate("flat states need polynomial coefficients".into()))?;
        for (i, x) in matching_state(m)?.coords().iter().enumerate() {
            if !x.is_zero() {
                coords[i] += &(x * &poly);
            }
        }
    }
    Ok(FlatState::new(s.n_points, coords)?)
}

/// Expansion of a flat vector, each basis product taken through its own flat vector.
pub fn expand_flat(
    v: &FlatState,
    parties: &[usize],
    params: &NumericParams,
) -> Result<CoefficientGrid, HilbertError> {
    if parties.iter().sum::<usize>() != v.strands() {
        return Err(HilbertError::BadParties(parties.to_vec()));
    }
    let bases = parties
        .iter()
        .map(|&n| party_basis(n, params))
        .collect::<Result<Vec<_>, _>>()?;
    let ket = v.eval(params.a);
    let mut flat_cache: BTreeMap<PlanarMatching, Complex64> = BTreeMap::new();
    let mut values = Vec::new();
    for p in product_states(&bases) {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in p.terms() {
            let dot = match flat_cache.get(m) {
                Some(x) => *x,
                None => {
                    let f = matching_state(m)?.eval(params.a);
                    let x = f.iter().zip(&ket).map(|(a, b)| a * b).sum();
                    flat_cache.insert(m.clone(), x);
                    x
                }
            };
            acc += c.conj() * dot;
        }
        values.push(acc);
    }
    Ok(CoefficientGrid {
        dims: bases.iter().map(Vec::len).collect(),
        values,
    })
}

/// Glue the reflected `bra` onto points `offset..offset + bra.n_points()` of `s`.
///
/// The glued range must consist of whole parties; the result lives on the
/// remaining points with the remaining parties.
pub fn partial_overlap<C: Coeff>(
    bra: &CapBasisState<C>,
    s: &CapBasisState<C>,
    offset: usize,
    d: &C,
) -> Result<CapBasisState<C>, HilbertError> {
    let k = bra.n_points;
    let n = s.n_points;
    if offset + k > n {
        return Err(HilbertError::PointMismatch(offset + k, n));
    }
    let mut parties = Vec::new();
    let mut covered = 0;
    for (o, &size) in s.party_offsets().iter().zip(&s.parties) {
        if *o >= offset && o + size <= offset + k {
            covered += size;
        } else if o + size <= offset || *o >= offset + k {
            parties.push(size);
        } else {
            return Err(HilbertError::BadParties(s.parties.clone()));
        }
    }
    if covered != k {
        return Err(HilbertError::BadParties(s.parties.clone()));
    }
    let inside = |p: usize| p >= offset && p < offset + k;
    let squeeze = |p: usize| if p < offset { p } else { p - k };
    let mut out = CapBasisState::zero(n - k);
    if !parties.is_empty() {
        out.parties = parties;
    }
    let mut dpow = vec![C::one()];
    for (mb, cb) in &bra.terms {
        let bra_c = cb.conj_c();
        for (ms, cs) in &s.terms {
            let mut seen = vec![false; k];
            let mut partner = vec![0; n - k];
            for p in (0..n).filter(|&p| !inside(p)) {
                let mut cur = ms.partner(p);
                while inside(cur) {
                    seen[cur - offset] = true;
                    let next = offset + mb.partner(cur - offset);
                    seen[next - offset] = true;
                    cur = ms.partner(next);
                }
                partner[squeeze(p)] = squeeze(cur);
            }
            let mut loops = 0;
            for start in 0..k {
                if seen[start] {
                    continue;
                }
                loops += 1;
                let mut cur = start;
                loop {
                    seen[cur] = true;
                    let q = ms.partner(offset + cur) - offset;
                    seen[q] = true;
                    cur = mb.partner(q);
                    if cur == start {
                        break;
                    }
                }
            }
            while dpow.len() <= loops {
                let next = dpow.last().unwrap().mul_c(d);
                dpow.push(next);
            }
            let c = bra_c.mul_c(cs).mul_c(&dpow[loops]);
            out.add_term(PlanarMatching::new(partner)?, &c);
        }
    }
    Ok(out)
}

/// Two parties of `n` points joined by `n` parallel lines (a rainbow on the joined line).
pub fn ladder_state(n: usize) -> CapBasisState {
    CapBasisState::basis(PlanarMatching::rainbow(2 * n))
        .with_parties(&[n, n])
        .expect("sizes sum to the point count")
}

/// Adjacent caps inside each qubit party: no line crosses between parties.
pub fn separable_caps_state(parties: usize) -> CapBasisState {
    CapBasisState::basis(PlanarMatching::adjacent_caps(4 * parties))
        .with_parties(&vec![4; parties])
        .expect("sizes sum to the point count")
}

/// Braid building both clasps of the chained state, in a frame rotated by two points.
fn chained_braid() -> BraidWord {
    BraidWord::new(8, vec![-2, -2, -6, -6]).expect("valid letters")
}

const CHAIN_ROTATION: usize = 6;

/// Two qubits whose cap pairs are hooked through each other in two clasps,
/// built through the Temperley-Lieb image of the clasp braids.
pub fn chained_state() -> CapBasisState {
    let caps = CapBasisState::basis(PlanarMatching::adjacent_caps(8));
    caps.apply_braid(&chained_braid(), 0)
        .and_then(|s| s.rotate(CHAIN_ROTATION))
        .and_then(|s| s.with_parties(&[4, 4]))
        .expect("fixed construction")
}

/// The same state as a tangle with eight free ends, for skein evaluation.
pub fn chained_tangle() -> TangleDiagram {
    let caps = PlanarMatching::adjacent_caps(8).pairs();
    TangleDiagram::from_braid(
        &chained_braid(),
        &BraidClosure::Caps {
            bottom: Some(caps),
            top: None,
        },
    )
    .expect("fixed construction")
}

/// Cap state from the skein expansion of a tangle whose free ends sit on the line.
///
/// `point_of_end[k]` is the line position of free end `k`.
pub fn state_from_tangle(t: &TangleDiagram, point_of_end: &[usize]) -> Result<CapBasisState, HilbertError> {
    let n = t.free_ends().len();
    if point_of_end.len() != n {
        return Err(HilbertError::PointMismatch(point_of_end.len(), n));
    }
    let mut s = CapBasisState::zero(n);
    for (pairing, c) in tangle_expansion(t) {
        let mut partner = vec![0; n];
        for k in 0..n {
            partner[point_of_end[k]] = point_of_end[pairing.partner(k)];
        }
        s.add_term(PlanarMatching::new(partner)?, &RationalFunc::from_poly(c));
    }
    Ok(s)
}

/// The chained state computed from its tangle by skein resolution.
pub fn chained_state_from_tangle() -> Result<CapBasisState, HilbertError> {
    let t = chained_tangle();
    // Free ends run along the top from right to left.
    let ends: Vec<usize> = (0..8).map(|k| 7 - k).collect();
    state_from_tangle(&t, &ends)?.rotate(CHAIN_ROTATION)?.with_parties(&[4, 4])
}

/// Whether a pairing of a state's points keeps every line inside one party.
pub fn is_party_local(p: &Pairing, parties: &[usize]) -> bool {
    let mut owner = Vec::new();
    for (k, &s) in parties.iter().enumerate() {
        owner.extend(std::iter::repeat(k).take(s));
    }
    (0..p.n_points()).all(|i| owner[i] == owner[p.partner(i)])
}
