//! Exact braid representation on `2^n`-dimensional tensor space.
//!
//! Basis index bits run with strand 1 as the most significant bit, so the
//! leftmost tensor factor is the first strand.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::Value;
use thiserror::Error;

use crate::diagram::{BraidWord, PlanarMatching};
use crate::poly::{LaurentPoly, NumericParams};

/// Largest strand count represented densely unless the caller asks otherwise.
pub const DEFAULT_STRAND_BUDGET: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RMatrixError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{strands} strands exceed the dense budget of {budget}")]
    BudgetExceeded { strands: usize, budget: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("cap states on {0} points are not integral; need a multiple of 4")]
    NonIntegralPhase(usize),
}

/// Dense row-major matrix of Laurent polynomials.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<LaurentPoly>,
}

impl LaurentMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![LaurentPoly::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { LaurentPoly::one() } else { LaurentPoly::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> LaurentPoly) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        Self { rows, cols, entries }
    }

    pub fn from_rows(rows: Vec<Vec<LaurentPoly>>) -> Result<Self, RMatrixError> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if n == 0 || m == 0 || rows.iter().any(|r| r.len() != m) {
            return Err(RMatrixError::DimensionMismatch("ragged or empty rows".into()));
        }
        Ok(Self {
            rows: n,
            cols: m,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &LaurentPoly {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: LaurentPoly) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    /// Entrywise `A -> A^-1`.
    pub fn mirror(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(LaurentPoly::mirror).collect(),
        }
    }

    /// Transpose combined with `A -> A^-1`.
    pub fn dagger(&self) -> Self {
        self.transpose().mirror()
    }

    pub fn scale(&self, k: &LaurentPoly) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * k).collect(),
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |r, c| {
            let a = self.get(r / other.rows, c / other.cols);
            if a.is_zero() {
                return LaurentPoly::zero();
            }
            a * other.get(r % other.rows, c % other.cols)
        })
    }

    pub fn trace(&self) -> LaurentPoly {
        let mut t = LaurentPoly::zero();
        for i in 0..self.rows.min(self.cols) {
            t += self.get(i, i);
        }
        t
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, RMatrixError> {
        if self.cols != other.rows {
            return Err(RMatrixError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        out.entries[r * other.cols + c] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `Σ^⊗n M Σ^⊗n` for a square `2^n` matrix: flip every bit of both indices.
    pub fn sigma_conjugate(&self) -> Self {
        let mr = self.rows - 1;
        let mc = self.cols - 1;
        Self::from_fn(self.rows, self.cols, |r, c| self.get(r ^ mr, c ^ mc).clone())
    }

    pub fn eval(&self, a: Complex64) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c).eval(a))
    }

    pub fn eval_at(&self, p: &NumericParams) -> DMatrix<Complex64> {
        self.eval(p.a)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            (0..self.rows)
                .map(|r| Value::Array((0..self.cols).map(|c| self.get(r, c).to_json()).collect()))
                .collect(),
        )
    }

    /// Right-multiply by the 4x4 block `local` acting on strands `i, i+1` (0-based) of `n`.
    fn mul_local_right(&self, n: usize, i: usize, local: &LaurentMatrix) -> Self {
        let hi = n - 1 - i;
        let lo = hi - 1;
        let mask = (1 << hi) | (1 << lo);
        let pair = |c: usize| (((c >> hi) & 1) << 1) | ((c >> lo) & 1);
        let with = |c: usize, xy: usize| (c & !mask) | ((xy >> 1) << hi) | ((xy & 1) << lo);
        let mut out = Self::zeros(self.rows, self.cols);
        for c in 0..self.cols {
            let xy = pair(c);
            for src in 0..4 {
                let w = local.get(src, xy);
                if w.is_zero() {
                    continue;
                }
                let cs = with(c, src);
                for r in 0..self.rows {
                    let m = self.get(r, cs);
                    if !m.is_zero() {
                        out.entries[r * self.cols + c] += &(m * w);
                    }
                }
            }
        }
        out
    }
}

impl Mul for &LaurentMatrix {
    type Output = LaurentMatrix;
    fn mul(self, rhs: &LaurentMatrix) -> LaurentMatrix {
        self.checked_mul(rhs).expect("matrix dimensions agree")
    }
}

impl Add for &LaurentMatrix {
    type Output = LaurentMatrix;
    fn add(self, rhs: &LaurentMatrix) -> LaurentMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        LaurentMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &LaurentMatrix {
    type Output = LaurentMatrix;
    fn sub(self, rhs: &LaurentMatrix) -> LaurentMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        LaurentMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for LaurentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "LaurentMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

fn mono(e: i64) -> LaurentPoly {
    LaurentPoly::monomial(e, 1)
}

/// The cap-cup operator on two strands.
pub fn u_matrix() -> LaurentMatrix {
    let mut u = LaurentMatrix::zeros(4, 4);
    u.set(1, 1, -mono(2));
    u.set(1, 2, LaurentPoly::one());
    u.set(2, 1, LaurentPoly::one());
    u.set(2, 2, -mono(-2));
    u
}

/// `R = A·I + A^-1·U` for `sign = +1`, its inverse `A^-1·I + A·U` for `-1`.
pub fn r_matrix(sign: i32) -> LaurentMatrix {
    let e = if sign >= 0 { 1 } else { -1 };
    &LaurentMatrix::identity(4).scale(&mono(e)) + &u_matrix().scale(&mono(-e))
}

/// The per-strand Markov weight `diag(-A^2, -A^-2)`.
pub fn markov_weight() -> [LaurentPoly; 2] {
    [-mono(2), -mono(-2)]
}

/// `I ⊗ local ⊗ I` with `local` (4x4) on strands `i, i+1` (0-based) of `n`.
pub fn embed(local: &LaurentMatrix, i: usize, n: usize) -> Result<LaurentMatrix, RMatrixError> {
    if local.rows != 4 || local.cols != 4 || i + 2 > n {
        return Err(RMatrixError::DimensionMismatch(format!(
            "4x4 block at strand {i} of {n}"
        )));
    }
    Ok(LaurentMatrix::identity(1 << i)
        .kron(local)
        .kron(&LaurentMatrix::identity(1 << (n - i - 2))))
}

/// Ordered product `b_{w1} b_{w2} ...` of embedded `R^{±1}` factors.
pub fn braid_representation(w: &BraidWord, budget: usize) -> Result<LaurentMatrix, RMatrixError> {
    let n = w.strands();
    if n > budget {
        return Err(RMatrixError::BudgetExceeded { strands: n, budget });
    }
    let (rp, rm) = (r_matrix(1), r_matrix(-1));
    let mut m = LaurentMatrix::identity(1 << n);
    for &g in w.letters() {
        let i = g.unsigned_abs() as usize - 1;
        m = m.mul_local_right(n, i, if g > 0 { &rp } else { &rm });
    }
    Ok(m)
}

/// `Tr ρ^⊗n · m`.
pub fn markov_trace(m: &LaurentMatrix, strands: usize) -> Result<LaurentPoly, RMatrixError> {
    let dim = 1usize << strands;
    if m.rows != dim || m.cols != dim {
        return Err(RMatrixError::DimensionMismatch(format!(
            "{}x{} matrix on {strands} strands",
            m.rows, m.cols
        )));
    }
    let sign = if strands % 2 == 0 { 1 } else { -1 };
    let mut t = LaurentPoly::zero();
    for i in 0..dim {
        let x = m.get(i, i);
        if x.is_zero() {
            continue;
        }
        let ones = i.count_ones() as i64;
        let zeros = strands as i64 - ones;
        // ρ^⊗n is diagonal with entry (-1)^n A^(2 zeros - 2 ones).
        let w = LaurentPoly::monomial(2 * (zeros - ones), sign);
        t += &(x * &w);
    }
    Ok(t)
}

/// A length-`2^n` coordinate vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatState {
    strands: usize,
    coords: Vec<LaurentPoly>,
}

impl FlatState {
    pub fn new(strands: usize, coords: Vec<LaurentPoly>) -> Result<Self, RMatrixError> {
        if coords.len() != 1 << strands {
            return Err(RMatrixError::DimensionMismatch(format!(
                "{} coordinates for {strands} strands",
                coords.len()
            )));
        }
        Ok(Self { strands, coords })
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn coords(&self) -> &[LaurentPoly] {
        &self.coords
    }

    pub fn apply(&self, op: &LaurentMatrix) -> Result<Self, RMatrixError> {
        if op.cols != self.coords.len() || op.rows != op.cols {
            return Err(RMatrixError::DimensionMismatch("operator and state".into()));
        }
        let coords = (0..op.rows)
            .map(|r| {
                let mut s = LaurentPoly::zero();
                for (c, x) in self.coords.iter().enumerate() {
                    let m = op.get(r, c);
                    if !m.is_zero() && !x.is_zero() {
                        s += &(m * x);
                    }
                }
                s
            })
            .collect();
        Ok(Self {
            strands: self.strands,
            coords,
        })
    }

    /// Apply the letters of `w` one by one, first letter first.
    pub fn apply_braid(&self, w: &BraidWord) -> Result<Self, RMatrixError> {
        if w.strands() != self.strands {
            return Err(RMatrixError::DimensionMismatch("braid and state strands".into()));
        }
        let mut s = self.clone();
        for &g in w.letters() {
            let local = r_matrix(g.signum());
            s = s.apply(&embed(&local, g.unsigned_abs() as usize - 1, self.strands)?)?;
        }
        Ok(s)
    }

    /// Plain transposed contraction.
    pub fn dot(&self, other: &Self) -> Result<LaurentPoly, RMatrixError> {
        if self.coords.len() != other.coords.len() {
            return Err(RMatrixError::DimensionMismatch("state lengths".into()));
        }
        let mut s = LaurentPoly::zero();
        for (a, b) in self.coords.iter().zip(&other.coords) {
            if !a.is_zero() && !b.is_zero() {
                s += &(a * b);
            }
        }
        Ok(s)
    }

    pub fn eval(&self, a: Complex64) -> Vec<Complex64> {
        self.coords.iter().map(|x| x.eval(a)).collect()
    }
}

/// Row-major flattening of a `2^a x 2^b` matrix into an `(a+b)`-strand state.
pub fn flatten(m: &LaurentMatrix) -> Result<FlatState, RMatrixError> {
    if !m.rows.is_power_of_two() || !m.cols.is_power_of_two() {
        return Err(RMatrixError::DimensionMismatch("flatten needs power-of-two sides".into()));
    }
    let strands = (m.rows * m.cols).trailing_zeros() as usize;
    FlatState::new(strands, m.entries.clone())
}

/// The vector of a cap matching on a line of `n` points.
///
/// Each cap `(p, q)`, `p < q`, carries `iA` on bits `01` and `-iA^-1` on `10`;
/// the `n/2` factors of `i` combine to a real sign when `4 | n`. Overlaps
/// are then plain transposed contractions.
pub fn matching_state(m: &PlanarMatching) -> Result<FlatState, RMatrixError> {
    let n = m.n_points();
    if n % 4 != 0 {
        return Err(RMatrixError::NonIntegralPhase(n));
    }
    let sign = if (n / 4) % 2 == 0 { 1 } else { -1 };
    let pairs = m.pairs();
    let mut coords = vec![LaurentPoly::zero(); 1 << n];
    for choice in 0..1usize << pairs.len() {
        let mut idx = 0usize;
        let mut e = 0i64;
        let mut neg = false;
        for (k, &(p, q)) in pairs.iter().enumerate() {
            if (choice >> k) & 1 == 0 {
                idx |= 1 << (n - 1 - q);
                e += 1;
            } else {
                idx |= 1 << (n - 1 - p);
                e -= 1;
                neg = !neg;
            }
        }
        coords[idx] = LaurentPoly::monomial(e, if neg { -sign } else { sign });
    }
    FlatState::new(n, coords)
}

/// Adjacent-cap state on `n` points, the flattening of `U^⊗(n/4)` pattern.
pub fn cap_state(n: usize) -> Result<FlatState, RMatrixError> {
    matching_state(&PlanarMatching::adjacent_caps(n))
}

/// `transpose(bra) · op · ket`.
pub fn matrix_element(bra: &FlatState, op: &LaurentMatrix, ket: &FlatState) -> Result<LaurentPoly, RMatrixError> {
    bra.dot(&ket.apply(op)?)
}

/// Whether `m^-1 = Σ^⊗n dagger(m) Σ^⊗n`. Singular input is an error.
pub fn check_pseudounitary(m: &LaurentMatrix) -> Result<bool, RMatrixError> {
    if m.rows != m.cols || !m.rows.is_power_of_two() {
        return Err(RMatrixError::DimensionMismatch("need a square 2^n matrix".into()));
    }
    let candidate = m.dagger().sigma_conjugate();
    if &(m * &candidate) == &LaurentMatrix::identity(m.rows) {
        return Ok(true);
    }
    // A generic unit-circle point detects singularity; exact zero determinants stay tiny.
    let probe = Complex64::from_polar(1.0, 0.377);
    let det = m.eval(probe).determinant();
    if det.norm() < 1e-9 {
        return Err(RMatrixError::Singular);
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_i64_terms(terms)
    }

    #[test]
    fn r_inverse_and_classical_limit() {
        assert_eq!(&r_matrix(1) * &r_matrix(-1), LaurentMatrix::identity(4));
        let at_one = r_matrix(1).eval(Complex64::new(1.0, 0.0));
        for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            assert!((at_one[(r, c)] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
        assert!(at_one[(1, 1)].norm() < 1e-12 && at_one[(2, 2)].norm() < 1e-12);
        assert_eq!(*r_matrix(1).get(2, 2), lp(&[(-3, -1), (1, 1)]));
    }

    #[test]
    fn printed_vectors() {
        let psi = cap_state(4).unwrap();
        let mut expect = vec![LaurentPoly::zero(); 16];
        expect[5] = -mono(2);
        expect[6] = LaurentPoly::one();
        expect[9] = LaurentPoly::one();
        expect[10] = -mono(-2);
        assert_eq!(psi.coords(), &expect[..]);
        assert_eq!(flatten(&u_matrix()).unwrap(), psi);
        let phi = psi.apply(&embed(&u_matrix(), 1, 4).unwrap()).unwrap();
        let mut expect = vec![LaurentPoly::zero(); 16];
        expect[3] = -mono(2);
        expect[5] = LaurentPoly::one();
        expect[10] = LaurentPoly::one();
        expect[12] = -mono(-2);
        assert_eq!(phi.coords(), &expect[..]);
        assert_eq!(phi, matching_state(&PlanarMatching::rainbow(4)).unwrap());
    }

    #[test]
    fn identity_trace() {
        let d = LaurentPoly::d();
        let [w0, w1] = markov_weight();
        assert_eq!(&w0 + &w1, d);
        assert_eq!(markov_trace(&LaurentMatrix::identity(8), 3).unwrap(), d.pow(3));
        assert_eq!(markov_trace(&r_matrix(1), 2).unwrap(), &LaurentPoly::framing(1) * &d);
    }

    #[test]
    fn u_is_singular() {
        assert_eq!(check_pseudounitary(&u_matrix()), Err(RMatrixError::Singular));
        assert_eq!(check_pseudounitary(&r_matrix(1)), Ok(true));
    }

    #[test]
    fn budget() {
        let w = BraidWord::identity(12);
        assert!(matches!(
            braid_representation(&w, DEFAULT_STRAND_BUDGET),
            Err(RMatrixError::BudgetExceeded { .. })
        ));
    }

    fn b(sign: i32, strand: usize, n: usize) -> LaurentMatrix {
        embed(&r_matrix(sign), strand - 1, n).unwrap()
    }

    fn trefoil_tail() -> LaurentPoly {
        lp(&[(4, 1), (12, 1), (16, -1)])
    }

    #[test]
    fn trefoil_traces() {
        let d = LaurentPoly::d();
        let w: BraidWord = "n=2: -1 -1 -1".parse().unwrap();
        let m = braid_representation(&w, DEFAULT_STRAND_BUDGET).unwrap();
        assert_eq!(markov_trace(&m, 2).unwrap(), &(&LaurentPoly::framing(-3) * &d) * &trefoil_tail());
        let w: BraidWord = "n=3: -1 -2 -1 -2".parse().unwrap();
        let m = braid_representation(&w, DEFAULT_STRAND_BUDGET).unwrap();
        assert_eq!(markov_trace(&m, 3).unwrap(), &(&LaurentPoly::framing(-4) * &d) * &trefoil_tail());
    }

    #[test]
    fn braid_relations() {
        let lhs = &(&b(1, 1, 3) * &b(1, 2, 3)) * &b(1, 1, 3);
        let rhs = &(&b(1, 2, 3) * &b(1, 1, 3)) * &b(1, 2, 3);
        assert_eq!(lhs, rhs);
        let u1 = embed(&u_matrix(), 0, 3).unwrap();
        let u2 = embed(&u_matrix(), 1, 3).unwrap();
        assert_eq!(&(&u1 * &u2) * &u1, u1);
        let w: BraidWord = "n=3: 1 2 1".parse().unwrap();
        assert_eq!(braid_representation(&w, 3).unwrap(), lhs);
        assert_eq!(check_pseudounitary(&lhs), Ok(true));
    }

    #[test]
    fn whitehead_matrix_element() {
        let psi = cap_state(4).unwrap();
        let u2 = embed(&u_matrix(), 1, 4).unwrap();
        let phi = psi.apply(&u2).unwrap();
        let mut op = u2.clone();
        for (sign, strand) in [(-1, 1), (-1, 3), (1, 2), (-1, 3), (-1, 1)] {
            op = &op * &b(sign, strand, 4);
        }
        let expect = &(&LaurentPoly::framing(-1) * &LaurentPoly::d())
            * &lp(&[(14, 1), (10, -2), (6, 1), (2, -2), (-2, 1), (-6, -1)]);
        assert_eq!(matrix_element(&psi, &op, &phi).unwrap(), expect);
        let d = LaurentPoly::d();
        assert_eq!(psi.dot(&psi).unwrap(), d.pow(2));
        assert_eq!(psi.dot(&phi).unwrap(), d);
    }
}
