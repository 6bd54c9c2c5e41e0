//! Teleportation and dense coding on topological qubits.
//!
//! Qubits are four-point parties. Gates act on the orthonormal computational
//! basis; braids act through their Temperley-Lieb image.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::diagram::{enumerate_matchings, BraidWord, DiagramError, PlanarMatching};
use crate::hilbert::{
    expand_in_computational_basis, inner_product, ladder_state, party_basis, CapBasisState, HilbertError,
};
use crate::poly::NumericParams;

/// Projections below this norm count as impossible outcomes.
pub const ZERO_PROBABILITY: f64 = 1e-12;
/// A measurement outcome is deterministic when its probability reaches this.
pub const DETERMINISTIC: f64 = 1.0 - 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("outcome has zero probability ({0:e})")]
    ZeroProbability(f64),
    #[error("input state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("braid on {0} strands does not act on one qubit")]
    NotSingleQubit(usize),
    #[error("no single outcome is certain; probabilities {0:?}")]
    Ambiguous(Vec<f64>),
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Single-qubit gates in the computational basis.
#[derive(Clone, Debug)]
pub struct GateSet {
    pub identity: DMatrix<Complex64>,
    pub x: DMatrix<Complex64>,
    pub z: DMatrix<Complex64>,
    pub h: DMatrix<Complex64>,
}

impl Default for GateSet {
    fn default() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            identity: DMatrix::identity(2, 2),
            x: DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]),
            z: DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]),
            h: DMatrix::from_row_slice(2, 2, &[c(s), c(s), c(s), c(-s)]),
        }
    }
}

impl GateSet {
    /// `Z^a X^b`: `X^b` acts first.
    pub fn correction(&self, a: u8, b: u8) -> DMatrix<Complex64> {
        let mut m = self.identity.clone();
        if b == 1 {
            m = &self.x * m;
        }
        if a == 1 {
            m = &self.z * m;
        }
        m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BellLabel {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [Self::PhiPlus, Self::PhiMinus, Self::PsiPlus, Self::PsiMinus];

    /// Exponents `(a, b)` of the correction `Z^a X^b`.
    pub fn exponents(self) -> (u8, u8) {
        match self {
            Self::PhiPlus => (0, 0),
            Self::PhiMinus => (1, 0),
            Self::PsiPlus => (0, 1),
            Self::PsiMinus => (1, 1),
        }
    }

    pub fn from_exponents(a: u8, b: u8) -> Self {
        match (a & 1, b & 1) {
            (0, 0) => Self::PhiPlus,
            (1, 0) => Self::PhiMinus,
            (0, 1) => Self::PsiPlus,
            _ => Self::PsiMinus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::PhiPlus => "Phi+",
            Self::PhiMinus => "Phi-",
            Self::PsiPlus => "Psi+",
            Self::PsiMinus => "Psi-",
        }
    }
}

/// Two-qubit coefficient matrix `M[i][j] = ⟨i j|state⟩`.
pub type TwoQubit = DMatrix<Complex64>;

pub fn bell_state(label: BellLabel) -> TwoQubit {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (m00, m11, m01, m10) = match label {
        BellLabel::PhiPlus => (s, s, 0.0, 0.0),
        BellLabel::PhiMinus => (s, -s, 0.0, 0.0),
        BellLabel::PsiPlus => (0.0, 0.0, s, s),
        BellLabel::PsiMinus => (0.0, 0.0, s, -s),
    };
    DMatrix::from_row_slice(2, 2, &[c(m00), c(m01), c(m10), c(m11)])
}

/// The four Bell states, in `ALL` order.
pub fn bell_basis(params: &NumericParams) -> Result<Vec<(BellLabel, TwoQubit)>, ProtocolError> {
    // Degenerate parameters have no qubit basis at all.
    party_basis(4, params)?;
    Ok(BellLabel::ALL.iter().map(|&l| (l, bell_state(l))).collect())
}

/// Normalized two-qubit coefficients of a diagram state.
pub fn two_qubit_coefficients(s: &CapBasisState, params: &NumericParams) -> Result<TwoQubit, ProtocolError> {
    let g = expand_in_computational_basis(s, params)?;
    let m = g.as_matrix(1);
    let n = m.norm();
    if n < ZERO_PROBABILITY {
        return Err(ProtocolError::ZeroProbability(n));
    }
    Ok(m / c(n))
}

/// The ladder (rainbow) diagram normalized: the topological `Φ+`.
pub fn ladder_bell_pair(params: &NumericParams) -> Result<TwoQubit, ProtocolError> {
    two_qubit_coefficients(&ladder_state(4), params)
}

/// Matrix of a braid on one four-point party in the orthonormal basis.
pub fn qubit_braid_unitary(w: &BraidWord, params: &NumericParams) -> Result<DMatrix<Complex64>, ProtocolError> {
    if w.strands() != 4 {
        return Err(ProtocolError::NotSingleQubit(w.strands()));
    }
    party_braid_operator(w, params)
}

/// Braid action on the orthonormal basis of a single party of `w.strands()` points.
pub fn party_braid_operator(w: &BraidWord, params: &NumericParams) -> Result<DMatrix<Complex64>, ProtocolError> {
    let n = w.strands();
    let basis = party_basis(n, params)?;
    // Image of every matching, then of each basis vector by linearity.
    let images: Vec<CapBasisState<Complex64>> = enumerate_matchings(n / 2)
        .into_iter()
        .map(|m| CapBasisState::basis(m).apply_braid(w, 0).map(|s| s.eval(params)))
        .collect::<Result<_, _>>()?;
    let index = |m: &PlanarMatching| enumerate_matchings(n / 2).iter().position(|x| x == m).expect("matching");
    let dim = basis.len();
    let mut out = DMatrix::zeros(dim, dim);
    for (j, v) in basis.iter().enumerate() {
        let mut image = CapBasisState::<Complex64>::zero(n);
        for (m, coeff) in v.terms() {
            image = image.add(&images[index(m)].scale(coeff))?;
        }
        for (i, u) in basis.iter().enumerate() {
            out[(i, j)] = inner_product(u, &image, params);
        }
    }
    Ok(out)
}

/// How Alice measured her two qubits.
#[derive(Clone, Debug)]
pub enum Measurement {
    Bell(BellLabel),
    /// The Bell pair with the braid applied on Alice's first qubit.
    Braid(BraidWord),
}

#[derive(Clone, Debug)]
pub struct TeleportRecord {
    pub measured: TwoQubit,
    /// Outcome probability for a normalized input and resource.
    pub probability: f64,
    /// Bob's normalized state before correction.
    pub bob_state: DVector<Complex64>,
    pub correction: DMatrix<Complex64>,
    pub corrected: DVector<Complex64>,
    pub fidelity: f64,
}

impl TeleportRecord {
    pub fn to_json(&self) -> Value {
        let vec = |v: &DVector<Complex64>| v.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>();
        let mat = |m: &DMatrix<Complex64>| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        };
        json!({
            "measured": mat(&self.measured),
            "probability": self.probability,
            "bob_state": vec(&self.bob_state),
            "correction": mat(&self.correction),
            "corrected": vec(&self.corrected),
            "fidelity": self.fidelity,
        })
    }
}

fn fidelity(psi: &DVector<Complex64>, phi: &DVector<Complex64>) -> f64 {
    psi.dotc(phi).norm_sqr() / (psi.norm_squared() * phi.norm_squared())
}

/// Teleport `psi` through a shared two-qubit `resource`.
///
/// Alice projects her qubit and her half of the resource on the measured
/// state; Bob applies the correction for that outcome.
pub fn teleport_with(
    psi: &DVector<Complex64>,
    resource: &TwoQubit,
    measurement: &Measurement,
    params: &NumericParams,
) -> Result<TeleportRecord, ProtocolError> {
    let n2 = psi.norm_squared();
    if (n2 - 1.0).abs() > 1e-9 {
        return Err(ProtocolError::NotNormalized(n2));
    }
    let gates = GateSet::default();
    let (measured, correction) = match measurement {
        Measurement::Bell(l) => {
            let (a, b) = l.exponents();
            (bell_state(*l), gates.correction(a, b))
        }
        Measurement::Braid(w) => {
            let u = qubit_braid_unitary(w, params)?;
            (&u * bell_state(BellLabel::PhiPlus), u)
        }
    };
    // φ_k = Σ_ij conj(M_ij) ψ_i R_jk
    let bob = resource.transpose() * measured.conjugate().transpose() * psi;
    let norm = bob.norm();
    if norm < ZERO_PROBABILITY {
        return Err(ProtocolError::ZeroProbability(norm));
    }
    let bob_state = &bob / c(norm);
    let corrected = &correction * &bob_state;
    Ok(TeleportRecord {
        measured,
        probability: norm * norm,
        fidelity: fidelity(psi, &corrected),
        bob_state,
        correction,
        corrected,
    })
}

/// Teleport through the topological Bell pair.
pub fn teleport(psi: &DVector<Complex64>, measurement: &Measurement, params: &NumericParams) -> Result<TeleportRecord, ProtocolError> {
    teleport_with(psi, &ladder_bell_pair(params)?, measurement, params)
}

/// Haar-style random qubit state.
pub fn random_qubit<R: Rng>(rng: &mut R) -> DVector<Complex64> {
    let v = DVector::from_fn(2, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let n = v.norm();
    v / c(n)
}

/// Random single-qubit braid word with `len` letters.
pub fn random_qubit_braid<R: Rng>(rng: &mut R, len: usize) -> BraidWord {
    let letters = (0..len)
        .map(|_| {
            let g = rng.gen_range(1..=3);
            if rng.gen_bool(0.5) {
                g
            } else {
                -g
            }
        })
        .collect();
    BraidWord::new(4, letters).expect("generators in range")
}

#[derive(Clone, Debug)]
pub struct DenseCodeOutcome {
    pub decoded: (u8, u8),
    pub outcome: BellLabel,
    /// Outcome probabilities in `BellLabel::ALL` order.
    pub probabilities: Vec<f64>,
}

/// Bob applies `Z^a X^b` to his half of the topological Bell pair; Alice
/// measures both qubits in the Bell basis.
pub fn densecode_simple(a: u8, b: u8, params: &NumericParams) -> Result<DenseCodeOutcome, ProtocolError> {
    let pair = ladder_bell_pair(params)?;
    let op = GateSet::default().correction(a, b);
    let encoded = &pair * op.transpose();
    let probabilities: Vec<f64> = bell_basis(params)?
        .iter()
        .map(|(_, m)| m.conjugate().component_mul(&encoded).sum().norm_sqr())
        .collect();
    let best = certain_outcome(&probabilities)?;
    let outcome = BellLabel::ALL[best];
    Ok(DenseCodeOutcome {
        decoded: outcome.exponents(),
        outcome,
        probabilities,
    })
}

fn certain_outcome(p: &[f64]) -> Result<usize, ProtocolError> {
    let hits: Vec<usize> = (0..p.len()).filter(|&i| p[i] >= DETERMINISTIC).collect();
    match hits.as_slice() {
        [i] => Ok(*i),
        _ => Err(ProtocolError::Ambiguous(p.to_vec())),
    }
}

/// Encoding braid for a bit pair on the joined eight-point boundary.
///
/// `a` twists the last two points of the top qubit negatively; `b` twists
/// its first two points positively.
pub fn densecode_encoding(a: u8, b: u8) -> BraidWord {
    let mut letters = Vec::new();
    if a == 1 {
        letters.push(-7);
    }
    if b == 1 {
        letters.push(5);
    }
    BraidWord::new(8, letters).expect("generators in range")
}

/// The permutation braid standing in for the Hadamard gate on the bottom qubit.
pub fn densecode_h_analog() -> BraidWord {
    BraidWord::new(8, vec![2, 1, 3, 2]).expect("generators in range")
}

/// The nonlocal permutation braid standing in for CNOT.
pub fn densecode_cnot_analog() -> BraidWord {
    BraidWord::new(8, vec![4, 5, 3, 7, -1, 6, 4, -2]).expect("generators in range")
}

#[derive(Clone, Debug)]
pub struct BraidedOutcome {
    /// `(bottom, top)` labels of the hatted cap basis.
    pub labels: (usize, usize),
    /// Normalized squared overlaps with `ê_bottom ⊗ ê_top`, row-major in `(bottom, top)`.
    pub overlaps: Vec<f64>,
}

/// Run the braided protocol and read the result off the product cap diagrams.
///
/// The outcome is the product diagram the final state is parallel to;
/// anything else is reported as ambiguous.
pub fn densecode_braided(a: u8, b: u8, params: &NumericParams) -> Result<BraidedOutcome, ProtocolError> {
    let state = densecode_braided_state(a, b)?.eval(params);
    let caps = enumerate_matchings(2);
    let norm = inner_product(&state, &state, params).re;
    let mut overlaps = Vec::new();
    for bottom in &caps {
        for top in &caps {
            let d = CapBasisState::basis(PlanarMatching::concat(&[bottom, top]));
            let d_norm = inner_product(&d, &d, params).re;
            overlaps.push(inner_product(&d, &state, params).norm_sqr() / (d_norm * norm));
        }
    }
    let best = certain_outcome(&overlaps)?;
    Ok(BraidedOutcome {
        labels: (best / 2, best % 2),
        overlaps,
    })
}

/// Exact eight-point state before measurement.
pub fn densecode_braided_state(a: u8, b: u8) -> Result<CapBasisState, ProtocolError> {
    let mut s = ladder_state(4);
    for w in [densecode_encoding(a, b), densecode_h_analog(), densecode_cnot_analog()] {
        s = s.apply_braid(&w, 0)?;
    }
    Ok(s)
}
