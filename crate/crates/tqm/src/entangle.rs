//! Entanglement of cap-diagram states: reduced densities, entropies,
//! Schmidt ranks, and the line-counting picture of connectomes.

use std::collections::BTreeSet;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{catalan, DiagramError, PlanarMatching};
use crate::hilbert::{
    expand_in_computational_basis, inner_product, partial_overlap, party_basis, CapBasisState, CoefficientGrid, HilbertError,
};
use crate::poly::NumericParams;

/// Eigenvalues below this are left out of the entropy sum.
pub const EIGEN_FLOOR: f64 = 1e-12;
/// Negative eigenvalues down to this are treated as rounding noise.
pub const NEGATIVE_CLIP: f64 = -1e-9;
/// Singular-value threshold for Schmidt rank.
pub const RANK_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntangleError {
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("density operator is not trace-normalized (trace {0})")]
    NotNormalized(f64),
    #[error("eigenvalue {0} is too negative for a density operator")]
    NegativeEigenvalue(f64),
    #[error("party {0} not found")]
    PartyNotFound(usize),
    #[error("expected a bipartite state, got {0} parties")]
    NotBipartite(usize),
    #[error("odd number of lines ({0}) leaving a party")]
    OddLines(usize),
    #[error("state has zero norm on the product space")]
    ZeroState,
    #[error("malformed connectome: {0}")]
    BadConnectome(String),
}

/// A numeric density matrix on some parties' joint computational basis.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    pub scope: Vec<usize>,
    pub matrix: DMatrix<Complex64>,
    pub normalized: bool,
}

impl DensityOperator {
    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.matrix - self.matrix.adjoint()).iter().all(|z| z.norm() <= tol)
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    pub fn normalize(mut self) -> Result<Self, EntangleError> {
        let t = self.trace().re;
        if t.abs() < 1e-300 {
            return Err(EntangleError::ZeroState);
        }
        self.matrix /= Complex64::new(t, 0.0);
        self.normalized = true;
        Ok(self)
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.eigenvalues().iter().filter(|&&l| l > tol).count()
    }
}

/// `ρ = c c†` with the kept parties as rows, normalized.
pub fn density_from_grid(grid: &CoefficientGrid, keep: &[usize]) -> Result<DensityOperator, EntangleError> {
    let k = grid.dims.len();
    if let Some(&p) = keep.iter().find(|&&p| p >= k) {
        return Err(EntangleError::PartyNotFound(p));
    }
    let rest: Vec<usize> = (0..k).filter(|p| !keep.contains(p)).collect();
    let rows: usize = keep.iter().map(|&p| grid.dims[p]).product();
    let cols: usize = rest.iter().map(|&p| grid.dims[p]).product();
    let mut c = DMatrix::<Complex64>::zeros(rows, cols);
    for (labels, v) in grid.labels().iter().zip(&grid.values) {
        let r = keep.iter().fold(0, |acc, &p| acc * grid.dims[p] + labels[p]);
        let col = rest.iter().fold(0, |acc, &p| acc * grid.dims[p] + labels[p]);
        c[(r, col)] = *v;
    }
    DensityOperator {
        scope: keep.to_vec(),
        matrix: &c * c.adjoint(),
        normalized: false,
    }
    .normalize()
}

/// Reduced density of the kept parties through the coefficient grid.
pub fn reduced_density(state: &CapBasisState, keep: &[usize], params: &NumericParams) -> Result<DensityOperator, EntangleError> {
    let grid = expand_in_computational_basis(state, params)?;
    density_from_grid(&grid, keep)
}

/// Reduced density of one party by gluing two copies of the state along
/// everything else: `ρ_ij = ⟨φ_j|φ_i⟩` with `φ_i = ⟨u_i|_party |Ψ⟩`.
pub fn reduced_density_diagrammatic(
    state: &CapBasisState,
    keep: usize,
    params: &NumericParams,
) -> Result<DensityOperator, EntangleError> {
    let sizes = state.parties();
    let &size = sizes.get(keep).ok_or(EntangleError::PartyNotFound(keep))?;
    let offset = state.party_offsets()[keep];
    let s = state.eval(params);
    let d = Complex64::new(params.d, 0.0);
    let basis = party_basis(size, params)?;
    let phis = basis
        .iter()
        .map(|u| partial_overlap(u, &s, offset, &d))
        .collect::<Result<Vec<_>, _>>()?;
    let n = phis.len();
    let m = DMatrix::from_fn(n, n, |i, j| inner_product(&phis[j], &phis[i], params));
    DensityOperator {
        scope: vec![keep],
        matrix: m,
        normalized: false,
    }
    .normalize()
}

/// `-Σ λ log λ` in natural-log units.
pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64, EntangleError> {
    let t = rho.trace().re;
    if !rho.normalized || (t - 1.0).abs() > 1e-9 {
        return Err(EntangleError::NotNormalized(t));
    }
    let mut s = 0.0;
    for l in rho.eigenvalues() {
        if l < NEGATIVE_CLIP {
            return Err(EntangleError::NegativeEigenvalue(l));
        }
        if l > EIGEN_FLOOR {
            s -= l * l.ln();
        }
    }
    Ok(s)
}

#[derive(Clone, Debug)]
pub struct SchmidtResult {
    /// Squared singular values, normalized, descending.
    pub coefficients: Vec<f64>,
    pub rank: usize,
    pub coefficient_matrix: DMatrix<Complex64>,
}

/// Schmidt decomposition across the cut after the first `split` parties.
pub fn schmidt_decompose(grid: &CoefficientGrid, split: usize) -> Result<SchmidtResult, EntangleError> {
    let c = grid.as_matrix(split);
    let sv = c.clone().svd(false, false).singular_values;
    let total: f64 = sv.iter().map(|s| s * s).sum();
    if total <= 1e-300 {
        return Err(EntangleError::ZeroState);
    }
    let mut coefficients: Vec<f64> = sv.iter().map(|s| s * s / total).collect();
    coefficients.sort_by(|a, b| b.total_cmp(a));
    let rank = sv.iter().filter(|&&s| s / total.sqrt() > RANK_TOLERANCE).count();
    Ok(SchmidtResult {
        coefficients,
        rank,
        coefficient_matrix: c,
    })
}

pub fn schmidt_of_state(state: &CapBasisState, params: &NumericParams) -> Result<SchmidtResult, EntangleError> {
    if state.parties().len() != 2 {
        return Err(EntangleError::NotBipartite(state.parties().len()));
    }
    schmidt_decompose(&expand_in_computational_basis(state, params)?, 1)
}

/// SLOCC class of a bipartite pure state: its Schmidt rank.
pub fn slocc_class(state: &CapBasisState, params: &NumericParams) -> Result<usize, EntangleError> {
    Ok(schmidt_of_state(state, params)?.rank)
}

/// A single cap diagram seen as a pattern of lines among parties.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Connectome {
    /// Contiguous point blocks, one per party, in line order.
    pub parties: Vec<Vec<usize>>,
    #[serde(rename = "pairing")]
    pub matching: PlanarMatching,
    /// Power of `d` accumulated by surgery (each cut contributes `-1`).
    #[serde(default)]
    pub loop_factor: i64,
}

impl fmt::Debug for Connectome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Connectome(sizes {:?}, {:?}, d^{})",
            self.parties.iter().map(Vec::len).collect::<Vec<_>>(),
            self.matching,
            self.loop_factor
        )
    }
}

impl Connectome {
    pub fn new(sizes: &[usize], matching: PlanarMatching) -> Result<Self, EntangleError> {
        if sizes.iter().sum::<usize>() != matching.n_points() {
            return Err(EntangleError::BadConnectome(format!(
                "party sizes {sizes:?} for {} points",
                matching.n_points()
            )));
        }
        let mut parties = Vec::new();
        let mut at = 0;
        for &s in sizes {
            parties.push((at..at + s).collect());
            at += s;
        }
        Ok(Self {
            parties,
            matching,
            loop_factor: 0,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, EntangleError> {
        let c: Self = serde_json::from_value(v.clone()).map_err(|e| EntangleError::BadConnectome(e.to_string()))?;
        let mut next = 0;
        for p in &c.parties {
            for &i in p {
                if i != next {
                    return Err(EntangleError::BadConnectome("parties must be consecutive blocks".into()));
                }
                next += 1;
            }
        }
        if next != c.matching.n_points() {
            return Err(EntangleError::BadConnectome("parties must cover every point".into()));
        }
        Ok(c)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data")
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.parties.iter().map(Vec::len).collect()
    }

    pub fn n_parties(&self) -> usize {
        self.parties.len()
    }

    fn owner(&self) -> Vec<usize> {
        let mut owner = vec![0; self.matching.n_points()];
        for (k, p) in self.parties.iter().enumerate() {
            for &i in p {
                owner[i] = k;
            }
        }
        owner
    }

    /// Number of lines between two distinct parties.
    pub fn lines_between(&self, a: usize, b: usize) -> usize {
        let owner = self.owner();
        self.matching
            .pairs()
            .iter()
            .filter(|&&(p, q)| {
                let (x, y) = (owner[p], owner[q]);
                (x == a && y == b) || (x == b && y == a)
            })
            .count()
    }

    /// Line count between every party pair, `i < j`.
    pub fn cross_counts(&self) -> Vec<((usize, usize), usize)> {
        let k = self.n_parties();
        let mut out = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                out.push(((a, b), self.lines_between(a, b)));
            }
        }
        out
    }

    /// Lines with exactly one end inside the party set.
    pub fn lines_leaving(&self, set: &[usize]) -> usize {
        let owner = self.owner();
        let inside: BTreeSet<usize> = set.iter().copied().collect();
        self.matching
            .pairs()
            .iter()
            .filter(|&&(p, q)| inside.contains(&owner[p]) != inside.contains(&owner[q]))
            .count()
    }

    /// The state this diagram stands for, with one party per block.
    pub fn state(&self) -> CapBasisState {
        CapBasisState::basis(self.matching.clone())
            .with_parties(&self.sizes())
            .expect("blocks cover the line")
    }

    /// Cut one contiguous party range with exactly two lines leaving, if any.
    fn cut_once(&self) -> Option<Self> {
        let k = self.n_parties();
        let owner = self.owner();
        for start in 0..k {
            for end in start + 1..=k {
                if start == 0 && end == k {
                    continue;
                }
                let range: Vec<usize> = (start..end).collect();
                let leaving: Vec<(usize, usize)> = self
                    .matching
                    .pairs()
                    .into_iter()
                    .filter(|&(p, q)| range.contains(&owner[p]) != range.contains(&owner[q]))
                    .map(|(p, q)| if range.contains(&owner[p]) { (p, q) } else { (q, p) })
                    .collect();
                if leaving.len() != 2 {
                    continue;
                }
                let [(s1, t1), (s2, t2)] = [leaving[0], leaving[1]];
                let mut partner = self.matching.partners().to_vec();
                partner[s1] = s2;
                partner[s2] = s1;
                partner[t1] = t2;
                partner[t2] = t1;
                let matching = PlanarMatching::new(partner).ok()?;
                return Some(Self {
                    parties: self.parties.clone(),
                    matching,
                    loop_factor: self.loop_factor - 1,
                });
            }
        }
        None
    }

    /// Apply the two-line cut until no contiguous party range has exactly two lines leaving.
    pub fn surgery_reduce(&self) -> Self {
        let mut c = self.clone();
        while let Some(next) = c.cut_once() {
            c = next;
        }
        c
    }

    /// Groups of parties joined by lines, each sorted, ordered by first member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let k = self.n_parties();
        let mut comp: Vec<usize> = (0..k).collect();
        fn find(c: &mut [usize], x: usize) -> usize {
            if c[x] != x {
                let r = find(c, c[x]);
                c[x] = r;
            }
            c[x]
        }
        for ((a, b), n) in self.cross_counts() {
            if n > 0 {
                let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
                comp[ra] = rb;
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for p in 0..k {
            let r = find(&mut comp, p);
            groups.entry(r).or_default().push(p);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort();
        out
    }
}

/// Check surgery against the original on every product of party-local matchings.
///
/// Returns the largest mismatch `|⟨P|orig⟩ - d^f ⟨P|reduced⟩|` at the given parameters.
pub fn surgery_residual(orig: &Connectome, reduced: &Connectome, params: &NumericParams) -> f64 {
    let d = params.d;
    let factor = d.powi((reduced.loop_factor - orig.loop_factor) as i32);
    let mut products = vec![PlanarMatching::empty()];
    for s in orig.sizes() {
        let local = crate::diagram::enumerate_matchings(s / 2);
        products = products
            .iter()
            .flat_map(|p| local.iter().map(move |m| PlanarMatching::concat(&[p, m])))
            .collect();
    }
    let mut worst: f64 = 0.0;
    for p in products {
        let a = d.powi(crate::diagram::count_cycles(p.partners(), orig.matching.partners()) as i32);
        let b = factor * d.powi(crate::diagram::count_cycles(p.partners(), reduced.matching.partners()) as i32);
        worst = worst.max((a - b).abs());
    }
    worst
}

/// Classification of a multipartite connectome after surgery.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConnectomeClass {
    FullySeparable,
    /// Some but not all parties are joined; the groups are listed.
    Biseparable(Vec<Vec<usize>>),
    Genuine,
}

pub fn classify_connectome(c: &Connectome) -> ConnectomeClass {
    let groups = c.surgery_reduce().components();
    if groups.len() == c.n_parties() {
        ConnectomeClass::FullySeparable
    } else if groups.len() == 1 {
        ConnectomeClass::Genuine
    } else {
        ConnectomeClass::Biseparable(groups)
    }
}

/// Entropy of one party from its line count: exact `log C_{m/2}` and asymptotic `m log 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineEntropy {
    pub lines: usize,
    pub exact: f64,
    pub asymptotic: f64,
}

pub fn connectome_entropy(c: &Connectome, party: usize) -> Result<LineEntropy, EntangleError> {
    if party >= c.n_parties() {
        return Err(EntangleError::PartyNotFound(party));
    }
    let m = c.lines_leaving(&[party]);
    if m % 2 == 1 {
        return Err(EntangleError::OddLines(m));
    }
    let cat = catalan(m as u64 / 2);
    let exact = cat.to_string().parse::<f64>().expect("integer").ln();
    Ok(LineEntropy {
        lines: m,
        exact,
        asymptotic: m as f64 * std::f64::consts::LN_2,
    })
}

/// One line-count inequality: `slack = lhs - rhs`, with the slack the counting predicts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountCheck {
    pub name: String,
    pub slack: i64,
    pub predicted: i64,
}

impl CountCheck {
    pub fn holds(&self) -> bool {
        self.slack >= 0 && self.slack == self.predicted
    }
}

#[derive(Clone, Debug, Default)]
pub struct InequalityReport {
    pub checks: Vec<CountCheck>,
}

impl InequalityReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(CountCheck::holds)
    }
}

/// Subadditivity for every party pair; strong subadditivity and monogamy of
/// mutual information for every ordered triple. Units are line counts.
pub fn check_inequalities(c: &Connectome) -> InequalityReport {
    let k = c.n_parties();
    let n = |set: &[usize]| c.lines_leaving(set) as i64;
    let l = |a: usize, b: usize| c.lines_between(a, b) as i64;
    let mut checks = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            checks.push(CountCheck {
                name: format!("subadditivity({a},{b})"),
                slack: n(&[a]) + n(&[b]) - n(&[a, b]),
                predicted: 2 * l(a, b),
            });
        }
    }
    for a in 0..k {
        for b in 0..k {
            for cc in 0..k {
                if a == b || b == cc || a == cc {
                    continue;
                }
                checks.push(CountCheck {
                    name: format!("strong_subadditivity({a},{b},{cc})"),
                    slack: n(&[a, b]) + n(&[b, cc]) - n(&[b]) - n(&[a, b, cc]),
                    predicted: 2 * l(a, cc),
                });
                if a < b && b < cc {
                    checks.push(CountCheck {
                        name: format!("mi_monogamy({a},{b},{cc})"),
                        slack: n(&[a, b]) + n(&[b, cc]) + n(&[a, cc]) - n(&[a]) - n(&[b]) - n(&[cc]) - n(&[a, b, cc]),
                        predicted: 0,
                    });
                }
            }
        }
    }
    InequalityReport { checks }
}

/// Uniform random non-crossing matching on `2 n_pairs` points (cycle lemma).
pub fn random_matching<R: Rng>(rng: &mut R, n_pairs: usize) -> PlanarMatching {
    let mut steps: Vec<i32> = std::iter::repeat(1)
        .take(n_pairs)
        .chain(std::iter::repeat(-1).take(n_pairs + 1))
        .collect();
    steps.shuffle(rng);
    // Rotate to start just after the first minimum of the partial sums.
    let (mut sum, mut min, mut at) = (0, 0, 0);
    for (i, s) in steps.iter().enumerate() {
        sum += s;
        if sum < min {
            min = sum;
            at = i + 1;
        }
    }
    let len = steps.len();
    steps.rotate_left(at % len);
    steps.pop();
    let mut partner = vec![0; 2 * n_pairs];
    let mut stack = Vec::new();
    for (i, s) in steps.iter().enumerate() {
        if *s == 1 {
            stack.push(i);
        } else {
            let j = stack.pop().expect("balanced word");
            partner[i] = j;
            partner[j] = i;
        }
    }
    PlanarMatching::new(partner).expect("Dyck word gives a planar matching")
}

/// Random connectome with `n_parties` blocks of random sizes and `2 n_pairs` points in total.
pub fn random_connectome<R: Rng>(rng: &mut R, n_parties: usize, n_pairs: usize) -> Connectome {
    let n = 2 * n_pairs;
    let mut cuts: Vec<usize> = (0..n_parties - 1).map(|_| 2 * rng.gen_range(0..=n_pairs)).collect();
    cuts.sort_unstable();
    let mut sizes = Vec::new();
    let mut last = 0;
    for c in cuts.into_iter().chain(std::iter::once(n)) {
        sizes.push(c - last);
        last = c;
    }
    let m = random_matching(rng, n_pairs);
    let mut parties = Vec::new();
    let mut at = 0;
    for s in sizes {
        parties.push((at..at + s).collect());
        at += s;
    }
    Connectome {
        parties,
        matching: m,
        loop_factor: 0,
    }
}

/// Two parties of `l + m` points: `m` lines between them, adjacent caps on the other `l` points of each.
pub fn lm_connectome(l: usize, m: usize) -> Result<Connectome, EntangleError> {
    if l % 2 == 1 || m % 2 == 1 {
        return Err(EntangleError::OddLines(l.max(m)));
    }
    let size = l + m;
    let mut pairs = Vec::new();
    for t in (0..l).step_by(2) {
        pairs.push((t, t + 1));
        pairs.push((size + m + t, size + m + t + 1));
    }
    for t in 0..m {
        pairs.push((l + t, size + m - 1 - t));
    }
    Connectome::new(&[size, size], PlanarMatching::from_pairs(2 * size, &pairs)?)
}

/// The seven three-qubit cap diagrams drawn with a top party and two side parties.
///
/// Points: top `0..4`, left `4..8`, right `8..12`, one joined line read
/// around the boundary.
pub fn tripartite_connectomes() -> [Connectome; 7] {
    let build = |pairs: &[(usize, usize)]| {
        Connectome::new(&[4, 4, 4], PlanarMatching::from_pairs(12, pairs).expect("fixed diagram")).expect("fixed sizes")
    };
    [
        build(&[(0, 1), (2, 3), (4, 5), (6, 7), (8, 9), (10, 11)]),
        build(&[(0, 1), (2, 3), (4, 5), (6, 9), (7, 8), (10, 11)]),
        build(&[(0, 11), (1, 10), (2, 5), (3, 4), (6, 7), (8, 9)]),
        build(&[(0, 11), (1, 2), (3, 4), (5, 6), (7, 8), (9, 10)]),
        build(&[(0, 1), (2, 3), (4, 11), (5, 10), (6, 9), (7, 8)]),
        build(&[(0, 11), (1, 2), (3, 4), (5, 10), (6, 9), (7, 8)]),
        build(&[(0, 11), (1, 10), (2, 5), (3, 4), (6, 9), (7, 8)]),
    ]
}

/// Computational-basis expansion of the genuinely tripartite diagram.
pub fn tripartite_ghz_expand(params: &NumericParams) -> Result<CoefficientGrid, EntangleError> {
    let c = &tripartite_connectomes()[6];
    Ok(expand_in_computational_basis(&c.state(), params)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_matchings_are_planar() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 0..8 {
            assert_eq!(random_matching(&mut rng, n).n_points(), 2 * n);
        }
    }

    #[test]
    fn surgery_on_two_lines() {
        let m = PlanarMatching::from_pairs(8, &[(0, 1), (2, 5), (3, 4), (6, 7)]).unwrap();
        let c = Connectome::new(&[4, 4], m).unwrap();
        let r = c.surgery_reduce();
        assert_eq!(r.loop_factor, -1);
        assert_eq!(r.matching, PlanarMatching::adjacent_caps(8));
        assert!(surgery_residual(&c, &r, &NumericParams::default()) < 1e-12);
    }

    #[test]
    fn ladder_unchanged() {
        let c = Connectome::new(&[4, 4], PlanarMatching::rainbow(8)).unwrap();
        assert_eq!(c.surgery_reduce(), c);
    }

    #[test]
    fn tripartite_classes() {
        let cs = tripartite_connectomes();
        for c in &cs[..4] {
            assert_eq!(classify_connectome(c), ConnectomeClass::FullySeparable);
        }
        for c in &cs[4..6] {
            assert_eq!(classify_connectome(c), ConnectomeClass::Biseparable(vec![vec![0], vec![1, 2]]));
        }
        assert_eq!(classify_connectome(&cs[6]), ConnectomeClass::Genuine);
    }
}
