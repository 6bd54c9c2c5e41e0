//! Kauffman bracket and Jones polynomial by recursive skein resolution.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use serde_json::{json, Value};
use thiserror::Error;

use crate::diagram::{braid_to_tl, BraidClosure, BraidWord, Closure, DiagramError, Pairing, TangleDiagram};
use crate::poly::{LaurentPoly, QForm};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BracketError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("bracket requires a closed diagram; this one has {0} free ends")]
    NotClosed(usize),
    #[error("empty diagram has no normalized bracket")]
    Empty,
}

/// Framed bracket, its unknot-normalized form, and the framing-free Jones value in `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketResult {
    /// Every loop counts `d`, the last one included.
    pub raw: LaurentPoly,
    pub writhe: i64,
    /// `raw / d`.
    pub normalized_unknot: LaurentPoly,
    /// `normalized_unknot * (-A^3)^(-writhe)`.
    pub jones: LaurentPoly,
}

impl BracketResult {
    pub fn from_raw(raw: LaurentPoly, writhe: i64) -> Result<Self, BracketError> {
        let normalized_unknot = raw.div_exact(&LaurentPoly::d()).ok_or(BracketError::Empty)?;
        let jones = &normalized_unknot * &LaurentPoly::framing(-writhe);
        Ok(Self {
            raw,
            writhe,
            normalized_unknot,
            jones,
        })
    }

    pub fn jones_q(&self) -> QForm {
        QForm::from_a(&self.jones)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "raw": self.raw.to_json(),
            "writhe": self.writhe,
            "normalized_unknot": self.normalized_unknot.to_json(),
            "jones_q": self.jones_q().to_json(),
        })
    }
}

/// Result of resolving a tangle: free-end pairing (partner vector) to coefficient.
pub type Expansion = BTreeMap<Vec<usize>, LaurentPoly>;

struct Skein<'a> {
    t: &'a TangleDiagram,
    memo: Option<HashMap<(usize, Vec<usize>), Rc<Expansion>>>,
}

impl Skein<'_> {
    fn run(&mut self, idx: usize, state: &[usize]) -> Rc<Expansion> {
        let nc = self.t.crossings().len();
        if idx == nc {
            let base = 4 * nc;
            let partner = state[base..].iter().map(|p| p - base).collect();
            return Rc::new(BTreeMap::from([(partner, LaurentPoly::one())]));
        }
        let key = self.memo.as_ref().map(|_| (idx, state[4 * idx..].to_vec()));
        if let (Some(memo), Some(k)) = (&self.memo, &key) {
            if let Some(hit) = memo.get(k) {
                return hit.clone();
            }
        }
        let o = 4 * idx;
        let mut out = Expansion::new();
        // A-smoothing joins slots (0,1),(2,3); B-smoothing joins (0,3),(1,2).
        for (arcs, a_exp) in [([(0, 1), (2, 3)], 1i64), ([(0, 3), (1, 2)], -1)] {
            let mut next = state.to_vec();
            let mut loops = 0u32;
            for (x, y) in arcs {
                if add_arc(&mut next, o + x, o + y) {
                    loops += 1;
                }
            }
            let factor = &LaurentPoly::monomial(a_exp, 1) * &LaurentPoly::d().pow(loops);
            for (k, v) in self.run(idx + 1, &next).iter() {
                let entry = out.entry(k.clone()).or_default();
                *entry += &(&factor * v);
            }
        }
        out.retain(|_, v| !v.is_zero());
        let out = Rc::new(out);
        if let (Some(memo), Some(k)) = (&mut self.memo, key) {
            memo.insert(k, out.clone());
        }
        out
    }
}

/// Join chain ends `x` and `y`; returns true when this closes a loop.
fn add_arc(state: &mut [usize], x: usize, y: usize) -> bool {
    if state[x] == y {
        return true;
    }
    let (ex, ey) = (state[x], state[y]);
    state[ex] = ey;
    state[ey] = ex;
    false
}

/// Resolve every crossing, lowest id first. With `memoize` the partially
/// resolved state is cached on its canonical chain pairing.
pub fn skein_expand(t: &TangleDiagram, memoize: bool) -> Expansion {
    let mut state = vec![0; t.n_occurrences()];
    for v in t.edge_occurrences().values() {
        state[v[0]] = v[1];
        state[v[1]] = v[0];
    }
    let mut sk = Skein {
        t,
        memo: memoize.then(HashMap::new),
    };
    let loops = LaurentPoly::d().pow(t.loops() as u32);
    sk.run(0, &state)
        .iter()
        .map(|(k, v)| (k.clone(), v * &loops))
        .collect()
}

/// Raw bracket of a closed diagram.
pub fn bracket_raw(t: &TangleDiagram, memoize: bool) -> Result<LaurentPoly, BracketError> {
    if !t.is_closed() {
        return Err(BracketError::NotClosed(t.free_ends().len()));
    }
    Ok(skein_expand(t, memoize).remove(&Vec::new()).unwrap_or_default())
}

/// Skein expansion of a tangle with free ends, keyed by endpoint pairing.
pub fn tangle_expansion(t: &TangleDiagram) -> Vec<(Pairing, LaurentPoly)> {
    skein_expand(t, true)
        .into_iter()
        .map(|(k, v)| (Pairing::new(k).expect("skein output is a pairing"), v))
        .collect()
}

pub fn kauffman_bracket(t: &TangleDiagram) -> Result<BracketResult, BracketError> {
    let raw = bracket_raw(t, true)?;
    let writhe = t.writhe()?;
    BracketResult::from_raw(raw, writhe)
}

/// Bracket of a closed braid computed through the Temperley-Lieb image.
pub fn bracket_of_braid_closure(w: &BraidWord, closure: Closure) -> Result<BracketResult, BracketError> {
    let img = braid_to_tl(w);
    let (raw, writhe) = match closure {
        Closure::Trace => (img.markov_closure()?, w.writhe()),
        Closure::Plat => {
            let raw = img.plat_closure()?;
            let t = TangleDiagram::from_braid(w, &BraidClosure::Plat)?;
            (raw, t.writhe()?)
        }
    };
    BracketResult::from_raw(raw, writhe)
}

pub fn jones_polynomial(b: &BracketResult) -> QForm {
    b.jones_q()
}

pub fn linking_number(t: &TangleDiagram, comp_a: usize, comp_b: usize) -> Result<i64, BracketError> {
    Ok(t.linking_number(comp_a, comp_b)?)
}
