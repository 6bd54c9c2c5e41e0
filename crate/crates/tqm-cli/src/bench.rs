//! Timing comparison of skein resolution and the matrix Markov trace.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tqm::bracket::bracket_raw;
use tqm::diagram::{BraidClosure, BraidWord, TangleDiagram};
use tqm::rmatrix::{braid_representation, markov_trace, DEFAULT_STRAND_BUDGET};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `(b_1)^m` on two strands.
    Torus,
    /// Random three-strand words with eight letters.
    Random,
    Empty,
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "torus" => Ok(Self::Torus),
            "random" => Ok(Self::Random),
            "empty" => Ok(Self::Empty),
            other => Err(format!("unknown family '{other}' (torus, random, empty)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub family: &'static str,
    pub braid: BraidWord,
    pub crossings: usize,
    pub skein_us: f64,
    pub matrix_us: f64,
}

pub const CSV_HEADER: &str = "family,braid,crossings,skein_us,matrix_us";

impl BenchRow {
    pub fn csv(&self) -> String {
        format!(
            "{},\"{}\",{},{:.1},{:.1}",
            self.family, self.braid, self.crossings, self.skein_us, self.matrix_us
        )
    }
}

/// Time both evaluators on one closed braid; the values must agree.
pub fn time_one(family: &'static str, w: &BraidWord) -> Result<BenchRow, String> {
    let t = TangleDiagram::from_braid(w, &BraidClosure::Trace).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let skein = bracket_raw(&t, false).map_err(|e| e.to_string())?;
    let skein_us = start.elapsed().as_secs_f64() * 1e6;
    let start = Instant::now();
    let rep = braid_representation(w, DEFAULT_STRAND_BUDGET).map_err(|e| e.to_string())?;
    let matrix = markov_trace(&rep, w.strands()).map_err(|e| e.to_string())?;
    let matrix_us = start.elapsed().as_secs_f64() * 1e6;
    if skein != matrix {
        return Err(format!("methods disagree on {w}: {skein} vs {matrix}"));
    }
    Ok(BenchRow {
        family,
        braid: w.clone(),
        crossings: w.letters().len(),
        skein_us,
        matrix_us,
    })
}

pub fn run(family: Family, max_crossings: usize, samples: usize, seed: u64) -> Result<Vec<BenchRow>, String> {
    match family {
        Family::Empty => Ok(Vec::new()),
        Family::Torus => (1..=max_crossings)
            .map(|m| time_one("torus", &BraidWord::new(2, vec![1; m]).expect("two strands")))
            .collect(),
        Family::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples)
                .map(|_| {
                    let letters = (0..max_crossings)
                        .map(|_| rng.gen_range(1..=2) * if rng.gen_bool(0.5) { 1 } else { -1 })
                        .collect();
                    time_one("random", &BraidWord::new(3, letters).expect("three strands"))
                })
                .collect()
        }
    }
}
