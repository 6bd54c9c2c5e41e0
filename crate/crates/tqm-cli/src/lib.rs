//! The `tqm` command line.
//!
//! [`run`] takes the argument list and returns the exit status together with
//! what would go to standard output and standard error, so that tests can
//! drive it without spawning a process.

pub mod bench;

use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use tqm::bracket::{bracket_of_braid_closure, kauffman_bracket, BracketResult};
use tqm::diagram::{BraidWord, Closure, TangleDiagram};
use tqm::entangle::{
    check_inequalities, classify_connectome, connectome_entropy, random_connectome, reduced_density,
    schmidt_decompose, von_neumann_entropy, Connectome, ConnectomeClass,
};
use tqm::hilbert::{expand_in_computational_basis, expand_qubits_exact, gram_matrix, CapBasisState};
use tqm::protocols::{
    densecode_braided, densecode_simple, random_qubit, teleport, BellLabel, Measurement,
};
use tqm::rmatrix::{braid_representation, markov_trace, DEFAULT_STRAND_BUDGET};
use tqm::NumericParams;

/// Exit status for domain failures (bad math input, impossible outcomes).
pub const EXIT_DOMAIN: i32 = 1;
/// Exit status for unreadable input.
pub const EXIT_PARSE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "tqm", version, about = "Knot invariants and topological quantum states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Args, Debug, Clone)]
pub struct ParamArgs {
    /// Chern-Simons level; sets A = exp(i pi / (2 (k + 2))).
    #[arg(long, conflicts_with = "theta")]
    pub k: Option<f64>,
    /// Phase of A directly.
    #[arg(long)]
    pub theta: Option<f64>,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct KnotInput {
    /// Braid word, e.g. "n=2: 1 1 1".
    #[arg(long)]
    pub braid: Option<String>,
    /// PD code file, or an inline PD string.
    #[arg(long)]
    pub pd: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ClosureArg {
    Trace,
    Plat,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Kauffman bracket of a closed braid or PD diagram.
    Bracket {
        #[command(flatten)]
        input: KnotInput,
        #[arg(long, value_enum, default_value = "trace")]
        closure: ClosureArg,
    },
    /// Jones polynomial in q.
    Jones {
        #[command(flatten)]
        input: KnotInput,
        #[arg(long, value_enum, default_value = "trace")]
        closure: ClosureArg,
    },
    /// Markov trace of the matrix representation of a braid.
    Trace {
        #[arg(long)]
        braid: String,
        #[arg(long, default_value_t = DEFAULT_STRAND_BUDGET)]
        budget: usize,
    },
    /// Gram matrix of the non-crossing matchings on n points.
    Gram {
        #[arg(long)]
        points: usize,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Expand a state in the computational basis of its parties.
    Expand {
        #[arg(long)]
        state: String,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Entanglement entropy of one party.
    Entropy {
        #[arg(long)]
        state: String,
        /// `left`, `right`, or a party index.
        #[arg(long, default_value = "left")]
        party: String,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Schmidt rank across the cut after the first party.
    Slocc {
        #[arg(long)]
        state: String,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Line-count entropy inequalities of a connectome.
    Ineq {
        /// Connectome file; a random one is drawn when absent.
        #[arg(long)]
        state: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        parties: usize,
        #[arg(long, default_value_t = 6)]
        pairs: usize,
    },
    /// Teleport a random qubit state.
    Teleport {
        /// Bell outcome: phi+, phi-, psi+, psi-.
        #[arg(long, conflicts_with = "braid")]
        bell: Option<String>,
        /// Four-strand braid applied to Alice's side of the measured pair.
        #[arg(long)]
        braid: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Dense coding of two classical bits.
    Densecode {
        /// The two bits, e.g. "1,0".
        #[arg(long)]
        bits: String,
        /// Use the braided eight-point protocol.
        #[arg(long)]
        braided: bool,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Time skein resolution against the matrix trace as CSV.
    Bench {
        #[arg(long, default_value = "torus")]
        family: String,
        #[arg(long, default_value_t = 12)]
        max_crossings: usize,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Collected result of one invocation.
#[derive(Debug, Default)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum Failure {
    Parse(String),
    Domain(String),
}

type Res<T> = Result<T, Failure>;

fn domain<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Domain(e.to_string())
}

fn parse_err<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Parse(e.to_string())
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let status = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let text = e.render().to_string();
            return if status == 0 {
                Outcome {
                    status,
                    stdout: text,
                    ..Default::default()
                }
            } else {
                Outcome {
                    status,
                    stderr: text,
                    ..Default::default()
                }
            };
        }
    };
    let mut out = Outcome::default();
    match dispatch(&cli, &mut out) {
        Ok(()) => out,
        Err(Failure::Parse(m)) => Outcome {
            status: EXIT_PARSE,
            stderr: format!("{}error: {m}\n", out.stderr),
            ..out
        },
        Err(Failure::Domain(m)) => Outcome {
            status: EXIT_DOMAIN,
            stderr: format!("{}error: {m}\n", out.stderr),
            ..out
        },
    }
}

fn params_of(p: &ParamArgs, out: &mut Outcome, points: usize) -> Res<NumericParams> {
    let params = match (p.k, p.theta) {
        (_, Some(t)) => NumericParams::from_theta(t).map_err(parse_err)?,
        (Some(k), None) => NumericParams::from_k(k).map_err(parse_err)?,
        (None, None) => NumericParams::default(),
    };
    if let Some(k) = p.k {
        if k.fract() == 0.0 && points as f64 > k {
            out.stderr.push_str(&format!(
                "warning: integer level k = {k} truncates spaces of more than {k} points; results on {points} points are degenerate\n"
            ));
        }
    }
    Ok(params)
}

fn read_input(arg: &str) -> Res<String> {
    let p = Path::new(arg);
    if p.is_file() {
        std::fs::read_to_string(p).map_err(|e| Failure::Parse(format!("{arg}: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

fn closure_of(c: ClosureArg) -> Closure {
    match c {
        ClosureArg::Trace => Closure::Trace,
        ClosureArg::Plat => Closure::Plat,
    }
}

fn knot_bracket(input: &KnotInput, closure: ClosureArg) -> Res<BracketResult> {
    if let Some(b) = &input.braid {
        let w: BraidWord = b.parse().map_err(parse_err)?;
        return bracket_of_braid_closure(&w, closure_of(closure)).map_err(domain);
    }
    let text = read_input(input.pd.as_deref().expect("clap requires one input"))?;
    let t: TangleDiagram = text.parse().map_err(parse_err)?;
    kauffman_bracket(&t).map_err(domain)
}

enum StateFile {
    State(CapBasisState),
    Connectome(Connectome),
}

impl StateFile {
    fn state(&self) -> CapBasisState {
        match self {
            Self::State(s) => s.clone(),
            Self::Connectome(c) => c.state(),
        }
    }
}

fn load_state(arg: &str) -> Res<StateFile> {
    let text = read_input(arg)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Failure::Parse(format!("{arg}: {e}")))?;
    if v.get("pairing").is_some() {
        Connectome::from_json(&v).map(StateFile::Connectome).map_err(parse_err)
    } else {
        CapBasisState::from_json(&v).map(StateFile::State).map_err(parse_err)
    }
}

fn party_index(arg: &str) -> Res<usize> {
    match arg {
        "left" | "bottom" => Ok(0),
        "right" | "top" => Ok(1),
        other => other
            .parse()
            .map_err(|_| Failure::Parse(format!("party must be left, right or an index, got '{other}'"))),
    }
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn emit(out: &mut Outcome, as_json: bool, v: Value, text: String) {
    if as_json {
        out.stdout.push_str(&serde_json::to_string_pretty(&v).expect("json"));
        out.stdout.push('\n');
    } else {
        out.stdout.push_str(&text);
        if !text.ends_with('\n') {
            out.stdout.push('\n');
        }
    }
}

fn dispatch(cli: &Cli, out: &mut Outcome) -> Res<()> {
    let as_json = cli.json;
    match &cli.command {
        Command::Bracket { input, closure } => {
            let b = knot_bracket(input, *closure)?;
            let text = format!(
                "raw: {}\nwrithe: {}\nnormalized: {}\njones: {}",
                b.raw,
                b.writhe,
                b.normalized_unknot,
                b.jones_q()
            );
            emit(out, as_json, b.to_json(), text);
        }
        Command::Jones { input, closure } => {
            let b = knot_bracket(input, *closure)?;
            let q = b.jones_q();
            emit(out, as_json, json!({ "jones_q": q.to_json(), "text": q.to_string() }), q.to_string());
        }
        Command::Trace { braid, budget } => {
            let w: BraidWord = braid.parse().map_err(parse_err)?;
            let m = braid_representation(&w, *budget).map_err(domain)?;
            let raw = markov_trace(&m, w.strands()).map_err(domain)?;
            let b = BracketResult::from_raw(raw, w.writhe()).map_err(domain)?;
            let text = format!("trace: {}\njones: {}", b.raw, b.jones_q());
            emit(out, as_json, b.to_json(), text);
        }
        Command::Gram { points, params } => {
            let p = params_of(params, out, *points)?;
            let g = gram_matrix(*points, &p).map_err(domain)?;
            let mut text = String::new();
            for i in 0..g.matchings.len() {
                let row: Vec<String> = (0..g.matchings.len()).map(|j| g.gram.get(i, j).to_string()).collect();
                text.push_str(&format!("[{}]\n", row.join(", ")));
            }
            text.push_str(&format!("dimension: {}\nnumeric rank: {}", g.matchings.len(), g.numeric_rank));
            let v = json!({
                "points": points,
                "matchings": g.matchings.iter().map(|m| m.partners().to_vec()).collect::<Vec<_>>(),
                "gram": g.gram.to_json(),
                "numeric_rank": g.numeric_rank,
            });
            emit(out, as_json, v, text);
        }
        Command::Expand { state, params } => {
            let s = load_state(state)?.state();
            let p = params_of(params, out, s.n_points())?;
            let g = expand_in_computational_basis(&s, &p).map_err(domain)?;
            let mut v = g.to_json();
            let mut text: String = g
                .labels()
                .iter()
                .zip(&g.values)
                .map(|(l, z)| format!("|{}> {:+.12} {:+.12}i\n", l.iter().map(|x| x.to_string()).collect::<String>(), z.re, z.im))
                .collect();
            if s.parties().iter().all(|&n| n == 4) {
                let exact = expand_qubits_exact(&s).map_err(domain)?;
                v["exact"] = exact
                    .iter()
                    .map(|(l, c)| json!({ "labels": l, "value": c.to_json() }))
                    .collect();
                text.push_str("exact (label with r ones divided by (d^2-1)^(r/2)):\n");
                for (l, c) in &exact {
                    text.push_str(&format!(
                        "|{}> {}\n",
                        l.iter().map(|x| x.to_string()).collect::<String>(),
                        c
                    ));
                }
            }
            emit(out, as_json, v, text);
        }
        Command::Entropy { state, party, params } => {
            let file = load_state(state)?;
            let s = file.state();
            let idx = party_index(party)?;
            let p = params_of(params, out, s.n_points())?;
            let rho = reduced_density(&s, &[idx], &p).map_err(domain)?;
            let entropy = von_neumann_entropy(&rho).map_err(domain)?;
            let mut v = json!({ "party": idx, "entropy": entropy, "rank": rho.rank(1e-9) });
            if let StateFile::Connectome(c) = &file {
                let lines = connectome_entropy(c, idx).map_err(domain)?;
                v["lines"] = json!(lines.lines);
                v["line_entropy"] = json!(lines.exact);
                v["asymptotic"] = json!(lines.asymptotic);
            }
            emit(out, as_json, v, format!("{entropy:.12}"));
        }
        Command::Slocc { state, params } => {
            let file = load_state(state)?;
            let s = file.state();
            let p = params_of(params, out, s.n_points())?;
            // Multiparty states are cut between the first party and the rest.
            let grid = expand_in_computational_basis(&s, &p).map_err(domain)?;
            let r = schmidt_decompose(&grid, 1).map_err(domain)?;
            let mut v = json!({ "rank": r.rank, "schmidt_coefficients": r.coefficients });
            let mut text = format!("rank: {}\ncoefficients: {:?}", r.rank, r.coefficients);
            if let StateFile::Connectome(c) = &file {
                let class = match classify_connectome(c) {
                    ConnectomeClass::FullySeparable => "separable".to_string(),
                    ConnectomeClass::Genuine => "genuine".to_string(),
                    ConnectomeClass::Biseparable(g) => format!("biseparable {g:?}"),
                };
                v["connectome_class"] = json!(class);
                text.push_str(&format!("\nconnectome class: {class}"));
            }
            emit(out, as_json, v, text);
        }
        Command::Ineq { state, seed, parties, pairs } => {
            let c = match state {
                Some(f) => match load_state(f)? {
                    StateFile::Connectome(c) => c,
                    StateFile::State(_) => return Err(Failure::Parse("ineq needs a connectome file".into())),
                },
                None => {
                    if *parties == 0 {
                        return Err(Failure::Parse("need at least one party".into()));
                    }
                    random_connectome(&mut ChaCha8Rng::seed_from_u64(*seed), *parties, *pairs)
                }
            };
            let report = check_inequalities(&c);
            let text: String = report
                .checks
                .iter()
                .map(|k| {
                    format!(
                        "{} slack {} predicted {} {}\n",
                        k.name,
                        k.slack,
                        k.predicted,
                        if k.holds() { "ok" } else { "FAIL" }
                    )
                })
                .collect();
            let v = json!({
                "connectome": c.to_json(),
                "checks": report.checks.iter().map(|k| json!({
                    "name": k.name, "slack": k.slack, "predicted": k.predicted, "holds": k.holds()
                })).collect::<Vec<_>>(),
                "all_hold": report.all_hold(),
            });
            emit(out, as_json, v, text);
            if !report.all_hold() {
                return Err(Failure::Domain("an inequality failed".into()));
            }
        }
        Command::Teleport { bell, braid, seed, params } => {
            let p = params_of(params, out, 8)?;
            let measurement = match (bell, braid) {
                (_, Some(b)) => Measurement::Braid(b.parse().map_err(parse_err)?),
                (Some(l), None) => Measurement::Bell(parse_bell(l)?),
                (None, None) => Measurement::Bell(BellLabel::PhiPlus),
            };
            let psi = random_qubit(&mut ChaCha8Rng::seed_from_u64(*seed));
            let r = teleport(&psi, &measurement, &p).map_err(domain)?;
            let mut v = r.to_json();
            v["psi"] = psi.iter().map(|z| complex_json(*z)).collect();
            emit(out, as_json, v, format!("probability: {:.12}\nfidelity: {:.12}", r.probability, r.fidelity));
        }
        Command::Densecode { bits, braided, params } => {
            let (a, b) = parse_bits(bits)?;
            let p = params_of(params, out, 8)?;
            if *braided {
                let r = densecode_braided(a, b, &p).map_err(domain)?;
                let (bottom, top) = r.labels;
                let v = json!({ "bits": [a, b], "bottom": bottom, "top": top, "overlaps": r.overlaps });
                emit(out, as_json, v, format!("bottom: {bottom}^\ntop: {top}^"));
            } else {
                let r = densecode_simple(a, b, &p).map_err(domain)?;
                let v = json!({
                    "bits": [a, b],
                    "outcome": r.outcome.name(),
                    "decoded": [r.decoded.0, r.decoded.1],
                    "probabilities": r.probabilities,
                });
                emit(out, as_json, v, format!("outcome: {}\ndecoded: {},{}", r.outcome.name(), r.decoded.0, r.decoded.1));
            }
        }
        Command::Bench { family, max_crossings, samples, seed } => {
            let fam: bench::Family = family.parse().map_err(Failure::Parse)?;
            let rows = bench::run(fam, *max_crossings, *samples, *seed).map_err(Failure::Domain)?;
            out.stdout.push_str(bench::CSV_HEADER);
            out.stdout.push('\n');
            for r in rows {
                out.stdout.push_str(&r.csv());
                out.stdout.push('\n');
            }
        }
    }
    Ok(())
}

fn parse_bell(s: &str) -> Res<BellLabel> {
    match s.to_ascii_lowercase().as_str() {
        "phi+" => Ok(BellLabel::PhiPlus),
        "phi-" => Ok(BellLabel::PhiMinus),
        "psi+" => Ok(BellLabel::PsiPlus),
        "psi-" => Ok(BellLabel::PsiMinus),
        other => Err(Failure::Parse(format!("unknown Bell label '{other}'"))),
    }
}

fn parse_bits(s: &str) -> Res<(u8, u8)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bit = |t: &str| match t {
        "0" => Ok(0u8),
        "1" => Ok(1u8),
        _ => Err(Failure::Parse(format!("bit must be 0 or 1, got '{t}'"))),
    };
    match parts.as_slice() {
        [a, b] => Ok((bit(a)?, bit(b)?)),
        _ => Err(Failure::Parse(format!("expected two bits like 1,0, got '{s}'"))),
    }
}
