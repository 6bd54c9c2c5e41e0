//! Planar-diagram (PD) tangles.
//!
//! A crossing `X(i,j,k,l)` lists its four edge labels counterclockwise,
//! starting from the incoming under-strand, so the under-strand runs
//! `i -> k`. The crossing is positive when the over-strand runs `l -> j`.
//!
//! Edge occurrences are numbered `4c + slot` for crossing `c`, followed by the
//! free ends in their listed order. An explicit orientation flag `O(e,+)`
//! means edge `e` runs from its lower-numbered occurrence to its higher one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use super::{BraidWord, DiagramError, Pairing};

pub type Edge = i64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangleDiagram {
    crossings: Vec<[Edge; 4]>,
    free_ends: Vec<Edge>,
    loops: usize,
    explicit: BTreeMap<Edge, bool>,
}

/// One connected strand of a tangle, listed in its traversal order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// Edges in orientation order (or traversal order when unoriented).
    pub edges: Vec<Edge>,
    pub closed: bool,
    pub oriented: bool,
}

/// Orientation data derived from PD slots, explicit flags and label order.
#[derive(Clone, Debug)]
pub struct Orientation {
    pub components: Vec<Component>,
    edge_component: BTreeMap<Edge, usize>,
    head: BTreeMap<Edge, usize>,
}

impl Orientation {
    pub fn component_of(&self, e: Edge) -> Option<usize> {
        self.edge_component.get(&e).copied()
    }

    /// Occurrence index where an oriented edge ends.
    pub fn head(&self, e: Edge) -> Option<usize> {
        self.head.get(&e).copied()
    }
}

#[derive(Clone, Debug)]
struct Step {
    tail: usize,
    head: usize,
    edge: Edge,
}

#[derive(Clone, Debug)]
struct Walk {
    steps: Vec<Step>,
    closed: bool,
}

/// How a braid is closed off when it is turned into a tangle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BraidClosure {
    /// Top position `i` joined to bottom position `i`.
    Trace,
    /// Neighbouring pairs capped on both ends.
    Plat,
    /// Explicit caps per side; `None` leaves that side open.
    Caps {
        bottom: Option<Vec<(usize, usize)>>,
        top: Option<Vec<(usize, usize)>>,
    },
}

impl TangleDiagram {
    pub fn new(
        crossings: Vec<[Edge; 4]>,
        free_ends: Vec<Edge>,
        loops: usize,
        explicit: BTreeMap<Edge, bool>,
    ) -> Result<Self, DiagramError> {
        let t = Self {
            crossings,
            free_ends,
            loops,
            explicit,
        };
        t.validate()?;
        Ok(t)
    }

    /// A diagram made of `n` crossingless circles.
    pub fn circles(n: usize) -> Self {
        Self {
            crossings: Vec::new(),
            free_ends: Vec::new(),
            loops: n,
            explicit: BTreeMap::new(),
        }
    }

    fn validate(&self) -> Result<(), DiagramError> {
        let occ = self.edge_occurrences();
        for (e, v) in &occ {
            if v.len() != 2 {
                return Err(DiagramError::InconsistentPd(format!(
                    "edge {e} appears {} times",
                    v.len()
                )));
            }
        }
        for e in self.explicit.keys() {
            if !occ.contains_key(e) {
                return Err(DiagramError::InconsistentPd(format!(
                    "orientation given for unknown edge {e}"
                )));
            }
        }
        Ok(())
    }

    pub fn crossings(&self) -> &[[Edge; 4]] {
        &self.crossings
    }

    pub fn free_ends(&self) -> &[Edge] {
        &self.free_ends
    }

    pub fn loops(&self) -> usize {
        self.loops
    }

    pub fn is_closed(&self) -> bool {
        self.free_ends.is_empty()
    }

    pub fn n_occurrences(&self) -> usize {
        4 * self.crossings.len() + self.free_ends.len()
    }

    pub fn occurrence_edge(&self, o: usize) -> Edge {
        let nc = 4 * self.crossings.len();
        if o < nc {
            self.crossings[o / 4][o % 4]
        } else {
            self.free_ends[o - nc]
        }
    }

    pub fn is_free_end(&self, o: usize) -> bool {
        o >= 4 * self.crossings.len()
    }

    /// Edge label to its two occurrence indices, in ascending order.
    pub fn edge_occurrences(&self) -> BTreeMap<Edge, Vec<usize>> {
        let mut occ: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
        for o in 0..self.n_occurrences() {
            occ.entry(self.occurrence_edge(o)).or_default().push(o);
        }
        occ
    }

    fn other_occurrence(&self, occ: &BTreeMap<Edge, Vec<usize>>, o: usize) -> usize {
        let v = &occ[&self.occurrence_edge(o)];
        if v[0] == o {
            v[1]
        } else {
            v[0]
        }
    }

    fn walks(&self) -> Vec<Walk> {
        let occ = self.edge_occurrences();
        let n = self.n_occurrences();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let nc = 4 * self.crossings.len();
        let starts: Vec<usize> = (nc..n).chain(0..nc).collect();
        for s in starts {
            if seen[s] {
                continue;
            }
            let open = self.is_free_end(s);
            let mut steps = Vec::new();
            let mut tail = s;
            loop {
                let head = self.other_occurrence(&occ, tail);
                seen[tail] = true;
                seen[head] = true;
                steps.push(Step {
                    tail,
                    head,
                    edge: self.occurrence_edge(tail),
                });
                if self.is_free_end(head) {
                    break;
                }
                let next = (head / 4) * 4 + (head % 4 + 2) % 4;
                if !open && next == s {
                    break;
                }
                tail = next;
            }
            out.push(Walk { steps, closed: !open });
        }
        out
    }

    /// Resolve strand directions; components that stay undetermined are flagged.
    pub fn orientation(&self) -> Result<Orientation, DiagramError> {
        let mut components = Vec::new();
        let mut edge_component = BTreeMap::new();
        let mut head = BTreeMap::new();
        for (ci, w) in self.walks().into_iter().enumerate() {
            let mut vote: Option<bool> = None;
            let mut cast = |v: bool, why: &str| -> Result<(), DiagramError> {
                match vote {
                    Some(prev) if prev != v => Err(DiagramError::InconsistentPd(format!(
                        "conflicting orientation on component {ci} ({why})"
                    ))),
                    _ => {
                        vote = Some(v);
                        Ok(())
                    }
                }
            };
            for st in &w.steps {
                for (o, arriving) in [(st.head, true), (st.tail, false)] {
                    if self.is_free_end(o) {
                        continue;
                    }
                    match o % 4 {
                        0 => cast(arriving, "under-strand slots")?,
                        2 => cast(!arriving, "under-strand slots")?,
                        _ => {}
                    }
                }
                if let Some(&flag) = self.explicit.get(&st.edge) {
                    cast((st.tail < st.head) == flag, "explicit flag")?;
                }
            }
            if vote.is_none() {
                let labels: Vec<Edge> = w.steps.iter().map(|s| s.edge).collect();
                let m = labels.len();
                let (mut up, mut down) = (0, 0);
                let pairs = if w.closed { m } else { m.saturating_sub(1) };
                for t in 0..pairs {
                    let (a, b) = (labels[t], labels[(t + 1) % m]);
                    if b == a + 1 {
                        up += 1;
                    } else if a == b + 1 {
                        down += 1;
                    }
                }
                if up != down {
                    vote = Some(up > down);
                }
            }
            let oriented = vote.is_some();
            let forward = vote.unwrap_or(true);
            let mut steps = w.steps.clone();
            if !forward {
                steps.reverse();
                for s in steps.iter_mut() {
                    std::mem::swap(&mut s.tail, &mut s.head);
                }
            }
            for s in &steps {
                edge_component.insert(s.edge, ci);
                if oriented {
                    head.insert(s.edge, s.head);
                }
            }
            components.push(Component {
                edges: steps.iter().map(|s| s.edge).collect(),
                closed: w.closed,
                oriented,
            });
        }
        Ok(Orientation {
            components,
            edge_component,
            head,
        })
    }

    /// Sign of crossing `c` (+1 when the over-strand runs `l -> j`), if oriented.
    pub fn crossing_sign(&self, o: &Orientation, c: usize) -> Option<i32> {
        let [_, j, _, l] = self.crossings[c];
        if o.head(l) == Some(4 * c + 3) {
            return Some(1);
        }
        if o.head(j) == Some(4 * c + 1) {
            return Some(-1);
        }
        None
    }

    pub fn writhe(&self) -> Result<i64, DiagramError> {
        let o = self.orientation()?;
        let mut w = 0;
        for c in 0..self.crossings.len() {
            w += self.crossing_sign(&o, c).ok_or_else(|| {
                DiagramError::Unoriented(format!(
                    "crossing {c} needs orientation data; add O(edge,+/-) lines"
                ))
            })? as i64;
        }
        Ok(w)
    }

    /// Half the signed count of crossings between two distinct components.
    pub fn linking_number(&self, comp_a: usize, comp_b: usize) -> Result<i64, DiagramError> {
        let o = self.orientation()?;
        let nc = o.components.len();
        if comp_a >= nc || comp_b >= nc || comp_a == comp_b {
            return Err(DiagramError::IndexOutOfRange(format!(
                "components {comp_a},{comp_b} of {nc}"
            )));
        }
        let mut total = 0i64;
        for (c, x) in self.crossings.iter().enumerate() {
            let under = o.component_of(x[0]);
            let over = o.component_of(x[1]);
            let pair = (under, over);
            if pair == (Some(comp_a), Some(comp_b)) || pair == (Some(comp_b), Some(comp_a)) {
                total += self.crossing_sign(&o, c).ok_or_else(|| {
                    DiagramError::Unoriented(format!("crossing {c} between components is unoriented"))
                })? as i64;
            }
        }
        Ok(total / 2)
    }

    /// Endpoint connectivity with all crossing data forgotten, over free-end indices.
    pub fn connectome(&self) -> Pairing {
        let n = self.free_ends.len();
        let nc = 4 * self.crossings.len();
        let mut partner = vec![0; n];
        for w in self.walks() {
            if w.closed {
                continue;
            }
            let a = w.steps[0].tail - nc;
            let b = w.steps.last().unwrap().head - nc;
            partner[a] = b;
            partner[b] = a;
        }
        Pairing::new(partner).expect("open strands pair up free ends")
    }

    /// Mirror image: every crossing has its over and under strands swapped.
    pub fn mirror(&self) -> Result<Self, DiagramError> {
        let o = self.orientation().ok();
        // New slot s holds old slot (s + rot) % 4.
        let rots: Vec<usize> = (0..self.crossings.len())
            .map(|c| {
                let j_to_l = o.as_ref().and_then(|o| self.crossing_sign(o, c)) == Some(-1);
                if j_to_l {
                    1
                } else {
                    3
                }
            })
            .collect();
        let crossings = self
            .crossings
            .iter()
            .zip(&rots)
            .map(|(x, &r)| std::array::from_fn(|s| x[(s + r) % 4]))
            .collect();
        let mut out = Self {
            crossings,
            free_ends: self.free_ends.clone(),
            loops: self.loops,
            explicit: BTreeMap::new(),
        };
        if let Some(o) = o {
            let nc = 4 * self.crossings.len();
            let occ = out.edge_occurrences();
            for (&e, &h) in &o.head {
                let nh = if h >= nc {
                    h
                } else {
                    4 * (h / 4) + (h % 4 + 4 - rots[h / 4]) % 4
                };
                out.explicit.insert(e, occ[&e][1] == nh);
            }
        }
        out.validate()?;
        Ok(out)
    }

    /// Build a tangle from a braid word and a closure recipe.
    ///
    /// Strands run upward and letters stack bottom to top. Positive letters are
    /// positive crossings when both strands point up.
    pub fn from_braid(w: &BraidWord, closure: &BraidClosure) -> Result<Self, DiagramError> {
        let n = w.strands();
        let mut next: Edge = 1;
        let bottom: Vec<Edge> = (0..n)
            .map(|_| {
                next += 1;
                next - 1
            })
            .collect();
        let mut cur = bottom.clone();
        let mut crossings = Vec::new();
        // (crossing, slot) is an outgoing slot for upward strands.
        let mut outgoing: BTreeSet<(usize, usize)> = BTreeSet::new();
        for &g in w.letters() {
            let i = g.unsigned_abs() as usize - 1;
            let (in_i, in_j) = (cur[i], cur[i + 1]);
            let (out_i, out_j) = (next, next + 1);
            next += 2;
            let c = crossings.len();
            if g > 0 {
                crossings.push([in_j, out_j, out_i, in_i]);
                outgoing.extend([(c, 1), (c, 2)]);
            } else {
                crossings.push([in_i, in_j, out_j, out_i]);
                outgoing.extend([(c, 2), (c, 3)]);
            }
            cur[i] = out_i;
            cur[i + 1] = out_j;
        }
        let top = cur;

        let mut uf = UnionFind::default();
        let mut free_ends = Vec::new();
        let (caps_bottom, caps_top) = match closure {
            BraidClosure::Trace => {
                for i in 0..n {
                    uf.union(top[i], bottom[i]);
                }
                (Some(Vec::new()), Some(Vec::new()))
            }
            BraidClosure::Plat => {
                if n % 2 == 1 {
                    return Err(DiagramError::OddStrands(n));
                }
                let caps: Vec<(usize, usize)> = (0..n / 2).map(|k| (2 * k, 2 * k + 1)).collect();
                (Some(caps.clone()), Some(caps))
            }
            BraidClosure::Caps { bottom, top } => (bottom.clone(), top.clone()),
        };
        let trace = matches!(closure, BraidClosure::Trace);
        if !trace {
            for (caps, labels) in [(&caps_bottom, &bottom), (&caps_top, &top)] {
                if let Some(caps) = caps {
                    let covered: BTreeSet<usize> = caps.iter().flat_map(|&(p, q)| [p, q]).collect();
                    if covered.len() != n || caps.iter().any(|&(p, q)| p >= n || q >= n) {
                        return Err(DiagramError::InvalidMatching("caps must cover every strand once".into()));
                    }
                    for &(p, q) in caps {
                        uf.union(labels[p], labels[q]);
                    }
                }
            }
            if caps_bottom.is_none() {
                free_ends.extend(bottom.iter().copied());
            }
            if caps_top.is_none() {
                free_ends.extend(top.iter().rev().copied());
            }
        }
        let relabel = |e: Edge, uf: &mut UnionFind| uf.find(e);
        let crossings: Vec<[Edge; 4]> = crossings
            .into_iter()
            .map(|x| x.map(|e| relabel(e, &mut uf)))
            .collect();
        let free_ends: Vec<Edge> = free_ends.into_iter().map(|e| relabel(e, &mut uf)).collect();
        let used: BTreeSet<Edge> = crossings.iter().flatten().chain(free_ends.iter()).copied().collect();
        let all: BTreeSet<Edge> = (1..next).map(|e| uf.find(e)).collect();
        let loops = all.difference(&used).count();

        let mut t = Self {
            crossings,
            free_ends,
            loops,
            explicit: BTreeMap::new(),
        };
        t.validate()?;
        if trace {
            let occ = t.edge_occurrences();
            for (e, v) in &occ {
                let tail_first = outgoing.contains(&(v[0] / 4, v[0] % 4));
                t.explicit.insert(*e, tail_first);
            }
        } else {
            t.orient_by_traversal()?;
        }
        Ok(t)
    }

    /// Rotate crossing tuples so slot 0 is incoming under the walk directions,
    /// then pin every edge direction explicitly.
    fn orient_by_traversal(&mut self) -> Result<(), DiagramError> {
        let walks = self.walks();
        let mut rotate = vec![false; self.crossings.len()];
        for w in &walks {
            for s in &w.steps {
                if !self.is_free_end(s.head) && s.head % 4 == 2 {
                    rotate[s.head / 4] = true;
                }
            }
        }
        let remap = |o: usize, nc: usize| -> usize {
            if o < nc && rotate[o / 4] {
                (o / 4) * 4 + (o % 4 + 2) % 4
            } else {
                o
            }
        };
        let nc = 4 * self.crossings.len();
        for (c, r) in rotate.iter().enumerate() {
            if *r {
                let [i, j, k, l] = self.crossings[c];
                self.crossings[c] = [k, l, i, j];
            }
        }
        self.explicit.clear();
        for w in &walks {
            for s in &w.steps {
                let (t, h) = (remap(s.tail, nc), remap(s.head, nc));
                self.explicit.insert(s.edge, t < h);
            }
        }
        Ok(())
    }
}

#[derive(Default)]
struct UnionFind {
    parent: BTreeMap<Edge, Edge>,
}

impl UnionFind {
    fn find(&mut self, e: Edge) -> Edge {
        let p = *self.parent.get(&e).unwrap_or(&e);
        if p == e {
            return e;
        }
        let r = self.find(p);
        self.parent.insert(e, r);
        r
    }

    fn union(&mut self, a: Edge, b: Edge) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent.insert(hi, lo);
        }
    }
}

impl FromStr for TangleDiagram {
    type Err = DiagramError;

    /// Parses PD text: `X(a,b,c,d)` crossings, `O(e,+)` orientation flags,
    /// `Loop()` free circles and `Ends(...)` boundary edges. Square brackets
    /// and a `PD[...]` wrapper are accepted; `#` starts a comment.
    fn from_str(s: &str) -> Result<Self, DiagramError> {
        let text: String = s
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .collect::<Vec<_>>()
            .join("\n");
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        let mut crossings = Vec::new();
        let mut free_ends = Vec::new();
        let mut loops = 0;
        let mut explicit = BTreeMap::new();
        let perr = |m: String| DiagramError::Parse(m);
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() || c == ',' || c == ']' || c == ';' {
                i += 1;
                continue;
            }
            if !c.is_ascii_alphabetic() {
                return Err(perr(format!("unexpected character '{c}'")));
            }
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let name: String = chars[start..i].iter().collect();
            while i < chars.len() && chars[i].is_whitespace() {
                i += 1;
            }
            if i >= chars.len() || !(chars[i] == '(' || chars[i] == '[') {
                return Err(perr(format!("expected '(' after {name}")));
            }
            let close = if chars[i] == '(' { ')' } else { ']' };
            i += 1;
            if name == "PD" {
                continue;
            }
            let arg_start = i;
            while i < chars.len() && chars[i] != close {
                i += 1;
            }
            if i >= chars.len() {
                return Err(perr(format!("unterminated {name}")));
            }
            let args: Vec<String> = chars[arg_start..i]
                .iter()
                .collect::<String>()
                .split(',')
                .map(|a| a.trim().to_string())
                .filter(|a| !a.is_empty())
                .collect();
            i += 1;
            let int = |a: &str| a.parse::<Edge>().map_err(|_| perr(format!("bad edge label '{a}'")));
            match name.as_str() {
                "X" => {
                    if args.len() != 4 {
                        return Err(perr(format!("crossing needs 4 labels, got {}", args.len())));
                    }
                    crossings.push([int(&args[0])?, int(&args[1])?, int(&args[2])?, int(&args[3])?]);
                }
                "O" => {
                    if args.len() != 2 {
                        return Err(perr("orientation line needs O(edge,+/-)".into()));
                    }
                    let flag = match args[1].as_str() {
                        "+" => true,
                        "-" => false,
                        other => return Err(perr(format!("orientation sign '{other}'"))),
                    };
                    explicit.insert(int(&args[0])?, flag);
                }
                "Loop" => loops += 1,
                "Ends" => {
                    for a in &args {
                        free_ends.push(int(a)?);
                    }
                }
                other => return Err(perr(format!("unknown item '{other}'"))),
            }
        }
        Self::new(crossings, free_ends, loops, explicit)
    }
}

impl fmt::Display for TangleDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for [a, b, c, d] in &self.crossings {
            writeln!(f, "X({a},{b},{c},{d})")?;
        }
        for (e, fl) in &self.explicit {
            writeln!(f, "O({e},{})", if *fl { '+' } else { '-' })?;
        }
        for _ in 0..self.loops {
            writeln!(f, "Loop()")?;
        }
        if !self.free_ends.is_empty() {
            let ends: Vec<String> = self.free_ends.iter().map(|e| e.to_string()).collect();
            writeln!(f, "Ends({})", ends.join(","))?;
        }
        Ok(())
    }
}

/// Forget over/under data and return the endpoint connectivity.
pub fn connectome_of(t: &TangleDiagram) -> Pairing {
    t.connectome()
}
