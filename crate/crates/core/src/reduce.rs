//! Reduction of acyclic K-graphs to a single vertex.
//!
//! Each vertex carries an expression `E(x)`; every rule rewrites the graph
//! and the expressions so that the series of the graph is unchanged. A
//! graph that reduces to its root is the Glushkov K-graph of `E(s_I)`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::expr::KExpr;
use crate::graph::{boundary_sets_acyclic, KGraph, Vertex};
use crate::semiring::{Boolean, Semiring, Side};

/// One rule application with the constants it extracted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleApplication<K> {
    Kr1 {
        x: Vertex,
        y: Vertex,
        k: K,
    },
    Kr2 {
        x: Vertex,
        y: Vertex,
        lx: K,
        rx: K,
        ly: K,
        ry: K,
    },
    Kr3 {
        x: Vertex,
        quasi: bool,
        l: K,
        r: K,
        k: K,
        gammas: Vec<(Vertex, Vertex, K)>,
    },
    /// Boolean rule with the "no other ε" side condition.
    R3Bool {
        x: Vertex,
        deleted: Vec<(Vertex, Vertex)>,
        retained: Vec<(Vertex, Vertex)>,
    },
}

impl<K: Semiring> RuleApplication<K> {
    pub fn name(&self) -> &'static str {
        match self {
            RuleApplication::Kr1 { .. } => "KR1",
            RuleApplication::Kr2 { .. } => "KR2",
            RuleApplication::Kr3 { quasi: false, .. } => "KR3eps",
            RuleApplication::Kr3 { quasi: true, .. } => "KR3quasi",
            RuleApplication::R3Bool { .. } => "R3bool",
        }
    }
}

impl<K: Semiring> fmt::Display for RuleApplication<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleApplication::Kr1 { x, y, k } => write!(f, "KR1 x={x} y={y} k={k}"),
            RuleApplication::Kr2 { x, y, lx, rx, ly, ry } => {
                write!(f, "KR2 x={x} y={y} lx={lx} rx={rx} ly={ly} ry={ry}")
            }
            RuleApplication::Kr3 { x, quasi, l, r, k, gammas } => {
                let kind = if *quasi { "quasi" } else { "eps" };
                write!(f, "KR3 {kind} x={x} l={l} r={r} k={k}")?;
                for (p, q, g) in gammas {
                    write!(f, " gamma({p},{q})={g}")?;
                }
                Ok(())
            }
            RuleApplication::R3Bool { x, deleted, retained } => {
                write!(f, "R3 x={x} deleted={deleted:?} retained={retained:?}")
            }
        }
    }
}

/// Order in which the driver tries candidate rule applications.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScanOrder {
    /// KR1 pairs, then KR2 pairs, then KR3 vertices, by ascending ids.
    #[default]
    Canonical,
    /// All candidates shuffled afresh before every step.
    Shuffled(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Candidate {
    Kr1(Vertex, Vertex),
    Kr3(Vertex),
    Kr2(Vertex, Vertex),
}

/// A graph being reduced, with `E(x)` for each vertex and the rule log.
#[derive(Debug, Clone)]
pub struct ReductionState<K> {
    pub graph: KGraph<K>,
    pub exprs: BTreeMap<Vertex, KExpr<K>>,
    pub log: Vec<RuleApplication<K>>,
}

/// Successful reduction.
#[derive(Debug, Clone)]
pub struct Reduced<K> {
    pub expr: KExpr<K>,
    pub log: Vec<RuleApplication<K>>,
}

/// The driver found no applicable rule before reaching a single vertex.
#[derive(Debug, Clone)]
pub struct Stuck<K> {
    pub state: Box<ReductionState<K>>,
    pub step_limit_hit: bool,
}

impl<K: Semiring> Stuck<K> {
    pub fn summary(&self) -> String {
        let g = &self.state.graph;
        let edges: Vec<String> = g.edges().map(|(p, q, k)| format!("({p},{q})={k}")).collect();
        format!(
            "{} vertices left, edges [{}]{}",
            g.vertex_count(),
            edges.join(", "),
            if self.step_limit_hit { ", step limit reached" } else { "" }
        )
    }
}

fn solve_middle<K: Semiring>(u: &K, alpha: &K, beta: &K) -> Option<K> {
    let y = K::try_divide(Side::Left, u, alpha)?;
    K::try_divide(Side::Right, &y, beta)
}

impl<K: Semiring> ReductionState<K> {
    pub fn new(graph: KGraph<K>) -> Self {
        let exprs = graph.vertices().map(|v| (v, graph.initial_expr(v))).collect();
        ReductionState {
            graph,
            exprs,
            log: Vec::new(),
        }
    }

    fn internal(&self, v: Vertex) -> bool {
        v != self.graph.root() && v != self.graph.sink()
    }

    fn take_expr(&mut self, v: Vertex) -> KExpr<K> {
        self.exprs.remove(&v).expect("vertex expression")
    }

    /// Chain merge: `Q⁻(y) = {x}` and `Q⁺(x) = {y}`. The sink is only
    /// merged into the root, so the root and sink keep their roles.
    pub fn try_kr1(&mut self, x: Vertex, y: Vertex) -> bool {
        let g = &self.graph;
        if x == y || !g.contains(x) || !g.contains(y) || y == g.root() {
            return false;
        }
        if y == g.sink() && x != g.root() {
            return false;
        }
        let (succ, pred) = (g.succs(x), g.preds(y));
        if succ.len() != 1 || pred.len() != 1 || !succ.contains_key(&y) || !pred.contains_key(&x) {
            return false;
        }
        let k = g.weight(x, y);
        let out: Vec<(Vertex, K)> = g.succs(y).iter().map(|(q, w)| (*q, w.clone())).collect();
        if y == g.sink() {
            self.graph.remove_edge(x, y);
            self.graph.drop_sink();
        } else {
            self.graph.remove_vertex(y);
            for (q, w) in out {
                self.graph.set_edge(x, q, w);
            }
        }
        let ey = self.take_expr(y);
        let ex = self.take_expr(x);
        self.exprs.insert(x, KExpr::cat(ex, KExpr::lmul(k.clone(), ey)));
        self.log.push(RuleApplication::Kr1 { x, y, k });
        true
    }

    /// Parallel merge of two vertices with the same neighbourhoods, after
    /// normalizing incoming weights by a right gcd and outgoing weights by
    /// a left gcd.
    pub fn try_kr2(&mut self, x: Vertex, y: Vertex) -> bool {
        let g = &self.graph;
        if x == y || !g.contains(x) || !g.contains(y) || !self.internal(x) || !self.internal(y) {
            return false;
        }
        let (px, py) = (g.preds(x), g.preds(y));
        let (sx, sy) = (g.succs(x), g.succs(y));
        if px.is_empty()
            || sx.is_empty()
            || !px.keys().eq(py.keys())
            || !sx.keys().eq(sy.keys())
        {
            return false;
        }
        let in_x: Vec<K> = px.values().cloned().collect();
        let in_y: Vec<K> = py.values().cloned().collect();
        let lx = K::gcd(Side::Right, &in_x).expect("nonempty");
        let ly = K::gcd(Side::Right, &in_y).expect("nonempty");
        let mut alpha = Vec::with_capacity(in_x.len());
        for (ux, uy) in in_x.iter().zip(&in_y) {
            let Some(a) = K::try_divide(Side::Right, ux, &lx) else {
                return false;
            };
            if a.mul(&ly) != *uy {
                return false;
            }
            alpha.push(a);
        }
        let out_x: Vec<K> = sx.values().cloned().collect();
        let out_y: Vec<K> = sy.values().cloned().collect();
        let rx = K::gcd(Side::Left, &out_x).expect("nonempty");
        let ry = K::gcd(Side::Left, &out_y).expect("nonempty");
        let mut beta = Vec::with_capacity(out_x.len());
        for (ux, uy) in out_x.iter().zip(&out_y) {
            let Some(b) = K::try_divide(Side::Left, ux, &rx) else {
                return false;
            };
            if ry.mul(&b) != *uy {
                return false;
            }
            beta.push(b);
        }
        let preds: Vec<Vertex> = px.keys().copied().collect();
        let succs: Vec<Vertex> = sx.keys().copied().collect();
        self.graph.remove_vertex(y);
        for (p, a) in preds.into_iter().zip(alpha) {
            self.graph.set_edge(p, x, a);
        }
        for (q, b) in succs.into_iter().zip(beta) {
            self.graph.set_edge(x, q, b);
        }
        let ey = self.take_expr(y);
        let ex = self.take_expr(x);
        let e = KExpr::sum(
            KExpr::lmul(lx.clone(), KExpr::rmul(ex, rx.clone())),
            KExpr::lmul(ly.clone(), KExpr::rmul(ey, ry.clone())),
        );
        self.exprs.insert(x, e);
        self.log.push(RuleApplication::Kr2 { x, y, lx, rx, ly, ry });
        true
    }

    /// ε-vertex elimination, in its ε-equivalent or quasi-ε-equivalent form.
    pub fn try_kr3(&mut self, x: Vertex) -> bool {
        let g = &self.graph;
        if !g.contains(x) || !self.internal(x) {
            return false;
        }
        let qm: Vec<Vertex> = g.preds(x).keys().copied().collect();
        let qp: Vec<Vertex> = g.succs(x).keys().copied().collect();
        if qm.is_empty() || qp.is_empty() || g.has_edge(x, x) {
            return false;
        }

        // graphical conditions
        let bt = boundary_sets_acyclic(g, x);
        let quasi = bt.beginnings.len() != qm.len() || bt.terminations.len() != qp.len();
        let in_bt = |p: &Vertex, q: &Vertex| bt.beginnings.contains(p) && bt.terminations.contains(q);
        let eligible = |p: &Vertex, q: &Vertex| !quasi || !in_bt(p, q);
        for p in &qm {
            for q in &qp {
                if eligible(p, q) && !g.has_edge(*p, *q) {
                    return false;
                }
            }
        }

        // numerical conditions
        let incoming: Vec<K> = qm.iter().map(|p| g.weight(*p, x)).collect();
        let outgoing: Vec<K> = qp.iter().map(|q| g.weight(x, *q)).collect();
        let l = K::gcd(Side::Right, &incoming).expect("nonempty");
        let r = K::gcd(Side::Left, &outgoing).expect("nonempty");
        let mut alpha = BTreeMap::new();
        for (p, u) in qm.iter().zip(&incoming) {
            match K::try_divide(Side::Right, u, &l) {
                Some(a) => alpha.insert(*p, a),
                None => return false,
            };
        }
        let mut beta = BTreeMap::new();
        for (q, u) in qp.iter().zip(&outgoing) {
            match K::try_divide(Side::Left, u, &r) {
                Some(b) => beta.insert(*q, b),
                None => return false,
            };
        }
        // the reference pair is the smallest eligible one; every other
        // eligible pair must give the same k
        let mut k: Option<K> = None;
        for p in &qm {
            for q in &qp {
                if !eligible(p, q) {
                    continue;
                }
                let Some(kpq) = solve_middle(&g.weight(*p, *q), &alpha[p], &beta[q]) else {
                    return false;
                };
                match &k {
                    None => k = Some(kpq),
                    Some(k1) if *k1 != kpq => return false,
                    Some(_) => {}
                }
            }
        }
        let k = k.expect("eligible pair exists");
        let mut gammas = Vec::new();
        if quasi {
            for p in &bt.beginnings {
                for q in &bt.terminations {
                    let v = alpha[p].mul(&k).mul(&beta[q]);
                    match K::try_complement(&g.weight(*p, *q), &v) {
                        Some(gm) => gammas.push((*p, *q, gm)),
                        None => return false,
                    }
                }
            }
        }

        // rewrite
        for (p, a) in &alpha {
            self.graph.set_edge(*p, x, a.clone());
        }
        for (q, b) in &beta {
            self.graph.set_edge(x, *q, b.clone());
        }
        for p in &qm {
            for q in &qp {
                if eligible(p, q) {
                    self.graph.remove_edge(*p, *q);
                }
            }
        }
        for (p, q, gm) in &gammas {
            self.graph.set_edge(*p, *q, gm.clone());
        }
        let ex = self.take_expr(x);
        let e = KExpr::sum(
            KExpr::lmul(l.clone(), KExpr::rmul(ex, r.clone())),
            KExpr::lmul(k.clone(), KExpr::Eps),
        );
        self.exprs.insert(x, e);
        self.log.push(RuleApplication::Kr3 {
            x,
            quasi,
            l,
            r,
            k,
            gammas,
        });
        true
    }

    fn candidates(&self, order: ScanOrder, rng: Option<&mut ChaCha8Rng>) -> Vec<Candidate> {
        let g = &self.graph;
        let vs: Vec<Vertex> = g.vertices().collect();
        let internal: Vec<Vertex> = vs.iter().copied().filter(|v| self.internal(*v)).collect();
        let mut out = Vec::new();
        for &x in &vs {
            let s = g.succs(x);
            if s.len() == 1 {
                out.push(Candidate::Kr1(x, *s.keys().next().expect("one")));
            }
        }
        for (i, &x) in internal.iter().enumerate() {
            for &y in &internal[i + 1..] {
                if g.preds(x).keys().eq(g.preds(y).keys()) && g.succs(x).keys().eq(g.succs(y).keys()) {
                    out.push(Candidate::Kr2(x, y));
                    if order != ScanOrder::Canonical {
                        out.push(Candidate::Kr2(y, x));
                    }
                }
            }
        }
        out.extend(internal.iter().map(|&x| Candidate::Kr3(x)));
        if let Some(rng) = rng {
            out.shuffle(rng);
        }
        out
    }

    fn apply(&mut self, c: Candidate) -> bool {
        match c {
            Candidate::Kr1(x, y) => self.try_kr1(x, y),
            Candidate::Kr3(x) => self.try_kr3(x),
            Candidate::Kr2(x, y) => self.try_kr2(x, y),
        }
    }

    fn key(&self) -> String {
        let g = &self.graph;
        let vs: Vec<Vertex> = g.vertices().collect();
        let es: Vec<String> = g.edges().map(|(p, q, k)| format!("{p}>{q}:{k}")).collect();
        format!("{vs:?}{es:?}")
    }

    /// Applies rules until the graph is a single vertex. Candidates are
    /// tried in scan order; a dead end backtracks to the last choice, since
    /// two KR3 applications sharing a fully consumed cross edge need not
    /// commute. `budget` bounds the total number of rule applications.
    pub fn run(self, order: ScanOrder) -> Result<Reduced<K>, Stuck<K>> {
        let size = self.graph.vertex_count() + self.graph.edge_count();
        let mut search = Search {
            order,
            rng: match order {
                ScanOrder::Canonical => None,
                ScanOrder::Shuffled(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            },
            budget: 100 + 8 * size * size,
            seen: HashSet::new(),
            dead_end: None,
        };
        let start = self.clone();
        match search.explore(self) {
            Some(mut done) => {
                let root = done.graph.root();
                let expr = done.exprs.remove(&root).expect("root expression");
                Ok(Reduced { expr, log: done.log })
            }
            None => Err(Stuck {
                state: Box::new(search.dead_end.unwrap_or(start)),
                step_limit_hit: search.budget == 0,
            }),
        }
    }
}

struct Search<K> {
    order: ScanOrder,
    rng: Option<ChaCha8Rng>,
    budget: usize,
    seen: HashSet<String>,
    /// First state without any applicable rule.
    dead_end: Option<ReductionState<K>>,
}

impl<K: Semiring> Search<K> {
    fn explore(&mut self, st: ReductionState<K>) -> Option<ReductionState<K>> {
        if st.graph.vertex_count() == 1 {
            return Some(st);
        }
        if !self.seen.insert(st.key()) {
            return None;
        }
        let mut moved = false;
        // the try_* methods leave the state untouched when they fail
        let mut scratch: Option<ReductionState<K>> = None;
        for c in st.candidates(self.order, self.rng.as_mut()) {
            if self.budget == 0 {
                return None;
            }
            let mut next = scratch.take().unwrap_or_else(|| st.clone());
            if next.apply(c) {
                moved = true;
                self.budget -= 1;
                if let Some(done) = self.explore(next) {
                    return Some(done);
                }
            } else {
                scratch = Some(next);
            }
        }
        if !moved && self.dead_end.is_none() {
            self.dead_end = Some(st);
        }
        None
    }
}

/// Reduces an acyclic K-graph with the K-rules.
pub fn reduce_acyclic<K: Semiring>(g: KGraph<K>, order: ScanOrder) -> Result<Reduced<K>, Stuck<K>> {
    ReductionState::new(g).run(order)
}

/// True when the log ends with a merge into the root followed by the merge
/// of the sink into the root.
pub fn ends_with_root_merges<K: Semiring>(log: &[RuleApplication<K>], root: Vertex, sink: Vertex) -> bool {
    match log {
        [.., RuleApplication::Kr1 { x: x1, y: y1, .. }, RuleApplication::Kr1 { x: x2, y: y2, .. }] => {
            *x1 == root && *y1 != sink && *x2 == root && *y2 == sink
        }
        _ => false,
    }
}

impl ReductionState<Boolean> {
    /// Boolean rule R₃ with the side condition protecting an edge that
    /// also stands for the empty word of another, independent vertex.
    ///
    /// Applies when every predecessor of `x` reaches all successors of `x`
    /// directly. Deletes each `(q⁻, q⁺)` unless some `z ≠ x`, incomparable
    /// with `x`, has `q⁻ → z → q⁺` and `|Q⁻(z)|·|Q⁺(z)| ≠ 1`. At least one
    /// edge must go, otherwise the rule does not apply.
    pub fn try_r3_corrected(&mut self, x: Vertex) -> bool {
        let g = &self.graph;
        if !g.contains(x) || !self.internal(x) {
            return false;
        }
        let qm = g.pred_set(x);
        let qp = g.succ_set(x);
        if qm.is_empty() || qp.is_empty() {
            return false;
        }
        if !qm.iter().all(|y| qp.iter().all(|q| g.has_edge(*y, *q))) {
            return false;
        }
        let below = g.descendants(x);
        let above = g.ancestors(x);
        let others: Vec<Vertex> = g
            .vertices()
            .filter(|z| *z != x && !below.contains(z) && !above.contains(z))
            .filter(|z| g.preds(*z).len() * g.succs(*z).len() != 1)
            .collect();
        let mut deleted = Vec::new();
        let mut retained = Vec::new();
        for &p in &qm {
            for &q in &qp {
                let protected = others
                    .iter()
                    .any(|&z| g.has_edge(p, z) && g.has_edge(z, q));
                if protected {
                    retained.push((p, q));
                } else {
                    deleted.push((p, q));
                }
            }
        }
        if deleted.is_empty() {
            return false;
        }
        for (p, q) in &deleted {
            self.graph.remove_edge(*p, *q);
        }
        let ex = self.take_expr(x);
        self.exprs.insert(x, KExpr::sum(ex, KExpr::Eps));
        self.log.push(RuleApplication::R3Bool {
            x,
            deleted,
            retained,
        });
        true
    }

    fn run_boolean(mut self) -> Result<Reduced<Boolean>, Stuck<Boolean>> {
        let size = self.graph.vertex_count() + self.graph.edge_count();
        for _ in 0..100 + 8 * size * size {
            if self.graph.vertex_count() == 1 {
                let root = self.graph.root();
                let expr = self.exprs.remove(&root).expect("root expression");
                return Ok(Reduced {
                    expr,
                    log: self.log,
                });
            }
            let vs: Vec<Vertex> = self.graph.vertices().collect();
            let applied = vs.iter().any(|&x| {
                let y = match self.graph.succs(x).keys().collect::<Vec<_>>().as_slice() {
                    [y] => Some(**y),
                    _ => None,
                };
                y.is_some_and(|y| self.try_kr1(x, y))
            }) || vs
                .iter()
                .any(|&x| vs.iter().any(|&y| x < y && self.try_kr2(x, y)))
                || vs.iter().any(|&x| self.try_r3_corrected(x));
            if !applied {
                return Err(Stuck {
                    state: Box::new(self),
                    step_limit_hit: false,
                });
            }
        }
        Err(Stuck {
            state: Box::new(self),
            step_limit_hit: true,
        })
    }
}

/// Reduces an acyclic boolean graph with R₁, R₂ and the corrected R₃.
/// Over the booleans KR1 and KR2 coincide with R₁ and R₂.
pub fn reduce_boolean(g: KGraph<Boolean>) -> Result<Reduced<Boolean>, Stuck<Boolean>> {
    ReductionState::new(g).run_boolean()
}

/// Vertices whose `E(x)` is still a single letter.
pub fn untouched_vertices<K: Semiring>(st: &ReductionState<K>) -> BTreeSet<Vertex> {
    st.exprs
        .iter()
        .filter(|(_, e)| matches!(e, KExpr::Letter(_)))
        .map(|(v, _)| *v)
        .collect()
}
