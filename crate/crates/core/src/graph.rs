//! K-graphs and their structural analyses: hammock test, maximal orbits,
//! boolean stability and transversality, the graph without orbit, and
//! beginnings/terminations of predecessor and successor sets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::expr::{render_expr, KExpr};
use crate::semiring::Semiring;

pub type Vertex = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VertexLabel<K> {
    Letter(char),
    /// A vertex standing for a collapsed orbit.
    Expr(KExpr<K>),
    /// A state that no transition enters. Such a graph is never a hammock.
    Unlabeled,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("state {state} is entered by both `{}` and `{}`", letters.0, letters.1)]
    NotHomogeneous { state: usize, letters: (char, char) },
    #[error("expected exactly one initial state, found {0:?}")]
    NoUniqueRoot(Vec<usize>),
    #[error("initial state {0} has an incoming transition")]
    RootHasPredecessor(usize),
    #[error("graph has a cycle")]
    Cyclic,
}

/// Weighted digraph with a root `s_I` and a sink `Φ`. Absent edges weigh
/// `0̄`; setting an edge to `0̄` removes it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KGraph<K> {
    root: Vertex,
    sink: Vertex,
    labels: BTreeMap<Vertex, VertexLabel<K>>,
    succ: BTreeMap<Vertex, BTreeMap<Vertex, K>>,
    pred: BTreeMap<Vertex, BTreeMap<Vertex, K>>,
}

impl<K: Semiring> KGraph<K> {
    pub fn new(root: Vertex, sink: Vertex) -> Self {
        assert_ne!(root, sink);
        let mut g = KGraph {
            root,
            sink,
            labels: BTreeMap::new(),
            succ: BTreeMap::new(),
            pred: BTreeMap::new(),
        };
        for v in [root, sink] {
            g.succ.insert(v, BTreeMap::new());
            g.pred.insert(v, BTreeMap::new());
        }
        g
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn sink(&self) -> Vertex {
        self.sink
    }

    pub fn add_vertex(&mut self, v: Vertex, label: VertexLabel<K>) {
        self.succ.entry(v).or_default();
        self.pred.entry(v).or_default();
        if v != self.root && v != self.sink {
            self.labels.insert(v, label);
        }
    }

    pub fn remove_vertex(&mut self, v: Vertex) {
        assert!(v != self.root && v != self.sink, "cannot remove root or sink");
        if let Some(out) = self.succ.remove(&v) {
            for q in out.keys() {
                self.pred.get_mut(q).map(|m| m.remove(&v));
            }
        }
        if let Some(inc) = self.pred.remove(&v) {
            for p in inc.keys() {
                self.succ.get_mut(p).map(|m| m.remove(&v));
            }
        }
        self.labels.remove(&v);
    }

    /// Removes an isolated sink; used when the sink is merged into the root.
    pub(crate) fn drop_sink(&mut self) {
        let s = self.sink;
        assert!(self.succ[&s].is_empty() && self.pred[&s].is_empty(), "sink still connected");
        self.succ.remove(&s);
        self.pred.remove(&s);
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.succ.contains_key(&v)
    }

    pub fn label(&self, v: Vertex) -> Option<&VertexLabel<K>> {
        self.labels.get(&v)
    }

    pub fn set_label(&mut self, v: Vertex, label: VertexLabel<K>) {
        assert!(self.contains(v));
        self.labels.insert(v, label);
    }

    /// `E(x)` before any reduction: the letter, the collapsed expression,
    /// or `ε` for the root and the sink.
    pub fn initial_expr(&self, v: Vertex) -> KExpr<K> {
        match self.labels.get(&v) {
            Some(VertexLabel::Letter(c)) => KExpr::Letter(*c),
            Some(VertexLabel::Expr(e)) => e.clone(),
            Some(VertexLabel::Unlabeled) => KExpr::Empty,
            None => KExpr::Eps,
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.succ.keys().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.succ.len()
    }

    pub fn max_vertex(&self) -> Vertex {
        *self.succ.keys().next_back().expect("nonempty")
    }

    pub fn set_edge(&mut self, p: Vertex, q: Vertex, k: K) {
        assert!(self.contains(p) && self.contains(q), "edge ({p}, {q}) between unknown vertices");
        if k.is_zero() {
            self.succ.get_mut(&p).map(|m| m.remove(&q));
            self.pred.get_mut(&q).map(|m| m.remove(&p));
        } else {
            self.succ.get_mut(&p).expect("vertex").insert(q, k.clone());
            self.pred.get_mut(&q).expect("vertex").insert(p, k);
        }
    }

    pub fn remove_edge(&mut self, p: Vertex, q: Vertex) {
        self.set_edge(p, q, K::zero());
    }

    pub fn weight(&self, p: Vertex, q: Vertex) -> K {
        self.succ
            .get(&p)
            .and_then(|m| m.get(&q))
            .cloned()
            .unwrap_or_else(K::zero)
    }

    pub fn has_edge(&self, p: Vertex, q: Vertex) -> bool {
        self.succ.get(&p).is_some_and(|m| m.contains_key(&q))
    }

    /// `Q⁺(v)` with weights.
    pub fn succs(&self, v: Vertex) -> &BTreeMap<Vertex, K> {
        &self.succ[&v]
    }

    /// `Q⁻(v)` with weights.
    pub fn preds(&self, v: Vertex) -> &BTreeMap<Vertex, K> {
        &self.pred[&v]
    }

    pub fn succ_set(&self, v: Vertex) -> BTreeSet<Vertex> {
        self.succ[&v].keys().copied().collect()
    }

    pub fn pred_set(&self, v: Vertex) -> BTreeSet<Vertex> {
        self.pred[&v].keys().copied().collect()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex, &K)> + '_ {
        self.succ
            .iter()
            .flat_map(|(p, m)| m.iter().map(move |(q, k)| (*p, *q, k)))
    }

    pub fn edge_count(&self) -> usize {
        self.succ.values().map(BTreeMap::len).sum()
    }

    /// Vertices reachable from `v` by a path of length at least one.
    pub fn descendants(&self, v: Vertex) -> BTreeSet<Vertex> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<Vertex> = self.succ[&v].keys().copied().collect();
        while let Some(x) = stack.pop() {
            if seen.insert(x) {
                stack.extend(self.succ[&x].keys().copied());
            }
        }
        seen
    }

    /// Vertices from which `v` is reachable by a path of length at least one.
    pub fn ancestors(&self, v: Vertex) -> BTreeSet<Vertex> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<Vertex> = self.pred[&v].keys().copied().collect();
        while let Some(x) = stack.pop() {
            if seen.insert(x) {
                stack.extend(self.pred[&x].keys().copied());
            }
        }
        seen
    }

    pub fn has_path(&self, from: Vertex, to: Vertex) -> bool {
        self.descendants(from).contains(&to)
    }

    pub fn is_acyclic(&self) -> bool {
        self.sccs().iter().all(|c| c.len() == 1 && !self.has_edge(c[0], c[0]))
    }

    /// Strongly connected components (iterative Tarjan), each sorted, in
    /// ascending order of their smallest vertex.
    pub fn sccs(&self) -> Vec<Vec<Vertex>> {
        let ids: Vec<Vertex> = self.vertices().collect();
        let idx: BTreeMap<Vertex, usize> = ids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let adj: Vec<Vec<usize>> = ids
            .iter()
            .map(|v| self.succ[v].keys().map(|q| idx[q]).collect())
            .collect();
        let n = ids.len();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut counter = 0;
        let mut out = Vec::new();
        for start in 0..n {
            if index[start] != usize::MAX {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(start, 0)];
            index[start] = counter;
            low[start] = counter;
            counter += 1;
            stack.push(start);
            on_stack[start] = true;
            while let Some(&mut (v, ref mut next)) = call.last_mut() {
                if *next < adj[v].len() {
                    let w = adj[v][*next];
                    *next += 1;
                    if index[w] == usize::MAX {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().expect("tarjan stack");
                            on_stack[w] = false;
                            comp.push(ids[w]);
                            if w == v {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        out.push(comp);
                    }
                }
            }
        }
        out.sort_by_key(|c| c[0]);
        out
    }

    /// Subgraph induced by `keep`, with a new root and sink.
    pub fn induced(&self, keep: &BTreeSet<Vertex>, root: Vertex, sink: Vertex) -> KGraph<K> {
        let mut g = KGraph::new(root, sink);
        for &v in keep {
            let label = self.labels.get(&v).cloned().unwrap_or(VertexLabel::Unlabeled);
            g.add_vertex(v, label);
        }
        for (p, q, k) in self.edges() {
            if keep.contains(&p) && keep.contains(&q) {
                g.set_edge(p, q, k.clone());
            }
        }
        g
    }

    /// Graphviz rendering: vertices as `id:letter`, edges labelled by weight.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph kgraph {\n  rankdir=LR;\n");
        for v in self.vertices() {
            let name = if v == self.root {
                format!("{v}:s_I")
            } else if v == self.sink {
                format!("{v}:Phi")
            } else {
                match &self.labels[&v] {
                    VertexLabel::Letter(c) => format!("{v}:{c}"),
                    VertexLabel::Expr(e) => format!("{v}:{}", render_expr(e)),
                    VertexLabel::Unlabeled => format!("{v}:?"),
                }
            };
            let _ = writeln!(s, "  {v} [label=\"{}\"];", name.replace('"', "\\\""));
        }
        for (p, q, k) in self.edges() {
            let _ = writeln!(s, "  {p} -> {q} [label=\"{k}\"];");
        }
        s.push_str("}\n");
        s
    }
}

/// Result of the hammock test, with a vertex violating it when negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HammockVerdict {
    pub hammock: bool,
    pub witness: Option<Vertex>,
}

/// Every vertex lies on a root-to-sink path, the root has no predecessor
/// and the sink no successor.
///
/// On a finite graph with a distinguished root and sink this is the same
/// as asking for a path from the root to the sink through every vertex
/// and no nontrivial path from the sink or to the root: a path into the
/// root would put the root on a cycle through some other vertex, hence a
/// nontrivial path from that vertex to the root.
pub fn is_hammock<K: Semiring>(g: &KGraph<K>) -> HammockVerdict {
    let bad = |w| HammockVerdict {
        hammock: false,
        witness: Some(w),
    };
    if !g.preds(g.root()).is_empty() {
        return bad(g.root());
    }
    if !g.succs(g.sink()).is_empty() {
        return bad(g.sink());
    }
    let from_root = g.descendants(g.root());
    let to_sink = g.ancestors(g.sink());
    for v in g.vertices() {
        if v != g.root() && !from_root.contains(&v) {
            return bad(v);
        }
        if v != g.sink() && !to_sink.contains(&v) {
            return bad(v);
        }
    }
    HammockVerdict {
        hammock: true,
        witness: None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    pub vertices: BTreeSet<Vertex>,
    /// `In(O)`: orbit vertices with a predecessor outside.
    pub inputs: BTreeSet<Vertex>,
    /// `Out(O)`: orbit vertices with a successor outside.
    pub outputs: BTreeSet<Vertex>,
    /// `O⁻`
    pub preds: BTreeSet<Vertex>,
    /// `O⁺`
    pub succs: BTreeSet<Vertex>,
}

impl Orbit {
    pub fn of<K: Semiring>(g: &KGraph<K>, vertices: BTreeSet<Vertex>) -> Orbit {
        let mut o = Orbit {
            vertices,
            inputs: BTreeSet::new(),
            outputs: BTreeSet::new(),
            preds: BTreeSet::new(),
            succs: BTreeSet::new(),
        };
        for &x in &o.vertices {
            for p in g.preds(x).keys() {
                if !o.vertices.contains(p) {
                    o.preds.insert(*p);
                    o.inputs.insert(x);
                }
            }
            for q in g.succs(x).keys() {
                if !o.vertices.contains(q) {
                    o.succs.insert(*q);
                    o.outputs.insert(x);
                }
            }
        }
        o
    }

    /// `O⁻(x)`
    pub fn preds_of<K: Semiring>(&self, g: &KGraph<K>, x: Vertex) -> BTreeSet<Vertex> {
        g.preds(x).keys().filter(|p| !self.vertices.contains(p)).copied().collect()
    }

    /// `O⁺(x)`
    pub fn succs_of<K: Semiring>(&self, g: &KGraph<K>, x: Vertex) -> BTreeSet<Vertex> {
        g.succs(x).keys().filter(|q| !self.vertices.contains(q)).copied().collect()
    }

    pub fn ids(&self) -> Vec<Vertex> {
        self.vertices.iter().copied().collect()
    }
}

/// Strongly connected components with at least one edge, ordered by
/// smallest vertex.
pub fn maximal_orbits<K: Semiring>(g: &KGraph<K>) -> Vec<Orbit> {
    g.sccs()
        .into_iter()
        .filter(|c| c.len() > 1 || g.has_edge(c[0], c[0]))
        .map(|c| Orbit::of(g, c.into_iter().collect()))
        .collect()
}

/// `(stable, transverse)` at the boolean level.
pub fn boolean_stability_transversality<K: Semiring>(g: &KGraph<K>, o: &Orbit) -> (bool, bool) {
    let stable = o
        .outputs
        .iter()
        .all(|&s| o.inputs.iter().all(|&e| g.has_edge(s, e)));
    let same = |sets: Vec<BTreeSet<Vertex>>| sets.windows(2).all(|w| w[0] == w[1]);
    let transverse = same(o.outputs.iter().map(|&x| o.succs_of(g, x)).collect())
        && same(o.inputs.iter().map(|&x| o.preds_of(g, x)).collect());
    (stable, transverse)
}

/// An orbit found not stable or not transverse while computing `SO(G)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitIrregularity {
    pub orbit: Vec<Vertex>,
    pub stable: bool,
    pub transverse: bool,
}

/// `SO(G)`: repeatedly deletes `Out(O) × In(O)` for every maximal orbit,
/// checking stability and transversality of each orbit met. Also returns
/// the number of deletion rounds.
pub fn graph_without_orbit<K: Semiring>(
    g: &KGraph<K>,
) -> Result<(KGraph<K>, usize), OrbitIrregularity> {
    let mut g = g.clone();
    let mut rounds = 0;
    loop {
        let orbits = maximal_orbits(&g);
        if orbits.is_empty() {
            return Ok((g, rounds));
        }
        rounds += 1;
        for o in &orbits {
            let (stable, transverse) = boolean_stability_transversality(&g, o);
            if !(stable && transverse) {
                return Err(OrbitIrregularity {
                    orbit: o.ids(),
                    stable,
                    transverse,
                });
            }
        }
        for o in &orbits {
            for &s in &o.outputs {
                for &e in &o.inputs {
                    g.remove_edge(s, e);
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundarySets {
    /// `B(Q⁻(x))`
    pub beginnings: BTreeSet<Vertex>,
    /// `T(Q⁺(x))`
    pub terminations: BTreeSet<Vertex>,
}

/// `B(Q⁻(x))` keeps the predecessors not reachable from another
/// predecessor; `T(Q⁺(x))` keeps the successors from which no other
/// successor is reachable.
pub fn beginnings_terminations<K: Semiring>(
    g: &KGraph<K>,
    x: Vertex,
) -> Result<BoundarySets, GraphError> {
    if !g.is_acyclic() {
        return Err(GraphError::Cyclic);
    }
    Ok(boundary_sets_acyclic(g, x))
}

/// [`beginnings_terminations`] without the acyclicity check.
pub(crate) fn boundary_sets_acyclic<K: Semiring>(g: &KGraph<K>, x: Vertex) -> BoundarySets {
    let qm = g.pred_set(x);
    let qp = g.succ_set(x);
    let mut reached_from_qm = BTreeSet::new();
    for &q in &qm {
        reached_from_qm.extend(g.descendants(q));
    }
    let beginnings = qm.iter().filter(|q| !reached_from_qm.contains(q)).copied().collect();
    let mut reaching_qp = BTreeSet::new();
    for &q in &qp {
        reaching_qp.extend(g.ancestors(q));
    }
    let terminations = qp.iter().filter(|q| !reaching_qp.contains(q)).copied().collect();
    BoundarySets {
        beginnings,
        terminations,
    }
}
