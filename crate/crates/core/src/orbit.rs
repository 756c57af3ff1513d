//! Orbit factorization, recursive orbit collapse, and the recovery
//! pipeline from a WFA back to a K-expression.

use std::collections::BTreeSet;

use crate::error::{RejectReason, Rejection};
use crate::expr::{render_expr, KExpr};
use crate::glushkov::wfa_to_kgraph;
use crate::graph::{
    boolean_stability_transversality, is_hammock, maximal_orbits, GraphError, KGraph, Orbit,
    Vertex, VertexLabel,
};
use crate::reduce::{reduce_acyclic, RuleApplication, ScanOrder};
use crate::semiring::{Semiring, Side};
use crate::series::equivalent_up_to;
use crate::wfa::Wfa;

/// Boundary matrices of an orbit. Rows and columns follow ascending ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitMatrices<K> {
    /// `Out(O)`, the rows of `m_orbit` and `m_out`.
    pub outputs: Vec<Vertex>,
    /// `In(O)`, the columns of `m_orbit` and `m_in`.
    pub inputs: Vec<Vertex>,
    /// `O⁻`, the rows of `m_in`.
    pub preds: Vec<Vertex>,
    /// `O⁺`, the columns of `m_out`.
    pub succs: Vec<Vertex>,
    /// `M_O(s, e) = U(s, e)`
    pub m_orbit: Vec<Vec<K>>,
    /// `M_e(p, e) = U(p, e)`
    pub m_in: Vec<Vec<K>>,
    /// `M_s(s, q) = U(s, q)`
    pub m_out: Vec<Vec<K>>,
}

impl<K: Semiring> OrbitMatrices<K> {
    pub fn of(g: &KGraph<K>, o: &Orbit) -> Self {
        let outputs: Vec<Vertex> = o.outputs.iter().copied().collect();
        let inputs: Vec<Vertex> = o.inputs.iter().copied().collect();
        let preds: Vec<Vertex> = o.preds.iter().copied().collect();
        let succs: Vec<Vertex> = o.succs.iter().copied().collect();
        let block = |rows: &[Vertex], cols: &[Vertex]| -> Vec<Vec<K>> {
            rows.iter()
                .map(|&r| cols.iter().map(|&c| g.weight(r, c)).collect())
                .collect()
        };
        OrbitMatrices {
            m_orbit: block(&outputs, &inputs),
            m_in: block(&preds, &inputs),
            m_out: block(&outputs, &succs),
            outputs,
            inputs,
            preds,
            succs,
        }
    }
}

/// The vectors with `M_e = Z ⊗ T`, `M_s = T' ⊗ Z'` and `M_O = T' ⊗ T`,
/// together with the intermediate scalars of their computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitVectors<K> {
    /// Indexed like `In(O)`.
    pub t: Vec<K>,
    /// Indexed like `Out(O)`.
    pub t_prime: Vec<K>,
    /// Indexed like `O⁻`.
    pub z: Vec<K>,
    /// Indexed like `O⁺`.
    pub z_prime: Vec<K>,
    pub k: K,
    pub k1: K,
    pub k2: K,
    pub a: K,
    pub b: K,
}

fn fail(step: &str, detail: impl Into<String>) -> Rejection {
    Rejection::new(RejectReason::FactorizationFailed, step, detail)
}

fn outer<K: Semiring>(col: &[K], row: &[K]) -> Vec<Vec<K>> {
    col.iter().map(|c| row.iter().map(|r| c.mul(r)).collect()).collect()
}

impl<K: Semiring> OrbitVectors<K> {
    /// Checks the three outer-product identities against `m` entry by entry.
    pub fn reproduces(&self, m: &OrbitMatrices<K>) -> bool {
        outer(&self.z, &self.t) == m.m_in
            && outer(&self.t_prime, &self.z_prime) == m.m_out
            && outer(&self.t_prime, &self.t) == m.m_orbit
    }
}

/// Computes `T, T', Z, Z'` from the boundary matrices, following the
/// gcd normalization of the back-edge removal procedure.
pub fn factorize<K: Semiring>(m: &OrbitMatrices<K>) -> Result<OrbitVectors<K>, Rejection> {
    let nonzero = |rows: &Vec<Vec<K>>| !rows.is_empty() && rows.iter().all(|r| !r.is_empty() && r.iter().all(|v| !v.is_zero()));
    if !(nonzero(&m.m_in) && nonzero(&m.m_out) && nonzero(&m.m_orbit)) {
        return Err(Rejection::new(
            RejectReason::OrbitBoundaryIrregular,
            "boundary-matrices",
            "a boundary matrix is empty or has a zero entry",
        ));
    }

    // M_e = gcd_l ⊗ gcd̄_l
    let gcd_l: Vec<K> = m
        .m_in
        .iter()
        .map(|row| K::gcd(Side::Left, row).expect("nonempty"))
        .collect();
    let mut gcdbar_l = Vec::with_capacity(m.inputs.len());
    for (j, v) in m.m_in[0].iter().enumerate() {
        let q = K::try_divide(Side::Left, v, &gcd_l[0])
            .ok_or_else(|| fail("input-factorization", format!("column {j} of the first row")))?;
        gcdbar_l.push(q);
    }
    for (i, row) in m.m_in.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if gcd_l[i].mul(&gcdbar_l[j]) != *v {
                return Err(fail(
                    "input-factorization",
                    format!("entry ({}, {}) is not {} times the common row", m.preds[i], m.inputs[j], gcd_l[i]),
                ));
            }
        }
    }

    // M_s = gcd̄_r ⊗ gcd_r
    let cols = m.succs.len();
    let gcd_r: Vec<K> = (0..cols)
        .map(|j| {
            let col: Vec<K> = m.m_out.iter().map(|r| r[j].clone()).collect();
            K::gcd(Side::Right, &col).expect("nonempty")
        })
        .collect();
    let mut gcdbar_r = Vec::with_capacity(m.outputs.len());
    for (i, row) in m.m_out.iter().enumerate() {
        let q = K::try_divide(Side::Right, &row[0], &gcd_r[0])
            .ok_or_else(|| fail("output-factorization", format!("row {i} of the first column")))?;
        gcdbar_r.push(q);
    }
    for (i, row) in m.m_out.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if gcdbar_r[i].mul(&gcd_r[j]) != *v {
                return Err(fail(
                    "output-factorization",
                    format!("entry ({}, {}) is not the common column times {}", m.outputs[i], m.succs[j], gcd_r[j]),
                ));
            }
        }
    }

    // M_O = gcd̄_r ⊗ k ⊗ gcd̄_l
    let k = K::try_divide(Side::Left, &m.m_orbit[0][0], &gcdbar_r[0])
        .and_then(|x| K::try_divide(Side::Right, &x, &gcdbar_l[0]))
        .ok_or_else(|| fail("orbit-scalar", "no scalar fits the first back edge"))?;
    for (i, row) in m.m_orbit.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if gcdbar_r[i].mul(&k).mul(&gcdbar_l[j]) != *v {
                return Err(fail(
                    "orbit-scalar",
                    format!("back edge ({}, {}) weighs {v}, expected {}", m.outputs[i], m.inputs[j], gcdbar_r[i].mul(&k).mul(&gcdbar_l[j])),
                ));
            }
        }
    }

    let a = K::gcd(Side::Right, &gcd_l).expect("nonempty");
    let b = K::gcd(Side::Left, &gcd_r).expect("nonempty");
    let k1 = K::gcd_pair(Side::Left, &b, &k);
    let k2 = K::try_divide(Side::Left, &k, &k1)
        .ok_or_else(|| fail("scalar-split", format!("{k1} does not divide {k}")))?;
    if K::gcd_pair(Side::Right, &k2, &a) != k2 {
        return Err(fail("scalar-split", format!("{k2} does not divide {a}")));
    }

    let t: Vec<K> = gcdbar_l.iter().map(|g| k2.mul(g)).collect();
    let t_prime: Vec<K> = gcdbar_r.iter().map(|g| g.mul(&k1)).collect();
    let z = gcd_l
        .iter()
        .map(|g| K::try_divide(Side::Right, g, &k2))
        .collect::<Option<Vec<K>>>()
        .ok_or_else(|| fail("boundary-vectors", "Z"))?;
    let z_prime = gcd_r
        .iter()
        .map(|g| K::try_divide(Side::Left, g, &k1))
        .collect::<Option<Vec<K>>>()
        .ok_or_else(|| fail("boundary-vectors", "Z'"))?;
    if t.iter().chain(&t_prime).any(K::is_zero) {
        return Err(fail("boundary-vectors", "zero entry in T or T'"));
    }
    Ok(OrbitVectors {
        t,
        t_prime,
        z,
        z_prime,
        k,
        k1,
        k2,
        a,
        b,
    })
}

fn boolean_check<K: Semiring>(g: &KGraph<K>, o: &Orbit) -> Result<(), Rejection> {
    let (stable, transverse) = boolean_stability_transversality(g, o);
    let step = match (stable, transverse) {
        (true, true) => return Ok(()),
        (false, _) => "boolean-stability",
        (true, false) => "boolean-transversality",
    };
    Err(Rejection::new(
        RejectReason::OrbitBoundaryIrregular,
        step,
        format!("stable={stable} transverse={transverse}"),
    )
    .in_orbit(&o.ids()))
}

/// Factorizes the orbit boundary and deletes the back edges
/// `Out(O) × In(O)`. The graph is left untouched on failure.
pub fn back_edges_removal<K: Semiring>(
    g: &mut KGraph<K>,
    o: &Orbit,
) -> Result<OrbitVectors<K>, Rejection> {
    boolean_check(g, o)?;
    let m = OrbitMatrices::of(g, o);
    let v = factorize(&m).map_err(|r| r.in_orbit(&o.ids()))?;
    for &s in &o.outputs {
        for &e in &o.inputs {
            g.remove_edge(s, e);
        }
    }
    Ok(v)
}

/// The three definitional predicates on an orbit, decided directly from
/// the matrices. Assumes a commutative semiring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BalanceReport {
    pub k_stable: bool,
    pub k_transverse: bool,
    pub k_balanced: bool,
}

/// A matrix with nonzero entries is an outer product iff every 2×2 minor
/// through the corner balances.
fn rank_one<K: Semiring>(m: &[Vec<K>]) -> bool {
    if m.is_empty() || m.iter().any(|r| r.is_empty() || r.iter().any(K::is_zero)) {
        return false;
    }
    let c = &m[0][0];
    m.iter().all(|row| {
        row.iter()
            .zip(&m[0])
            .all(|(v, top)| v.mul(c) == row[0].mul(top))
    })
}

fn all_gcd<K: Semiring>(m: &[Vec<K>]) -> K {
    let flat: Vec<K> = m.iter().flatten().cloned().collect();
    K::gcd(Side::Left, &flat).expect("nonempty")
}

pub fn k_balance_check<K: Semiring>(g: &KGraph<K>, o: &Orbit) -> BalanceReport {
    let m = OrbitMatrices::of(g, o);
    let k_stable = rank_one(&m.m_orbit);
    let k_transverse = rank_one(&m.m_in) && rank_one(&m.m_out);
    let mut k_balanced = false;
    if k_stable && k_transverse {
        let left: Vec<Vec<K>> = m.m_in.iter().chain(&m.m_orbit).cloned().collect();
        let right: Vec<Vec<K>> = m
            .m_orbit
            .iter()
            .zip(&m.m_out)
            .map(|(a, b)| a.iter().chain(b).cloned().collect())
            .collect();
        if rank_one(&left) && rank_one(&right) {
            // M_O = m·V·W with V, W primitive. T = t·W must divide the rows
            // of M_e and T' = t'·V the columns of M_s, with t ⊗ t' = m.
            // Taking t as large as allowed is optimal.
            let mo = all_gcd(&m.m_orbit);
            let ge = all_gcd(&m.m_in);
            let gs = all_gcd(&m.m_out);
            let t = K::gcd_pair(Side::Left, &ge, &mo);
            k_balanced = K::try_divide(Side::Left, &mo, &t)
                .and_then(|tp| K::try_divide(Side::Right, &gs, &tp))
                .is_some();
        }
    }
    BalanceReport {
        k_stable,
        k_transverse,
        k_balanced,
    }
}

/// Reduces the orbit interior `G'` and closes it: `E_O = F⁺`.
pub fn expression_of_orbit<K: Semiring>(
    interior: KGraph<K>,
    order: ScanOrder,
) -> Result<(KExpr<K>, Vec<RuleApplication<K>>), Rejection> {
    reduce_acyclic(interior, order)
        .map(|r| (KExpr::plus(r.expr), r.log))
        .map_err(|s| Rejection::new(RejectReason::NotReducible, "orbit-expression", s.summary()))
}

/// Replaces the orbit by its smallest vertex, labelled `e_o` and wired to
/// `O⁻` with `Z` and to `O⁺` with `Z'`. Returns the new vertex.
pub fn replace_states<K: Semiring>(
    g: &mut KGraph<K>,
    o: &Orbit,
    e_o: KExpr<K>,
    v: &OrbitVectors<K>,
) -> Vertex {
    let x = *o.vertices.iter().next().expect("nonempty orbit");
    for &y in &o.vertices {
        g.remove_vertex(y);
    }
    g.add_vertex(x, VertexLabel::Expr(e_o));
    for (p, z) in o.preds.iter().zip(&v.z) {
        g.set_edge(*p, x, z.clone());
    }
    for (q, z) in o.succs.iter().zip(&v.z_prime) {
        g.set_edge(x, *q, z.clone());
    }
    x
}

/// One collapsed orbit.
#[derive(Debug, Clone)]
pub struct OrbitCollapse<K> {
    pub orbit: Vec<Vertex>,
    pub vertex: Vertex,
    /// 1 for an orbit without sub-orbits.
    pub depth: usize,
    pub vectors: OrbitVectors<K>,
    pub expr: KExpr<K>,
    pub log: Vec<RuleApplication<K>>,
}

/// Collapses in the order they completed, inner orbits first.
#[derive(Debug, Clone, Default)]
pub struct OrbitReport<K> {
    pub collapses: Vec<OrbitCollapse<K>>,
    pub max_depth: usize,
}

/// Collapses every maximal orbit, recursively, into a single vertex
/// labelled with its expression. The result is acyclic.
pub fn orbit_reduction<K: Semiring>(
    g: &mut KGraph<K>,
    order: ScanOrder,
) -> Result<OrbitReport<K>, Rejection> {
    let mut report = OrbitReport {
        collapses: Vec::new(),
        max_depth: 0,
    };
    report.max_depth = collapse_all(g, order, &mut report)?;
    Ok(report)
}

/// A maximal orbit from which no other maximal orbit is reachable. The
/// split of the loop weight puts as much as possible on the output side,
/// so downstream orbits must already have taken their input share.
fn downstream_orbit<K: Semiring>(g: &KGraph<K>) -> Option<Orbit> {
    let mut os = maximal_orbits(g);
    let firsts: Vec<Vertex> = os.iter().map(|o| o.ids()[0]).collect();
    let i = (0..os.len()).find(|&i| {
        let below = g.descendants(firsts[i]);
        firsts.iter().enumerate().all(|(j, f)| j == i || !below.contains(f))
    })?;
    Some(os.swap_remove(i))
}

fn collapse_all<K: Semiring>(
    g: &mut KGraph<K>,
    order: ScanOrder,
    report: &mut OrbitReport<K>,
) -> Result<usize, Rejection> {
    let mut depth = 0;
    while let Some(o) = downstream_orbit(g) {
        let ids = o.ids();
        let v = back_edges_removal(g, &o)?;
        let (s, phi) = (g.max_vertex() + 1, g.max_vertex() + 2);
        let mut inner = g.induced(&o.vertices, s, phi);
        for (e, t) in o.inputs.iter().zip(&v.t) {
            inner.set_edge(s, *e, t.clone());
        }
        for (x, t) in o.outputs.iter().zip(&v.t_prime) {
            inner.set_edge(*x, phi, t.clone());
        }
        let inner_depth = collapse_all(&mut inner, order, report).map_err(|r| r.in_orbit(&ids))?;
        let (e_o, log) = expression_of_orbit(inner, order).map_err(|r| r.in_orbit(&ids))?;
        let x = replace_states(g, &o, e_o.clone(), &v);
        report.collapses.push(OrbitCollapse {
            orbit: ids,
            vertex: x,
            depth: inner_depth + 1,
            vectors: v,
            expr: e_o,
            log,
        });
        depth = depth.max(inner_depth + 1);
    }
    Ok(depth)
}

/// Result of a successful recovery.
#[derive(Debug, Clone)]
pub struct Recovery<K> {
    pub expr: KExpr<K>,
    pub orbits: OrbitReport<K>,
    /// Rule log of the final acyclic reduction.
    pub log: Vec<RuleApplication<K>>,
    /// `Some(true)` when checked on all words up to the requested length.
    pub verified: Option<bool>,
}

impl<K: Semiring> Recovery<K> {
    pub fn text(&self) -> String {
        render_expr(&self.expr)
    }

    /// Rule applications of every reduction, orbit interiors first.
    pub fn trace(&self) -> Vec<String> {
        let mut out = Vec::new();
        for c in &self.orbits.collapses {
            out.push(format!("orbit {:?} -> vertex {}", c.orbit, c.vertex));
            out.extend(c.log.iter().map(|a| format!("  {a}")));
        }
        out.extend(self.log.iter().map(|a| a.to_string()));
        out
    }
}

fn graph_rejection(e: GraphError) -> Rejection {
    match e {
        GraphError::NotHomogeneous { state, .. } => {
            Rejection::new(RejectReason::NotHomogeneous, "homogeneity", e.to_string()).in_orbit(&[state])
        }
        other => Rejection::new(RejectReason::NotHammock, "graph", other.to_string()),
    }
}

/// Recovers a K-expression from a K-graph, without verification.
pub fn recover_from_graph<K: Semiring>(
    mut g: KGraph<K>,
    order: ScanOrder,
) -> Result<Recovery<K>, Rejection> {
    let h = is_hammock(&g);
    if !h.hammock {
        let detail = h.witness.map(|w| format!("vertex {w} is not on a root-to-sink path")).unwrap_or_default();
        return Err(Rejection::new(RejectReason::NotHammock, "hammock", detail));
    }
    let orbits = orbit_reduction(&mut g, order)?;
    let r = reduce_acyclic(g, order)
        .map_err(|s| Rejection::new(RejectReason::NotReducible, "acyclic-reduction", s.summary()))?;
    Ok(Recovery {
        expr: r.expr,
        orbits,
        log: r.log,
        verified: None,
    })
}

/// The full pipeline. With `verify_len > 0` the result is compared with
/// `m` on every word up to that length and rejected on any difference.
pub fn recover_expression<K: Semiring>(
    m: &Wfa<K>,
    verify_len: usize,
    order: ScanOrder,
) -> Result<Recovery<K>, Rejection> {
    let g = wfa_to_kgraph(m).map_err(graph_rejection)?;
    let mut rec = recover_from_graph(g, order)?;
    if verify_len > 0 {
        if let Err(c) = equivalent_up_to(&rec.expr, m, verify_len) {
            return Err(Rejection::new(RejectReason::VerificationFailed, "verification", c.to_string()));
        }
        rec.verified = Some(true);
    }
    Ok(rec)
}

/// Vertex sets of the maximal orbits, for diagnostics.
pub fn orbit_vertex_sets<K: Semiring>(g: &KGraph<K>) -> Vec<BTreeSet<Vertex>> {
    maximal_orbits(g).into_iter().map(|o| o.vertices).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::glushkov::build_wfa;
    use crate::semiring::{Boolean, Natural, Rational, Tropical};

    fn t(n: u64) -> Tropical {
        Tropical::finite(n)
    }

    fn tv(v: &[u64]) -> Vec<Tropical> {
        v.iter().map(|n| t(*n)).collect()
    }

    fn tm(rows: &[&[u64]]) -> Vec<Vec<Tropical>> {
        rows.iter().map(|r| tv(r)).collect()
    }

    fn sample_matrices() -> OrbitMatrices<Tropical> {
        OrbitMatrices {
            outputs: vec![5, 7],
            inputs: vec![2, 4, 6],
            preds: vec![8, 9],
            succs: vec![10, 11, 12],
            m_orbit: tm(&[&[2, 0, 0], &[4, 2, 2]]),
            m_in: tm(&[&[4, 2, 2], &[5, 3, 3]]),
            m_out: tm(&[&[1, 2, 3], &[3, 4, 5]]),
        }
    }

    #[test]
    fn tropical_factorization() {
        let m = sample_matrices();
        let v = factorize(&m).unwrap();
        assert_eq!(v.t, tv(&[2, 0, 0]));
        assert_eq!(v.t_prime, tv(&[0, 2]));
        assert_eq!(v.z, tv(&[2, 3]));
        assert_eq!(v.z_prime, tv(&[1, 2, 3]));
        assert_eq!((v.k, v.k1, v.k2, v.a, v.b), (t(0), t(0), t(0), t(2), t(1)));
        assert!(v.reproduces(&m));
    }

    #[test]
    fn perturbed_back_edge() {
        let mut m = sample_matrices();
        m.m_orbit[0][0] = t(3);
        // no k in 0..=6 satisfies every back edge
        let ok = (0..=6u64).any(|k| {
            let (tp, tt) = ([0u64, 2], [2u64, 0, 0]);
            let mo = [[3u64, 0, 0], [4, 2, 2]];
            (0..2).all(|i| (0..3).all(|j| tp[i] + k + tt[j] == mo[i][j]))
        });
        assert!(!ok);
        let r = factorize(&m).unwrap_err();
        assert_eq!(r.reason, RejectReason::FactorizationFailed);
        assert_eq!(r.step, "orbit-scalar");
    }

    #[test]
    fn natural_scalar_split() {
        // M_O = [6], M_e = [2], M_s = [3]: T'T = 6, ZT = 2, T'Z' = 3
        let m = OrbitMatrices {
            outputs: vec![1],
            inputs: vec![1],
            preds: vec![0],
            succs: vec![2],
            m_orbit: vec![vec![Natural(6)]],
            m_in: vec![vec![Natural(2)]],
            m_out: vec![vec![Natural(3)]],
        };
        let v = factorize(&m).unwrap();
        assert_eq!((v.t.clone(), v.t_prime.clone()), (vec![Natural(2)], vec![Natural(3)]));
        assert!(v.reproduces(&m));
        let mut bad = m.clone();
        bad.m_in[0][0] = Natural(3);
        bad.m_out[0][0] = Natural(5);
        assert!(factorize(&bad).is_err());
    }

    #[test]
    fn boolean_all_ones() {
        let g = build_wfa(&parse_expr::<Boolean>("(a + b)*").unwrap()).unwrap();
        let mut g = wfa_to_kgraph(&g).unwrap();
        let o = maximal_orbits(&g).remove(0);
        let v = back_edges_removal(&mut g, &o).unwrap();
        assert!(v.t.iter().chain(&v.t_prime).chain(&v.z).chain(&v.z_prime).all(|x| *x == Boolean(true)));
        assert!(maximal_orbits(&g).is_empty());
    }

    fn natural_graph(e: &str) -> KGraph<Natural> {
        wfa_to_kgraph(&build_wfa(&parse_expr::<Natural>(e).unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn missing_back_edge() {
        let mut g = natural_graph("(a + b)*");
        g.remove_edge(1, 1);
        let o = maximal_orbits(&g).remove(0);
        let r = back_edges_removal(&mut g, &o).unwrap_err();
        assert_eq!(r.reason, RejectReason::OrbitBoundaryIrregular);
        assert_eq!(r.step, "boolean-stability");
    }

    #[test]
    fn balance_predicates() {
        let g = natural_graph("(<2>a<3> + b)^+.c");
        let o = maximal_orbits(&g).remove(0);
        let rep = k_balance_check(&g, &o);
        assert!(rep.k_stable && rep.k_transverse && rep.k_balanced);

        let mut m: KGraph<Natural> = KGraph::new(0, 3);
        m.add_vertex(1, VertexLabel::Letter('a'));
        m.add_vertex(2, VertexLabel::Letter('a'));
        m.set_edge(0, 1, Natural(1));
        m.set_edge(0, 2, Natural(1));
        m.set_edge(1, 1, Natural(1));
        m.set_edge(2, 2, Natural(1));
        m.set_edge(1, 2, Natural(1));
        m.set_edge(2, 1, Natural(1));
        m.set_edge(1, 3, Natural(1));
        m.set_edge(2, 3, Natural(1));
        let o = maximal_orbits(&m).remove(0);
        assert!(k_balance_check(&m, &o).k_balanced);
        m.remove_edge(1, 2);
        m.remove_edge(2, 1);
        let o = Orbit::of(&m, [1, 2].into_iter().collect());
        assert!(!k_balance_check(&m, &o).k_stable);
    }

    #[test]
    fn self_loop_orbit() {
        let g = natural_graph("(<3>a)^+");
        let rec = recover_from_graph(g, ScanOrder::Canonical).unwrap();
        assert_eq!(rec.orbits.collapses.len(), 1);
        let m = build_wfa(&parse_expr::<Natural>("(<3>a)^+").unwrap()).unwrap();
        assert!(equivalent_up_to(&rec.expr, &m, 6).is_ok());
    }

    #[test]
    fn nested_orbits_inner_first() {
        let src = "((a + b)*.c)*";
        let m = build_wfa(&parse_expr::<Natural>(src).unwrap()).unwrap();
        let rec = recover_expression(&m, 6, ScanOrder::Canonical).unwrap();
        assert_eq!(rec.orbits.collapses.len(), 2);
        assert_eq!(rec.orbits.collapses[0].depth, 1);
        assert_eq!(rec.orbits.collapses[1].depth, 2);
        assert_eq!(rec.orbits.max_depth, 2);
        assert_eq!(rec.verified, Some(true));
    }

    #[test]
    fn rational_round_trip() {
        let src = "(<1/2>a + <-3>b.c)*.<2>a + <5>eps";
        let m = build_wfa(&parse_expr::<Rational>(src).unwrap()).unwrap();
        let rec = recover_expression(&m, 5, ScanOrder::Canonical).unwrap();
        assert_eq!(rec.verified, Some(true));
    }

    #[test]
    fn downstream_orbit_first() {
        // collapsing c* first would move weight off the edge c -> b that
        // the b-orbit needs for its input vector
        let e: KExpr<Tropical> = parse_expr("(<1>c)*.(<3>b)^+").unwrap();
        let m = build_wfa(&e).unwrap();
        let rec = recover_expression(&m, 5, ScanOrder::Canonical).unwrap();
        let order: Vec<Vec<Vertex>> = rec.orbits.collapses.iter().map(|c| c.orbit.clone()).collect();
        assert_eq!(order, vec![vec![2], vec![1]]);
        assert_eq!(rec.orbits.collapses[1].vectors.t_prime, vec![Tropical::finite(0)]);
    }

    #[test]
    fn non_hammock() {
        let mut m: Wfa<Natural> = Wfa::new(['a'].into_iter().collect());
        m.add_state(0, Natural(1), Natural(0));
        m.add_state(1, Natural(0), Natural(1));
        m.add_state(2, Natural(0), Natural(0));
        m.set_transition(0, 'a', 1, Natural(1));
        m.set_transition(0, 'a', 2, Natural(1));
        let r = recover_expression(&m, 0, ScanOrder::Canonical).unwrap_err();
        assert_eq!(r.reason, RejectReason::NotHammock);
    }
}
