//! Position sets with coefficients, the Glushkov functions of a K-expression
//! and the Glushkov automaton built from them.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::ExprError;
use crate::expr::KExpr;
use crate::graph::{KGraph, VertexLabel};
use crate::semiring::{Boolean, Semiring, SemiringKind, Side};
use crate::wfa::Wfa;

/// A finite map from positions to nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSet<K>(BTreeMap<usize, K>);

impl<K: Semiring> Default for PairSet<K> {
    fn default() -> Self {
        PairSet(BTreeMap::new())
    }
}

impl<K: Semiring> PairSet<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(pos: usize, k: K) -> Self {
        let mut s = Self::new();
        s.add(pos, k);
        s
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, K)>>(pairs: I) -> Self {
        let mut s = Self::new();
        for (p, k) in pairs {
            s.add(p, k);
        }
        s
    }

    /// `Coeff_Y(i)`, `0̄` when `i` is absent.
    pub fn coeff(&self, pos: usize) -> K {
        self.0.get(&pos).cloned().unwrap_or_else(K::zero)
    }

    pub fn get(&self, pos: usize) -> Option<&K> {
        self.0.get(&pos)
    }

    pub fn contains(&self, pos: usize) -> bool {
        self.0.contains_key(&pos)
    }

    /// The support `P(Y)`.
    pub fn positions(&self) -> BTreeSet<usize> {
        self.0.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &K)> + '_ {
        self.0.iter().map(|(p, k)| (*p, k))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Adds one pair, summing with an existing coefficient and dropping the
    /// entry if the sum is `0̄`.
    pub fn add(&mut self, pos: usize, k: K) {
        if k.is_zero() {
            return;
        }
        match self.0.get_mut(&pos) {
            Some(old) => {
                let s = old.add(&k);
                if s.is_zero() {
                    self.0.remove(&pos);
                } else {
                    *old = s;
                }
            }
            None => {
                self.0.insert(pos, k);
            }
        }
    }

    /// In-place `⊎`.
    pub fn merge_from(&mut self, other: &PairSet<K>) {
        for (p, k) in other.iter() {
            self.add(p, k.clone());
        }
    }

    pub fn merge(&self, other: &PairSet<K>) -> PairSet<K> {
        let mut out = self.clone();
        out.merge_from(other);
        out
    }

    /// `k · Y` (left) or `Y · k` (right).
    pub fn scale(&self, side: Side, k: &K) -> PairSet<K> {
        if k.is_zero() {
            return PairSet::new();
        }
        let mut out = PairSet::new();
        for (p, l) in self.iter() {
            let v = match side {
                Side::Left => k.mul(l),
                Side::Right => l.mul(k),
            };
            out.add(p, v);
        }
        out
    }
}

/// `Null`, `First`, `Last` and `Follow` of a whole expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlushkovFunctions<K> {
    pub null: K,
    pub first: PairSet<K>,
    pub last: PairSet<K>,
    /// One entry per position, possibly empty.
    pub follow: BTreeMap<usize, PairSet<K>>,
    /// `letters[i - 1]` is the letter at position `i`.
    pub letters: Vec<char>,
}

impl<K: Semiring> GlushkovFunctions<K> {
    pub fn follow_of(&self, pos: usize) -> &PairSet<K> {
        &self.follow[&pos]
    }
}

/// Closure subexpression, as a range of positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosureSpan {
    pub first: usize,
    pub last: usize,
    pub star: bool,
    /// Number of enclosing closures that also contain positions.
    pub depth: usize,
}

impl ClosureSpan {
    pub fn positions(&self) -> BTreeSet<usize> {
        (self.first..=self.last).collect()
    }
}

/// Everything one structural pass over an expression learns.
#[derive(Debug, Clone)]
pub struct Analysis<K> {
    pub functions: GlushkovFunctions<K>,
    pub proper: bool,
    pub enf: bool,
    pub snf: bool,
    pub closures: Vec<ClosureSpan>,
    pub non_proper: Option<ExprError>,
}

struct Node<K> {
    null: K,
    first: PairSet<K>,
    last: PairSet<K>,
}

struct Walker<K> {
    follow: BTreeMap<usize, PairSet<K>>,
    letters: Vec<char>,
    proper: bool,
    enf: bool,
    snf: bool,
    closures: Vec<ClosureSpan>,
    non_proper: Option<ExprError>,
    depth: usize,
}

impl<K: Semiring> Walker<K> {
    fn walk(&mut self, e: &KExpr<K>) -> Node<K> {
        match e {
            KExpr::Empty => Node {
                null: K::zero(),
                first: PairSet::new(),
                last: PairSet::new(),
            },
            KExpr::Eps => Node {
                null: K::one(),
                first: PairSet::new(),
                last: PairSet::new(),
            },
            KExpr::Letter(c) => {
                self.letters.push(*c);
                let pos = self.letters.len();
                self.follow.insert(pos, PairSet::new());
                Node {
                    null: K::zero(),
                    first: PairSet::singleton(pos, K::one()),
                    last: PairSet::singleton(pos, K::one()),
                }
            }
            KExpr::LMul(k, f) => {
                let n = self.walk(f);
                Node {
                    null: k.mul(&n.null),
                    first: n.first.scale(Side::Left, k),
                    last: n.last,
                }
            }
            KExpr::RMul(f, k) => {
                let n = self.walk(f);
                Node {
                    null: n.null.mul(k),
                    first: n.first,
                    last: n.last.scale(Side::Right, k),
                }
            }
            KExpr::Sum(f, g) => {
                let a = self.walk(f);
                let b = self.walk(g);
                if !a.null.is_zero() && !b.null.is_zero() {
                    self.enf = false;
                }
                Node {
                    null: a.null.add(&b.null),
                    first: a.first.merge(&b.first),
                    last: a.last.merge(&b.last),
                }
            }
            KExpr::Cat(f, g) => {
                let a = self.walk(f);
                let b = self.walk(g);
                for (i, c) in a.last.iter() {
                    let add = b.first.scale(Side::Left, c);
                    self.follow.get_mut(&i).expect("position").merge_from(&add);
                }
                Node {
                    null: a.null.mul(&b.null),
                    first: a.first.merge(&b.first.scale(Side::Left, &a.null)),
                    last: a.last.scale(Side::Right, &b.null).merge(&b.last),
                }
            }
            KExpr::Star(f) | KExpr::Plus(f) => {
                let star = matches!(e, KExpr::Star(_));
                let start = self.letters.len();
                self.depth += 1;
                let n = self.walk(f);
                self.depth -= 1;
                let end = self.letters.len();
                if end > start {
                    self.closures.push(ClosureSpan {
                        first: start + 1,
                        last: end,
                        star,
                        depth: self.depth,
                    });
                }
                if !n.null.is_zero() {
                    self.proper = false;
                    self.enf = false;
                    self.snf = false;
                    if self.non_proper.is_none() {
                        self.non_proper = Some(ExprError::NotProper {
                            first: start + 1,
                            last: end,
                            coeff: n.null.to_string(),
                        });
                    }
                }
                let first_pos = n.first.positions();
                for (x, c) in n.last.iter() {
                    let fol = self.follow.get_mut(&x).expect("position");
                    if fol.iter().any(|(p, _)| first_pos.contains(&p)) {
                        self.snf = false;
                    }
                    fol.merge_from(&n.first.scale(Side::Left, c));
                }
                let null = if star {
                    K::one()
                } else if K::KIND == SemiringKind::Boolean {
                    n.null.clone()
                } else {
                    K::zero()
                };
                Node {
                    null,
                    first: n.first,
                    last: n.last,
                }
            }
        }
    }
}

/// Single pass computing the Glushkov functions together with the
/// properness, ENF and SNF flags.
pub fn analyze<K: Semiring>(e: &KExpr<K>) -> Analysis<K> {
    let mut w = Walker {
        follow: BTreeMap::new(),
        letters: Vec::new(),
        proper: true,
        enf: true,
        snf: true,
        closures: Vec::new(),
        non_proper: None,
        depth: 0,
    };
    let n = w.walk(e);
    w.closures.sort_by_key(|c| (c.first, std::cmp::Reverse(c.last)));
    Analysis {
        functions: GlushkovFunctions {
            null: n.null,
            first: n.first,
            last: n.last,
            follow: w.follow,
            letters: w.letters,
        },
        proper: w.proper,
        enf: w.enf,
        snf: w.snf,
        closures: w.closures,
        non_proper: w.non_proper,
    }
}

/// The Glushkov functions of a proper expression. Over the booleans a
/// closure of a nullable operand is accepted with its usual meaning.
pub fn glushkov_functions<K: Semiring>(e: &KExpr<K>) -> Result<GlushkovFunctions<K>, ExprError> {
    let a = analyze(e);
    match a.non_proper {
        Some(err) if K::KIND != SemiringKind::Boolean => Err(err),
        _ => Ok(a.functions),
    }
}

pub fn wfa_from_functions<K: Semiring>(g: &GlushkovFunctions<K>) -> Wfa<K> {
    let n = g.letters.len();
    let mut m = Wfa::new(g.letters.iter().copied().collect());
    m.add_state(0, K::one(), g.null.clone());
    for j in 1..=n {
        m.add_state(j, K::zero(), g.last.coeff(j));
    }
    for (j, k) in g.first.iter() {
        m.set_transition(0, g.letters[j - 1], j, k.clone());
    }
    for i in 1..=n {
        for (j, k) in g.follow_of(i).iter() {
            m.set_transition(i, g.letters[j - 1], j, k.clone());
        }
    }
    m
}

/// The Glushkov automaton: state `0` is initial, position `i` is state `i`.
pub fn build_wfa<K: Semiring>(e: &KExpr<K>) -> Result<Wfa<K>, ExprError> {
    glushkov_functions(e).map(|g| wfa_from_functions(&g))
}

/// A_𝔹 of an expression already over the booleans.
pub fn boolean_automaton(e: &KExpr<Boolean>) -> Wfa<Boolean> {
    wfa_from_functions(&analyze(e).functions)
}

/// Turns a homogeneous automaton into a K-graph with an extra sink.
///
/// Fails with the offending state and two distinct entering letters when
/// the automaton is not homogeneous.
pub fn wfa_to_kgraph<K: Semiring>(m: &Wfa<K>) -> Result<KGraph<K>, crate::graph::GraphError> {
    use crate::graph::GraphError;

    let mut entering: BTreeMap<usize, char> = BTreeMap::new();
    for (&(_, a, q), _) in m.transitions() {
        match entering.get(&q) {
            Some(&b) if b != a => {
                return Err(GraphError::NotHomogeneous {
                    state: q,
                    letters: (b.min(a), b.max(a)),
                })
            }
            _ => {
                entering.insert(q, a);
            }
        }
    }
    let initials: Vec<usize> = m
        .states()
        .filter(|&q| !m.initial(q).is_zero())
        .collect();
    let root = match initials.as_slice() {
        [r] => *r,
        _ => return Err(GraphError::NoUniqueRoot(initials)),
    };
    if entering.contains_key(&root) {
        return Err(GraphError::RootHasPredecessor(root));
    }
    let sink = m.states().max().map_or(0, |x| x + 1);
    let mut g = KGraph::new(root, sink);
    for q in m.states() {
        if q == root {
            continue;
        }
        match entering.get(&q) {
            Some(&a) => g.add_vertex(q, VertexLabel::Letter(a)),
            // unreachable state without entering letter: kept unlabeled
            None => g.add_vertex(q, VertexLabel::Unlabeled),
        }
    }
    let input = m.initial(root);
    for (&(p, _, q), k) in m.transitions() {
        let w = if p == root { input.mul(k) } else { k.clone() };
        g.set_edge(p, q, w);
    }
    for q in m.states() {
        let f = m.final_weight(q);
        if !f.is_zero() {
            let w = if q == root { input.mul(&f) } else { f };
            g.set_edge(q, sink, w);
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::semiring::{Natural, Rational, Tropical};

    fn nat(e: &str) -> KExpr<Natural> {
        parse_expr(e).unwrap()
    }

    #[test]
    fn merge_and_scale() {
        let a = PairSet::singleton(1, Natural(2));
        let b = PairSet::singleton(2, Natural(1));
        assert_eq!(a.merge(&b), PairSet::from_pairs([(1, Natural(2)), (2, Natural(1))]));
        let c = PairSet::singleton(1, Natural(3));
        assert_eq!(a.merge(&c), PairSet::singleton(1, Natural(5)));
        let q = PairSet::singleton(1, Rational::integer(2));
        assert!(q.merge(&PairSet::singleton(1, Rational::integer(-2))).is_empty());
        let ones = PairSet::from_pairs([(1, Natural(1)), (2, Natural(1))]);
        assert_eq!(
            ones.scale(Side::Left, &Natural(2)),
            PairSet::from_pairs([(1, Natural(2)), (2, Natural(2))])
        );
        assert!(PairSet::singleton(3, Natural(5)).scale(Side::Left, &Natural(0)).is_empty());
        assert_eq!(a.scale(Side::Right, &Natural(3)), PairSet::singleton(1, Natural(6)));
    }

    #[test]
    fn functions_of_running_example() {
        let g = glushkov_functions(&nat("(<2>a + b)* . a . <3>b")).unwrap();
        let one = Natural(1);
        assert_eq!(g.first, PairSet::from_pairs([(1, Natural(2)), (2, one), (3, one)]));
        assert_eq!(g.last, PairSet::singleton(4, one));
        assert_eq!(g.null, Natural(0));
        assert_eq!(*g.follow_of(1), PairSet::from_pairs([(1, Natural(2)), (2, one), (3, one)]));
        assert_eq!(*g.follow_of(3), PairSet::singleton(4, Natural(3)));
        assert!(g.follow_of(4).is_empty());
    }

    #[test]
    fn functions_of_small_cases() {
        let g = glushkov_functions(&nat("eps")).unwrap();
        assert_eq!(g.null, Natural(1));
        assert!(g.first.is_empty() && g.last.is_empty());
        let g = glushkov_functions(&nat("<3>b")).unwrap();
        assert_eq!(g.first, PairSet::singleton(1, Natural(3)));
        assert_eq!(g.last, PairSet::singleton(1, Natural(1)));
    }

    #[test]
    fn non_proper_is_rejected_except_over_booleans() {
        assert!(matches!(
            glushkov_functions(&nat("(a + eps)*")),
            Err(ExprError::NotProper { .. })
        ));
        let b: KExpr<Boolean> = parse_expr("(a*)*").unwrap();
        let g = glushkov_functions(&b).unwrap();
        assert_eq!(g.null, Boolean(true));
        assert_eq!(*g.follow_of(1), PairSet::singleton(1, Boolean(true)));
    }

    #[test]
    fn automaton_shapes() {
        let m = build_wfa(&nat("(<2>a + b)* . a . <3>b")).unwrap();
        assert_eq!(m.state_count(), 5);
        let m = build_wfa(&nat("<5>eps")).unwrap();
        assert_eq!(m.state_count(), 1);
        assert_eq!(m.final_weight(0), Natural(5));
        let m = build_wfa(&nat("a")).unwrap();
        assert_eq!(m.state_count(), 2);
        assert_eq!(m.weight(0, 'a', 1), Natural(1));
        assert_eq!(m.final_weight(1), Natural(1));
    }

    #[test]
    fn kgraph_conversion() {
        let g = wfa_to_kgraph(&build_wfa(&nat("a")).unwrap()).unwrap();
        assert_eq!(g.weight(0, 1), Natural(1));
        assert_eq!(g.weight(1, 2), Natural(1));
        assert_eq!(g.edge_count(), 2);

        let t: KExpr<Tropical> = parse_expr("<5>eps").unwrap();
        let g = wfa_to_kgraph(&build_wfa(&t).unwrap()).unwrap();
        assert_eq!(g.weight(0, 1), Tropical::finite(5));
        assert_eq!(g.vertex_count(), 2);

        let mut m = Wfa::<Natural>::new(['a', 'b'].into_iter().collect());
        m.add_state(0, Natural(1), Natural(0));
        m.add_state(1, Natural(0), Natural(1));
        m.set_transition(0, 'a', 1, Natural(1));
        m.set_transition(0, 'b', 1, Natural(2));
        assert!(matches!(
            wfa_to_kgraph(&m),
            Err(crate::graph::GraphError::NotHomogeneous { state: 1, letters: ('a', 'b') })
        ));
    }

    #[test]
    fn input_weight_is_folded() {
        let mut m = Wfa::<Natural>::new(['a'].into_iter().collect());
        m.add_state(0, Natural(3), Natural(2));
        m.add_state(1, Natural(0), Natural(1));
        m.set_transition(0, 'a', 1, Natural(5));
        let g = wfa_to_kgraph(&m).unwrap();
        assert_eq!(g.weight(0, 1), Natural(15));
        assert_eq!(g.weight(0, 2), Natural(6));
    }
}
