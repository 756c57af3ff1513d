//! K-expressions: AST, metrics, classification and casting.

mod normal;
mod parse;
mod render;

use std::collections::BTreeSet;

use crate::glushkov::analyze;
use crate::semiring::{Boolean, Semiring};

pub use normal::{eps_removed, snf_convert_boolean};
pub use parse::{parse_expr, parse_expr_with_warnings};
pub use render::render_expr;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum KExpr<K> {
    Empty,
    Eps,
    Letter(char),
    Sum(Box<KExpr<K>>, Box<KExpr<K>>),
    Cat(Box<KExpr<K>>, Box<KExpr<K>>),
    Star(Box<KExpr<K>>),
    Plus(Box<KExpr<K>>),
    LMul(K, Box<KExpr<K>>),
    RMul(Box<KExpr<K>>, K),
}

/// Summary flags of an expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprClass<K> {
    pub proper: bool,
    pub valid: bool,
    pub enf: bool,
    pub snf: bool,
    pub null_coeff: K,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprMetrics {
    /// Occurrences of letters and of `ε`.
    pub length: usize,
    /// Occurrences of letters.
    pub literal_length: usize,
}

impl<K: Semiring> KExpr<K> {
    pub fn letter(c: char) -> Self {
        KExpr::Letter(c)
    }

    pub fn sum(a: Self, b: Self) -> Self {
        KExpr::Sum(Box::new(a), Box::new(b))
    }

    pub fn cat(a: Self, b: Self) -> Self {
        KExpr::Cat(Box::new(a), Box::new(b))
    }

    pub fn star(a: Self) -> Self {
        KExpr::Star(Box::new(a))
    }

    pub fn plus(a: Self) -> Self {
        KExpr::Plus(Box::new(a))
    }

    /// `k·a`; a `0̄` scalar gives `∅`.
    pub fn lmul(k: K, a: Self) -> Self {
        if k.is_zero() {
            KExpr::Empty
        } else {
            KExpr::LMul(k, Box::new(a))
        }
    }

    /// `a·k`; a `0̄` scalar gives `∅`.
    pub fn rmul(a: Self, k: K) -> Self {
        if k.is_zero() {
            KExpr::Empty
        } else {
            KExpr::RMul(Box::new(a), k)
        }
    }

    pub fn metrics(&self) -> ExprMetrics {
        let mut m = ExprMetrics {
            length: 0,
            literal_length: 0,
        };
        self.visit(&mut |e| match e {
            KExpr::Letter(_) => {
                m.length += 1;
                m.literal_length += 1;
            }
            KExpr::Eps => m.length += 1,
            _ => {}
        });
        m
    }

    /// `|E|`.
    pub fn literal_length(&self) -> usize {
        self.metrics().literal_length
    }

    /// `Pos(E) = {1, …, |E|}`.
    pub fn positions(&self) -> BTreeSet<usize> {
        (1..=self.literal_length()).collect()
    }

    /// Letters in reading order; index `i - 1` holds position `i`.
    pub fn letters(&self) -> Vec<char> {
        let mut out = Vec::new();
        self.visit(&mut |e| {
            if let KExpr::Letter(c) = e {
                out.push(*c);
            }
        });
        out
    }

    pub fn alphabet(&self) -> BTreeSet<char> {
        self.letters().into_iter().collect()
    }

    /// Pre-order traversal, left operand before right.
    pub fn visit<F: FnMut(&KExpr<K>)>(&self, f: &mut F) {
        f(self);
        match self {
            KExpr::Empty | KExpr::Eps | KExpr::Letter(_) => {}
            KExpr::Sum(a, b) | KExpr::Cat(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            KExpr::Star(a) | KExpr::Plus(a) | KExpr::LMul(_, a) | KExpr::RMul(a, _) => a.visit(f),
        }
    }

    /// Largest number of nested closures that contain a letter.
    pub fn closure_depth(&self) -> usize {
        match self {
            KExpr::Empty | KExpr::Eps | KExpr::Letter(_) => 0,
            KExpr::Sum(a, b) | KExpr::Cat(a, b) => a.closure_depth().max(b.closure_depth()),
            KExpr::LMul(_, a) | KExpr::RMul(a, _) => a.closure_depth(),
            KExpr::Star(a) | KExpr::Plus(a) => {
                let d = a.closure_depth();
                if a.literal_length() > 0 {
                    d + 1
                } else {
                    d
                }
            }
        }
    }

    pub fn classify(&self) -> ExprClass<K> {
        let a = analyze(self);
        ExprClass {
            proper: a.proper,
            valid: a.proper,
            enf: a.enf,
            snf: a.snf,
            null_coeff: a.functions.null,
        }
    }

    /// The weight-erased expression `Ẽ`.
    pub fn cast(&self) -> KExpr<Boolean> {
        match self {
            KExpr::Empty => KExpr::Empty,
            KExpr::Eps => KExpr::Eps,
            KExpr::Letter(c) => KExpr::Letter(*c),
            KExpr::Sum(a, b) => KExpr::sum(a.cast(), b.cast()),
            KExpr::Cat(a, b) => KExpr::cat(a.cast(), b.cast()),
            KExpr::Star(a) => KExpr::star(a.cast()),
            KExpr::Plus(a) => KExpr::plus(a.cast()),
            KExpr::LMul(_, a) | KExpr::RMul(a, _) => a.cast(),
        }
    }

    /// Applies `f` to every scalar.
    pub fn map_scalars<L: Semiring, F: Fn(&K) -> L + Copy>(&self, f: F) -> KExpr<L> {
        match self {
            KExpr::Empty => KExpr::Empty,
            KExpr::Eps => KExpr::Eps,
            KExpr::Letter(c) => KExpr::Letter(*c),
            KExpr::Sum(a, b) => KExpr::sum(a.map_scalars(f), b.map_scalars(f)),
            KExpr::Cat(a, b) => KExpr::cat(a.map_scalars(f), b.map_scalars(f)),
            KExpr::Star(a) => KExpr::star(a.map_scalars(f)),
            KExpr::Plus(a) => KExpr::plus(a.map_scalars(f)),
            KExpr::LMul(k, a) => KExpr::lmul(f(k), a.map_scalars(f)),
            KExpr::RMul(a, k) => KExpr::rmul(a.map_scalars(f), f(k)),
        }
    }

    /// Rendering simplifications: `ε·F → F`, `F·ε → F`, unit scalars and
    /// `∅` summands dropped.
    pub fn simplify(&self) -> KExpr<K> {
        match self {
            KExpr::Empty | KExpr::Eps | KExpr::Letter(_) => self.clone(),
            KExpr::Sum(a, b) => match (a.simplify(), b.simplify()) {
                (KExpr::Empty, x) | (x, KExpr::Empty) => x,
                (x, y) => KExpr::sum(x, y),
            },
            KExpr::Cat(a, b) => match (a.simplify(), b.simplify()) {
                (KExpr::Eps, x) | (x, KExpr::Eps) => x,
                (x, y) => KExpr::cat(x, y),
            },
            KExpr::Star(a) => KExpr::star(a.simplify()),
            KExpr::Plus(a) => KExpr::plus(a.simplify()),
            KExpr::LMul(k, a) if k.is_one() => a.simplify(),
            KExpr::LMul(k, a) => KExpr::lmul(k.clone(), a.simplify()),
            KExpr::RMul(a, k) if k.is_one() => a.simplify(),
            KExpr::RMul(a, k) => KExpr::rmul(a.simplify(), k.clone()),
        }
    }

    pub fn is_nullable_classically(&self) -> bool {
        match self {
            KExpr::Empty | KExpr::Letter(_) => false,
            KExpr::Eps | KExpr::Star(_) => true,
            KExpr::Sum(a, b) => a.is_nullable_classically() || b.is_nullable_classically(),
            KExpr::Cat(a, b) => a.is_nullable_classically() && b.is_nullable_classically(),
            KExpr::Plus(a) | KExpr::LMul(_, a) | KExpr::RMul(a, _) => a.is_nullable_classically(),
        }
    }
}

impl<K: Semiring> std::fmt::Display for KExpr<K> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&render_expr(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::{Natural, Rational};

    #[test]
    fn metrics_count_eps_occurrences() {
        let e: KExpr<Rational> = parse_expr("(a + <3>eps).(b + <2>eps) + <-1>eps").unwrap();
        let m = e.metrics();
        assert_eq!(m.length, 5);
        assert_eq!(m.literal_length, 2);
        assert_eq!(e.positions(), [1, 2].into_iter().collect());
    }

    #[test]
    fn classification() {
        let e: KExpr<Natural> = parse_expr("(<2>a^+ + (<3>b)^+)*").unwrap();
        let c = e.classify();
        assert!(c.proper);
        assert!(!c.snf);

        let e: KExpr<Rational> = parse_expr("<2>a* + <-2>b*").unwrap();
        let c = e.classify();
        assert!(c.null_coeff.is_zero());
        assert!(!c.enf);
        assert!(c.proper);

        let e: KExpr<Natural> = parse_expr("a").unwrap();
        let c = e.classify();
        assert!(c.proper && c.enf && c.snf);
        assert!(c.null_coeff.is_zero());

        let e: KExpr<Natural> = parse_expr("(a + eps)*").unwrap();
        let c = e.classify();
        assert!(!c.proper && !c.snf && !c.enf);
    }

    #[test]
    fn casting() {
        let e: KExpr<Rational> = parse_expr("<2>a* + <-2>b*").unwrap();
        assert_eq!(render_expr(&e.cast()), "a* + b*");
        let e: KExpr<Natural> = parse_expr("(<2>a + b)*.a.<3>b").unwrap();
        assert_eq!(render_expr(&e.cast()), "(a + b)*.a.b");
        assert_eq!(e.cast().positions(), e.positions());
    }

    #[test]
    fn simplification() {
        let e: KExpr<Natural> = parse_expr("eps.<1>a.eps + nil").unwrap();
        assert_eq!(e.simplify(), KExpr::Letter('a'));
    }

    #[test]
    fn closure_depth() {
        let e: KExpr<Natural> = parse_expr("((a + b)*.c)*.d").unwrap();
        assert_eq!(e.closure_depth(), 2);
        let e: KExpr<Natural> = parse_expr("eps*.a").unwrap();
        assert_eq!(e.closure_depth(), 0);
    }
}
