//! Star normal form for boolean expressions.

use super::KExpr;
use crate::semiring::Boolean;

type B = KExpr<Boolean>;

fn sum(a: B, b: B) -> B {
    match (a, b) {
        (KExpr::Empty, x) | (x, KExpr::Empty) => x,
        (x, y) => KExpr::sum(x, y),
    }
}

/// `E°`: same positions, first and last sets as `E`, without the empty
/// word, and with the follow links from last to first positions that a
/// surrounding closure would add anyway removed.
pub fn eps_removed(e: &B) -> B {
    match e {
        KExpr::Empty | KExpr::Eps => KExpr::Empty,
        KExpr::Letter(_) => e.clone(),
        KExpr::Sum(f, g) => sum(eps_removed(f), eps_removed(g)),
        KExpr::Cat(f, g) => {
            let (nf, ng) = (f.is_nullable_classically(), g.is_nullable_classically());
            match (nf, ng) {
                (false, false) => e.clone(),
                (false, true) => KExpr::cat(eps_removed(f), (**g).clone()),
                (true, false) => KExpr::cat((**f).clone(), eps_removed(g)),
                (true, true) => sum(eps_removed(f), eps_removed(g)),
            }
        }
        KExpr::Star(f) | KExpr::Plus(f) => eps_removed(f),
        KExpr::LMul(k, f) => KExpr::lmul(*k, eps_removed(f)),
        KExpr::RMul(f, k) => KExpr::rmul(eps_removed(f), *k),
    }
}

/// `E•`: an SNF expression with the same Glushkov automaton as `E`.
pub fn snf_convert_boolean(e: &B) -> B {
    match e {
        KExpr::Empty | KExpr::Eps | KExpr::Letter(_) => e.clone(),
        KExpr::Sum(f, g) => KExpr::sum(snf_convert_boolean(f), snf_convert_boolean(g)),
        KExpr::Cat(f, g) => KExpr::cat(snf_convert_boolean(f), snf_convert_boolean(g)),
        KExpr::Star(f) => KExpr::star(eps_removed(&snf_convert_boolean(f))),
        KExpr::Plus(f) => {
            let inner = eps_removed(&snf_convert_boolean(f));
            if f.is_nullable_classically() {
                KExpr::star(inner)
            } else {
                KExpr::plus(inner)
            }
        }
        KExpr::LMul(k, f) => KExpr::lmul(*k, snf_convert_boolean(f)),
        KExpr::RMul(f, k) => KExpr::rmul(snf_convert_boolean(f), *k),
    }
}
