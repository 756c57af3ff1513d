use super::KExpr;
use crate::semiring::Semiring;

/// Prints an expression in the syntax accepted by
/// [`parse_expr`](super::parse_expr), after [`KExpr::simplify`].
pub fn render_expr<K: Semiring>(e: &KExpr<K>) -> String {
    let mut out = String::new();
    write(&e.simplify(), &mut out);
    out
}

fn write<K: Semiring>(e: &KExpr<K>, out: &mut String) {
    match e {
        KExpr::Empty => out.push_str("nil"),
        KExpr::Eps => out.push_str("eps"),
        KExpr::Letter(c) => out.push(*c),
        KExpr::Sum(a, b) => {
            wrap(a, out, matches!(**a, KExpr::Sum(..)));
            out.push_str(" + ");
            wrap(b, out, matches!(**b, KExpr::Sum(..)));
        }
        KExpr::Cat(a, b) => {
            wrap(a, out, matches!(**a, KExpr::Sum(..)));
            out.push('.');
            wrap(b, out, matches!(**b, KExpr::Sum(..) | KExpr::Cat(..)));
        }
        KExpr::LMul(k, a) => {
            out.push('<');
            out.push_str(&k.to_string());
            out.push('>');
            wrap(a, out, matches!(**a, KExpr::Sum(..) | KExpr::Cat(..)));
        }
        KExpr::RMul(a, k) => {
            wrap(a, out, needs_parens_as_suffixed(a));
            out.push('<');
            out.push_str(&k.to_string());
            out.push('>');
        }
        KExpr::Star(a) => {
            wrap(a, out, needs_parens_as_suffixed(a));
            out.push('*');
        }
        KExpr::Plus(a) => {
            wrap(a, out, needs_parens_as_suffixed(a));
            out.push_str("^+");
        }
    }
}

fn needs_parens_as_suffixed<K>(e: &KExpr<K>) -> bool {
    matches!(e, KExpr::Sum(..) | KExpr::Cat(..) | KExpr::LMul(..))
}

fn wrap<K: Semiring>(e: &KExpr<K>, out: &mut String, parens: bool) {
    if parens {
        out.push('(');
        write(e, out);
        out.push(')');
    } else {
        write(e, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::semiring::{Natural, Tropical};

    #[test]
    fn basics() {
        let e: KExpr<Natural> = KExpr::star(KExpr::Letter('a'));
        assert_eq!(render_expr(&e), "a*");
        let e: KExpr<Natural> = KExpr::lmul(Natural(1), KExpr::Letter('a'));
        assert_eq!(render_expr(&e), "a");
        let e: KExpr<Natural> =
            KExpr::rmul(KExpr::lmul(Natural(2), KExpr::Letter('a')), Natural(3));
        assert_eq!(render_expr(&e), "(<2>a)<3>");
    }

    #[test]
    fn unit_scalars_vanish() {
        let s = "((<2>x<5> + <6>eps).(<0>y<2> + <1>eps) + <2>z) + <3>eps";
        let e: KExpr<Tropical> = parse_expr(s).unwrap();
        assert_eq!(render_expr(&e), "((<2>x<5> + <6>eps).(y<2> + <1>eps) + <2>z) + <3>eps");
    }

    #[test]
    fn reparse_is_stable() {
        for s in ["a.(b.c)", "(a + b) + c", "a + (b + c)", "<2>(a.b)<3>", "(<2>a)*", "a<2>*.b"] {
            let e: KExpr<Natural> = parse_expr(s).unwrap();
            let r = render_expr(&e);
            assert_eq!(parse_expr::<Natural>(&r).unwrap(), e.simplify(), "{s} -> {r}");
        }
    }
}
