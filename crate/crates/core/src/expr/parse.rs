use super::KExpr;
use crate::error::ParseError;
use crate::semiring::Semiring;

/// Parses an expression.
///
/// ```text
/// expr   := term ("+" term)*
/// term   := factor ("."? factor)*
/// factor := "<" lit ">" factor | atom suffix*
/// suffix := "*" | "^+" | "<" lit ">"
/// atom   := LETTER | "eps" | "nil" | "(" expr ")"
/// ```
///
/// `eps` and `nil` are always keywords, so the letters `e`, `p`, `s` in a
/// row must be separated by `.` or spaces.
pub fn parse_expr<K: Semiring>(s: &str) -> Result<KExpr<K>, ParseError> {
    parse_expr_with_warnings(s).map(|(e, _)| e)
}

/// Like [`parse_expr`], also returning warnings about `0̄` scalars.
pub fn parse_expr_with_warnings<K: Semiring>(
    s: &str,
) -> Result<(KExpr<K>, Vec<String>), ParseError> {
    let mut p = Parser {
        src: s,
        pos: 0,
        warnings: Vec::new(),
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < s.len() {
        return Err(p.error("unexpected input"));
    }
    Ok((e, p.warnings))
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    warnings: Vec<String>,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> ParseError {
        let found = match self.peek() {
            Some(c) => format!("`{c}`"),
            None => "end of input".to_string(),
        };
        ParseError {
            pos: self.pos,
            message: format!("{msg}, found {found}"),
        }
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expr<K: Semiring>(&mut self) -> Result<KExpr<K>, ParseError> {
        let mut e = self.term()?;
        while self.eat("+") {
            let rhs = self.term()?;
            e = KExpr::sum(e, rhs);
        }
        Ok(e)
    }

    fn starts_factor(&mut self) -> bool {
        self.skip_ws();
        matches!(self.peek(), Some(c) if c == '(' || c == '<' || c.is_ascii_alphabetic())
    }

    fn term<K: Semiring>(&mut self) -> Result<KExpr<K>, ParseError> {
        let mut e = self.factor()?;
        loop {
            // `.` is optional between factors
            if self.eat(".") || self.starts_factor() {
                let rhs = self.factor()?;
                e = KExpr::cat(e, rhs);
            } else {
                return Ok(e);
            }
        }
    }

    fn scalar<K: Semiring>(&mut self) -> Result<K, ParseError> {
        let start = self.pos;
        let end = self.rest().find('>').ok_or_else(|| ParseError {
            pos: start,
            message: "unterminated scalar, expected `>`".into(),
        })?;
        let lit = &self.src[start..start + end];
        let k = K::parse(lit).map_err(|e| ParseError {
            pos: start,
            message: e.to_string(),
        })?;
        self.pos = start + end + 1;
        if k.is_zero() {
            self.warnings
                .push(format!("zero scalar at {start}: subexpression collapses to nil"));
        }
        Ok(k)
    }

    fn factor<K: Semiring>(&mut self) -> Result<KExpr<K>, ParseError> {
        if self.eat("<") {
            let k = self.scalar()?;
            let f = self.factor()?;
            return Ok(KExpr::lmul(k, f));
        }
        let mut e = self.atom()?;
        loop {
            if self.eat("*") {
                e = KExpr::star(e);
            } else if self.eat("^+") {
                e = KExpr::plus(e);
            } else if self.eat("<") {
                let k = self.scalar()?;
                e = KExpr::rmul(e, k);
            } else {
                return Ok(e);
            }
        }
    }

    fn atom<K: Semiring>(&mut self) -> Result<KExpr<K>, ParseError> {
        self.skip_ws();
        if self.eat("(") {
            let e = self.expr()?;
            if !self.eat(")") {
                return Err(self.error("expected `)`"));
            }
            return Ok(e);
        }
        if self.eat("eps") {
            return Ok(KExpr::Eps);
        }
        if self.eat("nil") {
            return Ok(KExpr::Empty);
        }
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() => {
                self.pos += 1;
                Ok(KExpr::Letter(c))
            }
            _ => Err(self.error("expected a letter, `eps`, `nil` or `(`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::{Natural, Rational, Tropical};

    type E = KExpr<Natural>;

    fn l(c: char) -> E {
        KExpr::Letter(c)
    }

    #[test]
    fn running_example() {
        let e: E = parse_expr("(<2>a + b)* . a . <3>b").unwrap();
        let want = E::cat(
            E::cat(E::star(E::sum(E::lmul(Natural(2), l('a')), l('b'))), l('a')),
            E::lmul(Natural(3), l('b')),
        );
        assert_eq!(e, want);
    }

    #[test]
    fn keywords_and_juxtaposition() {
        assert_eq!(parse_expr::<Natural>("eps").unwrap(), KExpr::Eps);
        assert_eq!(parse_expr::<Natural>("nil").unwrap(), KExpr::Empty);
        assert_eq!(parse_expr::<Natural>("ab").unwrap(), E::cat(l('a'), l('b')));
        assert_eq!(parse_expr::<Natural>("a b*").unwrap(), E::cat(l('a'), E::star(l('b'))));
    }

    #[test]
    fn scalars_bind_to_whole_factor() {
        let e: KExpr<Tropical> = parse_expr("<2>x<5>").unwrap();
        assert_eq!(
            e,
            KExpr::lmul(Tropical::finite(2), KExpr::rmul(KExpr::Letter('x'), Tropical::finite(5)))
        );
        let e: E = parse_expr("<2>a*").unwrap();
        assert_eq!(e, E::lmul(Natural(2), E::star(l('a'))));
        let e: E = parse_expr("a^+").unwrap();
        assert_eq!(e, E::plus(l('a')));
    }

    #[test]
    fn zero_scalar_collapses() {
        let (e, w) = parse_expr_with_warnings::<Natural>("<0>a + b").unwrap();
        assert_eq!(e, E::sum(KExpr::Empty, l('b')));
        assert_eq!(w.len(), 1);
        let e: KExpr<Tropical> = parse_expr("<inf>a").unwrap();
        assert_eq!(e, KExpr::Empty);
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_expr::<Natural>("(a + b").unwrap_err();
        assert_eq!(err.pos, 6);
        let err = parse_expr::<Natural>("a + <x>b").unwrap_err();
        assert_eq!(err.pos, 5);
        assert!(parse_expr::<Natural>("").is_err());
        assert!(parse_expr::<Natural>("a)").is_err());
        assert!(parse_expr::<Natural>("<-1>a").is_err());
        assert!(parse_expr::<Rational>("<-1>a").is_ok());
    }
}
