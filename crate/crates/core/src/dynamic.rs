//! Semiring chosen at run time.

use crate::error::{ParseError, SchemaError};
use crate::expr::{parse_expr_with_warnings, KExpr};
use crate::semiring::{Boolean, Natural, Rational, SemiringKind, Tropical};
use crate::series::random_proper_snf_expr;
use crate::wfa::{document_kind, Wfa};

/// Expands `$body` once per semiring with `$k` bound to the concrete type
/// and `$v` to the payload.
#[macro_export]
macro_rules! dispatch {
    ($any:ident :: $val:expr, |$v:ident : $k:ident| $body:expr) => {
        match $val {
            $any::Boolean($v) => {
                #[allow(unused)]
                type $k = $crate::semiring::Boolean;
                $body
            }
            $any::Natural($v) => {
                #[allow(unused)]
                type $k = $crate::semiring::Natural;
                $body
            }
            $any::Tropical($v) => {
                #[allow(unused)]
                type $k = $crate::semiring::Tropical;
                $body
            }
            $any::Rational($v) => {
                #[allow(unused)]
                type $k = $crate::semiring::Rational;
                $body
            }
        }
    };
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyExpr {
    Boolean(KExpr<Boolean>),
    Natural(KExpr<Natural>),
    Tropical(KExpr<Tropical>),
    Rational(KExpr<Rational>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyWfa {
    Boolean(Wfa<Boolean>),
    Natural(Wfa<Natural>),
    Tropical(Wfa<Tropical>),
    Rational(Wfa<Rational>),
}

impl AnyExpr {
    /// Parses `src` over `kind`; also returns parser warnings.
    pub fn parse(kind: SemiringKind, src: &str) -> Result<(AnyExpr, Vec<String>), ParseError> {
        Ok(match kind {
            SemiringKind::Boolean => {
                let (e, w) = parse_expr_with_warnings(src)?;
                (AnyExpr::Boolean(e), w)
            }
            SemiringKind::Naturals => {
                let (e, w) = parse_expr_with_warnings(src)?;
                (AnyExpr::Natural(e), w)
            }
            SemiringKind::Tropical => {
                let (e, w) = parse_expr_with_warnings(src)?;
                (AnyExpr::Tropical(e), w)
            }
            SemiringKind::Rationals => {
                let (e, w) = parse_expr_with_warnings(src)?;
                (AnyExpr::Rational(e), w)
            }
        })
    }

    pub fn kind(&self) -> SemiringKind {
        match self {
            AnyExpr::Boolean(_) => SemiringKind::Boolean,
            AnyExpr::Natural(_) => SemiringKind::Naturals,
            AnyExpr::Tropical(_) => SemiringKind::Tropical,
            AnyExpr::Rational(_) => SemiringKind::Rationals,
        }
    }

    pub fn render(&self) -> String {
        dispatch!(AnyExpr::self, |e: K| e.to_string())
    }

    /// Generated corpus member number `seed`: semirings cycle through all
    /// four instances, sizes through 1..=12, alphabets through 1..=3
    /// letters.
    pub fn corpus(seed: u64) -> AnyExpr {
        let size = 1 + (seed % 12) as usize;
        let letters = ['a', 'b', 'c'];
        let alphabet = &letters[..1 + (seed / 4 % 3) as usize];
        match SemiringKind::ALL[(seed % 4) as usize] {
            SemiringKind::Boolean => AnyExpr::Boolean(random_proper_snf_expr(seed, size, alphabet)),
            SemiringKind::Naturals => AnyExpr::Natural(random_proper_snf_expr(seed, size, alphabet)),
            SemiringKind::Tropical => AnyExpr::Tropical(random_proper_snf_expr(seed, size, alphabet)),
            SemiringKind::Rationals => AnyExpr::Rational(random_proper_snf_expr(seed, size, alphabet)),
        }
    }
}

macro_rules! from_impls {
    ($($v:ident),*) => {$(
        impl From<KExpr<$v>> for AnyExpr {
            fn from(e: KExpr<$v>) -> Self {
                AnyExpr::$v(e)
            }
        }
        impl From<Wfa<$v>> for AnyWfa {
            fn from(m: Wfa<$v>) -> Self {
                AnyWfa::$v(m)
            }
        }
    )*};
}

from_impls!(Boolean, Natural, Tropical, Rational);

impl AnyWfa {
    /// Reads a WFA document. The semiring comes from `kind` if given,
    /// otherwise from the document.
    pub fn from_json(text: &str, kind: Option<SemiringKind>) -> Result<AnyWfa, SchemaError> {
        let declared = document_kind(text)?;
        let kind = match kind {
            Some(k) if k != declared => {
                return Err(SchemaError::new(
                    "/semiring",
                    format!("document declares {declared}, expected {k}"),
                ))
            }
            _ => declared,
        };
        Ok(match kind {
            SemiringKind::Boolean => AnyWfa::Boolean(Wfa::from_json(text)?),
            SemiringKind::Naturals => AnyWfa::Natural(Wfa::from_json(text)?),
            SemiringKind::Tropical => AnyWfa::Tropical(Wfa::from_json(text)?),
            SemiringKind::Rationals => AnyWfa::Rational(Wfa::from_json(text)?),
        })
    }

    pub fn to_json(&self) -> String {
        dispatch!(AnyWfa::self, |m: K| m.to_json())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_cycles_semirings() {
        let kinds: Vec<SemiringKind> = (0..4).map(|s| AnyExpr::corpus(s).kind()).collect();
        assert_eq!(kinds, SemiringKind::ALL.to_vec());
        assert_eq!(AnyExpr::corpus(7), AnyExpr::corpus(7));
    }

    #[test]
    fn parse_and_render() {
        let (e, w) = AnyExpr::parse(SemiringKind::Tropical, "<0>a.<inf>b").unwrap();
        assert_eq!(e.render(), "a.nil");
        assert_eq!(w.len(), 1);
    }
}
