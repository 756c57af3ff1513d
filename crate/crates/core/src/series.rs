//! Brute-force series evaluation, bounded equivalence, and random
//! expression generators.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::ExprError;
use crate::expr::KExpr;
use crate::glushkov::analyze;
use crate::semiring::{Boolean, Semiring, SemiringKind};
use crate::wfa::Wfa;

fn proper_or_boolean<K: Semiring>(e: &KExpr<K>) -> Result<(), ExprError> {
    if K::KIND == SemiringKind::Boolean {
        return Ok(());
    }
    match analyze(e).non_proper {
        Some(err) => Err(err),
        None => Ok(()),
    }
}

/// Coefficient of `w` in the series of `e`.
///
/// Works on the matrix of subword coefficients `M[i][j] = (e, w[i..j])`;
/// concatenation is a matrix product and closures solve the
/// triangular system `S = 1 + A·S`.
pub fn expr_coeff<K: Semiring>(e: &KExpr<K>, w: &[char]) -> Result<K, ExprError> {
    proper_or_boolean(e)?;
    Ok(subword_matrix(e, w)[0][w.len()].clone())
}

type Matrix<K> = Vec<Vec<K>>;

fn subword_matrix<K: Semiring>(e: &KExpr<K>, w: &[char]) -> Matrix<K> {
    let n = w.len();
    let zeros = || vec![vec![K::zero(); n + 1]; n + 1];
    let product = |a: &Matrix<K>, b: &Matrix<K>| {
        let mut m = zeros();
        for i in 0..=n {
            for j in i..=n {
                let mut acc = K::zero();
                for k in i..=j {
                    acc = acc.add(&a[i][k].mul(&b[k][j]));
                }
                m[i][j] = acc;
            }
        }
        m
    };
    match e {
        KExpr::Empty => zeros(),
        KExpr::Eps => {
            let mut m = zeros();
            for (i, row) in m.iter_mut().enumerate() {
                row[i] = K::one();
            }
            m
        }
        KExpr::Letter(c) => {
            let mut m = zeros();
            for i in 0..n {
                if w[i] == *c {
                    m[i][i + 1] = K::one();
                }
            }
            m
        }
        KExpr::Sum(a, b) => {
            let (a, b) = (subword_matrix(a, w), subword_matrix(b, w));
            let mut m = a;
            for i in 0..=n {
                for j in i..=n {
                    m[i][j] = m[i][j].add(&b[i][j]);
                }
            }
            m
        }
        KExpr::Cat(a, b) => product(&subword_matrix(a, w), &subword_matrix(b, w)),
        KExpr::LMul(k, a) => {
            let mut m = subword_matrix(a, w);
            m.iter_mut().flatten().for_each(|v| *v = k.mul(v));
            m
        }
        KExpr::RMul(a, k) => {
            let mut m = subword_matrix(a, w);
            m.iter_mut().flatten().for_each(|v| *v = v.mul(k));
            m
        }
        KExpr::Star(a) => closure(&subword_matrix(a, w), n),
        KExpr::Plus(a) => {
            let a = subword_matrix(a, w);
            let s = closure(&a, n);
            product(&a, &s)
        }
    }
}

/// `S[i][j]` for `S = 1 + A·S`, ignoring the diagonal of `A` (zero for
/// proper operands, idempotent for booleans).
#[allow(clippy::needless_range_loop)]
fn closure<K: Semiring>(a: &Matrix<K>, n: usize) -> Matrix<K> {
    let mut s = vec![vec![K::zero(); n + 1]; n + 1];
    for j in 0..=n {
        s[j][j] = K::one();
        for i in (0..j).rev() {
            let mut acc = K::zero();
            for k in i + 1..=j {
                acc = acc.add(&a[i][k].mul(&s[k][j]));
            }
            s[i][j] = acc;
        }
    }
    s
}

/// Coefficients of every word of length at most `maxlen` over a fixed
/// alphabet, ordered by length and then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series<K> {
    letters: Vec<char>,
    maxlen: usize,
    offsets: Vec<usize>,
    coeffs: Vec<K>,
}

impl<K: Semiring> Series<K> {
    pub fn zero(letters: &[char], maxlen: usize) -> Self {
        let n = letters.len();
        let mut offsets = vec![0];
        let mut block = 1usize;
        for _ in 0..=maxlen {
            let last = *offsets.last().expect("nonempty");
            offsets.push(last + block);
            block *= n;
        }
        let total = offsets[maxlen + 1];
        Series {
            letters: letters.to_vec(),
            maxlen,
            offsets,
            coeffs: vec![K::zero(); total],
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn letters(&self) -> &[char] {
        &self.letters
    }

    pub fn maxlen(&self) -> usize {
        self.maxlen
    }

    fn index_of_digits(&self, digits: &[usize]) -> usize {
        let n = self.letters.len();
        self.offsets[digits.len()] + digits.iter().fold(0, |acc, d| acc * n + d)
    }

    fn digits_of(&self, mut idx: usize) -> Vec<usize> {
        let len = self.offsets.iter().rposition(|o| *o <= idx).expect("index in range");
        idx -= self.offsets[len];
        let n = self.letters.len();
        let mut d = vec![0; len];
        for slot in d.iter_mut().rev() {
            *slot = idx % n;
            idx /= n;
        }
        d
    }

    pub fn word(&self, idx: usize) -> Vec<char> {
        self.digits_of(idx).into_iter().map(|d| self.letters[d]).collect()
    }

    /// `None` for words that are too long or use other letters.
    pub fn index(&self, w: &[char]) -> Option<usize> {
        if w.len() > self.maxlen {
            return None;
        }
        let digits: Option<Vec<usize>> = w.iter().map(|c| self.letters.iter().position(|l| l == c)).collect();
        Some(self.index_of_digits(&digits?))
    }

    pub fn coeff(&self, w: &[char]) -> K {
        self.index(w).map(|i| self.coeffs[i].clone()).unwrap_or_else(K::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<char>, &K)> + '_ {
        self.coeffs.iter().enumerate().map(|(i, k)| (self.word(i), k))
    }

    fn unit(letters: &[char], maxlen: usize) -> Self {
        let mut s = Self::zero(letters, maxlen);
        s.coeffs[0] = K::one();
        s
    }

    fn add(mut self, other: &Self) -> Self {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a = a.add(b);
        }
        self
    }

    fn cauchy(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.letters, self.maxlen);
        for idx in 0..self.coeffs.len() {
            let d = self.digits_of(idx);
            let mut acc = K::zero();
            for cut in 0..=d.len() {
                let u = &self.coeffs[self.index_of_digits(&d[..cut])];
                if u.is_zero() {
                    continue;
                }
                acc = acc.add(&u.mul(&other.coeffs[self.index_of_digits(&d[cut..])]));
            }
            out.coeffs[idx] = acc;
        }
        out
    }

    /// `s*` on the constant-free part of `s`.
    fn star(&self) -> Self {
        let mut out = Self::unit(&self.letters, self.maxlen);
        for idx in 1..self.coeffs.len() {
            let d = self.digits_of(idx);
            let mut acc = K::zero();
            for cut in 1..=d.len() {
                let u = &self.coeffs[self.index_of_digits(&d[..cut])];
                if u.is_zero() {
                    continue;
                }
                acc = acc.add(&u.mul(&out.coeffs[self.index_of_digits(&d[cut..])]));
            }
            out.coeffs[idx] = acc;
        }
        out
    }

    /// The series of `e`, truncated.
    pub fn of_expr(e: &KExpr<K>, letters: &[char], maxlen: usize) -> Result<Self, ExprError> {
        proper_or_boolean(e)?;
        Ok(Self::build(e, letters, maxlen))
    }

    fn build(e: &KExpr<K>, letters: &[char], maxlen: usize) -> Self {
        match e {
            KExpr::Empty => Self::zero(letters, maxlen),
            KExpr::Eps => Self::unit(letters, maxlen),
            KExpr::Letter(c) => {
                let mut s = Self::zero(letters, maxlen);
                if let Some(i) = s.index(&[*c]) {
                    s.coeffs[i] = K::one();
                }
                s
            }
            KExpr::Sum(a, b) => Self::build(a, letters, maxlen).add(&Self::build(b, letters, maxlen)),
            KExpr::Cat(a, b) => Self::build(a, letters, maxlen).cauchy(&Self::build(b, letters, maxlen)),
            KExpr::LMul(k, a) => {
                let mut s = Self::build(a, letters, maxlen);
                s.coeffs.iter_mut().for_each(|v| *v = k.mul(v));
                s
            }
            KExpr::RMul(a, k) => {
                let mut s = Self::build(a, letters, maxlen);
                s.coeffs.iter_mut().for_each(|v| *v = v.mul(k));
                s
            }
            KExpr::Star(a) => Self::build(a, letters, maxlen).star(),
            KExpr::Plus(a) => {
                let s = Self::build(a, letters, maxlen);
                s.cauchy(&s.star())
            }
        }
    }

    /// The series of `m`, by walking the trie of words.
    pub fn of_wfa(m: &Wfa<K>, letters: &[char], maxlen: usize) -> Self {
        let mut s = Self::zero(letters, maxlen);
        let mut by_letter: BTreeMap<char, Vec<(usize, usize, K)>> = BTreeMap::new();
        for (&(p, a, q), k) in m.transitions() {
            by_letter.entry(a).or_default().push((p, q, k.clone()));
        }
        let start: BTreeMap<usize, K> = m
            .states()
            .map(|q| (q, m.initial(q)))
            .filter(|(_, k)| !k.is_zero())
            .collect();
        let mut stack = vec![(Vec::<usize>::new(), start)];
        while let Some((digits, v)) = stack.pop() {
            let idx = s.index_of_digits(&digits);
            s.coeffs[idx] = v
                .iter()
                .fold(K::zero(), |acc, (q, x)| acc.add(&x.mul(&m.final_weight(*q))));
            if digits.len() == maxlen {
                continue;
            }
            for (d, a) in letters.iter().enumerate() {
                let mut next: BTreeMap<usize, K> = BTreeMap::new();
                for (p, q, k) in by_letter.get(a).map(Vec::as_slice).unwrap_or(&[]) {
                    if let Some(x) = v.get(p) {
                        let e = next.entry(*q).or_insert_with(K::zero);
                        *e = e.add(&x.mul(k));
                    }
                }
                next.retain(|_, k| !k.is_zero());
                if !next.is_empty() {
                    let mut dd = digits.clone();
                    dd.push(d);
                    stack.push((dd, next));
                }
            }
        }
        s
    }
}

/// Anything with a series: expressions and automata.
pub trait SeriesSource<K: Semiring> {
    fn letters(&self) -> BTreeSet<char>;
    fn series(&self, letters: &[char], maxlen: usize) -> Result<Series<K>, ExprError>;
}

impl<K: Semiring> SeriesSource<K> for KExpr<K> {
    fn letters(&self) -> BTreeSet<char> {
        self.alphabet()
    }

    fn series(&self, letters: &[char], maxlen: usize) -> Result<Series<K>, ExprError> {
        Series::of_expr(self, letters, maxlen)
    }
}

impl<K: Semiring> SeriesSource<K> for Wfa<K> {
    fn letters(&self) -> BTreeSet<char> {
        self.alphabet().clone()
    }

    fn series(&self, letters: &[char], maxlen: usize) -> Result<Series<K>, ExprError> {
        Ok(Series::of_wfa(self, letters, maxlen))
    }
}

/// Why two series were found different.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Inequivalence<K> {
    Differs { word: String, left: K, right: K },
    NotProper(ExprError),
}

impl<K: Semiring> fmt::Display for Inequivalence<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Inequivalence::Differs { word, left, right } => {
                let w = if word.is_empty() { "eps" } else { word };
                write!(f, "coefficients of {w} differ: {left} vs {right}")
            }
            Inequivalence::NotProper(e) => write!(f, "{e}"),
        }
    }
}

/// Compares the coefficients of every word up to `maxlen` over the union
/// of both alphabets. Reports the first difference in length-lex order.
pub fn equivalent_up_to<K, A, B>(a: &A, b: &B, maxlen: usize) -> Result<(), Inequivalence<K>>
where
    K: Semiring,
    A: SeriesSource<K> + ?Sized,
    B: SeriesSource<K> + ?Sized,
{
    let letters: Vec<char> = a.letters().union(&b.letters()).copied().collect();
    let sa = a.series(&letters, maxlen).map_err(Inequivalence::NotProper)?;
    let sb = b.series(&letters, maxlen).map_err(Inequivalence::NotProper)?;
    for i in 0..sa.len() {
        if sa.coeffs[i] != sb.coeffs[i] {
            return Err(Inequivalence::Differs {
                word: sa.word(i).into_iter().collect(),
                left: sa.coeffs[i].clone(),
                right: sb.coeffs[i].clone(),
            });
        }
    }
    Ok(())
}

fn scalars<K: Semiring>() -> Vec<K> {
    if K::KIND == SemiringKind::Boolean {
        Vec::new()
    } else {
        K::sample_scalars()
    }
}

fn nullable<K: Semiring>(e: &KExpr<K>) -> bool {
    !e.classify().null_coeff.is_zero()
}

struct Gen<'a, K> {
    rng: ChaCha8Rng,
    alphabet: &'a [char],
    scalars: Vec<K>,
}

impl<K: Semiring> Gen<'_, K> {
    fn scalar(&mut self) -> Option<K> {
        self.scalars.choose(&mut self.rng).cloned()
    }

    fn scaled(&mut self, e: KExpr<K>) -> KExpr<K> {
        let mut e = e;
        if self.rng.gen_bool(0.3) {
            if let Some(k) = self.scalar() {
                e = KExpr::lmul(k, e);
            }
        }
        if self.rng.gen_bool(0.2) {
            if let Some(k) = self.scalar() {
                e = KExpr::rmul(e, k);
            }
        }
        e
    }

    /// An expression with exactly `n` letter occurrences.
    fn expr(&mut self, n: usize) -> KExpr<K> {
        let mut e = if n == 1 {
            let c = *self.alphabet.choose(&mut self.rng).expect("nonempty alphabet");
            KExpr::Letter(c)
        } else {
            let left = self.rng.gen_range(1..n);
            let (a, b) = (self.expr(left), self.expr(n - left));
            if self.rng.gen_bool(0.5) && !(nullable(&a) && nullable(&b)) {
                KExpr::sum(a, b)
            } else {
                KExpr::cat(a, b)
            }
        };
        e = self.scaled(e);
        if !nullable(&e) {
            match self.rng.gen_range(0..10) {
                0 | 1 => e = KExpr::star(e),
                2 => e = KExpr::plus(e),
                3 => {
                    let k = self.scalar().unwrap_or_else(K::one);
                    e = KExpr::sum(e, KExpr::lmul(k, KExpr::Eps));
                }
                _ => {}
            }
        }
        e
    }
}

/// Proper K-expression in star and epsilon normal form with exactly
/// `size` letter occurrences, deterministic in `seed`.
pub fn random_proper_snf_expr<K: Semiring>(seed: u64, size: usize, alphabet: &[char]) -> KExpr<K> {
    assert!(size >= 1 && !alphabet.is_empty());
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        alphabet,
        scalars: scalars::<K>(),
    };
    loop {
        let e = g.expr(size);
        let c = e.classify();
        if c.proper && c.snf && c.enf {
            return e;
        }
    }
}

/// Unconstrained boolean expression: closures of nullable operands,
/// nested closures, `ε` and `∅` are all allowed.
pub fn random_boolean_expr(seed: u64, size: usize, alphabet: &[char]) -> KExpr<Boolean> {
    fn go(rng: &mut ChaCha8Rng, n: usize, alphabet: &[char]) -> KExpr<Boolean> {
        let mut e = if n == 1 {
            match rng.gen_range(0..8) {
                0 => KExpr::Eps,
                1 => KExpr::Empty,
                _ => KExpr::Letter(*alphabet.choose(rng).expect("nonempty")),
            }
        } else {
            let left = rng.gen_range(1..n);
            let (a, b) = (go(rng, left, alphabet), go(rng, n - left, alphabet));
            if rng.gen_bool(0.5) {
                KExpr::sum(a, b)
            } else {
                KExpr::cat(a, b)
            }
        };
        match rng.gen_range(0..8) {
            0 | 1 => e = KExpr::star(e),
            2 => e = KExpr::plus(e),
            3 => e = KExpr::sum(e, KExpr::Eps),
            _ => {}
        }
        e
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    go(&mut rng, size.max(1), alphabet)
}
