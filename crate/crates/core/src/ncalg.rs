//! The *-algebra Pol(Mat_n)_q.
//!
//! Generators `z_a^α` (row `α`, column `a`) and their adjoints `(z_a^α)*`
//! subject to the FRT commutation relations among the `z`'s, their
//! conjugates among the `z*`'s, and the mixed relation that moves a `z*`
//! past a `z`. Elements are kept as linear combinations of normal words:
//! all unstarred letters first, each block sorted by `(column, row)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default number of rewrite steps before [`normal_form`] gives up.
pub const DEFAULT_BUDGET: usize = 50_000_000;

/// One letter: `z_col^row` or its adjoint.
///
/// The derived order (starred flag, then column, then row) is exactly the
/// letter order used by normal words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gen {
    pub starred: bool,
    pub col: u8,
    pub row: u8,
}

impl Gen {
    pub fn z(col: u8, row: u8) -> Gen {
        Gen { starred: false, col, row }
    }

    pub fn zs(col: u8, row: u8) -> Gen {
        Gen { starred: true, col, row }
    }

    pub fn star(self) -> Gen {
        Gen { starred: !self.starred, ..self }
    }

    pub fn check(self, n: u8) -> Result<Gen> {
        for idx in [self.col, self.row] {
            if idx == 0 || idx > n {
                return Err(Error::IndexOutOfRange { index: idx as usize, n: n as usize });
            }
        }
        Ok(self)
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = if self.starred { "zs" } else { "z" };
        write!(f, "{head}[{},{}]", self.col, self.row)
    }
}

/// A finite product of letters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub Vec<Gen>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Gen] {
        &self.0
    }

    pub fn is_normal(&self) -> bool {
        self.0.windows(2).all(|p| p[0] <= p[1])
    }

    /// Index of the leftmost adjacent pair that is out of order.
    pub fn leftmost_inversion(&self) -> Option<usize> {
        self.0.windows(2).position(|p| p[0] > p[1])
    }

    pub fn rightmost_inversion(&self) -> Option<usize> {
        self.0.windows(2).rposition(|p| p[0] > p[1])
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// `(unstarred count, starred count)`.
    pub fn bidegree(&self) -> (usize, usize) {
        let s = self.0.iter().filter(|g| g.starred).count();
        (self.len() - s, s)
    }

    pub fn starred_letters(&self) -> impl Iterator<Item = &Gen> {
        self.0.iter().filter(|g| g.starred)
    }

    /// Reverse and toggle every star flag.
    pub fn adjoint(&self) -> Word {
        Word(self.0.iter().rev().map(|g| g.star()).collect())
    }
}

impl From<Vec<Gen>> for Word {
    fn from(v: Vec<Gen>) -> Self {
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

/// `R_{ij}^{kl}` for the standard R-matrix of U_q sl_n.
pub fn r_matrix(n: u8, i: u8, j: u8, k: u8, l: u8) -> Result<Scalar> {
    for idx in [i, j, k, l] {
        if idx == 0 || idx > n {
            return Err(Error::IndexOutOfRange { index: idx as usize, n: n as usize });
        }
    }
    Ok(if i != j && i == k && j == l {
        Scalar::q_pow(-1)
    } else if i == j && j == k && k == l {
        Scalar::one()
    } else if i == j && k == l && l > j {
        Scalar::one() - Scalar::q_pow(-2)
    } else {
        Scalar::zero()
    })
}

/// Nonzero entries `(k, l, R_{ij}^{kl})` of the row `(i, j)`.
fn r_row(n: u8, i: u8, j: u8) -> Vec<(u8, u8, Scalar)> {
    if i != j {
        vec![(i, j, Scalar::q_pow(-1))]
    } else {
        let mut v = vec![(i, i, Scalar::one())];
        v.extend((i + 1..=n).map(|k| (k, k, Scalar::one() - Scalar::q_pow(-2))));
        v
    }
}

type Replacement = Vec<(Scalar, Vec<Gen>)>;

/// Replacement for an adjacent out-of-order pair `x y`, or `None` if the
/// pair is already ordered.
pub fn rewrite_pair(n: u8, x: Gen, y: Gen) -> Option<Replacement> {
    if x <= y {
        return None;
    }
    let qq = || Scalar::q() - Scalar::q_pow(-1);
    Some(match (x.starred, y.starred) {
        (false, false) => {
            let (a, alpha, b, beta) = (x.col, x.row, y.col, y.row);
            if a == b || alpha == beta {
                vec![(Scalar::q_pow(-1), vec![y, x])]
            } else if alpha < beta {
                vec![(Scalar::one(), vec![y, x])]
            } else {
                vec![
                    (Scalar::one(), vec![y, x]),
                    (-qq(), vec![Gen::z(b, alpha), Gen::z(a, beta)]),
                ]
            }
        }
        (true, true) => {
            let (a, alpha, b, beta) = (x.col, x.row, y.col, y.row);
            if a == b || alpha == beta {
                vec![(Scalar::q(), vec![y, x])]
            } else if alpha < beta {
                vec![(Scalar::one(), vec![y, x])]
            } else {
                vec![
                    (Scalar::one(), vec![y, x]),
                    (qq(), vec![Gen::zs(a, beta), Gen::zs(b, alpha)]),
                ]
            }
        }
        (true, false) => {
            // (z_b^β)* z_a^α = q² Σ R_{ba}^{b'a'} R_{βα}^{β'α'} z_{a'}^{α'} (z_{b'}^{β'})*
            //                 + (1 - q²) δ_ab δ^{αβ}
            let (b, beta, a, alpha) = (x.col, x.row, y.col, y.row);
            let q2 = Scalar::q_pow(2);
            let mut out = Vec::new();
            for (b1, a1, r1) in r_row(n, b, a) {
                for (beta1, alpha1, r2) in r_row(n, beta, alpha) {
                    let c = &(&q2 * &r1) * &r2;
                    out.push((c, vec![Gen::z(a1, alpha1), Gen::zs(b1, beta1)]));
                }
            }
            if a == b && alpha == beta {
                out.push((Scalar::one() - q2, Vec::new()));
            }
            out
        }
        (false, true) => unreachable!("unstarred before starred is ordered"),
    })
}

/// Single rewrite at the leftmost out-of-order position of `w`.
/// Returns `None` if `w` is already normal.
pub fn rewrite_step(n: u8, w: &Word) -> Option<Vec<(Scalar, Word)>> {
    let i = w.leftmost_inversion()?;
    Some(rewrite_at(n, w, i))
}

fn rewrite_at(n: u8, w: &Word, i: usize) -> Vec<(Scalar, Word)> {
    let rep = rewrite_pair(n, w.0[i], w.0[i + 1]).expect("position is an inversion");
    rep.into_iter()
        .map(|(c, mid)| {
            let mut v = Vec::with_capacity(w.len());
            v.extend_from_slice(&w.0[..i]);
            v.extend(mid);
            v.extend_from_slice(&w.0[i + 2..]);
            (c, Word(v))
        })
        .collect()
}

type Terms = BTreeMap<Word, Scalar>;

fn add_term(map: &mut Terms, w: Word, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match map.entry(w) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let s = e.get() + &c;
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

type Memo = RwLock<HashMap<(u8, Word), Arc<Vec<(Word, Scalar)>>>>;

fn memo() -> &'static Memo {
    static MEMO: OnceLock<Memo> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Number of cached word normal forms.
pub fn memo_size() -> usize {
    memo().read().unwrap().len()
}

fn normal_form_word(n: u8, w: &Word, budget: &mut usize) -> Result<Arc<Vec<(Word, Scalar)>>> {
    let Some(i) = w.leftmost_inversion() else {
        return Ok(Arc::new(vec![(w.clone(), Scalar::one())]));
    };
    let key = (n, w.clone());
    if let Some(hit) = memo().read().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    if *budget == 0 {
        return Err(Error::RewriteBudget(DEFAULT_BUDGET));
    }
    *budget -= 1;
    let mut acc = Terms::new();
    for (c, w2) in rewrite_at(n, w, i) {
        for (w3, c3) in normal_form_word(n, &w2, budget)?.iter() {
            add_term(&mut acc, w3.clone(), &c * c3);
        }
    }
    let out: Arc<Vec<(Word, Scalar)>> = Arc::new(acc.into_iter().collect());
    memo().write().unwrap().insert(key, out.clone());
    Ok(out)
}

/// Rewriting order used by [`normal_form_with_strategy`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

/// Normal form by plain iterated rewriting, without the shared memo.
/// Used to check that the result does not depend on the rewriting order.
pub fn normal_form_with_strategy(
    n: u8,
    terms: impl IntoIterator<Item = (Word, Scalar)>,
    strategy: Strategy,
    budget: usize,
) -> Result<NcElement> {
    let mut pending: Terms = Terms::new();
    for (w, c) in terms {
        add_term(&mut pending, w, c);
    }
    let mut done = Terms::new();
    let mut steps = 0usize;
    while let Some((w, c)) = pending.pop_first() {
        let pos = match strategy {
            Strategy::Leftmost => w.leftmost_inversion(),
            Strategy::Rightmost => w.rightmost_inversion(),
        };
        match pos {
            None => add_term(&mut done, w, c),
            Some(i) => {
                steps += 1;
                if steps > budget {
                    return Err(Error::RewriteBudget(budget));
                }
                for (c2, w2) in rewrite_at(n, &w, i) {
                    add_term(&mut pending, w2, &c * &c2);
                }
            }
        }
    }
    Ok(NcElement { n, terms: done })
}

/// Normal form of an arbitrary linear combination of words.
pub fn normal_form(n: u8, terms: impl IntoIterator<Item = (Word, Scalar)>) -> Result<NcElement> {
    normal_form_budget(n, terms, DEFAULT_BUDGET)
}

pub fn normal_form_budget(
    n: u8,
    terms: impl IntoIterator<Item = (Word, Scalar)>,
    budget: usize,
) -> Result<NcElement> {
    let mut left = budget;
    let mut acc = Terms::new();
    for (w, c) in terms {
        for g in &w.0 {
            g.check(n)?;
        }
        if c.is_zero() {
            continue;
        }
        for (w2, c2) in normal_form_word(n, &w, &mut left)
            .map_err(|_| Error::RewriteBudget(budget))?
            .iter()
        {
            add_term(&mut acc, w2.clone(), &c * c2);
        }
    }
    Ok(NcElement { n, terms: acc })
}

/// An element of Pol(Mat_n)_q in normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NcElement {
    n: u8,
    terms: BTreeMap<Word, Scalar>,
}

impl NcElement {
    pub fn zero(n: u8) -> Self {
        NcElement { n, terms: Terms::new() }
    }

    pub fn one(n: u8) -> Self {
        NcElement::scalar(n, Scalar::one())
    }

    pub fn scalar(n: u8, c: Scalar) -> Self {
        let mut terms = Terms::new();
        add_term(&mut terms, Word::empty(), c);
        NcElement { n, terms }
    }

    /// The generator `z_col^row`.
    pub fn z(n: u8, col: u8, row: u8) -> Result<Self> {
        NcElement::generator(n, Gen::z(col, row))
    }

    /// The adjoint generator `(z_col^row)*`.
    pub fn zs(n: u8, col: u8, row: u8) -> Result<Self> {
        NcElement::generator(n, Gen::zs(col, row))
    }

    pub fn generator(n: u8, g: Gen) -> Result<Self> {
        g.check(n)?;
        Ok(NcElement::from_normal_word(n, Word(vec![g]), Scalar::one()))
    }

    /// Normal form of a single (possibly non-normal) word.
    pub fn from_word(n: u8, w: Word) -> Result<Self> {
        normal_form(n, [(w, Scalar::one())])
    }

    pub(crate) fn from_normal_word(n: u8, w: Word, c: Scalar) -> Self {
        debug_assert!(w.is_normal());
        let mut terms = Terms::new();
        add_term(&mut terms, w, c);
        NcElement { n, terms }
    }

    pub(crate) fn from_normal_terms(n: u8, it: impl IntoIterator<Item = (Word, Scalar)>) -> Self {
        let mut terms = Terms::new();
        for (w, c) in it {
            debug_assert!(w.is_normal());
            add_term(&mut terms, w, c);
        }
        NcElement { n, terms }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Word, Scalar> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    /// Coefficient of the empty word.
    pub fn constant_term(&self) -> Scalar {
        self.coeff(&Word::empty())
    }

    pub fn is_scalar(&self) -> bool {
        self.terms.keys().all(Word::is_empty)
    }

    pub fn has_starred(&self) -> bool {
        self.terms.keys().any(|w| w.0.iter().any(|g| g.starred))
    }

    pub fn scale(&self, c: &Scalar) -> NcElement {
        if c.is_zero() {
            return NcElement::zero(self.n);
        }
        NcElement {
            n: self.n,
            terms: self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect(),
        }
    }

    fn check_same(&self, other: &NcElement) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SizeMismatch(format!("n = {} vs n = {}", self.n, other.n)));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &NcElement) -> Result<NcElement> {
        self.check_same(other)?;
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            add_term(&mut terms, w.clone(), c.clone());
        }
        Ok(NcElement { n: self.n, terms })
    }

    /// Product in normal form.
    pub fn multiply(&self, other: &NcElement) -> Result<NcElement> {
        self.check_same(other)?;
        let mut budget = DEFAULT_BUDGET;
        let mut acc = Terms::new();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let c = c1 * c2;
                for (w3, c3) in normal_form_word(self.n, &w1.concat(w2), &mut budget)?.iter() {
                    add_term(&mut acc, w3.clone(), &c * c3);
                }
            }
        }
        Ok(NcElement { n: self.n, terms: acc })
    }

    pub fn pow(&self, k: u32) -> NcElement {
        (0..k).fold(NcElement::one(self.n), |acc, _| &acc * self)
    }

    /// The involution: reverse words, toggle stars, keep coefficients.
    pub fn star(&self) -> NcElement {
        normal_form(self.n, self.terms.iter().map(|(w, c)| (w.adjoint(), c.clone())))
            .expect("adjoint of a valid element")
    }

    /// The set of `(unstarred, starred)` letter counts present.
    pub fn bidegree(&self) -> BTreeSet<(usize, usize)> {
        self.terms.keys().map(Word::bidegree).collect()
    }

    /// Total degree `#z - #z*` of every term, if homogeneous.
    pub fn z_degree(&self) -> BTreeSet<i64> {
        self.terms
            .keys()
            .map(|w| {
                let (u, s) = w.bidegree();
                u as i64 - s as i64
            })
            .collect()
    }

    /// The homogeneous component of bidegree `(u, s)`.
    pub fn component(&self, u: usize, s: usize) -> NcElement {
        NcElement {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.bidegree() == (u, s))
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Reinterpret with a larger ambient size (all words stay normal).
    pub fn widen(&self, n: u8) -> NcElement {
        debug_assert!(n >= self.n);
        NcElement { n, terms: self.terms.clone() }
    }

    pub fn max_len(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }
}

impl Add for &NcElement {
    type Output = NcElement;
    fn add(self, rhs: &NcElement) -> NcElement {
        self.try_add(rhs).expect("mismatched ambient size")
    }
}

impl Sub for &NcElement {
    type Output = NcElement;
    fn sub(self, rhs: &NcElement) -> NcElement {
        self + &(-rhs)
    }
}

impl Neg for &NcElement {
    type Output = NcElement;
    fn neg(self) -> NcElement {
        NcElement {
            n: self.n,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }
}

impl Mul for &NcElement {
    type Output = NcElement;
    /// Panics on mismatched ambient size; see [`NcElement::multiply`].
    fn mul(self, rhs: &NcElement) -> NcElement {
        self.multiply(rhs).expect("product of elements")
    }
}

impl Mul<&NcElement> for &Scalar {
    type Output = NcElement;
    fn mul(self, rhs: &NcElement) -> NcElement {
        rhs.scale(self)
    }
}

/// Render one coefficient in front of a word, including the joining sign.
pub(crate) fn fmt_term(
    f: &mut fmt::Formatter<'_>,
    first: bool,
    c: &Scalar,
    body: &str,
) -> fmt::Result {
    let (neg, mag) = match c.as_signed_q_power() {
        Some((neg, _)) => (neg, if neg { -c } else { c.clone() }),
        None if c.denominator().is_one() && c.numerator().term_count() == 1 => {
            let neg = c.numerator().leading().map(|x| x.sign() == num_bigint::Sign::Minus).unwrap_or(false);
            (neg, if neg { -c } else { c.clone() })
        }
        None => (false, c.clone()),
    };
    if neg {
        write!(f, "{}", if first { "-" } else { " - " })?;
    } else if !first {
        write!(f, " + ")?;
    }
    let simple = mag.denominator().is_one() && mag.numerator().term_count() == 1;
    let coef = if mag.is_one() {
        String::new()
    } else if simple {
        mag.to_string()
    } else if mag.denominator().is_one() {
        format!("({mag})")
    } else {
        // already of the form (p)/(r); wrap so juxtaposition binds it as one factor
        format!("({mag})")
    };
    match (coef.is_empty(), body.is_empty()) {
        (true, true) => write!(f, "1"),
        (true, false) => write!(f, "{body}"),
        (false, true) => write!(f, "{coef}"),
        (false, false) => write!(f, "{coef} {body}"),
    }
}

impl fmt::Display for NcElement {
    /// Terms by descending length, e.g. `q^2 z[1,1] zs[1,1] + (1-q^2)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ts: Vec<_> = self.terms.iter().collect();
        ts.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(b.0)));
        for (i, (w, c)) in ts.into_iter().enumerate() {
            fmt_term(f, i == 0, c, &w.to_string())?;
        }
        Ok(())
    }
}

/// All normal words in the unstarred letters of degree exactly `d`, over
/// the given set of allowed letters (which must be sorted).
pub fn normal_words(letters: &[Gen], d: usize) -> Vec<Word> {
    fn go(letters: &[Gen], start: usize, d: usize, cur: &mut Vec<Gen>, out: &mut Vec<Word>) {
        if d == 0 {
            out.push(Word(cur.clone()));
            return;
        }
        for i in start..letters.len() {
            cur.push(letters[i]);
            go(letters, i, d - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(letters, 0, d, &mut Vec::new(), &mut out);
    out
}

/// The `n²` unstarred letters in normal order.
pub fn z_letters(n: u8) -> Vec<Gen> {
    let mut v: Vec<Gen> = (1..=n).flat_map(|c| (1..=n).map(move |r| Gen::z(c, r))).collect();
    v.sort();
    v
}
