//! Quantum minors, the quantum determinant and the localized algebra C[GL_n]_q
//! with its involution.
//!
//! A [`GlElement`] is a pair `(body, k)` standing for `body · det_q^{-k}`.
//! Because `det_q` is central, pairs multiply componentwise.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::linsolve::{self, Row, Solution};
use crate::ncalg::{Gen, NcElement, Word};
use crate::scalar::Scalar;

/// A strictly increasing list of indices in `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexSet(Vec<u8>);

impl IndexSet {
    pub fn new(idx: Vec<u8>, n: u8) -> Result<IndexSet> {
        if idx.len() > n as usize {
            return Err(Error::SizeMismatch(format!("{} indices for n = {n}", idx.len())));
        }
        if let Some(&bad) = idx.iter().find(|&&i| i == 0 || i > n) {
            return Err(Error::IndexOutOfRange { index: bad as usize, n: n as usize });
        }
        if idx.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::Config(format!("index set {idx:?} is not strictly increasing")));
        }
        Ok(IndexSet(idx))
    }

    /// `{1, ..., n}`.
    pub fn full(n: u8) -> IndexSet {
        IndexSet((1..=n).collect())
    }

    /// `{1, ..., n}` without `skip`.
    pub fn all_but(n: u8, skip: u8) -> IndexSet {
        IndexSet((1..=n).filter(|&i| i != skip).collect())
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All `k`-subsets of `range`, in lexicographic order.
    pub fn subsets(range: &[u8], k: usize) -> Vec<IndexSet> {
        fn go(range: &[u8], k: usize, start: usize, cur: &mut Vec<u8>, out: &mut Vec<IndexSet>) {
            if cur.len() == k {
                out.push(IndexSet(cur.clone()));
                return;
            }
            for i in start..range.len() {
                cur.push(range[i]);
                go(range, k, i + 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(range, k, 0, &mut Vec::new(), &mut out);
        out
    }
}

/// Permutations of `0..k` paired with their inversion counts.
fn permutations(k: usize) -> Vec<(Vec<usize>, usize)> {
    fn go(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, usize)>) {
        if rest.is_empty() {
            let inv = (0..cur.len())
                .map(|i| (i + 1..cur.len()).filter(|&j| cur[i] > cur[j]).count())
                .sum();
            out.push((cur.clone(), inv));
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            cur.push(x);
            go(rest, cur, out);
            cur.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    go(&mut (0..k).collect(), &mut Vec::new(), &mut out);
    out
}

/// The quantum minor `Σ_s (-q)^{l(s)} z_{a_1}^{α_{s(1)}} ⋯ z_{a_k}^{α_{s(k)}}`
/// with rows `α` and columns `a`.
pub fn quantum_minor(n: u8, rows: &IndexSet, cols: &IndexSet) -> Result<NcElement> {
    if rows.len() != cols.len() {
        return Err(Error::SizeMismatch(format!(
            "minor with {} rows and {} columns",
            rows.len(),
            cols.len()
        )));
    }
    let terms = permutations(rows.len()).into_iter().map(|(s, inv)| {
        let w: Vec<Gen> = cols.0.iter().zip(&s).map(|(&a, &si)| Gen::z(a, rows.0[si])).collect();
        (Word(w), Scalar::neg_q_pow(inv as i64))
    });
    crate::ncalg::normal_form(n, terms)
}

type DetMemo = RwLock<HashMap<(u8, u32), NcElement>>;

fn det_memo() -> &'static DetMemo {
    static M: OnceLock<DetMemo> = OnceLock::new();
    M.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The quantum determinant of the `n × n` generic matrix.
pub fn det_q(n: u8) -> NcElement {
    det_pow(n, 1)
}

/// `det_q^k`, memoized.
pub fn det_pow(n: u8, k: u32) -> NcElement {
    if let Some(d) = det_memo().read().unwrap().get(&(n, k)) {
        return d.clone();
    }
    let d = match k {
        0 => NcElement::one(n),
        1 => quantum_minor(n, &IndexSet::full(n), &IndexSet::full(n)).expect("square minor"),
        _ => &det_pow(n, k - 1) * &det_pow(n, 1),
    };
    det_memo().write().unwrap().insert((n, k), d.clone());
    d
}

/// Minor of the matrix with row `row` and column `col` deleted.
pub fn cofactor_minor(n: u8, row: u8, col: u8) -> NcElement {
    quantum_minor(n, &IndexSet::all_but(n, row), &IndexSet::all_but(n, col)).expect("square minor")
}

/// Row and column contents of a word of unstarred letters, as sorted multisets.
fn content(w: &Word) -> (Vec<u8>, Vec<u8>) {
    let mut rows: Vec<u8> = w.0.iter().map(|g| g.row).collect();
    let mut cols: Vec<u8> = w.0.iter().map(|g| g.col).collect();
    rows.sort_unstable();
    cols.sort_unstable();
    (rows, cols)
}

/// Remove one copy of each of `1..=n` from a sorted multiset.
fn remove_full(ms: &[u8], n: u8) -> Option<Vec<u8>> {
    let mut out = ms.to_vec();
    for i in 1..=n {
        let pos = out.iter().position(|&x| x == i)?;
        out.remove(pos);
    }
    Some(out)
}

/// Normal words of unstarred letters with the given row and column contents.
pub fn words_with_content(rows: &[u8], cols: &[u8]) -> Vec<Word> {
    let mut col_counts: BTreeMap<u8, usize> = BTreeMap::new();
    for &c in cols {
        *col_counts.entry(c).or_default() += 1;
    }
    fn go(
        rows: &[u8],
        i: usize,
        last: Option<(u8, u8)>,
        counts: &mut BTreeMap<u8, usize>,
        cur: &mut Vec<Gen>,
        out: &mut Vec<Word>,
    ) {
        if i == rows.len() {
            let mut w = cur.clone();
            w.sort();
            out.push(Word(w));
            return;
        }
        let r = rows[i];
        let keys: Vec<u8> = counts.iter().filter(|(_, &v)| v > 0).map(|(&k, _)| k).collect();
        for c in keys {
            // equal rows take non-decreasing columns so each multiset appears once
            if let Some((lr, lc)) = last {
                if lr == r && c < lc {
                    continue;
                }
            }
            *counts.get_mut(&c).unwrap() -= 1;
            cur.push(Gen::z(c, r));
            go(rows, i + 1, Some((r, c)), counts, cur, out);
            cur.pop();
            *counts.get_mut(&c).unwrap() += 1;
        }
    }
    let mut out = Vec::new();
    if rows.len() == cols.len() {
        go(rows, 0, None, &mut col_counts, &mut Vec::new(), &mut out);
    }
    out
}

/// Exact division by `det_q` in C[Mat_n]_q: returns `Some(c)` with
/// `x = det_q · c`, or `None` if no such `c` exists. Decided by a linear
/// solve on each row/column-content component.
pub fn divide_by_det(x: &NcElement) -> Result<Option<NcElement>> {
    let n = x.n();
    if x.has_starred() {
        return Err(Error::Config("divide_by_det expects an unstarred element".into()));
    }
    let det = det_q(n);
    type Content = (Vec<u8>, Vec<u8>);
    let mut groups: BTreeMap<Content, Vec<(&Word, &Scalar)>> = BTreeMap::new();
    for (w, c) in x.terms() {
        groups.entry(content(w)).or_default().push((w, c));
    }
    let mut quotient = NcElement::zero(n);
    for ((rows, cols), terms) in groups {
        let (Some(r2), Some(c2)) = (remove_full(&rows, n), remove_full(&cols, n)) else {
            return Ok(None);
        };
        let unknowns = words_with_content(&r2, &c2);
        let images: Vec<NcElement> = unknowns
            .iter()
            .map(|u| det.multiply(&NcElement::from_normal_word(n, u.clone(), Scalar::one())))
            .collect::<Result<_>>()?;
        let mut eqs: BTreeMap<Word, Row> = BTreeMap::new();
        for (i, img) in images.iter().enumerate() {
            for (w, c) in img.terms() {
                eqs.entry(w.clone()).or_default().insert(i, c.clone());
            }
        }
        let target: BTreeMap<&Word, &Scalar> = terms.into_iter().collect();
        if target.keys().any(|w| !eqs.contains_key(*w)) {
            return Ok(None);
        }
        let system = eqs.into_iter().map(|(w, row)| {
            let rhs = target.get(&w).map(|c| (*c).clone()).unwrap_or_default();
            (row, rhs)
        });
        match linsolve::solve(unknowns.len(), system) {
            Solution::Unique(sol) => {
                let part = NcElement::from_normal_terms(n, unknowns.into_iter().zip(sol));
                quotient = &quotient + &part;
            }
            Solution::Inconsistent => return Ok(None),
            Solution::Underdetermined(d) => {
                return Err(Error::Config(format!(
                    "multiplication by det_q is not injective ({d} free parameters)"
                )))
            }
        }
    }
    Ok(Some(quotient))
}

/// An element `body · det_q^{-detpow}` of C[GL_n]_q.
#[derive(Debug, Clone)]
pub struct GlElement {
    body: NcElement,
    detpow: u32,
}

impl GlElement {
    pub fn new(body: NcElement, detpow: u32) -> Result<GlElement> {
        if body.has_starred() {
            return Err(Error::Config("GL elements contain unstarred letters only".into()));
        }
        Ok(GlElement { body, detpow })
    }

    pub(crate) fn raw(body: NcElement, detpow: u32) -> GlElement {
        debug_assert!(!body.has_starred());
        GlElement { body, detpow }
    }

    pub fn zero(n: u8) -> GlElement {
        GlElement { body: NcElement::zero(n), detpow: 0 }
    }

    pub fn one(n: u8) -> GlElement {
        GlElement { body: NcElement::one(n), detpow: 0 }
    }

    pub fn scalar(n: u8, c: Scalar) -> GlElement {
        GlElement { body: NcElement::scalar(n, c), detpow: 0 }
    }

    pub fn det(n: u8) -> GlElement {
        GlElement { body: det_q(n), detpow: 0 }
    }

    /// `det_q^{-1}`.
    pub fn det_inverse(n: u8) -> GlElement {
        GlElement { body: NcElement::one(n), detpow: 1 }
    }

    pub fn z(n: u8, col: u8, row: u8) -> Result<GlElement> {
        Ok(GlElement { body: NcElement::z(n, col, row)?, detpow: 0 })
    }

    pub fn n(&self) -> u8 {
        self.body.n()
    }

    pub fn body(&self) -> &NcElement {
        &self.body
    }

    pub fn detpow(&self) -> u32 {
        self.detpow
    }

    pub fn is_zero(&self) -> bool {
        self.body.is_zero()
    }

    /// The same element written with denominator `det_q^k`, `k >= detpow`.
    pub fn lift_to(&self, k: u32) -> GlElement {
        assert!(k >= self.detpow);
        if k == self.detpow {
            return self.clone();
        }
        GlElement { body: &self.body * &det_pow(self.n(), k - self.detpow), detpow: k }
    }

    pub fn scale(&self, c: &Scalar) -> GlElement {
        GlElement { body: self.body.scale(c), detpow: self.detpow }
    }

    pub fn try_add(&self, other: &GlElement) -> Result<GlElement> {
        let k = self.detpow.max(other.detpow);
        let body = self.lift_to(k).body.try_add(&other.lift_to(k).body)?;
        Ok(GlElement { body, detpow: k })
    }

    /// Product without canonical reduction.
    pub fn mul_raw(&self, other: &GlElement) -> Result<GlElement> {
        Ok(GlElement { body: self.body.multiply(&other.body)?, detpow: self.detpow + other.detpow })
    }

    /// Componentwise product followed by canonical reduction.
    pub fn gl_multiply(&self, other: &GlElement) -> Result<GlElement> {
        self.mul_raw(other)?.canonical()
    }

    /// Strip factors of `det_q` from the body while the exponent is positive.
    pub fn canonical(&self) -> Result<GlElement> {
        if self.body.is_zero() {
            return Ok(GlElement::zero(self.n()));
        }
        let mut cur = self.clone();
        while cur.detpow > 0 {
            match divide_by_det(&cur.body)? {
                Some(b) => {
                    cur.body = b;
                    cur.detpow -= 1;
                }
                None => break,
            }
        }
        Ok(cur)
    }

    /// The involution `(z_a^α)* = (-q)^{a+α-2n} det_q^{-1} det_q(z without row α, column a)`,
    /// extended antimultiplicatively with `(det_q^{-1})* = q^{n(n-1)} det_q`.
    pub fn gl_star(&self) -> Result<GlElement> {
        let n = self.n();
        let nn = n as i64;
        let det_factor = Scalar::q_pow(nn * (nn - 1) * self.detpow as i64);
        let mut by_pow: BTreeMap<u32, NcElement> = BTreeMap::new();
        for (w, c) in self.body.terms() {
            let mut body = det_pow(n, self.detpow).scale(&(c * &det_factor));
            for g in w.letters().iter().rev() {
                let (coef, minor) = letter_star_image(n, g.col, g.row);
                body = body.multiply(&minor)?.scale(&coef);
            }
            let slot = by_pow.entry(w.len() as u32).or_insert_with(|| NcElement::zero(n));
            *slot = &*slot + &body;
        }
        let mut acc = GlElement::zero(n);
        for (k, body) in by_pow {
            acc = acc.try_add(&GlElement { body, detpow: k })?;
        }
        acc.canonical()
    }
}

type StarMemo = RwLock<HashMap<(u8, u8, u8), (Scalar, NcElement)>>;

/// `(z_col^row)* = coef · minor · det_q^{-1}`; returns `(coef, minor)`.
pub fn letter_star_image(n: u8, col: u8, row: u8) -> (Scalar, NcElement) {
    static M: OnceLock<StarMemo> = OnceLock::new();
    let memo = M.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(v) = memo.read().unwrap().get(&(n, col, row)) {
        return v.clone();
    }
    let coef = Scalar::neg_q_pow(col as i64 + row as i64 - 2 * n as i64);
    let v = (coef, cofactor_minor(n, row, col));
    memo.write().unwrap().insert((n, col, row), v.clone());
    v
}

impl PartialEq for GlElement {
    /// Equality of the represented elements, not of the representations.
    fn eq(&self, other: &GlElement) -> bool {
        if self.n() != other.n() {
            return false;
        }
        let k = self.detpow.max(other.detpow);
        self.lift_to(k).body == other.lift_to(k).body
    }
}

impl fmt::Display for GlElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.detpow {
            0 => write!(f, "{}", self.body),
            1 => write!(f, "({}) detinv", self.body),
            k => write!(f, "({}) detinv^{k}", self.body),
        }
    }
}
