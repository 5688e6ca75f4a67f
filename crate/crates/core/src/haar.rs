//! The invariant integral on the Shilov boundary.
//!
//! Boundary elements are carried to C[U_n]_q by the rescaling
//! `z_a^α ↦ q^{α-n} z_a^α` and integrated against the Haar functional of the
//! coordinate Hopf algebra. The Haar functional is not taken from a closed
//! formula: for a monomial `w · det_q^{-k}` it is the unique solution of the
//! right-invariance equations `(h ⊗ id)Δ(m) = h(m)·1` on the set of
//! monomials reachable through first coproduct legs, normalized by
//! `h(1) = 1`.
//!
//! All monomials involved in one solve share the same det-power `k` and word
//! length `d`, and for fixed `(d, k)` the elements `w · det_q^{-k}` are
//! linearly independent, so coefficients may be compared word by word.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::linsolve::{Eliminator, Row, Solution};
use crate::ncalg::{normal_form, Gen, NcElement, Word};
use crate::qdet::{det_pow, GlElement};
use crate::scalar::Scalar;
use crate::shilov::{restrict, BoundaryElement};

/// The rescaling isomorphism onto C[U_n]_q.
pub fn to_un(x: &BoundaryElement) -> GlElement {
    rescale(x.inner(), 1)
}

/// Inverse of [`to_un`].
pub fn from_un(x: &GlElement) -> BoundaryElement {
    BoundaryElement(rescale(x, -1))
}

fn rescale(x: &GlElement, sign: i64) -> GlElement {
    let n = x.n() as i64;
    // det_q picks up q^{Σ_α (α - n)} = q^{-n(n-1)/2}, so det_q^{-k} gets the inverse
    let det_shift = sign * x.detpow() as i64 * n * (n - 1) / 2;
    let body = NcElement::from_normal_terms(
        x.n(),
        x.body().terms().iter().map(|(w, c)| {
            let e: i64 = w.letters().iter().map(|g| g.row as i64 - n).sum();
            (w.clone(), c * &Scalar::q_pow(sign * e + det_shift))
        }),
    );
    GlElement::raw(body, x.detpow())
}

/// Index convention of the matrix coproduct.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoproductConvention {
    /// `Δ z_a^α = Σ_k z_k^α ⊗ z_a^k`.
    RowToColumn,
    /// `Δ z_a^α = Σ_k z_a^k ⊗ z_k^α`.
    Transposed,
}

/// `Σ c · (w1 det^{-k}) ⊗ (w2 det^{-k})`, both legs in normal form.
#[derive(Debug, Clone)]
pub struct TensorPair {
    n: u8,
    detpow: u32,
    terms: BTreeMap<(Word, Word), Scalar>,
}

impl TensorPair {
    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn detpow(&self) -> u32 {
        self.detpow
    }

    pub fn terms(&self) -> &BTreeMap<(Word, Word), Scalar> {
        &self.terms
    }

    fn add_term(&mut self, key: (Word, Word), c: Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(key.clone()).or_insert_with(Scalar::zero);
        *e += &c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// Outer product of two GL elements with equal det-power.
    fn from_legs(left: &NcElement, right: &NcElement, detpow: u32, c: &Scalar) -> TensorPair {
        let mut t = TensorPair { n: left.n(), detpow, terms: BTreeMap::new() };
        for (w1, c1) in left.terms() {
            for (w2, c2) in right.terms() {
                t.add_term((w1.clone(), w2.clone()), &(c * c1) * c2);
            }
        }
        t
    }

    /// Componentwise product `(a ⊗ b)(c ⊗ d) = ac ⊗ bd`.
    pub fn multiply(&self, other: &TensorPair) -> Result<TensorPair> {
        let mut out = TensorPair { n: self.n, detpow: self.detpow + other.detpow, terms: BTreeMap::new() };
        for ((a, b), c1) in &self.terms {
            for ((c, d), c2) in &other.terms {
                let left = normal_form(self.n, [(a.concat(c), Scalar::one())])?;
                let right = normal_form(self.n, [(b.concat(d), Scalar::one())])?;
                let t = TensorPair::from_legs(&left, &right, 0, &(c1 * c2));
                for (k, v) in t.terms {
                    out.add_term(k, v);
                }
            }
        }
        Ok(out)
    }

    /// Same element with both legs over `det_q^{-k}`.
    pub fn lift_to(&self, k: u32) -> Result<TensorPair> {
        assert!(k >= self.detpow);
        if k == self.detpow {
            return Ok(self.clone());
        }
        let d = det_pow(self.n, k - self.detpow);
        let mut out = TensorPair { n: self.n, detpow: k, terms: BTreeMap::new() };
        for ((a, b), c) in &self.terms {
            let left = NcElement::from_normal_word(self.n, a.clone(), Scalar::one()).multiply(&d)?;
            let right = NcElement::from_normal_word(self.n, b.clone(), Scalar::one()).multiply(&d)?;
            for (key, v) in TensorPair::from_legs(&left, &right, k, c).terms {
                out.add_term(key, v);
            }
        }
        Ok(out)
    }

    /// `Σ f(first) · second`.
    pub fn contract_left(&self, f: impl Fn(&Word, u32) -> Result<Scalar>) -> Result<GlElement> {
        let mut body = NcElement::zero(self.n);
        for ((a, b), c) in &self.terms {
            let v = f(a, self.detpow)?;
            body = &body + &NcElement::from_normal_word(self.n, b.clone(), c * &v);
        }
        Ok(GlElement::raw(body, self.detpow))
    }

    /// `Σ f(second) · first`.
    pub fn contract_right(&self, f: impl Fn(&Word, u32) -> Result<Scalar>) -> Result<GlElement> {
        let mut body = NcElement::zero(self.n);
        for ((a, b), c) in &self.terms {
            let v = f(b, self.detpow)?;
            body = &body + &NcElement::from_normal_word(self.n, a.clone(), c * &v);
        }
        Ok(GlElement::raw(body, self.detpow))
    }

    pub fn equals(&self, other: &TensorPair) -> Result<bool> {
        let k = self.detpow.max(other.detpow);
        Ok(self.lift_to(k)?.terms == other.lift_to(k)?.terms)
    }
}

type Legs = Arc<Vec<((Word, Word), Scalar)>>;
type CoproductMemo = RwLock<HashMap<(u8, Word, bool), Legs>>;

fn coproduct_word(n: u8, w: &Word, conv: CoproductConvention) -> Result<Legs> {
    static M: OnceLock<CoproductMemo> = OnceLock::new();
    let memo = M.get_or_init(|| RwLock::new(HashMap::new()));
    let key = (n, w.clone(), conv == CoproductConvention::Transposed);
    if let Some(v) = memo.read().unwrap().get(&key) {
        return Ok(v.clone());
    }
    let mut t = TensorPair { n, detpow: 0, terms: BTreeMap::new() };
    let len = w.len();
    let mut choice = vec![1u8; len];
    loop {
        let (l, r): (Vec<Gen>, Vec<Gen>) = w
            .letters()
            .iter()
            .zip(&choice)
            .map(|(g, &k)| match conv {
                CoproductConvention::RowToColumn => (Gen::z(k, g.row), Gen::z(g.col, k)),
                CoproductConvention::Transposed => (Gen::z(g.col, k), Gen::z(k, g.row)),
            })
            .unzip();
        let left = normal_form(n, [(Word(l), Scalar::one())])?;
        let right = normal_form(n, [(Word(r), Scalar::one())])?;
        for (key, v) in TensorPair::from_legs(&left, &right, 0, &Scalar::one()).terms {
            t.add_term(key, v);
        }
        // odometer over k_1..k_len in 1..=n
        let mut i = 0;
        while i < len && choice[i] == n {
            choice[i] = 1;
            i += 1;
        }
        if i == len {
            break;
        }
        choice[i] += 1;
    }
    let v: Arc<Vec<_>> = Arc::new(t.terms.into_iter().collect());
    memo.write().unwrap().insert(key, v.clone());
    Ok(v)
}

/// The matrix coproduct, with `Δ(det_q^{-1}) = det_q^{-1} ⊗ det_q^{-1}`.
pub fn coproduct(x: &GlElement) -> Result<TensorPair> {
    coproduct_with(x, CoproductConvention::RowToColumn)
}

pub fn coproduct_with(x: &GlElement, conv: CoproductConvention) -> Result<TensorPair> {
    let n = x.n();
    let mut t = TensorPair { n, detpow: x.detpow(), terms: BTreeMap::new() };
    for (w, c) in x.body().terms() {
        if w.letters().iter().any(|g| g.starred) {
            return Err(Error::Config("coproduct of a starred word".into()));
        }
        for (key, v) in coproduct_word(n, w, conv)?.iter() {
            t.add_term(key.clone(), c * v);
        }
    }
    Ok(t)
}

/// The counit: `ε(z_a^α) = δ_{aα}`, `ε(det_q^{-1}) = 1`.
pub fn counit(x: &GlElement) -> Scalar {
    let mut acc = Scalar::zero();
    for (w, c) in x.body().terms() {
        if w.letters().iter().all(|g| g.col == g.row && !g.starred) {
            acc += c;
        }
    }
    acc
}

/// Memo of computed Haar values keyed by `(n, word, det-power)`.
#[derive(Debug)]
pub struct HaarTable {
    map: RwLock<HashMap<(u8, Word, u32), Scalar>>,
    solves: RwLock<usize>,
    convention: CoproductConvention,
}

impl Default for HaarTable {
    fn default() -> Self {
        HaarTable::with_convention(CoproductConvention::RowToColumn)
    }
}

impl HaarTable {
    pub fn new() -> Self {
        HaarTable::default()
    }

    /// A table whose invariance equations use the given coproduct.
    pub fn with_convention(convention: CoproductConvention) -> Self {
        HaarTable { map: RwLock::new(HashMap::new()), solves: RwLock::new(0), convention }
    }

    /// Process-wide table used by the free functions of this module.
    pub fn global() -> &'static HaarTable {
        static T: OnceLock<HaarTable> = OnceLock::new();
        T.get_or_init(HaarTable::new)
    }

    pub fn len(&self) -> usize {
        self.map.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of linear systems solved so far.
    pub fn solves(&self) -> usize {
        *self.solves.read().unwrap()
    }

    pub fn get(&self, n: u8, w: &Word, k: u32) -> Option<Scalar> {
        self.map.read().unwrap().get(&(n, w.clone(), k)).cloned()
    }

    /// All stored `(n, word, det-power, value)` entries, sorted.
    pub fn entries(&self) -> Vec<(u8, Word, u32, Scalar)> {
        let mut v: Vec<_> = self
            .map
            .read()
            .unwrap()
            .iter()
            .map(|((n, w, k), s)| (*n, w.clone(), *k, s.clone()))
            .collect();
        v.sort_by(|a, b| (a.0, &a.1, a.2).cmp(&(b.0, &b.1, b.2)));
        v
    }

    /// `h(x)` on C[U_n]_q.
    pub fn haar(&self, x: &GlElement) -> Result<Scalar> {
        let mut acc = Scalar::zero();
        for (w, c) in x.body().terms() {
            acc += &(c * &self.monomial(x.n(), w, x.detpow())?);
        }
        Ok(acc)
    }

    /// `h(w · det_q^{-k})`.
    pub fn monomial(&self, n: u8, w: &Word, k: u32) -> Result<Scalar> {
        if w.len() != n as usize * k as usize {
            return Ok(Scalar::zero());
        }
        if k == 0 {
            return Ok(Scalar::one());
        }
        if let Some(v) = self.get(n, w, k) {
            return Ok(v);
        }
        self.solve_block(n, w, k)?;
        self.get(n, w, k)
            .ok_or_else(|| Error::HaarDegenerate(format!("{w} missing after solve")))
    }

    fn solve_block(&self, n: u8, w: &Word, k: u32) -> Result<()> {
        let vals = solve_invariance(n, w, k, self.convention)?;
        *self.solves.write().unwrap() += 1;
        let mut map = self.map.write().unwrap();
        for (u, v) in vals {
            map.insert((n, u, k), v);
        }
        Ok(())
    }

    /// `(id ⊗ h)Δ(m) == h(m)·1` for the monomial `w · det_q^{-k}`.
    pub fn left_invariant_at(&self, n: u8, w: &Word, k: u32) -> Result<bool> {
        let m = GlElement::raw(NcElement::from_normal_word(n, w.clone(), Scalar::one()), k);
        let lhs = coproduct_with(&m, self.convention)?.contract_right(|b, kk| self.monomial(n, b, kk))?;
        let rhs = GlElement::scalar(n, self.monomial(n, w, k)?);
        Ok(lhs == rhs)
    }

    /// `(h ⊗ id)Δ(m) == h(m)·1`.
    pub fn right_invariant_at(&self, n: u8, w: &Word, k: u32) -> Result<bool> {
        let m = GlElement::raw(NcElement::from_normal_word(n, w.clone(), Scalar::one()), k);
        let lhs = coproduct_with(&m, self.convention)?.contract_left(|a, kk| self.monomial(n, a, kk))?;
        let rhs = GlElement::scalar(n, self.monomial(n, w, k)?);
        Ok(lhs == rhs)
    }

    /// `∫ f dν` over the Shilov boundary for `f ∈ Pol(Mat_n)_q`.
    pub fn integrate_boundary(&self, f: &NcElement) -> Result<Scalar> {
        self.integrate(&restrict(f)?)
    }

    /// Integral of an element already on the boundary.
    pub fn integrate(&self, f: &BoundaryElement) -> Result<Scalar> {
        self.haar(&to_un(f))
    }

    /// `(f, g) = ∫ (g|_S)* f|_S dν` for unstarred `f, g`.
    pub fn inner_product(&self, f: &NcElement, g: &NcElement) -> Result<Scalar> {
        if f.has_starred() || g.has_starred() {
            return Err(Error::Config("inner product takes elements of C[Mat_n]_q".into()));
        }
        let rf = restrict(f)?;
        let rg = restrict(g)?.star()?;
        self.integrate(&rg.multiply(&rf)?)
    }

    /// Load `n TAB monomial TAB value` records; a missing file is an empty cache.
    pub fn load(&self, path: &Path) -> Result<usize> {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(Error::Cache(format!("{}: {e}", path.display()))),
        };
        let mut count = 0;
        let mut map = self.map.write().unwrap();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |what: &str| Error::Cache(format!("{}:{}: {what}", path.display(), lineno + 1));
            let mut parts = line.split('\t');
            let (Some(n), Some(mono), Some(val), None) = (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(bad("expected three tab-separated fields"));
            };
            let n: u8 = n.trim().parse().map_err(|_| bad("bad n"))?;
            let (w, k) = parse_monomial(mono).map_err(|e| bad(&e))?;
            let v: Scalar = val.trim().parse().map_err(|_| bad("bad scalar"))?;
            map.insert((n, w, k), v);
            count += 1;
        }
        Ok(count)
    }

    /// Write all entries atomically (temporary file, then rename).
    pub fn save(&self, path: &Path) -> Result<()> {
        let io = |e: std::io::Error| Error::Cache(format!("{}: {e}", path.display()));
        let tmp = path.with_extension("tmp");
        {
            let mut f = fs::File::create(&tmp).map_err(io)?;
            for (n, w, k, v) in self.entries() {
                writeln!(f, "{n}\t{}\t{v}", format_monomial(&w, k)).map_err(io)?;
            }
            f.sync_all().map_err(io)?;
        }
        fs::rename(&tmp, path).map_err(io)
    }
}

/// Solve the right-invariance system for every monomial reachable from
/// `w · det_q^{-k}` through first coproduct legs, without the degree
/// shortcut. When `|w| != n·k` the unit lies in a different graded piece,
/// so the coefficient of `1` becomes the separate equation `h(u) = 0`.
pub fn solve_invariance(n: u8, w: &Word, k: u32, conv: CoproductConvention) -> Result<BTreeMap<Word, Scalar>> {
    let balanced = w.len() == n as usize * k as usize;
    let detk = det_pow(n, k);
    let mut index: BTreeMap<Word, usize> = BTreeMap::new();
    let mut order: Vec<Word> = Vec::new();
    let mut queue: VecDeque<Word> = VecDeque::new();
    let push = |u: &Word, index: &mut BTreeMap<Word, usize>, order: &mut Vec<Word>, queue: &mut VecDeque<Word>| {
        if !index.contains_key(u) {
            index.insert(u.clone(), order.len());
            order.push(u.clone());
            queue.push_back(u.clone());
        }
    };
    push(w, &mut index, &mut order, &mut queue);
    if balanced {
        for u in detk.terms().keys() {
            push(u, &mut index, &mut order, &mut queue);
        }
    }
    let mut coproducts = Vec::new();
    while let Some(u) = queue.pop_front() {
        let cp = coproduct_word(n, &u, conv)?;
        for ((a, _), _) in cp.iter() {
            push(a, &mut index, &mut order, &mut queue);
        }
        coproducts.push((u, cp));
    }
    let mut elim = Eliminator::new(order.len());
    if balanced {
        // h(det^k · det^{-k}) = 1
        let norm: Row = detk.terms().iter().map(|(u, c)| (index[u], c.clone())).collect();
        elim.push(norm, Scalar::one());
    }
    for (u, cp) in &coproducts {
        let mut rows: BTreeMap<&Word, Row> = BTreeMap::new();
        for ((a, b), c) in cp.iter() {
            let e = rows.entry(b).or_default().entry(index[a]).or_insert_with(Scalar::zero);
            *e += c;
        }
        if balanced {
            for (b, c) in detk.terms() {
                let e = rows.entry(b).or_default().entry(index[u]).or_insert_with(Scalar::zero);
                *e -= c;
            }
        } else {
            elim.push([(index[u], Scalar::one())].into_iter().collect(), Scalar::zero());
        }
        for (_, row) in rows {
            elim.push(row, Scalar::zero());
        }
    }
    match elim.solve() {
        Solution::Unique(vals) => Ok(order.into_iter().zip(vals).collect()),
        Solution::Inconsistent => Err(Error::HaarDegenerate(format!("no invariant functional through {w}"))),
        Solution::Underdetermined(d) => {
            Err(Error::HaarDegenerate(format!("{d}-dimensional family of solutions through {w}")))
        }
    }
}

/// `z[1,1] z[2,2] detinv^1`; the empty word is written `1`.
pub fn format_monomial(w: &Word, k: u32) -> String {
    let body = if w.is_empty() { "1".to_string() } else { w.to_string() };
    if k == 0 {
        body
    } else {
        format!("{body} detinv^{k}")
    }
}

pub fn parse_monomial(s: &str) -> std::result::Result<(Word, u32), String> {
    let mut letters = Vec::new();
    let mut k = 0;
    for tok in s.split_whitespace() {
        if tok == "1" {
            continue;
        }
        if let Some(p) = tok.strip_prefix("detinv") {
            k = match p.strip_prefix('^') {
                Some(e) => e.parse().map_err(|_| format!("bad exponent in {tok}"))?,
                None if p.is_empty() => 1,
                None => return Err(format!("bad token {tok}")),
            };
            continue;
        }
        let (starred, rest) = if let Some(r) = tok.strip_prefix("zs[") {
            (true, r)
        } else if let Some(r) = tok.strip_prefix("z[") {
            (false, r)
        } else {
            return Err(format!("bad token {tok}"));
        };
        let inner = rest.strip_suffix(']').ok_or_else(|| format!("bad token {tok}"))?;
        let (a, b) = inner.split_once(',').ok_or_else(|| format!("bad token {tok}"))?;
        let col: u8 = a.trim().parse().map_err(|_| format!("bad index in {tok}"))?;
        let row: u8 = b.trim().parse().map_err(|_| format!("bad index in {tok}"))?;
        letters.push(Gen { starred, col, row });
    }
    Ok((Word(letters), k))
}

/// `h(x)` with the process-wide table.
pub fn haar(x: &GlElement) -> Result<Scalar> {
    HaarTable::global().haar(x)
}

pub fn integrate_boundary(f: &NcElement) -> Result<Scalar> {
    HaarTable::global().integrate_boundary(f)
}

pub fn inner_product(f: &NcElement, g: &NcElement) -> Result<Scalar> {
    HaarTable::global().inner_product(f, g)
}

/// Distinct monomials stored for `n`, for reporting.
pub fn solved_monomials(table: &HaarTable, n: u8) -> BTreeSet<(Word, u32)> {
    table.entries().into_iter().filter(|e| e.0 == n).map(|e| (e.1, e.2)).collect()
}
