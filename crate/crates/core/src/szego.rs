//! Kernels in C[Mat_n]_q^op ⊗ C[Mat̄_n]_q and the Cauchy-Szegő integral.
//!
//! A [`KernelElement`] stores `Σ c · u ⊗ s` with `u` an unstarred and `s` a
//! starred normal word. Multiplication is opposite on the first leg, and
//! every product drops terms whose bidegree exceeds the truncation bound.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock, RwLock};
use std::time::Instant;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::haar::HaarTable;
use crate::ncalg::{normal_form, normal_words, z_letters, Gen, NcElement, Word};
use crate::qdet::{quantum_minor, IndexSet};
use crate::scalar::Scalar;
use crate::shilov::RectConfig;

/// Square `n × n` or the rectangular block of the last `m` rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    Square(u8),
    Rect(RectConfig),
}

impl Shape {
    pub fn new(n: u8, m: Option<u8>) -> Result<Shape> {
        if n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        match m {
            None => Ok(Shape::Square(n)),
            Some(m) => Ok(Shape::Rect(RectConfig::new(m, n)?)),
        }
    }

    pub fn n(&self) -> u8 {
        match self {
            Shape::Square(n) => *n,
            Shape::Rect(c) => c.n(),
        }
    }

    pub fn m(&self) -> Option<u8> {
        match self {
            Shape::Square(_) => None,
            Shape::Rect(c) => Some(c.m()),
        }
    }

    /// Rows over which `J'` ranges.
    pub fn rows(&self) -> Vec<u8> {
        match self {
            Shape::Square(n) => (1..=*n).collect(),
            Shape::Rect(c) => c.rows(),
        }
    }

    /// Unstarred letters of the coordinate algebra, in normal order.
    pub fn letters(&self) -> Vec<Gen> {
        match self {
            Shape::Square(n) => z_letters(*n),
            Shape::Rect(c) => c.letters(),
        }
    }

    /// Normal words of degree at most `d`.
    pub fn basis(&self, d: usize) -> Vec<Word> {
        let letters = self.letters();
        (0..=d).flat_map(|k| normal_words(&letters, k)).collect()
    }
}

/// Truncated element of the bigraded kernel algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelElement {
    n: u8,
    trunc: usize,
    terms: BTreeMap<(Word, Word), Scalar>,
}

impl KernelElement {
    pub fn zero(n: u8, trunc: usize) -> Self {
        KernelElement { n, trunc, terms: BTreeMap::new() }
    }

    pub fn one(n: u8, trunc: usize) -> Self {
        let mut k = KernelElement::zero(n, trunc);
        k.terms.insert((Word::empty(), Word::empty()), Scalar::one());
        k
    }

    /// `a ⊗ b` for unstarred `a` and starred `b`.
    pub fn tensor(a: &NcElement, b: &NcElement, trunc: usize) -> Result<Self> {
        if a.n() != b.n() {
            return Err(Error::SizeMismatch(format!("legs have n = {} and n = {}", a.n(), b.n())));
        }
        let mut k = KernelElement::zero(a.n(), trunc);
        for (u, c) in a.terms() {
            if u.bidegree().1 != 0 {
                return Err(Error::Config(format!("first leg must be unstarred, found {u}")));
            }
            for (s, e) in b.terms() {
                if s.bidegree().0 != 0 {
                    return Err(Error::Config(format!("second leg must be starred, found {s}")));
                }
                k.add_term(u.clone(), s.clone(), c * e);
            }
        }
        Ok(k)
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn truncation(&self) -> usize {
        self.trunc
    }

    pub fn terms(&self) -> &BTreeMap<(Word, Word), Scalar> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, u: &Word, s: &Word) -> Scalar {
        self.terms.get(&(u.clone(), s.clone())).cloned().unwrap_or_else(Scalar::zero)
    }

    fn add_term(&mut self, u: Word, s: Word, c: Scalar) {
        if c.is_zero() || u.len() > self.trunc || s.len() > self.trunc {
            return;
        }
        let key = (u, s);
        let e = self.terms.entry(key.clone()).or_insert_with(Scalar::zero);
        *e += &c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// Terms of bidegree `(k, l)`.
    pub fn component(&self, k: usize, l: usize) -> KernelElement {
        KernelElement {
            n: self.n,
            trunc: self.trunc,
            terms: self
                .terms
                .iter()
                .filter(|((u, s), _)| u.len() == k && s.len() == l)
                .map(|(key, c)| (key.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> KernelElement {
        let mut out = KernelElement::zero(self.n, self.trunc);
        for ((u, s), v) in &self.terms {
            out.add_term(u.clone(), s.clone(), v * c);
        }
        out
    }

    pub fn add(&self, other: &KernelElement) -> KernelElement {
        let mut out = self.clone();
        out.trunc = self.trunc.min(other.trunc);
        out.terms.retain(|(u, s), _| u.len() <= out.trunc && s.len() <= out.trunc);
        for ((u, s), v) in &other.terms {
            out.add_term(u.clone(), s.clone(), v.clone());
        }
        out
    }

    /// `(a ⊗ b)(c ⊗ d) = (c·a) ⊗ (b·d)`.
    pub fn multiply(&self, other: &KernelElement) -> Result<KernelElement> {
        if self.n != other.n {
            return Err(Error::SizeMismatch(format!("kernels have n = {} and n = {}", self.n, other.n)));
        }
        let trunc = self.trunc.min(other.trunc);
        let mut out = KernelElement::zero(self.n, trunc);
        for ((a, b), c1) in &self.terms {
            for ((c, d), c2) in &other.terms {
                if a.len() + c.len() > trunc || b.len() + d.len() > trunc {
                    continue;
                }
                let left = normal_form(self.n, [(c.concat(a), Scalar::one())])?;
                let right = normal_form(self.n, [(b.concat(d), Scalar::one())])?;
                let c12 = c1 * c2;
                for (u, x) in left.terms() {
                    for (s, y) in right.terms() {
                        out.add_term(u.clone(), s.clone(), &(&c12 * x) * y);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `(1 + self)^{-1}` as a truncated geometric series; `self` must have
    /// no bidegree-`(0,0)` part.
    pub fn one_plus_inverse(&self) -> Result<KernelElement> {
        if self.terms.keys().any(|(u, s)| u.is_empty() && s.is_empty()) {
            return Err(Error::Config("geometric series needs a kernel without constant term".into()));
        }
        let neg = self.scale(&-Scalar::one());
        let mut sum = KernelElement::one(self.n, self.trunc);
        let mut pow = KernelElement::one(self.n, self.trunc);
        for _ in 0..self.trunc {
            pow = pow.multiply(&neg)?;
            if pow.is_empty() {
                break;
            }
            sum = sum.add(&pow);
        }
        Ok(sum)
    }

    /// Coefficients at a numeric `q`, keyed by the two legs.
    pub fn specialize(&self, q: &BigRational) -> Result<BTreeMap<(Word, Word), BigRational>> {
        let mut out = BTreeMap::new();
        for (key, c) in &self.terms {
            let v = c.eval_at(q)?;
            if v != BigRational::from_integer(0.into()) {
                out.insert(key.clone(), v);
            }
        }
        Ok(out)
    }
}

/// `χ_k = Σ_{J', J''} z^{∧k}{}_{J''}^{J'} ⊗ (z^{∧k}{}_{J''}^{J'})*` with
/// `J'` over the rows of `shape`.
pub fn chi(shape: Shape, k: usize, trunc: usize) -> Result<KernelElement> {
    let n = shape.n();
    if k == 0 || k > n as usize {
        return Err(Error::Config(format!("chi index {k} not in 1..={n}")));
    }
    let all: Vec<u8> = (1..=n).collect();
    let mut out = KernelElement::zero(n, trunc);
    for rows in IndexSet::subsets(&shape.rows(), k) {
        for cols in IndexSet::subsets(&all, k) {
            let minor = quantum_minor(n, &rows, &cols)?;
            out = out.add(&KernelElement::tensor(&minor, &minor.star(), trunc)?);
        }
    }
    Ok(out)
}

/// `C_q = ∏_{j=0}^{n-1} (1 + Σ_k (-q^{2j})^k χ_k)^{-1}`, truncated at `(d, d)`.
pub fn szego_kernel(shape: Shape, d: usize) -> Result<Arc<KernelElement>> {
    type Memo = RwLock<HashMap<(Shape, usize), Arc<KernelElement>>>;
    static M: OnceLock<Memo> = OnceLock::new();
    let memo = M.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(k) = memo.read().unwrap().get(&(shape, d)) {
        return Ok(k.clone());
    }
    let k = Arc::new(build_kernel(shape, d)?);
    memo.write().unwrap().insert((shape, d), k.clone());
    Ok(k)
}

/// The factors `1 + Σ_k (-q^{2j})^k χ_k` for `j = 0, ..., n-1`.
pub fn kernel_factors(shape: Shape, d: usize) -> Result<Vec<KernelElement>> {
    let n = shape.n();
    let kmax = shape.rows().len().min(d);
    let chis: Vec<KernelElement> = (1..=kmax).map(|k| chi(shape, k, d)).collect::<Result<_>>()?;
    Ok((0..n as i64)
        .map(|j| {
            let mut f = KernelElement::one(n, d);
            for (i, c) in chis.iter().enumerate() {
                let k = i as u32 + 1;
                let w = Scalar::q_pow(2 * j).pow(k);
                let w = if k % 2 == 1 { -w } else { w };
                f = f.add(&c.scale(&w));
            }
            f
        })
        .collect())
}

fn build_kernel(shape: Shape, d: usize) -> Result<KernelElement> {
    let n = shape.n();
    let mut acc = KernelElement::one(n, d);
    for f in kernel_factors(shape, d)? {
        let mut nil = f;
        nil.terms.remove(&(Word::empty(), Word::empty()));
        acc = acc.multiply(&nil.one_plus_inverse()?)?;
    }
    Ok(acc)
}

/// How a first-leg word is turned into an element of C[Mat_n]_q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Emission {
    AsIs,
    Reversed,
}

/// `T f = Σ c · ∫ (s · f) dν · u` over kernel terms `c · u ⊗ s`.
pub fn apply_t(kernel: &KernelElement, f: &NcElement, table: &HaarTable) -> Result<NcElement> {
    apply_t_with(kernel, f, table, Emission::AsIs).map(|(x, _)| x)
}

/// As [`apply_t`]; also returns the number of kernel terms that contributed.
pub fn apply_t_with(
    kernel: &KernelElement,
    f: &NcElement,
    table: &HaarTable,
    emission: Emission,
) -> Result<(NcElement, usize)> {
    let n = kernel.n();
    if f.n() != n {
        return Err(Error::SizeMismatch(format!("kernel has n = {n}, input has n = {}", f.n())));
    }
    if f.has_starred() {
        return Err(Error::Config("the integral operator acts on C[Mat_n]_q".into()));
    }
    if f.max_len() > kernel.truncation() {
        return Err(Error::TruncationTooSmall { kernel: kernel.truncation(), input: f.max_len() });
    }
    let degrees: Vec<usize> = f.terms().keys().map(Word::len).collect();
    let mut by_second: BTreeMap<&Word, Vec<(&Word, &Scalar)>> = BTreeMap::new();
    for ((u, s), c) in kernel.terms() {
        // the integral vanishes unless deg s = deg of some component of f
        if degrees.contains(&s.len()) {
            by_second.entry(s).or_default().push((u, c));
        }
    }
    let mut out = NcElement::zero(n);
    let mut used = 0;
    for (s, firsts) in by_second {
        let sf = NcElement::from_normal_word(n, s.clone(), Scalar::one()).multiply(f)?;
        let v = table.integrate_boundary(&sf)?;
        if v.is_zero() {
            continue;
        }
        for (u, c) in firsts {
            let word = match emission {
                Emission::AsIs => u.clone(),
                Emission::Reversed => Word(u.letters().iter().rev().copied().collect()),
            };
            let e = normal_form(n, [(word, c * &v)])?;
            out = &out + &e;
            used += 1;
        }
    }
    Ok((out, used))
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproductionConfig {
    pub n: u8,
    pub m: Option<u8>,
    pub degree: usize,
    pub emission: Emission,
    pub q_probe: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonomialResult {
    pub monomial: String,
    pub pass: bool,
    /// `T f = f` exactly.
    pub reproduced: bool,
    /// Same output with the kernel truncated one degree higher.
    pub stable: bool,
    /// Kernel terms with nonzero contribution.
    pub terms: usize,
    pub millis: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Totals {
    pub monomials: usize,
    pub passed: usize,
    pub failed: usize,
    pub kernel_terms: usize,
    pub millis: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproductionReport {
    pub config: ReproductionConfig,
    pub per_monomial: Vec<MonomialResult>,
    pub totals: Totals,
}

impl ReproductionReport {
    pub fn all_pass(&self) -> bool {
        self.totals.failed == 0
    }
}

/// Run `T` over every basis monomial of degree at most `degree`.
pub fn verify_reproduction(
    shape: Shape,
    degree: usize,
    table: &HaarTable,
    emission: Emission,
    q_probe: Option<&BigRational>,
) -> Result<ReproductionReport> {
    let start = Instant::now();
    let n = shape.n();
    let kernel = szego_kernel(shape, degree)?;
    let wider = szego_kernel(shape, degree + 1)?;
    let basis = shape.basis(degree);
    let per_monomial: Vec<MonomialResult> = basis
        .par_iter()
        .map(|w| {
            let t0 = Instant::now();
            let f = NcElement::from_normal_word(n, w.clone(), Scalar::one());
            let run = || -> Result<(bool, bool, usize, Option<f64>)> {
                let (tf, used) = apply_t_with(&kernel, &f, table, emission)?;
                let (tf2, _) = apply_t_with(&wider, &f, table, emission)?;
                let diff = &tf - &f;
                let residual = match q_probe {
                    Some(q) => Some(
                        diff.terms()
                            .values()
                            .map(|c| c.eval_at(q).map(|v| v.to_f64().unwrap_or(f64::NAN).abs()))
                            .collect::<std::result::Result<Vec<f64>, _>>()?
                            .into_iter()
                            .fold(0.0, f64::max),
                    ),
                    None => None,
                };
                Ok((diff.is_zero(), tf == tf2, used, residual))
            };
            let label = if w.is_empty() { "1".to_string() } else { w.to_string() };
            match run() {
                Ok((reproduced, stable, terms, probe_residual)) => MonomialResult {
                    monomial: label,
                    pass: reproduced && stable,
                    reproduced,
                    stable,
                    terms,
                    millis: t0.elapsed().as_millis(),
                    probe_residual,
                    error: None,
                },
                Err(e) => MonomialResult {
                    monomial: label,
                    pass: false,
                    reproduced: false,
                    stable: false,
                    terms: 0,
                    millis: t0.elapsed().as_millis(),
                    probe_residual: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let passed = per_monomial.iter().filter(|r| r.pass).count();
    Ok(ReproductionReport {
        config: ReproductionConfig {
            n,
            m: shape.m(),
            degree,
            emission,
            q_probe: q_probe.map(|q| q.to_string()),
        },
        totals: Totals {
            monomials: per_monomial.len(),
            passed,
            failed: per_monomial.len() - passed,
            kernel_terms: kernel.len(),
            millis: start.elapsed().as_millis(),
        },
        per_monomial,
    })
}
