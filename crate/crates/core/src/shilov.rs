//! Restriction of Pol(Mat_n)_q onto the Shilov boundary.
//!
//! The boundary algebra is C[GL_n]_q equipped with the cofactor involution
//! of [`GlElement::gl_star`]. Restriction keeps every `z_a^α` and sends
//! `(z_a^α)*` to its cofactor image, so a normal word `u · s` (unstarred
//! prefix, starred suffix) maps to `u · ∏ images(s)`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::ncalg::{Gen, NcElement, Word};
use crate::qdet::{letter_star_image, GlElement};
use crate::scalar::Scalar;

/// An element of Pol(S(U))_q: a GL element whose involution is `gl_star`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryElement(pub GlElement);

impl BoundaryElement {
    pub fn inner(&self) -> &GlElement {
        &self.0
    }

    pub fn into_inner(self) -> GlElement {
        self.0
    }

    pub fn star(&self) -> Result<BoundaryElement> {
        Ok(BoundaryElement(self.0.gl_star()?))
    }

    pub fn multiply(&self, other: &BoundaryElement) -> Result<BoundaryElement> {
        Ok(BoundaryElement(self.0.mul_raw(&other.0)?))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn canonical(&self) -> Result<BoundaryElement> {
        Ok(BoundaryElement(self.0.canonical()?))
    }
}

impl fmt::Display for BoundaryElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn restrict_word(n: u8, w: &Word) -> Result<(NcElement, u32)> {
    let split = w.letters().iter().position(|g| g.starred).unwrap_or(w.len());
    let prefix = Word(w.letters()[..split].to_vec());
    let mut body = NcElement::from_normal_word(n, prefix, Scalar::one());
    for g in &w.letters()[split..] {
        let (coef, minor) = letter_star_image(n, g.col, g.row);
        body = body.multiply(&minor)?.scale(&coef);
    }
    Ok((body, (w.len() - split) as u32))
}

/// The restriction homomorphism `z ↦ z`, `z* ↦ gl_star(z)`. The result is
/// not reduced; call [`BoundaryElement::canonical`] for the reduced form.
pub fn restrict(x: &NcElement) -> Result<BoundaryElement> {
    let n = x.n();
    let mut by_pow: BTreeMap<u32, NcElement> = BTreeMap::new();
    for (w, c) in x.terms() {
        let (body, k) = restrict_word(n, w)?;
        let slot = by_pow.entry(k).or_insert_with(|| NcElement::zero(n));
        *slot = &*slot + &body.scale(c);
    }
    let mut acc = GlElement::zero(n);
    for (k, body) in by_pow {
        acc = acc.try_add(&GlElement::raw(body, k))?;
    }
    Ok(BoundaryElement(acc))
}

/// `Σ_j q^{2n-α-β} z_j^α (z_j^β)* - δ^{αβ}`.
pub fn boundary_relation(n: u8, alpha: u8, beta: u8) -> Result<NcElement> {
    let mut terms = Vec::new();
    let c = Scalar::q_pow(2 * n as i64 - alpha as i64 - beta as i64);
    for j in 1..=n {
        let w = Word(vec![Gen::z(j, alpha).check(n)?, Gen::zs(j, beta).check(n)?]);
        terms.push((w, c.clone()));
    }
    if alpha == beta {
        terms.push((Word::empty(), -Scalar::one()));
    }
    crate::ncalg::normal_form(n, terms)
}

/// True iff `x` lies in the kernel of the restriction map.
pub fn kernel_test(x: &NcElement) -> Result<bool> {
    Ok(restrict(x)?.is_zero())
}

/// An `m × n` rectangular block: generators `z_a^α` with `α > n - m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RectConfig {
    m: u8,
    n: u8,
}

impl RectConfig {
    pub fn new(m: u8, n: u8) -> Result<RectConfig> {
        if m == 0 || m >= n {
            return Err(Error::Config(format!("rectangular case needs 1 <= m < n, got m = {m}, n = {n}")));
        }
        Ok(RectConfig { m, n })
    }

    pub fn m(&self) -> u8 {
        self.m
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    /// The admissible rows `n-m+1, ..., n`.
    pub fn rows(&self) -> Vec<u8> {
        (self.n - self.m + 1..=self.n).collect()
    }

    pub fn contains(&self, g: Gen) -> bool {
        g.row > self.n - self.m
    }

    /// The unstarred letters of the block, in normal order.
    pub fn letters(&self) -> Vec<Gen> {
        let mut v: Vec<Gen> = (1..=self.n)
            .flat_map(|c| self.rows().into_iter().map(move |r| Gen::z(c, r)))
            .collect();
        v.sort();
        v
    }

    pub fn check(&self, x: &NcElement) -> Result<()> {
        if x.n() != self.n {
            return Err(Error::SizeMismatch(format!("element has n = {}, block has n = {}", x.n(), self.n)));
        }
        for w in x.terms().keys() {
            if let Some(g) = w.letters().iter().find(|g| !self.contains(**g)) {
                return Err(Error::OutsideRectangle {
                    col: g.col as usize,
                    row: g.row as usize,
                    min_row_exclusive: (self.n - self.m) as usize,
                });
            }
        }
        Ok(())
    }
}

/// Restriction for the rectangular block: inclusion into Pol(Mat_n)_q
/// followed by [`restrict`].
pub fn rect_restrict(cfg: &RectConfig, x: &NcElement) -> Result<BoundaryElement> {
    cfg.check(x)?;
    restrict(x)
}

/// The boundary relation for rows `α, β` of the block.
pub fn rect_boundary_relation(cfg: &RectConfig, alpha: u8, beta: u8) -> Result<NcElement> {
    for r in [alpha, beta] {
        if r <= cfg.n - cfg.m || r > cfg.n {
            return Err(Error::OutsideRectangle {
                col: 1,
                row: r as usize,
                min_row_exclusive: (cfg.n - cfg.m) as usize,
            });
        }
    }
    boundary_relation(cfg.n, alpha, beta)
}
