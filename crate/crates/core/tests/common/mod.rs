//! Test oracles written directly from the defining relations, independent
//! of the rewrite tables inside the library.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use qball::ncalg::{Gen, NcElement, Word};
use qball::scalar::Scalar;
use rand::Rng;

pub fn q(k: i64) -> Scalar {
    Scalar::q_pow(k)
}

pub fn int(k: i64) -> Scalar {
    Scalar::from_int(k)
}

pub fn word(n: u8, gens: &[Gen]) -> NcElement {
    NcElement::from_word(n, Word(gens.to_vec())).unwrap()
}

/// The R-matrix entry `R_{ij}^{kl}` by cases.
pub fn r_entry(i: u8, j: u8, k: u8, l: u8) -> Scalar {
    if i != j && i == k && j == l {
        q(-1)
    } else if i == j && j == k && k == l {
        int(1)
    } else if i == j && k == l && l > j {
        -(q(-2) - int(1))
    } else {
        Scalar::zero()
    }
}

/// Every instance of the holomorphic relations and their adjoints, as
/// `LHS - RHS` in unreduced form (a list of words with coefficients).
pub type Relation = Vec<(Vec<Gen>, Scalar)>;

pub fn holomorphic_relations(n: u8) -> Vec<(String, Relation)> {
    let mut out = Vec::new();
    let qq = q(1) - q(-1);
    for a in 1..=n {
        for al in 1..=n {
            for b in 1..=n {
                for be in 1..=n {
                    let x = Gen::z(a, al);
                    let y = Gen::z(b, be);
                    let rel: Option<Vec<(Vec<Gen>, Scalar)>> = if (a == b && al < be) || (a < b && al == be) {
                        Some(vec![(vec![x, y], int(1)), (vec![y, x], -q(1))])
                    } else if al < be && a > b {
                        Some(vec![(vec![x, y], int(1)), (vec![y, x], int(-1))])
                    } else if al < be && a < b {
                        Some(vec![
                            (vec![x, y], int(1)),
                            (vec![y, x], int(-1)),
                            (vec![Gen::z(a, be), Gen::z(b, al)], -qq.clone()),
                        ])
                    } else {
                        None
                    };
                    if let Some(rel) = rel {
                        // the adjoint reverses every word; q is real
                        let adj: Vec<(Vec<Gen>, Scalar)> = rel
                            .iter()
                            .map(|(w, c)| (w.iter().rev().map(|g| g.star()).collect(), c.clone()))
                            .collect();
                        out.push((format!("{x} {y}"), rel));
                        out.push((format!("({x} {y})*"), adj));
                    }
                }
            }
        }
    }
    out
}

/// Right-hand side of the mixed relation for `(z_b^β)* z_a^α`, as normal words.
pub fn mixed_rhs(n: u8, b: u8, be: u8, a: u8, al: u8) -> Vec<(Vec<Gen>, Scalar)> {
    let mut out = Vec::new();
    for a1 in 1..=n {
        for b1 in 1..=n {
            for al1 in 1..=n {
                for be1 in 1..=n {
                    let c = &(&q(2) * &r_entry(b, a, b1, a1)) * &r_entry(be, al, be1, al1);
                    if !c.is_zero() {
                        out.push((vec![Gen::z(a1, al1), Gen::zs(b1, be1)], c));
                    }
                }
            }
        }
    }
    if a == b && al == be {
        out.push((vec![], int(1) - q(2)));
    }
    out
}

pub fn combine(n: u8, terms: &[(Vec<Gen>, Scalar)]) -> NcElement {
    qball::ncalg::normal_form(n, terms.iter().map(|(w, c)| (Word(w.clone()), c.clone()))).unwrap()
}

/// `Σ_j q^{2n-α-β} z_j^α (z_j^β)* - δ^{αβ}`.
pub fn boundary_relation(n: u8, al: u8, be: u8) -> Vec<(Vec<Gen>, Scalar)> {
    let mut out: Vec<(Vec<Gen>, Scalar)> = (1..=n)
        .map(|j| (vec![Gen::z(j, al), Gen::zs(j, be)], q(2 * n as i64 - al as i64 - be as i64)))
        .collect();
    if al == be {
        out.push((vec![], int(-1)));
    }
    out
}

pub fn all_letters(n: u8) -> Vec<Gen> {
    let mut v = Vec::new();
    for c in 1..=n {
        for r in 1..=n {
            v.push(Gen::z(c, r));
            v.push(Gen::zs(c, r));
        }
    }
    v
}

pub fn random_word(rng: &mut impl Rng, letters: &[Gen], min: usize, max: usize) -> Vec<Gen> {
    let len = rng.gen_range(min..=max);
    (0..len).map(|_| letters[rng.gen_range(0..letters.len())]).collect()
}

pub fn random_coeff(rng: &mut impl Rng) -> Scalar {
    let k = rng.gen_range(1..=3i64) * if rng.gen_bool(0.5) { 1 } else { -1 };
    &int(k) * &q(rng.gen_range(-2..=2))
}

pub fn random_element(rng: &mut impl Rng, n: u8, letters: &[Gen], terms: usize, max_len: usize) -> NcElement {
    let ts: Vec<(Vec<Gen>, Scalar)> =
        (0..terms).map(|_| (random_word(rng, letters, 0, max_len), random_coeff(rng))).collect();
    combine(n, &ts)
}

pub fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Commutative polynomials over Q in `vars` variables, keyed by exponent vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CPoly {
    pub vars: usize,
    pub terms: BTreeMap<Vec<u32>, BigRational>,
}

impl CPoly {
    pub fn constant(vars: usize, c: i64) -> CPoly {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(vec![0; vars], BigRational::from_integer(BigInt::from(c)));
        }
        CPoly { vars, terms }
    }

    pub fn var(vars: usize, i: usize) -> CPoly {
        let mut e = vec![0; vars];
        e[i] = 1;
        CPoly { vars, terms: [(e, BigRational::from_integer(1.into()))].into_iter().collect() }
    }

    fn insert(&mut self, e: Vec<u32>, c: BigRational) {
        let zero = BigRational::from_integer(0.into());
        let v = self.terms.entry(e.clone()).or_insert_with(|| zero.clone());
        *v += c;
        if *v == zero {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, o: &CPoly) -> CPoly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.insert(e.clone(), c.clone());
        }
        r
    }

    pub fn scale(&self, k: i64) -> CPoly {
        let mut r = CPoly { vars: self.vars, terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            r.insert(e.clone(), c * BigRational::from_integer(k.into()));
        }
        r
    }

    /// Product, dropping monomials of total degree above `max_deg`.
    pub fn mul(&self, o: &CPoly, max_deg: u32) -> CPoly {
        let mut r = CPoly { vars: self.vars, terms: BTreeMap::new() };
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
                if e.iter().sum::<u32>() <= max_deg {
                    r.insert(e, c1 * c2);
                }
            }
        }
        r
    }
}

/// Variable index of `z_a^α` (first `n²` slots) and of `conj(ζ_a^α)`.
pub fn z_var(n: u8, a: u8, al: u8) -> usize {
    (a as usize - 1) * n as usize + (al as usize - 1)
}

pub fn zeta_var(n: u8, a: u8, al: u8) -> usize {
    (n as usize) * (n as usize) + z_var(n, a, al)
}

/// Taylor expansion of `det(1 - z ζ*)^{-n}` through total degree `2d`, where
/// `(z ζ*)_{αβ} = Σ_j z_j^α conj(ζ_j^β)`.
pub fn classical_szego(n: u8, d: u32) -> CPoly {
    let vars = 2 * (n as usize) * (n as usize);
    let max = 2 * d;
    let m = |al: u8, be: u8| -> CPoly {
        (1..=n).fold(CPoly::constant(vars, 0), |acc, j| {
            acc.add(&CPoly::var(vars, z_var(n, j, al)).mul(&CPoly::var(vars, zeta_var(n, j, be)), max))
        })
    };
    // det(1 - M) by the Leibniz formula
    let entry = |i: u8, j: u8| -> CPoly {
        let e = m(i, j).scale(-1);
        if i == j {
            e.add(&CPoly::constant(vars, 1))
        } else {
            e
        }
    };
    let mut det = CPoly::constant(vars, 0);
    let idx: Vec<u8> = (1..=n).collect();
    for perm in permutations(&idx) {
        let inv = (0..perm.len())
            .flat_map(|i| (i + 1..perm.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| perm[i] > perm[j])
            .count();
        let mut t = CPoly::constant(vars, if inv % 2 == 0 { 1 } else { -1 });
        for (i, &p) in perm.iter().enumerate() {
            t = t.mul(&entry(i as u8 + 1, p), max);
        }
        det = det.add(&t);
    }
    // det = 1 - s, and (1 - s)^{-n} = Σ_k C(n+k-1, k) s^k
    let s = CPoly::constant(vars, 1).add(&det.scale(-1));
    let mut out = CPoly::constant(vars, 0);
    let mut pow = CPoly::constant(vars, 1);
    for k in 0..=max as u64 {
        out = out.add(&pow.scale(binomial(n as u64 + k - 1, k) as i64));
        pow = pow.mul(&s, max);
        if pow.terms.is_empty() {
            break;
        }
    }
    out
}

pub fn permutations(v: &[u8]) -> Vec<Vec<u8>> {
    if v.len() <= 1 {
        return vec![v.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..v.len() {
        let mut rest = v.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}
