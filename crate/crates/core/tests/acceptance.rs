//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use nalgebra::{DMatrix, SymmetricEigen};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use qball::haar::HaarTable;
use qball::ncalg::{normal_form, normal_form_with_strategy, Gen, NcElement, Strategy, Word, DEFAULT_BUDGET};
use qball::qdet::GlElement;
use qball::scalar::Scalar;
use qball::shilov::restrict;
use qball::szego::{chi, szego_kernel, verify_reproduction, Emission, Shape};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Smallest admissible Gram eigenvalue at q = 1/2.
const GRAM_MARGIN: f64 = 1e-9;
const PSI_N3_BUDGET: Duration = Duration::from_secs(600);
const REPRODUCTION_BUDGET: Duration = Duration::from_secs(1800);

type Check = fn() -> Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn relation_soundness() -> Result<String, String> {
    let mut count = 0;
    for n in 2..=3u8 {
        for (name, rel) in holomorphic_relations(n) {
            ensure(combine(n, &rel).is_zero(), || format!("n={n}: {name} does not reduce to 0"))?;
            count += 1;
        }
        for b in 1..=n {
            for be in 1..=n {
                for a in 1..=n {
                    for al in 1..=n {
                        let mut rel = mixed_rhs(n, b, be, a, al);
                        for t in &mut rel {
                            t.1 = -t.1.clone();
                        }
                        rel.push((vec![Gen::zs(b, be), Gen::z(a, al)], int(1)));
                        ensure(combine(n, &rel).is_zero(), || {
                            format!("n={n}: mixed relation zs[{b},{be}] z[{a},{al}] does not reduce to 0")
                        })?;
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{count} relation instances reduce to 0 at n = 2, 3"))
}

fn pbw_dimensions() -> Result<String, String> {
    for n in 1..=3u8 {
        let letters = all_letters(n);
        for d in 0..=4usize {
            let mut fixed = 0u64;
            let mut idx = vec![0usize; d];
            loop {
                let w = Word(idx.iter().map(|&i| letters[i]).collect());
                if w.is_normal() {
                    let nf = NcElement::from_word(n, w.clone()).map_err(|e| e.to_string())?;
                    ensure(nf.len() == 1 && nf.coeff(&w).is_one(), || format!("normal word {w} is not fixed"))?;
                    fixed += 1;
                }
                let mut i = 0;
                while i < d && idx[i] + 1 == letters.len() {
                    idx[i] = 0;
                    i += 1;
                }
                if i == d {
                    break;
                }
                idx[i] += 1;
            }
            let expect = binomial(letters.len() as u64 + d as u64 - 1, d as u64);
            ensure(fixed == expect, || format!("n={n} d={d}: {fixed} normal words, expected {expect}"))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let letters = all_letters(2);
    let trials = 250;
    for _ in 0..trials {
        let w = Word(random_word(&mut rng, &letters, 2, 7));
        let memo = normal_form(2, [(w.clone(), Scalar::one())]).map_err(|e| e.to_string())?;
        for s in [Strategy::Leftmost, Strategy::Rightmost] {
            let other = normal_form_with_strategy(2, [(w.clone(), Scalar::one())], s, DEFAULT_BUDGET)
                .map_err(|e| e.to_string())?;
            ensure(memo == other, || format!("{w}: {s:?} gives a different normal form"))?;
        }
        ensure(memo.terms().keys().all(Word::is_normal), || format!("{w}: output not normal"))?;
    }
    Ok(format!("normal word counts match C(2n²+d-1, d) for n <= 3, d <= 4; {trials} random words agree across strategies"))
}

fn lemma_involution() -> Result<String, String> {
    for n in 1..=3u8 {
        for c in 1..=n {
            for r in 1..=n {
                let z = GlElement::z(n, c, r).unwrap();
                let zz = z.gl_star().and_then(|s| s.gl_star()).map_err(|e| e.to_string())?;
                ensure(zz == z, || format!("n={n}: star is not involutive on z[{c},{r}]"))?;
            }
        }
        let d = GlElement::det(n);
        let ds = d.gl_star().map_err(|e| e.to_string())?;
        let want = GlElement::scalar(n, q(-(n as i64) * (n as i64 - 1)));
        ensure(d.gl_multiply(&ds).unwrap() == want, || format!("n={n}: det det* wrong"))?;
        ensure(ds.gl_multiply(&d).unwrap() == want, || format!("n={n}: det* det wrong"))?;
    }
    Ok("star involutive on generators; det det* = det* det = q^(-n(n-1)) for n = 1, 2, 3".into())
}

fn psi_cases(n: u8) -> Result<usize, String> {
    let mut cases = 0;
    for b in 1..=n {
        for be in 1..=n {
            for a in 1..=n {
                for al in 1..=n {
                    let lhs = restrict(&NcElement::zs(n, b, be).unwrap())
                        .and_then(|s| s.multiply(&restrict(&NcElement::z(n, a, al).unwrap())?))
                        .map_err(|e| e.to_string())?;
                    let mut rhs = GlElement::zero(n);
                    for (w, c) in mixed_rhs(n, b, be, a, al) {
                        let x = NcElement::from_word(n, Word(w)).unwrap().scale(&c);
                        rhs = rhs.try_add(restrict(&x).unwrap().inner()).unwrap();
                    }
                    ensure(lhs.inner() == &rhs, || format!("n={n}: case zs[{b},{be}] z[{a},{al}] differs"))?;
                    cases += 1;
                }
            }
        }
    }
    Ok(cases)
}

fn restriction_theorem() -> Result<String, String> {
    let c2 = psi_cases(2)?;
    let t = Instant::now();
    let c3 = psi_cases(3)?;
    let el = t.elapsed();
    ensure(el <= PSI_N3_BUDGET, || format!("n = 3 sweep took {el:?}"))?;
    Ok(format!("{c2} cases at n = 2 and {c3} cases at n = 3 map to equal boundary elements ({} ms at n = 3)", el.as_millis()))
}

fn boundary_ideal() -> Result<String, String> {
    for n in 2..=3u8 {
        for al in 1..=n {
            for be in 1..=n {
                let rel = combine(n, &boundary_relation(n, al, be));
                ensure(restrict(&rel).unwrap().is_zero(), || format!("n={n}: relation ({al},{be}) survives"))?;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let samples = 20;
    for i in 0..samples {
        let n = if i < 15 { 2 } else { 3 };
        let letters = all_letters(n);
        let x = random_element(&mut rng, n, &letters, 2, 2);
        let y = random_element(&mut rng, n, &letters, 2, 2);
        let al = (i % n as usize) as u8 + 1;
        let be = ((i / 2) % n as usize) as u8 + 1;
        let rel = combine(n, &boundary_relation(n, al, be));
        let member = &(&x * &rel) * &y;
        ensure(restrict(&member).unwrap().is_zero(), || format!("ideal sample {i} survives restriction"))?;
    }
    Ok(format!("all boundary relations at n = 2, 3 and {samples} random ideal members restrict to 0"))
}

fn haar_criterion() -> Result<String, String> {
    let mut checked = 0;
    let mut details = Vec::new();
    for n in 1..=3u8 {
        let t = HaarTable::new();
        ensure(t.haar(&GlElement::one(n)).map_err(|e| e.to_string())?.is_one(), || format!("n={n}: h(1) != 1"))?;
        let f = &NcElement::zs(n, n, n).unwrap() * &NcElement::z(n, n, n).unwrap();
        let v = t.integrate_boundary(&f).map_err(|e| e.to_string())?;
        let want = (int(1) - q(2)) / (int(1) - q(2 * n as i64));
        ensure(v == want, || format!("n={n}: got {v}, expected {want}"))?;
        for (_, w, k, _) in t.entries() {
            ensure(t.left_invariant_at(n, &w, k).unwrap(), || format!("n={n}: {w} detinv^{k} not left invariant"))?;
            checked += 1;
        }
        details.push(format!("n={n}: {v}"));
    }
    Ok(format!("unique solves; h(1) = 1; {}; left invariance on {checked} solved monomials", details.join(", ")))
}

fn kernel_algebra() -> Result<String, String> {
    let sq2 = Shape::new(2, None).unwrap();
    for k in 1..=2 {
        for l in 1..=2 {
            let a = chi(sq2, k, 4).unwrap();
            let b = chi(sq2, l, 4).unwrap();
            ensure(a.multiply(&b).unwrap() == b.multiply(&a).unwrap(), || format!("chi_{k} chi_{l} do not commute"))?;
        }
    }
    for (n, d) in [(1u8, 3usize), (2, 2), (3, 1)] {
        let c = szego_kernel(Shape::new(n, None).unwrap(), d).unwrap();
        ensure(c.coeff(&Word::empty(), &Word::empty()).is_one(), || format!("n={n}: constant term not 1"))?;
    }
    let n = 2u8;
    let c = szego_kernel(sq2, 2).unwrap();
    let one = BigRational::from_integer(1.into());
    let at_one = c.specialize(&one).map_err(|e| e.to_string())?;
    let oracle = classical_szego(n, 2);
    let mut ours = CPoly::constant(oracle.vars, 0);
    for ((u, s), v) in at_one {
        let mut e = vec![0u32; oracle.vars];
        for g in u.letters() {
            e[z_var(n, g.col, g.row)] += 1;
        }
        for g in s.letters() {
            e[zeta_var(n, g.col, g.row)] += 1;
        }
        ours.terms.insert(e, v);
    }
    ensure(ours == oracle, || "q -> 1 limit differs from det(1 - z zeta*)^-2".into())?;
    Ok(format!(
        "chi_k commute (n = 2, truncation 4); constant term 1; q -> 1 limit matches det(1 - z zeta*)^-2 on {} monomials",
        oracle.terms.len()
    ))
}

fn reproduction() -> Result<String, String> {
    let start = Instant::now();
    let mut parts = Vec::new();
    for (n, m, d) in [(1u8, None, 5usize), (2, None, 2), (2, Some(1), 2)] {
        let t = HaarTable::new();
        let r = verify_reproduction(Shape::new(n, m).unwrap(), d, &t, Emission::AsIs, None).map_err(|e| e.to_string())?;
        let bad: Vec<&str> = r.per_monomial.iter().filter(|x| !x.pass).map(|x| x.monomial.as_str()).collect();
        ensure(bad.is_empty(), || format!("n={n} m={m:?}: failing {bad:?}"))?;
        parts.push(format!(
            "{}{n}, D = {d}: {}/{}",
            m.map(|m| format!("m = {m}, n = ")).unwrap_or_else(|| "n = ".into()),
            r.totals.passed,
            r.totals.monomials
        ));
    }
    let el = start.elapsed();
    ensure(el <= REPRODUCTION_BUDGET, || format!("took {el:?}"))?;
    Ok(format!("T f = f and truncation-stable: {}", parts.join("; ")))
}

fn positivity() -> Result<String, String> {
    let n = 2u8;
    let basis = Shape::new(n, None).unwrap().basis(2);
    let t = HaarTable::new();
    let half = BigRational::new(1.into(), 2.into());
    let k = basis.len();
    let elems: Vec<NcElement> = basis.iter().map(|w| NcElement::from_word(n, w.clone()).unwrap()).collect();
    let g: Vec<Vec<Scalar>> = elems
        .iter()
        .map(|a| elems.iter().map(|b| t.inner_product(a, b).map_err(|e| e.to_string())).collect())
        .collect::<Result<_, _>>()?;
    for (i, row) in g.iter().enumerate() {
        for (j, x) in row.iter().enumerate().take(i) {
            ensure(*x == g[j][i], || format!("Gram matrix not symmetric at ({i},{j})"))?;
        }
    }
    let m = DMatrix::from_fn(k, k, |i, j| g[i][j].eval_at(&half).unwrap().to_f64().unwrap());
    let min = SymmetricEigen::new(m).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    ensure(min > GRAM_MARGIN, || format!("smallest eigenvalue {min:e}"))?;
    Ok(format!("{k} x {k} Gram matrix at q = 1/2 is symmetric, smallest eigenvalue {min:.3e} > {GRAM_MARGIN:e}"))
}

fn main() {
    let criteria: [(&str, Check); 9] = [
        ("relation soundness", relation_soundness),
        ("PBW dimensions and confluence", pbw_dimensions),
        ("involution on C[GL_n]_q", lemma_involution),
        ("restriction respects the mixed relations", restriction_theorem),
        ("boundary relations generate part of the kernel", boundary_ideal),
        ("Haar functional", haar_criterion),
        ("kernel algebra", kernel_algebra),
        ("reproduction", reproduction),
        ("positivity probe", positivity),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let ms = t.elapsed().as_millis();
        match res {
            Ok(msg) => println!("criterion {} PASS  {name}: {msg} [{ms} ms]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {msg} [{ms} ms]", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
