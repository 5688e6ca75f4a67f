//! The inner product on C[Mat_2]_q evaluated at q = 1/2 on monomials of
//! degree at most 2: the Gram matrix should be positive definite.

use nalgebra::{DMatrix, SymmetricEigen};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use qball::haar::HaarTable;
use qball::ncalg::NcElement;
use qball::szego::Shape;

fn main() -> qball::error::Result<()> {
    let n = 2;
    let basis: Vec<NcElement> =
        Shape::new(n, None)?.basis(2).into_iter().map(|w| NcElement::from_word(n, w)).collect::<Result<_, _>>()?;
    let table = HaarTable::new();
    let q = BigRational::new(1.into(), 2.into());
    let k = basis.len();
    let mut g = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            g[(i, j)] = table.inner_product(&basis[i], &basis[j])?.eval_at(&q)?.to_f64().unwrap_or(f64::NAN);
        }
    }
    let eig = SymmetricEigen::new(g).eigenvalues;
    println!("{k} monomials, eigenvalues at q = 1/2:");
    let mut v: Vec<f64> = eig.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    for x in v {
        println!("  {x:.6}");
    }
    Ok(())
}
