//! Normal ordering in Pol(Mat_n)_q: every product is rewritten to words with
//! unstarred letters first, each block sorted by (column, row).

use qball::ncalg::{normal_form_with_strategy, Gen, NcElement, Strategy, Word, DEFAULT_BUDGET};

fn main() -> qball::error::Result<()> {
    let n = 2;
    let zs11 = NcElement::zs(n, 1, 1)?;
    let z11 = NcElement::z(n, 1, 1)?;
    let z22 = NcElement::z(n, 2, 2)?;
    println!("zs[1,1] z[1,1]  =  {}", zs11.multiply(&z11)?);
    println!("z[2,2] z[1,1]   =  {}", z22.multiply(&z11)?);

    let w = Word(vec![Gen::zs(2, 2), Gen::z(1, 2), Gen::zs(1, 1), Gen::z(2, 1)]);
    let a = normal_form_with_strategy(n, [(w.clone(), 1.into())], Strategy::Leftmost, DEFAULT_BUDGET)?;
    let b = normal_form_with_strategy(n, [(w.clone(), 1.into())], Strategy::Rightmost, DEFAULT_BUDGET)?;
    println!("{w}  ->  {} terms, strategies agree: {}", a.len(), a == b);
    println!("(z[1,1] zs[1,1])* = {}", z11.multiply(&zs11)?.star());
    Ok(())
}
