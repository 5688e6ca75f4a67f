use qball::expr::parse_pol;
use qball::haar::HaarTable;
use qball::szego::{apply_t, szego_kernel, verify_reproduction, Emission, Shape};

fn main() -> qball::error::Result<()> {
    let shape = Shape::new(2, None)?;
    let kernel = szego_kernel(shape, 2)?;
    println!("C_q truncated at (2,2): {} terms", kernel.len());

    let table = HaarTable::new();
    let f = parse_pol("z[1,1] z[2,2] - 3 z[1,2]", 2)?;
    println!("T({f}) = {}", apply_t(&kernel, &f, &table)?);

    for (n, m, d) in [(1, None, 5), (2, None, 2), (2, Some(1), 2)] {
        let r = verify_reproduction(Shape::new(n, m)?, d, &table, Emission::AsIs, None)?;
        println!(
            "n = {n}, m = {m:?}, degree <= {d}: {}/{} reproduced in {} ms",
            r.totals.passed, r.totals.monomials, r.totals.millis
        );
    }
    Ok(())
}
