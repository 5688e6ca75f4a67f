//! Integrals over the Shilov boundary, with the Haar values cached on disk.

use qball::expr::parse_pol;
use qball::haar::HaarTable;

fn main() -> qball::error::Result<()> {
    let table = HaarTable::new();
    let cache = std::env::temp_dir().join("qball-haar-example.tsv");
    table.load(&cache)?;
    for n in 1..=3u8 {
        let f = parse_pol(&format!("zs[{n},{n}] z[{n},{n}]"), n)?;
        println!("n = {n}: integral of zs[{n},{n}] z[{n},{n}] = {}", table.integrate_boundary(&f)?);
    }
    let f = parse_pol("z[1,1] z[2,2]", 2)?;
    let g = parse_pol("z[1,2] z[2,1]", 2)?;
    println!("(z11 z22, z12 z21) = {}", table.inner_product(&f, &g)?);
    println!("{} values after {} solves", table.len(), table.solves());
    table.save(&cache)?;
    println!("cache written to {}", cache.display());
    Ok(())
}
