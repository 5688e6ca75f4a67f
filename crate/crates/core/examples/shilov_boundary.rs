use qball::expr::parse_pol;
use qball::shilov::{boundary_relation, rect_boundary_relation, rect_restrict, restrict, RectConfig};

fn main() -> qball::error::Result<()> {
    let n = 2;
    let f = parse_pol("zs[1,1] z[2,2] + q z[1,2]", n)?;
    println!("f       = {f}");
    println!("f|_S    = {}", restrict(&f)?.canonical()?);
    for (a, b) in [(1, 1), (1, 2), (2, 2)] {
        let rel = boundary_relation(n, a, b)?;
        println!("relation ({a},{b}) restricts to zero: {}", restrict(&rel)?.is_zero());
    }
    let cfg = RectConfig::new(1, 3)?;
    let rel = rect_boundary_relation(&cfg, 3, 3)?;
    println!("m = 1, n = 3: {} -> zero: {}", rel, rect_restrict(&cfg, &rel)?.is_zero());
    Ok(())
}
