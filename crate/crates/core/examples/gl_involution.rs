//! The involution of C[GL_n]_q sending z_a^α to a signed cofactor over det_q.

use qball::qdet::GlElement;

fn main() -> qball::error::Result<()> {
    let n = 2;
    for (c, r) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        let z = GlElement::z(n, c, r)?;
        let s = z.gl_star()?;
        println!("z[{c},{r}]* = {s}    (z*)* = z: {}", s.gl_star()? == z);
    }
    for n in 1..=3 {
        let d = GlElement::det(n);
        println!("n = {n}: det det* = {}", d.gl_multiply(&d.gl_star()?)?);
    }
    Ok(())
}
