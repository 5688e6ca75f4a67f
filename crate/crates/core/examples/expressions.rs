use qball::expr::{parse, parse_scalar};

fn main() -> qball::error::Result<()> {
    let s = parse_scalar("(1-q^2)/(1-q^4)")?;
    println!("(1-q^2)/(1-q^4) = {s}");
    let e = parse("z[1,2]z[1,1] - (q^-1) z[1,1]z[1,2]")?;
    println!("{} atoms, normal form: {}", e.atom_count(), e.eval_pol(2)?);
    let x = parse("det zs[1,1] - 2")?.eval_pol(2)?;
    let back = parse(&x.to_string())?.eval_pol(2)?;
    println!("{x}\nround trip exact: {}", back == x);
    for bad in ["z[3,1]", "z[1,1] * z[1,1]", "(q"] {
        let err = parse(bad).and_then(|e| e.eval_pol(2)).unwrap_err();
        println!("{bad:>18}: {err}");
    }
    Ok(())
}
