use qball::ncalg::NcElement;
use qball::qdet::{cofactor_minor, det_q, quantum_minor, IndexSet};

fn main() -> qball::error::Result<()> {
    for n in 1..=3u8 {
        println!("det_q, n = {n}: {}", det_q(n));
    }
    let n = 3;
    let m = quantum_minor(n, &IndexSet::new(vec![1, 3], n)?, &IndexSet::new(vec![2, 3], n)?)?;
    println!("minor rows {{1,3}} cols {{2,3}}: {m}");
    println!("cofactor of z[1,1]: {}", cofactor_minor(n, 1, 1));

    // det_q is central
    let d = det_q(n);
    let central = (1..=n).all(|c| {
        (1..=n).all(|r| {
            let z = NcElement::z(n, c, r).unwrap();
            &d * &z == &z * &d
        })
    });
    println!("det_q central in C[Mat_3]_q: {central}");
    Ok(())
}
