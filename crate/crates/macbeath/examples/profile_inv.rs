use macbeath::curve::{interpret_str, CurveSpec};
use std::time::Instant;

fn main() {
    let spec = CurveSpec::macbeath_x();
    let a = interpret_str("y1 + x*y2*y4 + 3", &spec).unwrap();
    let t0 = Instant::now();
    let mut cof = macbeath::curve::CurveElement::one(&spec);
    for signs in 1..8usize {
        let t = Instant::now();
        cof = cof.try_mul(&a.sign_conjugate(signs)).unwrap();
        let degs: Vec<usize> = cof.coeffs().iter().map(|r| r.num().degree().max(r.den().degree())).collect();
        println!("mul {}: {:?}  max deg {:?}", signs, t.elapsed(), degs.iter().max());
    }
    let t = Instant::now();
    let norm = a.try_mul(&cof).unwrap();
    println!("norm mul: {:?} scalar={} deg={}", t.elapsed(), norm.is_scalar(), norm.scalar_part().num().degree());
    let t = Instant::now();
    let n = norm.scalar_part().inverse().unwrap();
    let inv = cof.scale_ratfunc(&n).unwrap();
    println!("scale: {:?}", t.elapsed());
    let t = Instant::now();
    let check = a.try_mul(&inv).unwrap();
    println!("verify: {:?} is_one={}", t.elapsed(), check.is_one());
    println!("total: {:?}", t0.elapsed());
}
