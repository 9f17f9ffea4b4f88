use std::time::Instant;

use num_bigint::BigInt;
use seplab::pii::{minus_sixth_pow, step_down, step_up, Hierarchy};
use seplab::ratpoly::BigRat;

#[test]
fn exact_identities_through_bound() {
    let h = Hierarchy::default();
    let t0 = Instant::now();
    for m in -8..=8 {
        let t = Instant::now();
        let e = h.entry(m).unwrap();
        for (i, res) in h.pii_residuals(m).unwrap().iter().enumerate() {
            assert!(res.is_zero(), "residual r{} at m={m}", i + 1);
        }
        let lam = BigRat::new(BigInt::from(1 - 2 * m), BigInt::from(6));
        assert_eq!(h.lambda_check(m).unwrap(), lam);
        assert_eq!(e.u.leading().unwrap(), (minus_sixth_pow(m), m as i64));
        assert_eq!(e.v.leading().unwrap(), (minus_sixth_pow(1 - m), (1 - m) as i64));
        let (u, v) = step_down(&e.u, &e.v).unwrap();
        assert_eq!(step_up(&u, &v).unwrap(), (e.u.clone(), e.v.clone()));
        assert!(e.poles_u.iter().all(|b| b.multiplicity == 1));
        eprintln!("m={m:3} deg U = {:?}/{:?} t={:?}", e.u.num().degree(), e.u.den().degree(), t.elapsed());
    }
    eprintln!("total {:?}", t0.elapsed());
}
