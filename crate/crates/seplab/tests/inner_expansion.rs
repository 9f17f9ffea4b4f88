use num_complex::Complex64 as C64;
use seplab::inner_rhp::{extract_coeffs, normalized, ray_jump_check, z0_eval, zm_eval, CMatrix2, InnerError, InnerSolution};
use seplab::pii::Hierarchy;

const YS: [f64; 4] = [-2.0, -0.5, 0.7, 2.0];

#[test]
fn expansion_matches_hierarchy() {
    let h = Hierarchy::with_bound(4);
    let mut checked = 0;
    for m in -3..=3 {
        let e = h.entry(m).unwrap();
        let (b12, b21) = e.b_entries();
        for y in YS {
            let sol = match InnerSolution::new(&h, m, y) {
                Ok(s) => s,
                Err(InnerError::LadderBlocked { .. }) => continue,
                Err(err) => panic!("{err}"),
            };
            let x = extract_coeffs(&sol, 12.0, 48).unwrap();
            let hm = e.h.eval_f64(y).unwrap();
            let want = [
                (x.a[0][0], -2.0 * hm),
                (x.a[0][1], e.u.eval_f64(y).unwrap()),
                (x.a[1][0], e.v.eval_f64(y).unwrap()),
                (x.a[1][1], 2.0 * hm),
                (x.b[0][1], b12.eval_f64(y).unwrap()),
                (x.b[1][0], b21.eval_f64(y).unwrap()),
            ];
            for (k, (got, exp)) in want.iter().enumerate() {
                assert!((got - exp).abs() <= 1e-5, "m={m} y={y} item {k}: {got} vs {exp} (fit {})", x.fit_residual);
            }
            if m == 0 {
                assert!((x.a[0][1] - 1.0).abs() <= 1e-6);
            }
            checked += 1;
        }
    }
    assert!(checked >= 20, "only {checked} (m, y) pairs were regular");
}

#[test]
fn jumps_are_constant_on_every_ray() {
    let h = Hierarchy::with_bound(4);
    for m in -2..=2 {
        for y in [0.0, 1.3] {
            let Ok(sol) = InnerSolution::new(&h, m, y) else { continue };
            for ray in 0..6 {
                let j = ray_jump_check(&sol, ray, &[1.0, 2.0, 3.0]).unwrap();
                assert!(j.spread <= 1e-8 && j.det_error <= 1e-8, "m={m} y={y} ray={ray}: {j:?}");
            }
        }
    }
}

#[test]
fn unimodular_and_schwarz_symmetric() {
    let h = Hierarchy::with_bound(4);
    for m in -3..=3 {
        let Ok(sol) = InnerSolution::new(&h, m, 0.7) else { continue };
        for z in [C64::new(2.0, 1.0), C64::new(-1.5, 0.4), C64::new(0.3, -2.2)] {
            let a = zm_eval(&sol, z);
            let tol = (m.abs().max(1)) as f64 * 1e-9;
            assert!((a.det() - 1.0).norm() <= tol, "m={m} z={z}");
            assert!((zm_eval(&sol, z.conj()) - a.conj()).max_abs() <= 1e-9 * a.max_abs().max(1.0));
        }
    }
    let z = C64::new(1.0, 0.5);
    let sol = InnerSolution::new(&h, 0, 0.3).unwrap();
    assert_eq!(zm_eval(&sol, z), z0_eval(z, 0.3));
}

#[test]
fn normalisation_improves_with_radius() {
    let h = Hierarchy::with_bound(4);
    let sol = InnerSolution::new(&h, -1, 0.5).unwrap();
    let dev = |r: f64| (normalized(&sol, C64::from_polar(r, 1.0)) - CMatrix2::identity()).max_abs();
    assert!(dev(16.0) < 0.6 * dev(8.0));
}
