use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use seplab::initdata::{crit_constants, profile_sech, t_of};
use seplab::pii::Hierarchy;
use seplab::waveform::{
    grazing_model, kink_center_curve, kink_model, model_all, multiscale_model, Potentials, RegionLabel, RegionParams, Regions, Side,
};

const NU: f64 = 0.0559016994374947;

fn pot() -> Arc<Potentials> {
    static POT: OnceLock<Arc<Potentials>> = OnceLock::new();
    POT.get_or_init(|| Arc::new(Potentials::new(Arc::new(Hierarchy::with_bound(7))))).clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn outputs_lie_on_the_unit_circle(m in -5i32..=5, z in -6.0f64..6.0, q in -8.0f64..8.0, leps in -12.0f64..-1.0) {
        let eps = leps.exp();
        let t = t_of(q, m, eps);
        let k = kink_model(&pot(), m, z, t, eps, NU).unwrap();
        prop_assert!(k.pythagorean_defect() <= 1e-12);
        for side in [Side::Plus, Side::Minus] {
            let o = multiscale_model(&pot(), m, side, z, q, eps, NU).unwrap().out;
            prop_assert!(o.pythagorean_defect() <= 1e-12, "{o:?}");
        }
        let g = grazing_model(&pot(), 2, 0.0, z, t, eps, NU).unwrap();
        prop_assert!(g.pythagorean_defect() <= 1e-12);
    }

    #[test]
    fn strip_is_tiled_by_its_two_regions(m in -3i32..3, y in -6.0f64..6.0, u in -1.0f64..1.0) {
        let regions = Regions::new(pot(), RegionParams { delta: 0.2, kappa: 0.0, eps: 0.05, bound: 4 }).unwrap();
        let p = u * regions.half_height();
        let s = t_of(p, m, 0.05);
        let plus = RegionLabel { m, side: Side::Plus };
        let minus = RegionLabel { m: m + 1, side: Side::Minus };
        let labels = regions.classify(y, s).unwrap();
        prop_assert!(labels.contains(&plus) || labels.contains(&minus));
        let (a, b) = (regions.membership(plus, y, s).unwrap(), regions.membership(minus, y, s).unwrap());
        if a.margin.abs() > 1e-9 && b.margin.abs() > 1e-9 {
            prop_assert!(a.inside != b.inside, "{a:?} {b:?}");
        }
    }

    #[test]
    fn far_field_signs(m in -6i32..=6, d in 0.5f64..20.0) {
        let f = pot().fns(m).unwrap();
        let feats: Vec<f64> = f.zeros_u.iter().chain(&f.poles).copied().collect();
        let lo = feats.iter().copied().fold(0.0, f64::min) - d;
        let hi = feats.iter().copied().fold(0.0, f64::max) + d;
        prop_assert!(f.u.eval_f64(lo).unwrap() > 0.0);
        let want = if m % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert_eq!(f.u.eval_f64(hi).unwrap().signum(), want);
    }
}

#[test]
fn kink_curves_frown_above_and_smile_below() {
    // With 4ν^{1/3} = 1 the centre of kink m is t = ε(−(2m/3)log ε − log|𝒰_m(z)|).
    let nu = 1.0 / 64.0;
    let eps = 1e-5;
    let up = kink_center_curve(&pot(), 1, (-3.0, 3.0), eps, nu, 601).unwrap();
    let down = kink_center_curve(&pot(), -1, (-3.0, 3.0), eps, nu, 601).unwrap();
    // 𝒰₁ = −y/6 vanishes and 𝒰₋₁ = −6/y blows up at 0: the m = 1 curve peaks there, m = −1 dips.
    assert_eq!(up.len(), 2);
    assert_eq!(down.len(), 2);
    let at = |segs: &Vec<Vec<(f64, f64)>>, z: f64| {
        segs.iter().flatten().min_by(|a, b| (a.0 - z).abs().total_cmp(&(b.0 - z).abs())).unwrap().1
    };
    assert!(at(&up, 0.01) > at(&up, 1.0) && at(&up, -0.01) > at(&up, -1.0));
    assert!(at(&down, 0.01) < at(&down, 1.0) && at(&down, -0.01) < at(&down, -1.0));
    let t_mid = at(&up, 6.0f64.min(3.0));
    assert!((t_mid - eps * (-(2.0 / 3.0) * eps.ln() - (3.0f64 / 6.0).ln())).abs() < 1e-12);
    let flat = kink_center_curve(&pot(), 0, (-3.0, 3.0), eps, nu, 11).unwrap();
    assert!(flat.iter().flatten().all(|p| p.1.abs() < 1e-18));
}

#[test]
fn overlaps_report_every_claiming_region() {
    let crit = crit_constants(&profile_sech(3.0).unwrap()).unwrap();
    let scaled = |eps: f64| {
        let regions = Regions::new(pot(), RegionParams { delta: 0.2, kappa: 0.3, eps, bound: 4 }).unwrap();
        // Inside strip 1, away from every boundary: a single region.
        let single = model_all(&regions, &crit, 1.0, t_of(0.5, 1, eps)).unwrap();
        assert_eq!(single.evals.len(), 1);
        assert_eq!(single.disagreement, 0.0);
        assert!(!single.flagged);
        // On the boundary between strips 1 and 2 both Ω₂⁻ and Ω₂⁺ claim the point.
        let both = model_all(&regions, &crit, 1.0, t_of(regions.half_height(), 1, eps)).unwrap();
        let labels: Vec<_> = both.evals.iter().map(|e| e.label).collect();
        assert!(labels.contains(&RegionLabel { m: 2, side: Side::Minus }) && labels.contains(&RegionLabel { m: 2, side: Side::Plus }));
        both.disagreement / eps.cbrt()
    };
    // The formulas differ by O(ε^{1/3}) there.
    let (a, b) = (scaled(1e-9), scaled(1e-12));
    assert!(a > 0.0 && (a / b - 1.0).abs() < 0.5, "{a} {b}");
}
