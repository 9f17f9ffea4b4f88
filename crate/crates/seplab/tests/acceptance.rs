//! End-to-end acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64 as C64;
use seplab::initdata::{
    bohr_sommerfeld, crit_constants, epsilon_n, identity_checks, phi_eval, profile_sech, psi_eval, t_of, PhiRoute,
};
use seplab::inner_rhp::airy::cyclic_identity_residual;
use seplab::inner_rhp::{extract_coeffs, lax_residual, ray_jump_check, InnerError, InnerSolution};
use seplab::pde::{model_compare, pde_energy, pde_solve, FieldFrame, SolverConfig, Window};
use seplab::pii::{minus_sixth_pow, step_down, step_up, Hierarchy};
use seplab::ratpoly::BigRat;
use seplab::waveform::{
    exact_grazing, exact_kink, multiscale_model, overlap_sample, sg_residual, AngleField, CriticalModel, Potentials,
    RegionLabel, RegionParams, Regions, Side,
};

// Criterion 3
const A_TOL: f64 = 1e-5;
const B_TOL: f64 = 1e-4;
const A12_TOL: f64 = 1e-6;
const CYCLIC_TOL: f64 = 1e-12;
const JUMP_TOL: f64 = 1e-8;
const LAX_MIN_ORDER: f64 = 1.8;
// Criterion 4
const I2_TOL: f64 = 1e-6;
const NU_TOL: f64 = 1e-9;
const PHI_ROUTE_TOL: f64 = 1e-6;
const X_CRIT_A3: f64 = 0.9624;
const X_CRIT_TOL: f64 = 1e-4;
// Criterion 5
const BS_TOL: f64 = 1e-8;
// Criterion 6
const SG_STEP: f64 = 1e-3;
const SG_TOL: f64 = 1e-5;
const SG_MIN_ORDER: f64 = 1.8;
// Criterion 7
const TILING_SAMPLES: usize = 10_000;
const BOUNDARY_MARGIN: f64 = 1e-9;
// Criterion 8
const CONTINUITY_SAMPLES: usize = 1_000;
/// The envelopes bound the formulas' errors up to m-dependent constants; the
/// comparison with unit constants is made where those constants are dominated.
const CONTINUITY_EPS: f64 = 1e-12;
const OVERLAP_MIN_SLOPE: f64 = 0.25;
// Criterion 9
const ENERGY_DRIFT_TOL: f64 = 1e-4;
const PARITY_TOL: f64 = 1e-12;
const MODEL_MIN_SLOPE: f64 = 1.0 / 6.0;
/// Window |Δx| ≤ K ε^{2/3}, 0 ≤ t ≤ (B/3) ε log(1/ε).
const WINDOW_K: f64 = 1.0;
const WINDOW_B: f64 = 2.0;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok { Ok(detail) } else { Err(detail) }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    if t.elapsed() <= limit { Ok(()) } else { Err(format!("runtime {:?} exceeds {:?}", t.elapsed(), limit)) }
}

/// Deterministic low-discrepancy points in [0,1)² (Halton bases 2 and 3).
fn halton(i: usize, base: usize) -> f64 {
    let (mut f, mut r, mut k) = (1.0, 0.0, i + 1);
    while k > 0 {
        f /= base as f64;
        r += f * (k % base) as f64;
        k /= base;
    }
    r
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).unzip();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

fn hierarchy_suite() -> Outcome {
    let t0 = Instant::now();
    let h = Hierarchy::with_bound(8);
    for m in -8..=8 {
        let e = h.entry(m).map_err(|e| e.to_string())?;
        let res = h.pii_residuals(m).map_err(|e| e.to_string())?;
        if let Some(i) = res.iter().position(|r| !r.is_zero()) {
            return Err(format!("m={m}: residual {} nonzero", i + 1));
        }
        let lam = h.lambda_check(m).map_err(|e| e.to_string())?;
        if lam != BigRat::new(BigInt::from(1 - 2 * m), BigInt::from(6)) {
            return Err(format!("m={m}: lambda = {lam}"));
        }
        if e.u.leading().ok() != Some((minus_sixth_pow(m), m as i64)) || e.v.leading().ok() != Some((minus_sixth_pow(1 - m), (1 - m) as i64)) {
            return Err(format!("m={m}: leading behaviour"));
        }
        let (u, v) = step_down(&e.u, &e.v).map_err(|e| e.to_string())?;
        if step_up(&u, &v).map_err(|e| e.to_string())? != (e.u.clone(), e.v.clone()) {
            return Err(format!("m={m}: round trip"));
        }
    }
    within(t0, Duration::from_secs(30))?;
    Ok(format!("m in [-8, 8]: residuals 0, lambda = 1/6 - m/3, leading terms and round trips exact ({:.2?})", t0.elapsed()))
}

fn confinement_suite() -> Outcome {
    let t0 = Instant::now();
    let h = Hierarchy::with_bound(7);
    let mut poles = 0;
    for m in -6..=6 {
        let e = h.entry(m).map_err(|e| e.to_string())?;
        for bx in &e.poles_u {
            h.pole_residue(m, bx).map_err(|e| format!("m={m}: {e}"))?;
            h.confinement_check(m, bx).map_err(|e| format!("m={m}: {e}"))?;
            poles += 1;
        }
    }
    within(t0, Duration::from_secs(30))?;
    Ok(format!("{poles} poles with |m| <= 6: residue pairing and simple zeros of V_(m+1), U_(m-1) exact ({:.2?})", t0.elapsed()))
}

fn airy_rhp_suite() -> Outcome {
    let t0 = Instant::now();
    let h = Hierarchy::with_bound(8);
    let (mut worst_a, mut worst_b, mut pairs) = (0.0f64, 0.0f64, 0);
    for m in -2..=3 {
        let e = h.entry(m).map_err(|e| e.to_string())?;
        let (b12, b21) = e.b_entries();
        for y in [-2.0, -0.5, 0.7, 2.0] {
            let sol = match InnerSolution::new(&h, m, y) {
                Ok(s) => s,
                Err(InnerError::LadderBlocked { .. }) => continue,
                Err(err) => return Err(err.to_string()),
            };
            let x = extract_coeffs(&sol, 12.0, 48).map_err(|e| e.to_string())?;
            let hm = e.h.eval_f64(y).map_err(|e| e.to_string())?;
            let ev = |f: &seplab::ratpoly::RatFun| f.eval_f64(y).map_err(|e| e.to_string());
            for (got, want) in [(x.a[0][0], -2.0 * hm), (x.a[0][1], ev(&e.u)?), (x.a[1][0], ev(&e.v)?), (x.a[1][1], 2.0 * hm)] {
                worst_a = worst_a.max((got - want).abs());
            }
            for (got, want) in [(x.b[0][1], ev(&b12)?), (x.b[1][0], ev(&b21)?)] {
                worst_b = worst_b.max((got - want).abs());
            }
            pairs += 1;
        }
    }
    let mut worst_a12 = 0.0f64;
    for k in 0..10 {
        let y = -3.0 + 0.61 * k as f64;
        let sol = InnerSolution::new(&h, 0, y).map_err(|e| e.to_string())?;
        let x = extract_coeffs(&sol, 12.0, 48).map_err(|e| e.to_string())?;
        worst_a12 = worst_a12.max((x.a[0][1] - 1.0).abs());
    }
    let cyclic = [C64::new(1.0, 2.0), C64::new(-3.0, 0.5), C64::new(4.0, -4.0), C64::new(0.2, 0.1), C64::new(-6.0, 0.0)]
        .into_iter()
        .map(cyclic_identity_residual)
        .fold(0.0, f64::max);
    let mut worst_jump = 0.0f64;
    for m in -2..=3 {
        for y in [0.0, 1.3] {
            let Ok(sol) = InnerSolution::new(&h, m, y) else { continue };
            for ray in 0..6 {
                let j = ray_jump_check(&sol, ray, &[1.0, 2.0, 3.0]).map_err(|e| e.to_string())?;
                worst_jump = worst_jump.max(j.spread).max(j.det_error);
            }
        }
    }
    let z = C64::new(1.1, 0.7);
    let (r1, r2) = (lax_residual(0.4, z, 1e-3).map_err(|e| e.to_string())?, lax_residual(0.4, z, 5e-4).map_err(|e| e.to_string())?);
    let order_y = (r1.ry / r2.ry).log2();
    let order_z = (r1.rzeta / r2.rzeta).log2();
    within(t0, Duration::from_secs(120))?;
    check(
        pairs >= 20 && worst_a <= A_TOL && worst_b <= B_TOL && worst_a12 <= A12_TOL && cyclic <= CYCLIC_TOL && worst_jump <= JUMP_TOL
            && order_y >= LAX_MIN_ORDER && order_z >= LAX_MIN_ORDER,
        format!(
            "{pairs} (m,y) pairs: |dA| = {worst_a:.1e}, |dB| = {worst_b:.1e}, |A12-1| = {worst_a12:.1e}, cyclic = {cyclic:.1e}, jump spread = {worst_jump:.1e}, Lax orders {order_y:.2}/{order_z:.2} ({:.2?})",
            t0.elapsed()
        ),
    )
}

fn criticality_suite() -> Outcome {
    let t0 = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for a in [3.0, 4.0] {
        let p = profile_sech(a).map_err(|e| e.to_string())?;
        let r = identity_checks(&p).map_err(|e| e.to_string())?;
        let route = [2.2, 2.5, a - 0.3]
            .into_iter()
            .map(|v| {
                let d = phi_eval(&p, v, PhiRoute::Direct)?;
                let s = phi_eval(&p, v, PhiRoute::ScriptG)?;
                Ok::<_, seplab::initdata::InitError>((d - s).abs())
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?
            .into_iter()
            .fold(0.0, f64::max);
        ok &= r.i2_error <= I2_TOL && r.nu_error <= NU_TOL && route <= PHI_ROUTE_TOL;
        if a == 3.0 {
            ok &= (r.x_crit - X_CRIT_A3).abs() <= X_CRIT_TOL;
        }
        parts.push(format!("A={a}: x_crit = {:.6}, |I2 + x_crit/2| = {:.1e}, |nu_alt - nu| = {:.1e}, phi routes {:.1e}", r.x_crit, r.i2_error, r.nu_error, route));
    }
    within(t0, Duration::from_secs(60))?;
    check(ok, format!("{} ({:.2?})", parts.join("; "), t0.elapsed()))
}

fn bohr_sommerfeld_suite() -> Outcome {
    let t0 = Instant::now();
    let p = profile_sech(3.0).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for n in [4u32, 8, 16] {
        let eps = epsilon_n(&p, n).map_err(|e| e.to_string())?;
        let v = bohr_sommerfeld(&p, n).map_err(|e| e.to_string())?;
        if v.len() != n as usize || !v.windows(2).all(|w| w[0] > w[1]) {
            return Err(format!("N={n}: {} roots, ordering {:?}", v.len(), v));
        }
        for (k, vk) in v.iter().enumerate() {
            let psi = psi_eval(&p, *vk).map_err(|e| e.to_string())?;
            worst = worst.max((psi - PI * eps * (k as f64 + 0.5)).abs());
        }
    }
    within(t0, Duration::from_secs(30))?;
    check(worst <= BS_TOL, format!("N in {{4, 8, 16}}: N strictly decreasing roots, max |Psi(v_k) - pi eps (k+1/2)| = {worst:.1e} ({:.2?})", t0.elapsed()))
}

fn exact_solution_suite() -> Outcome {
    let t0 = Instant::now();
    let kink = |h: f64| {
        let n = (1.0 / h).round() as usize;
        AngleField::from_fn(-0.5, -2.0, h, n + 1, 4 * n + 1, |_, t| exact_kink(t, 1.0))
    };
    let grazing = |h: f64| {
        let n = (1.0 / h).round() as usize;
        AngleField::from_fn(-1.0, -1.5, h, 2 * n + 1, 3 * n + 1, |x, t| exact_grazing(x, t, 1.0))
    };
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, f) in [("kink", &kink as &dyn Fn(f64) -> AngleField), ("grazing", &grazing)] {
        let fine = sg_residual(&f(SG_STEP)).map_err(|e| e.to_string())?;
        let coarse = sg_residual(&f(2.0 * SG_STEP)).map_err(|e| e.to_string())?;
        let order = (coarse / fine).log2();
        ok &= fine <= SG_TOL && order >= SG_MIN_ORDER;
        parts.push(format!("{name}: {fine:.1e} at h = {SG_STEP}, order {order:.2}"));
    }
    within(t0, Duration::from_secs(30))?;
    check(ok, format!("{} ({:.2?})", parts.join("; "), t0.elapsed()))
}

fn tiling_suite() -> Outcome {
    let t0 = Instant::now();
    let eps = 0.1;
    let bound = 4;
    let pot = Arc::new(Potentials::new(Arc::new(Hierarchy::with_bound(bound + 1))));
    let regions = Regions::new(pot.clone(), RegionParams { delta: 0.2, kappa: 0.0, eps, bound }).map_err(|e| e.to_string())?;
    let hh = regions.half_height();
    let labels: Vec<RegionLabel> = (-bound..=bound)
        .flat_map(|m| [RegionLabel { m, side: Side::Minus }, RegionLabel { m, side: Side::Plus }])
        .filter(|l| !(l.side == Side::Minus && l.m == -bound))
        .collect();
    let strips = (-bound..bound).count();
    let (mut interior, mut ambiguous) = (0, 0);
    for i in 0..TILING_SAMPLES {
        let m = -bound + (i % strips) as i32;
        let y = -6.0 + 12.0 * halton(i, 2);
        let p = hh * (2.0 * halton(i, 3) - 1.0);
        let s = t_of(p, m, eps);
        if regions.classify(y, s).is_err() {
            return Err(format!("no region at strip {m}, (y, p) = ({y}, {p})"));
        }
        let mut strict = 0;
        let mut near = false;
        for &l in &labels {
            let mb = regions.membership(l, y, s).map_err(|e| e.to_string())?;
            near |= mb.margin.abs() <= BOUNDARY_MARGIN;
            strict += usize::from(mb.inside && mb.margin > BOUNDARY_MARGIN);
        }
        if !near {
            interior += 1;
            ambiguous += usize::from(strict != 1);
        }
    }
    // Tooth tips of Ω_{m−1}^+ and Ω_{m+1}^- share the strip line and root set.
    let mut tips = 0;
    for m in -bound + 1..bound {
        let upper = regions.plus_tooth_tips(m - 1).map_err(|e| e.to_string())?;
        let lower = regions.minus_tooth_tips(m + 1).map_err(|e| e.to_string())?;
        let zu = pot.hierarchy().entry(m - 1).map_err(|e| e.to_string())?;
        let zv = pot.hierarchy().entry(m + 1).map_err(|e| e.to_string())?;
        let matched = zu.zeros_u.len() == zv.zeros_v.len()
            && zu.zeros_u.iter().all(|a| zv.zeros_v.iter().filter(|b| a.overlaps(b)).count() == 1)
            && upper.iter().zip(&lower).all(|(a, b)| (a.1 - b.1).abs() <= 1e-12 * a.1.abs().max(1.0) && a.2 == b.2);
        if !matched {
            return Err(format!("tooth tips of regions ({}, +) and ({}, -) differ", m - 1, m + 1));
        }
        tips += upper.len();
    }
    within(t0, Duration::from_secs(30))?;
    check(
        ambiguous == 0,
        format!("{TILING_SAMPLES} samples all classified; {interior} strict-interior, {ambiguous} with != 1 region; {tips} tooth tips interlock ({:.2?})", t0.elapsed()),
    )
}

/// max |(m,+) − (m+1,−)| / (e⁺ + e⁻) over samples of the shared line p_m = 0.
fn continuity_ratio(pot: &Arc<Potentials>, eps: f64, bound: i32, nu: f64) -> Result<f64, String> {
    let regions = Regions::new(pot.clone(), RegionParams { delta: 0.2, kappa: 0.0, eps, bound }).map_err(|e| e.to_string())?;
    let (mut tested, mut worst, mut i) = (0, 0.0f64, 0);
    while tested < CONTINUITY_SAMPLES {
        let m = -bound + (i % (2 * bound as usize)) as i32;
        let y = -6.0 + 12.0 * halton(i, 2);
        i += 1;
        let s = t_of(0.0, m, eps);
        let (plus, minus) = (RegionLabel { m, side: Side::Plus }, RegionLabel { m: m + 1, side: Side::Minus });
        let inside = |l| regions.membership(l, y, s).map(|mb| mb.inside).unwrap_or(false);
        if !(inside(plus) && inside(minus)) {
            continue;
        }
        let a = multiscale_model(pot, m, Side::Plus, y, 0.0, eps, nu).map_err(|e| e.to_string())?.out;
        let b = multiscale_model(pot, m + 1, Side::Minus, y, 0.0, eps, nu).map_err(|e| e.to_string())?.out;
        let env = regions.error_envelope(m, Side::Plus, y, 0.0).map_err(|e| e.to_string())?
            + regions.error_envelope(m + 1, Side::Minus, y, 0.0).map_err(|e| e.to_string())?;
        let diff = (a.cos_half - b.cos_half).abs().max((a.sin_half - b.sin_half).abs());
        worst = worst.max(diff / env);
        tested += 1;
    }
    Ok(worst)
}

fn model_consistency_suite() -> Outcome {
    let t0 = Instant::now();
    let bound = 4;
    let pot = Arc::new(Potentials::new(Arc::new(Hierarchy::with_bound(bound + 1))));
    let nu = crit_constants(&profile_sech(3.0).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?.nu;
    let worst_ratio = continuity_ratio(&pot, CONTINUITY_EPS, bound, nu)?;
    let ladder = [1e-1, 1e-4, 1e-8].map(|e| continuity_ratio(&pot, e, bound, nu));
    let ladder: Vec<f64> = ladder.into_iter().collect::<Result<_, _>>()?;
    // Kink/grazing overlap in the lobes |z − z0| = ε^{1/12}, T_G = ∓(1/6)log(1/ε).
    let (m, z0) = (2, 0.0);
    let eps_ladder: [f64; 3] = [1e-3, 1e-4, 1e-5];
    let mut diffs = Vec::new();
    let mut waist = Vec::new();
    for &e in &eps_ladder {
        let (dz, tg) = (e.powf(1.0 / 12.0), (1.0 / e).ln() / 6.0);
        let mut d = 0.0f64;
        for (sz, st) in [(1.0, -1.0), (-1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)] {
            d = d.max(overlap_sample(&pot, m, z0, sz * dz, st * tg, e, nu).map_err(|e| e.to_string())?.difference);
        }
        diffs.push(d);
        let w = overlap_sample(&pot, m, z0, e.cbrt(), 0.0, e, nu).map_err(|e| e.to_string())?;
        let lower = &w.kink_lower;
        waist.push((lower.cos_half - w.grazing.cos_half).abs().max((lower.sin_half - w.grazing.sin_half).abs()));
    }
    let overlap_slope = slope(&eps_ladder, &diffs);
    within(t0, Duration::from_secs(60))?;
    check(
        worst_ratio <= 1.0 && overlap_slope >= OVERLAP_MIN_SLOPE,
        format!(
            "p=0 continuity at eps = {CONTINUITY_EPS:e}, |m| <= {bound}: {CONTINUITY_SAMPLES} samples, max |diff|/(e+ + e-) = {worst_ratio:.3} (eps = 1e-1/1e-4/1e-8 diagnostic {:.2}/{:.2}/{:.2}); kink/grazing lobe differences {:.2e} {:.2e} {:.2e}, slope {overlap_slope:.3} (waist diagnostic {:.2e} {:.2e} {:.2e}) ({:.2?})",
            ladder[0], ladder[1], ladder[2], diffs[0], diffs[1], diffs[2], waist[0], waist[1], waist[2], t0.elapsed()
        ),
    )
}

fn run_frames(p: &dyn seplab::initdata::Profile, cfg: SolverConfig) -> Result<Vec<FieldFrame>, String> {
    pde_solve(p, cfg).map_err(|e| e.to_string())?.collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())
}

fn drift_and_parity(frames: &[FieldFrame], eps: f64) -> (f64, f64) {
    let e0 = pde_energy(&frames[0], eps);
    let drift = frames.iter().map(|f| ((pde_energy(f, eps) - e0) / e0).abs()).fold(0.0, f64::max);
    let parity = frames.iter().map(FieldFrame::parity_defect).fold(0.0, f64::max);
    (drift, parity)
}

fn pde_suite() -> Outcome {
    let t0 = Instant::now();
    let p = profile_sech(3.0).map_err(|e| e.to_string())?;
    let crit = crit_constants(&p).map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut parts = Vec::new();

    // Long run (t ≤ 2): rotation core, crossing fans, libration wings.
    let eps = 3.0 / 16.0;
    let cfg = SolverConfig { output_every: 20, ..SolverConfig::for_profile(&p, eps, 2.0) };
    let frames = run_frames(&p, cfg)?;
    let (mut drift, mut parity) = drift_and_parity(&frames, eps);
    let band = |inside: &dyn Fn(f64) -> bool| {
        let (mut n, mut neg) = (0usize, 0usize);
        for f in frames.iter().filter(|f| f.t >= 0.25) {
            for j in (0..=f.nx).filter(|&j| inside(f.x(j))) {
                n += 1;
                neg += usize::from(f.u[j].cos() < 0.0);
            }
        }
        neg as f64 / n as f64
    };
    let core = band(&|x: f64| x.abs() <= 0.5);
    let fan = band(&|x: f64| (x.abs() - crit.x_crit).abs() <= 0.1);
    let wing = band(&|x: f64| (2.0..=4.0).contains(&x.abs()));
    let structure = core >= 0.4 && (0.2..=0.8).contains(&fan) && wing == 0.0;
    ok &= structure;
    parts.push(format!("cos u < 0 fractions core/fan/wing = {core:.2}/{fan:.2}/{wing:.2}"));

    // Convergence ladder in the critical window around +x_crit.
    let pot = Arc::new(Potentials::new(Arc::new(Hierarchy::with_bound(8))));
    let ladder: [f64; 3] = [3.0 / 16.0, 3.0 / 32.0, 3.0 / 64.0];
    let (mut sups, mut t0_errs, mut diag) = (Vec::new(), Vec::new(), Vec::new());
    for &eps in &ladder {
        let l = (1.0 / eps).ln();
        let regions = Regions::new(pot.clone(), RegionParams::with_defaults(eps, 6)).map_err(|e| e.to_string())?;
        let model = CriticalModel { regions, crit };
        let t_end = eps * l;
        let frames = run_frames(&p, SolverConfig { output_every: 4, ..SolverConfig::for_profile(&p, eps, t_end) })?;
        let (d, par) = drift_and_parity(&frames, eps);
        drift = drift.max(d);
        parity = parity.max(par);
        let window = |b: f64, t_max: f64| Window { center: crit.x_crit, half_width: WINDOW_K * eps.powf(2.0 / 3.0), t_min: 0.0, t_max: t_max.min(b / 3.0 * eps * l) };
        let cmp = |w: Window| model_compare(frames.iter().cloned().map(Ok), |x, t| model.eval(x, t), w).map_err(|e| e.to_string());
        let main = cmp(window(WINDOW_B, f64::INFINITY))?;
        let start = cmp(window(WINDOW_B, 0.0))?;
        let wide = cmp(window(3.0, f64::INFINITY))?;
        sups.push(main.sup_error);
        t0_errs.push(start.sup_error / eps.cbrt());
        diag.push(wide.sup_error);
    }
    let decreasing = sups.windows(2).all(|w| w[1] < w[0]);
    let rate = slope(&ladder, &sups);
    let initial_ok = t0_errs.iter().all(|&r| r <= 1.0);
    ok &= decreasing && rate >= MODEL_MIN_SLOPE && initial_ok && drift <= ENERGY_DRIFT_TOL && parity <= PARITY_TOL;
    parts.insert(0, format!("energy drift {drift:.1e}, parity {parity:.1e}"));
    parts.push(format!(
        "window K={WINDOW_K}, B={WINDOW_B}: sup errors {:.3} {:.3} {:.3}, slope {rate:.3}; t=0 error / eps^(1/3) max {:.1e}; B=3 diagnostic {:.3} {:.3} {:.3}",
        sups[0], sups[1], sups[2], t0_errs.iter().fold(0.0f64, |a, &b| a.max(b)), diag[0], diag[1], diag[2]
    ));
    within(t0, Duration::from_secs(900))?;
    check(ok, format!("{} ({:.2?})", parts.join("; "), t0.elapsed()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("exact hierarchy", hierarchy_suite),
        ("singularity confinement", confinement_suite),
        ("Airy/RHP cross-validation", airy_rhp_suite),
        ("criticality identities", criticality_suite),
        ("Bohr-Sommerfeld", bohr_sommerfeld_suite),
        ("exact-solution residuals", exact_solution_suite),
        ("region tiling", tiling_suite),
        ("model self-consistency", model_consistency_suite),
        ("PDE oracle", pde_suite),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} [{name}]: PASS - {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL - {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
