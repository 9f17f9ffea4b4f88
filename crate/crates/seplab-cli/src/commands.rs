use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use seplab::initdata::{crit_constants, identity_checks, t_of, Profile, ProfileConfig};
use seplab::inner_rhp::{extract_coeffs, lax_residual, ray_jump_check, ExpansionData, InnerSolution, LaxResidual, RayJump};
use seplab::par;
use seplab::pde::{model_compare, pde_energy, pde_solve, write_frame, write_frame_csv, CompareReport, SolverConfig, Window};
use seplab::pii::{EntryJson, Hierarchy, HierarchyConfig};
use seplab::waveform::{
    kink_center_curve, min_singularity_gap, model_all, write_curves_csv, write_field_csv, write_regions_csv, CriticalModel, Potentials,
    RegionLabel, RegionParams, Regions,
};

use crate::error::CliError;
use crate::output::OutDir;
use crate::{CompareArgs, HierarchyArgs, InnerArgs, KinkArgs, ModelArgs, PdeArgs, ProfileArgs, RegionsArgs};

const DEFAULT_PROFILE: &str = "type = \"sech\"\namplitude = 3.0\n";
/// m range exercised by the `identities` hierarchy checks.
const IDENTITY_M_RANGE: (i32, i32) = (-6, 7);

fn hierarchy_for(bound: i32) -> Hierarchy {
    Hierarchy::new(HierarchyConfig::with_bound(bound).with_env_cache())
}

/// `a..b`, inclusive at both ends.
fn parse_m_range(s: &str) -> Result<(i32, i32), CliError> {
    let bad = || CliError::Argument(format!("expected an integer range `a..b`, got `{s}`"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let (a, b): (i32, i32) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn parse_floats<const N: usize>(s: &str, what: &str) -> Result<[f64; N], CliError> {
    let v: Result<Vec<f64>, _> = s.split(',').map(|x| x.trim().parse::<f64>()).collect();
    let v = v.map_err(|e| CliError::Argument(format!("{what} `{s}`: {e}")))?;
    v.try_into().map_err(|_| CliError::Argument(format!("{what} `{s}`: expected {N} comma-separated numbers")))
}

fn check_eps(eps: f64) -> Result<(), CliError> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(CliError::Argument(format!("--eps must lie in (0, 1), got {eps}")))
    }
}

fn load_profile(a: &ProfileArgs, out: &mut OutDir) -> Result<(ProfileConfig, Box<dyn Profile>), CliError> {
    let text = match &a.profile {
        None => DEFAULT_PROFILE.to_string(),
        Some(s) if Path::new(s).is_file() => fs::read_to_string(s).map_err(|e| CliError::Io(s.clone(), e))?,
        Some(s) => s.clone(),
    };
    let cfg = ProfileConfig::parse(&text)?;
    let p = cfg.build()?;
    out.param("profile", &cfg);
    Ok((cfg, p))
}

pub fn hierarchy(a: &HierarchyArgs, out: &mut OutDir) -> Result<(), CliError> {
    let (lo, hi) = parse_m_range(&a.m_range)?;
    out.param("m_range", [lo, hi]);
    let hier = hierarchy_for(lo.abs().max(hi.abs()));
    let entries = (lo..=hi).map(|m| Ok(EntryJson::from_entry(&*hier.entry(m)?))).collect::<Result<Vec<_>, CliError>>()?;
    out.write_json("hierarchy.json", &entries)
}

#[derive(Serialize)]
struct HierarchyCheck {
    m: i32,
    residuals_vanish: bool,
    lambda: String,
}

pub fn identities(a: &ProfileArgs, out: &mut OutDir) -> Result<(), CliError> {
    let (_, p) = load_profile(a, out)?;
    let (lo, hi) = IDENTITY_M_RANGE;
    out.param("m_range", [lo, hi]);
    let hier = hierarchy_for(lo.abs().max(hi.abs()));
    let mut failures = Vec::new();
    let mut checks = Vec::new();
    for m in lo..=hi {
        let residuals_vanish = hier.pii_residuals(m)?.iter().all(|r| r.is_zero());
        if !residuals_vanish {
            failures.push(format!("nonzero hierarchy residual at m = {m}"));
        }
        let lambda = match hier.lambda_check(m) {
            Ok(l) => l.to_string(),
            Err(e) => {
                failures.push(e.to_string());
                "mismatch".into()
            }
        };
        checks.push(HierarchyCheck { m, residuals_vanish, lambda });
    }
    let report = identity_checks(&*p);
    if let Err(e) = &report {
        failures.push(e.to_string());
    }
    #[derive(Serialize)]
    struct Report {
        hierarchy: Vec<HierarchyCheck>,
        critical_point: Option<seplab::initdata::IdentityReport>,
        failures: Vec<String>,
    }
    out.write_json("identities.json", &Report { hierarchy: checks, critical_point: report.ok(), failures: failures.clone() })?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(failures.join("; ")))
    }
}

pub fn inner(a: &InnerArgs, out: &mut OutDir) -> Result<(), CliError> {
    out.param("m", a.m);
    out.param("y", a.y);
    out.param("radius", a.radius);
    out.param("samples", a.samples);
    let hier = hierarchy_for(a.m.abs() + 1);
    let sol = InnerSolution::new(&hier, a.m, a.y)?;
    let expansion = extract_coeffs(&sol, a.radius, a.samples)?;
    let radii = [1.0, 2.0, 3.0];
    let jumps = (0..6).map(|ray| ray_jump_check(&sol, ray, &radii)).collect::<Result<Vec<_>, _>>()?;
    // The Lax pair is written for the seed solution only.
    let lax = if a.m == 0 {
        let zeta = Complex64::new(1.1, 0.7);
        Some([lax_residual(a.y, zeta, 1e-3)?, lax_residual(a.y, zeta, 5e-4)?])
    } else {
        None
    };
    let e = hier.entry(a.m)?;
    let h = e.h.eval_f64(a.y).map_err(seplab::pii::PiiError::from)?;
    let expected = [[-2.0 * h, e.u.eval_f64(a.y).map_err(seplab::pii::PiiError::from)?], [e.v.eval_f64(a.y).map_err(seplab::pii::PiiError::from)?, 2.0 * h]];
    #[derive(Serialize)]
    struct Report {
        expansion: ExpansionData,
        expected_a: [[f64; 2]; 2],
        jumps: Vec<RayJump>,
        lax: Option<[LaxResidual; 2]>,
    }
    out.write_json("inner.json", &Report { expansion, expected_a: expected, jumps, lax })
}

pub fn regions(a: &RegionsArgs, out: &mut OutDir) -> Result<(), CliError> {
    check_eps(a.eps)?;
    let (lo, hi) = parse_m_range(&a.strips)?;
    let [y0, y1] = parse_floats::<2>(&a.y_range, "--y-range")?;
    if a.ny < 2 || a.ns < 2 || !(y1 > y0) {
        return Err(CliError::Argument("grid needs ny, ns ≥ 2 and a nonempty y range".into()));
    }
    for (k, v) in [("eps", a.eps), ("delta", a.delta), ("kappa", a.kappa)] {
        out.param(k, v);
    }
    out.param("bound", a.bound);
    out.param("strips", [lo, hi]);
    out.param("y_range", [y0, y1]);
    out.param("grid", [a.ny, a.ns]);
    let pot = Arc::new(Potentials::new(Arc::new(hierarchy_for(a.bound + 1))));
    let regions = Regions::new(pot.clone(), RegionParams { delta: a.delta, kappa: a.kappa, eps: a.eps, bound: a.bound })?;
    let hh = regions.half_height();
    let (s0, s1) = (t_of(-hh, lo, a.eps), t_of(hh, hi, a.eps));
    let rows = par::map_range(a.ns, |k| -> Result<Vec<(f64, f64, RegionLabel)>, CliError> {
        let s = s0 + (s1 - s0) * k as f64 / (a.ns - 1) as f64;
        (0..a.ny)
            .map(|i| {
                let y = y0 + (y1 - y0) * i as f64 / (a.ny - 1) as f64;
                let mut best: Option<(RegionLabel, f64)> = None;
                for l in regions.classify(y, s)? {
                    let margin = regions.membership(l, y, s)?.margin;
                    if best.is_none_or(|(_, b)| margin > b) {
                        best = Some((l, margin));
                    }
                }
                let (l, _) = best.expect("classify returns at least one label");
                Ok((y, s, l))
            })
            .collect()
    });
    let rows: Vec<_> = rows.into_iter().collect::<Result<Vec<_>, _>>()?.into_iter().flatten().collect();
    write_regions_csv(out.create_file("regions.csv")?, &rows)?;
    let mut counts = BTreeMap::<String, usize>::new();
    for (_, _, l) in &rows {
        *counts.entry(format!("{}{}", l.m, l.side)).or_default() += 1;
    }
    let tips = (lo..=hi + 1)
        .map(|m| Ok((m, regions.plus_tooth_tips(m)?, regions.minus_tooth_tips(m)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    #[derive(Serialize)]
    struct Summary {
        half_height: f64,
        s_range: [f64; 2],
        singularity_gap: f64,
        counts: BTreeMap<String, usize>,
        /// (m, plus-tooth tips, minus-tooth tips).
        tooth_tips: Vec<(i32, Vec<(f64, f64, f64)>, Vec<(f64, f64, f64)>)>,
    }
    let summary =
        Summary { half_height: hh, s_range: [s0, s1], singularity_gap: min_singularity_gap(&pot, a.bound)?, counts, tooth_tips: tips };
    out.write_json("regions.json", &summary)
}

pub fn kinkcurves(a: &KinkArgs, out: &mut OutDir) -> Result<(), CliError> {
    check_eps(a.eps)?;
    let (lo, hi) = parse_m_range(&a.m_range)?;
    let [z0, z1] = parse_floats::<2>(&a.z_range, "--z-range")?;
    let nu = match a.nu {
        Some(nu) if nu > 0.0 => nu,
        Some(nu) => return Err(CliError::Argument(format!("--nu must be positive, got {nu}"))),
        None => {
            let (_, p) = load_profile(&a.profile, out)?;
            crit_constants(&*p)?.nu
        }
    };
    out.param("eps", a.eps);
    out.param("nu", nu);
    out.param("m_range", [lo, hi]);
    out.param("z_range", [z0, z1]);
    out.param("n", a.n);
    let pot = Potentials::new(Arc::new(hierarchy_for(lo.abs().max(hi.abs()))));
    let curves =
        (lo..=hi).map(|m| Ok((m, kink_center_curve(&pot, m, (z0, z1), a.eps, nu, a.n)?))).collect::<Result<Vec<_>, CliError>>()?;
    write_curves_csv(out.create_file("curves.csv")?, &curves)?;
    Ok(())
}

pub fn model(a: &ModelArgs, out: &mut OutDir) -> Result<(), CliError> {
    check_eps(a.eps)?;
    let (_, p) = load_profile(&a.profile, out)?;
    let crit = crit_constants(&*p)?;
    let [x0, x1, t0, t1] = match &a.window {
        Some(w) => parse_floats::<4>(w, "--window")?,
        None => {
            let w = 3.0 * a.eps.powf(2.0 / 3.0);
            [crit.x_crit - w, crit.x_crit + w, 0.0, a.eps * (1.0 / a.eps).ln()]
        }
    };
    if a.nx < 2 || a.nt < 2 || !(x1 > x0) || !(t1 >= t0) {
        return Err(CliError::Argument("window needs x0 < x1, t0 ≤ t1 and nx, nt ≥ 2".into()));
    }
    out.param("eps", a.eps);
    out.param("window", [x0, x1, t0, t1]);
    out.param("grid", [a.nx, a.nt]);
    out.param("bound", a.bound);
    out.param("kappa", a.kappa);
    out.param("nu", crit.nu);
    out.param("x_crit", crit.x_crit);
    let pot = Arc::new(Potentials::new(Arc::new(hierarchy_for(a.bound + 1))));
    let regions = Regions::new(pot, RegionParams { kappa: a.kappa, ..RegionParams::with_defaults(a.eps, a.bound) })?;
    let model = CriticalModel { regions, crit };
    let rows = par::map_range(a.nt, |k| {
        let t = t0 + (t1 - t0) * k as f64 / (a.nt - 1) as f64;
        (0..a.nx)
            .map(|j| {
                let x = x0 + (x1 - x0) * j as f64 / (a.nx - 1) as f64;
                let overlap = model_all(&model.regions, &crit, model.z_of(x), t)?;
                let out = model.eval(x, t)?;
                Ok((x, t, out, overlap))
            })
            .collect::<Result<Vec<_>, CliError>>()
    });
    let rows: Vec<_> = rows.into_iter().collect::<Result<Vec<_>, _>>()?.into_iter().flatten().collect();
    let field: Vec<_> = rows.iter().map(|(x, t, o, _)| (*x, *t, *o)).collect();
    write_field_csv(out.create_file("field.csv")?, &field)?;
    let mut w = csv::Writer::from_writer(out.create_file("overlaps.csv")?);
    w.write_record(["x", "t", "labels", "disagreement", "envelope_sum", "flagged"])?;
    let mut flagged = 0usize;
    for (x, t, _, rep) in rows.iter().filter(|r| r.3.evals.len() > 1) {
        let labels: Vec<String> = rep.evals.iter().map(|e| format!("{}{}", e.label.m, e.label.side)).collect();
        flagged += usize::from(rep.flagged);
        w.serialize((x, t, labels.join("|"), rep.disagreement, rep.envelope_sum, rep.flagged))?;
    }
    w.flush().map_err(|e| CliError::Io("overlaps.csv".into(), e))?;
    if flagged > 0 {
        eprintln!("seplab model: {flagged} overlap points disagree beyond the combined envelopes (see overlaps.csv)");
    }
    Ok(())
}

pub fn pde(a: &PdeArgs, out: &mut OutDir) -> Result<(), CliError> {
    check_eps(a.eps)?;
    if a.frames < 2 {
        return Err(CliError::Argument("--frames must be at least 2".into()));
    }
    let (_, p) = load_profile(&a.profile, out)?;
    let t_end = a.t_end.unwrap_or(a.eps * (1.0 / a.eps).ln());
    let base = SolverConfig::for_profile(&*p, a.eps, t_end);
    let (n, _) = base.steps();
    let cfg = SolverConfig { output_every: n.div_ceil(a.frames - 1).max(1), ..base };
    out.param("eps", a.eps);
    out.param("solver", cfg);
    let mut energy = Vec::new();
    for (k, frame) in pde_solve(&*p, cfg)?.enumerate() {
        let frame = frame?;
        let stem = format!("frame_{k:04}");
        for path in write_frame(out.path(), &stem, &frame, a.eps)? {
            out.record(&path.file_name().unwrap_or_default().to_string_lossy());
        }
        if a.csv {
            write_frame_csv(out.create_file(&format!("{stem}.csv"))?, &frame)?;
        }
        energy.push((frame.t, frame.step, pde_energy(&frame, a.eps), frame.parity_defect()));
    }
    let mut w = csv::Writer::from_writer(out.create_file("energy.csv")?);
    w.write_record(["t", "step", "energy", "parity_defect"])?;
    for row in &energy {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| CliError::Io("energy.csv".into(), e))?;
    Ok(())
}

/// Least-squares slope of log y against log x.
fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let (lx, ly): (Vec<f64>, Vec<f64>) = x.iter().zip(y).map(|(a, b)| (a.ln(), b.ln())).unzip();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

pub fn compare(a: &CompareArgs, out: &mut OutDir) -> Result<(), CliError> {
    let ladder: Vec<f64> = a
        .eps_ladder
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| CliError::Argument(format!("--eps-ladder `{s}`: {e}"))))
        .collect::<Result<_, _>>()?;
    for &eps in &ladder {
        check_eps(eps)?;
    }
    let (_, p) = load_profile(&a.profile, out)?;
    let crit = crit_constants(&*p)?;
    out.param("eps_ladder", &ladder);
    out.param("window_k", a.window_k);
    out.param("window_b", a.window_b);
    out.param("bound", a.bound);
    let pot = Arc::new(Potentials::new(Arc::new(hierarchy_for(a.bound + 2))));
    let mut rows: Vec<(f64, CompareReport, f64)> = Vec::new();
    for &eps in &ladder {
        let l = (1.0 / eps).ln();
        let model = CriticalModel { regions: Regions::new(pot.clone(), RegionParams::with_defaults(eps, a.bound))?, crit };
        let t_end = a.window_b / 3.0 * eps * l;
        let cfg = SolverConfig { output_every: 4, ..SolverConfig::for_profile(&*p, eps, t_end) };
        let window = Window { center: crit.x_crit, half_width: a.window_k * eps.powf(2.0 / 3.0), t_min: 0.0, t_max: t_end };
        let mut drift = 0.0f64;
        let mut e0 = None;
        let frames = pde_solve(&*p, cfg)?.inspect(|f| {
            if let Ok(f) = f {
                let e = pde_energy(f, eps);
                let base = *e0.get_or_insert(e);
                drift = drift.max(((e - base) / base).abs());
            }
        });
        let rep = model_compare(frames, |x, t| model.eval(x, t), window)?;
        rows.push((eps, rep, drift));
    }
    let mut w = csv::Writer::from_writer(out.create_file("compare.csv")?);
    w.write_record(["eps", "sup_error", "l2_error", "samples", "worst_x", "worst_t", "energy_drift"])?;
    for (eps, r, d) in &rows {
        w.serialize((eps, r.sup_error, r.l2_error, r.samples, r.worst.0, r.worst.1, d))?;
    }
    w.flush().map_err(|e| CliError::Io("compare.csv".into(), e))?;
    drop(w);
    let sups: Vec<f64> = rows.iter().map(|r| r.1.sup_error).collect();
    #[derive(Serialize)]
    struct Summary {
        sup_errors: Vec<f64>,
        slope: Option<f64>,
    }
    let slope = (ladder.len() >= 2).then(|| loglog_slope(&ladder, &sups));
    out.write_json("compare.json", &Summary { sup_errors: sups, slope })?;
    let mut stdout = std::io::stdout().lock();
    for (eps, r, _) in &rows {
        let _ = writeln!(stdout, "eps {eps:<10} sup {:.4e}  l2 {:.4e}", r.sup_error, r.l2_error);
    }
    Ok(())
}
