//! Browser bindings for three seplab views: kink-centre curves, the region
//! map, and the multiscale field near the critical point.
//!
//! Each view is a plain Rust function returning JSON; the `#[wasm_bindgen]`
//! wrappers only translate errors, so the same code is testable natively.

use std::cell::RefCell;
use std::sync::Arc;

use serde::Serialize;
use wasm_bindgen::prelude::*;

use seplab::initdata::{crit_constants, profile_sech, t_of};
use seplab::pii::Hierarchy;
use seplab::waveform::{kink_center_curve, CriticalModel, Potentials, RegionParams, Regions, Side};

/// Largest |m| the page can request.
pub const MAX_BOUND: i32 = 7;
/// Guard against grids that would stall the page.
pub const MAX_CELLS: usize = 250_000;

thread_local! {
    static POTENTIALS: RefCell<Option<Arc<Potentials>>> = const { RefCell::new(None) };
}

fn potentials() -> Arc<Potentials> {
    POTENTIALS.with(|p| {
        p.borrow_mut().get_or_insert_with(|| Arc::new(Potentials::new(Arc::new(Hierarchy::with_bound(MAX_BOUND + 1))))).clone()
    })
}

fn grid_check(a: usize, b: usize) -> Result<(), String> {
    if a < 2 || b < 2 || a * b > MAX_CELLS {
        return Err(format!("grid {a}×{b} must have both sides ≥ 2 and at most {MAX_CELLS} cells"));
    }
    Ok(())
}

fn bound_check(bound: i32) -> Result<(), String> {
    if (1..=MAX_BOUND).contains(&bound) {
        Ok(())
    } else {
        Err(format!("bound {bound} outside 1..={MAX_BOUND}"))
    }
}

fn lin(a: f64, b: f64, n: usize, k: usize) -> f64 {
    a + (b - a) * k as f64 / (n - 1) as f64
}

#[derive(Serialize)]
struct Curve {
    m: i32,
    /// Polyline pieces (z, t); split where 𝒰_m has a zero or pole.
    segments: Vec<Vec<(f64, f64)>>,
}

/// Kink centres t(z) for m in `m_lo..=m_hi`.
pub fn kink_curves_json(eps: f64, nu: f64, m_lo: i32, m_hi: i32, z0: f64, z1: f64, n: usize) -> Result<String, String> {
    bound_check(m_lo.abs().max(m_hi.abs()).max(1))?;
    if m_lo > m_hi || n > MAX_CELLS {
        return Err(format!("bad request: m {m_lo}..{m_hi}, n = {n}"));
    }
    let pot = potentials();
    let curves = (m_lo..=m_hi)
        .map(|m| Ok(Curve { m, segments: kink_center_curve(&pot, m, (z0, z1), eps, nu, n).map_err(|e| e.to_string())? }))
        .collect::<Result<Vec<_>, String>>()?;
    serde_json::to_string(&curves).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct RegionMap {
    ny: usize,
    ns: usize,
    y_range: (f64, f64),
    s_range: (f64, f64),
    /// Row-major over s then y; entry 2m for Ω_m^+ and 2m − 1 for Ω_m^−.
    codes: Vec<i32>,
    /// Number of regions claiming each point (1 away from boundaries).
    multiplicity: Vec<u8>,
}

/// Region labels on a (y, s) grid covering strips `strip_lo..=strip_hi`.
pub fn region_map_json(eps: f64, bound: i32, strip_lo: i32, strip_hi: i32, y0: f64, y1: f64, ny: usize, ns: usize) -> Result<String, String> {
    bound_check(bound)?;
    grid_check(ny, ns)?;
    if strip_lo > strip_hi || strip_lo < -bound || strip_hi >= bound {
        return Err(format!("strips {strip_lo}..{strip_hi} must lie in {}..{}", -bound, bound - 1));
    }
    let regions = Regions::new(potentials(), RegionParams::with_defaults(eps, bound)).map_err(|e| e.to_string())?;
    let hh = regions.half_height();
    let (s0, s1) = (t_of(-hh, strip_lo, eps), t_of(hh, strip_hi, eps));
    let mut codes = Vec::with_capacity(ny * ns);
    let mut multiplicity = Vec::with_capacity(ny * ns);
    for k in 0..ns {
        let s = lin(s0, s1, ns, k);
        for i in 0..ny {
            let y = lin(y0, y1, ny, i);
            let labels = regions.classify(y, s).map_err(|e| e.to_string())?;
            let mut best = (labels[0], f64::NEG_INFINITY);
            for &l in &labels {
                let margin = regions.membership(l, y, s).map_err(|e| e.to_string())?.margin;
                if margin > best.1 {
                    best = (l, margin);
                }
            }
            let l = best.0;
            codes.push(match l.side {
                Side::Plus => 2 * l.m,
                Side::Minus => 2 * l.m - 1,
            });
            multiplicity.push(labels.len().min(u8::MAX as usize) as u8);
        }
    }
    serde_json::to_string(&RegionMap { ny, ns, y_range: (y0, y1), s_range: (s0, s1), codes, multiplicity }).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Field {
    nx: usize,
    nt: usize,
    x_range: (f64, f64),
    t_range: (f64, f64),
    x_crit: f64,
    /// u = 2 atan2(sin u/2, cos u/2) ∈ (−2π, 2π], row-major over t then x.
    u: Vec<f64>,
}

/// Model angle u(x, t) for G = −A sech x on x_crit ± width·ε^{2/3}, t ∈ [0, ε ln(1/ε)].
pub fn multiscale_field_json(amplitude: f64, eps: f64, width: f64, nx: usize, nt: usize) -> Result<String, String> {
    grid_check(nx, nt)?;
    let p = profile_sech(amplitude).map_err(|e| e.to_string())?;
    let crit = crit_constants(&p).map_err(|e| e.to_string())?;
    let regions = Regions::new(potentials(), RegionParams::with_defaults(eps, 6)).map_err(|e| e.to_string())?;
    let model = CriticalModel { regions, crit };
    let w = width * eps.powf(2.0 / 3.0);
    let (x0, x1, t1) = (crit.x_crit - w, crit.x_crit + w, eps * (1.0 / eps).ln());
    let mut u = Vec::with_capacity(nx * nt);
    for k in 0..nt {
        let t = lin(0.0, t1, nt, k);
        for j in 0..nx {
            let o = model.eval(lin(x0, x1, nx, j), t).map_err(|e| e.to_string())?;
            u.push(2.0 * o.sin_half.atan2(o.cos_half));
        }
    }
    serde_json::to_string(&Field { nx, nt, x_range: (x0, x1), t_range: (0.0, t1), x_crit: crit.x_crit, u }).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = kinkCurves)]
pub fn kink_curves(eps: f64, nu: f64, m_lo: i32, m_hi: i32, z0: f64, z1: f64, n: usize) -> Result<String, JsError> {
    kink_curves_json(eps, nu, m_lo, m_hi, z0, z1, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = regionMap)]
#[allow(clippy::too_many_arguments)]
pub fn region_map(eps: f64, bound: i32, strip_lo: i32, strip_hi: i32, y0: f64, y1: f64, ny: usize, ns: usize) -> Result<String, JsError> {
    region_map_json(eps, bound, strip_lo, strip_hi, y0, y1, ny, ns).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = multiscaleField)]
pub fn multiscale_field(amplitude: f64, eps: f64, width: f64, nx: usize, nt: usize) -> Result<String, JsError> {
    multiscale_field_json(amplitude, eps, width, nx, nt).map_err(|e| JsError::new(&e))
}
