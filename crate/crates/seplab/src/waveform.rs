//! Asymptotic wave models near the critical point: the Ω_m^± region tiling,
//! superluminal kinks, grazing collisions, the multiscale Ċ/Ṡ model, error
//! envelopes, and the exact sine-Gordon solutions they are built from.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::initdata::{q_of, CritConstants};
use crate::pii::{Hierarchy, PiiError};
use crate::ratpoly::{rat_from_f64, RatFun, RatPolyError};

#[derive(Debug, Error)]
pub enum WaveError {
    #[error("delta = {delta} must be positive and below half the minimal singularity gap {gap} (|m| <= {bound})")]
    DeltaTooLarge { delta: f64, gap: f64, bound: i32 },
    #[error("invalid region parameters: {0}")]
    InvalidParams(String),
    #[error("no region contains (y, s) = ({y}, {s})")]
    ClassificationGap { y: f64, s: f64 },
    #[error("(y, p) = ({y}, {p}) is not in region ({m}, {side})")]
    OutsideRegion { m: i32, side: Side, y: f64, p: f64 },
    #[error("z0 = {z0} is not a simple real zero of U_{m}")]
    NotAZero { m: i32, z0: f64 },
    #[error("angle unwrapping is ambiguous at node ({row}, {col}); refine the grid")]
    Unwrap { row: usize, col: usize },
    #[error(transparent)]
    Hierarchy(#[from] PiiError),
    #[error(transparent)]
    RatPoly(#[from] RatPolyError),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
    #[error("output: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Plus => "+",
            Side::Minus => "-",
        })
    }
}

fn parity(k: i32) -> f64 {
    if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 }
}

/// Exact hierarchy functions needed by the models, memoised per index.
#[derive(Debug)]
pub struct ModelFns {
    pub m: i32,
    pub u: RatFun,
    pub v: RatFun,
    pub h: RatFun,
    pub du: RatFun,
    pub b12: RatFun,
    pub b21: RatFun,
    pub zeros_u: Vec<f64>,
    pub poles: Vec<f64>,
    pub zeros_v: Vec<f64>,
}

/// Values at a point; `None` marks a pole.
#[derive(Clone, Copy, Debug, Default)]
pub struct PiiPoint {
    pub u: Option<f64>,
    pub v: Option<f64>,
    pub h: Option<f64>,
    pub du: Option<f64>,
    pub b12: Option<f64>,
    pub b21: Option<f64>,
}

impl ModelFns {
    pub fn at(&self, z: f64) -> PiiPoint {
        let ev = |f: &RatFun| f.eval_f64(z).ok();
        PiiPoint { u: ev(&self.u), v: ev(&self.v), h: ev(&self.h), du: ev(&self.du), b12: ev(&self.b12), b21: ev(&self.b21) }
    }
}

/// Shared access to the hierarchy for model evaluation.
pub struct Potentials {
    hier: Arc<Hierarchy>,
    fns: RwLock<BTreeMap<i32, Arc<ModelFns>>>,
}

impl Potentials {
    pub fn new(hier: Arc<Hierarchy>) -> Self {
        Potentials { hier, fns: RwLock::new(BTreeMap::new()) }
    }

    pub fn hierarchy(&self) -> &Hierarchy {
        &self.hier
    }

    pub fn fns(&self, m: i32) -> Result<Arc<ModelFns>, WaveError> {
        if let Some(f) = self.fns.read().unwrap().get(&m) {
            return Ok(f.clone());
        }
        let e = self.hier.entry(m)?;
        let (b12, b21) = e.b_entries();
        let mids = |v: &[crate::ratpoly::RootBox]| v.iter().map(|b| b.mid_f64()).collect::<Vec<_>>();
        let f = Arc::new(ModelFns {
            m,
            u: e.u.clone(),
            v: e.v.clone(),
            h: e.h.clone(),
            du: e.du(),
            b12,
            b21,
            zeros_u: mids(&e.zeros_u),
            poles: mids(&e.poles_u),
            zeros_v: mids(&e.zeros_v),
        });
        self.fns.write().unwrap().insert(m, f.clone());
        Ok(f)
    }
}

fn dist(y: f64, set: &[f64]) -> f64 {
    set.iter().map(|r| (y - r).abs()).fold(f64::INFINITY, f64::min)
}

/// Region tiling parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionParams {
    pub delta: f64,
    pub kappa: f64,
    pub eps: f64,
    pub bound: i32,
}

impl RegionParams {
    /// δ = 0.2, κ = 0.
    pub fn with_defaults(eps: f64, bound: i32) -> Self {
        RegionParams { delta: 0.2, kappa: 0.0, eps, bound }
    }
}

/// Smallest distance between consecutive real singularities of log|𝒰_m| or log|𝒱_m|, |m| ≤ bound.
pub fn min_singularity_gap(pot: &Potentials, bound: i32) -> Result<f64, WaveError> {
    let mut gap = f64::INFINITY;
    for m in -bound..=bound {
        let f = pot.fns(m)?;
        for zeros in [&f.zeros_u, &f.zeros_v] {
            let mut pts: Vec<f64> = zeros.iter().chain(f.poles.iter()).copied().collect();
            pts.sort_by(f64::total_cmp);
            for w in pts.windows(2) {
                gap = gap.min(w[1] - w[0]);
            }
        }
    }
    Ok(gap)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RegionLabel {
    pub m: i32,
    pub side: Side,
}

/// Membership of a point in one region; `margin` is the smallest slack of
/// the defining inequalities (positive inside, negative outside).
#[derive(Clone, Copy, Debug)]
pub struct Membership {
    pub inside: bool,
    pub margin: f64,
}

/// Validated Ω_m^± tiling over |m| ≤ bound.
pub struct Regions {
    pub params: RegionParams,
    pot: Arc<Potentials>,
}

impl Regions {
    pub fn new(pot: Arc<Potentials>, params: RegionParams) -> Result<Self, WaveError> {
        let p = params;
        if !(p.eps > 0.0 && p.eps < 1.0) || !(p.kappa >= 0.0) || p.bound < 1 {
            return Err(WaveError::InvalidParams(format!("{p:?}")));
        }
        // Regions (m, ±) for |m| ≤ bound also need 𝒱_{bound+1}, 𝒰_{−bound−1} neighbours.
        let gap = min_singularity_gap(&pot, p.bound)?;
        if !(p.delta > 0.0 && p.delta < 0.5 * gap) {
            return Err(WaveError::DeltaTooLarge { delta: p.delta, gap, bound: p.bound });
        }
        Ok(Regions { params, pot })
    }

    pub fn potentials(&self) -> &Arc<Potentials> {
        &self.pot
    }

    /// Half-height of every strip, (1/3)log(1/ε) + κ.
    pub fn half_height(&self) -> f64 {
        (1.0 / self.params.eps).ln() / 3.0 + self.params.kappa
    }

    /// p_m for the time-like coordinate s.
    pub fn p(&self, m: i32, s: f64) -> f64 {
        q_of(s, m, self.params.eps)
    }

    pub fn membership(&self, label: RegionLabel, y: f64, s: f64) -> Result<Membership, WaveError> {
        let RegionLabel { m, side } = label;
        let f = self.pot.fns(m)?;
        let d = self.params.delta;
        let hh = self.half_height();
        let (p, slack) = match side {
            Side::Plus => {
                let p = self.p(m, s);
                let slack = if p <= 0.0 { dist(y, &f.poles) - d * (0.5 * p).exp() } else { d * (-0.5 * p).exp() - dist(y, &f.zeros_u) };
                (p, slack)
            }
            Side::Minus => {
                let p = self.p(m - 1, s);
                let slack = if p >= 0.0 { dist(y, &f.poles) - d * (-0.5 * p).exp() } else { d * (0.5 * p).exp() - dist(y, &f.zeros_v) };
                (p, slack)
            }
        };
        let band = hh - p.abs();
        let inside = band >= 0.0 && slack >= 0.0;
        let margin = if inside { band.min(slack).min(p.abs()) } else { band.min(slack) };
        Ok(Membership { inside, margin })
    }

    /// Every label whose predicate holds at (y, s).
    pub fn classify(&self, y: f64, s: f64) -> Result<Vec<RegionLabel>, WaveError> {
        let b = self.params.bound;
        let mut out = Vec::new();
        for m in -b..=b {
            for side in [Side::Minus, Side::Plus] {
                if side == Side::Minus && m == -b {
                    continue;
                }
                let label = RegionLabel { m, side };
                if self.membership(label, y, s)?.inside {
                    out.push(label);
                }
            }
        }
        if out.is_empty() {
            return Err(WaveError::ClassificationGap { y, s });
        }
        Ok(out)
    }

    /// Tooth tips of Ω_m^+ (top, above zeros of 𝒰_m) as (y, s, half-width).
    pub fn plus_tooth_tips(&self, m: i32) -> Result<Vec<(f64, f64, f64)>, WaveError> {
        let f = self.pot.fns(m)?;
        let hh = self.half_height();
        let s = crate::initdata::t_of(hh, m, self.params.eps);
        let w = self.params.delta * (-0.5 * hh).exp();
        Ok(f.zeros_u.iter().map(|&y| (y, s, w)).collect())
    }

    /// Tooth tips of Ω_m^- (bottom, below zeros of 𝒱_m) as (y, s, half-width).
    pub fn minus_tooth_tips(&self, m: i32) -> Result<Vec<(f64, f64, f64)>, WaveError> {
        let f = self.pot.fns(m)?;
        let hh = self.half_height();
        let s = crate::initdata::t_of(-hh, m - 1, self.params.eps);
        let w = self.params.delta * (-0.5 * hh).exp();
        Ok(f.zeros_v.iter().map(|&y| (y, s, w)).collect())
    }

    /// e_m^±(y, s) at a point of the named region.
    pub fn error_envelope(&self, m: i32, side: Side, y: f64, p: f64) -> Result<f64, WaveError> {
        let f = self.pot.fns(m)?;
        let (d, e13) = (self.params.delta, self.params.eps.cbrt());
        let s = match side {
            Side::Plus => crate::initdata::t_of(p, m, self.params.eps),
            Side::Minus => crate::initdata::t_of(p, m - 1, self.params.eps),
        };
        if !self.membership(RegionLabel { m, side }, y, s)?.inside {
            return Err(WaveError::OutsideRegion { m, side, y, p });
        }
        let (zeros, tooth) = match side {
            Side::Plus => (&f.zeros_u, p > 0.0),
            Side::Minus => (&f.zeros_v, p < 0.0),
        };
        let dz = dist(y, zeros);
        let dp = dist(y, &f.poles);
        let e = p.abs().exp();
        Ok(if tooth && dz >= d / e {
            e13 * e * dz
        } else if dp <= d {
            e13 / dp
        } else {
            e13
        })
    }
}

/// cos(u/2), sin(u/2) with diagnostics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ModelOutput {
    pub cos_half: f64,
    pub sin_half: f64,
    /// Phase or ratio hit a zero/pole and the output is the limiting value.
    pub saturated: bool,
    /// The point lies in an exceptional set of the approximation.
    pub excluded: bool,
}

impl ModelOutput {
    pub fn pythagorean_defect(&self) -> f64 {
        (self.cos_half * self.cos_half + self.sin_half * self.sin_half - 1.0).abs()
    }

    /// (cos u, sin u).
    pub fn full_angle(&self) -> (f64, f64) {
        let (c, s) = (self.cos_half, self.sin_half);
        (c * c - s * s, 2.0 * s * c)
    }
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

/// log(4ν^{1/3}/ε^{1/3}).
fn shift_log(eps: f64, nu: f64) -> f64 {
    (4.0 * nu.cbrt() / eps.cbrt()).ln()
}

/// Kink phase T_K = t/ε − 2m log(4ν^{1/3}/ε^{1/3}) + log|𝒰_m(z)| (±∞ at zeros/poles).
pub fn kink_phase(u: Option<f64>, m: i32, t: f64, eps: f64, nu: f64) -> f64 {
    let lu = match u {
        Some(u) => u.abs().ln(),
        None => f64::INFINITY,
    };
    t / eps - 2.0 * m as f64 * shift_log(eps, nu) + lu
}

/// Superluminal kink in the strip of index m.
pub fn kink_model(pot: &Potentials, m: i32, z: f64, t: f64, eps: f64, nu: f64) -> Result<ModelOutput, WaveError> {
    let f = pot.fns(m)?;
    let u = f.u.eval_f64(z).ok();
    let tk = kink_phase(u, m, t, eps, nu);
    let sign = u.map(|u| if u < 0.0 { -1.0 } else { 1.0 }).unwrap_or(1.0);
    let le = eps.ln();
    let e13 = eps.cbrt();
    // Exceptional sets: near zeros while ε^{−2m/3}e^{−t/ε} ≲ ε^{1/3}, near poles while ε^{2m/3}e^{t/ε} ≲ ε^{1/3}.
    let lo = -2.0 * m as f64 / 3.0 * le - t / eps <= le / 3.0 && dist(z, &f.zeros_u) <= e13;
    let hi = 2.0 * m as f64 / 3.0 * le + t / eps <= le / 3.0 && dist(z, &f.poles) <= e13;
    Ok(ModelOutput {
        cos_half: parity(m) * sign * sech(tk),
        sin_half: parity(m + 1) * tk.tanh(),
        saturated: !tk.is_finite(),
        excluded: lo || hi,
    })
}

/// Points (z, t) on the kink centre T_K = 0, split into segments at zeros and poles of 𝒰_m.
pub fn kink_center_curve(pot: &Potentials, m: i32, z_range: (f64, f64), eps: f64, nu: f64, n: usize) -> Result<Vec<Vec<(f64, f64)>>, WaveError> {
    if n < 2 || !(z_range.1 > z_range.0) {
        return Err(WaveError::InvalidParams(format!("n = {n}, range {z_range:?}")));
    }
    let f = pot.fns(m)?;
    let mut cuts: Vec<f64> = f.zeros_u.iter().chain(f.poles.iter()).copied().collect();
    cuts.sort_by(f64::total_cmp);
    let base = 2.0 * m as f64 * shift_log(eps, nu);
    let mut segs: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
    let mut prev: Option<f64> = None;
    for i in 0..n {
        let z = z_range.0 + (z_range.1 - z_range.0) * i as f64 / (n - 1) as f64;
        let crosses = prev.is_some_and(|p| cuts.iter().any(|&c| p < c && c <= z));
        if crosses && !segs.last().unwrap().is_empty() {
            segs.push(Vec::new());
        }
        prev = Some(z);
        match f.u.eval_f64(z) {
            Ok(u) if u != 0.0 => segs.last_mut().unwrap().push((z, eps * (base - u.abs().ln()))),
            _ => {
                if !segs.last().unwrap().is_empty() {
                    segs.push(Vec::new());
                }
            }
        }
    }
    segs.retain(|s| !s.is_empty());
    Ok(segs)
}

/// (X_G, T_G) for the grazing collision at a simple zero z0 of 𝒰_{m−1}.
pub fn grazing_coords(pot: &Potentials, m: i32, z0: f64, z: f64, t: f64, eps: f64, nu: f64) -> Result<(f64, f64, f64), WaveError> {
    let f = pot.fns(m - 1)?;
    let e = pot.hierarchy().entry(m - 1)?;
    let z0r = rat_from_f64(z0)?;
    let ok = e.zeros_u.iter().any(|b| b.multiplicity == 1 && (b.contains(&z0r) || (b.mid_f64() - z0).abs() <= 1e-9));
    if !ok {
        return Err(WaveError::NotAZero { m: m - 1, z0 });
    }
    let slope = f.du.eval_f64(z0)?;
    let xg = 2.0 * (nu / eps).cbrt() * (z - z0);
    let tg = t / eps - (2 * m - 1) as f64 * shift_log(eps, nu) + slope.abs().ln();
    Ok((xg, tg, slope))
}

/// Grazing collision of kinks near a simple zero z0 of 𝒰_{m−1}.
pub fn grazing_model(pot: &Potentials, m: i32, z0: f64, z: f64, t: f64, eps: f64, nu: f64) -> Result<ModelOutput, WaveError> {
    let (xg, tg, slope) = grazing_coords(pot, m, z0, z, t, eps, nu)?;
    let sign = if slope < 0.0 { -1.0 } else { 1.0 };
    Ok(grazing_from(m, sign, xg, tg))
}

fn grazing_from(m: i32, sign: f64, xg: f64, tg: f64) -> ModelOutput {
    let w = xg * sech(tg);
    let (cos_half, sin_half) = if w.abs() > 1e150 {
        (0.0, -parity(m - 1))
    } else {
        let d = 1.0 + w * w;
        (parity(m - 1) * sign * 2.0 * w / d, parity(m - 1) * (1.0 - w * w) / d)
    };
    ModelOutput { cos_half, sin_half, saturated: !w.is_finite(), excluded: false }
}

/// Superluminal kink u(T): (cos u, sin u).
pub fn exact_kink(t: f64, sigma: f64) -> (f64, f64) {
    let s = sech(t);
    (2.0 * s * s - 1.0, -2.0 * sigma * s * t.tanh())
}

/// Grazing collision u(X, T): (cos u, sin u).
pub fn exact_grazing(x: f64, t: f64, kappa_sign: f64) -> (f64, f64) {
    let w = x * sech(t);
    let d = 1.0 + w * w;
    (8.0 * w * w / (d * d) - 1.0, 4.0 * kappa_sign * w * (1.0 - w * w) / (d * d))
}

/// Ṙ in log space: −sgn(f)/(e^{b−a} + 16e^{−a}) with a = ln|numerator|, b = ln of the B-term.
fn rdot(sign: f64, a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return 0.0;
    }
    -sign / ((b - a).exp() + 16.0 * (-a).exp())
}

/// (2Ṙ/(Ṙ²+1), (Ṙ²−1)/(Ṙ²+1)) without overflow.
fn rational_pair(r: f64) -> (f64, f64) {
    if r.abs() <= 1.0 {
        let d = r * r + 1.0;
        (2.0 * r / d, (r * r - 1.0) / d)
    } else {
        let q = 1.0 / r;
        let d = 1.0 + q * q;
        (2.0 * q / d, (1.0 - q * q) / d)
    }
}

/// Multiscale model with its ratio Ṙ.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Multiscale {
    pub out: ModelOutput,
    pub rdot: f64,
}

/// Ċ, Ṡ for region (m, ±); `q` is q_m for + and q_{m−1} for −.
pub fn multiscale_model(pot: &Potentials, m: i32, side: Side, z: f64, q: f64, eps: f64, nu: f64) -> Result<Multiscale, WaveError> {
    let f = pot.fns(m)?;
    let pt = f.at(z);
    Ok(multiscale_at(&pt, m, side, q, eps, nu))
}

/// As [`multiscale_model`] with the hierarchy values already evaluated.
pub fn multiscale_at(pt: &PiiPoint, m: i32, side: Side, q: f64, eps: f64, nu: f64) -> Multiscale {
    let (ln2, lnu, leps) = (std::f64::consts::LN_2, nu.ln(), eps.ln());
    let mf = m as f64;
    let (val, bval) = match side {
        Side::Plus => (pt.u, pt.b12),
        Side::Minus => (pt.v, pt.b21),
    };
    let (r, saturated) = match (val, bval) {
        (Some(v), Some(b)) => {
            let sign = if v < 0.0 { -1.0 } else { 1.0 };
            let (a, bb) = match side {
                Side::Plus => (
                    4.0 * (1.0 - mf) * ln2 - 2.0 * mf / 3.0 * lnu + q + v.abs().ln(),
                    -8.0 * mf * ln2 - 2.0 * (1.0 + 2.0 * mf) / 3.0 * lnu + 2.0 / 3.0 * leps + 2.0 * q + 2.0 * b.abs().ln(),
                ),
                Side::Minus => (
                    4.0 * mf * ln2 + 2.0 * (mf - 1.0) / 3.0 * lnu - q + v.abs().ln(),
                    8.0 * (mf - 1.0) * ln2 + (-2.0 + 4.0 * mf / 3.0) * lnu + 2.0 / 3.0 * leps - 2.0 * q + 2.0 * b.abs().ln(),
                ),
            };
            (rdot(sign, a, bb), v == 0.0)
        }
        // At a pole the squared B-entry dominates: Ṙ → 0.
        _ => (0.0, true),
    };
    let (c, s) = rational_pair(r);
    let cs = match side {
        Side::Plus => parity(m + 1),
        Side::Minus => parity(m),
    };
    Multiscale { out: ModelOutput { cos_half: cs * c, sin_half: parity(m + 1) * s, saturated, excluded: false }, rdot: r }
}

/// Leading-order t ≈ 0 model for εu_t: −(S + 1/S) = −2, together with the constants it rests on.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GModel {
    pub value: f64,
    pub s: f64,
    pub w_star: f64,
    /// G(x_crit), which the model should reproduce.
    pub g_at_crit: f64,
}

pub fn g_model(crit: &CritConstants, _z: f64, _q0: f64) -> GModel {
    GModel { value: -(crit.s + 1.0 / crit.s), s: crit.s, w_star: crit.w_star, g_at_crit: -2.0 }
}

/// Selects the region (m,+) or (m+1,−) containing (z, s) and evaluates Ċ/Ṡ there.
pub fn model_at(regions: &Regions, crit: &CritConstants, z: f64, s: f64) -> Result<(RegionLabel, Multiscale), WaveError> {
    let labels = regions.classify(z, s)?;
    // Prefer the label with the largest margin; ties keep classification order.
    let mut best = (labels[0], f64::NEG_INFINITY);
    for &l in &labels {
        let mg = regions.membership(l, z, s)?.margin;
        if mg > best.1 {
            best = (l, mg);
        }
    }
    let l = best.0;
    let eps = regions.params.eps;
    let q = match l.side {
        Side::Plus => q_of(s, l.m, eps),
        Side::Minus => q_of(s, l.m - 1, eps),
    };
    Ok((l, multiscale_model(regions.potentials(), l.m, l.side, z, q, eps, crit.nu)?))
}

/// One region's formula at a point, with its error envelope.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RegionEval {
    pub label: RegionLabel,
    pub model: Multiscale,
    pub envelope: f64,
}

/// Every region claiming a point. Where regions overlap the formulas may differ; a
/// difference larger than the two envelopes combined is flagged.
#[derive(Clone, Debug, Serialize)]
pub struct OverlapReport {
    pub evals: Vec<RegionEval>,
    /// Largest pairwise max(|ΔĊ|, |ΔṠ|).
    pub disagreement: f64,
    /// Combined envelope of the pair attaining `disagreement`.
    pub envelope_sum: f64,
    pub flagged: bool,
}

pub fn model_all(regions: &Regions, crit: &CritConstants, z: f64, s: f64) -> Result<OverlapReport, WaveError> {
    let eps = regions.params.eps;
    let evals = regions
        .classify(z, s)?
        .into_iter()
        .map(|label| {
            let q = match label.side {
                Side::Plus => q_of(s, label.m, eps),
                Side::Minus => q_of(s, label.m - 1, eps),
            };
            let model = multiscale_model(regions.potentials(), label.m, label.side, z, q, eps, crit.nu)?;
            let envelope = regions.error_envelope(label.m, label.side, z, q)?;
            Ok(RegionEval { label, model, envelope })
        })
        .collect::<Result<Vec<_>, WaveError>>()?;
    let (mut disagreement, mut envelope_sum) = (0.0f64, 0.0f64);
    for (i, a) in evals.iter().enumerate() {
        for b in &evals[i + 1..] {
            let d = (a.model.out.cos_half - b.model.out.cos_half).abs().max((a.model.out.sin_half - b.model.out.sin_half).abs());
            if d >= disagreement {
                disagreement = d;
                envelope_sum = a.envelope + b.envelope;
            }
        }
    }
    Ok(OverlapReport { evals, disagreement, envelope_sum, flagged: disagreement > envelope_sum })
}

/// Ċ/Ṡ as a function of the physical (x, t) near +x_crit, in leading-order coordinates.
pub struct CriticalModel {
    pub regions: Regions,
    pub crit: CritConstants,
}

impl CriticalModel {
    pub fn z_of(&self, x: f64) -> f64 {
        (x - self.crit.x_crit) / (2.0 * self.crit.nu.cbrt() * self.regions.params.eps.powf(2.0 / 3.0))
    }

    pub fn eval(&self, x: f64, t: f64) -> Result<ModelOutput, WaveError> {
        Ok(model_at(&self.regions, &self.crit, self.z_of(x), t)?.1.out)
    }
}

/// Sampled (cos u, sin u) on a uniform (X, T) grid; row i is T = t0 + ih, column j is X = x0 + jh.
#[derive(Clone, Debug)]
pub struct AngleField {
    pub x0: f64,
    pub t0: f64,
    pub h: f64,
    pub nx: usize,
    pub nt: usize,
    pub cos_u: Vec<f64>,
    pub sin_u: Vec<f64>,
}

impl AngleField {
    pub fn from_fn(x0: f64, t0: f64, h: f64, nx: usize, nt: usize, f: impl Fn(f64, f64) -> (f64, f64) + Sync + Send) -> Self {
        let rows = crate::par::map_range(nt, |i| {
            let t = t0 + i as f64 * h;
            (0..nx).map(|j| f(x0 + j as f64 * h, t)).collect::<Vec<_>>()
        });
        let (cos_u, sin_u) = rows.into_iter().flatten().unzip();
        AngleField { x0, t0, h, nx, nt, cos_u, sin_u }
    }

    /// Continuous angle, unwrapped down the first column and then along each row.
    pub fn unwrap(&self) -> Result<Vec<f64>, WaveError> {
        let (nx, nt) = (self.nx, self.nt);
        let raw: Vec<f64> = self.sin_u.iter().zip(&self.cos_u).map(|(s, c)| s.atan2(*c)).collect();
        let follow = |prev: f64, a: f64| {
            let k = ((prev - a) / std::f64::consts::TAU).round();
            a + k * std::f64::consts::TAU
        };
        let mut u = vec![0.0; nx * nt];
        for i in 0..nt {
            u[i * nx] = if i == 0 { raw[0] } else { follow(u[(i - 1) * nx], raw[i * nx]) };
            for j in 1..nx {
                u[i * nx + j] = follow(u[i * nx + j - 1], raw[i * nx + j]);
            }
        }
        for i in 0..nt {
            for j in 0..nx {
                let here = u[i * nx + j];
                let right = (j + 1 < nx).then(|| u[i * nx + j + 1]);
                let down = (i + 1 < nt).then(|| u[(i + 1) * nx + j]);
                if right.into_iter().chain(down).any(|v| (v - here).abs() > std::f64::consts::PI) {
                    return Err(WaveError::Unwrap { row: i, col: j });
                }
            }
        }
        Ok(u)
    }
}

/// max |u_TT − u_XX + sin u| over interior nodes by second-order central differences.
pub fn sg_residual(field: &AngleField) -> Result<f64, WaveError> {
    let u = field.unwrap()?;
    let (nx, nt, h2) = (field.nx, field.nt, field.h * field.h);
    let mut worst = 0.0f64;
    for i in 1..nt.saturating_sub(1) {
        for j in 1..nx.saturating_sub(1) {
            let c = u[i * nx + j];
            let utt = (u[(i + 1) * nx + j] - 2.0 * c + u[(i - 1) * nx + j]) / h2;
            let uxx = (u[i * nx + j + 1] - 2.0 * c + u[i * nx + j - 1]) / h2;
            worst = worst.max((utt - uxx + c.sin()).abs());
        }
    }
    Ok(worst)
}

/// Kink/grazing comparison at one point of the plane.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OverlapSample {
    pub z: f64,
    pub t: f64,
    pub x_g: f64,
    pub t_g: f64,
    pub grazing: ModelOutput,
    /// Kink of index m−1 (below the collision) and m (above).
    pub kink_lower: ModelOutput,
    pub kink_upper: ModelOutput,
    /// max(|Δcos|, |Δsin|) against the kink on the same side of the collision.
    pub difference: f64,
}

/// Compare grazing_model with the kink on the same side of the collision at (z0 + dz, T_G = tg).
pub fn overlap_sample(pot: &Potentials, m: i32, z0: f64, dz: f64, tg: f64, eps: f64, nu: f64) -> Result<OverlapSample, WaveError> {
    let slope = pot.fns(m - 1)?.du.eval_f64(z0)?;
    let t = eps * (tg + (2 * m - 1) as f64 * shift_log(eps, nu) - slope.abs().ln());
    let z = z0 + dz;
    let (x_g, t_g, _) = grazing_coords(pot, m, z0, z, t, eps, nu)?;
    let grazing = grazing_model(pot, m, z0, z, t, eps, nu)?;
    let kink_lower = kink_model(pot, m - 1, z, t, eps, nu)?;
    let kink_upper = kink_model(pot, m, z, t, eps, nu)?;
    let near = if tg <= 0.0 { kink_lower } else { kink_upper };
    let difference = (near.cos_half - grazing.cos_half).abs().max((near.sin_half - grazing.sin_half).abs());
    Ok(OverlapSample { z, t, x_g, t_g, grazing, kink_lower, kink_upper, difference })
}

/// Metadata written beside CSV outputs.
#[derive(Clone, Debug, Serialize)]
pub struct Sidecar {
    pub eps: f64,
    pub nu: f64,
    pub delta: f64,
    pub kappa: f64,
    pub profile: crate::initdata::ProfileConfig,
}

pub fn write_curves_csv<W: Write>(w: W, curves: &[(i32, Vec<Vec<(f64, f64)>>)]) -> Result<(), WaveError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["m", "segment", "z", "t"])?;
    for (m, segs) in curves {
        for (k, seg) in segs.iter().enumerate() {
            for (z, t) in seg {
                out.serialize((m, k, z, t))?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Rows (x, t, cosHalf, sinHalf).
pub fn write_field_csv<W: Write>(w: W, rows: &[(f64, f64, ModelOutput)]) -> Result<(), WaveError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", "t", "cos_half", "sin_half"])?;
    for (x, t, o) in rows {
        out.serialize((x, t, o.cos_half, o.sin_half))?;
    }
    out.flush()?;
    Ok(())
}

/// Rows (y, s, m, sign).
pub fn write_regions_csv<W: Write>(w: W, rows: &[(f64, f64, RegionLabel)]) -> Result<(), WaveError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["y", "s", "m", "sign"])?;
    for (y, s, l) in rows {
        out.serialize((y, s, l.m, l.side.to_string()))?;
    }
    out.flush()?;
    Ok(())
}
