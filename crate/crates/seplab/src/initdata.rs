//! Impulse profiles G(x) and the scalars, quadratures and coordinates that
//! derive from the critical point where G(x) = −2.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InitError {
    #[error("profile requires G(0) < -2 (got G(0) = {0})")]
    SubcriticalAmplitude(f64),
    #[error("{what} = {value} outside its admissible range {range}")]
    OutOfRange { what: &'static str, value: f64, range: String },
    #[error("root solve failed: {0}")]
    RootSolve(String),
    #[error("identity violated: {what}: |{got} - {want}| > {tol:e}")]
    IdentityViolation { what: &'static str, got: f64, want: f64, tol: f64 },
    #[error("profile config: {0}")]
    Config(String),
}

/// An even, non-positive impulse profile, strictly increasing on x > 0.
pub trait Profile: Send + Sync + std::fmt::Debug {
    fn g(&self, x: f64) -> f64;
    fn dg(&self, x: f64) -> f64;
    /// G(0).
    fn g0(&self) -> f64 {
        self.g(0.0)
    }
    /// ‖G‖₁.
    fn l1norm(&self) -> f64;
    /// Positive branch of G⁻¹ on (G(0), 0).
    fn g_inv(&self, v: f64) -> f64;
    /// 𝒢(m) = √m √(G(0)² − m) / (2G′(G⁻¹(−√m))) on (0, G(0)²), continued to the endpoints.
    fn script_g(&self, m: f64) -> f64;
    fn describe(&self) -> ProfileConfig;
}

/// G(x) = −A sech x.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SechProfile {
    pub amplitude: f64,
}

pub fn profile_sech(amplitude: f64) -> Result<SechProfile, InitError> {
    if !(amplitude > 2.0) || !amplitude.is_finite() {
        return Err(InitError::SubcriticalAmplitude(-amplitude));
    }
    Ok(SechProfile { amplitude })
}

impl Profile for SechProfile {
    fn g(&self, x: f64) -> f64 {
        -self.amplitude / x.cosh()
    }

    fn dg(&self, x: f64) -> f64 {
        self.amplitude * x.tanh() / x.cosh()
    }

    fn l1norm(&self) -> f64 {
        self.amplitude * PI
    }

    fn g_inv(&self, v: f64) -> f64 {
        (self.amplitude / -v).acosh()
    }

    fn script_g(&self, _m: f64) -> f64 {
        // G′ at G⁻¹(−√m) is √m √(A² − m)/A, so the ratio is constant.
        self.amplitude / 2.0
    }

    fn describe(&self) -> ProfileConfig {
        ProfileConfig::Sech { amplitude: self.amplitude }
    }
}

/// Key-value profile description, e.g. `type = "sech"` / `amplitude = 3.0`
/// (TOML) or `{"type": "sech", "amplitude": 3.0}` (JSON).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ProfileConfig {
    Sech { amplitude: f64 },
}

impl ProfileConfig {
    pub fn parse(text: &str) -> Result<Self, InitError> {
        let t = text.trim();
        if t.starts_with('{') {
            serde_json::from_str(t).map_err(|e| InitError::Config(e.to_string()))
        } else {
            toml::from_str(t).map_err(|e| InitError::Config(e.to_string()))
        }
    }

    pub fn build(&self) -> Result<Box<dyn Profile>, InitError> {
        match *self {
            ProfileConfig::Sech { amplitude } => Ok(Box::new(profile_sech(amplitude)?)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CritConstants {
    pub x_crit: f64,
    pub nu: f64,
    /// Leading value of w_* at the critical point.
    pub w_star: f64,
    /// Leading value of S at the critical point.
    pub s: f64,
}

/// Bisection to full double precision on a sign-changing bracket.
fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn crit_constants(p: &dyn Profile) -> Result<CritConstants, InitError> {
    let f = |x: f64| p.g(x) + 2.0;
    let mut hi = 1.0;
    while f(hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(InitError::RootSolve("no x > 0 with G(x) > -2".into()));
        }
    }
    if f(0.0) >= 0.0 {
        return Err(InitError::SubcriticalAmplitude(p.g0()));
    }
    let x_crit = bisect(0.0, hi, f);
    let slope = p.dg(x_crit);
    if !(slope > 0.0) {
        return Err(InitError::RootSolve(format!("G'(x_crit) = {slope}")));
    }
    Ok(CritConstants { x_crit, nu: 1.0 / (12.0 * slope), w_star: -1.0, s: 1.0 })
}

/// ε_N = ‖G‖₁/(4πN).
pub fn epsilon_n(p: &dyn Profile, n: u32) -> Result<f64, InitError> {
    if n < 1 {
        return Err(InitError::OutOfRange { what: "N", value: n as f64, range: "N ≥ 1".into() });
    }
    Ok(p.l1norm() / (4.0 * PI * n as f64))
}

fn rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(20).unwrap()))
}

/// Adaptive composite 20-point Gauss–Legendre: panels are halved until the
/// two-half estimate agrees with the whole to within `tol`.
pub fn integrate(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &impl Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let l = rule().integrate(a, m, f);
        let r = rule().integrate(m, b, f);
        if (l + r - whole).abs() <= tol || depth >= 40 {
            l + r
        } else {
            rec(f, a, m, l, 0.5 * tol, depth + 1) + rec(f, m, b, r, 0.5 * tol, depth + 1)
        }
    }
    rec(f, a, b, rule().integrate(a, b, f), tol, 0)
}

const QUAD_TOL: f64 = 1e-13;

fn check_v(p: &dyn Profile, v: f64, lo: f64) -> Result<(), InitError> {
    let top = -p.g0();
    if !(v > lo && v < top) {
        return Err(InitError::OutOfRange { what: "v", value: v, range: format!("({lo}, {top})") });
    }
    Ok(())
}

/// Ψ(v) = ½∫₀^{G⁻¹(−v)} √(G(s)² − v²) ds, with s = X(1 − u²) removing the
/// square-root endpoint behaviour at X = G⁻¹(−v).
pub fn psi_eval(p: &dyn Profile, v: f64) -> Result<f64, InitError> {
    check_v(p, v, 0.0)?;
    Ok(psi_unchecked(p, v))
}

fn psi_unchecked(p: &dyn Profile, v: f64) -> f64 {
    let x = p.g_inv(-v);
    let f = |u: f64| {
        let s = x * (1.0 - u * u);
        let g = p.g(s);
        (g * g - v * v).max(0.0).sqrt() * x * u
    };
    integrate(&f, 0.0, 1.0, QUAD_TOL)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhiRoute {
    /// Central difference of Ψ.
    Direct,
    /// Single integral of 𝒢 over (v², G(0)²).
    ScriptG,
}

/// φ(v) = dΨ/dv, by either route; 2 < v < −G(0).
pub fn phi_eval(p: &dyn Profile, v: f64, route: PhiRoute) -> Result<f64, InitError> {
    check_v(p, v, 2.0)?;
    Ok(match route {
        PhiRoute::Direct => {
            let h = (1e-4f64).min(0.25 * (-p.g0() - v));
            (psi_unchecked(p, v + h) - psi_unchecked(p, v - h)) / (2.0 * h)
        }
        PhiRoute::ScriptG => phi_script_g(p, v),
    })
}

/// −(v/2)∫ 𝒢(m)/(√(m − v²)√(G(0)² − m)) dm/m with m = mid + half·cos θ.
fn phi_script_g(p: &dyn Profile, v: f64) -> f64 {
    let (a, b) = (v * v, p.g0() * p.g0());
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let f = |th: f64| {
        let m = mid + half * th.cos();
        p.script_g(m) / m
    };
    -0.5 * v * integrate(&f, 0.0, PI, QUAD_TOL)
}

/// Values behind the two critical-point identities.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct IdentityReport {
    pub x_crit: f64,
    pub nu: f64,
    /// (2/π)∫₂^{−G(0)} φ(v) dv/√(v² − 4); should equal −x_crit/2.
    pub i2: f64,
    /// 𝒢(4)/(12√(G(0)² − 4)); should equal ν.
    pub nu_alt: f64,
    pub i2_error: f64,
    pub nu_error: f64,
}

pub const I2_TOL: f64 = 1e-6;
pub const NU_TOL: f64 = 1e-9;

pub fn identity_checks(p: &dyn Profile) -> Result<IdentityReport, InitError> {
    let c = crit_constants(p)?;
    let g0 = -p.g0();
    // v = 2 + w² removes the inverse-square-root singularity at v = 2.
    let f = |w: f64| {
        let v = 2.0 + w * w;
        phi_script_g(p, v) * 2.0 / (4.0 + w * w).sqrt()
    };
    let i2 = 2.0 / PI * integrate(&f, 0.0, (g0 - 2.0).sqrt(), QUAD_TOL);
    let nu_alt = p.script_g(4.0) / (12.0 * (g0 * g0 - 4.0).sqrt());
    let report = IdentityReport {
        x_crit: c.x_crit,
        nu: c.nu,
        i2,
        nu_alt,
        i2_error: (i2 + 0.5 * c.x_crit).abs(),
        nu_error: (nu_alt - c.nu).abs(),
    };
    if !(report.i2_error <= I2_TOL) {
        return Err(InitError::IdentityViolation { what: "I2 = -x_crit/2", got: i2, want: -0.5 * c.x_crit, tol: I2_TOL });
    }
    if !(report.nu_error <= NU_TOL) {
        return Err(InitError::IdentityViolation { what: "nu_alt = nu", got: nu_alt, want: c.nu, tol: NU_TOL });
    }
    Ok(report)
}

/// Roots v_k of Ψ(v) = πε_N(k + ½), k = 0..N−1, in k order. Since Ψ
/// decreases, v_k decreases with k.
pub fn bohr_sommerfeld(p: &dyn Profile, n: u32) -> Result<Vec<f64>, InitError> {
    let eps = epsilon_n(p, n)?;
    let top = -p.g0();
    Ok((0..n)
        .map(|k| {
            let target = PI * eps * (k as f64 + 0.5);
            bisect(0.0, top, |v| {
                let psi = if v <= 0.0 { p.l1norm() / 4.0 } else if v >= top { 0.0 } else { psi_unchecked(p, v) };
                psi - target
            })
        })
        .collect())
}

/// Leading-order local coordinates near the critical point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Coords {
    pub dx: f64,
    pub z: f64,
    pub r: f64,
    pub s: f64,
    pub y: f64,
    pub m: i32,
    pub pm: f64,
    pub qm: f64,
}

/// Shifted time coordinate q_m from t = (2m/3)ε log(1/ε) + εq_m.
pub fn q_of(t: f64, m: i32, eps: f64) -> f64 {
    (t - 2.0 * m as f64 / 3.0 * eps * (1.0 / eps).ln()) / eps
}

/// Inverse of [`q_of`].
pub fn t_of(q: f64, m: i32, eps: f64) -> f64 {
    2.0 * m as f64 / 3.0 * eps * (1.0 / eps).ln() + eps * q
}

/// Strip index with |q_m| ≤ (1/3)log(1/ε); ties go to the lower m.
pub fn strip_index(t: f64, eps: f64) -> i32 {
    let tau = 1.5 * t / (eps * (1.0 / eps).ln());
    (tau - 0.5).ceil() as i32
}

pub fn coords(crit: &CritConstants, x: f64, t: f64, eps: f64) -> Result<Coords, InitError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(InitError::OutOfRange { what: "eps", value: eps, range: "(0, 1)".into() });
    }
    let dx = x - crit.x_crit;
    let r = dx / (2.0 * crit.nu.cbrt());
    let e23 = eps.powf(2.0 / 3.0);
    let m = strip_index(t, eps);
    let s = t;
    Ok(Coords { dx, z: r / e23, r, s, y: r / e23, m, pm: q_of(s, m, eps), qm: q_of(t, m, eps) })
}

/// x from the rescaled coordinate z.
pub fn x_of_z(crit: &CritConstants, z: f64, eps: f64) -> f64 {
    crit.x_crit + 2.0 * crit.nu.cbrt() * eps.powf(2.0 / 3.0) * z
}
