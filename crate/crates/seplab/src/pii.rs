//! The rational Painlevé-II hierarchy (𝒰_m, 𝒱_m, 𝒲_m, 𝒵_m) generated exactly
//! from (𝒰₀, 𝒱₀) = (1, −y/6) by Bäcklund steps, with exact identity checks.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use num_bigint::{BigInt, Sign};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ratpoly::{count_roots_closed, poly_real_roots, pow10_neg, BigRat, Poly, RatFun, RatPolyError, RootBox};

#[derive(Debug, Error)]
pub enum PiiError {
    #[error("|m| = {m} exceeds the hierarchy bound {bound}")]
    BoundExceeded { m: i32, bound: i32 },
    #[error("hierarchy corruption at m = {m}: {what}")]
    Corruption { m: i32, what: String },
    #[error("box [{lo}, {hi}] does not isolate a simple pole of U_{m}")]
    NotAPole { m: i32, lo: f64, hi: f64 },
    #[error(transparent)]
    RatPoly(#[from] RatPolyError),
    #[error("cache I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("cache format: {0}")]
    Format(#[from] serde_json::Error),
}

fn r(n: i64, d: i64) -> BigRat {
    BigRat::new(BigInt::from(n), BigInt::from(d))
}

/// `−y/6`.
fn minus_y_over_6() -> Poly {
    Poly::from_coeffs(vec![BigRat::zero(), r(-1, 6)])
}

/// The common Bäcklund map X ↦ −(y/6)X − X′²/X + ½X″.
///
/// Forward: 𝒰_{m+1} = T(𝒰_m). Backward: 𝒱_{m−1} = T(𝒱_m). The division by X is
/// carried out symbolically on numerators and denominators.
pub fn backlund_map(x: &RatFun) -> RatFun {
    let (n, d) = (x.num(), x.den());
    let (n1, d1) = (n.derivative(), d.derivative());
    // X' = a/d², X'' = (a'd − 2ad')/d³
    let a = n1.mul(d).sub(&n.mul(&d1));
    let a1 = a.derivative();
    let half = r(1, 2);
    let term1 = minus_y_over_6().mul(&n.mul(n)).mul(&d.mul(d));
    let term2 = a.mul(&a).neg();
    let term3 = n.mul(&a1.mul(d).sub(&a.mul(&d1).scale(&r(2, 1)))).scale(&half);
    let numer = term1.add(&term2).add(&term3);
    RatFun::from_factored(numer, &[n, d, d, d])
}

/// One forward step (𝒰_m, 𝒱_m) ↦ (𝒰_{m+1}, 𝒱_{m+1}).
pub fn step_up(u: &RatFun, _v: &RatFun) -> Result<(RatFun, RatFun), PiiError> {
    Ok((backlund_map(u), u.recip()?))
}

/// One backward step (𝒰_m, 𝒱_m) ↦ (𝒰_{m−1}, 𝒱_{m−1}).
pub fn step_down(_u: &RatFun, v: &RatFun) -> Result<(RatFun, RatFun), PiiError> {
    Ok((v.recip()?, backlund_map(v)))
}

/// Hierarchy member at index m with derived potentials and cached root data.
#[derive(Clone, Debug)]
pub struct HierarchyEntry {
    pub m: i32,
    pub u: RatFun,
    pub v: RatFun,
    /// 𝒲 = −3𝒰′
    pub w: RatFun,
    /// 𝒵 = 3𝒱′
    pub z: RatFun,
    pub h: RatFun,
    pub zeros_u: Vec<RootBox>,
    pub poles_u: Vec<RootBox>,
    pub zeros_v: Vec<RootBox>,
}

impl HierarchyEntry {
    fn build(m: i32, u: RatFun, v: RatFun, width: &BigRat) -> Self {
        let w = u.derivative().scale(&r(-3, 1));
        let z = v.derivative().scale(&r(3, 1));
        let h = hamiltonian_of(&u, &v, &w, &z);
        let roots = |p: &Poly| if p.degree().unwrap_or(0) == 0 { Vec::new() } else { poly_real_roots(p, width) };
        let zeros_u = roots(u.num());
        let poles_u = roots(u.den());
        let zeros_v = roots(v.num());
        HierarchyEntry { m, u, v, w, z, h, zeros_u, poles_u, zeros_v }
    }

    /// 𝒰′ = −𝒲/3.
    pub fn du(&self) -> RatFun {
        self.w.scale(&r(-1, 3))
    }

    /// 𝒱′ = 𝒵/3.
    pub fn dv(&self) -> RatFun {
        self.z.scale(&r(1, 3))
    }

    /// Poles of 𝒱_m (the same set as the poles of 𝒰_m).
    pub fn poles_v(&self) -> &[RootBox] {
        &self.poles_u
    }

    /// (B₁₂, B₂₁) = (2H𝒰 − 𝒰′, 𝒱′ − 2H𝒱).
    pub fn b_entries(&self) -> (RatFun, RatFun) {
        let two_h = self.h.scale(&r(2, 1));
        (two_h.mul(&self.u).sub(&self.du()), self.dv().sub(&two_h.mul(&self.v)))
    }
}

fn hamiltonian_of(u: &RatFun, v: &RatFun, w: &RatFun, z: &RatFun) -> RatFun {
    let uv = u.mul(v);
    let y = RatFun::from_poly(Poly::y());
    w.mul(z)
        .scale(&r(1, 6))
        .sub(&uv.mul(&uv).scale(&r(3, 2)))
        .sub(&y.mul(&uv).scale(&r(1, 2)))
}

/// Hierarchy configuration.
#[derive(Clone, Debug)]
pub struct HierarchyConfig {
    /// Largest admissible |m|.
    pub bound: i32,
    /// Root-isolation width.
    pub root_width: BigRat,
    /// Optional on-disk memo directory.
    pub cache_dir: Option<PathBuf>,
}

impl Default for HierarchyConfig {
    fn default() -> Self {
        HierarchyConfig { bound: 8, root_width: pow10_neg(12), cache_dir: None }
    }
}

impl HierarchyConfig {
    pub fn with_bound(bound: i32) -> Self {
        HierarchyConfig { bound, ..Default::default() }
    }

    /// Honour the `SEPLAB_CACHE` environment variable.
    pub fn with_env_cache(mut self) -> Self {
        self.cache_dir = std::env::var_os("SEPLAB_CACHE").map(PathBuf::from);
        self
    }
}

/// Memoised hierarchy. Reads are concurrent; generation is serialised.
pub struct Hierarchy {
    cfg: HierarchyConfig,
    pairs: Mutex<BTreeMap<i32, (RatFun, RatFun)>>,
    entries: RwLock<BTreeMap<i32, Arc<HierarchyEntry>>>,
}

impl Hierarchy {
    pub fn new(cfg: HierarchyConfig) -> Self {
        let mut base = BTreeMap::new();
        base.insert(0, (RatFun::one(), RatFun::from_poly(minus_y_over_6())));
        Hierarchy { cfg, pairs: Mutex::new(base), entries: RwLock::new(BTreeMap::new()) }
    }

    pub fn with_bound(bound: i32) -> Self {
        Self::new(HierarchyConfig::with_bound(bound))
    }

    pub fn bound(&self) -> i32 {
        self.cfg.bound
    }

    pub fn config(&self) -> &HierarchyConfig {
        &self.cfg
    }

    fn check(&self, m: i32) -> Result<(), PiiError> {
        if m.abs() > self.cfg.bound {
            Err(PiiError::BoundExceeded { m, bound: self.cfg.bound })
        } else {
            Ok(())
        }
    }

    /// (𝒰_m, 𝒱_m) by |m| exact recursion steps from the base pair.
    pub fn pair(&self, m: i32) -> Result<(RatFun, RatFun), PiiError> {
        self.check(m)?;
        let mut pairs = self.pairs.lock().unwrap();
        if let Some(p) = pairs.get(&m) {
            return Ok(p.clone());
        }
        let dir = m.signum();
        let mut k = 0;
        while pairs.contains_key(&(k + dir)) {
            k += dir;
        }
        while k != m {
            let (u, v) = pairs[&k].clone();
            let next = if dir > 0 { step_up(&u, &v)? } else { step_down(&u, &v)? };
            k += dir;
            pairs.insert(k, next);
        }
        Ok(pairs[&m].clone())
    }

    /// Full entry at index m.
    pub fn entry(&self, m: i32) -> Result<Arc<HierarchyEntry>, PiiError> {
        self.check(m)?;
        if let Some(e) = self.entries.read().unwrap().get(&m) {
            return Ok(e.clone());
        }
        let e = match self.load_cached(m) {
            Some(e) => e,
            None => {
                let (u, v) = self.pair(m)?;
                let e = HierarchyEntry::build(m, u, v, &self.cfg.root_width);
                self.store_cached(&e);
                e
            }
        };
        let e = Arc::new(e);
        self.entries.write().unwrap().entry(m).or_insert_with(|| e.clone());
        Ok(e)
    }

    fn cache_path(&self, m: i32) -> Option<PathBuf> {
        let w = &self.cfg.root_width;
        self.cfg.cache_dir.as_ref().map(|d| d.join(format!("pii_m{m}_w{}_{}.json", w.numer(), w.denom())))
    }

    fn load_cached(&self, m: i32) -> Option<HierarchyEntry> {
        let path = self.cache_path(m)?;
        let text = std::fs::read_to_string(path).ok()?;
        let json: EntryJson = serde_json::from_str(&text).ok()?;
        let e = json.into_entry().ok()?;
        (e.m == m).then_some(e)
    }

    fn store_cached(&self, e: &HierarchyEntry) {
        if let Some(path) = self.cache_path(e.m) {
            if let Some(dir) = path.parent() {
                let _ = std::fs::create_dir_all(dir);
            }
            // A failed write only loses the memo.
            let _ = write_json(&path, &EntryJson::from_entry(e));
        }
    }

    pub fn hamiltonian(&self, m: i32) -> Result<RatFun, PiiError> {
        Ok(self.entry(m)?.h.clone())
    }

    pub fn b_entries(&self, m: i32) -> Result<(RatFun, RatFun), PiiError> {
        Ok(self.entry(m)?.b_entries())
    }

    /// 𝒱𝒰′ − 𝒰𝒱′, which must be the constant 1/6 − m/3.
    pub fn lambda_check(&self, m: i32) -> Result<BigRat, PiiError> {
        let e = self.entry(m)?;
        let lam = e.v.mul(&e.du()).sub(&e.u.mul(&e.dv()));
        let c = lam.as_constant().ok_or_else(|| PiiError::Corruption { m, what: format!("λ not constant: {lam}") })?;
        let expect = r(1, 6) - BigRat::from_integer(BigInt::from(m)) / r(3, 1);
        if c != expect {
            return Err(PiiError::Corruption { m, what: format!("λ = {c}, expected {expect}") });
        }
        Ok(c)
    }

    /// The four residuals of the Painlevé-II system and of the two uncoupled
    /// equations for the logarithmic derivatives; all are zero for a sound entry.
    pub fn pii_residuals(&self, m: i32) -> Result<[RatFun; 4], PiiError> {
        let e = self.entry(m)?;
        let mm = BigRat::from_integer(BigInt::from(m));
        Ok([
            coupled_residual(&e.u, &e.v),
            coupled_residual(&e.v, &e.u),
            log_derivative_residual(&e.u, &(r(2, 3) * &mm)),
            log_derivative_residual(&e.v, &(-(r(2, 3) * (&mm - BigRat::one())))),
        ])
    }

    /// Residue of 𝒰_m at the pole isolated by `bx`, with the paired residue of 𝒱_m.
    pub fn pole_residue(&self, m: i32, bx: &RootBox) -> Result<PoleResidue, PiiError> {
        let e = self.entry(m)?;
        let f = simple_pole_factor(&e.u, m, bx)?;
        let res_u = residue_poly(&e.u, &f);
        let fv = e.v.den().gcd(&f);
        if count_roots_closed(&fv, &bx.low, &bx.high) != 1 {
            return Err(PiiError::Corruption { m, what: "pole of U is not a pole of V".into() });
        }
        let res_v = residue_poly(&e.v, &fv);
        // k_U · k_V + 1 must vanish at the pole.
        let t = res_u.mul(&res_v).add(&Poly::one()).div_rem(&fv).1;
        if !t.is_zero() && count_roots_closed(&t.gcd(&fv), &bx.low, &bx.high) != 1 {
            return Err(PiiError::Corruption { m, what: "residue pairing k ↔ −1/k fails".into() });
        }
        let y0 = bx.midpoint();
        Ok(PoleResidue {
            approx: crate::ratpoly::rat_to_f64(&res_u.eval(&y0)),
            exact: (res_u.degree().unwrap_or(0) == 0).then(|| res_u.coeff(0)),
            residue_poly: res_u,
            v_approx: crate::ratpoly::rat_to_f64(&res_v.eval(&y0)),
            v_exact: (res_v.degree().unwrap_or(0) == 0).then(|| res_v.coeff(0)),
        })
    }

    /// Singularity confinement at a pole y₀ of 𝒰_m: 𝒱_{m+1} and 𝒰_{m−1} are finite
    /// with simple zeros at y₀. Returns the signs of their derivatives there.
    pub fn confinement_check(&self, m: i32, bx: &RootBox) -> Result<Confinement, PiiError> {
        let e = self.entry(m)?;
        let f = simple_pole_factor(&e.u, m, bx)?;
        let v_next = e.u.recip()?; // 𝒱_{m+1} = 1/𝒰_m
        let u_prev = self.entry(m - 1)?.u.clone();
        let sv = simple_zero_sign(&v_next, &f, bx).ok_or_else(|| PiiError::Corruption {
            m,
            what: format!("V_{} lacks a simple zero at the pole", m + 1),
        })?;
        let su = simple_zero_sign(&u_prev, &f, bx).ok_or_else(|| PiiError::Corruption {
            m,
            what: format!("U_{} lacks a simple zero at the pole", m - 1),
        })?;
        Ok(Confinement { v_next_slope_sign: sv, u_prev_slope_sign: su })
    }
}

impl Default for Hierarchy {
    fn default() -> Self {
        Self::new(HierarchyConfig::default())
    }
}

/// 𝒰″ + 2𝒰²𝒱 + (y/3)𝒰 over the cleared denominator d³q (zero test without gcds).
fn coupled_residual(u: &RatFun, v: &RatFun) -> RatFun {
    let (n, d) = (u.num(), u.den());
    let (p, q) = (v.num(), v.den());
    let d1 = d.derivative();
    let a = n.derivative().mul(d).sub(&n.mul(&d1));
    let c = a.derivative().mul(d).sub(&a.mul(&d1).scale(&r(2, 1)));
    let y3 = Poly::from_coeffs(vec![BigRat::zero(), r(1, 3)]);
    let numer = c
        .mul(q)
        .add(&n.mul(n).mul(p).mul(d).scale(&r(2, 1)))
        .add(&y3.mul(n).mul(&d.mul(d)).mul(q));
    cleared(numer, &[d, d, d, q])
}

/// With 𝒫 = X′/X: 𝒫″ − 2𝒫³ − (2/3)y𝒫 + c over the cleared denominator b³.
fn log_derivative_residual(x: &RatFun, c: &BigRat) -> RatFun {
    let (n, d) = (x.num(), x.den());
    let a = n.derivative().mul(d).sub(&n.mul(&d.derivative()));
    let b = n.mul(d);
    let (a1, b1) = (a.derivative(), b.derivative());
    let (a2, b2) = (a1.derivative(), b1.derivative());
    let y23 = Poly::from_coeffs(vec![BigRat::zero(), r(2, 3)]);
    let bb = b.mul(&b);
    let numer = a2
        .mul(&b)
        .sub(&a.mul(&b2))
        .mul(&b)
        .sub(&a1.mul(&b).sub(&a.mul(&b1)).mul(&b1).scale(&r(2, 1)))
        .sub(&a.mul(&a).mul(&a).scale(&r(2, 1)))
        .sub(&y23.mul(&a).mul(&bb))
        .add(&bb.mul(&b).scale(c));
    cleared(numer, &[&b, &b, &b])
}

fn cleared(numer: Poly, den: &[&Poly]) -> RatFun {
    if numer.is_zero() {
        RatFun::zero()
    } else {
        RatFun::from_factored(numer, den)
    }
}

/// Check that `bx` isolates a simple pole of `u`; return the monic squarefree
/// denominator factor.
fn simple_pole_factor(u: &RatFun, m: i32, bx: &RootBox) -> Result<Poly, PiiError> {
    let err = || PiiError::NotAPole { m, lo: crate::ratpoly::rat_to_f64(&bx.low), hi: crate::ratpoly::rat_to_f64(&bx.high) };
    let d = u.den();
    if d.degree().unwrap_or(0) == 0 || count_roots_closed(d, &bx.low, &bx.high) != 1 {
        return Err(err());
    }
    let rep = d.gcd(&d.derivative());
    if rep.degree().unwrap_or(0) > 0 && count_roots_closed(&rep, &bx.low, &bx.high) > 0 {
        return Err(err());
    }
    Ok(d.squarefree())
}

/// r with r(y₀) = num(y₀)/f′(y₀)·(f/den)(y₀), i.e. the residue of num/den at
/// the roots of the squarefree factor f of den, as an element of ℚ[y]/(f).
fn residue_poly(x: &RatFun, f: &Poly) -> Poly {
    // den = f·g with g(y₀) ≠ 0; residue = num/(f′·g) at y₀.
    let g = x.den().div_exact(f);
    let denom = f.derivative().mul(&g).div_rem(f).1;
    let inv = mod_inverse(&denom, f).expect("residue denominator invertible mod f");
    x.num().mul(&inv).div_rem(f).1
}

/// Inverse of a modulo f (extended Euclid over ℚ).
fn mod_inverse(a: &Poly, f: &Poly) -> Option<Poly> {
    let (mut r0, mut r1) = (f.clone(), a.div_rem(f).1);
    let (mut t0, mut t1) = (Poly::zero(), Poly::one());
    while !r1.is_zero() {
        let (q, rem) = r0.div_rem(&r1);
        let t2 = t0.sub(&q.mul(&t1));
        r0 = r1;
        r1 = rem;
        t0 = t1;
        t1 = t2;
    }
    if r0.degree() != Some(0) {
        return None;
    }
    let c = BigRat::one() / r0.coeff(0);
    Some(t0.scale(&c).div_rem(f).1)
}

/// If `x` is finite with a simple zero at the root of `f` isolated by `bx`,
/// return the sign of x′ there.
fn simple_zero_sign(x: &RatFun, f: &Poly, bx: &RootBox) -> Option<i8> {
    let (lo, hi) = (&bx.low, &bx.high);
    if count_roots_closed(&x.den().gcd(f), lo, hi) != 0 {
        return None;
    }
    let g = x.num().gcd(f);
    if count_roots_closed(&g, lo, hi) != 1 {
        return None;
    }
    let np = x.num().derivative();
    if count_roots_closed(&np.gcd(&g), lo, hi) != 0 {
        return None;
    }
    // Shrink the box until neither num′ nor den has a root in it.
    let (mut a, mut b) = (lo.clone(), hi.clone());
    let two = r(2, 1);
    while count_roots_closed(&np, &a, &b) > 0 || count_roots_closed(x.den(), &a, &b) > 0 {
        let mid = (&a + &b) / &two;
        if count_roots_closed(&g, &a, &mid) >= 1 {
            b = mid;
        } else {
            a = mid;
        }
    }
    let mid = (&a + &b) / &two;
    let s = match (np.sign_at(&mid), x.den().sign_at(&mid)) {
        (Sign::NoSign, _) | (_, Sign::NoSign) => return None,
        (p, q) if p == q => 1,
        _ => -1,
    };
    Some(s)
}

/// Residue data at a pole: exact as an element of ℚ[y]/(f) and as a double.
#[derive(Clone, Debug)]
pub struct PoleResidue {
    pub residue_poly: Poly,
    pub exact: Option<BigRat>,
    pub approx: f64,
    pub v_exact: Option<BigRat>,
    pub v_approx: f64,
}

/// Certificate of singularity confinement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Confinement {
    pub v_next_slope_sign: i8,
    pub u_prev_slope_sign: i8,
}

/// JSON form of a rational function: num/den as integer coefficient arrays.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RatFunJson {
    pub num: Vec<String>,
    pub den: Vec<String>,
}

impl RatFunJson {
    pub fn from_ratfun(f: &RatFun) -> Self {
        let (cn, pn) = f.num().content_and_primitive();
        let (cd, pd) = f.den().content_and_primitive();
        if f.is_zero() {
            return RatFunJson { num: vec![], den: vec!["1".into()] };
        }
        // f = (cn/cd)·pn/pd with cn/cd = a/b.
        let s = cn / cd;
        let (a, b) = (s.numer().clone(), s.denom().clone());
        RatFunJson {
            num: pn.iter().map(|c| (c * &a).to_string()).collect(),
            den: pd.iter().map(|c| (c * &b).to_string()).collect(),
        }
    }

    pub fn to_ratfun(&self) -> Result<RatFun, PiiError> {
        let parse = |v: &[String]| -> Result<Poly, PiiError> {
            let ints: Result<Vec<BigInt>, _> = v.iter().map(|s| s.parse::<BigInt>()).collect();
            let ints = ints.map_err(|e| PiiError::Corruption { m: 0, what: format!("bad integer: {e}") })?;
            Ok(Poly::from_ints(ints))
        };
        Ok(RatFun::new(parse(&self.num)?, parse(&self.den)?)?)
    }
}

/// JSON form of a root box: exact rational endpoints as strings.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RootBoxJson(pub String, pub String, pub usize);

impl RootBoxJson {
    fn from_box(b: &RootBox) -> Self {
        RootBoxJson(b.low.to_string(), b.high.to_string(), b.multiplicity)
    }

    fn to_box(&self) -> Result<RootBox, PiiError> {
        let p = |s: &str| s.parse::<BigRat>().map_err(|e| PiiError::Corruption { m: 0, what: format!("bad rational: {e}") });
        Ok(RootBox { low: p(&self.0)?, high: p(&self.1)?, multiplicity: self.2 })
    }
}

/// Exported hierarchy entry.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EntryJson {
    pub m: i32,
    #[serde(rename = "U")]
    pub u: RatFunJson,
    #[serde(rename = "V")]
    pub v: RatFunJson,
    #[serde(rename = "W")]
    pub w: RatFunJson,
    #[serde(rename = "Z")]
    pub z: RatFunJson,
    #[serde(rename = "H")]
    pub h: RatFunJson,
    #[serde(rename = "zerosU")]
    pub zeros_u: Vec<RootBoxJson>,
    #[serde(rename = "polesU")]
    pub poles_u: Vec<RootBoxJson>,
    #[serde(rename = "zerosV")]
    pub zeros_v: Vec<RootBoxJson>,
    /// Human-readable forms and root midpoints.
    pub display: EntryDisplay,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EntryDisplay {
    #[serde(rename = "U")]
    pub u: String,
    #[serde(rename = "V")]
    pub v: String,
    #[serde(rename = "zerosU")]
    pub zeros_u: Vec<f64>,
    #[serde(rename = "polesU")]
    pub poles_u: Vec<f64>,
    #[serde(rename = "zerosV")]
    pub zeros_v: Vec<f64>,
}

impl EntryJson {
    pub fn from_entry(e: &HierarchyEntry) -> Self {
        let boxes = |v: &[RootBox]| v.iter().map(RootBoxJson::from_box).collect();
        let mids = |v: &[RootBox]| v.iter().map(RootBox::mid_f64).collect();
        EntryJson {
            m: e.m,
            u: RatFunJson::from_ratfun(&e.u),
            v: RatFunJson::from_ratfun(&e.v),
            w: RatFunJson::from_ratfun(&e.w),
            z: RatFunJson::from_ratfun(&e.z),
            h: RatFunJson::from_ratfun(&e.h),
            zeros_u: boxes(&e.zeros_u),
            poles_u: boxes(&e.poles_u),
            zeros_v: boxes(&e.zeros_v),
            display: EntryDisplay {
                u: e.u.to_string(),
                v: e.v.to_string(),
                zeros_u: mids(&e.zeros_u),
                poles_u: mids(&e.poles_u),
                zeros_v: mids(&e.zeros_v),
            },
        }
    }

    pub fn into_entry(self) -> Result<HierarchyEntry, PiiError> {
        let boxes = |v: &[RootBoxJson]| v.iter().map(RootBoxJson::to_box).collect::<Result<Vec<_>, _>>();
        Ok(HierarchyEntry {
            m: self.m,
            u: self.u.to_ratfun()?,
            v: self.v.to_ratfun()?,
            w: self.w.to_ratfun()?,
            z: self.z.to_ratfun()?,
            h: self.h.to_ratfun()?,
            zeros_u: boxes(&self.zeros_u)?,
            poles_u: boxes(&self.poles_u)?,
            zeros_v: boxes(&self.zeros_v)?,
        })
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), PiiError> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, serde_json::to_string(value)?)?;
    std::fs::rename(tmp, path)?;
    Ok(())
}

/// (−1/6)^k as an exact rational.
pub fn minus_sixth_pow(k: i32) -> BigRat {
    let base = r(-1, 6);
    let p = num_traits::pow(base, k.unsigned_abs() as usize);
    if k >= 0 { p } else { BigRat::one() / p }
}

/// Sign of 𝒰_m for y beyond every real feature on the given side.
pub fn far_sign(m: i32, positive_side: bool) -> i8 {
    if !positive_side || m % 2 == 0 { 1 } else { -1 }
}
