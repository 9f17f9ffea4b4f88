//! Direct solver for ε²u_tt − ε²u_xx + sin u = 0 with pure-impulse data
//! u(x,0) = 0, εu_t(x,0) = G(x), used as an independent oracle for the models.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::initdata::Profile;
use crate::waveform::{ModelOutput, WaveError};

#[derive(Debug, Error)]
pub enum PdeError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("grid does not resolve eps: dx = {dx} > eps/10 = {limit}")]
    Unresolved { dx: f64, limit: f64 },
    #[error("impulse at the boundary |G(±{half_width})| = {g} is not below {limit}")]
    BoundaryData { half_width: f64, g: f64, limit: f64 },
    #[error("non-finite field at step {step} (t = {t}, node {node})")]
    Blowup { step: usize, t: f64, node: usize },
    #[error("comparison window is empty or outside the solved range: {0}")]
    Window(String),
    #[error(transparent)]
    Model(#[from] WaveError),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
    #[error("output: {0}")]
    Json(#[from] serde_json::Error),
}

/// Largest admissible |G(±L)|.
pub const BOUNDARY_IMPULSE_LIMIT: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Half-width L of the domain [−L, L].
    pub half_width: f64,
    pub nx: usize,
    pub eps: f64,
    pub t_end: f64,
    pub cfl: f64,
    pub output_every: usize,
}

impl SolverConfig {
    /// Smallest integer L with |G(±L)| below the boundary limit, dx ≈ ε/30, cfl 0.5.
    pub fn for_profile(p: &dyn Profile, eps: f64, t_end: f64) -> Self {
        let mut half_width = 1.0;
        while (p.g(half_width).abs() >= BOUNDARY_IMPULSE_LIMIT || p.g(-half_width).abs() >= BOUNDARY_IMPULSE_LIMIT) && half_width < 1e3 {
            half_width += 1.0;
        }
        let nx = (2.0 * half_width / (eps / 30.0)).ceil() as usize;
        SolverConfig { half_width, nx: nx + nx % 2, eps, t_end, cfl: 0.5, output_every: 1 }
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.nx as f64
    }

    /// Uniform step ≤ cfl·min(dx, ε/4) landing exactly on t_end.
    pub fn steps(&self) -> (usize, f64) {
        let bound = self.cfl * self.dx().min(self.eps / 4.0);
        let n = (self.t_end / bound).ceil().max(1.0) as usize;
        (n, self.t_end / n as f64)
    }

    pub fn validate(&self) -> Result<(), PdeError> {
        let bad = |m: &str| Err(PdeError::InvalidConfig(m.into()));
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return bad("half_width must be positive");
        }
        if self.nx < 4 || self.nx % 2 != 0 {
            return bad("nx must be even and at least 4");
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad("eps must lie in (0, 1)");
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad("t_end must be positive");
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return bad("cfl must lie in (0, 1)");
        }
        if self.output_every == 0 {
            return bad("output_every must be positive");
        }
        if self.dx() > self.eps / 10.0 {
            return Err(PdeError::Unresolved { dx: self.dx(), limit: self.eps / 10.0 });
        }
        Ok(())
    }

    /// Node x_j = L(2j − nx)/nx, exactly antisymmetric under j ↦ nx − j.
    pub fn x(&self, j: usize) -> f64 {
        self.half_width * (2.0 * j as f64 - self.nx as f64) / self.nx as f64
    }
}

/// u and εu_t on the nodes x_0 … x_nx.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldFrame {
    pub t: f64,
    pub step: usize,
    pub half_width: f64,
    pub nx: usize,
    pub u: Vec<f64>,
    pub eps_ut: Vec<f64>,
}

impl FieldFrame {
    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.nx as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.half_width * (2.0 * j as f64 - self.nx as f64) / self.nx as f64
    }

    /// Linear interpolation of u at x.
    pub fn u_at(&self, x: f64) -> f64 {
        let pos = ((x + self.half_width) / self.dx()).clamp(0.0, self.nx as f64);
        let j = (pos.floor() as usize).min(self.nx - 1);
        let w = pos - j as f64;
        (1.0 - w) * self.u[j] + w * self.u[j + 1]
    }

    /// max_j |u(x_j) − u(−x_j)|.
    pub fn parity_defect(&self) -> f64 {
        (0..=self.nx).map(|j| (self.u[j] - self.u[self.nx - j]).abs()).fold(0.0, f64::max)
    }
}

/// Störmer–Verlet time stepper yielding frames every `output_every` steps
/// (the initial frame first, the t_end frame last).
pub struct Solver {
    cfg: SolverConfig,
    dt: f64,
    n_steps: usize,
    step: usize,
    u: Vec<f64>,
    v: Vec<f64>,
    acc: Vec<f64>,
    started: bool,
    failed: bool,
}

impl Solver {
    /// Start from u = 0 and the given εu_t on the nodes.
    pub fn new(cfg: SolverConfig, eps_ut: Vec<f64>) -> Result<Self, PdeError> {
        cfg.validate()?;
        if eps_ut.len() != cfg.nx + 1 {
            return Err(PdeError::InvalidConfig(format!("initial data has {} nodes, expected {}", eps_ut.len(), cfg.nx + 1)));
        }
        let (n_steps, dt) = cfg.steps();
        let u = vec![0.0; cfg.nx + 1];
        let mut acc = vec![0.0; cfg.nx + 1];
        accel(&u, &mut acc, cfg.dx(), cfg.eps);
        Ok(Solver { cfg, dt, n_steps, step: 0, u, v: eps_ut, acc, started: false, failed: false })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn t(&self) -> f64 {
        if self.step == self.n_steps { self.cfg.t_end } else { self.step as f64 * self.dt }
    }

    fn frame(&self) -> FieldFrame {
        FieldFrame { t: self.t(), step: self.step, half_width: self.cfg.half_width, nx: self.cfg.nx, u: self.u.clone(), eps_ut: self.v.clone() }
    }

    fn advance(&mut self) -> Result<(), PdeError> {
        let (dt, eps) = (self.dt, self.cfg.eps);
        let half = 0.5 * dt * eps;
        for ((u, v), a) in self.u.iter_mut().zip(self.v.iter_mut()).zip(&self.acc) {
            *v += half * a;
            *u += dt * *v / eps;
        }
        accel(&self.u, &mut self.acc, self.cfg.dx(), eps);
        for (v, a) in self.v.iter_mut().zip(&self.acc) {
            *v += half * a;
        }
        self.step += 1;
        if let Some(node) = self.u.iter().zip(&self.v).position(|(u, v)| !u.is_finite() || !v.is_finite()) {
            return Err(PdeError::Blowup { step: self.step, t: self.t(), node });
        }
        Ok(())
    }
}

impl Iterator for Solver {
    type Item = Result<FieldFrame, PdeError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(Ok(self.frame()));
        }
        if self.step >= self.n_steps {
            return None;
        }
        let target = (self.step + self.cfg.output_every).min(self.n_steps);
        while self.step < target {
            if let Err(e) = self.advance() {
                self.failed = true;
                return Some(Err(e));
            }
        }
        Some(Ok(self.frame()))
    }
}

/// u_xx − ε⁻² sin u with mirrored ghost nodes; neighbour sums are formed
/// symmetrically so even data stay exactly even.
fn accel(u: &[f64], acc: &mut [f64], dx: f64, eps: f64) {
    let n = u.len() - 1;
    let (idx2, ie2) = (1.0 / (dx * dx), 1.0 / (eps * eps));
    let node = |j: usize| {
        let l = if j == 0 { u[1] } else { u[j - 1] };
        let r = if j == n { u[n - 1] } else { u[j + 1] };
        ((l + r) - 2.0 * u[j]) * idx2 - u[j].sin() * ie2
    };
    #[cfg(feature = "parallel")]
    if n >= 1 << 14 {
        use rayon::prelude::*;
        acc.par_iter_mut().enumerate().for_each(|(j, a)| *a = node(j));
        return;
    }
    for (j, a) in acc.iter_mut().enumerate() {
        *a = node(j);
    }
}

/// Solve the Cauchy problem for the profile's impulse.
pub fn pde_solve(p: &dyn Profile, cfg: SolverConfig) -> Result<Solver, PdeError> {
    cfg.validate()?;
    let g = p.g(cfg.half_width).abs().max(p.g(-cfg.half_width).abs());
    if g >= BOUNDARY_IMPULSE_LIMIT {
        return Err(PdeError::BoundaryData { half_width: cfg.half_width, g, limit: BOUNDARY_IMPULSE_LIMIT });
    }
    let data = (0..=cfg.nx).map(|j| p.g(cfg.x(j))).collect();
    Solver::new(cfg, data)
}

/// Trapezoid integral of ½(εu_t)² + (1 − cos u) plus ½(εu_x)² with u_x taken on cells,
/// which is the quantity the scheme conserves up to O(dt²) oscillation.
pub fn pde_energy(frame: &FieldFrame, eps: f64) -> f64 {
    let dx = frame.dx();
    let n = frame.nx;
    let local = |j: usize| 0.5 * frame.eps_ut[j] * frame.eps_ut[j] + (1.0 - frame.u[j].cos());
    let mut e = 0.5 * (local(0) + local(n));
    e += (1..n).map(local).sum::<f64>();
    let grad: f64 = frame.u.windows(2).map(|w| {
        let ux = eps * (w[1] - w[0]) / dx;
        0.5 * ux * ux
    }).sum();
    (e + grad) * dx
}

/// Space-time comparison window |x − center| ≤ half_width, t ∈ [t_min, t_max].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub center: f64,
    pub half_width: f64,
    pub t_min: f64,
    pub t_max: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct CompareReport {
    pub sup_error: f64,
    pub l2_error: f64,
    pub samples: usize,
    /// (x, t) of the largest deviation.
    pub worst: (f64, f64),
}

/// max(|cos(u/2) − Ċ|, |sin(u/2) − Ṡ|) over all frame nodes inside the window;
/// `l2_error` is the root-mean-square of the same quantity.
pub fn model_compare<I, F>(frames: I, model: F, window: Window) -> Result<CompareReport, PdeError>
where
    I: IntoIterator<Item = Result<FieldFrame, PdeError>>,
    F: Fn(f64, f64) -> Result<ModelOutput, WaveError> + Sync + Send,
{
    let mut rep = CompareReport::default();
    let mut sq = 0.0;
    for frame in frames {
        let frame = frame?;
        if frame.t < window.t_min - 1e-12 || frame.t > window.t_max + 1e-12 {
            continue;
        }
        let nodes: Vec<usize> = (0..=frame.nx).filter(|&j| (frame.x(j) - window.center).abs() <= window.half_width).collect();
        let diffs = crate::par::map(&nodes, |&j| {
            let m = model(frame.x(j), frame.t)?;
            let half = 0.5 * frame.u[j];
            Ok::<_, WaveError>((j, (half.cos() - m.cos_half).abs().max((half.sin() - m.sin_half).abs())))
        });
        for d in diffs {
            let (j, d) = d?;
            rep.samples += 1;
            sq += d * d;
            if d > rep.sup_error {
                rep.sup_error = d;
                rep.worst = (frame.x(j), frame.t);
            }
        }
    }
    if rep.samples == 0 {
        return Err(PdeError::Window(format!("{window:?}")));
    }
    rep.l2_error = (sq / rep.samples as f64).sqrt();
    Ok(rep)
}

#[derive(Serialize)]
struct FrameHeader {
    t: f64,
    nx: usize,
    #[serde(rename = "L")]
    half_width: f64,
    eps: f64,
    step: usize,
    layout: &'static str,
}

/// Write `stem.bin` (u then εu_t, little-endian f64) and `stem.json`; returns both paths.
pub fn write_frame(dir: &Path, stem: &str, frame: &FieldFrame, eps: f64) -> Result<Vec<PathBuf>, PdeError> {
    let bin = dir.join(format!("{stem}.bin"));
    let json = dir.join(format!("{stem}.json"));
    let mut w = std::io::BufWriter::new(std::fs::File::create(&bin)?);
    for x in frame.u.iter().chain(&frame.eps_ut) {
        w.write_all(&x.to_le_bytes())?;
    }
    w.flush()?;
    let header = FrameHeader { t: frame.t, nx: frame.nx, half_width: frame.half_width, eps, step: frame.step, layout: "rows [u, eps_ut] of nx+1 little-endian f64" };
    std::fs::write(&json, serde_json::to_string_pretty(&header)? + "\n")?;
    Ok(vec![bin, json])
}

/// Rows (x, u, eps_ut) for small grids.
pub fn write_frame_csv<W: Write>(w: W, frame: &FieldFrame) -> Result<(), PdeError> {
    let mut out = std::io::BufWriter::new(w);
    writeln!(out, "x,u,eps_ut")?;
    for j in 0..=frame.nx {
        writeln!(out, "{},{},{}", frame.x(j), frame.u[j], frame.eps_ut[j])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initdata::profile_sech;

    fn small(eps: f64, t_end: f64) -> SolverConfig {
        SolverConfig { half_width: 2.0, nx: 400, eps, t_end, cfl: 0.5, output_every: 10 }
    }

    #[test]
    fn zero_impulse_stays_zero() {
        let cfg = small(0.1, 0.5);
        let frames: Vec<_> = Solver::new(cfg, vec![0.0; 401]).unwrap().collect::<Result<_, _>>().unwrap();
        assert!(frames.len() > 2);
        assert!((frames.last().unwrap().t - 0.5).abs() < 1e-15);
        for f in frames {
            assert!(f.u.iter().chain(&f.eps_ut).all(|&x| x == 0.0));
            assert_eq!(pde_energy(&f, 0.1), 0.0);
        }
    }

    #[test]
    fn first_step_is_impulse_times_dt() {
        let cfg = SolverConfig { output_every: 1, ..small(0.1, 0.1) };
        let mut s = Solver::new(cfg, vec![-0.7; 401]).unwrap();
        let dt = s.dt();
        s.next();
        let f = s.next().unwrap().unwrap();
        assert!(f.u.iter().all(|&u| (u - dt * -0.7 / 0.1).abs() < 1e-15));
    }

    #[test]
    fn config_checks() {
        assert!(matches!(small(0.1, 0.0).validate(), Err(PdeError::InvalidConfig(_))));
        assert!(matches!(SolverConfig { nx: 40, ..small(0.1, 1.0) }.validate(), Err(PdeError::Unresolved { .. })));
        let p = profile_sech(3.0).unwrap();
        let cfg = SolverConfig::for_profile(&p, 0.1, 1.0);
        assert!(p.g(cfg.half_width).abs() < BOUNDARY_IMPULSE_LIMIT && p.g(cfg.half_width - 1.0).abs() >= BOUNDARY_IMPULSE_LIMIT);
        cfg.validate().unwrap();
        assert!(matches!(pde_solve(&p, small(0.1, 1.0)), Err(PdeError::BoundaryData { .. })));
        let (n, dt) = cfg.steps();
        assert!((n as f64 * dt - 1.0).abs() < 1e-12 && dt <= 0.5 * cfg.dx());
    }

    #[test]
    fn grid_is_symmetric() {
        let cfg = small(0.1, 1.0);
        for j in 0..=cfg.nx {
            assert_eq!(cfg.x(j), -cfg.x(cfg.nx - j));
        }
        assert_eq!(cfg.x(0), -2.0);
        assert_eq!(cfg.x(cfg.nx), 2.0);
    }

    #[test]
    fn frame_dump_round_trip() {
        let dir = std::env::temp_dir().join(format!("seplab-frame-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let f = FieldFrame { t: 0.25, step: 3, half_width: 1.0, nx: 4, u: vec![0.0, 1.0, 2.0, 1.0, 0.0], eps_ut: vec![-1.0; 5] };
        let paths = write_frame(&dir, "f", &f, 0.1).unwrap();
        let bytes = std::fs::read(&paths[0]).unwrap();
        assert_eq!(bytes.len(), 10 * 8);
        assert_eq!(f64::from_le_bytes(bytes[16..24].try_into().unwrap()), 2.0);
        let h: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&paths[1]).unwrap()).unwrap();
        assert_eq!(h["nx"], 4);
        assert_eq!(h["L"], 1.0);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
