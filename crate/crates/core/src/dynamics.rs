//! Local Lindblad master equation: fixed-step RK4 integration and an exact
//! superoperator-exponential reference.
//!
//! The generator is
//! `d rho/dt = -i [H_M + H_S + H_MS, rho] + sum_k r_k (L_k rho L_k^dagger - {L_k^dagger L_k, rho}/2)`
//! with the dissipators acting on the machine qubits only.

use std::sync::OnceLock;

use num_complex::Complex64 as C64;

use crate::model::{
    build_model, initial_state, Body, InitialVariant, ModelOperators, ScenarioConfig, Site,
    SystemLayout,
};
use crate::qcore::{expm, kron, mat_vec, unvec_columns, vec_columns, ComplexMatrix, DensityMatrix};
use crate::{tol, Error, Result};

#[derive(Debug, Clone, Copy)]
struct Entry {
    row: usize,
    col: usize,
    value: C64,
    /// Index into the generator's frequency table; the entry rotates as `value * exp(i freq t)`.
    freq: usize,
}

fn sparse(m: &ComplexMatrix, frame: &[f64], freqs: &mut Vec<f64>) -> Vec<Entry> {
    let mut out = Vec::new();
    for row in 0..m.rows() {
        for col in 0..m.cols() {
            let value = m[(row, col)];
            if value != C64::new(0.0, 0.0) {
                let f = frame[row] - frame[col];
                let freq = match freqs.iter().position(|&g| g == f) {
                    Some(i) => i,
                    None => {
                        freqs.push(f);
                        freqs.len() - 1
                    }
                };
                out.push(Entry {
                    row,
                    col,
                    value,
                    freq,
                });
            }
        }
    }
    out
}

/// Sparse form of the Lindblad generator, applied to row-major dense states.
///
/// Rewritten as `A rho + rho A^dagger + sum_k r_k L_k rho L_k^dagger` with
/// `A = -i H - 1/2 sum_k r_k L_k^dagger L_k`. Optionally expressed in the
/// rotating frame of a diagonal Hamiltonian `H_F`, where every operator entry
/// `(r, c)` picks up the phase `exp(i (h_r - h_c) t)`.
#[derive(Debug, Clone)]
pub struct Lindbladian {
    dim: usize,
    frame: Vec<f64>,
    freqs: Vec<f64>,
    /// Static diagonal of `A`, applied as `a_r + conj(a_c)` on entry `(r, c)`.
    diagonal: Vec<C64>,
    drift: Vec<Entry>,
    jumps: Vec<(f64, Vec<Entry>)>,
}

impl Lindbladian {
    /// Generator in the laboratory frame.
    pub fn new(ops: &ModelOperators) -> Self {
        Self::in_frame(ops, vec![0.0; ops.dim()])
    }

    /// Generator in the rotating frame of the diagonal part of the Hamiltonian.
    pub fn interaction_frame(ops: &ModelOperators) -> Self {
        let frame = ops.hamiltonian().diagonal().iter().map(|z| z.re).collect();
        Self::in_frame(ops, frame)
    }

    fn in_frame(ops: &ModelOperators, frame: Vec<f64>) -> Self {
        let dim = ops.dim();
        let minus_i = C64::new(0.0, -1.0);
        let h_frame = ComplexMatrix::from_real_diagonal(&frame);
        let mut drift = (&ops.hamiltonian() - &h_frame).scale(minus_i);
        let mut freqs = vec![0.0];
        let mut jumps = Vec::new();
        for ch in &ops.channels {
            if ch.rate == 0.0 {
                continue;
            }
            let decay = &ch.operator.dagger() * &ch.operator;
            drift += &(&decay * (-0.5 * ch.rate));
            jumps.push((ch.rate, sparse(&ch.operator, &frame, &mut freqs)));
        }
        let diagonal = drift.diagonal();
        for (i, d) in diagonal.iter().enumerate() {
            drift[(i, i)] -= d;
        }
        Self {
            dim,
            diagonal,
            drift: sparse(&drift, &frame, &mut freqs),
            frame,
            freqs,
            jumps,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Writes the generator at time `t` applied to `rho` into `out`. `scratch` must hold `dim^2` entries.
    fn apply(&self, t: f64, rho: &[C64], out: &mut [C64], scratch: &mut [C64]) {
        let n = self.dim;
        let phases: Vec<C64> = self
            .freqs
            .iter()
            .map(|&f| {
                if f == 0.0 {
                    C64::new(1.0, 0.0)
                } else {
                    C64::from_polar(1.0, f * t)
                }
            })
            .collect();
        for r in 0..n {
            let a = self.diagonal[r];
            for c in 0..n {
                out[r * n + c] = (a + self.diagonal[c].conj()) * rho[r * n + c];
            }
        }
        for e in &self.drift {
            let value = e.value * phases[e.freq];
            // (A rho)[row, :] += a * rho[col, :]
            let src = &rho[e.col * n..(e.col + 1) * n];
            let dst = &mut out[e.row * n..(e.row + 1) * n];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += value * s;
            }
            // (rho A^dagger)[:, row] += rho[:, col] * conj(a)
            let a = value.conj();
            for r in 0..n {
                out[r * n + e.row] += rho[r * n + e.col] * a;
            }
        }
        for (rate, entries) in &self.jumps {
            scratch.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            for e in entries {
                let value = e.value * phases[e.freq];
                let src = &rho[e.col * n..(e.col + 1) * n];
                let dst = &mut scratch[e.row * n..(e.row + 1) * n];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += value * s;
                }
            }
            for e in entries {
                let a = (e.value * phases[e.freq]).conj() * rate;
                for r in 0..n {
                    out[r * n + e.row] += scratch[r * n + e.col] * a;
                }
            }
        }
    }

    /// Maps a frame state at time `t` back to the laboratory frame, in place.
    fn to_lab(&self, t: f64, rho: &mut [C64]) {
        let n = self.dim;
        for r in 0..n {
            for c in 0..n {
                let freq = self.frame[r] - self.frame[c];
                if freq != 0.0 {
                    rho[r * n + c] *= C64::from_polar(1.0, -freq * t);
                }
            }
        }
    }

    /// Laboratory-frame generator applied to an arbitrary square matrix of matching dimension.
    pub fn rhs(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.dim || rho.cols() != self.dim {
            return Err(Error::invalid(format!(
                "state is {}x{}, generator acts on dimension {}",
                rho.rows(),
                rho.cols(),
                self.dim
            )));
        }
        let n = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        let mut scratch = out.clone();
        self.apply(0.0, rho.as_slice(), &mut out, &mut scratch);
        // restore the frame Hamiltonian commutator -i [H_F, rho]
        for r in 0..n {
            for c in 0..n {
                let freq = self.frame[r] - self.frame[c];
                if freq != 0.0 {
                    out[r * n + c] += C64::new(0.0, -freq) * rho[(r, c)];
                }
            }
        }
        ComplexMatrix::new(self.dim, self.dim, out)
    }
}

/// Right-hand side of the master equation at `rho`.
pub fn lindblad_rhs(rho: &ComplexMatrix, ops: &ModelOperators) -> Result<ComplexMatrix> {
    Lindbladian::new(ops).rhs(rho)
}

/// Dense Liouvillian acting on column-stacked states: `vec(rhs(rho)) = L vec(rho)`.
///
/// Built from Kronecker products independently of [`Lindbladian`], which makes
/// it usable as a cross-check.
pub fn liouvillian_matrix(ops: &ModelOperators) -> ComplexMatrix {
    let id = ComplexMatrix::identity(ops.dim());
    let h = ops.hamiltonian();
    let minus_i = C64::new(0.0, -1.0);
    // vec(A X B) = (B^T (x) A) vec(X)
    let mut l = (&kron(&id, &h) - &kron(&h.transpose(), &id)).scale(minus_i);
    for ch in &ops.channels {
        let op = &ch.operator;
        let decay = &op.dagger() * op;
        let jump = kron(&op.conj(), op);
        let anti = &kron(&id, &decay) + &kron(&decay.transpose(), &id);
        l += &(&(&jump - &(&anti * 0.5)) * ch.rate);
    }
    l
}

/// Exact propagation `rho(t0 + k * interval) = unvec(exp(L interval)^k vec(rho(t0)))`.
#[derive(Debug, Clone)]
pub struct ExponentialPropagator {
    dim: usize,
    interval: f64,
    step: ComplexMatrix,
}

impl ExponentialPropagator {
    pub fn new(ops: &ModelOperators, interval: f64) -> Result<Self> {
        if interval.is_nan() || interval <= 0.0 {
            return Err(Error::invalid(format!(
                "interval must be positive, got {interval}"
            )));
        }
        let generator = liouvillian_matrix(ops);
        Ok(Self {
            dim: ops.dim(),
            interval,
            step: expm(&(&generator * interval))?,
        })
    }

    pub fn interval(&self) -> f64 {
        self.interval
    }

    /// States at `interval, 2 interval, ..., count * interval` (the initial state excluded).
    pub fn propagate(&self, rho0: &DensityMatrix, count: usize) -> Result<Vec<DensityMatrix>> {
        let mut v = vec_columns(rho0.matrix());
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            v = mat_vec(&self.step, &v)?;
            out.push(DensityMatrix::new(unvec_columns(&v, self.dim)?)?);
        }
        Ok(out)
    }
}

const CACHE_SLOTS: usize = 6;

fn cache_slot(sites: &[Site]) -> Option<usize> {
    match sites {
        [Site::M1] => Some(0),
        [Site::M2] => Some(1),
        [Site::S1] => Some(2),
        [Site::S2] => Some(3),
        [Site::M1, Site::M2] => Some(4),
        [Site::S1, Site::S2] => Some(5),
        _ => None,
    }
}

/// Sampled solution of the master equation.
#[derive(Debug)]
pub struct Trajectory {
    config: ScenarioConfig,
    variant: Option<InitialVariant>,
    times: Vec<f64>,
    states: Vec<DensityMatrix>,
    reduced: [OnceLock<Vec<DensityMatrix>>; CACHE_SLOTS],
}

impl Trajectory {
    fn new(
        config: ScenarioConfig,
        variant: Option<InitialVariant>,
        times: Vec<f64>,
        states: Vec<DensityMatrix>,
    ) -> Self {
        Self {
            config,
            variant,
            times,
            states,
            reduced: Default::default(),
        }
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    /// Initial preparation, or `None` for a user-supplied initial state.
    pub fn variant(&self) -> Option<InitialVariant> {
        self.variant
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn initial(&self) -> &DensityMatrix {
        &self.states[0]
    }

    pub fn last(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory is never empty")
    }

    /// Reduced states on `sites` (layout order) at every sample. Single qubits and
    /// the two bodies are cached after the first request.
    pub fn reduced(&self, sites: &[Site]) -> Result<std::borrow::Cow<'_, [DensityMatrix]>> {
        let mut sorted = sites.to_vec();
        sorted.sort();
        let compute = || -> Result<Vec<DensityMatrix>> {
            self.states
                .iter()
                .map(|rho| SystemLayout.reduce(rho, &sorted))
                .collect()
        };
        match cache_slot(&sorted) {
            Some(slot) => {
                if let Some(cached) = self.reduced[slot].get() {
                    return Ok(std::borrow::Cow::Borrowed(cached));
                }
                let computed = compute()?;
                Ok(std::borrow::Cow::Borrowed(
                    self.reduced[slot].get_or_init(|| computed),
                ))
            }
            None => compute().map(std::borrow::Cow::Owned),
        }
    }

    pub fn reduced_site(&self, site: Site) -> &[DensityMatrix] {
        match self.reduced(&[site]).expect("single-site reduction") {
            std::borrow::Cow::Borrowed(s) => s,
            std::borrow::Cow::Owned(_) => unreachable!("single sites are cached"),
        }
    }

    pub fn reduced_body(&self, body: Body) -> &[DensityMatrix] {
        match self.reduced(&body.sites()).expect("body reduction") {
            std::borrow::Cow::Borrowed(s) => s,
            std::borrow::Cow::Owned(_) => unreachable!("bodies are cached"),
        }
    }
}

/// Integrates from the configured initial state.
pub fn evolve(config: &ScenarioConfig, variant: InitialVariant) -> Result<Trajectory> {
    let rho0 = initial_state(config, variant)?;
    let ops = build_model(config)?;
    let (times, states) = integrate(&ops, &rho0)?;
    Ok(Trajectory::new(
        config.clone(),
        Some(variant),
        times,
        states,
    ))
}

/// Integrates the configured dynamics from an arbitrary 16-dimensional initial state.
pub fn evolve_from(config: &ScenarioConfig, rho0: DensityMatrix) -> Result<Trajectory> {
    let ops = build_model(config)?;
    if rho0.dim() != ops.dim() {
        return Err(Error::invalid(format!(
            "initial state has dimension {}, model needs {}",
            rho0.dim(),
            ops.dim()
        )));
    }
    let (times, states) = integrate(&ops, &rho0)?;
    Ok(Trajectory::new(config.clone(), None, times, states))
}

fn integrate(ops: &ModelOperators, rho0: &DensityMatrix) -> Result<(Vec<f64>, Vec<DensityMatrix>)> {
    let cfg = &ops.config;
    let generator = Lindbladian::interaction_frame(ops);
    let n = generator.dim();
    let len = n * n;
    let h = cfg.dt;
    let steps = cfg.step_count();
    let stride = cfg.sample_stride;

    let mut y = rho0.matrix().as_slice().to_vec();
    let zero = C64::new(0.0, 0.0);
    let (mut k, mut stage, mut acc, mut scratch) = (
        vec![zero; len],
        vec![zero; len],
        vec![zero; len],
        vec![zero; len],
    );

    let mut times = vec![0.0];
    let mut states = vec![rho0.clone()];
    for step in 1..=steps {
        let t0 = (step - 1) as f64 * h;
        acc.copy_from_slice(&y);
        generator.apply(t0, &y, &mut k, &mut scratch);
        for i in 0..len {
            acc[i] += k[i] * (h / 6.0);
            stage[i] = y[i] + k[i] * (h / 2.0);
        }
        generator.apply(t0 + h / 2.0, &stage, &mut k, &mut scratch);
        for i in 0..len {
            acc[i] += k[i] * (h / 3.0);
            stage[i] = y[i] + k[i] * (h / 2.0);
        }
        generator.apply(t0 + h / 2.0, &stage, &mut k, &mut scratch);
        for i in 0..len {
            acc[i] += k[i] * (h / 3.0);
            stage[i] = y[i] + k[i] * h;
        }
        generator.apply(t0 + h, &stage, &mut k, &mut scratch);
        for i in 0..len {
            y[i] = acc[i] + k[i] * (h / 6.0);
        }

        if step % stride == 0 {
            let t = step as f64 * h;
            normalize_trace(&mut y, n, t)?;
            let mut lab = y.clone();
            generator.to_lab(t, &mut lab);
            states.push(checked_snapshot(lab, n, t)?);
            times.push(t);
        }
    }
    Ok((times, states))
}

/// Divides out small trace drift in place; larger drift is an integration failure.
fn normalize_trace(y: &mut [C64], n: usize, t: f64) -> Result<()> {
    if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Integration {
            time: t,
            reason: "state contains non-finite entries".into(),
        });
    }
    let trace: C64 = (0..n).map(|i| y[i * n + i]).sum();
    let drift = (trace - C64::new(1.0, 0.0)).norm();
    if drift > tol::TRACE {
        return Err(Error::Integration {
            time: t,
            reason: format!("trace drifted to {trace}"),
        });
    }
    if drift > tol::RENORMALIZE_FLOOR {
        y.iter_mut().for_each(|z| *z /= trace);
    }
    Ok(())
}

fn checked_snapshot(y: Vec<C64>, n: usize, t: f64) -> Result<DensityMatrix> {
    let rho = DensityMatrix::from_matrix_unchecked(ComplexMatrix::new(n, n, y)?);
    let min = rho.min_eigenvalue();
    if min < tol::INSTABILITY_EIGENVALUE {
        return Err(Error::Integration {
            time: t,
            reason: format!("eigenvalue {min:e} below {:e}", tol::INSTABILITY_EIGENVALUE),
        });
    }
    Ok(rho)
}
