//! Midpoint-quadrature semidiscretization and the forward-Euler scheme.
//!
//! ```text
//! dU_j/dt     = h Σ_r J(x_j − x_r)(U_r − U_j)
//! U_j^{n+1}   = U_j^n (1 − Δt J̃_0) + Δt h Σ_r J(x_j − x_r) U_r^n
//! g(h, Δt, k) = 1 − Δt (J̃_0 − J̃_k)
//! ```
//!
//! `J(x_j − x_r)` is read as `samples[(j − r) mod N]`.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::PeriodicKernel;
use crate::spectral::{self, discrete_norm, GridFunction, SpectralField};

/// Below this size the direct sum runs on one thread.
const PARALLEL_MIN_POINTS: usize = 256;

/// How the quadrature sum `h Σ_r J(x_j − x_r) U_r` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RhsPath {
    /// O(N²) sum in physical space.
    #[default]
    Direct,
    /// Circular convolution through the FFT.
    Convolution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub n_points: usize,
    pub dt: f64,
    pub n_steps: usize,
    /// Only `1.0` is supported.
    pub epsilon: f64,
    /// Keep every `m`-th state (the initial and final states are always kept).
    pub snapshot_every: usize,
    /// Record a non-finite state and stop instead of failing.
    pub allow_blowup: bool,
    pub record_spectra: bool,
    pub rhs: RhsPath,
}

impl SchemeConfig {
    pub fn new(n_points: usize, dt: f64, n_steps: usize) -> Result<Self> {
        let cfg = SchemeConfig {
            n_points,
            dt,
            n_steps,
            epsilon: 1.0,
            snapshot_every: 1,
            allow_blowup: false,
            record_spectra: false,
            rhs: RhsPath::Direct,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn snapshot_every(mut self, m: usize) -> Self {
        self.snapshot_every = m;
        self
    }

    pub fn allow_blowup(mut self, allow: bool) -> Self {
        self.allow_blowup = allow;
        self
    }

    pub fn record_spectra(mut self, record: bool) -> Self {
        self.record_spectra = record;
        self
    }

    pub fn rhs(mut self, path: RhsPath) -> Self {
        self.rhs = path;
        self
    }

    pub fn validate(&self) -> Result<()> {
        spectral::check_even(self.n_points)?;
        if !(self.dt.is_finite() && self.dt >= 0.0) {
            return Err(Error::InvalidParameter(format!("time step must be finite and nonnegative, got {}", self.dt)));
        }
        if self.epsilon != 1.0 {
            return Err(Error::InvalidParameter(format!("only epsilon = 1 is supported, got {}", self.epsilon)));
        }
        if self.snapshot_every == 0 {
            return Err(Error::InvalidParameter("snapshot_every must be at least 1".into()));
        }
        Ok(())
    }

    /// `n_steps · dt`.
    pub fn final_time(&self) -> f64 {
        self.n_steps as f64 * self.dt
    }
}

fn check_grid(u: &GridFunction, kernel: &PeriodicKernel) -> Result<()> {
    if u.n_points() != kernel.n_points() {
        return Err(Error::GridMismatch { expected: kernel.n_points(), found: u.n_points() });
    }
    Ok(())
}

/// `h Σ_r samples[(j − r) mod N] u_r` for one `j`.
#[inline]
fn quadrature_at(j: usize, samples: &[f64], u: &[Complex64], h: f64) -> Complex64 {
    let n = samples.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..=j {
        acc += samples[j - r] * u[r];
    }
    for r in j + 1..n {
        acc += samples[j + n - r] * u[r];
    }
    acc * h
}

fn direct_quadrature(samples: &[f64], u: &[Complex64], h: f64, out: &mut [Complex64]) {
    if u.len() >= PARALLEL_MIN_POINTS {
        out.par_iter_mut().enumerate().for_each(|(j, o)| *o = quadrature_at(j, samples, u, h));
    } else {
        for (j, o) in out.iter_mut().enumerate() {
            *o = quadrature_at(j, samples, u, h);
        }
    }
}

/// Right-hand side of the semidiscrete system.
pub fn semidiscrete_rhs(u: &GridFunction, kernel: &PeriodicKernel) -> Result<GridFunction> {
    semidiscrete_rhs_with(u, kernel, RhsPath::Direct)
}

pub fn semidiscrete_rhs_with(u: &GridFunction, kernel: &PeriodicKernel, path: RhsPath) -> Result<GridFunction> {
    check_grid(u, kernel)?;
    let j0 = kernel.grid_mass();
    match path {
        RhsPath::Direct => {
            let n = u.n_points();
            let h = u.spacing();
            let samples = kernel.samples();
            let vals = u.values();
            let mut out = vec![Complex64::new(0.0, 0.0); n];
            direct_quadrature(samples, vals, h, &mut out);
            // h Σ_r J_{j−r}(U_r − U_j), with h Σ_r J_{j−r} summed explicitly
            let row_mass = h * samples.iter().sum::<f64>();
            for (o, v) in out.iter_mut().zip(vals) {
                *o -= row_mass * v;
            }
            GridFunction::new(out)
        }
        RhsPath::Convolution => {
            let mut s = spectral::dft(u);
            let dft = kernel.dft_by_slot();
            let n = u.n_points();
            s.scale_by(|k| Complex64::new(dft[spectral::slot(k, n)] - j0, 0.0));
            Ok(spectral::idft(&s))
        }
    }
}

/// `g(h, Δt, k) = 1 − Δt (J̃_0 − J̃_k)`.
pub fn amplification_factor(kernel: &PeriodicKernel, dt: f64, k: i64) -> Result<f64> {
    Ok(1.0 - dt * kernel.dft_gap(k)?)
}

/// Advances grid states by forward Euler, reusing FFT plans and kernel data.
pub struct EulerStepper {
    kernel: PeriodicKernel,
    dt: f64,
    path: RhsPath,
    /// `1 − Δt J̃_0`.
    diagonal: f64,
    /// Convolution path: `g_k / N` in storage order.
    multipliers: Vec<f64>,
    forward: Option<Arc<dyn Fft<f64>>>,
    inverse: Option<Arc<dyn Fft<f64>>>,
    scratch: Vec<Complex64>,
    fft_scratch: Vec<Complex64>,
}

impl std::fmt::Debug for EulerStepper {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EulerStepper")
            .field("kernel", &self.kernel.tag())
            .field("n_points", &self.kernel.n_points())
            .field("dt", &self.dt)
            .field("path", &self.path)
            .finish()
    }
}

impl EulerStepper {
    pub fn new(kernel: &PeriodicKernel, dt: f64, path: RhsPath) -> Result<Self> {
        if !(dt.is_finite() && dt >= 0.0) {
            return Err(Error::InvalidParameter(format!("time step must be finite and nonnegative, got {dt}")));
        }
        let n = kernel.n_points();
        let j0 = kernel.grid_mass();
        let (multipliers, forward, inverse, fft_scratch) = match path {
            RhsPath::Direct => (Vec::new(), None, None, Vec::new()),
            RhsPath::Convolution => {
                let mut planner = FftPlanner::new();
                let fwd = planner.plan_fft_forward(n);
                let inv = planner.plan_fft_inverse(n);
                let len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
                let m = kernel.dft_by_slot().iter().map(|&jk| (1.0 - dt * (j0 - jk)) / n as f64).collect();
                (m, Some(fwd), Some(inv), vec![Complex64::new(0.0, 0.0); len])
            }
        };
        Ok(EulerStepper {
            kernel: kernel.clone(),
            dt,
            path,
            diagonal: 1.0 - dt * j0,
            multipliers,
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); n],
            fft_scratch,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn path(&self) -> RhsPath {
        self.path
    }

    pub fn n_points(&self) -> usize {
        self.kernel.n_points()
    }

    /// One step in place.
    pub fn step(&mut self, u: &mut [Complex64]) -> Result<()> {
        let n = self.kernel.n_points();
        if u.len() != n {
            return Err(Error::GridMismatch { expected: n, found: u.len() });
        }
        match self.path {
            RhsPath::Direct => {
                let h = 1.0 / n as f64;
                direct_quadrature(self.kernel.samples(), u, h, &mut self.scratch);
                for (v, q) in u.iter_mut().zip(&self.scratch) {
                    *v = *v * self.diagonal + self.dt * q;
                }
            }
            RhsPath::Convolution => {
                let fwd = self.forward.as_ref().expect("plan");
                let inv = self.inverse.as_ref().expect("plan");
                fwd.process_with_scratch(u, &mut self.fft_scratch);
                for (v, m) in u.iter_mut().zip(&self.multipliers) {
                    *v *= m;
                }
                inv.process_with_scratch(u, &mut self.fft_scratch);
            }
        }
        Ok(())
    }
}

/// `U + Δt · semidiscrete_rhs(U)`, written in the scheme's split form.
pub fn euler_step(u: &GridFunction, kernel: &PeriodicKernel, dt: f64) -> Result<GridFunction> {
    check_grid(u, kernel)?;
    let mut stepper = EulerStepper::new(kernel, dt, RhsPath::Direct)?;
    let mut values = u.values().to_vec();
    stepper.step(&mut values)?;
    GridFunction::new(values)
}

/// `Ũ_k ↦ g(h, Δt, k)^n Ũ_k`, with the power taken on the scalar.
pub fn spectral_evolve(spectrum: &SpectralField, kernel: &PeriodicKernel, dt: f64, n: u64) -> Result<SpectralField> {
    if spectrum.n_points() != kernel.n_points() {
        return Err(Error::GridMismatch { expected: kernel.n_points(), found: spectrum.n_points() });
    }
    let np = kernel.n_points();
    let dft = kernel.dft_by_slot();
    let j0 = kernel.grid_mass();
    let mut out = spectrum.clone();
    out.scale_by(|k| {
        let g = 1.0 - dt * (j0 - dft[spectral::slot(k, np)]);
        Complex64::new(scalar_power(g, n), 0.0)
    });
    Ok(out)
}

fn scalar_power(g: f64, n: u64) -> f64 {
    match i32::try_from(n) {
        Ok(m) => g.powi(m),
        Err(_) => g.powf(n as f64),
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub config: SchemeConfig,
    pub kernel_tag: String,
    /// `(step, state)` in increasing step order.
    pub snapshots: Vec<(usize, GridFunction)>,
    /// `‖Uⁿ‖_h` for every step taken, starting at `n = 0`.
    pub norm_history: Vec<f64>,
    pub spectral_snapshots: Option<Vec<(usize, SpectralField)>>,
    /// First step whose state was non-finite; stepping stops there.
    pub blowup_step: Option<usize>,
}

impl EvolutionResult {
    pub fn snapshot(&self, step: usize) -> Option<&GridFunction> {
        self.snapshots.binary_search_by_key(&step, |(s, _)| *s).ok().map(|i| &self.snapshots[i].1)
    }

    pub fn final_state(&self) -> &GridFunction {
        &self.snapshots.last().expect("the initial state is always kept").1
    }

    pub fn final_step(&self) -> usize {
        self.snapshots.last().expect("the initial state is always kept").0
    }

    /// `step · Δt`.
    pub fn time_of(&self, step: usize) -> f64 {
        step as f64 * self.config.dt
    }

    pub fn blew_up(&self) -> bool {
        self.blowup_step.is_some()
    }
}

/// Iterates the Euler scheme from `initial`.
pub fn run(initial: &GridFunction, kernel: &PeriodicKernel, config: &SchemeConfig) -> Result<EvolutionResult> {
    config.validate()?;
    check_grid(initial, kernel)?;
    if config.n_points != initial.n_points() {
        return Err(Error::GridMismatch { expected: config.n_points, found: initial.n_points() });
    }
    let mut stepper = EulerStepper::new(kernel, config.dt, config.rhs)?;
    let mut state = initial.clone();
    let mut snapshots = vec![(0, state.clone())];
    let mut spectra = config.record_spectra.then(|| vec![(0, spectral::dft(&state))]);
    let mut norm_history = Vec::with_capacity(config.n_steps + 1);
    norm_history.push(discrete_norm(&state));
    let mut blowup_step = None;

    for step in 1..=config.n_steps {
        stepper.step(state.values_mut())?;
        let norm = discrete_norm(&state);
        norm_history.push(norm);
        let finite = norm.is_finite() && state.is_finite();
        if !finite && !config.allow_blowup {
            return Err(Error::NonFinite { step });
        }
        if !finite || step % config.snapshot_every == 0 || step == config.n_steps {
            snapshots.push((step, state.clone()));
            if let Some(s) = spectra.as_mut() {
                s.push((step, spectral::dft(&state)));
            }
        }
        if !finite {
            blowup_step = Some(step);
            break;
        }
    }

    Ok(EvolutionResult {
        config: config.clone(),
        kernel_tag: kernel.tag().to_string(),
        snapshots,
        norm_history,
        spectral_snapshots: spectra,
        blowup_step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{periodize, InfiniteKernel};
    use crate::spectral::{dft, idft, pure_mode};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn gaussian(n: usize) -> PeriodicKernel {
        periodize(&InfiniteKernel::gaussian(10.0).unwrap(), n, 1e-14).unwrap()
    }

    fn random_field(n: usize, seed: u64) -> GridFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GridFunction::new((0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
            .unwrap()
    }

    /// `h Σ_r J(x_j − x_r)(U_r − U_j)` written out with no shared code.
    fn naive_rhs(u: &GridFunction, pk: &PeriodicKernel) -> Vec<Complex64> {
        let n = u.n_points();
        let v = u.values();
        (0..n)
            .map(|j| (0..n).map(|r| pk.samples()[(j + n - r) % n] * (v[r] - v[j])).sum::<Complex64>() / n as f64)
            .collect()
    }

    #[test]
    fn constant_has_zero_rhs() {
        let pk = gaussian(32);
        let u = GridFunction::from_real_fn(32, |_| 3.5).unwrap();
        for path in [RhsPath::Direct, RhsPath::Convolution] {
            assert!(semidiscrete_rhs_with(&u, &pk, path).unwrap().max_abs() < 1e-13);
        }
    }

    #[test]
    fn modes_are_eigenfunctions_of_the_rhs() {
        let pk = periodize(&InfiniteKernel::laplace(5.0).unwrap(), 32, 1e-14).unwrap();
        for k in spectral::wavenumbers(32) {
            let u = pure_mode(32, k).unwrap();
            let rhs = semidiscrete_rhs(&u, &pk).unwrap();
            let lambda = -pk.dft_gap(k).unwrap();
            for (a, b) in rhs.values().iter().zip(u.values()) {
                assert!((a - lambda * b).norm() < 1e-12, "k={k}");
            }
        }
    }

    #[test]
    fn rhs_paths_agree_with_naive_sum() {
        let pk = gaussian(64);
        let u = random_field(64, 7);
        let naive = naive_rhs(&u, &pk);
        for path in [RhsPath::Direct, RhsPath::Convolution] {
            let rhs = semidiscrete_rhs_with(&u, &pk, path).unwrap();
            for (a, b) in rhs.values().iter().zip(&naive) {
                assert!((a - b).norm() < 1e-12, "{path:?}");
            }
        }
        assert!(matches!(semidiscrete_rhs(&random_field(32, 1), &pk), Err(Error::GridMismatch { .. })));
    }

    #[test]
    fn euler_step_basics() {
        let pk = gaussian(16);
        let one = GridFunction::from_real_fn(16, |_| 1.0).unwrap();
        let stepped = euler_step(&one, &pk, 0.3).unwrap();
        assert!(stepped.values().iter().all(|v| (v - 1.0).norm() < 1e-15));
        let u = random_field(16, 3);
        assert_eq!(euler_step(&u, &pk, 0.0).unwrap(), u);
        let rhs = semidiscrete_rhs(&u, &pk).unwrap();
        let explicit = u.combine(Complex64::new(1.0, 0.0), &rhs, Complex64::new(0.25, 0.0)).unwrap();
        let stepped = euler_step(&u, &pk, 0.25).unwrap();
        assert!(discrete_norm(&stepped.sub(&explicit).unwrap()) < 1e-14);
    }

    #[test]
    fn single_mode_step_matches_amplification_factor() {
        for (n, kernel) in [8, 16, 64, 256].into_iter().flat_map(|n| {
            [InfiniteKernel::gaussian(10.0).unwrap(), InfiniteKernel::laplace(5.0).unwrap()].map(|k| (n, k))
        }) {
            let pk = periodize(&kernel, n, 1e-14).unwrap();
            for k in [0, 1, (n / 4) as i64, (n / 2) as i64, -(n as i64 / 2) + 1] {
                let g = amplification_factor(&pk, 0.7, k).unwrap();
                let u = pure_mode(n, k).unwrap();
                let stepped = euler_step(&u, &pk, 0.7).unwrap();
                for (a, b) in stepped.values().iter().zip(u.values()) {
                    assert!((a - g * b).norm() < 1e-13, "n={n} k={k}");
                }
            }
        }
        let pk = gaussian(8);
        assert_eq!(amplification_factor(&pk, 123.0, 0).unwrap(), 1.0);
        assert!(matches!(amplification_factor(&pk, 1.0, 5), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn spectral_evolve_matches_stepping() {
        let pk = gaussian(32);
        let u = random_field(32, 11);
        let s = dft(&u);
        assert_eq!(spectral_evolve(&s, &pk, 0.4, 0).unwrap(), s);
        let once = idft(&spectral_evolve(&s, &pk, 0.4, 1).unwrap());
        let stepped = euler_step(&u, &pk, 0.4).unwrap();
        assert!(discrete_norm(&once.sub(&stepped).unwrap()) < 1e-12);
        let many = spectral_evolve(&s, &pk, 0.4, 1000).unwrap();
        assert!((many.mode(0).unwrap() - s.mode(0).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn stepper_paths_agree() {
        let pk = periodize(&InfiniteKernel::laplace(10.0).unwrap(), 64, 1e-14).unwrap();
        let u0 = random_field(64, 5);
        let mut a = u0.values().to_vec();
        let mut b = a.clone();
        let mut direct = EulerStepper::new(&pk, 0.5, RhsPath::Direct).unwrap();
        let mut conv = EulerStepper::new(&pk, 0.5, RhsPath::Convolution).unwrap();
        for _ in 0..100 {
            direct.step(&mut a).unwrap();
            conv.step(&mut b).unwrap();
        }
        let diff = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12, "{diff}");
    }

    #[test]
    fn run_with_zero_steps_keeps_only_the_initial_state() {
        let pk = gaussian(16);
        let u = random_field(16, 2);
        let res = run(&u, &pk, &SchemeConfig::new(16, 0.1, 0).unwrap()).unwrap();
        assert_eq!(res.snapshots.len(), 1);
        assert_eq!(res.snapshots[0], (0, u.clone()));
        assert_eq!(res.norm_history, vec![discrete_norm(&u)]);
    }

    #[test]
    fn run_records_requested_snapshots() {
        let pk = gaussian(16);
        let u = random_field(16, 2);
        let cfg = SchemeConfig::new(16, 0.1, 10).unwrap().snapshot_every(4).record_spectra(true);
        let res = run(&u, &pk, &cfg).unwrap();
        let steps: Vec<usize> = res.snapshots.iter().map(|(s, _)| *s).collect();
        assert_eq!(steps, vec![0, 4, 8, 10]);
        assert_eq!(res.norm_history.len(), 11);
        assert_eq!(res.spectral_snapshots.as_ref().unwrap().len(), 4);
        for (s, g) in &res.snapshots {
            assert_eq!(res.norm_history[*s], discrete_norm(g));
        }
        assert!(res.snapshot(5).is_none());
        assert!((res.time_of(10) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn smooth_data_norm_is_nonincreasing_below_threshold() {
        let pk = gaussian(64);
        let u = GridFunction::from_real_fn(64, |x| (-(x - 0.5) * (x - 0.5)).exp() / PI.sqrt()).unwrap();
        let res = run(&u, &pk, &SchemeConfig::new(64, 0.5, 200).unwrap()).unwrap();
        for w in res.norm_history.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn blowup_policy() {
        let pk = gaussian(16);
        let worst = pure_mode(16, 8).unwrap();
        let cfg = SchemeConfig::new(16, 2.5, 2000).unwrap();
        assert!(matches!(run(&worst, &pk, &cfg), Err(Error::NonFinite { .. })));
        let res = run(&worst, &pk, &cfg.clone().allow_blowup(true)).unwrap();
        let step = res.blowup_step.expect("blows up");
        assert_eq!(res.final_step(), step);
        assert!(res.norm_history[10] > res.norm_history[0]);
    }

    #[test]
    fn config_validation() {
        assert!(matches!(SchemeConfig::new(15, 0.1, 1), Err(Error::OddGridSize(15))));
        assert!(SchemeConfig::new(16, -0.1, 1).is_err());
        let mut cfg = SchemeConfig::new(16, 0.1, 1).unwrap();
        cfg.epsilon = 0.5;
        assert!(cfg.validate().is_err());
    }
}
