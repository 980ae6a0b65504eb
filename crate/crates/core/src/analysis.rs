//! Stability thresholds, error measurement, convergence sweeps and rate fits.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{semidiscrete_exact, ExactSolution, InitialData, InitialFamily};
use crate::kernels::{periodize, InfiniteKernel, PeriodicKernel};
use crate::scheme::{self, EvolutionResult, RhsPath, SchemeConfig};
use crate::spectral::{self, discrete_norm, GridFunction};

/// Relative slack allowed when checking `‖Uⁿ⁺¹‖_h ≤ ‖Uⁿ‖_h`.
pub const MONOTONE_SLACK: f64 = 1e-12;
/// Slack on `max|g| ≤ 1`.
pub const AMPLIFICATION_SLACK: f64 = 1e-12;

/// `2 / C` with `C = 2`, valid for every admissible kernel.
pub const DT_STAR_CONSERVATIVE: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityProbe {
    pub dt: f64,
    pub max_abs_g: f64,
    /// Wavenumber attaining `max|g|`.
    pub worst_mode: i64,
    pub within_bound: bool,
    /// Result of stepping worst-mode data, when probed.
    pub empirical_monotone: Option<bool>,
    pub first_violation_step: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub kernel: String,
    pub n_points: usize,
    pub max_gap: f64,
    pub max_gap_mode: i64,
    /// `2 / max_k (J̃_0 − J̃_k)`.
    pub dt_star_sharp: f64,
    pub dt_star_conservative: f64,
    /// False when the kernel fails any hypothesis check; the thresholds are then unsupported.
    pub assumptions_hold: bool,
    pub probes: Vec<StabilityProbe>,
}

pub fn critical_timestep(kernel: &PeriodicKernel) -> StabilityReport {
    let (k, gap) = kernel.max_gap();
    StabilityReport {
        kernel: kernel.tag().to_string(),
        n_points: kernel.n_points(),
        max_gap: gap,
        max_gap_mode: k,
        dt_star_sharp: if gap > 0.0 { 2.0 / gap } else { f64::INFINITY },
        dt_star_conservative: DT_STAR_CONSERVATIVE,
        assumptions_hold: kernel.assumptions().overall,
        probes: Vec::new(),
    }
}

/// `(k, max_k |g(h, Δt, k)|)`, ties resolving to the smallest `|k|` scanned first.
pub fn max_abs_amplification(kernel: &PeriodicKernel, dt: f64) -> (i64, f64) {
    let mut best = (0, 1.0);
    for k in spectral::wavenumbers(kernel.n_points()) {
        let g = (1.0 - dt * kernel.dft_gap(k).expect("in range")).abs();
        if g > best.1 {
            best = (k, g);
        }
    }
    best
}

/// `max_{k≠0} |g(h, Δt, k)|`; the mean mode always has `g = 1`.
pub fn max_abs_amplification_nonzero(kernel: &PeriodicKernel, dt: f64) -> f64 {
    spectral::wavenumbers(kernel.n_points())
        .filter(|&k| k != 0)
        .map(|k| (1.0 - dt * kernel.dft_gap(k).expect("in range")).abs())
        .fold(0.0, f64::max)
}

/// Real data made of the mode with the largest `|g|` at this `dt`.
pub fn worst_mode_data(kernel: &PeriodicKernel, dt: f64) -> Result<GridFunction> {
    let n = kernel.n_points();
    let k = match max_abs_amplification(kernel, dt) {
        (0, _) => kernel.max_gap().0,
        (k, _) => k,
    };
    GridFunction::from_real_fn(n, |x| (2.0 * PI * k as f64 * x).cos())
}

impl StabilityReport {
    /// Adds a probe at `dt`; with `steps > 0` also steps worst-mode data and checks the norm.
    pub fn probe(&mut self, kernel: &PeriodicKernel, dt: f64, steps: usize) -> Result<&StabilityProbe> {
        let (worst_mode, max_abs_g) = max_abs_amplification(kernel, dt);
        let (empirical_monotone, first_violation_step) = if steps > 0 {
            let data = worst_mode_data(kernel, dt)?;
            let m = norm_monotonicity_probe(kernel, &data, dt, steps)?;
            (Some(m.monotone), m.first_violation)
        } else {
            (None, None)
        };
        self.probes.push(StabilityProbe {
            dt,
            max_abs_g,
            worst_mode,
            within_bound: max_abs_g <= 1.0 + AMPLIFICATION_SLACK,
            empirical_monotone,
            first_violation_step,
        });
        Ok(self.probes.last().unwrap())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityProbe {
    pub monotone: bool,
    /// First `n` with `‖Uⁿ‖_h > ‖Uⁿ⁻¹‖_h (1 + slack)`.
    pub first_violation: Option<usize>,
    /// First `n` with `‖Uⁿ‖_h > ‖U⁰‖_h (1 + slack)`.
    pub first_exceeds_initial: Option<usize>,
    pub norm_history: Vec<f64>,
}

/// Steps the scheme and checks that the discrete norm never grows.
pub fn norm_monotonicity_probe(
    kernel: &PeriodicKernel,
    initial: &GridFunction,
    dt: f64,
    n_steps: usize,
) -> Result<MonotonicityProbe> {
    let cfg = SchemeConfig::new(initial.n_points(), dt, n_steps)?.snapshot_every(n_steps.max(1)).allow_blowup(true);
    let res = scheme::run(initial, kernel, &cfg)?;
    let hist = res.norm_history;
    let grows = |prev: f64, next: f64| !next.is_finite() || next > prev * (1.0 + MONOTONE_SLACK);
    let first_violation = hist.windows(2).position(|w| grows(w[0], w[1])).map(|i| i + 1);
    let first_exceeds_initial = hist.iter().skip(1).position(|&v| grows(hist[0], v)).map(|i| i + 1);
    Ok(MonotonicityProbe {
        monotone: first_violation.is_none(),
        first_violation,
        first_exceeds_initial,
        norm_history: hist,
    })
}

/// `‖u(·, n Δt) − Uⁿ‖_h`.
pub fn error_at(exact: &ExactSolution, numeric: &EvolutionResult, step: usize) -> Result<f64> {
    let u = numeric.snapshot(step).ok_or(Error::MissingSnapshot(step))?;
    let reference = exact.exact_at(numeric.time_of(step), u.n_points())?;
    Ok(discrete_norm(&reference.sub(u)?))
}

/// The error split through the semidiscrete solution `V(t)` started from the same grid data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorDecomposition {
    pub total: f64,
    /// `‖u(t) − V(t)‖_h`.
    pub spatial: f64,
    /// `‖V(t) − Uⁿ‖_h`.
    pub temporal: f64,
}

pub fn error_decomposition(
    exact: &ExactSolution,
    kernel: &PeriodicKernel,
    numeric: &EvolutionResult,
    step: usize,
) -> Result<ErrorDecomposition> {
    let u = numeric.snapshot(step).ok_or(Error::MissingSnapshot(step))?;
    let u0 = numeric.snapshot(0).ok_or(Error::MissingSnapshot(0))?;
    let t = numeric.time_of(step);
    let reference = exact.exact_at(t, u.n_points())?;
    let semi = spectral::idft(&semidiscrete_exact(&spectral::dft(u0), kernel, t)?);
    Ok(ErrorDecomposition {
        total: discrete_norm(&reference.sub(u)?),
        spatial: discrete_norm(&reference.sub(&semi)?),
        temporal: discrete_norm(&semi.sub(u)?),
    })
}

/// `‖u(t) − V(t)‖_h` with `V` the semidiscrete solution from the sampled initial data.
pub fn semidiscrete_gap(exact: &ExactSolution, kernel: &PeriodicKernel, t: f64) -> Result<f64> {
    let n = kernel.n_points();
    let u0 = exact.initial().sample(n)?;
    let semi = spectral::idft(&semidiscrete_exact(&spectral::dft(&u0), kernel, t)?);
    Ok(discrete_norm(&exact.exact_at(t, n)?.sub(&semi)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub n_points: usize,
    pub h: f64,
    pub dt: f64,
    pub n_steps: usize,
    /// Achieved time `n_steps · dt`.
    pub t_final: f64,
    pub error: f64,
    pub initial_family: String,
    pub kernel_tag: String,
    pub blowup: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub tail_tol: f64,
    /// Reference series length; `None` means `max(256, 8N)`.
    pub max_mode: Option<usize>,
    /// Tolerance on the initial data's coefficient tail.
    pub coefficient_tol: f64,
    pub rhs: RhsPath,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { tail_tol: 1e-14, max_mode: None, coefficient_tol: 1e-2, rhs: RhsPath::Direct }
    }
}

/// Runs every `(N, Δt)` cell and measures the error at the achieved final time.
/// Records come back sorted by `(N, Δt)`.
pub fn convergence_sweep(
    kernel: &InfiniteKernel,
    initial: &InitialFamily,
    t_final: f64,
    grids: &[usize],
    dts: &[f64],
    options: &SweepOptions,
) -> Result<Vec<ConvergenceRecord>> {
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(Error::NegativeTime(t_final));
    }
    if grids.is_empty() || dts.is_empty() {
        return Err(Error::InsufficientData { needed: 1, found: 0 });
    }
    for &dt in dts {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter(format!("sweep time steps must be positive, got {dt}")));
        }
    }
    let references = grids
        .par_iter()
        .map(|&n| {
            let pk = periodize(kernel, n, options.tail_tol)?;
            let m = options.max_mode.unwrap_or_else(|| (8 * n).max(256));
            let data = InitialData::new(initial.clone(), m, options.coefficient_tol)?;
            let exact = ExactSolution::new(data, &pk)?;
            let u0 = initial.sample(n)?;
            Ok((n, pk, exact, u0))
        })
        .collect::<Result<Vec<_>>>()?;

    let cells: Vec<(usize, f64)> =
        references.iter().enumerate().flat_map(|(i, _)| dts.iter().map(move |&dt| (i, dt))).collect();
    let mut records = cells
        .par_iter()
        .map(|&(i, dt)| {
            let (n, pk, exact, u0) = &references[i];
            let n_steps = (t_final / dt).round() as usize;
            let cfg =
                SchemeConfig::new(*n, dt, n_steps)?.snapshot_every(n_steps.max(1)).allow_blowup(true).rhs(options.rhs);
            let res = scheme::run(u0, pk, &cfg)?;
            let blowup = res.blew_up();
            let error = if blowup { f64::INFINITY } else { error_at(exact, &res, n_steps)? };
            Ok(ConvergenceRecord {
                n_points: *n,
                h: 1.0 / *n as f64,
                dt,
                n_steps,
                t_final: res.time_of(n_steps),
                error,
                initial_family: initial.tag(),
                kernel_tag: pk.tag().to_string(),
                blowup,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    records.sort_by(|a, b| a.n_points.cmp(&b.n_points).then(a.dt.total_cmp(&b.dt)));
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    H,
    Dt,
}

impl Axis {
    fn of(self, r: &ConvergenceRecord) -> f64 {
        match self {
            Axis::H => r.h,
            Axis::Dt => r.dt,
        }
    }

    fn other(self, r: &ConvergenceRecord) -> f64 {
        match self {
            Axis::H => r.dt,
            Axis::Dt => r.h,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    pub axis: Axis,
    /// Fit over the finest half of the points (at least three).
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub full_range: LineFit,
    /// The finest points show essentially no decrease: another error source dominates.
    pub floor_limited: bool,
    /// `(axis value, error)` for every record used, coarse to fine.
    pub points: Vec<(f64, f64)>,
}

/// Least-squares line through `(x, y)`.
pub fn least_squares(x: &[f64], y: &[f64]) -> LineFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) } else { 1.0 };
    LineFit { slope, intercept, r2, n: x.len() }
}

/// Fits `log(error) = slope · log(axis) + intercept` over the records passing `filter`.
pub fn fit_rate(
    records: &[ConvergenceRecord],
    axis: Axis,
    filter: impl Fn(&ConvergenceRecord) -> bool,
) -> Result<RateFit> {
    let mut used: Vec<&ConvergenceRecord> = records.iter().filter(|r| filter(r) && !r.blowup).collect();
    if used.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, found: used.len() });
    }
    let held = axis.other(used[0]);
    if used.iter().any(|r| (axis.other(r) - held).abs() > 1e-12 * held.abs()) {
        return Err(Error::DegenerateVariation(match axis {
            Axis::H => "dt varies across an h-axis fit",
            Axis::Dt => "h varies across a dt-axis fit",
        }));
    }
    used.sort_by(|a, b| axis.of(b).total_cmp(&axis.of(a)));
    let mut distinct: Vec<f64> = used.iter().map(|r| axis.of(r)).collect();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::DegenerateVariation("fewer than three distinct values on the fitted axis"));
    }
    let points: Vec<(f64, f64)> = used.iter().map(|r| (axis.of(r), r.error)).collect();
    let logs = |pts: &[(f64, f64)]| -> (Vec<f64>, Vec<f64>) {
        pts.iter().map(|&(x, e)| (x.ln(), e.max(f64::MIN_POSITIVE).ln())).unzip()
    };
    let (lx, ly) = logs(&points);
    let full_range = least_squares(&lx, &ly);
    let take = points.len().div_ceil(2).max(3);
    let fine = &points[points.len() - take..];
    let (fx, fy) = logs(fine);
    let fit = least_squares(&fx, &fy);
    let max_fine = fine.iter().map(|p| p.1).fold(0.0, f64::max);
    let floor_limited = fit.slope.abs() < 0.1 || max_fine <= 1e-13;
    Ok(RateFit { axis, slope: fit.slope, intercept: fit.intercept, r2: fit.r2, full_range, floor_limited, points })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AliasingKind {
    Algebraic,
    SuperPolynomial,
    BandLimited,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AliasingEstimate {
    /// Half the fitted slope of `log A(N)` against `log h`; infinite unless algebraic.
    pub alpha: f64,
    pub kind: AliasingKind,
    /// `(N, A(N), shells used)`.
    pub points: Vec<(usize, f64, usize)>,
}

const MAX_ALIASING_SHELLS: usize = 100_000;

fn coefficient_for(data: &InitialData, k: i64) -> Result<Complex64> {
    if let Some(c) = data.family().coefficient(k) {
        return Ok(c);
    }
    data.coefficients()
        .get(k)
        .ok_or_else(|| Error::TailNotResolved(format!("coefficient {k} beyond the resolved range {}", data.max_mode())))
}

/// `A(N) = Σ_{|k|≤N/2} |Σ_{s≠0} û_{k+sN}|²`, adding shells `±s` until the newest changes
/// the total by less than `shell_tol` relative.
pub fn aliasing_sum(data: &InitialData, n: usize, shell_tol: f64) -> Result<(f64, usize)> {
    spectral::check_even(n)?;
    let half = (n / 2) as i64;
    let ni = n as i64;
    let mut partial = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut total = 0.0;
    for s in 1..=MAX_ALIASING_SHELLS as i64 {
        for (i, p) in partial.iter_mut().enumerate() {
            let k = i as i64 - half;
            *p += coefficient_for(data, k + s * ni)? + coefficient_for(data, k - s * ni)?;
        }
        let next: f64 = partial.iter().map(|p| p.norm_sqr()).sum();
        let change = (next - total).abs();
        total = next;
        if change <= shell_tol * total {
            return Ok((total, s as usize));
        }
    }
    Err(Error::TailNotResolved(format!("aliasing sum for N={n} did not settle within {MAX_ALIASING_SHELLS} shells")))
}

pub fn aliasing_exponent(data: &InitialData, grids: &[usize]) -> Result<AliasingEstimate> {
    aliasing_exponent_with(data, grids, 1e-3)
}

pub fn aliasing_exponent_with(data: &InitialData, grids: &[usize], shell_tol: f64) -> Result<AliasingEstimate> {
    let mut grids = grids.to_vec();
    grids.sort_unstable();
    grids.dedup();
    if grids.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, found: grids.len() });
    }
    let points =
        grids.iter().map(|&n| aliasing_sum(data, n, shell_tol).map(|(a, s)| (n, a, s))).collect::<Result<Vec<_>>>()?;
    let band_limited_family = matches!(data.family(), InitialFamily::SingleMode { .. } | InitialFamily::GridSamples(_));
    if points.iter().any(|p| p.1 == 0.0) {
        let kind = if band_limited_family { AliasingKind::BandLimited } else { AliasingKind::SuperPolynomial };
        return Ok(AliasingEstimate { alpha: f64::INFINITY, kind, points });
    }
    let lx: Vec<f64> = points.iter().map(|p| (1.0 / p.0 as f64).ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let local: Vec<f64> = lx.windows(2).zip(ly.windows(2)).map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0])).collect();
    let accelerating = local.len() >= 2 && local[local.len() - 1] > 1.5 * local[0] && local[0] > 0.0;
    if accelerating {
        return Ok(AliasingEstimate { alpha: f64::INFINITY, kind: AliasingKind::SuperPolynomial, points });
    }
    let fit = least_squares(&lx, &ly);
    Ok(AliasingEstimate { alpha: fit.slope / 2.0, kind: AliasingKind::Algebraic, points })
}
