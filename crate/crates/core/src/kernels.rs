//! Interaction kernels: infinite-line kernels `J∞`, their 1-periodic lattice sums
//! `J(x) = Σ_r J∞(x − r)`, Fourier data, and the structural hypotheses the
//! stability theory relies on.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature;
use crate::spectral::{self, check_even, wavenumber_range, GridFunction};

/// Default absolute tolerance for the hypothesis checks (relative to `max(1, max J)`
/// for sample-based checks).
pub const ASSUMPTION_TOL: f64 = 1e-10;

/// Largest lattice-sum radius attempted before a kernel is declared non-decaying.
pub const MAX_RADIUS: usize = 100_000;

const CUSTOM_TRANSFORM_TOL: f64 = 1e-12;

pub type Sampler = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied even kernel with a declared exponential decay rate `ρ`,
/// `|J∞(x)| ≤ K e^{-ρ|x|}`.
#[derive(Clone)]
pub struct CustomKernel {
    name: String,
    sampler: Sampler,
    decay_rate: f64,
    transform_tol: f64,
}

impl CustomKernel {
    pub fn new(name: impl Into<String>, decay_rate: f64, sampler: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        CustomKernel { name: name.into(), sampler: Arc::new(sampler), decay_rate, transform_tol: CUSTOM_TRANSFORM_TOL }
    }

    pub fn with_transform_tol(mut self, tol: f64) -> Self {
        self.transform_tol = tol;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn decay_rate(&self) -> f64 {
        self.decay_rate
    }
}

impl fmt::Debug for CustomKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomKernel")
            .field("name", &self.name)
            .field("decay_rate", &self.decay_rate)
            .finish_non_exhaustive()
    }
}

/// A kernel on the real line.
///
/// * `Gaussian { c }`: `J∞(x) = √(c/π) e^{-c x²}`
/// * `Laplace { c }`: `J∞(x) = (c/2) e^{-c|x|}`
///
/// Both built-in families have unit mass.
#[derive(Debug, Clone)]
pub enum InfiniteKernel {
    Gaussian { c: f64 },
    Laplace { c: f64 },
    Custom(CustomKernel),
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

impl InfiniteKernel {
    pub fn gaussian(c: f64) -> Result<Self> {
        positive("c", c)?;
        Ok(InfiniteKernel::Gaussian { c })
    }

    pub fn laplace(c: f64) -> Result<Self> {
        positive("c", c)?;
        Ok(InfiniteKernel::Laplace { c })
    }

    pub fn custom(kernel: CustomKernel) -> Result<Self> {
        positive("decay_rate", kernel.decay_rate)?;
        Ok(InfiniteKernel::Custom(kernel))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            InfiniteKernel::Gaussian { c } | InfiniteKernel::Laplace { c } => positive("c", *c),
            InfiniteKernel::Custom(k) => positive("decay_rate", k.decay_rate),
        }
    }

    pub fn tag(&self) -> String {
        match self {
            InfiniteKernel::Gaussian { c } => format!("gaussian(c={c})"),
            InfiniteKernel::Laplace { c } => format!("laplace(c={c})"),
            InfiniteKernel::Custom(k) => format!("custom({})", k.name),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            InfiniteKernel::Gaussian { c } => (c / PI).sqrt() * (-c * x * x).exp(),
            InfiniteKernel::Laplace { c } => 0.5 * c * (-c * x.abs()).exp(),
            InfiniteKernel::Custom(k) => (k.sampler)(x),
        }
    }

    /// `Ĵ∞(ξ) = ∫ J∞(y) e^{-iξy} dy`.
    pub fn continuous_transform(&self, xi: f64) -> Result<f64> {
        match self {
            InfiniteKernel::Gaussian { c } => Ok((-xi * xi / (4.0 * c)).exp()),
            InfiniteKernel::Laplace { c } => Ok(c * c / (c * c + xi * xi)),
            InfiniteKernel::Custom(k) => custom_transform(k, xi),
        }
    }

    /// `Σ_{|r| ≤ radius} J∞(x − r)`, summed from the outermost shell inwards.
    pub fn periodized_value(&self, x: f64, radius: usize) -> f64 {
        let mut acc = 0.0;
        for r in (1..=radius).rev() {
            let r = r as f64;
            acc += self.value(x - r) + self.value(x + r);
        }
        acc + self.value(x)
    }

    /// Smallest lattice radius `R` such that the omitted part of the lattice sum is
    /// below `tail_tol` at every `x ∈ [0, 1)`.
    pub fn truncation_radius(&self, tail_tol: f64) -> Result<usize> {
        positive("tail_tol", tail_tol)?;
        self.validate()?;
        // For a kernel decreasing in |x|, the terms left out at radius R are bounded by
        // 2 Σ_{m ≥ R} J∞(m) ≤ 2 (J∞(R) + ∫_R^∞ J∞).
        let bound = |r: f64| -> f64 {
            match self {
                InfiniteKernel::Gaussian { c } => {
                    let peak = (c / PI).sqrt() * (-c * r * r).exp();
                    2.0 * (peak + peak / (2.0 * c * r))
                }
                InfiniteKernel::Laplace { c } => {
                    let e = (-c * r).exp();
                    2.0 * (0.5 * c * e + 0.5 * e)
                }
                InfiniteKernel::Custom(_) => unreachable!(),
            }
        };
        if let InfiniteKernel::Custom(k) = self {
            let geometric = 1.0 / (1.0 - (-k.decay_rate).exp());
            let probes: Vec<f64> = (0..16).map(|i| i as f64 / 16.0).collect();
            for radius in 1..=MAX_RADIUS {
                let next = (radius + 1) as f64;
                let shell =
                    probes.iter().map(|&x| self.value(x - next).abs() + self.value(x + next).abs()).fold(0.0, f64::max);
                if shell * geometric < tail_tol {
                    return Ok(radius);
                }
            }
            return Err(Error::NonDecayingKernel { tail_tol, max_radius: MAX_RADIUS });
        }
        for radius in 1..=MAX_RADIUS {
            if bound(radius as f64) < tail_tol {
                return Ok(radius);
            }
        }
        Err(Error::NonDecayingKernel { tail_tol, max_radius: MAX_RADIUS })
    }
}

/// Free-function form of [`InfiniteKernel::continuous_transform`].
pub fn continuous_transform(kernel: &InfiniteKernel, frequency: f64) -> Result<f64> {
    kernel.continuous_transform(frequency)
}

fn custom_transform(k: &CustomKernel, xi: f64) -> Result<f64> {
    // Integrate the even kernel over [0, L] where the declared decay makes the rest
    // negligible; L is found by walking out until the kernel itself is tiny.
    let tol = k.transform_tol;
    let mut length = 1.0f64;
    while (k.sampler)(length).abs() / k.decay_rate > 1e-3 * tol {
        length *= 2.0;
        if length > 1e6 {
            return Err(Error::QuadratureFailure { tol, estimate: (k.sampler)(length).abs() });
        }
    }
    let pieces = ((length * xi.abs() / PI).ceil() as usize).max(1).max(length.ceil() as usize);
    let width = length / pieces as f64;
    let per_piece = tol / (2.0 * pieces as f64);
    let mut total = 0.0;
    for i in 0..pieces {
        let a = i as f64 * width;
        total += quadrature::integrate(|y| (k.sampler)(y) * (xi * y).cos(), a, a + width, per_piece, 0.0)?;
    }
    Ok(2.0 * total)
}

/// Pass/fail plus the quantity the check was decided on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub pass: bool,
    pub measure: f64,
}

/// Outcome of checking the kernel hypotheses on a periodic kernel.
///
/// Measures: A1 minimum sample; A2 largest `|J(x_j) − J(x_{N−j})|`; A3 `|Ĵ_0 − 1|`;
/// A4 largest increase `J(x_{j+1}) − J(x_j)` over `[0, 1/2]`; A5 most negative
/// `Ĵ_k` over `|k| ≤ N/2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub a1_nonneg: HypothesisCheck,
    pub a2_symmetric: HypothesisCheck,
    pub a3_unit_mass: HypothesisCheck,
    /// `|h Σ_j J(x_j) − 1|`, the midpoint-rule mass defect. Informational.
    pub a3_grid_mass_residual: f64,
    pub a4_monotone_decreasing_on_half: HypothesisCheck,
    pub a5_nonneg_fourier: HypothesisCheck,
    pub overall: bool,
    pub tolerance: f64,
}

/// A 1-periodic kernel on an `N`-point grid with its Fourier data.
#[derive(Debug, Clone)]
pub struct PeriodicKernel {
    n_points: usize,
    samples: Vec<f64>,
    /// `Ĵ_j` for `j = 0..=M`; `Ĵ_{-j} = Ĵ_j`.
    fourier_coeffs: Vec<f64>,
    /// `J̃_k` in storage order (`k mod N`).
    dft_values: Vec<f64>,
    dft_imag_residual: f64,
    truncation_radius: usize,
    hat_j0: f64,
    source: Option<InfiniteKernel>,
    tag: String,
    assumptions: AssumptionReport,
}

/// Lattice-sums `kernel` onto an `n_points` grid, keeping `Ĵ_j` for `|j| ≤ 4N`.
pub fn periodize(kernel: &InfiniteKernel, n_points: usize, tail_tol: f64) -> Result<PeriodicKernel> {
    periodize_with_modes(kernel, n_points, tail_tol, 4 * n_points)
}

pub fn periodize_with_modes(
    kernel: &InfiniteKernel,
    n_points: usize,
    tail_tol: f64,
    max_mode: usize,
) -> Result<PeriodicKernel> {
    check_even(n_points)?;
    if n_points < 4 {
        return Err(Error::InvalidParameter(format!("need at least 4 grid points, got {n_points}")));
    }
    let radius = kernel.truncation_radius(tail_tol)?;
    let h = 1.0 / n_points as f64;
    let samples: Vec<f64> = (0..n_points).map(|j| kernel.periodized_value(j as f64 * h, radius)).collect();
    let fourier_coeffs =
        (0..=max_mode).map(|j| kernel.continuous_transform(2.0 * PI * j as f64)).collect::<Result<Vec<_>>>()?;
    Ok(PeriodicKernel::assemble(samples, fourier_coeffs, radius, Some(kernel.clone()), kernel.tag()))
}

impl PeriodicKernel {
    /// A kernel given directly by its grid samples. Its Fourier coefficients are
    /// those of the trigonometric interpolant (`Ĵ_j = J̃_j` for `|j| ≤ N/2`, zero beyond).
    pub fn from_samples(tag: impl Into<String>, samples: Vec<f64>) -> Result<Self> {
        check_even(samples.len())?;
        if samples.len() < 4 {
            return Err(Error::InvalidParameter(format!("need at least 4 grid points, got {}", samples.len())));
        }
        let n = samples.len();
        let (dft, _) = real_dft(&samples);
        let coeffs = (0..=n / 2).map(|j| dft[j]).collect();
        Ok(Self::assemble(samples, coeffs, 0, None, tag.into()))
    }

    fn assemble(
        samples: Vec<f64>,
        fourier_coeffs: Vec<f64>,
        truncation_radius: usize,
        source: Option<InfiniteKernel>,
        tag: String,
    ) -> Self {
        let n_points = samples.len();
        let (dft_values, dft_imag_residual) = real_dft(&samples);
        let hat_j0 = fourier_coeffs[0];
        let mut kernel = PeriodicKernel {
            n_points,
            samples,
            fourier_coeffs,
            dft_values,
            dft_imag_residual,
            truncation_radius,
            hat_j0,
            source,
            tag,
            assumptions: AssumptionReport {
                a1_nonneg: HypothesisCheck { pass: false, measure: 0.0 },
                a2_symmetric: HypothesisCheck { pass: false, measure: 0.0 },
                a3_unit_mass: HypothesisCheck { pass: false, measure: 0.0 },
                a3_grid_mass_residual: 0.0,
                a4_monotone_decreasing_on_half: HypothesisCheck { pass: false, measure: 0.0 },
                a5_nonneg_fourier: HypothesisCheck { pass: false, measure: 0.0 },
                overall: false,
                tolerance: ASSUMPTION_TOL,
            },
        };
        kernel.assumptions = check_assumptions_with_tol(&kernel, ASSUMPTION_TOL);
        kernel
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.n_points as f64
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn truncation_radius(&self) -> usize {
        self.truncation_radius
    }

    /// `Ĵ_0`.
    pub fn hat_j0(&self) -> f64 {
        self.hat_j0
    }

    /// `J̃_0 = h Σ_j J(x_j)`.
    pub fn grid_mass(&self) -> f64 {
        self.dft_values[0]
    }

    /// Largest `M` for which `Ĵ_j` is stored.
    pub fn max_fourier_mode(&self) -> usize {
        self.fourier_coeffs.len() - 1
    }

    pub fn source(&self) -> Option<&InfiniteKernel> {
        self.source.as_ref()
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    /// Largest imaginary part seen in the grid DFT before it was stored as real.
    pub fn dft_imag_residual(&self) -> f64 {
        self.dft_imag_residual
    }

    /// Report computed at construction with [`ASSUMPTION_TOL`].
    pub fn assumptions(&self) -> &AssumptionReport {
        &self.assumptions
    }

    /// The periodic kernel at an arbitrary point, when the infinite-line source is known.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        self.source.as_ref().map(|k| k.periodized_value(x.rem_euclid(1.0), self.truncation_radius))
    }

    /// Stored `Ĵ_j`, `|j| ≤ M`.
    pub fn fourier_coefficient(&self, j: i64) -> Result<f64> {
        let m = self.max_fourier_mode() as i64;
        if j.abs() > m {
            return Err(Error::IndexOutOfRange { index: j, min: -m, max: m });
        }
        Ok(self.fourier_coeffs[j.unsigned_abs() as usize])
    }

    /// `Ĵ_j` for any `j`: stored values inside the table, the continuous transform
    /// beyond it when the source kernel is known, zero otherwise.
    pub fn hat_coefficient(&self, j: i64) -> Result<f64> {
        let a = j.unsigned_abs() as usize;
        if a < self.fourier_coeffs.len() {
            return Ok(self.fourier_coeffs[a]);
        }
        match &self.source {
            Some(k) => k.continuous_transform(2.0 * PI * j as f64),
            None => Ok(0.0),
        }
    }

    /// `J̃_k`, `-N/2+1 ≤ k ≤ N/2`.
    pub fn dft_value(&self, k: i64) -> Result<f64> {
        let (min, max) = wavenumber_range(self.n_points);
        if k < min || k > max {
            return Err(Error::IndexOutOfRange { index: k, min, max });
        }
        Ok(self.dft_values[spectral::slot(k, self.n_points)])
    }

    pub(crate) fn dft_by_slot(&self) -> &[f64] {
        &self.dft_values
    }

    /// `J̃_0 − J̃_k`.
    pub fn dft_gap(&self, k: i64) -> Result<f64> {
        let gap = self.dft_values[0] - self.dft_value(k)?;
        if self.assumptions.overall {
            debug_assert!((-1e-12..=2.0 + 1e-12).contains(&gap), "gap {gap} at k={k} outside [0, 2]");
        }
        Ok(gap)
    }

    /// `(k*, max_k (J̃_0 − J̃_k))`; ties resolve to the smallest `|k|`.
    pub fn max_gap(&self) -> (i64, f64) {
        let mut best = (0, 0.0);
        for k in spectral::wavenumbers(self.n_points) {
            let gap = self.dft_values[0] - self.dft_values[spectral::slot(k, self.n_points)];
            if gap > best.1 {
                best = (k, gap);
            }
        }
        best
    }
}

/// Free-function form of [`PeriodicKernel::fourier_coefficient`].
pub fn fourier_coefficient(pk: &PeriodicKernel, index: i64) -> Result<f64> {
    pk.fourier_coefficient(index)
}

/// Free-function form of [`PeriodicKernel::dft_gap`].
pub fn dft_gap(pk: &PeriodicKernel, k: i64) -> Result<f64> {
    pk.dft_gap(k)
}

/// `h·FFT(samples)`, real parts in storage order, plus the largest discarded imaginary part.
fn real_dft(samples: &[f64]) -> (Vec<f64>, f64) {
    let g = GridFunction::from_real(samples).expect("even length checked by caller");
    let s = spectral::dft(&g);
    let modes = s.storage();
    let imag = modes.iter().map(|m: &Complex64| m.im.abs()).fold(0.0, f64::max);
    (modes.iter().map(|m| m.re).collect(), imag)
}

pub fn check_assumptions(pk: &PeriodicKernel) -> AssumptionReport {
    check_assumptions_with_tol(pk, ASSUMPTION_TOL)
}

pub fn check_assumptions_with_tol(pk: &PeriodicKernel, tol: f64) -> AssumptionReport {
    let n = pk.n_points;
    let s = &pk.samples;
    let scale = s.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let sample_tol = tol * scale;

    let min_sample = s.iter().copied().fold(f64::INFINITY, f64::min);
    let asymmetry = (1..n).map(|j| (s[j] - s[n - j]).abs()).fold(0.0, f64::max);
    let mass_residual = (pk.hat_j0 - 1.0).abs();
    let grid_mass = s.iter().sum::<f64>() / n as f64;
    let increase = (0..n / 2).map(|j| s[j + 1] - s[j]).fold(f64::NEG_INFINITY, f64::max);
    let min_coeff =
        (0..=(n / 2) as i64).map(|j| pk.hat_coefficient(j).unwrap_or(f64::NAN)).fold(f64::INFINITY, f64::min);

    let a1 = HypothesisCheck { pass: min_sample >= -sample_tol, measure: min_sample };
    let a2 = HypothesisCheck { pass: asymmetry <= sample_tol, measure: asymmetry };
    let a3 = HypothesisCheck { pass: mass_residual <= tol, measure: mass_residual };
    let a4 = HypothesisCheck { pass: increase <= sample_tol, measure: increase };
    let a5 = HypothesisCheck { pass: min_coeff >= -tol, measure: min_coeff };
    AssumptionReport {
        overall: a1.pass && a2.pass && a3.pass && a4.pass && a5.pass,
        a1_nonneg: a1,
        a2_symmetric: a2,
        a3_unit_mass: a3,
        a3_grid_mass_residual: (grid_mass - 1.0).abs(),
        a4_monotone_decreasing_on_half: a4,
        a5_nonneg_fourier: a5,
        tolerance: tol,
    }
}
