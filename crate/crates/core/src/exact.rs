//! Reference solutions built from Fourier series.
//!
//! Mode `j` of the continuum problem evolves as `û_j(t) = e^{q̂_j t} û_j(0)` with
//! `q̂_j = Ĵ_j − Ĵ_0`; mode `k` of the semidiscrete system evolves with
//! `q̃_k = J̃_k − J̃_0`. Exponentials are evaluated directly, never compounded.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::PeriodicKernel;
use crate::spectral::{self, FourierCoefficients, GridFunction, SpectralField};

/// Lattice radius for the periodized Gaussian bump; `e^{-a R²}` is negligible beyond it.
fn bump_radius(a: f64) -> usize {
    ((40.0 / a).sqrt().ceil() as usize).max(1) + 1
}

/// Initial data families.
///
/// * `GaussianBump { a, center }`: `√(1/π) e^{-a(x−center)²}`, lattice-summed to be 1-periodic.
/// * `LaplaceBump { center }`: `½ e^{-|x−center|}` on `[0, 1)`, extended periodically
///   (kinks at `center` and at the cell boundary).
/// * `SingleMode { k, amplitude }`: `amplitude · e^{i2πkx}`.
/// * `GridSamples`: given grid values, read as their trigonometric interpolant.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialFamily {
    GaussianBump { a: f64, center: f64 },
    LaplaceBump { center: f64 },
    SingleMode { k: i64, amplitude: Complex64 },
    GridSamples(Vec<Complex64>),
}

impl InitialFamily {
    pub fn gaussian_bump(a: f64, center: f64) -> Self {
        InitialFamily::GaussianBump { a, center }
    }

    pub fn laplace_bump(center: f64) -> Self {
        InitialFamily::LaplaceBump { center }
    }

    pub fn single_mode(k: i64, amplitude: f64) -> Self {
        InitialFamily::SingleMode { k, amplitude: Complex64::new(amplitude, 0.0) }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            InitialFamily::GaussianBump { a, center } => {
                if !(a.is_finite() && *a > 0.0) || !center.is_finite() {
                    return Err(Error::InvalidParameter(format!("gaussian bump needs a > 0, got a={a}")));
                }
            }
            InitialFamily::LaplaceBump { center } => {
                if !(0.0..=1.0).contains(center) {
                    return Err(Error::InvalidParameter(format!("laplace bump center {center} not in [0, 1]")));
                }
            }
            InitialFamily::SingleMode { amplitude, .. } => {
                if !(amplitude.re.is_finite() && amplitude.im.is_finite()) {
                    return Err(Error::InvalidParameter("non-finite amplitude".into()));
                }
            }
            InitialFamily::GridSamples(v) => spectral::check_even(v.len())?,
        }
        Ok(())
    }

    pub fn tag(&self) -> String {
        match self {
            InitialFamily::GaussianBump { a, center } => format!("gaussian-bump(a={a},center={center})"),
            InitialFamily::LaplaceBump { center } => format!("laplace-bump(center={center})"),
            InitialFamily::SingleMode { k, amplitude } => {
                format!("single-mode(k={k},amp={}{:+}i)", amplitude.re, amplitude.im)
            }
            InitialFamily::GridSamples(v) => format!("grid-samples(N={})", v.len()),
        }
    }

    pub fn is_real(&self) -> bool {
        match self {
            InitialFamily::GaussianBump { .. } | InitialFamily::LaplaceBump { .. } => true,
            InitialFamily::SingleMode { .. } => false,
            InitialFamily::GridSamples(v) => v.iter().all(|z| z.im == 0.0),
        }
    }

    /// Largest `σ` for which `u₀ ∈ H^σ` is expected (exclusive for the bump with kinks).
    pub fn sobolev_exponent_hint(&self) -> f64 {
        match self {
            InitialFamily::LaplaceBump { center } => {
                if *center == 0.5 {
                    1.5
                } else {
                    0.5
                }
            }
            _ => f64::INFINITY,
        }
    }

    /// Pointwise value of the periodic function at `x`; `None` for grid samples.
    /// At a jump the mean of the one-sided limits is returned.
    pub fn value(&self, x: f64) -> Option<Complex64> {
        let x = x.rem_euclid(1.0);
        match *self {
            InitialFamily::GaussianBump { a, center } => {
                let r = bump_radius(a);
                let mut acc = 0.0;
                for m in (1..=r).rev() {
                    let m = m as f64;
                    let (d1, d2) = (x - center - m, x - center + m);
                    acc += (-a * d1 * d1).exp() + (-a * d2 * d2).exp();
                }
                let d = x - center;
                acc += (-a * d * d).exp();
                Some(Complex64::new(acc / PI.sqrt(), 0.0))
            }
            InitialFamily::LaplaceBump { center } => {
                let v = if x == 0.0 {
                    0.25 * ((-center).exp() + (center - 1.0).exp())
                } else {
                    0.5 * (-(x - center).abs()).exp()
                };
                Some(Complex64::new(v, 0.0))
            }
            InitialFamily::SingleMode { k, amplitude } => {
                Some(amplitude * Complex64::from_polar(1.0, 2.0 * PI * k as f64 * x))
            }
            InitialFamily::GridSamples(_) => None,
        }
    }

    /// Closed-form `û_k(0)`; `None` for grid samples.
    pub fn coefficient(&self, k: i64) -> Option<Complex64> {
        let omega = 2.0 * PI * k as f64;
        match *self {
            InitialFamily::GaussianBump { a, center } => {
                let mag = (-PI * PI * (k * k) as f64 / a).exp() / a.sqrt();
                Some(Complex64::from_polar(mag, -omega * center))
            }
            InitialFamily::LaplaceBump { center } => {
                let phase = Complex64::from_polar(1.0, -omega * center);
                let left = (phase - (-center).exp()) / Complex64::new(1.0, -omega);
                let right = (phase - (center - 1.0).exp()) / Complex64::new(1.0, omega);
                Some(0.5 * (left + right))
            }
            InitialFamily::SingleMode { k: mode, amplitude } => {
                Some(if k == mode { amplitude } else { Complex64::new(0.0, 0.0) })
            }
            InitialFamily::GridSamples(_) => None,
        }
    }

    /// Samples `u₀(x_j)` on an `n`-point grid.
    pub fn sample(&self, n: usize) -> Result<GridFunction> {
        self.validate()?;
        match self {
            InitialFamily::GridSamples(v) => {
                if v.len() != n {
                    return Err(Error::GridMismatch { expected: n, found: v.len() });
                }
                GridFunction::new(v.clone())
            }
            other => GridFunction::from_fn(n, |x| other.value(x).expect("closed-form family")),
        }
    }
}

/// Initial data with its Fourier coefficients resolved to `|k| ≤ M`.
#[derive(Debug, Clone)]
pub struct InitialData {
    family: InitialFamily,
    coefficients: FourierCoefficients,
    tail_norm: f64,
    sobolev_exponent_hint: f64,
}

/// `û_k(0)` for `|k| ≤ max_mode`, failing if the ℓ² tail beyond `max_mode` exceeds `tol`.
pub fn initial_coefficients(family: &InitialFamily, max_mode: usize, tol: f64) -> Result<FourierCoefficients> {
    Ok(resolve(family, max_mode, tol)?.0)
}

fn resolve(family: &InitialFamily, max_mode: usize, tol: f64) -> Result<(FourierCoefficients, f64)> {
    family.validate()?;
    if max_mode < 1 {
        return Err(Error::InvalidParameter("max_mode must be at least 1".into()));
    }
    let (coeffs, tail) = match family {
        InitialFamily::GridSamples(values) => {
            let n = values.len();
            let s = spectral::dft(&GridFunction::new(values.clone())?);
            let mut c = FourierCoefficients::zeros(max_mode);
            let mut dropped = 0.0;
            for (k, v) in s.iter() {
                if c.set(k, v).is_err() {
                    dropped += v.norm_sqr();
                }
            }
            debug_assert_eq!(s.n_points(), n);
            (c, dropped.sqrt())
        }
        InitialFamily::SingleMode { k, amplitude } => {
            let mut c = FourierCoefficients::zeros(max_mode);
            let tail = if c.set(*k, *amplitude).is_ok() { 0.0 } else { amplitude.norm() };
            (c, tail)
        }
        closed => {
            let c = FourierCoefficients::from_fn(max_mode, |k| closed.coefficient(k).expect("closed form"));
            (c, closed_form_tail(closed, max_mode)?)
        }
    };
    if tail > tol {
        return Err(Error::TailNotResolved(format!(
            "{}: ℓ² tail beyond |k| = {max_mode} is {tail:e} > {tol:e}",
            family.tag()
        )));
    }
    Ok((coeffs, tail))
}

/// Estimated `(Σ_{|k|>M} |û_k|²)^{1/2}`, summing two octaves and extrapolating geometrically.
fn closed_form_tail(family: &InitialFamily, max_mode: usize) -> Result<f64> {
    let octave = |lo: usize, hi: usize| -> f64 {
        (lo + 1..=hi)
            .map(|k| {
                let k = k as i64;
                family.coefficient(k).unwrap().norm_sqr() + family.coefficient(-k).unwrap().norm_sqr()
            })
            .sum()
    };
    let first = octave(max_mode, 2 * max_mode);
    if first == 0.0 {
        return Ok(0.0);
    }
    let second = octave(2 * max_mode, 4 * max_mode);
    let ratio = second / first;
    if ratio >= 1.0 {
        return Err(Error::TailNotResolved(format!("{}: coefficients are not decaying", family.tag())));
    }
    Ok((first / (1.0 - ratio)).sqrt())
}

impl InitialData {
    pub fn new(family: InitialFamily, max_mode: usize, tol: f64) -> Result<Self> {
        let (coefficients, tail_norm) = resolve(&family, max_mode, tol)?;
        let sobolev_exponent_hint = family.sobolev_exponent_hint();
        Ok(InitialData { family, coefficients, tail_norm, sobolev_exponent_hint })
    }

    pub fn family(&self) -> &InitialFamily {
        &self.family
    }

    pub fn coefficients(&self) -> &FourierCoefficients {
        &self.coefficients
    }

    pub fn max_mode(&self) -> usize {
        self.coefficients.max_mode()
    }

    pub fn tail_norm(&self) -> f64 {
        self.tail_norm
    }

    pub fn sobolev_exponent_hint(&self) -> f64 {
        self.sobolev_exponent_hint
    }

    /// `û_k(0)`: closed form when available (any `k`), otherwise the stored table.
    pub fn coefficient(&self, k: i64) -> Complex64 {
        self.family.coefficient(k).or_else(|| self.coefficients.get(k)).unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn sample(&self, n: usize) -> Result<GridFunction> {
        self.family.sample(n)
    }
}

/// How [`exact_at`] sums the Fourier series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesEvaluation {
    /// `Σ_{|j| ≤ M} û_j e^{q̂_j t} e^{i2πjx}`.
    Truncated,
    /// `e^{-Ĵ_0 t} u₀(x) + Σ_{|j| ≤ M} û_j (e^{q̂_j t} − e^{-Ĵ_0 t}) e^{i2πjx}`: the same
    /// series with the slowly decaying part of every term summed exactly through `u₀`.
    /// Needs a pointwise initial function; falls back to `Truncated` otherwise.
    TailCorrected,
}

/// Continuum solution of the periodic problem for given initial data and kernel.
#[derive(Debug, Clone)]
pub struct ExactSolution {
    initial: InitialData,
    kernel: PeriodicKernel,
    /// `q̂_j` for `j = 0..=M`; `q̂_{-j} = q̂_j`.
    decay_exponents: Vec<f64>,
    evaluation: SeriesEvaluation,
}

impl ExactSolution {
    /// Uses `Ĵ_j` of the kernel for `|j| ≤ M`, `M` being the initial data's range.
    pub fn new(initial: InitialData, kernel: &PeriodicKernel) -> Result<Self> {
        let m = initial.max_mode();
        let hat_j0 = kernel.hat_j0();
        let decay_exponents =
            (0..=m as i64).map(|j| Ok(kernel.hat_coefficient(j)? - hat_j0)).collect::<Result<Vec<_>>>()?;
        let evaluation = if initial.family().value(0.0).is_some() {
            SeriesEvaluation::TailCorrected
        } else {
            SeriesEvaluation::Truncated
        };
        Ok(ExactSolution { initial, kernel: kernel.clone(), decay_exponents, evaluation })
    }

    pub fn with_evaluation(mut self, evaluation: SeriesEvaluation) -> Self {
        self.evaluation = evaluation;
        self
    }

    pub fn evaluation(&self) -> SeriesEvaluation {
        self.evaluation
    }

    pub fn initial(&self) -> &InitialData {
        &self.initial
    }

    pub fn kernel(&self) -> &PeriodicKernel {
        &self.kernel
    }

    pub fn max_mode(&self) -> usize {
        self.decay_exponents.len() - 1
    }

    /// `q̂_j = Ĵ_j − Ĵ_0`, `|j| ≤ M`.
    pub fn decay_exponent(&self, j: i64) -> Result<f64> {
        let m = self.max_mode() as i64;
        if j.abs() > m {
            return Err(Error::IndexOutOfRange { index: j, min: -m, max: m });
        }
        Ok(self.decay_exponents[j.unsigned_abs() as usize])
    }

    /// `û_j(t) = û_j(0) e^{q̂_j t}`.
    pub fn mode_at(&self, j: i64, t: f64) -> Result<Complex64> {
        Ok(self.initial.coefficient(j) * (self.decay_exponent(j)? * t).exp())
    }

    /// Samples of the solution at time `t` on an `n`-point grid.
    pub fn exact_at(&self, t: f64, n: usize) -> Result<GridFunction> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::NegativeTime(t));
        }
        spectral::check_even(n)?;
        let evaluation = match self.evaluation {
            SeriesEvaluation::TailCorrected if self.initial.family().value(0.0).is_some() => {
                SeriesEvaluation::TailCorrected
            }
            _ => SeriesEvaluation::Truncated,
        };
        let base = match evaluation {
            SeriesEvaluation::TailCorrected => (-self.kernel.hat_j0() * t).exp(),
            SeriesEvaluation::Truncated => 0.0,
        };
        // Fold Σ_j c_j e^{i2πj x_l} onto the grid: e^{i2πj x_l} depends only on j mod N.
        let mut folded = FourierCoefficients::zeros(self.max_mode());
        for (j, u) in self.initial.coefficients().iter() {
            if u == Complex64::new(0.0, 0.0) {
                continue;
            }
            let growth = (self.decay_exponents[j.unsigned_abs() as usize] * t).exp() - base;
            folded.set(j, u * growth)?;
        }
        let mut g = spectral::idft(&folded.alias_onto(n)?);
        if evaluation == SeriesEvaluation::TailCorrected {
            let family = self.initial.family();
            for (l, v) in g.values_mut().iter_mut().enumerate() {
                *v += base * family.value(l as f64 / n as f64).expect("pointwise family");
            }
        }
        Ok(g)
    }
}

/// Free-function form of [`ExactSolution::exact_at`].
pub fn exact_at(sol: &ExactSolution, t: f64, n_points: usize) -> Result<GridFunction> {
    sol.exact_at(t, n_points)
}

/// Exact solution of the semidiscrete system in DFT space: `Ũ_k(t) = e^{q̃_k t} Ũ_k(0)`.
pub fn semidiscrete_exact(initial_spectrum: &SpectralField, kernel: &PeriodicKernel, t: f64) -> Result<SpectralField> {
    if initial_spectrum.n_points() != kernel.n_points() {
        return Err(Error::GridMismatch { expected: kernel.n_points(), found: initial_spectrum.n_points() });
    }
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    let n = kernel.n_points();
    let dft = kernel.dft_by_slot();
    let mut out = initial_spectrum.clone();
    out.scale_by(|k| Complex64::new(((dft[spectral::slot(k, n)] - dft[0]) * t).exp(), 0.0));
    Ok(out)
}

/// Result of [`sobolev_norm`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevNorm {
    pub value: f64,
    /// False when the last octave `M/2 < |m| ≤ M` carries more than 1% of the squared
    /// norm, i.e. the partial sums have not settled.
    pub stabilized: bool,
    pub last_octave_share: f64,
}

/// `√(|û_0|² + Σ_{0<|m|≤M} |m|^{2σ} |û_m|²)`.
pub fn sobolev_norm(data: &InitialData, sigma: f64) -> SobolevNorm {
    let m_max = data.max_mode() as i64;
    let mut total = data.coefficient(0).norm_sqr();
    let mut last_octave = 0.0;
    for m in 1..=m_max {
        let w = (m as f64).powf(2.0 * sigma);
        let term = w * (data.coefficient(m).norm_sqr() + data.coefficient(-m).norm_sqr());
        total += term;
        if 2 * m > m_max {
            last_octave += term;
        }
    }
    let share = if total > 0.0 { last_octave / total } else { 0.0 };
    SobolevNorm { value: total.sqrt(), stabilized: share <= 0.01, last_octave_share: share }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{periodize, InfiniteKernel};
    use crate::spectral::{dft, discrete_norm, idft};

    fn gaussian_kernel(n: usize) -> PeriodicKernel {
        periodize(&InfiniteKernel::gaussian(10.0).unwrap(), n, 1e-14).unwrap()
    }

    #[test]
    fn single_mode_coefficients() {
        let c = initial_coefficients(&InitialFamily::single_mode(3, 1.0), 8, 1e-12).unwrap();
        for (k, v) in c.iter() {
            assert_eq!(v, Complex64::new(if k == 3 { 1.0 } else { 0.0 }, 0.0));
        }
        assert!(matches!(
            initial_coefficients(&InitialFamily::single_mode(9, 1.0), 8, 1e-12),
            Err(Error::TailNotResolved(_))
        ));
    }

    #[test]
    fn real_families_have_conjugate_symmetric_coefficients() {
        for fam in [InitialFamily::gaussian_bump(1.0, 0.5), InitialFamily::laplace_bump(0.3)] {
            for k in 1..40 {
                let (p, m) = (fam.coefficient(k).unwrap(), fam.coefficient(-k).unwrap());
                assert!((p - m.conj()).norm() < 1e-16, "{} k={k}", fam.tag());
            }
        }
    }

    #[test]
    fn laplace_bump_closed_form_at_center_half() {
        let fam = InitialFamily::laplace_bump(0.5);
        for k in 0..20i64 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let want = (sign - (-0.5f64).exp()) / (1.0 + 4.0 * PI * PI * (k * k) as f64);
            let got = fam.coefficient(k).unwrap();
            assert!((got.re - want).abs() < 1e-15 && got.im.abs() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn unresolvable_tail_is_an_error() {
        let r = InitialData::new(InitialFamily::laplace_bump(0.5), 8, 1e-9);
        assert!(matches!(r, Err(Error::TailNotResolved(_))));
        assert!(InitialData::new(InitialFamily::gaussian_bump(1.0, 0.5), 8, 1e-14).is_ok());
    }

    #[test]
    fn bessel_inequality_holds() {
        let data = InitialData::new(InitialFamily::laplace_bump(0.5), 256, 1e-4).unwrap();
        let energy: f64 = data.coefficients().iter().map(|(_, v)| v.norm_sqr()).sum();
        // ∫₀¹ ¼ e^{-2|x−½|} dx = ½ ∫₀^{½} e^{-2y} dy
        let l2 = 0.25 * (1.0 - (-1.0f64).exp());
        assert!(energy <= l2 + 1e-14);
        assert!(l2 - energy < 1e-7);
    }

    #[test]
    fn exact_at_time_zero_reproduces_samples() {
        let pk = gaussian_kernel(64);
        for fam in [InitialFamily::gaussian_bump(1.0, 0.5), InitialFamily::laplace_bump(0.5)] {
            let data = InitialData::new(fam.clone(), 512, 1e-4).unwrap();
            let sol = ExactSolution::new(data, &pk).unwrap();
            let u0 = fam.sample(64).unwrap();
            let at0 = sol.exact_at(0.0, 64).unwrap();
            assert!(discrete_norm(&at0.sub(&u0).unwrap()) < 1e-13, "{}", fam.tag());
            let truncated = sol.clone().with_evaluation(SeriesEvaluation::Truncated).exact_at(0.0, 64).unwrap();
            assert!(discrete_norm(&truncated.sub(&u0).unwrap()) < 1e-4);
        }
    }

    #[test]
    fn single_mode_decays_at_closed_form_rate() {
        let pk = gaussian_kernel(32);
        let data = InitialData::new(InitialFamily::single_mode(1, 1.0), 256, 1e-12).unwrap();
        let sol = ExactSolution::new(data, &pk).unwrap();
        let q1 = (-PI * PI / 10.0).exp() - 1.0;
        assert!((sol.decay_exponent(1).unwrap() - q1).abs() < 1e-15);
        assert!((q1 + 0.627_29).abs() < 1e-5);
        let g = sol.exact_at(1.0, 32).unwrap();
        for (j, v) in g.values().iter().enumerate() {
            let want = Complex64::from_polar(q1.exp(), 2.0 * PI * j as f64 / 32.0);
            assert!((v - want).norm() < 1e-14);
        }
    }

    #[test]
    fn long_time_limit_is_the_mean() {
        let pk = gaussian_kernel(32);
        let data = InitialData::new(InitialFamily::laplace_bump(0.5), 256, 1e-4).unwrap();
        let mean = data.coefficient(0).re;
        let sol = ExactSolution::new(data, &pk).unwrap();
        let late = sol.exact_at(200.0, 32).unwrap();
        assert!(late.values().iter().all(|v| (v.re - mean).abs() < 1e-12));
        assert!(matches!(sol.exact_at(-1.0, 32), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn decay_exponents_are_nonpositive() {
        for kernel in [InfiniteKernel::gaussian(10.0).unwrap(), InfiniteKernel::laplace(5.0).unwrap()] {
            let pk = periodize(&kernel, 16, 1e-14).unwrap();
            let data = InitialData::new(InitialFamily::gaussian_bump(1.0, 0.5), 256, 1e-12).unwrap();
            let sol = ExactSolution::new(data, &pk).unwrap();
            assert_eq!(sol.decay_exponent(0).unwrap(), 0.0);
            for j in -256..=256 {
                let q = sol.decay_exponent(j).unwrap();
                assert!((-1.0..=0.0).contains(&q), "j={j} q={q}");
            }
        }
    }

    #[test]
    fn semidiscrete_exact_basics() {
        let pk = gaussian_kernel(16);
        let u0 = InitialFamily::laplace_bump(0.5).sample(16).unwrap();
        let s0 = dft(&u0);
        assert_eq!(semidiscrete_exact(&s0, &pk, 0.0).unwrap(), s0);
        let s = semidiscrete_exact(&s0, &pk, 3.7).unwrap();
        assert_eq!(s.mode(0).unwrap(), s0.mode(0).unwrap());
        assert!(idft(&s).max_imag() < 1e-15);
        let other = gaussian_kernel(32);
        assert!(matches!(semidiscrete_exact(&s0, &other, 1.0), Err(Error::GridMismatch { .. })));
    }

    #[test]
    fn sobolev_norms() {
        let single = InitialData::new(InitialFamily::single_mode(2, 1.0), 16, 1e-12).unwrap();
        let s = sobolev_norm(&single, 1.0);
        assert!((s.value - 2.0).abs() < 1e-15 && s.stabilized);

        let smooth = InitialData::new(InitialFamily::gaussian_bump(1.0, 0.5), 64, 1e-12).unwrap();
        let s = sobolev_norm(&smooth, 4.0);
        assert!(s.value.is_finite() && s.stabilized);

        let kinked = InitialData::new(InitialFamily::laplace_bump(0.5), 256, 1e-4).unwrap();
        assert!(!sobolev_norm(&kinked, 2.0).stabilized);
        assert!(sobolev_norm(&kinked, 1.0).stabilized);
    }

    #[test]
    fn grid_samples_use_their_interpolant() {
        let values: Vec<Complex64> = (0..8).map(|j| Complex64::new((j as f64).sin(), 0.0)).collect();
        let data = InitialData::new(InitialFamily::GridSamples(values.clone()), 16, 1e-12).unwrap();
        let pk = gaussian_kernel(8);
        let sol = ExactSolution::new(data, &pk).unwrap();
        assert_eq!(sol.evaluation(), SeriesEvaluation::Truncated);
        let back = sol.exact_at(0.0, 8).unwrap();
        for (a, b) in back.values().iter().zip(&values) {
            assert!((a - b).norm() < 1e-14);
        }
        assert!(matches!(InitialFamily::GridSamples(values).sample(16), Err(Error::GridMismatch { .. })));
    }
}
