//! Discrete Fourier machinery on the uniform periodic grid `x_j = j h`, `h = 1/N`.
//!
//! The forward transform carries the factor `h`, so that `Ũ_k` approximates the
//! Fourier coefficient `û_k = ∫₀¹ u(x) e^{-i2πkx} dx`; the inverse carries no factor.
//! Under this pair Parseval reads `‖u‖_h² = Σ_k |Ũ_k|²`.
//!
//! Modes are addressed by wavenumber `k ∈ {-N/2+1, …, N/2}`. Storage is in FFT
//! order (`k mod N`) and is not part of the public contract.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

pub(crate) fn check_even(n: usize) -> Result<()> {
    if !n.is_multiple_of(2) {
        return Err(Error::OddGridSize(n));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("grid size must be positive".into()));
    }
    Ok(())
}

/// Lowest and highest wavenumber on an `n`-point grid.
pub fn wavenumber_range(n: usize) -> (i64, i64) {
    let half = (n / 2) as i64;
    (-half + 1, half)
}

/// Wavenumbers `-N/2+1, …, N/2` in increasing order.
pub fn wavenumbers(n: usize) -> impl Iterator<Item = i64> {
    let (lo, hi) = wavenumber_range(n);
    lo..=hi
}

/// Storage slot of wavenumber `k` on an `n`-point grid.
#[inline]
pub(crate) fn slot(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

#[inline]
pub(crate) fn wavenumber_of_slot(slot: usize, n: usize) -> i64 {
    if slot <= n / 2 {
        slot as i64
    } else {
        slot as i64 - n as i64
    }
}

fn check_wavenumber(k: i64, n: usize) -> Result<()> {
    let (min, max) = wavenumber_range(n);
    if k < min || k > max {
        return Err(Error::IndexOutOfRange { index: k, min, max });
    }
    Ok(())
}

/// `N` samples on the grid `x_j = j/N`. Real data is stored with zero imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        check_even(values.len())?;
        Ok(GridFunction { values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        check_even(n)?;
        let h = 1.0 / n as f64;
        Ok(GridFunction { values: (0..n).map(|j| f(j as f64 * h)).collect() })
    }

    pub fn from_real_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(n, |x| Complex64::new(f(x), 0.0))
    }

    pub fn n_points(&self) -> usize {
        self.values.len()
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.values.len() as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 / self.values.len() as f64
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// `h Σ_j U_j`, the discrete mass (equal to `Ũ_0`).
    pub fn mass(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.spacing()
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        if self.n_points() != other.n_points() {
            return Err(Error::GridMismatch { expected: self.n_points(), found: other.n_points() });
        }
        Ok(GridFunction { values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect() })
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &GridFunction, b: Complex64) -> Result<GridFunction> {
        if self.n_points() != other.n_points() {
            return Err(Error::GridMismatch { expected: self.n_points(), found: other.n_points() });
        }
        Ok(GridFunction { values: self.values.iter().zip(&other.values).map(|(u, v)| a * u + b * v).collect() })
    }
}

/// The DFT image of a [`GridFunction`]: `N` complex modes `Ũ_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    modes: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(n: usize) -> Result<Self> {
        check_even(n)?;
        Ok(SpectralField { modes: vec![Complex64::new(0.0, 0.0); n] })
    }

    /// Builds a field from `(k, Ũ_k)` pairs; unspecified modes are zero.
    pub fn from_modes(n: usize, modes: impl IntoIterator<Item = (i64, Complex64)>) -> Result<Self> {
        let mut field = Self::zeros(n)?;
        for (k, v) in modes {
            field.set_mode(k, v)?;
        }
        Ok(field)
    }

    pub fn n_points(&self) -> usize {
        self.modes.len()
    }

    pub fn mode(&self, k: i64) -> Result<Complex64> {
        check_wavenumber(k, self.modes.len())?;
        Ok(self.modes[slot(k, self.modes.len())])
    }

    pub fn set_mode(&mut self, k: i64, value: Complex64) -> Result<()> {
        check_wavenumber(k, self.modes.len())?;
        let n = self.modes.len();
        self.modes[slot(k, n)] = value;
        Ok(())
    }

    /// `(k, Ũ_k)` for `k = -N/2+1, …, N/2` in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n = self.modes.len();
        wavenumbers(n).map(move |k| (k, self.modes[slot(k, n)]))
    }

    /// Multiplies every mode by `f(k)`.
    pub fn scale_by(&mut self, f: impl Fn(i64) -> Complex64) {
        let n = self.modes.len();
        for (s, m) in self.modes.iter_mut().enumerate() {
            *m *= f(wavenumber_of_slot(s, n));
        }
    }

    pub fn energy(&self) -> f64 {
        self.modes.iter().map(|m| m.norm_sqr()).sum()
    }

    pub(crate) fn storage(&self) -> &[Complex64] {
        &self.modes
    }
}

/// Forward transform `Ũ_k = h Σ_j U_j e^{-i2πk x_j}`.
pub fn dft(g: &GridFunction) -> SpectralField {
    let n = g.n_points();
    let mut buf = g.values().to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let h = g.spacing();
    buf.iter_mut().for_each(|v| *v *= h);
    SpectralField { modes: buf }
}

/// Inverse transform `U_j = Σ_k Ũ_k e^{i2πk x_j}`.
pub fn idft(s: &SpectralField) -> GridFunction {
    let n = s.n_points();
    let mut buf = s.modes.clone();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    GridFunction { values: buf }
}

/// `‖U‖_h = √(h Σ_j |U_j|²)`.
pub fn discrete_norm(g: &GridFunction) -> f64 {
    (g.spacing() * g.values().iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
}

/// `|‖U‖_h² − Σ_k |Ũ_k|²|`.
pub fn parseval_residual(g: &GridFunction) -> f64 {
    let lhs = discrete_norm(g).powi(2);
    (lhs - dft(g).energy()).abs()
}

/// A table of Fourier coefficients `c_k` for `|k| ≤ M`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients {
    max_mode: usize,
    values: Vec<Complex64>,
}

impl FourierCoefficients {
    pub fn zeros(max_mode: usize) -> Self {
        FourierCoefficients { max_mode, values: vec![Complex64::new(0.0, 0.0); 2 * max_mode + 1] }
    }

    pub fn from_fn(max_mode: usize, f: impl Fn(i64) -> Complex64) -> Self {
        let m = max_mode as i64;
        FourierCoefficients { max_mode, values: (-m..=m).map(f).collect() }
    }

    pub fn max_mode(&self) -> usize {
        self.max_mode
    }

    /// `c_k` if `|k| ≤ M`.
    pub fn get(&self, k: i64) -> Option<Complex64> {
        if k.unsigned_abs() as usize > self.max_mode {
            return None;
        }
        Some(self.values[(k + self.max_mode as i64) as usize])
    }

    pub fn set(&mut self, k: i64, value: Complex64) -> Result<()> {
        let m = self.max_mode as i64;
        if k.abs() > m {
            return Err(Error::IndexOutOfRange { index: k, min: -m, max: m });
        }
        self.values[(k + m) as usize] = value;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let m = self.max_mode as i64;
        self.values.iter().enumerate().map(move |(i, &v)| (i as i64 - m, v))
    }

    /// Folds the table onto an `n`-point grid: slot `k` receives `Σ_m c_{k+mN}`.
    pub fn alias_onto(&self, n: usize) -> Result<SpectralField> {
        check_even(n)?;
        let mut modes = vec![Complex64::new(0.0, 0.0); n];
        for (k, v) in self.iter() {
            modes[slot(k, n)] += v;
        }
        Ok(SpectralField { modes })
    }
}

/// `max_k |Ũ_k − Σ_{m: |k+mN| ≤ M} û_{k+mN}|`, the defect of the discrete Poisson sum
/// between the grid DFT of `g` and the continuous coefficients.
pub fn poisson_sum_residual(continuous: &FourierCoefficients, g: &GridFunction) -> Result<f64> {
    let n = g.n_points();
    if continuous.max_mode() < 2 * n {
        return Err(Error::InsufficientCoefficientRange { have: continuous.max_mode(), need: 2 * n });
    }
    let folded = continuous.alias_onto(n)?;
    let grid = dft(g);
    Ok(grid.storage().iter().zip(folded.storage()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
}

/// Single Fourier mode `e^{i2πkx}` sampled on an `n`-point grid.
pub fn pure_mode(n: usize, k: i64) -> Result<GridFunction> {
    GridFunction::from_fn(n, |x| Complex64::from_polar(1.0, 2.0 * PI * k as f64 * x))
}
