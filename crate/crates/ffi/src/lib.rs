//! C interface to the periodic kernel and the explicit Euler scheme.
//!
//! Kernels are opaque handles created by [`ne_kernel_periodize`] and released with
//! [`ne_kernel_free`]. Every fallible call returns an [`NeStatus`]; on failure the
//! message is available from [`ne_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use nonlocal_euler::analysis::critical_timestep;
use nonlocal_euler::kernels::{periodize, InfiniteKernel, PeriodicKernel};
use nonlocal_euler::scheme::{amplification_factor, EulerStepper, RhsPath};
use nonlocal_euler::Error;
use num_complex::Complex64;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OddGridSize = 3,
    NonDecayingKernel = 4,
    IndexOutOfRange = 5,
    BufferSize = 6,
    NonFinite = 7,
    Panic = 8,
    Internal = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeKernelFamily {
    Gaussian = 0,
    Laplace = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeRhsPath {
    Direct = 0,
    Convolution = 1,
}

/// Opaque periodized kernel.
pub struct NeKernel {
    inner: PeriodicKernel,
}

/// One hypothesis check: pass flag and the measured quantity.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct NeCheck {
    pub pass: bool,
    pub measure: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct NeAssumptions {
    pub nonneg: NeCheck,
    pub symmetric: NeCheck,
    pub unit_mass: NeCheck,
    pub monotone_on_half: NeCheck,
    pub nonneg_fourier: NeCheck,
    pub grid_mass_residual: f64,
    pub overall: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct NeCriticalTimestep {
    pub max_gap: f64,
    pub max_gap_mode: i64,
    pub dt_star_sharp: f64,
    pub dt_star_conservative: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> NeStatus {
    match err {
        Error::OddGridSize(_) => NeStatus::OddGridSize,
        Error::InvalidParameter(_) => NeStatus::InvalidArgument,
        Error::NonDecayingKernel { .. } => NeStatus::NonDecayingKernel,
        Error::IndexOutOfRange { .. } => NeStatus::IndexOutOfRange,
        Error::GridMismatch { .. } => NeStatus::BufferSize,
        Error::NonFinite { .. } => NeStatus::NonFinite,
        _ => NeStatus::Internal,
    }
}

struct Fail(NeStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> NeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            NeStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            NeStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(NeStatus::NullPointer, format!("{what} is null"))
}

unsafe fn kernel_ref<'a>(k: *const NeKernel) -> Result<&'a PeriodicKernel, Fail> {
    k.as_ref().map(|k| &k.inner).ok_or_else(|| null("kernel"))
}

unsafe fn out_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message of the last failed call on this thread, or NULL. Valid until the next call.
#[no_mangle]
pub extern "C" fn ne_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// NUL-terminated library version.
#[no_mangle]
pub extern "C" fn ne_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Periodize a closed-form kernel with parameter `c` onto an `n_points` grid.
/// `family` is one of [`NeKernelFamily`].
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn ne_kernel_periodize(
    family: u32,
    c: f64,
    n_points: usize,
    tail_tol: f64,
    out: *mut *mut NeKernel,
) -> NeStatus {
    guard(|| {
        let out = out_mut(out, "out")?;
        *out = std::ptr::null_mut();
        let kernel = match family {
            f if f == NeKernelFamily::Gaussian as u32 => InfiniteKernel::gaussian(c)?,
            f if f == NeKernelFamily::Laplace as u32 => InfiniteKernel::laplace(c)?,
            f => return Err(Fail(NeStatus::InvalidArgument, format!("unknown kernel family {f}"))),
        };
        let inner = periodize(&kernel, n_points, tail_tol)?;
        *out = Box::into_raw(Box::new(NeKernel { inner }));
        Ok(())
    })
}

/// Release a handle. NULL is ignored.
///
/// # Safety
/// `kernel` must come from [`ne_kernel_periodize`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ne_kernel_free(kernel: *mut NeKernel) {
    if !kernel.is_null() {
        drop(Box::from_raw(kernel));
    }
}

/// Grid size of the kernel, 0 for NULL.
///
/// # Safety
/// `kernel` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ne_kernel_n_points(kernel: *const NeKernel) -> usize {
    kernel.as_ref().map_or(0, |k| k.inner.n_points())
}

/// Copy the `N` grid samples `J(x_j)` into `out`, which holds `len` doubles.
///
/// # Safety
/// `kernel` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn ne_kernel_samples(kernel: *const NeKernel, out: *mut f64, len: usize) -> NeStatus {
    guard(|| {
        let k = kernel_ref(kernel)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let samples = k.samples();
        if len < samples.len() {
            return Err(Fail(NeStatus::BufferSize, format!("buffer holds {len}, need {}", samples.len())));
        }
        std::slice::from_raw_parts_mut(out, samples.len()).copy_from_slice(samples);
        Ok(())
    })
}

/// Spectral gap `J̃_0 − J̃_k` for `k` in `-N/2+1..=N/2`.
///
/// # Safety
/// `kernel` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ne_kernel_dft_gap(kernel: *const NeKernel, k: i64, out: *mut f64) -> NeStatus {
    guard(|| {
        let pk = kernel_ref(kernel)?;
        *out_mut(out, "out")? = pk.dft_gap(k)?;
        Ok(())
    })
}

/// # Safety
/// `kernel` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ne_kernel_assumptions(kernel: *const NeKernel, out: *mut NeAssumptions) -> NeStatus {
    guard(|| {
        let r = kernel_ref(kernel)?.assumptions();
        let check = |c: &nonlocal_euler::kernels::HypothesisCheck| NeCheck { pass: c.pass, measure: c.measure };
        *out_mut(out, "out")? = NeAssumptions {
            nonneg: check(&r.a1_nonneg),
            symmetric: check(&r.a2_symmetric),
            unit_mass: check(&r.a3_unit_mass),
            monotone_on_half: check(&r.a4_monotone_decreasing_on_half),
            nonneg_fourier: check(&r.a5_nonneg_fourier),
            grid_mass_residual: r.a3_grid_mass_residual,
            overall: r.overall,
        };
        Ok(())
    })
}

/// # Safety
/// `kernel` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ne_critical_timestep(kernel: *const NeKernel, out: *mut NeCriticalTimestep) -> NeStatus {
    guard(|| {
        let r = critical_timestep(kernel_ref(kernel)?);
        *out_mut(out, "out")? = NeCriticalTimestep {
            max_gap: r.max_gap,
            max_gap_mode: r.max_gap_mode,
            dt_star_sharp: r.dt_star_sharp,
            dt_star_conservative: r.dt_star_conservative,
        };
        Ok(())
    })
}

/// `g = 1 − dt (J̃_0 − J̃_k)`.
///
/// # Safety
/// `kernel` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ne_amplification_factor(kernel: *const NeKernel, dt: f64, k: i64, out: *mut f64) -> NeStatus {
    guard(|| {
        *out_mut(out, "out")? = amplification_factor(kernel_ref(kernel)?, dt, k)?;
        Ok(())
    })
}

/// Advance real grid values `u[0..len]` by `n_steps` explicit Euler steps in place.
/// `path` is one of [`NeRhsPath`].
///
/// `len` must equal the kernel grid size. Returns `NE_STATUS_NON_FINITE` and leaves the
/// last finite state in `u` if the iteration overflows.
///
/// # Safety
/// `kernel` must be a live handle and `u` valid for `len` reads and writes.
#[no_mangle]
pub unsafe extern "C" fn ne_euler_run(
    kernel: *const NeKernel,
    dt: f64,
    n_steps: usize,
    path: u32,
    u: *mut f64,
    len: usize,
) -> NeStatus {
    guard(|| {
        let pk = kernel_ref(kernel)?;
        if u.is_null() {
            return Err(null("u"));
        }
        if len != pk.n_points() {
            return Err(Fail(NeStatus::BufferSize, format!("buffer holds {len}, kernel grid is {}", pk.n_points())));
        }
        let path = match path {
            p if p == NeRhsPath::Direct as u32 => RhsPath::Direct,
            p if p == NeRhsPath::Convolution as u32 => RhsPath::Convolution,
            p => return Err(Fail(NeStatus::InvalidArgument, format!("unknown rhs path {p}"))),
        };
        let values = std::slice::from_raw_parts_mut(u, len);
        let mut stepper = EulerStepper::new(pk, dt, path)?;
        let mut state: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        for step in 1..=n_steps {
            stepper.step(&mut state)?;
            if state.iter().any(|z| !z.re.is_finite()) {
                return Err(Error::NonFinite { step }.into());
            }
            for (v, z) in values.iter_mut().zip(&state) {
                *v = z.re;
            }
        }
        Ok(())
    })
}
