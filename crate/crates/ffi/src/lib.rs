//! C ABI for melnikov-lab.
//!
//! Objects are opaque handles created by `ml_*_new`/`ml_*_from_*` functions and released
//! with the matching `ml_*_free`. Every fallible call returns an [`MlStatus`]; on failure
//! `ml_last_error_message` describes the error until the next call on the same thread.
//! Strings returned through `char**` are released with `ml_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use melnikov_lab::closed::{eval_m1, eval_n1};
use melnikov_lab::designer::{self, Configuration, Target, ZeroTarget};
use melnikov_lab::error::Error;
use melnikov_lab::perturbation::{melnikov_params, params_to_perturbation, reflect, MelnikovParams, PerturbationSpec};
use melnikov_lab::pwsim::{self, CycleReport, Nest, SimConfig};
use melnikov_lab::quadrature::{builtin_system, melnikov_quadrature, Model, QuadratureConfig};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MlStatus {
    Ok = 0,
    NullPointer = 1,
    /// Argument outside its domain or otherwise invalid.
    InvalidArgument = 2,
    /// Malformed perturbation JSON or tables.
    InvalidSpec = 3,
    /// Request outside what the library supports (degree, configuration table).
    Unsupported = 4,
    /// A numerical certification did not succeed.
    CertificationFailed = 5,
    /// Sliding, escape or step exhaustion in the simulator.
    SimulationFailed = 6,
    /// A buffer passed by the caller is too small.
    BufferTooSmall = 7,
    /// Internal error; the library caught a panic.
    Internal = 8,
}

/// Perturbation `R±` of degree `m`.
pub struct MlSpec(PerturbationSpec);

/// Limit cycles found by the simulator.
pub struct MlCycles(Vec<CycleReport>);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MlParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub rho: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct MlConfiguration {
    pub m1: usize,
    pub n1: usize,
    pub certified: bool,
}

/// `which`: 0 for a zero of `r·M₁`, 1 for a zero of `r·N₁`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MlZeroTarget {
    pub location: f64,
    pub which: u32,
}

/// `nest`: 0 for the left center `z = -1`, 1 for the right center `z = +1`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MlSimConfig {
    pub epsilon: f64,
    pub rk_tol: f64,
    pub event_tol: f64,
    pub max_steps: usize,
    pub nest: u32,
    pub allow_large_epsilon: bool,
}

/// A reported cycle; `predicted_r0` and `deviation` are NaN when no certified zero exists.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MlCycleReport {
    pub section_point: f64,
    pub radius_in_w: f64,
    pub predicted_r0: f64,
    pub deviation: f64,
    pub p_prime: f64,
    pub stable: bool,
    pub hyperbolic: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> MlStatus {
    match e {
        Error::InvalidSpec(_) | Error::Json(_) => MlStatus::InvalidSpec,
        Error::UnsupportedDegree { .. } | Error::Unsupported(_) | Error::NotSupported { .. } => MlStatus::Unsupported,
        Error::Sliding { .. } | Error::StepLimit(_) | Error::StepUnderflow(_) | Error::Escape(_) => MlStatus::SimulationFailed,
        e if e.is_certification_failure() => MlStatus::CertificationFailed,
        _ => MlStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (MlStatus, String)>) -> MlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            MlStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal error");
            MlStatus::Internal
        }
    }
}

fn lib<T>(r: melnikov_lab::Result<T>) -> Result<T, (MlStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (MlStatus, String) {
    (MlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn spec_ref<'a>(p: *const MlSpec) -> Result<&'a PerturbationSpec, (MlStatus, String)> {
    p.as_ref().map(|s| &s.0).ok_or_else(|| null("spec"))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (MlStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

fn nest_of(n: u32) -> Result<Nest, (MlStatus, String)> {
    match n {
        0 => Ok(Nest::Left),
        1 => Ok(Nest::Right),
        _ => Err((MlStatus::InvalidArgument, format!("nest {n} is not 0 or 1"))),
    }
}

fn to_params(p: &MlParams) -> MelnikovParams {
    MelnikovParams { a: p.a, b: p.b, c: p.c, d: p.d, alpha: p.alpha, beta: p.beta, gamma: p.gamma, kappa: p.kappa, rho: p.rho }
}

fn from_params(p: &MelnikovParams) -> MlParams {
    MlParams { a: p.a, b: p.b, c: p.c, d: p.d, alpha: p.alpha, beta: p.beta, gamma: p.gamma, kappa: p.kappa, rho: p.rho }
}

fn from_configuration(c: Configuration) -> MlConfiguration {
    MlConfiguration { m1: c.m1, n1: c.n1, certified: c.certified }
}

/// Message describing the last failure on this thread; empty after a success.
#[no_mangle]
pub extern "C" fn ml_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ml_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ml_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ml_spec_zero(m: usize, holomorphic: bool, out: *mut *mut MlSpec) -> MlStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = Box::into_raw(Box::new(MlSpec(PerturbationSpec::zero(m, holomorphic))));
        Ok(())
    })
}

/// Parses and validates a perturbation in the JSON schema used by the command line.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ml_spec_from_json(json: *const c_char, out: *mut *mut MlSpec) -> MlStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|_| (MlStatus::InvalidSpec, "json is not UTF-8".to_string()))?;
        let spec = lib(PerturbationSpec::from_json(text))?;
        *out = Box::into_raw(Box::new(MlSpec(spec)));
        Ok(())
    })
}

/// # Safety
/// `spec` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ml_spec_to_json(spec: *const MlSpec, out: *mut *mut c_char) -> MlStatus {
    guard(|| {
        let spec = spec_ref(spec)?;
        let out = out_ptr(out, "out")?;
        *out = CString::new(spec.to_json()).expect("JSON has no NUL").into_raw();
        Ok(())
    })
}

/// # Safety
/// `spec` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ml_spec_free(spec: *mut MlSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// The spec whose `M₁` is the `N₁` of `spec`.
///
/// # Safety
/// `spec` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ml_spec_reflect(spec: *const MlSpec, out: *mut *mut MlSpec) -> MlStatus {
    guard(|| {
        let spec = spec_ref(spec)?;
        let out = out_ptr(out, "out")?;
        *out = Box::into_raw(Box::new(MlSpec(reflect(spec))));
        Ok(())
    })
}

/// # Safety
/// `spec` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ml_spec_params(spec: *const MlSpec, out: *mut MlParams) -> MlStatus {
    guard(|| {
        let spec = spec_ref(spec)?;
        let out = out_ptr(out, "out")?;
        *out = from_params(&lib(melnikov_params(spec))?);
        Ok(())
    })
}

/// # Safety
/// `params` must be readable and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ml_params_to_spec(params: *const MlParams, m: usize, holomorphic: bool, out: *mut *mut MlSpec) -> MlStatus {
    guard(|| {
        let p = params.as_ref().ok_or_else(|| null("params"))?;
        let out = out_ptr(out, "out")?;
        let spec = lib(params_to_perturbation(&to_params(p), m, holomorphic))?;
        *out = Box::into_raw(Box::new(MlSpec(spec)));
        Ok(())
    })
}

/// Closed-form `M₁(r)` and `N₁(r)`.
///
/// # Safety
/// `spec` must be a live handle; `m1` and `n1` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ml_eval(spec: *const MlSpec, r: f64, m1: *mut f64, n1: *mut f64) -> MlStatus {
    guard(|| {
        let spec = spec_ref(spec)?;
        let (m1, n1) = (out_ptr(m1, "m1")?, out_ptr(n1, "n1")?);
        let p = lib(melnikov_params(spec))?;
        *m1 = lib(eval_m1(&p, r))?;
        *n1 = lib(eval_n1(&p, r))?;
        Ok(())
    })
}

/// Averaged function of one nest by adaptive quadrature (any degree).
///
/// # Safety
/// `spec` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ml_quadrature(spec: *const MlSpec, r: f64, nest: u32, out: *mut f64) -> MlStatus {
    guard(|| {
        let spec = spec_ref(spec)?;
        let out = out_ptr(out, "out")?;
        let model = match nest_of(nest)? {
            Nest::Left => Model::HalfIZ2Minus1Left,
            Nest::Right => Model::HalfIZ2Minus1Right,
        };
        *out = lib(melnikov_quadrature(&builtin_system(model), spec, r, &QuadratureConfig::default()))?.m1;
        Ok(())
    })
}

/// Certified zero counts of `M₁` and `N₁` in `(0,1)`.
///
/// # Safety
/// `spec` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ml_verify(spec: *const MlSpec, out: *mut MlConfiguration) -> MlStatus {
    guard(|| {
        let spec = spec_ref(spec)?;
        let out = out_ptr(out, "out")?;
        *out = from_configuration(lib(designer::verify_spec(spec))?);
        Ok(())
    })
}

/// Zero locations of `M₁` (`which = 0`) or `N₁` (`which = 1`) in `(0,1)`.
///
/// # Safety
/// `spec` must be a live handle, `buf` writable for `cap` doubles (or null when `cap` is
/// zero), `count` and `certified` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ml_zeros(spec: *const MlSpec, which: u32, buf: *mut f64, cap: usize, count: *mut usize, certified: *mut bool) -> MlStatus {
    guard(|| {
        let spec = spec_ref(spec)?;
        let count = out_ptr(count, "count")?;
        let certified = out_ptr(certified, "certified")?;
        let p = lib(melnikov_params(spec))?;
        let (rm, rn) = lib(designer::verify_reports(&p, spec.m(), spec.holomorphic()))?;
        let rep = match which {
            0 => rm,
            1 => rn,
            _ => return Err((MlStatus::InvalidArgument, format!("which {which} is not 0 or 1"))),
        };
        *count = rep.zeros.len();
        *certified = rep.certified_simple_count().is_some();
        if rep.zeros.len() > cap {
            return Err((MlStatus::BufferTooSmall, format!("{} zeros do not fit in {cap}", rep.zeros.len())));
        }
        if !rep.zeros.is_empty() {
            if buf.is_null() {
                return Err(null("buf"));
            }
            for (k, z) in rep.zeros.iter().enumerate() {
                *buf.add(k) = z.location;
            }
        }
        Ok(())
    })
}

/// Solves for the parameters placing zeros at `targets`.
///
/// # Safety
/// `targets` must be readable for `n` entries and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ml_design(targets: *const MlZeroTarget, n: usize, m: usize, holomorphic: bool, out: *mut MlParams) -> MlStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if targets.is_null() && n > 0 {
            return Err(null("targets"));
        }
        let raw = if n == 0 { &[][..] } else { std::slice::from_raw_parts(targets, n) };
        let t: Vec<ZeroTarget> = raw
            .iter()
            .map(|t| {
                let which = match t.which {
                    0 => Target::F,
                    1 => Target::G,
                    w => return Err((MlStatus::InvalidArgument, format!("target kind {w} is not 0 or 1"))),
                };
                Ok(ZeroTarget { location: t.location, which })
            })
            .collect::<Result<_, _>>()?;
        *out = from_params(&lib(designer::design(&t, m, holomorphic))?);
        Ok(())
    })
}

/// A perturbation with certified configuration `[[i,j]]`, reproducible from `seed`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ml_realize(i: usize, j: usize, m: usize, holomorphic: bool, seed: u64, out: *mut *mut MlSpec) -> MlStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let spec = lib(designer::realize_seeded(i, j, m, holomorphic, seed))?;
        *out = Box::into_raw(Box::new(MlSpec(spec)));
        Ok(())
    })
}

/// Defaults: `ε = 1e-3`, tolerances `1e-10`/`1e-12`, left nest.
#[no_mangle]
pub extern "C" fn ml_sim_config_default() -> MlSimConfig {
    let d = SimConfig::default();
    MlSimConfig { epsilon: d.epsilon, rk_tol: d.rk_tol, event_tol: d.event_tol, max_steps: d.max_steps, nest: 0, allow_large_epsilon: false }
}

/// One return to the section of the configured nest.
///
/// # Safety
/// `spec` and `cfg` must be readable and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ml_poincare_map(spec: *const MlSpec, cfg: *const MlSimConfig, x0: f64, out: *mut f64) -> MlStatus {
    guard(|| {
        let spec = spec_ref(spec)?;
        let cfg = sim_config(cfg)?;
        let out = out_ptr(out, "out")?;
        *out = lib(pwsim::poincare_map(spec, &cfg, x0))?;
        Ok(())
    })
}

unsafe fn sim_config(cfg: *const MlSimConfig) -> Result<SimConfig, (MlStatus, String)> {
    let c = cfg.as_ref().ok_or_else(|| null("cfg"))?;
    Ok(SimConfig {
        epsilon: c.epsilon,
        rk_tol: c.rk_tol,
        event_tol: c.event_tol,
        max_steps: c.max_steps,
        nest: nest_of(c.nest)?,
        allow_large_epsilon: c.allow_large_epsilon,
    })
}

/// Fixed points of the return map for `w`-radii in `(r_lo, r_hi)`.
///
/// # Safety
/// `spec` and `cfg` must be readable and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ml_find_cycles(spec: *const MlSpec, cfg: *const MlSimConfig, r_lo: f64, r_hi: f64, n_seeds: usize, out: *mut *mut MlCycles) -> MlStatus {
    guard(|| {
        let spec = spec_ref(spec)?;
        let cfg = sim_config(cfg)?;
        let out = out_ptr(out, "out")?;
        let found = lib(pwsim::find_limit_cycles(spec, &cfg, (r_lo, r_hi), n_seeds))?;
        *out = Box::into_raw(Box::new(MlCycles(found.cycles)));
        Ok(())
    })
}

/// # Safety
/// `cycles` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ml_cycles_len(cycles: *const MlCycles) -> usize {
    cycles.as_ref().map_or(0, |c| c.0.len())
}

/// # Safety
/// `cycles` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ml_cycles_get(cycles: *const MlCycles, index: usize, out: *mut MlCycleReport) -> MlStatus {
    guard(|| {
        let cycles = cycles.as_ref().ok_or_else(|| null("cycles"))?;
        let out = out_ptr(out, "out")?;
        let c = cycles.0.get(index).ok_or_else(|| (MlStatus::InvalidArgument, format!("index {index} out of range")))?;
        *out = MlCycleReport {
            section_point: c.section_point,
            radius_in_w: c.radius_in_w,
            predicted_r0: c.predicted_r0.unwrap_or(f64::NAN),
            deviation: c.deviation.unwrap_or(f64::NAN),
            p_prime: c.p_prime,
            stable: c.stable,
            hyperbolic: c.hyperbolic,
        };
        Ok(())
    })
}

/// # Safety
/// `cycles` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ml_cycles_free(cycles: *mut MlCycles) {
    if !cycles.is_null() {
        drop(Box::from_raw(cycles));
    }
}

#[cfg(test)]
mod tests {
    use std::ptr;

    use super::*;

    fn last_error() -> String {
        unsafe { CStr::from_ptr(ml_last_error_message()) }.to_string_lossy().into_owned()
    }

    #[test]
    fn status_mapping() {
        assert_eq!(status_of(&Error::InvalidSpec("x".into())), MlStatus::InvalidSpec);
        assert_eq!(status_of(&Error::NonConvergence("x".into())), MlStatus::CertificationFailed);
        assert_eq!(status_of(&Error::Domain("x".into())), MlStatus::InvalidArgument);
        assert_eq!(status_of(&Error::StepLimit(3)), MlStatus::SimulationFailed);
    }

    #[test]
    fn null_pointers_are_reported() {
        unsafe {
            assert_eq!(ml_spec_zero(1, false, ptr::null_mut()), MlStatus::NullPointer);
            assert!(last_error().contains("out"));
            let mut c = MlConfiguration::default();
            assert_eq!(ml_verify(ptr::null(), &mut c), MlStatus::NullPointer);
        }
    }

    #[test]
    fn error_message_clears_on_success() {
        unsafe {
            let mut s = ptr::null_mut();
            assert_eq!(ml_spec_from_json(c"{".as_ptr(), &mut s), MlStatus::InvalidSpec);
            assert!(!last_error().is_empty());
            assert_eq!(ml_spec_zero(0, false, &mut s), MlStatus::Ok);
            assert!(last_error().is_empty());
            ml_spec_free(s);
        }
    }
}
