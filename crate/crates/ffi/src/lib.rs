//! C ABI over the aesthetica engine.
//!
//! Every fallible call returns an [`AesStatus`]; on failure a message is
//! available from [`aes_last_error_message`] on the same thread. Objects
//! returned through out-pointers are owned by the caller and released with
//! the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use aesthetica::dataset::image_content_id;
use aesthetica::imaging::{decode_image, encode_png, load_image, to_rgb8, ColorSpace, Plane, RasterImage, MIN_SIDE};
use aesthetica::metrics::compute_all;
use aesthetica::stats::{fit_truncated_gaussian_with, pearson, FitObjective, LikertHistogram};
use aesthetica::uglifier::{apply_script, ManipulationScript};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AesStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Decode = 3,
    Io = 4,
    Script = 5,
    Stats = 6,
    Internal = 7,
}

/// Opaque image handle.
pub struct AesImage {
    inner: RasterImage,
}

/// Fitted truncated-Gaussian valuation plus histogram summaries.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AesFit {
    pub mu: f64,
    pub sigma: f64,
    pub sse: f64,
    pub mean: f64,
    pub median: f64,
    pub peak: f64,
}

/// Least-squares fit of bin proportions.
pub const AES_FIT_LEAST_SQUARES: u32 = 0;
/// Maximum-likelihood fit of the raw counts.
pub const AES_FIT_MAXIMUM_LIKELIHOOD: u32 = 1;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let msg = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

fn fail(status: AesStatus, message: impl std::fmt::Display) -> AesStatus {
    set_error(message.to_string());
    status
}

fn guard(f: impl FnOnce() -> AesStatus) -> AesStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(AesStatus::Internal, "internal panic"),
    }
}

unsafe fn c_str<'a>(p: *const c_char) -> Result<&'a str, AesStatus> {
    if p.is_null() {
        return Err(fail(AesStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(AesStatus::InvalidArgument, "string argument is not UTF-8"))
}

unsafe fn image<'a>(p: *const AesImage) -> Result<&'a RasterImage, AesStatus> {
    p.as_ref()
        .map(|h| &h.inner)
        .ok_or_else(|| fail(AesStatus::NullPointer, "null image handle"))
}

unsafe fn emit_image(out: *mut *mut AesImage, img: RasterImage) -> AesStatus {
    *out = Box::into_raw(Box::new(AesImage { inner: img }));
    AesStatus::Ok
}

unsafe fn emit_string(out: *mut *mut c_char, s: String) -> AesStatus {
    *out = CString::new(s).expect("json has no nul bytes").into_raw();
    AesStatus::Ok
}

macro_rules! check_out {
    ($($p:expr),+) => {
        $(if $p.is_null() {
            return fail(AesStatus::NullPointer, concat!("null pointer: ", stringify!($p)));
        })+
    };
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// Message for the last failure on this thread. Valid until the next call
/// into the library from the same thread; never null.
#[no_mangle]
pub extern "C" fn aes_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn aes_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads a PNG or JPEG from disk.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aes_image_load(path: *const c_char, out: *mut *mut AesImage) -> AesStatus {
    guard(|| {
        check_out!(out);
        let path = tri!(c_str(path));
        match load_image(path) {
            Ok(img) => emit_image(out, img),
            Err(e @ aesthetica::imaging::ImagingError::Io { .. }) => fail(AesStatus::Io, e),
            Err(e) => fail(AesStatus::Decode, e),
        }
    })
}

/// Decodes an encoded PNG or JPEG held in memory.
///
/// # Safety
/// `data` must point to `len` readable bytes and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn aes_image_decode(data: *const u8, len: usize, out: *mut *mut AesImage) -> AesStatus {
    guard(|| {
        check_out!(data, out);
        match decode_image(std::slice::from_raw_parts(data, len)) {
            Ok(img) => emit_image(out, img),
            Err(e) => fail(AesStatus::Decode, e),
        }
    })
}

/// Wraps interleaved 8-bit sRGB samples (`width * height * 3` bytes).
///
/// # Safety
/// `data` must point to `len` readable bytes and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn aes_image_from_rgb8(
    width: u32,
    height: u32,
    data: *const u8,
    len: usize,
    out: *mut *mut AesImage,
) -> AesStatus {
    guard(|| {
        check_out!(data, out);
        let (w, h) = (width as usize, height as usize);
        if w < MIN_SIDE || h < MIN_SIDE {
            return fail(AesStatus::InvalidArgument, format!("image {w}x{h} is smaller than {MIN_SIDE}x{MIN_SIDE}"));
        }
        if len != w * h * 3 {
            return fail(AesStatus::InvalidArgument, format!("expected {} bytes, got {len}", w * h * 3));
        }
        let bytes = std::slice::from_raw_parts(data, len);
        let planes = (0..3)
            .map(|c| Plane::from_fn(w, h, |x, y| bytes[(y * w + x) * 3 + c] as f64 / 255.0))
            .collect();
        match RasterImage::new(ColorSpace::SrgbUnit, planes) {
            Ok(img) => emit_image(out, img),
            Err(e) => fail(AesStatus::InvalidArgument, e),
        }
    })
}

/// # Safety
/// `img` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn aes_image_free(img: *mut AesImage) {
    if !img.is_null() {
        drop(Box::from_raw(img));
    }
}

/// Width in pixels, or 0 for a null handle.
///
/// # Safety
/// `img` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn aes_image_width(img: *const AesImage) -> u32 {
    img.as_ref().map_or(0, |h| h.inner.width() as u32)
}

/// Height in pixels, or 0 for a null handle.
///
/// # Safety
/// `img` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn aes_image_height(img: *const AesImage) -> u32 {
    img.as_ref().map_or(0, |h| h.inner.height() as u32)
}

/// Copies the image as interleaved 8-bit sRGB into `buf`, which must hold
/// exactly `width * height * 3` bytes.
///
/// # Safety
/// `buf` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn aes_image_to_rgb8(img: *const AesImage, buf: *mut u8, len: usize) -> AesStatus {
    guard(|| {
        check_out!(buf);
        let img = tri!(image(img));
        let rgb = match to_rgb8(img) {
            Ok(rgb) => rgb,
            Err(e) => return fail(AesStatus::Internal, e),
        };
        let raw = rgb.as_raw();
        if raw.len() != len {
            return fail(AesStatus::InvalidArgument, format!("buffer holds {len} bytes, image needs {}", raw.len()));
        }
        ptr::copy_nonoverlapping(raw.as_ptr(), buf, len);
        AesStatus::Ok
    })
}

/// Replays a manipulation script (JSON) and returns a new image.
///
/// # Safety
/// `img` must be live, `script_json` NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn aes_image_apply_script(
    img: *const AesImage,
    script_json: *const c_char,
    out: *mut *mut AesImage,
) -> AesStatus {
    guard(|| {
        check_out!(out);
        let img = tri!(image(img));
        let text = tri!(c_str(script_json));
        let script = match ManipulationScript::from_json(text) {
            Ok(s) => s,
            Err(e) => return fail(AesStatus::Script, e),
        };
        match apply_script(img, &script) {
            Ok(result) => emit_image(out, result),
            Err(e) => fail(AesStatus::Script, e),
        }
    })
}

/// Encodes the image as an 8-bit RGB PNG. Release with [`aes_bytes_free`].
///
/// # Safety
/// `out` and `out_len` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn aes_image_encode_png(img: *const AesImage, out: *mut *mut u8, out_len: *mut usize) -> AesStatus {
    guard(|| {
        check_out!(out, out_len);
        let img = tri!(image(img));
        match encode_png(img) {
            Ok(bytes) => {
                let boxed = bytes.into_boxed_slice();
                *out_len = boxed.len();
                *out = Box::into_raw(boxed).cast();
                AesStatus::Ok
            }
            Err(e) => fail(AesStatus::Internal, e),
        }
    })
}

/// # Safety
/// `data`/`len` must come from [`aes_image_encode_png`], freed at most once.
#[no_mangle]
pub unsafe extern "C" fn aes_bytes_free(data: *mut u8, len: usize) {
    if !data.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(data, len)));
    }
}

/// Content id of the image (16 hex digits). Release with [`aes_string_free`].
///
/// # Safety
/// `img` must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn aes_image_content_id(img: *const AesImage, out: *mut *mut c_char) -> AesStatus {
    guard(|| {
        check_out!(out);
        let img = tri!(image(img));
        emit_string(out, image_content_id(img))
    })
}

/// Every metric as a JSON object keyed by column name; undefined metrics
/// are `null`. Release with [`aes_string_free`].
///
/// # Safety
/// `img` must be live, `image_id` null or NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn aes_image_metrics_json(
    img: *const AesImage,
    image_id: *const c_char,
    out: *mut *mut c_char,
) -> AesStatus {
    guard(|| {
        check_out!(out);
        let img = tri!(image(img));
        let id = if image_id.is_null() { "" } else { tri!(c_str(image_id)) };
        let record = compute_all(img, id);
        match serde_json::to_string(&record) {
            Ok(json) => emit_string(out, json),
            Err(e) => fail(AesStatus::Internal, e),
        }
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn aes_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Fits a truncated Gaussian to five Likert bin counts.
///
/// # Safety
/// `counts` must point to 5 values and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn aes_fit_histogram(counts: *const u64, objective: u32, out: *mut AesFit) -> AesStatus {
    guard(|| {
        check_out!(counts, out);
        let kind = match objective {
            AES_FIT_LEAST_SQUARES => FitObjective::LeastSquares,
            AES_FIT_MAXIMUM_LIKELIHOOD => FitObjective::MaximumLikelihood,
            other => return fail(AesStatus::InvalidArgument, format!("unknown fit objective {other}")),
        };
        let mut bins = [0u64; 5];
        bins.copy_from_slice(std::slice::from_raw_parts(counts, 5));
        let hist = match LikertHistogram::new("", bins) {
            Ok(h) => h,
            Err(e) => return fail(AesStatus::Stats, e),
        };
        let fit = fit_truncated_gaussian_with(&hist, kind);
        *out = AesFit {
            mu: fit.mu,
            sigma: fit.sigma,
            sse: fit.sse,
            mean: fit.mean,
            median: fit.median,
            peak: fit.peak,
        };
        AesStatus::Ok
    })
}

/// Pearson correlation with a two-sided p-value.
///
/// # Safety
/// `x` and `y` must each point to `n` values; `r` and `p` must be valid.
#[no_mangle]
pub unsafe extern "C" fn aes_pearson(x: *const f64, y: *const f64, n: usize, r: *mut f64, p: *mut f64) -> AesStatus {
    guard(|| {
        check_out!(x, y, r, p);
        let xs = std::slice::from_raw_parts(x, n);
        let ys = std::slice::from_raw_parts(y, n);
        match pearson(xs, ys) {
            Ok(c) => {
                *r = c.r;
                *p = c.p;
                AesStatus::Ok
            }
            Err(e) => fail(AesStatus::Stats, e),
        }
    })
}
