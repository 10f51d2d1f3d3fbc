#ifndef AESTHETICA_H
#define AESTHETICA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Least-squares fit of bin proportions.
 */
#define AES_FIT_LEAST_SQUARES 0

/**
 * Maximum-likelihood fit of the raw counts.
 */
#define AES_FIT_MAXIMUM_LIKELIHOOD 1

/**
 * Result code of every fallible call.
 */
typedef enum AesStatus {
  AES_STATUS_OK = 0,
  AES_STATUS_NULL_POINTER = 1,
  AES_STATUS_INVALID_ARGUMENT = 2,
  AES_STATUS_DECODE = 3,
  AES_STATUS_IO = 4,
  AES_STATUS_SCRIPT = 5,
  AES_STATUS_STATS = 6,
  AES_STATUS_INTERNAL = 7,
} AesStatus;

/**
 * Opaque image handle.
 */
typedef struct AesImage AesImage;

/**
 * Fitted truncated-Gaussian valuation plus histogram summaries.
 */
typedef struct AesFit {
  double mu;
  double sigma;
  double sse;
  double mean;
  double median;
  double peak;
} AesFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread. Valid until the next call
 * into the library from the same thread; never null.
 */
const char *aes_last_error_message(void);

/**
 * Library version, a static NUL-terminated string.
 */
const char *aes_version(void);

/**
 * Loads a PNG or JPEG from disk.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AesStatus aes_image_load(const char *path, struct AesImage **out);

/**
 * Decodes an encoded PNG or JPEG held in memory.
 *
 * # Safety
 * `data` must point to `len` readable bytes and `out` must be valid.
 */
enum AesStatus aes_image_decode(const uint8_t *data, size_t len, struct AesImage **out);

/**
 * Wraps interleaved 8-bit sRGB samples (`width * height * 3` bytes).
 *
 * # Safety
 * `data` must point to `len` readable bytes and `out` must be valid.
 */
enum AesStatus aes_image_from_rgb8(uint32_t width,
                                   uint32_t height,
                                   const uint8_t *data,
                                   size_t len,
                                   struct AesImage **out);

/**
 * # Safety
 * `img` must be null or a handle from this library, freed at most once.
 */
void aes_image_free(struct AesImage *img);

/**
 * Width in pixels, or 0 for a null handle.
 *
 * # Safety
 * `img` must be null or a live handle.
 */
uint32_t aes_image_width(const struct AesImage *img);

/**
 * Height in pixels, or 0 for a null handle.
 *
 * # Safety
 * `img` must be null or a live handle.
 */
uint32_t aes_image_height(const struct AesImage *img);

/**
 * Copies the image as interleaved 8-bit sRGB into `buf`, which must hold
 * exactly `width * height * 3` bytes.
 *
 * # Safety
 * `buf` must point to `len` writable bytes.
 */
enum AesStatus aes_image_to_rgb8(const struct AesImage *img, uint8_t *buf, size_t len);

/**
 * Replays a manipulation script (JSON) and returns a new image.
 *
 * # Safety
 * `img` must be live, `script_json` NUL-terminated and `out` valid.
 */
enum AesStatus aes_image_apply_script(const struct AesImage *img,
                                      const char *script_json,
                                      struct AesImage **out);

/**
 * Encodes the image as an 8-bit RGB PNG. Release with [`aes_bytes_free`].
 *
 * # Safety
 * `out` and `out_len` must be valid pointers.
 */
enum AesStatus aes_image_encode_png(const struct AesImage *img, uint8_t **out, size_t *out_len);

/**
 * # Safety
 * `data`/`len` must come from [`aes_image_encode_png`], freed at most once.
 */
void aes_bytes_free(uint8_t *data, size_t len);

/**
 * Content id of the image (16 hex digits). Release with [`aes_string_free`].
 *
 * # Safety
 * `img` must be live and `out` valid.
 */
enum AesStatus aes_image_content_id(const struct AesImage *img, char **out);

/**
 * Every metric as a JSON object keyed by column name; undefined metrics
 * are `null`. Release with [`aes_string_free`].
 *
 * # Safety
 * `img` must be live, `image_id` null or NUL-terminated, `out` valid.
 */
enum AesStatus aes_image_metrics_json(const struct AesImage *img, const char *image_id, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void aes_string_free(char *s);

/**
 * Fits a truncated Gaussian to five Likert bin counts.
 *
 * # Safety
 * `counts` must point to 5 values and `out` must be valid.
 */
enum AesStatus aes_fit_histogram(const uint64_t *counts, uint32_t objective, struct AesFit *out);

/**
 * Pearson correlation with a two-sided p-value.
 *
 * # Safety
 * `x` and `y` must each point to `n` values; `r` and `p` must be valid.
 */
enum AesStatus aes_pearson(const double *x, const double *y, size_t n, double *r, double *p);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AESTHETICA_H */
