use std::io::Cursor;
use std::path::Path;

use image::{DynamicImage, ImageFormat, RgbImage};

use super::color::convert;
use super::raster::{ColorSpace, Plane, RasterImage};
use super::ImagingError;

/// Decodes an encoded image into three unit-scaled sRGB planes.
///
/// No minimum size is enforced here; [`load_image`] and [`decode_image`]
/// apply the [`RasterImage`] invariants on top.
pub fn decode_planes(bytes: &[u8]) -> Result<Vec<Plane>, ImagingError> {
    let dynamic = image::load_from_memory(bytes).map_err(|e| match e {
        image::ImageError::Unsupported(u) => ImagingError::UnsupportedFormat(u.to_string()),
        other => ImagingError::Decode(other.to_string()),
    })?;
    Ok(planes_from_dynamic(&dynamic))
}

fn planes_from_dynamic(dynamic: &DynamicImage) -> Vec<Plane> {
    let (w, h) = (dynamic.width() as usize, dynamic.height() as usize);
    let n = w * h;
    let mut planes = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let sixteen_bit = matches!(
        dynamic,
        DynamicImage::ImageLuma16(_)
            | DynamicImage::ImageLumaA16(_)
            | DynamicImage::ImageRgb16(_)
            | DynamicImage::ImageRgba16(_)
    );
    if sixteen_bit {
        let rgb = dynamic.to_rgb16();
        for (i, px) in rgb.pixels().enumerate() {
            for c in 0..3 {
                planes[c][i] = f64::from(px.0[c]) / 65535.0;
            }
        }
    } else {
        let rgb = dynamic.to_rgb8();
        for (i, px) in rgb.pixels().enumerate() {
            for c in 0..3 {
                planes[c][i] = f64::from(px.0[c]) / 255.0;
            }
        }
    }
    planes
        .into_iter()
        .map(|d| Plane::new(w, h, d).expect("decoded plane size"))
        .collect()
}

pub fn decode_image(bytes: &[u8]) -> Result<RasterImage, ImagingError> {
    RasterImage::new(ColorSpace::SrgbUnit, decode_planes(bytes)?)
}

/// Loads a PNG or JPEG file as an sRGB image with values in [0, 1].
pub fn load_image(path: impl AsRef<Path>) -> Result<RasterImage, ImagingError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| ImagingError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    decode_image(&bytes)
}

/// Quantizes to 8-bit sRGB.
pub fn to_rgb8(img: &RasterImage) -> Result<RgbImage, ImagingError> {
    let srgb = convert(img, ColorSpace::SrgbUnit)?;
    let (w, h) = (srgb.width(), srgb.height());
    let mut buf = Vec::with_capacity(w * h * 3);
    for i in 0..srgb.pixel_count() {
        for v in srgb.pixel(i) {
            buf.push((v.clamp(0.0, 1.0) * 255.0).round() as u8);
        }
    }
    Ok(RgbImage::from_raw(w as u32, h as u32, buf).expect("rgb buffer size"))
}

/// 8-bit sRGB PNG encoding.
pub fn encode_png(img: &RasterImage) -> Result<Vec<u8>, ImagingError> {
    let rgb = to_rgb8(img)?;
    let mut out = Cursor::new(Vec::new());
    rgb.write_to(&mut out, ImageFormat::Png)
        .map_err(|e| ImagingError::Encode(e.to_string()))?;
    Ok(out.into_inner())
}

pub fn save_png(img: &RasterImage, path: impl AsRef<Path>) -> Result<(), ImagingError> {
    let path = path.as_ref();
    let bytes = encode_png(img)?;
    std::fs::write(path, bytes).map_err(|e| ImagingError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
