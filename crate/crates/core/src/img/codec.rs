//! PNG / baseline-JPEG ingestion and 8-bit export.

use std::io::Cursor;
use std::path::Path;

use image::codecs::jpeg::JpegEncoder;
use image::{DynamicImage, ImageFormat};

use super::tensor::ImageTensor;
use crate::error::{Error, Result};

/// Decodes a PNG or baseline JPEG byte stream. 8-bit samples map to `v / 255`.
/// Alpha channels are dropped.
pub fn decode_image(bytes: &[u8]) -> Result<ImageTensor> {
    let format = image::guess_format(bytes).map_err(|e| Error::Decode {
        stage: "signature",
        detail: e.to_string(),
    })?;
    if !matches!(format, ImageFormat::Png | ImageFormat::Jpeg) {
        return Err(Error::Decode {
            stage: "signature",
            detail: format!("unsupported container {format:?}"),
        });
    }
    let dynamic = image::load_from_memory_with_format(bytes, format).map_err(|e| Error::Decode {
        stage: if format == ImageFormat::Png {
            "png"
        } else {
            "jpeg"
        },
        detail: e.to_string(),
    })?;
    from_dynamic(dynamic)
}

pub fn read_image(path: impl AsRef<Path>) -> Result<ImageTensor> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::from(e).at_path(path))?;
    decode_image(&bytes).map_err(|e| e.at_path(path))
}

fn from_dynamic(dynamic: DynamicImage) -> Result<ImageTensor> {
    let (w, h) = (dynamic.width() as usize, dynamic.height() as usize);
    let (channels, raw): (usize, Vec<u8>) = match dynamic {
        DynamicImage::ImageLuma8(b) => (1, b.into_raw()),
        DynamicImage::ImageLumaA8(_) => (1, dynamic.to_luma8().into_raw()),
        DynamicImage::ImageRgb8(b) => (3, b.into_raw()),
        DynamicImage::ImageRgba8(_) => (3, dynamic.to_rgb8().into_raw()),
        other => {
            return Err(Error::Decode {
                stage: "color",
                detail: format!("unsupported sample layout {:?}", other.color()),
            })
        }
    };
    let mut data = vec![0.0; channels * h * w];
    for (i, px) in raw.chunks_exact(channels).enumerate() {
        for (c, &v) in px.iter().enumerate() {
            data[c * h * w + i] = f64::from(v) / 255.0;
        }
    }
    ImageTensor::new(channels, h, w, data)
}

/// Rounds samples to 8-bit, interleaved.
pub fn to_u8_interleaved(x: &ImageTensor) -> Vec<u8> {
    let (c, h, w) = x.shape();
    let mut out = vec![0u8; c * h * w];
    for ch in 0..c {
        for (i, &v) in x.plane(ch).iter().enumerate() {
            out[i * c + ch] = (v.clamp(0.0, 1.0) * 255.0).round() as u8;
        }
    }
    out
}

/// Snaps every sample to the nearest 8-bit level.
pub fn quantize_u8(x: &ImageTensor) -> ImageTensor {
    x.map(|v| (v.clamp(0.0, 1.0) * 255.0).round() / 255.0)
}

fn to_dynamic(x: &ImageTensor) -> Result<DynamicImage> {
    let (c, h, w) = x.shape();
    let raw = to_u8_interleaved(x);
    let (w, h) = (w as u32, h as u32);
    let img = match c {
        1 => image::GrayImage::from_raw(w, h, raw).map(DynamicImage::ImageLuma8),
        3 => image::RgbImage::from_raw(w, h, raw).map(DynamicImage::ImageRgb8),
        _ => return Err(Error::UnsupportedChannels(c)),
    };
    img.ok_or_else(|| Error::Encode("buffer size mismatch".into()))
}

pub fn encode_png(x: &ImageTensor) -> Result<Vec<u8>> {
    let mut buf = Cursor::new(Vec::new());
    to_dynamic(x)?
        .write_to(&mut buf, ImageFormat::Png)
        .map_err(|e| Error::Encode(e.to_string()))?;
    Ok(buf.into_inner())
}

/// Baseline JPEG at `quality` (1..=100, libjpeg table scaling).
pub fn encode_jpeg(x: &ImageTensor, quality: u8) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    let enc = JpegEncoder::new_with_quality(&mut buf, quality.clamp(1, 100));
    to_dynamic(x)?
        .write_with_encoder(enc)
        .map_err(|e| Error::Encode(e.to_string()))?;
    Ok(buf)
}

pub fn write_png(x: &ImageTensor, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_png(x)?).map_err(|e| Error::from(e).at_path(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn png_gray(w: u32, h: u32, px: &[u8]) -> Vec<u8> {
        let img = image::GrayImage::from_raw(w, h, px.to_vec()).unwrap();
        let mut buf = Cursor::new(Vec::new());
        DynamicImage::ImageLuma8(img)
            .write_to(&mut buf, ImageFormat::Png)
            .unwrap();
        buf.into_inner()
    }

    #[test]
    fn white_pixel_decodes_to_ones() {
        let img = image::RgbImage::from_raw(1, 1, vec![255, 255, 255]).unwrap();
        let mut buf = Cursor::new(Vec::new());
        DynamicImage::ImageRgb8(img)
            .write_to(&mut buf, ImageFormat::Png)
            .unwrap();
        let x = decode_image(buf.get_ref()).unwrap();
        assert_eq!(x.shape(), (3, 1, 1));
        assert!(x.data().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn linear_eight_bit_mapping() {
        let x = decode_image(&png_gray(2, 2, &[0, 85, 170, 255])).unwrap();
        let want = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];
        for (a, b) in x.data().iter().zip(want) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn truncated_stream_is_an_error() {
        let bytes = png_gray(4, 4, &[7; 16]);
        let err = decode_image(&bytes[..bytes.len() / 2]).unwrap_err();
        assert!(matches!(err, Error::Decode { .. }), "{err}");
        assert!(decode_image(&[]).is_err());
        assert!(decode_image(b"GIF89a").is_err());
    }

    #[test]
    fn png_round_trip_is_sample_exact() {
        let px: Vec<u8> = (0..48).map(|i| (i * 5) as u8).collect();
        let img = image::RgbImage::from_raw(4, 4, px).unwrap();
        let mut buf = Cursor::new(Vec::new());
        DynamicImage::ImageRgb8(img)
            .write_to(&mut buf, ImageFormat::Png)
            .unwrap();
        let a = decode_image(buf.get_ref()).unwrap();
        let b = decode_image(&encode_png(&a).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn jpeg_decodes_with_same_shape() {
        let x = ImageTensor::filled(3, 16, 24, 0.5);
        let y = decode_image(&encode_jpeg(&x, 90).unwrap()).unwrap();
        assert_eq!(y.shape(), x.shape());
    }
}
