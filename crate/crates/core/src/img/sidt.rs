//! `SIDT` tensor dumps: magic, u32 version, u32 C/H/W, then C·H·W
//! little-endian f32 samples, channel-planar, row-major.

use std::path::Path;

use super::tensor::ImageTensor;
use crate::error::{Error, Result};

pub const SIDT_MAGIC: &[u8; 4] = b"SIDT";
pub const SIDT_VERSION: u32 = 1;
const HEADER_LEN: usize = 20;

pub fn encode_sidt(x: &ImageTensor) -> Vec<u8> {
    let (c, h, w) = x.shape();
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * x.data().len());
    out.extend_from_slice(SIDT_MAGIC);
    for v in [SIDT_VERSION, c as u32, h as u32, w as u32] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for &v in x.data() {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    out
}

fn malformed(offset: usize, detail: impl Into<String>) -> Error {
    Error::Format {
        format: "SIDT",
        offset,
        detail: detail.into(),
    }
}

pub(crate) fn read_u32(bytes: &[u8], offset: usize, format: &'static str) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_le_bytes(b.try_into().unwrap()))
        .ok_or_else(|| Error::Format {
            format,
            offset,
            detail: "truncated header".into(),
        })
}

pub fn decode_sidt(bytes: &[u8]) -> Result<ImageTensor> {
    if bytes.get(..4) != Some(SIDT_MAGIC.as_slice()) {
        return Err(malformed(0, "bad magic"));
    }
    let version = read_u32(bytes, 4, "SIDT")?;
    if version != SIDT_VERSION {
        return Err(malformed(4, format!("unsupported version {version}")));
    }
    let c = read_u32(bytes, 8, "SIDT")? as usize;
    let h = read_u32(bytes, 12, "SIDT")? as usize;
    let w = read_u32(bytes, 16, "SIDT")? as usize;
    let n = c
        .checked_mul(h)
        .and_then(|v| v.checked_mul(w))
        .filter(|&n| n > 0)
        .ok_or_else(|| malformed(8, format!("invalid shape {c}x{h}x{w}")))?;
    let payload = &bytes[HEADER_LEN..];
    if n.checked_mul(4) != Some(payload.len()) {
        return Err(malformed(
            HEADER_LEN,
            format!("expected {n} samples, found {} bytes", payload.len()),
        ));
    }
    let mut data = Vec::with_capacity(n);
    for (i, b) in payload.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(b.try_into().unwrap());
        if !v.is_finite() {
            return Err(malformed(HEADER_LEN + 4 * i, "non-finite sample"));
        }
        data.push(f64::from(v));
    }
    ImageTensor::new(c, h, w, data)
}

pub fn write_sidt(x: &ImageTensor, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_sidt(x)).map_err(|e| Error::from(e).at_path(path))
}

pub fn read_sidt(path: impl AsRef<Path>) -> Result<ImageTensor> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::from(e).at_path(path))?;
    decode_sidt(&bytes).map_err(|e| e.at_path(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let x = ImageTensor::from_fn(1, 2, 3, |_, y, x| (y * 3 + x) as f64);
        let b = encode_sidt(&x);
        assert_eq!(&b[..4], b"SIDT");
        assert_eq!(&b[4..8], &1u32.to_le_bytes());
        assert_eq!(&b[8..12], &1u32.to_le_bytes());
        assert_eq!(&b[12..16], &2u32.to_le_bytes());
        assert_eq!(&b[16..20], &3u32.to_le_bytes());
        assert_eq!(&b[24..28], &1.0f32.to_le_bytes());
        assert_eq!(b.len(), 20 + 6 * 4);
    }

    #[test]
    fn rejects_corrupt_streams() {
        let b = encode_sidt(&ImageTensor::zeros(1, 2, 2));
        assert!(decode_sidt(&b[..b.len() - 1]).is_err());
        assert!(decode_sidt(&b[..10]).is_err());
        let mut bad = b.clone();
        bad[0] = b'X';
        assert!(decode_sidt(&bad).is_err());
        let mut huge = b.clone();
        huge[8..12].copy_from_slice(&u32::MAX.to_le_bytes());
        huge[12..16].copy_from_slice(&u32::MAX.to_le_bytes());
        assert!(decode_sidt(&huge).is_err());
        let mut nan = b;
        nan[20..24].copy_from_slice(&f32::NAN.to_le_bytes());
        assert!(matches!(decode_sidt(&nan), Err(Error::Format { offset: 20, .. })));
    }

    proptest! {
        #[test]
        fn round_trip_at_f32_precision(
            c in 1usize..4, h in 1usize..6, w in 1usize..6,
            vals in prop::collection::vec(-4.0f64..4.0, 144),
        ) {
            let x = ImageTensor::from_fn(c, h, w, |ch, y, xx| vals[(ch * 6 + y) * 6 + xx]);
            let y = decode_sidt(&encode_sidt(&x)).unwrap();
            prop_assert_eq!(y.shape(), x.shape());
            for (a, b) in x.data().iter().zip(y.data()) {
                prop_assert_eq!(*a as f32, *b as f32);
            }
        }
    }
}
