//! Image representation, codecs, color conversion and resampling.

mod border;
mod codec;
mod resize;
mod sidt;
mod tensor;

pub(crate) use border::{correlate3x3, reflect101, symmetric};
pub use codec::{
    decode_image, encode_jpeg, encode_png, quantize_u8, read_image, to_u8_interleaved, write_png,
};
pub use resize::{bilinear_resize, nearest_resize};
pub(crate) use sidt::read_u32;
pub use sidt::{decode_sidt, encode_sidt, read_sidt, write_sidt, SIDT_MAGIC, SIDT_VERSION};
pub use tensor::{to_gray, GrayImage, ImageTensor, LUMA_WEIGHTS};
