//! 8-bit RGB images as PNG files.

use std::io::Cursor;
use std::path::Path;

use png::{BitDepth, ColorType, Decoder, Encoder};

use crate::error::{Error, Result};
use crate::raw::RgbImage;

/// 8-bit code of a sample, rounding half away from zero.
#[inline]
pub fn quantize_u8(x: f64) -> u8 {
    (x.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn encode_png(img: &RgbImage) -> Result<Vec<u8>> {
    let bytes: Vec<u8> = img.as_slice().iter().map(|&v| quantize_u8(v)).collect();
    let mut out = Vec::new();
    {
        let mut enc = Encoder::new(&mut out, img.width() as u32, img.height() as u32);
        enc.set_color(ColorType::Rgb);
        enc.set_depth(BitDepth::Eight);
        let mut writer = enc.write_header().map_err(|e| Error::Rgb(e.to_string()))?;
        writer
            .write_image_data(&bytes)
            .map_err(|e| Error::Rgb(e.to_string()))?;
        writer.finish().map_err(|e| Error::Rgb(e.to_string()))?;
    }
    Ok(out)
}

pub fn decode_png(bytes: &[u8]) -> Result<RgbImage> {
    let mut reader = Decoder::new(Cursor::new(bytes))
        .read_info()
        .map_err(|e| Error::Rgb(e.to_string()))?;
    let (color, depth) = reader.output_color_type();
    if color != ColorType::Rgb || depth != BitDepth::Eight {
        return Err(Error::Rgb(format!(
            "unsupported pixel format {color:?}/{depth:?}, expected 8-bit RGB"
        )));
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::Rgb("image too large".into()))?;
    let mut buf = vec![0u8; size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::Rgb(e.to_string()))?;
    buf.truncate(info.buffer_size());
    let (h, w) = (info.height as usize, info.width as usize);
    RgbImage::new(h, w, buf.iter().map(|&c| f64::from(c) / 255.0).collect())
}

pub fn write_png(path: &Path, img: &RgbImage) -> Result<()> {
    std::fs::write(path, encode_png(img)?).map_err(|e| Error::io(path, e))
}

pub fn read_png(path: &Path) -> Result<RgbImage> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_png(&bytes).map_err(|e| match e {
        Error::Rgb(msg) => Error::Rgb(format!("{}: {msg}", path.display())),
        other => other,
    })
}
