use crate::error::{Error, Result};
use crate::model::PatchPair;
use crate::raw::{PackedRaw, RgbImage};

/// Tile origins along one axis of length `len`: every `stride` while a full
/// tile fits, then one tile snapped to the far border.
pub fn tile_starts(len: usize, size: usize, stride: usize) -> Vec<usize> {
    let mut starts = Vec::new();
    let mut p = 0;
    loop {
        if p + size >= len {
            let last = len - size;
            if starts.last() != Some(&last) {
                starts.push(last);
            }
            return starts;
        }
        starts.push(p);
        p += stride;
    }
}

/// Cuts co-registered `size`×`size` packed-RAW tiles and the matching
/// `2·size` RGB crops, row-major over tile origins.
pub fn crop_aligned(rgb: &RgbImage, raw: &PackedRaw, size: usize, stride: usize) -> Result<Vec<PatchPair>> {
    rgb.check_paired(raw)?;
    if size == 0 || stride == 0 {
        return Err(Error::InvalidArgument("crop size and stride must be positive".into()));
    }
    if size > raw.height() || size > raw.width() {
        return Err(Error::InvalidArgument(format!(
            "crop size {size} exceeds raw {}x{}",
            raw.height(),
            raw.width()
        )));
    }
    let ys = tile_starts(raw.height(), size, stride);
    let xs = tile_starts(raw.width(), size, stride);
    let mut out = Vec::with_capacity(ys.len() * xs.len());
    for &i in &ys {
        for &j in &xs {
            out.push(PatchPair::new(
                rgb.crop(2 * i, 2 * j, 2 * size, 2 * size)?,
                raw.crop(i, j, size, size)?,
            )?);
        }
    }
    Ok(out)
}
