//! Test-time augmentation over the dihedral group.
//!
//! Each transformed input is predicted, mapped back with the Bayer-aware
//! inverse, and the results are averaged in the linear domain before a
//! single final 12-bit quantization.
//!
//! A transform moves RGGB sites onto sites of other colours (a horizontal
//! flip puts red samples where G1 was), so the transformed image is
//! predicted in the colour layout that [`dihedral_packed`] carries back onto
//! RGGB. Every averaged sample is then the right colour at the right site.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Predictor;
use crate::raw::{
    bayer_channel_permutation, dihedral_packed, dihedral_rgb, quantize12_vec, DihedralIndex, PackedRaw, RgbImage,
    RGGB_COLOR,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TtaMode {
    #[default]
    None,
    /// Identity, horizontal flip and vertical flip.
    Flip2,
    /// All eight dihedral transforms.
    Dihedral8,
}

impl TtaMode {
    pub fn transforms(self) -> Vec<DihedralIndex> {
        match self {
            TtaMode::None => vec![DihedralIndex::IDENTITY],
            TtaMode::Flip2 => vec![
                DihedralIndex::IDENTITY,
                DihedralIndex::HFLIP,
                DihedralIndex::VFLIP,
            ],
            TtaMode::Dihedral8 => DihedralIndex::all().collect(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TtaMode::None => "none",
            TtaMode::Flip2 => "flip2",
            TtaMode::Dihedral8 => "dihedral8",
        }
    }
}

impl fmt::Display for TtaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TtaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(TtaMode::None),
            "flip2" => Ok(TtaMode::Flip2),
            "dihedral8" => Ok(TtaMode::Dihedral8),
            other => Err(Error::InvalidArgument(format!("unknown TTA mode `{other}`"))),
        }
    }
}

/// Colour layout to predict in on an image transformed by `t`, such that
/// `dihedral_packed(prediction, t.inverse())` is RGGB.
pub fn transformed_cfa(t: DihedralIndex) -> [usize; 4] {
    bayer_channel_permutation(t).map(|c| RGGB_COLOR[c])
}

/// Averaged, unquantized prediction over the transforms of `mode`.
pub fn predict_tta_linear<P: Predictor + ?Sized>(
    predictor: &P,
    img: &RgbImage,
    mode: TtaMode,
) -> Result<Vec<f64>> {
    let transforms = mode.transforms();
    if mode == TtaMode::None {
        return predictor.predict_linear(img);
    }
    let (ph, pw) = (img.height() / 2, img.width() / 2);
    let mut acc = vec![0.0; ph * pw * 4];
    for &t in &transforms {
        let lin = predictor.predict_linear_cfa(&dihedral_rgb(img, t), transformed_cfa(t))?;
        let (th, tw) = if t.transpose() { (pw, ph) } else { (ph, pw) };
        // Clamp before wrapping; PackedRaw holds samples in [0, 1].
        let packed = PackedRaw::new(th, tw, lin.into_iter().map(|v| v.clamp(0.0, 1.0)).collect())?;
        let back = dihedral_packed(&packed, t.inverse());
        for (a, v) in acc.iter_mut().zip(back.as_slice()) {
            *a += v;
        }
    }
    let n = transforms.len() as f64;
    acc.iter_mut().for_each(|v| *v /= n);
    Ok(acc)
}

/// TTA prediction; `TtaMode::None` is exactly `predictor.predict(img)`.
pub fn predict_tta<P: Predictor + ?Sized>(predictor: &P, img: &RgbImage, mode: TtaMode) -> Result<PackedRaw> {
    if mode == TtaMode::None {
        return predictor.predict(img);
    }
    let lin = predict_tta_linear(predictor, img, mode)?;
    Ok(quantize12_vec(img.height() / 2, img.width() / 2, lin))
}
