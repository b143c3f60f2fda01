use nalgebra::{Matrix3, SymmetricEigen, Vector3};

use super::fit::MIN_CONDITION_RATIO;
use super::sampling::PatchPair;
use crate::error::{Error, Result};
use crate::isp::{from_matrix, srgb_decode, ColorTransform};
use crate::raw::{CH_B, CH_G1, CH_G2, CH_R};

/// Least-squares estimate of the single matrix `M` with
/// `decode(rgb) ≈ M · raw`.
///
/// Each packed pixel contributes one equation: the RAW colour
/// `(R, (G1 + G2) / 2, B)` against the mean decoded RGB of its 2×2 block.
/// Prediction then applies `M⁻¹` to decoded sRGB.
pub fn fit_global_matrix(pairs: &[PatchPair]) -> Result<ColorTransform> {
    if pairs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut gram = Matrix3::<f64>::zeros();
    let mut cross = Matrix3::<f64>::zeros();
    let mut count = 0usize;
    for p in pairs {
        p.rgb.check_paired(&p.raw)?;
        for i in 0..p.raw.height() {
            for j in 0..p.raw.width() {
                let raw = Vector3::new(
                    p.raw.get(i, j, CH_R),
                    0.5 * (p.raw.get(i, j, CH_G1) + p.raw.get(i, j, CH_G2)),
                    p.raw.get(i, j, CH_B),
                );
                let mut rgb = Vector3::zeros();
                for (dy, dx) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    rgb += Vector3::from(p.rgb.pixel(2 * i + dy, 2 * j + dx).map(srgb_decode));
                }
                rgb *= 0.25;
                gram += raw * raw.transpose();
                cross += rgb * raw.transpose();
                count += 1;
            }
        }
    }
    let ill = || Error::IllConditioned {
        what: "global colour matrix (samples span fewer than 3 colours)".into(),
    };
    if count < 3 {
        return Err(ill());
    }
    let d = gram.diagonal();
    if d.iter().any(|v| !(*v > 0.0)) {
        return Err(ill());
    }
    let s = d.map(|v| 1.0 / v.sqrt());
    let scaled = Matrix3::from_fn(|r, c| gram[(r, c)] * s[r] * s[c]);
    let eig = SymmetricEigen::new(scaled).eigenvalues;
    if !(eig.min() > MIN_CONDITION_RATIO * eig.max()) {
        return Err(ill());
    }
    let chol = scaled.cholesky().ok_or_else(ill)?;
    // M = cross · gram⁻¹; solve gram · Mᵀ = crossᵀ in the scaled basis.
    let scale = Matrix3::from_diagonal(&s);
    let mt = scale * chol.solve(&(scale * cross.transpose()));
    ColorTransform::new(from_matrix(&mt.transpose()))
}
