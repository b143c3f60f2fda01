//! Reconstruction of packed RGGB RAW images from sRGB renderings.
//!
//! - [`raw`]: mosaic / packed representations, 12-bit quantization and the
//!   Bayer-aware dihedral transforms.
//! - [`isp`]: a simulated forward ISP and its exact metadata inverse.
//! - [`model`]: metadata-free reverse models (gamma mixture, global matrix),
//!   their fitting, and stratified patch sampling.
//! - [`metrics`] and [`losses`]: evaluation metrics and training losses.
//! - [`io`]: raw16 / PNG / metadata / manifest formats, cropping and
//!   synthetic dataset generation.
//! - [`tta`]: test-time augmentation over dihedral transforms.

pub mod error;
pub mod io;
pub mod isp;
pub mod losses;
pub mod metrics;
pub mod model;
pub mod raw;
pub mod tta;

pub use error::{Error, Result};
pub use isp::{ColorTransform, IspMetadata};
pub use model::{Predictor, ReverseModel};
pub use raw::{DihedralIndex, Mosaic, PackedRaw, RgbImage};
