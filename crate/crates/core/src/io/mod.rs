//! File formats, dataset manifests, cropping and synthetic data.

mod crop;
mod manifest;
mod meta;
mod raw16;
mod rgb;
mod synth;

pub use crop::{crop_aligned, tile_starts};
pub use manifest::{Device, DevicePair, Group, Manifest, Partition, Split, MANIFEST_FORMAT_VERSION};
pub use meta::{load_metadata, metadata_to_json, parse_metadata, write_metadata};
pub use raw16::{decode_raw16, encode_raw16, read_raw16, write_raw16, HEADER_LEN, MAGIC};
pub use rgb::{decode_png, encode_png, quantize_u8, read_png, write_png};
pub use synth::{
    default_synth_metadata, synth_dataset, synth_device, synth_raw, SynthConfig, SYNTH_MAX, SYNTH_MIN,
};
