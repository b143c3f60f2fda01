//! Dataset manifests.
//!
//! ```json
//! { "format_version": 1, "split": "test",
//!   "entries": [ { "id": "img_0000", "device": "iPhoneX", "group": "target",
//!                  "rgb_path": "img_0000.png", "raw_path": "img_0000.raw16",
//!                  "meta_path": "img_0000.meta.json" } ] }
//! ```
//!
//! Relative paths are resolved against the manifest's directory. `group` may
//! be omitted for the four known devices.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::meta::load_metadata;
use super::raw16::read_raw16;
use super::rgb::read_png;
use crate::error::{Error, Result};
use crate::isp::IspMetadata;
use crate::raw::{PackedRaw, RgbImage};

pub const MANIFEST_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum Device {
    IPhoneX,
    SamsungS9,
    SamsungS21,
    VivoX90,
    Other(String),
}

impl Device {
    pub fn name(&self) -> &str {
        match self {
            Device::IPhoneX => "iPhoneX",
            Device::SamsungS9 => "SamsungS9",
            Device::SamsungS21 => "SamsungS21",
            Device::VivoX90 => "VivoX90",
            Device::Other(name) => name,
        }
    }

    pub fn default_group(&self) -> Option<Group> {
        match self {
            Device::IPhoneX | Device::SamsungS9 => Some(Group::Target),
            Device::SamsungS21 | Device::VivoX90 => Some(Group::Oof),
            Device::Other(_) => None,
        }
    }
}

impl From<String> for Device {
    fn from(s: String) -> Self {
        match s.as_str() {
            "iPhoneX" => Device::IPhoneX,
            "SamsungS9" => Device::SamsungS9,
            "SamsungS21" => Device::SamsungS21,
            "VivoX90" => Device::VivoX90,
            _ => Device::Other(s),
        }
    }
}

impl From<Device> for String {
    fn from(d: Device) -> Self {
        d.name().to_owned()
    }
}

impl fmt::Display for Device {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Target,
    Oof,
}

impl Group {
    pub fn name(self) -> &'static str {
        match self {
            Group::Target => "target",
            Group::Oof => "oof",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DevicePair {
    pub id: String,
    pub device: Device,
    pub group: Group,
    pub rgb_path: PathBuf,
    pub raw_path: PathBuf,
    /// Without metadata the pair can only be used in metadata-free mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta_path: Option<PathBuf>,
}

impl DevicePair {
    /// An entry whose group follows its device.
    pub fn new(id: impl Into<String>, device: Device, rgb_path: PathBuf, raw_path: PathBuf) -> Result<Self> {
        let id = id.into();
        let group = device.default_group().ok_or_else(|| {
            Error::Manifest(format!("entry `{id}`: device `{device}` needs an explicit group"))
        })?;
        Ok(DevicePair {
            id,
            device,
            group,
            rgb_path,
            raw_path,
            meta_path: None,
        })
    }
}

/// On-disk form of an entry, with an optional group.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryDoc {
    id: String,
    device: Device,
    #[serde(default)]
    group: Option<Group>,
    rgb_path: PathBuf,
    raw_path: PathBuf,
    #[serde(default)]
    meta_path: Option<PathBuf>,
}

#[derive(Deserialize)]
struct ManifestDoc {
    format_version: u32,
    split: Split,
    entries: Vec<EntryDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub format_version: u32,
    pub split: Split,
    pub entries: Vec<DevicePair>,
    /// Directory that relative entry paths are resolved against.
    #[serde(skip)]
    pub root: PathBuf,
}

pub struct Partition<'a> {
    pub target: Vec<&'a DevicePair>,
    pub oof: Vec<&'a DevicePair>,
}

impl Partition<'_> {
    pub fn counts(&self) -> (usize, usize) {
        (self.target.len(), self.oof.len())
    }
}

impl Manifest {
    pub fn new(split: Split, entries: Vec<DevicePair>, root: impl Into<PathBuf>) -> Result<Self> {
        let m = Manifest {
            format_version: MANIFEST_FORMAT_VERSION,
            split,
            entries,
            root: root.into(),
        };
        m.check_ids()?;
        Ok(m)
    }

    fn check_ids(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for e in &self.entries {
            if e.id.is_empty() {
                return Err(Error::Manifest("empty entry id".into()));
            }
            if !seen.insert(e.id.as_str()) {
                return Err(Error::Manifest(format!("duplicate id `{}`", e.id)));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str, root: impl Into<PathBuf>) -> Result<Self> {
        let doc: ManifestDoc = serde_json::from_str(text).map_err(|e| Error::Manifest(e.to_string()))?;
        if doc.format_version != MANIFEST_FORMAT_VERSION {
            return Err(Error::Manifest(format!(
                "unsupported format version {}",
                doc.format_version
            )));
        }
        let entries = doc
            .entries
            .into_iter()
            .map(|e| {
                let group = e.group.or(e.device.default_group()).ok_or_else(|| {
                    Error::Manifest(format!("entry `{}`: device `{}` needs an explicit group", e.id, e.device))
                })?;
                Ok(DevicePair {
                    id: e.id,
                    device: e.device,
                    group,
                    rgb_path: e.rgb_path,
                    raw_path: e.raw_path,
                    meta_path: e.meta_path,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Manifest::new(doc.split, entries, root)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let root = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_json(&text, root).map_err(|e| match e {
            Error::Manifest(msg) => Error::Manifest(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.root.join(p)
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&DevicePair> {
        self.entries.iter().find(|e| e.id == id)
    }

    /// Entries by group, each in manifest order.
    pub fn partition(&self) -> Partition<'_> {
        let (target, oof) = self.entries.iter().partition(|e| e.group == Group::Target);
        Partition { target, oof }
    }

    pub fn load_rgb(&self, e: &DevicePair) -> Result<RgbImage> {
        read_png(&self.resolve(&e.rgb_path))
    }

    pub fn load_raw(&self, e: &DevicePair) -> Result<PackedRaw> {
        read_raw16(&self.resolve(&e.raw_path))
    }

    pub fn load_meta(&self, e: &DevicePair) -> Result<Option<IspMetadata>> {
        e.meta_path
            .as_ref()
            .map(|p| load_metadata(&self.resolve(p)))
            .transpose()
    }
}
