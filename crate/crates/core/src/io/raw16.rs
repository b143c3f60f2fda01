//! The `raw16` container.
//!
//! ```text
//! "RAW2" | height: u32 LE | width: u32 LE | channels: u32 LE (= 4)
//! height * width * 4 codes: u16 LE, row-major, channel-interleaved, <= 4095
//! ```

use std::path::Path;

use crate::error::{Error, Raw16Error, Result};
use crate::raw::{PackedRaw, MAX_CODE};

pub const MAGIC: [u8; 4] = *b"RAW2";
pub const HEADER_LEN: usize = 16;

/// Serializes `p`, quantizing every sample to its 12-bit code.
pub fn encode_raw16(p: &PackedRaw) -> Vec<u8> {
    let codes = p.to_codes();
    let mut out = Vec::with_capacity(HEADER_LEN + codes.len() * 2);
    out.extend_from_slice(&MAGIC);
    for v in [p.height(), p.width(), PackedRaw::CHANNELS] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    for c in codes {
        out.extend_from_slice(&c.to_le_bytes());
    }
    out
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

pub fn decode_raw16(bytes: &[u8]) -> Result<PackedRaw, Raw16Error> {
    if bytes.len() < 4 {
        return Err(Raw16Error::Truncated {
            expected: HEADER_LEN,
            actual: bytes.len(),
        });
    }
    let magic: [u8; 4] = bytes[..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(Raw16Error::BadMagic(magic));
    }
    if bytes.len() < HEADER_LEN {
        return Err(Raw16Error::Truncated {
            expected: HEADER_LEN,
            actual: bytes.len(),
        });
    }
    let (height, width, channels) = (read_u32(bytes, 4), read_u32(bytes, 8), read_u32(bytes, 12));
    if channels != 4 {
        return Err(Raw16Error::Channels(channels));
    }
    if height == 0 || width == 0 {
        return Err(Raw16Error::Empty { height, width });
    }
    let n = (height as usize)
        .checked_mul(width as usize)
        .and_then(|v| v.checked_mul(4))
        .ok_or(Raw16Error::Truncated {
            expected: usize::MAX,
            actual: bytes.len(),
        })?;
    let expected = n
        .checked_mul(2)
        .and_then(|v| v.checked_add(HEADER_LEN))
        .unwrap_or(usize::MAX);
    if bytes.len() < expected {
        return Err(Raw16Error::Truncated {
            expected,
            actual: bytes.len(),
        });
    }
    if bytes.len() > expected {
        return Err(Raw16Error::TrailingBytes(bytes.len() - expected));
    }
    let mut codes = Vec::with_capacity(n);
    for (index, pair) in bytes[HEADER_LEN..].chunks_exact(2).enumerate() {
        let code = u16::from_le_bytes([pair[0], pair[1]]);
        if code > MAX_CODE {
            return Err(Raw16Error::CodeRange { index, code });
        }
        codes.push(code);
    }
    Ok(PackedRaw::from_codes(height as usize, width as usize, &codes).expect("validated codes"))
}

pub fn write_raw16(path: &Path, p: &PackedRaw) -> Result<()> {
    std::fs::write(path, encode_raw16(p)).map_err(|e| Error::io(path, e))
}

pub fn read_raw16(path: &Path) -> Result<PackedRaw> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(decode_raw16(&bytes)?)
}
