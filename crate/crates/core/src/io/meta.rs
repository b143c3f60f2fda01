//! ISP metadata files.
//!
//! A JSON object with `wb_gains` (3 numbers), `ccm` (9 numbers, row-major),
//! `black_level` and `white_level` (integer codes). Other keys are ignored.

use std::path::Path;

use serde_json::{Map, Value};

use crate::error::{Error, MetadataError, Result};
use crate::isp::IspMetadata;

fn numbers(obj: &Map<String, Value>, key: &'static str, expected: usize) -> Result<Vec<f64>, MetadataError> {
    let arr = obj
        .get(key)
        .ok_or(MetadataError::MissingKey(key))?
        .as_array()
        .ok_or(MetadataError::BadValue { key })?;
    if arr.len() != expected {
        return Err(MetadataError::Arity {
            key,
            expected,
            actual: arr.len(),
        });
    }
    arr.iter()
        .map(|v| v.as_f64().filter(|x| x.is_finite()).ok_or(MetadataError::BadValue { key }))
        .collect()
}

fn level(obj: &Map<String, Value>, key: &'static str) -> Result<u16, MetadataError> {
    obj.get(key)
        .ok_or(MetadataError::MissingKey(key))?
        .as_u64()
        .and_then(|v| u16::try_from(v).ok())
        .ok_or(MetadataError::BadValue { key })
}

pub fn parse_metadata(text: &str) -> Result<IspMetadata, MetadataError> {
    let value: Value = serde_json::from_str(text).map_err(|e| MetadataError::Syntax(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| MetadataError::Syntax("top level is not an object".into()))?;
    let g = numbers(obj, "wb_gains", 3)?;
    let c = numbers(obj, "ccm", 9)?;
    let meta = IspMetadata {
        wb_gains: [g[0], g[1], g[2]],
        ccm: [[c[0], c[1], c[2]], [c[3], c[4], c[5]], [c[6], c[7], c[8]]],
        black_level: level(obj, "black_level")?,
        white_level: level(obj, "white_level")?,
    };
    meta.validate()?;
    Ok(meta)
}

pub fn metadata_to_json(meta: &IspMetadata) -> String {
    let ccm: Vec<f64> = meta.ccm.iter().flatten().copied().collect();
    let doc = serde_json::json!({
        "wb_gains": meta.wb_gains,
        "ccm": ccm,
        "black_level": meta.black_level,
        "white_level": meta.white_level,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("metadata serializes");
    s.push('\n');
    s
}

pub fn load_metadata(path: &Path) -> Result<IspMetadata> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_metadata(&text)?)
}

pub fn write_metadata(path: &Path, meta: &IspMetadata) -> Result<()> {
    std::fs::write(path, metadata_to_json(meta)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const IDENTITY: &str = r#"{"wb_gains":[1,1,1],"ccm":[1,0,0,0,1,0,0,0,1],
        "black_level":0,"white_level":4095}"#;

    #[test]
    fn identity_file() {
        assert_eq!(parse_metadata(IDENTITY).unwrap(), IspMetadata::identity());
    }

    #[test]
    fn extra_keys_are_ignored() {
        let text = r#"{"vendor":"acme","exposure":{"iso":100},"wb_gains":[2.0,1.0,1.5],
            "ccm":[1.5,-0.3,-0.2,-0.2,1.4,-0.2,0.0,-0.5,1.5],"black_level":64,"white_level":4095}"#;
        let meta = parse_metadata(text).unwrap();
        assert_eq!(meta.wb_gains, [2.0, 1.0, 1.5]);
        assert_eq!(meta.ccm[2], [0.0, -0.5, 1.5]);
        assert_eq!(meta.black_level, 64);
    }

    #[test]
    fn distinct_errors() {
        let eight = IDENTITY.replace("[1,0,0,0,1,0,0,0,1]", "[1,0,0,0,1,0,0,0]");
        assert_eq!(
            parse_metadata(&eight),
            Err(MetadataError::Arity {
                key: "ccm",
                expected: 9,
                actual: 8
            })
        );
        let missing = IDENTITY.replace("\"black_level\":0,", "");
        assert_eq!(parse_metadata(&missing), Err(MetadataError::MissingKey("black_level")));
        let singular = IDENTITY.replace("[1,0,0,0,1,0,0,0,1]", "[1,0,0,1,0,0,0,0,1]");
        assert!(matches!(parse_metadata(&singular), Err(MetadataError::SingularCcm(_))));
        let gain = IDENTITY.replace("[1,1,1]", "[1,0,1]");
        assert_eq!(parse_metadata(&gain), Err(MetadataError::NonPositiveGain));
        let text = IDENTITY.replace("[1,1,1]", "[1,\"a\",1]");
        assert_eq!(parse_metadata(&text), Err(MetadataError::BadValue { key: "wb_gains" }));
        let levels = IDENTITY.replace("\"black_level\":0", "\"black_level\":70000");
        assert_eq!(parse_metadata(&levels), Err(MetadataError::BadValue { key: "black_level" }));
        let levels = IDENTITY.replace("\"black_level\":0", "\"black_level\":4095");
        assert!(matches!(parse_metadata(&levels), Err(MetadataError::Levels { .. })));
        assert!(matches!(parse_metadata("[1,2]"), Err(MetadataError::Syntax(_))));
        assert!(matches!(parse_metadata("{"), Err(MetadataError::Syntax(_))));
    }

    #[test]
    fn write_then_parse() {
        let meta = IspMetadata::new(
            [1.9, 1.0, 1.7],
            [[1.6, -0.4, -0.2], [-0.25, 1.5, -0.25], [0.1 + 0.2, -0.6, 1.3]],
            64,
            4000,
        )
        .unwrap();
        assert_eq!(parse_metadata(&metadata_to_json(&meta)).unwrap(), meta);
    }
}
