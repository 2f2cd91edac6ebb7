//! Binary time-tag files and CSV export.
//!
//! Layout, all integers little-endian:
//!
//! | offset | size | field                      |
//! |--------|------|----------------------------|
//! | 0      | 4    | magic `PTAG`               |
//! | 4      | 2    | version (1)                |
//! | 6      | 2    | reserved (0)               |
//! | 8      | 8    | record count               |
//! | 16+16k | 8    | timestamp, ps              |
//! | 24+16k | 4    | channel                    |
//! | 28+16k | 4    | flags (0)                  |

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tcspc::TimeTag;

pub const MAGIC: &[u8; 4] = b"PTAG";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 16;
pub const RECORD_LEN: usize = 16;

pub fn encode_tags(tags: &[TimeTag]) -> Vec<u8> {
    let mut buf = Vec::with_capacity(HEADER_LEN + RECORD_LEN * tags.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&0u16.to_le_bytes());
    buf.extend_from_slice(&(tags.len() as u64).to_le_bytes());
    for tag in tags {
        buf.extend_from_slice(&tag.timestamp_ps.to_le_bytes());
        buf.extend_from_slice(&tag.channel.to_le_bytes());
        buf.extend_from_slice(&0u32.to_le_bytes());
    }
    buf
}

pub fn decode_tags(bytes: &[u8], source_name: &str) -> Result<Vec<TimeTag>> {
    let fail = |offset: usize, message: String| Error::TagFormat {
        source_name: source_name.to_string(),
        offset: offset as u64,
        message,
    };
    if bytes.len() < HEADER_LEN {
        return Err(fail(
            bytes.len(),
            format!("truncated header ({} of {HEADER_LEN} bytes)", bytes.len()),
        ));
    }
    if &bytes[0..4] != MAGIC {
        return Err(fail(0, format!("bad magic {:?}", &bytes[0..4])));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(fail(4, format!("unsupported version {version}")));
    }
    let reserved = u16::from_le_bytes([bytes[6], bytes[7]]);
    if reserved != 0 {
        return Err(fail(6, format!("reserved field is {reserved}, expected 0")));
    }
    let count = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    let body = bytes.len() - HEADER_LEN;
    let complete = (body / RECORD_LEN) as u64;
    if complete < count {
        let offset = HEADER_LEN + complete as usize * RECORD_LEN;
        return Err(fail(
            offset,
            format!("truncated: header announces {count} records, file holds {complete}"),
        ));
    }
    let expected_len = HEADER_LEN + count as usize * RECORD_LEN;
    if bytes.len() > expected_len {
        return Err(fail(
            expected_len,
            format!(
                "{} trailing bytes after {count} records",
                bytes.len() - expected_len
            ),
        ));
    }
    let mut tags = Vec::with_capacity(count as usize);
    for (k, rec) in bytes[HEADER_LEN..].chunks_exact(RECORD_LEN).enumerate() {
        let flags = u32::from_le_bytes(rec[12..16].try_into().expect("4 bytes"));
        if flags != 0 {
            return Err(fail(
                HEADER_LEN + k * RECORD_LEN + 12,
                format!("record {k} has nonzero flags {flags:#x}"),
            ));
        }
        tags.push(TimeTag {
            timestamp_ps: u64::from_le_bytes(rec[0..8].try_into().expect("8 bytes")),
            channel: u32::from_le_bytes(rec[8..12].try_into().expect("4 bytes")),
        });
    }
    Ok(tags)
}

pub fn write_tags(path: &Path, tags: &[TimeTag]) -> Result<()> {
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&encode_tags(tags))
        .map_err(|e| Error::io(path, e))
}

pub fn read_tags(path: &Path) -> Result<Vec<TimeTag>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_tags(&bytes, &path.display().to_string())
}

/// Writes `timestamp_ps,channel` rows.
pub fn write_tags_csv(path: &Path, tags: &[TimeTag]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::io(path, e.into()))?;
    w.write_record(["timestamp_ps", "channel"])
        .map_err(|e| Error::io(path, e.into()))?;
    for t in tags {
        w.write_record([t.timestamp_ps.to_string(), t.channel.to_string()])
            .map_err(|e| Error::io(path, e.into()))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_header_only() {
        let b = encode_tags(&[]);
        assert_eq!(b.len(), 16);
        assert_eq!(decode_tags(&b, "t").unwrap(), vec![]);
    }

    #[test]
    fn two_record_layout() {
        let tags = [
            TimeTag {
                timestamp_ps: 0x0102,
                channel: 1,
            },
            TimeTag {
                timestamp_ps: u64::MAX,
                channel: 0,
            },
        ];
        let mut expect = b"PTAG\x01\x00\x00\x00\x02\x00\x00\x00\x00\x00\x00\x00".to_vec();
        expect
            .extend_from_slice(b"\x02\x01\x00\x00\x00\x00\x00\x00\x01\x00\x00\x00\x00\x00\x00\x00");
        expect
            .extend_from_slice(b"\xff\xff\xff\xff\xff\xff\xff\xff\x00\x00\x00\x00\x00\x00\x00\x00");
        assert_eq!(encode_tags(&tags), expect);
        assert_eq!(decode_tags(&expect, "t").unwrap(), tags);
    }

    #[test]
    fn truncation_offset() {
        let tags: Vec<TimeTag> = (0..3)
            .map(|i| TimeTag {
                timestamp_ps: i,
                channel: 0,
            })
            .collect();
        let b = encode_tags(&tags);
        match decode_tags(&b[..b.len() - 5], "t") {
            Err(Error::TagFormat { offset, .. }) => assert_eq!(offset, 48),
            other => panic!("{other:?}"),
        }
        match decode_tags(&b[..10], "t") {
            Err(Error::TagFormat { offset, .. }) => assert_eq!(offset, 10),
            other => panic!("{other:?}"),
        }
        let mut bad = b.clone();
        bad[0] = b'X';
        assert!(matches!(
            decode_tags(&bad, "t"),
            Err(Error::TagFormat { offset: 0, .. })
        ));
    }
}
