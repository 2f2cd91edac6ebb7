//! Detector simulation, time tags and coincidence analysis.

pub mod correlate;
pub mod detector;
pub mod tagfile;

pub use correlate::{correlation_histogram, count_coincidences, CoincidenceResult, Histogram};
pub use detector::{detect_channel, simulate_detection, DetectorConfig};
pub use tagfile::{decode_tags, encode_tags, read_tags, write_tags, write_tags_csv};

/// One detector click.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimeTag {
    pub timestamp_ps: u64,
    pub channel: u32,
}

/// Splits a merged stream into channels 0 and 1, preserving order.
pub fn split_channels(tags: &[TimeTag]) -> [Vec<TimeTag>; 2] {
    let mut out = [Vec::new(), Vec::new()];
    for t in tags {
        if let Some(v) = out.get_mut(t.channel as usize) {
            v.push(*t);
        }
    }
    out
}

/// Merges channel streams into one stream ordered by timestamp, then channel.
pub fn merge_channels(streams: &[&[TimeTag]]) -> Vec<TimeTag> {
    let mut all: Vec<TimeTag> = streams.iter().flat_map(|s| s.iter().copied()).collect();
    all.sort_unstable();
    all
}
