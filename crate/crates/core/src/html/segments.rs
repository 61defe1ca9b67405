//! Splitting a block's text into minimal segments so overlapping comment
//! ranges can be highlighted without nesting.

use thiserror::Error;

/// A maximal run of characters covered by the same set of comments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    /// Ids of the anchors containing the segment, in anchor order.
    pub covering: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("anchor {comment_id:?} [{start}, {end}) is outside block text of length {len}")]
pub struct AnchorOutOfRange {
    pub comment_id: String,
    pub start: usize,
    pub end: usize,
    pub len: usize,
}

/// Partitions `[0, len)` at every anchor boundary. An empty block yields no
/// segments.
pub fn compute_segments(
    len: usize,
    anchors: &[(String, usize, usize)],
) -> Result<Vec<Segment>, AnchorOutOfRange> {
    let mut cuts = vec![0, len];
    for (id, start, end) in anchors {
        if start > end || *end > len {
            return Err(AnchorOutOfRange { comment_id: id.clone(), start: *start, end: *end, len });
        }
        cuts.push(*start);
        cuts.push(*end);
    }
    cuts.sort_unstable();
    cuts.dedup();
    Ok(cuts
        .windows(2)
        .map(|w| Segment {
            start: w[0],
            end: w[1],
            covering: anchors
                .iter()
                .filter(|(_, s, e)| *s <= w[0] && w[1] <= *e)
                .map(|(id, _, _)| id.clone())
                .collect(),
        })
        .collect())
}
