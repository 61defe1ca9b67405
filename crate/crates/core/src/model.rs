//! The canonical in-memory article representation.
//!
//! An [`ArticleBundle`] is what the reader produces: metadata, a flat, ordered
//! sequence of blocks, review comments anchored to character ranges inside
//! those blocks, and the media the figures point at. [`assign_identifiers`]
//! turns it into an [`IdentifiedArticle`] where every structural component
//! owns a stable fragment identifier.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::rdf::PrefixMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArticleBundle {
    pub metadata: ArticleMetadata,
    pub blocks: Vec<BlockNode>,
    pub comments: Vec<ReviewComment>,
    pub media: Vec<MediaAsset>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArticleMetadata {
    pub title: String,
    pub abstract_text: String,
    pub authors: Vec<Author>,
    pub base_uri: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Author {
    pub name: String,
    pub affiliation: Option<String>,
    pub email: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MediaAsset {
    pub name: String,
    pub bytes: Vec<u8>,
}

/// A run of text carrying zero or more marks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inline {
    pub text: String,
    pub marks: Vec<Mark>,
}

impl Inline {
    pub fn plain(text: impl Into<String>) -> Self {
        Inline { text: text.into(), marks: Vec::new() }
    }

    pub fn marked(text: impl Into<String>, marks: Vec<Mark>) -> Self {
        Inline { text: text.into(), marks }
    }
}

/// Marks are ordered outermost first when rendered: link, strong, emphasis.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mark {
    Link { href: String },
    Strong,
    Emphasis,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockKind {
    Heading { level: u8, content: Vec<Inline> },
    Paragraph { content: Vec<Inline> },
    Figure { media_name: String, caption: Vec<Inline>, width: Option<u32>, height: Option<u32> },
    Table { rows: Vec<Vec<Vec<Inline>>> },
    ReferenceEntry { content: Vec<Inline> },
    List { ordered: bool, items: Vec<Vec<Inline>> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockNode {
    pub kind: BlockKind,
}

impl BlockNode {
    pub fn heading(level: u8, text: &str) -> Self {
        BlockNode { kind: BlockKind::Heading { level, content: text_content(text) } }
    }

    pub fn paragraph(text: &str) -> Self {
        BlockNode { kind: BlockKind::Paragraph { content: text_content(text) } }
    }

    pub fn reference(text: &str) -> Self {
        BlockNode { kind: BlockKind::ReferenceEntry { content: text_content(text) } }
    }

    pub fn figure(media_name: &str, caption: &str) -> Self {
        BlockNode {
            kind: BlockKind::Figure {
                media_name: media_name.to_string(),
                caption: text_content(caption),
                width: None,
                height: None,
            },
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            BlockKind::Heading { .. } => "heading",
            BlockKind::Paragraph { .. } => "paragraph",
            BlockKind::Figure { .. } => "figure",
            BlockKind::Table { .. } => "table",
            BlockKind::ReferenceEntry { .. } => "reference_entry",
            BlockKind::List { .. } => "list",
        }
    }

    pub fn heading_level(&self) -> Option<u8> {
        match self.kind {
            BlockKind::Heading { level, .. } => Some(level),
            _ => None,
        }
    }

    /// The text containers of the block in rendering order. Anchor offsets
    /// count over their concatenation.
    pub fn text_parts(&self) -> Vec<&[Inline]> {
        match &self.kind {
            BlockKind::Heading { content, .. }
            | BlockKind::Paragraph { content }
            | BlockKind::ReferenceEntry { content } => vec![content.as_slice()],
            BlockKind::Figure { caption, .. } => vec![caption.as_slice()],
            BlockKind::Table { rows } => rows.iter().flatten().map(Vec::as_slice).collect(),
            BlockKind::List { items, .. } => items.iter().map(Vec::as_slice).collect(),
        }
    }

    /// Plain text with marks stripped.
    pub fn plain_text(&self) -> String {
        self.text_parts().into_iter().map(inline_text).collect()
    }

    pub fn char_len(&self) -> usize {
        self.text_parts().into_iter().flatten().map(|run| run.text.chars().count()).sum()
    }
}

fn text_content(text: &str) -> Vec<Inline> {
    if text.is_empty() {
        Vec::new()
    } else {
        vec![Inline::plain(text)]
    }
}

pub fn inline_text(runs: &[Inline]) -> String {
    runs.iter().map(|run| run.text.as_str()).collect()
}

/// How a comment names its target block in an input bundle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockRef {
    Index(usize),
    Id(String),
}

impl fmt::Display for BlockRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockRef::Index(i) => write!(f, "#{i}"),
            BlockRef::Id(id) => f.write_str(id),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Anchor {
    pub block: BlockRef,
    /// Inclusive, in Unicode scalar values.
    pub start: usize,
    /// Exclusive.
    pub end: usize,
    /// Optional expected text at `[start, end)`.
    pub exact: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReviewComment {
    pub comment_id: String,
    pub author_name: String,
    pub created: String,
    pub body_text: String,
    pub anchor: Anchor,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyTitle,
    InvalidBaseUri(String),
    InvalidHeadingLevel { block: usize, level: u8 },
    MissingMedia { block: usize, name: String },
    InvalidCommentId(String),
    DuplicateCommentId(String),
    InvalidTimestamp { comment: String, value: String },
    DanglingAnchor(String, String),
    EmptyAnchorRange(String),
    AnchorOutOfRange { comment: String, end: usize, len: usize },
    QuoteMismatch { comment: String, expected: String, found: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyTitle => write!(f, "metadata.title: title must not be empty"),
            Violation::InvalidBaseUri(uri) => {
                write!(f, "metadata.base_uri: {uri:?} is not an absolute IRI without fragment")
            }
            Violation::InvalidHeadingLevel { block, level } => {
                write!(f, "blocks[{block}]: heading level {level} outside 1..6")
            }
            Violation::MissingMedia { block, name } => {
                write!(f, "blocks[{block}]: figure media {name:?} not present")
            }
            Violation::InvalidCommentId(id) => {
                write!(f, "comment {id:?}: id has no usable characters")
            }
            Violation::DuplicateCommentId(id) => write!(f, "comment {id:?}: duplicate comment id"),
            Violation::InvalidTimestamp { comment, value } => {
                write!(f, "comment {comment:?}: created {value:?} is not an ISO-8601 UTC timestamp")
            }
            Violation::DanglingAnchor(comment, block) => {
                write!(f, "comment {comment:?}: anchor references missing block {block:?}")
            }
            Violation::EmptyAnchorRange(comment) => {
                write!(f, "comment {comment:?}: anchor range is empty")
            }
            Violation::AnchorOutOfRange { comment, end, len } => {
                write!(f, "comment {comment:?}: anchor end {end} exceeds block length {len}")
            }
            Violation::QuoteMismatch { comment, expected, found } => write!(
                f,
                "comment {comment:?}: anchor quote {expected:?} does not match text {found:?}"
            ),
        }
    }
}

/// Checks every bundle invariant. An empty result means the bundle is valid.
pub fn validate_bundle(bundle: &ArticleBundle) -> Vec<Violation> {
    let mut violations = Vec::new();
    let meta = &bundle.metadata;
    if meta.title.trim().is_empty() {
        violations.push(Violation::EmptyTitle);
    }
    if !is_absolute_iri_without_fragment(&meta.base_uri) {
        violations.push(Violation::InvalidBaseUri(meta.base_uri.clone()));
    }

    let media: HashSet<&str> = bundle.media.iter().map(|m| m.name.as_str()).collect();
    for (i, block) in bundle.blocks.iter().enumerate() {
        match &block.kind {
            BlockKind::Heading { level, .. } if !(1..=6).contains(level) => {
                violations.push(Violation::InvalidHeadingLevel { block: i, level: *level });
            }
            BlockKind::Figure { media_name, .. } if !media.contains(media_name.as_str()) => {
                violations.push(Violation::MissingMedia { block: i, name: media_name.clone() });
            }
            _ => {}
        }
    }

    let ids = structural_ids(&bundle.blocks);
    let mut seen = HashSet::new();
    for comment in &bundle.comments {
        let cid = &comment.comment_id;
        if slug_token(cid).is_empty() {
            violations.push(Violation::InvalidCommentId(cid.clone()));
        }
        if !seen.insert(cid.as_str()) {
            violations.push(Violation::DuplicateCommentId(cid.clone()));
        }
        if !is_utc_timestamp(&comment.created) {
            violations.push(Violation::InvalidTimestamp {
                comment: cid.clone(),
                value: comment.created.clone(),
            });
        }
        let anchor = &comment.anchor;
        let Some(index) = resolve_block(&anchor.block, &ids) else {
            violations.push(Violation::DanglingAnchor(cid.clone(), anchor.block.to_string()));
            continue;
        };
        if anchor.start >= anchor.end {
            violations.push(Violation::EmptyAnchorRange(cid.clone()));
            continue;
        }
        let block = &bundle.blocks[index];
        let len = block.char_len();
        if anchor.end > len {
            violations.push(Violation::AnchorOutOfRange { comment: cid.clone(), end: anchor.end, len });
            continue;
        }
        if let Some(expected) = &anchor.exact {
            let found = char_slice(&block.plain_text(), anchor.start, anchor.end);
            if &found != expected {
                violations.push(Violation::QuoteMismatch {
                    comment: cid.clone(),
                    expected: expected.clone(),
                    found,
                });
            }
        }
    }
    violations
}

fn resolve_block(block: &BlockRef, ids: &[String]) -> Option<usize> {
    match block {
        BlockRef::Index(i) => (*i < ids.len()).then_some(*i),
        BlockRef::Id(id) => ids.iter().position(|candidate| candidate == id),
    }
}

/// Substring by Unicode scalar offsets; out-of-range bounds are clamped.
pub fn char_slice(text: &str, start: usize, end: usize) -> String {
    text.chars().skip(start).take(end.saturating_sub(start)).collect()
}

pub fn is_utc_timestamp(value: &str) -> bool {
    chrono::DateTime::parse_from_rfc3339(value)
        .map(|dt| dt.offset().local_minus_utc() == 0)
        .unwrap_or(false)
}

/// Absolute IRI check: a scheme, no whitespace or characters IRIs forbid,
/// and no fragment. Schemes that shadow a bound CURIE prefix are refused so
/// that `resource` attributes stay unambiguous.
pub fn is_absolute_iri_without_fragment(value: &str) -> bool {
    let Some((scheme, rest)) = value.split_once(':') else {
        return false;
    };
    let mut scheme_chars = scheme.chars();
    let scheme_ok = scheme_chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && scheme_chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
    scheme_ok
        && !rest.is_empty()
        && !value.contains('#')
        && PrefixMap::default().namespace(scheme).is_none()
        && !value
            .chars()
            .any(|c| c.is_whitespace() || c.is_control() || "<>\"{}|\\^`".contains(c))
}

/// Leading section numbering: arabic groups such as `3.1`, `(2)` or `4)`,
/// and roman numerals that are either upper case or followed by `.`/`)`.
/// Returns the remainder after every leading numbering token.
pub fn strip_numbering(raw: &str) -> &str {
    let mut rest = raw.trim_start();
    loop {
        let Some((token, after)) = rest.split_once(char::is_whitespace) else {
            return if is_numbering_token(rest) { "" } else { rest };
        };
        if !is_numbering_token(token) {
            return rest;
        }
        rest = after.trim_start();
    }
}

fn is_numbering_token(token: &str) -> bool {
    let inner = token.strip_prefix('(').unwrap_or(token);
    let (core, punctuated) = match inner.strip_suffix(['.', ')']) {
        Some(core) => (core, true),
        None => (inner, false),
    };
    if core.is_empty() {
        return false;
    }
    let arabic = core.split('.').all(|group| !group.is_empty() && group.chars().all(|c| c.is_ascii_digit()));
    if arabic {
        return true;
    }
    let roman_upper = core.chars().all(|c| "IVXLCDM".contains(c));
    let roman_lower = core.chars().all(|c| "ivxlcdm".contains(c));
    roman_upper || (roman_lower && punctuated)
}

/// ASCII fold: lower-cased, decomposed, non-ASCII dropped.
fn ascii_fold(text: &str) -> String {
    text.nfkd().filter(char::is_ascii).collect::<String>().to_ascii_lowercase()
}

/// Lowercase, runs of non-alphanumerics collapsed to `-`, trimmed.
pub fn slug_token(text: &str) -> String {
    let mut slug = String::with_capacity(text.len());
    let mut pending_dash = false;
    for c in ascii_fold(text).chars() {
        if c.is_ascii_alphanumeric() {
            if pending_dash && !slug.is_empty() {
                slug.push('-');
            }
            pending_dash = false;
            slug.push(c);
        } else {
            pending_dash = true;
        }
    }
    slug
}

/// Heading slug: numbering stripped first, `untitled` when nothing is left.
pub fn slug(title: &str) -> String {
    let slug = slug_token(strip_numbering(title));
    if slug.is_empty() {
        "untitled".to_string()
    } else {
        slug
    }
}

/// Ids for every block, in block order.
pub fn structural_ids(blocks: &[BlockNode]) -> Vec<String> {
    let mut used: HashSet<String> = HashSet::new();
    let mut counters: HashMap<&'static str, usize> = HashMap::new();
    let mut ids = Vec::with_capacity(blocks.len());
    for block in blocks {
        let id = match &block.kind {
            BlockKind::Heading { .. } => {
                let base = format!("section-{}", slug(&block.plain_text()));
                let mut candidate = base.clone();
                let mut n = 2;
                while used.contains(&candidate) {
                    candidate = format!("{base}-{n}");
                    n += 1;
                }
                candidate
            }
            other => {
                let prefix = match other {
                    BlockKind::Paragraph { .. } => "p",
                    BlockKind::Figure { .. } => "figure",
                    BlockKind::Table { .. } => "table",
                    BlockKind::ReferenceEntry { .. } => "ref",
                    BlockKind::List { .. } => "list",
                    BlockKind::Heading { .. } => unreachable!(),
                };
                let n = counters.entry(prefix).or_insert(0);
                *n += 1;
                format!("{prefix}-{n}")
            }
        };
        used.insert(id.clone());
        ids.push(id);
    }
    ids
}

pub fn comment_fragment(comment_id: &str) -> String {
    format!("comment-{}", slug_token(comment_id))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentifyError {
    #[error("id {id:?} of comment {comment:?} collides with another id")]
    IdCollision { comment: String, id: String },
    #[error("bundle is invalid: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

/// A comment with its anchor resolved to a block index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentifiedComment {
    pub id: String,
    pub block: usize,
    pub comment: ReviewComment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentifiedArticle {
    pub metadata: ArticleMetadata,
    pub blocks: Vec<BlockNode>,
    pub block_ids: Vec<String>,
    pub comments: Vec<IdentifiedComment>,
    pub media: Vec<MediaAsset>,
}

impl IdentifiedArticle {
    pub fn base_uri(&self) -> &str {
        &self.metadata.base_uri
    }

    pub fn fragment_iri(&self, id: &str) -> String {
        format!("{}#{id}", self.metadata.base_uri)
    }

    pub fn author_id(index: usize) -> String {
        format!("author-{}", index + 1)
    }

    pub fn block_index(&self, id: &str) -> Option<usize> {
        self.block_ids.iter().position(|candidate| candidate == id)
    }

    pub fn all_ids(&self) -> impl Iterator<Item = &str> {
        self.block_ids
            .iter()
            .map(String::as_str)
            .chain(self.comments.iter().map(|c| c.id.as_str()))
    }

    /// For each block, the index of the heading whose section directly
    /// contains it. A heading is its own section. Blocks before the first
    /// heading have none.
    pub fn enclosing_sections(&self) -> Vec<Option<usize>> {
        enclosing_sections(&self.blocks)
    }

    /// Parent section of every heading (None for top level).
    pub fn parent_sections(&self) -> Vec<Option<usize>> {
        let mut stack: Vec<(u8, usize)> = Vec::new();
        let mut parents = vec![None; self.blocks.len()];
        for (i, block) in self.blocks.iter().enumerate() {
            if let Some(level) = block.heading_level() {
                while stack.last().is_some_and(|&(l, _)| l >= level) {
                    stack.pop();
                }
                parents[i] = stack.last().map(|&(_, idx)| idx);
                stack.push((level, i));
            }
        }
        parents
    }
}

pub fn enclosing_sections(blocks: &[BlockNode]) -> Vec<Option<usize>> {
    let mut stack: Vec<(u8, usize)> = Vec::new();
    let mut out = Vec::with_capacity(blocks.len());
    for (i, block) in blocks.iter().enumerate() {
        if let Some(level) = block.heading_level() {
            while stack.last().is_some_and(|&(l, _)| l >= level) {
                stack.pop();
            }
            stack.push((level, i));
        }
        out.push(stack.last().map(|&(_, idx)| idx));
    }
    out
}

/// Assigns fragment ids to every block and comment and resolves anchors.
pub fn assign_identifiers(bundle: &ArticleBundle) -> Result<IdentifiedArticle, IdentifyError> {
    let violations = validate_bundle(bundle);
    if !violations.is_empty() {
        return Err(IdentifyError::Invalid(violations));
    }
    let block_ids = structural_ids(&bundle.blocks);
    let mut used: BTreeSet<String> = block_ids.iter().cloned().collect();
    let mut comments = Vec::with_capacity(bundle.comments.len());
    for comment in &bundle.comments {
        let id = comment_fragment(&comment.comment_id);
        if !used.insert(id.clone()) {
            return Err(IdentifyError::IdCollision { comment: comment.comment_id.clone(), id });
        }
        let block = resolve_block(&comment.anchor.block, &block_ids)
            .expect("anchors resolve after validation");
        comments.push(IdentifiedComment { id, block, comment: comment.clone() });
    }
    Ok(IdentifiedArticle {
        metadata: bundle.metadata.clone(),
        blocks: bundle.blocks.clone(),
        block_ids,
        comments,
        media: bundle.media.clone(),
    })
}
