//! Reading and writing article bundle JSON.
//!
//! Parsing walks a `serde_json::Value` by hand so every error carries the
//! JSON path of the offending element. Writing goes through typed structs
//! whose field order fixes the key order of the output.

use std::collections::HashSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::model::{
    Anchor, ArticleBundle, ArticleMetadata, Author, BlockKind, BlockNode, BlockRef, Inline, Mark,
    MediaAsset, ReviewComment,
};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("malformed JSON at byte {offset} (line {line}, column {column}): {message}")]
    MalformedJson { offset: usize, line: usize, column: usize, message: String },
    #[error("{path}: unknown block kind {kind:?}")]
    UnknownBlockKind { path: String, kind: String },
    #[error("{0}: missing required field")]
    MissingField(String),
    #[error("{path}: expected {expected}")]
    InvalidField { path: String, expected: &'static str },
    #[error("figure media {0:?} not found")]
    MissingMedia(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

/// Parses bundle JSON. `media_lookup` supplies the bytes of every media name
/// a figure references.
pub fn parse_bundle(
    json_text: &str,
    media_lookup: &dyn Fn(&str) -> Option<Vec<u8>>,
) -> Result<ArticleBundle, IngestError> {
    let root: Value = serde_json::from_str(json_text).map_err(|e| malformed(json_text, &e))?;
    let root = object(&root, "$")?;
    let metadata = parse_metadata(required(root, "$", "metadata")?)?;
    let blocks = array(required(root, "$", "blocks")?, "$.blocks")?
        .iter()
        .enumerate()
        .map(|(i, b)| parse_block(b, &format!("$.blocks[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let comments = array(required(root, "$", "comments")?, "$.comments")?
        .iter()
        .enumerate()
        .map(|(i, c)| parse_comment(c, &format!("$.comments[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;

    let mut seen = HashSet::new();
    let mut media = Vec::new();
    for block in &blocks {
        if let BlockKind::Figure { media_name, .. } = &block.kind {
            if seen.insert(media_name.clone()) {
                let bytes = media_lookup(media_name).ok_or_else(|| IngestError::MissingMedia(media_name.clone()))?;
                media.push(MediaAsset { name: media_name.clone(), bytes });
            }
        }
    }
    Ok(ArticleBundle { metadata, blocks, comments, media })
}

/// Parses one comment object, in the same shape as an entry of a bundle's
/// `comments` array.
pub fn parse_comment_json(json_text: &str) -> Result<ReviewComment, IngestError> {
    let root: Value = serde_json::from_str(json_text).map_err(|e| malformed(json_text, &e))?;
    parse_comment(&root, "$")
}

/// Reads a bundle file; media come from the `media/` directory next to it.
pub fn load_bundle(path: &Path) -> Result<ArticleBundle, IngestError> {
    let text = fs::read_to_string(path).map_err(|source| IngestError::Io { path: path.to_path_buf(), source })?;
    let media_dir = path.parent().unwrap_or(Path::new(".")).join("media");
    parse_bundle(&text, &|name| {
        if !is_safe_relative(name) {
            return None;
        }
        fs::read(media_dir.join(name)).ok()
    })
}

fn is_safe_relative(name: &str) -> bool {
    !name.is_empty()
        && !name.starts_with('/')
        && !name.contains('\\')
        && name.split('/').all(|c| !c.is_empty() && c != "." && c != "..")
}

fn malformed(text: &str, e: &serde_json::Error) -> IngestError {
    let (line, column) = (e.line(), e.column());
    let line_start: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    let offset = (line_start + column.saturating_sub(1)).min(text.len());
    IngestError::MalformedJson { offset, line, column, message: e.to_string() }
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, IngestError> {
    v.as_object().ok_or_else(|| IngestError::InvalidField { path: path.to_string(), expected: "an object" })
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, IngestError> {
    v.as_array().ok_or_else(|| IngestError::InvalidField { path: path.to_string(), expected: "an array" })
}

fn required<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value, IngestError> {
    match obj.get(key) {
        Some(Value::Null) | None => Err(IngestError::MissingField(format!("{path}.{key}"))),
        Some(v) => Ok(v),
    }
}

fn optional<'a>(obj: &'a Map<String, Value>, key: &str) -> Option<&'a Value> {
    obj.get(key).filter(|v| !v.is_null())
}

fn string(v: &Value, path: &str) -> Result<String, IngestError> {
    v.as_str()
        .map(str::to_string)
        .ok_or_else(|| IngestError::InvalidField { path: path.to_string(), expected: "a string" })
}

fn req_string(obj: &Map<String, Value>, path: &str, key: &str) -> Result<String, IngestError> {
    string(required(obj, path, key)?, &format!("{path}.{key}"))
}

fn opt_string(obj: &Map<String, Value>, path: &str, key: &str) -> Result<Option<String>, IngestError> {
    optional(obj, key).map(|v| string(v, &format!("{path}.{key}"))).transpose()
}

fn index(v: &Value, path: &str) -> Result<usize, IngestError> {
    v.as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| IngestError::InvalidField { path: path.to_string(), expected: "a non-negative integer" })
}

fn parse_metadata(v: &Value) -> Result<ArticleMetadata, IngestError> {
    let path = "$.metadata";
    let obj = object(v, path)?;
    let authors = match optional(obj, "authors") {
        None => Vec::new(),
        Some(list) => array(list, "$.metadata.authors")?
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let p = format!("$.metadata.authors[{i}]");
                let a = object(a, &p)?;
                Ok(Author {
                    name: req_string(a, &p, "name")?,
                    affiliation: opt_string(a, &p, "affiliation")?,
                    email: opt_string(a, &p, "email")?,
                })
            })
            .collect::<Result<_, IngestError>>()?,
    };
    Ok(ArticleMetadata {
        title: req_string(obj, path, "title")?,
        abstract_text: opt_string(obj, path, "abstract")?.unwrap_or_default(),
        authors,
        base_uri: req_string(obj, path, "base_uri")?,
    })
}

/// Inline content: a plain string or an array of `{text, marks}` runs.
fn parse_content(v: &Value, path: &str) -> Result<Vec<Inline>, IngestError> {
    match v {
        Value::String(s) if s.is_empty() => Ok(Vec::new()),
        Value::String(s) => Ok(vec![Inline::plain(s.clone())]),
        Value::Array(runs) => runs
            .iter()
            .enumerate()
            .map(|(i, run)| {
                let p = format!("{path}[{i}]");
                let obj = object(run, &p)?;
                let marks = match optional(obj, "marks") {
                    None => Vec::new(),
                    Some(m) => array(m, &format!("{p}.marks"))?
                        .iter()
                        .enumerate()
                        .map(|(j, m)| parse_mark(m, &format!("{p}.marks[{j}]")))
                        .collect::<Result<_, _>>()?,
                };
                Ok(Inline { text: req_string(obj, &p, "text")?, marks })
            })
            .collect(),
        _ => Err(IngestError::InvalidField { path: path.to_string(), expected: "a string or an array of runs" }),
    }
}

fn parse_mark(v: &Value, path: &str) -> Result<Mark, IngestError> {
    let obj = object(v, path)?;
    match req_string(obj, path, "type")?.as_str() {
        "em" => Ok(Mark::Emphasis),
        "strong" => Ok(Mark::Strong),
        "link" => Ok(Mark::Link { href: req_string(obj, path, "href")? }),
        _ => Err(IngestError::InvalidField { path: format!("{path}.type"), expected: "one of em, strong, link" }),
    }
}

fn parse_block(v: &Value, path: &str) -> Result<BlockNode, IngestError> {
    let obj = object(v, path)?;
    let kind = req_string(obj, path, "kind")?;
    let content = |key: &str| parse_content(required(obj, path, key)?, &format!("{path}.{key}"));
    let kind = match kind.as_str() {
        "heading" => {
            let level = index(required(obj, path, "level")?, &format!("{path}.level"))?;
            let level = u8::try_from(level)
                .map_err(|_| IngestError::InvalidField { path: format!("{path}.level"), expected: "a level in 1..6" })?;
            BlockKind::Heading { level, content: content("content")? }
        }
        "paragraph" => BlockKind::Paragraph { content: content("content")? },
        "reference_entry" => BlockKind::ReferenceEntry { content: content("content")? },
        "figure" => {
            let dim = |key: &str| -> Result<Option<u32>, IngestError> {
                optional(obj, key)
                    .map(|v| {
                        v.as_u64().and_then(|n| u32::try_from(n).ok()).ok_or_else(|| IngestError::InvalidField {
                            path: format!("{path}.{key}"),
                            expected: "a non-negative integer",
                        })
                    })
                    .transpose()
            };
            BlockKind::Figure {
                media_name: req_string(obj, path, "media_name")?,
                caption: match optional(obj, "caption") {
                    Some(c) => parse_content(c, &format!("{path}.caption"))?,
                    None => Vec::new(),
                },
                width: dim("width")?,
                height: dim("height")?,
            }
        }
        "table" => {
            let rows_path = format!("{path}.rows");
            let rows = array(required(obj, path, "rows")?, &rows_path)?
                .iter()
                .enumerate()
                .map(|(r, row)| {
                    let row_path = format!("{rows_path}[{r}]");
                    array(row, &row_path)?
                        .iter()
                        .enumerate()
                        .map(|(c, cell)| parse_content(cell, &format!("{row_path}[{c}]")))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            BlockKind::Table { rows }
        }
        "list" => {
            let items_path = format!("{path}.items");
            let items = array(required(obj, path, "items")?, &items_path)?
                .iter()
                .enumerate()
                .map(|(i, item)| parse_content(item, &format!("{items_path}[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let ordered = match optional(obj, "ordered") {
                None => false,
                Some(v) => v.as_bool().ok_or_else(|| IngestError::InvalidField {
                    path: format!("{path}.ordered"),
                    expected: "a boolean",
                })?,
            };
            BlockKind::List { ordered, items }
        }
        other => return Err(IngestError::UnknownBlockKind { path: format!("{path}.kind"), kind: other.to_string() }),
    };
    Ok(BlockNode { kind })
}

fn parse_comment(v: &Value, path: &str) -> Result<ReviewComment, IngestError> {
    let obj = object(v, path)?;
    let anchor_path = format!("{path}.anchor");
    let a = object(required(obj, path, "anchor")?, &anchor_path)?;
    let block = match (optional(a, "block_index"), optional(a, "block_id")) {
        (Some(i), _) => BlockRef::Index(index(i, &format!("{anchor_path}.block_index"))?),
        (None, Some(id)) => BlockRef::Id(string(id, &format!("{anchor_path}.block_id"))?),
        (None, None) => return Err(IngestError::MissingField(format!("{anchor_path}.block_index"))),
    };
    Ok(ReviewComment {
        comment_id: req_string(obj, path, "comment_id")?,
        author_name: req_string(obj, path, "author_name")?,
        created: req_string(obj, path, "created")?,
        body_text: req_string(obj, path, "body_text")?,
        anchor: Anchor {
            block,
            start: index(required(a, &anchor_path, "start")?, &format!("{anchor_path}.start"))?,
            end: index(required(a, &anchor_path, "end")?, &format!("{anchor_path}.end"))?,
            exact: opt_string(a, &anchor_path, "exact")?,
        },
    })
}

#[derive(Serialize)]
struct BundleOut<'a> {
    metadata: MetadataOut<'a>,
    blocks: Vec<BlockOut<'a>>,
    comments: Vec<CommentOut<'a>>,
}

#[derive(Serialize)]
struct MetadataOut<'a> {
    title: &'a str,
    base_uri: &'a str,
    #[serde(rename = "abstract")]
    abstract_text: &'a str,
    authors: Vec<AuthorOut<'a>>,
}

#[derive(Serialize)]
struct AuthorOut<'a> {
    name: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    affiliation: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    email: Option<&'a str>,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum BlockOut<'a> {
    Heading {
        level: u8,
        content: ContentOut<'a>,
    },
    Paragraph {
        content: ContentOut<'a>,
    },
    Figure {
        media_name: &'a str,
        caption: ContentOut<'a>,
        #[serde(skip_serializing_if = "Option::is_none")]
        width: Option<u32>,
        #[serde(skip_serializing_if = "Option::is_none")]
        height: Option<u32>,
    },
    Table {
        rows: Vec<Vec<ContentOut<'a>>>,
    },
    ReferenceEntry {
        content: ContentOut<'a>,
    },
    List {
        ordered: bool,
        items: Vec<ContentOut<'a>>,
    },
}

#[derive(Serialize)]
#[serde(untagged)]
enum ContentOut<'a> {
    Text(&'a str),
    Runs(Vec<RunOut<'a>>),
}

#[derive(Serialize)]
struct RunOut<'a> {
    text: &'a str,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    marks: Vec<MarkOut<'a>>,
}

#[derive(Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum MarkOut<'a> {
    Em,
    Strong,
    Link { href: &'a str },
}

#[derive(Serialize)]
struct CommentOut<'a> {
    comment_id: &'a str,
    author_name: &'a str,
    created: &'a str,
    body_text: &'a str,
    anchor: AnchorOut<'a>,
}

#[derive(Serialize)]
struct AnchorOut<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    block_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    block_id: Option<&'a str>,
    start: usize,
    end: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<&'a str>,
}

fn content_out(runs: &[Inline]) -> ContentOut<'_> {
    match runs {
        [] => ContentOut::Text(""),
        [only] if only.marks.is_empty() && !only.text.is_empty() => ContentOut::Text(&only.text),
        _ => ContentOut::Runs(
            runs.iter()
                .map(|r| RunOut {
                    text: &r.text,
                    marks: r
                        .marks
                        .iter()
                        .map(|m| match m {
                            Mark::Emphasis => MarkOut::Em,
                            Mark::Strong => MarkOut::Strong,
                            Mark::Link { href } => MarkOut::Link { href },
                        })
                        .collect(),
                })
                .collect(),
        ),
    }
}

/// Canonical JSON for a bundle (pretty-printed, fixed key order, trailing
/// newline). Media bytes are not included.
pub fn write_bundle(bundle: &ArticleBundle) -> String {
    let meta = &bundle.metadata;
    let out = BundleOut {
        metadata: MetadataOut {
            title: &meta.title,
            base_uri: &meta.base_uri,
            abstract_text: &meta.abstract_text,
            authors: meta
                .authors
                .iter()
                .map(|a| AuthorOut { name: &a.name, affiliation: a.affiliation.as_deref(), email: a.email.as_deref() })
                .collect(),
        },
        blocks: bundle
            .blocks
            .iter()
            .map(|b| match &b.kind {
                BlockKind::Heading { level, content } => BlockOut::Heading { level: *level, content: content_out(content) },
                BlockKind::Paragraph { content } => BlockOut::Paragraph { content: content_out(content) },
                BlockKind::Figure { media_name, caption, width, height } => BlockOut::Figure {
                    media_name,
                    caption: content_out(caption),
                    width: *width,
                    height: *height,
                },
                BlockKind::Table { rows } => BlockOut::Table {
                    rows: rows.iter().map(|row| row.iter().map(|c| content_out(c)).collect()).collect(),
                },
                BlockKind::ReferenceEntry { content } => BlockOut::ReferenceEntry { content: content_out(content) },
                BlockKind::List { ordered, items } => BlockOut::List {
                    ordered: *ordered,
                    items: items.iter().map(|i| content_out(i)).collect(),
                },
            })
            .collect(),
        comments: bundle
            .comments
            .iter()
            .map(|c| CommentOut {
                comment_id: &c.comment_id,
                author_name: &c.author_name,
                created: &c.created,
                body_text: &c.body_text,
                anchor: AnchorOut {
                    block_index: match c.anchor.block {
                        BlockRef::Index(i) => Some(i),
                        BlockRef::Id(_) => None,
                    },
                    block_id: match &c.anchor.block {
                        BlockRef::Id(id) => Some(id),
                        BlockRef::Index(_) => None,
                    },
                    start: c.anchor.start,
                    end: c.anchor.end,
                    exact: c.anchor.exact.as_deref(),
                },
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&out).expect("bundle serialization cannot fail");
    text.push('\n');
    text
}

/// Media lookup over the assets already held by a bundle.
pub fn media_from(bundle: &ArticleBundle) -> impl Fn(&str) -> Option<Vec<u8>> + '_ {
    move |name| bundle.media.iter().find(|m| m.name == name).map(|m| m.bytes.clone())
}
