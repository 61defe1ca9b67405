//! Deterministic ZIP packaging of a published article.

use std::collections::HashSet;
use std::io::{Cursor, Write};

use chrono::{DateTime, Datelike, Timelike, Utc};
use thiserror::Error;
use zip::write::SimpleFileOptions;
use zip::{CompressionMethod, ZipWriter};

use crate::html::{HtmlDocument, STYLESHEET, STYLESHEET_PATH};
use crate::model::MediaAsset;

/// Timestamp used by `--fixed-timestamp`: the earliest DOS date.
pub const FIXED_TIMESTAMP: &str = "1980-01-01T00:00:00Z";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PackageError {
    #[error("unsafe archive path {0:?}")]
    UnsafePath(String),
    #[error("duplicate archive path {0:?}")]
    DuplicateEntryPath(String),
    #[error("timestamp {0:?} is not an ISO-8601 UTC time between 1980 and 2107")]
    InvalidTimestamp(String),
    #[error("zip writer failed: {0}")]
    Zip(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArchiveEntry {
    pub path: String,
    pub bytes: Vec<u8>,
}

/// Entries in archive order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicationArchive {
    pub entries: Vec<ArchiveEntry>,
}

impl PublicationArchive {
    /// Lays out `article.html`, `comments/*` and `media/*` (each sorted by
    /// name), the optional `triples.nt` and `css/style.css`.
    pub fn layout(
        article_html: &str,
        comment_htmls: &[(String, String)],
        media: &[MediaAsset],
        triples: Option<&str>,
    ) -> Result<Self, PackageError> {
        let mut comments: Vec<ArchiveEntry> = comment_htmls
            .iter()
            .map(|(id, html)| ArchiveEntry { path: format!("comments/{id}.html"), bytes: html.as_bytes().to_vec() })
            .collect();
        comments.sort_by(|a, b| a.path.cmp(&b.path));
        let mut media: Vec<ArchiveEntry> = media
            .iter()
            .map(|m| ArchiveEntry { path: format!("media/{}", m.name), bytes: m.bytes.clone() })
            .collect();
        media.sort_by(|a, b| a.path.cmp(&b.path));

        let mut entries = vec![ArchiveEntry { path: "article.html".into(), bytes: article_html.as_bytes().to_vec() }];
        entries.extend(comments);
        entries.extend(media);
        if let Some(nt) = triples {
            entries.push(ArchiveEntry { path: "triples.nt".into(), bytes: nt.as_bytes().to_vec() });
        }
        entries.push(ArchiveEntry { path: STYLESHEET_PATH.into(), bytes: STYLESHEET.as_bytes().to_vec() });

        let mut seen = HashSet::new();
        for entry in &entries {
            if !is_safe_path(&entry.path) {
                return Err(PackageError::UnsafePath(entry.path.clone()));
            }
            if !seen.insert(entry.path.as_str()) {
                return Err(PackageError::DuplicateEntryPath(entry.path.clone()));
            }
        }
        Ok(PublicationArchive { entries })
    }

    pub fn paths(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.path.as_str())
    }

    /// Serializes to ZIP bytes. Every entry gets the same timestamp, deflate
    /// level 6 and mode 0644.
    pub fn to_zip(&self, timestamp: &str) -> Result<Vec<u8>, PackageError> {
        let time = dos_time(timestamp)?;
        let options = SimpleFileOptions::default()
            .compression_method(CompressionMethod::Deflated)
            .compression_level(Some(6))
            .last_modified_time(time)
            .unix_permissions(0o644);
        let mut writer = ZipWriter::new(Cursor::new(Vec::new()));
        let zip_err = |e: &dyn std::fmt::Display| PackageError::Zip(e.to_string());
        for entry in &self.entries {
            writer.start_file(entry.path.as_str(), options).map_err(|e| zip_err(&e))?;
            writer.write_all(&entry.bytes).map_err(|e| zip_err(&e))?;
        }
        Ok(writer.finish().map_err(|e| zip_err(&e))?.into_inner())
    }
}

/// Builds the archive bytes in one step.
pub fn build_archive(
    article_html: &str,
    comment_htmls: &[(String, String)],
    media: &[MediaAsset],
    triples: Option<&str>,
    timestamp: &str,
) -> Result<Vec<u8>, PackageError> {
    PublicationArchive::layout(article_html, comment_htmls, media, triples)?.to_zip(timestamp)
}

/// Forward-slash relative path with no empty, `.` or `..` components.
pub fn is_safe_path(path: &str) -> bool {
    !path.is_empty()
        && !path.starts_with('/')
        && !path.contains('\\')
        && !path.contains(':')
        && path.split('/').all(|c| !c.is_empty() && c != "." && c != "..")
}

fn dos_time(timestamp: &str) -> Result<zip::DateTime, PackageError> {
    let invalid = || PackageError::InvalidTimestamp(timestamp.to_string());
    let parsed = DateTime::parse_from_rfc3339(timestamp).map_err(|_| invalid())?;
    if parsed.offset().local_minus_utc() != 0 {
        return Err(invalid());
    }
    let t = parsed.with_timezone(&Utc);
    let year = u16::try_from(t.year()).map_err(|_| invalid())?;
    zip::DateTime::from_date_and_time(
        year,
        t.month() as u8,
        t.day() as u8,
        t.hour() as u8,
        t.minute() as u8,
        t.second() as u8,
    )
    .map_err(|_| invalid())
}

/// Relative `href`/`src` targets in a document (fragment part removed).
/// Absolute IRIs and fragment-only references are left out.
pub fn relative_references(doc: &HtmlDocument) -> Vec<String> {
    let mut found = Vec::new();
    doc.root.find_all(&|e| e.attr("href").is_some() || e.attr("src").is_some(), &mut found);
    let mut refs: Vec<String> = found
        .iter()
        .flat_map(|e| [e.attr("href"), e.attr("src")])
        .flatten()
        .filter(|r| !r.starts_with('#') && !r.contains(':'))
        .map(|r| r.split('#').next().unwrap_or(r).to_string())
        .collect();
    refs.sort();
    refs.dedup();
    refs
}
