//! Gazetteer-based recognition of discourse elements in section headings,
//! plus tagging of the common information units of an article.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::model::{strip_numbering, BlockKind, IdentifiedArticle};

/// Discourse Elements Ontology classes a section can be typed with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiscourseClass {
    Introduction,
    Motivation,
    Background,
    RelatedWork,
    Methods,
    Materials,
    Results,
    Evaluation,
    Discussion,
    Conclusion,
    FutureWork,
    Acknowledgements,
    ProblemStatement,
    Model,
}

impl DiscourseClass {
    pub const ALL: [DiscourseClass; 14] = [
        DiscourseClass::Introduction,
        DiscourseClass::Motivation,
        DiscourseClass::Background,
        DiscourseClass::RelatedWork,
        DiscourseClass::Methods,
        DiscourseClass::Materials,
        DiscourseClass::Results,
        DiscourseClass::Evaluation,
        DiscourseClass::Discussion,
        DiscourseClass::Conclusion,
        DiscourseClass::FutureWork,
        DiscourseClass::Acknowledgements,
        DiscourseClass::ProblemStatement,
        DiscourseClass::Model,
    ];

    pub fn curie(self) -> &'static str {
        match self {
            DiscourseClass::Introduction => "deo:Introduction",
            DiscourseClass::Motivation => "deo:Motivation",
            DiscourseClass::Background => "deo:Background",
            DiscourseClass::RelatedWork => "deo:RelatedWork",
            DiscourseClass::Methods => "deo:Methods",
            DiscourseClass::Materials => "deo:Materials",
            DiscourseClass::Results => "deo:Results",
            DiscourseClass::Evaluation => "deo:Evaluation",
            DiscourseClass::Discussion => "deo:Discussion",
            DiscourseClass::Conclusion => "deo:Conclusion",
            DiscourseClass::FutureWork => "deo:FutureWork",
            DiscourseClass::Acknowledgements => "deo:Acknowledgements",
            DiscourseClass::ProblemStatement => "deo:ProblemStatement",
            DiscourseClass::Model => "deo:Model",
        }
    }
}

impl fmt::Display for DiscourseClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.curie())
    }
}

impl FromStr for DiscourseClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DiscourseClass::ALL
            .into_iter()
            .find(|c| c.curie() == s)
            .ok_or_else(|| format!("unknown discourse class {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GazetteerError {
    #[error("gazetteer line {line}: expected `keyword<TAB>curie[,curie...]`")]
    Syntax { line: usize },
    #[error("gazetteer line {line}: keyword {keyword:?} is not normalized (expected {normalized:?})")]
    NotNormalized { line: usize, keyword: String, normalized: String },
    #[error("gazetteer line {line}: duplicate keyword {keyword:?}")]
    DuplicateKeyword { line: usize, keyword: String },
    #[error("gazetteer line {line}: {message}")]
    UnknownClass { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Entry {
    words: Vec<String>,
    classes: BTreeSet<DiscourseClass>,
}

/// Keyword phrase to discourse classes. Immutable once loaded.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Gazetteer {
    entries: Vec<Entry>,
    by_first_word: HashMap<String, Vec<usize>>,
}

const DEFAULT_GAZETTEER: &str = include_str!("../data/gazetteer.tsv");

impl Gazetteer {
    /// The bundled default mapping.
    pub fn bundled() -> Self {
        Gazetteer::parse(DEFAULT_GAZETTEER).expect("bundled gazetteer is valid")
    }

    pub fn bundled_source() -> &'static str {
        DEFAULT_GAZETTEER
    }

    pub fn parse(text: &str) -> Result<Self, GazetteerError> {
        let mut gaz = Gazetteer::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
                continue;
            }
            let (keyword, curies) = raw.split_once('\t').ok_or(GazetteerError::Syntax { line })?;
            let normalized = normalize_title(keyword);
            if normalized != keyword || keyword.is_empty() {
                return Err(GazetteerError::NotNormalized {
                    line,
                    keyword: keyword.to_string(),
                    normalized,
                });
            }
            let classes = curies
                .split(',')
                .map(|c| c.trim().parse::<DiscourseClass>())
                .collect::<Result<BTreeSet<_>, _>>()
                .map_err(|message| GazetteerError::UnknownClass { line, message })?;
            gaz.insert(keyword, classes)
                .map_err(|keyword| GazetteerError::DuplicateKeyword { line, keyword })?;
        }
        Ok(gaz)
    }

    /// Adds a keyword. The keyword is normalized first; an existing keyword
    /// is refused and returned as the error.
    pub fn insert(
        &mut self,
        keyword: &str,
        classes: BTreeSet<DiscourseClass>,
    ) -> Result<(), String> {
        let normalized = normalize_title(keyword);
        let words: Vec<String> = normalized.split(' ').map(str::to_string).collect();
        if normalized.is_empty() || self.entries.iter().any(|e| e.words == words) {
            return Err(normalized);
        }
        self.by_first_word.entry(words[0].clone()).or_default().push(self.entries.len());
        self.entries.push(Entry { words, classes });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keywords(&self) -> impl Iterator<Item = String> + '_ {
        self.entries.iter().map(|e| e.words.join(" "))
    }

    /// Word spans `[start, end)` of every keyword occurrence in a normalized
    /// title, with the entry that matched.
    fn occurrences(&self, words: &[&str]) -> Vec<(usize, usize, usize)> {
        let mut found = Vec::new();
        for start in 0..words.len() {
            let Some(candidates) = self.by_first_word.get(words[start]) else {
                continue;
            };
            for &entry in candidates {
                let kw = &self.entries[entry].words;
                let end = start + kw.len();
                if end <= words.len() && words[start..end].iter().zip(kw).all(|(a, b)| *a == b) {
                    found.push((start, end, entry));
                }
            }
        }
        found
    }
}

/// Lowercases, strips leading section numbering, removes punctuation other
/// than hyphens between two alphanumerics, and collapses whitespace.
pub fn normalize_title(raw: &str) -> String {
    let stripped = strip_numbering(raw).to_lowercase();
    let chars: Vec<char> = stripped.chars().collect();
    let mut cleaned = String::with_capacity(stripped.len());
    for (i, &c) in chars.iter().enumerate() {
        let internal_hyphen = c == '-'
            && i > 0
            && chars[i - 1].is_alphanumeric()
            && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric());
        if c.is_alphanumeric() || internal_hyphen {
            cleaned.push(c);
        } else {
            cleaned.push(' ');
        }
    }
    let mut words: Vec<&str> = cleaned.split_whitespace().collect();
    // Numbering can surface once punctuation is gone ("-3 Results").
    let leading_digits = words.iter().take_while(|w| w.chars().all(|c| c.is_ascii_digit())).count();
    words.drain(..leading_digits);
    words.join(" ")
}

/// Classes of every keyword found as a whole-word subsequence of the
/// normalized title. An occurrence strictly inside a longer occurrence does
/// not count ("future work" beats "work").
pub fn classify_heading(title: &str, gaz: &Gazetteer) -> BTreeSet<DiscourseClass> {
    let normalized = normalize_title(title);
    if normalized.is_empty() {
        return BTreeSet::new();
    }
    let words: Vec<&str> = normalized.split(' ').collect();
    let found = gaz.occurrences(&words);
    let mut classes = BTreeSet::new();
    for &(start, end, entry) in &found {
        let subsumed = found
            .iter()
            .any(|&(s, e, _)| s <= start && end <= e && e - s > end - start);
        if !subsumed {
            classes.extend(gaz.entries[entry].classes.iter().copied());
        }
    }
    classes
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnitKind {
    ArticleName,
    Abstract,
    Person,
    Citation,
    Image,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnitTarget {
    Title,
    Abstract,
    Author(usize),
    Block(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnitTag {
    pub target: UnitTarget,
    pub kind: UnitKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifiedArticle {
    pub article: IdentifiedArticle,
    /// Indexed by block; empty for non-headings and unmatched headings.
    pub heading_classes: Vec<BTreeSet<DiscourseClass>>,
    pub unit_tags: BTreeSet<UnitTag>,
}

impl ClassifiedArticle {
    pub fn classes(&self, block: usize) -> &BTreeSet<DiscourseClass> {
        &self.heading_classes[block]
    }

    pub fn has_tag(&self, target: UnitTarget, kind: UnitKind) -> bool {
        self.unit_tags.contains(&UnitTag { target, kind })
    }

    pub fn count_tags(&self, kind: UnitKind) -> usize {
        self.unit_tags.iter().filter(|t| t.kind == kind).count()
    }
}

impl std::ops::Deref for ClassifiedArticle {
    type Target = IdentifiedArticle;

    fn deref(&self) -> &IdentifiedArticle {
        &self.article
    }
}

pub fn classify_units(article: IdentifiedArticle, gaz: &Gazetteer) -> ClassifiedArticle {
    let mut tags = BTreeSet::new();
    tags.insert(UnitTag { target: UnitTarget::Title, kind: UnitKind::ArticleName });
    if !article.metadata.abstract_text.is_empty() {
        tags.insert(UnitTag { target: UnitTarget::Abstract, kind: UnitKind::Abstract });
    }
    for i in 0..article.metadata.authors.len() {
        tags.insert(UnitTag { target: UnitTarget::Author(i), kind: UnitKind::Person });
    }
    let mut heading_classes = Vec::with_capacity(article.blocks.len());
    for (i, block) in article.blocks.iter().enumerate() {
        let kind = match &block.kind {
            BlockKind::ReferenceEntry { .. } => Some(UnitKind::Citation),
            BlockKind::Figure { .. } => Some(UnitKind::Image),
            BlockKind::Table { .. } => Some(UnitKind::Table),
            _ => None,
        };
        if let Some(kind) = kind {
            tags.insert(UnitTag { target: UnitTarget::Block(i), kind });
        }
        heading_classes.push(match block.kind {
            BlockKind::Heading { .. } => classify_heading(&block.plain_text(), gaz),
            _ => BTreeSet::new(),
        });
    }
    ClassifiedArticle { article, heading_classes, unit_tags: tags }
}
