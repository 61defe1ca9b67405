//! Review comments as Web Annotations: the resolved annotation record and
//! its `<aside>` rendering.

use thiserror::Error;

use crate::discourse::ClassifiedArticle;
use crate::model::{char_slice, comment_fragment, BlockRef, IdentifiedArticle, ReviewComment};

use super::dom::Element;
use super::segments::AnchorOutOfRange;

/// Characters of context kept on each side of the quoted text.
pub const CONTEXT_CHARS: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationNode {
    /// Fragment id, `comment-...`.
    pub id: String,
    pub iri: String,
    pub body: String,
    pub creator: String,
    pub created: String,
    pub source_id: String,
    pub source_iri: String,
    pub exact: String,
    pub prefix: String,
    pub suffix: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnnotationError {
    #[error("comment {comment:?} targets unknown block {block}")]
    UnknownBlock { comment: String, block: String },
    #[error(transparent)]
    OutOfRange(#[from] AnchorOutOfRange),
    #[error("comment {comment:?}: expected {expected:?} at the anchor but found {found:?}")]
    QuoteMismatch { comment: String, expected: String, found: String },
}

impl AnnotationNode {
    /// Resolves `comment` against `text`, the plain text of block `source_id`.
    pub fn resolve(
        base_uri: &str,
        source_id: &str,
        text: &str,
        comment: &ReviewComment,
    ) -> Result<Self, AnnotationError> {
        let anchor = &comment.anchor;
        let len = text.chars().count();
        if anchor.start >= anchor.end || anchor.end > len {
            return Err(AnchorOutOfRange {
                comment_id: comment.comment_id.clone(),
                start: anchor.start,
                end: anchor.end,
                len,
            }
            .into());
        }
        let exact = char_slice(text, anchor.start, anchor.end);
        if let Some(expected) = &anchor.exact {
            if *expected != exact {
                return Err(AnnotationError::QuoteMismatch {
                    comment: comment.comment_id.clone(),
                    expected: expected.clone(),
                    found: exact,
                });
            }
        }
        let id = comment_fragment(&comment.comment_id);
        Ok(AnnotationNode {
            iri: format!("{base_uri}#{id}"),
            id,
            body: comment.body_text.clone(),
            creator: comment.author_name.clone(),
            created: comment.created.clone(),
            source_id: source_id.to_string(),
            source_iri: format!("{base_uri}#{source_id}"),
            exact,
            prefix: char_slice(text, anchor.start.saturating_sub(CONTEXT_CHARS), anchor.start),
            suffix: char_slice(text, anchor.end, anchor.end + CONTEXT_CHARS),
            start: anchor.start,
            end: anchor.end,
        })
    }

    pub fn target_iri(&self) -> String {
        format!("{}-target", self.iri)
    }

    pub fn quote_selector_iri(&self) -> String {
        format!("{}-selector-quote", self.iri)
    }

    pub fn position_selector_iri(&self) -> String {
        format!("{}-selector-pos", self.iri)
    }

    /// Archive path of the standalone comment page.
    pub fn page_path(&self) -> String {
        format!("comments/{}.html", self.id)
    }

    /// The `<aside>` carrying the annotation. `link` is the href of the
    /// trailing navigation link.
    pub fn to_element(&self, link: &str, link_text: &str) -> Element {
        let quote = Element::new("div")
            .with_attr("typeof", "oa:TextQuoteSelector")
            .with_attr("property", "oa:hasSelector")
            .with_attr("resource", self.quote_selector_iri())
            .with_child(Element::new("span").with_attr("property", "oa:prefix").with_attr("content", &self.prefix))
            .with_child(text_element("q", &self.exact).with_attr("property", "oa:exact"))
            .with_child(Element::new("span").with_attr("property", "oa:suffix").with_attr("content", &self.suffix));
        let position = Element::new("div")
            .with_attr("typeof", "oa:TextPositionSelector")
            .with_attr("property", "oa:hasSelector")
            .with_attr("resource", self.position_selector_iri())
            .with_child(offset_element("oa:start", self.start))
            .with_child(offset_element("oa:end", self.end));
        let target = Element::new("div")
            .with_attr("typeof", "oa:SpecificResource")
            .with_attr("property", "oa:hasTarget")
            .with_attr("resource", self.target_iri())
            .with_child(
                Element::new("div").with_attr("property", "oa:hasSource").with_attr("resource", &self.source_iri),
            )
            .with_child(quote)
            .with_child(position);
        let meta = Element::new("p")
            .with_attr("class", "annotation-meta")
            .with_child(text_element("span", &self.creator).with_attr("property", "dcterms:creator"))
            .with_child(
                text_element("time", &self.created)
                    .with_attr("property", "dcterms:created")
                    .with_attr("content", &self.created)
                    .with_attr("datatype", "xsd:dateTime"),
            )
            .with_child(
                Element::new("span").with_attr("property", "oa:motivatedBy").with_attr("resource", "oa:commenting"),
            );
        Element::new("aside")
            .with_attr("id", &self.id)
            .with_attr("class", "annotation")
            .with_attr("typeof", "oa:Annotation")
            .with_attr("about", &self.iri)
            .with_child(meta)
            .with_child(text_element("div", &self.body).with_attr("property", "oa:bodyValue"))
            .with_child(target)
            .with_child(Element::new("p").with_child(text_element("a", link_text).with_attr("href", link)))
    }
}

fn offset_element(property: &str, value: usize) -> Element {
    Element::new("span")
        .with_attr("property", property)
        .with_attr("content", value.to_string())
        .with_attr("datatype", "xsd:nonNegativeInteger")
}

/// An element holding `text`, or nothing when the text is empty.
pub(crate) fn text_element(name: &str, text: &str) -> Element {
    let el = Element::new(name);
    if text.is_empty() {
        el
    } else {
        el.with_text(text)
    }
}

/// Resolves the comment's anchor against the article and builds its
/// annotation record.
pub fn build_annotation(
    comment: &ReviewComment,
    article: &ClassifiedArticle,
) -> Result<AnnotationNode, AnnotationError> {
    annotation_in(comment, &article.article)
}

pub(crate) fn annotation_in(
    comment: &ReviewComment,
    article: &IdentifiedArticle,
) -> Result<AnnotationNode, AnnotationError> {
    let index = match &comment.anchor.block {
        BlockRef::Index(i) => (*i < article.blocks.len()).then_some(*i),
        BlockRef::Id(id) => article.block_index(id),
    }
    .ok_or_else(|| AnnotationError::UnknownBlock {
        comment: comment.comment_id.clone(),
        block: comment.anchor.block.to_string(),
    })?;
    AnnotationNode::resolve(
        article.base_uri(),
        &article.block_ids[index],
        &article.blocks[index].plain_text(),
        comment,
    )
}

/// Annotation records for every comment of a validated article, in comment
/// order.
pub fn article_annotations(article: &IdentifiedArticle) -> Vec<AnnotationNode> {
    article
        .comments
        .iter()
        .map(|c| annotation_in(&c.comment, article).expect("anchors are valid after identification"))
        .collect()
}
