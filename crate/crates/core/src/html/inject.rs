//! Adding a review comment to an already generated document.

use thiserror::Error;

use crate::model::{comment_fragment, is_utc_timestamp, slug_token, BlockRef, Inline, ReviewComment};

use super::annotation::{AnnotationError, AnnotationNode};
use super::dom::{Element, HtmlDocument};
use super::generate::{ANNOTATIONS_CLASS, ANNOTATIONS_HEADING, STANDALONE_LINK_TEXT};
use super::inline::{render_parts, runs_from_nodes};
use super::segments::compute_segments;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InjectError {
    #[error("document was not produced by this generator: {0}")]
    UnrecognizedDocument(String),
    #[error("comment {comment:?}: {message}")]
    AnchorMismatch { comment: String, message: String },
    #[error("comment {comment:?}: id {id:?} is already used in the document")]
    DuplicateId { comment: String, id: String },
    #[error("comment {comment:?}: {message}")]
    InvalidComment { comment: String, message: String },
}

/// Returns a copy of `html` with `comment` added as if the article had been
/// generated with it: the target block is re-highlighted and a new
/// annotation is appended.
pub fn inject_comment(html: &HtmlDocument, comment: &ReviewComment) -> Result<HtmlDocument, InjectError> {
    inject_comment_node(html, comment).map(|(doc, _)| doc)
}

/// Like [`inject_comment`], also returning the new annotation, from which
/// the standalone comment page can be built.
pub fn inject_comment_node(
    html: &HtmlDocument,
    comment: &ReviewComment,
) -> Result<(HtmlDocument, AnnotationNode), InjectError> {
    let cid = &comment.comment_id;
    if slug_token(cid).is_empty() {
        return Err(InjectError::InvalidComment { comment: cid.clone(), message: "id has no usable characters".into() });
    }
    if !is_utc_timestamp(&comment.created) {
        return Err(InjectError::InvalidComment {
            comment: cid.clone(),
            message: format!("created {:?} is not an ISO-8601 UTC timestamp", comment.created),
        });
    }
    let id = comment_fragment(cid);
    if html.find_by_id(&id).is_some() {
        return Err(InjectError::DuplicateId { comment: cid.clone(), id });
    }

    let mut doc = html.clone();
    let article = doc
        .root
        .find_mut(&is_article)
        .ok_or_else(|| InjectError::UnrecognizedDocument("no schema:ScholarlyArticle element".into()))?;
    let base = article
        .attr("about")
        .ok_or_else(|| InjectError::UnrecognizedDocument("article element has no about attribute".into()))?
        .to_string();

    let mut blocks = Vec::new();
    article.find_all(&is_block, &mut blocks);
    let block_ids: Vec<String> = blocks.iter().filter_map(|b| b.attr("id")).map(str::to_string).collect();
    let block_id = match &comment.anchor.block {
        BlockRef::Index(i) => block_ids.get(*i).cloned(),
        BlockRef::Id(b) => block_ids.iter().find(|x| *x == b).cloned(),
    }
    .ok_or_else(|| InjectError::AnchorMismatch {
        comment: cid.clone(),
        message: format!("no block {}", comment.anchor.block),
    })?;
    let source_iri = format!("{base}#{block_id}");

    let mut anchors = existing_anchors(article, &source_iri)?;

    let block = article.find_mut(&|e| e.attr("id") == Some(block_id.as_str())).expect("block was found above");
    let mut containers = text_containers_mut(block);
    let parts: Vec<Vec<Inline>> = containers.iter().map(|c| runs_from_nodes(&c.children)).collect();
    let text: String = parts.iter().flatten().map(|r| r.text.as_str()).collect();
    let node = AnnotationNode::resolve(&base, &block_id, &text, comment).map_err(|e| match e {
        AnnotationError::OutOfRange(r) => InjectError::AnchorMismatch {
            comment: cid.clone(),
            message: format!("range [{}, {}) is outside the block text of length {}", r.start, r.end, r.len),
        },
        other => InjectError::AnchorMismatch { comment: cid.clone(), message: other.to_string() },
    })?;
    anchors.push((node.id.clone(), node.start, node.end));
    let segments = compute_segments(text.chars().count(), &anchors)
        .map_err(|e| InjectError::UnrecognizedDocument(e.to_string()))?;
    let slices: Vec<&[Inline]> = parts.iter().map(Vec::as_slice).collect();
    for (container, nodes) in containers.iter_mut().zip(render_parts(&slices, &segments)) {
        container.children = nodes;
    }

    let aside = node.to_element(&node.page_path(), STANDALONE_LINK_TEXT);
    let has_section = article.child_elements().any(is_annotations_section);
    if !has_section {
        article.push(
            Element::new("section")
                .with_attr("class", ANNOTATIONS_CLASS)
                .with_child(Element::new("h2").with_text(ANNOTATIONS_HEADING)),
        );
    }
    let section = article
        .child_elements_mut()
        .find(|e| is_annotations_section(e))
        .expect("annotations section exists");
    section.push(aside);
    Ok((doc, node))
}

fn is_article(e: &Element) -> bool {
    e.name == "article"
        && e.attr("typeof").is_some_and(|t| t.split_whitespace().any(|x| x == "schema:ScholarlyArticle"))
}

fn is_block(e: &Element) -> bool {
    e.attr("id").is_some() && e.attr("property").is_some_and(|p| p.split_whitespace().any(|x| x == "schema:isPartOf"))
}

fn is_annotations_section(e: &Element) -> bool {
    e.name == "section" && e.has_class(ANNOTATIONS_CLASS)
}

/// Anchors of the annotations already targeting `source_iri`, in document
/// order.
fn existing_anchors(article: &Element, source_iri: &str) -> Result<Vec<(String, usize, usize)>, InjectError> {
    let mut asides = Vec::new();
    article.find_all(&|e| e.name == "aside" && e.has_class("annotation"), &mut asides);
    let mut anchors = Vec::new();
    for aside in asides {
        let targets_block = aside
            .find(&|e| e.attr("property") == Some("oa:hasSource"))
            .and_then(|e| e.attr("resource"))
            == Some(source_iri);
        if !targets_block {
            continue;
        }
        let offset = |prop: &str| {
            aside
                .find(&|e| e.attr("property") == Some(prop))
                .and_then(|e| e.attr("content"))
                .and_then(|v| v.parse::<usize>().ok())
                .ok_or_else(|| InjectError::UnrecognizedDocument(format!("annotation without {prop}")))
        };
        let id = aside.attr("id").unwrap_or_default().to_string();
        anchors.push((id, offset("oa:start")?, offset("oa:end")?));
    }
    Ok(anchors)
}

/// The elements whose content makes up the block's text, in order.
pub(crate) fn text_containers_mut(block: &mut Element) -> Vec<&mut Element> {
    match block.name.as_str() {
        "section" => block.child_elements_mut().filter(|c| is_heading_tag(&c.name)).take(1).collect(),
        "p" => vec![block],
        "figure" => block.child_elements_mut().filter(|c| c.name == "figcaption").collect(),
        "table" => block
            .child_elements_mut()
            .flat_map(|tbody| tbody.child_elements_mut())
            .flat_map(|tr| tr.child_elements_mut())
            .collect(),
        "li" => block.child_elements_mut().filter(|c| c.name == "cite").collect(),
        "ul" | "ol" => block.child_elements_mut().filter(|c| c.name == "li").collect(),
        _ => Vec::new(),
    }
}

fn is_heading_tag(name: &str) -> bool {
    matches!(name, "h1" | "h2" | "h3" | "h4" | "h5" | "h6")
}

/// Plain text of a block element as rendered.
pub fn rendered_block_text(block: &Element) -> String {
    let mut copy = block.clone();
    text_containers_mut(&mut copy).iter().map(|c| c.text_content()).collect()
}

