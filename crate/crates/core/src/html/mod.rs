//! HTML+RDFa output: the element tree, highlight segmentation, annotation
//! rendering, page generation and comment injection.

mod annotation;
mod dom;
mod generate;
mod inject;
mod inline;
mod segments;

pub use annotation::{article_annotations, build_annotation, AnnotationError, AnnotationNode, CONTEXT_CHARS};
pub use dom::{Element, HtmlDocument, HtmlParseError, Node};
pub use generate::{comment_page, comment_pages, generate_html, STYLESHEET, STYLESHEET_PATH};
pub use inject::{inject_comment, inject_comment_node, rendered_block_text, InjectError};
pub use inline::{normalize_runs, HIGHLIGHT_CLASS, HIGHLIGHT_IDS_ATTR};
pub use segments::{compute_segments, AnchorOutOfRange, Segment};
