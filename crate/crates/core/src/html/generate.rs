//! HTML+RDFa generation for a classified article.

use crate::discourse::ClassifiedArticle;
use crate::model::{BlockKind, BlockNode, IdentifiedArticle, Inline};
use crate::rdf::PrefixMap;

use super::annotation::{article_annotations, text_element, AnnotationNode};
use super::dom::{Element, HtmlDocument, Node};
use super::inline::render_parts;
use super::segments::compute_segments;

pub const STYLESHEET_PATH: &str = "css/style.css";
pub const STYLESHEET: &str = include_str!("../../data/style.css");
pub const ANNOTATIONS_CLASS: &str = "annotations";
pub const ANNOTATIONS_HEADING: &str = "Comments";
pub const STANDALONE_LINK_TEXT: &str = "Standalone comment";
pub const BACK_LINK_TEXT: &str = "Back to article";

pub fn generate_html(article: &ClassifiedArticle) -> HtmlDocument {
    let ident = &article.article;
    let base = ident.base_uri();
    let annotations = article_annotations(ident);

    let mut anchors: Vec<Vec<(String, usize, usize)>> = vec![Vec::new(); ident.blocks.len()];
    for (comment, node) in ident.comments.iter().zip(&annotations) {
        anchors[comment.block].push((node.id.clone(), node.start, node.end));
    }

    let mut root = Element::new("article")
        .with_attr("typeof", "schema:ScholarlyArticle swrc:Article")
        .with_attr("about", base)
        .with_child(text_element("h1", &ident.metadata.title).with_attr("property", "schema:name"));
    if !ident.metadata.authors.is_empty() {
        let mut authors = Element::new("div").with_attr("class", "authors");
        for (i, author) in ident.metadata.authors.iter().enumerate() {
            let id = IdentifiedArticle::author_id(i);
            let mut el = Element::new("span")
                .with_attr("id", &id)
                .with_attr("typeof", "schema:Person")
                .with_attr("property", "schema:author")
                .with_attr("resource", ident.fragment_iri(&id))
                .with_child(text_element("span", &author.name).with_attr("property", "schema:name"));
            if let Some(affiliation) = &author.affiliation {
                el.push(text_element("span", affiliation).with_attr("property", "schema:affiliation"));
            }
            if let Some(email) = &author.email {
                el.push(text_element("span", email).with_attr("property", "schema:email"));
            }
            authors.push(el);
        }
        root.push(authors);
    }
    if !ident.metadata.abstract_text.is_empty() {
        root.push(
            Element::new("section")
                .with_attr("class", "abstract")
                .with_child(Element::new("h2").with_text("Abstract"))
                .with_child(text_element("p", &ident.metadata.abstract_text).with_attr("property", "schema:abstract")),
        );
    }

    let parents = ident.parent_sections();
    let enclosing = ident.enclosing_sections();
    let mut open: Vec<(u8, Element)> = Vec::new();
    for (i, block) in ident.blocks.iter().enumerate() {
        let id = &ident.block_ids[i];
        let segments = compute_segments(block.char_len(), &anchors[i]).expect("anchors are valid");
        let parts = render_parts(&block.text_parts(), &segments);
        if let Some(level) = block.heading_level() {
            while open.last().is_some_and(|(l, _)| *l >= level) {
                close_section(&mut open, &mut root);
            }
            let parent = parents[i].map_or_else(|| base.to_string(), |p| ident.fragment_iri(&ident.block_ids[p]));
            let mut typeof_ = vec!["doco:Section"];
            typeof_.extend(article.classes(i).iter().map(|c| c.curie()));
            let section = Element::new("section")
                .with_attr("id", id)
                .with_attr("typeof", typeof_.join(" "))
                .with_attr("property", "schema:isPartOf")
                .with_attr("resource", parent)
                .with_attr("about", ident.fragment_iri(id))
                .with_child(with_nodes(heading_tag(level), parts.into_iter().next().unwrap_or_default()).with_attr("property", "schema:name"));
            open.push((level, section));
            continue;
        }
        let parent = enclosing[i].map_or_else(|| base.to_string(), |p| ident.fragment_iri(&ident.block_ids[p]));
        let container = match open.last_mut() {
            Some((_, el)) => el,
            None => &mut root,
        };
        let mut el = block_element(block, parts)
            .with_attr("id", id)
            .with_attr("property", "schema:isPartOf")
            .with_attr("resource", parent)
            .with_attr("about", ident.fragment_iri(id));
        if let (BlockKind::ReferenceEntry { .. }, Some(Node::Element(link))) = (&block.kind, el.children.first_mut()) {
            link.set_attr("about", base);
            link.set_attr("property", "schema:citation");
            link.set_attr("resource", ident.fragment_iri(id));
        }
        if matches!(block.kind, BlockKind::ReferenceEntry { .. }) {
            let reuse = matches!(container.children.last(), Some(Node::Element(l)) if l.name == "ol" && l.has_class("references"));
            if !reuse {
                container.push(Element::new("ol").with_attr("class", "references"));
            }
            if let Some(Node::Element(list)) = container.children.last_mut() {
                list.push(el);
            }
        } else {
            container.push(el);
        }
    }
    while !open.is_empty() {
        close_section(&mut open, &mut root);
    }

    if !annotations.is_empty() {
        let mut section = Element::new("section")
            .with_attr("class", ANNOTATIONS_CLASS)
            .with_child(Element::new("h2").with_text(ANNOTATIONS_HEADING));
        for node in &annotations {
            section.push(node.to_element(&node.page_path(), STANDALONE_LINK_TEXT));
        }
        root.push(section);
    }

    page(&ident.metadata.title, "", root)
}

fn close_section(open: &mut Vec<(u8, Element)>, root: &mut Element) {
    if let Some((_, section)) = open.pop() {
        match open.last_mut() {
            Some((_, parent)) => parent.push(section),
            None => root.push(section),
        }
    }
}

pub(crate) fn heading_tag(level: u8) -> &'static str {
    ["h2", "h3", "h4", "h5", "h6", "h6"][usize::from(level.clamp(1, 6)) - 1]
}

fn with_nodes(name: &str, nodes: Vec<Node>) -> Element {
    let mut el = Element::new(name);
    el.children = nodes;
    el
}

fn block_element(block: &BlockNode, parts: Vec<Vec<Node>>) -> Element {
    let mut parts = parts.into_iter();
    match &block.kind {
        BlockKind::Paragraph { .. } => with_nodes("p", parts.next().unwrap_or_default()),
        BlockKind::Figure { media_name, caption, width, height } => {
            let mut img = Element::new("img")
                .with_attr("src", format!("media/{media_name}"))
                .with_attr("alt", crate::model::inline_text(caption));
            if let Some(w) = width {
                img.set_attr("width", w.to_string());
            }
            if let Some(h) = height {
                img.set_attr("height", h.to_string());
            }
            let mut figure = Element::new("figure").with_attr("typeof", "schema:ImageObject").with_child(img);
            if has_text(caption) {
                figure.push(with_nodes("figcaption", parts.next().unwrap_or_default()).with_attr("property", "schema:caption"));
            }
            figure
        }
        BlockKind::Table { rows } => {
            let mut tbody = Element::new("tbody");
            for row in rows {
                let mut tr = Element::new("tr");
                for _ in row {
                    tr.push(with_nodes("td", parts.next().unwrap_or_default()));
                }
                tbody.push(tr);
            }
            Element::new("table").with_attr("typeof", "schema:Table").with_child(tbody)
        }
        BlockKind::ReferenceEntry { .. } => Element::new("li")
            .with_attr("typeof", "schema:CreativeWork")
            .with_child(Element::new("span").with_attr("class", "citation-link"))
            .with_child(with_nodes("cite", parts.next().unwrap_or_default()).with_attr("property", "schema:name")),
        BlockKind::List { ordered, .. } => {
            let mut list = Element::new(if *ordered { "ol" } else { "ul" });
            for nodes in parts {
                list.push(with_nodes("li", nodes));
            }
            list
        }
        BlockKind::Heading { .. } => unreachable!("headings open sections"),
    }
}

fn has_text(runs: &[Inline]) -> bool {
    runs.iter().any(|r| !r.text.is_empty())
}

/// Wraps body content in the page skeleton. `root_prefix` is prepended to
/// relative links in the head (`../` for pages in a subdirectory).
pub(crate) fn page(title: &str, root_prefix: &str, content: Element) -> HtmlDocument {
    let head = Element::new("head")
        .with_child(Element::new("meta").with_attr("charset", "utf-8"))
        .with_child(text_element("title", title))
        .with_child(
            Element::new("link")
                .with_attr("rel", "stylesheet")
                .with_attr("href", format!("{root_prefix}{STYLESHEET_PATH}")),
        );
    let body = Element::new("body").with_child(Element::new("main").with_child(content));
    HtmlDocument::new(
        Element::new("html")
            .with_attr("prefix", PrefixMap::default().to_rdfa_attribute())
            .with_child(head)
            .with_child(body),
    )
}

/// The standalone page of one comment, placed under `comments/`.
pub fn comment_page(node: &AnnotationNode, article_title: &str) -> HtmlDocument {
    let link = format!("../article.html#{}", node.source_id);
    page(&format!("{}: {}", node.id, article_title), "../", node.to_element(&link, BACK_LINK_TEXT))
}

/// Standalone pages for every comment, in comment order.
pub fn comment_pages(article: &ClassifiedArticle) -> Vec<(AnnotationNode, HtmlDocument)> {
    article_annotations(&article.article)
        .into_iter()
        .map(|node| {
            let page = comment_page(&node, &article.metadata.title);
            (node, page)
        })
        .collect()
}
