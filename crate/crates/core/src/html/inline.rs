//! Marked inline runs to DOM nodes and back, with highlight spans laid over
//! segment boundaries.

use crate::model::{Inline, Mark};

use super::dom::{Element, Node};
use super::segments::Segment;

pub const HIGHLIGHT_CLASS: &str = "highlight";
pub const HIGHLIGHT_IDS_ATTR: &str = "data-comment-ids";

/// Canonical form of a run list: marks sorted and deduplicated, empty runs
/// dropped, neighbours with equal marks merged.
pub fn normalize_runs(runs: &[Inline]) -> Vec<Inline> {
    let mut out: Vec<Inline> = Vec::with_capacity(runs.len());
    for run in runs {
        if run.text.is_empty() {
            continue;
        }
        let mut marks = run.marks.clone();
        marks.sort();
        marks.dedup();
        match out.last_mut() {
            Some(last) if last.marks == marks => last.text.push_str(&run.text),
            _ => out.push(Inline { text: run.text.clone(), marks }),
        }
    }
    out
}

struct Piece<'a> {
    text: String,
    marks: &'a [Mark],
    covering: &'a [String],
}

/// Renders the text parts of one block. Segment offsets run over the
/// concatenation of all parts; each part gets its own node list.
pub fn render_parts(parts: &[&[Inline]], segments: &[Segment]) -> Vec<Vec<Node>> {
    let mut offset = 0;
    let mut rendered = Vec::with_capacity(parts.len());
    for part in parts {
        let runs = normalize_runs(part);
        let mut pieces: Vec<Piece> = Vec::new();
        for run in &runs {
            let chars: Vec<char> = run.text.chars().collect();
            let run_start = offset;
            let run_end = offset + chars.len();
            for seg in segments.iter().filter(|s| s.start < run_end && s.end > run_start) {
                let from = seg.start.max(run_start) - run_start;
                let to = seg.end.min(run_end) - run_start;
                pieces.push(Piece {
                    text: chars[from..to].iter().collect(),
                    marks: &run.marks,
                    covering: &seg.covering,
                });
            }
            if segments.is_empty() {
                pieces.push(Piece { text: run.text.clone(), marks: &run.marks, covering: &[] });
            }
            offset = run_end;
        }
        rendered.push(pieces_to_nodes(pieces));
    }
    rendered
}

fn pieces_to_nodes(pieces: Vec<Piece>) -> Vec<Node> {
    let mut nodes = Vec::new();
    let mut i = 0;
    while i < pieces.len() {
        let covering = pieces[i].covering;
        let mut j = i;
        while j < pieces.len() && pieces[j].covering == covering {
            j += 1;
        }
        let mut group: Vec<Node> = Vec::new();
        let mut k = i;
        while k < j {
            let marks = pieces[k].marks;
            let mut text = String::new();
            while k < j && pieces[k].marks == marks {
                text.push_str(&pieces[k].text);
                k += 1;
            }
            group.push(marked_node(text, marks));
        }
        if covering.is_empty() {
            nodes.extend(group);
        } else {
            let mut span = Element::new("span")
                .with_attr("class", HIGHLIGHT_CLASS)
                .with_attr(HIGHLIGHT_IDS_ATTR, covering.join(" "));
            span.children = group;
            nodes.push(Node::Element(span));
        }
        i = j;
    }
    nodes
}

fn marked_node(text: String, marks: &[Mark]) -> Node {
    let mut node = Node::Text(text);
    for mark in marks.iter().rev() {
        let el = match mark {
            Mark::Link { href } => Element::new("a").with_attr("href", href),
            Mark::Strong => Element::new("strong"),
            Mark::Emphasis => Element::new("em"),
        };
        node = Node::Element(el.with_child(node));
    }
    node
}

/// Reads rendered inline content back into normalized runs, dropping
/// highlight spans.
pub fn runs_from_nodes(nodes: &[Node]) -> Vec<Inline> {
    let mut runs = Vec::new();
    collect_runs(nodes, &mut Vec::new(), &mut runs);
    normalize_runs(&runs)
}

fn collect_runs(nodes: &[Node], marks: &mut Vec<Mark>, out: &mut Vec<Inline>) {
    for node in nodes {
        match node {
            Node::Text(t) => out.push(Inline { text: t.clone(), marks: marks.clone() }),
            Node::Element(el) => {
                let mark = match el.name.as_str() {
                    "a" => Some(Mark::Link { href: el.attr("href").unwrap_or_default().to_string() }),
                    "strong" => Some(Mark::Strong),
                    "em" => Some(Mark::Emphasis),
                    _ => None,
                };
                let pushed = mark.is_some();
                marks.extend(mark);
                collect_runs(&el.children, marks, out);
                if pushed {
                    marks.pop();
                }
            }
        }
    }
}
