//! A small HTML element tree with a canonical serializer and a strict parser
//! for well-formed documents.
//!
//! Serialization is deterministic: attributes are written in a fixed order,
//! block-level content is indented by two spaces per level and elements that
//! hold text (or phrasing elements) are written on a single line. Newlines
//! inside text and attribute values are written as character references, so
//! every raw newline in the output is formatting and the parser drops
//! whitespace-only text that contains one.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Element(Element),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub name: String,
    attrs: Vec<(String, String)>,
    pub children: Vec<Node>,
}

const ATTRIBUTE_ORDER: [&str; 8] =
    ["id", "class", "typeof", "property", "resource", "about", "content", "datatype"];

fn attribute_rank(name: &str) -> (usize, &str) {
    let rank = ATTRIBUTE_ORDER.iter().position(|a| *a == name).unwrap_or(ATTRIBUTE_ORDER.len());
    (rank, name)
}

const VOID_ELEMENTS: [&str; 13] = [
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "source", "track", "wbr",
];

const PHRASING_ELEMENTS: [&str; 14] = [
    "a", "abbr", "b", "br", "cite", "code", "em", "i", "mark", "q", "span", "strong", "sup", "time",
];

impl Element {
    pub fn new(name: &str) -> Self {
        Element { name: name.to_string(), attrs: Vec::new(), children: Vec::new() }
    }

    /// Sets an attribute, keeping attributes in canonical order.
    pub fn set_attr(&mut self, name: &str, value: impl Into<String>) {
        let value = value.into();
        if let Some(slot) = self.attrs.iter_mut().find(|(n, _)| n == name) {
            slot.1 = value;
            return;
        }
        let pos = self
            .attrs
            .iter()
            .position(|(n, _)| attribute_rank(n) > attribute_rank(name))
            .unwrap_or(self.attrs.len());
        self.attrs.insert(pos, (name.to_string(), value));
    }

    pub fn with_attr(mut self, name: &str, value: impl Into<String>) -> Self {
        self.set_attr(name, value);
        self
    }

    pub fn with_child(mut self, child: impl Into<Node>) -> Self {
        self.children.push(child.into());
        self
    }

    pub fn with_text(self, text: impl Into<String>) -> Self {
        self.with_child(Node::Text(text.into()))
    }

    pub fn push(&mut self, child: impl Into<Node>) {
        self.children.push(child.into());
    }

    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attrs.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_str())
    }

    pub fn attrs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.attrs.iter().map(|(n, v)| (n.as_str(), v.as_str()))
    }

    pub fn has_class(&self, class: &str) -> bool {
        self.attr("class").is_some_and(|c| c.split_whitespace().any(|x| x == class))
    }

    pub fn child_elements(&self) -> impl Iterator<Item = &Element> {
        self.children.iter().filter_map(|n| match n {
            Node::Element(e) => Some(e),
            Node::Text(_) => None,
        })
    }

    pub fn child_elements_mut(&mut self) -> impl Iterator<Item = &mut Element> {
        self.children.iter_mut().filter_map(|n| match n {
            Node::Element(e) => Some(e),
            Node::Text(_) => None,
        })
    }

    /// Concatenated descendant text.
    pub fn text_content(&self) -> String {
        let mut out = String::new();
        self.collect_text(&mut out);
        out
    }

    fn collect_text(&self, out: &mut String) {
        for child in &self.children {
            match child {
                Node::Text(t) => out.push_str(t),
                Node::Element(e) => e.collect_text(out),
            }
        }
    }

    /// Depth-first pre-order search, including `self`.
    pub fn find(&self, pred: &dyn Fn(&Element) -> bool) -> Option<&Element> {
        if pred(self) {
            return Some(self);
        }
        self.child_elements().find_map(|c| c.find(pred))
    }

    pub fn find_mut(&mut self, pred: &dyn Fn(&Element) -> bool) -> Option<&mut Element> {
        if pred(self) {
            return Some(self);
        }
        self.child_elements_mut().find_map(|c| c.find_mut(pred))
    }

    pub fn find_all<'a>(&'a self, pred: &dyn Fn(&Element) -> bool, out: &mut Vec<&'a Element>) {
        if pred(self) {
            out.push(self);
        }
        for child in self.child_elements() {
            child.find_all(pred, out);
        }
    }

    pub fn find_by_id(&self, id: &str) -> Option<&Element> {
        self.find(&|e| e.attr("id") == Some(id))
    }

    fn is_inline_context(&self) -> bool {
        self.children.is_empty()
            || self.children.iter().any(|c| match c {
                Node::Text(_) => true,
                Node::Element(e) => PHRASING_ELEMENTS.contains(&e.name.as_str()),
            })
    }
}

impl From<Element> for Node {
    fn from(e: Element) -> Self {
        Node::Element(e)
    }
}

impl From<&str> for Node {
    fn from(t: &str) -> Self {
        Node::Text(t.to_string())
    }
}

impl From<String> for Node {
    fn from(t: String) -> Self {
        Node::Text(t)
    }
}

/// A complete HTML document. The doctype is always `<!DOCTYPE html>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HtmlDocument {
    pub root: Element,
}

impl HtmlDocument {
    pub fn new(root: Element) -> Self {
        HtmlDocument { root }
    }

    pub fn to_html(&self) -> String {
        let mut out = String::from("<!DOCTYPE html>\n");
        write_block(&self.root, 0, &mut out);
        out
    }

    pub fn parse(text: &str) -> Result<Self, HtmlParseError> {
        let mut nodes = Parser { src: text, pos: 0 }.parse_nodes(None)?;
        nodes.retain(|n| !matches!(n, Node::Text(t) if t.trim().is_empty()));
        match nodes.len() {
            1 => match nodes.pop() {
                Some(Node::Element(root)) => Ok(HtmlDocument { root }),
                _ => Err(HtmlParseError { offset: 0, message: "document has no root element".into() }),
            },
            0 => Err(HtmlParseError { offset: 0, message: "document has no root element".into() }),
            _ => Err(HtmlParseError { offset: 0, message: "document has more than one root node".into() }),
        }
    }

    pub fn find_by_id(&self, id: &str) -> Option<&Element> {
        self.root.find_by_id(id)
    }
}

fn write_block(el: &Element, depth: usize, out: &mut String) {
    for _ in 0..depth {
        out.push_str("  ");
    }
    write_open_tag(el, out);
    if VOID_ELEMENTS.contains(&el.name.as_str()) {
        out.push('\n');
        return;
    }
    if el.is_inline_context() {
        for child in &el.children {
            write_inline(child, out);
        }
    } else {
        out.push('\n');
        for child in el.child_elements() {
            write_block(child, depth + 1, out);
        }
        for _ in 0..depth {
            out.push_str("  ");
        }
    }
    let _ = writeln!(out, "</{}>", el.name);
}

fn write_inline(node: &Node, out: &mut String) {
    match node {
        Node::Text(t) => escape_into(t, false, out),
        Node::Element(el) => {
            write_open_tag(el, out);
            if VOID_ELEMENTS.contains(&el.name.as_str()) {
                return;
            }
            for child in &el.children {
                write_inline(child, out);
            }
            let _ = write!(out, "</{}>", el.name);
        }
    }
}

fn write_open_tag(el: &Element, out: &mut String) {
    out.push('<');
    out.push_str(&el.name);
    for (name, value) in &el.attrs {
        out.push(' ');
        out.push_str(name);
        out.push_str("=\"");
        escape_into(value, true, out);
        out.push('"');
    }
    out.push('>');
}

fn escape_into(text: &str, attribute: bool, out: &mut String) {
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' if attribute => out.push_str("&quot;"),
            '\t' if !attribute => out.push('\t'),
            c if c.is_control() => {
                let _ = write!(out, "&#{};", c as u32);
            }
            c => out.push(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("HTML parse error at byte {offset}: {message}")]
pub struct HtmlParseError {
    pub offset: usize,
    pub message: String,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn error(&self, message: impl Into<String>) -> HtmlParseError {
        HtmlParseError { offset: self.pos, message: message.into() }
    }

    fn parse_nodes(&mut self, parent: Option<&str>) -> Result<Vec<Node>, HtmlParseError> {
        let mut nodes = Vec::new();
        loop {
            let rest = self.rest();
            if rest.is_empty() {
                return match parent {
                    Some(name) => Err(self.error(format!("unclosed <{name}>"))),
                    None => Ok(nodes),
                };
            }
            if rest.starts_with("<!--") {
                let end = rest.find("-->").ok_or_else(|| self.error("unterminated comment"))?;
                self.pos += end + 3;
            } else if rest.starts_with("<!") || rest.starts_with("<?") {
                let end = rest.find('>').ok_or_else(|| self.error("unterminated declaration"))?;
                self.pos += end + 1;
            } else if let Some(tail) = rest.strip_prefix("</") {
                let end = tail.find('>').ok_or_else(|| self.error("unterminated end tag"))?;
                let name = tail[..end].trim().to_ascii_lowercase();
                if parent != Some(name.as_str()) {
                    return Err(self.error(format!(
                        "unexpected </{name}>, expected {}",
                        parent.map(|p| format!("</{p}>")).unwrap_or_else(|| "end of input".into())
                    )));
                }
                self.pos += 2 + end + 1;
                return Ok(nodes);
            } else if rest.starts_with('<') && rest[1..].starts_with(|c: char| c.is_ascii_alphabetic()) {
                nodes.push(Node::Element(self.parse_element()?));
            } else {
                let end = rest
                    .char_indices()
                    .skip(1)
                    .find(|&(_, c)| c == '<')
                    .map_or(rest.len(), |(i, _)| i);
                let raw = &rest[..end];
                self.pos += end;
                if raw.trim().is_empty() && raw.contains('\n') {
                    continue;
                }
                let text = decode_entities(raw);
                match nodes.last_mut() {
                    Some(Node::Text(prev)) => prev.push_str(&text),
                    _ => nodes.push(Node::Text(text)),
                }
            }
        }
    }

    fn parse_element(&mut self) -> Result<Element, HtmlParseError> {
        self.pos += 1;
        let name_len = self
            .rest()
            .find(|c: char| c.is_whitespace() || c == '>' || c == '/')
            .ok_or_else(|| self.error("unterminated start tag"))?;
        let name = self.rest()[..name_len].to_ascii_lowercase();
        self.pos += name_len;
        let mut el = Element::new(&name);
        let mut self_closing = false;
        loop {
            self.pos += self.rest().len() - self.rest().trim_start().len();
            let rest = self.rest();
            if rest.starts_with('>') {
                self.pos += 1;
                break;
            }
            if rest.starts_with("/>") {
                self.pos += 2;
                self_closing = true;
                break;
            }
            if rest.is_empty() {
                return Err(self.error("unterminated start tag"));
            }
            let attr_len = rest
                .find(|c: char| c.is_whitespace() || c == '=' || c == '>' || c == '/')
                .ok_or_else(|| self.error("unterminated attribute"))?;
            if attr_len == 0 {
                return Err(self.error("malformed attribute"));
            }
            let attr_name = rest[..attr_len].to_ascii_lowercase();
            self.pos += attr_len;
            let after = self.rest().trim_start();
            let value = if let Some(v) = after.strip_prefix('=') {
                self.pos = self.src.len() - v.len();
                let v = v.trim_start();
                self.pos = self.src.len() - v.len();
                if let Some(quote) = v.chars().next().filter(|c| *c == '"' || *c == '\'') {
                    let body = &v[1..];
                    let end = body.find(quote).ok_or_else(|| self.error("unterminated attribute value"))?;
                    self.pos += 1 + end + 1;
                    decode_entities(&body[..end])
                } else {
                    let end = v.find(|c: char| c.is_whitespace() || c == '>').unwrap_or(v.len());
                    self.pos += end;
                    decode_entities(&v[..end])
                }
            } else {
                String::new()
            };
            if el.attr(&attr_name).is_some() {
                return Err(self.error(format!("duplicate attribute {attr_name:?}")));
            }
            el.set_attr(&attr_name, value);
        }
        if self_closing || VOID_ELEMENTS.contains(&name.as_str()) {
            return Ok(el);
        }
        if name == "script" || name == "style" {
            let close = format!("</{name}");
            let end = self
                .rest()
                .to_ascii_lowercase()
                .find(&close)
                .ok_or_else(|| self.error(format!("unclosed <{name}>")))?;
            let raw = &self.rest()[..end];
            if !raw.is_empty() {
                el.children.push(Node::Text(raw.to_string()));
            }
            self.pos += end;
            let tail = self.rest();
            let gt = tail.find('>').ok_or_else(|| self.error("unterminated end tag"))?;
            self.pos += gt + 1;
            return Ok(el);
        }
        el.children = self.parse_nodes(Some(&name))?;
        Ok(el)
    }
}

fn decode_entities(raw: &str) -> String {
    if !raw.contains('&') {
        return raw.to_string();
    }
    let mut out = String::with_capacity(raw.len());
    let mut rest = raw;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        rest = &rest[amp..];
        let decoded = rest.find(';').filter(|&semi| semi <= 12).and_then(|semi| {
            let entity = &rest[1..semi];
            let c = if let Some(num) = entity.strip_prefix('#') {
                let code = match num.strip_prefix(['x', 'X']) {
                    Some(hex) => u32::from_str_radix(hex, 16).ok()?,
                    None => num.parse().ok()?,
                };
                char::from_u32(code)?
            } else {
                match entity {
                    "amp" => '&',
                    "lt" => '<',
                    "gt" => '>',
                    "quot" => '"',
                    "apos" => '\'',
                    "nbsp" => '\u{a0}',
                    _ => return None,
                }
            };
            Some((c, semi + 1))
        });
        match decoded {
            Some((c, len)) => {
                out.push(c);
                rest = &rest[len..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}
