//! Canonical N-Triples: one triple per line, lines sorted by the serialized
//! (subject, predicate, object), LF terminated.

use thiserror::Error;

use super::term::{Graph, Iri, Literal, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed N-Triples at line {line}: {message}")]
pub struct MalformedNTriples {
    pub line: usize,
    pub message: String,
}

pub fn serialize_ntriples(graph: &Graph) -> String {
    let mut rows: Vec<(String, String, String)> = graph
        .iter()
        .map(|t| (t.subject.to_string(), t.predicate.to_string(), t.object.to_string()))
        .collect();
    rows.sort();
    let mut out = String::new();
    for (s, p, o) in rows {
        out.push_str(&s);
        out.push(' ');
        out.push_str(&p);
        out.push(' ');
        out.push_str(&o);
        out.push_str(" .\n");
    }
    out
}

pub fn parse_ntriples(text: &str) -> Result<Graph, MalformedNTriples> {
    let mut graph = Graph::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: &str| MalformedNTriples { line: line_no, message: message.to_string() };
        let mut cursor = Cursor { rest: line.trim_start() };
        if cursor.rest.is_empty() || cursor.rest.starts_with('#') {
            continue;
        }
        let subject = cursor.iri().map_err(|m| err(&m))?;
        cursor.skip_ws();
        let predicate = cursor.iri().map_err(|m| err(&m))?;
        cursor.skip_ws();
        let object = if cursor.rest.starts_with('<') {
            Term::Iri(cursor.iri().map_err(|m| err(&m))?)
        } else if cursor.rest.starts_with('"') {
            Term::Literal(cursor.literal().map_err(|m| err(&m))?)
        } else if cursor.rest.starts_with("_:") {
            return Err(err("blank nodes are not supported"));
        } else {
            return Err(err("expected IRI or literal object"));
        };
        cursor.skip_ws();
        let Some(after) = cursor.rest.strip_prefix('.') else {
            return Err(err("expected terminating '.'"));
        };
        let after = after.trim_start();
        if !(after.is_empty() || after.starts_with('#')) {
            return Err(err("trailing content after '.'"));
        }
        graph.insert(Triple::new(subject, predicate, object));
    }
    Ok(graph)
}

/// Reads one `<IRI>` or literal term from the start of `text` and returns it
/// with the unread remainder.
pub(crate) fn read_term(text: &str) -> Result<(Term, &str), String> {
    let mut cursor = Cursor { rest: text };
    let term = if text.starts_with('"') {
        Term::Literal(cursor.literal()?)
    } else {
        Term::Iri(cursor.iri()?)
    };
    Ok((term, cursor.rest))
}

struct Cursor<'a> {
    rest: &'a str,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start_matches([' ', '\t']);
    }

    fn iri(&mut self) -> Result<Iri, String> {
        if self.rest.starts_with("_:") {
            return Err("blank nodes are not supported".into());
        }
        let body = self.rest.strip_prefix('<').ok_or("expected '<'")?;
        let end = body.find('>').ok_or("unterminated IRI")?;
        let raw = &body[..end];
        self.rest = &body[end + 1..];
        let value = unescape(raw, false)?;
        if value.chars().any(|c| c == ' ' || c == '<' || c == '"') {
            return Err(format!("invalid character in IRI {value:?}"));
        }
        if !value.contains(':') {
            return Err(format!("relative IRI {value:?}"));
        }
        Ok(Iri::new(value))
    }

    fn literal(&mut self) -> Result<Literal, String> {
        let body = &self.rest[1..];
        let mut end = None;
        let mut escaped = false;
        for (i, c) in body.char_indices() {
            match c {
                _ if escaped => escaped = false,
                '\\' => escaped = true,
                '"' => {
                    end = Some(i);
                    break;
                }
                _ => {}
            }
        }
        let end = end.ok_or("unterminated literal")?;
        let lexical = unescape(&body[..end], true)?;
        self.rest = &body[end + 1..];
        if let Some(tail) = self.rest.strip_prefix("^^") {
            self.rest = tail;
            let datatype = self.iri()?;
            Ok(Literal::typed(lexical, datatype))
        } else if let Some(tail) = self.rest.strip_prefix('@') {
            let len = tail
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-'))
                .unwrap_or(tail.len());
            if len == 0 {
                return Err("empty language tag".into());
            }
            let language = tail[..len].to_string();
            self.rest = &tail[len..];
            Ok(Literal { lexical, datatype: None, language: Some(language) })
        } else {
            Ok(Literal::plain(lexical))
        }
    }
}

fn unescape(raw: &str, allow_echar: bool) -> Result<String, String> {
    let mut out = String::with_capacity(raw.len());
    let mut chars = raw.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        let e = chars.next().ok_or("dangling escape")?;
        match e {
            'u' | 'U' => {
                let n = if e == 'u' { 4 } else { 8 };
                let hex: String = chars.by_ref().take(n).collect();
                if hex.len() != n {
                    return Err("truncated unicode escape".into());
                }
                let code = u32::from_str_radix(&hex, 16).map_err(|_| "bad unicode escape")?;
                out.push(char::from_u32(code).ok_or("invalid code point")?);
            }
            't' if allow_echar => out.push('\t'),
            'b' if allow_echar => out.push('\u{08}'),
            'n' if allow_echar => out.push('\n'),
            'r' if allow_echar => out.push('\r'),
            'f' if allow_echar => out.push('\u{0C}'),
            '"' if allow_echar => out.push('"'),
            '\'' if allow_echar => out.push('\''),
            '\\' if allow_echar => out.push('\\'),
            other => return Err(format!("invalid escape \\{other}")),
        }
    }
    Ok(out)
}
