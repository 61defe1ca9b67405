//! Query files: one triple pattern per line. Terms are `?var`, `<IRI>`,
//! `prefix:local`, `a` (rdf:type) or an N-Triples literal. A trailing `.`
//! is optional; blank lines and lines starting with `#` are skipped.

use thiserror::Error;

use super::bgp::{is_var_name, PatternTerm, TriplePattern};
use crate::rdf::vocab::RDF_TYPE;
use crate::rdf::{read_term, PrefixMap, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("query has no triple patterns")]
    Empty,
    #[error("query line {line}: {message}")]
    Syntax { line: usize, message: String },
}

pub fn parse_query(text: &str, prefixes: &PrefixMap) -> Result<Vec<TriplePattern>, QueryError> {
    let mut patterns = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let err = |message: String| QueryError::Syntax { line: i + 1, message };
        let mut rest = line.trim();
        if rest.is_empty() || rest.starts_with('#') {
            continue;
        }
        let mut terms = Vec::with_capacity(3);
        while terms.len() < 3 {
            if rest.is_empty() {
                return Err(err(format!("expected 3 terms, found {}", terms.len())));
            }
            let (term, tail) = read_pattern_term(rest, prefixes).map_err(err)?;
            terms.push(term);
            rest = tail.trim_start();
        }
        let rest = rest.strip_prefix('.').unwrap_or(rest).trim();
        if !rest.is_empty() {
            return Err(err(format!("unexpected trailing text {rest:?}")));
        }
        let [s, p, o]: [PatternTerm; 3] = terms.try_into().expect("three terms");
        patterns.push(TriplePattern::new(s, p, o));
    }
    if patterns.is_empty() {
        return Err(QueryError::Empty);
    }
    Ok(patterns)
}

fn read_pattern_term<'a>(text: &'a str, prefixes: &PrefixMap) -> Result<(PatternTerm, &'a str), String> {
    if text.starts_with('<') || text.starts_with('"') {
        let (term, rest) = read_term(text)?;
        return Ok((PatternTerm::Term(term), rest));
    }
    let end = text.find(char::is_whitespace).unwrap_or(text.len());
    let (mut token, mut rest) = text.split_at(end);
    if token.len() > 1 && token.ends_with('.') && rest.trim().is_empty() {
        token = &token[..token.len() - 1];
        rest = ".";
    }
    let term = if let Some(name) = token.strip_prefix('?') {
        if !is_var_name(name) {
            return Err(format!("invalid variable {token:?}"));
        }
        PatternTerm::var(name)
    } else if token == "a" {
        PatternTerm::iri(RDF_TYPE)
    } else {
        let iri = prefixes.expand_curie(token).map_err(|e| e.to_string())?;
        PatternTerm::Term(Term::Iri(iri))
    };
    Ok((term, rest))
}
