//! RDFa extraction for the attribute subset the generator emits: `prefix`,
//! `about`, `resource`, `typeof`, `property`, `content` and `datatype`.
//!
//! Subject chaining follows RDFa 1.1 for that subset. `rel`, `rev`, `vocab`
//! and `inlist` are refused, as are blank nodes and bare terms. `href` and
//! `src` never create triples. The `<head>` subtree is skipped.

use thiserror::Error;

use crate::html::{Element, HtmlDocument};

use super::prefix::PrefixMap;
use super::term::{Graph, Iri, Literal, Term};
use super::vocab::RDF_TYPE;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RdfaError {
    #[error("unsupported RDFa feature: {0}")]
    UnsupportedRdfaFeature(String),
    #[error("relative IRI {0:?} with no base")]
    NoBase(String),
}

/// Extracts triples, taking the base from `<base href>` when present.
pub fn extract_rdfa(html: &HtmlDocument) -> Result<Graph, RdfaError> {
    extract_rdfa_with_base(html, None)
}

/// Extracts triples; `base` is used when the document has no `<base>`.
pub fn extract_rdfa_with_base(html: &HtmlDocument, base: Option<&str>) -> Result<Graph, RdfaError> {
    let doc_base = html
        .root
        .find(&|e| e.name == "base" && e.attr("href").is_some())
        .and_then(|e| e.attr("href"))
        .or(base)
        .map(|b| b.split('#').next().unwrap_or(b).to_string());
    let mut extractor = Extractor { base: doc_base, graph: Graph::new() };
    let subject = extractor.base.clone().map(Iri::new);
    extractor.process(&html.root, subject.as_ref(), &PrefixMap::default())?;
    Ok(extractor.graph)
}

struct Extractor {
    base: Option<String>,
    graph: Graph,
}

impl Extractor {
    fn process(&mut self, el: &Element, parent: Option<&Iri>, prefixes: &PrefixMap) -> Result<(), RdfaError> {
        if el.name == "head" {
            return Ok(());
        }
        for attr in ["rel", "rev", "vocab", "inlist"] {
            if el.attr(attr).is_some() {
                return Err(RdfaError::UnsupportedRdfaFeature(format!("@{attr} on <{}>", el.name)));
            }
        }
        let mut local;
        let mut prefixes = prefixes;
        if let Some(value) = el.attr("prefix") {
            local = prefixes.clone();
            for (p, ns) in PrefixMap::parse_rdfa_attribute(value) {
                local.bind(p, ns);
            }
            prefixes = &local;
        }

        let about = el.attr("about").map(|v| self.resource(v, prefixes)).transpose()?;
        let resource = el.attr("resource").map(|v| self.resource(v, prefixes)).transpose()?;
        let types = self.terms(el.attr("typeof"), prefixes)?;
        let properties = self.terms(el.attr("property"), prefixes)?;
        let content = el.attr("content");
        let datatype = el.attr("datatype");
        let has_typeof = el.attr("typeof").is_some();

        let new_subject;
        let mut typed = None;
        let mut current_object = None;
        if el.attr("property").is_some() && content.is_none() && datatype.is_none() {
            new_subject = about.clone().or_else(|| parent.cloned());
            if has_typeof {
                typed = Some(match about.clone().or_else(|| resource.clone()) {
                    Some(r) => r,
                    None => return Err(blank_node(el)),
                });
                if about.is_none() {
                    current_object = typed.clone();
                }
            }
        } else {
            new_subject = match (&about, &resource) {
                (Some(a), _) => Some(a.clone()),
                (None, Some(r)) => Some(r.clone()),
                (None, None) if has_typeof => return Err(blank_node(el)),
                (None, None) => parent.cloned(),
            };
            if has_typeof {
                typed = new_subject.clone();
            }
        }

        if let Some(t) = &typed {
            let rdf_type = Iri::new(RDF_TYPE);
            for class in &types {
                self.graph.add(t, &rdf_type, class.clone());
            }
        }

        if !properties.is_empty() {
            let subject = new_subject.clone().ok_or_else(|| RdfaError::NoBase(format!("<{}>", el.name)))?;
            let datatype_iri = match datatype {
                Some("") | None => None,
                Some(d) => Some(self.term(d, prefixes)?),
            };
            let value: Term = if let Some(c) = content {
                literal(c.to_string(), datatype_iri)
            } else if datatype.is_some() {
                literal(el.text_content(), datatype_iri)
            } else if let Some(r) = &resource {
                Term::Iri(r.clone())
            } else if let (true, None, Some(t)) = (has_typeof, &about, &typed) {
                Term::Iri(t.clone())
            } else {
                literal(el.text_content(), None)
            };
            for p in &properties {
                self.graph.add(&subject, p, value.clone());
            }
        }

        let child_subject = current_object.or(new_subject);
        for child in el.child_elements() {
            self.process(child, child_subject.as_ref(), prefixes)?;
        }
        Ok(())
    }

    /// `about`/`resource` values: safe CURIE, CURIE with a bound prefix, or
    /// IRI (resolved against the base).
    fn resource(&self, value: &str, prefixes: &PrefixMap) -> Result<Iri, RdfaError> {
        let value = value.trim();
        if let Some(inner) = value.strip_prefix('[').and_then(|v| v.strip_suffix(']')) {
            if inner.starts_with("_:") {
                return Err(RdfaError::UnsupportedRdfaFeature(format!("blank node {value}")));
            }
            return prefixes
                .expand_curie(inner)
                .map_err(|e| RdfaError::UnsupportedRdfaFeature(e.to_string()));
        }
        if value.starts_with("_:") {
            return Err(RdfaError::UnsupportedRdfaFeature(format!("blank node {value}")));
        }
        if let Some((prefix, _)) = value.split_once(':') {
            if prefixes.namespace(prefix).is_some() {
                return Ok(prefixes.expand_curie(value).expect("prefix is bound"));
            }
            if has_scheme(value) {
                return Ok(Iri::new(value));
            }
        }
        self.resolve(value)
    }

    /// `typeof`/`property`/`datatype` values: CURIE with a bound prefix or
    /// absolute IRI.
    fn term(&self, value: &str, prefixes: &PrefixMap) -> Result<Iri, RdfaError> {
        match value.split_once(':') {
            Some(("_", _)) => Err(RdfaError::UnsupportedRdfaFeature(format!("blank node {value}"))),
            Some((prefix, _)) if prefixes.namespace(prefix).is_some() => {
                Ok(prefixes.expand_curie(value).expect("prefix is bound"))
            }
            Some(_) if has_scheme(value) => Ok(Iri::new(value)),
            _ => Err(RdfaError::UnsupportedRdfaFeature(format!("term {value:?} (vocabulary terms need @vocab)"))),
        }
    }

    fn terms(&self, value: Option<&str>, prefixes: &PrefixMap) -> Result<Vec<Iri>, RdfaError> {
        value
            .unwrap_or_default()
            .split_whitespace()
            .map(|v| self.term(v, prefixes))
            .collect()
    }

    fn resolve(&self, reference: &str) -> Result<Iri, RdfaError> {
        let base = self.base.as_deref().ok_or_else(|| RdfaError::NoBase(reference.to_string()))?;
        Ok(Iri::new(resolve_reference(base, reference)))
    }
}

fn literal(lexical: String, datatype: Option<Iri>) -> Term {
    Term::Literal(Literal { lexical, datatype, language: None })
}

fn blank_node(el: &Element) -> RdfaError {
    RdfaError::UnsupportedRdfaFeature(format!("<{}> would need a blank node", el.name))
}

fn has_scheme(value: &str) -> bool {
    let Some((scheme, _)) = value.split_once(':') else {
        return false;
    };
    let mut chars = scheme.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

/// Minimal reference resolution: fragment-only, absolute-path and
/// relative-path references against a hierarchical base.
fn resolve_reference(base: &str, reference: &str) -> String {
    let base = base.split('#').next().unwrap_or(base);
    if reference.is_empty() {
        return base.to_string();
    }
    if reference.starts_with('#') {
        return format!("{base}{reference}");
    }
    let without_query = base.split('?').next().unwrap_or(base);
    let authority_end = without_query
        .find("://")
        .map(|i| i + 3 + without_query[i + 3..].find('/').unwrap_or(without_query.len() - i - 3))
        .unwrap_or(0);
    if let Some(path) = reference.strip_prefix('/') {
        return format!("{}/{path}", &without_query[..authority_end]);
    }
    match without_query.rfind('/') {
        Some(i) if i >= authority_end => format!("{}{reference}", &without_query[..=i]),
        _ => format!("{}/{reference}", &without_query[..authority_end]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::vocab::*;

    fn parse(html: &str) -> HtmlDocument {
        HtmlDocument::parse(html).unwrap()
    }

    fn has(g: &Graph, s: &str, p: &str, o: Term) -> bool {
        g.contains(&crate::rdf::Triple::new(Iri::new(s), Iri::new(p), o))
    }

    #[test]
    fn typeof_with_relative_about() {
        let doc = parse(r##"<html><body><article about="#a" typeof="schema:ScholarlyArticle"></article></body></html>"##);
        let g = extract_rdfa_with_base(&doc, Some("https://ex.org/doc")).unwrap();
        assert_eq!(g.len(), 1);
        assert!(has(&g, "https://ex.org/doc#a", RDF_TYPE, Term::iri(SCHEMA_SCHOLARLY_ARTICLE)));
    }

    #[test]
    fn typed_content_literal() {
        let doc = parse(
            r#"<div about="https://ex.org/s"><span property="oa:start" datatype="xsd:nonNegativeInteger" content="15">x</span></div>"#,
        );
        let g = extract_rdfa(&doc).unwrap();
        assert!(has(
            &g,
            "https://ex.org/s",
            OA_START,
            Term::Literal(Literal::typed("15", Iri::new(XSD_NON_NEGATIVE_INTEGER)))
        ));
    }

    #[test]
    fn chaining_through_typed_resource() {
        let doc = parse(
            r#"<div about="https://ex.org/a"><div typeof="oa:SpecificResource" property="oa:hasTarget" resource="https://ex.org/t"><span property="oa:hasSource" resource="https://ex.org/b"></span></div><p property="schema:name">N</p></div>"#,
        );
        let g = extract_rdfa(&doc).unwrap();
        assert!(has(&g, "https://ex.org/a", OA_HAS_TARGET, Term::iri("https://ex.org/t")));
        assert!(has(&g, "https://ex.org/t", RDF_TYPE, Term::iri(OA_SPECIFIC_RESOURCE)));
        assert!(has(&g, "https://ex.org/t", OA_HAS_SOURCE, Term::iri("https://ex.org/b")));
        assert!(has(&g, "https://ex.org/a", SCHEMA_NAME, Term::literal("N")));
        assert_eq!(g.len(), 4);
    }

    #[test]
    fn about_keeps_children_on_the_subject() {
        let doc = parse(
            r#"<div about="https://ex.org/a"><section about="https://ex.org/s" typeof="doco:Section" property="schema:isPartOf" resource="https://ex.org/a"><h2 property="schema:name">Intro <em>x</em></h2></section></div>"#,
        );
        let g = extract_rdfa(&doc).unwrap();
        assert!(has(&g, "https://ex.org/s", SCHEMA_IS_PART_OF, Term::iri("https://ex.org/a")));
        assert!(has(&g, "https://ex.org/s", SCHEMA_NAME, Term::literal("Intro x")));
        assert!(has(&g, "https://ex.org/s", RDF_TYPE, Term::iri(DOCO_SECTION)));
    }

    #[test]
    fn prefix_attribute_and_safe_curies() {
        let doc = parse(
            r#"<div prefix="ex: https://ex.org/ns#" about="[ex:a]"><span property="ex:p" resource="ex:b"></span></div>"#,
        );
        let g = extract_rdfa(&doc).unwrap();
        assert!(has(&g, "https://ex.org/ns#a", "https://ex.org/ns#p", Term::iri("https://ex.org/ns#b")));
    }

    #[test]
    fn unsupported_features() {
        for html in [
            r#"<div about="https://ex.org/a" rel="schema:x" resource="https://ex.org/b"></div>"#,
            r#"<div vocab="http://schema.org/"></div>"#,
            r#"<div about="https://ex.org/a"><span property="name">x</span></div>"#,
            r#"<div about="_:b0" typeof="schema:Thing"></div>"#,
            r#"<div typeof="schema:Thing"></div>"#,
        ] {
            assert!(matches!(extract_rdfa(&parse(html)), Err(RdfaError::UnsupportedRdfaFeature(_))), "{html}");
        }
        assert!(matches!(
            extract_rdfa(&parse(r##"<div about="#a" typeof="schema:Thing"></div>"##)),
            Err(RdfaError::NoBase(_))
        ));
    }

    #[test]
    fn head_is_skipped_and_base_element_used() {
        let doc = parse(
            r##"<html><head><base href="https://ex.org/d"><link rel="stylesheet" href="s.css"></head><body><p about="#x" property="schema:name">n</p></body></html>"##,
        );
        let g = extract_rdfa(&doc).unwrap();
        assert!(has(&g, "https://ex.org/d#x", SCHEMA_NAME, Term::literal("n")));
    }

    #[test]
    fn reference_resolution() {
        assert_eq!(resolve_reference("https://ex.org/a/b?q#f", "#x"), "https://ex.org/a/b?q#x");
        assert_eq!(resolve_reference("https://ex.org/a/b", "c"), "https://ex.org/a/c");
        assert_eq!(resolve_reference("https://ex.org/a/b", "/c"), "https://ex.org/c");
        assert_eq!(resolve_reference("https://ex.org", "c"), "https://ex.org/c");
    }
}
