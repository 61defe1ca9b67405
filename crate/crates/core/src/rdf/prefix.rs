use std::collections::BTreeMap;

use thiserror::Error;

use super::term::Iri;
use super::vocab;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurieError {
    #[error("unknown prefix {0:?}")]
    UnknownPrefix(String),
    #[error("{0:?} is not of the form prefix:local")]
    NotACurie(String),
}

/// Prefix to namespace bindings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixMap {
    bindings: BTreeMap<String, String>,
}

impl Default for PrefixMap {
    fn default() -> Self {
        let bindings = [
            ("dcterms", vocab::DCTERMS),
            ("deo", vocab::DEO),
            ("doco", vocab::DOCO),
            ("oa", vocab::OA),
            ("rdf", vocab::RDF),
            ("schema", vocab::SCHEMA),
            ("swrc", vocab::SWRC),
            ("xsd", vocab::XSD),
        ];
        PrefixMap {
            bindings: bindings.iter().map(|(p, ns)| (p.to_string(), ns.to_string())).collect(),
        }
    }
}

impl PrefixMap {
    pub fn empty() -> Self {
        PrefixMap { bindings: BTreeMap::new() }
    }

    pub fn bind(&mut self, prefix: impl Into<String>, namespace: impl Into<String>) {
        self.bindings.insert(prefix.into(), namespace.into());
    }

    pub fn namespace(&self, prefix: &str) -> Option<&str> {
        self.bindings.get(prefix).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.bindings.iter().map(|(p, ns)| (p.as_str(), ns.as_str()))
    }

    pub fn expand_curie(&self, curie: &str) -> Result<Iri, CurieError> {
        let (prefix, local) =
            curie.split_once(':').ok_or_else(|| CurieError::NotACurie(curie.to_string()))?;
        let namespace = self
            .namespace(prefix)
            .ok_or_else(|| CurieError::UnknownPrefix(prefix.to_string()))?;
        Ok(Iri::new(format!("{namespace}{local}")))
    }

    /// Value of an RDFa `prefix` attribute, bindings sorted by prefix.
    pub fn to_rdfa_attribute(&self) -> String {
        self.iter().map(|(p, ns)| format!("{p}: {ns}")).collect::<Vec<_>>().join(" ")
    }

    /// Parses `p1: ns1 p2: ns2`. Malformed pairs are skipped.
    pub fn parse_rdfa_attribute(value: &str) -> Vec<(String, String)> {
        let tokens: Vec<&str> = value.split_whitespace().collect();
        let mut pairs = Vec::new();
        let mut i = 0;
        while i + 1 < tokens.len() {
            match tokens[i].strip_suffix(':') {
                Some(prefix) if !prefix.is_empty() && !prefix.contains(':') => {
                    pairs.push((prefix.to_ascii_lowercase(), tokens[i + 1].to_string()));
                    i += 2;
                }
                _ => i += 1,
            }
        }
        pairs
    }
}
