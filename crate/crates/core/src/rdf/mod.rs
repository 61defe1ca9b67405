//! Triples, CURIEs, N-Triples, and the two routes from an article to a graph:
//! straight from the model ([`direct_triples`]) and through the generated
//! HTML ([`extract_rdfa`]).

mod direct;
mod ntriples;
mod prefix;
mod rdfa;
mod term;
pub mod vocab;

pub use direct::direct_triples;
pub use ntriples::{parse_ntriples, serialize_ntriples, MalformedNTriples};
pub(crate) use ntriples::read_term;
pub use prefix::{CurieError, PrefixMap};
pub use rdfa::{extract_rdfa, extract_rdfa_with_base, RdfaError};
pub use term::{Graph, Iri, Literal, Term, Triple};

/// Expands `prefix:local` against `pm`.
pub fn expand_curie(curie: &str, pm: &PrefixMap) -> Result<Iri, CurieError> {
    pm.expand_curie(curie)
}
