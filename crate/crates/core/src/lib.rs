//! Scholarly article bundles with anchored review comments, converted to
//! HTML+RDFa with the comments as Web Annotations, read back into RDF and
//! queried.

pub mod discourse;
pub mod html;
pub mod ingest;
pub mod model;
pub mod package;
pub mod pipeline;
pub mod query;
pub mod rdf;
#[cfg(feature = "synth")]
pub mod synth;
