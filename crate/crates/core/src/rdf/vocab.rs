//! Namespaces and the terms the pipeline emits.

pub const DCTERMS: &str = "http://purl.org/dc/terms/";
pub const DEO: &str = "http://purl.org/spar/deo/";
pub const DOCO: &str = "http://purl.org/spar/doco/";
pub const OA: &str = "http://www.w3.org/ns/oa#";
pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const SCHEMA: &str = "http://schema.org/";
pub const SWRC: &str = "http://swrc.ontoware.org/ontology#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

macro_rules! terms {
    ($($name:ident = $ns:ident + $local:literal;)*) => {
        $(pub const $name: &str = concat_ns!($ns, $local);)*
    };
}

macro_rules! concat_ns {
    (SCHEMA, $local:literal) => { concat!("http://schema.org/", $local) };
    (OA, $local:literal) => { concat!("http://www.w3.org/ns/oa#", $local) };
    (DCTERMS, $local:literal) => { concat!("http://purl.org/dc/terms/", $local) };
    (DOCO, $local:literal) => { concat!("http://purl.org/spar/doco/", $local) };
    (SWRC, $local:literal) => { concat!("http://swrc.ontoware.org/ontology#", $local) };
    (XSD, $local:literal) => { concat!("http://www.w3.org/2001/XMLSchema#", $local) };
}

terms! {
    SCHEMA_SCHOLARLY_ARTICLE = SCHEMA + "ScholarlyArticle";
    SCHEMA_NAME = SCHEMA + "name";
    SCHEMA_ABSTRACT = SCHEMA + "abstract";
    SCHEMA_AUTHOR = SCHEMA + "author";
    SCHEMA_PERSON = SCHEMA + "Person";
    SCHEMA_AFFILIATION = SCHEMA + "affiliation";
    SCHEMA_EMAIL = SCHEMA + "email";
    SCHEMA_CITATION = SCHEMA + "citation";
    SCHEMA_CREATIVE_WORK = SCHEMA + "CreativeWork";
    SCHEMA_IMAGE_OBJECT = SCHEMA + "ImageObject";
    SCHEMA_TABLE = SCHEMA + "Table";
    SCHEMA_CAPTION = SCHEMA + "caption";
    SCHEMA_IS_PART_OF = SCHEMA + "isPartOf";
    SWRC_ARTICLE = SWRC + "Article";
    DOCO_SECTION = DOCO + "Section";
    OA_ANNOTATION = OA + "Annotation";
    OA_MOTIVATED_BY = OA + "motivatedBy";
    OA_COMMENTING = OA + "commenting";
    OA_BODY_VALUE = OA + "bodyValue";
    OA_HAS_TARGET = OA + "hasTarget";
    OA_SPECIFIC_RESOURCE = OA + "SpecificResource";
    OA_HAS_SOURCE = OA + "hasSource";
    OA_HAS_SELECTOR = OA + "hasSelector";
    OA_TEXT_QUOTE_SELECTOR = OA + "TextQuoteSelector";
    OA_TEXT_POSITION_SELECTOR = OA + "TextPositionSelector";
    OA_EXACT = OA + "exact";
    OA_PREFIX = OA + "prefix";
    OA_SUFFIX = OA + "suffix";
    OA_START = OA + "start";
    OA_END = OA + "end";
    DCTERMS_CREATOR = DCTERMS + "creator";
    DCTERMS_CREATED = DCTERMS + "created";
    XSD_DATE_TIME = XSD + "dateTime";
    XSD_NON_NEGATIVE_INTEGER = XSD + "nonNegativeInteger";
}
