//! Triples straight from the classified model, without going through HTML.

use crate::discourse::ClassifiedArticle;
use crate::html::article_annotations;
use crate::model::{BlockKind, IdentifiedArticle};

use super::prefix::PrefixMap;
use super::term::{Graph, Iri, Literal, Term};
use super::vocab::*;

pub fn direct_triples(article: &ClassifiedArticle) -> Graph {
    let ident = &article.article;
    let pm = PrefixMap::default();
    let rdf_type = Iri::new(RDF_TYPE);
    let is_part_of = Iri::new(SCHEMA_IS_PART_OF);
    let name = Iri::new(SCHEMA_NAME);
    let lit = |s: &str| Term::Literal(Literal::plain(s));

    let mut g = Graph::new();
    let doc = Iri::new(ident.base_uri());
    g.add(&doc, &rdf_type, Iri::new(SCHEMA_SCHOLARLY_ARTICLE));
    g.add(&doc, &rdf_type, Iri::new(SWRC_ARTICLE));
    g.add(&doc, &name, lit(&ident.metadata.title));
    if !ident.metadata.abstract_text.is_empty() {
        g.add(&doc, &Iri::new(SCHEMA_ABSTRACT), lit(&ident.metadata.abstract_text));
    }
    for (i, author) in ident.metadata.authors.iter().enumerate() {
        let person = Iri::new(ident.fragment_iri(&IdentifiedArticle::author_id(i)));
        g.add(&doc, &Iri::new(SCHEMA_AUTHOR), person.clone());
        g.add(&person, &rdf_type, Iri::new(SCHEMA_PERSON));
        g.add(&person, &name, lit(&author.name));
        if let Some(affiliation) = &author.affiliation {
            g.add(&person, &Iri::new(SCHEMA_AFFILIATION), lit(affiliation));
        }
        if let Some(email) = &author.email {
            g.add(&person, &Iri::new(SCHEMA_EMAIL), lit(email));
        }
    }

    let parents = ident.parent_sections();
    let enclosing = ident.enclosing_sections();
    for (i, block) in ident.blocks.iter().enumerate() {
        let node = Iri::new(ident.fragment_iri(&ident.block_ids[i]));
        let container = if block.heading_level().is_some() { parents[i] } else { enclosing[i] };
        let parent = container.map_or_else(|| doc.clone(), |p| Iri::new(ident.fragment_iri(&ident.block_ids[p])));
        g.add(&node, &is_part_of, parent);
        match &block.kind {
            BlockKind::Heading { .. } => {
                g.add(&node, &rdf_type, Iri::new(DOCO_SECTION));
                for class in article.classes(i) {
                    let class_iri = pm.expand_curie(class.curie()).expect("discourse classes use bound prefixes");
                    g.add(&node, &rdf_type, class_iri);
                }
                g.add(&node, &name, lit(&block.plain_text()));
            }
            BlockKind::Figure { caption, .. } => {
                g.add(&node, &rdf_type, Iri::new(SCHEMA_IMAGE_OBJECT));
                if caption.iter().any(|r| !r.text.is_empty()) {
                    g.add(&node, &Iri::new(SCHEMA_CAPTION), lit(&block.plain_text()));
                }
            }
            BlockKind::Table { .. } => g.add(&node, &rdf_type, Iri::new(SCHEMA_TABLE)),
            BlockKind::ReferenceEntry { .. } => {
                g.add(&node, &rdf_type, Iri::new(SCHEMA_CREATIVE_WORK));
                g.add(&node, &name, lit(&block.plain_text()));
                g.add(&doc, &Iri::new(SCHEMA_CITATION), node.clone());
            }
            BlockKind::Paragraph { .. } | BlockKind::List { .. } => {}
        }
    }

    let non_negative = |n: usize| Term::Literal(Literal::typed(n.to_string(), Iri::new(XSD_NON_NEGATIVE_INTEGER)));
    for a in article_annotations(ident) {
        let ann = Iri::new(&a.iri);
        let target = Iri::new(a.target_iri());
        let quote = Iri::new(a.quote_selector_iri());
        let position = Iri::new(a.position_selector_iri());
        g.add(&ann, &rdf_type, Iri::new(OA_ANNOTATION));
        g.add(&ann, &Iri::new(DCTERMS_CREATOR), lit(&a.creator));
        g.add(&ann, &Iri::new(DCTERMS_CREATED), Literal::typed(&a.created, Iri::new(XSD_DATE_TIME)));
        g.add(&ann, &Iri::new(OA_MOTIVATED_BY), Iri::new(OA_COMMENTING));
        g.add(&ann, &Iri::new(OA_BODY_VALUE), lit(&a.body));
        g.add(&ann, &Iri::new(OA_HAS_TARGET), target.clone());
        g.add(&target, &rdf_type, Iri::new(OA_SPECIFIC_RESOURCE));
        g.add(&target, &Iri::new(OA_HAS_SOURCE), Iri::new(&a.source_iri));
        g.add(&target, &Iri::new(OA_HAS_SELECTOR), quote.clone());
        g.add(&target, &Iri::new(OA_HAS_SELECTOR), position.clone());
        g.add(&quote, &rdf_type, Iri::new(OA_TEXT_QUOTE_SELECTOR));
        g.add(&quote, &Iri::new(OA_EXACT), lit(&a.exact));
        g.add(&quote, &Iri::new(OA_PREFIX), lit(&a.prefix));
        g.add(&quote, &Iri::new(OA_SUFFIX), lit(&a.suffix));
        g.add(&position, &rdf_type, Iri::new(OA_TEXT_POSITION_SELECTOR));
        g.add(&position, &Iri::new(OA_START), non_negative(a.start));
        g.add(&position, &Iri::new(OA_END), non_negative(a.end));
    }
    g
}
